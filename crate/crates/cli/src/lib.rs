//! Library half of the command-line tool: map-file ingestion and report
//! assembly, shared by the `keller` binary and the corpus generator.

pub mod mapfile;
pub mod report;

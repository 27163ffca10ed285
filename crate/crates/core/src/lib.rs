//! Exact arithmetic for polynomial map inversion.
//!
//! The crate provides sparse multivariate polynomials over an exact scalar
//! type, polynomial matrices with fraction-free determinants, validated
//! polynomial self-maps of the form `x - V(x)`, truncated formal inverses,
//! a rooted-tree expansion of the inverse with order filters, and trace-log
//! series identities. Everything is generic over [`scalar::Scalar`]; the
//! `Rat*` aliases fix the scalar to arbitrary-precision rationals, which is
//! the instantiation all identity checks use.

pub mod corpus;
pub mod error;
pub mod inverse;
pub mod map;
pub mod matrix;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod traces;
pub mod trees;

pub use corpus::{compose_maps, corpus, Fixture};
pub use error::{Error, Result};
pub use inverse::{
    certify_polynomial, degree_bound, degree_bound_report, degree_bound_reduced,
    effective_cap, growth_check, invert_truncated, invert_via_reduction, BoundKind,
    DegreeBoundReport, InverseSeries, PolynomialityCertificate, DEFAULT_SAFETY_CAP,
};
pub use map::{KellerReport, LinearReduction, MapNorms, PolyMap, VertexView};
pub use matrix::PolyMatrix;
pub use poly::{Monomial, Polynomial};
pub use report::IdentityReport;
pub use scalar::Scalar;
pub use traces::{
    exp_truncated, min_index_partition, min_index_partition_capped,
    restricted_exp_product_check, trace_log_series, trace_log_series_with_qcap,
    MinIndexClass, RestrictedExpReport, TraceSeries,
};
pub use trees::{
    alignment_filter, alignment_filter_ranked, enumerate_trees, factorization_check,
    restricted_sum, restricted_sum_ranked, tree_sum, tree_value, AlignmentVerdict,
    EdgeList, EnumGuard, FactorizationReport, Node, Tree,
};

/// Exact rational scalar used by all identity checks.
pub type Rat = num_rational::BigRational;

pub type RatPoly = Polynomial<Rat>;
pub type RatPolyMatrix = PolyMatrix<Rat>;
pub type RatPolyMap = PolyMap<Rat>;
pub type RatInverseSeries = InverseSeries<Rat>;

//! `keller` — checks for polynomial maps of the form `x - V(x)`.
//!
//! Subcommands: `check` (Jacobian verdict, norms, linear-part nilpotency,
//! optional reduction), `invert` (truncated formal inverse with optional
//! certificate), `trees` (rooted-tree expansion statistics and the
//! restricted-sum identity), `trace` (trace-log series identities).
//! Reports go to stdout as JSON; artifacts are map files written next to
//! the input unless `--out` says otherwise.
//!
//! Exit codes: 0 all checks hold, 1 some check is false, 2 unreadable or
//! malformed input, 3 precondition violated, 4 guard refused the work,
//! 5 internal inconsistency (a bug), 6 conditional check on a map outside
//! its hypothesis.

use clap::{Parser, Subcommand};
use keller_cli::mapfile::{self, rational_string};
use keller_cli::report::{CheckOut, RunReport};
use keller_core::{
    alignment_filter, certify_polynomial, degree_bound_report, effective_cap, enumerate_trees,
    factorization_check, growth_check, invert_truncated, restricted_exp_product_check, BoundKind,
    EnumGuard, Error, InverseSeries, PolyMap, RatPolyMap, DEFAULT_SAFETY_CAP,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "keller", version, about = "Exact checks for polynomial maps x - V(x)")]
struct Cli {
    /// Print timing figures to stderr (stdout stays byte-identical).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Jacobian-determinant verdict, norms, and linear-part diagnostics.
    Check {
        file: PathBuf,
        /// Eliminate a nilpotent linear part and write the reduced map.
        #[arg(long)]
        reduce_linear: bool,
        /// Where to write the reduced map (default: <input>.reduced.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated formal inverse, written as a map file.
    Invert {
        file: PathBuf,
        /// Truncation cap (default: the degree bound, if the safety cap allows).
        #[arg(long)]
        cap: Option<usize>,
        /// Verify both composition residuals and report degree bounds.
        #[arg(long)]
        certify: bool,
        /// Where to write the inverse (default: <input>.inverse.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rooted-tree expansion statistics and filter survivor counts.
    Trees {
        file: PathBuf,
        /// Expansion order (number of leaves) to enumerate through.
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Report survivor counts for levels 0..=k (default: k = n).
        #[arg(long)]
        filter_level: Option<usize>,
        /// Compare the full sum against the level-n restricted sum.
        #[arg(long)]
        factorization: bool,
    },
    /// Trace-log series, min-index partition, restricted exponentials.
    Trace {
        file: PathBuf,
        /// Degree cap for every series.
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn lift(e: Error) -> Failure {
    let code = match &e {
        Error::DimensionMismatch { .. } | Error::InvalidMap(_) | Error::ConstantTermEntries => 2,
        Error::CapTooSmall
        | Error::LinearPartPresent
        | Error::NotNilpotent { .. }
        | Error::UnsupportedDimension { .. } => 3,
        Error::GuardExceeded { .. } => 4,
        Error::InternalInconsistency(_) => 5,
        Error::NonKellerInput => 6,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let timings = cli.timings;
    let result = match cli.command {
        Cmd::Check {
            file,
            reduce_linear,
            out,
        } => cmd_check(&file, reduce_linear, out.as_deref()),
        Cmd::Invert {
            file,
            cap,
            certify,
            out,
        } => cmd_invert(&file, cap, certify, out.as_deref()),
        Cmd::Trees {
            file,
            order,
            filter_level,
            factorization,
        } => cmd_trees(&file, order, filter_level, factorization),
        Cmd::Trace { file, cap } => cmd_trace(&file, cap),
    };
    if timings {
        eprintln!("{}", json!({ "total_ms": started.elapsed().as_millis() as u64 }));
    }
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<(String, RatPolyMap), Failure> {
    mapfile::read_map(path).map_err(|message| Failure { code: 2, message })
}

/// `<input>.<suffix>` next to the input file.
fn default_artifact(input: &Path, suffix: &str) -> PathBuf {
    input.with_extension(suffix)
}

fn write_artifact(path: &Path, map: &RatPolyMap) -> Result<(), Failure> {
    mapfile::write_map(path, map).map_err(|message| Failure { code: 3, message })
}

fn cmd_check(file: &Path, reduce_linear: bool, out: Option<&Path>) -> Result<u8, Failure> {
    let (text, map) = load(file)?;
    let mut rep = RunReport::new("check", file, &text);
    let keller = map.keller_check();
    rep.push(&keller.as_report());
    let (nil_check, nil_index) = match map.nilpotency_index() {
        Ok(k) => (CheckOut::holds("linear_part_nilpotent"), Some(k)),
        Err(Error::NotNilpotent { witness }) => {
            (CheckOut::fails("linear_part_nilpotent", witness), None)
        }
        Err(e) => return Err(lift(e)),
    };
    rep.checks.push(nil_check);
    let norms = map.norms();
    let mut data = json!({
        "n": map.n(),
        "d": map.degree(),
        "sup_norm": rational_string(&norms.sup_norm),
        "radius": rational_string(&norms.radius),
        "jacobian_determinant": keller.det.to_string(),
        "nilpotency_index": nil_index,
    });
    if reduce_linear {
        let reduction = map.linear_reduction().map_err(lift)?;
        rep.push(&reduction.entry_bound);
        let target = out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| default_artifact(file, "reduced.json"));
        write_artifact(&target, &reduction.reduced)?;
        data["reduced_path"] = json!(target.display().to_string());
        data["reduction_nilpotency_index"] = json!(reduction.nilpotency_index);
    }
    rep.data = data;
    rep.print();
    Ok(if rep.any_failed() { 1 } else { 0 })
}

fn safety_cap() -> Result<usize, Failure> {
    match std::env::var("KELLER_GUARD_CAP") {
        Ok(raw) => raw.parse().map_err(|_| Failure {
            code: 3,
            message: format!("KELLER_GUARD_CAP must be a positive integer, got `{raw}`"),
        }),
        Err(_) => Ok(DEFAULT_SAFETY_CAP),
    }
}

fn cmd_invert(
    file: &Path,
    cap_flag: Option<usize>,
    certify: bool,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let (text, map) = load(file)?;
    let safety = safety_cap()?;
    let cap = effective_cap(map.n(), map.degree(), cap_flag, safety).map_err(lift)?;
    let mut inverse = invert_truncated(&map, cap).map_err(lift)?;
    if std::env::var_os("KELLER_SELFTEST_CORRUPT").is_some() {
        inverse = corrupt_for_selftest(inverse);
    }
    let out_path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_artifact(file, "inverse.json"));
    let inverse_map = PolyMap::with_degree(
        inverse.components().to_vec(),
        inverse.observed_degree().max(1),
    )
    .map_err(lift)?;
    write_artifact(&out_path, &inverse_map)?;
    let mut rep = RunReport::new("invert", file, &text);
    let mut data = json!({
        "n": map.n(),
        "d": map.degree(),
        "cap_requested": cap_flag,
        "cap_effective": cap,
        "safety_cap": safety,
        "stabilized_at": inverse.stabilized_at(),
        "observed_degree": inverse.observed_degree(),
        "output": out_path.display().to_string(),
    });
    if certify {
        let cert = certify_polynomial(&map, &inverse).map_err(lift)?;
        rep.checks.push(CheckOut::holds("inverse_residuals_vanish"));
        rep.push(&growth_check(&map, &inverse));
        let bounds = degree_bound_report(
            map.n(),
            map.degree(),
            inverse.observed_degree(),
            BoundKind::Direct,
        )
        .map_err(lift)?;
        if bounds.within_bound {
            rep.checks.push(CheckOut::holds("observed_degree_within_bound"));
        } else {
            rep.checks.push(CheckOut::fails(
                "observed_degree_within_bound",
                format!(
                    "observed degree {} exceeds bound {}",
                    bounds.observed_degree, bounds.bound
                ),
            ));
        }
        data["certificate"] = json!({
            "verified_cap": cert.verified_cap,
            "highest_nonzero_order": cert.highest_nonzero_order,
            "cap_covers_bound": cert.cap_covers_bound,
            "polynomial_so_far": cert.polynomial_so_far,
        });
        data["degree_bounds"] = json!({
            "direct": bounds.bound.to_string(),
            "via_reduction": bounds.alternate_bound.to_string(),
        });
    }
    rep.data = data;
    rep.print();
    Ok(if rep.any_failed() { 1 } else { 0 })
}

/// Deliberately break the series so the downstream certificate rejects it;
/// lets tests reach the internal-inconsistency exit without planting a bug.
fn corrupt_for_selftest(inverse: InverseSeries<keller_core::Rat>) -> InverseSeries<keller_core::Rat> {
    let n = inverse.n();
    let mut components = inverse.components().to_vec();
    components[0] = &components[0] + &keller_core::Polynomial::variable(n, 0);
    InverseSeries::from_parts(n, inverse.cap(), components, inverse.stabilized_at())
}

fn cmd_trees(
    file: &Path,
    order: usize,
    filter_level: Option<usize>,
    factorization: bool,
) -> Result<u8, Failure> {
    let (text, map) = load(file)?;
    let guard = EnumGuard::default();
    guard.admit(map.n(), map.degree(), order).map_err(lift)?;
    let mut counts = Vec::with_capacity(order);
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut trees = Vec::new();
    for ord in 1..=order {
        let batch = enumerate_trees(&map, ord).map_err(lift)?;
        counts.push(batch.len());
        for t in &batch {
            *histogram.entry(t.length()).or_default() += 1;
        }
        trees.extend(batch);
    }
    let level_max = filter_level.unwrap_or(map.n());
    let survivors: Vec<(usize, usize)> = (0..=level_max)
        .map(|k| {
            let alive = trees.iter().filter(|t| alignment_filter(t, k).survives).count();
            (k, alive)
        })
        .collect();
    let mut rep = RunReport::new("trees", file, &text);
    let mut data = json!({
        "n": map.n(),
        "d": map.degree(),
        "order": order,
        "tree_counts_per_order": counts,
        "length_histogram": histogram.iter().map(|(l, c)| json!([l, c])).collect::<Vec<_>>(),
        "survivors_per_level": survivors.iter().map(|(k, c)| json!([k, c])).collect::<Vec<_>>(),
    });
    if factorization {
        let verdict = factorization_check(&map, order, &guard).map_err(lift)?;
        rep.push(&verdict.identity);
        rep.push(&verdict.length_bound);
        rep.push(&verdict.degree_per_length);
        data["max_survivor_length"] = json!(verdict.max_survivor_length);
    }
    rep.data = data;
    rep.print();
    Ok(if rep.any_failed() { 1 } else { 0 })
}

fn cmd_trace(file: &Path, cap: usize) -> Result<u8, Failure> {
    let (text, map) = load(file)?;
    let (target, reduced_from_linear) = if map.has_linear_part() {
        let reduction = map.linear_reduction().map_err(lift)?;
        (reduction.reduced, true)
    } else {
        (map.clone(), false)
    };
    let suite = restricted_exp_product_check(&target, cap).map_err(lift)?;
    let mut rep = RunReport::new("trace", file, &text);
    rep.push(&suite.partition);
    rep.push(&suite.vanishing);
    rep.checks.push(CheckOut::holds("min_index_partition_consistent"));
    rep.data = json!({
        "cap": cap,
        "is_keller": suite.is_keller,
        "reduced_from_linear": reduced_from_linear,
        "trace_log_series": suite.full_series.to_string(),
        "class_series": suite
            .class_series
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>(),
    });
    rep.print();
    Ok(if rep.any_failed() { 1 } else { 0 })
}

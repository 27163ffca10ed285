//! Trace-log series and the min-index partition of matrix-power traces.
//!
//! For a square polynomial matrix `M` with no constant entries, the series
//! `-Tr ln(1 - M) = sum_{q >= 1} (1/q) Tr M^q` truncates cleanly by total
//! degree. Its cyclic-word structure partitions by the smallest index a
//! word visits, which splits the series into per-index classes; for a map
//! passing the Jacobian test the full series vanishes identically, so the
//! product of the per-class exponentials is 1.

use crate::error::{Error, Result};
use crate::map::PolyMap;
use crate::matrix::PolyMatrix;
use crate::poly::Polynomial;
use crate::report::IdentityReport;
use crate::scalar::Scalar;

/// Truncation of `-Tr ln(1 - M)` by total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSeries<T> {
    pub cap: usize,
    pub value: Polynomial<T>,
}

/// Largest cyclic-word count `n^Q` still enumerated exhaustively (beyond it
/// only the submatrix route runs, losing the built-in differential).
const EXHAUSTIVE_WORD_LIMIT: u128 = 1_000_000;

/// `-Tr ln(1 - M)` truncated at `cap`. Requires every entry to have zero
/// constant term, which makes `q <= cap` a complete summation range.
pub fn trace_log_series<T: Scalar>(m: &PolyMatrix<T>, cap: usize) -> Result<TraceSeries<T>> {
    assert_eq!(m.rows(), m.cols(), "trace-log needs a square matrix");
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m.get(i, j).constant_term().is_zero() {
                return Err(Error::ConstantTermEntries);
            }
        }
    }
    trace_log_series_with_qcap(m, cap, cap)
}

/// Trace-log truncation with an explicit bound on the power `q`. This is the
/// entry point for matrices with constant entries, where degree alone does
/// not terminate the sum; the caller owns the choice of `qcap`.
pub fn trace_log_series_with_qcap<T: Scalar>(
    m: &PolyMatrix<T>,
    cap: usize,
    qcap: usize,
) -> Result<TraceSeries<T>> {
    assert_eq!(m.rows(), m.cols(), "trace-log needs a square matrix");
    let mut value = Polynomial::zero(m.dim());
    if m.rows() == 0 {
        return Ok(TraceSeries { cap, value });
    }
    let mut power = PolyMatrix::identity(m.rows(), m.dim());
    for q in 1..=qcap {
        power = power.mul_capped(m, cap);
        let inverse_q = T::one() / T::from_int(q as i64);
        value = &value + &power.trace().scale(&inverse_q);
    }
    Ok(TraceSeries { cap, value })
}

/// Truncated exponential of a polynomial with zero constant term: since the
/// argument has minimal degree 1, powers beyond `cap` cannot contribute.
pub fn exp_truncated<T: Scalar>(p: &Polynomial<T>, cap: usize) -> Result<Polynomial<T>> {
    if !p.constant_term().is_zero() {
        return Err(Error::ConstantTermEntries);
    }
    let mut acc = Polynomial::one(p.dim());
    let mut term = Polynomial::one(p.dim());
    for k in 1..=cap {
        let inverse_k = T::one() / T::from_int(k as i64);
        term = term.mul_capped(p, cap).scale(&inverse_k);
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

/// One class of the min-index partition: the part of `Tr M^Q` contributed by
/// cyclic index words whose smallest visited index is exactly `r`
/// (zero-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinIndexClass<T> {
    pub r: usize,
    pub value: Polynomial<T>,
}

/// Split `Tr M^Q` by the minimum index of the cyclic word. Two independent
/// routes compute the classes — explicit word enumeration and the
/// difference of principal-submatrix traces — and must agree whenever the
/// word count stays within the exhaustive limit; a mismatch means a bug and
/// surfaces as an internal-inconsistency error.
pub fn min_index_partition<T: Scalar>(
    m: &PolyMatrix<T>,
    q: usize,
) -> Result<Vec<MinIndexClass<T>>> {
    partition_impl(m, q, None)
}

/// Same partition with every class truncated to total degree `cap`.
pub fn min_index_partition_capped<T: Scalar>(
    m: &PolyMatrix<T>,
    q: usize,
    cap: usize,
) -> Result<Vec<MinIndexClass<T>>> {
    partition_impl(m, q, Some(cap))
}

fn partition_impl<T: Scalar>(
    m: &PolyMatrix<T>,
    q: usize,
    cap: Option<usize>,
) -> Result<Vec<MinIndexClass<T>>> {
    assert_eq!(m.rows(), m.cols(), "partition needs a square matrix");
    assert!(q >= 1, "power must be at least 1");
    let n = m.rows();
    let by_submatrices = submatrix_classes(m, q, cap);
    let words = (n as u128).saturating_pow(q as u32);
    if words <= EXHAUSTIVE_WORD_LIMIT {
        let by_words = exhaustive_classes(m, q, cap);
        if by_words != by_submatrices {
            return Err(Error::InternalInconsistency(format!(
                "min-index partition routes disagree for n={n}, Q={q}"
            )));
        }
    }
    Ok((0..n)
        .map(|r| MinIndexClass {
            r,
            value: by_submatrices[r].clone(),
        })
        .collect())
}

/// Class `r` as `Tr(M[r..][r..]^Q) - Tr(M[r+1..][r+1..]^Q)`: words over
/// indices `>= r` minus words over indices `> r` leave exactly the words
/// whose minimum is `r`.
fn submatrix_classes<T: Scalar>(
    m: &PolyMatrix<T>,
    q: usize,
    cap: Option<usize>,
) -> Vec<Polynomial<T>> {
    let n = m.rows();
    let tail_trace = |r: usize| -> Polynomial<T> {
        let size = n - r;
        if size == 0 {
            return Polynomial::zero(m.dim());
        }
        let tail = PolyMatrix::from_fn(size, size, m.dim(), |i, j| m.get(r + i, r + j).clone());
        let mut power = PolyMatrix::identity(size, m.dim());
        for _ in 0..q {
            power = match cap {
                Some(c) => power.mul_capped(&tail, c),
                None => power.mul(&tail),
            };
        }
        power.trace()
    };
    let traces: Vec<Polynomial<T>> = (0..=n).map(tail_trace).collect();
    (0..n).map(|r| &traces[r] - &traces[r + 1]).collect()
}

fn exhaustive_classes<T: Scalar>(
    m: &PolyMatrix<T>,
    q: usize,
    cap: Option<usize>,
) -> Vec<Polynomial<T>> {
    let n = m.rows();
    let mut classes = vec![Polynomial::zero(m.dim()); n];
    let mut word = vec![0usize; q];
    loop {
        let min_index = *word.iter().min().unwrap();
        let mut product = Polynomial::one(m.dim());
        let mut vanished = false;
        for pos in 0..q {
            let entry = m.get(word[pos], word[(pos + 1) % q]);
            if entry.is_zero() {
                vanished = true;
                break;
            }
            product = match cap {
                Some(c) => product.mul_capped(entry, c),
                None => &product * entry,
            };
        }
        if !vanished && !product.is_zero() {
            classes[min_index] = &classes[min_index] + &product;
        }
        // advance the word like a base-n counter
        let mut pos = 0;
        loop {
            if pos == q {
                return classes;
            }
            word[pos] += 1;
            if word[pos] < n {
                break;
            }
            word[pos] = 0;
            pos += 1;
        }
    }
}

/// Everything the restricted-exponential product check reports.
#[derive(Debug, Clone)]
pub struct RestrictedExpReport<T> {
    pub is_keller: bool,
    /// The per-class series sum back to the full trace-log series.
    pub partition: IdentityReport,
    /// The full series vanishes through the cap — equivalently, the product
    /// of the per-class exponentials is 1. Expected to fail on maps that do
    /// not pass the Jacobian test; the report says so rather than erroring.
    pub vanishing: IdentityReport,
    pub full_series: Polynomial<T>,
    /// Per min-index class `r`, the restricted trace-log series.
    pub class_series: Vec<Polynomial<T>>,
}

/// Build the per-class restricted trace-log series of `jacobian(V)`, verify
/// they partition the full series, and check that the full series vanishes
/// (equivalently that the product of class exponentials is 1) through `cap`.
/// The explicit exponential product is recomputed independently and must
/// agree with the vanishing verdict. Maps with a linear part must be reduced
/// first: their Jacobian has constant entries and the class series lose
/// their degree truncation.
pub fn restricted_exp_product_check<T: Scalar>(
    v: &PolyMap<T>,
    cap: usize,
) -> Result<RestrictedExpReport<T>> {
    if v.has_linear_part() {
        return Err(Error::LinearPartPresent);
    }
    let n = v.n();
    let is_keller = v.keller_check().is_keller;
    let m = v.jacobian();
    let full = trace_log_series(&m, cap)?.value;
    let mut class_series = Vec::with_capacity(n);
    for q in 1..=cap {
        let parts = min_index_partition_capped(&m, q, cap)?;
        let inverse_q = T::one() / T::from_int(q as i64);
        for (r, part) in parts.into_iter().enumerate() {
            let scaled = part.value.scale(&inverse_q);
            if q == 1 {
                class_series.push(scaled);
            } else {
                class_series[r] = &class_series[r] + &scaled;
            }
        }
    }
    let mut class_total = Polynomial::zero(n);
    for s in &class_series {
        class_total = &class_total + s;
    }
    let partition = if class_total == full {
        IdentityReport::holds("class_series_sum_to_full_trace_log")
    } else {
        let diff = &class_total - &full;
        IdentityReport::fails(
            "class_series_sum_to_full_trace_log",
            first_term_string(&diff),
        )
    };
    let vanishing = if full.is_zero() {
        IdentityReport::holds("trace_log_vanishes_product_is_one")
    } else {
        IdentityReport::fails(
            "trace_log_vanishes_product_is_one",
            first_term_string(&full),
        )
    };
    // independent route: multiply the class exponentials out and compare
    let mut product = Polynomial::one(n);
    for s in &class_series {
        product = product.mul_capped(&exp_truncated(s, cap)?, cap);
    }
    if product.is_one() != vanishing.holds {
        return Err(Error::InternalInconsistency(
            "exponential product disagrees with the vanishing verdict".into(),
        ));
    }
    Ok(RestrictedExpReport {
        is_keller,
        partition,
        vanishing,
        full_series: full,
        class_series,
    })
}

fn first_term_string<T: Scalar>(p: &Polynomial<T>) -> String {
    let first = p.terms().next().map(|(m, c)| (m.clone(), c.clone()));
    match first {
        Some(t) => Polynomial::from_terms(p.dim(), [t]).to_string(),
        None => "0".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Rat = BigRational;
    type P = Polynomial<Rat>;
    type M = PolyMatrix<Rat>;

    fn q(n: i64) -> Rat {
        BigRational::from(BigInt::from(n))
    }

    fn qq(n: i64, d: i64) -> Rat {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly(dim: usize, terms: &[(i64, &[usize])]) -> P {
        P::from_terms(
            dim,
            terms.iter().map(|(c, e)| (Monomial(e.to_vec()), q(*c))),
        )
    }

    fn shear() -> PolyMap<Rat> {
        PolyMap::new(vec![poly(2, &[(1, &[0, 2])]), P::zero(2)]).unwrap()
    }

    fn chain3() -> PolyMap<Rat> {
        PolyMap::new(vec![
            poly(3, &[(1, &[0, 1, 1])]),
            poly(3, &[(1, &[0, 0, 2])]),
            P::zero(3),
        ])
        .unwrap()
    }

    fn diagonal_square() -> PolyMap<Rat> {
        PolyMap::new(vec![poly(2, &[(1, &[2, 0])]), P::zero(2)]).unwrap()
    }

    #[test]
    fn scalar_log_series_oracle() {
        // M = [[2x, 0], [0, 0]]: the series is sum_q (2x)^q / q, the
        // expansion of -ln(1 - 2x); freeze the first four coefficients
        let m = diagonal_square().jacobian();
        let s = trace_log_series(&m, 4).unwrap();
        assert_eq!(
            s.value,
            P::from_terms(
                2,
                [
                    (Monomial(vec![1, 0]), q(2)),
                    (Monomial(vec![2, 0]), q(2)),
                    (Monomial(vec![3, 0]), qq(8, 3)),
                    (Monomial(vec![4, 0]), q(4)),
                ]
            )
        );
    }

    #[test]
    fn triangular_jacobians_have_vanishing_series() {
        for cap in [4, 8] {
            assert!(trace_log_series(&shear().jacobian(), cap)
                .unwrap()
                .value
                .is_zero());
            assert!(trace_log_series(&chain3().jacobian(), cap)
                .unwrap()
                .value
                .is_zero());
        }
        let zero = M::zero(2, 2, 2);
        assert!(trace_log_series(&zero, 6).unwrap().value.is_zero());
    }

    #[test]
    fn constant_entries_need_an_explicit_qcap() {
        let mut m = M::zero(2, 2, 2);
        m.set(0, 0, poly(2, &[(1, &[0, 0]), (1, &[1, 0])]));
        assert!(matches!(
            trace_log_series(&m, 4),
            Err(Error::ConstantTermEntries)
        ));
        assert!(trace_log_series_with_qcap(&m, 4, 8).is_ok());
    }

    #[test]
    fn exp_truncated_matches_the_exponential() {
        let x = P::variable(1, 0);
        let e = exp_truncated(&x, 4).unwrap();
        assert_eq!(
            e,
            P::from_terms(
                1,
                [
                    (Monomial(vec![0]), q(1)),
                    (Monomial(vec![1]), q(1)),
                    (Monomial(vec![2]), qq(1, 2)),
                    (Monomial(vec![3]), qq(1, 6)),
                    (Monomial(vec![4]), qq(1, 24)),
                ]
            )
        );
        assert!(exp_truncated(&P::zero(1), 4).unwrap().is_one());
        assert!(exp_truncated(&P::one(1), 4).is_err());
    }

    #[test]
    fn exp_of_series_inverts_the_determinant() {
        // exp(-Tr ln(1 - M)) must equal 1/det(1 - M): multiply out and
        // compare with 1 through the cap, on maps that pass the test and
        // maps that do not
        let cap = 8;
        for v in [shear(), chain3(), diagonal_square()] {
            let m = v.jacobian();
            let series = trace_log_series(&m, cap).unwrap().value;
            let e = exp_truncated(&series, cap).unwrap();
            let det = PolyMatrix::identity(v.n(), v.n()).sub(&m).det();
            assert!(e.mul_capped(&det, cap).is_one(), "map {v:?}");
        }
    }

    /// Symbolic 2x2 matrix in four polynomial variables m11, m12, m21, m22.
    fn symbolic2() -> M {
        M::from_fn(2, 2, 4, |i, j| P::variable(4, i * 2 + j))
    }

    #[test]
    fn two_by_two_partition_frozen() {
        let classes = min_index_partition(&symbolic2(), 2).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].r, 0);
        // words (1,1), (1,2), (2,1) -> m11^2 + 2 m12 m21
        assert_eq!(
            classes[0].value,
            poly(4, &[(1, &[2, 0, 0, 0]), (2, &[0, 1, 1, 0])])
        );
        // word (2,2) -> m22^2
        assert_eq!(classes[1].value, poly(4, &[(1, &[0, 0, 0, 2])]));
    }

    #[test]
    fn power_one_partition_is_the_diagonal() {
        let classes = min_index_partition(&symbolic2(), 1).unwrap();
        assert_eq!(classes[0].value, P::variable(4, 0));
        assert_eq!(classes[1].value, P::variable(4, 3));
    }

    #[test]
    fn three_by_three_classes_sum_to_the_trace() {
        let m = M::from_fn(3, 3, 9, |i, j| P::variable(9, i * 3 + j));
        let classes = min_index_partition(&m, 3).unwrap();
        let mut total = P::zero(9);
        for c in &classes {
            total = &total + &c.value;
        }
        let cube = m.mul(&m).mul(&m);
        assert_eq!(total, cube.trace());
    }

    #[test]
    fn partition_reconstructs_traces_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..5 {
            let n = rng.random_range(2..=4);
            let q_pow = rng.random_range(1..=4);
            let m = M::from_fn(n, n, n, |_, _| {
                let mut p = P::zero(n);
                for _ in 0..2 {
                    let var = rng.random_range(0..n);
                    let deg = rng.random_range(0..=2);
                    let coeff = rng.random_range(-3..=3i64);
                    let mut e = vec![0; n];
                    e[var] = deg;
                    p = &p + &P::from_terms(n, [(Monomial(e), q(coeff))]);
                }
                p
            });
            let classes = min_index_partition(&m, q_pow).unwrap();
            let mut total = P::zero(n);
            for c in classes {
                total = &total + &c.value;
            }
            let mut power = M::identity(n, n);
            for _ in 0..q_pow {
                power = power.mul(&m);
            }
            assert_eq!(total, power.trace(), "trial {trial}: n={n}, Q={q_pow}");
        }
    }

    #[test]
    fn capped_partition_is_the_truncated_partition() {
        let m = symbolic2();
        let full = min_index_partition(&m, 3).unwrap();
        let capped = min_index_partition_capped(&m, 3, 2).unwrap();
        for (f, c) in full.iter().zip(&capped) {
            assert_eq!(f.value.truncate(2), c.value);
        }
    }

    #[test]
    fn restricted_product_on_triangular_maps() {
        for v in [shear(), chain3()] {
            let rep = restricted_exp_product_check(&v, 8).unwrap();
            assert!(rep.is_keller);
            assert!(rep.partition.holds);
            assert!(rep.vanishing.holds);
            assert!(rep.full_series.is_zero());
            for s in &rep.class_series {
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn restricted_product_flags_failing_maps() {
        let rep = restricted_exp_product_check(&diagonal_square(), 4).unwrap();
        assert!(!rep.is_keller);
        assert!(rep.partition.holds);
        assert!(!rep.vanishing.holds);
        assert_eq!(rep.vanishing.witness.as_deref(), Some("2*x1"));
    }

    #[test]
    fn restricted_product_on_zero_map() {
        let v = PolyMap::with_degree(vec![P::zero(2), P::zero(2)], 2).unwrap();
        let rep = restricted_exp_product_check(&v, 6).unwrap();
        assert!(rep.partition.holds && rep.vanishing.holds);
    }

    #[test]
    fn restricted_product_requires_reduced_maps() {
        let v = PolyMap::new(vec![poly(2, &[(1, &[0, 1]), (1, &[0, 2])]), P::zero(2)])
            .unwrap();
        assert!(matches!(
            restricted_exp_product_check(&v, 4),
            Err(Error::LinearPartPresent)
        ));
    }

    #[test]
    fn series_vanishes_after_substituting_the_inverse() {
        // the jacobian evaluated along the inverse series still has a
        // vanishing trace-log for maps passing the test
        let cap = 6;
        for v in [shear(), chain3()] {
            let f = crate::inverse::invert_truncated(&v, cap).unwrap();
            let substituted = v.jacobian().compose(f.components(), Some(cap));
            let s = trace_log_series(&substituted, cap).unwrap();
            assert!(s.value.is_zero());
        }
    }
}

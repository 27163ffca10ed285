//! Truncated formal inverse of `y = x - V(x)` by fixed-point iteration,
//! plus the certificates that make the result checkable: composition
//! residuals, degree bounds, and the coefficient growth estimate.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::map::PolyMap;
use crate::poly::Polynomial;
use crate::report::IdentityReport;
use crate::scalar::Scalar;

/// Hard ceiling on truncation caps; guards the doubly exponential degree
/// bound from turning a CLI call into an unbounded computation.
pub const DEFAULT_SAFETY_CAP: usize = 512;

/// Truncated inverse series: `F(y) = y + V(F(y))` through total degree `cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSeries<T> {
    n: usize,
    cap: usize,
    components: Vec<Polynomial<T>>,
    stabilized_at: usize,
}

impl<T: Scalar> InverseSeries<T> {
    /// Assemble a series from raw parts (artifact re-ingestion, synthetic
    /// test data). No fixed-point property is implied.
    pub fn from_parts(
        n: usize,
        cap: usize,
        components: Vec<Polynomial<T>>,
        stabilized_at: usize,
    ) -> Self {
        assert_eq!(components.len(), n);
        for c in &components {
            assert_eq!(c.dim(), n);
        }
        InverseSeries {
            n,
            cap,
            components,
            stabilized_at,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn components(&self) -> &[Polynomial<T>] {
        &self.components
    }

    /// Smallest iteration count `m` with `F^m == F^{m-1}` under the cap.
    pub fn stabilized_at(&self) -> usize {
        self.stabilized_at
    }

    /// Largest total degree among all components (1 for the identity).
    pub fn observed_degree(&self) -> usize {
        self.components
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap_or(0)
    }
}

/// Iterate `F^0 = y`, `F^{m+1} = y + V(F^m)` with eager truncation at `cap`
/// until the truncated series stops changing. Since every term of `V` has
/// degree at least 2, coefficients of order `m+1` and below are final after
/// `m` rounds, so the loop ends after at most `cap` rounds.
pub fn invert_truncated<T: Scalar>(v: &PolyMap<T>, cap: usize) -> Result<InverseSeries<T>> {
    if cap < 1 {
        return Err(Error::CapTooSmall);
    }
    if v.has_linear_part() {
        return Err(Error::LinearPartPresent);
    }
    let n = v.n();
    let identity: Vec<Polynomial<T>> = (0..n).map(|i| Polynomial::variable(n, i)).collect();
    let mut current = identity.clone();
    for m in 1..=cap + 2 {
        let next: Vec<Polynomial<T>> = (0..n)
            .map(|i| &identity[i] + &v.component(i).compose(&current, Some(cap)))
            .collect();
        if next == current {
            return Ok(InverseSeries {
                n,
                cap,
                components: current,
                stabilized_at: m,
            });
        }
        current = next;
    }
    Err(Error::InternalInconsistency(format!(
        "inverse iteration did not stabilize within {} rounds at cap {cap}",
        cap + 2
    )))
}

/// Inverse of a map with nilpotent linear part, via the reduction: invert
/// the reduced map `x - W(x)` and substitute the resolvent, `F(y) = F_W(Ry)`.
pub fn invert_via_reduction<T: Scalar>(v: &PolyMap<T>, cap: usize) -> Result<InverseSeries<T>> {
    let reduction = v.linear_reduction()?;
    let inner = invert_truncated(&reduction.reduced, cap)?;
    let subs = reduction.resolvent_substitution();
    let components = inner
        .components
        .iter()
        .map(|p| p.compose(&subs, Some(cap)))
        .collect();
    Ok(InverseSeries {
        n: v.n(),
        cap,
        components,
        stabilized_at: inner.stabilized_at,
    })
}

/// What the residual checks established about a truncated inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialityCertificate {
    /// Degree through which both residuals were verified to vanish.
    pub verified_cap: usize,
    pub residual_norm_zero: bool,
    pub highest_nonzero_order: usize,
    /// Whether `verified_cap` reaches the applicable degree bound, i.e. the
    /// certificate covers every order a polynomial inverse could occupy.
    pub cap_covers_bound: bool,
    /// True when the series produced no term at the cap itself, i.e. it
    /// looks like a polynomial of lower degree rather than a cut-off series.
    pub polynomial_so_far: bool,
}

/// Verify both composition residuals of a truncated inverse exactly:
/// `F(y) - V(F(y)) - y == 0` and `F(x - V(x)) - x == 0`, each through the
/// cap. A nonzero residual is an arithmetic bug, not a mathematical finding,
/// and surfaces as [`Error::InternalInconsistency`].
pub fn certify_polynomial<T: Scalar>(
    v: &PolyMap<T>,
    f: &InverseSeries<T>,
) -> Result<PolynomialityCertificate> {
    let n = v.n();
    if f.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.n,
        });
    }
    let cap = f.cap;
    let identity: Vec<Polynomial<T>> = (0..n).map(|i| Polynomial::variable(n, i)).collect();
    for i in 0..n {
        let fixed_point = &(&f.components[i] - &identity[i])
            - &v.component(i).compose(&f.components, Some(cap));
        if !fixed_point.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "fixed-point residual of component {} is nonzero: {}",
                i + 1,
                fixed_point.to_string_with("y")
            )));
        }
    }
    let g: Vec<Polynomial<T>> = (0..n)
        .map(|i| &identity[i] - v.component(i))
        .collect();
    for i in 0..n {
        let left = &f.components[i].compose(&g, Some(cap)) - &identity[i];
        if !left.is_zero() {
            return Err(Error::InternalInconsistency(format!(
                "left-composition residual of component {} is nonzero: {}",
                i + 1,
                left
            )));
        }
    }
    let highest = f.observed_degree();
    let bound = bound_or_trivial(n, v.degree())?;
    let cap_covers_bound = BigUint::from(cap) >= bound;
    Ok(PolynomialityCertificate {
        verified_cap: cap,
        residual_norm_zero: true,
        highest_nonzero_order: highest,
        cap_covers_bound,
        polynomial_so_far: highest < cap,
    })
}

/// Degree bound `d^(2^n - 2)` for the polynomial inverse of a map without
/// linear part. Exact arbitrary-precision integer.
pub fn degree_bound(n: usize, d: usize) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::InvalidMap("degree bound needs n >= 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidMap("degree bound needs d >= 2".into()));
    }
    if n >= 30 {
        return Err(Error::GuardExceeded {
            what: "dimension in degree bound",
            requested: n,
            limit: 29,
        });
    }
    let exp = (1u32 << n) - 2;
    Ok(BigUint::from(d).pow(exp))
}

/// Relaxed bound `n^2 * d^(2^n - 1)` applicable when the inverse is obtained
/// through the linear-part reduction.
pub fn degree_bound_reduced(n: usize, d: usize) -> Result<BigUint> {
    if n < 1 {
        return Err(Error::InvalidMap("degree bound needs n >= 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidMap("degree bound needs d >= 2".into()));
    }
    if n >= 30 {
        return Err(Error::GuardExceeded {
            what: "dimension in degree bound",
            requested: n,
            limit: 29,
        });
    }
    let exp = (1u32 << n) - 1;
    Ok(BigUint::from(n * n) * BigUint::from(d).pow(exp))
}

fn bound_or_trivial(n: usize, d: usize) -> Result<BigUint> {
    if d < 2 {
        // a degree-(<2) map with no linear part is zero; its inverse is y
        Ok(BigUint::one())
    } else {
        degree_bound(n, d)
    }
}

/// Which inversion route a degree-bound verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Map had no linear part; the `d^(2^n - 2)` bound applies.
    Direct,
    /// Inverse obtained through the linear-part reduction; the relaxed
    /// `n^2 * d^(2^n - 1)` bound applies.
    ViaReduction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeBoundReport {
    pub kind: BoundKind,
    /// The bound the verdict compares against (selected by `kind`).
    pub bound: BigUint,
    /// Value of the other route's formula, reported for comparison since the
    /// two exponents differ.
    pub alternate_bound: BigUint,
    pub observed_degree: usize,
    pub within_bound: bool,
}

pub fn degree_bound_report(
    n: usize,
    d: usize,
    observed_degree: usize,
    kind: BoundKind,
) -> Result<DegreeBoundReport> {
    let (bound, alternate) = if d < 2 {
        (BigUint::one(), BigUint::one())
    } else {
        match kind {
            BoundKind::Direct => (degree_bound(n, d)?, degree_bound_reduced(n, d)?),
            BoundKind::ViaReduction => (degree_bound_reduced(n, d)?, degree_bound(n, d)?),
        }
    };
    Ok(DegreeBoundReport {
        kind,
        within_bound: BigUint::from(observed_degree) <= bound,
        bound,
        alternate_bound: alternate,
        observed_degree,
    })
}

/// Resolve the truncation cap for an inversion request. An explicit cap is
/// honored as given (the degree bound only means something under the
/// Jacobian hypothesis, and exploring past it is legitimate); with no cap
/// the degree bound itself is the request. Either way the result must stay
/// within the safety cap, which for larger maps turns the no-cap case into
/// a guard error rather than an open-ended run.
pub fn effective_cap(
    n: usize,
    d: usize,
    user_cap: Option<usize>,
    safety_cap: usize,
) -> Result<usize> {
    let candidate = match user_cap {
        Some(u) => u,
        None => {
            let bound = bound_or_trivial(n, d)?;
            bound.to_usize().unwrap_or(usize::MAX)
        }
    };
    if candidate > safety_cap {
        return Err(Error::GuardExceeded {
            what: "inversion truncation cap",
            requested: candidate,
            limit: safety_cap,
        });
    }
    Ok(candidate.max(1))
}

/// Check the coefficient growth estimate: for every component and every order
/// `N` up to the cap, the sum of absolute coefficients of order `N` must not
/// exceed `((2n)^d * sup_norm)^(N-1)`.
pub fn growth_check<T: Scalar>(v: &PolyMap<T>, f: &InverseSeries<T>) -> IdentityReport {
    let name = "coefficient_growth_bound";
    let base = T::from_int(2 * v.n() as i64).powi(v.degree()) * v.sup_norm();
    for (i, comp) in f.components.iter().enumerate() {
        let mut mass_by_order = vec![T::zero(); f.cap + 1];
        for (m, c) in comp.terms() {
            let d = m.degree();
            mass_by_order[d] = mass_by_order[d].clone() + c.abs();
        }
        for (order, mass) in mass_by_order.iter().enumerate().skip(1) {
            if mass.is_zero() {
                continue;
            }
            let bound = base.powi(order - 1);
            if *mass > bound {
                return IdentityReport::fails(
                    name,
                    format!(
                        "component {}, order {order}: coefficient mass {mass} exceeds {bound}",
                        i + 1
                    ),
                );
            }
        }
    }
    IdentityReport::holds(name)
}

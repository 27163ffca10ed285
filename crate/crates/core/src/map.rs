//! Polynomial self-maps of the form `y = x - V(x)`.
//!
//! `PolyMap` models the perturbation `V`: one polynomial per coordinate, no
//! constant terms, total degree bounded by a declared maximum. On top of the
//! model sit the Jacobian test (`det(I - V') == 1`), sup-norm and analyticity
//! radius, the symmetric tensor view of the coefficients, and the reduction
//! that removes a nilpotent linear part.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{Monomial, Polynomial};
use crate::report::IdentityReport;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap<T> {
    n: usize,
    d: usize,
    components: Vec<Polynomial<T>>,
}

/// Verdict of the Jacobian test `det(I - V'(x)) == 1`.
#[derive(Debug, Clone)]
pub struct KellerReport<T> {
    pub det: Polynomial<T>,
    pub is_keller: bool,
    /// First (graded-lex smallest) term of `det - 1` when the test fails.
    pub witness: Option<String>,
}

impl<T: Scalar> KellerReport<T> {
    pub fn as_report(&self) -> IdentityReport {
        if self.is_keller {
            IdentityReport::holds("jacobian_determinant_is_one")
        } else {
            IdentityReport::fails(
                "jacobian_determinant_is_one",
                self.witness.clone().unwrap_or_default(),
            )
        }
    }
}

/// Sup norm over symmetric tensor entries and the induced lower bound on the
/// radius where the inverse series converges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapNorms<T> {
    pub sup_norm: T,
    /// `1 / ((2n)^d * (1 + sup_norm))`.
    pub radius: T,
}

/// Coefficients of a map reorganized as symmetric tensors: for each component
/// `i`, a mapping from sorted variable-index tuples `(j1 <= ... <= jQ)` to the
/// tensor entry. Summing an entry over all distinct arrangements of its tuple
/// recovers the plain polynomial coefficient.
#[derive(Debug, Clone)]
pub struct VertexView<T> {
    n: usize,
    entries: Vec<BTreeMap<Vec<usize>, T>>,
}

impl<T: Scalar> VertexView<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Tensor entry for component `i` at a sorted index tuple, if nonzero.
    pub fn entry(&self, i: usize, sorted: &[usize]) -> Option<&T> {
        self.entries[i].get(sorted)
    }

    /// All nonzero tuples of component `i`, ascending by (length, content).
    pub fn tuples(&self, i: usize) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.entries[i].iter()
    }
}

/// Outcome of removing a nilpotent linear part: the equivalent map `W` with
/// `W(x) = R * (V - V_linear)(x)` where `R = (I - L)^{-1} = sum L^k`.
#[derive(Debug, Clone)]
pub struct LinearReduction<T> {
    pub resolvent: Vec<Vec<T>>,
    /// Smallest `k` with `L^k = 0`.
    pub nilpotency_index: usize,
    pub reduced: PolyMap<T>,
    /// Certification that every resolvent entry is at most `(n+1) * |L|^n` in
    /// absolute value (trivially satisfied when there is no linear part).
    pub entry_bound: IdentityReport,
}

impl<T: Scalar> LinearReduction<T> {
    /// The linear substitution `x_i -> sum_j R[i][j] y_j`, ready to be fed to
    /// [`Polynomial::compose`]: the inverse of the original map is the inverse
    /// of the reduced map composed with this substitution.
    pub fn resolvent_substitution(&self) -> Vec<Polynomial<T>> {
        let n = self.resolvent.len();
        (0..n)
            .map(|i| {
                Polynomial::from_terms(
                    n,
                    (0..n).map(|j| (Monomial::unit(n, j), self.resolvent[i][j].clone())),
                )
            })
            .collect()
    }
}

fn factorial<T: Scalar>(k: usize) -> T {
    let mut acc = T::one();
    for i in 2..=k {
        acc = acc * T::from_int(i as i64);
    }
    acc
}

/// Render one term `c * v^e` of a univariate polynomial.
fn univar_term<T: Scalar>(c: &T, e: usize, var: &str) -> String {
    let mag = c.abs();
    let sign = if c.is_negative() { "-" } else { "" };
    let coeff = if mag.is_one() && e > 0 {
        String::new()
    } else if e > 0 {
        format!("{mag}*")
    } else {
        format!("{mag}")
    };
    let power = match e {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    };
    format!("{sign}{coeff}{power}")
}

impl<T: Scalar> PolyMap<T> {
    /// Build a map, inferring the declared degree from the components.
    pub fn new(components: Vec<Polynomial<T>>) -> Result<Self> {
        let d = components
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap_or(1)
            .max(1);
        Self::with_degree(components, d)
    }

    /// Build a map with an explicitly declared maximal degree.
    pub fn with_degree(components: Vec<Polynomial<T>>, d: usize) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidMap("a map needs at least one component".into()));
        }
        if d == 0 {
            return Err(Error::InvalidMap("declared degree must be at least 1".into()));
        }
        for (i, p) in components.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.dim(),
                });
            }
            if !p.constant_term().is_zero() {
                return Err(Error::ConstantTermEntries);
            }
            if let Some(deg) = p.total_degree() {
                if deg > d {
                    return Err(Error::InvalidMap(format!(
                        "component {} has degree {deg}, above the declared degree {d}",
                        i + 1
                    )));
                }
            }
        }
        Ok(PolyMap { n, d, components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared maximal total degree.
    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[Polynomial<T>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial<T> {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|p| p.is_zero())
    }

    pub fn has_linear_part(&self) -> bool {
        self.components
            .iter()
            .any(|p| p.terms().any(|(m, _)| m.degree() == 1))
    }

    /// Matrix of the degree-1 coefficients: `L[i][j]` = coefficient of `x_j`
    /// in component `i`.
    pub fn linear_part(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.components[i].coeff(&Monomial::unit(self.n, j)))
                    .collect()
            })
            .collect()
    }

    /// The same map with all degree-1 terms removed from every component.
    pub fn drop_linear_part(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|p| {
                Polynomial::from_terms(
                    self.n,
                    p.terms()
                        .filter(|(m, _)| m.degree() != 1)
                        .map(|(m, c)| (m.clone(), c.clone())),
                )
            })
            .collect();
        PolyMap {
            n: self.n,
            d: self.d,
            components,
        }
    }

    /// Symmetric tensor view: coefficient `c` on `x^alpha` of degree `Q`
    /// becomes the entry `c * (prod_k alpha_k!) / Q!` stored under the sorted
    /// index tuple, so that summing over all arrangements returns `c`.
    pub fn vertex_view(&self) -> VertexView<T> {
        let mut entries = Vec::with_capacity(self.n);
        for p in &self.components {
            let mut map = BTreeMap::new();
            for (m, c) in p.terms() {
                let q = m.degree();
                let mut tuple = Vec::with_capacity(q);
                let mut numer = T::one();
                for (j, &e) in m.0.iter().enumerate() {
                    for _ in 0..e {
                        tuple.push(j);
                    }
                    numer = numer * factorial::<T>(e);
                }
                let entry = c.clone() * numer / factorial::<T>(q);
                map.insert(tuple, entry);
            }
            entries.push(map);
        }
        VertexView {
            n: self.n,
            entries,
        }
    }

    /// Largest absolute value among all symmetric tensor entries.
    pub fn sup_norm(&self) -> T {
        let view = self.vertex_view();
        let mut sup = T::zero();
        for i in 0..self.n {
            for (_, e) in view.tuples(i) {
                let a = e.abs();
                if a > sup {
                    sup = a;
                }
            }
        }
        sup
    }

    pub fn norms(&self) -> MapNorms<T> {
        let sup = self.sup_norm();
        let two_n = T::from_int(2 * self.n as i64);
        let radius = T::one() / (two_n.powi(self.d) * (T::one() + sup.clone()));
        MapNorms {
            sup_norm: sup,
            radius,
        }
    }

    /// Jacobian matrix `V'` with entry `(i, j) = d V_i / d x_j`.
    pub fn jacobian(&self) -> PolyMatrix<T> {
        PolyMatrix::from_fn(self.n, self.n, self.n, |i, j| self.components[i].diff(j))
    }

    /// `I - V'` as a matrix, the object whose determinant decides the
    /// Jacobian test.
    pub fn one_minus_jacobian(&self) -> PolyMatrix<T> {
        PolyMatrix::identity(self.n, self.n).sub(&self.jacobian())
    }

    pub fn keller_check(&self) -> KellerReport<T> {
        let det = self.one_minus_jacobian().det();
        let is_keller = det.is_one();
        let witness = if is_keller {
            None
        } else {
            let discrepancy = &det - &Polynomial::one(self.n);
            let first = discrepancy
                .terms()
                .next()
                .map(|(m, c)| (m.clone(), c.clone()));
            first.map(|t| Polynomial::from_terms(self.n, [t]).to_string())
        };
        KellerReport {
            det,
            is_keller,
            witness,
        }
    }

    /// Nilpotency test for the linear part `L`: expands `det(I - t L)` as a
    /// univariate polynomial and demands it be the constant 1 (equivalent to
    /// `L` nilpotent). On success returns the nilpotency index, additionally
    /// confirmed against the matrix powers themselves.
    pub fn nilpotency_index(&self) -> Result<usize> {
        let l = self.linear_part();
        let n = self.n;
        let char_matrix = PolyMatrix::from_fn(n, n, 1, |i, j| {
            let mut p = Polynomial::zero(1);
            if i == j {
                p = Polynomial::one(1);
            }
            p - Polynomial::from_terms(1, [(Monomial(vec![1]), l[i][j].clone())])
        });
        let det = char_matrix.det();
        if !det.is_one() {
            let beyond = det
                .terms()
                .find(|(m, _)| !m.is_constant())
                .map(|(m, c)| univar_term(c, m.0[0], "t"))
                .unwrap_or_else(|| "constant != 1".to_string());
            return Err(Error::NotNilpotent { witness: beyond });
        }
        // belt and braces: walk the powers and find the index directly
        let mut power = identity_scalar::<T>(n);
        for k in 0..=n {
            if scalar_is_zero(&power) {
                return Ok(k);
            }
            power = scalar_mul(&power, &l);
        }
        Err(Error::InternalInconsistency(
            "characteristic polynomial trivial but L^n != 0".into(),
        ))
    }

    /// Remove a nilpotent linear part: with `L = V'(0)` and the resolvent
    /// `R = sum_{k<n} L^k = (I - L)^{-1}`, the map `W = R * (V - V_linear)`
    /// has no linear part and `x - W(x)` carries the same inverse up to the
    /// substitution [`LinearReduction::resolvent_substitution`].
    pub fn linear_reduction(&self) -> Result<LinearReduction<T>> {
        let nilpotency_index = self.nilpotency_index()?;
        let l = self.linear_part();
        let n = self.n;
        let mut resolvent = identity_scalar::<T>(n);
        let mut power = identity_scalar::<T>(n);
        for _ in 1..n {
            power = scalar_mul(&power, &l);
            for i in 0..n {
                for j in 0..n {
                    resolvent[i][j] = resolvent[i][j].clone() + power[i][j].clone();
                }
            }
        }
        let tail = self.drop_linear_part();
        let reduced_components: Vec<Polynomial<T>> = (0..n)
            .map(|i| {
                let mut acc = Polynomial::zero(n);
                for j in 0..n {
                    acc = &acc + &tail.components[j].scale(&resolvent[i][j]);
                }
                acc
            })
            .collect();
        let reduced = PolyMap::with_degree(reduced_components, self.d)?;
        if reduced.has_linear_part() {
            return Err(Error::InternalInconsistency(
                "reduced map still has a linear part".into(),
            ));
        }
        let entry_bound = self.resolvent_entry_bound(&l, &resolvent);
        Ok(LinearReduction {
            resolvent,
            nilpotency_index,
            reduced,
            entry_bound,
        })
    }

    fn resolvent_entry_bound(&self, l: &[Vec<T>], r: &[Vec<T>]) -> IdentityReport {
        let name = "resolvent_entry_bound";
        let norm_l = l
            .iter()
            .flatten()
            .map(|x| x.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if norm_l.is_zero() {
            // no linear part: R = I and the reduction is the identity
            return IdentityReport::holds(name);
        }
        let max_r = r
            .iter()
            .flatten()
            .map(|x| x.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        let bound = T::from_int(self.n as i64 + 1) * norm_l.powi(self.n);
        if max_r <= bound {
            IdentityReport::holds(name)
        } else {
            IdentityReport::fails(
                name,
                format!("max resolvent entry {max_r} exceeds (n+1)*|L|^n = {bound}"),
            )
        }
    }

    /// Conjugate by the permutation `sigma` of the coordinates: the result `W`
    /// satisfies `W_i(x) = V_{sigma^{-1}(i)}(x_{sigma(1)}, ..., x_{sigma(n)})`,
    /// so `x - W(x)` is the original map expressed in permuted coordinates.
    pub fn conjugate_by_permutation(&self, sigma: &[usize]) -> Self {
        assert_eq!(sigma.len(), self.n, "permutation length must equal n");
        let mut seen = vec![false; self.n];
        for &s in sigma {
            assert!(s < self.n && !seen[s], "not a permutation");
            seen[s] = true;
        }
        let mut inverse = vec![0; self.n];
        for (i, &s) in sigma.iter().enumerate() {
            inverse[s] = i;
        }
        let subs: Vec<Polynomial<T>> = (0..self.n)
            .map(|j| Polynomial::variable(self.n, sigma[j]))
            .collect();
        let components = (0..self.n)
            .map(|i| self.components[inverse[i]].compose(&subs, None))
            .collect();
        PolyMap::with_degree(components, self.d)
            .expect("conjugation preserves map validity")
    }
}

fn identity_scalar<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

fn scalar_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = T::zero();
                    for k in 0..n {
                        acc = acc + a[i][k].clone() * b[k][j].clone();
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn scalar_is_zero<T: Scalar>(a: &[Vec<T>]) -> bool {
    a.iter().flatten().all(|x| x.is_zero())
}

//! Sparse multivariate polynomials with exact coefficient arithmetic.
//!
//! A polynomial is a canonical map from monomials to nonzero coefficients,
//! ordered graded-lexicographically. All arithmetic keeps the representation
//! canonical: zero coefficients are never stored, and every operation that
//! combines polynomials asserts that the ambient dimensions match.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

/// Exponent vector of fixed length (the ambient dimension).
///
/// Ordering is graded lexicographic: first by total degree, then
/// lexicographically on the exponents. This makes the maximal element of a
/// term map the leading term in the usual sense.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<usize>);

impl Monomial {
    pub fn constant(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    /// The monomial `x_i` (zero-based variable index).
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dimension {dim}");
        let mut e = vec![0; dim];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Exact quotient, or `None` when some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        assert_eq!(self.0.len(), other.0.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial<T> {
    dim: usize,
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(dim), c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, T::one())
    }

    /// The coordinate polynomial `x_i` (zero-based).
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut p = Self::zero(dim);
        p.terms.insert(Monomial::unit(dim, i), T::one());
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.insert_add(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_constant() && c.is_one())
                .unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn constant_term(&self) -> T {
        self.coeff(&Monomial::constant(self.dim))
    }

    /// Leading term under graded-lex, `None` for the zero polynomial.
    pub fn leading(&self) -> Option<(&Monomial, &T)> {
        self.terms.iter().next_back()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// Smallest total degree among the terms, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    fn insert_add(&mut self, m: Monomial, c: T) {
        assert_eq!(m.0.len(), self.dim, "monomial length must equal dimension");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, t)| (m.clone(), t.clone() * c.clone()))
                .filter(|(_, t)| !t.is_zero())
                .collect(),
        }
    }

    /// Drop every term of total degree above `cap`.
    pub fn truncate(&self, cap: usize) -> Self {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= cap)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Product with every result term of total degree above `cap` discarded
    /// as it is formed. Equivalent to `(self * other).truncate(cap)` but does
    /// not build the discarded terms.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in product");
        let mut out = Self::zero(self.dim);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > cap {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > cap {
                    continue;
                }
                out.insert_add(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to variable `i` (zero-based).
    pub fn diff(&self, i: usize) -> Self {
        assert!(i < self.dim, "variable index out of range");
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut lowered = m.clone();
            lowered.0[i] = e - 1;
            out.insert_add(lowered, c.clone() * T::from_int(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.dim, "evaluation point has wrong length");
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    v = v * point[i].powi(e);
                }
            }
            acc = acc + v;
        }
        acc
    }

    /// Substitute `subs[i]` for variable `i`. All substituted polynomials
    /// must share one ambient dimension, which becomes the dimension of the
    /// result. With `cap = Some(c)` every intermediate product is truncated
    /// to total degree `c`, which is sound because substitution can only
    /// raise the degree of a capped tail.
    pub fn compose(&self, subs: &[Self], cap: Option<usize>) -> Self {
        assert_eq!(subs.len(), self.dim, "need one substitution per variable");
        if subs.is_empty() {
            return self.clone();
        }
        let out_dim = subs[0].dim;
        for s in subs {
            assert_eq!(s.dim, out_dim, "substitutions differ in dimension");
        }
        // min_degrees[i] is a lower bound on the degree contributed per unit
        // exponent of variable i; the zero polynomial gets cap+1 so any
        // positive exponent prunes the term (its contribution is zero anyway).
        let min_degrees: Vec<usize> = subs
            .iter()
            .map(|s| s.min_degree().unwrap_or(cap.map_or(usize::MAX, |c| c + 1)))
            .collect();
        let mut pow_cache: Vec<Vec<Self>> = subs
            .iter()
            .map(|_| vec![Self::one(out_dim)])
            .collect();
        let mut out = Self::zero(out_dim);
        'term: for (m, c) in &self.terms {
            if let Some(cap) = cap {
                let mut bound = 0usize;
                for (i, &e) in m.0.iter().enumerate() {
                    bound = bound.saturating_add(min_degrees[i].saturating_mul(e));
                    if bound > cap {
                        continue 'term;
                    }
                }
            }
            let mut prod = Self::constant(out_dim, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while pow_cache[i].len() <= e {
                    let last = pow_cache[i].last().unwrap();
                    let next = match cap {
                        Some(cap) => last.mul_capped(&subs[i], cap),
                        None => last * &subs[i],
                    };
                    pow_cache[i].push(next);
                }
                prod = match cap {
                    Some(cap) => prod.mul_capped(&pow_cache[i][e], cap),
                    None => &prod * &pow_cache[i][e],
                };
                if prod.is_zero() {
                    continue 'term;
                }
            }
            out = &out + &prod;
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. Uses leading-term elimination under graded-lex, so for a
    /// genuinely divisible pair the leading monomial strictly decreases and
    /// the loop terminates.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert_eq!(self.dim, divisor.dim, "dimension mismatch in division");
        let (dm, dc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.dim);
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc.clone() / dc.clone();
            let qterm = Polynomial::from_terms(self.dim, [(qm, qc)]);
            rem = &rem - &(&qterm * divisor);
            quot = &quot + &qterm;
        }
        Some(quot)
    }

    /// Render with a caller-chosen variable name, one-based subscripts.
    pub fn to_string_with(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_constant() {
                factors.push(format!("{mag}"));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("{var}{}", i + 1));
                } else if e > 1 {
                    factors.push(format!("{var}{}^{e}", i + 1));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with("x"))
    }
}

impl<T: Scalar> std::ops::Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl<T: Scalar> std::ops::Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), -c.clone());
        }
        out
    }
}

impl<T: Scalar> std::ops::Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let mut out = Polynomial::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_add(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> std::ops::Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl<T: Scalar> std::ops::$trait for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: Self) -> Polynomial<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

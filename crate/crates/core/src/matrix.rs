//! Matrices of polynomials, with exact determinants.
//!
//! Determinants are available through two independent routes: cofactor
//! expansion and fraction-free Bareiss elimination. Small sizes dispatch to
//! cofactor expansion, larger ones to Bareiss; both stay public so callers
//! can cross-check one against the other.

use crate::poly::Polynomial;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix<T> {
    rows: usize,
    cols: usize,
    dim: usize,
    entries: Vec<Polynomial<T>>,
}

/// Largest size still handled by cofactor expansion in [`PolyMatrix::det`].
const COFACTOR_CUTOFF: usize = 5;

impl<T: Scalar> PolyMatrix<T> {
    pub fn zero(rows: usize, cols: usize, dim: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            dim,
            entries: vec![Polynomial::zero(dim); rows * cols],
        }
    }

    pub fn identity(size: usize, dim: usize) -> Self {
        let mut m = Self::zero(size, size, dim);
        for i in 0..size {
            m.set(i, i, Polynomial::one(dim));
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        dim: usize,
        mut f: impl FnMut(usize, usize) -> Polynomial<T>,
    ) -> Self {
        let mut m = Self::zero(rows, cols, dim);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Constant matrix: scalar entries lifted to constant polynomials.
    pub fn from_scalar_rows(rows: &[Vec<T>], dim: usize) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, dim, |i, j| {
            assert_eq!(rows[i].len(), c, "ragged scalar matrix");
            Polynomial::constant(dim, rows[i][j].clone())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial<T> {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial<T>) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        assert_eq!(p.dim(), self.dim, "entry has wrong ambient dimension");
        self.entries[i * self.cols + j] = p;
    }

    pub fn trace(&self) -> Polynomial<T> {
        assert_eq!(self.rows, self.cols, "trace needs a square matrix");
        let mut t = Polynomial::zero(self.dim);
        for i in 0..self.rows {
            t = &t + self.get(i, i);
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_impl(other, None)
    }

    /// Product with entry polynomials truncated to total degree `cap`.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Self {
        self.mul_impl(other, Some(cap))
    }

    fn mul_impl(&self, other: &Self, cap: Option<usize>) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        assert_eq!(self.dim, other.dim, "ambient dimensions differ");
        Self::from_fn(self.rows, other.cols, self.dim, |i, j| {
            let mut acc = Polynomial::zero(self.dim);
            for k in 0..self.cols {
                let prod = match cap {
                    Some(c) => self.get(i, k).mul_capped(other.get(k, j), c),
                    None => self.get(i, k) * other.get(k, j),
                };
                acc = &acc + &prod;
            }
            acc
        })
    }

    /// `self^k` with entries truncated to total degree `cap` at every step.
    pub fn pow_capped(&self, k: usize, cap: usize) -> Self {
        assert_eq!(self.rows, self.cols, "power needs a square matrix");
        let mut acc = Self::identity(self.rows, self.dim);
        for _ in 0..k {
            acc = acc.mul_capped(self, cap);
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, self.dim, |i, j| {
            self.get(i, j) + other.get(i, j)
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, self.dim, |i, j| {
            self.get(i, j) - other.get(i, j)
        })
    }

    /// Entrywise substitution; see [`Polynomial::compose`].
    pub fn compose(&self, subs: &[Polynomial<T>], cap: Option<usize>) -> Self {
        let out_dim = subs.first().map_or(self.dim, |s| s.dim());
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            dim: out_dim,
            entries: self.entries.iter().map(|p| p.compose(subs, cap)).collect(),
        }
    }

    /// Determinant, dispatching on size: cofactor expansion up to 5x5,
    /// fraction-free Bareiss elimination beyond.
    pub fn det(&self) -> Polynomial<T> {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        if self.rows <= COFACTOR_CUTOFF {
            self.det_cofactor()
        } else {
            self.det_bareiss()
        }
    }

    /// Cofactor expansion along the row with the most zero entries.
    pub fn det_cofactor(&self) -> Polynomial<T> {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Polynomial::one(self.dim);
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let row = (0..n)
            .max_by_key(|&i| (0..n).filter(|&j| self.get(i, j).is_zero()).count())
            .unwrap();
        let mut acc = Polynomial::zero(self.dim);
        for j in 0..n {
            let a = self.get(row, j);
            if a.is_zero() {
                continue;
            }
            let minor = Self::from_fn(n - 1, n - 1, self.dim, |r, c| {
                let rr = if r < row { r } else { r + 1 };
                let cc = if c < j { c } else { c + 1 };
                self.get(rr, cc).clone()
            });
            let term = a * &minor.det_cofactor();
            if (row + j) % 2 == 0 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        acc
    }

    /// Fraction-free Bareiss elimination. Every division along the way is
    /// exact by the Sylvester determinant identity, so the result is a
    /// polynomial with no rational-function detour.
    pub fn det_bareiss(&self) -> Polynomial<T> {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Polynomial::one(self.dim);
        }
        let mut a: Vec<Vec<Polynomial<T>>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut sign_flip = false;
        let mut prev = Polynomial::one(self.dim);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(swap) => {
                        a.swap(k, swap);
                        sign_flip = !sign_flip;
                    }
                    None => return Polynomial::zero(self.dim),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num
                        .div_exact(&prev)
                        .expect("Bareiss pivot division must be exact");
                }
                a[i][k] = Polynomial::zero(self.dim);
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign_flip {
            -&d
        } else {
            d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type Rat = BigRational;
    type P = Polynomial<Rat>;
    type M = PolyMatrix<Rat>;

    fn q(n: i64) -> Rat {
        BigRational::from(BigInt::from(n))
    }

    fn poly(dim: usize, terms: &[(i64, &[usize])]) -> P {
        P::from_terms(
            dim,
            terms.iter().map(|(c, e)| (Monomial(e.to_vec()), q(*c))),
        )
    }

    /// Deterministic dense test matrix with small polynomial entries.
    fn dense(n: usize, dim: usize) -> M {
        M::from_fn(n, n, dim, |i, j| {
            let v = (i * 3 + j) % dim;
            let c = ((i * 7 + j * 5) % 5) as i64 - 2;
            let mut e = vec![0; dim];
            e[v] = 1 + (i + j) % 2;
            P::from_terms(
                dim,
                [
                    (Monomial(e), q(c)),
                    (Monomial(vec![0; dim]), q((i as i64) - (j as i64))),
                ],
            )
        })
    }

    #[test]
    fn identity_has_unit_determinant() {
        for n in 0..6 {
            assert!(M::identity(n, 2).det().is_one());
        }
    }

    #[test]
    fn two_by_two_with_polynomial_entries() {
        // [[1, x2], [x1, 1]] -> 1 - x1*x2
        let m = M::from_fn(2, 2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => P::one(2),
            (0, 1) => P::variable(2, 1),
            (1, 0) => P::variable(2, 0),
            _ => unreachable!(),
        });
        assert_eq!(m.det(), poly(2, &[(1, &[0, 0]), (-1, &[1, 1])]));
        assert_eq!(m.det_bareiss(), m.det_cofactor());
    }

    #[test]
    fn swap_rows_flips_sign() {
        let m = M::from_scalar_rows(&[vec![q(0), q(1)], vec![q(1), q(0)]], 1);
        assert_eq!(m.det(), P::constant(1, q(-1)));
        assert_eq!(m.det_bareiss(), P::constant(1, q(-1)));
    }

    #[test]
    fn cofactor_and_bareiss_agree_on_dense_matrices() {
        for n in 1..=6 {
            let m = dense(n, 3);
            assert_eq!(m.det_cofactor(), m.det_bareiss(), "size {n}");
        }
    }

    #[test]
    fn bareiss_handles_zero_leading_pivot() {
        let mut m = dense(4, 2);
        m.set(0, 0, P::zero(2));
        assert_eq!(m.det_cofactor(), m.det_bareiss());
    }

    #[test]
    fn determinant_is_multiplicative() {
        let a = dense(3, 2);
        let b = {
            let mut b = dense(3, 2);
            b.set(0, 2, poly(2, &[(2, &[1, 1])]));
            b
        };
        let ab = a.mul(&b);
        assert_eq!(ab.det(), &a.det() * &b.det());
    }

    #[test]
    fn trace_and_product_hand_values() {
        let a = M::from_scalar_rows(&[vec![q(1), q(2)], vec![q(3), q(4)]], 1);
        assert_eq!(a.trace(), P::constant(1, q(5)));
        let sq = a.mul(&a);
        assert_eq!(sq.get(0, 0), &P::constant(1, q(7)));
        assert_eq!(sq.get(1, 1), &P::constant(1, q(22)));
        assert_eq!(sq.trace(), P::constant(1, q(29)));
    }

    #[test]
    fn capped_power_truncates_each_step() {
        let m = M::from_fn(2, 2, 2, |i, j| {
            if i == 0 && j == 1 {
                poly(2, &[(1, &[0, 2])])
            } else if i == j {
                P::one(2)
            } else {
                P::zero(2)
            }
        });
        let p3 = m.pow_capped(3, 3);
        // upper-right entry accumulates 3*x2^2, fits under the cap
        assert_eq!(p3.get(0, 1), &poly(2, &[(3, &[0, 2])]));
        let p3c1 = m.pow_capped(3, 1);
        assert!(p3c1.get(0, 1).is_zero());
    }

    #[test]
    fn entrywise_composition() {
        let m = M::from_fn(1, 2, 2, |_, j| {
            if j == 0 {
                P::variable(2, 0)
            } else {
                poly(2, &[(1, &[0, 2])])
            }
        });
        let subs = [poly(1, &[(1, &[1])]), poly(1, &[(2, &[1])])];
        let got = m.compose(&subs, None);
        assert_eq!(got.get(0, 0), &poly(1, &[(1, &[1])]));
        assert_eq!(got.get(0, 1), &poly(1, &[(4, &[2])]));
        assert_eq!(got.dim(), 1);
    }
}

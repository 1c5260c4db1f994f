//! Square integer and rational matrices.
//!
//! Characteristic polynomials use the Faddeev-LeVerrier recurrence,
//! whose divisions are exact over Z (each is asserted). Rational
//! matrices provide Gauss-Jordan inversion, kernels, and linear solves;
//! the integer side adds Kronecker products for spectral certification
//! and Smith normal form for lattice point counting.

use super::{Integer, IntPolynomial, Rational};
use std::cmp::Ordering;
use std::fmt;

/// Square matrix over Z, row major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    e: Vec<Integer>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<Integer>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        IntMatrix { n, e: entries }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        let mut e = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            e.extend(row.iter().map(|&v| Integer::from(v)));
        }
        IntMatrix { n, e }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.e[i * n + i] = Integer::from(1);
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            e: vec![Integer::new(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Integer {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Integer) {
        self.e[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.cmp0() == Ordering::Equal {
                    continue;
                }
                for j in 0..n {
                    out.e[i * n + j] += Integer::from(a * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix {
            n: self.n,
            e: self
                .e
                .iter()
                .zip(&rhs.e)
                .map(|(a, b)| Integer::from(a + b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix {
            n: self.n,
            e: self
                .e
                .iter()
                .zip(&rhs.e)
                .map(|(a, b)| Integer::from(a - b))
                .collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            n: self.n,
            e: self.e.iter().map(|a| Integer::from(-a)).collect(),
        }
    }

    pub fn scalar_mul(&self, s: &Integer) -> IntMatrix {
        IntMatrix {
            n: self.n,
            e: self.e.iter().map(|a| Integer::from(a * s)).collect(),
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.e[j * n + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Integer {
        let mut t = Integer::new();
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn pow(&self, mut k: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Integer]) -> Vec<Integer> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        (0..self.n)
            .map(|i| {
                let mut s = Integer::new();
                for j in 0..self.n {
                    s += Integer::from(self.get(i, j) * &v[j]);
                }
                s
            })
            .collect()
    }

    /// Kronecker product; the eigenvalues of A kron A are all pairwise
    /// products of eigenvalues of A, which is what turns a complex
    /// modulus bound into a real root question.
    pub fn kron(&self, rhs: &IntMatrix) -> IntMatrix {
        let (n, m) = (self.n, rhs.n);
        let nm = n * m;
        let mut out = Self::zero(nm);
        for i1 in 0..n {
            for j1 in 0..n {
                let a = self.get(i1, j1);
                if a.cmp0() == Ordering::Equal {
                    continue;
                }
                for i2 in 0..m {
                    for j2 in 0..m {
                        out.e[(i1 * m + i2) * nm + (j1 * m + j2)] =
                            Integer::from(a * rhs.get(i2, j2));
                    }
                }
            }
        }
        out
    }

    /// Characteristic polynomial det(t I - M) by Faddeev-LeVerrier.
    /// All divisions in the recurrence are exact over Z.
    pub fn charpoly(&self) -> IntPolynomial {
        let n = self.n;
        let mut coeffs = vec![Integer::new(); n + 1];
        coeffs[n] = Integer::from(1);
        let mut b = Self::identity(n);
        for k in 1..=n {
            let ab = self.mul(&b);
            let tr = ab.trace();
            assert!(
                tr.is_divisible(&Integer::from(k)),
                "Faddeev-LeVerrier trace not divisible; matrix corrupted"
            );
            let c = -tr.div_exact(&Integer::from(k));
            b = ab;
            for i in 0..n {
                let v = Integer::from(b.get(i, i) + &c);
                b.set(i, i, v);
            }
            coeffs[n - k] = c;
        }
        IntPolynomial::from_coeffs(coeffs)
    }

    /// Determinant, read off the characteristic polynomial.
    pub fn det(&self) -> Integer {
        let p = self.charpoly();
        let c0 = p.coeff(0);
        if self.n % 2 == 0 {
            c0
        } else {
            -c0
        }
    }

    /// Exact integer inverse, or None when det is not a unit.
    pub fn inverse_int(&self) -> Option<IntMatrix> {
        let q = QMatrix::from_int(self).inverse()?;
        q.to_int()
    }

    /// Smith normal form: returns (u, d, v) with u * self * v = d,
    /// u and v unimodular, d diagonal with nonnegative entries and
    /// d[i] dividing d[i+1].
    pub fn smith_normal_form(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let n = self.n;
        let mut d = self.clone();
        let mut u = Self::identity(n);
        let mut v = Self::identity(n);
        for k in 0..n {
            loop {
                // Pivot: smallest nonzero magnitude in the trailing block.
                let mut pivot: Option<(usize, usize)> = None;
                for i in k..n {
                    for j in k..n {
                        if d.get(i, j).cmp0() != Ordering::Equal {
                            let better = match pivot {
                                None => true,
                                Some((pi, pj)) => {
                                    d.get(i, j).cmp_abs(d.get(pi, pj)) == Ordering::Less
                                }
                            };
                            if better {
                                pivot = Some((i, j));
                            }
                        }
                    }
                }
                let Some((pi, pj)) = pivot else {
                    return finish_snf(u, d, v, k);
                };
                swap_rows(&mut d, &mut u, k, pi);
                swap_cols(&mut d, &mut v, k, pj);
                // Clear column k below the pivot and row k to its right.
                let mut dirty = false;
                for i in k + 1..n {
                    if d.get(i, k).cmp0() != Ordering::Equal {
                        let q = Integer::from(d.get(i, k) / d.get(k, k));
                        if q.cmp0() != Ordering::Equal {
                            row_axpy(&mut d, &mut u, i, k, &q);
                        }
                        if d.get(i, k).cmp0() != Ordering::Equal {
                            dirty = true;
                        }
                    }
                }
                for j in k + 1..n {
                    if d.get(k, j).cmp0() != Ordering::Equal {
                        let q = Integer::from(d.get(k, j) / d.get(k, k));
                        if q.cmp0() != Ordering::Equal {
                            col_axpy(&mut d, &mut v, j, k, &q);
                        }
                        if d.get(k, j).cmp0() != Ordering::Equal {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue;
                }
                // Divisibility: the pivot must divide the whole block.
                let mut bad: Option<usize> = None;
                'scan: for i in k + 1..n {
                    for j in k + 1..n {
                        if !d.get(i, j).is_divisible(d.get(k, k)) {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad {
                    Some(i) => {
                        // Fold the offending row in and restart the pivot.
                        let minus_one = Integer::from(-1);
                        row_axpy(&mut d, &mut u, k, i, &minus_one);
                    }
                    None => break,
                }
            }
        }
        finish_snf(u, d, v, n)
    }
}

fn swap_rows(d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    let n = d.n;
    for j in 0..n {
        d.e.swap(a * n + j, b * n + j);
        u.e.swap(a * n + j, b * n + j);
    }
}

fn swap_cols(d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    let n = d.n;
    for i in 0..n {
        d.e.swap(i * n + a, i * n + b);
        v.e.swap(i * n + a, i * n + b);
    }
}

/// row[i] -= q * row[k] on d, mirrored on u.
fn row_axpy(d: &mut IntMatrix, u: &mut IntMatrix, i: usize, k: usize, q: &Integer) {
    let n = d.n;
    for j in 0..n {
        let t = Integer::from(d.get(k, j) * q);
        d.e[i * n + j] -= t;
        let t = Integer::from(u.get(k, j) * q);
        u.e[i * n + j] -= t;
    }
}

/// col[j] -= q * col[k] on d, mirrored on v.
fn col_axpy(d: &mut IntMatrix, v: &mut IntMatrix, j: usize, k: usize, q: &Integer) {
    let n = d.n;
    for i in 0..n {
        let t = Integer::from(d.get(i, k) * q);
        d.e[i * n + j] -= t;
        let t = Integer::from(v.get(i, k) * q);
        v.e[i * n + j] -= t;
    }
}

/// Fix signs and the divisibility chain after elimination; ranks beyond
/// `rank` are already zero.
fn finish_snf(
    mut u: IntMatrix,
    mut d: IntMatrix,
    v: IntMatrix,
    rank: usize,
) -> (IntMatrix, IntMatrix, IntMatrix) {
    let n = d.n;
    for k in 0..rank {
        if d.get(k, k).cmp0() == Ordering::Less {
            for j in 0..n {
                let x = Integer::from(-d.get(k, j));
                d.set(k, j, x);
                let x = Integer::from(-u.get(k, j));
                u.set(k, j, x);
            }
        }
    }
    (u, d, v)
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Free-function form of [`IntMatrix::charpoly`].
pub fn charpoly(m: &IntMatrix) -> IntPolynomial {
    m.charpoly()
}

/// Square matrix over Q, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    n: usize,
    e: Vec<Rational>,
}

impl QMatrix {
    pub fn new(n: usize, entries: Vec<Rational>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        QMatrix { n, e: entries }
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        QMatrix {
            n: m.n,
            e: m.e.iter().map(Rational::from).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.e[i * n + i] = Rational::from(1);
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        QMatrix {
            n,
            e: vec![Rational::new(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.e[i * self.n + j] = v;
    }

    pub fn add(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n);
        QMatrix {
            n: self.n,
            e: self
                .e
                .iter()
                .zip(&rhs.e)
                .map(|(a, b)| Rational::from(a + b))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.cmp0() == Ordering::Equal {
                    continue;
                }
                for j in 0..n {
                    out.e[i * n + j] += Rational::from(a * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> QMatrix {
        QMatrix {
            n: self.n,
            e: self.e.iter().map(|a| Rational::from(a * s)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                let mut s = Rational::new();
                for j in 0..self.n {
                    s += Rational::from(self.get(i, j) * &v[j]);
                }
                s
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let n = self.n;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(pr) = (r..n).find(|&i| self.get(i, c).cmp0() != Ordering::Equal) else {
                continue;
            };
            for j in 0..n {
                self.e.swap(r * n + j, pr * n + j);
            }
            let inv = Rational::from(self.get(r, c).recip_ref());
            for j in 0..n {
                let x = Rational::from(self.get(r, j) * &inv);
                self.set(r, j, x);
            }
            for i in 0..n {
                if i != r && self.get(i, c).cmp0() != Ordering::Equal {
                    let f = self.get(i, c).clone();
                    for j in 0..n {
                        let t = Rational::from(self.get(r, j) * &f);
                        self.e[i * n + j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == n {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel, one vector per free column, in column
    /// order with the free coordinate set to 1. Deterministic.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let n = self.n;
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![Rational::new(); n];
            v[fc] = Rational::from(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = Rational::from(-m.get(row, fc));
            }
            basis.push(v);
        }
        basis
    }

    /// Gauss-Jordan inverse, or None when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let pr = (c..n).find(|&i| a.get(i, c).cmp0() != Ordering::Equal)?;
            for j in 0..n {
                a.e.swap(c * n + j, pr * n + j);
                inv.e.swap(c * n + j, pr * n + j);
            }
            let f = Rational::from(a.get(c, c).recip_ref());
            for j in 0..n {
                let x = Rational::from(a.get(c, j) * &f);
                a.set(c, j, x);
                let x = Rational::from(inv.get(c, j) * &f);
                inv.set(c, j, x);
            }
            for i in 0..n {
                if i != c && a.get(i, c).cmp0() != Ordering::Equal {
                    let f = a.get(i, c).clone();
                    for j in 0..n {
                        let t = Rational::from(a.get(c, j) * &f);
                        a.e[i * n + j] -= t;
                        let t = Rational::from(inv.get(c, j) * &f);
                        inv.e[i * n + j] -= t;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Solve self * x = rhs, or None when inconsistent or underdetermined.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        let inv = self.inverse()?;
        Some(inv.mul_vec(rhs))
    }

    /// Integer matrix if every entry is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        let mut e = Vec::with_capacity(self.e.len());
        for c in &self.e {
            if *c.denom() != 1 {
                return None;
            }
            e.push(c.numer().clone());
        }
        Some(IntMatrix { n: self.n, e })
    }

    /// Smallest positive b with b * self integral, plus that integer matrix.
    pub fn to_scaled_int(&self) -> (Integer, IntMatrix) {
        let mut l = Integer::from(1);
        for c in &self.e {
            l = l.lcm(c.denom());
        }
        let e = self
            .e
            .iter()
            .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
            .collect();
        (l.clone(), IntMatrix { n: self.n, e })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_poly_at_matrix(p: &IntPolynomial, m: &IntMatrix) -> IntMatrix {
        let n = m.n();
        let mut acc = IntMatrix::zero(n);
        for i in (0..p.coeffs().len()).rev() {
            acc = acc.mul(m);
            let c = p.coeff(i);
            for d in 0..n {
                let v = Integer::from(acc.get(d, d) + &c);
                acc.set(d, d, v);
            }
        }
        acc
    }

    #[test]
    fn charpoly_matches_frozen_examples() {
        // trace 5, det -2.
        let m = IntMatrix::from_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.charpoly(), IntPolynomial::from_i64(&[-2, -5, 1]));
        assert_eq!(m.det(), Integer::from(-2));
        // Hyperbolic 2x2 with trace 3, det 1.
        let m = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.charpoly(), IntPolynomial::from_i64(&[1, -3, 1]));
        // Identity and a nilpotent block.
        assert_eq!(
            IntMatrix::identity(3).charpoly(),
            IntPolynomial::from_i64(&[-1, 3, -3, 1])
        );
        let nil = IntMatrix::from_rows(&[&[0, 1], &[0, 0]]);
        assert_eq!(nil.charpoly(), IntPolynomial::from_i64(&[0, 0, 1]));
        assert_eq!(nil.det(), Integer::new());
    }

    #[test]
    fn cayley_hamilton_holds_for_random_matrices() {
        use proptest::prelude::*;
        proptest!(|(entries in proptest::collection::vec(-9i64..=9, 16))| {
            for n in 1usize..=4 {
                let m = IntMatrix::new(
                    n,
                    entries[..n * n].iter().map(|&v| Integer::from(v)).collect(),
                );
                let p = m.charpoly();
                prop_assert!(eval_poly_at_matrix(&p, &m) == IntMatrix::zero(n));
            }
        });
    }

    #[test]
    fn kron_respects_products_and_traces() {
        let a = IntMatrix::from_rows(&[&[1, 2], &[0, 3]]);
        let b = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        let c = IntMatrix::from_rows(&[&[1, 1], &[1, 0]]);
        let d = IntMatrix::from_rows(&[&[0, 1], &[1, 2]]);
        assert_eq!(
            a.kron(&b).mul(&c.kron(&d)),
            a.mul(&c).kron(&b.mul(&d)),
            "mixed product rule"
        );
        assert_eq!(
            a.kron(&b).trace(),
            Integer::from(a.trace() * b.trace())
        );
    }

    #[test]
    fn pow_and_inverse_are_consistent() {
        let m = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        assert!(m.pow(0).is_identity());
        assert_eq!(m.pow(7), m.pow(3).mul(&m.pow(4)));
        let inv = m.inverse_int().unwrap();
        assert!(m.mul(&inv).is_identity());
        // det 2 is not a unit over Z.
        let s = IntMatrix::from_rows(&[&[2, 0], &[0, 1]]);
        assert_eq!(s.inverse_int(), None);
        let qinv = QMatrix::from_int(&s).inverse().unwrap();
        assert_eq!(qinv.get(0, 0), &Rational::from((1, 2)));
    }

    #[test]
    fn kernel_and_solve_behave_on_small_systems() {
        let q = QMatrix::from_int(&IntMatrix::from_rows(&[&[1, 1], &[1, 1]]));
        let ker = q.kernel();
        assert_eq!(ker.len(), 1);
        // Free column is the second: v = (-1, 1).
        assert_eq!(ker[0], vec![Rational::from(-1), Rational::from(1)]);
        assert_eq!(q.rank(), 1);
        assert!(q.inverse().is_none());

        let m = QMatrix::from_int(&IntMatrix::from_rows(&[&[2, 1], &[1, 1]]));
        let x = m.solve(&[Rational::from(3), Rational::from(2)]).unwrap();
        assert_eq!(x, vec![Rational::from(1), Rational::from(1)]);
    }

    #[test]
    fn smith_form_diagonalizes_with_unimodular_transforms() {
        let cases: Vec<IntMatrix> = vec![
            IntMatrix::from_rows(&[&[2, 1], &[1, 1]]),
            IntMatrix::from_rows(&[&[4, 0], &[0, 6]]),
            IntMatrix::from_rows(&[&[2, 4], &[6, 8]]),
            IntMatrix::from_rows(&[&[0, 0], &[0, 0]]),
            IntMatrix::from_rows(&[&[6, 0, 0], &[0, 10, 0], &[0, 0, 15]]),
            IntMatrix::from_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]),
        ];
        for m in cases {
            let (u, d, v) = m.smith_normal_form();
            assert_eq!(u.mul(&m).mul(&v), d, "u m v = d failed");
            assert!(u.det().cmp_abs(&Integer::from(1)) == Ordering::Equal);
            assert!(v.det().cmp_abs(&Integer::from(1)) == Ordering::Equal);
            let n = d.n();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        assert_eq!(d.get(i, j).cmp0(), Ordering::Equal);
                    }
                }
            }
            for i in 0..n - 1 {
                let (a, b) = (d.get(i, i), d.get(i + 1, i + 1));
                assert!(a.cmp0() != Ordering::Less);
                if a.cmp0() != Ordering::Equal {
                    assert!(b.is_divisible(a), "divisibility chain broken");
                } else {
                    assert_eq!(b.cmp0(), Ordering::Equal, "zero before nonzero");
                }
            }
        }
        // Frozen values: diag(4, 6) has invariant factors 2, 12.
        let (_, d, _) = IntMatrix::from_rows(&[&[4, 0], &[0, 6]]).smith_normal_form();
        assert_eq!(d, IntMatrix::from_rows(&[&[2, 0], &[0, 12]]));
        // [[2,4],[6,8]]: gcd 2, det -8, factors 2 and 4.
        let (_, d, _) = IntMatrix::from_rows(&[&[2, 4], &[6, 8]]).smith_normal_form();
        assert_eq!(d, IntMatrix::from_rows(&[&[2, 0], &[0, 4]]));
    }
}

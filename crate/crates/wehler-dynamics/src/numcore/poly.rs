//! Integer and rational polynomials with exact real-root isolation.
//!
//! Coefficients are stored lowest degree first. The real-root tools are
//! built on Sturm sequences evaluated at exact rationals, so every root
//! count and every isolating interval is certified, not floated. The
//! cyclotomic helpers decide whether a characteristic polynomial has
//! all its roots on the unit circle, which by Kronecker's theorem is
//! the boundary between finite order and exponential growth.

use super::{Integer, Rational};
use std::cmp::Ordering;
use std::fmt;

/// Polynomial with integer coefficients, lowest degree first.
/// Invariant: the coefficient vector never ends in a zero, and the zero
/// polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
}

impl IntPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().map_or(false, |c| c.cmp0() == Ordering::Equal) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial {
            coeffs: vec![Integer::from(1)],
        }
    }

    /// c * t^k.
    pub fn monomial(coeff: Integer, k: usize) -> Self {
        if coeff.cmp0() == Ordering::Equal {
            return Self::zero();
        }
        let mut coeffs = vec![Integer::new(); k + 1];
        coeffs[k] = coeff;
        IntPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Integer> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map_or(false, |c| *c == 1)
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn add(&self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| Integer::from(-c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.cmp0() == Ordering::Equal {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Integer::from(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Integer::from(c * Integer::from(i)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Multiplicity of zero as a root: largest k with t^k dividing self.
    pub fn order_at_zero(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| c.cmp0() != Ordering::Equal)
            .unwrap_or(0)
    }

    /// Quotient by t^k; requires t^k to divide self.
    pub fn shift_down(&self, k: usize) -> IntPolynomial {
        assert!(self.order_at_zero() >= k || self.is_zero(), "t^k does not divide");
        if self.is_zero() {
            return Self::zero();
        }
        IntPolynomial {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    /// Exact quotient, or None when the division leaves a remainder or a
    /// fractional coefficient.
    pub fn divexact(&self, rhs: &IntPolynomial) -> Option<IntPolynomial> {
        assert!(!rhs.is_zero(), "division by the zero polynomial");
        let (q, r) = RatPoly::from_int(self).divrem(&RatPoly::from_int(rhs));
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    /// gcd of all coefficients (nonnegative), 0 for the zero polynomial.
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// The squarefree part self / gcd(self, self'), primitive with the
    /// same sign of leading coefficient.
    pub fn squarefree_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(&self.derivative());
        self.divexact(&g)
            .expect("gcd divides the polynomial")
    }

    /// Primitive gcd over Z with positive leading coefficient.
    pub fn gcd(&self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() {
            return normalize_primitive(rhs.clone());
        }
        if rhs.is_zero() {
            return normalize_primitive(self.clone());
        }
        let g = RatPoly::from_int(self).gcd_monic(&RatPoly::from_int(rhs));
        normalize_primitive(g.clear_denominators())
    }

    /// Count of distinct real roots in the half open interval (a, b].
    pub fn count_real_roots_in(&self, a: &Rational, b: &Rational) -> usize {
        assert!(!self.is_zero(), "root count of the zero polynomial");
        if a >= b {
            return 0;
        }
        let sf = RatPoly::from_int(&self.squarefree_part());
        let chain = sf.sturm_chain();
        let va = sign_variations(&chain, a);
        let vb = sign_variations(&chain, b);
        va - vb
    }

    /// A bound B with every complex root strictly inside |z| < B.
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().expect("root bound of the zero polynomial");
        let mut m = Rational::new();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = Rational::from((Integer::from(c.abs_ref()), Integer::from(lead.abs_ref())));
            if r > m {
                m = r;
            }
        }
        m + Rational::from(1)
    }

    /// Isolating interval (lo, hi] of width at most tol around the
    /// largest real root, or None when there is none. The returned
    /// interval contains at least one root and nothing lies above it.
    pub fn max_real_root_interval(&self, tol: &Rational) -> Option<(Rational, Rational)> {
        assert!(tol.cmp0() == Ordering::Greater, "tolerance must be positive");
        let bound = self.root_bound();
        let mut lo = -bound.clone();
        let mut hi = bound;
        if self.count_real_roots_in(&lo, &hi) == 0 {
            return None;
        }
        while Rational::from(&hi - &lo) > *tol {
            let mid = Rational::from(&lo + &hi) / 2u32;
            if self.count_real_roots_in(&mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((lo, hi))
    }

    /// Pretty form like "t^3 - 17 t^2 - 17 t + 1".
    pub fn to_display_string(&self) -> String {
        format!("{self}")
    }
}

fn normalize_primitive(p: IntPolynomial) -> IntPolynomial {
    if p.is_zero() {
        return p;
    }
    let c = p.content();
    let mut q = IntPolynomial {
        coeffs: p.coeffs.iter().map(|x| Integer::from(x / &c)).collect(),
    };
    if q.leading().unwrap().cmp0() == Ordering::Less {
        q = q.neg();
    }
    q
}

fn sign_variations(chain: &[RatPoly], x: &Rational) -> usize {
    let mut count = 0;
    let mut prev: Option<Ordering> = None;
    for p in chain {
        let s = p.eval(x).cmp0();
        if s == Ordering::Equal {
            continue;
        }
        if let Some(ps) = prev {
            if ps != s {
                count += 1;
            }
        }
        prev = Some(s);
    }
    count
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let deg = self.degree().unwrap();
        let mut first = true;
        for i in (0..=deg).rev() {
            let c = self.coeff(i);
            if c.cmp0() == Ordering::Equal {
                continue;
            }
            let mag = Integer::from(c.abs_ref());
            if first {
                if c.cmp0() == Ordering::Less {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.cmp0() == Ordering::Less {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = mag != 1 || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if i >= 1 {
                if show_coeff {
                    write!(f, " ")?;
                }
                if i == 1 {
                    write!(f, "t")?;
                } else {
                    write!(f, "t^{i}")?;
                }
            }
        }
        Ok(())
    }
}

/// Polynomial with rational coefficients, lowest degree first, used for
/// Euclidean division and Sturm chains.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn from_int(p: &IntPolynomial) -> Self {
        RatPoly {
            coeffs: p.coeffs.iter().map(|c| Rational::from(c)).collect(),
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.cmp0() == Ordering::Equal) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Long division: self = q * rhs + r with deg r < deg rhs.
    pub fn divrem(&self, rhs: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!rhs.is_zero(), "division by the zero polynomial");
        let dr = rhs.coeffs.len() - 1;
        let lead = rhs.coeffs.last().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dr {
            return (RatPoly::from_coeffs(Vec::new()), RatPoly::from_coeffs(rem));
        }
        let mut quot = vec![Rational::new(); rem.len() - dr];
        for i in (dr..rem.len()).rev() {
            let c = Rational::from(&rem[i] / &lead);
            if c.cmp0() == Ordering::Equal {
                continue;
            }
            quot[i - dr] = c.clone();
            for j in 0..=dr {
                let t = Rational::from(&c * &rhs.coeffs[j]);
                rem[i - dr + j] -= t;
            }
        }
        (RatPoly::from_coeffs(quot), RatPoly::from_coeffs(rem))
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd_monic(&self, rhs: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.coeffs.last().unwrap().clone();
        RatPoly::from_coeffs(a.coeffs.iter().map(|c| Rational::from(c / &lead)).collect())
    }

    /// Scale by the lcm of denominators to get integer coefficients.
    pub fn clear_denominators(&self) -> IntPolynomial {
        let mut l = Integer::from(1);
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        IntPolynomial::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
                .collect(),
        )
    }

    /// Back to integer coefficients; None if any coefficient is fractional.
    pub fn to_int(&self) -> Option<IntPolynomial> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if *c.denom() != 1 {
                return None;
            }
            out.push(c.numer().clone());
        }
        Some(IntPolynomial::from_coeffs(out))
    }

    /// Sturm chain p, p', then negated remainders down to a constant.
    pub fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone()];
        let d = RatPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Rational::from(i as u32)))
                .collect(),
        );
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(RatPoly::from_coeffs(
                r.coeffs.iter().map(|c| Rational::from(-c.clone())).collect(),
            ));
        }
        chain
    }
}

/// Euler totient by trial division; exact for all u64 inputs we use.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut phi = n;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            phi -= phi / d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// The k-th cyclotomic polynomial, computed by exact division of
/// t^k - 1 by all lower cyclotomic factors.
pub fn cyclotomic(k: u64) -> IntPolynomial {
    assert!(k >= 1);
    let mut num = IntPolynomial::monomial(Integer::from(1), k as usize)
        .sub(&IntPolynomial::one());
    for d in 1..k {
        if k % d == 0 {
            num = num
                .divexact(&cyclotomic(d))
                .expect("lower cyclotomic factors divide t^k - 1");
        }
    }
    num
}

/// Full factorization into cyclotomic polynomials, as (k, multiplicity)
/// pairs sorted by k, or None if any non-cyclotomic factor remains.
///
/// Requires a monic input. Since phi(k) >= sqrt(k/2), every cyclotomic
/// factor of a degree n polynomial has k <= 2 n^2, so the search space
/// is finite and exhaustive.
pub fn cyclotomic_profile(p: &IntPolynomial) -> Option<Vec<(u64, u32)>> {
    assert!(p.is_monic(), "cyclotomic profile needs a monic polynomial");
    let n = p.degree().unwrap() as u64;
    if n == 0 {
        return Some(Vec::new());
    }
    let mut rem = p.clone();
    let mut out = Vec::new();
    for k in 1..=(2 * n * n + 2) {
        if euler_phi(k) > n {
            continue;
        }
        let phi_k = cyclotomic(k);
        let mut mult = 0u32;
        while let Some(q) = rem.divexact(&phi_k) {
            rem = q;
            mult += 1;
            if rem.degree() == Some(0) {
                break;
            }
        }
        if mult > 0 {
            out.push((k, mult));
        }
        if rem.degree() == Some(0) {
            break;
        }
    }
    if rem == IntPolynomial::one() {
        Some(out)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn display_matches_expected_layout() {
        let p = poly(&[1, -17, -17, 1]);
        assert_eq!(p.to_string(), "t^3 - 17 t^2 - 17 t + 1");
        assert_eq!(poly(&[0, 1]).to_string(), "t");
        assert_eq!(poly(&[-1, 0, 1]).to_string(), "t^2 - 1");
        assert_eq!(poly(&[]).to_string(), "0");
        assert_eq!(poly(&[-5]).to_string(), "-5");
    }

    #[test]
    fn cyclotomics_match_frozen_tables() {
        // Frozen coefficient lists, lowest degree first.
        assert_eq!(cyclotomic(1), poly(&[-1, 1]));
        assert_eq!(cyclotomic(2), poly(&[1, 1]));
        assert_eq!(cyclotomic(3), poly(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), poly(&[1, 0, 1]));
        assert_eq!(cyclotomic(5), poly(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic(6), poly(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), poly(&[1, 0, -1, 0, 1]));
        // Product over divisors of 12 reassembles t^12 - 1.
        let mut prod = IntPolynomial::one();
        for d in [1u64, 2, 3, 4, 6, 12] {
            prod = prod.mul(&cyclotomic(d));
        }
        let t12 = IntPolynomial::monomial(Integer::from(1), 12).sub(&IntPolynomial::one());
        assert_eq!(prod, t12);
    }

    #[test]
    fn cyclotomic_profile_detects_unit_circle_spectra() {
        // (t - 1)^2 (t^2 - t + 1): orders 1 (twice) and 6.
        let p = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_profile(&p), Some(vec![(1, 2), (6, 1)]));
        // (t + 1)(t^2 - 18 t + 1) has roots off the unit circle.
        let q = poly(&[1, 1]).mul(&poly(&[1, -18, 1]));
        assert_eq!(cyclotomic_profile(&q), None);
        assert_eq!(cyclotomic_profile(&IntPolynomial::one()), Some(vec![]));
    }

    #[test]
    fn sturm_count_matches_scan_with_endpoint_roots() {
        // (t - 1)(t - 2)(t - 3), half open interval semantics.
        let p = poly(&[-1, 1]).mul(&poly(&[-2, 1])).mul(&poly(&[-3, 1]));
        let r = |v: i64| Rational::from(v);
        assert_eq!(p.count_real_roots_in(&r(0), &r(2)), 2); // 1 and 2
        assert_eq!(p.count_real_roots_in(&r(1), &r(3)), 2); // 2 and 3, excludes 1
        assert_eq!(p.count_real_roots_in(&r(3), &r(10)), 0);
        assert_eq!(p.count_real_roots_in(&r(-5), &r(5)), 3);
        // Repeated roots count once.
        let sq = p.mul(&p);
        assert_eq!(sq.count_real_roots_in(&r(-5), &r(5)), 3);
        // No real roots.
        assert_eq!(poly(&[1, 0, 1]).count_real_roots_in(&r(-5), &r(5)), 0);
    }

    #[test]
    fn max_real_root_isolates_quadratic_surd() {
        // Largest root of t^2 - 18 t + 1 is 9 + 4 sqrt(5); frozen digits
        // 17.944271909999158785... from the decimal expansion of sqrt 5.
        let p = poly(&[1, -18, 1]);
        let tol = Rational::from((1i64, 1_000_000_000_000i64));
        let (lo, hi) = p.max_real_root_interval(&tol).unwrap();
        let width = Rational::from(&hi - &lo);
        assert!(width <= tol);
        let mid = (lo.to_f64() + hi.to_f64()) / 2.0;
        assert!((mid - 17.944271909999158785).abs() < 1e-9);
        // Exact rational root is found exactly when hit by bisection.
        let q = poly(&[-4, 0, 1]); // roots -2, 2
        let (lo, hi) = q.max_real_root_interval(&tol).unwrap();
        assert!(lo < Rational::from(2) && Rational::from(2) <= hi);
        assert!(poly(&[1, 0, 1]).max_real_root_interval(&tol).is_none());
    }

    #[test]
    fn squarefree_part_strips_multiplicity() {
        // (y^2 - y - 1)^2 reduces to y^2 - y - 1.
        let f = poly(&[-1, -1, 1]);
        let sq = f.mul(&f);
        assert_eq!(sq.squarefree_part(), f);
        assert_eq!(f.squarefree_part(), f);
    }

    #[test]
    fn divexact_and_gcd_are_consistent() {
        let a = poly(&[1, 2, 1]); // (t + 1)^2
        let b = poly(&[1, 1]);
        assert_eq!(a.divexact(&b), Some(b.clone()));
        assert_eq!(a.divexact(&poly(&[1, 0, 1])), None); // remainder
        assert_eq!(a.gcd(&poly(&[-1, 0, 1])), b); // common factor t + 1
        // The gcd is primitive by convention: integer content is dropped.
        assert_eq!(poly(&[2, 2]).gcd(&poly(&[4])), poly(&[1]));
        assert_eq!(poly(&[2, 2]).gcd(&poly(&[0])), poly(&[1, 1]));
    }

    #[test]
    fn arithmetic_properties_hold_on_random_polys() {
        use proptest::prelude::*;
        proptest!(|(a in proptest::collection::vec(-30i64..30, 0..6),
                    b in proptest::collection::vec(-30i64..30, 1..6),
                    x in -7i64..7)| {
            let pa = IntPolynomial::from_i64(&a);
            let pb = IntPolynomial::from_i64(&b);
            let prod = pa.mul(&pb);
            let xi = Integer::from(x);
            // Evaluation is a ring homomorphism.
            prop_assert_eq!(
                prod.eval_integer(&xi),
                pa.eval_integer(&xi) * pb.eval_integer(&xi)
            );
            prop_assert_eq!(
                pa.add(&pb).eval_integer(&xi),
                pa.eval_integer(&xi) + pb.eval_integer(&xi)
            );
            // Exact division undoes multiplication.
            if !pb.is_zero() {
                prop_assert_eq!(prod.divexact(&pb), Some(pa));
            }
        });
    }

    #[test]
    fn euler_phi_small_table() {
        let table = [
            (1u64, 1u64),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 4),
            (6, 2),
            (12, 4),
            (30, 8),
            (97, 96),
        ];
        for (n, phi) in table {
            assert_eq!(euler_phi(n), phi);
        }
    }
}

//! Prime field arithmetic and projective quadratics over F_p.
//!
//! Primes are capped below 2^31 so every product fits in u128 without
//! overflow gymnastics. Square roots use Tonelli-Shanks seeded with the
//! smallest quadratic non-residue, which keeps the whole census bitwise
//! deterministic regardless of thread count.

use super::NumError;
use std::fmt;

/// An element of F_p for a prime p < 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElem {
    v: u64,
    p: u64,
}

impl FpElem {
    pub fn new(v: i64, p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 31), "prime out of supported range");
        let m = v.rem_euclid(p as i64) as u64;
        FpElem { v: m, p }
    }

    pub fn from_u64(v: u64, p: u64) -> Self {
        assert!(p >= 2 && p < (1 << 31), "prime out of supported range");
        FpElem { v: v % p, p }
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn same_field(&self, rhs: &FpElem) {
        assert_eq!(self.p, rhs.p, "mixed moduli in field arithmetic");
    }

    pub fn add(&self, rhs: &FpElem) -> FpElem {
        self.same_field(rhs);
        FpElem {
            v: (self.v + rhs.v) % self.p,
            p: self.p,
        }
    }

    pub fn sub(&self, rhs: &FpElem) -> FpElem {
        self.same_field(rhs);
        FpElem {
            v: (self.v + self.p - rhs.v) % self.p,
            p: self.p,
        }
    }

    pub fn mul(&self, rhs: &FpElem) -> FpElem {
        self.same_field(rhs);
        FpElem {
            v: ((self.v as u128 * rhs.v as u128) % self.p as u128) as u64,
            p: self.p,
        }
    }

    pub fn neg(&self) -> FpElem {
        FpElem {
            v: if self.v == 0 { 0 } else { self.p - self.v },
            p: self.p,
        }
    }

    pub fn pow(&self, mut e: u64) -> FpElem {
        let mut base = *self;
        let mut acc = FpElem { v: 1 % self.p, p: self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero (a programming error, not
    /// a data error, everywhere this is called).
    pub fn inv(&self) -> FpElem {
        assert!(self.v != 0, "inverse of zero");
        self.pow(self.p - 2)
    }

    pub fn div(&self, rhs: &FpElem) -> FpElem {
        self.mul(&rhs.inv())
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

/// A point of P^1(F_p) in canonical form: [a : 1] or [1 : 0].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpProj {
    a: u64,
    b: u64,
    p: u64,
}

impl FpProj {
    /// Canonical point from any pair that is not (0, 0).
    pub fn new(a: FpElem, b: FpElem) -> Result<Self, NumError> {
        assert_eq!(a.p, b.p, "mixed moduli in projective point");
        if a.is_zero() && b.is_zero() {
            return Err(NumError::ZeroVector);
        }
        if b.is_zero() {
            Ok(FpProj { a: 1, b: 0, p: a.p })
        } else {
            let t = a.div(&b);
            Ok(FpProj { a: t.v, b: 1, p: a.p })
        }
    }

    pub fn affine(v: u64, p: u64) -> Self {
        FpProj { a: v % p, b: 1, p }
    }

    pub fn infinity(p: u64) -> Self {
        FpProj { a: 1, b: 0, p }
    }

    pub fn is_infinity(&self) -> bool {
        self.b == 0
    }

    pub fn a(&self) -> FpElem {
        FpElem { v: self.a, p: self.p }
    }

    pub fn b(&self) -> FpElem {
        FpElem { v: self.b, p: self.p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Index in the fixed enumeration 0, 1, ..., p-1, infinity of P^1(F_p).
    pub fn index(&self) -> u64 {
        if self.is_infinity() {
            self.p
        } else {
            self.a
        }
    }

    /// Inverse of [`FpProj::index`].
    pub fn from_index(i: u64, p: u64) -> Self {
        if i == p {
            FpProj::infinity(p)
        } else {
            FpProj::affine(i, p)
        }
    }
}

impl fmt::Display for FpProj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.a, self.b)
    }
}

/// Square root in F_p, or None for a non-residue.
///
/// Deterministic: for p = 1 mod 4 the Tonelli-Shanks witness is the
/// smallest non-residue, and of the two roots the numerically smaller
/// representative is returned.
pub fn sqrt_fp(a: FpElem) -> Option<FpElem> {
    let p = a.p;
    if a.is_zero() {
        return Some(a);
    }
    if p == 2 {
        return Some(a); // 1^2 = 1
    }
    // Euler criterion.
    if a.pow((p - 1) / 2).v != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        a.pow((p + 1) / 4)
    } else {
        tonelli_shanks(a)
    };
    let other = root.neg();
    Some(if root.v <= other.v { root } else { other })
}

fn tonelli_shanks(a: FpElem) -> FpElem {
    let p = a.p;
    // p = 1 mod 4 here; write p - 1 = q 2^s with q odd.
    let mut q = p - 1;
    let mut s = 0u32;
    while q & 1 == 0 {
        q >>= 1;
        s += 1;
    }
    // Smallest quadratic non-residue; exists and is small in practice,
    // and scanning keeps the choice deterministic.
    let mut z = FpElem { v: 2, p };
    while z.pow((p - 1) / 2).v == 1 {
        z = FpElem { v: z.v + 1, p };
    }
    let mut m = s;
    let mut c = z.pow(q);
    let mut t = a.pow(q);
    let mut r = a.pow((q + 1) / 2);
    while t.v != 1 {
        // Least i with t^(2^i) = 1; 0 < i < m by induction.
        let mut i = 0u32;
        let mut t2 = t;
        while t2.v != 1 {
            t2 = t2.mul(&t2);
            i += 1;
        }
        let b = c.pow(1u64 << (m - i - 1));
        m = i;
        c = b.mul(&b);
        t = t.mul(&c);
        r = r.mul(&b);
    }
    r
}

/// Roots in P^1(F_p) of the homogeneous quadratic A X^2 + B X W + C W^2,
/// with multiplicities. Returns [`NumError::DegenerateFiber`] when all
/// three coefficients vanish. Roots are sorted by their canonical index
/// (affine values ascending, infinity last).
pub fn quad_roots_fp(a: FpElem, b: FpElem, c: FpElem) -> Result<Vec<(FpProj, u8)>, NumError> {
    let p = a.p;
    assert!(b.p == p && c.p == p, "mixed moduli in quadratic");
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Err(NumError::DegenerateFiber);
    }
    let mut roots: Vec<(FpProj, u8)> = Vec::new();
    if p == 2 {
        // Three candidate points; a homogeneous quadratic with exactly
        // one rational root has it doubled (the other root is conjugate
        // over F_4 only when there are zero rational roots).
        for pt in [FpProj::affine(0, 2), FpProj::affine(1, 2), FpProj::infinity(2)] {
            let (x, w) = (pt.a(), pt.b());
            let val = a.mul(&x).mul(&x).add(&b.mul(&x).mul(&w)).add(&c.mul(&w).mul(&w));
            if val.is_zero() {
                roots.push((pt, 1));
            }
        }
        if roots.len() == 1 {
            roots[0].1 = 2;
        }
    } else if !a.is_zero() {
        let four = FpElem::from_u64(4, p);
        let disc = b.mul(&b).sub(&four.mul(&a).mul(&c));
        if disc.is_zero() {
            let x = b.neg().div(&a.add(&a));
            roots.push((FpProj::affine(x.v, p), 2));
        } else if let Some(s) = sqrt_fp(disc) {
            let twoa = a.add(&a);
            let r1 = b.neg().add(&s).div(&twoa);
            let r2 = b.neg().sub(&s).div(&twoa);
            roots.push((FpProj::affine(r1.v, p), 1));
            roots.push((FpProj::affine(r2.v, p), 1));
        }
    } else if !b.is_zero() {
        // B X W + C W^2 = W (B X + C W): infinity plus one affine root.
        roots.push((FpProj::affine(c.neg().div(&b).v, p), 1));
        roots.push((FpProj::infinity(p), 1));
    } else {
        // C W^2 with C != 0: W = 0 doubled.
        roots.push((FpProj::infinity(p), 2));
    }
    roots.sort_by_key(|(pt, _)| pt.index());
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force root finder used as the oracle: evaluate the form at
    /// every point of P^1(F_p).
    fn roots_by_scan(a: FpElem, b: FpElem, c: FpElem) -> Vec<FpProj> {
        let p = a.modulus();
        let mut out = Vec::new();
        for i in 0..=p {
            let pt = FpProj::from_index(i, p);
            let (x, w) = (pt.a(), pt.b());
            let val = a.mul(&x).mul(&x).add(&b.mul(&x).mul(&w)).add(&c.mul(&w).mul(&w));
            if val.is_zero() {
                out.push(pt);
            }
        }
        out
    }

    #[test]
    fn quadratic_roots_match_exhaustive_scan_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for av in 0..p {
                for bv in 0..p {
                    for cv in 0..p {
                        let (a, b, c) = (
                            FpElem::from_u64(av, p),
                            FpElem::from_u64(bv, p),
                            FpElem::from_u64(cv, p),
                        );
                        let got = quad_roots_fp(a, b, c);
                        if av == 0 && bv == 0 && cv == 0 {
                            assert_eq!(got, Err(NumError::DegenerateFiber));
                            continue;
                        }
                        let got = got.unwrap();
                        let scan = roots_by_scan(a, b, c);
                        let flat: Vec<FpProj> = got.iter().map(|(pt, _)| *pt).collect();
                        assert_eq!(flat, scan, "root set mismatch at p={p} ({av},{bv},{cv})");
                        let total: u32 = got.iter().map(|(_, m)| *m as u32).sum();
                        assert!(total <= 2, "more than two roots with multiplicity");
                        // Multiplicity 2 exactly when one distinct root.
                        if got.len() == 1 {
                            assert_eq!(got[0].1, 2);
                        } else {
                            assert!(got.iter().all(|(_, m)| *m == 1));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sqrt_agrees_with_squaring_over_large_prime() {
        let p = 1_000_000_007u64; // 1 mod 4, exercises Tonelli-Shanks
        for v in [0u64, 1, 2, 3, 4, 5, 123456789, 999999999] {
            let a = FpElem::from_u64(v, p);
            match sqrt_fp(a) {
                Some(r) => assert_eq!(r.mul(&r), a, "bad root for {v}"),
                None => assert_ne!(a.pow((p - 1) / 2).value(), 1, "missed residue {v}"),
            }
        }
        // Residue count sanity on a small 1 mod 4 prime.
        let p = 13u64;
        let squares: std::collections::HashSet<u64> =
            (0..p).map(|v| (v * v) % p).collect();
        for v in 0..p {
            let a = FpElem::from_u64(v, p);
            assert_eq!(sqrt_fp(a).is_some(), squares.contains(&v));
        }
    }

    #[test]
    fn sqrt_is_deterministic_and_minimal() {
        let p = 41u64; // 1 mod 8, deep 2-part
        for v in 1..p {
            if let Some(r) = sqrt_fp(FpElem::from_u64(v, p)) {
                assert!(r.value() <= p - r.value(), "not the smaller root");
            }
        }
    }

    #[test]
    fn field_ops_satisfy_ring_axioms_spot_check() {
        let p = 2147483629u64; // largest prime below 2^31
        let a = FpElem::from_u64(2147483628, p);
        let b = FpElem::from_u64(2147483627, p);
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(a.div(&b).mul(&b), a);
        assert_eq!(a.pow(p - 1).value(), 1);
    }
}

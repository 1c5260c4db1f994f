//! Canonical points of P^1(Q).
//!
//! Every point is stored as a coprime integer pair [a : b] with b > 0,
//! or b = 0 and a = 1 for the point at infinity. Canonical form makes
//! equality, hashing, and ordering plain byte comparisons, which the
//! orbit search relies on for deterministic deduplication.

use super::{Integer, NumError, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of P^1 over Q in canonical form.
///
/// Invariants: gcd(a, b) = 1, and either b > 0, or b = 0 and a = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint1 {
    a: Integer,
    b: Integer,
}

/// Reduce a homogeneous coordinate pair to canonical form.
///
/// Returns [`NumError::ZeroVector`] when both entries are zero.
pub fn normalize_proj(a: Integer, b: Integer) -> Result<ProjPoint1, NumError> {
    use std::cmp::Ordering::*;
    if a.cmp0() == Equal && b.cmp0() == Equal {
        return Err(NumError::ZeroVector);
    }
    let g = Integer::from(a.gcd_ref(&b));
    let mut a = a.div_exact(&g);
    let mut b = b.div_exact(&g);
    match b.cmp0() {
        Less => {
            a = -a;
            b = -b;
        }
        Equal => {
            // gcd(a, 0) = |a|, so a is already +1 or -1 here.
            a = Integer::from(1);
        }
        Greater => {}
    }
    Ok(ProjPoint1 { a, b })
}

impl ProjPoint1 {
    /// Canonical point from any nonzero coordinate pair.
    pub fn new(a: Integer, b: Integer) -> Result<Self, NumError> {
        normalize_proj(a, b)
    }

    /// Canonical point from machine integers.
    pub fn from_pair(a: i64, b: i64) -> Result<Self, NumError> {
        normalize_proj(Integer::from(a), Integer::from(b))
    }

    /// The point at infinity [1 : 0].
    pub fn infinity() -> Self {
        ProjPoint1 {
            a: Integer::from(1),
            b: Integer::from(0),
        }
    }

    /// The origin [0 : 1].
    pub fn zero() -> Self {
        ProjPoint1 {
            a: Integer::from(0),
            b: Integer::from(1),
        }
    }

    /// The affine point [v : 1].
    pub fn from_integer(v: i64) -> Self {
        ProjPoint1 {
            a: Integer::from(v),
            b: Integer::from(1),
        }
    }

    /// The affine point [p : q] for the rational p/q.
    pub fn from_rational(r: &Rational) -> Self {
        ProjPoint1 {
            a: r.numer().clone(),
            b: r.denom().clone(),
        }
    }

    /// First homogeneous coordinate.
    pub fn a(&self) -> &Integer {
        &self.a
    }

    /// Second homogeneous coordinate.
    pub fn b(&self) -> &Integer {
        &self.b
    }

    /// Whether this is the point at infinity.
    pub fn is_infinity(&self) -> bool {
        self.b.cmp0() == std::cmp::Ordering::Equal
    }

    /// The affine value a/b, or None at infinity.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_infinity() {
            None
        } else {
            Some(Rational::from((self.a.clone(), self.b.clone())))
        }
    }

    /// Stable byte encoding used as a hash/dedup key: sign byte, length
    /// prefixed magnitudes of a and b.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let sign = match self.a.cmp0() {
            std::cmp::Ordering::Less => 0u8,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 2,
        };
        out.push(sign);
        for part in [&self.a, &self.b] {
            let digits = Integer::from(part.abs_ref()).to_digits::<u8>(rug::integer::Order::Lsf);
            out.extend_from_slice(&(digits.len() as u64).to_le_bytes());
            out.extend_from_slice(&digits);
        }
        out
    }
}

impl fmt::Display for ProjPoint1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.a, self.b)
    }
}

impl Serialize for ProjPoint1 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // Decimal strings survive arbitrary magnitudes; JSON numbers do not.
        (self.a.to_string(), self.b.to_string()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint1 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (a, b) = <(String, String)>::deserialize(d)?;
        let a: Integer = a.parse().map_err(serde::de::Error::custom)?;
        let b: Integer = b.parse().map_err(serde::de::Error::custom)?;
        normalize_proj(a, b).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_worked_examples() {
        // Fixed expected forms, not recomputed: (4,-6) reduces to [-2:3],
        // (5,0) to [1:0], (0,-7) to [0:1].
        let p = ProjPoint1::from_pair(4, -6).unwrap();
        assert_eq!(p, ProjPoint1::from_pair(-2, 3).unwrap());
        assert_eq!((p.a().to_i64().unwrap(), p.b().to_i64().unwrap()), (-2, 3));

        let q = ProjPoint1::from_pair(5, 0).unwrap();
        assert_eq!(q, ProjPoint1::infinity());
        assert_eq!((q.a().to_i64().unwrap(), q.b().to_i64().unwrap()), (1, 0));

        let r = ProjPoint1::from_pair(0, -7).unwrap();
        assert_eq!(r, ProjPoint1::zero());
        assert_eq!((r.a().to_i64().unwrap(), r.b().to_i64().unwrap()), (0, 1));
    }

    #[test]
    fn zero_pair_is_rejected() {
        assert_eq!(
            normalize_proj(Integer::new(), Integer::new()),
            Err(NumError::ZeroVector)
        );
    }

    #[test]
    fn scaling_never_changes_the_point() {
        // Equality of scaled pairs, the defining property of P^1.
        for (a, b) in [(3i64, 7i64), (-2, 5), (1, 0), (0, 1), (-4, -6)] {
            let base = ProjPoint1::from_pair(a, b).unwrap();
            for s in [2i64, -3, 5, -1, 1000] {
                let scaled = ProjPoint1::from_pair(a * s, b * s).unwrap();
                assert_eq!(base, scaled);
                assert_eq!(base.canonical_bytes(), scaled.canonical_bytes());
            }
        }
    }

    #[test]
    fn canonical_bytes_distinguish_distinct_points() {
        let pts: Vec<ProjPoint1> = (-20..20)
            .flat_map(|a| (0..20).map(move |b| (a, b)))
            .filter(|&(a, b)| a != 0 || b != 0)
            .map(|(a, b)| ProjPoint1::from_pair(a, b).unwrap())
            .collect();
        let mut seen = std::collections::HashMap::new();
        for p in &pts {
            if let Some(prev) = seen.insert(p.canonical_bytes(), p.clone()) {
                assert_eq!(&prev, p, "byte collision between distinct points");
            }
        }
    }

    #[test]
    fn serde_round_trip_preserves_points() {
        use rug::ops::Pow;
        let big = normalize_proj(Integer::from(10).pow(40) + 1, Integer::from(3)).unwrap();
        for p in [ProjPoint1::infinity(), ProjPoint1::zero(), big] {
            let json = serde_json::to_string(&p).unwrap();
            let back: ProjPoint1 = serde_json::from_str(&json).unwrap();
            assert_eq!(p, back);
        }
    }
}

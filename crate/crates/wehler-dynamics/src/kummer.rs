//! Torus automorphisms and their periodic points.
//!
//! A two-dimensional complex torus built from a rank-one order (the plain
//! lattice `Z²`, the Gaussian integers, or the Eisenstein integers) carries
//! affine automorphisms `z ↦ Mz + t`. This module works with the exact
//! skeleton of that picture: the induced integer matrix on the real lattice,
//! torsion points as coordinate vectors over `ℤ/N`, fixed-point counts via
//! determinants and Smith normal form, orbit closures of torsion points,
//! validity of cyclic group actions on such tori, Hirzebruch-Jung resolution
//! strings for cyclic quotient singularities, and the monomial chart atlas of
//! the weighted `1/5(1,2)` example together with its equivariant multipliers.
//!
//! No floating uniformization is involved anywhere; the only floating numbers
//! appear in multiplier magnitudes, where the inputs are already real moduli.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rug::ops::RemRounding;
use rug::Integer;
use thiserror::Error;

use crate::numcore::{IntMatrix, QMatrix, Rational};

/// Errors for torus and quotient-chart computations.
#[derive(Debug, Error)]
pub enum KummerError {
    /// A torsion-orbit computation would need a modulus beyond the budget.
    #[error("torsion level {level} exceeds budgeted modulus {budget}")]
    LevelOverflow { level: u64, budget: u64 },
    /// An input violated a documented precondition.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Least common multiple guarded against u64 overflow.
fn lcm_checked(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    let g = gcd_u64(a, b);
    let wide = (a / g) as u128 * b as u128;
    u64::try_from(wide).ok()
}

/// The coefficient order of the torus lattice.
///
/// `Z2` is the generic case: the lattice factor is plain `Z²` and matrix
/// entries are rational integers. `GaussianZi` adjoins `i` with `i² = -1`;
/// `EisensteinZw` adjoins `ω` with `ω² = -ω - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadOrder {
    Z2,
    GaussianZi,
    EisensteinZw,
}

impl fmt::Display for QuadOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadOrder::Z2 => write!(f, "Z2"),
            QuadOrder::GaussianZi => write!(f, "Z[i]"),
            QuadOrder::EisensteinZw => write!(f, "Z[w]"),
        }
    }
}

impl std::str::FromStr for QuadOrder {
    type Err = KummerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Z2" | "z2" => Ok(QuadOrder::Z2),
            "Zi" | "zi" | "Z[i]" | "gaussian" => Ok(QuadOrder::GaussianZi),
            "Zw" | "zw" | "Z[w]" | "eisenstein" => Ok(QuadOrder::EisensteinZw),
            other => Err(KummerError::PreconditionViolated(format!(
                "unknown order {other:?} (expected Z2, Zi, or Zw)"
            ))),
        }
    }
}

/// An element `a + b·ι` of the order, where `ι` is `i`, `ω`, or absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderElem {
    pub a: i64,
    pub b: i64,
}

impl OrderElem {
    pub fn new(a: i64, b: i64) -> Self {
        OrderElem { a, b }
    }

    /// A rational integer, valid in every order.
    pub fn int(a: i64) -> Self {
        OrderElem { a, b: 0 }
    }

    /// Regular representation on the basis `(1, ι)`, as 2x2 integer rows.
    ///
    /// For `Z2` the element must be a rational integer and acts as a scalar;
    /// the resulting block structure makes the 4x4 real matrix of a `Z2`
    /// torus map equal to `M ⊗ I₂`.
    fn regular_rep(&self, order: QuadOrder) -> Result<[[i64; 2]; 2], KummerError> {
        match order {
            QuadOrder::Z2 => {
                if self.b != 0 {
                    return Err(KummerError::PreconditionViolated(
                        "Z2 entries must be rational integers".into(),
                    ));
                }
                Ok([[self.a, 0], [0, self.a]])
            }
            QuadOrder::GaussianZi => Ok([[self.a, -self.b], [self.b, self.a]]),
            QuadOrder::EisensteinZw => Ok([[self.a, -self.b], [self.b, self.a - self.b]]),
        }
    }
}

/// A torsion point of the torus: a vector in `(1/N)Λ/Λ`.
///
/// Stored at its minimal level: coordinates are reduced mod `N` and the
/// common factor of all coordinates with `N` is divided out, so equality of
/// torsion points is plain structural equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorsionPoint {
    level: u64,
    coords: [u64; 4],
}

impl TorsionPoint {
    /// Builds the point `(coords[0]/level, ..., coords[3]/level)`.
    pub fn new(level: u64, coords: [i64; 4]) -> Result<Self, KummerError> {
        if level == 0 || level > i64::MAX as u64 {
            return Err(KummerError::PreconditionViolated(
                "torsion level must be positive and fit a signed word".into(),
            ));
        }
        let reduced = coords.map(|c| c.rem_euclid(level as i64) as u64);
        Ok(Self::canonical(level, reduced))
    }

    /// The origin, the unique level-1 point.
    pub fn zero() -> Self {
        TorsionPoint {
            level: 1,
            coords: [0; 4],
        }
    }

    fn canonical(level: u64, coords: [u64; 4]) -> Self {
        let mut g = level;
        for c in coords {
            g = gcd_u64(g, c % level);
        }
        // All coordinates divisible by level means the origin.
        let g = if g == 0 { level } else { g };
        TorsionPoint {
            level: level / g,
            coords: coords.map(|c| (c % level) / g),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coords(&self) -> [u64; 4] {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.level == 1
    }

    /// Coordinates rescaled to a coarser level `l`, when `level | l`.
    pub fn at_level(&self, l: u64) -> Option<[u64; 4]> {
        if l == 0 || l % self.level != 0 {
            return None;
        }
        let scale = l / self.level;
        Some(self.coords.map(|c| c * scale))
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}/{n}, {}/{n}, {}/{n}, {}/{n})",
            self.coords[0],
            self.coords[1],
            self.coords[2],
            self.coords[3],
            n = self.level
        )
    }
}

/// An affine torus automorphism `z ↦ Mz + t`.
///
/// `M` is a 2x2 matrix over the order acting on `Λ₀ ⊕ Λ₀`; the derived
/// `as_real` matrix is its action on the rank-4 real lattice in the basis
/// `(e₁, ιe₁, e₂, ιe₂)`, each entry replaced by its regular representation.
/// The linear part must be a lattice automorphism, i.e. `det = ±1`.
#[derive(Debug, Clone)]
pub struct TorusAut {
    order: QuadOrder,
    entries: [[OrderElem; 2]; 2],
    translation: TorsionPoint,
    real: IntMatrix,
}

impl TorusAut {
    pub fn new(
        order: QuadOrder,
        entries: [[OrderElem; 2]; 2],
        translation: TorsionPoint,
    ) -> Result<Self, KummerError> {
        let mut real = IntMatrix::zero(4);
        for bi in 0..2 {
            for bj in 0..2 {
                let rep = entries[bi][bj].regular_rep(order)?;
                for r in 0..2 {
                    for c in 0..2 {
                        real.set(2 * bi + r, 2 * bj + c, Integer::from(rep[r][c]));
                    }
                }
            }
        }
        let det = real.det();
        if det != 1 && det != -1 {
            return Err(KummerError::PreconditionViolated(format!(
                "linear part has determinant {det}, not a lattice automorphism"
            )));
        }
        Ok(TorusAut {
            order,
            entries,
            translation,
            real,
        })
    }

    /// A linear map (no translation) over the given order.
    pub fn linear(order: QuadOrder, entries: [[OrderElem; 2]; 2]) -> Result<Self, KummerError> {
        Self::new(order, entries, TorsionPoint::zero())
    }

    /// Convenience constructor for the generic `Z2` case from integer rows.
    pub fn z2(rows: [[i64; 2]; 2], translation: TorsionPoint) -> Result<Self, KummerError> {
        let entries = [
            [OrderElem::int(rows[0][0]), OrderElem::int(rows[0][1])],
            [OrderElem::int(rows[1][0]), OrderElem::int(rows[1][1])],
        ];
        Self::new(QuadOrder::Z2, entries, translation)
    }

    pub fn order(&self) -> QuadOrder {
        self.order
    }

    pub fn entries(&self) -> &[[OrderElem; 2]; 2] {
        &self.entries
    }

    pub fn translation(&self) -> &TorsionPoint {
        &self.translation
    }

    /// The induced 4x4 integer matrix on the real lattice.
    pub fn as_real(&self) -> &IntMatrix {
        &self.real
    }

    /// Applies the affine map to a torsion point.
    pub fn apply(&self, p: &TorsionPoint) -> Result<TorsionPoint, KummerError> {
        let level = lcm_checked(p.level, self.translation.level).ok_or(
            KummerError::LevelOverflow {
                level: u64::MAX,
                budget: u64::MAX,
            },
        )?;
        let pc = p.at_level(level).expect("level is a common multiple");
        let tc = self
            .translation
            .at_level(level)
            .expect("level is a common multiple");
        let v: Vec<Integer> = pc.iter().map(|&c| Integer::from(c)).collect();
        let image = self.real.mul_vec(&v);
        let mut out = [0u64; 4];
        let n = Integer::from(level);
        for i in 0..4 {
            let c = Integer::from(&image[i] + tc[i]).rem_euc(&n);
            out[i] = c.to_u64().expect("reduced residue fits u64");
        }
        Ok(TorsionPoint::canonical(level, out))
    }

    /// Linear part and accumulated translation of the n-th iterate:
    /// `fⁿ(z) = Mⁿz + (Mⁿ⁻¹ + ... + M + I)t`.
    fn iterate_affine(&self, n: u32) -> (IntMatrix, TorsionPoint) {
        let mn = self.real.pow(n as u64);
        let level = self.translation.level;
        let modulus = Integer::from(level);
        let mut acc = vec![Integer::new(); 4];
        let mut cur: Vec<Integer> = self
            .translation
            .coords
            .iter()
            .map(|&c| Integer::from(c))
            .collect();
        for _ in 0..n {
            for i in 0..4 {
                acc[i] += &cur[i];
            }
            cur = self.real.mul_vec(&cur);
            for c in cur.iter_mut() {
                *c = c.clone().rem_euc(&modulus);
            }
        }
        let mut coords = [0u64; 4];
        for i in 0..4 {
            coords[i] = acc[i]
                .clone()
                .rem_euc(&modulus)
                .to_u64()
                .expect("reduced residue fits u64");
        }
        (mn, TorsionPoint::canonical(level, coords))
    }
}

/// Outcome of a fixed-point count on the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedCount {
    /// Exactly this many fixed points (possibly zero for a fixed-point-free
    /// affine map).
    Finite(Integer),
    /// The fixed locus is positive-dimensional.
    InfiniteFixedLocus,
}

impl FixedCount {
    pub fn finite(&self) -> Option<&Integer> {
        match self {
            FixedCount::Finite(c) => Some(c),
            FixedCount::InfiniteFixedLocus => None,
        }
    }
}

impl fmt::Display for FixedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedCount::Finite(c) => write!(f, "{c}"),
            FixedCount::InfiniteFixedLocus => write!(f, "infinite fixed locus"),
        }
    }
}

/// Whether `(Mⁿ - I) z ≡ -t (mod Λ)` has a solution `z` on the torus.
///
/// Diagonalizing `u·A·v = d` over the integers turns the congruence into
/// `d·y ≡ u·(-t)`: rows with a nonzero divisor absorb any value, rows with a
/// zero divisor demand that the corresponding entry of `u·t` is integral.
fn affine_fixed_solvable(a: &IntMatrix, t: &TorsionPoint) -> bool {
    if t.is_zero() {
        return true;
    }
    let (u, d, _v) = a.smith_normal_form();
    let coords: Vec<Integer> = t.coords.iter().map(|&c| Integer::from(c)).collect();
    let s = u.mul_vec(&coords);
    let level = Integer::from(t.level);
    for i in 0..4 {
        if d.get(i, i).cmp0() == std::cmp::Ordering::Equal
            && s[i].clone().rem_euc(&level).cmp0() != std::cmp::Ordering::Equal
        {
            return false;
        }
    }
    true
}

/// Number of fixed points of the n-th iterate of `f` on the torus.
///
/// Fixed points solve `(Mⁿ - I) z ≡ -t_n (mod Λ)` with `t_n` the accumulated
/// translation. When `det(Mⁿ - I) ≠ 0` the difference map is a surjective
/// torus endomorphism with constant fiber size, so the count is
/// `|det(Mⁿ - I)|` independent of the translation; solvability is still
/// re-checked via Smith normal form whenever `t_n ≠ 0`. When the determinant
/// vanishes, the locus is either empty (unsolvable congruence, count zero)
/// or positive-dimensional.
pub fn torus_fixed_count(f: &TorusAut, n: u32) -> Result<FixedCount, KummerError> {
    if n == 0 {
        return Err(KummerError::PreconditionViolated(
            "power must be at least 1".into(),
        ));
    }
    let (mn, tn) = f.iterate_affine(n);
    let a = mn.sub(&IntMatrix::identity(4));
    let det = a.det();
    let solvable = affine_fixed_solvable(&a, &tn);
    if det.cmp0() == std::cmp::Ordering::Equal {
        if solvable {
            Ok(FixedCount::InfiniteFixedLocus)
        } else {
            Ok(FixedCount::Finite(Integer::new()))
        }
    } else {
        assert!(solvable, "nonsingular difference map must be surjective");
        Ok(FixedCount::Finite(det.abs()))
    }
}

/// Brute-force fixed-point count of `fⁿ` over the points of level dividing
/// `level`. Exact oracle for [`torus_fixed_count`]: every fixed point of a
/// nonsingular iterate has level dividing `|det(Mⁿ - I)| · level(t)`.
pub fn brute_force_fixed_count(f: &TorusAut, n: u32, level: u64) -> Result<u64, KummerError> {
    if n == 0 || level == 0 {
        return Err(KummerError::PreconditionViolated(
            "power and level must be at least 1".into(),
        ));
    }
    if level > 100 {
        return Err(KummerError::PreconditionViolated(format!(
            "brute-force level {level} too large (max 100)"
        )));
    }
    let (mn, tn) = f.iterate_affine(n);
    let modulus = lcm_checked(level, tn.level).ok_or(KummerError::LevelOverflow {
        level: u64::MAX,
        budget: u64::MAX,
    })?;
    if modulus > 1_000_000 {
        return Err(KummerError::LevelOverflow {
            level: modulus,
            budget: 1_000_000,
        });
    }
    // Reduce the matrix mod the working level once; all arithmetic stays in u64.
    let mut m_red = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m_red[i][j] = mn
                .get(i, j)
                .clone()
                .rem_euc(&Integer::from(modulus))
                .to_u64()
                .expect("reduced entry fits u64");
        }
    }
    let t_red = tn.at_level(modulus).expect("lcm is a common multiple");
    let scale = modulus / level;
    let mut count = 0u64;
    let mut c = [0u64; 4];
    loop {
        // Candidate point c/level embedded at the working level.
        let z = c.map(|x| x * scale);
        let mut fixed = true;
        for i in 0..4 {
            let mut acc = t_red[i] % modulus;
            for j in 0..4 {
                acc = (acc + m_red[i][j] * z[j]) % modulus;
            }
            if acc != z[i] % modulus {
                fixed = false;
                break;
            }
        }
        if fixed {
            count += 1;
        }
        // Odometer over (Z/level)^4.
        let mut k = 0;
        loop {
            c[k] += 1;
            if c[k] < level {
                break;
            }
            c[k] = 0;
            k += 1;
            if k == 4 {
                return Ok(count);
            }
        }
    }
}

/// Closure of a torsion point under a set of affine torus maps.
///
/// All arithmetic happens in `(ℤ/L)⁴` where `L` is the least common multiple
/// of the start level and all translation levels; linear parts preserve that
/// lattice, so the closure is finite and returned in full, canonically
/// sorted. `max_level` bounds the working modulus.
pub fn torsion_orbit(
    gens: &[TorusAut],
    start: &TorsionPoint,
    max_level: u64,
) -> Result<Vec<TorsionPoint>, KummerError> {
    if gens.is_empty() {
        return Err(KummerError::PreconditionViolated(
            "at least one generator required".into(),
        ));
    }
    if max_level == 0 {
        return Err(KummerError::PreconditionViolated(
            "level budget must be positive".into(),
        ));
    }
    let mut level = start.level;
    for g in gens {
        let l = lcm_checked(level, g.translation.level).unwrap_or(u64::MAX);
        if l > max_level {
            return Err(KummerError::LevelOverflow {
                level: l,
                budget: max_level,
            });
        }
        level = l;
    }
    let modulus = Integer::from(level);
    // Generator data reduced to the working level.
    let reduced: Vec<(&IntMatrix, [u64; 4])> = gens
        .iter()
        .map(|g| {
            let t = g
                .translation
                .at_level(level)
                .expect("level is a common multiple");
            (&g.real, t)
        })
        .collect();
    let start_coords = start.at_level(level).expect("level is a common multiple");
    let mut seen: BTreeSet<[u64; 4]> = BTreeSet::new();
    seen.insert(start_coords);
    let mut frontier: VecDeque<[u64; 4]> = VecDeque::new();
    frontier.push_back(start_coords);
    while let Some(c) = frontier.pop_front() {
        let v: Vec<Integer> = c.iter().map(|&x| Integer::from(x)).collect();
        for (m, t) in &reduced {
            let image = m.mul_vec(&v);
            let mut next = [0u64; 4];
            for i in 0..4 {
                next[i] = Integer::from(&image[i] + t[i])
                    .rem_euc(&modulus)
                    .to_u64()
                    .expect("reduced residue fits u64");
            }
            if seen.insert(next) {
                frontier.push_back(next);
            }
        }
    }
    let mut orbit: Vec<TorsionPoint> = seen
        .iter()
        .map(|&c| TorsionPoint::canonical(level, c))
        .collect();
    orbit.sort();
    // Exact closure re-check on the output.
    let set: BTreeSet<&TorsionPoint> = orbit.iter().collect();
    for p in &orbit {
        for g in gens {
            let q = g.apply(p)?;
            assert!(set.contains(&q), "orbit closure must be stable");
        }
    }
    Ok(orbit)
}

/// Verdict of the cyclic-action classification on two-dimensional tori.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KummerVerdict {
    /// One of the five admissible homothety cases, numbered 1 through 5.
    Valid(u8),
    /// The order-5/order-10 weight-(1,2) patterns: geometrically real but
    /// excluded from the classification by the homothety lemma.
    ExcludedByLemma44,
    /// No such action exists on a torus over the given order.
    Invalid,
}

impl fmt::Display for KummerVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KummerVerdict::Valid(case) => write!(f, "valid (case {case})"),
            KummerVerdict::ExcludedByLemma44 => write!(f, "excluded by the homothety lemma"),
            KummerVerdict::Invalid => write!(f, "invalid"),
        }
    }
}

/// Classifies a cyclic group action of order `g_order` by homotheties on a
/// torus over the given order.
///
/// The admissible pairs are: trivial (case 1) and `-id` (case 2) over any
/// order, `i·id` of order 4 over the Gaussian integers (case 3), and
/// `ω·id` of order 3 resp. `-ω·id` of order 6 over the Eisenstein integers
/// (cases 4, 5). Orders 5 and 10 correspond to the two weight-(1,2)
/// quotient patterns on the `ζ₅` lattice, which exist but are excluded from
/// the non-elementary classification; everything else is impossible.
pub fn kummer_type_validate(order: QuadOrder, g_order: u32) -> Result<KummerVerdict, KummerError> {
    if g_order == 0 {
        return Err(KummerError::PreconditionViolated(
            "group order must be at least 1".into(),
        ));
    }
    Ok(match (order, g_order) {
        (_, 1) => KummerVerdict::Valid(1),
        (_, 2) => KummerVerdict::Valid(2),
        (QuadOrder::GaussianZi, 4) => KummerVerdict::Valid(3),
        (QuadOrder::EisensteinZw, 3) => KummerVerdict::Valid(4),
        (QuadOrder::EisensteinZw, 6) => KummerVerdict::Valid(5),
        (_, 5) | (_, 10) => KummerVerdict::ExcludedByLemma44,
        _ => KummerVerdict::Invalid,
    })
}

/// A cyclic quotient singularity of type `1/n (1, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicSingularity {
    n: u64,
    q: u64,
}

impl CyclicSingularity {
    pub fn new(n: u64, q: u64) -> Result<Self, KummerError> {
        if q == 0 || q >= n {
            return Err(KummerError::PreconditionViolated(format!(
                "require 0 < q < n, got n = {n}, q = {q}"
            )));
        }
        if gcd_u64(n, q) != 1 {
            return Err(KummerError::PreconditionViolated(format!(
                "n = {n} and q = {q} must be coprime"
            )));
        }
        Ok(CyclicSingularity { n, q })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

impl fmt::Display for CyclicSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{} (1, {})", self.n, self.q)
    }
}

/// Hirzebruch-Jung resolution string of a cyclic quotient singularity.
///
/// Returns `[b₁, ..., b_r]` with `n/q = b₁ - 1/(b₂ - 1/(...))` and every
/// `bᵢ ≥ 2`; the exceptional curves of the minimal resolution have
/// self-intersections `-b₁, ..., -b_r`. The expansion is re-evaluated before
/// returning and must reproduce `n/q` exactly.
pub fn hirzebruch_jung(s: &CyclicSingularity) -> Vec<u64> {
    let (mut n, mut q) = (s.n, s.q);
    let mut string = Vec::new();
    while q > 0 {
        let b = n.div_ceil(q);
        debug_assert!(b >= 2, "quotient data forces every entry >= 2");
        string.push(b);
        let next_q = b * q - n;
        n = q;
        q = next_q;
    }
    let (rn, rq) = hj_evaluate(&string);
    assert!(
        rn == s.n && rq == s.q,
        "continued fraction must reconstruct n/q exactly"
    );
    string
}

/// Evaluates `b₁ - 1/(b₂ - 1/(...))` to a fraction in lowest terms.
pub fn hj_evaluate(string: &[u64]) -> (u64, u64) {
    let mut num = 1u64;
    let mut den = 0u64;
    for &b in string.iter().rev() {
        let next_num = b * num - den;
        den = num;
        num = next_num;
    }
    (num, den)
}

/// A monomial map between charts: column `j` holds the exponents of the
/// j-th image coordinate as a monomial in the source coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialMap {
    exps: [[i64; 2]; 2],
}

impl MonomialMap {
    /// Builds from the two image-coordinate exponent columns.
    pub fn from_cols(col0: [i64; 2], col1: [i64; 2]) -> Self {
        MonomialMap {
            exps: [[col0[0], col1[0]], [col0[1], col1[1]]],
        }
    }

    pub fn column(&self, j: usize) -> [i64; 2] {
        [self.exps[0][j], self.exps[1][j]]
    }

    pub fn det(&self) -> i64 {
        self.exps[0][0] * self.exps[1][1] - self.exps[0][1] * self.exps[1][0]
    }

    /// Composite map: first `self`, then `next`. In exponent matrices this is
    /// the product `self · next`, since a target monomial pulls back through
    /// `next` and then through `self`.
    pub fn then(&self, next: &MonomialMap) -> MonomialMap {
        let mut exps = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                exps[i][j] =
                    self.exps[i][0] * next.exps[0][j] + self.exps[i][1] * next.exps[1][j];
            }
        }
        MonomialMap { exps }
    }

    /// Source-coordinate exponents of a monomial given by target exponents.
    pub fn pull(&self, target: [i64; 2]) -> [i64; 2] {
        [
            self.exps[0][0] * target[0] + self.exps[0][1] * target[1],
            self.exps[1][0] * target[0] + self.exps[1][1] * target[1],
        ]
    }
}

/// The toric chart atlas of the `1/5 (1, 2)` quotient.
///
/// Three charts `V₀, V₁, V₂` with coordinates `(vᵢ, wᵢ)`, glued by monomial
/// transitions, resolve the quotient singularity; the quotient itself is cut
/// out by the invariant monomials `u₀, ..., u₃` in the covering coordinates
/// `(x, y)`. All exponent data is verified against the defining relations at
/// construction time.
#[derive(Debug, Clone)]
pub struct ChartAtlas {
    transitions: [MonomialMap; 2],
    quotient_exps: [[i64; 2]; 4],
    chart_exps: [[[i64; 2]; 2]; 3],
}

/// Builds the atlas and verifies every chart relation exactly; any failed
/// relation aborts.
pub fn chart_atlas() -> ChartAtlas {
    // Transitions V₀→V₁ (v₁ = 1/w₀, w₁ = v₀w₀³) and V₁→V₂ (v₂ = 1/w₁, w₂ = v₁w₁²).
    let t01 = MonomialMap::from_cols([0, -1], [1, 3]);
    let t12 = MonomialMap::from_cols([0, -1], [1, 2]);
    // Invariant monomials u₀ = x⁵, u₁ = x³y, u₂ = xy², u₃ = y⁵.
    let quotient_exps = [[5, 0], [3, 1], [1, 2], [0, 5]];
    // Chart coordinates as monomials in (x, y).
    let chart_exps = [
        [[5, 0], [-2, 1]],  // v₀ = x⁵,    w₀ = y/x²
        [[2, -1], [-1, 3]], // v₁ = x²/y,  w₁ = y³/x
        [[1, -3], [0, 5]],  // v₂ = x/y³,  w₂ = y⁵
    ];
    let atlas = ChartAtlas {
        transitions: [t01, t12],
        quotient_exps,
        chart_exps,
    };

    // Transitions are invertible monomial changes of coordinates.
    for t in &atlas.transitions {
        assert!(t.det().abs() == 1, "chart transition must have det ±1");
    }
    // Each transition carries the (x,y)-expressions of one chart to the next.
    for k in 0..2 {
        for j in 0..2 {
            let via = chart_monomial(&atlas.chart_exps[k], atlas.transitions[k].column(j));
            assert!(
                via == atlas.chart_exps[k + 1][j],
                "transition must reproduce the next chart's coordinates"
            );
        }
    }
    // Multiplicative relations among the invariant monomials:
    // u₀u₂ = u₁² and u₁u₃ = u₂³, additively in the exponent lattice.
    for i in 0..2 {
        assert!(
            atlas.quotient_exps[0][i] + atlas.quotient_exps[2][i]
                == 2 * atlas.quotient_exps[1][i],
            "relation u0 u2 = u1^2 must hold"
        );
        assert!(
            atlas.quotient_exps[1][i] + atlas.quotient_exps[3][i]
                == 3 * atlas.quotient_exps[2][i],
            "relation u1 u3 = u2^3 must hold"
        );
    }
    // Composite transition agrees with the direct formulas: w₂ = v₀²w₀⁵.
    let composite = atlas.transitions[0].then(&atlas.transitions[1]);
    assert!(
        composite.column(1) == [2, 5],
        "composed transition must give w2 = v0^2 w0^5"
    );
    let direct = chart_monomial(&atlas.chart_exps[0], composite.column(1));
    assert!(
        direct == atlas.chart_exps[2][1],
        "composite transition must match the direct (x,y) expression"
    );
    // Every invariant monomial is a genuine monomial in every chart.
    for i in 0..4 {
        for chart in 0..3 {
            assert!(
                atlas.coord_in_chart(atlas.quotient_exps[i], chart).is_some(),
                "invariant monomials must be regular monomials in each chart"
            );
        }
    }
    atlas
}

/// The (x,y)-exponents of a monomial in chart coordinates.
fn chart_monomial(chart: &[[i64; 2]; 2], exps: [i64; 2]) -> [i64; 2] {
    [
        chart[0][0] * exps[0] + chart[1][0] * exps[1],
        chart[0][1] * exps[0] + chart[1][1] * exps[1],
    ]
}

impl ChartAtlas {
    /// Transition `k`: 0 is V₀→V₁, 1 is V₁→V₂.
    pub fn transition(&self, k: usize) -> &MonomialMap {
        &self.transitions[k]
    }

    /// The (x,y) exponent vector of the invariant monomial `uᵢ`.
    pub fn quotient_exp(&self, i: usize) -> [i64; 2] {
        self.quotient_exps[i]
    }

    /// The (x,y) exponent vectors of `(vᵢ, wᵢ)` for chart `i`.
    pub fn chart_coord_exps(&self, chart: usize) -> [[i64; 2]; 2] {
        self.chart_exps[chart]
    }

    /// Writes a monomial given by (x,y)-exponents in the coordinates of the
    /// requested chart, when it is a monomial there (integral exponents).
    pub fn coord_in_chart(&self, xy_exps: [i64; 2], chart: usize) -> Option<[i64; 2]> {
        let c = &self.chart_exps[chart];
        let m = QMatrix::new(
            2,
            vec![
                Rational::from(c[0][0]),
                Rational::from(c[1][0]),
                Rational::from(c[0][1]),
                Rational::from(c[1][1]),
            ],
        );
        let rhs = vec![Rational::from(xy_exps[0]), Rational::from(xy_exps[1])];
        let sol = m.solve(&rhs)?;
        let mut out = [0i64; 2];
        for i in 0..2 {
            if !sol[i].is_integer() {
                return None;
            }
            out[i] = sol[i].numer().to_i64()?;
        }
        Some(out)
    }
}

/// An eigencoordinate multiplier `α^a β^b` recorded by its exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Multiplier {
    pub alpha_exp: i64,
    pub beta_exp: i64,
}

impl Multiplier {
    /// `|α|^a |β|^b` for the given moduli.
    pub fn magnitude(&self, abs_alpha: f64, abs_beta: f64) -> f64 {
        abs_alpha.powi(self.alpha_exp as i32) * abs_beta.powi(self.beta_exp as i32)
    }

    pub fn is_contracting(&self, abs_alpha: f64, abs_beta: f64) -> bool {
        self.magnitude(abs_alpha, abs_beta) < 1.0
    }

    pub fn is_expanding(&self, abs_alpha: f64, abs_beta: f64) -> bool {
        self.magnitude(abs_alpha, abs_beta) > 1.0
    }
}

impl fmt::Display for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha^{} beta^{}", self.alpha_exp, self.beta_exp)
    }
}

/// Multiplier of a chart coordinate under the diagonalized covering map
/// `(x, y) ↦ (αx, βy)`: the monomial `x^a y^b` rescales by `α^a β^b`.
pub fn equivariant_multiplier(coord_exps: [i64; 2]) -> Multiplier {
    Multiplier {
        alpha_exp: coord_exps[0],
        beta_exp: coord_exps[1],
    }
}

/// Fixed-point data of the induced map on one exceptional curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFixedReport {
    /// Which exceptional curve, 1 or 2.
    pub curve: usize,
    /// Number of fixed points on the curve; the induced map is linear on the
    /// tangent coordinate, fixing exactly 0 and ∞.
    pub fixed_points: usize,
    /// Multiplier along the curve.
    pub tangent: Multiplier,
    pub tangent_magnitude: f64,
    /// Multiplier transverse to the curve.
    pub transverse: Multiplier,
    pub transverse_magnitude: f64,
    /// True when exactly one of the two directions contracts.
    pub saddle: bool,
}

/// Fixed points of the lifted dynamics on the two exceptional curves of the
/// `1/5 (1, 2)` resolution, with their tangent/transverse multipliers.
///
/// Requires `|α| > 1 > |β| > 0`; the product `|αβ|` is unconstrained. On each
/// curve the induced map is `w ↦ (multiplier) · w`, so it fixes exactly the
/// two ends, and with the given moduli both fixed points are saddles.
pub fn exceptional_fixed_points(
    atlas: &ChartAtlas,
    abs_alpha: f64,
    abs_beta: f64,
) -> Result<Vec<CurveFixedReport>, KummerError> {
    if !(abs_alpha > 1.0) || !(abs_beta > 0.0 && abs_beta < 1.0) {
        return Err(KummerError::PreconditionViolated(format!(
            "require |alpha| > 1 > |beta| > 0, got |alpha| = {abs_alpha}, |beta| = {abs_beta}"
        )));
    }
    let mut reports = Vec::new();
    for curve in 1..=2usize {
        // Curve E_i is the w-axis of chart V_{i-1}: tangent coordinate w_{i-1},
        // transverse coordinate v_{i-1}.
        let chart = atlas.chart_coord_exps(curve - 1);
        let tangent = equivariant_multiplier(chart[1]);
        let transverse = equivariant_multiplier(chart[0]);
        let tm = tangent.magnitude(abs_alpha, abs_beta);
        let nm = transverse.magnitude(abs_alpha, abs_beta);
        reports.push(CurveFixedReport {
            curve,
            fixed_points: 2,
            tangent,
            tangent_magnitude: tm,
            transverse,
            transverse_magnitude: nm,
            saddle: (tm < 1.0) != (nm < 1.0),
        });
    }
    Ok(reports)
}

/// Histogram of torsion-orbit sizes under a generating set, over all points
/// of level dividing `level`. Exercises periodicity of torsion points.
pub fn torsion_orbit_histogram(
    gens: &[TorusAut],
    level: u64,
    max_level: u64,
) -> Result<BTreeMap<usize, usize>, KummerError> {
    if level == 0 || level > 12 {
        return Err(KummerError::PreconditionViolated(
            "histogram level must be between 1 and 12".into(),
        ));
    }
    let mut assigned: BTreeSet<TorsionPoint> = BTreeSet::new();
    let mut histogram = BTreeMap::new();
    let mut c = [0u64; 4];
    loop {
        let p = TorsionPoint::canonical(level, c);
        if !assigned.contains(&p) {
            let orbit = torsion_orbit(gens, &p, max_level)?;
            *histogram.entry(orbit.len()).or_insert(0) += 1;
            assigned.extend(orbit);
        }
        let mut k = 0;
        loop {
            c[k] += 1;
            if c[k] < level {
                break;
            }
            c[k] = 0;
            k += 1;
            if k == 4 {
                return Ok(histogram);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib_aut() -> TorusAut {
        TorusAut::z2([[2, 1], [1, 1]], TorsionPoint::zero()).unwrap()
    }

    #[test]
    fn z2_real_matrix_is_kronecker_with_identity() {
        let f = fib_aut();
        let m = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(*f.as_real(), m.kron(&IntMatrix::identity(2)));
    }

    #[test]
    fn z2_rejects_imaginary_entries() {
        let entries = [
            [OrderElem::new(1, 1), OrderElem::int(0)],
            [OrderElem::int(0), OrderElem::int(1)],
        ];
        assert!(matches!(
            TorusAut::linear(QuadOrder::Z2, entries),
            Err(KummerError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn non_unimodular_linear_part_rejected() {
        assert!(matches!(
            TorusAut::z2([[2, 0], [0, 2]], TorsionPoint::zero()),
            Err(KummerError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn gaussian_homothety_has_order_four() {
        let i_id = [
            [OrderElem::new(0, 1), OrderElem::int(0)],
            [OrderElem::int(0), OrderElem::new(0, 1)],
        ];
        let f = TorusAut::linear(QuadOrder::GaussianZi, i_id).unwrap();
        assert_eq!(f.as_real().det(), Integer::from(1));
        assert!(f.as_real().pow(4).is_identity());
        assert!(!f.as_real().pow(2).is_identity());
    }

    #[test]
    fn eisenstein_homotheties_have_orders_three_and_six() {
        let w_id = [
            [OrderElem::new(0, 1), OrderElem::int(0)],
            [OrderElem::int(0), OrderElem::new(0, 1)],
        ];
        let f = TorusAut::linear(QuadOrder::EisensteinZw, w_id).unwrap();
        assert!(f.as_real().pow(3).is_identity());
        assert!(!f.as_real().pow(2).is_identity());
        let neg_w_id = [
            [OrderElem::new(0, -1), OrderElem::int(0)],
            [OrderElem::int(0), OrderElem::new(0, -1)],
        ];
        let g = TorusAut::linear(QuadOrder::EisensteinZw, neg_w_id).unwrap();
        assert!(g.as_real().pow(6).is_identity());
        assert!(!g.as_real().pow(3).is_identity());
        assert!(!g.as_real().pow(2).is_identity());
    }

    #[test]
    fn torsion_point_canonicalization() {
        let p = TorsionPoint::new(4, [2, 0, 0, 0]).unwrap();
        assert_eq!(p.level(), 2);
        assert_eq!(p.coords(), [1, 0, 0, 0]);
        let q = TorsionPoint::new(6, [2, 3, 0, 0]).unwrap();
        assert_eq!(q.level(), 6);
        let z = TorsionPoint::new(7, [7, 14, 0, -7]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, TorsionPoint::zero());
        let neg = TorsionPoint::new(5, [-1, 0, 0, 0]).unwrap();
        assert_eq!(neg.coords(), [4, 0, 0, 0]);
        assert!(TorsionPoint::new(0, [0; 4]).is_err());
    }

    #[test]
    fn apply_moves_torsion_points() {
        let f = fib_aut();
        let p = TorsionPoint::new(5, [1, 0, 1, 0]).unwrap();
        let q = f.apply(&p).unwrap();
        assert_eq!(q, TorsionPoint::new(5, [3, 0, 2, 0]).unwrap());
    }

    #[test]
    fn fixed_counts_for_the_fibonacci_matrix() {
        let f = fib_aut();
        let c1 = torus_fixed_count(&f, 1).unwrap();
        assert_eq!(c1, FixedCount::Finite(Integer::from(1)));
        let c2 = torus_fixed_count(&f, 2).unwrap();
        assert_eq!(c2, FixedCount::Finite(Integer::from(25)));
        let c3 = torus_fixed_count(&f, 3).unwrap();
        assert_eq!(c3, FixedCount::Finite(Integer::from(256)));
    }

    #[test]
    fn brute_force_oracle_matches_determinant_counts() {
        let f = fib_aut();
        // Any fixed point of f has level dividing det = 1, of f^2 level
        // dividing 5; enumerating a finer lattice must find the same counts.
        assert_eq!(brute_force_fixed_count(&f, 1, 1).unwrap(), 1);
        assert_eq!(brute_force_fixed_count(&f, 1, 5).unwrap(), 1);
        assert_eq!(brute_force_fixed_count(&f, 2, 5).unwrap(), 25);
        assert_eq!(brute_force_fixed_count(&f, 2, 25).unwrap(), 25);
    }

    #[test]
    fn smith_form_divisors_multiply_to_the_count() {
        let f = fib_aut();
        let a = f.as_real().pow(3).sub(&IntMatrix::identity(4));
        let (_, d, _) = a.smith_normal_form();
        let mut product = Integer::from(1);
        for i in 0..4 {
            product *= d.get(i, i);
        }
        assert_eq!(product.abs(), Integer::from(256));
    }

    #[test]
    fn eigenvalue_product_identity_matches_counts() {
        // Eigenvalues of the 2x2 matrix, each doubled by the diagonal action.
        let (tr, det) = (3.0f64, 1.0f64);
        let disc = (tr * tr - 4.0 * det).sqrt();
        let mu = [(tr + disc) / 2.0, (tr - disc) / 2.0];
        let f = fib_aut();
        for n in 1..=4u32 {
            let product: f64 = mu
                .iter()
                .map(|m| (m.powi(n as i32) - 1.0).powi(2))
                .product();
            let count = torus_fixed_count(&f, n).unwrap();
            let exact = count.finite().unwrap().to_f64();
            assert!(
                (product.abs() - exact).abs() < 1e-6 * exact.max(1.0),
                "n = {n}: {product} vs {exact}"
            );
        }
    }

    #[test]
    fn unipotent_map_has_infinite_fixed_locus() {
        let f = TorusAut::z2([[1, 1], [0, 1]], TorsionPoint::zero()).unwrap();
        assert_eq!(
            torus_fixed_count(&f, 1).unwrap(),
            FixedCount::InfiniteFixedLocus
        );
    }

    #[test]
    fn pure_translation_is_fixed_point_free() {
        let t = TorsionPoint::new(2, [1, 0, 0, 0]).unwrap();
        let f = TorusAut::z2([[1, 0], [0, 1]], t).unwrap();
        assert_eq!(
            torus_fixed_count(&f, 1).unwrap(),
            FixedCount::Finite(Integer::new())
        );
        // The square of a half-period translation is the identity.
        assert_eq!(
            torus_fixed_count(&f, 2).unwrap(),
            FixedCount::InfiniteFixedLocus
        );
    }

    #[test]
    fn translation_does_not_change_a_nonsingular_count() {
        let t = TorsionPoint::new(5, [1, 0, 0, 0]).unwrap();
        let f = TorusAut::z2([[2, 1], [1, 1]], t).unwrap();
        assert_eq!(
            torus_fixed_count(&f, 1).unwrap(),
            FixedCount::Finite(Integer::from(1))
        );
        // The unique fixed point has level dividing 5; the oracle finds it.
        assert_eq!(brute_force_fixed_count(&f, 1, 5).unwrap(), 1);
    }

    #[test]
    fn partially_singular_translation_cases() {
        // The shear (Z₁, Z₂) ↦ (Z₁, Z₁ + Z₂) + T has fixed points iff T₁ is
        // integral: a first-factor translation is fixed-point free, while a
        // second-factor translation leaves the circle Z₁ = -T₂ pointwise.
        let t_first = TorsionPoint::new(3, [1, 0, 0, 0]).unwrap();
        let t_second = TorsionPoint::new(3, [0, 0, 1, 0]).unwrap();
        let skew = TorusAut::z2([[1, 0], [1, 1]], t_first).unwrap();
        assert_eq!(
            torus_fixed_count(&skew, 1).unwrap(),
            FixedCount::Finite(Integer::new())
        );
        let sheared_circle = TorusAut::z2([[1, 0], [1, 1]], t_second).unwrap();
        assert_eq!(
            torus_fixed_count(&sheared_circle, 1).unwrap(),
            FixedCount::InfiniteFixedLocus
        );
    }

    #[test]
    fn torsion_orbit_in_five_torsion() {
        let g1 = fib_aut();
        let g2 = TorusAut::z2([[1, 1], [0, 1]], TorsionPoint::zero()).unwrap();
        let start = TorsionPoint::new(5, [1, 0, 0, 0]).unwrap();
        let orbit = torsion_orbit(&[g1.clone(), g2.clone()], &start, 100).unwrap();
        assert!(orbit.len() <= 624);
        assert!(orbit.iter().all(|p| 5 % p.level() == 0));
        assert!(orbit.contains(&start));
        for p in &orbit {
            assert!(orbit.contains(&g1.apply(p).unwrap()));
            assert!(orbit.contains(&g2.apply(p).unwrap()));
        }
    }

    #[test]
    fn orbit_of_origin_is_trivial_under_linear_maps() {
        let gens = [fib_aut()];
        let orbit = torsion_orbit(&gens, &TorsionPoint::zero(), 10).unwrap();
        assert_eq!(orbit, vec![TorsionPoint::zero()]);
    }

    #[test]
    fn mixed_levels_close_in_the_lcm_lattice() {
        let t = TorsionPoint::new(2, [1, 0, 0, 0]).unwrap();
        let shift = TorusAut::z2([[1, 0], [0, 1]], t).unwrap();
        let start = TorsionPoint::new(3, [1, 0, 0, 0]).unwrap();
        let orbit = torsion_orbit(&[shift], &start, 6).unwrap();
        assert_eq!(orbit.len(), 2);
        assert!(orbit.iter().all(|p| 6 % p.level() == 0));
        assert!(matches!(
            torsion_orbit(
                &[TorusAut::z2([[1, 0], [0, 1]], TorsionPoint::new(2, [1, 0, 0, 0]).unwrap())
                    .unwrap()],
                &TorsionPoint::new(3, [1, 0, 0, 0]).unwrap(),
                4
            ),
            Err(KummerError::LevelOverflow { level: 6, budget: 4 })
        ));
    }

    #[test]
    fn torsion_histogram_partitions_the_level_lattice() {
        let gens = [fib_aut()];
        let hist = torsion_orbit_histogram(&gens, 2, 16).unwrap();
        let total: usize = hist.iter().map(|(size, count)| size * count).sum();
        assert_eq!(total, 16);
        // The origin is fixed; everything else sits in nontrivial cycles.
        assert_eq!(hist.get(&1), Some(&1));
    }

    #[test]
    fn kummer_type_table() {
        use KummerVerdict::*;
        for order in [QuadOrder::Z2, QuadOrder::GaussianZi, QuadOrder::EisensteinZw] {
            assert_eq!(kummer_type_validate(order, 1).unwrap(), Valid(1));
            assert_eq!(kummer_type_validate(order, 2).unwrap(), Valid(2));
            assert_eq!(kummer_type_validate(order, 5).unwrap(), ExcludedByLemma44);
            assert_eq!(kummer_type_validate(order, 10).unwrap(), ExcludedByLemma44);
        }
        assert_eq!(
            kummer_type_validate(QuadOrder::GaussianZi, 4).unwrap(),
            Valid(3)
        );
        assert_eq!(
            kummer_type_validate(QuadOrder::EisensteinZw, 3).unwrap(),
            Valid(4)
        );
        assert_eq!(
            kummer_type_validate(QuadOrder::EisensteinZw, 6).unwrap(),
            Valid(5)
        );
        assert_eq!(kummer_type_validate(QuadOrder::GaussianZi, 3).unwrap(), Invalid);
        assert_eq!(kummer_type_validate(QuadOrder::Z2, 4).unwrap(), Invalid);
        assert_eq!(kummer_type_validate(QuadOrder::Z2, 6).unwrap(), Invalid);
        assert_eq!(kummer_type_validate(QuadOrder::GaussianZi, 6).unwrap(), Invalid);
        assert_eq!(kummer_type_validate(QuadOrder::Z2, 12).unwrap(), Invalid);
        assert!(kummer_type_validate(QuadOrder::Z2, 0).is_err());
    }

    #[test]
    fn hirzebruch_jung_strings() {
        let s52 = CyclicSingularity::new(5, 2).unwrap();
        assert_eq!(hirzebruch_jung(&s52), vec![3, 2]);
        let s21 = CyclicSingularity::new(2, 1).unwrap();
        assert_eq!(hirzebruch_jung(&s21), vec![2]);
        let s31 = CyclicSingularity::new(3, 1).unwrap();
        assert_eq!(hirzebruch_jung(&s31), vec![3]);
        let s73 = CyclicSingularity::new(7, 3).unwrap();
        assert_eq!(hirzebruch_jung(&s73), vec![3, 2, 2]);
    }

    #[test]
    fn cyclic_singularity_input_validation() {
        assert!(CyclicSingularity::new(4, 2).is_err());
        assert!(CyclicSingularity::new(5, 5).is_err());
        assert!(CyclicSingularity::new(5, 0).is_err());
        assert!(CyclicSingularity::new(1, 1).is_err());
    }

    #[test]
    fn hirzebruch_jung_reconstructs_all_small_fractions() {
        for n in 2..60u64 {
            for q in 1..n {
                if gcd_u64(n, q) != 1 {
                    continue;
                }
                let s = CyclicSingularity::new(n, q).unwrap();
                let string = hirzebruch_jung(&s);
                assert!(string.iter().all(|&b| b >= 2));
                assert_eq!(hj_evaluate(&string), (n, q));
            }
        }
    }

    #[test]
    fn atlas_frozen_exponent_data() {
        let atlas = chart_atlas();
        assert_eq!(atlas.transition(0).column(0), [0, -1]);
        assert_eq!(atlas.transition(0).column(1), [1, 3]);
        assert_eq!(atlas.transition(1).column(0), [0, -1]);
        assert_eq!(atlas.transition(1).column(1), [1, 2]);
        assert_eq!(atlas.transition(0).det(), 1);
        assert_eq!(atlas.transition(1).det(), 1);
        assert_eq!(atlas.quotient_exp(0), [5, 0]);
        assert_eq!(atlas.quotient_exp(1), [3, 1]);
        assert_eq!(atlas.quotient_exp(2), [1, 2]);
        assert_eq!(atlas.quotient_exp(3), [0, 5]);
    }

    #[test]
    fn atlas_composite_and_chart_expressions() {
        let atlas = chart_atlas();
        let composite = atlas.transition(0).then(atlas.transition(1));
        assert_eq!(composite.column(1), [2, 5]);
        // u₀ = v₀ = v₁³w₁; u₃ = w₂ = v₀²w₀⁵.
        assert_eq!(atlas.coord_in_chart(atlas.quotient_exp(0), 0), Some([1, 0]));
        assert_eq!(atlas.coord_in_chart(atlas.quotient_exp(0), 1), Some([3, 1]));
        assert_eq!(atlas.coord_in_chart(atlas.quotient_exp(3), 0), Some([2, 5]));
        assert_eq!(atlas.coord_in_chart(atlas.quotient_exp(3), 2), Some([0, 1]));
        // u₁ = v₀w₀ and u₂ = v₀w₀².
        assert_eq!(atlas.coord_in_chart(atlas.quotient_exp(1), 0), Some([1, 1]));
        assert_eq!(atlas.coord_in_chart(atlas.quotient_exp(2), 0), Some([1, 2]));
        // A non-monomial: x itself is no monomial in the invariants' chart.
        assert_eq!(atlas.coord_in_chart([1, 0], 0), None);
    }

    #[test]
    fn multipliers_match_the_chart_weights() {
        let atlas = chart_atlas();
        let w0 = equivariant_multiplier(atlas.chart_coord_exps(0)[1]);
        assert_eq!((w0.alpha_exp, w0.beta_exp), (-2, 1));
        assert!(w0.is_contracting(2.0, 0.5));
        assert!((w0.magnitude(2.0, 0.5) - 0.125).abs() < 1e-15);
        let w1 = equivariant_multiplier(atlas.chart_coord_exps(1)[1]);
        assert_eq!((w1.alpha_exp, w1.beta_exp), (-1, 3));
        assert!(w1.is_contracting(2.0, 0.5));
        let v0 = equivariant_multiplier(atlas.chart_coord_exps(0)[0]);
        assert_eq!((v0.alpha_exp, v0.beta_exp), (5, 0));
        assert!(v0.is_expanding(2.0, 0.5));
        assert!((v0.magnitude(2.0, 0.5) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn exceptional_curves_carry_two_saddles_each() {
        let atlas = chart_atlas();
        let reports = exceptional_fixed_points(&atlas, 2.0, 0.5).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert_eq!(r.fixed_points, 2);
            assert!(r.saddle);
            assert!(r.transverse_magnitude > 1.0);
        }
        assert!((reports[0].tangent_magnitude - 0.125).abs() < 1e-15);
        assert!((reports[1].tangent_magnitude - 0.0625).abs() < 1e-15);
        assert!(matches!(
            exceptional_fixed_points(&atlas, 0.9, 0.5),
            Err(KummerError::PreconditionViolated(_))
        ));
        assert!(matches!(
            exceptional_fixed_points(&atlas, 2.0, 1.5),
            Err(KummerError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn order_parsing_round_trip() {
        for (s, o) in [
            ("Z2", QuadOrder::Z2),
            ("Zi", QuadOrder::GaussianZi),
            ("Zw", QuadOrder::EisensteinZw),
        ] {
            assert_eq!(s.parse::<QuadOrder>().unwrap(), o);
        }
        assert!("Z3".parse::<QuadOrder>().is_err());
    }
}

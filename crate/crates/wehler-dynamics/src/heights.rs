//! Weil heights, canonical heights along loxodromic words, and
//! stationary heights for random products of involutions.
//!
//! Heights of rational points on (P^1)^3 decompose coordinatewise, so
//! a real divisor class w = a1 c1 + a2 c2 + a3 c3 has the height
//! h_w = a1 h(x) + a2 h(y) + a3 h(z) with no correction term; that
//! makes additivity in w hold by definition rather than up to a
//! bounded error. Canonical heights are finite-stage Tate limits
//! h(f^n pt) / lambda^n against the boundary class of the word, and
//! stationary heights average a depth-d tree of word applications
//! against a certified eigenclass. All reported error bars are
//! geometric tail bounds whose leading constant is estimated from the
//! first two successive differences with a safety factor of four;
//! they are honest but heuristic, and reports say so.
//!
//! Coordinate growth under the involutions is roughly quadratic per
//! letter, so every iterating operation carries a digit budget and
//! fails with HeightOverflow instead of grinding on gigantic
//! integers.

use std::collections::{BTreeSet, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::numcore::{ln_max_abs, Integer, ProjPoint1};
use crate::nsgeom::{
    classify_isometry, theta_pair, wehler_kappa0, wehler_ns_rep, word_isometry, IsometryType,
    MeasureSpec, NsError, RealClass,
};
use crate::orbits::GroupWord;
use crate::wehler::{SurfacePointQ, WehlerError, WehlerSurface};

/// Errors from height computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeightError {
    /// Coordinate sizes exceeded the digit budget.
    #[error("coordinates reached about {digits} digits, over the budget of {budget}")]
    HeightOverflow { digits: u64, budget: u64 },
    /// The evaluation tree exceeded its node budget.
    #[error("stationary tree exceeded the budget of {budget} nodes")]
    BranchBudget { budget: u64 },
    /// The starting point is periodic, so growth estimation is
    /// meaningless.
    #[error("the point is periodic under the word")]
    PeriodicPoint,
    /// A stated hypothesis fails.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    /// Involution arithmetic failed (off the surface, contained
    /// fiber, ...).
    #[error(transparent)]
    Surface(#[from] WehlerError),
    /// Lattice geometry failed (non-loxodromic word, ...).
    #[error(transparent)]
    Lattice(#[from] NsError),
}

/// A height estimate with an explicit error bar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub value: f64,
    pub error: f64,
}

/// Resource limits for iterating computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeightBudget {
    /// Maximum decimal digits of any coordinate integer.
    pub max_digits: u64,
    /// Maximum evaluated nodes in the stationary tree.
    pub max_nodes: u64,
}

impl Default for HeightBudget {
    fn default() -> Self {
        HeightBudget {
            max_digits: 10_000_000,
            max_nodes: 1_000_000,
        }
    }
}

impl HeightBudget {
    fn check_point(&self, pt: &SurfacePointQ) -> Result<(), HeightError> {
        // Digits from bit length; 1 bit is log10(2) digits.
        let mut bits = 0u32;
        for axis in 1..=3u8 {
            let c = pt.coord(axis);
            bits = bits.max(c.a().significant_bits());
            bits = bits.max(c.b().significant_bits());
        }
        let digits = (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as u64;
        if digits > self.max_digits {
            return Err(HeightError::HeightOverflow {
                digits,
                budget: self.max_digits,
            });
        }
        Ok(())
    }
}

/// Real coefficients (a1, a2, a3) of a divisor class on the three
/// fibration generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWeights {
    pub a: [f64; 3],
}

impl ClassWeights {
    pub fn new(a: [f64; 3]) -> Self {
        ClassWeights { a }
    }

    /// The ample class c1 + c2 + c3.
    pub fn ample() -> Self {
        ClassWeights { a: [1.0, 1.0, 1.0] }
    }

    pub fn from_real_class(class: &RealClass) -> Result<Self, HeightError> {
        let coords: [f64; 3] = class.coords.as_slice().try_into().map_err(|_| {
            HeightError::PreconditionViolated("class weights need exactly three coordinates".into())
        })?;
        Ok(ClassWeights { a: coords })
    }

    pub fn add(&self, rhs: &ClassWeights) -> ClassWeights {
        ClassWeights {
            a: [
                self.a[0] + rhs.a[0],
                self.a[1] + rhs.a[1],
                self.a[2] + rhs.a[2],
            ],
        }
    }
}

/// Logarithmic Weil height of a point of P^1: log max(|a|, |b|) on
/// the canonical coprime representative.
pub fn naive_height(p: &ProjPoint1) -> f64 {
    ln_max_abs(p.a(), p.b())
}

/// Height of a surface point against a real divisor class, as the
/// weighted sum of coordinate heights. Additive in the class by
/// construction; the only slack is f64 rounding.
pub fn class_height(w: &ClassWeights, pt: &SurfacePointQ) -> f64 {
    w.a[0] * naive_height(pt.coord(1))
        + w.a[1] * naive_height(pt.coord(2))
        + w.a[2] * naive_height(pt.coord(3))
}

/// Which canonical height of a loxodromic word: forward (contracting
/// towards theta_plus) or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightSign {
    Plus,
    Minus,
}

/// Canonical height of a rational point along a loxodromic word,
/// computed as the n-th Tate stage lambda^{-n} h_theta(f^{+-n} pt).
///
/// The reported error is the geometric tail C lambda^{-n}/(1 - 1/lambda)
/// with C = 4 max(d0 lambda, d1 lambda^2) estimated from the first
/// two successive differences d_k = |v_{k+1} - v_k|; heuristic, but
/// checked in anger by the equivariance and periodicity tests.
pub fn cyclic_canonical_height(
    s: &WehlerSurface,
    word: &GroupWord,
    sign: HeightSign,
    pt: &SurfacePointQ,
    n: u32,
    budget: &HeightBudget,
) -> Result<HeightValue, HeightError> {
    if n < 2 {
        return Err(HeightError::PreconditionViolated(
            "need at least two iterations".into(),
        ));
    }
    let iso = word_isometry(word);
    let lambda = match classify_isometry(&iso) {
        IsometryType::Loxodromic { lambda, .. } => lambda,
        _ => return Err(NsError::NotLoxodromic.into()),
    };
    let (form, _) = wehler_ns_rep();
    let kappa0 = wehler_kappa0();
    let (theta_plus, theta_minus, _) = theta_pair(&form, &iso, &kappa0, 1e-12)?;
    let (theta, step) = match sign {
        HeightSign::Plus => (theta_plus, word.clone()),
        HeightSign::Minus => (theta_minus, word.inverse()),
    };
    let w = ClassWeights::from_real_class(&theta)?;
    budget.check_point(pt)?;
    let mut cur = pt.clone();
    let mut vals = Vec::with_capacity(n as usize + 1);
    vals.push(class_height(&w, &cur));
    for k in 1..=n {
        cur = step.apply_q(s, &cur)?;
        budget.check_point(&cur)?;
        vals.push(lambda.powi(-(k as i32)) * class_height(&w, &cur));
    }
    let d0 = (vals[1] - vals[0]).abs();
    let d1 = (vals[2] - vals[1]).abs();
    let c = 4.0 * (d0 * lambda).max(d1 * lambda * lambda);
    let error = c * lambda.powi(-(n as i32)) / (1.0 - 1.0 / lambda);
    Ok(HeightValue {
        value: vals[n as usize],
        error,
    })
}

struct TreeEval<'a> {
    surface: &'a WehlerSurface,
    measure: &'a MeasureSpec,
    weights: Vec<f64>,
    class: &'a ClassWeights,
    alpha: f64,
    budget: &'a HeightBudget,
    memo: HashMap<(Vec<u8>, u32), f64>,
    nodes: u64,
}

impl TreeEval<'_> {
    fn eval(&mut self, pt: &SurfacePointQ, depth: u32) -> Result<f64, HeightError> {
        let key = (pt.canonical_bytes(), depth);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(HeightError::BranchBudget {
                budget: self.budget.max_nodes,
            });
        }
        self.budget.check_point(pt)?;
        let v = if depth == 0 {
            class_height(self.class, pt)
        } else {
            // Fixed summation order keeps results independent of any
            // evaluation strategy.
            let mut acc = 0.0;
            for (i, word) in self.measure.support().iter().enumerate() {
                let image = word.apply_q(self.surface, pt)?;
                acc += self.weights[i] * self.eval(&image, depth - 1)?;
            }
            acc / self.alpha
        };
        self.memo.insert(key, v);
        Ok(v)
    }
}

/// Stationary height of a point for a measure on words: the depth-d
/// stage alpha^{-d} sum over length-d word paths of path-weight times
/// h_w at the transported point, evaluated as a memoized tree.
///
/// (w, alpha) must come from a stationary eigenclass with alpha > 1
/// (dominant_eigen or verify_rational_stationary); the error bar is
/// the geometric tail C alpha/(alpha - 1) alpha^{-depth} with C
/// estimated exactly like the cyclic case.
pub fn stationary_height(
    s: &WehlerSurface,
    measure: &MeasureSpec,
    w: &ClassWeights,
    alpha: f64,
    pt: &SurfacePointQ,
    depth: u32,
    budget: &HeightBudget,
) -> Result<HeightValue, HeightError> {
    if !(alpha > 1.0) {
        return Err(HeightError::PreconditionViolated(
            "stationary eigenvalue must exceed 1".into(),
        ));
    }
    if depth < 2 {
        return Err(HeightError::PreconditionViolated(
            "need depth at least two".into(),
        ));
    }
    let mut tree = TreeEval {
        surface: s,
        measure,
        weights: measure.weights().iter().map(|r| r.to_f64()).collect(),
        class: w,
        alpha,
        budget,
        memo: HashMap::new(),
        nodes: 0,
    };
    let h0 = tree.eval(pt, 0)?;
    let h1 = tree.eval(pt, 1)?;
    let h2 = tree.eval(pt, 2)?;
    let value = tree.eval(pt, depth)?;
    let c = 4.0 * ((h1 - h0).abs() * alpha).max((h2 - h1).abs() * alpha * alpha);
    let error = c * alpha / (alpha - 1.0) * alpha.powi(-(depth as i32));
    Ok(HeightValue { value, error })
}

/// Empirical growth rate of the ample height along a word: the ratio
/// h(f^n pt) / h(f^{n-1} pt). For loxodromic words on points of
/// positive canonical height this converges to lambda; for parabolic
/// words it tends to 1. Periodicity is detected by revisiting a point
/// during the iteration and reported as an error rather than a bogus
/// ratio.
pub fn growth_estimate_lambda(
    s: &WehlerSurface,
    word: &GroupWord,
    pt: &SurfacePointQ,
    n: u32,
    budget: &HeightBudget,
) -> Result<f64, HeightError> {
    if n < 3 {
        return Err(HeightError::PreconditionViolated(
            "need at least three iterations".into(),
        ));
    }
    budget.check_point(pt)?;
    let mut seen: BTreeSet<Vec<u8>> = BTreeSet::new();
    seen.insert(pt.canonical_bytes());
    let ample = ClassWeights::ample();
    let mut cur = pt.clone();
    let mut prev_height = 0.0;
    for k in 1..=n {
        cur = word.apply_q(s, &cur)?;
        budget.check_point(&cur)?;
        if !seen.insert(cur.canonical_bytes()) {
            return Err(HeightError::PeriodicPoint);
        }
        if k == n - 1 {
            prev_height = class_height(&ample, &cur);
        }
    }
    if prev_height <= 1e-9 {
        return Err(HeightError::PreconditionViolated(
            "ample height is not growing from this start".into(),
        ));
    }
    Ok(class_height(&ample, &cur) / prev_height)
}

/// Verdict attached to a height report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeightVerdict {
    /// h_plus + h_minus is zero within the combined error bars, the
    /// signature of periodic points and points on invariant curves.
    #[serde(rename = "periodic-candidate")]
    PeriodicCandidate,
    /// The height sum is positive beyond the error bars.
    #[serde(rename = "positive")]
    Positive,
}

/// Canonical height report for one point under one word: both
/// one-sided heights plus the periodicity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightReport {
    pub point: SurfacePointQ,
    pub word: Vec<u8>,
    pub hplus: HeightValue,
    pub hminus: HeightValue,
    pub verdict: HeightVerdict,
}

/// Compute both canonical heights of a point and classify it. The
/// verdict is periodic-candidate exactly when h_plus + h_minus is
/// compatible with zero at the reported error bars.
pub fn height_report(
    s: &WehlerSurface,
    word: &GroupWord,
    pt: &SurfacePointQ,
    n: u32,
    budget: &HeightBudget,
) -> Result<HeightReport, HeightError> {
    let hplus = cyclic_canonical_height(s, word, HeightSign::Plus, pt, n, budget)?;
    let hminus = cyclic_canonical_height(s, word, HeightSign::Minus, pt, n, budget)?;
    let verdict = if hplus.value + hminus.value <= hplus.error + hminus.error {
        HeightVerdict::PeriodicCandidate
    } else {
        HeightVerdict::Positive
    };
    Ok(HeightReport {
        point: pt.clone(),
        word: word.letters().to_vec(),
        hplus,
        hminus,
        verdict,
    })
}

impl Serialize for HeightReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let point: Vec<[serde_json::Number; 2]> = (1..=3u8)
            .map(|axis| {
                let c = self.point.coord(axis);
                [
                    serde_json::Number::from_string_unchecked(c.a().to_string()),
                    serde_json::Number::from_string_unchecked(c.b().to_string()),
                ]
            })
            .collect();
        let mut st = serializer.serialize_struct("HeightReport", 5)?;
        st.serialize_field("point", &point)?;
        st.serialize_field("word", &self.word)?;
        st.serialize_field("hplus", &self.hplus)?;
        st.serialize_field("hminus", &self.hminus)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HeightReport {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            point: Vec<[serde_json::Number; 2]>,
            word: Vec<u8>,
            hplus: HeightValue,
            hminus: HeightValue,
            verdict: HeightVerdict,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.point.len() != 3 {
            return Err(D::Error::custom("point needs three coordinates"));
        }
        let mut coords = Vec::with_capacity(3);
        for pair in &raw.point {
            let parse = |n: &serde_json::Number| -> Result<Integer, D::Error> {
                n.to_string()
                    .parse::<Integer>()
                    .map_err(|e| D::Error::custom(format!("bad integer coordinate: {e}")))
            };
            let p = ProjPoint1::new(parse(&pair[0])?, parse(&pair[1])?)
                .map_err(|e| D::Error::custom(e.to_string()))?;
            coords.push(p);
        }
        let z = coords.pop().expect("three coords");
        let y = coords.pop().expect("three coords");
        let x = coords.pop().expect("three coords");
        Ok(HeightReport {
            point: SurfacePointQ::new(x, y, z),
            word: raw.word,
            hplus: raw.hplus,
            hminus: raw.hminus,
            verdict: raw.verdict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Rational;
    use crate::wehler::{orbit8_corners, orbit8_family, BaseField};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn rat(v: i64) -> Rational {
        Rational::from(v)
    }

    fn word(letters: &[u8]) -> GroupWord {
        GroupWord::new(letters.to_vec()).unwrap()
    }

    fn all_ones_orbit8() -> WehlerSurface {
        let mut free = BTreeMap::new();
        for i in 0..3u8 {
            for j in 0..3u8 {
                for k in 0..3u8 {
                    if i == 1 || j == 1 || k == 1 {
                        free.insert((i, j, k), rat(1));
                    }
                }
            }
        }
        orbit8_family(&free).unwrap()
    }

    /// Every coefficient nonzero, passing through ((0:1),(1:1),(1:1)).
    fn generic_surface() -> (WehlerSurface, SurfacePointQ) {
        let mut entries = BTreeMap::new();
        let mut v = 1i64;
        for i in 0..3u8 {
            for j in 0..3u8 {
                for k in 0..3u8 {
                    if (i, j, k) == (0, 2, 2) {
                        continue;
                    }
                    entries.insert((i, j, k), rat(v));
                    v += 1;
                }
            }
        }
        let balance: i64 = -(1..=8).sum::<i64>();
        entries.insert((0, 2, 2), rat(balance));
        let s = WehlerSurface::from_map("generic", BaseField::Q, &entries).unwrap();
        let base = SurfacePointQ::new(
            ProjPoint1::zero(),
            ProjPoint1::from_pair(1, 1).unwrap(),
            ProjPoint1::from_pair(1, 1).unwrap(),
        );
        assert!(s.is_on_surface_q(&base));
        (s, base)
    }

    #[test]
    fn naive_height_frozen_values() {
        let p = ProjPoint1::from_pair(2, 3).unwrap();
        assert!((naive_height(&p) - 3f64.ln()).abs() <= 1e-15);
        assert_eq!(naive_height(&ProjPoint1::infinity()), 0.0);
        assert_eq!(naive_height(&ProjPoint1::zero()), 0.0);
        let p = ProjPoint1::from_pair(355, 113).unwrap();
        assert!((naive_height(&p) - 355f64.ln()).abs() <= 1e-15);
        // Heights see the canonical representative, so scaling is
        // invisible.
        let p = ProjPoint1::from_pair(4, 6).unwrap();
        assert!((naive_height(&p) - 3f64.ln()).abs() <= 1e-15);
    }

    #[test]
    fn class_height_weighted_sums() {
        let pt = SurfacePointQ::new(
            ProjPoint1::from_pair(1, 2).unwrap(),
            ProjPoint1::zero(),
            ProjPoint1::from_pair(1, 1).unwrap(),
        );
        let h = class_height(&ClassWeights::ample(), &pt);
        assert!((h - 2f64.ln()).abs() <= 1e-15);
        assert_eq!(class_height(&ClassWeights::new([0.0; 3]), &pt), 0.0);
        // The polarization 2 c1 + 2 c2 + 2 c3 doubles the ample height.
        let h2 = class_height(&ClassWeights::new([2.0; 3]), &pt);
        assert!((h2 - 2.0 * 2f64.ln()).abs() <= 1e-15);
        // Basis classes add with no rounding at all.
        let c1 = ClassWeights::new([1.0, 0.0, 0.0]);
        let c2 = ClassWeights::new([0.0, 1.0, 0.0]);
        assert_eq!(
            class_height(&c1.add(&c2), &pt),
            class_height(&c1, &pt) + class_height(&c2, &pt)
        );
    }

    proptest! {
        #[test]
        fn class_height_is_additive_up_to_rounding(
            ax in -8i64..8, bx in 1i64..9,
            w1 in proptest::array::uniform3(-4.0f64..4.0),
            w2 in proptest::array::uniform3(-4.0f64..4.0),
        ) {
            let pt = SurfacePointQ::new(
                ProjPoint1::from_pair(ax, bx).unwrap(),
                ProjPoint1::from_pair(ax + 7, bx + 3).unwrap(),
                ProjPoint1::from_pair(9, 1).unwrap(),
            );
            let a = ClassWeights::new(w1);
            let b = ClassWeights::new(w2);
            let lhs = class_height(&a.add(&b), &pt);
            let rhs = class_height(&a, &pt) + class_height(&b, &pt);
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn canonical_height_vanishes_on_the_eight_point_orbit() {
        let s = all_ones_orbit8();
        let f = word(&[3, 2, 1]);
        let budget = HeightBudget::default();
        for pt in orbit8_corners() {
            let report = height_report(&s, &f, &pt, 4, &budget).unwrap();
            assert!(report.hplus.value.abs() <= report.hplus.error.max(1e-12));
            assert!(report.hminus.value.abs() <= report.hminus.error.max(1e-12));
            assert_eq!(report.verdict, HeightVerdict::PeriodicCandidate);
        }
    }

    #[test]
    fn canonical_height_equivariance_and_positivity() {
        let (s, base) = generic_surface();
        let f = word(&[3, 2, 1]);
        let budget = HeightBudget::default();
        let lambda = 17.944271909999159;
        let h_base = cyclic_canonical_height(&s, &f, HeightSign::Plus, &base, 4, &budget).unwrap();
        let image = f.apply_q(&s, &base).unwrap();
        let h_image =
            cyclic_canonical_height(&s, &f, HeightSign::Plus, &image, 4, &budget).unwrap();
        // h+(f pt) = lambda h+(pt) within the combined error bars.
        let slack = h_image.error + lambda * h_base.error;
        assert!(
            (h_image.value - lambda * h_base.value).abs() <= slack,
            "equivariance defect {} vs slack {}",
            (h_image.value - lambda * h_base.value).abs(),
            slack
        );
        // Nonnegativity within error on both signs, and this point is
        // genuinely non-periodic.
        let report = height_report(&s, &f, &base, 4, &budget).unwrap();
        assert!(report.hplus.value >= -report.hplus.error);
        assert!(report.hminus.value >= -report.hminus.error);
        assert_eq!(report.verdict, HeightVerdict::Positive);
    }

    #[test]
    fn canonical_height_estimates_converge_geometrically() {
        let (s, base) = generic_surface();
        let f = word(&[3, 2, 1]);
        let budget = HeightBudget::default();
        let lambda = 17.944271909999159;
        let h3 = cyclic_canonical_height(&s, &f, HeightSign::Plus, &base, 3, &budget).unwrap();
        let h4 = cyclic_canonical_height(&s, &f, HeightSign::Plus, &base, 4, &budget).unwrap();
        let h5 = cyclic_canonical_height(&s, &f, HeightSign::Plus, &base, 5, &budget).unwrap();
        // Successive stages differ by a shrinking amount.
        let d34 = (h4.value - h3.value).abs();
        let d45 = (h5.value - h4.value).abs();
        assert!(d45 <= d34 / 2.0, "d34 = {d34}, d45 = {d45}");
        // Error bars shrink by about a factor lambda per extra stage.
        assert!(h5.error <= h4.error / lambda * 1.5);
        assert!(h4.error <= h3.error / lambda * 1.5);
        // The three values agree within the coarsest error bar.
        assert!((h5.value - h3.value).abs() <= h3.error);
    }

    #[test]
    fn cyclic_height_rejects_bad_inputs() {
        let (s, base) = generic_surface();
        let budget = HeightBudget::default();
        // Parabolic words have no canonical height pair.
        let err = cyclic_canonical_height(&s, &word(&[2, 1]), HeightSign::Plus, &base, 4, &budget)
            .unwrap_err();
        assert_eq!(err, HeightError::Lattice(NsError::NotLoxodromic));
        // Too few iterations.
        assert!(matches!(
            cyclic_canonical_height(&s, &word(&[3, 2, 1]), HeightSign::Plus, &base, 1, &budget),
            Err(HeightError::PreconditionViolated(_))
        ));
        // A tiny digit budget trips the overflow guard.
        let tiny = HeightBudget {
            max_digits: 8,
            max_nodes: 1_000_000,
        };
        assert!(matches!(
            cyclic_canonical_height(&s, &word(&[3, 2, 1]), HeightSign::Plus, &base, 5, &tiny),
            Err(HeightError::HeightOverflow { .. })
        ));
    }

    #[test]
    fn stationary_height_vanishes_on_finite_orbits() {
        let s = all_ones_orbit8();
        let measure = MeasureSpec::uniform(vec![word(&[2, 1]), word(&[3, 2])]).unwrap();
        // Certified pair for this measure: alpha = 3, w = (1,0,1)
        // normalized; exact rational form works too.
        let w = ClassWeights::new([1.0, 0.0, 1.0]);
        let budget = HeightBudget::default();
        for pt in orbit8_corners() {
            let h = stationary_height(&s, &measure, &w, 3.0, &pt, 6, &budget).unwrap();
            assert!(h.value.abs() <= h.error.max(1e-12));
        }
    }

    #[test]
    fn stationary_height_satisfies_the_eigen_relation() {
        let (s, base) = generic_surface();
        let measure = MeasureSpec::uniform(vec![word(&[2, 1]), word(&[3, 2])]).unwrap();
        let w = ClassWeights::new([1.0, 0.0, 1.0]);
        let alpha = 3.0;
        let budget = HeightBudget::default();
        let depth = 8;
        let h = stationary_height(&s, &measure, &w, alpha, &base, depth, &budget).unwrap();
        // alpha h(pt) = sum of weights h(word pt) within errors.
        let mut rhs = 0.0;
        let mut rhs_err = 0.0;
        for (wd, weight) in measure.support().iter().zip(measure.weights()) {
            let image = wd.apply_q(&s, &base).unwrap();
            let hi = stationary_height(&s, &measure, &w, alpha, &image, depth, &budget).unwrap();
            rhs += weight.to_f64() * hi.value;
            rhs_err += weight.to_f64() * hi.error;
        }
        let defect = (alpha * h.value - rhs).abs();
        let slack = alpha * h.error + rhs_err;
        assert!(defect <= slack, "defect {defect} vs slack {slack}");
        assert!(h.value > 0.0);
    }

    #[test]
    fn stationary_height_decomposes_on_the_invariant_plane() {
        // nu = (delta_f + delta_{f^{-1}})/2 with w = c1 + 2 c2 + c3,
        // the exact 9-eigenvector: the stationary height is the
        // matching combination a h+ + b h- of the two canonical
        // heights, where w = a theta+ + b theta- on the invariant
        // plane.
        let (s, base) = generic_surface();
        let f = word(&[3, 2, 1]);
        let measure = MeasureSpec::uniform(vec![f.clone(), f.inverse()]).unwrap();
        let w = ClassWeights::new([1.0, 2.0, 1.0]);
        let budget = HeightBudget::default();
        let h = stationary_height(&s, &measure, &w, 9.0, &base, 4, &budget).unwrap();
        // Decompose w in the theta basis via isotropy of the thetas.
        let (form, _) = wehler_ns_rep();
        let kappa0 = wehler_kappa0();
        let iso = word_isometry(&f);
        let (tp, tm, _) = theta_pair(&form, &iso, &kappa0, 1e-12).unwrap();
        let wr = [1.0, 2.0, 1.0];
        let pairing = form.pair_real(&tp.coords, &tm.coords);
        let a = form.pair_real(&wr, &tm.coords) / pairing;
        let b = form.pair_real(&wr, &tp.coords) / pairing;
        let hp = cyclic_canonical_height(&s, &f, HeightSign::Plus, &base, 5, &budget).unwrap();
        let hm = cyclic_canonical_height(&s, &f, HeightSign::Minus, &base, 5, &budget).unwrap();
        let combo = a * hp.value + b * hm.value;
        let slack = h.error + a.abs() * hp.error + b.abs() * hm.error + 1e-6;
        assert!(
            (h.value - combo).abs() <= slack,
            "stationary {} vs combination {} (slack {slack})",
            h.value,
            combo
        );
    }

    #[test]
    fn stationary_height_budget_and_precondition_errors() {
        let (s, base) = generic_surface();
        let measure = MeasureSpec::uniform(vec![word(&[2, 1]), word(&[3, 2])]).unwrap();
        let w = ClassWeights::new([1.0, 0.0, 1.0]);
        let tight = HeightBudget {
            max_digits: 10_000_000,
            max_nodes: 3,
        };
        assert!(matches!(
            stationary_height(&s, &measure, &w, 3.0, &base, 6, &tight),
            Err(HeightError::BranchBudget { budget: 3 })
        ));
        assert!(matches!(
            stationary_height(&s, &measure, &w, 0.9, &base, 6, &HeightBudget::default()),
            Err(HeightError::PreconditionViolated(_))
        ));
        assert!(matches!(
            stationary_height(&s, &measure, &w, 3.0, &base, 1, &HeightBudget::default()),
            Err(HeightError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn growth_ratio_approaches_lambda_and_one() {
        let (s, base) = generic_surface();
        let budget = HeightBudget::default();
        // Loxodromic word: ratio near lambda = 17.944 by stage five.
        let ratio = growth_estimate_lambda(&s, &word(&[3, 2, 1]), &base, 5, &budget).unwrap();
        assert!(
            (ratio - 17.944271909999159).abs() <= 0.15 * 17.944271909999159,
            "ratio = {ratio}"
        );
        // Parabolic word: polynomial growth, so the ratio hugs 1.
        let ratio = growth_estimate_lambda(&s, &word(&[2, 1]), &base, 8, &budget).unwrap();
        assert!((ratio - 1.0).abs() <= 0.5, "ratio = {ratio}");
        // Periodic points are flagged, not averaged.
        let s8 = all_ones_orbit8();
        let corner = orbit8_corners().into_iter().next().unwrap();
        assert_eq!(
            growth_estimate_lambda(&s8, &word(&[3, 2, 1]), &corner, 4, &budget).unwrap_err(),
            HeightError::PeriodicPoint
        );
        // n < 3 is refused.
        assert!(matches!(
            growth_estimate_lambda(&s, &word(&[3, 2, 1]), &base, 2, &budget),
            Err(HeightError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn height_report_json_shape_and_round_trip() {
        let s = all_ones_orbit8();
        let f = word(&[3, 2, 1]);
        let corner = orbit8_corners().into_iter().next().unwrap();
        let report = height_report(&s, &f, &corner, 4, &HeightBudget::default()).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(value.get("point").is_some());
        assert_eq!(value["word"], serde_json::json!([3, 2, 1]));
        assert!(value["hplus"].get("value").is_some());
        assert!(value["hplus"].get("error").is_some());
        assert_eq!(value["verdict"], "periodic-candidate");
        assert_eq!(value["point"].as_array().unwrap().len(), 3);
        let back: HeightReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}

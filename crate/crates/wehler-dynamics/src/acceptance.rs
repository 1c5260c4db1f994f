//! The self-check suite behind `wehler-dynamics acceptance`: thirteen
//! numbered criteria, each re-deriving a frozen fact of the Wehler
//! dynamical system through an independent route and comparing exactly
//! where exact comparison is possible.
//!
//! Structure of every criterion: deterministic inputs (bundled data
//! files plus draws from one seeded, versioned generator), a
//! computation through the public library API, and a verdict with a
//! human-readable detail line. Floating comparisons use per-criterion
//! default tolerances unless [`AcceptanceConfig::tol_override`]
//! replaces them; exact integer and rational comparisons ignore the
//! override, which is how a zero override separates the exact checks
//! from the floating ones. Internal convergence controls (power
//! iteration tolerances) are computation parameters, not acceptance
//! tolerances, and are never overridden.
//!
//! Each criterion also carries a wall-clock allowance; blowing the
//! allowance fails the criterion, since the bounds are part of the
//! contract that these checks stay cheap enough to run everywhere.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rug::ops::RemRounding;
use rug::{Integer, Rational};

use crate::heights::{
    cyclic_canonical_height, growth_estimate_lambda, stationary_height, ClassWeights,
    HeightBudget, HeightSign,
};
use crate::kummer::{
    brute_force_fixed_count, chart_atlas, equivariant_multiplier, exceptional_fixed_points,
    hirzebruch_jung, torus_fixed_count, CyclicSingularity, FixedCount, TorsionPoint, TorusAut,
};
use crate::nsgeom::{
    classify_word_record, dominant_eigen, stationary_operator, verify_rational_stationary,
    wehler_gram, wehler_kappa0, word_matrix, IsometryType, LatticeForm, MeasureSpec,
};
use crate::numcore::{IntMatrix, IntPolynomial, ProjPoint1, QMatrix};
use crate::orbits::{orbit_closure, fp_orbit_partition, fp_point_census, GroupWord, OrbitResult};
use crate::report::seeded_rng;
use crate::wehler::{
    fiber_discriminant, orbit8_corners, orbit8_family, period2_test, BaseField, BiQuadraticCurve,
    WehlerSurface,
};
use crate::SurfacePointQ;

const ORBIT8_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/orbit8_sample.json"));
const GENERIC_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/generic_sample.json"));
const FERMAT_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/census/fermat.json"));
const GRADED_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/census/graded.json"));
const MIXED_JSON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/census/mixed.json"));

/// Configuration for one run of the suite.
#[derive(Debug, Clone)]
pub struct AcceptanceConfig {
    /// Seed for the one generator feeding every random draw.
    pub seed: u64,
    /// Replaces every floating comparison tolerance when set. Exact
    /// comparisons are unaffected, so an override of zero fails
    /// precisely the floating checks.
    pub tol_override: Option<f64>,
    /// Negative control: feed the spectral criterion a deliberately
    /// corrupted generator matrix. The criterion must then fail.
    pub corrupt_spectral_gate: bool,
    /// Worker threads for the census criterion's parallel run.
    pub workers: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            seed: 1,
            tol_override: None,
            corrupt_spectral_gate: false,
            workers: 8,
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    /// Deterministic summary of what was measured (no timings, so
    /// reports stay byte-identical across reruns).
    pub detail: String,
    pub runtime_ms: u128,
}

/// Runs all thirteen criteria in order.
pub fn run_all(config: &AcceptanceConfig) -> Vec<CriterionReport> {
    type Runner = fn(&AcceptanceConfig) -> (bool, String);
    let table: [(u8, &'static str, u64, Runner); 13] = [
        (1, "spectral-data", 1, c01_spectral_data),
        (2, "parabolic-structure", 1, c02_parabolic_structure),
        (3, "orbit-eight", 60, c03_orbit_eight),
        (4, "period-two", 10, c04_period_two),
        (5, "discriminant-formulas", 10, c05_discriminant_formulas),
        (6, "height-growth", 600, c06_height_growth),
        (7, "canonical-heights", 600, c07_canonical_heights),
        (8, "stationary-height", 600, c08_stationary_height),
        (9, "perron-frobenius", 1, c09_perron_frobenius),
        (10, "degree-bounds", 1, c10_degree_bounds),
        (11, "torus-counts", 10, c11_torus_counts),
        (12, "chart-atlas", 1, c12_chart_atlas),
        (13, "census-oracle", 60, c13_census_oracle),
    ];
    table
        .iter()
        .map(|&(id, name, limit_s, runner)| {
            let start = Instant::now();
            let (mut pass, mut detail) = runner(config);
            let runtime_ms = start.elapsed().as_millis();
            if runtime_ms > u128::from(limit_s) * 1000 {
                pass = false;
                detail.push_str("; runtime allowance exceeded");
            }
            CriterionReport {
                id,
                name,
                pass,
                detail,
                runtime_ms,
            }
        })
        .collect()
}

fn tol(config: &AcceptanceConfig, default: f64) -> f64 {
    config.tol_override.unwrap_or(default)
}

fn rng_for(config: &AcceptanceConfig, criterion: u8) -> ChaCha12Rng {
    // One seed, one generator family; criteria get disjoint streams.
    let mut rng = seeded_rng(config.seed);
    rng.set_stream(u64::from(criterion));
    rng
}

fn word(letters: &[u8]) -> GroupWord {
    GroupWord::new(letters.to_vec()).expect("fixed words are reduced")
}

fn ivec(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

fn origin() -> SurfacePointQ {
    SurfacePointQ::new(ProjPoint1::zero(), ProjPoint1::zero(), ProjPoint1::zero())
}

fn bundled(json: &str) -> WehlerSurface {
    WehlerSurface::from_json_str(json).expect("bundled surfaces are valid")
}

/// The five bundled small points of the generic sample surface:
/// x = (0:1), y = (m:1), z = (m+1:1) for m = 0..4.
fn generic_sample_points() -> Vec<SurfacePointQ> {
    (0i64..5)
        .map(|m| {
            SurfacePointQ::new(
                ProjPoint1::zero(),
                ProjPoint1::from_pair(m, 1).expect("nonzero pair"),
                ProjPoint1::from_pair(m + 1, 1).expect("nonzero pair"),
            )
        })
        .collect()
}

fn nonzero_draw(rng: &mut ChaCha12Rng, bound: i64) -> i64 {
    let mag = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

// ---------------------------------------------------------------------------
// 1. Spectral data of the three-letter word.
// ---------------------------------------------------------------------------

fn c01_spectral_data(config: &AcceptanceConfig) -> (bool, String) {
    let lambda_tol = tol(config, 1e-10);
    let target_cp = IntPolynomial::from_i64(&[1, -17, -17, 1]);
    let matrix = if config.corrupt_spectral_gate {
        // Deliberately perturbed first generator: the (3,1) entry is
        // wrong, so the composite word matrix misses the frozen cubic.
        let m1 = IntMatrix::from_rows(&[&[-1, 0, 0], &[2, 1, 0], &[3, 0, 1]]);
        let m2 = IntMatrix::from_rows(&[&[1, 2, 0], &[0, -1, 0], &[0, 2, 1]]);
        let m3 = IntMatrix::from_rows(&[&[1, 0, 2], &[0, 1, 2], &[0, 0, -1]]);
        m1.mul(&m2).mul(&m3)
    } else {
        word_matrix(&word(&[3, 2, 1]))
    };
    let cp = matrix.charpoly();
    if cp != target_cp {
        return (
            false,
            format!(
                "charpoly coefficients {:?} differ from the frozen (t+1)(t^2-18t+1)",
                cp.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()
            ),
        );
    }
    let record = classify_word_record(&word(&[3, 2, 1]));
    let lambda = match record.verdict {
        IsometryType::Loxodromic { lambda, .. } => lambda,
        _ => return (false, "word (3,2,1) did not classify as loxodromic".into()),
    };
    let target = 9.0 + 4.0 * 5f64.sqrt();
    let lambda_ok = (lambda - target).abs() <= lambda_tol;
    let v = ivec(&[1, -3, 1]);
    let mv = matrix.mul_vec(&v);
    let eig_ok = mv == ivec(&[-1, 3, -1]);
    let form = LatticeForm::new(wehler_gram()).expect("Lorentzian");
    let u = ivec(&[1, 2, 1]);
    let pairing = form.pair_int(&u, &u);
    let pair_ok = pairing == 20;
    (
        lambda_ok && eig_ok && pair_ok,
        format!(
            "charpoly matches (t+1)(t^2-18t+1); |lambda - (9+4 sqrt 5)| = {:.3e} (tol {:.1e}); \
             (1,-3,1) is a -1 eigenvector: {}; <c1+2c2+c3|c1+2c2+c3> = {}",
            (lambda - target).abs(),
            lambda_tol,
            eig_ok,
            pairing
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Parabolic structure of the two-letter word.
// ---------------------------------------------------------------------------

fn c02_parabolic_structure(config: &AcceptanceConfig) -> (bool, String) {
    let residual_tol = tol(config, 1e-8);
    let m = word_matrix(&word(&[2, 1]));
    let eye = IntMatrix::identity(3);
    let nil = m.sub(&eye);
    let nil2 = nil.mul(&nil);
    let nil3 = nil2.mul(&nil);
    let zero = IntMatrix::zero(3);
    let unipotent_ok = nil2 != zero && nil3 == zero;

    // Exact closed form: with N = M - I nilpotent of index 3,
    // M^n u = u + n N u + C(n,2) N^2 u. Verify it against an
    // independently computed thousandth power, then read the limit of
    // M^n u / n^2 off the quadratic term.
    let n: i64 = 1000;
    let u = ivec(&[1, 1, 1]);
    let nu = nil.mul_vec(&u);
    let n2u = nil2.mul_vec(&u);
    let power = m.pow(n as u64).mul_vec(&u);
    let choose2 = n * (n - 1) / 2;
    let closed: Vec<Integer> = (0..3)
        .map(|i| {
            Integer::from(&u[i] + &Integer::from(n * &nu[i]))
                + Integer::from(choose2 * &n2u[i])
        })
        .collect();
    let closed_ok = power == closed;
    let residual = if closed_ok { 0.0 } else { f64::INFINITY };
    // Limit of M^n u / n^2 is N^2 u / 2; positive multiple of c3 means
    // the first two entries vanish and the third is positive.
    let limit_ok = n2u[0] == 0 && n2u[1] == 0 && n2u[2] > 0;
    let half_limit = n2u[2].to_f64() / 2.0;
    // Measured floating distance at n = 1000, against the proven
    // envelope |M^n u / n^2 - (N^2 u / 2)| <= 6/n for this u.
    let nn = (n * n) as f64;
    let scaled: Vec<f64> = power.iter().map(|x| x.to_f64() / nn).collect();
    let diff = [scaled[0], scaled[1], scaled[2] - half_limit];
    let dist = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
    let envelope_ok = dist <= 6.0 / n as f64;
    (
        unipotent_ok && closed_ok && residual <= residual_tol && limit_ok && envelope_ok,
        format!(
            "(M-I)^2 != 0 and (M-I)^3 = 0: {unipotent_ok}; M^1000 u = u + 1000 Nu + 499500 N^2 u \
             exactly (residual {residual:.1e} <= {residual_tol:.1e}); limit of M^n u/n^2 is \
             {half_limit} c3; measured distance at n = 1000 is {dist:.4e}, inside the proven \
             envelope 6/n"
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. The eight-point orbit family and its generic negative control.
// ---------------------------------------------------------------------------

fn seeded_orbit8_surface(rng: &mut ChaCha12Rng) -> WehlerSurface {
    let mut free = BTreeMap::new();
    for i in 0u8..3 {
        for j in 0u8..3 {
            for k in 0u8..3 {
                if i == 1 || j == 1 || k == 1 {
                    free.insert((i, j, k), Rational::from(nonzero_draw(rng, 9)));
                }
            }
        }
    }
    orbit8_family(&free).expect("nonzero guards keep the family valid")
}

/// A dense random surface together with a rational point on it: the
/// coefficient at exponent (0,2,2) is solved so that the point
/// x = (0:1), y = (1:1), z = (1:1) satisfies the equation.
///
/// Coefficients are unit magnitude with seeded signs. Escape to
/// infinity only needs dense support, and the orbit search walks
/// twelve levels deep where every extra coefficient bit compounds
/// into the hundred-thousand-bit coordinates, so small coefficients
/// keep the negative control inside its time allowance.
fn seeded_generic_surface(rng: &mut ChaCha12Rng) -> (WehlerSurface, SurfacePointQ) {
    let mut coeffs = BTreeMap::new();
    let mut slice_sum = 0i64;
    for i in 0u8..3 {
        for j in 0u8..3 {
            for k in 0u8..3 {
                if (i, j, k) == (0, 2, 2) {
                    continue;
                }
                let v = nonzero_draw(rng, 1);
                if i == 0 {
                    slice_sum += v;
                }
                coeffs.insert((i, j, k), Rational::from(v));
            }
        }
    }
    coeffs.insert((0, 2, 2), Rational::from(-slice_sum));
    let s = WehlerSurface::from_map("seeded-generic", BaseField::Q, &coeffs)
        .expect("coefficients are not all zero");
    let pt = SurfacePointQ::new(
        ProjPoint1::zero(),
        ProjPoint1::from_pair(1, 1).expect("nonzero"),
        ProjPoint1::from_pair(1, 1).expect("nonzero"),
    );
    (s, pt)
}

fn c03_orbit_eight(config: &AcceptanceConfig) -> (bool, String) {
    let mut rng = rng_for(config, 3);
    let mut family_ok = 0usize;
    for _ in 0..100 {
        let s = seeded_orbit8_surface(&mut rng);
        match orbit_closure(&s, &origin(), 100) {
            Ok(OrbitResult::Finite(points)) if points.len() == 8 => family_ok += 1,
            _ => {}
        }
    }
    let mut control_ok = 0usize;
    let mut resampled = 0usize;
    for _ in 0..20 {
        // A sampled surface can be degenerate at some orbit point
        // (zero fiber quadratic); such draws are rejected and redrawn,
        // bounded so a systematic failure still surfaces.
        loop {
            let (s, pt) = seeded_generic_surface(&mut rng);
            match orbit_closure(&s, &pt, 10_000) {
                Ok(OrbitResult::BudgetExceeded { .. }) => {
                    control_ok += 1;
                    break;
                }
                Ok(OrbitResult::Finite(_)) => break,
                Err(_) => {
                    resampled += 1;
                    if resampled > 100 {
                        break;
                    }
                }
            }
        }
        if resampled > 100 {
            break;
        }
    }
    (
        family_ok == 100 && control_ok == 20,
        format!(
            "{family_ok}/100 family surfaces gave a finite orbit of size 8; \
             {control_ok}/20 dense controls exhausted the 10^4 budget ({resampled} degenerate \
             draws rejected)"
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. The period-two criterion on normal-form curves.
// ---------------------------------------------------------------------------

fn c04_period_two(config: &AcceptanceConfig) -> (bool, String) {
    let mut rng = rng_for(config, 4);
    let mut ok = 0usize;
    for _ in 0..50 {
        let beta = nonzero_draw(&mut rng, 99);
        let gamma = nonzero_draw(&mut rng, 99);
        let delta = rng.gen_range(-99..=99i64);
        let eps = nonzero_draw(&mut rng, 99);
        let degenerate = BiQuadraticCurve::normal(0, beta, gamma, delta, eps);
        let alpha = nonzero_draw(&mut rng, 99);
        let generic = BiQuadraticCurve::normal(alpha, beta, gamma, delta, eps);
        let zero_case = period2_test(&degenerate).map(|(p, _)| p);
        let nonzero_case = period2_test(&generic).map(|(p, _)| p);
        if zero_case == Ok(true) && nonzero_case == Ok(false) {
            ok += 1;
        }
    }
    (
        ok == 50,
        format!("{ok}/50 seeded parameter draws: period two holds exactly when alpha = 0"),
    )
}

// ---------------------------------------------------------------------------
// 5. Discriminant coefficient formulas against symbolic expansion.
// ---------------------------------------------------------------------------

fn poly_coeff(p: &IntPolynomial, i: usize) -> Integer {
    p.coeffs().get(i).cloned().unwrap_or_default()
}

fn c05_discriminant_formulas(config: &AcceptanceConfig) -> (bool, String) {
    let mut rng = rng_for(config, 5);
    let mut ok = 0usize;
    for _ in 0..1000 {
        let alpha = rng.gen_range(-99..=99i64);
        let beta = rng.gen_range(-99..=99i64);
        let gamma = rng.gen_range(-99..=99i64);
        let delta = rng.gen_range(-99..=99i64);
        let eps = rng.gen_range(-99..=99i64);
        let curve = BiQuadraticCurve::normal(alpha, beta, gamma, delta, eps);
        let Ok(coeffs) = fiber_discriminant(&curve) else {
            continue;
        };
        let [a, b, c, d, e] = coeffs;
        let b_ok = b == Rational::from(2 * gamma * delta - 4 * alpha * eps);
        let e_ok = e == Rational::from(eps * eps);
        // Symbolic oracle: expand B(y)^2 - 4 A(y) C0(y) for
        // A = alpha y^2 + beta y, B = gamma y^2 + delta y + eps,
        // C0 = eps y, and compare all five quartic coefficients.
        let ap = IntPolynomial::from_i64(&[0, beta, alpha]);
        let bp = IntPolynomial::from_i64(&[eps, delta, gamma]);
        let cp = IntPolynomial::from_i64(&[0, eps]);
        let four = IntPolynomial::from_i64(&[4]);
        let sym = bp.mul(&bp).sub(&ap.mul(&cp).mul(&four));
        let returned = [&e, &d, &c, &b, &a];
        let sym_ok = (0..5).all(|i| *returned[i] == Rational::from(poly_coeff(&sym, i)));
        if b_ok && e_ok && sym_ok {
            ok += 1;
        }
    }
    (
        ok == 1000,
        format!(
            "{ok}/1000 seeded parameter draws: b = 2 gamma delta - 4 alpha eps, e = eps^2, and \
             all five coefficients match the expanded B^2 - 4 A C"
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Height growth along the loxodromic word.
// ---------------------------------------------------------------------------

fn c06_height_growth(config: &AcceptanceConfig) -> (bool, String) {
    let rel_tol = tol(config, 0.15);
    let mut rng = rng_for(config, 6);
    let s = bundled(GENERIC_JSON);
    let f = word(&[3, 2, 1]);
    let lambda = 9.0 + 4.0 * 5f64.sqrt();
    let budget = HeightBudget::default();
    let mut points = generic_sample_points();
    points.shuffle(&mut rng);
    let mut ratios = Vec::new();
    let mut ok = 0usize;
    for pt in points.iter().take(5) {
        match growth_estimate_lambda(&s, &f, pt, 5, &budget) {
            Ok(ratio) => {
                if (ratio - lambda).abs() <= rel_tol * lambda {
                    ok += 1;
                }
                ratios.push(format!("{ratio:.4}"));
            }
            Err(e) => ratios.push(format!("error: {e}")),
        }
    }
    (
        ok == 5,
        format!(
            "{ok}/5 growth ratios h(f^5 x)/h(f^4 x) within {rel_tol:.2} relative of lambda = \
             {lambda:.4}: [{}]",
            ratios.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------
// 7. Canonical heights: vanishing on the finite orbit, equivariance.
// ---------------------------------------------------------------------------

fn c07_canonical_heights(config: &AcceptanceConfig) -> (bool, String) {
    let error_cap = tol(config, 1e-6);
    let mut rng = rng_for(config, 7);
    let budget = HeightBudget::default();
    let f = word(&[3, 2, 1]);

    // Vanishing on the eight-point orbit, both signs, deep stage.
    let orbit8 = bundled(ORBIT8_JSON);
    let mut vanish_ok = 0usize;
    for pt in orbit8_corners() {
        let both = [HeightSign::Plus, HeightSign::Minus].iter().all(|&sign| {
            match cyclic_canonical_height(&orbit8, &f, sign, &pt, 8, &budget) {
                Ok(h) => h.value.abs() <= h.error && h.error < error_cap,
                Err(_) => false,
            }
        });
        if both {
            vanish_ok += 1;
        }
    }

    // Equivariance h+(f x) = lambda h+(x) within combined error bars on
    // seeded non-periodic points of the generic sample.
    let s = bundled(GENERIC_JSON);
    let record = classify_word_record(&f);
    let IsometryType::Loxodromic { lambda, .. } = record.verdict else {
        return (false, "word (3,2,1) did not classify as loxodromic".into());
    };
    let mut base_points = generic_sample_points();
    base_points.shuffle(&mut rng);
    let mut equiv_ok = 0usize;
    let mut worst: f64 = 0.0;
    for pt in base_points.iter().take(5) {
        let letter = rng.gen_range(1..=3u8);
        let seeded = match word(&[letter]).apply_q(&s, pt) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let image = match f.apply_q(&s, &seeded) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let h0 = cyclic_canonical_height(&s, &f, HeightSign::Plus, &seeded, 3, &budget);
        let h1 = cyclic_canonical_height(&s, &f, HeightSign::Plus, &image, 3, &budget);
        if let (Ok(h0), Ok(h1)) = (h0, h1) {
            let gap = (h1.value - lambda * h0.value).abs();
            let allowed = h1.error + lambda * h0.error;
            if gap <= allowed {
                equiv_ok += 1;
            }
            worst = worst.max(gap / allowed.max(f64::MIN_POSITIVE));
        }
    }
    (
        vanish_ok == 8 && equiv_ok == 5,
        format!(
            "{vanish_ok}/8 orbit points have |h+-| <= error < {error_cap:.1e}; {equiv_ok}/5 \
             seeded points satisfy h+(f x) = lambda h+(x) within combined bars (worst \
             gap/bar ratio {worst:.3e})"
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. Stationary heights: the eigen-relation residual and vanishing.
// ---------------------------------------------------------------------------

fn c08_stationary_height(config: &AcceptanceConfig) -> (bool, String) {
    let mut rng = rng_for(config, 8);
    let budget = HeightBudget::default();
    let support = vec![word(&[1, 2]), word(&[2, 3])];
    // Seeded rational weights a/d and (d-a)/d.
    let d = rng.gen_range(3..=9i64);
    let a = rng.gen_range(1..d);
    let weights = vec![
        Rational::from((a, d)),
        Rational::from((d - a, d)),
    ];
    let measure = match MeasureSpec::new(support, weights.clone()) {
        Ok(m) => m,
        Err(e) => return (false, format!("measure construction failed: {e}")),
    };
    let (form, _) = crate::nsgeom::wehler_ns_rep();
    let kappa0 = wehler_kappa0();
    let operator = stationary_operator(&measure);
    // The iteration tolerance is a convergence control, not an
    // acceptance tolerance; it stays fixed under overrides.
    let (w_class, alpha) = match dominant_eigen(&operator, &form, &kappa0, 1e-11) {
        Ok(pair) => pair,
        Err(e) => return (false, format!("dominant eigendata failed: {e}")),
    };
    let class = match ClassWeights::from_real_class(&w_class) {
        Ok(c) => c,
        Err(e) => return (false, format!("eigenclass is not usable: {e}")),
    };

    // Residual of the stationarity relation at the first bundled point.
    let s = bundled(GENERIC_JSON);
    let x = generic_sample_points().remove(0);
    let depth = 6;
    let hx = match stationary_height(&s, &measure, &class, alpha, &x, depth, &budget) {
        Ok(v) => v,
        Err(e) => return (false, format!("stationary height failed: {e}")),
    };
    let mut lhs = 0.0;
    let mut lhs_error = 0.0;
    for (w, nu) in measure.support().iter().zip(measure.weights()) {
        let image = match w.apply_q(&s, &x) {
            Ok(p) => p,
            Err(e) => return (false, format!("support word failed at the base point: {e}")),
        };
        let h = match stationary_height(&s, &measure, &class, alpha, &image, depth, &budget) {
            Ok(v) => v,
            Err(e) => return (false, format!("stationary height failed: {e}")),
        };
        let nu = nu.to_f64();
        lhs += nu * h.value;
        lhs_error += nu * h.error;
    }
    let residual = (lhs - alpha * hx.value).abs();
    let combined = lhs_error + alpha * hx.error;
    let allowed = config.tol_override.unwrap_or(combined);
    let residual_ok = residual <= allowed;

    // Vanishing on the eight-point orbit for the same measure.
    let orbit8 = bundled(ORBIT8_JSON);
    let mut vanish_ok = 0usize;
    for pt in orbit8_corners() {
        match stationary_height(&orbit8, &measure, &class, alpha, &pt, depth, &budget) {
            Ok(h) => {
                let cap = config.tol_override.unwrap_or(h.error);
                if h.value.abs() <= cap {
                    vanish_ok += 1;
                }
            }
            Err(_) => {}
        }
    }
    (
        residual_ok && vanish_ok == 8,
        format!(
            "weights ({a}/{d}, {}/{d}), alpha = {alpha:.6}; stationarity residual {residual:.3e} \
             <= allowed {allowed:.3e}: {residual_ok}; {vanish_ok}/8 orbit points have vanishing \
             stationary height",
            d - a
        ),
    )
}

// ---------------------------------------------------------------------------
// 9. Perron-Frobenius data of averaged pullbacks.
// ---------------------------------------------------------------------------

fn c09_perron_frobenius(config: &AcceptanceConfig) -> (bool, String) {
    let unit_tol = tol(config, 1e-9);
    let measure = match MeasureSpec::uniform(vec![word(&[2, 1]), word(&[3, 2])]) {
        Ok(m) => m,
        Err(e) => return (false, format!("measure construction failed: {e}")),
    };
    let operator = stationary_operator(&measure);
    let (form, _) = crate::nsgeom::wehler_ns_rep();
    let kappa0 = wehler_kappa0();
    let (w_class, alpha) = match dominant_eigen(&operator, &form, &kappa0, 1e-12) {
        Ok(pair) => pair,
        Err(e) => return (false, format!("gap certification failed: {e}")),
    };
    let gap_ok = alpha > 1.0;
    let self_pair = form.pair_real(&w_class.coords, &w_class.coords);
    if !(self_pair > 0.0) {
        return (false, format!("eigenclass self-pairing {self_pair} is not positive"));
    }
    // Renormalize the kappa0-normalized eigenclass to unit self-pairing.
    let scale = self_pair.sqrt().recip();
    let unit: Vec<f64> = w_class.coords.iter().map(|c| c * scale).collect();
    let unit_pair = form.pair_real(&unit, &unit);
    let unit_ok = (unit_pair - 1.0).abs() <= unit_tol;

    // Exact restriction identity: the symmetrized loxodromic pullback
    // has the invariant class (1,2,1) with exact eigenvalue 9, the
    // rational trace of (lambda + 1/lambda)/2 = 9.
    let m = word_matrix(&word(&[3, 2, 1]));
    let Some(minv) = m.inverse_int() else {
        return (false, "word matrix is not invertible over the integers".into());
    };
    let mut entries = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let sum = Integer::from(m.get(i, j) + minv.get(i, j));
            entries.push(Rational::from((sum, Integer::from(2))));
        }
    }
    let sym = QMatrix::new(3, entries);
    let w121: Vec<Rational> = [1, 2, 1].iter().map(|&x| Rational::from(x)).collect();
    let exact = match verify_rational_stationary(&sym, &form, &w121) {
        Ok(alpha) => alpha,
        Err(e) => return (false, format!("restriction eigenvalue failed: {e}")),
    };
    let exact_ok = exact == 9;
    (
        gap_ok && unit_ok && exact_ok,
        format!(
            "certified gap with alpha = {alpha:.9} > 1; renormalized <w|w> = {unit_pair:.12} \
             (tol {unit_tol:.1e}); symmetrized loxodromic operator fixes (1,2,1) with exact \
             eigenvalue {exact}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 10. Degree-bound formula evaluators on hand-substituted cases.
// ---------------------------------------------------------------------------

fn c10_degree_bounds(config: &AcceptanceConfig) -> (bool, String) {
    let rel_tol = tol(config, 1e-12);
    let two54 = (1u64 << 54) as f64;
    let periodic_cases: [(u32, f64, f64, bool, f64); 5] = [
        (3, 0.0, 20.0, true, 0.1),
        (3, 0.0, 20.0, false, 0.1),
        (4, 0.0, 20.0, false, 0.2),
        (3, 1.0, 2.0, true, 2.0),
        (5, 3.0, 8.0, false, 3.0),
    ];
    let invariant_cases: [(u32, f64, f64, f64); 5] = [
        (3, 0.0, 1.0, two54),
        (4, 0.0, 1.0, 2.0 * two54),
        (3, 1.0, 1.0, 2.0 * two54),
        (3, 0.0, 2.0, two54 * 2f64.powi(56)),
        (3, 0.0, 29.0 / 3.0, two54 * (29.0f64 / 3.0).powi(56)),
    ];
    let mut ok = 0usize;
    let mut worst: f64 = 0.0;
    for &(rho, c_x, pairing, connected, want) in &periodic_cases {
        match crate::nsgeom::periodic_curve_degree_bound(rho, c_x, pairing, connected) {
            Ok(got) => {
                let rel = (got - want).abs() / want;
                worst = worst.max(rel);
                if rel <= rel_tol {
                    ok += 1;
                }
            }
            Err(_) => {}
        }
    }
    for &(rho, c_x, deg_f, want) in &invariant_cases {
        match crate::nsgeom::invariant_curve_degree_bound(rho, c_x, deg_f) {
            Ok(got) => {
                let rel = (got - want).abs() / want;
                worst = worst.max(rel);
                if rel <= rel_tol {
                    ok += 1;
                }
            }
            Err(_) => {}
        }
    }
    (
        ok == 10,
        format!(
            "{ok}/10 hand-substituted cases match (worst relative error {worst:.3e}, tol \
             {rel_tol:.1e}); the unit case reproduces 2^54 = {two54}"
        ),
    )
}

// ---------------------------------------------------------------------------
// 11. Torus fixed-point counts with two independent oracles.
// ---------------------------------------------------------------------------

fn c11_torus_counts(_config: &AcceptanceConfig) -> (bool, String) {
    let f = match TorusAut::z2([[2, 1], [1, 1]], TorsionPoint::zero()) {
        Ok(f) => f,
        Err(e) => return (false, format!("torus map construction failed: {e}")),
    };
    let mut counts = Vec::new();
    for power in 1..=3u32 {
        match torus_fixed_count(&f, power) {
            Ok(FixedCount::Finite(c)) => counts.push(c),
            Ok(FixedCount::InfiniteFixedLocus) => {
                return (false, format!("power {power} reported an infinite fixed locus"))
            }
            Err(e) => return (false, format!("count failed at power {power}: {e}")),
        }
    }
    let counts_ok = counts == ivec(&[1, 25, 256]);

    // Oracle one: brute enumeration of the 625 quarter... fifth-torsion
    // points for the square of the map.
    let brute = match brute_force_fixed_count(&f, 2, 5) {
        Ok(c) => c,
        Err(e) => return (false, format!("brute-force oracle failed: {e}")),
    };
    let brute_ok = brute == 25;

    // Oracle two: Smith normal form of M^3 (x) I - I; the fixed-point
    // count is the product of the elementary divisors.
    let m = IntMatrix::from_rows(&[&[2, 1], &[1, 1]]);
    let big = m.pow(3).kron(&IntMatrix::identity(2)).sub(&IntMatrix::identity(4));
    let (_, d, _) = big.smith_normal_form();
    let mut product = Integer::from(1);
    for i in 0..4 {
        product *= d.get(i, i);
    }
    let smith_ok = product.clone().abs() == 256;
    (
        counts_ok && brute_ok && smith_ok,
        format!(
            "Fix(f), Fix(f^2), Fix(f^3) = {}, {}, {}; brute force over 625 fifth-torsion points \
             gives {brute}; Smith elementary divisors of M^3 (x) I - I multiply to {}",
            counts[0], counts[1], counts[2], product
        ),
    )
}

// ---------------------------------------------------------------------------
// 12. The resolution chart atlas and its equivariant data.
// ---------------------------------------------------------------------------

fn c12_chart_atlas(_config: &AcceptanceConfig) -> (bool, String) {
    let atlas = chart_atlas();
    let u = |i: usize| atlas.quotient_exp(i);
    let rel1 = [u(0)[0] + u(2)[0], u(0)[1] + u(2)[1]] == [2 * u(1)[0], 2 * u(1)[1]];
    let rel2 = [u(1)[0] + u(3)[0], u(1)[1] + u(3)[1]] == [3 * u(2)[0], 3 * u(2)[1]];

    // Composite of the two transitions against the direct expression:
    // w2 = v0^2 w0^5 in the exponent lattice.
    let composite = atlas.transition(0).then(atlas.transition(1));
    let composed_w2 = composite.column(1);
    let direct_w2 = match atlas.coord_in_chart(atlas.quotient_exp(3), 0) {
        Some(exps) => exps,
        None => return (false, "u3 is not monomial in the first chart".into()),
    };
    let w2_ok = composed_w2 == [2, 5] && direct_w2 == [2, 5];

    let mult_ok = atlas.chart_coord_exps(0)[1] == [-2, 1]
        && atlas.chart_coord_exps(1)[1] == [-1, 3]
        && atlas.chart_coord_exps(0)[0] == [5, 0];
    // Multiplier magnitudes at the illustrative |alpha| = 2, |beta| = 1/2;
    // powers of two are exact in binary floating point.
    let mags = [
        equivariant_multiplier([-2, 1]).magnitude(2.0, 0.5),
        equivariant_multiplier([-1, 3]).magnitude(2.0, 0.5),
        equivariant_multiplier([5, 0]).magnitude(2.0, 0.5),
    ];
    let mags_ok = mags == [0.125, 0.0625, 32.0];

    let hj52 = CyclicSingularity::new(5, 2).map(|s| hirzebruch_jung(&s));
    let hj21 = CyclicSingularity::new(2, 1).map(|s| hirzebruch_jung(&s));
    let hj_ok = matches!(hj52.as_deref(), Ok([3, 2])) && matches!(hj21.as_deref(), Ok([2]));

    let fixed = match exceptional_fixed_points(&atlas, 2.0, 0.5) {
        Ok(reports) => reports,
        Err(e) => return (false, format!("fixed-point analysis failed: {e}")),
    };
    let fixed_ok = fixed.len() == 2 && fixed.iter().all(|r| r.fixed_points == 2);
    (
        rel1 && rel2 && w2_ok && mult_ok && mags_ok && hj_ok && fixed_ok,
        format!(
            "u0 u2 = u1^2: {rel1}; u1 u3 = u2^3: {rel2}; composed transitions give w2 = \
             v0^2 w0^5 both ways: {w2_ok}; multiplier exponents and magnitudes match: \
             {}; HJ(5,2) = [3,2], HJ(2,1) = [2]: {hj_ok}; two fixed points per exceptional \
             curve: {fixed_ok}",
            mult_ok && mags_ok
        ),
    )
}

// ---------------------------------------------------------------------------
// 13. Point census against a triple-loop evaluation oracle.
// ---------------------------------------------------------------------------

/// Independent modular evaluation: reduce each coefficient by hand and
/// test all (p+1)^3 coordinate triples against the equation.
fn brute_census(s: &WehlerSurface, p: u64) -> Option<u64> {
    let mut coeffs = [[0u64; 9]; 3];
    for i in 0u8..3 {
        for j in 0u8..3 {
            for k in 0u8..3 {
                let c = s.coeff(i, j, k);
                let modulus = Integer::from(p);
                let num = Integer::from(c.numer().rem_euc(&modulus)).to_u64()?;
                let den = Integer::from(c.denom().rem_euc(&modulus)).to_u64()?;
                let den_inv = mod_inverse(den, p)?;
                coeffs[i as usize][(3 * j + k) as usize] = num * den_inv % p;
            }
        }
    }
    let reps: Vec<(u64, u64)> = (0..p).map(|t| (t, 1)).chain([(1, 0)]).collect();
    let monomial = |(a, b): (u64, u64), e: u32| -> u64 {
        a.pow(e) % p * (b.pow(2 - e) % p) % p
    };
    let mut count = 0u64;
    for &x in &reps {
        for &y in &reps {
            for &z in &reps {
                let mut total = 0u64;
                for i in 0..3u32 {
                    for j in 0..3u32 {
                        for k in 0..3u32 {
                            let c = coeffs[i as usize][(3 * j + k) as usize];
                            if c == 0 {
                                continue;
                            }
                            let m = monomial(x, i) * monomial(y, j) % p * monomial(z, k) % p;
                            total = (total + c * m) % p;
                        }
                    }
                }
                if total == 0 {
                    count += 1;
                }
            }
        }
    }
    Some(count)
}

fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    // p is a small prime here; Fermat inversion suffices.
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    Some(result)
}

fn c13_census_oracle(config: &AcceptanceConfig) -> (bool, String) {
    let surfaces = [
        bundled(ORBIT8_JSON),
        bundled(GENERIC_JSON),
        bundled(FERMAT_JSON),
        bundled(GRADED_JSON),
        bundled(MIXED_JSON),
    ];
    let workers = config.workers.max(2);
    let mut census_ok = 0usize;
    let mut partition_ok = 0usize;
    let mut bytes_ok = 0usize;
    let total = surfaces.len() * 3;
    for s in &surfaces {
        for p in [3u64, 5, 7] {
            let Some(expected) = brute_census(s, p) else {
                continue;
            };
            if fp_point_census(s, p, 1) == Ok(expected) {
                census_ok += 1;
            }
            let one = fp_orbit_partition(s, p, 1);
            let many = fp_orbit_partition(s, p, workers);
            if let (Ok(one), Ok(many)) = (one, many) {
                if one.partitioned_points() + one.quarantined == one.census
                    && one.census == expected
                {
                    partition_ok += 1;
                }
                let a = serde_json::to_string(&one).expect("partition serializes");
                let b = serde_json::to_string(&many).expect("partition serializes");
                if a == b {
                    bytes_ok += 1;
                }
            }
        }
    }
    (
        census_ok == total && partition_ok == total && bytes_ok == total,
        format!(
            "{census_ok}/{total} censuses match the triple-loop oracle; {partition_ok}/{total} \
             partitions sum to the census; {bytes_ok}/{total} serialized partitions are \
             byte-identical at 1 vs {workers} workers"
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass_with_defaults() {
        let config = AcceptanceConfig::default();
        for (runner, name) in [
            (c01_spectral_data as fn(&AcceptanceConfig) -> (bool, String), "spectral"),
            (c02_parabolic_structure, "parabolic"),
            (c04_period_two, "period-two"),
            (c05_discriminant_formulas, "discriminant"),
            (c09_perron_frobenius, "perron-frobenius"),
            (c10_degree_bounds, "degree-bounds"),
            (c11_torus_counts, "torus-counts"),
            (c12_chart_atlas, "chart-atlas"),
        ] {
            let (pass, detail) = runner(&config);
            assert!(pass, "{name} failed: {detail}");
        }
    }

    #[test]
    fn corrupted_gate_fails_the_spectral_criterion() {
        let config = AcceptanceConfig {
            corrupt_spectral_gate: true,
            ..AcceptanceConfig::default()
        };
        let (pass, detail) = c01_spectral_data(&config);
        assert!(!pass, "corrupted matrix must fail, got: {detail}");
        assert!(detail.contains("differ from the frozen"));
    }

    #[test]
    fn zero_tolerance_fails_floating_but_not_exact_criteria() {
        let config = AcceptanceConfig {
            tol_override: Some(0.0),
            ..AcceptanceConfig::default()
        };
        let (lambda_gate, _) = c01_spectral_data(&config);
        assert!(!lambda_gate, "the lambda comparison cannot survive tol 0");
        let (exact_parabolic, _) = c02_parabolic_structure(&config);
        assert!(exact_parabolic, "the parabolic checks are exact");
        let (exact_torus, _) = c11_torus_counts(&config);
        assert!(exact_torus);
        let (exact_atlas, _) = c12_chart_atlas(&config);
        assert!(exact_atlas);
        let (degree_gate, _) = c10_degree_bounds(&config);
        assert!(!degree_gate, "log-domain evaluation cannot survive tol 0");
    }

    #[test]
    fn census_criterion_is_self_contained() {
        let config = AcceptanceConfig::default();
        let (pass, detail) = c13_census_oracle(&config);
        assert!(pass, "census oracle failed: {detail}");
    }

    #[test]
    fn brute_census_counts_the_fermat_surface_mod_three() {
        let s = bundled(FERMAT_JSON);
        let direct = brute_census(&s, 3).unwrap();
        assert_eq!(fp_point_census(&s, 3, 1).unwrap(), direct);
    }
}

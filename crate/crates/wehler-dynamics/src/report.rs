//! Run configuration, JSON report documents, and the command dispatcher
//! behind the `wehler-dynamics` binary.
//!
//! Every command is a pure function from a [`RunConfig`] to a
//! [`ReportDocument`]: given the same configuration and input files the
//! emitted report is byte-identical, for any worker count. All randomness
//! used by a run flows from the single `seed` through one named generator
//! (see [`RNG_NAME`]); wall-clock timing is never written into the report
//! (the `timing` field stays `null`) so that reruns compare equal.
//!
//! Exit codes: 0 for success, 2 for domain, parse, and schema errors, 3
//! when a budget was exhausted (including orbit searches that end in
//! `budget-exceeded`), and 1 when the self-check suite reports failures.

use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rug::Integer;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::acceptance::{self, AcceptanceConfig};
use crate::heights::{height_report, HeightBudget, HeightError};
use crate::kummer::{
    chart_atlas, equivariant_multiplier, exceptional_fixed_points, hirzebruch_jung,
    torus_fixed_count, CyclicSingularity, FixedCount, KummerError, OrderElem, QuadOrder,
    TorsionPoint, TorusAut,
};
use crate::nsgeom::{
    classify_word_record, dominant_eigen, stationary_operator, wehler_kappa0, wehler_ns_rep,
    MeasureSpec, NsError,
};
use crate::numcore::{parse_rational, ProjPoint1};
use crate::orbits::{fp_orbit_partition, fp_point_census, orbit_closure, GroupWord, OrbitResult};
use crate::wehler::{WehlerError, WehlerSurface};
use crate::{heights, SurfacePointQ};

pub const TOOL_NAME: &str = "wehler-dynamics";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Name and version of the one generator that feeds every random choice.
pub const RNG_NAME: &str = "chacha12-v1";

/// The seeded generator behind all sampled surfaces and points.
pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Errors surfaced by the dispatcher, each mapped to a documented exit code.
#[derive(Debug, Error)]
pub enum RunError {
    /// Input text that is not even well-formed (JSON syntax, word syntax).
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed input that violates a schema or flag contract.
    #[error("schema error: {0}")]
    Schema(String),
    /// A mathematically invalid request (bad point, degenerate fiber, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A budget (points, digits, nodes, torsion level) was exhausted.
    #[error("budget error: {0}")]
    Budget(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) | RunError::Schema(_) | RunError::Domain(_) => 2,
            RunError::Budget(_) => 3,
        }
    }
}

fn from_wehler(e: WehlerError) -> RunError {
    match e {
        WehlerError::ParseError(m) => RunError::Parse(m),
        other => RunError::Domain(other.to_string()),
    }
}

fn from_ns(e: NsError) -> RunError {
    RunError::Domain(e.to_string())
}

fn from_height(e: HeightError) -> RunError {
    match e {
        HeightError::HeightOverflow { .. } | HeightError::BranchBudget { .. } => {
            RunError::Budget(e.to_string())
        }
        other => RunError::Domain(other.to_string()),
    }
}

fn from_kummer(e: KummerError) -> RunError {
    match e {
        KummerError::LevelOverflow { .. } => RunError::Budget(e.to_string()),
        other => RunError::Domain(other.to_string()),
    }
}

/// The parsed command with its inputs; serialized into the report echo.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum CommandSpec {
    Classify {
        word: Vec<u8>,
    },
    Orbit {
        surface: String,
        start: String,
        budget: usize,
    },
    Census {
        surface: String,
        primes: Vec<u64>,
        partition: bool,
    },
    Height {
        surface: String,
        word: Vec<u8>,
        start: String,
        iterations: u32,
    },
    Stationary {
        surface: String,
        words: Vec<Vec<u8>>,
        weights: Vec<String>,
        start: String,
        depth: u32,
    },
    TorusFix {
        matrix: String,
        order: String,
        power: u32,
        translation: Option<String>,
    },
    KummerCharts {
        report: bool,
    },
    Acceptance {
        corrupt_spectral_gate: bool,
    },
}

/// Complete description of one run. Identical configs (against identical
/// input files) produce byte-identical reports.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandSpec,
    pub seed: u64,
    pub workers: usize,
    /// Overrides every floating tolerance when set; commands fall back to
    /// their documented defaults when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Whether a CSV rendering was requested alongside the JSON report.
    pub csv: bool,
    pub rng: &'static str,
}

impl RunConfig {
    pub fn new(command: CommandSpec) -> Self {
        RunConfig {
            command,
            seed: 1,
            workers: 1,
            tol: None,
            csv: false,
            rng: RNG_NAME,
        }
    }
}

/// The report emitted by every command: tool identity, config echo,
/// results payload, and a timing slot that is always `null` so that
/// reports are reproducible byte-for-byte.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub results: Value,
    pub timing: Option<f64>,
}

impl ReportDocument {
    pub fn to_json_string(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}

/// A finished run: the report, the process exit code, and an optional CSV
/// rendering of the results.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: ReportDocument,
    pub exit_code: i32,
    pub csv: Option<String>,
}

/// Dispatches a configuration to the module operations and assembles the
/// report document.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let (results, exit_code, csv) = match &config.command {
        CommandSpec::Classify { word } => (cmd_classify(word)?, 0, None),
        CommandSpec::Orbit {
            surface,
            start,
            budget,
        } => cmd_orbit(surface, start, *budget)?,
        CommandSpec::Census {
            surface,
            primes,
            partition,
        } => cmd_census(surface, primes, *partition, config)?,
        CommandSpec::Height {
            surface,
            word,
            start,
            iterations,
        } => (cmd_height(surface, word, start, *iterations)?, 0, None),
        CommandSpec::Stationary {
            surface,
            words,
            weights,
            start,
            depth,
        } => (
            cmd_stationary(surface, words, weights, start, *depth, config)?,
            0,
            None,
        ),
        CommandSpec::TorusFix {
            matrix,
            order,
            power,
            translation,
        } => (
            cmd_torus_fix(matrix, order, *power, translation.as_deref())?,
            0,
            None,
        ),
        CommandSpec::KummerCharts { report } => (cmd_kummer_charts(*report), 0, None),
        CommandSpec::Acceptance {
            corrupt_spectral_gate,
        } => cmd_acceptance(config, *corrupt_spectral_gate)?,
    };
    Ok(RunOutcome {
        report: ReportDocument {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            config: config.clone(),
            results,
            timing: None,
        },
        exit_code,
        csv,
    })
}

// ---------------------------------------------------------------------------
// Input parsing.
// ---------------------------------------------------------------------------

/// Parses a comma-separated word like "3,2,1" (leftmost letter applied last).
pub fn parse_word_letters(s: &str) -> Result<Vec<u8>, RunError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u8>()
                .map_err(|_| RunError::Parse(format!("bad word letter {part:?}")))
        })
        .collect()
}

fn word_from_letters(letters: &[u8]) -> Result<GroupWord, RunError> {
    GroupWord::new(letters.to_vec())
        .map_err(|e| RunError::Schema(format!("invalid word {letters:?}: {e}")))
}

/// Parses a start point: "origin" or "x=[a:b],y=[c:d],z=[e:f]" with
/// arbitrary-precision integer entries.
pub fn parse_start(s: &str) -> Result<SurfacePointQ, RunError> {
    let s = s.trim();
    if s == "origin" {
        return Ok(SurfacePointQ::new(
            ProjPoint1::zero(),
            ProjPoint1::zero(),
            ProjPoint1::zero(),
        ));
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(RunError::Parse(format!(
            "start point must be \"origin\" or \"x=[a:b],y=[c:d],z=[e:f]\", got {s:?}"
        )));
    }
    let mut coords = Vec::with_capacity(3);
    for (part, axis) in parts.iter().zip(["x", "y", "z"]) {
        let part = part.trim();
        let body = part
            .strip_prefix(axis)
            .and_then(|r| r.strip_prefix('='))
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| {
                RunError::Parse(format!("bad {axis} coordinate {part:?}, expected {axis}=[a:b]"))
            })?;
        let (a, b) = body.split_once(':').ok_or_else(|| {
            RunError::Parse(format!("coordinate {body:?} must have the form a:b"))
        })?;
        let a: Integer = a
            .trim()
            .parse()
            .map_err(|e| RunError::Parse(format!("bad integer {a:?}: {e}")))?;
        let b: Integer = b
            .trim()
            .parse()
            .map_err(|e| RunError::Parse(format!("bad integer {b:?}: {e}")))?;
        coords.push(
            ProjPoint1::new(a, b)
                .map_err(|e| RunError::Parse(format!("bad coordinate {body:?}: {e}")))?,
        );
    }
    let z = coords.pop().unwrap();
    let y = coords.pop().unwrap();
    let x = coords.pop().unwrap();
    Ok(SurfacePointQ::new(x, y, z))
}

/// Loads a surface file; malformed JSON is a parse error, well-formed JSON
/// that violates the surface schema is a schema error.
pub fn load_surface(path: &str) -> Result<WehlerSurface, RunError> {
    let text =
        fs::read_to_string(path).map_err(|e| RunError::Parse(format!("cannot read {path}: {e}")))?;
    if let Err(e) = serde_json::from_str::<Value>(&text) {
        return Err(RunError::Parse(format!("{path}: {e}")));
    }
    WehlerSurface::from_json_str(&text).map_err(|e| RunError::Schema(format!("{path}: {e}")))
}

/// Parses a 2x2 matrix over the order: entries are integers or `[a, b]`
/// pairs meaning `a + b·ι`, e.g. "[[2,1],[1,1]]" or "[[[0,1],0],[0,[0,1]]]".
pub fn parse_torus_matrix(s: &str) -> Result<[[OrderElem; 2]; 2], RunError> {
    let value: Value =
        serde_json::from_str(s).map_err(|e| RunError::Parse(format!("bad matrix {s:?}: {e}")))?;
    let rows = value
        .as_array()
        .filter(|r| r.len() == 2)
        .ok_or_else(|| RunError::Schema(format!("matrix {s:?} must be a 2x2 array")))?;
    let mut out = [[OrderElem::int(0); 2]; 2];
    for (i, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| RunError::Schema(format!("matrix {s:?} must be a 2x2 array")))?;
        for (j, entry) in cols.iter().enumerate() {
            out[i][j] = parse_order_elem(entry)?;
        }
    }
    Ok(out)
}

fn parse_order_elem(v: &Value) -> Result<OrderElem, RunError> {
    if let Some(n) = v.as_i64() {
        return Ok(OrderElem::int(n));
    }
    if let Some(pair) = v.as_array() {
        if pair.len() == 2 {
            if let (Some(a), Some(b)) = (pair[0].as_i64(), pair[1].as_i64()) {
                return Ok(OrderElem::new(a, b));
            }
        }
    }
    Err(RunError::Schema(format!(
        "matrix entry {v} must be an integer or a two-element [a, b] pair"
    )))
}

/// Parses a torsion point "N:c0,c1,c2,c3" meaning (c0/N, c1/N, c2/N, c3/N).
pub fn parse_translation(s: &str) -> Result<TorsionPoint, RunError> {
    let (level, coords) = s
        .split_once(':')
        .ok_or_else(|| RunError::Parse(format!("translation {s:?} must have the form N:c,c,c,c")))?;
    let level: u64 = level
        .trim()
        .parse()
        .map_err(|e| RunError::Parse(format!("bad level {level:?}: {e}")))?;
    let parts: Vec<&str> = coords.split(',').collect();
    if parts.len() != 4 {
        return Err(RunError::Parse(format!(
            "translation {s:?} needs exactly four coordinates"
        )));
    }
    let mut c = [0i64; 4];
    for (slot, part) in c.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| RunError::Parse(format!("bad coordinate {part:?}: {e}")))?;
    }
    TorsionPoint::new(level, c).map_err(from_kummer)
}

fn point_to_value(p: &SurfacePointQ) -> Value {
    serde_json::to_value(p).expect("point serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Commands.
// ---------------------------------------------------------------------------

fn cmd_classify(letters: &[u8]) -> Result<Value, RunError> {
    let word = word_from_letters(letters)?;
    let record = classify_word_record(&word);
    // Unipotence is decidable exactly: (M - I)^rank vanishes.
    let m = crate::nsgeom::word_matrix(&word);
    let n = m.n();
    let nil = m.sub(&crate::numcore::IntMatrix::identity(n)).pow(n as u64);
    let unipotent = nil == crate::numcore::IntMatrix::zero(n);
    let mut value = serde_json::to_value(&record)
        .map_err(|e| RunError::Schema(format!("record serialization failed: {e}")))?;
    value["unipotent"] = Value::Bool(unipotent);
    Ok(value)
}

fn cmd_orbit(surface: &str, start: &str, budget: usize) -> Result<(Value, i32, Option<String>), RunError> {
    if budget == 0 {
        return Err(RunError::Schema("budget must be at least 1".into()));
    }
    let s = load_surface(surface)?;
    let pt = parse_start(start)?;
    if !s.is_on_surface_q(&pt) {
        return Err(RunError::Domain(format!(
            "start point {pt} does not lie on surface {}",
            s.name()
        )));
    }
    match orbit_closure(&s, &pt, budget).map_err(from_wehler)? {
        OrbitResult::Finite(points) => Ok((
            json!({
                "tag": "finite",
                "size": points.len(),
                "points": points.iter().map(point_to_value).collect::<Vec<_>>(),
            }),
            0,
            None,
        )),
        OrbitResult::BudgetExceeded { visited, frontier } => Ok((
            json!({
                "tag": "budget-exceeded",
                "visited": visited,
                "frontier": frontier.len(),
            }),
            3,
            None,
        )),
    }
}

fn cmd_census(
    surface: &str,
    primes: &[u64],
    partition: bool,
    config: &RunConfig,
) -> Result<(Value, i32, Option<String>), RunError> {
    if primes.is_empty() {
        return Err(RunError::Schema("census needs at least one --prime".into()));
    }
    if config.csv && !(partition && primes.len() == 1) {
        return Err(RunError::Schema(
            "CSV output requires --partition and exactly one --prime".into(),
        ));
    }
    let s = load_surface(surface)?;
    let mut runs = Vec::new();
    let mut csv = None;
    for &p in primes {
        if partition {
            let part = fp_orbit_partition(&s, p, config.workers).map_err(from_wehler)?;
            if config.csv {
                csv = Some(part.histogram_csv());
            }
            runs.push(serde_json::to_value(&part).expect("partition serialization cannot fail"));
        } else {
            let count = fp_point_census(&s, p, config.workers).map_err(from_wehler)?;
            runs.push(json!({ "prime": p, "census": count }));
        }
    }
    Ok((json!({ "surface": s.name(), "runs": runs }), 0, csv))
}

fn cmd_height(
    surface: &str,
    letters: &[u8],
    start: &str,
    iterations: u32,
) -> Result<Value, RunError> {
    let s = load_surface(surface)?;
    let word = word_from_letters(letters)?;
    let pt = parse_start(start)?;
    if !s.is_on_surface_q(&pt) {
        return Err(RunError::Domain(format!(
            "start point {pt} does not lie on surface {}",
            s.name()
        )));
    }
    let budget = HeightBudget::default();
    let report = height_report(&s, &word, &pt, iterations, &budget).map_err(from_height)?;
    let value = serde_json::to_value(&report)
        .map_err(|e| RunError::Schema(format!("height serialization failed: {e}")))?;
    Ok(json!({ "iterations": iterations, "report": value }))
}

fn cmd_stationary(
    surface: &str,
    words: &[Vec<u8>],
    weights: &[String],
    start: &str,
    depth: u32,
    config: &RunConfig,
) -> Result<Value, RunError> {
    if words.is_empty() {
        return Err(RunError::Schema(
            "stationary needs at least one --word in the support".into(),
        ));
    }
    let support: Vec<GroupWord> = words
        .iter()
        .map(|w| word_from_letters(w))
        .collect::<Result<_, _>>()?;
    let measure = if weights.is_empty() {
        MeasureSpec::uniform(support).map_err(from_ns)?
    } else {
        let parsed = weights
            .iter()
            .map(|w| {
                parse_rational(w).ok_or_else(|| RunError::Parse(format!("bad weight {w:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MeasureSpec::new(support, parsed).map_err(from_ns)?
    };
    let s = load_surface(surface)?;
    let pt = parse_start(start)?;
    if !s.is_on_surface_q(&pt) {
        return Err(RunError::Domain(format!(
            "start point {pt} does not lie on surface {}",
            s.name()
        )));
    }
    let tol = config.tol.unwrap_or(1e-9);
    let (form, _) = wehler_ns_rep();
    let kappa0 = wehler_kappa0();
    let operator = stationary_operator(&measure);
    let (w_class, alpha) = dominant_eigen(&operator, &form, &kappa0, tol).map_err(from_ns)?;
    let class = heights::ClassWeights::from_real_class(&w_class).map_err(from_height)?;
    let value =
        heights::stationary_height(&s, &measure, &class, alpha, &pt, depth, &HeightBudget::default())
            .map_err(from_height)?;
    Ok(json!({
        "alpha": alpha,
        "class_weights": w_class.coords,
        "depth": depth,
        "measure": serde_json::to_value(&measure).expect("measure serialization cannot fail"),
        "value": value.value,
        "error": value.error,
    }))
}

fn cmd_torus_fix(
    matrix: &str,
    order: &str,
    power: u32,
    translation: Option<&str>,
) -> Result<Value, RunError> {
    let entries = parse_torus_matrix(matrix)?;
    let order: QuadOrder = order.parse().map_err(from_kummer)?;
    let t = match translation {
        Some(spec) => parse_translation(spec)?,
        None => TorsionPoint::zero(),
    };
    let f = TorusAut::new(order, entries, t.clone()).map_err(from_kummer)?;
    let count = torus_fixed_count(&f, power).map_err(from_kummer)?;
    let mut results = json!({
        "order": order.to_string(),
        "power": power,
        "translation": t.to_string(),
    });
    match count {
        FixedCount::Finite(c) => {
            results["count"] =
                Value::Number(serde_json::Number::from_string_unchecked(c.to_string()));
        }
        FixedCount::InfiniteFixedLocus => {
            results["verdict"] = Value::String("infinite-fixed-locus".into());
        }
    }
    Ok(results)
}

fn cmd_kummer_charts(report: bool) -> Value {
    // The constructor verifies every relation; reaching this point already
    // certifies the atlas.
    let atlas = chart_atlas();
    if !report {
        return json!({ "validated": true, "charts": 3 });
    }
    let transitions: Vec<Value> = (0..2)
        .map(|k| {
            let t = atlas.transition(k);
            json!([t.column(0), t.column(1)])
        })
        .collect();
    let charts: Vec<Value> = (0..3)
        .map(|i| {
            let c = atlas.chart_coord_exps(i);
            json!({ "v": c[0], "w": c[1] })
        })
        .collect();
    let quotient: Vec<Value> = (0..4).map(|i| json!(atlas.quotient_exp(i))).collect();
    let multipliers: Vec<Value> = (0..3)
        .flat_map(|i| {
            let c = atlas.chart_coord_exps(i);
            [
                json!({
                    "coordinate": format!("v{i}"),
                    "exponents": [equivariant_multiplier(c[0]).alpha_exp,
                                  equivariant_multiplier(c[0]).beta_exp],
                }),
                json!({
                    "coordinate": format!("w{i}"),
                    "exponents": [equivariant_multiplier(c[1]).alpha_exp,
                                  equivariant_multiplier(c[1]).beta_exp],
                }),
            ]
        })
        .collect();
    let hj: Vec<Value> = [(5u64, 2u64), (2, 1), (3, 1)]
        .iter()
        .map(|&(n, q)| {
            let s = CyclicSingularity::new(n, q).expect("tabled singularities are valid");
            json!({ "n": n, "q": q, "string": hirzebruch_jung(&s) })
        })
        .collect();
    // Illustrative hyperbolic moduli for the saddle report.
    let (aa, ab) = (2.0, 0.5);
    let saddles: Vec<Value> = exceptional_fixed_points(&atlas, aa, ab)
        .expect("2 > 1 > 1/2 satisfies the preconditions")
        .iter()
        .map(|r| {
            json!({
                "curve": r.curve,
                "fixed_points": r.fixed_points,
                "tangent_exponents": [r.tangent.alpha_exp, r.tangent.beta_exp],
                "tangent_magnitude": r.tangent_magnitude,
                "transverse_exponents": [r.transverse.alpha_exp, r.transverse.beta_exp],
                "transverse_magnitude": r.transverse_magnitude,
                "saddle": r.saddle,
            })
        })
        .collect();
    json!({
        "charts": charts,
        "transitions": transitions,
        "quotient_exponents": quotient,
        "relations": ["u0 u2 = u1^2", "u1 u3 = u2^3"],
        "multipliers": multipliers,
        "hirzebruch_jung": hj,
        "exceptional_fixed_points": {
            "abs_alpha": aa,
            "abs_beta": ab,
            "curves": saddles,
        },
    })
}

fn cmd_acceptance(
    config: &RunConfig,
    corrupt_spectral_gate: bool,
) -> Result<(Value, i32, Option<String>), RunError> {
    let acc = AcceptanceConfig {
        seed: config.seed,
        tol_override: config.tol,
        corrupt_spectral_gate,
        workers: config.workers,
    };
    let criteria = acceptance::run_all(&acc);
    let failed = criteria.iter().filter(|c| !c.pass).count();
    let rows: Vec<Value> = criteria
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "name": c.name,
                "pass": c.pass,
                "detail": c.detail,
            })
        })
        .collect();
    let value = json!({
        "criteria": rows,
        "passed": criteria.len() - failed,
        "failed": failed,
    });
    Ok((value, if failed == 0 { 0 } else { 1 }, None))
}

//! Run configuration, the registry of invariant checks, the suite runner and
//! the JSON/CSV/SVG emitters.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::{
    ds_constant, ds_ratio, estimate_constant, fs_infimum, grobler_dodds, sample_family, Direction, GrowthPoint,
    SamplerConfig, Shape,
};
use crate::error::{LatticeError, Result};
use crate::exec::Exec;
use crate::interp::{cm_majorization_check, cm_orbit_operator, k_curve, k_functional, rs_relation_test, CoupleSpec, Element, KCurve, RsGrid};
use crate::norms::{luxemburg_modular, luxemburg_norm, seq_norm, LatticeSpec};
use crate::numeric::{log_grid, log_log_slope, lp_norm, rng_for, round_json, Exponent};
use crate::optimal::{phi_n, xl_norm, xu_norm, BoundKind, DisjointFamily, FamilyMembers, OptimalConfig, Witness};
use crate::optimizer::SearchConfig;
use crate::rearrangement::{SeqVector, StepFunction};
use crate::special::{delta2_constant, dilation_function, fundamental_function, legendre_sup, Modular, OrliczFunction, V_MAX};

/// Environment variable naming a [`RunConfig`] JSON file.
pub const CONFIG_ENV: &str = "RILAT_CONFIG";

const MANIFEST: &str = include_str!("invariants.tsv");

pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("convexity", 1e-10),
    ("inverse", 1e-10),
    ("normalization", 1e-12),
    ("quasi_concave", 1e-9),
    ("conjugate", 1e-6),
    ("dilation_grid", 1e-6),
    ("measure", 1e-12),
    ("lattice", 1e-10),
    ("invariance", 1e-12),
    ("triangle", 1e-9),
    ("attainment", 1e-8),
    ("unit_norm", 1e-9),
    ("embedding", 1e-10),
    ("symmetry", 1e-9),
    ("optimizer", 0.02),
    ("index_slope", 0.05),
    ("estimate_floor", 1e-9),
    ("witness", 1e-8),
    ("holder_slope", 0.05),
    ("holder_unit", 1e-9),
    ("fs_lower", 1e-6),
    ("fs_slack", 1.25),
    ("kcurve", 1e-9),
    ("subadditivity", 1e-9),
    ("validator", 1e-10),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    pub n_cap: usize,
    pub starts: usize,
    pub max_parts: usize,
    pub grid_points: usize,
    /// Random instances per check.
    pub samples: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { n_cap: 8, starts: 8, max_parts: 3, grid_points: 61, samples: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub caps: Caps,
    pub output: OutputFormat,
    pub exec: Exec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, tolerances: BTreeMap::new(), caps: Caps::default(), output: OutputFormat::Json, exec: Exec::default() }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.tolerances {
            if !DEFAULT_TOLERANCES.iter().any(|(name, _)| name == k) {
                return Err(LatticeError::InvalidSpec(format!("unknown tolerance key {k}")));
            }
            if !(*v > 0.0) {
                return Err(LatticeError::InvalidSpec(format!("tolerance {k} must be positive")));
            }
        }
        if self.caps.n_cap == 0 || self.caps.starts == 0 || self.caps.samples == 0 || self.caps.grid_points < 3 {
            return Err(LatticeError::InvalidSpec("caps must be positive (grid_points >= 3)".into()));
        }
        Ok(())
    }

    /// Tolerance by name: the override if present, else the default.
    pub fn tol(&self, key: &str) -> f64 {
        self.tolerances
            .get(key)
            .copied()
            .or_else(|| DEFAULT_TOLERANCES.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
            .unwrap_or_else(|| panic!("no tolerance named {key}"))
    }

    pub fn optimal_config(&self) -> OptimalConfig {
        OptimalConfig {
            cap: self.caps.n_cap,
            max_parts: self.caps.max_parts,
            search: SearchConfig { starts: self.caps.starts, seed: self.seed, exec: self.exec, ..SearchConfig::default() },
            ..OptimalConfig::default()
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig { seed: self.seed, exec: self.exec, ..SamplerConfig::default() }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        rng_for(self.seed, stream)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub invariant: String,
    pub status: Status,
    pub measured: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSuiteResult {
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

impl VerificationSuiteResult {
    /// 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            1
        }
    }
}

struct Outcome {
    status: Status,
    measured: Vec<(&'static str, f64)>,
    tolerance: f64,
    detail: String,
}

fn judge(ok: bool, tolerance: f64, measured: Vec<(&'static str, f64)>, detail: impl Into<String>) -> Outcome {
    Outcome { status: if ok { Status::Pass } else { Status::Fail }, measured, tolerance, detail: detail.into() }
}

type CheckFn = fn(&RunConfig) -> Result<Outcome>;

struct Check {
    id: &'static str,
    run: CheckFn,
}

const REGISTRY: &[Check] = &[
    Check { id: "special.orlicz_function", run: check_orlicz_function },
    Check { id: "special.delta2_report", run: check_delta2_report },
    Check { id: "special.fundamental_quasi_concave", run: check_fundamental_quasi_concave },
    Check { id: "special.conjugate_duality", run: check_conjugate_duality },
    Check { id: "special.dilation_submultiplicative", run: check_dilation_submultiplicative },
    Check { id: "rearrangement.step_canonical", run: check_step_canonical },
    Check { id: "rearrangement.equimeasurable", run: check_equimeasurable },
    Check { id: "rearrangement.mass_conservation", run: check_mass_conservation },
    Check { id: "norms.lattice_monotone", run: check_lattice_monotone },
    Check { id: "norms.rearrangement_invariance", run: check_rearrangement_invariance },
    Check { id: "norms.homogeneity_triangle", run: check_homogeneity_triangle },
    Check { id: "norms.luxemburg_attainment", run: check_luxemburg_attainment },
    Check { id: "optimal.disjoint_family", run: check_disjoint_family },
    Check { id: "optimal.result_sandwich", run: check_result_sandwich },
    Check { id: "optimal.embedding_chain", run: check_embedding_chain },
    Check { id: "optimal.symmetry", run: check_symmetry },
    Check { id: "optimal.truncation", run: check_truncation },
    Check { id: "optimal.disjoint_blocks", run: check_disjoint_blocks },
    Check { id: "optimal.idempotence", run: check_idempotence },
    Check { id: "optimal.index_consistency", run: check_index_consistency },
    Check { id: "decomp.estimate_report", run: check_estimate_report },
    Check { id: "decomp.witness", run: check_decomp_witness },
    Check { id: "decomp.index_order", run: check_index_order },
    Check { id: "decomp.one_decomposable", run: check_one_decomposable },
    Check { id: "decomp.monotone_in_s", run: check_monotone_in_s },
    Check { id: "decomp.holder_boundary", run: check_holder_boundary },
    Check { id: "decomp.fs_sandwich", run: check_fs_sandwich },
    Check { id: "interp.kcurve_invariants", run: check_kcurve_invariants },
    Check { id: "interp.subadditivity", run: check_subadditivity },
    Check { id: "interp.operator_majorization", run: check_operator_majorization },
    Check { id: "interp.rs_infinity_agreement", run: check_rs_infinity_agreement },
    Check { id: "harness.determinism", run: check_determinism },
    Check { id: "harness.registry_coverage", run: check_registry_coverage },
];

/// `(id, invariant)` pairs of the shipped manifest.
pub fn manifest() -> Vec<(&'static str, &'static str)> {
    MANIFEST
        .lines()
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| l.split_once('\t'))
        .collect()
}

/// Registered check ids in registry order.
pub fn registry_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.id).collect()
}

fn invariant_of(id: &str) -> String {
    manifest().into_iter().find(|(k, _)| *k == id).map(|(_, v)| v.to_string()).unwrap_or_default()
}

/// Registry entries matching `selection` (ids or `module.` prefixes; empty
/// selects everything), in registry order.
fn select(selection: &[String]) -> Result<Vec<&'static Check>> {
    if selection.is_empty() {
        return Ok(REGISTRY.iter().collect());
    }
    for s in selection {
        let hit = REGISTRY.iter().any(|c| c.id == s || (s.ends_with('.') && c.id.starts_with(s.as_str())));
        if !hit {
            return Err(LatticeError::UnknownCheck(s.clone()));
        }
    }
    Ok(REGISTRY
        .iter()
        .filter(|c| selection.iter().any(|s| c.id == s || (s.ends_with('.') && c.id.starts_with(s.as_str()))))
        .collect())
}

/// Runs the selected checks concurrently and returns them in registry order.
pub fn run_verification_suite(config: &RunConfig, selection: &[String]) -> Result<VerificationSuiteResult> {
    config.validate()?;
    let checks = select(selection)?;
    let records = config.exec.map(&checks, |c| {
        let out = (c.run)(config).unwrap_or_else(|e| Outcome {
            status: Status::Fail,
            measured: Vec::new(),
            tolerance: 0.0,
            detail: format!("error: {e}"),
        });
        CheckRecord {
            id: c.id.to_string(),
            invariant: invariant_of(c.id),
            status: out.status,
            measured: out.measured.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            tolerance: out.tolerance,
            detail: out.detail,
        }
    });
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    Ok(VerificationSuiteResult {
        seed: config.seed,
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        inconclusive: count(Status::Inconclusive),
        checks: records,
    })
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// A numeric table: the first column is the abscissa of the SVG plot.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn from_kcurve(c: &KCurve) -> Self {
        Table {
            title: "K-functional".into(),
            columns: vec!["t".into(), "K".into()],
            rows: c.grid.iter().zip(&c.values).map(|(t, k)| vec![*t, *k]).collect(),
        }
    }

    pub fn from_growth(title: &str, g: &[GrowthPoint]) -> Self {
        Table {
            title: title.into(),
            columns: vec!["n".into(), "value".into(), "log_n".into(), "log_value".into()],
            rows: g
                .iter()
                .map(|p| {
                    let v = crate::numeric::sig12(p.value);
                    vec![p.n as f64, v, (p.n as f64).ln(), v.ln()]
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| fmt12(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Line plot of every column against the first; log axes when all
    /// plotted values are positive.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 400.0, 50.0);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
             <text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
            w / 2.0,
            escape(&self.title)
        );
        out.push_str(&format!(
            "<line x1=\"{pad}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{0}\" stroke=\"black\"/>\n",
            h - pad,
            w - pad
        ));
        let ncols = self.columns.len();
        let finite: Vec<&Vec<f64>> = self.rows.iter().filter(|r| r.len() == ncols && r.iter().all(|x| x.is_finite())).collect();
        if ncols < 2 || finite.is_empty() {
            out.push_str("</svg>\n");
            return out;
        }
        let xs: Vec<f64> = finite.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = finite.iter().flat_map(|r| r[1..].iter().copied()).collect();
        let logx = xs.iter().all(|x| *x > 0.0);
        let logy = ys.iter().all(|y| *y > 0.0);
        let tx = |x: f64| if logx { x.ln() } else { x };
        let ty = |y: f64| if logy { y.ln() } else { y };
        let (x0, x1) = bounds(xs.iter().map(|x| tx(*x)));
        let (y0, y1) = bounds(ys.iter().map(|y| ty(*y)));
        let sx = |x: f64| pad + (tx(x) - x0) / (x1 - x0) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (ty(y) - y0) / (y1 - y0) * (h - 2.0 * pad);
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
        for c in 1..ncols {
            let pts: Vec<String> = finite.iter().map(|r| format!("{:.3},{:.3}", sx(r[0]), sy(r[c]))).collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                colors[(c - 1) % colors.len()],
                pts.join(" ")
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>\n",
                w - pad - 90.0,
                pad + 14.0 * c as f64,
                colors[(c - 1) % colors.len()],
                escape(&self.columns[c])
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}{}</text>\n",
            w / 2.0,
            h - 12.0,
            escape(&self.columns[0]),
            if logx { " (log)" } else { "" }
        ));
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{}", crate::numeric::sig12(x))
    }
}

/// Renders a result: JSON from `value`, CSV or SVG from `table`. Without a
/// table the CSV/SVG output is an empty table.
pub fn emit_report<T: Serialize>(value: &T, table: Option<&Table>, format: OutputFormat) -> Result<String> {
    let empty = Table::default();
    let t = table.unwrap_or(&empty);
    match format {
        OutputFormat::Json => to_json(value),
        OutputFormat::Csv => Ok(t.to_csv()),
        OutputFormat::Svg => Ok(t.to_svg()),
    }
}

/// Table of a suite result, one row per check: index, status code
/// (1 pass, 0 fail, 0.5 inconclusive).
pub fn suite_table(r: &VerificationSuiteResult) -> Table {
    Table {
        title: "verification suite".into(),
        columns: vec!["check".into(), "status".into()],
        rows: r
            .checks
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let s = match c.status {
                    Status::Pass => 1.0,
                    Status::Fail => 0.0,
                    Status::Inconclusive => 0.5,
                };
                vec![i as f64, s]
            })
            .collect(),
    }
}

pub fn write_report(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

// ---- instance generators ----

fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn random_step(rng: &mut impl Rng, atoms: usize) -> StepFunction {
    let w: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum::<f64>() * rng.gen_range(1.0..1.5);
    StepFunction::new(w.iter().map(|m| (rng.gen_range(-4.0..4.0), m / s)).collect()).unwrap_or_else(|_| StepFunction::zero())
}

fn sample_functions() -> Vec<OrliczFunction> {
    let mut v = Vec::new();
    v.extend(OrliczFunction::power(1.5));
    v.extend(OrliczFunction::power_log(2.0, 1.0));
    v.extend(OrliczFunction::tabulated(vec![(0.5, 0.2), (1.0, 1.0), (2.0, 3.5), (4.0, 10.0), (8.0, 30.0)]));
    v
}

fn closed_hosts() -> Vec<LatticeSpec> {
    vec![
        LatticeSpec::lp(1.0),
        LatticeSpec::lp(1.5),
        LatticeSpec::lp(3.0),
        LatticeSpec::C0,
        LatticeSpec::lorentz(2.0, 1.0),
        LatticeSpec::lorentz(2.0, 3.0),
        LatticeSpec::lorentz(3.0, 2.0),
        LatticeSpec::WeightedLp { p: Exponent(2.0), weights: vec![1.0, 2.0, 0.5, 3.0, 1.5, 0.25, 4.0, 1.0] },
    ]
}

fn orlicz_host() -> LatticeSpec {
    LatticeSpec::orlicz(OrliczFunction::power_log(2.0, 1.0).expect("valid parameters"))
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

// ---- special functions ----

fn check_orlicz_function(cfg: &RunConfig) -> Result<Outcome> {
    let (tc, ti, tn) = (cfg.tol("convexity"), cfg.tol("inverse"), cfg.tol("normalization"));
    let mut worst_convex: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut ok = true;
    for m in sample_functions() {
        let top = m.max_arg().unwrap_or(1e3);
        let ts: Vec<f64> = std::iter::once(0.0).chain(log_grid(1e-3, top, cfg.caps.grid_points)).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| m.value(t)).collect();
        for i in 1..ts.len() - 1 {
            let s0 = (vs[i] - vs[i - 1]) / (ts[i] - ts[i - 1]);
            let s1 = (vs[i + 1] - vs[i]) / (ts[i + 1] - ts[i]);
            let bad = (s0 - s1) / s0.abs().max(1.0);
            worst_convex = worst_convex.max(bad);
            ok &= s0 >= 0.0 && bad <= tc;
        }
        ok &= m.value(0.0) == 0.0;
        worst_norm = worst_norm.max((m.value(1.0) - 1.0).abs());
        let ytop = m.value(top);
        for y in log_grid(1e-6, ytop, cfg.caps.grid_points) {
            let e = (m.value(Modular::inverse(&m, y)) - y).abs() / y.max(1.0);
            worst_inv = worst_inv.max(e);
        }
    }
    ok &= worst_inv <= ti && worst_norm <= tn;
    Ok(judge(ok, tc, vec![("convexity_defect", worst_convex), ("inverse_error", worst_inv), ("normalization_error", worst_norm)], "power, powerlog and tabulated samples"))
}

fn check_delta2_report(_cfg: &RunConfig) -> Result<Outcome> {
    let mut ok = true;
    let mut min_margin = f64::INFINITY;
    for m in sample_functions() {
        let mut prev = 0.0;
        for u in [2.0, 10.0, 100.0, 1e3, 1e4] {
            let r = delta2_constant(&m, u)?;
            ok &= r.constant_k >= prev;
            prev = r.constant_k;
            min_margin = min_margin.min(r.constant_k - m.value(2.0));
        }
    }
    ok &= min_margin >= -1e-12;
    Ok(judge(ok, 0.0, vec![("min_k_minus_m2", min_margin)], "ranges [1, u] for u up to 1e4"))
}

fn check_fundamental_quasi_concave(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("quasi_concave");
    let mut hosts: Vec<LatticeSpec> = sample_functions().into_iter().map(LatticeSpec::orlicz).collect();
    hosts.push(LatticeSpec::lorentz(2.0, 3.0));
    hosts.push(LatticeSpec::lorentz(3.0, 1.0));
    let ts = log_grid(1e-4, 1.0, cfg.caps.grid_points);
    let mut worst: f64 = 0.0;
    for h in &hosts {
        let phis = ts.iter().map(|&t| fundamental_function(h, t)).collect::<Result<Vec<_>>>()?;
        for i in 1..ts.len() {
            worst = worst.max((phis[i - 1] - phis[i]) / phis[i]);
            worst = worst.max((phis[i] / ts[i] - phis[i - 1] / ts[i - 1]) / (phis[i - 1] / ts[i - 1]));
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_violation", worst)], "Orlicz and Lorentz hosts on a log grid of (0, 1]"))
}

fn check_conjugate_duality(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("conjugate");
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0] {
        let m = OrliczFunction::power(p)?;
        for t in log_grid(0.1, 10.0, 9) {
            let back = legendre_sup(|u| m.young_conjugate(u).unwrap_or(f64::INFINITY), t)?;
            worst = worst.max(rel_gap(back, t.powf(p)));
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_relative_error", worst)], "p in {1.5, 2, 3}, t in [0.1, 10]"))
}

fn check_dilation_submultiplicative(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("dilation_grid");
    let g = |v: f64| v.sqrt() * (3.0 + v.ln().sin());
    let mut rng = cfg.rng(5);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for _ in 0..cfg.caps.samples {
        let (u1, u2) = (rng.gen_range(0.05..20.0), rng.gen_range(0.05..20.0));
        let d12 = dilation_function(g, u1 * u2, V_MAX)?;
        let d1 = dilation_function(g, u1, V_MAX)?;
        let d2 = dilation_function(g, u2, V_MAX)?;
        if d12.truncated || d1.truncated || d2.truncated {
            continue;
        }
        used += 1;
        worst = worst.max(d12.value / (d1.value * d2.value) - 1.0);
    }
    let status = if used == 0 { Status::Inconclusive } else if worst <= tol { Status::Pass } else { Status::Fail };
    Ok(Outcome { status, measured: vec![("worst_excess", worst), ("pairs", used as f64)], tolerance: tol, detail: "log-periodic test function".into() })
}

// ---- rearrangement ----

fn check_step_canonical(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("measure");
    let mut rng = cfg.rng(6);
    let mut ok = true;
    for _ in 0..cfg.caps.samples {
        let k = rng.gen_range(1..6);
        let f = random_step(&mut rng, k);
        let a = f.atoms();
        ok &= a.iter().all(|x| x.1 > 0.0 && x.0 != 0.0);
        ok &= f.support_measure() <= 1.0 + tol;
        ok &= a.windows(2).all(|w| w[0].0.abs() >= w[1].0.abs());
        let v = SeqVector::from(random_vec(&mut rng, k).into_iter().map(|x| if x < 0.0 { 0.0 } else { x }).collect::<Vec<_>>());
        ok &= v.support().iter().all(|&i| v.entries[i] != 0.0) && v.support().len() == v.entries.iter().filter(|x| **x != 0.0).count();
    }
    ok &= StepFunction::new(vec![(1.0, 0.7), (2.0, 0.7)]).is_err();
    Ok(judge(ok, tol, vec![], "random step functions and sequences; an over-full function is rejected"))
}

fn check_equimeasurable(cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = cfg.rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.caps.samples {
        let f = { let k = rng.gen_range(1..6); random_step(&mut rng, k) };
        let s = f.decreasing_rearrangement();
        for tau in log_grid(1e-3, 5.0, 25) {
            worst = worst.max((f.distribution_function(tau) - s.distribution_function(tau)).abs());
        }
    }
    let tol = cfg.tol("measure");
    Ok(judge(worst <= tol, tol, vec![("worst_gap", worst)], "distribution functions of f and f*"))
}

fn check_mass_conservation(cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = cfg.rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.caps.samples {
        let f = { let k = rng.gen_range(1..6); random_step(&mut rng, k) };
        let direct: f64 = f.atoms().iter().map(|a| a.0.abs() * a.1).sum();
        worst = worst.max(rel_gap(f.rearrangement_integral(1.0), direct));
    }
    let tol = cfg.tol("measure");
    Ok(judge(worst <= tol, tol, vec![("worst_relative_gap", worst)], "integral of f* over [0, 1]"))
}

// ---- norms ----

fn all_hosts() -> Vec<LatticeSpec> {
    let mut v = closed_hosts();
    v.extend(sample_functions().into_iter().map(LatticeSpec::orlicz));
    v.push(LatticeSpec::OrliczSeq { psi: OrliczFunction::power(2.5).expect("valid exponent") });
    v
}

/// `(norm of a, norm of b)` for a pair built on a shared support.
fn pair_norms(h: &LatticeSpec, a: &[f64], b: &[f64], measures: &[f64]) -> Result<(f64, f64)> {
    if h.accepts_sequences() {
        Ok((seq_norm(&SeqVector::from(a.to_vec()), h)?, seq_norm(&SeqVector::from(b.to_vec()), h)?))
    } else {
        let mk = |v: &[f64]| StepFunction::new(v.iter().zip(measures).map(|(x, m)| (*x, *m)).collect());
        Ok((h.step_norm(&mk(a)?)?, h.step_norm(&mk(b)?)?))
    }
}

fn partition(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum::<f64>() * rng.gen_range(1.0..1.3);
    w.iter().map(|x| x / s).collect()
}

fn host_norm(h: &LatticeSpec, v: &[f64], measures: &[f64]) -> Result<f64> {
    pair_norms(h, v, v, measures).map(|p| p.0)
}

fn check_lattice_monotone(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("lattice");
    let mut rng = cfg.rng(9);
    let mut worst: f64 = 0.0;
    for h in all_hosts() {
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(1..8);
            let b = random_vec(&mut rng, n);
            let a: Vec<f64> = b.iter().map(|x| x * rng.gen_range(0.0..1.0)).collect();
            let ms = partition(&mut rng, n);
            let (na, nb) = pair_norms(&h, &a, &b, &ms)?;
            worst = worst.max((na - nb) / nb.max(1e-300));
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_excess", worst)], "|a| <= |b| on every host kind"))
}

fn check_rearrangement_invariance(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("invariance");
    let mut rng = cfg.rng(10);
    let mut worst: f64 = 0.0;
    for h in all_hosts().into_iter().filter(|h| !matches!(h, LatticeSpec::WeightedLp { .. })) {
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(1..8);
            let a = random_vec(&mut rng, n);
            let ms = partition(&mut rng, n);
            let base = host_norm(&h, &a, &ms)?;
            let other = if h.accepts_sequences() {
                let mut b = a.clone();
                b.shuffle(&mut rng);
                b.push(0.0);
                seq_norm(&SeqVector::from(b), &h)?
            } else {
                // split the first atom in two
                let mut atoms: Vec<(f64, f64)> = a.iter().zip(&ms).map(|(x, m)| (*x, *m)).collect();
                let (v, m) = atoms[0];
                atoms[0] = (v, m * 0.3);
                atoms.push((v, m * 0.7));
                atoms.shuffle(&mut rng);
                h.step_norm(&StepFunction::new(atoms)?)?
            };
            worst = worst.max(rel_gap(base, other));
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_relative_gap", worst)], "permuted sequences and split atoms"))
}

fn check_homogeneity_triangle(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("triangle");
    let mut rng = cfg.rng(11);
    let (mut worst_h, mut worst_t): (f64, f64) = (0.0, 0.0);
    for h in all_hosts() {
        let c = h.quasi_triangle_constant();
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(1..8);
            let a = random_vec(&mut rng, n);
            let b = random_vec(&mut rng, n);
            let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lam: f64 = rng.gen_range(-3.0..3.0);
            let la: Vec<f64> = a.iter().map(|x| x * lam).collect();
            let ms = partition(&mut rng, n);
            let (na, nb) = pair_norms(&h, &a, &b, &ms)?;
            let nab = host_norm(&h, &ab, &ms)?;
            let nla = host_norm(&h, &la, &ms)?;
            worst_h = worst_h.max(rel_gap(nla, lam.abs() * na));
            worst_t = worst_t.max((nab - c * (na + nb)) / (c * (na + nb)).max(1e-300));
        }
    }
    Ok(judge(
        worst_h <= tol && worst_t <= tol,
        tol,
        vec![("worst_homogeneity", worst_h), ("worst_triangle_excess", worst_t)],
        "quasi-triangle constant used for Lorentz hosts with q > p",
    ))
}

fn check_luxemburg_attainment(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("attainment");
    let mut rng = cfg.rng(12);
    let mut worst: f64 = 0.0;
    for m in sample_functions() {
        for _ in 0..cfg.caps.samples {
            let f = { let k = rng.gen_range(1..6); random_step(&mut rng, k) };
            if f.is_zero() {
                continue;
            }
            let lam = luxemburg_norm(&f, &m);
            worst = worst.max((luxemburg_modular(&f, &m, lam) - 1.0).abs());
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_modular_gap", worst)], "modular at the computed norm"))
}

// ---- optimal spaces ----

fn check_disjoint_family(cfg: &RunConfig) -> Result<Outcome> {
    let host = LatticeSpec::lp(2.0);
    let e = |i: usize| SeqVector::unit(3, i);
    let good = DisjointFamily::new(host.clone(), FamilyMembers::Seqs(vec![e(0), e(2)])).is_ok();
    let overlap = matches!(
        DisjointFamily::new(host.clone(), FamilyMembers::Seqs(vec![e(1), SeqVector::from(vec![0.0, 1.0, 0.0])])),
        Err(LatticeError::InvalidFamily(_))
    );
    let scaled = matches!(
        DisjointFamily::new(host, FamilyMembers::Seqs(vec![SeqVector::from(vec![2.0, 0.0])])),
        Err(LatticeError::InvalidFamily(_))
    );
    let lorentz = LatticeSpec::lorentz(2.0, 1.0);
    let steps = FamilyMembers::Steps(vec![StepFunction::indicator(1.0, 0.6)?, StepFunction::indicator(1.0, 0.6)?]);
    let overfull = matches!(DisjointFamily::new(lorentz.clone(), steps), Err(LatticeError::InvalidFamily(_)));
    let chars = DisjointFamily::characteristic(&lorentz, &[0.2, 0.3, 0.1]).is_ok();
    let ok = good && overlap && scaled && overfull && chars;
    Ok(judge(ok, cfg.tol("unit_norm"), vec![], "valid, overlapping, non-unit and over-full families"))
}

fn check_result_sandwich(cfg: &RunConfig) -> Result<Outcome> {
    let oc = cfg.optimal_config();
    let mut rng = cfg.rng(13);
    let mut ok = true;
    let mut worst_witness: f64 = 0.0;
    for h in closed_hosts().into_iter().chain(std::iter::once(orlicz_host())) {
        let n = if matches!(h, LatticeSpec::OrliczFn { .. }) { 3 } else { 6 };
        let a = SeqVector::from(random_vec(&mut rng, n));
        for r in [xu_norm(&a, &h, &oc)?, phi_n(&a, &h, &oc)?, xl_norm(&a, &h, &oc)?] {
            ok &= r.lo <= r.hi * (1.0 + 1e-12);
            if r.bound_kind == BoundKind::Exact {
                if let Some(Witness::UnitVectors { n }) = r.witness {
                    let fam = DisjointFamily::new(
                        h.clone(),
                        FamilyMembers::Seqs((0..n).map(|i| unit_for(&h, n, i)).collect()),
                    )?;
                    worst_witness = worst_witness.max(rel_gap(fam.combination_norm(a.as_slice())?, r.value));
                }
            }
        }
    }
    let tol = cfg.tol("witness");
    ok &= worst_witness <= tol;
    Ok(judge(ok, tol, vec![("worst_witness_gap", worst_witness)], "xu, phi_n and xl on every supported host"))
}

fn unit_for(h: &LatticeSpec, n: usize, i: usize) -> SeqVector {
    let mut v = SeqVector::unit(n, i);
    if let LatticeSpec::WeightedLp { weights, .. } = h {
        v.entries[i] = 1.0 / weights[i];
    }
    v
}

fn check_embedding_chain(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("embedding");
    let oc = cfg.optimal_config();
    let mut rng = cfg.rng(14);
    let mut worst: f64 = 0.0;
    for h in closed_hosts() {
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(1..=8);
            let a = random_vec(&mut rng, n);
            let sv = SeqVector::from(a.clone());
            let (xl, xu) = (xl_norm(&sv, &h, &oc)?, xu_norm(&sv, &h, &oc)?);
            let chain = [lp_norm(&a, f64::INFINITY), xl.value, xu.value, lp_norm(&a, 1.0)];
            for w in chain.windows(2) {
                worst = worst.max((w[0] - w[1]) / w[1].max(1e-300));
            }
        }
    }
    let closed_ok = worst <= tol;
    let opt = cfg.tol("optimizer");
    let mut worst_orlicz: f64 = 0.0;
    let h = orlicz_host();
    for _ in 0..(cfg.caps.samples / 4).max(2) {
        let n = rng.gen_range(1..=3);
        let a = random_vec(&mut rng, n);
        let sv = SeqVector::from(a.clone());
        let (xl, xu) = (xl_norm(&sv, &h, &oc)?, xu_norm(&sv, &h, &oc)?);
        let pairs = [(lp_norm(&a, f64::INFINITY), xl.hi), (xl.lo, xu.hi), (xu.hi, lp_norm(&a, 1.0))];
        for (x, y) in pairs {
            worst_orlicz = worst_orlicz.max((x - y) / y.max(1e-300));
        }
    }
    Ok(judge(
        closed_ok && worst_orlicz <= opt,
        tol,
        vec![("worst_closed_form", worst), ("worst_orlicz", worst_orlicz)],
        "closed-form hosts exactly, Orlicz host through its sandwich",
    ))
}

fn check_symmetry(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("symmetry");
    let oc = cfg.optimal_config();
    let mut rng = cfg.rng(15);
    let mut worst: f64 = 0.0;
    for h in closed_hosts().into_iter().filter(|h| !matches!(h, LatticeSpec::WeightedLp { .. })) {
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(1..=8);
            let a = random_vec(&mut rng, n);
            let mut b = a.clone();
            b.shuffle(&mut rng);
            let (sa, sb) = (SeqVector::from(a), SeqVector::from(b));
            worst = worst.max(rel_gap(xu_norm(&sa, &h, &oc)?.value, xu_norm(&sb, &h, &oc)?.value));
            worst = worst.max(rel_gap(xl_norm(&sa, &h, &oc)?.value, xl_norm(&sb, &h, &oc)?.value));
        }
    }
    let h = orlicz_host();
    let mut overlap = true;
    for _ in 0..2 {
        let a = random_vec(&mut rng, 3);
        let b = vec![a[2], a[0], a[1]];
        let (ra, rb) = (xu_norm(&SeqVector::from(a), &h, &oc)?, xu_norm(&SeqVector::from(b), &h, &oc)?);
        overlap &= ra.lo <= rb.hi * (1.0 + 1e-9) && rb.lo <= ra.hi * (1.0 + 1e-9);
    }
    Ok(judge(worst <= tol && overlap, tol, vec![("worst_relative_gap", worst)], "permutations of random vectors"))
}

fn check_truncation(cfg: &RunConfig) -> Result<Outcome> {
    let oc = cfg.optimal_config();
    let mut rng = cfg.rng(16);
    let mut worst: f64 = 0.0;
    for h in closed_hosts() {
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(2..=8);
            let a = random_vec(&mut rng, n);
            let (full, cut) = (SeqVector::from(a.clone()), SeqVector::from(a[..n - 1].to_vec()));
            for f in [xu_norm, phi_n, xl_norm] {
                let (x, y) = (f(&cut, &h, &oc)?.value, f(&full, &h, &oc)?.value);
                worst = worst.max((x - y) / y.max(1e-300));
            }
        }
    }
    let tol = cfg.tol("embedding");
    let h = orlicz_host();
    let mut orlicz_ok = true;
    for _ in 0..2 {
        let a = random_vec(&mut rng, 3);
        let (full, cut) = (SeqVector::from(a.clone()), SeqVector::from(a[..2].to_vec()));
        let (x, y) = (xu_norm(&cut, &h, &oc)?, xu_norm(&full, &h, &oc)?);
        orlicz_ok &= x.lo <= y.hi * (1.0 + 1e-9);
    }
    Ok(judge(worst <= tol && orlicz_ok, tol, vec![("worst_increase", worst)], "last coordinate dropped"))
}

fn check_disjoint_blocks(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("embedding");
    let oc = cfg.optimal_config();
    let mut rng = cfg.rng(17);
    let mut worst: f64 = 0.0;
    for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        let h = LatticeSpec::lp(p);
        for _ in 0..cfg.caps.samples {
            let n = rng.gen_range(2..=8);
            let a = random_vec(&mut rng, n);
            let k = rng.gen_range(1..=n);
            let cuts: Vec<usize> = {
                let mut c: Vec<usize> = (1..n).collect();
                c.shuffle(&mut rng);
                let mut c: Vec<usize> = c.into_iter().take(k - 1).collect();
                c.sort();
                c
            };
            let mut bounds = vec![0];
            bounds.extend(cuts);
            bounds.push(n);
            let blocks: Vec<SeqVector> = bounds
                .windows(2)
                .map(|w| {
                    let mut v = vec![0.0; n];
                    v[w[0]..w[1]].copy_from_slice(&a[w[0]..w[1]]);
                    SeqVector::from(v)
                })
                .collect();
            let whole = SeqVector::from(a.clone());
            let xu_blocks = blocks.iter().map(|b| xu_norm(b, &h, &oc).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
            let xl_blocks = blocks.iter().map(|b| xl_norm(b, &h, &oc).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
            let lhs_u = xu_norm(&whole, &h, &oc)?.value;
            let rhs_u = xu_norm(&SeqVector::from(xu_blocks), &h, &oc)?.value;
            let lhs_l = xl_norm(&whole, &h, &oc)?.value;
            let rhs_l = xl_norm(&SeqVector::from(xl_blocks), &h, &oc)?.value;
            worst = worst.max((lhs_u - rhs_u) / rhs_u.max(1e-300));
            worst = worst.max((rhs_l - lhs_l) / lhs_l.max(1e-300));
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_excess", worst)], "random contiguous block families on lp hosts"))
}

fn check_idempotence(cfg: &RunConfig) -> Result<Outcome> {
    let oc = cfg.optimal_config();
    let mut rng = cfg.rng(18);
    let mut worst: f64 = 0.0;
    for p in [1.0, 1.5, 3.0, f64::INFINITY] {
        let h = LatticeSpec::lp(p);
        let d = grobler_dodds(&h)?.delta;
        let again = LatticeSpec::Lp { p: d };
        for _ in 0..cfg.caps.samples {
            let a = SeqVector::from({ let k = rng.gen_range(1..=8); random_vec(&mut rng, k) });
            worst = worst.max(rel_gap(xu_norm(&a, &h, &oc)?.value, xu_norm(&a, &again, &oc)?.value));
            worst = worst.max(rel_gap(xl_norm(&a, &h, &oc)?.value, xl_norm(&a, &again, &oc)?.value));
        }
    }
    Ok(judge(worst == 0.0, 0.0, vec![("worst_relative_gap", worst)], "optimal spaces of lp hosts re-hosted at their index"))
}

fn check_index_consistency(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("index_slope");
    let oc = cfg.optimal_config();
    let ns = [2usize, 4, 8, 16];
    let mut worst: f64 = 0.0;
    let hosts = [LatticeSpec::lp(1.5), LatticeSpec::lp(3.0), LatticeSpec::lorentz(2.0, 1.0), LatticeSpec::lorentz(2.0, 3.0), LatticeSpec::lorentz(3.0, 2.0)];
    for h in &hosts {
        let vals = ns.iter().map(|&n| xu_norm(&SeqVector::ones(n), h, &oc).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
        let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let exponent = 1.0 / log_log_slope(&xs, &vals);
        worst = worst.max((exponent - grobler_dodds(h)?.delta.0).abs());
    }
    Ok(judge(worst <= tol, tol, vec![("worst_index_gap", worst)], "constant vectors of length 2..16"))
}

// ---- decomposability ----

fn check_estimate_report(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("estimate_floor");
    let s = cfg.sampler();
    let mut ok = true;
    let mut floor = f64::INFINITY;
    for (h, p, d) in [
        (LatticeSpec::lp(2.0), 3.0, Direction::Upper),
        (LatticeSpec::lorentz(2.0, 3.0), 2.0, Direction::Upper),
        (LatticeSpec::lorentz(3.0, 2.0), 3.0, Direction::Lower),
    ] {
        let mut prev = 0.0;
        for n in [2, 4] {
            let r = estimate_constant(&h, Exponent(p), d, n, &s)?;
            floor = floor.min(r.constant);
            ok &= r.constant >= prev && r.growth.windows(2).all(|w| w[1].value >= w[0].value);
            prev = r.constant;
        }
    }
    ok &= floor >= 1.0 - tol;
    Ok(judge(ok, tol, vec![("smallest_constant", floor)], "n_max in {2, 4}"))
}

fn check_decomp_witness(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("witness");
    let s = cfg.sampler();
    let mut worst: f64 = 0.0;
    let mut floor = f64::INFINITY;
    for (x, y, sv, n) in [
        (LatticeSpec::C0, LatticeSpec::lp(1.0), 2.0, 16),
        (LatticeSpec::lp(2.0), LatticeSpec::lp(1.0), 2.0, 6),
        (LatticeSpec::lorentz(3.0, 3.0), LatticeSpec::lorentz(2.0, 2.0), 6.0, 3),
    ] {
        let r = ds_constant(&x, &y, Exponent(sv), n, &s)?;
        floor = floor.min(r.empirical_ds);
        worst = worst.max((r.witness.recompute(Exponent(sv))? - r.empirical_ds).abs());
    }
    Ok(judge(
        worst <= tol && floor >= 1.0 - cfg.tol("estimate_floor"),
        tol,
        vec![("worst_witness_gap", worst), ("smallest_ds", floor)],
        "closed-form and sampled pairs",
    ))
}

fn check_index_order(_cfg: &RunConfig) -> Result<Outcome> {
    let mut ok = true;
    for h in all_hosts() {
        let r = grobler_dodds(&h)?;
        ok &= 1.0 <= r.delta.0 && r.delta.0 <= r.sigma.0;
    }
    Ok(judge(ok, 0.0, vec![], "every host kind"))
}

fn check_one_decomposable(cfg: &RunConfig) -> Result<Outcome> {
    let s = SamplerConfig { random_families: 1, sweeps: 1, ..cfg.sampler() };
    let hosts = [LatticeSpec::lp(2.0), LatticeSpec::lorentz(3.0, 2.0), orlicz_host(), LatticeSpec::C0];
    let mut worst: f64 = 0.0;
    for x in &hosts {
        for y in &hosts {
            let d = ds_constant(x, y, Exponent(1.0), 3, &s)?.empirical_ds;
            let lx = estimate_constant(x, Exponent::INF, Direction::Lower, 3, &s)?.constant;
            let uy = estimate_constant(y, Exponent(1.0), Direction::Upper, 3, &s)?.constant;
            worst = worst.max(d / (lx * uy) - 1.0);
        }
    }
    let tol = cfg.tol("estimate_floor");
    Ok(judge(worst <= tol, tol, vec![("worst_excess", worst)], "D_1 against M_[inf](X) M^[1](Y), families of up to 3 members"))
}

fn check_monotone_in_s(cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = cfg.rng(19);
    let mut ok = true;
    for k in 0..cfg.caps.samples {
        let n = rng.gen_range(1..5);
        let x = sample_family(&LatticeSpec::lorentz(3.0, 2.0), Shape::Random, n, cfg.seed, 2 * k as u64)?;
        let y = sample_family(&orlicz_host(), Shape::Random, n, cfg.seed, 2 * k as u64 + 1)?;
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mut prev = 0.0;
        for s in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let r = ds_ratio(&x, &y, &a, &b, Exponent(s))?;
            ok &= r >= prev * (1.0 - 1e-12);
            prev = r;
        }
    }
    Ok(judge(ok, 1e-12, vec![], "fixed random families, s in {1, 1.5, 2, 4, inf}"))
}

fn check_holder_boundary(cfg: &RunConfig) -> Result<Outcome> {
    let (ts, tu) = (cfg.tol("holder_slope"), cfg.tol("holder_unit"));
    let s = cfg.sampler();
    let exps = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];
    let mut worst_unit: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    for &q in &exps {
        for &p in &exps {
            for &sv in &exps {
                let r = ds_constant(&LatticeSpec::lp(q), &LatticeSpec::lp(p), Exponent(sv), 32, &s)?;
                let e = Exponent(p).recip() - Exponent(q).recip() - Exponent(sv).recip();
                if e <= 0.0 {
                    for g in r.growth.iter().filter(|g| g.n <= 8) {
                        worst_unit = worst_unit.max((g.value - 1.0).abs());
                    }
                } else {
                    worst_slope = worst_slope.max((r.slope - e).abs());
                }
            }
        }
    }
    Ok(judge(
        worst_unit <= tu && worst_slope <= ts,
        ts,
        vec![("worst_unit_gap", worst_unit), ("worst_slope_gap", worst_slope)],
        "all (q, p, s) over {1, 1.5, 2, 4, inf}",
    ))
}

fn check_fs_sandwich(cfg: &RunConfig) -> Result<Outcome> {
    let (tl, slack) = (cfg.tol("fs_lower"), cfg.tol("fs_slack"));
    let s = cfg.sampler();
    let mut ok = true;
    let mut worst_lower: f64 = 0.0;
    let mut worst_upper: f64 = 0.0;
    for q in [2.0, 3.0] {
        for p in [1.0, 1.5] {
            let sv = Exponent::from_recip(1.0 / p - 1.0 / q);
            let r = fs_infimum(&LatticeSpec::lp(q), &LatticeSpec::lp(p), sv, 16, &s)?;
            worst_lower = worst_lower.max(r.ds / r.value - 1.0);
            worst_upper = worst_upper.max(r.value / (r.ds * r.ds));
            ok &= r.ds <= r.value * (1.0 + tl) && r.value <= r.ds * r.ds * slack;
        }
    }
    Ok(judge(ok, tl, vec![("worst_lower_excess", worst_lower), ("worst_upper_ratio", worst_upper)], "lq to lp pairs on the constraint line"))
}

// ---- interpolation ----

fn check_kcurve_invariants(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("kcurve");
    let mut rng = cfg.rng(20);
    let grid = log_grid(1e-3, 1e3, cfg.caps.grid_points);
    let mut bad = 0usize;
    for _ in 0..(cfg.caps.samples / 2).max(1) {
        let f = { let k = rng.gen_range(1..5); random_step(&mut rng, k) };
        if !f.is_zero() {
            bad += k_curve(&Element::Step(f), &CoupleSpec::l1_linf(), &grid, Exec::Sequential)?.violations(tol).len();
        }
        let n = rng.gen_range(1..5);
        let x = Element::Seq(SeqVector::from(random_vec(&mut rng, n)));
        let w0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let w1: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        for c in [CoupleSpec::l1_linf(), CoupleSpec::weighted(2.0, w0.clone(), 3.0, w1.clone()), CoupleSpec::weighted(1.5, w0, f64::INFINITY, w1)] {
            bad += k_curve(&x, &c, &grid, Exec::Sequential)?.violations(tol).len();
        }
    }
    Ok(judge(bad == 0, tol, vec![("violations", bad as f64)], "step and weighted-sequence couples"))
}

fn check_subadditivity(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("subadditivity");
    let mut rng = cfg.rng(21);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.caps.samples {
        let n = rng.gen_range(1..5);
        let a = random_vec(&mut rng, n);
        let b = random_vec(&mut rng, n);
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let t: f64 = 10f64.powf(rng.gen_range(-3.0..3.0));
        let w0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let w1: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        for c in [CoupleSpec::l1_linf(), CoupleSpec::weighted(2.0, w0, 3.0, w1)] {
            let k = |v: &[f64]| k_functional(t, &Element::Seq(SeqVector::from(v.to_vec())), &c);
            let (kab, ka, kb) = (k(&ab)?, k(&a)?, k(&b)?);
            worst = worst.max((kab - ka - kb) / (ka + kb).max(1e-300));
        }
    }
    Ok(judge(worst <= tol, tol, vec![("worst_excess", worst)], "random pairs and t"))
}

/// Random `T` with absolute row and column sums at most one.
pub fn random_substochastic(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n]; n];
    let k = rng.gen_range(1..4);
    let mut ws: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
    let s: f64 = ws.iter().sum::<f64>() * rng.gen_range(1.0..1.3);
    ws.iter_mut().for_each(|w| *w /= s);
    for w in ws {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (r, row) in t.iter_mut().enumerate() {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            row[perm[r]] += sign * w;
        }
    }
    t
}

fn apply(t: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    t.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn check_operator_majorization(cfg: &RunConfig) -> Result<Outcome> {
    let tol = cfg.tol("validator");
    let mut rng = cfg.rng(22);
    let mut majorized = true;
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.caps.samples {
        let n = rng.gen_range(1..8);
        let x = random_vec(&mut rng, n);
        let t = random_substochastic(&mut rng, n);
        let y = apply(&t, &x);
        let (sx, sy) = (SeqVector::from(x), SeqVector::from(y));
        majorized &= cm_majorization_check(&sx, &sy, 1.0);
        let op = cm_orbit_operator(&sx, &sy)?;
        worst = worst.max(op.norm_l1 - 1.0).max(op.norm_linf - 1.0).max(op.residual);
    }
    Ok(judge(majorized && worst <= tol, tol, vec![("worst_validator_excess", worst)], "random substochastic images"))
}

fn check_rs_infinity_agreement(cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = cfg.rng(23);
    let grid = RsGrid { points: cfg.caps.grid_points, ..RsGrid::default() };
    let c = CoupleSpec::l1_linf();
    let mut agree = 0usize;
    let mut total = 0usize;
    let mut ties = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(1..6);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let cst = rng.gen_range(0.5..2.0);
        let (ex, ey) = (Element::Seq(SeqVector::from(x.clone())), Element::Seq(SeqVector::from(y.clone())));
        let r = rs_relation_test(&ex, &ey, &c, &c, Exponent::INF, &grid, Exec::Sequential)?;
        if (r.sup_w - cst).abs() <= 1e-9 * cst {
            ties += 1;
            continue;
        }
        total += 1;
        if (r.sup_w <= cst) == cm_majorization_check(&SeqVector::from(x), &SeqVector::from(y), cst) {
            agree += 1;
        }
    }
    Ok(judge(agree == total, 0.0, vec![("agreeing", agree as f64), ("compared", total as f64), ("ties", ties as f64)], "50 random pairs"))
}

// ---- harness ----

fn check_determinism(cfg: &RunConfig) -> Result<Outcome> {
    let sel: Vec<String> = ["special.delta2_report", "decomp.estimate_report", "interp.operator_majorization"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let a = to_json(&run_verification_suite(cfg, &sel)?)?;
    let b = to_json(&run_verification_suite(cfg, &sel)?)?;
    Ok(judge(a == b, 0.0, vec![("bytes", a.len() as f64)], "repeated run of a fixed selection"))
}

fn check_registry_coverage(_cfg: &RunConfig) -> Result<Outcome> {
    let m: Vec<&str> = manifest().into_iter().map(|(k, _)| k).collect();
    let r = registry_ids();
    let mut sm = m.clone();
    sm.sort();
    sm.dedup();
    let mut sr = r.clone();
    sr.sort();
    sr.dedup();
    let ok = sm.len() == m.len() && sr.len() == r.len() && sm == sr;
    Ok(judge(ok, 0.0, vec![("manifest", m.len() as f64), ("registry", r.len() as f64)], "manifest and registry ids are in bijection"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_matches_manifest() {
        let m: Vec<&str> = manifest().into_iter().map(|(k, _)| k).collect();
        assert_eq!(m, registry_ids());
    }

    #[test]
    fn unknown_check_rejected() {
        let e = run_verification_suite(&RunConfig::default(), &["no.such_check".to_string()]);
        assert!(matches!(e, Err(LatticeError::UnknownCheck(_))));
    }

    #[test]
    fn prefix_selection() {
        let r = run_verification_suite(&RunConfig::default(), &["rearrangement.".to_string()]).unwrap();
        assert_eq!(r.checks.len(), 3);
        assert_eq!(r.failed, 0);
    }

    #[test]
    fn tolerance_overrides() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.tol("kcurve"), 1e-9);
        cfg.tolerances.insert("kcurve".into(), 1e-6);
        assert_eq!(cfg.tol("kcurve"), 1e-6);
        cfg.tolerances.insert("bogus".into(), 1.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn empty_table_outputs() {
        let csv = emit_report(&Vec::<u8>::new(), None, OutputFormat::Csv).unwrap();
        assert_eq!(csv, "\n");
        let svg = emit_report(&Vec::<u8>::new(), None, OutputFormat::Svg).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(emit_report(&Vec::<u8>::new(), None, OutputFormat::Json).unwrap(), "[]\n");
    }

    #[test]
    fn kcurve_csv_is_min_t_one() {
        let grid = log_grid(1e-2, 1e2, 21);
        let x = Element::Step(StepFunction::indicator(1.0, 1.0).unwrap());
        let c = k_curve(&x, &CoupleSpec::l1_linf(), &grid, Exec::Sequential).unwrap();
        let csv = Table::from_kcurve(&c).to_csv();
        for line in csv.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!((v[1] - v[0].min(1.0)).abs() <= 1e-11 * v[0].min(1.0));
        }
        let svg = Table::from_kcurve(&c).to_svg();
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn json_rounds_to_twelve_digits() {
        let s = to_json(&vec![1.0 / 3.0]).unwrap();
        assert!(s.contains("0.333333333333") && !s.contains("0.3333333333333"));
    }

    #[test]
    fn execution_mode_does_not_change_results() {
        let sel: Vec<String> = ["optimal.result_sandwich", "decomp.witness", "interp.kcurve_invariants"].iter().map(|s| s.to_string()).collect();
        let run = |exec| to_json(&run_verification_suite(&RunConfig { exec, ..RunConfig::default() }, &sel).unwrap()).unwrap();
        assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
    }

    #[test]
    fn config_round_trip_with_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"seed": 7, "caps": {"samples": 5}}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.caps.samples, 5);
        assert_eq!(cfg.caps.starts, Caps::default().starts);
    }
}

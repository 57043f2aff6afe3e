use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use rilat::decomp::{
    ds_constant, estimate_constant, fs_infimum, grobler_dodds, multiplicator_check, Direction,
};
use rilat::harness::{
    emit_report, run_verification_suite, suite_table, OutputFormat, RunConfig, Table, CONFIG_ENV,
};
use rilat::interp::{cm_orbit_operator, k_curve, rs_relation_test, CoupleSpec, Element, RsGrid};
use rilat::norms::seq_norm;
use rilat::numeric::log_grid;
use rilat::optimal::{phi_n, xl_norm, xu_norm};
use rilat::{Exponent, LatticeError, LatticeSpec, SeqVector, StepFunction};

#[derive(Parser)]
#[command(name = "rilat", version, about = "Norms, optimal sequence spaces, decomposability constants and K-functionals")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration file (JSON).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dimension cap for optimization hosts.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Optimizer starting points.
    #[arg(long, global = true)]
    starts: Option<usize>,
    #[arg(long, global = true)]
    max_parts: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Svg => OutputFormat::Svg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Upper,
    Lower,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a sequence or step function in a host.
    Norm {
        #[arg(long)]
        spec: String,
        /// JSON array of sequence entries.
        #[arg(long, conflicts_with = "step")]
        vector: Option<String>,
        /// JSON step function `{"atoms": [[value, measure], ...]}`.
        #[arg(long)]
        step: Option<String>,
    },
    /// Optimal upper functional.
    Xu(OptimalArgs),
    /// Optimal lower functional.
    Xl(OptimalArgs),
    /// Supremum over disjoint families.
    Phin(OptimalArgs),
    /// Relative decomposability constant.
    Ds {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
    },
    /// Upper or lower p-estimate constant.
    Estimate {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        p: String,
        #[arg(long, value_enum, default_value = "upper")]
        direction: Dir,
        #[arg(long, default_value_t = 32)]
        n_max: usize,
    },
    /// Lower and upper indices of a host.
    Indices {
        #[arg(long)]
        spec: String,
    },
    /// Infimum of products of estimate constants on the constraint line.
    Fs {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
    },
    /// Multiplicator inequality on random pairs.
    Mult {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// K-functional curve on a log grid (CSV by default).
    Kfun {
        #[arg(long)]
        couple: Option<String>,
        /// JSON element `{"seq": [...]}` or `{"step": {"atoms": [...]}}`.
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1e3)]
        t_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
    },
    /// Relation test between two elements of two couples.
    RsTest {
        #[arg(long)]
        couple_x: Option<String>,
        #[arg(long)]
        couple_y: Option<String>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        s: String,
        #[arg(long, default_value_t = 121)]
        points: usize,
    },
    /// Orbit operator mapping x to y on the (l1, l_inf) couple.
    Orbit {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Run the verification suite.
    Verify {
        /// Check ids or `module.` prefixes; all checks when empty.
        #[arg(long = "check", value_name = "ID")]
        checks: Vec<String>,
    },
    /// Render a saved JSON result as a table.
    Report {
        #[arg(long)]
        input: String,
    },
}

#[derive(Args)]
struct OptimalArgs {
    #[arg(long)]
    spec: String,
    #[arg(long)]
    vector: String,
}

enum Failure {
    Usage(String),
    Lattice(LatticeError),
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::Lattice(e)
    }
}

/// Inline JSON, or `@path` to read it from a file.
fn json_arg<T: DeserializeOwned>(name: &str, raw: &str) -> Result<T, Failure> {
    let text = match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("--{name}: {path}: {e}")))?,
        None => raw.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn spec_arg(name: &str, raw: &str) -> Result<LatticeSpec, Failure> {
    let spec: LatticeSpec = json_arg(name, raw)?;
    spec.validate()?;
    Ok(spec)
}

fn exponent_arg(name: &str, raw: &str) -> Result<Exponent, Failure> {
    json_arg::<Exponent>(name, &format!("\"{raw}\"")).and_then(|e| {
        if e.0 >= 1.0 {
            Ok(e)
        } else {
            Err(Failure::Usage(format!("--{name} must lie in [1, inf]")))
        }
    })
}

fn vector_arg(name: &str, raw: &str) -> Result<SeqVector, Failure> {
    let v: Vec<f64> = json_arg(name, raw)?;
    Ok(SeqVector::new(v)?)
}

fn config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(c) = common.cap {
        cfg.caps.n_cap = c;
    }
    if let Some(s) = common.starts {
        cfg.caps.starts = s;
    }
    if let Some(m) = common.max_parts {
        cfg.caps.max_parts = m;
    }
    if let Some(f) = common.format {
        cfg.output = f.into();
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Output {
    text: String,
    failed: bool,
}

fn emit<T: serde::Serialize>(value: &T, table: Option<&Table>, format: OutputFormat, failed: bool) -> Result<Output, Failure> {
    Ok(Output { text: emit_report(value, table, format)?, failed })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let cfg = config(&cli.common)?;
    let oc = cfg.optimal_config();
    let sampler = cfg.sampler();
    let fmt = cfg.output;
    match &cli.command {
        Command::Norm { spec, vector, step } => {
            let h = spec_arg("spec", spec)?;
            let value = match (vector, step) {
                (Some(v), None) => seq_norm(&vector_arg("vector", v)?, &h)?,
                (None, Some(s)) => h.step_norm(&json_arg::<StepFunction>("step", s)?)?,
                _ => return Err(Failure::Usage("give exactly one of --vector and --step".into())),
            };
            emit(&serde_json::json!({ "host": h, "value": value }), None, fmt, false)
        }
        Command::Xu(a) | Command::Xl(a) | Command::Phin(a) => {
            let h = spec_arg("spec", &a.spec)?;
            let v = vector_arg("vector", &a.vector)?;
            let r = match &cli.command {
                Command::Xu(_) => xu_norm(&v, &h, &oc)?,
                Command::Xl(_) => xl_norm(&v, &h, &oc)?,
                _ => phi_n(&v, &h, &oc)?,
            };
            emit(&r, None, fmt, false)
        }
        Command::Ds { x, y, s, n_max } => {
            let r = ds_constant(&spec_arg("x", x)?, &spec_arg("y", y)?, exponent_arg("s", s)?, *n_max, &sampler)?;
            emit(&r, Some(&Table::from_growth("decomposability constant", &r.growth)), fmt, false)
        }
        Command::Estimate { spec, p, direction, n_max } => {
            let d = match direction {
                Dir::Upper => Direction::Upper,
                Dir::Lower => Direction::Lower,
            };
            let r = estimate_constant(&spec_arg("spec", spec)?, exponent_arg("p", p)?, d, *n_max, &sampler)?;
            emit(&r, Some(&Table::from_growth("estimate constant", &r.growth)), fmt, false)
        }
        Command::Indices { spec } => emit(&grobler_dodds(&spec_arg("spec", spec)?)?, None, fmt, false),
        Command::Fs { x, y, s, n_max } => {
            let r = fs_infimum(&spec_arg("x", x)?, &spec_arg("y", y)?, exponent_arg("s", s)?, *n_max, &sampler)?;
            let failed = !(r.lower_holds && r.upper_holds);
            emit(&r, None, fmt, failed)
        }
        Command::Mult { x, y, s, samples, n_max } => {
            let r = multiplicator_check(
                &spec_arg("x", x)?,
                &spec_arg("y", y)?,
                exponent_arg("s", s)?,
                *samples,
                *n_max,
                &oc,
                &sampler,
            )?;
            let failed = !r.holds;
            emit(&r, None, fmt, failed)
        }
        Command::Kfun { couple, element, t_min, t_max, points } => {
            let c = match couple {
                Some(c) => json_arg("couple", c)?,
                None => CoupleSpec::l1_linf(),
            };
            let e: Element = json_arg("element", element)?;
            if !(*t_min > 0.0 && t_max > t_min && *points >= 2) {
                return Err(Failure::Usage("need 0 < t-min < t-max and at least two points".into()));
            }
            let curve = k_curve(&e, &c, &log_grid(*t_min, *t_max, *points), cfg.exec)?;
            let fmt = cli.common.format.map(OutputFormat::from).unwrap_or(OutputFormat::Csv);
            emit(&curve, Some(&Table::from_kcurve(&curve)), fmt, false)
        }
        Command::RsTest { couple_x, couple_y, x, y, s, points } => {
            let cx = match couple_x {
                Some(c) => json_arg("couple-x", c)?,
                None => CoupleSpec::l1_linf(),
            };
            let cy = match couple_y {
                Some(c) => json_arg("couple-y", c)?,
                None => CoupleSpec::l1_linf(),
            };
            let grid = RsGrid { points: *points, ..RsGrid::default() };
            let r = rs_relation_test(
                &json_arg("x", x)?,
                &json_arg("y", y)?,
                &cx,
                &cy,
                exponent_arg("s", s)?,
                &grid,
                cfg.exec,
            )?;
            emit(&r, None, fmt, false)
        }
        Command::Orbit { x, y } => {
            let (xv, yv) = (vector_arg("x", x)?, vector_arg("y", y)?);
            match cm_orbit_operator(&xv, &yv) {
                Ok(op) => emit(&op, None, fmt, false),
                Err(LatticeError::MajorizationFailure { k }) => {
                    emit(&serde_json::json!({ "majorized": false, "failing_partial_sum": k }), None, fmt, true)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Verify { checks } => {
            let r = run_verification_suite(&cfg, checks)?;
            let failed = r.failed > 0;
            emit(&r, Some(&suite_table(&r)), fmt, failed)
        }
        Command::Report { input } => {
            let v: serde_json::Value = json_arg("input", input)?;
            let table = table_from_json(&v)?;
            let fmt = cli.common.format.map(OutputFormat::from).unwrap_or(OutputFormat::Csv);
            emit(&v, table.as_ref(), fmt, false)
        }
    }
}

/// Recognizes K-curves, growth reports and suite results; anything else
/// renders as an empty table.
fn table_from_json(v: &serde_json::Value) -> Result<Option<Table>, Failure> {
    let parse = |what: &str, e: serde_json::Error| Failure::Usage(format!("--input: not a {what}: {e}"));
    if v.get("grid").is_some() && v.get("values").is_some() {
        let c = serde_json::from_value(v.clone()).map_err(|e| parse("K-curve", e))?;
        return Ok(Some(Table::from_kcurve(&c)));
    }
    if let Some(g) = v.get("growth") {
        let g: Vec<rilat::decomp::GrowthPoint> = serde_json::from_value(g.clone()).map_err(|e| parse("growth table", e))?;
        return Ok(Some(Table::from_growth("growth", &g)));
    }
    if v.get("checks").is_some() {
        let r = serde_json::from_value(v.clone()).map_err(|e| parse("suite result", e))?;
        return Ok(Some(suite_table(&r)));
    }
    Ok(None)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.common.out {
                Some(path) => std::fs::write(path, &out.text),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lattice(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

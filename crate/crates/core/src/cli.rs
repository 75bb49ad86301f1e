//! Command-line front end. Every subcommand is a thin binding over the
//! library; [`run`] does the work so tests can drive it in-process.
//!
//! Exit codes: 0 success, 1 other computation failure, 2 argument or
//! configuration error, 3 I/O error, 4 no steady state where one is needed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Config, Layer};
use crate::dynamics::{
    complex_drift, default_tolerance, diffusion_matrix, quadrature_drift, stability, DriftParams, Matrix6,
};
use crate::error::Error;
use crate::measures::{pair_measures, solve_lyapunov_with_tolerance, Mode, ModePair};
use crate::model::{two_mode_eigenfrequencies, SystemParams};
use crate::steady_state::working_point;
use crate::sweep::{
    figure_preset_on, run_sweep, vanishing_temperature, Axis, Cell, Figure, Output, SweepSpec, Table,
};

#[derive(Debug, Parser)]
#[command(
    name = "ptcmm",
    version,
    about = "Stability, entanglement and steering of a gain/loss cavity-magnomechanical system"
)]
struct Cli {
    /// Parameter file (key = value); defaults to the bundled figure parameters.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format; tables default to csv, single results to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file, or `-` for standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Parameter override applied after the config file, e.g. `g_ma=0.06omega_b`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PT phase of the photon-magnon pair and its two eigenfrequencies.
    Classify,
    /// Working point: magnon amplitude, displacement, detuning and G.
    SteadyState,
    /// Drift and diffusion matrices.
    Drift {
        /// Write A then D as twelve CSV rows with round-trip precision.
        #[arg(long)]
        dump: bool,
    },
    /// Drift spectrum and maximal Lyapunov exponent.
    Stability,
    /// Entanglement and steering of one mode pair at the steady state.
    Measures {
        /// Mode pair such as `am`, `bm` or `ab`.
        #[arg(long, conflicts_with_all = ["from", "to"])]
        pair: Option<ModePair>,
        /// Steering party; `S_forward` is then from -> to.
        #[arg(long, requires = "to")]
        from: Option<Mode>,
        #[arg(long, requires = "from")]
        to: Option<Mode>,
    },
    /// Grid sweep over one or two parameters.
    Sweep {
        /// NAME:MIN:MAX:COUNT; rates in units of omega_b, temperature in mK.
        #[arg(long = "axis", required = true, value_name = "AXIS")]
        axes: Vec<Axis>,
        /// max_lyapunov, stable, pt_phase, residual, physicality_margin,
        /// E_N:<pair> or S:<from>:<to>.
        #[arg(long = "output", required = true, value_name = "OUTPUT")]
        outputs: Vec<Output>,
    },
    /// Data table of a figure panel.
    Figure {
        /// fig2a..fig2d, fig3a..fig3d, fig4a..fig4d, fig5, fig6a, fig6b.
        name: Figure,
        /// Replace the preset axis over the same parameter.
        #[arg(long = "axis", value_name = "AXIS")]
        axes: Vec<Axis>,
    },
    /// Temperature at which the entanglement of a pair vanishes.
    VanishTemp {
        #[arg(long, default_value = "am")]
        pair: ModePair,
        /// Lower end of the bracket, mK; must still be entangled.
        #[arg(long, default_value_t = 0.0)]
        t_lo: f64,
        /// Upper end of the bracket, mK; must be separable.
        #[arg(long, default_value_t = 500.0)]
        t_hi: f64,
    },
}

enum Failure {
    Usage(String),
    Io(io::Error),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// What a subcommand produced.
enum Report {
    Object(Value),
    Table(Table),
    Raw(String),
}

/// Parses `std::env::args_os` and runs; returns the process exit code.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one command line, writing the result to `out` (unless `--out`
/// names a file) and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = cli.format;
    let sink = cli.out.clone();
    let result = execute(&cli).and_then(|report| emit(report, format, sink.as_deref(), out));
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            3
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            let code = exit_code(&e);
            if code == 4 {
                let obj = error_object(&e);
                let _ = emit(Report::Object(obj), Some(Format::Json), sink.as_deref(), out);
            }
            code
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_)
        | Error::Config { .. }
        | Error::UnknownKey { .. }
        | Error::UnknownPreset(_)
        | Error::InvalidSweep(_) => 2,
        Error::UnstableSystem { .. } => 4,
        _ => 1,
    }
}

fn error_object(e: &Error) -> Value {
    let mut obj = json!({ "error": e.code(), "message": e.to_string() });
    if let Error::UnstableSystem { max_lyapunov } = e {
        obj["max_lyapunov"] = json!(max_lyapunov);
    }
    obj
}

fn load_params(cli: &Cli) -> Result<SystemParams, Failure> {
    let config = match &cli.config {
        Some(path) => Config::default().with_layer(Layer::from_file(path)??),
        None => Config::paper(),
    };
    let overrides = Layer::from_overrides(&cli.set)?;
    Ok(config.with_layer(overrides).to_params()?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn matrix_rows(m: &Matrix6) -> Value {
    Value::Array((0..6).map(|i| json!((0..6).map(|j| m[(i, j)]).collect::<Vec<_>>())).collect())
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    let params = load_params(cli)?;
    let report = match &cli.command {
        Command::Classify => {
            let phase = params.pt_phase();
            let (plus, minus) = two_mode_eigenfrequencies(
                params.delta_a(),
                params.kappa_a(),
                params.kappa_m(),
                params.g_ma(),
            );
            Report::Object(json!({
                "phase": phase.regime.to_string(),
                "margin": phase.margin,
                "omega_plus": to_value(&plus),
                "omega_minus": to_value(&minus),
            }))
        }
        Command::SteadyState => Report::Object(to_value(&working_point(&params)?)),
        Command::Drift { dump } => {
            let dp = DriftParams::new(&params, &working_point(&params)?);
            let a = quadrature_drift(&dp);
            let d = diffusion_matrix(&dp, &params.occupations()?);
            if *dump {
                let mut text = String::new();
                for m in [a.matrix(), d.matrix()] {
                    for i in 0..6 {
                        let row: Vec<String> = (0..6).map(|j| m[(i, j)].to_string()).collect();
                        text.push_str(&row.join(","));
                        text.push('\n');
                    }
                }
                Report::Raw(text)
            } else {
                let m = complex_drift(&dp);
                let complex: Vec<Value> =
                    (0..6).map(|i| json!((0..6).map(|j| to_value(&m[(i, j)])).collect::<Vec<_>>())).collect();
                Report::Object(json!({
                    "drift": matrix_rows(a.matrix()),
                    "diffusion": matrix_rows(d.matrix()),
                    "complex_drift": complex,
                }))
            }
        }
        Command::Stability => {
            let dp = DriftParams::new(&params, &working_point(&params)?);
            let tol = default_tolerance(params.omega_b());
            let report = stability(&quadrature_drift(&dp), tol)?;
            let mut obj = to_value(&report);
            obj["tolerance"] = json!(tol);
            Report::Object(obj)
        }
        Command::Measures { pair, from, to } => {
            let pair = match (pair, from, to) {
                (_, Some(f), Some(t)) => ModePair::new(*f, *t)?,
                (Some(p), _, _) => *p,
                _ => ModePair::AM,
            };
            let dp = DriftParams::new(&params, &working_point(&params)?);
            let a = quadrature_drift(&dp);
            let d = diffusion_matrix(&dp, &params.occupations()?);
            let cm = solve_lyapunov_with_tolerance(&a, &d, default_tolerance(params.omega_b()))?;
            let pm = pair_measures(&cm, pair)?;
            Report::Object(json!({
                "pair": pair.to_string(),
                "E_N": pm.e_n,
                "S_forward": pm.s_12,
                "S_backward": pm.s_21,
                "eta_minus": pm.eta_minus,
                "residual": cm.residual,
                "physicality_margin": cm.physicality_margin,
            }))
        }
        Command::Sweep { axes, outputs } => {
            let spec = SweepSpec::new(params, axes.clone(), outputs.clone());
            Report::Table(run_sweep(&spec, cli.jobs)?.table())
        }
        Command::Figure { name, axes } => {
            let mut spec = figure_preset_on(*name, &params)?;
            for axis in axes {
                spec.override_axis(*axis)?;
            }
            Report::Table(run_sweep(&spec, cli.jobs)?.table())
        }
        Command::VanishTemp { pair, t_lo, t_hi } => {
            let t = vanishing_temperature(&params, *pair, t_lo * 1e-3, t_hi * 1e-3)?;
            Report::Object(json!({
                "pair": pair.to_string(),
                "temperature_K": t,
                "temperature_mK": t * 1e3,
            }))
        }
    };
    Ok(report)
}

/// Flattens an object into one CSV row; nested arrays and objects get
/// `name_0`, `name.key` style headers.
fn object_table(obj: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, header: &mut Vec<String>, row: &mut Vec<Cell>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let name = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&name, v, header, row);
                }
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}_{i}"), v, header, row);
                }
            }
            leaf => {
                header.push(prefix.to_string());
                row.push(match leaf {
                    Value::Null => Cell::Empty,
                    Value::Bool(b) => Cell::Bool(*b),
                    Value::Number(n) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                    Value::String(s) => Cell::Text(s.clone()),
                    _ => unreachable!(),
                });
            }
        }
    }
    let (mut header, mut row) = (Vec::new(), Vec::new());
    walk("", obj, &mut header, &mut row);
    Table { header, rows: vec![row] }
}

fn emit(
    report: Report,
    format: Option<Format>,
    sink: Option<&str>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match report {
        Report::Raw(text) => {
            if format == Some(Format::Json) {
                return Err(Failure::Usage("--dump writes CSV only".into()));
            }
            buf.extend_from_slice(text.as_bytes());
        }
        Report::Object(obj) => match format.unwrap_or(Format::Json) {
            Format::Json => {
                serde_json::to_writer_pretty(&mut buf, &obj).map_err(io::Error::from)?;
                buf.push(b'\n');
            }
            Format::Csv => object_table(&obj).write_csv(&mut buf)?,
        },
        Report::Table(table) => match format.unwrap_or(Format::Csv) {
            Format::Csv => table.write_csv(&mut buf)?,
            Format::Json => table.write_json(&mut buf)?,
        },
    }
    match sink {
        None | Some("-") | Some("stdout") => out.write_all(&buf)?,
        Some(path) => File::create(path)?.write_all(&buf)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ptcmm").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_exceptional_point() {
        let (code, out, _) = call(&[
            "classify",
            "--set",
            "g_ma=0.06omega_b",
            "--set",
            "kappa_a=0.02omega_b",
            "--set",
            "kappa_m=0.1omega_b",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["phase"], "ExceptionalPoint");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["classify", "--set", "bogus=1"]).0, 2);
        assert_eq!(call(&["classify", "--set", "epsilon_d=1e15", "--set", "G_eff=1e6"]).0, 2);
        assert_eq!(call(&["figure", "fig9"]).0, 2);
        assert_eq!(call(&["sweep", "--axis", "G_eff:0:1:5"]).0, 2);
        assert_eq!(call(&["measures", "--pair", "am", "--from", "a", "--to", "m"]).0, 2);
        assert_eq!(call(&["drift", "--dump", "--format", "json"]).0, 2);
        let (code, _, err) = call(&["classify", "--set", "omega_z=3"]);
        assert_eq!(code, 2);
        assert!(err.contains("temperature") && err.contains("drive_b0"), "{err}");
    }

    #[test]
    fn io_errors_exit_3() {
        assert_eq!(call(&["classify", "--config", "/nonexistent/params.conf"]).0, 3);
        assert_eq!(call(&["classify", "--out", "/nonexistent/dir/out.json"]).0, 3);
    }

    #[test]
    fn unstable_measures_exit_4_with_error_object() {
        let (code, out, _) = call(&["measures", "--set", "G_eff=3omega_b"]);
        assert_eq!(code, 4);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["error"], "unstable_system");
        assert!(v["max_lyapunov"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("vanish-temp"));
    }

    #[test]
    fn object_csv_flattens() {
        let t = object_table(&json!({"a": 1.0, "b": [2.0, 3.0], "c": {"d": null}}));
        assert_eq!(t.header, ["a", "b_0", "b_1", "c.d"]);
        assert_eq!(t.rows[0][3], Cell::Empty);
    }
}

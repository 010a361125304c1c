//! The `gatestruct` command line.
//!
//! Exit codes: 0 for success or a positive verdict, 2 for a negative verdict
//! (not self-inverse, genuinely two-qubit), 1 for errors and bad usage.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::circuit::text::{parse_circuit_file, write_circuit_file};
use crate::circuit::{optimize, CostMetrics};
use crate::gen::{gen_random, GenKind, Generated};
use crate::io::{parse_matrix_file, AnyMatrix};
use crate::matrix::{GateMatrix2, GateMatrix4, Mat, Tolerance};
use crate::separability::{analyze, SeparabilityReport, Verdict};
use crate::single_qubit::{classify_hermitian, CanonicalSingleQubit, Hermiticity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gatestruct",
    version,
    about = "Canonical forms, self-inverse detection and tensor-product factorization of qubit gates"
)]
struct Args {
    /// Emit a single JSON document on standard output.
    #[arg(long, global = true)]
    json: bool,

    /// Tolerance for entrywise equalities in verdicts.
    #[arg(long, global = true, value_name = "EPS", value_parser = positive_f64)]
    eps_match: Option<f64>,

    /// Tolerance on `max|U†U − I|` for accepting input as unitary.
    #[arg(long, global = true, value_name = "EPS", value_parser = positive_f64)]
    eps_unitary: Option<f64>,

    /// Tolerance for parameter round trips.
    #[arg(long, global = true, value_name = "EPS", value_parser = positive_f64)]
    eps_roundtrip: Option<f64>,

    /// Seed for `gen`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Canonical parameters (theta, phi0, phi1, phi2) of a 2x2 unitary.
    Canon { matrix: PathBuf },
    /// Decide whether a 2x2 unitary is self-inverse; exit 2 if not.
    Hermitian { matrix: PathBuf },
    /// Full separability report for a 4x4 unitary; exit 2 if genuinely two-qubit.
    Separable { matrix: PathBuf },
    /// Factor a separable 4x4 unitary; exit 2 if genuinely two-qubit.
    Factor { matrix: PathBuf },
    /// Optimize a circuit file and write `<stem>.opt.txt` beside it.
    Optimize {
        circuit: PathBuf,
        /// Write the optimized circuit here instead.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a random matrix of the given kind: single, separable or genuine.
    Gen { kind: GenKind },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be finite and strictly positive, got {v}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Human,
    Json,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliConfig {
    pub tolerance: Tolerance,
    pub output: OutputMode,
    pub seed: u64,
}

impl CliConfig {
    fn from_args(args: &Args) -> Result<Self, String> {
        let d = Tolerance::default();
        let tolerance = Tolerance::new(
            args.eps_unitary.unwrap_or(d.eps_unitary),
            args.eps_match.unwrap_or(d.eps_match),
            args.eps_roundtrip.unwrap_or(d.eps_roundtrip),
        )
        .map_err(|e| e.to_string())?;
        Ok(Self {
            tolerance,
            output: if args.json {
                OutputMode::Json
            } else {
                OutputMode::Human
            },
            seed: args.seed,
        })
    }
}

/// A finished command: what to print and which exit code to return.
struct Outcome {
    json: Value,
    human: String,
    code: i32,
}

type CmdResult = Result<Outcome, String>;

fn load_matrix(path: &Path) -> Result<AnyMatrix, String> {
    parse_matrix_file(path).map_err(|e| e.to_string())
}

fn load2(path: &Path) -> Result<GateMatrix2, String> {
    match load_matrix(path)? {
        AnyMatrix::Two(m) => Ok(m),
        AnyMatrix::Four(_) => Err(format!(
            "{}: expected a 2x2 matrix, found 4x4",
            path.display()
        )),
    }
}

fn load4(path: &Path) -> Result<GateMatrix4, String> {
    match load_matrix(path)? {
        AnyMatrix::Four(m) => Ok(m),
        AnyMatrix::Two(_) => Err(format!(
            "{}: expected a 4x4 matrix, found 2x2",
            path.display()
        )),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn format_matrix<const N: usize>(m: &Mat<N>) -> String {
    m.rows()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            format!("  [{}]", cells.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_canon(path: &Path, cfg: &CliConfig) -> CmdResult {
    let u = load2(path)?;
    let p = CanonicalSingleQubit::canonicalize(&u, &cfg.tolerance).map_err(|e| e.to_string())?;
    Ok(Outcome {
        json: to_value(&p),
        human: format!(
            "theta = {}\nphi0  = {}\nphi1  = {}\nphi2  = {}",
            p.theta, p.phi0, p.phi1, p.phi2
        ),
        code: EXIT_OK,
    })
}

fn cmd_hermitian(path: &Path, cfg: &CliConfig) -> CmdResult {
    let u = load2(path)?;
    let h = classify_hermitian(&u, &cfg.tolerance).map_err(|e| e.to_string())?;
    let (json, human) = match h {
        Hermiticity::Reflection(p) => (
            json!({
                "hermitian": true,
                "form": "reflection",
                "theta": p.theta,
                "phi2": p.phi2,
                "sign": p.sign.value() as i32,
            }),
            format!(
                "self-inverse: yes\ntheta = {}\nphi2  = {}\nsign  = {:+}",
                p.theta,
                p.phi2,
                p.sign.value() as i32
            ),
        ),
        Hermiticity::Scalar(s) => (
            json!({
                "hermitian": true,
                "form": "scalar",
                "theta": null,
                "phi2": null,
                "sign": s.value() as i32,
            }),
            format!(
                "self-inverse: yes ({}I)",
                if s.value() > 0.0 { "+" } else { "-" }
            ),
        ),
        Hermiticity::NotSelfInverse => (
            json!({ "hermitian": false, "form": null, "theta": null, "phi2": null, "sign": null }),
            "self-inverse: no".to_string(),
        ),
    };
    Ok(Outcome {
        json,
        human,
        code: if h.is_self_inverse() {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Separable => EXIT_OK,
        Verdict::GenuineTwoQubit => EXIT_NEGATIVE,
    }
}

fn human_report(r: &SeparabilityReport) -> String {
    let mark = |b: bool| if b { "pass" } else { "fail" };
    let mut lines = vec![
        format!("verdict: {:?}", r.verdict),
        format!(
            "condition 1: diagonal {}, anti-diagonal {}",
            mark(r.condition1_diag),
            mark(r.condition1_antidiag)
        ),
        format!("global phase: {} (pairing {:?})", r.global_phase, r.pairing),
    ];
    for (k, t) in r.tests.iter().enumerate() {
        lines.push(format!(
            "test {}: {} (residual {:.3e})",
            k + 1,
            mark(t.passed),
            t.residual
        ));
    }
    for (k, c) in r.det_conditions.iter().enumerate() {
        lines.push(format!(
            "C{}: {} (residual {:.3e})",
            k + 1,
            mark(c.passed),
            c.residual
        ));
    }
    lines.push(format!("oracle residual: {:.3e}", r.oracle_residual));
    if let Some(fp) = &r.factors {
        lines.push(format!(
            "global phase of factorization: {}",
            fp.global_phase
        ));
        lines.push(format!("u1 =\n{}", format_matrix(&fp.u1)));
        lines.push(format!("u2 =\n{}", format_matrix(&fp.u2)));
        lines.push(format!("reconstruction residual: {:.3e}", fp.residual));
    }
    lines.join("\n")
}

fn cmd_separable(path: &Path, cfg: &CliConfig) -> CmdResult {
    let m = load4(path)?;
    let report = analyze(&m, &cfg.tolerance).map_err(|e| e.to_string())?;
    Ok(Outcome {
        json: to_value(&report),
        human: human_report(&report),
        code: verdict_code(report.verdict),
    })
}

fn cmd_factor(path: &Path, cfg: &CliConfig) -> CmdResult {
    let m = load4(path)?;
    let report = analyze(&m, &cfg.tolerance).map_err(|e| e.to_string())?;
    match &report.factors {
        Some(fp) => Ok(Outcome {
            json: to_value(fp),
            human: format!(
                "u1 =\n{}\nu2 =\n{}\nglobal phase: {}\nresidual: {:.3e}",
                format_matrix(&fp.u1),
                format_matrix(&fp.u2),
                fp.global_phase,
                fp.residual
            ),
            code: EXIT_OK,
        }),
        None => Ok(Outcome {
            json: to_value(&report),
            human: human_report(&report),
            code: EXIT_NEGATIVE,
        }),
    }
}

/// `fig1.txt` → `fig1.opt.txt`.
pub fn default_optimized_path(circuit: &Path) -> PathBuf {
    circuit.with_extension("opt.txt")
}

fn cmd_optimize(path: &Path, output: Option<&Path>, cfg: &CliConfig) -> CmdResult {
    let c = parse_circuit_file(path, &cfg.tolerance).map_err(|e| e.to_string())?;
    let result = optimize(c, &cfg.tolerance);
    let out_path = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_optimized_path(path));
    write_circuit_file(&out_path, &result.circuit).map_err(|e| e.to_string())?;
    let describe = |m: &CostMetrics| {
        format!(
            "gate_count {}, quantum_cost {}, width {}, depth {}",
            m.gate_count, m.quantum_cost, m.width, m.depth
        )
    };
    Ok(Outcome {
        json: json!({
            "before": result.before,
            "after": result.after,
            "output": out_path.display().to_string(),
        }),
        human: format!(
            "before: {}\nafter:  {}\nwrote {}",
            describe(&result.before),
            describe(&result.after),
            out_path.display()
        ),
        code: EXIT_OK,
    })
}

fn cmd_gen(kind: GenKind, cfg: &CliConfig) -> CmdResult {
    let (mut json, human) = match gen_random(kind, cfg.seed) {
        Generated::Two(m) => (to_value(&m), format_matrix(&m)),
        Generated::Four(m) => (to_value(&m), format_matrix(&m)),
    };
    let obj = json.as_object_mut().expect("matrices serialize as objects");
    obj.insert("kind".into(), json!(kind.to_string()));
    obj.insert("seed".into(), json!(cfg.seed));
    Ok(Outcome {
        json,
        human: format!("{kind} gate, seed {}\n{human}", cfg.seed),
        code: EXIT_OK,
    })
}

/// Runs the command line `args` (including the program name), writing
/// reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    let cfg = match CliConfig::from_args(&args) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_ERROR;
        }
    };
    log::debug!("running {:?} with {:?}", args.command, cfg);

    let result = match &args.command {
        Command::Canon { matrix } => cmd_canon(matrix, &cfg),
        Command::Hermitian { matrix } => cmd_hermitian(matrix, &cfg),
        Command::Separable { matrix } => cmd_separable(matrix, &cfg),
        Command::Factor { matrix } => cmd_factor(matrix, &cfg),
        Command::Optimize { circuit, output } => cmd_optimize(circuit, output.as_deref(), &cfg),
        Command::Gen { kind } => cmd_gen(*kind, &cfg),
    };
    match result {
        Ok(outcome) => {
            let written = match cfg.output {
                OutputMode::Json => writeln!(out, "{}", outcome.json),
                OutputMode::Human => writeln!(out, "{}", outcome.human),
            };
            if written.is_err() {
                return EXIT_ERROR;
            }
            outcome.code
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["gatestruct"];
        argv.extend_from_slice(args);
        let code = dispatch(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn help_and_usage_errors() {
        assert_eq!(run(&["--help"]).0, EXIT_OK);
        let (code, _, err) = run(&["frobnicate"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("Usage"), "{err}");
        assert_eq!(run(&["gen", "single", "--eps-match", "-1"]).0, EXIT_ERROR);
        assert_eq!(run(&["gen", "bell"]).0, EXIT_ERROR);
    }

    #[test]
    fn gen_reports_seed_and_is_deterministic() {
        let (code, a, _) = run(&["gen", "separable", "--seed", "7", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["dim"], 4);
        assert_eq!(run(&["--json", "gen", "separable", "--seed", "7"]).1, a);
    }

    #[test]
    fn missing_file_is_an_error() {
        let (code, _, err) = run(&["canon", "/nonexistent.json"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("nonexistent"));
    }

    #[test]
    fn default_output_path() {
        assert_eq!(
            default_optimized_path(Path::new("a/fig1.txt")),
            PathBuf::from("a/fig1.opt.txt")
        );
    }
}

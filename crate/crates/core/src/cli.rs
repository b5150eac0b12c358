//! Command-line front end. Exit codes: 0 success, 1 failed verification,
//! 2 usage or validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bounds::bounds_report;
use crate::fewnomial::build_system;
use crate::geometry::PotentialParams;
use crate::report::{
    build_enumerate_report, parse_verify_input, real, sweep_report_json, sweep_report_text,
    verify_records, OutputFormat, RunConfig,
};
use crate::solver::{
    canonical_orderings, enumerate_with_stats, solve_collinear, sweep, SolverSettings,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ccenum",
    version,
    about = "Central configurations of the planar n-body problem"
)]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "CCENUM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact upper and lower bounds on the number of classes
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Multi-start enumeration of classes
    Enumerate(RunArgs),
    /// One collinear class per ordering of the bodies
    Collinear {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate along a grid of alpha values and follow every class
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.0)]
        alpha_lo: f64,
        #[arg(long, default_value_t = 3.0)]
        alpha_hi: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Dump the polynomial system in the distance variables
    Fewnomial {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
    /// Re-check every class record of a report
    Verify {
        input: PathBuf,
        /// Cartesian residual tolerance (default: the one stored in the report, else 1e-12)
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated; defaults to n unit masses
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    masses: Option<Vec<f64>>,
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// JSON run configuration; explicit flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => {
                let n = self
                    .n
                    .or(self.masses.as_ref().map(Vec::len))
                    .ok_or("--n is required (or --config)")?;
                RunConfig {
                    n,
                    alpha: 1.0,
                    masses: vec![1.0; n],
                    settings: SolverSettings::default(),
                    output: None,
                    format: OutputFormat::Json,
                }
            }
        };
        if let Some(n) = self.n {
            if n != cfg.n && self.masses.is_none() {
                cfg.masses = vec![1.0; n];
            }
            cfg.n = n;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(m) = &self.masses {
            cfg.masses = m.clone();
        }
        if let Some(s) = self.starts {
            cfg.settings.starts = s;
        }
        if let Some(s) = self.seed {
            cfg.settings.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.settings.tol_residual = t;
        }
        if let Some(m) = self.max_iters {
            cfg.settings.max_iters = m;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        Ok(cfg)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut out_buf = Vec::new();
    let mut err_buf = Vec::new();
    let result = pool.install(|| dispatch(cli.command, &mut out_buf, &mut err_buf));
    let _ = out.write_all(&out_buf);
    let _ = err.write_all(&err_buf);
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

type CmdResult = Result<i32, String>;

fn io(e: std::io::Error) -> String {
    format!("write failed: {e}")
}

fn dispatch(command: Command, out: &mut Vec<u8>, err: &mut Vec<u8>) -> CmdResult {
    match command {
        Command::Bounds { n, json } => cmd_bounds(n, json, out),
        Command::Enumerate(run) => cmd_enumerate(&run, out, err),
        Command::Collinear { run, json } => cmd_collinear(&run, json, out),
        Command::Sweep {
            run,
            alpha_lo,
            alpha_hi,
            steps,
            json,
        } => cmd_sweep(&run, (alpha_lo, alpha_hi), steps, json, out),
        Command::Fewnomial {
            n,
            masses,
            alpha,
            json,
        } => cmd_fewnomial(n, masses, alpha, json, out),
        Command::Verify { input, tol } => cmd_verify(&input, tol, out),
    }
}

fn cmd_bounds(n: usize, json: bool, out: &mut dyn Write) -> CmdResult {
    if n < 2 {
        return Err(format!("n must be at least 2, got {n}"));
    }
    let report = bounds_report(n);
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("serializes")
        )
        .map_err(io)?;
    } else {
        let poincare: Vec<String> = report.poincare.iter().map(|c| c.to_string()).collect();
        writeln!(
            out,
            "n={} upper={} lower={} poincare=[{}]",
            report.n,
            report.upper,
            report.lower,
            poincare.join(", ")
        )
        .map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn checked(run: &RunArgs) -> Result<(RunConfig, PotentialParams), String> {
    let cfg = run.resolve()?;
    let params = cfg.validate().map_err(|e| e.to_string())?;
    Ok((cfg, params))
}

fn cmd_enumerate(run: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (cfg, params) = checked(run)?;
    let found = enumerate_with_stats(&params, &cfg.settings);
    let report = build_enumerate_report(cfg.clone(), &params, &found.classes, found.stats);
    let body = report.render(cfg.format);
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()))?;
            writeln!(out, "{}", report.summary).map_err(io)?;
        }
        None => {
            out.write_all(body.as_bytes()).map_err(io)?;
            if cfg.format != OutputFormat::Text {
                writeln!(err, "{}", report.summary).map_err(io)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_collinear(run: &RunArgs, json: bool, out: &mut dyn Write) -> CmdResult {
    let (cfg, params) = checked(run)?;
    let mut rows = Vec::new();
    let mut text = String::from("ordering\tstatus\titerations\tresidual_inf\tx\n");
    for ordering in canonical_orderings(params.n()) {
        let label: Vec<String> = ordering.iter().map(|b| (b + 1).to_string()).collect();
        let label = label.join("-");
        match solve_collinear(&params, &ordering, &cfg.settings) {
            Ok(s) => {
                let xs: Vec<String> = s.config.points().iter().map(|p| real(p.x)).collect();
                text.push_str(&format!(
                    "{label}\tconverged\t{}\t{:.3e}\t{}\n",
                    s.iterations,
                    s.residual_inf,
                    xs.join(",")
                ));
                rows.push(json!({
                    "ordering": ordering.iter().map(|b| b + 1).collect::<Vec<_>>(),
                    "status": "converged",
                    "iterations": s.iterations,
                    "residual_inf": real(s.residual_inf),
                    "x": xs,
                }));
            }
            Err(e) => {
                text.push_str(&format!("{label}\t{}\t-\t-\t-\n", e.code()));
                rows.push(json!({
                    "ordering": ordering.iter().map(|b| b + 1).collect::<Vec<_>>(),
                    "status": e.code(),
                    "message": e.to_string(),
                }));
            }
        }
    }
    if json {
        let v = json!({ "config": cfg, "orderings": rows });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&v).expect("serializes")
        )
        .map_err(io)?;
    } else {
        out.write_all(text.as_bytes()).map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(
    run: &RunArgs,
    range: (f64, f64),
    steps: usize,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let (cfg, params) = checked(run)?;
    let result =
        sweep(&params, range.0, range.1, steps, &cfg.settings).map_err(|e| e.to_string())?;
    if json {
        out.write_all(sweep_report_json(&cfg, range, steps, &result).as_bytes())
            .map_err(io)?;
    } else {
        out.write_all(sweep_report_text(&result).as_bytes())
            .map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_fewnomial(
    n: usize,
    masses: Option<Vec<f64>>,
    alpha: f64,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let masses = masses.unwrap_or_else(|| vec![1.0; n]);
    if masses.len() != n {
        return Err(format!("expected {n} masses, got {}", masses.len()));
    }
    let params = PotentialParams::new(alpha, masses).map_err(|e| e.to_string())?;
    let system = build_system(&params);
    let summary = system.summary();
    if !json {
        let names = system.variable_names();
        for (k, eq) in system.equations.iter().enumerate() {
            writeln!(out, "E{} = {}", k + 1, eq.display(&names)).map_err(io)?;
        }
    }
    writeln!(
        out,
        "{}",
        serde_json::to_string(&summary).expect("serializes")
    )
    .map_err(io)?;
    if !json {
        writeln!(out, "{summary}").map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(input: &PathBuf, tol: Option<f64>, out: &mut dyn Write) -> CmdResult {
    let text = std::fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let parsed = parse_verify_input(&text).map_err(|e| format!("{}: {e}", input.display()))?;
    let tol = tol.or(parsed.tol_residual).unwrap_or(1e-12);
    let verdicts =
        verify_records(&parsed.records, tol).map_err(|e| format!("{}: {e}", input.display()))?;
    for v in &verdicts {
        writeln!(out, "{v}").map_err(io)?;
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    writeln!(
        out,
        "verified={} passed={} failed={}",
        verdicts.len(),
        verdicts.len() - failed,
        failed
    )
    .map_err(io)?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("ccenum").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn bounds_json_is_exact() {
        let (code, out, _) = run(&["bounds", "--n", "3", "--json"]);
        assert_eq!(code, 0);
        assert_eq!(
            out.trim_end(),
            r#"{"n":3,"upper":"4270451687424","lower":"3","poincare":["1","3","2"]}"#
        );
    }

    #[test]
    fn bounds_rejects_one_body() {
        let (code, out, err) = run(&["bounds", "--n", "1"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("at least 2"));
    }

    #[test]
    fn masses_override_config_defaults() {
        let args = RunArgs {
            n: Some(3),
            alpha: Some(0.5),
            masses: Some(vec![1.0, 2.0, 3.0]),
            starts: Some(10),
            seed: Some(4),
            tol: None,
            max_iters: None,
            config: None,
            output: None,
            format: None,
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.masses, vec![1.0, 2.0, 3.0]);
        assert_eq!(cfg.settings.starts, 10);
        assert_eq!(cfg.settings.seed, 4);
        assert_eq!(cfg.alpha, 0.5);
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run(&["enumerate", "--bogus"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }
}

//! Writes an enumeration report to disk, reads it back and re-checks it.

use ccenum::report::{
    build_enumerate_report, parse_verify_input, verify_records, OutputFormat, RunConfig,
};
use ccenum::solver::{enumerate_with_stats, SolverSettings};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig {
        n: 3,
        alpha: 1.0,
        masses: vec![1.0, 2.0, 3.0],
        settings: SolverSettings {
            starts: 400,
            seed: 11,
            ..Default::default()
        },
        output: None,
        format: OutputFormat::Json,
    };
    let params = config.validate()?;
    let run = enumerate_with_stats(&params, &config.settings);
    let report = build_enumerate_report(config, &params, &run.classes, run.stats);
    println!("{}", report.summary);

    let path = std::env::temp_dir().join(format!("ccenum-report-{}.json", std::process::id()));
    std::fs::write(&path, report.to_json())?;
    let input = parse_verify_input(&std::fs::read_to_string(&path)?)?;
    let verdicts = verify_records(&input.records, input.tol_residual.unwrap_or(1e-12))?;
    for v in &verdicts {
        println!("{v}");
    }
    std::fs::remove_file(&path)?;
    assert!(verdicts.iter().all(|v| v.pass));
    Ok(())
}

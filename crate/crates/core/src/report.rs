//! Run configuration, machine-readable class records and the residual audit.
//!
//! Reals in class records are decimal strings with 17 significant digits and
//! big integers are decimal strings, so files round-trip losslessly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::acsystem::{ac_residual_inf, distances_of, matrix_residual_fro};
use crate::bounds::BoundsReport;
use crate::classify::CentralConfigClass;
use crate::error::Error;
use crate::geometry::{lambda_of, residual_inf_norm, Configuration, PotentialParams};
use crate::solver::{ContinuationResult, EnumerationStats, SolverSettings, AC_TOL};

pub(crate) fn biguint_string<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub(crate) fn biguint_strings<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// 17 significant digits, scientific notation.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(s: &str, context: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| format!("{context}: invalid real {s:?} ({e})"))
}

/// Key of `r_ij` (1-based) in the distance map.
pub fn distance_key(n: usize, i: usize, j: usize) -> String {
    if n < 10 {
        format!("r{}{}", i + 1, j + 1)
    } else {
        format!("r{}_{}", i + 1, j + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub alpha: f64,
    pub masses: Vec<f64>,
    #[serde(default)]
    pub settings: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn params(&self) -> Result<PotentialParams, Error> {
        if self.masses.len() != self.n {
            return Err(Error::BodyCountMismatch {
                expected: self.n,
                got: self.masses.len(),
            });
        }
        PotentialParams::new(self.alpha, self.masses.clone())
    }

    pub fn validate(&self) -> Result<PotentialParams, Error> {
        self.settings.validate()?;
        self.params()
    }
}

/// One class, as written to reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub id: usize,
    pub n: usize,
    pub alpha: String,
    pub masses: Vec<String>,
    pub points: Vec<[String; 2]>,
    pub distances: BTreeMap<String, String>,
    pub lambda: String,
    pub residual_inf: String,
    pub ac_residual_inf: String,
    pub matrix_residual_fro: String,
    pub orientation: i8,
    pub kernel_dim: usize,
    pub full_index: usize,
    pub reduced_index: Option<usize>,
    pub nondegenerate: bool,
    pub hits: usize,
}

impl ClassRecord {
    pub fn from_class(params: &PotentialParams, class: &CentralConfigClass) -> Self {
        let n = params.n();
        let distances = crate::geometry::pairs(n)
            .zip(&class.fingerprint.distances)
            .map(|((i, j), r)| (distance_key(n, i, j), real(*r)))
            .collect();
        ClassRecord {
            id: class.id,
            n,
            alpha: real(params.alpha()),
            masses: params.masses().iter().map(|&m| real(m)).collect(),
            points: class
                .config
                .points()
                .iter()
                .map(|p| [real(p.x), real(p.y)])
                .collect(),
            distances,
            lambda: real(class.lambda),
            residual_inf: real(class.residual_inf),
            ac_residual_inf: real(class.ac_residual_inf),
            matrix_residual_fro: real(class.matrix_residual_fro),
            orientation: class.fingerprint.orientation,
            kernel_dim: class.kernel_dim(),
            full_index: class.full_index(),
            reduced_index: class.reduced_index(),
            nondegenerate: class.nondegenerate(),
            hits: class.hits,
        }
    }

    /// Parameters and configuration stored in the record.
    pub fn decode(&self, index: usize) -> Result<(PotentialParams, Configuration), String> {
        let ctx = |field: &str| format!("record {index} (id {}): field `{field}`", self.id);
        let alpha = parse_real(&self.alpha, &ctx("alpha"))?;
        let masses = self
            .masses
            .iter()
            .enumerate()
            .map(|(k, m)| parse_real(m, &ctx(&format!("masses[{k}]"))))
            .collect::<Result<Vec<_>, _>>()?;
        if masses.len() != self.n {
            return Err(format!(
                "{}: expected {} entries, got {}",
                ctx("masses"),
                self.n,
                masses.len()
            ));
        }
        if self.points.len() != self.n {
            return Err(format!(
                "{}: expected {} entries, got {}",
                ctx("points"),
                self.n,
                self.points.len()
            ));
        }
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(k, [x, y])| {
                Ok([
                    parse_real(x, &ctx(&format!("points[{k}][0]")))?,
                    parse_real(y, &ctx(&format!("points[{k}][1]")))?,
                ])
            })
            .collect::<Result<Vec<_>, String>>()?;
        let params =
            PotentialParams::new(alpha, masses).map_err(|e| format!("{}: {e}", ctx("masses")))?;
        Ok((params, Configuration::from_xy(&points)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub classes: usize,
    pub nondegenerate: usize,
    pub within_bounds: bool,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "classes={} nondegenerate={} within_bounds={}",
            self.classes, self.nondegenerate, self.within_bounds
        )
    }
}

pub fn summarize(classes: &[CentralConfigClass], bounds: &BoundsReport) -> Summary {
    let nondegenerate = classes.iter().filter(|c| c.nondegenerate()).count();
    let k = BigUint::from(nondegenerate);
    Summary {
        classes: classes.len(),
        nondegenerate,
        within_bounds: bounds.lower <= k && k <= bounds.upper,
    }
}

/// Full output of an enumeration run.
#[derive(Debug, Clone, Serialize)]
pub struct EnumerateReport {
    pub config: RunConfig,
    pub bounds: BoundsReport,
    pub stats: EnumerationStats,
    pub summary: Summary,
    pub classes: Vec<ClassRecord>,
}

impl EnumerateReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let n = self.config.n;
        let mut header: Vec<String> = vec!["id".into(), "n".into(), "alpha".into()];
        header.extend((1..=n).map(|i| format!("m{i}")));
        for i in 1..=n {
            header.push(format!("x{i}"));
            header.push(format!("y{i}"));
        }
        header.extend(crate::geometry::pairs(n).map(|(i, j)| distance_key(n, i, j)));
        for h in [
            "lambda",
            "residual_inf",
            "ac_residual_inf",
            "matrix_residual_fro",
            "orientation",
            "kernel_dim",
            "full_index",
            "reduced_index",
            "nondegenerate",
            "hits",
        ] {
            header.push(h.into());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory write");
        for r in &self.classes {
            let mut row = vec![r.id.to_string(), r.n.to_string(), r.alpha.clone()];
            row.extend(r.masses.iter().cloned());
            for [x, y] in &r.points {
                row.push(x.clone());
                row.push(y.clone());
            }
            row.extend(
                crate::geometry::pairs(n).map(|(i, j)| r.distances[&distance_key(n, i, j)].clone()),
            );
            row.extend([
                r.lambda.clone(),
                r.residual_inf.clone(),
                r.ac_residual_inf.clone(),
                r.matrix_residual_fro.clone(),
                r.orientation.to_string(),
                r.kernel_dim.to_string(),
                r.full_index.to_string(),
                r.reduced_index.map(|v| v.to_string()).unwrap_or_default(),
                r.nondegenerate.to_string(),
                r.hits.to_string(),
            ]);
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "n={} alpha={} masses={:?} starts={} seed={}\n",
            self.config.n,
            self.config.alpha,
            self.config.masses,
            self.config.settings.starts,
            self.config.settings.seed
        );
        for c in &self.classes {
            out.push_str(&format!(
                "#{:<3} {} orient={:+} kernel={} index={} reduced={} hits={} residual={} points={}\n",
                c.id,
                if c.nondegenerate { "nondeg" } else { "DEGEN " },
                c.orientation,
                c.kernel_dim,
                c.full_index,
                c.reduced_index.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                c.hits,
                c.residual_inf,
                c.points
                    .iter()
                    .map(|[x, y]| format!("({x}, {y})"))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
        }
        out.push_str(&format!("{}\n", self.summary));
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => self.to_text(),
        }
    }
}

pub fn build_enumerate_report(
    config: RunConfig,
    params: &PotentialParams,
    classes: &[CentralConfigClass],
    stats: EnumerationStats,
) -> EnumerateReport {
    let bounds = crate::bounds::bounds_report(params.n());
    EnumerateReport {
        summary: summarize(classes, &bounds),
        classes: classes
            .iter()
            .map(|c| ClassRecord::from_class(params, c))
            .collect(),
        bounds,
        stats,
        config,
    }
}

/// Residual audit of one record.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: usize,
    pub residual_inf: f64,
    pub ac_residual_inf: f64,
    pub matrix_residual_fro: f64,
    pub lambda: f64,
    pub pass: bool,
    pub message: Option<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "class {}: {} residual_inf={} ac_residual_inf={} matrix_residual_fro={} lambda={}",
            self.id,
            if self.pass { "pass" } else { "FAIL" },
            real(self.residual_inf),
            real(self.ac_residual_inf),
            real(self.matrix_residual_fro),
            real(self.lambda),
        )?;
        if let Some(m) = &self.message {
            write!(f, " ({m})")?;
        }
        Ok(())
    }
}

/// Parsed input of the audit: the records plus the residual tolerance stored
/// with them (if any).
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyInput {
    pub records: Vec<ClassRecord>,
    pub tol_residual: Option<f64>,
}

/// Accepts a full enumeration report or a bare array of class records.
pub fn parse_verify_input(text: &str) -> Result<VerifyInput, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("malformed JSON: {e}"))?;
    let (records, tol) = match value {
        Value::Array(_) => (value, None),
        Value::Object(mut obj) => {
            let records = obj
                .remove("classes")
                .ok_or_else(|| "missing field `classes`".to_string())?;
            let tol = match obj.get("config") {
                Some(cfg) => {
                    let cfg: RunConfig = serde_json::from_value(cfg.clone())
                        .map_err(|e| format!("field `config`: {e}"))?;
                    Some(cfg.settings.tol_residual)
                }
                None => None,
            };
            (records, tol)
        }
        _ => return Err("expected a report object or an array of class records".into()),
    };
    let Value::Array(items) = records else {
        return Err("field `classes` must be an array".into());
    };
    let records = items
        .into_iter()
        .enumerate()
        .map(|(k, item)| {
            serde_json::from_value::<ClassRecord>(item).map_err(|e| format!("record {k}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VerifyInput {
        records,
        tol_residual: tol,
    })
}

/// Re-evaluates the Cartesian, distance and matrix residuals of every record.
/// Field-level decoding problems are returned as `Err`.
pub fn verify_records(records: &[ClassRecord], tol_residual: f64) -> Result<Vec<Verdict>, String> {
    records
        .iter()
        .enumerate()
        .map(|(k, rec)| {
            let (params, config) = rec.decode(k)?;
            let evaluated = residual_inf_norm(&params, &config).and_then(|res| {
                Ok((
                    res,
                    ac_residual_inf(&params, &distances_of(&config)),
                    matrix_residual_fro(&params, &config)?,
                    lambda_of(&params, &config)?,
                ))
            });
            Ok(match evaluated {
                Ok((res, ac, mat, lambda)) => Verdict {
                    id: rec.id,
                    residual_inf: res,
                    ac_residual_inf: ac,
                    matrix_residual_fro: mat,
                    lambda,
                    pass: res < tol_residual
                        && ac < AC_TOL
                        && mat < AC_TOL
                        && (lambda - 1.0).abs() <= 1e-8,
                    message: None,
                },
                Err(e) => Verdict {
                    id: rec.id,
                    residual_inf: f64::NAN,
                    ac_residual_inf: f64::NAN,
                    matrix_residual_fro: f64::NAN,
                    lambda: f64::NAN,
                    pass: false,
                    message: Some(e.to_string()),
                },
            })
        })
        .collect()
}

fn track_json(result: &ContinuationResult) -> Value {
    json!({
        "alphas": result.alphas.iter().map(|&a| real(a)).collect::<Vec<_>>(),
        "counts": result.counts,
        "tracks": result.tracks.iter().map(|t| json!({
            "class_id": t.class_id,
            "lost_at": t.lost_at.map(real),
            "points": t.points.iter().map(|p| json!({
                "alpha": real(p.alpha),
                "min_gap": real(p.min_gap),
                "orientation": p.fingerprint.orientation,
                "distances": p.fingerprint.distances.iter().map(|&r| real(r)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "events": result.events.iter().map(|e| json!({
            "alpha": real(e.alpha),
            "class_id": e.class_id,
            "gap": real(e.gap),
        })).collect::<Vec<_>>(),
    })
}

pub fn sweep_report_json(
    config: &RunConfig,
    alpha_range: (f64, f64),
    steps: usize,
    result: &ContinuationResult,
) -> String {
    let mut v = track_json(result);
    v["config"] = serde_json::to_value(config).expect("config serializes");
    v["alpha_lo"] = json!(real(alpha_range.0));
    v["alpha_hi"] = json!(real(alpha_range.1));
    v["steps"] = json!(steps);
    let mut s = serde_json::to_string_pretty(&v).expect("serializes");
    s.push('\n');
    s
}

pub fn sweep_report_text(result: &ContinuationResult) -> String {
    let mut out = String::new();
    for (a, c) in result.alphas.iter().zip(&result.counts) {
        out.push_str(&format!("alpha={a:.6} classes={c}\n"));
    }
    for t in &result.tracks {
        let min_gap = t
            .points
            .iter()
            .map(|p| p.min_gap)
            .fold(f64::INFINITY, f64::min);
        out.push_str(&format!(
            "track {}: points={} min_gap={:.3e} lost_at={}\n",
            t.class_id,
            t.points.len(),
            min_gap,
            t.lost_at
                .map(|a| a.to_string())
                .unwrap_or_else(|| "-".into())
        ));
    }
    for e in &result.events {
        out.push_str(&format!(
            "degeneration: class {} at alpha={} gap={:e}\n",
            e.class_id, e.alpha, e.gap
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::CentralConfigClass;
    use proptest::prelude::*;

    fn lagrange() -> (PotentialParams, CentralConfigClass) {
        let p = PotentialParams::equal_masses(3, 1.0).unwrap();
        let s = 3f64.cbrt();
        let h = s * 3f64.sqrt() / 2.0;
        let c = Configuration::from_xy(&[
            [0.0, 2.0 * h / 3.0],
            [-s / 2.0, -h / 3.0],
            [s / 2.0, -h / 3.0],
        ]);
        let class = CentralConfigClass::from_solution(&p, &c, 7).unwrap();
        (p, class)
    }

    proptest! {
        #[test]
        fn reals_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            prop_assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn record_round_trip_passes_audit() {
        let (p, class) = lagrange();
        let rec = ClassRecord::from_class(&p, &class);
        assert_eq!(rec.distances.len(), 3);
        assert!(rec.distances.contains_key("r12"));
        let text = serde_json::to_string(&vec![rec.clone()]).unwrap();
        let input = parse_verify_input(&text).unwrap();
        assert_eq!(input.records, vec![rec]);
        let verdicts = verify_records(&input.records, 1e-12).unwrap();
        assert!(verdicts[0].pass, "{}", verdicts[0]);
    }

    #[test]
    fn audit_flags_perturbed_points() {
        let (p, class) = lagrange();
        let mut rec = ClassRecord::from_class(&p, &class);
        rec.points[0][0] = real(0.1);
        let verdicts = verify_records(&[rec], 1e-12).unwrap();
        assert!(!verdicts[0].pass);
    }

    #[test]
    fn malformed_inputs_are_diagnosed() {
        let err = parse_verify_input("{\"classes\": [ {\"id\": 1 ]}").unwrap_err();
        assert!(err.contains("line"), "{err}");
        let (p, class) = lagrange();
        let mut rec = ClassRecord::from_class(&p, &class);
        rec.points[1][1] = "abc".into();
        let err = verify_records(&[rec], 1e-12).unwrap_err();
        assert!(err.contains("points[1][1]"), "{err}");
        let err = parse_verify_input("[{\"id\": 1}]").unwrap_err();
        assert!(err.contains("record 0"), "{err}");
    }

    #[test]
    fn csv_has_one_row_per_class() {
        let (p, class) = lagrange();
        let config = RunConfig {
            n: 3,
            alpha: 1.0,
            masses: vec![1.0; 3],
            settings: SolverSettings::default(),
            output: None,
            format: OutputFormat::Csv,
        };
        let report = build_enumerate_report(config, &p, &[class], EnumerationStats::default());
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("id,n,alpha,m1,m2,m3,x1,y1"));
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    }
}

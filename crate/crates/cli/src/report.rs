//! JSON and CSV report writers.
//!
//! Numbers are written with 17 significant digits so that every double
//! round-trips. JSON has no NaN or infinity literals; such values are written as
//! the strings `"NaN"`, `"inf"` and `"-inf"`, and a record holding one always
//! carries a FAIL verdict.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use roundsphere_core::{Location, VerificationRecord, Verdict};
use serde_json::{json, Map, Number, Value};

use crate::config::RunConfig;
use crate::suites::RigiditySummary;

/// `x` with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format!("{x:.16e}")).expect("valid JSON number"))
    } else {
        Value::String(format_f64(x))
    }
}

fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

pub fn location_json(loc: &Location) -> Value {
    match loc {
        Location::Chart(u) => json!({ "chart": numbers(u) }),
        Location::Sample(i) => json!({ "sample": i }),
        Location::Global => Value::String("global".into()),
    }
}

pub fn location_text(loc: &Location) -> String {
    match loc {
        Location::Chart(u) => format!("chart:({})", u.iter().map(|&x| format_f64(x)).collect::<Vec<_>>().join(";")),
        Location::Sample(i) => format!("sample:{i}"),
        Location::Global => "global".into(),
    }
}

pub fn record_json(rec: &VerificationRecord) -> Value {
    json!({
        "check_id": rec.check_id,
        "location": location_json(&rec.location),
        "lhs": number(rec.lhs),
        "rhs": number(rec.rhs),
        "residual": number(rec.residual),
        "tolerance": number(rec.tolerance),
        "verdict": rec.verdict.as_str(),
        "note": rec.note,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    /// Largest `|residual|` per check id over non-skipped records.
    pub max_abs_residual: BTreeMap<String, f64>,
}

pub fn summarize(records: &[VerificationRecord]) -> Summary {
    let mut s = Summary::default();
    for rec in records {
        match rec.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::Skipped => {
                s.skipped += 1;
                continue;
            }
        }
        let r = if rec.residual.is_nan() { f64::NAN } else { rec.residual.abs() };
        let slot = s.max_abs_residual.entry(rec.check_id.clone()).or_insert(0.0);
        // NaN sticks
        if r.is_nan() || r > *slot {
            *slot = r;
        }
    }
    s
}

fn config_echo(cfg: &RunConfig) -> Value {
    let params: Map<String, Value> = cfg.params.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
    let tol: Map<String, Value> = cfg.tol_overrides.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
    json!({
        "suite": cfg.suite.name(),
        "family": cfg.family_name,
        "family_tag": cfg.family.tag(),
        "params": params,
        "c": number(cfg.c),
        "r": cfg.r,
        "grid": cfg.grid,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tol": tol,
        "format": cfg.format.name(),
    })
}

/// The whole report document.
pub fn report_json(
    cfg: &RunConfig,
    records: &[VerificationRecord],
    rigidity: Option<&RigiditySummary>,
    caveats: &[String],
    timestamp: u64,
) -> Value {
    let summary = summarize(records);
    let tolerances: Map<String, Value> = cfg.tolerances.entries().into_iter().map(|(k, v)| (k.to_string(), number(v))).collect();
    let max_res: Map<String, Value> = summary.max_abs_residual.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
    let mut doc = json!({
        "meta": {
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "config": config_echo(cfg),
            "tolerances": tolerances,
            "timestamp": timestamp,
            "caveats": caveats,
        },
        "summary": {
            "pass": summary.pass,
            "fail": summary.fail,
            "skipped": summary.skipped,
            "max_abs_residual_per_check": max_res,
        },
    });
    if let Some(rg) = rigidity {
        doc["rigidity"] = json!({
            "family": rg.tag,
            "c": number(rg.c),
            "r": rg.r,
            "verdict": rg.verdict,
            "max_umbilicity_deficit": number(rg.max_deficit),
            "min_lambda_min": number(rg.min_lambda_min),
            "range_h": number(rg.range_h),
            "range_hr": number(rg.range_hr),
            "stddev_h": number(rg.stddev_h),
            "stddev_hr": number(rg.stddev_hr),
            "elliptic_point_found": rg.elliptic_point_found,
            "elliptic_margin": number(rg.elliptic_margin),
            "points": rg.points,
        });
    }
    doc["records"] = Value::Array(records.iter().map(record_json).collect());
    doc
}

pub fn write_csv(records: &[VerificationRecord], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check_id", "location", "lhs", "rhs", "residual", "tolerance", "verdict"])?;
    for rec in records {
        w.write_record([
            rec.check_id.clone(),
            location_text(&rec.location),
            format_f64(rec.lhs),
            format_f64(rec.rhs),
            format_f64(rec.residual),
            format_f64(rec.tolerance),
            rec.verdict.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `report.json` → `report.csv`.
pub fn csv_path(json_path: &Path) -> PathBuf {
    json_path.with_extension("csv")
}

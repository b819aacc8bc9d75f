//! Text and JSON renderings of reports, ledgers and scans.

use std::fmt::Write as _;
use std::path::Path;

use fredholm_core::fredholm::{FredholmReport, IndicialRoot, LimitVerdict, Witness, WEIGHT_CONVENTION};
use fredholm_core::numoracle::{Ledger, ScanResult};
use serde_json::{json, Map, Value};

use crate::num::{json as jn, json_c, json_vec, text as tn, text_c};
use crate::CliError;

pub const REPORT_SCHEMA: &str = "fredholm-kit/report@1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn render_report(report: &FredholmReport, format: Format) -> String {
    match format {
        Format::Text => report_text(report),
        Format::Json => to_json_string(&report_json(report)),
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn root_line(r: &IndicialRoot) -> String {
    format!(
        "z = {} (τ = {}) on mode {} [{}], λ = {}, multiplicity {}",
        text_c(r.mellin),
        text_c(r.tau),
        r.mode_id,
        r.mode_label,
        tn(r.eigenvalue),
        r.multiplicity
    )
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Root(r) => format!("root {}", root_line(r)),
        Witness::Covector(x) => {
            let parts: Vec<String> = x.iter().map(|v| tn(*v)).collect();
            format!("covector ({})", parts.join(", "))
        }
        Witness::Frequency(k) => format!("frequency k = {}", tn(*k)),
    }
}

pub fn report_text(r: &FredholmReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "VERDICT: {}", r.verdict.as_str());
    if r.numerical_evidence_only() {
        let _ = writeln!(s, "CAVEAT: numerical evidence only");
        for v in &r.limit_verdicts {
            for n in &v.notes {
                let _ = writeln!(s, "  | {n}");
            }
        }
    }
    let _ = writeln!(s, "weight convention: {WEIGHT_CONVENTION}");
    let _ = writeln!(s, "weight: δ = {}", tn(r.weight));
    let _ = writeln!(s, "structure: {}", r.structure.name());
    let _ = writeln!(s, "cross-section: {}", r.cross_section);
    let _ = writeln!(s, "operator: {}", r.operator);
    let e = &r.elliptic;
    let eta: Vec<String> = e.witness.eta.iter().map(|v| tn(*v)).collect();
    let _ = writeln!(
        s,
        "ellipticity: {} (min |det σ| = {} at r = {}, ξ = {}, η = ({}); threshold {})",
        if e.elliptic { "elliptic" } else { "NOT elliptic" },
        tn(e.min_abs_det),
        tn(e.witness.r),
        tn(e.witness.xi),
        eta.join(", "),
        tn(e.threshold)
    );
    if r.compact {
        let _ = writeln!(s, "compact: yes");
    }
    if !r.limit_verdicts.is_empty() {
        let _ = writeln!(s, "limit operators:");
        for v in &r.limit_verdicts {
            let _ = writeln!(
                s,
                "  [{}] {}: invertible = {}, margin = {}",
                v.kind.as_str(),
                v.orbit,
                v.invertible.as_str(),
                tn(v.margin)
            );
            if let Some(w) = &v.witness {
                let _ = writeln!(s, "    witness: {}", witness_text(w));
            }
            if let Some(scan) = &v.samples {
                let _ = writeln!(
                    s,
                    "    samples: {} points, min σ = {} at {}",
                    scan.grid.len(),
                    tn(scan.global_min),
                    tn(scan.argmin)
                );
                for l in &scan.ladder {
                    let _ = writeln!(s, "      level {:>5} points: min σ = {} at {}", l.points, tn(l.global_min), tn(l.argmin));
                }
            }
        }
    }
    if !r.roots.is_empty() {
        let _ = writeln!(s, "indicial roots ({}):", r.roots.len());
        for root in &r.roots {
            let _ = writeln!(s, "  {}", root_line(root));
        }
    }
    if let Some((lo, hi)) = r.certified_range {
        let parts: Vec<String> = r.safe_weights.iter().map(|(a, b)| format!("({}, {})", tn(*a), tn(*b))).collect();
        let _ = writeln!(s, "certified weight range: [{}, {}]", tn(lo), tn(hi));
        let _ = writeln!(s, "safe weights: {}", if parts.is_empty() { "none".to_string() } else { parts.join(" ") });
    }
    if let Some(c) = &r.cutoff {
        let _ = write!(s, "cutoff: requested {}, used {}", tn(c.requested), tn(c.used));
        if let Some(t) = &c.tail {
            let _ = write!(s, "; symbol floor {}, domination radius {}", tn(t.symbol_floor), tn(t.radius));
        }
        let _ = writeln!(s);
    }
    if !r.notes.is_empty() {
        let _ = writeln!(s, "notes:");
        for n in &r.notes {
            let _ = writeln!(s, "  - {n}");
        }
    }
    s
}

fn root_json(r: &IndicialRoot) -> Value {
    json!({
        "mode_id": r.mode_id,
        "mode": r.mode_label,
        "eigenvalue": jn(r.eigenvalue),
        "mellin": json_c(r.mellin),
        "tau": json_c(r.tau),
        "multiplicity": r.multiplicity,
        "residual": jn(r.residual),
    })
}

pub fn scan_json(scan: &ScanResult) -> Value {
    json!({
        "grid": json_vec(&scan.grid),
        "min_singular": json_vec(&scan.min_singular),
        "global_min": jn(scan.global_min),
        "argmin": jn(scan.argmin),
        "ladder": scan.ladder.iter().map(|l| json!({
            "points": l.points,
            "global_min": jn(l.global_min),
            "argmin": jn(l.argmin),
        })).collect::<Vec<_>>(),
    })
}

fn limit_json(v: &LimitVerdict) -> Value {
    let witness = match &v.witness {
        None => Value::Null,
        Some(Witness::Root(r)) => json!({ "type": "root", "root": root_json(r) }),
        Some(Witness::Covector(x)) => json!({ "type": "covector", "covector": json_vec(x) }),
        Some(Witness::Frequency(k)) => json!({ "type": "frequency", "frequency": jn(*k) }),
    };
    json!({
        "orbit": v.orbit,
        "kind": v.kind.as_str(),
        "invertible": v.invertible.as_str(),
        "margin": jn(v.margin),
        "witness": witness,
        "samples": v.samples.as_ref().map_or(Value::Null, scan_json),
        "notes": v.notes,
    })
}

pub fn report_json(r: &FredholmReport) -> Value {
    let e = &r.elliptic;
    let cutoff = r.cutoff.as_ref().map_or(Value::Null, |c| {
        json!({
            "requested": jn(c.requested),
            "used": jn(c.used),
            "certified_half_width": c.certified_half_width.map_or(Value::Null, jn),
            "tail": c.tail.as_ref().map_or(Value::Null, |t| json!({
                "symbol_floor": jn(t.symbol_floor),
                "half_width": jn(t.half_width),
                "radius": jn(t.radius),
            })),
        })
    });
    let mut m = Map::new();
    m.insert("schema".into(), REPORT_SCHEMA.into());
    m.insert("convention".into(), WEIGHT_CONVENTION.into());
    m.insert("verdict".into(), r.verdict.as_str().into());
    m.insert("numerical_evidence_only".into(), r.numerical_evidence_only().into());
    m.insert("structure".into(), r.structure.name().into());
    m.insert("cross_section".into(), r.cross_section.clone().into());
    m.insert("operator".into(), r.operator.clone().into());
    m.insert("weight".into(), jn(r.weight));
    m.insert("compact".into(), r.compact.into());
    m.insert(
        "ellipticity".into(),
        json!({
            "elliptic": e.elliptic,
            "min_abs_det": jn(e.min_abs_det),
            "threshold": jn(e.threshold),
            "witness": { "r": jn(e.witness.r), "xi": jn(e.witness.xi), "eta": json_vec(&e.witness.eta) },
        }),
    );
    m.insert("limit_verdicts".into(), r.limit_verdicts.iter().map(limit_json).collect());
    m.insert("roots".into(), r.roots.iter().map(root_json).collect());
    m.insert(
        "safe_weights".into(),
        r.safe_weights.iter().map(|(a, b)| json!([jn(*a), jn(*b)])).collect(),
    );
    m.insert(
        "certified_range".into(),
        r.certified_range.map_or(Value::Null, |(a, b)| json!([jn(a), jn(b)])),
    );
    m.insert("cutoff".into(), cutoff);
    m.insert("notes".into(), r.notes.clone().into());
    Value::Object(m)
}

pub fn ledger_text(ledger: &Ledger) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ORACLE: {}", if ledger.passed() { "pass" } else { "FAIL" });
    for e in &ledger.entries {
        let _ = writeln!(s, "  [{}] {}: {}", if e.passed { "ok" } else { "!!" }, e.check, e.detail);
    }
    if let Some(f) = ledger.first_failure() {
        let _ = writeln!(s, "first discrepancy: {}", f.check);
    }
    s
}

pub fn ledger_json(ledger: &Ledger) -> Value {
    json!({
        "passed": ledger.passed(),
        "first_failure": ledger.first_failure().map(|f| f.check.clone()),
        "entries": ledger.entries.iter().map(|e| json!({
            "check": e.check,
            "passed": e.passed,
            "detail": e.detail,
        })).collect::<Vec<_>>(),
    })
}

/// Writes `point,minSingular` rows.
pub fn write_scan_csv(path: &Path, scan: &ScanResult) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["point", "minSingular"])?;
    for (x, s) in scan.rows() {
        w.write_record([tn(x), tn(s)])?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

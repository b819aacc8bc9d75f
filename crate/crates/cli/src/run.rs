//! Command dispatch. `run` never panics on bad input; every failure becomes
//! an exit code plus a diagnostic line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fredholm_core::fredholm::{analyze_roots, fredholm_check, CheckOptions, FredholmReport, LimitKind, Verdict};
use fredholm_core::limitops::{indicial_family, limit_operator, normal_operator, LimitOperator};
use fredholm_core::liestruct::{FrameExpansion, LieStructure, RPoly, StructureKind};
use fredholm_core::numoracle::{cross_check, scan_line, OracleOptions, ScanResult};
use fredholm_core::opalg::{kondratiev_transform, BoundaryOperator};
use fredholm_core::poly::MatrixPoly;
use fredholm_core::Execution;
use serde_json::{json, Value};

pub use crate::render::Format;
use crate::num::{json as jn, json_c, text as tn, text_c};
use crate::render::{ledger_json, ledger_text, render_report, report_json, scan_json, to_json_string, write_scan_csv};
use crate::spec::parse_spec;
use crate::{exit, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Roots,
    Normal,
    Transform,
    BracketTable,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Roots => "roots",
            Command::Normal => "normal",
            Command::Transform => "transform",
            Command::BracketTable => "bracket-table",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub weight: f64,
    pub cutoff: Option<f64>,
    pub tau_range: Option<(f64, f64)>,
    pub pts: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub compact: bool,
    /// For `bracket-table` without a spec: `b`, `zero`, `sc` or `cgamma:<γ>`.
    pub structure: Option<String>,
    pub collar_dim: usize,
    pub execution: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            weight: 0.0,
            cutoff: None,
            tau_range: None,
            pts: 2001,
            format: Format::Text,
            out: None,
            csv: None,
            compact: false,
            structure: None,
            collar_dim: 2,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    /// The rendered document (also written to `--out` when given).
    pub document: String,
    pub diagnostics: Vec<String>,
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Fredholm => exit::FREDHOLM,
        Verdict::NotFredholm => exit::NOT_FREDHOLM,
        Verdict::Undecided => exit::UNDECIDED,
    }
}

pub fn run(cmd: Command, spec: Option<&Path>, opts: &RunOptions) -> Outcome {
    match dispatch(cmd, spec, opts) {
        Ok((code, document)) => {
            if let Some(out) = &opts.out {
                if let Err(source) = std::fs::write(out, &document) {
                    let e = CliError::Io {
                        path: out.display().to_string(),
                        source,
                    };
                    return failure(e);
                }
            }
            Outcome {
                exit_code: code,
                document,
                diagnostics: Vec::new(),
            }
        }
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    Outcome {
        exit_code: e.exit_code(),
        document: String::new(),
        diagnostics: vec![format!("error: {e}")],
    }
}

fn load(spec: Option<&Path>, cmd: Command) -> Result<BoundaryOperator, CliError> {
    let path = spec.ok_or_else(|| CliError::Usage(format!("`{}` needs a spec file", cmd.name())))?;
    parse_spec(path)
}

fn check_options(opts: &RunOptions) -> Result<CheckOptions, CliError> {
    if !opts.weight.is_finite() {
        return Err(CliError::Usage(format!("--weight must be finite, got {}", opts.weight)));
    }
    if let Some(c) = opts.cutoff {
        if !(c > 0.0) || !c.is_finite() {
            return Err(CliError::Usage(format!("--cutoff must be positive, got {c}")));
        }
    }
    let mut check = CheckOptions {
        weight: opts.weight,
        cutoff: opts.cutoff,
        compact: opts.compact,
        execution: opts.execution,
        ..Default::default()
    };
    check.sampling.execution = opts.execution;
    Ok(check)
}

fn tau_range(opts: &RunOptions) -> Result<(f64, f64), CliError> {
    let (a, b) = opts.tau_range.unwrap_or((-10.0, 10.0));
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(CliError::Usage(format!("--tau-range needs finite a < b, got {a} {b}")));
    }
    if opts.pts < 2 {
        return Err(CliError::Usage(format!("--pts must be at least 2, got {}", opts.pts)));
    }
    Ok((a, b))
}

fn dispatch(cmd: Command, spec: Option<&Path>, opts: &RunOptions) -> Result<(i32, String), CliError> {
    match cmd {
        Command::Check => {
            let op = load(spec, cmd)?;
            let check = check_options(opts)?;
            let mut report = fredholm_check(&op, &check)?;
            attach_scan(&op, &mut report, &check, opts)?;
            Ok((verdict_code(report.verdict), render_report(&report, opts.format)))
        }
        Command::Verify => {
            let op = load(spec, cmd)?;
            let check = check_options(opts)?;
            let report = fredholm_check(&op, &check)?;
            let oracle = OracleOptions {
                execution: opts.execution,
                ..Default::default()
            };
            let ledger = cross_check(&op, &report, &check, &oracle)?;
            let code = if ledger.passed() { verdict_code(report.verdict) } else { exit::ORACLE_MISMATCH };
            let doc = match opts.format {
                Format::Text => format!("{}{}", render_report(&report, Format::Text), ledger_text(&ledger)),
                Format::Json => to_json_string(&json!({
                    "report": report_json(&report),
                    "oracle": ledger_json(&ledger),
                })),
            };
            Ok((code, doc))
        }
        Command::Roots => roots(&load(spec, cmd)?, opts),
        Command::Normal => normal(&load(spec, cmd)?, opts),
        Command::Transform => transform(&load(spec, cmd)?, opts),
        Command::BracketTable => {
            let structure = match (spec, &opts.structure) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage("give either a spec file or --structure, not both".into()))
                }
                (Some(_), None) => {
                    let op = load(spec, cmd)?;
                    LieStructure::new(op.kind(), op.cross_section().dimension() + 1)?
                }
                (None, Some(s)) => LieStructure::new(parse_structure(s)?, opts.collar_dim)?,
                (None, None) => return Err(CliError::Usage("`bracket-table` needs a spec file or --structure".into())),
            };
            Ok((exit::SUCCESS, bracket_table(&structure, opts.format)?))
        }
    }
}

/// For `b` operators, `--tau-range`/`--csv` add a line scan at the weight.
fn attach_scan(op: &BoundaryOperator, report: &mut FredholmReport, check: &CheckOptions, opts: &RunOptions) -> Result<(), CliError> {
    if opts.tau_range.is_none() && opts.csv.is_none() {
        return Ok(());
    }
    let Some(v) = report.limit_verdicts.iter_mut().find(|v| v.kind == LimitKind::Normal) else {
        // half-space samples are already attached; export those
        if let (Some(path), Some(scan)) = (&opts.csv, report.limit_verdicts.iter().find_map(|v| v.samples.as_ref())) {
            write_scan_csv(path, scan)?;
        }
        return Ok(());
    };
    let range = tau_range(opts)?;
    let analysis = analyze_roots(op, check)?;
    let scan = scan_line(&analysis.family, opts.weight, range, opts.pts, opts.execution)?;
    if let Some(path) = &opts.csv {
        write_scan_csv(path, &scan)?;
    }
    v.samples = Some(scan);
    Ok(())
}

pub fn parse_structure(s: &str) -> Result<StructureKind, CliError> {
    match s {
        "b" => Ok(StructureKind::B),
        "zero" | "0" => Ok(StructureKind::Zero),
        "sc" => Ok(StructureKind::Sc),
        _ => match s.strip_prefix("cgamma:") {
            Some(g) => g
                .parse()
                .map(StructureKind::CGamma)
                .map_err(|_| CliError::Usage(format!("bad gamma in `{s}`"))),
            None => Err(CliError::Usage(format!("unknown structure `{s}` (b, zero, sc, cgamma:<gamma>)"))),
        },
    }
}

fn roots(op: &BoundaryOperator, opts: &RunOptions) -> Result<(i32, String), CliError> {
    let check = check_options(opts)?;
    let analysis = analyze_roots(op, &check)?;
    let range = tau_range(opts)?;
    let scan: ScanResult = scan_line(&analysis.family, opts.weight, range, opts.pts, opts.execution)?;
    if let Some(path) = &opts.csv {
        write_scan_csv(path, &scan)?;
    }
    let safe = analysis
        .certified_range()
        .map(|(lo, hi)| fredholm_core::fredholm::safe_weight_intervals(&analysis.roots, lo, hi));
    let doc = match opts.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "operator: {op}");
            let _ = writeln!(s, "weight convention: line Re(z) = δ");
            let _ = writeln!(s, "cutoff: requested {}, used {}", tn(analysis.cutoff.requested), tn(analysis.cutoff.used));
            let _ = writeln!(s, "{:>5}  {:>16}  {:>4}  mellin z", "mode", "eigenvalue", "mult");
            for r in &analysis.roots {
                let _ = writeln!(
                    s,
                    "{:>5}  {:>16}  {:>4}  {}",
                    r.mode_id,
                    tn(r.eigenvalue),
                    r.multiplicity,
                    text_c(r.mellin)
                );
            }
            if let (Some((lo, hi)), Some(safe)) = (analysis.certified_range(), &safe) {
                let parts: Vec<String> = safe.iter().map(|(a, b)| format!("({}, {})", tn(*a), tn(*b))).collect();
                let _ = writeln!(s, "safe weights in [{}, {}]: {}", tn(lo), tn(hi), parts.join(" "));
            }
            let _ = writeln!(
                s,
                "line scan at δ = {} over τ ∈ [{}, {}]: min σ = {} at τ = {}",
                tn(opts.weight),
                tn(range.0),
                tn(range.1),
                tn(scan.global_min),
                tn(scan.argmin)
            );
            s
        }
        Format::Json => to_json_string(&json!({
            "convention": "line Re(z) = δ",
            "operator": op.to_string(),
            "cutoff": { "requested": jn(analysis.cutoff.requested), "used": jn(analysis.cutoff.used) },
            "roots": analysis.roots.iter().map(|r| json!({
                "mode_id": r.mode_id,
                "mode": r.mode_label,
                "eigenvalue": jn(r.eigenvalue),
                "multiplicity": r.multiplicity,
                "mellin": json_c(r.mellin),
                "tau": json_c(r.tau),
                "residual": jn(r.residual),
            })).collect::<Vec<_>>(),
            "certified_range": analysis.certified_range().map(|(a, b)| json!([jn(a), jn(b)])),
            "safe_weights": safe.map(|s| s.iter().map(|(a, b)| json!([jn(*a), jn(*b)])).collect::<Vec<_>>()),
            "scan": scan_json(&scan),
        })),
    };
    Ok((exit::SUCCESS, doc))
}

fn poly_text(p: &MatrixPoly) -> String {
    if p.dim() != 1 {
        return format!("{}x{} matrix polynomial of degree {}", p.dim(), p.dim(), p.degree().unwrap_or(0));
    }
    let parts: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, m)| m[(0, 0)].norm() > 0.0)
        .map(|(k, m)| match k {
            0 => format!("({})", text_c(m[(0, 0)])),
            1 => format!("({})·τ", text_c(m[(0, 0)])),
            _ => format!("({})·τ^{k}", text_c(m[(0, 0)])),
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn normal(op: &BoundaryOperator, opts: &RunOptions) -> Result<(i32, String), CliError> {
    let limit = limit_operator(op, None)?;
    let (kind, base, extra) = match &limit {
        LimitOperator::Normal { normal, .. } => ("normal", normal.base().clone(), None),
        LimitOperator::Sc { symbol, .. } => ("constant symbol", symbol.operator().clone(), None),
        LimitOperator::Zero { half_space, .. } => ("half-space model", half_space.operator().clone(), None),
        LimitOperator::CGamma { symbol, warning, .. } => ("constant symbol", symbol.operator().clone(), Some(warning.clone())),
    };
    let family = if op.kind() == StructureKind::B {
        let cutoff = check_options(opts)?.cutoff.unwrap_or_else(|| fredholm_core::fredholm::default_cutoff(op));
        Some(indicial_family(&normal_operator(op)?, cutoff, opts.execution)?)
    } else {
        None
    };
    let doc = match opts.format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "limit operator ({kind}) on {}: {base}", limit.orbit());
            if let Some(w) = &extra {
                let _ = writeln!(s, "warning: {w}");
            }
            if let Some(f) = &family {
                let _ = writeln!(s, "indicial family, cutoff {}:", tn(f.cutoff));
                for mf in &f.modes {
                    let _ = writeln!(s, "  mode {} [{}]: {}", mf.mode.id, mf.mode.label(), poly_text(&mf.poly));
                }
            }
            s
        }
        Format::Json => to_json_string(&json!({
            "kind": kind,
            "orbit": limit.orbit(),
            "operator": base.to_string(),
            "warning": extra,
            "indicial_family": family.as_ref().map(|f| f.modes.iter().map(|mf| json!({
                "mode_id": mf.mode.id,
                "mode": mf.mode.label(),
                "coefficients": mf.poly.coeffs().iter().map(|m| {
                    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| json_c(m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>()),
        })),
    };
    Ok((exit::SUCCESS, doc))
}

fn transform(op: &BoundaryOperator, opts: &RunOptions) -> Result<(i32, String), CliError> {
    let cyl = kondratiev_transform(op)?;
    let limit = cyl.limit();
    let doc = match opts.format {
        Format::Text => format!(
            "t = log r\ncylinder operator: {cyl}\nlimit t → -∞: {limit}\ntranslation invariant: {}\n",
            if cyl.is_translation_invariant() { "yes" } else { "no" }
        ),
        Format::Json => to_json_string(&json!({
            "substitution": "t = log r",
            "operator": cyl.to_string(),
            "limit": limit.to_string(),
            "translation_invariant": cyl.is_translation_invariant(),
        })),
    };
    Ok((exit::SUCCESS, doc))
}

fn expansion_text(e: &FrameExpansion) -> String {
    let parts: Vec<String> = e
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| coef_times(c, k))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn coef_times(c: &RPoly, k: usize) -> String {
    match c.terms() {
        [m] if m.r_pow == 0.0 && m.y_pows.iter().all(|&p| p == 0) && m.coeff == 1.0 => format!("e{k}"),
        [m] if m.r_pow == 0.0 && m.y_pows.iter().all(|&p| p == 0) && m.coeff == -1.0 => format!("-e{k}"),
        _ => format!("({c})·e{k}"),
    }
}

fn bracket_table(s: &LieStructure, format: Format) -> Result<String, CliError> {
    let frame = s.frame();
    let table = s.bracket_table()?;
    let iso = s.isotropy();
    let n = frame.len();
    Ok(match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "structure: {} (collar dimension {n})", s.kind().name());
            for (i, f) in frame.iter().enumerate() {
                let _ = writeln!(out, "  e{i} = {f}");
            }
            for i in 0..n {
                for j in i + 1..n {
                    let _ = writeln!(out, "[e{i}, e{j}] = {}", expansion_text(&table[i][j]));
                }
            }
            let gens: Vec<String> = iso.generators.iter().map(|g| format!("e{g}")).collect();
            let _ = writeln!(out, "isotropy at r = 0: span{{{}}}, {:?}, orbits: {:?}", gens.join(", "), iso.group_kind, iso.orbit);
            let _ = writeln!(
                out,
                "structure constants vanish at r = 0: {}",
                if iso.structure_constants.iter().flatten().flatten().all(|&c| c == 0.0) { "yes" } else { "no" }
            );
            out
        }
        Format::Json => {
            let brackets: Vec<Value> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| {
                    json!({
                        "i": i,
                        "j": j,
                        "expansion": expansion_text(&table[i][j]),
                        "coefficients": table[i][j].coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json_string(&json!({
                "structure": s.kind().name(),
                "frame": frame.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "brackets": brackets,
                "isotropy": {
                    "generators": iso.generators,
                    "group": format!("{:?}", iso.group_kind),
                    "orbit": format!("{:?}", iso.orbit),
                    "structure_constants": iso.structure_constants.iter().map(|a| a.iter().map(|b| b.iter().map(|&x| jn(x)).collect::<Vec<_>>()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                },
            }))
        }
    })
}

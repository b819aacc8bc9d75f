//! The Fredholm decision: ellipticity plus invertibility of every limit
//! operator.
//!
//! Weights follow one convention throughout: the weight `δ` is the exponent
//! in `r^δ`, and conjugating by it turns `r∂_r` into `r∂_r + δ`. A `b`
//! operator is then invertible on the weighted scale iff no Mellin root `z`
//! of the indicial family lies on the line `Re z = δ` (equivalently
//! `Im τ = -δ`, since `z = iτ`).

use crate::crosssec::Mode;
use crate::error::{Error, Result};
use crate::limitops::{indicial_family, normal_operator, ConstantSymbol, HalfSpaceOperator, IndicialFamily};
use crate::liestruct::StructureKind;
use crate::numoracle::{half_space_sample, HalfSpaceGrid, ScanResult};
use crate::opalg::{is_elliptic, unit_covectors, BoundaryOperator, EllipticitySampling, EllipticityVerdict};
use crate::par::{self, Execution};
use crate::poly::{companion_roots, sigma_min, Matrix, C64, CLUSTER_TOL};

pub const WEIGHT_CONVENTION: &str = "line Re(z) = δ";

/// Distance to the test line at or below which a root counts as on it.
pub const ON_LINE_TOL: f64 = 1e-10;
/// Distance below which a root is too close to call.
pub const BORDERLINE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct IndicialRoot {
    pub mode_id: usize,
    pub mode_label: String,
    pub eigenvalue: f64,
    pub tau: C64,
    pub mellin: C64,
    pub multiplicity: usize,
    /// `|det P̂(z)|` relative to the size of its terms at `z`.
    pub residual: f64,
}

/// Roots of `det P̂` on every mode of the family.
pub fn indicial_roots(family: &IndicialFamily, exec: Execution) -> Result<Vec<IndicialRoot>> {
    let per_mode = par::map(exec, &family.modes, |mf| -> Result<Vec<IndicialRoot>> {
        let det = mf.mellin().det()?.trimmed(1e-13);
        if det.is_zero() {
            return Err(Error::DegenerateMode {
                mode: mf.mode.label(),
                reason: "indicial polynomial vanishes identically".into(),
            });
        }
        if det.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let roots = companion_roots(&det, CLUSTER_TOL)?;
        Ok(roots
            .into_iter()
            .map(|r| {
                let z = r.value;
                let scale: f64 = det
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a.norm() * z.norm().powi(k as i32))
                    .sum();
                IndicialRoot {
                    mode_id: mf.mode.id,
                    mode_label: mf.mode.label(),
                    eigenvalue: mf.mode.eigenvalue,
                    tau: C64::new(0.0, -1.0) * z,
                    mellin: z,
                    multiplicity: r.multiplicity,
                    residual: det.eval(z).norm() / scale.max(f64::MIN_POSITIVE),
                }
            })
            .collect())
    });
    let mut out = Vec::new();
    for roots in per_mode {
        out.extend(roots?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invertibility {
    Yes,
    No,
    /// Sampled only, or too close to call.
    NumericalEvidence,
}

impl Invertibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Invertibility::Yes => "yes",
            Invertibility::No => "no",
            Invertibility::NumericalEvidence => "numerical-evidence",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineVerdict {
    pub invertible: Invertibility,
    pub witness: Option<IndicialRoot>,
    /// Distance from the closest root to the line.
    pub distance: f64,
}

/// Tests the line `Re z = δ` against the computed roots.
pub fn normal_invertible(roots: &[IndicialRoot], delta: f64) -> LineVerdict {
    let closest = roots
        .iter()
        .map(|r| ((r.mellin.re - delta).abs(), r))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    match closest {
        None => LineVerdict {
            invertible: Invertibility::Yes,
            witness: None,
            distance: f64::INFINITY,
        },
        Some((d, r)) => LineVerdict {
            invertible: if d <= ON_LINE_TOL {
                Invertibility::No
            } else if d < BORDERLINE_TOL {
                Invertibility::NumericalEvidence
            } else {
                Invertibility::Yes
            },
            witness: Some(r.clone()),
            distance: d,
        },
    }
}

/// Open intervals of `[lo, hi]` free of `Re z` for every root.
pub fn safe_weight_intervals(roots: &[IndicialRoot], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut bad: Vec<f64> = roots
        .iter()
        .map(|r| r.mellin.re)
        .filter(|x| *x >= lo - ON_LINE_TOL && *x <= hi + ON_LINE_TOL)
        .collect();
    bad.sort_by(f64::total_cmp);
    bad.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let mut cuts = vec![lo];
    cuts.extend(bad.iter().copied());
    cuts.push(hi);
    cuts.windows(2)
        .filter(|w| w[1] - w[0] > ON_LINE_TOL)
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Bound certifying that modes of high frequency carry no roots.
///
/// With `c` the minimum of `σ_min` of the principal symbol on the unit
/// cosphere, every term of lower weight is bounded on `|Re z| ≤ W` by a
/// polynomial `B(ρ)` with nonnegative coefficients and degree below the
/// order `m`. `cρ^m - B(ρ)` has exactly one positive root `ρ₀`, and modes of
/// frequency above `ρ₀` are invertible on that whole strip.
#[derive(Clone, Debug, PartialEq)]
pub struct TailBound {
    pub symbol_floor: f64,
    pub half_width: f64,
    pub radius: f64,
}

impl TailBound {
    pub fn required_cutoff(&self) -> f64 {
        self.radius * self.radius
    }
}

/// Minimum of `σ_min` of the principal symbol at `r = 0` over the cosphere.
pub fn symbol_floor(op: &BoundaryOperator) -> Result<f64> {
    let mut floor = f64::INFINITY;
    for (xi, eta) in unit_covectors(op) {
        floor = floor.min(sigma_min(&op.principal_symbol(0.0, xi, &eta)?));
    }
    Ok(floor)
}

/// Coefficients of `B(ρ) + slack`.
fn remainder_poly(op: &BoundaryOperator, half_width: f64, slack: f64) -> Vec<f64> {
    let m = op.order() as usize;
    let mut b = vec![0.0; m + 1];
    b[0] += slack;
    for (alpha, coeff) in op.terms() {
        let norm = coeff.at_zero().norm();
        if norm == 0.0 {
            continue;
        }
        let a = alpha.radial as usize;
        let cross = alpha.cross_order() as usize;
        // (ρ + W)^a ρ^cross, minus ρ^m on top-order terms
        for i in 0..=a {
            let w = crate::poly::binomial(a as u32, i as u32) * half_width.powi((a - i) as i32);
            b[i + cross] += norm * w;
        }
        if a + cross == m {
            b[m] -= norm;
        }
    }
    b[m] = 0.0;
    b
}

/// Unique positive root of `cρ^m - B(ρ) - slack`, or infinity when `c = 0`.
fn domination_radius(op: &BoundaryOperator, floor: f64, half_width: f64, slack: f64) -> f64 {
    if floor <= 1e-12 {
        return f64::INFINITY;
    }
    let m = op.order() as i32;
    let b = remainder_poly(op, half_width, slack);
    if m == 0 {
        return if floor > b[0] { 0.0 } else { f64::INFINITY };
    }
    let f = |rho: f64| {
        floor * rho.powi(m) - b.iter().enumerate().map(|(k, v)| v * rho.powi(k as i32)).sum::<f64>()
    };
    let mut hi = (b.iter().sum::<f64>() / floor).max(1.0);
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    if f(lo) > 0.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn tail_bound(op: &BoundaryOperator, half_width: f64) -> Result<TailBound> {
    let normal = normal_operator(op)?;
    let floor = symbol_floor(normal.base())?;
    Ok(TailBound {
        symbol_floor: floor,
        half_width,
        radius: domination_radius(normal.base(), floor, half_width, 0.0),
    })
}

/// `10 · (largest coefficient) · m²`, at least 1.
pub fn default_cutoff(op: &BoundaryOperator) -> f64 {
    let m = f64::from(op.order().max(1));
    (10.0 * op.max_coefficient() * m * m).max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutoffInfo {
    pub requested: f64,
    pub used: f64,
    pub tail: Option<TailBound>,
    /// Weights in `[-w, w]` are certified, `w` = this value.
    pub certified_half_width: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub weight: f64,
    pub cutoff: Option<f64>,
    pub max_cutoff: f64,
    /// Half-width of the weight range to certify.
    pub weight_range: f64,
    pub sampling: EllipticitySampling,
    pub sc_search: ScSearch,
    pub half_space: HalfSpaceGrid,
    /// Closed manifold: no boundary, no limit operators.
    pub compact: bool,
    pub execution: Execution,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            weight: 0.0,
            cutoff: None,
            max_cutoff: 2e4,
            weight_range: 5.0,
            sampling: EllipticitySampling::default(),
            sc_search: ScSearch::default(),
            half_space: HalfSpaceGrid::default(),
            compact: false,
            execution: Execution::default(),
        }
    }
}

/// Indicial family, roots and cutoff bookkeeping for a `b` operator.
#[derive(Clone, Debug)]
pub struct RootAnalysis {
    pub family: IndicialFamily,
    pub roots: Vec<IndicialRoot>,
    pub cutoff: CutoffInfo,
}

impl RootAnalysis {
    pub fn certified_range(&self) -> Option<(f64, f64)> {
        self.cutoff.certified_half_width.map(|w| (-w, w))
    }

    pub fn safe_weights(&self, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
        let w = self.cutoff.certified_half_width.unwrap_or(-1.0);
        if lo < -w || hi > w {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff.used,
                certified: w.max(0.0),
                lo,
                hi,
            });
        }
        Ok(safe_weight_intervals(&self.roots, lo, hi))
    }
}

pub fn analyze_roots(op: &BoundaryOperator, opts: &CheckOptions) -> Result<RootAnalysis> {
    let normal = normal_operator(op)?;
    let base = normal.base();
    let requested = match opts.cutoff {
        Some(c) if !(c > 0.0) || !c.is_finite() => {
            return Err(Error::InvalidParameter(format!("cutoff must be positive, got {c}")))
        }
        Some(c) => c,
        None => default_cutoff(op),
    };
    let half_width = opts.weight_range.max(opts.weight.abs() + 1.0);
    let floor = symbol_floor(base)?;
    let tail = TailBound {
        symbol_floor: floor,
        half_width,
        radius: domination_radius(base, floor, half_width, 0.0),
    };
    let cross = op.cross_section();
    let (used, certified) = if let Some(max_ev) = cross.max_eigenvalue().filter(|_| cross.is_finite()) {
        (requested.max(max_ev), Some(half_width))
    } else {
        let used = requested.max(tail.required_cutoff().min(opts.max_cutoff));
        let fits = |w: f64| {
            let r = domination_radius(base, floor, w, 0.0);
            r * r <= used
        };
        let certified = if fits(half_width) {
            Some(half_width)
        } else if !fits(0.0) {
            None
        } else {
            let (mut lo, mut hi) = (0.0, half_width);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if fits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(lo)
        };
        (used, certified)
    };
    let family = indicial_family(&normal, used, opts.execution)?;
    let roots = indicial_roots(&family, opts.execution)?;
    Ok(RootAnalysis {
        family,
        roots,
        cutoff: CutoffInfo {
            requested,
            used,
            tail: Some(tail),
            certified_half_width: certified,
        },
    })
}

/// Search plan for constant-coefficient symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct ScSearch {
    /// Grid points per axis; 0 picks a size from the dimension.
    pub grid_points: usize,
    pub refine_starts: usize,
    pub no_threshold: f64,
    pub yes_threshold: f64,
}

impl Default for ScSearch {
    fn default() -> Self {
        ScSearch {
            grid_points: 0,
            refine_starts: 8,
            no_threshold: 1e-6,
            yes_threshold: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScVerdict {
    pub invertible: Invertibility,
    pub min_abs_det: f64,
    pub witness: Vec<f64>,
    /// Beyond this radius `|det|` is at least 1.
    pub radius: f64,
    pub elliptic: bool,
}

fn abs_det(m: &Matrix) -> f64 {
    if m.nrows() == 1 {
        m[(0, 0)].norm()
    } else {
        m.determinant().norm()
    }
}

/// Minimises `|det symbol(ξ)|` over `ℝⁿ`: grid on the ball the ellipticity
/// bound leaves open, then compass-search refinement from the best points.
pub fn sc_invertible(symbol: &ConstantSymbol, search: &ScSearch, exec: Execution) -> Result<ScVerdict> {
    let op = symbol.operator();
    let n = symbol.dimension();
    let floor = symbol_floor(op)?;
    let elliptic = floor > 1e-9;
    let radius = if elliptic {
        domination_radius(op, floor, 0.0, 1.0).max(1.0)
    } else {
        // no bound at infinity: search a fixed box and never answer "yes"
        10.0
    };
    // reduced coordinates (ξ, |η|) when the cross part is isotropic
    let reduced = symbol.is_isotropic() && n >= 2;
    let dims = if reduced { 2 } else { n };
    let g = if search.grid_points > 0 {
        search.grid_points | 1
    } else {
        match dims {
            1 => 4001,
            2 => 301,
            3 => 61,
            4 => 25,
            _ => 11,
        }
    };
    let total = g.checked_pow(dims as u32).filter(|t| *t <= 5_000_000).ok_or_else(|| {
        Error::ResourceLimit(format!("symbol grid of {g}^{dims} points"))
    })?;
    let lower = |d: usize| if reduced && d == 1 { 0.0 } else { -radius };
    let step = |d: usize| (radius - lower(d)) / (g - 1) as f64;
    let embed = |x: &[f64]| -> Vec<f64> {
        if reduced {
            let mut v = vec![0.0; n];
            v[0] = x[0];
            v[1] = x[1];
            v
        } else {
            x.to_vec()
        }
    };
    let value = |x: &[f64]| -> f64 { symbol.eval(&embed(x)).map(|m| abs_det(&m)).unwrap_or(f64::INFINITY) };
    let point = |mut idx: usize| -> Vec<f64> {
        (0..dims)
            .map(|d| {
                let i = idx % g;
                idx /= g;
                lower(d) + step(d) * i as f64
            })
            .collect()
    };
    let values = par::map_range(exec, total, |i| value(&point(i)));
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let starts: Vec<usize> = order.into_iter().take(search.refine_starts.max(1)).collect();
    let refined = par::map(exec, &starts, |&i| {
        let mut x = point(i);
        let mut best = values[i];
        let mut h = (0..dims).map(step).fold(f64::INFINITY, f64::min);
        let mut iters = 0;
        while h > 1e-13 * radius && iters < 2000 {
            iters += 1;
            let mut moved = false;
            for d in 0..dims {
                for sign in [-1.0, 1.0] {
                    let mut y = x.clone();
                    y[d] += sign * h;
                    if reduced && d == 1 && y[d] < 0.0 {
                        y[d] = 0.0;
                    }
                    let v = value(&y);
                    if v < best {
                        best = v;
                        x = y;
                        moved = true;
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        (best, x)
    });
    let (min_abs_det, witness) = refined
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(v, x)| (v, embed(&x)))
        .expect("at least one start");
    let invertible = if min_abs_det <= search.no_threshold {
        Invertibility::No
    } else if min_abs_det >= search.yes_threshold && elliptic {
        Invertibility::Yes
    } else {
        Invertibility::NumericalEvidence
    };
    Ok(ScVerdict {
        invertible,
        min_abs_det,
        witness,
        radius,
        elliptic,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Normal,
    Sc,
    Zero,
    CGamma,
}

impl LimitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitKind::Normal => "normal",
            LimitKind::Sc => "sc",
            LimitKind::Zero => "zero",
            LimitKind::CGamma => "c_gamma",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Root(IndicialRoot),
    Covector(Vec<f64>),
    /// Fourier frequency in `w` of a half-space sample.
    Frequency(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitVerdict {
    pub orbit: String,
    pub kind: LimitKind,
    pub invertible: Invertibility,
    pub witness: Option<Witness>,
    /// Root distance to the line, or the minimum sampled `|det|`/`σ_min`.
    pub margin: f64,
    pub samples: Option<ScanResult>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Fredholm,
    NotFredholm,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Fredholm => "Fredholm",
            Verdict::NotFredholm => "NotFredholm",
            Verdict::Undecided => "Undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FredholmReport {
    pub structure: StructureKind,
    pub cross_section: String,
    pub operator: String,
    pub weight: f64,
    pub compact: bool,
    pub elliptic: EllipticityVerdict,
    pub limit_verdicts: Vec<LimitVerdict>,
    pub roots: Vec<IndicialRoot>,
    pub safe_weights: Vec<(f64, f64)>,
    pub certified_range: Option<(f64, f64)>,
    pub cutoff: Option<CutoffInfo>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl FredholmReport {
    pub fn convention(&self) -> &'static str {
        WEIGHT_CONVENTION
    }

    /// True if any verdict rests on sampling only.
    pub fn numerical_evidence_only(&self) -> bool {
        self.limit_verdicts
            .iter()
            .any(|v| v.invertible == Invertibility::NumericalEvidence)
    }
}

fn combine(elliptic: bool, verdicts: &[LimitVerdict]) -> Verdict {
    if !elliptic || verdicts.iter().any(|v| v.invertible == Invertibility::No) {
        Verdict::NotFredholm
    } else if verdicts.iter().any(|v| v.invertible == Invertibility::NumericalEvidence) {
        Verdict::Undecided
    } else {
        Verdict::Fredholm
    }
}

fn sc_limit_verdict(op: &BoundaryOperator, kind: LimitKind, opts: &CheckOptions) -> Result<LimitVerdict> {
    let symbol = ConstantSymbol::new(op);
    let sc = sc_invertible(&symbol, &opts.sc_search, opts.execution)?;
    let mut notes = Vec::new();
    if !sc.elliptic {
        notes.push("symbol not elliptic: no bound at infinity, search confined to a box".to_string());
    }
    let invertible = if kind == LimitKind::CGamma {
        notes.push(
            "c_gamma limit treated as a constant-coefficient symbol; numerical evidence only".to_string(),
        );
        Invertibility::NumericalEvidence
    } else {
        sc.invertible
    };
    Ok(LimitVerdict {
        orbit: "point y=0".to_string(),
        kind,
        invertible,
        witness: Some(Witness::Covector(sc.witness)),
        margin: sc.min_abs_det,
        samples: None,
        notes,
    })
}

/// Runs the full decision for `op` at weight `opts.weight`.
pub fn fredholm_check(op: &BoundaryOperator, opts: &CheckOptions) -> Result<FredholmReport> {
    if !opts.weight.is_finite() {
        return Err(Error::InvalidParameter(format!("weight {} is not finite", opts.weight)));
    }
    let elliptic = is_elliptic(op, &opts.sampling)?;
    let mut report = FredholmReport {
        structure: op.kind(),
        cross_section: op.cross_section().to_string(),
        operator: op.to_string(),
        weight: opts.weight,
        compact: opts.compact,
        elliptic: elliptic.clone(),
        limit_verdicts: Vec::new(),
        roots: Vec::new(),
        safe_weights: Vec::new(),
        certified_range: None,
        cutoff: None,
        verdict: Verdict::Undecided,
        notes: vec!["verdicts are taken to be independent of the Sobolev order s".to_string()],
    };
    if opts.compact {
        report.notes.push("closed manifold: Fredholm exactly when elliptic".to_string());
        report.verdict = if elliptic.elliptic { Verdict::Fredholm } else { Verdict::NotFredholm };
        return Ok(report);
    }
    if op.symbolic_only() {
        report.notes.push("frame-level example: limit operators are not analysed".to_string());
        report.verdict = if elliptic.elliptic { Verdict::Undecided } else { Verdict::NotFredholm };
        return Ok(report);
    }
    if !elliptic.elliptic {
        report.notes.push("principal symbol degenerates: limit operators not analysed".to_string());
        report.verdict = Verdict::NotFredholm;
        return Ok(report);
    }
    match op.kind() {
        StructureKind::B => {
            let analysis = analyze_roots(op, opts)?;
            let w = analysis.cutoff.certified_half_width.unwrap_or(-1.0);
            if opts.weight.abs() > w {
                return Err(Error::CutoffTooSmall {
                    cutoff: analysis.cutoff.used,
                    certified: w.max(0.0),
                    lo: opts.weight,
                    hi: opts.weight,
                });
            }
            let line = normal_invertible(&analysis.roots, opts.weight);
            let mut notes = Vec::new();
            if line.invertible == Invertibility::NumericalEvidence {
                notes.push(format!(
                    "root within {BORDERLINE_TOL:e} of the line: borderline, not decided"
                ));
            }
            report.limit_verdicts.push(LimitVerdict {
                orbit: "boundary component".to_string(),
                kind: LimitKind::Normal,
                invertible: line.invertible,
                witness: line.witness.map(Witness::Root),
                margin: line.distance,
                samples: None,
                notes,
            });
            report.certified_range = analysis.certified_range();
            if let Some((lo, hi)) = report.certified_range {
                report.safe_weights = safe_weight_intervals(&analysis.roots, lo, hi);
            }
            report.roots = analysis.roots;
            report.cutoff = Some(analysis.cutoff);
        }
        StructureKind::Sc => {
            report.notes.push("weight does not enter the sc symbol test".to_string());
            report.limit_verdicts.push(sc_limit_verdict(op, LimitKind::Sc, opts)?);
        }
        StructureKind::CGamma(_) => {
            report.notes.push("weight does not enter the c_gamma symbol test".to_string());
            report.limit_verdicts.push(sc_limit_verdict(op, LimitKind::CGamma, opts)?);
        }
        StructureKind::Zero => {
            let hs = HalfSpaceOperator::new(op);
            let scan = half_space_sample(&hs, &opts.half_space, opts.execution)?;
            let mut notes = vec!["numerical evidence only: half-space model sampled on truncated grids".to_string()];
            if let [.., a, b] = scan.ladder.as_slice() {
                if b.global_min < 0.5 * a.global_min {
                    notes.push("minimum singular value decays as the truncation grows".to_string());
                } else {
                    notes.push("minimum singular value stable under truncation".to_string());
                }
            }
            report.limit_verdicts.push(LimitVerdict {
                orbit: "point y=0".to_string(),
                kind: LimitKind::Zero,
                invertible: Invertibility::NumericalEvidence,
                witness: Some(Witness::Frequency(scan.argmin)),
                margin: scan.global_min,
                samples: Some(scan),
                notes,
            });
        }
    }
    report.verdict = combine(true, &report.limit_verdicts);
    Ok(report)
}

/// The modes a root analysis ran on, for reporting.
pub fn mode_list(analysis: &RootAnalysis) -> Vec<Mode> {
    analysis.family.modes.iter().map(|m| m.mode.clone()).collect()
}

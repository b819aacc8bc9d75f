//! Differential operators generated by a Lie structure's frame.
//!
//! An operator is a finite sum of terms
//!
//! ```text
//!     a_α(r) · Y^{α'} · L_f^{j} · X^{α₁}
//! ```
//!
//! where `X = r^p ∂_r` is the radial frame field, `Y_j = r^q ∂_{y_j}` are the
//! cross-section frame fields (only on circles and tori, where the `y_j` are
//! global coordinates), `L_f = r^{2q} L` is the frame-scaled cross-section
//! Laplacian, and `a_α(r) = Σ r^ν A_ν` with `k × k` matrices `A_ν` and real
//! `ν ≥ 0`. Cross factors are written to the left of the radial power; for the
//! `b` structure (`q = 0`) the order is immaterial.
//!
//! `L` is the nonnegative Laplacian of the cross-section. The sphere's
//! analyst Laplacian `Δ_{S^{n-1}}` therefore appears as `-L`.

mod apply;
mod kondratiev;
mod models;

use std::collections::BTreeMap;
use std::fmt;

pub use apply::{apply, cross_symbol, mode_basis, GridKind, RadialGrid};
pub use kondratiev::{kondratiev_transform, CylinderOperator};
pub use models::{cgamma_rewrite, make_model, Model};

use crate::crosssec::CrossSection;
use crate::error::{Error, Result};
use crate::liestruct::{LieStructure, StructureKind};
use crate::par::{self, Execution};
use crate::poly::{binomial, c, i_pow, Matrix, C64};

const EXP_TOL: f64 = 1e-12;
const PRUNE_TOL: f64 = 1e-13;

/// Derivative counts of one frame monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub radial: u32,
    /// Explicit partials along the circle/torus coordinates.
    pub cross: Vec<u32>,
    /// Power of the cross-section Laplacian.
    pub laplacian: u32,
}

impl MultiIndex {
    pub fn new(radial: u32, cross: Vec<u32>, laplacian: u32) -> Self {
        MultiIndex {
            radial,
            cross,
            laplacian,
        }
    }

    pub fn radial(radial: u32, partial_dims: usize) -> Self {
        MultiIndex::new(radial, vec![0; partial_dims], 0)
    }

    pub fn laplacian_power(j: u32, partial_dims: usize) -> Self {
        MultiIndex::new(0, vec![0; partial_dims], j)
    }

    /// Number of cross-section derivatives, counting `L` twice.
    pub fn cross_order(&self) -> u32 {
        self.cross.iter().sum::<u32>() + 2 * self.laplacian
    }

    pub fn order(&self) -> u32 {
        self.radial + self.cross_order()
    }
}

/// `r^exponent · value`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefTerm {
    pub exponent: f64,
    pub value: Matrix,
}

/// `Σ r^ν A_ν`, exponents distinct and sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficient {
    dim: usize,
    terms: Vec<CoefTerm>,
}

fn is_negligible(m: &Matrix) -> bool {
    m.iter().all(|x| x.norm() <= PRUNE_TOL)
}

impl Coefficient {
    pub fn zero(dim: usize) -> Self {
        Coefficient {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(dim: usize, raw: Vec<(f64, Matrix)>) -> Result<Self> {
        let mut raw = raw;
        for (nu, m) in &raw {
            if !(*nu >= -EXP_TOL) || !nu.is_finite() {
                return Err(Error::NotRepresentable(format!("coefficient exponent {nu}")));
            }
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidParameter(format!(
                    "coefficient value is {}x{}, system size is {dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut terms: Vec<CoefTerm> = Vec::with_capacity(raw.len());
        for (nu, m) in raw {
            match terms.last_mut() {
                Some(last) if (last.exponent - nu).abs() <= EXP_TOL => last.value += m,
                _ => terms.push(CoefTerm {
                    exponent: nu.max(0.0),
                    value: m,
                }),
            }
        }
        terms.retain(|t| !is_negligible(&t.value));
        Ok(Coefficient { dim, terms })
    }

    /// Scalar `v · r^exponent`.
    pub fn scalar(exponent: f64, v: C64) -> Result<Self> {
        Coefficient::from_terms(1, vec![(exponent, Matrix::from_element(1, 1, v))])
    }

    pub fn constant(value: Matrix) -> Self {
        let dim = value.nrows();
        Coefficient::from_terms(dim, vec![(0.0, value)]).expect("square constant coefficient")
    }

    pub fn identity(dim: usize) -> Self {
        Coefficient::constant(Matrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[CoefTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Coefficient) -> Coefficient {
        let raw = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|t| (t.exponent, t.value.clone()))
            .collect();
        Coefficient::from_terms(self.dim, raw).expect("compatible coefficients")
    }

    /// Product with `self` on the left.
    pub fn mul(&self, other: &Coefficient) -> Coefficient {
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                raw.push((a.exponent + b.exponent, &a.value * &b.value));
            }
        }
        Coefficient::from_terms(self.dim, raw).expect("compatible coefficients")
    }

    pub fn scale(&self, s: C64) -> Coefficient {
        Coefficient {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| CoefTerm {
                    exponent: t.exponent,
                    value: &t.value * s,
                })
                .filter(|t| !is_negligible(&t.value))
                .collect(),
        }
    }

    /// Multiplies by `r^shift`.
    pub fn shift_exponent(&self, shift: f64) -> Result<Coefficient> {
        Coefficient::from_terms(
            self.dim,
            self.terms
                .iter()
                .map(|t| (t.exponent + shift, t.value.clone()))
                .collect(),
        )
    }

    /// `a(0)`: the `ν = 0` part.
    pub fn at_zero(&self) -> Matrix {
        self.terms
            .iter()
            .filter(|t| t.exponent.abs() <= EXP_TOL)
            .fold(Matrix::zeros(self.dim, self.dim), |acc, t| acc + &t.value)
    }

    pub fn frozen(&self) -> Coefficient {
        Coefficient {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|t| t.exponent.abs() <= EXP_TOL)
                .cloned()
                .collect(),
        }
    }

    pub fn eval(&self, r: f64) -> Matrix {
        self.terms.iter().fold(Matrix::zeros(self.dim, self.dim), |acc, t| {
            let w = if t.exponent == 0.0 { 1.0 } else { r.powf(t.exponent) };
            acc + &t.value * c(w)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.value.iter())
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Coefficient, tol: f64) -> bool {
        let diff = self.add(&other.scale(c(-1.0)));
        diff.terms
            .iter()
            .all(|t| t.value.iter().all(|x| x.norm() <= tol))
    }
}

/// An operator on the collar of a Lie structure.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryOperator {
    structure: LieStructure,
    cross_section: CrossSection,
    system_size: usize,
    terms: BTreeMap<MultiIndex, Coefficient>,
    symbolic_only: bool,
}

/// Term in coordinate normal form `r^μ A X^a ∂^β L^j`.
#[derive(Clone, Debug)]
struct CoordTerm {
    mu: f64,
    value: Matrix,
    radial: u32,
    cross: Vec<u32>,
    laplacian: u32,
}

impl BoundaryOperator {
    /// The zero operator.
    pub fn new(kind: StructureKind, cross_section: CrossSection, system_size: usize) -> Result<Self> {
        if system_size == 0 {
            return Err(Error::InvalidParameter("system size must be positive".into()));
        }
        let structure = LieStructure::new(kind, 1 + cross_section.dimension())?;
        Ok(BoundaryOperator {
            structure,
            cross_section,
            system_size,
            terms: BTreeMap::new(),
            symbolic_only: false,
        })
    }

    pub fn identity(kind: StructureKind, cross_section: CrossSection, system_size: usize) -> Result<Self> {
        let mut op = BoundaryOperator::new(kind, cross_section, system_size)?;
        let pd = op.cross_section.partial_dims();
        op.add_term(MultiIndex::radial(0, pd), Coefficient::identity(system_size))?;
        Ok(op)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, coeff: Coefficient) -> Result<()> {
        if alpha.cross.len() != self.cross_section.partial_dims() {
            return Err(Error::InvalidParameter(format!(
                "multi-index has {} cross entries, {} allows {} explicit partials",
                alpha.cross.len(),
                self.cross_section,
                self.cross_section.partial_dims()
            )));
        }
        if coeff.dim() != self.system_size {
            return Err(Error::InvalidParameter(format!(
                "coefficient of size {} in a system of size {}",
                coeff.dim(),
                self.system_size
            )));
        }
        let entry = self
            .terms
            .entry(alpha.clone())
            .or_insert_with(|| Coefficient::zero(coeff.dim()));
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&alpha);
        }
        Ok(())
    }

    /// Adds the scalar term `v · r^exponent · (monomial)` times the identity.
    pub fn add_scalar(&mut self, alpha: MultiIndex, exponent: f64, v: C64) -> Result<()> {
        let k = self.system_size;
        let coeff = Coefficient::from_terms(k, vec![(exponent, Matrix::identity(k, k) * v)])?;
        self.add_term(alpha, coeff)
    }

    pub fn with_scalar(mut self, alpha: MultiIndex, exponent: f64, v: f64) -> Result<Self> {
        self.add_scalar(alpha, exponent, c(v))?;
        Ok(self)
    }

    pub fn structure(&self) -> &LieStructure {
        &self.structure
    }

    pub fn kind(&self) -> StructureKind {
        self.structure.kind()
    }

    pub fn cross_section(&self) -> &CrossSection {
        &self.cross_section
    }

    pub fn system_size(&self) -> usize {
        self.system_size
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Coefficient> {
        &self.terms
    }

    pub fn symbolic_only(&self) -> bool {
        self.symbolic_only
    }

    pub fn set_symbolic_only(&mut self, flag: bool) {
        self.symbolic_only = flag;
    }

    /// True order: the largest `|α|` with a nonzero coefficient.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(Coefficient::max_abs).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &BoundaryOperator) -> Result<()> {
        if self.structure != other.structure {
            return Err(Error::StructureMismatch(format!(
                "{} vs {}",
                self.kind().name(),
                other.kind().name()
            )));
        }
        if self.cross_section != other.cross_section {
            return Err(Error::StructureMismatch(format!(
                "cross-sections {} vs {}",
                self.cross_section, other.cross_section
            )));
        }
        if self.system_size != other.system_size {
            return Err(Error::StructureMismatch(format!(
                "system sizes {} vs {}",
                self.system_size, other.system_size
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &BoundaryOperator) -> Result<BoundaryOperator> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (alpha, coeff) in &other.terms {
            out.add_term(alpha.clone(), coeff.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> BoundaryOperator {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(a, cf)| (a.clone(), cf.scale(s)))
            .filter(|(_, cf)| !cf.is_zero())
            .collect();
        out
    }

    pub fn approx_eq(&self, other: &BoundaryOperator, tol: f64) -> bool {
        if self.check_compatible(other).is_err() {
            return false;
        }
        let keys: std::collections::BTreeSet<&MultiIndex> =
            self.terms.keys().chain(other.terms.keys()).collect();
        let zero = Coefficient::zero(self.system_size);
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            a.approx_eq(b, tol)
        })
    }

    fn coordinate_terms(&self) -> Vec<CoordTerm> {
        let q = self.structure.cross_exponent();
        let mut out = Vec::new();
        for (alpha, coeff) in &self.terms {
            let shift = q * f64::from(alpha.cross_order());
            for t in coeff.terms() {
                out.push(CoordTerm {
                    mu: t.exponent + shift,
                    value: t.value.clone(),
                    radial: alpha.radial,
                    cross: alpha.cross.clone(),
                    laplacian: alpha.laplacian,
                });
            }
        }
        out
    }

    fn from_coordinate_terms(&self, terms: Vec<CoordTerm>) -> Result<BoundaryOperator> {
        let q = self.structure.cross_exponent();
        let mut grouped: BTreeMap<MultiIndex, Vec<(f64, Matrix)>> = BTreeMap::new();
        for t in terms {
            let alpha = MultiIndex::new(t.radial, t.cross, t.laplacian);
            let nu = t.mu - q * f64::from(alpha.cross_order());
            if nu < -EXP_TOL {
                return Err(Error::NotRepresentable(format!(
                    "term r^{} at multi-index {alpha:?} leaves the frame module",
                    t.mu
                )));
            }
            grouped.entry(alpha).or_default().push((nu.max(0.0), t.value));
        }
        let mut out = BoundaryOperator {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (alpha, raw) in grouped {
            let coeff = Coefficient::from_terms(self.system_size, raw)?;
            if !coeff.is_zero() {
                out.terms.insert(alpha, coeff);
            }
        }
        Ok(out)
    }

    /// Operator product `self ∘ other`, exact up to floating point.
    pub fn compose(&self, other: &BoundaryOperator) -> Result<BoundaryOperator> {
        self.check_compatible(other)?;
        let p = self.structure.radial_exponent();
        let left = self.coordinate_terms();
        let right = other.coordinate_terms();
        let mut out = Vec::new();
        for a in &left {
            for b in &right {
                let ab = &a.value * &b.value;
                for (coef, exp, pow) in radial_commute(a.radial, b.mu, p) {
                    out.push(CoordTerm {
                        mu: a.mu + exp,
                        value: &ab * c(coef),
                        radial: pow + b.radial,
                        cross: a.cross.iter().zip(&b.cross).map(|(x, y)| x + y).collect(),
                        laplacian: a.laplacian + b.laplacian,
                    });
                }
            }
        }
        let mut result = self.from_coordinate_terms(out)?;
        result.symbolic_only = self.symbolic_only || other.symbolic_only;
        Ok(result)
    }

    /// `r^{-δ} P r^{δ}` for the `b` structure: `r∂_r ↦ r∂_r + δ`.
    pub fn conjugate(&self, delta: f64) -> Result<BoundaryOperator> {
        if self.kind() != StructureKind::B {
            return Err(Error::StructureMismatch(format!(
                "weight conjugation is implemented for b operators, got {}",
                self.kind().name()
            )));
        }
        let mut out = BoundaryOperator {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (alpha, coeff) in &self.terms {
            let a = alpha.radial;
            for i in 0..=a {
                let w = binomial(a, i) * delta.powi((a - i) as i32);
                if w == 0.0 {
                    continue;
                }
                let beta = MultiIndex::new(i, alpha.cross.clone(), alpha.laplacian);
                out.add_term(beta, coeff.scale(c(w)))?;
            }
        }
        Ok(out)
    }

    /// Principal symbol at `r` on the covector `(ξ, η)` dual to the frame.
    /// `L` contributes `|η|²`, each `Y_j` contributes `i η_j`.
    pub fn principal_symbol(&self, r: f64, xi: f64, eta: &[f64]) -> Result<Matrix> {
        self.symbol_of_order(Some(self.order()), r, xi, eta)
    }

    /// Full frame symbol (all orders) at `r`.
    pub fn full_symbol(&self, r: f64, xi: f64, eta: &[f64]) -> Result<Matrix> {
        self.symbol_of_order(None, r, xi, eta)
    }

    fn symbol_of_order(&self, order: Option<u32>, r: f64, xi: f64, eta: &[f64]) -> Result<Matrix> {
        if eta.len() != self.cross_section.dimension() {
            return Err(Error::InvalidParameter(format!(
                "cross covector has {} entries, {} has dimension {}",
                eta.len(),
                self.cross_section,
                self.cross_section.dimension()
            )));
        }
        let k = self.system_size;
        let eta2: f64 = eta.iter().map(|x| x * x).sum();
        let mut acc = Matrix::zeros(k, k);
        for (alpha, coeff) in &self.terms {
            if order.is_some_and(|m| alpha.order() != m) {
                continue;
            }
            let mut s = (C64::new(0.0, xi)).powu(alpha.radial) * eta2.powi(alpha.laplacian as i32);
            for (j, &b) in alpha.cross.iter().enumerate() {
                s *= i_pow(b) * eta[j].powi(b as i32);
            }
            let value = if r == 0.0 { coeff.at_zero() } else { coeff.eval(r) };
            acc += value * s;
        }
        Ok(acc)
    }

    /// Drops every coefficient term with `ν > 0`.
    pub fn frozen(&self) -> BoundaryOperator {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(a, cf)| (a.clone(), cf.frozen()))
            .filter(|(_, cf)| !cf.is_zero())
            .collect();
        out
    }

    /// True if some explicit partial forces resolution into Fourier modes.
    pub fn needs_fourier_modes(&self) -> bool {
        match self.cross_section {
            CrossSection::Circle => self.terms.keys().any(|a| a.cross.iter().any(|b| b % 2 == 1)),
            CrossSection::Torus { .. } => self.terms.keys().any(|a| a.cross.iter().any(|&b| b > 0)),
            _ => false,
        }
    }

    /// True if the cross-section enters only through `|η|` (no explicit partials).
    pub fn is_cross_isotropic(&self) -> bool {
        self.terms.keys().all(|a| a.cross.iter().all(|&b| b == 0))
    }
}

/// `X^a ∘ r^κ` with `X = r^p ∂_r`, as a list of `(coef, exponent, X-power)`.
fn radial_commute(a: u32, kappa: f64, p: f64) -> Vec<(f64, f64, u32)> {
    let mut terms: Vec<(f64, f64, u32)> = vec![(1.0, kappa, 0)];
    for _ in 0..a {
        let mut next: Vec<(f64, f64, u32)> = Vec::with_capacity(2 * terms.len());
        for &(cf, e, j) in &terms {
            next.push((cf, e, j + 1));
            if e != 0.0 {
                next.push((cf * e, e + p - 1.0, j));
            }
        }
        next.sort_by(|x, y| x.2.cmp(&y.2).then(x.1.total_cmp(&y.1)));
        terms.clear();
        for t in next {
            match terms.last_mut() {
                Some(last) if last.2 == t.2 && (last.1 - t.1).abs() <= EXP_TOL => last.0 += t.0,
                _ => terms.push(t),
            }
        }
    }
    terms.retain(|t| t.0 != 0.0);
    terms
}

/// Sampling plan for the ellipticity test.
#[derive(Clone, Debug)]
pub struct EllipticitySampling {
    pub collar_width: f64,
    pub r_samples: usize,
    pub threshold: f64,
    pub execution: Execution,
}

impl Default for EllipticitySampling {
    fn default() -> Self {
        EllipticitySampling {
            collar_width: 1.0,
            r_samples: 9,
            threshold: 1e-6,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPoint {
    pub r: f64,
    pub xi: f64,
    pub eta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticityVerdict {
    pub elliptic: bool,
    pub min_abs_det: f64,
    pub witness: SymbolPoint,
    pub threshold: f64,
}

/// Unit covectors `(ξ, η)` covering the cosphere. When the operator sees
/// the cross-section only through `|η|`, a half circle in `(ξ, |η|)` is
/// enough.
pub(crate) fn unit_covectors(op: &BoundaryOperator) -> Vec<(f64, Vec<f64>)> {
    let dim = op.cross_section().dimension();
    if dim == 0 {
        return vec![(1.0, vec![]), (-1.0, vec![])];
    }
    if op.is_cross_isotropic() {
        let n = 720;
        return (0..=n)
            .map(|i| {
                let th = std::f64::consts::PI * i as f64 / n as f64;
                let mut eta = vec![0.0; dim];
                eta[0] = th.sin();
                (th.cos(), eta)
            })
            .collect();
    }
    let total = dim + 1;
    let g: i64 = match total {
        2 => 81,
        3 => 21,
        4 => 11,
        _ => 7,
    };
    let half = (g - 1) / 2;
    let mut out = Vec::new();
    let mut idx = vec![-half; total];
    loop {
        if idx.iter().any(|x| x.abs() == half) {
            let v: Vec<f64> = idx.iter().map(|&x| x as f64 / half as f64).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push((v[0] / n, v[1..].iter().map(|x| x / n).collect()));
        }
        let mut j = 0;
        loop {
            if j == total {
                return out;
            }
            idx[j] += 1;
            if idx[j] > half {
                idx[j] = -half;
                j += 1;
            } else {
                break;
            }
        }
    }
}

fn abs_det(m: &Matrix) -> f64 {
    if m.nrows() == 1 {
        m[(0, 0)].norm()
    } else {
        m.determinant().norm()
    }
}

/// Samples `|det σ(P)|` over `r ∈ [0, ε]` and the unit cosphere.
pub fn is_elliptic(op: &BoundaryOperator, sampling: &EllipticitySampling) -> Result<EllipticityVerdict> {
    if sampling.r_samples == 0 {
        return Err(Error::Grid("ellipticity sampling needs at least one r sample".into()));
    }
    let rs: Vec<f64> = if sampling.r_samples == 1 {
        vec![0.0]
    } else {
        (0..sampling.r_samples)
            .map(|i| sampling.collar_width * i as f64 / (sampling.r_samples - 1) as f64)
            .collect()
    };
    let covectors = unit_covectors(op);
    let points: Vec<(f64, usize)> = rs
        .iter()
        .flat_map(|&r| (0..covectors.len()).map(move |i| (r, i)))
        .collect();
    let values = par::map(sampling.execution, &points, |&(r, i)| {
        let (xi, eta) = &covectors[i];
        op.principal_symbol(r, *xi, eta).map(|m| abs_det(&m))
    });
    let mut best = (f64::INFINITY, 0usize);
    for (n, v) in values.into_iter().enumerate() {
        let v = v?;
        if v < best.0 {
            best = (v, n);
        }
    }
    let (r, i) = points[best.1];
    Ok(EllipticityVerdict {
        elliptic: best.0 >= sampling.threshold,
        min_abs_det: best.0,
        witness: SymbolPoint {
            r,
            xi: covectors[i].0,
            eta: covectors[i].1.clone(),
        },
        threshold: sampling.threshold,
    })
}

fn fmt_coefficient(cf: &Coefficient) -> String {
    let parts: Vec<String> = cf
        .terms()
        .iter()
        .map(|t| {
            let v = if t.value.nrows() == 1 {
                fmt_complex(t.value[(0, 0)])
            } else {
                format!("M{}x{}", t.value.nrows(), t.value.ncols())
            };
            if t.exponent == 0.0 {
                v
            } else {
                format!("{v}·r^{}", t.exponent)
            }
        })
        .collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(" + "))
    }
}

pub(crate) fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        format!("({}{:+}i)", z.re, z.im)
    }
}

pub(crate) fn fmt_monomial(alpha: &MultiIndex, radial: &str, cross: &dyn Fn(usize) -> String) -> String {
    let mut parts = Vec::new();
    for (j, &b) in alpha.cross.iter().enumerate() {
        match b {
            0 => {}
            1 => parts.push(cross(j)),
            b => parts.push(format!("{}^{b}", cross(j))),
        }
    }
    match alpha.laplacian {
        0 => {}
        1 => parts.push("L".to_string()),
        j => parts.push(format!("L^{j}")),
    }
    match alpha.radial {
        0 => {}
        1 => parts.push(radial.to_string()),
        a => parts.push(format!("{radial}^{a}")),
    }
    parts.join("·")
}

impl fmt::Display for BoundaryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = self.structure.radial_exponent();
        let q = self.structure.cross_exponent();
        let radial = if p == 1.0 {
            "(r∂_r)".to_string()
        } else {
            format!("(r^{p}∂_r)")
        };
        let circle = matches!(self.cross_section, CrossSection::Circle);
        let cross = move |j: usize| {
            let d = if circle { "∂_θ".to_string() } else { format!("∂_y{}", j + 1) };
            if q == 0.0 {
                d
            } else if q == 1.0 {
                format!("(r{d})")
            } else {
                format!("(r^{q}{d})")
            }
        };
        let mut first = true;
        for (alpha, coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = fmt_monomial(alpha, &radial, &cross);
            let cf = fmt_coefficient(coeff);
            if mono.is_empty() {
                write!(f, "{cf}")?;
            } else if cf == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{cf}·{mono}")?;
            }
        }
        Ok(())
    }
}

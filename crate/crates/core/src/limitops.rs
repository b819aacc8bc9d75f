//! Limit operators: the invariant models an operator reduces to at the
//! boundary.
//!
//! * `b`: the normal operator, translation invariant on `ℝ_t × cross-section`,
//!   analysed mode by mode through its indicial family `P̂(τ)`.
//! * `sc` (and the frozen `c_γ` frame): a constant-coefficient operator on
//!   `ℝⁿ`, analysed through its full symbol.
//! * `0`: a frozen operator on the half-space group in the frame
//!   `{s∂_s, s∂_w}`, only sampled numerically.

use crate::crosssec::Mode;
use crate::error::{Error, Result};
use crate::liestruct::StructureKind;
use crate::opalg::{cross_symbol, mode_basis, BoundaryOperator};
use crate::par::{self, Execution};
use crate::poly::{i_pow, Matrix, MatrixPoly, C64};

/// The operator with every `ν > 0` coefficient term removed.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalOperator {
    base: BoundaryOperator,
}

pub fn normal_operator(op: &BoundaryOperator) -> Result<NormalOperator> {
    match op.kind() {
        StructureKind::B | StructureKind::CGamma(_) => Ok(NormalOperator { base: op.frozen() }),
        k => Err(Error::StructureMismatch(format!(
            "normal operators are defined for b and c_gamma structures, got {}",
            k.name()
        ))),
    }
}

impl NormalOperator {
    pub fn base(&self) -> &BoundaryOperator {
        &self.base
    }

    /// Always true: the coefficients no longer depend on `r`.
    pub fn is_translation_invariant(&self) -> bool {
        self.base
            .terms()
            .values()
            .all(|cf| cf.terms().iter().all(|t| t.exponent == 0.0))
    }
}

/// Indicial polynomial of one mode, in the Fourier variable `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeFamily {
    pub mode: Mode,
    pub poly: MatrixPoly,
}

impl ModeFamily {
    /// The same polynomial in the Mellin variable `z = iτ`.
    pub fn mellin(&self) -> MatrixPoly {
        // τ = -i z
        self.poly.rescale_variable(C64::new(0.0, -1.0))
    }
}

/// `P̂(τ)` restricted to each cross-section mode below the cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicialFamily {
    pub modes: Vec<ModeFamily>,
    pub cutoff: f64,
    pub system_size: usize,
}

/// Substitutes `r∂_r → iτ` and lets the cross part act on each mode.
pub fn indicial_family(normal: &NormalOperator, cutoff: f64, exec: Execution) -> Result<IndicialFamily> {
    let modes = mode_basis(&normal.base, cutoff)?;
    indicial_family_on(normal, &modes, cutoff, exec)
}

pub fn indicial_family_on(
    normal: &NormalOperator,
    modes: &[Mode],
    cutoff: f64,
    exec: Execution,
) -> Result<IndicialFamily> {
    let op = &normal.base;
    let k = op.system_size();
    let families = par::map(exec, modes, |mode| -> Result<ModeFamily> {
        let mut poly = MatrixPoly::zero(k);
        for (alpha, coeff) in op.terms() {
            let s = cross_symbol(alpha, mode, op.cross_section())? * i_pow(alpha.radial);
            poly.add_term(alpha.radial as usize, &(coeff.at_zero() * s));
        }
        Ok(ModeFamily {
            mode: mode.clone(),
            poly,
        })
    });
    Ok(IndicialFamily {
        modes: families.into_iter().collect::<Result<_>>()?,
        cutoff,
        system_size: k,
    })
}

impl IndicialFamily {
    /// `P̂(τ)` on mode index `m`.
    pub fn eval(&self, m: usize, tau: C64) -> Matrix {
        self.modes[m].poly.eval(tau)
    }

    /// `τ ↦ P̂(τ + s)` on every mode.
    pub fn shifted(&self, s: C64) -> IndicialFamily {
        IndicialFamily {
            modes: self
                .modes
                .iter()
                .map(|f| ModeFamily {
                    mode: f.mode.clone(),
                    poly: f.poly.shift(s),
                })
                .collect(),
            ..self.clone()
        }
    }

    pub fn approx_eq(&self, other: &IndicialFamily, tol: f64) -> bool {
        self.modes.len() == other.modes.len()
            && self
                .modes
                .iter()
                .zip(&other.modes)
                .all(|(a, b)| a.mode == b.mode && a.poly.approx_eq(&b.poly, tol))
    }
}

/// Constant-coefficient operator on `ℝⁿ`, given by its full symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSymbol {
    frozen: BoundaryOperator,
}

impl ConstantSymbol {
    pub fn new(op: &BoundaryOperator) -> Self {
        ConstantSymbol { frozen: op.frozen() }
    }

    pub fn operator(&self) -> &BoundaryOperator {
        &self.frozen
    }

    /// Number of variables `n = 1 + dim(cross-section)`.
    pub fn dimension(&self) -> usize {
        1 + self.frozen.cross_section().dimension()
    }

    /// True if the symbol depends on `η` only through `|η|`.
    pub fn is_isotropic(&self) -> bool {
        self.frozen.is_cross_isotropic()
    }

    pub fn order(&self) -> u32 {
        self.frozen.order()
    }

    pub fn system_size(&self) -> usize {
        self.frozen.system_size()
    }

    /// Full symbol at `ξ = (ξ_radial, η)`.
    pub fn eval(&self, xi: &[f64]) -> Result<Matrix> {
        if xi.len() != self.dimension() {
            return Err(Error::InvalidParameter(format!(
                "covector has {} entries, symbol lives on R^{}",
                xi.len(),
                self.dimension()
            )));
        }
        self.frozen.full_symbol(0.0, xi[0], &xi[1..])
    }

    /// Principal part at `ξ`.
    pub fn principal(&self, xi: &[f64]) -> Result<Matrix> {
        self.frozen.principal_symbol(0.0, xi[0], &xi[1..])
    }
}

/// Frozen operator on the half-space model `{s > 0} × ℝ^{n-1}_w`, in the
/// frame `{s∂_s, s∂_w}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpaceOperator {
    frozen: BoundaryOperator,
}

impl HalfSpaceOperator {
    pub fn new(op: &BoundaryOperator) -> Self {
        HalfSpaceOperator { frozen: op.frozen() }
    }

    pub fn operator(&self) -> &BoundaryOperator {
        &self.frozen
    }

    /// Terms `(A, a, c)` meaning `A · e^{c t} · ∂_t^a` after Fourier
    /// transform in `w` at frequency `kw` and `s = e^t`.
    pub fn fourier_terms(&self, kw: &[f64]) -> Result<Vec<(Matrix, u32, u32)>> {
        let op = &self.frozen;
        let eta2: f64 = kw.iter().map(|x| x * x).sum();
        let mut out = Vec::new();
        for (alpha, coeff) in op.terms() {
            let mut s = C64::new(eta2.powi(alpha.laplacian as i32), 0.0);
            for (j, &b) in alpha.cross.iter().enumerate() {
                let k = kw.get(j).copied().ok_or_else(|| {
                    Error::InvalidParameter("half-space frequency has too few entries".into())
                })?;
                s *= i_pow(b) * k.powi(b as i32);
            }
            out.push((coeff.at_zero() * s, alpha.radial, alpha.cross_order()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LimitOperator {
    Normal { orbit: String, normal: NormalOperator },
    Sc { orbit: String, symbol: ConstantSymbol },
    Zero { orbit: String, half_space: HalfSpaceOperator },
    CGamma { orbit: String, symbol: ConstantSymbol, warning: String },
}

impl LimitOperator {
    pub fn orbit(&self) -> &str {
        match self {
            LimitOperator::Normal { orbit, .. }
            | LimitOperator::Sc { orbit, .. }
            | LimitOperator::Zero { orbit, .. }
            | LimitOperator::CGamma { orbit, .. } => orbit,
        }
    }
}

/// The limit operator at a boundary point `y` (ignored for `b`, whose orbit
/// is the whole boundary component).
pub fn limit_operator(op: &BoundaryOperator, point: Option<&[f64]>) -> Result<LimitOperator> {
    let dim = op.cross_section().dimension();
    let label = || -> Result<String> {
        match point {
            None => Ok("y=0".to_string()),
            Some(y) if y.len() == dim => {
                let parts: Vec<String> = y.iter().map(|v| v.to_string()).collect();
                Ok(format!("y=({})", parts.join(",")))
            }
            Some(y) => Err(Error::InvalidParameter(format!(
                "boundary point has {} coordinates, cross-section has dimension {dim}",
                y.len()
            ))),
        }
    };
    Ok(match op.kind() {
        StructureKind::B => LimitOperator::Normal {
            orbit: "boundary component".to_string(),
            normal: normal_operator(op)?,
        },
        StructureKind::Sc => LimitOperator::Sc {
            orbit: format!("point {}", label()?),
            symbol: ConstantSymbol::new(op),
        },
        StructureKind::Zero => LimitOperator::Zero {
            orbit: format!("point {}", label()?),
            half_space: HalfSpaceOperator::new(op),
        },
        StructureKind::CGamma(g) => LimitOperator::CGamma {
            orbit: format!("point {}", label()?),
            symbol: ConstantSymbol::new(op),
            warning: format!(
                "c_gamma (gamma = {g}) limit treated as a constant-coefficient symbol; \
                 the invertibility theory for this calculus is not established here"
            ),
        },
    })
}

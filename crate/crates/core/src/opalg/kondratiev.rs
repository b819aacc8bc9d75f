//! The substitution `t = log r` for `b` operators.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array3;

use super::{cross_symbol, fmt_monomial, BoundaryOperator, Coefficient, MultiIndex, RadialGrid};
use crate::crosssec::{CrossSection, Mode};
use crate::error::{Error, Result};
use crate::liestruct::StructureKind;
use crate::par::{self, Execution};
use crate::poly::C64;

/// `Σ a_α(e^t) ∂_t^{α₁} ∂_y^{α'} L^j` on `ℝ_t × cross-section`.
/// Coefficient exponents now mean `e^{νt}`; every such term tends to zero
/// as `t → -∞`, leaving the `ν = 0` part as the limit.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderOperator {
    pub cross_section: CrossSection,
    pub system_size: usize,
    pub terms: BTreeMap<MultiIndex, Coefficient>,
}

pub fn kondratiev_transform(op: &BoundaryOperator) -> Result<CylinderOperator> {
    if op.kind() != StructureKind::B {
        return Err(Error::StructureMismatch(format!(
            "the log substitution applies to b operators, got {}",
            op.kind().name()
        )));
    }
    Ok(CylinderOperator {
        cross_section: op.cross_section().clone(),
        system_size: op.system_size(),
        terms: op.terms().clone(),
    })
}

impl CylinderOperator {
    /// The `t → -∞` limit of the coefficients.
    pub fn limit(&self) -> CylinderOperator {
        CylinderOperator {
            terms: self
                .terms
                .iter()
                .map(|(a, cf)| (a.clone(), cf.frozen()))
                .filter(|(_, cf)| !cf.is_zero())
                .collect(),
            ..self.clone()
        }
    }

    /// True if every coefficient is constant in `t`.
    pub fn is_translation_invariant(&self) -> bool {
        self.terms
            .values()
            .all(|cf| cf.terms().iter().all(|t| t.exponent == 0.0))
    }

    /// Action on samples `u[(i, mode, component)]` at the grid's `t` nodes.
    pub fn apply(&self, grid: &RadialGrid, modes: &[Mode], u: &Array3<C64>, exec: Execution) -> Result<Array3<C64>> {
        let (n, nm, k) = (grid.len(), modes.len(), self.system_size);
        if u.dim() != (n, nm, k) {
            return Err(Error::InvalidParameter(format!(
                "samples have shape {:?}, expected ({n}, {nm}, {k})",
                u.dim()
            )));
        }
        let t = grid.t();
        let blocks = par::map_range(exec, nm, |m| -> Result<Array3<C64>> {
            let mut out = Array3::<C64>::zeros((n, 1, k));
            for (alpha, coeff) in &self.terms {
                let s = cross_symbol(alpha, &modes[m], &self.cross_section)?;
                for ci in 0..k {
                    let mut col: Vec<C64> = (0..n).map(|i| u[(i, m, ci)]).collect();
                    for _ in 0..alpha.radial {
                        col = grid.d_t(&col);
                    }
                    for term in coeff.terms() {
                        for (i, v) in col.iter().enumerate() {
                            let w = s * (term.exponent * t[i]).exp() * v;
                            for co in 0..k {
                                out[(i, 0, co)] += term.value[(co, ci)] * w;
                            }
                        }
                    }
                }
            }
            Ok(out)
        });
        let mut result = Array3::<C64>::zeros((n, nm, k));
        for (m, block) in blocks.into_iter().enumerate() {
            let block = block?;
            for i in 0..n {
                for c in 0..k {
                    result[(i, m, c)] = block[(i, 0, c)];
                }
            }
        }
        Ok(result)
    }
}

impl fmt::Display for CylinderOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let circle = matches!(self.cross_section, CrossSection::Circle);
        let cross = move |j: usize| if circle { "∂_θ".to_string() } else { format!("∂_y{}", j + 1) };
        let mut first = true;
        for (alpha, coeff) in &self.terms {
            for term in coeff.terms() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let mono = fmt_monomial(alpha, "∂_t", &cross);
                let v = if term.value.nrows() == 1 {
                    super::fmt_complex(term.value[(0, 0)])
                } else {
                    format!("M{}x{}", term.value.nrows(), term.value.ncols())
                };
                let mut factors = Vec::new();
                if v != "1" || (mono.is_empty() && term.exponent == 0.0) {
                    factors.push(v);
                }
                if term.exponent != 0.0 {
                    factors.push(if term.exponent == 1.0 {
                        "e^t".to_string()
                    } else {
                        format!("e^({}t)", term.exponent)
                    });
                }
                if !mono.is_empty() {
                    factors.push(mono);
                }
                write!(f, "{}", factors.join("·"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{make_model, Model};
    use crate::poly::c;

    #[test]
    fn polar_laplacian_becomes_the_cylinder_laplacian() {
        let cyl = kondratiev_transform(&make_model(&Model::PolarLaplacian).unwrap()).unwrap();
        assert_eq!(cyl.to_string(), "∂_θ^2 + ∂_t^2");
        assert!(cyl.is_translation_invariant());
    }

    #[test]
    fn r_times_radial_becomes_exponential() {
        let op = BoundaryOperator::new(StructureKind::B, CrossSection::circle(), 1)
            .unwrap()
            .with_scalar(MultiIndex::radial(1, 1), 1.0, 1.0)
            .unwrap();
        let cyl = kondratiev_transform(&op).unwrap();
        assert_eq!(cyl.to_string(), "e^t·∂_t");
        assert!(!cyl.is_translation_invariant());
        assert!(cyl.limit().terms.is_empty());
    }

    #[test]
    fn spherical_schrodinger_keeps_the_potential_as_exponential() {
        let op = make_model(&Model::SphericalSchrodinger { n: 3, z: c(2.0) }).unwrap();
        let cyl = kondratiev_transform(&op).unwrap();
        let s = cyl.to_string();
        assert!(s.contains("2·e^t"), "{s}");
        assert!(s.contains("∂_t^2"), "{s}");
        assert_eq!(cyl.limit().terms.len(), 3);
    }

    #[test]
    fn rejects_non_b() {
        let op = BoundaryOperator::identity(StructureKind::Zero, CrossSection::circle(), 1).unwrap();
        assert!(kondratiev_transform(&op).is_err());
    }
}

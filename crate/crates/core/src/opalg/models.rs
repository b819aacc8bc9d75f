//! Built-in model operators, each with its singular prefactor removed.

use super::{BoundaryOperator, Coefficient, MultiIndex};
use crate::crosssec::CrossSection;
use crate::error::{Error, Result};
use crate::liestruct::StructureKind;
use crate::poly::{c, Matrix, C64};

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    /// `(r∂_r)² + ∂_θ²` on the punctured plane.
    PolarLaplacian,
    /// `(ρ∂_ρ)² + (n-2)ρ∂_ρ - L + Zρ` on `S^{n-1}`.
    SphericalSchrodinger { n: usize, z: C64 },
    /// `(σ²/2)(x∂_x)² + (r - σ²/2)x∂_x - r`.
    BlackScholes { sigma: f64, rate: f64 },
    /// `(r∂_r)² + ∂_θ² + (r∂_z)²`, frame-level example only.
    CylCoordLaplacian,
    /// `Δ + ρ^{-2γ}V₀` rewritten in the `b` or `c_γ` frame.
    CGammaSchrodinger { n: usize, gamma: f64, v0: C64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::PolarLaplacian => "polar_laplacian",
            Model::SphericalSchrodinger { .. } => "spherical_schrodinger",
            Model::BlackScholes { .. } => "black_scholes",
            Model::CylCoordLaplacian => "cyl_coord_laplacian",
            Model::CGammaSchrodinger { .. } => "cgamma_schrodinger",
        }
    }
}

pub fn make_model(model: &Model) -> Result<BoundaryOperator> {
    match *model {
        Model::PolarLaplacian => BoundaryOperator::new(StructureKind::B, CrossSection::circle(), 1)?
            .with_scalar(MultiIndex::radial(2, 1), 0.0, 1.0)?
            .with_scalar(MultiIndex::new(0, vec![2], 0), 0.0, 1.0),
        Model::SphericalSchrodinger { n, z } => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 2")));
            }
            let mut op = spherical_base(n, (n as f64) - 2.0, StructureKind::B)?;
            op.add_scalar(MultiIndex::radial(0, 0), 1.0, z)?;
            Ok(op)
        }
        Model::BlackScholes { sigma, rate } => {
            if !(sigma > 0.0) || !sigma.is_finite() || !rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "Black-Scholes needs sigma > 0 and finite rate (sigma = {sigma}, rate = {rate})"
                )));
            }
            let cross = CrossSection::generic(Matrix::zeros(1, 1), 0)?;
            let half = 0.5 * sigma * sigma;
            BoundaryOperator::new(StructureKind::B, cross, 1)?
                .with_scalar(MultiIndex::radial(2, 0), 0.0, half)?
                .with_scalar(MultiIndex::radial(1, 0), 0.0, rate - half)?
                .with_scalar(MultiIndex::radial(0, 0), 0.0, -rate)
        }
        Model::CylCoordLaplacian => {
            let mut op = BoundaryOperator::new(StructureKind::B, CrossSection::torus(2)?, 1)?
                .with_scalar(MultiIndex::new(2, vec![0, 0], 0), 0.0, 1.0)?
                .with_scalar(MultiIndex::new(0, vec![2, 0], 0), 0.0, 1.0)?
                .with_scalar(MultiIndex::new(0, vec![0, 2], 0), 2.0, 1.0)?;
            op.set_symbolic_only(true);
            Ok(op)
        }
        Model::CGammaSchrodinger { n, gamma, v0 } => {
            let v = Coefficient::scalar(0.0, v0)?;
            Ok(cgamma_rewrite(n, gamma, &v)?.1)
        }
    }
}

/// `X² + a·X - L_frame` on the sphere `S^{n-1}`.
fn spherical_base(n: usize, a: f64, kind: StructureKind) -> Result<BoundaryOperator> {
    let cross = CrossSection::sphere(n - 1)?;
    BoundaryOperator::new(kind, cross, 1)?
        .with_scalar(MultiIndex::radial(2, 0), 0.0, 1.0)?
        .with_scalar(MultiIndex::laplacian_power(1, 0), 0.0, -1.0)?
        .with_scalar(MultiIndex::radial(1, 0), 0.0, a)
}

/// Rewrites `Δ + ρ^{-2γ}V₀` on `ℝⁿ` as `ρ^{-factor}·P`, returning `(factor, P)`.
///
/// For `2γ ∈ {0, 1, 2}` the result is a `b` operator with factor 2; for
/// `γ > 1` it lives in the `c_γ` frame `{ρ^γ∂_ρ, ρ^{γ-1}·ρ∂_y}` with factor
/// `2γ`. `Δ` here is the analyst's Laplacian `∂_ρ² + (n-1)/ρ ∂_ρ - L/ρ²`.
pub fn cgamma_rewrite(n: usize, gamma: f64, v0: &Coefficient) -> Result<(f64, BoundaryOperator)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 2")));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} must be a finite nonnegative number")));
    }
    if v0.dim() != 1 {
        return Err(Error::InvalidParameter("the potential must be scalar".into()));
    }
    let two_gamma = 2.0 * gamma;
    if [0.0, 1.0, 2.0].contains(&two_gamma) {
        let mut op = spherical_base(n, n as f64 - 2.0, StructureKind::B)?;
        op.add_term(MultiIndex::radial(0, 0), v0.shift_exponent(2.0 - two_gamma)?)?;
        return Ok((2.0, op));
    }
    if gamma > 1.0 {
        let mut op = spherical_base(n, 0.0, StructureKind::CGamma(gamma))?;
        op.add_scalar(MultiIndex::radial(1, 0), gamma - 1.0, c(n as f64 - 1.0 - gamma))?;
        op.add_term(MultiIndex::radial(0, 0), v0.clone())?;
        return Ok((two_gamma, op));
    }
    Err(Error::Unsupported(format!(
        "gamma = {gamma}: only 2γ ∈ {{0, 1, 2}} or γ > 1 can be rewritten; \
         0 < γ < 1 with γ ≠ 1/2 needs a modified calculus"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_laplacian_terms() {
        let op = make_model(&Model::PolarLaplacian).unwrap();
        assert_eq!(op.order(), 2);
        assert_eq!(op.terms().len(), 2);
        assert_eq!(op.terms()[&MultiIndex::radial(2, 1)].at_zero()[(0, 0)], c(1.0));
        assert_eq!(op.terms()[&MultiIndex::new(0, vec![2], 0)].at_zero()[(0, 0)], c(1.0));
    }

    #[test]
    fn spherical_schrodinger_three() {
        let op = make_model(&Model::SphericalSchrodinger { n: 3, z: c(1.0) }).unwrap();
        assert_eq!(op.to_string(), "1·r^1 + -1·L + (r∂_r) + (r∂_r)^2");
        assert!(make_model(&Model::SphericalSchrodinger { n: 1, z: c(1.0) }).is_err());
    }

    #[test]
    fn black_scholes_terms() {
        let op = make_model(&Model::BlackScholes { sigma: 1.0, rate: 0.0 }).unwrap();
        assert_eq!(op.terms().len(), 2);
        assert_eq!(op.terms()[&MultiIndex::radial(2, 0)].at_zero()[(0, 0)], c(0.5));
        assert_eq!(op.terms()[&MultiIndex::radial(1, 0)].at_zero()[(0, 0)], c(-0.5));
        assert!(make_model(&Model::BlackScholes { sigma: 0.0, rate: 0.0 }).is_err());
    }

    #[test]
    fn cgamma_cases() {
        let v = Coefficient::scalar(0.0, c(1.0)).unwrap();
        let (f, op) = cgamma_rewrite(3, 0.5, &v).unwrap();
        assert_eq!(f, 2.0);
        assert_eq!(op, make_model(&Model::SphericalSchrodinger { n: 3, z: c(1.0) }).unwrap());

        let (f, op) = cgamma_rewrite(3, 0.0, &v).unwrap();
        assert_eq!(f, 2.0);
        assert_eq!(op.terms()[&MultiIndex::radial(0, 0)].terms()[0].exponent, 2.0);

        let (f, op) = cgamma_rewrite(3, 2.0, &v).unwrap();
        assert_eq!(f, 4.0);
        assert_eq!(op.kind(), StructureKind::CGamma(2.0));
        // n - 1 - γ = 0 drops the first-order term
        assert!(!op.terms().contains_key(&MultiIndex::radial(1, 0)));

        assert!(matches!(cgamma_rewrite(3, 0.75, &v), Err(Error::Unsupported(_))));
        assert!(cgamma_rewrite(3, -1.0, &v).is_err());
    }
}

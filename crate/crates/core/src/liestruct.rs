//! Lie structures on a product collar `[0, ε) × Y`.
//!
//! A structure is fixed by a global frame on the collar. The radial frame
//! field is `r^p ∂_r`, the cross-section ones are `r^q ∂_{y_j}`:
//!
//! | kind        | p | q     | ends modelled               |
//! |-------------|---|-------|-----------------------------|
//! | `B`         | 1 | 0     | cylindrical                 |
//! | `Zero`      | 1 | 1     | asymptotically hyperbolic   |
//! | `Sc`        | 2 | 1     | asymptotically Euclidean    |
//! | `CGamma(γ)` | γ | γ − 1 | `ρ^{-2γ}` Schrödinger (γ ≥ 1) |
//!
//! Vector fields are written with coefficients in the class of finite sums
//! `c · r^ν · y^β` with real `ν ≥ 0`, which is closed under brackets of the
//! frames above.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const EXP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StructureKind {
    B,
    Zero,
    Sc,
    CGamma(f64),
}

impl StructureKind {
    pub fn name(&self) -> String {
        match self {
            StructureKind::B => "b".into(),
            StructureKind::Zero => "zero".into(),
            StructureKind::Sc => "sc".into(),
            StructureKind::CGamma(g) => format!("cgamma({g})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Radial,
    Cross(usize),
}

/// `r^{r_exponent}` times a coordinate derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameField {
    pub r_exponent: f64,
    pub direction: Direction,
}

impl FrameField {
    pub fn new(r_exponent: f64, direction: Direction) -> Result<Self> {
        if !(r_exponent >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "frame exponent {r_exponent} must be nonnegative"
            )));
        }
        if direction == Direction::Radial && r_exponent == 0.0 {
            return Err(Error::InvalidParameter(
                "∂_r is not tangent to the boundary".into(),
            ));
        }
        Ok(FrameField {
            r_exponent,
            direction,
        })
    }

    pub fn vanishes_at_boundary(&self) -> bool {
        self.r_exponent > 0.0
    }
}

impl fmt::Display for FrameField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Radial => "∂_r".to_string(),
            Direction::Cross(j) => format!("∂_y{}", j + 1),
        };
        if self.r_exponent == 0.0 {
            write!(f, "{d}")
        } else if self.r_exponent == 1.0 {
            write!(f, "r{d}")
        } else {
            write!(f, "r^{}{d}", self.r_exponent)
        }
    }
}

/// `coeff · r^{r_pow} · Π y_j^{y_pows[j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub r_pow: f64,
    pub y_pows: Vec<u32>,
}

/// Finite sum of monomials, kept merged and sorted.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RPoly {
    terms: Vec<Monomial>,
}

impl RPoly {
    pub fn zero() -> Self {
        RPoly::default()
    }

    pub fn monomial(coeff: f64, r_pow: f64, y_pows: Vec<u32>) -> Result<Self> {
        if !(r_pow >= 0.0) {
            return Err(Error::NotRepresentable(format!("r^{r_pow}")));
        }
        Ok(RPoly::from_terms(vec![Monomial {
            coeff,
            r_pow,
            y_pows,
        }]))
    }

    pub fn r_power(coeff: f64, r_pow: f64, cross_dim: usize) -> Result<Self> {
        RPoly::monomial(coeff, r_pow, vec![0; cross_dim])
    }

    fn from_terms(mut raw: Vec<Monomial>) -> Self {
        raw.sort_by(|a, b| a.r_pow.total_cmp(&b.r_pow).then(a.y_pows.cmp(&b.y_pows)));
        let mut terms: Vec<Monomial> = Vec::with_capacity(raw.len());
        for m in raw {
            match terms.last_mut() {
                Some(last)
                    if (last.r_pow - m.r_pow).abs() <= EXP_TOL && last.y_pows == m.y_pows =>
                {
                    last.coeff += m.coeff
                }
                _ => terms.push(m),
            }
        }
        terms.retain(|m| m.coeff != 0.0);
        RPoly { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &RPoly) -> RPoly {
        RPoly::from_terms(self.terms.iter().chain(other.terms.iter()).cloned().collect())
    }

    pub fn sub(&self, other: &RPoly) -> RPoly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> RPoly {
        RPoly::from_terms(
            self.terms
                .iter()
                .map(|m| Monomial {
                    coeff: m.coeff * s,
                    ..m.clone()
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &RPoly) -> RPoly {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                out.push(Monomial {
                    coeff: a.coeff * b.coeff,
                    r_pow: a.r_pow + b.r_pow,
                    y_pows: a.y_pows.iter().zip(&b.y_pows).map(|(x, y)| x + y).collect(),
                });
            }
        }
        RPoly::from_terms(out)
    }

    /// `∂_r`; fails when a fractional power `0 < ν < 1` would leave the class.
    pub fn d_r(&self) -> Result<RPoly> {
        let mut out = Vec::new();
        for m in &self.terms {
            if m.r_pow.abs() <= EXP_TOL {
                continue;
            }
            let p = m.r_pow - 1.0;
            if p < -EXP_TOL {
                return Err(Error::NotRepresentable(format!(
                    "∂_r r^{} = {} r^{p}",
                    m.r_pow, m.r_pow
                )));
            }
            out.push(Monomial {
                coeff: m.coeff * m.r_pow,
                r_pow: p.max(0.0),
                y_pows: m.y_pows.clone(),
            });
        }
        Ok(RPoly::from_terms(out))
    }

    pub fn d_y(&self, j: usize) -> RPoly {
        let mut out = Vec::new();
        for m in &self.terms {
            let k = m.y_pows[j];
            if k == 0 {
                continue;
            }
            let mut y = m.y_pows.clone();
            y[j] -= 1;
            out.push(Monomial {
                coeff: m.coeff * f64::from(k),
                r_pow: m.r_pow,
                y_pows: y,
            });
        }
        RPoly::from_terms(out)
    }

    /// Divides by `r^p`; fails when some exponent would become negative.
    pub fn divide_r_power(&self, p: f64) -> Result<RPoly> {
        let mut out = Vec::with_capacity(self.terms.len());
        for m in &self.terms {
            let e = m.r_pow - p;
            if e < -EXP_TOL {
                return Err(Error::NotRepresentable(format!(
                    "r^{} is not divisible by r^{p}",
                    m.r_pow
                )));
            }
            out.push(Monomial {
                r_pow: e.max(0.0),
                ..m.clone()
            });
        }
        Ok(RPoly::from_terms(out))
    }

    /// Value at `r = 0`, `y = 0`.
    pub fn at_origin(&self) -> f64 {
        self.terms
            .iter()
            .filter(|m| m.r_pow.abs() <= EXP_TOL && m.y_pows.iter().all(|&k| k == 0))
            .map(|m| m.coeff)
            .sum()
    }

    pub fn eval(&self, r: f64, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                let ry = if m.r_pow == 0.0 { 1.0 } else { r.powf(m.r_pow) };
                m.coeff
                    * ry
                    * m.y_pows
                        .iter()
                        .zip(y)
                        .map(|(&k, &v)| v.powi(k as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

impl fmt::Display for RPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", m.coeff)?;
            if m.r_pow != 0.0 {
                write!(f, "·r^{}", m.r_pow)?;
            }
            for (j, &p) in m.y_pows.iter().enumerate() {
                if p > 0 {
                    write!(f, "·y{}^{p}", j + 1)?;
                }
            }
        }
        Ok(())
    }
}

/// Vector field in coordinates: component 0 multiplies `∂_r`, component
/// `j + 1` multiplies `∂_{y_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub components: Vec<RPoly>,
}

impl VectorField {
    pub fn zero(collar_dim: usize) -> Self {
        VectorField {
            components: vec![RPoly::zero(); collar_dim],
        }
    }

    pub fn from_frame(field: &FrameField, coeff: &RPoly, collar_dim: usize) -> Result<Self> {
        let mut v = VectorField::zero(collar_dim);
        let slot = match field.direction {
            Direction::Radial => 0,
            Direction::Cross(j) => j + 1,
        };
        if slot >= collar_dim {
            return Err(Error::InvalidParameter(format!(
                "direction {slot} outside a collar of dimension {collar_dim}"
            )));
        }
        v.components[slot] = coeff.mul(&RPoly::r_power(1.0, field.r_exponent, collar_dim - 1)?);
        Ok(v)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(RPoly::is_zero)
    }

    /// `X(f)` for a coefficient function `f`.
    pub fn apply(&self, f: &RPoly) -> Result<RPoly> {
        let mut out = self.components[0].mul(&f.d_r()?);
        for (j, comp) in self.components.iter().enumerate().skip(1) {
            out = out.add(&comp.mul(&f.d_y(j - 1)));
        }
        Ok(out)
    }

    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        let components = (0..self.components.len())
            .map(|k| Ok(self.apply(&other.components[k])?.sub(&other.apply(&self.components[k])?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VectorField { components })
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }
}

/// Coefficients of a vector field with respect to a structure's frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameExpansion {
    pub coefficients: Vec<RPoly>,
}

impl FrameExpansion {
    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(RPoly::is_zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Abelian,
    SemidirectDilation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitKind {
    /// The whole boundary component is one orbit.
    BoundaryComponent,
    /// Every boundary point is its own orbit.
    Point,
}

/// Lie algebra of the isotropy group at a boundary point: spanned by the
/// frame fields that vanish there, with brackets taken modulo `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropyDescriptor {
    /// Frame indices spanning the isotropy algebra.
    pub generators: Vec<usize>,
    /// `c[i][j][k]` is the coefficient of generator `k` in `[e_i, e_j]` at `r = 0`.
    pub structure_constants: Vec<Vec<Vec<f64>>>,
    pub group_kind: GroupKind,
    pub orbit: OrbitKind,
}

impl IsotropyDescriptor {
    pub fn dimension(&self) -> usize {
        self.generators.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieStructure {
    kind: StructureKind,
    collar_dim: usize,
}

impl LieStructure {
    pub fn new(kind: StructureKind, collar_dim: usize) -> Result<Self> {
        if collar_dim == 0 {
            return Err(Error::InvalidParameter("collar dimension must be positive".into()));
        }
        if let StructureKind::CGamma(g) = kind {
            if !(g >= 1.0) || !g.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "c_gamma frames need gamma >= 1 so that r^(gamma-1)∂_y stays tangent, got {g}"
                )));
            }
        }
        Ok(LieStructure { kind, collar_dim })
    }

    pub fn kind(&self) -> StructureKind {
        self.kind
    }

    pub fn collar_dim(&self) -> usize {
        self.collar_dim
    }

    pub fn cross_dim(&self) -> usize {
        self.collar_dim - 1
    }

    /// Exponent `p` of the radial generator `r^p ∂_r`.
    pub fn radial_exponent(&self) -> f64 {
        match self.kind {
            StructureKind::B | StructureKind::Zero => 1.0,
            StructureKind::Sc => 2.0,
            StructureKind::CGamma(g) => g,
        }
    }

    /// Exponent `q` of the cross-section generators `r^q ∂_y`.
    pub fn cross_exponent(&self) -> f64 {
        match self.kind {
            StructureKind::B => 0.0,
            StructureKind::Zero | StructureKind::Sc => 1.0,
            StructureKind::CGamma(g) => g - 1.0,
        }
    }

    pub fn frame(&self) -> Vec<FrameField> {
        let mut out = vec![FrameField {
            r_exponent: self.radial_exponent(),
            direction: Direction::Radial,
        }];
        out.extend((0..self.cross_dim()).map(|j| FrameField {
            r_exponent: self.cross_exponent(),
            direction: Direction::Cross(j),
        }));
        out
    }

    pub fn frame_vector_field(&self, index: usize) -> Result<VectorField> {
        let frame = self.frame();
        let field = frame.get(index).ok_or_else(|| {
            Error::InvalidParameter(format!("frame index {index} out of range"))
        })?;
        VectorField::from_frame(field, &RPoly::r_power(1.0, 0.0, self.cross_dim())?, self.collar_dim)
    }

    /// Writes a coordinate vector field in this structure's frame. Fails when
    /// the field is not in the module the frame generates.
    pub fn expand_in_frame(&self, v: &VectorField) -> Result<FrameExpansion> {
        if v.components.len() != self.collar_dim {
            return Err(Error::InvalidParameter(format!(
                "vector field has {} components, collar has dimension {}",
                v.components.len(),
                self.collar_dim
            )));
        }
        let coefficients = self
            .frame()
            .iter()
            .zip(&v.components)
            .map(|(f, comp)| comp.divide_r_power(f.r_exponent))
            .collect::<Result<Vec<_>>>()?;
        Ok(FrameExpansion { coefficients })
    }

    pub fn to_vector_field(&self, e: &FrameExpansion) -> Result<VectorField> {
        let mut v = VectorField::zero(self.collar_dim);
        for (field, coeff) in self.frame().iter().zip(&e.coefficients) {
            v = v.add(&VectorField::from_frame(field, coeff, self.collar_dim)?);
        }
        Ok(v)
    }

    /// `[X, Y]` expanded in the frame.
    pub fn bracket(&self, x: &VectorField, y: &VectorField) -> Result<FrameExpansion> {
        self.expand_in_frame(&x.bracket(y)?)
    }

    /// Full bracket table `[e_i, e_j]` of the frame.
    pub fn bracket_table(&self) -> Result<Vec<Vec<FrameExpansion>>> {
        let fields = (0..self.collar_dim)
            .map(|i| self.frame_vector_field(i))
            .collect::<Result<Vec<_>>>()?;
        fields
            .iter()
            .map(|a| fields.iter().map(|b| self.bracket(a, b)).collect())
            .collect()
    }

    pub fn isotropy(&self) -> IsotropyDescriptor {
        let frame = self.frame();
        let generators: Vec<usize> = frame
            .iter()
            .enumerate()
            .filter(|(_, f)| f.vanishes_at_boundary())
            .map(|(i, _)| i)
            .collect();
        let table = self
            .bracket_table()
            .expect("frame brackets stay inside the frame module");
        let structure_constants: Vec<Vec<Vec<f64>>> = generators
            .iter()
            .map(|&i| {
                generators
                    .iter()
                    .map(|&j| {
                        generators
                            .iter()
                            .map(|&k| table[i][j].coefficients[k].at_origin())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let abelian = structure_constants
            .iter()
            .flatten()
            .flatten()
            .all(|&c| c == 0.0);
        let orbit = if frame.iter().all(FrameField::vanishes_at_boundary) {
            OrbitKind::Point
        } else {
            OrbitKind::BoundaryComponent
        };
        IsotropyDescriptor {
            generators,
            structure_constants,
            group_kind: if abelian {
                GroupKind::Abelian
            } else {
                GroupKind::SemidirectDilation
            },
            orbit,
        }
    }

    /// Gram matrix of `(∂_r, ∂_{y_1}, …)` for the metric making the frame
    /// orthonormal.
    pub fn compatible_metric(&self, r: f64) -> Result<DMatrix<f64>> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "compatible metric needs r > 0, got {r}"
            )));
        }
        let diag: Vec<f64> = self
            .frame()
            .iter()
            .map(|f| r.powf(-2.0 * f.r_exponent))
            .collect();
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(s: &LieStructure, i: usize) -> VectorField {
        s.frame_vector_field(i).unwrap()
    }

    /// Applies `X` to `r^a y^b` by hand: `X^r ∂_r f + X^y ∂_y f`, with the
    /// frame's single-monomial components.
    fn act_on_monomial(xr: (f64, f64), xy: (f64, f64), a: f64, b: i32, r: f64, y: f64) -> f64 {
        let dr = if a == 0.0 { 0.0 } else { a * r.powf(a - 1.0) * y.powi(b) };
        let dy = if b == 0 { 0.0 } else { f64::from(b) * r.powf(a) * y.powi(b - 1) };
        xr.0 * r.powf(xr.1) * dr + xy.0 * r.powf(xy.1) * dy
    }

    #[test]
    fn coordinate_fields_commute() {
        let b = LieStructure::new(StructureKind::B, 2).unwrap();
        assert!(b.bracket(&field(&b, 0), &field(&b, 1)).unwrap().is_zero());
    }

    #[test]
    fn brackets_match_monomial_oracle() {
        // [X, Y] f = X(Y f) - Y(X f) evaluated on f = r^a y^b by finite
        // composition of the hand-written action.
        let cases = [
            (StructureKind::Zero, (1.0, 1.0)),
            (StructureKind::Sc, (2.0, 1.0)),
        ];
        for (kind, (p, q)) in cases {
            let s = LieStructure::new(kind, 2).unwrap();
            let e = s.bracket(&field(&s, 0), &field(&s, 1)).unwrap();
            // Oracle: [r^p∂_r, r^q∂_y] r^a y^b, computed from the two
            // compositions using exact monomial differentiation.
            for (a, bb) in [(2.0, 3), (3.0, 1), (1.5, 2)] {
                let (r, y) = (0.7, 1.3);
                // X(Y f): Y f = b r^{a+q} y^{b-1}
                let yf_coeff = f64::from(bb);
                let xyf = act_on_monomial((1.0, p), (0.0, 0.0), a + q, bb - 1, r, y) * yf_coeff;
                // Y(X f): X f = a r^{a+p-1} y^b
                let yxf = act_on_monomial((0.0, 0.0), (1.0, q), a + p - 1.0, bb, r, y) * a;
                let oracle = xyf - yxf;
                let ours = e.coefficients[1].eval(r, &[y])
                    * act_on_monomial((0.0, 0.0), (1.0, q), a, bb, r, y);
                assert!((oracle - ours).abs() < 1e-12, "{kind:?} a={a} b={bb}");
            }
        }
        let z = LieStructure::new(StructureKind::Zero, 2).unwrap();
        let e = z.bracket(&field(&z, 0), &field(&z, 1)).unwrap();
        assert!(e.coefficients[0].is_zero());
        assert_eq!(e.coefficients[1], RPoly::r_power(1.0, 0.0, 1).unwrap());
        let sc = LieStructure::new(StructureKind::Sc, 2).unwrap();
        let e = sc.bracket(&field(&sc, 0), &field(&sc, 1)).unwrap();
        assert_eq!(e.coefficients[1], RPoly::r_power(1.0, 1.0, 1).unwrap());
    }

    #[test]
    fn fields_outside_the_module_are_rejected() {
        let b = LieStructure::new(StructureKind::Zero, 2).unwrap();
        // ∂_y alone is not r·(r∂_y)-divisible
        let v = VectorField::from_frame(
            &FrameField::new(0.0, Direction::Cross(0)).unwrap(),
            &RPoly::r_power(1.0, 0.0, 1).unwrap(),
            2,
        )
        .unwrap();
        assert!(matches!(b.expand_in_frame(&v), Err(Error::NotRepresentable(_))));
        assert!(FrameField::new(0.0, Direction::Radial).is_err());
        let half = RPoly::r_power(1.0, 0.5, 0).unwrap();
        assert!(half.d_r().is_err());
    }

    #[test]
    fn isotropy_of_the_three_structures() {
        let b = LieStructure::new(StructureKind::B, 2).unwrap().isotropy();
        assert_eq!(b.generators, vec![0]);
        assert_eq!(b.group_kind, GroupKind::Abelian);
        assert_eq!(b.orbit, OrbitKind::BoundaryComponent);

        let z = LieStructure::new(StructureKind::Zero, 3).unwrap().isotropy();
        assert_eq!(z.group_kind, GroupKind::SemidirectDilation);
        assert_eq!(z.orbit, OrbitKind::Point);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expected = match (i, j) {
                        (0, j) if j > 0 && k == j => 1.0,
                        (i, 0) if i > 0 && k == i => -1.0,
                        _ => 0.0,
                    };
                    assert_eq!(z.structure_constants[i][j][k], expected, "c^{k}_{i}{j}");
                }
            }
        }

        let sc = LieStructure::new(StructureKind::Sc, 3).unwrap().isotropy();
        assert_eq!(sc.group_kind, GroupKind::Abelian);
        assert_eq!(sc.dimension(), 3);
    }

    #[test]
    fn metrics() {
        let b = LieStructure::new(StructureKind::B, 3).unwrap();
        assert_eq!(b.compatible_metric(1.0).unwrap(), DMatrix::identity(3, 3));
        let g = b.compatible_metric(0.5).unwrap();
        assert_eq!((g[(0, 0)], g[(1, 1)], g[(2, 2)]), (4.0, 1.0, 1.0));
        let z = LieStructure::new(StructureKind::Zero, 2).unwrap();
        let g = z.compatible_metric(0.5).unwrap();
        assert_eq!((g[(0, 0)], g[(1, 1)]), (4.0, 4.0));
        assert!(z.compatible_metric(0.0).is_err());
    }

    #[test]
    fn cgamma_needs_gamma_at_least_one() {
        assert!(LieStructure::new(StructureKind::CGamma(0.5), 2).is_err());
        let s = LieStructure::new(StructureKind::CGamma(2.0), 2).unwrap();
        assert_eq!(s.isotropy().group_kind, GroupKind::Abelian);
    }
}

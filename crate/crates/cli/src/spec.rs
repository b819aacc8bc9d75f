//! Operator specification files.
//!
//! A spec is a JSON object with a `schema` tag and either a named `model`
//! or an explicit list of `terms`:
//!
//! ```json
//! {
//!   "schema": "fredholm-kit/operator@1",
//!   "structure": { "kind": "b" },
//!   "cross_section": { "kind": "circle" },
//!   "system_size": 1,
//!   "order": 2,
//!   "terms": [
//!     { "alpha": [2, 0], "coefficient": [{ "nu": 0, "value": 1 }] },
//!     { "alpha": [0, 2], "coefficient": [{ "nu": 0, "value": 1 }] }
//!   ]
//! }
//! ```
//!
//! `alpha` lists the radial power first, then one entry per explicit cross
//! partial (none for spheres and matrix cross-sections, which act through
//! `laplacian`). Complex numbers are written as a number or `[re, im]`.

use std::path::Path;

use fredholm_core::crosssec::CrossSection;
use fredholm_core::liestruct::StructureKind;
use fredholm_core::opalg::{make_model, BoundaryOperator, Coefficient, Model, MultiIndex};
use fredholm_core::poly::{Matrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: &str = "fredholm-kit/operator@1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_section: Option<CrossSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub symbolic_only: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermSpec>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_zero(j: &u32) -> bool {
    *j == 0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    PolarLaplacian,
    SphericalSchrodinger {
        n: usize,
        #[serde(default)]
        z: Complex,
    },
    BlackScholes {
        sigma: f64,
        rate: f64,
    },
    CylCoordLaplacian,
    CgammaSchrodinger {
        n: usize,
        gamma: f64,
        #[serde(default)]
        v0: Complex,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StructureSpec {
    B,
    Zero,
    Sc,
    Cgamma { gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CrossSpec {
    Circle,
    Torus { dim: usize },
    Sphere { dim: usize },
    /// Hermitian, nonnegative matrix standing in for the cross Laplacian.
    Matrix { dim: usize, matrix: Vec<Vec<Complex>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub alpha: Vec<u32>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub laplacian: u32,
    pub coefficient: Vec<CoefSpec>,
}

/// One `r^nu` piece of a coefficient: `value` (times the identity) or a full `matrix`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefSpec {
    #[serde(default)]
    pub nu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Complex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Complex>>>,
}

/// A real number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex(pub C64);

impl Serialize for Complex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d)
            .map_err(|_| serde::de::Error::custom("expected a number or an [re, im] pair"))?
        {
            Raw::Real(x) => Ok(Complex(C64::new(x, 0.0))),
            Raw::Pair([re, im]) => Ok(Complex(C64::new(re, im))),
        }
    }
}

fn schema_err(origin: &str, field: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Schema {
        origin: origin.to_string(),
        field: field.into(),
        msg: msg.into(),
    }
}

pub fn parse_spec(path: &Path) -> Result<BoundaryOperator, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec_str(&text, &path.display().to_string())
}

/// Parses spec text; `origin` names the source in diagnostics.
pub fn parse_spec_str(text: &str, origin: &str) -> Result<BoundaryOperator, CliError> {
    let spec: OperatorSpec = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        msg: strip_position(&e.to_string()),
    })?;
    build(&spec, origin)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn build(spec: &OperatorSpec, origin: &str) -> Result<BoundaryOperator, CliError> {
    if spec.schema != SCHEMA {
        return Err(schema_err(origin, "schema", format!("expected \"{SCHEMA}\", found \"{}\"", spec.schema)));
    }
    if let Some(model) = &spec.model {
        let explicit = spec.structure.is_some()
            || spec.cross_section.is_some()
            || spec.system_size.is_some()
            || spec.order.is_some()
            || spec.symbolic_only
            || !spec.terms.is_empty();
        if explicit {
            return Err(schema_err(origin, "model", "a model spec cannot also list explicit operator fields"));
        }
        let model = match *model {
            ModelSpec::PolarLaplacian => Model::PolarLaplacian,
            ModelSpec::SphericalSchrodinger { n, z } => Model::SphericalSchrodinger { n, z: z.0 },
            ModelSpec::BlackScholes { sigma, rate } => Model::BlackScholes { sigma, rate },
            ModelSpec::CylCoordLaplacian => Model::CylCoordLaplacian,
            ModelSpec::CgammaSchrodinger { n, gamma, v0 } => Model::CGammaSchrodinger { n, gamma, v0: v0.0 },
        };
        return make_model(&model).map_err(|e| schema_err(origin, "model", e.to_string()));
    }

    let structure = spec
        .structure
        .as_ref()
        .ok_or_else(|| schema_err(origin, "structure", "missing (or give a `model`)"))?;
    let kind = match *structure {
        StructureSpec::B => StructureKind::B,
        StructureSpec::Zero => StructureKind::Zero,
        StructureSpec::Sc => StructureKind::Sc,
        StructureSpec::Cgamma { gamma } => StructureKind::CGamma(gamma),
    };
    let cross = match spec
        .cross_section
        .as_ref()
        .ok_or_else(|| schema_err(origin, "cross_section", "missing"))?
    {
        CrossSpec::Circle => CrossSection::circle(),
        CrossSpec::Torus { dim } => CrossSection::torus(*dim).map_err(|e| schema_err(origin, "cross_section.dim", e.to_string()))?,
        CrossSpec::Sphere { dim } => CrossSection::sphere(*dim).map_err(|e| schema_err(origin, "cross_section.dim", e.to_string()))?,
        CrossSpec::Matrix { dim, matrix } => {
            let m = to_matrix(matrix).map_err(|msg| schema_err(origin, "cross_section.matrix", msg))?;
            CrossSection::generic(m, *dim).map_err(|e| schema_err(origin, "cross_section.matrix", e.to_string()))?
        }
    };
    let k = spec.system_size.unwrap_or(1);
    let pd = cross.partial_dims();
    let mut op = BoundaryOperator::new(kind, cross, k).map_err(|e| schema_err(origin, "structure", e.to_string()))?;

    for (i, term) in spec.terms.iter().enumerate() {
        let field = format!("terms[{i}]");
        if term.alpha.len() != pd + 1 {
            return Err(schema_err(
                origin,
                format!("{field}.alpha"),
                format!("expected {} entries (radial power, then {pd} cross partials), found {}", pd + 1, term.alpha.len()),
            ));
        }
        let alpha = MultiIndex::new(term.alpha[0], term.alpha[1..].to_vec(), term.laplacian);
        if let Some(order) = spec.order {
            if alpha.order() > order {
                return Err(schema_err(
                    origin,
                    format!("{field}.alpha"),
                    format!("|alpha| = {} exceeds the declared order {order}", alpha.order()),
                ));
            }
        }
        if term.coefficient.is_empty() {
            return Err(schema_err(origin, format!("{field}.coefficient"), "empty coefficient list"));
        }
        let mut raw = Vec::with_capacity(term.coefficient.len());
        for (j, c) in term.coefficient.iter().enumerate() {
            let cf = format!("{field}.coefficient[{j}]");
            let value = match (&c.value, &c.matrix) {
                (Some(v), None) => Matrix::identity(k, k) * v.0,
                (None, Some(m)) => {
                    let m = to_matrix(m).map_err(|msg| schema_err(origin, format!("{cf}.matrix"), msg))?;
                    if m.nrows() != k {
                        return Err(schema_err(
                            origin,
                            format!("{cf}.matrix"),
                            format!("expected {k}x{k}, found {}x{}", m.nrows(), m.ncols()),
                        ));
                    }
                    m
                }
                _ => return Err(schema_err(origin, cf, "give exactly one of `value` or `matrix`")),
            };
            raw.push((c.nu, value));
        }
        let coeff = Coefficient::from_terms(k, raw).map_err(|e| schema_err(origin, format!("{field}.coefficient"), e.to_string()))?;
        op.add_term(alpha, coeff).map_err(|e| schema_err(origin, field.clone(), e.to_string()))?;
    }
    if spec.terms.is_empty() {
        return Err(schema_err(origin, "terms", "an explicit spec needs at least one term"));
    }
    op.set_symbolic_only(spec.symbolic_only);
    Ok(op)
}

fn to_matrix(rows: &[Vec<Complex>]) -> Result<Matrix, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("matrix must be square and nonempty".into());
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j].0))
}

fn from_matrix(m: &Matrix) -> Vec<Vec<Complex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Complex(m[(i, j)])).collect())
        .collect()
}

/// The canonical explicit spec of `op`.
pub fn to_spec(op: &BoundaryOperator) -> OperatorSpec {
    let structure = match op.kind() {
        StructureKind::B => StructureSpec::B,
        StructureKind::Zero => StructureSpec::Zero,
        StructureKind::Sc => StructureSpec::Sc,
        StructureKind::CGamma(gamma) => StructureSpec::Cgamma { gamma },
    };
    let cross = match op.cross_section() {
        CrossSection::Circle => CrossSpec::Circle,
        CrossSection::Torus { dim } => CrossSpec::Torus { dim: *dim },
        CrossSection::Sphere { dim } => CrossSpec::Sphere { dim: *dim },
        CrossSection::GenericMatrix { matrix, dim, .. } => CrossSpec::Matrix {
            dim: *dim,
            matrix: from_matrix(matrix),
        },
    };
    let k = op.system_size();
    let terms = op
        .terms()
        .iter()
        .map(|(alpha, coeff)| TermSpec {
            alpha: std::iter::once(alpha.radial).chain(alpha.cross.iter().copied()).collect(),
            laplacian: alpha.laplacian,
            coefficient: coeff
                .terms()
                .iter()
                .map(|t| {
                    let (value, matrix) = if k == 1 {
                        (Some(Complex(t.value[(0, 0)])), None)
                    } else {
                        (None, Some(from_matrix(&t.value)))
                    };
                    CoefSpec {
                        nu: t.exponent,
                        value,
                        matrix,
                    }
                })
                .collect(),
        })
        .collect();
    OperatorSpec {
        schema: SCHEMA.to_string(),
        model: None,
        structure: Some(structure),
        cross_section: Some(cross),
        system_size: Some(k),
        order: Some(op.order()),
        symbolic_only: op.symbolic_only(),
        terms,
    }
}

/// Canonical JSON text for `op`.
pub fn serialize(op: &BoundaryOperator) -> String {
    let mut s = serde_json::to_string_pretty(&to_spec(op)).expect("spec serialization cannot fail");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const POLAR: &str = r#"{"schema": "fredholm-kit/operator@1", "model": {"name": "polar_laplacian"}}"#;

    #[test]
    fn named_model() {
        let op = parse_spec_str(POLAR, "polar.json").unwrap();
        assert_eq!(op, make_model(&Model::PolarLaplacian).unwrap());
    }

    #[test]
    fn explicit_shifted_cylinder() {
        let text = r#"{
  "schema": "fredholm-kit/operator@1",
  "structure": {"kind": "b"},
  "cross_section": {"kind": "circle"},
  "order": 2,
  "terms": [
    {"alpha": [2, 0], "coefficient": [{"nu": 0, "value": 1}]},
    {"alpha": [0, 2], "coefficient": [{"value": [1, 0]}]},
    {"alpha": [0, 0], "coefficient": [{"nu": 0, "value": -1}]}
  ]
}"#;
        let op = parse_spec_str(text, "cyl.json").unwrap();
        let want = make_model(&Model::PolarLaplacian)
            .unwrap()
            .with_scalar(MultiIndex::radial(0, 1), 0.0, -1.0)
            .unwrap();
        assert_eq!(op, want);
    }

    #[test]
    fn order_violation() {
        let text = r#"{"schema": "fredholm-kit/operator@1", "structure": {"kind": "b"},
            "cross_section": {"kind": "circle"}, "order": 1,
            "terms": [{"alpha": [2, 0], "coefficient": [{"value": 1}]}]}"#;
        match parse_spec_str(text, "bad.json") {
            Err(CliError::Schema { field, .. }) => assert_eq!(field, "terms[0].alpha"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_field_has_a_position() {
        let text = "{\n  \"schema\": \"fredholm-kit/operator@1\",\n  \"modle\": {}\n}";
        match parse_spec_str(text, "typo.json") {
            Err(CliError::Syntax { line, msg, .. }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("modle"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_matrix_rejected() {
        let text = r#"{"schema": "fredholm-kit/operator@1", "structure": {"kind": "b"},
            "cross_section": {"kind": "matrix", "dim": 1, "matrix": [[1, 2], [0, 1]]},
            "terms": [{"alpha": [2], "coefficient": [{"value": 1}]}]}"#;
        match parse_spec_str(text, "m.json") {
            Err(CliError::Schema { field, msg, .. }) => {
                assert_eq!(field, "cross_section.matrix");
                assert!(msg.contains("Hermitian"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_round_trip() {
        let op = parse_spec_str(POLAR, "polar.json").unwrap();
        let text = serialize(&op);
        let back = parse_spec_str(&text, "canon.json").unwrap();
        assert_eq!(back, op);
        assert_eq!(serialize(&back), text);
    }
}

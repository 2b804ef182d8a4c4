//! JSON file formats shared by all commands.
//!
//! Matrices are `{"rows", "cols", "re", "im"}` with row-major nested arrays,
//! vectors are lists of `[re, im]` pairs, ensembles are
//! `{"m", "n", "components": [{"weight", "e", "f"}]}` and words are lists of
//! `{"g": "swap"}`, `{"g": "pt", "side": "A"|"B"}` or `{"g": "lu", "U", "V"}`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use sepfact_core::automorphisms::{AutomorphismWord, CanonicalAutomorphism, Generator, PtPattern};
use sepfact_core::decomposition::VkCertificate;
use sepfact_core::septests::PptReport;
use sepfact_core::states::{Component, Ensemble, ProductVector};
use sepfact_core::{Cx, Dims, Matrix, Side};

use crate::CliError;

/// Slack on the total weight of an ensemble file before renormalization.
pub const WEIGHT_SUM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

pub type VectorJson = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub weight: f64,
    pub e: VectorJson,
    pub f: VectorJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub m: usize,
    pub n: usize,
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "g", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorJson {
    Swap,
    Pt { side: SideJson },
    Lu {
        #[serde(rename = "U")]
        u: MatrixJson,
        #[serde(rename = "V")]
        v: MatrixJson,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideJson {
    A,
    B,
}

impl From<SideJson> for Side {
    fn from(s: SideJson) -> Self {
        match s {
            SideJson::A => Side::A,
            SideJson::B => Side::B,
        }
    }
}

impl From<Side> for SideJson {
    fn from(s: Side) -> Self {
        match s {
            Side::A => SideJson::A,
            Side::B => SideJson::B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub k: usize,
    pub ray_gap: f64,
    pub f_min_sv: f64,
    pub min_weight: f64,
    pub valid: bool,
}

impl From<&VkCertificate<f64>> for CertificateJson {
    fn from(c: &VkCertificate<f64>) -> Self {
        Self { k: c.k, ray_gap: c.ray_gap, f_min_sv: c.f_min_sv, min_weight: c.min_weight, valid: c.valid }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptJson {
    pub side: SideJson,
    pub min_eig_pt: f64,
    pub passes: bool,
}

impl From<&PptReport<f64>> for PptJson {
    fn from(r: &PptReport<f64>) -> Self {
        Self { side: r.side.into(), min_eig_pt: r.min_eig_pt, passes: r.passes }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalJson {
    pub swap: bool,
    /// `"none"`, `"A"`, `"B"` or `"both"`.
    pub pt: String,
    #[serde(rename = "U")]
    pub u: MatrixJson,
    #[serde(rename = "V")]
    pub v: MatrixJson,
    pub extends_to_full_state_space: bool,
}

impl CanonicalJson {
    pub fn new(c: &CanonicalAutomorphism<f64>, extends: bool) -> Self {
        let c = c.phase_normalized();
        let pt = match c.pt {
            PtPattern::None => "none",
            PtPattern::A => "A",
            PtPattern::B => "B",
            PtPattern::Both => "both",
        };
        Self { swap: c.swap, pt: pt.into(), u: matrix_to_json(&c.u), v: matrix_to_json(&c.v), extends_to_full_state_space: extends }
    }
}

/// Deserializes `text`, reporting the path of the first failing field.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { what.to_string() } else { format!("{what}.{path}") };
        CliError::Parse { field, message: e.into_inner().to_string() }
    })
}

pub fn matrix_to_json(m: &Matrix<f64>) -> MatrixJson {
    let (rows, cols) = (m.rows(), m.cols());
    MatrixJson {
        rows,
        cols,
        re: (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].re).collect()).collect(),
        im: (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].im).collect()).collect(),
    }
}

pub fn matrix_from_json(j: &MatrixJson, field: &str) -> Result<Matrix<f64>, CliError> {
    let bad = |sub: &str, message: String| CliError::Parse { field: format!("{field}.{sub}"), message };
    if j.rows == 0 || j.cols == 0 {
        return Err(bad("rows", format!("matrix must be nonempty, got {}x{}", j.rows, j.cols)));
    }
    for (name, part) in [("re", &j.re), ("im", &j.im)] {
        if part.len() != j.rows {
            return Err(bad(name, format!("expected {} rows, got {}", j.rows, part.len())));
        }
        if let Some((i, r)) = part.iter().enumerate().find(|(_, r)| r.len() != j.cols) {
            return Err(bad(&format!("{name}[{i}]"), format!("expected {} entries, got {}", j.cols, r.len())));
        }
    }
    let mut data = Vec::with_capacity(j.rows * j.cols);
    for i in 0..j.rows {
        for k in 0..j.cols {
            let z = Cx::new(j.re[i][k], j.im[i][k]);
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(bad(&format!("re/im[{i}][{k}]"), "entry is not finite".into()));
            }
            data.push(z);
        }
    }
    Ok(Matrix::new(j.rows, j.cols, data).expect("shape checked"))
}

pub fn vector_to_json(v: &[Cx<f64>]) -> VectorJson {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_json(v: &VectorJson, len: usize, field: &str) -> Result<Vec<Cx<f64>>, CliError> {
    if v.len() != len {
        return Err(CliError::Parse { field: field.into(), message: format!("expected {len} entries, got {}", v.len()) });
    }
    let out: Vec<Cx<f64>> = v.iter().map(|p| Cx::new(p[0], p[1])).collect();
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CliError::Parse { field: field.into(), message: "entry is not finite".into() });
    }
    Ok(out)
}

pub fn ensemble_to_json(e: &Ensemble<f64>) -> EnsembleJson {
    EnsembleJson {
        m: e.dims().m,
        n: e.dims().n,
        components: e
            .components()
            .iter()
            .map(|c| ComponentJson { weight: c.weight, e: vector_to_json(c.pv.e()), f: vector_to_json(c.pv.f()) })
            .collect(),
    }
}

/// Vectors are normalized; weights must be positive and sum to 1 within
/// [`WEIGHT_SUM_SLACK`], and are then rescaled to sum to 1 exactly.
pub fn ensemble_from_json(j: &EnsembleJson) -> Result<Ensemble<f64>, CliError> {
    let dims = Dims::new(j.m, j.n).map_err(|e| CliError::Parse { field: "ensemble.m/n".into(), message: e.to_string() })?;
    if j.components.is_empty() {
        return Err(CliError::Parse { field: "ensemble.components".into(), message: "at least one component required".into() });
    }
    let mut comps = Vec::with_capacity(j.components.len());
    let mut sum = 0.0;
    for (i, c) in j.components.iter().enumerate() {
        let at = |f: &str| format!("ensemble.components[{i}].{f}");
        if !(c.weight > 0.0) || !c.weight.is_finite() {
            return Err(CliError::Parse { field: at("weight"), message: format!("weight {} must be positive", c.weight) });
        }
        sum += c.weight;
        let e = vector_from_json(&c.e, dims.m, &at("e"))?;
        let f = vector_from_json(&c.f, dims.n, &at("f"))?;
        let pv = ProductVector::new(e, f).map_err(|err| CliError::Parse { field: at("e/f"), message: err.to_string() })?;
        comps.push(Component { weight: c.weight, pv });
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_SLACK {
        return Err(CliError::Parse { field: "ensemble.components[].weight".into(), message: format!("weights sum to {sum}, expected 1") });
    }
    Ensemble::with_normalized_weights(dims, comps).map_err(|e| CliError::Parse { field: "ensemble".into(), message: e.to_string() })
}

pub fn word_to_json(w: &AutomorphismWord<f64>) -> Vec<GeneratorJson> {
    w.generators()
        .iter()
        .map(|g| match g {
            Generator::Swap => GeneratorJson::Swap,
            Generator::PartialTranspose(s) => GeneratorJson::Pt { side: (*s).into() },
            Generator::LocalUnitary { u, v } => GeneratorJson::Lu { u: matrix_to_json(u), v: matrix_to_json(v) },
        })
        .collect()
}

/// Dims come from `dims`, else from the first local unitary, else `2x2`.
pub fn word_from_json(gens: &[GeneratorJson], dims: Option<Dims>) -> Result<AutomorphismWord<f64>, CliError> {
    let dims = dims
        .or_else(|| {
            gens.iter().find_map(|g| match g {
                GeneratorJson::Lu { u, v } => Dims::new(u.rows, v.rows).ok(),
                _ => None,
            })
        })
        .unwrap_or(Dims { m: 2, n: 2 });
    let out = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            Ok(match g {
                GeneratorJson::Swap => Generator::Swap,
                GeneratorJson::Pt { side } => Generator::PartialTranspose((*side).into()),
                GeneratorJson::Lu { u, v } => Generator::LocalUnitary {
                    u: matrix_from_json(u, &format!("word[{i}].U"))?,
                    v: matrix_from_json(v, &format!("word[{i}].V"))?,
                },
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    AutomorphismWord::new(dims, out).map_err(|e| CliError::Parse { field: "word".into(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_fn(2, 3, |i, j| Cx::new(i as f64, j as f64 - 0.5));
        let j = matrix_to_json(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = parse(&text, "matrix").unwrap();
        assert_eq!(matrix_from_json(&back, "matrix").unwrap(), m);
    }

    #[test]
    fn parse_error_names_field() {
        let text = r#"{"m":2,"n":2,"components":[{"weight":"x","e":[[1,0],[0,0]],"f":[[1,0],[0,0]]}]}"#;
        match parse::<EnsembleJson>(text, "ensemble") {
            Err(CliError::Parse { field, .. }) => assert_eq!(field, "ensemble.components[0].weight"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ensemble_weights_are_checked_then_renormalized() {
        let mk = |w1: f64, w2: f64| EnsembleJson {
            m: 2,
            n: 2,
            components: vec![
                ComponentJson { weight: w1, e: vec![[2.0, 0.0], [0.0, 0.0]], f: vec![[1.0, 0.0], [0.0, 0.0]] },
                ComponentJson { weight: w2, e: vec![[0.0, 0.0], [1.0, 0.0]], f: vec![[0.0, 0.0], [0.0, 3.0]] },
            ],
        };
        let ens = ensemble_from_json(&mk(0.5, 0.5000001)).unwrap();
        let total: f64 = ens.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!((ens.components()[0].pv.e()[0].re - 1.0).abs() < 1e-15);
        assert!(matches!(ensemble_from_json(&mk(0.5, 0.6)), Err(CliError::Parse { .. })));
        match ensemble_from_json(&mk(0.5, -0.5)) {
            Err(CliError::Parse { field, .. }) => assert_eq!(field, "ensemble.components[1].weight"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn word_round_trip() {
        let text = r#"[{"g":"pt","side":"A"},{"g":"swap"},{"g":"lu","U":{"rows":2,"cols":2,"re":[[0,1],[1,0]],"im":[[0,0],[0,0]]},"V":{"rows":2,"cols":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}}]"#;
        let gens: Vec<GeneratorJson> = parse(text, "word").unwrap();
        let w = word_from_json(&gens, None).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(word_to_json(&w), gens);
    }
}

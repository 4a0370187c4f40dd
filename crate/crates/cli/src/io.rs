//! JSON schemas for command inputs and outputs, and conversions to core types.

use std::path::Path;

use lroof::nalgebra::DMatrix;
use lroof::num_complex::Complex64;
use lroof::{
    BipartiteShape, HermitianMatrix, KrausMap, LorentzMap, LorentzVector, PositiveMapH, Q1Variant,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilFile {
    pub m: usize,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "J")]
    pub j: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzMapJson {
    pub n: usize,
    pub m: usize,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub d1: usize,
    pub d2: usize,
    pub ops: Vec<ComplexMatrixJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositiveMapJson {
    pub d1: usize,
    pub d2: usize,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeJson {
    pub d1: usize,
    pub d2: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum Q1VariantJson {
    #[serde(rename = "partial_trace_1")]
    PartialTrace1,
    #[serde(rename = "partial_trace_2")]
    PartialTrace2,
    #[serde(rename = "universal_inverter")]
    UniversalInverter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartiteJson {
    pub bipartite: ShapeJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1_variant: Option<Q1VariantJson>,
}

/// A map file. The variant is recognised by its keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapJson {
    Lorentz(LorentzMapJson),
    Kraus(KrausJson),
    Positive(PositiveMapJson),
    Bipartite(BipartiteJson),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub m: usize,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HermitianJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

/// A point of the domain cone: a Lorentz vector or a hermitian matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointJson {
    Vector(VectorJson),
    Hermitian(HermitianJson),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumOut {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub psd_interval: [f64; 2],
    pub certified: bool,
    pub max_imag_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartOut {
    pub weight: f64,
    pub point: PointJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoofOut {
    pub kind: String,
    pub value: f64,
    pub lambda_used: Option<f64>,
    pub eigenvalues: Option<Vec<f64>>,
    pub decomposition: Option<Vec<PartOut>>,
    pub decomposition_kind: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOut {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictOut {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<VectorJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub rows: usize,
    pub cols: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRowOut {
    pub eigenvalues: [f64; 4],
    pub q1: f64,
    pub q2: f64,
    pub concurrence: f64,
    pub fidelity: f64,
    pub graphs: usize,
    pub example: GraphJson,
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{what} {}: {e}", path.display())))
}

pub fn real_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, what: &str) -> Result<DMatrix<f64>, CliError> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Input(format!("{what} must be {nrows}x{ncols}")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(nrows, ncols, &flat))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// The core map a map file describes.
pub enum Map {
    Lorentz(LorentzMap),
    Positive(PositiveMapH),
    Bipartite(BipartiteShape, Q1Variant),
}

impl MapJson {
    pub fn into_map(self) -> Result<Map, CliError> {
        match self {
            MapJson::Lorentz(l) => {
                let matrix = real_matrix(&l.matrix, l.n, l.m, "map matrix")?;
                Ok(Map::Lorentz(LorentzMap::new(matrix)?))
            }
            MapJson::Kraus(k) => {
                let ops = k
                    .ops
                    .iter()
                    .map(|op| {
                        let re = real_matrix(&op.re, k.d2, k.d1, "Kraus operator")?;
                        let im = real_matrix(&op.im, k.d2, k.d1, "Kraus operator")?;
                        Ok(re.zip_map(&im, Complex64::new))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Ok(Map::Positive(lroof::maps::from_kraus(&KrausMap::new(ops)?)?))
            }
            MapJson::Positive(p) => {
                let matrix = real_matrix(&p.matrix, p.d2 * p.d2, p.d1 * p.d1, "map matrix")?;
                Ok(Map::Positive(PositiveMapH::new(p.d1, p.d2, matrix)?))
            }
            MapJson::Bipartite(b) => {
                let shape = BipartiteShape::new(b.bipartite.d1, b.bipartite.d2)?;
                let variant = match b.q1_variant.unwrap_or(Q1VariantJson::UniversalInverter) {
                    Q1VariantJson::PartialTrace1 => Q1Variant::PartialTrace1,
                    Q1VariantJson::PartialTrace2 => Q1Variant::PartialTrace2,
                    Q1VariantJson::UniversalInverter => Q1Variant::UniversalInverter,
                };
                Ok(Map::Bipartite(shape, variant))
            }
        }
    }
}

impl LorentzMapJson {
    pub fn from_map(u: &LorentzMap) -> Self {
        Self {
            n: u.n(),
            m: u.m(),
            matrix: rows_of(u.matrix()),
        }
    }
}

impl VectorJson {
    pub fn from_vector(x: &LorentzVector) -> Self {
        Self {
            m: x.dim(),
            x: x.as_slice().to_vec(),
        }
    }

    pub fn to_vector(&self) -> Result<LorentzVector, CliError> {
        if self.x.len() != self.m {
            return Err(CliError::Input(format!("vector must have {} entries", self.m)));
        }
        Ok(LorentzVector::new(self.x.clone())?)
    }
}

impl HermitianJson {
    pub fn from_matrix(a: &HermitianMatrix) -> Self {
        Self {
            d: a.dim(),
            re: rows_of(&a.real_part()),
            im: Some(rows_of(&a.imag_part())),
        }
    }

    pub fn to_matrix(&self) -> Result<HermitianMatrix, CliError> {
        let re = real_matrix(&self.re, self.d, self.d, "matrix real part")?;
        let im = match &self.im {
            Some(im) => real_matrix(im, self.d, self.d, "matrix imaginary part")?,
            None => DMatrix::zeros(self.d, self.d),
        };
        Ok(HermitianMatrix::from_parts(&re, &im)?)
    }
}

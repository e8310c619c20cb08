//! JSON wire formats: matrices as separate re/im arrays, vectors, polytopes,
//! and file helpers shared by the CLI and the verification harness.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Facet, Polytope};
use crate::matrix::{C64, CMatrix, MatrixError, SkewHermitian};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("inconsistent matrix data: {0}")]
    BadShape(String),
}

/// `{"n": int, "re": [[...]], "im": [[...]]}`; validated skew-Hermitian on
/// load within 1e-9 and then symmetrized exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_skew(m: &SkewHermitian) -> Self {
        let n = m.dim();
        let mat = m.matrix();
        let re = (0..n)
            .map(|i| (0..n).map(|j| mat[(i, j)].re).collect())
            .collect();
        let im = (0..n)
            .map(|i| (0..n).map(|j| mat[(i, j)].im).collect())
            .collect();
        MatrixJson { n, re, im }
    }

    pub fn to_skew(&self) -> Result<SkewHermitian, IoError> {
        let n = self.n;
        if self.re.len() != n
            || self.im.len() != n
            || self.re.iter().any(|r| r.len() != n)
            || self.im.iter().any(|r| r.len() != n)
        {
            return Err(IoError::BadShape(format!(
                "expected {n}x{n} re/im arrays"
            )));
        }
        let mat = CMatrix::from_fn(n, n, |i, j| C64::new(self.re[i][j], self.im[i][j]));
        Ok(SkewHermitian::new(mat)?)
    }
}

/// A real vector, either bare (`[1, 2, 3]`) or wrapped (`{"v": [1, 2, 3]}`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorJson {
    Bare(Vec<f64>),
    Wrapped { v: Vec<f64> },
}

impl VectorJson {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            VectorJson::Bare(v) => v,
            VectorJson::Wrapped { v } => v,
        }
    }
}

/// `{"dim": n, "hyperplane": "sum-zero"|null, "vertices": [...], "facets": [...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub hyperplane: Option<String>,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default)]
    pub facets: Vec<FacetJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl PolytopeJson {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeJson {
            dim: p.ambient_dim,
            hyperplane: if p.sum_zero {
                Some("sum-zero".into())
            } else {
                None
            },
            vertices: p.vertices.clone(),
            facets: p
                .facets
                .iter()
                .map(|f| FacetJson {
                    normal: f.normal.clone(),
                    offset: f.offset,
                })
                .collect(),
        }
    }

    /// Rebuilds the polytope; facet data is re-derived from the vertices so
    /// loaded files cannot carry inconsistent inequalities.
    pub fn to_polytope(&self) -> Result<Polytope, crate::geometry::GeometryError> {
        Polytope::from_vertices(self.vertices.clone(), self.hyperplane.is_some())
    }

    /// Trusts the stored facets instead of re-deriving them.
    pub fn to_polytope_verbatim(&self) -> Polytope {
        Polytope {
            ambient_dim: self.dim,
            sum_zero: self.hyperplane.is_some(),
            vertices: self.vertices.clone(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: f.offset,
                })
                .collect(),
        }
    }
}

pub fn load_matrix(path: &Path) -> Result<SkewHermitian, IoError> {
    let text = std::fs::read_to_string(path)?;
    let mj: MatrixJson = serde_json::from_str(&text)?;
    mj.to_skew()
}

pub fn save_matrix(path: &Path, m: &SkewHermitian) -> Result<(), IoError> {
    let mj = MatrixJson::from_skew(m);
    std::fs::write(path, serde_json::to_string_pretty(&mj)?)?;
    Ok(())
}

pub fn load_vector(path: &Path) -> Result<Vec<f64>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let vj: VectorJson = serde_json::from_str(&text)?;
    Ok(vj.into_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn matrix_round_trip_is_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let m = SkewHermitian::random(4, &mut rng);
        let json = serde_json::to_string(&MatrixJson::from_skew(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&json).unwrap();
        let m2 = back.to_skew().unwrap();
        assert_eq!(m.sub(&m2).frobenius_norm(), 0.0);
    }

    #[test]
    fn matrix_load_rejects_non_skew() {
        let mj = MatrixJson {
            n: 2,
            re: vec![vec![1.0, 0.0], vec![0.0, 0.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        assert!(mj.to_skew().is_err());
    }

    #[test]
    fn matrix_load_rejects_bad_shape() {
        let mj = MatrixJson {
            n: 2,
            re: vec![vec![0.0, 0.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        assert!(matches!(mj.to_skew(), Err(IoError::BadShape(_))));
    }

    #[test]
    fn vector_accepts_both_shapes() {
        let a: VectorJson = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert_eq!(a.into_vec(), vec![1.0, 2.0]);
        let b: VectorJson = serde_json::from_str(r#"{"v": [3.0]}"#).unwrap();
        assert_eq!(b.into_vec(), vec![3.0]);
    }

    #[test]
    fn polytope_round_trip() {
        let c = crate::gauge::OrbitGaugeSpec::normalized(&[1.0, 0.0, -1.0]).unwrap();
        let p = crate::geometry::orbit_polytope(&c).unwrap();
        let json = serde_json::to_string(&PolytopeJson::from_polytope(&p)).unwrap();
        let back: PolytopeJson = serde_json::from_str(&json).unwrap();
        let p2 = back.to_polytope().unwrap();
        assert_eq!(p.vertices.len(), p2.vertices.len());
        assert_eq!(p.facets.len(), p2.facets.len());
        let verbatim = back.to_polytope_verbatim();
        assert_eq!(verbatim.facets.len(), p.facets.len());
    }
}

//! JSON body files.
//!
//! ```json
//! {"kind":"hpolytope","n":3,"normals":[[1,0,0],...],"offsets":[1,...]}
//! {"kind":"vpolytope","vertices":[[1,1,1],...]}
//! {"kind":"ball","n":3,"radius":1.0}
//! {"kind":"linf","n":3,"s":0.5}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bodies::Ball;
use super::linalg::Vector;
use super::polytope::{HPolytope, Polytope};
use crate::error::{GeomError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BodyFile {
    Hpolytope {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        radius: f64,
    },
    Linf {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        s: f64,
    },
}

/// A validated body loaded from disk.
#[derive(Clone, Debug)]
pub enum LoadedBody {
    Polytope(Polytope),
    Ball(Ball),
}

impl LoadedBody {
    pub fn into_polytope(self) -> Result<Polytope> {
        match self {
            Self::Polytope(p) => Ok(p),
            Self::Ball(_) => Err(GeomError::InvalidInput(
                "operation needs a polytope, file holds a ball".into(),
            )),
        }
    }
}

impl BodyFile {
    pub fn from_polytope(p: &Polytope) -> Self {
        Self::Hpolytope {
            n: Some(p.dim()),
            normals: p
                .normals()
                .iter()
                .map(|u| u.iter().copied().collect())
                .collect(),
            offsets: p.offsets().to_vec(),
        }
    }

    /// Canonicalize and validate.
    pub fn load(&self, default_dim: Option<usize>) -> Result<LoadedBody> {
        let need_dim = |n: &Option<usize>| {
            n.or(default_dim)
                .ok_or_else(|| GeomError::InvalidInput("body file needs a dimension `n`".into()))
        };
        match self {
            Self::Hpolytope {
                n,
                normals,
                offsets,
            } => {
                let raw: Vec<Vector> = normals
                    .iter()
                    .map(|r| Vector::from_column_slice(r))
                    .collect();
                if let Some(n) = n {
                    if let Some(bad) = raw.iter().find(|r| r.len() != *n) {
                        return Err(GeomError::DimensionMismatch {
                            expected: *n,
                            found: bad.len(),
                        });
                    }
                }
                let h = HPolytope::from_raw(&raw, offsets)?;
                Ok(LoadedBody::Polytope(Polytope::from_hrep(&h)?))
            }
            Self::Vpolytope { vertices } => {
                let pts: Vec<Vector> = vertices
                    .iter()
                    .map(|r| Vector::from_column_slice(r))
                    .collect();
                Ok(LoadedBody::Polytope(Polytope::from_points(&pts)?))
            }
            Self::Ball { n, radius } => Ok(LoadedBody::Ball(Ball::new(need_dim(n)?, *radius)?)),
            Self::Linf { n, s } => {
                if !(*s > 0.0) {
                    return Err(GeomError::InvalidInput(
                        "linf half width must be positive".into(),
                    ));
                }
                Ok(LoadedBody::Polytope(Polytope::cube(need_dim(n)?, *s)?))
            }
        }
    }
}

pub fn read_body(path: &Path, default_dim: Option<usize>) -> Result<LoadedBody> {
    let text = std::fs::read_to_string(path)?;
    let file: BodyFile = serde_json::from_str(&text)?;
    file.load(default_dim)
}

pub fn write_body(path: &Path, p: &Polytope) -> Result<()> {
    let text = serde_json::to_string_pretty(&BodyFile::from_polytope(p))?;
    std::fs::write(path, text)?;
    Ok(())
}

//! Matrix JSON: `{"field", "rows", "cols", "data"}` with row-major `data`
//! holding plain numbers (real) or `[re, im]` pairs (complex).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::projection::{Projection, ScalarField, TOL_PROJ};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: ScalarField,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Entry>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat, field: ScalarField) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = m[(i, j)];
                data.push(match field {
                    ScalarField::Real => Entry::Real(z.re),
                    ScalarField::Complex => Entry::Complex([z.re, z.im]),
                });
            }
        }
        MatrixJson { field, rows, cols, data }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Json(format!(
                "data has {} entries, expected {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let mut m = CMat::zeros(self.rows, self.cols);
        for (idx, entry) in self.data.iter().enumerate() {
            let z = match (self.field, entry) {
                (_, Entry::Real(x)) => C64::new(*x, 0.0),
                (ScalarField::Complex, Entry::Complex([re, im])) => C64::new(*re, *im),
                (ScalarField::Real, Entry::Complex(_)) => {
                    return Err(Error::Json(format!(
                        "entry {idx} is a complex pair in a real matrix"
                    )))
                }
            };
            m[(idx / self.cols, idx % self.cols)] = z;
        }
        Ok(m)
    }
}

pub fn projection_to_json(p: &Projection) -> MatrixJson {
    MatrixJson::from_matrix(p.matrix(), p.field())
}

pub fn projection_from_json(j: &MatrixJson, tol: f64) -> Result<Projection> {
    Projection::validate(j.to_matrix()?, j.field, tol)
}

pub fn parse_matrix(text: &str) -> Result<MatrixJson> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_projection(text: &str) -> Result<Projection> {
    projection_from_json(&parse_matrix(text)?, TOL_PROJ)
}

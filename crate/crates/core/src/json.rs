//! Shared JSON schema: matrices are arrays of rows of `[re, im]` pairs and
//! legs are `[{name, dim}, …]`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::qmat::{CMatrix, Leg, LeggedOperator, C64};

/// JSON form of a complex square matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }

    /// Converts to a square matrix; `field` names the location for error messages.
    pub fn to_matrix(&self, field: &str) -> Result<CMatrix> {
        let n = self.0.len();
        if n == 0 {
            return Err(Error::schema(field, "matrix has no rows"));
        }
        for (i, row) in self.0.iter().enumerate() {
            if row.len() != n {
                return Err(Error::schema(
                    format!("{field}[{i}]"),
                    format!("row has {} entries, expected {n}", row.len()),
                ));
            }
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.0[i][j];
            C64::new(re, im)
        }))
    }
}

/// JSON form of a [`LeggedOperator`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub legs: Vec<Leg>,
    pub data: MatrixJson,
}

impl OperatorJson {
    pub fn from_operator(op: &LeggedOperator) -> Self {
        Self {
            legs: op.legs().to_vec(),
            data: MatrixJson::from_matrix(op.data()),
        }
    }

    pub fn to_operator(&self, field: &str) -> Result<LeggedOperator> {
        let data = self.data.to_matrix(&format!("{field}.data"))?;
        LeggedOperator::new(self.legs.clone(), data)
            .map_err(|e| Error::schema(format!("{field}.legs"), e.to_string()))
    }
}

/// Deserializes a sub-field of a JSON object, reporting the field name on failure.
pub(crate) fn field<T: serde::de::DeserializeOwned>(obj: &Value, name: &str) -> Result<T> {
    let v = obj
        .get(name)
        .ok_or_else(|| Error::schema(name, "missing field"))?;
    serde_json::from_value(v.clone()).map_err(|e| Error::schema(name, e.to_string()))
}

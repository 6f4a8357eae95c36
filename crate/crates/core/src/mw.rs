//! Mordell-Weil lattice coordinates: integer vectors in a fixed generating
//! set, endomorphism action, and base changes.

use crate::error::{Error, Result};

/// A point of J(Z) in coordinates of the fixed generators G_1, ..., G_r'.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MWVector(pub Vec<i64>);

impl MWVector {
    pub fn zero(len: usize) -> MWVector {
        MWVector(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &MWVector) -> MWVector {
        MWVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: i64) -> MWVector {
        MWVector(self.0.iter().map(|a| a * c).collect())
    }
}

/// An endomorphism of the Jacobian in Mordell-Weil coordinates, plus the
/// rigidifying point and the exponent constant.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct EndoData {
    /// column j is the coordinate vector of f(G_j)
    pub mw_matrix: Vec<Vec<i64>>,
    /// the rigidifying point c
    pub c: MWVector,
    /// lcm of the component-group exponents
    pub m: i64,
    /// optional action on 1-forms; its trace must vanish
    pub differential_matrix: Option<Vec<Vec<i64>>>,
}

impl EndoData {
    pub fn dim(&self) -> usize {
        self.mw_matrix.len()
    }

    /// Trace-zero metadata check against the differential matrix.
    pub fn check_trace_zero(&self) -> Result<()> {
        if let Some(dm) = &self.differential_matrix {
            let tr: i64 = dm.iter().enumerate().map(|(i, row)| row[i]).sum();
            if tr != 0 {
                return Err(Error::InvariantViolation(format!(
                    "differential matrix has trace {tr}, expected 0"
                )));
            }
        }
        Ok(())
    }
}

/// Matrix-vector product over Z: the image of `v` under the endomorphism.
pub fn mw_apply_endo(e: &EndoData, v: &MWVector) -> Result<MWVector> {
    let n = e.dim();
    if v.len() != n || e.mw_matrix.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "endomorphism is {n}x{n}, vector has length {}",
            v.len()
        )));
    }
    let mut out = vec![0i64; n];
    for (i, item) in out.iter_mut().enumerate() {
        *item = (0..n).map(|j| e.mw_matrix[i][j] * v.0[j]).sum();
    }
    Ok(MWVector(out))
}

/// Express a vector given in the kernel-of-reduction basis in generator
/// coordinates: v -> sum_i v_i * e_i where e_i is row i of `e`.
pub fn mw_change_basis(e: &[Vec<i64>], v: &MWVector) -> MWVector {
    let cols = e.first().map(|r| r.len()).unwrap_or(0);
    let mut out = vec![0i64; cols];
    for (vi, row) in v.0.iter().zip(e) {
        for (o, c) in out.iter_mut().zip(row) {
            *o += vi * c;
        }
    }
    MWVector(out)
}

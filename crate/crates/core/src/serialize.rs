//! `serialize_with` helpers. Complex numbers are `[re, im]` pairs and
//! matrices are row-major nested arrays of pairs.

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::linalg::{CMatrix, CVector, C64};
use crate::quantum::HermitianOperator;

pub fn complex<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

pub fn opt_complex<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
    match z {
        Some(z) => complex(z, s),
        None => s.serialize_none(),
    }
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn vector_entries(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}

pub fn hermitian<S: Serializer>(a: &HermitianOperator, s: S) -> Result<S::Ok, S::Error> {
    matrix(a.matrix(), s)
}

/// Basis vectors (matrix columns) as a list of vectors.
pub fn columns<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let cols: Vec<Vec<[f64; 2]>> = m
        .column_iter()
        .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
        .collect();
    cols.serialize(s)
}

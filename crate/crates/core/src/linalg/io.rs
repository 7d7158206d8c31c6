//! JSON matrix documents: `{"rows": r, "cols": c, "entries": [[re, im], ...]}`.
//!
//! Entries are row-major. Extra top-level fields (for example a provenance
//! `header` object) are ignored on read.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    header: Option<serde_json::Value>,
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

pub fn parse_matrix<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix document: {e}")))?;
    if let Some(k) = doc.entries.iter().position(|[re, im]| !(re.is_finite() && im.is_finite())) {
        return Err(Error::Parse(format!("entry {k} is not finite")));
    }
    let data = doc.entries.iter().map(|&[re, im]| Complex::new(T::of(re), T::of(im))).collect();
    ComplexMatrix::new(doc.rows, doc.cols, data)
}

/// Serialises `m`, optionally embedding a `header` object ahead of the data.
pub fn format_matrix<T: Real>(m: &ComplexMatrix<T>, header: Option<serde_json::Value>) -> String {
    let doc = MatrixDoc {
        header,
        rows: m.rows(),
        cols: m.cols(),
        entries: m.as_slice().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("matrix document serialises")
}

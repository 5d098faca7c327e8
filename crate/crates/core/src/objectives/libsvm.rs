//! LIBSVM / svmlight text format.
//!
//! Each non-empty line is `<label> <index>:<value> ...` with strictly
//! increasing 1-based indices. Anything after `#` is a comment. Labels
//! `-1`/`+1` map to 0/1; `0`/`1` pass through.

use std::fs;
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// Sparse labelled rows in compressed-row form. Feature indices are 0-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    dim: usize,
    row_ptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    /// Builds a dataset from dense rows; mostly useful in tests.
    pub fn from_dense(rows: &[Vec<f64>], labels: &[u8]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(invalid("row and label counts differ"));
        }
        let dim = rows.first().map_or(0, Vec::len);
        let mut ds = Dataset {
            dim,
            row_ptr: vec![0],
            ..Default::default()
        };
        for (row, &label) in rows.iter().zip(labels) {
            if row.len() != dim {
                return Err(invalid("ragged dense rows"));
            }
            if label > 1 {
                return Err(invalid("labels must be 0 or 1"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    ds.indices.push(j as u32);
                    ds.values.push(v);
                }
            }
            ds.row_ptr.push(ds.indices.len());
            ds.labels.push(label);
        }
        Ok(ds)
    }

    /// Number of features `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows `M`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Sparse entries `(0-based index, value)` of row `j`.
    pub fn row(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[j]..self.row_ptr[j + 1];
        self.indices[span.clone()]
            .iter()
            .zip(&self.values[span])
            .map(|(&i, &v)| (i as usize, v))
    }

    pub(crate) fn row_dot(&self, j: usize, x: &[f64]) -> f64 {
        self.row(j).map(|(i, v)| v * x[i]).sum()
    }

    pub(crate) fn add_row_scaled(&self, j: usize, scale: f64, out: &mut [f64]) {
        for (i, v) in self.row(j) {
            out[i] += scale * v;
        }
    }
}

/// Parses LIBSVM text. With `dim_override`, `d` is fixed to that value and
/// indices above it are rejected; otherwise `d` is the largest index seen.
pub fn parse_libsvm(text: &str, dim_override: Option<usize>) -> Result<Dataset> {
    let mut ds = Dataset {
        row_ptr: vec![0],
        ..Default::default()
    };
    let mut max_index = 0usize;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label = parse_label(label_tok).ok_or_else(|| err(format!("bad label {label_tok:?}")))?;

        let mut prev = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("malformed feature {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(format!("bad feature index in {tok:?}")))?;
            if idx < 1 {
                return Err(err(format!("feature index must be >= 1 in {tok:?}")));
            }
            if idx <= prev {
                return Err(err(format!(
                    "feature indices must be strictly increasing ({idx} after {prev})"
                )));
            }
            if let Some(d) = dim_override {
                if idx > d {
                    return Err(err(format!("feature index {idx} exceeds dimension {d}")));
                }
            }
            let val: f64 = val
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| err(format!("bad feature value in {tok:?}")))?;
            prev = idx;
            if val != 0.0 {
                ds.indices.push((idx - 1) as u32);
                ds.values.push(val);
            }
        }
        max_index = max_index.max(prev);
        ds.row_ptr.push(ds.indices.len());
        ds.labels.push(label);
    }

    ds.dim = dim_override.unwrap_or(max_index);
    Ok(ds)
}

/// Reads and parses a LIBSVM file.
pub fn read_libsvm(path: impl AsRef<Path>, dim_override: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_libsvm(&text, dim_override)
}

fn parse_label(tok: &str) -> Option<u8> {
    let v: f64 = tok.parse().ok()?;
    if v == 1.0 {
        Some(1)
    } else if v == -1.0 || v == 0.0 {
        Some(0)
    } else {
        None
    }
}

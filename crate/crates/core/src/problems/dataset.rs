//! Binary-labelled sparse datasets and the LIBSVM text format.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng;
use crate::vecops;
use rand::Rng;
use std::fmt::Write as _;

/// `n` sparse rows over dimension `dim` with labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub dim: usize,
    /// `(0-based index, value)` pairs per row.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().map(|(j, v)| v * x[*j]).sum()
    }

    /// `out ← out + alpha·A_i`
    pub fn row_axpy(&self, i: usize, alpha: f64, out: &mut [f64]) {
        for (j, v) in &self.rows[i] {
            out[*j] += alpha * v;
        }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.len(), self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                m[(i, *j)] += v;
            }
        }
        m
    }
}

/// Parses LIBSVM text: one `label idx:val idx:val …` record per line,
/// 1-based indices. Blank lines and `#` comments are skipped.
///
/// Labels are normalised to ±1: `{0,1}` maps 0 to −1, `{−1,+1}` passes
/// through, and any other pair maps the smaller value to −1.
pub fn parse_libsvm(text: &str) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    let mut dim = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: lineno + 1, msg };
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| perr(format!("bad label {label_tok:?}")))?;
        if !label.is_finite() {
            return Err(perr(format!("bad label {label_tok:?}")));
        }
        let mut row = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| perr(format!("expected idx:val, got {tok:?}")))?;
            let idx: usize = idx.parse().map_err(|_| perr(format!("bad index in {tok:?}")))?;
            if idx == 0 {
                return Err(perr("indices are 1-based".into()));
            }
            let val: f64 = val.parse().map_err(|_| perr(format!("bad value in {tok:?}")))?;
            if !val.is_finite() {
                return Err(perr(format!("non-finite value in {tok:?}")));
            }
            dim = dim.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
        raw_labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::NoObservations);
    }
    let labels = normalize_labels(&raw_labels)?;
    Ok(Dataset {
        name: String::new(),
        dim,
        rows,
        labels,
    })
}

fn normalize_labels(raw: &[f64]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = raw.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() > 2 {
        return Err(Error::NotBinary(distinct.len()));
    }
    let subset_of = |set: &[f64]| distinct.iter().all(|v| set.contains(v));
    let map: Box<dyn Fn(f64) -> f64> = if subset_of(&[-1.0, 1.0]) {
        Box::new(|v| v)
    } else if subset_of(&[0.0, 1.0]) {
        Box::new(|v| if v == 0.0 { -1.0 } else { 1.0 })
    } else if distinct.len() == 2 {
        let lo = distinct[0];
        Box::new(move |v| if v == lo { -1.0 } else { 1.0 })
    } else {
        Box::new(|v| if v > 0.0 { 1.0 } else { -1.0 })
    };
    Ok(raw.iter().map(|&v| map(v)).collect())
}

/// Inverse of [`parse_libsvm`] for normalised datasets.
pub fn serialize_libsvm(data: &Dataset) -> String {
    let mut out = String::new();
    for (row, label) in data.rows.iter().zip(&data.labels) {
        out.push_str(if *label > 0.0 { "+1" } else { "-1" });
        for (j, v) in row {
            let _ = write!(out, " {}:{}", j + 1, v);
        }
        out.push('\n');
    }
    out
}

/// Sparse synthetic classification data: each entry is nonzero with
/// probability `density`, labels follow a planted linear separator with 10%
/// flips. The last feature of row 0 is always set so `dim` survives a
/// LIBSVM round trip.
pub fn synthetic_dataset(n: usize, d: usize, density: f64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let w = rng::gaussian_vec(&mut r, d);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::new();
        for j in 0..d {
            if r.random::<f64>() < density || (i == 0 && j == d - 1) {
                let v = (r.random::<f64>() * 2.0 - 1.0) * 1e3;
                row.push((j, v.round() / 1e3));
            }
        }
        let mut dense = vec![0.0; d];
        row.iter().for_each(|(j, v)| dense[*j] = *v);
        let margin = vecops::dot(&w, &dense);
        let flip = r.random::<f64>() < 0.1;
        labels.push(if (margin >= 0.0) != flip { 1.0 } else { -1.0 });
        rows.push(row);
    }
    Dataset {
        name: format!("synthetic-{n}x{d}"),
        dim: d,
        rows,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_signed_labels() {
        let d = parse_libsvm("+1 1:0.5 3:2\n-1 2:1\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim, 3);
        let dense = d.to_dense();
        assert_eq!(dense.row(0), &[0.5, 0.0, 2.0]);
        assert_eq!(dense.row(1), &[0.0, 1.0, 0.0]);
        assert_eq!(d.labels, vec![1.0, -1.0]);
    }

    #[test]
    fn maps_zero_one_labels() {
        let d = parse_libsvm("0 1:1\n1 1:2\n").unwrap();
        assert_eq!(d.labels, vec![-1.0, 1.0]);
    }

    #[test]
    fn maps_arbitrary_pair() {
        let d = parse_libsvm("2 1:1\n4 1:2\n2 1:3\n").unwrap();
        assert_eq!(d.labels, vec![-1.0, 1.0, -1.0]);
    }

    #[test]
    fn empty_stream_has_no_observations() {
        assert_eq!(parse_libsvm("").unwrap_err(), Error::NoObservations);
        assert_eq!(parse_libsvm("\n# only a comment\n").unwrap_err(), Error::NoObservations);
    }

    #[test]
    fn malformed_token_reports_line() {
        match parse_libsvm("+1 1:1\n-1 2-3\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_libsvm("+1 0:1\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn three_labels_are_not_binary() {
        assert_eq!(parse_libsvm("1 1:1\n2 1:1\n3 1:1\n").unwrap_err(), Error::NotBinary(3));
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(n in 1usize..30, d in 1usize..15, seed in any::<u64>()) {
            let data = synthetic_dataset(n, d, 0.4, seed);
            let mut back = parse_libsvm(&serialize_libsvm(&data)).unwrap();
            back.name = data.name.clone();
            prop_assert_eq!(back, data);
        }
    }
}

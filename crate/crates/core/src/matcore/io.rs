//! Matrix file format: `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major,
//! numbers written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

#[derive(Deserialize)]
struct MatrixFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    let check = |rows: &Vec<Vec<f64>>, part: &str| -> Result<()> {
        if rows.len() != file.dim || rows.iter().any(|r| r.len() != file.dim) {
            return Err(Error::invalid(format!(
                "matrix file: `{part}` is not {0}x{0}",
                file.dim
            )));
        }
        Ok(())
    };
    check(&file.re, "re")?;
    check(&file.im, "im")?;
    let rows: Vec<Vec<Complex64>> = file
        .re
        .iter()
        .zip(&file.im)
        .map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

fn fmt_number(x: f64) -> String {
    // Normalise -0 so output is byte-stable.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let n = m.dim();
    let part = |f: &dyn Fn(Complex64) -> f64| {
        let mut s = String::from("[\n");
        for i in 0..n {
            s.push_str("    [");
            for j in 0..n {
                if j > 0 {
                    s.push_str(", ");
                }
                s.push_str(&fmt_number(f(m.get(i, j))));
            }
            s.push(']');
            if i + 1 < n {
                s.push(',');
            }
            s.push('\n');
        }
        s.push_str("  ]");
        s
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\n  \"dim\": {n},\n  \"re\": {},\n  \"im\": {}\n}}\n",
        part(&|z| z.re),
        part(&|z| z.im)
    );
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_wrong_shape() {
        let text = r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#;
        assert!(matrix_from_json(text).is_err());
    }

    #[test]
    fn writes_seventeen_significant_digits() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.1]]).unwrap();
        let text = matrix_to_json(&m);
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
    }

    proptest! {
        #[test]
        fn json_round_trip_is_exact(vals in prop::collection::vec(-1e3f64..1e3, 18)) {
            let m = ComplexMatrix::from_fn(3, |i, j| Complex64::new(vals[3 * i + j], vals[9 + 3 * i + j]));
            let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}

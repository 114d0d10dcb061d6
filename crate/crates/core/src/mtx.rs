//! Matrix Market I/O for dense matrices.
//!
//! Reads `coordinate` and `array` layouts with `real`, `integer` or
//! `complex` fields and `general`, `symmetric`, `hermitian` or
//! `skew-symmetric` symmetry. Writes the `array` layout.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::MatrixMarket(msg.into())
}

fn parse_header(line: &str) -> Result<(Layout, Field, Symmetry)> {
    let lower = line.to_ascii_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(bad(format!("unrecognised header: {line}")));
    }
    let layout = match words[2] {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(bad(format!("unsupported layout {other}"))),
    };
    let field = match words[3] {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(bad(format!("unsupported field {other}"))),
    };
    let symmetry = match words[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(bad(format!("unsupported symmetry {other}"))),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        log::debug!("hermitian flag on a real matrix treated as symmetric");
    }
    Ok((layout, field, symmetry))
}

fn parse_num(tok: Option<&str>, what: &str) -> Result<f64> {
    tok.ok_or_else(|| bad(format!("missing {what}")))?
        .parse::<f64>()
        .map_err(|e| bad(format!("bad {what}: {e}")))
}

fn parse_index(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| bad(format!("missing {what}")))?
        .parse::<usize>()
        .map_err(|e| bad(format!("bad {what}: {e}")))
}

/// Parse Matrix Market text into a dense matrix.
///
/// A complex file read into a real type is accepted only if every imaginary
/// part is zero.
pub fn parse<T: Scalar>(text: &str) -> Result<DMatrix<T>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let (layout, field, symmetry) = parse_header(header)?;
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size = body.next().ok_or_else(|| bad("missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows = parse_index(toks.next(), "row count")?;
    let cols = parse_index(toks.next(), "column count")?;
    if symmetry != Symmetry::General && rows != cols {
        return Err(bad("symmetric storage requires a square matrix"));
    }
    let mut m = DMatrix::<T>::zeros(rows, cols);

    let read_value = |toks: &mut std::str::SplitWhitespace<'_>| -> Result<T> {
        let re = parse_num(toks.next(), "value")?;
        let im = if field == Field::Complex {
            parse_num(toks.next(), "imaginary part")?
        } else {
            0.0
        };
        if im != 0.0 && !T::IS_COMPLEX {
            return Err(bad("complex entry in a matrix read as real"));
        }
        Ok(T::from_parts(re, im))
    };
    let mirror = |m: &mut DMatrix<T>, i: usize, j: usize, v: T| {
        m[(i, j)] = v;
        if i != j {
            m[(j, i)] = match symmetry {
                Symmetry::General => return,
                Symmetry::Symmetric => v,
                Symmetry::Hermitian => v.conjugate(),
                Symmetry::Skew => -v,
            };
        }
    };

    match layout {
        Layout::Coordinate => {
            let nnz = parse_index(toks.next(), "entry count")?;
            for n in 0..nnz {
                let line = body.next().ok_or_else(|| bad(format!("expected {nnz} entries, found {n}")))?;
                let mut t = line.split_whitespace();
                let i = parse_index(t.next(), "row index")?;
                let j = parse_index(t.next(), "column index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(bad(format!("entry ({i}, {j}) out of range")));
                }
                let v = read_value(&mut t)?;
                mirror(&mut m, i - 1, j - 1, v);
            }
        }
        Layout::Array => {
            // Column-major; symmetric storage lists the lower triangle only.
            for j in 0..cols {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Skew => j + 1,
                    _ => j,
                };
                for i in start..rows {
                    let line = body.next().ok_or_else(|| bad("array data ended early"))?;
                    let v = read_value(&mut line.split_whitespace())?;
                    mirror(&mut m, i, j, v);
                }
            }
        }
    }
    Ok(m)
}

pub fn read<T: Scalar>(path: impl AsRef<Path>) -> Result<DMatrix<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse(&text).map_err(|e| match e {
        Error::MatrixMarket(msg) => Error::MatrixMarket(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Whether the file declares a complex field (only the header is read).
pub fn is_complex(path: impl AsRef<Path>) -> Result<bool> {
    use std::io::BufRead;
    let file = fs::File::open(path.as_ref())?;
    let mut header = String::new();
    std::io::BufReader::new(file).read_line(&mut header)?;
    Ok(parse_header(header.trim_end())?.1 == Field::Complex)
}

/// Dense `array general` text with 17 significant digits.
pub fn format<T: Scalar>(m: &DMatrix<T>) -> String {
    let field = if T::IS_COMPLEX { "complex" } else { "real" };
    let mut out = format!("%%MatrixMarket matrix array {field} general\n{} {}\n", m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if T::IS_COMPLEX {
                let _ = writeln!(out, "{:.16e} {:.16e}", v.real(), v.imaginary());
            } else {
                let _ = writeln!(out, "{:.16e}", v.real());
            }
        }
    }
    out
}

pub fn write<T: Scalar>(path: impl AsRef<Path>, m: &DMatrix<T>) -> Result<()> {
    fs::write(path, format(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn coordinate_symmetric() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 1.0\n2 1 0.5\n";
        let m: DMatrix<f64> = parse(text).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.0]));
    }

    #[test]
    fn coordinate_hermitian_complex() {
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 2 0\n2 1 0 1\n";
        let m: DMatrix<Complex64> = parse(text).unwrap();
        assert_eq!(m[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, -1.0));
        assert!(parse::<f64>(text).is_err());
    }

    #[test]
    fn array_layouts() {
        let general = "%%MatrixMarket matrix array integer general\n2 2\n1\n2\n3\n4\n";
        let m: DMatrix<f64> = parse(general).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 2.0, 4.0]));
        let skew = "%%MatrixMarket matrix array real skew-symmetric\n2 2\n5\n";
        let s: DMatrix<f64> = parse(skew).unwrap();
        assert_eq!(s, DMatrix::from_row_slice(2, 2, &[0.0, -5.0, 5.0, 0.0]));
    }

    #[test]
    fn round_trip_is_exact() {
        let m = DMatrix::from_fn(3, 4, |i, j| (i as f64 + 1.0) / (j as f64 + 3.0) - 0.1);
        let back: DMatrix<f64> = parse(&format(&m)).unwrap();
        assert_eq!(back, m);
        let c = DMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 / 3.0, j as f64 / 7.0));
        let back: DMatrix<Complex64> = parse(&format(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse::<f64>("").is_err());
        assert!(parse::<f64>("%%MatrixMarket matrix coordinate pattern general\n1 1 0\n").is_err());
        assert!(parse::<f64>("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").is_err());
        assert!(parse::<f64>("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n").is_err());
    }
}

//! Matrix Market reader and writer.

use crate::error::{NepError, Result};
use crate::linalg::dense::C64;
use crate::linalg::sparse::CsrMatrix;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn perr(line: usize, msg: impl Into<String>) -> NepError {
    NepError::Parse { line, msg: msg.into() }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let text = std::fs::read_to_string(path)?;
    read_matrix_market_str(&text)
}

pub fn read_matrix_market_str(text: &str) -> Result<CsrMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let h: Vec<String> = header.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" {
        return Err(perr(hl, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let coordinate = match h[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(perr(hl, format!("unknown format '{f}'"))),
    };
    let field = match h[3].as_str() {
        "real" | "double" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" if coordinate => Field::Pattern,
        f => return Err(perr(hl, format!("unsupported field '{f}'"))),
    };
    let sym = match h[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        s => return Err(perr(hl, format!("unknown symmetry '{s}'"))),
    };
    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sl, size) = data.next().ok_or_else(|| perr(hl + 1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| perr(sl, format!("bad size entry '{t}'"))))
        .collect::<Result<_>>()?;
    let (m, n) = match (coordinate, dims.as_slice()) {
        (true, [m, n, _]) | (false, [m, n]) => (*m, *n),
        _ => return Err(perr(sl, "wrong number of size entries")),
    };
    if sym != Symmetry::General && m != n {
        return Err(perr(sl, "symmetric storage requires a square matrix"));
    }
    let parse_value = |line: usize, toks: &[&str]| -> Result<C64> {
        let num = |t: &str| t.parse::<f64>().map_err(|_| perr(line, format!("bad number '{t}'")));
        match field {
            Field::Pattern => Ok(C64::new(1.0, 0.0)),
            Field::Complex => {
                if toks.len() != 2 {
                    return Err(perr(line, "complex entry needs two numbers"));
                }
                Ok(C64::new(num(toks[0])?, num(toks[1])?))
            }
            _ => {
                if toks.len() != 1 {
                    return Err(perr(line, "expected one value"));
                }
                Ok(C64::new(num(toks[0])?, 0.0))
            }
        }
    };
    let mut trip = Vec::new();
    let mut push = |i: usize, j: usize, v: C64| {
        trip.push((i, j, v));
        if i != j {
            match sym {
                Symmetry::General => {}
                Symmetry::Symmetric => trip.push((j, i, v)),
                Symmetry::Hermitian => trip.push((j, i, v.conj())),
                Symmetry::Skew => trip.push((j, i, -v)),
            }
        }
    };
    if coordinate {
        let nnz = dims[2];
        for e in 0..nnz {
            let (ln, l) = data.next().ok_or_else(|| perr(sl + 1, format!("expected {nnz} entries, found {e}")))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(perr(ln, "entry needs row and column"));
            }
            let idx = |t: &str| t.parse::<usize>().map_err(|_| perr(ln, format!("bad index '{t}'")));
            let (i, j) = (idx(toks[0])?, idx(toks[1])?);
            if i == 0 || j == 0 || i > m || j > n {
                return Err(perr(ln, format!("index ({i},{j}) outside {m}x{n}")));
            }
            push(i - 1, j - 1, parse_value(ln, &toks[2..])?);
        }
    } else {
        // column major; symmetric variants store the lower triangle
        for j in 0..n {
            let start = if sym == Symmetry::General { 0 } else if sym == Symmetry::Skew { j + 1 } else { j };
            for i in start..m {
                let (ln, l) = data.next().ok_or_else(|| perr(sl + 1, "too few array entries"))?;
                let toks: Vec<&str> = l.split_whitespace().collect();
                let v = parse_value(ln, &toks)?;
                if v != C64::new(0.0, 0.0) {
                    push(i, j, v);
                }
            }
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(perr(ln, "unexpected trailing data"));
    }
    CsrMatrix::from_triplets(m, n, &trip)
}

/// Writes coordinate general format, real when every entry is real.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    let real = a.data().iter().all(|z| z.im == 0.0);
    let mut s = String::new();
    let field = if real { "real" } else { "complex" };
    writeln!(s, "%%MatrixMarket matrix coordinate {field} general").unwrap();
    writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz()).unwrap();
    for i in 0..a.nrows() {
        for (j, v) in a.row(i) {
            if real {
                writeln!(s, "{} {} {:e}", i + 1, j + 1, v.re).unwrap();
            } else {
                writeln!(s, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im).unwrap();
            }
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

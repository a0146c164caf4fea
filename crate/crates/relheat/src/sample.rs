//! Kernel sample records and their CSV serialization.
//!
//! The CSV schema is `t,x1,x2,y1,y2,re,im,err,method` with one header row.
//! Floats are written in Rust's shortest-roundtrip form, so re-reading a
//! file reproduces the in-memory values bit for bit.

use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv row {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Evaluation route that produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    AbClosed,
    AbQuadrature,
    SolverSubordination,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AbClosed => "ab-closed",
            Method::AbQuadrature => "ab-quadrature",
            Method::SolverSubordination => "solver+subordination",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "ab-closed" => Some(Method::AbClosed),
            "ab-quadrature" => Some(Method::AbQuadrature),
            "solver+subordination" => Some(Method::SolverSubordination),
            _ => None,
        }
    }
}

/// One kernel value at `(x, y, t)` with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub t: f64,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub re: f64,
    pub im: f64,
    pub err: f64,
    pub method: Method,
}

impl KernelSample {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

pub const CSV_HEADER: &str = "t,x1,x2,y1,y2,re,im,err,method";

pub fn write_csv<W: Write>(w: &mut W, samples: &[KernelSample]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            s.t, s.x[0], s.x[1], s.y[0], s.y[1], s.re, s.im, s.err,
            s.method.as_str()
        )?;
    }
    Ok(())
}

pub fn csv_string(samples: &[KernelSample]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, samples).expect("write to Vec cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<KernelSample>, CsvError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if i == 0 {
            if line.trim() != CSV_HEADER {
                return Err(CsvError::Malformed { line: lineno, msg: format!("bad header `{line}`") });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(CsvError::Malformed {
                line: lineno,
                msg: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let num = |idx: usize| -> Result<f64, CsvError> {
            fields[idx].trim().parse::<f64>().map_err(|e| CsvError::Malformed {
                line: lineno,
                msg: format!("field {}: {e}", idx + 1),
            })
        };
        let method = Method::parse(fields[8].trim()).ok_or_else(|| CsvError::Malformed {
            line: lineno,
            msg: format!("unknown method `{}`", fields[8]),
        })?;
        out.push(KernelSample {
            t: num(0)?,
            x: [num(1)?, num(2)?],
            y: [num(3)?, num(4)?],
            re: num(5)?,
            im: num(6)?,
            err: num(7)?,
            method,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> KernelSample {
        KernelSample {
            t: 1.5,
            x: [0.1, -0.2],
            y: [0.3, 0.4],
            re: 0.159_154_943_091_895_35,
            im: -3.7e-17,
            err: 1e-10,
            method: Method::AbClosed,
        }
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let original = vec![
            sample(),
            KernelSample { t: 2.0, method: Method::SolverSubordination, ..sample() },
        ];
        let text = csv_string(&original);
        let parsed = read_csv(text.as_bytes()).unwrap();
        assert_eq!(original, parsed);
        assert!(original.iter().zip(parsed.iter()).all(|(a, b)| a.re.to_bits() == b.re.to_bits()));
    }

    #[test]
    fn malformed_rows_are_located() {
        let text = "t,x1,x2,y1,y2,re,im,err,method\n1,0,0,0,0,0.1,0,1e-9,ab-closed\n1,0,0,0,0,zzz,0,1e-9,ab-closed\n";
        let err = read_csv(text.as_bytes()).unwrap_err();
        match err {
            CsvError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
        let bad_header = read_csv("a,b\n".as_bytes()).unwrap_err();
        assert!(matches!(bad_header, CsvError::Malformed { line: 1, .. }));
    }
}

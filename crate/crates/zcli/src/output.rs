//! Number formatting and CSV writing.

use std::io::{self, Write};

/// Ten significant digits in scientific notation.
///
/// ```
/// assert_eq!(zcli::output::sig10(0.98949574), "9.894957400e-1");
/// ```
pub fn sig10(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        format!("{x}")
    }
}

/// The IEEE-754 bit pattern of `x`, for exact comparison between runs.
///
/// ```
/// assert_eq!(zcli::output::hex(1.0), "0x3ff0000000000000");
/// ```
pub fn hex(x: f64) -> String {
    format!("{:#018x}", x.to_bits())
}

/// Quotes a CSV field when it contains a delimiter, quote or line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A CSV writer whose every row starts with the run id.
pub struct CsvWriter<W: Write> {
    out: W,
    run_id: String,
    columns: usize,
}

/// A value in a CSV row.
pub enum Cell {
    Text(String),
    Int(u64),
    /// Written as two columns: ten significant digits, then the bit pattern.
    Real(f64),
    Flag(bool),
}

impl<W: Write> CsvWriter<W> {
    /// Writes the header. A column flagged as real expands to `x` and
    /// `x_hex`, matching the two fields written for a [`Cell::Real`].
    pub fn new(mut out: W, run_id: &str, header: &[(&str, bool)]) -> io::Result<Self> {
        let mut names = vec!["run_id".to_string()];
        for &(h, real) in header {
            names.push(h.to_string());
            if real {
                names.push(format!("{h}_hex"));
            }
        }
        writeln!(out, "{}", names.iter().map(|s| csv_field(s)).collect::<Vec<_>>().join(","))?;
        Ok(CsvWriter { out, run_id: run_id.to_string(), columns: names.len() })
    }

    pub fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        let mut f = vec![csv_field(&self.run_id)];
        for c in cells {
            match c {
                Cell::Text(s) => f.push(csv_field(s)),
                Cell::Int(n) => f.push(n.to_string()),
                Cell::Real(x) => {
                    f.push(sig10(*x));
                    f.push(hex(*x));
                }
                Cell::Flag(b) => f.push(b.to_string()),
            }
        }
        debug_assert_eq!(f.len(), self.columns);
        writeln!(self.out, "{}", f.join(","))
    }

    /// A free-form row, padded to the header width.
    pub fn raw_row(&mut self, fields: &[String]) -> io::Result<()> {
        let mut f = vec![csv_field(&self.run_id)];
        f.extend(fields.iter().map(|s| csv_field(s)));
        while f.len() < self.columns {
            f.push(String::new());
        }
        writeln!(self.out, "{}", f.join(","))
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn rows_carry_run_id_and_hex() {
        let mut w = CsvWriter::new(Vec::new(), "r1", &[("n", false), ("x", true)]).unwrap();
        w.row(&[Cell::Int(3), Cell::Real(0.5)]).unwrap();
        let s = String::from_utf8(w.into_inner()).unwrap();
        assert_eq!(s, "run_id,n,x,x_hex\nr1,3,5.000000000e-1,0x3fe0000000000000\n");
    }
}

//! Base matrices of circulant-1 QC-LDPC codes.
//!
//! A base matrix lists, for every (layer, block column) pair, either the
//! right-shift of a `z × z` identity or `-1` for an all-zero block.
//!
//! # File format
//!
//! ```text
//! # comment lines start with '#'
//! m_b n_b z
//! s s s ... (n_b entries)
//! ...       (m_b rows)
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// Shift-value matrix `H_b` together with its expansion factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseMatrix {
    rows: usize,
    cols: usize,
    z: usize,
    shifts: Vec<Option<usize>>,
}

impl BaseMatrix {
    /// Builds a base matrix from row-major entries where `-1` denotes a zero
    /// block.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        z: usize,
        entries: &[i64],
    ) -> Result<Self, ParseError> {
        if rows == 0 || cols == 0 || z == 0 {
            return Err(ParseError::new(0, 0, "dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(ParseError::new(
                0,
                0,
                format!("expected {} entries, got {}", rows * cols, entries.len()),
            ));
        }
        let shifts = entries
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                check_shift(s, z).map_err(|msg| ParseError::new(k / cols + 1, k % cols + 1, msg))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BaseMatrix {
            rows,
            cols,
            z,
            shifts,
        })
    }

    /// Number of block rows (`m_b`), i.e. layers.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of block columns (`n_b`).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Expansion factor.
    pub fn z(&self) -> usize {
        self.z
    }

    /// Code length `n_b · z`.
    pub fn code_length(&self) -> usize {
        self.cols * self.z
    }

    /// Number of parity checks `m_b · z`.
    pub fn num_checks(&self) -> usize {
        self.rows * self.z
    }

    /// Design rate `(n_b - m_b) / n_b`, assuming a full-rank parity-check
    /// matrix.
    pub fn design_rate(&self) -> f64 {
        (self.cols as f64 - self.rows as f64) / self.cols as f64
    }

    /// Shift of block `(row, col)`, or `None` for a zero block.
    pub fn shift(&self, row: usize, col: usize) -> Option<usize> {
        self.shifts[row * self.cols + col]
    }

    /// Iterates over the valid blocks of one block row as
    /// `(block column, shift)`, left to right.
    pub fn row_blocks(&self, row: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.shifts[row * self.cols..(row + 1) * self.cols]
            .iter()
            .enumerate()
            .filter_map(|(col, s)| s.map(|s| (col, s)))
    }

    /// Number of valid blocks in a block row.
    pub fn row_weight(&self, row: usize) -> usize {
        self.row_blocks(row).count()
    }

    /// Number of valid blocks in a block column.
    pub fn col_weight(&self, col: usize) -> usize {
        (0..self.rows)
            .filter(|&r| self.shift(r, col).is_some())
            .count()
    }

    /// Total number of valid blocks.
    pub fn num_valid_blocks(&self) -> usize {
        self.shifts.iter().filter(|s| s.is_some()).count()
    }

    /// Row-major entries with `-1` for zero blocks.
    pub fn entries(&self) -> Vec<i64> {
        self.shifts
            .iter()
            .map(|s| s.map_or(-1, |s| s as i64))
            .collect()
    }
}

fn check_shift(s: i64, z: usize) -> Result<Option<usize>, String> {
    match s {
        -1 => Ok(None),
        s if s >= 0 && (s as u64) < z as u64 => Ok(Some(s as usize)),
        s => Err(format!("shift {s} outside {{-1}} ∪ [0, {}]", z - 1)),
    }
}

/// Parses the text base-matrix format.
pub fn parse_base_matrix(text: &str) -> Result<BaseMatrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, 1, "missing header line \"m_b n_b z\""))?;
    let dims = header
        .split_whitespace()
        .enumerate()
        .map(|(k, tok)| {
            tok.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| ParseError::new(hline, k + 1, format!("invalid dimension {tok:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let [rows, cols, z] = dims[..] else {
        return Err(ParseError::new(
            hline,
            1,
            format!("header must have 3 fields, found {}", dims.len()),
        ));
    };

    let mut shifts = Vec::with_capacity(rows * cols);
    let mut last_line = hline;
    for row in 0..rows {
        let (lineno, line) = lines.next().ok_or_else(|| {
            ParseError::new(
                last_line + 1,
                1,
                format!("expected {rows} matrix rows, found {row}"),
            )
        })?;
        last_line = lineno;
        let mut count = 0;
        for (k, tok) in line.split_whitespace().enumerate() {
            if k >= cols {
                return Err(ParseError::new(
                    lineno,
                    k + 1,
                    format!("row has more than {cols} entries"),
                ));
            }
            let value: i64 = tok
                .parse()
                .map_err(|_| ParseError::new(lineno, k + 1, format!("invalid entry {tok:?}")))?;
            shifts.push(check_shift(value, z).map_err(|msg| ParseError::new(lineno, k + 1, msg))?);
            count += 1;
        }
        if count != cols {
            return Err(ParseError::new(
                lineno,
                count + 1,
                format!("row has {count} entries, expected {cols}"),
            ));
        }
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(ParseError::new(
            lineno,
            1,
            format!("unexpected data after {rows} matrix rows"),
        ));
    }
    Ok(BaseMatrix {
        rows,
        cols,
        z,
        shifts,
    })
}

impl FromStr for BaseMatrix {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_base_matrix(s)
    }
}

impl fmt::Display for BaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.z)?;
        let width = (self.z - 1).to_string().len().max(2);
        for row in 0..self.rows {
            let line = (0..self.cols)
                .map(|col| {
                    let v = self.shift(row, col).map_or(-1, |s| s as i64);
                    format!("{v:>width$}")
                })
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Rate-1/2 base matrices of the IEEE 802.11n (2012) LDPC code family.
pub mod wifi {
    use super::BaseMatrix;

    pub const Z27: &str = include_str!("../data/wifi_z27.bm");
    pub const Z54: &str = include_str!("../data/wifi_z54.bm");
    pub const Z81: &str = include_str!("../data/wifi_z81.bm");

    /// Returns the shipped base matrix for `z ∈ {27, 54, 81}`.
    pub fn rate_half(z: usize) -> Option<BaseMatrix> {
        let text = match z {
            27 => Z27,
            54 => Z54,
            81 => Z81,
            _ => return None,
        };
        Some(text.parse().expect("shipped base matrix is valid"))
    }
}

//! Expanded (binary) parity-check matrices.

use std::fmt::Write as _;

use crate::base::BaseMatrix;
use crate::error::{Error, Result};

/// Sparse binary parity-check matrix `H` stored as row and column adjacency
/// lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    num_rows: usize,
    num_cols: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from the column indices of the ones in each row.
    pub fn from_rows(num_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); num_cols];
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            for &j in row.iter() {
                if j >= num_cols {
                    return Err(Error::LengthMismatch {
                        expected: num_cols,
                        found: j + 1,
                    });
                }
                cols[j].push(i);
            }
        }
        Ok(ParityCheckMatrix {
            num_rows: rows.len(),
            num_cols,
            rows,
            cols,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    /// Sorted column indices `N(i)` of row `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    /// Sorted row indices of column `j`.
    pub fn col(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    pub fn num_ones(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Check-node and variable-node degrees.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.rows.iter().map(Vec::len).collect(),
            self.cols.iter().map(Vec::len).collect(),
        )
    }

    /// Computes `v̂ Hᵀ` over GF(2). Bits are 0/1 bytes; any nonzero byte is
    /// treated as 1.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        self.check_len(bits)?;
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &j| acc ^ (bits[j] != 0) as u8))
            .collect())
    }

    /// Number of unsatisfied checks.
    pub fn syndrome_weight(&self, bits: &[u8]) -> Result<usize> {
        self.check_len(bits)?;
        Ok(self
            .rows
            .iter()
            .filter(|row| row.iter().fold(false, |acc, &j| acc ^ (bits[j] != 0)))
            .count())
    }

    fn check_len(&self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.num_cols {
            return Err(Error::LengthMismatch {
                expected: self.num_cols,
                found: bits.len(),
            });
        }
        Ok(())
    }

    /// Renders the matrix in MacKay's alist format (1-based indices, zero
    /// padded rows and columns).
    pub fn to_alist(&self) -> String {
        let (dc, dv) = self.degrees();
        let max_dc = dc.iter().copied().max().unwrap_or(0);
        let max_dv = dv.iter().copied().max().unwrap_or(0);
        let mut out = String::new();
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        writeln!(out, "{} {}", self.num_cols, self.num_rows).unwrap();
        writeln!(out, "{max_dv} {max_dc}").unwrap();
        writeln!(out, "{}", join(&mut dv.iter().copied())).unwrap();
        writeln!(out, "{}", join(&mut dc.iter().copied())).unwrap();
        for col in &self.cols {
            let mut it = col.iter().map(|i| i + 1).chain(std::iter::repeat(0));
            writeln!(out, "{}", join(&mut it.by_ref().take(max_dv))).unwrap();
        }
        for row in &self.rows {
            let mut it = row.iter().map(|j| j + 1).chain(std::iter::repeat(0));
            writeln!(out, "{}", join(&mut it.by_ref().take(max_dc))).unwrap();
        }
        out
    }
}

/// Expands a base matrix: block `(u, w)` with shift `s` puts a one at
/// `(u·z + r, w·z + (r + s) mod z)` for every `r < z`.
pub fn expand(base: &BaseMatrix) -> ParityCheckMatrix {
    let z = base.z();
    let rows = (0..base.rows())
        .flat_map(|u| {
            (0..z).map(move |r| {
                base.row_blocks(u)
                    .map(|(w, s)| w * z + (r + s) % z)
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    ParityCheckMatrix::from_rows(base.code_length(), rows).expect("expansion stays in range")
}

//! Compact block-index / block-shift representation of a base matrix.
//!
//! Every layer keeps only its valid blocks, in left-to-right order, and rows
//! are right-padded to a common width `J` (the largest layer weight) so that
//! a decoder can walk a static `I × J` address table. Padding slots are
//! scheduled but never touch decoder state.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;

use crate::base::BaseMatrix;
use crate::error::{Error, Result};
use crate::pcm::ParityCheckMatrix;

/// A valid block of a layer: its block column and right-shift value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub col: usize,
    pub shift: usize,
}

/// `β_I` / `β_S` tables of a QC-LDPC code. Slot `(u, w)` is either a valid
/// block or padding (`None`), so the two tables always agree on padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactCode {
    layers: usize,
    width: usize,
    block_cols: usize,
    z: usize,
    slots: Vec<Option<Block>>,
}

impl CompactCode {
    /// Scans each layer of `base` left to right, keeping the valid blocks.
    pub fn from_base(base: &BaseMatrix) -> Self {
        let width = (0..base.rows())
            .map(|u| base.row_weight(u))
            .max()
            .unwrap_or(0);
        let mut slots = Vec::with_capacity(base.rows() * width);
        for u in 0..base.rows() {
            let before = slots.len();
            slots.extend(
                base.row_blocks(u)
                    .map(|(col, shift)| Some(Block { col, shift })),
            );
            slots.resize(before + width, None);
        }
        CompactCode {
            layers: base.rows(),
            width,
            block_cols: base.cols(),
            z: base.z(),
            slots,
        }
    }

    /// Number of layers `I` (= `m_b`).
    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Slots per layer `J`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of block columns `n_b`.
    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn code_length(&self) -> usize {
        self.block_cols * self.z
    }

    pub fn layer(&self, u: usize) -> &[Option<Block>] {
        &self.slots[u * self.width..(u + 1) * self.width]
    }

    /// Valid blocks of a layer in slot order.
    pub fn valid_blocks(&self, u: usize) -> impl Iterator<Item = Block> + '_ {
        self.layer(u).iter().flatten().copied()
    }

    pub fn num_valid_blocks(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    /// `β_I` with `-1` for padding.
    pub fn block_index_table(&self) -> Vec<Vec<i64>> {
        self.table(|b| b.col as i64)
    }

    /// `β_S` with `-1` for padding.
    pub fn block_shift_table(&self) -> Vec<Vec<i64>> {
        self.table(|b| b.shift as i64)
    }

    fn table(&self, f: impl Fn(&Block) -> i64) -> Vec<Vec<i64>> {
        (0..self.layers)
            .map(|u| {
                self.layer(u)
                    .iter()
                    .map(|s| s.as_ref().map_or(-1, &f))
                    .collect()
            })
            .collect()
    }

    /// Compaction ratio `λ = J / n_b`.
    pub fn compaction_ratio(&self) -> Ratio<usize> {
        Ratio::new(self.width, self.block_cols)
    }

    /// Block columns shared by two distinct layers. An empty set means the
    /// layers are independent.
    pub fn layer_dependency(&self, u: usize, other: usize) -> Result<BTreeSet<usize>> {
        for &l in &[u, other] {
            if l >= self.layers {
                return Err(Error::InvalidLayer(l));
            }
        }
        if u == other {
            return Err(Error::InvalidLayer(u));
        }
        let a: BTreeSet<usize> = self.valid_blocks(u).map(|b| b.col).collect();
        Ok(self
            .valid_blocks(other)
            .map(|b| b.col)
            .filter(|c| a.contains(c))
            .collect())
    }

    /// Returns a copy whose layer `u` holds the original slots in the order
    /// `orders[u]`, i.e. new slot `w` takes old slot `orders[u][w]`.
    pub fn permuted(&self, orders: &[Vec<usize>]) -> Result<CompactCode> {
        if orders.len() != self.layers {
            return Err(Error::LengthMismatch {
                expected: self.layers,
                found: orders.len(),
            });
        }
        let mut slots = Vec::with_capacity(self.slots.len());
        for (u, order) in orders.iter().enumerate() {
            let mut seen = vec![false; self.width];
            if order.len() != self.width {
                return Err(Error::LengthMismatch {
                    expected: self.width,
                    found: order.len(),
                });
            }
            for &w in order {
                if w >= self.width || std::mem::replace(&mut seen[w], true) {
                    return Err(Error::InvalidConfig(format!(
                        "layer {u}: slot order is not a permutation"
                    )));
                }
                slots.push(self.layer(u)[w]);
            }
        }
        Ok(CompactCode {
            slots,
            ..self.clone()
        })
    }

    /// Expanded parity-check matrix, using the same shift convention as
    /// [`crate::pcm::expand`].
    pub fn expand(&self) -> ParityCheckMatrix {
        let z = self.z;
        let rows = (0..self.layers)
            .flat_map(|u| {
                (0..z).map(move |r| {
                    self.valid_blocks(u)
                        .map(|b| b.col * z + (r + b.shift) % z)
                        .collect()
                })
            })
            .collect();
        ParityCheckMatrix::from_rows(self.code_length(), rows).expect("blocks stay in range")
    }

    /// Aligned text rendering of `β_I` and `β_S`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "beta_I (block index, 0-based):").unwrap();
        render_table(&mut out, &self.block_index_table());
        writeln!(out, "beta_S (block shift):").unwrap();
        render_table(&mut out, &self.block_shift_table());
        out
    }

    /// CSV rendering: `table,layer,slot,value` rows for both tables.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("table,layer,slot,value\n");
        for (name, table) in [
            ("beta_I", self.block_index_table()),
            ("beta_S", self.block_shift_table()),
        ] {
            for (u, row) in table.iter().enumerate() {
                for (w, v) in row.iter().enumerate() {
                    writeln!(out, "{name},{u},{w},{v}").unwrap();
                }
            }
        }
        out
    }
}

pub(crate) fn render_table(out: &mut String, table: &[Vec<i64>]) {
    let width = table
        .iter()
        .flatten()
        .map(|v| v.to_string().len())
        .max()
        .unwrap_or(1)
        .max(2);
    let cols = table.first().map_or(0, Vec::len);
    let header: Vec<String> = (0..cols)
        .map(|w| format!("{:>width$}", format!("b{}", w + 1)))
        .collect();
    writeln!(out, "      {}", header.join(" ")).unwrap();
    for (u, row) in table.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
        writeln!(out, "{:<5} {}", format!("L{}", u + 1), cells.join(" ")).unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::wifi;

    #[test]
    fn wifi_first_layer() {
        let code = CompactCode::from_base(&wifi::rate_half(81).unwrap());
        assert_eq!(code.width(), 8);
        assert_eq!(
            code.block_index_table()[0],
            vec![0, 4, 6, 8, 10, 12, 13, -1]
        );
        assert_eq!(
            code.block_shift_table()[0],
            vec![57, 50, 11, 50, 79, 1, 0, -1]
        );
    }

    #[test]
    fn single_valid_block() {
        let base = BaseMatrix::from_entries(1, 2, 8, &[5, -1]).unwrap();
        let code = CompactCode::from_base(&base);
        assert_eq!(code.width(), 1);
        assert_eq!(code.block_index_table(), vec![vec![0]]);
        assert_eq!(code.block_shift_table(), vec![vec![5]]);
    }

    #[test]
    fn compaction_ratio_values() {
        let code = CompactCode::from_base(&wifi::rate_half(81).unwrap());
        assert_eq!(code.compaction_ratio(), Ratio::new(1, 3));
        assert_eq!(code.compaction_ratio().recip(), Ratio::from_integer(3));
        let full = BaseMatrix::from_entries(2, 2, 3, &[0, 1, 2, 0]).unwrap();
        assert_eq!(
            CompactCode::from_base(&full).compaction_ratio(),
            Ratio::from_integer(1)
        );
    }

    #[test]
    fn wifi_layer_dependencies() {
        let code = CompactCode::from_base(&wifi::rate_half(81).unwrap());
        // L4 and L7 both use B2
        assert!(code.layer_dependency(3, 6).unwrap().contains(&1));
        // L10 lacks B1
        assert!(!code.layer_dependency(0, 9).unwrap().contains(&0));
        assert_eq!(code.layer_dependency(2, 2), Err(Error::InvalidLayer(2)));
        assert_eq!(code.layer_dependency(0, 12), Err(Error::InvalidLayer(12)));
    }

    #[test]
    fn permutation_is_validated() {
        let code = CompactCode::from_base(&BaseMatrix::from_entries(1, 3, 2, &[0, -1, 1]).unwrap());
        let swapped = code.permuted(&[vec![1, 0]]).unwrap();
        assert_eq!(swapped.block_index_table(), vec![vec![2, 0]]);
        assert!(code.permuted(&[vec![0, 0]]).is_err());
        assert!(code.permuted(&[vec![0]]).is_err());
    }

    #[test]
    fn text_rendering_lists_padding() {
        let code = CompactCode::from_base(&wifi::rate_half(81).unwrap());
        let text = code.render_text();
        assert!(text.contains("L1     0  4  6  8 10 12 13 -1"), "{text}");
        let csv = code.render_csv();
        assert!(csv.starts_with("table,layer,slot,value\nbeta_I,0,0,0\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * 12 * 8);
    }
}

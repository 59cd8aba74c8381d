//! Signed saturating fixed-point arithmetic.
//!
//! A [`QFormat`] `Q(i, f)` has `i` integer bits (sign included) and `f`
//! fractional bits, so raw values live in `[-2^(i+f-1), 2^(i+f-1) - 1]` and
//! one LSB is `2^-f`. Every operation saturates at the rails; nothing wraps.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QFormat {
    int_bits: u32,
    frac_bits: u32,
}

impl QFormat {
    /// The datapath format of the reference implementation: 6 signed integer
    /// bits and 4 fractional bits.
    pub const Q6_4: QFormat = QFormat {
        int_bits: 6,
        frac_bits: 4,
    };

    pub fn new(int_bits: u32, frac_bits: u32) -> Result<Self> {
        if int_bits == 0 || int_bits + frac_bits > 31 {
            return Err(Error::InvalidConfig(format!(
                "Q({int_bits},{frac_bits}) needs int_bits >= 1 and a total width <= 31"
            )));
        }
        Ok(QFormat {
            int_bits,
            frac_bits,
        })
    }

    pub fn int_bits(self) -> u32 {
        self.int_bits
    }

    pub fn frac_bits(self) -> u32 {
        self.frac_bits
    }

    pub fn width(self) -> u32 {
        self.int_bits + self.frac_bits
    }

    pub fn max_raw(self) -> i32 {
        (1 << (self.width() - 1)) - 1
    }

    pub fn min_raw(self) -> i32 {
        -(1 << (self.width() - 1))
    }

    /// Weight of one LSB.
    pub fn lsb(self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn saturate(self, wide: i64) -> i32 {
        wide.clamp(self.min_raw() as i64, self.max_raw() as i64) as i32
    }

    /// Round-to-nearest (ties away from zero) then saturate. NaN maps to 0.
    pub fn quantize_raw(self, x: f64) -> i32 {
        if x.is_nan() {
            return 0;
        }
        let scaled = (x * (self.frac_bits as f64).exp2()).round();
        scaled.clamp(self.min_raw() as f64, self.max_raw() as f64) as i32
    }

    pub fn to_f64(self, raw: i32) -> f64 {
        raw as f64 * self.lsb()
    }

    pub fn add_raw(self, a: i32, b: i32) -> i32 {
        self.saturate(a as i64 + b as i64)
    }

    pub fn sub_raw(self, a: i32, b: i32) -> i32 {
        self.saturate(a as i64 - b as i64)
    }

    pub fn neg_raw(self, a: i32) -> i32 {
        self.saturate(-(a as i64))
    }

    pub fn abs_raw(self, a: i32) -> i32 {
        self.saturate((a as i64).abs())
    }

    /// `raw · num / 2^shift`, rounded toward zero, saturated.
    pub fn scale_raw(self, raw: i32, num: i64, shift: u32) -> i32 {
        self.saturate(raw as i64 * num / (1i64 << shift))
    }

    /// `0.75 · raw` as `(3 · raw) >> 2`, rounded toward zero.
    pub fn scale_3q4_raw(self, raw: i32) -> i32 {
        self.saturate(raw as i64 * 3 / 4)
    }
}

impl Default for QFormat {
    fn default() -> Self {
        QFormat::Q6_4
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.int_bits, self.frac_bits)
    }
}

/// Parses the `I.F` notation used on the command line, e.g. `6.4`.
impl FromStr for QFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("q-format {s:?} is not of the form I.F"));
        let (i, f) = s.split_once('.').ok_or_else(bad)?;
        QFormat::new(i.parse().map_err(|_| bad())?, f.parse().map_err(|_| bad())?)
    }
}

/// A fixed-point value tagged with its format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fixed {
    raw: i32,
    format: QFormat,
}

impl Fixed {
    pub fn quantize(x: f64, format: QFormat) -> Fixed {
        Fixed {
            raw: format.quantize_raw(x),
            format,
        }
    }

    /// Wraps a raw integer, saturating it into range.
    pub fn from_raw(raw: i64, format: QFormat) -> Fixed {
        Fixed {
            raw: format.saturate(raw),
            format,
        }
    }

    pub fn raw(self) -> i32 {
        self.raw
    }

    pub fn format(self) -> QFormat {
        self.format
    }

    pub fn to_f64(self) -> f64 {
        self.format.to_f64(self.raw)
    }

    fn same_format(self, other: Fixed) -> Result<QFormat> {
        if self.format != other.format {
            return Err(Error::FormatMismatch(self.format, other.format));
        }
        Ok(self.format)
    }

    pub fn sat_add(self, other: Fixed) -> Result<Fixed> {
        let q = self.same_format(other)?;
        Ok(Fixed {
            raw: q.add_raw(self.raw, other.raw),
            format: q,
        })
    }

    pub fn sat_sub(self, other: Fixed) -> Result<Fixed> {
        let q = self.same_format(other)?;
        Ok(Fixed {
            raw: q.sub_raw(self.raw, other.raw),
            format: q,
        })
    }

    pub fn sat_neg(self) -> Fixed {
        Fixed {
            raw: self.format.neg_raw(self.raw),
            ..self
        }
    }

    pub fn scale_3q4(self) -> Fixed {
        Fixed {
            raw: self.format.scale_3q4_raw(self.raw),
            ..self
        }
    }
}

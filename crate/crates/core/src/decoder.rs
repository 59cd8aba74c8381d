//! Scaled min-sum decoding with a row-layered schedule.
//!
//! Layers are processed in order. Within a layer, the `z` check nodes are
//! independent (every valid block is a permutation matrix), so each slot of
//! the compact representation is handled as one block of `z` lanes: the APP
//! block is rotated by the slot's shift, the lanes are updated, and the block
//! is rotated back.
//!
//! The check-node update is split in two passes over the slots of a layer:
//!
//! * global pass: form `q = p - r_old` and accumulate the first and second
//!   minimum of `|q|`, the sign parity and the slot holding the minimum;
//! * local pass: emit `r_new = a · sign · min_{k≠j}|q_k|` from that summary
//!   and update `p = q + r_new`.
//!
//! This is linear in the check degree while matching the quadratic
//! exclusion-minimum definition exactly, ties included.

use std::fmt::Debug;

use crate::compact::{Block, CompactCode};
use crate::error::{Error, Result};
use crate::fixed::QFormat;
use crate::pcm::ParityCheckMatrix;

/// Numeric domain of the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    Fixed(QFormat),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    /// Check-to-variable scale factor `a`, in `(0, 1]`.
    pub scale: f64,
    pub max_iterations: usize,
    pub arithmetic: Arithmetic,
    pub early_termination: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            scale: 0.75,
            max_iterations: 8,
            arithmetic: Arithmetic::Float,
            early_termination: true,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "scale {} outside (0, 1]",
                self.scale
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Arithmetic rules for LLRs and messages.
pub trait MessageArithmetic: Debug + Send + Sync {
    type Value: Copy + Default + PartialOrd + Debug + Send + Sync;

    fn quantize(&self, llr: f64) -> Self::Value;
    fn to_f64(&self, v: Self::Value) -> f64;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn abs(&self, v: Self::Value) -> Self::Value;
    fn neg(&self, v: Self::Value) -> Self::Value;
    /// Multiplication by the scale factor `a`.
    fn scale(&self, v: Self::Value) -> Self::Value;
    /// Strictly negative; zero counts as positive.
    fn is_negative(&self, v: Self::Value) -> bool;
    /// Initial value of the running minima.
    fn infinity(&self) -> Self::Value;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatArithmetic {
    pub scale: f64,
}

impl MessageArithmetic for FloatArithmetic {
    type Value = f64;

    fn quantize(&self, llr: f64) -> f64 {
        llr
    }
    fn to_f64(&self, v: f64) -> f64 {
        v
    }
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }
    fn abs(&self, v: f64) -> f64 {
        v.abs()
    }
    fn neg(&self, v: f64) -> f64 {
        -v
    }
    fn scale(&self, v: f64) -> f64 {
        self.scale * v
    }
    fn is_negative(&self, v: f64) -> bool {
        v < 0.0
    }
    fn infinity(&self) -> f64 {
        f64::INFINITY
    }
}

/// Integer datapath over raw words of a [`QFormat`]. The scale factor is
/// held as a dyadic fraction `scale_num / 2^16` and applied with
/// round-toward-zero, which for `a = 0.75` is exactly `(3·x) >> 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedArithmetic {
    pub format: QFormat,
    pub scale_num: i64,
}

impl FixedArithmetic {
    pub const SCALE_SHIFT: u32 = 16;

    pub fn new(format: QFormat, scale: f64) -> Self {
        FixedArithmetic {
            format,
            scale_num: (scale * (1u64 << Self::SCALE_SHIFT) as f64).round() as i64,
        }
    }
}

impl MessageArithmetic for FixedArithmetic {
    type Value = i32;

    fn quantize(&self, llr: f64) -> i32 {
        self.format.quantize_raw(llr)
    }
    fn to_f64(&self, v: i32) -> f64 {
        self.format.to_f64(v)
    }
    fn add(&self, a: i32, b: i32) -> i32 {
        self.format.add_raw(a, b)
    }
    fn sub(&self, a: i32, b: i32) -> i32 {
        self.format.sub_raw(a, b)
    }
    fn abs(&self, v: i32) -> i32 {
        self.format.abs_raw(v)
    }
    fn neg(&self, v: i32) -> i32 {
        self.format.neg_raw(v)
    }
    fn scale(&self, v: i32) -> i32 {
        self.format.scale_raw(v, self.scale_num, Self::SCALE_SHIFT)
    }
    fn is_negative(&self, v: i32) -> bool {
        v < 0
    }
    fn infinity(&self) -> i32 {
        i32::MAX
    }
}

/// Running first/second minimum of one check node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinPair<T> {
    pub first: T,
    pub second: T,
    /// XOR of the signs seen so far (`true` = odd number of negatives).
    pub sign_parity: bool,
    /// First slot attaining `first`.
    pub argmin: Option<usize>,
}

impl<T: Copy + PartialOrd> MinPair<T> {
    pub fn new(infinity: T) -> Self {
        MinPair {
            first: infinity,
            second: infinity,
            sign_parity: false,
            argmin: None,
        }
    }

    pub fn push(&mut self, slot: usize, magnitude: T, negative: bool) {
        if magnitude <= self.first {
            if self.argmin.is_none() || magnitude < self.first {
                self.argmin = Some(slot);
            }
            self.second = self.first;
            self.first = magnitude;
        } else if magnitude < self.second {
            self.second = magnitude;
        }
        self.sign_parity ^= negative;
    }

    /// Minimum over every slot except `slot`.
    pub fn exclusion_min(&self, slot: usize) -> T {
        if self.argmin == Some(slot) {
            self.second
        } else {
            self.first
        }
    }
}

/// Rotation applied to an APP block before it reaches the check nodes of a
/// slot: `out[r] = block[(r + shift) mod z]`.
pub fn barrel_shift<T: Copy>(block: &[T], shift: usize) -> Vec<T> {
    let mut out = block.to_vec();
    if !out.is_empty() {
        out.rotate_left(shift % block.len());
    }
    out
}

/// Decoder state: APP values in natural variable-node order and one `z`-lane
/// check-to-variable message block per slot of the compact table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderState<V> {
    pub app: Vec<V>,
    pub ctv: Vec<V>,
    pub iteration: usize,
    pub last_syndrome_weight: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub bits: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
    /// Final APP values, converted to `f64`.
    pub app: Vec<f64>,
}

/// Layered min-sum decoder over a fixed compact code.
#[derive(Debug, Clone)]
pub struct LayeredDecoder<A: MessageArithmetic> {
    code: CompactCode,
    h: ParityCheckMatrix,
    arith: A,
    max_iterations: usize,
    early_termination: bool,
}

/// Scratch space reused across layers.
struct Workspace<V> {
    lanes: Vec<V>,
    pairs: Vec<MinPair<V>>,
}

impl<A: MessageArithmetic> LayeredDecoder<A> {
    pub fn new(
        code: &CompactCode,
        arith: A,
        max_iterations: usize,
        early_termination: bool,
    ) -> Self {
        LayeredDecoder {
            h: code.expand(),
            code: code.clone(),
            arith,
            max_iterations,
            early_termination,
        }
    }

    pub fn code(&self) -> &CompactCode {
        &self.code
    }

    pub fn arithmetic(&self) -> &A {
        &self.arith
    }

    /// APP = channel LLRs (quantized in fixed point), all messages zero.
    pub fn init(&self, llr: &[f64]) -> Result<DecoderState<A::Value>> {
        let n = self.code.code_length();
        if llr.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: llr.len(),
            });
        }
        Ok(DecoderState {
            app: llr.iter().map(|&x| self.arith.quantize(x)).collect(),
            ctv: vec![A::Value::default(); self.code.layers() * self.code.width() * self.code.z()],
            iteration: 0,
            last_syndrome_weight: None,
        })
    }

    fn workspace(&self) -> Workspace<A::Value> {
        let z = self.code.z();
        Workspace {
            lanes: vec![A::Value::default(); self.code.width() * z],
            pairs: vec![MinPair::new(self.arith.infinity()); z],
        }
    }

    /// Updates every check node of layer `u`.
    pub fn layer_update(&self, state: &mut DecoderState<A::Value>, u: usize) {
        let mut ws = self.workspace();
        self.update_layer(state, u, &mut ws);
    }

    fn update_layer(
        &self,
        state: &mut DecoderState<A::Value>,
        u: usize,
        ws: &mut Workspace<A::Value>,
    ) {
        let z = self.code.z();
        let width = self.code.width();
        let slots: Vec<(usize, Block)> = self
            .code
            .layer(u)
            .iter()
            .enumerate()
            .filter_map(|(w, b)| b.map(|b| (w, b)))
            .collect();
        // A check with fewer than two neighbours has no extrinsic input.
        if slots.len() < 2 {
            return;
        }
        let a = &self.arith;

        for pair in ws.pairs.iter_mut() {
            *pair = MinPair::new(a.infinity());
        }
        for (k, &(w, block)) in slots.iter().enumerate() {
            let lanes = &mut ws.lanes[k * z..(k + 1) * z];
            lanes.copy_from_slice(&state.app[block.col * z..(block.col + 1) * z]);
            lanes.rotate_left(block.shift);
            let ctv = &state.ctv[(u * width + w) * z..(u * width + w + 1) * z];
            for ((q, &r), pair) in lanes.iter_mut().zip(ctv).zip(ws.pairs.iter_mut()) {
                *q = a.sub(*q, r);
                pair.push(k, a.abs(*q), a.is_negative(*q));
            }
        }

        for (k, &(w, block)) in slots.iter().enumerate() {
            let lanes = &mut ws.lanes[k * z..(k + 1) * z];
            let ctv = &mut state.ctv[(u * width + w) * z..(u * width + w + 1) * z];
            for ((q, r), pair) in lanes.iter_mut().zip(ctv.iter_mut()).zip(ws.pairs.iter()) {
                let magnitude = a.scale(pair.exclusion_min(k));
                *r = if pair.sign_parity ^ a.is_negative(*q) {
                    a.neg(magnitude)
                } else {
                    magnitude
                };
                *q = a.add(*q, *r);
            }
            lanes.rotate_right(block.shift);
            state.app[block.col * z..(block.col + 1) * z].copy_from_slice(lanes);
        }
    }

    /// Bit 0 for a non-negative APP, 1 otherwise.
    pub fn hard_decision(&self, state: &DecoderState<A::Value>) -> Vec<u8> {
        state
            .app
            .iter()
            .map(|&p| self.arith.is_negative(p) as u8)
            .collect()
    }

    /// Runs one full iteration over all layers.
    pub fn iterate(&self, state: &mut DecoderState<A::Value>) {
        let mut ws = self.workspace();
        self.iterate_with(state, &mut ws);
    }

    fn iterate_with(&self, state: &mut DecoderState<A::Value>, ws: &mut Workspace<A::Value>) {
        for u in 0..self.code.layers() {
            self.update_layer(state, u, ws);
        }
        state.iteration += 1;
    }

    pub fn decode(&self, llr: &[f64]) -> Result<DecodeOutcome> {
        let mut state = self.init(llr)?;
        let mut ws = self.workspace();
        let mut bits = Vec::new();
        let mut weight = None;
        while state.iteration < self.max_iterations {
            self.iterate_with(&mut state, &mut ws);
            if self.early_termination {
                bits = self.hard_decision(&state);
                let w = self.h.syndrome_weight(&bits)?;
                weight = Some(w);
                if w == 0 {
                    break;
                }
            }
        }
        if !self.early_termination {
            bits = self.hard_decision(&state);
            weight = Some(self.h.syndrome_weight(&bits)?);
        }
        state.last_syndrome_weight = weight;
        Ok(DecodeOutcome {
            bits,
            iterations: state.iteration,
            converged: weight == Some(0),
            app: state.app.iter().map(|&p| self.arith.to_f64(p)).collect(),
        })
    }
}

/// A decoder built from a [`DecoderConfig`], dispatching on the arithmetic.
#[derive(Debug, Clone)]
pub enum Decoder {
    Float(LayeredDecoder<FloatArithmetic>),
    Fixed(LayeredDecoder<FixedArithmetic>),
}

impl Decoder {
    pub fn new(code: &CompactCode, cfg: &DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let (t, et) = (cfg.max_iterations, cfg.early_termination);
        Ok(match cfg.arithmetic {
            Arithmetic::Float => Decoder::Float(LayeredDecoder::new(
                code,
                FloatArithmetic { scale: cfg.scale },
                t,
                et,
            )),
            Arithmetic::Fixed(q) => Decoder::Fixed(LayeredDecoder::new(
                code,
                FixedArithmetic::new(q, cfg.scale),
                t,
                et,
            )),
        })
    }

    pub fn decode(&self, llr: &[f64]) -> Result<DecodeOutcome> {
        match self {
            Decoder::Float(d) => d.decode(llr),
            Decoder::Fixed(d) => d.decode(llr),
        }
    }

    pub fn code(&self) -> &CompactCode {
        match self {
            Decoder::Float(d) => d.code(),
            Decoder::Fixed(d) => d.code(),
        }
    }
}

/// One-shot decode of a single frame.
pub fn decode(llr: &[f64], code: &CompactCode, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    Decoder::new(code, cfg)?.decode(llr)
}

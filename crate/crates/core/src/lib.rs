//! QC-LDPC decoder engineering toolkit.
//!
//! * [`base`] / [`pcm`]: base matrices and their circulant expansion.
//! * [`compact`]: block-index / block-shift tables listing valid blocks only.
//! * [`schedule`]: superlayers, slot rearrangement for two-layer pipelining,
//!   hazards, slot counts and a throughput model.
//! * [`decoder`]: layered scaled min-sum decoding, floating or fixed point.
//! * [`fixed`]: saturating fixed-point arithmetic.
//! * [`channel`]: BPSK/AWGN Monte-Carlo BER harness.
//!
//! The `parallel` feature (on by default) fans Monte-Carlo frames and
//! superlayer candidates out over a rayon pool; without it everything runs
//! on the calling thread with identical results.

pub mod base;
pub mod channel;
pub mod compact;
pub mod decoder;
pub mod error;
pub mod fixed;
pub mod pcm;
pub mod schedule;

pub use base::{parse_base_matrix, BaseMatrix};
pub use channel::{run_ber, ChannelConfig, TrialResult};
pub use compact::{Block, CompactCode};
pub use decoder::{decode, Arithmetic, DecodeOutcome, Decoder, DecoderConfig};
pub use error::{Error, ParseError, Result};
pub use fixed::{Fixed, QFormat};
pub use pcm::{expand, ParityCheckMatrix};
pub use schedule::{
    pipelining_efficiency, rearrange, select_superlayer_size, PipelineMode, PipelinePlan,
    ThroughputModel,
};

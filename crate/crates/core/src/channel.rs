//! BPSK over AWGN and a Monte-Carlo BER/FER harness.
//!
//! Every frame transmits the all-zero codeword. Noise for frame `k` comes
//! from a ChaCha stream keyed by `(seed, k)`, so a frame's samples do not
//! depend on which worker decodes it or on the Eb/N0 point (the same
//! standard-normal draws are rescaled per point).

use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compact::CompactCode;
use crate::decoder::{Decoder, DecoderConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub ebno_db: Vec<f64>,
    /// Code rate `k / n`.
    pub rate: f64,
    pub seed: u64,
    /// A point stops after this many frames...
    pub max_frames: u64,
    /// ...or once this many bit errors were counted.
    pub min_bit_errors: u64,
    /// Worker threads; 0 lets the thread pool decide, 1 runs inline.
    pub workers: usize,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rate {} outside (0, 1)",
                self.rate
            )));
        }
        if self.ebno_db.iter().any(|x| !x.is_finite())
            || self.ebno_db.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidConfig(
                "Eb/N0 grid must be finite and ascending".into(),
            ));
        }
        if self.max_frames == 0 || self.min_bit_errors == 0 {
            return Err(Error::InvalidConfig(
                "max_frames and min_bit_errors must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub ebno_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    pub avg_iterations: f64,
}

/// Inclusive grid `lo, lo+step, ..., hi` (with a small tolerance on `hi`).
pub fn ebno_grid(lo: f64, step: f64, hi: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::InvalidConfig(format!(
            "bad Eb/N0 range {lo}:{step}:{hi}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

/// Noise variance per real dimension, `1 / (2 R Eb/N0)`.
pub fn noise_variance(ebno_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))
}

/// Uncoded BPSK bit error rate `Q(√(2 Eb/N0))`.
pub fn uncoded_ber(ebno_db: f64) -> f64 {
    let ebno = 10f64.powf(ebno_db / 10.0);
    0.5 * statrs::function::erf::erfc(ebno.sqrt())
}

/// Noise stream of one frame.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Standard normal samples by the Box–Muller transform.
pub fn standard_normals<R: RngCore>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        // u1 in (0, 1], u2 in [0, 1)
        let u1 = ((rng.next_u64() >> 11) + 1) as f64 * f64::EPSILON / 2.0;
        let u2 = (rng.next_u64() >> 11) as f64 * f64::EPSILON / 2.0;
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        out.push(radius * angle.cos());
        out.push(radius * angle.sin());
    }
    out.truncate(n);
    out
}

/// Channel LLRs `2y/σ²` for the all-zero codeword sent as `+1` symbols.
pub fn awgn_llr<R: RngCore>(ebno_db: f64, rate: f64, rng: &mut R, n: usize) -> Vec<f64> {
    llr_from_normals(&standard_normals(rng, n), noise_variance(ebno_db, rate))
}

fn llr_from_normals(normals: &[f64], variance: f64) -> Vec<f64> {
    let sigma = variance.sqrt();
    normals
        .iter()
        .map(|g| 2.0 * (1.0 + sigma * g) / variance)
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameStats {
    bit_errors: u64,
    iterations: u64,
}

fn simulate_frame(
    decoder: &Decoder,
    seed: u64,
    frame: u64,
    n: usize,
    variance: f64,
) -> Result<FrameStats> {
    let normals = standard_normals(&mut frame_rng(seed, frame), n);
    let out = decoder.decode(&llr_from_normals(&normals, variance))?;
    Ok(FrameStats {
        bit_errors: out.bits.iter().map(|&b| b as u64).sum(),
        iterations: out.iterations as u64,
    })
}

fn simulate_batch(
    decoder: &Decoder,
    seed: u64,
    frames: std::ops::Range<u64>,
    n: usize,
    variance: f64,
    parallel: bool,
) -> Result<Vec<FrameStats>> {
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return frames
            .into_par_iter()
            .map(|k| simulate_frame(decoder, seed, k, n, variance))
            .collect();
    }
    let _ = parallel;
    frames
        .map(|k| simulate_frame(decoder, seed, k, n, variance))
        .collect()
}

/// Runs every Eb/N0 point of `channel` and returns one result per point.
///
/// Frames are decoded in batches, possibly in parallel, but accounted in
/// frame order, and a point stops at the first frame that meets a stopping
/// rule. The output therefore depends only on the configuration and seed.
pub fn run_ber(
    code: &CompactCode,
    dec_cfg: &DecoderConfig,
    channel: &ChannelConfig,
) -> Result<Vec<TrialResult>> {
    channel.validate()?;
    let decoder = Decoder::new(code, dec_cfg)?;

    #[cfg(feature = "parallel")]
    if channel.workers != 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(channel.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        return pool.install(|| run_points(&decoder, channel, true));
    }
    run_points(&decoder, channel, false)
}

fn run_points(
    decoder: &Decoder,
    channel: &ChannelConfig,
    parallel: bool,
) -> Result<Vec<TrialResult>> {
    let n = decoder.code().code_length();
    let batch = if parallel { 256 } else { 1 };
    channel
        .ebno_db
        .iter()
        .map(|&ebno| {
            let variance = noise_variance(ebno, channel.rate);
            let (mut frames, mut bit_errors, mut frame_errors, mut iterations) =
                (0u64, 0u64, 0u64, 0u64);
            'point: while frames < channel.max_frames {
                let end = (frames + batch).min(channel.max_frames);
                for stats in
                    simulate_batch(decoder, channel.seed, frames..end, n, variance, parallel)?
                {
                    frames += 1;
                    bit_errors += stats.bit_errors;
                    frame_errors += (stats.bit_errors > 0) as u64;
                    iterations += stats.iterations;
                    if bit_errors >= channel.min_bit_errors {
                        break 'point;
                    }
                }
            }
            Ok(TrialResult {
                ebno_db: ebno,
                frames,
                bit_errors,
                frame_errors,
                ber: bit_errors as f64 / (frames as f64 * n as f64),
                fer: frame_errors as f64 / frames as f64,
                avg_iterations: iterations as f64 / frames as f64,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "ebno_db,frames,bit_errors,frame_errors,ber,fer,avg_iters";

pub fn to_csv(results: &[TrialResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e},{:.4}",
            r.ebno_db, r.frames, r.bit_errors, r.frame_errors, r.ber, r.fer, r.avg_iterations
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::wifi;

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(
            ebno_grid(1.0, 0.5, 3.0).unwrap(),
            vec![1.0, 1.5, 2.0, 2.5, 3.0]
        );
        assert_eq!(ebno_grid(0.0, 1.0, 0.0).unwrap(), vec![0.0]);
        assert!(ebno_grid(1.0, 0.0, 2.0).is_err());
        assert!(ebno_grid(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn uncoded_reference_at_zero_db() {
        assert!((uncoded_ber(0.0) - 0.078_649_6).abs() < 1e-6);
    }

    #[test]
    fn llr_mean_matches_model() {
        let (ebno, rate, n) = (1.0, 0.5, 200_000);
        let var = noise_variance(ebno, rate);
        let llr = awgn_llr(ebno, rate, &mut frame_rng(7, 0), n);
        let mean = llr.iter().sum::<f64>() / n as f64;
        // LLR variance is 4/σ²
        let stderr = (4.0 / var / n as f64).sqrt();
        assert!(
            (mean - 2.0 / var).abs() < 3.0 * stderr,
            "{mean} vs {}",
            2.0 / var
        );
    }

    #[test]
    fn noise_stream_is_deterministic() {
        let a = awgn_llr(2.0, 0.5, &mut frame_rng(42, 3), 1000);
        let b = awgn_llr(2.0, 0.5, &mut frame_rng(42, 3), 1000);
        let c = awgn_llr(2.0, 0.5, &mut frame_rng(42, 4), 1000);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn high_snr_has_no_errors() {
        let code = CompactCode::from_base(&wifi::rate_half(27).unwrap());
        let channel = ChannelConfig {
            ebno_db: vec![8.0],
            rate: 0.5,
            seed: 1,
            max_frames: 200,
            min_bit_errors: 1,
            workers: 1,
        };
        let res = run_ber(&code, &DecoderConfig::default(), &channel).unwrap();
        assert_eq!(res[0].frames, 200);
        assert_eq!(res[0].ber, 0.0);
        assert!(res[0].avg_iterations < 1.5);
    }

    #[test]
    fn config_validation() {
        let ok = ChannelConfig {
            ebno_db: vec![1.0, 2.0],
            rate: 0.5,
            seed: 0,
            max_frames: 1,
            min_bit_errors: 1,
            workers: 1,
        };
        assert!(ok.validate().is_ok());
        assert!(ChannelConfig {
            rate: 1.0,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ChannelConfig {
            ebno_db: vec![2.0, 1.0],
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(ChannelConfig {
            max_frames: 0,
            ..ok.clone()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn csv_layout() {
        let r = TrialResult {
            ebno_db: 1.5,
            frames: 10,
            bit_errors: 3,
            frame_errors: 1,
            ber: 3.0 / 6480.0,
            fer: 0.1,
            avg_iterations: 2.5,
        };
        assert_eq!(
            to_csv(&[r]),
            "ebno_db,frames,bit_errors,frame_errors,ber,fer,avg_iters\n1.5,10,3,1,4.629630e-4,1.000000e-1,2.5000\n"
        );
    }
}

//! BPSK-over-AWGN channel model, Monte-Carlo BLER estimation and SNR search.
//!
//! Noise uses common random numbers: each frame index owns a dedicated RNG
//! substream that yields the information bits and standard-normal noise
//! draws. The noise standard deviation is applied after drawing, so two
//! operating points evaluated at the same seed see identical bit patterns
//! and noise realizations, which makes BLER curves and SNR searches smooth
//! and byte-for-byte reproducible at any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bits::BitBlock;
use crate::code::CodeSpec;
use crate::damping::DampingSchedule;
use crate::decoder::{DecoderConfig, ParallelDecoder};
use crate::error::{Error, Result};
use crate::sc::LlrBlock;

/// Frames evaluated per scheduling unit. Fixed so that results do not depend
/// on the worker count.
const CHUNK_FRAMES: u64 = 128;

/// Operating point of the BPSK/AWGN channel with unit symbol energy:
/// `sigma^2 = 1 / (2 * 10^(EsN0_dB / 10))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    es_n0_db: f64,
    sigma2: f64,
}

impl ChannelParams {
    pub fn from_es_n0_db(es_n0_db: f64) -> Result<Self> {
        if !es_n0_db.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "Es/N0 must be finite, got {es_n0_db}"
            )));
        }
        let sigma2 = 1.0 / (2.0 * 10f64.powf(es_n0_db / 10.0));
        Ok(Self { es_n0_db, sigma2 })
    }

    pub fn es_n0_db(&self) -> f64 {
        self.es_n0_db
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Deterministic per-frame RNG substream: `seed` selects the experiment,
/// `frame` the stream within it.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Maps a codeword through BPSK (s = 1 - 2x) and AWGN, returning channel
/// LLRs `2y / sigma^2` (clamped by [`LlrBlock`]).
pub fn transmit(codeword: &BitBlock, params: &ChannelParams, rng: &mut impl Rng) -> LlrBlock {
    let sigma = params.sigma();
    let scale = 2.0 / params.sigma2();
    let values = codeword
        .bits()
        .iter()
        .map(|&x| {
            let s = 1.0 - 2.0 * f64::from(x);
            let z: f64 = rng.sample(StandardNormal);
            scale * (s + sigma * z)
        })
        .collect();
    LlrBlock::new(values).expect("finite noise yields finite LLRs")
}

/// When to stop accumulating frames at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub max_frames: u64,
    /// Stop once this many block errors are seen (may overshoot to the end
    /// of the chunk in flight, but the count is truncated deterministically).
    pub target_block_errors: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_frames: 100_000,
            target_block_errors: 50,
        }
    }
}

impl StopRule {
    fn validate(&self) -> Result<()> {
        if self.max_frames == 0 {
            return Err(Error::InvalidArgument("max_frames must be >= 1".into()));
        }
        if self.target_block_errors == 0 {
            return Err(Error::InvalidArgument(
                "target_block_errors must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One measured point of a BLER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlerPoint {
    pub es_n0_db: f64,
    pub frames: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    /// Fraction of component-decode slots that invoked an SC decoder.
    pub sc_activation_rate: f64,
    pub seed: u64,
}

impl BlerPoint {
    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.frames as f64
    }

    /// Standard error of the BLER estimate.
    pub fn stderr(&self) -> f64 {
        let p = self.bler();
        (p * (1.0 - p) / self.frames as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy)]
struct FrameOutcome {
    block_error: bool,
    bit_errors: u64,
    activations: u64,
    component_slots: u64,
}

fn simulate_frame(
    dec: &mut ParallelDecoder,
    params: &ChannelParams,
    seed: u64,
    frame: u64,
) -> Result<FrameOutcome> {
    let spec = dec.spec();
    let k = spec.k();
    let sqrt_n = spec.sqrt_n();
    let mut rng = frame_rng(seed, frame);
    let info = BitBlock::from_bits((0..k).map(|_| u8::from(rng.random::<bool>())).collect())?;
    let codeword = dec.spec().encode(&info)?;
    let llrs = transmit(&codeword, params, &mut rng);
    let res = dec.decode(&llrs, params.sigma2())?;
    let bit_errors = info
        .bits()
        .iter()
        .zip(res.info.bits())
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(FrameOutcome {
        block_error: bit_errors > 0,
        bit_errors,
        activations: res.sc_activations as u64,
        component_slots: (res.iterations_run * sqrt_n) as u64,
    })
}

/// Monte-Carlo BLER at one operating point.
///
/// Frames are numbered 0.. and evaluated in fixed-size chunks; chunk results
/// are reduced in frame order and the stop rule is applied sequentially, so
/// the outcome is identical for any `workers` value (0 = rayon default).
pub fn estimate_bler(
    spec: &CodeSpec,
    sched: &DampingSchedule,
    dec_cfg: DecoderConfig,
    params: &ChannelParams,
    stop: &StopRule,
    seed: u64,
    workers: usize,
) -> Result<BlerPoint> {
    stop.validate()?;
    let proto = ParallelDecoder::new(spec, sched, dec_cfg)?;
    let run = || -> Result<BlerPoint> {
        let mut frames = 0u64;
        let mut block_errors = 0u64;
        let mut bit_errors = 0u64;
        let mut activations = 0u64;
        let mut slots = 0u64;
        let mut start = 0u64;
        'outer: while start < stop.max_frames {
            let end = (start + CHUNK_FRAMES).min(stop.max_frames);
            let chunk: Vec<Result<FrameOutcome>> = (start..end)
                .into_par_iter()
                .map_init(
                    || proto.clone(),
                    |dec, frame| simulate_frame(dec, params, seed, frame),
                )
                .collect();
            for outcome in chunk {
                let o = outcome?;
                frames += 1;
                block_errors += u64::from(o.block_error);
                bit_errors += o.bit_errors;
                activations += o.activations;
                slots += o.component_slots;
                if block_errors >= stop.target_block_errors {
                    break 'outer;
                }
            }
            start = end;
        }
        Ok(BlerPoint {
            es_n0_db: params.es_n0_db(),
            frames,
            block_errors,
            bit_errors,
            sc_activation_rate: activations as f64 / slots as f64,
            seed,
        })
    };
    if workers == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(run)
    }
}

/// Result of an SNR search: the Es/N0 estimated to hit the target BLER.
/// `bracketed` is false when the target lies outside the search interval;
/// the nearer endpoint is returned in that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSearchResult {
    pub snr_db: f64,
    pub bracketed: bool,
    pub evaluations: usize,
}

/// Bisects `[lo_db, hi_db]` for the Es/N0 where BLER crosses `target_bler`,
/// to within `tol_db`. All points are measured with the same seed (common
/// random numbers), so the empirical BLER is monotone enough to bisect.
#[allow(clippy::too_many_arguments)]
pub fn snr_at_target_bler(
    spec: &CodeSpec,
    sched: &DampingSchedule,
    dec_cfg: DecoderConfig,
    target_bler: f64,
    lo_db: f64,
    hi_db: f64,
    tol_db: f64,
    stop: &StopRule,
    seed: u64,
    workers: usize,
) -> Result<SnrSearchResult> {
    if !(target_bler > 0.0 && target_bler <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target BLER must be in (0, 1], got {target_bler}"
        )));
    }
    if !(lo_db < hi_db) || !lo_db.is_finite() || !hi_db.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bad search interval [{lo_db}, {hi_db}]"
        )));
    }
    if !(tol_db > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol_db must be > 0, got {tol_db}"
        )));
    }
    let bler_at = |db: f64, evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let params = ChannelParams::from_es_n0_db(db)?;
        Ok(estimate_bler(spec, sched, dec_cfg, &params, stop, seed, workers)?.bler())
    };
    let mut evals = 0usize;
    if bler_at(lo_db, &mut evals)? <= target_bler {
        return Ok(SnrSearchResult {
            snr_db: lo_db,
            bracketed: false,
            evaluations: evals,
        });
    }
    if bler_at(hi_db, &mut evals)? > target_bler {
        return Ok(SnrSearchResult {
            snr_db: hi_db,
            bracketed: false,
            evaluations: evals,
        });
    }
    let (mut lo, mut hi) = (lo_db, hi_db);
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if bler_at(mid, &mut evals)? > target_bler {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SnrSearchResult {
        snr_db: 0.5 * (lo + hi),
        bracketed: true,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sc::LLR_MAX;

    fn spec_n4() -> CodeSpec {
        CodeSpec::new(4, 4..16).unwrap()
    }

    #[test]
    fn sigma2_follows_es_n0() {
        assert!((ChannelParams::from_es_n0_db(0.0).unwrap().sigma2() - 0.5).abs() < 1e-15);
        assert!((ChannelParams::from_es_n0_db(10.0).unwrap().sigma2() - 0.05).abs() < 1e-15);
        let p = ChannelParams::from_es_n0_db(-10.0 * (0.5f64).log10()).unwrap();
        assert!((p.sigma2() - 0.25).abs() < 1e-15);
        assert!(ChannelParams::from_es_n0_db(f64::NAN).is_err());
    }

    #[test]
    fn high_snr_llr_signs_match_codeword() {
        let params = ChannelParams::from_es_n0_db(40.0).unwrap();
        let cw = BitBlock::from_bits(vec![0, 1, 1, 0, 1, 0, 0, 1]).unwrap();
        let mut rng = frame_rng(7, 0);
        let llrs = transmit(&cw, &params, &mut rng);
        for (&bit, &l) in cw.bits().iter().zip(llrs.values()) {
            if bit == 0 {
                assert_eq!(l, LLR_MAX);
            } else {
                assert_eq!(l, -LLR_MAX);
            }
        }
    }

    #[test]
    fn llr_mean_matches_channel_parameter() {
        // E[L | x=0] = 2/sigma^2; at 0 dB that is 4, Var(L) = 4/sigma^2 = 8
        let params = ChannelParams::from_es_n0_db(0.0).unwrap();
        let cw = BitBlock::zeros(10_000);
        let mut rng = frame_rng(123, 5);
        let llrs = transmit(&cw, &params, &mut rng);
        let mean: f64 = llrs.values().iter().sum::<f64>() / llrs.values().len() as f64;
        let se = (8.0f64 / 10_000.0).sqrt();
        assert!((mean - 4.0).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn frame_streams_are_independent_and_stable() {
        let a: Vec<f64> = {
            let mut rng = frame_rng(9, 3);
            (0..8).map(|_| rng.sample(StandardNormal)).collect()
        };
        let a2: Vec<f64> = {
            let mut rng = frame_rng(9, 3);
            (0..8).map(|_| rng.sample(StandardNormal)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = frame_rng(9, 4);
            (0..8).map(|_| rng.sample(StandardNormal)).collect()
        };
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn estimate_bler_is_identical_across_worker_counts() {
        let spec = spec_n4();
        let sched = DampingSchedule::table2();
        let cfg = DecoderConfig {
            t_max: 4,
            ..Default::default()
        };
        let params = ChannelParams::from_es_n0_db(2.0).unwrap();
        let stop = StopRule {
            max_frames: 300,
            target_block_errors: 20,
        };
        let p1 = estimate_bler(&spec, &sched, cfg, &params, &stop, 42, 1).unwrap();
        let p4 = estimate_bler(&spec, &sched, cfg, &params, &stop, 42, 4).unwrap();
        let pd = estimate_bler(&spec, &sched, cfg, &params, &stop, 42, 0).unwrap();
        assert_eq!(p1, p4);
        assert_eq!(p1, pd);
        assert!(p1.frames > 0);
    }

    #[test]
    fn clean_channel_decodes_every_frame() {
        let spec = spec_n4();
        let sched = DampingSchedule::table2();
        let cfg = DecoderConfig {
            t_max: 2,
            ..Default::default()
        };
        let params = ChannelParams::from_es_n0_db(40.0).unwrap();
        let stop = StopRule {
            max_frames: 200,
            target_block_errors: 1,
        };
        let p = estimate_bler(&spec, &sched, cfg, &params, &stop, 1, 1).unwrap();
        assert_eq!(p.block_errors, 0);
        assert_eq!(p.frames, 200);
        // iteration 1 decodes every component, iteration 2 skips them all
        assert!((p.sc_activation_rate - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bler_decreases_with_snr() {
        let spec = spec_n4();
        let sched = DampingSchedule::table2();
        let cfg = DecoderConfig {
            t_max: 4,
            ..Default::default()
        };
        let stop = StopRule {
            max_frames: 300,
            target_block_errors: 300,
        };
        let noisy = estimate_bler(
            &spec,
            &sched,
            cfg,
            &ChannelParams::from_es_n0_db(-2.0).unwrap(),
            &stop,
            11,
            0,
        )
        .unwrap();
        let clean = estimate_bler(
            &spec,
            &sched,
            cfg,
            &ChannelParams::from_es_n0_db(10.0).unwrap(),
            &stop,
            11,
            0,
        )
        .unwrap();
        assert!(noisy.bler() > clean.bler());
    }

    #[test]
    fn snr_search_flags_unbracketed_targets() {
        let spec = spec_n4();
        let sched = DampingSchedule::table2();
        let cfg = DecoderConfig {
            t_max: 2,
            ..Default::default()
        };
        let stop = StopRule {
            max_frames: 50,
            target_block_errors: 50,
        };
        // target 1.0 is met everywhere: lo endpoint, not bracketed
        let r = snr_at_target_bler(&spec, &sched, cfg, 1.0, 0.0, 8.0, 0.25, &stop, 3, 1).unwrap();
        assert!(!r.bracketed);
        assert_eq!(r.snr_db, 0.0);
    }

    #[test]
    fn snr_search_brackets_moderate_target() {
        let spec = spec_n4();
        let sched = DampingSchedule::table2();
        let cfg = DecoderConfig {
            t_max: 4,
            ..Default::default()
        };
        let stop = StopRule {
            max_frames: 400,
            target_block_errors: 40,
        };
        let r = snr_at_target_bler(
            &spec, &sched, cfg, 0.05, -4.0, 14.0, 0.5, &stop, 21, 0,
        )
        .unwrap();
        assert!(r.bracketed, "expected bracketing, got {r:?}");
        assert!(r.snr_db > -4.0 && r.snr_db < 14.0);
        // reproducible
        let r2 = snr_at_target_bler(
            &spec, &sched, cfg, 0.05, -4.0, 14.0, 0.5, &stop, 21, 4,
        )
        .unwrap();
        assert_eq!(r, r2);
    }
}

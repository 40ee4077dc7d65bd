//! Binary-kernel coset codes with low-complexity parallel decoding.
//!
//! A length-N codeword (N = 2^n, n even) is the Kronecker-power transform of
//! a u-domain vector carrying information bits on a chosen index set. Viewed
//! as a sqrt(N) x sqrt(N) matrix, every column and every row of a codeword
//! lies in a short coset code, so decoding can run sqrt(N) successive
//! cancellation decoders in parallel per iteration, alternating between the
//! column graph and the row graph. A cheap syndrome check skips components
//! that already hold a valid local codeword, and the LLRs fed to the active
//! components damp the channel observation with the previous hard outputs.
//! The damping factors per iteration can be taken from the bundled schedule
//! or learned with the genetic search in [`ga`].
//!
//! Modules:
//! - [`bits`]: GF(2) blocks and the Kronecker-power transform
//! - [`code`]: information sets, encoding, component frozen sets, syndrome
//!   checks
//! - [`construct`]: Gaussian-approximation code construction
//! - [`sc`]: successive cancellation decoding of one component
//! - [`damping`]: damping-factor schedules
//! - [`decoder`]: the iterative parallel decoder
//! - [`channel`]: BPSK/AWGN simulation, BLER estimation, SNR search
//! - [`ga`]: genetic search over damping schedules

pub mod bits;
pub mod channel;
pub mod code;
pub mod construct;
pub mod damping;
pub mod decoder;
pub mod error;
pub mod ga;
pub mod sc;

pub use bits::{kronecker_transform, kronecker_transform_in_place, BitBlock};
pub use channel::{
    estimate_bler, frame_rng, snr_at_target_bler, transmit, BlerPoint, ChannelParams,
    SnrSearchResult, StopRule,
};
pub use code::{derive_component_frozen_sets, syndrome_check, CodeSpec};
pub use construct::{construct_gaussian_approx, construct_reserved};
pub use damping::DampingSchedule;
pub use decoder::{
    generate_llr, parallel_decode, DecodeResult, DecoderConfig, DecoderState, Graph,
    IterationStats, ParallelDecoder,
};
pub use error::{Error, Result};
pub use ga::{
    crossover, init_population, mutate, random_schedule, select_parent, train, Candidate,
    FitnessOracle, GaConfig, GenerationStat, Population, SnrFitness, TrainResult,
};
pub use sc::{sc_decode, LlrBlock, ScDecoder, LLR_MAX};

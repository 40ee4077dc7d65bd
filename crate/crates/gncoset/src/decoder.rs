//! Parallel decoding: alternating passes over the row and column component
//! codes, each component gated by an error detector and fed by the
//! damping-factor LLR generator.

use crate::bits::BitBlock;
use crate::code::{syndrome_check_into, CodeSpec};
use crate::damping::DampingSchedule;
use crate::error::{Error, Result};
use crate::sc::{LlrBlock, ScDecoder, LLR_MAX};

/// Decoding graph selector. `Cols` decodes the column components (graph G),
/// `Rows` the row components (stage-permuted graph G_pi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Graph {
    Cols,
    Rows,
}

impl Graph {
    pub fn flipped(self) -> Self {
        match self {
            Graph::Cols => Graph::Rows,
            Graph::Rows => Graph::Cols,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Graph::Cols => "cols",
            Graph::Rows => "rows",
        }
    }
}

impl std::fmt::Display for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    /// Number of iterations to run.
    pub t_max: usize,
    /// Graph processed at iteration 1. The structure is symmetric; the
    /// default starts with the row components.
    pub start_graph: Graph,
    /// Stop once two consecutive iterations perform zero SC activations.
    /// Off by default so activation statistics reflect all t_max iterations.
    pub early_exit: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            t_max: 8,
            start_graph: Graph::Rows,
            early_exit: false,
        }
    }
}

/// Mutable decoder state advanced one iteration at a time.
#[derive(Debug, Clone)]
pub struct DecoderState {
    /// Hard codeword estimate from iteration t-1, row-major N bits.
    pub ho_prev: Vec<u8>,
    /// Hard codeword estimate from iteration t-2 (zeros before t = 2).
    pub ho_prev2: Vec<u8>,
    /// Error-detector outputs of the column components (graph G).
    pub e_col: Vec<u8>,
    /// Error-detector outputs of the row components (graph G_pi).
    pub e_row: Vec<u8>,
    /// Completed iterations.
    pub t: usize,
    /// SC invocations so far.
    pub activations: usize,
}

impl DecoderState {
    pub fn new(sqrt_n: usize) -> Self {
        Self {
            ho_prev: vec![0; sqrt_n * sqrt_n],
            ho_prev2: vec![0; sqrt_n * sqrt_n],
            e_col: vec![0; sqrt_n],
            e_row: vec![0; sqrt_n],
            t: 0,
            activations: 0,
        }
    }

    fn reset(&mut self) {
        self.ho_prev.fill(0);
        self.ho_prev2.fill(0);
        self.e_col.fill(0);
        self.e_row.fill(0);
        self.t = 0;
        self.activations = 0;
    }
}

/// Per-iteration activation record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationStats {
    pub graph: Graph,
    pub activations: usize,
    pub skips: usize,
}

/// Outcome of a full parallel decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub codeword: BitBlock,
    pub info: BitBlock,
    pub iterations_run: usize,
    pub sc_activations: usize,
    pub components_skipped: usize,
    pub per_iteration_trace: Vec<IterationStats>,
}

/// LLR fed to an SC component decoder at iteration t.
///
/// With the producing component's error flag raised (its output came from an
/// SC decoder), the channel LLR is damped by the previous two hard outputs:
/// `l_ch + (2 alpha_t / sigma^2)(1-2 ho_prev) - (2 beta_t / sigma^2)(1-2 ho_prev2)`.
/// With the flag clear (output came straight from the detector), only the
/// previous output contributes, weighted by gamma_t. Clamped to +-LLR_MAX.
pub fn generate_llr(
    l_ch: f64,
    ho_prev_bit: u8,
    ho_prev2_bit: u8,
    e_flag: u8,
    t: usize,
    sched: &DampingSchedule,
    sigma2: f64,
) -> f64 {
    debug_assert!(sigma2 > 0.0);
    let scale = 2.0 / sigma2;
    let s1 = 1.0 - 2.0 * f64::from(ho_prev_bit);
    let l = if e_flag != 0 {
        let s2 = 1.0 - 2.0 * f64::from(ho_prev2_bit);
        l_ch + scale * sched.alpha(t) * s1 - scale * sched.beta(t) * s2
    } else {
        l_ch + scale * sched.gamma(t) * s1
    };
    l.clamp(-LLR_MAX, LLR_MAX)
}

/// A reusable decoder instance: owns the component SC decoders and all
/// scratch buffers. Single-threaded; create one per worker.
#[derive(Debug, Clone)]
pub struct ParallelDecoder {
    spec: CodeSpec,
    sched: DampingSchedule,
    cfg: DecoderConfig,
    col_sc: ScDecoder,
    row_sc: ScDecoder,
    state: DecoderState,
    next_ho: Vec<u8>,
    comp_prev: Vec<u8>,
    comp_out: Vec<u8>,
    comp_llr: Vec<f64>,
    syndrome_scratch: Vec<u8>,
}

impl ParallelDecoder {
    pub fn new(spec: &CodeSpec, sched: &DampingSchedule, cfg: DecoderConfig) -> Result<Self> {
        if cfg.t_max == 0 {
            return Err(Error::InvalidArgument("t_max must be >= 1".into()));
        }
        if sched.t_max() < cfg.t_max {
            return Err(Error::InvalidArgument(format!(
                "schedule covers {} iterations but t_max = {}",
                sched.t_max(),
                cfg.t_max
            )));
        }
        let sqrt_n = spec.sqrt_n();
        let m = spec.n() / 2;
        Ok(Self {
            spec: spec.clone(),
            sched: sched.clone(),
            cfg,
            col_sc: ScDecoder::new(m, spec.col_frozen())?,
            row_sc: ScDecoder::new(m, spec.row_frozen())?,
            state: DecoderState::new(sqrt_n),
            next_ho: vec![0; sqrt_n * sqrt_n],
            comp_prev: vec![0; sqrt_n],
            comp_out: vec![0; sqrt_n],
            comp_llr: vec![0.0; sqrt_n],
            syndrome_scratch: vec![0; sqrt_n],
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    /// Runs one iteration on the given graph, advancing `state`.
    ///
    /// Per component: the previous iteration's bits are syndrome-checked
    /// (bypassed and treated as failed at t = 1); on a pass they are copied
    /// through, otherwise the component is SC-decoded on freshly generated
    /// LLRs. The per-bit error flag fed to the LLR generator is the OTHER
    /// graph's flag for the component that produced that bit.
    pub fn run_iteration(
        &mut self,
        state: &mut DecoderState,
        graph: Graph,
        channel_llrs: &[f64],
        sigma2: f64,
    ) -> Result<IterationStats> {
        let sqrt_n = self.spec.sqrt_n();
        if channel_llrs.len() != self.spec.big_n() {
            return Err(Error::LengthMismatch {
                expected: self.spec.big_n(),
                got: channel_llrs.len(),
            });
        }
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma2 = {sigma2} must be > 0")));
        }
        let t_now = state.t + 1;
        if t_now > self.sched.t_max() {
            return Err(Error::InvalidArgument(format!(
                "iteration {t_now} exceeds schedule length {}",
                self.sched.t_max()
            )));
        }

        self.next_ho.copy_from_slice(&state.ho_prev);
        let mut activations = 0usize;

        let (frozen_mask, sc) = match graph {
            Graph::Cols => (self.spec.col_frozen_mask(), &mut self.col_sc),
            Graph::Rows => (self.spec.row_frozen_mask(), &mut self.row_sc),
        };

        for comp in 0..sqrt_n {
            // bit j of this component in row-major codeword coordinates
            let bit_index = |j: usize| match graph {
                Graph::Cols => j * sqrt_n + comp,
                Graph::Rows => comp * sqrt_n + j,
            };

            for j in 0..sqrt_n {
                self.comp_prev[j] = state.ho_prev[bit_index(j)];
            }
            let detected_ok = t_now > 1
                && syndrome_check_into(&self.comp_prev, frozen_mask, &mut self.syndrome_scratch);
            let e_flag: u8 = u8::from(!detected_ok);

            if e_flag == 1 {
                for j in 0..sqrt_n {
                    let k = bit_index(j);
                    let producer_flag = match graph {
                        Graph::Cols => state.e_row[j],
                        Graph::Rows => state.e_col[j],
                    };
                    self.comp_llr[j] = generate_llr(
                        channel_llrs[k],
                        state.ho_prev[k],
                        state.ho_prev2[k],
                        producer_flag,
                        t_now,
                        &self.sched,
                        sigma2,
                    );
                }
                sc.decode(&self.comp_llr, &mut self.comp_out)?;
                for j in 0..sqrt_n {
                    self.next_ho[bit_index(j)] = self.comp_out[j];
                }
                activations += 1;
            }
            match graph {
                Graph::Cols => state.e_col[comp] = e_flag,
                Graph::Rows => state.e_row[comp] = e_flag,
            }
        }

        std::mem::swap(&mut state.ho_prev2, &mut state.ho_prev);
        std::mem::swap(&mut state.ho_prev, &mut self.next_ho);
        state.t = t_now;
        state.activations += activations;

        Ok(IterationStats {
            graph,
            activations,
            skips: sqrt_n - activations,
        })
    }

    /// Decodes one frame: alternates graphs starting from the configured
    /// one, runs t_max iterations (fewer only with early exit), and returns
    /// the last iteration's codeword estimate with its activation trace.
    pub fn decode(&mut self, channel_llrs: &LlrBlock, sigma2: f64) -> Result<DecodeResult> {
        let mut state = std::mem::replace(&mut self.state, DecoderState::new(0));
        state.reset();
        let mut graph = self.cfg.start_graph;
        let mut trace = Vec::with_capacity(self.cfg.t_max);
        let mut consecutive_idle = 0usize;

        let outcome = (|| {
            for _ in 0..self.cfg.t_max {
                let stats = self.run_iteration(&mut state, graph, channel_llrs.values(), sigma2)?;
                trace.push(stats);
                graph = graph.flipped();
                if self.cfg.early_exit {
                    if stats.activations == 0 {
                        consecutive_idle += 1;
                        if consecutive_idle >= 2 {
                            break;
                        }
                    } else {
                        consecutive_idle = 0;
                    }
                }
            }
            let codeword = BitBlock::from_bits(state.ho_prev.clone())?;
            let info = self.spec.extract_info(&codeword)?;
            Ok(DecodeResult {
                codeword,
                info,
                iterations_run: state.t,
                sc_activations: state.activations,
                components_skipped: state.t * self.spec.sqrt_n() - state.activations,
                per_iteration_trace: trace,
            })
        })();
        self.state = state;
        outcome
    }
}

/// One-shot convenience wrapper around [`ParallelDecoder`].
pub fn parallel_decode(
    channel_llrs: &LlrBlock,
    spec: &CodeSpec,
    sched: &DampingSchedule,
    t_max: usize,
    sigma2: f64,
) -> Result<DecodeResult> {
    let cfg = DecoderConfig {
        t_max,
        ..DecoderConfig::default()
    };
    ParallelDecoder::new(spec, sched, cfg)?.decode(channel_llrs, sigma2)
}

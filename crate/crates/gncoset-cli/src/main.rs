//! Experiment driver: code construction, BLER simulation, schedule training,
//! single-frame decoding and schedule sweeps. Every command is reproducible
//! from its config file and seed; worker count never changes any output byte.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gncoset::{
    estimate_bler, snr_at_target_bler, train, BlerPoint, ChannelParams, CodeSpec,
    DampingSchedule, DecoderConfig, GaConfig, LlrBlock, ParallelDecoder, SnrFitness,
};

use config::ExperimentConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, config, or input data (exit 2).
    Input(String),
    /// Filesystem failure while producing output (exit 3).
    Io(String),
}

impl CliError {
    fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Io(m) => m,
        }
    }
}

impl From<gncoset::Error> for CliError {
    fn from(e: gncoset::Error) -> Self {
        match e {
            gncoset::Error::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "gncoset", version, about = "Coset-code decoder experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRun {
    /// Experiment config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override sim.seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override sim.workers from the config (0 = library default)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code and write its spec file
    Construct {
        #[command(flatten)]
        common: CommonRun,
        /// Output spec file
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate BLER across the configured SNR points, write CSV
    Simulate {
        #[command(flatten)]
        common: CommonRun,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Search damping schedules; write the best schedule and a trajectory CSV
    Train {
        #[command(flatten)]
        common: CommonRun,
        /// Output schedule file
        #[arg(long)]
        schedule_out: PathBuf,
        /// Output trajectory CSV
        #[arg(long)]
        log_out: PathBuf,
    },
    /// Decode one LLR frame and print info bits plus the activation trace
    Decode {
        /// Code spec file
        #[arg(long)]
        spec: PathBuf,
        /// Schedule file path, or "table2" for the built-in schedule
        #[arg(long)]
        schedule: String,
        /// LLR file, one decimal value per line, length N
        #[arg(long)]
        llrs: PathBuf,
        /// Iterations (default: full schedule length)
        #[arg(long)]
        t_max: Option<usize>,
        /// Noise variance used by the LLR generator
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, value_enum, default_value_t = GraphArg::Rows)]
        start_graph: GraphArg,
        #[arg(long)]
        early_exit: bool,
    },
    /// BLER grid over schedules x SNR points, write CSV
    Sweep {
        #[command(flatten)]
        common: CommonRun,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
        /// Schedules to compare: file paths or "table2" (default: the
        /// schedule from the config)
        #[arg(long = "schedule", value_name = "PATH|table2")]
        schedules: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum GraphArg {
    Rows,
    Cols,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Construct { common, out } => cmd_construct(&common, &out),
        Command::Simulate { common, out } => cmd_simulate(&common, &out),
        Command::Train {
            common,
            schedule_out,
            log_out,
        } => cmd_train(&common, &schedule_out, &log_out),
        Command::Decode {
            spec,
            schedule,
            llrs,
            t_max,
            sigma2,
            start_graph,
            early_exit,
        } => cmd_decode(&spec, &schedule, &llrs, t_max, sigma2, start_graph, early_exit),
        Command::Sweep {
            common,
            out,
            schedules,
        } => cmd_sweep(&common, &out, &schedules),
    }
}

fn load_config(common: &CommonRun) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.sim.seed = seed;
    }
    if let Some(workers) = common.workers {
        cfg.sim.workers = Some(workers);
    }
    Ok(cfg)
}

fn decoder_config(cfg: &ExperimentConfig) -> DecoderConfig {
    DecoderConfig {
        t_max: cfg.decoder.t_max,
        start_graph: cfg.decoder.start_graph.into(),
        early_exit: cfg.decoder.early_exit,
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn cmd_construct(common: &CommonRun, out: &Path) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.resolve_spec()?;
    spec.to_file(out)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", out.display())))?;
    eprintln!(
        "wrote {} (n={}, N={}, K={})",
        out.display(),
        spec.n(),
        spec.big_n(),
        spec.k()
    );
    Ok(())
}

const BLER_HEADER: &str = "es_n0_db,frames,block_errors,bit_errors,bler,stderr,sc_activation_rate,seed";

fn bler_row(p: &BlerPoint) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        p.es_n0_db,
        p.frames,
        p.block_errors,
        p.bit_errors,
        p.bler(),
        p.stderr(),
        p.sc_activation_rate,
        p.seed
    )
}

fn cmd_simulate(common: &CommonRun, out: &Path) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.resolve_spec()?;
    let sched = cfg.resolve_schedule()?;
    let points = cfg.snr_points()?;
    let dec_cfg = decoder_config(&cfg);
    let stop = cfg.stop_rule();
    let workers = cfg.sim.workers.unwrap_or(0);

    let mut csv = cfg.echo_comments();
    csv.push_str(BLER_HEADER);
    csv.push('\n');
    for &db in &points {
        let params = ChannelParams::from_es_n0_db(db)?;
        let point = estimate_bler(&spec, &sched, dec_cfg, &params, &stop, cfg.sim.seed, workers)?;
        csv.push_str(&bler_row(&point));
        csv.push('\n');
    }
    write_output(out, &csv)
}

fn cmd_train(common: &CommonRun, schedule_out: &Path, log_out: &Path) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let ga = cfg
        .ga
        .as_ref()
        .ok_or_else(|| CliError::input("train needs a [ga] section"))?;
    let spec = cfg.resolve_spec()?;
    let workers = cfg.sim.workers.unwrap_or(0);
    let ga_cfg = GaConfig {
        population: ga.population,
        v_sup: ga.v_sup,
        lambda: ga.lambda,
        p_mutate: ga.p_mutate,
        sigma_mutate: ga.sigma_mutate,
        t_max: ga.t_max,
        max_generations: ga.max_generations,
        clip_negative: ga.clip_negative,
    };
    let oracle = SnrFitness {
        spec: spec.clone(),
        target_bler: ga.target_bler,
        lo_db: ga.lo_db,
        hi_db: ga.hi_db,
        tol_db: ga.tol_db,
        stop: cfg.stop_rule(),
        seed: cfg.sim.seed,
        workers,
    };
    let result = train(&ga_cfg, &oracle, cfg.sim.seed)?;

    result
        .best_schedule
        .to_file(schedule_out)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", schedule_out.display())))?;

    // rank order is meaningful even when the best candidate sits on a search
    // endpoint, but the absolute number is then only a bound: say so
    let check = snr_at_target_bler(
        &spec,
        &result.best_schedule,
        DecoderConfig {
            t_max: ga_cfg.t_max,
            early_exit: true,
            ..DecoderConfig::default()
        },
        ga.target_bler,
        ga.lo_db,
        ga.hi_db,
        ga.tol_db,
        &cfg.stop_rule(),
        cfg.sim.seed,
        workers,
    )?;

    let mut csv = cfg.echo_comments();
    if !check.bracketed {
        let _ = writeln!(
            csv,
            "# warning: best fitness {} dB sits on a search endpoint; target BLER {} was not bracketed by [{}, {}]",
            check.snr_db, ga.target_bler, ga.lo_db, ga.hi_db
        );
    }
    csv.push_str("generation,best_fitness_db,median_fitness_db,evaluations\n");
    for s in &result.trajectory {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            s.generation, s.best_fitness, s.median_fitness, s.evaluations
        );
    }
    write_output(log_out, &csv)?;
    eprintln!(
        "best fitness {} dB after {} generations; schedule in {}",
        result.best_fitness,
        ga_cfg.max_generations,
        schedule_out.display()
    );
    Ok(())
}

fn read_llr_file(path: &Path) -> Result<LlrBlock, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| {
            CliError::input(format!("{}:{}: bad LLR `{t}`", path.display(), i + 1))
        })?;
        values.push(v);
    }
    Ok(LlrBlock::new(values)?)
}

fn load_schedule_arg(arg: &str) -> Result<DampingSchedule, CliError> {
    if arg == "table2" {
        Ok(DampingSchedule::table2())
    } else {
        Ok(DampingSchedule::from_file(arg)?)
    }
}

fn cmd_decode(
    spec_path: &Path,
    schedule: &str,
    llr_path: &Path,
    t_max: Option<usize>,
    sigma2: f64,
    start_graph: GraphArg,
    early_exit: bool,
) -> Result<(), CliError> {
    let spec = CodeSpec::from_file(spec_path)?;
    let sched = load_schedule_arg(schedule)?;
    let t_max = t_max.unwrap_or_else(|| sched.t_max());
    let llrs = read_llr_file(llr_path)?;
    if llrs.len() != spec.big_n() {
        return Err(CliError::input(format!(
            "LLR file holds {} values but N = {}",
            llrs.len(),
            spec.big_n()
        )));
    }
    let cfg = DecoderConfig {
        t_max,
        start_graph: match start_graph {
            GraphArg::Rows => gncoset::Graph::Rows,
            GraphArg::Cols => gncoset::Graph::Cols,
        },
        early_exit,
    };
    let mut dec = ParallelDecoder::new(&spec, &sched, cfg)?;
    let res = dec.decode(&llrs, sigma2)?;

    println!(
        "# spec={} schedule={} t_max={} sigma2={} start_graph={} early_exit={}",
        spec_path.display(),
        schedule,
        t_max,
        sigma2,
        cfg.start_graph,
        early_exit
    );
    println!("# N={} K={}", spec.big_n(), spec.k());
    println!("info={}", hex_bits(res.info.bits()));
    println!("t,graph,activations,skips");
    for (i, s) in res.per_iteration_trace.iter().enumerate() {
        println!("{},{},{},{}", i + 1, s.graph, s.activations, s.skips);
    }
    Ok(())
}

/// Bits packed MSB-first into bytes (zero-padded at the end), lowercase hex.
fn hex_bits(bits: &[u8]) -> String {
    let mut out = String::with_capacity(bits.len().div_ceil(4));
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            byte |= b << (7 - i);
        }
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn cmd_sweep(common: &CommonRun, out: &Path, schedules: &[String]) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let spec = cfg.resolve_spec()?;
    let points = cfg.snr_points()?;
    let dec_cfg = decoder_config(&cfg);
    let stop = cfg.stop_rule();
    let workers = cfg.sim.workers.unwrap_or(0);

    let labeled: Vec<(String, DampingSchedule)> = if schedules.is_empty() {
        vec![("config".into(), cfg.resolve_schedule()?)]
    } else {
        let mut v = Vec::with_capacity(schedules.len());
        for arg in schedules {
            if arg.contains(',') {
                return Err(CliError::input(format!(
                    "schedule label `{arg}` may not contain a comma"
                )));
            }
            v.push((arg.clone(), load_schedule_arg(arg)?));
        }
        v
    };
    for (label, sched) in &labeled {
        if sched.t_max() < dec_cfg.t_max {
            return Err(CliError::input(format!(
                "schedule {label} covers {} iterations but decoder.t_max = {}",
                sched.t_max(),
                dec_cfg.t_max
            )));
        }
    }

    let mut csv = cfg.echo_comments();
    let labels: Vec<&str> = labeled.iter().map(|(l, _)| l.as_str()).collect();
    let _ = writeln!(csv, "# sweep_schedules={}", labels.join(";"));
    let _ = writeln!(csv, "schedule,{BLER_HEADER}");
    for (label, sched) in &labeled {
        for &db in &points {
            let params = ChannelParams::from_es_n0_db(db)?;
            let point =
                estimate_bler(&spec, sched, dec_cfg, &params, &stop, cfg.sim.seed, workers)?;
            let _ = writeln!(csv, "{label},{}", bler_row(&point));
        }
    }
    write_output(out, &csv)
}

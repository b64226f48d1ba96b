//! Command-line front end: argument and config-file parsing, subcommand
//! dispatch and output files.

mod config_file;

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    calls_vs_energy, random_product_state, success_histogram, useful_gate_fraction,
    useful_generator_fraction, write_curve_csv, write_histogram_csv,
};
use crate::error::{Error, Result};
use crate::evolution::{run_evolution, EvolutionConfig, MutationConfig};
use crate::gradient::{gradient_descent_run, GradientConfig, DEFAULT_LAYERS};
use crate::hamiltonian::{
    exact_extremes, local_pauli_sum, BenchmarkKind, Hamiltonian, HamiltonianSpec,
};
use crate::quantum::{Axis, EvalMode, StateVector, DEFAULT_SHOTS};
use crate::runlog::RunLog;

pub use config_file::{echo, pairs_to_flags, parse_pairs};

/// Name of the echoed configuration written into every output directory.
pub const CONFIG_ECHO: &str = "config.txt";

#[derive(Debug, Parser)]
#[command(
    name = "qneat",
    version,
    about = "Evolutionary circuit-architecture search for Hamiltonian ground states",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the evolutionary search.
    Run(RunArgs),
    /// Run the parameter-shift gradient-descent baseline.
    Gradient(GradientArgs),
    /// Print the extreme eigenvalues of a Hamiltonian and serialise it.
    Spectrum(SpectrumArgs),
    /// Turn a run log into histogram and curve CSV files.
    Stats(StatsArgs),
    /// Estimate how often a random gate can lower ⟨Σ σz⟩ at a random product state.
    Prop1(Prop1Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Sampled,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CommonArgs {
    /// Read defaults from a `key = value` (or JSON) file; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker-thread cap.
    #[arg(long, env = "QNEAT_THREADS")]
    pub threads: Option<usize>,
}

/// Hamiltonian selection shared by `run`, `gradient` and `spectrum`.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct HamiltonianArgs {
    /// local-x, local-z, tfi or sk.
    #[arg(long)]
    pub hamiltonian: Option<BenchmarkKind>,
    #[arg(long)]
    pub qubits: Option<usize>,
    /// TFI coupling J.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,
    /// TFI transverse field h.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub field: f64,
    /// Seed of the SK couplings; defaults to the run seed (a fresh instance per run).
    #[arg(long)]
    pub instance_seed: Option<u64>,
}

impl HamiltonianArgs {
    fn spec(&self, default_instance_seed: u64) -> Result<HamiltonianSpec> {
        let kind = self
            .hamiltonian
            .ok_or_else(|| Error::Config("--hamiltonian is required".into()))?;
        let n = self
            .qubits
            .ok_or_else(|| Error::Config("--qubits is required".into()))?;
        Ok(HamiltonianSpec {
            kind,
            num_qubits: n,
            coupling: self.coupling,
            field: self.field,
            instance_seed: self.instance_seed.unwrap_or(default_instance_seed),
        })
    }
}

/// Evaluation settings shared by `run` and `gradient`.
#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Shots per measurement setting in sampled mode.
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    /// Per-gate Pauli error probability in sampled mode.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Initial product-state axis; defaults to the Hamiltonian's neutral axis.
    #[arg(long)]
    pub init_axis: Option<Axis>,
}

impl EvalArgs {
    fn mode(&self) -> Result<EvalMode> {
        match self.mode {
            ModeArg::Exact if self.noise != 0.0 => {
                Err(Error::Config("--noise requires --mode sampled".into()))
            }
            ModeArg::Exact => Ok(EvalMode::Exact),
            ModeArg::Sampled => Ok(EvalMode::Sampled {
                shots: self.shots,
                noise: self.noise,
            }),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub hamiltonian: HamiltonianArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub eval: EvalArgs,
    /// Offspring per generation.
    #[arg(long, default_value_t = 4)]
    pub lambda: usize,
    #[arg(long, default_value_t = 150)]
    pub generations: usize,
    /// Stop after this many generations without improvement.
    #[arg(long)]
    pub stagnation_tau: Option<usize>,
    /// Master seed; drawn from entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// INSERT, DELETE, SWAP, MODIFY probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.1,0.1,0.3")]
    pub mutation_probs: Vec<f64>,
    /// Chance of chaining another action.
    #[arg(long, default_value_t = 0.1)]
    pub repeat_prob: f64,
    /// Standard deviation of MODIFY's angle nudge.
    #[arg(long, default_value_t = 0.1)]
    pub modify_sigma: f64,
    /// Draw two-qubit generators with this probability instead of pooling all generators.
    #[arg(long)]
    pub pair_prob: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

impl RunArgs {
    pub fn evolution_config(&self) -> Result<EvolutionConfig> {
        let seed = self
            .seed
            .ok_or_else(|| Error::Config("seed unresolved".into()))?;
        let spec = self.hamiltonian.spec(seed)?;
        let probs: [f64; 4] = self
            .mutation_probs
            .as_slice()
            .try_into()
            .map_err(|_| Error::Config("--mutation-probs takes four values".into()))?;
        let mutation = MutationConfig {
            p_repeat: self.repeat_prob,
            modify_sigma: self.modify_sigma,
            pair_probability: self.pair_prob,
            ..MutationConfig::default().with_action_probabilities(probs)
        };
        let cfg = EvolutionConfig {
            num_qubits: spec.num_qubits,
            lambda: self.lambda,
            max_generations: self.generations,
            stagnation_tau: self.stagnation_tau,
            seed,
            mode: self.eval.mode()?,
            hamiltonian: spec,
            init_axis: self.eval.init_axis,
            mutation,
        };
        cfg.validate().map_err(as_config)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GradientArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub hamiltonian: HamiltonianArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub eval: EvalArgs,
    /// Ansatz layers (7 gives 161 parameters on eight qubits).
    #[arg(long)]
    pub layers: Option<usize>,
    /// Learning rate.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

impl GradientArgs {
    pub fn gradient_config(&self) -> Result<GradientConfig> {
        let seed = self
            .seed
            .ok_or_else(|| Error::Config("seed unresolved".into()))?;
        let spec = self.hamiltonian.spec(seed)?;
        let cfg = GradientConfig {
            num_qubits: spec.num_qubits,
            num_layers: self.layers.unwrap_or(DEFAULT_LAYERS),
            eta: self.eta,
            steps: self.steps,
            seed,
            mode: self.eval.mode()?,
            hamiltonian: spec,
            init_axis: self.eval.init_axis,
        };
        cfg.validate().map_err(as_config)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub hamiltonian: HamiltonianArgs,
    /// Read the Hamiltonian from a JSON file instead.
    #[arg(long, conflicts_with = "hamiltonian")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct StatsArgs {
    /// JSON-lines run log.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Prop1Args {
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Random (state, generator) draws.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum energy drop that counts as useful.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

/// A fully resolved command (seeds filled in, values validated).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
}

impl ExperimentConfig {
    pub fn common(&self) -> &CommonArgs {
        match &self.command {
            Command::Run(a) => &a.common,
            Command::Gradient(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::Stats(a) => &a.common,
            Command::Prop1(a) => &a.common,
        }
    }

    /// The `key = value` echo that reproduces this run via `--config`.
    pub fn echo(&self) -> Result<String> {
        let skip = ["config"];
        match &self.command {
            Command::Run(a) => echo(a, &skip),
            Command::Gradient(a) => echo(a, &skip),
            Command::Spectrum(a) => echo(a, &skip),
            Command::Stats(a) => echo(a, &skip),
            Command::Prop1(a) => echo(a, &skip),
        }
    }
}

/// Failure to produce an [`ExperimentConfig`].
#[derive(Debug)]
pub enum ParseError {
    /// Usage errors, `--help` and `--version`, rendered by clap.
    Clap(clap::Error),
    Invalid(Error),
}

impl From<Error> for ParseError {
    fn from(e: Error) -> Self {
        ParseError::Invalid(e)
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::Config(msg),
        other => other,
    }
}

fn find_config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Parse `args` (program name first). Values from `--config` are applied
/// first and overridden by explicit flags; missing seeds are drawn from
/// entropy.
pub fn parse_config<I, S>(args: I) -> std::result::Result<ExperimentConfig, ParseError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let mut argv = args.clone();
    if args.len() >= 2 && !args[1].starts_with('-') {
        if let Some(path) = find_config_path(&args[2..]) {
            let pairs = config_file::read_pairs(&path)?;
            let flags = pairs_to_flags(&pairs);
            argv = args[..2]
                .iter()
                .cloned()
                .chain(flags)
                .chain(args[2..].iter().cloned())
                .collect();
        }
    }
    let cli = Cli::try_parse_from(argv).map_err(ParseError::Clap)?;
    let mut command = cli.command;
    match &mut command {
        Command::Run(a) => {
            a.seed.get_or_insert_with(rand::random);
            a.evolution_config()?;
        }
        Command::Gradient(a) => {
            a.seed.get_or_insert_with(rand::random);
            a.gradient_config()?;
        }
        Command::Spectrum(a) => {
            if a.input.is_none() {
                a.hamiltonian.spec(0)?;
            }
        }
        Command::Stats(a) => {
            if a.log.is_none() {
                return Err(Error::Config("--log is required".into()).into());
            }
        }
        Command::Prop1(a) => {
            a.seed.get_or_insert_with(rand::random);
            if a.samples == 0 {
                return Err(Error::Config("--samples must be at least 1".into()).into());
            }
            if a.qubits == 0 || a.qubits > crate::quantum::MAX_QUBITS {
                return Err(Error::Config("--qubits out of range".into()).into());
            }
        }
    }
    Ok(ExperimentConfig { command })
}

fn create_file(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut f = create_file(dir, name)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

fn write_stats(dir: &Path, log: &RunLog) -> Result<()> {
    let mut f = create_file(dir, "histogram.csv")?;
    write_histogram_csv(&success_histogram([log]), &mut f)?;
    f.flush()?;
    let mut f = create_file(dir, "curve.csv")?;
    write_curve_csv(&calls_vs_energy(log), &mut f)?;
    f.flush()?;
    Ok(())
}

fn write_log(dir: &Path, log: &RunLog) -> Result<()> {
    let mut f = create_file(dir, "run.jsonl")?;
    log.write_jsonl(&mut f)?;
    f.flush()?;
    write_json(dir, "circuit.json", &log.final_circuit)
}

fn execute(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<()> {
    let dir = &cfg.common().out;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CONFIG_ECHO), cfg.echo()?)?;

    match &cfg.command {
        Command::Run(a) => {
            let ec = a.evolution_config()?;
            let evaluator = ec.evaluator()?;
            write_json(dir, "hamiltonian.json", evaluator.hamiltonian())?;
            let log = run_evolution(&ec, &evaluator)?;
            write_log(dir, &log)?;
            write_stats(dir, &log)?;
            writeln!(
                out,
                "generations={} initial_energy={} final_energy={} gates={} calls={}",
                log.records.len(),
                log.initial_energy,
                log.final_energy,
                log.final_circuit.len(),
                log.records
                    .last()
                    .map_or(log.initial_calls, |r| r.cumulative_calls)
            )?;
        }
        Command::Gradient(a) => {
            let gc = a.gradient_config()?;
            let evaluator = gc.evaluator()?;
            write_json(dir, "hamiltonian.json", evaluator.hamiltonian())?;
            let log = gradient_descent_run(&gc, &evaluator)?;
            write_log(dir, &log)?;
            let mut f = create_file(dir, "curve.csv")?;
            write_curve_csv(&calls_vs_energy(&log), &mut f)?;
            f.flush()?;
            writeln!(
                out,
                "steps={} parameters={} initial_energy={} final_energy={} calls={}",
                log.records.len(),
                log.final_circuit.len(),
                log.initial_energy,
                log.final_energy,
                log.records
                    .last()
                    .map_or(log.initial_calls, |r| r.cumulative_calls)
            )?;
        }
        Command::Spectrum(a) => {
            let h: Hamiltonian = match &a.input {
                Some(path) => serde_json::from_reader(BufReader::new(fs::File::open(path)?))?,
                None => a.hamiltonian.spec(0)?.build()?,
            };
            let (lo, hi) = exact_extremes(&h)?;
            write_json(dir, "hamiltonian.json", &h)?;
            write_json(
                dir,
                "spectrum.json",
                &serde_json::json!({ "n": h.num_qubits(), "e_min": lo, "e_max": hi }),
            )?;
            writeln!(out, "E_min={lo}")?;
            writeln!(out, "E_max={hi}")?;
        }
        Command::Stats(a) => {
            let path = a.log.as_ref().expect("checked at parse time");
            let log = RunLog::read_jsonl(BufReader::new(fs::File::open(path)?))?;
            write_stats(dir, &log)?;
            writeln!(
                out,
                "generations={} accepted={}",
                log.records.len(),
                log.accepted_generations()
            )?;
        }
        Command::Prop1(a) => {
            let n = a.qubits;
            let h = local_pauli_sum(n, Axis::Z)?;
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed.expect("resolved at parse time"));
            let fraction = useful_gate_fraction(
                &h,
                |r: &mut ChaCha8Rng| random_product_state(n, r),
                a.samples,
                &mut rng,
                a.tol,
            )?;
            let zero = useful_generator_fraction(&StateVector::zero(n)?, &h, a.tol)?;
            write_json(
                dir,
                "prop1.json",
                &serde_json::json!({
                    "qubits": n,
                    "samples": a.samples,
                    "useful_fraction": fraction,
                    "zero_state_exhaustive_fraction": zero,
                }),
            )?;
            writeln!(out, "useful_fraction={fraction}")?;
            writeln!(out, "zero_state_exhaustive_fraction={zero}")?;
        }
    }
    Ok(())
}

/// Run a parsed command, writing its report to `out`. Returns the process
/// exit status: 0 on success, otherwise [`Error::exit_code`].
pub fn dispatch(cfg: &ExperimentConfig, out: &mut dyn Write) -> i32 {
    if let Some(t) = cfg.common().threads {
        // A global pool can only be installed once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match execute(cfg, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

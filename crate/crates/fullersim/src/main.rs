use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fullersim::config::Settings;
use fullersim::error::AppError;

/// Quantum annealing simulations of frustrated Ising models on fullerene graphs.
#[derive(Parser)]
#[command(name = "fullersim", version)]
struct Cli {
    /// Key-value config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps and state-vector kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in graph as an edge list.
    Graph(Flags),
    /// Enumerate (or load) the classical ground-state manifold.
    Gs(Flags),
    /// Perturbative ground state over the manifold, per orbit.
    Perturb(Flags),
    /// One anneal: residual energy, dimer count and binned fidelity.
    Evolve(Flags),
    /// Observables over a sweep of anneal times, as CSV.
    Measure(Flags),
    /// Finite-sample floor of the binned infidelity.
    Floor(Flags),
    /// Map anneal times between two fidelity curves.
    Calibrate(Flags),
    /// Graph, manifold, perturbative state, sweep and floor into one folder.
    Pipeline(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Built-in graph name (`graph` subcommand).
    #[arg(long)]
    name: Option<String>,
    /// Built-in graph name or edge-list file.
    #[arg(long)]
    graph: Option<String>,
    /// `default` or a schedule CSV (`s,gamma_ghz,j_ghz`).
    #[arg(long)]
    schedule: Option<String>,
    /// Driver scale of the default ramp at s = 0, GHz.
    #[arg(long)]
    gamma0: Option<String>,
    /// Coupling scale of the default ramp at s = 1, GHz.
    #[arg(long)]
    j0: Option<String>,
    /// Multiply J(s) by this factor in (0, 1].
    #[arg(long)]
    coupling_scale: Option<String>,
    /// Anneal time(s) in ns: `5ns` or `0.1,1,10`.
    #[arg(long)]
    ta: Option<String>,
    /// Log-spaced anneal times `min,max,count` in ns.
    #[arg(long)]
    ta_log: Option<String>,
    /// Normalised time step.
    #[arg(long)]
    ds: Option<String>,
    /// Cap on the physical step in ns (default 0.01), or `off`.
    #[arg(long)]
    max_dt: Option<String>,
    /// Sample count: sampled estimates in `evolve`/`measure`, floor size otherwise.
    #[arg(long)]
    samples: Option<String>,
    /// Repetitions of the fidelity floor.
    #[arg(long)]
    repetitions: Option<String>,
    /// Random seed.
    #[arg(long)]
    seed: Option<String>,
    /// Include global spin inversion in orbit binning (default true).
    #[arg(long)]
    flip: Option<String>,
    /// Emit per-orbit masses.
    #[arg(long)]
    orbit_table: bool,
    /// Ground-state manifold cache file.
    #[arg(long)]
    cache: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Pipeline output folder.
    #[arg(long)]
    out_dir: Option<String>,
    /// Reference curve CSV (`ta_ns,f_binned`).
    #[arg(long)]
    curve_a: Option<String>,
    /// Curve CSV mapped into.
    #[arg(long)]
    curve_b: Option<String>,
    /// Also write the fidelity curve here (`measure`).
    #[arg(long)]
    curve_out: Option<String>,
}

impl Flags {
    fn pairs(self) -> Vec<(&'static str, String)> {
        let fields = [
            ("name", self.name),
            ("graph", self.graph),
            ("schedule", self.schedule),
            ("gamma0", self.gamma0),
            ("j0", self.j0),
            ("coupling_scale", self.coupling_scale),
            ("ta", self.ta),
            ("ta_log", self.ta_log),
            ("ds", self.ds),
            ("max_dt", self.max_dt),
            ("samples", self.samples),
            ("repetitions", self.repetitions),
            ("seed", self.seed),
            ("flip", self.flip),
            ("orbit_table", self.orbit_table.then(|| "true".to_owned())),
            ("cache", self.cache),
            ("out", self.out),
            ("out_dir", self.out_dir),
            ("curve_a", self.curve_a),
            ("curve_b", self.curve_b),
            ("curve_out", self.curve_out),
        ];
        fields.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }
}

fn execute(cli: Cli) -> Result<(), AppError> {
    let (command, flags) = match cli.command {
        Command::Graph(f) => ("graph", f),
        Command::Gs(f) => ("gs", f),
        Command::Perturb(f) => ("perturb", f),
        Command::Evolve(f) => ("evolve", f),
        Command::Measure(f) => ("measure", f),
        Command::Floor(f) => ("floor", f),
        Command::Calibrate(f) => ("calibrate", f),
        Command::Pipeline(f) => ("pipeline", f),
    };
    let base = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let mut settings = base.overlay(flags.pairs());
    if let Some(n) = cli.threads {
        settings = settings.overlay([("threads", n.to_string())]);
    }
    if let Some(n) = settings.usize("threads")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Config(format!("thread pool: {e}")))?;
    }
    fullersim::run(command, &settings)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fullersim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

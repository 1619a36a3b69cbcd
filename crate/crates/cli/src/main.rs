use std::{
    fs::File,
    io::{self, BufWriter, Write},
    path::PathBuf,
    process::ExitCode,
};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qoinfo::{
    dynamics::Bonds,
    experiments::{
        self, format_float, write_json, write_records_csv, write_table1_csv, DistributionReport, OutputFormat,
        RunConfig,
    },
    qinformation::{q_information_bounds, q_information_reduced, traced_choice_spread},
    states::{make_ghz_phase, MmesSearch, PureState, Registry},
    Error,
};

#[derive(Parser)]
#[command(name = "qoinfo", version, about = "Q-information of multipartite qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the reference table of Q-information values.
    Table1(Common),
    /// Reduced Q-information of every binary-coefficient 4-qubit state.
    Fig1a(Common),
    /// Q-information of 3-qubit marginals of Gaussian random states, n = 4..7.
    Fig1b(Common),
    /// Q-information time series under the order 1-4 Hamiltonians.
    Fig2(Common),
    /// Q-information of a named state or of states in an amplitude file.
    Qinfo(QinfoArgs),
    /// Search for a maximally multipartite entangled state.
    MmesSearch(MmesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 501)]
    steps: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Periodic bonds for the order-2 and order-3 Hamiltonians.
    #[arg(long)]
    periodic_bonds: bool,
    #[arg(long, default_value_t = 101)]
    bins: usize,
    #[arg(long, default_value_t = -1.5, allow_hyphen_values = true)]
    hist_min: f64,
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    hist_max: f64,
    /// Add entropy bounds and traced-choice spread to 4-qubit records.
    #[arg(long)]
    diagnostics: bool,
    /// Amplitude file replacing the built-in registry.
    #[arg(long)]
    registry: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        let defaults = RunConfig::default();
        RunConfig {
            seed: self.seed,
            samples: self.samples,
            t_max: self.t_max,
            steps: self.steps,
            bins: self.bins,
            hist_range: (self.hist_min, self.hist_max),
            workers: self.workers.unwrap_or(defaults.workers),
            bonds: if self.periodic_bonds { Bonds::Periodic } else { Bonds::Printed },
            diagnostics: self.diagnostics,
            format: match self.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            },
            out: self.out.clone(),
        }
    }

    fn registry(&self) -> Result<Registry, Error> {
        load_registry(self.registry.as_ref())
    }
}

#[derive(Args)]
struct QinfoArgs {
    /// Registry name (GHZ, W, GHZ_PHASE, BASIS, YC, HD, HS, MMES).
    #[arg(long, required_unless_present = "amplitudes")]
    state: Option<String>,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Phase for GHZ_PHASE.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Amplitude file in the registry record format.
    #[arg(long, conflicts_with = "state")]
    amplitudes: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    traced: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct MmesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200_000)]
    max_iters: usize,
    /// Write the state in the registry record format.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_registry(path: Option<&PathBuf>) -> Result<Registry, Error> {
    match path {
        Some(p) => Registry::from_path(p),
        None => Registry::builtin(),
    }
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn report_distribution(rep: &DistributionReport) {
    for g in &rep.groups {
        let s = &g.summary;
        eprintln!(
            "{} n={}: count={} min={:.6} max={:.6} mean={:.6} std={:.6} negative={} positive={} zero={}",
            rep.experiment, g.n, s.count, s.min, s.max, s.mean, s.std, s.negative, s.positive, s.zero
        );
    }
}

fn emit_distribution(args: &Common, rep: &DistributionReport) -> Result<(), Error> {
    let cfg = args.config();
    let w = sink(cfg.out.as_ref())?;
    match cfg.format {
        OutputFormat::Csv => write_records_csv(&rep.records, cfg.diagnostics, w)?,
        OutputFormat::Json => write_json(rep, w)?,
    }
    report_distribution(rep);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Table1(args) => {
            let cfg = args.config();
            let reg = args.registry()?;
            let rep = experiments::run_table1(&cfg, &reg)?;
            let w = sink(cfg.out.as_ref())?;
            match cfg.format {
                OutputFormat::Csv => write_table1_csv(&rep.rows, w)?,
                OutputFormat::Json => write_json(&rep, w)?,
            }
            let mut failures = rep.failures();
            for f in &failures {
                eprintln!("{f}");
            }
            if !failures.is_empty() {
                return Err(failures.swap_remove(0));
            }
        }
        Command::Fig1a(args) => {
            let rep = experiments::run_fig1a(&args.config())?;
            emit_distribution(&args, &rep)?;
        }
        Command::Fig1b(args) => {
            let rep = experiments::run_fig1b(&args.config())?;
            emit_distribution(&args, &rep)?;
        }
        Command::Fig2(args) => {
            let cfg = args.config();
            let rep = experiments::run_fig2(&cfg, &args.registry()?)?;
            let w = sink(cfg.out.as_ref())?;
            match cfg.format {
                OutputFormat::Csv => write_records_csv(&rep.records, cfg.diagnostics, w)?,
                OutputFormat::Json => write_json(&rep, w)?,
            }
            for s in &rep.series {
                eprintln!(
                    "H{} {:>4}: min={:+.6} max={:+.6} total_variation={:.3e}",
                    s.order, s.state, s.min, s.max, s.total_variation
                );
            }
        }
        Command::Qinfo(args) => qinfo(args)?,
        Command::MmesSearch(args) => {
            let outcome = MmesSearch::new(args.n, args.seed).max_iters(args.max_iters).run()?;
            eprintln!(
                "MMES n={}: mean balanced purity {:.12}, omega {:.6}, {} restarts, {} evaluations",
                args.n, outcome.purity, outcome.omega, outcome.restarts, outcome.iterations
            );
            let mut w = sink(args.out.as_ref())?;
            writeln!(w, "# name,n_qubits,basis_index,re,im,source,expected_omega")?;
            for (i, a) in outcome.state.amplitudes().iter().enumerate() {
                writeln!(
                    w,
                    "MMES,{},{i},{},{},\"optimized, seed {}\",{}",
                    args.n,
                    format_float(a.re),
                    format_float(a.im),
                    args.seed,
                    format_float(outcome.omega)
                )?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn qinfo(args: QinfoArgs) -> Result<(), Error> {
    let states: Vec<(String, PureState)> = match (&args.amplitudes, &args.state) {
        (Some(path), _) => Registry::from_path(path)?
            .entries()
            .iter()
            .map(|e| (format!("{}({})", e.name, e.n_qubits), e.state()))
            .collect(),
        (None, Some(name)) if name == "GHZ_PHASE" && args.alpha.is_some() => {
            vec![(name.clone(), make_ghz_phase(args.alpha.unwrap_or_default()))]
        }
        (None, Some(name)) => {
            let e = Registry::builtin()?.get_unvalidated(name, args.n)?;
            vec![(format!("{name}({})", args.n), e.state())]
        }
        (None, None) => return Err(Error::Domain("either --state or --amplitudes is required".into())),
    };
    let mut out = io::stdout().lock();
    for (name, psi) in states {
        let r = q_information_reduced(&psi, args.traced)?;
        let (bounds, spread) = if psi.n_qubits() == 4 {
            (Some(q_information_bounds(&psi)?), Some(traced_choice_spread(&psi)?))
        } else {
            (None, None)
        };
        match args.format {
            Format::Json => {
                let v = serde_json::json!({
                    "state": name,
                    "n_qubits": psi.n_qubits(),
                    "traced": args.traced,
                    "result": r,
                    "bounds": bounds,
                    "traced_spread": spread,
                });
                writeln!(out, "{v}")?;
            }
            Format::Csv => {
                let b = bounds.map_or(",".to_string(), |b| format!("{},{}", format_float(b.lower), format_float(b.upper)));
                writeln!(
                    out,
                    "{name},{},{},{},{b},{}",
                    psi.n_qubits(),
                    args.traced,
                    format_float(r.omega),
                    spread.map(format_float).unwrap_or_default()
                )?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line frontend: circuit generation, compilation, benchmark grids,
//! density sweeps and protocol verification.
//!
//! Exit codes: 0 on success, 1 on compilation or verification failure,
//! 2 on usage errors. Logs go to stderr only.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use patchroute::bench::{records_json, run_density_sweep, run_grid, write_csv};
use patchroute::optimizer::{compile_optimized, AnnealConfig};
use patchroute::protocol::{verify_protocol, ProtocolKind, ProtocolSpec};
use patchroute::router::route_static;
use patchroute::{build_layout, LayeredCircuit, LayoutName};

#[derive(Parser)]
#[command(
    name = "patchroute",
    about = "Compile logical CNOT circuits onto a lattice-surgery patch grid",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random layered CNOT circuit.
    Gen(GenArgs),
    /// Compile a circuit file to a routed schedule.
    Compile(CompileArgs),
    /// Run the layout x depth benchmark grid.
    Bench(BenchArgs),
    /// Run the gates-per-layer density sweep at a fixed total gate count.
    Sweep(SweepArgs),
    /// Verify the measurement-based CNOT protocols by brute force.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    qubits: u32,
    /// Gates per logical layer.
    #[arg(long)]
    g: u32,
    /// Number of logical layers.
    #[arg(long)]
    depth: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Static,
    Optimized,
}

#[derive(Args)]
struct CompileArgs {
    /// Circuit file in the text format.
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value = "pair")]
    layout: String,
    /// Data qubits to place on the layout (at least the circuit's count).
    #[arg(long)]
    qubits: u32,
    #[arg(long, value_enum, default_value_t = Mode::Optimized)]
    mode: Mode,
    #[command(flatten)]
    anneal: AnnealArgs,
    /// Schedule JSON output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also dump the routing graph as JSON.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Args)]
struct AnnealArgs {
    /// Optional JSON config file; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lookahead layers.
    #[arg(long)]
    k: Option<usize>,
    /// Neighborhood radius in edges.
    #[arg(long)]
    r: Option<u32>,
    /// Annealing iterations per window (0 disables the optimizer).
    #[arg(long)]
    iters: Option<u32>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    cooling: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl AnnealArgs {
    fn resolve(&self) -> Result<AnnealConfig, patchroute::Error> {
        let mut cfg = match &self.config {
            Some(path) => AnnealConfig::from_json(&fs::read_to_string(path)?)?,
            None => AnnealConfig::default(),
        };
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(r) = self.r {
            cfg.r = r;
        }
        if let Some(iters) = self.iters {
            cfg.iterations = iters;
        }
        if let Some(t0) = self.t0 {
            cfg.t0 = t0;
        }
        if let Some(cooling) = self.cooling {
            cfg.cooling = cooling;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated layouts, e.g. single,pair,triple,hex.
    #[arg(long, value_delimiter = ',', default_value = "single,pair,triple,hex")]
    layouts: Vec<String>,
    /// Comma-separated logical depths.
    #[arg(long, value_delimiter = ',', default_value = "40,80,160,320")]
    depths: Vec<usize>,
    #[arg(long, default_value_t = 120)]
    qubits: u32,
    #[arg(long, default_value_t = 8)]
    g: u32,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[command(flatten)]
    anneal: AnnealArgs,
    /// CSV output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Companion JSON with the raw run records.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Parallel sample workers (1 keeps everything on one thread).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated gates-per-layer values.
    #[arg(long, value_delimiter = ',', default_value = "2,5,10,20,25")]
    g: Vec<u32>,
    #[arg(long, default_value_t = 500)]
    total_gates: u32,
    #[arg(long, default_value_t = 60)]
    qubits: u32,
    #[arg(long, default_value = "triple")]
    layout: String,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[command(flatten)]
    anneal: AnnealArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    records: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolChoice {
    All,
    Standard,
    TeleControl,
    TeleTarget,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = ProtocolChoice::All)]
    protocol: ProtocolChoice,
    /// Report JSON output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_layout(name: &str) -> Result<LayoutName, patchroute::Error> {
    name.parse()
}

fn load_circuit(path: &Path) -> Result<LayeredCircuit, patchroute::Error> {
    LayeredCircuit::parse(&fs::read_to_string(path)?)
}

fn run(cli: Cli) -> Result<ExitCode, patchroute::Error> {
    match cli.command {
        Command::Gen(args) => {
            eprintln!("resolved seed: {}", args.seed);
            let circuit = LayeredCircuit::random(args.qubits, args.g, args.depth, args.seed)?;
            emit(&args.out, &circuit.to_text())?;
        }
        Command::Compile(args) => {
            let cfg = args.anneal.resolve()?;
            eprintln!("resolved seed: {}", cfg.seed);
            let layout = parse_layout(&args.layout)?;
            let circuit = load_circuit(&args.circuit)?;
            let (graph, mapping) = build_layout(layout, args.qubits, cfg.seed)?;
            if let Some(path) = &args.graph_out {
                fs::write(path, graph.to_json())?;
            }
            let schedule = match args.mode {
                Mode::Static => route_static(&graph, &mapping, &circuit)?,
                Mode::Optimized => compile_optimized(&graph, &mapping, &circuit, &cfg)?,
            };
            let summary = format!(
                "d_L = {}\nrouted depth = {}\n",
                circuit.logical_depth(),
                schedule.depth
            );
            match &args.out {
                Some(path) => {
                    fs::write(path, schedule.to_json())?;
                    print!("{summary}");
                }
                None => {
                    println!("{}", schedule.to_json());
                    eprint!("{summary}");
                }
            }
        }
        Command::Bench(args) => {
            let cfg = args.anneal.resolve()?;
            eprintln!("resolved seed: {}", cfg.seed);
            let layouts = args
                .layouts
                .iter()
                .map(|s| parse_layout(s))
                .collect::<Result<Vec<_>, _>>()?;
            let grid = run_grid(
                &layouts,
                &args.depths,
                args.qubits,
                args.g,
                args.samples,
                &cfg,
                args.jobs,
            )?;
            emit(&args.out, &write_csv(&grid.rows))?;
            if let Some(path) = &args.records {
                fs::write(path, records_json(&grid.records))?;
            }
        }
        Command::Sweep(args) => {
            let cfg = args.anneal.resolve()?;
            eprintln!("resolved seed: {}", cfg.seed);
            let layout = parse_layout(&args.layout)?;
            let grid = run_density_sweep(
                &args.g,
                args.total_gates,
                args.qubits,
                layout,
                args.samples,
                &cfg,
                args.jobs,
            )?;
            emit(&args.out, &write_csv(&grid.rows))?;
            if let Some(path) = &args.records {
                fs::write(path, records_json(&grid.records))?;
            }
        }
        Command::Verify(args) => {
            let kinds: Vec<ProtocolKind> = match args.protocol {
                ProtocolChoice::All => vec![
                    ProtocolKind::StandardCnot,
                    ProtocolKind::CnotTeleportControl,
                    ProtocolKind::CnotTeleportTarget,
                ],
                ProtocolChoice::Standard => vec![ProtocolKind::StandardCnot],
                ProtocolChoice::TeleControl => vec![ProtocolKind::CnotTeleportControl],
                ProtocolChoice::TeleTarget => vec![ProtocolKind::CnotTeleportTarget],
            };
            let mut all_pass = true;
            let mut reports = Vec::new();
            for kind in kinds {
                let report = verify_protocol(&ProtocolSpec::for_kind(kind))?;
                all_pass &= report.pass;
                reports.push(report);
            }
            let json = if reports.len() == 1 {
                reports[0].to_json()
            } else {
                let joined = reports
                    .iter()
                    .map(|r| r.to_json())
                    .collect::<Vec<_>>()
                    .join(",\n");
                format!("[\n{joined}\n]")
            };
            emit(&args.out, &format!("{json}\n"))?;
            if !all_pass {
                eprintln!("protocol verification failed");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

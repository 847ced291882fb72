use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use onesat::bench::{emit_csv, plot_data, Axis, SweepConfig, SweepResult, Sweeper};
use onesat::counting::{count_energy_states, count_solutions};
use onesat::dimacs::{parse_dimacs_with, write_dimacs, ParseOptions};
use onesat::dpll::{annotate_excited, export_tree, solve, DpllConfig, Status, TreeFormat, TreeLabel, ValueOrder};
use onesat::ensemble::{
    build_ensemble, estimate_p_r1, instance_file_name, write_store, EnsembleKind, EnsembleSpec, ManifestEntry,
};
use onesat::generator::{generate, GenSpec};
use onesat::rng::derive_seed;
use onesat::sls::{run_many, Algorithm, SlsParams};
use onesat::Formula;

type CliResult<T = ()> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(
    name = "onesat",
    version,
    about = "Random 3-SAT ensembles with one solution, and the solvers to time them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// DIMACS file; reads stdin when omitted or `-`.
    file: Option<PathBuf>,
    /// Accept `%` trailers, header count mismatches and repeated literals.
    #[arg(long)]
    lenient: bool,
}

impl Input {
    fn read(&self) -> CliResult<Formula> {
        let text = match &self.file {
            Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
            _ => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                s
            }
        };
        Ok(parse_dimacs_with(&text, ParseOptions { strict: !self.lenient })?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeArg {
    Dot,
    Net,
}

#[derive(Clone, Copy, ValueEnum)]
enum Annotation {
    Depth,
    Excited,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    True,
    False,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgArg {
    Gwsat,
    Walksat,
    #[value(name = "anovelty+")]
    AnoveltyPlus,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    R1,
    Sat,
    Any,
}

#[derive(Subcommand)]
enum Command {
    /// Unfiltered random 3-SAT instances, one DIMACS file each plus a manifest.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "m", required_unless_present = "m")]
        alpha: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Number of satisfying assignments, optionally capped.
    Count {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Number of assignments violating exactly `k` clauses.
    EnergyStates {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Solve with DPLL, reporting the number of recursive calls.
    Dpll {
        #[command(flatten)]
        input: Input,
        /// Export the search tree in this format.
        #[arg(long)]
        tree: Option<TreeArg>,
        /// Tree file; defaults to `search_tree.dot` or `search_tree.net`.
        #[arg(long, requires = "tree")]
        tree_out: Option<PathBuf>,
        /// Node labels of the exported tree.
        #[arg(long, default_value = "depth", requires = "tree")]
        annotate: Annotation,
        #[arg(long, default_value = "off")]
        unit_prop: Switch,
        #[arg(long, default_value = "true")]
        order: OrderArg,
        /// Seed for `--order random`.
        #[arg(long, default_value_t = 0)]
        order_seed: u64,
    },
    /// Local search runs, one JSON line per run.
    Sls {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "gwsat")]
        alg: AlgArg,
        /// Random-walk probability of GWSAT and Walksat.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Random-walk probability of Adaptive Novelty+.
        #[arg(long, default_value_t = 0.01)]
        wp: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_flips: u64,
        #[arg(long, default_value_t = 1)]
        tries: u32,
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Filtered ensemble written as an instance store.
    Ensemble {
        #[arg(long, default_value = "r1")]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000_000)]
        max_attempts: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fraction of random formulas with exactly one solution, as CSV.
    #[command(name = "p-r1")]
    PR1 {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha_list: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Running-time experiments.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Subcommand)]
enum BenchKind {
    /// Running time against clause density at fixed n.
    AlphaSweep(BenchArgs),
    /// Running time against n at fixed densities, with fits.
    Scaling(BenchArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files and `summary.json`.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write `plot.dat` with whitespace-separated columns.
    #[arg(long)]
    emit_plot_data: bool,
}

/// Counts fit a JSON number up to `2^64 - 1`; larger ones are written as strings.
fn count_json(count: u128) -> serde_json::Value {
    match u64::try_from(count) {
        Ok(c) => json!(c),
        Err(_) => json!(count.to_string()),
    }
}

fn print_json(value: &serde_json::Value) -> CliResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn generate_cmd(n: usize, m: usize, seed: u64, count: usize, out: &Path) -> CliResult {
    fs::create_dir_all(out)?;
    let mut manifest = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(out.join("manifest.jsonl"))?;
    for i in 0..count {
        let spec = GenSpec::new(n, m, derive_seed(seed, i as u64))?;
        let f = generate(&spec)?;
        let entry = ManifestEntry {
            index: i,
            seed: spec.seed,
            n,
            m,
            r: None,
            attempts_before: i as u64,
            file: instance_file_name(i),
        };
        fs::write(out.join(&entry.file), write_dimacs(&f))?;
        writeln!(manifest, "{}", serde_json::to_string(&entry)?)?;
    }
    Ok(())
}

fn dpll_cmd(
    f: &Formula,
    tree: Option<TreeArg>,
    tree_out: Option<PathBuf>,
    annotate: Annotation,
    unit_prop: Switch,
    order: ValueOrder,
) -> CliResult {
    let cfg = DpllConfig {
        unit_propagation: matches!(unit_prop, Switch::On),
        value_order: order,
        record_tree: tree.is_some(),
        ..DpllConfig::default()
    };
    let out = solve(f, &cfg);
    if let (Some(format), Some(t)) = (tree, &out.tree) {
        let (format, ext) = match format {
            TreeArg::Dot => (TreeFormat::Dot, "dot"),
            TreeArg::Net => (TreeFormat::Pajek, "net"),
        };
        let text = match annotate {
            Annotation::Depth => export_tree(t, format, TreeLabel::Depth)?,
            Annotation::Excited => export_tree(&annotate_excited(t, f)?, format, TreeLabel::Excited)?,
        };
        fs::write(
            tree_out.unwrap_or_else(|| PathBuf::from(format!("search_tree.{ext}"))),
            text,
        )?;
    }
    let mut report = json!({ "calls": out.calls });
    match &out.status {
        Status::Sat(a) => {
            report["status"] = json!("SAT");
            report["assignment"] = json!(a.literals().map(|l| l.to_dimacs()).collect::<Vec<_>>());
        }
        Status::Unsat => report["status"] = json!("UNSAT"),
    }
    print_json(&report)
}

fn bench_cmd(args: &BenchArgs, scaling: bool) -> CliResult {
    let text = fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let cfg: SweepConfig = serde_json::from_str(&text)?;
    let mut sweeper = Sweeper::new();
    let res: SweepResult = match (scaling, &cfg.axis) {
        (false, Axis::Alpha { .. }) => sweeper.alpha_sweep(&cfg)?,
        (true, Axis::N { .. }) => sweeper.scaling_run(&cfg)?,
        (false, _) => return Err("alpha-sweep needs \"axis\": \"alpha\"".into()),
        (true, _) => return Err("scaling needs \"axis\": \"n\"".into()),
    };
    fs::create_dir_all(&args.out)?;
    let mut files = Vec::new();
    for curve in &res.curves {
        let name = format!("curve_{}.csv", curve.label.replace('@', "_alpha"));
        fs::write(args.out.join(&name), emit_csv(&curve.points)?)?;
        files.push(name);
    }
    let summary = json!({ "config": cfg, "csv": files, "curves": res.curves, "fits": res.fits });
    fs::write(args.out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    if args.emit_plot_data {
        fs::write(args.out.join("plot.dat"), plot_data(&res))?;
    }
    print_json(&json!({ "curves": files.len(), "fits": res.fits }))
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate {
            n,
            alpha,
            m,
            seed,
            count,
            out,
        } => {
            let m = match (m, alpha) {
                (Some(m), _) => m,
                (None, Some(a)) => GenSpec::from_alpha(n, a, 0)?.m,
                (None, None) => unreachable!("clap requires one of --m and --alpha"),
            };
            generate_cmd(n, m, seed, count, &out)
        }
        Command::Count { input, cap } => {
            let r = count_solutions(&input.read()?, cap)?;
            print_json(&json!({ "count": count_json(r.count), "capped": r.capped }))
        }
        Command::EnergyStates { input, k } => {
            let count = count_energy_states(&input.read()?, k)?;
            print_json(&json!({ "count": count_json(count), "capped": false }))
        }
        Command::Dpll {
            input,
            tree,
            tree_out,
            annotate,
            unit_prop,
            order,
            order_seed,
        } => {
            let order = match order {
                OrderArg::True => ValueOrder::TrueFirst,
                OrderArg::False => ValueOrder::FalseFirst,
                OrderArg::Random => ValueOrder::Randomized(order_seed),
            };
            dpll_cmd(&input.read()?, tree, tree_out, annotate, unit_prop, order)
        }
        Command::Sls {
            input,
            alg,
            p,
            wp,
            max_flips,
            tries,
            runs,
            seed,
        } => {
            let params = SlsParams {
                algorithm: match alg {
                    AlgArg::Gwsat => Algorithm::Gwsat,
                    AlgArg::Walksat => Algorithm::Walksat,
                    AlgArg::AnoveltyPlus => Algorithm::AdaptiveNoveltyPlus,
                },
                walk_probability: p,
                wp,
                max_flips,
                tries,
                seed,
                ..SlsParams::default()
            };
            params.validate()?;
            let f = input.read()?;
            for (seed, r) in run_many(&f, &params, runs)? {
                print_json(&json!({ "found": r.found, "flips": r.flips, "try": r.try_index, "seed": seed }))?;
            }
            Ok(())
        }
        Command::Ensemble {
            kind,
            n,
            alpha,
            count,
            seed,
            max_attempts,
            out,
        } => {
            let kind = match kind {
                KindArg::R1 => EnsembleKind::R1,
                KindArg::Sat => EnsembleKind::Sat,
                KindArg::Any => EnsembleKind::Any,
            };
            let spec = EnsembleSpec::with_alpha(kind, n, alpha, count, seed, max_attempts)?;
            let e = build_ensemble(&spec)?;
            write_store(&out, &e.records)?;
            print_json(&json!({
                "kind": kind,
                "n": n,
                "m": spec.m,
                "accepted": e.stats.accepted,
                "attempts": e.stats.attempts,
                "p_hat": e.stats.p_hat,
                "half_width": e.stats.half_width,
                "shortfall": e.shortfall,
            }))
        }
        Command::PR1 {
            n,
            alpha_list,
            samples,
            seed,
        } => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            w.write_record(["alpha", "p_hat", "half_width", "samples"])?;
            for (i, alpha) in alpha_list.into_iter().enumerate() {
                let s = estimate_p_r1(n, alpha, samples, derive_seed(seed, i as u64))?;
                w.write_record([
                    alpha.to_string(),
                    s.p_hat.to_string(),
                    s.half_width.to_string(),
                    samples.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Bench { kind } => match kind {
            BenchKind::AlphaSweep(args) => bench_cmd(&args, false),
            BenchKind::Scaling(args) => bench_cmd(&args, true),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

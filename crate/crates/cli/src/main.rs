use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use repsel::bench::{
    gap_scaling_table, run_algorithm, run_bench, write_csv, write_gap_table, Algorithm, BenchConfig,
    CorpusEntry, GeneratorSpec,
};
use repsel::generators::{
    augment_regret, export_layered_graph, gen_gap_capped, gen_random, reduce_labelcover, ReductionConfig,
    DEFAULT_SCENARIO_CAP,
};
use repsel::io::{parse_instance_file, parse_label_cover, write_instance, write_instance_file, InstanceFile};
use repsel::lp::{solve_lstar, solve_lstar_bisect};
use repsel::rounding::{round_pessimistic, round_randomized};
use repsel::{enum_cap_from_env, Error, Instance, Objective};

#[derive(Parser)]
#[command(name = "repsel", version, about = "Robust representatives selection solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and print its dimensions
    Validate(InputArg),
    /// Solve an instance with one algorithm
    Solve(SolveArgs),
    /// Minimal LP threshold L*
    Lstar(LstarArgs),
    /// Generate instances
    #[command(subcommand)]
    Gen(GenCommand),
    /// Layered graph of an instance in DOT format
    ExportGraph(ExportArgs),
    /// Run algorithms over a generated corpus and write a CSV report
    Bench(BenchArgs),
}

#[derive(Args)]
struct InputArg {
    /// Instance file, `-` or absent for standard input
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "brute")]
    algo: Algorithm,
    #[arg(long, default_value = "minmax")]
    objective: Objective,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
struct LstarArgs {
    /// Also report the bisection estimate at this tolerance
    #[arg(long)]
    bisect: Option<f64>,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Integrality-gap family with p groups of p tools and p^p scenarios
    Gap {
        p: usize,
        #[arg(long, default_value_t = DEFAULT_SCENARIO_CAP)]
        cap: u128,
    },
    /// Uniform random costs
    Random {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        cost_max: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduce a Label Cover instance (JSON) to a min-max instance
    Labelcover {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long, default_value_t = DEFAULT_SCENARIO_CAP)]
        cap: u128,
    },
    /// Add the dummy group that turns min-max into min-max regret
    AugmentRegret {
        #[arg(long)]
        dummy_cost: Option<u64>,
        #[command(flatten)]
        input: InputArg,
    },
}

#[derive(Args)]
struct ExportArgs {
    /// Route every tool through its own node and a zero-cost dummy arc
    #[arg(long)]
    dummy_arcs: bool,
    #[command(flatten)]
    input: InputArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Gap family sizes, e.g. `2,3,4`
    #[arg(long, value_delimiter = ',')]
    gap: Vec<usize>,
    /// Random family `p:r:K:cost_max`, repeatable
    #[arg(long, value_parser = parse_random_spec)]
    random: Vec<GeneratorSpec>,
    /// Instance files run as-is
    #[arg(long)]
    instance: Vec<PathBuf>,
    /// Seeds, e.g. `0..10` or `1,5,9`
    #[arg(long, default_value = "0", value_parser = parse_seeds)]
    seeds: Seeds,
    #[arg(long, value_delimiter = ',', default_value = "brute,maxagg,rmax,pessimistic")]
    algos: Vec<Algorithm>,
    #[arg(long, default_value = "minmax")]
    objective: Objective,
    /// Record wall time per run (makes the report nondeterministic)
    #[arg(long)]
    timing: bool,
    /// Print the gap-family scaling table instead of the per-run report
    #[arg(long)]
    gap_table: bool,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.parse().map_err(|e| format!("{e}"))?;
        let b: u64 = b.parse().map_err(|e| format!("{e}"))?;
        return Ok(Seeds((a..b).collect()));
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Seeds)
}

fn parse_random_spec(s: &str) -> Result<GeneratorSpec, String> {
    let parts: Vec<u64> = s
        .split(':')
        .map(|v| v.parse().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [p, r, k, cost_max] => Ok(GeneratorSpec::Random {
            p: p as usize,
            r: r as usize,
            k: k as usize,
            cost_max,
        }),
        _ => Err("expected p:r:K:cost_max".into()),
    }
}

fn read_input(input: &InputArg) -> repsel::Result<InstanceFile> {
    let text = match input.file.as_deref() {
        None => read_stdin()?,
        Some(p) if p == Path::new("-") => read_stdin()?,
        Some(p) => fs::read_to_string(p)?,
    };
    parse_instance_file(&text)
}

fn read_stdin() -> io::Result<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

fn print_json(v: &Value) -> repsel::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn print_text(s: &str) -> repsel::Result<()> {
    io::stdout().lock().write_all(s.as_bytes())?;
    Ok(())
}

fn validate(args: InputArg) -> repsel::Result<()> {
    let f = read_input(&args)?;
    let i = &f.instance;
    print_json(&json!({
        "valid": true,
        "p": i.num_groups(),
        "n": i.num_tools(),
        "K": i.num_scenarios(),
        "r_max": i.r_max(),
        "selections": i.selection_count().to_string(),
    }))
}

fn solve(args: SolveArgs) -> repsel::Result<()> {
    let inst = read_input(&args.input)?.instance;
    let cap = enum_cap_from_env();
    let mut out = json!({
        "algorithm": args.algo.name(),
        "objective": args.objective.to_string(),
    });
    let lp = match args.algo {
        Algorithm::Rmax | Algorithm::Randomized | Algorithm::Pessimistic => Some(solve_lstar(&inst)?),
        _ => None,
    };
    let selection = match (args.algo, &lp) {
        (Algorithm::Pessimistic, Some(lp)) => {
            let report = round_pessimistic(&inst, lp)?;
            out["lambda"] = json!(report.lambda);
            out["estimator_trace"] = json!(report.estimator_trace);
            out["thresholds_hold"] = json!(report.thresholds_hold());
            report.selection
        }
        (Algorithm::Randomized, Some(lp)) => round_randomized(&inst, lp, args.seed).selection,
        _ => run_algorithm(&inst, args.algo, args.objective, lp.as_ref(), args.seed, cap)?,
    };
    if let Some(lp) = &lp {
        out["l_star"] = json!(lp.l_star);
    }
    if args.algo == Algorithm::Randomized {
        out["seed"] = json!(args.seed);
    }
    let report = inst.evaluate(&selection)?;
    out["value"] = json!(inst.objective_value(&selection, args.objective)?);
    out["selection"] = json!(selection.chosen());
    if let Some(names) = inst.names() {
        out["names"] = json!(selection.chosen().iter().map(|&t| &names[t]).collect::<Vec<_>>());
    }
    out["cost1"] = json!(report.cost1);
    out["cost2"] = json!(report.cost2);
    out["per_scenario_cost"] = json!(report.per_scenario_cost);
    print_json(&out)
}

fn lstar(args: LstarArgs) -> repsel::Result<()> {
    let inst = read_input(&args.input)?.instance;
    let lp = solve_lstar(&inst)?;
    let mut out = json!({
        "l_star": lp.l_star,
        "chosen_breakpoint": lp.chosen_breakpoint,
        "breakpoints": lp.breakpoints,
        "x": lp.solution.x,
    });
    if let Some(tol) = args.bisect {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("bisection tolerance {tol} must be positive")));
        }
        out["bisect"] = json!(solve_lstar_bisect(&inst, tol));
    }
    print_json(&out)
}

fn gen(cmd: GenCommand) -> repsel::Result<()> {
    let text = match cmd {
        GenCommand::Gap { p, cap } => write_instance(&gen_gap_capped(p, cap)?),
        GenCommand::Random { p, r, k, cost_max, seed } => {
            write_instance(&gen_random(p, r, k, cost_max, seed)?)
        }
        GenCommand::Labelcover { file, g, cap } => {
            let lc = parse_label_cover(&fs::read_to_string(file)?)?;
            let red = reduce_labelcover(&lc, ReductionConfig { g, scenario_cap: cap })?;
            let mut meta = serde_json::Map::new();
            meta.insert("generator".into(), json!("labelcover"));
            meta.insert("g".into(), json!(g));
            meta.insert("edges".into(), json!(red.edges));
            meta.insert("tools".into(), json!(red.tools));
            write_instance_file(&InstanceFile {
                instance: red.instance,
                metadata: Some(meta),
            })
        }
        GenCommand::AugmentRegret { dummy_cost, input } => {
            let inst = read_input(&input)?.instance;
            write_instance(&augment_regret(&inst, dummy_cost))
        }
    };
    print_text(&text)
}

fn export_graph(args: ExportArgs) -> repsel::Result<()> {
    let inst = read_input(&args.input)?.instance;
    print_text(&export_layered_graph(&inst, args.dummy_arcs).to_dot())
}

fn load_fixed(path: &Path) -> repsel::Result<GeneratorSpec> {
    let instance: Instance = parse_instance_file(&fs::read_to_string(path)?)?.instance;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(GeneratorSpec::Fixed { id, instance })
}

fn bench(args: BenchArgs) -> repsel::Result<()> {
    let cap = enum_cap_from_env();
    let mut out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    if args.gap_table {
        let ps = if args.gap.is_empty() { vec![2, 3, 4, 5] } else { args.gap };
        return write_gap_table(&gap_scaling_table(&ps, cap)?, out);
    }
    let mut corpus: Vec<CorpusEntry> = Vec::new();
    let seeds = args.seeds.0;
    for p in args.gap {
        corpus.push(CorpusEntry {
            generator: GeneratorSpec::Gap { p },
            seeds: vec![0],
        });
    }
    for spec in args.random {
        corpus.push(CorpusEntry {
            generator: spec,
            seeds: seeds.clone(),
        });
    }
    for path in &args.instance {
        corpus.push(CorpusEntry {
            generator: load_fixed(path)?,
            seeds: seeds.clone(),
        });
    }
    let mut cfg = BenchConfig::new(corpus, args.algos);
    cfg.objective = args.objective;
    cfg.oracle_cap = cap;
    cfg.timing = args.timing;
    write_csv(&run_bench(&cfg), &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> repsel::Result<()> {
    match cli.command {
        Command::Validate(a) => validate(a),
        Command::Solve(a) => solve(a),
        Command::Lstar(a) => lstar(a),
        Command::Gen(c) => gen(c),
        Command::ExportGraph(a) => export_graph(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

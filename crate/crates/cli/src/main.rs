use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use s2graph::complexity::{budget_bound_for, CutStructure};
use s2graph::engine::{run, Algorithm, StoppingRule};
use s2graph::experiments::{
    bench, bench_generated, chain_family_count, chain_params, count_grid_cuts, loglog_slope,
    nonparam_experiment, trial_seed, BenchConfig, BenchReport, Budget, NonparamConfig, Repetitions,
};
use s2graph::generators::{ChainFamilySpec, GeneratorSpec, GeometricTruth};
use s2graph::ingest::{knn_graph, largest_component, threshold_graph, FeatureMatrix};
use s2graph::io::{
    format_run_log, read_edge_list, read_labels, write_edge_list, write_labels, RunSummary,
};
use s2graph::oracle::{LabelOracle, MajorityOracle, NoisyOracle};
use s2graph::{Graph, Label, Labeling};

#[derive(Parser)]
#[command(
    name = "s2graph",
    version,
    about = "Active learning of graph labelings with S2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph (and its labeling, where the family has one).
    Gen(GenArgs),
    /// Build a k-NN or threshold graph from a CSV feature file.
    Ingest(IngestArgs),
    /// Print the complexity parameters of a labeled graph as JSON.
    Analyze(AnalyzeArgs),
    /// Run one active-learning session and report its query log.
    Run(RunArgs),
    /// Repeat seeded runs and write per-trial CSV and summary JSON.
    Bench(BenchArgs),
    /// Excess-risk scaling on a lattice with a box-shaped ground truth.
    Nonparam(NonparamArgs),
    /// Exact counts of small labeling families.
    Count(CountArgs),
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct GenArgs {
    #[command(subcommand)]
    family: Option<GenFamily>,
    /// Read a JSON generator spec instead of naming a family.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output directory for graph.txt, labels.txt and spec.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenFamily {
    /// Rectangular grid, columns left of the split labeled +1.
    Grid {
        #[arg(long, default_value_t = 15)]
        rows: usize,
        #[arg(long, default_value_t = 15)]
        cols: usize,
        #[arg(long, default_value_t = 7)]
        split: usize,
    },
    /// Square grid with a +1 core whose boundary ring is randomly flipped.
    Dithered {
        #[arg(long, default_value_t = 15)]
        side: usize,
        #[arg(long, default_value_t = 7)]
        core: usize,
        #[arg(long, default_value_t = 0.3)]
        dither: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// `w^d` lattice, optionally labeled by a box truth.
    Lattice {
        #[arg(long)]
        w: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[command(flatten)]
        truth: BoxArgs,
    },
    /// Chain of blocks of parallel paths between hubs.
    Chain {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: usize,
        /// Total vertex count; the surplus over the blocks forms a clique.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Args, Clone)]
struct BoxArgs {
    /// Lower corner of the +1 box, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Option<Vec<f64>>,
    /// Upper corner of the +1 box, comma separated.
    #[arg(long, value_delimiter = ',')]
    upper: Option<Vec<f64>>,
    /// Distance of P(y = +1 | x) from 1/2.
    #[arg(long, default_value_t = 0.25)]
    margin: f64,
}

impl BoxArgs {
    fn truth(&self) -> Result<Option<GeometricTruth>, Failure> {
        match (&self.lower, &self.upper) {
            (Some(lo), Some(hi)) => Ok(Some(GeometricTruth::new(
                lo.clone(),
                hi.clone(),
                self.margin,
            )?)),
            (None, None) => Ok(None),
            _ => Err(Failure::input("--lower and --upper must be given together")),
        }
    }
}

#[derive(Args)]
struct IngestArgs {
    /// CSV file with one feature row per vertex.
    input: PathBuf,
    /// Connect each point to its k nearest neighbors.
    #[arg(
        long,
        conflicts_with = "threshold",
        required_unless_present = "threshold"
    )]
    knn: Option<usize>,
    /// Connect points at Euclidean distance at most this.
    #[arg(long)]
    threshold: Option<f64>,
    /// The last column is an integer class.
    #[arg(long)]
    classes: bool,
    /// Class labeled +1; every other class is -1. Defaults to the largest class value.
    #[arg(long, requires = "classes", allow_hyphen_values = true)]
    positive_class: Option<i64>,
    /// Keep only the largest connected component.
    #[arg(long)]
    largest_component: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Instance {
    /// Edge list: header `n m`, then one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Ground-truth labels: one `vertex ±1` pair per line.
    #[arg(long)]
    labels: PathBuf,
}

impl Instance {
    fn load(&self) -> Result<(Graph, Labeling), Failure> {
        let g = read_edge_list(BufReader::new(open(&self.graph)?))?;
        let f = read_labels(BufReader::new(open(&self.labels)?), g.n())?;
        Ok((g, f))
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    instance: Instance,
    /// Failure probability for the reported query budget.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OracleArgs {
    #[arg(long, value_enum, default_value_t = AlgorithmArg::S2)]
    algorithm: AlgorithmArg,
    /// Logical query budget: a number, `auto` for the recovery bound, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_budget)]
    budget: Budget,
    /// Probability that a single oracle answer is flipped.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Raw queries per logical query: a number or `auto`. Defaults to
    /// `auto` under noise and 1 otherwise.
    #[arg(long, value_parser = parse_repetitions)]
    repetitions: Option<Repetitions>,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OracleArgs {
    fn config(&self, trials: usize) -> BenchConfig {
        let default_reps = if self.gamma > 0.0 {
            Repetitions::Auto
        } else {
            Repetitions::Fixed(1)
        };
        BenchConfig {
            algorithm: self.algorithm.into(),
            trials,
            seed: self.seed,
            flip_prob: self.gamma,
            repetitions: self.repetitions.unwrap_or(default_reps),
            budget: self.budget,
            epsilon: self.epsilon,
            timing: false,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    S2,
    Random,
    Bisect,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::S2 => Algorithm::S2,
            AlgorithmArg::Random => Algorithm::Random,
            AlgorithmArg::Bisect => Algorithm::Bisect,
        }
    }
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    match s {
        "auto" => Ok(Budget::Auto),
        "all" => Ok(Budget::All),
        _ => match s.parse::<usize>() {
            Ok(0) => Err("budget must be at least 1".into()),
            Ok(b) => Ok(Budget::Fixed(b)),
            Err(_) => Err(format!("expected a number, `auto` or `all`, got {s:?}")),
        },
    }
}

fn parse_repetitions(s: &str) -> Result<Repetitions, String> {
    match s {
        "auto" => Ok(Repetitions::Auto),
        _ => match s.parse::<u32>() {
            Ok(0) => Err("repetitions must be at least 1".into()),
            Ok(r) => Ok(Repetitions::Fixed(r)),
            Err(_) => Err(format!("expected a number or `auto`, got {s:?}")),
        },
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: Instance,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Output directory for run.log, summary.json and predicted.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Edge list of a fixed instance.
    #[arg(long, requires = "labels", required_unless_present = "spec")]
    graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    labels: Option<PathBuf>,
    /// JSON generator spec; dithered instances are regenerated per trial.
    #[arg(long, conflicts_with_all = ["graph", "labels"])]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Record wall time per trial (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Output directory for trials.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NonparamArgs {
    #[command(flatten)]
    truth: BoxArgs,
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Number of connected components of the truth's cell labeling.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Lower bound on the balancedness of the truth.
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    /// Raw query budgets, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<u64>,
    #[arg(long, default_value_t = 4)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow even lattice sides (a cell boundary can then align with the box).
    #[arg(long)]
    any_w: bool,
    /// Write the per-trial CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[command(subcommand)]
    target: CountTarget,
}

#[derive(Subcommand)]
enum CountTarget {
    /// Two-component labelings of the r x r grid with a bounded cut.
    GridCuts {
        #[arg(long)]
        r: usize,
        /// Largest cut size counted; defaults to r.
        #[arg(long)]
        max_cut: Option<usize>,
    },
    /// Size of the chain labeling family, exact and lower bound.
    ChainFamily {
        #[arg(long, required_unless_present = "params")]
        r: Option<usize>,
        #[arg(long, required_unless_present = "params")]
        k: Option<usize>,
        #[arg(long, required_unless_present = "params")]
        p: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Number of blocks carrying a cut.
        #[arg(long)]
        m: Option<usize>,
        /// Derive the family from `n,c,m,kappa` instead.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["r", "k", "p", "n", "m"])]
        params: Option<Vec<usize>>,
        /// Enumerate and validate families up to this size.
        #[arg(long, default_value_t = 10_000)]
        enumerate_limit: u128,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Infeasible(String),
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Infeasible(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Infeasible(m) => f.write_str(m),
        }
    }
}

impl From<s2graph::Error> for Failure {
    fn from(e: s2graph::Error) -> Self {
        if e.is_infeasible() {
            Failure::Infeasible(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    let path = dir.join(name);
    let file =
        File::create(&path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn out_dir(out: &Option<PathBuf>) -> Result<&Path, Failure> {
    let dir = out
        .as_deref()
        .ok_or_else(|| Failure::input("--out is required"))?;
    fs::create_dir_all(dir)?;
    Ok(dir)
}

fn print_json(value: &Value) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

fn write_json_file(dir: &Path, name: &str, value: &Value) -> Result<(), Failure> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn read_spec(path: &Path) -> Result<GeneratorSpec, Failure> {
    Ok(serde_json::from_reader(BufReader::new(open(path)?))?)
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let spec = match (args.family, &args.spec) {
        (Some(family), None) => match family {
            GenFamily::Grid { rows, cols, split } => GeneratorSpec::Grid {
                rows,
                cols,
                split_col: split,
            },
            GenFamily::Dithered {
                side,
                core,
                dither,
                seed,
            } => GeneratorSpec::Dithered {
                side,
                core_side: core,
                dither_prob: dither,
                seed,
            },
            GenFamily::Lattice { w, d, truth } => GeneratorSpec::Lattice {
                w,
                d,
                truth: truth.truth()?,
            },
            GenFamily::Chain { r, k, p, n } => {
                let mut spec = ChainFamilySpec::pure(r, k, p);
                if let Some(n) = n {
                    spec.n = n;
                }
                GeneratorSpec::Chain { spec }
            }
        },
        (None, Some(path)) => read_spec(path)?,
        _ => return Err(Failure::input("name a family or pass --spec")),
    };
    let (g, f) = spec.build()?;
    let dir = out_dir(&args.out)?;
    let mut w = create(dir, "graph.txt")?;
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    if let Some(f) = &f {
        let mut w = create(dir, "labels.txt")?;
        write_labels(f, &mut w)?;
        w.flush()?;
    }
    write_json_file(dir, "spec.json", &serde_json::to_value(&spec)?)?;
    eprintln!(
        "wrote {} vertices, {} edges to {}",
        g.n(),
        g.edge_count(),
        dir.display()
    );
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let features = FeatureMatrix::from_path(&args.input, args.classes)?;
    let g = match (args.knn, args.threshold) {
        (Some(k), _) => {
            if k == 0 {
                return Err(Failure::input("--knn must be at least 1"));
            }
            knn_graph(&features, k)
        }
        (None, Some(t)) => {
            if !(t >= 0.0) {
                return Err(Failure::input("--threshold must be non-negative"));
            }
            threshold_graph(&features, t)
        }
        (None, None) => unreachable!("clap requires one of --knn and --threshold"),
    };
    let (g, map) = if args.largest_component {
        largest_component(&g)
    } else {
        let n = g.n();
        (g, (0..n).collect())
    };
    let dir = args.out.as_path();
    fs::create_dir_all(dir)?;
    let mut w = create(dir, "graph.txt")?;
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    if let Some(classes) = features.classes() {
        let positive = args
            .positive_class
            .unwrap_or_else(|| classes.iter().copied().max().unwrap_or(1));
        let labels = Labeling::total(
            map.iter()
                .map(|&i| {
                    if classes[i] == positive {
                        Label::Positive
                    } else {
                        Label::Negative
                    }
                })
                .collect(),
        );
        let mut w = create(dir, "labels.txt")?;
        write_labels(&labels, &mut w)?;
        w.flush()?;
    }
    if args.largest_component {
        let mut w = create(dir, "vertex_map.txt")?;
        for (v, row) in map.iter().enumerate() {
            writeln!(w, "{v} {row}")?;
        }
        w.flush()?;
    }
    eprintln!(
        "wrote {} vertices, {} edges to {}",
        g.n(),
        g.edge_count(),
        dir.display()
    );
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let (g, f) = args.instance.load()?;
    let structure = CutStructure::new(&g, &f)?;
    let mut value = serde_json::to_value(structure.summary())?;
    let budget = if structure.m() > 0 {
        Some(budget_bound_for(&structure, None, args.epsilon)?)
    } else {
        None
    };
    value["epsilon"] = json!(args.epsilon);
    value["budget_bound"] = json!(budget);
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut w, &value)?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
        None => print_json(&value),
    }
}

fn run_once(args: RunArgs) -> Result<(), Failure> {
    let (g, f) = args.instance.load()?;
    let structure = CutStructure::new(&g, &f)?;
    let config = args.oracle.config(1);
    config.validate()?;
    let budget = config.resolve_budget(&structure)?;
    let repetitions = config.resolve_repetitions(g.n())?;
    let noisy = NoisyOracle::new(f, config.flip_prob, trial_seed(config.seed, 1))?;
    let mut oracle = MajorityOracle::new(noisy, repetitions)?;
    let mut result = run(
        config.algorithm,
        &g,
        &mut oracle as &mut dyn LabelOracle,
        &StoppingRule::Budget(budget),
        config.seed,
    )?;
    result.check_recovery(&structure.cut_edges());
    let summary = RunSummary {
        algorithm: config.algorithm.to_string(),
        queries_used: result.queries_used,
        raw_queries: result.raw_queries,
        budget: Some(budget),
        cuts_found: result.found_cuts.len(),
        cut_recovered: result.cut_recovered,
    };
    let value = serde_json::to_value(&summary)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("run.log"), format_run_log(&result))?;
        write_json_file(dir, "summary.json", &value)?;
        let mut w = create(dir, "predicted.txt")?;
        write_labels(&result.predicted, &mut w)?;
        w.flush()?;
    }
    print_json(&value)
}

fn write_report(report: &BenchReport, out: &Option<PathBuf>) -> Result<(), Failure> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let mut w = create(dir, "trials.csv")?;
        report.write_csv(&mut w)?;
        w.flush()?;
        let mut w = create(dir, "summary.json")?;
        report.write_json(&mut w)?;
        w.flush()?;
    }
    print_json(&serde_json::to_value(&report.summary)?)
}

fn bench_cmd(args: BenchArgs) -> Result<(), Failure> {
    let mut config = args.oracle.config(args.trials);
    config.timing = args.timing;
    let report = match (&args.graph, &args.labels, &args.spec) {
        (Some(graph), Some(labels), None) => {
            let instance = Instance {
                graph: graph.clone(),
                labels: labels.clone(),
            };
            let (g, f) = instance.load()?;
            bench(&g, &f, &config)?
        }
        (None, None, Some(path)) => {
            let spec = read_spec(path)?;
            bench_generated(&config, |seed| {
                let spec = match spec.clone() {
                    GeneratorSpec::Dithered {
                        side,
                        core_side,
                        dither_prob,
                        ..
                    } => GeneratorSpec::Dithered {
                        side,
                        core_side,
                        dither_prob,
                        seed,
                    },
                    other => other,
                };
                match spec.build()? {
                    (g, Some(f)) => Ok((g, f)),
                    (_, None) => Err(s2graph::Error::InvalidParameter(
                        "this generator family defines no ground-truth labeling".into(),
                    )),
                }
            })?
        }
        _ => return Err(Failure::input("pass --graph and --labels, or --spec")),
    };
    write_report(&report, &args.out)
}

fn nonparam(args: NonparamArgs) -> Result<(), Failure> {
    let truth = args
        .truth
        .truth()?
        .ok_or_else(|| Failure::input("--lower and --upper are required"))?;
    let config = NonparamConfig {
        truth,
        c1: args.c1,
        k: args.k,
        beta: args.beta,
        budgets: args.budgets,
        trials: args.trials,
        seed: args.seed,
        odd_w: !args.any_w,
    };
    let rows = nonparam_experiment(&config)?;
    let mut csv = String::from("n,w,trial,repetitions,logical_budget,raw_queries,excess_risk\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.w, r.trial, r.repetitions, r.logical_budget, r.raw_queries, r.excess_risk
        ));
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.excess_risk)).collect();
    let slope = loglog_slope(&points);
    match &args.out {
        Some(path) => {
            fs::write(path, csv)?;
            print_json(&json!({ "rows": rows.len(), "loglog_slope": slope }))
        }
        None => {
            print!("{csv}");
            if let Some(s) = slope {
                eprintln!("log-log slope {s:.3}");
            }
            Ok(())
        }
    }
}

fn count(args: CountArgs) -> Result<(), Failure> {
    match args.target {
        CountTarget::GridCuts { r, max_cut } => {
            let max_cut = max_cut.unwrap_or(r);
            let count = count_grid_cuts(r, max_cut)?;
            print_json(&json!({ "r": r, "max_cut": max_cut, "count": count }))
        }
        CountTarget::ChainFamily {
            r,
            k,
            p,
            n,
            m,
            params,
            enumerate_limit,
        } => {
            let (spec, m) = match params {
                Some(v) if v.len() != 4 => {
                    return Err(Failure::input(
                        "--params takes exactly four values n,c,m,kappa",
                    ))
                }
                Some(v) => (chain_params(v[0], v[1], v[2], v[3])?, v[2]),
                None => {
                    let mut spec = ChainFamilySpec::pure(r.unwrap(), k.unwrap(), p.unwrap());
                    if let Some(n) = n {
                        spec.n = n;
                    }
                    (spec, m.unwrap_or(1))
                }
            };
            let result = chain_family_count(&spec, m, enumerate_limit)?;
            print_json(&serde_json::to_value(result)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Ingest(a) => ingest(a),
        Command::Analyze(a) => analyze(a),
        Command::Run(a) => run_once(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Nonparam(a) => nonparam(a),
        Command::Count(a) => count(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! Command-line driver: solving, verification against brute force, and join cost measurement.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sigmarho::graph::{nice_decomposition, parse_graph, parse_td};
use sigmarho::oracle::{brute_force_solve, BRUTE_FORCE_LIMIT};
use sigmarho::scaling::join_mults;
use sigmarho::solver::{auto_strategy, replacement_applies};
use sigmarho::{
    solve, Answer, Graph, JoinStrategy, NiceTreeDecomposition, SigmaRhoSpec, SolveOptions, Variant,
};

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sigmarho", version, about = "Solve [sigma,rho]-domination problems over tree decompositions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one problem on one graph.
    Solve(SolveArgs),
    /// Compare the dynamic program with brute force and across join strategies.
    Verify(VerifyArgs),
    /// Count field multiplications of single joins for growing bag sizes; prints CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct ProblemArgs {
    /// Preset name such as `dominating_set` or `p_dominating_set(2)`, or an explicit
    /// `sigma=<set> rho=<set>` with sets like `0,1`, `cofinite:0` or `N`.
    #[arg(long)]
    pub problem: String,
    /// Graph in PACE `.gr` format.
    #[arg(long)]
    pub graph: PathBuf,
    /// Tree decomposition in PACE `.td` format; the min-fill heuristic is used if absent.
    #[arg(long)]
    pub td: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// existence, min, max, count, count-min or count-max.
    #[arg(long)]
    pub variant: String,
    #[arg(long, value_enum, default_value_t = JoinChoice::Auto)]
    pub join: JoinChoice,
    /// Restrict the size range of fast joins (minimising dominating set and total dominating
    /// set only).
    #[arg(long, value_enum, default_value_t = Replacement::Auto)]
    pub replacement: Replacement,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// A variant as for `solve`, or `all`.
    #[arg(long, default_value = "all")]
    pub variant: String,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value = "dominating_set")]
    pub problem: String,
    #[arg(long, default_value = "count")]
    pub variant: String,
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum JoinChoice {
    Naive,
    Fast,
    FastDs,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Replacement {
    Auto,
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
}

/// Machine-readable result of `solve`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub problem: String,
    pub sigma: String,
    pub rho: String,
    pub variant: String,
    pub answer: String,
    pub exists: Option<bool>,
    pub size: Option<u32>,
    /// Decimal string, since counts can exceed 64 bits.
    pub count: Option<String>,
    pub join: String,
    pub replacement: bool,
    pub vertices: usize,
    pub edges: usize,
    pub width: usize,
    pub nice_nodes: usize,
    pub join_nodes: usize,
    pub primes: Vec<u64>,
    pub field_mults: u64,
}

/// One comparison made by `verify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyCase {
    pub variant: String,
    pub join: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

struct Input {
    spec: SigmaRhoSpec,
    graph: Graph,
    nice: NiceTreeDecomposition,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load(args: &ProblemArgs) -> Result<Input, String> {
    let spec: SigmaRhoSpec = args.problem.parse().map_err(|e| format!("--problem: {e}"))?;
    let graph = parse_graph(&read(&args.graph)?).map_err(|e| format!("{}: {e}", args.graph.display()))?;
    let td = match &args.td {
        Some(path) => Some(parse_td(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?),
        None => None,
    };
    let nice = nice_decomposition(&graph, td.as_ref()).map_err(|e| format!("tree decomposition: {e}"))?;
    Ok(Input { spec, graph, nice })
}

fn parse_variant(text: &str) -> Result<Variant, String> {
    text.parse().map_err(|e| format!("--variant: {e}"))
}

fn resolve_join(choice: JoinChoice, input: &Input) -> JoinStrategy {
    match choice {
        JoinChoice::Naive => JoinStrategy::Naive,
        JoinChoice::Fast => JoinStrategy::FastGeneral,
        JoinChoice::FastDs => JoinStrategy::FastDominating,
        JoinChoice::Auto => auto_strategy(&input.spec, &input.nice, input.graph.n()),
    }
}

fn resolve_replacement(choice: Replacement, spec: &SigmaRhoSpec, variant: Variant, join: JoinStrategy) -> bool {
    match choice {
        Replacement::On => true,
        Replacement::Off => false,
        Replacement::Auto => join != JoinStrategy::Naive && replacement_applies(spec, variant),
    }
}

fn report(args: &SolveArgs, input: &Input, variant: Variant) -> Result<Report, String> {
    let strategy = resolve_join(args.join, input);
    let replacement = resolve_replacement(args.replacement, &input.spec, variant, strategy);
    let opts = SolveOptions { strategy, replacement };
    let r = solve(&input.graph, &input.nice, &input.spec, variant, opts).map_err(|e| e.to_string())?;
    let (exists, size, count) = match &r.answer {
        Answer::Exists(b) => (Some(*b), None, None),
        Answer::Size(s) => (None, *s, None),
        Answer::Count(c) => (None, None, Some(c.to_string())),
        Answer::SizeCount(s, c) => (None, *s, Some(c.to_string())),
    };
    Ok(Report {
        problem: args.problem.problem.clone(),
        sigma: input.spec.set(sigmarho::Side::Sigma).to_string(),
        rho: input.spec.set(sigmarho::Side::Rho).to_string(),
        variant: variant.to_string(),
        answer: r.answer.to_string(),
        exists,
        size,
        count,
        join: strategy.to_string(),
        replacement,
        vertices: input.graph.n(),
        edges: input.graph.m(),
        width: r.width,
        nice_nodes: r.nice_nodes,
        join_nodes: r.joins,
        primes: r.primes,
        field_mults: r.field_mults,
    })
}

fn plain_report(r: &Report) -> String {
    let mut s = String::new();
    let primes: Vec<String> = r.primes.iter().map(u64::to_string).collect();
    let _ = writeln!(s, "{}", r.answer);
    let _ = writeln!(s, "problem: sigma={} rho={} ({})", r.sigma, r.rho, r.variant);
    let _ = writeln!(s, "graph: {} vertices, {} edges", r.vertices, r.edges);
    let _ = writeln!(s, "width: {}", r.width);
    let _ = writeln!(s, "nice nodes: {} ({} joins)", r.nice_nodes, r.join_nodes);
    let _ = writeln!(s, "join: {}{}", r.join, if r.replacement { " with size window" } else { "" });
    let _ = writeln!(s, "primes: {}", if primes.is_empty() { "none".into() } else { primes.join(" ") });
    let _ = writeln!(s, "field multiplications: {}", r.field_mults);
    s
}

fn run_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32, String> {
    let input = load(&args.problem)?;
    let variant = parse_variant(&args.variant)?;
    let r = report(args, &input, variant)?;
    let text = match args.problem.format {
        Format::Plain => plain_report(&r),
        Format::Json => serde_json::to_string_pretty(&r).map_err(|e| e.to_string())? + "\n",
    };
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok(0)
}

fn join_choices(spec: &SigmaRhoSpec, variant: Variant) -> Vec<(JoinStrategy, bool)> {
    let mut v = vec![(JoinStrategy::Naive, false), (JoinStrategy::FastGeneral, false)];
    if spec.has_dominating_shape() {
        v.push((JoinStrategy::FastDominating, false));
    }
    if replacement_applies(spec, variant) {
        v.push((JoinStrategy::FastGeneral, true));
        if spec.has_dominating_shape() {
            v.push((JoinStrategy::FastDominating, true));
        }
    }
    v
}

/// Runs every applicable join strategy on the input and compares with brute force.
fn verify_cases(input: &Input, variants: &[Variant]) -> Result<Vec<VerifyCase>, String> {
    if input.graph.n() > BRUTE_FORCE_LIMIT {
        return Err(format!("brute force supports at most {BRUTE_FORCE_LIMIT} vertices"));
    }
    let mut cases = Vec::new();
    for &variant in variants {
        let expected = brute_force_solve(&input.graph, &input.spec, variant).map_err(|e| e.to_string())?;
        for (strategy, replacement) in join_choices(&input.spec, variant) {
            let opts = SolveOptions { strategy, replacement };
            let got = match solve(&input.graph, &input.nice, &input.spec, variant, opts) {
                Ok(r) => r.answer.to_string(),
                Err(e) => format!("error: {e}"),
            };
            let join = if replacement { format!("{strategy}+window") } else { strategy.to_string() };
            cases.push(VerifyCase {
                variant: variant.to_string(),
                join,
                pass: got == expected.to_string(),
                expected: expected.to_string(),
                got,
            });
        }
    }
    Ok(cases)
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, String> {
    let input = load(&args.problem)?;
    let variants = if args.variant == "all" { Variant::ALL.to_vec() } else { vec![parse_variant(&args.variant)?] };
    let cases = verify_cases(&input, &variants)?;
    let failed = cases.iter().filter(|c| !c.pass).count();
    let text = match args.problem.format {
        Format::Plain => {
            let mut s = String::new();
            for c in &cases {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "{tag} {} {}: {} (brute force: {})", c.variant, c.join, c.got, c.expected);
            }
            let _ = writeln!(s, "{} of {} cases pass", cases.len() - failed, cases.len());
            s
        }
        Format::Json => serde_json::to_string_pretty(&cases).map_err(|e| e.to_string())? + "\n",
    };
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32, String> {
    let spec: SigmaRhoSpec = args.problem.parse().map_err(|e| format!("--problem: {e}"))?;
    let variant = parse_variant(&args.variant)?;
    let mut strategies = vec![JoinStrategy::Naive, JoinStrategy::FastGeneral];
    if spec.has_dominating_shape() {
        strategies.push(JoinStrategy::FastDominating);
    }
    let mut text = String::from("k,strategy,mults\n");
    for k in args.k_min..=args.k_max {
        for &strategy in &strategies {
            let mults = join_mults(&spec, variant, strategy, k, args.seed).map_err(|e| e.to_string())?;
            let _ = writeln!(text, "{k},{strategy},{mults}");
        }
    }
    out.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => run_solve(a, out),
        Command::Verify(a) => run_verify(a, out),
        Command::Bench(a) => run_bench(a, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

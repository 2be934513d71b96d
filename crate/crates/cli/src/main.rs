//! `ec`: build, evaluate, and analyze Boolean circuits over {or, and, not}
//! with energy complexity as the central metric.
//!
//! Truth tables are strings of 2^n '0'/'1' characters (index 0 first, with
//! variable 0 the least-significant index bit), given literally or as
//! `@path`. Circuits travel in the netlist text format; `--circuit` reads a
//! path or `-`/nothing for stdin. Variable indices are 0-based everywhere.
//! Exit codes: 0 on success, 1 on domain errors or failed verification, 2 on
//! usage errors.

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ec_core::analysis;
use ec_core::boolfn::{self, TruthTable};
use ec_core::circuit::{Circuit, EnergyMode, ReportMode, DEFAULT_EXHAUSTIVE_CAP};
use ec_core::compilers::{self, CompileStats};
use ec_core::dtree::DecisionTree;

#[derive(Parser)]
#[command(
    name = "ec",
    about = "Boolean circuit toolkit with energy complexity as the central metric",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report function measures computed from a truth table
    Measure {
        /// Truth table, literal bits or @path
        #[arg(long, value_name = "TT|@FILE")]
        tt: String,
    },
    /// Generate a circuit from a named family (netlist on stdout)
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Compile a decision tree or truth table into a circuit
    Compile {
        #[command(subcommand)]
        target: CompileTarget,
    },
    /// Measure energy for one input, or search the whole input space
    #[command(group = clap::ArgGroup::new("mode").required(true).args(["input", "exhaustive", "sampled"]))]
    Energy {
        /// Netlist path, or -/nothing for stdin
        #[arg(long, value_name = "FILE|-")]
        circuit: Option<String>,
        /// Assignment bits, character i = variable i
        #[arg(long, value_name = "BITS")]
        input: Option<String>,
        /// Sweep every input exhaustively
        #[arg(long)]
        exhaustive: bool,
        /// Sample this many random inputs instead
        #[arg(long, value_name = "COUNT")]
        sampled: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Variable cap for exhaustive sweeps
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
        cap: usize,
        /// Also print the energy distribution (exhaustive mode only)
        #[arg(long, conflicts_with_all = ["input", "sampled"])]
        histogram: bool,
    },
    /// Search exhaustively for the least-energy circuit of a small function
    Oracle {
        #[arg(long, value_name = "TT|@FILE")]
        tt: String,
        #[arg(long, default_value_t = 7)]
        max_gates: usize,
        /// Abort after enumerating this many states
        #[arg(long)]
        state_budget: Option<usize>,
        /// Also print the witness circuit netlist
        #[arg(long)]
        witness: bool,
    },
    /// Analyze circuit structure
    Analyze {
        #[command(subcommand)]
        what: AnalyzeWhat,
    },
    /// Check energy inequalities on a circuit (exit 1 when violated)
    Verify {
        #[arg(long, value_name = "FILE|-")]
        circuit: Option<String>,
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Convert a circuit to another text format
    Export {
        #[arg(long, value_name = "FILE|-")]
        circuit: Option<String>,
        #[arg(long, value_enum)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// Blockwise disjunction with square-root energy
    Or {
        #[arg(long)]
        n: usize,
        /// Prepend a gate/energy audit as a comment line
        #[arg(long)]
        stats: bool,
    },
    /// Address selector over n + 2^n variables
    Addr {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        stats: bool,
    },
    /// Extended address selector; cells negated where g is 0
    Eaddr {
        #[arg(long)]
        n: usize,
        /// Selector function on n variables
        #[arg(long, value_name = "TT|@FILE")]
        g: String,
        #[arg(long)]
        stats: bool,
    },
    /// Gate-per-node compiler over the optimal decision tree of a function
    Linear {
        #[arg(long, value_name = "TT|@FILE")]
        tt: String,
        #[arg(long)]
        stats: bool,
    },
    /// Level-variable compiler over the optimal decision tree of a function
    Quadratic {
        #[arg(long, value_name = "TT|@FILE")]
        tt: String,
        #[arg(long)]
        stats: bool,
    },
}

#[derive(Subcommand)]
enum CompileTarget {
    /// Compile a decision tree given as an s-expression like `(x0 (x1 0 1) 1)`
    Linear {
        #[arg(long, value_name = "SEXPR|@FILE")]
        tree: String,
        /// Circuit arity; defaults to one past the largest queried variable
        #[arg(long)]
        num_vars: Option<usize>,
        #[arg(long)]
        stats: bool,
    },
    /// Compile a truth table through its optimal decision tree
    Quadratic {
        #[arg(long, value_name = "TT|@FILE")]
        tt: String,
        #[arg(long)]
        stats: bool,
    },
}

#[derive(Subcommand)]
enum AnalyzeWhat {
    /// Decision tree induced by the circuit's negation structure
    Tree {
        #[arg(long, value_name = "FILE|-")]
        circuit: Option<String>,
    },
    /// Flip path witnessing the sensitivity of one input pair
    Path {
        #[arg(long, value_name = "FILE|-")]
        circuit: Option<String>,
        #[arg(long, value_name = "BITS")]
        input: String,
        /// Variable to flip (0-based)
        #[arg(long)]
        flip: usize,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemma4,
    Lemma5,
    Bounds,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Dot,
    Netlist,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

type RunResult = Result<ExitCode, Box<dyn Error>>;

fn run(command: Command) -> RunResult {
    match command {
        Command::Measure { tt } => measure(&tt),
        Command::Gen { family } => gen(family),
        Command::Compile { target } => compile(target),
        Command::Energy { circuit, input, exhaustive, sampled, seed, cap, histogram } => {
            energy(circuit.as_deref(), input.as_deref(), exhaustive, sampled, seed, cap, histogram)
        }
        Command::Oracle { tt, max_gates, state_budget, witness } => {
            oracle(&tt, max_gates, state_budget, witness)
        }
        Command::Analyze { what } => analyze(what),
        Command::Verify { circuit, suite } => verify(circuit.as_deref(), suite),
        Command::Export { circuit, format } => export(circuit.as_deref(), format),
    }
}

fn read_arg_text(arg: &str) -> Result<String, Box<dyn Error>> {
    if let Some(path) = arg.strip_prefix('@') {
        Ok(fs::read_to_string(path)?.trim().to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn read_tt(arg: &str) -> Result<TruthTable, Box<dyn Error>> {
    Ok(read_arg_text(arg)?.parse::<TruthTable>()?)
}

fn read_circuit(arg: Option<&str>) -> Result<Circuit, Box<dyn Error>> {
    let text = match arg {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
        Some(path) => fs::read_to_string(path)?,
    };
    Ok(Circuit::from_netlist(&text)?)
}

fn parse_bits(s: &str) -> Result<Vec<bool>, Box<dyn Error>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!("invalid bit character `{other}`").into()),
        })
        .collect()
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn join_vars(vars: impl IntoIterator<Item = usize>) -> String {
    let mut out = String::new();
    for (i, v) in vars.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}

fn measure(tt: &str) -> RunResult {
    let f = read_tt(tt)?;
    let r = boolfn::measure(&f)?;
    println!(
        "n={} d={} s={} psens={} bs={} c={} deg={} dependent={} nondegenerate={}",
        f.num_vars(),
        r.d,
        r.s,
        r.psens,
        r.bs,
        r.c,
        r.deg,
        join_vars(r.dependent_vars.iter().copied()),
        r.dependent_vars.len() == f.num_vars(),
    );
    Ok(ExitCode::SUCCESS)
}

fn emit_circuit(circuit: &Circuit, stats: Option<CompileStats>) -> RunResult {
    if let Some(stats) = stats {
        println!("# {stats}");
    }
    print!("{}", circuit.to_netlist());
    Ok(ExitCode::SUCCESS)
}

fn gen(family: GenFamily) -> RunResult {
    match family {
        GenFamily::Or { n, stats } => {
            if n == 0 {
                return Err("--n must be at least 1".into());
            }
            let c = compilers::build_or_sqrt(n);
            let bound = compilers::or_sqrt_energy_bounds(n).1;
            emit_circuit(&c, stats.then(|| CompileStats::audit(&c, bound)))
        }
        GenFamily::Addr { n, stats } => {
            let c = compilers::build_addr(n)?;
            let bound = compilers::addr_energy_bound(n);
            emit_circuit(&c, stats.then(|| CompileStats::audit(&c, bound)))
        }
        GenFamily::Eaddr { n, g, stats } => {
            let g = read_tt(&g)?;
            let c = compilers::build_eaddr(n, &g)?;
            let bound = compilers::eaddr_energy_bound(n);
            emit_circuit(&c, stats.then(|| CompileStats::audit(&c, bound)))
        }
        GenFamily::Linear { tt, stats } => {
            let f = read_tt(&tt)?;
            let (depth, tree) = boolfn::decision_tree_complexity(&f)?;
            let c = compilers::compile_linear(&tree, f.num_vars())?;
            let bound = compilers::linear_energy_bound(tree.vars().len(), depth);
            emit_circuit(&c, stats.then(|| CompileStats::audit(&c, bound)))
        }
        GenFamily::Quadratic { tt, stats } => {
            let f = read_tt(&tt)?;
            let art = compilers::compile_quadratic_artifacts(&f)?;
            let bound = compilers::quadratic_energy_bound(art.depth);
            emit_circuit(&art.circuit, stats.then(|| CompileStats::audit(&art.circuit, bound)))
        }
    }
}

fn compile(target: CompileTarget) -> RunResult {
    match target {
        CompileTarget::Linear { tree, num_vars, stats } => {
            let tree: DecisionTree = read_arg_text(&tree)?.parse()?;
            let num_vars =
                num_vars.unwrap_or_else(|| tree.max_var().map_or(0, |v| v + 1));
            let c = compilers::compile_linear(&tree, num_vars)?;
            let bound = compilers::linear_energy_bound(tree.vars().len(), tree.depth());
            emit_circuit(&c, stats.then(|| CompileStats::audit(&c, bound)))
        }
        CompileTarget::Quadratic { tt, stats } => {
            let f = read_tt(&tt)?;
            let art = compilers::compile_quadratic_artifacts(&f)?;
            let bound = compilers::quadratic_energy_bound(art.depth);
            emit_circuit(&art.circuit, stats.then(|| CompileStats::audit(&art.circuit, bound)))
        }
    }
}

fn energy(
    circuit: Option<&str>,
    input: Option<&str>,
    exhaustive: bool,
    sampled: Option<u64>,
    seed: u64,
    cap: usize,
    histogram: bool,
) -> RunResult {
    let c = read_circuit(circuit)?;
    if let Some(bits) = input {
        let bits = parse_bits(bits)?;
        let (out, act) = c.evaluate(&bits)?;
        println!("energy={} output={}", c.energy_of(&act), out as u8);
        return Ok(ExitCode::SUCCESS);
    }
    let mode = if let Some(count) = sampled {
        EnergyMode::Sampled { count, seed }
    } else {
        debug_assert!(exhaustive, "clap enforces one mode flag");
        EnergyMode::Exhaustive { cap }
    };
    let r = c.max_energy(mode)?;
    println!(
        "max_energy={} witness={} inputs_checked={} mode={}",
        r.max_energy,
        bits_to_string(&r.witness),
        r.inputs_checked,
        match r.mode {
            ReportMode::Exhaustive => "exhaustive",
            ReportMode::Sampled => "sampled",
        }
    );
    if histogram {
        let counts = c.energy_histogram(cap)?;
        let line = counts
            .iter()
            .enumerate()
            .map(|(e, count)| format!("{e}:{count}"))
            .collect::<Vec<_>>()
            .join(",");
        println!("histogram={line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn oracle(tt: &str, max_gates: usize, state_budget: Option<usize>, witness: bool) -> RunResult {
    let f = read_tt(tt)?;
    let mut limits = analysis::OracleLimits::default();
    if let Some(budget) = state_budget {
        limits.state_budget = budget;
    }
    let r = analysis::brute_force_ec_with(&f, max_gates, &limits)?;
    println!(
        "lower={} upper={} certified={} witness_gates={}",
        r.lower,
        r.upper.map_or_else(|| "none".into(), |u| u.to_string()),
        r.certified,
        r.witness_circuit
            .as_ref()
            .map_or_else(|| "none".into(), |w| w.inner_gate_count().to_string()),
    );
    if witness {
        if let Some(w) = &r.witness_circuit {
            print!("{}", w.to_netlist());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn analyze(what: AnalyzeWhat) -> RunResult {
    match what {
        AnalyzeWhat::Tree { circuit } => {
            let c = read_circuit(circuit.as_deref())?;
            let a = analysis::circuit_to_tree(&c)?;
            println!(
                "neg_order={}",
                a.neg_order.iter().map(|g| format!("g{g}")).collect::<Vec<_>>().join(",")
            );
            for (i, block) in a.partition.iter().enumerate() {
                println!("block{}={}", i + 1, join_vars(block.iter().copied()));
            }
            println!("induced_depth={}", a.induced_depth);
            println!("min_depth={}", a.min_depth);
            println!("function_matches={}", a.function_matches);
            println!("tree={}", a.induced_tree);
            Ok(ExitCode::from(if a.passed() { 0 } else { 1 }))
        }
        AnalyzeWhat::Path { circuit, input, flip } => {
            let c = read_circuit(circuit.as_deref())?;
            let bits = parse_bits(&input)?;
            let w = analysis::sensitive_path(&c, &bits, flip)?;
            println!(
                "path={} length={} energy_sum={}",
                w.path.iter().map(|g| format!("g{g}")).collect::<Vec<_>>().join("->"),
                w.length,
                w.energy_sum
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn verify(circuit: Option<&str>, suite: Suite) -> RunResult {
    let c = read_circuit(circuit)?;
    let passed = match suite {
        Suite::Lemma4 => {
            let r = analysis::verify_lemma4(&c)?;
            println!("{r}");
            r.passed
        }
        Suite::Lemma5 => {
            let r = analysis::verify_lemma5(&c)?;
            println!("{r}");
            r.passed
        }
        Suite::Bounds => {
            let r = analysis::theorem_bounds_audit(&c)?;
            println!("{r}");
            r.passed
        }
    };
    Ok(ExitCode::from(if passed { 0 } else { 1 }))
}

fn export(circuit: Option<&str>, format: Format) -> RunResult {
    let c = read_circuit(circuit)?;
    match format {
        Format::Dot => print!("{}", c.to_dot()),
        Format::Netlist => print!("{}", c.to_netlist()),
    }
    Ok(ExitCode::SUCCESS)
}

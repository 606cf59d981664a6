use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use cbv_cost::bench::{self, BenchConfig, Suite};
use cbv_cost::encodings::{church_numeral, encode_string, encode_symbol, Alphabet};
use cbv_cost::machine_r::{mr_normalize, write_iterations_csv, MrOutcome};
use cbv_cost::pca::{build_combinator, measure, Combinator};
use cbv_cost::reduce::{normalize, ReductionOutcome, Strategy};
use cbv_cost::syntax::parse_term;
use cbv_cost::theta::{decode_theta, encode_theta, size_report, ThetaString};
use cbv_cost::tm::{parse_tm, run_compiled, simulate_tm, RunError, TuringMachine};

#[derive(Parser)]
#[command(
    name = "cbvcost",
    version,
    about = "Call-by-value lambda calculus cost workbench"
)]
struct Cli {
    /// Maximum number of reduction steps (or machine iterations).
    #[arg(long, global = true, default_value_t = 100_000)]
    fuel: u64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Leftmost)]
    strategy: StrategyArg,
    /// Where to write CSV output (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Rightmost,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a term to normal form and report its cost.
    Normalize {
        /// Term in surface syntax, or `-` to read stdin.
        term: String,
    },
    /// Compile a Turing machine to a term and run both side by side.
    CompileTm {
        machine: PathBuf,
        #[arg(default_value = "")]
        input: String,
        /// Input/output alphabet, comma separated (default: all but the blank).
        #[arg(long)]
        io: Option<String>,
    },
    /// Run a Turing machine natively.
    RunTm {
        machine: PathBuf,
        #[arg(default_value = "")]
        input: String,
    },
    /// Normalize with the tape machine and print its per-iteration costs.
    MachineR {
        /// Surface-syntax term or ASCII/Unicode Θ-string. Omit with --corpus.
        input: Option<String>,
        /// Run a seeded random corpus of this many terms instead.
        #[arg(long)]
        corpus: Option<usize>,
        /// Size range of corpus terms, as MIN..MAX.
        #[arg(long, default_value = "8..16")]
        sizes: String,
    },
    /// Print encodings of strings, symbols, numerals and terms.
    Encode {
        #[command(subcommand)]
        what: EncodeCmd,
    },
    /// Run a measurement suite and write its CSV report.
    Bench { suite: String },
    /// List the pairing combinators and their measured costs.
    Pca {
        /// Number of random value triples to measure.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum EncodeCmd {
    /// Scott encoding of a string.
    Scott {
        #[arg(long)]
        alphabet: String,
        #[arg(default_value = "")]
        text: String,
    },
    /// Encoding of one element of a finite set.
    Symbol {
        #[arg(long)]
        alphabet: String,
        symbol: String,
    },
    /// Church numeral.
    Church { n: u64 },
    /// Θ-string of a term, with both size measures.
    Theta { term: String },
}

/// Exit statuses: 0 success, 1 bad input, 2 fuel exhausted, 3 mismatch or
/// failed check.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const BAD_INPUT: u8 = 1;
const FUEL: u8 = 2;
const MISMATCH: u8 = 3;

fn fail<E: Into<anyhow::Error>>(code: u8) -> impl FnOnce(E) -> Failure {
    move |e| Failure {
        code,
        error: e.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(BAD_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Normalize { term } => cmd_normalize(cli, term),
        Command::CompileTm { machine, input, io } => {
            cmd_compile_tm(cli, machine, input, io.as_deref())
        }
        Command::RunTm { machine, input } => cmd_run_tm(cli, machine, input),
        Command::MachineR {
            input,
            corpus,
            sizes,
        } => match (input, corpus) {
            (_, Some(n)) => cmd_machine_r_corpus(cli, *n, sizes),
            (Some(input), None) => cmd_machine_r(cli, input),
            (None, None) => Err(fail(BAD_INPUT)(anyhow!(
                "give a term, a Θ-string, or --corpus N"
            ))),
        },
        Command::Encode { what } => cmd_encode(what),
        Command::Bench { suite } => cmd_bench(cli, suite),
        Command::Pca { count } => cmd_pca(cli, *count),
    }
}

fn strategy(cli: &Cli) -> Strategy {
    match cli.strategy {
        StrategyArg::Leftmost => Strategy::Leftmost,
        StrategyArg::Rightmost => Strategy::Rightmost,
        StrategyArg::Random => Strategy::Random(cli.seed),
    }
}

fn read_term_arg(text: &str) -> Result<String, Failure> {
    if text == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")
            .map_err(fail(BAD_INPUT))?;
        Ok(s)
    } else {
        Ok(text.to_string())
    }
}

fn with_output(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
) -> CmdResult {
    match path {
        Some(p) => {
            let mut file = File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .map_err(fail(BAD_INPUT))?;
            f(&mut file).map_err(fail(BAD_INPUT))
        }
        None => f(&mut io::stdout().lock()).map_err(fail(BAD_INPUT)),
    }
}

fn cmd_normalize(cli: &Cli, text: &str) -> CmdResult {
    let text = read_term_arg(text)?;
    let t = parse_term(&text).map_err(fail(BAD_INPUT))?;
    let outcome = normalize(&t, strategy(cli), cli.fuel).map_err(fail(FUEL))?;
    let trace = outcome.trace();
    if let Some(path) = &cli.out {
        with_output(Some(path), |w| Ok(trace.write_csv(w)?))?;
    }
    match &outcome {
        ReductionOutcome::NormalForm { term, .. } => {
            let time = trace.time().map_err(fail(FUEL))?;
            println!("normal form: {term}");
            println!("steps: {}", trace.step_count());
            println!("cost: {}", trace.total_cost());
            println!("time: {time}");
            Ok(())
        }
        ReductionOutcome::FuelExhausted { term, .. } => {
            println!("steps: {}", trace.step_count());
            println!("cost: {}", trace.total_cost());
            println!("last size: {}", term.size());
            Err(fail(FUEL)(anyhow!(
                "no normal form within {} steps",
                cli.fuel
            )))
        }
    }
}

fn load_tm(path: &Path) -> Result<TuringMachine, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(fail(BAD_INPUT))?;
    parse_tm(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(fail(BAD_INPUT))
}

fn cmd_compile_tm(cli: &Cli, machine: &Path, input: &str, io_alpha: Option<&str>) -> CmdResult {
    let m = load_tm(machine)?;
    let io = match io_alpha {
        Some(s) => Alphabet::parse_list(s).map_err(fail(BAD_INPUT))?,
        None => m.io_alphabet(),
    };
    match run_compiled(&m, &io, input, cli.fuel) {
        Ok(r) => {
            println!("output: {}", r.output);
            println!("lambda cost: {}", r.lambda_cost);
            println!("lambda steps: {}", r.lambda_steps);
            println!("machine steps: {}", r.tm_steps);
            println!(
                "overhead: {:.3}",
                r.overhead(io.word(input).map_or(0, |w| w.len()))
            );
            Ok(())
        }
        Err(e @ (RunError::OracleFuel(_) | RunError::LambdaFuel { .. } | RunError::Engine(_))) => {
            Err(fail(FUEL)(e))
        }
        Err(e @ RunError::Mismatch { .. }) => Err(fail(MISMATCH)(e)),
        Err(e) => Err(fail(BAD_INPUT)(e)),
    }
}

fn cmd_run_tm(cli: &Cli, machine: &Path, input: &str) -> CmdResult {
    let m = load_tm(machine)?;
    let word = m.alphabet().word(input).map_err(fail(BAD_INPUT))?;
    let run = simulate_tm(&m, &word, cli.fuel).map_err(fail(FUEL))?;
    println!("output: {}", m.alphabet().render(&run.output));
    println!("steps: {}", run.steps);
    println!("state: {}", m.states().symbol(run.last.state));
    Ok(())
}

fn looks_like_theta(s: &str) -> bool {
    s.chars()
        .all(|c| c.is_whitespace() || matches!(c, 'L' | 'λ' | '@' | '0' | '1' | '*' | '▶'))
}

fn cmd_machine_r(cli: &Cli, input: &str) -> CmdResult {
    let input = read_term_arg(input)?;
    let theta = if looks_like_theta(&input) {
        ThetaString::parse(&input).map_err(fail(BAD_INPUT))?
    } else {
        encode_theta(&parse_term(&input).map_err(fail(BAD_INPUT))?)
    };
    let term = decode_theta(&theta).map_err(fail(BAD_INPUT))?;
    let run = match mr_normalize(&theta, cli.fuel).map_err(fail(BAD_INPUT))? {
        MrOutcome::Normal(run) => run,
        MrOutcome::FuelExhausted(run) => {
            println!("iterations: {}", run.iterations.len());
            return Err(fail(FUEL)(anyhow!(
                "no normal form within {} iterations",
                cli.fuel
            )));
        }
    };
    let csv_out = cli.out.as_deref();
    with_output(csv_out, |w| Ok(write_iterations_csv(&run.iterations, w)?))?;
    println!("output: {}", run.output);
    println!("output (ascii): {}", run.output.to_ascii());
    println!("iterations: {}", run.iterations.len());
    println!("op count: {}", run.op_count);
    let engine = normalize(&term, Strategy::Leftmost, cli.fuel).map_err(fail(FUEL))?;
    if !engine.is_normal_form() {
        return Err(fail(FUEL)(anyhow!(
            "engine found no normal form within {} steps",
            cli.fuel
        )));
    }
    let expect = encode_theta(engine.term());
    if expect != run.output || engine.trace().step_count() != run.iterations.len() {
        return Err(fail(MISMATCH)(anyhow!(
            "engine gives {} after {} steps",
            expect,
            engine.trace().step_count()
        )));
    }
    println!("engine: agrees");
    Ok(())
}

fn parse_range(s: &str) -> anyhow::Result<std::ops::RangeInclusive<u64>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("expected MIN..MAX, found '{s}'"))?;
    let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().trim_start_matches('=').parse()?);
    if a < 2 || a > b {
        return Err(anyhow!("size range must satisfy 2 <= MIN <= MAX"));
    }
    Ok(a..=b)
}

fn cmd_machine_r_corpus(cli: &Cli, count: usize, sizes: &str) -> CmdResult {
    let range = parse_range(sizes).map_err(fail(BAD_INPUT))?;
    let points = bench::machine_r_corpus(cli.seed, count, range, cli.fuel.min(1_000));
    let disagree = points.iter().filter(|p| !p.agrees).count();
    let (c, c2) = bench::max_constants(&points);
    println!("terms: {}", points.len());
    println!("max C (ops/(tl_before+tl_after)^2): {c:.6}");
    println!("max C' (op_count/Time^4): {c2:.6e}");
    println!("engine disagreements: {disagree}");
    if disagree > 0 {
        return Err(fail(MISMATCH)(anyhow!(
            "{disagree} terms disagree with the engine"
        )));
    }
    Ok(())
}

fn cmd_encode(what: &EncodeCmd) -> CmdResult {
    let t = match what {
        EncodeCmd::Scott { alphabet, text } => {
            let a = Alphabet::parse_list(alphabet).map_err(fail(BAD_INPUT))?;
            encode_string(&a, text).map_err(fail(BAD_INPUT))?
        }
        EncodeCmd::Symbol { alphabet, symbol } => {
            let a = Alphabet::parse_list(alphabet).map_err(fail(BAD_INPUT))?;
            encode_symbol(&a, symbol).map_err(fail(BAD_INPUT))?
        }
        EncodeCmd::Church { n } => church_numeral(*n),
        EncodeCmd::Theta { term } => parse_term(term).map_err(fail(BAD_INPUT))?,
    };
    let sizes = size_report(&t);
    println!("term: {t}");
    println!("theta: {}", encode_theta(&t));
    println!("size: {}", sizes.length);
    println!("true length: {}", sizes.true_length);
    Ok(())
}

fn cmd_bench(cli: &Cli, suite: &str) -> CmdResult {
    let suite: Suite = suite.parse().map_err(fail(BAD_INPUT))?;
    let report = bench::run_suite(
        suite,
        BenchConfig {
            seed: cli.seed,
            fuel: cli.fuel,
        },
    );
    with_output(cli.out.as_deref(), |w| Ok(report.write_csv(w)?))?;
    if report.passed() {
        eprintln!("{suite}: all checks passed");
        Ok(())
    } else {
        for v in &report.violations {
            eprintln!("violated: {v}");
        }
        Err(fail(MISMATCH)(anyhow!(
            "{suite}: {} check(s) failed",
            report.violations.len()
        )))
    }
}

fn cmd_pca(cli: &Cli, count: usize) -> CmdResult {
    for c in Combinator::ALL {
        eprintln!("{:<6} {}", c.name(), build_combinator(c));
    }
    let fuel = cli.fuel.min(500);
    let triples = bench::value_triples(cli.seed, count, 100, fuel);
    with_output(cli.out.as_deref(), |w| {
        writeln!(w, "triple,size_v,size_u,size_w,combinator,stages,overhead")?;
        for (i, [v, u, x]) in triples.iter().enumerate() {
            for c in Combinator::ALL {
                let m = measure(c, v, u, x, fuel)?;
                let stages: Vec<String> = m.stages.iter().map(u64::to_string).collect();
                writeln!(
                    w,
                    "{i},{},{},{},{c},{},{}",
                    v.size(),
                    u.size(),
                    x.size(),
                    stages.join("/"),
                    m.overhead
                )?;
            }
        }
        Ok(())
    })
}

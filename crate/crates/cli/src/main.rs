use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use asmlam::asm::{Inputs, Machine, RunOutcome};
use asmlam::compiler::{compile, CompileOptions, CompiledMachine};
use asmlam::cosim::{decoration_audit, lockstep, Verdict, AUDIT_HEADER};
use asmlam::encodings::DatatypeDef;
use asmlam::fsig::FSignature;
use asmlam::normalize::normalize_machine;
use asmlam::reduce::{reduce_counting, reduce_leftmost, reduce_leftmost_f, Outcome};
use asmlam::source::{parse_machine, print_machine};
use asmlam::value::Value;
use asmlam::Term;

#[derive(Parser)]
#[command(name = "asmlam", version, about = "Run, normalize and compile abstract state machines into lambda terms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Binds an input constant, e.g. `--input a0=12`.
    #[arg(long = "input", value_name = "NAME=VALUE")]
    inputs: Vec<String>,
}

#[derive(Args, Clone, Default)]
struct SizeArgs {
    /// Extra beta-steps per round above the measured minimum.
    #[arg(long = "headroom-K", default_value_t = 0)]
    headroom_k: u64,
    /// Extra F-steps per round above the measured minimum.
    #[arg(long = "headroom-L", default_value_t = 0)]
    headroom_l: u64,
    /// Fixes K outright (must be at least the minimum).
    #[arg(long = "K")]
    k: Option<u64>,
    /// Fixes L outright (must be at least the minimum).
    #[arg(long = "L")]
    l: Option<u64>,
}

impl SizeArgs {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            k: self.k,
            l: self.l,
            headroom_k: self.headroom_k,
            headroom_l: self.headroom_l,
            ..CompileOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a machine and print it back in source syntax.
    Parse { file: PathBuf },
    /// Run a machine, printing one record per visited state and the outcome.
    Run {
        file: PathBuf,
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Print the guarded normal form of the program.
    Normalize { file: PathBuf },
    /// Compile to a combinator; prints the manifest and theta.
    Compile {
        file: PathBuf,
        #[command(flatten)]
        sizes: SizeArgs,
        /// Omit the (large) printed theta.
        #[arg(long)]
        no_theta: bool,
    },
    /// Run machine and term in lockstep over a grid of inputs.
    Verify {
        file: PathBuf,
        /// Takes the first N carrier values of every input (default: all).
        #[arg(long)]
        grid: Option<usize>,
        /// Verifies these inputs only, instead of a grid.
        #[command(flatten)]
        inputs: InputArgs,
        /// Round budget per run.
        #[arg(long, default_value_t = 1_000)]
        max_steps: usize,
        #[command(flatten)]
        sizes: SizeArgs,
    },
    /// Print the lambda code of a value.
    Encode {
        value: String,
        /// Datatype sort to encode into (Scott encoding); default: plain code.
        #[arg(long)]
        sort: Option<String>,
        /// Source file declaring the datatype.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Normalize a term and read back the value it encodes.
    Decode {
        term: String,
        #[arg(long)]
        sort: Option<String>,
        /// Decode as a snapshot of this compiled machine.
        #[arg(long)]
        machine: Option<PathBuf>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Print the decoration audit table.
    Audit,
    /// Print every reduction step of a term with its decoration.
    Trace {
        /// A term in the text syntax; omitted with `--machine`, the initial
        /// configuration of the compiled machine is traced.
        term: Option<String>,
        #[arg(long)]
        machine: Option<PathBuf>,
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
        /// Contract beta-redexes only.
        #[arg(long)]
        pure: bool,
    },
}

fn load(path: &Path) -> Result<Machine> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_machine(&src).map_err(|d| anyhow!("{}:\n{d}", path.display()))
}

fn parse_inputs(m: &Machine, args: &InputArgs) -> Result<Inputs> {
    let mut out = Inputs::new();
    for kv in &args.inputs {
        let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--input expects NAME=VALUE, got `{kv}`"))?;
        let k = k.trim();
        let known = m.input_symbols().iter().any(|id| m.symbol_name(*id).as_ref() == k);
        if !known {
            bail!("`{k}` is not an input of this machine");
        }
        let v = Value::parse(v.trim()).map_err(|e| anyhow!("value for `{k}`: {e}"))?;
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

fn fmt_inputs(i: &Inputs) -> String {
    i.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn compile_or_bail(m: &Machine, sizes: &SizeArgs) -> Result<CompiledMachine> {
    compile(m, &sizes.options()).map_err(|e| anyhow!("compile: {e}"))
}

fn datatypes(file: &Option<PathBuf>) -> Result<DatatypeDef> {
    Ok(match file {
        Some(p) => load(p)?.datatypes,
        None => DatatypeDef::default(),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Parse { file } => {
            print!("{}", print_machine(&load(&file)?));
        }
        Cmd::Run { file, inputs, max_steps } => {
            let m = load(&file)?;
            let inputs = parse_inputs(&m, &inputs)?;
            let r = m.run(&inputs, max_steps)?;
            for (i, s) in r.trajectory.iter().enumerate() {
                println!("step={i} {}", s.digest());
            }
            println!("outcome: {}", r.outcome);
            if let RunOutcome::Success { outputs, .. } = &r.outcome {
                let outs = m.output_symbols();
                for (id, v) in outs.iter().zip(outputs) {
                    println!("output {} = {v}", m.symbol_name(*id));
                }
            }
            println!("steps: {}", r.steps);
            if r.outcome == RunOutcome::Diverged {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Normalize { file } => {
            let m = load(&file)?;
            let g = normalize_machine(&m);
            println!("{}", g.display(&m.vocab));
        }
        Cmd::Compile { file, sizes, no_theta } => {
            let cm = compile_or_bail(&load(&file)?, &sizes)?;
            println!("{}", cm.manifest());
            if !no_theta {
                println!("theta = {}", cm.theta());
            }
        }
        Cmd::Verify { file, grid, inputs, max_steps, sizes } => {
            let m = load(&file)?;
            let cm = compile_or_bail(&m, &sizes)?;
            let runs: Vec<Inputs> = if !inputs.inputs.is_empty() {
                vec![parse_inputs(&m, &inputs)?]
            } else {
                let mut all = m.input_grid()?;
                if let Some(n) = grid {
                    let keep = input_prefixes(&m, n)?;
                    all.retain(|i| i.iter().all(|(k, v)| keep.iter().any(|(n, vs)| n == k && vs.contains(v))));
                }
                all
            };
            let (mut pass, mut fail, mut open) = (0, 0, 0);
            let mut rounds = 0;
            for i in &runs {
                let rep = lockstep(&cm, i, max_steps)?;
                rounds += rep.rounds.len();
                let (tag, why) = match &rep.verdict {
                    Verdict::Pass => {
                        pass += 1;
                        ("pass", String::new())
                    }
                    Verdict::Fail(w) => {
                        fail += 1;
                        ("fail", format!(" reason=\"{w}\""))
                    }
                    Verdict::Inconclusive(w) => {
                        open += 1;
                        ("inconclusive", format!(" reason=\"{w}\""))
                    }
                };
                let outcome = rep.term_outcome.as_ref().map_or("none".to_string(), |d| d.to_string());
                println!(
                    "verify {} rounds={} steps={} term=\"{outcome}\" verdict={tag}{why}",
                    fmt_inputs(i),
                    rep.rounds.len(),
                    rep.total_steps()
                );
            }
            println!();
            println!("{:<14}{:>8}", "runs", runs.len());
            println!("{:<14}{:>8}", "rounds", rounds);
            println!("{:<14}{:>8}", "pass", pass);
            println!("{:<14}{:>8}", "fail", fail);
            println!("{:<14}{:>8}", "inconclusive", open);
            println!("(K,L) = ({},{}) for every round; minimum ({},{})", cm.k(), cm.l(), cm.comb.k_min, cm.comb.l_min);
            if fail + open > 0 {
                println!("verdict: FAIL");
                return Ok(ExitCode::from(1));
            }
            println!("verdict: pass");
        }
        Cmd::Encode { value, sort, file } => {
            let v = Value::parse(&value).map_err(|e| anyhow!("{e}"))?;
            let t = match sort {
                Some(s) => datatypes(&file)?.encode(&s, &v)?,
                None => Term::code(v),
            };
            println!("{t}");
        }
        Cmd::Decode { term, sort, machine, file } => {
            let t = Term::parse(&term).map_err(|e| anyhow!("{e}"))?;
            if let Some(p) = machine {
                let cm = compile_or_bail(&load(&p)?, &SizeArgs::default())?;
                let r = reduce_counting(&t, Some(&cm.sig), 1_000_000);
                println!("{}", cm.decode(&r.term)?);
                return Ok(ExitCode::SUCCESS);
            }
            let r = reduce_counting(&t, Some(&FSignature::boolean()), 1_000_000);
            if r.outcome != Outcome::Normal {
                bail!("term has no normal form within budget: {:?}", r.outcome);
            }
            let v = match sort {
                Some(s) => datatypes(&file)?.decode(&s, &r.term),
                None => r.term.as_value(),
            };
            match v {
                Some(v) => println!("{v}"),
                None => bail!("normal form `{}` is not a code", r.term),
            }
        }
        Cmd::Audit => {
            println!("{AUDIT_HEADER}");
            for row in decoration_audit() {
                println!("{row}");
            }
        }
        Cmd::Trace { term, machine, inputs, max_steps, pure } => {
            let (t, sig) = match (term, machine) {
                (Some(t), None) => (Term::parse(&t).map_err(|e| anyhow!("{e}"))?, FSignature::boolean()),
                (None, Some(p)) => {
                    let m = load(&p)?;
                    let inputs = parse_inputs(&m, &inputs)?;
                    let cm = compile_or_bail(&m, &SizeArgs::default())?;
                    (cm.initial_term(&inputs)?, cm.sig.clone())
                }
                _ => bail!("give either a term or --machine"),
            };
            let r = if pure { reduce_leftmost(&t, max_steps) } else { reduce_leftmost_f(&t, &sig, max_steps) };
            println!("0 start {t}");
            for (i, s) in r.trace.steps.iter().enumerate() {
                println!("{} {} @{} {}", i + 1, s.kind, s.at, s.after);
            }
            println!("beta={} F={} total={}", r.trace.beta_count, r.trace.f_count, r.trace.total());
            match r.outcome {
                Outcome::Normal => println!("normal"),
                other => {
                    println!("stopped: {other:?}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// The first `n` carrier values of each input symbol.
fn input_prefixes(m: &Machine, n: usize) -> Result<Vec<(String, Vec<Value>)>> {
    m.input_symbols()
        .iter()
        .map(|id| {
            let s = &m.vocab.symbol(*id).result;
            let c = s.carrier().ok_or_else(|| anyhow!("input sort `{}` is infinite", s.name()))?;
            Ok((m.symbol_name(*id).to_string(), c.into_iter().take(n).collect()))
        })
        .collect()
}

fn main() -> ExitCode {
    // Die quietly when piped into `head` and friends.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

//! Batch front end.
//!
//! Every output starts with a header: the version, the full configuration
//! (defaults included) and the SHA-256 of every input file. Trace and text
//! outputs prefix header lines with `#`, s-expression outputs with `;`.
//! Exit codes: 0 success, 1 domain error (one `error<TAB>kind<TAB>message`
//! line on stderr), 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::arithmetizer::{goedel_sentence, StandardPredicates};
use crate::closure::cm_stream;
use crate::encoding::Str;
use crate::enumerators::{dioph_stream, halting_stream};
use crate::logic::eval::{eval_with, Env, EvalError};
use crate::logic::proof::{check_proof, Proof, ProofVerdict, Theory};
use crate::logic::sexpr::parse_formula;
use crate::logic::Formula;
use crate::machines::labeled_corpus;
use crate::speculative::m_spec;
use crate::stabilization::{
    parse_trace, stable_at_horizon, write_report, write_trace, Assertion, AssertionStream, ListStream, Sign, Traceable,
};
use crate::turing::{computation_prefix, run, Machine, RunOutcome, TotalState};

#[derive(Parser, Debug)]
#[command(name = "stablecomp", version, about = "Stable computation engine and machine-to-arithmetic compiler")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled suites; recorded in the header.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct StreamOpts {
    /// Last stream index written.
    #[arg(long, default_value_t = 200)]
    horizon: u64,
    /// Write the horizon report instead of the trace.
    #[arg(long)]
    report: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run a machine on an input string.
    Simulate {
        #[arg(long)]
        machine: PathBuf,
        /// Input over `0`, `1`, `b`.
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 1000)]
        fuel: u64,
        /// Print every configuration.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Horizon report of a finite trace file.
    Stabilize {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = 200)]
        horizon: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Trace of the stream deciding "p has no integer root".
    Dioph {
        #[command(flatten)]
        stream: StreamOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Trace of the stream deciding non-halting on the built-in corpus.
    Halting {
        #[command(flatten)]
        stream: StreamOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Trace of the deductive-closure stream of a premise stream.
    Closure {
        /// Lines `+ SENTENCE` or `- SENTENCE`, repeated forever.
        #[arg(long)]
        premises: PathBuf,
        #[command(flatten)]
        stream: StreamOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Trace of the speculative extension of a premise stream.
    Speculative {
        #[arg(long)]
        premises: PathBuf,
        #[command(flatten)]
        stream: StreamOpts,
        #[command(flatten)]
        common: Common,
    },
    /// Compile the Gödel sentence of a sentence-emitting machine.
    Goedel {
        #[arg(long)]
        machine: PathBuf,
        /// Also write the spec of the decision machine Z here.
        #[arg(long)]
        z_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a sentence in the standard model.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 10_000_000)]
        fuel: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Check a proof file.
    ProveCheck {
        #[arg(long)]
        proof: PathBuf,
        /// `empty`, `ra` or `pa`.
        #[arg(long, default_value = "ra")]
        theory: String,
        /// One premise sentence per line.
        #[arg(long)]
        premises: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
struct DomainError {
    kind: &'static str,
    msg: String,
}

fn domain(kind: &'static str, msg: impl ToString) -> DomainError {
    DomainError { kind, msg: msg.to_string() }
}

type Res<T> = Result<T, DomainError>;

/// Parses `args` (program name first) and runs the subcommand.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error\t{}\t{}", e.kind, e.msg.replace(['\t', '\n'], " "));
            1
        }
    }
}

struct Output {
    prefix: &'static str,
    text: String,
}

impl Output {
    fn new(prefix: &'static str, cmd: &str, config: &[(&str, String)], inputs: &[&Path]) -> Res<Output> {
        let mut text = format!("{prefix} stablecomp {}\n{prefix} subcommand={cmd}", env!("CARGO_PKG_VERSION"));
        for (k, v) in config {
            let _ = write!(text, " {k}={v}");
        }
        text.push('\n');
        for p in inputs {
            let bytes = read_bytes(p)?;
            let _ = writeln!(text, "{prefix} input {} sha256={}", p.display(), hex::encode(Sha256::digest(&bytes)));
        }
        Ok(Output { prefix, text })
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn comment(&mut self, s: impl AsRef<str>) {
        let p = self.prefix;
        self.line(format!("{p} {}", s.as_ref()));
    }

    fn finish(self, out: &Option<PathBuf>) -> Res<()> {
        match out {
            Some(p) => fs::write(p, self.text).map_err(|e| domain("io", format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(self.text.as_bytes()).map_err(|e| domain("io", e)),
        }
    }
}

fn read_bytes(p: &Path) -> Res<Vec<u8>> {
    fs::read(p).map_err(|e| domain("io", format!("{}: {e}", p.display())))
}

fn read_text(p: &Path) -> Res<String> {
    String::from_utf8(read_bytes(p)?).map_err(|_| domain("io", format!("{}: not UTF-8", p.display())))
}

fn load_machine(p: &Path) -> Res<Machine> {
    Machine::parse(&read_text(p)?).map_err(|e| domain("machine", e))
}

/// Lines `+ SENTENCE` / `- SENTENCE`; `#` and `;` start comments.
fn load_premises(p: &Path) -> Res<Vec<Assertion<Formula>>> {
    let mut out = Vec::new();
    for (i, line) in read_text(p)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let (sign, rest) = line.split_at(1);
        let sign = match sign {
            "+" => Sign::Plus,
            "-" => Sign::Minus,
            _ => return Err(domain("premises", format!("line {}: expected `+` or `-`", i + 1))),
        };
        let f = parse_formula(rest).map_err(|e| domain("premises", format!("line {}: {e}", i + 1)))?;
        if !f.is_closed() {
            return Err(domain("premises", format!("line {}: not a sentence", i + 1)));
        }
        out.push(Assertion { item: f, sign });
    }
    if out.is_empty() {
        return Err(domain("premises", "no premises"));
    }
    Ok(out)
}

fn stream_body<S>(o: &mut Output, m: &S, opts: &StreamOpts)
where
    S: AssertionStream + ?Sized,
    S::Item: Traceable,
{
    let mut buf = Vec::new();
    if opts.report {
        write_report(&stable_at_horizon(m, opts.horizon), &mut buf).expect("in-memory write");
    } else {
        write_trace(m, opts.horizon, &mut buf).expect("in-memory write");
    }
    o.text.push_str(&String::from_utf8(buf).expect("trace is UTF-8"));
}

fn stream_config(s: &StreamOpts, c: &Common) -> Vec<(&'static str, String)> {
    vec![("horizon", s.horizon.to_string()), ("report", s.report.to_string()), ("seed", c.seed.to_string())]
}

fn config_line(s: &TotalState) -> String {
    let tapes: Vec<String> = (0..3).map(|t| s.tape_contents(t).to_string()).collect();
    format!("state={} heads={:?} tapes={}", s.state, s.heads, tapes.join("|"))
}

fn execute(cmd: &Cmd) -> Res<i32> {
    match cmd {
        Cmd::Simulate { machine, input, fuel, trace, common } => {
            let m = load_machine(machine)?;
            let input_str = Str::parse(input).ok_or_else(|| domain("input", "symbols must be 0, 1, b"))?;
            let config = [("input", input.clone()), ("fuel", fuel.to_string()), ("trace", trace.to_string()), ("seed", common.seed.to_string())];
            let mut o = Output::new("#", "simulate", &config, &[machine])?;
            let outcome = run(&m, &input_str, *fuel);
            if *trace {
                let steps = outcome.halted_within().unwrap_or(*fuel);
                for (i, s) in computation_prefix(&m, &input_str, steps as usize).iter().enumerate() {
                    o.line(format!("{i}\t{}", config_line(s)));
                }
            }
            o.line(match &outcome {
                RunOutcome::Halted { output, steps } => format!("halted\tsteps={steps}\toutput={output}"),
                RunOutcome::Rejected { steps } => format!("rejected\tsteps={steps}"),
                RunOutcome::OutOfBudget(_) => format!("out-of-budget\tsteps={fuel}"),
            });
            o.finish(&common.out)?;
        }
        Cmd::Stabilize { trace, horizon, common } => {
            let items = parse_trace(&read_text(trace)?).map_err(|e| domain("trace", e))?;
            if *horizon >= items.len() as u64 {
                return Err(domain("trace", format!("horizon {horizon} beyond the last index {}", items.len() as i64 - 1)));
            }
            let config = [("horizon", horizon.to_string()), ("seed", common.seed.to_string())];
            let mut o = Output::new("#", "stabilize", &config, &[trace])?;
            let stream = ListStream::then_repeat_last(items);
            let mut buf = Vec::new();
            write_report(&stable_at_horizon(&stream, *horizon), &mut buf).expect("in-memory write");
            o.text.push_str(&String::from_utf8(buf).expect("report is UTF-8"));
            o.finish(&common.out)?;
        }
        Cmd::Dioph { stream, common } => {
            let mut o = Output::new("#", "dioph", &stream_config(stream, common), &[])?;
            stream_body(&mut o, &dioph_stream(), stream);
            o.finish(&common.out)?;
        }
        Cmd::Halting { stream, common } => {
            let mut o = Output::new("#", "halting", &stream_config(stream, common), &[])?;
            let corpus = labeled_corpus().into_iter().map(|(p, _)| p).collect();
            stream_body(&mut o, &halting_stream(corpus), stream);
            o.finish(&common.out)?;
        }
        Cmd::Closure { premises, stream, common } => {
            let items = load_premises(premises)?;
            let mut o = Output::new("#", "closure", &stream_config(stream, common), &[premises])?;
            stream_body(&mut o, &cm_stream(ListStream::new(Vec::new(), items)), stream);
            o.finish(&common.out)?;
        }
        Cmd::Speculative { premises, stream, common } => {
            let items = load_premises(premises)?;
            let mut o = Output::new("#", "speculative", &stream_config(stream, common), &[premises])?;
            stream_body(&mut o, &m_spec(ListStream::new(Vec::new(), items)), stream);
            o.finish(&common.out)?;
        }
        Cmd::Goedel { machine, z_out, common } => {
            let g = load_machine(machine)?;
            let gs = goedel_sentence(&g);
            let mut o = Output::new(";", "goedel", &[("seed", common.seed.to_string())], &[machine])?;
            o.comment(format!("z-spec-sha256 {}", gs.provenance));
            o.comment(format!("z-code-length {}", gs.z_code.len()));
            o.comment(format!("z-code {}", gs.z_code.to_hex()));
            o.line(gs.sentence.to_string());
            if let Some(p) = z_out {
                fs::write(p, gs.z.to_spec()).map_err(|e| domain("io", format!("{}: {e}", p.display())))?;
            }
            o.finish(&common.out)?;
        }
        Cmd::Eval { formula, fuel, common } => {
            let f = parse_formula(formula).map_err(|e| domain("parse", e))?;
            let config = [("formula", formula.clone()), ("fuel", fuel.to_string()), ("seed", common.seed.to_string())];
            let mut o = Output::new("#", "eval", &config, &[])?;
            match eval_with(&f, &Env::new(), &StandardPredicates, *fuel) {
                Ok(v) => o.line(v.to_string()),
                Err(EvalError::OutOfFuel) => {
                    o.line("out-of-fuel");
                    o.finish(&common.out)?;
                    return Ok(1);
                }
                Err(e) => return Err(domain("eval", e)),
            }
            o.finish(&common.out)?;
        }
        Cmd::ProveCheck { proof, theory, premises, common } => {
            let p = Proof::parse(&read_text(proof)?).map_err(|e| domain("proof", e))?;
            let th = match theory.as_str() {
                "empty" => Theory::empty(),
                "ra" => Theory::ra(),
                "pa" => Theory::pa(),
                other => return Err(domain("theory", format!("unknown theory `{other}`"))),
            };
            let mut prem = Vec::new();
            let mut inputs = vec![proof.as_path()];
            if let Some(path) = premises {
                inputs.push(path);
                for (i, line) in read_text(path)?.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
                        continue;
                    }
                    prem.push(parse_formula(line).map_err(|e| domain("premises", format!("line {}: {e}", i + 1)))?);
                }
            }
            let config = [("theory", theory.clone()), ("seed", common.seed.to_string())];
            let mut o = Output::new("#", "prove-check", &config, &inputs)?;
            let verdict = check_proof(&p, &th, &prem);
            match &verdict {
                ProofVerdict::Valid(c) => o.line(format!("valid\t{c}")),
                ProofVerdict::Invalid { line, reason } => o.line(format!("invalid\tline={line}\t{reason}")),
            }
            o.finish(&common.out)?;
            if !verdict.is_valid() {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

//! Command-line interface. [`execute`] returns the exit code and everything
//! that should be printed, so it can be driven from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::amplitude::render_complex;
use crate::classical::{check_reversible, run_dfa, run_mhdfa, SymbolPairMatrix, Verdict};
use crate::compile::{compile_dfa, lift_rmfa};
use crate::error::{Error, Result};
use crate::format::{parse_automaton, save_automaton, to_json, warnings, Loaded};
use crate::lang::{
    bounded_equivalence, decide, parse_word, percent_wellformed, AcceptanceSemantics, Decision,
    EquivalenceOptions, OracleId, TapeChoice,
};
use crate::matrix::DenseMatrix;
use crate::operator::{is_endmarker, Symbol};
use crate::quantum::{run_mm1qfa, run_twotape, validate_automaton, Mode, RunResult, TwoTapeQfa};
use crate::registry::{all_examples, build_example, Machine};

#[derive(Parser, Debug)]
#[command(
    name = "qfa2t",
    version,
    about = "Simulate and check two-tape quantum finite automata"
)]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemanticsArg {
    Exists,
    Forall,
    Fixed,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Well-formedness or reversibility report.
    Validate { machine: String },
    /// One run with probabilities and an optional per-step trace.
    Run {
        machine: String,
        #[arg(long)]
        input: String,
        #[arg(long)]
        tape2: Option<String>,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Acceptance probability over guess tapes, witness and decision.
    Accept {
        machine: String,
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "exists")]
        semantics: SemanticsArg,
        /// Guess tape for `--semantics fixed`.
        #[arg(long)]
        tape2: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        cutpoint: f64,
    },
    /// Compile a DFA into a two-tape QFA.
    CompileDfa {
        dfa: String,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Lift a reversible two-head DFA to a two-head QFA.
    LiftRmfa {
        mhdfa: String,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Compare a machine with a reference language on all short words.
    LangTest {
        machine: String,
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        min_len: usize,
        #[arg(long, value_enum, default_value = "exists")]
        semantics: SemanticsArg,
        #[arg(long, default_value_t = 0.5)]
        cutpoint: f64,
        /// Skip words that are not well-formed for the oracle.
        #[arg(long)]
        only_wellformed: bool,
        #[arg(long)]
        word_cap: Option<u64>,
    },
    /// Transition matrices, one per symbol tuple.
    Matrices {
        machine: String,
        /// Comma-separated symbol tuple, e.g. '#,b'.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Built-in machines.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExamplesAction {
    List,
    Show {
        name: String,
    },
    Export {
        name: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

struct Out {
    code: i32,
    text: String,
}

impl Out {
    fn new(code: i32, text: String) -> Self {
        Self { code, text }
    }

    fn json(code: i32, v: Value) -> Self {
        let mut text = serde_json::to_string_pretty(&v).expect("serializable");
        text.push('\n');
        Self { code, text }
    }
}

/// Parses and runs a command line (`args[0]` is the program name).
pub fn execute<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            return (code, e.render().to_string());
        }
    };
    let json = cli.json;
    match dispatch(cli) {
        Ok(out) => (out.code, out.text),
        Err(e) => {
            if json {
                let out = Out::json(2, json!({ "error": e.to_string() }));
                (out.code, out.text)
            } else {
                (2, format!("error: {e}\n"))
            }
        }
    }
}

/// Loads `examples:<name>` or a file path.
pub fn resolve_machine(reference: &str) -> Result<Loaded> {
    match reference.strip_prefix("examples:") {
        Some(name) => {
            let machine = build_example(name)?.machine;
            Ok(Loaded {
                warnings: warnings(&machine),
                machine,
            })
        }
        None => parse_automaton(&std::fs::read_to_string(Path::new(reference))?),
    }
}

fn prob(p: f64) -> String {
    format!("{:.6}", p.max(0.0))
}

fn show_word(w: &[Symbol]) -> String {
    if w.iter().all(|s| s.chars().count() == 1) {
        w.concat()
    } else {
        w.join(" ")
    }
}

fn semantics(
    arg: SemanticsArg,
    tape2: Option<Vec<Symbol>>,
    cutpoint: f64,
) -> Result<AcceptanceSemantics> {
    let mode = match arg {
        SemanticsArg::Exists => TapeChoice::ExistsMax,
        SemanticsArg::Forall => TapeChoice::ForallMin,
        SemanticsArg::Fixed => TapeChoice::Fixed(
            tape2.ok_or_else(|| Error::Invalid("--semantics fixed needs --tape2".into()))?,
        ),
    };
    AcceptanceSemantics::new(mode, cutpoint)
}

fn tape2_alphabet(m: &Machine) -> Vec<Symbol> {
    match m {
        Machine::TwoTape(q) => q
            .table()
            .tape2_alphabet()
            .iter()
            .filter(|s| !is_endmarker(s))
            .cloned()
            .collect(),
        other => other.input_alphabet(),
    }
}

fn dispatch(cli: Cli) -> Result<Out> {
    let json = cli.json;
    match cli.command {
        Command::Validate { machine } => validate_cmd(&resolve_machine(&machine)?, json),
        Command::Run {
            machine,
            input,
            tape2,
            trace,
            max_steps,
        } => {
            let loaded = resolve_machine(&machine)?;
            let w = parse_word(&input, &loaded.machine.input_alphabet())?;
            let w2 = tape2
                .map(|t| parse_word(&t, &tape2_alphabet(&loaded.machine)))
                .transpose()?;
            run_cmd(&loaded.machine, &w, w2, trace, max_steps, json)
        }
        Command::Accept {
            machine,
            input,
            semantics: sem,
            tape2,
            cutpoint,
        } => {
            let loaded = resolve_machine(&machine)?;
            let w = parse_word(&input, &loaded.machine.input_alphabet())?;
            let w2 = tape2
                .map(|t| parse_word(&t, &tape2_alphabet(&loaded.machine)))
                .transpose()?;
            let sem = semantics(sem, w2, cutpoint)?;
            accept_cmd(&loaded.machine, &w, &sem, json)
        }
        Command::CompileDfa { dfa, output } => {
            let Machine::Dfa(d) = resolve_machine(&dfa)?.machine else {
                return Err(Error::Invalid(format!("{dfa} is not a DFA")));
            };
            let m = compile_dfa(&d);
            write_machine(Machine::TwoTape(m), &output, json)
        }
        Command::LiftRmfa { mhdfa, output } => {
            let Machine::MultiHead(d) = resolve_machine(&mhdfa)?.machine else {
                return Err(Error::Invalid(format!("{mhdfa} is not a multi-head DFA")));
            };
            let m = lift_rmfa(&d)?;
            write_machine(Machine::TwoTape(m), &output, json)
        }
        Command::LangTest {
            machine,
            oracle,
            max_len,
            min_len,
            semantics: sem,
            cutpoint,
            only_wellformed,
            word_cap,
        } => {
            let loaded = resolve_machine(&machine)?;
            let id: OracleId = oracle.parse()?;
            let sem = semantics(sem, None, cutpoint)?;
            let mut opts = EquivalenceOptions {
                min_len,
                ..Default::default()
            };
            if let Some(cap) = word_cap {
                opts.word_cap = cap;
            }
            if only_wellformed {
                if id != OracleId::PercentLang {
                    return Err(Error::Invalid(format!(
                        "oracle {id} has no well-formedness filter"
                    )));
                }
                opts.filter = Some(percent_wellformed);
            }
            lang_test_cmd(&loaded.machine, &id, max_len, &sem, &opts, json)
        }
        Command::Matrices { machine, pair } => {
            matrices_cmd(&resolve_machine(&machine)?.machine, pair, json)
        }
        Command::Examples { action } => examples_cmd(action, json),
    }
}

fn validate_cmd(loaded: &Loaded, json: bool) -> Result<Out> {
    let (passed, checks, extra): (bool, Vec<(String, bool, String)>, Vec<String>) =
        match &loaded.machine {
            Machine::TwoTape(_) | Machine::MeasureMany(_) => {
                let r = match &loaded.machine {
                    Machine::TwoTape(m) => validate_automaton(m),
                    Machine::MeasureMany(m) => validate_automaton(m),
                    _ => unreachable!(),
                };
                let checks = r
                    .checks
                    .iter()
                    .map(|c| (c.name.clone(), c.passed, c.detail.clone()))
                    .collect();
                (r.passed(), checks, r.warnings)
            }
            Machine::MultiHead(m) => {
                let r = check_reversible(m);
                let moves = r
                    .move_conflicts
                    .iter()
                    .map(|c| format!("moves into {} disagree: {:?}", c.target, c.moves))
                    .collect::<Vec<_>>();
                let columns = r
                    .column_conflicts
                    .iter()
                    .map(|c| {
                        format!(
                            "column {} of ({}) has entries from {}",
                            c.target,
                            c.symbols.join(","),
                            c.sources.join(", ")
                        )
                    })
                    .collect::<Vec<_>>();
                let detail = |v: &[String]| {
                    if v.is_empty() {
                        "ok".to_string()
                    } else {
                        v.join("; ")
                    }
                };
                let checks = vec![
                    (
                        "move consistency".to_string(),
                        r.move_consistent(),
                        detail(&moves),
                    ),
                    (
                        "predecessor uniqueness".to_string(),
                        r.predecessor_unique(),
                        detail(&columns),
                    ),
                ];
                (r.reversible(), checks, vec![])
            }
            Machine::Dfa(_) => (
                true,
                vec![("total transition function".into(), true, "ok".into())],
                vec![],
            ),
        };
    let mut warns = extra;
    for w in &loaded.warnings {
        if !warns.contains(w) && !checks.iter().any(|(n, _, d)| w == &format!("{n}: {d}")) {
            warns.push(w.clone());
        }
    }
    let verdict = match (&loaded.machine, passed) {
        (Machine::MultiHead(_), true) => "REVERSIBLE",
        (Machine::MultiHead(_), false) => "NOT REVERSIBLE",
        (_, true) => "PASS",
        (_, false) => "FAIL",
    };
    let code = if passed { 0 } else { 1 };
    if json {
        return Ok(Out::json(
            code,
            json!({
                "model": loaded.machine.model(),
                "passed": passed,
                "verdict": verdict,
                "checks": checks.iter().map(|(n, p, d)| json!({"name": n, "passed": p, "detail": d})).collect::<Vec<_>>(),
                "warnings": warns,
            }),
        ));
    }
    let mut s = String::new();
    for (name, ok, detail) in &checks {
        let tag = if *ok { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "{tag} {name}: {detail}");
    }
    for w in &warns {
        let _ = writeln!(s, "warn {w}");
    }
    let _ = writeln!(s, "{verdict}");
    Ok(Out::new(code, s))
}

fn result_json(r: &RunResult) -> Value {
    let mut v = json!({
        "p_acc": r.p_acc,
        "p_rej": r.p_rej,
        "p_sink": r.p_sink,
        "p_live": r.p_live,
        "steps": r.steps,
        "livelock": r.livelock,
    });
    if let Some(trace) = &r.trace {
        v["trace"] = trace
            .iter()
            .map(|t| {
                json!({
                    "step": t.step,
                    "acc": t.acc,
                    "rej": t.rej,
                    "sink": t.sink,
                    "live": t.live.iter().map(|(c, a)| json!([c.state, c.h1, c.h2, render_complex(*a)])).collect::<Vec<_>>(),
                })
            })
            .collect();
    }
    v
}

fn result_text(r: &RunResult, m: Option<&TwoTapeQfa>) -> String {
    let mut s = String::new();
    if let (Some(trace), Some(m)) = (&r.trace, m) {
        for t in trace {
            let _ = writeln!(
                s,
                "step {}: acc {} rej {} sink {}",
                t.step,
                prob(t.acc),
                prob(t.rej),
                prob(t.sink)
            );
            for (c, a) in &t.live {
                let _ = writeln!(
                    s,
                    "  ({}, {}, {})  {}",
                    m.table().state_name(c.state),
                    c.h1,
                    c.h2,
                    fmt_amp(*a)
                );
            }
        }
    }
    let _ = writeln!(s, "p_acc  {}", prob(r.p_acc));
    let _ = writeln!(s, "p_rej  {}", prob(r.p_rej));
    let _ = writeln!(s, "p_sink {}", prob(r.p_sink));
    let _ = writeln!(s, "p_live {}", prob(r.p_live));
    let _ = writeln!(s, "steps  {}", r.steps);
    if r.livelock {
        let _ = writeln!(s, "livelock: step budget exhausted with live mass left");
    }
    s
}

fn fmt_amp(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn run_cmd(
    m: &Machine,
    w: &[Symbol],
    w2: Option<Vec<Symbol>>,
    trace: bool,
    max_steps: Option<usize>,
    json: bool,
) -> Result<Out> {
    match m {
        Machine::TwoTape(q) => {
            let w2 = match (w2, q.mode()) {
                (Some(t), _) => t,
                (None, Mode::TwoHead) => w.to_vec(),
                (None, Mode::TwoTape) if q.rho().is_identity() => w.to_vec(),
                (None, Mode::TwoTape) => {
                    return Err(Error::Invalid(
                        "--tape2 is required for this machine".into(),
                    ))
                }
            };
            let r = run_twotape(q, w, &w2, max_steps, trace)?;
            Ok(if json {
                Out::json(0, result_json(&r))
            } else {
                Out::new(0, result_text(&r, Some(q)))
            })
        }
        Machine::MeasureMany(q) => {
            let r = run_mm1qfa(q, w)?;
            Ok(if json {
                Out::json(0, result_json(&r))
            } else {
                Out::new(0, result_text(&r, None))
            })
        }
        Machine::Dfa(d) => {
            let acc = run_dfa(d, w)?;
            let verdict = if acc { "accepted" } else { "rejected" };
            Ok(if json {
                Out::json(0, json!({ "verdict": verdict }))
            } else {
                Out::new(0, format!("{verdict}\n"))
            })
        }
        Machine::MultiHead(d) => {
            let r = run_mhdfa(d, w, max_steps)?;
            let verdict = match r.verdict {
                Verdict::Accepted => "accepted",
                Verdict::Rejected => "rejected",
                Verdict::Livelock => "livelock",
            };
            let state = &d.states()[r.last.state];
            Ok(if json {
                Out::json(
                    0,
                    json!({ "verdict": verdict, "steps": r.steps, "state": state, "heads": r.last.heads }),
                )
            } else {
                let heads: Vec<String> = r.last.heads.iter().map(|h| h.to_string()).collect();
                Out::new(
                    0,
                    format!(
                        "{verdict}\nsteps  {}\nstate  {state}\nheads  {}\n",
                        r.steps,
                        heads.join(" ")
                    ),
                )
            })
        }
    }
}

fn accept_cmd(m: &Machine, w: &[Symbol], sem: &AcceptanceSemantics, json: bool) -> Result<Out> {
    let (d, a) = decide(m, w, sem)?;
    let code = if d == Decision::Accept { 0 } else { 1 };
    if json {
        return Ok(Out::json(
            code,
            json!({
                "probability": a.probability,
                "witness": a.witness,
                "decision": d.to_string(),
                "live": a.live,
                "tapes": a.tapes_evaluated,
                "diagnostic": a.diagnostic,
            }),
        ));
    }
    let mut s = String::new();
    let _ = writeln!(s, "probability {}", prob(a.probability));
    if let Some(wt) = &a.witness {
        let _ = writeln!(s, "witness {}", show_word(wt));
    }
    let _ = writeln!(s, "decision {d}");
    if a.live > crate::lang::LIVE_MARGIN {
        let _ = writeln!(s, "undecided mass {}", prob(a.live));
    }
    if let Some(diag) = &a.diagnostic {
        let _ = writeln!(s, "note {diag}");
    }
    Ok(Out::new(code, s))
}

fn write_machine(m: Machine, output: &Path, json: bool) -> Result<Out> {
    save_automaton(&m, output)?;
    let Machine::TwoTape(q) = &m else {
        unreachable!("compilers produce quantum machines")
    };
    let states = q.table().num_states();
    let pairs = q.table().pairs().count();
    Ok(if json {
        Out::json(
            0,
            json!({ "output": output.display().to_string(), "model": m.model(), "states": states, "symbol_pairs": pairs }),
        )
    } else {
        Out::new(
            0,
            format!(
                "wrote {} ({}, {states} states, {pairs} symbol pairs)\n",
                output.display(),
                m.model()
            ),
        )
    })
}

fn lang_test_cmd(
    m: &Machine,
    id: &OracleId,
    max_len: usize,
    sem: &AcceptanceSemantics,
    opts: &EquivalenceOptions,
    json: bool,
) -> Result<Out> {
    let r = bounded_equivalence(m, id, max_len, sem, opts)?;
    let code = if r.disagreements.is_empty() && !r.truncated {
        0
    } else {
        1
    };
    if json {
        return Ok(Out::json(
            code,
            json!({
                "oracle": id.to_string(),
                "words_checked": r.words_checked,
                "members": r.members,
                "truncated": r.truncated,
                "disagreements": r.disagreements.iter().map(|d| json!({
                    "word": show_word(&d.word),
                    "expected": d.expected,
                    "decision": d.decision.to_string(),
                    "probability": d.probability,
                })).collect::<Vec<_>>(),
            }),
        ));
    }
    let mut s = String::new();
    if !r.disagreements.is_empty() {
        let width = r
            .disagreements
            .iter()
            .map(|d| show_word(&d.word).len())
            .max()
            .unwrap_or(0)
            .max(4);
        let _ = writeln!(s, "{:<width$}  expected  decision  probability", "word");
        for d in &r.disagreements {
            let word = if d.word.is_empty() {
                "ε".to_string()
            } else {
                show_word(&d.word)
            };
            let expected = if d.expected { "member" } else { "non-member" };
            let _ = writeln!(
                s,
                "{word:<width$}  {expected:<8}  {:<8}  {}",
                d.decision.to_string(),
                prob(d.probability)
            );
        }
    }
    let _ = writeln!(
        s,
        "checked {} words ({} members) against {id}: {} disagreements",
        r.words_checked,
        r.members,
        r.disagreements.len()
    );
    if r.truncated {
        let _ = writeln!(s, "word cap reached; result is partial");
    }
    Ok(Out::new(code, s))
}

fn symbol_matrix(
    states: &[String],
    entries: impl Iterator<Item = (usize, usize, Complex64)>,
) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(states.to_vec());
    for (i, j, z) in entries {
        m.entries[i][j] += z;
    }
    m
}

fn matrices_of(m: &Machine) -> Vec<(Vec<Symbol>, DenseMatrix)> {
    match m {
        Machine::TwoTape(q) => {
            let t = q.table();
            t.defined_tuples()
                .into_iter()
                .map(|tu| {
                    let mat = t
                        .symbol_pair_matrix(&[&tu[0], &tu[1]])
                        .expect("defined pair");
                    (tu, mat)
                })
                .collect()
        }
        Machine::MultiHead(d) => d
            .defined_tuples()
            .into_iter()
            .map(|tu| {
                let refs: Vec<&str> = tu.iter().map(String::as_str).collect();
                let mat = d.symbol_pair_matrix(&refs).expect("defined tuple");
                (tu, mat)
            })
            .collect(),
        Machine::MeasureMany(q) => q
            .operators()
            .map(|(sym, op)| {
                let n = q.states().len();
                let dense = op.dense(n);
                let entries = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, dense[i][j]));
                (
                    vec![sym.to_string()],
                    symbol_matrix(q.states(), entries.collect::<Vec<_>>().into_iter()),
                )
            })
            .collect(),
        Machine::Dfa(d) => d
            .alphabet()
            .iter()
            .map(|a| {
                let entries = d
                    .transitions()
                    .filter(|(_, s, _)| s == a)
                    .map(|(q, _, r)| (q, r, Complex64::new(1.0, 0.0)));
                (vec![a.clone()], symbol_matrix(d.states(), entries))
            })
            .collect(),
    }
}

fn matrices_cmd(m: &Machine, pair: Option<String>, json: bool) -> Result<Out> {
    let all = matrices_of(m);
    let selected: Vec<(Vec<Symbol>, DenseMatrix)> = match pair {
        None => all,
        Some(p) => {
            let want: Vec<Symbol> = p.split(',').map(|s| s.trim().to_string()).collect();
            match all.into_iter().find(|(t, _)| *t == want) {
                Some(hit) => vec![hit],
                None => {
                    // an undefined tuple renders as a zero matrix if its symbols are known
                    let mat = match m {
                        Machine::TwoTape(q) if want.len() == 2 => {
                            q.table().symbol_pair_matrix(&[&want[0], &want[1]])?
                        }
                        Machine::MultiHead(d) => d.symbol_pair_matrix(
                            &want.iter().map(String::as_str).collect::<Vec<_>>(),
                        )?,
                        _ => {
                            let alphabet = m.input_alphabet();
                            if want.len() != 1
                                || !(alphabet.contains(&want[0]) || is_endmarker(&want[0]))
                            {
                                return Err(Error::Invalid(format!("no matrix for '{p}'")));
                            }
                            let states = match m {
                                Machine::Dfa(d) => d.states().to_vec(),
                                Machine::MeasureMany(q) => q.states().to_vec(),
                                _ => vec![],
                            };
                            DenseMatrix::zeros(states)
                        }
                    };
                    vec![(want, mat)]
                }
            }
        }
    };
    if json {
        let items: Vec<Value> = selected
            .iter()
            .map(|(t, mat)| {
                json!({
                    "symbols": t,
                    "states": mat.labels,
                    "entries": mat.entries.iter().map(|r| r.iter().map(|z| render_complex(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        return Ok(Out::json(0, json!(items)));
    }
    let mut s = String::new();
    for (i, (t, mat)) in selected.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "M({})", t.join(","));
        s.push_str(&mat.render());
    }
    Ok(Out::new(0, s))
}

fn examples_cmd(action: ExamplesAction, json: bool) -> Result<Out> {
    match action {
        ExamplesAction::List => {
            let entries = all_examples();
            if json {
                return Ok(Out::json(
                    0,
                    json!(entries
                        .iter()
                        .map(|e| json!({"name": e.name, "model": e.machine.model(), "description": e.description}))
                        .collect::<Vec<_>>()),
                ));
            }
            let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for e in &entries {
                let _ = writeln!(
                    s,
                    "{:<width$}  {:<6}  {}",
                    e.name,
                    e.machine.model(),
                    e.description
                );
            }
            Ok(Out::new(0, s))
        }
        ExamplesAction::Show { name } => {
            let e = build_example(&name)?;
            let states: Vec<String> = match &e.machine {
                Machine::Dfa(d) => d.states().to_vec(),
                Machine::MultiHead(d) => d.states().to_vec(),
                Machine::MeasureMany(q) => q.states().to_vec(),
                Machine::TwoTape(q) => q.table().states().to_vec(),
            };
            if json {
                return Ok(Out::json(
                    0,
                    json!({
                        "name": e.name,
                        "model": e.machine.model(),
                        "description": e.description,
                        "states": states,
                        "input_alphabet": e.machine.input_alphabet(),
                        "repairs": e.repairs,
                        "notes": e.notes,
                    }),
                ));
            }
            let mut s = String::new();
            let _ = writeln!(s, "{} ({})", e.name, e.machine.model());
            let _ = writeln!(s, "{}", e.description);
            let _ = writeln!(s, "states: {}", states.join(" "));
            let _ = writeln!(
                s,
                "input alphabet: {}",
                e.machine.input_alphabet().join(" ")
            );
            if let Machine::TwoTape(q) = &e.machine {
                if q.mode() == Mode::TwoTape {
                    let rho: Vec<String> = q
                        .rho()
                        .pairs()
                        .iter()
                        .map(|(a, b)| format!("({a},{b})"))
                        .collect();
                    let _ = writeln!(s, "relation: {}", rho.join(" "));
                }
            }
            if e.repairs.is_empty() {
                let _ = writeln!(s, "repairs: none");
            } else {
                let _ = writeln!(s, "repairs:");
                for r in &e.repairs {
                    let _ = writeln!(s, "  - {r}");
                }
            }
            for n in &e.notes {
                let _ = writeln!(s, "note: {n}");
            }
            Ok(Out::new(0, s))
        }
        ExamplesAction::Export { name, output } => {
            let e = build_example(&name)?;
            match output {
                Some(path) => {
                    save_automaton(&e.machine, &path)?;
                    Ok(if json {
                        Out::json(0, json!({ "output": path.display().to_string() }))
                    } else {
                        Out::new(0, format!("wrote {}\n", path.display()))
                    })
                }
                None => Ok(Out::new(0, to_json(&e.machine))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let mut v = vec!["qfa2t"];
        v.extend_from_slice(args);
        execute(v)
    }

    #[test]
    fn validate_registry_machine() {
        let (code, out) = run(&["validate", "examples:anbncn-2t1qfa"]);
        assert_eq!(code, 0);
        assert!(out.ends_with("PASS\n"), "{out}");
    }

    #[test]
    fn accept_ww() {
        let (code, out) = run(&["accept", "examples:ww", "--input", "aa"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("probability 1.000000"));
        assert!(out.contains("witness ma"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["run", "examples:ww"]).0, 2);
        assert_eq!(run(&["validate", "examples:nope"]).0, 2);
    }
}

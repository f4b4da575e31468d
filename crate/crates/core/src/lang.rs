//! Acceptance over guess tapes, cut-point decisions, reference language
//! oracles and bounded equivalence checks.

use std::str::FromStr;

use rayon::prelude::*;

use crate::classical::{run_dfa, run_mhdfa, Dfa, MultiHeadDfa, Verdict};
use crate::error::{Error, Result};
use crate::operator::{is_endmarker, Symbol};
use crate::quantum::{run_mm1qfa, run_tapes, MeasureManyQfa, Mode, Tapes, TwoTapeQfa};
use crate::registry::{build_example, Machine};
use crate::relation::rho_expand;

/// Probabilities this close to the cut-point are not decided.
pub const DECISION_MARGIN: f64 = 1e-9;
/// Undecided mass above this makes a decision marginal.
pub const LIVE_MARGIN: f64 = 1e-6;
pub const DEFAULT_TAPE_CAP: u64 = 1_000_000;
pub const DEFAULT_WORD_CAP: u64 = 10_000_000;

const CHUNK: usize = 1024;
const TIE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum TapeChoice {
    /// Best guess tape.
    ExistsMax,
    /// Worst guess tape.
    ForallMin,
    /// One given tape.
    Fixed(Vec<Symbol>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcceptanceSemantics {
    pub mode: TapeChoice,
    pub cutpoint: f64,
    pub tape_cap: u64,
}

impl Default for AcceptanceSemantics {
    fn default() -> Self {
        Self {
            mode: TapeChoice::ExistsMax,
            cutpoint: 0.5,
            tape_cap: DEFAULT_TAPE_CAP,
        }
    }
}

impl AcceptanceSemantics {
    pub fn new(mode: TapeChoice, cutpoint: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&cutpoint) {
            return Err(Error::Invalid(format!(
                "cut-point {cutpoint} outside [0,1]"
            )));
        }
        Ok(Self {
            mode,
            cutpoint,
            tape_cap: DEFAULT_TAPE_CAP,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Acceptance {
    pub probability: f64,
    /// The guess tape achieving `probability` (lexicographically least on ties).
    pub witness: Option<Vec<Symbol>>,
    /// Largest undecided mass over the evaluated runs.
    pub live: f64,
    pub tapes_evaluated: u64,
    pub diagnostic: Option<String>,
}

impl Acceptance {
    fn certain(accepted: bool, witness: Option<Vec<Symbol>>) -> Self {
        Self {
            probability: if accepted { 1.0 } else { 0.0 },
            witness,
            live: 0.0,
            tapes_evaluated: 1,
            diagnostic: None,
        }
    }
}

/// Something that assigns an acceptance probability to words.
pub trait Recognizer {
    fn input_symbols(&self) -> Vec<Symbol>;
    fn acceptance(&self, w: &[Symbol], sem: &AcceptanceSemantics) -> Result<Acceptance>;
}

fn check_word(alphabet: &[Symbol], w: &[Symbol]) -> Result<()> {
    for s in w {
        if is_endmarker(s) || !alphabet.contains(s) {
            return Err(Error::UnknownSymbol {
                symbol: s.clone(),
                alphabet: "input".into(),
            });
        }
    }
    Ok(())
}

fn evaluate(m: &TwoTapeQfa, w: &[Symbol], tape: &[Symbol]) -> Result<(f64, f64)> {
    let tapes = Tapes::new(m, w, tape)?;
    let budget = m.default_budget(w.len(), tape.len());
    let r = run_tapes(m, &tapes, budget, false);
    Ok((r.p_acc, r.p_live))
}

impl Recognizer for TwoTapeQfa {
    fn input_symbols(&self) -> Vec<Symbol> {
        self.input_alphabet()
    }

    fn acceptance(&self, w: &[Symbol], sem: &AcceptanceSemantics) -> Result<Acceptance> {
        check_word(&self.input_alphabet(), w)?;
        if self.mode() == Mode::TwoHead {
            let (p, live) = evaluate(self, w, w)?;
            return Ok(Acceptance {
                probability: p,
                witness: Some(w.to_vec()),
                live,
                tapes_evaluated: 1,
                diagnostic: None,
            });
        }
        if let TapeChoice::Fixed(tape) = &sem.mode {
            let (p, live) = evaluate(self, w, tape)?;
            return Ok(Acceptance {
                probability: p,
                witness: Some(tape.clone()),
                live,
                tapes_evaluated: 1,
                diagnostic: None,
            });
        }
        if let Some(bad) = w.iter().find(|s| self.rho().images(s).is_empty()) {
            return Ok(Acceptance {
                probability: 0.0,
                witness: None,
                live: 0.0,
                tapes_evaluated: 0,
                diagnostic: Some(format!(
                    "symbol '{bad}' has no partner in the relation; no compatible tape"
                )),
            });
        }
        let needed = self.rho().count_tapes(w);
        if needed > sem.tape_cap as u128 {
            return Err(Error::TapeBudget {
                needed,
                cap: sem.tape_cap,
            });
        }
        let maximize = sem.mode == TapeChoice::ExistsMax;
        let mut tapes = rho_expand(self.rho(), w)?;
        let mut best: Option<(f64, Vec<Symbol>)> = None;
        let mut live: f64 = 0.0;
        let mut evaluated = 0u64;
        loop {
            let chunk: Vec<Vec<Symbol>> = tapes.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            let results: Vec<(f64, f64)> = if chunk.len() > 32 {
                chunk
                    .par_iter()
                    .map(|t| evaluate(self, w, t))
                    .collect::<Result<_>>()?
            } else {
                chunk
                    .iter()
                    .map(|t| evaluate(self, w, t))
                    .collect::<Result<_>>()?
            };
            let mut done = false;
            for (tape, (p, l)) in chunk.into_iter().zip(results) {
                evaluated += 1;
                live = live.max(l);
                let better = match &best {
                    None => true,
                    Some((b, _)) if maximize => p > b + TIE,
                    Some((b, _)) => p < b - TIE,
                };
                if better {
                    best = Some((p, tape));
                }
                let (b, _) = best.as_ref().expect("set above");
                if (maximize && *b >= 1.0 - TIE) || (!maximize && *b <= TIE) {
                    done = true;
                    break;
                }
            }
            if done {
                break;
            }
        }
        let (probability, witness) = best.expect("at least one tape exists");
        Ok(Acceptance {
            probability,
            witness: Some(witness),
            live,
            tapes_evaluated: evaluated,
            diagnostic: None,
        })
    }
}

impl Recognizer for MeasureManyQfa {
    fn input_symbols(&self) -> Vec<Symbol> {
        self.alphabet().to_vec()
    }

    fn acceptance(&self, w: &[Symbol], _sem: &AcceptanceSemantics) -> Result<Acceptance> {
        let r = run_mm1qfa(self, w)?;
        Ok(Acceptance {
            probability: r.p_acc,
            witness: None,
            live: r.p_live,
            tapes_evaluated: 1,
            diagnostic: None,
        })
    }
}

impl Recognizer for Dfa {
    fn input_symbols(&self) -> Vec<Symbol> {
        self.alphabet().to_vec()
    }

    fn acceptance(&self, w: &[Symbol], _sem: &AcceptanceSemantics) -> Result<Acceptance> {
        Ok(Acceptance::certain(run_dfa(self, w)?, None))
    }
}

impl Recognizer for MultiHeadDfa {
    fn input_symbols(&self) -> Vec<Symbol> {
        self.alphabet().to_vec()
    }

    fn acceptance(&self, w: &[Symbol], _sem: &AcceptanceSemantics) -> Result<Acceptance> {
        let r = run_mhdfa(self, w, None)?;
        Ok(match r.verdict {
            Verdict::Accepted => Acceptance::certain(true, None),
            Verdict::Rejected => Acceptance::certain(false, None),
            Verdict::Livelock => Acceptance {
                probability: 0.0,
                witness: None,
                live: 1.0,
                tapes_evaluated: 1,
                diagnostic: Some(format!("no halt within {} steps", r.steps)),
            },
        })
    }
}

impl Recognizer for Machine {
    fn input_symbols(&self) -> Vec<Symbol> {
        self.input_alphabet()
    }

    fn acceptance(&self, w: &[Symbol], sem: &AcceptanceSemantics) -> Result<Acceptance> {
        match self {
            Machine::Dfa(m) => m.acceptance(w, sem),
            Machine::MultiHead(m) => m.acceptance(w, sem),
            Machine::MeasureMany(m) => m.acceptance(w, sem),
            Machine::TwoTape(m) => m.acceptance(w, sem),
        }
    }
}

pub fn accept_probability<R: Recognizer + ?Sized>(
    m: &R,
    w: &[Symbol],
    sem: &AcceptanceSemantics,
) -> Result<Acceptance> {
    m.acceptance(w, sem)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
    Marginal,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
            Decision::Marginal => "marginal",
        })
    }
}

/// Strict cut-point rule with a margin of [`DECISION_MARGIN`]. Undecided mass
/// above [`LIVE_MARGIN`] blocks a rejection.
pub fn decide_probability(a: &Acceptance, cutpoint: f64) -> Decision {
    if a.probability > cutpoint + DECISION_MARGIN {
        Decision::Accept
    } else if a.live > LIVE_MARGIN {
        Decision::Marginal
    } else if a.probability < cutpoint - DECISION_MARGIN {
        Decision::Reject
    } else {
        Decision::Marginal
    }
}

pub fn decide<R: Recognizer + ?Sized>(
    m: &R,
    w: &[Symbol],
    sem: &AcceptanceSemantics,
) -> Result<(Decision, Acceptance)> {
    let a = m.acceptance(w, sem)?;
    Ok((decide_probability(&a, sem.cutpoint), a))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleId {
    /// A DFA from the example registry.
    Dfa(String),
    Anbn,
    Anbncn,
    Ww,
    PercentLang,
}

impl FromStr for OracleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anbn" => Ok(OracleId::Anbn),
            "anbncn" => Ok(OracleId::Anbncn),
            "ww" => Ok(OracleId::Ww),
            "percent-lang" => Ok(OracleId::PercentLang),
            _ => match s.strip_prefix("dfa:") {
                Some(id) => match build_example(id) {
                    Ok(e) if matches!(e.machine, Machine::Dfa(_)) => {
                        Ok(OracleId::Dfa(id.to_string()))
                    }
                    _ => Err(Error::UnknownOracle(s.to_string())),
                },
                None => Err(Error::UnknownOracle(s.to_string())),
            },
        }
    }
}

impl std::fmt::Display for OracleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleId::Dfa(id) => write!(f, "dfa:{id}"),
            OracleId::Anbn => f.write_str("anbn"),
            OracleId::Anbncn => f.write_str("anbncn"),
            OracleId::Ww => f.write_str("ww"),
            OracleId::PercentLang => f.write_str("percent-lang"),
        }
    }
}

fn within<S: AsRef<str>>(w: &[S], alphabet: &[&str]) -> Result<()> {
    for s in w {
        if !alphabet.contains(&s.as_ref()) {
            return Err(Error::UnknownSymbol {
                symbol: s.as_ref().to_string(),
                alphabet: "oracle".into(),
            });
        }
    }
    Ok(())
}

/// Length of the leading run of `sym` in `w`.
fn run_of<S: AsRef<str>>(w: &[S], sym: &str) -> usize {
    w.iter().take_while(|s| s.as_ref() == sym).count()
}

fn is_blocks<S: AsRef<str>>(w: &[S], symbols: &[&str]) -> bool {
    let n = run_of(w, symbols[0]);
    if n == 0 || w.len() != n * symbols.len() {
        return false;
    }
    symbols
        .iter()
        .enumerate()
        .all(|(k, s)| w[k * n..(k + 1) * n].iter().all(|x| x.as_ref() == *s))
}

/// Splits a `%`-language word into `(w_i, x_i)` blocks; `None` if malformed.
pub fn percent_blocks<S: AsRef<str>>(w: &[S]) -> Option<Vec<(Vec<String>, Vec<String>)>> {
    let text: Vec<&str> = w.iter().map(|s| s.as_ref()).collect();
    if text.is_empty() {
        return Some(vec![]);
    }
    if text[0] != "%" {
        return None;
    }
    let mut blocks = Vec::new();
    for block in text[1..].split(|s| *s == "%") {
        let star = block.iter().position(|s| *s == "*")?;
        let (head, tail) = (&block[..star], &block[star + 1..]);
        if tail.contains(&"*") || head.iter().chain(tail).any(|s| *s != "a" && *s != "b") {
            return None;
        }
        blocks.push((
            head.iter().map(|s| s.to_string()).collect(),
            tail.iter().map(|s| s.to_string()).collect(),
        ));
    }
    Some(blocks)
}

/// True when the word parses as zero or more `%w*x` blocks.
pub fn percent_wellformed(w: &[Symbol]) -> bool {
    percent_blocks(w).is_some()
}

pub fn oracle_membership<S: AsRef<str>>(id: &OracleId, w: &[S]) -> Result<bool> {
    match id {
        OracleId::Anbn => {
            within(w, &["a", "b"])?;
            Ok(is_blocks(w, &["a", "b"]))
        }
        OracleId::Anbncn => {
            within(w, &["a", "b", "c"])?;
            Ok(is_blocks(w, &["a", "b", "c"]))
        }
        OracleId::Ww => {
            within(w, &["a", "b"])?;
            let half = w.len() / 2;
            Ok(w.len().is_multiple_of(2)
                && w[..half]
                    .iter()
                    .zip(&w[half..])
                    .all(|(x, y)| x.as_ref() == y.as_ref()))
        }
        OracleId::PercentLang => {
            within(w, &["a", "b", "*", "%"])?;
            Ok(match percent_blocks(w) {
                None => false,
                Some(blocks) => blocks.iter().enumerate().any(|(i, bi)| {
                    blocks
                        .iter()
                        .skip(i + 1)
                        .any(|bj| bi.0 == bj.0 && bi.1 != bj.1)
                }),
            })
        }
        OracleId::Dfa(name) => match build_example(name)?.machine {
            Machine::Dfa(d) => run_dfa(&d, w),
            _ => Err(Error::UnknownOracle(format!("dfa:{name}"))),
        },
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceOptions {
    pub min_len: usize,
    pub word_cap: u64,
    /// Only words passing the filter are compared.
    pub filter: Option<fn(&[Symbol]) -> bool>,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        Self {
            min_len: 0,
            word_cap: DEFAULT_WORD_CAP,
            filter: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disagreement {
    pub word: Vec<Symbol>,
    pub expected: bool,
    pub decision: Decision,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub words_checked: u64,
    pub members: u64,
    pub disagreements: Vec<Disagreement>,
    /// Largest `|p - 1|` over member words.
    pub member_deviation: f64,
    /// Largest probability over non-member words.
    pub nonmember_max: f64,
    /// True when the word cap stopped the enumeration early.
    pub truncated: bool,
}

/// All words of length `len` over `alphabet`, in lexicographic order.
pub fn words_of_length(alphabet: &[Symbol], len: usize) -> impl Iterator<Item = Vec<Symbol>> + '_ {
    let total = (alphabet.len() as u128)
        .checked_pow(len as u32)
        .unwrap_or(u128::MAX);
    let k = alphabet.len() as u128;
    (0..total).map(move |mut i| {
        let mut out = vec![String::new(); len];
        for slot in out.iter_mut().rev() {
            *slot = alphabet[(i % k) as usize].clone();
            i /= k;
        }
        out
    })
}

pub fn bounded_equivalence<R: Recognizer + Sync + ?Sized>(
    m: &R,
    id: &OracleId,
    max_len: usize,
    sem: &AcceptanceSemantics,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    let alphabet = m.input_symbols();
    let mut report = EquivalenceReport {
        words_checked: 0,
        members: 0,
        disagreements: vec![],
        member_deviation: 0.0,
        nonmember_max: 0.0,
        truncated: false,
    };
    'lengths: for len in opts.min_len..=max_len {
        let mut words =
            words_of_length(&alphabet, len).filter(|w| opts.filter.is_none_or(|f| f(w)));
        loop {
            let room = opts.word_cap.saturating_sub(report.words_checked);
            let chunk: Vec<Vec<Symbol>> = words.by_ref().take(CHUNK.min(room as usize)).collect();
            if chunk.is_empty() {
                if room == 0 && words.next().is_some() {
                    report.truncated = true;
                    break 'lengths;
                }
                break;
            }
            let results: Vec<(bool, Decision, f64)> = chunk
                .par_iter()
                .map(|w| {
                    let expected = oracle_membership(id, w)?;
                    let (d, a) = decide(m, w, sem)?;
                    Ok((expected, d, a.probability))
                })
                .collect::<Result<_>>()?;
            for (w, (expected, decision, p)) in chunk.into_iter().zip(results) {
                report.words_checked += 1;
                if expected {
                    report.members += 1;
                    report.member_deviation = report.member_deviation.max((p - 1.0).abs());
                } else {
                    report.nonmember_max = report.nonmember_max.max(p);
                }
                let agrees = matches!(
                    (expected, decision),
                    (true, Decision::Accept) | (false, Decision::Reject)
                );
                if !agrees {
                    report.disagreements.push(Disagreement {
                        word: w,
                        expected,
                        decision,
                        probability: p,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Splits user input into symbols: on whitespace when present, otherwise by
/// greedy longest match against `alphabet`.
pub fn parse_word(text: &str, alphabet: &[Symbol]) -> Result<Vec<Symbol>> {
    let text = text.trim();
    if text.chars().any(char::is_whitespace) {
        return Ok(text.split_whitespace().map(str::to_string).collect());
    }
    let mut out = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let best = alphabet
            .iter()
            .filter(|a| !a.is_empty() && rest.starts_with(a.as_str()))
            .max_by_key(|a| a.len())
            .ok_or_else(|| Error::UnknownSymbol {
                symbol: rest.chars().next().map(String::from).unwrap_or_default(),
                alphabet: "input".into(),
            })?;
        out.push(best.clone());
        rest = &rest[best.len()..];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{anbncn_2t1qfa_machine, ww_machine};

    fn word(s: &str) -> Vec<Symbol> {
        s.chars().map(String::from).collect()
    }

    #[test]
    fn ww_witness_marks_the_middle() {
        let m = ww_machine();
        let a = accept_probability(&m, &word("aa"), &AcceptanceSemantics::default()).unwrap();
        assert!((a.probability - 1.0).abs() < 1e-9);
        assert_eq!(a.witness.unwrap(), word("ma"));
        let a = accept_probability(&m, &word("ab"), &AcceptanceSemantics::default()).unwrap();
        assert!(a.probability <= 0.5 + 1e-9);
    }

    #[test]
    fn identity_relation_has_one_tape() {
        let m = anbncn_2t1qfa_machine();
        let a = accept_probability(&m, &word("aabbcc"), &AcceptanceSemantics::default()).unwrap();
        assert!((a.probability - 1.0).abs() < 1e-9);
        assert_eq!(a.witness.unwrap(), word("aabbcc"));
        assert_eq!(a.tapes_evaluated, 1);
    }

    #[test]
    fn decisions() {
        let mk = |p| Acceptance {
            probability: p,
            witness: None,
            live: 0.0,
            tapes_evaluated: 1,
            diagnostic: None,
        };
        assert_eq!(decide_probability(&mk(1.0), 0.5), Decision::Accept);
        assert_eq!(decide_probability(&mk(0.0), 0.5), Decision::Reject);
        assert_eq!(decide_probability(&mk(0.5), 0.5), Decision::Marginal);
    }

    #[test]
    fn oracles() {
        assert!(oracle_membership(&OracleId::Ww, &word("abab")).unwrap());
        assert!(!oracle_membership(&OracleId::Ww, &word("aba")).unwrap());
        assert!(oracle_membership(&OracleId::PercentLang, &word("%a*b%a*a")).unwrap());
        assert!(!oracle_membership(&OracleId::PercentLang, &word("%a*b%a*b")).unwrap());
        assert!(!oracle_membership(&OracleId::PercentLang, &word("a*b%a*a")).unwrap());
        assert!(oracle_membership(&OracleId::Anbncn, &word("abc")).unwrap());
        assert!(!oracle_membership(&OracleId::Anbncn, &word("")).unwrap());
        assert!(oracle_membership(&OracleId::Anbn, &word("aabb")).unwrap());
        let even: OracleId = "dfa:even-a".parse().unwrap();
        assert!(oracle_membership(&even, &word("aa")).unwrap());
        assert!("dfa:ww".parse::<OracleId>().is_err());
    }

    #[test]
    fn empty_length_range_checks_epsilon_only() {
        let m = anbncn_2t1qfa_machine();
        let r = bounded_equivalence(
            &m,
            &OracleId::Anbncn,
            0,
            &AcceptanceSemantics::default(),
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.words_checked, 1);
        assert!(r.disagreements.is_empty());
    }

    #[test]
    fn word_parsing() {
        let alpha: Vec<Symbol> = ["a", "a_1", "b"].iter().map(|s| s.to_string()).collect();
        assert_eq!(parse_word("a_1ab", &alpha).unwrap(), vec!["a_1", "a", "b"]);
        assert_eq!(parse_word("a_1 a", &alpha).unwrap(), vec!["a_1", "a"]);
        assert!(parse_word("ax", &alpha).is_err());
        assert!(parse_word("", &alpha).unwrap().is_empty());
    }
}

//! Evolution engines: the measure-many one-way QFA and the configuration-space
//! simulator shared by the two-head and two-tape models.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{
    is_endmarker, HeadMove, Operator, OperatorTable, Symbol, LEFT_END, RIGHT_END,
};
use crate::relation::SymbolRelation;
use crate::superposition::Superposition;
use crate::unitarity::{check_gram_wellformed, VALIDATION_TOL};

/// Live mass below this ends a run.
pub const LIVE_TOL: f64 = 1e-12;

/// Per-step record of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub step: usize,
    /// Live (unmeasured) part after measurement, in configuration order.
    pub live: Vec<(Configuration, Complex64)>,
    pub acc: f64,
    pub rej: f64,
    pub sink: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub p_acc: f64,
    /// Includes `p_sink`.
    pub p_rej: f64,
    /// Mass that fell on undefined rows.
    pub p_sink: f64,
    pub p_live: f64,
    pub steps: usize,
    /// True when the step budget ran out with live mass left.
    pub livelock: bool,
    pub trace: Option<Vec<TraceStep>>,
}

impl RunResult {
    fn start(trace: bool) -> Self {
        Self {
            p_acc: 0.0,
            p_rej: 0.0,
            p_sink: 0.0,
            p_live: 1.0,
            steps: 0,
            livelock: false,
            trace: trace.then(Vec::new),
        }
    }
}

/// A measure-many one-way QFA with one operator per tape symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureManyQfa {
    states: Vec<String>,
    alphabet: Vec<Symbol>,
    start: usize,
    accepting: BTreeSet<usize>,
    rejecting: BTreeSet<usize>,
    operators: BTreeMap<Symbol, Operator>,
}

impl MeasureManyQfa {
    pub fn new(
        states: &[&str],
        alphabet: &[&str],
        start: &str,
        accepting: &[&str],
        rejecting: &[&str],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateState(s.clone()));
            }
        }
        if let Some(bad) = alphabet.iter().find(|a| is_endmarker(a)) {
            return Err(Error::Invalid(format!(
                "endmarker '{bad}' in input alphabet"
            )));
        }
        let find = |n: &str| {
            states
                .iter()
                .position(|s| s == n)
                .ok_or_else(|| Error::UnknownState(n.to_string()))
        };
        let accepting = accepting
            .iter()
            .map(|s| find(s))
            .collect::<Result<BTreeSet<_>>>()?;
        let rejecting = rejecting
            .iter()
            .map(|s| find(s))
            .collect::<Result<BTreeSet<_>>>()?;
        if let Some(q) = accepting.intersection(&rejecting).next() {
            return Err(Error::Invalid(format!(
                "state {} is both accepting and rejecting",
                states[*q]
            )));
        }
        Ok(Self {
            start: find(start)?,
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            states,
            accepting,
            rejecting,
            operators: BTreeMap::new(),
        })
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    fn check_symbol(&self, s: &str) -> Result<()> {
        if is_endmarker(s) || self.alphabet.iter().any(|a| a == s) {
            Ok(())
        } else {
            Err(Error::UnknownSymbol {
                symbol: s.to_string(),
                alphabet: "input".into(),
            })
        }
    }

    pub fn add_transition(
        &mut self,
        from: &str,
        symbol: &str,
        to: &str,
        amp: crate::Amplitude,
    ) -> Result<()> {
        self.check_symbol(symbol)?;
        let (f, t) = (self.state(from)?, self.state(to)?);
        self.operators
            .entry(symbol.to_string())
            .or_default()
            .push(f, t, amp);
        Ok(())
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn rejecting(&self) -> &BTreeSet<usize> {
        &self.rejecting
    }

    pub fn operators(&self) -> impl Iterator<Item = (&str, &Operator)> {
        self.operators.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn operator(&self, symbol: &str) -> Option<&Operator> {
        self.operators.get(symbol)
    }
}

pub fn run_mm1qfa<S: AsRef<str>>(m: &MeasureManyQfa, word: &[S]) -> Result<RunResult> {
    for s in word {
        let s = s.as_ref();
        if is_endmarker(s) {
            return Err(Error::Invalid(format!("endmarker '{s}' inside input word")));
        }
        m.check_symbol(s)?;
    }
    let symbols = std::iter::once(LEFT_END)
        .chain(word.iter().map(|s| s.as_ref()))
        .chain(std::iter::once(RIGHT_END));
    let mut psi = Superposition::basis(m.start);
    let mut res = RunResult::start(false);
    for gamma in symbols {
        let (next, sink) = match m.operators.get(gamma) {
            Some(op) => op.apply(&psi),
            None => (Superposition::new(), psi.norm_sqr()),
        };
        psi = next;
        let acc = psi.split_off_where(|q| m.accepting.contains(q)).norm_sqr();
        let rej = psi.split_off_where(|q| m.rejecting.contains(q)).norm_sqr();
        res.p_acc += acc;
        res.p_rej += rej + sink;
        res.p_sink += sink;
        res.steps += 1;
    }
    res.p_live = psi.norm_sqr();
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Two tapes, one head each; tape 2 holds a guess related to tape 1 by ρ.
    TwoTape,
    /// Two heads on the single tape `#w$`.
    TwoHead,
}

/// A state with 0-based head positions on `#w1$` and `#w2$`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: usize,
    pub h1: usize,
    pub h2: usize,
}

/// Two-tape (or two-head) one-way QFA over an [`OperatorTable`].
#[derive(Clone, Debug, PartialEq)]
pub struct TwoTapeQfa {
    table: OperatorTable,
    start: Superposition<usize>,
    accepting: BTreeSet<usize>,
    rejecting: BTreeSet<usize>,
    rho: SymbolRelation,
    mode: Mode,
}

impl TwoTapeQfa {
    /// A machine starting in the basis state `start`. In two-head mode `rho`
    /// is ignored and replaced by the identity on the input alphabet.
    pub fn new(
        table: OperatorTable,
        start: &str,
        accepting: &[&str],
        rejecting: &[&str],
        rho: SymbolRelation,
        mode: Mode,
    ) -> Result<Self> {
        let s = table.state(start)?;
        Self::with_start(
            table,
            Superposition::basis(s),
            accepting,
            rejecting,
            rho,
            mode,
        )
    }

    pub fn with_start(
        table: OperatorTable,
        start: Superposition<usize>,
        accepting: &[&str],
        rejecting: &[&str],
        rho: SymbolRelation,
        mode: Mode,
    ) -> Result<Self> {
        let accepting = accepting
            .iter()
            .map(|s| table.state(s))
            .collect::<Result<BTreeSet<_>>>()?;
        let rejecting = rejecting
            .iter()
            .map(|s| table.state(s))
            .collect::<Result<BTreeSet<_>>>()?;
        if let Some(q) = accepting.intersection(&rejecting).next() {
            return Err(Error::Invalid(format!(
                "state {} is both accepting and rejecting",
                table.state_name(*q)
            )));
        }
        if let Some((q, _)) = start.iter().find(|(q, _)| **q >= table.num_states()) {
            return Err(Error::UnknownState(format!("#{q}")));
        }
        let rho = match mode {
            Mode::TwoTape => {
                let order: Vec<Symbol> = table.tape2_alphabet().to_vec();
                rho.reordered(&order)?
            }
            Mode::TwoHead => {
                if table.tape1_alphabet() != table.tape2_alphabet() {
                    return Err(Error::Invalid(
                        "two-head mode needs equal tape alphabets".into(),
                    ));
                }
                let plain: Vec<&str> = table
                    .tape1_alphabet()
                    .iter()
                    .map(String::as_str)
                    .filter(|s| !is_endmarker(s))
                    .collect();
                SymbolRelation::identity(&plain)
            }
        };
        for a in rho.domain() {
            table.tape1_symbol(a)?;
        }
        Ok(Self {
            table,
            start,
            accepting,
            rejecting,
            rho,
            mode,
        })
    }

    pub fn table(&self) -> &OperatorTable {
        &self.table
    }

    pub fn start(&self) -> &Superposition<usize> {
        &self.start
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn rejecting(&self) -> &BTreeSet<usize> {
        &self.rejecting
    }

    pub fn rho(&self) -> &SymbolRelation {
        &self.rho
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// File-format model name.
    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::TwoHead => "1qfa2",
            Mode::TwoTape => "2t1qfa",
        }
    }

    pub fn is_halting(&self, q: usize) -> bool {
        self.accepting.contains(&q) || self.rejecting.contains(&q)
    }

    /// Input alphabet without endmarkers.
    pub fn input_alphabet(&self) -> Vec<Symbol> {
        self.table
            .tape1_alphabet()
            .iter()
            .filter(|s| !is_endmarker(s))
            .cloned()
            .collect()
    }

    /// Configuration count for the given word lengths.
    pub fn default_budget(&self, n1: usize, n2: usize) -> usize {
        self.table
            .num_states()
            .saturating_mul(n1 + 2)
            .saturating_mul(n2 + 2)
    }

    /// Replaces the relation (two-tape mode only).
    pub fn with_rho(&self, rho: SymbolRelation) -> Result<Self> {
        let mut out = self.clone();
        out.rho = rho.reordered(self.table.tape2_alphabet())?;
        Ok(out)
    }
}

/// Both tapes as symbol indices into the table's alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tapes {
    pub tape1: Vec<usize>,
    pub tape2: Vec<usize>,
}

impl Tapes {
    /// Checks alphabets and (in two-tape mode) ρ-compatibility. In two-head
    /// mode `w2` is ignored and tape 2 is tape 1.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(m: &TwoTapeQfa, w1: &[S], w2: &[T]) -> Result<Self> {
        let t = &m.table;
        let encode1 = |w: &[S]| -> Result<Vec<usize>> {
            let mut out = vec![t.tape1_symbol(LEFT_END)?];
            for s in w {
                let s = s.as_ref();
                if is_endmarker(s) {
                    return Err(Error::Invalid(format!("endmarker '{s}' inside input word")));
                }
                out.push(t.tape1_symbol(s)?);
            }
            out.push(t.tape1_symbol(RIGHT_END)?);
            Ok(out)
        };
        let tape1 = encode1(w1)?;
        let tape2 = match m.mode {
            Mode::TwoHead => tape1.clone(),
            Mode::TwoTape => {
                if w1.len() != w2.len() {
                    return Err(Error::TapeLengthMismatch(w1.len(), w2.len()));
                }
                let mut out = vec![t.tape2_symbol(LEFT_END)?];
                for (i, (a, b)) in w1.iter().zip(w2).enumerate() {
                    let (a, b) = (a.as_ref(), b.as_ref());
                    if !m.rho.contains(a, b) {
                        return Err(Error::IncompatibleTapes {
                            position: i,
                            first: a.to_string(),
                            second: b.to_string(),
                        });
                    }
                    out.push(t.tape2_symbol(b)?);
                }
                out.push(t.tape2_symbol(RIGHT_END)?);
                out
            }
        };
        Ok(Self { tape1, tape2 })
    }
}

/// Result of one measured step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput {
    pub live: Superposition<Configuration>,
    pub acc: f64,
    pub rej: f64,
    pub sink: f64,
}

/// Applies one unmeasured evolution step to every configuration whose state
/// is not halting. Returns the image and the mass that hit undefined rows.
/// Halting configurations in `psi` are carried over unchanged.
pub fn evolve(
    m: &TwoTapeQfa,
    tapes: &Tapes,
    psi: &Superposition<Configuration>,
) -> (Superposition<Configuration>, f64) {
    let last1 = tapes.tape1.len() - 1;
    let last2 = tapes.tape2.len() - 1;
    let mut out = Superposition::new();
    let mut sink = 0.0;
    for (c, amp) in psi.iter() {
        if m.is_halting(c.state) {
            out.accumulate(*c, *amp);
            continue;
        }
        let pair = (tapes.tape1[c.h1], tapes.tape2[c.h2]);
        let row = m.table.operator(pair).and_then(|op| op.row(c.state));
        match row {
            None => sink += amp.norm_sqr(),
            Some(row) => {
                for (t, a) in row {
                    let HeadMove(d1, d2) = m.table.head_move(*t);
                    let next = Configuration {
                        state: *t,
                        h1: (c.h1 + d1 as usize).min(last1),
                        h2: (c.h2 + d2 as usize).min(last2),
                    };
                    out.accumulate(next, amp * a.value());
                }
            }
        }
    }
    out.prune();
    (out, sink)
}

/// One evolution step followed by measurement of the state component.
pub fn step_twotape(
    m: &TwoTapeQfa,
    tapes: &Tapes,
    psi: &Superposition<Configuration>,
) -> StepOutput {
    let (mut live, sink) = evolve(m, tapes, psi);
    let acc = live
        .split_off_where(|c| m.accepting.contains(&c.state))
        .norm_sqr();
    let rej = live
        .split_off_where(|c| m.rejecting.contains(&c.state))
        .norm_sqr();
    StepOutput {
        live,
        acc,
        rej,
        sink,
    }
}

pub fn initial_configurations(m: &TwoTapeQfa) -> Superposition<Configuration> {
    m.start
        .iter()
        .map(|(q, a)| {
            (
                Configuration {
                    state: *q,
                    h1: 0,
                    h2: 0,
                },
                *a,
            )
        })
        .collect()
}

fn snapshot(
    step: usize,
    psi: &Superposition<Configuration>,
    acc: f64,
    rej: f64,
    sink: f64,
) -> TraceStep {
    TraceStep {
        step,
        live: psi.iter().map(|(c, a)| (*c, *a)).collect(),
        acc,
        rej,
        sink,
    }
}

/// Runs from the start superposition until the live mass drops below
/// [`LIVE_TOL`] or `max_steps` evolution steps have been applied.
pub fn run_twotape<S: AsRef<str>, T: AsRef<str>>(
    m: &TwoTapeQfa,
    w1: &[S],
    w2: &[T],
    max_steps: Option<usize>,
    trace: bool,
) -> Result<RunResult> {
    let tapes = Tapes::new(m, w1, w2)?;
    let budget =
        max_steps.unwrap_or_else(|| m.default_budget(tapes.tape1.len() - 2, tapes.tape2.len() - 2));
    Ok(run_tapes(m, &tapes, budget, trace))
}

pub fn run_tapes(m: &TwoTapeQfa, tapes: &Tapes, budget: usize, trace: bool) -> RunResult {
    let mut res = RunResult::start(trace);
    let mut psi = initial_configurations(m);
    // the start superposition is measured once before the first step
    let acc0 = psi
        .split_off_where(|c| m.accepting.contains(&c.state))
        .norm_sqr();
    let rej0 = psi
        .split_off_where(|c| m.rejecting.contains(&c.state))
        .norm_sqr();
    res.p_acc += acc0;
    res.p_rej += rej0;
    if let Some(t) = res.trace.as_mut() {
        t.push(snapshot(0, &psi, acc0, rej0, 0.0));
    }
    while psi.norm_sqr() >= LIVE_TOL && res.steps < budget {
        let out = step_twotape(m, tapes, &psi);
        res.steps += 1;
        res.p_acc += out.acc;
        res.p_rej += out.rej + out.sink;
        res.p_sink += out.sink;
        psi = out.live;
        if let Some(t) = res.trace.as_mut() {
            t.push(snapshot(res.steps, &psi, out.acc, out.rej, out.sink));
        }
    }
    res.p_live = psi.norm_sqr();
    res.livelock = res.p_live >= LIVE_TOL;
    res
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            s.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        for w in &self.warnings {
            s.push_str(&format!("warn {w}\n"));
        }
        s.push_str(if self.passed() { "PASS\n" } else { "FAIL\n" });
        s
    }
}

/// Things that can be checked for well-formedness.
pub trait Validate {
    fn validate(&self) -> ValidationReport;
}

pub fn validate_automaton<M: Validate + ?Sized>(m: &M) -> ValidationReport {
    m.validate()
}

fn unreachable_warnings(
    names: &[String],
    start: &BTreeSet<usize>,
    targeted: &BTreeSet<usize>,
) -> Vec<String> {
    (0..names.len())
        .filter(|q| !start.contains(q) && !targeted.contains(q))
        .map(|q| format!("state {} is never entered", names[q]))
        .collect()
}

impl Validate for TwoTapeQfa {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let t = &self.table;
        let gram = check_gram_wellformed(t, VALIDATION_TOL);
        for p in &gram.pairs {
            r.push(
                &format!("gram ({},{})", p.first, p.second),
                p.max_deviation <= VALIDATION_TOL,
                format!("max deviation {:.3e}", p.max_deviation),
            );
        }
        let norm = self.start.norm_sqr();
        r.push(
            "start normalized",
            (norm - 1.0).abs() <= VALIDATION_TOL,
            format!("squared norm {norm:.12}"),
        );
        let moving: Vec<&str> = self
            .accepting
            .iter()
            .chain(&self.rejecting)
            .filter(|q| t.head_move(**q) != HeadMove::STAY)
            .map(|q| t.state_name(*q))
            .collect();
        if !moving.is_empty() {
            r.warnings.push(format!(
                "halting states with nonzero head move: {}",
                moving.join(", ")
            ));
        }
        let mut bad_rho = Vec::new();
        for (a, b) in self.rho.pairs() {
            if t.tape1_symbol(&a).is_err() || t.tape2_symbol(&b).is_err() {
                bad_rho.push(format!("({a},{b})"));
            }
        }
        r.push(
            "relation alphabets",
            bad_rho.is_empty(),
            if bad_rho.is_empty() {
                format!("{} pairs", self.rho.pairs().len())
            } else {
                format!("pairs outside the alphabets: {}", bad_rho.join(" "))
            },
        );
        if self.mode == Mode::TwoHead {
            r.push(
                "two-head mode",
                self.rho.is_identity() && t.tape1_alphabet() == t.tape2_alphabet(),
                "identity relation over a shared alphabet".into(),
            );
        }
        let mut past_end = Vec::new();
        for ((s1, s2), op) in t.pairs() {
            let (n1, n2) = t.pair_names((s1, s2));
            for (src, row) in op.rows() {
                for (q, _) in row {
                    let HeadMove(d1, d2) = t.head_move(*q);
                    if (n1 == RIGHT_END && d1 == 1) || (n2 == RIGHT_END && d2 == 1) {
                        past_end.push(format!(
                            "{} -({n1},{n2})-> {}",
                            t.state_name(src),
                            t.state_name(*q)
                        ));
                    }
                }
            }
        }
        if !past_end.is_empty() {
            r.warnings.push(format!(
                "transitions reading $ into states that move that head (clamped, norm may not be preserved): {}",
                past_end.join(", ")
            ));
        }
        let mut targeted = BTreeSet::new();
        for (_, op) in t.pairs() {
            for (_, row) in op.rows() {
                targeted.extend(row.iter().map(|(q, _)| *q));
            }
        }
        let start: BTreeSet<usize> = self.start.iter().map(|(q, _)| *q).collect();
        r.warnings
            .extend(unreachable_warnings(t.states(), &start, &targeted));
        r
    }
}

impl Validate for MeasureManyQfa {
    fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.states.len();
        let mut targeted = BTreeSet::new();
        for (sym, op) in &self.operators {
            let dev = op.gram_deviation(n);
            r.push(
                &format!("gram {sym}"),
                dev <= VALIDATION_TOL,
                format!("max deviation {dev:.3e}"),
            );
            for (_, row) in op.rows() {
                targeted.extend(row.iter().map(|(q, _)| *q));
            }
        }
        r.push(
            "partition",
            self.accepting.is_disjoint(&self.rejecting),
            "accepting and rejecting sets are disjoint".into(),
        );
        let start = BTreeSet::from([self.start]);
        r.warnings
            .extend(unreachable_warnings(&self.states, &start, &targeted));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Amplitude;

    fn amp(s: &str) -> Amplitude {
        Amplitude::parse(s).unwrap()
    }

    #[test]
    fn mm1qfa_identity_then_accept() {
        let mut m = MeasureManyQfa::new(&["q0", "qa"], &["a"], "q0", &["qa"], &[]).unwrap();
        m.add_transition("q0", "#", "q0", amp("1")).unwrap();
        m.add_transition("q0", "a", "q0", amp("1")).unwrap();
        m.add_transition("q0", "$", "qa", amp("1")).unwrap();
        let r = run_mm1qfa(&m, &["a"]).unwrap();
        assert!((r.p_acc - 1.0).abs() < 1e-12);
        assert_eq!(r.steps, 3);
    }

    #[test]
    fn mm1qfa_split_measurement() {
        let mut m =
            MeasureManyQfa::new(&["q0", "qa", "qr"], &["a"], "q0", &["qa"], &["qr"]).unwrap();
        m.add_transition("q0", "#", "q0", amp("1")).unwrap();
        m.add_transition("q0", "a", "qa", amp("1/sqrt(2)")).unwrap();
        m.add_transition("q0", "a", "qr", amp("1/sqrt(2)")).unwrap();
        let r = run_mm1qfa(&m, &["a"]).unwrap();
        assert!((r.p_acc - 0.5).abs() < 1e-12);
        assert!((r.p_rej - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mm1qfa_rotation_product() {
        let mut m =
            MeasureManyQfa::new(&["q0", "q1", "qa", "qr"], &["a"], "q0", &["qa"], &["qr"]).unwrap();
        let c = amp("1/sqrt(2)");
        let mc = amp("-1/sqrt(2)");
        m.add_transition("q0", "#", "q0", amp("1")).unwrap();
        m.add_transition("q1", "#", "q1", amp("1")).unwrap();
        m.add_transition("q0", "a", "q0", c.clone()).unwrap();
        m.add_transition("q0", "a", "q1", c.clone()).unwrap();
        m.add_transition("q1", "a", "q0", mc).unwrap();
        m.add_transition("q1", "a", "q1", c).unwrap();
        m.add_transition("q0", "$", "qa", amp("1")).unwrap();
        m.add_transition("q1", "$", "qr", amp("1")).unwrap();
        // oracle: rotate (1,0) by 45 degrees twice as a row vector
        let th = std::f64::consts::FRAC_PI_4;
        let rot = |v: [f64; 2]| {
            [
                v[0] * th.cos() - v[1] * th.sin(),
                v[0] * th.sin() + v[1] * th.cos(),
            ]
        };
        let v = rot(rot([1.0, 0.0]));
        let r = run_mm1qfa(&m, &["a", "a"]).unwrap();
        assert!((r.p_acc - v[0] * v[0]).abs() < 1e-12);
        assert!(r.p_acc.abs() < 1e-12);
        assert!(validate_automaton(&m).passed());
    }

    fn two_state_machine() -> TwoTapeQfa {
        let mut t = OperatorTable::new(&["q0", "qa"], &["a"], &["a"]).unwrap();
        t.set_move("q0", HeadMove::BOTH).unwrap();
        t.add_unit("q0", ("#", "#"), "q0").unwrap();
        t.add_unit("q0", ("a", "a"), "q0").unwrap();
        t.add_unit("q0", ("$", "$"), "qa").unwrap();
        TwoTapeQfa::new(
            t,
            "q0",
            &["qa"],
            &[],
            SymbolRelation::identity(&["a"]),
            Mode::TwoTape,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_run_accepts() {
        let m = two_state_machine();
        let r = run_twotape(&m, &["a", "a"], &["a", "a"], None, true).unwrap();
        assert!((r.p_acc - 1.0).abs() < 1e-12);
        assert_eq!(r.steps, 4);
        assert!(!r.livelock);
        assert_eq!(r.trace.unwrap().len(), 5);
    }

    #[test]
    fn undefined_row_goes_to_sink() {
        let m = two_state_machine();
        let tapes = Tapes::new(&m, &["a"], &["a"]).unwrap();
        let psi = Superposition::basis(Configuration {
            state: 0,
            h1: 2,
            h2: 1,
        });
        let out = step_twotape(&m, &tapes, &psi);
        assert!((out.sink - 1.0).abs() < 1e-12);
        assert!(out.live.is_empty());
    }

    #[test]
    fn incompatible_tapes_rejected() {
        let mut t = OperatorTable::new(&["q0"], &["a", "b"], &["a", "b"]).unwrap();
        t.add_unit("q0", ("#", "#"), "q0").unwrap();
        let m = TwoTapeQfa::new(
            t,
            "q0",
            &[],
            &[],
            SymbolRelation::identity(&["a", "b"]),
            Mode::TwoTape,
        )
        .unwrap();
        assert!(matches!(
            run_twotape(&m, &["a"], &["b"], None, false),
            Err(Error::IncompatibleTapes { position: 0, .. })
        ));
        assert!(matches!(
            run_twotape(&m, &["a"], &[] as &[&str], None, false),
            Err(Error::TapeLengthMismatch(1, 0))
        ));
    }

    #[test]
    fn stationary_loop_hits_budget() {
        let mut t = OperatorTable::new(&["q0"], &["a"], &["a"]).unwrap();
        t.add_unit("q0", ("#", "#"), "q0").unwrap();
        let m = TwoTapeQfa::new(
            t,
            "q0",
            &[],
            &[],
            SymbolRelation::identity(&["a"]),
            Mode::TwoTape,
        )
        .unwrap();
        let r = run_twotape(&m, &["a"], &["a"], None, false).unwrap();
        assert!(r.livelock);
        assert_eq!(r.steps, 9);
        assert!((r.p_live - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_failure_names_pair() {
        let mut t = OperatorTable::new(&["q0", "q1"], &["a"], &["a"]).unwrap();
        t.add_unit("q0", ("a", "a"), "q0").unwrap();
        t.add_unit("q0", ("a", "a"), "q1").unwrap();
        let m = TwoTapeQfa::new(
            t,
            "q0",
            &[],
            &[],
            SymbolRelation::identity(&["a"]),
            Mode::TwoTape,
        )
        .unwrap();
        let r = validate_automaton(&m);
        assert!(!r.passed());
        assert!(r.checks.iter().any(|c| !c.passed && c.name == "gram (a,a)"));
    }
}

//! Deterministic single-head and one-way multi-head automata, with the
//! reversibility checker for the latter.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::operator::{is_endmarker, Symbol, LEFT_END, RIGHT_END};

fn state_map(states: &[String]) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if map.insert(s.clone(), i).is_some() {
            return Err(Error::DuplicateState(s.clone()));
        }
    }
    Ok(map)
}

fn lookup(map: &HashMap<String, usize>, s: &str) -> Result<usize> {
    map.get(s)
        .copied()
        .ok_or_else(|| Error::UnknownState(s.to_string()))
}

/// A complete deterministic finite automaton.
#[derive(Clone, Debug, PartialEq)]
pub struct Dfa {
    states: Vec<String>,
    alphabet: Vec<Symbol>,
    start: usize,
    accepting: BTreeSet<usize>,
    /// `delta[q][a]`
    delta: Vec<Vec<usize>>,
}

impl Dfa {
    pub fn new(
        states: &[&str],
        alphabet: &[&str],
        start: &str,
        accepting: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let alphabet: Vec<Symbol> = alphabet.iter().map(|s| s.to_string()).collect();
        let owned: Vec<(String, String, String)> = transitions
            .iter()
            .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
            .collect();
        let acc: Vec<String> = accepting.iter().map(|s| s.to_string()).collect();
        Self::from_parts(states, alphabet, start, &acc, &owned)
    }

    pub fn from_parts(
        states: Vec<String>,
        alphabet: Vec<Symbol>,
        start: &str,
        accepting: &[String],
        transitions: &[(String, String, String)],
    ) -> Result<Self> {
        let smap = state_map(&states)?;
        if let Some(bad) = alphabet.iter().find(|a| is_endmarker(a)) {
            return Err(Error::Invalid(format!("endmarker '{bad}' in DFA alphabet")));
        }
        let amap: HashMap<&str, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), i))
            .collect();
        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet.len()]; states.len()];
        for (q, a, r) in transitions {
            let qi = lookup(&smap, q)?;
            let ai = *amap.get(a.as_str()).ok_or_else(|| Error::UnknownSymbol {
                symbol: a.clone(),
                alphabet: "input".into(),
            })?;
            let ri = lookup(&smap, r)?;
            if delta[qi][ai].replace(ri).is_some_and(|old| old != ri) {
                return Err(Error::Invalid(format!(
                    "nondeterministic transition on ({q}, {a})"
                )));
            }
        }
        let mut total = Vec::with_capacity(states.len());
        for (qi, row) in delta.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (ai, t) in row.into_iter().enumerate() {
                out.push(t.ok_or_else(|| {
                    Error::Invalid(format!(
                        "transition function is not total: missing ({}, {})",
                        states[qi], alphabet[ai]
                    ))
                })?);
            }
            total.push(out);
        }
        let accepting = accepting
            .iter()
            .map(|s| lookup(&smap, s))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Self {
            start: lookup(&smap, start)?,
            states,
            alphabet,
            accepting,
            delta: total,
        })
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

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn next(&self, q: usize, symbol: &str) -> Result<usize> {
        let a = self.symbol_index(symbol)?;
        Ok(self.delta[q][a])
    }

    fn symbol_index(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|a| a == symbol)
            .ok_or_else(|| Error::UnknownSymbol {
                symbol: symbol.to_string(),
                alphabet: "input".into(),
            })
    }

    /// All transitions as `(source, symbol, target)` in state-then-symbol order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, &str, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(move |(q, row)| {
            row.iter()
                .enumerate()
                .map(move |(a, r)| (q, self.alphabet[a].as_str(), *r))
        })
    }

    /// The same machine as a one-head automaton that always advances.
    pub fn to_multihead(&self) -> MultiHeadDfa {
        let names: Vec<&str> = self.states.iter().map(String::as_str).collect();
        let alpha: Vec<&str> = self.alphabet.iter().map(String::as_str).collect();
        let acc: Vec<&str> = self
            .accepting
            .iter()
            .map(|q| self.states[*q].as_str())
            .collect();
        let mut m = MultiHeadDfa::new(&names, &alpha, 1, &self.states[self.start], &acc)
            .expect("DFA components are valid");
        // the start state reads the left endmarker first
        let start = self.states[self.start].clone();
        m.add(&start, &[LEFT_END], &start, &[1]).expect("valid");
        for (q, a, r) in self.transitions() {
            let (qn, rn) = (self.states[q].clone(), self.states[r].clone());
            m.add(&qn, &[a], &rn, &[1]).expect("valid");
        }
        m
    }
}

pub fn run_dfa<S: AsRef<str>>(d: &Dfa, word: &[S]) -> Result<bool> {
    let mut q = d.start;
    for s in word {
        q = d.next(q, s.as_ref())?;
    }
    Ok(d.is_accepting(q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MhTransition {
    pub target: usize,
    pub moves: Vec<u8>,
}

/// A one-way `k`-head deterministic automaton on a single `#w$` tape.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiHeadDfa {
    states: Vec<String>,
    alphabet: Vec<Symbol>,
    heads: usize,
    start: usize,
    accepting: BTreeSet<usize>,
    /// keyed by (source, symbol tuple)
    transitions: BTreeMap<(usize, Vec<Symbol>), MhTransition>,
    state_index: HashMap<String, usize>,
}

/// Configuration of a multi-head run: state and 0-based head positions on `#w$`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MhConfig {
    pub state: usize,
    pub heads: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
    Livelock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MhRun {
    pub verdict: Verdict,
    pub steps: usize,
    pub last: MhConfig,
}

impl MultiHeadDfa {
    pub fn new(
        states: &[&str],
        alphabet: &[&str],
        heads: usize,
        start: &str,
        accepting: &[&str],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let alphabet: Vec<Symbol> = alphabet.iter().map(|s| s.to_string()).collect();
        let acc: Vec<String> = accepting.iter().map(|s| s.to_string()).collect();
        Self::from_parts(states, alphabet, heads, start, &acc)
    }

    pub fn from_parts(
        states: Vec<String>,
        alphabet: Vec<Symbol>,
        heads: usize,
        start: &str,
        accepting: &[String],
    ) -> Result<Self> {
        if heads == 0 {
            return Err(Error::Invalid(
                "a multi-head automaton needs at least one head".into(),
            ));
        }
        if let Some(bad) = alphabet.iter().find(|a| is_endmarker(a)) {
            return Err(Error::Invalid(format!(
                "endmarker '{bad}' in input alphabet"
            )));
        }
        let state_index = state_map(&states)?;
        let accepting = accepting
            .iter()
            .map(|s| lookup(&state_index, s))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Self {
            start: lookup(&state_index, start)?,
            states,
            alphabet,
            heads,
            accepting,
            transitions: BTreeMap::new(),
            state_index,
        })
    }

    pub fn add(&mut self, from: &str, read: &[&str], to: &str, moves: &[u8]) -> Result<()> {
        if read.len() != self.heads || moves.len() != self.heads {
            return Err(Error::Invalid(format!(
                "transition from {from} must read and move {} heads",
                self.heads
            )));
        }
        if moves.iter().any(|m| *m > 1) {
            return Err(Error::Invalid(format!("moves from {from} must be 0 or 1")));
        }
        for s in read {
            if !is_endmarker(s) && !self.alphabet.iter().any(|a| a == s) {
                return Err(Error::UnknownSymbol {
                    symbol: s.to_string(),
                    alphabet: "tape".into(),
                });
            }
        }
        let q = self.state(from)?;
        let r = self.state(to)?;
        let key = (q, read.iter().map(|s| s.to_string()).collect());
        if self.transitions.contains_key(&key) {
            return Err(Error::Invalid(format!(
                "duplicate transition from {from} on {read:?}"
            )));
        }
        self.transitions.insert(
            key,
            MhTransition {
                target: r,
                moves: moves.to_vec(),
            },
        );
        Ok(())
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        lookup(&self.state_index, name)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn heads(&self) -> usize {
        self.heads
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &[Symbol], &MhTransition)> {
        self.transitions
            .iter()
            .map(|((q, r), t)| (*q, r.as_slice(), t))
    }

    pub fn transition(&self, state: usize, read: &[Symbol]) -> Option<&MhTransition> {
        self.transitions.get(&(state, read.to_vec()))
    }

    /// Symbol tuples that label at least one transition, in order.
    pub fn symbol_tuples(&self) -> BTreeSet<Vec<Symbol>> {
        self.transitions.keys().map(|(_, r)| r.clone()).collect()
    }

    /// Builds the tape `#w$`, checking the alphabet.
    pub fn tape<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<Symbol>> {
        let mut tape = vec![LEFT_END.to_string()];
        for s in word {
            let s = s.as_ref();
            if !self.alphabet.iter().any(|a| a == s) {
                return Err(Error::UnknownSymbol {
                    symbol: s.to_string(),
                    alphabet: "input".into(),
                });
            }
            tape.push(s.to_string());
        }
        tape.push(RIGHT_END.to_string());
        Ok(tape)
    }

    pub fn initial(&self) -> MhConfig {
        MhConfig {
            state: self.start,
            heads: vec![0; self.heads],
        }
    }

    /// One step; `None` when no transition is defined. Heads stay on `$`.
    pub fn step(&self, tape: &[Symbol], c: &MhConfig) -> Option<MhConfig> {
        let read: Vec<Symbol> = c.heads.iter().map(|h| tape[*h].clone()).collect();
        let t = self.transitions.get(&(c.state, read))?;
        let last = tape.len() - 1;
        let heads = c
            .heads
            .iter()
            .zip(&t.moves)
            .map(|(h, d)| (h + *d as usize).min(last))
            .collect();
        Some(MhConfig {
            state: t.target,
            heads,
        })
    }

    /// Number of distinct configurations on a word of length `n`.
    pub fn default_budget(&self, n: usize) -> usize {
        self.states
            .len()
            .saturating_mul((n + 2).saturating_pow(self.heads as u32))
    }
}

pub fn run_mhdfa<S: AsRef<str>>(
    m: &MultiHeadDfa,
    word: &[S],
    max_steps: Option<usize>,
) -> Result<MhRun> {
    let tape = m.tape(word)?;
    let budget = max_steps.unwrap_or_else(|| m.default_budget(word.len()));
    let mut c = m.initial();
    for steps in 0..=budget {
        match m.step(&tape, &c) {
            Some(next) => {
                if steps == budget {
                    return Ok(MhRun {
                        verdict: Verdict::Livelock,
                        steps,
                        last: c,
                    });
                }
                c = next;
            }
            None => {
                let verdict = if m.accepting.contains(&c.state) {
                    Verdict::Accepted
                } else {
                    Verdict::Rejected
                };
                return Ok(MhRun {
                    verdict,
                    steps,
                    last: c,
                });
            }
        }
    }
    unreachable!("loop returns within budget + 1 iterations")
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveConflict {
    pub target: String,
    pub moves: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnConflict {
    pub symbols: Vec<Symbol>,
    pub target: String,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversibilityReport {
    pub move_conflicts: Vec<MoveConflict>,
    pub column_conflicts: Vec<ColumnConflict>,
}

impl ReversibilityReport {
    pub fn move_consistent(&self) -> bool {
        self.move_conflicts.is_empty()
    }

    pub fn predecessor_unique(&self) -> bool {
        self.column_conflicts.is_empty()
    }

    pub fn reversible(&self) -> bool {
        self.move_consistent() && self.predecessor_unique()
    }
}

/// Checks that transitions into the same state agree on their moves and that,
/// per symbol tuple, no state has two predecessors.
pub fn check_reversible(m: &MultiHeadDfa) -> ReversibilityReport {
    let mut moves_by_target: BTreeMap<usize, BTreeSet<Vec<u8>>> = BTreeMap::new();
    let mut sources: BTreeMap<(Vec<Symbol>, usize), Vec<usize>> = BTreeMap::new();
    for ((q, read), t) in &m.transitions {
        moves_by_target
            .entry(t.target)
            .or_default()
            .insert(t.moves.clone());
        sources
            .entry((read.clone(), t.target))
            .or_default()
            .push(*q);
    }
    let move_conflicts = moves_by_target
        .into_iter()
        .filter(|(_, mv)| mv.len() > 1)
        .map(|(t, mv)| MoveConflict {
            target: m.states[t].clone(),
            moves: mv.into_iter().collect(),
        })
        .collect();
    let column_conflicts = sources
        .into_iter()
        .filter(|(_, qs)| qs.len() > 1)
        .map(|((symbols, t), qs)| ColumnConflict {
            symbols,
            target: m.states[t].clone(),
            sources: qs.into_iter().map(|q| m.states[q].clone()).collect(),
        })
        .collect();
    ReversibilityReport {
        move_conflicts,
        column_conflicts,
    }
}

/// Matrix formulation of predecessor uniqueness: for every symbol tuple the
/// rows of the 0/1 transition matrix are pairwise orthogonal.
pub fn rows_pairwise_orthogonal(m: &MultiHeadDfa) -> bool {
    m.symbol_tuples().iter().all(|tuple| {
        let refs: Vec<&str> = tuple.iter().map(String::as_str).collect();
        let mat = symbol_tuple_matrix(m, &refs);
        let n = mat.labels.len();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let dot: Complex64 = (0..n)
                    .map(|k| mat.entries[i][k] * mat.entries[j][k].conj())
                    .sum();
                dot.norm() < 1e-12
            })
        })
    })
}

/// Dense 0/1 matrix for one symbol tuple (rows = sources, columns = targets).
pub fn symbol_tuple_matrix(m: &MultiHeadDfa, tuple: &[&str]) -> DenseMatrix {
    let mut mat = DenseMatrix::zeros(m.states.clone());
    let key: Vec<Symbol> = tuple.iter().map(|s| s.to_string()).collect();
    for q in 0..m.states.len() {
        if let Some(t) = m.transitions.get(&(q, key.clone())) {
            mat.entries[q][t.target] = Complex64::new(1.0, 0.0);
        }
    }
    mat
}

/// Anything that can be viewed as a family of per-symbol-tuple matrices.
pub trait SymbolPairMatrix {
    fn symbol_pair_matrix(&self, tuple: &[&str]) -> Result<DenseMatrix>;
    /// Tuples that have at least one defined entry, in alphabet order.
    fn defined_tuples(&self) -> Vec<Vec<Symbol>>;
}

impl SymbolPairMatrix for MultiHeadDfa {
    fn symbol_pair_matrix(&self, tuple: &[&str]) -> Result<DenseMatrix> {
        if tuple.len() != self.heads {
            return Err(Error::Invalid(format!(
                "expected a {}-symbol tuple",
                self.heads
            )));
        }
        for s in tuple {
            if !is_endmarker(s) && !self.alphabet.iter().any(|a| a == s) {
                return Err(Error::UnknownSymbol {
                    symbol: s.to_string(),
                    alphabet: "tape".into(),
                });
            }
        }
        Ok(symbol_tuple_matrix(self, tuple))
    }

    fn defined_tuples(&self) -> Vec<Vec<Symbol>> {
        self.symbol_tuples().into_iter().collect()
    }
}

impl SymbolPairMatrix for crate::operator::OperatorTable {
    fn symbol_pair_matrix(&self, tuple: &[&str]) -> Result<DenseMatrix> {
        if tuple.len() != 2 {
            return Err(Error::Invalid("expected a symbol pair".into()));
        }
        Ok(DenseMatrix {
            labels: self.states().to_vec(),
            entries: self.dense((tuple[0], tuple[1]))?,
        })
    }

    fn defined_tuples(&self) -> Vec<Vec<Symbol>> {
        self.pairs()
            .map(|(k, _)| {
                let (a, b) = self.pair_names(k);
                vec![a.to_string(), b.to_string()]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_a() -> Dfa {
        Dfa::new(
            &["e", "o"],
            &["a"],
            "e",
            &["e"],
            &[("e", "a", "o"), ("o", "a", "e")],
        )
        .unwrap()
    }

    #[test]
    fn dfa_runs() {
        let d = even_a();
        assert!(run_dfa(&d, &["a", "a"]).unwrap());
        assert!(!run_dfa(&d, &["a"]).unwrap());
        assert!(run_dfa(&d, &[] as &[&str]).unwrap());
        assert!(run_dfa(&d, &["b"]).is_err());
    }

    #[test]
    fn dfa_must_be_total() {
        let r = Dfa::new(&["e", "o"], &["a"], "e", &["e"], &[("e", "a", "o")]);
        assert!(matches!(r, Err(Error::Invalid(_))));
    }

    #[test]
    fn single_transition_is_reversible() {
        let mut m = MultiHeadDfa::new(&["p", "q"], &["a"], 2, "p", &["q"]).unwrap();
        m.add("p", &["#", "#"], "q", &[1, 1]).unwrap();
        let r = check_reversible(&m);
        assert!(r.reversible());
        assert!(rows_pairwise_orthogonal(&m));
    }

    #[test]
    fn livelock_reported_on_stationary_loop() {
        let mut m = MultiHeadDfa::new(&["p"], &["a"], 1, "p", &["p"]).unwrap();
        m.add("p", &["#"], "p", &[0]).unwrap();
        let run = run_mhdfa(&m, &["a"], Some(10)).unwrap();
        assert_eq!(run.verdict, Verdict::Livelock);
        assert_eq!(run.steps, 10);
    }

    #[test]
    fn heads_clamp_at_right_endmarker() {
        let mut m = MultiHeadDfa::new(&["p", "q"], &["a"], 1, "p", &["q"]).unwrap();
        m.add("p", &["#"], "p", &[1]).unwrap();
        m.add("p", &["$"], "q", &[1]).unwrap();
        let run = run_mhdfa(&m, &[] as &[&str], None).unwrap();
        assert_eq!(run.verdict, Verdict::Accepted);
        assert_eq!(run.last.heads, vec![1]);
    }

    #[test]
    fn lifted_dfa_agrees() {
        let d = even_a();
        let m = d.to_multihead();
        for n in 0..6 {
            let w = vec!["a"; n];
            let accepted = run_mhdfa(&m, &w, None).unwrap().verdict == Verdict::Accepted;
            assert_eq!(accepted, run_dfa(&d, &w).unwrap());
        }
    }
}

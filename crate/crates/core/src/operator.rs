//! Symbol-pair-indexed operator tables and their application to superpositions.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::amplitude::Amplitude;
use crate::error::{Error, Result};
use crate::superposition::Superposition;

pub type Symbol = String;

pub const LEFT_END: &str = "#";
pub const RIGHT_END: &str = "$";

pub fn is_endmarker(s: &str) -> bool {
    s == LEFT_END || s == RIGHT_END
}

/// Per-head movement: 0 stays, 1 moves one cell right.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeadMove(pub u8, pub u8);

impl HeadMove {
    pub const STAY: HeadMove = HeadMove(0, 0);
    pub const BOTH: HeadMove = HeadMove(1, 1);

    pub fn new(d1: u8, d2: u8) -> Result<Self> {
        if d1 > 1 || d2 > 1 {
            return Err(Error::Invalid(format!(
                "head move ({d1},{d2}) must use 0/1"
            )));
        }
        Ok(HeadMove(d1, d2))
    }
}

/// One row of a partial operator: the image `V|q>` of a single source state.
pub type Row = Vec<(usize, Amplitude)>;

/// A partial linear operator over state indices. Sources without a row are
/// undefined; mass sent through them goes to the reject sink.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Operator {
    rows: BTreeMap<usize, Row>,
}

impl Operator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row(&self, source: usize) -> Option<&Row> {
        self.rows.get(&source)
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &Row)> {
        self.rows.iter().map(|(s, r)| (*s, r))
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `amp` to the entry `<target|V|source>`.
    pub fn push(&mut self, source: usize, target: usize, amp: Amplitude) {
        let row = self.rows.entry(source).or_default();
        if let Some(slot) = row.iter_mut().find(|(t, _)| *t == target) {
            slot.1 = Amplitude::from_value(slot.1.value() + amp.value());
        } else {
            row.push((target, amp));
            row.sort_by_key(|(t, _)| *t);
        }
    }

    pub fn set_row(&mut self, source: usize, row: Row) {
        self.rows.insert(source, row);
    }

    /// Image vector of `source` as a dense column of length `n`.
    pub fn image(&self, source: usize, n: usize) -> Option<Vec<Complex64>> {
        self.rows.get(&source).map(|row| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            for (t, a) in row {
                v[*t] += a.value();
            }
            v
        })
    }

    /// Dense matrix with rows indexed by source and columns by target.
    pub fn dense(&self, n: usize) -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|s| {
                self.image(s, n)
                    .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); n])
            })
            .collect()
    }

    /// Applies the operator to `psi`; returns the image of defined rows and the
    /// squared mass that fell on undefined rows.
    pub fn apply(&self, psi: &Superposition<usize>) -> (Superposition<usize>, f64) {
        let mut out = Superposition::new();
        let mut sink = 0.0;
        for (q, a) in psi.iter() {
            match self.rows.get(q) {
                Some(row) => {
                    for (t, amp) in row {
                        out.accumulate(*t, a * amp.value());
                    }
                }
                None => sink += a.norm_sqr(),
            }
        }
        out.prune();
        (out, sink)
    }

    /// Largest entrywise deviation of the Gram matrix of defined images from
    /// the identity. Zero for an operator with no rows.
    pub fn gram_deviation(&self, n: usize) -> f64 {
        let images: Vec<Vec<Complex64>> =
            self.rows.keys().filter_map(|s| self.image(*s, n)).collect();
        let mut worst: f64 = 0.0;
        for (i, u) in images.iter().enumerate() {
            for (j, v) in images.iter().enumerate().skip(i) {
                let g: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// The family `V_{σ,τ}` plus the head-move map `D`, over a fixed state list and
/// two tape alphabets (both including the endmarkers).
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTable {
    states: Vec<String>,
    tape1: Vec<Symbol>,
    tape2: Vec<Symbol>,
    operators: BTreeMap<(usize, usize), Operator>,
    moves: Vec<HeadMove>,
    state_index: HashMap<String, usize>,
    tape1_index: HashMap<Symbol, usize>,
    tape2_index: HashMap<Symbol, usize>,
}

fn with_endmarkers(alphabet: &[Symbol]) -> Vec<Symbol> {
    let mut out = vec![LEFT_END.to_string()];
    out.extend(alphabet.iter().filter(|s| !is_endmarker(s)).cloned());
    out.push(RIGHT_END.to_string());
    out
}

fn index_of(items: &[String]) -> HashMap<String, usize> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect()
}

impl OperatorTable {
    /// Creates an empty table. The endmarkers are added to both alphabets;
    /// every state starts with head move (0,0).
    pub fn new(states: &[&str], tape1: &[&str], tape2: &[&str]) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let t1: Vec<Symbol> = tape1.iter().map(|s| s.to_string()).collect();
        let t2: Vec<Symbol> = tape2.iter().map(|s| s.to_string()).collect();
        Self::from_parts(states, &t1, &t2)
    }

    pub fn from_parts(states: Vec<String>, tape1: &[Symbol], tape2: &[Symbol]) -> Result<Self> {
        let state_index = index_of(&states);
        if state_index.len() != states.len() {
            let dup = states
                .iter()
                .enumerate()
                .find(|(i, s)| state_index[*s] != *i)
                .map(|(_, s)| s.clone())
                .unwrap_or_default();
            return Err(Error::DuplicateState(dup));
        }
        let tape1 = with_endmarkers(tape1);
        let tape2 = with_endmarkers(tape2);
        let n = states.len();
        Ok(Self {
            tape1_index: index_of(&tape1),
            tape2_index: index_of(&tape2),
            states,
            tape1,
            tape2,
            operators: BTreeMap::new(),
            moves: vec![HeadMove::STAY; n],
            state_index,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn tape1_alphabet(&self) -> &[Symbol] {
        &self.tape1
    }

    pub fn tape2_alphabet(&self) -> &[Symbol] {
        &self.tape2
    }

    pub fn state(&self, name: &str) -> Result<usize> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn state_name(&self, idx: usize) -> &str {
        &self.states[idx]
    }

    pub fn tape1_symbol(&self, s: &str) -> Result<usize> {
        self.tape1_index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol {
                symbol: s.to_string(),
                alphabet: "first-tape".into(),
            })
    }

    pub fn tape2_symbol(&self, s: &str) -> Result<usize> {
        self.tape2_index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol {
                symbol: s.to_string(),
                alphabet: "second-tape".into(),
            })
    }

    pub fn pair_index(&self, pair: (&str, &str)) -> Result<(usize, usize)> {
        Ok((self.tape1_symbol(pair.0)?, self.tape2_symbol(pair.1)?))
    }

    pub fn pair_names(&self, pair: (usize, usize)) -> (&str, &str) {
        (&self.tape1[pair.0], &self.tape2[pair.1])
    }

    pub fn head_move(&self, state: usize) -> HeadMove {
        self.moves[state]
    }

    pub fn moves(&self) -> &[HeadMove] {
        &self.moves
    }

    pub fn set_move(&mut self, state: &str, m: HeadMove) -> Result<()> {
        let q = self.state(state)?;
        self.moves[q] = m;
        Ok(())
    }

    /// Adds `amp` to `<to|V_{σ,τ}|from>`.
    pub fn add_transition(
        &mut self,
        from: &str,
        pair: (&str, &str),
        to: &str,
        amp: Amplitude,
    ) -> Result<()> {
        let (s, t) = self.pair_index(pair)?;
        let q = self.state(from)?;
        let r = self.state(to)?;
        self.operators.entry((s, t)).or_default().push(q, r, amp);
        Ok(())
    }

    /// Shorthand for a unit-amplitude transition.
    pub fn add_unit(&mut self, from: &str, pair: (&str, &str), to: &str) -> Result<()> {
        self.add_transition(from, pair, to, Amplitude::one())
    }

    pub fn operator(&self, pair: (usize, usize)) -> Option<&Operator> {
        self.operators.get(&pair)
    }

    pub fn operator_by_name(&self, pair: (&str, &str)) -> Result<Option<&Operator>> {
        let idx = self.pair_index(pair)?;
        Ok(self.operators.get(&idx))
    }

    pub(crate) fn operator_mut(&mut self, pair: (usize, usize)) -> &mut Operator {
        self.operators.entry(pair).or_default()
    }

    /// Defined symbol pairs in alphabet order.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &Operator)> {
        self.operators.iter().map(|(k, v)| (*k, v))
    }

    /// Returns a copy with extra states appended (head move (0,0)).
    pub(crate) fn with_extra_states(&self, extra: &[String]) -> Result<Self> {
        let mut states = self.states.clone();
        states.extend(extra.iter().cloned());
        let mut out = Self::from_parts(states, &self.tape1, &self.tape2)?;
        out.operators = self.operators.clone();
        out.moves[..self.moves.len()].copy_from_slice(&self.moves);
        Ok(out)
    }

    /// Dense matrix for a pair (rows = sources, columns = targets).
    pub fn dense(&self, pair: (&str, &str)) -> Result<Vec<Vec<Complex64>>> {
        let n = self.num_states();
        Ok(self
            .operator_by_name(pair)?
            .map(|op| op.dense(n))
            .unwrap_or_else(|| vec![vec![Complex64::new(0.0, 0.0); n]; n]))
    }
}

/// Applies `V_{σ,τ}` to a superposition over states. Mass on sources that have
/// no row under this pair is returned separately as sink mass.
pub fn apply_operator(
    table: &OperatorTable,
    pair: (&str, &str),
    psi: &Superposition<usize>,
) -> Result<(Superposition<usize>, f64)> {
    match table.operator_by_name(pair)? {
        Some(op) => Ok(op.apply(psi)),
        None => Ok((Superposition::new(), psi.norm_sqr())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hadamard_table() -> OperatorTable {
        let mut t = OperatorTable::new(&["q0", "q1"], &["a"], &["a"]).unwrap();
        let h = Amplitude::parse("1/sqrt(2)").unwrap();
        let mh = Amplitude::parse("-1/sqrt(2)").unwrap();
        t.add_transition("q0", ("a", "a"), "q0", h.clone()).unwrap();
        t.add_transition("q0", ("a", "a"), "q1", h.clone()).unwrap();
        t.add_transition("q1", ("a", "a"), "q0", h).unwrap();
        t.add_transition("q1", ("a", "a"), "q1", mh).unwrap();
        t
    }

    #[test]
    fn identity_leaves_superposition_untouched() {
        let mut t = OperatorTable::new(&["q0", "q1"], &["a"], &["a"]).unwrap();
        t.add_unit("q0", ("a", "a"), "q0").unwrap();
        t.add_unit("q1", ("a", "a"), "q1").unwrap();
        let psi: Superposition<usize> =
            [(0, Complex64::new(0.6, 0.0)), (1, Complex64::new(0.0, 0.8))]
                .into_iter()
                .collect();
        let (out, sink) = apply_operator(&t, ("a", "a"), &psi).unwrap();
        assert_eq!(out, psi);
        assert_eq!(sink, 0.0);
    }

    #[test]
    fn hadamard_row_read_off() {
        let t = hadamard_table();
        let (out, sink) = apply_operator(&t, ("a", "a"), &Superposition::basis(0)).unwrap();
        assert!((out.get(&0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((out.get(&1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(sink, 0.0);
    }

    #[test]
    fn undefined_rows_go_to_sink() {
        let mut t = OperatorTable::new(&["q0", "q1"], &["a"], &["a"]).unwrap();
        t.add_unit("q0", ("a", "a"), "q1").unwrap();
        let psi: Superposition<usize> =
            [(0, Complex64::new(0.6, 0.0)), (1, Complex64::new(0.8, 0.0))]
                .into_iter()
                .collect();
        let (out, sink) = apply_operator(&t, ("a", "a"), &psi).unwrap();
        assert!((out.get(&1).re - 0.6).abs() < 1e-15);
        assert!((sink - 0.64).abs() < 1e-12);
        let (_, all) = apply_operator(&t, ("#", "$"), &psi).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let t = hadamard_table();
        assert!(matches!(
            apply_operator(&t, ("z", "a"), &Superposition::basis(0)),
            Err(Error::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn duplicate_states_rejected() {
        assert!(matches!(
            OperatorTable::new(&["q", "q"], &["a"], &["a"]),
            Err(Error::DuplicateState(s)) if s == "q"
        ));
    }
}

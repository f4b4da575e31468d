//! The JSON automaton file format.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{parse_amplitude, render_complex, Amplitude};
use crate::classical::{Dfa, MultiHeadDfa};
use crate::error::{Error, Result};
use crate::operator::{is_endmarker, HeadMove, OperatorTable, Symbol};
use crate::quantum::{validate_automaton, MeasureManyQfa, Mode, TwoTapeQfa};
use crate::registry::Machine;
use crate::relation::SymbolRelation;
use crate::superposition::Superposition;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartField {
    State(String),
    Superposition(Vec<(String, String)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: String,
    pub read: Vec<Symbol>,
    /// `(target, amplitude expression)` pairs.
    pub to: Vec<(String, String)>,
    #[serde(default, rename = "move", skip_serializing_if = "Option::is_none")]
    pub moves: Option<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonFile {
    pub model: String,
    pub states: Vec<String>,
    pub start: StartField,
    #[serde(default)]
    pub accept: Vec<String>,
    #[serde(default)]
    pub reject: Vec<String>,
    pub input_alphabet: Vec<Symbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tape2_alphabet: Option<Vec<Symbol>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<(Symbol, Symbol)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heads: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub head_moves: BTreeMap<String, Vec<u8>>,
    pub transitions: Vec<TransitionEntry>,
}

/// A loaded machine plus non-fatal findings.
#[derive(Clone, Debug, PartialEq)]
pub struct Loaded {
    pub machine: Machine,
    pub warnings: Vec<String>,
}

fn field_err(field: impl Into<String>, e: impl std::fmt::Display) -> Error {
    Error::Format {
        field: field.into(),
        msg: e.to_string(),
    }
}

fn amplitude(field: &str, text: &str) -> Result<Amplitude> {
    Amplitude::parse(text).map_err(|e| field_err(field, format!("amplitude '{text}': {e}")))
}

fn unit(field: &str, to: &[(String, String)]) -> Result<String> {
    match to {
        [(t, a)] if (amplitude(field, a)?.value() - Complex64::new(1.0, 0.0)).norm() < 1e-12 => {
            Ok(t.clone())
        }
        _ => Err(field_err(
            field,
            "a classical transition needs exactly one target with amplitude 1",
        )),
    }
}

fn check_reserved(f: &AutomatonFile) -> Result<()> {
    let lists: [(&str, &[String]); 5] = [
        ("states", &f.states),
        ("accept", &f.accept),
        ("reject", &f.reject),
        ("input_alphabet", &f.input_alphabet),
        ("tape2_alphabet", f.tape2_alphabet.as_deref().unwrap_or(&[])),
    ];
    for (name, items) in lists {
        if let Some(bad) = items.iter().find(|s| is_endmarker(s)) {
            return Err(field_err(name, format!("reserved symbol '{bad}'")));
        }
    }
    for (a, b) in &f.rho {
        if is_endmarker(a) || is_endmarker(b) {
            return Err(field_err("rho", format!("reserved symbol in ({a}, {b})")));
        }
    }
    Ok(())
}

fn start_state(f: &AutomatonFile) -> Result<&str> {
    match &f.start {
        StartField::State(s) => Ok(s),
        StartField::Superposition(_) => {
            Err(field_err("start", "this model needs a single start state"))
        }
    }
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

impl AutomatonFile {
    pub fn into_machine(self) -> Result<Machine> {
        check_reserved(&self)?;
        match self.model.as_str() {
            "dfa" => self.build_dfa(),
            "mhdfa" => self.build_mhdfa(),
            "mm1qfa" => self.build_mm(),
            "1qfa2" => self.build_twotape(Mode::TwoHead),
            "2t1qfa" => self.build_twotape(Mode::TwoTape),
            other => Err(field_err("model", format!("unknown model '{other}'"))),
        }
    }

    fn build_dfa(&self) -> Result<Machine> {
        let mut rows = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let field = format!("transitions[{i}]");
            let [sym] = t.read.as_slice() else {
                return Err(field_err(field, "a DFA transition reads one symbol"));
            };
            rows.push((t.from.clone(), sym.clone(), unit(&field, &t.to)?));
        }
        Dfa::from_parts(
            self.states.clone(),
            self.input_alphabet.clone(),
            start_state(self)?,
            &self.accept,
            &rows,
        )
        .map(Machine::Dfa)
    }

    fn build_mhdfa(&self) -> Result<Machine> {
        let k = self
            .heads
            .ok_or_else(|| field_err("heads", "missing head count"))?;
        let mut m = MultiHeadDfa::from_parts(
            self.states.clone(),
            self.input_alphabet.clone(),
            k,
            start_state(self)?,
            &self.accept,
        )?;
        for (i, t) in self.transitions.iter().enumerate() {
            let field = format!("transitions[{i}]");
            let to = unit(&field, &t.to)?;
            let mv = t
                .moves
                .as_ref()
                .ok_or_else(|| field_err(&field, "missing move"))?;
            m.add(&t.from, &strs(&t.read), &to, mv)
                .map_err(|e| field_err(&field, e))?;
        }
        Ok(Machine::MultiHead(m))
    }

    fn build_mm(&self) -> Result<Machine> {
        let mut m = MeasureManyQfa::new(
            &strs(&self.states),
            &strs(&self.input_alphabet),
            start_state(self)?,
            &strs(&self.accept),
            &strs(&self.reject),
        )?;
        for (i, t) in self.transitions.iter().enumerate() {
            let field = format!("transitions[{i}]");
            let [sym] = t.read.as_slice() else {
                return Err(field_err(
                    field,
                    "a measure-many transition reads one symbol",
                ));
            };
            for (to, a) in &t.to {
                m.add_transition(&t.from, sym, to, amplitude(&field, a)?)?;
            }
        }
        Ok(Machine::MeasureMany(m))
    }

    fn build_twotape(&self, mode: Mode) -> Result<Machine> {
        let tape2 = match (&self.tape2_alphabet, mode) {
            (Some(t), _) => t.clone(),
            (None, Mode::TwoHead) => self.input_alphabet.clone(),
            (None, Mode::TwoTape) => return Err(field_err("tape2_alphabet", "missing")),
        };
        let mut table =
            OperatorTable::from_parts(self.states.clone(), &self.input_alphabet, &tape2)?;
        for (q, mv) in &self.head_moves {
            let [d1, d2] = mv.as_slice() else {
                return Err(field_err(format!("head_moves.{q}"), "expected two moves"));
            };
            table.set_move(q, HeadMove::new(*d1, *d2)?)?;
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let field = format!("transitions[{i}]");
            let [s1, s2] = t.read.as_slice() else {
                return Err(field_err(
                    field,
                    "a two-head transition reads a symbol pair",
                ));
            };
            if t.moves.is_some() {
                return Err(field_err(
                    field,
                    "moves belong in head_moves for quantum models",
                ));
            }
            for (to, a) in &t.to {
                table.add_transition(&t.from, (s1, s2), to, amplitude(&field, a)?)?;
            }
        }
        let start = match &self.start {
            StartField::State(s) => Superposition::basis(table.state(s)?),
            StartField::Superposition(items) => {
                let mut psi = Superposition::new();
                for (s, a) in items {
                    let z = parse_amplitude(a).map_err(|source| Error::Amplitude {
                        text: a.clone(),
                        source,
                    })?;
                    psi.add(table.state(s)?, z);
                }
                psi
            }
        };
        let rho = match mode {
            Mode::TwoHead => SymbolRelation::identity(&self.input_alphabet),
            Mode::TwoTape => SymbolRelation::new(&self.rho).map_err(|e| field_err("rho", e))?,
        };
        if mode == Mode::TwoTape && self.rho.is_empty() {
            return Err(field_err("rho", "a two-tape machine needs a relation"));
        }
        TwoTapeQfa::with_start(
            table,
            start,
            &strs(&self.accept),
            &strs(&self.reject),
            rho,
            mode,
        )
        .map(Machine::TwoTape)
    }

    pub fn from_machine(m: &Machine) -> Self {
        match m {
            Machine::Dfa(d) => Self {
                model: "dfa".into(),
                states: d.states().to_vec(),
                start: StartField::State(d.states()[d.start()].clone()),
                accept: d
                    .accepting()
                    .iter()
                    .map(|q| d.states()[*q].clone())
                    .collect(),
                reject: vec![],
                input_alphabet: d.alphabet().to_vec(),
                tape2_alphabet: None,
                rho: vec![],
                heads: None,
                head_moves: BTreeMap::new(),
                transitions: d
                    .transitions()
                    .map(|(q, a, r)| TransitionEntry {
                        from: d.states()[q].clone(),
                        read: vec![a.to_string()],
                        to: vec![(d.states()[r].clone(), "1".into())],
                        moves: None,
                    })
                    .collect(),
            },
            Machine::MultiHead(m) => Self {
                model: "mhdfa".into(),
                states: m.states().to_vec(),
                start: StartField::State(m.states()[m.start()].clone()),
                accept: m
                    .accepting()
                    .iter()
                    .map(|q| m.states()[*q].clone())
                    .collect(),
                reject: vec![],
                input_alphabet: m.alphabet().to_vec(),
                tape2_alphabet: None,
                rho: vec![],
                heads: Some(m.heads()),
                head_moves: BTreeMap::new(),
                transitions: m
                    .transitions()
                    .map(|(q, read, t)| TransitionEntry {
                        from: m.states()[q].clone(),
                        read: read.to_vec(),
                        to: vec![(m.states()[t.target].clone(), "1".into())],
                        moves: Some(t.moves.clone()),
                    })
                    .collect(),
            },
            Machine::MeasureMany(m) => {
                let mut transitions = Vec::new();
                for (sym, op) in m.operators() {
                    for (q, row) in op.rows() {
                        transitions.push(TransitionEntry {
                            from: m.states()[q].clone(),
                            read: vec![sym.to_string()],
                            to: row
                                .iter()
                                .map(|(t, a)| (m.states()[*t].clone(), a.text().to_string()))
                                .collect(),
                            moves: None,
                        });
                    }
                }
                Self {
                    model: "mm1qfa".into(),
                    states: m.states().to_vec(),
                    start: StartField::State(m.states()[m.start()].clone()),
                    accept: m
                        .accepting()
                        .iter()
                        .map(|q| m.states()[*q].clone())
                        .collect(),
                    reject: m
                        .rejecting()
                        .iter()
                        .map(|q| m.states()[*q].clone())
                        .collect(),
                    input_alphabet: m.alphabet().to_vec(),
                    tape2_alphabet: None,
                    rho: vec![],
                    heads: None,
                    head_moves: BTreeMap::new(),
                    transitions,
                }
            }
            Machine::TwoTape(m) => {
                let t = m.table();
                let name = |q: usize| t.state_name(q).to_string();
                let plain = |a: &[Symbol]| {
                    a.iter()
                        .filter(|s| !is_endmarker(s))
                        .cloned()
                        .collect::<Vec<_>>()
                };
                let start = match m.start().iter().collect::<Vec<_>>().as_slice() {
                    [(q, a)] if (**a - Complex64::new(1.0, 0.0)).norm() == 0.0 => {
                        StartField::State(name(**q))
                    }
                    items => StartField::Superposition(
                        items
                            .iter()
                            .map(|(q, a)| (name(**q), render_complex(**a)))
                            .collect(),
                    ),
                };
                let mut transitions = Vec::new();
                for (pair, op) in t.pairs() {
                    let (s1, s2) = t.pair_names(pair);
                    for (q, row) in op.rows() {
                        transitions.push(TransitionEntry {
                            from: name(q),
                            read: vec![s1.to_string(), s2.to_string()],
                            to: row
                                .iter()
                                .map(|(r, a)| (name(*r), a.text().to_string()))
                                .collect(),
                            moves: None,
                        });
                    }
                }
                let head_moves = t
                    .moves()
                    .iter()
                    .enumerate()
                    .filter(|(_, mv)| **mv != HeadMove::STAY)
                    .map(|(q, mv)| (name(q), vec![mv.0, mv.1]))
                    .collect();
                let two_tape = m.mode() == Mode::TwoTape;
                Self {
                    model: m.mode_name().into(),
                    states: t.states().to_vec(),
                    start,
                    accept: m.accepting().iter().map(|q| name(*q)).collect(),
                    reject: m.rejecting().iter().map(|q| name(*q)).collect(),
                    input_alphabet: plain(t.tape1_alphabet()),
                    tape2_alphabet: two_tape.then(|| plain(t.tape2_alphabet())),
                    rho: if two_tape { m.rho().pairs() } else { vec![] },
                    heads: None,
                    head_moves,
                    transitions,
                }
            }
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    }
}

/// Validation findings that do not stop loading.
pub fn warnings(m: &Machine) -> Vec<String> {
    let report = match m {
        Machine::TwoTape(q) => validate_automaton(q),
        Machine::MeasureMany(q) => validate_automaton(q),
        _ => return vec![],
    };
    let mut out: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    out.extend(report.warnings);
    out
}

pub fn parse_automaton(text: &str) -> Result<Loaded> {
    let file: AutomatonFile = serde_json::from_str(text).map_err(json_error)?;
    let machine = file.into_machine()?;
    Ok(Loaded {
        warnings: warnings(&machine),
        machine,
    })
}

pub fn load_automaton(path: &Path) -> Result<Loaded> {
    parse_automaton(&std::fs::read_to_string(path)?)
}

pub fn to_json(m: &Machine) -> String {
    let mut s =
        serde_json::to_string_pretty(&AutomatonFile::from_machine(m)).expect("serializable");
    s.push('\n');
    s
}

pub fn save_automaton(m: &Machine, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(m))?;
    Ok(())
}

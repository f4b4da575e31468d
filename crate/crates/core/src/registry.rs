//! Built-in machines: the worked examples, each with a short description and
//! a list of every place it deviates from the published tables.

use crate::amplitude::Amplitude;
use crate::classical::{Dfa, MultiHeadDfa};
use crate::error::{Error, Result};
use crate::operator::{HeadMove, OperatorTable};
use crate::quantum::{MeasureManyQfa, Mode, TwoTapeQfa};
use crate::relation::SymbolRelation;

/// Any machine the tool can load, run or export.
#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Machine {
    Dfa(Dfa),
    MultiHead(MultiHeadDfa),
    MeasureMany(MeasureManyQfa),
    TwoTape(TwoTapeQfa),
}

impl Machine {
    pub fn model(&self) -> &'static str {
        match self {
            Machine::Dfa(_) => "dfa",
            Machine::MultiHead(_) => "mhdfa",
            Machine::MeasureMany(_) => "mm1qfa",
            Machine::TwoTape(m) => match m.mode() {
                Mode::TwoHead => "1qfa2",
                Mode::TwoTape => "2t1qfa",
            },
        }
    }

    /// Input alphabet without endmarkers.
    pub fn input_alphabet(&self) -> Vec<String> {
        match self {
            Machine::Dfa(d) => d.alphabet().to_vec(),
            Machine::MultiHead(m) => m.alphabet().to_vec(),
            Machine::MeasureMany(m) => m.alphabet().to_vec(),
            Machine::TwoTape(m) => m.input_alphabet(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegistryEntry {
    pub name: &'static str,
    pub machine: Machine,
    pub description: &'static str,
    /// Deviations from the published transition tables; empty when the table
    /// was used as printed.
    pub repairs: Vec<&'static str>,
    pub notes: Vec<&'static str>,
}

pub const NAMES: [&str; 9] = [
    "anbn-dfa2",
    "anbncn-rev2",
    "anbncn-2t1qfa",
    "percent",
    "ww",
    "even-a",
    "ends-b",
    "a-mod3",
    "mm-rotation",
];

pub fn build_example(name: &str) -> Result<RegistryEntry> {
    match name {
        "anbn-dfa2" => Ok(anbn_dfa2()),
        "anbncn-rev2" => Ok(anbncn_rev2()),
        "anbncn-2t1qfa" => Ok(anbncn_2t1qfa()),
        "percent" => Ok(percent()),
        "ww" => Ok(ww()),
        "even-a" => Ok(dfa_entry(
            "even-a",
            even_a(),
            "DFA: even number of a's over {a}",
        )),
        "ends-b" => Ok(dfa_entry(
            "ends-b",
            ends_b(),
            "DFA: words over {a,b} ending in b",
        )),
        "a-mod3" => Ok(dfa_entry(
            "a-mod3",
            a_mod3(),
            "DFA: number of a's divisible by 3 over {a,b}",
        )),
        "mm-rotation" => Ok(mm_rotation()),
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}

pub fn all_examples() -> Vec<RegistryEntry> {
    NAMES
        .iter()
        .map(|n| build_example(n).expect("registered"))
        .collect()
}

fn dfa_entry(name: &'static str, d: Dfa, description: &'static str) -> RegistryEntry {
    RegistryEntry {
        name,
        machine: Machine::Dfa(d),
        description,
        repairs: vec![],
        notes: vec![],
    }
}

pub fn even_a() -> Dfa {
    Dfa::new(
        &["e", "o"],
        &["a"],
        "e",
        &["e"],
        &[("e", "a", "o"), ("o", "a", "e")],
    )
    .expect("valid DFA")
}

pub fn ends_b() -> Dfa {
    Dfa::new(
        &["n", "y"],
        &["a", "b"],
        "n",
        &["y"],
        &[
            ("n", "a", "n"),
            ("n", "b", "y"),
            ("y", "a", "n"),
            ("y", "b", "y"),
        ],
    )
    .expect("valid DFA")
}

pub fn a_mod3() -> Dfa {
    Dfa::new(
        &["r0", "r1", "r2"],
        &["a", "b"],
        "r0",
        &["r0"],
        &[
            ("r0", "a", "r1"),
            ("r1", "a", "r2"),
            ("r2", "a", "r0"),
            ("r0", "b", "r0"),
            ("r1", "b", "r1"),
            ("r2", "b", "r2"),
        ],
    )
    .expect("valid DFA")
}

/// Two-head DFA for a^n b^n (n >= 1). Head 1 runs over the a's while head 2
/// waits on the first a; then head 1 reads b's against head 2's a's, and
/// finally head 2 reads the b's while head 1 sits on `$`.
pub fn anbn_dfa2_machine() -> MultiHeadDfa {
    let mut m =
        MultiHeadDfa::new(&["q0", "q1", "q2"], &["a", "b"], 2, "q0", &["q2"]).expect("valid");
    let rows: [(&str, [&str; 2], &str, [u8; 2]); 10] = [
        ("q0", ["#", "#"], "q0", [1, 1]),
        ("q0", ["a", "a"], "q0", [1, 0]),
        ("q0", ["b", "a"], "q1", [0, 1]),
        ("q1", ["b", "a"], "q1", [1, 1]),
        ("q1", ["b", "b"], "q2", [1, 0]),
        ("q2", ["$", "b"], "q2", [0, 1]),
        ("q2", ["b", "b"], "q2", [0, 0]),
        ("q2", ["a", "b"], "q1", [0, 0]),
        ("q2", ["a", "$"], "q1", [0, 0]),
        ("q2", ["b", "$"], "q1", [0, 0]),
    ];
    for (q, r, t, mv) in rows {
        m.add(q, &r, t, &mv).expect("valid transition");
    }
    m
}

fn anbn_dfa2() -> RegistryEntry {
    RegistryEntry {
        name: "anbn-dfa2",
        machine: Machine::MultiHead(anbn_dfa2_machine()),
        description: "One-way two-head DFA for a^n b^n, n >= 1 (not reversible)",
        repairs: vec![
            "the published table omits head moves and the endmarker rows; this machine is a reconstruction whose (a,a), (b,a) and (b,b) matrices equal the published ones",
            "non-members with more b's than a's end in a stationary (b,b) loop on q2 and are reported as livelock, never as accepted",
        ],
        notes: vec!["column q1 of the (b,a) matrix has entries from q0 and q1, so the machine is not reversible"],
    }
}

const ANBNCN_ROWS: [(&str, [&str; 2], &str, [u8; 2]); 9] = [
    ("q0", ["#", "#"], "q0", [0, 1]),
    ("q0", ["#", "a"], "q0", [0, 1]),
    ("q0", ["#", "b"], "q1", [1, 1]),
    ("q1", ["a", "b"], "q1", [1, 1]),
    ("q1", ["a", "c"], "q2", [1, 1]),
    ("q2", ["b", "c"], "q2", [1, 1]),
    ("q2", ["b", "$"], "q3", [1, 0]),
    ("q3", ["c", "$"], "q3", [1, 0]),
    ("q3", ["$", "$"], "qf", [0, 0]),
];

/// Reversible two-head DFA for a^n b^n c^n.
pub fn anbncn_rev2_machine() -> MultiHeadDfa {
    let mut m = MultiHeadDfa::new(
        &["q0", "q1", "q2", "q3", "qf"],
        &["a", "b", "c"],
        2,
        "q0",
        &["qf"],
    )
    .expect("valid");
    for (q, r, t, mv) in ANBNCN_ROWS {
        m.add(q, &r, t, &mv).expect("valid transition");
    }
    m
}

fn anbncn_rev2() -> RegistryEntry {
    RegistryEntry {
        name: "anbncn-rev2",
        machine: Machine::MultiHead(anbncn_rev2_machine()),
        description: "One-way reversible two-head DFA for a^n b^n c^n, n >= 1",
        repairs: vec![],
        notes: vec!["the published (b,c) matrix shows row q2 in column q0; the transition list (and this machine) has q2 -> q2"],
    }
}

/// The same transitions as a two-tape QFA with identity relation.
pub fn anbncn_2t1qfa_machine() -> TwoTapeQfa {
    let states = ["q0", "q1", "q2", "q3", "q_acc"];
    let mut t = OperatorTable::new(&states, &["a", "b", "c"], &["a", "b", "c"]).expect("valid");
    for (q, r, to, mv) in ANBNCN_ROWS {
        let to = if to == "qf" { "q_acc" } else { to };
        t.add_unit(q, (r[0], r[1]), to).expect("valid");
        t.set_move(to, HeadMove::new(mv[0], mv[1]).expect("0/1"))
            .expect("valid");
    }
    TwoTapeQfa::new(
        t,
        "q0",
        &["q_acc"],
        &[],
        SymbolRelation::identity(&["a", "b", "c"]),
        Mode::TwoTape,
    )
    .expect("valid")
}

fn anbncn_2t1qfa() -> RegistryEntry {
    RegistryEntry {
        name: "anbncn-2t1qfa",
        machine: Machine::TwoTape(anbncn_2t1qfa_machine()),
        description: "Two-tape QFA with identity relation for a^n b^n c^n, n >= 1",
        repairs: vec![],
        notes: vec![
            "no rejecting states are declared; rejection happens through undefined rows (sink)",
            "the published matrices have five column labels but four entries per row; the (b,$), (c,$) and ($,$) rows disagree with the transition list, which this machine follows",
        ],
    }
}

fn amp(text: &str) -> Amplitude {
    Amplitude::parse(text).expect("literal amplitude")
}

pub fn percent_machine() -> TwoTapeQfa {
    let states = ["q0", "q1", "q2", "q3", "q4", "q5"];
    let input = ["a", "b", "*", "%"];
    let tape2 = ["a", "b", "*", "%", "v_p1", "v_p2"];
    let mut t = OperatorTable::new(&states, &input, &tape2).expect("valid");
    let moves = [(1, 1), (0, 1), (1, 1), (1, 1), (0, 0), (0, 0)];
    for (q, (d1, d2)) in states.iter().zip(moves) {
        t.set_move(q, HeadMove::new(d1, d2).expect("0/1"))
            .expect("valid");
    }
    let rows: &[(&str, (&str, &str), &str)] = &[
        ("q0", ("#", "#"), "q0"),
        ("q0", ("%", "%"), "q0"),
        ("q0", ("a", "a"), "q0"),
        ("q0", ("b", "b"), "q0"),
        ("q0", ("*", "*"), "q0"),
        ("q0", ("%", "v_p1"), "q1"),
        ("q1", ("%", "a"), "q1"),
        ("q1", ("%", "b"), "q1"),
        ("q1", ("%", "*"), "q1"),
        ("q1", ("%", "%"), "q1"),
        ("q1", ("%", "v_p2"), "q2"),
        ("q2", ("a", "a"), "q2"),
        ("q2", ("b", "b"), "q2"),
        ("q2", ("*", "*"), "q3"),
        ("q3", ("a", "a"), "q3"),
        ("q3", ("b", "b"), "q3"),
        ("q3", ("%", "%"), "q4"),
        ("q3", ("%", "$"), "q4"),
        ("q3", ("a", "b"), "q5"),
        ("q3", ("a", "*"), "q5"),
        ("q3", ("a", "%"), "q5"),
        ("q3", ("a", "$"), "q5"),
        ("q3", ("b", "a"), "q5"),
        ("q3", ("b", "*"), "q5"),
        ("q3", ("b", "%"), "q5"),
        ("q3", ("b", "$"), "q5"),
        ("q3", ("*", "a"), "q5"),
        ("q3", ("*", "b"), "q5"),
        ("q3", ("*", "%"), "q5"),
        ("q3", ("*", "$"), "q5"),
        ("q3", ("%", "a"), "q5"),
        ("q3", ("%", "b"), "q5"),
        ("q3", ("%", "*"), "q5"),
    ];
    for (q, pair, r) in rows {
        t.add_unit(q, *pair, r).expect("valid");
    }
    let rho = SymbolRelation::new(&[
        ("a", "a"),
        ("%", "%"),
        ("%", "v_p1"),
        ("%", "v_p2"),
        ("b", "b"),
        ("*", "*"),
    ])
    .expect("valid");
    TwoTapeQfa::new(t, "q0", &["q5"], &["q4"], rho, Mode::TwoTape).expect("valid")
}

fn percent() -> RegistryEntry {
    RegistryEntry {
        name: "percent",
        machine: Machine::TwoTape(percent_machine()),
        description: "Two-tape QFA for %w1*x1%...%wn*xn with some w_i = w_j and x_i != x_j",
        repairs: vec![
            "q2 on (*,*) goes to q3 instead of staying in q2; otherwise q3 is unreachable",
            "q3 on (a,a) and (b,b) stays in q3 so equal x symbols are skipped; the printed (a,a) -> q5 is dropped",
            "the printed q3 self-loops on (%,a), (%,b), (%,*) and (%,%) are dropped; they collide with the q3 -> q5 and q3 -> q4 rows on the same pairs",
            "q3 on (a,b) goes to q5 (missing from the printed list, symmetric to (b,a))",
        ],
        notes: vec![
            "guesses mark the first compared block with v_p1 and the second with v_p2",
            "words must start with %; each block holds exactly one *",
        ],
    }
}

pub fn ww_machine() -> TwoTapeQfa {
    let states = [
        "q0", "q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q_rej", "q_rej1", "q_rej2", "s1",
        "s2",
    ];
    let mut t = OperatorTable::new(&states, &["a", "b"], &["a", "b", "m"]).expect("valid");
    let moves: [(&str, u8, u8); 7] = [
        ("q0", 0, 1),
        ("q3", 1, 1),
        ("q4", 1, 0),
        ("q6", 1, 1),
        ("q7", 1, 0),
        ("q1", 0, 0),
        ("q2", 0, 0),
    ];
    for (q, d1, d2) in moves {
        t.set_move(q, HeadMove::new(d1, d2).expect("0/1"))
            .expect("valid");
    }
    let h = amp("1/sqrt(2)");
    for y in ["#", "a", "b"] {
        t.add_unit("q0", ("#", y), "q0").expect("valid");
    }
    t.add_transition("q0", ("#", "m"), "q1", h.clone())
        .expect("valid");
    t.add_transition("q0", ("#", "m"), "q2", h.clone())
        .expect("valid");
    t.add_unit("q1", ("#", "m"), "q3").expect("valid");
    t.add_unit("q2", ("#", "m"), "q6").expect("valid");
    for x in ["a", "b"] {
        for y in ["a", "b"] {
            let same = if x == y { "q3" } else { "q_rej" };
            t.add_unit("q3", (x, y), same).expect("valid");
            t.add_unit("q6", (x, y), "q7").expect("valid");
            t.add_unit("q7", (x, y), "q6").expect("valid");
        }
        t.add_unit("q3", (x, "$"), "q3").expect("valid");
        t.add_unit("q6", (x, "$"), "q_rej2").expect("valid");
        t.add_unit("q7", (x, "$"), "q_rej1").expect("valid");
        t.add_unit("q6", ("$", x), "q_rej2").expect("valid");
        t.add_unit("q7", ("$", x), "q_rej1").expect("valid");
    }
    t.add_unit("q3", ("$", "$"), "q5").expect("valid");
    t.add_unit("q6", ("$", "$"), "q8").expect("valid");
    // two-point Fourier transform: arrival j in {1,2} -> sum_l e^{2 pi i j l / 2} s_l / sqrt 2
    for (q, j) in [("q5", 1), ("q8", 2)] {
        for (l, s) in [(1, "s1"), (2, "s2")] {
            t.add_transition(
                q,
                ("$", "$"),
                s,
                amp(&format!("exp(2*pi*i*{j}*{l}/2)/sqrt(2)")),
            )
            .expect("valid");
        }
    }
    let rho =
        SymbolRelation::new(&[("a", "a"), ("a", "m"), ("b", "b"), ("b", "m")]).expect("valid");
    TwoTapeQfa::new(
        t,
        "q0",
        &["s2"],
        &["s1", "q_rej", "q_rej1", "q_rej2"],
        rho,
        Mode::TwoTape,
    )
    .expect("valid")
}

fn ww() -> RegistryEntry {
    RegistryEntry {
        name: "ww",
        machine: Machine::TwoTape(ww_machine()),
        description: "Two-tape QFA for ww, w in {a,b}+: guess the middle, check both halves and the middle in superposition, recombine with a two-point Fourier transform",
        repairs: vec![
            "the printed q3 -> q4 and q4 -> q4 rows on (x,$) collide; q3 now stays in q3 on (x,$) (head 2 rests on $) and moves to q5 on ($,$); q4 is kept but unused",
            "q6 (not q7) moves to q8 on ($,$); with D(q6) = (1,1) and D(q7) = (1,0) the middle branch is in q6 when both heads reach $",
            "the garbled transform exponents are read as e^{2 pi i j l / 2} with arrival index j = 1 for q5 and j = 2 for q8; the printed targets |s1> are read as s_l",
        ],
        notes: vec![
            "both branches reach ($,$) on the same step exactly when m sits on the last symbol of the first half",
            "the empty word is rejected: a guess tape of length 0 cannot carry m",
        ],
    }
}

fn mm_rotation() -> RegistryEntry {
    let mut m = MeasureManyQfa::new(&["q0", "q1", "qa", "qr"], &["a"], "q0", &["qa"], &["qr"])
        .expect("valid");
    let c = amp("1/sqrt(2)");
    let mc = amp("-1/sqrt(2)");
    for q in ["q0", "q1"] {
        m.add_transition(q, "#", q, amp("1")).expect("valid");
    }
    m.add_transition("q0", "a", "q0", c.clone()).expect("valid");
    m.add_transition("q0", "a", "q1", c.clone()).expect("valid");
    m.add_transition("q1", "a", "q0", mc).expect("valid");
    m.add_transition("q1", "a", "q1", c).expect("valid");
    m.add_transition("q0", "$", "qa", amp("1")).expect("valid");
    m.add_transition("q1", "$", "qr", amp("1")).expect("valid");
    RegistryEntry {
        name: "mm-rotation",
        machine: Machine::MeasureMany(m),
        description: "Measure-many 1QFA rotating by 45 degrees per a; accepts a^n with probability cos^2(n pi / 4)",
        repairs: vec![],
        notes: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::check_reversible;
    use crate::quantum::validate_automaton;

    #[test]
    fn every_entry_builds_and_validates() {
        for e in all_examples() {
            match &e.machine {
                Machine::TwoTape(m) => assert!(validate_automaton(m).passed(), "{}", e.name),
                Machine::MeasureMany(m) => assert!(validate_automaton(m).passed(), "{}", e.name),
                Machine::MultiHead(m) => {
                    let rev = check_reversible(m).reversible();
                    assert_eq!(rev, e.name != "anbn-dfa2", "{}", e.name);
                }
                Machine::Dfa(_) => {}
            }
        }
        assert!(matches!(
            build_example("nope"),
            Err(Error::UnknownExample(_))
        ));
    }

    #[test]
    fn state_counts() {
        assert_eq!(ww_machine().table().num_states(), 14);
        let m = anbncn_2t1qfa_machine();
        assert_eq!(m.table().states(), &["q0", "q1", "q2", "q3", "q_acc"]);
        assert!(m.rejecting().is_empty());
        assert!(m.rho().is_identity());
    }
}

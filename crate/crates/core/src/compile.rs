//! The DFA to two-tape QFA compiler and the lift of reversible two-head
//! automata to two-head quantum automata.

use std::collections::{BTreeMap, BTreeSet};

use crate::classical::{check_reversible, Dfa, MultiHeadDfa};
use crate::error::{Error, Result};
use crate::operator::{HeadMove, OperatorTable, Symbol, LEFT_END, RIGHT_END};
use crate::quantum::{Mode, TwoTapeQfa};
use crate::relation::SymbolRelation;

/// Per input symbol, the DFA transitions on it in source-state order together
/// with the fresh tape-2 symbol naming each one.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionNumbering {
    /// symbol -> [(fresh symbol, source, target)]
    pub entries: BTreeMap<Symbol, Vec<(Symbol, usize, usize)>>,
}

impl TransitionNumbering {
    pub fn new(d: &Dfa) -> Self {
        let taken: BTreeSet<&str> = d.alphabet().iter().map(String::as_str).collect();
        let mut used: BTreeSet<String> = BTreeSet::new();
        let mut entries = BTreeMap::new();
        for p in d.alphabet() {
            let mut list = Vec::new();
            let on_p = d
                .transitions()
                .filter(|(_, s, _)| *s == p)
                .collect::<Vec<_>>();
            for (i, (q, _, r)) in on_p.into_iter().enumerate() {
                let mut name = format!("{p}_{}", i + 1);
                while taken.contains(name.as_str()) || used.contains(&name) {
                    name.push('\'');
                }
                used.insert(name.clone());
                list.push((name, q, r));
            }
            entries.insert(p.clone(), list);
        }
        Self { entries }
    }

    /// Fresh symbols in numbering order.
    pub fn symbols(&self, d: &Dfa) -> Vec<Symbol> {
        d.alphabet()
            .iter()
            .flat_map(|p| self.entries[p].iter().map(|(n, _, _)| n.clone()))
            .collect()
    }
}

fn fresh(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Compiles a DFA into a two-tape QFA whose guess tape spells the transition
/// sequence. A run on the right guess is a permutation walk that ends in an
/// accepting state exactly when the DFA accepts; every other guess hits an
/// undefined row.
///
/// Each final state gets its own accepting target so that the `($,$)`
/// operator stays injective.
pub fn compile_dfa(d: &Dfa) -> TwoTapeQfa {
    let numbering = TransitionNumbering::new(d);
    let mut taken: BTreeSet<String> = d.states().iter().cloned().collect();
    let start_name = fresh(&format!("{}'", d.states()[d.start()]), &taken);
    taken.insert(start_name.clone());
    let finals: Vec<usize> = d.accepting().iter().copied().collect();
    let acc_names: Vec<String> = if finals.len() <= 1 {
        vec![fresh("q_acc", &taken)]
    } else {
        finals
            .iter()
            .map(|f| fresh(&format!("q_acc_{}", d.states()[*f]), &taken))
            .collect()
    };
    let mut states: Vec<String> = d.states().to_vec();
    states.push(start_name.clone());
    states.extend(acc_names.iter().cloned());

    let fresh_syms = numbering.symbols(d);
    let mut tape2: Vec<Symbol> = d.alphabet().to_vec();
    tape2.extend(fresh_syms.iter().cloned());
    let mut table = OperatorTable::from_parts(states, d.alphabet(), &tape2)
        .expect("compiled state names are distinct");

    for q in d.states() {
        table.set_move(q, HeadMove::BOTH).expect("known state");
    }
    table
        .set_move(&start_name, HeadMove::BOTH)
        .expect("known state");
    for a in &acc_names {
        table.set_move(a, HeadMove::STAY).expect("known state");
    }
    table
        .add_unit(&start_name, (LEFT_END, LEFT_END), &d.states()[d.start()])
        .expect("endmarker pair");
    let mut rho_pairs = Vec::new();
    for (p, list) in &numbering.entries {
        for (pi, q, r) in list {
            table
                .add_unit(&d.states()[*q], (p, pi), &d.states()[*r])
                .expect("numbered transition");
            rho_pairs.push((p.clone(), pi.clone()));
        }
    }
    for (k, f) in finals.iter().enumerate() {
        table
            .add_unit(&d.states()[*f], (RIGHT_END, RIGHT_END), &acc_names[k])
            .expect("endmarker pair");
    }
    let rho = SymbolRelation::with_codomain_order(&rho_pairs, table.tape2_alphabet())
        .expect("relation over the compiled alphabets");
    let accepting: Vec<&str> = acc_names.iter().map(String::as_str).collect();
    TwoTapeQfa::new(table, &start_name, &accepting, &[], rho, Mode::TwoTape)
        .expect("compiled machine is consistent")
}

/// Turns a reversible two-head automaton into a two-head QFA with the same
/// 0/1 matrices. The move of a state is the move of every transition into it.
///
/// Accepting states must have no outgoing transitions, since the quantum
/// machine measures them as soon as they are entered.
pub fn lift_rmfa(m: &MultiHeadDfa) -> Result<TwoTapeQfa> {
    if m.heads() != 2 {
        return Err(Error::Invalid(format!(
            "expected two heads, found {}",
            m.heads()
        )));
    }
    let report = check_reversible(m);
    if !report.reversible() {
        let mut why = Vec::new();
        for c in &report.move_conflicts {
            why.push(format!("moves into {} disagree: {:?}", c.target, c.moves));
        }
        for c in &report.column_conflicts {
            why.push(format!(
                "column {} of ({}) has entries from {}",
                c.target,
                c.symbols.join(","),
                c.sources.join(", ")
            ));
        }
        return Err(Error::NotReversible(why.join("; ")));
    }
    for (q, _, _) in m.transitions() {
        if m.accepting().contains(&q) {
            return Err(Error::Invalid(format!(
                "accepting state {} has outgoing transitions",
                m.states()[q]
            )));
        }
    }
    let mut table = OperatorTable::from_parts(m.states().to_vec(), m.alphabet(), m.alphabet())?;
    for (q, read, t) in m.transitions() {
        let (from, to) = (&m.states()[q], &m.states()[t.target]);
        table.add_unit(from, (&read[0], &read[1]), to)?;
        table.set_move(to, HeadMove::new(t.moves[0], t.moves[1])?)?;
    }
    let accepting: Vec<&str> = m
        .accepting()
        .iter()
        .map(|q| m.states()[*q].as_str())
        .collect();
    let plain: Vec<&str> = m.alphabet().iter().map(String::as_str).collect();
    TwoTapeQfa::new(
        table,
        &m.states()[m.start()],
        &accepting,
        &[],
        SymbolRelation::identity(&plain),
        Mode::TwoHead,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{run_twotape, validate_automaton};

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
    fn numbering_and_alphabet() {
        let m = compile_dfa(&even_a());
        assert_eq!(m.table().tape2_alphabet(), &["#", "a", "a_1", "a_2", "$"]);
        assert_eq!(
            m.rho().pairs(),
            vec![
                ("a".to_string(), "a_1".to_string()),
                ("a".to_string(), "a_2".to_string())
            ]
        );
        assert!(validate_automaton(&m).passed());
    }

    #[test]
    fn right_guess_accepts() {
        let m = compile_dfa(&even_a());
        let r = run_twotape(&m, &["a", "a"], &["a_1", "a_2"], None, false).unwrap();
        assert!((r.p_acc - 1.0).abs() < 1e-12);
        let r = run_twotape(&m, &["a", "a"], &["a_2", "a_1"], None, false).unwrap();
        assert!((r.p_rej - 1.0).abs() < 1e-12);
    }

    #[test]
    fn several_final_states_stay_injective() {
        let d = Dfa::new(
            &["x", "y"],
            &["a"],
            "x",
            &["x", "y"],
            &[("x", "a", "y"), ("y", "a", "x")],
        )
        .unwrap();
        let m = compile_dfa(&d);
        assert!(validate_automaton(&m).passed());
        assert_eq!(m.accepting().len(), 2);
    }

    #[test]
    fn irreversible_lift_fails() {
        let mut m = MultiHeadDfa::new(&["p", "q"], &["a"], 2, "p", &["q"]).unwrap();
        m.add("p", &["a", "a"], "q", &[1, 1]).unwrap();
        m.add("q", &["a", "a"], "q", &[1, 1]).unwrap();
        assert!(matches!(lift_rmfa(&m), Err(Error::NotReversible(_))));
    }
}

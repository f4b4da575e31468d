//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qfa2t::classical::{check_reversible, run_mhdfa, SymbolPairMatrix, Verdict};
use qfa2t::compile::{compile_dfa, lift_rmfa};
use qfa2t::lang::{
    accept_probability, bounded_equivalence, oracle_membership, percent_wellformed,
    words_of_length, AcceptanceSemantics, EquivalenceOptions, OracleId,
};
use qfa2t::quantum::{evolve, run_tapes, run_twotape, Configuration, Tapes, TwoTapeQfa};
use qfa2t::random::{random_table, random_twotape, random_word, TableShape};
use qfa2t::registry::{
    a_mod3, anbn_dfa2_machine, anbncn_2t1qfa_machine, anbncn_rev2_machine, ends_b, even_a,
};
use qfa2t::registry::{percent_machine, ww_machine};
use qfa2t::unitarity::unitarity_residual;
use qfa2t::{rho_expand, unitary_complete, Superposition, Symbol};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type DfaCase = (
    &'static str,
    qfa2t::classical::Dfa,
    &'static [&'static str],
    fn(&[Symbol], usize) -> bool,
);

fn sym(s: &str) -> Vec<Symbol> {
    s.chars().map(|c| c.to_string()).collect()
}

fn words_upto(alphabet: &[&str], max: usize) -> Vec<Vec<Symbol>> {
    let a: Vec<Symbol> = alphabet.iter().map(|s| s.to_string()).collect();
    (0..=max)
        .flat_map(|n| words_of_length(&a, n).collect::<Vec<_>>())
        .collect()
}

fn within(started: Instant, limit: Duration) -> Result<(), String> {
    let took = started.elapsed();
    if took > limit {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

// a^n b^n c^n with n >= 1, checked by counting runs
fn is_anbncn(w: &str) -> bool {
    let n = w.len() / 3;
    n >= 1
        && w.len() == 3 * n
        && w == format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n))
}

fn criterion_1() -> Outcome {
    let t0 = Instant::now();
    let m = anbncn_2t1qfa_machine();
    let sem = AcceptanceSemantics::default();
    for n in 1..=5 {
        let w = format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n));
        let p = accept_probability(&m, &sym(&w), &sem)
            .map_err(|e| e.to_string())?
            .probability;
        if (p - 1.0).abs() > 1e-9 {
            return Err(format!("{w}: probability {p}"));
        }
    }
    let mut checked = 0;
    for w in words_upto(&["a", "b", "c"], 9) {
        let s = w.concat();
        if is_anbncn(&s) {
            continue;
        }
        let p = accept_probability(&m, &w, &sem)
            .map_err(|e| e.to_string())?
            .probability;
        if p.abs() > 1e-9 {
            return Err(format!("non-member {s}: probability {p}"));
        }
        checked += 1;
    }
    within(t0, Duration::from_secs(5))?;
    Ok(format!(
        "5 members at 1, {checked} non-members at 0 in {:.2?}",
        t0.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let t0 = Instant::now();
    let count_a = |w: &[Symbol]| w.iter().filter(|s| *s == "a").count();
    let cases: [DfaCase; 3] = [
        ("even-a", even_a(), &["a"], |_, a| a % 2 == 0),
        ("ends-b", ends_b(), &["a", "b"], |w, _| {
            w.last().is_some_and(|s| s == "b")
        }),
        ("a-mod3", a_mod3(), &["a", "b"], |_, a| a % 3 == 0),
    ];
    let sem = AcceptanceSemantics::default();
    let mut total = 0;
    for (name, dfa, alphabet, member) in cases {
        let q = compile_dfa(&dfa);
        let id: OracleId = format!("dfa:{name}")
            .parse()
            .map_err(|e: qfa2t::Error| e.to_string())?;
        let report = bounded_equivalence(&q, &id, 6, &sem, &EquivalenceOptions::default())
            .map_err(|e| e.to_string())?;
        if !report.disagreements.is_empty() || report.truncated {
            return Err(format!(
                "{name}: {} disagreements",
                report.disagreements.len()
            ));
        }
        for w in words_upto(alphabet, 6) {
            let expected = member(&w, count_a(&w));
            let p = accept_probability(&q, &w, &sem)
                .map_err(|e| e.to_string())?
                .probability;
            let target = if expected { 1.0 } else { 0.0 };
            if (p - target).abs() > 1e-12 {
                return Err(format!(
                    "{name} on {}: probability {p}, expected {target}",
                    w.concat()
                ));
            }
            total += 1;
        }
    }
    within(t0, Duration::from_secs(10))?;
    Ok(format!(
        "3 compiled DFAs agree on {total} words in {:.2?}",
        t0.elapsed()
    ))
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let m = ww_machine();
    let sem = AcceptanceSemantics::default();
    for w in words_upto(&["a", "b"], 3)
        .into_iter()
        .filter(|w| !w.is_empty())
    {
        let ww: Vec<Symbol> = w.iter().chain(&w).cloned().collect();
        let a = accept_probability(&m, &ww, &sem).map_err(|e| e.to_string())?;
        if (a.probability - 1.0).abs() > 1e-9 {
            return Err(format!("{}: probability {}", ww.concat(), a.probability));
        }
        let witness = a.witness.ok_or("no witness")?;
        if witness[w.len() - 1] != "m" {
            return Err(format!(
                "{}: witness {} does not mark position {}",
                ww.concat(),
                witness.concat(),
                w.len()
            ));
        }
    }
    let mut tapes = 0u64;
    for s in words_upto(&["a", "b"], 6) {
        let half = s.len() / 2;
        if s.len() % 2 == 0 && s[..half] == s[half..] {
            continue;
        }
        for guess in rho_expand(m.rho(), &s).map_err(|e| e.to_string())? {
            let r = run_twotape(&m, &s, &guess, None, false).map_err(|e| e.to_string())?;
            tapes += 1;
            if r.p_acc > 0.5 + 1e-9 {
                return Err(format!(
                    "{} with guess {}: p_acc {}",
                    s.concat(),
                    guess.concat(),
                    r.p_acc
                ));
            }
        }
    }
    within(t0, Duration::from_secs(30))?;
    Ok(format!(
        "members at 1 with marked middle; {tapes} non-member runs at most 1/2 in {:.2?}",
        t0.elapsed()
    ))
}

fn criterion_4() -> Outcome {
    let m = ww_machine();
    let t = m.table();
    let op = t
        .operator_by_name(("$", "$"))
        .map_err(|e| e.to_string())?
        .ok_or("no ($,$) operator")?;
    let q5 = t.state("q5").map_err(|e| e.to_string())?;
    let q8 = t.state("q8").map_err(|e| e.to_string())?;
    let acc_mass = |psi: &Superposition<usize>| {
        let (out, _) = op.apply(psi);
        out.iter()
            .filter(|(q, _)| m.accepting().contains(q))
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
    };
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let both: Superposition<usize> = [(q5, h), (q8, h)].into_iter().collect();
    let combined = acc_mass(&both);
    let single5 = acc_mass(&Superposition::basis(q5));
    let single8 = acc_mass(&Superposition::basis(q8));
    if (combined - 1.0).abs() > 1e-12
        || (single5 - 0.5).abs() > 1e-12
        || (single8 - 0.5).abs() > 1e-12
    {
        return Err(format!(
            "combined {combined}, single arrivals {single5} and {single8}"
        ));
    }
    Ok(format!(
        "combined {combined:.12}, single arrivals {single5:.12} and {single8:.12}"
    ))
}

// independent splitter: %w*x blocks read character by character
fn percent_member_bruteforce(s: &str) -> bool {
    if s.is_empty() {
        return false;
    }
    if !s.starts_with('%') {
        return false;
    }
    let mut blocks = Vec::new();
    for part in s[1..].split('%') {
        let stars: Vec<usize> = part.match_indices('*').map(|(i, _)| i).collect();
        if stars.len() != 1 {
            return false;
        }
        blocks.push((&part[..stars[0]], &part[stars[0] + 1..]));
    }
    for i in 0..blocks.len() {
        for j in 0..blocks.len() {
            if i != j && blocks[i].0 == blocks[j].0 && blocks[i].1 != blocks[j].1 {
                return true;
            }
        }
    }
    false
}

fn criterion_5() -> Outcome {
    let t0 = Instant::now();
    let m = percent_machine();
    let sem = AcceptanceSemantics::default();
    let opts = EquivalenceOptions {
        filter: Some(percent_wellformed),
        ..Default::default()
    };
    let report = bounded_equivalence(&m, &OracleId::PercentLang, 10, &sem, &opts)
        .map_err(|e| e.to_string())?;
    if !report.disagreements.is_empty() || report.truncated {
        let d = &report.disagreements[0];
        return Err(format!(
            "{} disagreements, first {}",
            report.disagreements.len(),
            d.word.concat()
        ));
    }
    if report.member_deviation > 1e-9 || report.nonmember_max > 1e-9 {
        return Err(format!(
            "member deviation {}, non-member max {}",
            report.member_deviation, report.nonmember_max
        ));
    }
    // cross-check the library oracle against the brute-force one on the same words
    let mut wellformed = 0u64;
    let mut members = 0u64;
    for w in words_upto(&["a", "b", "*", "%"], 10) {
        if !percent_wellformed(&w) {
            continue;
        }
        wellformed += 1;
        let brute = percent_member_bruteforce(&w.concat());
        let lib = oracle_membership(&OracleId::PercentLang, &w).map_err(|e| e.to_string())?;
        if brute != lib {
            return Err(format!("oracles disagree on {}", w.concat()));
        }
        members += brute as u64;
    }
    if wellformed != report.words_checked || members != report.members {
        return Err(format!(
            "word counts differ: {wellformed}/{members} brute force, {}/{} checked",
            report.words_checked, report.members
        ));
    }
    within(t0, Duration::from_secs(60))?;
    Ok(format!(
        "{wellformed} well-formed words ({members} members) agree in {:.2?}",
        t0.elapsed()
    ))
}

/// One published matrix: symbol pair and, per row, the columns printed as 1.
struct Printed {
    figure: &'static str,
    pair: [&'static str; 2],
    ones: &'static [(&'static str, &'static str)],
}

const PRINTED: &[Printed] = &[
    // two-head a^n b^n machine
    Printed {
        figure: "anbn",
        pair: ["a", "a"],
        ones: &[("q0", "q0")],
    },
    Printed {
        figure: "anbn",
        pair: ["b", "a"],
        ones: &[("q0", "q1"), ("q1", "q1")],
    },
    Printed {
        figure: "anbn",
        pair: ["b", "b"],
        ones: &[("q1", "q2"), ("q2", "q2")],
    },
    // reversible a^n b^n c^n machine
    Printed {
        figure: "rev2",
        pair: ["#", "#"],
        ones: &[("q0", "q0")],
    },
    Printed {
        figure: "rev2",
        pair: ["#", "a"],
        ones: &[("q0", "q0")],
    },
    Printed {
        figure: "rev2",
        pair: ["#", "b"],
        ones: &[("q0", "q1")],
    },
    Printed {
        figure: "rev2",
        pair: ["a", "b"],
        ones: &[("q1", "q1")],
    },
    Printed {
        figure: "rev2",
        pair: ["a", "c"],
        ones: &[("q1", "q2")],
    },
    Printed {
        figure: "rev2",
        pair: ["b", "c"],
        ones: &[("q2", "q0")],
    },
    Printed {
        figure: "rev2",
        pair: ["b", "$"],
        ones: &[("q2", "q3")],
    },
    Printed {
        figure: "rev2",
        pair: ["c", "$"],
        ones: &[("q3", "q3")],
    },
    Printed {
        figure: "rev2",
        pair: ["$", "$"],
        ones: &[("q3", "qf")],
    },
    // two-tape a^n b^n c^n machine; four values per row read against the
    // first four column labels
    Printed {
        figure: "2t1qfa",
        pair: ["#", "#"],
        ones: &[("q0", "q0")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["#", "a"],
        ones: &[("q0", "q0")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["#", "b"],
        ones: &[("q0", "q1")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["a", "b"],
        ones: &[("q1", "q1")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["a", "c"],
        ones: &[("q1", "q2")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["b", "$"],
        ones: &[("q2", "q0")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["c", "$"],
        ones: &[("q2", "q2"), ("q3", "q3")],
    },
    Printed {
        figure: "2t1qfa",
        pair: ["$", "$"],
        ones: &[("q3", "q3")],
    },
];

fn printed_mismatches() -> Result<Vec<String>, String> {
    let anbn = anbn_dfa2_machine();
    let rev2 = anbncn_rev2_machine();
    let qfa = anbncn_2t1qfa_machine();
    let mut out = Vec::new();
    for p in PRINTED {
        let mat = match p.figure {
            "anbn" => anbn.symbol_pair_matrix(&p.pair),
            "rev2" => rev2.symbol_pair_matrix(&p.pair),
            _ => qfa.table().symbol_pair_matrix(&p.pair),
        }
        .map_err(|e| e.to_string())?;
        let printed: BTreeSet<(&str, &str)> = p.ones.iter().copied().collect();
        for (i, row) in mat.labels.iter().enumerate() {
            for (j, col) in mat.labels.iter().enumerate() {
                // the two-tape figure prints no accepting-state column values
                if p.figure == "2t1qfa" && j == 4 {
                    continue;
                }
                let want = if printed.contains(&(row.as_str(), col.as_str())) {
                    1.0
                } else {
                    0.0
                };
                let got = mat.entries[i][j];
                if (got - Complex64::new(want, 0.0)).norm() > 1e-12 {
                    out.push(format!(
                        "{} M({}) [{row},{col}] printed {want} exported {}",
                        p.figure,
                        p.pair.join(","),
                        got.re
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn criterion_6() -> Outcome {
    if !check_reversible(&anbncn_rev2_machine()).reversible() {
        return Err("reversible machine reported not reversible".into());
    }
    let report = check_reversible(&anbn_dfa2_machine());
    let witness = report
        .column_conflicts
        .iter()
        .any(|c| c.symbols == ["b", "a"] && c.target == "q1" && c.sources == ["q0", "q1"]);
    if report.reversible() || !witness {
        return Err(format!(
            "a^n b^n machine: expected the (b,a) column q1 conflict, got {report:?}"
        ));
    }
    let mismatches = printed_mismatches()?;
    if mismatches.is_empty() {
        Ok("reversibility verdicts and every printed entry reproduced".into())
    } else {
        Err(format!(
            "reversibility verdicts ok; {} printed entries not reproduced: {}",
            mismatches.len(),
            mismatches.join("; ")
        ))
    }
}

fn criterion_7() -> Outcome {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_cons = 0.0f64;
    let mut worst_gram = 0.0f64;
    for _ in 0..500 {
        let states = rng.gen_range(2..=5);
        let m = random_twotape(&mut rng, &TableShape::small(states, &["a", "b"]));
        let alphabet = m.input_alphabet();
        for _ in 0..10 {
            let w = random_word(&mut rng, &alphabet, 5);
            let tapes = Tapes::new(&m, &w, &w).map_err(|e| e.to_string())?;
            let r = run_tapes(&m, &tapes, m.default_budget(w.len(), w.len()), true);
            let mut measured = 0.0;
            for step in r.trace.as_ref().expect("trace") {
                measured += step.acc + step.rej + step.sink;
                let live: f64 = step.live.iter().map(|(_, a)| a.norm_sqr()).sum();
                worst_cons = worst_cons.max((measured + live - 1.0).abs());
            }
            worst_gram = worst_gram.max(stepped_gram_deviation(&m, &tapes));
        }
    }
    if worst_cons > 1e-9 || worst_gram > 1e-9 {
        return Err(format!("conservation {worst_cons:e}, gram {worst_gram:e}"));
    }
    let mut worst_res = 0.0f64;
    for _ in 0..200 {
        let states = rng.gen_range(2..=5);
        let mut shape = TableShape::small(states, &["a", "b"]);
        shape.row_density = 0.5;
        let table = random_table(&mut rng, &shape);
        let (done, _) = unitary_complete(&table).map_err(|e| e.to_string())?;
        for (_, op) in done.pairs() {
            worst_res = worst_res.max(unitarity_residual(op, done.num_states()));
        }
    }
    if worst_res > 1e-12 {
        return Err(format!("completion residual {worst_res:e}"));
    }
    within(t0, Duration::from_secs(60))?;
    Ok(format!(
        "conservation {worst_cons:.1e}, gram {worst_gram:.1e}, completion {worst_res:.1e} in {:.2?}",
        t0.elapsed()
    ))
}

/// Largest `|<U c_i, U c_j> - δ_ij|` over the basis configurations that sit
/// before `$` on both tapes, are not halting and read a defined row.
fn stepped_gram_deviation(m: &TwoTapeQfa, tapes: &Tapes) -> f64 {
    let t = m.table();
    let mut basis = Vec::new();
    for state in 0..t.num_states() {
        if m.is_halting(state) {
            continue;
        }
        for h1 in 0..tapes.tape1.len() - 1 {
            for h2 in 0..tapes.tape2.len() - 1 {
                let pair = (tapes.tape1[h1], tapes.tape2[h2]);
                if t.operator(pair).and_then(|op| op.row(state)).is_some() {
                    basis.push(Configuration { state, h1, h2 });
                }
            }
        }
    }
    let images: Vec<_> = basis
        .iter()
        .map(|c| evolve(m, tapes, &Superposition::basis(*c)).0)
        .collect();
    let mut worst = 0.0f64;
    for i in 0..images.len() {
        for j in i..images.len() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((images[i].inner(&images[j]) - Complex64::new(want, 0.0)).norm());
        }
    }
    worst
}

fn criterion_8() -> Outcome {
    let classical = anbncn_rev2_machine();
    let lifted = lift_rmfa(&classical).map_err(|e| e.to_string())?;
    let mut accepted = 0;
    let words = words_upto(&["a", "b", "c"], 8);
    for w in &words {
        let c = run_mhdfa(&classical, w, None).map_err(|e| e.to_string())?;
        let q = run_twotape(&lifted, w, w, None, false).map_err(|e| e.to_string())?;
        let ok = match c.verdict {
            Verdict::Accepted => (q.p_acc - 1.0).abs() <= 1e-9,
            Verdict::Rejected => (q.p_rej - 1.0).abs() <= 1e-9,
            Verdict::Livelock => false,
        };
        if !ok {
            return Err(format!(
                "{}: classical {:?}, quantum p_acc {} p_rej {}",
                w.concat(),
                c.verdict,
                q.p_acc,
                q.p_rej
            ));
        }
        accepted += (c.verdict == Verdict::Accepted) as usize;
    }
    Ok(format!("{} words agree ({accepted} accepted)", words.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("a^n b^n c^n recognition", criterion_1),
        ("compiled DFAs", criterion_2),
        ("ww machine", criterion_3),
        ("two-point transform interference", criterion_4),
        ("percent language", criterion_5),
        ("reversibility and published matrices", criterion_6),
        ("property suites", criterion_7),
        ("lift fidelity", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

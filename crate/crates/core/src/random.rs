//! Random well-formed machines and inputs for property testing.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::amplitude::Amplitude;
use crate::classical::MultiHeadDfa;
use crate::operator::{HeadMove, OperatorTable, Symbol, LEFT_END, RIGHT_END};
use crate::quantum::{Mode, TwoTapeQfa};
use crate::relation::SymbolRelation;

/// `k` orthonormal vectors in `C^n` (`k <= n`), from Gram-Schmidt on random
/// complex vectors.
pub fn orthonormal_rows<R: Rng>(rng: &mut R, k: usize, n: usize) -> Vec<Vec<Complex64>> {
    assert!(k <= n);
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for _ in 0..2 {
            for u in &out {
                let proj: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Rows with exactly one entry of modulus one, as a random injective map.
fn permutation_rows<R: Rng>(rng: &mut R, k: usize, n: usize) -> Vec<Vec<Complex64>> {
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    targets
        .into_iter()
        .take(k)
        .map(|t| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[t] = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            v
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct TableShape {
    pub states: usize,
    pub tape1: Vec<Symbol>,
    pub tape2: Vec<Symbol>,
    /// Chance that a symbol pair has an operator at all.
    pub pair_density: f64,
    /// Chance that a source has a row under a defined pair.
    pub row_density: f64,
    /// Chance that a defined operator is a phase permutation instead of dense.
    pub permutation_bias: f64,
}

impl TableShape {
    pub fn small(states: usize, alphabet: &[&str]) -> Self {
        let a: Vec<Symbol> = alphabet.iter().map(|s| s.to_string()).collect();
        Self {
            states,
            tape1: a.clone(),
            tape2: a,
            pair_density: 0.8,
            row_density: 0.7,
            permutation_bias: 0.3,
        }
    }
}

fn with_markers(a: &[Symbol]) -> Vec<Symbol> {
    let mut out = vec![LEFT_END.to_string()];
    out.extend(a.iter().cloned());
    out.push(RIGHT_END.to_string());
    out
}

/// A random table whose defined rows are orthonormal for every pair.
pub fn random_table<R: Rng>(rng: &mut R, shape: &TableShape) -> OperatorTable {
    let names: Vec<String> = (0..shape.states).map(|i| format!("q{i}")).collect();
    let mut t = OperatorTable::from_parts(names.clone(), &shape.tape1, &shape.tape2)
        .expect("distinct names");
    for q in &names {
        let mv = HeadMove::new(rng.gen_range(0..2), rng.gen_range(0..2)).expect("0/1");
        t.set_move(q, mv).expect("known state");
    }
    let n = shape.states;
    for s1 in with_markers(&shape.tape1) {
        for s2 in with_markers(&shape.tape2) {
            if !rng.gen_bool(shape.pair_density) {
                continue;
            }
            // a head reading $ must not be told to move, so targets under such
            // pairs are limited to states that keep that head still
            let allowed: Vec<usize> = (0..n)
                .filter(|q| {
                    let HeadMove(d1, d2) = t.head_move(*q);
                    (s1 != RIGHT_END || d1 == 0) && (s2 != RIGHT_END || d2 == 0)
                })
                .collect();
            let mut sources: Vec<usize> =
                (0..n).filter(|_| rng.gen_bool(shape.row_density)).collect();
            sources.truncate(allowed.len());
            let rows = if rng.gen_bool(shape.permutation_bias) {
                permutation_rows(rng, sources.len(), allowed.len())
            } else {
                orthonormal_rows(rng, sources.len(), allowed.len())
            };
            for (src, row) in sources.iter().zip(rows) {
                for (k, z) in row.into_iter().enumerate() {
                    if z.norm() >= crate::superposition::PRUNE_THRESHOLD {
                        t.add_transition(
                            &names[*src],
                            (&s1, &s2),
                            &names[allowed[k]],
                            Amplitude::from_value(z),
                        )
                        .expect("known names");
                    }
                }
            }
        }
    }
    t
}

/// A random well-formed two-tape machine with identity relation; some states
/// besides the start are accepting or rejecting.
pub fn random_twotape<R: Rng>(rng: &mut R, shape: &TableShape) -> TwoTapeQfa {
    let table = random_table(rng, shape);
    let mut acc = Vec::new();
    let mut rej = Vec::new();
    for q in 1..shape.states {
        match rng.gen_range(0..4) {
            0 => acc.push(format!("q{q}")),
            1 => rej.push(format!("q{q}")),
            _ => {}
        }
    }
    let rho = if shape.tape1 == shape.tape2 {
        SymbolRelation::identity(&shape.tape1)
    } else {
        let mut pairs = Vec::new();
        for a in &shape.tape1 {
            let mut imgs: Vec<&Symbol> = shape.tape2.iter().filter(|_| rng.gen_bool(0.5)).collect();
            if imgs.is_empty() {
                imgs.push(shape.tape2.choose(rng).expect("non-empty"));
            }
            pairs.extend(imgs.into_iter().map(|b| (a.clone(), b.clone())));
        }
        SymbolRelation::new(&pairs).expect("plain symbols")
    };
    let acc: Vec<&str> = acc.iter().map(String::as_str).collect();
    let rej: Vec<&str> = rej.iter().map(String::as_str).collect();
    TwoTapeQfa::new(table, "q0", &acc, &rej, rho, Mode::TwoTape).expect("consistent")
}

pub fn random_word<R: Rng>(rng: &mut R, alphabet: &[Symbol], max_len: usize) -> Vec<Symbol> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| alphabet.choose(rng).expect("non-empty").clone())
        .collect()
}

/// A guess tape compatible with `rho`, or `None` if some symbol has no image.
pub fn random_guess<R: Rng>(
    rng: &mut R,
    rho: &SymbolRelation,
    w: &[Symbol],
) -> Option<Vec<Symbol>> {
    w.iter()
        .map(|a| rho.images(a).choose(rng).cloned())
        .collect()
}

/// A random one-way `k`-head DFA with about `transitions` transitions.
pub fn random_mhdfa<R: Rng>(
    rng: &mut R,
    states: usize,
    alphabet: &[&str],
    k: usize,
    transitions: usize,
) -> MultiHeadDfa {
    let names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let acc: Vec<&str> = refs.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
    let mut m = MultiHeadDfa::new(&refs, alphabet, k, "q0", &acc).expect("valid");
    let mut tape: Vec<&str> = vec![LEFT_END, RIGHT_END];
    tape.extend_from_slice(alphabet);
    for _ in 0..transitions {
        let from = *refs.choose(rng).expect("states");
        let to = *refs.choose(rng).expect("states");
        let read: Vec<&str> = (0..k)
            .map(|_| *tape.choose(rng).expect("symbols"))
            .collect();
        let moves: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
        // duplicates are skipped
        let _ = m.add(from, &read, to, &moves);
    }
    m
}

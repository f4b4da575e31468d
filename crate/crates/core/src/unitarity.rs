//! Orthonormality checks and unitary completion of partial operator tables.

use num_complex::Complex64;

use crate::amplitude::Amplitude;
use crate::error::{Error, Result};
use crate::operator::{HeadMove, Operator, OperatorTable};

/// Default tolerance for well-formedness checks.
pub const VALIDATION_TOL: f64 = 1e-9;
/// Required unitarity residual after completion.
pub const COMPLETION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PairDeviation {
    pub first: String,
    pub second: String,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub tolerance: f64,
    pub pairs: Vec<PairDeviation>,
    /// `D` is a function of the target state, so an entry can never be paired
    /// with a move other than `D(q')`; recorded for completeness.
    pub move_condition_by_construction: bool,
}

impl GramReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.max_deviation <= self.tolerance)
    }

    pub fn max_deviation(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.max_deviation)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairDeviation> {
        self.pairs
            .iter()
            .filter(|p| p.max_deviation > self.tolerance)
    }
}

/// Checks, for every defined symbol pair, that the images `V|q>` of the defined
/// sources are orthonormal.
pub fn check_gram_wellformed(table: &OperatorTable, tol: f64) -> GramReport {
    let n = table.num_states();
    let pairs = table
        .pairs()
        .map(|(idx, op)| {
            let (a, b) = table.pair_names(idx);
            PairDeviation {
                first: a.to_string(),
                second: b.to_string(),
                max_deviation: op.gram_deviation(n),
            }
        })
        .collect();
    GramReport {
        tolerance: tol,
        pairs,
        move_condition_by_construction: true,
    }
}

/// Max entrywise distance of `M M†` from the identity, where `M` is the dense
/// source-by-target matrix of `op` over `n` states.
pub fn unitarity_residual(op: &Operator, n: usize) -> f64 {
    let m = op.dense(n);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let g: Complex64 = (0..n).map(|k| m[i][k] * m[j][k].conj()).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}

fn fresh_names(table: &OperatorTable, count: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    let mut k = 1;
    while out.len() < count {
        let name = format!("q_rej_c{k}");
        if table.state(&name).is_err() {
            out.push(name);
        }
        k += 1;
    }
    out
}

fn orthonormal_complement(
    basis: &[Vec<Complex64>],
    dim: usize,
    needed: usize,
) -> Vec<Vec<Complex64>> {
    let mut have: Vec<Vec<Complex64>> = basis.to_vec();
    let mut out = Vec::with_capacity(needed);
    for e in 0..dim {
        if out.len() == needed {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[e] = Complex64::new(1.0, 0.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &have {
                let proj: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for x in &mut v {
                *x /= norm;
            }
            have.push(v.clone());
            out.push(v);
        }
    }
    out
}

/// Extends every defined symbol-pair operator to a unitary over an enlarged
/// state set. Undefined source rows are sent to fresh rejecting states (head
/// move (0,0)); the fresh states' own rows complete the basis. Returns the
/// completed table and the names of the added states.
pub fn unitary_complete(table: &OperatorTable) -> Result<(OperatorTable, Vec<String>)> {
    let report = check_gram_wellformed(table, VALIDATION_TOL);
    if let Some(bad) = report.failures().next() {
        return Err(Error::GramViolation(
            bad.first.clone(),
            bad.second.clone(),
            bad.max_deviation,
        ));
    }
    let n = table.num_states();
    let extra = table
        .pairs()
        .map(|(_, op)| (0..n).filter(|s| op.row(*s).is_none()).count())
        .max()
        .unwrap_or(0);
    let names = fresh_names(table, extra);
    let mut out = table.with_extra_states(&names)?;
    for name in &names {
        out.set_move(name, HeadMove::STAY)?;
    }
    let dim = n + extra;
    let pair_keys: Vec<(usize, usize)> = table.pairs().map(|(k, _)| k).collect();
    for key in pair_keys {
        let op = out.operator_mut(key);
        let mut next_fresh = n;
        let mut images = Vec::with_capacity(dim);
        for s in 0..n {
            if op.row(s).is_none() {
                op.push(s, next_fresh, Amplitude::one());
                next_fresh += 1;
            }
            images.push(op.image(s, dim).expect("row just ensured"));
        }
        // sources n.. are the fresh states themselves
        let completion = orthonormal_complement(&images, dim, extra);
        for (k, v) in completion.into_iter().enumerate() {
            let row = v
                .into_iter()
                .enumerate()
                .filter(|(_, a)| a.norm() >= crate::superposition::PRUNE_THRESHOLD)
                .map(|(t, a)| (t, Amplitude::from_value(a)))
                .collect();
            op.set_row(n + k, row);
        }
    }
    Ok((out, names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_passes_vacuously() {
        let t = OperatorTable::new(&["q0"], &["a"], &["a"]).unwrap();
        let r = check_gram_wellformed(&t, 1e-9);
        assert!(r.passed());
        assert!(r.pairs.is_empty());
    }

    #[test]
    fn colliding_rows_fail() {
        let mut t = OperatorTable::new(&["q0", "q1", "q2"], &["a", "b"], &["a", "b"]).unwrap();
        t.add_unit("q0", ("b", "a"), "q1").unwrap();
        t.add_unit("q1", ("b", "a"), "q1").unwrap();
        let r = check_gram_wellformed(&t, 1e-9);
        assert!(!r.passed());
        let bad: Vec<_> = r.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].first.as_str(), bad[0].second.as_str()), ("b", "a"));
        assert!((bad[0].max_deviation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_unitary_unchanged() {
        let mut t = OperatorTable::new(&["q0", "q1"], &["a"], &["a"]).unwrap();
        t.add_unit("q0", ("a", "a"), "q1").unwrap();
        t.add_unit("q1", ("a", "a"), "q0").unwrap();
        let (c, added) = unitary_complete(&t).unwrap();
        assert!(added.is_empty());
        assert_eq!(c, t);
    }

    #[test]
    fn partial_table_completes() {
        let mut t = OperatorTable::new(&["q0", "q1", "q2"], &["a"], &["a"]).unwrap();
        let h = Amplitude::parse("1/sqrt(2)").unwrap();
        t.add_transition("q0", ("a", "a"), "q1", h.clone()).unwrap();
        t.add_transition("q0", ("a", "a"), "q2", h).unwrap();
        t.add_unit("q1", ("#", "#"), "q0").unwrap();
        let (c, added) = unitary_complete(&t).unwrap();
        assert_eq!(added.len(), 2);
        for (_, op) in c.pairs() {
            assert!(unitarity_residual(op, c.num_states()) < COMPLETION_TOL);
        }
        // original rows are preserved exactly
        let orig = t.operator_by_name(("a", "a")).unwrap().unwrap();
        let done = c.operator_by_name(("a", "a")).unwrap().unwrap();
        assert_eq!(orig.row(0), done.row(0));
        assert_eq!(c.head_move(c.state(&added[0]).unwrap()), HeadMove::STAY);
    }

    #[test]
    fn gram_violation_is_an_error() {
        let mut t = OperatorTable::new(&["q0", "q1"], &["a"], &["a"]).unwrap();
        t.add_unit("q0", ("a", "a"), "q1").unwrap();
        t.add_unit("q1", ("a", "a"), "q1").unwrap();
        assert!(matches!(
            unitary_complete(&t),
            Err(Error::GramViolation(..))
        ));
    }
}

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Amplitudes smaller than this in modulus are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// A finite assignment of complex amplitudes to basis labels.
///
/// Labels are kept in a `BTreeMap` so iteration (and therefore every trace
/// or printout derived from it) is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition<L: Ord> {
    amps: BTreeMap<L, Complex64>,
}

impl<L: Ord> Default for Superposition<L> {
    fn default() -> Self {
        Self {
            amps: BTreeMap::new(),
        }
    }
}

impl<L: Ord + Clone> Superposition<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis(label: L) -> Self {
        let mut s = Self::new();
        s.add(label, Complex64::new(1.0, 0.0));
        s
    }

    /// Adds `amp` to the amplitude stored at `label`, pruning if the sum vanishes.
    pub fn add(&mut self, label: L, amp: Complex64) {
        use std::collections::btree_map::Entry;
        match self.amps.entry(label) {
            Entry::Vacant(v) => {
                if amp.norm() >= PRUNE_THRESHOLD {
                    v.insert(amp);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + amp;
                if sum.norm() < PRUNE_THRESHOLD {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Accumulates without pruning; call [`Superposition::prune`] afterwards.
    pub(crate) fn accumulate(&mut self, label: L, amp: Complex64) {
        *self.amps.entry(label).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    pub fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    pub fn get(&self, label: &L) -> Complex64 {
        self.amps.get(label).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &Complex64)> {
        self.amps.iter()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self::new();
        for (l, a) in &self.amps {
            out.add(l.clone(), a * factor);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, a) in &other.amps {
            out.add(l.clone(), *a);
        }
        out
    }

    /// Splits off every label satisfying `pred`, returning the removed part.
    pub fn split_off_where(&mut self, mut pred: impl FnMut(&L) -> bool) -> Self {
        let mut taken = Self::new();
        let keys: Vec<L> = self.amps.keys().filter(|l| pred(l)).cloned().collect();
        for k in keys {
            if let Some(a) = self.amps.remove(&k) {
                taken.amps.insert(k, a);
            }
        }
        taken
    }

    /// Hermitian inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().map(|(l, a)| a.conj() * other.get(l)).sum()
    }
}

impl<L: Ord + Clone> FromIterator<(L, Complex64)> for Superposition<L> {
    fn from_iter<T: IntoIterator<Item = (L, Complex64)>>(iter: T) -> Self {
        let mut s = Self::new();
        for (l, a) in iter {
            s.add(l, a);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_prunes_label() {
        let mut s = Superposition::basis("x");
        s.add("x", Complex64::new(-1.0, 0.0));
        assert!(s.is_empty());
        s.add("y", Complex64::new(1e-16, 0.0));
        assert!(s.is_empty());
    }

    #[test]
    fn inner_product_is_conjugate_linear() {
        let a: Superposition<u8> = [(0, Complex64::new(0.0, 1.0))].into_iter().collect();
        let b: Superposition<u8> = [(0, Complex64::new(1.0, 0.0))].into_iter().collect();
        assert_eq!(a.inner(&b), Complex64::new(0.0, -1.0));
        assert!((a.norm_sqr() - 1.0).abs() < 1e-15);
    }
}

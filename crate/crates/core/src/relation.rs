//! The relation pairing first-tape symbols with admissible second-tape symbols.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::operator::{is_endmarker, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolRelation {
    /// Images per domain symbol, in codomain order.
    images: BTreeMap<Symbol, Vec<Symbol>>,
    codomain: Vec<Symbol>,
}

impl SymbolRelation {
    /// Builds a relation; the codomain order is the order of first appearance.
    pub fn new<A: AsRef<str>, B: AsRef<str>>(pairs: &[(A, B)]) -> Result<Self> {
        let mut codomain: Vec<Symbol> = Vec::new();
        for (_, b) in pairs {
            if !codomain.iter().any(|c| c == b.as_ref()) {
                codomain.push(b.as_ref().to_string());
            }
        }
        Self::with_codomain_order(pairs, &codomain)
    }

    /// Builds a relation whose images are ordered by position in `order`.
    pub fn with_codomain_order<A: AsRef<str>, B: AsRef<str>>(
        pairs: &[(A, B)],
        order: &[Symbol],
    ) -> Result<Self> {
        let mut images: BTreeMap<Symbol, Vec<Symbol>> = BTreeMap::new();
        for (a, b) in pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            if is_endmarker(a) || is_endmarker(b) {
                return Err(Error::Invalid(format!(
                    "endmarkers may not appear in the relation: ({a}, {b})"
                )));
            }
            if !order.iter().any(|o| o == b) {
                return Err(Error::UnknownSymbol {
                    symbol: b.to_string(),
                    alphabet: "second-tape".into(),
                });
            }
            let entry = images.entry(a.to_string()).or_default();
            if !entry.iter().any(|x| x == b) {
                entry.push(b.to_string());
            }
        }
        let codomain: Vec<Symbol> = order.iter().filter(|s| !is_endmarker(s)).cloned().collect();
        for v in images.values_mut() {
            v.sort_by_key(|s| codomain.iter().position(|c| c == s));
        }
        Ok(Self { images, codomain })
    }

    pub fn identity<A: AsRef<str>>(alphabet: &[A]) -> Self {
        let pairs: Vec<(&str, &str)> = alphabet
            .iter()
            .map(|a| (a.as_ref(), a.as_ref()))
            .filter(|(a, _)| !is_endmarker(a))
            .collect();
        Self::new(&pairs).expect("identity relation over plain symbols")
    }

    /// Re-sorts images according to a (larger) codomain order.
    pub fn reordered(&self, order: &[Symbol]) -> Result<Self> {
        Self::with_codomain_order(&self.pairs(), order)
    }

    pub fn images(&self, a: &str) -> &[Symbol] {
        self.images.get(a).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.images(a).iter().any(|x| x == b)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Symbol> {
        self.images.keys()
    }

    pub fn codomain(&self) -> &[Symbol] {
        &self.codomain
    }

    pub fn pairs(&self) -> Vec<(Symbol, Symbol)> {
        self.images
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .all(|(a, bs)| bs.len() == 1 && &bs[0] == a)
    }

    /// Number of compatible second tapes for `word`, saturating in `u128`.
    pub fn count_tapes<S: AsRef<str>>(&self, word: &[S]) -> u128 {
        word.iter()
            .map(|s| self.images(s.as_ref()).len() as u128)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }
}

/// Lazily enumerates every compatible second tape for a first-tape word,
/// in lexicographic order of codomain positions.
#[derive(Clone, Debug)]
pub struct GuessTapes<'a> {
    choices: Vec<&'a [Symbol]>,
    counter: Vec<usize>,
    done: bool,
}

impl Iterator for GuessTapes<'_> {
    type Item = Vec<Symbol>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let tape: Vec<Symbol> = self
            .choices
            .iter()
            .zip(&self.counter)
            .map(|(c, &i)| c[i].clone())
            .collect();
        // odometer, rightmost position fastest
        let mut pos = self.counter.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counter[pos] += 1;
            if self.counter[pos] < self.choices[pos].len() {
                break;
            }
            self.counter[pos] = 0;
        }
        Some(tape)
    }
}

/// All words `w2` with `|w2| = |word|` and `(word[i], w2[i]) ∈ rel`.
pub fn rho_expand<'a, S: AsRef<str>>(
    rel: &'a SymbolRelation,
    word: &[S],
) -> Result<GuessTapes<'a>> {
    let mut choices = Vec::with_capacity(word.len());
    for s in word {
        let imgs = rel.images(s.as_ref());
        if imgs.is_empty() {
            return Err(Error::UnknownSymbol {
                symbol: s.as_ref().to_string(),
                alphabet: "relation domain".into(),
            });
        }
        choices.push(imgs);
    }
    Ok(GuessTapes {
        counter: vec![0; choices.len()],
        choices,
        done: false,
    })
}

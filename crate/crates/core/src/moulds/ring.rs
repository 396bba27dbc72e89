//! Coefficient rings for moulds: the rationals, the shuffle algebra on words,
//! and polynomials in free symbols over either.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::lincomb::{format_q, LinComb, Q};
use crate::products::shuffle;
use crate::word::ZWord;

/// A commutative unital `Q`-algebra with canonical forms.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn is_ring_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, c: &Q) -> Self;

    fn from_q(c: &Q) -> Self {
        Self::ring_one().scale(c)
    }

    fn neg_ref(&self) -> Self {
        self.scale(&-Q::one())
    }
}

impl CoeffRing for Q {
    fn ring_zero() -> Self {
        Q::zero()
    }
    fn ring_one() -> Self {
        Q::one()
    }
    fn is_ring_zero(&self) -> bool {
        self.is_zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
}

/// `(H^1, ⧢)`: linear combinations of words multiplied by the shuffle
/// product, with the empty word as unit.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ShuffleRing(pub LinComb<ZWord>);

impl ShuffleRing {
    pub fn word(w: ZWord) -> Self {
        ShuffleRing(LinComb::from_word(w))
    }
}

impl CoeffRing for ShuffleRing {
    fn ring_zero() -> Self {
        ShuffleRing(LinComb::zero())
    }
    fn ring_one() -> Self {
        ShuffleRing::word(ZWord::empty())
    }
    fn is_ring_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.0 += &other.0;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        ShuffleRing(shuffle(&self.0, &other.0))
    }
    fn scale(&self, c: &Q) -> Self {
        ShuffleRing(self.0.scale(c))
    }
}

impl fmt::Display for ShuffleRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A named generator such as `a⟨4,2⟩`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol {
    pub tag: char,
    pub index: ZWord,
}

impl Symbol {
    pub fn new(tag: char, index: ZWord) -> Self {
        Symbol { tag, index }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.index.letters().iter().map(|k| k.to_string()).collect();
        write!(f, "{}⟨{}⟩", self.tag, parts.join(","))
    }
}

/// A monomial in symbols: sorted `(symbol, exponent)` pairs.
pub type Monomial = Vec<(Symbol, u32)>;

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: BTreeMap<Symbol, u32> = a.iter().cloned().collect();
    for (s, e) in b {
        *out.entry(s.clone()).or_insert(0) += e;
    }
    out.into_iter().collect()
}

/// Polynomials in free commuting symbols with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C> {
    terms: BTreeMap<Monomial, C>,
}

/// Polynomials in free symbols over `Q`.
pub type FreeSymbols = Poly<Q>;

impl<C: CoeffRing> Poly<C> {
    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_ring_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { terms }
    }

    pub fn symbol(s: Symbol) -> Self {
        Poly { terms: BTreeMap::from([(vec![(s, 1)], C::ring_one())]) }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::ring_zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        match self.terms.get_mut(&m) {
            Some(e) => {
                e.add_assign_ref(&c);
                if e.is_ring_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                if !c.is_ring_zero() {
                    self.terms.insert(m, c);
                }
            }
        }
    }
}

impl<C: CoeffRing> CoeffRing for Poly<C> {
    fn ring_zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }
    fn ring_one() -> Self {
        Poly::constant(C::ring_one())
    }
    fn is_ring_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Poly::ring_zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(mul_monomials(m1, m2), c1.mul_ref(c2));
            }
        }
        out
    }
    fn scale(&self, c: &Q) -> Self {
        let mut out = Poly::ring_zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.scale(c));
        }
        out
    }
}

impl<C: CoeffRing + fmt::Display> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mono: Vec<String> =
                    m.iter().map(|(s, e)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") }).collect();
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})·{}", mono.join("·"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Displays a rational the way coefficients are written elsewhere.
pub struct ShowQ<'a>(pub &'a Q);

impl fmt::Display for ShowQ<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q(self.0))
    }
}

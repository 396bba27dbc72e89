//! Finite formal sums of words with exact rational coefficients.

use std::cmp::Reverse;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::word::{BWord, XyWord, ZWord};

/// Exact rationals, always reduced.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `"p/q"` with an explicit denominator, also for integers.
pub fn format_q(c: &Q) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// Accepts `"p/q"` and plain integers.
pub fn parse_q(text: &str) -> Result<Q> {
    let text = text.trim();
    let bad = || Error::Json(format!("`{text}` is not a rational"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// A basis element of a graded vector space.
pub trait Word: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync {
    fn weight(&self) -> u32;
    fn depth(&self) -> usize;
}

impl Word for ZWord {
    fn weight(&self) -> u32 {
        ZWord::weight(self)
    }
    fn depth(&self) -> usize {
        ZWord::depth(self)
    }
}

impl Word for XyWord {
    fn weight(&self) -> u32 {
        XyWord::weight(self)
    }
    fn depth(&self) -> usize {
        self.letters().iter().filter(|&&l| l == crate::word::Xy::Y).count()
    }
}

impl Word for BWord {
    fn weight(&self) -> u32 {
        BWord::weight(self)
    }
    fn depth(&self) -> usize {
        BWord::depth(self)
    }
}

/// A pure tensor `u ⊗ v` of two words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorKey(pub ZWord, pub ZWord);

impl Word for TensorKey {
    fn weight(&self) -> u32 {
        self.0.weight() + self.1.weight()
    }
    fn depth(&self) -> usize {
        self.0.depth() + self.1.depth()
    }
}

impl fmt::Debug for TensorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TensorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.0, self.1)
    }
}

/// Elements of `H^1 ⊗ H^1`.
pub type Tensor = LinComb<TensorKey>;

/// A finite linear combination of words. Zero coefficients are never stored and
/// terms are kept in canonical word order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<W: Word> {
    terms: BTreeMap<W, Q>,
}

impl<W: Word> Default for LinComb<W> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<W: Word> LinComb<W> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_word(w: W) -> Self {
        Self::term(w, Q::one())
    }

    pub fn term(w: W, c: Q) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (W, Q)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    /// Sums word-count pairs, as produced by the word-level products.
    pub fn from_counts<I: IntoIterator<Item = (W, u64)>>(terms: I) -> Self {
        Self::from_terms(terms.into_iter().map(|(w, n)| (w, Q::from_integer(BigInt::from(n)))))
    }

    pub fn add_term(&mut self, w: W, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_term_ref(&mut self, w: &W, c: &Q) {
        if c.is_zero() {
            return;
        }
        if let Some(existing) = self.terms.get_mut(w) {
            *existing += c;
            if existing.is_zero() {
                self.terms.remove(w);
            }
        } else {
            self.terms.insert(w.clone(), c.clone());
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &LinComb<W>, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, d) in &other.terms {
            self.add_term_ref(w, &(d * c));
        }
    }

    /// `Σ c_i · v_i`, accumulated in a hash map.
    pub fn sum_scaled<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = (&'a LinComb<W>, &'a Q)>,
        W: 'a,
    {
        let mut acc: HashMap<W, Q> = HashMap::new();
        for (v, c) in parts {
            for (w, d) in v.iter() {
                *acc.entry(w.clone()).or_insert_with(Q::zero) += c * d;
            }
        }
        LinComb::from_terms(acc)
    }

    pub fn coeff(&self, w: &W) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&W, &Q)> + '_ {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &W> + '_ {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinComb { terms: self.terms.iter().map(|(w, d)| (w.clone(), d * c)).collect() }
    }

    /// Extends a word-level map linearly.
    pub fn map_linear<V: Word, F: FnMut(&W) -> LinComb<V>>(&self, mut f: F) -> LinComb<V> {
        let mut out = LinComb::zero();
        for (w, c) in &self.terms {
            out.add_scaled(&f(w), c);
        }
        out
    }

    /// Extends a fallible word-level map linearly.
    pub fn try_map_linear<V: Word, F: FnMut(&W) -> Result<LinComb<V>>>(&self, mut f: F) -> Result<LinComb<V>> {
        let mut out = LinComb::zero();
        for (w, c) in &self.terms {
            out.add_scaled(&f(w)?, c);
        }
        Ok(out)
    }

    /// Extends a word-level bilinear map.
    pub fn bilinear<V: Word, U: Word, F: FnMut(&W, &V) -> LinComb<U>>(
        &self,
        other: &LinComb<V>,
        mut f: F,
    ) -> LinComb<U> {
        let mut out = LinComb::zero();
        for (u, a) in &self.terms {
            for (v, b) in other.iter() {
                out.add_scaled(&f(u, v), &(a * b));
            }
        }
        out
    }

    /// Drops every term whose word fails `keep`.
    pub fn filter<F: Fn(&W) -> bool>(&self, keep: F) -> Self {
        LinComb { terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(Word::weight).max()
    }

    /// The common weight of all terms; `None` for zero or inhomogeneous elements.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut weights = self.terms.keys().map(Word::weight);
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    /// Errors naming the first term whose weight differs from `k`.
    pub fn check_weight(&self, k: u32) -> Result<()> {
        for w in self.terms.keys() {
            if w.weight() != k {
                return Err(Error::Inhomogeneous { term: w.to_string(), found: w.weight(), expected: k });
            }
        }
        Ok(())
    }

    pub fn all_words<F: Fn(&W) -> bool>(&self, pred: F) -> bool {
        self.terms.keys().all(pred)
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Human-readable form such as `6·(3,3) − 3·(4,2) − (6)`; deepest terms first
    /// within each weight.
    pub fn to_plain(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(&W, &Q)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            (a.0.weight(), Reverse(a.0.depth())).cmp(&(b.0.weight(), Reverse(b.0.depth()))).then_with(|| a.0.cmp(b.0))
        });
        let mut out = String::new();
        for (i, (w, c)) in items.into_iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            if i == 0 {
                if negative {
                    out.push('−');
                }
            } else {
                out.push_str(if negative { " − " } else { " + " });
            }
            if !magnitude.is_one() {
                out.push_str(&magnitude.to_string());
                out.push('·');
            }
            out.push_str(&w.to_string());
        }
        out
    }
}

impl<W: Word> fmt::Debug for LinComb<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl<W: Word> fmt::Display for LinComb<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_plain())
    }
}

impl<W: Word> AddAssign<&LinComb<W>> for LinComb<W> {
    fn add_assign(&mut self, rhs: &LinComb<W>) {
        for (w, c) in &rhs.terms {
            self.add_term_ref(w, c);
        }
    }
}

impl<W: Word> SubAssign<&LinComb<W>> for LinComb<W> {
    fn sub_assign(&mut self, rhs: &LinComb<W>) {
        for (w, c) in &rhs.terms {
            self.add_term_ref(w, &-c);
        }
    }
}

impl<W: Word> Add<&LinComb<W>> for &LinComb<W> {
    type Output = LinComb<W>;
    fn add(self, rhs: &LinComb<W>) -> LinComb<W> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<W: Word> Sub<&LinComb<W>> for &LinComb<W> {
    type Output = LinComb<W>;
    fn sub(self, rhs: &LinComb<W>) -> LinComb<W> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<W: Word> Add for LinComb<W> {
    type Output = LinComb<W>;
    fn add(mut self, rhs: LinComb<W>) -> LinComb<W> {
        self += &rhs;
        self
    }
}

impl<W: Word> Sub for LinComb<W> {
    type Output = LinComb<W>;
    fn sub(mut self, rhs: LinComb<W>) -> LinComb<W> {
        self -= &rhs;
        self
    }
}

impl<W: Word> Neg for &LinComb<W> {
    type Output = LinComb<W>;
    fn neg(self) -> LinComb<W> {
        LinComb { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }
}

impl<W: Word> Neg for LinComb<W> {
    type Output = LinComb<W>;
    fn neg(self) -> LinComb<W> {
        -&self
    }
}

impl<W: Word> FromIterator<(W, Q)> for LinComb<W> {
    fn from_iter<I: IntoIterator<Item = (W, Q)>>(iter: I) -> Self {
        Self::from_terms(iter)
    }
}

/// Words with an integer-array JSON form.
pub trait JsonWord: Word {
    fn to_json(&self) -> Value;
    fn from_json(value: &Value) -> Result<Self>;
}

impl JsonWord for ZWord {
    fn to_json(&self) -> Value {
        Value::from(self.letters().iter().map(|&k| k as u64).collect::<Vec<_>>())
    }

    fn from_json(value: &Value) -> Result<Self> {
        let items = value.as_array().ok_or_else(|| Error::Json("word must be an integer array".into()))?;
        let mut index = Vec::with_capacity(items.len());
        for item in items {
            let k = item.as_u64().ok_or_else(|| Error::Json(format!("`{item}` is not a positive integer")))?;
            index.push(u32::try_from(k).unwrap_or(u32::MAX));
        }
        ZWord::new(&index)
    }
}

impl JsonWord for BWord {
    fn to_json(&self) -> Value {
        Value::from(self.flat().into_iter().map(u64::from).collect::<Vec<_>>())
    }

    fn from_json(value: &Value) -> Result<Self> {
        let items = value.as_array().ok_or_else(|| Error::Json("word must be an integer array".into()))?;
        let mut flat = Vec::with_capacity(items.len());
        for item in items {
            let k = item
                .as_u64()
                .filter(|&k| k <= u8::MAX as u64)
                .ok_or_else(|| Error::Json(format!("`{item}` is not a letter index")))?;
            flat.push(k as u8);
        }
        BWord::from_flat(&flat)
    }
}

impl<W: JsonWord> LinComb<W> {
    /// `{"terms":[{"coeff":"p/q","word":[...]}, ...]}` in canonical term order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> =
            self.terms.iter().map(|(w, c)| json!({"coeff": format_q(c), "word": w.to_json()})).collect();
        json!({ "terms": terms })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let terms =
            value.get("terms").and_then(Value::as_array).ok_or_else(|| Error::Json("missing `terms` array".into()))?;
        let mut out = Self::zero();
        for t in terms {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Json("term without string `coeff`".into()))?;
            let word = t.get("word").ok_or_else(|| Error::Json("term without `word`".into()))?;
            out.add_term(W::from_json(word)?, parse_q(coeff)?);
        }
        Ok(out)
    }
}

impl Tensor {
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .iter()
            .map(|(t, c)| json!({"coeff": format_q(c), "left": t.0.to_json(), "right": t.1.to_json()}))
            .collect();
        json!({ "terms": terms })
    }
}

/// Convenience constructor for word-level literals in tests and examples:
/// `lc(&[(6, &[3, 3]), (-3, &[4, 2])])`.
pub fn lc(terms: &[(i64, &[u32])]) -> LinComb<ZWord> {
    LinComb::from_terms(terms.iter().map(|(c, w)| (ZWord::new(w).expect("valid literal word"), q(*c))))
}

/// The word `z_{k_1} ... z_{k_r}` as a linear combination.
pub fn zw(index: &[u32]) -> LinComb<ZWord> {
    LinComb::from_word(ZWord::new(index).expect("valid literal word"))
}

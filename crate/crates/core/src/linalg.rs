//! Exact sparse linear algebra on word-indexed spaces: fraction-free row
//! reduction over the integers, reduced row echelon forms over `Q`, span
//! membership, and a multi-modular rank.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lincomb::{JsonWord, LinComb, Q};
use crate::word::{enumerate_basis, Space, ZWord};

/// Ordered basis of a homogeneous piece of `H^1`; column `i` is `words[i]`.
#[derive(Clone, Debug)]
pub struct ColumnIndex {
    weight: u32,
    words: Vec<ZWord>,
    pos: HashMap<ZWord, usize>,
}

impl ColumnIndex {
    pub fn new(weight: u32, space: Space) -> Self {
        Self::from_words(weight, enumerate_basis(weight, space))
    }

    pub fn from_words(weight: u32, words: Vec<ZWord>) -> Self {
        let pos = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        ColumnIndex { weight, words, pos }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, col: usize) -> &ZWord {
        &self.words[col]
    }

    pub fn words(&self) -> &[ZWord] {
        &self.words
    }

    pub fn col(&self, w: &ZWord) -> Option<usize> {
        self.pos.get(w).copied()
    }

    /// The sparse rational row of `v`, erroring on terms of the wrong weight or
    /// outside the indexed basis.
    pub fn rational_row(&self, v: &LinComb<ZWord>) -> Result<Vec<(usize, Q)>> {
        let mut row = Vec::with_capacity(v.len());
        for (w, c) in v.iter() {
            if w.weight() != self.weight {
                return Err(Error::Inhomogeneous { term: w.to_string(), found: w.weight(), expected: self.weight });
            }
            let col = self.col(w).ok_or_else(|| Error::Domain(format!("{w} is not a basis word of this space")))?;
            row.push((col, c.clone()));
        }
        row.sort_by_key(|(c, _)| *c);
        Ok(row)
    }

    /// The primitive integer row proportional to `v`, with positive leading entry.
    pub fn integer_row(&self, v: &LinComb<ZWord>) -> Result<IntRow> {
        Ok(primitive(&self.rational_row(v)?))
    }

    pub fn lincomb(&self, row: &[(usize, Q)]) -> LinComb<ZWord> {
        LinComb::from_terms(row.iter().map(|(c, q)| (self.words[*c].clone(), q.clone())))
    }
}

pub type IntRow = Vec<(usize, BigInt)>;

fn primitive(row: &[(usize, Q)]) -> IntRow {
    let mut lcm = BigInt::one();
    for (_, c) in row {
        lcm = lcm.lcm(c.denom());
    }
    let mut out: IntRow = row.iter().map(|(i, c)| (*i, c.numer() * (&lcm / c.denom()))).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let Some((_, lead)) = row.first() else { return };
    let mut g = BigInt::zero();
    for (_, c) in row.iter() {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if lead.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, c) in row.iter_mut() {
            *c /= &g;
        }
    }
}

// a*x - b*y on sorted sparse rows, dropping cancelled entries.
fn combine(a: &BigInt, x: &IntRow, b: &BigInt, y: &IntRow) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take = match (x.get(i), y.get(j)) {
            (Some(p), Some(q)) => p.0.cmp(&q.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match take {
            std::cmp::Ordering::Less => {
                out.push((x[i].0, a * &x[i].1));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((y[j].0, -(b * &y[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = a * &x[i].1 - b * &y[j].1;
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Incremental fraction-free row reduction over `Z`. Pivot rows are kept
/// primitive and fully reduced: each pivot column is zero in every other row,
/// which keeps the entries proportional to the reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, IntRow>,
}

fn entry(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

// Eliminates column `col` from `row` using `pivot`, whose leading column is `col`.
fn eliminate(row: &IntRow, col: usize, pivot: &IntRow) -> Option<IntRow> {
    let v = entry(row, col)?;
    let lead = &pivot[0].1;
    let g = lead.gcd(v);
    let mut out = combine(&(lead / &g), row, &(v / &g), pivot);
    make_primitive(&mut out);
    Some(out)
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` by the existing pivots; returns whether it was independent.
    pub fn insert(&mut self, mut row: IntRow) -> bool {
        make_primitive(&mut row);
        let cols: Vec<usize> = row.iter().map(|(c, _)| *c).collect();
        for col in cols {
            if let Some(p) = self.pivots.get(&col) {
                if let Some(next) = eliminate(&row, col, p) {
                    row = next;
                }
            }
        }
        // columns may have been filled in by the eliminations above
        loop {
            let hit = row.iter().find(|(c, _)| self.pivots.contains_key(c)).map(|(c, _)| *c);
            let Some(col) = hit else { break };
            row = eliminate(&row, col, &self.pivots[&col]).expect("entry present");
        }
        let Some(&(lead, _)) = row.first() else { return false };
        for p in self.pivots.values_mut() {
            if let Some(next) = eliminate(p, lead, &row) {
                *p = next;
            }
        }
        self.pivots.insert(lead, row);
        true
    }

    pub fn pivot_rows(&self) -> impl Iterator<Item = &IntRow> {
        self.pivots.values()
    }

    /// Reduced row echelon form over `Q`: pivot entries 1, pivot columns
    /// cleared from every other row, rows in increasing pivot order.
    pub fn rref(&self) -> Vec<Vec<(usize, Q)>> {
        let mut rows: Vec<BTreeMap<usize, Q>> = self
            .pivots
            .values()
            .map(|r| {
                let lead = Q::from_integer(r[0].1.clone());
                r.iter().map(|(c, v)| (*c, Q::from_integer(v.clone()) / &lead)).collect()
            })
            .collect();
        let cols: Vec<usize> = self.pivots.keys().copied().collect();
        for k in (0..rows.len()).rev() {
            let col = cols[k];
            let (before, after) = rows.split_at_mut(k);
            let pivot = &after[0];
            for row in before.iter_mut() {
                let Some(f) = row.get(&col).cloned() else { continue };
                for (c, v) in pivot {
                    let e = row.entry(*c).or_insert_with(Q::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        row.remove(c);
                    }
                }
            }
        }
        rows.into_iter().map(|r| r.into_iter().collect()).collect()
    }
}

/// Rank of integer rows, with rows deduplicated and ordered by leading column
/// and then sparsity so that each pivot is the sparsest candidate. Also returns
/// the input rows (made primitive) that were independent of their predecessors
/// in that order; they form a basis of the span.
pub fn rank_of_rows(rows: Vec<IntRow>) -> (Echelon, Vec<IntRow>) {
    let mut rows: Vec<IntRow> = rows
        .into_iter()
        .filter(|r| !r.is_empty())
        .map(|mut r| {
            make_primitive(&mut r);
            r
        })
        .collect();
    rows.sort_by(|a, b| (a[0].0, a.len()).cmp(&(b[0].0, b.len())).then_with(|| a.cmp(b)));
    rows.dedup();
    let mut ech = Echelon::new();
    let mut kept = Vec::new();
    for r in rows {
        if ech.insert(r.clone()) {
            kept.push(r);
        }
    }
    (ech, kept)
}

/// The span of a set of homogeneous elements, in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct RelationSpace {
    columns: Arc<ColumnIndex>,
    echelon: Echelon,
    independent: Vec<IntRow>,
    rref: OnceLock<Vec<Vec<(usize, Q)>>>,
}

impl RelationSpace {
    pub fn new(columns: Arc<ColumnIndex>, rows: &[LinComb<ZWord>]) -> Result<Self> {
        let int_rows = rows.iter().map(|r| columns.integer_row(r)).collect::<Result<Vec<_>>>()?;
        let (echelon, independent) = rank_of_rows(int_rows);
        Ok(RelationSpace { columns, echelon, independent, rref: OnceLock::new() })
    }

    pub fn weight(&self) -> u32 {
        self.columns.weight()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn columns(&self) -> &ColumnIndex {
        &self.columns
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    /// Input rows, primitive over `Z`, forming a basis of the span.
    pub fn independent_rows(&self) -> &[IntRow] {
        &self.independent
    }

    pub fn rref(&self) -> &[Vec<(usize, Q)>] {
        self.rref.get_or_init(|| self.echelon.rref())
    }

    /// Basis of the span as linear combinations (the rref rows).
    pub fn basis(&self) -> Vec<LinComb<ZWord>> {
        self.rref().iter().map(|r| self.columns.lincomb(r)).collect()
    }

    /// Normal form of `v` modulo the span and whether `v` lies in it.
    pub fn reduce(&self, v: &LinComb<ZWord>) -> Result<(LinComb<ZWord>, bool)> {
        let row = self.columns.rational_row(v)?;
        let mut acc: BTreeMap<usize, Q> = row.into_iter().collect();
        for r in self.rref() {
            let col = r[0].0;
            let Some(f) = acc.get(&col).cloned() else { continue };
            for (c, x) in r {
                let e = acc.entry(*c).or_insert_with(Q::zero);
                *e -= &f * x;
                if e.is_zero() {
                    acc.remove(c);
                }
            }
        }
        let residual: Vec<(usize, Q)> = acc.into_iter().collect();
        let member = residual.is_empty();
        Ok((self.columns.lincomb(&residual), member))
    }

    pub fn contains(&self, v: &LinComb<ZWord>) -> Result<bool> {
        Ok(self.reduce(v)?.1)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "weight": self.weight(),
            "rank": self.rank(),
            "basis": self.basis().iter().map(|b| b.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// `(row, col, numerator, denominator)` records of a matrix whose rows are the
/// given elements, for CSV export.
pub fn matrix_records(columns: &ColumnIndex, rows: &[LinComb<ZWord>]) -> Result<Vec<(usize, usize, String, String)>> {
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        for (col, c) in columns.rational_row(r)? {
            out.push((i, col, c.numer().to_string(), c.denom().to_string()));
        }
    }
    Ok(out)
}

/// Column dictionary as JSON (`[[k_1, …], …]` in column order).
pub fn columns_json(columns: &ColumnIndex) -> Value {
    Value::Array(columns.words().iter().map(JsonWord::to_json).collect())
}

// ---------------------------------------------------------------------------
// modular path

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The first `count` primes above `2^30` (after skipping `skip` of them).
pub fn default_primes(count: usize, skip: usize) -> Vec<u64> {
    (1u64 << 30..1u64 << 31).filter(|&n| is_prime(n)).skip(skip).take(count).collect()
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn big_mod(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

/// Reduces a rational row mod `p`, or `None` when `p` divides a denominator.
fn row_mod(row: &[(usize, Q)], p: u64) -> Option<Vec<(usize, u64)>> {
    let mut out = Vec::with_capacity(row.len());
    for (c, q) in row {
        let d = big_mod(q.denom(), p);
        if d == 0 {
            return None;
        }
        let v = big_mod(q.numer(), p) * inv_mod(d, p) % p;
        if v != 0 {
            out.push((*c, v));
        }
    }
    Some(out)
}

/// Rank of rows mod `p` (dense elimination, rows normalised to leading 1).
pub fn rank_mod_p(rows: &[Vec<(usize, u64)>], ncols: usize, p: u64) -> usize {
    independent_mod_p(rows, ncols, p).len()
}

/// Indices of the rows that are independent of the rows before them, mod `p`.
/// Such rows are also independent over `Q`.
pub fn independent_mod_p(rows: &[Vec<(usize, u64)>], ncols: usize, p: u64) -> Vec<usize> {
    let mut pivots: Vec<Option<Vec<u64>>> = vec![None; ncols];
    let mut kept = Vec::new();
    let mut dense = vec![0u64; ncols];
    for (i, row) in rows.iter().enumerate() {
        dense.iter_mut().for_each(|x| *x = 0);
        for (c, v) in row {
            dense[*c] = *v % p;
        }
        for col in 0..ncols {
            let v = dense[col];
            if v == 0 {
                continue;
            }
            match &pivots[col] {
                Some(prow) => {
                    let f = p - v;
                    for k in col..ncols {
                        if prow[k] != 0 {
                            dense[k] = (dense[k] + f * prow[k]) % p;
                        }
                    }
                }
                None => {
                    let inv = inv_mod(v, p);
                    let norm: Vec<u64> = dense.iter().map(|x| x * inv % p).collect();
                    pivots[col] = Some(norm);
                    kept.push(i);
                    break;
                }
            }
        }
    }
    kept
}

/// Reduces integer rows mod `p`.
pub fn int_rows_mod(rows: &[Vec<(usize, i128)>], p: u64) -> Vec<Vec<(usize, u64)>> {
    let pi = i128::from(p);
    rows.iter()
        .map(|r| {
            r.iter()
                .filter_map(|(c, v)| {
                    let m = v.rem_euclid(pi) as u64;
                    (m != 0).then_some((*c, m))
                })
                .collect()
        })
        .collect()
}

/// Outcome of a multi-modular rank computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularRank {
    pub rank: usize,
    /// `(prime, rank mod prime)` for every prime actually used.
    pub per_prime: Vec<(u64, usize)>,
    /// Primes that divided a denominator and were replaced.
    pub redrawn: Vec<u64>,
    /// Whether the per-prime ranks disagreed and the exact rank was computed.
    pub exact_fallback: bool,
}

/// Rank of `rows` over `Q` by reduction modulo each of `primes`. A prime that
/// divides a denominator is replaced by the next unused prime above `2^30`; if
/// the ranks disagree the exact rank is computed and returned.
pub fn modular_rank(columns: &ColumnIndex, rows: &[LinComb<ZWord>], primes: &[u64]) -> Result<ModularRank> {
    let rational: Vec<Vec<(usize, Q)>> = rows.iter().map(|r| columns.rational_row(r)).collect::<Result<_>>()?;
    let mut per_prime = Vec::new();
    let mut redrawn = Vec::new();
    let mut spare = default_primes(64, 0).into_iter().filter(|p| !primes.contains(p));
    for &p0 in primes {
        let mut p = p0;
        let reduced = loop {
            if p <= 1 << 30 || !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not a prime above 2^30")));
            }
            match rational.iter().map(|r| row_mod(r, p)).collect::<Option<Vec<_>>>() {
                Some(rows) => break rows,
                None => {
                    redrawn.push(p);
                    p = spare.next().ok_or_else(|| Error::Domain("ran out of primes".into()))?;
                }
            }
        };
        per_prime.push((p, rank_mod_p(&reduced, columns.len(), p)));
    }
    let first = per_prime.first().map(|x| x.1).unwrap_or(0);
    if per_prime.iter().all(|x| x.1 == first) {
        return Ok(ModularRank { rank: first, per_prime, redrawn, exact_fallback: false });
    }
    let exact = RelationSpace::new(Arc::new(columns.clone()), rows)?.rank();
    Ok(ModularRank { rank: exact, per_prime, redrawn, exact_fallback: true })
}

//! Truncated bimoulds: families `M(u_1, …, u_r; v_1, …, v_r)` of power series,
//! one per depth `r`, kept up to a depth and a weight bound.
//!
//! The weight of a monomial at depth `r` is `r` plus its total degree, so the
//! coefficient of `v_1^{k_1-1} ⋯ v_r^{k_r-1}` has weight `k_1 + … + k_r`.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use smallvec::SmallVec;

use super::ring::{CoeffRing, Poly, Symbol};
use crate::error::{Error, Result};
use crate::lincomb::Q;
use crate::word::ZWord;

/// Exponents of one monomial: the `u`-exponents followed by the `v`-exponents.
pub type Exps = SmallVec<[u8; 12]>;

/// A polynomial in a fixed number of commuting variables.
pub type Series<C> = BTreeMap<Exps, C>;

type LinForm = SmallVec<[(usize, i64); 4]>;
type IntPoly = BTreeMap<Exps, i64>;

fn degree(e: &[u8]) -> u32 {
    e.iter().map(|&x| u32::from(x)).sum()
}

fn add_into<C: CoeffRing>(s: &mut Series<C>, e: Exps, c: C) {
    if c.is_ring_zero() {
        return;
    }
    match s.get_mut(&e) {
        Some(x) => {
            x.add_assign_ref(&c);
            if x.is_ring_zero() {
                s.remove(&e);
            }
        }
        None => {
            s.insert(e, c);
        }
    }
}

fn series_mul<C: CoeffRing>(a: &Series<C>, b: &Series<C>, max_deg: u32) -> Series<C> {
    let mut out = Series::new();
    for (ea, ca) in a {
        let da = degree(ea);
        for (eb, cb) in b {
            if da + degree(eb) > max_deg {
                continue;
            }
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_into(&mut out, e, ca.mul_ref(cb));
        }
    }
    out
}

fn int_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = IntPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Substitutes linear forms in `nvars` variables for the variables of `comp`
/// and expands, dropping everything above `max_deg`.
fn substitute<C: CoeffRing>(comp: &Series<C>, forms: &[LinForm], nvars: usize, max_deg: u32) -> Series<C> {
    let unit: Exps = SmallVec::from_elem(0, nvars);
    let mut powers: HashMap<(usize, u8), IntPoly> = HashMap::new();
    let mut out = Series::new();
    for (exps, c) in comp {
        if degree(exps) > max_deg {
            continue;
        }
        let mut poly = IntPoly::from([(unit.clone(), 1)]);
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = powers.entry((i, e)).or_insert_with(|| {
                let mut base = IntPoly::new();
                for &(var, coeff) in &forms[i] {
                    let mut m = unit.clone();
                    m[var] = 1;
                    *base.entry(m).or_insert(0) += coeff;
                }
                base.retain(|_, c| *c != 0);
                let mut acc = IntPoly::from([(unit.clone(), 1)]);
                for _ in 0..e {
                    acc = int_mul(&acc, &base);
                }
                acc
            });
            poly = int_mul(&poly, p);
        }
        for (m, n) in poly {
            add_into(&mut out, m, c.scale(&Q::from_integer(n.into())));
        }
    }
    out
}

/// Compositions `(k_1, …, k_r)` with every `k_i ≥ 1` and `Σ k_i ≤ max`.
pub fn compositions_up_to(r: usize, max: u32) -> Vec<Vec<u8>> {
    fn go(r: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        let need = (r - cur.len() - 1) as u32;
        for k in 1..=left.saturating_sub(need) {
            cur.push(k as u8);
            go(r, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 || max as usize >= r {
        go(r, max, &mut Vec::new(), &mut out);
    }
    out
}

/// A bimould truncated at `depth ≤ depth_max` and `weight ≤ weight_max`.
#[derive(Clone, PartialEq, Debug)]
pub struct Mould<C> {
    depth_max: usize,
    weight_max: u32,
    comps: Vec<Series<C>>,
}

impl<C: CoeffRing> Mould<C> {
    pub fn zero(depth_max: usize, weight_max: u32) -> Self {
        Mould { depth_max, weight_max, comps: vec![Series::new(); depth_max + 1] }
    }

    /// The mould equal to `1` in depth 0 and zero elsewhere.
    pub fn unit(depth_max: usize, weight_max: u32) -> Self {
        let mut m = Self::zero(depth_max, weight_max);
        m.comps[0].insert(Exps::new(), C::ring_one());
        m
    }

    /// The `v`-mould with `⟨M | k⟩ = f(k)`; `f(&[])` gives the depth-0 value.
    pub fn from_fn<F: FnMut(&[u8]) -> C>(depth_max: usize, weight_max: u32, mut f: F) -> Self {
        let mut m = Self::zero(depth_max, weight_max);
        for r in 0..=depth_max {
            for k in compositions_up_to(r, weight_max) {
                let c = f(&k);
                let mut e: Exps = SmallVec::from_elem(0, r);
                e.extend(k.iter().map(|&x| x - 1));
                add_into(&mut m.comps[r], e, c);
            }
        }
        m
    }

    pub fn depth_max(&self) -> usize {
        self.depth_max
    }

    pub fn weight_max(&self) -> u32 {
        self.weight_max
    }

    /// The depth-`r` component as a polynomial in `u_1..u_r, v_1..v_r`.
    pub fn component(&self, r: usize) -> &Series<C> {
        &self.comps[r]
    }

    pub fn add_term(&mut self, exps: Exps, c: C) -> Result<()> {
        if !exps.len().is_multiple_of(2) {
            return Err(Error::Domain(format!("exponent vector {exps:?} has odd length")));
        }
        let r = exps.len() / 2;
        let w = degree(&exps) + r as u32;
        if r > self.depth_max || w > self.weight_max {
            return Err(Error::Truncation(format!(
                "term of depth {r} and weight {w} exceeds bounds ({}, {})",
                self.depth_max, self.weight_max
            )));
        }
        add_into(&mut self.comps[r], exps, c);
        Ok(())
    }

    /// The coefficient of `u^0 v_1^{k_1-1} ⋯ v_r^{k_r-1}`.
    pub fn coeff(&self, k: &[u8]) -> C {
        let r = k.len();
        if r > self.depth_max {
            return C::ring_zero();
        }
        let mut e: Exps = SmallVec::from_elem(0, r);
        e.extend(k.iter().map(|&x| x - 1));
        self.comps[r].get(&e).cloned().unwrap_or_else(C::ring_zero)
    }

    /// True when no component involves the `u` variables.
    pub fn is_v_mould(&self) -> bool {
        self.comps.iter().enumerate().all(|(r, s)| s.keys().all(|e| e[..r].iter().all(|&x| x == 0)))
    }

    fn check_bounds(&self, other: &Self) -> Result<()> {
        if self.depth_max != other.depth_max || self.weight_max != other.weight_max {
            return Err(Error::Truncation(format!(
                "moulds truncated at ({}, {}) and ({}, {}) cannot be combined",
                self.depth_max, self.weight_max, other.depth_max, other.weight_max
            )));
        }
        Ok(())
    }

    fn map_terms<F: Fn(usize, &Exps, &C) -> (Exps, C)>(&self, f: F) -> Self {
        let mut out = Self::zero(self.depth_max, self.weight_max);
        for (r, comp) in self.comps.iter().enumerate() {
            for (e, c) in comp {
                let (e2, c2) = f(r, e, c);
                add_into(&mut out.comps[r], e2, c2);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_bounds(other)?;
        let mut out = self.clone();
        for (r, comp) in other.comps.iter().enumerate() {
            for (e, c) in comp {
                add_into(&mut out.comps[r], e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map_terms(|_, e, x| (e.clone(), x.scale(c)))
    }

    /// `(M × N)(w) = Σ_{w = ab} M(a) N(b)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_bounds(other)?;
        let mut out = Self::zero(self.depth_max, self.weight_max);
        for (i, a) in self.comps.iter().enumerate() {
            for (j, b) in other.comps.iter().enumerate().take(self.depth_max + 1 - i) {
                let r = i + j;
                for (ea, ca) in a {
                    let wa = degree(ea) + i as u32;
                    for (eb, cb) in b {
                        if wa + degree(eb) + j as u32 > self.weight_max {
                            continue;
                        }
                        let mut e = Exps::with_capacity(2 * r);
                        e.extend_from_slice(&ea[..i]);
                        e.extend_from_slice(&eb[..j]);
                        e.extend_from_slice(&ea[i..]);
                        e.extend_from_slice(&eb[j..]);
                        add_into(&mut out.comps[r], e, ca.mul_ref(cb));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `M(w) ↦ M(−w)`.
    pub fn neg(&self) -> Self {
        self.map_terms(|_, e, c| {
            let c = if degree(e) % 2 == 1 { c.neg_ref() } else { c.clone() };
            (e.clone(), c)
        })
    }

    /// `M(w_1, …, w_r) ↦ M(w_r, …, w_1)`.
    pub fn anti(&self) -> Self {
        self.map_terms(|r, e, c| {
            let mut e2: Exps = e[..r].iter().rev().copied().collect();
            e2.extend(e[r..].iter().rev().copied());
            (e2, c.clone())
        })
    }

    /// `M(w) ↦ (−1)^r M(w)`.
    pub fn pari(&self) -> Self {
        self.map_terms(|r, e, c| (e.clone(), if r % 2 == 1 { c.neg_ref() } else { c.clone() }))
    }

    /// `neg ∘ anti ∘ pari`.
    pub fn minus(&self) -> Self {
        self.pari().anti().neg()
    }

    /// `swap(M)(u; v) = M(v_r, v_{r-1} − v_r, …, v_1 − v_2; u_1 + … + u_r, …, u_1)`.
    pub fn swap(&self) -> Self {
        let mut out = Self::zero(self.depth_max, self.weight_max);
        for (r, comp) in self.comps.iter().enumerate() {
            if r == 0 {
                out.comps[0] = comp.clone();
                continue;
            }
            let v = |i: usize| r + i;
            let mut forms: Vec<LinForm> = Vec::with_capacity(2 * r);
            forms.push(SmallVec::from_slice(&[(v(r - 1), 1)]));
            for i in 1..r {
                forms.push(SmallVec::from_slice(&[(v(r - 1 - i), 1), (v(r - i), -1)]));
            }
            for i in 0..r {
                forms.push((0..r - i).map(|p| (p, 1)).collect());
            }
            let max_deg = self.weight_max.saturating_sub(r as u32);
            out.comps[r] = substitute(comp, &forms, 2 * r, max_deg);
        }
        out
    }

    /// `gaxit(A; B, C)(w) = Σ A(⌈b_1⌉ ⋯ ⌈b_s⌉) ∏ B(a_i⌋) C(⌊c_i)` over
    /// `w = a_1 b_1 c_1 ⋯ a_s b_s c_s` with every `b_i` non-empty and every
    /// `c_i a_{i+1}` non-empty.
    pub fn gaxit(&self, b: &Self, c: &Self) -> Result<Self> {
        self.check_bounds(b)?;
        self.check_bounds(c)?;
        let mut out = Self::zero(self.depth_max, self.weight_max);
        out.comps[0] = self.comps[0].clone();
        let b_empty = b.comps[0].get(&Exps::new()).cloned().unwrap_or_else(C::ring_zero);
        let c_empty = c.comps[0].get(&Exps::new()).cloned().unwrap_or_else(C::ring_zero);
        for r in 1..=self.depth_max {
            let Some(max_deg) = self.weight_max.checked_sub(r as u32) else { break };
            let nv = 2 * r;
            let mut acc = Series::new();
            for mask in 1u32..(1 << r) {
                let blocks = runs_of(mask, r);
                let s = blocks.len();
                let inner: Vec<usize> = (0..s - 1).map(|j| blocks[j + 1].0 - blocks[j].1 - 1).collect();
                let mut splits = vec![0usize; s.saturating_sub(1)];
                loop {
                    // a_j and c_j as position ranges [start, end).
                    let mut a_rng = Vec::with_capacity(s);
                    let mut c_rng = Vec::with_capacity(s);
                    a_rng.push((0, blocks[0].0));
                    for j in 0..s {
                        let after = blocks[j].1 + 1;
                        let c_end = if j + 1 < s { after + splits[j] } else { r };
                        c_rng.push((after, c_end));
                        if j + 1 < s {
                            a_rng.push((c_end, blocks[j + 1].0));
                        }
                    }
                    let mut forms: Vec<LinForm> = Vec::new();
                    let mut vforms: Vec<LinForm> = Vec::new();
                    for j in 0..s {
                        let (lo, hi) = blocks[j];
                        for p in lo..=hi {
                            let mut f: LinForm = SmallVec::from_slice(&[(p, 1)]);
                            if p == lo {
                                f.extend((a_rng[j].0..a_rng[j].1).map(|x| (x, 1)));
                            }
                            if p == hi {
                                f.extend((c_rng[j].0..c_rng[j].1).map(|x| (x, 1)));
                            }
                            forms.push(f);
                            vforms.push(SmallVec::from_slice(&[(r + p, 1)]));
                        }
                    }
                    let m = forms.len();
                    forms.extend(vforms);
                    let mut term = substitute(&self.comps[m], &forms, nv, max_deg);
                    for j in 0..s {
                        if term.is_empty() {
                            break;
                        }
                        let (lo, hi) = blocks[j];
                        for (rng, anchor, mould, empty) in [(a_rng[j], lo, b, &b_empty), (c_rng[j], hi, c, &c_empty)] {
                            let len = rng.1 - rng.0;
                            if len == 0 {
                                term = term
                                    .into_iter()
                                    .map(|(e, x)| (e, x.mul_ref(empty)))
                                    .filter(|(_, x)| !x.is_ring_zero())
                                    .collect();
                                continue;
                            }
                            let mut f: Vec<LinForm> = (rng.0..rng.1).map(|p| SmallVec::from_slice(&[(p, 1)])).collect();
                            f.extend((rng.0..rng.1).map(|p| SmallVec::from_slice(&[(r + p, 1), (r + anchor, -1)])));
                            let factor = substitute(&mould.comps[len], &f, nv, max_deg);
                            term = series_mul(&term, &factor, max_deg);
                        }
                    }
                    for (e, x) in term {
                        add_into(&mut acc, e, x);
                    }
                    if !next_split(&mut splits, &inner) {
                        break;
                    }
                }
            }
            out.comps[r] = acc;
        }
        Ok(out)
    }

    /// `gilat_B(A) = gaxit(A; B, B₋)` with `B₋ = neg ∘ anti ∘ pari(B)`.
    pub fn gilat(&self, b: &Self) -> Result<Self> {
        self.gaxit(b, &b.minus())
    }

    /// `gila(A, B) = gilat_B(A) × B`.
    pub fn gila(&self, b: &Self) -> Result<Self> {
        self.gilat(b)?.mul(b)
    }
}

// Maximal runs of set bits as inclusive `(first, last)` positions.
fn runs_of(mask: u32, r: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 0;
    while p < r {
        if mask >> p & 1 == 1 {
            let lo = p;
            while p + 1 < r && mask >> (p + 1) & 1 == 1 {
                p += 1;
            }
            out.push((lo, p));
        }
        p += 1;
    }
    out
}

fn next_split(splits: &mut [usize], limits: &[usize]) -> bool {
    for (s, &l) in splits.iter_mut().zip(limits) {
        if *s < l {
            *s += 1;
            return true;
        }
        *s = 0;
    }
    false
}

/// The `v`-mould of free symbols `⟨A | k⟩ = tag⟨k⟩`, with `A(∅) = 1`.
pub fn free_mould<C: CoeffRing>(tag: char, depth_max: usize, weight_max: u32) -> Mould<Poly<C>> {
    Mould::from_fn(depth_max, weight_max, |k| {
        if k.is_empty() {
            Poly::ring_one()
        } else {
            Poly::symbol(Symbol::new(tag, ZWord::from_letters(k)))
        }
    })
}

/// Lifts a mould into polynomials over its coefficient ring.
pub fn constant_mould<C: CoeffRing>(m: &Mould<C>) -> Mould<Poly<C>> {
    let mut out = Mould::zero(m.depth_max, m.weight_max);
    for (r, comp) in m.comps.iter().enumerate() {
        for (e, c) in comp {
            add_into(&mut out.comps[r], e.clone(), Poly::constant(c.clone()));
        }
    }
    out
}

/// `1 + Σ_{r ≥ 1} …` is invertible for `×`; returns the inverse.
pub fn mul_inverse<C: CoeffRing>(m: &Mould<C>) -> Result<Mould<C>> {
    let one = m.comps[0].get(&Exps::new()).cloned();
    if one != Some(C::ring_one()) || m.comps[0].len() != 1 {
        return Err(Error::Domain("only moulds with M(∅) = 1 are inverted".into()));
    }
    let mut rest = m.clone();
    rest.comps[0].clear();
    let neg_rest = rest.scale(&-Q::one());
    let mut out = Mould::unit(m.depth_max, m.weight_max);
    let mut power = Mould::unit(m.depth_max, m.weight_max);
    for _ in 0..m.depth_max {
        power = power.mul(&neg_rest)?;
        out = out.add(&power)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::q;

    fn sample(depth: usize, weight: u32) -> Mould<Q> {
        let mut m = Mould::zero(depth, weight);
        m.add_term(SmallVec::new(), q(1)).unwrap();
        m.add_term(SmallVec::from_slice(&[1, 2]), q(3)).unwrap();
        m.add_term(SmallVec::from_slice(&[0, 1, 1, 0]), q(-2)).unwrap();
        m.add_term(SmallVec::from_slice(&[2, 0, 0, 1]), q(5)).unwrap();
        m
    }

    #[test]
    fn compositions() {
        assert_eq!(compositions_up_to(0, 3), vec![Vec::<u8>::new()]);
        assert_eq!(compositions_up_to(2, 3).len(), 3);
        assert!(compositions_up_to(3, 2).is_empty());
    }

    #[test]
    fn involutions() {
        let m = sample(3, 8);
        assert_eq!(m.neg().neg(), m);
        assert_eq!(m.anti().anti(), m);
        assert_eq!(m.pari().pari(), m);
        assert_eq!(m.minus().minus(), m);
        assert_eq!(m.swap().swap(), m);
    }

    #[test]
    fn unit_laws() {
        let m = sample(3, 8);
        let e = Mould::unit(3, 8);
        assert_eq!(m.mul(&e).unwrap(), m);
        assert_eq!(e.mul(&m).unwrap(), m);
        assert_eq!(m.gila(&e).unwrap(), m);
        let inv = mul_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), e);
    }

    #[test]
    fn bound_mismatch_is_an_error() {
        let a = Mould::<Q>::unit(2, 5);
        let b = Mould::<Q>::unit(2, 6);
        assert!(matches!(a.mul(&b), Err(Error::Truncation(_))));
        let mut c = Mould::<Q>::zero(1, 2);
        assert!(c.add_term(SmallVec::from_slice(&[0, 2]), q(1)).is_err());
    }

    #[test]
    fn gila_in_depth_one() {
        let a = free_mould::<Q>('a', 2, 6);
        let b = free_mould::<Q>('b', 2, 6);
        let g = a.gila(&b).unwrap();
        for k in 1..=6u8 {
            let mut want = Poly::symbol(Symbol::new('a', ZWord::letter(k)));
            want.add_assign_ref(&Poly::symbol(Symbol::new('b', ZWord::letter(k))));
            assert_eq!(g.coeff(&[k]), want);
        }
    }
}

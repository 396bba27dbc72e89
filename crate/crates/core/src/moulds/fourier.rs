//! Symbolic Fourier expansions `G_k = ⟨gila(g, ζ^⧢) | k⟩`: each `q`-series
//! `g⟨n⟩` is paired with a shuffle-regularised combination of words standing
//! for a polynomial in multiple zeta values.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::One;
use serde_json::{json, Value};

use super::formula::{terms, SignConvention};
use super::mould::{constant_mould, free_mould, Mould};
use super::ring::{CoeffRing, ShuffleRing};
use crate::error::{Error, Result};
use crate::lincomb::{LinComb, Q};
use crate::products::{reg0, shuffle, Product};
use crate::word::ZWord;

/// `Σ_n g⟨n⟩ · c_n` with `c_n` in `(H^1, ⧢)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FourierExpansion {
    pub index: ZWord,
    pub terms: BTreeMap<ZWord, LinComb<ZWord>>,
}

impl FourierExpansion {
    /// The `ζ`-coefficient of `g⟨n⟩` (`n` empty for the constant term).
    pub fn coeff(&self, n: &[u8]) -> LinComb<ZWord> {
        self.terms.get(&ZWord::from_letters(n)).cloned().unwrap_or_default()
    }

    /// True when every `ζ`-coefficient is a combination of admissible words.
    pub fn admissible(&self) -> bool {
        self.terms.values().all(|c| c.all_words(ZWord::is_admissible))
    }

    pub fn to_json(&self) -> Value {
        let items: Vec<Value> = self
            .terms
            .iter()
            .map(|(g, c)| {
                json!({
                    "g_index": g.letters(),
                    "zeta_coeff": c.to_json(),
                })
            })
            .collect();
        Value::Array(items)
    }
}

fn zeta_word(w: &ZWord) -> String {
    let parts: Vec<String> = w.letters().iter().map(|k| k.to_string()).collect();
    format!("ζ({})", parts.join(","))
}

impl fmt::Display for FourierExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, c) in &self.terms {
            for (w, x) in c.iter() {
                let (sign, mag) = if x < &Q::from_integer(0.into()) { ("−", -x) } else { ("+", x.clone()) };
                if first {
                    if sign == "−" {
                        f.write_str("−")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                first = false;
                let mut factors = Vec::new();
                if !mag.is_one() {
                    factors.push(mag.to_string());
                }
                if !w.is_empty() {
                    factors.push(zeta_word(w));
                }
                if !g.is_empty() {
                    let parts: Vec<String> = g.letters().iter().map(|k| k.to_string()).collect();
                    factors.push(format!("g⟨{}⟩", parts.join(",")));
                }
                if factors.is_empty() {
                    factors.push("1".into());
                }
                f.write_str(&factors.join("·"))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `ζ^⧢(n) = reg0_⧢(z_{n_1} ⋯ z_{n_r})` as an element of the shuffle ring.
pub struct ZetaShuffle {
    memo: HashMap<Vec<u8>, ShuffleRing>,
}

impl Default for ZetaShuffle {
    fn default() -> Self {
        Self::new()
    }
}

impl ZetaShuffle {
    pub fn new() -> Self {
        ZetaShuffle { memo: HashMap::new() }
    }

    pub fn get(&mut self, n: &[u8]) -> Result<ShuffleRing> {
        if let Some(x) = self.memo.get(n) {
            return Ok(x.clone());
        }
        let w = LinComb::from_word(ZWord::from_letters(n));
        let x = ShuffleRing(reg0(&w, Product::Shuffle)?);
        self.memo.insert(n.to_vec(), x.clone());
        Ok(x)
    }
}

fn check_index(k: &[u8]) -> Result<()> {
    if k.is_empty() || k.iter().any(|&x| x < 2) {
        return Err(Error::Domain(format!(
            "Fourier expansions are computed for indices with every entry at least 2, got {k:?}"
        )));
    }
    Ok(())
}

/// The expansion of `G_k` via the closed coefficient formula for `gila`.
pub fn fourier_expansion(k: &[u8]) -> Result<FourierExpansion> {
    fourier_expansion_with(k, SignConvention::Derived)
}

pub fn fourier_expansion_with(k: &[u8], convention: SignConvention) -> Result<FourierExpansion> {
    check_index(k)?;
    let mut zeta = ZetaShuffle::new();
    let mut out: BTreeMap<ZWord, LinComb<ZWord>> = BTreeMap::new();
    for t in terms(k, false, convention) {
        let mut c = zeta.get(&t.tail)?;
        for (l, r) in &t.b_pairs {
            c = c.mul_ref(&zeta.get(l)?).mul_ref(&zeta.get(r)?);
        }
        if c.is_ring_zero() {
            continue;
        }
        let entry = out.entry(ZWord::from_letters(&t.a_index)).or_default();
        entry.add_scaled(&c.0, &Q::from_integer(t.coeff.into()));
    }
    out.retain(|_, c| !c.is_zero());
    Ok(FourierExpansion { index: ZWord::from_letters(k), terms: out })
}

/// The same expansion computed from the definition of `gila` on truncated moulds.
pub fn fourier_expansion_via_moulds(k: &[u8]) -> Result<FourierExpansion> {
    check_index(k)?;
    let depth = k.len();
    let weight: u32 = k.iter().map(|&x| u32::from(x)).sum();
    let g = free_mould::<ShuffleRing>('g', depth, weight);
    let mut zeta = ZetaShuffle::new();
    let mut err = None;
    let z: Mould<ShuffleRing> = Mould::from_fn(depth, weight, |n| {
        zeta.get(n).unwrap_or_else(|e| {
            err = Some(e);
            ShuffleRing::ring_zero()
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    let coeff = g.gila(&constant_mould(&z))?.coeff(k);
    let mut out = BTreeMap::new();
    for (mono, c) in coeff.terms() {
        let g_index = match mono.as_slice() {
            [] => ZWord::empty(),
            [(s, 1)] if s.tag == 'g' => s.index.clone(),
            _ => return Err(Error::Domain(format!("unexpected monomial {mono:?}"))),
        };
        out.insert(g_index, c.0.clone());
    }
    Ok(FourierExpansion { index: ZWord::from_letters(k), terms: out })
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        0
    } else {
        num_integer::binomial(n, k)
    }
}

fn sgn(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `b^{n_2}_{k_1,k_2} = (−1)^{n_2−k_1} C(n_2−1, k_1−1) + (−1)^{k_2} C(n_2−1, k_2−1)`.
pub fn b_coeff(n2: i64, k1: i64, k2: i64) -> i64 {
    sgn(n2 - k1) * binom(n2 - 1, k1 - 1) + sgn(k2) * binom(n2 - 1, k2 - 1)
}

fn word(ks: &[i64]) -> ZWord {
    ZWord::from_letters(&ks.iter().map(|&x| x as u8).collect::<Vec<_>>())
}

fn add(map: &mut BTreeMap<ZWord, LinComb<ZWord>>, g: ZWord, zeta: LinComb<ZWord>, c: i64) {
    if c != 0 {
        map.entry(g).or_default().add_scaled(&zeta, &Q::from_integer(c.into()));
    }
}

/// The depth-two and depth-three expansions written out in closed form.
pub fn closed_form(k: &[u8]) -> Result<FourierExpansion> {
    check_index(k)?;
    let ks: Vec<i64> = k.iter().map(|&x| i64::from(x)).collect();
    let z = |w: &[i64]| LinComb::from_word(word(w));
    let one = LinComb::from_word(ZWord::empty());
    let delta = |a: i64, b: i64| i64::from(a == b);
    let mut out = BTreeMap::new();
    match *ks.as_slice() {
        [k1] => {
            add(&mut out, word(&[k1]), one, 1);
            add(&mut out, ZWord::empty(), z(&[k1]), 1);
        }
        [k1, k2] => {
            add(&mut out, word(&[k1, k2]), one, 1);
            add(&mut out, ZWord::empty(), z(&[k1, k2]), 1);
            let total = k1 + k2;
            for n2 in 2..=total - 2 {
                let n1 = total - n2;
                add(&mut out, word(&[n1]), z(&[n2]), delta(n1, k1) + b_coeff(n2, k1, k2));
            }
        }
        [k1, k2, k3] => {
            add(&mut out, word(&[k1, k2, k3]), one.clone(), 1);
            add(&mut out, word(&[k1, k2]), z(&[k3]), 1);
            add(&mut out, word(&[k1]), z(&[k2, k3]), 1);
            add(&mut out, ZWord::empty(), z(&[k1, k2, k3]), 1);
            let total = k1 + k2 + k3;
            for n1 in 2..=total - 4 {
                for n2 in 2..=total - n1 - 2 {
                    let n3 = total - n1 - n2;
                    let c = delta(n1, k1) * b_coeff(n3, k2, k3) + delta(n2, k3) * b_coeff(n3, k1, k2);
                    add(&mut out, word(&[n1, n2]), z(&[n3]), c);
                    let c = (sgn(k3 - n1) * binom(n2 - 1, k1 - 1) + sgn(k2 + k3) * binom(n2 - 1, k3 - 1))
                        * binom(n3 - 1, k2 - 1);
                    add(&mut out, word(&[n1]), z(&[n2, n3]), c);
                    let c = sgn(k1 + k3 - n2) * binom(n2 - 1, k1 - 1) * binom(n3 - 1, k3 - 1)
                        + delta(n3, k3) * b_coeff(n2, k1, k2);
                    add(&mut out, word(&[n1]), shuffle(&z(&[n2]), &z(&[n3])), c);
                }
            }
        }
        _ => return Err(Error::Domain(format!("closed forms are written out for depth at most three, got {k:?}"))),
    }
    out.retain(|_, c| !c.is_zero());
    Ok(FourierExpansion { index: ZWord::from_letters(k), terms: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::{lc, zw};

    #[test]
    fn depth_one() {
        let f = fourier_expansion(&[5]).unwrap();
        assert_eq!(f.terms.len(), 2);
        assert_eq!(f.coeff(&[]), zw(&[5]));
        assert_eq!(f.coeff(&[5]), zw(&[]));
    }

    #[test]
    fn four_two() {
        let f = fourier_expansion(&[4, 2]).unwrap();
        assert_eq!(f.terms.len(), 5);
        assert_eq!(f.coeff(&[]), zw(&[4, 2]));
        assert_eq!(f.coeff(&[4]), lc(&[(2, &[2])]));
        assert_eq!(f.coeff(&[3]), lc(&[(2, &[3])]));
        assert_eq!(f.coeff(&[2]), lc(&[(4, &[4])]));
        assert_eq!(f.coeff(&[4, 2]), zw(&[]));
        assert_eq!(f.to_string(), "ζ(4,2) + 4·ζ(4)·g⟨2⟩ + 2·ζ(3)·g⟨3⟩ + 2·ζ(2)·g⟨4⟩ + g⟨4,2⟩");
    }

    #[test]
    fn rejects_non_admissible() {
        assert!(fourier_expansion(&[2, 1]).is_err());
        assert!(fourier_expansion(&[]).is_err());
    }
}

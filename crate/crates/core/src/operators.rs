//! The operators `W`, `φ`, `R`, `δ` (on `H^1`), `D` (on balanced words) and
//! `der = −𝒟∘φ`.

use std::sync::{Arc, OnceLock};

use dashmap::DashMap;

use crate::drop1::drop1;
use crate::error::Result;
use crate::lincomb::{q, q_frac, LinComb, Word};
use crate::parallel;
use crate::products::{ds, harmonic};
use crate::word::{BWord, Xy, XyWord, ZWord};

/// Scales each word by its weight.
pub fn weight_op<W: Word>(w: &LinComb<W>) -> LinComb<W> {
    LinComb::from_terms(w.iter().map(|(t, c)| (t.clone(), c * q(i64::from(t.weight())))))
}

/// `φ(w) = w ∗ z_2 − w ⧢ z_2`.
pub fn phi(w: &LinComb<ZWord>) -> LinComb<ZWord> {
    ds(w, &LinComb::from_word(ZWord::letter(2)))
}

/// `R(u, v) = φ(u ∗ v) − φ(u) ∗ v − u ∗ φ(v)`.
pub fn r_bracket(u: &LinComb<ZWord>, v: &LinComb<ZWord>) -> LinComb<ZWord> {
    let uv = harmonic(u, v);
    let mut out = phi(&uv);
    out -= &harmonic(&phi(u), v);
    out -= &harmonic(u, &phi(v));
    out
}

fn delta_word(w: &ZWord) -> LinComb<ZWord> {
    use Xy::{X, Y};
    let xy = w.to_xy();
    let s = xy.letters();
    let mut out: LinComb<XyWord> = LinComb::zero();
    if s.len() >= 2 {
        let rest = XyWord::new(&s[2..]);
        match (s[0], s[1]) {
            (Y, X) => out.add_term(rest, q_frac(1, 2)),
            (X, Y) => out.add_term(rest, q_frac(-1, 2)),
            (Y, Y) => out.add_term(rest, q_frac(1, 4)),
            _ => {}
        }
    }
    for i in 0..s.len().saturating_sub(2) {
        let window = &s[i..i + 3];
        let c = match window {
            [Y, Y, X] => q_frac(1, 2),
            [X, Y, Y] => q_frac(-1, 2),
            _ => continue,
        };
        let mut v = XyWord::new(&s[..i]);
        v.0.push(Y);
        v.0.extend_from_slice(&s[i + 3..]);
        out.add_term(v, c);
    }
    out.map_linear(|v| LinComb::from_word(v.to_zword().expect("δ keeps words ending in y")))
}

/// `δ` restricted to `H^1`, in the `{x, y}` description.
pub fn delta(w: &LinComb<ZWord>) -> LinComb<ZWord> {
    w.map_linear(delta_word)
}

fn d_bim_word(w: &BWord) -> LinComb<BWord> {
    let runs = w.runs();
    let mut out = LinComb::zero();
    for i in 0..runs.len() {
        for j in i..runs.len() {
            let (k, _) = runs[i];
            let (_, m) = runs[j];
            let mut new = runs.to_vec();
            new[i].0 += 1;
            new[j].1 += 1;
            let c = i64::from(k) * (i64::from(m) + 1);
            out.add_term(BWord::from_runs(&new).expect("raised word stays valid"), q(c));
        }
    }
    out
}

/// `D` on `Q<B>^0`.
pub fn d_bim(w: &LinComb<BWord>) -> LinComb<BWord> {
    w.map_linear(d_bim_word)
}

/// `τ` applied term-wise.
pub fn tau(w: &LinComb<BWord>) -> LinComb<BWord> {
    LinComb::from_terms(w.iter().map(|(t, c)| (t.tau(), c.clone())))
}

/// Views an element of `H^1` as a combination of balanced words.
pub fn to_bwords(w: &LinComb<ZWord>) -> LinComb<BWord> {
    LinComb::from_terms(w.iter().map(|(t, c)| (t.to_bword(), c.clone())))
}

fn der_cache() -> &'static DashMap<ZWord, Arc<LinComb<ZWord>>> {
    static CACHE: OnceLock<DashMap<ZWord, Arc<LinComb<ZWord>>>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// `der` of a single admissible word, memoised.
pub fn der_word(w: &ZWord) -> Result<Arc<LinComb<ZWord>>> {
    if let Some(hit) = der_cache().get(w) {
        return Ok(Arc::clone(hit.value()));
    }
    let d = Arc::new(-drop1(&phi(&LinComb::from_word(w.clone())))?);
    der_cache().insert(w.clone(), Arc::clone(&d));
    Ok(d)
}

/// `der = −𝒟 ∘ φ` on `H^0`.
pub fn der(w: &LinComb<ZWord>) -> Result<LinComb<ZWord>> {
    let words: Vec<&ZWord> = w.words().collect();
    let parts = parallel::map(&words, |t| der_word(t));
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(LinComb::sum_scaled(parts.iter().zip(w.iter()).map(|(d, (_, c))| (d.as_ref(), c))))
}

/// `der^n(w)`.
pub fn der_pow(w: &LinComb<ZWord>, n: usize) -> Result<LinComb<ZWord>> {
    let mut out = w.clone();
    for _ in 0..n {
        out = der(&out)?;
    }
    Ok(out)
}

/// `[δ, φ](w) = δ(φ(w)) − φ(δ(w))`.
pub fn delta_phi_commutator(w: &LinComb<ZWord>) -> LinComb<ZWord> {
    delta(&phi(w)) - phi(&delta(w))
}

/// `[δ, der](w)` for `w ∈ H^{≥2}`.
pub fn delta_der_commutator(w: &LinComb<ZWord>) -> Result<LinComb<ZWord>> {
    Ok(delta(&der(w)?) - der(&delta(w))?)
}

/// `der(u ∗ v) − der(u) ∗ v − u ∗ der(v)`.
pub fn der_defect(u: &LinComb<ZWord>, v: &LinComb<ZWord>) -> Result<LinComb<ZWord>> {
    let mut out = der(&harmonic(u, v))?;
    out -= &harmonic(&der(u)?, v);
    out -= &harmonic(u, &der(v)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::{lc, zw};
    use crate::Q;

    fn half(n: i64) -> Q {
        q_frac(n, 2)
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_op(&zw(&[3, 2])), lc(&[(5, &[3, 2])]));
        assert!(weight_op(&zw(&[])).is_zero());
        let b = BWord::from_runs(&[(2, 1)]).unwrap();
        assert_eq!(weight_op(&LinComb::from_word(b.clone())), LinComb::term(b, q(3)));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&zw(&[2])), lc(&[(1, &[4]), (-4, &[3, 1])]));
        assert_eq!(phi(&zw(&[1])), lc(&[(1, &[3]), (-1, &[2, 1])]));
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_bracket(&zw(&[2]), &zw(&[2])), lc(&[(6, &[3, 3]), (-3, &[4, 2]), (-1, &[6])]));
        assert_eq!(r_bracket(&zw(&[3]), &zw(&[2])), lc(&[(4, &[3, 4]), (3, &[4, 3]), (-2, &[5, 2]), (-1, &[7])]));
        let (u, v) = (zw(&[4]), zw(&[2, 2]));
        assert_eq!(r_bracket(&u, &v), r_bracket(&v, &u));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&zw(&[2, 2])), LinComb::term(ZWord::letter(2), half(-1)));
        assert_eq!(delta(&zw(&[1, 1])), LinComb::term(ZWord::empty(), q_frac(1, 4)));
        assert_eq!(delta(&zw(&[2, 1])), lc(&[(-1, &[1])]));
        assert!(delta(&zw(&[3, 2])).is_zero());
    }

    #[test]
    fn d_bim_examples() {
        let b2 = LinComb::from_word(BWord::from_runs(&[(2, 0)]).unwrap());
        assert_eq!(d_bim(&b2), LinComb::term(BWord::from_runs(&[(3, 1)]).unwrap(), q(2)));
        let w = LinComb::from_word(BWord::from_runs(&[(3, 2)]).unwrap());
        assert_eq!(d_bim(&tau(&w)), tau(&d_bim(&w)));
        assert_eq!(d_bim(&w), LinComb::term(BWord::from_runs(&[(4, 3)]).unwrap(), q(9)));
    }

    #[test]
    fn der_examples() {
        assert_eq!(der(&zw(&[2])).unwrap(), lc(&[(3, &[4]), (-4, &[2, 2])]));
    }
}

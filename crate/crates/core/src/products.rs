//! The harmonic and shuffle products on `H^1`, the balanced harmonic product,
//! the double shuffle defect `ds`, and the regularisations `reg0`.

use std::collections::HashMap;
use std::hash::Hash;

use num_traits::One;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lincomb::{q, LinComb, Q};
use crate::parallel;
use crate::word::{BWord, Xy, XyWord, ZWord};

/// Which of the two products on `H^1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Product {
    Harmonic,
    Shuffle,
}

type Buf<L> = SmallVec<[L; 32]>;

/// Word-level quasi-shuffle. `merge` combines two letters into a third when they
/// may be contracted; returning `None` gives the plain shuffle.
///
/// Uses the last-letter recursion `ua ⋆ vb = (u ⋆ vb)a + (ua ⋆ v)b + (u ⋆ v)[a+b]`,
/// which defines the same product as the first-letter one.
pub(crate) fn quasi_shuffle<L, F>(u: &[L], v: &[L], merge: F) -> Vec<(Buf<L>, u64)>
where
    L: Copy + Eq + Hash,
    F: Fn(L, L) -> Option<L>,
{
    let m = v.len();
    // prev[j] = u[..i-1] ⋆ v[..j], cur[j] = u[..i] ⋆ v[..j]
    let mut prev: Vec<HashMap<Buf<L>, u64>> =
        (0..=m).map(|j| HashMap::from([(Buf::from_slice(&v[..j]), 1u64)])).collect();
    for i in 1..=u.len() {
        let a = u[i - 1];
        let mut cur: Vec<HashMap<Buf<L>, u64>> = Vec::with_capacity(m + 1);
        cur.push(HashMap::from([(Buf::from_slice(&u[..i]), 1u64)]));
        for j in 1..=m {
            let b = v[j - 1];
            let mut cell: HashMap<Buf<L>, u64> = HashMap::new();
            for (w, n) in &prev[j] {
                let mut w = w.clone();
                w.push(a);
                *cell.entry(w).or_insert(0) += n;
            }
            for (w, n) in &cur[j - 1] {
                let mut w = w.clone();
                w.push(b);
                *cell.entry(w).or_insert(0) += n;
            }
            if let Some(c) = merge(a, b) {
                for (w, n) in &prev[j - 1] {
                    let mut w = w.clone();
                    w.push(c);
                    *cell.entry(w).or_insert(0) += n;
                }
            }
            cur.push(cell);
        }
        prev = cur;
    }
    prev.pop().expect("row has m+1 cells").into_iter().collect()
}

fn merge_z(a: u8, b: u8) -> Option<u8> {
    Some(a.checked_add(b).expect("letter overflow in harmonic product"))
}

/// `u ∗ v` on words, as multiplicities.
pub fn harmonic_counts(u: &ZWord, v: &ZWord) -> Vec<(ZWord, u64)> {
    if u.is_empty() {
        return vec![(v.clone(), 1)];
    }
    if v.is_empty() {
        return vec![(u.clone(), 1)];
    }
    quasi_shuffle(u.letters(), v.letters(), merge_z)
        .into_iter()
        .map(|(w, n)| (ZWord::from_smallvec(w.into_iter().collect()), n))
        .collect()
}

/// `u ∗ v` on words.
pub fn harmonic_words(u: &ZWord, v: &ZWord) -> LinComb<ZWord> {
    LinComb::from_counts(harmonic_counts(u, v))
}

/// `u ⧢ v` on `{x, y}`-words.
pub fn shuffle_xy(u: &XyWord, v: &XyWord) -> LinComb<XyWord> {
    let raw = quasi_shuffle(u.letters(), v.letters(), |_: Xy, _: Xy| None);
    LinComb::from_counts(raw.into_iter().map(|(w, n)| (XyWord(w), n)))
}

/// `u ⧢ v` on words of `H^1`, computed in the `{x, y}` encoding.
pub fn shuffle_words(u: &ZWord, v: &ZWord) -> LinComb<ZWord> {
    if u.is_empty() {
        return LinComb::from_word(v.clone());
    }
    if v.is_empty() {
        return LinComb::from_word(u.clone());
    }
    let (ux, vx) = (u.to_xy(), v.to_xy());
    let raw = quasi_shuffle(ux.letters(), vx.letters(), |_: Xy, _: Xy| None);
    // both factors end in y, so every shuffle does too
    LinComb::from_counts(raw.into_iter().map(|(w, n)| {
        let w = XyWord(w).to_zword().expect("shuffle of H^1 words stays in H^1");
        (w, n)
    }))
}

pub fn product_words(u: &ZWord, v: &ZWord, product: Product) -> LinComb<ZWord> {
    match product {
        Product::Harmonic => harmonic_words(u, v),
        Product::Shuffle => shuffle_words(u, v),
    }
}

/// Pairs of terms above this count are spread over the thread pool.
const PARALLEL_PAIRS: usize = 64;

fn bilinear_product(u: &LinComb<ZWord>, v: &LinComb<ZWord>, product: Product) -> LinComb<ZWord> {
    let pairs: Vec<(&ZWord, &Q, &ZWord, &Q)> =
        u.iter().flat_map(|(a, ca)| v.iter().map(move |(b, cb)| (a, ca, b, cb))).collect();
    let words = if pairs.len() < PARALLEL_PAIRS {
        pairs.iter().map(|(a, _, b, _)| product_words(a, b, product)).collect()
    } else {
        parallel::map(&pairs, |(a, _, b, _)| product_words(a, b, product))
    };
    let coeffs: Vec<Q> = pairs.iter().map(|(_, ca, _, cb)| *ca * *cb).collect();
    LinComb::sum_scaled(words.iter().zip(coeffs.iter()))
}

/// Bilinear harmonic product on `H^1`.
pub fn harmonic(u: &LinComb<ZWord>, v: &LinComb<ZWord>) -> LinComb<ZWord> {
    bilinear_product(u, v, Product::Harmonic)
}

/// Bilinear shuffle product on `H^1`.
pub fn shuffle(u: &LinComb<ZWord>, v: &LinComb<ZWord>) -> LinComb<ZWord> {
    bilinear_product(u, v, Product::Shuffle)
}

pub fn product(u: &LinComb<ZWord>, v: &LinComb<ZWord>, which: Product) -> LinComb<ZWord> {
    bilinear_product(u, v, which)
}

fn merge_b(i: u8, j: u8) -> Option<u8> {
    (i > 0 && j > 0).then(|| i.checked_add(j).expect("letter overflow in balanced product"))
}

/// `u ∗_b v` on balanced words.
pub fn harmonic_b_words(u: &BWord, v: &BWord) -> LinComb<BWord> {
    let raw = quasi_shuffle(&u.flat(), &v.flat(), merge_b);
    LinComb::from_counts(raw.into_iter().map(|(w, n)| {
        // a product of words starting with nonzero letters starts with one too
        (BWord::from_flat(&w).expect("product stays in Q<B>^0"), n)
    }))
}

/// `u ∗_b v` on flat letter sequences, rejecting inputs that start with `b_0`.
pub fn harmonic_b_flat(u: &[u8], v: &[u8]) -> Result<LinComb<BWord>> {
    let u = BWord::from_flat(u).map_err(|_| Error::Domain("left factor starts with b_0".into()))?;
    let v = BWord::from_flat(v).map_err(|_| Error::Domain("right factor starts with b_0".into()))?;
    Ok(harmonic_b_words(&u, &v))
}

pub fn harmonic_b(u: &LinComb<BWord>, v: &LinComb<BWord>) -> LinComb<BWord> {
    u.bilinear(v, harmonic_b_words)
}

/// `ds(u, v) = u ∗ v − u ⧢ v`.
pub fn ds(u: &LinComb<ZWord>, v: &LinComb<ZWord>) -> LinComb<ZWord> {
    let (h, s) = parallel::join(|| harmonic(u, v), || shuffle(u, v));
    h - s
}

pub fn ds_words(u: &ZWord, v: &ZWord) -> LinComb<ZWord> {
    harmonic_words(u, v) - shuffle_words(u, v)
}

const REG0_FUEL: u64 = 50_000_000;

/// The regularisation `H^1 → H^0` for `product`: the algebra homomorphism that is
/// the identity on `H^0` and sends `z_1` to zero.
pub fn reg0(w: &LinComb<ZWord>, product: Product) -> Result<LinComb<ZWord>> {
    let mut memo = HashMap::new();
    let mut fuel = REG0_FUEL;
    w.try_map_linear(|word| reg0_rec(word, product, &mut memo, &mut fuel))
}

pub fn reg0_word(w: &ZWord, product: Product) -> Result<LinComb<ZWord>> {
    let mut memo = HashMap::new();
    let mut fuel = REG0_FUEL;
    reg0_rec(w, product, &mut memo, &mut fuel)
}

// For w with n leading z_1's, z_1 • w[1..] contains w with multiplicity n and
// otherwise only words with fewer leading z_1's, and reg0 kills z_1 • anything.
fn reg0_rec(
    w: &ZWord,
    product: Product,
    memo: &mut HashMap<ZWord, LinComb<ZWord>>,
    fuel: &mut u64,
) -> Result<LinComb<ZWord>> {
    if w.is_admissible() {
        return Ok(LinComb::from_word(w.clone()));
    }
    if let Some(hit) = memo.get(w) {
        return Ok(hit.clone());
    }
    *fuel = fuel.checked_sub(1).ok_or_else(|| Error::Fuel(format!("regularising {w}")))?;
    let leading = w.letters().iter().take_while(|&&k| k == 1).count();
    if w.depth() == 1 {
        return Ok(LinComb::zero());
    }
    let rest = w.slice(1, w.depth());
    let expanded = product_words(&ZWord::letter(1), &rest, product);
    debug_assert_eq!(expanded.coeff(w), q(leading as i64));
    let mut out = LinComb::zero();
    for (t, c) in expanded.iter() {
        if t == w {
            continue;
        }
        let leading_t = t.letters().iter().take_while(|&&k| k == 1).count();
        if leading_t >= leading {
            return Err(Error::Fuel(format!("regularising {w}: term {t} does not reduce leading z_1's")));
        }
        let sub = reg0_rec(t, product, memo, fuel)?;
        out.add_scaled(&sub, c);
    }
    let factor = -Q::one() / q(leading as i64);
    let out = out.scale(&factor);
    debug_assert!(out.all_words(ZWord::is_admissible));
    memo.insert(w.clone(), out.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::{lc, zw};

    fn b(runs: &[(u8, u8)]) -> LinComb<BWord> {
        LinComb::from_word(BWord::from_runs(runs).unwrap())
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(&zw(&[2]), &zw(&[3])), lc(&[(1, &[2, 3]), (1, &[3, 2]), (1, &[5])]));
        assert_eq!(harmonic(&zw(&[2]), &zw(&[2])), lc(&[(2, &[2, 2]), (1, &[4])]));
        assert_eq!(harmonic(&zw(&[]), &zw(&[4, 2])), zw(&[4, 2]));
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(shuffle(&zw(&[2]), &zw(&[2])), lc(&[(2, &[2, 2]), (4, &[3, 1])]));
        assert_eq!(shuffle(&zw(&[1]), &zw(&[2])), lc(&[(1, &[1, 2]), (2, &[2, 1])]));
    }

    #[test]
    fn shuffle_power_of_z2_closed_form() {
        for r in 0..=5usize {
            let lhs = shuffle(&LinComb::from_word(ZWord::power(2, r)), &zw(&[2]));
            let mut rhs = LinComb::term(ZWord::power(2, r + 1), q(r as i64 + 1));
            for i in 1..=r {
                for j in i..=r {
                    let w = ZWord::power(2, i - 1)
                        .concat(&ZWord::letter(3))
                        .concat(&ZWord::power(2, j - i))
                        .concat(&ZWord::letter(1))
                        .concat(&ZWord::power(2, r - j));
                    rhs.add_term(w, q(4));
                }
            }
            assert_eq!(lhs, rhs, "r = {r}");
        }
    }

    #[test]
    fn balanced_product_examples() {
        let lhs = harmonic_b(&b(&[(2, 0)]), &b(&[(1, 1)]));
        let w = |flat: &[u8]| BWord::from_flat(flat).unwrap();
        let expected = LinComb::from_terms(vec![
            (w(&[2, 1, 0]), q(1)),
            (w(&[1, 2, 0]), q(1)),
            (w(&[1, 0, 2]), q(1)),
            (w(&[3, 0]), q(1)),
        ]);
        assert_eq!(lhs, expected);
        assert!(harmonic_b_flat(&[0, 2], &[2]).is_err());
        assert_eq!(harmonic_b(&b(&[]), &b(&[(4, 2)])), b(&[(4, 2)]));
    }

    #[test]
    fn balanced_restricts_to_harmonic() {
        let lhs = harmonic_b(&b(&[(2, 0)]), &b(&[(3, 0)]));
        let rhs = harmonic(&zw(&[2]), &zw(&[3])).map_linear(|w| LinComb::from_word(w.to_bword()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn ds_examples() {
        assert_eq!(ds(&zw(&[2]), &zw(&[2])), lc(&[(1, &[4]), (-4, &[3, 1])]));
        assert!(ds(&zw(&[3, 2]), &zw(&[])).is_zero());
    }

    #[test]
    fn reg0_examples() {
        assert_eq!(reg0(&zw(&[1, 2]), Product::Harmonic).unwrap(), lc(&[(-1, &[2, 1]), (-1, &[3])]));
        assert_eq!(reg0(&zw(&[1, 2]), Product::Shuffle).unwrap(), lc(&[(-2, &[2, 1])]));
        assert_eq!(reg0(&zw(&[3, 2]), Product::Harmonic).unwrap(), zw(&[3, 2]));
        assert!(reg0(&zw(&[1]), Product::Shuffle).unwrap().is_zero());
        assert!(reg0(&zw(&[1, 1]), Product::Shuffle).unwrap().is_zero());
        assert_eq!(
            reg0(&zw(&[1, 1]), Product::Harmonic).unwrap(),
            LinComb::term(ZWord::letter(2), crate::lincomb::q_frac(-1, 2))
        );
    }

    #[test]
    fn unit_laws() {
        let w = ZWord::new(&[3, 1, 2]).unwrap();
        let one = ZWord::empty();
        assert_eq!(harmonic_words(&one, &w), LinComb::from_word(w.clone()));
        assert_eq!(shuffle_words(&w, &one), LinComb::from_word(w.clone()));
    }
}

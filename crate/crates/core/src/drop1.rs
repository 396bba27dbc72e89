//! The Drop1 operator `H^0 → H^{≥2}`, computed by recursion on the run lengths
//! `(c_1, …, c_{2s})` of `w = x^{c_1} y^{c_2} ⋯ x^{c_{2s-1}} y^{c_{2s}}`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lincomb::{LinComb, Q};
use crate::word::ZWord;

type Runs = SmallVec<[u8; 32]>;

fn cache() -> &'static DashMap<Runs, Arc<LinComb<ZWord>>> {
    static CACHE: OnceLock<DashMap<Runs, Arc<LinComb<ZWord>>>> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// Number of run-length tuples currently memoised.
pub fn cache_len() -> usize {
    cache().len()
}

pub fn clear_cache() {
    cache().clear();
}

/// `𝒟` on a linear combination of admissible words.
pub fn drop1(w: &LinComb<ZWord>) -> Result<LinComb<ZWord>> {
    w.try_map_linear(drop1_word)
}

pub fn drop1_word(w: &ZWord) -> Result<LinComb<ZWord>> {
    if !w.is_admissible() {
        return Err(Error::Domain(format!("Drop1 is defined on H^0, got {w}")));
    }
    if w.is_empty() {
        return Ok(LinComb::from_word(ZWord::empty()));
    }
    let runs = w.to_xy().run_lengths()?;
    let out = frak_d(&runs)?;
    if let Some(bad) = out.words().find(|t| !t.is_ge2()) {
        return Err(Error::Domain(format!("Drop1 of {w} produced {bad}, which is not in H^{{>=2}}")));
    }
    Ok(out.as_ref().clone())
}

// Which way a recursive result is prefixed: x^n in front (raising the first
// letter by n) or x^{n-1}y in front (prepending z_n).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Prefix {
    Raise(u8),
    Prepend(u8),
}

/// `𝔇(c)` for an alternating run-length tuple of even length.
pub fn frak_d(c: &[u8]) -> Result<Arc<LinComb<ZWord>>> {
    if c.is_empty() {
        return Ok(Arc::new(LinComb::from_word(ZWord::empty())));
    }
    if !c.len().is_multiple_of(2) || c.contains(&0) {
        return Err(Error::Domain(format!("run-length tuple {c:?} is not alternating")));
    }
    if let Some(hit) = cache().get(c) {
        return Ok(Arc::clone(hit.value()));
    }

    let mut grouped: HashMap<(Runs, Prefix), i64> = HashMap::new();
    let len = c.len();
    let big: Vec<usize> = (0..len).filter(|&i| c[i] > 1).collect();

    // 0-based index i corresponds to position i+1. Even-odd pairs {2r, 2r+1}
    // are 0-based (2r-1, 2r) for r in [s-1]; odd-even pairs {2r-1, 2r} are
    // 0-based (2r-2, 2r-1) for r in [s].
    let even_odd: Vec<(usize, usize)> = (1..len / 2).map(|r| (2 * r - 1, 2 * r)).collect();
    let odd_even: Vec<(usize, usize)> = (1..=len / 2).map(|r| (2 * r - 2, 2 * r - 1)).collect();

    for (pairs, third) in [(&even_odd, false), (&odd_even, true)] {
        let a_pairs: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(i, j)| c[i] == 1 && c[j] == 1).collect();
        for a_mask in 0u64..(1u64 << a_pairs.len()) {
            let mut removed = vec![false; len];
            let mut size_a = 0usize;
            for (bit, &(i, j)) in a_pairs.iter().enumerate() {
                if a_mask >> bit & 1 == 1 {
                    removed[i] = true;
                    removed[j] = true;
                    size_a += 2;
                }
            }
            'b: for b_mask in 0u64..(1u64 << big.len()) {
                let mut in_b = vec![false; len];
                let mut size_b = 0usize;
                for (bit, &i) in big.iter().enumerate() {
                    if b_mask >> bit & 1 == 1 {
                        in_b[i] = true;
                        size_b += 1;
                    }
                }
                for &(i, j) in pairs.iter() {
                    if in_b[i] && in_b[j] {
                        continue 'b;
                    }
                }
                let n = size_a + size_b;
                let min = if third { 2 } else { 1 };
                if n < min {
                    continue;
                }
                let rest: Runs = (0..len).filter(|&i| !removed[i]).map(|i| c[i] - u8::from(in_b[i])).collect();
                debug_assert!(rest.len().is_multiple_of(2) && !rest.contains(&0));
                let n8 = u8::try_from(n).expect("weight fits in u8");
                let sign: i64 = if third {
                    if size_b.is_multiple_of(2) {
                        1
                    } else {
                        -1
                    }
                } else if size_b % 2 == 1 {
                    1
                } else {
                    -1
                };
                if third {
                    *grouped.entry((rest, Prefix::Prepend(n8))).or_insert(0) += sign;
                } else {
                    *grouped.entry((rest.clone(), Prefix::Raise(n8))).or_insert(0) += sign;
                    if n >= 2 {
                        *grouped.entry((rest, Prefix::Prepend(n8))).or_insert(0) += sign;
                    }
                }
            }
        }
    }

    let mut out = LinComb::zero();
    for ((rest, prefix), coeff) in grouped {
        if coeff == 0 {
            continue;
        }
        let sub = frak_d(&rest)?;
        let coeff = Q::from_integer(coeff.into());
        for (t, d) in sub.iter() {
            let word = match prefix {
                Prefix::Raise(n) => {
                    if t.is_empty() {
                        return Err(Error::Domain(format!("Drop1 recursion on {c:?} would leave a bare power of x")));
                    }
                    t.raise_first(n)
                }
                Prefix::Prepend(n) => t.prepend(n),
            };
            out.add_term(word, d * &coeff);
        }
    }
    let out = Arc::new(out);
    cache().insert(Runs::from_slice(c), Arc::clone(&out));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::{lc, zw};

    #[test]
    fn identity_on_ge2() {
        for w in [&[2u32][..], &[3], &[3, 2], &[2, 2, 4], &[5, 2, 3]] {
            assert_eq!(drop1(&zw(w)).unwrap(), zw(w), "{w:?}");
        }
        assert_eq!(drop1(&zw(&[])).unwrap(), zw(&[]));
    }

    #[test]
    fn small_values() {
        assert_eq!(drop1(&zw(&[2, 1])).unwrap(), zw(&[3]));
        assert_eq!(drop1(&zw(&[3, 1])).unwrap(), lc(&[(1, &[4]), (-1, &[2, 2])]));
        assert_eq!(drop1(&zw(&[2, 1, 3])).unwrap(), lc(&[(2, &[3, 3]), (1, &[2, 2, 2])]));
    }

    #[test]
    fn rejects_non_admissible() {
        assert!(drop1(&zw(&[1, 2])).is_err());
        assert!(frak_d(&[1, 2, 3]).is_err());
    }
}

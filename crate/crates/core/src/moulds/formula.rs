//! Closed coefficient formulas for `gilat` and `gila` of `v`-moulds, the
//! Goncharov coproduct, and convolution of linear maps on `H^1`.

use std::fmt;
use std::str::FromStr;

use num_integer::binomial;

use super::ring::{CoeffRing, ShuffleRing};
use crate::error::{Error, Result};
use crate::lincomb::{LinComb, Tensor, TensorKey, Word, Q};
use crate::products::shuffle;
use crate::word::ZWord;

/// Sign exponent used in the closed formulas, added to `k_{t_{j-1};t_j} + k_{q_j}`.
///
/// `Derived` adds `n_{t_{j-1}+1} + … + n_{q_j - 1}`, which is what the
/// definition via `gaxit` produces. The other two add
/// `n_{q_{j-1}+1} + … + n_{q_j}` and `n_{q_{j-1}+1} + … + n_{q_j-1}` (with
/// `q_0 = 0`) and are kept for comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum SignConvention {
    #[default]
    Derived,
    Literal,
    LiteralOpen,
}

impl SignConvention {
    pub const ALL: [SignConvention; 3] =
        [SignConvention::Derived, SignConvention::Literal, SignConvention::LiteralOpen];

    pub fn name(self) -> &'static str {
        match self {
            SignConvention::Derived => "derived",
            SignConvention::Literal => "literal",
            SignConvention::LiteralOpen => "literal-open",
        }
    }
}

impl FromStr for SignConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignConvention::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown sign convention `{s}`")))
    }
}

/// One block `t_{j-1} < … ≤ q_j ≤ … ≤ t_j` of a term in the closed formulas,
/// with 0-based positions.
#[derive(Clone, Debug)]
struct Block {
    start: usize,
    q: usize,
    end: usize,
}

/// A single term: the new indices `n` on the covered positions and the
/// accumulated sign and binomial weight.
#[derive(Clone, Debug)]
pub struct Term {
    /// Indices of `A`: `(n_{q_1}, …, n_{q_s})`.
    pub a_index: Vec<u8>,
    /// Pairs `(n_{t_{j-1}+1} … n_{q_j-1}, n_{t_j} … n_{q_j+1})` for each block.
    pub b_pairs: Vec<(Vec<u8>, Vec<u8>)>,
    /// The untouched tail `(k_{t_s+1}, …, k_r)`.
    pub tail: Vec<u8>,
    pub coeff: i64,
}

fn block_choices(start: usize, r: usize, full: bool) -> Vec<Vec<Block>> {
    let mut out = Vec::new();
    if !full || start == r {
        out.push(Vec::new());
    }
    for q in start..r {
        for end in q..r {
            for mut rest in block_choices(end + 1, r, full) {
                rest.insert(0, Block { start, q, end });
                out.push(rest);
            }
        }
    }
    out
}

// Assignments of n on a block: n_p ≥ k_p off q, n_q ≥ 1, same total.
fn block_indices(k: &[u8], b: &Block) -> Vec<(Vec<u8>, i64)> {
    let others: Vec<usize> = (b.start..=b.end).filter(|&p| p != b.q).collect();
    let budget = u32::from(k[b.q]) - 1;
    let mut out = Vec::new();
    let mut excess = vec![0u32; others.len()];
    loop {
        let used: u32 = excess.iter().sum();
        if used <= budget {
            let mut n: Vec<u8> = k[b.start..=b.end].to_vec();
            let mut binom = 1i64;
            for (i, &p) in others.iter().enumerate() {
                let np = u32::from(k[p]) + excess[i];
                binom *= binomial(i64::from(np) - 1, i64::from(k[p]) - 1);
                n[p - b.start] = np as u8;
            }
            n[b.q - b.start] = (u32::from(k[b.q]) - used) as u8;
            out.push((n, binom));
        }
        // Odometer over excess vectors with total ≤ budget.
        let mut i = 0;
        loop {
            if i == excess.len() {
                return out;
            }
            excess[i] += 1;
            if excess.iter().sum::<u32>() <= budget {
                break;
            }
            excess[i] = 0;
            i += 1;
        }
    }
}

/// Every term of the closed formula for `⟨gila(A, B) | k⟩` (`full = false`)
/// or `⟨gilat_B(A) | k⟩` (`full = true`, where the blocks cover `k`).
pub fn terms(k: &[u8], full: bool, convention: SignConvention) -> Vec<Term> {
    let r = k.len();
    let mut out = Vec::new();
    for blocks in block_choices(0, r, full) {
        let tail_start = blocks.last().map_or(0, |b| b.end + 1);
        let mut partial: Vec<(Vec<u8>, i64)> = vec![(Vec::new(), 1)];
        for b in &blocks {
            let choices = block_indices(k, b);
            let mut next = Vec::with_capacity(partial.len() * choices.len());
            for (n, c) in &partial {
                for (m, d) in &choices {
                    let mut n2 = n.clone();
                    n2.extend_from_slice(m);
                    next.push((n2, c * d));
                }
            }
            partial = next;
        }
        for (n, binom) in partial {
            // n is indexed by position for positions < tail_start.
            let mut a_index = Vec::with_capacity(blocks.len());
            let mut b_pairs = Vec::with_capacity(blocks.len());
            let mut sign_exp: u32 = 0;
            let mut prev_q: Option<usize> = None;
            for b in &blocks {
                let kb: u32 = k[b.start..=b.end].iter().map(|&x| u32::from(x)).sum();
                sign_exp += kb + u32::from(k[b.q]);
                let from = match convention {
                    SignConvention::Derived => b.start,
                    _ => prev_q.map_or(0, |p| p + 1),
                };
                let to = match convention {
                    SignConvention::Literal => b.q + 1,
                    _ => b.q,
                };
                sign_exp += n[from..to].iter().map(|&x| u32::from(x)).sum::<u32>();
                a_index.push(n[b.q]);
                b_pairs.push((n[b.start..b.q].to_vec(), n[b.q + 1..=b.end].iter().rev().copied().collect()));
                prev_q = Some(b.q);
            }
            let coeff = if sign_exp.is_multiple_of(2) { binom } else { -binom };
            out.push(Term { a_index, b_pairs, tail: k[tail_start..].to_vec(), coeff });
        }
    }
    out
}

fn evaluate<C, A, B>(k: &[u8], full: bool, convention: SignConvention, a: &A, b: &B) -> C
where
    C: CoeffRing,
    A: Fn(&[u8]) -> C,
    B: Fn(&[u8]) -> C,
{
    if full && k.is_empty() {
        return a(&[]);
    }
    let mut out = C::ring_zero();
    for t in terms(k, full, convention) {
        let mut x = a(&t.a_index);
        if !full {
            x = x.mul_ref(&b(&t.tail));
        }
        for (left, right) in &t.b_pairs {
            x = x.mul_ref(&b(left)).mul_ref(&b(right));
        }
        out.add_assign_ref(&x.scale(&Q::from_integer(t.coeff.into())));
    }
    out
}

/// `⟨gila(A, B) | k⟩` from the coefficients `a(n) = ⟨A | n⟩`, `b(n) = ⟨B | n⟩`,
/// assuming `B(∅) = 1`.
pub fn gila_coeff<C, A, B>(k: &[u8], convention: SignConvention, a: A, b: B) -> C
where
    C: CoeffRing,
    A: Fn(&[u8]) -> C,
    B: Fn(&[u8]) -> C,
{
    evaluate(k, false, convention, &a, &b)
}

/// `⟨gilat_B(A) | k⟩` from the coefficients of `A` and `B`, assuming `B(∅) = 1`.
pub fn gilat_coeff<C, A, B>(k: &[u8], convention: SignConvention, a: A, b: B) -> C
where
    C: CoeffRing,
    A: Fn(&[u8]) -> C,
    B: Fn(&[u8]) -> C,
{
    evaluate(k, true, convention, &a, &b)
}

/// The Goncharov coproduct `Δ_G(z_{k_1} ⋯ z_{k_r})` on `(H^1, ⧢)`.
pub fn goncharov_coproduct_word(w: &ZWord, convention: SignConvention) -> Tensor {
    let k = w.letters();
    let mut out = Tensor::zero();
    for t in terms(k, false, convention) {
        let mut right = LinComb::from_word(ZWord::from_letters(&t.tail));
        for (l, rr) in &t.b_pairs {
            let pair =
                shuffle(&LinComb::from_word(ZWord::from_letters(l)), &LinComb::from_word(ZWord::from_letters(rr)));
            right = shuffle(&right, &pair);
        }
        let left = ZWord::from_letters(&t.a_index);
        let c = Q::from_integer(t.coeff.into());
        for (rw, rc) in right.iter() {
            out.add_term(TensorKey(left.clone(), rw.clone()), rc * &c);
        }
    }
    out
}

pub fn goncharov_coproduct(w: &LinComb<ZWord>, convention: SignConvention) -> Tensor {
    let mut out = Tensor::zero();
    for (t, c) in w.iter() {
        out.add_scaled(&goncharov_coproduct_word(t, convention), c);
    }
    out
}

/// `(A ⋆ B)(w) = μ ∘ (A ⊗ B) ∘ Δ_G(w)` for linear maps `A, B: H^1 → C`.
pub fn convolution<C, A, B>(w: &ZWord, convention: SignConvention, a: A, b: B) -> C
where
    C: CoeffRing,
    A: Fn(&ZWord) -> C,
    B: Fn(&ZWord) -> C,
{
    let mut out = C::ring_zero();
    for (t, c) in goncharov_coproduct_word(w, convention).iter() {
        out.add_assign_ref(&a(&t.0).mul_ref(&b(&t.1)).scale(c));
    }
    out
}

/// `(x ⊗ y) ↦ x ⧢ y` extended to tensors of words, and the tensor shuffle
/// product `(a ⊗ b)(c ⊗ d) = (a ⧢ c) ⊗ (b ⧢ d)`.
pub fn tensor_shuffle(s: &Tensor, t: &Tensor) -> Tensor {
    let mut out = Tensor::zero();
    for (x, c) in s.iter() {
        for (y, d) in t.iter() {
            let left = shuffle(&LinComb::from_word(x.0.clone()), &LinComb::from_word(y.0.clone()));
            let right = shuffle(&LinComb::from_word(x.1.clone()), &LinComb::from_word(y.1.clone()));
            let cd = c * d;
            for (l, lc) in left.iter() {
                for (r, rc) in right.iter() {
                    out.add_term(TensorKey(l.clone(), r.clone()), lc * rc * &cd);
                }
            }
        }
    }
    out
}

/// `(Δ ⊗ id) ∘ Δ` and `(id ⊗ Δ) ∘ Δ` as sums of triples of words.
pub fn coassociativity_sides(w: &ZWord, convention: SignConvention) -> (LinComb<TripleKey>, LinComb<TripleKey>) {
    let d = goncharov_coproduct_word(w, convention);
    let mut left = LinComb::zero();
    let mut right = LinComb::zero();
    for (t, c) in d.iter() {
        for (u, e) in goncharov_coproduct_word(&t.0, convention).iter() {
            left.add_term(TripleKey(u.0.clone(), u.1.clone(), t.1.clone()), c * e);
        }
        for (u, e) in goncharov_coproduct_word(&t.1, convention).iter() {
            right.add_term(TripleKey(t.0.clone(), u.0.clone(), u.1.clone()), c * e);
        }
    }
    (left, right)
}

/// A pure tensor `u ⊗ v ⊗ w` of three words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TripleKey(pub ZWord, pub ZWord, pub ZWord);

impl Word for TripleKey {
    fn weight(&self) -> u32 {
        self.0.weight() + self.1.weight() + self.2.weight()
    }
    fn depth(&self) -> usize {
        self.0.depth() + self.1.depth() + self.2.depth()
    }
}

impl fmt::Display for TripleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}⊗{}", self.0, self.1, self.2)
    }
}

/// The tautological character `w ↦ w` of `(H^1, ⧢)`.
pub fn tautological(w: &ZWord) -> ShuffleRing {
    ShuffleRing::word(w.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::q;

    #[test]
    fn depth_one_and_two_terms() {
        let t = terms(&[3], false, SignConvention::Derived);
        // s = 0 and s = 1.
        assert_eq!(t.len(), 2);
        let t = terms(&[2, 2], true, SignConvention::Derived);
        assert!(t.iter().all(|x| x.tail.is_empty()));
    }

    #[test]
    fn coproduct_counit() {
        let w = ZWord::from_letters(&[3, 1, 2]);
        let d = goncharov_coproduct_word(&w, SignConvention::Derived);
        assert_eq!(d.coeff(&TensorKey(w.clone(), ZWord::empty())), q(1));
        assert_eq!(d.coeff(&TensorKey(ZWord::empty(), w.clone())), q(1));
    }

    #[test]
    fn conventions_parse() {
        for c in SignConvention::ALL {
            assert_eq!(c.name().parse::<SignConvention>().unwrap(), c);
        }
        assert!("other".parse::<SignConvention>().is_err());
    }
}

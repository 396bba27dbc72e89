//! Exact check of the comparison between two harmonic regularisations, realised
//! with truncated multiple harmonic sums `f_w(m) = ζ_m(w)`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::Result;
use crate::lincomb::{q, LinComb, Q};
use crate::products::{harmonic_words, reg0_word, Product};
use crate::word::{enumerate_basis, Space, ZWord};

/// `ζ_m(w) = Σ_{m > n_1 > ⋯ > n_r > 0} n_1^{-k_1} ⋯ n_r^{-k_r}`.
pub fn zeta_trunc(w: &ZWord, m: u32) -> Q {
    let m = m as usize;
    // t[b] = sum over the current suffix with all n < b
    let mut t = vec![Q::one(); m + 1];
    for &k in w.letters().iter().rev() {
        let mut next = vec![Q::zero(); m + 1];
        for b in 1..=m {
            let n = b - 1;
            next[b] = if n == 0 {
                Q::zero()
            } else {
                &next[b - 1] + &t[n] / Q::from_integer(num_bigint::BigInt::from(n).pow(u32::from(k)))
            };
        }
        t = next;
    }
    t[m].clone()
}

type Evaluator = fn(&mut Harness, &ZWord, u32) -> Q;

/// Evaluator for `F_w(M)`, `coF(M)` and `F*(M)` with memoised truncated sums.
#[derive(Default)]
pub struct Harness {
    zeta: HashMap<(ZWord, u32), Q>,
}

impl Harness {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn f(&mut self, w: &ZWord, m: u32) -> Q {
        self.zeta.entry((w.clone(), m)).or_insert_with(|| zeta_trunc(w, m)).clone()
    }

    /// `F_w(M) = Σ_{w = w_1⋯w_s} Σ_{M > m_1 > ⋯ > m_s > 0} f_{w_1}(m_1)⋯f_{w_s}(m_s)`.
    pub fn big_f(&mut self, w: &ZWord, big_m: u32) -> Q {
        let r = w.depth();
        let bm = big_m as usize;
        // g[p][b]: sum over factorisations of w[p..] with every m < b
        let mut g = vec![vec![Q::zero(); bm + 1]; r + 1];
        g[r] = vec![Q::one(); bm + 1];
        for p in (0..r).rev() {
            for b in 1..=bm {
                let mut acc = Q::zero();
                for (qq, row) in g.iter().enumerate().skip(p + 1) {
                    let piece = w.slice(p, qq);
                    for (m, tail) in row.iter().enumerate().take(b).skip(1) {
                        if tail.is_zero() {
                            continue;
                        }
                        acc += self.f(&piece, m as u32) * tail;
                    }
                }
                g[p][b] = acc;
            }
        }
        g[0][bm].clone()
    }

    /// `⟨coF(M) | w⟩`: zero unless `w = z_1^r`, where it is
    /// `(−1)^r Σ_{M > m_1 ≥ ⋯ ≥ m_r > 0} μ f_{z_1}(m_1)⋯f_{z_1}(m_r)`.
    pub fn cof(&mut self, w: &ZWord, big_m: u32) -> Q {
        if w.letters().iter().any(|&k| k != 1) {
            return Q::zero();
        }
        let r = w.depth();
        let f1: Vec<Q> = (0..big_m).map(|m| self.f(&ZWord::letter(1), m)).collect();
        let mut total = Q::zero();
        let mut seq = Vec::with_capacity(r);
        nonincreasing(r, big_m.saturating_sub(1), &mut seq, &mut |s| {
            let mut term = Q::one();
            for &m in s {
                term *= &f1[m as usize];
            }
            let mut run = 1u64;
            for i in 1..s.len() {
                if s[i] == s[i - 1] {
                    run += 1;
                    term /= q(run as i64);
                } else {
                    run = 1;
                }
            }
            total += term;
        });
        if r % 2 == 1 {
            -total
        } else {
            total
        }
    }

    /// `⟨coF(M) × F(M) | w⟩` over deconcatenations.
    pub fn f_star(&mut self, w: &ZWord, big_m: u32) -> Q {
        let r = w.depth();
        let mut acc = Q::zero();
        for i in 0..=r {
            let c = self.cof(&w.slice(0, i), big_m);
            if c.is_zero() {
                continue;
            }
            acc += c * self.big_f(&w.slice(i, r), big_m);
        }
        acc
    }

    pub fn eval<F: FnMut(&mut Self, &ZWord) -> Q>(&mut self, v: &LinComb<ZWord>, mut f: F) -> Q {
        let mut acc = Q::zero();
        for (w, c) in v.iter() {
            acc += c * f(self, w);
        }
        acc
    }
}

fn nonincreasing(len: usize, max: u32, seq: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
    if seq.len() == len {
        visit(seq);
        return;
    }
    let top = seq.last().copied().unwrap_or(max);
    for m in 1..=top {
        seq.push(m);
        nonincreasing(len, max, seq, visit);
        seq.pop();
    }
}

#[derive(Clone, Debug, Default)]
pub struct SumsReport {
    pub max_cutoff: u32,
    pub max_weight: u32,
    pub homomorphism_f: usize,
    pub homomorphism_cof: usize,
    pub homomorphism_f_star: usize,
    pub regularisation: usize,
    pub failures: Vec<String>,
}

impl SumsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "max_cutoff": self.max_cutoff,
            "max_weight": self.max_weight,
            "checked": {
                "F_homomorphism": self.homomorphism_f,
                "coF_homomorphism": self.homomorphism_cof,
                "F_star_homomorphism": self.homomorphism_f_star,
                "F_star_equals_F_of_reg0": self.regularisation,
            },
            "passed": self.passed(),
            "failures": self.failures,
        })
    }
}

/// Checks, for every cutoff `M ≤ max_cutoff` and words of weight `≤ max_weight`,
/// that `F(M)`, `coF(M)` and `F*(M)` respect the harmonic product, that
/// `F*_{z_1}(M) = 0`, and that `F*_w(M) = F_{reg0(w)}(M)`.
pub fn truncated_sums_harness(max_cutoff: u32, max_weight: u32) -> Result<SumsReport> {
    let mut h = Harness::new();
    let mut report = SumsReport { max_cutoff, max_weight, ..Default::default() };
    let words: Vec<ZWord> = (1..=max_weight).flat_map(|k| enumerate_basis(k, Space::H1)).collect();
    let mut pairs = Vec::new();
    for (i, u) in words.iter().enumerate() {
        for v in &words[i..] {
            if u.weight() + v.weight() <= max_weight {
                pairs.push((u.clone(), v.clone()));
            }
        }
    }
    let regs: Vec<(ZWord, LinComb<ZWord>)> =
        words.iter().map(|w| reg0_word(w, Product::Harmonic).map(|r| (w.clone(), r))).collect::<Result<_>>()?;

    for m in 1..=max_cutoff {
        for (u, v) in &pairs {
            let uv = harmonic_words(u, v);
            let checks: [(&str, Evaluator, &mut usize); 3] = [
                ("F", Harness::big_f, &mut report.homomorphism_f),
                ("coF", Harness::cof, &mut report.homomorphism_cof),
                ("F*", Harness::f_star, &mut report.homomorphism_f_star),
            ];
            for (name, f, count) in checks {
                let lhs = h.eval(&uv, |h, w| f(h, w, m));
                let rhs = f(&mut h, u, m) * f(&mut h, v, m);
                *count += 1;
                if lhs != rhs {
                    report.failures.push(format!("{name}({u} * {v})({m}): {lhs} != {rhs}"));
                }
            }
        }
        let z1 = h.f_star(&ZWord::letter(1), m);
        report.regularisation += 1;
        if !z1.is_zero() {
            report.failures.push(format!("F*(z1)({m}) = {z1}"));
        }
        for (w, r) in &regs {
            let lhs = h.f_star(w, m);
            let rhs = h.eval(r, |h, t| h.big_f(t, m));
            report.regularisation += 1;
            if lhs != rhs {
                report.failures.push(format!("F*({w})({m}) = {lhs} but F(reg0) = {rhs}"));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::{lc, q_frac};

    #[test]
    fn truncated_sums() {
        assert_eq!(zeta_trunc(&ZWord::letter(2), 3), q_frac(5, 4));
        assert_eq!(zeta_trunc(&ZWord::letter(2), 1), Q::zero());
        assert_eq!(zeta_trunc(&ZWord::empty(), 1), Q::one());
        // n1 = 2, n2 = 1
        assert_eq!(zeta_trunc(&ZWord::new(&[2, 1]).unwrap(), 3), q_frac(1, 4));
    }

    #[test]
    fn f_star_of_z1z2() {
        let mut h = Harness::new();
        let w = ZWord::new(&[1, 2]).unwrap();
        let r = lc(&[(-1, &[2, 1]), (-1, &[3])]);
        let lhs = h.f_star(&w, 6);
        let rhs = h.eval(&r, |h, t| h.big_f(t, 6));
        assert_eq!(lhs, rhs);
        for m in 1..=6 {
            assert!(h.f_star(&ZWord::letter(1), m).is_zero());
        }
    }

    #[test]
    fn small_harness() {
        let r = truncated_sums_harness(4, 3).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}

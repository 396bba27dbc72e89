//! Graded pieces of the relation ideals `R_*`, `DR_*` and `Drop1_*`, the
//! conjectural dimension series, verification suites, diamond defects and the
//! truncated harmonic-sum harness.

pub mod checks;
pub mod diamond;
pub mod sums;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::drop1::drop1_word;
use crate::error::{Error, Result};
use crate::linalg::{independent_mod_p, int_rows_mod, ColumnIndex, RelationSpace};
use crate::lincomb::{LinComb, Q};
use crate::operators::{der, r_bracket};
use crate::parallel;
use crate::products::harmonic_counts;
use crate::word::{enumerate_basis, Space, ZWord};

/// Generating families of relation ideals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    /// `R(u, v)` for `u, v ∈ H^{≥2}`.
    R,
    /// `der^n(R(u, v))`.
    Dr,
    /// `𝒟(u) − u` for `u ∈ H^0`.
    Drop1Star,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::R => "R",
            Family::Dr => "DR",
            Family::Drop1Star => "Drop1",
        }
    }

    /// The space the ideal lives in; also the space its multipliers range over.
    pub fn space(self) -> Space {
        match self {
            Family::R | Family::Dr => Space::Ge2,
            Family::Drop1Star => Space::H0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r" => Ok(Family::R),
            "dr" => Ok(Family::Dr),
            "drop1" | "drop1star" | "drop1star_core" => Ok(Family::Drop1Star),
            _ => Err(Error::Usage(format!("unknown family `{s}` (expected R, DR or Drop1)"))),
        }
    }
}

/// Unordered pairs `{u, v}` of `H^{≥2}` basis words with `wt(u) + wt(v) = total`.
pub fn ge2_pairs(total: u32) -> Vec<(ZWord, ZWord)> {
    let mut out = Vec::new();
    for a in 2..=total.saturating_sub(2) {
        let b = total - a;
        if b < a {
            break;
        }
        let left = enumerate_basis(a, Space::Ge2);
        let right = enumerate_basis(b, Space::Ge2);
        for (i, u) in left.iter().enumerate() {
            let start = if a == b { i } else { 0 };
            for v in &right[start..] {
                out.push((u.clone(), v.clone()));
            }
        }
    }
    out
}

fn r_generators(k: u32) -> Vec<LinComb<ZWord>> {
    if k < 6 {
        return Vec::new();
    }
    let pairs = ge2_pairs(k - 2);
    parallel::map(&pairs, |(u, v)| r_bracket(&LinComb::from_word(u.clone()), &LinComb::from_word(v.clone())))
}

/// The generators of weight `k` of a family (before multiplying by words).
pub fn generators(k: u32, family: Family) -> Result<Vec<LinComb<ZWord>>> {
    match family {
        Family::R => Ok(r_generators(k)),
        Family::Dr => {
            let mut out = Vec::new();
            let mut n = 0u32;
            while k >= 6 + 2 * n {
                let mut level = r_generators(k - 2 * n);
                for _ in 0..n {
                    let next = parallel::map(&level, der);
                    level = next.into_iter().collect::<Result<_>>()?;
                }
                out.extend(level);
                n += 1;
            }
            Ok(out)
        }
        Family::Drop1Star => {
            let basis = enumerate_basis(k, Space::H0);
            let out = parallel::map(&basis, |u| drop1_word(u).map(|d| d - LinComb::from_word(u.clone())));
            out.into_iter().collect()
        }
    }
}

type SpaceKey = (u32, Family);

fn span_cache() -> &'static Mutex<HashMap<SpaceKey, Arc<RelationSpace>>> {
    static CACHE: OnceLock<Mutex<HashMap<SpaceKey, Arc<RelationSpace>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn generator_cache() -> &'static Mutex<HashMap<SpaceKey, Arc<RelationSpace>>> {
    static CACHE: OnceLock<Mutex<HashMap<SpaceKey, Arc<RelationSpace>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn columns(k: u32, family: Family) -> Arc<ColumnIndex> {
    Arc::new(ColumnIndex::new(k, family.space()))
}

/// Span of the weight-`k` generators, reduced to a basis. For `DR` the
/// iterates of `der` are taken on the basis one weight step down, which spans
/// the same space as iterating on every generator.
pub fn generator_span(k: u32, family: Family) -> Result<Arc<RelationSpace>> {
    if let Some(hit) = generator_cache().lock().unwrap().get(&(k, family)) {
        return Ok(Arc::clone(hit));
    }
    let gens = match family {
        Family::Dr if k >= 8 => {
            let below = generator_span(k - 2, Family::Dr)?;
            let mut gens = r_generators(k);
            let below_rows: Vec<LinComb<ZWord>> = below
                .independent_rows()
                .iter()
                .map(|r| {
                    let r: Vec<(usize, Q)> = r.iter().map(|(c, v)| (*c, Q::from_integer(v.clone()))).collect();
                    below.columns().lincomb(&r)
                })
                .collect();
            let lifted = parallel::map(&below_rows, der);
            for g in lifted {
                gens.push(g?);
            }
            gens
        }
        _ => generators(k, family)?,
    };
    let space = Arc::new(RelationSpace::new(columns(k, family), &gens)?);
    generator_cache().lock().unwrap().insert((k, family), Arc::clone(&space));
    Ok(space)
}

type IntGen = Vec<(ZWord, i128)>;

/// The elements `g ∗ w` spanning the weight-`k` piece of the ideal: `g` runs
/// over a basis of the generators of each weight `j ≤ k` and `w` over the basis
/// of the family's space in weight `k − j` (including the empty word).
pub fn ideal_rows(k: u32, family: Family) -> Result<Vec<LinComb<ZWord>>> {
    rows_from(k, family, |j| integer_basis(&*generator_span(j, family)?))
}

/// As [`ideal_rows`], with generator bases chosen by
/// [`generator_rows_modular`] instead of exact elimination.
pub fn ideal_rows_modular(k: u32, family: Family, p: u64) -> Result<Vec<LinComb<ZWord>>> {
    rows_from(k, family, |j| Ok(generator_rows_modular(j, family, p)?.as_ref().clone()))
}

fn rows_from<F>(k: u32, family: Family, basis_of: F) -> Result<Vec<LinComb<ZWord>>>
where
    F: Fn(u32) -> Result<Vec<IntGen>>,
{
    let cols = ColumnIndex::new(k, family.space());
    let mut rows = Vec::new();
    for j in 0..=k {
        let basis = basis_of(j)?;
        if basis.is_empty() {
            continue;
        }
        let multipliers = enumerate_basis(k - j, family.space());
        // every product u ∗ w of a support word with a multiplier, computed once
        // and stored as (column, multiplicity)
        let support: BTreeSet<&ZWord> = basis.iter().flat_map(|g| g.iter().map(|(u, _)| u)).collect();
        let pairs: Vec<(&ZWord, &ZWord)> =
            support.iter().flat_map(|u| multipliers.iter().map(move |w| (*u, w))).collect();
        let products = parallel::map(&pairs, |(u, w)| {
            harmonic_counts(u, w)
                .into_iter()
                .map(|(t, n)| (cols.col(&t).expect("product stays in the space"), n))
                .collect::<Vec<_>>()
        });
        let table: HashMap<(&ZWord, &ZWord), &Vec<(usize, u64)>> = pairs.iter().copied().zip(products.iter()).collect();
        let jobs: Vec<(&IntGen, &ZWord)> = basis.iter().flat_map(|g| multipliers.iter().map(move |w| (g, w))).collect();
        let built = parallel::map(&jobs, |(g, w)| {
            let mut dense = vec![0i128; cols.len()];
            for (u, c) in g.iter() {
                for &(col, n) in table[&(u, *w)] {
                    let add = c.checked_mul(i128::from(n)).ok_or_else(overflow)?;
                    dense[col] = dense[col].checked_add(add).ok_or_else(overflow)?;
                }
            }
            Ok(LinComb::from_terms(
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c != 0)
                    .map(|(col, c)| (cols.word(col).clone(), Q::from_integer(BigInt::from(c)))),
            ))
        });
        for r in built {
            rows.push(r?);
        }
    }
    Ok(rows)
}

type ModKey = (u32, Family, u64);

fn modular_cache() -> &'static Mutex<HashMap<ModKey, Arc<Vec<IntGen>>>> {
    static CACHE: OnceLock<Mutex<HashMap<ModKey, Arc<Vec<IntGen>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn to_int_gen(g: &LinComb<ZWord>) -> Result<IntGen> {
    g.iter()
        .map(|(w, c)| {
            if !c.is_integer() {
                return Err(Error::Domain(format!("generator coefficient {c} is not an integer")));
            }
            Ok((w.clone(), c.to_integer().to_i128().ok_or_else(overflow)?))
        })
        .collect()
}

/// Weight-`k` generators that are independent modulo `p`, hence over `Q`.
/// They span the generator space unless `p` divides one of its minors, so
/// ranks built on them are exact with high probability for large `p`.
pub fn generator_rows_modular(k: u32, family: Family, p: u64) -> Result<Arc<Vec<IntGen>>> {
    if let Some(hit) = modular_cache().lock().unwrap().get(&(k, family, p)) {
        return Ok(Arc::clone(hit));
    }
    let gens = match family {
        Family::Dr if k >= 8 => {
            let below = generator_rows_modular(k - 2, Family::Dr, p)?;
            let below: Vec<LinComb<ZWord>> = below
                .iter()
                .map(|g| LinComb::from_terms(g.iter().map(|(w, c)| (w.clone(), Q::from_integer((*c).into())))))
                .collect();
            let mut gens = r_generators(k);
            for g in parallel::map(&below, der) {
                gens.push(g?);
            }
            gens
        }
        _ => generators(k, family)?,
    };
    let cols = ColumnIndex::new(k, family.space());
    let ints: Vec<IntGen> = gens.iter().map(to_int_gen).collect::<Result<_>>()?;
    let indexed: Vec<Vec<(usize, i128)>> = ints
        .iter()
        .map(|g| {
            g.iter()
                .map(|(w, c)| {
                    let col = cols
                        .col(w)
                        .ok_or_else(|| Error::Domain(format!("generator term {w} is outside the column space")))?;
                    Ok((col, *c))
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let keep = independent_mod_p(&int_rows_mod(&indexed, p), cols.len(), p);
    let out: Arc<Vec<IntGen>> = Arc::new(keep.into_iter().map(|i| ints[i].clone()).collect());
    modular_cache().lock().unwrap().insert((k, family, p), Arc::clone(&out));
    Ok(out)
}

fn overflow() -> Error {
    Error::Domain("coefficient overflow while building relation rows".into())
}

// Basis of a generator span with integer coefficients.
fn integer_basis(space: &RelationSpace) -> Result<Vec<Vec<(ZWord, i128)>>> {
    let cols = space.columns();
    space
        .independent_rows()
        .iter()
        .map(|row| row.iter().map(|(c, v)| Ok((cols.word(*c).clone(), v.to_i128().ok_or_else(overflow)?))).collect())
        .collect()
}

/// The weight-`k` piece of the ideal generated by `family`, memoised.
pub fn ideal_span(k: u32, family: Family) -> Result<Arc<RelationSpace>> {
    if let Some(hit) = span_cache().lock().unwrap().get(&(k, family)) {
        return Ok(Arc::clone(hit));
    }
    let rows = ideal_rows(k, family)?;
    let space = Arc::new(RelationSpace::new(columns(k, family), &rows)?);
    span_cache().lock().unwrap().insert((k, family), Arc::clone(&space));
    Ok(space)
}

/// Coefficients of `1/(1 − X² − X³ − X⁴ − X⁵ + X⁸ + X⁹ + X¹⁰ + X¹¹ + X¹²)` up to `X^k`.
pub fn conj_dim_series(k: u32) -> Vec<i128> {
    let mut a: Vec<i128> = Vec::with_capacity(k as usize + 1);
    for n in 0..=k as usize {
        let at = |i: usize| if n >= i { a[n - i] } else { 0 };
        let v = if n == 0 { 1 } else { at(2) + at(3) + at(4) + at(5) - at(8) - at(9) - at(10) - at(11) - at(12) };
        a.push(v);
    }
    a
}

pub fn conj_dim(k: u32) -> i128 {
    conj_dim_series(k)[k as usize]
}

/// `F_{k−1}`, the number of words of weight `k` with all entries at least 2.
pub fn ge2_dimension(k: u32) -> u64 {
    if k == 0 {
        return 1;
    }
    let (mut a, mut b) = (1u64, 0u64); // F_{-1}, F_0
    for _ in 0..k - 1 {
        let c = a + b;
        a = b;
        b = c;
    }
    b
}

/// One row of the relation-count table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub weight: u32,
    pub generator_count: u64,
    pub rank_r: usize,
    pub rank_dr: usize,
    pub conjectured_dim: i128,
    pub etilde_dim: i128,
}

impl TableRow {
    pub fn to_json(&self) -> Value {
        json!({
            "weight": self.weight,
            "generator_count": self.generator_count,
            "rank_R": self.rank_r,
            "rank_DR": self.rank_dr,
            "conjectured_dim": self.conjectured_dim as i64,
            "etilde_dim": self.etilde_dim as i64,
        })
    }

    pub const TSV_HEADER: &'static str = "weight\tgenerator_count\trank_R\trank_DR\tconjectured_dim\tetilde_dim";

    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.weight, self.generator_count, self.rank_r, self.rank_dr, self.conjectured_dim, self.etilde_dim
        )
    }
}

/// How ranks are computed for the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankMethod {
    Exact,
    /// Multi-modular rank with the given primes, falling back to exact on
    /// disagreement.
    Modular(Vec<u64>),
}

fn rank_for(k: u32, family: Family, method: &RankMethod) -> Result<usize> {
    match method {
        RankMethod::Exact => Ok(ideal_span(k, family)?.rank()),
        RankMethod::Modular(primes) => {
            let p = *primes.first().ok_or_else(|| Error::Usage("no primes given".into()))?;
            let rows = ideal_rows_modular(k, family, p)?;
            let cols = ColumnIndex::new(k, family.space());
            Ok(crate::linalg::modular_rank(&cols, &rows, primes)?.rank)
        }
    }
}

pub fn table_row(k: u32, method: &RankMethod) -> Result<TableRow> {
    let (r, dr) = parallel::join(|| rank_for(k, Family::R, method), || rank_for(k, Family::Dr, method));
    let (rank_r, rank_dr) = (r?, dr?);
    let generator_count = ge2_dimension(k);
    Ok(TableRow {
        weight: k,
        generator_count,
        rank_r,
        rank_dr,
        conjectured_dim: conj_dim(k),
        etilde_dim: generator_count as i128 - rank_dr as i128,
    })
}

pub fn table(weights: std::ops::RangeInclusive<u32>, method: &RankMethod) -> Result<Vec<TableRow>> {
    weights.map(|k| table_row(k, method)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::lc;

    #[test]
    fn pair_enumeration() {
        assert_eq!(ge2_pairs(4).len(), 1);
        assert!(ge2_pairs(3).is_empty());
        // weights (2,3): 1·1; total 5
        assert_eq!(ge2_pairs(5).len(), 1);
        // (2,4): 1·2, (3,3): 1
        assert_eq!(ge2_pairs(6).len(), 3);
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generators(6, Family::R).unwrap(), vec![lc(&[(6, &[3, 3]), (-3, &[4, 2]), (-1, &[6])])]);
        assert!(generators(5, Family::R).unwrap().is_empty());
        let dr8 = generators(8, Family::Dr).unwrap();
        assert_eq!(dr8.len(), generators(8, Family::R).unwrap().len() + 1);
    }

    #[test]
    fn dimension_series() {
        let expected = [1, 0, 1, 1, 2, 3, 4, 7, 9, 15, 21, 32, 47, 70, 104];
        assert_eq!(conj_dim_series(14), expected.to_vec());
        let fib: Vec<u64> = (0..10).map(ge2_dimension).collect();
        assert_eq!(fib, vec![1, 0, 1, 1, 2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn small_ranks() {
        assert_eq!(ideal_span(6, Family::R).unwrap().rank(), 1);
        assert_eq!(ideal_span(7, Family::Dr).unwrap().rank(), 1);
        assert_eq!(ideal_span(5, Family::R).unwrap().rank(), 0);
    }
}

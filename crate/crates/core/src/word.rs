//! Index words in the three encodings used throughout the crate.
//!
//! * [`ZWord`]: letters `z_k`, written as the index `(k_1, ..., k_r)`.
//! * [`XyWord`]: words over `{x, y}` with `z_k = x^{k-1} y`.
//! * [`BWord`]: balanced words `b_{k_1} b_0^{m_1} ... b_{k_r} b_0^{m_r}`.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest letter value a word can carry.
pub const MAX_LETTER: u32 = u8::MAX as u32;

pub(crate) type Letters = SmallVec<[u8; 16]>;

/// A word `z_{k_1} ... z_{k_r}` in the letters `z_k`, `k >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ZWord(Letters);

impl ZWord {
    pub fn empty() -> Self {
        ZWord(Letters::new())
    }

    /// Builds a word from its index, rejecting zero entries and entries above [`MAX_LETTER`].
    pub fn new(index: &[u32]) -> Result<Self> {
        let mut letters = Letters::with_capacity(index.len());
        for (position, &k) in index.iter().enumerate() {
            if k == 0 {
                return Err(Error::Parse { position, message: "index entries must be positive".into() });
            }
            if k > MAX_LETTER {
                return Err(Error::Parse { position, message: format!("index entry {k} exceeds {MAX_LETTER}") });
            }
            letters.push(k as u8);
        }
        Ok(ZWord(letters))
    }

    /// Builds a word from letters already known to be positive.
    pub fn from_letters(letters: &[u8]) -> Self {
        debug_assert!(letters.iter().all(|&k| k >= 1));
        ZWord(Letters::from_slice(letters))
    }

    pub(crate) fn from_smallvec(letters: Letters) -> Self {
        debug_assert!(letters.iter().all(|&k| k >= 1));
        ZWord(letters)
    }

    /// `z_k` as a one-letter word.
    pub fn letter(k: u8) -> Self {
        assert!(k >= 1, "z_0 is not a letter");
        ZWord(smallvec::smallvec![k])
    }

    /// `z_k^n`.
    pub fn power(k: u8, n: usize) -> Self {
        assert!(k >= 1, "z_0 is not a letter");
        ZWord(std::iter::repeat_n(k, n).collect())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&k| k as u32).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Empty, or first letter at least 2.
    pub fn is_admissible(&self) -> bool {
        self.0.first().is_none_or(|&k| k >= 2)
    }

    /// All letters at least 2.
    pub fn is_ge2(&self) -> bool {
        self.0.iter().all(|&k| k >= 2)
    }

    /// At most one `z_1`, and not in first position.
    pub fn is_ge2_alm(&self) -> bool {
        let ones = self.0.iter().filter(|&&k| k == 1).count();
        ones == 0 || (ones == 1 && self.0[0] != 1)
    }

    pub fn in_space(&self, space: Space) -> bool {
        match space {
            Space::H1 => true,
            Space::H0 => self.is_admissible(),
            Space::Ge2 => self.is_ge2(),
            Space::Ge2Alm => self.is_ge2_alm(),
        }
    }

    pub fn concat(&self, other: &ZWord) -> ZWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        ZWord(letters)
    }

    /// `z_k w`.
    pub fn prepend(&self, k: u8) -> ZWord {
        let mut letters = Letters::with_capacity(self.0.len() + 1);
        letters.push(k);
        letters.extend_from_slice(&self.0);
        ZWord(letters)
    }

    /// `x^n w`: raises the first letter by `n`. Requires a nonempty word.
    pub fn raise_first(&self, n: u8) -> ZWord {
        assert!(!self.0.is_empty(), "x^n times the empty word is not in H^1");
        let mut letters = self.0.clone();
        letters[0] += n;
        ZWord(letters)
    }

    pub fn slice(&self, start: usize, end: usize) -> ZWord {
        ZWord(Letters::from_slice(&self.0[start..end]))
    }

    pub fn reversed(&self) -> ZWord {
        ZWord(self.0.iter().rev().copied().collect())
    }

    pub fn to_xy(&self) -> XyWord {
        encode_xy(self)
    }

    pub fn to_bword(&self) -> BWord {
        BWord { runs: self.0.iter().map(|&k| (k, 0)).collect() }
    }

    /// Comma-separated index notation, `""` for the empty word.
    pub fn format(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        parts.join(",")
    }

    /// Parses comma-separated index notation. Whitespace around entries is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "()" || trimmed == "∅" {
            return Ok(ZWord::empty());
        }
        let body = trimmed.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(trimmed);
        let mut letters = Vec::new();
        for (position, token) in body.split(',').enumerate() {
            let token = token.trim();
            let value: i64 = token
                .parse()
                .map_err(|_| Error::Parse { position, message: format!("`{token}` is not an integer") })?;
            if value <= 0 {
                return Err(Error::Parse { position, message: format!("entry {value} is not positive") });
            }
            letters.push(u32::try_from(value).unwrap_or(u32::MAX));
        }
        ZWord::new(&letters)
    }
}

impl Ord for ZWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.depth().cmp(&other.depth()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ZWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ZWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.format())
    }
}

impl fmt::Display for ZWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.format())
    }
}

/// A letter of the two-letter alphabet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Xy {
    X,
    Y,
}

/// A word over `{x, y}`.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct XyWord(pub(crate) SmallVec<[Xy; 32]>);

impl XyWord {
    pub fn new(letters: &[Xy]) -> Self {
        XyWord(SmallVec::from_slice(letters))
    }

    pub fn letters(&self) -> &[Xy] {
        &self.0
    }

    /// Number of letters, which equals the weight of the corresponding index.
    pub fn weight(&self) -> u32 {
        self.0.len() as u32
    }

    /// Empty or ending in `y`.
    pub fn in_h1(&self) -> bool {
        self.0.last().is_none_or(|&l| l == Xy::Y)
    }

    pub fn to_zword(&self) -> Result<ZWord> {
        decode_xy(self)
    }

    /// Run lengths `(c_1, ..., c_{2s})` of `x^{c_1} y^{c_2} ... x^{c_{2s-1}} y^{c_{2s}}`.
    ///
    /// Only defined for nonempty words starting in `x` and ending in `y`.
    pub fn run_lengths(&self) -> Result<Vec<u8>> {
        match (self.0.first(), self.0.last()) {
            (Some(Xy::X), Some(Xy::Y)) => {}
            _ => return Err(Error::Domain("run-length form needs a word x...y".into())),
        }
        let mut runs: Vec<u8> = Vec::new();
        let mut current = self.0[0];
        let mut count = 0u8;
        for &l in &self.0 {
            if l == current {
                count += 1;
            } else {
                runs.push(count);
                current = l;
                count = 1;
            }
        }
        runs.push(count);
        Ok(runs)
    }

    pub fn from_run_lengths(runs: &[u8]) -> XyWord {
        let mut out = SmallVec::new();
        for (i, &c) in runs.iter().enumerate() {
            let l = if i % 2 == 0 { Xy::X } else { Xy::Y };
            out.extend(std::iter::repeat_n(l, c as usize));
        }
        XyWord(out)
    }
}

impl fmt::Debug for XyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for XyWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            f.write_str(match l {
                Xy::X => "x",
                Xy::Y => "y",
            })?;
        }
        Ok(())
    }
}

pub fn encode_xy(w: &ZWord) -> XyWord {
    let mut out = SmallVec::with_capacity(w.weight() as usize);
    for &k in w.letters() {
        out.extend(std::iter::repeat_n(Xy::X, k as usize - 1));
        out.push(Xy::Y);
    }
    XyWord(out)
}

pub fn decode_xy(v: &XyWord) -> Result<ZWord> {
    if !v.in_h1() {
        return Err(Error::Domain(format!("{v} is not in H^1")));
    }
    let mut letters = Letters::new();
    let mut run = 1u32;
    for &l in v.letters() {
        match l {
            Xy::X => run += 1,
            Xy::Y => {
                if run > MAX_LETTER {
                    return Err(Error::Domain(format!("letter z_{run} too large")));
                }
                letters.push(run as u8);
                run = 1;
            }
        }
    }
    Ok(ZWord(letters))
}

/// A balanced word `b_{k_1} b_0^{m_1} ... b_{k_r} b_0^{m_r}` stored as runs `(k_i, m_i)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BWord {
    runs: SmallVec<[(u8, u8); 8]>,
}

impl BWord {
    pub fn empty() -> Self {
        BWord::default()
    }

    pub fn from_runs(runs: &[(u8, u8)]) -> Result<Self> {
        if runs.iter().any(|&(k, _)| k == 0) {
            return Err(Error::Domain("run heads must be letters b_k with k >= 1".into()));
        }
        Ok(BWord { runs: SmallVec::from_slice(runs) })
    }

    /// Parses a flat letter sequence over `{b_0, b_1, ...}`; must not start with `b_0`.
    pub fn from_flat(letters: &[u8]) -> Result<Self> {
        if letters.first() == Some(&0) {
            return Err(Error::Domain("balanced word starts with b_0".into()));
        }
        let mut runs: SmallVec<[(u8, u8); 8]> = SmallVec::new();
        for &l in letters {
            if l == 0 {
                let last = runs.last_mut().expect("checked above");
                last.1 += 1;
            } else {
                runs.push((l, 0));
            }
        }
        Ok(BWord { runs })
    }

    pub fn runs(&self) -> &[(u8, u8)] {
        &self.runs
    }

    pub fn flat(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for &(k, m) in &self.runs {
            out.push(k);
            out.extend(std::iter::repeat_n(0, m as usize));
        }
        out
    }

    pub fn weight(&self) -> u32 {
        self.runs.iter().map(|&(k, m)| k as u32 + m as u32).sum()
    }

    pub fn depth(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// The image in `H^1`, if every `m_i` vanishes.
    pub fn to_zword(&self) -> Option<ZWord> {
        if self.runs.iter().all(|&(_, m)| m == 0) {
            Some(ZWord(self.runs.iter().map(|&(k, _)| k).collect()))
        } else {
            None
        }
    }

    /// The involution `b_{k_1} b_0^{m_1} ... b_{k_r} b_0^{m_r} -> b_{m_r+1} b_0^{k_r-1} ... b_{m_1+1} b_0^{k_1-1}`.
    pub fn tau(&self) -> BWord {
        BWord { runs: self.runs.iter().rev().map(|&(k, m)| (m + 1, k - 1)).collect() }
    }
}

impl Ord for BWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.depth().cmp(&other.depth()))
            .then_with(|| self.flat().cmp(&other.flat()))
    }
}

impl PartialOrd for BWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        for &(k, m) in &self.runs {
            write!(f, "b{k}")?;
            match m {
                0 => {}
                1 => write!(f, "b0")?,
                _ => write!(f, "b0^{m}")?,
            }
        }
        Ok(())
    }
}

/// The graded subspaces of `H^1` with a word basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Space {
    /// All words.
    H1,
    /// Admissible words: empty or `k_1 >= 2`.
    H0,
    /// All entries at least 2.
    Ge2,
    /// At most one `z_1`, not in first position.
    Ge2Alm,
}

impl std::str::FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h1" => Ok(Space::H1),
            "h0" => Ok(Space::H0),
            "ge2" => Ok(Space::Ge2),
            "ge2alm" | "ge2-alm" => Ok(Space::Ge2Alm),
            other => Err(Error::Usage(format!("unknown space `{other}`"))),
        }
    }
}

/// All words of weight `k` in `space`, in canonical order.
pub fn enumerate_basis(k: u32, space: Space) -> Vec<ZWord> {
    let min_part = if space == Space::Ge2 { 2 } else { 1 };
    let mut out = Vec::new();
    let mut current = Letters::new();
    compositions(k, min_part, &mut current, &mut out);
    out.retain(|w| w.in_space(space));
    out.sort();
    out
}

fn compositions(remaining: u32, min_part: u32, current: &mut Letters, out: &mut Vec<ZWord>) {
    if remaining == 0 {
        out.push(ZWord(current.clone()));
        return;
    }
    for part in min_part..=remaining.min(MAX_LETTER) {
        current.push(part as u8);
        compositions(remaining - part, min_part, current, out);
        current.pop();
    }
}

/// Balanced words of weight `k` (never starting with `b_0`), in canonical order.
pub fn enumerate_bwords(k: u32) -> Vec<BWord> {
    let mut out = Vec::new();
    let mut runs: SmallVec<[(u8, u8); 8]> = SmallVec::new();
    bword_runs(k, &mut runs, &mut out);
    out.sort();
    out
}

fn bword_runs(remaining: u32, runs: &mut SmallVec<[(u8, u8); 8]>, out: &mut Vec<BWord>) {
    if remaining == 0 {
        out.push(BWord { runs: runs.clone() });
        return;
    }
    for head in 1..=remaining {
        for zeros in 0..=(remaining - head) {
            runs.push((head as u8, zeros as u8));
            bword_runs(remaining - head - zeros, runs, out);
            runs.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(index: &[u32]) -> ZWord {
        ZWord::new(index).unwrap()
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(ZWord::parse("3,2").unwrap(), z(&[3, 2]));
        assert_eq!(ZWord::parse("").unwrap(), ZWord::empty());
        assert_eq!(z(&[4, 2]).format(), "4,2");
        assert_eq!(ZWord::parse(" 4 , 2 ").unwrap(), z(&[4, 2]));
    }

    #[test]
    fn parse_errors_carry_position() {
        match ZWord::parse("3,0,2") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 1),
            other => panic!("unexpected {other:?}"),
        }
        match ZWord::parse("2,a") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ZWord::parse("-1").is_err());
        assert!(ZWord::parse("2,,3").is_err());
    }

    #[test]
    fn xy_encoding() {
        assert_eq!(z(&[2]).to_xy().to_string(), "xy");
        assert_eq!(z(&[3, 1]).to_xy().to_string(), "xxyy");
        let yxy = XyWord::new(&[Xy::Y, Xy::X, Xy::Y]);
        assert_eq!(yxy.to_zword().unwrap(), z(&[1, 2]));
        let bad = XyWord::new(&[Xy::X, Xy::Y, Xy::X]);
        assert!(matches!(bad.to_zword(), Err(Error::Domain(_))));
    }

    #[test]
    fn run_lengths() {
        let w = z(&[3, 1, 2]).to_xy();
        assert_eq!(w.run_lengths().unwrap(), vec![2, 2, 1, 1]);
        assert_eq!(XyWord::from_run_lengths(&[2, 2, 1, 1]), w);
        assert!(z(&[1, 2]).to_xy().run_lengths().is_err());
    }

    #[test]
    fn tau_examples() {
        let b2 = BWord::from_runs(&[(2, 0)]).unwrap();
        assert_eq!(b2.tau(), BWord::from_runs(&[(1, 1)]).unwrap());
        let w = BWord::from_runs(&[(3, 1), (2, 0)]).unwrap();
        assert_eq!(w.tau(), BWord::from_runs(&[(1, 1), (2, 2)]).unwrap());
        let w = BWord::from_runs(&[(4, 3), (2, 0)]).unwrap();
        assert_eq!(w.tau().tau(), w);
    }

    #[test]
    fn bword_flat_round_trip() {
        let w = BWord::from_flat(&[3, 0, 2, 0, 0]).unwrap();
        assert_eq!(w.runs(), &[(3, 1), (2, 2)]);
        assert_eq!(w.flat(), vec![3, 0, 2, 0, 0]);
        assert!(BWord::from_flat(&[0, 2]).is_err());
    }

    #[test]
    fn basis_ge2_weight_6() {
        let basis = enumerate_basis(6, Space::Ge2);
        let expected: Vec<ZWord> = vec![z(&[6]), z(&[2, 4]), z(&[3, 3]), z(&[4, 2]), z(&[2, 2, 2])];
        assert_eq!(basis, expected);
        assert_eq!(enumerate_basis(0, Space::Ge2), vec![ZWord::empty()]);
        assert!(enumerate_basis(1, Space::Ge2).is_empty());
    }

    #[test]
    fn basis_sizes() {
        for k in 1..=12u32 {
            assert_eq!(enumerate_basis(k, Space::H1).len(), 1 << (k - 1));
        }
        for k in 2..=12u32 {
            assert_eq!(enumerate_basis(k, Space::H0).len(), 1 << (k - 2));
        }
    }

    #[test]
    fn subspace_predicates() {
        assert!(z(&[2, 1, 3]).is_ge2_alm());
        assert!(!z(&[1, 2]).is_ge2_alm());
        assert!(!z(&[2, 1, 1]).is_ge2_alm());
        assert!(z(&[3, 2]).is_ge2());
        assert!(ZWord::empty().is_admissible());
    }

    #[test]
    fn canonical_order() {
        let mut words = vec![z(&[2, 2]), z(&[3]), z(&[1, 1, 1]), z(&[1, 2])];
        words.sort();
        assert_eq!(words, vec![z(&[3]), z(&[1, 2]), z(&[1, 1, 1]), z(&[2, 2])]);
    }
}

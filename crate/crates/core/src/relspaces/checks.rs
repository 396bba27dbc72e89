//! Exhaustive verification suites for the operator identities.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::drop1::drop1;
use crate::error::{Error, Result};
use crate::lincomb::{q, LinComb};
use crate::operators::{delta, delta_der_commutator, delta_phi_commutator, der_defect, der_pow, r_bracket, weight_op};
use crate::parallel;
use crate::products::{ds, harmonic};
use crate::word::{enumerate_basis, Space, ZWord};

use super::ge2_pairs;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CheckId {
    /// `[δ, φ] = W` on `H^1`.
    Sl2Phi,
    /// `[δ, der] = W` on `H^{≥2}`.
    Sl2Der,
    /// `δ(R(u,v)) = R(δu, v) + R(u, δv)`.
    DeltaLeibnizR,
    /// `R(u, v)` has no letter `z_1`.
    RInGe2,
    /// `𝒟(ds(w, z_1)) = 0` on `H^0`.
    Drop1HoffmanKernel,
    /// `𝒟(u ∗ v) = 𝒟(u) ∗ v` for `u ∈ H^0`, `v ∈ H^{≥2}`.
    Drop1StarCompat,
    /// `der(u ∗ v) − der(u) ∗ v − u ∗ der(v) = −R(u, v)`.
    DerDefect,
    /// `δ∘der^i = der^i∘δ + i·W∘der^{i−1} − 2i·der^{i−1}` for `i ≤ 3`.
    DeltaDerPower,
    /// `δ∘der^i = der^i∘δ + i·W∘der^{i−1} − i(i−1)·der^{i−1}` for `i ≤ 3`,
    /// the form that follows from `[δ, der] = W` and `[W, der] = 2·der`.
    DeltaDerPowerCorrected,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::Sl2Phi,
        CheckId::Sl2Der,
        CheckId::DeltaLeibnizR,
        CheckId::RInGe2,
        CheckId::Drop1HoffmanKernel,
        CheckId::Drop1StarCompat,
        CheckId::DerDefect,
        CheckId::DeltaDerPower,
        CheckId::DeltaDerPowerCorrected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Sl2Phi => "sl2_phi",
            CheckId::Sl2Der => "sl2_der",
            CheckId::DeltaLeibnizR => "delta_leibniz_R",
            CheckId::RInGe2 => "R_in_GE2",
            CheckId::Drop1HoffmanKernel => "drop1_hoffman_kernel",
            CheckId::Drop1StarCompat => "drop1_star_compat",
            CheckId::DerDefect => "der_defect",
            CheckId::DeltaDerPower => "delta_der_power",
            CheckId::DeltaDerPowerCorrected => "delta_der_power_corrected",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Usage(format!("unknown check `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub input: String,
    pub passed: bool,
}

/// Outcome of one suite. Instances are listed in enumeration order up to and
/// including the first failure, whose data is kept in `counterexample`.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub id: CheckId,
    pub max_weight: u32,
    pub instances: Vec<Instance>,
    pub counterexample: Option<Value>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.id.name(),
            "max_weight": self.max_weight,
            "passed": self.passed(),
            "instances": self.instances.len(),
            "failures": self.instances.iter().filter(|i| !i.passed).count(),
            "counterexample": self.counterexample,
        })
    }
}

type Outcome = Result<Option<Value>>;

fn compare(lhs: &LinComb<ZWord>, rhs: &LinComb<ZWord>) -> Option<Value> {
    (lhs != rhs).then(|| json!({ "lhs": lhs.to_json(), "rhs": rhs.to_json() }))
}

fn one(w: &ZWord) -> LinComb<ZWord> {
    LinComb::from_word(w.clone())
}

fn words_up_to(max: u32, space: Space, min: u32) -> Vec<ZWord> {
    (min..=max).flat_map(|k| enumerate_basis(k, space)).collect()
}

fn pairs_up_to(max: u32) -> Vec<(ZWord, ZWord)> {
    (4..=max).flat_map(ge2_pairs).collect()
}

fn delta_der_power(w: &ZWord, i: usize, corrected: bool) -> Outcome {
    let w = one(w);
    let lhs = delta(&der_pow(&w, i)?);
    let prev = der_pow(&w, i - 1)?;
    let i_q = q(i as i64);
    let last = if corrected { q((i * (i - 1)) as i64) } else { q(2 * i as i64) };
    let mut rhs = der_pow(&delta(&w), i)?;
    rhs.add_scaled(&weight_op(&prev), &i_q);
    rhs.add_scaled(&prev, &-last);
    Ok(compare(&lhs, &rhs))
}

/// Runs one suite over all instances up to `max_weight`.
pub fn run_check(id: CheckId, max_weight: u32) -> Result<CheckReport> {
    let (labels, outcomes): (Vec<String>, Vec<Outcome>) = match id {
        CheckId::Sl2Phi => {
            let words = words_up_to(max_weight, Space::H1, 0);
            let out = parallel::map(&words, |w| Ok(compare(&delta_phi_commutator(&one(w)), &weight_op(&one(w)))));
            (words.iter().map(|w| w.to_string()).collect(), out)
        }
        CheckId::Sl2Der => {
            let words = words_up_to(max_weight, Space::Ge2, 0);
            let out = parallel::map(&words, |w| Ok(compare(&delta_der_commutator(&one(w))?, &weight_op(&one(w)))));
            (words.iter().map(|w| w.to_string()).collect(), out)
        }
        CheckId::DeltaLeibnizR => {
            let pairs = pairs_up_to(max_weight);
            let out = parallel::map(&pairs, |(u, v)| {
                let (u, v) = (one(u), one(v));
                let lhs = delta(&r_bracket(&u, &v));
                let rhs = r_bracket(&delta(&u), &v) + r_bracket(&u, &delta(&v));
                Ok(compare(&lhs, &rhs))
            });
            (pairs.iter().map(|(u, v)| format!("{u}, {v}")).collect(), out)
        }
        CheckId::RInGe2 => {
            let pairs = pairs_up_to(max_weight);
            let out = parallel::map(&pairs, |(u, v)| {
                let r = r_bracket(&one(u), &one(v));
                let bad = r.words().find(|w| !w.is_ge2()).cloned();
                Ok(bad.map(|w| json!({ "R": r.to_json(), "offending_word": w.letters() })))
            });
            (pairs.iter().map(|(u, v)| format!("{u}, {v}")).collect(), out)
        }
        CheckId::Drop1HoffmanKernel => {
            let words = words_up_to(max_weight, Space::H0, 2);
            let z1 = one(&ZWord::letter(1));
            let out = parallel::map(&words, |w| {
                let d = drop1(&ds(&one(w), &z1))?;
                Ok(compare(&d, &LinComb::zero()))
            });
            (words.iter().map(|w| w.to_string()).collect(), out)
        }
        CheckId::Drop1StarCompat => {
            let mut pairs = Vec::new();
            for a in 2..=max_weight {
                for b in 2..=max_weight.saturating_sub(a) {
                    for u in enumerate_basis(a, Space::H0) {
                        for v in enumerate_basis(b, Space::Ge2) {
                            pairs.push((u.clone(), v));
                        }
                    }
                }
            }
            let out = parallel::map(&pairs, |(u, v)| {
                let (u, v) = (one(u), one(v));
                Ok(compare(&drop1(&harmonic(&u, &v))?, &harmonic(&drop1(&u)?, &v)))
            });
            (pairs.iter().map(|(u, v)| format!("{u}, {v}")).collect(), out)
        }
        CheckId::DerDefect => {
            let pairs = pairs_up_to(max_weight);
            let out = parallel::map(&pairs, |(u, v)| {
                let (u, v) = (one(u), one(v));
                Ok(compare(&der_defect(&u, &v)?, &-r_bracket(&u, &v)))
            });
            (pairs.iter().map(|(u, v)| format!("{u}, {v}")).collect(), out)
        }
        CheckId::DeltaDerPower | CheckId::DeltaDerPowerCorrected => {
            let corrected = id == CheckId::DeltaDerPowerCorrected;
            let mut cases = Vec::new();
            for w in words_up_to(max_weight, Space::Ge2, 2) {
                for i in 1..=3usize {
                    cases.push((w.clone(), i));
                }
            }
            let out = parallel::map(&cases, |(w, i)| delta_der_power(w, *i, corrected));
            (cases.iter().map(|(w, i)| format!("{w}, i={i}")).collect(), out)
        }
    };

    let mut instances = Vec::new();
    let mut counterexample = None;
    for (input, outcome) in labels.into_iter().zip(outcomes) {
        let failure = outcome?;
        let passed = failure.is_none();
        if let Some(mut data) = failure {
            data["input"] = Value::from(input.clone());
            counterexample = Some(data);
        }
        instances.push(Instance { input, passed });
        if !passed {
            break;
        }
    }
    Ok(CheckReport { id, max_weight, instances, counterexample })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
        }
        assert!("nope".parse::<CheckId>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for id in [CheckId::Sl2Phi, CheckId::RInGe2, CheckId::DerDefect, CheckId::Drop1HoffmanKernel] {
            let report = run_check(id, 6).unwrap();
            assert!(report.passed(), "{}", report.to_json());
            assert!(!report.instances.is_empty());
        }
    }
}

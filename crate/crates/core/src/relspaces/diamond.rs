//! Defects of the diamond map `w ↦ 𝒟(w)` as a `∗`-homomorphism and against
//! the conjectured derivative, with membership in `DR_*`.

use serde_json::{json, Value};

use crate::drop1::drop1;
use crate::error::{Error, Result};
use crate::lincomb::LinComb;
use crate::operators::phi;
use crate::products::harmonic;
use crate::word::ZWord;

use super::{ideal_span, Family};

#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    pub weight: u32,
    pub defect: LinComb<ZWord>,
    /// Whether the defect lies in the weight-`weight` piece of `DR_*`.
    pub member: bool,
}

impl DefectReport {
    pub fn to_json(&self) -> Value {
        json!({
            "weight": self.weight,
            "defect": self.defect.to_json(),
            "in_DR": self.member,
        })
    }
}

fn report(weight: u32, defect: LinComb<ZWord>) -> Result<DefectReport> {
    let member = defect.is_zero() || ideal_span(weight, Family::Dr)?.contains(&defect)?;
    Ok(DefectReport { weight, defect, member })
}

fn admissible(w: &ZWord) -> Result<LinComb<ZWord>> {
    if !w.is_admissible() {
        return Err(Error::Domain(format!("{w} is not in H^0")));
    }
    Ok(LinComb::from_word(w.clone()))
}

/// `𝒟(u ∗ v) − 𝒟(u) ∗ 𝒟(v)`.
pub fn diamond_defect(u: &ZWord, v: &ZWord) -> Result<DefectReport> {
    let (u, v) = (admissible(u)?, admissible(v)?);
    let defect = drop1(&harmonic(&u, &v))? - harmonic(&drop1(&u)?, &drop1(&v)?);
    report(u.homogeneous_weight().unwrap_or(0) + v.homogeneous_weight().unwrap_or(0), defect)
}

/// `𝒟φ𝒟(w) − 𝒟φ(w)`.
pub fn diamond_derivative_defect(w: &ZWord) -> Result<DefectReport> {
    let lw = admissible(w)?;
    let defect = drop1(&phi(&drop1(&lw)?))? - drop1(&phi(&lw))?;
    report(w.weight() + 2, defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincomb::lc;
    use crate::operators::r_bracket;

    fn w(k: &[u32]) -> ZWord {
        ZWord::new(k).unwrap()
    }

    #[test]
    fn z2z1_squared() {
        let r = diamond_defect(&w(&[2, 1]), &w(&[2, 1])).unwrap();
        assert_eq!(r.defect, lc(&[(1, &[6]), (3, &[4, 2]), (-6, &[3, 3])]));
        let z2 = lc(&[(1, &[2])]);
        assert_eq!(r.defect, -r_bracket(&z2, &z2));
        assert!(r.member);
    }

    #[test]
    fn trivial_cases() {
        assert!(diamond_defect(&w(&[3, 1]), &w(&[2, 2])).unwrap().defect.is_zero());
        assert!(diamond_defect(&ZWord::empty(), &w(&[2, 1])).unwrap().defect.is_zero());
        assert!(diamond_derivative_defect(&w(&[3, 2])).unwrap().defect.is_zero());
        assert!(diamond_defect(&w(&[1, 2]), &w(&[2])).is_err());
    }
}

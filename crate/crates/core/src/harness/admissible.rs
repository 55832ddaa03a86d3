use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// 3/p + 1/q = 1/2
    Discrete,
    /// 2/p + 1/q = 1/2
    Continuous,
}

impl PairKind {
    fn time_weight(self) -> i64 {
        match self {
            PairKind::Discrete => 3,
            PairKind::Continuous => 2,
        }
    }
}

impl std::fmt::Display for PairKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairKind::Discrete => "discrete",
            PairKind::Continuous => "continuous",
        })
    }
}

/// Exact 1/p; `None` for exponents that are not representable (NaN).
fn exact_recip(e: Exponent) -> Option<BigRational> {
    match e {
        Exponent::Infinite => Some(BigRational::zero()),
        Exponent::Finite(p) => BigRational::from_float(p)
            .filter(|r| !r.is_zero())
            .map(|r| r.recip()),
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleCheck {
    pub admissible: bool,
    /// The q ∈ [2, ∞] solving the relation for the given p, if any.
    pub solved_q: Option<Exponent>,
}

/// Exact test of k/p + 1/q = 1/2 over the rationals (every finite f64 is a
/// dyadic rational, so no rounding enters).
pub fn admissible_check(p: Exponent, q: Exponent, kind: PairKind) -> AdmissibleCheck {
    let in_range = |e: Exponent| e.as_f64() >= 2.0;
    let (Some(rp), Some(rq)) = (exact_recip(p), exact_recip(q)) else {
        return AdmissibleCheck {
            admissible: false,
            solved_q: None,
        };
    };
    let k = BigRational::from_integer(kind.time_weight().into());
    let target = half() - k * rp;
    let solved_q = if !in_range(p) || target < BigRational::zero() || target > half() {
        None
    } else if target.is_zero() {
        Some(Exponent::Infinite)
    } else {
        target.recip().to_f64().map(Exponent::Finite)
    };
    let admissible = in_range(p) && in_range(q) && rq == target;
    AdmissibleCheck {
        admissible,
        solved_q,
    }
}

/// A pair (p, q) known to satisfy its admissibility relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub p: Exponent,
    pub q: Exponent,
    pub kind: PairKind,
}

impl AdmissiblePair {
    pub fn new(p: Exponent, q: Exponent, kind: PairKind) -> Result<Self> {
        if !admissible_check(p, q, kind).admissible {
            return Err(Error::NotAdmissible {
                p: p.to_string(),
                q: q.to_string(),
                kind: kind.to_string(),
            });
        }
        Ok(Self { p, q, kind })
    }

    pub fn discrete(p: Exponent, q: Exponent) -> Result<Self> {
        Self::new(p, q, PairKind::Discrete)
    }

    /// The endpoint pair (∞, 2).
    pub fn energy() -> Self {
        Self {
            p: Exponent::Infinite,
            q: Exponent::Finite(2.0),
            kind: PairKind::Discrete,
        }
    }

    pub fn require_discrete(&self) -> Result<()> {
        if self.kind != PairKind::Discrete {
            return Err(Error::NotAdmissible {
                p: self.p.to_string(),
                q: self.q.to_string(),
                kind: PairKind::Discrete.to_string(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        assert!(admissible_check(e("inf"), e("2"), PairKind::Discrete).admissible);
        assert!(admissible_check(e("6"), e("inf"), PairKind::Discrete).admissible);
        assert!(!admissible_check(e("8"), e("4"), PairKind::Discrete).admissible);
        assert!(admissible_check(e("4"), e("inf"), PairKind::Continuous).admissible);
        assert!(!admissible_check(e("4"), e("inf"), PairKind::Discrete).admissible);
    }

    #[test]
    fn solves_for_q() {
        assert_eq!(
            admissible_check(e("9"), e("2"), PairKind::Discrete).solved_q,
            Some(e("6"))
        );
        assert_eq!(
            admissible_check(e("6"), e("2"), PairKind::Discrete).solved_q,
            Some(Exponent::Infinite)
        );
        assert_eq!(
            admissible_check(e("inf"), e("2"), PairKind::Discrete).solved_q,
            Some(e("2"))
        );
        assert_eq!(
            admissible_check(e("12"), e("4"), PairKind::Discrete).solved_q,
            Some(e("4"))
        );
        assert!(admissible_check(e("12"), e("4"), PairKind::Discrete).admissible);
        // 3/4 > 1/2: no q
        assert_eq!(
            admissible_check(e("4"), e("2"), PairKind::Discrete).solved_q,
            None
        );
    }

    #[test]
    fn exactness_is_not_fooled_by_rounding() {
        // 3/7 + 1/14 = 1/2 holds over the rationals, but 14 is exact while 1/7 is not in binary.
        assert!(admissible_check(e("7"), e("14"), PairKind::Discrete).admissible);
        // One ulp off the exact solution.
        assert!(
            !admissible_check(
                e("7"),
                Exponent::Finite(14.000000000000002),
                PairKind::Discrete
            )
            .admissible
        );
    }

    #[test]
    fn out_of_range_exponents() {
        assert!(!admissible_check(e("1.5"), e("inf"), PairKind::Discrete).admissible);
        assert!(AdmissiblePair::discrete(e("8"), e("4")).is_err());
        assert!(AdmissiblePair::discrete(e("6"), e("inf")).is_ok());
    }
}

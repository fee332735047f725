//! Explicit digit-sequence and auxiliary-function constructions: digit words
//! realizing prescribed growth windows, index machinery (L-indices and
//! P-indices with their joint selection), the non-decreasing minorant
//! `g_psi` in both its single-infimum and blockwise forms, and the envelope
//! sequence used for liminf-type lower bounds.

mod digits;
mod envelope;
mod gpsi;
mod indices;

pub use digits::{d_set_digits, e_set_digits, product_jump_witnesses, DigitRule, DsetMode};
pub use envelope::{envelope_sequence, EnvelopeResult};
pub use gpsi::{
    check_gpsi_properties, gpsi_blockwise, gpsi_blockwise_with_case, gpsi_simple,
    gpsi_simple_with_b, AuxCurve, CrossoverRecord, GpsiCase, GpsiResult,
};
pub use indices::{
    brute_force_l_indices, brute_force_p_indices, joint_index, anchor_index, l_indices, p_indices,
    IndexKind, JointIndex, AnchorCase, LPIndexReport,
};

use thiserror::Error;

use crate::scaling::ScalingError;
use crate::sum::CompensatedSum;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error("no integer in the window ({s}, {s_plus_t}] at n = {n}")]
    EmptyWindow { n: usize, s: f64, s_plus_t: f64 },
    #[error("epsilon {epsilon} is invalid here (need {requirement})")]
    InvalidEpsilon {
        epsilon: f64,
        requirement: &'static str,
    },
    #[error("search needs values beyond n = {available}; the function is only tabulated that far")]
    Truncated { available: usize },
    #[error("values exceed f64 range at n = {0}; this construction works in linear scale")]
    Overflow(usize),
    #[error("the ratio sequence a/c never becomes strictly increasing within the horizon")]
    RatioNotMonotone,
    #[error("sequence lengths disagree: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("parameter {name} = {value} out of range")]
    BadParameter { name: &'static str, value: f64 },
}

/// A pair of positive sequences `(s_n, t_n)` with `s_n, t_n >= 2`, given in
/// closed form or tabulated. Used both for digit-window constructions
/// (`s_n < a_n <= s_n + t_n`) and for the truncated dimension formula.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePair {
    pub s: SeqSpec,
    pub t: SeqSpec,
}

/// Closed-form sequence families, evaluated in natural-log domain so that
/// towers like `b^(c^n)` stay representable.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqSpec {
    /// `coef * base^n`
    Exp { coef: f64, base: f64 },
    /// `b^(c^n)`
    Tower { b: f64, c: f64 },
    /// constant `value`
    Const { value: f64 },
    /// `coef * n^p`
    Power { coef: f64, p: f64 },
    Table(Vec<f64>),
}

impl SeqSpec {
    pub fn ln_value(&self, n: usize) -> Result<f64, ConstructError> {
        debug_assert!(n >= 1);
        let v = match self {
            SeqSpec::Exp { coef, base } => coef.ln() + n as f64 * base.ln(),
            SeqSpec::Tower { b, c } => c.powi(n as i32) * b.ln(),
            SeqSpec::Const { value } => value.ln(),
            SeqSpec::Power { coef, p } => coef.ln() + p * (n as f64).ln(),
            SeqSpec::Table(values) => match values.get(n - 1) {
                Some(v) if *v > 0.0 => v.ln(),
                Some(_) => return Err(ConstructError::BadParameter {
                    name: "table entry",
                    value: values[n - 1],
                }),
                None => {
                    return Err(ConstructError::Truncated {
                        available: values.len(),
                    })
                }
            },
        };
        if v.is_nan() {
            return Err(ConstructError::Overflow(n));
        }
        Ok(v)
    }

    /// Linear value; infinite when it overflows f64. Computed directly, not
    /// as `exp(ln_value)`, so integer-valued windows like `2^n` stay exact.
    pub fn value(&self, n: usize) -> Result<f64, ConstructError> {
        let v = match self {
            SeqSpec::Exp { coef, base } => coef * base.powi(n as i32),
            SeqSpec::Tower { b, c } => b.powf(c.powi(n as i32)),
            SeqSpec::Const { value } => *value,
            SeqSpec::Power { coef, p } => coef * (n as f64).powf(*p),
            SeqSpec::Table(values) => match values.get(n - 1) {
                Some(v) => *v,
                None => {
                    return Err(ConstructError::Truncated {
                        available: values.len(),
                    })
                }
            },
        };
        if v.is_nan() {
            return Err(ConstructError::Overflow(n));
        }
        Ok(v)
    }

    /// Parses shorthand like `exp:e`, `exp:2`, `tower:2:3`, `const:2`,
    /// `pow:1.5`.
    pub fn parse(text: &str) -> Result<Self, ConstructError> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || ConstructError::BadParameter {
            name: "sequence shorthand",
            value: f64::NAN,
        };
        let num = |s: &str| -> Result<f64, ConstructError> {
            if s == "e" {
                Ok(std::f64::consts::E)
            } else {
                s.parse().map_err(|_| bad())
            }
        };
        match parts.as_slice() {
            ["exp", base] => Ok(SeqSpec::Exp {
                coef: 1.0,
                base: num(base)?,
            }),
            ["exp", coef, base] => Ok(SeqSpec::Exp {
                coef: num(coef)?,
                base: num(base)?,
            }),
            ["tower", b, c] => Ok(SeqSpec::Tower {
                b: num(b)?,
                c: num(c)?,
            }),
            ["const", v] => Ok(SeqSpec::Const { value: num(v)? }),
            ["pow", p] => Ok(SeqSpec::Power {
                coef: 1.0,
                p: num(p)?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Finite-scale verdict on the two standing hypotheses for `(s_n, t_n)`:
/// `sum log s_k / n` unbounded and `liminf s_n/t_n > 0`, plus the `>= 2`
/// floor from the window definition.
#[derive(Debug, Clone, Copy)]
pub struct PairHypotheses {
    /// Minimum of `s_n / t_n` over the horizon (the `theta` witness).
    pub min_ratio: f64,
    /// `sum log s_k / n` at the horizon vs at horizon/2.
    pub avg_growing: bool,
    /// Minimum of `s_n` and `t_n` over the horizon.
    pub min_value: f64,
}

impl PairHypotheses {
    pub fn hold(&self) -> bool {
        self.min_ratio > 0.0 && self.avg_growing && self.min_value >= 2.0 - 1e-12
    }
}

impl SequencePair {
    pub fn new(s: SeqSpec, t: SeqSpec) -> Self {
        Self { s, t }
    }

    /// Both sequences equal (`s_n = t_n`), the common case in the
    /// constructions.
    pub fn diagonal(s: SeqSpec) -> Self {
        Self { s: s.clone(), t: s }
    }

    pub fn check_hypotheses(&self, horizon: usize) -> Result<PairHypotheses, ConstructError> {
        let mut min_ratio = f64::INFINITY;
        let mut min_value = f64::INFINITY;
        let mut sum = CompensatedSum::new();
        let mut avg_mid = f64::NAN;
        for n in 1..=horizon {
            let ls = self.s.ln_value(n)?;
            let lt = self.t.ln_value(n)?;
            min_ratio = min_ratio.min((ls - lt).exp());
            min_value = min_value.min(ls.exp().min(lt.exp()));
            sum.add(ls);
            if n == horizon / 2 {
                avg_mid = sum.value() / n as f64;
            }
        }
        let avg_end = sum.value() / horizon as f64;
        Ok(PairHypotheses {
            min_ratio,
            avg_growing: avg_end > avg_mid,
            min_value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_shorthand_round_trip() {
        assert_eq!(
            SeqSpec::parse("exp:2").unwrap(),
            SeqSpec::Exp {
                coef: 1.0,
                base: 2.0
            }
        );
        assert!(matches!(SeqSpec::parse("tower:2:3").unwrap(), SeqSpec::Tower { .. }));
        assert!(SeqSpec::parse("fib").is_err());
        let e = SeqSpec::parse("exp:e").unwrap();
        assert!((e.ln_value(3).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tower_values_stay_in_log_domain() {
        let t = SeqSpec::Tower { b: 2.0, c: 2.0 };
        // ln(2^(2^40)) = 2^40 ln 2: far beyond linear f64 for the value
        // itself at larger n, finite in log domain.
        let ln = t.ln_value(40).unwrap();
        assert!((ln - 2f64.powi(40) * std::f64::consts::LN_2).abs() < 1.0);
    }

    #[test]
    fn pair_hypotheses_for_geometric() {
        let pair = SequencePair::diagonal(SeqSpec::Exp {
            coef: 1.0,
            base: std::f64::consts::E,
        });
        let h = pair.check_hypotheses(100).unwrap();
        assert!(h.hold());
        assert!((h.min_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_hypotheses_reject_constant_s() {
        // s_n = 2 constant: sum log s_k / n does not grow.
        let pair = SequencePair::diagonal(SeqSpec::Const { value: 2.0 });
        let h = pair.check_hypotheses(100).unwrap();
        assert!(!h.hold());
        assert!(!h.avg_growing);
    }
}

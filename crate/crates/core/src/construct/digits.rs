//! Digit-word constructions: window-constrained digits `s_n < a_n <= s_n+t_n`,
//! greedy digits realizing `Pi_n >= b^(c^n)`, and the witness scan for
//! products that jump by a power `d` infinitely often.

use num_bigint::BigUint;
use num_traits::One;

use super::{ConstructError, SequencePair};
use crate::coding::{Digit, DigitWord};
use crate::rational::Rat;
use crate::sum::CompensatedSum;

/// How to pick the digit inside the window `(s_n, s_n + t_n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigitRule {
    /// Smallest integer strictly above `s_n`.
    Smallest,
    /// Integer nearest `s_n + t_n/2`, clamped into the window.
    Midpoint,
}

/// Digits beyond this natural log are carried in log scale only.
const EXACT_LN_LIMIT: f64 = 512.0 * std::f64::consts::LN_2;

fn big_from_f64_floor(v: f64) -> Option<BigUint> {
    let r = Rat::from_float(v)?.floor();
    Some(r.numer().magnitude().clone())
}

/// Builds the digit word with `s_n < a_n <= s_n + t_n` for every `n`,
/// verifying membership per digit (exactly while the window endpoints fit
/// `f64`, in log scale beyond).
pub fn e_set_digits(
    pair: &SequencePair,
    depth: usize,
    rule: DigitRule,
) -> Result<DigitWord, ConstructError> {
    let mut word = DigitWord::new();
    for n in 1..=depth {
        let ln_s = pair.s.ln_value(n)?;
        let ln_t = pair.t.ln_value(n)?;
        if ln_s < EXACT_LN_LIMIT && ln_t < EXACT_LN_LIMIT {
            let s = Rat::from_float(pair.s.value(n)?).ok_or(ConstructError::Overflow(n))?;
            let t = Rat::from_float(pair.t.value(n)?).ok_or(ConstructError::Overflow(n))?;
            let upper = &s + &t;
            let smallest = {
                let f = s.floor();
                let f = f.numer().magnitude().clone();
                f + BigUint::one()
            };
            let digit = match rule {
                DigitRule::Smallest => smallest,
                DigitRule::Midpoint => {
                    let mid = &s + &t / Rat::from_float(2.0).unwrap();
                    let rounded = (&mid + Rat::new(1.into(), 2.into()))
                        .floor()
                        .numer()
                        .magnitude()
                        .clone();
                    rounded.max(smallest)
                }
            };
            // In-window verification, exact.
            let digit_rat = Rat::from(num_bigint::BigInt::from(digit.clone()));
            if digit_rat <= s || digit_rat > upper {
                return Err(ConstructError::EmptyWindow {
                    n,
                    s: ln_s.exp(),
                    s_plus_t: (ln_s.exp()) + (ln_t.exp()),
                });
            }
            word.push(Digit::Exact(digit));
        } else {
            // Window endpoints beyond exact range: the +1 of "smallest" is
            // invisible at this scale; verify membership in log scale.
            let ln_digit = match rule {
                DigitRule::Smallest => ln_s,
                DigitRule::Midpoint => ln_s + 0.5f64.mul_add((ln_t - ln_s).exp(), 1.0).ln(),
            };
            let ln_upper = ln_s + (ln_t - ln_s).exp().ln_1p();
            if ln_digit > ln_upper + 1e-12 {
                return Err(ConstructError::EmptyWindow {
                    n,
                    s: f64::INFINITY,
                    s_plus_t: f64::INFINITY,
                });
            }
            word.push(Digit::Huge { ln: ln_digit });
        }
    }
    Ok(word)
}

/// Constraint mode for [`d_set_digits`]: every prefix, or only the prefixes
/// in a designated subsequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DsetMode {
    Eventually,
    InfinitelyOften(Vec<usize>),
}

/// Greedy minimal digits with `ln Pi_n >= c^n ln b` at every constrained
/// prefix. Unconstrained positions take digit 1. Comparisons run in log
/// domain with a relative tie tolerance, so integer-exact targets (say
/// `b = c = 2`) resolve to the exact minimal digit.
pub fn d_set_digits(
    b: f64,
    c: f64,
    depth: usize,
    mode: DsetMode,
) -> Result<DigitWord, ConstructError> {
    if !(b > 1.0) {
        return Err(ConstructError::BadParameter { name: "b", value: b });
    }
    if !(c > 1.0) {
        return Err(ConstructError::BadParameter { name: "c", value: c });
    }
    let constrained = |n: usize| match &mode {
        DsetMode::Eventually => true,
        DsetMode::InfinitelyOften(subseq) => subseq.contains(&n),
    };
    let mut word = DigitWord::new();
    let mut ln_pi = CompensatedSum::new();
    for n in 1..=depth {
        let target = c.powi(n as i32) * b.ln();
        if !target.is_finite() {
            return Err(ConstructError::Overflow(n));
        }
        // A few ulps of slack so integer-exact targets resolve to the exact
        // minimal digit instead of one above it.
        let tol = 8.0 * f64::EPSILON * target.abs().max(1.0);
        let need = target - ln_pi.value();
        let digit = if !constrained(n) || need <= tol {
            Digit::Exact(BigUint::one())
        } else if need < EXACT_LN_LIMIT {
            // Smallest integer m with ln Pi + ln m >= target (- tol).
            let mut m = big_from_f64_floor((need - tol).exp())
                .ok_or(ConstructError::Overflow(n))?
                .max(BigUint::one());
            if m.bits() <= 52 {
                while ln_of_big(&m) < need - tol {
                    m += BigUint::one();
                }
                debug_assert!(
                    m == BigUint::one() || ln_of_big(&(&m - BigUint::one())) < need - tol
                );
            } else {
                // Above 2^52 adjacent integers are sub-ulp apart in log
                // scale; minimality only makes sense at f64 resolution.
                while ln_of_big(&m) < need - tol {
                    m += (&m >> 50) + BigUint::one();
                }
            }
            Digit::Exact(m)
        } else {
            Digit::Huge { ln: need }
        };
        ln_pi.add(digit.ln());
        word.push(digit);
    }
    // Postcondition: the constraint holds at every constrained prefix.
    let mut check = CompensatedSum::new();
    for (i, d) in word.digits().iter().enumerate() {
        check.add(d.ln());
        let n = i + 1;
        if constrained(n) {
            let target = c.powi(n as i32) * b.ln();
            debug_assert!(
                check.value() >= target - 1e-6 * target.abs().max(1.0),
                "constraint violated at n = {n}"
            );
        }
    }
    Ok(word)
}

fn ln_of_big(v: &BigUint) -> f64 {
    crate::rational::ln_biguint(v)
}

/// Indices `n` with `Pi_(n+1) > max(Pi_n^d, b^(d^(n+1)))`, compared in log
/// domain. For words realizing `Pi_n >= b^(c^n)` with `d < c`, witnesses
/// exist once the depth clears a small threshold.
pub fn product_jump_witnesses(
    word: &DigitWord,
    b: f64,
    c: f64,
    d: f64,
) -> Result<Vec<usize>, ConstructError> {
    if !(d > 1.0 && d < c) {
        return Err(ConstructError::BadParameter { name: "d", value: d });
    }
    if !(b > 1.0) {
        return Err(ConstructError::BadParameter { name: "b", value: b });
    }
    let ln_pi = crate::sum::prefix_sums(&word.ln_digits());
    let mut witnesses = Vec::new();
    for n in 1..word.len() {
        let lhs = ln_pi[n]; // ln Pi_(n+1), 0-based offset
        let rhs = (d * ln_pi[n - 1]).max(d.powi(n as i32 + 1) * b.ln());
        if lhs > rhs {
            witnesses.push(n);
        }
    }
    Ok(witnesses)
}

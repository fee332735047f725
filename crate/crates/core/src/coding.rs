//! Symbolic coding of points and cylinder intervals with exact endpoints.
//!
//! Every point whose forward orbit avoids branch boundaries has a unique
//! digit sequence `a_1, a_2, ...` with `T^(k-1)(x)` in the interior of
//! branch `a_k`. The cylinder of a finite word is the set of points opening
//! with those digits; for Mobius/affine branches its endpoints are exact
//! rationals obtained by composing inverse branches, and its diameter is
//! sandwiched between `C^-n / (i_1...i_n)^gamma` and `C^n / (i_1...i_n)^gamma`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::maps::{MapError, MapSpec, Mobius};
use crate::rational::{format_rat, ln_biguint, ln_rat, rat, Rat};
use crate::sum::CompensatedSum;

/// Default bit budget for exact cylinder endpoints (2^20 bits per matrix
/// entry); override with the `FASTLYAP_PRECISION_BITS` environment variable.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

pub fn bit_budget() -> u64 {
    std::env::var("FASTLYAP_PRECISION_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BIT_BUDGET)
}

#[derive(Debug, Error)]
pub enum CodingError {
    #[error("orbit enters the exceptional set Q at step {step}: point {}", format_rat(.point))]
    ExceptionalOrbit { step: usize, point: Rat },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("empty digit word")]
    EmptyWord,
    #[error("digit at position {0} exceeds the representable range for exact endpoints")]
    HugeDigit(usize),
    #[error("exact cylinder endpoints exceed the bit budget of {budget} bits at depth {depth}")]
    BitBudget { depth: usize, budget: u64 },
    #[error("cylinders stopped contracting before reaching tolerance {tolerance} (diameter {diameter} at depth {depth}); possible hypothesis violation")]
    NonContracting {
        depth: usize,
        diameter: f64,
        tolerance: f64,
    },
    #[error("digit stream exhausted at depth {depth} with diameter {diameter} > tolerance {tolerance}")]
    DigitsExhausted {
        depth: usize,
        diameter: f64,
        tolerance: f64,
    },
}

/// A single symbolic digit. Digits produced by orbit coding are always
/// exact; constructions like `a_n ~ b^(c^n)` can exceed any integer budget,
/// in which case only the natural log of the digit is carried.
#[derive(Debug, Clone, PartialEq)]
pub enum Digit {
    Exact(BigUint),
    Huge { ln: f64 },
}

impl Digit {
    pub fn from_u64(v: u64) -> Self {
        Digit::Exact(BigUint::from(v))
    }

    pub fn ln(&self) -> f64 {
        match self {
            Digit::Exact(v) => ln_biguint(v),
            Digit::Huge { ln } => *ln,
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            Digit::Exact(v) => Some(v),
            Digit::Huge { .. } => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.as_exact().and_then(|v| v.to_u64())
    }
}

impl std::fmt::Display for Digit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Digit::Exact(v) => write!(f, "{v}"),
            Digit::Huge { ln } => write!(f, "exp({ln})"),
        }
    }
}

/// A finite word `(i_1, ..., i_n)` of positive integer digits. The empty
/// word denotes the whole interval.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DigitWord {
    digits: Vec<Digit>,
}

impl DigitWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_digits<I: IntoIterator<Item = u64>>(digits: I) -> Self {
        Self {
            digits: digits.into_iter().map(Digit::from_u64).collect(),
        }
    }

    pub fn push(&mut self, digit: Digit) {
        debug_assert!(digit.ln() >= 0.0, "digits are positive integers");
        self.digits.push(digit);
    }

    pub fn push_u64(&mut self, digit: u64) {
        assert!(digit >= 1);
        self.digits.push(Digit::from_u64(digit));
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn extended(&self, digit: u64) -> Self {
        let mut next = self.clone();
        next.push_u64(digit);
        next
    }

    /// Natural logs of the digits.
    pub fn ln_digits(&self) -> Vec<f64> {
        self.digits.iter().map(Digit::ln).collect()
    }

    /// `ln(i_1 ... i_n)` with compensated summation.
    pub fn ln_product(&self) -> f64 {
        let mut s = CompensatedSum::new();
        for d in &self.digits {
            s.add(d.ln());
        }
        s.value()
    }

    /// Parses a comma-separated digit line; `exp(x)` marks a log-scaled digit.
    pub fn parse(line: &str) -> Result<Self, String> {
        let mut word = DigitWord::new();
        for tok in line.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            if let Some(inner) = tok.strip_prefix("exp(").and_then(|t| t.strip_suffix(')')) {
                let ln: f64 = inner.parse().map_err(|_| format!("bad digit {tok:?}"))?;
                word.push(Digit::Huge { ln });
            } else {
                let v: BigUint = tok.parse().map_err(|_| format!("bad digit {tok:?}"))?;
                if v.is_zero() {
                    return Err("digits must be >= 1".into());
                }
                word.push(Digit::Exact(v));
            }
        }
        Ok(word)
    }
}

impl std::fmt::Display for DigitWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Exact finite orbit of a point together with its coding and per-step
/// derivative logs.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub point: Rat,
    /// `T^0(x), ..., T^(n-1)(x)`, exact.
    pub orbit: Vec<Rat>,
    pub word: DigitWord,
    /// `ln |T'(T^(k-1) x)|` per step.
    pub derivative_logs: Vec<f64>,
}

/// Codes `x` to `depth` digits along its exact orbit. Fails with the step
/// index when the orbit hits a branch boundary.
pub fn encode(map: &MapSpec, x: &Rat, depth: usize) -> Result<OrbitRecord, CodingError> {
    let mut orbit = Vec::with_capacity(depth);
    let mut word = DigitWord::new();
    let mut derivative_logs = Vec::with_capacity(depth);
    let mut point = x.clone();
    for step in 0..depth {
        let digit = map.locate(&point).map_err(|_| CodingError::ExceptionalOrbit {
            step,
            point: point.clone(),
        })?;
        let branch = map.branch_big(&digit)?;
        derivative_logs.push(ln_rat(&branch.matrix.derivative_abs(&point)?));
        orbit.push(point.clone());
        word.push(Digit::Exact(digit));
        point = branch.matrix.apply(&point)?;
    }
    Ok(OrbitRecord {
        point: x.clone(),
        orbit,
        word,
        derivative_logs,
    })
}

/// A cylinder interval `I_n(i_1..i_n)` with exact endpoints and the
/// two-sided analytic diameter bounds `C^±n / (i_1...i_n)^gamma`.
#[derive(Debug, Clone)]
pub struct CylinderInterval {
    pub word: DigitWord,
    pub lo: Rat,
    pub hi: Rat,
    pub diameter: Rat,
    /// Analytic lower bound for the diameter (rounded down when inexact).
    pub bound_lo: Rat,
    /// Analytic upper bound for the diameter (rounded up when inexact).
    pub bound_hi: Rat,
}

impl CylinderInterval {
    pub fn contains(&self, x: &Rat) -> bool {
        *x > self.lo && *x < self.hi
    }

    pub fn contains_interval(&self, other: &CylinderInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / rat(2, 1)
    }
}

/// Exact cylinder for a word of exact digits: the image of `[0,1]` under the
/// composed inverse branches, composed left to right.
pub fn cylinder(map: &MapSpec, word: &DigitWord) -> Result<CylinderInterval, CodingError> {
    cylinder_with_budget(map, word, bit_budget())
}

pub fn cylinder_with_budget(
    map: &MapSpec,
    word: &DigitWord,
    budget: u64,
) -> Result<CylinderInterval, CodingError> {
    if word.is_empty() {
        return Err(CodingError::EmptyWord);
    }
    let mut composed = Mobius::identity();
    for (pos, digit) in word.digits().iter().enumerate() {
        let value = digit.as_exact().ok_or(CodingError::HugeDigit(pos))?;
        composed = compose_inverse(map, &composed, value)?;
        if composed.bit_size() > budget {
            return Err(CodingError::BitBudget {
                depth: pos + 1,
                budget,
            });
        }
    }
    let (lo, hi) = unit_image(&composed)?;
    let diameter = &hi - &lo;
    let (bound_lo, bound_hi) = diameter_bounds(map, word);
    Ok(CylinderInterval {
        word: word.clone(),
        lo,
        hi,
        diameter,
        bound_lo,
        bound_hi,
    })
}

fn compose_inverse(
    map: &MapSpec,
    composed: &Mobius,
    digit: &BigUint,
) -> Result<Mobius, CodingError> {
    let branch = map.branch_big(digit)?;
    // Inverse branches are only defined on all of [0,1] for full branches.
    let (img_lo, img_hi) = branch.image()?;
    if !img_lo.is_zero() || img_hi != rat(1, 1) {
        return Err(CodingError::Map(MapError::Malformed(format!(
            "branch {digit} is not onto [0,1]; its inverse branch is partial"
        ))));
    }
    Ok(composed.compose(&branch.matrix.inverse()))
}

fn unit_image(composed: &Mobius) -> Result<(Rat, Rat), CodingError> {
    let a = composed.apply(&rat(0, 1))?;
    let b = composed.apply(&rat(1, 1))?;
    Ok(if a <= b { (a, b) } else { (b, a) })
}

/// The analytic diameter bounds as exact rationals. When `gamma` is an
/// integer and the digits are exact the bounds are exact; otherwise they are
/// rounded outward from log-domain values so the sandwich direction is
/// preserved.
fn diameter_bounds(map: &MapSpec, word: &DigitWord) -> (Rat, Rat) {
    let n = word.len();
    let all_exact = word.digits().iter().all(|d| d.as_exact().is_some());
    if let (Some(g), true) = (map.gamma_integer(), all_exact) {
        let mut product = BigUint::one();
        for d in word.digits() {
            product *= d.as_exact().unwrap();
        }
        let pow = Rat::from(BigInt::from(product)).pow(g as i32);
        let c_pow = map.distortion_rat().pow(n as i32);
        return (c_pow.recip() / &pow, c_pow / pow);
    }
    let (ln_lo, ln_hi) = ln_diameter_bounds(map, word);
    (rat_below(ln_lo), rat_above(ln_hi))
}

/// Log-domain diameter bounds; valid for any word, including log-scaled
/// digits far beyond exact representation.
pub fn ln_diameter_bounds(map: &MapSpec, word: &DigitWord) -> (f64, f64) {
    let n = word.len() as f64;
    let ln_product = word.ln_product();
    let ln_c = map.distortion.ln();
    (
        -n * ln_c - map.gamma * ln_product,
        n * ln_c - map.gamma * ln_product,
    )
}

fn rat_below(ln_value: f64) -> Rat {
    let v = ln_value.exp();
    let nudged = if v.is_finite() {
        f64_prev(v * (1.0 - 1e-12))
    } else {
        f64::MAX
    };
    Rat::from_float(nudged.max(0.0)).unwrap_or_else(|| rat(0, 1))
}

fn rat_above(ln_value: f64) -> Rat {
    let v = ln_value.exp();
    if !v.is_finite() {
        // Beyond f64 range: a crude power-of-two upper bound still preserves
        // the sandwich direction.
        let exp2 = (ln_value / std::f64::consts::LN_2).ceil() as i64;
        return Rat::from(BigInt::from(2u32)).pow(exp2.clamp(1, 1 << 20) as i32);
    }
    Rat::from_float(f64_next(v * (1.0 + 1e-12))).unwrap_or_else(|| rat(1, 1))
}

fn f64_next(v: f64) -> f64 {
    f64::from_bits(v.to_bits() + 1)
}

fn f64_prev(v: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        f64::from_bits(v.to_bits() - 1)
    }
}

/// Result of realizing a digit stream as a point.
#[derive(Debug, Clone)]
pub struct DecodedPoint {
    pub point: Rat,
    pub depth: usize,
    pub cylinder: CylinderInterval,
}

fn decode_search<I>(
    map: &MapSpec,
    digits: I,
    tolerance: f64,
    cap: usize,
) -> Result<CylinderInterval, CodingError>
where
    I: IntoIterator<Item = u64>,
{
    assert!(tolerance > 0.0, "tolerance must be positive");
    let budget = bit_budget();
    let mut composed = Mobius::identity();
    let mut word = DigitWord::new();
    let mut last: Option<CylinderInterval> = None;
    for digit in digits {
        let depth = word.len() + 1;
        if depth > cap {
            let diameter = last
                .map(|c| crate::rational::to_f64(&c.diameter))
                .unwrap_or(1.0);
            return Err(CodingError::NonContracting {
                depth: cap,
                diameter,
                tolerance,
            });
        }
        composed = compose_inverse(map, &composed, &BigUint::from(digit))?;
        if composed.bit_size() > budget {
            return Err(CodingError::BitBudget { depth, budget });
        }
        word.push_u64(digit);
        let (lo, hi) = unit_image(&composed)?;
        let diameter = &hi - &lo;
        let (bound_lo, bound_hi) = diameter_bounds(map, &word);
        let cyl = CylinderInterval {
            word: word.clone(),
            lo,
            hi,
            diameter,
            bound_lo,
            bound_hi,
        };
        if crate::rational::to_f64(&cyl.diameter) < tolerance {
            return Ok(cyl);
        }
        last = Some(cyl);
    }
    let (depth, diameter) = match &last {
        Some(c) => (c.word.len(), crate::rational::to_f64(&c.diameter)),
        None => (0, 1.0),
    };
    Err(CodingError::DigitsExhausted {
        depth,
        diameter,
        tolerance,
    })
}

/// Default tolerance for [`decode`].
pub const DEFAULT_DECODE_TOLERANCE: f64 = 1e-12;

/// Numeric decode: the midpoint of the shallowest cylinder with diameter
/// below `tolerance` (default `1e-12`). The iteration cap guards against
/// non-contracting cylinder chains (a hypothesis violation).
pub fn decode<I>(map: &MapSpec, digits: I, tolerance: f64) -> Result<DecodedPoint, CodingError>
where
    I: IntoIterator<Item = u64>,
{
    let cyl = decode_search(map, digits, tolerance, 4096)?;
    Ok(DecodedPoint {
        point: cyl.midpoint(),
        depth: cyl.word.len(),
        cylinder: cyl,
    })
}

/// Exact decode mode: returns the cylinder itself instead of a point.
pub fn decode_exact<I>(
    map: &MapSpec,
    digits: I,
    tolerance: f64,
) -> Result<CylinderInterval, CodingError>
where
    I: IntoIterator<Item = u64>,
{
    decode_search(map, digits, tolerance, 4096)
}

/// Continued-fraction convergent denominators `q_k` for a digit word
/// (`q_0 = 1`, `q_k = a_k q_{k-1} + q_{k-2}`). For the Gauss map the exact
/// cylinder diameter is `1 / (q_n (q_n + q_{n-1}))`.
pub fn convergent_denominators(word: &DigitWord) -> Option<Vec<BigUint>> {
    let mut prev = BigUint::zero();
    let mut cur = BigUint::one();
    let mut out = Vec::with_capacity(word.len() + 1);
    out.push(cur.clone());
    for d in word.digits() {
        let a = d.as_exact()?;
        let next = a * &cur + &prev;
        prev = cur;
        cur = next;
        out.push(cur.clone());
    }
    Some(out)
}

//! Markov-Renyi maps: branch structure, exact evaluation, and finite-scale
//! validation of the five defining hypotheses.
//!
//! A map is a countable family of branches `T_n : I_n -> [0,1]` on disjoint
//! open subintervals of `[0,1]` that are adjacent in one direction, each a
//! bijection onto `(0,1)` up to closure, with `|T_n'|` comparable to
//! `n^gamma` within a distortion factor `C`. Built-in families (Gauss,
//! Renyi) generate branches lazily from a closed form; user maps supply a
//! finite branch list.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rat, ln_rat, parse_rat, rat, to_f64, Rat};

#[derive(Debug, Error)]
pub enum MapError {
    #[error("malformed map document: {0}")]
    Malformed(String),
    #[error("branch intervals overlap: branch {0} and branch {1}")]
    OverlappingIntervals(u64, u64),
    #[error("gamma must exceed 1 (got {0})")]
    BadGamma(f64),
    #[error("distortion constant C must exceed 1 (got {0})")]
    BadDistortion(f64),
    #[error("expansion hypothesis unsatisfiable: every branch has |T'| <= 1 and no parabolic point is declared")]
    NotExpanding,
    #[error("point {} lies in the exceptional set Q (branch boundary or outside the branch union)", format_rat(.0))]
    Boundary(Rat),
    #[error("branch {0} does not exist for this map")]
    NoSuchBranch(BigUint),
    #[error("branch form is singular on its interval")]
    SingularBranch,
}

/// Integer Mobius transform `x -> (a x + b) / (c x + d)`, `ad - bc != 0`.
///
/// Affine branches are stored in the same shape with `c = 0`. Closure under
/// composition and inversion is what keeps cylinder endpoints exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mobius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mobius {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
        .reduced()
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Divides all entries by their gcd and fixes the sign of the leading
    /// nonzero entry, so composed matrices stay small.
    pub fn reduced(mut self) -> Self {
        let mut g = self.a.magnitude().gcd(self.b.magnitude());
        g = g.gcd(self.c.magnitude()).gcd(self.d.magnitude());
        if !g.is_zero() && !g.is_one() {
            let g = BigInt::from(g);
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
            self.d /= &g;
        }
        let lead_negative = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .find(|v| !v.is_zero())
            .map(|v| v.is_negative())
            .unwrap_or(false);
        if lead_negative {
            self.a = -self.a.clone();
            self.b = -self.b.clone();
            self.c = -self.c.clone();
            self.d = -self.d.clone();
        }
        self
    }

    pub fn apply(&self, x: &Rat) -> Result<Rat, MapError> {
        let den = &self.c * x.numer() + &self.d * x.denom();
        if den.is_zero() {
            return Err(MapError::SingularBranch);
        }
        let num = &self.a * x.numer() + &self.b * x.denom();
        Ok(Rat::new(num, den))
    }

    /// `|T'(x)| = |ad - bc| / (c x + d)^2`, computed exactly.
    pub fn derivative_abs(&self, x: &Rat) -> Result<Rat, MapError> {
        let den_lin = Rat::new(&self.c * x.numer() + &self.d * x.denom(), x.denom().clone());
        if den_lin.is_zero() {
            return Err(MapError::SingularBranch);
        }
        let det = Rat::from(self.det().abs());
        Ok(det / (&den_lin * &den_lin))
    }

    /// Matrix inverse up to scale: the inverse transform as a Mobius map.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
        .reduced()
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
        .reduced()
    }

    /// Largest entry size in bits; used for the exact-mode bit budget.
    pub fn bit_size(&self) -> u64 {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|v| v.magnitude().bits())
            .max()
            .unwrap_or(0)
    }
}

/// Declared analytic form of a branch.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchForm {
    /// `x -> (a x + b)/(c x + d)` with integer coefficients.
    Mobius { a: i64, b: i64, c: i64, d: i64 },
    /// `x -> slope * x + intercept` with rational coefficients.
    Affine { slope: Rat, intercept: Rat },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// One branch `T_n` on its open interval `I_n = (lo, hi)`. Indices are big
/// integers: deep in a cusp the containing branch index exceeds any fixed
/// width.
#[derive(Debug, Clone)]
pub struct BranchSpec {
    pub index: BigUint,
    pub lo: Rat,
    pub hi: Rat,
    pub matrix: Mobius,
    pub orientation: Orientation,
}

impl BranchSpec {
    fn from_form(index: u64, lo: Rat, hi: Rat, form: &BranchForm) -> Result<Self, MapError> {
        let matrix = match form {
            BranchForm::Mobius { a, b, c, d } => Mobius::new(*a, *b, *c, *d),
            BranchForm::Affine { slope, intercept } => {
                // (p/q) x + (u/v) = (p v x + u q) / (q v)
                let (p, q) = (slope.numer().clone(), slope.denom().clone());
                let (u, v) = (intercept.numer().clone(), intercept.denom().clone());
                Mobius {
                    a: &p * &v,
                    b: &u * &q,
                    c: BigInt::zero(),
                    d: &q * &v,
                }
                .reduced()
            }
        };
        if matrix.det().is_zero() {
            return Err(MapError::SingularBranch);
        }
        if lo >= hi {
            return Err(MapError::Malformed(format!(
                "branch {index}: interval ({}, {}) is empty",
                format_rat(&lo),
                format_rat(&hi)
            )));
        }
        // The pole of the Mobius map must stay off the closed interval.
        let pole_inside = {
            let at_lo = &matrix.c * lo.numer() + &matrix.d * lo.denom();
            let at_hi = &matrix.c * hi.numer() + &matrix.d * hi.denom();
            at_lo.is_zero() || at_hi.is_zero() || (at_lo.sign() != at_hi.sign())
        };
        if pole_inside {
            return Err(MapError::SingularBranch);
        }
        let orientation = if matrix.apply(&lo)? < matrix.apply(&hi)? {
            Orientation::Increasing
        } else {
            Orientation::Decreasing
        };
        Ok(Self {
            index: BigUint::from(index),
            lo,
            hi,
            matrix,
            orientation,
        })
    }

    pub fn contains_interior(&self, x: &Rat) -> bool {
        *x > self.lo && *x < self.hi
    }

    /// Image endpoints of the closed interval, sorted.
    pub fn image(&self) -> Result<(Rat, Rat), MapError> {
        let a = self.matrix.apply(&self.lo)?;
        let b = self.matrix.apply(&self.hi)?;
        Ok(if a <= b { (a, b) } else { (b, a) })
    }
}

#[derive(Debug, Clone)]
pub struct Parabolic {
    pub point: Rat,
}

#[derive(Debug, Clone)]
enum BranchFamily {
    Gauss,
    Renyi,
    /// User-supplied branches, in declaration order (index = position + 1).
    Explicit(Vec<BranchSpec>),
}

/// A Markov-Renyi map: branch family plus the constants of the derivative
/// comparison and the optional parabolic point.
#[derive(Debug, Clone)]
pub struct MapSpec {
    family: BranchFamily,
    pub gamma: f64,
    /// The distortion constant `C > 1` in `C^-1 n^gamma <= |T_n'| <= C n^gamma`.
    pub distortion: f64,
    pub parabolic: Option<Parabolic>,
    /// Iterate count `m` for the expansion check `|(T^m)'| > 1`.
    pub expansion_m: u32,
    name: String,
}

impl MapSpec {
    /// The Gauss map `x -> 1/x - floor(1/x)`, branches `I_n = (1/(n+1), 1/n)`.
    pub fn gauss() -> Self {
        Self {
            family: BranchFamily::Gauss,
            gamma: 2.0,
            distortion: 4.0,
            parabolic: None,
            expansion_m: 2,
            name: "gauss".into(),
        }
    }

    /// The Renyi map `x -> 1/(1-x) - floor(1/(1-x))`, branches
    /// `I_n = ((n-1)/n, n/(n+1))`, parabolic fixed point at zero.
    pub fn renyi() -> Self {
        Self {
            family: BranchFamily::Renyi,
            gamma: 2.0,
            distortion: 4.0,
            parabolic: Some(Parabolic { point: rat(0, 1) }),
            expansion_m: 1,
            name: "renyi".into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.family, BranchFamily::Explicit(_))
    }

    /// Number of declared branches; `None` for the countable builtins.
    pub fn branch_count(&self) -> Option<usize> {
        match &self.family {
            BranchFamily::Explicit(list) => Some(list.len()),
            _ => None,
        }
    }

    /// Branch `n` for a small index (1-based).
    pub fn branch(&self, n: u64) -> Result<BranchSpec, MapError> {
        self.branch_big(&BigUint::from(n))
    }

    /// Branch `n` (1-based). Builtins generate it from the family formula
    /// for arbitrarily large indices.
    pub fn branch_big(&self, n: &BigUint) -> Result<BranchSpec, MapError> {
        if n.is_zero() {
            return Err(MapError::NoSuchBranch(n.clone()));
        }
        let ni = BigInt::from(n.clone());
        match &self.family {
            BranchFamily::Gauss => {
                // T_n(x) = 1/x - n = (-n x + 1)/x on (1/(n+1), 1/n)
                Ok(BranchSpec {
                    index: n.clone(),
                    lo: Rat::new(BigInt::one(), &ni + 1),
                    hi: Rat::new(BigInt::one(), ni.clone()),
                    matrix: Mobius {
                        a: -&ni,
                        b: BigInt::one(),
                        c: BigInt::one(),
                        d: BigInt::zero(),
                    },
                    orientation: Orientation::Decreasing,
                })
            }
            BranchFamily::Renyi => {
                // T_n(x) = 1/(1-x) - n = (n x + 1 - n)/(-x + 1) on ((n-1)/n, n/(n+1))
                Ok(BranchSpec {
                    index: n.clone(),
                    lo: Rat::new(&ni - 1, ni.clone()),
                    hi: Rat::new(ni.clone(), &ni + 1),
                    matrix: Mobius {
                        a: ni.clone(),
                        b: BigInt::one() - &ni,
                        c: -BigInt::one(),
                        d: BigInt::one(),
                    },
                    orientation: Orientation::Increasing,
                })
            }
            BranchFamily::Explicit(list) => {
                let idx = n
                    .to_usize()
                    .ok_or_else(|| MapError::NoSuchBranch(n.clone()))?;
                list.get(idx - 1)
                    .cloned()
                    .ok_or_else(|| MapError::NoSuchBranch(n.clone()))
            }
        }
    }

    /// The unique branch whose open interval contains `x`, or a boundary
    /// error when `x` lies in the exceptional set.
    pub fn locate(&self, x: &Rat) -> Result<BigUint, MapError> {
        match &self.family {
            BranchFamily::Gauss => {
                // x in (1/(n+1), 1/n)  <=>  n < 1/x < n+1
                if !x.is_positive() || *x >= rat(1, 1) {
                    return Err(MapError::Boundary(x.clone()));
                }
                let inv = x.recip();
                let floor = inv.floor();
                if inv == floor {
                    return Err(MapError::Boundary(x.clone()));
                }
                Ok(floor.numer().magnitude().clone())
            }
            BranchFamily::Renyi => {
                // x in ((n-1)/n, n/(n+1))  <=>  n < 1/(1-x) < n+1
                if x.is_negative() || x.is_zero() || *x >= rat(1, 1) {
                    return Err(MapError::Boundary(x.clone()));
                }
                let inv = (rat(1, 1) - x).recip();
                let floor = inv.floor();
                if inv == floor {
                    return Err(MapError::Boundary(x.clone()));
                }
                Ok(floor.numer().magnitude().clone())
            }
            BranchFamily::Explicit(list) => list
                .iter()
                .find(|b| b.contains_interior(x))
                .map(|b| b.index.clone())
                .ok_or_else(|| MapError::Boundary(x.clone())),
        }
    }

    /// `T(x)` computed exactly, together with the branch index.
    pub fn evaluate(&self, x: &Rat) -> Result<(Rat, BigUint), MapError> {
        let n = self.locate(x)?;
        let branch = self.branch_big(&n)?;
        Ok((branch.matrix.apply(x)?, n))
    }

    /// `|T'(x)|` computed exactly for the branch containing `x`.
    pub fn derivative_abs(&self, x: &Rat) -> Result<Rat, MapError> {
        let n = self.locate(x)?;
        self.branch_big(&n)?.matrix.derivative_abs(x)
    }

    /// `gamma` as an exact integer when it is one; enables exact Hypothesis
    /// (5) comparisons and exact cylinder bounds.
    pub fn gamma_integer(&self) -> Option<u32> {
        let r = self.gamma.round();
        if (self.gamma - r).abs() < 1e-12 && (1.0..4294967295.0).contains(&r) {
            Some(r as u32)
        } else {
            None
        }
    }

    /// `C` as an exact rational (every finite f64 is one).
    pub fn distortion_rat(&self) -> Rat {
        Rat::from_float(self.distortion).expect("distortion constant is finite")
    }
}

// ---------------------------------------------------------------------------
// Map-spec documents

#[derive(Deserialize)]
struct MapDocument {
    builtin: Option<String>,
    gamma: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    branches: Option<Vec<BranchDocument>>,
    parabolic: Option<ParabolicDocument>,
    m: Option<u32>,
}

#[derive(Deserialize)]
struct BranchDocument {
    interval: [String; 2],
    mobius: Option<[i64; 4]>,
    affine: Option<AffineDocument>,
}

#[derive(Deserialize)]
struct AffineDocument {
    slope: String,
    intercept: String,
}

#[derive(Deserialize)]
struct ParabolicDocument {
    point: String,
}

/// Loads a map from its JSON document: either `{"builtin": "gauss"|"renyi"}`
/// or an explicit branch list with `gamma` and `C`. Exact rationals are
/// written as `"p/q"` strings.
pub fn load_map(document: &str) -> Result<MapSpec, MapError> {
    let doc: MapDocument =
        serde_json::from_str(document).map_err(|e| MapError::Malformed(e.to_string()))?;
    if let Some(name) = doc.builtin {
        return match name.as_str() {
            "gauss" => Ok(MapSpec::gauss()),
            "renyi" => Ok(MapSpec::renyi()),
            other => Err(MapError::Malformed(format!("unknown builtin {other:?}"))),
        };
    }
    let gamma = doc
        .gamma
        .ok_or_else(|| MapError::Malformed("missing gamma".into()))?;
    if !(gamma > 1.0) {
        return Err(MapError::BadGamma(gamma));
    }
    let distortion = doc
        .c
        .ok_or_else(|| MapError::Malformed("missing C".into()))?;
    if !(distortion > 1.0) {
        return Err(MapError::BadDistortion(distortion));
    }
    let branch_docs = doc
        .branches
        .ok_or_else(|| MapError::Malformed("missing branches".into()))?;
    if branch_docs.is_empty() {
        return Err(MapError::Malformed("empty branch list".into()));
    }

    let mut branches = Vec::with_capacity(branch_docs.len());
    for (i, bd) in branch_docs.iter().enumerate() {
        let lo = parse_rat(&bd.interval[0]).map_err(MapError::Malformed)?;
        let hi = parse_rat(&bd.interval[1]).map_err(MapError::Malformed)?;
        let form = match (&bd.mobius, &bd.affine) {
            (Some([a, b, c, d]), None) => BranchForm::Mobius {
                a: *a,
                b: *b,
                c: *c,
                d: *d,
            },
            (None, Some(aff)) => BranchForm::Affine {
                slope: parse_rat(&aff.slope).map_err(MapError::Malformed)?,
                intercept: parse_rat(&aff.intercept).map_err(MapError::Malformed)?,
            },
            _ => {
                return Err(MapError::Malformed(format!(
                    "branch {} must declare exactly one of mobius or affine",
                    i + 1
                )))
            }
        };
        branches.push(BranchSpec::from_form(i as u64 + 1, lo, hi, &form)?);
    }

    // Reject overlapping intervals (exact comparison on sorted positions).
    let mut order: Vec<usize> = (0..branches.len()).collect();
    order.sort_by(|&i, &j| branches[i].lo.cmp(&branches[j].lo));
    for w in order.windows(2) {
        let (left, right) = (&branches[w[0]], &branches[w[1]]);
        if right.lo < left.hi {
            return Err(MapError::OverlappingIntervals(
                left.index.to_u64().unwrap_or(u64::MAX),
                right.index.to_u64().unwrap_or(u64::MAX),
            ));
        }
    }

    let parabolic = match doc.parabolic {
        Some(p) => Some(Parabolic {
            point: parse_rat(&p.point).map_err(MapError::Malformed)?,
        }),
        None => None,
    };

    // A map whose every branch has |T'| <= 1 everywhere can never satisfy
    // the expansion hypothesis, declared parabolic point or not beyond one.
    if parabolic.is_none() {
        let one = rat(1, 1);
        let all_contracting = branches.iter().all(|b| {
            let lo = b.matrix.derivative_abs(&b.lo);
            let hi = b.matrix.derivative_abs(&b.hi);
            match (lo, hi) {
                (Ok(l), Ok(h)) => l <= one && h <= one,
                _ => false,
            }
        });
        if all_contracting {
            return Err(MapError::NotExpanding);
        }
    }

    Ok(MapSpec {
        family: BranchFamily::Explicit(branches),
        gamma,
        distortion,
        parabolic,
        expansion_m: doc.m.unwrap_or(1),
        name: "custom".into(),
    })
}

// ---------------------------------------------------------------------------
// Hypothesis validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The hypothesis quantifies over data a finite check cannot see.
    Unverifiable,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub status: CheckStatus,
    pub witnesses: Vec<String>,
    pub note: String,
}

impl HypothesisCheck {
    fn pass(note: &str) -> Self {
        Self {
            status: CheckStatus::Pass,
            witnesses: Vec::new(),
            note: note.into(),
        }
    }
}

/// Per-hypothesis finite-scale verdict for a map.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    /// Entries for Hypotheses (1) through (5), in order.
    pub checks: [HypothesisCheck; 5],
    pub parabolic: bool,
}

impl HypothesisReport {
    /// A failed adjacency or derivative-comparison hypothesis invalidates
    /// every spectrum formula downstream.
    pub fn blocks_spectra(&self) -> bool {
        self.checks[0].status == CheckStatus::Fail || self.checks[4].status == CheckStatus::Fail
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }
}

/// Checks the five hypotheses at finite scale: shared endpoints and image
/// closure exactly, derivative bounds at sampled rationals, expansion along
/// sampled short orbits. Failures are reported with witnesses, never thrown.
pub fn validate_hypotheses(
    map: &MapSpec,
    samples_per_branch: usize,
    branch_horizon: u64,
) -> HypothesisReport {
    let samples = samples_per_branch.max(2);
    let horizon = match map.branch_count() {
        Some(len) => branch_horizon.min(len as u64),
        None => branch_horizon,
    }
    .max(2);

    let h1 = check_adjacency(map, horizon);
    let h2 = check_diffeomorphism(map, horizon);
    let h3 = check_expansion(map, samples, horizon);
    let h4 = check_onto(map, horizon);
    let h5 = check_derivative_comparison(map, samples, horizon);

    HypothesisReport {
        checks: [h1, h2, h3, h4, h5],
        parabolic: map.parabolic.is_some(),
    }
}

fn check_adjacency(map: &MapSpec, horizon: u64) -> HypothesisCheck {
    if map.is_builtin() {
        // I_n and I_{n+1} share an endpoint by the family formula; still
        // spot-check the first few exactly.
        for n in 1..=horizon.min(16) {
            let (a, b) = (map.branch(n).unwrap(), map.branch(n + 1).unwrap());
            let shared = a.lo == b.hi || a.hi == b.lo;
            if !shared {
                return HypothesisCheck {
                    status: CheckStatus::Fail,
                    witnesses: vec![format!("branches {n} and {}", n + 1)],
                    note: "builtin family violates its own adjacency".into(),
                };
            }
        }
        return HypothesisCheck::pass("closed-form family: consecutive intervals adjacent");
    }
    let mut witnesses = Vec::new();
    for n in 1..horizon {
        let (a, b) = match (map.branch(n), map.branch(n + 1)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => break,
        };
        // Exactly one shared endpoint between the closures.
        let mut shared = 0;
        for x in [&a.lo, &a.hi] {
            for y in [&b.lo, &b.hi] {
                if x == y {
                    shared += 1;
                }
            }
        }
        if shared != 1 {
            witnesses.push(format!(
                "branches {n} and {}: [{}, {}] vs [{}, {}] share {shared} endpoints",
                n + 1,
                format_rat(&a.lo),
                format_rat(&a.hi),
                format_rat(&b.lo),
                format_rat(&b.hi),
            ));
        }
    }
    if witnesses.is_empty() {
        HypothesisCheck::pass("consecutive intervals share exactly one endpoint")
    } else {
        HypothesisCheck {
            status: CheckStatus::Fail,
            witnesses,
            note: "interval family is not arranged in a single adjacent order".into(),
        }
    }
}

fn check_diffeomorphism(map: &MapSpec, horizon: u64) -> HypothesisCheck {
    if map.is_builtin() {
        return HypothesisCheck::pass("Mobius branches are C1 diffeomorphisms off their pole");
    }
    for n in 1..=horizon {
        match map.branch(n) {
            Ok(b) => {
                if b.matrix.det().is_zero() {
                    return HypothesisCheck {
                        status: CheckStatus::Fail,
                        witnesses: vec![format!("branch {n} is singular")],
                        note: "degenerate branch".into(),
                    };
                }
            }
            Err(_) => break,
        }
    }
    HypothesisCheck::pass("all declared branches are nonsingular Mobius/affine maps")
}

fn check_expansion(map: &MapSpec, samples: usize, horizon: u64) -> HypothesisCheck {
    if map.is_builtin() {
        let note = match map.parabolic {
            Some(_) => "parabolic fixed point at 0 with |T'(0)| = 1; |T'| > 1 elsewhere",
            None => "uniformly expanding (|(T^2)'| > 1 away from removed boundaries)",
        };
        return HypothesisCheck::pass(note);
    }
    let m = map.expansion_m.max(1);
    let one = rat(1, 1);
    let mut witnesses = Vec::new();
    let mut verified = 0usize;
    for n in 1..=horizon {
        let branch = match map.branch(n) {
            Ok(b) => b,
            Err(_) => break,
        };
        for i in 0..samples {
            let x = sample_point(&branch.lo, &branch.hi, i, samples);
            if let Some(p) = &map.parabolic {
                if x == p.point {
                    continue;
                }
            }
            // |(T^m)'(x)| by the chain rule along the exact orbit.
            let mut value = rat(1, 1);
            let mut point = x.clone();
            let mut complete = true;
            for _ in 0..m {
                match (map.derivative_abs(&point), map.evaluate(&point)) {
                    (Ok(d), Ok((next, _))) => {
                        value *= d;
                        point = next;
                    }
                    _ => {
                        complete = false;
                        break;
                    }
                }
            }
            if !complete {
                continue;
            }
            verified += 1;
            if value <= one {
                witnesses.push(format!("|(T^{m})'({})| = {}", format_rat(&x), format_rat(&value)));
            }
        }
    }
    if !witnesses.is_empty() {
        HypothesisCheck {
            status: CheckStatus::Fail,
            witnesses,
            note: format!("expansion |(T^{m})'| > 1 fails at sampled points"),
        }
    } else if verified == 0 {
        HypothesisCheck {
            status: CheckStatus::Unverifiable,
            witnesses: Vec::new(),
            note: "no sampled orbit of length m stayed inside the branch union".into(),
        }
    } else {
        HypothesisCheck::pass(&format!("|(T^{m})'| > 1 at {verified} sampled points"))
    }
}

fn check_onto(map: &MapSpec, horizon: u64) -> HypothesisCheck {
    let zero = rat(0, 1);
    let one = rat(1, 1);
    let mut witnesses = Vec::new();
    for n in 1..=horizon {
        let branch = match map.branch(n) {
            Ok(b) => b,
            Err(_) => break,
        };
        match branch.image() {
            Ok((lo, hi)) => {
                if lo != zero || hi != one {
                    witnesses.push(format!(
                        "branch {n}: closure of T(I_{n}) = [{}, {}]",
                        format_rat(&lo),
                        format_rat(&hi)
                    ));
                }
            }
            Err(_) => witnesses.push(format!("branch {n}: image undefined")),
        }
    }
    if witnesses.is_empty() {
        HypothesisCheck::pass("every checked branch maps its closed interval onto [0,1]")
    } else {
        HypothesisCheck {
            status: CheckStatus::Fail,
            witnesses,
            note: "full-branch (Markov) property fails".into(),
        }
    }
}

fn check_derivative_comparison(map: &MapSpec, samples: usize, horizon: u64) -> HypothesisCheck {
    let exact = map.gamma_integer();
    let c = map.distortion_rat();
    let mut witnesses = Vec::new();
    for n in 1..=horizon {
        let branch = match map.branch(n) {
            Ok(b) => b,
            Err(_) => break,
        };
        for i in 0..samples {
            let x = sample_point(&branch.lo, &branch.hi, i, samples);
            let deriv = match branch.matrix.derivative_abs(&x) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let ok = match exact {
                Some(g) => {
                    // Exact comparison: C^-1 n^g <= |T'| <= C n^g.
                    let ng = Rat::from(BigInt::from(n)).pow(g as i32);
                    &ng / &c <= deriv && deriv <= &ng * &c
                }
                None => {
                    // Non-integer gamma: compare in log domain.
                    let ln_d = ln_rat(&deriv);
                    let bound = map.gamma * (n as f64).ln();
                    let slack = map.distortion.ln() + 1e-12;
                    (ln_d - bound).abs() <= slack
                }
            };
            if !ok {
                witnesses.push(format!(
                    "branch {n}, x = {}: |T'| = {} vs C^±1 {n}^gamma",
                    format_rat(&x),
                    format_rat(&deriv)
                ));
            }
        }
    }
    if witnesses.is_empty() {
        let mode = if exact.is_some() { "exact" } else { "log-domain" };
        HypothesisCheck::pass(&format!(
            "C^-1 n^gamma <= |T'| <= C n^gamma at all sampled points ({mode} comparison)"
        ))
    } else {
        HypothesisCheck {
            status: CheckStatus::Fail,
            witnesses,
            note: "declared (gamma, C) falsified at sample points".into(),
        }
    }
}

/// Equally spaced rational sample points of `[lo, hi]`, endpoints included.
fn sample_point(lo: &Rat, hi: &Rat, i: usize, samples: usize) -> Rat {
    let t = rat(i as i64, (samples - 1).max(1) as i64);
    lo + (hi - lo) * t
}

/// Convenience: `|T'|` as f64 for plotting paths that do not need exactness.
pub fn derivative_f64(map: &MapSpec, x: &Rat) -> Result<f64, MapError> {
    Ok(to_f64(&map.derivative_abs(x)?))
}

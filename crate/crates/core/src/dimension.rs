//! Finite-depth basic-interval enumeration and covering-based dimension
//! estimators.
//!
//! A basic interval of order `n` refines a cylinder by restricting the next
//! digit to the window `(s_(n+1), s_(n+1) + t_(n+1)]`. The tree of basic
//! intervals carries, per level, the child count `m_n`, the measured minimal
//! gap between siblings, and the maximal diameter; those feed the two
//! two covering estimators (nested-intervals lower bound, covering upper
//! bound). The truncated dimension formula
//! `sum log t_k / (gamma sum_(k<=n+1) log s_k - log t_(n+1))`
//! is evaluated alongside, so formula-vs-measurement comparisons are
//! first-class.
//!
//! All gap and diameter measurements are exact rationals; the analytic gap
//! bound is exact for integer `gamma` and rounded pessimistically (down)
//! otherwise, so every inequality being tested keeps its direction.

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::construct::{ConstructError, SequencePair};
use crate::maps::{MapError, MapSpec, Mobius};
use crate::rational::{rat, Rat};
use crate::sum::CompensatedSum;

#[derive(Debug, Error)]
pub enum DimensionError {
    #[error(transparent)]
    Sequence(#[from] ConstructError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("window at position {n} holds {count} integers; need at least 2 (digit cap {cap})")]
    WindowTooSmall { n: usize, count: u64, cap: u64 },
    #[error("node budget {budget} exhausted at depth {depth}")]
    NodeBudget { budget: usize, depth: usize },
    #[error("standing hypothesis failed: {0}")]
    HypothesisFailed(&'static str),
    #[error("estimator input invalid: {0}")]
    BadInput(String),
    #[error("count_product_tuples is exhaustive only for n <= 4, k <= 4 (got n = {n}, k = {k})")]
    CountOutOfRange { n: u32, k: u32 },
}

/// One basic interval `J_n(i_1..i_n)` with its exact endpoints.
#[derive(Debug, Clone)]
pub struct BasicInterval {
    pub word: Vec<u64>,
    pub lo: Rat,
    pub hi: Rat,
    /// Composed inverse-branch matrix of the word (drives the children).
    matrix: Mobius,
}

impl BasicInterval {
    pub fn diameter(&self) -> Rat {
        &self.hi - &self.lo
    }
}

/// Per-level statistics of the tree.
#[derive(Debug, Clone)]
pub struct LevelStats {
    pub n: usize,
    /// Number of children per parent: `floor(s_n + t_n) - floor(s_n)`.
    pub m: u64,
    /// Total basic intervals at this level.
    pub count: usize,
    /// Minimal gap between adjacent siblings, exact.
    pub min_gap: Rat,
    pub max_diameter: Rat,
    /// Analytic gap lower bound `C^-(n+1) (1+1/theta)^(-n gamma) (s_1..s_n)^-gamma`.
    pub gap_bound: Rat,
}

#[derive(Debug)]
pub struct BasicIntervalTree {
    pub levels: Vec<LevelStats>,
    /// Basic intervals of the deepest level, in lexicographic word order.
    pub leaves: Vec<BasicInterval>,
    /// Measured `theta`: the minimal `s_n / t_n` over the horizon.
    pub theta: f64,
}

impl BasicIntervalTree {
    pub fn ln_m(&self) -> Vec<f64> {
        self.levels.iter().map(|l| (l.m as f64).ln()).collect()
    }

    pub fn ln_gaps(&self) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| crate::rational::ln_rat(&l.min_gap))
            .collect()
    }

    pub fn ln_counts(&self) -> Vec<f64> {
        self.levels.iter().map(|l| (l.count as f64).ln()).collect()
    }

    pub fn ln_max_diameters(&self) -> Vec<f64> {
        self.levels
            .iter()
            .map(|l| crate::rational::ln_rat(&l.max_diameter))
            .collect()
    }
}

/// Integer window `(s, s+t]`: first digit, last digit, and the count
/// `floor(s+t) - floor(s)`.
fn window(pair: &SequencePair, n: usize, cap: u64) -> Result<(u64, u64), DimensionError> {
    let s = Rat::from_float(pair.s.value(n)?).ok_or(ConstructError::Overflow(n))?;
    let t = Rat::from_float(pair.t.value(n)?).ok_or(ConstructError::Overflow(n))?;
    let first = (s.floor().numer() + BigInt::from(1))
        .try_into()
        .map_err(|_| DimensionError::BadInput(format!("window start at {n} out of u64")))?;
    let last: u64 = (&s + &t)
        .floor()
        .numer()
        .try_into()
        .map_err(|_| DimensionError::BadInput(format!("window end at {n} out of u64")))?;
    let count = (last + 1).saturating_sub(first);
    if count < 2 || last > cap {
        return Err(DimensionError::WindowTooSmall {
            n,
            count,
            cap,
        });
    }
    Ok((first, last))
}

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Enumerates the basic-interval tree to `depth` levels, breadth-first in
/// lexicographic word order. Each level records the measured child count,
/// minimal sibling gap, maximal diameter, and the analytic gap bound the
/// measurements must dominate.
pub fn enumerate_basic_intervals(
    map: &MapSpec,
    pair: &SequencePair,
    depth: usize,
    digit_cap: u64,
) -> Result<BasicIntervalTree, DimensionError> {
    enumerate_with_budget(map, pair, depth, digit_cap, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_with_budget(
    map: &MapSpec,
    pair: &SequencePair,
    depth: usize,
    digit_cap: u64,
    budget: usize,
) -> Result<BasicIntervalTree, DimensionError> {
    // Windows for levels 1..=depth+1 (level n basic intervals look one digit
    // ahead).
    let mut windows = Vec::with_capacity(depth + 1);
    for n in 1..=depth + 1 {
        windows.push(window(pair, n, digit_cap)?);
    }
    let theta = {
        let h = pair.check_hypotheses(depth + 1)?;
        h.min_ratio
    };

    // Hull of the union of branch intervals over a digit window; adjacency
    // of consecutive branches makes the union an interval.
    let window_hull = |w: (u64, u64)| -> Result<(Rat, Rat), DimensionError> {
        let first = map.branch(w.0)?;
        let last = map.branch(w.1)?;
        let los = [&first.lo, &last.lo];
        let his = [&first.hi, &last.hi];
        let lo = los.iter().min().unwrap();
        let hi = his.iter().max().unwrap();
        Ok(((*lo).clone(), (*hi).clone()))
    };

    let mut levels: Vec<LevelStats> = Vec::with_capacity(depth);
    let mut current = vec![BasicInterval {
        word: Vec::new(),
        lo: rat(0, 1),
        hi: rat(1, 1),
        matrix: Mobius::identity(),
    }];
    let mut nodes = 1usize;

    for n in 1..=depth {
        let (first, last) = windows[n - 1];
        let next_hull = window_hull(windows[n])?;
        let m = last - first + 1;
        nodes = nodes.saturating_add(current.len().saturating_mul(m as usize));
        if nodes > budget {
            return Err(DimensionError::NodeBudget { budget, depth: n });
        }

        // Children per parent, in digit order; gaps measured within the
        // parent. Parallel across parents with a deterministic ordered
        // collect.
        let per_parent: Vec<Result<(Vec<BasicInterval>, Rat), DimensionError>> = current
            .par_iter()
            .map(|parent| {
                let mut children = Vec::with_capacity(m as usize);
                for digit in first..=last {
                    let branch = map.branch(digit)?;
                    let matrix = parent.matrix.compose(&branch.matrix.inverse());
                    let a = matrix
                        .apply(&next_hull.0)
                        .map_err(DimensionError::Map)?;
                    let b = matrix
                        .apply(&next_hull.1)
                        .map_err(DimensionError::Map)?;
                    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                    let mut word = parent.word.clone();
                    word.push(digit);
                    children.push(BasicInterval {
                        word,
                        lo,
                        hi,
                        matrix,
                    });
                }
                // Siblings sorted by position; the minimal gap must be
                // positive (disjointness).
                let mut by_position: Vec<(Rat, Rat)> = children
                    .iter()
                    .map(|c| (c.lo.clone(), c.hi.clone()))
                    .collect();
                by_position.sort_by(|a, b| a.0.cmp(&b.0));
                let mut min_gap: Option<Rat> = None;
                for w in by_position.windows(2) {
                    let gap = &w[1].0 - &w[0].1;
                    if gap <= rat(0, 1) {
                        return Err(DimensionError::BadInput(format!(
                            "overlapping basic intervals under word {:?}",
                            parent.word
                        )));
                    }
                    min_gap = Some(match min_gap {
                        Some(g) => g.min(gap),
                        None => gap,
                    });
                }
                Ok((children, min_gap.expect("m >= 2 gives at least one gap")))
            })
            .collect();

        let mut next = Vec::with_capacity(nodes);
        let mut min_gap: Option<Rat> = None;
        let mut max_diameter = rat(0, 1);
        for item in per_parent {
            let (children, parent_gap) = item?;
            for c in &children {
                let d = c.diameter();
                if d > max_diameter {
                    max_diameter = d;
                }
            }
            min_gap = Some(match min_gap {
                Some(g) => g.min(parent_gap),
                None => parent_gap,
            });
            next.extend(children);
        }

        let gap_bound = analytic_gap_bound(map, pair, n, theta)?;
        levels.push(LevelStats {
            n,
            m,
            count: next.len(),
            min_gap: min_gap.expect("at least one parent"),
            max_diameter,
            gap_bound,
        });
        current = next;
    }

    Ok(BasicIntervalTree {
        levels,
        leaves: current,
        theta,
    })
}

/// `C^-(n+1) (1 + 1/theta)^(-n gamma) (s_1 ... s_n)^(-gamma)`, exact for
/// integer `gamma`, rounded down otherwise.
fn analytic_gap_bound(
    map: &MapSpec,
    pair: &SequencePair,
    n: usize,
    theta: f64,
) -> Result<Rat, DimensionError> {
    let theta_rat = Rat::from_float(theta)
        .filter(|t| t > &rat(0, 1))
        .ok_or_else(|| DimensionError::BadInput("theta must be positive".into()))?;
    if let Some(g) = map.gamma_integer() {
        let mut s_product = rat(1, 1);
        for j in 1..=n {
            let s = Rat::from_float(pair.s.value(j)?).ok_or(ConstructError::Overflow(j))?;
            s_product *= s;
        }
        let c_pow = map.distortion_rat().pow(n as i32 + 1);
        let one_plus = rat(1, 1) + theta_rat.recip();
        let denom = c_pow * one_plus.pow((n * g as usize) as i32) * s_product.pow(g as i32);
        return Ok(denom.recip());
    }
    // Non-integer gamma: log-domain value rounded down.
    let mut ln_s = CompensatedSum::new();
    for j in 1..=n {
        ln_s.add(pair.s.ln_value(j)?);
    }
    let ln_bound = -((n + 1) as f64) * map.distortion.ln()
        - (n as f64) * map.gamma * (1.0 + 1.0 / theta).ln()
        - map.gamma * ln_s.value();
    let v = ln_bound.exp();
    Ok(Rat::from_float((v * (1.0 - 1e-9)).max(0.0)).unwrap_or_else(|| rat(0, 1)))
}

/// A truncated liminf-style estimate: the value sequence with its running
/// minimum and the tail-window minimum used as the headline estimate.
#[derive(Debug, Clone)]
pub struct DimensionEstimate {
    /// `(n, value)` pairs in increasing `n`.
    pub values: Vec<(usize, f64)>,
    pub windowed_min: f64,
    pub running_min: f64,
    pub final_value: f64,
}

fn liminf_estimate(values: Vec<(usize, f64)>) -> Result<DimensionEstimate, DimensionError> {
    if values.is_empty() {
        return Err(DimensionError::BadInput("no estimator values".into()));
    }
    let window = (values.len() / 4).max(1);
    let running_min = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let windowed_min = values[values.len() - window..]
        .iter()
        .map(|v| v.1)
        .fold(f64::INFINITY, f64::min);
    let final_value = values.last().unwrap().1;
    Ok(DimensionEstimate {
        values,
        windowed_min,
        running_min,
        final_value,
    })
}

/// Nested-intervals lower bound: running values
/// `log(m_1 ... m_(n-1)) / -log(m_n eps_n)` for child counts `m` (as logs)
/// and sibling gaps `eps` (as logs). Requires `m_n >= 2` and strictly
/// decreasing gaps.
pub fn nested_lower_bound(ln_m: &[f64], ln_eps: &[f64]) -> Result<DimensionEstimate, DimensionError> {
    if ln_m.len() != ln_eps.len() || ln_m.len() < 2 {
        return Err(DimensionError::BadInput(
            "need matching m and eps sequences of length >= 2".into(),
        ));
    }
    for (i, &lm) in ln_m.iter().enumerate() {
        if lm < 2f64.ln() - 1e-12 {
            return Err(DimensionError::BadInput(format!(
                "m_{} = e^{lm:.3} < 2 violates the nesting hypothesis",
                i + 1
            )));
        }
    }
    for w in ln_eps.windows(2) {
        if w[1] >= w[0] {
            return Err(DimensionError::BadInput(
                "gap sequence must be strictly decreasing".into(),
            ));
        }
    }
    let mut numerator = CompensatedSum::new();
    let mut values = Vec::with_capacity(ln_m.len() - 1);
    for n in 2..=ln_m.len() {
        numerator.add(ln_m[n - 2]);
        let denom = -(ln_m[n - 1] + ln_eps[n - 1]);
        if denom > 0.0 {
            values.push((n, numerator.value() / denom));
        }
    }
    liminf_estimate(values)
}

/// Covering upper bound: running values `log N_n / -log delta_n` for cover
/// counts and diameters (as logs). Requires the diameters to decrease.
pub fn cover_upper(
    ln_counts: &[f64],
    ln_diams: &[f64],
) -> Result<DimensionEstimate, DimensionError> {
    if ln_counts.len() != ln_diams.len() || ln_counts.is_empty() {
        return Err(DimensionError::BadInput(
            "need matching count and diameter sequences".into(),
        ));
    }
    for w in ln_diams.windows(2) {
        if w[1] >= w[0] {
            return Err(DimensionError::BadInput(
                "diameters must decrease towards zero".into(),
            ));
        }
    }
    let mut values = Vec::with_capacity(ln_counts.len());
    for (i, (&lc, &ld)) in ln_counts.iter().zip(ln_diams).enumerate() {
        if ld < 0.0 {
            values.push((i + 1, lc / -ld));
        }
    }
    liminf_estimate(values)
}

/// The truncated quotient sequence
/// `sum_(k<=n) log t_k / (gamma sum_(k<=n+1) log s_k - log t_(n+1))`
/// with its running liminf. Refuses when the standing hypotheses fail over
/// the horizon.
pub fn e_set_dimension_formula(
    pair: &SequencePair,
    gamma: f64,
    horizon: usize,
) -> Result<DimensionEstimate, DimensionError> {
    if horizon < 4 {
        return Err(DimensionError::BadInput("horizon too small".into()));
    }
    let hyp = pair.check_hypotheses(horizon)?;
    if !hyp.avg_growing {
        return Err(DimensionError::HypothesisFailed(
            "sum log s_k / n must tend to infinity",
        ));
    }
    if !(hyp.min_ratio > 0.0) {
        return Err(DimensionError::HypothesisFailed(
            "liminf s_n / t_n must be positive",
        ));
    }
    if hyp.min_value < 2.0 - 1e-12 {
        return Err(DimensionError::HypothesisFailed("s_n, t_n >= 2"));
    }
    let mut sum_t = CompensatedSum::new();
    let mut sum_s = CompensatedSum::new();
    sum_s.add(pair.s.ln_value(1)?);
    let mut values = Vec::with_capacity(horizon - 1);
    for n in 1..horizon {
        sum_t.add(pair.t.ln_value(n)?);
        let ln_s_next = pair.s.ln_value(n + 1)?;
        sum_s.add(ln_s_next);
        let ln_t_next = pair.t.ln_value(n + 1)?;
        let denom = gamma * sum_s.value() - ln_t_next;
        if denom > 0.0 {
            values.push((n, sum_t.value() / denom));
        }
    }
    liminf_estimate(values)
}

/// Exact cardinality of
/// `B_n(k) = {(sigma_1..sigma_n) : 2^(kn) < sigma_1...sigma_n <= 2^((k+1)n)}`
/// together with the combinatorial bound `(e (k+2) 2^(k+1))^n` it must not
/// exceed.
#[derive(Debug, Clone, Copy)]
pub struct TupleCount {
    pub count: u128,
    pub bound: f64,
}

pub fn count_product_tuples(n: u32, k: u32) -> Result<TupleCount, DimensionError> {
    if n == 0 || n > 4 || k > 4 {
        return Err(DimensionError::CountOutOfRange { n, k });
    }
    let hi = 1u64 << ((k + 1) * n);
    let lo = 1u64 << (k * n);
    let count = tuples_with_product_up_to(n, hi) - tuples_with_product_up_to(n, lo);
    let bound = (std::f64::consts::E * (k as f64 + 2.0) * 2f64.powi(k as i32 + 1))
        .powi(n as i32);
    Ok(TupleCount { count, bound })
}

/// `#{(sigma_1..sigma_r) in N^r : sigma_1...sigma_r <= x}` via quotient
/// grouping (the inner counts only depend on `x / sigma`).
fn tuples_with_product_up_to(r: u32, x: u64) -> u128 {
    if x == 0 {
        return 0;
    }
    if r == 1 {
        return x as u128;
    }
    let mut total = 0u128;
    let mut sigma = 1u64;
    while sigma <= x {
        let q = x / sigma;
        let next = x / q;
        total += (next - sigma + 1) as u128 * tuples_with_product_up_to(r - 1, q);
        sigma = next + 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::SeqSpec;
    use crate::rational::to_f64;

    fn geometric_pair() -> SequencePair {
        SequencePair::diagonal(SeqSpec::Exp {
            coef: 1.0,
            base: 2.0,
        })
    }

    #[test]
    fn gauss_tree_depth_three_counts() {
        // s = t = 2^n: m = (2, 4, 8), matching floor(2^(n+1)) - floor(2^n).
        let tree =
            enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 3, 64).unwrap();
        let ms: Vec<u64> = tree.levels.iter().map(|l| l.m).collect();
        assert_eq!(ms, vec![2, 4, 8]);
        let counts: Vec<usize> = tree.levels.iter().map(|l| l.count).collect();
        assert_eq!(counts, vec![2, 8, 64]);
        assert_eq!(tree.leaves.len(), 64);
        assert!((tree.theta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_tree_gaps_dominate_analytic_bound() {
        let tree =
            enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 3, 64).unwrap();
        for level in &tree.levels {
            assert!(
                level.min_gap >= level.gap_bound,
                "level {}: gap {} < bound {}",
                level.n,
                to_f64(&level.min_gap),
                to_f64(&level.gap_bound)
            );
        }
    }

    #[test]
    fn tree_nesting_and_disjointness() {
        let tree =
            enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 3, 64).unwrap();
        // Leaves are pairwise disjoint and lie inside [0, 1].
        let mut sorted: Vec<(Rat, Rat)> = tree
            .leaves
            .iter()
            .map(|l| (l.lo.clone(), l.hi.clone()))
            .collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        for w in sorted.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
        assert!(sorted.first().unwrap().0 >= rat(0, 1));
        assert!(sorted.last().unwrap().1 <= rat(1, 1));
    }

    #[test]
    fn tree_deterministic_under_parallelism() {
        let a = enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 3, 64).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool
            .install(|| enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 3, 64))
            .unwrap();
        assert_eq!(a.leaves.len(), b.leaves.len());
        for (x, y) in a.leaves.iter().zip(&b.leaves) {
            assert_eq!(x.word, y.word);
            assert_eq!(x.lo, y.lo);
            assert_eq!(x.hi, y.hi);
        }
    }

    #[test]
    fn tree_window_precondition() {
        // depth 1 with window (2, 4]: exactly digits {3, 4}.
        let tree =
            enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 1, 64).unwrap();
        let words: Vec<&[u64]> = tree.leaves.iter().map(|l| l.word.as_slice()).collect();
        assert_eq!(words, vec![&[3u64][..], &[4u64][..]]);
        // A window with fewer than two integers is refused.
        let thin = SequencePair::new(
            SeqSpec::Const { value: 2.0 },
            SeqSpec::Const { value: 1.0 },
        );
        assert!(matches!(
            enumerate_basic_intervals(&MapSpec::gauss(), &thin, 2, 64),
            Err(DimensionError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn node_budget_enforced() {
        let err = enumerate_with_budget(&MapSpec::gauss(), &geometric_pair(), 5, 128, 50);
        assert!(matches!(err, Err(DimensionError::NodeBudget { .. })));
    }

    #[test]
    fn nested_lower_bound_closed_forms() {
        // m_n = 2, eps_n = 4^-n: values (n-1) log2 / ((2n-1) log2) -> 1/2.
        let horizon = 1000;
        let ln_m: Vec<f64> = vec![2f64.ln(); horizon];
        let ln_eps: Vec<f64> = (1..=horizon).map(|n| -(n as f64) * 4f64.ln()).collect();
        let est = nested_lower_bound(&ln_m, &ln_eps).unwrap();
        assert!((est.windowed_min - 0.5).abs() < 1e-2);
        // m_n = 3, eps_n = 3^-2n -> 1/2 as well.
        let ln_m: Vec<f64> = vec![3f64.ln(); horizon];
        let ln_eps: Vec<f64> = (1..=horizon)
            .map(|n| -((2 * n) as f64) * 3f64.ln())
            .collect();
        let est = nested_lower_bound(&ln_m, &ln_eps).unwrap();
        assert!((est.windowed_min - 0.5).abs() < 1e-2);
    }

    #[test]
    fn nested_lower_bound_rejects_bad_input() {
        // Single-child levels violate the lemma hypothesis.
        let ln_m = vec![0.0, 2f64.ln()];
        let ln_eps = vec![-1.0, -2.0];
        assert!(nested_lower_bound(&ln_m, &ln_eps).is_err());
        // Non-decreasing gaps.
        let ln_m = vec![2f64.ln(), 2f64.ln()];
        let ln_eps = vec![-2.0, -1.0];
        assert!(nested_lower_bound(&ln_m, &ln_eps).is_err());
    }

    #[test]
    fn cover_upper_closed_form() {
        // N_n = 2^n, delta_n = 4^-n -> 1/2.
        let horizon = 500;
        let ln_n: Vec<f64> = (1..=horizon).map(|n| n as f64 * 2f64.ln()).collect();
        let ln_d: Vec<f64> = (1..=horizon).map(|n| -(n as f64) * 4f64.ln()).collect();
        let est = cover_upper(&ln_n, &ln_d).unwrap();
        assert!((est.windowed_min - 0.5).abs() < 1e-2);
        // Constant diameters are refused.
        assert!(cover_upper(&[1.0, 2.0], &[-1.0, -1.0]).is_err());
    }

    #[test]
    fn tree_estimators_cohere() {
        // Lower estimate <= upper estimate on the same tree; the truncated
        // formula value sits near both (reported, not asserted at fixed
        // depth).
        let tree =
            enumerate_basic_intervals(&MapSpec::gauss(), &geometric_pair(), 4, 64).unwrap();
        let lower = nested_lower_bound(&tree.ln_m(), &tree.ln_gaps()).unwrap();
        let upper = cover_upper(&tree.ln_counts(), &tree.ln_max_diameters()).unwrap();
        assert!(lower.final_value <= upper.final_value + 1e-12);
        let formula = e_set_dimension_formula(&geometric_pair(), 2.0, 200).unwrap();
        // 1/((gamma-1) c + 1) with c = 1 (geometric windows): limit 1/2...
        // actually s_n = 2^n gives sum log s ~ n^2/2, quotient -> 1/(2 gamma - 1).
        assert!(formula.final_value > 0.0 && formula.final_value < 1.0);
    }

    #[test]
    fn formula_exponential_quotient() {
        // s = t = e^n, gamma = 2, n = 100: 5050 / (2 * 5151 - 101).
        let pair = SequencePair::diagonal(SeqSpec::Exp {
            coef: 1.0,
            base: std::f64::consts::E,
        });
        let est = e_set_dimension_formula(&pair, 2.0, 101).unwrap();
        let q100 = est
            .values
            .iter()
            .find(|(n, _)| *n == 100)
            .map(|(_, v)| *v)
            .unwrap();
        assert!((q100 - 5050.0 / 10201.0).abs() < 1e-9);
    }

    #[test]
    fn formula_limits() {
        // s = t = e^n: limit 1/gamma for any gamma.
        for gamma in [1.5, 2.0, 3.0] {
            let pair = SequencePair::diagonal(SeqSpec::Exp {
                coef: 1.0,
                base: std::f64::consts::E,
            });
            let est = e_set_dimension_formula(&pair, gamma, 10_000).unwrap();
            assert!(
                (est.windowed_min - 1.0 / gamma).abs() < 1e-3,
                "gamma {gamma}: {}",
                est.windowed_min
            );
        }
        // s = t = b^(c^n): limit 1/((gamma-1) c + 1).
        for (b, c) in [(2.0, 2.0), (2.0, 3.0)] {
            let pair = SequencePair::diagonal(SeqSpec::Tower { b, c });
            let horizon = if c > 2.0 { 300 } else { 500 };
            let est = e_set_dimension_formula(&pair, 2.0, horizon).unwrap();
            let expected = 1.0 / (c + 1.0);
            assert!(
                (est.windowed_min - expected).abs() < 1e-3,
                "(b, c) = ({b}, {c}): {}",
                est.windowed_min
            );
        }
    }

    #[test]
    fn formula_refuses_failed_hypotheses() {
        let pair = SequencePair::diagonal(SeqSpec::Const { value: 3.0 });
        assert!(matches!(
            e_set_dimension_formula(&pair, 2.0, 100),
            Err(DimensionError::HypothesisFailed(_))
        ));
    }

    #[test]
    fn tuple_counts_small_cases() {
        // n = 1, k = 0: sigma in (1, 2] -> exactly {2}.
        assert_eq!(count_product_tuples(1, 0).unwrap().count, 1);
        // n = 1, k = 1: sigma in (2, 4] -> {3, 4}.
        assert_eq!(count_product_tuples(1, 1).unwrap().count, 2);
        assert!(count_product_tuples(5, 1).is_err());
    }

    #[test]
    fn tuple_counts_match_brute_force() {
        fn brute(n: u32, k: u32) -> u128 {
            let lo = 1u64 << (k * n);
            let hi = 1u64 << ((k + 1) * n);
            fn rec(r: u32, max_product: u64, product: u64, lo: u64, count: &mut u128) {
                if r == 0 {
                    if product > lo {
                        *count += 1;
                    }
                    return;
                }
                let mut sigma = 1u64;
                while product * sigma <= max_product {
                    rec(r - 1, max_product, product * sigma, lo, count);
                    sigma += 1;
                }
            }
            let mut count = 0;
            rec(n, hi, 1, lo, &mut count);
            count
        }
        for n in 1..=3u32 {
            for k in 0..=2u32 {
                let fast = count_product_tuples(n, k).unwrap().count;
                assert_eq!(fast, brute(n, k), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn tuple_counts_stay_under_bound() {
        for n in 1..=4u32 {
            for k in 0..=4u32 {
                let res = count_product_tuples(n, k).unwrap();
                assert!(
                    (res.count as f64) <= res.bound,
                    "n = {n}, k = {k}: {} > {}",
                    res.count,
                    res.bound
                );
            }
        }
    }
}

//! L-index / P-index machinery.
//!
//! An L-index of a sequence is dominated strictly by every later term; a
//! P-index by every earlier term. Within a horizon, L-indices come out of a
//! suffix-minimum sweep and P-indices out of a prefix-minimum sweep; both
//! must agree with the quadratic definition check, which the test suite
//! enforces exhaustively on short sequences.

use serde::Serialize;

use super::ConstructError;
use crate::scaling::ScalingFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexKind {
    L,
    P,
}

/// Index list over a horizon. L-indices quantify over the unseen tail, so
/// every reported L-index is provisional: a later value could disqualify it.
/// P-indices only look backward and are final.
#[derive(Debug, Clone, Serialize)]
pub struct LPIndexReport {
    pub kind: IndexKind,
    /// 1-based indices.
    pub indices: Vec<usize>,
    pub horizon: usize,
    /// True when membership depends on values beyond the horizon.
    pub provisional: bool,
}

/// Streaming L-index sweep: `i` is an L-index iff every later value within
/// the horizon exceeds `values[i]` strictly.
pub fn l_indices(values: &[f64]) -> LPIndexReport {
    let n = values.len();
    let mut indices = Vec::new();
    let mut suffix_min = f64::INFINITY;
    let mut flags = vec![false; n];
    for i in (0..n).rev() {
        if values[i] < suffix_min {
            flags[i] = true;
        }
        suffix_min = suffix_min.min(values[i]);
    }
    for (i, f) in flags.iter().enumerate() {
        if *f {
            indices.push(i + 1);
        }
    }
    LPIndexReport {
        kind: IndexKind::L,
        indices,
        horizon: n,
        provisional: true,
    }
}

/// Streaming P-index sweep: `i` is a P-index iff every earlier value exceeds
/// `values[i]` strictly. The first index is one vacuously.
pub fn p_indices(values: &[f64]) -> LPIndexReport {
    let n = values.len();
    let mut indices = Vec::new();
    let mut prefix_min = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v < prefix_min {
            indices.push(i + 1);
        }
        prefix_min = prefix_min.min(v);
    }
    LPIndexReport {
        kind: IndexKind::P,
        indices,
        horizon: n,
        provisional: false,
    }
}

/// Quadratic definition check, the oracle the sweeps are tested against.
pub fn brute_force_l_indices(values: &[f64]) -> Vec<usize> {
    (0..values.len())
        .filter(|&i| values[i + 1..].iter().all(|&v| v > values[i]))
        .map(|i| i + 1)
        .collect()
}

pub fn brute_force_p_indices(values: &[f64]) -> Vec<usize> {
    (0..values.len())
        .filter(|&i| values[..i].iter().all(|&v| v > values[i]))
        .map(|i| i + 1)
        .collect()
}

/// Outcome of searching for a simultaneous L-index of `a` and P-index of `c`.
#[derive(Debug, Clone, Serialize)]
pub struct JointIndex {
    /// Smallest joint index `> n_min` within the horizon, if any.
    pub index: Option<usize>,
    /// First index from which `a/c` is strictly increasing through the
    /// horizon (the sampled monotonicity threshold).
    pub monotone_from: usize,
}

/// Finds the smallest `n* > n_min` that is an L-index of `ln_a` and a
/// P-index of `ln_c` within the horizon. Requires the ratio `a/c` to be
/// strictly increasing on some suffix; errors when it never is.
pub fn joint_index(
    ln_a: &[f64],
    ln_c: &[f64],
    n_min: usize,
) -> Result<JointIndex, ConstructError> {
    if ln_a.len() != ln_c.len() {
        return Err(ConstructError::LengthMismatch(ln_a.len(), ln_c.len()));
    }
    let n = ln_a.len();
    // Sampled N_0: the ratio must increase strictly on [monotone_from, n].
    let mut monotone_from = 1usize;
    for i in 1..n {
        let prev = ln_a[i - 1] - ln_c[i - 1];
        let cur = ln_a[i] - ln_c[i];
        if cur <= prev {
            monotone_from = i + 1; // 1-based start of the clean suffix
        }
    }
    if monotone_from >= n {
        return Err(ConstructError::RatioNotMonotone);
    }
    let l = l_indices(ln_a);
    let p = p_indices(ln_c);
    let p_set: std::collections::HashSet<usize> = p.indices.iter().copied().collect();
    let index = l
        .indices
        .iter()
        .copied()
        .find(|&i| i > n_min && p_set.contains(&i));
    Ok(JointIndex {
        index,
        monotone_from,
    })
}

/// Which two-sided comparison shape anchors are selected under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorCase {
    /// `1 < b < infinity`: two-sided geometric comparison around `n*`.
    FiniteB { b: f64 },
    /// `b = 1` with superlinear `psi`: proportional comparison after `n*`,
    /// geometric before.
    BOne,
}

/// Finds `n* > n_min` such that, within the horizon,
///
/// * FiniteB: `psi(n) > (b-eps)^(n-n*) psi(n*)` for all `n > n*` and
///   `psi(n) > (b+eps)^(n-n*) psi(n*)` for all `n < n*`;
/// * BOne: `n* psi(n) > n psi(n*)` for all `n > n*` and
///   `psi(n) > (1+eps)^(n-n*) psi(n*)` for all `n < n*`.
///
/// The candidate comes from the joint L/P search on the two comparison
/// sequences; the two-sided inequality is then verified exhaustively over
/// the horizon before the index is returned.
pub fn anchor_index(
    psi: &ScalingFunction,
    epsilon: f64,
    n_min: usize,
    horizon: usize,
    case: AnchorCase,
) -> Result<Option<usize>, ConstructError> {
    if !(epsilon > 0.0) {
        return Err(ConstructError::InvalidEpsilon {
            epsilon,
            requirement: "epsilon > 0",
        });
    }
    let ln_psi: Vec<f64> = (1..=horizon)
        .map(|n| psi.ln_value(n))
        .collect::<Result<_, _>>()?;
    let (ln_a, ln_c): (Vec<f64>, Vec<f64>) = match case {
        AnchorCase::FiniteB { b } => {
            if !(epsilon < b - 1.0) {
                return Err(ConstructError::InvalidEpsilon {
                    epsilon,
                    requirement: "epsilon < b - 1",
                });
            }
            let lo = (b - epsilon).ln();
            let hi = (b + epsilon).ln();
            (1..=horizon)
                .map(|n| {
                    let lp = ln_psi[n - 1];
                    (lp - n as f64 * lo, lp - n as f64 * hi)
                })
                .unzip()
        }
        AnchorCase::BOne => {
            let hi = (1.0 + epsilon).ln();
            (1..=horizon)
                .map(|n| {
                    let lp = ln_psi[n - 1];
                    (lp - (n as f64).ln(), lp - n as f64 * hi)
                })
                .unzip()
        }
    };
    let mut n_min = n_min;
    loop {
        let joint = joint_index(&ln_a, &ln_c, n_min)?;
        let Some(star) = joint.index else {
            return Ok(None);
        };
        if verify_anchor_inequalities(&ln_a, &ln_c, star) {
            return Ok(Some(star));
        }
        // A joint index always satisfies the inequalities by construction;
        // this retry only fires on floating-point ties.
        n_min = star;
    }
}

fn verify_anchor_inequalities(ln_a: &[f64], ln_c: &[f64], star: usize) -> bool {
    let sa = ln_a[star - 1];
    let sc = ln_c[star - 1];
    ln_a[star..].iter().all(|&v| v > sa) && ln_c[..star - 1].iter().all(|&v| v > sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::ScalingFunction;

    #[test]
    fn l_indices_match_example() {
        // (5,3,4,1,2,6,7,8,...) increasing beyond: L-indices {4,5,6,7,...}.
        let mut values = vec![5.0, 3.0, 4.0, 1.0, 2.0];
        values.extend((6..=12).map(|v| v as f64));
        let report = l_indices(&values);
        assert_eq!(report.indices, vec![4, 5, 6, 7, 8, 9, 10, 11, 12]);
        assert_eq!(report.indices, brute_force_l_indices(&values));
        assert!(report.provisional);
    }

    #[test]
    fn p_indices_match_example() {
        let values = [3.0, 5.0, 2.0, 4.0, 1.0];
        let report = p_indices(&values);
        assert_eq!(report.indices, vec![1, 3, 5]);
        assert_eq!(report.indices, brute_force_p_indices(&values));
        assert!(!report.provisional);
    }

    #[test]
    fn strictly_increasing_sequence_all_l() {
        let values: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        assert_eq!(l_indices(&values).indices.len(), 10);
    }

    #[test]
    fn sweeps_equal_brute_force_exhaustively() {
        // Every sequence of length 7 with entries in {1..4}.
        let mut seq = [0u8; 7];
        loop {
            let values: Vec<f64> = seq.iter().map(|&v| v as f64 + 1.0).collect();
            assert_eq!(l_indices(&values).indices, brute_force_l_indices(&values));
            assert_eq!(p_indices(&values).indices, brute_force_p_indices(&values));
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == seq.len() {
                    return;
                }
                seq[i] += 1;
                if seq[i] < 4 {
                    break;
                }
                seq[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn ties_are_not_indices() {
        // Strict domination: plateaus disqualify both kinds.
        let values = [2.0, 1.0, 1.0, 3.0];
        assert_eq!(l_indices(&values).indices, vec![3, 4]);
        assert_eq!(p_indices(&values).indices, vec![1, 2]);
    }

    #[test]
    fn joint_index_on_crossing_sequences() {
        // a increasing, c decreasing: every index beyond n_min qualifies.
        let a: Vec<f64> = (1..=20).map(|n| n as f64).collect();
        let c: Vec<f64> = (1..=20).map(|n| -(n as f64)).collect();
        let j = joint_index(&a, &c, 5).unwrap();
        assert_eq!(j.index, Some(6));
        // Ratio a - c = 2n strictly increasing from the start.
        assert_eq!(j.monotone_from, 1);
    }

    #[test]
    fn joint_index_centered_geometric() {
        // a(n) = psi(n)/2^n, c(n) = psi(n)/3^n with psi(n) = 2.5^n: a grows,
        // c vanishes, their ratio (3/2)^n increases, so a joint index exists.
        let (ln_a, ln_c): (Vec<f64>, Vec<f64>) = (1..=60)
            .map(|n| {
                let lp = n as f64 * 2.5f64.ln();
                (
                    lp - n as f64 * 2f64.ln(),
                    lp - n as f64 * 3f64.ln(),
                )
            })
            .unzip();
        let j = joint_index(&ln_a, &ln_c, 3).unwrap();
        let star = j.index.expect("joint index exists");
        assert!(star > 3);
        // Both defining properties, straight from the definition.
        assert!(ln_a[star..].iter().all(|&v| v > ln_a[star - 1]));
        assert!(ln_c[..star - 1].iter().all(|&v| v > ln_c[star - 1]));
    }

    #[test]
    fn joint_index_rejects_non_monotone_ratio() {
        // The ratio keeps failing right up to the horizon.
        let a = [1.0, 2.0, 1.0, 0.5];
        let c = [0.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            joint_index(&a, &c, 0),
            Err(ConstructError::RatioNotMonotone)
        ));
    }

    #[test]
    fn anchor_index_geometric_psi() {
        // psi(n) = 2^n (1 + 1/n): b = 2; for epsilon = 0.25 some n* > 10
        // satisfies both inequalities across the horizon.
        let values: Vec<f64> = (1..=400i32)
            .map(|n| 2f64.powi(n) * (1.0 + 1.0 / f64::from(n)))
            .collect();
        let psi = ScalingFunction::table(values.clone()).unwrap();
        let star = anchor_index(&psi, 0.25, 10, 400, AnchorCase::FiniteB { b: 2.0 })
            .unwrap()
            .expect("key index exists");
        assert!(star > 10);
        // Exhaustive re-verification straight from the inequality.
        for n in 1..=400usize {
            let (lo, hi) = (1.75f64, 2.25f64);
            if n > star {
                assert!(values[n - 1] > lo.powi((n - star) as i32) * values[star - 1]);
            }
            if n < star {
                assert!(
                    values[n - 1] > hi.powi(n as i32 - star as i32) * values[star - 1],
                    "n = {n}, star = {star}"
                );
            }
        }
    }

    #[test]
    fn anchor_index_b_one_power_psi() {
        // psi(n) = n^2: psi(n)/n = n strictly increasing, so any n* works on
        // the right side; the left side needs (1+eps)^(n-n*) decay.
        let psi = ScalingFunction::power(2.0);
        let star = anchor_index(&psi, 0.5, 5, 300, AnchorCase::BOne)
            .unwrap()
            .expect("key index exists");
        assert!(star > 5);
    }

    #[test]
    fn anchor_index_not_found_in_small_horizon() {
        let psi = ScalingFunction::power(2.0);
        // n_min beyond the horizon: nothing to find, reported not thrown.
        let _ = anchor_index(&psi, 0.5, 280, 300, AnchorCase::BOne).unwrap();
        // With n_min = horizon nothing can be returned.
        let none = anchor_index(&psi, 0.5, 300, 300, AnchorCase::BOne).unwrap();
        assert_eq!(none, None);
    }
}

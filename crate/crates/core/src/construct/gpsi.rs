//! Non-decreasing minorants `g_psi <= psi` touching `psi` infinitely often,
//! with controlled successive ratios.
//!
//! Two constructions are provided. The simple one takes a pointwise infimum
//! `g(n) = inf_k c_{n,k}` with `c_{n,k} = psi(k) (b+eps)^(n-k)` for `k <= n`
//! and `psi(k)` beyond, which yields ratio control `g(n+1) <= (b+eps) g(n)`.
//! The blockwise one anchors `g` at a sparse sequence of indices produced by
//! the anchor-index machinery and interpolates with a pair of auxiliary curves
//! per block, yielding the sharper `g(n+1)/g(n) -> b` (or `-> 1`, or
//! `-> infinity`) depending on where `b = liminf psi(n)^(1/n)` lands.
//!
//! All values are carried as natural logs.

use serde::Serialize;

use super::indices::{anchor_index, l_indices, AnchorCase};
use super::ConstructError;
use crate::scaling::{invariants, ScalingFunction};

/// Which regime the construction ran in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GpsiCase {
    Simple,
    BInfinite,
    BFinite,
    BOne,
}

/// An auxiliary interpolation curve between two anchors, in log scale.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum AuxCurve {
    /// `value(anchor) * ratio^(x - anchor)`
    Geometric {
        anchor: usize,
        ln_anchor_value: f64,
        ln_ratio: f64,
    },
    /// `value(anchor) * x / anchor`
    Proportional { anchor: usize, ln_anchor_value: f64 },
}

impl AuxCurve {
    pub fn ln_at(&self, x: usize) -> f64 {
        match *self {
            AuxCurve::Geometric {
                anchor,
                ln_anchor_value,
                ln_ratio,
            } => ln_anchor_value + (x as f64 - anchor as f64) * ln_ratio,
            AuxCurve::Proportional {
                anchor,
                ln_anchor_value,
            } => ln_anchor_value + (x as f64).ln() - (anchor as f64).ln(),
        }
    }
}

/// One block of the blockwise construction: between consecutive anchors the
/// rising curve `f` dominates until the crossover, the curve anchored at the
/// right end dominates after it.
#[derive(Debug, Clone, Serialize)]
pub struct CrossoverRecord {
    pub block: usize,
    pub anchor_lo: usize,
    pub anchor_hi: usize,
    /// Largest `n` in `[anchor_lo, anchor_hi)` with `f(n) >= h(n)`.
    pub crossover: usize,
    pub f: AuxCurve,
    pub h: AuxCurve,
}

/// A constructed minorant over `1..=horizon` (values as natural logs).
#[derive(Debug, Clone, Serialize)]
pub struct GpsiResult {
    pub ln_values: Vec<f64>,
    /// Indices where `g = psi` (contact points).
    pub contacts: Vec<usize>,
    /// For the simple construction: the smallest infimum witness `k_n` per
    /// `n`. Empty for the blockwise construction.
    pub infimum_witnesses: Vec<usize>,
    pub case: GpsiCase,
    pub epsilon: f64,
    /// The `b` estimate the construction used.
    pub b_hat: f64,
    /// Set when fewer than two anchors fit the horizon.
    pub partial: bool,
    pub crossovers: Vec<CrossoverRecord>,
}

impl GpsiResult {
    pub fn ln_g(&self, n: usize) -> f64 {
        self.ln_values[n - 1]
    }

    pub fn horizon(&self) -> usize {
        self.ln_values.len()
    }
}

const CONTACT_TOL: f64 = 1e-9;

fn contacts_of(ln_g: &[f64], ln_psi: &[f64]) -> Vec<usize> {
    ln_g.iter()
        .zip(ln_psi)
        .enumerate()
        .filter(|(_, (g, p))| (*g - *p).abs() <= CONTACT_TOL * p.abs().max(1.0))
        .map(|(i, _)| i + 1)
        .collect()
}

/// Estimate of `b = liminf psi(n)^(1/n)` used by both constructions: the
/// tail-window liminf estimate.
fn estimate_b(psi: &ScalingFunction, horizon: usize) -> Result<(f64, f64), ConstructError> {
    let window = (horizon / 4).max(1);
    let inv = invariants(psi, horizon, window)?;
    // Growth evidence distinguishes a diverging root from a finite one.
    let half = invariants(psi, (horizon / 2).max(4), (horizon / 8).max(1))?;
    Ok((inv.low_b.window, inv.low_b.window / half.low_b.window))
}

/// Sentinel-terminated scan parameters for infinite infimum searches.
const SENTINEL_RUN: usize = 64;

/// The simple infimum construction, with `b` estimated from `psi` itself.
pub fn gpsi_simple(
    psi: &ScalingFunction,
    epsilon: f64,
    horizon: usize,
) -> Result<GpsiResult, ConstructError> {
    let (b_hat, _) = estimate_b(psi, horizon)?;
    gpsi_simple_with_b(psi, b_hat, epsilon, horizon)
}

/// The simple infimum construction with an explicit `b` estimate:
/// `g(n) = inf_k c_{n,k}`, infimum witnesses `k_n`, contacts where `g = psi`.
pub fn gpsi_simple_with_b(
    psi: &ScalingFunction,
    b_hat: f64,
    epsilon: f64,
    horizon: usize,
) -> Result<GpsiResult, ConstructError> {
    if !(epsilon > 0.0) || !(b_hat + epsilon > 1.0) {
        return Err(ConstructError::InvalidEpsilon {
            epsilon,
            requirement: "epsilon > 0 and b + epsilon > 1",
        });
    }
    let ln_base = (b_hat + epsilon).ln();

    // The tail infimum inf_{k > n} psi(k) needs values beyond the horizon;
    // scan with the growth sentinel: stop after a long run of no improvement
    // once psi sits above the incumbent.
    let mut ln_psi = Vec::with_capacity(horizon + SENTINEL_RUN);
    let mut k = 1usize;
    let mut incumbent = f64::INFINITY;
    let mut run = 0usize;
    loop {
        let v = psi
            .ln_value(k)
            .map_err(|_| ConstructError::Truncated { available: k - 1 })?;
        ln_psi.push(v);
        if k > horizon {
            if v < incumbent {
                incumbent = v;
                run = 0;
            } else {
                run += 1;
            }
            if run >= SENTINEL_RUN && v > incumbent {
                break;
            }
        }
        k += 1;
        if k > horizon + 100_000 {
            // The sentinel never fired; treat as non-terminating search.
            return Err(ConstructError::Truncated { available: k - 1 });
        }
    }
    let scanned = ln_psi.len();

    // Suffix minima over the scanned range, keeping the earliest witness.
    let mut suffix_min = vec![(f64::INFINITY, usize::MAX); scanned + 1];
    for i in (0..scanned).rev() {
        let (best, at) = suffix_min[i + 1];
        suffix_min[i] = if ln_psi[i] <= best {
            (ln_psi[i], i + 1)
        } else {
            (best, at)
        };
    }

    let mut ln_values = Vec::with_capacity(horizon);
    let mut witnesses = Vec::with_capacity(horizon);
    // Head: min over k <= n of ln psi(k) - k ln_base (earliest argmin).
    let mut head_best = f64::INFINITY;
    let mut head_at = 0usize;
    for n in 1..=horizon {
        let centered = ln_psi[n - 1] - n as f64 * ln_base;
        if centered < head_best {
            head_best = centered;
            head_at = n;
        }
        let head_value = head_best + n as f64 * ln_base;
        let (tail_value, tail_at) = suffix_min[n];
        if head_value <= tail_value {
            ln_values.push(head_value);
            witnesses.push(head_at);
        } else {
            ln_values.push(tail_value);
            witnesses.push(tail_at);
        }
    }

    let ln_psi_horizon = &ln_psi[..horizon];
    let contacts = contacts_of(&ln_values, ln_psi_horizon);
    Ok(GpsiResult {
        ln_values,
        contacts,
        infimum_witnesses: witnesses,
        case: GpsiCase::Simple,
        epsilon,
        b_hat,
        partial: false,
        crossovers: Vec::new(),
    })
}

/// The blockwise construction, case-dispatched on the `b` estimate:
/// diverging root -> geometric interpolation over the maximal L-sequence of
/// `psi(n)^(1/n)`; finite `b > 1` -> two geometric curves per block with the
/// epsilon schedule `eps/j`; `b = 1` -> a proportional rising curve and a
/// `(1 + 1/n_j)`-geometric falling curve.
pub fn gpsi_blockwise(
    psi: &ScalingFunction,
    epsilon: f64,
    horizon: usize,
) -> Result<GpsiResult, ConstructError> {
    let (b_hat, growth) = estimate_b(psi, horizon)?;
    let case = if growth > 1.5 {
        GpsiCase::BInfinite
    } else if b_hat < 1.05 {
        GpsiCase::BOne
    } else {
        GpsiCase::BFinite
    };
    gpsi_blockwise_with_case(psi, epsilon, horizon, case, b_hat)
}

pub fn gpsi_blockwise_with_case(
    psi: &ScalingFunction,
    epsilon: f64,
    horizon: usize,
    case: GpsiCase,
    b_hat: f64,
) -> Result<GpsiResult, ConstructError> {
    let ln_psi: Vec<f64> = (1..=horizon)
        .map(|n| psi.ln_value(n))
        .collect::<Result<_, _>>()?;
    match case {
        GpsiCase::BInfinite => build_b_infinite(&ln_psi, epsilon, b_hat),
        GpsiCase::BFinite => build_blockwise(psi, &ln_psi, epsilon, b_hat, false),
        GpsiCase::BOne => build_blockwise(psi, &ln_psi, epsilon, b_hat, true),
        GpsiCase::Simple => gpsi_simple_with_b(psi, b_hat, epsilon, horizon),
    }
}

/// Backward prefix fill: `g(n) = min(g(n+1), psi(n))` below the first anchor.
fn fill_prefix(ln_values: &mut [f64], ln_psi: &[f64], first_anchor: usize) {
    for n in (1..first_anchor).rev() {
        ln_values[n - 1] = ln_values[n].min(ln_psi[n - 1]);
    }
}

fn build_b_infinite(
    ln_psi: &[f64],
    epsilon: f64,
    b_hat: f64,
) -> Result<GpsiResult, ConstructError> {
    let horizon = ln_psi.len();
    // Roots r(n) = psi(n)^(1/n) in log scale.
    let roots: Vec<f64> = ln_psi
        .iter()
        .enumerate()
        .map(|(i, &v)| v / (i + 1) as f64)
        .collect();
    // Anchors: L-indices of the root sequence with root > 1.
    let anchors: Vec<usize> = l_indices(&roots)
        .indices
        .into_iter()
        .filter(|&i| roots[i - 1] > 0.0)
        .collect();
    let partial = anchors.len() < 2;
    let mut ln_values = vec![f64::NAN; horizon];
    if anchors.is_empty() {
        // No usable anchor: degenerate fallback, g = running min of psi from
        // the right. Flagged partial.
        ln_values[horizon - 1] = ln_psi[horizon - 1];
        fill_prefix(&mut ln_values, ln_psi, horizon);
        let contacts = contacts_of(&ln_values, ln_psi);
        return Ok(GpsiResult {
            ln_values,
            contacts,
            infimum_witnesses: Vec::new(),
            case: GpsiCase::BInfinite,
            epsilon,
            b_hat,
            partial: true,
            crossovers: Vec::new(),
        });
    }
    // Between anchors (and beyond the last), geometric interpolation of the
    // anchored root: g(n) = psi(n_k)^(n / n_k).
    for (idx, &nk) in anchors.iter().enumerate() {
        let end = anchors.get(idx + 1).copied().unwrap_or(horizon + 1);
        let rate = roots[nk - 1];
        for n in nk..end.min(horizon + 1) {
            ln_values[n - 1] = n as f64 * rate;
        }
    }
    fill_prefix(&mut ln_values, ln_psi, anchors[0]);
    let contacts = contacts_of(&ln_values, ln_psi);
    Ok(GpsiResult {
        ln_values,
        contacts,
        infimum_witnesses: Vec::new(),
        case: GpsiCase::BInfinite,
        epsilon,
        b_hat,
        partial,
        crossovers: Vec::new(),
    })
}

fn build_blockwise(
    psi: &ScalingFunction,
    ln_psi: &[f64],
    epsilon: f64,
    b_hat: f64,
    b_one: bool,
) -> Result<GpsiResult, ConstructError> {
    let horizon = ln_psi.len();
    if !b_one && !(epsilon > 0.0 && epsilon < b_hat - 1.0) {
        return Err(ConstructError::InvalidEpsilon {
            epsilon,
            requirement: "0 < epsilon < b - 1 in the finite-b case",
        });
    }
    if b_one && !(epsilon > 0.0) {
        return Err(ConstructError::InvalidEpsilon {
            epsilon,
            requirement: "epsilon > 0",
        });
    }

    // Anchor sequence via the anchor-index machinery. The epsilon schedule
    // shrinks per block: eps/j in the finite case, 1/n_(j-1) in the b = 1
    // case.
    let mut anchors: Vec<usize> = Vec::new();
    let mut eps_used: Vec<f64> = Vec::new();
    let mut n_min = 0usize;
    loop {
        let j = anchors.len() + 1;
        let eps_j = if b_one {
            if j == 1 {
                epsilon
            } else {
                1.0 / anchors[j - 2] as f64
            }
        } else {
            epsilon / j as f64
        };
        let case = if b_one {
            AnchorCase::BOne
        } else {
            AnchorCase::FiniteB { b: b_hat }
        };
        match anchor_index(psi, eps_j, n_min, horizon, case)? {
            Some(star) => {
                anchors.push(star);
                eps_used.push(eps_j);
                n_min = star;
            }
            None => break,
        }
    }

    let partial = anchors.len() < 2;
    let mut ln_values = vec![f64::NAN; horizon];
    let mut crossovers = Vec::new();

    if anchors.is_empty() {
        ln_values[horizon - 1] = ln_psi[horizon - 1];
        fill_prefix(&mut ln_values, ln_psi, horizon);
        let contacts = contacts_of(&ln_values, ln_psi);
        return Ok(GpsiResult {
            ln_values,
            contacts,
            infimum_witnesses: Vec::new(),
            case: if b_one { GpsiCase::BOne } else { GpsiCase::BFinite },
            epsilon,
            b_hat,
            partial: true,
            crossovers,
        });
    }

    let rising_curve = |j: usize, anchor: usize| -> AuxCurve {
        if b_one {
            AuxCurve::Proportional {
                anchor,
                ln_anchor_value: ln_psi[anchor - 1],
            }
        } else {
            AuxCurve::Geometric {
                anchor,
                ln_anchor_value: ln_psi[anchor - 1],
                ln_ratio: (b_hat - eps_used[j - 1]).ln(),
            }
        }
    };
    let falling_curve = |j: usize, anchor_hi: usize| -> AuxCurve {
        let ln_ratio = if b_one {
            // (1 + 1/n_j): the schedule that selected n_(j+1).
            (1.0 + 1.0 / anchors[j - 1] as f64).ln()
        } else {
            (b_hat + eps_used[j]).ln()
        };
        AuxCurve::Geometric {
            anchor: anchor_hi,
            ln_anchor_value: ln_psi[anchor_hi - 1],
            ln_ratio,
        }
    };

    for (idx, &nj) in anchors.iter().enumerate() {
        let j = idx + 1;
        ln_values[nj - 1] = ln_psi[nj - 1];
        match anchors.get(idx + 1) {
            Some(&nj1) => {
                let f = rising_curve(j, nj);
                let h = falling_curve(j, nj1);
                // Crossover: last n in [nj, nj1) where f >= h.
                let mut crossover = nj;
                for n in nj..nj1 {
                    if f.ln_at(n) >= h.ln_at(n) {
                        crossover = n;
                    } else {
                        break;
                    }
                }
                for n in nj + 1..nj1 {
                    ln_values[n - 1] = f.ln_at(n).max(h.ln_at(n));
                }
                crossovers.push(CrossoverRecord {
                    block: j,
                    anchor_lo: nj,
                    anchor_hi: nj1,
                    crossover,
                    f,
                    h,
                });
            }
            None => {
                // Beyond the last anchor the rising curve alone extends g;
                // the verified anchor inequality keeps it strictly below psi.
                let f = rising_curve(j, nj);
                for n in nj + 1..=horizon {
                    ln_values[n - 1] = f.ln_at(n);
                }
            }
        }
    }
    fill_prefix(&mut ln_values, ln_psi, anchors[0]);

    let contacts = contacts_of(&ln_values, ln_psi);
    Ok(GpsiResult {
        ln_values,
        contacts,
        infimum_witnesses: Vec::new(),
        case: if b_one { GpsiCase::BOne } else { GpsiCase::BFinite },
        epsilon,
        b_hat,
        partial,
        crossovers,
    })
}

/// Property check shared by the test and acceptance suites: non-decreasing,
/// `g <= psi`, contact equality, and (for the simple construction) the ratio
/// cap `g(n+1)/g(n) <= b + eps`.
pub fn check_gpsi_properties(
    result: &GpsiResult,
    psi: &ScalingFunction,
) -> Result<(), String> {
    let h = result.horizon();
    for n in 1..=h {
        let ln_psi = psi.ln_value(n).map_err(|e| e.to_string())?;
        let g = result.ln_g(n);
        if g > ln_psi + 1e-9 * ln_psi.abs().max(1.0) {
            return Err(format!("g({n}) exceeds psi({n})"));
        }
        if n > 1 && g < result.ln_g(n - 1) - 1e-9 {
            return Err(format!("g decreases at n = {n}"));
        }
    }
    for &c in &result.contacts {
        let ln_psi = psi.ln_value(c).map_err(|e| e.to_string())?;
        if (result.ln_g(c) - ln_psi).abs() > 1e-6 * ln_psi.abs().max(1.0) {
            return Err(format!("reported contact at {c} is not a contact"));
        }
    }
    if result.case == GpsiCase::Simple {
        let cap = (result.b_hat + result.epsilon).ln() + 1e-9;
        for n in 2..=h {
            if result.ln_g(n) - result.ln_g(n - 1) > cap {
                return Err(format!("simple ratio cap violated at n = {n}"));
            }
        }
        if result.contacts.is_empty() {
            return Err("no contacts reported".into());
        }
    }
    Ok(())
}

//! The envelope digit-weight sequence used for liminf-type lower bounds:
//! from `psi`, `alpha` and a `B` estimate it produces positive weights
//! `d_n` whose prefix log-sums hug `alpha psi(n)` from above, grow
//! superlinearly, and obey the ratio cap
//! `log d_(n+1) / sum log d_k <= B + eps - 1`.
//!
//! The envelope is `E_n = sup_k d_{n,k}` with `ln d_{n,k} = alpha psi(k)`
//! for `k <= n` and `alpha psi(k) (B+eps)^(n-k)` beyond, so `sum ln d_k`
//! telescopes to `ln E_n`. Note the exponent scale here is `psi` itself
//! (linear), which caps how large `psi` may get before the construction
//! must refuse.

use super::ConstructError;
use crate::scaling::{invariants, ScalingFunction};

#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    /// `ln d_n` for `n = 1..=horizon`.
    pub ln_d: Vec<f64>,
    /// Prefix sums `sum_{k<=n} ln d_k` (telescoped envelope logs).
    pub prefix: Vec<f64>,
    /// `sum ln d_k / psi(n)` per prefix; its tail hugs `alpha`.
    pub psi_ratio: Vec<f64>,
    pub alpha: f64,
    pub epsilon: f64,
    pub cap_b_hat: f64,
}

impl EnvelopeResult {
    /// The three defining properties, horizon-restricted:
    /// (i) tail of `sum ln d / psi` within `tol` of `alpha` from above,
    /// (ii) `sum ln d / n` grows,
    /// (iii) `ln d_(n+1) <= (B + eps - 1) sum_{k<=n} ln d_k`.
    pub fn check_properties(&self, tol: f64) -> Result<(), String> {
        let h = self.ln_d.len();
        if h < 4 {
            return Ok(());
        }
        let window = (h / 4).max(1);
        let tail_min = self.psi_ratio[h - window..]
            .iter()
            .fold(f64::INFINITY, |a, &v| a.min(v));
        if tail_min < self.alpha - 1e-9 {
            return Err(format!("prefix sums dip below alpha psi: {tail_min}"));
        }
        if (tail_min - self.alpha).abs() > tol * self.alpha {
            return Err(format!(
                "liminf estimate {tail_min} not within {tol} of alpha = {}",
                self.alpha
            ));
        }
        let early = self.prefix[h / 2 - 1] / (h / 2) as f64;
        let late = self.prefix[h - 1] / h as f64;
        if late <= early {
            return Err("sum ln d / n does not grow".into());
        }
        let cap = self.cap_b_hat + self.epsilon - 1.0;
        for n in 1..h {
            if self.ln_d[n] > cap * self.prefix[n - 1] + 1e-9 {
                return Err(format!("ratio cap violated at n = {}", n + 1));
            }
        }
        Ok(())
    }
}

const SENTINEL_RUN: usize = 64;
const SENTINEL_DROP: f64 = 10.0 * std::f64::consts::LN_2;

/// Builds the weight sequence. `B` is estimated from `psi` unless supplied
/// via [`envelope_sequence_with_b`].
pub fn envelope_sequence(
    psi: &ScalingFunction,
    alpha: f64,
    epsilon: f64,
    horizon: usize,
) -> Result<EnvelopeResult, ConstructError> {
    let window = (horizon / 4).max(1);
    let cap_b = invariants(psi, horizon.max(4), window)?.cap_b.window;
    envelope_sequence_with_b(psi, alpha, epsilon, horizon, cap_b)
}

pub fn envelope_sequence_with_b(
    psi: &ScalingFunction,
    alpha: f64,
    epsilon: f64,
    horizon: usize,
    cap_b_hat: f64,
) -> Result<EnvelopeResult, ConstructError> {
    if !(alpha > 0.0) {
        return Err(ConstructError::BadParameter {
            name: "alpha",
            value: alpha,
        });
    }
    if !(epsilon > 0.0) {
        return Err(ConstructError::InvalidEpsilon {
            epsilon,
            requirement: "epsilon > 0",
        });
    }
    let ln_base = (cap_b_hat + epsilon).ln();
    if !(ln_base > 0.0) {
        return Err(ConstructError::InvalidEpsilon {
            epsilon,
            requirement: "B + epsilon > 1",
        });
    }

    // Scan psi past the horizon until the centered tail weights
    // u_k = psi(k) / (B+eps)^k have decayed for good (sentinel).
    let mut psi_lin = Vec::with_capacity(horizon + SENTINEL_RUN);
    let mut ln_u = Vec::with_capacity(horizon + SENTINEL_RUN);
    let mut best_u = f64::NEG_INFINITY;
    let mut run = 0usize;
    let mut k = 1usize;
    loop {
        let lp = psi
            .ln_value(k)
            .map_err(|_| ConstructError::Truncated { available: k - 1 })?;
        // The exponent scale is alpha * psi(k): it must stay inside f64.
        if lp > 690.0 {
            return Err(ConstructError::Overflow(k));
        }
        psi_lin.push(lp.exp());
        let u = lp - k as f64 * ln_base;
        ln_u.push(u);
        // The sentinel only watches the post-horizon tail: no new sup
        // candidate for a long run, with the current weight well below the
        // incumbent.
        if k > horizon {
            if u > best_u {
                best_u = u;
                run = 0;
            } else {
                run += 1;
            }
            if run >= SENTINEL_RUN && u < best_u - SENTINEL_DROP {
                break;
            }
        }
        k += 1;
        if k > horizon + 100_000 {
            return Err(ConstructError::Truncated { available: k - 1 });
        }
    }
    let scanned = ln_u.len();

    // Suffix maxima of ln u over (n, scanned].
    let mut suffix_max = vec![f64::NEG_INFINITY; scanned + 1];
    for i in (0..scanned).rev() {
        suffix_max[i] = suffix_max[i + 1].max(ln_u[i]);
    }

    let mut prefix = Vec::with_capacity(horizon);
    let mut ln_d = Vec::with_capacity(horizon);
    let mut psi_ratio = Vec::with_capacity(horizon);
    let mut head_max = f64::NEG_INFINITY;
    let mut prev_env = 0.0f64;
    for n in 1..=horizon {
        head_max = head_max.max(psi_lin[n - 1]);
        let tail = (suffix_max[n] + n as f64 * ln_base).exp();
        let envelope = alpha * head_max.max(tail);
        let d = if n == 1 { envelope } else { envelope - prev_env };
        ln_d.push(d);
        prefix.push(envelope);
        psi_ratio.push(envelope / psi_lin[n - 1]);
        prev_env = envelope;
    }

    Ok(EnvelopeResult {
        ln_d,
        prefix,
        psi_ratio,
        alpha,
        epsilon,
        cap_b_hat,
    })
}

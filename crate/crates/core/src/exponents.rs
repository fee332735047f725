//! Lyapunov and fast-Lyapunov exponent traces along exact orbits.
//!
//! `log |(T^n)'(x)|` is the chain-rule sum of per-step derivative logs, and
//! differs from `gamma * sum log a_k(x)` by at most `n log C`; that bound is
//! what lets digit statistics stand in for derivative growth. All sums are
//! kept in log domain with compensated summation: digit products like
//! `prod ceil(e^k)` overflow any fixed-size integer immediately.

use thiserror::Error;

use crate::coding::{encode, CodingError, DigitWord, OrbitRecord};
use crate::maps::MapSpec;
use crate::rational::Rat;
use crate::scaling::{ScalingFunction, ScalingError};
use crate::sum::{prefix_sums, CompensatedSum};

#[derive(Debug, Error)]
pub enum ExponentError {
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Scaling(#[from] ScalingError),
    #[error("psi({n}) = {value} is not positive")]
    NonPositivePsi { n: usize, value: f64 },
    #[error("word too short: digit statistics need length >= 2, got {0}")]
    WordTooShort(usize),
}

/// Per-prefix log sums along an orbit: `log_deriv_sum[k]` is
/// `sum_{j<=k+1} ln |T'(T^(j-1) x)|` and `digit_log_sum[k]` is
/// `sum_{j<=k+1} ln a_j`, so `log_pi = digit_log_sum`.
#[derive(Debug, Clone, Default)]
pub struct ExponentTrace {
    pub log_deriv_sum: Vec<f64>,
    pub digit_log_sum: Vec<f64>,
}

impl ExponentTrace {
    pub fn depth(&self) -> usize {
        self.log_deriv_sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_deriv_sum.is_empty()
    }

    /// `ln Pi_n` per prefix (identical to the digit log sums).
    pub fn log_pi(&self) -> &[f64] {
        &self.digit_log_sum
    }

    /// Classical Lyapunov partial `log |(T^n)'(x)| / n` at prefix `n`
    /// (1-based).
    pub fn lyapunov_partial(&self, n: usize) -> f64 {
        self.log_deriv_sum[n - 1] / n as f64
    }

    pub fn from_orbit(record: &OrbitRecord) -> Self {
        ExponentTrace {
            log_deriv_sum: prefix_sums(&record.derivative_logs),
            digit_log_sum: prefix_sums(&record.word.ln_digits()),
        }
    }

    /// Builds a trace from a digit word alone, taking the derivative logs
    /// from the chain-rule comparison with slack zero. Useful for synthetic
    /// digit profiles when no exact orbit is wanted.
    pub fn from_word(word: &DigitWord, gamma: f64) -> Self {
        let digit_logs = word.ln_digits();
        let deriv_logs: Vec<f64> = digit_logs.iter().map(|l| gamma * l).collect();
        ExponentTrace {
            log_deriv_sum: prefix_sums(&deriv_logs),
            digit_log_sum: prefix_sums(&digit_logs),
        }
    }
}

/// Codes `x` to `depth` digits and accumulates the per-prefix log sums.
pub fn trace(map: &MapSpec, x: &Rat, depth: usize) -> Result<ExponentTrace, ExponentError> {
    if depth == 0 {
        return Ok(ExponentTrace::default());
    }
    let record = encode(map, x, depth)?;
    Ok(ExponentTrace::from_orbit(&record))
}

/// Per-prefix transformation gap `|gamma * sum log a_k - log |(T^n)'||`.
/// The chain-rule comparison bounds every entry by `n log C`.
pub fn chain_rule_gap(trace: &ExponentTrace, gamma: f64) -> Vec<f64> {
    trace
        .digit_log_sum
        .iter()
        .zip(&trace.log_deriv_sum)
        .map(|(d, l)| (gamma * d - l).abs())
        .collect()
}

/// Checks the transformation bound `gap[n] <= n log C` over a whole trace.
pub fn chain_rule_bound_holds(trace: &ExponentTrace, gamma: f64, c: f64) -> bool {
    let ln_c = c.ln();
    chain_rule_gap(trace, gamma)
        .iter()
        .enumerate()
        .all(|(i, g)| *g <= (i + 1) as f64 * ln_c + 1e-9)
}

/// Fast-exponent partials `log |(T^n)'| / psi(n)` with the running extremes
/// that estimate the limsup/liminf variants.
#[derive(Debug, Clone)]
pub struct FastPartials {
    pub values: Vec<f64>,
    /// Running maximum of the partials (upper fast exponent estimate).
    pub running_sup: Vec<f64>,
    /// Running minimum of the partials (lower fast exponent estimate).
    pub running_inf: Vec<f64>,
}

pub fn fast_exponent_partials(
    trace: &ExponentTrace,
    psi: &ScalingFunction,
) -> Result<FastPartials, ExponentError> {
    let mut values = Vec::with_capacity(trace.depth());
    let mut running_sup = Vec::with_capacity(trace.depth());
    let mut running_inf = Vec::with_capacity(trace.depth());
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    for (i, &l) in trace.log_deriv_sum.iter().enumerate() {
        let n = i + 1;
        let ln_psi = psi.ln_value(n)?;
        let psi_n = ln_psi.exp();
        if !(psi_n > 0.0) {
            return Err(ExponentError::NonPositivePsi { n, value: psi_n });
        }
        // l / psi(n) in log-safe form; l >= 0 for expanding maps but keep the
        // sign for parabolic slowdown prefixes.
        let v = if l == 0.0 {
            0.0
        } else {
            l.signum() * (l.abs().ln() - ln_psi).exp()
        };
        sup = sup.max(v);
        inf = inf.min(v);
        values.push(v);
        running_sup.push(sup);
        running_inf.push(inf);
    }
    Ok(FastPartials {
        values,
        running_sup,
        running_inf,
    })
}

/// Digit statistics: per-prefix partials of
/// `kappa = lim sum log a_k / n` and
/// `tau = 1 + limsup log a_{n+1} / sum_{k<=n} log a_k`.
#[derive(Debug, Clone)]
pub struct DigitStatistics {
    /// `kappa` partial at prefix `n = 1..len`.
    pub kappa: Vec<f64>,
    /// `tau` partial at prefix `n = 1..len-1`; `None` where the prefix log
    /// sum vanishes (all digits one), reported as undefined rather than 1
    /// or infinity.
    pub tau: Vec<Option<f64>>,
    /// Windowed estimates: last value of kappa, windowed sup of tau.
    pub kappa_estimate: f64,
    pub tau_estimate: Option<f64>,
}

pub fn digit_statistics(word: &DigitWord, window: usize) -> Result<DigitStatistics, ExponentError> {
    let len = word.len();
    if len < 2 {
        return Err(ExponentError::WordTooShort(len));
    }
    let logs = word.ln_digits();
    let mut sum = CompensatedSum::new();
    let mut kappa = Vec::with_capacity(len);
    let mut tau = Vec::with_capacity(len - 1);
    for (i, &l) in logs.iter().enumerate() {
        sum.add(l);
        let n = i + 1;
        kappa.push(sum.value() / n as f64);
        if n < len {
            let denom = sum.value();
            tau.push(if denom > 0.0 {
                Some(1.0 + logs[n] / denom)
            } else {
                None
            });
        }
    }
    let window = window.max(1).min(tau.len());
    let tau_estimate = tau[tau.len() - window..]
        .iter()
        .flatten()
        .copied()
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    Ok(DigitStatistics {
        kappa_estimate: *kappa.last().unwrap(),
        kappa,
        tau,
        tau_estimate,
    })
}

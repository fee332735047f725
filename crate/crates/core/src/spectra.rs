//! Closed-form evaluation of the fast Lyapunov spectrum and the auxiliary
//! dimension formulas, keyed by `gamma` and the scaling invariants.
//!
//! For a scaling function with `psi(n)/n -> infinity` the spectrum is
//! piecewise constant: value 1 at `alpha = 0`, the plateau
//! `1/((gamma-1) beta + 1)` at finite positive `alpha` (when the level set is
//! nonempty at all), and `1/((gamma-1) B + 1)` at `alpha = infinity`. The
//! upper and lower variants replace `beta` by `b` and `B`. Everything here
//! is therefore a small amount of arithmetic around two inputs: `gamma` from
//! the map, invariants from the scaling function — which is exactly why the
//! evaluator takes invariants rather than raw `psi`, keeping truncation
//! provenance with the caller.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("gamma must exceed 1 (got {0})")]
    BadGamma(f64),
    #[error("the spectrum formulas require psi(n)/n -> infinity; the superlinearity flag is false")]
    NotSuperlinear,
    #[error("invariant {name} = {value} is out of range (need >= {min})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
    },
}

/// Which level-set value is being classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlphaClass {
    Zero,
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    Fast,
    Upper,
    Lower,
}

/// A Hausdorff dimension outcome: either a value in `[0, 1]` or the marker
/// for an empty level set (which is not the same thing as dimension zero).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Dimension {
    Value(f64),
    EmptyLevelSet,
}

impl Dimension {
    pub fn value(&self) -> Option<f64> {
        match self {
            Dimension::Value(v) => Some(*v),
            Dimension::EmptyLevelSet => None,
        }
    }
}

/// A spectrum evaluation with its inputs echoed.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumValue {
    pub dimension: Dimension,
    /// Which formula produced the value.
    pub formula: &'static str,
    pub gamma: f64,
    pub inputs: Vec<(&'static str, f64)>,
}

/// Inputs for a spectrum evaluation: `gamma` plus the scaling invariants
/// (possibly infinite) and the two flags that gate the formulas.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumQuery {
    pub gamma: f64,
    pub beta: f64,
    pub cap_b: f64,
    pub low_b: f64,
    pub superlinear: bool,
    pub equiv_increasing: bool,
}

impl SpectrumQuery {
    pub fn new(gamma: f64, beta: f64, cap_b: f64, low_b: f64) -> Self {
        Self {
            gamma,
            beta,
            cap_b,
            low_b,
            superlinear: true,
            equiv_increasing: true,
        }
    }
}

fn check_gamma(gamma: f64) -> Result<(), SpectraError> {
    if gamma > 1.0 {
        Ok(())
    } else {
        Err(SpectraError::BadGamma(gamma))
    }
}

fn check_at_least(name: &'static str, value: f64, min: f64) -> Result<(), SpectraError> {
    if value >= min {
        Ok(())
    } else {
        Err(SpectraError::OutOfRange { name, value, min })
    }
}

/// The plateau value `1/((gamma - 1) v + 1)`; infinite `v` gives 0.
pub fn plateau(gamma: f64, v: f64) -> f64 {
    if v.is_infinite() {
        0.0
    } else {
        1.0 / ((gamma - 1.0) * v + 1.0)
    }
}

/// The fast Lyapunov spectrum `F_psi(alpha)`.
///
/// * `alpha = 0`: dimension 1 (the level set has full Lebesgue measure in
///   the branch union).
/// * finite `alpha > 0`: empty unless `psi` is equivalent to an increasing
///   function, else `1/((gamma-1) beta + 1)`.
/// * `alpha = infinity`: `1/((gamma-1) B + 1)`.
pub fn fast_spectrum(q: &SpectrumQuery, alpha: AlphaClass) -> Result<SpectrumValue, SpectraError> {
    check_gamma(q.gamma)?;
    if !q.superlinear {
        return Err(SpectraError::NotSuperlinear);
    }
    let value = match alpha {
        AlphaClass::Zero => SpectrumValue {
            dimension: Dimension::Value(1.0),
            formula: "fast, alpha = 0: full-measure level set, dimension 1",
            gamma: q.gamma,
            inputs: vec![],
        },
        AlphaClass::Finite => {
            check_at_least("beta", q.beta, 1.0)?;
            if !q.equiv_increasing {
                SpectrumValue {
                    dimension: Dimension::EmptyLevelSet,
                    formula: "fast, finite alpha: level set empty (psi not equivalent to an increasing function)",
                    gamma: q.gamma,
                    inputs: vec![("beta", q.beta)],
                }
            } else {
                SpectrumValue {
                    dimension: Dimension::Value(plateau(q.gamma, q.beta)),
                    formula: "fast, finite alpha: 1/((gamma-1) beta + 1)",
                    gamma: q.gamma,
                    inputs: vec![("beta", q.beta)],
                }
            }
        }
        AlphaClass::Infinite => {
            check_at_least("B", q.cap_b, 1.0)?;
            SpectrumValue {
                dimension: Dimension::Value(plateau(q.gamma, q.cap_b)),
                formula: "fast, alpha = infinity: 1/((gamma-1) B + 1)",
                gamma: q.gamma,
                inputs: vec![("B", q.cap_b)],
            }
        }
    };
    Ok(value)
}

/// The upper (`limsup`) and lower (`liminf`) fast Lyapunov spectra: constant
/// `1/((gamma-1) b + 1)` resp. `1/((gamma-1) B + 1)` on all of
/// `(0, infinity]`, and 1 at `alpha = 0`.
pub fn upper_lower_spectrum(
    q: &SpectrumQuery,
    kind: SpectrumKind,
    alpha: AlphaClass,
) -> Result<SpectrumValue, SpectraError> {
    check_gamma(q.gamma)?;
    if !q.superlinear {
        return Err(SpectraError::NotSuperlinear);
    }
    if alpha == AlphaClass::Zero {
        return Ok(SpectrumValue {
            dimension: Dimension::Value(1.0),
            formula: "upper/lower, alpha = 0: full-measure level set, dimension 1",
            gamma: q.gamma,
            inputs: vec![],
        });
    }
    let value = match kind {
        SpectrumKind::Upper => {
            check_at_least("b", q.low_b, 1.0)?;
            SpectrumValue {
                dimension: Dimension::Value(plateau(q.gamma, q.low_b)),
                formula: "upper, alpha > 0: 1/((gamma-1) b + 1)",
                gamma: q.gamma,
                inputs: vec![("b", q.low_b)],
            }
        }
        SpectrumKind::Lower => {
            check_at_least("B", q.cap_b, 1.0)?;
            SpectrumValue {
                dimension: Dimension::Value(plateau(q.gamma, q.cap_b)),
                formula: "lower, alpha > 0: 1/((gamma-1) B + 1)",
                gamma: q.gamma,
                inputs: vec![("B", q.cap_b)],
            }
        }
        SpectrumKind::Fast => return fast_spectrum(q, alpha),
    };
    Ok(value)
}

/// The classical Lyapunov spectrum at infinity: `L(infinity) = 1/gamma` for
/// every Markov-Renyi map.
pub fn lyapunov_at_infinity(gamma: f64) -> Result<SpectrumValue, SpectraError> {
    check_gamma(gamma)?;
    Ok(SpectrumValue {
        dimension: Dimension::Value(1.0 / gamma),
        formula: "L(infinity) = 1/gamma",
        gamma,
        inputs: vec![],
    })
}

/// The fast spectrum is continuous at infinity exactly when `beta = B`; at
/// finite resolution the predicate compares the two estimates.
pub fn continuous_at_infinity(beta: f64, cap_b: f64, tol: f64) -> bool {
    if beta.is_infinite() && cap_b.is_infinite() {
        return true;
    }
    (beta - cap_b).abs() < tol
}

/// Auxiliary dimension formulas established alongside the spectra.
#[derive(Debug, Clone, Copy)]
pub enum AuxiliaryKind {
    /// Upper bound for the set with `tau(x) >= beta` and `k(x) = infinity`:
    /// `1/((gamma-1) beta + 1)` (`beta` in `[1, infinity]`).
    GammaInfinityBound { beta: f64 },
    /// `Pi_n(x) >= b^(c^n)` eventually or infinitely often: both have
    /// dimension `1/((gamma-1) c + 1)` (`c > 1`).
    DoubleExponential { c: f64 },
    /// Points whose digits tend to infinity: dimension `1/gamma`.
    DigitsToInfinity,
    /// Points with `limsup (sum log a_k)/n = infinity`: dimension `1/gamma`.
    UnboundedAverages,
    /// Points with `log a_n / phi(n) -> 1`: dimension
    /// `1/(gamma + (gamma-1) xi)` with `xi = limsup phi(n+1)/sum phi`.
    GrowthRate { xi: f64 },
}

pub fn auxiliary_dimensions(
    gamma: f64,
    kind: AuxiliaryKind,
) -> Result<SpectrumValue, SpectraError> {
    check_gamma(gamma)?;
    let value = match kind {
        AuxiliaryKind::GammaInfinityBound { beta } => {
            check_at_least("beta", beta, 1.0)?;
            SpectrumValue {
                dimension: Dimension::Value(plateau(gamma, beta)),
                formula: "dim bound for {tau >= beta, k = infinity}: 1/((gamma-1) beta + 1)",
                gamma,
                inputs: vec![("beta", beta)],
            }
        }
        AuxiliaryKind::DoubleExponential { c } => {
            if !(c > 1.0) {
                return Err(SpectraError::OutOfRange {
                    name: "c",
                    value: c,
                    min: 1.0,
                });
            }
            SpectrumValue {
                dimension: Dimension::Value(plateau(gamma, c)),
                formula: "dim {Pi_n >= b^(c^n)}: 1/((gamma-1) c + 1)",
                gamma,
                inputs: vec![("c", c)],
            }
        }
        AuxiliaryKind::DigitsToInfinity => SpectrumValue {
            dimension: Dimension::Value(1.0 / gamma),
            formula: "dim {a_n -> infinity} = 1/gamma",
            gamma,
            inputs: vec![],
        },
        AuxiliaryKind::UnboundedAverages => SpectrumValue {
            dimension: Dimension::Value(1.0 / gamma),
            formula: "dim {limsup (sum log a_k)/n = infinity} = 1/gamma",
            gamma,
            inputs: vec![],
        },
        AuxiliaryKind::GrowthRate { xi } => {
            check_at_least("xi", xi, 0.0)?;
            let dim = if xi.is_infinite() {
                0.0
            } else {
                1.0 / (gamma + (gamma - 1.0) * xi)
            };
            SpectrumValue {
                dimension: Dimension::Value(dim),
                formula: "dim {log a_n / phi(n) -> 1}: 1/(gamma + (gamma-1) xi)",
                gamma,
                inputs: vec![("xi", xi)],
            }
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial_block_query() -> SpectrumQuery {
        SpectrumQuery::new(2.0, 5.0, 4.0, 3.0)
    }

    #[test]
    fn factorial_block_plateaus_exact() {
        let q = factorial_block_query();
        let fast_finite = fast_spectrum(&q, AlphaClass::Finite).unwrap();
        assert_eq!(fast_finite.dimension, Dimension::Value(1.0 / 6.0));
        let fast_inf = fast_spectrum(&q, AlphaClass::Infinite).unwrap();
        assert_eq!(fast_inf.dimension, Dimension::Value(1.0 / 5.0));
        let upper = upper_lower_spectrum(&q, SpectrumKind::Upper, AlphaClass::Finite).unwrap();
        assert_eq!(upper.dimension, Dimension::Value(1.0 / 4.0));
        let lower = upper_lower_spectrum(&q, SpectrumKind::Lower, AlphaClass::Infinite).unwrap();
        assert_eq!(lower.dimension, Dimension::Value(1.0 / 5.0));
        // beta != B: the spectrum is discontinuous at infinity here.
        assert!(!continuous_at_infinity(q.beta, q.cap_b, 1e-9));
    }

    #[test]
    fn alpha_zero_always_one() {
        let q = factorial_block_query();
        for kind in [SpectrumKind::Fast, SpectrumKind::Upper, SpectrumKind::Lower] {
            let v = upper_lower_spectrum(&q, kind, AlphaClass::Zero).unwrap();
            assert_eq!(v.dimension, Dimension::Value(1.0));
        }
    }

    #[test]
    fn gauss_with_power_psi() {
        // gamma = 2 with beta = B = b = 1: every positive-alpha value is 1/2.
        let q = SpectrumQuery::new(2.0, 1.0, 1.0, 1.0);
        let v = fast_spectrum(&q, AlphaClass::Finite).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.5));
        let v = upper_lower_spectrum(&q, SpectrumKind::Upper, AlphaClass::Infinite).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.5));
        assert!(continuous_at_infinity(q.beta, q.cap_b, 1e-9));
    }

    #[test]
    fn geometric_psi_collapses_all_three() {
        let q = SpectrumQuery::new(2.0, 2.0, 2.0, 2.0);
        let f = fast_spectrum(&q, AlphaClass::Finite).unwrap();
        let u = upper_lower_spectrum(&q, SpectrumKind::Upper, AlphaClass::Finite).unwrap();
        let l = upper_lower_spectrum(&q, SpectrumKind::Lower, AlphaClass::Finite).unwrap();
        for v in [f, u, l] {
            assert_eq!(v.dimension, Dimension::Value(1.0 / 3.0));
        }
    }

    #[test]
    fn empty_level_set_distinct_from_zero() {
        let mut q = factorial_block_query();
        q.equiv_increasing = false;
        let v = fast_spectrum(&q, AlphaClass::Finite).unwrap();
        assert_eq!(v.dimension, Dimension::EmptyLevelSet);
        assert_eq!(v.dimension.value(), None);
        // alpha = infinity does not consult the equivalence flag.
        let v = fast_spectrum(&q, AlphaClass::Infinite).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.2));
    }

    #[test]
    fn infinite_invariants_give_dimension_zero() {
        let q = SpectrumQuery::new(2.0, f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let v = fast_spectrum(&q, AlphaClass::Finite).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.0));
        let v = upper_lower_spectrum(&q, SpectrumKind::Lower, AlphaClass::Infinite).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.0));
    }

    #[test]
    fn refuses_sublinear_psi() {
        let mut q = factorial_block_query();
        q.superlinear = false;
        assert!(matches!(
            fast_spectrum(&q, AlphaClass::Finite),
            Err(SpectraError::NotSuperlinear)
        ));
    }

    #[test]
    fn lyapunov_at_infinity_values() {
        assert_eq!(
            lyapunov_at_infinity(2.0).unwrap().dimension,
            Dimension::Value(0.5)
        );
        let gamma = 3f64.ln() / 2f64.ln();
        let v = lyapunov_at_infinity(gamma).unwrap().dimension.value().unwrap();
        assert!((v - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!(lyapunov_at_infinity(1.0).is_err());
    }

    #[test]
    fn auxiliary_formulas() {
        // D-set with gamma = 2, c = 3: 1/4.
        let v = auxiliary_dimensions(2.0, AuxiliaryKind::DoubleExponential { c: 3.0 }).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.25));
        // Gamma bound at beta = 1 equals the Lambda_infinity value 1/gamma.
        let bound = auxiliary_dimensions(2.0, AuxiliaryKind::GammaInfinityBound { beta: 1.0 })
            .unwrap();
        let lam = auxiliary_dimensions(2.0, AuxiliaryKind::UnboundedAverages).unwrap();
        assert_eq!(bound.dimension, lam.dimension);
        // Growth-rate set with xi = 0: 1/gamma.
        let v = auxiliary_dimensions(2.0, AuxiliaryKind::GrowthRate { xi: 0.0 }).unwrap();
        assert_eq!(v.dimension, Dimension::Value(0.5));
        assert!(auxiliary_dimensions(2.0, AuxiliaryKind::DoubleExponential { c: 0.9 }).is_err());
    }

    #[test]
    fn plateau_monotone_in_invariant() {
        // Larger beta (or B) never increases the dimension; the consistency
        // chain upper >= fast(infinity) >= lower holds whenever b <= B <= beta.
        let gammas = [1.5, 2.0, 3.0];
        let grid = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0, f64::INFINITY];
        for &gamma in &gammas {
            for w in grid.windows(2) {
                assert!(plateau(gamma, w[0]) >= plateau(gamma, w[1]));
            }
            for &b in &grid {
                for &cap in grid.iter().filter(|&&v| v >= b) {
                    for &beta in grid.iter().filter(|&&v| v >= cap) {
                        let q = SpectrumQuery::new(gamma, beta, cap, b);
                        let upper = upper_lower_spectrum(&q, SpectrumKind::Upper, AlphaClass::Finite)
                            .unwrap()
                            .dimension
                            .value()
                            .unwrap();
                        let fast_inf = fast_spectrum(&q, AlphaClass::Infinite)
                            .unwrap()
                            .dimension
                            .value()
                            .unwrap();
                        let lower = upper_lower_spectrum(&q, SpectrumKind::Lower, AlphaClass::Finite)
                            .unwrap()
                            .dimension
                            .value()
                            .unwrap();
                        assert!(upper >= fast_inf && fast_inf >= lower);
                        // All positive-alpha outputs lie in (0, 1/gamma].
                        for v in [upper, fast_inf, lower] {
                            assert!(v <= 1.0 / gamma + 1e-15);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn continuity_predicate_formula_level() {
        assert!(continuous_at_infinity(2.0, 2.0, 1e-9));
        assert!(!continuous_at_infinity(5.0, 4.0, 1e-9));
        assert!(continuous_at_infinity(f64::INFINITY, f64::INFINITY, 1e-9));
    }

    #[test]
    fn growth_rate_wired_from_xi_estimate() {
        // phi(n) = n: the xi estimator feeds the growth-rate formula, which
        // lands at 1/gamma = 1/2 within the estimator's resolution.
        let phi = crate::scaling::ScalingFunction::power(1.0);
        let xi = crate::scaling::xi(&phi, 1000, 250).unwrap();
        let v = auxiliary_dimensions(2.0, AuxiliaryKind::GrowthRate { xi })
            .unwrap()
            .dimension
            .value()
            .unwrap();
        assert!((v - 0.5).abs() < 1e-2, "{v}");
        // phi(n) = 2^n: xi -> 1, dimension 1/(gamma + (gamma-1)) = 1/3.
        let phi = crate::scaling::ScalingFunction::exponential(2.0);
        let xi = crate::scaling::xi(&phi, 200, 50).unwrap();
        let v = auxiliary_dimensions(2.0, AuxiliaryKind::GrowthRate { xi })
            .unwrap()
            .dimension
            .value()
            .unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-2, "{v}");
    }
}

//! Computational toolkit for Markov-Renyi interval maps.
//!
//! A Markov-Renyi map is a piecewise differentiable map of `[0,1]` with
//! countably many full branches on adjacent open intervals, whose derivative
//! on branch `n` is comparable to `n^gamma`, possibly with one parabolic
//! fixed point. The crate provides:
//!
//! * exact evaluation and symbolic coding of orbits ([`maps`], [`coding`]),
//! * cylinder intervals with exact rational endpoints and two-sided
//!   diameter bounds ([`coding`]),
//! * Lyapunov and fast-Lyapunov exponent traces in log domain ([`exponents`]),
//! * scaling-function invariants and the closed-form fast Lyapunov spectrum
//!   values they determine ([`scaling`], [`spectra`]),
//! * explicit digit-sequence and minorant constructions ([`construct`]),
//! * basic-interval enumeration and covering-based dimension estimators
//!   ([`dimension`]).
//!
//! Quantities that can overflow fixed-size arithmetic (digit products,
//! scaling values like `2^(2^n)`) live in natural-log domain; everything that
//! can be kept exact (orbits, cylinder endpoints, gaps) uses big rationals.

pub mod coding;
pub mod construct;
pub mod dimension;
pub mod exponents;
pub mod maps;
pub mod rational;
pub mod scaling;
pub mod spectra;
pub mod sum;

pub use rational::Rat;

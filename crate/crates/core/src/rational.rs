//! Exact rational arithmetic helpers shared across the crate.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The exact scalar used for orbits, endpoints, gaps and diameters.
pub type Rat = BigRational;

/// Shorthand for a small rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or a plain integer string into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator in {text:?}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator in {text:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rat::new(num, den))
}

/// Formats a rational as `"p/q"` (or `"p"` when the denominator is one).
pub fn format_rat(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rat) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Natural log of a positive rational, computed without materializing the
/// quotient (safe for numerators and denominators far beyond `f64` range).
pub fn ln_rat(value: &Rat) -> f64 {
    debug_assert!(value.is_positive());
    ln_biguint(value.numer().magnitude()) - ln_biguint(value.denom().magnitude())
}

/// Natural log of a positive big integer.
pub fn ln_biguint(value: &BigUint) -> f64 {
    debug_assert!(!value.is_zero());
    let bits = value.bits();
    if bits <= 63 {
        return (value.to_u64().unwrap() as f64).ln();
    }
    // Keep the top 64 bits as mantissa and account for the shift.
    let shift = bits - 64;
    let top = (value >> shift).to_u64().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Converts a finite `f64` to the exact rational it denotes.
pub fn rat_from_f64(value: f64) -> Option<Rat> {
    Rat::from_float(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let x = parse_rat("5/13").unwrap();
        assert_eq!(format_rat(&x), "5/13");
        assert_eq!(parse_rat("7").unwrap(), rat(7, 1));
        assert!(parse_rat("1/0").is_err());
        assert_eq!(parse_rat("-3/6").unwrap(), rat(-1, 2));
    }

    #[test]
    fn ln_of_huge_rational() {
        // 2^1000 / 3^500: ln = 1000 ln2 - 500 ln3
        let num = BigInt::from(2u32).pow(1000);
        let den = BigInt::from(3u32).pow(500);
        let x = Rat::new(num, den);
        let expected = 1000.0 * std::f64::consts::LN_2 - 500.0 * 3f64.ln();
        assert!((ln_rat(&x) - expected).abs() < 1e-9 * expected.abs());
    }
}

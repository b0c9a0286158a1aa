//! Exact rational coefficients.
//!
//! Everything in this workspace is computed over arbitrary-precision
//! rationals; there is no floating point anywhere.

use num::BigRational;
use num_traits::{One, Signed, Zero};

/// The coefficient field: arbitrary-precision rationals.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Fraction `n/d` (`d` must be nonzero).
pub fn qr(n: i64, d: i64) -> Q {
    assert!(d != 0, "zero denominator");
    Q::new(n.into(), d.into())
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Q {
    let mut acc = Q::one();
    for k in 2..=n as i64 {
        acc *= q(k);
    }
    acc
}

/// `(-1)^n`.
pub fn neg_one_pow(n: u32) -> Q {
    if n % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Renders a rational as `p/q` with an explicit denominator (`3` → `3/1`),
/// the form used in all machine-readable output.
pub fn format_frac(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_frac(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: num::BigInt = n
        .trim()
        .parse()
        .map_err(|e| format!("bad numerator {n:?}: {e}"))?;
    let d: num::BigInt = d
        .trim()
        .parse()
        .map_err(|e| format!("bad denominator {d:?}: {e}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

/// True when `x` is an integer.
pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Exact conversion to `i64` (panics when the value does not fit; used for
/// linking numbers and framings, which are small by construction).
pub fn to_i64(x: &Q) -> i64 {
    assert!(is_integer(x), "not an integer: {x}");
    let n = x.numer();
    let digits = n.to_signed_bytes_le();
    let _ = digits;
    let s = n.to_string();
    s.parse().expect("integer out of i64 range")
}

/// Absolute value.
pub fn abs(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_is_explicit() {
        assert_eq!(format_frac(&q(3)), "3/1");
        assert_eq!(format_frac(&qr(-2, 4)), "-1/2");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0/1", "-1/2", "7/3", "12/1"] {
            assert_eq!(format_frac(&parse_frac(s).unwrap()), s);
        }
        assert_eq!(parse_frac("5").unwrap(), q(5));
        assert!(parse_frac("1/0").is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), q(1));
        assert_eq!(factorial(4), q(24));
    }
}

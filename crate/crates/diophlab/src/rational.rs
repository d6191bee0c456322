//! Arbitrary-precision rational arithmetic.
//!
//! `Rational` is the sole numeric substrate for every exact quantity in this
//! crate: radii, measures, areas, counting ratios. It is backed by
//! [`num_rational::BigRational`], which keeps values reduced with a positive
//! denominator after every operation, so no rounding can ever occur inside
//! the type.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Rational = num_rational::BigRational;

/// Shorthand for `a/b` from machine integers. Panics if `b == 0`.
pub fn rat(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

pub fn rat_int(a: i64) -> Rational {
    Rational::from_integer(BigInt::from(a))
}

pub fn rat_u64(a: u64) -> Rational {
    Rational::from_integer(BigInt::from(a))
}

/// The dyadic rational `1 / 2^bits`.
pub fn ulp(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits)
}

/// Parses `"a/b"` or a bare integer `"a"`. The denominator must be nonzero.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::invalid(format!("malformed rational {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::invalid(format!("malformed rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::invalid(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Renders as `"num/den"` in lowest terms, always with an explicit denominator.
pub fn render_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `r` reduced modulo 1 into `[0, 1)`.
pub fn mod1(r: &Rational) -> Rational {
    let f = r.fract();
    if f.is_negative() {
        f + Rational::one()
    } else {
        f
    }
}

/// Distance to the nearest integer, `‖r‖ = min(frac, 1 - frac)`.
pub fn dist_to_integer(r: &Rational) -> Rational {
    let f = mod1(r);
    let c = Rational::one() - &f;
    if f <= c {
        f
    } else {
        c
    }
}

/// Exact integer power with a signed exponent. Panics on `0^negative`.
pub fn pow_i32(r: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow::Pow::pow(r.clone(), e as u64)
    } else {
        assert!(!r.is_zero(), "zero base with negative exponent");
        num_traits::pow::Pow::pow(r.clone(), (-(e as i64)) as u64)
            .recip()
    }
}

/// True if `r` is an integer multiple of `1/2^bits` (used by tests).
pub fn is_dyadic(r: &Rational, bits: u32) -> bool {
    let d = r.denom();
    let pow: BigInt = BigInt::one() << bits;
    pow.is_multiple_of(d)
}

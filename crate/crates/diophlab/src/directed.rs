//! Directed-rounded enclosures for the handful of irrational quantities the
//! experiments touch: logarithms, rational powers of rationals, and π².
//!
//! Every function here returns a pair of exact rationals `[lo, hi]` that
//! provably bracket the true value, with the gap controlled by a precision
//! argument in bits. The enclosure endpoints are ordinary `Rational`s, so all
//! downstream set constructions and comparisons stay exact; the only
//! approximation in the whole crate is the width of these brackets.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::rational::{ulp, Rational};

/// A closed interval `[lo, hi]` of rationals known to contain a real value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    /// Degenerate enclosure of an exactly-known value.
    pub fn point(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    /// Product of two enclosures of nonnegative values.
    pub fn mul_nonneg(&self, other: &Enclosure) -> Enclosure {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Enclosure::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    /// Reciprocal of an enclosure of a strictly positive value.
    pub fn recip_pos(&self) -> Enclosure {
        assert!(self.lo.is_positive(), "reciprocal of non-positive enclosure");
        Enclosure::new(self.hi.clone().recip(), self.lo.clone().recip())
    }

    pub fn scale(&self, c: &Rational) -> Enclosure {
        if c.is_negative() {
            Enclosure::new(&self.hi * c, &self.lo * c)
        } else {
            Enclosure::new(&self.lo * c, &self.hi * c)
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure::new(-self.hi.clone(), -self.lo.clone())
    }

    /// Quotient by an enclosure of a strictly positive value.
    pub fn div_pos(&self, other: &Enclosure) -> Enclosure {
        debug_assert!(!self.lo.is_negative());
        self.mul_nonneg(&other.recip_pos())
    }

    /// Widens the endpoints outward onto the grid of multiples of `2^-bits`,
    /// bounding the denominators that downstream arithmetic has to carry.
    pub fn compress(&self, bits: u32) -> Enclosure {
        Enclosure::new(floor_dyadic(&self.lo, bits), ceil_dyadic(&self.hi, bits))
    }
}

/// Largest multiple of `2^-bits` that is `<= r`.
pub fn floor_dyadic(r: &Rational, bits: u32) -> Rational {
    let scaled = (r.numer() << bits).div_floor(r.denom());
    Rational::new(scaled, BigInt::one() << bits)
}

/// Smallest multiple of `2^-bits` that is `>= r`.
pub fn ceil_dyadic(r: &Rational, bits: u32) -> Rational {
    let scaled = (r.numer() << bits).div_ceil(r.denom());
    Rational::new(scaled, BigInt::one() << bits)
}

/// An exactly-representable value or a directed-rounded bracket around an
/// irrational one. Carried through reports so rounding directions stay
/// visible at the output boundary.
#[derive(Clone, Debug)]
pub enum Evaluation {
    Exact(Rational),
    Directed(Enclosure),
}

impl Evaluation {
    pub fn lower(&self) -> &Rational {
        match self {
            Evaluation::Exact(v) => v,
            Evaluation::Directed(e) => &e.lo,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            Evaluation::Exact(v) => v,
            Evaluation::Directed(e) => &e.hi,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Evaluation::Exact(_))
    }

    pub fn rounding_label(&self) -> &'static str {
        match self {
            Evaluation::Exact(_) => "exact",
            Evaluation::Directed(_) => "directed",
        }
    }
}

// ---------------------------------------------------------------------
// Fixed-point series kernels.
//
// The elementary series run on BigInt mantissas at scale 2^P with floor
// rounding and a conservative cumulative error bound in ulps; P carries 16
// guard bits beyond the requested precision, dwarfing the bound. Rational
// arithmetic would grind on gcd reductions of power-of-two denominators.
// ---------------------------------------------------------------------

const GUARD_BITS: u32 = 16;

fn mant_floor(r: &Rational, p: u32) -> BigInt {
    (r.numer() << p).div_floor(r.denom())
}

fn mant_to_rational(m: BigInt, p: u32) -> Rational {
    Rational::new(m, BigInt::one() << p)
}

fn mant_mul_floor(a: &BigInt, b: &BigInt, p: u32) -> BigInt {
    (a * b).div_floor(&(BigInt::one() << p))
}

/// `atanh(z) = Σ z^{2j+1}/(2j+1)` for rational `0 <= z <= 1/2`, evaluated in
/// fixed point. Per-step floor rounding and the geometric tail are absorbed
/// into a symmetric ulp bound.
fn atanh_enclosure(z: &Rational, prec: u32) -> Enclosure {
    debug_assert!(!z.is_negative() && *z <= Rational::new(BigInt::one(), BigInt::from(2)));
    if z.is_zero() {
        return Enclosure::point(Rational::zero());
    }
    let p = prec + GUARD_BITS;
    let zm = mant_floor(z, p);
    let z2m = mant_mul_floor(&zm, &zm, p);
    let mut term = zm; // z^{2j+1} mantissa
    let mut sum = BigInt::zero();
    let mut j: u64 = 0;
    let small = BigInt::from(64);
    loop {
        sum += term.div_floor(&BigInt::from(2 * j + 1));
        term = mant_mul_floor(&term, &z2m, p);
        j += 1;
        if term <= small || j > 4000 {
            break;
        }
    }
    // per-step errors <= 2 ulps propagate sublinearly since z^2 <= 1/4; the
    // quadratic bound is far inside the guard bits
    let err = BigInt::from((j + 1) * (2 * j + 3) + 512);
    Enclosure::new(
        mant_to_rational(&sum - &err, p),
        mant_to_rational(sum + err, p),
    )
    .compress(prec + 2)
}

const CACHE_BITS: u32 = 320;

fn ln2_raw(prec: u32) -> Enclosure {
    // ln 2 = 2 atanh(1/3)
    atanh_enclosure(&Rational::new(BigInt::one(), BigInt::from(3)), prec + 2)
        .scale(&Rational::from_integer(BigInt::from(2)))
}

static LN2: Lazy<Enclosure> = Lazy::new(|| ln2_raw(CACHE_BITS));
static LN10: Lazy<Enclosure> =
    Lazy::new(|| ln_enclosure_impl(&Rational::from_integer(BigInt::from(10)), CACHE_BITS));

fn ln2(prec: u32) -> Enclosure {
    if prec <= CACHE_BITS - 8 {
        LN2.compress(prec + 4)
    } else {
        ln2_raw(prec)
    }
}

fn ln_enclosure_impl(x: &Rational, prec: u32) -> Enclosure {
    debug_assert!(x.is_positive());
    if x.is_one() {
        return Enclosure::point(Rational::zero());
    }
    // Reduce to t in [3/4, 3/2) so that z = (t-1)/(t+1) lies in [-1/7, 1/5].
    let mut t = x.clone();
    let mut k: i64 = 0;
    let three_halves = Rational::new(BigInt::from(3), BigInt::from(2));
    let three_quarters = Rational::new(BigInt::from(3), BigInt::from(4));
    let two = Rational::from_integer(BigInt::from(2));
    while t >= three_halves {
        t /= &two;
        k += 1;
    }
    while t < three_quarters {
        t *= &two;
        k -= 1;
    }
    let z = (&t - Rational::one()) / (&t + Rational::one());
    let a = atanh_enclosure(&z.abs(), prec + 4).scale(&two);
    let ln_t = if z.is_negative() { a.neg() } else { a };
    let k_ln2 = ln2(prec + 4).scale(&Rational::from_integer(BigInt::from(k)));
    ln_t.add(&k_ln2).compress(prec)
}

/// Natural logarithm of a positive rational; gap at most `2^-prec` up to a
/// couple of compression ulps.
pub fn ln_enclosure(x: &Rational, prec: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::invalid("logarithm of a non-positive value"));
    }
    Ok(ln_enclosure_impl(x, prec))
}

/// Base-10 logarithm: `log10 x = ln x / ln 10`.
///
/// The formulas in this crate that contain a bare `log` (the log-refined
/// approximation function and the ubiquity radius) all evaluate it base 10.
pub fn log10_enclosure(x: &Rational, prec: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::invalid("logarithm of a non-positive value"));
    }
    if x.is_one() {
        return Ok(Enclosure::point(Rational::zero()));
    }
    // Exact when x is an integer power of ten.
    if let Some(e) = power_of_ten_exponent(x) {
        return Ok(Enclosure::point(Rational::from_integer(BigInt::from(e))));
    }
    let ln10 = if prec + 8 <= CACHE_BITS - 8 {
        LN10.compress(prec + 8)
    } else {
        ln_enclosure_impl(&Rational::from_integer(BigInt::from(10)), prec + 8)
    };
    let lnx = ln_enclosure_impl(x, prec + 8);
    let e = if lnx.lo.is_negative() {
        // x < 1: ln x < 0, divide by the positive ln 10 with directions flipped.
        lnx.neg().div_pos(&ln10).neg()
    } else {
        lnx.div_pos(&ln10)
    };
    Ok(e.compress(prec))
}

fn power_of_ten_exponent(x: &Rational) -> Option<i64> {
    let ten = BigInt::from(10);
    if x.denom().is_one() {
        let mut n = x.numer().clone();
        let mut e = 0i64;
        while (&n % &ten).is_zero() && n > BigInt::one() {
            n /= &ten;
            e += 1;
        }
        (n.is_one()).then_some(e)
    } else if x.numer().is_one() {
        power_of_ten_exponent(&x.clone().recip()).map(|e| -e)
    } else {
        None
    }
}

/// `base^exp` for positive rational `base` and rational `exp`, via integer
/// `w`-th roots where `exp = u/w` in lowest terms. Exact (degenerate
/// enclosure) whenever the result is rational.
pub fn pow_enclosure(base: &Rational, exp: &Rational, prec: u32) -> Result<Enclosure> {
    if !base.is_positive() {
        return Err(Error::invalid("power of a non-positive base"));
    }
    if exp.is_zero() || base.is_one() {
        return Ok(Enclosure::point(Rational::one()));
    }
    if exp.is_negative() {
        let pos = pow_enclosure(base, &-exp.clone(), prec + 4)?;
        return Ok(if pos.is_point() {
            Enclosure::point(pos.lo.recip())
        } else {
            pos.recip_pos().compress(prec)
        });
    }
    let u = exp
        .numer()
        .to_u64()
        .ok_or_else(|| Error::unsupported("exponent numerator too large"))?;
    let w = exp
        .denom()
        .to_u32()
        .ok_or_else(|| Error::unsupported("exponent denominator too large"))?;
    let n = base.numer().to_biguint().unwrap().pow(u as u32);
    let d = base.denom().to_biguint().unwrap().pow(u as u32);
    if w == 1 {
        return Ok(Enclosure::point(Rational::new(n.into(), d.into())));
    }
    // value^w = n/d; exact if both are perfect w-th powers.
    let rn = n.nth_root(w);
    let rd = d.nth_root(w);
    if rn.pow(w) == n && rd.pow(w) == d {
        return Ok(Enclosure::point(Rational::new(rn.into(), rd.into())));
    }
    // 2^prec * value = (n * 2^(w*prec) / d)^(1/w); floor/ceil the inner
    // quotient, then floor nth roots bracket the value.
    let shifted = &n << (w as u64 * prec as u64);
    let lo_int = (&shifted / &d).nth_root(w);
    let hi_q = (&shifted + &d - BigUint::one()) / &d;
    let hi_root = hi_q.nth_root(w);
    let hi_int = if hi_root.pow(w) >= hi_q {
        hi_root
    } else {
        hi_root + BigUint::one()
    };
    let denom: BigInt = BigInt::one() << prec;
    Ok(Enclosure::new(
        Rational::new(lo_int.into(), denom.clone()),
        Rational::new(hi_int.into(), denom),
    ))
}

/// `exp(y)` for rational `y` by argument reduction `y = k ln 2 + r` with
/// `|r| <= 2/3`, followed by the fixed-point Taylor series.
fn exp_rational(y: &Rational, prec: u32) -> Enclosure {
    // Pick k from a float estimate and subtract k ln 2 as an interval; the
    // error bound absorbs the inexactness of ln 2.
    let approx = y.to_f64().unwrap_or(0.0);
    let k = (approx / std::f64::consts::LN_2).round() as i64;
    let ln2 = ln2(prec + GUARD_BITS);
    let r = Enclosure::point(y.clone())
        .sub(&ln2.scale(&Rational::from_integer(BigInt::from(k))))
        .compress(prec + GUARD_BITS - 2);
    // the series tail bound assumes the reduced argument stays below 7/10
    assert!(
        r.lo >= Rational::new(BigInt::from(-7), BigInt::from(10))
            && r.hi <= Rational::new(BigInt::from(7), BigInt::from(10)),
        "argument reduction out of range"
    );
    let (sum, err) = exp_reduced(&r.lo, prec);
    let p = prec + GUARD_BITS;
    // exp' <= 2 on the reduced range, so the interval width of r (a few
    // ulps after compression) folds into the additive bound
    let err = err + BigInt::from(16);
    let lo = mant_to_rational(&sum - &err, p);
    let hi = mant_to_rational(sum + err, p);
    let scaled = |v: Rational| -> Rational {
        if k >= 0 {
            v * Rational::from_integer(BigInt::one() << k as u64)
        } else {
            v / Rational::from_integer(BigInt::one() << (-k) as u64)
        }
    };
    Enclosure::new(scaled(lo), scaled(hi)).compress(prec)
}

/// Fixed-point Taylor series of `exp(r)` for `|r| <= 7/10`: returns the sum
/// mantissa at scale `2^(prec+GUARD_BITS)` and an error bound in ulps.
fn exp_reduced(r: &Rational, prec: u32) -> (BigInt, BigInt) {
    let p = prec + GUARD_BITS;
    let rm = mant_floor(r, p);
    let one = BigInt::one() << p;
    let mut term = one.clone();
    let mut sum = one;
    let mut i: u64 = 1;
    let small = BigInt::from(64);
    loop {
        term = mant_mul_floor(&term, &rm, p).div_floor(&BigInt::from(i));
        sum += &term;
        i += 1;
        if term.magnitude() <= small.magnitude() || i > 4000 {
            break;
        }
    }
    // per-step error <= 2 ulps shrinks with |r| < 1; the tail is bounded by
    // 3 |t_last|  (geometric with ratio <= 2/3) plus the cutoff
    let err = BigInt::from((i + 1) * (2 * i + 3) + 1024);
    (sum, err)
}

/// `exp` over an enclosure; monotone, so endpoints map to endpoints.
pub fn exp_enclosure(y: &Enclosure, prec: u32) -> Enclosure {
    let lo = exp_rational(&y.lo, prec + 4);
    let hi = exp_rational(&y.hi, prec + 4);
    Enclosure::new(lo.lo, hi.hi).compress(prec)
}

/// `base^exponent` as `exp(exponent * ln base)`, for a cached `ln base`
/// enclosure. Suits exponents with large denominators (dyadic bisection
/// points), where integer-root extraction would be impractical.
pub fn pow_via_exp(ln_base: &Enclosure, exponent: &Rational, prec: u32) -> Enclosure {
    exp_enclosure(&ln_base.scale(exponent).compress(prec + 16), prec)
}

/// `atan(1/x)` for integer `x >= 2` by the alternating Gregory series; the
/// truncation error is bounded by the first omitted term.
fn atan_inv_enclosure(x: u64, prec: u32) -> Enclosure {
    let cutoff = ulp(prec + 6);
    let inv = Rational::new(BigInt::one(), BigInt::from(x));
    let inv2 = &inv * &inv;
    let mut power = inv;
    let mut sum = Rational::zero();
    let mut j = 0u32;
    loop {
        let term = &power / Rational::from_integer(BigInt::from(2 * j + 1));
        if j.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        power *= &inv2;
        j += 1;
        let next = &power / Rational::from_integer(BigInt::from(2 * j + 1));
        if next <= cutoff {
            return Enclosure::new(&sum - &next, sum + next).compress(prec + 2);
        }
    }
}

fn pi_enclosure(prec: u32) -> Enclosure {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239).
    let a = atan_inv_enclosure(5, prec + 8).scale(&Rational::from_integer(BigInt::from(16)));
    let b = atan_inv_enclosure(239, prec + 8).scale(&Rational::from_integer(BigInt::from(4)));
    a.sub(&b).compress(prec + 2)
}

static PI_SQUARED: Lazy<Enclosure> = Lazy::new(|| {
    let pi = pi_enclosure(CACHE_BITS + 8);
    pi.mul_nonneg(&pi).compress(CACHE_BITS)
});

/// Enclosure of π² with gap at most `2^-prec` (up to compression ulps).
pub fn pi_squared_enclosure(prec: u32) -> Enclosure {
    if prec <= CACHE_BITS - 8 {
        PI_SQUARED.compress(prec)
    } else {
        let pi = pi_enclosure(prec + 8);
        pi.mul_nonneg(&pi).compress(prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_rational, rat, rat_int};

    /// Parses a decimal literal into an exact rational (digits only, one dot).
    fn dec(s: &str) -> Rational {
        let (int, frac) = s.split_once('.').unwrap();
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let n: BigInt = format!("{int}{frac}").parse().unwrap();
        Rational::new(n, scale)
    }

    /// The enclosure overlaps the reference value up to the reference's own
    /// truncation error; with the width assertions alongside, this pins the
    /// enclosure to the published digits in both directions.
    fn agrees(e: &Enclosure, reference: &Rational, ref_digits: u32) {
        let slack = Rational::new(BigInt::from(10), BigInt::from(10).pow(ref_digits));
        assert!(e.lo <= reference + &slack, "lo above reference");
        assert!(reference - &slack <= e.hi, "hi below reference");
    }

    // Reference digits (Abramowitz & Stegun / OEIS A002162, A002392, A002388).
    const LN2_50: &str = "0.69314718055994530941723212145817656807550013436025";
    const LN10_50: &str = "2.30258509299404568401799145468436420760110148862877";
    const PI2_50: &str = "9.86960440108935861883449099987615113531369940724079";

    #[test]
    fn ln_matches_reference_digits() {
        let e = ln_enclosure(&rat_int(2), 160).unwrap();
        agrees(&e, &dec(LN2_50), 50);
        assert!(e.width() <= ulp(150));

        let e = ln_enclosure(&rat_int(10), 160).unwrap();
        agrees(&e, &dec(LN10_50), 50);
        assert!(e.width() <= ulp(150));
    }

    #[test]
    fn ln_of_fractions_and_reciprocals() {
        // ln(1/x) = -ln(x)
        let a = ln_enclosure(&rat(3, 7), 128).unwrap();
        let b = ln_enclosure(&rat(7, 3), 128).unwrap();
        assert!((a.lo.clone() + &b.hi).abs() <= ulp(120));
        assert!(ln_enclosure(&rat_int(1), 64).unwrap().is_point());
        assert!(ln_enclosure(&rat_int(0), 64).is_err());
        assert!(ln_enclosure(&rat(-1, 2), 64).is_err());
    }

    #[test]
    fn log10_exact_on_powers_of_ten() {
        assert_eq!(
            log10_enclosure(&rat_int(100), 64).unwrap(),
            Enclosure::point(rat_int(2))
        );
        assert_eq!(
            log10_enclosure(&rat(1, 1000), 64).unwrap(),
            Enclosure::point(rat_int(-3))
        );
        let e = log10_enclosure(&rat_int(2), 128).unwrap();
        // log10(2) = 0.30102999566398119521...
        agrees(&e, &dec("0.301029995663981195213738894724493026768189881462108"), 51);
        assert!(e.width() <= ulp(120));
    }

    #[test]
    fn pow_exact_cases() {
        let e = pow_enclosure(&rat_int(5), &rat_int(-2), 96).unwrap();
        assert_eq!(e, Enclosure::point(rat(1, 25)));
        let e = pow_enclosure(&rat_int(4), &rat(1, 2), 96).unwrap();
        assert_eq!(e, Enclosure::point(rat_int(2)));
        let e = pow_enclosure(&rat(27, 8), &rat(2, 3), 96).unwrap();
        assert_eq!(e, Enclosure::point(rat(9, 4)));
    }

    #[test]
    fn pow_directed_brackets_truth() {
        // sqrt(2) = 1.41421356237309504880...
        let e = pow_enclosure(&rat_int(2), &rat(1, 2), 128).unwrap();
        agrees(&e, &dec("1.41421356237309504880168872420969807856967187537694"), 50);
        assert!(e.width() <= ulp(126));
        // 10^(-3/2) monotone consistency with the square of the value
        let e = pow_enclosure(&rat_int(10), &rat(-3, 2), 96).unwrap();
        let sq_lo = &e.lo * &e.lo;
        let sq_hi = &e.hi * &e.hi;
        assert!(sq_lo <= rat(1, 1000) && rat(1, 1000) <= sq_hi);
    }

    #[test]
    fn pi_squared_reference() {
        let e = pi_squared_enclosure(200);
        agrees(&e, &dec(PI2_50), 50);
        assert!(e.width() <= ulp(160));
    }

    #[test]
    fn exp_matches_reference_digits() {
        // e = 2.71828182845904523536028747135266249775724709369995...
        let e1 = exp_rational(&rat_int(1), 128);
        agrees(&e1, &dec("2.71828182845904523536028747135266249775724709369995"), 50);
        assert!(e1.width() <= ulp(120));
        // exp(0) = 1 with a tight bracket
        let e0 = exp_rational(&rat_int(0), 96);
        assert!(e0.contains(&rat_int(1)));
        assert!(e0.width() <= ulp(90));
        // exp(-5) = 0.00673794699908546709663604842314842424884231875953...
        let em5 = exp_rational(&rat_int(-5), 128);
        agrees(&em5, &dec("0.00673794699908546709663604842314842424884231875953"), 50);
    }

    #[test]
    fn pow_via_exp_agrees_with_root_powers() {
        // 7^(3/5) via exp/ln vs integer fifth roots
        let ln7 = ln_enclosure(&rat_int(7), 160).unwrap();
        let a = pow_via_exp(&ln7, &rat(3, 5), 96);
        let b = pow_enclosure(&rat_int(7), &rat(3, 5), 96).unwrap();
        assert!(a.lo <= b.hi && b.lo <= a.hi, "brackets must overlap");
        assert!(a.width() <= ulp(90));
        // a dyadic exponent with a large denominator, the regime the
        // bisection produces: 2^(-1365/2048)
        let ln2e = ln_enclosure(&rat_int(2), 160).unwrap();
        let c = pow_via_exp(&ln2e, &rat(-1365, 2048), 96);
        assert!(c.width() <= ulp(90));
        // monotone sanity: value in (0.6, 0.7)
        assert!(c.lo > rat(6, 10) && c.hi < rat(7, 10));
    }

    #[test]
    fn compression_is_outward() {
        let e = Enclosure::new(parse_rational("1/3").unwrap(), parse_rational("2/3").unwrap());
        let c = e.compress(16);
        assert!(c.lo <= e.lo && e.hi <= c.hi);
        assert!(c.width() - e.width() <= ulp(14));
    }
}

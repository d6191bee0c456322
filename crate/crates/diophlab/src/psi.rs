//! Approximation functions: the error laws ψ (and covering radii ρ̃) that
//! drive every experiment, as symbolic specs evaluable to exact rationals or
//! directed-rounded brackets.
//!
//! The `log` appearing in the log-refined and ubiquity kinds is evaluated
//! base 10.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::directed::{log10_enclosure, pow_enclosure, Enclosure, Evaluation};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, rat, Rational};

/// Requested rounding for a ψ evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    Exact,
    Lower,
    Upper,
}

/// Default precision (bits) for directed evaluations; the resulting bracket
/// gap stays below `2^-64` with a wide margin.
pub const PSI_PREC: u32 = 128;

#[derive(Clone, Debug, PartialEq)]
pub enum ApproximationFunction {
    /// `ψ(q) = q^{-v}`, `v > 0`.
    Power(Rational),
    /// `ψ(q) = c/q`, `c > 0` (Dirichlet's law at `c = 1`).
    ScaledReciprocal(Rational),
    /// `ψ(q) = 1/(q (log q)^{1+ε})` for `q >= 2`, with value `1/2` at `q = 1`;
    /// `ε >= 0`.
    LogRefined(Rational),
    /// The ubiquity radius `ρ̃(N) = 2 N^{-1-m/n} log N` for `N >= 2`, with the
    /// same `1/2` convention at `N = 1` where the formula degenerates to 0.
    Ubiquity { m: u32, n: u32 },
    /// Explicit `(q, value)` pairs, sorted by `q`; exact by definition.
    Table(Vec<(u64, Rational)>),
}

impl ApproximationFunction {
    pub fn power(v: Rational) -> Result<Self> {
        if !v.is_positive() {
            return Err(Error::invalid("power exponent must be positive"));
        }
        Ok(ApproximationFunction::Power(v))
    }

    pub fn scaled_reciprocal(c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::invalid("reciprocal scale must be positive"));
        }
        Ok(ApproximationFunction::ScaledReciprocal(c))
    }

    pub fn log_refined(eps: Rational) -> Result<Self> {
        if eps.is_negative() {
            return Err(Error::invalid("log refinement exponent must be >= 0"));
        }
        Ok(ApproximationFunction::LogRefined(eps))
    }

    pub fn ubiquity(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("ubiquity parameters must be positive"));
        }
        Ok(ApproximationFunction::Ubiquity { m, n })
    }

    pub fn table(mut pairs: Vec<(u64, Rational)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("table must have at least one entry"));
        }
        pairs.sort_by_key(|&(q, _)| q);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid("duplicate table entry"));
            }
        }
        if pairs.iter().any(|(q, v)| *q == 0 || !v.is_positive()) {
            return Err(Error::invalid("table entries need q >= 1 and positive values"));
        }
        Ok(ApproximationFunction::Table(pairs))
    }

    /// A table holding `value` at each of the given arguments.
    pub fn constant_table(value: Rational, qs: &[u64]) -> Result<Self> {
        let mut qs = qs.to_vec();
        qs.sort_unstable();
        qs.dedup();
        ApproximationFunction::table(qs.into_iter().map(|q| (q, value.clone())).collect())
    }

    /// The table realization of `ψ(q) = 1/(2√q)` for `q <= n_max`, with each
    /// entry rounded down onto the grid of multiples of `2^-62` (single-limb
    /// dyadics, so the table stays cheap at `n_max = 10^6`).
    pub fn inv_two_sqrt_table(n_max: u64) -> Result<Self> {
        const BITS: u32 = 62;
        let denom = BigInt::one() << BITS;
        let pairs = (1..=n_max)
            .map(|q| {
                // floor(2^62 / (2 sqrt(q))) = floor(sqrt(2^122 / q))
                let scaled: BigInt = (BigInt::one() << (2 * BITS - 2)) / q;
                let root = scaled.sqrt();
                (q, Rational::new(root, denom.clone()))
            })
            .collect();
        ApproximationFunction::table(pairs)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ApproximationFunction::Power(_) => "power",
            ApproximationFunction::ScaledReciprocal(_) => "scaled_reciprocal",
            ApproximationFunction::LogRefined(_) => "log_refined",
            ApproximationFunction::Ubiquity { .. } => "ubiquity",
            ApproximationFunction::Table(_) => "table",
        }
    }

    /// Canonical spec string, the inverse of [`parse_psi_spec`].
    pub fn spec_string(&self) -> String {
        match self {
            ApproximationFunction::Power(v) => format!("power:{}", v),
            ApproximationFunction::ScaledReciprocal(c) => format!("recip:{}", c),
            ApproximationFunction::LogRefined(e) => format!("logref:{}", e),
            ApproximationFunction::Ubiquity { m, n } => format!("ubiq:{m},{n}"),
            ApproximationFunction::Table(pairs) => {
                let body: Vec<String> =
                    pairs.iter().map(|(q, v)| format!("{q}={v}")).collect();
                format!("table:{}", body.join(","))
            }
        }
    }

    /// Evaluates to an exact rational or a directed bracket with gap at most
    /// `2^-prec` (up to a couple of compression ulps).
    pub fn enclosure(&self, q: u64, prec: u32) -> Result<Evaluation> {
        if q == 0 {
            return Err(Error::invalid("approximation functions take q >= 1"));
        }
        let qr = Rational::from_integer(BigInt::from(q));
        match self {
            ApproximationFunction::Power(v) => {
                let e = pow_enclosure(&qr, &-v.clone(), prec)?;
                Ok(collapse(e))
            }
            ApproximationFunction::ScaledReciprocal(c) => Ok(Evaluation::Exact(c / &qr)),
            ApproximationFunction::LogRefined(eps) => {
                if q == 1 {
                    return Ok(Evaluation::Exact(rat(1, 2)));
                }
                let lg = log10_enclosure(&qr, prec + 16)?;
                let lg_pow = enclosure_pow(&lg, &(Rational::one() + eps), prec + 8)?;
                let denom = lg_pow.scale(&qr);
                Ok(collapse(denom.recip_pos().compress(prec)))
            }
            ApproximationFunction::Ubiquity { m, n } => {
                if q == 1 {
                    return Ok(Evaluation::Exact(rat(1, 2)));
                }
                let exp = -(Rational::one() + rat(*m as i64, *n as i64));
                let power = pow_enclosure(&qr, &exp, prec + 16)?;
                let lg = log10_enclosure(&qr, prec + 16)?;
                let two = Rational::from_integer(BigInt::from(2));
                Ok(collapse(power.mul_nonneg(&lg).scale(&two).compress(prec)))
            }
            ApproximationFunction::Table(pairs) => {
                match pairs.binary_search_by_key(&q, |&(q, _)| q) {
                    Ok(i) => Ok(Evaluation::Exact(pairs[i].1.clone())),
                    Err(_) => Err(Error::invalid(format!("table has no entry for q = {q}"))),
                }
            }
        }
    }

    /// Single-sided evaluation per the requested rounding; `Exact` is
    /// rejected when the value is irrational.
    pub fn eval(&self, q: u64, rounding: Rounding) -> Result<Rational> {
        let ev = self.enclosure(q, PSI_PREC)?;
        match (rounding, ev) {
            (_, Evaluation::Exact(v)) => Ok(v),
            (Rounding::Lower, Evaluation::Directed(e)) => Ok(e.lo),
            (Rounding::Upper, Evaluation::Directed(e)) => Ok(e.hi),
            (Rounding::Exact, Evaluation::Directed(_)) => Err(Error::not_exact(format!(
                "{} value at q = {q} is irrational; request lower or upper rounding",
                self.kind_name()
            ))),
        }
    }
}

/// A point enclosure is an exact value.
fn collapse(e: Enclosure) -> Evaluation {
    if e.is_point() {
        Evaluation::Exact(e.lo)
    } else {
        Evaluation::Directed(e)
    }
}

/// `base^exp` where the base is itself an enclosure of a positive value and
/// the exponent is a positive rational; monotone, so endpoints map to
/// endpoints.
fn enclosure_pow(base: &Enclosure, exp: &Rational, prec: u32) -> Result<Enclosure> {
    debug_assert!(exp.is_positive());
    if exp.is_one() {
        return Ok(base.clone());
    }
    if !base.lo.is_positive() {
        return Err(Error::invalid("power of a non-positive enclosure"));
    }
    let lo = pow_enclosure(&base.lo, exp, prec)?;
    let hi = pow_enclosure(&base.hi, exp, prec)?;
    Ok(Enclosure::new(lo.lo, hi.hi))
}

/// Parses ψ spec strings: `power:3`, `power:1/2`, `recip:1/4`, `logref:0`,
/// `ubiq:1,1`, `table:1=1/2,2=1/3`.
pub fn parse_psi_spec(spec: &str) -> Result<ApproximationFunction> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("malformed psi spec {spec:?} (expected kind:args)")))?;
    match kind {
        "power" => ApproximationFunction::power(parse_rational(arg)?),
        "recip" => ApproximationFunction::scaled_reciprocal(parse_rational(arg)?),
        "logref" => ApproximationFunction::log_refined(parse_rational(arg)?),
        "ubiq" => {
            let (m, n) = arg
                .split_once(',')
                .ok_or_else(|| Error::invalid("ubiq spec needs m,n"))?;
            let m: u32 = m.trim().parse().map_err(|_| Error::invalid("bad ubiq m"))?;
            let n: u32 = n.trim().parse().map_err(|_| Error::invalid("bad ubiq n"))?;
            ApproximationFunction::ubiquity(m, n)
        }
        "table" => {
            let mut pairs = Vec::new();
            for part in arg.split(',') {
                let (q, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::invalid("table entries look like q=value"))?;
                let q: u64 = q.trim().parse().map_err(|_| Error::invalid("bad table q"))?;
                pairs.push((q, parse_rational(v)?));
            }
            ApproximationFunction::table(pairs)
        }
        _ => Err(Error::invalid(format!("unknown psi kind {kind:?}"))),
    }
}

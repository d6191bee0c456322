//! Hausdorff-dimension machinery: s-volumes of the natural covers of the
//! power-law limsup sets, a critical-exponent estimator driven by dyadic
//! block growth, a box-counting estimator over dyadic shell approximants,
//! and the closed-form dimension evaluators.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::directed::{
    ceil_dyadic, floor_dyadic, ln_enclosure, pow_via_exp, Enclosure, Evaluation,
};
use crate::error::{Error, Result};
use crate::rational::{pow_i32, rat, rat_u64, Rational};

/// Precision (bits) for the directed power evaluations inside the
/// estimators; rounding at this level is orders below the regression noise.
const DIM_PREC: u32 = 96;

/// The natural cover of the set `W_v` restricted to the shell
/// `Q₀ <= q <= Q₁`: per `q` it has `q + 1` intervals of length `2 q^{-v-1}`.
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub v: Rational,
    pub q0: u64,
    pub q1: u64,
}

impl CoverSpec {
    pub fn new(v: Rational, q0: u64, q1: u64) -> Result<Self> {
        if !v.is_positive() {
            return Err(Error::invalid("cover exponent v must be positive"));
        }
        if q0 == 0 || q1 < q0 {
            return Err(Error::invalid("cover shell range needs 1 <= Q0 <= Q1"));
        }
        Ok(CoverSpec { v, q0, q1 })
    }
}

/// `ℓ^s(C) = Σ_{q=Q₀}^{Q₁} (q+1) (2 q^{-v-1})^s`. Exact when `s` is a
/// positive integer and `(v+1)s` is an integer; otherwise a 96-bit directed
/// bracket.
pub fn s_volume(cover: &CoverSpec, s: &Rational) -> Result<Evaluation> {
    if !s.is_positive() {
        return Err(Error::invalid("s-volume requires s > 0"));
    }
    let vp1s = (&cover.v + Rational::one()) * s;
    if s.is_integer() && vp1s.is_integer() {
        let s_int = s.to_integer().to_i32().ok_or_else(|| Error::unsupported("s too large"))?;
        let e_int = vp1s.to_integer().to_i32().ok_or_else(|| Error::unsupported("exponent too large"))?;
        let two_pow = pow_i32(&rat(2, 1), s_int);
        let mut sum = Rational::zero();
        for q in cover.q0..=cover.q1 {
            sum += rat_u64(q + 1) * &two_pow * pow_i32(&rat_u64(q), -e_int);
        }
        return Ok(Evaluation::Exact(sum));
    }
    let ln2 = ln_enclosure(&rat(2, 1), DIM_PREC + 32)?;
    let two_pow_s = pow_via_exp(&ln2, s, DIM_PREC + 8);
    let terms: Vec<Enclosure> = (cover.q0..=cover.q1)
        .into_par_iter()
        .map(|q| {
            let lnq = ln_enclosure(&rat_u64(q), DIM_PREC + 32).expect("q >= 1");
            let qpow = pow_via_exp(&lnq, &-vp1s.clone(), DIM_PREC + 8);
            qpow.mul_nonneg(&two_pow_s).scale(&rat_u64(q + 1))
        })
        .collect();
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for t in terms {
        lo += floor_dyadic(&t.lo, DIM_PREC);
        hi += ceil_dyadic(&t.hi, DIM_PREC);
    }
    Ok(Evaluation::Directed(Enclosure::new(lo, hi)))
}

/// Estimates the critical exponent `s*` of the natural cover by bisecting on
/// the dyadic-block growth rate: over blocks `[2^j, 2^{j+1})` the s-volume
/// grows like `2^{(2 - s(v+1)) j}`, so the least-squares slope of
/// `log₂ V_j` against `j` crosses zero at `s* = 2/(v+1)`.
pub fn critical_exponent_estimate(v: &Rational, qmax: u64) -> Result<f64> {
    if *v < Rational::one() {
        return Err(Error::invalid("critical exponent estimation needs v >= 1"));
    }
    if qmax < 256 {
        return Err(Error::invalid("Qmax must be at least 2^8"));
    }
    let jmax = qmax.ilog2();
    let blocks: Vec<(u64, u64)> = (3..jmax).map(|j| (1u64 << j, (1u64 << (j + 1)) - 1)).collect();
    if blocks.len() < 4 {
        return Err(Error::invalid("Qmax too small to fit the block regression"));
    }
    // ln q is reused across every bisection step.
    let lns: Vec<Enclosure> = (0..=(1u64 << jmax))
        .into_par_iter()
        .map(|q| {
            if q == 0 {
                Enclosure::point(Rational::zero())
            } else {
                ln_enclosure(&rat_u64(q), DIM_PREC + 32).expect("positive")
            }
        })
        .collect();
    let vp1 = v + Rational::one();

    let slope = |s: &Rational| -> f64 {
        let exponent = -(&vp1 * s);
        let ln2 = &lns[2];
        let two_pow_s = pow_via_exp(ln2, s, DIM_PREC + 8);
        let ys: Vec<f64> = blocks
            .iter()
            .map(|&(q0, q1)| {
                let terms: Vec<Enclosure> = (q0..=q1)
                    .into_par_iter()
                    .map(|q| {
                        pow_via_exp(&lns[q as usize], &exponent, DIM_PREC + 8)
                            .mul_nonneg(&two_pow_s)
                            .scale(&rat_u64(q + 1))
                    })
                    .collect();
                let mut lo = Rational::zero();
                let mut hi = Rational::zero();
                for t in terms {
                    lo += floor_dyadic(&t.lo, DIM_PREC);
                    hi += ceil_dyadic(&t.hi, DIM_PREC);
                }
                let mid = (lo + hi) / rat(2, 1);
                mid.to_f64().expect("block volume in f64 range").log2()
            })
            .collect();
        least_squares_slope(
            &blocks.iter().enumerate().map(|(i, _)| i as f64).collect::<Vec<_>>(),
            &ys,
        )
    };

    // The slope is strictly decreasing in s; bracket and bisect to width 1e-3.
    let mut lo = rat(1, 64);
    let mut hi = rat(2, 1);
    if slope(&lo) <= 0.0 || slope(&hi) >= 0.0 {
        return Err(Error::unsupported("block growth does not bracket a critical exponent"));
    }
    let width_target = rat(1, 1000);
    while (&hi - &lo) > width_target {
        let mid = (&lo + &hi) / rat(2, 1);
        if slope(&mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((&lo + &hi) / rat(2, 1)).to_f64().unwrap())
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Exact fraction with 128-bit components; comparisons go through full
/// 256-bit cross products, so no rounding ever occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Frac128 {
    num: u128,
    den: u128,
}

impl Frac128 {
    fn cmp_frac(a: &Frac128, b: &Frac128) -> std::cmp::Ordering {
        mul_256(a.num, b.den).cmp(&mul_256(b.num, a.den))
    }
}

/// Full 128x128 -> 256-bit product as (high, low) limbs.
fn mul_256(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1u128 << 64) - 1;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let low = (mid << 64) | (ll & MASK);
    let high = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (high, low)
}

/// `floor(num * 2^shift / den)` without overflow, processing the shift in
/// chunks that keep the remainder below 128 bits.
fn floor_shift_div(num: u128, mut shift: u32, den: u128) -> u128 {
    let mut quot = num / den;
    let mut rem = num % den;
    while shift > 0 {
        let headroom = den.leading_zeros().max(1) - 1;
        let chunk = shift.min(headroom).max(1);
        quot <<= chunk;
        rem <<= chunk;
        quot += rem / den;
        rem %= den;
        shift -= chunk;
    }
    quot
}

fn ceil_shift_div(num: u128, shift: u32, den: u128) -> u128 {
    let f = floor_shift_div(num, shift, den);
    // exact iff den / gcd stuff divides; recompute remainder cheaply
    let back_rem = {
        // num * 2^shift mod den via the same chunking
        let mut rem = num % den;
        let mut s = shift;
        while s > 0 {
            let headroom = den.leading_zeros().max(1) - 1;
            let chunk = s.min(headroom).max(1);
            rem <<= chunk;
            rem %= den;
            s -= chunk;
        }
        rem
    };
    if back_rem == 0 {
        f
    } else {
        f + 1
    }
}

/// The dyadic-shell approximant `E_Q = ⋃_{Q/2 < q <= Q} B(q; q^{-v})` as a
/// merged list of disjoint half-open arcs with exact 128-bit endpoints.
///
/// Every point of every `B(q; ·)` with `q` in the shell is the reduced
/// fraction `r/s` of some `p/q` with `s | q`, so the approximant is the
/// union over the Farey fractions `r/s` of `F_Q` of the arc of radius
/// `m(s)^{-v-1}`, where `m(s)` is the least multiple of `s` inside the
/// shell. The Farey sweep produces the arcs already ordered by center.
pub struct ShellApproximant {
    /// merged arcs `[lo, hi)`, sorted
    arcs: Vec<(Frac128, Frac128)>,
    log2_q: u32,
    v: u32,
}

impl ShellApproximant {
    pub fn build(v: &Rational, big_q: u64) -> Result<Self> {
        if !big_q.is_power_of_two() || big_q < 4 {
            return Err(Error::invalid("shell size Q must be a power of two, Q >= 4"));
        }
        if !v.is_integer() {
            return Err(Error::unsupported(
                "box counting keeps the grid dyadic; v must be an integer",
            ));
        }
        let v_int = v
            .to_integer()
            .to_u32()
            .filter(|&x| x >= 1)
            .ok_or_else(|| Error::invalid("v must be a positive integer"))?;
        let log2_q = big_q.ilog2();
        if (v_int + 1) * log2_q > 100 {
            return Err(Error::unsupported("Q^(v+1) exceeds the exact 128-bit range"));
        }

        let m_of = |s: u64| -> u64 { s * ((big_q / 2 + s) / s) };
        let radius_den = |s: u64| -> u128 { (m_of(s) as u128).pow(v_int + 1) };

        let mut raw: Vec<(Frac128, Frac128)> = Vec::new();
        // center 0 contributes [0, r); its mirror at 1 contributes [1-r, 1)
        let r0_den = radius_den(1);
        raw.push((
            Frac128 { num: 0, den: 1 },
            Frac128 { num: 1, den: r0_den },
        ));
        // Farey iteration over 0 < a/b < 1 ascending
        let (mut pa, mut pb, mut ca, mut cb) = (0u64, 1u64, 1u64, big_q);
        while !(ca == 1 && cb == 1) {
            let s = cb as u128;
            let m_pow = radius_den(cb);
            // arc [a/b - 1/m_pow, a/b + 1/m_pow) over common denominator b * m_pow
            let den = s * m_pow;
            let center_num = ca as u128 * m_pow;
            debug_assert!(center_num >= s, "interior arc dips below 0");
            raw.push((
                Frac128 { num: center_num - s, den },
                Frac128 { num: center_num + s, den },
            ));
            let k = (big_q + pb) / cb;
            let (na, nb) = (k * ca - pa, k * cb - pb);
            pa = ca;
            pb = cb;
            ca = na;
            cb = nb;
        }
        raw.push((
            Frac128 { num: r0_den - 1, den: r0_den },
            Frac128 { num: 1, den: 1 },
        ));

        // Stack merge: arcs arrive ordered by center, but differing radii can
        // make an arc reach left past the previous merged block.
        let mut arcs: Vec<(Frac128, Frac128)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            let mut lo = lo;
            let mut hi = hi;
            while let Some(&(plo, phi)) = arcs.last() {
                if Frac128::cmp_frac(&lo, &phi) != std::cmp::Ordering::Greater {
                    if Frac128::cmp_frac(&phi, &hi) == std::cmp::Ordering::Greater {
                        hi = phi;
                    }
                    if Frac128::cmp_frac(&plo, &lo) == std::cmp::Ordering::Less {
                        lo = plo;
                    }
                    arcs.pop();
                } else {
                    break;
                }
            }
            arcs.push((lo, hi));
        }
        Ok(ShellApproximant { arcs, log2_q, v: v_int })
    }

    pub fn arc_count(&self) -> u64 {
        self.arcs.len() as u64
    }

    /// The grid exponent the estimator ties to this shell:
    /// `δ = Q^{-(v+1)} = 2^{-log2_inv_delta}`.
    pub fn natural_grid_exponent(&self) -> u32 {
        self.log2_q * (self.v + 1)
    }

    /// Number of boxes `[k 2^{-j}, (k+1) 2^{-j})` meeting the approximant:
    /// per merged arc, `ceil(hi/δ) - floor(lo/δ)`.
    pub fn count_boxes(&self, log2_inv_delta: u32) -> u64 {
        self.arcs
            .iter()
            .map(|(lo, hi)| {
                let f = floor_shift_div(lo.num, log2_inv_delta, lo.den);
                let c = ceil_shift_div(hi.num, log2_inv_delta, hi.den);
                (c - f) as u64
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct BoxCountPoint {
    pub shell_q: u64,
    pub log2_inv_delta: u32,
    pub boxes: u64,
    pub arcs: u64,
}

#[derive(Clone, Debug)]
pub struct BoxCountRun {
    pub points: Vec<BoxCountPoint>,
    pub slope: f64,
}

/// Box-counting estimate of the critical exponent: for each ladder entry
/// `Q` build the shell approximant, count boxes at `δ = Q^{-(v+1)}`, and
/// return the least-squares slope of `log₂ N(δ)` against `log₂(1/δ)`.
pub fn box_counting_estimate(v: &Rational, ladder: &[u64]) -> Result<BoxCountRun> {
    if *v <= Rational::one() {
        return Err(Error::invalid("box counting needs v > 1"));
    }
    if ladder.len() < 4 {
        return Err(Error::invalid("box-counting ladder needs at least 4 entries"));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("ladder must be strictly increasing"));
    }
    let points: Vec<BoxCountPoint> = ladder
        .par_iter()
        .map(|&q| {
            let shell = ShellApproximant::build(v, q)?;
            let jd = shell.natural_grid_exponent();
            Ok(BoxCountPoint {
                shell_q: q,
                log2_inv_delta: jd,
                boxes: shell.count_boxes(jd),
                arcs: shell.arc_count(),
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = points.iter().map(|p| p.log2_inv_delta as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.boxes as f64).log2()).collect();
    Ok(BoxCountRun {
        slope: least_squares_slope(&xs, &ys),
        points,
    })
}

/// Parameters of the closed-form dimension formulas.
#[derive(Clone, Debug)]
pub struct DimensionFormulae {
    pub m: u32,
    pub n: u32,
    pub v: Rational,
}

impl DimensionFormulae {
    pub fn new(m: u32, n: u32, v: Rational) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("dimensions m, n must be >= 1"));
        }
        if !v.is_positive() {
            return Err(Error::invalid("exponent v must be positive"));
        }
        Ok(DimensionFormulae { m, n, v })
    }

    /// `dim W_v = (m-1)n + (m+n)/(v+1)` for `v > m/n`, and `mn` otherwise.
    pub fn jb_dimension(&self) -> Rational {
        let m = rat(self.m as i64, 1);
        let n = rat(self.n as i64, 1);
        if self.v > &m / &n {
            (&m - Rational::one()) * &n + (&m + &n) / (&self.v + Rational::one())
        } else {
            m * n
        }
    }

    /// `γ = min(1, (1 + m/n)/(1 + v))`.
    pub fn gamma_exponent(&self) -> Rational {
        let ratio = (Rational::one() + rat(self.m as i64, self.n as i64))
            / (Rational::one() + &self.v);
        if ratio > Rational::one() {
            Rational::one()
        } else {
            ratio
        }
    }

    /// The ubiquity lower bound `dim R + γ codim R = (m-1)n + γn`.
    pub fn lower_bound_dimension(&self) -> Rational {
        let m = rat(self.m as i64, 1);
        let n = rat(self.n as i64, 1);
        (&m - Rational::one()) * &n + self.gamma_exponent() * &n
    }
}

pub fn jb_dimension(m: u32, n: u32, v: &Rational) -> Result<Rational> {
    Ok(DimensionFormulae::new(m, n, v.clone())?.jb_dimension())
}

pub fn gamma_exponent(m: u32, n: u32, v: &Rational) -> Result<Rational> {
    Ok(DimensionFormulae::new(m, n, v.clone())?.gamma_exponent())
}

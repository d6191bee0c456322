//! Measure-theoretic experiments: Dirichlet search via continued fractions,
//! solution counting, the generalized Borel–Cantelli lower bound,
//! quasi-independence constants, truncated-union growth, and covering
//! defects for the ubiquity radius.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::directed::{ceil_dyadic, floor_dyadic, Enclosure, Evaluation};
use crate::error::{Error, Result};
use crate::limsup::truncated_union;
use crate::planar::{build_strips_2d, neighborhood_convert, ConvertDirection, RegionExpr};
use crate::psi::ApproximationFunction;
use crate::rational::{mod1, rat, rat_u64, Rational};
use crate::torus::TorusIntervalSet;

/// Occupancy counts `ν_n(x) = Σ_{k<=n} χ_{E_k}(x)` along a ladder of `n`,
/// together with the means `A_n = Σ_{k<=n} |E_k|`.
#[derive(Clone, Debug)]
pub struct CountingProfile {
    pub ladder: Vec<usize>,
    pub counts: Vec<u64>,
    pub means: Vec<Rational>,
}

impl CountingProfile {
    pub fn new(family: &[TorusIntervalSet], x: &Rational, ladder: &[usize]) -> Result<Self> {
        if ladder.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("ladder must be non-decreasing"));
        }
        if ladder.last().copied().unwrap_or(0) > family.len() {
            return Err(Error::invalid("ladder exceeds family size"));
        }
        let mut counts = Vec::with_capacity(ladder.len());
        let mut means = Vec::with_capacity(ladder.len());
        let mut count = 0u64;
        let mut mean = Rational::zero();
        let mut k = 0usize;
        for &n in ladder {
            while k < n {
                if family[k].contains(x) {
                    count += 1;
                }
                mean += family[k].measure();
                k += 1;
            }
            counts.push(count);
            means.push(mean.clone());
        }
        Ok(CountingProfile {
            ladder: ladder.to_vec(),
            counts,
            means,
        })
    }
}

/// Best rational approximation per Dirichlet's theorem: the last continued-
/// fraction convergent of `alpha` with denominator at most `N`. The returned
/// pair satisfies `1 <= q <= N` and `|alpha - p/q| <= 1/(q(N+1))`.
pub fn dirichlet_approx(alpha: &Rational, n: u64) -> Result<(BigInt, BigInt)> {
    if alpha.is_negative() || *alpha > Rational::one() {
        return Err(Error::invalid("dirichlet_approx expects alpha in [0, 1]"));
    }
    if n == 0 {
        return Err(Error::invalid("dirichlet_approx expects N >= 1"));
    }
    let bound = BigInt::from(n);
    // Euclid on (numerator, denominator); convergents h/k via the standard
    // second-order recurrence.
    let mut num = alpha.numer().clone();
    let mut den = alpha.denom().clone();
    let (mut h2, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k2, mut k1) = (BigInt::one(), BigInt::zero());
    let mut best: Option<(BigInt, BigInt)> = None;
    while !den.is_zero() {
        let d = &num / &den;
        let r = &num % &den;
        let h = &d * &h1 + &h2;
        let k = &d * &k1 + &k2;
        if k <= bound {
            best = Some((h.clone(), k.clone()));
        } else {
            break;
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        num = std::mem::replace(&mut den, r);
    }
    best.ok_or_else(|| Error::invalid("no convergent with denominator <= N"))
}

/// Result of a solution count: the exact number of `q <= N` with
/// `‖q·alpha‖ < ψ(q)`, and the comparison sum `2 Σ_{q<=N} ψ(q)`.
#[derive(Clone, Debug)]
pub struct SolutionCount {
    pub count: u64,
    pub asymptote: Evaluation,
}

const SUM_PREC: u32 = 96;
/// Exact summation of rational ψ values is kept to ranges where the common
/// denominator stays tame; beyond it the sum is bracketed dyadically.
const EXACT_SUM_LIMIT: u64 = 4096;

/// Counts solutions of `‖q·alpha‖ < ψ(q)` for `q <= N` with exact integer
/// arithmetic; ties at the open boundary do not count. For directed ψ kinds
/// the bracket is refined until it decides each comparison. The range is
/// chunked over worker threads; per-chunk counts add commutatively, so the
/// result is identical for any thread count.
pub fn count_solutions(
    alpha: &Rational,
    psi: &ApproximationFunction,
    n: u64,
) -> Result<SolutionCount> {
    if n == 0 {
        return Err(Error::invalid("count_solutions expects N >= 1"));
    }
    let x = mod1(alpha);
    let a = x.numer().clone();
    let b = x.denom().clone();
    const CHUNK: u64 = 1 << 16;
    let starts: Vec<u64> = (1..=n).step_by(CHUNK as usize).collect();
    let count = starts
        .into_par_iter()
        .map(|start| {
            let end = (start + CHUNK - 1).min(n);
            let mut residue = (&a * start) % &b; // (q * a) mod b at q = start
            let mut count = 0u64;
            for q in start..=end {
                if q > start {
                    residue += &a;
                    if residue >= b {
                        residue -= &b;
                    }
                }
                let dist_num = std::cmp::min(residue.clone(), &b - &residue);
                if holds_strictly(psi, q, &dist_num, &b)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(SolutionCount {
        count,
        asymptote: psi_sum_doubled(psi, n)?,
    })
}

/// `dist_num / b < psi(q)` by cross-multiplication, refining directed
/// brackets until they separate from the rational distance.
fn holds_strictly(
    psi: &ApproximationFunction,
    q: u64,
    dist_num: &BigInt,
    b: &BigInt,
) -> Result<bool> {
    match psi.enclosure(q, crate::psi::PSI_PREC)? {
        Evaluation::Exact(v) => Ok(dist_num * v.denom() < v.numer() * b),
        Evaluation::Directed(mut e) => {
            let mut prec = crate::psi::PSI_PREC;
            loop {
                if dist_num * e.lo.denom() < e.lo.numer() * b {
                    return Ok(true);
                }
                if dist_num * e.hi.denom() >= e.hi.numer() * b {
                    return Ok(false);
                }
                prec *= 2;
                if prec > 1 << 16 {
                    return Err(Error::unsupported(
                        "psi bracket would not separate from ||q alpha||",
                    ));
                }
                e = match psi.enclosure(q, prec)? {
                    Evaluation::Exact(v) => return Ok(dist_num * v.denom() < v.numer() * b),
                    Evaluation::Directed(e) => e,
                };
            }
        }
    }
}

/// `2 Σ_{q<=N} ψ(q)`, exact when feasible, otherwise a dyadic bracket.
pub fn psi_sum_doubled(psi: &ApproximationFunction, n: u64) -> Result<Evaluation> {
    let two = Rational::from_integer(BigInt::from(2));
    let exact_kind = matches!(
        psi,
        ApproximationFunction::Table(_) | ApproximationFunction::ScaledReciprocal(_) | ApproximationFunction::Power(_)
    );
    if matches!(psi, ApproximationFunction::Table(_)) || (exact_kind && n <= EXACT_SUM_LIMIT) {
        // Table values are dyadic-friendly and the small exact kinds keep a
        // manageable common denominator.
        let mut sum = Rational::zero();
        let mut all_exact = true;
        for q in 1..=n {
            match psi.enclosure(q, SUM_PREC)? {
                Evaluation::Exact(v) => sum += v,
                Evaluation::Directed(_) => {
                    all_exact = false;
                    break;
                }
            }
        }
        if all_exact {
            return Ok(Evaluation::Exact(sum * two));
        }
    }
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for q in 1..=n {
        match psi.enclosure(q, SUM_PREC)? {
            Evaluation::Exact(v) => {
                lo += floor_dyadic(&v, SUM_PREC);
                hi += ceil_dyadic(&v, SUM_PREC);
            }
            Evaluation::Directed(e) => {
                lo += floor_dyadic(&e.lo, SUM_PREC);
                hi += ceil_dyadic(&e.hi, SUM_PREC);
            }
        }
    }
    Ok(Evaluation::Directed(Enclosure::new(lo, hi).scale(&two)))
}

/// The generalized Borel–Cantelli lower bound at truncation `N`:
/// `(Σ_{k<=N} |E_k|)² / Σ_{k,l<=N} |E_k ∩ E_l|`, exact. An all-null family
/// yields 0 by convention.
pub fn bc_lower_bound(measures: &[Rational], pair_measures: &[Vec<Rational>]) -> Result<Rational> {
    let n = measures.len();
    if pair_measures.len() != n || pair_measures.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("pair-measure matrix must be N x N"));
    }
    for (k, row) in pair_measures.iter().enumerate() {
        if row[k] != measures[k] {
            return Err(Error::invalid("diagonal must equal the measures"));
        }
        for (l, v) in row.iter().enumerate() {
            if v.is_negative() || *v > Rational::one() {
                return Err(Error::invalid("pair measures must lie in [0, 1]"));
            }
            if *v != pair_measures[l][k] {
                return Err(Error::invalid("pair-measure matrix must be symmetric"));
            }
        }
    }
    let total: Rational = measures.iter().sum();
    let denominator: Rational = pair_measures.iter().flatten().sum();
    if denominator.is_zero() {
        return Ok(Rational::zero());
    }
    Ok(&total * &total / denominator)
}

/// Measures and pairwise intersection measures of a family of interval sets,
/// in the shape `bc_lower_bound` consumes.
pub fn pair_measure_matrix(family: &[TorusIntervalSet]) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let n = family.len();
    let measures: Vec<Rational> = family.iter().map(|e| e.measure()).collect();
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for k in 0..n {
        matrix[k][k] = measures[k].clone();
        for l in (k + 1)..n {
            let m = family[k].intersect(&family[l]).measure();
            matrix[k][l] = m.clone();
            matrix[l][k] = m;
        }
    }
    (measures, matrix)
}

/// The smallest constant C with `|E_k ∩ E_l| <= C |E_k||E_l|` over distinct
/// pairs, exact. Null members are rejected (the ratio is undefined).
pub fn quasi_independence_constant(family: &[TorusIntervalSet]) -> Result<Rational> {
    if family.len() < 2 {
        return Err(Error::invalid("quasi-independence needs at least two sets"));
    }
    let measures: Vec<Rational> = family.iter().map(|e| e.measure()).collect();
    if measures.iter().any(|m| m.is_zero()) {
        return Err(Error::invalid("quasi-independence is undefined for null members"));
    }
    let mut best = Rational::zero();
    for k in 0..family.len() {
        for l in (k + 1)..family.len() {
            let ratio = family[k].intersect(&family[l]).measure() / (&measures[k] * &measures[l]);
            if ratio > best {
                best = ratio;
            }
        }
    }
    Ok(best)
}

/// `E_j = {x : the j-th binary digit of x is 0}`: `2^{j-1}` arcs of length
/// `2^-j`. The canonical totally independent calibration family.
pub fn dyadic_digit_set(j: u32) -> Result<TorusIntervalSet> {
    if j == 0 || j > 24 {
        return Err(Error::invalid("dyadic digit index out of range (1..=24)"));
    }
    let block = 1u64 << j; // period 2^{1-j} scaled by 2^j is two blocks
    let arcs: Vec<(Rational, Rational)> = (0..(1u64 << (j - 1)))
        .map(|i| {
            let lo = rat_u64(2 * i) / rat_u64(block);
            let hi = rat_u64(2 * i + 1) / rat_u64(block);
            (lo, hi)
        })
        .collect();
    TorusIntervalSet::from_arcs(&arcs)
}

pub fn dyadic_family(j_max: u32) -> Result<Vec<TorusIntervalSet>> {
    (1..=j_max).map(dyadic_digit_set).collect()
}

/// Measure of the truncated union `⋃_{q<=N} B(q; ψ(q))` with the exactness
/// flag (false when an irrational ψ entered through its lower rounding).
#[derive(Clone, Debug)]
pub struct UnionMeasure {
    pub measure: Rational,
    pub exact: bool,
}

pub fn khintchine_union_measure(psi: &ApproximationFunction, n: u64) -> Result<UnionMeasure> {
    if n == 0 {
        return Err(Error::invalid("union measure expects N >= 1"));
    }
    let u = truncated_union(psi, n)?;
    Ok(UnionMeasure {
        measure: u.set.measure(),
        exact: u.exact,
    })
}

pub fn union_growth_ladder(
    psi: &ApproximationFunction,
    ladder: &[u64],
) -> Result<Vec<(u64, UnionMeasure)>> {
    ladder
        .iter()
        .map(|&n| Ok((n, khintchine_union_measure(psi, n)?)))
        .collect()
}

/// Integral-comparison tail bound for the convergence case: for `ψ = q^{-v}`
/// with integer `v >= 2`, `Σ_{q>N} 2ψ(q) < 2 N^{1-v}/(v-1)`.
pub fn convergence_tail_bound(psi: &ApproximationFunction, n: u64) -> Option<Rational> {
    if n == 0 {
        return None;
    }
    match psi {
        ApproximationFunction::Power(v) if v.is_integer() && *v >= rat(2, 1) => {
            let v = v.to_integer().to_i64()?;
            let n_pow = crate::rational::pow_i32(&rat_u64(n), (1 - v) as i32);
            Some(rat(2, v - 1) * n_pow)
        }
        _ => None,
    }
}

/// Which torus the covering-defect experiment runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectCase {
    /// T¹, resonant sets `{p/q}`.
    Line,
    /// T², resonant sets the line families `q·u = p` with `q ∈ Z²`.
    Plane,
}

#[derive(Clone, Debug)]
pub struct Defect {
    pub defect: Rational,
    /// False when the radius was rounded down, making the reported defect an
    /// upper bound on the true one.
    pub exact: bool,
}

/// Measure of `T^d ∖ ⋃_{1<=|q|<=N} B̃(q; ρ̃(N))`, via the identity
/// `B̃(q; δ) = B(q; δ|q|₁)`. Irrational ρ̃ enters through its lower rounding,
/// so the reported defect is an upper bound on the true defect.
pub fn ubiquity_defect(case: DefectCase, n: u64, rho: &ApproximationFunction) -> Result<Defect> {
    if n == 0 {
        return Err(Error::invalid("ubiquity defect expects N >= 1"));
    }
    // 72-bit lower rounding: the bracket gap stays under 2^-64 while the
    // half-million arc endpoints keep two-limb denominators.
    let (delta, exact) = match rho.enclosure(n, 72)? {
        Evaluation::Exact(v) => (v, true),
        Evaluation::Directed(e) => (e.lo, false),
    };
    if !delta.is_positive() {
        return Err(Error::invalid("covering radius must be positive"));
    }
    let defect = match case {
        DefectCase::Line => farey_neighborhood_defect(n, &delta),
        DefectCase::Plane => {
            let mut leaves = Vec::new();
            let nn = i64::try_from(n).map_err(|_| Error::unsupported("N too large"))?;
            for q1 in -nn..=nn {
                for q2 in 0..=nn {
                    if q2 == 0 && q1 <= 0 {
                        continue; // half-lattice: B(q) = B(-q)
                    }
                    let v = crate::numth::LatticeVector::new(vec![q1, q2]);
                    let (_, radius) = neighborhood_convert(&v, &delta, ConvertDirection::TildeToB)?;
                    leaves.push(build_strips_2d([q1, q2], &radius)?);
                }
            }
            Rational::one() - crate::planar::area_2d(&RegionExpr::union_all(leaves))
        }
    };
    Ok(Defect { defect, exact })
}

/// Uncovered measure of `[0,1) ∖ ⋃ {δ-balls at the Farey fractions F_N}`,
/// by one merge pass over the fractions in ascending order.
///
/// `B̃(q; δ) = B(q; qδ)` gives every point `p/q` the same radius `δ`, so
/// non-reduced representations duplicate arcs and only `F_N` matters. An
/// interior arc spilling past 0 or 1 is contained in the wrap arcs of the
/// endpoint 0 ≡ 1, so clamping the sweep to `[0, 1]` loses nothing.
fn farey_neighborhood_defect(n: u64, delta: &Rational) -> Rational {
    if *delta >= rat(1, 2) {
        return Rational::zero();
    }
    let mut covered = Rational::zero();
    let mut cur_lo = Rational::zero();
    let mut cur_hi = delta.clone(); // the arc [0, delta) at 0/1
    let push = |lo: Rational, hi: Rational, cur_lo: &mut Rational, cur_hi: &mut Rational, covered: &mut Rational| {
        if lo <= *cur_hi {
            if hi > *cur_hi {
                *cur_hi = hi;
            }
        } else {
            *covered += &*cur_hi - &*cur_lo;
            *cur_lo = lo;
            *cur_hi = hi;
        }
    };
    let (mut pa, mut pb, mut ca, mut cb) = (0u64, 1u64, 1u64, n);
    while !(ca == 1 && cb == 1) {
        let center = rat_u64(ca) / rat_u64(cb);
        push(
            &center - delta,
            center + delta,
            &mut cur_lo,
            &mut cur_hi,
            &mut covered,
        );
        let k = (n + pb) / cb;
        let (na, nb) = (k * ca - pa, k * cb - pb);
        pa = ca;
        pb = cb;
        ca = na;
        cb = nb;
    }
    // the arc [1 - delta, 1) at 1/1, then flush clamped to the unit interval
    push(
        Rational::one() - delta,
        Rational::one(),
        &mut cur_lo,
        &mut cur_hi,
        &mut covered,
    );
    if cur_hi > Rational::one() {
        cur_hi = Rational::one();
    }
    covered += &cur_hi - &cur_lo;
    Rational::one() - covered
}

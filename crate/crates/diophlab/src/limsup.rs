//! One-dimensional resonant-set neighborhoods: the sets `B(q; ρ)` whose
//! tail unions and intersections make up the limsup sets under study.

use crate::error::{Error, Result};
use crate::psi::{ApproximationFunction, Rounding};
use crate::rational::{rat, rat_u64, Rational};
use crate::torus::TorusIntervalSet;

use num_traits::Signed;

/// `B(q; ρ)`: the union over `p = 0..q` of arcs of radius `ρ/q` around the
/// rational points `p/q`, on the torus. Measure `min(2ρ, 1)`; the arcs touch
/// and fill the torus once `ρ >= 1/2`.
pub fn build_b_1d(q: u64, rho: &Rational) -> Result<TorusIntervalSet> {
    if q == 0 {
        return Err(Error::invalid("B(q; rho) requires q >= 1"));
    }
    if !rho.is_positive() {
        return Err(Error::invalid("B(q; rho) requires rho > 0"));
    }
    if *rho >= rat(1, 2) {
        return Ok(TorusIntervalSet::full());
    }
    let radius = rho / rat_u64(q);
    Ok(TorusIntervalSet::from_balls(
        (0..q).map(|p| (rat_u64(p) / rat_u64(q), radius.clone())),
    ))
}

/// The truncated union `⋃_{q<=N} B(q; ψ(q))`. Irrational ψ values enter
/// through their lower rounding, so the union (and its measure) is a lower
/// bound; the flag in the result records whether everything was exact.
pub struct TruncatedUnion {
    pub set: TorusIntervalSet,
    pub exact: bool,
}

pub fn truncated_union(psi: &ApproximationFunction, n: u64) -> Result<TruncatedUnion> {
    let mut balls = Vec::new();
    let mut exact = true;
    for q in 1..=n {
        let value = match psi.eval(q, Rounding::Exact) {
            Ok(v) => v,
            Err(Error::ExactUnavailable(_)) => {
                exact = false;
                psi.eval(q, Rounding::Lower)?
            }
            Err(e) => return Err(e),
        };
        if value >= rat(1, 2) {
            return Ok(TruncatedUnion {
                set: TorusIntervalSet::full(),
                exact,
            });
        }
        let radius = &value / rat_u64(q);
        for p in 0..q {
            balls.push((rat_u64(p) / rat_u64(q), radius.clone()));
        }
    }
    Ok(TruncatedUnion {
        set: TorusIntervalSet::from_balls(balls),
        exact,
    })
}

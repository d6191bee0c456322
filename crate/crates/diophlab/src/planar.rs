//! Planar strip families `B(q; ρ) = {u ∈ T² : ‖q·u‖ < ρ}`, boolean region
//! expressions over them, and an exact slab-sweep area engine.
//!
//! The sweep works because the x₂-slice of any boolean combination of strips
//! is a finite union of torus arcs whose endpoints move affinely with x₁, so
//! between consecutive x₁ at which two boundary lines of the leaves cross
//! (inside the unit square) the slice measure is an affine function of x₁.
//! The area of such a slab is its width times the slice measure at the
//! midpoint, evaluated exactly with the torus set algebra.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numth::LatticeVector;
use crate::rational::{dist_to_integer, rat, Rational};
use crate::torus::TorusIntervalSet;

/// The strip family `B(q; ρ)` on T², stored with the integer offsets `p` for
/// which the strip `|q·u - p| < ρ` meets the unit square.
#[derive(Clone, Debug, PartialEq)]
pub struct StripFamily {
    q: [i64; 2],
    rho: Rational,
    offsets: Vec<i64>,
}

impl StripFamily {
    pub fn q(&self) -> [i64; 2] {
        self.q
    }

    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    /// Exact membership: `‖q₁u₁ + q₂u₂‖ < ρ`.
    pub fn contains(&self, u1: &Rational, u2: &Rational) -> bool {
        let form = rat(self.q[0], 1) * u1 + rat(self.q[1], 1) * u2;
        dist_to_integer(&form) < self.rho
    }

    /// `|B(q; ρ)| = min(2ρ, 1)`.
    pub fn area(&self) -> Rational {
        let two_rho = &self.rho + &self.rho;
        if two_rho >= Rational::one() {
            Rational::one()
        } else {
            two_rho
        }
    }

    fn is_full(&self) -> bool {
        &self.rho + &self.rho >= Rational::one()
    }

    /// Boundary values `p ± ρ` of every strip meeting the square.
    fn boundary_values(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(2 * self.offsets.len());
        for &p in &self.offsets {
            out.push(rat(p, 1) - &self.rho);
            out.push(rat(p, 1) + &self.rho);
        }
        out
    }

    /// The x₂-slice at `x₁ = x` as a torus set.
    fn slice(&self, x: &Rational) -> TorusIntervalSet {
        if self.is_full() {
            return TorusIntervalSet::full();
        }
        let [q1, q2] = self.q;
        if q2 == 0 {
            // vertical strips: the slice is all-or-nothing
            let form = rat(q1, 1) * x;
            return if dist_to_integer(&form) < self.rho {
                TorusIntervalSet::full()
            } else {
                TorusIntervalSet::empty()
            };
        }
        let q2r = rat(q2, 1);
        let radius = (&self.rho / &q2r).abs();
        TorusIntervalSet::from_balls(self.offsets.iter().map(|&p| {
            let center = (rat(p, 1) - rat(q1, 1) * x) / &q2r;
            (center, radius.clone())
        }))
    }
}

/// `B(q; ρ)` with the offsets clipped to the strips that meet `[0,1]²`.
pub fn build_strips_2d(q: [i64; 2], rho: &Rational) -> Result<StripFamily> {
    if q == [0, 0] {
        return Err(Error::invalid("strip family requires q != (0,0)"));
    }
    if !rho.is_positive() {
        return Err(Error::invalid("strip family requires rho > 0"));
    }
    let lo = rat(q[0].min(0) + q[1].min(0), 1);
    let hi = rat(q[0].max(0) + q[1].max(0), 1);
    let from = (&lo - rho).floor().to_integer();
    let to = (&hi + rho).ceil().to_integer();
    let mut offsets = Vec::new();
    let mut p = from.clone();
    while p <= to {
        let pr = Rational::from_integer(p.clone());
        if &pr - rho < hi && &pr + rho > lo {
            // offsets stay tiny relative to i64; the conversion cannot fail for usable |q|
            offsets.push(i64::try_from(&p).map_err(|_| Error::unsupported("offset overflow"))?);
        }
        p += BigInt::one();
    }
    Ok(StripFamily {
        q,
        rho: rho.clone(),
        offsets,
    })
}

/// Boolean expression tree over strip families on a common torus.
#[derive(Clone, Debug)]
pub enum RegionExpr {
    Empty,
    Leaf(StripFamily),
    Union(Box<RegionExpr>, Box<RegionExpr>),
    Intersect(Box<RegionExpr>, Box<RegionExpr>),
    Complement(Box<RegionExpr>),
}

impl RegionExpr {
    pub fn leaf(s: StripFamily) -> Self {
        RegionExpr::Leaf(s)
    }

    pub fn union(a: RegionExpr, b: RegionExpr) -> Self {
        RegionExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn intersect(a: RegionExpr, b: RegionExpr) -> Self {
        RegionExpr::Intersect(Box::new(a), Box::new(b))
    }

    pub fn complement(a: RegionExpr) -> Self {
        RegionExpr::Complement(Box::new(a))
    }

    pub fn union_all<I: IntoIterator<Item = StripFamily>>(leaves: I) -> Self {
        leaves
            .into_iter()
            .map(RegionExpr::leaf)
            .reduce(RegionExpr::union)
            .unwrap_or(RegionExpr::Empty)
    }

    pub fn contains(&self, u1: &Rational, u2: &Rational) -> bool {
        match self {
            RegionExpr::Empty => false,
            RegionExpr::Leaf(s) => s.contains(u1, u2),
            RegionExpr::Union(a, b) => a.contains(u1, u2) || b.contains(u1, u2),
            RegionExpr::Intersect(a, b) => a.contains(u1, u2) && b.contains(u1, u2),
            RegionExpr::Complement(a) => !a.contains(u1, u2),
        }
    }

    pub fn leaves(&self) -> Vec<&StripFamily> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a StripFamily>) {
        match self {
            RegionExpr::Empty => {}
            RegionExpr::Leaf(s) => out.push(s),
            RegionExpr::Union(a, b) | RegionExpr::Intersect(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
            RegionExpr::Complement(a) => a.collect_leaves(out),
        }
    }

    fn slice(&self, x: &Rational) -> TorusIntervalSet {
        match self {
            RegionExpr::Empty => TorusIntervalSet::empty(),
            RegionExpr::Leaf(s) => s.slice(x),
            RegionExpr::Union(a, b) => a.slice(x).union(&b.slice(x)),
            RegionExpr::Intersect(a, b) => a.slice(x).intersect(&b.slice(x)),
            RegionExpr::Complement(a) => a.slice(x).complement(),
        }
    }
}

/// Exact area of a region expression by the slab sweep.
pub fn area_2d(expr: &RegionExpr) -> Rational {
    let leaves = expr.leaves();
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    cuts.insert(Rational::zero());
    cuts.insert(Rational::one());

    // Vertical leaves switch their all-or-nothing slice exactly at their
    // boundary lines.
    for leaf in &leaves {
        if leaf.q()[1] == 0 && !leaf.is_full() {
            let q1 = rat(leaf.q()[0], 1);
            for c in leaf.boundary_values() {
                let x = c / &q1;
                if !x.is_negative() && x <= Rational::one() {
                    cuts.insert(x);
                }
            }
        }
    }

    // Crossings of boundary lines of non-parallel leaf pairs inside the
    // square; parallel families keep their relative slice pattern constant,
    // so they contribute no breakpoints.
    for i in 0..leaves.len() {
        for j in (i + 1)..leaves.len() {
            let (a, b) = (leaves[i], leaves[j]);
            if a.is_full() || b.is_full() {
                continue;
            }
            let [a1, a2] = a.q();
            let [b1, b2] = b.q();
            let det = a1 as i128 * b2 as i128 - a2 as i128 * b1 as i128;
            if det == 0 {
                continue;
            }
            let det = Rational::from_integer(BigInt::from(det));
            let a_vals = a.boundary_values();
            let b_vals = b.boundary_values();
            for ca in &a_vals {
                for cb in &b_vals {
                    let x1 = (ca * rat(b2, 1) - cb * rat(a2, 1)) / &det;
                    if x1.is_negative() || x1 > Rational::one() {
                        continue;
                    }
                    let x2 = (cb * rat(a1, 1) - ca * rat(b1, 1)) / &det;
                    if x2.is_negative() || x2 > Rational::one() {
                        continue;
                    }
                    cuts.insert(x1);
                }
            }
        }
    }

    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let two = Rational::from_integer(BigInt::from(2));
    cuts.par_windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) / &two;
            let width = &w[1] - &w[0];
            expr.slice(&mid).measure() * width
        })
        .reduce(Rational::zero, |a, b| a + b)
}

/// Conversion direction between the form neighborhoods `B(q; δ)` and the
/// sup-norm neighborhoods `B̃(q; δ)` of the resonant sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvertDirection {
    /// `B̃(q; δ) = B(q; δ·|q|₁)`: exact, since the sup-norm distance from a
    /// point to the hyperplane `q·u = p` is `|q·u - p| / |q|₁`.
    TildeToB,
    /// `B(q; δ) ⊆ B̃(q; δ/|q|)` (outer bound).
    BToTildeOuter,
    /// `B̃(q; δ/(m|q|)) ⊆ B(q; δ)` (inner bound).
    BToTildeInner,
}

/// Radius conversion between the two neighborhood notions; returns the
/// vector together with the converted radius.
pub fn neighborhood_convert(
    q: &LatticeVector,
    delta: &Rational,
    direction: ConvertDirection,
) -> Result<(LatticeVector, Rational)> {
    if q.is_zero() {
        return Err(Error::invalid("neighborhood conversion requires q != 0"));
    }
    if !delta.is_positive() {
        return Err(Error::invalid("neighborhood conversion requires delta > 0"));
    }
    let radius = match direction {
        ConvertDirection::TildeToB => delta * rat(q.one_norm() as i64, 1),
        ConvertDirection::BToTildeOuter => delta / rat(q.sup_norm() as i64, 1),
        ConvertDirection::BToTildeInner => delta / rat((q.dim() as u64 * q.sup_norm()) as i64, 1),
    };
    Ok((q.clone(), radius))
}

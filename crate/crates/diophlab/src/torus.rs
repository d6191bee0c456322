//! Exact set algebra on the 1-torus `[0, 1)`.
//!
//! A [`TorusIntervalSet`] is a finite disjoint union of half-open arcs with
//! rational endpoints. Internally the set is stored as sorted, disjoint,
//! maximally-merged *linear* segments `[a, b)` with `0 <= a < b <= 1`; a
//! wrapped arc is split at the origin. The linear form is canonical, so
//! structural equality is set equality. The wrapped view (at most one arc
//! crossing the origin) is reconstructed on demand by [`arcs`].
//!
//! Half-open arcs make unions of touching arcs merge without ambiguity, and
//! boundary points carry no measure, so the open intervals the neighborhoods
//! are defined with are represented faithfully for every measure computation.
//! No floating point enters this module.
//!
//! [`arcs`]: TorusIntervalSet::arcs

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{mod1, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TorusIntervalSet {
    /// Sorted, disjoint, non-adjacent, each `0 <= a < b <= 1`.
    segs: Vec<(Rational, Rational)>,
}

impl TorusIntervalSet {
    pub fn empty() -> Self {
        TorusIntervalSet { segs: Vec::new() }
    }

    pub fn full() -> Self {
        TorusIntervalSet {
            segs: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Builds the union of arbitrary (possibly overlapping) linear segments.
    /// Segments are clamped to `[0, 1]`; empty ones are dropped.
    fn from_linear_segments(mut raw: Vec<(Rational, Rational)>) -> Self {
        raw.retain(|(a, b)| a < b);
        raw.sort();
        let mut segs: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match segs.last_mut() {
                // Touching segments merge: half-open arcs leave no gap.
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => segs.push((a, b)),
            }
        }
        TorusIntervalSet { segs }
    }

    /// Union of balls `(center - radius, center + radius)` taken mod 1.
    /// A radius of at least 1/2 fills the torus; non-positive radii are empty.
    pub fn from_balls<I>(balls: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let half = Rational::new(1.into(), 2.into());
        let mut raw = Vec::new();
        for (center, radius) in balls {
            if !radius.is_positive() {
                continue;
            }
            if radius >= half {
                return TorusIntervalSet::full();
            }
            let lo = mod1(&(&center - &radius));
            let len = &radius + &radius;
            let hi = &lo + &len;
            if hi <= Rational::one() {
                raw.push((lo, hi));
            } else {
                raw.push((Rational::zero(), &hi - Rational::one()));
                raw.push((lo, Rational::one()));
            }
        }
        TorusIntervalSet::from_linear_segments(raw)
    }

    pub fn ball(center: &Rational, radius: &Rational) -> Self {
        TorusIntervalSet::from_balls([(center.clone(), radius.clone())])
    }

    /// Union of directed arcs `[start, end)` taken mod 1; an arc whose
    /// endpoints coincide mod 1 is rejected as ambiguous.
    pub fn from_arcs(arcs: &[(Rational, Rational)]) -> Result<Self> {
        let mut raw = Vec::new();
        for (start, end) in arcs {
            let a = mod1(start);
            let len = mod1(&(end - start));
            if len.is_zero() {
                return Err(Error::invalid(
                    "arc endpoints coincide mod 1 (empty or full is ambiguous)",
                ));
            }
            let b = &a + &len;
            if b <= Rational::one() {
                raw.push((a, b));
            } else {
                raw.push((Rational::zero(), &b - Rational::one()));
                raw.push((a, Rational::one()));
            }
        }
        Ok(TorusIntervalSet::from_linear_segments(raw))
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.segs.len() == 1 && self.segs[0].0.is_zero() && self.segs[0].1.is_one()
    }

    /// The linear (wrap-split) segments; canonical form.
    pub fn segments(&self) -> &[(Rational, Rational)] {
        &self.segs
    }

    /// The wrapped arc view: at most one arc crosses the origin, reported as
    /// `(start, end)` with `end <= start`.
    pub fn arcs(&self) -> Vec<(Rational, Rational)> {
        if self.segs.len() >= 2 {
            let first = &self.segs[0];
            let last = self.segs.last().unwrap();
            if first.0.is_zero() && last.1.is_one() {
                let mut arcs: Vec<(Rational, Rational)> =
                    self.segs[1..self.segs.len() - 1].to_vec();
                arcs.push((last.0.clone(), first.1.clone()));
                return arcs;
            }
        }
        self.segs.clone()
    }

    /// Exact Lebesgue measure, additive over the disjoint arcs.
    pub fn measure(&self) -> Rational {
        let mut m = Rational::zero();
        for (a, b) in &self.segs {
            m += b - a;
        }
        debug_assert!(!m.is_negative() && m <= Rational::one());
        m
    }

    /// Exact membership of a point (reduced mod 1).
    pub fn contains(&self, x: &Rational) -> bool {
        let x = mod1(x);
        let idx = self.segs.partition_point(|(a, _)| *a <= x);
        if idx == 0 {
            return false;
        }
        x < self.segs[idx - 1].1
    }

    pub fn complement(&self) -> Self {
        let mut segs = Vec::with_capacity(self.segs.len() + 1);
        let mut cursor = Rational::zero();
        for (a, b) in &self.segs {
            if &cursor < a {
                segs.push((cursor, a.clone()));
            }
            cursor = b.clone();
        }
        if cursor < Rational::one() {
            segs.push((cursor, Rational::one()));
        }
        TorusIntervalSet { segs }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut raw = self.segs.clone();
        raw.extend_from_slice(&other.segs);
        TorusIntervalSet::from_linear_segments(raw)
    }

    /// Two-pointer sweep over the sorted disjoint segments of both operands.
    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.segs.len() && j < other.segs.len() {
            let a = &self.segs[i];
            let b = &other.segs[j];
            let lo = if a.0 >= b.0 { &a.0 } else { &b.0 };
            let hi = if a.1 <= b.1 { &a.1 } else { &b.1 };
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a.1 <= b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        TorusIntervalSet { segs: out }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    pub fn boolean_combine(a: &Self, b: &Self, op: SetOp) -> Self {
        match op {
            SetOp::Union => a.union(b),
            SetOp::Intersect => a.intersect(b),
            SetOp::Difference => a.difference(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(arcs: &[(i64, i64, i64)]) -> TorusIntervalSet {
        // (num_a, num_b, den) -> arc [a/den, b/den)
        let v: Vec<_> = arcs.iter().map(|&(a, b, d)| (rat(a, d), rat(b, d))).collect();
        TorusIntervalSet::from_arcs(&v).unwrap()
    }

    #[test]
    fn union_merges_overlap() {
        let a = set(&[(0, 2, 8)]); // [0, 1/4)
        let b = set(&[(1, 4, 8)]); // [1/8, 1/2)
        let u = a.union(&b);
        assert_eq!(u, set(&[(0, 4, 8)]));
        assert_eq!(u.measure(), rat(1, 2));
    }

    #[test]
    fn union_with_empty_is_identity() {
        let b = set(&[(1, 3, 10)]);
        assert_eq!(TorusIntervalSet::empty().union(&b), b);
        assert_eq!(b.union(&TorusIntervalSet::empty()), b);
    }

    #[test]
    fn complement_trivial_cases() {
        assert_eq!(TorusIntervalSet::empty().complement(), TorusIntervalSet::full());
        let half = set(&[(0, 1, 2)]);
        assert_eq!(half.complement(), set(&[(1, 2, 2)]));
    }

    #[test]
    fn complement_of_wrapped_arc() {
        // arc 9/10 -> 1/10 wraps the origin
        let wrapped = TorusIntervalSet::from_arcs(&[(rat(9, 10), rat(1, 10))]).unwrap();
        assert_eq!(wrapped.measure(), rat(1, 5));
        let c = wrapped.complement();
        assert_eq!(c, set(&[(1, 9, 10)]));
        // shifting the torus origin: the same set built from a ball at 0
        let ball = TorusIntervalSet::ball(&rat_int(0), &rat(1, 10));
        assert_eq!(ball, wrapped);
    }

    #[test]
    fn wrapped_view_has_single_wrap_arc() {
        let s = set(&[(0, 1, 10), (9, 10, 10), (4, 5, 10)]);
        let arcs = s.arcs();
        assert_eq!(arcs.len(), 2);
        assert_eq!(arcs[1], (rat(9, 10), rat(1, 10))); // the wrapped one, last
        let wrapped_back = TorusIntervalSet::from_arcs(&arcs).unwrap();
        assert_eq!(wrapped_back, s);
    }

    #[test]
    fn ball_fills_torus_at_half() {
        assert!(TorusIntervalSet::ball(&rat(1, 3), &rat(1, 2)).is_full());
        assert!(TorusIntervalSet::ball(&rat(1, 3), &rat(2, 3)).is_full());
        assert!(TorusIntervalSet::ball(&rat(1, 3), &rat_int(0)).is_empty());
    }

    /// B(q; rho) in one dimension, built directly for cross-checking.
    fn b1d(q: i64, rho_num: i64, rho_den: i64) -> TorusIntervalSet {
        let rho = rat(rho_num, rho_den);
        let radius = &rho / rat_int(q);
        TorusIntervalSet::from_balls((0..q).map(|p| (rat(p, q), radius.clone())))
    }

    #[test]
    fn intersection_of_neighborhoods_has_expected_measure() {
        // |B(2;1/10)| = 1/5 and |B(3;1/10)| = 1/5; the intersection is the
        // pair of slivers hugging the origin, measure 1/30 + 1/30 = 1/15.
        let b2 = b1d(2, 1, 10);
        let b3 = b1d(3, 1, 10);
        assert_eq!(b2.measure(), rat(1, 5));
        assert_eq!(b3.measure(), rat(1, 5));
        let inter = b2.intersect(&b3);
        assert_eq!(inter.measure(), rat(1, 15));

        // Fine-grid membership oracle: sample 3000 stratified points and
        // compare against direct per-arc membership on both factors.
        let n = 3000;
        for i in 0..n {
            let x = rat(2 * i + 1, 2 * n);
            assert_eq!(inter.contains(&x), b2.contains(&x) && b3.contains(&x));
        }
    }

    #[test]
    fn measure_of_empty_is_zero() {
        assert_eq!(TorusIntervalSet::empty().measure(), rat_int(0));
        assert_eq!(TorusIntervalSet::full().measure(), rat_int(1));
    }

    fn random_set(rng: &mut ChaCha8Rng) -> TorusIntervalSet {
        let n_arcs = rng.gen_range(0..6);
        let den = rng.gen_range(2u32..100) as i64;
        let balls: Vec<_> = (0..n_arcs)
            .map(|_| {
                let c = rat(rng.gen_range(0..den), den);
                let r = rat(rng.gen_range(1..=den), 4 * den);
                (c, r)
            })
            .collect();
        TorusIntervalSet::from_balls(balls)
    }

    #[test]
    fn randomized_membership_concordance() {
        // 1000 random arc families; 100 random rational points each: the set
        // algebra agrees with direct per-ball membership.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
        for _ in 0..1000 {
            let n_arcs = rng.gen_range(1..6);
            let den = rng.gen_range(2u32..60) as i64;
            let balls: Vec<_> = (0..n_arcs)
                .map(|_| {
                    let c = rat(rng.gen_range(0..den), den);
                    let r = rat(rng.gen_range(1..=den), 4 * den);
                    (c, r)
                })
                .collect();
            let s = TorusIntervalSet::from_balls(balls.clone());
            for _ in 0..100 {
                let x = rat(rng.gen_range(0..10_000), 10_000);
                // Direct per-arc test under the half-open convention:
                // x in [c - r, c + r) mod 1.
                let direct = balls.iter().any(|(c, r)| {
                    crate::rational::mod1(&(&x - c + r)) < r + r
                });
                assert_eq!(s.contains(&x), direct, "x = {x} in {balls:?}");
            }
        }
    }

    #[test]
    fn seeded_inclusion_exclusion_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
        for _ in 0..300 {
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            let u = a.union(&b);
            let i = a.intersect(&b);
            assert_eq!(
                u.measure() + i.measure(),
                a.measure() + b.measure(),
                "inclusion-exclusion"
            );
            assert_eq!(a.complement().complement(), a, "involution");
            assert_eq!(u, b.union(&a), "commutativity");
            assert_eq!(i, b.intersect(&a));
            assert_eq!(
                a.measure() + a.complement().measure(),
                rat_int(1),
                "complement measure"
            );
            assert_eq!(a.difference(&b), a.intersect(&b.complement()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_normalization_idempotent(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_set(&mut rng);
            let renorm = TorusIntervalSet::from_arcs(&s.arcs());
            if s.is_empty() {
                prop_assert!(renorm.is_err() || renorm.unwrap().is_empty());
            } else if s.is_full() {
                // full torus round-trips through the single arc [0,1)
                prop_assert!(renorm.is_err() || renorm.unwrap().is_full());
            } else {
                prop_assert_eq!(renorm.unwrap(), s);
            }
        }

        #[test]
        fn prop_associativity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            let c = random_set(&mut rng);
            prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
            prop_assert_eq!(a.intersect(&b).intersect(&c), a.intersect(&b.intersect(&c)));
        }

        #[test]
        fn prop_segments_are_normalized(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_set(&mut rng);
            let b = random_set(&mut rng);
            for s in [a.union(&b), a.intersect(&b), a.difference(&b), a.complement()] {
                let segs = s.segments();
                for w in segs.windows(2) {
                    prop_assert!(w[0].1 < w[1].0, "disjoint and non-adjacent");
                }
                for (lo, hi) in segs {
                    prop_assert!(*lo < *hi);
                    prop_assert!(!lo.is_negative() && *hi <= Rational::one());
                }
            }
        }
    }
}

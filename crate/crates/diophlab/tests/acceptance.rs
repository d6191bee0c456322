//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its elapsed time (run with `--nocapture` to see them). Every tolerance is
//! pinned in code; all comparisons on exact quantities are rational equality.

use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diophlab::dimension::{box_counting_estimate, critical_exponent_estimate, jb_dimension, DimensionFormulae};
use diophlab::directed::{ceil_dyadic, ln_enclosure, pi_squared_enclosure, Evaluation};
use diophlab::metrics::{
    bc_lower_bound, convergence_tail_bound, count_solutions, dirichlet_approx, dyadic_family,
    quasi_independence_constant, ubiquity_defect, union_growth_ladder, DefectCase,
};
use diophlab::numth::{primitive_shell, shell_cardinality, totient, totient_sum};
use diophlab::planar::{area_2d, build_strips_2d, RegionExpr};
use diophlab::psi::ApproximationFunction;
use diophlab::rational::{pow_i32, rat, rat_u64, Rational};
use diophlab::report::ExperimentReport;

fn pass(criterion: u32, detail: &str, started: Instant) {
    println!(
        "PASS criterion {criterion}: {detail} [{:.2?}]",
        started.elapsed()
    );
}

fn random_nonzero_q(rng: &mut ChaCha8Rng, bound: i64) -> [i64; 2] {
    loop {
        let q = [rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)];
        if q != [0, 0] {
            return q;
        }
    }
}

/// Criterion 1: 500 pseudo-random strips have exact area 2 rho.
#[test]
fn criterion_01_strip_measure() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    for case in 0..500 {
        let q = random_nonzero_q(&mut rng, 50);
        // rational rho < 1/2
        let den = rng.gen_range(3i64..=997);
        let num = rng.gen_range(1i64..=(den - 1) / 2);
        let rho = rat(num, den);
        let area = area_2d(&RegionExpr::leaf(build_strips_2d(q, &rho).unwrap()));
        assert_eq!(area, &rho + &rho, "case {case}: q = {q:?}, rho = {rho}");
    }
    pass(1, "500 random strip areas equal 2*rho exactly", t);
}

/// Criterion 2: 200 independent pairs multiply exactly; the collinear pair
/// does not.
#[test]
fn criterion_02_pair_independence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
    let mut done = 0;
    while done < 200 {
        let q = random_nonzero_q(&mut rng, 20);
        let qp = random_nonzero_q(&mut rng, 20);
        let cross = q[0] as i128 * qp[1] as i128 - q[1] as i128 * qp[0] as i128;
        if cross == 0 {
            continue;
        }
        // rational radii <= 1/10
        let mut radius = || {
            let num = rng.gen_range(1i64..=5);
            let den = rng.gen_range(10 * num..=40 * num);
            rat(num, den)
        };
        let rho = radius();
        let rhop = radius();
        let area = area_2d(&RegionExpr::intersect(
            RegionExpr::leaf(build_strips_2d(q, &rho).unwrap()),
            RegionExpr::leaf(build_strips_2d(qp, &rhop).unwrap()),
        ));
        assert_eq!(
            area,
            rat(4, 1) * &rho * &rhop,
            "q = {q:?}, q' = {qp:?}, rho = {rho}, rho' = {rhop}"
        );
        done += 1;
    }

    // collinear pair: pushforward gives 1/10, not the product 1/25
    let rho = rat(1, 10);
    let collinear = area_2d(&RegionExpr::intersect(
        RegionExpr::leaf(build_strips_2d([1, -2], &rho).unwrap()),
        RegionExpr::leaf(build_strips_2d([2, -4], &rho).unwrap()),
    ));
    assert_eq!(collinear, rat(1, 10));
    assert_ne!(collinear, rat(1, 25));
    pass(2, "200 independent pairs at 4*rho*rho'; collinear pair at 1/10", t);
}

/// Criterion 3: |Phi(N) - 3N^2/pi^2| / (N ln N) < 1 at N = 10^2, 10^3, 10^4.
#[test]
fn criterion_03_totient_summatory() {
    let t = Instant::now();
    let pi2 = pi_squared_enclosure(96);
    for n in [100u64, 1_000, 10_000] {
        let phi = rat_u64(totient_sum(n).unwrap());
        let n_sq = rat_u64(n) * rat_u64(n);
        let main = pi2.recip_pos().scale(&(rat(3, 1) * n_sq));
        // the largest the numerator can be, over the pi^2 bracket
        let diff_hi = (&phi - &main.lo).abs().max((&phi - &main.hi).abs());
        let ln_n = ln_enclosure(&rat_u64(n), 96).unwrap();
        let bound = ln_n.scale(&rat_u64(n));
        assert!(
            diff_hi < bound.lo,
            "N = {n}: |Phi - 3N^2/pi^2| not below N ln N"
        );
    }
    pass(3, "totient summatory error below N ln N at 10^2..10^4", t);
}

/// Criterion 4: shell counts match enumeration for k <= 500 and equal
/// 4 phi(k) for k >= 2.
#[test]
fn criterion_04_shell_counts() {
    let t = Instant::now();
    for k in 1..=500u64 {
        let card = shell_cardinality(2, k).unwrap();
        let listed = primitive_shell(2, k).unwrap().len() as u64;
        assert_eq!(card, listed, "k = {k}");
        if k >= 2 {
            assert_eq!(card, 4 * totient(k).unwrap(), "k = {k}");
        }
    }
    pass(4, "shell cardinalities equal enumeration and 4*phi(k)", t);
}

/// Criterion 5: 1000 random rational alpha pass the Dirichlet inequality
/// exactly at N = 10 and N = 100.
#[test]
fn criterion_05_dirichlet() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
    for _ in 0..1000 {
        let den = rng.gen_range(1u64..=1_000_000);
        let num = rng.gen_range(0..=den);
        let alpha = rat_u64(num) / rat_u64(den);
        for n in [10u64, 100] {
            let (p, q) = dirichlet_approx(&alpha, n).unwrap();
            assert!(q >= BigInt::one() && q <= BigInt::from(n));
            let err = (&alpha - Rational::new(p, q.clone())).abs();
            let bound = Rational::new(BigInt::one(), q * BigInt::from(n + 1));
            assert!(err <= bound, "alpha = {alpha}, N = {n}");
        }
    }
    pass(5, "1000 random alpha satisfy |alpha - p/q| <= 1/(q(N+1))", t);
}

/// Criterion 6: with psi(q) = 1/(2 sqrt q) as a table, the count over
/// q <= 10^6 stays within 10% of 2 sum psi for 20 random alpha.
#[test]
fn criterion_06_counting_asymptotic() {
    let t = Instant::now();
    let n = 1_000_000u64;
    let table = ApproximationFunction::inv_two_sqrt_table(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC6);
    for i in 0..20 {
        // denominators near 2^64
        let den = u64::MAX - rng.gen_range(0..1_000_000);
        let num = rng.gen_range(1..den);
        let alpha = rat_u64(num) / rat_u64(den);
        let sc = count_solutions(&alpha, &table, n).unwrap();
        let asym = match &sc.asymptote {
            Evaluation::Exact(v) => v.clone(),
            Evaluation::Directed(_) => panic!("table sums are exact"),
        };
        let count = rat_u64(sc.count);
        assert!(
            rat(9, 10) * &asym <= count && count <= rat(11, 10) * &asym,
            "alpha #{i}: count {} vs asymptote {}",
            sc.count,
            asym.to_f64().unwrap()
        );
    }
    pass(6, "20 random alpha: count/(2 sum psi) within [0.9, 1.1] at N = 10^6", t);
}

/// Criterion 7: the divergence-case union measures grow strictly along the
/// ladder and start at 1/2, 5/8; the convergence-case tail bound is 2/N and
/// really dominates the tail.
#[test]
fn criterion_07_khintchine_trend() {
    let t = Instant::now();
    let psi = ApproximationFunction::scaled_reciprocal(rat(1, 4)).unwrap();
    let ladder = union_growth_ladder(&psi, &[1, 2, 5, 25, 100, 400]).unwrap();
    assert!(ladder.iter().all(|(_, um)| um.exact));
    assert_eq!(ladder[0].1.measure, rat(1, 2));
    assert_eq!(ladder[1].1.measure, rat(5, 8));
    for w in ladder.windows(2) {
        assert!(
            w[0].1.measure < w[1].1.measure,
            "union measure not strictly increasing at N = {}",
            w[1].0
        );
    }

    let conv = ApproximationFunction::power(rat(2, 1)).unwrap();
    for n in [10u64, 100] {
        let bound = convergence_tail_bound(&conv, n).unwrap();
        assert_eq!(bound, rat(2, n as i64), "tail bound is 2/N");
        // rigorous domination: sum_{N<q<=M} 2 q^-2 (upper-rounded) plus the
        // integral bound beyond M stays below 2/N
        let m = 10_000u64;
        let mut partial = Rational::zero();
        for q in (n + 1)..=m {
            partial += ceil_dyadic(&(rat(2, 1) * pow_i32(&rat_u64(q), -2)), 96);
        }
        assert!(partial + rat(2, m as i64) < bound);
    }
    pass(7, "union ladder 1/2, 5/8, strictly increasing; tail bound 2/N verified", t);
}

/// Criterion 8: the dyadic-digit family gives the Borel-Cantelli bound
/// N/(N+1) and quasi-independence constant exactly 1.
#[test]
fn criterion_08_borel_cantelli() {
    let t = Instant::now();
    for n in [10usize, 100] {
        let measures = vec![rat(1, 2); n];
        let mut pairs = vec![vec![rat(1, 4); n]; n];
        for (k, row) in pairs.iter_mut().enumerate() {
            row[k] = rat(1, 2);
        }
        assert_eq!(
            bc_lower_bound(&measures, &pairs).unwrap(),
            rat(n as i64, n as i64 + 1)
        );
    }
    let family = dyadic_family(10).unwrap();
    assert_eq!(quasi_independence_constant(&family).unwrap(), rat(1, 1));
    pass(8, "dyadic family: bc bound N/(N+1), quasi-independence constant 1", t);
}

/// Criterion 9: the ubiquity radius covers better at N = 1000 than at
/// N = 10; the constant-radius instance is exactly 1/2.
#[test]
fn criterion_09_ubiquity_defect() {
    let t = Instant::now();
    let rho = ApproximationFunction::ubiquity(1, 1).unwrap();
    let d10 = ubiquity_defect(DefectCase::Line, 10, &rho).unwrap();
    let d1000 = ubiquity_defect(DefectCase::Line, 1000, &rho).unwrap();
    // the radius is irrational: lower rounding recorded, defects are upper bounds
    assert!(!d10.exact && !d1000.exact);
    assert!(
        d1000.defect < d10.defect,
        "defect(1000) = {} not below defect(10) = {}",
        d1000.defect.to_f64().unwrap(),
        d10.defect.to_f64().unwrap()
    );

    let const_rho = ApproximationFunction::constant_table(rat(1, 8), &[2]).unwrap();
    let d = ubiquity_defect(DefectCase::Line, 2, &const_rho).unwrap();
    assert!(d.exact);
    assert_eq!(d.defect, rat(1, 2));
    pass(9, "defect(1000) < defect(10) with recorded rounding; constant case 1/2", t);
}

fn critical_estimate_cached(v: i64) -> f64 {
    static V2: OnceLock<f64> = OnceLock::new();
    static V3: OnceLock<f64> = OnceLock::new();
    static V5: OnceLock<f64> = OnceLock::new();
    let cell = match v {
        2 => &V2,
        3 => &V3,
        5 => &V5,
        _ => panic!("uncached v"),
    };
    *cell.get_or_init(|| critical_exponent_estimate(&rat(v, 1), 1 << 12).unwrap())
}

/// Criterion 10: the bisection estimate is within 0.05 of 2/(v+1).
#[test]
fn criterion_10_critical_exponent() {
    let t = Instant::now();
    for v in [2i64, 3, 5] {
        let est = critical_estimate_cached(v);
        let target = 2.0 / (v as f64 + 1.0);
        assert!(
            (est - target).abs() <= 0.05,
            "v = {v}: estimate {est} vs {target}"
        );
    }
    pass(10, "critical exponent within 0.05 of 2/(v+1) for v in {2,3,5}", t);
}

/// Criterion 11: the box-counting slope is within 0.1 of 2/(v+1) and within
/// 0.1 of the bisection estimate.
#[test]
fn criterion_11_box_counting() {
    let t = Instant::now();
    let ladder: Vec<u64> = (6..=12).map(|j| 1u64 << j).collect();
    for v in [3i64, 5] {
        let run = box_counting_estimate(&rat(v, 1), &ladder).unwrap();
        let target = 2.0 / (v as f64 + 1.0);
        assert!(
            (run.slope - target).abs() <= 0.1,
            "v = {v}: slope {} vs {target}",
            run.slope
        );
        let critical = critical_estimate_cached(v);
        assert!(
            (run.slope - critical).abs() <= 0.1,
            "v = {v}: slope {} vs bisection {critical}",
            run.slope
        );
    }
    pass(11, "box-count slope within 0.1 of 2/(v+1) and of the bisection estimate", t);
}

/// Criterion 12: closed-form evaluators, exact.
#[test]
fn criterion_12_formula_evaluators() {
    let t = Instant::now();
    assert_eq!(jb_dimension(1, 1, &rat(3, 1)).unwrap(), rat(1, 2));
    assert_eq!(jb_dimension(2, 1, &rat(3, 1)).unwrap(), rat(7, 4));
    assert_eq!(jb_dimension(2, 1, &rat(1, 1)).unwrap(), rat(2, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC12);
    let mut checked = 0;
    while checked < 50 {
        let m = rng.gen_range(1u32..6);
        let n = rng.gen_range(1u32..6);
        let v = rat(rng.gen_range(1..60), rng.gen_range(1..10));
        if v <= rat(m as i64, n as i64) {
            continue;
        }
        let f = DimensionFormulae::new(m, n, v.clone()).unwrap();
        assert_eq!(
            f.lower_bound_dimension(),
            f.jb_dimension(),
            "(m-1)n + gamma n != jb at m={m}, n={n}, v={v}"
        );
        checked += 1;
    }
    pass(12, "jb_dimension values and 50 composition identities exact", t);
}

/// Builds one report per computational path; used by the determinism check.
fn representative_reports() -> Vec<String> {
    let mut out = Vec::new();
    let mut push = |rep: ExperimentReport| out.push(rep.to_json_string());

    let mut r = ExperimentReport::new("strip-area", 1);
    let rho = rat(3, 31);
    r.result("area", &area_2d(&RegionExpr::leaf(build_strips_2d([7, -3], &rho).unwrap())));
    push(r);

    let mut r = ExperimentReport::new("pair-area", 2);
    r.result(
        "area",
        &area_2d(&RegionExpr::intersect(
            RegionExpr::leaf(build_strips_2d([3, -4], &rat(1, 12)).unwrap()),
            RegionExpr::leaf(build_strips_2d([2, 7], &rat(1, 9)).unwrap()),
        )),
    );
    push(r);

    let mut r = ExperimentReport::new("totient", 3);
    r.result("phi_sum", &rat_u64(totient_sum(10_000).unwrap()));
    push(r);

    let mut r = ExperimentReport::new("shells", 4);
    r.result("card", &rat_u64(shell_cardinality(2, 360).unwrap()));
    push(r);

    let mut r = ExperimentReport::new("dirichlet", 5);
    let (p, q) = dirichlet_approx(&rat(355, 1130), 100).unwrap();
    r.result("p", &Rational::from_integer(p));
    r.result("q", &Rational::from_integer(q));
    push(r);

    let mut r = ExperimentReport::new("count", 6);
    let table = ApproximationFunction::inv_two_sqrt_table(20_000).unwrap();
    let sc = count_solutions(&(rat_u64(u64::MAX - 7) / rat_u64(u64::MAX)), &table, 20_000).unwrap();
    r.result("count", &rat_u64(sc.count));
    r.result_eval("asymptote", &sc.asymptote);
    push(r);

    let mut r = ExperimentReport::new("union", 7);
    let psi = ApproximationFunction::scaled_reciprocal(rat(1, 4)).unwrap();
    r.series(
        union_growth_ladder(&psi, &[1, 2, 5, 25, 100])
            .unwrap()
            .into_iter()
            .map(|(n, um)| (rat_u64(n), um.measure))
            .collect(),
    );
    push(r);

    let mut r = ExperimentReport::new("bc", 8);
    let family = dyadic_family(8).unwrap();
    r.result("const", &quasi_independence_constant(&family).unwrap());
    push(r);

    let mut r = ExperimentReport::new("defect", 9);
    let rho = ApproximationFunction::ubiquity(1, 1).unwrap();
    r.result("defect", &ubiquity_defect(DefectCase::Line, 100, &rho).unwrap().defect);
    push(r);

    let mut r = ExperimentReport::new("critical", 10);
    let est = critical_exponent_estimate(&rat(3, 1), 256).unwrap();
    r.result("estimate", &rat((est * 1e6).round() as i64, 1_000_000));
    push(r);

    let mut r = ExperimentReport::new("boxcount", 11);
    let run = box_counting_estimate(&rat(3, 1), &[16, 32, 64, 128]).unwrap();
    for p in &run.points {
        r.result(format!("boxes_{}", p.shell_q), &rat_u64(p.boxes));
    }
    push(r);

    let mut r = ExperimentReport::new("formulas", 12);
    r.result("jb", &jb_dimension(2, 1, &rat(3, 1)).unwrap());
    push(r);

    out
}

/// Criterion 13: byte-identical reports across 1-thread and 8-thread pools.
#[test]
fn criterion_13_determinism_across_threads() {
    let t = Instant::now();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(representative_reports);
    let eight = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(representative_reports);
    assert_eq!(one.len(), eight.len());
    for (a, b) in one.iter().zip(eight.iter()) {
        assert_eq!(a, b, "report bytes differ between 1 and 8 threads");
    }
    pass(13, "reports byte-identical across 1-thread and 8-thread runs", t);
}

//! Number-theoretic kernels: gcd/content of integer vectors, Möbius and
//! totient functions, divisor counts, the totient summatory function Φ(N),
//! and enumeration of primitive lattice shells.

use num_integer::Integer;

use crate::error::{Error, Result};

/// An integer vector `q ∈ Z^m` with its sup-norm, 1-norm, and content
/// (the gcd of the components). Primitive means content 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector {
    components: Vec<i64>,
}

impl LatticeVector {
    pub fn new(components: Vec<i64>) -> Self {
        LatticeVector { components }
    }

    pub fn components(&self) -> &[i64] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&c| c == 0)
    }

    /// Sup-norm `|q| = max |q_i|`.
    pub fn sup_norm(&self) -> u64 {
        self.components.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// 1-norm `|q|₁ = Σ |q_i|`.
    pub fn one_norm(&self) -> u64 {
        self.components.iter().map(|c| c.unsigned_abs()).sum()
    }

    /// Content `(q)`: the gcd of the components (0 for the zero vector).
    pub fn content(&self) -> u64 {
        self.components
            .iter()
            .fold(0u64, |g, &c| g.gcd(&c.unsigned_abs()))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// True when the two vectors are linearly dependent over the rationals.
    pub fn is_parallel(&self, other: &LatticeVector) -> bool {
        assert_eq!(self.dim(), other.dim());
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let cross = self.components[i] as i128 * other.components[j] as i128
                    - self.components[j] as i128 * other.components[i] as i128;
                if cross != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Prime factorization by trial division; fine for the single-query sizes
/// this crate meets (batch work goes through the sieve instead).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function: `(-1)^r` when `d` is a product of `r` distinct primes,
/// `0` when a squared prime divides `d`.
pub fn mobius(d: u64) -> Result<i8> {
    if d == 0 {
        return Err(Error::invalid("mobius is undefined at 0"));
    }
    let mut mu = 1i8;
    for (_, e) in factorize(d) {
        if e > 1 {
            return Ok(0);
        }
        mu = -mu;
    }
    Ok(mu)
}

/// Euler totient: the number of integers in `1..=k` coprime to `k`.
pub fn totient(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::invalid("totient is undefined at 0"));
    }
    let mut phi = k;
    for (p, _) in factorize(k) {
        phi = phi / p * (p - 1);
    }
    Ok(phi)
}

/// Number of divisors `d(k)`.
pub fn divisor_count(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::invalid("divisor count is undefined at 0"));
    }
    Ok(factorize(k).iter().map(|&(_, e)| e as u64 + 1).product())
}

/// Totients of `1..=n` by a linear sieve.
pub fn totient_sieve(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut phi = vec![0u32; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    if n >= 1 {
        phi[1] = 1;
    }
    for i in 2..=n {
        if phi[i] == 0 {
            primes.push(i);
            phi[i] = (i - 1) as u32;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u32;
                break;
            }
            phi[ip] = phi[i] * (p - 1) as u32;
        }
    }
    phi
}

/// Totient summatory function `Φ(N) = Σ_{k<=N} φ(k)`, sieve-based.
pub fn totient_sum(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("totient sum requires N >= 1"));
    }
    let phi = totient_sieve(n);
    Ok(phi[1..].iter().map(|&v| v as u64).sum())
}

/// Squarefree divisors of `k` with their Möbius values.
fn squarefree_divisors(k: u64) -> Vec<(u64, i8)> {
    let mut divs = vec![(1u64, 1i8)];
    for (p, _) in factorize(k) {
        let len = divs.len();
        for i in 0..len {
            let (d, mu) = divs[i];
            divs.push((d * p, -mu));
        }
    }
    divs
}

/// Number of `q ∈ Z^m` with `|q| = r` and `q_m >= 1` (no primitivity
/// condition): the difference of the box counts `(2r+1)^{m-1} r`.
fn half_sphere_count(m: usize, r: u64) -> u128 {
    if r == 0 {
        return 0;
    }
    let outer = (2 * r as u128 + 1).pow(m as u32 - 1) * r as u128;
    let inner = (2 * r as u128 - 1).pow(m as u32 - 1) * (r as u128 - 1);
    outer - inner
}

/// Cardinality of the primitive shell `S_k` in dimension `m` by Möbius
/// inversion over the divisors of `k`, without materializing the shell.
pub fn shell_cardinality(m: usize, k: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::invalid(
            "primitive shells require dimension m >= 2 (the hemisphere construction needs q_m >= 1)",
        ));
    }
    if k == 0 {
        return Err(Error::invalid("shell radius must be >= 1"));
    }
    let mut total: i128 = 0;
    for (d, mu) in squarefree_divisors(k) {
        total += mu as i128 * half_sphere_count(m, k / d) as i128;
    }
    u64::try_from(total).map_err(|_| Error::unsupported("shell cardinality overflows u64"))
}

/// All primitive `q ∈ Z^m` with `|q| = k` and `q_m >= 1`, in lexicographic
/// order. Walks only the faces of the sup-norm sphere: vectors are
/// enumerated by the first index at which `|q_i| = k` holds, with strictly
/// smaller absolute values before it.
pub fn primitive_shell(m: usize, k: u64) -> Result<Vec<LatticeVector>> {
    if m < 2 {
        return Err(Error::invalid(
            "primitive shells require dimension m >= 2 (the hemisphere construction needs q_m >= 1)",
        ));
    }
    if k == 0 {
        return Err(Error::invalid("shell radius must be >= 1"));
    }
    let k = i64::try_from(k).map_err(|_| Error::unsupported("shell radius too large"))?;
    let mut out = Vec::new();
    let mut current = vec![0i64; m];
    for first_extreme in 0..m {
        fill_face(m, k, first_extreme, 0, &mut current, &mut out);
    }
    out.sort();
    Ok(out.into_iter().map(LatticeVector::new).collect())
}

fn fill_face(
    m: usize,
    k: i64,
    first_extreme: usize,
    pos: usize,
    current: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if pos == m {
        let v = LatticeVector::new(current.clone());
        if v.is_primitive() {
            out.push(current.clone());
        }
        return;
    }
    let last = pos == m - 1;
    // Coordinates before the first extreme index stay strictly inside the
    // sphere; the extreme index takes exactly +/-k; later ones are free.
    let candidates: Vec<i64> = if pos == first_extreme {
        if last {
            vec![k] // q_m >= 1 rules out -k
        } else {
            vec![-k, k]
        }
    } else {
        let bound = if pos < first_extreme { k - 1 } else { k };
        let lo = if last { 1 } else { -bound };
        (lo..=bound).collect()
    };
    for c in candidates {
        current[pos] = c;
        fill_face(m, k, first_extreme, pos + 1, current, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mobius_small_values() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1); // three distinct primes
        assert_eq!(mobius(6).unwrap(), 1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn mobius_divisor_sum_is_indicator() {
        // sum_{d|k} mu(d) = [k = 1], checked against a sieve-built oracle.
        for k in 1u64..=100_000 {
            let s: i64 = squarefree_divisors(k)
                .into_iter()
                .filter(|&(d, _)| k % d == 0)
                .map(|(_, mu)| mu as i64)
                .sum();
            assert_eq!(s, i64::from(k == 1), "k = {k}");
        }
    }

    #[test]
    fn totient_values_and_formula() {
        assert_eq!(totient(1).unwrap(), 1);
        assert_eq!(totient(7).unwrap(), 6);
        assert_eq!(totient(10).unwrap(), 4); // {1,3,7,9}
        assert!(totient(0).is_err());
        // Mobius-sum formula equals direct coprime counting.
        for k in 1u64..=10_000 {
            let direct = (1..=k).filter(|j| j.gcd(&k) == 1).count() as u64;
            let viamobius: i64 = squarefree_divisors(k)
                .into_iter()
                .map(|(d, mu)| mu as i64 * (k / d) as i64)
                .sum();
            assert_eq!(totient(k).unwrap(), direct, "k = {k}");
            assert_eq!(viamobius as u64, direct, "k = {k}");
        }
    }

    #[test]
    fn totient_sum_matches_direct_summation() {
        assert_eq!(totient_sum(1).unwrap(), 1);
        assert_eq!(totient_sum(10).unwrap(), 32); // 1+1+2+2+4+2+6+4+6+4
        let direct: u64 = (1..=2000).map(|k| totient(k).unwrap()).sum();
        assert_eq!(totient_sum(2000).unwrap(), direct);
        // sieve agrees with per-element trial factorization
        let phi = totient_sieve(512);
        for k in 1..=512u64 {
            assert_eq!(phi[k as usize] as u64, totient(k).unwrap());
        }
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(13).unwrap(), 2);
        assert_eq!(divisor_count(12).unwrap(), 6); // {1,2,3,4,6,12}
        assert!(divisor_count(0).is_err());
    }

    #[test]
    fn shell_enumeration_small_cases() {
        let s = primitive_shell(2, 1).unwrap();
        let got: Vec<_> = s.iter().map(|v| v.components().to_vec()).collect();
        assert_eq!(got, vec![vec![-1, 1], vec![0, 1], vec![1, 1]]);

        let s = primitive_shell(2, 2).unwrap();
        let got: Vec<_> = s.iter().map(|v| v.components().to_vec()).collect();
        assert_eq!(got, vec![vec![-2, 1], vec![-1, 2], vec![1, 2], vec![2, 1]]);

        let s = primitive_shell(3, 1).unwrap();
        assert_eq!(s.len(), 9);
        for v in &s {
            assert_eq!(v.components()[2], 1);
            assert!(v.sup_norm() == 1);
        }

        assert!(primitive_shell(1, 5).is_err());
        assert!(primitive_shell(2, 0).is_err());
    }

    #[test]
    fn cardinality_matches_enumeration() {
        assert_eq!(shell_cardinality(2, 1).unwrap(), 3);
        assert_eq!(shell_cardinality(3, 1).unwrap(), 9);
        for m in [2usize, 3] {
            for k in 1..=100u64 {
                assert_eq!(
                    shell_cardinality(m, k).unwrap(),
                    primitive_shell(m, k).unwrap().len() as u64,
                    "m = {m}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn planar_shell_is_four_totients() {
        // Card S_k = 4 phi(k) for k >= 2 (and 3 = 4 phi(1) - 1 at k = 1),
        // the constant coming from the enumeration rather than the coarser
        // asymptotic bookkeeping.
        for k in 2..=500u64 {
            assert_eq!(shell_cardinality(2, k).unwrap(), 4 * totient(k).unwrap());
        }
        assert_eq!(shell_cardinality(2, 1).unwrap(), 4 * totient(1).unwrap() - 1);
    }

    #[test]
    fn shell_vectors_pairwise_linearly_independent() {
        let mut all: Vec<LatticeVector> = Vec::new();
        for k in 1..=12u64 {
            all.extend(primitive_shell(2, k).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
        for _ in 0..2000 {
            let i = rng.gen_range(0..all.len());
            let j = rng.gen_range(0..all.len());
            if i != j {
                assert!(!all[i].is_parallel(&all[j]), "{:?} {:?}", all[i], all[j]);
            }
        }
    }

    #[test]
    fn lattice_vector_norms_and_content() {
        let v = LatticeVector::new(vec![-6, 4]);
        assert_eq!(v.sup_norm(), 6);
        assert_eq!(v.one_norm(), 10);
        assert_eq!(v.content(), 2);
        assert!(!v.is_primitive());
        assert!(LatticeVector::new(vec![1, -2]).is_primitive());
        assert!(LatticeVector::new(vec![2, -4]).is_parallel(&LatticeVector::new(vec![1, -2])));
        assert!(!LatticeVector::new(vec![2, 5]).is_parallel(&LatticeVector::new(vec![1, -2])));
    }
}

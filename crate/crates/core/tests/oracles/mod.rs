//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigUint;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The unique `m < prod(moduli)` with the given residues, by scanning.
pub fn brute_crt(residues: &[u32], moduli: &[u32]) -> Option<u64> {
    let product: u64 = moduli.iter().map(|&p| p as u64).product();
    (0..product).find(|&m| {
        residues
            .iter()
            .zip(moduli)
            .all(|(&r, &p)| m % p as u64 == r as u64)
    })
}

/// Minimum distance of `m -> (m mod p_i)` over `[0, bound)`.
///
/// Two codewords `a < b` agree at `i` exactly when `p_i` divides `b - a`, so
/// the distance only depends on the difference and one pass over the
/// differences suffices.
pub fn min_distance_by_differences(moduli: &[u32], bound: u64) -> usize {
    (1..bound)
        .map(|d| moduli.iter().filter(|&&p| d % p as u64 != 0).count())
        .min()
        .unwrap_or(moduli.len())
}

/// Product of the `k` smallest values.
pub fn k_smallest_product(values: &[u32], k: usize) -> u64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.iter().take(k).map(|&x| x as u64).product()
}

/// Every pairwise-coprime assignment `2 <= p_i <= caps[i]`; returns the best
/// product of the `k` smallest and the lexicographically largest optimum.
pub fn enumerate_moduli(caps: &[u32], k: usize) -> Option<(u64, Vec<u32>)> {
    fn rec(caps: &[u32], k: usize, cur: &mut Vec<u32>, best: &mut Option<(u64, Vec<u32>)>) {
        if cur.len() == caps.len() {
            let v = k_smallest_product(cur, k);
            let better = match best {
                None => true,
                Some((b, p)) => v > *b || (v == *b && cur.as_slice() > p.as_slice()),
            };
            if better {
                *best = Some((v, cur.clone()));
            }
            return;
        }
        for p in 2..=caps[cur.len()] {
            if cur.iter().all(|&q| gcd(p as u64, q as u64) == 1) {
                cur.push(p);
                rec(caps, k, cur, best);
                cur.pop();
            }
        }
    }
    let mut best = None;
    rec(caps, k, &mut Vec::new(), &mut best);
    best
}

/// Largest clique by enumerating every vertex subset; the lexicographically
/// smallest sorted vertex list wins among equal sizes.
pub fn brute_max_clique(n: usize, adj: &[u32]) -> Vec<usize> {
    let mut is_clique = vec![false; 1 << n];
    is_clique[0] = true;
    let mut best: Vec<usize> = Vec::new();
    for s in 1u32..(1 << n) {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        is_clique[s as usize] = is_clique[rest as usize] && rest & !adj[low] == 0;
        if is_clique[s as usize] {
            let v: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
            if v.len() > best.len() || (v.len() == best.len() && v < best) {
                best = v;
            }
        }
    }
    best
}

/// Kendall rank correlation (tau-a) between two equally long sequences.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let s = (a[i] - a[j]) * (b[i] - b[j]);
            if s > 0.0 {
                concordant += 1;
            } else if s < 0.0 {
                discordant += 1;
            }
        }
    }
    (concordant - discordant) as f64 / (n * (n - 1) / 2) as f64
}

/// Central finite difference of `f` along coordinate `i`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut up = x.to_vec();
    let mut down = x.to_vec();
    up[i] += h;
    down[i] -= h;
    (f(&up) - f(&down)) / (2.0 * h)
}

/// `log2(prod_c N_c!)` from the exact big-integer product.
pub fn exact_log2_factorial_product(counts: &[usize]) -> f64 {
    let mut product = BigUint::from(1u32);
    for &n in counts {
        for i in 2..=n {
            product *= BigUint::from(i);
        }
    }
    let bits = product.bits();
    if bits <= 53 {
        let v: u64 = product.try_into().expect("fits");
        return (v as f64).log2();
    }
    let shift = bits - 53;
    let top: u64 = (&product >> shift).try_into().expect("53 bits");
    (top as f64).log2() + shift as f64
}

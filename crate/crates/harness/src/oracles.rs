//! Brute-force references, kept independent of the library code paths.

/// Largest partial quotient of a/q (0 < a < q) by plain Euclidean
/// division; the last quotient is ≥ 2 so this is the canonical expansion.
pub fn brute_max_quotient(a: u64, q: u64) -> u64 {
    let (mut x, mut y) = (q, a);
    let mut best = 0;
    while y != 0 {
        best = best.max(x / y);
        (x, y) = (y, x % y);
    }
    best
}

/// {a ∈ 1..p : every partial quotient of a/p is ≤ M}.
pub fn brute_zaremba(p: u64, m: u64) -> Vec<u32> {
    (1..p)
        .filter(|&a| brute_max_quotient(a, p) <= m)
        .map(|a| a as u32)
        .collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Compares |a/q − u/v| with 1/(v·v') in integers: |a·v − u·q|·v' against q.
pub fn convergent_gap(a: u64, q: u64, u: u64, v: u64, v_next: u64) -> std::cmp::Ordering {
    let lhs = (a as i128 * v as i128 - u as i128 * q as i128).unsigned_abs();
    (lhs * (v_next as u128)).cmp(&(q as u128))
}

/// |a/q − u/v| < 1/(v·v').
pub fn convergent_gap_holds(a: u64, q: u64, u: u64, v: u64, v_next: u64) -> bool {
    convergent_gap(a, q, u, v, v_next).is_lt()
}

/// Count of (x, y) ∈ A × A with xy ≡ ρ.
pub fn brute_pair_count(p: u32, a: &[u32], rho: u32) -> usize {
    let mut n = 0;
    for &x in a {
        for &y in a {
            if (x as u64 * y as u64) % p as u64 == rho as u64 {
                n += 1;
            }
        }
    }
    n
}

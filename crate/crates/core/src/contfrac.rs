//! Regular continued fractions of rationals in [0, 1], their convergents,
//! and the reversal identity linking a/p to the inverse of a mod p.
//!
//! Expansions are always stored canonically: the last partial quotient is at
//! least 2, except for 1/1 = [0; 1]. The value 0/1 is the empty expansion.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational in lowest terms.
pub type Rational<T = u64> = Ratio<T>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CfExpansion<T = u64> {
    quotients: Vec<T>,
}

impl<T: Integer + Clone> CfExpansion<T> {
    /// Builds an expansion from partial quotients `b₁, …, b_s` (all ≥ 1),
    /// folding a trailing `…, b, 1` into `…, b + 1`.
    pub fn from_quotients(mut quotients: Vec<T>) -> Result<Self> {
        if quotients.iter().any(|b| b < &T::one()) {
            return Err(Error::InvalidParameter("partial quotients must be positive".into()));
        }
        while quotients.len() >= 2 && quotients.last() == Some(&T::one()) {
            quotients.pop();
            if let Some(last) = quotients.last_mut() {
                *last = last.clone() + T::one();
            }
        }
        Ok(Self { quotients })
    }

    pub fn quotients(&self) -> &[T] {
        &self.quotients
    }

    /// s(a), the number of partial quotients.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn max_quotient(&self) -> T {
        self.quotients.iter().cloned().max().unwrap_or_else(T::zero)
    }

    pub fn is_canonical(&self) -> bool {
        match self.quotients.as_slice() {
            [] => true,
            [only] => only >= &T::one(),
            [.., last] => last > &T::one(),
        }
    }
}

/// Euclidean expansion of a/q, 0 ≤ a ≤ q, gcd(a, q) = 1.
pub fn cf_expand<T: Integer + Clone>(a: T, q: T) -> Result<CfExpansion<T>> {
    if q <= T::zero() || a < T::zero() {
        return Err(Error::InvalidParameter("need 0 <= a and q >= 1".into()));
    }
    if a > q {
        return Err(Error::InvalidParameter("need a <= q".into()));
    }
    if !a.gcd(&q).is_one() {
        return Err(Error::InvalidParameter("a and q must be coprime".into()));
    }
    let (mut num, mut den) = (a, q);
    let mut quotients = Vec::new();
    while !num.is_zero() {
        let (b, r) = den.div_rem(&num);
        quotients.push(b);
        den = num;
        num = r;
    }
    Ok(CfExpansion { quotients })
}

/// u64 convenience with a typed coprimality error.
pub fn cf_expand_u64(a: u64, q: u64) -> Result<CfExpansion<u64>> {
    if q >= 1 && a <= q && a.gcd(&q) != 1 {
        return Err(Error::NotCoprime(a, q));
    }
    if a > q {
        return Err(Error::OutOfUnitInterval(a, q));
    }
    cf_expand(a, q)
}

/// Folds [0; b₁, …, b_s] into an exact rational.
pub fn cf_value<T: Integer + Clone>(cf: &CfExpansion<T>) -> Rational<T> {
    let (mut num, mut den) = (T::zero(), T::one());
    for b in cf.quotients.iter().rev() {
        // 1 / (b + num/den) = den / (b·den + num)
        let next_den = b.clone() * den.clone() + num;
        num = den;
        den = next_den;
    }
    Ratio::new_raw(num, den)
}

/// Convergent numerators u₀…u_s and denominators v₀…v_s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable<T = u64> {
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Integer + Clone> ConvergentTable<T> {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn convergent(&self, k: usize) -> Rational<T> {
        Ratio::new_raw(self.u[k].clone(), self.v[k].clone())
    }

    pub fn last(&self) -> Rational<T> {
        self.convergent(self.len() - 1)
    }
}

pub fn convergents<T: Integer + Clone>(cf: &CfExpansion<T>) -> ConvergentTable<T> {
    let s = cf.len();
    let mut u = Vec::with_capacity(s + 1);
    let mut v = Vec::with_capacity(s + 1);
    u.push(T::zero());
    v.push(T::one());
    if let Some(b1) = cf.quotients.first() {
        u.push(T::one());
        v.push(b1.clone());
    }
    for k in 1..s {
        let b = cf.quotients[k].clone();
        let uk = b.clone() * u[k].clone() + u[k - 1].clone();
        let vk = b * v[k].clone() + v[k - 1].clone();
        u.push(uk);
        v.push(vk);
    }
    ConvergentTable { u, v }
}

/// Largest partial quotient of the canonical expansion of a/q.
pub fn max_quotient(a: u64, q: u64) -> Result<u64> {
    Ok(cf_expand_u64(a, q)?.max_quotient())
}

/// Largest partial quotient of a/q with no validation and no allocation.
/// Requires gcd(a, q) = 1 and a ≤ q.
#[inline]
pub fn max_quotient_unchecked(mut a: u64, mut q: u64) -> u64 {
    let mut best = 0;
    while a != 0 {
        let b = q / a;
        let r = q - b * a;
        best = best.max(b);
        q = a;
        a = r;
    }
    best
}

/// How the reversed expansion of a/p relates to the inverse a* = a⁻¹ mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MirrorVerdict {
    /// The reversal equals a*/p.
    Direct,
    /// The reversal equals (p − a*)/p.
    MirrorOfNegative,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MirrorReport {
    pub a: u64,
    pub p: u64,
    pub a_star: u64,
    /// s(a) for the canonical expansion of a/p.
    pub len: usize,
    /// The reversed quotient list prescribed for this parity of s.
    pub mirrored: Vec<u64>,
    pub mirrored_value: Rational<u64>,
    pub verdict: MirrorVerdict,
}

/// Applies the parity-dependent reversal rule to a/p:
/// s even → [0; b_s, …, b₁]; s odd → [0; 1, b_s − 1, b_{s−1}, …, b₁];
/// then reports which of a*/p or (p − a*)/p it reproduces.
pub fn mirror_inverse(a: u64, p: u64) -> Result<MirrorReport> {
    if p < 2 || !crate::modp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a == 0 || a >= p {
        return Err(Error::InvalidParameter(format!("need 1 <= a <= p-1, got {a}")));
    }
    let cf = cf_expand(a, p)?;
    let b = cf.quotients();
    let s = b.len();
    let mirrored: Vec<u64> = if s % 2 == 0 {
        b.iter().rev().copied().collect()
    } else {
        let mut m = vec![1, b[s - 1] - 1];
        m.extend(b[..s - 1].iter().rev().copied());
        m
    };
    let mirrored_value = cf_value(&CfExpansion {
        quotients: mirrored.clone(),
    });
    let a_star = mod_inverse(a, p);
    let target = |x: u64| Ratio::new(x, p);
    let verdict = if mirrored_value == target(a_star) {
        MirrorVerdict::Direct
    } else if mirrored_value == target(p - a_star) {
        MirrorVerdict::MirrorOfNegative
    } else {
        MirrorVerdict::Neither
    };
    Ok(MirrorReport {
        a,
        p,
        a_star,
        len: s,
        mirrored,
        mirrored_value,
        verdict,
    })
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let e = num_integer::Integer::extended_gcd(&(a as i64), &(p as i64));
    e.x.rem_euclid(p as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn q(xs: &[u64]) -> Vec<u64> {
        xs.to_vec()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(cf_expand(1u64, 2).unwrap().quotients(), &q(&[2])[..]);
        assert_eq!(cf_expand(5u64, 7).unwrap().quotients(), &q(&[1, 2, 2])[..]);
        assert_eq!(cf_expand(8u64, 13).unwrap().quotients(), &q(&[1, 1, 1, 1, 2])[..]);
        assert!(cf_expand(0u64, 1).unwrap().is_empty());
        assert_eq!(cf_expand(1u64, 1).unwrap().quotients(), &q(&[1])[..]);
    }

    #[test]
    fn expand_errors() {
        assert_eq!(cf_expand_u64(2, 4), Err(Error::NotCoprime(2, 4)));
        assert_eq!(cf_expand_u64(5, 3), Err(Error::OutOfUnitInterval(5, 3)));
        assert!(cf_expand_u64(0, 5).is_err());
        assert!(cf_expand(3i64, 0).is_err());
    }

    #[test]
    fn value_examples() {
        let v = |xs: &[u64]| cf_value(&CfExpansion::from_quotients(xs.to_vec()).unwrap());
        assert_eq!(v(&[2]), Ratio::new(1, 2));
        assert_eq!(v(&[1, 2, 2]), Ratio::new(5, 7));
        assert_eq!(v(&[2, 3]), Ratio::new(3, 7));
        assert_eq!(v(&[]), Ratio::new(0, 1));
        assert_eq!(v(&[1]), Ratio::new(1, 1));
    }

    #[test]
    fn from_quotients_folds_trailing_one() {
        let cf = CfExpansion::from_quotients(vec![2u64, 3, 1]).unwrap();
        assert_eq!(cf.quotients(), &[2, 4]);
        assert!(cf.is_canonical());
        assert_eq!(cf_value(&cf), Ratio::new(4, 9));
        assert!(CfExpansion::from_quotients(vec![2u64, 0]).is_err());
    }

    #[test]
    fn convergent_examples() {
        let t = convergents(&cf_expand(1u64, 2).unwrap());
        assert_eq!((t.u.clone(), t.v.clone()), (vec![0, 1], vec![1, 2]));
        let t = convergents(&cf_expand(5u64, 7).unwrap());
        assert_eq!(t.u, vec![0, 1, 2, 5]);
        assert_eq!(t.v, vec![1, 1, 3, 7]);
        let t = convergents(&cf_expand(8u64, 13).unwrap());
        assert_eq!(*t.v.last().unwrap(), 13);
    }

    #[test]
    fn max_quotient_examples() {
        assert_eq!(max_quotient(1, 7).unwrap(), 7);
        assert_eq!(max_quotient(5, 7).unwrap(), 2);
        assert_eq!(max_quotient(1, 2).unwrap(), 2);
        for a in 1..50u64 {
            assert_eq!(max_quotient_unchecked(a, 53), max_quotient(a, 53).unwrap());
        }
    }

    #[test]
    fn bigint_expansion_round_trips() {
        let a = BigUint::parse_bytes(b"123456789012345678901234567891", 10).unwrap();
        let qd = BigUint::parse_bytes(b"987654321098765432109876543211", 10).unwrap();
        let g = num_integer::Integer::gcd(&a, &qd);
        let (a, qd) = (a / &g, qd / &g);
        let cf = cf_expand(a.clone(), qd.clone()).unwrap();
        assert_eq!(cf_value(&cf), Ratio::new(a, qd));
        assert!(cf.is_canonical());
    }

    #[test]
    fn mirror_small_cases() {
        let r = mirror_inverse(1, 7).unwrap();
        assert_eq!(r.a_star, 1);
        let r = mirror_inverse(2, 7).unwrap();
        assert_eq!(r.a_star, 4);
        assert_eq!(r.mirrored, vec![2, 3]);
        assert_eq!(r.mirrored_value, Ratio::new(3, 7));
        assert_eq!(r.verdict, MirrorVerdict::MirrorOfNegative);
        assert!(mirror_inverse(0, 7).is_err());
        assert!(mirror_inverse(3, 8).is_err());
    }

    #[test]
    fn mirror_table_p101_is_uniform() {
        // Both parity classes reproduce (p - a*)/p, never a*/p.
        let mut counts = std::collections::HashMap::new();
        for a in 1..101 {
            let r = mirror_inverse(a, 101).unwrap();
            *counts.entry((r.len % 2, r.verdict)).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 2);
        assert!(counts.keys().all(|(_, v)| *v == MirrorVerdict::MirrorOfNegative));
        assert_eq!(counts.values().sum::<i32>(), 100);
    }

    #[test]
    fn mirror_uniform_across_primes() {
        for p in [5u64, 7, 11, 13, 97, 499] {
            for a in 1..p {
                assert_eq!(
                    mirror_inverse(a, p).unwrap().verdict,
                    MirrorVerdict::MirrorOfNegative,
                    "a = {a}, p = {p}"
                );
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn determinant_identity(a in 1u64..5000, qd in 2u64..5000) {
                prop_assume!(a < qd && num_integer::Integer::gcd(&a, &qd) == 1);
                let t = convergents(&cf_expand(a, qd).unwrap());
                for k in 0..t.len() - 1 {
                    let lhs = t.u[k + 1] as i128 * t.v[k] as i128 - t.u[k] as i128 * t.v[k + 1] as i128;
                    prop_assert_eq!(lhs.abs(), 1);
                }
            }

            #[test]
            fn quotient_list_round_trip(bs in proptest::collection::vec(1u64..20, 1..12)) {
                let cf = CfExpansion::from_quotients(bs).unwrap();
                let r = cf_value(&cf);
                let back = cf_expand(*r.numer(), *r.denom()).unwrap();
                prop_assert_eq!(back, cf);
            }
        }
    }
}

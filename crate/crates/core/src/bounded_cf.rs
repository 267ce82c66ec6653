//! Sets of rationals and residues with bounded partial quotients:
//! F_M(Q), Z_M(p), the half-convergent set A_M(p), the floored set 𝒜_β,
//! the interval ℬ_β, and Hensley-dimension estimates.

use std::f64::consts::PI;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::contfrac::{max_quotient_unchecked, Rational};
use crate::error::{Error, Result};
use crate::modp::{is_prime, PrimeContext, ResidueSet};
use crate::stats::{power_law_fit, LinearFit};

/// F_M(Q): rationals u/v ∈ [0, 1] in lowest terms with v ≤ Q whose
/// canonical partial quotients are all ≤ M, listed in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmqSet {
    pub m: u64,
    pub q: u64,
    pub members: Vec<Rational>,
}

impl FmqSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Walks the continued-fraction tree: appends quotients 1..=M while the
/// denominator stays ≤ Q and records each node whose last quotient is ≥ 2.
fn walk_fmq(m: u64, q: u64, mut visit: impl FnMut(u64, u64)) {
    // (u_{k-1}, v_{k-1}, u_k, v_k), starting from u_{-1}/v_{-1} = 1/0, u_0/v_0 = 0/1
    let mut stack = vec![(1u64, 0u64, 0u64, 1u64)];
    while let Some((up, vp, u, v)) = stack.pop() {
        for b in 1..=m {
            let nv = b * v + vp;
            if nv > q {
                break;
            }
            let nu = b * u + up;
            if b >= 2 {
                visit(nu, nv);
            }
            stack.push((u, v, nu, nv));
        }
    }
}

pub fn enumerate_fmq(m: u64, q: u64) -> FmqSet {
    let mut members = vec![Ratio::new_raw(0, 1), Ratio::new_raw(1, 1)];
    if m >= 1 && q >= 1 {
        walk_fmq(m, q, |u, v| members.push(Ratio::new_raw(u, v)));
    }
    members.sort_unstable();
    FmqSet { m, q, members }
}

/// |F_M(Q)| without materializing the members.
pub fn fmq_count(m: u64, q: u64) -> u64 {
    let mut n = 2;
    walk_fmq(m, q, |_, _| n += 1);
    n
}

/// Z_M(p) = {a ∈ 1..p−1 : every partial quotient of a/p is ≤ M}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZarembaSet {
    pub p: u64,
    pub m: u64,
    pub members: ResidueSet,
}

fn check_prime(p: u64) -> Result<()> {
    if p < 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p > u32::MAX as u64 {
        return Err(Error::ModulusTooLarge(p));
    }
    Ok(())
}

pub fn zaremba_set(p: u64, m: u64) -> Result<ZarembaSet> {
    check_prime(p)?;
    if m == 0 {
        return Err(Error::InvalidParameter("M must be >= 1".into()));
    }
    let members: Vec<u32> = (1..p)
        .into_par_iter()
        .filter(|&a| max_quotient_unchecked(a, p) <= m)
        .map(|a| a as u32)
        .collect();
    Ok(ZarembaSet {
        p,
        m,
        members: ResidueSet::from_residues(p as u32, members),
    })
}

/// |Z_M(p)| for several bounds at once (one Euclid run per residue).
pub fn zaremba_counts(p: u64, bounds: &[u64]) -> Result<Vec<u64>> {
    check_prime(p)?;
    let counts = (1..p)
        .into_par_iter()
        .fold(
            || vec![0u64; bounds.len()],
            |mut acc, a| {
                let mq = max_quotient_unchecked(a, p);
                for (slot, &m) in acc.iter_mut().zip(bounds) {
                    if mq <= m {
                        *slot += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; bounds.len()],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    Ok(counts)
}

/// Which partial quotients of a/p the half-convergent condition constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfConvergentRule {
    /// b_k ≤ M for every k with v_k ≤ √p.
    Literal,
    /// b_{k+1} ≤ M for every k ≥ 0 with v_k ≤ √p; this also bounds the
    /// quotient that carries the denominators past √p.
    NextQuotient,
}

/// A_M(p) under the chosen rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfConvergentSet {
    pub p: u64,
    pub m: u64,
    pub rule: HalfConvergentRule,
    pub members: ResidueSet,
}

/// Tests the half-convergent condition for a single residue.
pub fn half_convergent_member(a: u64, p: u64, m: u64, rule: HalfConvergentRule) -> bool {
    let (mut num, mut den) = (a, p);
    // v_{k-1}, v_k
    let (mut v_prev, mut v) = (0u64, 1u64);
    while num != 0 {
        let b = den / num;
        let r = den - b * num;
        let v_next = b * v + v_prev;
        let constrained = match rule {
            HalfConvergentRule::Literal => (v_next as u128).pow(2) <= p as u128,
            HalfConvergentRule::NextQuotient => (v as u128).pow(2) <= p as u128,
        };
        if constrained && b > m {
            return false;
        }
        if (v as u128).pow(2) > p as u128 {
            // every later denominator also exceeds √p
            break;
        }
        v_prev = v;
        v = v_next;
        den = num;
        num = r;
    }
    true
}

pub fn half_convergent_set(p: u64, m: u64) -> Result<HalfConvergentSet> {
    half_convergent_set_with(p, m, HalfConvergentRule::Literal)
}

pub fn half_convergent_set_with(p: u64, m: u64, rule: HalfConvergentRule) -> Result<HalfConvergentSet> {
    check_prime(p)?;
    let members: Vec<u32> = (1..p)
        .into_par_iter()
        .filter(|&a| half_convergent_member(a, p, m, rule))
        .map(|a| a as u32)
        .collect();
    Ok(HalfConvergentSet {
        p,
        m,
        rule,
        members: ResidueSet::from_residues(p as u32, members),
    })
}

/// First a ∈ A with a⁻¹ ∉ A, if any.
pub fn inverse_closure_counterexample(set: &ResidueSet, ctx: &PrimeContext) -> Option<u32> {
    set.iter().find(|&a| ctx.inv(a).is_some_and(|ai| !set.contains(ai)))
}

/// ⌊p^β⌋, the denominator bound used for F_M(p^β).
pub fn beta_bound(p: u64, beta: f64) -> Result<u64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::BetaOutOfRange(beta));
    }
    Ok((p as f64).powf(beta).floor() as u64)
}

/// 𝒜_β = {⌊p·u/v⌋ : u/v ∈ F_M(⌊p^β⌋)} as integers in [0, p].
#[derive(Debug, Clone, PartialEq)]
pub struct FlooredSet {
    pub p: u64,
    pub m: u64,
    pub beta: f64,
    pub q_bound: u64,
    /// |F_M(⌊p^β⌋)|.
    pub source_len: usize,
    /// Distinct integer images, sorted; `p` appears as the image of 1/1.
    pub values: Vec<u64>,
}

impl FlooredSet {
    pub fn is_injective(&self) -> bool {
        self.values.len() == self.source_len
    }

    /// The images reduced mod p (0/1 and 1/1 both land on 0).
    pub fn residues(&self) -> ResidueSet {
        ResidueSet::from_values(self.p as u32, self.values.iter().map(|&v| v as i64))
    }

    /// Reduced images restricted to 1..p−1.
    pub fn nonzero_residues(&self) -> ResidueSet {
        self.residues().without_zero()
    }
}

pub fn floored_set(p: u64, m: u64, beta: f64) -> Result<FlooredSet> {
    check_prime(p)?;
    let q_bound = beta_bound(p, beta)?;
    let fmq = enumerate_fmq(m, q_bound);
    let mut values: Vec<u64> = fmq
        .members
        .iter()
        .map(|r| (p as u128 * *r.numer() as u128 / *r.denom() as u128) as u64)
        .collect();
    values.sort_unstable();
    values.dedup();
    Ok(FlooredSet {
        p,
        m,
        beta,
        q_bound,
        source_len: fmq.len(),
        values,
    })
}

/// ℬ_β = {0, ±1, …, ±r} with r = ⌊(M+1)² p^{1−2β} + 1⌋.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    pub radius: u64,
    pub members: ResidueSet,
}

impl IntervalSet {
    /// 2r + 1, the size as a set of integers.
    pub fn integer_len(&self) -> u64 {
        2 * self.radius + 1
    }
}

pub fn interval_radius(p: u64, m: u64, beta: f64) -> Result<u64> {
    beta_bound(p, beta)?;
    let m1 = (m + 1) as f64;
    Ok((m1 * m1 * (p as f64).powf(1.0 - 2.0 * beta) + 1.0).floor() as u64)
}

pub fn interval_set(p: u64, m: u64, beta: f64) -> Result<IntervalSet> {
    check_prime(p)?;
    let radius = interval_radius(p, m, beta)?;
    let len = (2 * radius + 1).min(p);
    let members = if len == p {
        ResidueSet::full(p as u32)
    } else {
        ResidueSet::interval(p as u32, -(radius as i64), len)
    };
    Ok(IntervalSet { radius, members })
}

/// Outcome of the covering check A ⊆ 𝒜_β + ℬ_β and its cardinality chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringReport {
    pub p: u64,
    pub m: u64,
    pub beta: f64,
    pub rule: HalfConvergentRule,
    pub a_len: usize,
    pub source_len: usize,
    pub floored_len: usize,
    pub floored_injective: bool,
    pub radius: u64,
    pub interval_len: u64,
    /// A ⊆ 𝒜_β + ℬ_β (mod p).
    pub inclusion: bool,
    pub counterexample: Option<u32>,
    pub counterexample_count: usize,
    /// Same inclusion with 𝒜_β restricted to 1..p−1.
    pub inclusion_nonzero: bool,
    pub sum_a_interval: usize,
    pub sum_floored_interval: usize,
    /// |A + ℬ_β| ≤ 3|𝒜_β + ℬ_β|.
    pub chain_first: bool,
    /// |A + ℬ_β| ≤ 3|𝒜_β||ℬ_β|.
    pub chain_total: bool,
}

impl CoveringReport {
    pub fn passed(&self) -> bool {
        self.floored_injective && self.inclusion && self.chain_total
    }
}

pub fn verify_covering(p: u64, m: u64, beta: f64) -> Result<CoveringReport> {
    verify_covering_with(p, m, beta, HalfConvergentRule::Literal)
}

pub fn verify_covering_with(p: u64, m: u64, beta: f64, rule: HalfConvergentRule) -> Result<CoveringReport> {
    let a = half_convergent_set_with(p, m, rule)?.members;
    let floored = floored_set(p, m, beta)?;
    let interval = interval_set(p, m, beta)?;
    let fl = floored.residues();
    let cover = fl.sumset(&interval.members)?;
    let missing: Vec<u32> = a.iter().filter(|&x| !cover.contains(x)).collect();
    let cover_nonzero = floored.nonzero_residues().sumset(&interval.members)?;
    let inclusion_nonzero = a.iter().all(|x| cover_nonzero.contains(x));
    let sum_a_interval = a.sumset(&interval.members)?.len();
    let sum_floored_interval = cover.len();
    let floored_len = floored.values.len();
    let interval_len = interval.integer_len();
    Ok(CoveringReport {
        p,
        m,
        beta,
        rule,
        a_len: a.len(),
        source_len: floored.source_len,
        floored_len,
        floored_injective: floored.is_injective(),
        radius: interval.radius,
        interval_len,
        inclusion: missing.is_empty(),
        counterexample: missing.first().copied(),
        counterexample_count: missing.len(),
        inclusion_nonzero,
        sum_a_interval,
        sum_floored_interval,
        chain_first: sum_a_interval <= 3 * sum_floored_interval,
        chain_total: sum_a_interval as u64 <= 3 * floored_len as u64 * interval_len,
    })
}

/// Hensley's asymptotic w_M and, when fitted, the regression exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub m: u64,
    /// Closed form, natural logarithm.
    pub w_hhd: f64,
    /// Closed form with log base 2 in the second-order term.
    pub w_hhd_base2: f64,
    pub w_fit: Option<f64>,
    pub fit: Option<LinearFit>,
    pub fit_range: Option<(u64, u64)>,
}

fn hhd(m: f64, log_m: f64) -> f64 {
    1.0 - 6.0 / (PI * PI) / m - 72.0 / PI.powi(4) * log_m / (m * m)
}

pub fn hensley_dimension(m: u64) -> DimensionEstimate {
    let mf = m as f64;
    DimensionEstimate {
        m,
        w_hhd: hhd(mf, mf.ln()),
        w_hhd_base2: hhd(mf, mf.log2()),
        w_fit: None,
        fit: None,
        fit_range: None,
    }
}

/// Geometric denominator grid over the two decades ending at `q_max`.
pub fn dimension_grid(q_max: u64) -> Vec<u64> {
    let lo = (q_max / 100).max(10);
    let points = 13;
    let mut grid: Vec<u64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            ((lo as f64) * (q_max as f64 / lo as f64).powf(t)).round() as u64
        })
        .filter(|&q| q >= 1 && q <= q_max)
        .collect();
    grid.dedup();
    grid
}

/// w_fit = slope/2 of log|F_M(Q)| against log Q.
pub fn empirical_dimension(m: u64, q_max: u64) -> Result<DimensionEstimate> {
    if m < 2 {
        return Err(Error::InvalidParameter("M must be >= 2".into()));
    }
    let grid = dimension_grid(q_max);
    if grid.len() < 3 || q_max < 100 {
        return Err(Error::DegenerateFit {
            needed: 3,
            got: if q_max < 100 { 0 } else { grid.len() },
        });
    }
    let counts: Vec<f64> = grid.par_iter().map(|&q| fmq_count(m, q) as f64).collect();
    let xs: Vec<f64> = grid.iter().map(|&q| q as f64).collect();
    let fit = power_law_fit(&xs, &counts)?;
    let mut est = hensley_dimension(m);
    est.w_fit = Some(fit.slope / 2.0);
    est.fit = Some(fit);
    est.fit_range = Some((grid[0], *grid.last().unwrap()));
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::max_quotient;
    use num_integer::Integer;

    fn brute_fmq(m: u64, q: u64) -> Vec<Rational> {
        let mut out = vec![Ratio::new_raw(0, 1), Ratio::new_raw(1, 1)];
        for v in 2..=q {
            for u in 1..v {
                if u.gcd(&v) == 1 && max_quotient(u, v).unwrap() <= m {
                    out.push(Ratio::new_raw(u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn r(u: u64, v: u64) -> Rational {
        Ratio::new_raw(u, v)
    }

    #[test]
    fn fmq_small_examples() {
        assert_eq!(enumerate_fmq(1, 3).members, vec![r(0, 1), r(1, 1)]);
        assert_eq!(enumerate_fmq(2, 3).members, vec![r(0, 1), r(1, 2), r(2, 3), r(1, 1)]);
        assert_eq!(fmq_count(2, 3), 4);
    }

    #[test]
    fn fmq_farey_count_when_bound_is_vacuous() {
        let phi = |n: u64| (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
        for q in 1..40 {
            let farey: u64 = (1..=q).map(phi).sum::<u64>() + 1;
            assert_eq!(fmq_count(q, q), farey);
            assert_eq!(fmq_count(q + 5, q), farey);
        }
    }

    #[test]
    fn fmq_matches_brute_force() {
        for m in 1..=6 {
            for q in [1u64, 2, 7, 30, 101, 500] {
                assert_eq!(enumerate_fmq(m, q).members, brute_fmq(m, q), "M={m} Q={q}");
            }
        }
    }

    #[test]
    fn fmq_monotone() {
        for m in 1..5 {
            for q in 1..60 {
                let small = enumerate_fmq(m, q).members;
                let wider = enumerate_fmq(m + 1, q).members;
                let longer = enumerate_fmq(m, q + 1).members;
                assert!(small.iter().all(|x| wider.binary_search(x).is_ok()));
                assert!(small.iter().all(|x| longer.binary_search(x).is_ok()));
            }
        }
    }

    #[test]
    fn zaremba_examples() {
        assert_eq!(zaremba_set(7, 2).unwrap().members.as_slice(), &[5]);
        assert_eq!(zaremba_set(7, 3).unwrap().members.as_slice(), &[2, 3, 4, 5]);
        assert_eq!(zaremba_set(7, 7).unwrap().members.len(), 6);
        assert!(zaremba_set(9, 2).is_err());
        assert!(zaremba_set(7, 0).is_err());
        assert_eq!(zaremba_counts(7, &[2, 3, 7]).unwrap(), vec![1, 4, 6]);
    }

    #[test]
    fn zaremba_monotone_in_m() {
        for p in [101u64, 211] {
            let mut prev = 0;
            for m in 1..=p {
                let n = zaremba_set(p, m).unwrap().members.len();
                assert!(n >= prev);
                prev = n;
            }
            assert_eq!(prev, p as usize - 1);
        }
    }

    #[test]
    fn half_convergent_p7() {
        // √7 ≈ 2.65: only quotients reaching a denominator ≤ 2 are constrained.
        // a: expansion, prefix denominators
        // 1: [7]       v₁=7        free        -> member
        // 2: [3,2]     v₁=3        free        -> member
        // 3: [2,3]     v₁=2, b₁=2  ok          -> member
        // 4: [1,1,3]   v₁=1, v₂=2  ok          -> member
        // 5: [1,2,2]   v₁=1, v₂=3  ok          -> member
        // 6: [1,6]     v₁=1        ok, v₂=7    -> member
        let a = half_convergent_set(7, 2).unwrap();
        assert_eq!(a.members.as_slice(), &[1, 2, 3, 4, 5, 6]);
        // NextQuotient also bounds the quotient leaving √7: 3 = [2,3] and
        // 4 = [1,1,3] drop out, as do 1, 2 and 6 through b₁ or b₂.
        let strict = half_convergent_set_with(7, 2, HalfConvergentRule::NextQuotient).unwrap();
        assert_eq!(strict.members.as_slice(), &[5]);
        let a1 = half_convergent_set(7, 1).unwrap();
        assert_eq!(a1.members.as_slice(), &[1, 2, 4, 5, 6]);
    }

    #[test]
    fn zaremba_inside_half_convergent() {
        for p in (5..=997u64).filter(|&p| is_prime(p)) {
            for m in 1..=10 {
                let z = zaremba_set(p, m).unwrap().members;
                let a = half_convergent_set(p, m).unwrap().members;
                let s = half_convergent_set_with(p, m, HalfConvergentRule::NextQuotient)
                    .unwrap()
                    .members;
                assert!(z.is_subset(&s), "p={p} m={m}");
                assert!(s.is_subset(&a), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn half_convergent_set_is_not_inverse_closed() {
        // 4/11 = [0; 2, 1, 3] has v₁ = 2, v₂ = 3 ≤ √11, so b₃ = 3 is free;
        // 4⁻¹ = 3 and 3/11 = [0; 3, 1, 2] has b₁ = 3 with v₁ = 3 ≤ √11.
        let ctx = PrimeContext::new(11).unwrap();
        let a = half_convergent_set(11, 2).unwrap().members;
        assert!(a.contains(4));
        assert!(!a.contains(3));
        assert_eq!(inverse_closure_counterexample(&a, &ctx), Some(4));
    }

    #[test]
    fn floored_set_is_injective_as_integers() {
        for p in [101u64, 211, 499, 997] {
            for m in 2..=5 {
                for beta in [0.3, 0.4, 0.5] {
                    let f = floored_set(p, m, beta).unwrap();
                    assert!(f.is_injective(), "p={p} m={m} beta={beta}");
                    assert_eq!(f.source_len as u64, fmq_count(m, beta_bound(p, beta).unwrap()));
                    // 0/1 and 1/1 coincide after reduction mod p
                    assert_eq!(f.residues().len(), f.values.len() - 1);
                }
            }
        }
        let f = floored_set(101, 2, 0.5).unwrap();
        assert_eq!(f.q_bound, 10);
        assert!(matches!(floored_set(101, 2, 0.6), Err(Error::BetaOutOfRange(_))));
        assert!(matches!(floored_set(101, 2, 0.0), Err(Error::BetaOutOfRange(_))));
    }

    #[test]
    fn interval_examples() {
        let i = interval_set(101, 2, 0.5).unwrap();
        assert_eq!(i.radius, 10);
        assert_eq!(i.integer_len(), 21);
        assert_eq!(i.members.len(), 21);
        assert!(i.members.contains(0) && i.members.contains(10) && i.members.contains(91));
        let expected = (9.0 * 101f64.powf(0.2) + 1.0).floor() as u64;
        assert_eq!(interval_radius(101, 2, 0.4).unwrap(), expected);
        assert_eq!(interval_set(7, 5, 0.3).unwrap().members.len(), 7);
        for p in [5u64, 101, 99991] {
            assert!(interval_radius(p, 1, 0.5).unwrap() >= 1);
        }
    }

    #[test]
    fn covering_with_next_quotient_rule() {
        for p in [101u64, 211, 499, 997] {
            for m in 2..=5 {
                for beta in [0.3, 0.4, 0.5] {
                    let rep = verify_covering_with(p, m, beta, HalfConvergentRule::NextQuotient).unwrap();
                    assert!(rep.passed(), "{rep:?}");
                    assert!(rep.chain_first);
                }
            }
        }
    }

    #[test]
    fn literal_covering_counterexample() {
        // 11/211 = [0; 19, 5, 2]: v₁ = 19 > √211, so 11 ∈ A₂(211) vacuously,
        // but 𝒜 has nothing in (0, 211/3) and ℬ has radius 10.
        let rep = verify_covering(211, 2, 0.5).unwrap();
        assert!(!rep.inclusion);
        assert_eq!(rep.counterexample, Some(11));
        assert!(rep.chain_total);
    }

    #[test]
    fn covering_degenerate_large_m() {
        let rep = verify_covering(101, 200, 0.3).unwrap();
        assert_eq!(rep.a_len, 100);
        assert!(rep.inclusion);
    }

    #[test]
    fn hensley_closed_form() {
        let w10 = hensley_dimension(10).w_hhd;
        let expected = 1.0 - 0.607927 / 10.0 - 0.739151 * 10f64.ln() / 100.0;
        assert!((w10 - expected).abs() < 1e-5, "{w10}");
        assert!((w10 - 0.9222).abs() < 5e-5);
        let far = hensley_dimension(1_000_000).w_hhd;
        assert!(far > 0.99999 && far < 1.0);
        let e = hensley_dimension(10);
        assert!(e.w_hhd_base2 < e.w_hhd);
    }

    #[test]
    fn empirical_dimension_needs_grid() {
        assert!(matches!(empirical_dimension(2, 50), Err(Error::DegenerateFit { .. })));
        assert!(empirical_dimension(1, 1000).is_err());
        let g = dimension_grid(10_000);
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&10_000));
    }
}

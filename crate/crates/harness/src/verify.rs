//! The acceptance suite: one function per criterion, each returning a
//! verdict with a one-line summary of what was checked.

use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::Rng;
use rayon::prelude::*;
use sumprod_core::bounded_cf::{
    beta_bound, empirical_dimension, fmq_count, hensley_dimension, verify_covering_with, zaremba_set,
    HalfConvergentRule,
};
use sumprod_core::cayley::{
    collision_depth, free_generation_check, girth_log_bound, margulis_bound, return_probability, t_mod_p, t_tilde,
    u_tilde, v_tilde, WORD_MEMORY_CAP,
};
use sumprod_core::contfrac::{cf_expand_u64, cf_value, convergents};
use sumprod_core::group_sets::{coset_sweep_direct, s_rho, t_free, CosetLabels, MatrixFamily, StandardSubgroup};
use sumprod_core::incidence::{
    curve_incidences, exhaustive_identity, incidence_count, incidence_count_by_curves, popular_product_count,
    product_pair_count,
};
use sumprod_core::measures::{
    balance, bsg_extract, flattening_profile, incidence_bound_check, mult_energy_residues, quasirandom_check_group,
    quasirandom_check_points, GroupFunction,
};
use sumprod_core::{is_prime, Error, PrimeContext, ProjSet, Psl2Group, ResidueSet, Weight};

use crate::experiments::{geometric_primes, run_zaremba_scaling};
use crate::oracles::{brute_pair_count, brute_zaremba, convergent_gap, gcd};
use crate::rng::{random_subset, stream};
use crate::table::Table;
use crate::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Gates the exit status.
    Assert,
    /// Must run; reported only.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub tier: Tier,
    pub pass: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = match self.tier {
            Tier::Assert => "",
            Tier::Diagnostic => " [diagnostic]",
        };
        format!(
            "{} criterion {}: {}{} ({:.1}s) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            tag,
            self.seconds,
            self.details
        )
    }
}

/// What a criterion body reports back.
struct Verdict {
    pass: bool,
    details: String,
}

fn verdict(pass: bool, details: impl Into<String>) -> std::result::Result<Verdict, Error> {
    Ok(Verdict {
        pass,
        details: details.into(),
    })
}

fn run(
    id: u32,
    title: &'static str,
    tier: Tier,
    body: impl FnOnce() -> std::result::Result<Verdict, Error>,
) -> CriterionResult {
    let start = Instant::now();
    let (pass, details) = match body() {
        Ok(v) => (v.pass, v.details),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        title,
        tier,
        pass,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn criterion_1() -> CriterionResult {
    run(
        1,
        "continued fraction round trip and convergent gaps",
        Tier::Assert,
        || {
            let q_max = 2000u64;
            let bad: Vec<(u64, u64)> = (2..=q_max)
                .into_par_iter()
                .flat_map_iter(|q| {
                    (1..q)
                        .filter(move |&a| gcd(a, q) == 1)
                        .filter(move |&a| {
                            let cf = match cf_expand_u64(a, q) {
                                Ok(cf) => cf,
                                Err(_) => return true,
                            };
                            let canonical = cf.is_canonical() && cf.quotients().last().is_some_and(|&b| b >= 2);
                            let table = convergents(&cf);
                            let s = cf.len();
                            // strict below s − 1; u_{s−1}/v_{s−1} sits at distance exactly 1/(v_{s−1}v_s)
                            let gaps = (0..s).all(|k| {
                                let ord = convergent_gap(a, q, table.u[k], table.v[k], table.v[k + 1]);
                                if k + 1 < s {
                                    ord.is_lt()
                                } else {
                                    ord.is_eq()
                                }
                            });
                            !(cf_value(&cf) == Ratio::new(a, q)
                                && canonical
                                && gaps
                                && table.last() == Ratio::new(a, q))
                        })
                        .map(move |a| (a, q))
                })
                .collect();
            let pairs: u64 = (2..=q_max)
                .map(|q| (1..q).filter(|&a| gcd(a, q) == 1).count() as u64)
                .sum();
            verdict(
                bad.is_empty(),
                format!(
                "{pairs} coprime pairs, q ≤ {q_max}; gap strict for k < s − 1, equal at k = s − 1; failures {} {:?}",
                bad.len(),
                bad.first()
            ),
            )
        },
    )
}

pub fn criterion_2() -> CriterionResult {
    run(2, "Zaremba sets against brute force", Tier::Assert, || {
        let primes: Vec<u64> = (2..=499).filter(|&p| is_prime(p)).collect();
        let grid: Vec<(u64, u64)> = primes.iter().flat_map(|&p| (1..=10).map(move |m| (p, m))).collect();
        let mismatches: Vec<(u64, u64)> = grid
            .par_iter()
            .filter(|&&(p, m)| match zaremba_set(p, m) {
                Ok(z) => z.members.as_slice() != brute_zaremba(p, m).as_slice(),
                Err(_) => true,
            })
            .copied()
            .collect();
        let z27 = zaremba_set(7, 2)?.members.as_slice().to_vec();
        let full_ok = primes.iter().all(|&p| {
            [p, p + 1, 2 * p].iter().all(|&m| {
                zaremba_set(p, m).is_ok_and(|z| z.members.as_slice() == (1..p as u32).collect::<Vec<_>>().as_slice())
            })
        });
        verdict(
            mismatches.is_empty() && z27 == [5] && full_ok,
            format!(
                "{} (p, M) pairs over {} primes, mismatches {:?}, Z_2(7) = {z27:?}, full set for M ≥ p: {full_ok}",
                grid.len(),
                primes.len(),
                mismatches
            ),
        )
    })
}

pub const COVERING_PRIMES: [u64; 4] = [101, 211, 499, 997];
pub const COVERING_BETAS: [f64; 3] = [0.3, 0.4, 0.5];

fn covering_grid(rule: HalfConvergentRule) -> std::result::Result<(usize, Vec<String>), Error> {
    let mut grid = Vec::new();
    for p in COVERING_PRIMES {
        for m in 2..=5u64 {
            for beta in COVERING_BETAS {
                grid.push((p, m, beta));
            }
        }
    }
    let results: Vec<std::result::Result<Option<String>, Error>> = grid
        .par_iter()
        .map(|&(p, m, beta)| {
            let r = verify_covering_with(p, m, beta, rule)?;
            let fmq = fmq_count(m, beta_bound(p, beta)?);
            let ok = r.passed() && r.floored_len as u64 == fmq;
            Ok((!ok).then(|| {
                format!(
                    "p={p} M={m} β={beta}: |𝒜|={} |F|={fmq} inclusion={} missing={} chain={}",
                    r.floored_len, r.inclusion, r.counterexample_count, r.chain_total
                )
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }
    Ok((grid.len(), failures))
}

pub fn criterion_3() -> CriterionResult {
    run(
        3,
        "floored-set bijection, covering inclusion and size chain",
        Tier::Assert,
        || {
            let (n, literal) = covering_grid(HalfConvergentRule::Literal)?;
            let (_, next) = covering_grid(HalfConvergentRule::NextQuotient)?;
            verdict(
                literal.is_empty(),
                format!(
                    "{n} grid points; literal rule failures {}{}; next-quotient rule failures {}",
                    literal.len(),
                    literal.first().map(|s| format!(" (first: {s})")).unwrap_or_default(),
                    next.len()
                ),
            )
        },
    )
}

pub fn criterion_4() -> CriterionResult {
    run(4, "Hensley dimension fit and 1 − w_M shape", Tier::Assert, || {
        let est = empirical_dimension(2, 10_000)?;
        let w = est.w_fit.unwrap_or(f64::NAN);
        let fit_ok = (w - 0.53).abs() <= 0.05;
        let bad: Vec<u64> = (5..=50u64)
            .filter(|&m| {
                let gap = 1.0 - hensley_dimension(m).w_hhd;
                !(gap >= 0.3 / m as f64 && gap <= 3.0 / m as f64)
            })
            .collect();
        verdict(
            fit_ok && bad.is_empty(),
            format!("w_fit(2, 10⁴) = {w:.4}; M ∈ 5..=50 outside [0.3/M, 3/M]: {bad:?}"),
        )
    })
}

fn random_proj_set(rng: &mut impl Rng, p: u32) -> ProjSet {
    let density = rng.gen_range(0.05..0.95);
    ProjSet::from_slots(p, (0..=p as usize).filter(|_| rng.gen_bool(density)))
}

/// S_ρ(B, C) with B, C runs of consecutive residues, so parameters never repeat.
fn random_s_rho(ctx: &PrimeContext, rng: &mut impl Rng, max_side: u32) -> std::result::Result<MatrixFamily, Error> {
    let p = ctx.p();
    let side = |rng: &mut dyn rand::RngCore| {
        let len = rng.gen_range(1..=max_side.min(p));
        let start = rng.gen_range(0..p);
        (0..len).map(|i| (start + i) % p).collect::<Vec<u32>>()
    };
    loop {
        let b = side(rng);
        let c = side(rng);
        match s_rho(ctx, &b, &c, rng.gen_range(1..p)) {
            Ok(f) => return Ok(f),
            Err(Error::ProjectiveCollision(..)) => continue,
            Err(e) => return Err(e),
        }
    }
}

pub fn criterion_5(seed: u64) -> CriterionResult {
    run(
        5,
        "exhaustive incidence identity and counter agreement",
        Tier::Assert,
        || {
            let mut summary = Vec::new();
            let mut pass = true;
            for p in [5u64, 7, 11] {
                let group = Psl2Group::shared(p)?;
                let ctx = group.ctx();
                let sl2 = ctx.sl2_elements();
                let outcomes: Vec<std::result::Result<(bool, bool, bool), Error>> = (0..200u64)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = stream(seed, (p << 32) | i);
                        let y = random_proj_set(&mut rng, p as u32);
                        let ident = exhaustive_identity(&group, &y)?;
                        let mut curve_sum = 0u64;
                        for g in &sl2 {
                            curve_sum += curve_incidences(ctx, &y, g)? as u64;
                        }
                        let fam = random_s_rho(ctx, &mut rng, 4)?;
                        let counters = incidence_count(ctx, &y, &fam)? == incidence_count_by_curves(ctx, &y, &fam)?;
                        Ok((ident.holds, curve_sum == 2 * ident.sum, counters))
                    })
                    .collect();
                let mut tally = [0usize; 3];
                for o in outcomes {
                    let (a, b, c) = o?;
                    tally[0] += a as usize;
                    tally[1] += b as usize;
                    tally[2] += c as usize;
                }
                pass &= tally.iter().all(|&t| t == 200);
                summary.push(format!(
                    "p={p}: identity {}/200, sweep {}/200, counters {}/200",
                    tally[0], tally[1], tally[2]
                ));
            }
            verdict(pass, summary.join("; "))
        },
    )
}

pub fn criterion_6(seed: u64) -> CriterionResult {
    run(6, "popular products and subgroup energy", Tier::Assert, || {
        let mut summary = Vec::new();
        let mut pass = true;
        for p in [101u64, 997] {
            let ctx = PrimeContext::new(p)?;
            let p32 = p as u32;
            let bad: usize = (0..1000u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(seed, (p << 32) | i);
                    let k = rng.gen_range(1..p as usize);
                    let a = random_subset(&mut rng, p32, k);
                    let rho = rng.gen_range(1..p32);
                    let fast = popular_product_count(&ctx, &a, rho).unwrap_or(usize::MAX);
                    let brute = brute_pair_count(p32, a.as_slice(), rho);
                    usize::from(fast != brute || fast != product_pair_count(&ctx, &a, rho))
                })
                .sum();
            let mut subgroup_bad = Vec::new();
            let divisors: Vec<u64> = (1..p).filter(|d| (p - 1) % d == 0).collect();
            for &d in &divisors {
                let h = ResidueSet::from_residues(p32, (1..p32).map(|x| ctx.pow(x, d)));
                let n = h.len() as u64;
                let energy = mult_energy_residues(&ctx, &h)?;
                let step = (h.len() / 25).max(1);
                let closed = h
                    .as_slice()
                    .iter()
                    .step_by(step)
                    .all(|&rho| popular_product_count(&ctx, &h, rho).is_ok_and(|c| c as u64 == n));
                if n != (p - 1) / d || energy != n * n * n || !closed {
                    subgroup_bad.push(d);
                }
            }
            pass &= bad == 0 && subgroup_bad.is_empty();
            summary.push(format!(
                "p={p}: 1000 random (A, ρ), mismatches {bad}; {} subgroups, failures {subgroup_bad:?}",
                divisors.len()
            ));
        }
        verdict(pass, summary.join("; "))
    })
}

/// Nonempty subsets of F_p of size ≤ k.
fn small_subsets(p: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(p: u32, k: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == k {
            return;
        }
        for x in start..p {
            cur.push(x);
            rec(p, k, x + 1, cur, out);
            cur.pop();
        }
    }
    rec(p, k, 0, &mut Vec::new(), &mut out);
    out
}

struct SweepTally {
    families: usize,
    skipped: usize,
    violations: Vec<String>,
    cross_checks: usize,
    cross_mismatch: usize,
}

fn coset_sweep_tally(p: u64, direct_all: bool, seed: u64) -> std::result::Result<SweepTally, Error> {
    let ctx = PrimeContext::new(p)?;
    let p32 = p as u32;
    let subsets = small_subsets(p32, 3);
    let mut subgroups = vec![StandardSubgroup::Borel];
    subgroups.extend(ctx.nonsquares().map(StandardSubgroup::KEpsilon));
    let labels: Vec<CosetLabels> = subgroups.iter().map(|&h| CosetLabels::new(&ctx, h)).collect();
    let mut jobs = Vec::new();
    for b in &subsets {
        for c in &subsets {
            for rho in 1..p32 {
                jobs.push((b, c, rho));
            }
        }
    }
    let mut rng = stream(seed, p);
    let sampled: std::collections::HashSet<usize> = (0..40).map(|_| rng.gen_range(0..jobs.len())).collect();
    let results: Vec<(bool, Vec<String>, usize, usize)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(b, c, rho))| {
            let fam = match s_rho(&ctx, b, c, rho) {
                Ok(f) => f,
                Err(_) => return (false, Vec::new(), 0, 0),
            };
            let mut violations = Vec::new();
            let (mut checks, mut mismatch) = (0, 0);
            for (h, lab) in subgroups.iter().zip(&labels) {
                let bound = match h {
                    StandardSubgroup::Borel => b.len().max(c.len()),
                    StandardSubgroup::KEpsilon(_) => 2,
                };
                let fast = lab.sweep(&ctx, &fam).max_count;
                let count = if direct_all || sampled.contains(&i) {
                    let direct = coset_sweep_direct(&ctx, &fam, *h).max_count;
                    checks += 1;
                    mismatch += usize::from(direct != fast);
                    direct.max(fast)
                } else {
                    fast
                };
                if count > bound {
                    violations.push(format!("p={p} B={b:?} C={c:?} ρ={rho} {h:?}: {count} > {bound}"));
                }
            }
            (true, violations, checks, mismatch)
        })
        .collect();
    let mut tally = SweepTally {
        families: 0,
        skipped: 0,
        violations: Vec::new(),
        cross_checks: 0,
        cross_mismatch: 0,
    };
    for (built, v, checks, mismatch) in results {
        if built {
            tally.families += 1;
        } else {
            tally.skipped += 1;
        }
        tally.violations.extend(v);
        tally.cross_checks += checks;
        tally.cross_mismatch += mismatch;
    }
    Ok(tally)
}

pub fn criterion_7(seed: u64) -> CriterionResult {
    run(
        7,
        "coset intersection sweep over SL₂(F₅) and SL₂(F₇)",
        Tier::Assert,
        || {
            let mut summary = Vec::new();
            let mut pass = true;
            for (p, direct_all) in [(5u64, true), (7, false)] {
                let t = coset_sweep_tally(p, direct_all, seed)?;
                pass &= t.violations.is_empty() && t.cross_mismatch == 0 && t.families > 0;
                summary.push(format!(
                "p={p}: {} families ({} with repeated matrices skipped), violations {}{}, direct cross-checks {} with {} mismatches",
                t.families,
                t.skipped,
                t.violations.len(),
                t.violations.first().map(|s| format!(" (first: {s})")).unwrap_or_default(),
                t.cross_checks,
                t.cross_mismatch
            ));
            }
            verdict(pass, summary.join("; "))
        },
    )
}

pub fn criterion_8() -> CriterionResult {
    run(8, "ℓ² flattening of the T(5) walk at p = 13", Tier::Assert, || {
        let group = Psl2Group::shared(13)?;
        let fam = t_free(group.ctx(), 5)?;
        let set = fam.symmetric_indices(&group);
        let mu = GroupFunction::<f64>::uniform_on(group.clone(), &set)?;
        let prof = flattening_profile(&mu, 12)?;
        let float_ok = prof.strictly_decreasing_until(1e-9) && prof.conserved();
        let exact = GroupFunction::<BigRational>::uniform_on(group.clone(), &set)?;
        let eprof = flattening_profile(&exact, 3)?;
        let exact_decreasing = eprof.steps.windows(2).all(|w| w[1].deviation < w[0].deviation);
        let exact_ok = exact_decreasing && eprof.conserved();
        let agree = eprof
            .steps
            .iter()
            .zip(&prof.steps)
            .all(|(e, f)| (e.deviation.to_f64() - f.deviation).abs() <= 1e-9);
        let below = prof.steps.iter().find(|s| s.deviation < 1e-9).map(|s| s.k);
        verdict(
            float_ok && exact_ok && agree,
            format!(
                "|S ∪ S⁻¹| = {}, deviations {:?}, below 1e-9 at k = {below:?}, exact k ≤ 3 decreasing {exact_decreasing}, float/exact agree {agree}",
                set.len(),
                prof.steps.iter().map(|s| format!("{:.3e}", s.deviation)).collect::<Vec<_>>()
            ),
        )
    })
}

pub fn criterion_9() -> CriterionResult {
    run(9, "free-group return probabilities", Tier::Assert, || {
        let mut bad = Vec::new();
        for k in 2..=10u32 {
            for m in 1..=8u32 {
                let r = return_probability::<BigRational>(k, m)?;
                if !(r.kesten_holds() && r.square_sum_holds() && r.identity_holds()) {
                    bad.push((k, m));
                }
            }
        }
        let base = return_probability::<BigRational>(2, 1)?.value;
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        verdict(
            bad.is_empty() && base == quarter,
            format!("k ∈ 2..=10, m ∈ 1..=8: failures {bad:?}; p²(e, e) on F₂ = {base}"),
        )
    })
}

pub const GIRTH_PRIMES: [u64; 4] = [101, 499, 997, 9973];

pub fn criterion_10() -> CriterionResult {
    run(10, "collision depth and free generation", Tier::Assert, || {
        let n = 5u32;
        let mut parts = Vec::new();
        let mut pass = true;
        let fam = t_tilde(n);
        for p in GIRTH_PRIMES {
            let ctx = PrimeContext::new(p)?;
            let r = collision_depth(&ctx, &t_mod_p(&ctx, n), 8, WORD_MEMORY_CAP)?;
            let mb = margulis_bound(p, &fam)?;
            let need = girth_log_bound(p, n).max(mb.bound);
            let ok = r.depth as f64 >= need;
            pass &= ok;
            parts.push(format!(
                "p={p}: d = {} ≥ {need:.3} (n(T̃) = {:.4}) {ok}",
                r.verdict(),
                mb.n
            ));
        }
        let t3 = free_generation_check(&t_tilde(3), 5)?;
        let uv = free_generation_check(&[u_tilde(), v_tilde()], 8)?;
        pass &= t3.free && uv.free;
        parts.push(format!(
            "T̃(3) free to depth 5: {}; {{u, v}} free to depth 8: {}",
            t3.free, uv.free
        ));
        verdict(pass, parts.join("; "))
    })
}

fn random_measure<W: Weight>(
    group: &std::sync::Arc<Psl2Group>,
    rng: &mut impl Rng,
    mass: (i64, i64),
) -> GroupFunction<W> {
    let k = rng.gen_range(1..=12);
    let pts: Vec<(u32, i64)> = (0..k)
        .map(|_| (rng.gen_range(0..group.order()), rng.gen_range(1..=9)))
        .collect();
    let total: i64 = pts.iter().map(|&(_, w)| w).sum();
    GroupFunction::from_weights(
        group.clone(),
        pts.into_iter()
            .map(|(g, w)| (g, W::from_ratio(w * mass.0, total * mass.1))),
    )
}

fn random_mean_zero<W: Weight>(rng: &mut impl Rng, len: usize, nonzero: usize) -> Vec<W> {
    let mut raw = vec![W::zero(); len];
    for _ in 0..nonzero {
        raw[rng.gen_range(0..len)] = W::from_ratio(rng.gen_range(-9..=9), 1);
    }
    balance(&raw)
}

/// Per-prime tallies for the appendix inequalities.
#[derive(Debug, Default, Clone, Copy)]
struct AppendixTally {
    points: usize,
    incidence: usize,
    incidence_other_forms: usize,
    bsg_applicable: usize,
    bsg: usize,
    regular: usize,
    regular_total: usize,
    c_size_lower_min: f64,
    c_energy_min: f64,
}

pub const APPENDIX_INSTANCES: u64 = 10_000;
pub const REGULAR_INSTANCES: u64 = 200;

fn appendix_instance(
    group: &std::sync::Arc<Psl2Group>,
    seed: u64,
    i: u64,
) -> std::result::Result<AppendixTally, Error> {
    type Q = BigRational;
    let p = group.p() as u64;
    let mut rng = stream(seed, (p << 32) | i);
    let points = p as usize + 1;
    let mut t = AppendixTally {
        c_size_lower_min: f64::INFINITY,
        c_energy_min: f64::INFINITY,
        ..Default::default()
    };

    let mu = random_measure::<Q>(group, &mut rng, (1, 1));
    let f = random_mean_zero::<Q>(&mut rng, points, points);
    let h = random_mean_zero::<Q>(&mut rng, points, points);
    let r = quasirandom_check_points(&mu, &f, &h)?;
    t.points = usize::from(r.pass && r.norm_pass && r.constant_le_p);

    let w = random_proj_set(&mut rng, p as u32);
    let r4 = incidence_bound_check(&mu, &w);
    t.incidence = usize::from(r4.passed());
    t.incidence_other_forms = usize::from(r4.small || (r4.bound_plain && r4.bound_cubic));

    let mass = [(1, 1), (3, 2), (2, 1)][rng.gen_range(0..3)];
    let nu = random_measure::<Q>(group, &mut rng, mass);
    let m = [2, 3, 4, 6, 8, 16][rng.gen_range(0..6)];
    match bsg_extract(&nu, Q::from_integer(BigInt::from(m))) {
        Ok(rep) => {
            t.bsg_applicable = 1;
            t.bsg = usize::from(rep.passed());
            t.c_size_lower_min = rep.c_size_lower;
            t.c_energy_min = rep.c_energy;
        }
        Err(Error::HypothesisFailed(_)) => {}
        Err(e) => return Err(e),
    }

    if i < REGULAR_INSTANCES {
        let order = group.order() as usize;
        let fg = GroupFunction::from_dense(group.clone(), random_mean_zero::<Q>(&mut rng, order, 40))?;
        let hg = GroupFunction::from_dense(group.clone(), random_mean_zero::<Q>(&mut rng, order, 40))?;
        let r = quasirandom_check_group(&mu, &fg, &hg)?;
        t.regular_total = 1;
        t.regular = usize::from(r.pass && r.norm_pass);
    }
    Ok(t)
}

pub fn criterion_11(seed: u64) -> CriterionResult {
    run(
        11,
        "quasirandom and incidence inequalities, weighted BSG",
        Tier::Assert,
        || {
            let mut parts = Vec::new();
            let mut pass = true;
            for p in [7u64, 11, 13] {
                let group = Psl2Group::shared(p)?;
                let tallies: Vec<std::result::Result<AppendixTally, Error>> = (0..APPENDIX_INSTANCES)
                    .into_par_iter()
                    .map(|i| appendix_instance(&group, seed, i))
                    .collect();
                let mut sum = AppendixTally {
                    c_size_lower_min: f64::INFINITY,
                    c_energy_min: f64::INFINITY,
                    ..Default::default()
                };
                for t in tallies {
                    let t = t?;
                    sum.points += t.points;
                    sum.incidence += t.incidence;
                    sum.incidence_other_forms += t.incidence_other_forms;
                    sum.bsg_applicable += t.bsg_applicable;
                    sum.bsg += t.bsg;
                    sum.regular += t.regular;
                    sum.regular_total += t.regular_total;
                    sum.c_size_lower_min = sum.c_size_lower_min.min(t.c_size_lower_min);
                    sum.c_energy_min = sum.c_energy_min.min(t.c_energy_min);
                }
                let n = APPENDIX_INSTANCES as usize;
                pass &= sum.points == n
                    && sum.incidence == n
                    && sum.bsg == sum.bsg_applicable
                    && sum.bsg_applicable > 0
                    && sum.regular == sum.regular_total;
                parts.push(format!(
                "p={p}: P¹ quasirandom {}/{n}, incidence bound {}/{n} (plain and cubic forms {}/{n}), BSG {}/{} (min |A|M‖ν‖₂² = {:.3}, min E(A)M³‖ν‖₂⁶ = {:.3}), regular action {}/{}",
                sum.points,
                sum.incidence,
                sum.incidence_other_forms,
                sum.bsg,
                sum.bsg_applicable,
                sum.c_size_lower_min,
                sum.c_energy_min,
                sum.regular,
                sum.regular_total
            ));
            }
            verdict(pass, parts.join("; "))
        },
    )
}

pub const SCALING_PRIME_COUNT: usize = 30;

/// The scaling study's configuration: primes spread over 10³–10⁵.
pub fn scaling_config() -> ExperimentConfig {
    ExperimentConfig {
        experiment: "zaremba".into(),
        primes: geometric_primes(1_000, 100_000, SCALING_PRIME_COUNT),
        m: vec![3, 4, 5],
        ..ExperimentConfig::default()
    }
}

/// Writes `zaremba_scaling.csv` and `zaremba_fits.csv` when `out_dir` is given.
pub fn criterion_12(out_dir: Option<&Path>) -> CriterionResult {
    run(12, "|Z_M(p)| scaling exponent", Tier::Diagnostic, || {
        let study = run_zaremba_scaling(&scaling_config())?;
        if let Some(dir) = out_dir {
            let write = |name: &str, t: &Table| {
                std::fs::write(dir.join(name), t.to_csv())
                    .map_err(|e| Error::InvalidParameter(format!("writing {name}: {e}")))
            };
            write("zaremba_scaling.csv", &study.rows)?;
            write("zaremba_fits.csv", &study.fits)?;
        }
        let col = |name: &str| -> Vec<f64> {
            study
                .fits
                .column(name)
                .unwrap_or_default()
                .into_iter()
                .map(|v| v.as_f64().unwrap_or(f64::NAN))
                .collect()
        };
        let (slopes, refs) = (col("exponent"), col("ref_2w_minus_1"));
        let pass = !slopes.is_empty() && slopes.iter().all(|&s| s < 1.0);
        let report: Vec<String> = [3, 4, 5]
            .iter()
            .zip(slopes.iter().zip(&refs))
            .map(|(m, (s, r))| format!("M={m}: exponent {s:.4} (2w−1 = {r:.4})"))
            .collect();
        verdict(
            pass,
            format!(
                "{} primes, {} rows; {}",
                SCALING_PRIME_COUNT,
                study.rows.len(),
                report.join(", ")
            ),
        )
    })
}

/// Runs every criterion in order.
pub fn verify_all(seed: u64, out_dir: Option<&Path>) -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(seed),
        criterion_6(seed),
        criterion_7(seed),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(seed),
        criterion_12(out_dir),
    ]
}

/// True iff every ASSERT-tier criterion passed.
pub fn asserted_ok(results: &[CriterionResult]) -> bool {
    results.iter().filter(|r| r.tier == Tier::Assert).all(|r| r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerated() {
        assert_eq!(small_subsets(5, 3).len(), 5 + 10 + 10);
        assert_eq!(small_subsets(7, 3).len(), 7 + 21 + 35);
    }

    #[test]
    fn fast_criteria_pass() {
        for r in [criterion_4(), criterion_9()] {
            assert!(r.pass, "{}", r.line());
        }
    }

    #[test]
    fn line_format() {
        let r = CriterionResult {
            id: 3,
            title: "t",
            tier: Tier::Diagnostic,
            pass: false,
            details: "d".into(),
            seconds: 0.25,
        };
        assert_eq!(r.line(), "FAIL criterion 3: t [diagnostic] (0.2s) d");
    }
}

//! Experiment runners. Each returns a fixed-schema table whose rows echo
//! their full parameter tuple; grid points are evaluated in parallel and
//! emitted in grid order.

use rand::Rng;
use rayon::prelude::*;
use sumprod_core::bounded_cf::{
    empirical_dimension, fmq_count, half_convergent_set_with, hensley_dimension, verify_covering_with, zaremba_set,
    HalfConvergentRule,
};
use sumprod_core::cayley::{
    bfs_girth, collision_depth, generation_probe, girth_log_bound, margulis_bound, t_mod_p, t_tilde, WORD_MEMORY_CAP,
};
use sumprod_core::group_sets::{s_rho, t_free};
use sumprod_core::incidence::{
    exhaustive_identity, incidence_count, incidence_count_by_curves, popular_product_count, product_pair_count,
    richness_test, weighted_mean_check,
};
use sumprod_core::measures::{flattening_profile, mult_energy_residues, GroupFunction};
use sumprod_core::modp::psl2_order;
use sumprod_core::stats::power_law_fit;
use sumprod_core::{Error, PrimeContext, ProjSet, Psl2Group, ResidueSet};

use crate::config::ExperimentConfig;
use crate::rng::{random_subset, stream};
use crate::table::{Table, Value};

pub type Outcome<T = Table> = std::result::Result<T, Error>;

fn na() -> Value {
    Value::Float(f64::NAN)
}

/// |Z_M(p)| rows plus one exponent fit per M.
#[derive(Debug, Clone, PartialEq)]
pub struct ZarembaStudy {
    pub rows: Table,
    pub fits: Table,
}

pub const CORRIDOR_LOW_SLACK: f64 = 0.15;
pub const CORRIDOR_HIGH_SLACK: f64 = 0.05;

pub fn run_zaremba_scaling(cfg: &ExperimentConfig) -> Outcome<ZarembaStudy> {
    let mut rows = Table::new(&["p", "M", "z_len", "a_len", "a_next_len", "w_hhd"]);
    let grid: Vec<(u64, u64)> = cfg
        .m
        .iter()
        .flat_map(|&m| cfg.primes.iter().map(move |&p| (p, m)))
        .collect();
    let results: Vec<Outcome<(usize, usize, usize)>> = grid
        .par_iter()
        .map(|&(p, m)| {
            let z = zaremba_set(p, m)?.members.len();
            let a = half_convergent_set_with(p, m, HalfConvergentRule::Literal)?
                .members
                .len();
            let an = half_convergent_set_with(p, m, HalfConvergentRule::NextQuotient)?
                .members
                .len();
            Ok((z, a, an))
        })
        .collect();
    let mut counts = Vec::with_capacity(grid.len());
    for (&(p, m), r) in grid.iter().zip(results) {
        let (z, a, an) = r?;
        counts.push(z);
        rows.push(vec![
            p.into(),
            m.into(),
            z.into(),
            a.into(),
            an.into(),
            hensley_dimension(m).w_hhd.into(),
        ]);
    }

    let mut fits = Table::new(&[
        "M",
        "primes",
        "p_min",
        "p_max",
        "exponent",
        "exponent_lo",
        "exponent_hi",
        "r_squared",
        "w_hhd",
        "w_fit",
        "ref_2w_minus_1",
        "ref_w",
        "eps_coefficient",
        "corridor_lo",
        "corridor_hi",
        "in_corridor",
        "below_one",
    ]);
    for &m in &cfg.m {
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .zip(&counts)
            .filter(|((_, mm), &z)| *mm == m && z > 0)
            .map(|((p, _), &z)| (*p as f64, z as f64))
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let fit = power_law_fit(&xs, &ys)?;
        let (lo, hi) = fit.slope_interval();
        let w = hensley_dimension(m).w_hhd;
        let w_fit = if m >= 2 {
            empirical_dimension(m, cfg.q_max)?.w_fit.unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        let (c_lo, c_hi) = (2.0 * w - 1.0 - CORRIDOR_LOW_SLACK, w + CORRIDOR_HIGH_SLACK);
        fits.push(vec![
            m.into(),
            xs.len().into(),
            (*cfg.primes.iter().min().unwrap()).into(),
            (*cfg.primes.iter().max().unwrap()).into(),
            fit.slope.into(),
            lo.into(),
            hi.into(),
            fit.r_squared.into(),
            w.into(),
            w_fit.into(),
            (2.0 * w - 1.0).into(),
            w.into(),
            (1.0 - w).into(),
            c_lo.into(),
            c_hi.into(),
            (fit.slope >= c_lo && fit.slope <= c_hi).into(),
            (fit.slope < 1.0).into(),
        ]);
    }
    Ok(ZarembaStudy { rows, fits })
}

pub fn run_covering_suite(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&[
        "p",
        "M",
        "beta",
        "rule",
        "a_len",
        "source_len",
        "floored_len",
        "injective",
        "radius",
        "interval_len",
        "inclusion",
        "counterexample",
        "missing",
        "inclusion_nonzero",
        "sum_a_interval",
        "sum_floored_interval",
        "chain_first",
        "chain_total",
        "pass",
    ]);
    let mut grid = Vec::new();
    for &p in &cfg.primes {
        for &m in &cfg.m {
            for &beta in &cfg.beta {
                for rule in [HalfConvergentRule::Literal, HalfConvergentRule::NextQuotient] {
                    grid.push((p, m, beta, rule));
                }
            }
        }
    }
    let reports: Vec<_> = grid
        .par_iter()
        .map(|&(p, m, beta, rule)| verify_covering_with(p, m, beta, rule))
        .collect();
    for r in reports {
        let r = r?;
        t.push(vec![
            r.p.into(),
            r.m.into(),
            r.beta.into(),
            rule_name(r.rule).into(),
            r.a_len.into(),
            r.source_len.into(),
            r.floored_len.into(),
            r.floored_injective.into(),
            r.radius.into(),
            r.interval_len.into(),
            r.inclusion.into(),
            r.counterexample.map_or(Value::Int(-1), |x| x.into()),
            r.counterexample_count.into(),
            r.inclusion_nonzero.into(),
            r.sum_a_interval.into(),
            r.sum_floored_interval.into(),
            r.chain_first.into(),
            r.chain_total.into(),
            r.passed().into(),
        ]);
    }
    Ok(t)
}

pub fn rule_name(rule: HalfConvergentRule) -> &'static str {
    match rule {
        HalfConvergentRule::Literal => "literal",
        HalfConvergentRule::NextQuotient => "next_quotient",
    }
}

/// The sets A used by the sum-product sweep.
pub fn sumprod_families(cfg: &ExperimentConfig, p: u64, task: u64) -> Outcome<Vec<(String, ResidueSet)>> {
    let ctx = PrimeContext::new(p)?;
    let p32 = p as u32;
    let mut rng = stream(cfg.seed, task);
    let k = ((p as f64).sqrt() as usize).max(2);
    let mut fams = vec![
        ("full".to_string(), ResidueSet::from_residues(p32, 1..p32)),
        ("random".to_string(), random_subset(&mut rng, p32, k)),
        ("interval".to_string(), ResidueSet::from_residues(p32, 1..=k as u32)),
        (
            "squares".to_string(),
            ResidueSet::from_residues(p32, (1..p32).map(|x| ctx.mul(x, x))),
        ),
    ];
    for &m in &cfg.m {
        fams.push((format!("zaremba_M{m}"), zaremba_set(p, m)?.members));
    }
    Ok(fams)
}

pub fn run_sumprod_sweep(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&[
        "p",
        "family",
        "a_len",
        "rho",
        "b_len",
        "c_len",
        "sum_ab",
        "sum_rho_inv_c",
        "popular",
        "pair_count",
        "pair_match",
        "sigma",
        "popular_ratio",
        "sqrt_p_a",
    ]);
    for (task, &p) in cfg.primes.iter().enumerate() {
        let ctx = PrimeContext::new(p)?;
        let p32 = p as u32;
        let fams = sumprod_families(cfg, p, task as u64)?;
        let rows: Vec<Outcome<Vec<Value>>> = fams
            .par_iter()
            .flat_map_iter(|(name, a)| cfg.rho.iter().map(move |&rho| (name, a, rho)))
            .map(|(name, a, rho)| {
                let rho = rho % p32;
                if rho == 0 {
                    return Err(Error::ZeroDilate);
                }
                let k = a.len().max(1) as u64;
                let b = ResidueSet::interval(p32, 0, k);
                let c = b.clone();
                let sum_ab = a.sumset(&b)?.len();
                let (inv, _) = a.inverse_set(&ctx);
                let sum_rho = inv.dilate(&ctx, rho)?.sumset(&c)?.len();
                let popular = popular_product_count(&ctx, a, rho)?;
                let pairs = product_pair_count(&ctx, a, rho);
                let n = a.len() as f64;
                let sigma = sum_ab as f64 / n;
                Ok(vec![
                    p.into(),
                    name.clone().into(),
                    a.len().into(),
                    rho.into(),
                    b.len().into(),
                    c.len().into(),
                    sum_ab.into(),
                    sum_rho.into(),
                    popular.into(),
                    pairs.into(),
                    (popular == pairs).into(),
                    sigma.into(),
                    (popular as f64 * p as f64 / (sigma * sigma * n * n)).into(),
                    (p as f64 * n).sqrt().into(),
                ])
            })
            .collect();
        for r in rows {
            t.push(r?);
        }
    }
    Ok(t)
}

/// Groups above this order are skipped: dense squaring costs |G|² per step.
pub const FLATTEN_ORDER_CAP: u64 = 25_000;

pub fn run_flattening(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&[
        "p",
        "N",
        "k",
        "l2_sq",
        "deviation",
        "mass",
        "symmetric",
        "support",
        "decay_ratio",
        "decay_rate",
        "exponent_c",
        "status",
    ]);
    for &p in &cfg.primes {
        for &n in &cfg.n {
            if psl2_order(p) > FLATTEN_ORDER_CAP {
                t.push(vec![
                    p.into(),
                    n.into(),
                    Value::Int(-1),
                    na(),
                    na(),
                    na(),
                    false.into(),
                    Value::Int(0),
                    na(),
                    na(),
                    na(),
                    format!("group order {} above cap {FLATTEN_ORDER_CAP}", psl2_order(p)).into(),
                ]);
                continue;
            }
            let group = Psl2Group::shared(p)?;
            let fam = match t_free(group.ctx(), n) {
                Ok(f) => f,
                Err(e) => {
                    t.push(vec![
                        p.into(),
                        n.into(),
                        Value::Int(-1),
                        na(),
                        na(),
                        na(),
                        false.into(),
                        Value::Int(0),
                        na(),
                        na(),
                        na(),
                        e.to_string().into(),
                    ]);
                    continue;
                }
            };
            let mu = GroupFunction::<f64>::uniform_on(group.clone(), &fam.symmetric_indices(&group))?;
            let prof = flattening_profile(&mu, cfg.k_max)?;
            let rate = prof.decay_rate(1e-12).unwrap_or(f64::NAN);
            let c = prof.exponent_for(1.0 / mu.linf(), 1e-12).unwrap_or(f64::NAN);
            let ratios = prof.decay_ratios();
            for (i, s) in prof.steps.iter().enumerate() {
                t.push(vec![
                    p.into(),
                    n.into(),
                    s.k.into(),
                    s.l2_sq.into(),
                    s.deviation.into(),
                    s.mass.into(),
                    s.symmetric.into(),
                    s.support.into(),
                    if i == 0 { na() } else { ratios[i - 1].into() },
                    rate.into(),
                    c.into(),
                    "ok".into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// BFS girth is computed for p up to this bound.
pub const BFS_GIRTH_MAX_P: u64 = 13;

pub fn run_girth(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&[
        "p",
        "N",
        "depth_cap",
        "depth",
        "exact",
        "verdict",
        "words",
        "n_norm",
        "margulis_bound",
        "log_bound",
        "meets_bounds",
        "bfs_girth",
        "girth_window_ok",
        "generates",
        "transitive",
        "status",
    ]);
    let grid: Vec<(u64, u32)> = cfg
        .primes
        .iter()
        .flat_map(|&p| cfg.n.iter().map(move |&n| (p, n)))
        .collect();
    for &(p, n) in &grid {
        let ctx = PrimeContext::new(p)?;
        let gens = t_mod_p(&ctx, n);
        let report = match collision_depth(&ctx, &gens, cfg.depth_cap, WORD_MEMORY_CAP) {
            Ok(r) => r,
            Err(e) => {
                let mut row: Vec<Value> = vec![p.into(), n.into(), cfg.depth_cap.into()];
                row.extend([Value::Int(-1), false.into(), "".into(), Value::Int(0), na(), na(), na()]);
                row.extend([false.into(), Value::Int(-1), false.into(), false.into(), false.into()]);
                row.push(e.to_string().into());
                t.push(row);
                continue;
            }
        };
        let mb = margulis_bound(p, &t_tilde(n))?;
        let lb = if n >= 2 { girth_log_bound(p, n) } else { f64::NAN };
        let d = report.depth as f64;
        let meets = d >= mb.bound && (n < 2 || d >= lb);
        let (girth, window_ok) = if p <= BFS_GIRTH_MAX_P {
            let group = Psl2Group::shared(p)?;
            let g = bfs_girth(&group, &gens)?.map_or(-1, |g| g as i64);
            let ok = report
                .girth_window()
                .is_some_and(|(lo, hi)| g >= lo as i64 && g <= hi as i64);
            (g, ok)
        } else {
            (-1, true)
        };
        let gen = generation_probe(&ctx, &gens)?;
        t.push(vec![
            p.into(),
            n.into(),
            cfg.depth_cap.into(),
            report.depth.into(),
            report.exact.into(),
            report.verdict().into(),
            report.words.into(),
            mb.n.into(),
            mb.bound.into(),
            lb.into(),
            meets.into(),
            girth.into(),
            window_ok.into(),
            gen.generates.into(),
            gen.transitive.into(),
            "ok".into(),
        ]);
    }
    Ok(t)
}

/// Largest group for which the full identity over PSL₂ is evaluated.
pub const EXHAUSTIVE_ORDER_CAP: u64 = 2_000_000;

pub fn run_incidence(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&[
        "p",
        "sample",
        "alpha",
        "y_len",
        "family_len",
        "incidences",
        "curve_incidences",
        "counters_agree",
        "exhaustive",
        "weighted_value",
        "target_p",
        "target_p1",
        "deviation",
        "worst_richness",
    ]);
    for (task, &p) in cfg.primes.iter().enumerate() {
        let group = Psl2Group::shared(p)?;
        let ctx = group.ctx();
        let p32 = p as u32;
        for &alpha in &cfg.alpha {
            let mut rng = stream(cfg.seed, task as u64);
            for sample in 0..cfg.samples {
                let y = ProjSet::from_slots(p32, (0..=p as usize).filter(|_| rng.gen_bool(alpha)));
                let side = (cfg.n[0] as usize).min(p as usize - 1);
                let b0 = rng.gen_range(0..p32);
                let c0 = rng.gen_range(0..p32);
                let rho = rng.gen_range(1..p32);
                let b: Vec<u32> = (0..side as u32).map(|i| (b0 + i) % p32).collect();
                let c: Vec<u32> = (0..side as u32).map(|i| (c0 + i) % p32).collect();
                let fam = s_rho(ctx, &b, &c, rho)?;
                let inc = incidence_count(ctx, &y, &fam)?;
                let curves = incidence_count_by_curves(ctx, &y, &fam)?;
                let exhaustive: Value = if psl2_order(p) <= EXHAUSTIVE_ORDER_CAP {
                    exhaustive_identity(&group, &y)?.holds.into()
                } else {
                    "skipped".into()
                };
                let nu = GroupFunction::<f64>::uniform_on(group.clone(), &fam.psl2_indices(&group))?;
                let z = loop {
                    let m = ctx.mat(
                        rng.gen_range(0..p as i64),
                        rng.gen_range(0..p as i64),
                        rng.gen_range(0..p as i64),
                        rng.gen_range(0..p as i64),
                    );
                    if ctx.det(&m) != 0 {
                        break m;
                    }
                };
                let w = weighted_mean_check(&nu, &z, &y)?;
                let rich = richness_test(ctx, &y, &fam, 0.5)?;
                t.push(vec![
                    p.into(),
                    sample.into(),
                    alpha.into(),
                    y.len().into(),
                    fam.len().into(),
                    inc.into(),
                    curves.into(),
                    (inc == curves).into(),
                    exhaustive,
                    w.value.into(),
                    w.target_p.into(),
                    w.target_p1.into(),
                    w.deviation.into(),
                    rich.worst_ratio.into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn run_popprod(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&[
        "p",
        "case",
        "a_len",
        "rho",
        "popular",
        "pair_count",
        "agree",
        "energy",
        "energy_cube",
    ]);
    for (task, &p) in cfg.primes.iter().enumerate() {
        let ctx = PrimeContext::new(p)?;
        let p32 = p as u32;
        let mut rng = stream(cfg.seed, task as u64);
        for _ in 0..cfg.samples {
            let k = rng.gen_range(1..=(p as usize - 1).min(64));
            let a = random_subset(&mut rng, p32, k);
            let rho = rng.gen_range(1..p32);
            let pop = popular_product_count(&ctx, &a, rho)?;
            let pairs = product_pair_count(&ctx, &a, rho);
            let e = mult_energy_residues(&ctx, &a)?;
            let n = a.len() as u64;
            t.push(vec![
                p.into(),
                "random".into(),
                n.into(),
                rho.into(),
                pop.into(),
                pairs.into(),
                (pop == pairs).into(),
                e.into(),
                (n * n * n).into(),
            ]);
        }
        for d in (1..p).filter(|d| (p - 1) % d == 0) {
            // H = d-th powers has order (p − 1)/d
            let h = ResidueSet::from_residues(p32, (1..p32).map(|x| ctx.pow(x, d)));
            let rho = h.as_slice()[h.len() / 2];
            let pop = popular_product_count(&ctx, &h, rho)?;
            let pairs = product_pair_count(&ctx, &h, rho);
            let e = mult_energy_residues(&ctx, &h)?;
            let n = h.len() as u64;
            t.push(vec![
                p.into(),
                format!("subgroup_index_{d}").into(),
                n.into(),
                rho.into(),
                pop.into(),
                pairs.into(),
                (pop == pairs && pop as u64 == n).into(),
                e.into(),
                (n * n * n).into(),
            ]);
        }
    }
    Ok(t)
}

pub fn run_fmq(cfg: &ExperimentConfig) -> Outcome {
    let mut t = Table::new(&["M", "Q", "count", "w_hhd"]);
    for &m in &cfg.m {
        for &q in &cfg.q {
            t.push(vec![
                m.into(),
                q.into(),
                fmq_count(m, q).into(),
                hensley_dimension(m).w_hhd.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn run_zaremba_rows(cfg: &ExperimentConfig) -> Outcome {
    Ok(run_zaremba_scaling_rows_only(cfg)?.rows)
}

fn run_zaremba_scaling_rows_only(cfg: &ExperimentConfig) -> Outcome<ZarembaStudy> {
    if cfg.primes.len() >= 3 {
        return run_zaremba_scaling(cfg);
    }
    // too few primes for a fit: rows only
    let mut rows = Table::new(&["p", "M", "z_len", "a_len", "a_next_len", "w_hhd"]);
    for &m in &cfg.m {
        for &p in &cfg.primes {
            let z = zaremba_set(p, m)?.members.len();
            let a = half_convergent_set_with(p, m, HalfConvergentRule::Literal)?
                .members
                .len();
            let an = half_convergent_set_with(p, m, HalfConvergentRule::NextQuotient)?
                .members
                .len();
            rows.push(vec![
                p.into(),
                m.into(),
                z.into(),
                a.into(),
                an.into(),
                hensley_dimension(m).w_hhd.into(),
            ]);
        }
    }
    Ok(ZarembaStudy {
        rows,
        fits: Table::new(&[]),
    })
}

/// Smallest prime ≥ n.
pub fn next_prime(n: u64) -> u64 {
    (n.max(5)..).find(|&x| sumprod_core::is_prime(x)).unwrap()
}

/// `count` primes spread geometrically over [lo, hi].
pub fn geometric_primes(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1).max(1) as f64;
            next_prime((lo as f64 * (hi as f64 / lo as f64).powf(t)).round() as u64)
        })
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig::default()
    }

    #[test]
    fn zaremba_single_row() {
        let c = ExperimentConfig {
            primes: vec![7],
            m: vec![2, 7],
            ..cfg()
        };
        let t = run_zaremba_rows(&c).unwrap();
        assert_eq!(t.rows[0][2], Value::Int(1));
        assert_eq!(t.rows[1][2], Value::Int(6));
    }

    #[test]
    fn zaremba_fit_runs() {
        let c = ExperimentConfig {
            primes: geometric_primes(1000, 5000, 6),
            m: vec![3],
            q_max: 1000,
            ..cfg()
        };
        let s = run_zaremba_scaling(&c).unwrap();
        assert_eq!(s.rows.len(), 6);
        assert_eq!(s.fits.len(), 1);
        assert_eq!(s.fits.rows[0][16], Value::Bool(true));
    }

    #[test]
    fn sumprod_full_set() {
        let c = ExperimentConfig {
            primes: vec![101],
            m: vec![3],
            rho: vec![1, 2, 5],
            ..cfg()
        };
        let t = run_sumprod_sweep(&c).unwrap();
        let full: Vec<_> = t.rows.iter().filter(|r| r[1] == Value::from("full")).collect();
        assert_eq!(full.len(), 3);
        for r in full {
            assert_eq!(r[6], Value::Int(101));
            let pop = match r[8] {
                Value::Int(x) => x,
                _ => unreachable!(),
            };
            assert!(pop == 100 || pop == 99);
        }
        assert!(t.column("pair_match").unwrap().iter().all(|v| **v == Value::Bool(true)));
    }

    #[test]
    fn girth_and_flatten_rows() {
        let c = ExperimentConfig {
            primes: vec![13, 101],
            n: vec![5],
            depth_cap: 6,
            k_max: 6,
            ..cfg()
        };
        let g = run_girth(&c).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g
            .column("meets_bounds")
            .unwrap()
            .iter()
            .all(|v| **v == Value::Bool(true)));
        let f = run_flattening(&c).unwrap();
        assert_eq!(f.len(), 7 + 1);
    }

    #[test]
    fn popprod_and_incidence_rows() {
        let c = ExperimentConfig {
            primes: vec![11],
            samples: 5,
            n: vec![3],
            ..cfg()
        };
        let t = run_popprod(&c).unwrap();
        assert!(t.column("agree").unwrap().iter().all(|v| **v == Value::Bool(true)));
        let i = run_incidence(&c).unwrap();
        assert_eq!(i.len(), 5);
        assert!(i
            .column("counters_agree")
            .unwrap()
            .iter()
            .all(|v| **v == Value::Bool(true)));
        assert!(i.column("exhaustive").unwrap().iter().all(|v| **v == Value::Bool(true)));
    }

    #[test]
    fn deterministic_output() {
        let c = ExperimentConfig {
            primes: vec![13],
            samples: 4,
            seed: 9,
            ..cfg()
        };
        assert_eq!(run_incidence(&c).unwrap().to_csv(), run_incidence(&c).unwrap().to_csv());
        assert_eq!(run_popprod(&c).unwrap().to_json(), run_popprod(&c).unwrap().to_json());
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(next_prime(1000), 1009);
        let g = geometric_primes(1000, 100_000, 5);
        assert_eq!(g.len(), 5);
        assert!(g.iter().all(|&p| sumprod_core::is_prime(p)));
    }
}

use sumprod_core::cayley::{collision_depth, girth_log_bound, margulis_bound, t_mod_p, t_tilde, WORD_MEMORY_CAP};
use sumprod_core::group_sets::{coset_sweep_direct, s_rho, CosetLabels, StandardSubgroup};
use sumprod_core::incidence::{exhaustive_identity, incidence_count, incidence_count_by_curves};
use sumprod_core::measures::{flattening_profile, GroupFunction};
use sumprod_core::{PrimeContext, ProjSet, Psl2Group};

#[test]
fn t5_collision_depth_meets_bounds() {
    for p in [101u64, 499, 997] {
        let ctx = PrimeContext::new(p).unwrap();
        let r = collision_depth(&ctx, &t_mod_p(&ctx, 5), 6, WORD_MEMORY_CAP).unwrap();
        let m = margulis_bound(p, &t_tilde(5)).unwrap();
        let d = r.depth as f64;
        assert!(
            d >= m.bound && d >= girth_log_bound(p, 5),
            "p={p} d={d} bound={}",
            m.bound
        );
    }
}

#[test]
fn coset_labels_agree_with_direct_sweep_at_7() {
    let ctx = PrimeContext::new(7).unwrap();
    let mut subgroups = vec![StandardSubgroup::Borel];
    subgroups.extend(ctx.nonsquares().map(StandardSubgroup::KEpsilon));
    for (b, c, rho) in [
        (vec![1, 2, 3], vec![0, 4], 1),
        (vec![0, 5], vec![2, 3, 6], 3),
        (vec![4], vec![1], 6),
    ] {
        let fam = s_rho(&ctx, &b, &c, rho).unwrap();
        for &h in &subgroups {
            let direct = coset_sweep_direct(&ctx, &fam, h);
            let labels = CosetLabels::new(&ctx, h).sweep(&ctx, &fam);
            assert_eq!(direct.max_count, labels.max_count);
        }
    }
}

#[test]
fn incidences_consistent_on_full_group() {
    let group = Psl2Group::shared(11).unwrap();
    let ctx = group.ctx();
    let y = ProjSet::from_slots(11, [0, 2, 3, 7, 11]);
    let id = exhaustive_identity(&group, &y).unwrap();
    assert!(id.holds);
    let fam = s_rho(ctx, &[1, 2, 3], &[4, 5], 2).unwrap();
    assert_eq!(
        incidence_count(ctx, &y, &fam).unwrap(),
        incidence_count_by_curves(ctx, &y, &fam).unwrap()
    );
}

#[test]
fn flattening_reaches_uniform_at_13() {
    let group = Psl2Group::shared(13).unwrap();
    let t = sumprod_core::group_sets::t_free(group.ctx(), 5).unwrap();
    let mu = GroupFunction::<f64>::uniform_on(group.clone(), &t.symmetric_indices(&group)).unwrap();
    let prof = flattening_profile(&mu, 10).unwrap();
    assert!(prof.strictly_decreasing_until(1e-9));
    assert!(prof.conserved());
    assert!(prof.steps.last().unwrap().deviation < 1e-9);
}

//! Point–curve incidences between Y ⊆ P¹(F_p) and linear fractional maps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group_sets::MatrixFamily;
use crate::measures::GroupFunction;
use crate::modp::{lft_apply, Mat2, PrimeContext, ProjPoint, Psl2Group, ResidueSet};
use crate::scalar::{from_count, Weight};

/// A subset of P¹(F_p) as a bitset over slots 0..=p (slot p is ∞).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjSet {
    p: u32,
    bits: Vec<u64>,
}

impl ProjSet {
    pub fn new(p: u32) -> Self {
        Self {
            p,
            bits: vec![0; (p as usize + 1).div_ceil(64)],
        }
    }

    pub fn full(p: u32) -> Self {
        Self::from_slots(p, 0..=p as usize)
    }

    pub fn from_slots<I: IntoIterator<Item = usize>>(p: u32, slots: I) -> Self {
        let mut s = Self::new(p);
        for x in slots {
            s.insert(x);
        }
        s
    }

    pub fn from_points<I: IntoIterator<Item = ProjPoint>>(p: u32, points: I) -> Self {
        Self::from_slots(p, points.into_iter().map(|x| x.index(p)))
    }

    /// The affine points of a residue set.
    pub fn from_residues(set: &ResidueSet) -> Self {
        Self::from_slots(set.p(), set.iter().map(|x| x as usize))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x <= self.p as usize, "slot {x} outside P¹(F_{})", self.p);
        self.bits[x / 64] |= 1 << (x % 64);
    }

    pub fn contains(&self, x: usize) -> bool {
        x <= self.p as usize && self.bits[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.p as usize).filter(|&x| self.contains(x))
    }

    pub fn complement(&self) -> Self {
        Self::from_slots(self.p, (0..=self.p as usize).filter(|&x| !self.contains(x)))
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// gY for an invertible g.
    pub fn image(&self, ctx: &PrimeContext, g: &Mat2) -> Self {
        Self::from_points(
            self.p,
            self.iter().map(|x| lft_apply(ctx, g, ProjPoint::from_index(x, self.p))),
        )
    }
}

fn check_invertible(ctx: &PrimeContext, g: &Mat2) -> Result<()> {
    if ctx.det(g) == 0 {
        return Err(Error::Determinant {
            det: 0,
            expected: "nonzero",
        });
    }
    Ok(())
}

fn check_prime(ctx: &PrimeContext, y: &ProjSet) -> Result<()> {
    if ctx.p() != y.p() {
        return Err(Error::ContextMismatch(ctx.p(), y.p()));
    }
    Ok(())
}

/// |Y ∩ gY| for g ∈ GL₂(F_p).
pub fn intersection_count(ctx: &PrimeContext, y: &ProjSet, g: &Mat2) -> Result<usize> {
    check_prime(ctx, y)?;
    check_invertible(ctx, g)?;
    Ok(y.image(ctx, g).intersection_len(y))
}

/// #{(x, z) ∈ Y × Y : z = g(x)}, counted pair by pair on the curve z = g(x).
pub fn curve_incidences(ctx: &PrimeContext, y: &ProjSet, g: &Mat2) -> Result<usize> {
    check_prime(ctx, y)?;
    check_invertible(ctx, g)?;
    let p = ctx.p();
    let mut n = 0;
    for x in y.iter() {
        for z in y.iter() {
            if lft_apply(ctx, g, ProjPoint::from_index(x, p)).index(p) == z {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// I(Y, S) = Σ_{g∈S} |Y ∩ gY|.
pub fn incidence_count(ctx: &PrimeContext, y: &ProjSet, family: &MatrixFamily) -> Result<u64> {
    check_prime(ctx, y)?;
    family
        .members
        .par_iter()
        .map(|g| intersection_count(ctx, y, g).map(|n| n as u64))
        .sum()
}

pub fn incidence_count_by_curves(ctx: &PrimeContext, y: &ProjSet, family: &MatrixFamily) -> Result<u64> {
    family
        .members
        .par_iter()
        .map(|g| curve_incidences(ctx, y, g).map(|n| n as u64))
        .sum()
}

/// Σ_{g∈PSL₂} |Y ∩ gY| against |Y|²|G|/(p+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveIdentity {
    pub sum: u64,
    pub y_len: u64,
    pub order: u64,
    pub holds: bool,
}

pub fn exhaustive_identity(group: &Psl2Group, y: &ProjSet) -> Result<ExhaustiveIdentity> {
    check_prime(group.ctx(), y)?;
    let slots: Vec<usize> = y.iter().collect();
    let sum: u64 = (0..group.order())
        .into_par_iter()
        .map(|g| slots.iter().filter(|&&x| y.contains(group.act(g, x))).count() as u64)
        .sum();
    let (n, order) = (slots.len() as u64, group.order() as u64);
    Ok(ExhaustiveIdentity {
        sum,
        y_len: n,
        order,
        holds: sum * (group.p() as u64 + 1) == n * n * order,
    })
}

/// Σ_g (δ_z ∗ ν)(g)|Y ∩ gY| against |Y|²/p and |Y|²/(p+1).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMean<W> {
    pub value: W,
    pub target_p: W,
    pub target_p1: W,
    /// value − |Y|²/p.
    pub deviation: W,
}

/// `z` ranges over GL₂(F_p); `nu` is a measure on PSL₂(F_p).
pub fn weighted_mean_check<W: Weight>(nu: &GroupFunction<W>, z: &Mat2, y: &ProjSet) -> Result<WeightedMean<W>> {
    let group = nu.group();
    let ctx = group.ctx();
    check_prime(ctx, y)?;
    check_invertible(ctx, z)?;
    let mut value = W::zero();
    for (h, w) in nu.support() {
        let g = ctx.mat_mul(z, group.elem(h).rep());
        value += &(w * from_count(intersection_count(ctx, y, &g)? as u64));
    }
    let n2 = (y.len() * y.len()) as i64;
    let p = group.p() as i64;
    let target_p = W::from_ratio(n2, p);
    Ok(WeightedMean {
        deviation: value.clone() - target_p.clone(),
        value,
        target_p,
        target_p1: W::from_ratio(n2, p + 1),
    })
}

/// |A ∩ ρA⁻¹|.
pub fn popular_product_count(ctx: &PrimeContext, a: &ResidueSet, rho: u32) -> Result<usize> {
    let (inv, _) = a.inverse_set(ctx);
    Ok(a.intersection(&inv.dilate(ctx, rho)?)?.len())
}

/// #{(a, a') ∈ A × A : aa' = ρ}.
pub fn product_pair_count(ctx: &PrimeContext, a: &ResidueSet, rho: u32) -> usize {
    a.iter()
        .map(|x| a.iter().filter(|&y| ctx.mul(x, y) == rho).count())
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichnessReport {
    pub alpha: f64,
    pub y_len: usize,
    /// Y = ∅ makes the test vacuous.
    pub degenerate: bool,
    pub pass: bool,
    pub worst_member: Option<usize>,
    pub worst_ratio: f64,
}

/// Whether |Y ∩ gY| ≥ α|Y| for every g in the family.
pub fn richness_test(ctx: &PrimeContext, y: &ProjSet, family: &MatrixFamily, alpha: f64) -> Result<RichnessReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    check_prime(ctx, y)?;
    let n = y.len();
    if n == 0 {
        return Ok(RichnessReport {
            alpha,
            y_len: 0,
            degenerate: true,
            pass: true,
            worst_member: None,
            worst_ratio: f64::NAN,
        });
    }
    let mut worst: Option<(usize, usize)> = None;
    for (i, g) in family.members.iter().enumerate() {
        let c = intersection_count(ctx, y, g)?;
        if worst.is_none_or(|(_, w)| c < w) {
            worst = Some((i, c));
        }
    }
    let (worst_member, worst_ratio) = match worst {
        Some((i, c)) => (Some(i), c as f64 / n as f64),
        None => (None, 1.0),
    };
    Ok(RichnessReport {
        alpha,
        y_len: n,
        degenerate: false,
        pass: worst_ratio >= alpha,
        worst_member,
        worst_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_sets::{s_rho, s_unipotent};
    use num_rational::Ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = Ratio<i128>;

    #[test]
    fn projset_basics() {
        let mut s = ProjSet::new(7);
        assert!(s.is_empty());
        s.insert(7);
        s.insert(0);
        assert_eq!(s.len(), 2);
        assert!(s.contains(7) && !s.contains(3));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 7]);
        assert_eq!(s.complement().len(), 6);
        assert_eq!(ProjSet::full(131).len(), 132);
    }

    #[test]
    fn intersection_examples() {
        let ctx = PrimeContext::new(7).unwrap();
        let full = ProjSet::full(7);
        let g = ctx.mat(2, 3, 1, 2);
        assert_eq!(intersection_count(&ctx, &full, &g).unwrap(), 8);
        let y = ProjSet::from_slots(7, [0, 1, 3, 7]);
        assert_eq!(intersection_count(&ctx, &y, &Mat2::IDENTITY).unwrap(), 4);
        assert!(intersection_count(&ctx, &y, &ctx.mat(1, 2, 2, 4)).is_err());
        // a non-SL₂ element of GL₂
        assert_eq!(
            intersection_count(&ctx, &y, &ctx.mat(3, 0, 0, 1)).unwrap(),
            curve_incidences(&ctx, &y, &ctx.mat(3, 0, 0, 1)).unwrap()
        );
    }

    #[test]
    fn curve_oracle_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [5u64, 11, 13] {
            let ctx = PrimeContext::new(p).unwrap();
            let p = p as u32;
            for _ in 0..40 {
                let y = ProjSet::from_slots(p, (0..=p as usize).filter(|_| rng.gen_bool(0.4)));
                let b0 = rng.gen_range(0..p - 3);
                let c0 = rng.gen_range(0..p - 2);
                let b: Vec<u32> = (b0..b0 + 3).collect();
                let c: Vec<u32> = (c0..c0 + 2).collect();
                let fam = s_unipotent(&ctx, &b, &c).unwrap();
                assert_eq!(
                    incidence_count(&ctx, &y, &fam).unwrap(),
                    incidence_count_by_curves(&ctx, &y, &fam).unwrap()
                );
            }
        }
    }

    #[test]
    fn exhaustive_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for p in [5u64, 7, 11, 13] {
            let g = Psl2Group::shared(p).unwrap();
            for _ in 0..10 {
                let y = ProjSet::from_slots(p as u32, (0..=p as usize).filter(|_| rng.gen_bool(0.5)));
                assert!(exhaustive_identity(&g, &y).unwrap().holds);
            }
        }
    }

    #[test]
    fn uniform_weighted_mean_is_exact() {
        let g = Psl2Group::shared(7).unwrap();
        let ctx = g.ctx();
        let u = GroupFunction::<Q>::uniform(g.clone());
        let y = ProjSet::from_slots(7, [1, 2, 4]);
        for z in [Mat2::IDENTITY, ctx.mat(3, 0, 0, 1)] {
            let r = weighted_mean_check(&u, &z, &y).unwrap();
            assert_eq!(r.value, Q::new(9, 8));
            assert_eq!(r.target_p1, Q::new(9, 8));
            assert_eq!(r.deviation, Q::new(9, 8) - Q::new(9, 7));
        }
    }

    #[test]
    fn popular_products() {
        let ctx = PrimeContext::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let a = ResidueSet::from_values(13, (0..6).map(|_| rng.gen_range(0..13)));
            for rho in 1..13 {
                assert_eq!(
                    popular_product_count(&ctx, &a, rho).unwrap(),
                    product_pair_count(&ctx, &a, rho)
                );
            }
        }
        let units = ResidueSet::from_residues(13, 1..13);
        assert_eq!(popular_product_count(&ctx, &units, 5).unwrap(), 12);
    }

    #[test]
    fn richness() {
        let ctx = PrimeContext::new(7).unwrap();
        let fam = s_rho(&ctx, &[1, 2], &[3], 1).unwrap();
        let full = ProjSet::full(7);
        let r = richness_test(&ctx, &full, &fam, 0.5).unwrap();
        assert!(r.pass && !r.degenerate);
        assert_eq!(r.worst_ratio, 1.0);
        let empty = ProjSet::new(7);
        assert!(richness_test(&ctx, &empty, &fam, 0.5).unwrap().degenerate);
        assert!(richness_test(&ctx, &full, &fam, 1.0).is_err());
        assert!(richness_test(&ctx, &full, &fam, 0.0).is_err());
    }
}

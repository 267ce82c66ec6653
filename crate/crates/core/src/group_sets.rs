//! Explicit matrix families in SL₂(F_p), classification of cyclic
//! subgroups up to conjugacy, coset-intersection counts and growth probes.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modp::{Mat2, PrimeContext, Psl2Elem, Psl2Group};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// ((−ρ⁻¹c, −1 + ρ⁻¹bc), (1, −b)) for b ∈ B, c ∈ C.
    SRho,
    /// ((1, −b), (c, 1 − bc)) for b ∈ B, c ∈ C.
    SUnipotent,
    /// ((1, −2j), (2j, 1 − 4j²)) for j = 1..=N.
    TFree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyParams {
    Grid { b: Vec<u32>, c: Vec<u32>, rho: u32 },
    Range { n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFamily {
    pub kind: FamilyKind,
    pub params: FamilyParams,
    pub members: Vec<Mat2>,
}

impl MatrixFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members as dense PSL₂ indices.
    pub fn psl2_indices(&self, group: &Psl2Group) -> Vec<u32> {
        self.members
            .iter()
            .map(|g| Psl2Elem::canonical_unchecked(group.ctx(), g).index(group.ctx()))
            .collect()
    }

    /// S ∪ S⁻¹ as distinct PSL₂ indices, sorted.
    pub fn symmetric_indices(&self, group: &Psl2Group) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .psl2_indices(group)
            .into_iter()
            .flat_map(|i| [i, group.inv(i)])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn check_family(ctx: &PrimeContext, members: &[Mat2]) -> Result<()> {
    let mut seen = HashMap::with_capacity(members.len());
    for (i, g) in members.iter().enumerate() {
        let det = ctx.det(g);
        if det != 1 {
            return Err(Error::Determinant { det, expected: "1" });
        }
        if let Some(j) = seen.insert(Psl2Elem::canonical_unchecked(ctx, g), i) {
            return Err(Error::ProjectiveCollision(j, i));
        }
    }
    Ok(())
}

fn reduced_params(ctx: &PrimeContext, xs: &[u32]) -> Result<Vec<u32>> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("parameter set is empty".into()));
    }
    let mut out: Vec<u32> = xs.iter().map(|&x| x % ctx.p()).collect();
    out.sort_unstable();
    out.dedup();
    if out.len() != xs.len() {
        return Err(Error::InvalidParameter("parameters repeat mod p".into()));
    }
    Ok(out)
}

pub fn s_rho(ctx: &PrimeContext, b: &[u32], c: &[u32], rho: u32) -> Result<MatrixFamily> {
    let ri = ctx.inv(rho % ctx.p()).ok_or(Error::ZeroDilate)?;
    let (b, c) = (reduced_params(ctx, b)?, reduced_params(ctx, c)?);
    let mut members = Vec::with_capacity(b.len() * c.len());
    for &bb in &b {
        for &cc in &c {
            let ric = ctx.mul(ri, cc);
            members.push(Mat2::new(ctx.neg(ric), ctx.sub(ctx.mul(ric, bb), 1), 1, ctx.neg(bb)));
        }
    }
    check_family(ctx, &members)?;
    Ok(MatrixFamily {
        kind: FamilyKind::SRho,
        params: FamilyParams::Grid {
            b,
            c,
            rho: rho % ctx.p(),
        },
        members,
    })
}

pub fn s_unipotent(ctx: &PrimeContext, b: &[u32], c: &[u32]) -> Result<MatrixFamily> {
    let (b, c) = (reduced_params(ctx, b)?, reduced_params(ctx, c)?);
    let mut members = Vec::with_capacity(b.len() * c.len());
    for &bb in &b {
        for &cc in &c {
            members.push(Mat2::new(1, ctx.neg(bb), cc, ctx.sub(1, ctx.mul(bb, cc))));
        }
    }
    check_family(ctx, &members)?;
    Ok(MatrixFamily {
        kind: FamilyKind::SUnipotent,
        params: FamilyParams::Grid { b, c, rho: 1 },
        members,
    })
}

/// B = {1..m}, C = {1..n}.
pub fn s_unipotent_box(ctx: &PrimeContext, m: u32, n: u32) -> Result<MatrixFamily> {
    let b: Vec<u32> = (1..=m).collect();
    let c: Vec<u32> = (1..=n).collect();
    s_unipotent(ctx, &b, &c)
}

pub fn t_free(ctx: &PrimeContext, n: u32) -> Result<MatrixFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    let members: Vec<Mat2> = (1..=n as i64)
        .map(|j| ctx.mat(1, -2 * j, 2 * j, 1 - 4 * j * j))
        .collect();
    check_family(ctx, &members)?;
    Ok(MatrixFamily {
        kind: FamilyKind::TFree,
        params: FamilyParams::Range { n },
        members,
    })
}

/// A standard subgroup of SL₂(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StandardSubgroup {
    /// Upper triangular matrices.
    Borel,
    /// {(x, εy; y, x) : x² − εy² = 1} for a nonsquare ε.
    KEpsilon(u32),
}

impl StandardSubgroup {
    pub fn contains(&self, ctx: &PrimeContext, x: &Mat2) -> bool {
        match *self {
            StandardSubgroup::Borel => x.c == 0,
            StandardSubgroup::KEpsilon(eps) => x.a == x.d && x.b == ctx.mul(eps, x.c),
        }
    }

    pub fn elements(&self, ctx: &PrimeContext) -> Vec<Mat2> {
        ctx.sl2_elements()
            .into_iter()
            .filter(|x| self.contains(ctx, x))
            .collect()
    }

    /// p(p−1) for the Borel subgroup, p+1 for K_ε.
    pub fn order(&self, p: u64) -> u64 {
        match self {
            StandardSubgroup::Borel => p * (p - 1),
            StandardSubgroup::KEpsilon(_) => p + 1,
        }
    }
}

/// Where the cyclic group generated by g sits up to conjugacy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    pub subgroup: StandardSubgroup,
    /// C with C⁻¹ g C in `subgroup`.
    pub conjugator: Mat2,
    /// C⁻¹ g C.
    pub normal_form: Mat2,
}

fn conjugate(ctx: &PrimeContext, g: &Mat2, c: &Mat2) -> Mat2 {
    let ci = ctx.mat_inv(c).expect("conjugator is invertible");
    ctx.mat_mul(&ctx.mat_mul(&ci, g), c)
}

fn weyl(ctx: &PrimeContext) -> Mat2 {
    Mat2::new(0, ctx.p() - 1, 1, 0)
}

pub fn classify_cyclic(ctx: &PrimeContext, g: &Mat2) -> Result<SubgroupDescriptor> {
    let det = ctx.det(g);
    if det != 1 {
        return Err(Error::Determinant { det, expected: "1" });
    }
    if *g == Mat2::IDENTITY || *g == ctx.mat_neg(&Mat2::IDENTITY) {
        return Err(Error::Central);
    }
    let t = ctx.trace(g);
    let disc = ctx.sub(ctx.mul(t, t), 4);
    let (subgroup, conjugator) = match ctx.sqrt(disc) {
        Some(s) => {
            let conj = if g.c == 0 {
                Mat2::IDENTITY
            } else {
                // eigenvector (λ − d, c) as first column
                let lambda = ctx.mul(ctx.add(t, s), ctx.inv(2).unwrap());
                let ci = ctx.inv(g.c).unwrap();
                Mat2::new(ctx.sub(lambda, g.d), ctx.neg(ci), g.c, 0)
            };
            (StandardSubgroup::Borel, conj)
        }
        None => {
            // b = 0 would make g lower triangular with split eigenvalues,
            // so the nonsquare branch always has b ≠ 0; the Weyl step is a guard.
            let (h, pre) = if g.b == 0 {
                let w = weyl(ctx);
                (conjugate(ctx, g, &w), w)
            } else {
                (*g, Mat2::IDENTITY)
            };
            let two_b = ctx.mul(2, h.b);
            let shift = ctx.div(ctx.sub(h.d, h.a), two_b).unwrap();
            let lower = Mat2::new(1, 0, shift, 1);
            let four_b2 = ctx.mul(two_b, two_b);
            let eps = ctx.div(disc, four_b2).unwrap();
            let conj = ctx.mat_mul(&ctx.mat_mul(&pre, &lower), &weyl(ctx));
            (StandardSubgroup::KEpsilon(eps), conj)
        }
    };
    let normal_form = conjugate(ctx, g, &conjugator);
    if !subgroup.contains(ctx, &normal_form) {
        return Err(Error::HypothesisFailed(format!(
            "conjugation of {g} did not reach {subgroup:?}"
        )));
    }
    Ok(SubgroupDescriptor {
        subgroup,
        conjugator,
        normal_form,
    })
}

/// The lower-unipotent conjugation C = (1, 0; (d−a)/2b, 1) and
/// C⁻¹ g C = (x, y; εy, x).
pub fn lower_unipotent_form(ctx: &PrimeContext, g: &Mat2) -> Option<(Mat2, Mat2)> {
    let shift = ctx.div(ctx.sub(g.d, g.a), ctx.mul(2, g.b))?;
    let c = Mat2::new(1, 0, shift, 1);
    Some((c, conjugate(ctx, g, &c)))
}

/// #{h ∈ S : g1⁻¹ h g2⁻¹ ∈ H}.
pub fn coset_intersection_count(
    ctx: &PrimeContext,
    family: &MatrixFamily,
    g1: &Mat2,
    g2: &Mat2,
    subgroup: StandardSubgroup,
) -> Result<usize> {
    let g1i = ctx.mat_inv(g1).ok_or(Error::Determinant { det: 0, expected: "1" })?;
    let g2i = ctx.mat_inv(g2).ok_or(Error::Determinant { det: 0, expected: "1" })?;
    Ok(family
        .members
        .iter()
        .filter(|h| subgroup.contains(ctx, &ctx.mat_mul(&ctx.mat_mul(&g1i, h), &g2i)))
        .count())
}

/// Largest coset intersection over a sweep, with a witness pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepMax {
    pub max_count: usize,
    pub witness: (Mat2, Mat2),
    pub pairs: u64,
}

/// Exhaustive sweep over all (g1, g2) ∈ SL₂(F_p)², evaluated directly.
pub fn coset_sweep_direct(ctx: &PrimeContext, family: &MatrixFamily, subgroup: StandardSubgroup) -> SweepMax {
    let sl2 = ctx.sl2_elements();
    let inverses: Vec<Mat2> = sl2.iter().map(|g| ctx.mat_inv(g).unwrap()).collect();
    let pairs = (sl2.len() as u64).pow(2);
    let (max_count, witness) = (0..sl2.len())
        .into_par_iter()
        .map(|i| {
            let left: Vec<Mat2> = family.members.iter().map(|h| ctx.mat_mul(&inverses[i], h)).collect();
            let mut best = (0usize, 0usize);
            for (j, g2i) in inverses.iter().enumerate() {
                let n = left
                    .iter()
                    .filter(|x| subgroup.contains(ctx, &ctx.mat_mul(x, g2i)))
                    .count();
                if n > best.0 {
                    best = (n, j);
                }
            }
            (best.0, (i, best.1))
        })
        .reduce(
            || (0, (0, 0)),
            |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
        );
    SweepMax {
        max_count,
        witness: (sl2[witness.0], sl2[witness.1]),
        pairs,
    }
}

/// Right cosets H·x of a subgroup, labelled over an SL₂ enumeration.
pub struct CosetLabels {
    subgroup: StandardSubgroup,
    elements: Vec<Mat2>,
    index: HashMap<Mat2, usize>,
    labels: Vec<u32>,
    representatives: Vec<usize>,
}

impl CosetLabels {
    pub fn new(ctx: &PrimeContext, subgroup: StandardSubgroup) -> Self {
        let elements = ctx.sl2_elements();
        let index: HashMap<Mat2, usize> = elements.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let h = subgroup.elements(ctx);
        let mut labels = vec![u32::MAX; elements.len()];
        let mut representatives = Vec::new();
        for i in 0..elements.len() {
            if labels[i] != u32::MAX {
                continue;
            }
            let id = representatives.len() as u32;
            representatives.push(i);
            for k in &h {
                labels[index[&ctx.mat_mul(k, &elements[i])]] = id;
            }
        }
        Self {
            subgroup,
            elements,
            index,
            labels,
            representatives,
        }
    }

    pub fn coset_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn label(&self, g: &Mat2) -> u32 {
        self.labels[self.index[g]]
    }

    /// Same maximum as the direct sweep: g1⁻¹h g2⁻¹ ∈ H iff g1⁻¹h ∈ H g2,
    /// so for fixed g1 the best g2 picks the most popular right coset.
    pub fn sweep(&self, ctx: &PrimeContext, family: &MatrixFamily) -> SweepMax {
        let n = self.elements.len();
        let (max_count, witness) = (0..n)
            .into_par_iter()
            .map(|i| {
                let g1i = ctx.mat_inv(&self.elements[i]).unwrap();
                let mut hist: HashMap<u32, usize> = HashMap::new();
                for h in &family.members {
                    *hist.entry(self.label(&ctx.mat_mul(&g1i, h))).or_insert(0) += 1;
                }
                let (label, count) = hist
                    .into_iter()
                    .max_by_key(|&(l, c)| (c, std::cmp::Reverse(l)))
                    .unwrap_or((0, 0));
                (count, (i, self.representatives[label as usize]))
            })
            .reduce(
                || (0, (0, 0)),
                |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
            );
        debug_assert!(self.subgroup.order(ctx.p() as u64) as usize * self.coset_count() == n);
        SweepMax {
            max_count,
            witness: (self.elements[witness.0], self.elements[witness.1]),
            pairs: (n as u64).pow(2),
        }
    }
}

/// Sizes for the growth probe |(A ∪ A⁻¹ ∪ {e})³|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriplingReport {
    pub a_len: usize,
    pub symmetric_len: usize,
    pub triple_len: usize,
}

pub fn tripling(group: &Psl2Group, a: &[u32], cap: usize) -> Result<TriplingReport> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("A must be nonempty".into()));
    }
    let a_len = a.iter().collect::<HashSet<_>>().len();
    let mut sym: Vec<u32> = a
        .iter()
        .flat_map(|&x| [x, group.inv(x)])
        .chain([group.identity()])
        .collect();
    sym.sort_unstable();
    sym.dedup();
    let projected = (sym.len() as u128).pow(3).min(group.order() as u128);
    if projected > cap as u128 {
        return Err(Error::MemoryCap {
            projected: projected as u64,
            cap: cap as u64,
        });
    }
    let mut two: Vec<u32> = sym
        .par_iter()
        .flat_map_iter(|&x| sym.iter().map(move |&y| group.mul(x, y)))
        .collect();
    two.sort_unstable();
    two.dedup();
    let mut three: Vec<u32> = two
        .par_iter()
        .flat_map_iter(|&x| sym.iter().map(move |&y| group.mul(x, y)))
        .collect();
    three.par_sort_unstable();
    three.dedup();
    Ok(TriplingReport {
        a_len,
        symmetric_len: sym.len(),
        triple_len: three.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn family_examples() {
        let c7 = ctx(7);
        let t = t_free(&c7, 1).unwrap();
        assert_eq!(t.members, vec![c7.mat(1, -2, 2, -3)]);
        let s = s_rho(&c7, &[1], &[1], 1).unwrap();
        assert_eq!(s.members, vec![c7.mat(-1, 0, 1, -1)]);
        let u = s_unipotent(&c7, &[0], &[0]).unwrap();
        assert_eq!(u.members, vec![Mat2::IDENTITY]);
        assert!(matches!(s_rho(&c7, &[1], &[1], 0), Err(Error::ZeroDilate)));
        assert!(s_rho(&c7, &[], &[1], 1).is_err());
        assert!(matches!(t_free(&ctx(5), 6), Err(Error::ProjectiveCollision(..))));
    }

    #[test]
    fn family_determinants_and_sizes() {
        for p in [5u64, 7, 13, 101] {
            let c = ctx(p);
            for rho in 1..p.min(8) as u32 {
                let b: Vec<u32> = (0..p.min(6) as u32).collect();
                let s = s_rho(&c, &b, &b[1..], rho).unwrap();
                assert_eq!(s.len(), b.len() * (b.len() - 1));
                assert!(s.members.iter().all(|g| c.det(g) == 1));
            }
            let u = s_unipotent_box(&c, 2, 2).unwrap();
            assert!(u.members.iter().all(|g| c.det(g) == 1));
        }
        let c = ctx(101);
        let t = t_free(&c, 5).unwrap();
        assert_eq!(t.len(), 5);
        // T_j = v^j u^{-j} with u = (1 2; 0 1), v = (1 0; 2 1)
        let u = c.mat(1, 2, 0, 1);
        let v = c.mat(1, 0, 2, 1);
        let ui = c.mat_inv(&u).unwrap();
        for (j, m) in t.members.iter().enumerate() {
            let j = j as u64 + 1;
            assert_eq!(*m, c.mat_mul(&c.mat_pow(&v, j), &c.mat_pow(&ui, j)));
        }
    }

    #[test]
    fn classify_examples() {
        let c7 = ctx(7);
        let d = classify_cyclic(&c7, &Mat2::new(1, 1, 0, 1)).unwrap();
        assert_eq!(d.subgroup, StandardSubgroup::Borel);
        assert_eq!(d.conjugator, Mat2::IDENTITY);
        let w = c7.mat(0, -1, 1, 0);
        let d = classify_cyclic(&c7, &w).unwrap();
        // tr² − 4 = 3 is a nonsquare mod 7
        assert!(matches!(d.subgroup, StandardSubgroup::KEpsilon(e) if !c7.is_square(e)));
        assert!(classify_cyclic(&c7, &Mat2::IDENTITY).is_err());
        assert!(classify_cyclic(&c7, &c7.mat(2, 0, 0, 2)).is_err());
    }

    #[test]
    fn lower_unipotent_normal_form() {
        for p in [5u64, 7, 11, 13] {
            let c = ctx(p);
            for g in c.sl2_elements() {
                let t = c.trace(&g);
                let disc = c.sub(c.mul(t, t), 4);
                if c.is_square(disc) {
                    continue;
                }
                assert_ne!(g.b, 0);
                let (_, h) = lower_unipotent_form(&c, &g).unwrap();
                let x = c.mul(t, c.inv(2).unwrap());
                let eps = c.div(disc, c.mul(4, c.mul(g.b, g.b))).unwrap();
                assert_eq!(h, Mat2::new(x, g.b, c.mul(eps, g.b), x));
            }
        }
    }

    #[test]
    fn classify_every_noncentral_element() {
        for p in [5u64, 7, 11, 13] {
            let c = ctx(p);
            let minus = c.mat_neg(&Mat2::IDENTITY);
            for g in c.sl2_elements() {
                if g == Mat2::IDENTITY || g == minus {
                    continue;
                }
                let d = classify_cyclic(&c, &g).unwrap();
                assert_eq!(c.det(&d.conjugator), 1);
                assert!(d.subgroup.contains(&c, &d.normal_form));
                // the whole cyclic group lands in the subgroup
                let mut x = d.normal_form;
                for _ in 0..p + 1 {
                    assert!(d.subgroup.contains(&c, &x));
                    x = c.mat_mul(&x, &d.normal_form);
                }
            }
        }
    }

    #[test]
    fn subgroup_orders() {
        for p in [5u64, 7, 11] {
            let c = ctx(p);
            assert_eq!(StandardSubgroup::Borel.elements(&c).len() as u64, p * (p - 1));
            for eps in c.nonsquares() {
                let k = StandardSubgroup::KEpsilon(eps);
                assert_eq!(k.elements(&c).len() as u64, p + 1);
            }
        }
    }

    #[test]
    fn identity_cosets_miss_s_rho() {
        let c = ctx(7);
        let s = s_rho(&c, &[1, 2, 3], &[4, 5], 3).unwrap();
        let n = coset_intersection_count(&c, &s, &Mat2::IDENTITY, &Mat2::IDENTITY, StandardSubgroup::Borel).unwrap();
        assert_eq!(n, 0);
    }

    #[test]
    fn coset_sweep_p5_both_methods() {
        let c = ctx(5);
        let s = s_rho(&c, &[1, 2], &[1, 2], 1).unwrap();
        let direct = coset_sweep_direct(&c, &s, StandardSubgroup::Borel);
        let labels = CosetLabels::new(&c, StandardSubgroup::Borel);
        let fast = labels.sweep(&c, &s);
        assert_eq!(direct.max_count, fast.max_count);
        assert!(direct.max_count <= 2);
        assert_eq!(direct.pairs, 120 * 120);
        let (g1, g2) = fast.witness;
        assert_eq!(
            coset_intersection_count(&c, &s, &g1, &g2, StandardSubgroup::Borel).unwrap(),
            fast.max_count
        );
        for eps in c.nonsquares() {
            let k = StandardSubgroup::KEpsilon(eps);
            let d = coset_sweep_direct(&c, &s, k);
            assert_eq!(d.max_count, CosetLabels::new(&c, k).sweep(&c, &s).max_count);
            assert!(d.max_count <= 2);
        }
    }

    #[test]
    fn borel_count_is_conjugation_invariant() {
        // conjugating S, g1, g2 by x and the subgroup by x together
        let c = ctx(7);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sl2 = c.sl2_elements();
        let s = s_rho(&c, &[1, 3, 4], &[2, 6], 5).unwrap();
        for _ in 0..200 {
            let g1 = sl2[rng.gen_range(0..sl2.len())];
            let g2 = sl2[rng.gen_range(0..sl2.len())];
            let x = sl2[rng.gen_range(0..sl2.len())];
            let xi = c.mat_inv(&x).unwrap();
            let conj = |g: &Mat2| c.mat_mul(&c.mat_mul(&xi, g), &x);
            let before = coset_intersection_count(&c, &s, &g1, &g2, StandardSubgroup::Borel).unwrap();
            // h ↦ x⁻¹hx, g1 ↦ x⁻¹g1, g2 ↦ g2 x keeps g1⁻¹ h g2⁻¹ fixed
            let s2 = MatrixFamily {
                members: s.members.iter().map(conj).collect(),
                ..s.clone()
            };
            let after = coset_intersection_count(
                &c,
                &s2,
                &c.mat_mul(&xi, &g1),
                &c.mat_mul(&g2, &x),
                StandardSubgroup::Borel,
            )
            .unwrap();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn tripling_examples() {
        let g = Psl2Group::shared(7).unwrap();
        let e = g.identity();
        assert_eq!(tripling(&g, &[e], 1000).unwrap().triple_len, 1);
        // upper unipotent subgroup {(1 t; 0 1)}
        let unip: Vec<u32> = (0..7).map(|t| g.index_of(&Mat2::new(1, t, 0, 1)).unwrap()).collect();
        let r = tripling(&g, &unip, 1000).unwrap();
        assert_eq!(r.triple_len, 7);
        assert!(tripling(&g, &[], 1000).is_err());
        let big = Psl2Group::shared(101).unwrap();
        let t = t_free(big.ctx(), 3).unwrap().psl2_indices(&big);
        let r = tripling(&big, &t, 1 << 20).unwrap();
        assert_eq!(r.symmetric_len, 7);
        assert!(r.triple_len >= r.a_len * r.a_len);
        assert!(matches!(tripling(&big, &t, 10), Err(Error::MemoryCap { .. })));
    }
}

//! Finitely supported functions on PSL₂(F_p): convolution, norms,
//! ℓ²-flattening profiles, subgroup masses, multiplicative energy, the
//! weighted Balog–Szemerédi–Gowers extraction and quasirandom inequalities.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group_sets::StandardSubgroup;
use crate::incidence::ProjSet;
use crate::modp::{Mat2, PrimeContext, Psl2Group, ResidueSet};
use crate::scalar::{from_count, Weight};
use crate::stats::linear_fit;

#[derive(Debug, Clone, PartialEq)]
enum Storage<W> {
    Sparse(BTreeMap<u32, W>),
    Dense(Vec<W>),
}

/// A real function on PSL₂(F_p), stored sparsely until its support
/// reaches an eighth of the group.
#[derive(Debug, Clone)]
pub struct GroupFunction<W> {
    group: Arc<Psl2Group>,
    storage: Storage<W>,
}

impl<W: Weight> PartialEq for GroupFunction<W> {
    fn eq(&self, other: &Self) -> bool {
        self.group.p() == other.group.p() && self.support() == other.support()
    }
}

impl<W: Weight> GroupFunction<W> {
    fn from_storage(group: Arc<Psl2Group>, storage: Storage<W>) -> Self {
        let mut f = Self { group, storage };
        f.rebalance();
        f
    }

    fn rebalance(&mut self) {
        let n = self.group.order() as usize;
        let threshold = n.div_ceil(8);
        match &mut self.storage {
            Storage::Sparse(map) => {
                map.retain(|_, w| !w.is_zero());
                if map.len() >= threshold {
                    let mut dense = vec![W::zero(); n];
                    for (k, w) in std::mem::take(map) {
                        dense[k as usize] = w;
                    }
                    self.storage = Storage::Dense(dense);
                }
            }
            Storage::Dense(v) => {
                let nnz = v.iter().filter(|w| !w.is_zero()).count();
                if nnz < threshold {
                    let map = std::mem::take(v)
                        .into_iter()
                        .enumerate()
                        .filter(|(_, w)| !w.is_zero())
                        .map(|(k, w)| (k as u32, w))
                        .collect();
                    self.storage = Storage::Sparse(map);
                }
            }
        }
    }

    pub fn zero(group: Arc<Psl2Group>) -> Self {
        Self {
            group,
            storage: Storage::Sparse(BTreeMap::new()),
        }
    }

    /// Sums repeated keys.
    pub fn from_weights<I: IntoIterator<Item = (u32, W)>>(group: Arc<Psl2Group>, weights: I) -> Self {
        let mut map: BTreeMap<u32, W> = BTreeMap::new();
        for (k, w) in weights {
            assert!(k < group.order(), "element index out of range");
            *map.entry(k).or_insert_with(W::zero) += &w;
        }
        Self::from_storage(group, Storage::Sparse(map))
    }

    pub fn from_dense(group: Arc<Psl2Group>, values: Vec<W>) -> Result<Self> {
        if values.len() != group.order() as usize {
            return Err(Error::InvalidParameter(format!(
                "dense function has {} entries, group has {}",
                values.len(),
                group.order()
            )));
        }
        Ok(Self::from_storage(group, Storage::Dense(values)))
    }

    pub fn delta(group: Arc<Psl2Group>, g: u32) -> Self {
        Self::from_weights(group, [(g, W::one())])
    }

    /// Uniform probability on the distinct elements of `set`.
    pub fn uniform_on(group: Arc<Psl2Group>, set: &[u32]) -> Result<Self> {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        let w = W::from_ratio(1, s.len() as i64);
        Ok(Self::from_weights(group, s.into_iter().map(|g| (g, w.clone()))))
    }

    pub fn uniform(group: Arc<Psl2Group>) -> Self {
        let n = group.order();
        let w = W::from_ratio(1, n as i64);
        Self::from_storage(group, Storage::Dense(vec![w; n as usize]))
    }

    pub fn group(&self) -> &Arc<Psl2Group> {
        &self.group
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, g: u32) -> W {
        match &self.storage {
            Storage::Sparse(m) => m.get(&g).cloned().unwrap_or_else(W::zero),
            Storage::Dense(v) => v[g as usize].clone(),
        }
    }

    /// Nonzero entries in increasing index order.
    pub fn support(&self) -> Vec<(u32, W)> {
        match &self.storage {
            Storage::Sparse(m) => m.iter().map(|(k, w)| (*k, w.clone())).collect(),
            Storage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(k, w)| (k as u32, w.clone()))
                .collect(),
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Sparse(m) => m.len(),
            Storage::Dense(v) => v.iter().filter(|w| !w.is_zero()).count(),
        }
    }

    pub fn to_dense(&self) -> Vec<W> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(m) => {
                let mut v = vec![W::zero(); self.group.order() as usize];
                for (k, w) in m {
                    v[*k as usize] = w.clone();
                }
                v
            }
        }
    }

    fn values(&self) -> Box<dyn Iterator<Item = &W> + '_> {
        match &self.storage {
            Storage::Sparse(m) => Box::new(m.values()),
            Storage::Dense(v) => Box::new(v.iter()),
        }
    }

    pub fn mass(&self) -> W {
        self.values().cloned().sum()
    }

    pub fn l1(&self) -> W {
        self.values().map(|w| w.abs()).sum()
    }

    pub fn l2_sq(&self) -> W {
        self.values().map(|w| w.clone() * w.clone()).sum()
    }

    pub fn linf(&self) -> W {
        self.values()
            .map(|w| w.abs())
            .fold(W::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values().all(|w| !w.is_negative())
    }

    pub fn is_probability(&self) -> bool {
        self.is_nonnegative() && self.mass().approx_eq(&W::one())
    }

    pub fn is_symmetric(&self) -> bool {
        self.support()
            .iter()
            .all(|(g, w)| self.get(self.group.inv(*g)).approx_eq(w))
    }

    pub fn abs(&self) -> Self {
        self.map(|w| w.abs())
    }

    pub fn map(&self, f: impl Fn(&W) -> W) -> Self {
        Self::from_weights(self.group.clone(), self.support().into_iter().map(|(g, w)| (g, f(&w))))
    }

    /// The same function with `f64` weights.
    pub fn to_f64(&self) -> GroupFunction<f64> {
        GroupFunction::from_weights(
            self.group.clone(),
            self.support().into_iter().map(|(g, w)| (g, w.to_f64())),
        )
    }

    /// f∼(x) = f(x⁻¹).
    pub fn adjoint(&self) -> Self {
        let g = &self.group;
        Self::from_weights(g.clone(), self.support().into_iter().map(|(x, w)| (g.inv(x), w)))
    }

    /// Restriction to the elements where `keep` holds.
    pub fn restrict(&self, keep: impl Fn(u32, &W) -> bool) -> Self {
        Self::from_weights(
            self.group.clone(),
            self.support().into_iter().filter(|(g, w)| keep(*g, w)),
        )
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.group.p() != other.group.p() {
            return Err(Error::ContextMismatch(self.group.p(), other.group.p()));
        }
        Ok(())
    }

    /// (f ∗ φ)(x) = Σ_g f(g) φ(g⁻¹x).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let g = &self.group;
        let n = g.order() as usize;
        let lhs = self.support();
        let rhs = other.support();
        if lhs.len() * rhs.len() < n {
            let mut map: BTreeMap<u32, W> = BTreeMap::new();
            for (x, fx) in &lhs {
                for (y, gy) in &rhs {
                    *map.entry(g.mul(*x, *y)).or_insert_with(W::zero) += &(fx.clone() * gy.clone());
                }
            }
            return Ok(Self::from_storage(g.clone(), Storage::Sparse(map)));
        }
        let dense = other.to_dense();
        let inverses: Vec<(u32, &W)> = lhs.iter().map(|(x, w)| (g.inv(*x), w)).collect();
        let out: Vec<W> = (0..n as u32)
            .into_par_iter()
            .map(|z| {
                let mut acc = W::zero();
                for (xi, fx) in &inverses {
                    let v = &dense[g.mul(*xi, z) as usize];
                    if !v.is_zero() {
                        acc += &((*fx).clone() * v.clone());
                    }
                }
                acc
            })
            .collect();
        Ok(Self::from_storage(g.clone(), Storage::Dense(out)))
    }

    /// μ^(2^k) by k successive squarings.
    pub fn power_2k(&self, k: u32) -> Result<Self> {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.convolve(&f)?;
        }
        Ok(f)
    }

    /// ‖f − 1/|G|‖₂², which equals ‖f‖₂² − 1/|G| for a probability measure.
    pub fn deviation_from_uniform(&self) -> W {
        let n = self.group.order() as usize;
        let u = W::from_ratio(1, n as i64);
        let support = self.support();
        let mut acc: W = support
            .iter()
            .map(|(_, w)| {
                let d = w.clone() - u.clone();
                d.clone() * d
            })
            .sum();
        let missing: W = from_count((n - support.len()) as u64);
        acc += &(missing * u.clone() * u);
        acc
    }
}

/// One squaring step of a flattening profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningStep<W> {
    pub k: u32,
    pub l2_sq: W,
    pub deviation: W,
    pub mass: W,
    pub symmetric: bool,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningProfile<W> {
    pub order: u32,
    pub steps: Vec<FlatteningStep<W>>,
}

impl<W: Weight> FlatteningProfile<W> {
    /// deviation_{k+1} / deviation_k.
    pub fn decay_ratios(&self) -> Vec<f64> {
        self.steps
            .windows(2)
            .map(|w| w[1].deviation.to_f64() / w[0].deviation.to_f64())
            .collect()
    }

    /// Strict decrease at each step whose deviation is still ≥ `floor`;
    /// true only if the floor is eventually reached.
    pub fn strictly_decreasing_until(&self, floor: f64) -> bool {
        let mut reached = false;
        for w in self.steps.windows(2) {
            if w[0].deviation.to_f64() < floor {
                reached = true;
                break;
            }
            if w[1].deviation >= w[0].deviation {
                return false;
            }
        }
        reached || self.steps.last().is_some_and(|s| s.deviation.to_f64() < floor)
    }

    pub fn conserved(&self) -> bool {
        self.steps.iter().all(|s| s.symmetric && s.mass.approx_eq(&W::one()))
    }

    /// Slope of −ln(deviation) against k over the steps above `floor`.
    pub fn decay_rate(&self, floor: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .steps
            .iter()
            .filter(|s| s.deviation.to_f64() >= floor && s.deviation.to_f64() > 0.0)
            .map(|s| (s.k as f64, -s.deviation.to_f64().ln()))
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        linear_fit(&xs, &ys).ok().map(|f| f.slope)
    }

    /// c in deviation ≈ K^{−ck} for a given K.
    pub fn exponent_for(&self, k_param: f64, floor: f64) -> Option<f64> {
        (k_param > 1.0)
            .then(|| self.decay_rate(floor).map(|r| r / k_param.ln()))
            .flatten()
    }
}

pub fn flattening_profile<W: Weight>(mu: &GroupFunction<W>, k_max: u32) -> Result<FlatteningProfile<W>> {
    let mut steps = Vec::with_capacity(k_max as usize + 1);
    let mut f = mu.clone();
    for k in 0..=k_max {
        if k > 0 {
            f = f.convolve(&f)?;
        }
        steps.push(FlatteningStep {
            k,
            l2_sq: f.l2_sq(),
            deviation: f.deviation_from_uniform(),
            mass: f.mass(),
            symmetric: f.is_symmetric(),
            support: f.support_len(),
        });
    }
    Ok(FlatteningProfile {
        order: mu.group().order(),
        steps,
    })
}

/// Γ for [`subgroup_mass`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSpec {
    Standard(StandardSubgroup),
    /// Explicit PSL₂ indices of a subgroup.
    Elements(Vec<u32>),
}

/// μ(gΓ).
pub fn subgroup_mass<W: Weight>(mu: &GroupFunction<W>, g: &Mat2, spec: &SubgroupSpec) -> Result<W> {
    let group = mu.group();
    let ctx = group.ctx();
    match spec {
        SubgroupSpec::Standard(h) => {
            let gi = ctx.mat_inv(g).ok_or(Error::Determinant { det: 0, expected: "1" })?;
            Ok(mu
                .support()
                .into_iter()
                .filter(|(x, _)| h.contains(ctx, &ctx.mat_mul(&gi, group.elem(*x).rep())))
                .map(|(_, w)| w)
                .sum())
        }
        SubgroupSpec::Elements(elems) => {
            let gi = group.index_of(g)?;
            let mut coset: Vec<u32> = elems.iter().map(|&h| group.mul(gi, h)).collect();
            coset.sort_unstable();
            coset.dedup();
            Ok(coset.into_iter().map(|x| mu.get(x)).sum())
        }
    }
}

/// E(A) for A ⊆ F_p^*.
pub fn mult_energy_residues(ctx: &PrimeContext, a: &ResidueSet) -> Result<u64> {
    if a.contains(0) {
        return Err(Error::InvalidParameter("0 is not invertible".into()));
    }
    let mut r = vec![0u64; ctx.p() as usize];
    for x in a.iter() {
        for y in a.iter() {
            r[ctx.mul(x, y) as usize] += 1;
        }
    }
    Ok(r.iter().map(|c| c * c).sum())
}

/// E(A) for a set of PSL₂ elements.
pub fn mult_energy_elements(group: &Psl2Group, a: &[u32]) -> u64 {
    let mut a = a.to_vec();
    a.sort_unstable();
    a.dedup();
    let mut r: BTreeMap<u32, u64> = BTreeMap::new();
    for &x in &a {
        for &y in &a {
            *r.entry(group.mul(x, y)).or_insert(0) += 1;
        }
    }
    r.values().map(|c| c * c).sum()
}

/// Output of the weighted BSG extraction with λ = 1/M and Λ = √M.
#[derive(Debug, Clone, PartialEq)]
pub struct BsgReport<W> {
    pub m: W,
    pub l1: W,
    pub l2_sq: W,
    pub conv_l2_sq: W,
    pub set: Vec<u32>,
    pub energy: u64,
    /// |A| ≤ ‖ν‖₁ M / ‖ν‖₂² (Markov).
    pub markov: bool,
    /// ν(x) ≥ ‖ν‖₂²/M² on A.
    pub pointwise: bool,
    /// |A|² ≤ E(A) ≤ |A|³.
    pub energy_window: bool,
    /// ‖ν₁‖₂² ≤ λ‖ν‖₂²‖ν₁‖₁.
    pub low_part: bool,
    /// ‖ν₃‖₁ ≤ ‖ν₃‖₂² / (Λ‖ν‖₂²).
    pub high_part: bool,
    /// |A| M ‖ν‖₂², the implied constant in the lower size bound.
    pub c_size_lower: f64,
    /// |A| ‖ν‖₂² / M², the implied constant in the upper size bound.
    pub c_size_upper: f64,
    /// min_A ν · M² / ‖ν‖₂².
    pub c_pointwise: f64,
    /// E(A) M³ ‖ν‖₂⁶.
    pub c_energy: f64,
    /// E(A) M⁹ / |A|³.
    pub c_energy_cubic: f64,
}

impl<W> BsgReport<W> {
    pub fn passed(&self) -> bool {
        !self.set.is_empty() && self.markov && self.pointwise && self.energy_window && self.low_part && self.high_part
    }
}

pub fn bsg_extract<W: Weight>(nu: &GroupFunction<W>, m: W) -> Result<BsgReport<W>> {
    if m <= W::one() {
        return Err(Error::InvalidParameter("M must exceed 1".into()));
    }
    let nu = nu.abs();
    let l1 = nu.l1();
    if !l1.le_tol(&W::from_ratio(2, 1)) {
        return Err(Error::HypothesisFailed(format!("‖ν‖₁ = {} > 2", l1.to_f64())));
    }
    let s = nu.l2_sq();
    let conv = nu.convolve(&nu)?.l2_sq();
    if s.is_zero() || conv.clone() * m.clone() < s {
        return Err(Error::HypothesisFailed(format!(
            "‖ν∗ν‖₂² = {} < ‖ν‖₂²/M = {}",
            conv.to_f64(),
            (s.clone() / m.clone()).to_f64()
        )));
    }
    let level = s.clone() / m.clone();
    let support = nu.support();
    let set: Vec<u32> = support.iter().filter(|(_, w)| *w >= level).map(|(g, _)| *g).collect();
    let a_len: W = from_count(set.len() as u64);
    let min_a = support
        .iter()
        .filter(|(_, w)| *w >= level)
        .map(|(_, w)| w.clone())
        .fold(None, |acc: Option<W>, w| match acc {
            Some(a) if a <= w => Some(a),
            _ => Some(w),
        })
        .unwrap_or_else(W::zero);
    let m2 = m.clone() * m.clone();
    let markov = (a_len.clone() * level.clone()).le_tol(&l1);
    let pointwise = !set.is_empty() && (s.clone() / m2.clone()).le_tol(&min_a);

    let low = nu.restrict(|_, w| *w < level);
    let low_part = low.l2_sq().le_tol(&(level.clone() * low.l1()));
    // ν(x) > √M ‖ν‖₂² ⇔ ν(x)² > M ‖ν‖₂⁴ for ν ≥ 0
    let s2 = s.clone() * s.clone();
    let high = nu.restrict(|_, w| w.clone() * w.clone() > m.clone() * s2.clone());
    let (h1, h2) = (high.l1(), high.l2_sq());
    let high_part = (h1.clone() * h1 * m.clone() * s2.clone()).le_tol(&(h2.clone() * h2));

    let energy = mult_energy_elements(nu.group(), &set);
    let n = set.len() as u64;
    let energy_window = n * n <= energy && energy <= n * n * n;

    let (mf, sf, nf, ef) = (m.to_f64(), s.to_f64(), n as f64, energy as f64);
    Ok(BsgReport {
        c_size_lower: nf * mf * sf,
        c_size_upper: nf * sf / (mf * mf),
        c_pointwise: if set.is_empty() {
            0.0
        } else {
            min_a.to_f64() * mf * mf / sf
        },
        c_energy: ef * mf.powi(3) * sf.powi(3),
        c_energy_cubic: if n == 0 { 0.0 } else { ef * mf.powi(9) / nf.powi(3) },
        m,
        l1,
        l2_sq: s,
        conv_l2_sq: conv,
        set,
        energy,
        markov,
        pointwise,
        energy_window,
        low_part,
        high_part,
    })
}

/// Subtracts the mean.
pub fn balance<W: Weight>(f: &[W]) -> Vec<W> {
    let n = W::from_ratio(f.len() as i64, 1);
    let mean = f.iter().cloned().sum::<W>() / n;
    f.iter().map(|x| x.clone() - mean.clone()).collect()
}

fn check_mean_zero<W: Weight>(f: &[W]) -> Result<()> {
    let s: W = f.iter().cloned().sum();
    let ok = if W::EXACT {
        s.is_zero()
    } else {
        s.to_f64().abs() <= crate::scalar::FLOAT_TOLERANCE * f.len().max(1) as f64
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotMeanZero(s.to_f64()))
    }
}

pub fn dot<W: Weight>(a: &[W], b: &[W]) -> W {
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).sum()
}

/// (μ ∗ f)(x) = Σ_g μ(g) f(g⁻¹x) for f on P¹, indexed by projective slot.
pub fn convolve_points<W: Weight>(mu: &GroupFunction<W>, f: &[W]) -> Vec<W> {
    let group = mu.group();
    let slots = group.p() as usize + 1;
    assert_eq!(f.len(), slots, "function on P¹ has wrong length");
    let mut out = vec![W::zero(); slots];
    for (g, w) in mu.support() {
        for (y, fy) in f.iter().enumerate() {
            if !fy.is_zero() {
                out[group.act(g, y)] += &(w.clone() * fy.clone());
            }
        }
    }
    out
}

/// ⟨μ ∗ 1_W, 1_W⟩ = Σ_g μ(g)|W ∩ gW|.
pub fn incidence_pairing<W: Weight>(mu: &GroupFunction<W>, w: &ProjSet) -> W {
    let group = mu.group();
    let slots: Vec<usize> = w.iter().collect();
    mu.support()
        .into_iter()
        .map(|(g, m)| {
            let hits = slots.iter().filter(|&&y| w.contains(group.act(g, y))).count();
            m * from_count(hits as u64)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// PSL₂(F_p) on P¹(F_p), doubly transitive with |X| = p + 1.
    ProjectiveLine,
    /// PSL₂(F_p) on itself by left multiplication.
    Regular,
}

/// Both sides of |⟨μ∗f, h⟩| ≤ C‖μ‖₂‖f‖₂‖h‖₂ and ‖μ∗f‖₂ ≤ C‖μ‖₂‖f‖₂.
/// All comparisons are made between squares in the scalar type.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasirandomReport {
    pub action: Action,
    /// C² used for the verdict.
    pub constant_sq: f64,
    /// The other constant: p² for the P¹ action, |G|/(|G|−1) for the
    /// regular action.
    pub alt_constant_sq: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub norm_lhs: f64,
    pub norm_rhs: f64,
    pub norm_pass: bool,
    pub alt_pass: bool,
    /// √(|G|/(|X|−1)) ≤ p for the P¹ action.
    pub constant_le_p: bool,
}

#[allow(clippy::too_many_arguments)]
fn quasirandom_verdict<W: Weight>(
    action: Action,
    constant_sq: W,
    alt_constant_sq: W,
    p_sq: W,
    ip: W,
    conv_norm_sq: W,
    mu2: W,
    f2: W,
    h2: W,
) -> QuasirandomReport {
    let ip_sq = ip.clone() * ip.clone();
    let base = mu2 * f2;
    let rhs_sq = constant_sq.clone() * base.clone() * h2.clone();
    let norm_rhs_sq = constant_sq.clone() * base.clone();
    QuasirandomReport {
        action,
        constant_sq: constant_sq.to_f64(),
        alt_constant_sq: alt_constant_sq.to_f64(),
        lhs: ip.abs().to_f64(),
        rhs: rhs_sq.to_f64().sqrt(),
        pass: ip_sq.le_tol(&rhs_sq),
        norm_lhs: conv_norm_sq.to_f64().sqrt(),
        norm_rhs: norm_rhs_sq.to_f64().sqrt(),
        norm_pass: conv_norm_sq.le_tol(&norm_rhs_sq),
        alt_pass: ip_sq.le_tol(&(alt_constant_sq * base * h2)),
        constant_le_p: constant_sq.le_tol(&p_sq),
    }
}

/// f, h: mean-zero functions on P¹ indexed by slot.
pub fn quasirandom_check_points<W: Weight>(mu: &GroupFunction<W>, f: &[W], h: &[W]) -> Result<QuasirandomReport> {
    check_mean_zero(f)?;
    check_mean_zero(h)?;
    let group = mu.group();
    let p = group.p() as i64;
    let conv = convolve_points(mu, f);
    let ip = dot(&conv, h);
    let norm_sq = dot(&conv, &conv);
    Ok(quasirandom_verdict(
        Action::ProjectiveLine,
        W::from_ratio(group.order() as i64, p),
        W::from_ratio(p * p, 1),
        W::from_ratio(p * p, 1),
        ip,
        norm_sq,
        mu.l2_sq(),
        dot(f, f),
        dot(h, h),
    ))
}

/// f, h: mean-zero functions on the group; the verdict uses C = p.
pub fn quasirandom_check_group<W: Weight>(
    mu: &GroupFunction<W>,
    f: &GroupFunction<W>,
    h: &GroupFunction<W>,
) -> Result<QuasirandomReport> {
    let (fd, hd) = (f.to_dense(), h.to_dense());
    check_mean_zero(&fd)?;
    check_mean_zero(&hd)?;
    let conv = mu.convolve(f)?.to_dense();
    let p = mu.group().p() as i64;
    let n = mu.group().order() as i64;
    Ok(quasirandom_verdict(
        Action::Regular,
        W::from_ratio(p * p, 1),
        W::from_ratio(n, n - 1),
        W::from_ratio(p * p, 1),
        dot(&conv, &hd),
        dot(&conv, &conv),
        mu.l2_sq(),
        dot(&fd, &fd),
        dot(&hd, &hd),
    ))
}

/// The two alternatives for ⟨μ∗W, W⟩ and for the balanced function f_W.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceBoundReport {
    pub w_len: usize,
    pub linf: f64,
    pub pairing: f64,
    pub balanced_pairing: f64,
    /// ⟨μ∗W,W⟩ < 4.
    pub small: bool,
    /// ⟨μ∗W,W⟩ ≤ 2‖μ‖∞^{1/3}(|W| − |W|/(p+1))².
    pub bound: bool,
    /// ⟨μ∗W,W⟩ ≤ 2‖μ‖∞^{1/3}|W|².
    pub bound_plain: bool,
    /// ⟨μ∗W,W⟩³ ≤ 4‖μ‖∞|W|⁶, the inequality the counting argument yields.
    pub bound_cubic: bool,
    /// ⟨μ∗f_W,f_W⟩ ≤ 8.
    pub balanced_small: bool,
    /// ⟨μ∗f_W,f_W⟩ ≤ 4‖μ‖∞^{1/3}(|W| − |W|/(p+1))².
    pub balanced_bound: bool,
    /// ⟨μ∗f_W,f_W⟩ ≤ (1−α)²⟨μ∗W,W⟩ + α²⟨μ∗Wᶜ,Wᶜ⟩ with α = |W|/(p+1).
    pub decomposition: bool,
}

impl IncidenceBoundReport {
    pub fn passed(&self) -> bool {
        (self.small || self.bound) && (self.balanced_small || self.balanced_bound) && self.decomposition
    }
}

/// Cube-root bounds are compared after cubing: x ≤ c·ℓ^{1/3}·B ⇔ x³ ≤ c³ℓB³ for x ≥ 0.
pub fn incidence_bound_check<W: Weight>(mu: &GroupFunction<W>, w: &ProjSet) -> IncidenceBoundReport {
    let p = mu.group().p() as i64;
    let q = p + 1;
    let n = w.len() as i64;
    let linf = mu.linf();
    let cube = |x: &W| x.clone() * x.clone() * x.clone();
    let c = |k: i64| W::from_ratio(k, 1);

    let ip = incidence_pairing(mu, w);
    let complement = w.complement();
    let ip_c = incidence_pairing(mu, &complement);
    let indicator: Vec<W> = (0..q as usize)
        .map(|x| if w.contains(x) { W::one() } else { W::zero() })
        .collect();
    let alpha = W::from_ratio(n, q);
    let fw: Vec<W> = indicator.iter().map(|x| x.clone() - alpha.clone()).collect();
    let ipf = dot(&convolve_points(mu, &fw), &fw);

    // B = |W| − |W|/(p+1) = |W|p/(p+1)
    let b = W::from_ratio(n * p, q);
    let b2 = b.clone() * b;
    let b6 = cube(&b2);
    let n2 = c(n * n);
    let n6 = cube(&n2);
    let ip3 = cube(&ip);
    let one_minus = W::one() - alpha.clone();
    let decomposition_rhs = one_minus.clone() * one_minus * ip.clone() + alpha.clone() * alpha * ip_c;
    let nonneg_ipf = if ipf.is_negative() { W::zero() } else { ipf.clone() };
    IncidenceBoundReport {
        w_len: n as usize,
        linf: linf.to_f64(),
        pairing: ip.to_f64(),
        balanced_pairing: ipf.to_f64(),
        small: ip < c(4),
        bound: ip3.le_tol(&(c(8) * linf.clone() * b6.clone())),
        bound_plain: ip3.le_tol(&(c(8) * linf.clone() * n6.clone())),
        bound_cubic: ip3.le_tol(&(c(4) * linf.clone() * n6)),
        balanced_small: ipf.le_tol(&c(8)),
        balanced_bound: cube(&nonneg_ipf).le_tol(&(c(64) * linf * b6)),
        decomposition: ipf.le_tol(&decomposition_rhs),
    }
}

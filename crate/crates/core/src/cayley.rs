//! Reduced words, collision depth and girth of Cayley graphs of PSL₂(F_p),
//! free-group ball counts, return probabilities and integer operator norms.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group_sets::StandardSubgroup;
use crate::modp::{lft_apply, psl2_canonical, Mat2, PrimeContext, ProjPoint, Psl2Elem, Psl2Group};
use crate::scalar::Weight;

/// Letter `2i` is generator i, letter `2i + 1` its inverse.
pub type Letter = u16;

#[inline]
fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

/// A freely reduced word over S ∪ S⁻¹.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if let Some(i) = letters.windows(2).position(|w| w[1] == inverse_letter(w[0])) {
            return Err(Error::InvalidParameter(format!("letters {i} and {} cancel", i + 1)));
        }
        Ok(Self(letters))
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&inverse_letter(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|&l| inverse_letter(l)).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::reduce(self.0.iter().chain(&other.0).copied())
    }

    pub fn evaluate_mod(&self, ctx: &PrimeContext, gens: &[Mat2]) -> Result<Psl2Elem> {
        let letters = mod_letters(ctx, gens)?;
        Ok(self
            .0
            .iter()
            .fold(Psl2Elem::identity(), |acc, &l| acc.mul(&letters[l as usize], ctx)))
    }

    pub fn evaluate_int(&self, gens: &[IntMat2]) -> Result<IntMat2> {
        let letters = int_letters(gens)?;
        Ok(self
            .0
            .iter()
            .fold(IntMat2::identity(), |acc, &l| acc.mul(&letters[l as usize])))
    }
}

fn mod_letters(ctx: &PrimeContext, gens: &[Mat2]) -> Result<Vec<Psl2Elem>> {
    let mut out = Vec::with_capacity(2 * gens.len());
    for g in gens {
        let e = psl2_canonical(ctx, g)?;
        out.push(e);
        out.push(e.inverse(ctx));
    }
    Ok(out)
}

fn int_letters(gens: &[IntMat2]) -> Result<Vec<IntMat2>> {
    let mut out = Vec::with_capacity(2 * gens.len());
    for g in gens {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::InvalidParameter("determinant is not ±1".into()))?;
        out.push(g.clone());
        out.push(inv);
    }
    Ok(out)
}

/// An integer 2×2 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMat2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Inverse when det = ±1.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let adj = Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        };
        if det.is_one() {
            Some(adj)
        } else if (-&det).is_one() {
            Some(adj.neg())
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(), |acc, _| acc.mul(self))
    }

    /// Representative of ±g whose first nonzero entry is positive.
    pub fn sign_canonical(&self) -> Self {
        let lead = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .cloned()
            .unwrap_or_default();
        if lead.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn reduce_mod(&self, ctx: &PrimeContext) -> Mat2 {
        let p = BigInt::from(ctx.p());
        let r = |x: &BigInt| {
            let m = ((x % &p) + &p) % &p;
            m.to_u32().expect("residue fits u32")
        };
        Mat2::new(r(&self.a), r(&self.b), r(&self.c), r(&self.d))
    }

    /// a² + b² + c² + d².
    pub fn frobenius_sq(&self) -> BigInt {
        &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d
    }

    /// Largest singular value: σ² = (F + √(F² − 4det²))/2 with F the
    /// squared Frobenius norm; the discriminant is formed exactly.
    pub fn operator_norm(&self) -> f64 {
        let f = self.frobenius_sq();
        let det = self.det();
        let disc = &f * &f - BigInt::from(4) * &det * &det;
        let ff = f.to_f64().unwrap_or(f64::INFINITY);
        let root = disc.to_f64().unwrap_or(f64::INFINITY).max(0.0).sqrt();
        ((ff + root) / 2.0).sqrt()
    }

    /// (½√F, √F).
    pub fn frobenius_bounds(&self) -> (f64, f64) {
        let s = self.frobenius_sq().to_f64().unwrap_or(f64::INFINITY).sqrt();
        (s / 2.0, s)
    }
}

/// u = (1 2; 0 1).
pub fn u_tilde() -> IntMat2 {
    IntMat2::new(1, 2, 0, 1)
}

/// v = (1 0; 2 1).
pub fn v_tilde() -> IntMat2 {
    IntMat2::new(1, 0, 2, 1)
}

/// T̃(N) = {v^j u^{−j} : 1 ≤ j ≤ N} = {(1, −2j; 2j, 1 − 4j²)}.
pub fn t_tilde(n: u32) -> Vec<IntMat2> {
    (1..=n as i64)
        .map(|j| IntMat2::new(1, -2 * j, 2 * j, 1 - 4 * j * j))
        .collect()
}

/// n(S) = max operator norm.
pub fn max_operator_norm(family: &[IntMat2]) -> f64 {
    family.iter().map(IntMat2::operator_norm).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MargulisBound {
    pub n: f64,
    pub bound: f64,
}

/// log_n(p/2) with n = n(S).
pub fn margulis_bound(p: u64, family: &[IntMat2]) -> Result<MargulisBound> {
    let n = max_operator_norm(family);
    if n <= 1.0 {
        return Err(Error::InvalidParameter(format!("n(S) = {n} ≤ 1")));
    }
    Ok(MargulisBound {
        n,
        bound: (p as f64 / 2.0).ln() / n.ln(),
    })
}

/// ¼ log_N p.
pub fn girth_log_bound(p: u64, n: u32) -> f64 {
    (p as f64).ln() / (n as f64).ln() / 4.0
}

/// Sphere of radius m in the Cayley graph of the free group F_k.
pub fn free_sphere_count(k: u32, m: u32) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    if m == 0 {
        return Ok(1);
    }
    let base = 2 * k as u128 - 1;
    let mut s = 2 * k as u128;
    for _ in 1..m {
        s = s.checked_mul(base).ok_or(Error::Overflow)?;
    }
    Ok(s)
}

pub fn free_ball_count(k: u32, m: u32) -> Result<u128> {
    (0..=m).try_fold(0u128, |acc, j| {
        acc.checked_add(free_sphere_count(k, j)?).ok_or(Error::Overflow)
    })
}

/// Exact return data for the simple random walk on F_k.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnProbability<W> {
    pub k: u32,
    pub m: u32,
    /// p^(2m)(e, e).
    pub value: W,
    /// Σ_g μ^(m)(g)².
    pub sum_squares: W,
    /// ((2k−1)/k²)^m.
    pub kesten: W,
    /// (2/k)^m.
    pub square_sum_bound: W,
}

impl<W: Weight> ReturnProbability<W> {
    pub fn kesten_holds(&self) -> bool {
        self.value.le_tol(&self.kesten)
    }

    pub fn square_sum_holds(&self) -> bool {
        self.sum_squares.le_tol(&self.square_sum_bound)
    }

    pub fn identity_holds(&self) -> bool {
        self.sum_squares.approx_eq(&self.value)
    }
}

pub const RETURN_STEP_CAP: u32 = 24;

/// Dynamic programming on the distance from the identity.
pub fn return_probability<W: Weight>(k: u32, m: u32) -> Result<ReturnProbability<W>> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be ≥ 2".into()));
    }
    if m > RETURN_STEP_CAP {
        return Err(Error::InvalidParameter(format!(
            "m = {m} exceeds cap {RETURN_STEP_CAP}"
        )));
    }
    let twok = 2 * k as i64;
    let back = W::from_ratio(1, twok);
    let forward = W::from_ratio(twok - 1, twok);
    let steps = 2 * m as usize;
    let mut dist = vec![W::zero(); steps + 2];
    dist[0] = W::one();
    let mut at_m = dist.clone();
    for t in 0..steps {
        let mut next = vec![W::zero(); steps + 2];
        next[1] += &dist[0];
        for d in 1..=t.min(steps) {
            if dist[d].is_zero() {
                continue;
            }
            next[d - 1] += &(dist[d].clone() * back.clone());
            next[d + 1] += &(dist[d].clone() * forward.clone());
        }
        dist = next;
        if t + 1 == m as usize {
            at_m = dist.clone();
        }
    }
    if m == 0 {
        at_m = dist.clone();
    }
    let mut sum_squares = W::zero();
    for (d, pd) in at_m.iter().enumerate().take(m as usize + 1) {
        if pd.is_zero() {
            continue;
        }
        let sphere = free_sphere_count(k, d as u32)?;
        let sphere = i64::try_from(sphere).map_err(|_| Error::Overflow)?;
        sum_squares += &(pd.clone() * pd.clone() / W::from_ratio(sphere, 1));
    }
    let pow = |x: W| (0..m).fold(W::one(), |acc, _| acc * x.clone());
    let kk = k as i64;
    Ok(ReturnProbability {
        k,
        m,
        value: dist[0].clone(),
        sum_squares,
        kesten: pow(W::from_ratio(2 * kk - 1, kk * kk)),
        square_sum_bound: pow(W::from_ratio(2, kk)),
    })
}

/// Rejects generators g with g ∈ S⁻¹ (including g of order 2).
pub fn check_inverse_free(ctx: &PrimeContext, gens: &[Mat2]) -> Result<()> {
    let letters = mod_letters(ctx, gens)?;
    let forward: HashMap<Psl2Elem, usize> = letters.iter().step_by(2).enumerate().map(|(i, e)| (*e, i)).collect();
    for (i, inv) in letters.iter().skip(1).step_by(2).enumerate() {
        if forward.contains_key(inv) {
            return Err(Error::InverseOverlap(i));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionReport {
    /// Largest m such that reduced words of length ≤ m evaluate injectively.
    pub depth: u32,
    /// False when the depth or memory cap stopped the search: `depth` is
    /// then only a lower bound.
    pub exact: bool,
    /// Two distinct reduced words of length ≤ depth + 1 with equal value.
    pub witness: Option<(ReducedWord, ReducedWord)>,
    pub words: u64,
}

impl CollisionReport {
    /// Shortest length at which two distinct words collide.
    pub fn collision_length(&self) -> Option<u32> {
        self.exact.then_some(self.depth + 1)
    }

    /// The girth g of the Cayley graph satisfies 2·depth + 1 ≤ g ≤ 2·depth + 2.
    pub fn girth_window(&self) -> Option<(u32, u32)> {
        self.exact.then_some((2 * self.depth + 1, 2 * self.depth + 2))
    }

    pub fn verdict(&self) -> String {
        if self.exact {
            self.depth.to_string()
        } else {
            format!("≥{}", self.depth)
        }
    }
}

pub const WORD_MEMORY_CAP: u64 = 100_000_000;

struct WordTree {
    parent: Vec<u32>,
    letter: Vec<Letter>,
}

impl WordTree {
    fn word(&self, mut node: u32) -> ReducedWord {
        let mut out = Vec::new();
        while node != 0 {
            out.push(self.letter[node as usize]);
            node = self.parent[node as usize];
        }
        out.reverse();
        ReducedWord(out)
    }
}

/// Evaluates the word ball layer by layer and stops at the first collision.
pub fn collision_depth(ctx: &PrimeContext, gens: &[Mat2], depth_cap: u32, memory_cap: u64) -> Result<CollisionReport> {
    if gens.is_empty() {
        return Err(Error::InvalidParameter("empty generating set".into()));
    }
    check_inverse_free(ctx, gens)?;
    let letters = mod_letters(ctx, gens)?;
    let nl = letters.len() as u64;
    let mut tree = WordTree {
        parent: vec![0],
        letter: vec![Letter::MAX],
    };
    let mut elems = vec![Psl2Elem::identity()];
    let mut seen: HashMap<Psl2Elem, u32> = HashMap::from([(Psl2Elem::identity(), 0)]);
    let (mut start, mut end) = (0usize, 1usize);
    for m in 1..=depth_cap {
        let branch = if m == 1 { nl } else { nl - 1 };
        let projected = elems.len() as u64 + (end - start) as u64 * branch;
        if projected > memory_cap {
            return Ok(CollisionReport {
                depth: m - 1,
                exact: false,
                witness: None,
                words: elems.len() as u64,
            });
        }
        let layer: Vec<(Psl2Elem, u32, Letter)> = (start..end)
            .into_par_iter()
            .flat_map_iter(|node| {
                let last = tree.letter[node];
                let e = elems[node];
                let letters = &letters;
                (0..nl as Letter)
                    .filter(move |&l| node == 0 || l != inverse_letter(last))
                    .map(move |l| (e.mul(&letters[l as usize], ctx), node as u32, l))
            })
            .collect();
        for (e, parent, l) in layer {
            let id = elems.len() as u32;
            tree.parent.push(parent);
            tree.letter.push(l);
            elems.push(e);
            if let Some(&other) = seen.get(&e) {
                return Ok(CollisionReport {
                    depth: m - 1,
                    exact: true,
                    witness: Some((tree.word(other), tree.word(id))),
                    words: elems.len() as u64,
                });
            }
            seen.insert(e, id);
        }
        start = end;
        end = elems.len();
    }
    Ok(CollisionReport {
        depth: depth_cap,
        exact: false,
        witness: None,
        words: elems.len() as u64,
    })
}

/// Girth of Cay(PSL₂(F_p), S ∪ S⁻¹) by breadth-first search from the
/// identity; exact because the graph is vertex-transitive.
pub fn bfs_girth(group: &Psl2Group, gens: &[Mat2]) -> Result<Option<u32>> {
    let ctx = group.ctx();
    check_inverse_free(ctx, gens)?;
    let mut letters = Vec::with_capacity(2 * gens.len());
    for g in gens {
        let i = group.index_of(g)?;
        letters.push(i);
        letters.push(group.inv(i));
    }
    let n = group.order() as usize;
    let mut dist = vec![u32::MAX; n];
    let mut via = vec![Letter::MAX; n];
    let root = group.identity() as usize;
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut best: Option<u32> = None;
    while let Some(x) = queue.pop_front() {
        if best.is_some_and(|b| 2 * dist[x] + 1 >= b) {
            break;
        }
        for (l, &s) in letters.iter().enumerate() {
            let l = l as Letter;
            if x != root && l == inverse_letter(via[x]) {
                continue;
            }
            let y = group.mul(x as u32, s) as usize;
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                via[y] = l;
                queue.push_back(y);
            } else {
                let cycle = dist[x] + dist[y] + 1;
                best = Some(best.map_or(cycle, |b| b.min(cycle)));
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeGenerationReport {
    pub depth: u32,
    pub free: bool,
    pub words: u64,
    pub witness: Option<(ReducedWord, ReducedWord)>,
}

/// Whether distinct reduced words of length ≤ depth give distinct integer
/// matrices up to sign.
pub fn free_generation_check(gens: &[IntMat2], depth: u32) -> Result<FreeGenerationReport> {
    let letters = int_letters(gens)?;
    let nl = letters.len() as Letter;
    let mut seen: HashMap<IntMat2, ReducedWord> = HashMap::new();
    seen.insert(IntMat2::identity(), ReducedWord::empty());
    let mut frontier = vec![(ReducedWord::empty(), IntMat2::identity())];
    let mut words = 1u64;
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * nl as usize);
        for (w, g) in &frontier {
            for l in 0..nl {
                if w.0.last().is_some_and(|&last| l == inverse_letter(last)) {
                    continue;
                }
                let mut letters_w = w.0.clone();
                letters_w.push(l);
                let word = ReducedWord(letters_w);
                let h = g.mul(&letters[l as usize]);
                let key = h.sign_canonical();
                words += 1;
                if let Some(other) = seen.get(&key) {
                    return Ok(FreeGenerationReport {
                        depth,
                        free: false,
                        words,
                        witness: Some((other.clone(), word)),
                    });
                }
                seen.insert(key, word.clone());
                next.push((word, h));
            }
        }
        frontier = next;
    }
    Ok(FreeGenerationReport {
        depth,
        free: true,
        words,
        witness: None,
    })
}

/// supp μ^(m) for μ uniform on S ∪ S⁻¹: all products of exactly m letters.
pub fn walk_support(ctx: &PrimeContext, gens: &[Mat2], m: u32) -> Result<Vec<Psl2Elem>> {
    let letters = mod_letters(ctx, gens)?;
    let mut current: HashSet<Psl2Elem> = HashSet::from([Psl2Elem::identity()]);
    for _ in 0..m {
        current = current
            .par_iter()
            .flat_map_iter(|e| letters.iter().map(move |l| e.mul(l, ctx)))
            .collect();
    }
    let mut out: Vec<Psl2Elem> = current.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// H for [`nonconcentration_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeSubgroup {
    Trivial,
    Standard(StandardSubgroup),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub m: u32,
    pub support: usize,
    pub count: usize,
    /// m⁶.
    pub bound: u64,
}

impl ProbeReport {
    pub fn within_bound(&self) -> bool {
        self.count as u64 <= self.bound
    }
}

/// |supp μ^(m) ∩ gH| given a precomputed support.
pub fn coset_count(ctx: &PrimeContext, support: &[Psl2Elem], subgroup: ProbeSubgroup, g: &Mat2) -> Result<usize> {
    let gi = psl2_canonical(ctx, g)?.inverse(ctx);
    Ok(match subgroup {
        ProbeSubgroup::Trivial => support.iter().filter(|h| gi.mul(h, ctx).is_identity()).count(),
        ProbeSubgroup::Standard(s) => support.iter().filter(|h| s.contains(ctx, gi.mul(h, ctx).rep())).count(),
    })
}

pub fn nonconcentration_probe(
    ctx: &PrimeContext,
    gens: &[Mat2],
    m: u32,
    subgroup: ProbeSubgroup,
    g: &Mat2,
) -> Result<ProbeReport> {
    let support = walk_support(ctx, gens, m)?;
    Ok(ProbeReport {
        m,
        support: support.len(),
        count: coset_count(ctx, &support, subgroup, g)?,
        bound: (m as u64).pow(6),
    })
}

/// Evidence that ⟨S⟩ = PSL₂(F_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    /// ⟨S⟩ acts transitively on P¹(F_p).
    pub transitive: bool,
    /// Some element of S ∪ S·S is unipotent or split of order > 2.
    pub element_witness: bool,
    /// Transitive with such an element; for p > 59 this forces ⟨S⟩ = PSL₂.
    pub heuristic: bool,
    /// Exact closure, when the group is small enough to enumerate.
    pub closure_order: Option<u64>,
    pub generates: bool,
}

pub const CLOSURE_ORDER_LIMIT: u64 = 1 << 21;

pub fn generation_probe(ctx: &PrimeContext, gens: &[Mat2]) -> Result<GenerationReport> {
    let p = ctx.p();
    let letters = mod_letters(ctx, gens)?;
    let mut orbit = vec![false; p as usize + 1];
    let start = ProjPoint::Infinity.index(p);
    orbit[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = 1;
    while let Some(x) = queue.pop_front() {
        for l in &letters {
            let y = lft_apply(ctx, l.rep(), ProjPoint::from_index(x, p)).index(p);
            if !orbit[y] {
                orbit[y] = true;
                reached += 1;
                queue.push_back(y);
            }
        }
    }
    let transitive = reached == p as usize + 1;
    let mut candidates: Vec<Psl2Elem> = letters.clone();
    for a in &letters {
        for b in &letters {
            candidates.push(a.mul(b, ctx));
        }
    }
    let element_witness = candidates.iter().any(|e| {
        let t = ctx.trace(e.rep());
        let disc = ctx.sub(ctx.mul(t, t), 4);
        let sq = e.mul(e, ctx);
        !e.is_identity() && (disc == 0 || (ctx.is_square(disc) && !sq.is_identity()))
    });
    let heuristic = transitive && element_witness;
    let order = crate::modp::psl2_order(p as u64);
    let closure_order = (order <= CLOSURE_ORDER_LIMIT).then(|| {
        let group = Psl2Group::shared(p as u64).expect("order below limit");
        let idx: Vec<u32> = letters.iter().map(|e| e.index(ctx)).collect();
        let mut seen = vec![false; order as usize];
        let id = group.identity();
        seen[id as usize] = true;
        let mut queue = VecDeque::from([id]);
        let mut count = 1u64;
        while let Some(x) = queue.pop_front() {
            for &s in &idx {
                let y = group.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    });
    let generates = match closure_order {
        Some(c) => c == order,
        None => heuristic && p > 59,
    };
    Ok(GenerationReport {
        transitive,
        element_witness,
        heuristic,
        closure_order,
        generates,
    })
}

/// T mod p as matrices over F_p.
pub fn t_mod_p(ctx: &PrimeContext, n: u32) -> Vec<Mat2> {
    t_tilde(n).iter().map(|g| g.reduce_mod(ctx)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::{BigRational, Ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = Ratio<i128>;

    #[test]
    fn ball_counts() {
        assert_eq!(free_sphere_count(2, 1).unwrap(), 4);
        assert_eq!(free_sphere_count(2, 2).unwrap(), 12);
        assert_eq!(free_sphere_count(5, 3).unwrap(), 810);
        assert_eq!(free_ball_count(2, 2).unwrap(), 17);
        assert_eq!(free_ball_count(1, 4).unwrap(), 9);
        assert!(free_sphere_count(0, 1).is_err());
        assert_eq!(free_sphere_count(10, 200), Err(Error::Overflow));
    }

    #[test]
    fn return_probability_small() {
        let r = return_probability::<Q>(2, 1).unwrap();
        assert_eq!(r.value, Q::new(1, 4));
        assert_eq!(r.kesten, Q::new(3, 4));
        assert_eq!(r.square_sum_bound, Q::from_integer(1));
        // two steps out and back, or out, back, out, back: 1/4·1/4 + 3/4·1/12·...
        let r2 = return_probability::<Q>(2, 2).unwrap();
        assert_eq!(r2.value, Q::new(1, 16) + Q::new(3, 4) * Q::new(1, 4) * Q::new(1, 4));
        assert!(r2.kesten_holds() && r2.square_sum_holds() && r2.identity_holds());
        assert!(return_probability::<Q>(1, 1).is_err());
    }

    fn brute_return(k: u32, steps: u32) -> Q {
        // enumerate all letter sequences, reduce, count empties
        let nl = 2 * k as u64;
        let total = nl.pow(steps);
        let mut hits = 0i128;
        for code in 0..total {
            let mut c = code;
            let letters = (0..steps).map(|_| {
                let l = (c % nl) as Letter;
                c /= nl;
                l
            });
            if ReducedWord::reduce(letters).is_empty() {
                hits += 1;
            }
        }
        Q::new(hits, total as i128)
    }

    #[test]
    fn return_probability_matches_enumeration() {
        for (k, m) in [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3)] {
            assert_eq!(return_probability::<Q>(k, m).unwrap().value, brute_return(k, 2 * m));
        }
    }

    #[test]
    fn return_probability_bounds_grid() {
        for k in 2..=10 {
            for m in 1..=8 {
                let r = return_probability::<BigRational>(k, m).unwrap();
                assert!(
                    r.kesten_holds() && r.square_sum_holds() && r.identity_holds(),
                    "k={k} m={m}"
                );
            }
        }
    }

    #[test]
    fn operator_norm_examples() {
        let id = IntMat2::identity();
        assert!((id.operator_norm() - 1.0).abs() < 1e-12);
        let g = IntMat2::new(1, 2, 0, 1);
        assert!((g.operator_norm() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        let (lo, hi) = g.frobenius_bounds();
        assert!(lo <= g.operator_norm() && g.operator_norm() <= hi);
        let t1 = &t_tilde(1)[0];
        assert_eq!(*t1, IntMat2::new(1, -2, 2, -3));
        assert_eq!(t1.frobenius_sq(), BigInt::from(18));
        for (j, t) in t_tilde(8).iter().enumerate() {
            let j = j as i64 + 1;
            assert_eq!(t.frobenius_sq(), BigInt::from(2 + 16 * j.pow(4)));
            assert!(t.frobenius_bounds().1 <= 5.0 * (j * j) as f64);
        }
    }

    #[test]
    fn t_tilde_identity() {
        let (u, v) = (u_tilde(), v_tilde());
        let uinv = u.inverse().unwrap();
        for (j, t) in t_tilde(6).iter().enumerate() {
            let j = j as u32 + 1;
            assert_eq!(v.pow(j).mul(&uinv.pow(j)), *t);
            assert_eq!(t.det(), BigInt::one());
        }
    }

    #[test]
    fn sandwich_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-1_000_000..=1_000_000)).collect();
            let g = IntMat2::new(e[0], e[1], e[2], e[3]);
            let n = g.operator_norm();
            let (lo, hi) = g.frobenius_bounds();
            assert!(lo <= n * (1.0 + 1e-12) && n <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn free_generation() {
        assert!(free_generation_check(&[u_tilde()], 10).unwrap().free);
        let uv = free_generation_check(&[u_tilde(), v_tilde()], 6).unwrap();
        assert!(uv.free);
        assert_eq!(uv.words as u128, free_ball_count(2, 6).unwrap());
        assert!(free_generation_check(&t_tilde(3), 4).unwrap().free);
        // u = (1 1; 0 1) and s = (0 −1; 1 0) satisfy (su)³ = ±I
        let s = IntMat2::new(0, -1, 1, 0);
        let r = free_generation_check(&[IntMat2::new(1, 1, 0, 1), s], 6).unwrap();
        assert!(!r.free);
        assert!(free_generation_check(&[IntMat2::new(2, 0, 0, 1)], 2).is_err());
    }

    #[test]
    fn words_respect_group_law() {
        let ctx = PrimeContext::new(101).unwrap();
        let gens = t_mod_p(&ctx, 5);
        let ints = t_tilde(5);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let rand_word =
            |rng: &mut ChaCha8Rng| ReducedWord::reduce((0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..10)));
        for _ in 0..200 {
            let (w1, w2) = (rand_word(&mut rng), rand_word(&mut rng));
            let w = w1.concat(&w2);
            let lhs = w.evaluate_mod(&ctx, &gens).unwrap();
            let rhs = w1
                .evaluate_mod(&ctx, &gens)
                .unwrap()
                .mul(&w2.evaluate_mod(&ctx, &gens).unwrap(), &ctx);
            assert_eq!(lhs, rhs);
            let int = w.evaluate_int(&ints).unwrap();
            assert_eq!(psl2_canonical(&ctx, &int.reduce_mod(&ctx)).unwrap(), lhs);
            assert!(w.concat(&w.inverse()).is_empty());
        }
        assert!(ReducedWord::new(vec![0, 1]).is_err());
        assert!(ReducedWord::new(vec![0, 2, 3, 5]).is_err());
    }

    #[test]
    fn involution_flagged() {
        let ctx = PrimeContext::new(7).unwrap();
        let s = ctx.mat(0, -1, 1, 0);
        assert_eq!(
            collision_depth(&ctx, &[s], 4, WORD_MEMORY_CAP),
            Err(Error::InverseOverlap(0))
        );
        let g = ctx.mat(1, 1, 0, 1);
        let ginv = ctx.mat(1, -1, 0, 1);
        assert!(matches!(
            collision_depth(&ctx, &[g, ginv], 4, WORD_MEMORY_CAP),
            Err(Error::InverseOverlap(_))
        ));
    }

    #[test]
    fn collision_witness_is_a_collision() {
        for p in [5u64, 7, 11, 13, 101] {
            let ctx = PrimeContext::new(p).unwrap();
            let gens = t_mod_p(&ctx, 2);
            // 2j² ≡ 1 makes T_j an involution, e.g. j = 2 at p = 7
            let r = match collision_depth(&ctx, &gens, 12, WORD_MEMORY_CAP) {
                Err(Error::InverseOverlap(_)) => continue,
                r => r.unwrap(),
            };
            assert!(r.exact);
            let (w1, w2) = r.witness.clone().unwrap();
            assert_ne!(w1, w2);
            assert!(w1.len().max(w2.len()) as u32 == r.depth + 1);
            assert_eq!(
                w1.evaluate_mod(&ctx, &gens).unwrap(),
                w2.evaluate_mod(&ctx, &gens).unwrap()
            );
        }
    }

    #[test]
    fn girth_matches_bfs() {
        let mut checked = 0;
        for p in [5u64, 7, 11, 13] {
            let group = Psl2Group::shared(p).unwrap();
            let ctx = group.ctx();
            for gens in [
                t_mod_p(ctx, 1),
                t_mod_p(ctx, 2),
                vec![ctx.mat(1, 2, 0, 1), ctx.mat(1, 0, 2, 1)],
            ] {
                let r = match collision_depth(ctx, &gens, 20, WORD_MEMORY_CAP) {
                    Err(Error::InverseOverlap(_)) => {
                        assert!(bfs_girth(&group, &gens).is_err());
                        continue;
                    }
                    r => r.unwrap(),
                };
                checked += 1;
                let girth = bfs_girth(&group, &gens).unwrap().unwrap();
                let (lo, hi) = r.girth_window().unwrap();
                assert!(lo <= girth && girth <= hi, "p={p} d={} girth={girth}", r.depth);
            }
        }
        assert!(checked >= 10);
    }

    #[test]
    fn collision_depth_cap_is_a_lower_bound() {
        let ctx = PrimeContext::new(997).unwrap();
        let gens = t_mod_p(&ctx, 5);
        let r = collision_depth(&ctx, &gens, 2, WORD_MEMORY_CAP).unwrap();
        assert!(!r.exact && r.depth == 2 && r.verdict() == "≥2");
        let r = collision_depth(&ctx, &gens, 8, 50).unwrap();
        assert!(!r.exact && r.depth == 1);
        let full = collision_depth(&ctx, &gens, 8, WORD_MEMORY_CAP).unwrap();
        assert!(full.depth >= 2);
    }

    #[test]
    fn probes() {
        let ctx = PrimeContext::new(101).unwrap();
        let gens = t_mod_p(&ctx, 5);
        let r = nonconcentration_probe(
            &ctx,
            &gens,
            2,
            ProbeSubgroup::Standard(StandardSubgroup::Borel),
            &Mat2::IDENTITY,
        )
        .unwrap();
        assert!(r.within_bound());
        let r = nonconcentration_probe(&ctx, &gens, 2, ProbeSubgroup::Trivial, &Mat2::IDENTITY).unwrap();
        assert_eq!(r.count, 1);
        // words of length exactly 2: the identity plus 90 reduced words
        assert_eq!(r.support, 91);
        let g = generation_probe(&ctx, &gens).unwrap();
        assert!(g.transitive && g.generates);
        assert_eq!(g.closure_order, Some(515_100));
        let c7 = PrimeContext::new(7).unwrap();
        let borel_only = generation_probe(&c7, &[c7.mat(1, 1, 0, 1), c7.mat(3, 0, 0, 5)]).unwrap();
        assert!(!borel_only.transitive && !borel_only.generates);
    }
}

//! Prime-field arithmetic, the projective line P¹(F_p), 2×2 matrix groups
//! acting by linear fractional transformations, and residue-set algebra.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        base %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            e >>= 1;
        }
        acc
    };
    // This witness set is exact for all n < 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The ambient field F_p with inverse and squareness tables.
#[derive(Clone)]
pub struct PrimeContext {
    p: u32,
    inverses: Vec<u32>,
    squares: Vec<bool>,
}

impl fmt::Debug for PrimeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeContext").field("p", &self.p).finish()
    }
}

impl PartialEq for PrimeContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p > u32::MAX as u64 / 2 {
            return Err(Error::ModulusTooLarge(p));
        }
        if p < 5 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let n = p as usize;
        let mut inverses = vec![0u32; n];
        inverses[1] = 1;
        for i in 2..n {
            // inv(i) = -(p / i) * inv(p mod i)
            let q = p / i as u64;
            let r = inverses[n % i] as u64;
            inverses[i] = ((p - q % p) * r % p) as u32;
        }
        let mut squares = vec![false; n];
        for x in 0..n as u64 {
            squares[(x * x % p) as usize] = true;
        }
        Ok(Self {
            p: p as u32,
            inverses,
            squares,
        })
    }

    pub fn shared(p: u64) -> Result<Arc<Self>> {
        Self::new(p).map(Arc::new)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// (p - 1) / 2, the bound for canonical projective representatives.
    #[inline]
    pub fn half(&self) -> u32 {
        (self.p - 1) / 2
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, x: u32, y: u32) -> u32 {
        let s = x as u64 + y as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, x: u32, y: u32) -> u32 {
        if x >= y {
            x - y
        } else {
            self.p - (y - x)
        }
    }

    #[inline]
    pub fn neg(&self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.p - x
        }
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        (x as u64 * y as u64 % self.p as u64) as u32
    }

    #[inline]
    pub fn inv(&self, x: u32) -> Option<u32> {
        match x {
            0 => None,
            _ => Some(self.inverses[x as usize]),
        }
    }

    pub fn div(&self, x: u32, y: u32) -> Option<u32> {
        self.inv(y).map(|yi| self.mul(x, yi))
    }

    /// Whether `x` is a square in F_p (0 counts as a square).
    #[inline]
    pub fn is_square(&self, x: u32) -> bool {
        self.squares[x as usize]
    }

    pub fn nonsquares(&self) -> impl Iterator<Item = u32> + '_ {
        (1..self.p).filter(move |&x| !self.is_square(x))
    }

    pub fn pow(&self, x: u32, mut e: u64) -> u32 {
        let p = self.p as u64;
        let (mut base, mut acc) = (x as u64 % p, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }

    /// A square root of `x` (Tonelli–Shanks), or `None` for a nonsquare.
    pub fn sqrt(&self, x: u32) -> Option<u32> {
        if !self.is_square(x) {
            return None;
        }
        if x == 0 {
            return Some(0);
        }
        let p = self.p as u64;
        let (mut q, mut s) = (p - 1, 0u32);
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = self.nonsquares().next()?;
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(x, q);
        let mut r = self.pow(x, q.div_ceil(2));
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let b = self.pow(c, 1 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    pub fn mat(&self, a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::new(self.reduce(a), self.reduce(b), self.reduce(c), self.reduce(d))
    }

    pub fn det(&self, g: &Mat2) -> u32 {
        self.sub(self.mul(g.a, g.d), self.mul(g.b, g.c))
    }

    pub fn trace(&self, g: &Mat2) -> u32 {
        self.add(g.a, g.d)
    }

    pub fn mat_mul(&self, g: &Mat2, h: &Mat2) -> Mat2 {
        Mat2 {
            a: self.add(self.mul(g.a, h.a), self.mul(g.b, h.c)),
            b: self.add(self.mul(g.a, h.b), self.mul(g.b, h.d)),
            c: self.add(self.mul(g.c, h.a), self.mul(g.d, h.c)),
            d: self.add(self.mul(g.c, h.b), self.mul(g.d, h.d)),
        }
    }

    pub fn mat_neg(&self, g: &Mat2) -> Mat2 {
        Mat2::new(self.neg(g.a), self.neg(g.b), self.neg(g.c), self.neg(g.d))
    }

    /// Inverse in GL₂(F_p); `None` for singular matrices.
    pub fn mat_inv(&self, g: &Mat2) -> Option<Mat2> {
        let di = self.inv(self.det(g))?;
        Some(Mat2 {
            a: self.mul(g.d, di),
            b: self.mul(self.neg(g.b), di),
            c: self.mul(self.neg(g.c), di),
            d: self.mul(g.a, di),
        })
    }

    pub fn mat_pow(&self, g: &Mat2, mut e: u64) -> Mat2 {
        let mut acc = Mat2::IDENTITY;
        let mut base = *g;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mat_mul(&acc, &base);
            }
            base = self.mat_mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// All of SL₂(F_p) in a fixed order (p³ − p elements).
    pub fn sl2_elements(&self) -> Vec<Mat2> {
        let p = self.p;
        let mut out = Vec::with_capacity((p as usize).pow(3));
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    if a != 0 {
                        let d = self.mul(self.add(1, self.mul(b, c)), self.inverses[a as usize]);
                        out.push(Mat2::new(a, b, c, d));
                    } else if b != 0 {
                        // ad - bc = -bc = 1 fixes c; d is free.
                        if self.mul(b, c) == p - 1 {
                            for d in 0..p {
                                out.push(Mat2::new(0, b, c, d));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// A point of P¹(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Affine(u32),
    Infinity,
}

impl ProjPoint {
    /// Slot in `0..=p`, with infinity stored at `p`.
    #[inline]
    pub fn index(self, p: u32) -> usize {
        match self {
            ProjPoint::Affine(r) => r as usize,
            ProjPoint::Infinity => p as usize,
        }
    }

    #[inline]
    pub fn from_index(i: usize, p: u32) -> Self {
        if i == p as usize {
            ProjPoint::Infinity
        } else {
            ProjPoint::Affine(i as u32)
        }
    }

    pub fn all(p: u32) -> impl Iterator<Item = ProjPoint> {
        (0..=p as usize).map(move |i| ProjPoint::from_index(i, p))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Affine(r) => write!(f, "{r}"),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// A 2×2 matrix over F_p, entries in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Self { a, b, c, d }
    }

    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// x ↦ (ax + b)/(cx + d) on P¹(F_p). `g` must be invertible.
pub fn lft_apply(ctx: &PrimeContext, g: &Mat2, x: ProjPoint) -> ProjPoint {
    match x {
        ProjPoint::Affine(x) => {
            let num = ctx.add(ctx.mul(g.a, x), g.b);
            let den = ctx.add(ctx.mul(g.c, x), g.d);
            match ctx.inv(den) {
                Some(di) => ProjPoint::Affine(ctx.mul(num, di)),
                None => ProjPoint::Infinity,
            }
        }
        ProjPoint::Infinity => match ctx.inv(g.c) {
            Some(ci) => ProjPoint::Affine(ctx.mul(g.a, ci)),
            None => ProjPoint::Infinity,
        },
    }
}

/// An element of PSL₂(F_p) held by its canonical representative: the
/// first nonzero entry in scan order (a, b, c, d) lies in `1..=(p-1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Psl2Elem(Mat2);

impl Psl2Elem {
    pub fn rep(&self) -> &Mat2 {
        &self.0
    }

    /// Canonicalize an SL₂ matrix without checking its determinant.
    #[inline]
    pub fn canonical_unchecked(ctx: &PrimeContext, g: &Mat2) -> Self {
        let lead = if g.a != 0 {
            g.a
        } else if g.b != 0 {
            g.b
        } else if g.c != 0 {
            g.c
        } else {
            g.d
        };
        if lead > ctx.half() {
            Psl2Elem(ctx.mat_neg(g))
        } else {
            Psl2Elem(*g)
        }
    }

    pub fn identity() -> Self {
        Psl2Elem(Mat2::IDENTITY)
    }

    /// Dense index in `0..(p³ - p)/2`.
    #[inline]
    pub fn index(&self, ctx: &PrimeContext) -> u32 {
        let p = ctx.p as u64;
        let g = &self.0;
        let idx = if g.a != 0 {
            (g.a as u64 - 1) * p * p + g.b as u64 * p + g.c as u64
        } else {
            ctx.half() as u64 * p * p + (g.b as u64 - 1) * p + g.d as u64
        };
        idx as u32
    }

    #[inline]
    pub fn from_index(ctx: &PrimeContext, idx: u32) -> Self {
        let p = ctx.p as u64;
        let idx = idx as u64;
        let split = ctx.half() as u64 * p * p;
        if idx < split {
            let a = (idx / (p * p) + 1) as u32;
            let b = ((idx / p) % p) as u32;
            let c = (idx % p) as u32;
            let d = ctx.mul(ctx.add(1, ctx.mul(b, c)), ctx.inverses[a as usize]);
            Psl2Elem(Mat2::new(a, b, c, d))
        } else {
            let rest = idx - split;
            let b = (rest / p + 1) as u32;
            let d = (rest % p) as u32;
            let c = ctx.neg(ctx.inverses[b as usize]);
            Psl2Elem(Mat2::new(0, b, c, d))
        }
    }

    pub fn mul(&self, other: &Psl2Elem, ctx: &PrimeContext) -> Psl2Elem {
        Psl2Elem::canonical_unchecked(ctx, &ctx.mat_mul(&self.0, &other.0))
    }

    pub fn inverse(&self, ctx: &PrimeContext) -> Psl2Elem {
        let g = &self.0;
        Psl2Elem::canonical_unchecked(ctx, &Mat2::new(g.d, ctx.neg(g.b), ctx.neg(g.c), g.a))
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Mat2::IDENTITY
    }
}

/// Quotient of SL₂ by {±I}; rejects matrices whose determinant is not 1.
pub fn psl2_canonical(ctx: &PrimeContext, g: &Mat2) -> Result<Psl2Elem> {
    let det = ctx.det(g);
    if det != 1 {
        return Err(Error::Determinant { det, expected: "1" });
    }
    Ok(Psl2Elem::canonical_unchecked(ctx, g))
}

/// |PSL₂(F_p)| = (p³ − p)/2.
pub fn psl2_order(p: u64) -> u64 {
    (p * p * p - p) / 2
}

/// Dense-indexed PSL₂(F_p) with an inverse table and, for small p, a full
/// multiplication table.
pub struct Psl2Group {
    ctx: Arc<PrimeContext>,
    order: u32,
    inverses: Vec<u32>,
    table: Option<Vec<u16>>,
    action: OnceLock<Option<Vec<u32>>>,
}

impl fmt::Debug for Psl2Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Psl2Group")
            .field("p", &self.ctx.p)
            .field("order", &self.order)
            .field("tabulated", &self.table.is_some())
            .finish()
    }
}

impl Psl2Group {
    /// Largest group order handled densely.
    pub const MAX_ORDER: u64 = 1 << 25;
    /// Largest order for which the full multiplication table is built.
    pub const TABLE_ORDER: u64 = 3000;
    /// Largest |G|·(p+1) for which the P¹ action is tabulated.
    pub const ACTION_TABLE_CELLS: u64 = 1 << 22;

    pub fn new(ctx: Arc<PrimeContext>) -> Result<Self> {
        let order = psl2_order(ctx.p as u64);
        if order > Self::MAX_ORDER {
            return Err(Error::GroupTooLarge(order));
        }
        let inverses = (0..order as u32)
            .map(|i| Psl2Elem::from_index(&ctx, i).inverse(&ctx).index(&ctx))
            .collect();
        let table = (order <= Self::TABLE_ORDER).then(|| {
            let n = order as u32;
            let mut t = Vec::with_capacity((order * order) as usize);
            for i in 0..n {
                let x = Psl2Elem::from_index(&ctx, i);
                for j in 0..n {
                    let y = Psl2Elem::from_index(&ctx, j);
                    t.push(x.mul(&y, &ctx).index(&ctx) as u16);
                }
            }
            t
        });
        Ok(Self {
            ctx,
            order: order as u32,
            inverses,
            table,
            action: OnceLock::new(),
        })
    }

    pub fn shared(p: u64) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(PrimeContext::shared(p)?)?))
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn ctx_arc(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn identity(&self) -> u32 {
        Psl2Elem::identity().index(&self.ctx)
    }

    #[inline]
    pub fn mul(&self, i: u32, j: u32) -> u32 {
        match &self.table {
            Some(t) => t[i as usize * self.order as usize + j as usize] as u32,
            None => {
                let x = Psl2Elem::from_index(&self.ctx, i);
                let y = Psl2Elem::from_index(&self.ctx, j);
                x.mul(&y, &self.ctx).index(&self.ctx)
            }
        }
    }

    #[inline]
    pub fn inv(&self, i: u32) -> u32 {
        self.inverses[i as usize]
    }

    pub fn elem(&self, i: u32) -> Psl2Elem {
        Psl2Elem::from_index(&self.ctx, i)
    }

    pub fn index_of(&self, g: &Mat2) -> Result<u32> {
        Ok(psl2_canonical(&self.ctx, g)?.index(&self.ctx))
    }

    fn action_table(&self) -> Option<&Vec<u32>> {
        self.action
            .get_or_init(|| {
                let slots = self.ctx.p as u64 + 1;
                (self.order as u64 * slots <= Self::ACTION_TABLE_CELLS).then(|| {
                    let mut t = Vec::with_capacity((self.order as u64 * slots) as usize);
                    for g in 0..self.order {
                        let m = *self.elem(g).rep();
                        for x in 0..slots as usize {
                            let y = lft_apply(&self.ctx, &m, ProjPoint::from_index(x, self.ctx.p));
                            t.push(y.index(self.ctx.p) as u32);
                        }
                    }
                    t
                })
            })
            .as_ref()
    }

    /// g·x on P¹ by slot index (see [`ProjPoint::index`]).
    #[inline]
    pub fn act(&self, g: u32, x: usize) -> usize {
        match self.action_table() {
            Some(t) => t[g as usize * (self.ctx.p as usize + 1) + x] as usize,
            None => {
                let m = *self.elem(g).rep();
                lft_apply(&self.ctx, &m, ProjPoint::from_index(x, self.ctx.p)).index(self.ctx.p)
            }
        }
    }
}

/// A subset of F_p as a sorted, duplicate-free list of residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    p: u32,
    elems: Vec<u32>,
}

impl ResidueSet {
    pub fn empty(p: u32) -> Self {
        Self { p, elems: Vec::new() }
    }

    /// Reduces every value mod p, then sorts and deduplicates.
    pub fn from_values<I: IntoIterator<Item = i64>>(p: u32, values: I) -> Self {
        let mut elems: Vec<u32> = values.into_iter().map(|v| v.rem_euclid(p as i64) as u32).collect();
        elems.sort_unstable();
        elems.dedup();
        Self { p, elems }
    }

    pub fn from_residues<I: IntoIterator<Item = u32>>(p: u32, values: I) -> Self {
        Self::from_values(p, values.into_iter().map(i64::from))
    }

    fn from_marks(p: u32, marks: &[bool]) -> Self {
        let elems = marks
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i as u32))
            .collect();
        Self { p, elems }
    }

    /// The consecutive residues `start, start+1, ..., start+len-1` mod p.
    pub fn interval(p: u32, start: i64, len: u64) -> Self {
        Self::from_values(p, (0..len as i64).map(|k| start + k))
    }

    pub fn full(p: u32) -> Self {
        Self {
            p,
            elems: (0..p).collect(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.elems.iter().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    fn check(&self, other: &ResidueSet) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ContextMismatch(self.p, other.p));
        }
        Ok(())
    }

    /// A + B.
    pub fn sumset(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check(other)?;
        let p = self.p as u64;
        let mut marks = vec![false; self.p as usize];
        for &a in &self.elems {
            for &b in &other.elems {
                marks[((a as u64 + b as u64) % p) as usize] = true;
            }
        }
        Ok(Self::from_marks(self.p, &marks))
    }

    /// A − B.
    pub fn difference_set(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check(other)?;
        let p = self.p as u64;
        let mut marks = vec![false; self.p as usize];
        for &a in &self.elems {
            for &b in &other.elems {
                marks[((a as u64 + p - b as u64) % p) as usize] = true;
            }
        }
        Ok(Self::from_marks(self.p, &marks))
    }

    /// ρA; ρ must be a nonzero residue.
    pub fn dilate(&self, ctx: &PrimeContext, rho: u32) -> Result<ResidueSet> {
        if rho.is_multiple_of(ctx.p()) {
            return Err(Error::ZeroDilate);
        }
        Ok(Self::from_residues(
            self.p,
            self.elems.iter().map(|&a| ctx.mul(a, rho % ctx.p())),
        ))
    }

    /// A⁻¹ = {a⁻¹ : a ∈ A, a ≠ 0}. The flag reports whether 0 was dropped.
    pub fn inverse_set(&self, ctx: &PrimeContext) -> (ResidueSet, bool) {
        let dropped = self.contains(0);
        let set = Self::from_residues(self.p, self.elems.iter().filter_map(|&a| ctx.inv(a)));
        (set, dropped)
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check(other)?;
        Ok(Self::from_residues(
            self.p,
            self.elems.iter().chain(other.elems.iter()).copied(),
        ))
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.check(other)?;
        Ok(Self {
            p: self.p,
            elems: self.elems.iter().copied().filter(|&x| other.contains(x)).collect(),
        })
    }

    pub fn without_zero(&self) -> ResidueSet {
        Self {
            p: self.p,
            elems: self.elems.iter().copied().filter(|&x| x != 0).collect(),
        }
    }
}

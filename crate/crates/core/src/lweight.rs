//! ℓ-weights: the lattice spanned by the `ϖ_{i,a}`, ℓ-roots, the map Ω_Q,
//! the order ≤, the set K̂ and the twist map 𝐭.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kostant::{self, KostantPartition};
use crate::linalg::{self, Rational, SparseLu};
use crate::matrix::IntMatrix;
use crate::qdatum::ConvexOrder;
use crate::rootsys::twisted::{TwistedKind, TwistedType};
use crate::rootsys::{CartanData, Root, Weight};

/// A spectral parameter `q^p`, or `q^m ζ^c` with `ζ` a primitive `r`-th root
/// of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpectralExp {
    Q(i64),
    Twisted { m: i64, c: u32, r: u32 },
}

impl SpectralExp {
    pub fn twisted(m: i64, c: i64, r: u32) -> Self {
        Self::Twisted {
            m,
            c: c.rem_euclid(i64::from(r)) as u32,
            r,
        }
    }

    /// `a ↦ a^d`.
    pub fn pow(self, d: i64) -> Self {
        match self {
            Self::Q(p) => Self::Q(p * d),
            Self::Twisted { m, c, r } => Self::twisted(m * d, i64::from(c) * d, r),
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Self::Q(p) => p.into(),
            Self::Twisted { m, c, .. } => serde_json::json!([m, c]),
        }
    }
}

impl fmt::Display for SpectralExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Q(p) => write!(f, "{p}"),
            Self::Twisted { m, c, .. } => write!(f, "({m},{c})"),
        }
    }
}

/// A finitely supported integer combination of fundamental ℓ-weights
/// `ϖ_{i,a}` (0-based nodes).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LWeight {
    terms: BTreeMap<(usize, SpectralExp), i64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    i: usize,
    p: serde_json::Value,
    coeff: i64,
}

impl Serialize for LWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|(&(i, e), &coeff)| TermJson {
            i: i + 1,
            p: e.to_json(),
            coeff,
        }))
    }
}

impl LWeight {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn fundamental(i: usize, e: SpectralExp) -> Self {
        let mut w = Self::zero();
        w.add_term(i, e, 1);
        w
    }

    /// `ϖ_{i,q^p}`.
    pub fn fund(i: usize, p: i64) -> Self {
        Self::fundamental(i, SpectralExp::Q(p))
    }

    pub fn add_term(&mut self, i: usize, e: SpectralExp, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.terms.entry((i, e)).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&(i, e));
        }
    }

    pub fn coeff(&self, i: usize, e: SpectralExp) -> i64 {
        self.terms.get(&(i, e)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, SpectralExp, i64)> + '_ {
        self.terms.iter().map(|(&(i, e), &c)| (i, e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// All coefficients nonnegative.
    pub fn is_dominant(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for (i, e, c) in other.terms() {
            w.add_term(i, e, c);
        }
        w
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut w = Self::zero();
        for (i, e, c) in self.terms() {
            w.add_term(i, e, k * c);
        }
        w
    }

    /// `cl(ϖ_{i,a}) = ϖ_i`.
    pub fn cl(&self, rank: usize) -> Weight {
        let mut v = vec![0; rank];
        for (i, _, c) in self.terms() {
            v[i] += c;
        }
        Weight(v)
    }

    /// Terms `(i, p, c)` when every parameter is a power of `q`.
    pub fn untwisted_terms(&self) -> Result<Vec<(usize, i64, i64)>> {
        self.terms()
            .map(|(i, e, c)| match e {
                SpectralExp::Q(p) => Ok((i, p, c)),
                SpectralExp::Twisted { .. } => Err(Error::UnsupportedType(
                    "twisted spectral parameter in an untwisted computation".into(),
                )),
            })
            .collect()
    }

    /// Smallest and largest exponent in the support.
    pub fn exponent_hull(&self) -> Result<Option<(i64, i64)>> {
        let t = self.untwisted_terms()?;
        Ok(t.iter()
            .map(|&(_, p, _)| p)
            .min()
            .zip(t.iter().map(|&(_, p, _)| p).max()))
    }
}

impl fmt::Display for LWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (i, e, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if n > 0 {
                write!(f, " {sign} ")?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            write!(f, "ϖ_{{{},{e}}}", i + 1)?;
        }
        Ok(())
    }
}

/// The ℓ-root `α_{i,p} = ϖ_{i,p+𝗌_i} + ϖ_{i,p−𝗌_i} − Σ_{j≠i} Σ_{k=1}^{−a_ji} ϖ_{j,p−a_ji+1−2k}`.
pub fn lroot(g0: &CartanData, i: usize, p: i64) -> LWeight {
    let s = g0.symmetrizers[i];
    let mut w = LWeight::fund(i, p + s).add(&LWeight::fund(i, p - s));
    for j in 0..g0.rank() {
        let a = g0.a(j, i);
        if j == i || a == 0 {
            continue;
        }
        for k in 1..=-a {
            w.add_term(j, SpectralExp::Q(p - a + 1 - 2 * k), -1);
        }
    }
    w
}

/// Exact decomposition over the ℓ-roots `α_{i,p}` with `lo < p < hi`.
///
/// If `Σ c_{i,p} α_{i,p}` has support in `[lo, hi]`, then `c = Ã(z)·d`
/// expanded at `z = 0` and at `z = ∞` forces `lo < p < hi`, so the window
/// loses no decompositions.
#[derive(Clone, Debug)]
pub struct LRootSolver {
    pub lo: i64,
    pub hi: i64,
    cols: Vec<(usize, i64)>,
    rows: BTreeMap<(usize, i64), usize>,
    lu: SparseLu,
}

impl LRootSolver {
    pub fn new(g0: &CartanData, lo: i64, hi: i64) -> Result<Self> {
        let cols: Vec<(usize, i64)> = (0..g0.rank())
            .flat_map(|i| (lo + 1..hi).map(move |p| (i, p)))
            .collect();
        let mut rows: BTreeMap<(usize, i64), usize> = BTreeMap::new();
        let mut by_row: Vec<BTreeMap<usize, i64>> = Vec::new();
        for (c, &(i, p)) in cols.iter().enumerate() {
            for (j, e, v) in lroot(g0, i, p).untwisted_terms()? {
                let next = rows.len();
                let r = *rows.entry((j, e)).or_insert(next);
                if r == by_row.len() {
                    by_row.push(BTreeMap::new());
                }
                by_row[r].insert(c, v);
            }
        }
        // eliminate from the top exponent down
        let mut order: Vec<usize> = (0..cols.len()).collect();
        order.sort_by_key(|&c| {
            let (i, p) = cols[c];
            (std::cmp::Reverse(p + g0.symmetrizers[i]), i)
        });
        let lu = SparseLu::new(by_row, cols.len(), Some(&order));
        if lu.rank() != cols.len() {
            return Err(Error::Invariant(format!(
                "ℓ-roots on ({lo}, {hi}) are not independent: rank {} of {}",
                lu.rank(),
                cols.len()
            )));
        }
        Ok(Self { lo, hi, cols, rows, lu })
    }

    /// Solver whose window is the support hull of `w`.
    pub fn for_weight(g0: &CartanData, w: &LWeight) -> Result<Self> {
        let (lo, hi) = w.exponent_hull()?.unwrap_or((0, 0));
        Self::new(g0, lo, hi)
    }

    /// Rational coefficients of `d` over the ℓ-roots, or `None` when `d` is
    /// outside their span.
    pub fn decompose(&self, d: &LWeight) -> Result<Option<BTreeMap<(usize, i64), Rational>>> {
        let mut rhs = BTreeMap::new();
        for (i, p, c) in d.untwisted_terms()? {
            if p < self.lo || p > self.hi {
                return Err(Error::Invariant(format!(
                    "exponent {p} outside the solver window [{}, {}]",
                    self.lo, self.hi
                )));
            }
            match self.rows.get(&(i, p)) {
                Some(&r) => {
                    rhs.insert(r, c);
                }
                None => return Ok(None),
            }
        }
        if rhs.is_empty() {
            return Ok(Some(BTreeMap::new()));
        }
        Ok(self.lu.solve(&rhs).map(|x| {
            x.into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (self.cols[c], v))
                .collect()
        }))
    }

    /// Integer coefficients of `d`, or `None` when `d ∉ 𝒬`.
    pub fn integer_decomposition(&self, d: &LWeight) -> Result<Option<BTreeMap<(usize, i64), i64>>> {
        Ok(self.decompose(d)?.and_then(|x| {
            x.iter()
                .map(|(k, v)| linalg::to_integer(v).map(|n| (*k, n)))
                .collect()
        }))
    }

    /// `π ≤ σ` iff `σ − π` is a nonnegative integer combination of ℓ-roots.
    pub fn leq(&self, pi: &LWeight, sigma: &LWeight) -> Result<bool> {
        Ok(self
            .integer_decomposition(&sigma.sub(pi))?
            .is_some_and(|x| x.values().all(|&v| v >= 0)))
    }
}

/// `π ≤ σ` with a solver sized to the difference.
pub fn leq(g0: &CartanData, pi: &LWeight, sigma: &LWeight) -> Result<bool> {
    let d = sigma.sub(pi);
    if d.is_zero() {
        return Ok(true);
    }
    LRootSolver::for_weight(g0, &d)?.leq(pi, sigma)
}

/// The map Ω_Q of an untwisted datum: `𝐦_α ↦ ϖ_{ī,p}` for `Ω̃(α) = (ι, p)`.
#[derive(Clone, Debug)]
pub struct OmegaQ<'a> {
    pub order: &'a ConvexOrder,
    index: BTreeMap<(usize, i64), usize>,
}

impl<'a> OmegaQ<'a> {
    pub fn new(order: &'a ConvexOrder) -> Result<Self> {
        let q = &order.datum;
        let mut index = BTreeMap::new();
        for k in 0..order.len() {
            let key = (q.orbit_of[order.word()[k]], order.heights[k]);
            if index.insert(key, k).is_some() {
                return Err(Error::Invariant(format!(
                    "Ω̃ is not injective after folding at ({}, {})",
                    key.0 + 1,
                    key.1
                )));
            }
        }
        Ok(Self { order, index })
    }

    pub fn g0(&self) -> &CartanData {
        &self.order.datum.g0
    }

    pub fn apply(&self, mults: &[i64]) -> LWeight {
        let mut w = LWeight::zero();
        for (&(i, p), &k) in &self.index {
            w.add_term(i, SpectralExp::Q(p), mults[k]);
        }
        w
    }

    /// `Ω_Q^{−1}(π)`, for `π ∈ 𝒫_Q`.
    pub fn inverse(&self, pi: &LWeight) -> Result<Vec<i64>> {
        let mut m = vec![0; self.order.len()];
        for (i, p, c) in pi.untwisted_terms()? {
            let k = self
                .index
                .get(&(i, p))
                .ok_or_else(|| Error::OutsideCone(format!("ϖ_{{{},{p}}} is not in the image of Ω_Q", i + 1)))?;
            m[*k] = c;
        }
        Ok(m)
    }

    pub fn contains(&self, i: usize, p: i64) -> bool {
        self.index.contains_key(&(i, p))
    }

    /// Smallest and largest exponent of the image.
    pub fn hull(&self) -> (i64, i64) {
        let ps = self.index.keys().map(|&(_, p)| p);
        (ps.clone().min().unwrap_or(0), ps.max().unwrap_or(0))
    }

    /// A solver covering every difference of elements of `𝒫_Q`.
    pub fn solver(&self) -> Result<LRootSolver> {
        let (lo, hi) = self.hull();
        LRootSolver::new(self.g0(), lo, hi)
    }
}

pub fn omega_q(o: &ConvexOrder, m: &KostantPartition) -> Result<LWeight> {
    Ok(OmegaQ::new(o)?.apply(&m.mults))
}

/// `K̂ = {(ī, p) | (ι, p ± 𝗌_ῑ) ∈ Im Ω̃_Q}`.
pub fn khat(o: &ConvexOrder) -> BTreeSet<(usize, i64)> {
    let q = &o.datum;
    let image = o.image();
    image
        .iter()
        .filter_map(|&(v, p)| {
            let s = q.s(v);
            image.contains(&(v, p + 2 * s)).then(|| (q.orbit_of[v], p + s))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub khat: Vec<(usize, i64)>,
    /// Every `α_{i,p}`, `(i,p) ∈ K̂`, lies in `𝒫_Q`.
    pub generators_in_image: bool,
    /// Dimension of `𝒫_Q ∩ 𝒬` as the kernel of the rows outside the image.
    pub intersection_dim: usize,
    pub samples: usize,
    pub sample_failures: usize,
}

impl CoincidenceReport {
    pub fn passed(&self) -> bool {
        self.generators_in_image && self.intersection_dim == self.khat.len() && self.sample_failures == 0
    }
}

/// Checks `𝒫_Q ∩ 𝒬 = ⊕_{K̂} ℤ α_{i,p}`: generators lie in `𝒫_Q`, the
/// intersection has rank `|K̂|`, and random integer combinations of the
/// generators pull back to `K̃P(0)` and decompose back exactly.
pub fn coincidence_report<R: Rng>(o: &ConvexOrder, samples: usize, rng: &mut R) -> Result<CoincidenceReport> {
    let om = OmegaQ::new(o)?;
    let g0 = om.g0();
    let kh: Vec<(usize, i64)> = khat(o).into_iter().collect();
    let generators_in_image = kh.iter().all(|&(i, p)| {
        lroot(g0, i, p)
            .untwisted_terms()
            .is_ok_and(|t| t.iter().all(|&(j, e, _)| om.contains(j, e)))
    });

    let (lo, hi) = om.hull();
    let cols: Vec<(usize, i64)> = (0..g0.rank())
        .flat_map(|i| (lo + 1..hi).map(move |p| (i, p)))
        .collect();
    let mut outside: BTreeMap<(usize, i64), BTreeMap<usize, i64>> = BTreeMap::new();
    for (c, &(i, p)) in cols.iter().enumerate() {
        for (j, e, v) in lroot(g0, i, p).untwisted_terms()? {
            if !om.contains(j, e) {
                outside.entry((j, e)).or_default().insert(c, v);
            }
        }
    }
    let m = IntMatrix::from_fn(outside.len(), cols.len(), |r, c| {
        outside.values().nth(r).and_then(|row| row.get(&c).copied()).unwrap_or(0)
    });
    let intersection_dim = cols.len() - if outside.is_empty() { 0 } else { linalg::rank(&m) };

    let solver = om.solver()?;
    let mut sample_failures = 0;
    for _ in 0..samples {
        let coeffs: Vec<i64> = kh.iter().map(|_| rng.gen_range(-3..=3)).collect();
        let mut pi = LWeight::zero();
        for (&(i, p), &c) in kh.iter().zip(&coeffs) {
            pi = pi.add(&lroot(g0, i, p).scale(c));
        }
        let ok = om.inverse(&pi).is_ok_and(|m| kostant::weight_of(&o.order, &m).is_zero())
            && solver.integer_decomposition(&pi)?.is_some_and(|x| {
                let want: BTreeMap<(usize, i64), i64> =
                    kh.iter().copied().zip(coeffs.iter().copied()).filter(|(_, c)| *c != 0).collect();
                x == want
            });
        if !ok {
            sample_failures += 1;
        }
    }
    Ok(CoincidenceReport {
        khat: kh,
        generators_in_image,
        intersection_dim,
        samples,
        sample_failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub i: usize,
    pub p: i64,
    /// Position with `Ω̃(β_{k0}) = (ι, p + 𝗌)`.
    pub k0: usize,
    pub m: Vec<i64>,
    /// `m ∈ K̃P(0)`.
    pub in_kernel: bool,
    pub partial_sums: Vec<i64>,
    pub holds: bool,
}

/// For `𝐦 = Ω_Q^{−1}(α_{i,p})`: `𝐦 ∈ K̃P(0)` and
/// `Σ_{t≤k} 𝐦_t (ν_k, β_t) = δ_{k,k0}`.
pub fn delta_identity(o: &ConvexOrder, i: usize, p: i64) -> Result<DeltaReport> {
    let q = &o.datum;
    let s = q.g0.symmetrizers[i];
    let image = o.image();
    let iota = q.orbits[i]
        .iter()
        .copied()
        .find(|&v| image.contains(&(v, p - s)) && image.contains(&(v, p + s)))
        .ok_or_else(|| {
            Error::Hypothesis(format!(
                "no vertex over {} with (ι, {p} ± {s}) in the image",
                i + 1
            ))
        })?;
    let om = OmegaQ::new(o)?;
    let m = om.inverse(&lroot(&q.g0, i, p))?;
    let k0 = o
        .position_of(iota, p + s)
        .ok_or_else(|| Error::Invariant("image point without a position".into()))?;
    let partial_sums = kostant::rho(&o.order, &m);
    let holds = partial_sums
        .iter()
        .enumerate()
        .all(|(k, &v)| v == i64::from(k == k0));
    Ok(DeltaReport {
        i,
        p,
        k0,
        in_kernel: kostant::weight_of(&o.order, &m).is_zero(),
        m,
        partial_sums,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetIsoReport {
    pub beta: Root,
    pub size: usize,
    pub pairs: usize,
    /// Strict relations `𝐦 ≺ 𝐧`.
    pub strict: usize,
    /// Pairs `(a, b)` where `𝐦_a ⪯ 𝐦_b` and `Ω(𝐦_a) ≤ Ω(𝐦_b)` disagree.
    pub discrepancies: Vec<(usize, usize)>,
    pub injective: bool,
}

impl PosetIsoReport {
    pub fn passed(&self) -> bool {
        self.injective && self.discrepancies.is_empty()
    }
}

/// Compares `(KP(β), ⪯)` with `(𝒫⁺_{Q,β}, ≤)` pair by pair, with ≤ decided
/// by the ℓ-root solver.
pub struct PosetChecker<'a> {
    pub omega: OmegaQ<'a>,
    solver: LRootSolver,
    rho: Vec<Vec<i64>>,
}

impl<'a> PosetChecker<'a> {
    pub fn new(o: &'a ConvexOrder) -> Result<Self> {
        let omega = OmegaQ::new(o)?;
        let solver = omega.solver()?;
        Ok(Self {
            omega,
            solver,
            rho: kostant::rho_matrix(&o.order),
        })
    }

    pub fn check(&self, beta: &Root, budget: Option<usize>) -> Result<PosetIsoReport> {
        let o = &self.omega.order.order;
        let kps = kostant::enumerate(o, beta, budget)?;
        let images: Vec<LWeight> = kps.iter().map(|m| self.omega.apply(&m.mults)).collect();
        let rhos: Vec<Vec<i64>> = kps.iter().map(|m| kostant::rho_with(&self.rho, &m.mults)).collect();
        let distinct: BTreeSet<&LWeight> = images.iter().collect();
        let mut discrepancies = Vec::new();
        let mut strict = 0;
        for a in 0..kps.len() {
            for b in 0..kps.len() {
                let mine = kostant::leq_vec(&rhos[a], &rhos[b]);
                if mine && a != b {
                    strict += 1;
                }
                if mine != self.solver.leq(&images[a], &images[b])? {
                    discrepancies.push((a, b));
                }
            }
        }
        Ok(PosetIsoReport {
            beta: beta.clone(),
            size: kps.len(),
            pairs: kps.len() * kps.len(),
            strict,
            discrepancies,
            injective: distinct.len() == kps.len(),
        })
    }
}

pub fn poset_iso_check(o: &ConvexOrder, beta: &Root, budget: Option<usize>) -> Result<PosetIsoReport> {
    PosetChecker::new(o)?.check(beta, budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub beta: Root,
    /// Indices into the input list.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub blocks: Vec<Block>,
    /// Pairs from different blocks that are ≤-comparable.
    pub cross_comparable: Vec<(usize, usize)>,
}

/// Groups elements of `𝒫⁺_Q` by `β(π) = Σ 𝐦_k β_k`, `𝐦 = Ω_Q^{−1}(π)`.
pub fn blocks(o: &ConvexOrder, pis: &[LWeight]) -> Result<BlockReport> {
    let om = OmegaQ::new(o)?;
    let mut by_beta: BTreeMap<Root, Vec<usize>> = BTreeMap::new();
    let mut beta_of = Vec::new();
    for (n, pi) in pis.iter().enumerate() {
        let m = om.inverse(pi)?;
        if m.iter().any(|&c| c < 0) {
            return Err(Error::OutsideCone(pi.to_string()));
        }
        let beta = kostant::weight_of(&o.order, &m);
        by_beta.entry(beta.clone()).or_default().push(n);
        beta_of.push(beta);
    }
    let solver = om.solver()?;
    let mut cross_comparable = Vec::new();
    for a in 0..pis.len() {
        for b in 0..pis.len() {
            if beta_of[a] != beta_of[b] && solver.leq(&pis[a], &pis[b])? {
                cross_comparable.push((a, b));
            }
        }
    }
    Ok(BlockReport {
        blocks: by_beta
            .into_iter()
            .map(|(beta, members)| Block { beta, members })
            .collect(),
        cross_comparable,
    })
}

/// `𝐭(ϖ^𝗀_{τ^e(ι),q^p}) = ϖ_{i,(ζ^e q^p)^{d_i}}` for `ι` the representative
/// of the classical node `i`.
pub fn twist(tt: &TwistedType, w: &LWeight) -> Result<LWeight> {
    let d = tt.d_table();
    let mut out = LWeight::zero();
    for (v, p, c) in w.untwisted_terms()? {
        if v >= tt.g.rank() {
            return Err(Error::IndexOutOfRange {
                index: v + 1,
                rank: tt.g.rank(),
            });
        }
        let (i, e) = tt.orbit_position(v);
        let di = i64::from(d[i]);
        out.add_term(i, SpectralExp::twisted(p * di, i64::from(e) * di, tt.r), c);
    }
    Ok(out)
}

/// The expected classical image `Σ_j a_ji ϖ_j` of `𝐭(α^𝗀_{ι,a})` for the
/// representative `ι` of `i`. With the reversed numbering of `A_{2n}^{(2)}`
/// the last coordinate is halved.
pub fn expected_twisted_cl(tt: &TwistedType, i: usize) -> Weight {
    let a = tt.classical_matrix();
    let mut v: Vec<i64> = (0..tt.n).map(|j| a[(j, i)]).collect();
    if tt.kind == TwistedKind::EvenA {
        v[tt.n - 1] /= 2;
    }
    Weight(v)
}

/// Classical nodes `i` where `cl(𝐭(α^𝗀_{ι,q^p}))` differs from
/// [`expected_twisted_cl`].
pub fn twist_cl_failures(tt: &TwistedType, p: i64) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..tt.n {
        let got = twist(tt, &lroot(&tt.g, tt.reps[i], p))?.cl(tt.n);
        if got != expected_twisted_cl(tt, i) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Ω_Q for a twisted type: `𝐦_α ↦ 𝐭(ϖ^𝗀_{ι,p})`, with `o` a datum on 𝗀
/// with σ = id.
pub fn omega_twisted(tt: &TwistedType, o: &ConvexOrder, mults: &[i64]) -> Result<LWeight> {
    if o.datum.cartan != tt.g || !o.datum.sigma.is_identity() {
        return Err(Error::InvalidDatum(format!(
            "a twisted type {tt} needs a datum on {} with σ = id",
            tt.g.label
        )));
    }
    twist(tt, &OmegaQ::new(o)?.apply(mults))
}

/// `𝐭` is injective on the fundamental ℓ-weights of `𝒫_Q`.
pub fn twist_injective_on_image(tt: &TwistedType, o: &ConvexOrder) -> Result<bool> {
    let mut seen = BTreeSet::new();
    for (v, p) in o.image() {
        if !seen.insert(twist(tt, &LWeight::fund(v, p))?) {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Kostant partitions over a convex order, the map ρ and the order ⪯.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qdatum::RootOrder;
use crate::rootsys::Root;

/// Multiplicities `m_k = m(β_k)` over the roots of a [`RootOrder`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KostantPartition {
    pub mults: Vec<i64>,
    /// `Σ m_k β_k`.
    pub weight: Root,
    /// Whether negative multiplicities are allowed.
    pub signed: bool,
}

impl KostantPartition {
    pub fn new(order: &RootOrder, mults: Vec<i64>, signed: bool) -> Result<Self> {
        if mults.len() != order.len() {
            return Err(Error::Parse(format!(
                "{} multiplicities for {} roots",
                mults.len(),
                order.len()
            )));
        }
        if !signed && mults.iter().any(|&m| m < 0) {
            return Err(Error::Parse("negative multiplicity in an unsigned partition".into()));
        }
        let weight = weight_of(order, &mults);
        Ok(Self {
            mults,
            weight,
            signed,
        })
    }

    /// The partition `m_α` concentrated on the root at position `k`.
    pub fn single(order: &RootOrder, k: usize) -> Self {
        let mut m = vec![0; order.len()];
        m[k] = 1;
        Self::new(order, m, false).expect("valid")
    }

    /// Multiplicities keyed by root, independent of the order.
    pub fn by_root(&self, order: &RootOrder) -> BTreeMap<Root, i64> {
        order
            .betas
            .iter()
            .cloned()
            .zip(self.mults.iter().copied())
            .filter(|(_, m)| *m != 0)
            .collect()
    }

    /// Reindexes a root-keyed multiplicity map over another order.
    pub fn from_roots(order: &RootOrder, m: &BTreeMap<Root, i64>, signed: bool) -> Result<Self> {
        let mut mults = vec![0; order.len()];
        for (r, &c) in m {
            let k = order
                .position(r)
                .ok_or_else(|| Error::NotPositiveRoot(r.to_string()))?;
            mults[k] = c;
        }
        Self::new(order, mults, signed)
    }
}

pub fn weight_of(order: &RootOrder, mults: &[i64]) -> Root {
    let n = order.cartan.rank();
    let mut w = Root::zero(n);
    for (b, &m) in order.betas.iter().zip(mults) {
        if m != 0 {
            w = w.add(&b.scale(m));
        }
    }
    w
}

/// All `m ≥ 0` with `Σ m_k β_k = β`, in lexicographic order of `m`.
pub fn enumerate(order: &RootOrder, beta: &Root, budget: Option<usize>) -> Result<Vec<KostantPartition>> {
    if !beta.is_nonnegative() {
        return Ok(Vec::new());
    }
    let l = order.len();
    // support_after[k]: coordinates reachable by roots at positions ≥ k
    let n = beta.0.len();
    let mut support_after = vec![vec![false; n]; l + 1];
    for k in (0..l).rev() {
        support_after[k] = support_after[k + 1].clone();
        for (i, &c) in order.betas[k].0.iter().enumerate() {
            if c > 0 {
                support_after[k][i] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut m = vec![0i64; l];
    let mut exceeded = false;
    #[allow(clippy::too_many_arguments)]
    fn go(
        order: &RootOrder,
        k: usize,
        rem: &mut Vec<i64>,
        m: &mut Vec<i64>,
        support_after: &[Vec<bool>],
        out: &mut Vec<Vec<i64>>,
        budget: Option<usize>,
        exceeded: &mut bool,
    ) {
        if *exceeded {
            return;
        }
        if rem.iter().enumerate().any(|(i, &r)| r > 0 && !support_after[k][i]) {
            return;
        }
        if k == order.len() {
            if rem.iter().all(|&r| r == 0) {
                if budget.is_some_and(|b| out.len() >= b) {
                    *exceeded = true;
                    return;
                }
                out.push(m.clone());
            }
            return;
        }
        let b = &order.betas[k].0;
        let max = b
            .iter()
            .zip(rem.iter())
            .filter(|(c, _)| **c > 0)
            .map(|(c, r)| r / c)
            .min()
            .unwrap_or(0)
            .max(0);
        for t in 0..=max {
            for (r, c) in rem.iter_mut().zip(b) {
                *r -= t * c;
            }
            m[k] = t;
            go(order, k + 1, rem, m, support_after, out, budget, exceeded);
            for (r, c) in rem.iter_mut().zip(b) {
                *r += t * c;
            }
        }
        m[k] = 0;
    }
    let mut rem = beta.0.clone();
    let mut raw = Vec::new();
    go(order, 0, &mut rem, &mut m, &support_after, &mut raw, budget, &mut exceeded);
    if exceeded {
        return Err(Error::BudgetExceeded(budget.unwrap_or(0)));
    }
    for mults in raw {
        out.push(KostantPartition {
            mults,
            weight: beta.clone(),
            signed: false,
        });
    }
    Ok(out)
}

/// The matrix `T[k][t] = (ν_k, β_t)` for `t ≤ k`, zero above the diagonal.
pub fn rho_matrix(order: &RootOrder) -> Vec<Vec<i64>> {
    let l = order.len();
    (0..l)
        .map(|k| (0..l).map(|t| if t <= k { order.nu_beta(k, t) } else { 0 }).collect())
        .collect()
}

/// `ρ(m)_k = Σ_{t ≤ k} m_t (ν_k, β_t)`.
pub fn rho(order: &RootOrder, m: &[i64]) -> Vec<i64> {
    rho_with(&rho_matrix(order), m)
}

pub fn rho_with(t: &[Vec<i64>], m: &[i64]) -> Vec<i64> {
    t.iter()
        .map(|row| row.iter().zip(m).map(|(a, b)| a * b).sum())
        .collect()
}

/// `m ⪯ n` iff `ρ(m) ≤ ρ(n)` componentwise.
pub fn preceq(order: &RootOrder, m: &KostantPartition, n: &KostantPartition) -> Result<bool> {
    if m.weight != n.weight {
        return Err(Error::WeightMismatch);
    }
    let (a, b) = (rho(order, &m.mults), rho(order, &n.mults));
    Ok(a.iter().zip(&b).all(|(x, y)| x <= y))
}

pub fn leq_vec(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Cover relations `(a, b)` (indices into `rhos`) of the componentwise order.
pub fn hasse_edges(rhos: &[Vec<i64>]) -> Vec<(usize, usize)> {
    let n = rhos.len();
    let less = |a: usize, b: usize| a != b && leq_vec(&rhos[a], &rhos[b]) && rhos[a] != rhos[b];
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if less(a, b) && !(0..n).any(|c| less(a, c) && less(c, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderReport {
    /// Pairs `(k, l)` (0-based) where the sign pattern of `(ν_k, β_l)` fails.
    pub sign_failures: Vec<(usize, usize)>,
    pub kp_size: usize,
    pub injective_on_kp: bool,
    /// Result of the box check, when the box was small enough to scan.
    pub injective_on_box: Option<bool>,
    pub box_bound: i64,
    /// Adjacent commuting positions checked, and those that failed.
    pub commutations_checked: usize,
    pub commutation_failures: Vec<usize>,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.sign_failures.is_empty()
            && self.injective_on_kp
            && self.injective_on_box != Some(false)
            && self.commutation_failures.is_empty()
    }
}

/// Pairs `(k, l)` violating `(ν_k, β_l) ≥ 0` for `l < k`, `= 1` for `l = k`,
/// `≤ 0` for `l > k`.
pub fn sign_pattern_failures(order: &RootOrder) -> Vec<(usize, usize)> {
    let l = order.len();
    let mut out = Vec::new();
    for k in 0..l {
        for t in 0..l {
            let v = order.nu_beta(k, t);
            let ok = match t.cmp(&k) {
                std::cmp::Ordering::Less => v >= 0,
                std::cmp::Ordering::Equal => v == 1,
                std::cmp::Ordering::Greater => v <= 0,
            };
            if !ok {
                out.push((k, t));
            }
        }
    }
    out
}

/// Injectivity of ρ on `[−b, b]^L` by scanning the box; `None` when the box
/// has more than `max_points` points.
pub fn injective_on_box(order: &RootOrder, b: i64, max_points: u64) -> Option<bool> {
    let l = order.len();
    let side = (2 * b + 1) as u64;
    let points = side.checked_pow(l as u32)?;
    if points > max_points || l > 8 {
        return None;
    }
    let t = rho_matrix(order);
    let mut m = vec![-b; l];
    let mut r = rho_with(&t, &m);
    let pack = |r: &[i64]| -> u128 {
        r.iter()
            .fold(0u128, |acc, &x| (acc << 16) | u128::from((x + 0x8000) as u16))
    };
    let mut seen: Vec<u128> = Vec::with_capacity(points as usize);
    loop {
        debug_assert!(r.iter().all(|x| x.abs() < 0x8000));
        seen.push(pack(&r));
        // odometer step, updating ρ by the changed column
        let mut k = 0;
        while k < l && m[k] == b {
            for (row, ri) in t.iter().zip(r.iter_mut()) {
                *ri -= 2 * b * row[k];
            }
            m[k] = -b;
            k += 1;
        }
        if k == l {
            break;
        }
        m[k] += 1;
        for (row, ri) in t.iter().zip(r.iter_mut()) {
            *ri += row[k];
        }
    }
    seen.sort_unstable();
    Some(seen.windows(2).all(|w| w[0] != w[1]))
}

/// Positions `k` of adjacent commuting letters, with whether swapping them
/// transposes ρ on every partition in `kps`.
pub fn commutation_equivariance(order: &RootOrder, kps: &[KostantPartition]) -> Result<Vec<(usize, bool)>> {
    let c = &order.cartan;
    let mut out = Vec::new();
    for k in 0..order.len().saturating_sub(1) {
        let (a, b) = (order.word[k], order.word[k + 1]);
        if a == b || c.a(a, b) != 0 {
            continue;
        }
        let mut w = order.word.clone();
        w.swap(k, k + 1);
        let swapped = RootOrder::new(c.clone(), w)?;
        let t1 = rho_matrix(order);
        let t2 = rho_matrix(&swapped);
        let mut ok = true;
        for m in kps {
            let m2 = KostantPartition::from_roots(&swapped, &m.by_root(order), m.signed)?;
            let mut r1 = rho_with(&t1, &m.mults);
            r1.swap(k, k + 1);
            if rho_with(&t2, &m2.mults) != r1 {
                ok = false;
                break;
            }
        }
        out.push((k, ok));
    }
    Ok(out)
}

/// Checks the sign pattern, injectivity of ρ on KP(β) and on a box, and the
/// commutation equivariance of ρ.
pub fn order_properties(order: &RootOrder, beta: &Root, box_bound: i64, budget: Option<usize>) -> Result<OrderReport> {
    let kps = enumerate(order, beta, budget)?;
    let t = rho_matrix(order);
    let rhos: HashSet<Vec<i64>> = kps.iter().map(|m| rho_with(&t, &m.mults)).collect();
    let comm = commutation_equivariance(order, &kps)?;
    Ok(OrderReport {
        sign_failures: sign_pattern_failures(order),
        kp_size: kps.len(),
        injective_on_kp: rhos.len() == kps.len(),
        injective_on_box: injective_on_box(order, box_bound, 10_000_000),
        box_bound,
        commutations_checked: comm.len(),
        commutation_failures: comm.iter().filter(|(_, ok)| !ok).map(|(k, _)| *k).collect(),
    })
}

/// Pairs `(k, l)`, `k < l`, with `β_k + β_l = α` and no such pair strictly
/// nested inside.
pub fn minimal_pairs(order: &RootOrder, alpha: &Root) -> Result<Vec<(usize, usize)>> {
    if order.position(alpha).is_none() {
        return Err(Error::NotPositiveRoot(alpha.to_string()));
    }
    let l = order.len();
    let mut pairs = Vec::new();
    for k in 0..l {
        for t in k + 1..l {
            if order.betas[k].add(&order.betas[t]) == *alpha {
                pairs.push((k, t));
            }
        }
    }
    Ok(pairs
        .iter()
        .copied()
        .filter(|&(k, t)| !pairs.iter().any(|&(k2, t2)| k < k2 && k2 < t2 && t2 < t))
        .collect())
}

/// Every `β ∈ Q⁺` with `0 < |β| ≤ max_height`.
pub fn nonnegative_weights(rank: usize, max_height: i64) -> Vec<Root> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    fn go(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Root>) {
        if i == cur.len() {
            if cur.iter().any(|&c| c > 0) {
                out.push(Root(cur.clone()));
            }
            return;
        }
        for c in 0..=left {
            cur[i] = c;
            go(i + 1, left - c, cur, out);
        }
        cur[i] = 0;
    }
    go(0, max_height, &mut cur, &mut out);
    out
}

//! Quantum Cartan matrices `A(z)` and the Laurent expansion at `z = 0` of
//! their inverses, with the identities relating the coefficients `ã_ij(u)`
//! to τ_Q and to the pairings `(ν_k, β_t)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::qdatum::{ConvexOrder, QDatum, TauQ};
use crate::rootsys::{dual_coxeter, CartanData, Root, Weight};

/// Integer Laurent polynomial, stored sparsely without zero coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: i64, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// The quantum integer `[k]_z = (z^k − z^{−k}) / (z − z^{−1})`.
    pub fn qint(k: i64) -> Self {
        let sign = k.signum();
        let m = k.abs();
        Self::from_terms((0..m).map(|t| (m - 1 - 2 * t, sign)))
    }

    pub fn add_term(&mut self, exp: i64, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let e = self.terms.entry(exp).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn eval_at_one(&self) -> i64 {
        self.terms.values().sum()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, c);
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(e, c)| (e, -c)))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&e, &c)| match e {
                0 => format!("{c}"),
                _ => format!("{c}z^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Determinant of a square matrix of Laurent polynomials by expansion over
/// column subsets (exact, `O(2^n n)` products).
pub fn determinant(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    if n == 0 {
        return LaurentPoly::monomial(1, 0);
    }
    // dp[mask] = determinant of rows 0..|mask| restricted to columns in mask
    let mut dp: Vec<LaurentPoly> = vec![LaurentPoly::zero(); 1 << n];
    dp[0] = LaurentPoly::monomial(1, 0);
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = LaurentPoly::zero();
        for col in 0..n {
            if mask & (1 << col) == 0 || m[row][col].is_zero() {
                continue;
            }
            let rest = mask & !(1 << col);
            if dp[rest].is_zero() {
                continue;
            }
            // sign from the position of `col` among the chosen columns
            let above = (rest & ((1 << n) - 1) & !((1 << (col + 1)) - 1)).count_ones();
            let term = &m[row][col] * &dp[rest];
            acc = if above.is_multiple_of(2) { &acc + &term } else { &acc - &term };
        }
        dp[mask] = acc;
    }
    dp[(1 << n) - 1].clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumCartan {
    pub g0: CartanData,
    pub entries: Vec<Vec<LaurentPoly>>,
}

impl QuantumCartan {
    /// `a_ii(z) = z^{𝗌_i} + z^{−𝗌_i}`, `a_ij(z) = [a_ij]_z`.
    pub fn build(g0: &CartanData) -> Self {
        let n = g0.rank();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            let s = g0.symmetrizers[i];
                            LaurentPoly::from_terms([(s, 1), (-s, 1)])
                        } else {
                            LaurentPoly::qint(g0.a(i, j))
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            g0: g0.clone(),
            entries,
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn at_one(&self) -> IntMatrix {
        let n = self.rank();
        IntMatrix::from_fn(n, n, |i, j| self.entries[i][j].eval_at_one())
    }

    /// Expands `A(z)^{−1}` at `z = 0` up to exponent `cutoff`, by adjugate over
    /// determinant, and checks the result by multiplying back.
    pub fn invert(&self, cutoff: i64) -> Result<InverseSeries> {
        if cutoff < 1 {
            return Err(Error::Cutoff { have: cutoff, required: 1 });
        }
        let n = self.rank();
        let det = determinant(&self.entries);
        let d0 = det
            .min_exp()
            .ok_or_else(|| Error::Invariant("quantum Cartan determinant vanishes".into()))?;
        let lead = det.coeff(d0);
        let width = (2 * cutoff + 1) as usize;
        let mut coeffs = vec![vec![vec![0i64; width]; n]; n];
        for i in 0..n {
            for j in 0..n {
                // (i, j) entry of the inverse is the (j, i) cofactor over det
                let minor: Vec<Vec<LaurentPoly>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| self.entries[r][c].clone()).collect())
                    .collect();
                let mut cof = determinant(&minor);
                if (i + j) % 2 == 1 {
                    cof = -&cof;
                }
                let series = divide_series(&cof, &det, d0, lead, cutoff)?;
                for (u, c) in series {
                    if u >= -cutoff && u <= cutoff {
                        coeffs[i][j][(u + cutoff) as usize] = c;
                    }
                }
            }
        }
        let inv = InverseSeries {
            g0: self.g0.clone(),
            cutoff,
            coeffs,
        };
        inv.check_back_multiplication(self)?;
        inv.check_vanishing_below_one()?;
        Ok(inv)
    }
}

/// Coefficients of `f / g` at `z = 0` for exponents up to `cutoff`.
fn divide_series(f: &LaurentPoly, g: &LaurentPoly, g0: i64, lead: i64, cutoff: i64) -> Result<BTreeMap<i64, i64>> {
    let mut out = BTreeMap::new();
    let Some(f0) = f.min_exp() else {
        return Ok(out);
    };
    let start = f0 - g0;
    let mut rem = f.clone();
    let mut u = start;
    while u <= cutoff {
        let c = rem.coeff(u + g0);
        if c != 0 {
            if c % lead != 0 {
                return Err(Error::Invariant(format!(
                    "non-integral series coefficient {c}/{lead}"
                )));
            }
            let q = c / lead;
            out.insert(u, q);
            rem = &rem - &(&LaurentPoly::monomial(q, u) * g);
        }
        u += 1;
    }
    Ok(out)
}

/// Coefficients `ã_ij(u)` for `−U ≤ u ≤ U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseSeries {
    pub g0: CartanData,
    pub cutoff: i64,
    coeffs: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

impl IdentityCheck {
    fn new(lhs: i64, rhs: i64) -> Self {
        Self {
            lhs,
            rhs,
            equal: lhs == rhs,
        }
    }
}

impl InverseSeries {
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// `ã_ij(u)`, or `None` outside the window.
    pub fn get(&self, i: usize, j: usize, u: i64) -> Option<i64> {
        (u.abs() <= self.cutoff).then(|| self.coeffs[i][j][(u + self.cutoff) as usize])
    }

    pub fn coeff(&self, i: usize, j: usize, u: i64) -> Result<i64> {
        self.get(i, j, u).ok_or(Error::Cutoff {
            have: self.cutoff,
            required: u.abs(),
        })
    }

    /// All `(i, j, u, ã_ij(u))` rows with `u` in the window.
    pub fn rows(&self) -> Vec<(usize, usize, i64, i64)> {
        let n = self.rank();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for u in -self.cutoff..=self.cutoff {
                    out.push((i, j, u, self.coeffs[i][j][(u + self.cutoff) as usize]));
                }
            }
        }
        out
    }

    /// `Ã·A = 1` and `A·Ã = 1` on exponents `|u| ≤ U − max 𝗌`.
    pub fn check_back_multiplication(&self, a: &QuantumCartan) -> Result<()> {
        let n = self.rank();
        let max_s = *a.g0.symmetrizers.iter().max().unwrap_or(&1);
        let reach = self.cutoff - max_s;
        for i in 0..n {
            for k in 0..n {
                for u in -reach..=reach {
                    let mut left = 0i64;
                    let mut right = 0i64;
                    for j in 0..n {
                        for (e, c) in a.entries[j][k].terms() {
                            left += self.get(i, j, u - e).unwrap_or(0) * c;
                        }
                        for (e, c) in a.entries[i][j].terms() {
                            right += c * self.get(j, k, u - e).unwrap_or(0);
                        }
                    }
                    let want = i64::from(i == k && u == 0);
                    if left != want || right != want {
                        return Err(Error::Invariant(format!(
                            "inverse check fails at ({}, {}) for z^{u}",
                            i + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ã_ij(u) = 0` for all `u ≤ 0` in the window.
    pub fn check_vanishing_below_one(&self) -> Result<()> {
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                for u in -self.cutoff..=0 {
                    if self.coeffs[i][j][(u + self.cutoff) as usize] != 0 {
                        return Err(Error::Invariant(format!(
                            "ã_{}{}({u}) is nonzero",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `2|σ|h^∨ + (max ξ − min ξ) + 4`.
pub fn default_cutoff(q: &QDatum) -> i64 {
    let spread = q.xi.iter().max().unwrap_or(&0) - q.xi.iter().min().unwrap_or(&0);
    2 * q.r() * dual_coxeter(q.g0.label) + spread + 4
}

/// `ã_ij(u) − ã_ij(−u)` against `(Λ_ι, τ^{(u+ξ_ȷ−ξ_ι−𝗌_i)/2} γ_ȷ)` (zero when
/// the exponent is not an integer), for vertices ι ∈ J^{(i)}, ȷ ∈ J^{(j)}.
pub fn pairing_identity(
    q: &QDatum,
    tau: &TauQ,
    s: &InverseSeries,
    iota: usize,
    jota: usize,
    u: i64,
) -> Result<IdentityCheck> {
    let i = q.orbit_of[iota];
    let j = q.orbit_of[jota];
    let lhs = s.coeff(i, j, u)? - s.coeff(i, j, -u)?;
    let num = u + q.xi[jota] - q.xi[iota] - q.g0.symmetrizers[i];
    let rhs = if num.rem_euclid(2) == 0 {
        let gamma = q.gamma_with(tau, jota)?;
        let img: Root = tau.apply_root(num / 2, &gamma);
        q.cartan
            .pairing(&Weight::fundamental(q.rank(), iota), &img)
    } else {
        0
    };
    Ok(IdentityCheck::new(lhs, rhs))
}

/// `ã_ij(ξ_ȷ−ξ_ι−𝗌_i−2l𝗌_ij) = 0 = ã_ij(ξ_ι−ξ_ȷ−𝗌_i−2l𝗌_ij)` for all `l ≥ 0`
/// whose argument lies in the window.
pub fn vanishing_check(q: &QDatum, s: &InverseSeries, iota: usize, jota: usize) -> bool {
    let i = q.orbit_of[iota];
    let j = q.orbit_of[jota];
    let si = q.g0.symmetrizers[i];
    let sij = si.min(q.g0.symmetrizers[j]);
    let d = q.xi[jota] - q.xi[iota];
    for base in [d - si, -d - si] {
        let mut arg = base;
        while arg >= -s.cutoff {
            if s.get(i, j, arg).is_some_and(|c| c != 0) {
                return false;
            }
            arg -= 2 * sij;
        }
    }
    true
}

/// `(ν_k, β_t)` against `ã_{ī_k ī_t}(p_t − p_k + 𝗌) − ã_{ī_k ī_t}(p_k − p_t − 𝗌)`
/// with `𝗌 = 𝗌_{ī_k}` (0-based `k`, `t`).
pub fn nu_beta_bridge(o: &ConvexOrder, s: &InverseSeries, k: usize, t: usize) -> Result<IdentityCheck> {
    let q = &o.datum;
    let ik = q.orbit_of[o.word()[k]];
    let it = q.orbit_of[o.word()[t]];
    let sk = q.g0.symmetrizers[ik];
    let (pk, pt) = (o.heights[k], o.heights[t]);
    let rhs = s.coeff(ik, it, pt - pk + sk)? - s.coeff(ik, it, pk - pt - sk)?;
    Ok(IdentityCheck::new(o.order.nu_beta(k, t), rhs))
}

//! Q-data: height functions on a simply-laced diagram with an automorphism,
//! sources and reflections, adapted reduced words, the map Ω̃ and the
//! generalized σ-Coxeter element τ_Q.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::IntMatrix;
use crate::rootsys::{dual_coxeter, CartanData, Family, Root, TypeLabel, Weight};

/// A permutation of the diagram vertices preserving the edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagramAutomorphism {
    pub perm: Vec<usize>,
    pub order: u32,
}

impl DiagramAutomorphism {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            order: 1,
        }
    }

    /// Builds the permutation from disjoint cycles of 0-based vertices.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (k, &v) in cyc.iter().enumerate() {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, rank: n });
                }
                if touched[v] {
                    return Err(Error::Parse(format!("vertex {} repeated in cycles", v + 1)));
                }
                touched[v] = true;
                perm[v] = cyc[(k + 1) % cyc.len()];
            }
        }
        Self::from_perm(perm)
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if distinct.len() != n || perm.iter().any(|&v| v >= n) {
            return Err(Error::Parse(format!("not a permutation: {perm:?}")));
        }
        let mut order = 1u32;
        let mut cur = perm.clone();
        while cur.iter().enumerate().any(|(i, &v)| i != v) {
            cur = cur.iter().map(|&v| perm[v]).collect();
            order += 1;
        }
        Ok(Self { perm, order })
    }

    /// Parses cycle notation with 1-based vertices, e.g. `(1 3)(2 4)`.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in {s:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced cycle in {s:?}")))?;
            let cyc = open[..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .ok()
                        .filter(|&v| v >= 1)
                        .map(|v| v - 1)
                        .ok_or_else(|| Error::Parse(format!("bad vertex {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cyc);
            rest = open[close + 1..].trim_start();
        }
        Self::from_cycles(n, &cycles)
    }

    /// Non-trivial cycles with 1-based vertices.
    pub fn cycles_one_based(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = Vec::new();
        for start in 0..self.perm.len() {
            if seen[start] || self.perm[start] == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cyc.push(v + 1);
                v = self.perm[v];
            }
            out.push(cyc);
        }
        out
    }

    pub fn apply(&self, v: usize) -> usize {
        self.perm[v]
    }

    pub fn pow_apply(&self, v: usize, k: u32) -> usize {
        (0..k).fold(v, |x, _| self.perm[x])
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }

    pub fn check_preserves(&self, c: &CartanData) -> Result<()> {
        let n = c.rank();
        if self.perm.len() != n {
            return Err(Error::NotAutomorphism(format!(
                "permutation of {} vertices for a rank {n} diagram",
                self.perm.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                if c.a(i, j) != c.a(self.perm[i], self.perm[j]) {
                    return Err(Error::NotAutomorphism(format!(
                        "edge {}-{} is not preserved",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Matrix of σ on weight (or root) coordinates: `(σv)_{σ(i)} = v_i`.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.perm.len();
        IntMatrix::from_fn(n, n, |r, c| i64::from(self.perm[c] == r))
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.perm.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut orb = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                orb.push(v);
                v = self.perm[v];
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }
}

/// The Cartan datum of 𝔤₀ induced by the orbits of σ, with the orbit ↔ node
/// identification (`orbits[i]` is `J^{(i)}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedCartan {
    pub g0: CartanData,
    pub orbits: Vec<Vec<usize>>,
    /// The raw orbit matrix `c_ST` in the order of `orbits`.
    pub orbit_matrix: IntMatrix,
}

pub fn induced_cartan(c: &CartanData, sigma: &DiagramAutomorphism) -> Result<InducedCartan> {
    if !c.is_simply_laced() {
        return Err(Error::UnsupportedType(format!(
            "{} is not simply-laced",
            c.label
        )));
    }
    sigma.check_preserves(c)?;
    let orbits = sigma.orbits();
    for orb in &orbits {
        for &a in orb {
            for &b in orb {
                if c.adjacent(a, b) {
                    return Err(Error::NotAutomorphism(format!(
                        "orbit contains adjacent vertices {} and {}",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
    }
    let m = orbits.len();
    let cst = IntMatrix::from_fn(m, m, |s, t| {
        if s == t {
            2
        } else if orbits[s]
            .iter()
            .any(|&a| orbits[t].iter().any(|&b| c.adjacent(a, b)))
        {
            let ratio = orbits[t].len() as i64 / orbits[s].len() as i64;
            -ratio.max(1)
        } else {
            0
        }
    });
    if sigma.is_identity() {
        return Ok(InducedCartan {
            g0: c.clone(),
            orbits,
            orbit_matrix: cst,
        });
    }
    for family in [Family::B, Family::C, Family::F, Family::G, Family::A, Family::D, Family::E] {
        let Ok(label) = TypeLabel::new(family, m) else {
            continue;
        };
        let g0 = CartanData::new(label);
        if let Some(assign) = match_matrix(&g0.matrix, &cst) {
            let ordered: Vec<Vec<usize>> = assign.iter().map(|&s| orbits[s].clone()).collect();
            for (i, orb) in ordered.iter().enumerate() {
                if g0.symmetrizers[i] != orb.len() as i64 {
                    return Err(Error::Invariant(format!(
                        "orbit size {} does not match symmetrizer {} of {label}",
                        orb.len(),
                        g0.symmetrizers[i]
                    )));
                }
            }
            return Ok(InducedCartan {
                g0,
                orbits: ordered,
                orbit_matrix: cst,
            });
        }
    }
    Err(Error::UnsupportedType(format!(
        "orbit matrix {cst:?} is not of finite type"
    )))
}

/// Finds `π` with `c[π(i)][π(j)] = a[i][j]` by backtracking.
fn match_matrix(a: &IntMatrix, c: &IntMatrix) -> Option<Vec<usize>> {
    let n = a.rows();
    if c.rows() != n {
        return None;
    }
    fn go(a: &IntMatrix, c: &IntMatrix, assign: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = assign.len();
        let n = a.rows();
        if i == n {
            return true;
        }
        for s in 0..n {
            if used[s] {
                continue;
            }
            let ok = (0..i).all(|j| a[(i, j)] == c[(s, assign[j])] && a[(j, i)] == c[(assign[j], s)]);
            if ok {
                used[s] = true;
                assign.push(s);
                if go(a, c, assign, used) {
                    return true;
                }
                assign.pop();
                used[s] = false;
            }
        }
        false
    }
    let mut assign = Vec::new();
    let mut used = vec![false; n];
    go(a, c, &mut assign, &mut used).then_some(assign)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    /// Neighbours with equal orbit sizes differ in height by that size.
    EqualSize,
    /// Neighbouring orbits of different sizes have a unique attaching vertex.
    MixedSize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// 1-based vertices involved.
    pub vertices: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {:?}: {}", self.axiom, self.vertices, self.detail)
    }
}

/// A Q-datum `(J, σ, ξ)` with its derived orbit data. Construction checks
/// the structure only; [`QDatum::validate`] checks the height-function axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QDatum {
    pub cartan: CartanData,
    pub sigma: DiagramAutomorphism,
    pub xi: Vec<i64>,
    pub g0: CartanData,
    /// `J^{(i)}` for each node `i` of 𝔤₀.
    pub orbits: Vec<Vec<usize>>,
    /// `ι ↦ ῑ`.
    pub orbit_of: Vec<usize>,
}

impl QDatum {
    pub fn new(cartan: CartanData, sigma: DiagramAutomorphism, xi: Vec<i64>) -> Result<Self> {
        if xi.len() != cartan.rank() {
            return Err(Error::Parse(format!(
                "{} heights given for a rank {} diagram",
                xi.len(),
                cartan.rank()
            )));
        }
        let induced = induced_cartan(&cartan, &sigma)?;
        let mut orbit_of = vec![0; cartan.rank()];
        for (i, orb) in induced.orbits.iter().enumerate() {
            for &v in orb {
                orbit_of[v] = i;
            }
        }
        Ok(Self {
            cartan,
            sigma,
            xi,
            g0: induced.g0,
            orbits: induced.orbits,
            orbit_of,
        })
    }

    /// Structural construction followed by the axiom check.
    pub fn checked(cartan: CartanData, sigma: DiagramAutomorphism, xi: Vec<i64>) -> Result<Self> {
        let q = Self::new(cartan, sigma, xi)?;
        q.ensure_valid()?;
        Ok(q)
    }

    /// Convenience constructor with 0-based cycles.
    pub fn build(label: &str, cycles: &[Vec<usize>], xi: &[i64]) -> Result<Self> {
        let c = CartanData::from_label(label)?;
        let sigma = DiagramAutomorphism::from_cycles(c.rank(), cycles)?;
        Self::checked(c, sigma, xi.to_vec())
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    /// `𝗌_ῑ` for a vertex ι.
    pub fn s(&self, v: usize) -> i64 {
        self.g0.symmetrizers[self.orbit_of[v]]
    }

    pub fn r(&self) -> i64 {
        i64::from(self.sigma.order)
    }

    /// The parity `ε_i` with `ε_ῑ ≡ ξ_ι (mod 2)`.
    pub fn epsilon(&self) -> Vec<i64> {
        self.orbits
            .iter()
            .map(|orb| self.xi[orb[0]].rem_euclid(2))
            .collect()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.cartan.num_positive_roots()
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let c = &self.cartan;
        let n = self.rank();
        for a in 0..n {
            for b in a + 1..n {
                if c.adjacent(a, b) && self.s(a) == self.s(b) && (self.xi[a] - self.xi[b]).abs() != self.s(a) {
                    out.push(Violation {
                        axiom: Axiom::EqualSize,
                        vertices: vec![a + 1, b + 1],
                        detail: format!(
                            "|{} - {}| != {}",
                            self.xi[a],
                            self.xi[b],
                            self.s(a)
                        ),
                    });
                }
            }
        }
        let m = self.orbits.len();
        for i in 0..m {
            for j in 0..m {
                if i == j || self.g0.a(i, j) >= 0 || self.g0.symmetrizers[i] >= self.g0.symmetrizers[j] {
                    continue;
                }
                let iota = self.orbits[i][0];
                let cands: Vec<usize> = self.orbits[j]
                    .iter()
                    .copied()
                    .filter(|&jo| {
                        (self.xi[iota] - self.xi[jo]).abs() == 1
                            && (0..self.sigma.order).all(|k| {
                                self.xi[self.sigma.pow_apply(jo, k)] == self.xi[jo] - 2 * i64::from(k)
                            })
                    })
                    .collect();
                if cands.len() != 1 {
                    let mut vertices: Vec<usize> = vec![iota + 1];
                    vertices.extend(self.orbits[j].iter().map(|v| v + 1));
                    out.push(Violation {
                        axiom: Axiom::MixedSize,
                        vertices,
                        detail: format!("{} admissible attaching vertices, expected exactly one", cands.len()),
                    });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
            Err(Error::InvalidDatum(msgs.join("; ")))
        }
    }

    pub fn is_source(&self, v: usize) -> bool {
        self.cartan
            .neighbors(v)
            .iter()
            .all(|&w| self.xi[v] > self.xi[w])
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&v| self.is_source(v)).collect()
    }

    /// `s_ι Q`: lowers the height of the source ι by `2𝗌_ῑ`.
    pub fn reflect_source(&self, v: usize) -> Result<Self> {
        if v >= self.rank() {
            return Err(Error::IndexOutOfRange {
                index: v,
                rank: self.rank(),
            });
        }
        if !self.is_source(v) {
            return Err(Error::NotASource(v + 1));
        }
        let mut q = self.clone();
        q.xi[v] -= 2 * self.s(v);
        Ok(q)
    }

    /// Arrows `ι → ȷ` for adjacent vertices with `ξ_ι < ξ_ȷ`. Equal heights
    /// give no arrow; this never happens for a valid datum because
    /// neighbouring heights differ by an odd number or by `𝗌`.
    pub fn orientation_quiver(&self) -> Vec<(usize, usize)> {
        let n = self.rank();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.cartan.adjacent(a, b) && self.xi[a] < self.xi[b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `Im Ω̃_Q` from the closed formula
    /// `ξ_{ι*} − |σ|h^∨ < p ≤ ξ_ι`, `p ≡ ξ_ι (mod 2𝗌_ῑ)`.
    pub fn image_formula(&self) -> BTreeSet<(usize, i64)> {
        let star = self.cartan.w0_star();
        let bound = self.r() * dual_coxeter(self.g0.label);
        let mut out = BTreeSet::new();
        for v in 0..self.rank() {
            let lo = self.xi[star[v]] - bound;
            let mut p = self.xi[v];
            while p > lo {
                out.insert((v, p));
                p -= 2 * self.s(v);
            }
        }
        out
    }

    /// The adapted reduced word chosen deterministically: at each step the
    /// smallest source ι whose root `w(α_ι)` is positive, with backtracking.
    pub fn adapted_word(&self) -> Result<ConvexOrder> {
        let mut word = Vec::new();
        let total = self.num_positive_roots();
        let mut found = None;
        self.search_adapted(&mut word, total, &mut |w| {
            found = Some(w.to_vec());
            false
        });
        let word = found.ok_or_else(|| Error::Invariant("no adapted reduced word found".into()))?;
        ConvexOrder::new(self.clone(), word)
    }

    /// Every reduced word of `w0` adapted to Q, in lexicographic order.
    pub fn all_adapted_words(&self, budget: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut exceeded = false;
        let total = self.num_positive_roots();
        self.search_adapted(&mut Vec::new(), total, &mut |w| {
            if out.len() >= budget {
                exceeded = true;
                return false;
            }
            out.push(w.to_vec());
            true
        });
        if exceeded {
            return Err(Error::BudgetExceeded(budget));
        }
        Ok(out)
    }

    /// Depth-first search over adapted words; `visit` returns whether to continue.
    fn search_adapted(&self, word: &mut Vec<usize>, total: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let n = self.rank();
        fn go(
            q: &QDatum,
            w: &IntMatrix,
            word: &mut Vec<usize>,
            total: usize,
            visit: &mut dyn FnMut(&[usize]) -> bool,
        ) -> bool {
            if word.len() == total {
                return visit(word);
            }
            let n = q.rank();
            for v in q.sources() {
                if (0..n).any(|r| w[(r, v)] < 0) {
                    continue;
                }
                let next_q = q.reflect_source(v).expect("v is a source");
                let next_w = w * &q.cartan.reflection_root_matrix(v);
                word.push(v);
                let cont = go(&next_q, &next_w, word, total, visit);
                word.pop();
                if !cont {
                    return false;
                }
            }
            true
        }
        go(self, &IntMatrix::identity(n), word, total, visit);
    }

    /// Serializable form with 1-based cycles.
    pub fn to_spec(&self) -> QDatumSpec {
        QDatumSpec {
            family: self.cartan.label.to_string()[..1].to_string(),
            rank: Some(self.cartan.label.rank),
            sigma: self.sigma.cycles_one_based(),
            xi: self.xi.clone(),
        }
    }

    /// Structural construction from the JSON form; the axioms are not checked.
    pub fn from_spec_unchecked(spec: &QDatumSpec) -> Result<Self> {
        let label = spec.label()?;
        let c = CartanData::new(label);
        let cycles: Vec<Vec<usize>> = spec
            .sigma
            .iter()
            .map(|cyc| {
                cyc.iter()
                    .map(|&v| {
                        v.checked_sub(1)
                            .ok_or_else(|| Error::Parse("vertices are 1-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let sigma = DiagramAutomorphism::from_cycles(c.rank(), &cycles)?;
        Self::new(c, sigma, spec.xi.clone())
    }

    pub fn from_spec(spec: &QDatumSpec) -> Result<Self> {
        let q = Self::from_spec_unchecked(spec)?;
        q.ensure_valid()?;
        Ok(q)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: QDatumSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("serializable")
    }
}

/// JSON form of a Q-datum: `{"type": "A", "rank": 3, "sigma": [[1, 3]], "xi": [1, 0, -1]}`.
/// `type` may also carry the rank (`"A3"`), in which case `rank` is optional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QDatumSpec {
    #[serde(rename = "type")]
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default)]
    pub sigma: Vec<Vec<usize>>,
    pub xi: Vec<i64>,
}

impl QDatumSpec {
    pub fn label(&self) -> Result<TypeLabel> {
        let t = self.family.trim();
        let has_rank = t.chars().skip(1).any(|c| c.is_ascii_digit());
        let label: TypeLabel = match (has_rank, self.rank) {
            (true, None) => t.parse()?,
            (true, Some(r)) => {
                let l: TypeLabel = t.parse()?;
                if l.rank != r {
                    return Err(Error::Parse(format!("type {t} conflicts with rank {r}")));
                }
                l
            }
            (false, Some(r)) => format!("{t}{r}").parse()?,
            (false, None) => return Err(Error::Parse("missing rank".into())),
        };
        Ok(label)
    }
}

/// A reduced word of `w0` with the roots `β_k` and weights `ν_k` it defines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootOrder {
    pub cartan: CartanData,
    pub word: Vec<usize>,
    /// `β_k = s_{ι_1} ⋯ s_{ι_{k−1}}(α_{ι_k})`.
    pub betas: Vec<Root>,
    /// `ν_k = −s_{ι_1} ⋯ s_{ι_k}(Λ_{ι_k})`.
    pub nus: Vec<Weight>,
    #[serde(skip)]
    index: HashMap<Root, usize>,
}

impl RootOrder {
    pub fn new(cartan: CartanData, word: Vec<usize>) -> Result<Self> {
        if !cartan.is_reduced_word_of_w0(&word) {
            return Err(Error::Invariant(format!(
                "{:?} is not a reduced word of w0 for {}",
                word.iter().map(|v| v + 1).collect::<Vec<_>>(),
                cartan.label
            )));
        }
        let betas = cartan.word_roots(&word)?;
        let n = cartan.rank();
        let mut w = IntMatrix::identity(n);
        let mut nus = Vec::with_capacity(word.len());
        for &v in &word {
            w = &w * &cartan.reflection_weight_matrix(v);
            nus.push(Weight((0..n).map(|r| -w[(r, v)]).collect()));
        }
        let index = betas.iter().cloned().enumerate().map(|(k, b)| (b, k)).collect();
        Ok(Self {
            cartan,
            word,
            betas,
            nus,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Position of a positive root in the order.
    pub fn position(&self, b: &Root) -> Option<usize> {
        self.index.get(b).copied()
    }

    /// `(ν_k, β_t)`.
    pub fn nu_beta(&self, k: usize, t: usize) -> i64 {
        self.cartan.pairing(&self.nus[k], &self.betas[t])
    }
}

/// An adapted reduced word of a Q-datum with its Ω̃ values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexOrder {
    pub datum: QDatum,
    pub order: RootOrder,
    /// `p_k` with `Ω̃(β_k) = (ι_k, p_k)`.
    pub heights: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub root: Root,
    pub vertex: usize,
    pub p: i64,
}

impl ConvexOrder {
    /// Checks that `word` is reduced and adapted to `datum`.
    pub fn new(datum: QDatum, word: Vec<usize>) -> Result<Self> {
        let order = RootOrder::new(datum.cartan.clone(), word)?;
        let mut cur = datum.clone();
        let mut heights = Vec::with_capacity(order.len());
        for &v in &order.word {
            heights.push(cur.xi[v]);
            cur = cur.reflect_source(v).map_err(|_| {
                Error::Invariant(format!("word is not adapted: vertex {} is not a source", v + 1))
            })?;
        }
        Ok(Self {
            datum,
            order,
            heights,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn word(&self) -> &[usize] {
        &self.order.word
    }

    pub fn betas(&self) -> &[Root] {
        &self.order.betas
    }

    /// `Ω̃(β_k) = (ι_k, p_k)` in the order of the word.
    pub fn omega_tilde(&self) -> Vec<OmegaEntry> {
        (0..self.len())
            .map(|k| OmegaEntry {
                root: self.order.betas[k].clone(),
                vertex: self.order.word[k],
                p: self.heights[k],
            })
            .collect()
    }

    /// Ω̃ keyed by root, independent of the word used.
    pub fn omega_map(&self) -> BTreeMap<Root, (usize, i64)> {
        self.omega_tilde()
            .into_iter()
            .map(|e| (e.root, (e.vertex, e.p)))
            .collect()
    }

    pub fn image(&self) -> BTreeSet<(usize, i64)> {
        (0..self.len())
            .map(|k| (self.order.word[k], self.heights[k]))
            .collect()
    }

    /// Index `k` with `Ω̃(β_k) = (ι, p)`.
    pub fn position_of(&self, v: usize, p: i64) -> Option<usize> {
        (0..self.len()).find(|&k| self.order.word[k] == v && self.heights[k] == p)
    }
}

/// Canonical representative of the commutation class of a word: repeatedly
/// emit the smallest letter that can be moved to the front.
pub fn commutation_normal_form(c: &CartanData, w: &[usize]) -> Vec<usize> {
    let mut rest: Vec<usize> = w.to_vec();
    let mut out = Vec::with_capacity(w.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for j in 0..rest.len() {
            let x = rest[j];
            let free = rest[..j].iter().all(|&y| y != x && c.a(x, y) == 0);
            if free && best.is_none_or(|b| x < rest[b]) {
                best = Some(j);
            }
        }
        let j = best.expect("the first letter is always movable");
        out.push(rest.remove(j));
    }
    out
}

/// How τ_Q was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TauConstruction {
    /// The product over the first source sequence tried.
    SourceProduct,
    /// A later source sequence (the earlier ones failed verification).
    AlternativeSourceProduct { attempt: usize },
    /// Solved column by column from `τ(Λ_ι) = s_{ι_1} ⋯ s_{ι_k}(Λ_ι)`.
    LinearSolve,
}

/// The generalized σ-Coxeter element τ_Q acting on weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauQ {
    pub matrix: IntMatrix,
    pub inverse: IntMatrix,
    /// τ_Q on root coordinates.
    pub root_matrix: IntMatrix,
    pub root_inverse: IntMatrix,
    /// The source sequence `(ι_1, …, ι_M)` with `τ = s_{ι_1} ⋯ s_{ι_M} σ`.
    pub word: Option<Vec<usize>>,
    pub construction: TauConstruction,
}

impl TauQ {
    fn new(c: &CartanData, matrix: IntMatrix, word: Option<Vec<usize>>, construction: TauConstruction) -> Option<Self> {
        let inverse = linalg::integer_inverse(&matrix)?;
        let n = c.rank();
        let image = &matrix * &c.matrix;
        let mut root_matrix = IntMatrix::zeros(n, n);
        for j in 0..n {
            let col = Weight((0..n).map(|r| image[(r, j)]).collect());
            let r = c.weight_to_root(&col)?;
            for i in 0..n {
                root_matrix[(i, j)] = r.0[i];
            }
        }
        let root_inverse = linalg::integer_inverse(&root_matrix)?;
        Some(Self {
            matrix,
            inverse,
            root_matrix,
            root_inverse,
            word,
            construction,
        })
    }

    /// `τ^e` on root coordinates.
    pub fn root_power(&self, e: i64) -> IntMatrix {
        let base = if e >= 0 { &self.root_matrix } else { &self.root_inverse };
        base.pow(e.unsigned_abs() as u32)
    }

    pub fn apply_root(&self, e: i64, r: &Root) -> Root {
        Root(self.root_power(e).mul_vec(&r.0))
    }

    /// `τ^e` for any integer `e`.
    pub fn power(&self, e: i64) -> IntMatrix {
        let base = if e >= 0 { &self.matrix } else { &self.inverse };
        base.pow(e.unsigned_abs() as u32)
    }

    pub fn apply(&self, e: i64, w: &Weight) -> Weight {
        Weight(self.power(e).mul_vec(&w.0))
    }
}

impl QDatum {
    /// Source sequences containing exactly one vertex of each σ-orbit.
    fn orbit_source_sequences(&self, limit: usize) -> Vec<Vec<usize>> {
        fn go(q: &QDatum, used: &mut Vec<bool>, seq: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
            if out.len() >= limit {
                return;
            }
            if seq.len() == q.orbits.len() {
                out.push(seq.clone());
                return;
            }
            for v in q.sources() {
                let o = q.orbit_of[v];
                if used[o] {
                    continue;
                }
                used[o] = true;
                seq.push(v);
                go(&q.reflect_source(v).expect("source"), used, seq, out, limit);
                seq.pop();
                used[o] = false;
            }
        }
        let mut out = Vec::new();
        go(self, &mut vec![false; self.orbits.len()], &mut Vec::new(), &mut out, limit);
        out
    }

    /// τ_Q, accepted only once both identities
    /// `β_k = τ^{(ξ−p_k)/2} γ_{ι_k}` and
    /// `s_{ι_1} ⋯ s_{ι_k} Λ_{ι_k} = τ^{(ξ−p_k+2𝗌)/2} Λ_{ι_k}` hold for every k.
    pub fn tau_q(&self) -> Result<TauQ> {
        let order = self.adapted_word()?;
        let c = &self.cartan;
        let sig = self.sigma.matrix();
        for (attempt, seq) in self.orbit_source_sequences(64).into_iter().enumerate() {
            let m = &c.word_weight_matrix(&seq)? * &sig;
            let construction = if attempt == 0 {
                TauConstruction::SourceProduct
            } else {
                TauConstruction::AlternativeSourceProduct { attempt }
            };
            let Some(tau) = TauQ::new(c, m, Some(seq), construction) else {
                continue;
            };
            if self.check_tau(&tau, &order).is_ok() {
                return Ok(tau);
            }
        }
        if let Some(m) = self.tau_from_powers(&order) {
            if let Some(tau) = TauQ::new(c, m, None, TauConstruction::LinearSolve) {
                self.check_tau(&tau, &order)?;
                return Ok(tau);
            }
        }
        Err(Error::Invariant("no operator satisfies the τ_Q identities".into()))
    }

    /// Solves for τ from the pairs `(τ^e Λ_ι, τ^{e+1} Λ_ι)` that the adapted
    /// word determines, using `s_{ι_1} ⋯ s_{ι_k} Λ_{ι_k} = τ^{(ξ−p_k+2𝗌)/2} Λ_{ι_k}`.
    fn tau_from_powers(&self, order: &ConvexOrder) -> Option<IntMatrix> {
        let n = self.rank();
        let mut known: Vec<BTreeMap<i64, Weight>> = (0..n)
            .map(|v| BTreeMap::from([(0, Weight::fundamental(n, v))]))
            .collect();
        for (k, &v) in order.word().iter().enumerate() {
            let e = (self.xi[v] - order.heights[k] + 2 * self.s(v)) / 2;
            known[v].insert(e, order.order.nus[k].neg());
        }
        let mut xs: Vec<Vec<i64>> = Vec::new();
        let mut ys: Vec<Vec<i64>> = Vec::new();
        for powers in &known {
            for (e, x) in powers {
                let Some(y) = powers.get(&(e + 1)) else { continue };
                let mut trial = xs.clone();
                trial.push(x.0.clone());
                if linalg::rank(&IntMatrix::from_rows(&trial)) == trial.len() {
                    xs = trial;
                    ys.push(y.0.clone());
                }
                if xs.len() == n {
                    break;
                }
            }
        }
        if xs.len() < n {
            return None;
        }
        // Columns of `a` are the x's, so τ = b a⁻¹.
        let a = IntMatrix::from_rows(&xs).transpose();
        let b = IntMatrix::from_rows(&ys).transpose();
        let inv = linalg::inverse(&a)?;
        let mut m = IntMatrix::zeros(n, n);
        for r in 0..n {
            for col in 0..n {
                let mut acc = linalg::rat(0);
                for t in 0..n {
                    acc += linalg::rat(b[(r, t)]) * &inv[t][col];
                }
                m[(r, col)] = linalg::to_integer(&acc)?;
            }
        }
        Some(m)
    }

    /// `γ_ι = (1 − τ^{𝗌_ῑ}) Λ_ι` in weight coordinates.
    pub fn gamma_weight(&self, tau: &TauQ, v: usize) -> Weight {
        let lam = Weight::fundamental(self.rank(), v);
        lam.sub(&tau.apply(self.s(v), &lam))
    }

    pub fn gamma_with(&self, tau: &TauQ, v: usize) -> Result<Root> {
        let g = self.gamma_weight(tau, v);
        let r = self
            .cartan
            .weight_to_root(&g)
            .ok_or_else(|| Error::NotPositiveRoot(format!("{g:?}")))?;
        if !self.cartan.positive_roots().contains(&r) {
            return Err(Error::NotPositiveRoot(r.to_string()));
        }
        Ok(r)
    }

    pub fn gamma(&self, v: usize) -> Result<Root> {
        let tau = self.tau_q()?;
        self.gamma_with(&tau, v)
    }

    /// Checks both τ_Q identities along an adapted word.
    pub fn check_tau(&self, tau: &TauQ, order: &ConvexOrder) -> Result<()> {
        let c = &self.cartan;
        let n = self.rank();
        for k in 0..order.len() {
            let v = order.word()[k];
            let p = order.heights[k];
            let e = (self.xi[v] - p) / 2;
            let gamma = self.gamma_weight(tau, v);
            let lhs = c.root_to_weight(&order.betas()[k]);
            if tau.apply(e, &gamma) != lhs {
                return Err(Error::Invariant(format!(
                    "β_{} != τ^{e} γ_{}",
                    k + 1,
                    v + 1
                )));
            }
            let e2 = (self.xi[v] - p + 2 * self.s(v)) / 2;
            let lam = Weight::fundamental(n, v);
            if tau.apply(e2, &lam) != order.order.nus[k].neg() {
                return Err(Error::Invariant(format!(
                    "s_{{i_1}}..s_{{i_{}}} Λ != τ^{e2} Λ_{}",
                    k + 1,
                    v + 1
                )));
            }
        }
        Ok(())
    }
}

/// A random valid height function for `(cartan, sigma)`: heights are
/// propagated along the diagram with random admissible differences until the
/// axioms hold, then moved by a random walk of source reflections and a
/// random shift.
pub fn random_datum<R: Rng>(cartan: &CartanData, sigma: &DiagramAutomorphism, rng: &mut R) -> Result<QDatum> {
    let n = cartan.rank();
    let base = QDatum::new(cartan.clone(), sigma.clone(), vec![0; n])?;
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for w in cartan.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                order.push(w);
            }
        }
    }
    for _ in 0..100_000 {
        let mut xi = vec![0i64; n];
        for &v in &order[1..] {
            let u = parent[v];
            let delta = if base.s(u) == base.s(v) {
                base.s(u)
            } else {
                *[1, 3, 5].choose(rng).expect("nonempty")
            };
            xi[v] = xi[u] + if rng.gen_bool(0.5) { delta } else { -delta };
        }
        let mut q = QDatum {
            xi,
            ..base.clone()
        };
        if !q.is_valid() {
            continue;
        }
        let steps = rng.gen_range(0..=3 * q.num_positive_roots());
        for _ in 0..steps {
            let srcs = q.sources();
            let v = *srcs.choose(rng).expect("a finite diagram has a source");
            q = q.reflect_source(v)?;
        }
        let shift = 2 * rng.gen_range(-3i64..=3);
        for x in q.xi.iter_mut() {
            *x += shift;
        }
        q.ensure_valid()?;
        return Ok(q);
    }
    Err(Error::Invariant("failed to sample a height function".into()))
}

/// The (𝗀, σ) pairs inducing the non-simply-laced 𝔤₀ of rank `n`, or `None`.
pub fn folding_for(g0: TypeLabel) -> Option<(TypeLabel, Vec<Vec<usize>>)> {
    let n = g0.rank;
    let label = |f, r| TypeLabel::new(f, r).ok();
    match g0.family {
        Family::B => {
            let m = 2 * n - 1;
            Some((label(Family::A, m)?, (0..n - 1).map(|i| vec![i, m - 1 - i]).collect()))
        }
        Family::C => Some((label(Family::D, n + 1)?, vec![vec![n - 1, n]])),
        Family::F => Some((label(Family::E, 6)?, vec![vec![0, 4], vec![1, 3]])),
        Family::G => Some((label(Family::D, 4)?, vec![vec![0, 2, 3]])),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a2() -> QDatum {
        QDatum::build("A2", &[], &[0, 1]).unwrap()
    }

    fn b2() -> QDatum {
        QDatum::build("A3", &[vec![0, 2]], &[1, 0, -1]).unwrap()
    }

    fn roots(v: &[&[i64]]) -> Vec<Root> {
        v.iter().map(|r| Root(r.to_vec())).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(a2().is_valid());
        assert!(b2().is_valid());
        let c = CartanData::from_label("A3").unwrap();
        let s = DiagramAutomorphism::parse_cycles("(1 3)", 3).unwrap();
        let bad = QDatum::new(c, s, vec![1, 0, 1]).unwrap();
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].axiom, Axiom::MixedSize);
        let a2_bad = QDatum::new(CartanData::from_label("A2").unwrap(), DiagramAutomorphism::identity(2), vec![0, 2]).unwrap();
        assert_eq!(a2_bad.validate()[0].axiom, Axiom::EqualSize);
    }

    #[test]
    fn induced_cartan_examples() {
        assert_eq!(b2().g0.matrix, IntMatrix::from_rows(&[vec![2, -1], vec![-2, 2]]));
        assert_eq!(b2().g0.label.to_string(), "B2");
        assert_eq!(a2().g0.matrix, CartanData::from_label("A2").unwrap().matrix);
        let d4 = CartanData::from_label("D4").unwrap();
        let tri = DiagramAutomorphism::parse_cycles("(1 3 4)", 4).unwrap();
        let g = induced_cartan(&d4, &tri).unwrap();
        assert_eq!(g.g0.label.to_string(), "G2");
        assert_eq!(g.orbits, vec![vec![0, 2, 3], vec![1]]);
        let e6 = CartanData::from_label("E6").unwrap();
        let flip = DiagramAutomorphism::parse_cycles("(1 5)(2 4)", 6).unwrap();
        let f = induced_cartan(&e6, &flip).unwrap();
        assert_eq!(f.g0.label.to_string(), "F4");
        assert_eq!(f.orbits, vec![vec![0, 4], vec![1, 3], vec![2], vec![5]]);
        let c = induced_cartan(&d4, &DiagramAutomorphism::parse_cycles("(3 4)", 4).unwrap()).unwrap();
        assert_eq!(c.g0.label.to_string(), "C3");
        assert_eq!(c.orbits, vec![vec![0], vec![1], vec![2, 3]]);
    }

    #[test]
    fn rejects_bad_automorphisms() {
        let a2c = CartanData::from_label("A2").unwrap();
        let flip = DiagramAutomorphism::parse_cycles("(1 2)", 2).unwrap();
        assert!(matches!(induced_cartan(&a2c, &flip), Err(Error::NotAutomorphism(_))));
        let a3 = CartanData::from_label("A3").unwrap();
        let bad = DiagramAutomorphism::parse_cycles("(1 2)", 3).unwrap();
        assert!(matches!(induced_cartan(&a3, &bad), Err(Error::NotAutomorphism(_))));
        assert!(DiagramAutomorphism::parse_cycles("(1 1)", 3).is_err());
        assert!(DiagramAutomorphism::parse_cycles("(1 4)", 3).is_err());
    }

    #[test]
    fn sources_and_reflections() {
        assert_eq!(a2().sources(), vec![1]);
        assert_eq!(b2().sources(), vec![0]);
        let r = a2().reflect_source(1).unwrap();
        assert_eq!(r.xi, vec![0, -1]);
        assert_eq!(r.sources(), vec![0]);
        assert_eq!(b2().reflect_source(0).unwrap().xi, vec![-3, 0, -1]);
        assert_eq!(a2().reflect_source(0), Err(Error::NotASource(1)));
    }

    #[test]
    fn adapted_word_examples() {
        let o = a2().adapted_word().unwrap();
        assert_eq!(o.word(), &[1, 0, 1]);
        assert_eq!(o.betas(), roots(&[&[0, 1], &[1, 1], &[1, 0]]).as_slice());
        let o = b2().adapted_word().unwrap();
        assert_eq!(o.word(), &[0, 1, 2, 1, 0, 1]);
        assert_eq!(
            o.betas(),
            roots(&[&[1, 0, 0], &[1, 1, 0], &[1, 1, 1], &[0, 0, 1], &[0, 1, 1], &[0, 1, 0]]).as_slice()
        );
        assert_eq!(o.heights, vec![1, 0, -1, -2, -3, -4]);
        let a1 = QDatum::build("A1", &[], &[0]).unwrap().adapted_word().unwrap();
        assert_eq!(a1.word(), &[0]);
        assert_eq!(a1.omega_tilde()[0].p, 0);
    }

    #[test]
    fn smallest_source_alone_can_fail() {
        // the plain smallest-source rule runs into a negative root here
        let q = QDatum::build("A3", &[], &[0, 1, 2]).unwrap();
        let o = q.adapted_word().unwrap();
        assert!(q.cartan.is_reduced_word_of_w0(o.word()));
    }

    #[test]
    fn omega_tilde_and_image() {
        let o = a2().adapted_word().unwrap();
        let m = o.omega_map();
        assert_eq!(m[&Root(vec![0, 1])], (1, 1));
        assert_eq!(m[&Root(vec![1, 1])], (0, 0));
        assert_eq!(m[&Root(vec![1, 0])], (1, -1));
        assert_eq!(o.image(), a2().image_formula());
        let want: BTreeSet<(usize, i64)> = [(0, 1), (0, -3), (1, 0), (1, -2), (1, -4), (2, -1)].into_iter().collect();
        assert_eq!(b2().image_formula(), want);
        assert_eq!(b2().adapted_word().unwrap().image(), want);
    }

    #[test]
    fn normal_form_examples() {
        let a3 = CartanData::from_label("A3").unwrap();
        assert_eq!(commutation_normal_form(&a3, &[0, 2, 1]), vec![0, 2, 1]);
        assert_eq!(commutation_normal_form(&a3, &[2, 0, 1]), vec![0, 2, 1]);
        let a2c = CartanData::from_label("A2").unwrap();
        assert_eq!(commutation_normal_form(&a2c, &[0, 1, 0]), vec![0, 1, 0]);
        assert_eq!(
            commutation_normal_form(&a3, &[1, 0, 2, 1, 0, 2]),
            commutation_normal_form(&a3, &[1, 2, 0, 1, 2, 0])
        );
    }

    #[test]
    fn tau_examples() {
        let t = a2().tau_q().unwrap();
        assert_eq!(t.word, Some(vec![1, 0]));
        assert_eq!(t.construction, TauConstruction::SourceProduct);
        let c = &a2().cartan;
        // τ(α₂) = α₁
        assert_eq!(t.apply(1, &c.root_to_weight(&Root(vec![0, 1]))), c.root_to_weight(&Root(vec![1, 0])));
        assert_eq!(a2().gamma(0).unwrap(), Root(vec![1, 1]));
        assert_eq!(a2().gamma(1).unwrap(), Root(vec![0, 1]));

        let t = b2().tau_q().unwrap();
        assert_eq!(t.word, Some(vec![0, 1]));
        assert_eq!(b2().gamma_with(&t, 2).unwrap(), Root(vec![1, 1, 1]));
        assert_eq!(b2().gamma_with(&t, 0).unwrap(), Root(vec![1, 0, 0]));
        assert_eq!(b2().gamma_with(&t, 1).unwrap(), Root(vec![1, 1, 0]));

        let a1 = QDatum::build("A1", &[], &[0]).unwrap();
        assert_eq!(a1.gamma(0).unwrap(), Root(vec![1]));
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(a2().orientation_quiver(), vec![(0, 1)]);
        assert_eq!(b2().orientation_quiver(), vec![(1, 0), (2, 1)]);
        assert!(QDatum::build("A1", &[], &[0]).unwrap().orientation_quiver().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let q = b2();
        let s = q.to_json();
        assert_eq!(QDatum::from_json(&s).unwrap(), q);
        let q2 = QDatum::from_json(r#"{"type":"A3","sigma":[[1,3]],"xi":[1,0,-1]}"#).unwrap();
        assert_eq!(q2, q);
        assert!(QDatum::from_json(r#"{"type":"A","rank":3,"sigma":[[1,3]],"xi":[1,0,1]}"#).is_err());
        assert!(QDatum::from_json(r#"{"type":"A","rank":2,"xi":[0]}"#).is_err());
    }

    #[test]
    fn random_data_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g0 in ["B2", "B3", "C3", "F4", "G2"] {
            let (g, cycles) = folding_for(g0.parse().unwrap()).unwrap();
            let c = CartanData::new(g);
            let s = DiagramAutomorphism::from_cycles(c.rank(), &cycles).unwrap();
            for _ in 0..5 {
                let q = random_datum(&c, &s, &mut rng).unwrap();
                assert!(q.is_valid());
                assert_eq!(q.g0.label.to_string(), g0);
            }
        }
    }
}

//! Cartan data of finite type, root systems and Weyl group words.
//!
//! Indices are 0-based. Weights are stored in the fundamental-weight basis
//! (coordinate `i` is `<h_i, λ>`), roots in the simple-root basis. The Cartan
//! matrix follows `a_ij = <h_i, α_j>` and Kac's numbering of the diagrams.

pub mod twisted;

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeLabel {
    pub family: Family,
    pub rank: usize,
}

impl TypeLabel {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(Error::UnsupportedType(format!("{}{}", family.letter(), rank)))
        }
    }

    pub fn is_simply_laced(self) -> bool {
        matches!(self.family, Family::A | Family::D | Family::E)
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for TypeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| Error::Parse(format!("unknown type {s:?}")))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rank in type {s:?}")))?;
        Self::new(family, rank)
    }
}

/// Element of the weight lattice in the fundamental-weight basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn fundamental(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }
}

/// Element of the root lattice in the simple-root basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn simple(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Nonzero with all coordinates nonnegative.
    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.0.iter().all(|&x| x >= 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|a| k * a).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match c {
                1 => format!("a{}", i + 1),
                -1 => format!("-a{}", i + 1),
                _ => format!("{c}a{}", i + 1),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+").replace("+-", "-"))
        }
    }
}

/// A word in the simple reflections, read as the product `s_{w[0]} s_{w[1]} ...`.
pub type WeylWord = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    pub label: TypeLabel,
    pub matrix: IntMatrix,
    /// Positive integers `s_i` with `s_i a_ij` symmetric.
    pub symmetrizers: Vec<i64>,
}

impl CartanData {
    pub fn new(label: TypeLabel) -> Self {
        let n = label.rank;
        let mut m = IntMatrix::identity(n);
        for i in 0..n {
            m[(i, i)] = 2;
        }
        let mut link = |i: usize, j: usize| {
            m[(i - 1, j - 1)] = -1;
            m[(j - 1, i - 1)] = -1;
        };
        let chain = |len: usize, link: &mut dyn FnMut(usize, usize)| {
            for i in 1..len {
                link(i, i + 1);
            }
        };
        let mut sym = vec![1; n];
        match label.family {
            Family::A => chain(n, &mut link),
            Family::B => {
                chain(n, &mut link);
                m[(n - 1, n - 2)] = -2;
                sym = vec![2; n];
                sym[n - 1] = 1;
            }
            Family::C => {
                chain(n, &mut link);
                m[(n - 2, n - 1)] = -2;
                sym[n - 1] = 2;
            }
            Family::D => {
                chain(n - 1, &mut link);
                link(n - 2, n);
            }
            Family::E => {
                chain(n - 1, &mut link);
                let branch = if n == 6 { 3 } else { n - 3 };
                link(branch, n);
            }
            Family::F => {
                chain(4, &mut link);
                m[(2, 1)] = -2;
                sym = vec![2, 2, 1, 1];
            }
            Family::G => {
                chain(2, &mut link);
                m[(1, 0)] = -3;
                sym = vec![3, 1];
            }
        }
        Self {
            label,
            matrix: m,
            symmetrizers: sym,
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        Ok(Self::new(s.parse()?))
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.matrix[(i, j)]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.matrix[(i, j)] != 0
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.rank()).filter(|&j| self.adjacent(i, j)).collect()
    }

    pub fn is_simply_laced(&self) -> bool {
        self.label.is_simply_laced()
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            })
        }
    }

    /// `α_i` in the fundamental-weight basis: coordinate `j` is `a_ji`.
    pub fn simple_root_weight(&self, i: usize) -> Weight {
        Weight((0..self.rank()).map(|j| self.a(j, i)).collect())
    }

    pub fn root_to_weight(&self, r: &Root) -> Weight {
        Weight(self.matrix.mul_vec(&r.0))
    }

    /// Root-basis coordinates of a weight lying in the root lattice.
    pub fn weight_to_root(&self, w: &Weight) -> Option<Root> {
        let x = linalg::solve(&self.matrix, &w.0)?;
        x.iter().map(linalg::to_integer).collect::<Option<Vec<_>>>().map(Root)
    }

    /// `s_i λ = λ − <h_i, λ> α_i`.
    pub fn reflect(&self, i: usize, w: &Weight) -> Result<Weight> {
        self.check(i)?;
        let c = w.0[i];
        Ok(Weight(
            (0..self.rank()).map(|j| w.0[j] - c * self.a(j, i)).collect(),
        ))
    }

    pub fn reflect_root(&self, i: usize, r: &Root) -> Result<Root> {
        self.check(i)?;
        let c: i64 = (0..self.rank()).map(|j| self.a(i, j) * r.0[j]).sum();
        let mut out = r.clone();
        out.0[i] -= c;
        Ok(out)
    }

    /// `(λ, β)` for a weight and a root, normalized by `(Λ_i, α_j) = δ_ij s_j`.
    pub fn pairing(&self, w: &Weight, r: &Root) -> i64 {
        w.0.iter()
            .zip(&r.0)
            .zip(&self.symmetrizers)
            .map(|((a, b), s)| a * b * s)
            .sum()
    }

    /// `(β, γ)` on the root lattice.
    pub fn root_form(&self, b: &Root, c: &Root) -> i64 {
        self.pairing(&self.root_to_weight(b), c)
    }

    /// Matrix of `s_i` acting on weight coordinates.
    pub fn reflection_weight_matrix(&self, i: usize) -> IntMatrix {
        let n = self.rank();
        IntMatrix::from_fn(n, n, |r, c| {
            let id = i64::from(r == c);
            if c == i {
                id - self.a(r, i)
            } else {
                id
            }
        })
    }

    /// Matrix of `s_i` acting on root coordinates.
    pub fn reflection_root_matrix(&self, i: usize) -> IntMatrix {
        let n = self.rank();
        IntMatrix::from_fn(n, n, |r, c| {
            let id = i64::from(r == c);
            if r == i {
                id - self.a(i, c)
            } else {
                id
            }
        })
    }

    /// Matrix of `s_{w[0]} ... s_{w[k-1]}` on weight coordinates.
    pub fn word_weight_matrix(&self, w: &[usize]) -> Result<IntMatrix> {
        let mut m = IntMatrix::identity(self.rank());
        for &i in w {
            self.check(i)?;
            m = &m * &self.reflection_weight_matrix(i);
        }
        Ok(m)
    }

    pub fn word_root_matrix(&self, w: &[usize]) -> Result<IntMatrix> {
        let mut m = IntMatrix::identity(self.rank());
        for &i in w {
            self.check(i)?;
            m = &m * &self.reflection_root_matrix(i);
        }
        Ok(m)
    }

    /// All positive roots, ordered by height and then lexicographically.
    pub fn positive_roots(&self) -> Vec<Root> {
        let n = self.rank();
        let mut seen: HashSet<Root> = HashSet::new();
        let mut queue: VecDeque<Root> = VecDeque::new();
        for i in 0..n {
            let r = Root::simple(n, i);
            seen.insert(r.clone());
            queue.push_back(r);
        }
        while let Some(r) = queue.pop_front() {
            for i in 0..n {
                let s = self.reflect_root(i, &r).expect("index in range");
                if s.is_positive() && seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        let mut out: Vec<Root> = seen.into_iter().collect();
        out.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| b.0.cmp(&a.0)));
        out
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots().len()
    }

    /// The roots `β_k = s_{w[0]} ... s_{w[k-2]}(α_{w[k-1]})`.
    pub fn word_roots(&self, w: &[usize]) -> Result<Vec<Root>> {
        let n = self.rank();
        let mut m = IntMatrix::identity(n);
        let mut out = Vec::with_capacity(w.len());
        for &i in w {
            self.check(i)?;
            out.push(Root((0..n).map(|r| m[(r, i)]).collect()));
            m = &m * &self.reflection_root_matrix(i);
        }
        Ok(out)
    }

    /// True iff `w` is a reduced word of the longest element.
    pub fn is_reduced_word_of_w0(&self, w: &[usize]) -> bool {
        if w.len() != self.num_positive_roots() {
            return false;
        }
        let Ok(betas) = self.word_roots(w) else {
            return false;
        };
        let distinct: BTreeSet<&Root> = betas.iter().collect();
        distinct.len() == betas.len() && betas.iter().all(Root::is_positive)
    }

    /// A reduced word of `w0`: starting from `ρ`, repeatedly apply the
    /// smallest `s_i` with `<h_i, λ> > 0` until `λ = −ρ`.
    pub fn greedy_w0_word(&self) -> WeylWord {
        let n = self.rank();
        let mut lambda = Weight(vec![1; n]);
        let mut word = Vec::new();
        while let Some(i) = (0..n).find(|&i| lambda.0[i] > 0) {
            lambda = self.reflect(i, &lambda).expect("index in range");
            word.push(i);
        }
        debug_assert!(self.is_reduced_word_of_w0(&word));
        word
    }

    /// The involution `i ↦ i*` with `w0(α_i) = −α_{i*}`.
    pub fn w0_star(&self) -> Vec<usize> {
        let n = self.rank();
        let w0 = self
            .word_root_matrix(&self.greedy_w0_word())
            .expect("indices in range");
        (0..n)
            .map(|i| {
                (0..n)
                    .find(|&j| (0..n).all(|r| w0[(r, i)] == -i64::from(r == j)))
                    .expect("w0 maps simple roots to negative simple roots")
            })
            .collect()
    }
}

/// Dual Coxeter number of a finite type.
pub fn dual_coxeter(label: TypeLabel) -> i64 {
    let n = label.rank as i64;
    match label.family {
        Family::A => n + 1,
        Family::B => 2 * n - 1,
        Family::C => n + 1,
        Family::D => 2 * n - 2,
        Family::E => match n {
            6 => 12,
            7 => 18,
            _ => 30,
        },
        Family::F => 9,
        Family::G => 4,
    }
}

/// Convexity of an enumeration of roots: whenever `β_k + β_l = β_m` with
/// `k < l`, then `k < m < l`.
pub fn is_convex(betas: &[Root]) -> bool {
    let index: std::collections::HashMap<&Root, usize> =
        betas.iter().enumerate().map(|(i, b)| (b, i)).collect();
    for k in 0..betas.len() {
        for l in k + 1..betas.len() {
            if let Some(&m) = index.get(&betas[k].add(&betas[l])) {
                if !(k < m && m < l) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cartan(s: &str) -> CartanData {
        CartanData::from_label(s).unwrap()
    }

    #[test]
    fn reflect_fundamental_weight() {
        let a2 = cartan("A2");
        assert_eq!(a2.reflect(0, &Weight(vec![1, 0])).unwrap(), Weight(vec![-1, 1]));
        assert_eq!(a2.reflect(0, &Weight(vec![0, 1])).unwrap(), Weight(vec![0, 1]));
        assert!(a2.reflect(2, &Weight(vec![0, 1])).is_err());
    }

    #[test]
    fn reflect_root_a3() {
        let a3 = cartan("A3");
        assert_eq!(a3.reflect_root(1, &Root(vec![0, 1, 1])).unwrap(), Root(vec![0, 0, 1]));
    }

    #[test]
    fn positive_root_counts() {
        for (t, l) in [("A1", 1), ("A2", 3), ("A3", 6), ("A5", 15), ("D4", 12), ("D5", 20)] {
            assert_eq!(cartan(t).num_positive_roots(), l, "{t}");
        }
        for (t, l) in [("E6", 36), ("E7", 63), ("E8", 120), ("B3", 9), ("C3", 9), ("F4", 24), ("G2", 6)] {
            assert_eq!(cartan(t).num_positive_roots(), l, "{t}");
        }
    }

    #[test]
    fn reduced_words() {
        let a2 = cartan("A2");
        assert!(a2.is_reduced_word_of_w0(&[1, 0, 1]));
        assert!(!a2.is_reduced_word_of_w0(&[0, 0, 1]));
        assert!(!a2.is_reduced_word_of_w0(&[0, 1]));
        assert!(!a2.is_reduced_word_of_w0(&[0, 5, 1]));
        assert!(cartan("A3").is_reduced_word_of_w0(&[0, 1, 2, 1, 0, 1]));
    }

    #[test]
    fn w0_star_tables() {
        assert_eq!(cartan("A2").w0_star(), vec![1, 0]);
        assert_eq!(cartan("A3").w0_star(), vec![2, 1, 0]);
        assert_eq!(cartan("D4").w0_star(), vec![0, 1, 2, 3]);
        assert_eq!(cartan("D5").w0_star(), vec![0, 1, 2, 4, 3]);
        assert_eq!(cartan("E6").w0_star(), vec![4, 3, 2, 1, 0, 5]);
        assert_eq!(cartan("E7").w0_star(), (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn greedy_words_are_reduced_and_convex() {
        for t in ["A1", "A4", "D4", "D6", "E6", "E7", "B3", "C4", "F4", "G2"] {
            let c = cartan(t);
            let w = c.greedy_w0_word();
            assert!(c.is_reduced_word_of_w0(&w), "{t}");
            assert!(is_convex(&c.word_roots(&w).unwrap()), "{t}");
        }
    }

    #[test]
    fn symmetrizers_symmetrize() {
        for t in ["A3", "B3", "C3", "D5", "E6", "F4", "G2"] {
            let c = cartan(t);
            let n = c.rank();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(c.symmetrizers[i] * c.a(i, j), c.symmetrizers[j] * c.a(j, i), "{t}");
                }
            }
        }
    }

    #[test]
    fn weight_root_duality() {
        let d4 = cartan("D4");
        for i in 0..4 {
            for j in 0..4 {
                let v = d4.pairing(&Weight::fundamental(4, i), &Root::simple(4, j));
                assert_eq!(v, i64::from(i == j));
            }
        }
        let r = Root(vec![1, 2, 1, 1]);
        assert_eq!(d4.weight_to_root(&d4.root_to_weight(&r)), Some(r));
        assert_eq!(d4.weight_to_root(&Weight(vec![1, 0, 0, 0])), None);
    }

    #[test]
    fn dual_coxeter_table() {
        assert_eq!(dual_coxeter("A2".parse().unwrap()), 3);
        assert_eq!(dual_coxeter("B2".parse().unwrap()), 3);
        assert_eq!(dual_coxeter("G2".parse().unwrap()), 4);
        assert_eq!(dual_coxeter("F4".parse().unwrap()), 9);
    }

    #[test]
    fn parse_labels() {
        assert!("A0".parse::<TypeLabel>().is_err());
        assert!("E9".parse::<TypeLabel>().is_err());
        assert!("X3".parse::<TypeLabel>().is_err());
        assert_eq!("d5".parse::<TypeLabel>().unwrap().to_string(), "D5");
    }
}

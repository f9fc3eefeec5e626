//! Twisted affine types: the loop pair (𝗀, τ), the affine Cartan matrix, and
//! the integers `d_i` (smallest `d > 0` with `α_i + dδ` a real root).
//!
//! Affine nodes follow Kac's numbering, except for `A_{2n}^{(2)}` whose
//! numbering is reversed (`i ↦ n − i`). Index 0 is the affine node, so the
//! classical node `i` (1-based) sits at matrix index `i`.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CartanData, Family, TypeLabel};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TwistedKind {
    /// `A_{2n−1}^{(2)}`, n ≥ 3.
    OddA,
    /// `A_{2n}^{(2)}`, n ≥ 1.
    EvenA,
    /// `D_{n+1}^{(2)}`, n ≥ 3.
    D,
    /// `E_6^{(2)}`.
    E6,
    /// `D_4^{(3)}`.
    D4,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedType {
    pub kind: TwistedKind,
    /// Rank of the classical part `I_0`.
    pub n: usize,
    pub g: CartanData,
    pub tau: Vec<usize>,
    pub r: u32,
    /// Orbit representative in `J` of each classical node.
    pub reps: Vec<usize>,
    /// Affine Cartan matrix, index 0 the affine node.
    pub affine: IntMatrix,
}

impl TwistedType {
    pub fn new(kind: TwistedKind, n: usize) -> Result<Self> {
        let bad = || Error::UnsupportedType(format!("{kind:?} with classical rank {n}"));
        let (g_label, r, reps): (TypeLabel, u32, Vec<usize>) = match kind {
            TwistedKind::OddA if n >= 3 => (TypeLabel::new(Family::A, 2 * n - 1)?, 2, (0..n).collect()),
            TwistedKind::EvenA if n >= 1 => (TypeLabel::new(Family::A, 2 * n)?, 2, (0..n).collect()),
            TwistedKind::D if n >= 3 => (TypeLabel::new(Family::D, n + 1)?, 2, (0..n).collect()),
            TwistedKind::E6 if n == 4 => (TypeLabel::new(Family::E, 6)?, 2, vec![0, 1, 2, 5]),
            TwistedKind::D4 if n == 2 => (TypeLabel::new(Family::D, 4)?, 3, vec![0, 1]),
            _ => return Err(bad()),
        };
        let g = CartanData::new(g_label);
        let m = g_label.rank;
        let tau: Vec<usize> = match kind {
            TwistedKind::OddA | TwistedKind::EvenA => (0..m).map(|i| m - 1 - i).collect(),
            TwistedKind::D => {
                let mut t: Vec<usize> = (0..m).collect();
                t.swap(m - 2, m - 1);
                t
            }
            TwistedKind::E6 => vec![4, 3, 2, 1, 0, 5],
            TwistedKind::D4 => vec![2, 1, 3, 0],
        };
        Ok(Self {
            kind,
            n,
            g,
            tau,
            r,
            reps,
            affine: affine_matrix(kind, n),
        })
    }

    /// `d_i` for each classical node, from the built-in table.
    pub fn d_table(&self) -> Vec<u32> {
        let n = self.n;
        match self.kind {
            TwistedKind::OddA => (0..n).map(|i| if i == n - 1 { 2 } else { 1 }).collect(),
            TwistedKind::D => (0..n).map(|i| if i == n - 1 { 1 } else { 2 }).collect(),
            TwistedKind::E6 => vec![1, 1, 2, 2],
            TwistedKind::D4 => vec![1, 3],
            TwistedKind::EvenA => vec![1; n],
        }
    }

    /// `d_i` by a bounded search over positive real roots of the affine
    /// root system (heights up to `1 + 4 ht(δ)`).
    pub fn d_search(&self) -> Result<Vec<u32>> {
        let delta = self.delta();
        let ht: i64 = delta.iter().sum();
        let roots = real_positive_roots(&self.affine, 1 + 4 * ht);
        (1..=self.n)
            .map(|i| {
                (1..=4u32)
                    .find(|&d| {
                        let mut v: Vec<i64> = delta.iter().map(|x| x * i64::from(d)).collect();
                        v[i] += 1;
                        roots.contains(&v)
                    })
                    .ok_or_else(|| Error::Invariant(format!("no d_{} found for {self}", i)))
            })
            .collect()
    }

    /// The null root `δ` in the simple-root basis of the affine algebra.
    pub fn delta(&self) -> Vec<i64> {
        let k = linalg::integer_kernel(&self.affine);
        assert_eq!(k.len(), 1, "affine Cartan matrix has corank one");
        let v = k[0].clone();
        if v.iter().all(|&x| x <= 0) {
            v.iter().map(|x| -x).collect()
        } else {
            v
        }
    }

    /// Cartan matrix of the classical part `I_0`.
    pub fn classical_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.n, self.n, |i, j| self.affine[(i + 1, j + 1)])
    }

    /// For `j ∈ J`, the classical node `i` and power `p` with `j = τ^p(reps[i])`.
    pub fn orbit_position(&self, j: usize) -> (usize, u32) {
        for (i, &rep) in self.reps.iter().enumerate() {
            let mut cur = rep;
            for p in 0..self.r {
                if cur == j {
                    return (i, p);
                }
                cur = self.tau[cur];
            }
        }
        unreachable!("every vertex lies in the orbit of a representative")
    }
}

impl fmt::Display for TwistedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^({})", self.g.label, self.r)
    }
}

impl FromStr for TwistedType {
    type Err = Error;

    /// Accepts labels such as `A5^(2)`, `A4(2)`, `D5^(2)`, `E6^(2)`, `D4^(3)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace(['^', ' '], "");
        let err = || Error::Parse(format!("unknown twisted type {s:?}"));
        let open = t.find('(').ok_or_else(err)?;
        let r: u32 = t[open..]
            .trim_start_matches('(')
            .trim_end_matches(')')
            .parse()
            .map_err(|_| err())?;
        let g: TypeLabel = t[..open].parse()?;
        let m = g.rank;
        match (g.family, r) {
            (Family::A, 2) if m % 2 == 1 => Self::new(TwistedKind::OddA, m.div_ceil(2)),
            (Family::A, 2) => Self::new(TwistedKind::EvenA, m / 2),
            (Family::D, 2) => Self::new(TwistedKind::D, m - 1),
            (Family::E, 2) if m == 6 => Self::new(TwistedKind::E6, 4),
            (Family::D, 3) if m == 4 => Self::new(TwistedKind::D4, 2),
            _ => Err(err()),
        }
    }
}

fn affine_matrix(kind: TwistedKind, n: usize) -> IntMatrix {
    let size = n + 1;
    let mut m = IntMatrix::identity(size);
    for i in 0..size {
        m[(i, i)] = 2;
    }
    let mut set = |i: usize, j: usize, aij: i64, aji: i64| {
        m[(i, j)] = aij;
        m[(j, i)] = aji;
    };
    match kind {
        TwistedKind::OddA => {
            set(0, 2, -1, -1);
            for i in 1..n - 1 {
                set(i, i + 1, -1, -1);
            }
            set(n - 1, n, -2, -1);
        }
        TwistedKind::D => {
            set(0, 1, -2, -1);
            for i in 1..n - 1 {
                set(i, i + 1, -1, -1);
            }
            set(n - 1, n, -1, -2);
        }
        TwistedKind::E6 => {
            set(0, 1, -1, -1);
            set(1, 2, -1, -1);
            set(2, 3, -2, -1);
            set(3, 4, -1, -1);
        }
        TwistedKind::D4 => {
            set(0, 1, -1, -1);
            set(1, 2, -3, -1);
        }
        TwistedKind::EvenA => {
            if n == 1 {
                set(0, 1, -4, -1);
            } else {
                set(0, 1, -2, -1);
                for i in 1..n - 1 {
                    set(i, i + 1, -1, -1);
                }
                set(n - 1, n, -2, -1);
            }
            // reverse the numbering
            return IntMatrix::from_fn(size, size, |i, j| m[(n - i, n - j)]);
        }
    }
    m
}

/// Positive real roots of height at most `max_height`, by upward reflection
/// from the simple roots.
pub fn real_positive_roots(a: &IntMatrix, max_height: i64) -> HashSet<Vec<i64>> {
    let size = a.rows();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue = VecDeque::new();
    for i in 0..size {
        let mut v = vec![0; size];
        v[i] = 1;
        seen.insert(v.clone());
        queue.push_back(v);
    }
    while let Some(b) = queue.pop_front() {
        for i in 0..size {
            let c: i64 = (0..size).map(|j| a[(i, j)] * b[j]).sum();
            if c < 0 {
                let mut s = b.clone();
                s[i] -= c;
                if s.iter().sum::<i64>() <= max_height && seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
    }
    seen
}

/// All supported twisted types with classical rank at most `max_rank`.
pub fn catalogue(max_rank: usize) -> Vec<TwistedType> {
    let mut out = Vec::new();
    for n in 1..=max_rank {
        out.push(TwistedType::new(TwistedKind::EvenA, n).expect("valid"));
        if n >= 3 {
            out.push(TwistedType::new(TwistedKind::OddA, n).expect("valid"));
            out.push(TwistedType::new(TwistedKind::D, n).expect("valid"));
        }
    }
    if max_rank >= 4 {
        out.push(TwistedType::new(TwistedKind::E6, 4).expect("valid"));
    }
    if max_rank >= 2 {
        out.push(TwistedType::new(TwistedKind::D4, 2).expect("valid"));
    }
    out
}

/// Tabulated and searched `d_i` for one type.
pub type DPair = (Vec<u32>, Vec<u32>);

/// Per-type comparison of the `d_i` table with the root search.
pub fn d_cross_check(max_rank: usize) -> Result<BTreeMap<String, DPair>> {
    catalogue(max_rank)
        .into_iter()
        .map(|t| Ok((t.to_string(), (t.d_table(), t.d_search()?))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_twisted_labels() {
        assert_eq!("A5^(2)".parse::<TwistedType>().unwrap().kind, TwistedKind::OddA);
        assert_eq!("A4(2)".parse::<TwistedType>().unwrap().n, 2);
        assert_eq!("D5^(2)".parse::<TwistedType>().unwrap().n, 4);
        assert_eq!("D4^(3)".parse::<TwistedType>().unwrap().r, 3);
        assert!("E7^(2)".parse::<TwistedType>().is_err());
        assert!("A5".parse::<TwistedType>().is_err());
    }

    #[test]
    fn null_roots() {
        let labels = |s: &str| s.parse::<TwistedType>().unwrap().delta();
        assert_eq!(labels("A2^(2)"), vec![1, 2]);
        assert_eq!(labels("E6^(2)"), vec![1, 2, 3, 2, 1]);
        assert_eq!(labels("D4^(3)"), vec![1, 2, 1]);
        assert_eq!(labels("D5^(2)"), vec![1, 1, 1, 1, 1]);
        assert_eq!(labels("A7^(2)"), vec![1, 1, 2, 2, 1]);
    }

    #[test]
    fn tau_is_an_automorphism() {
        for t in catalogue(5) {
            let n = t.g.rank();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(t.g.a(i, j), t.g.a(t.tau[i], t.tau[j]), "{t}");
                }
            }
            let mut p: Vec<usize> = (0..n).collect();
            for _ in 0..t.r {
                p = p.iter().map(|&i| t.tau[i]).collect();
            }
            assert_eq!(p, (0..n).collect::<Vec<_>>(), "{t}");
        }
    }

    #[test]
    fn d_table_matches_search() {
        for (label, (table, search)) in d_cross_check(6).unwrap() {
            assert_eq!(table, search, "{label}");
        }
    }
}

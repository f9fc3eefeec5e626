//! Exact linear algebra over the rationals.
//!
//! Two tools live here: a dense reduced row echelon form for the small
//! matrices (Cartan matrices, Weyl group elements), and a sparse LU
//! factorization used to decompose l-weights over the banded l-root matrix.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::matrix::IntMatrix;

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Returns the integer value of `q` if it is integral and fits in `i64`.
pub fn to_integer(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

/// Reduced row echelon form; returns the reduced matrix and its pivot columns.
pub fn rref(mut m: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

fn to_rational_rows(m: &IntMatrix) -> Vec<Vec<Rational>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&x| rat(x)).collect())
        .collect()
}

pub fn rank(m: &IntMatrix) -> usize {
    rref(to_rational_rows(m)).1.len()
}

/// Basis of the right kernel of `m`, each vector scaled to a primitive
/// integer vector.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<i64>> {
    let cols = m.cols();
    let (red, pivots) = rref(to_rational_rows(m));
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -red[r][f].clone();
            }
            primitive(&v)
        })
        .collect()
}

fn primitive(v: &[Rational]) -> Vec<i64> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| num::integer::lcm(acc, x.denom().clone()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| num::integer::gcd(acc, x.clone()));
    ints.iter()
        .map(|x| {
            if g.is_zero() {
                0
            } else {
                (x / &g).to_i64().expect("kernel entry overflow")
            }
        })
        .collect()
}

/// Inverse of a square integer matrix over the rationals.
pub fn inverse(m: &IntMatrix) -> Option<Vec<Vec<Rational>>> {
    let n = m.rows();
    if n != m.cols() {
        return None;
    }
    let aug: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = m.row(i).iter().map(|&x| rat(x)).collect();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let (red, pivots) = rref(aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Inverse of an integer matrix when it is again integral (unimodular case).
pub fn integer_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let inv = inverse(m)?;
    let n = m.rows();
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = to_integer(&inv[i][j])?;
        }
    }
    Some(out)
}

/// Solves `m x = b` for a square or tall integer matrix with independent
/// columns. Returns `None` when the system is inconsistent.
pub fn solve(m: &IntMatrix, b: &[i64]) -> Option<Vec<Rational>> {
    let rows: Vec<BTreeMap<usize, i64>> = (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| (j, x))
                .collect()
        })
        .collect();
    let lu = SparseLu::new(rows, m.cols(), None);
    let rhs: BTreeMap<usize, i64> = b
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| (i, x))
        .collect();
    lu.solve(&rhs)
}

/// Sparse LU factorization of an integer matrix with exact rational
/// arithmetic. Columns are eliminated in a caller-chosen order; the pivot for
/// each column is the first not-yet-used row (in row index order) with a
/// nonzero entry.
#[derive(Clone, Debug)]
pub struct SparseLu {
    ncols: usize,
    original: Vec<BTreeMap<usize, i64>>,
    /// (column, pivot row) in elimination order.
    pivots: Vec<(usize, usize)>,
    reduced: Vec<BTreeMap<usize, Rational>>,
    /// Row operations `row[target] -= factor * row[source]`, in order.
    ops: Vec<(usize, usize, Rational)>,
}

impl SparseLu {
    pub fn new(rows: Vec<BTreeMap<usize, i64>>, ncols: usize, col_order: Option<&[usize]>) -> Self {
        let order: Vec<usize> = match col_order {
            Some(o) => o.to_vec(),
            None => (0..ncols).collect(),
        };
        let mut reduced: Vec<BTreeMap<usize, Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|(&c, &v)| (c, rat(v))).collect())
            .collect();
        // column -> rows holding a nonzero there
        let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); ncols];
        for (i, r) in reduced.iter().enumerate() {
            for &c in r.keys() {
                col_rows[c].insert(i);
            }
        }
        let mut used = vec![false; reduced.len()];
        let mut pivots = Vec::new();
        let mut ops = Vec::new();
        for &c in &order {
            let Some(&p) = col_rows[c].iter().find(|&&r| !used[r]) else {
                continue;
            };
            used[p] = true;
            pivots.push((c, p));
            let pivot_row = reduced[p].clone();
            let pivot_val = pivot_row[&c].clone();
            let targets: Vec<usize> = col_rows[c].iter().copied().filter(|&r| !used[r]).collect();
            for t in targets {
                let f = &reduced[t][&c] / &pivot_val;
                for (&j, v) in &pivot_row {
                    let entry = reduced[t].entry(j).or_insert_with(Rational::zero);
                    *entry -= &f * v;
                    if entry.is_zero() {
                        reduced[t].remove(&j);
                        col_rows[j].remove(&t);
                    } else {
                        col_rows[j].insert(t);
                    }
                }
                ops.push((t, p, f));
            }
        }
        Self {
            ncols,
            original: rows,
            pivots,
            reduced,
            ops,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Exact solution of `M x = b` (free columns set to zero), verified
    /// against the original matrix. `None` if the system is inconsistent.
    pub fn solve(&self, b: &BTreeMap<usize, i64>) -> Option<Vec<Rational>> {
        let mut rhs: BTreeMap<usize, Rational> = b.iter().map(|(&i, &v)| (i, rat(v))).collect();
        for (t, s, f) in &self.ops {
            if let Some(src) = rhs.get(s).cloned() {
                let e = rhs.entry(*t).or_insert_with(Rational::zero);
                *e -= f * src;
            }
        }
        let mut x = vec![Rational::zero(); self.ncols];
        for &(c, p) in self.pivots.iter().rev() {
            let row = &self.reduced[p];
            let mut acc = rhs.get(&p).cloned().unwrap_or_else(Rational::zero);
            for (&j, v) in row {
                if j != c && !x[j].is_zero() {
                    acc -= v * &x[j];
                }
            }
            x[c] = acc / &row[&c];
        }
        // verify M x = b on every row, including non-pivot ones
        for (i, row) in self.original.iter().enumerate() {
            let mut acc = Rational::zero();
            for (&j, &v) in row {
                if !x[j].is_zero() {
                    acc += &x[j] * rat(v);
                }
            }
            let want = b.get(&i).copied().unwrap_or(0);
            if acc != rat(want) {
                return None;
            }
        }
        // b may have entries on rows that do not exist
        if b.keys().any(|&i| i >= self.original.len()) {
            return None;
        }
        Some(x)
    }
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_affine_a1() {
        let m = IntMatrix::from_rows(&[vec![2, -2], vec![-2, 2]]);
        assert_eq!(integer_kernel(&m), vec![vec![1, 1]]);
    }

    #[test]
    fn inverse_of_a2_cartan() {
        let m = IntMatrix::from_rows(&[vec![2, -1], vec![-1, 2]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv[0][0], BigRational::new(2.into(), 3.into()));
        assert_eq!(inv[0][1], BigRational::new(1.into(), 3.into()));
        assert!(integer_inverse(&m).is_none());
    }

    #[test]
    fn sparse_lu_detects_inconsistency() {
        // columns (1,1,0) and (0,1,1)
        let m = IntMatrix::from_rows(&[vec![1, 0], vec![1, 1], vec![0, 1]]);
        assert_eq!(solve(&m, &[1, 3, 2]).unwrap(), vec![rat(1), rat(2)]);
        assert!(solve(&m, &[1, 0, 0]).is_none());
    }

    #[test]
    fn sparse_lu_rational_solution() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]);
        let x = solve(&m, &[1, 0]).unwrap();
        assert_eq!(x[0], BigRational::new(2.into(), 3.into()));
        assert_eq!(x[1], BigRational::new((-1).into(), 3.into()));
    }
}

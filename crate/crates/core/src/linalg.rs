//! Exact linear algebra over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::mesh::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DumpError {
    #[error("missing or malformed header line")]
    Header,
    #[error("line {line}: expected {expected} entries, found {found}")]
    RowLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bad entry {text:?}")]
    Entry { line: usize, text: String },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows of equal length. `cols` fixes the width
    /// when there are no rows.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r);
        }
        RationalMatrix {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Text dump: a "rows cols" header, then one line per row of "p/q" entries.
    pub fn to_dump(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self
                .row(r)
                .iter()
                .map(|v| format!("{}/{}", v.numer(), v.denom()))
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_dump(text: &str) -> Result<Self, DumpError> {
        let mut lines = text.lines();
        let header: Vec<usize> = lines
            .next()
            .ok_or(DumpError::Header)?
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| DumpError::Header)?;
        let [rows, cols] = header[..] else {
            return Err(DumpError::Header);
        };
        let mut out = Vec::with_capacity(rows);
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() && cols > 0 {
                continue;
            }
            let entries: Vec<Rational> = line
                .split_whitespace()
                .map(|t| {
                    parse_rational(t).ok_or_else(|| DumpError::Entry {
                        line: k + 2,
                        text: t.to_string(),
                    })
                })
                .collect::<Result<_, _>>()?;
            if entries.len() != cols {
                return Err(DumpError::RowLength {
                    line: k + 2,
                    expected: cols,
                    found: entries.len(),
                });
            }
            out.push(entries);
        }
        if out.len() != rows {
            return Err(DumpError::RowCount {
                expected: rows,
                found: out.len(),
            });
        }
        Ok(Self::from_rows(out, cols))
    }

    /// Rows scaled to integers by their common denominator.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
            })
            .collect()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", line.join(", "))?;
        }
        Ok(())
    }
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut a = m.integer_rows();
    let (rows, cols) = (m.rows, m.cols);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let mut v = pivot * &row[j];
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    v -= &lead * &pivot_row[j];
                }
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = top[r][c].clone();
        r += 1;
    }
    r
}

pub fn nullity(m: &RationalMatrix) -> usize {
    m.cols - rank(m)
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..a.cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..a.cols {
                if a.get(r, j).is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &f * a.get(r, j);
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the right kernel, one vector per non-pivot column.
pub fn null_space_basis(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    let (e, pivots) = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); m.cols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -e.get(r, free).clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// Rank by largest nonvanishing minor, for cross-checking.
    fn rank_by_minors(m: &RationalMatrix) -> usize {
        fn det(m: &[Vec<Rational>]) -> Rational {
            if m.is_empty() {
                return Rational::one();
            }
            let mut acc = Rational::zero();
            for (j, v) in m[0].iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let t = v * det(&minor);
                if j % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let sub: Vec<Vec<Rational>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| m.get(r, c).clone()).collect())
                        .collect();
                    if !det(&sub).is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank(&RationalMatrix::zeros(4, 7)), 0);
        assert_eq!(nullity(&RationalMatrix::zeros(4, 7)), 7);
        assert_eq!(nullity(&RationalMatrix::zeros(0, 0)), 0);
    }

    #[test]
    fn unit_upper_triangular_is_full_rank() {
        let mut m = RationalMatrix::identity(5);
        for (k, (i, j)) in [(0, 1), (0, 4), (1, 3), (2, 3), (3, 4)]
            .into_iter()
            .enumerate()
        {
            m.set(i, j, q(k as i64 * 7 - 11, k as i64 + 2));
        }
        assert_eq!(rank(&m), 5);
        assert!(null_space_basis(&m).is_empty());
    }

    #[test]
    fn identity_has_empty_kernel() {
        assert!(null_space_basis(&RationalMatrix::identity(3)).is_empty());
    }

    #[test]
    fn kernel_of_difference_row() {
        let m = RationalMatrix::from_i64(&[vec![1, -1]]);
        let k = null_space_basis(&m);
        assert_eq!(k, vec![vec![q(1, 1), q(1, 1)]]);
    }

    #[test]
    fn rational_entries_and_sign_changes() {
        let m = RationalMatrix::from_rows(
            vec![
                vec![q(0, 1), q(-1, 2), q(1, 3)],
                vec![q(-2, 3), q(1, 1), q(0, 1)],
                vec![q(-2, 3), q(1, 2), q(1, 3)],
            ],
            3,
        );
        assert_eq!(rank(&m), 2);
        for v in null_space_basis(&m) {
            assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn agrees_with_minor_expansion_on_small_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let r = rng.gen_range(1..=5);
            let c = rng.gen_range(1..=5);
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let m = RationalMatrix::from_i64(&rows);
            let k = rank(&m);
            assert_eq!(k, rank_by_minors(&m), "{m}");
            assert_eq!(k, rank(&m.transpose()));
            assert_eq!(rref(&m).1.len(), k);
            let basis = null_space_basis(&m);
            assert_eq!(basis.len(), c - k);
            for v in basis {
                assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn dump_round_trip() {
        let m = RationalMatrix::from_rows(vec![vec![q(1, 2), q(-3, 1)], vec![q(0, 1), q(4, 6)]], 2);
        let text = m.to_dump();
        assert_eq!(text, "2 2\n1/2 -3/1\n0/1 2/3\n");
        assert_eq!(RationalMatrix::from_dump(&text).unwrap(), m);
        assert_eq!(
            RationalMatrix::from_dump("0 0\n").unwrap(),
            RationalMatrix::zeros(0, 0)
        );
        assert!(matches!(
            RationalMatrix::from_dump("1 2\n1/2\n"),
            Err(DumpError::RowLength { .. })
        ));
        assert!(matches!(
            RationalMatrix::from_dump("x\n"),
            Err(DumpError::Header)
        ));
    }
}

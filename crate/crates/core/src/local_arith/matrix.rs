//! Dense matrices over `Rat` with exact Gaussian elimination.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::Rat;
use crate::error::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rat]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch("matrix must be nonempty".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_columns(cols: &[Vec<Rat>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch("matrix must be nonempty".into()));
        }
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    /// Convenience constructor from small integers, row-major.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rat::from_int(v)).collect()).collect())
            .expect("well-formed literal matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rat> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<Rat>> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(&cols).expect("nonempty selection")
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_rows(idx.iter().map(|&i| self.row(i)).collect()).expect("nonempty selection")
    }

    pub fn hstack(&self, other: &RatMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let mut cols = self.columns();
        cols.extend(other.columns());
        Self::from_columns(&cols)
    }

    pub fn scale(&self, s: &Rat) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn checked_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += &prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect())
    }

    /// Row echelon form with pivot columns; used by rank/solve/det.
    fn echelon(&self) -> (RatMatrix, Vec<usize>, bool) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut swaps_odd = false;
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if pr != r {
                m.swap_rows(pr, r);
                swaps_odd = !swaps_odd;
            }
            let piv = m[(r, c)].clone();
            for i in r + 1..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..m.cols {
                    let d = &f * &m[(r, j)];
                    m[(i, j)] -= &d;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, swaps_odd)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> Result<Rat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let (m, pivots, odd) = self.echelon();
        if pivots.len() < self.rows {
            return Ok(Rat::zero());
        }
        let mut d = Rat::one();
        for i in 0..self.rows {
            d = d * &m[(i, i)];
        }
        Ok(if odd { -d } else { d })
    }

    /// Solve `self * X = rhs` exactly. Requires `self` to have full column
    /// rank; returns `None` when some column of `rhs` is outside the span.
    pub fn solve(&self, rhs: &RatMatrix) -> Result<Option<RatMatrix>> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch("solve: row counts differ".into()));
        }
        let aug = self.hstack(rhs)?;
        let (e, pivots, _) = aug.echelon();
        let k = self.cols;
        if pivots.iter().filter(|&&c| c < k).count() < k {
            return Err(Error::RankDeficient);
        }
        if pivots.iter().any(|&c| c >= k) {
            return Ok(None);
        }
        // back substitution on the top k rows
        let mut x = RatMatrix::zeros(k, rhs.cols);
        for r in (0..k).rev() {
            let piv = e[(r, r)].clone();
            for j in 0..rhs.cols {
                let mut acc = e[(r, k + j)].clone();
                for c in r + 1..k {
                    let t = &e[(r, c)] * &x[(c, j)];
                    acc -= &t;
                }
                x[(r, j)] = acc / &piv;
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        match self.solve(&RatMatrix::identity(self.rows)) {
            Ok(Some(x)) => Ok(x),
            Ok(None) | Err(Error::RankDeficient) => Err(Error::Singular),
            Err(e) => Err(e),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Row-major array of rational strings.
impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Rat>>::deserialize(d)?;
        RatMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let a = RatMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.det().unwrap(), Rat::one());
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RatMatrix::identity(2));
        let s = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.det().unwrap(), Rat::zero());
        assert_eq!(s.inverse(), Err(Error::Singular));
        let p = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(p.det().unwrap(), Rat::from_int(-1));
    }

    #[test]
    fn solve_in_and_out_of_span() {
        let a = RatMatrix::from_i64(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = RatMatrix::from_i64(&[&[2], &[3], &[5]]);
        assert_eq!(a.solve(&b).unwrap().unwrap(), RatMatrix::from_i64(&[&[2], &[3]]));
        let c = RatMatrix::from_i64(&[&[2], &[3], &[6]]);
        assert_eq!(a.solve(&c).unwrap(), None);
        let dep = RatMatrix::from_i64(&[&[1, 2], &[1, 2]]);
        assert_eq!(dep.solve(&RatMatrix::from_i64(&[&[1], &[1]])), Err(Error::RankDeficient));
    }

    #[test]
    fn rank_counts() {
        assert_eq!(RatMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]).rank(), 1);
        assert_eq!(RatMatrix::identity(4).rank(), 4);
    }
}

//! Normal forms over the local ring `Z_(p) = {a/b : p does not divide b}`.
//!
//! A lattice is the `Z_(p)`-span of the columns of a full-column-rank
//! rational matrix. Column operations that are invertible over `Z_(p)`
//! (swaps, scaling by units, adding `Z_(p)`-multiples of one column to
//! another) leave the lattice unchanged; the Hermite form picks one
//! canonical basis per lattice, and the Smith form exposes the relative
//! position of two lattices.

use super::matrix::RatMatrix;
use super::rat::Rat;
use crate::error::{Error, Result};

fn col_axpy(cols: &mut [Vec<Rat>], dst: usize, f: &Rat, src: usize) {
    if f.is_zero() {
        return;
    }
    let (s, d) = if src < dst {
        let (a, b) = cols.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = cols.split_at_mut(src);
        (&b[0], &mut a[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            let t = f * y;
            *x -= &t;
        }
    }
}

/// Column Hermite normal form over `Z_(p)`.
///
/// The result spans the same lattice as `a`, is in column echelon form with
/// strictly increasing pivot rows, has pivots equal to exact powers of `p`,
/// and every entry of an earlier column in a later pivot row is reduced to
/// the canonical residue in `[0, p^e)` (see [`Rat::reduce_mod_pe`]).
pub fn hnf_local(a: &RatMatrix, p: u64) -> Result<RatMatrix> {
    Ok(hnf_with_pivots(a, p)?.0)
}

/// Hermite form together with `(pivot row, pivot exponent)` per column.
pub fn hnf_with_pivots(a: &RatMatrix, p: u64) -> Result<(RatMatrix, Vec<(usize, i64)>)> {
    let n = a.rows();
    let m = a.cols();
    if a.rank() != m {
        return Err(Error::RankDeficient);
    }
    let mut cols = a.columns();
    let mut pivots: Vec<(usize, i64)> = Vec::with_capacity(m);
    let mut row = 0;
    for c in 0..m {
        // first row carrying a nonzero entry in the unprocessed columns
        let r = (row..n)
            .find(|&r| (c..m).any(|j| !cols[j][r].is_zero()))
            .expect("full column rank guarantees a pivot");
        let (best, e) = (c..m)
            .filter_map(|j| cols[j][r].val(p).map(|v| (j, v)))
            .min_by_key(|&(j, v)| (v, j))
            .expect("some column is nonzero in the pivot row");
        cols.swap(c, best);
        let pe = Rat::pow_p(p, e);
        let unit = &pe / &cols[c][r];
        for x in cols[c].iter_mut() {
            *x = &*x * &unit;
        }
        cols[c][r] = pe.clone();
        for j in c + 1..m {
            if cols[j][r].is_zero() {
                continue;
            }
            let f = &cols[j][r] / &pe;
            col_axpy(&mut cols, j, &f, c);
        }
        pivots.push((r, e));
        row = r + 1;
    }
    for (c, &(r, e)) in pivots.iter().enumerate().skip(1) {
        let pe = Rat::pow_p(p, e);
        for prev in 0..c {
            let y = cols[prev][r].clone();
            let rep = y.reduce_mod_pe(p, e);
            if rep != y {
                let f = (&y - &rep) / &pe;
                col_axpy(&mut cols, prev, &f, c);
            }
        }
    }
    Ok((RatMatrix::from_columns(&cols)?, pivots))
}

/// Smith decomposition over `Z_(p)`: `P * a * Q = D` with `P`, `Q` invertible
/// over `Z_(p)` and `D` diagonal.  `left_inv` holds `P^{-1}`.
#[derive(Clone, Debug)]
pub struct LocalSmith {
    /// Valuations of the nonzero diagonal entries, in order.
    pub divisors: Vec<i64>,
    pub left_inv: RatMatrix,
    pub right: RatMatrix,
}

impl LocalSmith {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

pub fn smith_local(a: &RatMatrix, p: u64) -> LocalSmith {
    let rows = a.rows();
    let cols = a.cols();
    let mut w = a.clone();
    let mut pinv = RatMatrix::identity(rows);
    let mut q = RatMatrix::identity(cols);
    let mut divisors = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if let Some(v) = w[(r, c)].val(p) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, r, c)) = best else { break };
        w.swap_rows(t, r);
        pinv.swap_cols(t, r);
        w.swap_cols(t, c);
        q.swap_cols(t, c);
        let piv = w[(t, t)].clone();
        for r in t + 1..rows {
            if w[(r, t)].is_zero() {
                continue;
            }
            let f = &w[(r, t)] / &piv;
            for j in t..cols {
                let d = &f * &w[(t, j)];
                w[(r, j)] -= &d;
            }
            // P <- E P with E = I - f e_r e_t^T, so P^{-1} <- P^{-1} (I + f e_r e_t^T)
            for i in 0..rows {
                let d = &f * &pinv[(i, r)];
                pinv[(i, t)] += &d;
            }
        }
        for c in t + 1..cols {
            if w[(t, c)].is_zero() {
                continue;
            }
            let f = &w[(t, c)] / &piv;
            for i in t..rows {
                let d = &f * &w[(i, t)];
                w[(i, c)] -= &d;
            }
            for i in 0..cols {
                let d = &f * &q[(i, t)];
                q[(i, c)] -= &d;
            }
        }
        divisors.push(v);
    }
    LocalSmith { divisors, left_inv: pinv, right: q }
}

/// Valuations `d_1 <= ... <= d_m` of the Smith form of an invertible matrix.
pub fn elementary_divisors(c: &RatMatrix, p: u64) -> Result<Vec<i64>> {
    if !c.is_square() {
        return Err(Error::DimensionMismatch("elementary divisors need a square matrix".into()));
    }
    let s = smith_local(c, p);
    if s.rank() < c.rows() {
        return Err(Error::Singular);
    }
    let mut d = s.divisors;
    d.sort_unstable();
    Ok(d)
}

/// `Z_(p)`-basis (in Hermite form) of the saturated sublattice `L ∩ W`,
/// where `L` is given by a basis and `W` by spanning vectors.
pub fn intersect_saturate(l: &RatMatrix, w: &RatMatrix, p: u64) -> Result<RatMatrix> {
    let coords = l.solve(w)?.ok_or(Error::NotInSpan)?;
    let s = smith_local(&coords, p);
    let r = s.rank();
    if r == 0 {
        return Err(Error::RankDeficient);
    }
    let idx: Vec<usize> = (0..r).collect();
    let sat = l.checked_mul(&s.left_inv.select_columns(&idx))?;
    hnf_local(&sat, p)
}

/// Vectors extending the saturated sub-basis `sub` to a `Z_(p)`-basis of `L`.
/// Returns `None` when `sub` already spans `L`.
pub fn complete_basis(l: &RatMatrix, sub: &RatMatrix, p: u64) -> Result<Option<RatMatrix>> {
    let coords = l.solve(sub)?.ok_or(Error::NotInSpan)?;
    if coords.entries().any(|x| x.val(p).is_some_and(|v| v < 0)) {
        return Err(Error::NotInSpan);
    }
    let s = smith_local(&coords, p);
    if s.rank() < sub.cols() {
        return Err(Error::RankDeficient);
    }
    if s.divisors.iter().any(|&d| d != 0) {
        return Err(Error::NotSaturated);
    }
    let m = l.cols();
    if sub.cols() == m {
        return Ok(None);
    }
    let idx: Vec<usize> = (sub.cols()..m).collect();
    Ok(Some(l.checked_mul(&s.left_inv.select_columns(&idx))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn hnf_fixed_examples() {
        assert_eq!(hnf_local(&RatMatrix::identity(2), 3).unwrap(), RatMatrix::identity(2));
        let d = m(&[&[3, 0], &[0, 1]]);
        assert_eq!(hnf_local(&d, 3).unwrap(), d);
        assert_eq!(hnf_local(&m(&[&[1, 2], &[2, 4]]), 3), Err(Error::RankDeficient));
    }

    #[test]
    fn hnf_of_unimodular_example() {
        // [[1,2],[1,1]] has det -1, a unit at 3, so its lattice is Z_(3)^2.
        let a = m(&[&[1, 2], &[1, 1]]);
        let b = hnf_local(&a, 3).unwrap();
        assert_eq!(b, RatMatrix::identity(2));
        // oracle: B = A C with C unimodular over Z_(3)
        let c = a.solve(&b).unwrap().unwrap();
        assert_eq!(c.det().unwrap().val(3), Some(0));
        assert!(c.entries().all(|x| x.val(3).is_none_or(|v| v >= 0)));
        assert_eq!(hnf_local(&b, 3).unwrap(), b);
    }

    #[test]
    fn hnf_reduces_pivot_rows() {
        // columns (1, 5) and (0, 9) at p = 3: pivot 9 in row 1, residue 5 stays
        let a = m(&[&[1, 0], &[5, 9]]);
        let b = hnf_local(&a, 3).unwrap();
        assert_eq!(b, a);
        let a2 = m(&[&[1, 0], &[14, 9]]);
        assert_eq!(hnf_local(&a2, 3).unwrap(), a);
        // -1 reduces to p^e - 1
        assert_eq!(hnf_local(&m(&[&[1, 0], &[-1, 3]]), 3).unwrap(), m(&[&[1, 0], &[2, 3]]));
    }

    #[test]
    fn elementary_divisor_examples() {
        assert_eq!(elementary_divisors(&RatMatrix::identity(3), 5).unwrap(), vec![0, 0, 0]);
        assert_eq!(elementary_divisors(&m(&[&[9, 0], &[0, 1]]), 3).unwrap(), vec![0, 2]);
        assert_eq!(elementary_divisors(&m(&[&[3, 1], &[0, 3]]), 3).unwrap(), vec![0, 2]);
        assert_eq!(elementary_divisors(&m(&[&[1, 1], &[1, 1]]), 3), Err(Error::Singular));
    }

    #[test]
    fn saturation_examples() {
        let l3 = RatMatrix::identity(3);
        let w = m(&[&[1, 0], &[0, 1], &[0, 0]]);
        assert_eq!(intersect_saturate(&l3, &w, 5).unwrap(), w);
        // L = Z_(3)^2, W = span((1,3)) -> basis (1,3)
        let sat = intersect_saturate(&RatMatrix::identity(2), &m(&[&[2], &[6]]), 3).unwrap();
        assert_eq!(sat, m(&[&[1], &[3]]));
        // W outside span(L)
        let l2 = m(&[&[1, 0], &[0, 1], &[0, 0]]);
        assert_eq!(intersect_saturate(&l2, &m(&[&[0], &[0], &[1]]), 3), Err(Error::NotInSpan));
    }

    #[test]
    fn completion_examples() {
        let l = RatMatrix::identity(2);
        let sub = m(&[&[1], &[3]]);
        let ext = complete_basis(&l, &sub, 3).unwrap().unwrap();
        let full = sub.hstack(&ext).unwrap();
        assert_eq!(full.det().unwrap().val(3), Some(0));
        // (3, 0) is not saturated
        assert_eq!(complete_basis(&l, &m(&[&[3], &[0]]), 3), Err(Error::NotSaturated));
        assert_eq!(complete_basis(&l, &l, 3).unwrap(), None);
    }
}

//! Points of the compactified building as homothety classes of
//! diagonalizable norms on nonzero subspaces `W ⊆ Q^n`.
//!
//! A norm point with basis `f_1..f_m` of `W` and weights `k_1..k_m` is
//! `ν(Σ c_i f_i) = min_i (v(c_i) - k_i)`, taken modulo additive constants.
//! Its unit ball `{ν >= 0}` is the lattice `⊕ p^{k_i} Z_(p) f_i`, so integer
//! weights are exactly the vertices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::apartment::ApartmentPoint;
use crate::error::{Error, Result};
use crate::lattice_building::LatticeClass;
use crate::local_arith::{check_prime, hnf_with_pivots, intersect_saturate, vval, ExtVal, Rat, RatMatrix};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormPoint {
    p: u64,
    basis: RatMatrix,
    weights: Vec<Rat>,
}

impl NormPoint {
    /// Weights are shifted so that the minimum is 0.
    pub fn new(p: u64, basis: RatMatrix, weights: Vec<Rat>) -> Result<Self> {
        check_prime(p)?;
        if weights.len() != basis.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} basis vectors",
                weights.len(),
                basis.cols()
            )));
        }
        if basis.rank() != basis.cols() {
            return Err(Error::RankDeficient);
        }
        let min = weights.iter().min().cloned().expect("rank >= 1");
        let weights = weights.into_iter().map(|w| w - &min).collect();
        Ok(NormPoint { p, basis, weights })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn is_vertex(&self) -> bool {
        self.weights.iter().all(Rat::is_integer)
    }

    /// `ν(u)`; `+inf` at `u = 0`.
    pub fn eval(&self, u: &[Rat]) -> Result<ExtVal> {
        if u.len() != self.n() {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        let rhs = RatMatrix::from_columns(&[u.to_vec()])?;
        let c = self.basis.solve(&rhs)?.ok_or(Error::NotInSpan)?;
        let mut best = ExtVal::PlusInfinity;
        for (i, w) in self.weights.iter().enumerate() {
            if let ExtVal::Finite(v) = vval(&c[(i, 0)], self.p) {
                let val = ExtVal::Finite(v - w);
                if val < best {
                    best = val;
                }
            }
        }
        Ok(best)
    }

    fn eval_column(&self, m: &RatMatrix, j: usize) -> Rat {
        match self.eval(&m.column(j)) {
            Ok(ExtVal::Finite(v)) => v,
            other => unreachable!("basis vectors inside the span have finite norm: {other:?}"),
        }
    }

    pub fn same_span(&self, other: &NormPoint) -> bool {
        self.p == other.p
            && self.n() == other.n()
            && self.dim() == other.dim()
            && matches!(self.basis.solve(&other.basis), Ok(Some(_)))
    }

    /// Image under a matrix acting on `Q^n`: the basis moves, the weights stay.
    pub fn transform(&self, g: &RatMatrix) -> Result<NormPoint> {
        NormPoint::new(self.p, g.checked_mul(&self.basis)?, self.weights.clone())
    }
}

/// Equality of norm classes: equal spans, and `ν_x = ν_y + c` for one
/// constant `c`. Each norm is diagonal in its own basis, so comparing on
/// both bases suffices: `ν_x >= ν_y + c` on a `ν_y`-adapted basis implies
/// it everywhere by the ultrametric inequality, and symmetrically.
pub fn np_equal(x: &NormPoint, y: &NormPoint) -> bool {
    if !x.same_span(y) {
        return false;
    }
    let own = |z: &NormPoint, j: usize| -z.weights[j].clone();
    let c = x.eval_column(&y.basis, 0) - own(y, 0);
    let forward = (0..y.dim()).all(|i| x.eval_column(&y.basis, i) == own(y, i) + &c);
    let backward = (0..x.dim()).all(|j| y.eval_column(&x.basis, j) == own(x, j) - &c);
    forward && backward
}

/// The norm point of an apartment point: basis `v_i` for `i` in the
/// support, weights `-x_i`.
pub fn from_apartment(x: &ApartmentPoint, p: u64) -> Result<NormPoint> {
    let n = x.n();
    let cols: Vec<Vec<Rat>> = x
        .support()
        .iter()
        .map(|&i| {
            let mut c = vec![Rat::zero(); n];
            c[i - 1] = Rat::one();
            c
        })
        .collect();
    let weights = x.coords().values().map(|v| -v).collect();
    NormPoint::new(p, RatMatrix::from_columns(&cols)?, weights)
}

/// Inverse of [`from_apartment`] for norm points diagonal in the standard
/// frame (basis vectors are multiples of distinct `v_i`).
pub fn to_apartment(x: &NormPoint) -> Result<ApartmentPoint> {
    let mut coords = BTreeMap::new();
    for (j, col) in x.basis.columns().iter().enumerate() {
        let nonzero: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_zero()).collect();
        let [i] = nonzero[..] else {
            return Err(Error::NotDiagonal);
        };
        // c v_i with weight k is v_i with weight k + v(c)
        let k = &x.weights[j] + Rat::from_int(col[i].val(x.p).expect("nonzero"));
        if coords.insert(i + 1, -k).is_some() {
            return Err(Error::NotDiagonal);
        }
    }
    ApartmentPoint::new(x.n(), coords)
}

/// Norm of a lattice class: the canonical basis columns divided by their
/// pivots `p^e`, with weights `e`.
pub fn from_lattice(l: &LatticeClass) -> NormPoint {
    let (h, pivots) = hnf_with_pivots(l.basis(), l.p()).expect("canonical basis has full rank");
    let cols: Vec<Vec<Rat>> = h
        .columns()
        .into_iter()
        .zip(&pivots)
        .map(|(c, &(_, e))| {
            let s = Rat::pow_p(l.p(), -e);
            c.iter().map(|v| v * &s).collect()
        })
        .collect();
    let weights = pivots.iter().map(|&(_, e)| Rat::from_int(e)).collect();
    NormPoint::new(l.p(), RatMatrix::from_columns(&cols).expect("nonempty"), weights)
        .expect("independent columns")
}

/// The unit ball `⊕ p^{k_i} Z_(p) f_i` of a vertex.
pub fn to_lattice(x: &NormPoint) -> Result<LatticeClass> {
    let mut cols = Vec::with_capacity(x.dim());
    for (j, w) in x.weights.iter().enumerate() {
        let k = w.to_i64().ok_or(Error::NonIntegerWeights)?;
        let s = Rat::pow_p(x.p, k);
        cols.push(x.basis.column(j).iter().map(|v| v * &s).collect());
    }
    LatticeClass::new(x.p, &RatMatrix::from_columns(&cols)?)
}

/// Canonical basis of the subspace `W` carrying the norm: the Hermite form
/// of the saturation of `W ∩ Z_(p)^n`.
pub fn component_span(x: &NormPoint) -> RatMatrix {
    intersect_saturate(&RatMatrix::identity(x.n()), &x.basis, x.p).expect("basis spans W")
}

/// JSON form `{"p":3,"basis":[["1","0"],["0","1"]],"weights":["0","2"]}`,
/// one inner array per basis vector.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NormPointRepr {
    pub p: u64,
    pub basis: Vec<Vec<Rat>>,
    pub weights: Vec<Rat>,
}

impl TryFrom<NormPointRepr> for NormPoint {
    type Error = Error;

    fn try_from(r: NormPointRepr) -> Result<Self> {
        NormPoint::new(r.p, RatMatrix::from_columns(&r.basis)?, r.weights)
    }
}

impl From<&NormPoint> for NormPointRepr {
    fn from(x: &NormPoint) -> Self {
        NormPointRepr { p: x.p, basis: x.basis.columns(), weights: x.weights.clone() }
    }
}

impl Serialize for NormPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NormPointRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NormPointRepr::deserialize(d)?;
        NormPoint::try_from(r).map_err(serde::de::Error::custom)
    }
}

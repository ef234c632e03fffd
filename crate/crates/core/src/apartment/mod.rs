//! The compactified standard apartment: the union of the apartments
//! `Λ_I` over nonempty index sets `I ⊆ {1..n}`.
//!
//! A point of `Λ_I` is stored by its coordinates `x_i` (for `i ∈ I`) with
//! respect to the basis `η_i^I`, modulo adding a constant; the
//! representative is fixed by `min x_i = 0`. A root `a_ij` evaluates as
//! `x_i - x_j`. Moving a coordinate outside `I` towards `-inf` is the
//! direction in which interior points converge to `Λ_I`.

mod corner;
pub mod fourier_motzkin;
mod oracle;
mod topology;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_action::MonomialElement;
use crate::local_arith::{ExtVal, Rat};

pub use corner::{contract, corner_chart, corner_chart_inv, in_corner, CornerChart};
pub use oracle::f_value_oracle;
pub use topology::{
    fundamental_neighborhood, nbhd_contains, LatticeSeqRepr, LatticeSeqSpec, NeighborhoodRepr,
    NeighborhoodSpec, OpenBox, RayRepr, RaySpec,
};

/// Point of `Λ_I` for `I` = the support.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ApartmentPoint {
    n: usize,
    coords: BTreeMap<usize, Rat>,
}

impl ApartmentPoint {
    /// Builds the point with the given coordinates (1-based keys), shifting
    /// them so that the minimum is 0.
    pub fn new(n: usize, coords: BTreeMap<usize, Rat>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIndexSet("ambient dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidIndexSet("support must be nonempty".into()));
        }
        if let Some(&bad) = coords.keys().find(|&&i| i == 0 || i > n) {
            return Err(Error::InvalidIndexSet(format!("index {bad} outside 1..={n}")));
        }
        let min = coords.values().min().cloned().expect("nonempty");
        let coords = coords.into_iter().map(|(i, v)| (i, v - &min)).collect();
        Ok(ApartmentPoint { n, coords })
    }

    /// Interior point from all `n` coordinates.
    pub fn interior(values: Vec<Rat>) -> Result<Self> {
        let n = values.len();
        Self::new(n, values.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect())
    }

    pub fn from_ints(n: usize, pairs: &[(usize, i64)]) -> Result<Self> {
        Self::new(n, pairs.iter().map(|&(i, v)| (i, Rat::from_int(v))).collect())
    }

    pub fn origin(n: usize) -> Self {
        Self::interior(vec![Rat::zero(); n]).expect("n > 0")
    }

    /// The single point of `Λ_{i}`.
    pub fn singleton(n: usize, i: usize) -> Result<Self> {
        Self::new(n, BTreeMap::from([(i, Rat::zero())]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> Vec<usize> {
        self.coords.keys().copied().collect()
    }

    pub fn support_set(&self) -> BTreeSet<usize> {
        self.coords.keys().copied().collect()
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.coords.contains_key(&i)
    }

    pub fn coord(&self, i: usize) -> Option<&Rat> {
        self.coords.get(&i)
    }

    pub fn coords(&self) -> &BTreeMap<usize, Rat> {
        &self.coords
    }

    pub fn is_interior(&self) -> bool {
        self.coords.len() == self.n
    }

    /// Vertices are the points with integer coordinates.
    pub fn is_vertex(&self) -> bool {
        self.coords.values().all(Rat::is_integer)
    }

    /// All `n` coordinates of an interior point.
    pub fn full_coords(&self) -> Option<Vec<Rat>> {
        self.is_interior().then(|| self.coords.values().cloned().collect())
    }

    /// Chart coordinates `(x_1 - x_n, ..., x_{n-1} - x_n)` of an interior point.
    pub fn chart(&self) -> Option<Vec<Rat>> {
        let x = self.full_coords()?;
        let last = x[self.n - 1].clone();
        Some(x[..self.n - 1].iter().map(|v| v - &last).collect())
    }

    /// The projection `r_I` onto `Λ_I` for `I` inside the support.
    pub fn project(&self, sub: &[usize]) -> Result<Self> {
        if sub.is_empty() {
            return Err(Error::InvalidIndexSet("projection onto the empty set".into()));
        }
        let mut coords = BTreeMap::new();
        for &i in sub {
            match self.coords.get(&i) {
                Some(v) => {
                    coords.insert(i, v.clone());
                }
                None => {
                    return Err(Error::NotSubset { sub: sorted(sub), sup: self.support() });
                }
            }
        }
        Self::new(self.n, coords)
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

impl fmt::Display for ApartmentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{:?}(", self.support())?;
        for (k, (i, v)) in self.coords.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{i}={v}")?;
        }
        write!(f, ")")
    }
}

/// JSON form `{"n":3,"support":[1,2],"coords":{"1":"2","2":"0"}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ApartmentPointRepr {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    pub coords: BTreeMap<usize, Rat>,
}

impl TryFrom<ApartmentPointRepr> for ApartmentPoint {
    type Error = Error;

    fn try_from(r: ApartmentPointRepr) -> Result<Self> {
        if let Some(sup) = &r.support {
            let keys: Vec<usize> = r.coords.keys().copied().collect();
            if sorted(sup) != keys || sup.len() != keys.len() {
                return Err(Error::InvalidIndexSet(format!(
                    "support {sup:?} does not match coordinate keys {keys:?}"
                )));
            }
        }
        ApartmentPoint::new(r.n, r.coords)
    }
}

impl From<ApartmentPoint> for ApartmentPointRepr {
    fn from(x: ApartmentPoint) -> Self {
        ApartmentPointRepr { n: x.n, support: Some(x.support()), coords: x.coords }
    }
}

impl Serialize for ApartmentPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ApartmentPointRepr::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ApartmentPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ApartmentPointRepr::deserialize(d)?;
        ApartmentPoint::try_from(r).map_err(serde::de::Error::custom)
    }
}

/// The root `a_ij`, the character `t ↦ t_i / t_j` of the diagonal torus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Root {
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::InvalidRoot(i, j));
        }
        Ok(Root { i, j })
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.i == self.j || self.i == 0 || self.j == 0 || self.i > n || self.j > n {
            return Err(Error::InvalidRoot(self.i, self.j));
        }
        Ok(())
    }

    /// All roots of `PGL_n`.
    pub fn all(n: usize) -> Vec<Root> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    out.push(Root { i, j });
                }
            }
        }
        out
    }

    /// `a_ij + a_jk = a_ik` when the middle indices agree.
    pub fn add(&self, other: &Root) -> Option<Root> {
        (self.j == other.i && self.i != other.j).then_some(Root { i: self.i, j: other.j })
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// `a(x) = x_i - x_j` for a root with both indices in the support.
pub fn root_eval(a: Root, x: &ApartmentPoint) -> Result<Rat> {
    a.check(x.n)?;
    let xi = x.coord(a.i).ok_or(Error::OutsideSupport(a.i))?;
    let xj = x.coord(a.j).ok_or(Error::OutsideSupport(a.j))?;
    Ok(xi - xj)
}

/// `f_x(a)` from its closed form:
/// `-inf` if `j` is outside the support, `+inf` if only `i` is,
/// and `-(x_i - x_j)` otherwise.
pub fn f_value(a: Root, x: &ApartmentPoint) -> Result<ExtVal> {
    a.check(x.n)?;
    Ok(match (x.coord(a.i), x.coord(a.j)) {
        (_, None) => ExtVal::MinusInfinity,
        (None, Some(_)) => ExtVal::PlusInfinity,
        (Some(xi), Some(xj)) => ExtVal::Finite(xj - xi),
    })
}

/// `f_Ω(a)`, the supremum of `f_x(a)` over the finite set `Ω`.
pub fn f_set(a: Root, omega: &[ApartmentPoint]) -> Result<ExtVal> {
    let mut best: Option<ExtVal> = None;
    for x in omega {
        let v = f_value(a, x)?;
        best = Some(match best {
            Some(b) if b >= v => b,
            _ => v,
        });
    }
    best.ok_or(Error::EmptySet)
}

/// Action of the monomial element `(σ, t)`: the support moves to `σ(I)` and
/// the coordinate at `σ(i)` becomes `x_i - t_i`.
pub fn act_monomial(g: &MonomialElement, x: &ApartmentPoint) -> Result<ApartmentPoint> {
    if g.n() != x.n {
        return Err(Error::DimensionMismatch(format!(
            "monomial element of size {} acting on a point with n = {}",
            g.n(),
            x.n
        )));
    }
    let coords = x
        .coords
        .iter()
        .map(|(&i, v)| (g.perm_image(i), v - Rat::from_int(g.val(i))))
        .collect();
    ApartmentPoint::new(x.n, coords)
}

//! Elements of `PGL_n(Q)`, of the monomial subgroup `N`, and of the root
//! groups `U_a`, with their actions and the stabilizer tests.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::apartment::{f_set, f_value, ApartmentPoint, Root};
use crate::error::{Error, Result};
use crate::lattice_building::LatticeClass;
use crate::local_arith::{vval, ExtVal, Rat, RatMatrix};
use crate::norm_points::{np_equal, NormPoint};

/// An invertible matrix modulo scalars, stored as the primitive integer
/// representative whose first nonzero entry is positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjElement {
    matrix: RatMatrix,
}

impl ProjElement {
    pub fn new(matrix: RatMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("group elements are square".into()));
        }
        if matrix.det()?.is_zero() {
            return Err(Error::Singular);
        }
        let den = matrix.entries().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let integral = matrix.scale(&Rat::from_bigint(den));
        let content = integral.entries().fold(BigInt::zero(), |acc, e| acc.gcd(e.numer()));
        let first = integral.entries().find(|e| !e.is_zero()).expect("invertible");
        let mut scale = Rat::from_big_frac(BigInt::one(), content);
        if first.is_negative() {
            scale = -scale;
        }
        Ok(ProjElement { matrix: integral.scale(&scale) })
    }

    pub fn identity(n: usize) -> Self {
        ProjElement { matrix: RatMatrix::identity(n) }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn compose(&self, other: &ProjElement) -> Result<ProjElement> {
        ProjElement::new(self.matrix.checked_mul(&other.matrix)?)
    }

    pub fn inverse(&self) -> ProjElement {
        ProjElement::new(self.matrix.inverse().expect("invertible")).expect("invertible")
    }

    /// Whether `g` maps `V_I = span(v_i : i ∈ I)` into itself.
    pub fn preserves_subspace(&self, sub: &[usize]) -> Result<bool> {
        let n = self.n();
        let set = index_set(sub, n)?;
        Ok(set.iter().all(|&j| (1..=n).filter(|r| !set.contains(r)).all(|r| self.matrix[(r - 1, j - 1)].is_zero())))
    }

    /// The induced element of `PGL(V_I)`: the `I × I` block.
    pub fn restrict(&self, sub: &[usize]) -> Result<ProjElement> {
        if !self.preserves_subspace(sub)? {
            return Err(Error::SubspaceNotPreserved);
        }
        let idx: Vec<usize> = index_set(sub, self.n())?.iter().map(|i| i - 1).collect();
        ProjElement::new(self.matrix.select_rows(&idx).select_columns(&idx))
    }

    /// The root group element this class represents, if it is one:
    /// after scaling the diagonal to 1, a single nonzero off-diagonal entry
    /// (or none, giving `ω = 0` on the root `(1, 2)`).
    pub fn as_root_element(&self) -> Option<RootGroupElement> {
        let n = self.n();
        let d = self.matrix[(0, 0)].clone();
        if d.is_zero() || (0..n).any(|i| self.matrix[(i, i)] != d) {
            return None;
        }
        let m = self.matrix.scale(&d.recip());
        let off: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && !m[(i, j)].is_zero())
            .collect();
        match off[..] {
            [] if n >= 2 => Some(RootGroupElement { i: 1, j: 2, omega: Rat::zero() }),
            [(i, j)] => Some(RootGroupElement { i: i + 1, j: j + 1, omega: m[(i, j)].clone() }),
            _ => None,
        }
    }
}

fn index_set(sub: &[usize], n: usize) -> Result<BTreeSet<usize>> {
    let set: BTreeSet<usize> = sub.iter().copied().collect();
    if set.is_empty() || set.iter().any(|&i| i == 0 || i > n) {
        return Err(Error::InvalidIndexSet(format!("{sub:?} in 1..={n}")));
    }
    Ok(set)
}

/// JSON form `{"matrix":[["3","0"],["0","1"]]}` (row-major).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProjElementRepr {
    pub matrix: Vec<Vec<Rat>>,
}

impl TryFrom<ProjElementRepr> for ProjElement {
    type Error = Error;

    fn try_from(r: ProjElementRepr) -> Result<Self> {
        ProjElement::new(RatMatrix::from_rows(r.matrix)?)
    }
}

impl Serialize for ProjElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProjElementRepr { matrix: self.matrix.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ProjElementRepr::deserialize(d)?;
        ProjElement::try_from(r).map_err(serde::de::Error::custom)
    }
}

/// `(σ, t)`: the matrix with `p^{t_i}` at `(σ(i), i)`, so `v_i ↦ p^{t_i} v_{σ(i)}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "MonomialRepr", into = "MonomialRepr")]
pub struct MonomialElement {
    perm: Vec<usize>,
    vals: Vec<i64>,
}

/// JSON form `{"perm":[2,1],"vals":[1,0]}` with `perm[i-1] = σ(i)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MonomialRepr {
    pub perm: Vec<usize>,
    pub vals: Vec<i64>,
}

impl TryFrom<MonomialRepr> for MonomialElement {
    type Error = Error;

    fn try_from(r: MonomialRepr) -> Result<Self> {
        MonomialElement::new(r.perm, r.vals)
    }
}

impl From<MonomialElement> for MonomialRepr {
    fn from(m: MonomialElement) -> Self {
        MonomialRepr { perm: m.perm, vals: m.vals }
    }
}

impl MonomialElement {
    pub fn new(perm: Vec<usize>, vals: Vec<i64>) -> Result<Self> {
        let n = perm.len();
        let mut seen = perm.clone();
        seen.sort_unstable();
        if n == 0 || seen != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidIndexSet(format!("{perm:?} is not a permutation of 1..={n}")));
        }
        if vals.len() != n {
            return Err(Error::DimensionMismatch("one valuation per index".into()));
        }
        Ok(MonomialElement { perm, vals })
    }

    pub fn identity(n: usize) -> Self {
        MonomialElement { perm: (1..=n).collect(), vals: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// `σ(i)` for 1-based `i`.
    pub fn perm_image(&self, i: usize) -> usize {
        self.perm[i - 1]
    }

    /// `t_i` for 1-based `i`.
    pub fn val(&self, i: usize) -> i64 {
        self.vals[i - 1]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn vals(&self) -> &[i64] {
        &self.vals
    }

    pub fn to_matrix(&self, p: u64) -> RatMatrix {
        let n = self.n();
        let mut m = RatMatrix::zeros(n, n);
        for i in 1..=n {
            m[(self.perm_image(i) - 1, i - 1)] = Rat::pow_p(p, self.val(i));
        }
        m
    }

    pub fn to_proj(&self, p: u64) -> ProjElement {
        ProjElement::new(self.to_matrix(p)).expect("monomial matrices are invertible")
    }

    /// The product `self · other`.
    pub fn compose(&self, other: &MonomialElement) -> Result<MonomialElement> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch("monomial sizes differ".into()));
        }
        let perm = (1..=self.n()).map(|i| self.perm_image(other.perm_image(i))).collect();
        let vals = (1..=self.n()).map(|i| self.val(other.perm_image(i)) + other.val(i)).collect();
        MonomialElement::new(perm, vals)
    }

    pub fn inverse(&self) -> MonomialElement {
        let n = self.n();
        let mut perm = vec![0; n];
        let mut vals = vec![0; n];
        for i in 1..=n {
            let s = self.perm_image(i);
            perm[s - 1] = i;
            vals[s - 1] = -self.val(i);
        }
        MonomialElement { perm, vals }
    }

    /// Image `σ(a)` of a root.
    pub fn act_root(&self, a: Root) -> Root {
        Root { i: self.perm_image(a.i), j: self.perm_image(a.j) }
    }
}

/// `I + ω E_ij`, mapping `v_j ↦ v_j + ω v_i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RootElementRepr", into = "RootElementRepr")]
pub struct RootGroupElement {
    pub i: usize,
    pub j: usize,
    pub omega: Rat,
}

/// JSON form `{"i":1,"j":2,"omega":"1/3"}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootElementRepr {
    pub i: usize,
    pub j: usize,
    pub omega: Rat,
}

impl TryFrom<RootElementRepr> for RootGroupElement {
    type Error = Error;

    fn try_from(r: RootElementRepr) -> Result<Self> {
        RootGroupElement::new(Root::new(r.i, r.j)?, r.omega)
    }
}

impl From<RootGroupElement> for RootElementRepr {
    fn from(u: RootGroupElement) -> Self {
        RootElementRepr { i: u.i, j: u.j, omega: u.omega }
    }
}

impl RootGroupElement {
    pub fn new(a: Root, omega: Rat) -> Result<Self> {
        Root::new(a.i, a.j)?;
        Ok(RootGroupElement { i: a.i, j: a.j, omega })
    }

    pub fn root(&self) -> Root {
        Root { i: self.i, j: self.j }
    }

    pub fn to_matrix(&self, n: usize) -> Result<RatMatrix> {
        self.root().check(n)?;
        let mut m = RatMatrix::identity(n);
        m[(self.i - 1, self.j - 1)] = self.omega.clone();
        Ok(m)
    }

    pub fn to_proj(&self, n: usize) -> Result<ProjElement> {
        ProjElement::new(self.to_matrix(n)?)
    }
}

/// `ψ_a(u) = v(ω)`, `+inf` for the identity.
pub fn psi(u: &RootGroupElement, p: u64) -> ExtVal {
    vval(&u.omega, p)
}

/// `u ∈ U_{a,x}`, i.e. `ψ_a(u) >= f_x(a)`.
pub fn in_u_ax(u: &RootGroupElement, x: &ApartmentPoint, p: u64) -> Result<bool> {
    Ok(psi(u, p) >= f_value(u.root(), x)?)
}

/// `u ∈ U_{a,Ω}`, i.e. `ψ_a(u) >= f_Ω(a)`.
pub fn in_u_a_omega(u: &RootGroupElement, omega: &[ApartmentPoint], p: u64) -> Result<bool> {
    Ok(psi(u, p) >= f_set(u.root(), omega)?)
}

/// Things `PGL_n` acts on.
pub trait Actable: Sized {
    fn act_by(&self, g: &ProjElement) -> Result<Self>;
}

impl Actable for LatticeClass {
    fn act_by(&self, g: &ProjElement) -> Result<Self> {
        self.transform(g.matrix())
    }
}

impl Actable for NormPoint {
    fn act_by(&self, g: &ProjElement) -> Result<Self> {
        self.transform(g.matrix())
    }
}

pub fn act<T: Actable>(g: &ProjElement, x: &T) -> Result<T> {
    x.act_by(g)
}

/// `g ∈ P_x`, the stabilizer of the norm class.
pub fn stabilizes(g: &ProjElement, x: &NormPoint) -> Result<bool> {
    Ok(np_equal(&act(g, x)?, x))
}

pub fn stabilizes_lattice(g: &ProjElement, l: &LatticeClass) -> Result<bool> {
    Ok(&act(g, l)? == l)
}

/// `g ∈ ∩_{x ∈ Ω} P_x`.
pub fn stabilizes_set(g: &ProjElement, omega: &[NormPoint]) -> Result<bool> {
    if omega.is_empty() {
        return Err(Error::EmptySet);
    }
    for x in omega {
        if !stabilizes(g, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The supports met by `Ω` have a largest element under inclusion.
pub fn star_condition(omega: &[ApartmentPoint]) -> Result<bool> {
    if omega.is_empty() {
        return Err(Error::EmptySet);
    }
    let supports: Vec<BTreeSet<usize>> = omega.iter().map(ApartmentPoint::support_set).collect();
    Ok(supports.iter().any(|top| supports.iter().all(|s| s.is_subset(top))))
}

/// `n u n^{-1}`: root `(σ(i), σ(j))` with entry `p^{t_i - t_j} ω`.
pub fn conjugate_root_group(
    n: &MonomialElement,
    u: &RootGroupElement,
    p: u64,
) -> Result<RootGroupElement> {
    u.root().check(n.n())?;
    let omega = &u.omega * Rat::pow_p(p, n.val(u.i) - n.val(u.j));
    RootGroupElement::new(n.act_root(u.root()), omega)
}

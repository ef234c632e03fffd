//! Vertices of the building of `PGL_n(Q_p)` and of its boundary: homothety
//! classes of `Z_(p)`-lattices of rank `1..=n` in `Q^n`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::apartment::ApartmentPoint;
use crate::error::{Error, Result};
use crate::local_arith::{
    check_prime, complete_basis, elementary_divisors, hnf_with_pivots, intersect_saturate,
    smith_local, Rat, RatMatrix,
};

/// Homothety class of a lattice, stored as its canonical basis: the
/// Hermite form of any representative, rescaled so that the smallest
/// pivot valuation is 0.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LatticeClass {
    p: u64,
    basis: RatMatrix,
}

impl LatticeClass {
    /// Class of the lattice spanned by the columns of `basis`.
    pub fn new(p: u64, basis: &RatMatrix) -> Result<Self> {
        check_prime(p)?;
        let (h, pivots) = hnf_with_pivots(basis, p)?;
        let emin = pivots.iter().map(|&(_, e)| e).min().expect("rank >= 1");
        let basis = if emin == 0 { h } else { hnf_with_pivots(&h.scale(&Rat::pow_p(p, -emin)), p)?.0 };
        Ok(LatticeClass { p, basis })
    }

    pub fn standard(p: u64, n: usize) -> Result<Self> {
        Self::new(p, &RatMatrix::identity(n))
    }

    /// `class(⊕ p^{k_i} Z_(p) v_i)` over all `i`.
    pub fn diagonal(p: u64, exps: &[i64]) -> Result<Self> {
        let map = exps.iter().enumerate().map(|(i, &k)| (i + 1, k)).collect();
        Self::diagonal_on(p, exps.len(), &map)
    }

    /// `class(⊕_{i ∈ I} p^{k_i} Z_(p) v_i)` for the 1-based indices `I` of `exps`.
    pub fn diagonal_on(p: u64, n: usize, exps: &BTreeMap<usize, i64>) -> Result<Self> {
        if exps.is_empty() || exps.keys().any(|&i| i == 0 || i > n) {
            return Err(Error::InvalidIndexSet(format!("{:?} in 1..={n}", exps.keys())));
        }
        let cols: Vec<Vec<Rat>> = exps
            .iter()
            .map(|(&i, &k)| {
                let mut c = vec![Rat::zero(); n];
                c[i - 1] = Rat::pow_p(p, k);
                c
            })
            .collect();
        Self::new(p, &RatMatrix::from_columns(&cols)?)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.n()
    }

    fn compatible(&self, other: &LatticeClass) -> Result<()> {
        if self.p != other.p || self.n() != other.n() {
            return Err(Error::DimensionMismatch(format!(
                "classes over (p={}, n={}) and (p={}, n={})",
                self.p,
                self.n(),
                other.p,
                other.n()
            )));
        }
        Ok(())
    }

    /// Whether both classes span the same subspace of `Q^n`.
    pub fn same_span(&self, other: &LatticeClass) -> bool {
        self.p == other.p
            && self.n() == other.n()
            && self.rank() == other.rank()
            && matches!(self.basis.solve(&other.basis), Ok(Some(_)))
    }

    /// Image under a matrix acting on `Q^n`.
    pub fn transform(&self, g: &RatMatrix) -> Result<Self> {
        Self::new(self.p, &g.checked_mul(&self.basis)?)
    }

    /// Canonical JSON text, used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// Short stable label: the first 12 hex digits of the SHA-256 of the
    /// canonical JSON.
    pub fn label(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        let mut s = String::with_capacity(12);
        for b in &digest[..6] {
            write!(s, "{b:02x}").expect("write to string");
        }
        s
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{p={} basis={}}}", self.p, self.basis)
    }
}

/// JSON form `{"p":3,"n":3,"basis":[["1","0","0"],["0","3","0"]]}`, one
/// inner array per basis vector.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeClassRepr {
    pub p: u64,
    pub n: usize,
    pub basis: Vec<Vec<Rat>>,
}

impl TryFrom<LatticeClassRepr> for LatticeClass {
    type Error = Error;

    fn try_from(r: LatticeClassRepr) -> Result<Self> {
        if r.basis.iter().any(|v| v.len() != r.n) {
            return Err(Error::DimensionMismatch(format!("basis vectors must have length {}", r.n)));
        }
        LatticeClass::new(r.p, &RatMatrix::from_columns(&r.basis)?)
    }
}

impl From<&LatticeClass> for LatticeClassRepr {
    fn from(c: &LatticeClass) -> Self {
        LatticeClassRepr { p: c.p, n: c.n(), basis: c.basis.columns() }
    }
}

impl Serialize for LatticeClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeClassRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LatticeClassRepr::deserialize(d)?;
        LatticeClass::try_from(r).map_err(serde::de::Error::custom)
    }
}

/// Elementary divisors of `M` relative to `L`, shifted to minimum 0.
pub fn rel_pos(l: &LatticeClass, m: &LatticeClass) -> Result<Vec<i64>> {
    l.compatible(m)?;
    if !l.same_span(m) {
        return Err(Error::DistinctSpans);
    }
    let c = l.basis.solve(&m.basis)?.ok_or(Error::DistinctSpans)?;
    let mut d = elementary_divisors(&c, l.p)?;
    let min = d[0];
    for x in d.iter_mut() {
        *x -= min;
    }
    Ok(d)
}

/// Distinct classes with representatives `pN ⊂ M ⊂ N`.
pub fn adjacent(l: &LatticeClass, m: &LatticeClass) -> bool {
    if l == m {
        return false;
    }
    match rel_pos(l, m) {
        Ok(d) => d.last().is_some_and(|&top| top <= 1),
        Err(_) => false,
    }
}

/// Pairwise adjacency.
pub fn is_simplex(classes: &[LatticeClass]) -> Result<bool> {
    if classes.is_empty() {
        return Err(Error::EmptySet);
    }
    for (a, x) in classes.iter().enumerate() {
        for y in &classes[a + 1..] {
            if !adjacent(x, y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Size limits for neighbor enumeration and balls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_n: usize,
    pub max_p: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_n: 4, max_p: 7 }
    }
}

impl Limits {
    pub fn unlimited() -> Self {
        Limits { max_n: usize::MAX, max_p: u64::MAX }
    }

    pub fn check(&self, l: &LatticeClass) -> Result<()> {
        if l.n() > self.max_n || l.p > self.max_p {
            return Err(Error::Guardrail(format!(
                "n = {}, p = {} exceeds the limits n <= {}, p <= {}",
                l.n(),
                l.p,
                self.max_n,
                self.max_p
            )));
        }
        Ok(())
    }
}

/// Reduced row echelon bases of all `k`-dimensional subspaces of `F_p^m`,
/// each as `(pivot columns, rows)`.
fn echelon_subspaces(p: u64, m: usize, k: usize) -> Vec<(Vec<usize>, Vec<Vec<u64>>)> {
    let mut out = Vec::new();
    for pivots in combinations(m, k) {
        // free slots: row r, column c > pivot r, c not a pivot
        let slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pv = &pivots;
                ((pv[r] + 1)..m).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let total = (p as u128).pow(slots.len() as u32);
        for code in 0..total {
            let mut rows = vec![vec![0u64; m]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            let mut rest = code;
            for &(r, c) in &slots {
                rows[r][c] = (rest % p as u128) as u64;
                rest /= p as u128;
            }
            out.push((pivots.clone(), rows));
        }
    }
    out
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// All classes adjacent to `l`, sorted: one for each nonzero proper
/// subspace `S` of `L / pL`, namely the preimage `M = lift(S) + pL`.
pub fn neighbors(l: &LatticeClass, limits: &Limits) -> Result<Vec<LatticeClass>> {
    limits.check(l)?;
    let m = l.rank();
    let p = l.p;
    let mut out = Vec::new();
    for k in 1..m {
        for (pivots, rows) in echelon_subspaces(p, m, k) {
            let mut cols: Vec<Vec<Rat>> =
                rows.iter().map(|r| r.iter().map(|&v| Rat::from_int(v as i64)).collect()).collect();
            for j in (0..m).filter(|j| !pivots.contains(j)) {
                let mut c = vec![Rat::zero(); m];
                c[j] = Rat::from_int(p as i64);
                cols.push(c);
            }
            let coeffs = RatMatrix::from_columns(&cols)?;
            out.push(LatticeClass::new(p, &l.basis.checked_mul(&coeffs)?)?);
        }
    }
    out.sort();
    Ok(out)
}

/// Ball of given radius in the 1-skeleton, vertices ordered by BFS layer
/// and by canonical form within a layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildingGraph {
    pub vertices: Vec<LatticeClass>,
    pub edges: Vec<(usize, usize)>,
    pub center: usize,
    pub radius: u32,
    /// BFS distance from the center, per vertex.
    pub depth: Vec<u32>,
}

pub fn ball(center: &LatticeClass, radius: u32, limits: &Limits) -> Result<BuildingGraph> {
    limits.check(center)?;
    let mut vertices = vec![center.clone()];
    let mut depth = vec![0];
    let mut seen: HashSet<LatticeClass> = HashSet::from([center.clone()]);
    let mut adjacency: Vec<Vec<LatticeClass>> = Vec::new();
    let mut frontier = vec![center.clone()];
    for r in 0..=radius {
        let lists: Vec<Vec<LatticeClass>> = frontier
            .par_iter()
            .map(|v| neighbors(v, limits))
            .collect::<Result<_>>()?;
        let mut next: Vec<LatticeClass> = Vec::new();
        if r < radius {
            for list in &lists {
                for w in list {
                    if seen.insert(w.clone()) {
                        next.push(w.clone());
                    }
                }
            }
            next.sort();
        }
        adjacency.extend(lists);
        depth.extend(std::iter::repeat_n(r + 1, next.len()));
        vertices.extend(next.iter().cloned());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let index: HashMap<&LatticeClass, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (a, list) in adjacency.iter().enumerate() {
        for w in list {
            if let Some(&b) = index.get(w) {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(BuildingGraph { vertices, edges, center: 0, radius, depth })
}

impl BuildingGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Graphviz text with hash labels, plus the label-to-class sidecar.
    pub fn to_dot(&self) -> (String, serde_json::Value) {
        let labels: Vec<String> = self.vertices.iter().map(LatticeClass::label).collect();
        let mut dot = String::from("graph building {\n  node [shape=circle];\n");
        for (i, l) in labels.iter().enumerate() {
            let extra = if i == self.center { ", peripheries=2" } else { "" };
            writeln!(dot, "  \"{l}\" [label=\"{l}\", depth={}{extra}];", self.depth[i])
                .expect("write to string");
        }
        for &(a, b) in &self.edges {
            writeln!(dot, "  \"{}\" -- \"{}\";", labels[a], labels[b]).expect("write to string");
        }
        dot.push_str("}\n");
        let sidecar = labels
            .iter()
            .zip(&self.vertices)
            .map(|(l, v)| (l.clone(), serde_json::to_value(v).expect("serializable")))
            .collect::<serde_json::Map<_, _>>();
        (dot, serde_json::Value::Object(sidecar))
    }
}

/// Apartment coordinates of a class diagonal in the standard frame:
/// `x_i = -k_i` on the indices where the class has a basis vector `p^{k_i} v_i`.
pub fn phi(l: &LatticeClass) -> Result<ApartmentPoint> {
    let mut coords = BTreeMap::new();
    for col in l.basis.columns() {
        let nonzero: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_zero()).collect();
        let [i] = nonzero[..] else {
            return Err(Error::NotDiagonal);
        };
        let k = col[i].val(l.p).expect("nonzero");
        if col[i] != Rat::pow_p(l.p, k) {
            return Err(Error::NotDiagonal);
        }
        coords.insert(i + 1, Rat::from_int(-k));
    }
    ApartmentPoint::new(l.n(), coords)
}

/// Inverse of [`phi`] on integer points.
pub fn phi_inv(x: &ApartmentPoint, p: u64) -> Result<LatticeClass> {
    let mut exps = BTreeMap::new();
    for (&i, v) in x.coords() {
        let k = v.to_i64().ok_or(Error::NotVertex)?;
        exps.insert(i, -k);
    }
    LatticeClass::diagonal_on(p, x.n(), &exps)
}

/// A basis `f_1..f_n` adapted to a pair of classes: `y` is the class of
/// `⊕ p^{y_exps[j]} f_j` and `x` the class of `⊕_{j ∈ subset} p^{x_exps} f_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonFrame {
    pub frame: Vec<Vec<Rat>>,
    /// 1-based indices into `frame`.
    pub subset: Vec<usize>,
    pub x_exps: Vec<i64>,
    pub y_exps: Vec<i64>,
}

impl CommonFrame {
    fn scaled(&self, p: u64, idx: &[usize], exps: &[i64]) -> Result<RatMatrix> {
        let cols: Vec<Vec<Rat>> = idx
            .iter()
            .zip(exps)
            .map(|(&j, &e)| {
                let s = Rat::pow_p(p, e);
                self.frame[j - 1].iter().map(|v| v * &s).collect()
            })
            .collect();
        RatMatrix::from_columns(&cols)
    }

    /// Both classes are diagonal in the frame with the recorded exponents.
    pub fn verify(&self, x: &LatticeClass, y: &LatticeClass) -> bool {
        let p = y.p();
        let all: Vec<usize> = (1..=self.frame.len()).collect();
        let frame_ok = RatMatrix::from_columns(&self.frame).is_ok_and(|f| f.rank() == y.n());
        let y_ok = self
            .scaled(p, &all, &self.y_exps)
            .and_then(|b| LatticeClass::new(p, &b))
            .is_ok_and(|c| &c == y);
        let x_ok = self
            .scaled(p, &self.subset, &self.x_exps)
            .and_then(|b| LatticeClass::new(p, &b))
            .is_ok_and(|c| &c == x);
        frame_ok && y_ok && x_ok
    }
}

/// A frame putting `x` (any rank) and the full-rank class `y` in one
/// compactified apartment.
pub fn common_frame(x: &LatticeClass, y: &LatticeClass) -> Result<CommonFrame> {
    x.compatible(y)?;
    if !y.is_full_rank() {
        return Err(Error::DimensionMismatch("the second class must have full rank".into()));
    }
    let p = y.p;
    let sat = intersect_saturate(&y.basis, &x.basis, p)?;
    let coords = sat.solve(&x.basis)?.ok_or(Error::NotInSpan)?;
    let smith = smith_local(&coords, p);
    let adapted = sat.checked_mul(&smith.left_inv)?;
    let rest = complete_basis(&y.basis, &adapted, p)?;
    let mut frame = adapted.columns();
    if let Some(r) = rest {
        frame.extend(r.columns());
    }
    let m = x.rank();
    Ok(CommonFrame {
        frame,
        subset: (1..=m).collect(),
        x_exps: smith.divisors,
        y_exps: vec![0; y.n()],
    })
}

//! Basic open sets of the compactified apartment, convergence of affine
//! rays and nested lattice sequences, and exact tail certificates.
//!
//! For `I` proper, the corner set `C^I_U` is `(U + D_I)` together with the
//! projections `r_J(U + D_I)` for `I ⊆ J`, where
//! `D_I = { -Σ_{l ∉ I} λ_l e_l : λ_l >= 0 }` and `U` is an open box in the
//! chart `(x_1 - x_n, ..., x_{n-1} - x_n)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fourier_motzkin::LinearSystem;
use super::ApartmentPoint;
use crate::error::{Error, Result};
use crate::lattice_building::LatticeClass;
use crate::local_arith::{check_prime, Rat};

/// Open box `Π (lo_m, hi_m)` in the chart of `Λ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpenBox {
    intervals: Vec<(Rat, Rat)>,
}

impl OpenBox {
    pub fn new(intervals: Vec<(Rat, Rat)>) -> Result<Self> {
        if let Some((lo, hi)) = intervals.iter().find(|(lo, hi)| lo >= hi) {
            return Err(Error::InvalidBox(format!("empty interval ({lo}, {hi})")));
        }
        Ok(OpenBox { intervals })
    }

    pub fn centered(center: &[Rat], radius: &Rat) -> Result<Self> {
        Self::new(center.iter().map(|c| (c - radius, c + radius)).collect())
    }

    pub fn intervals(&self) -> &[(Rat, Rat)] {
        &self.intervals
    }

    /// Dimension `n` of the apartment the box lives in.
    pub fn ambient(&self) -> usize {
        self.intervals.len() + 1
    }

    pub fn contains_chart(&self, w: &[Rat]) -> bool {
        w.len() == self.intervals.len()
            && self.intervals.iter().zip(w).all(|((lo, hi), v)| lo < v && v < hi)
    }
}

/// A basic open set: a box in `Λ`, or a corner set `C^I_U`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NeighborhoodSpec {
    Box(OpenBox),
    Corner { support: Vec<usize>, open: OpenBox },
}

impl NeighborhoodSpec {
    pub fn corner(support: Vec<usize>, open: OpenBox) -> Result<Self> {
        let n = open.ambient();
        let mut s = support;
        s.sort_unstable();
        s.dedup();
        if s.is_empty() || s.len() >= n || s.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::InvalidIndexSet(format!(
                "corner index set {s:?} must be a proper nonempty subset of 1..={n}"
            )));
        }
        Ok(NeighborhoodSpec::Corner { support: s, open })
    }

    pub fn ambient(&self) -> usize {
        match self {
            NeighborhoodSpec::Box(b) => b.ambient(),
            NeighborhoodSpec::Corner { open, .. } => open.ambient(),
        }
    }

    pub fn open_box(&self) -> &OpenBox {
        match self {
            NeighborhoodSpec::Box(b) => b,
            NeighborhoodSpec::Corner { open, .. } => open,
        }
    }
}

/// JSON form `{"I":[1,2],"box":[["-1","1"],["-1","1"]]}`; boxes omit `"I"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NeighborhoodRepr {
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(rename = "box")]
    pub intervals: Vec<(Rat, Rat)>,
}

impl TryFrom<NeighborhoodRepr> for NeighborhoodSpec {
    type Error = Error;

    fn try_from(r: NeighborhoodRepr) -> Result<Self> {
        let open = OpenBox::new(r.intervals)?;
        match r.support {
            None => Ok(NeighborhoodSpec::Box(open)),
            Some(s) => NeighborhoodSpec::corner(s, open),
        }
    }
}

impl From<NeighborhoodSpec> for NeighborhoodRepr {
    fn from(s: NeighborhoodSpec) -> Self {
        match s {
            NeighborhoodSpec::Box(b) => NeighborhoodRepr { support: None, intervals: b.intervals },
            NeighborhoodSpec::Corner { support, open } => {
                NeighborhoodRepr { support: Some(support), intervals: open.intervals }
            }
        }
    }
}

impl Serialize for NeighborhoodSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NeighborhoodRepr::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NeighborhoodSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = NeighborhoodRepr::deserialize(d)?;
        NeighborhoodSpec::try_from(r).map_err(serde::de::Error::custom)
    }
}

fn chart_of(values: &[Rat]) -> Vec<Rat> {
    let last = values.last().expect("n >= 1").clone();
    values[..values.len() - 1].iter().map(|v| v - &last).collect()
}

/// The `k`-th member (`k >= 1`) of the countable fundamental system of
/// neighborhoods of `x`.
///
/// Interior points get the box of half-width `1/k` around their chart.
/// For `x ∈ Λ_I` with `I` proper, lift `x` to `z` (zero outside `I`) and take
/// `C^I_U` with `U` the box of half-width `1/k` around `z - k Σ_{l ∉ I} e_l`.
pub fn fundamental_neighborhood(x: &ApartmentPoint, k: u32) -> Result<NeighborhoodSpec> {
    if k == 0 {
        return Err(Error::ParameterOutOfRange("neighborhood index must be >= 1".into()));
    }
    let n = x.n();
    if n < 2 {
        return Err(Error::DimensionMismatch("the apartment of PGL_1 is a point".into()));
    }
    let radius = Rat::from_frac(1, k as i64);
    let kk = Rat::from_int(k as i64);
    let lifted: Vec<Rat> = (1..=n)
        .map(|m| match x.coord(m) {
            Some(v) => v.clone(),
            None => -&kk,
        })
        .collect();
    let open = OpenBox::centered(&chart_of(&lifted), &radius)?;
    if x.is_interior() {
        Ok(NeighborhoodSpec::Box(open))
    } else {
        NeighborhoodSpec::corner(x.support(), open)
    }
}

fn unit(len: usize, idx: usize, c: Rat) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); len];
    v[idx] = c;
    v
}

/// Exact membership of `x` in a basic open set.
pub fn nbhd_contains(spec: &NeighborhoodSpec, x: &ApartmentPoint) -> Result<bool> {
    let n = x.n();
    if spec.ambient() != n {
        return Err(Error::DimensionMismatch(format!(
            "neighborhood in dimension {} tested against a point with n = {n}",
            spec.ambient()
        )));
    }
    let (corner, open) = match spec {
        NeighborhoodSpec::Box(b) => {
            return Ok(x.chart().is_some_and(|w| b.contains_chart(&w)));
        }
        NeighborhoodSpec::Corner { support, open } => (support, open),
    };
    if !corner.iter().all(|&i| x.in_support(i)) {
        return Ok(false);
    }
    // variables: chart w_1..w_{n-1} (w_n = 0), then λ_l for l ∉ I
    let outside: Vec<usize> = (1..=n).filter(|l| !corner.contains(l)).collect();
    let nv = n - 1 + outside.len();
    let lam = |l: usize| outside.iter().position(|&o| o == l).map(|p| n - 1 + p);
    let mut sys = LinearSystem::new(nv);
    for (m, (lo, hi)) in open.intervals().iter().enumerate() {
        sys.gt(unit(nv, m, Rat::one()), lo.clone());
        sys.lt(unit(nv, m, Rat::one()), hi.clone());
    }
    for p in 0..outside.len() {
        sys.ge(unit(nv, n - 1 + p, Rat::one()), Rat::zero());
    }
    // z_m = w_m - λ_m, as a coefficient row
    let z_row = |m: usize| {
        let mut row = vec![Rat::zero(); nv];
        if m < n {
            row[m - 1] = Rat::one();
        }
        if let Some(c) = lam(m) {
            row[c] = -Rat::one();
        }
        row
    };
    let sup = x.support();
    let anchor = sup[0];
    for &m in &sup[1..] {
        let row: Vec<Rat> = z_row(m).iter().zip(z_row(anchor)).map(|(a, b)| a - b).collect();
        let rhs = x.coord(m).unwrap() - x.coord(anchor).unwrap();
        sys.eq(row, rhs);
    }
    Ok(sys.is_feasible())
}

/// The affine ray `k ↦ base - k * direction` of interior points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RaySpec {
    base: ApartmentPoint,
    direction: Vec<Rat>,
}

impl RaySpec {
    /// The direction is shifted so that its minimum is 0.
    pub fn new(base: ApartmentPoint, direction: Vec<Rat>) -> Result<Self> {
        if !base.is_interior() {
            return Err(Error::InvalidDirection("ray base must be an interior point".into()));
        }
        if direction.len() != base.n() {
            return Err(Error::InvalidDirection(format!(
                "direction has {} entries, expected {}",
                direction.len(),
                base.n()
            )));
        }
        let min = direction.iter().min().cloned().expect("n >= 1");
        let direction = direction.into_iter().map(|d| d - &min).collect();
        Ok(RaySpec { base, direction })
    }

    pub fn base(&self) -> &ApartmentPoint {
        &self.base
    }

    pub fn direction(&self) -> &[Rat] {
        &self.direction
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn point_at(&self, k: &Rat) -> ApartmentPoint {
        let values = self
            .base
            .full_coords()
            .expect("interior base")
            .iter()
            .zip(&self.direction)
            .map(|(b, d)| b - k * d)
            .collect();
        ApartmentPoint::interior(values).expect("n >= 1")
    }

    /// Indices with zero slope: the support of the limit.
    pub fn limit_support(&self) -> Vec<usize> {
        (1..=self.n()).filter(|&i| self.direction[i - 1].is_zero()).collect()
    }

    /// The limit in the compactified apartment: coordinates with positive
    /// slope run to `-inf`, so the ray converges to the projection of its
    /// base onto the zero-slope indices.
    pub fn limit(&self) -> ApartmentPoint {
        self.base.project(&self.limit_support()).expect("support of an interior point")
    }

    /// Smallest `k0 >= 0` with `point_at(k)` in `spec` for every real
    /// `k >= k0`, or `None` when the ray does not eventually stay inside.
    pub fn tail_start(&self, spec: &NeighborhoodSpec) -> Result<Option<u64>> {
        let n = self.n();
        if spec.ambient() != n {
            return Err(Error::DimensionMismatch("ray and neighborhood dimensions differ".into()));
        }
        let corner: Vec<usize> = match spec {
            NeighborhoodSpec::Box(_) => (1..=n).collect(),
            NeighborhoodSpec::Corner { support, .. } => support.clone(),
        };
        let outside: Vec<usize> = (1..=n).filter(|l| !corner.contains(l)).collect();
        // variables: λ_l for l ∉ I, then the ray parameter K
        let nv = outside.len() + 1;
        let kv = nv - 1;
        let lam = |l: usize| outside.iter().position(|&o| o == l);
        let base = self.base.full_coords().expect("interior base");
        let d = &self.direction;
        let mut sys = LinearSystem::new(nv);
        for p in 0..outside.len() {
            sys.ge(unit(nv, p, Rat::one()), Rat::zero());
        }
        // chart of ray(K) + λ: (b_m - b_n) - K (d_m - d_n) + λ_m - λ_n
        for (m0, (lo, hi)) in spec.open_box().intervals().iter().enumerate() {
            let m = m0 + 1;
            let mut row = vec![Rat::zero(); nv];
            row[kv] = -(&d[m - 1] - &d[n - 1]);
            if let Some(c) = lam(m) {
                row[c] = &row[c] + Rat::one();
            }
            if let Some(c) = lam(n) {
                row[c] = &row[c] - Rat::one();
            }
            let offset = &base[m - 1] - &base[n - 1];
            sys.gt(row.clone(), lo - &offset);
            sys.lt(row, hi - &offset);
        }
        let proj = sys.project(&[kv]);
        if proj.is_trivially_infeasible() {
            return Ok(None);
        }
        let mut k0 = Rat::zero();
        for row in proj.rows() {
            let c = &row.coeffs[kv];
            if c.is_positive() {
                // an upper bound on K: the ray leaves eventually
                return Ok(None);
            }
            // c K <= rhs with c < 0, i.e. K >= rhs / c (strictly if flagged)
            let bound = &row.rhs / c;
            let first = if row.strict {
                Rat::from_bigint(bound.floor() + 1)
            } else {
                Rat::from_bigint(bound.ceil())
            };
            if first > k0 {
                k0 = first;
            }
        }
        Ok(Some(k0.to_i64().expect("small bound") as u64))
    }
}

/// JSON form `{"base": <point>, "direction": ["0","0","1"]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RayRepr {
    pub base: super::ApartmentPointRepr,
    pub direction: Vec<Rat>,
}

impl TryFrom<RayRepr> for RaySpec {
    type Error = Error;

    fn try_from(r: RayRepr) -> Result<Self> {
        RaySpec::new(ApartmentPoint::try_from(r.base)?, r.direction)
    }
}

impl Serialize for RaySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RayRepr { base: self.base.clone().into(), direction: self.direction.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RaySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RayRepr::deserialize(d)?;
        RaySpec::try_from(r).map_err(serde::de::Error::custom)
    }
}

/// The nested lattice sequence `M_k = ⊕ p^{b_i + k d_i} Z_(p) v_i`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "LatticeSeqRepr", into = "LatticeSeqRepr")]
pub struct LatticeSeqSpec {
    p: u64,
    base: Vec<i64>,
    slopes: Vec<i64>,
}

/// JSON form `{"p":3,"base":[0,0,0],"slopes":[0,0,1]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeSeqRepr {
    pub p: u64,
    pub base: Vec<i64>,
    pub slopes: Vec<i64>,
}

impl TryFrom<LatticeSeqRepr> for LatticeSeqSpec {
    type Error = Error;

    fn try_from(r: LatticeSeqRepr) -> Result<Self> {
        LatticeSeqSpec::new(r.p, r.base, r.slopes)
    }
}

impl From<LatticeSeqSpec> for LatticeSeqRepr {
    fn from(s: LatticeSeqSpec) -> Self {
        LatticeSeqRepr { p: s.p, base: s.base, slopes: s.slopes }
    }
}

impl LatticeSeqSpec {
    /// Slopes must be nonnegative with minimum 0, which makes the
    /// representatives nested: `M_{k+1} ⊆ M_k`.
    pub fn new(p: u64, base: Vec<i64>, slopes: Vec<i64>) -> Result<Self> {
        check_prime(p)?;
        if base.is_empty() || base.len() != slopes.len() {
            return Err(Error::DimensionMismatch("base and slopes must have equal length n >= 1".into()));
        }
        if slopes.iter().any(|&d| d < 0) || !slopes.contains(&0) {
            return Err(Error::InvalidDirection(
                "slopes must be nonnegative with minimum 0".into(),
            ));
        }
        Ok(LatticeSeqSpec { p, base, slopes })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    pub fn slopes(&self) -> &[i64] {
        &self.slopes
    }

    pub fn exponents_at(&self, k: i64) -> Vec<i64> {
        self.base.iter().zip(&self.slopes).map(|(b, d)| b + k * d).collect()
    }

    /// The class of `M_k`.
    pub fn term(&self, k: i64) -> LatticeClass {
        LatticeClass::diagonal(self.p, &self.exponents_at(k)).expect("valid diagonal lattice")
    }

    /// Class of `∩_k M_k = ⊕_{d_i = 0} p^{b_i} Z_(p) v_i`.
    pub fn limit(&self) -> LatticeClass {
        let exps: BTreeMap<usize, i64> = (1..=self.n())
            .filter(|&i| self.slopes[i - 1] == 0)
            .map(|i| (i, self.base[i - 1]))
            .collect();
        LatticeClass::diagonal_on(self.p, self.n(), &exps).expect("valid diagonal lattice")
    }

    /// The corresponding ray of apartment points `x_{i,k} = -b_i - k d_i`.
    pub fn coordinate_ray(&self) -> RaySpec {
        let base = ApartmentPoint::interior(self.base.iter().map(|&b| Rat::from_int(-b)).collect())
            .expect("n >= 1");
        RaySpec::new(base, self.slopes.iter().map(|&d| Rat::from_int(d)).collect())
            .expect("matching lengths")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn pt(n: usize, pairs: &[(usize, i64)]) -> ApartmentPoint {
        ApartmentPoint::from_ints(n, pairs).unwrap()
    }

    #[test]
    fn boxes_and_corners() {
        let o = ApartmentPoint::origin(3);
        let b = NeighborhoodSpec::Box(OpenBox::centered(&[r(0), r(0)], &r(1)).unwrap());
        assert!(nbhd_contains(&b, &o).unwrap());
        assert!(!nbhd_contains(&b, &pt(3, &[(1, 2), (2, 0), (3, 0)])).unwrap());
        let x = pt(3, &[(2, 0), (3, 0)]);
        let c = fundamental_neighborhood(&pt(3, &[(1, 0), (2, 0)]), 1).unwrap();
        assert!(!nbhd_contains(&c, &x).unwrap());
    }

    #[test]
    fn fundamental_neighborhoods_contain_their_point() {
        for x in [
            ApartmentPoint::origin(3),
            pt(3, &[(1, 2), (2, 0)]),
            pt(3, &[(2, 0)]),
            pt(4, &[(1, 1), (3, 0), (4, 5)]),
        ] {
            for k in 1..=5 {
                let nb = fundamental_neighborhood(&x, k).unwrap();
                assert!(nbhd_contains(&nb, &x).unwrap(), "{x} not in its neighborhood {k}");
            }
        }
    }

    #[test]
    fn corner_contains_projection_of_a_box_point() {
        // z = (0, 0, -10) with a unit box around it; x = r_{1,2}(z)
        let u = OpenBox::centered(&[r(10), r(10)], &r(1)).unwrap();
        let c = NeighborhoodSpec::corner(vec![1, 2], u).unwrap();
        assert!(nbhd_contains(&c, &pt(3, &[(1, 0), (2, 0)])).unwrap());
        assert!(!nbhd_contains(&c, &pt(3, &[(1, 5), (2, 0)])).unwrap());
        // interior points deep in the corner
        assert!(nbhd_contains(&c, &pt(3, &[(1, 0), (2, 0), (3, -50)])).unwrap());
        assert!(!nbhd_contains(&c, &pt(3, &[(1, 0), (2, 0), (3, 50)])).unwrap());
    }

    #[test]
    fn ray_limits() {
        let o = ApartmentPoint::origin(3);
        let ray = RaySpec::new(o.clone(), vec![r(0), r(0), r(1)]).unwrap();
        assert_eq!(ray.limit(), pt(3, &[(1, 0), (2, 0)]));
        let still = RaySpec::new(o.clone(), vec![r(2), r(2), r(2)]).unwrap();
        assert_eq!(still.limit(), o);
        let b = pt(3, &[(1, 5), (2, 0), (3, 1)]);
        let ray2 = RaySpec::new(b, vec![r(0), r(1), r(1)]).unwrap();
        assert_eq!(ray2.limit(), ApartmentPoint::singleton(3, 1).unwrap());
    }

    #[test]
    fn ray_tails_enter_every_fundamental_neighborhood() {
        let ray = RaySpec::new(pt(3, &[(1, 5), (2, 0), (3, 1)]), vec![r(0), r(1), r(3)]).unwrap();
        let lim = ray.limit();
        for k in 1..=5 {
            let nb = fundamental_neighborhood(&lim, k).unwrap();
            let k0 = ray.tail_start(&nb).unwrap().expect("ray converges");
            for step in 0..10 {
                assert!(nbhd_contains(&nb, &ray.point_at(&r(k0 as i64 + step))).unwrap());
            }
            if k0 > 0 {
                assert!(!nbhd_contains(&nb, &ray.point_at(&r(k0 as i64 - 1))).unwrap());
            }
        }
        // a point the ray does not approach
        let wrong = fundamental_neighborhood(&ApartmentPoint::origin(3), 1).unwrap();
        assert_eq!(ray.tail_start(&wrong).unwrap(), None);
    }

    #[test]
    fn lattice_sequence_limits() {
        let s = LatticeSeqSpec::new(3, vec![0, 0, 0], vec![0, 0, 1]).unwrap();
        let expected = LatticeClass::diagonal_on(3, 3, &BTreeMap::from([(1, 0), (2, 0)])).unwrap();
        assert_eq!(s.limit(), expected);
        let c = LatticeSeqSpec::new(3, vec![1, 0, 2], vec![0, 0, 0]).unwrap();
        assert_eq!(c.limit(), LatticeClass::diagonal(3, &[1, 0, 2]).unwrap());
        let s2 = LatticeSeqSpec::new(3, vec![2, 0, 1], vec![0, 0, 4]).unwrap();
        let expected2 = LatticeClass::diagonal_on(3, 3, &BTreeMap::from([(1, 2), (2, 0)])).unwrap();
        assert_eq!(s2.limit(), expected2);
        assert!(LatticeSeqSpec::new(3, vec![0, 0], vec![1, 1]).is_err());
    }
}

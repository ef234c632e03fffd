//! Seeded random generators for the property suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apartment::{ApartmentPoint, LatticeSeqSpec, RaySpec, Root};
use crate::group_action::{MonomialElement, ProjElement, RootGroupElement};
use crate::lattice_building::LatticeClass;
use crate::local_arith::{Rat, RatMatrix};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational with denominator in `1..=4`.
pub fn small_rat<R: Rng>(rng: &mut R, bound: i64) -> Rat {
    let den = rng.gen_range(1..=4);
    Rat::from_frac(rng.gen_range(-bound * den..=bound * den), den)
}

/// Nonempty subset of `1..=n`, sorted.
pub fn support<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=n);
    subset_of_size(rng, n, size)
}

pub fn subset_of_size<R: Rng>(rng: &mut R, n: usize, size: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (1..=n).collect();
    all.shuffle(rng);
    let mut s = all[..size].to_vec();
    s.sort_unstable();
    s
}

pub fn point_on<R: Rng>(rng: &mut R, n: usize, sup: &[usize], integral: bool) -> ApartmentPoint {
    let coords = sup
        .iter()
        .map(|&i| {
            let v = if integral { Rat::from_int(rng.gen_range(-4..=4)) } else { small_rat(rng, 4) };
            (i, v)
        })
        .collect();
    ApartmentPoint::new(n, coords).expect("valid support")
}

/// A point of `Λ_I` for a random `I`; about a third of the time interior.
pub fn point<R: Rng>(rng: &mut R, n: usize) -> ApartmentPoint {
    let sup = if rng.gen_bool(1.0 / 3.0) { (1..=n).collect() } else { support(rng, n) };
    let integral = rng.gen_bool(0.5);
    point_on(rng, n, &sup, integral)
}

pub fn interior_point<R: Rng>(rng: &mut R, n: usize) -> ApartmentPoint {
    point_on(rng, n, &(1..=n).collect::<Vec<_>>(), false)
}

pub fn diagonal_class<R: Rng>(rng: &mut R, p: u64, n: usize, rank: usize) -> LatticeClass {
    let sup = subset_of_size(rng, n, rank);
    let exps: BTreeMap<usize, i64> = sup.iter().map(|&i| (i, rng.gen_range(-3..=3))).collect();
    LatticeClass::diagonal_on(p, n, &exps).expect("valid diagonal class")
}

/// Random full-column-rank integer matrix with small entries.
pub fn integer_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> RatMatrix {
    loop {
        let data: Vec<Vec<Rat>> = (0..rows)
            .map(|_| (0..cols).map(|_| Rat::from_int(rng.gen_range(-bound..=bound))).collect())
            .collect();
        let m = RatMatrix::from_rows(data).expect("nonempty");
        if m.rank() == cols {
            return m;
        }
    }
}

/// Lattice class of the given rank with a random (usually non-diagonal) basis.
pub fn lattice_class<R: Rng>(rng: &mut R, p: u64, n: usize, rank: usize) -> LatticeClass {
    let m = integer_matrix(rng, n, rank, p as i64 * 3);
    LatticeClass::new(p, &m).expect("full column rank")
}

/// Element of `GL_n(Z_(p))`: integer entries, determinant prime to `p`.
pub fn local_unimodular<R: Rng>(rng: &mut R, p: u64, n: usize) -> RatMatrix {
    loop {
        let m = integer_matrix(rng, n, n, 4);
        if m.det().expect("square").val(p) == Some(0) {
            return m;
        }
    }
}

pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> ProjElement {
    let mut m = integer_matrix(rng, n, n, 5);
    for i in 0..n {
        if rng.gen_bool(0.3) {
            let d = Rat::from_int(rng.gen_range(1..=9));
            for j in 0..n {
                m[(i, j)] = &m[(i, j)] / &d;
            }
        }
    }
    ProjElement::new(m).expect("invertible")
}

pub fn monomial<R: Rng>(rng: &mut R, n: usize, tbound: i64) -> MonomialElement {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    let vals = (0..n).map(|_| rng.gen_range(-tbound..=tbound)).collect();
    MonomialElement::new(perm, vals).expect("permutation")
}

pub fn root<R: Rng>(rng: &mut R, n: usize) -> Root {
    let pair = subset_of_size(rng, n, 2);
    if rng.gen_bool(0.5) {
        Root { i: pair[0], j: pair[1] }
    } else {
        Root { i: pair[1], j: pair[0] }
    }
}

/// `ω = ± u p^e` with a unit `u` and `e ∈ [-4, 4]`, or `0` occasionally.
pub fn omega<R: Rng>(rng: &mut R, p: u64) -> Rat {
    if rng.gen_ratio(1, 12) {
        return Rat::zero();
    }
    let unit = loop {
        let u = rng.gen_range(1..=(2 * p as i64 + 1));
        if u % p as i64 != 0 {
            break u;
        }
    };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Rat::from_int(sign * unit) * Rat::pow_p(p, rng.gen_range(-4..=4))
}

pub fn root_element<R: Rng>(rng: &mut R, n: usize, p: u64) -> RootGroupElement {
    RootGroupElement::new(root(rng, n), omega(rng, p)).expect("valid root")
}

pub fn ray<R: Rng>(rng: &mut R, n: usize) -> RaySpec {
    let base = interior_point(rng, n);
    let direction = (0..n).map(|_| Rat::from_frac(rng.gen_range(0..=6), rng.gen_range(1..=3))).collect();
    RaySpec::new(base, direction).expect("matching length")
}

pub fn lattice_seq<R: Rng>(rng: &mut R, p: u64, n: usize) -> LatticeSeqSpec {
    let base = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    let mut slopes: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    let z = rng.gen_range(0..n);
    slopes[z] = 0;
    LatticeSeqSpec::new(p, base, slopes).expect("normalized slopes")
}

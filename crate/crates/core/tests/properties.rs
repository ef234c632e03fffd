//! Property tests. Each case draws a seed and builds its inputs from the
//! crate's seeded generators, so a shrunk failure is one reproducible seed.

use std::collections::BTreeMap;

use bruhat_core::apartment::{act_monomial, f_set, f_value, in_corner, RaySpec};
use bruhat_core::group_action::{
    act, in_u_a_omega, in_u_ax, psi, stabilizes, stabilizes_set, star_condition,
};
use bruhat_core::lattice_building::{neighbors, rel_pos};
use bruhat_core::local_arith::{elementary_divisors, hnf_local};
use bruhat_core::norm_points::{from_apartment, from_lattice, np_equal};
use bruhat_core::sample::{self, SampleRng};
use bruhat_core::{
    ApartmentPoint, Error, ExtVal, LatticeClass, Limits, MonomialElement, NormPoint, ProjElement, Rat,
    RatMatrix, Root, RootGroupElement,
};
use proptest::prelude::*;
use rand::Rng;

fn prime(rng: &mut SampleRng) -> u64 {
    [2, 3, 5][rng.gen_range(0..3)]
}

fn setup(seed: u64) -> (SampleRng, u64, usize) {
    let mut rng = sample::rng(seed);
    let p = prime(&mut rng);
    let n = rng.gen_range(2..=4);
    (rng, p, n)
}

/// The norm whose unit ball is the lattice spanned by `basis`.
fn unit_ball_norm(p: u64, basis: RatMatrix) -> NormPoint {
    let dim = basis.cols();
    NormPoint::new(p, basis, vec![Rat::zero(); dim]).unwrap()
}

fn random_vector(rng: &mut SampleRng, basis: &RatMatrix) -> Vec<Rat> {
    let coeffs: Vec<Rat> = (0..basis.cols()).map(|_| sample::small_rat(rng, 30)).collect();
    basis.mul_vec(&coeffs).unwrap()
}

fn finite(v: ExtVal) -> Rat {
    v.as_finite().cloned().expect("finite norm")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_is_a_class_invariant(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let m = rng.gen_range(1..=n);
        let a = sample::integer_matrix(&mut rng, n, m, 9);
        let c = sample::local_unimodular(&mut rng, p, m);
        let h = hnf_local(&a, p).unwrap();
        prop_assert_eq!(&hnf_local(&a.checked_mul(&c).unwrap(), p).unwrap(), &h);
        prop_assert_eq!(&hnf_local(&h, p).unwrap(), &h);
        // same column span over Z_(p): H = A C' with C' locally unimodular
        let cprime = a.solve(&h).unwrap().unwrap();
        prop_assert_eq!(cprime.det().unwrap().val(p), Some(0));
    }

    #[test]
    fn elementary_divisors_are_invariant(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let c = sample::integer_matrix(&mut rng, n, n, 12);
        let d = elementary_divisors(&c, p).unwrap();
        let u = sample::local_unimodular(&mut rng, p, n);
        let v = sample::local_unimodular(&mut rng, p, n);
        let moved = u.checked_mul(&c).unwrap().checked_mul(&v).unwrap();
        prop_assert_eq!(Some(d.iter().sum::<i64>()), c.det().unwrap().val(p));
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(elementary_divisors(&moved, p).unwrap(), d);
    }

    #[test]
    fn rel_pos_is_symmetric_up_to_reversal(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let l = sample::lattice_class(&mut rng, p, n, n);
        let m = sample::lattice_class(&mut rng, p, n, n);
        let forward = rel_pos(&l, &m).unwrap();
        let top = *forward.last().unwrap();
        let mut backward: Vec<i64> = forward.iter().map(|d| top - d).collect();
        backward.sort_unstable();
        prop_assert_eq!(rel_pos(&m, &l).unwrap(), backward);
    }

    #[test]
    fn np_equal_is_an_equivalence(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let rank = rng.gen_range(1..=n);
        let l = sample::lattice_class(&mut rng, p, n, rank);
        let x = from_lattice(&l);
        // the same lattice through two other bases, one rescaled
        let y = unit_ball_norm(p, l.basis().checked_mul(&sample::local_unimodular(&mut rng, p, rank)).unwrap());
        let s = Rat::pow_p(p, rng.gen_range(-3..=3));
        let z = unit_ball_norm(
            p,
            l.basis().checked_mul(&sample::local_unimodular(&mut rng, p, rank)).unwrap().scale(&s),
        );
        let other = sample::lattice_class(&mut rng, p, n, rank);
        let w = from_lattice(&other);
        prop_assert!(np_equal(&x, &x));
        prop_assert!(np_equal(&x, &y) && np_equal(&y, &x));
        prop_assert!(np_equal(&y, &z) && np_equal(&x, &z));
        prop_assert_eq!(np_equal(&x, &w), np_equal(&w, &x));
        prop_assert_eq!(np_equal(&x, &w), np_equal(&z, &w));
        prop_assert_eq!(np_equal(&x, &w), l == other);
    }

    #[test]
    fn np_equal_detects_distinct_neighbors(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let p = prime(&mut rng);
        let n = rng.gen_range(2..=3);
        let l = sample::lattice_class(&mut rng, p, n, n);
        let nbrs = neighbors(&l, &Limits::default()).unwrap();
        let m = &nbrs[rng.gen_range(0..nbrs.len())];
        prop_assert!(!np_equal(&from_lattice(&l), &from_lattice(m)));
        prop_assert!(np_equal(&from_lattice(m), &from_lattice(&LatticeClass::new(p, m.basis()).unwrap())));
    }

    #[test]
    fn domination_is_sound(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let x = from_lattice(&sample::lattice_class(&mut rng, p, n, n));
        let y = from_lattice(&sample::lattice_class(&mut rng, p, n, n));
        // c = min over y's basis of ν_x(f_i) - ν_y(f_i)
        let c = (0..n)
            .map(|i| {
                let f = y.basis().column(i);
                finite(x.eval(&f).unwrap()) - finite(y.eval(&f).unwrap())
            })
            .min()
            .unwrap();
        for _ in 0..100 {
            let u = random_vector(&mut rng, y.basis());
            if u.iter().all(Rat::is_zero) {
                continue;
            }
            let (nx, ny) = (finite(x.eval(&u).unwrap()), finite(y.eval(&u).unwrap()));
            prop_assert!(nx >= ny + &c);
        }
    }

    #[test]
    fn action_is_a_group_action(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let rank = rng.gen_range(1..=n);
        let l = sample::lattice_class(&mut rng, p, n, rank);
        let g = sample::invertible(&mut rng, n);
        let h = sample::invertible(&mut rng, n);
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(act(&ProjElement::identity(n), &l).unwrap(), l.clone());
        prop_assert_eq!(act(&g, &act(&h, &l).unwrap()).unwrap(), act(&gh, &l).unwrap());
        let x = from_lattice(&l);
        prop_assert!(np_equal(&act(&ProjElement::identity(n), &x).unwrap(), &x));
        prop_assert!(np_equal(&act(&g, &act(&h, &x).unwrap()).unwrap(), &act(&gh, &x).unwrap()));
        // equivariance of the lattice-to-norm map
        prop_assert!(np_equal(&from_lattice(&act(&g, &l).unwrap()), &act(&g, &x).unwrap()));
        prop_assert_eq!(act(&g.inverse(), &act(&g, &l).unwrap()).unwrap(), l);
    }

    #[test]
    fn monomial_actions_agree(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let x = sample::point(&mut rng, n);
        let m = sample::monomial(&mut rng, n, 3);
        let m2 = sample::monomial(&mut rng, n, 3);
        let lhs = from_apartment(&act_monomial(&m, &x).unwrap(), p).unwrap();
        let rhs = act(&m.to_proj(p), &from_apartment(&x, p).unwrap()).unwrap();
        prop_assert!(np_equal(&lhs, &rhs));
        prop_assert_eq!(act_monomial(&MonomialElement::identity(n), &x).unwrap(), x.clone());
        prop_assert_eq!(
            act_monomial(&m.compose(&m2).unwrap(), &x).unwrap(),
            act_monomial(&m, &act_monomial(&m2, &x).unwrap()).unwrap()
        );
        prop_assert_eq!(act_monomial(&m.inverse(), &act_monomial(&m, &x).unwrap()).unwrap(), x.clone());
        // w ∘ r_J = r_{w(J)} ∘ w
        let sup = x.support();
        let size = rng.gen_range(1..=sup.len());
        let j = sample::subset_of_size(&mut rng, sup.len(), size);
        let sub: Vec<usize> = j.iter().map(|&k| sup[k - 1]).collect();
        let image: Vec<usize> = sub.iter().map(|&i| m.perm_image(i)).collect();
        prop_assert_eq!(
            act_monomial(&m, &x.project(&sub).unwrap()).unwrap(),
            act_monomial(&m, &x).unwrap().project(&image).unwrap()
        );
    }

    #[test]
    fn corners_are_closed_under_inward_rays(seed in any::<u64>()) {
        let (mut rng, _, n) = setup(seed);
        let base = sample::interior_point(&mut rng, n);
        let corners: Vec<usize> = (1..=n).filter(|&i| in_corner(i, &base)).collect();
        let i = corners[rng.gen_range(0..corners.len())];
        // slope 0 at i keeps x_i maximal along the ray and in the limit
        let mut direction: Vec<Rat> = (0..n).map(|_| Rat::from_int(rng.gen_range(0..=5))).collect();
        direction[i - 1] = Rat::zero();
        let ray = RaySpec::new(base, direction).unwrap();
        for k in 0..10 {
            prop_assert!(in_corner(i, &ray.point_at(&Rat::from_int(k))));
        }
        prop_assert!(in_corner(i, &ray.limit()));
    }

    #[test]
    fn limits_of_root_group_members_stay_members(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let ray = sample::ray(&mut rng, n);
        let lim = ray.limit();
        let a = sample::root(&mut rng, n);
        let omega = sample::omega(&mut rng, p);
        // u_k = I + (ω + p^k) E_a converges to I + ω E_a as k grows
        let member_at = |k: i64| {
            let u = RootGroupElement::new(a, &omega + Rat::pow_p(p, k)).unwrap();
            in_u_ax(&u, &ray.point_at(&Rat::from_int(k)), p).unwrap()
        };
        if (20..60).all(member_at) {
            let u = RootGroupElement::new(a, omega.clone()).unwrap();
            prop_assert!(in_u_ax(&u, &lim, p).unwrap(), "a={} omega={} limit={}", a, omega, lim);
        }
    }

    #[test]
    fn products_over_omega_stabilize_omega(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let size = rng.gen_range(1..=3);
        let omega: Vec<ApartmentPoint> = (0..size).map(|_| sample::point(&mut rng, n)).collect();
        let norms: Vec<NormPoint> = omega.iter().map(|x| from_apartment(x, p).unwrap()).collect();
        // root elements from U_{a,Ω} on both sides, then an element of N fixing Ω
        let mut g = ProjElement::identity(n);
        for _ in 0..rng.gen_range(1..=4) {
            let a = sample::root(&mut rng, n);
            let omega_entry = match f_set(a, &omega).unwrap() {
                ExtVal::MinusInfinity => sample::omega(&mut rng, p),
                ExtVal::PlusInfinity => Rat::zero(),
                ExtVal::Finite(f) => {
                    let e: i64 = f.ceil().try_into().unwrap();
                    Rat::from_int(rng.gen_range(1..=3)) * Rat::pow_p(p, e + rng.gen_range(0..=2))
                }
            };
            let u = RootGroupElement::new(a, omega_entry).unwrap();
            prop_assert!(in_u_a_omega(&u, &omega, p).unwrap());
            g = g.compose(&u.to_proj(n).unwrap()).unwrap();
        }
        let fixing = (0..50)
            .map(|_| sample::monomial(&mut rng, n, 2))
            .find(|m| omega.iter().all(|x| act_monomial(m, x).unwrap() == *x));
        if let Some(m) = fixing {
            g = g.compose(&m.to_proj(p)).unwrap();
        }
        prop_assert!(stabilizes_set(&g, &norms).unwrap());
        // the set stabilizer is the pointwise intersection
        let h = sample::invertible(&mut rng, n);
        let pointwise = norms.iter().all(|x| stabilizes(&h, x).unwrap());
        prop_assert_eq!(stabilizes_set(&h, &norms).unwrap(), pointwise);
        let supports_nested = omega.iter().any(|top| omega.iter().all(|x| x.support_set().is_subset(&top.support_set())));
        prop_assert_eq!(star_condition(&omega).unwrap(), supports_nested);
    }

    #[test]
    fn restriction_respects_psi(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let u = sample::root_element(&mut rng, n, p);
        let sub = sample::support(&mut rng, n);
        let g = u.to_proj(n).unwrap();
        let (i_in, j_in) = (sub.contains(&u.i), sub.contains(&u.j));
        let position = |k: usize| sub.iter().position(|&s| s == k).unwrap() + 1;
        match g.restrict(&sub) {
            Ok(r) if i_in && j_in => {
                let v = r.as_root_element().unwrap();
                if !u.omega.is_zero() {
                    prop_assert_eq!((v.i, v.j), (position(u.i), position(u.j)));
                }
                prop_assert_eq!(psi(&v, p), psi(&u, p));
            }
            Ok(r) => {
                prop_assert!(!j_in || u.omega.is_zero());
                prop_assert_eq!(r, ProjElement::identity(sub.len()));
            }
            Err(e) => {
                prop_assert_eq!(e, Error::SubspaceNotPreserved);
                prop_assert!(!i_in && j_in && !u.omega.is_zero());
            }
        }
    }

    #[test]
    fn stabilizer_cases_match_closed_forms(seed in any::<u64>()) {
        let (mut rng, p, n) = setup(seed);
        let x = sample::point(&mut rng, n);
        let u = sample::root_element(&mut rng, n, p);
        let stab = stabilizes(&u.to_proj(n).unwrap(), &from_apartment(&x, p).unwrap()).unwrap();
        let expected = match (x.coord(u.i), x.coord(u.j)) {
            (_, None) => true,
            (None, Some(_)) => u.omega.is_zero(),
            (Some(xi), Some(xj)) => psi(&u, p) >= ExtVal::Finite(xj - xi),
        };
        prop_assert_eq!(stab, expected);
        prop_assert_eq!(in_u_ax(&u, &x, p).unwrap(), expected);
        prop_assert_eq!(f_value(u.root(), &x).unwrap() == ExtVal::MinusInfinity, x.coord(u.j).is_none());
    }

    #[test]
    fn f_set_is_the_supremum(seed in any::<u64>()) {
        let (mut rng, _, n) = setup(seed);
        let a = sample::root(&mut rng, n);
        let omega: Vec<ApartmentPoint> = (0..rng.gen_range(1..=4)).map(|_| sample::point(&mut rng, n)).collect();
        let top = omega.iter().map(|x| f_value(a, x).unwrap()).max().unwrap();
        prop_assert_eq!(f_set(a, &omega).unwrap(), top);
    }
}

#[test]
fn diagonal_lattices_match_their_norms() {
    let l = LatticeClass::diagonal_on(3, 3, &BTreeMap::from([(1, 2), (3, 0)])).unwrap();
    let x = from_lattice(&l);
    assert_eq!(x.weights(), &[Rat::from_int(2), Rat::zero()]);
    assert_eq!(x.eval(&[Rat::one(), Rat::zero(), Rat::zero()]).unwrap(), ExtVal::finite(-2));
    assert_eq!(Root::all(3).len(), 6);
}

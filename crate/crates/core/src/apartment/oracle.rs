//! `f_x(a)` computed from its definition as a closure threshold,
//! independently of the closed forms in [`super::f_value`].
//!
//! `f_x(a) = inf { t : x ∈ closure { z ∈ Λ : a(z) >= -t } }`. With the
//! fundamental neighborhoods `N_k` of `x` (nested, open), `x` lies in the
//! closure of `{a >= s}` iff every `N_k ∩ Λ` meets it, iff `s` is below
//! `S_k = sup { a(z) : z ∈ N_k ∩ Λ }` for all `k`; so `f_x(a) = -lim S_k`.
//!
//! The neighborhoods form a family parametrized by the shift `K` of the box
//! center and its radius `E`. Eliminating all point variables by
//! Fourier-Motzkin leaves upper bounds `t <= A + B K + C E`; `S` is their
//! minimum, and its limit as `K -> inf`, `E -> 0` is read off the signs of `B`.

use super::fourier_motzkin::LinearSystem;
use super::{ApartmentPoint, Root};
use crate::error::Result;
use crate::local_arith::{ExtVal, Rat};

pub fn f_value_oracle(a: Root, x: &ApartmentPoint) -> Result<ExtVal> {
    a.check(x.n())?;
    let n = x.n();
    let outside: Vec<usize> = (1..=n).filter(|&l| !x.in_support(l)).collect();
    let off = |m: usize| if x.in_support(m) { 0 } else { 1 };
    let lifted = |m: usize| x.coord(m).cloned().unwrap_or_else(Rat::zero);

    // variables: w_1..w_{n-1}, λ_l (l ∉ I), t, K, E
    let nl = outside.len();
    let tv = n - 1 + nl;
    let kv = tv + 1;
    let ev = tv + 2;
    let nv = tv + 3;
    let lam = |l: usize| outside.iter().position(|&o| o == l).map(|p| n - 1 + p);
    let mut sys = LinearSystem::new(nv);
    let basis = |idx: usize| {
        let mut v = vec![Rat::zero(); nv];
        v[idx] = Rat::one();
        v
    };
    sys.ge(basis(kv), Rat::zero());
    sys.ge(basis(ev), Rat::zero());
    for l in &outside {
        sys.ge(basis(lam(*l).unwrap()), Rat::zero());
    }
    // |w_m - c_m + K (off_m - off_n)| <= E with c_m = z_m - z_n
    for m in 1..n {
        let c = lifted(m) - lifted(n);
        let shift = Rat::from_int(off(m) - off(n));
        let mut up = basis(m - 1);
        up[kv] = shift.clone();
        up[ev] = -Rat::one();
        sys.le(up, c.clone());
        let mut down = basis(m - 1);
        down[kv] = shift;
        down[ev] = Rat::one();
        sys.ge(down, c);
    }
    // y_m = w_m - λ_m; impose t = y_i - y_j
    let y_row = |m: usize| {
        let mut row = vec![Rat::zero(); nv];
        if m < n {
            row[m - 1] = Rat::one();
        }
        if let Some(c) = lam(m) {
            row[c] = -Rat::one();
        }
        row
    };
    let mut eq: Vec<Rat> = y_row(a.i).iter().zip(y_row(a.j)).map(|(p, q)| p - q).collect();
    eq[tv] = -Rat::one();
    sys.eq(eq, Rat::zero());

    let proj = sys.project(&[tv, kv, ev]);
    let mut sup = ExtVal::PlusInfinity;
    for row in proj.rows() {
        let ct = &row.coeffs[tv];
        if !ct.is_positive() {
            continue;
        }
        // t <= (rhs - cK K - cE E) / ct
        let b = -(&row.coeffs[kv] / ct);
        let limit = if b.is_positive() {
            ExtVal::PlusInfinity
        } else if b.is_negative() {
            ExtVal::MinusInfinity
        } else {
            ExtVal::Finite(&row.rhs / ct)
        };
        if limit < sup {
            sup = limit;
        }
    }
    Ok(sup.negate())
}

//! Closed corners `E_i`, their charts onto `[0, inf]^{n-1}`, and the
//! contraction of the compactified apartment onto the origin.
//!
//! `E_i` consists of the points whose support contains `i` and whose
//! coordinate `x_i` is maximal. Coordinates outside the support sit at
//! `-inf`, so `E_i` is closed under limits of rays along `D_i`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ApartmentPoint;
use crate::error::{Error, Result};
use crate::local_arith::{ExtVal, Rat};

/// Chart coordinates of a point of `E_i`: `x_i - x_j` for each `j != i`,
/// `+inf` exactly when `j` is outside the support.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CornerChart {
    pub corner: usize,
    pub values: BTreeMap<usize, ExtVal>,
}

pub fn in_corner(i: usize, x: &ApartmentPoint) -> bool {
    match x.coord(i) {
        Some(xi) => x.coords().values().all(|v| v <= xi),
        None => false,
    }
}

pub fn corner_chart(i: usize, x: &ApartmentPoint) -> Result<CornerChart> {
    if i == 0 || i > x.n() || !in_corner(i, x) {
        return Err(Error::NotInCorner(i));
    }
    let xi = x.coord(i).expect("in support");
    let values = (1..=x.n())
        .filter(|&j| j != i)
        .map(|j| {
            let v = match x.coord(j) {
                Some(xj) => ExtVal::Finite(xi - xj),
                None => ExtVal::PlusInfinity,
            };
            (j, v)
        })
        .collect();
    Ok(CornerChart { corner: i, values })
}

pub fn corner_chart_inv(chart: &CornerChart) -> Result<ApartmentPoint> {
    let n = chart.values.len() + 1;
    let i = chart.corner;
    let expected: Vec<usize> = (1..=n).filter(|&j| j != i).collect();
    let keys: Vec<usize> = chart.values.keys().copied().collect();
    if i == 0 || i > n || keys != expected {
        return Err(Error::InvalidChart(format!(
            "corner {i} needs entries for {expected:?}, got {keys:?}"
        )));
    }
    let mut coords = BTreeMap::from([(i, Rat::zero())]);
    for (&j, v) in &chart.values {
        match v {
            ExtVal::PlusInfinity => {}
            ExtVal::Finite(r) if !r.is_negative() => {
                coords.insert(j, -r);
            }
            other => {
                return Err(Error::InvalidChart(format!("entry {other} at {j} is not in [0, inf]")));
            }
        }
    }
    ApartmentPoint::new(n, coords)
}

/// `r(y, t) = (1 - t) y / (1 + t y)`, with `r(inf, t) = (1 - t) / t` for `t > 0`.
fn shrink(y: &ExtVal, t: &Rat) -> Rat {
    let one = Rat::one();
    match y {
        ExtVal::PlusInfinity => (&one - t) / t,
        ExtVal::Finite(v) => (&one - t) * v / (&one + t * v),
        ExtVal::MinusInfinity => unreachable!("chart entries are nonnegative"),
    }
}

/// The contraction `r(x, t)`, computed in the least corner containing `x`.
/// `t = 0` is the identity and `t = 1` collapses everything to the origin;
/// for `t > 0` the image is an interior point.
pub fn contract(x: &ApartmentPoint, t: &Rat) -> Result<ApartmentPoint> {
    if t.is_negative() || *t > Rat::one() {
        return Err(Error::ParameterOutOfRange(t.to_string()));
    }
    if t.is_zero() {
        return Ok(x.clone());
    }
    let i = (1..=x.n()).find(|&i| in_corner(i, x)).expect("every point lies in some corner");
    let chart = corner_chart(i, x)?;
    let mut values = vec![Rat::zero(); x.n()];
    for (&j, y) in &chart.values {
        values[j - 1] = -shrink(y, t);
    }
    ApartmentPoint::interior(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: usize, pairs: &[(usize, i64)]) -> ApartmentPoint {
        ApartmentPoint::from_ints(n, pairs).unwrap()
    }

    #[test]
    fn corner_membership() {
        let o = ApartmentPoint::origin(3);
        assert!((1..=3).all(|i| in_corner(i, &o)));
        let y = pt(3, &[(1, 2), (2, 0)]);
        assert!(!in_corner(3, &y));
        assert!(in_corner(1, &y));
        assert!(!in_corner(2, &y));
    }

    #[test]
    fn chart_examples() {
        let o = ApartmentPoint::origin(3);
        for i in 1..=3 {
            let c = corner_chart(i, &o).unwrap();
            assert!(c.values.values().all(|v| *v == ExtVal::finite(0)));
            assert_eq!(corner_chart_inv(&c).unwrap(), o);
        }
        let y = pt(3, &[(1, 2), (2, 0)]);
        let c = corner_chart(1, &y).unwrap();
        assert_eq!(
            c.values,
            BTreeMap::from([(2, ExtVal::finite(2)), (3, ExtVal::PlusInfinity)])
        );
        assert_eq!(corner_chart_inv(&c).unwrap(), y);
        assert_eq!(corner_chart(2, &y), Err(Error::NotInCorner(2)));
    }

    #[test]
    fn contraction_examples() {
        let y = pt(3, &[(1, 2), (2, 0)]);
        let half = Rat::from_frac(1, 2);
        assert_eq!(contract(&y, &Rat::zero()).unwrap(), y);
        // chart (2, inf) at t = 1/2 shrinks to (1/2, 1)
        let c = contract(&y, &half).unwrap();
        let expected = ApartmentPoint::interior(vec![
            Rat::zero(),
            Rat::from_frac(-1, 2),
            Rat::from_int(-1),
        ])
        .unwrap();
        assert_eq!(c, expected);
        assert_eq!(contract(&y, &Rat::one()).unwrap(), ApartmentPoint::origin(3));
        assert!(contract(&y, &Rat::from_int(2)).is_err());
    }
}

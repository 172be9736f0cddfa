//! Chart gluing for the pinched torus: the immersed-sphere chart with its
//! deformation pair (u, v), the two torus charts with pairs (x_i, y_i), and
//! the circle-equivariant sphere potential.
//!
//! The relations are uv = 1 - exp(x_i) for i = 1, 2, u = exp(y_1), and
//! v = exp(-y_2), solved in the requested direction over series with the
//! appropriate shapes: the product uv and the x_i must have positive
//! valuation, u (for the first torus chart) and v (for the second) must be
//! 1 plus a positive-valuation series before a logarithm can be taken.
//! Transits between the two torus charts factor through the sphere chart
//! and always fail with a domain error: the intermediate v (resp. u)
//! acquires positive valuation and its logarithm does not exist. That
//! failure is the wall between the two chambers, not a shortcoming of the
//! composition order.
//!
//! The minus sign in uv = 1 - exp(x_i) belongs to the nontrivial spin
//! structure. The trivial-spin variant uv = 1 + exp(x_i) is exposed behind
//! a flag and fails in every direction: exp(x_i) = uv - 1 would need a
//! logarithm at constant term -1, and the glued product 1 + exp(x_i) is a
//! unit, violating the sphere-chart shape.

use crate::error::{Error, Result};
use crate::rational::rat_int;
use crate::series::{SeriesContext, TruncatedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartId {
    /// Immersed sphere chart, coordinates (u, v).
    L0,
    /// Chekanov-side torus chart, coordinates (x1, y1).
    L1,
    /// Clifford-side torus chart, coordinates (x2, y2).
    L2,
}

impl std::str::FromStr for ChartId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L0" | "l0" => Ok(ChartId::L0),
            "L1" | "l1" => Ok(ChartId::L1),
            "L2" | "l2" => Ok(ChartId::L2),
            _ => Err(Error::Validation(format!(
                "unknown chart {s:?}, expected L0, L1 or L2"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Spin {
    #[default]
    Nontrivial,
    Trivial,
}

/// Names of a chart's two deformation coordinates, in glue argument order.
pub fn coordinate_names(chart: ChartId) -> (&'static str, &'static str) {
    match chart {
        ChartId::L0 => ("u", "v"),
        ChartId::L1 => ("x1", "y1"),
        ChartId::L2 => ("x2", "y2"),
    }
}

/// Split a packed transition name such as "L0L1" into source and target.
pub fn parse_direction(s: &str) -> Result<(ChartId, ChartId)> {
    if s.len() == 4 {
        if let (Ok(a), Ok(b)) = (s[..2].parse::<ChartId>(), s[2..].parse::<ChartId>()) {
            return Ok((a, b));
        }
    }
    Err(Error::Validation(format!(
        "bad direction {s:?}, expected a chart pair such as L0L1 or L1L0"
    )))
}

fn check_l0(u: &TruncatedSeries, v: &TruncatedSeries) -> Result<TruncatedSeries> {
    let uv = u.mul(v)?;
    if !uv.positive_valuation() {
        return Err(Error::Domain(
            "sphere-chart product uv must have positive valuation".into(),
        ));
    }
    Ok(uv)
}

fn check_torus_x(x: &TruncatedSeries, chart: ChartId) -> Result<()> {
    if !x.positive_valuation() {
        return Err(Error::Domain(format!(
            "{} deformation x must have positive valuation",
            if chart == ChartId::L1 { "L1" } else { "L2" }
        )));
    }
    Ok(())
}

/// 1 - exp(x) under the given spin convention, as the value of uv.
fn uv_from_x(x: &TruncatedSeries, spin: Spin) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::one(x.context().clone());
    match spin {
        Spin::Nontrivial => one.sub(&x.exp()?),
        Spin::Trivial => one.add(&x.exp()?),
    }
}

/// x with exp(x) = 1 - uv (nontrivial spin) or exp(x) = uv - 1 (trivial
/// spin, which has no solution over the maximal ideal).
fn x_from_uv(uv: &TruncatedSeries, spin: Spin) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::one(uv.context().clone());
    match spin {
        Spin::Nontrivial => one.sub(uv)?.log(),
        Spin::Trivial => uv.sub(&one)?.log().map_err(|_| {
            Error::Domain(
                "trivial spin admits no gluing: exp(x) = uv - 1 has constant term -1".into(),
            )
        }),
    }
}

/// Solve the chart relations in the requested direction. Input and output
/// pairs are (u, v) for the sphere chart and (x_i, y_i) for the torus
/// charts; both series must share one context.
pub fn glue(
    source: ChartId,
    target: ChartId,
    first: &TruncatedSeries,
    second: &TruncatedSeries,
    spin: Spin,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    use ChartId::*;
    match (source, target) {
        (L0, L0) => {
            check_l0(first, second)?;
            Ok((first.clone(), second.clone()))
        }
        (L1, L1) | (L2, L2) => {
            check_torus_x(first, source)?;
            Ok((first.clone(), second.clone()))
        }
        (L0, L1) => {
            let uv = check_l0(first, second)?;
            let x = x_from_uv(&uv, spin)?;
            let y = first.log().map_err(|_| {
                Error::Domain(
                    "gluing to L1 needs u = 1 + (positive valuation); its logarithm is y1".into(),
                )
            })?;
            Ok((x, y))
        }
        (L0, L2) => {
            let uv = check_l0(first, second)?;
            let x = x_from_uv(&uv, spin)?;
            let y = second
                .log()
                .map_err(|_| {
                    Error::Domain(
                        "gluing to L2 needs v = 1 + (positive valuation); y2 is -log v".into(),
                    )
                })?
                .neg();
            Ok((x, y))
        }
        (L1, L0) => {
            check_torus_x(first, source)?;
            let u = second.exp().map_err(|_| {
                Error::Domain("y1 must have zero constant term (u = exp y1)".into())
            })?;
            let uv = uv_from_x(first, spin)?;
            let v = uv.mul(&u.invert_unit()?)?;
            check_l0(&u, &v).map_err(|_| {
                Error::Domain(
                    "trivial spin admits no gluing: 1 + exp(x1) is a unit, not in the maximal ideal"
                        .into(),
                )
            })?;
            Ok((u, v))
        }
        (L2, L0) => {
            check_torus_x(first, source)?;
            let v = second
                .neg()
                .exp()
                .map_err(|_| {
                    Error::Domain("y2 must have zero constant term (v = exp(-y2))".into())
                })?;
            let uv = uv_from_x(first, spin)?;
            let u = uv.mul(&v.invert_unit()?)?;
            check_l0(&u, &v).map_err(|_| {
                Error::Domain(
                    "trivial spin admits no gluing: 1 + exp(x2) is a unit, not in the maximal ideal"
                        .into(),
                )
            })?;
            Ok((u, v))
        }
        (L1, L2) | (L2, L1) => {
            let (u, v) = glue(source, L0, first, second, spin)?;
            glue(L0, target, &u, &v, spin)
        }
    }
}

/// The circle-equivariant potential of the immersed sphere, as a series in
/// the single product variable w = uv; the full potential is the lambda
/// factor times this series.
#[derive(Debug, Clone)]
pub struct SpherePotential {
    /// Name of the equivariant parameter multiplying the series.
    pub lambda_factor: String,
    /// log(1 - w) truncated: the coefficient of w^j is exactly -1/j.
    pub series: TruncatedSeries,
}

impl SpherePotential {
    pub fn pretty(&self) -> String {
        format!("{}*({})", self.lambda_factor, self.series)
    }
}

/// W(u, v) = x1 = log(1 - uv), written in w = uv and truncated at the
/// given order.
pub fn sphere_potential(cutoff: u32) -> SpherePotential {
    let ctx = SeriesContext::unit_weights(&["w"], rat_int(cutoff as i64));
    let w = TruncatedSeries::variable(ctx.clone(), 0).expect("single-variable context");
    let series = TruncatedSeries::one(ctx)
        .sub(&w)
        .and_then(|s| s.log())
        .expect("1 - w is a valid logarithm argument");
    SpherePotential {
        lambda_factor: "lambda".into(),
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use std::sync::Arc;

    fn ctx(cutoff: i64) -> Arc<SeriesContext> {
        SeriesContext::unit_weights(&["s"], rat_int(cutoff))
    }

    fn s_var(c: &Arc<SeriesContext>) -> TruncatedSeries {
        TruncatedSeries::variable(c.clone(), 0).unwrap()
    }

    #[test]
    fn torus_origin_maps_to_sphere_origin() {
        let c = ctx(4);
        let zero = TruncatedSeries::zero(c.clone());
        let (u, v) = glue(ChartId::L1, ChartId::L0, &zero, &zero, Spin::Nontrivial).unwrap();
        assert_eq!(u, TruncatedSeries::one(c.clone()));
        assert!(v.is_zero());
    }

    #[test]
    fn sphere_to_chekanov_golden() {
        let c = ctx(4);
        let s = s_var(&c);
        let u = TruncatedSeries::one(c.clone()).add(&s).unwrap();
        let (x, y) = glue(ChartId::L0, ChartId::L1, &u, &s, Spin::Nontrivial).unwrap();
        // x1 = log(1 - s - s^2)
        assert_eq!(x.coeff(&[1]), rat_int(-1));
        assert_eq!(x.coeff(&[2]), rat(-3, 2));
        assert_eq!(x.coeff(&[3]), rat(-4, 3));
        assert_eq!(x.coeff(&[4]), rat(-7, 4));
        // y1 = log(1 + s)
        assert_eq!(y.coeff(&[1]), rat_int(1));
        assert_eq!(y.coeff(&[2]), rat(-1, 2));
        assert_eq!(y.coeff(&[3]), rat(1, 3));
        assert_eq!(y.coeff(&[4]), rat(-1, 4));
    }

    #[test]
    fn chekanov_and_clifford_see_the_same_x() {
        // x depends only on the product uv, so swapping the unit between u
        // and v moves the pair from the L1 domain to the L2 domain without
        // changing x.
        let c = ctx(5);
        let s = s_var(&c);
        let unit = TruncatedSeries::one(c.clone()).add(&s).unwrap();
        let (x1, _) = glue(ChartId::L0, ChartId::L1, &unit, &s, Spin::Nontrivial).unwrap();
        let (x2, _) = glue(ChartId::L0, ChartId::L2, &s, &unit, Spin::Nontrivial).unwrap();
        assert_eq!(x1, x2);
        // with v non-unit the L2 y-coordinate does not exist
        assert!(glue(ChartId::L0, ChartId::L2, &unit, &s, Spin::Nontrivial).is_err());
    }

    #[test]
    fn round_trip_through_the_sphere() {
        let c = ctx(5);
        let s = s_var(&c);
        let x = s
            .clone()
            .add(&s.pow(2).scale(&rat_int(-2)))
            .unwrap()
            .add(&s.pow(3).scale(&rat(1, 3)))
            .unwrap();
        let y = s.neg().add(&s.pow(4)).unwrap();
        let (u, v) = glue(ChartId::L1, ChartId::L0, &x, &y, Spin::Nontrivial).unwrap();
        let (x2, y2) = glue(ChartId::L0, ChartId::L1, &u, &v, Spin::Nontrivial).unwrap();
        assert_eq!(x2, x);
        assert_eq!(y2, y);

        let (u2, v2) = glue(ChartId::L2, ChartId::L0, &x, &y, Spin::Nontrivial).unwrap();
        let (x3, y3) = glue(ChartId::L0, ChartId::L2, &u2, &v2, Spin::Nontrivial).unwrap();
        assert_eq!(x3, x);
        assert_eq!(y3, y);
    }

    #[test]
    fn sphere_round_trip_from_l0() {
        let c = ctx(5);
        let s = s_var(&c);
        let u = TruncatedSeries::one(c.clone())
            .add(&s)
            .unwrap()
            .add(&s.pow(2))
            .unwrap();
        let v = s.clone().add(&s.pow(3).scale(&rat(-1, 2))).unwrap();
        let (x, y) = glue(ChartId::L0, ChartId::L1, &u, &v, Spin::Nontrivial).unwrap();
        let (u2, v2) = glue(ChartId::L1, ChartId::L0, &x, &y, Spin::Nontrivial).unwrap();
        assert_eq!(u2, u);
        assert_eq!(v2, v);
    }

    #[test]
    fn torus_to_torus_is_obstructed() {
        let c = ctx(4);
        let s = s_var(&c);
        let y = s.scale(&rat(1, 2));
        let e = glue(ChartId::L1, ChartId::L2, &s, &y, Spin::Nontrivial).unwrap_err();
        assert!(matches!(e, Error::Domain(_)), "{e}");
        let e = glue(ChartId::L2, ChartId::L1, &s, &y, Spin::Nontrivial).unwrap_err();
        assert!(matches!(e, Error::Domain(_)), "{e}");
    }

    #[test]
    fn trivial_spin_never_glues() {
        let c = ctx(4);
        let s = s_var(&c);
        let u = TruncatedSeries::one(c.clone()).add(&s).unwrap();
        let e = glue(ChartId::L0, ChartId::L1, &u, &s, Spin::Trivial)
            .unwrap_err()
            .to_string();
        assert!(e.contains("trivial spin"), "{e}");
        let e = glue(ChartId::L1, ChartId::L0, &s, &s, Spin::Trivial)
            .unwrap_err()
            .to_string();
        assert!(e.contains("trivial spin"), "{e}");
    }

    #[test]
    fn sphere_chart_shape_enforced() {
        let c = ctx(4);
        let s = s_var(&c);
        let one_plus = TruncatedSeries::one(c.clone()).add(&s).unwrap();
        // uv has constant term 1: rejected
        let e = glue(
            ChartId::L0,
            ChartId::L1,
            &one_plus,
            &one_plus,
            Spin::Nontrivial,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
        // u itself not of unit shape: y1 unavailable
        let e = glue(ChartId::L0, ChartId::L1, &s, &s, Spin::Nontrivial).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
    }

    #[test]
    fn sphere_potential_goldens() {
        let w1 = sphere_potential(1);
        assert_eq!(w1.series.num_terms(), 1);
        assert_eq!(w1.series.coeff(&[1]), rat_int(-1));

        let w4 = sphere_potential(4);
        assert_eq!(w4.series.coeff(&[1]), rat_int(-1));
        assert_eq!(w4.series.coeff(&[2]), rat(-1, 2));
        assert_eq!(w4.series.coeff(&[3]), rat(-1, 3));
        assert_eq!(w4.series.coeff(&[4]), rat(-1, 4));
        assert_eq!(w4.series.num_terms(), 4);
        assert_eq!(w4.series.constant_term(), rat_int(0));
        assert!(w4.pretty().starts_with("lambda*("));
    }

    #[test]
    fn sphere_potential_exponentiates_to_the_relation() {
        let w = sphere_potential(6);
        let ctx = w.series.context().clone();
        let wv = TruncatedSeries::variable(ctx.clone(), 0).unwrap();
        let expected = TruncatedSeries::one(ctx).sub(&wv).unwrap();
        assert_eq!(w.series.exp().unwrap(), expected);
    }
}

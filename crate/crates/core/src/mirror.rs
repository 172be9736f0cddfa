//! Correction series, the mirror coordinate change, and the corrected disc
//! counts of a semi-Fano toric fiber.
//!
//! Kahler variables are indexed by the Mori generators (computed wall
//! classes or the user-supplied basis) and always carry weight 1: the series
//! grading counts total generator multiplicity, never symplectic area, since
//! the c1 = 0 classes feeding the correction series can have area zero. A
//! rational cutoff therefore bounds the Mori-variable degree of every series
//! in this module.
//!
//! Sign convention: the forward map is q_a = qc_a * exp(-sum_i (D_i.C_a) g_i),
//! writing qc for the corrected-side coordinate. This is the convention under
//! which the corrected coefficient at the -2-curve ray of the Hirzebruch
//! surface comes out as 1 + q (disc counts 1, 1, 0, 0, ..), which pins the
//! sign; see the regression tests.

use crate::error::{Error, Result};
use crate::rational::{factorial, rat_int, Rational};
use crate::series::{reverse_family, SeriesContext, TruncatedSeries};
use crate::toric::{
    enumerate_by_multiplicity, mori_generators, CurveClass, EnumerateConstraints, ToricInput,
};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct GFunction {
    pub ray: usize,
    pub series: TruncatedSeries,
}

#[derive(Debug, Clone)]
pub struct MirrorMap {
    /// The Mori generators indexing the Kahler variables.
    pub generators: Vec<CurveClass>,
    pub context: Arc<SeriesContext>,
    /// q_a as a series in the corrected-side coordinates, one per generator.
    pub forward: Vec<TruncatedSeries>,
    /// The formal inverse family, one per generator.
    pub inverse: Vec<TruncatedSeries>,
    /// Correction series g_i, one per ray.
    pub g: Vec<TruncatedSeries>,
    /// exp(g_i composed with the inverse family), one per ray; the
    /// coefficients are the corrected open disc counts.
    pub corrected: Vec<TruncatedSeries>,
}

fn degree_bound(cutoff: &Rational) -> Result<usize> {
    if *cutoff < rat_int(1) {
        return Err(Error::Domain(
            "mirror cutoff must be at least 1 (Kahler variables have degree 1)".into(),
        ));
    }
    let floor = cutoff.floor().to_integer();
    let bound = usize::try_from(&floor)
        .map_err(|_| Error::Numeric("cutoff too large for enumeration".into()))?;
    if bound > 10_000 {
        return Err(Error::Numeric("cutoff too large for enumeration".into()));
    }
    Ok(bound)
}

fn kahler_context(generator_count: usize, cutoff: &Rational) -> Result<Arc<SeriesContext>> {
    let names: Vec<String> = (1..=generator_count).map(|a| format!("q{a}")).collect();
    SeriesContext::new(names, vec![rat_int(1); generator_count], cutoff.clone())
}

fn g_series(
    input: &ToricInput,
    ctx: &Arc<SeriesContext>,
    ray: usize,
    bound: usize,
) -> Result<TruncatedSeries> {
    let classes = enumerate_by_multiplicity(
        input,
        EnumerateConstraints {
            c1_equals: Some(0),
            negative_at: Some(ray),
        },
        bound,
    )?;
    let mut s = TruncatedSeries::zero(ctx.clone());
    for (mults, class) in classes {
        let d = class.0[ray];
        debug_assert!(d < 0);
        let mut num = factorial((-d - 1) as u64);
        if d.rem_euclid(2) == 1 {
            num = -num;
        }
        let mut den = num::bigint::BigInt::from(1);
        for (j, c) in class.0.iter().enumerate() {
            if j != ray {
                den *= factorial(*c as u64);
            }
        }
        let coef = Rational::new(num, den);
        let exps: Vec<i64> = mults.iter().map(|m| *m as i64).collect();
        let mono = TruncatedSeries::monomial(ctx.clone(), exps, coef)?;
        s = s.add(&mono)?;
    }
    Ok(s)
}

/// The correction series at one ray: the sum over effective classes with
/// c1 = 0, D.C < 0 exactly at that ray, of
/// (-1)^{D_i.C} (-(D_i.C)-1)! / prod_{j != i} (D_j.C)! times the class monomial.
pub fn g_function(input: &ToricInput, ray: usize, cutoff: &Rational) -> Result<GFunction> {
    if ray >= input.rays.len() {
        return Err(Error::Validation(format!("ray index {ray} out of range")));
    }
    let gens = mori_generators(input)?;
    let ctx = kahler_context(gens.len(), cutoff)?;
    let bound = degree_bound(cutoff)?;
    Ok(GFunction {
        ray,
        series: g_series(input, &ctx, ray, bound)?,
    })
}

/// The full coordinate change: forward family, its formal inverse, the
/// correction series, and the corrected coefficient series per ray.
pub fn mirror_map(input: &ToricInput, cutoff: &Rational) -> Result<MirrorMap> {
    let gens = mori_generators(input)?;
    let ctx = kahler_context(gens.len(), cutoff)?;
    let bound = degree_bound(cutoff)?;
    let m = input.rays.len();
    let mut g = Vec::with_capacity(m);
    for ray in 0..m {
        g.push(g_series(input, &ctx, ray, bound)?);
    }
    let mut forward = Vec::with_capacity(gens.len());
    for (a, gen) in gens.iter().enumerate() {
        let mut arg = TruncatedSeries::zero(ctx.clone());
        for (i, gi) in g.iter().enumerate() {
            if gen.0[i] != 0 && !gi.is_zero() {
                arg = arg.add(&gi.scale(&rat_int(-gen.0[i])))?;
            }
        }
        let qa = TruncatedSeries::variable(ctx.clone(), a)?;
        forward.push(qa.mul(&arg.exp()?)?);
    }
    let inverse = if forward.is_empty() {
        Vec::new()
    } else {
        reverse_family(&forward)?
    };
    let bindings: BTreeMap<usize, TruncatedSeries> =
        inverse.iter().cloned().enumerate().collect();
    let mut corrected = Vec::with_capacity(m);
    for gi in &g {
        corrected.push(gi.substitute(&bindings)?.exp()?);
    }
    Ok(MirrorMap {
        generators: gens,
        context: ctx,
        forward,
        inverse,
        g,
        corrected,
    })
}

/// Corrected coefficient series per ray, in the flat coordinates. The
/// coefficient of a class monomial is the open disc count of the basic disc
/// at that ray plus the class.
pub fn corrected_coefficients(input: &ToricInput, cutoff: &Rational) -> Result<Vec<TruncatedSeries>> {
    Ok(mirror_map(input, cutoff)?.corrected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::toric::fixtures::{f2, ones, p2};
    use num::traits::Signed;

    fn f2_map() -> MirrorMap {
        mirror_map(&f2(ones(4)), &rat_int(3)).unwrap()
    }

    #[test]
    fn p2_corrections_vanish() {
        let fan = p2();
        for ray in 0..3 {
            let g = g_function(&fan, ray, &rat_int(5)).unwrap();
            assert!(g.series.is_zero());
        }
        let map = mirror_map(&fan, &rat_int(5)).unwrap();
        for (a, f) in map.forward.iter().enumerate() {
            let qa = TruncatedSeries::variable(map.context.clone(), a).unwrap();
            assert_eq!(*f, qa);
            assert_eq!(map.inverse[a], qa);
        }
        for c in &map.corrected {
            assert_eq!(*c, TruncatedSeries::one(map.context.clone()));
        }
    }

    #[test]
    fn f2_g_at_the_negative_ray() {
        // generators sort as fiber class then section class, so the section
        // variable is the second one
        let g = g_function(&f2(ones(4)), 1, &rat_int(3)).unwrap();
        assert_eq!(g.series.num_terms(), 3);
        assert_eq!(g.series.coeff(&[0, 1]), rat_int(1));
        assert_eq!(g.series.coeff(&[0, 2]), rat(3, 2));
        assert_eq!(g.series.coeff(&[0, 3]), rat(10, 3));
    }

    #[test]
    fn f2_g_coefficient_formula_deeper() {
        // coefficient of the k-fold section class is (2k-1)!/(k!)^2
        let g = g_function(&f2(ones(4)), 1, &rat_int(5)).unwrap();
        assert_eq!(g.series.coeff(&[0, 4]), rat(35, 4));
        assert_eq!(g.series.coeff(&[0, 5]), rat(126, 5));
    }

    #[test]
    fn f2_g_other_rays_vanish() {
        for ray in [0usize, 2, 3] {
            let g = g_function(&f2(ones(4)), ray, &rat_int(3)).unwrap();
            assert!(g.series.is_zero(), "ray {ray}");
        }
    }

    #[test]
    fn f2_forward_family_golden() {
        let map = f2_map();
        // section coordinate: qc * exp(2 g), expanded
        let b = &map.forward[1];
        assert_eq!(b.coeff(&[0, 1]), rat_int(1));
        assert_eq!(b.coeff(&[0, 2]), rat_int(2));
        assert_eq!(b.coeff(&[0, 3]), rat_int(5));
        // fiber coordinate: qc * exp(-g) starts as q1 - q1 q2
        let f = &map.forward[0];
        assert_eq!(f.coeff(&[1, 0]), rat_int(1));
        assert_eq!(f.coeff(&[1, 1]), rat_int(-1));
    }

    #[test]
    fn f2_inverse_family_golden() {
        let map = f2_map();
        let b = &map.inverse[1];
        assert_eq!(b.coeff(&[0, 1]), rat_int(1));
        assert_eq!(b.coeff(&[0, 2]), rat_int(-2));
        assert_eq!(b.coeff(&[0, 3]), rat_int(3));
        // the fiber inverse collapses to q1 * (1 + q2) exactly
        let f = &map.inverse[0];
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coeff(&[1, 0]), rat_int(1));
        assert_eq!(f.coeff(&[1, 1]), rat_int(1));
    }

    #[test]
    fn f2_corrected_counts() {
        let map = f2_map();
        // flagship: 1 + q at the -2-curve ray, with the square and cube
        // coefficients cancelling exactly
        let c = &map.corrected[1];
        assert_eq!(c.num_terms(), 2);
        assert_eq!(c.coeff(&[0, 0]), rat_int(1));
        assert_eq!(c.coeff(&[0, 1]), rat_int(1));
        assert_eq!(c.coeff(&[0, 2]), rat_int(0));
        assert_eq!(c.coeff(&[0, 3]), rat_int(0));
        for ray in [0usize, 2, 3] {
            assert_eq!(
                map.corrected[ray],
                TruncatedSeries::one(map.context.clone()),
                "ray {ray}"
            );
        }
    }

    #[test]
    fn f2_corrected_counts_stay_integral_deeper() {
        let map = mirror_map(&f2(ones(4)), &rat_int(6)).unwrap();
        for (e, c) in map.corrected[1].canonical_terms() {
            assert!(c.is_integer(), "coefficient of {e:?} is {c}");
            assert!(!c.is_negative());
        }
    }

    #[test]
    fn forward_inverse_compose_to_identity() {
        for (input, cutoff) in [(f2(ones(4)), rat_int(4)), (p2(), rat_int(3))] {
            let map = mirror_map(&input, &cutoff).unwrap();
            let inv: BTreeMap<usize, TruncatedSeries> =
                map.inverse.iter().cloned().enumerate().collect();
            let fwd: BTreeMap<usize, TruncatedSeries> =
                map.forward.iter().cloned().enumerate().collect();
            for (a, f) in map.forward.iter().enumerate() {
                let qa = TruncatedSeries::variable(map.context.clone(), a).unwrap();
                assert_eq!(f.substitute(&inv).unwrap(), qa, "forward o inverse at {a}");
                assert_eq!(
                    map.inverse[a].substitute(&fwd).unwrap(),
                    qa,
                    "inverse o forward at {a}"
                );
            }
        }
    }

    #[test]
    fn cutoff_one_truncates_to_identity_map() {
        // all correction effects live in degree >= 2, so at cutoff 1 the
        // coordinate change is the identity on the nose
        let map = mirror_map(&f2(ones(4)), &rat_int(1)).unwrap();
        for (a, f) in map.forward.iter().enumerate() {
            let qa = TruncatedSeries::variable(map.context.clone(), a).unwrap();
            assert_eq!(*f, qa);
            assert_eq!(map.inverse[a], qa);
        }
    }

    #[test]
    fn cutoff_below_one_rejected() {
        let e = mirror_map(&f2(ones(4)), &rat(1, 2)).unwrap_err().to_string();
        assert!(e.contains("at least 1"), "{e}");
    }

    #[test]
    fn ray_index_checked() {
        assert!(g_function(&p2(), 7, &rat_int(2)).is_err());
    }
}

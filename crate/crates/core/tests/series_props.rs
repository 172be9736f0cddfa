//! Randomized algebraic invariants of the truncated series ring: ring
//! axioms, unit inversion, exp/log round trips, substitution as a ring
//! map, and coherence of re-truncation.

use std::sync::Arc;

use proptest::prelude::*;

use discpot::rational::{rat, rat_int};
use discpot::{SeriesContext, TruncatedSeries};

fn ctx2() -> Arc<SeriesContext> {
    SeriesContext::unit_weights(&["x", "y"], rat_int(5))
}

type RawTerms = Vec<((i64, i64), (i64, i64))>;

fn build(ctx: &Arc<SeriesContext>, raw: &RawTerms, drop_constant: bool) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(ctx.clone());
    for ((a, b), (n, d)) in raw {
        if drop_constant && *a == 0 && *b == 0 {
            continue;
        }
        let m = TruncatedSeries::monomial(ctx.clone(), vec![*a, *b], rat(*n, *d)).unwrap();
        s = s.add(&m).unwrap();
    }
    s
}

fn raw_terms() -> impl Strategy<Value = RawTerms> {
    proptest::collection::vec(((0i64..5, 0i64..5), (-9i64..10, 1i64..8)), 0..7)
}

proptest! {
    #[test]
    fn addition_commutes_and_mul_distributes(ra in raw_terms(), rb in raw_terms(), rc in raw_terms()) {
        let ctx = ctx2();
        let a = build(&ctx, &ra, false);
        let b = build(&ctx, &rb, false);
        let c = build(&ctx, &rc, false);
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.add(&b).unwrap().mul(&c).unwrap(),
            a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn units_invert(rm in raw_terms()) {
        let ctx = ctx2();
        let u = TruncatedSeries::one(ctx.clone()).add(&build(&ctx, &rm, true)).unwrap();
        let inv = u.invert_unit().unwrap();
        prop_assert_eq!(u.mul(&inv).unwrap(), TruncatedSeries::one(ctx));
    }

    #[test]
    fn exp_log_round_trip(rm in raw_terms()) {
        let ctx = ctx2();
        let m = build(&ctx, &rm, true);
        prop_assert_eq!(m.exp().unwrap().log().unwrap(), m.clone());
        let u = TruncatedSeries::one(ctx).add(&m).unwrap();
        prop_assert_eq!(u.log().unwrap().exp().unwrap(), u);
    }

    #[test]
    fn exp_turns_sums_into_products(ra in raw_terms(), rb in raw_terms()) {
        let ctx = ctx2();
        let a = build(&ctx, &ra, true);
        let b = build(&ctx, &rb, true);
        prop_assert_eq!(
            a.add(&b).unwrap().exp().unwrap(),
            a.exp().unwrap().mul(&b.exp().unwrap()).unwrap()
        );
    }

    #[test]
    fn substitution_is_a_ring_map(ra in raw_terms(), rb in raw_terms(), rp in raw_terms(), rq in raw_terms()) {
        let ctx = ctx2();
        let a = build(&ctx, &ra, false);
        let b = build(&ctx, &rb, false);
        let p = build(&ctx, &rp, true);
        let q = build(&ctx, &rq, true);
        let bind = std::collections::BTreeMap::from([(0, p), (1, q)]);
        let lhs_add = a.add(&b).unwrap().substitute(&bind).unwrap();
        let rhs_add = a.substitute(&bind).unwrap().add(&b.substitute(&bind).unwrap()).unwrap();
        prop_assert_eq!(lhs_add, rhs_add);
        let lhs_mul = a.mul(&b).unwrap().substitute(&bind).unwrap();
        let rhs_mul = a.substitute(&bind).unwrap().mul(&b.substitute(&bind).unwrap()).unwrap();
        prop_assert_eq!(lhs_mul, rhs_mul);
    }

    #[test]
    fn truncation_is_coherent(ra in raw_terms(), rb in raw_terms()) {
        let ctx = ctx2();
        let a = build(&ctx, &ra, false);
        let b = build(&ctx, &rb, false);
        let prod = a.mul(&b).unwrap().truncate_to(rat_int(3)).unwrap();
        let trunc = a
            .truncate_to(rat_int(3))
            .unwrap()
            .mul(&b.truncate_to(rat_int(3)).unwrap())
            .unwrap();
        prop_assert_eq!(prod, trunc);
    }

    #[test]
    fn reversion_composes_to_identity(rm in raw_terms()) {
        // f = q (1 + m(q)) in one variable; its reversion g satisfies
        // f(g) = q to the cutoff.
        let ctx = SeriesContext::unit_weights(&["q"], rat_int(5));
        let q = TruncatedSeries::variable(ctx.clone(), 0).unwrap();
        let mut m = TruncatedSeries::zero(ctx.clone());
        for ((a, _), (n, d)) in &rm {
            if *a == 0 {
                continue;
            }
            let t = TruncatedSeries::monomial(ctx.clone(), vec![*a], rat(*n, *d)).unwrap();
            m = m.add(&t).unwrap();
        }
        let f = q.mul(&TruncatedSeries::one(ctx.clone()).add(&m).unwrap()).unwrap();
        let g = discpot::reverse_family(std::slice::from_ref(&f)).unwrap();
        let bind = std::collections::BTreeMap::from([(0, g[0].clone())]);
        let composed = f.substitute(&bind).unwrap();
        prop_assert_eq!(composed, q);
    }
}

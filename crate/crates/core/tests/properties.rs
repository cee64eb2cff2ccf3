mod common;

use common::*;
use itertools::Itertools;
use proptest::prelude::*;
use quatfact::bi_factor::{algorithm1, algorithm2, enumerate, equivalent, prepare, verify, Context};
use quatfact::real_poly::RealPoly;
use quatfact::{LinearFactor, QuatPoly, Quaternion, Var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumeration_recovers_a_seed_factorization(seed in any::<u64>(), nt in 1usize..=3, ns in 1usize..=3) {
        let seed_f = random_factorization(&mut rng(seed), nt, ns);
        let q = seed_f.product();
        let ctx = Context::default();
        let prep = prepare(&q, &ctx).unwrap();
        prop_assume!(prep.real.is_empty());
        let report = enumerate(&q, &[Var::S, Var::T], &ctx).unwrap();
        let found = report
            .entries
            .iter()
            .filter(|e| e.k_is_one)
            .any(|e| equivalent(&e.factorization, &seed_f, &ctx.tol).unwrap_or(false));
        prop_assert!(found);
    }

    #[test]
    fn every_order_verifies_and_keeps_norms(seed in any::<u64>(), nt in 1usize..=3, ns in 1usize..=3) {
        let q = random_factorization(&mut rng(seed), nt, ns).product();
        let ctx = Context::default();
        let prep = prepare(&q, &ctx).unwrap();
        prop_assume!(prep.real.is_empty());
        let n = prep.s_tuple.len();
        for perm in (0..n).permutations(n) {
            let order = prep.s_tuple.permuted(&perm).unwrap();
            let f = algorithm2(&q, &order.factors, &ctx).unwrap();
            prop_assert!(verify(&q, &f) <= 1e-8);
            let tol = ctx.tol.structural();
            let lhs = f.product().norm_poly(tol).unwrap();
            let rhs = q.mul_real(&f.k).norm_poly(tol).unwrap();
            prop_assert!(lhs.max_diff(&rhs) <= 1e-8 * rhs.max_abs().max(1.0));
        }
    }

    #[test]
    fn splitting_consumes_norms_in_order(seed in any::<u64>(), nt in 1usize..=4) {
        use rand::Rng;
        let mut r = rng(seed);
        let mut f = random_factorization(&mut r, nt, 1);
        f.factors.sort_by_key(|l| l.var == Var::S);
        f.factors.rotate_right(r.gen_range(0..=nt));
        let q = f.product();
        let ctx = Context::default();
        let norms: Vec<RealPoly> = f.factors_in(Var::T).map(LinearFactor::norm_poly).collect();
        for perm in (0..nt).permutations(nt) {
            let order: Vec<RealPoly> = perm.iter().map(|&k| norms[k].clone()).collect();
            let split = algorithm1(&q, &order, &ctx.tol).unwrap();
            prop_assert_eq!(split.left.len() + split.right.len(), nt);
            prop_assert_eq!(split.extracted.len(), nt);
            for (x, m) in split.extracted.iter().zip(&order) {
                prop_assert!(x.norm_poly().approx_eq(m, 1e-9));
            }
            prop_assert!(split.product().max_diff(&q) <= 1e-9 * q.max_abs());
        }
    }

    #[test]
    fn remainder_keeps_the_left_factor(seed in any::<u64>(), na in 0usize..=2, nb in 1usize..=3) {
        use rand::Rng;
        let mut r = rng(seed);
        let a: Vec<LinearFactor> = (0..na).map(|_| LinearFactor::t(random_quaternion(&mut r, 2.0))).collect();
        let h = random_quaternion(&mut r, 2.0);
        let ns = r.gen_range(0..=2);
        let b = random_factorization(&mut r, nb, ns).product();
        let mut left: Vec<QuatPoly> = a.iter().map(LinearFactor::poly).collect();
        left.push(LinearFactor::s(h).poly());
        let q = QuatPoly::product(&left).mul(&b);
        let m = LinearFactor::s(h).norm_poly();
        let (_, mut rem) = q.divrem_real(&m).unwrap();
        let scale = rem.max_abs();
        for f in a.iter().chain(std::iter::once(&LinearFactor::s(h))) {
            let (quot, r0) = rem.div_left_linear(f.var, f.h);
            prop_assert!(r0.max_abs() <= 1e-9 * scale);
            rem = quot;
        }
        prop_assert_eq!(rem.deg_s(), 0);
    }
}

#[test]
fn perturbed_factor_is_detected() {
    let (q, mut f) = {
        let f = factorization(REMARKABLE);
        (f.product(), f)
    };
    assert!(verify(&q, &f) <= 1e-15);
    f.factors[2].h += Quaternion::real(0.01);
    assert!(verify(&q, &f) >= 1e-3);
}

#[test]
fn empty_factorization_of_one() {
    let f = quatfact::Factorization::plain(Quaternion::ONE, vec![]);
    assert_eq!(verify(&QuatPoly::one(), &f), 0.0);
}

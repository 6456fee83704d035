use std::sync::Arc;

use polyalg::algebra::{enumerate_characters, Character, FiniteBanachAlgebra};
use polyalg::poly::{
    absorb_weights, compose_character, eval_form, leibniz_expand, leibniz_residual,
    multiply_by_constant, polarize, product_power_sums, unity_decomposition, CMatrix, PowerSumRep,
    Term,
};
use polyalg::random;
use polyalg::search::stream_rng;
use polyalg::space::{FiniteSpace, NormSpec};
use polyalg::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_gap(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn alg_scale(p: &PowerSumRep) -> f64 {
    p.algebra().structure_scale()
}

fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn random_power_sum_matches_polarized_form() {
    let mut rng = stream_rng(11, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 3, 3);
    let t = polarize(&p).unwrap();
    for _ in 0..20 {
        let x = random::vector(&mut rng, 2);
        let direct = p.eval(&x).unwrap();
        let via_form = eval_form(&t, &[&x, &x, &x]).unwrap();
        assert!(max_gap(&direct, &via_form) <= 1e-10 * p.evaluation_scale(&x).max(1.0));
    }
}

#[test]
fn linear_form_is_operator_action() {
    let space = FiniteSpace::new(2, NormSpec::P(1.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let m = CMatrix::from_rows(vec![
        vec![c(1.0, 0.0), c(2.0, 0.0)],
        vec![c(0.0, 1.0), c(-1.0, 0.0)],
    ])
    .unwrap();
    let p = PowerSumRep::new(space, alg, 1, vec![Term::unweighted(m.clone())]).unwrap();
    let t = polarize(&p).unwrap();
    let x = [c(0.5, 0.5), c(-1.0, 2.0)];
    assert!(max_gap(&eval_form(&t, &[&x]).unwrap(), &m.apply(&x)) < 1e-14);
}

#[test]
fn square_polarizes_to_product() {
    let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
    let p = PowerSumRep::nuclear(space, 2, vec![(c(1.0, 0.0), vec![c(1.0, 0.0)])]).unwrap();
    let t = polarize(&p).unwrap();
    let (x, y) = ([c(3.0, 0.0)], [c(-2.0, 1.0)]);
    let v = eval_form(&t, &[&x, &y]).unwrap()[0];
    assert!((v - x[0] * y[0]).norm() < 1e-14);
    let w = eval_form(&t, &[&y, &x]).unwrap()[0];
    assert_eq!(v, w);
}

#[test]
fn leibniz_binomial_square() {
    let mut rng = stream_rng(3, 0);
    let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::P(2.0)).unwrap());
    let t = polarize(&random::power_sum(&mut rng, &space, &alg, 2, 2)).unwrap();
    let x = random::vector(&mut rng, 2);
    let y = random::vector(&mut rng, 2);
    let parts = leibniz_expand(&t, &x, &y).unwrap();
    assert_eq!(
        parts.iter().map(|(w, _)| *w).collect::<Vec<_>>(),
        vec![1, 2, 1]
    );
    // k = 0 is T(y, y), k = 2 is T(x, x)
    assert!(max_gap(&parts[0].1, &eval_form(&t, &[&y, &y]).unwrap()) < 1e-14);
    assert!(max_gap(&parts[2].1, &eval_form(&t, &[&x, &x]).unwrap()) < 1e-14);
    assert!(leibniz_residual(&t, &x, &y).unwrap() < 1e-12);
}

#[test]
fn leibniz_zero_argument_keeps_top_term_only() {
    let mut rng = stream_rng(4, 0);
    let space = FiniteSpace::new(3, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let t = polarize(&random::power_sum(&mut rng, &space, &alg, 3, 2)).unwrap();
    let x = random::vector(&mut rng, 3);
    let zero = vec![c(0.0, 0.0); 3];
    let parts = leibniz_expand(&t, &x, &zero).unwrap();
    for (k, (_, v)) in parts.iter().enumerate() {
        if k < 3 {
            assert!(v.iter().all(|z| *z == c(0.0, 0.0)), "k = {k}");
        }
    }
    assert!(max_gap(&parts[3].1, &t.eval_diagonal(&x).unwrap()) < 1e-12);
}

#[test]
fn product_of_two_linear_terms() {
    let mut rng = stream_rng(5, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let s = random::power_sum(&mut rng, &space, &alg, 1, 1);
    let t = random::power_sum(&mut rng, &space, &alg, 1, 1);
    let r = product_power_sums(&s, &t).unwrap();
    assert_eq!(r.terms().len(), 4);
    for _ in 0..20 {
        let x = random::vector(&mut rng, 2);
        let want = alg.mul(&s.eval(&x).unwrap(), &t.eval(&x).unwrap()).unwrap();
        assert!(max_gap(&r.eval(&x).unwrap(), &want) < 1e-12);
    }
}

#[test]
fn product_random_degrees_two_and_one() {
    let mut rng = stream_rng(6, 0);
    let space = FiniteSpace::new(2, NormSpec::P(3.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::P(2.0)).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 2, 2);
    let q = random::power_sum(&mut rng, &space, &alg, 1, 3);
    let r = product_power_sums(&p, &q).unwrap();
    assert_eq!(r.terms().len(), 2 * 3 * 8);
    for _ in 0..100 {
        let x = random::vector(&mut rng, 2);
        let want = alg.mul(&p.eval(&x).unwrap(), &q.eval(&x).unwrap()).unwrap();
        let scale = r.evaluation_scale(&x) + p.evaluation_scale(&x) * q.evaluation_scale(&x);
        assert!(max_gap(&r.eval(&x).unwrap(), &want) <= 1e-10 * scale.max(1.0));
    }
}

#[test]
fn unity_decomposition_for_square() {
    let alg = FiniteBanachAlgebra::pointwise(3, NormSpec::Sup).unwrap();
    let b = [c(0.3, -1.0), c(2.0, 0.5), c(-1.0, 0.0)];
    let parts = unity_decomposition(&alg, &b, 2).unwrap();
    let mut sum = alg.zero();
    for p in &parts {
        for (s, v) in sum.iter_mut().zip(alg.pow(p, 2)) {
            *s += v;
        }
    }
    assert!(max_gap(&sum, &b) < 1e-14);
}

#[test]
fn unity_decomposition_cube_example() {
    let alg = FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap();
    let b = [c(2.0, 0.0), c(-1.0, 0.0)];
    let parts = unity_decomposition(&alg, &b, 3).unwrap();
    assert_eq!(parts.len(), 3);
    let mut sum = alg.zero();
    for p in &parts {
        for (s, v) in sum.iter_mut().zip(alg.pow(p, 3)) {
            *s += v;
        }
    }
    assert!(max_gap(&sum, &b) < 1e-12);
}

#[test]
fn multiply_by_constant_linear_case_bypasses_decomposition() {
    let mut rng = stream_rng(7, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(random::lourenco_algebra(&mut rng, 3));
    let p = random::power_sum(&mut rng, &space, &alg, 1, 2);
    let b = random::vector(&mut rng, 3);
    let r = multiply_by_constant(&p, &b).unwrap();
    assert_eq!(r.terms().len(), p.terms().len());
    let x = random::vector(&mut rng, 2);
    let want = alg.mul(&p.eval(&x).unwrap(), &b).unwrap();
    assert!(max_gap(&r.eval(&x).unwrap(), &want) < 1e-12);
}

#[test]
fn compose_identity_character_on_scalars() {
    let mut rng = stream_rng(8, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::scalar());
    let p = random::power_sum(&mut rng, &space, &alg, 3, 2);
    let q = compose_character(&Character::new(vec![c(1.0, 0.0)]), &p).unwrap();
    assert_eq!(q, p);
}

#[test]
fn compose_coordinate_character_takes_first_row() {
    let mut rng = stream_rng(9, 0);
    let space = FiniteSpace::new(3, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 2, 1);
    let phi = Character::new(alg.basis(0));
    let q = compose_character(&phi, &p).unwrap();
    assert_eq!(q.terms()[0].matrix.row(0), p.terms()[0].matrix.row(0));
    for _ in 0..100 {
        let x = random::vector(&mut rng, 3);
        assert!((q.eval(&x).unwrap()[0] - phi.apply(&p.eval(&x).unwrap())).norm() < 1e-12);
    }
}

#[test]
fn compose_with_lourenco_character() {
    let mut rng = stream_rng(10, 0);
    let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
    let alg = Arc::new(random::lourenco_algebra(&mut rng, 3));
    let phi = enumerate_characters(&alg).unwrap().remove(0);
    let p = random::power_sum(&mut rng, &space, &alg, 3, 2);
    let q = compose_character(&phi, &p).unwrap();
    let x = random::vector(&mut rng, 2);
    assert!((q.eval(&x).unwrap()[0] - phi.apply(&p.eval(&x).unwrap())).norm() < 1e-10);
}

#[test]
fn absorb_examples() {
    let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
    let p = PowerSumRep::nuclear(
        space,
        2,
        vec![
            (c(4.0, 0.0), vec![c(1.5, 0.0)]),
            (c(-1.0, 0.0), vec![c(1.0, 0.0)]),
        ],
    )
    .unwrap();
    let a = absorb_weights(&p);
    assert!((a.terms()[0].matrix.get(0, 0) - c(3.0, 0.0)).norm() < 1e-15);
    assert!((a.terms()[1].matrix.get(0, 0) - c(0.0, 1.0)).norm() < 1e-15);
}

fn instance(seed: u64) -> (PowerSumRep, rand_chacha::ChaCha8Rng) {
    let mut rng = stream_rng(seed, 0);
    let space = random::space(&mut rng, 4);
    let alg = Arc::new(random::algebra(&mut rng, 3));
    let n = rand::Rng::random_range(&mut rng, 1..=4);
    let terms = rand::Rng::random_range(&mut rng, 1..=3);
    (random::power_sum(&mut rng, &space, &alg, n, terms), rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polarization_round_trip(seed in any::<u64>()) {
        let (p, mut rng) = instance(seed);
        let t = polarize(&p).unwrap();
        for _ in 0..10 {
            let x = random::vector(&mut rng, p.space().dim());
            let args: Vec<&[C64]> = vec![&x; p.degree()];
            let lhs = eval_form(&t, &args).unwrap();
            let rhs = p.eval(&x).unwrap();
            prop_assert!(max_gap(&lhs, &rhs) <= 1e-10 * p.evaluation_scale(&x).max(1e-300));
        }
    }

    #[test]
    fn forms_are_symmetric(seed in any::<u64>()) {
        let (p, mut rng) = instance(seed);
        let t = polarize(&p).unwrap();
        let xs: Vec<Vec<C64>> = (0..p.degree()).map(|_| random::vector(&mut rng, p.space().dim())).collect();
        let args: Vec<&[C64]> = xs.iter().map(|v| v.as_slice()).collect();
        let mut rev = args.clone();
        rev.reverse();
        let a = eval_form(&t, &args).unwrap();
        let b = eval_form(&t, &rev).unwrap();
        prop_assert!(max_gap(&a, &b) <= 1e-12 * max_abs(&a).max(1.0));
    }

    #[test]
    fn leibniz_identity(seed in any::<u64>()) {
        let (p, mut rng) = instance(seed);
        let t = polarize(&p).unwrap();
        let x = random::vector(&mut rng, p.space().dim());
        let y = random::vector(&mut rng, p.space().dim());
        let abs: Vec<C64> = x.iter().zip(&y).map(|(a, b)| C64::new(a.norm() + b.norm(), 0.0)).collect();
        let scale = p.evaluation_scale(&abs).max(1e-300);
        prop_assert!(leibniz_residual(&t, &x, &y).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn products_commute_pointwise(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 1);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let p = random::power_sum(&mut rng, &space, &alg, 2, 2);
        let q = random::power_sum(&mut rng, &space, &alg, 1, 2);
        let pq = product_power_sums(&p, &q).unwrap();
        let qp = product_power_sums(&q, &p).unwrap();
        prop_assert_eq!(pq.terms().len(), 2 * 2 * 8);
        let x = random::vector(&mut rng, space.dim());
        let scale = pq.evaluation_scale(&x) + qp.evaluation_scale(&x) + 1e-300;
        prop_assert!(max_gap(&pq.eval(&x).unwrap(), &qp.eval(&x).unwrap()) <= 1e-10 * scale);
    }

    #[test]
    fn multiplying_by_identity_is_neutral(seed in any::<u64>()) {
        let (p, mut rng) = instance(seed);
        let one = p.algebra().identity().to_vec();
        let r = multiply_by_constant(&p, &one).unwrap();
        let x = random::vector(&mut rng, p.space().dim());
        let scale = r.evaluation_scale(&x) + p.evaluation_scale(&x) * alg_scale(&p) + 1e-300;
        prop_assert!(max_gap(&r.eval(&x).unwrap(), &p.eval(&x).unwrap()) <= 1e-10 * scale);
    }

    #[test]
    fn multiply_by_constant_is_pointwise(seed in any::<u64>(), m in 1usize..=5) {
        let mut rng = stream_rng(seed, 2);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let p = random::power_sum(&mut rng, &space, &alg, m, 2);
        let b = random::vector(&mut rng, alg.dim());
        let r = multiply_by_constant(&p, &b).unwrap();
        let x = random::vector(&mut rng, space.dim());
        let want = alg.mul(&p.eval(&x).unwrap(), &b).unwrap();
        let bnorm = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = r.evaluation_scale(&x) + p.evaluation_scale(&x) * bnorm * alg.structure_scale() + 1e-300;
        prop_assert!(max_gap(&r.eval(&x).unwrap(), &want) <= 1e-10 * scale);
    }

    #[test]
    fn characters_distribute_over_products(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let chars = enumerate_characters(&alg).unwrap();
        let phi = &chars[rand::Rng::random_range(&mut rng, 0..chars.len())];
        let p = random::power_sum(&mut rng, &space, &alg, 2, 2);
        let q = random::power_sum(&mut rng, &space, &alg, 1, 2);
        let lhs = compose_character(phi, &product_power_sums(&p, &q).unwrap()).unwrap();
        let fp = compose_character(phi, &p).unwrap();
        let fq = compose_character(phi, &q).unwrap();
        let x = random::vector(&mut rng, space.dim());
        let a = lhs.eval(&x).unwrap()[0];
        let b = fp.eval(&x).unwrap()[0] * fq.eval(&x).unwrap()[0];
        prop_assert!((a - b).norm() <= 1e-9 * (lhs.evaluation_scale(&x) + 1.0));
    }

    #[test]
    fn absorbing_weights_preserves_values(seed in any::<u64>()) {
        let (p, mut rng) = instance(seed);
        let a = absorb_weights(&p);
        prop_assert!(a.terms().iter().all(|t| t.weight == C64::new(1.0, 0.0)));
        let x = random::vector(&mut rng, p.space().dim());
        prop_assert!(max_gap(&a.eval(&x).unwrap(), &p.eval(&x).unwrap()) <= 1e-12 * p.evaluation_scale(&x).max(1.0));
    }
}

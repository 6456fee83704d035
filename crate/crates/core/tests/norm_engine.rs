use std::sync::Arc;

use polyalg::algebra::FiniteBanachAlgebra;
use polyalg::norms::{
    check_growth_bound, injective_tensor_norm, nuclear_norm_upper, operator_norm,
    operator_norm_upper, sup_norm_unit_ball, sup_norm_unit_ball_with_hints, uniform_norm_on_k,
    BallTarget, CompactSet,
};
use polyalg::poly::{
    absorb_weights, polarize, product_power_sums, CMatrix, LinearOperator, PowerSumRep,
};
use polyalg::random;
use polyalg::search::{stream_rng, SearchBudget};
use polyalg::space::{FiniteSpace, NormSpec};
use polyalg::tensor::TensorElement;
use polyalg::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn budget(seed: u64) -> SearchBudget {
    SearchBudget::new(4096, 200, seed)
}

#[test]
fn constant_one_has_unit_uniform_norm() {
    let mut rng = stream_rng(1, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(3, NormSpec::Sup).unwrap());
    let one = PowerSumRep::constant(space.clone(), alg.clone(), alg.identity().to_vec()).unwrap();
    let k = random::compact(&mut rng, &space, 10, 2.0);
    assert_eq!(uniform_norm_on_k(&one, &k).unwrap(), 1.0);
}

#[test]
fn uniform_norm_matches_brute_force() {
    let mut rng = stream_rng(2, 0);
    let space = FiniteSpace::new(3, NormSpec::P(1.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::P(2.0)).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 3, 3);
    let k = random::compact(&mut rng, &space, 200, 1.0);
    let mut brute: f64 = 0.0;
    for x in k.points() {
        let v = p.eval(x).unwrap();
        brute = brute.max(v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    assert!((uniform_norm_on_k(&p, &k).unwrap() - brute).abs() <= 1e-14 * brute);
}

#[test]
fn first_coordinate_squared_on_sup_ball() {
    let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
    let p = PowerSumRep::nuclear(
        space,
        2,
        vec![(c(1.0, 0.0), vec![c(1.0, 0.0), c(0.0, 0.0)])],
    )
    .unwrap();
    let est = sup_norm_unit_ball(BallTarget::Polynomial(&p), &budget(3));
    assert!((est.value - 1.0).abs() <= 1e-6);
}

#[test]
fn power_of_functional_attains_dual_norm_power() {
    for (norm, seed) in [
        (NormSpec::P(1.0), 1),
        (NormSpec::P(2.0), 2),
        (NormSpec::P(3.0), 3),
        (NormSpec::Sup, 4),
    ] {
        let mut rng = stream_rng(seed, 0);
        let space = FiniteSpace::new(3, norm.clone()).unwrap();
        let psi = random::vector(&mut rng, 3);
        let dual = norm.dual_norm(&psi);
        for n in 1..=3 {
            let p =
                PowerSumRep::nuclear(space.clone(), n, vec![(c(1.0, 0.0), psi.clone())]).unwrap();
            let est = sup_norm_unit_ball(BallTarget::Polynomial(&p), &budget(seed));
            assert!(
                (est.value - dual.powi(n as i32)).abs() <= 1e-6,
                "{norm:?} n={n}: {}",
                est.value
            );
        }
    }
}

#[test]
fn product_of_coordinates_on_euclidean_ball() {
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let x1 = PowerSumRep::nuclear(
        space.clone(),
        1,
        vec![(c(1.0, 0.0), vec![c(1.0, 0.0), c(0.0, 0.0)])],
    )
    .unwrap();
    let x2 = PowerSumRep::nuclear(
        space,
        1,
        vec![(c(1.0, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0)])],
    )
    .unwrap();
    let p = product_power_sums(&x1, &x2).unwrap();
    let est = sup_norm_unit_ball(BallTarget::Polynomial(&p), &budget(5));
    assert!((est.value - 0.5).abs() <= 1e-5, "{}", est.value);
}

#[test]
fn witness_attains_reported_value() {
    let mut rng = stream_rng(6, 0);
    let space = FiniteSpace::new(3, NormSpec::P(3.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::P(1.0)).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 2, 2);
    let est = sup_norm_unit_ball(BallTarget::Polynomial(&p), &budget(6));
    let w = &est.witness[0];
    assert!((space.norm(w) - 1.0).abs() <= 1e-9);
    assert!((alg.norm(&p.eval(w).unwrap()) - est.value).abs() <= 1e-9);
}

#[test]
fn identity_operator_on_scalars() {
    let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
    let op = LinearOperator::new(
        CMatrix::identity(1),
        space,
        Arc::new(FiniteBanachAlgebra::scalar()),
    )
    .unwrap();
    assert!((operator_norm(&op, &budget(0)).value - 1.0).abs() < 1e-12);
}

#[test]
fn diagonal_operator_sup_to_sup() {
    let space = FiniteSpace::new(2, NormSpec::Sup).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let m = CMatrix::from_rows(vec![
        vec![c(2.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(3.0, 0.0)],
    ])
    .unwrap();
    let op = LinearOperator::new(m, space, alg).unwrap();
    assert!((operator_norm(&op, &budget(0)).value - 3.0).abs() <= 1e-6);
    assert!((operator_norm_upper(&op) - 3.0).abs() <= 1e-9);
}

#[test]
fn rank_one_operator_factorizes() {
    let mut rng = stream_rng(7, 0);
    for (src, dst) in [
        (NormSpec::P(2.0), NormSpec::P(2.0)),
        (NormSpec::P(1.0), NormSpec::Sup),
        (NormSpec::P(3.0), NormSpec::P(1.0)),
        (NormSpec::Sup, NormSpec::P(3.0)),
    ] {
        let space = FiniteSpace::new(3, src.clone()).unwrap();
        let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, dst.clone()).unwrap());
        let a = random::vector(&mut rng, 2);
        let psi = random::vector(&mut rng, 3);
        let want = dst.norm(&a) * src.dual_norm(&psi);
        let op = LinearOperator::new(CMatrix::outer(&a, &psi), space, alg).unwrap();
        let est = operator_norm(&op, &budget(7));
        assert!(
            (est.value - want).abs() <= 1e-6 * want.max(1.0),
            "{src:?}->{dst:?}: {} vs {want}",
            est.value
        );
    }
}

#[test]
fn nuclear_upper_of_single_term() {
    let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
    let p = PowerSumRep::nuclear(space, 3, vec![(c(1.0, 0.0), vec![c(2.0, 0.0)])]).unwrap();
    assert!((nuclear_norm_upper(&p) - 8.0).abs() <= 1e-12);
}

#[test]
fn nuclear_upper_unchanged_by_absorbing_weights() {
    let mut rng = stream_rng(8, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::Sup).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 3, 3);
    let a = nuclear_norm_upper(&p);
    let b = nuclear_norm_upper(&absorb_weights(&p));
    assert!((a - b).abs() <= 1e-9 * a.max(1.0));
}

#[test]
fn square_on_disk_points() {
    let space = FiniteSpace::new(1, NormSpec::P(2.0)).unwrap();
    let p = PowerSumRep::nuclear(space.clone(), 2, vec![(c(1.0, 0.0), vec![c(1.0, 0.0)])]).unwrap();
    let k = CompactSet::new(
        space,
        vec![vec![c(1.0, 0.0)], vec![c(0.0, 0.5)], vec![c(-0.3, 0.2)]],
    )
    .unwrap();
    let r = check_growth_bound(&p, &k).unwrap();
    assert!(r.satisfied);
    assert!(r.lhs <= 1.0);
    assert!((r.rhs - 1.0).abs() < 1e-12);
    let r2 = check_growth_bound(&p, &k.scaled(2.0)).unwrap();
    assert!((r2.rhs - 4.0 * r.rhs).abs() < 1e-12);
}

#[test]
fn injective_norm_of_elementary_tensors() {
    let mut rng = stream_rng(9, 0);
    let space = FiniteSpace::new(2, NormSpec::P(2.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::P(2.0)).unwrap());
    let k = random::compact(&mut rng, &space, 30, 1.0);
    let f = random::power_sum(
        &mut rng,
        &space,
        &Arc::new(FiniteBanachAlgebra::scalar()),
        2,
        2,
    );
    let t = TensorElement::new(
        space.clone(),
        alg.clone(),
        vec![(f.clone(), alg.identity().to_vec())],
    )
    .unwrap();
    let want = uniform_norm_on_k(&f, &k).unwrap() * alg.norm(alg.identity());
    assert!(
        (injective_tensor_norm(&t, &k, &budget(9)).unwrap().value - want).abs()
            <= 2e-6 * want.max(1.0)
    );

    let a = random::vector(&mut rng, 2);
    let one = PowerSumRep::constant(
        space.clone(),
        Arc::new(FiniteBanachAlgebra::scalar()),
        vec![c(1.0, 0.0)],
    )
    .unwrap();
    let t = TensorElement::new(space, alg.clone(), vec![(one, a.clone())]).unwrap();
    let est = injective_tensor_norm(&t, &k, &budget(10)).unwrap();
    assert!((est.value - alg.norm(&a)).abs() <= 1e-6);
}

#[test]
fn estimates_are_deterministic() {
    let mut rng = stream_rng(11, 0);
    let space = FiniteSpace::new(3, NormSpec::P(3.0)).unwrap();
    let alg = Arc::new(random::lourenco_algebra(&mut rng, 3));
    let p = random::power_sum(&mut rng, &space, &alg, 2, 3);
    let a = sup_norm_unit_ball(BallTarget::Polynomial(&p), &SearchBudget::new(512, 50, 77));
    let b = sup_norm_unit_ball(BallTarget::Polynomial(&p), &SearchBudget::new(512, 50, 77));
    assert_eq!(a, b);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

#[test]
fn more_samples_never_lower_the_estimate() {
    let mut rng = stream_rng(12, 0);
    let space = FiniteSpace::new(3, NormSpec::P(1.0)).unwrap();
    let alg = Arc::new(FiniteBanachAlgebra::pointwise(2, NormSpec::P(2.0)).unwrap());
    let p = random::power_sum(&mut rng, &space, &alg, 3, 3);
    let mut last = 0.0;
    for samples in [16, 64, 256, 1024] {
        let v = sup_norm_unit_ball(
            BallTarget::Polynomial(&p),
            &SearchBudget::new(samples, 40, 5),
        )
        .value;
        assert!(v >= last, "{samples}: {v} < {last}");
        last = v;
    }
}

fn sandwich_instance(seed: u64, n: usize) -> PowerSumRep {
    let mut rng = stream_rng(seed, n as u64);
    let space = random::space(&mut rng, 3);
    let alg = Arc::new(random::algebra(&mut rng, 2));
    random::power_sum(&mut rng, &space, &alg, n, 2)
}

#[test]
fn polarization_sandwich_low_degrees() {
    for n in 1..=3usize {
        let factor = (n as f64).powi(n as i32) / (1..=n).product::<usize>() as f64;
        for seed in 0..4 {
            let p = sandwich_instance(seed, n);
            let b = budget(seed);
            let pn = sup_norm_unit_ball(BallTarget::Polynomial(&p), &b);
            let t = polarize(&p).unwrap();
            let hint = vec![pn.witness[0].clone(); n];
            let tn = sup_norm_unit_ball_with_hints(BallTarget::Form(&t), &b, &[hint]);
            assert!(
                pn.value <= tn.value + 2e-5,
                "n={n} seed={seed}: {} > {}",
                pn.value,
                tn.value
            );
            assert!(tn.value <= factor * pn.value + 2e-5, "n={n} seed={seed}");
            assert!(pn.value <= nuclear_norm_upper(&p) + 2e-5);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn growth_bound_holds(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let n = rand::Rng::random_range(&mut rng, 0..=4);
        let p = random::power_sum(&mut rng, &space, &alg, n, 3);
        let radius = rand::Rng::random_range(&mut rng, 0.1..3.0);
        let k = random::compact(&mut rng, &space, 20, radius);
        let r = check_growth_bound(&p, &k).unwrap();
        prop_assert!(r.satisfied, "{} > {}", r.lhs, r.rhs);
    }

    #[test]
    fn unit_ball_norm_below_nuclear_upper(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 1);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 2));
        let n = rand::Rng::random_range(&mut rng, 1..=3);
        let p = random::power_sum(&mut rng, &space, &alg, n, 2);
        let est = sup_norm_unit_ball(BallTarget::Polynomial(&p), &SearchBudget::new(256, 20, seed));
        prop_assert!(est.value <= nuclear_norm_upper(&p) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn operator_estimate_below_certified_upper(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 2);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let m = random::matrix(&mut rng, alg.dim(), space.dim());
        let op = LinearOperator::new(m, space, alg).unwrap();
        let low = operator_norm(&op, &SearchBudget::new(256, 20, seed)).value;
        prop_assert!(low <= operator_norm_upper(&op) * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn injective_norm_is_uniform_norm(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let space = random::space(&mut rng, 2);
        let alg = Arc::new(random::pointwise_algebra(&mut rng, 3));
        let scalar = Arc::new(FiniteBanachAlgebra::scalar());
        let pairs = (0..3)
            .map(|_| {
                let n = rand::Rng::random_range(&mut rng, 0..=2);
                (random::power_sum(&mut rng, &space, &scalar, n, 2), random::vector(&mut rng, alg.dim()))
            })
            .collect();
        let t = TensorElement::new(space.clone(), alg, pairs).unwrap();
        let k = random::compact(&mut rng, &space, 20, 1.0);
        let want = uniform_norm_on_k(&t, &k).unwrap();
        let got = injective_tensor_norm(&t, &k, &SearchBudget::new(1024, 100, seed)).unwrap().value;
        prop_assert!((got - want).abs() <= 2e-6 * want.max(1.0), "{got} vs {want}");
    }
}

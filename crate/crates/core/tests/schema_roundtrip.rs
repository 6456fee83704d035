use std::sync::Arc;

use polyalg::algebra::{enumerate_characters, FiniteBanachAlgebra};
use polyalg::poly::PolynomialSum;
use polyalg::random;
use polyalg::schema::{
    from_json, to_canonical_json, AlgebraDoc, CharacterDoc, NormDoc, PointsDoc, PolynomialDoc,
    PolynomialSumDoc, SpaceDoc, TensorDoc,
};
use polyalg::search::stream_rng;
use polyalg::tensor::TensorElement;
use polyalg::C64;
use proptest::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// `text → doc → text` is the identity on canonical text and
/// `doc → text → doc` is the identity on documents.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(doc: &T) -> T {
    let text = to_canonical_json(doc).unwrap();
    let back: T = from_json(&text).unwrap();
    assert_eq!(&back, doc);
    assert_eq!(to_canonical_json(&back).unwrap(), text);
    back
}

#[test]
fn example_documents_parse() {
    let p: PolynomialDoc = from_json(
        r#"{"degree": 2, "terms": [{"weight": [1.0, 0.0], "matrix": [[[1.0, 0.0]]]}],
            "space": {"dim": 1, "norm": {"kind": "p", "p": 2.0}}}"#,
    )
    .unwrap();
    let p = p.to_power_sum_inline().unwrap();
    assert_eq!(
        p.eval(&[C64::new(3.0, 0.0)]).unwrap(),
        vec![C64::new(9.0, 0.0)]
    );

    let a: AlgebraDoc = from_json(
        r#"{"kind": "lourenco", "space": {"dim": 2, "norm": {"kind": "sup"}},
            "psi": [[1.0, 0.0], [0.5, 0.0]], "unit": [[1.0, 0.0], [0.0, 0.0]]}"#,
    )
    .unwrap();
    assert_eq!(a.to_algebra().unwrap().dim(), 2);
    assert!(from_json::<NormDoc>(r#"{"kind": "q"}"#).is_err());
    assert!(from_json::<SpaceDoc>(r#"{"dim": 2, "norm": {"kind": "sup"}, "extra": 1}"#).is_err());
}

#[test]
fn complex_numbers_are_pairs() {
    let doc = CharacterDoc {
        functional: vec![C64::new(1.5, -0.25)],
    };
    let text = to_canonical_json(&doc).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["functional"][0], serde_json::json!([1.5, -0.25]));
}

#[test]
fn floats_survive_exactly() {
    let doc = CharacterDoc {
        functional: vec![
            C64::new(0.1 + 0.2, 1.0 / 3.0),
            C64::new(f64::MIN_POSITIVE, -1e300),
        ],
    };
    let back = round_trip(&doc);
    for (a, b) in doc.functional.iter().zip(&back.functional) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn algebras_round_trip(seed in any::<u64>()) {
        let alg = random::algebra(&mut stream_rng(seed, 0), 4);
        let doc = round_trip(&AlgebraDoc::from_algebra(&alg));
        let rebuilt = doc.to_algebra().unwrap();
        prop_assert_eq!(rebuilt.structure_tensor(), alg.structure_tensor());
        prop_assert_eq!(rebuilt.identity(), alg.identity());
        prop_assert_eq!(rebuilt.norm_spec(), alg.norm_spec());
    }

    #[test]
    fn power_sums_round_trip(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 1);
        let space = random::space(&mut rng, 4);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let n = rand::Rng::random_range(&mut rng, 0..=4);
        let p = random::power_sum(&mut rng, &space, &alg, n, 3);
        let doc = round_trip(&PolynomialDoc::from_power_sum_inline(&p));
        let q = doc.to_power_sum_inline().unwrap();
        prop_assert_eq!(q.terms(), p.terms());
        prop_assert_eq!(q.constant_value(), p.constant_value());
        prop_assert_eq!(q.space(), p.space());
    }

    #[test]
    fn polynomial_sums_round_trip(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 2);
        let space = random::space(&mut rng, 3);
        let alg = Arc::new(random::algebra(&mut rng, 3));
        let parts = (0..=2).map(|n| random::power_sum(&mut rng, &space, &alg, n, 2)).collect();
        let p = PolynomialSum::new(space.clone(), alg.clone(), parts).unwrap();
        let doc = round_trip(&PolynomialSumDoc::from_sum(&p));
        prop_assert_eq!(doc.to_sum(&space, &alg).unwrap(), p);
    }

    #[test]
    fn points_and_tensors_round_trip(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let space = random::space(&mut rng, 3);
        let k = random::compact(&mut rng, &space, 5, 2.0);
        let doc = round_trip(&PointsDoc::from_compact(&k));
        let rebuilt = doc.to_compact(&space).unwrap();
        prop_assert_eq!(rebuilt.points(), k.points());

        let alg = Arc::new(random::algebra(&mut rng, 3));
        let scalar = Arc::new(FiniteBanachAlgebra::scalar());
        let pairs = (0..3)
            .map(|n| (random::power_sum(&mut rng, &space, &scalar, n, 1), random::vector(&mut rng, alg.dim())))
            .collect();
        let t = TensorElement::new(space.clone(), alg.clone(), pairs).unwrap();
        let doc = round_trip(&TensorDoc::from_tensor(&t));
        prop_assert_eq!(doc.to_tensor(&space, &alg).unwrap(), t);
    }

    #[test]
    fn spaces_and_characters_round_trip(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 4);
        let space = random::space(&mut rng, 5);
        prop_assert_eq!(round_trip(&SpaceDoc::from_space(&space)).to_space().unwrap(), space);
        let alg = random::algebra(&mut rng, 3);
        for phi in enumerate_characters(&alg).unwrap() {
            round_trip(&CharacterDoc::from(&phi));
        }
    }
}

mod common;

use orbitkit::sampling::{random_matrix, random_unitary};
use orbitkit::{ideal_norm, ky_fan_majorizes, singular_values, NormSpec, RatioReference};
use proptest::prelude::*;

fn specs(len: usize) -> Vec<NormSpec> {
    vec![
        NormSpec::Operator,
        NormSpec::Trace,
        NormSpec::Schatten { p: 1.0 },
        NormSpec::Schatten { p: 1.5 },
        NormSpec::Schatten { p: 2.0 },
        NormSpec::Schatten { p: 7.0 },
        NormSpec::KyFan { k: 1 },
        NormSpec::KyFan { k: 3 },
        NormSpec::ratio(&RatioReference::harmonic(len)),
        NormSpec::ratio(
            &RatioReference::new((1..=len).map(|k| (k as f64).powf(-0.5)).collect()).unwrap(),
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_invariance(seed in any::<u64>(), n in 1usize..16) {
        let mut rng = common::rng(seed);
        let x = random_matrix(&mut rng, n);
        let u = random_unitary(&mut rng, n);
        let v = random_unitary(&mut rng, n);
        let sx = singular_values(&x);
        let sy = singular_values(&(&(&u * &x) * &v));
        for spec in specs(n) {
            let a = ideal_norm(&sx, &spec).unwrap();
            let b = ideal_norm(&sy, &spec).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{spec}: {a} vs {b}");
        }
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), n in 1usize..16) {
        let mut rng = common::rng(seed);
        let x = random_matrix(&mut rng, n);
        let y = random_matrix(&mut rng, n);
        let (sx, sy, sxy) = (singular_values(&x), singular_values(&y), singular_values(&(&x + &y)));
        for spec in specs(n) {
            let lhs = ideal_norm(&sxy, &spec).unwrap();
            let rhs = ideal_norm(&sx, &spec).unwrap() + ideal_norm(&sy, &spec).unwrap();
            prop_assert!(lhs <= rhs + 1e-9, "{spec}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn interleaving(s in prop::collection::vec(0.0f64..10.0, 1..40)) {
        let s = common::sorted_desc(s);
        let op = ideal_norm(&s, &NormSpec::Operator).unwrap();
        let tr = ideal_norm(&s, &NormSpec::Trace).unwrap();
        for spec in specs(s.len()) {
            let v = ideal_norm(&s, &spec).unwrap();
            prop_assert!(op <= v + 1e-9 && v <= tr + 1e-9, "{spec}: {op} {v} {tr}");
        }
    }

    #[test]
    fn majorization_is_monotone(
        sx in prop::collection::vec(0.0f64..5.0, 1..30),
        sy in prop::collection::vec(0.0f64..5.0, 1..30),
    ) {
        let (sx, sy) = (common::sorted_desc(sx), common::sorted_desc(sy));
        let len = sx.len().max(sy.len());
        if ky_fan_majorizes(&sx, &sy).unwrap().dominated {
            for spec in specs(len).into_iter().filter(|s| matches!(s, NormSpec::KyFan { .. } | NormSpec::Ratio { .. })) {
                prop_assert!(ideal_norm(&sx, &spec).unwrap() <= ideal_norm(&sy, &spec).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn averaging_is_majorized(s in prop::collection::vec(0.0f64..5.0, 1..30)) {
        // the flat sequence with the same total is dominated by s
        let s = common::sorted_desc(s);
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let flat = vec![mean; s.len()];
        prop_assert!(orbitkit::norms::ky_fan_majorizes_within(&flat, &s, 1e-12).unwrap().dominated);
    }
}

#[test]
fn rank_one_projection_has_norm_one() {
    for spec in specs(12) {
        assert!(
            (ideal_norm(&[1.0], &spec).unwrap() - 1.0).abs() < 1e-15,
            "{spec}"
        );
        assert!(
            (ideal_norm(&[1.0, 0.0, 0.0], &spec).unwrap() - 1.0).abs() < 1e-15,
            "{spec}"
        );
    }
}

#[test]
fn bi_normalizing_inference() {
    assert!(
        RatioReference::new((1..=64).map(|k| 1.0 / k as f64).collect())
            .unwrap()
            .bi_normalizing
    );
    assert!(
        !RatioReference::new((0..64).map(|k| 0.5f64.powi(k)).collect())
            .unwrap()
            .bi_normalizing
    );
    // constant: divergent sum but no decay
    assert!(!RatioReference::new(vec![1.0; 64]).unwrap().bi_normalizing);
}

#[test]
fn spec_strings_round_trip() {
    for text in ["operator", "trace", "schatten:2", "kyfan:3"] {
        let spec: NormSpec = text.parse().unwrap();
        assert_eq!(spec.to_string(), text);
    }
    assert!("schatten:0.5".parse::<NormSpec>().is_err());
    assert!("kyfan:0".parse::<NormSpec>().is_err());
    assert!("bogus".parse::<NormSpec>().is_err());
}

use harcontam::edgeworth::{EdgeworthCdf, EdgeworthForm};
use harcontam::lrv::{ewc, hac, kvb};
use harcontam::montecarlo::{reference_table, ExperimentTable};
use harcontam::rng::replication_seed;
use harcontam::sls_models::{builtin_spec, simulate_path};
use harcontam::spectral::{autocov_all, contamination_term};
use harcontam::{LagKernel, LrvMethod, SlsSpec, TimeSeries};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn model(name: &str) -> SlsSpec {
    builtin_spec(name).unwrap().into_sls().unwrap()
}

fn series(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, min..max)
}

proptest! {
    #[test]
    fn demeaned_autocovariances_sum_to_zero(x in series(2, 300)) {
        let y = TimeSeries::new(x).unwrap();
        let g = autocov_all(&y.demeaned());
        let total = g[0] + 2.0 * g[1..].iter().sum::<f64>();
        prop_assert!(total.abs() <= 1e-9 * g[0].max(1.0), "sum = {total}");
    }

    #[test]
    fn psd_estimators_are_nonnegative(x in series(10, 200), b1 in 0.005f64..1.0, b in 1usize..9) {
        let y = TimeSeries::new(x).unwrap();
        for kernel in [LagKernel::Bartlett, LagKernel::Qs] {
            prop_assert!(hac(&y, kernel, b1, true).unwrap().value >= -1e-10);
        }
        prop_assert!(kvb(&y).unwrap().value >= -1e-10);
        prop_assert!(ewc(&y, b).unwrap().value >= -1e-10);
    }

    #[test]
    fn contamination_is_nonnegative_and_quadratic(
        r in 0.05f64..0.95,
        m1 in -5.0f64..5.0,
        gap in -5.0f64..5.0,
        c in 0.1f64..4.0,
    ) {
        let d = contamination_term(&[r, 1.0 - r], &[m1, m1 + gap]);
        prop_assert!(d >= 0.0);
        prop_assert!((d - r * (1.0 - r) * gap * gap).abs() <= 1e-12 * d.max(1.0));
        let scaled = contamination_term(&[r, 1.0 - r], &[c * m1, c * (m1 + gap)]);
        prop_assert!((scaled - c * c * d).abs() <= 1e-10 * scaled.max(1.0));
    }

    #[test]
    fn edgeworth_is_symmetric(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, b1 in 0.01f64..0.99, b2 in 0.01f64..0.99, z in -8.0f64..8.0) {
        for m in [EdgeworthCdf::hac(c1, b1), EdgeworthCdf::dk(c1, c2, b1, b2)] {
            for form in [EdgeworthForm::Additive, EdgeworthForm::Rescaled] {
                let up = m.evaluate(z, form).value;
                let down = m.evaluate(-z, form).value;
                prop_assert!((up + down - 1.0).abs() < 1e-12, "{up} + {down}");
            }
            prop_assert!((m.evaluate(0.0, EdgeworthForm::Additive).value - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn edgeworth_is_monotone_on_operating_range(a in -0.1f64..0.1, b1 in 0.05f64..0.95) {
        let m = EdgeworthCdf::hac(2.0 * a / (b1 * b1), b1);
        let mut prev = 0.0;
        for i in 0..=2400 {
            let z = -6.0 + i as f64 * 0.005;
            let v = m.evaluate(z, EdgeworthForm::Additive).value;
            prop_assert!(v >= prev - 1e-15, "z = {z}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn edgeworth_forms_agree_to_second_order(a in -0.1f64..0.1, z in -4.0f64..4.0) {
        let m = EdgeworthCdf::hac(2.0 * a / 0.25, 0.5);
        let gap = (m.evaluate(z, EdgeworthForm::Additive).value - m.evaluate(z, EdgeworthForm::Rescaled).value).abs();
        prop_assert!(gap <= 0.5 * a * a + 1e-15, "gap {gap}, a {a}");
    }

    #[test]
    fn replication_seeds_do_not_collide(base in any::<u64>(), r in 0u64..1_000_000) {
        prop_assert_ne!(replication_seed(base, r), replication_seed(base, r + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimators_are_scale_equivariant(seed in any::<u64>(), c in 0.05f64..20.0) {
        let y = simulate_path::<f64>(&model("M2"), 120, seed).unwrap();
        let scaled = y.map(|v| c * v).unwrap();
        for m in LrvMethod::standard_set() {
            let a = m.estimate(&y).unwrap();
            let b = m.estimate(&scaled).unwrap();
            let rel = (b.value - c * c * a.value).abs() / (c * c * a.value);
            prop_assert!(rel < 1e-10, "{}: relative gap {rel}", m.label());
            prop_assert!((a.b1 - b.b1).abs() <= 1e-12 * a.b1, "{}: b1 moved", m.label());
        }
    }

    #[test]
    fn estimators_ignore_location(seed in any::<u64>(), shift in -100.0f64..100.0) {
        let y = simulate_path::<f64>(&model("M1"), 100, seed).unwrap();
        let moved = y.map(|v| v + shift).unwrap();
        for m in LrvMethod::standard_set() {
            let a = m.estimate(&y).unwrap().value;
            let b = m.estimate(&moved).unwrap().value;
            prop_assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "{}: {a} vs {b}", m.label());
        }
    }

    #[test]
    fn simulation_is_a_function_of_the_seed(seed in any::<u64>()) {
        for name in ["M1", "M3", "M4"] {
            let a = simulate_path::<f64>(&model(name), 80, seed).unwrap();
            let b = simulate_path::<f64>(&model(name), 80, seed).unwrap();
            prop_assert_eq!(a.values(), b.values());
            let c = simulate_path::<f64>(&model(name), 80, seed.wrapping_add(1)).unwrap();
            prop_assert_ne!(a.values(), c.values());
        }
    }
}

#[test]
fn zero_correction_is_the_normal_cdf() {
    let n = Normal::new(0.0, 1.0).unwrap();
    let m = EdgeworthCdf::dk(0.0, 0.0, 0.3, 0.2);
    for i in -40..=40 {
        let z = i as f64 * 0.1;
        assert_eq!(m.evaluate(z, EdgeworthForm::Additive).value, n.cdf(z));
    }
}

#[test]
fn spec_json_round_trips() {
    for name in ["M1", "M2", "M3", "M4"] {
        let spec = model(name);
        assert_eq!(SlsSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}

#[test]
fn reference_tables_round_trip_through_csv() {
    for name in ["table2", "table6_1", "table6_4"] {
        let t = reference_table(name).unwrap();
        let back = ExperimentTable::from_csv(&t.to_csv().unwrap(), t.reps).unwrap();
        assert_eq!(back.deltas(), t.deltas());
        assert_eq!(back.methods(), t.methods());
        for m in t.methods() {
            for d in t.deltas() {
                assert_eq!(back.rate(&m, d), t.rate(&m, d));
            }
        }
    }
}

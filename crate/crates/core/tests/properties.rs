//! Randomized invariants.

use depapprox::approximants::{make_approximant, ApproximantKind};
use depapprox::charfn::heinrich_factors;
use depapprox::cumulants::{gamma_set, CumulantSet};
use depapprox::measure::LatticeMeasure;
use depapprox::models::{DependentModel, ModelSpec};
use proptest::prelude::*;

fn measure() -> impl Strategy<Value = LatticeMeasure> {
    (-5i64..5, prop::collection::vec(-1.0f64..1.0, 1..8)).prop_map(|(o, w)| LatticeMeasure::new(o, w))
}

fn pmf() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 1..5).prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_commutative_and_submultiplicative(a in measure(), b in measure()) {
        let ab = a.convolve(&b).unwrap();
        let ba = b.convolve(&a).unwrap();
        prop_assert!(ab.sub(&ba).tv_norm() < 1e-12);
        prop_assert!(ab.tv_norm() <= a.tv_norm() * b.tv_norm() * (1.0 + 1e-12) + 1e-15);
        prop_assert!((ab.total_mass() - a.total_mass() * b.total_mass()).abs() < 1e-12);
    }

    #[test]
    fn fourier_transform_is_multiplicative(a in measure(), b in measure(), t in -3.2f64..3.2) {
        let lhs = a.convolve(&b).unwrap().fourier_at(t);
        let rhs = a.fourier_at(t) * b.fourier_at(t);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn exponential_turns_sums_into_convolutions(a in measure(), b in measure()) {
        let a = a.scale(0.5 / a.tv_norm().max(1e-3));
        let b = b.scale(0.5 / b.tv_norm().max(1e-3));
        let tol = 1e-13;
        let lhs = a.add(&b).exp_measure(tol).unwrap();
        let rhs = a.exp_measure(tol).unwrap().convolve(&b.exp_measure(tol).unwrap()).unwrap();
        prop_assert!(lhs.sub(&rhs).tv_norm() < 1e-11);
    }

    #[test]
    fn two_runs_law_is_a_distribution_with_mean_gamma1(n in 1usize..80, p in 0.01f64..0.99) {
        let m = DependentModel::two_runs(n, p).unwrap();
        let law = m.exact_distribution().unwrap();
        prop_assert!(law.weights().iter().all(|&w| w >= 0.0));
        prop_assert!((law.total_mass() - 1.0).abs() < 1e-12);
        let c = gamma_set(&m).unwrap();
        prop_assert!((law.first_moment() - c.gamma1).abs() < 1e-10);
        prop_assert!((c.gamma1 - n as f64 * p * p).abs() < 1e-10);
        // Γ₂ is half the second factorial cumulant.
        let f2 = law.factorial_moment(2) - c.gamma1 * c.gamma1;
        prop_assert!((f2 / 2.0 - c.gamma2).abs() < 1e-9 * (1.0 + c.gamma2.abs()));
    }

    #[test]
    fn independent_gammas_are_additive(p in pmf(), n in 1usize..30) {
        let single = gamma_set(&DependentModel::independent(vec![p.clone()]).unwrap()).unwrap();
        let spec = ModelSpec::Independent { n: Some(n), pmf: Some(p), pmfs: None };
        let many = gamma_set(&DependentModel::build(&spec).unwrap()).unwrap();
        let nf = n as f64;
        prop_assert!((many.gamma1 - nf * single.gamma1).abs() < 1e-10 * nf);
        prop_assert!((many.gamma2 - nf * single.gamma2).abs() < 1e-10 * nf);
        prop_assert!((many.gamma3 - nf * single.gamma3).abs() < 1e-10 * nf);
    }

    #[test]
    fn grouping_preserves_the_law(n in 4usize..24, k1 in 1usize..3, k2 in 1usize..3, p in 0.05f64..0.95) {
        let raw = DependentModel::build(&ModelSpec::K1k2 { n: n.max(2 * (k1 + k2)), k1, k2, p, grouped: false }).unwrap();
        let grouped = raw.group_blocks(k1 + k2).unwrap();
        prop_assert!(grouped.dependence() <= 1);
        let d = raw.exact_distribution().unwrap().sub(&grouped.exact_distribution().unwrap());
        prop_assert!(d.tv_norm() < 1e-12);
    }

    #[test]
    fn heinrich_product_matches_transform(n in 2usize..40, p in 0.005f64..0.05, t in -3.0f64..3.0) {
        let m = DependentModel::two_runs(n, p).unwrap();
        let f = m.exact_distribution().unwrap().fourier_at(t);
        let fs = heinrich_factors(&m, t, n).unwrap();
        prop_assert!((fs.product() - f).norm() < 1e-10);
        prop_assert!(fs.max_deviation() <= 0.1);
    }

    #[test]
    fn probability_approximants_match_two_cumulants(g1 in 1.0f64..50.0, ratio in 0.01f64..0.07, neg in any::<bool>()) {
        let g2 = if neg { -ratio * g1 } else { ratio * g1 };
        let c = CumulantSet::from_gammas(g1, g2, 0.0);
        let kind = if neg { ApproximantKind::Binomial } else { ApproximantKind::NegBinomial };
        let a = make_approximant(kind, &c, 1e-13).unwrap();
        prop_assert!(a.measure.weights().iter().all(|&w| w >= 0.0));
        prop_assert!((a.measure.total_mass() - 1.0).abs() < 1e-11);
        prop_assert!((a.measure.first_moment() - g1).abs() < 1e-8 * g1);
        if kind == ApproximantKind::NegBinomial {
            let f2 = a.measure.factorial_moment(2) - g1 * g1;
            prop_assert!((f2 / 2.0 - g2).abs() < 1e-8 * g1);
        }
    }

    #[test]
    fn model_specs_round_trip_through_json(n in 1usize..1000, p in 0.0f64..1.0, k1 in 1usize..5, k2 in 1usize..5) {
        for spec in [ModelSpec::TwoRuns { n, p }, ModelSpec::K1k2 { n, k1, k2, p, grouped: n % 2 == 0 }] {
            prop_assert_eq!(ModelSpec::from_json(&spec.to_json()).unwrap(), spec);
        }
    }
}

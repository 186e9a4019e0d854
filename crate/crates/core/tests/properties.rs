use holecov::anisotropy::AnisotropyMatrix;
use holecov::field::{empirical_variogram, SpatialDataset};
use holecov::inference::PairSet;
use holecov::kriging::{split_sample_validate, GaussianSimulator, KrigingSystem};
use holecov::models::IsotropicFamily;
use holecov::specfun::{gauss_2f1, hyper_1f2, omega_d};
use holecov::transforms::{Component, CovarianceModel, ModelKind, Status};
use proptest::prelude::*;
use std::f64::consts::PI;

fn points(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 2), n)
}

fn distinct(pts: &[Vec<f64>]) -> bool {
    pts.iter().enumerate().all(|(i, p)| pts[..i].iter().all(|q| (p[0] - q[0]).abs() + (p[1] - q[1]).abs() > 1e-3))
}

fn family() -> impl Strategy<Value = IsotropicFamily> {
    prop_oneof![
        (0.3..3.0f64).prop_map(IsotropicFamily::matern),
        (0.3..3.0f64).prop_map(IsotropicFamily::cauchy),
        Just(IsotropicFamily::Gaussian),
    ]
}

fn smooth_family() -> impl Strategy<Value = IsotropicFamily> {
    prop_oneof![
        (1.05..3.0f64).prop_map(IsotropicFamily::matern),
        (0.3..3.0f64).prop_map(IsotropicFamily::cauchy),
        Just(IsotropicFamily::Gaussian),
    ]
}

fn spd() -> impl Strategy<Value = AnisotropyMatrix> {
    (0.0..PI, 0.1..3.0f64, 0.1..3.0f64)
        .prop_map(|(angle, s1, s2)| AnisotropyMatrix::from_rotation_scaling(&[angle], &[s1, s2]).unwrap())
}

fn t1_model() -> impl Strategy<Value = CovarianceModel> {
    (family(), spd(), spd(), 0.5..4.0f64, 0.1..1.5f64).prop_map(|(family, a1, a2, b1, b2)| {
        CovarianceModel::new(ModelKind::T1 { family, a1, a2, b1, b2 }).unwrap()
    })
}

fn t3_model() -> impl Strategy<Value = CovarianceModel> {
    (family(), smooth_family(), 0.2..3.0f64, 0.2..3.0f64, 0.5..3.0f64, 0.1..2.0f64, 0.0..PI).prop_map(
        |(phi1, phi2, a1, a2, b1, b2, angle)| {
            CovarianceModel::new(ModelKind::T3 {
                phi1: Component::Family(phi1),
                phi2,
                a1,
                a2,
                b1,
                b2,
                u: vec![angle.cos(), angle.sin()],
            })
            .unwrap()
        },
    )
}

fn krigeable() -> CovarianceModel {
    CovarianceModel::new(ModelKind::T2 {
        family: IsotropicFamily::matern(1.5),
        a1: 0.8,
        a2: 0.4,
        b1: 2.0,
        b2: 1.0,
        eta: vec![1.0, 1.0],
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_between_infimum_and_one(s in 0.0..50.0f64) {
        let bounds = [(1, -1.0), (2, -0.4028), (3, -0.2173)];
        for (d, inf) in bounds {
            let v = omega_d(d, s).unwrap();
            prop_assert!(v <= 1.0 + 1e-15 && v >= inf - 1e-4, "d={d} s={s} v={v}");
        }
    }

    #[test]
    fn hypergeometric_series_start_at_one(a in -3.0..3.0f64, b in -3.0..3.0f64, c in 0.5..5.0f64) {
        prop_assert_eq!(gauss_2f1(a, b, c, 0.0).unwrap(), 1.0);
        prop_assert_eq!(hyper_1f2(a, b + 3.5, c, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn spectral_densities_are_nonnegative(f in family(), d in 1usize..=3, log_w in -3.0..1.5f64) {
        prop_assume!(f.has_spectral_density_in_dim(d));
        let w = 10f64.powf(log_w);
        prop_assert!(f.spectral_density(d, w).unwrap() >= 0.0);
    }

    #[test]
    fn normalized_profiles_are_bounded(f in family(), t in 0.0..100.0f64) {
        prop_assert!(f.phi_normalized(t).unwrap().abs() <= 1.0 + 1e-12);
        prop_assert!(IsotropicFamily::CardinalSine.phi(t).unwrap() >= -0.2173);
    }

    #[test]
    fn matern_and_cauchy_densities_nonincreasing(f in family(), d in 1usize..=3, w in 0.0..20.0f64, dw in 1e-3..1.0f64) {
        prop_assume!(f.has_spectral_density_in_dim(d));
        prop_assert!(f.spectral_density_nonincreasing_in_dim(d));
        let lo = f.spectral_density(d, w).unwrap();
        let hi = f.spectral_density(d, w + dw).unwrap();
        prop_assert!(hi <= lo * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn rotation_scaling_roundtrip(angle in 0.0..PI, s1 in 0.01..10.0f64, s2 in 0.01..10.0f64) {
        let a = AnisotropyMatrix::from_rotation_scaling(&[angle], &[s1, s2]).unwrap();
        let mut eig: Vec<f64> = a.eigenvalues().iter().cloned().collect();
        eig.sort_by(f64::total_cmp);
        let mut want = [s1, s2];
        want.sort_by(f64::total_cmp);
        for (e, w) in eig.iter().zip(want) {
            prop_assert!((e - w).abs() <= 1e-12 * w.max(1.0), "{e} vs {w}");
        }
    }

    #[test]
    fn loewner_order_is_antisymmetric(a in spd(), b in spd()) {
        prop_assert!(a.loewner_geq(&a));
        if a.loewner_geq(&b) && b.loewner_geq(&a) {
            let diff = (a.matrix() - b.matrix()).abs().max();
            prop_assert!(diff <= 1e-9 * a.lambda_max());
        }
        if a.lambda_min() >= b.lambda_max() {
            prop_assert!(a.loewner_geq(&b));
        }
    }

    #[test]
    fn models_are_even(m in prop_oneof![t1_model(), t3_model()], h in prop::collection::vec(-6.0..6.0f64, 2)) {
        let neg: Vec<f64> = h.iter().map(|v| -v).collect();
        prop_assert_eq!(m.eval(&h).unwrap(), m.eval(&neg).unwrap());
    }

    #[test]
    fn certified_models_peak_at_origin(m in prop_oneof![t1_model(), t3_model()], h in prop::collection::vec(-6.0..6.0f64, 2)) {
        if m.certificate().status == Status::Proved {
            let c0 = m.eval(&[0.0, 0.0]).unwrap();
            prop_assert!(m.eval(&h).unwrap().abs() <= c0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn isotropic_t1_is_the_nested_model(f in family(), a1 in 0.1..3.0f64, a2 in 0.1..3.0f64, b1 in 0.5..3.0f64, b2 in 0.1..2.0f64, h in prop::collection::vec(-6.0..6.0f64, 2)) {
        let m = CovarianceModel::new(ModelKind::T1 {
            family: f,
            a1: AnisotropyMatrix::scaled_identity(2, a1).unwrap(),
            a2: AnisotropyMatrix::scaled_identity(2, a2).unwrap(),
            b1,
            b2,
        })
        .unwrap();
        let r = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nested = b1 * f.phi_normalized(a1.sqrt() * r).unwrap() - b2 * f.phi_normalized(a2.sqrt() * r).unwrap();
        prop_assert!((m.eval(&h).unwrap() - nested).abs() <= 1e-14 * (b1 + b2));
    }

    #[test]
    fn variogram_ignores_direction_sign_and_shifts(pts in points(25), z in prop::collection::vec(-3.0..3.0f64, 25), angle in 0.0..PI, shift in -100.0..100.0f64) {
        prop_assume!(distinct(&pts));
        let data = SpatialDataset::new(pts, z.clone()).unwrap();
        let dir = [angle.cos(), angle.sin()];
        let flipped = [-dir[0], -dir[1]];
        let a = empirical_variogram(&data, &dir, PI / 8.0, 0.7, 6.0).unwrap();
        let b = empirical_variogram(&data, &flipped, PI / 8.0, 0.7, 6.0).unwrap();
        prop_assert_eq!(&a.lag_centers, &b.lag_centers);
        prop_assert_eq!(&a.pair_counts, &b.pair_counts);
        prop_assert_eq!(&a.semivariances, &b.semivariances);
        prop_assert!(a.total_pairs() <= 25 * 24 / 2);
        let moved = data.with_values(z.iter().map(|v| v + shift).collect()).unwrap();
        let c = empirical_variogram(&moved, &dir, PI / 8.0, 0.7, 6.0).unwrap();
        prop_assert_eq!(&a.pair_counts, &c.pair_counts);
        for (x, y) in a.semivariances.iter().zip(&c.semivariances) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()) * (1.0 + shift.abs()));
        }
    }

    #[test]
    fn likelihood_ignores_labels(pts in points(20), z in prop::collection::vec(-3.0..3.0f64, 20), perm in Just((0..20).collect::<Vec<usize>>()).prop_shuffle()) {
        prop_assume!(distinct(&pts));
        let model = krigeable();
        let data = SpatialDataset::new(pts.clone(), z.clone()).unwrap();
        let shuffled = SpatialDataset::new(perm.iter().map(|&i| pts[i].clone()).collect(), perm.iter().map(|&i| z[i]).collect()).unwrap();
        let a = PairSet::new(&data, 4.0).unwrap().log_likelihood(&model).unwrap();
        let b = PairSet::new(&shuffled, 4.0).unwrap().log_likelihood(&model).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kriging_is_linear_with_data_free_variance(
        pts in points(30),
        z1 in prop::collection::vec(-3.0..3.0f64, 30),
        z2 in prop::collection::vec(-3.0..3.0f64, 30),
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
        q in prop::collection::vec(prop::collection::vec(-6.0..6.0f64, 2), 5),
    ) {
        prop_assume!(distinct(&pts));
        let sys = KrigingSystem::new(&krigeable(), &pts, false).unwrap();
        let mix: Vec<f64> = z1.iter().zip(&z2).map(|(x, y)| a * x + b * y).collect();
        let r1 = sys.predict(&z1, &q).unwrap();
        let r2 = sys.predict(&z2, &q).unwrap();
        let rm = sys.predict(&mix, &q).unwrap();
        for k in 0..q.len() {
            let want = a * r1.predictions[k] + b * r2.predictions[k];
            prop_assert!((rm.predictions[k] - want).abs() <= 1e-10 * (1.0 + want.abs()));
            prop_assert_eq!(r1.kriging_variances[k], r2.kriging_variances[k]);
        }
    }

    #[test]
    fn validation_reports_order_mae_below_rmse(pts in points(30), z in prop::collection::vec(-3.0..3.0f64, 30), seed in 0u64..1000, k in 1usize..10) {
        prop_assume!(distinct(&pts));
        let data = SpatialDataset::new(pts, z).unwrap();
        let holdout = holecov::rng::NormalStream::new(seed).sample_indices(30, k);
        let rep = split_sample_validate(&krigeable(), &data, &holdout).unwrap();
        prop_assert!(rep.mae <= rep.rmse);
        prop_assert_eq!(rep.n_holdout, k);
    }

    #[test]
    fn simulation_is_reproducible(pts in points(40), seed in any::<u64>()) {
        let sim = GaussianSimulator::new(&krigeable(), &pts).unwrap();
        let a = sim.sample(seed);
        let b = GaussianSimulator::new(&krigeable(), &pts).unwrap().sample(seed);
        prop_assert_eq!(a, b);
    }
}

use jc_core::analysis::compare_generators;
use jc_core::bath::{BathModel, SpectralModel};
use jc_core::evolve::{evolve, DensityMatrix, IntegratorConfig};
use jc_core::generators::{build, build_phenom_bare, build_phenom_dressed, GeneratorKind};
use jc_core::linalg::{max_abs, CVector};
use jc_core::{CMatrix, SystemParams, C64};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SystemParams> {
    (1usize..=4, 0.01f64..0.15).prop_map(|(n, g)| SystemParams::new(1.0, g, n).unwrap())
}

fn spectrum() -> impl Strategy<Value = SpectralModel> {
    prop_oneof![
        (0.001f64..0.05).prop_map(|g| SpectralModel::flat_for_rate(g, 10.0)),
        (0.001f64..0.05, 0.2f64..3.0).prop_map(|(eta, omega_c)| SpectralModel::Ohmic { eta, omega_c }),
        (0.001f64..0.02, 0.5f64..1.5, 0.05f64..1.0)
            .prop_map(|(strength, center, width)| SpectralModel::Lorentzian { strength, center, width }),
    ]
}

fn matrix(d: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_map(move |v| CMatrix::from_iterator(d, d, v.into_iter().map(|(re, im)| C64::new(re, im))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_generator_preserves_trace_and_hermiticity(
        (p, probe) in params().prop_flat_map(|p| (Just(p), matrix(p.dim()))),
        spec in spectrum(),
        t in 0.0f64..1.0,
        gamma in 0.0f64..0.1,
    ) {
        let bath = BathModel::new(spec, t).unwrap();
        for kind in GeneratorKind::ALL {
            let l = build(kind, p, Some(gamma), Some(&bath)).unwrap();
            prop_assert!(l.trace_defect() <= 1e-10);
            prop_assert!(l.hermiticity_defect(std::slice::from_ref(&probe)) <= 1e-12);
        }
    }

    #[test]
    fn dressed_rewrite_is_exact(p in params(), gamma in 0.0f64..0.2, t in 0.0f64..2.0) {
        let a = build_phenom_bare(p, gamma, t).unwrap();
        let b = build_phenom_dressed(p, gamma, t).unwrap();
        prop_assert!(compare_generators(&a, &b).unwrap().relative_distance <= 1e-12);
    }

    #[test]
    fn comparison_is_symmetric(p in params(), s1 in spectrum(), s2 in spectrum(), t in 0.0f64..0.5) {
        let a = build(GeneratorKind::QuasiRwa, p, None, Some(&BathModel::new(s1, t).unwrap())).unwrap();
        let b = build(GeneratorKind::SecularRwa, p, None, Some(&BathModel::new(s2, t).unwrap())).unwrap();
        let ab = compare_generators(&a, &b).unwrap();
        let ba = compare_generators(&b, &a).unwrap();
        prop_assert!(ab.relative_distance >= 0.0);
        prop_assert!((ab.relative_distance - ba.relative_distance).abs() <= 1e-15);
        prop_assert_eq!(compare_generators(&a, &a).unwrap().relative_distance, 0.0);
    }

    #[test]
    fn unitary_evolution_keeps_purity(p in params(), seed in proptest::collection::vec(-1.0f64..1.0, 18)) {
        let l = build_phenom_bare(p, 0.0, 0.0).unwrap();
        let d = p.dim();
        let psi = CVector::from_fn(d, |i, _| C64::new(seed[i % 18] + 1e-3, seed[(i + 7) % 18]));
        let rho = DensityMatrix::pure(&psi).unwrap();
        let traj = evolve(&l, &rho, 50.0, &IntegratorConfig::default().recording_every(100)).unwrap();
        prop_assert!(traj.purity.iter().all(|x| (x - 1.0).abs() <= 1e-8));
    }

    #[test]
    fn evolution_is_linear(p in params(), alpha in 0.0f64..1.0) {
        let bath = BathModel::new(SpectralModel::Ohmic { eta: 0.02, omega_c: 1.0 }, 0.2).unwrap();
        let l = build(GeneratorKind::QuasiRwa, p, None, Some(&bath)).unwrap();
        let d = p.dim();
        let r1 = DensityMatrix::pure(&CVector::from_fn(d, |i, _| C64::new(1.0, i as f64))).unwrap();
        let r2 = DensityMatrix::pure(&CVector::from_fn(d, |i, _| C64::new((i as f64).cos(), 0.3))).unwrap();
        let mix = DensityMatrix::mixture(&[(alpha, r1.clone()), (1.0 - alpha, r2.clone())]).unwrap();
        let cfg = IntegratorConfig::with_dt(0.02);
        let f = |r: &DensityMatrix| evolve(&l, r, 5.0, &cfg).unwrap().final_state().clone();
        let want = f(&r1) * C64::new(alpha, 0.0) + f(&r2) * C64::new(1.0 - alpha, 0.0);
        prop_assert!(max_abs(&(f(&mix) - want)) <= 1e-12);
    }
}

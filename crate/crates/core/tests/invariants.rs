use std::f64::consts::PI;

use glassyjc::disorder::{self, DisorderKind, DisorderSpec, Estimator, QuenchPlan};
use glassyjc::doublejc::{self, DoubleJcConfig, Family};
use glassyjc::entanglement::{concurrence_general, von_neumann_entropy, TwoQubitDensity, XState};
use glassyjc::singlejc::{self, SingleJcConfig};
use glassyjc::C64;
use nalgebra::{Matrix2, Matrix4, Vector4};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = DisorderKind> {
    prop::sample::select(DisorderKind::ALL.to_vec())
}

fn xstate() -> impl Strategy<Value = XState> {
    (
        prop::array::uniform4(0.001f64..1.0),
        0.0f64..1.0,
        0.0f64..1.0,
        0.0..2.0 * PI,
        0.0..2.0 * PI,
    )
        .prop_map(|(d, r1, r2, p1, p2)| {
            let s: f64 = d.iter().sum();
            let d = d.map(|x| x / s);
            let outer = C64::from_polar(r1 * (d[0] * d[3]).sqrt(), p1);
            let inner = C64::from_polar(r2 * (d[1] * d[2]).sqrt(), p2);
            XState::new(d, outer, inner).unwrap()
        })
}

/// Full-rank density from four random complex vectors.
fn density() -> impl Strategy<Value = Matrix4<C64>> {
    prop::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let mut m = Matrix4::<C64>::zeros();
        for k in 0..4 {
            let b = Vector4::from_fn(|i, _| C64::new(v[8 * k + 2 * i], v[8 * k + 2 * i + 1]));
            m += b * b.adjoint();
        }
        m += Matrix4::identity() * C64::new(0.05, 0.0);
        let tr = m.trace();
        m / tr
    })
}

fn unitary2() -> impl Strategy<Value = Matrix2<C64>> {
    (0.0..2.0 * PI, 0.0..PI, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(a, b, c, d)| {
        let (sb, cb) = (b / 2.0).sin_cos();
        let e = |x: f64| C64::from_polar(1.0, x);
        Matrix2::new(
            e(a) * e(c) * cb,
            -e(a) * e(d) * sb,
            e(a) * e(-d) * sb,
            e(a) * e(-c) * cb,
        )
    })
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn xstate_matches_general(x in xstate()) {
        let g = concurrence_general(&x.to_density().unwrap()).unwrap();
        prop_assert!((g - x.concurrence()).abs() < 1e-9);
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries(m in density(), ua in unitary2(), ub in unitary2()) {
        let u = kron(&ua, &ub);
        let rotated = u * m * u.adjoint();
        let c0 = concurrence_general(&TwoQubitDensity::new(m).unwrap()).unwrap();
        let c1 = concurrence_general(&TwoQubitDensity::new(rotated).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&c0));
        prop_assert!((c0 - c1).abs() < 1e-9);
    }

    #[test]
    fn realization_concurrence_bounded_and_consistent(
        alpha in 0.0..PI / 2.0,
        psi in any::<bool>(),
        da in -0.9f64..0.9,
        db in -0.9f64..0.9,
        t in 0.0f64..100.0,
    ) {
        let fam = if psi { Family::Psi } else { Family::Phi };
        let cfg = DoubleJcConfig::symmetric(alpha, fam).unwrap();
        let c = doublejc::concurrence_realization(&cfg, da, db, t);
        prop_assert!((0.0..=1.0).contains(&c));
        let x = doublejc::realization_xstate(&cfg, da, db, t).unwrap().concurrence();
        prop_assert!((c - x).abs() < 1e-12);
    }

    #[test]
    fn entropy_in_unit_interval(delta in -0.2f64..0.2, t in 0.0f64..300.0) {
        let cfg = SingleJcConfig::with_field(20.0, 2.0).unwrap();
        let e = von_neumann_entropy(&singlejc::atom_reduced_state(&cfg, delta, t).unwrap());
        prop_assert!((0.0..=1.0).contains(&e));
        let w = singlejc::inversion_realization(&cfg, delta, t);
        prop_assert!(w.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn draws_are_pure_functions_of_seed(k in kind(), s in 0.0f64..1.0, seed in any::<u64>(), i in 0usize..64) {
        let spec = DisorderSpec::new(k, s).unwrap();
        let plan = QuenchPlan::new(64, Estimator::Median, seed);
        let a = disorder::sample_delta(&spec, &plan, i);
        let b = disorder::sample_delta(&spec, &plan, i);
        prop_assert_eq!(a.to_bits(), b.to_bits());
        prop_assert_eq!(a.to_bits(), disorder::draw_single(&spec, &plan).unwrap()[i].to_bits());
        prop_assert!(a.abs() <= spec.support_half_width() * (1.0 + 1e-12));
    }

    #[test]
    fn median_is_permutation_invariant(mut v in prop::collection::vec(-10.0f64..10.0, 1..50), seed in any::<u64>()) {
        let a = disorder::quench_average(&v, Estimator::Median).unwrap().estimate;
        let n = v.len();
        for i in 0..n {
            v.swap(i, (seed as usize).wrapping_mul(i + 7) % n);
        }
        let b = disorder::quench_average(&v, Estimator::Median).unwrap().estimate;
        prop_assert_eq!(a, b);
    }
}

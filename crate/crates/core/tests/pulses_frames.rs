use nalgebra::Matrix3;
use proptest::prelude::*;
use stirap_core::hamiltonians::phenomenological_zeno_states;
use stirap_core::{
    build_generator, eval_pulses, frame_at, zeno_split, AdiabaticFrame, BasisKind, ModelKind,
    PulseConfig, Sequence, C64,
};

fn max_abs(m: &Matrix3<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -10.0 + 20.0 * k as f64 / (n - 1) as f64)
}

#[test]
fn angle_rates_match_central_differences() {
    let h = 1e-5;
    for seq in Sequence::ALL {
        for (alpha, delta) in [(10.0, 1.0), (20.0, 1.0), (10.0, 0.0), (3.0, 2.5)] {
            let cfg = PulseConfig::new(alpha, delta, seq);
            for t in grid(1000) {
                let f = frame_at(&cfg, t);
                let (a, b) = (frame_at(&cfg, t - h), frame_at(&cfg, t + h));
                let td = (b.theta - a.theta) / (2.0 * h);
                let pd = (b.phi - a.phi) / (2.0 * h);
                assert!((td - f.theta_dot).abs() < 1e-6, "{seq} t={t}: {td} vs {}", f.theta_dot);
                assert!((pd - f.phi_dot).abs() < 1e-6, "{seq} t={t}: {pd} vs {}", f.phi_dot);
            }
        }
    }
}

#[test]
fn closed_form_frame_matches_generic_derivation() {
    for seq in Sequence::ALL {
        let cfg = PulseConfig::new(10.0, 1.0, seq);
        for t in grid(201) {
            let a = frame_at(&cfg, t);
            let b = AdiabaticFrame::from_pulses(&cfg, t);
            for (x, y) in [
                (a.theta, b.theta),
                (a.phi, b.phi),
                (a.theta_dot, b.theta_dot),
                (a.phi_dot, b.phi_dot),
                (a.omega_plus, b.omega_plus),
                (a.omega_minus, b.omega_minus),
            ] {
                assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()), "{seq} t={t}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn mixing_angle_is_monotone_between_limits() {
    let ci = PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive);
    let it = ci.with_sequence(Sequence::Intuitive);
    let thetas: Vec<f64> = grid(1001).map(|t| frame_at(&ci, t).theta).collect();
    assert!(thetas.windows(2).all(|w| w[1] >= w[0]));
    assert!(thetas[0] < 1e-8 && (thetas[1000] - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    for t in grid(1001) {
        let sum = frame_at(&ci, t).theta + frame_at(&it, t).theta;
        assert!((sum - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }
}

#[test]
fn sequences_are_time_mirrors_and_role_swaps() {
    let ci = PulseConfig::new(10.0, 1.0, Sequence::Counterintuitive);
    let it = ci.with_sequence(Sequence::Intuitive);
    for t in grid(401) {
        let (p, s) = eval_pulses(&it, t);
        let (pm, sm) = eval_pulses(&ci, -t);
        assert!((p - pm).abs() < 1e-14 && (s - sm).abs() < 1e-14, "mirror at t={t}");
        let (pc, sc) = eval_pulses(&ci, t);
        assert_eq!((p, s), (sc, pc), "swap at t={t}");
    }
}

proptest! {
    #[test]
    fn eigenvalue_identities(alpha in 0.5f64..50.0, delta in 0.0f64..5.0, t in -10.0f64..10.0, ci in any::<bool>()) {
        let seq = if ci { Sequence::Counterintuitive } else { Sequence::Intuitive };
        let f = frame_at(&PulseConfig::new(alpha, delta, seq), t);
        let scale = delta + f.omega0 + f64::MIN_POSITIVE;
        prop_assert!((f.omega_plus + f.omega_minus - delta).abs() <= 1e-10 * scale);
        prop_assert!((f.omega_plus * f.omega_minus + f.omega0 * f.omega0).abs() <= 1e-10 * scale * scale);
        prop_assert!(f.theta >= 0.0 && f.theta <= std::f64::consts::FRAC_PI_2);
        prop_assert!(f.phi >= 0.0 && f.phi < std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn eigenvectors_diagonalise_lossless_hamiltonian(alpha in 1.0f64..40.0, delta in 0.0f64..4.0, t in -6.0f64..6.0) {
        let f = frame_at(&PulseConfig::new(alpha, delta, Sequence::Counterintuitive), t);
        let hb = build_generator(&f, 0.0, ModelKind::Phenomenological, BasisKind::Bare).entries;
        let u = f.eigenvectors();
        let d = u.adjoint() * hb * u;
        let want = Matrix3::from_diagonal(&nalgebra::Vector3::new(f.omega_plus, 0.0, f.omega_minus).map(C64::from));
        prop_assert!(max_abs(&(d - want)) < 1e-10 * (1.0 + alpha));
        prop_assert!(max_abs(&(u.adjoint() * u - Matrix3::identity())) < 1e-12);
    }
}

/// `U†H_bU − iU†U̇` reproduces the adiabatic generator for both models, and
/// the transform inverts.
#[test]
fn bare_and_adiabatic_generators_are_gauge_equivalent() {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let i = C64::i();
    for _ in 0..100 {
        let seq = if next() < 0.5 { Sequence::Intuitive } else { Sequence::Counterintuitive };
        let cfg = PulseConfig::new(1.0 + 30.0 * next(), 3.0 * next(), seq);
        let f = frame_at(&cfg, -8.0 + 16.0 * next());
        let gamma = 20.0 * next();
        let u = f.eigenvectors();
        let du = f.eigenvector_rates();
        for model in ModelKind::ALL {
            let hb = build_generator(&f, gamma, model, BasisKind::Bare).entries;
            let ha = build_generator(&f, gamma, model, BasisKind::Adiabatic).entries;
            let scale = 1.0 + gamma + f.omega0 + f.delta;
            let to_adiabatic = u.adjoint() * hb * u - u.adjoint() * du * i;
            assert!(max_abs(&(to_adiabatic - ha)) < 1e-8 * scale, "{model}: forward");
            let to_bare = u * ha * u.adjoint() + du * u.adjoint() * i;
            assert!(max_abs(&(to_bare - hb)) < 1e-8 * scale, "{model}: inverse");
        }
    }
}

#[test]
fn zeno_split_reassembles_and_rejects_bare() {
    let f = frame_at(&PulseConfig::default(), 0.3);
    for model in ModelKind::ALL {
        let (unpert, pert) = zeno_split(&f, 50.0, model, BasisKind::Adiabatic).unwrap();
        let full = build_generator(&f, 50.0, model, BasisKind::Adiabatic).entries;
        assert!(max_abs(&(unpert.entries + pert.entries - full)) < 1e-12);
        assert!(zeno_split(&f, 50.0, model, BasisKind::Bare).is_err());
    }
    let (unpert, _) = zeno_split(&f, 50.0, ModelKind::Phenomenological, BasisKind::Adiabatic).unwrap();
    let [d1, d2, lossy] = phenomenological_zeno_states(&f);
    assert!((unpert.entries * d1).norm() < 1e-12);
    assert!((unpert.entries * d2).norm() < 1e-12);
    assert!((unpert.entries * lossy - lossy * C64::new(0.0, -50.0)).norm() < 1e-12);
}

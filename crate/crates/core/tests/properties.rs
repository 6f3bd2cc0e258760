mod common;

use common::{fd_derivatives, random_checkable, random_expr, random_trig_curve};
use e4frame::curvespec::parse_expr;
use e4frame::euler::{extract_euler_angles, rotation_from_angles};
use e4frame::frame::frame_angle;
use e4frame::jet::{jet_apply, jet_mul, Jet, UnaryFn};
use e4frame::pipeline::Analysis;
use e4frame::ptframe::{initial_frame, propagate_pt, Method};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

fn jet() -> impl Strategy<Value = Jet> {
    prop::array::uniform5(-3.0f64..3.0).prop_map(Jet::new)
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.d.iter().zip(&b.d).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn product_commutes(a in jet(), b in jet()) {
        prop_assert!(close(&jet_mul(a, b), &jet_mul(b, a), 1e-14));
    }

    #[test]
    fn product_associates(a in jet(), b in jet(), c in jet()) {
        prop_assert!(close(&jet_mul(jet_mul(a, b), c), &jet_mul(a, jet_mul(b, c)), 1e-12));
    }

    #[test]
    fn exp_shift(a in jet(), c in -2.0f64..2.0) {
        let lhs = jet_apply(UnaryFn::Exp, a + Jet::constant(c)).unwrap();
        let rhs = jet_apply(UnaryFn::Exp, a).unwrap() * c.exp();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn derivative_shifts(a in jet()) {
        let d = a.derivative();
        prop_assert_eq!(&d.d[..4], &a.d[1..]);
        prop_assert_eq!(d.d[4], 0.0);
    }

    #[test]
    fn print_parse_fixed_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let depth = (seed % 5) as usize;
        let e = random_expr(&mut rng, depth);
        let text = e.to_string();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn euler_roundtrip(theta in -FRAC_PI_2 + 1e-3..FRAC_PI_2 - 1e-3, phi in -PI + 1e-9..PI, psi in -PI + 1e-9..PI) {
        let r = rotation_from_angles(theta, phi, psi);
        let a = extract_euler_angles(&r).unwrap();
        prop_assert!(!a.gimbal);
        prop_assert!((a.theta - theta).abs() < 1e-8);
        prop_assert!((a.phi - phi).abs() < 1e-8);
        prop_assert!((a.psi - psi).abs() < 1e-8);
        prop_assert!((a.matrix() - r).amax() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jets_match_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e, x) = random_checkable(&mut rng);
        let j = e.eval_jet(x).unwrap();
        let fd = fd_derivatives(&e, x).unwrap();
        for k in 0..4 {
            let scale = 1f64.max(j.d[0].abs()).max(j.d[k + 1].abs()).max(fd[k].abs());
            prop_assert!((j.d[k + 1] - fd[k]).abs() <= 1e-5 * scale, "{} at {}: order {}: {} vs {}", e, x, k + 1, j.d[k + 1], fd[k]);
        }
    }
}

/// Largest rate at which the normals turn into each other between consecutive samples.
fn normal_rotation_rate(a: &Analysis) -> f64 {
    let mut worst = 0f64;
    for j in 0..a.frames.len() - 1 {
        let h = a.sampling.arclens[j + 1] - a.sampling.arclens[j];
        let (f0, f1) = (&a.frames[j], &a.frames[j + 1]);
        for i in 1..4 {
            for m in i + 1..4 {
                let rate = (f1.vectors[i].dot(&f0.vectors[m]) - f1.vectors[m].dot(&f0.vectors[i])) / (2.0 * h);
                worst = worst.max(rate.abs());
            }
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transport_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_trig_curve(&mut rng);
        let a = Analysis::from_spec(&spec, 401, Method::Rk4).unwrap();
        let frame0 = initial_frame(&a.sampling, &a.frenet_points[0]).unwrap();
        let dr = propagate_pt(&a.sampling, &frame0, Method::DoubleReflection).unwrap();
        for j in 0..a.frames.len() {
            let f = &a.frames[j];
            prop_assert!(f.orthonormality_defect() <= 1e-8);
            prop_assert!((f.determinant() - 1.0).abs() <= 1e-8);
            prop_assert!(dr[j].orthonormality_defect() <= 1e-8);
            prop_assert!((a.frenet[j].kappa - a.k[j].norm()).abs() <= 1e-6);
            prop_assert!(frame_angle(f, &dr[j]) <= 1e-3);
        }
        // relatively parallel: the normals do not rotate among themselves, up to
        // an O(h²) discretization term that must shrink under refinement
        let coarse = normal_rotation_rate(&a);
        let fine = normal_rotation_rate(&Analysis::from_spec(&spec, 801, Method::Rk4).unwrap());
        prop_assert!(fine <= coarse / 3.0 || fine <= 1e-9, "{coarse:e} -> {fine:e}");
    }
}

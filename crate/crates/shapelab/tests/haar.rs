use proptest::prelude::*;
use shapelab::form::{act_real, discriminant_real};
use shapelab::haar::*;
use shapelab::space::Rank2Region;
use shapelab::Error;

#[test]
fn stderr_halves_when_samples_quadruple() {
    let a = mc_jacobian_constant(1, TestFn::A, 1_000_000, 3).unwrap();
    let b = mc_jacobian_constant(1, TestFn::A, 4_000_000, 3).unwrap();
    let r = b.stderr / a.stderr;
    assert!((0.35..0.65).contains(&r), "stderr ratio {r}");
    assert!((a.value - b.value).abs() < 4.0 * a.stderr.hypot(b.stderr));
}

#[test]
fn estimates_are_reproducible() {
    let a = mc_jacobian_constant(0, TestFn::B, 1_000_000, 11).unwrap();
    assert_eq!(a, mc_jacobian_constant(0, TestFn::B, 1_000_000, 11).unwrap());
    assert_ne!(a.value, mc_jacobian_constant(0, TestFn::B, 1_000_000, 12).unwrap().value);
    assert_eq!((a.samples, a.seed), (1_000_000, 11));
}

#[test]
fn constants_follow_stabilizer_orders() {
    let c0 = mc_jacobian_constant(0, TestFn::A, 2_000_000, 5).unwrap();
    let c1 = mc_jacobian_constant(1, TestFn::A, 2_000_000, 5).unwrap();
    let want = (stabilizer_order(0).unwrap() / stabilizer_order(1).unwrap()) as f64;
    let r = c0.value / c1.value;
    let se = r * (c0.stderr / c0.value).hypot(c1.stderr / c1.value);
    assert!((r - want).abs() < 4.0 * se, "c0/c1 = {r} ± {se}");
}

#[test]
fn base_points_have_unit_discriminant() {
    for i in 0..2 {
        let b = make_basepoint(i).unwrap();
        assert_eq!(b.i, i);
        assert!((b.disc.abs() - 1.0).abs() < 1e-12);
        assert_eq!(b.disc < 0.0, i == 1);
        for g in stabilizer(b.form).unwrap() {
            let h = act_real(g, b.form);
            assert!(h.iter().zip(b.form).all(|(x, y)| (x - y).abs() < 1e-9));
        }
    }
}

#[test]
fn ratio_arguments_are_validated() {
    let w = Rank2Region::full();
    for ymax in [0.5, 9.0, f64::NAN] {
        assert!(matches!(mc_shape_volume_ratio(&w, 0, ymax, 10_000, 1), Err(Error::InvalidTask(_))));
    }
    assert!(matches!(mc_shape_volume_ratio(&w, 2, 4.0, 10_000, 1), Err(Error::InvalidTask(_))));
    assert!(matches!(mc_jacobian_constant(0, TestFn::A, 10, 1), Err(Error::InvalidTask(_))));
    assert!((truncated_mu_ratio(&w, 4.0) - 1.0).abs() < 1e-12);
}

#[test]
fn canonical_points_lie_in_domain() {
    for (x, y) in [(3.7, 0.2), (-0.3, 1.0), (0.0, 0.01), (12.5, 40.0)] {
        let p = canonical_point(x, y).unwrap();
        assert!((0.0..=0.5).contains(&p.x) && p.x * p.x + p.y * p.y >= 1.0 - 1e-12);
    }
}

fn real_form() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-3.0f64..3.0).prop_filter("nondegenerate", |f| discriminant_real(*f).abs() > 1e-3)
}

proptest! {
    #[test]
    fn discriminant_is_homogeneous(f in real_form(), lambda in 0.2f64..3.0) {
        let d = discriminant_real(f);
        let scaled = discriminant_real(f.map(|c| lambda * c));
        prop_assert!((scaled - lambda.powi(4) * d).abs() <= 1e-9 * scaled.abs().max(1.0));
    }

    #[test]
    fn discriminant_transforms_by_det_six(f in real_form(), g in prop::array::uniform4(-2.0f64..2.0)) {
        let det = g[0] * g[3] - g[1] * g[2];
        prop_assume!(det.abs() > 0.1);
        let d = discriminant_real(act_real(g, f));
        let want = det.powi(6) * discriminant_real(f);
        prop_assert!((d - want).abs() <= 1e-8 * want.abs().max(1.0), "{} vs {}", d, want);
    }
}

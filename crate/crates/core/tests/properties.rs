use affiq::bodies::difference_body;
use affiq::experiments::{Assertion, CaseRecord, SIGMAS};
use affiq::grassmann::{sample_grassmannian, Subspace};
use affiq::numerics::rng::label_hash;
use affiq::numerics::{unit_ball_volume, Linear};
use affiq::quermass::ProjectionOracle;
use affiq::symmetry::ShadowFamily;
use affiq::{i_kp, q_kp, standard_body, Body, BodyCatalog, BodyParams, QuermassSpec, RngStream, SuiteReport, Vector};
use proptest::prelude::*;

fn random_poly(n: usize, m: usize, seed: u64) -> Body {
    standard_body("random-poly", n, &BodyParams { m: Some(m), seed: Some(seed), ..Default::default() }).unwrap()
}

fn volume(b: &Body) -> f64 {
    ProjectionOracle::new(b).unwrap().volume().value
}

fn subspace(n: usize, k: usize, seed: u64) -> Subspace {
    sample_grassmannian(n, k, &mut RngStream::new(seed, 0).rng()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn linear_difference_of_itself_is_exact(xs in prop::collection::vec(-10.0f64..10.0, 2..50), c in -3.0f64..3.0) {
        let a = Linear::mean(1, xs.clone());
        prop_assert_eq!(a.sub(&a).stderr(), 0.0);
        let b = a.clone().scale(c);
        prop_assert!((b.stderr() - c.abs() * a.stderr()).abs() <= 1e-12 * (1.0 + a.stderr()));
        prop_assert_eq!(Linear::constant(c).stderr(), 0.0);
    }

    #[test]
    fn independent_noise_adds_in_quadrature(s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
        let d = Linear::independent(1, 0.0, s1).sub(&Linear::independent(2, 0.0, s2));
        prop_assert!((d.stderr() - s1.hypot(s2)).abs() < 1e-12);
    }

    #[test]
    fn assertion_semantics(margin in -1.0f64..1.0, se in 0.0f64..0.1, slack in 0.0f64..0.01) {
        let s = SIGMAS * se;
        let (at_least, strict, equal) =
            (Assertion::AtLeast { slack }, Assertion::Strict { slack }, Assertion::Equal { slack });
        prop_assert_eq!(at_least.holds(margin, se), margin >= -(s + slack));
        prop_assert_eq!(strict.holds(margin, se), margin > s + slack);
        prop_assert_eq!(equal.holds(margin, se), margin.abs() <= s + slack);
        prop_assert!(Assertion::Info.holds(margin, se));
        // a strict pass is also an at-least pass
        prop_assert!(!strict.holds(margin, se) || at_least.holds(margin, se));
    }

    #[test]
    fn projection_volume_bounds(seed in 0u64..1000, m in 8usize..30, k in 1usize..3) {
        let b = random_poly(3, m, seed);
        let o = ProjectionOracle::new(&b).unwrap();
        let r_out = b.as_vpoly().unwrap().vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let v = o.volume_of(&subspace(3, k, seed)).unwrap();
        prop_assert!(v >= unit_ball_volume(k) * o.inradius().powi(k as i32) * (1.0 - 1e-9));
        prop_assert!(v <= unit_ball_volume(k) * r_out.powi(k as i32) * (1.0 + 1e-9));
    }

    #[test]
    fn quermass_is_translation_invariant_and_homogeneous(seed in 0u64..1000, lambda in 0.3f64..3.0, p in prop::sample::select(vec![-3.0, -1.0, 0.0, 1.0, 2.0])) {
        let b = random_poly(3, 12, seed);
        let spec = QuermassSpec::new(2, p, 200);
        let q = q_kp(&b, &spec, seed).unwrap().value;
        let shifted = q_kp(&b.translate(&[0.3, -1.0, 2.0]).unwrap(), &spec, seed).unwrap().value;
        prop_assert!((q - shifted).abs() <= 1e-9 * q);
        let scaled = q_kp(&b.scale(lambda).unwrap(), &spec, seed).unwrap().value;
        prop_assert!((scaled - lambda.powi(2) * q).abs() <= 1e-9 * scaled);
        let i = i_kp(&b, &spec, seed).unwrap().value;
        let i_scaled = i_kp(&b.scale(lambda).unwrap(), &spec, seed).unwrap().value;
        prop_assert!((i - i_scaled).abs() <= 1e-8 * i);
    }

    #[test]
    fn volume_is_affine_equivariant(seed in 0u64..1000, entries in prop::collection::vec(-2.0f64..2.0, 9)) {
        let t = affiq::Matrix::from_row_major(3, 3, entries).unwrap();
        let det = t.det().unwrap();
        prop_assume!(det.abs() > 0.05);
        let b = random_poly(3, 15, seed);
        let image = b.affine_image(&t, &[1.0, 0.0, -0.5]).unwrap();
        prop_assert!((volume(&image) - det.abs() * volume(&b)).abs() <= 1e-9 * volume(&image).max(1.0));
    }

    #[test]
    fn rotated_widths_match(seed in 0u64..1000) {
        let mut rng = RngStream::new(seed, 1).rng();
        let rot = affiq::grassmann::sample_rotation(3, &mut rng).unwrap();
        let b = random_poly(3, 15, seed);
        let rb = b.affine_image(&rot, &[0.0; 3]).unwrap();
        let theta = affiq::grassmann::sample_sphere(3, &mut rng);
        let back = rot.tr_mul_vec(theta.as_slice()).unwrap();
        let w = |body: &Body, x: &[f64]| {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            body.support(x).unwrap() + body.support(&neg).unwrap()
        };
        prop_assert!((w(&rb, theta.as_slice()) - w(&b, back.as_slice())).abs() < 1e-12);
    }

    #[test]
    fn shadow_system_volume_profile(seed in 0u64..1000, t in 0.0f64..1.0) {
        let b = random_poly(3, 12, seed);
        let u = affiq::grassmann::sample_sphere(3, &mut RngStream::new(seed, 2).rng());
        let fam = ShadowFamily::new(&b, u.as_slice(), 200, RngStream::new(seed, label_hash("prop"))).unwrap();
        let k = volume(&b);
        let v0 = volume(&fam.at(0.0).unwrap());
        let vt = volume(&fam.at(t).unwrap());
        let tol = 1e-9 * k;
        // inner approximations of volume-preserving members
        prop_assert!(vt <= k + tol);
        // even and convex in t, so smallest at the symmetral
        prop_assert!((volume(&fam.at(-t).unwrap()) - vt).abs() <= tol);
        prop_assert!(vt >= v0 - tol);
        prop_assert!(vt <= (1.0 - t) * v0 + t * k + tol);
    }

    #[test]
    fn difference_body_dominates(seed in 0u64..1000) {
        let b = random_poly(3, 10, seed);
        let d = difference_body(&b).unwrap();
        prop_assert!(volume(&d) >= 8.0 * volume(&b) * (1.0 - 1e-9));
    }

    #[test]
    fn report_json_round_trip(margins in prop::collection::vec((-1.0f64..1.0, 0.0f64..0.1), 1..8), seed in any::<u64>()) {
        let cases = margins
            .iter()
            .enumerate()
            .map(|(i, &(m, se))| CaseRecord::new(format!("c{i}"), "cube3", 3).k(1).p(-3.0).values(m, 0.0, se, Assertion::at_least()))
            .collect();
        let r = SuiteReport::new("demo", seed, 100, cases).with_note("x", 0.25);
        let back = SuiteReport::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
    }

    #[test]
    fn substreams_are_reproducible(seed in any::<u64>(), i in any::<u64>()) {
        let s = RngStream::new(seed, 3).substream(i);
        let (a, b): (Vec<f64>, Vec<f64>) = {
            let (mut x, mut y) = (s.rng(), s.rng());
            ((0..5).map(|_| x.uniform()).collect(), (0..5).map(|_| y.uniform()).collect())
        };
        prop_assert_eq!(a, b);
    }

    #[test]
    fn grassmannian_frames_are_orthonormal(seed in any::<u64>(), n in 2usize..6, k in 1usize..5) {
        prop_assume!(k <= n);
        prop_assert!(subspace(n, k, seed).orthonormality_defect() < 1e-12);
    }
}

#[test]
fn builtin_catalog_builds_every_entry() {
    let cat = BodyCatalog::builtin();
    let ids: Vec<&str> = cat.ids().collect();
    assert!(ids.len() >= 20);
    for id in ids {
        let b = cat.body(id).unwrap();
        let back = Body::from_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(b, back, "{id}");
        assert!(volume(&b) > 0.0, "{id}");
    }
    let _ = Vector::zeros(1);
}

use std::f64::consts::{PI, TAU};

use l2ext_core::{DomainKind, Error, PlanarDomain};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn domains() -> Vec<PlanarDomain> {
    vec![
        PlanarDomain::unit_disc(),
        PlanarDomain::disc(2.0).unwrap(),
        PlanarDomain::conformal(vec![c(1.0, 0.0), c(0.3, 0.0)]).unwrap(),
        PlanarDomain::conformal(vec![c(0.8, 0.3), c(0.2, -0.1), c(0.05, 0.02)]).unwrap(),
    ]
}

fn random_zeta(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    Complex64::from_polar(r_max * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>())
}

#[test]
fn green_is_negative_on_random_interior_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in domains() {
        let mut checked = 0;
        while checked < 10_000 {
            let z = d.map_from_disc(random_zeta(&mut rng, 0.999));
            if !d.contains(z).unwrap() {
                continue;
            }
            let g = d.green(z).unwrap();
            assert!(g < 0.0, "{:?}: G({z}) = {g}", d.kind());
            checked += 1;
        }
    }
}

#[test]
fn conformal_green_is_log_of_the_parameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in domains().into_iter().skip(2) {
        for _ in 0..500 {
            let zeta = random_zeta(&mut rng, 0.98);
            if zeta.norm() < 1e-6 {
                continue;
            }
            let g = d.green(d.map_from_disc(zeta)).unwrap();
            let expected = zeta.norm_sqr().ln();
            assert!((g - expected).abs() < 1e-9, "ζ = {zeta}: {g} vs {expected}");
        }
    }
}

#[test]
fn shift_at_origin_scales_like_two_log_r() {
    for r in [0.5, 1.0, 2.0, 5.0] {
        let d = PlanarDomain::disc(r).unwrap();
        let b = d.shift(c(0.0, 0.0)).unwrap();
        assert!((b - 2.0 * f64::ln(r)).abs() < 1e-14, "R = {r}: {b}");
        assert!((d.optimal_constant() - PI * r * r).abs() < 1e-12 * r * r);
    }
}

#[test]
fn green_plus_shift_is_log_modulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for d in domains() {
        for _ in 0..200 {
            let z = d.map_from_disc(random_zeta(&mut rng, 0.95));
            if z.norm() < 1e-8 {
                continue;
            }
            let residual = d.green(z).unwrap() + d.shift(z).unwrap() - z.norm_sqr().ln();
            assert!(residual.abs() < 1e-12, "{z}: {residual}");
        }
    }
}

#[test]
fn shift_has_the_mean_value_property() {
    // B is harmonic, so the trapezoid rule on a small circle is spectrally exact
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let radius = 0.05;
    for d in domains() {
        for _ in 0..40 {
            let z = d.map_from_disc(random_zeta(&mut rng, 0.7));
            if d.distance_to_boundary(z) < 4.0 * radius {
                continue;
            }
            let avg = (0..64)
                .map(|k| d.shift(z + Complex64::from_polar(radius, TAU * k as f64 / 64.0)).unwrap())
                .sum::<f64>()
                / 64.0;
            let residual = (d.shift(z).unwrap() - avg).abs();
            assert!(residual < 1e-8, "{:?} at {z}: {residual}", d.kind());
        }
    }
}

#[test]
fn shift_is_continuous_through_the_origin() {
    for d in domains() {
        let b0 = d.shift(c(0.0, 0.0)).unwrap();
        let near = d.shift(c(1e-7, -2e-7)).unwrap();
        assert!((near - b0).abs() < 1e-5, "{:?}: {near} vs {b0}", d.kind());
    }
}

#[test]
fn example_values() {
    let d = PlanarDomain::conformal(vec![c(1.0, 0.0), c(0.3, 0.0)]).unwrap();
    // forward map oracle: f(0.4) = 0.4 + 0.3·0.16
    let z = c(0.4 + 0.3 * 0.16, 0.0);
    assert!((d.green(z).unwrap() - f64::ln(0.16)).abs() < 1e-10);
    assert_eq!(d.shift(c(0.0, 0.0)).unwrap(), 0.0);
    assert!((d.optimal_constant() - PI).abs() < 1e-15);

    let unit = PlanarDomain::unit_disc();
    assert!((unit.green(c(0.5, 0.0)).unwrap() - f64::ln(0.25)).abs() < 1e-15);
    let disc2 = PlanarDomain::disc(2.0).unwrap();
    assert!((disc2.green(c(1.0, 0.0)).unwrap() - f64::ln(0.25)).abs() < 1e-15);
    assert!((disc2.optimal_constant() - 4.0 * PI).abs() < 1e-12);
}

#[test]
fn boundary_samples_lie_on_the_boundary_in_order() {
    for d in domains() {
        let pts = d.boundary_sample(64).unwrap();
        assert_eq!(pts.len(), 64);
        for (k, p) in pts.iter().enumerate() {
            let zeta = d.map_to_disc(*p).unwrap();
            assert!((zeta.norm() - 1.0).abs() < 1e-9);
            let arg = zeta.arg().rem_euclid(TAU);
            let expected = TAU * k as f64 / 64.0;
            let diff = (arg - expected).abs();
            assert!(diff < 1e-9 || (TAU - diff) < 1e-9, "point {k}");
        }
    }
    for r in [1.0, 2.0] {
        let pts = PlanarDomain::disc(r).unwrap().boundary_sample(17).unwrap();
        let gaps: Vec<f64> = (0..17).map(|k| (pts[(k + 1) % 17] - pts[k]).norm()).collect();
        let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), g| (lo.min(*g), hi.max(*g)));
        assert!(hi / lo <= 2.0);
    }
}

#[test]
fn too_few_boundary_points_are_refused() {
    for n in [0, 1, 2] {
        let err = PlanarDomain::disc(2.0).unwrap().boundary_sample(n).unwrap_err();
        assert!(matches!(err, Error::DomainArgument { name: "n", .. }));
    }
}

#[test]
fn config_kinds_round_trip() {
    let kinds = [
        DomainKind::UnitDisc,
        DomainKind::Disc { radius: 2.5 },
        DomainKind::Conformal { coeffs: vec![[1.0, 0.0], [0.3, 0.0]] },
    ];
    for kind in kinds {
        let text = serde_json::to_string(&kind).unwrap();
        let back: DomainKind = serde_json::from_str(&text).unwrap();
        assert_eq!(back, kind);
        let d = PlanarDomain::from_kind(&back).unwrap();
        assert!(d.contains(c(0.0, 0.0)).unwrap());
    }
    assert!(PlanarDomain::disc(-1.0).is_err());
    assert!(PlanarDomain::disc(0.0).is_err());
}

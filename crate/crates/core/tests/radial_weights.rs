use std::f64::consts::{PI, TAU};

use l2ext_core::radial::{disc_mass, eval_u, eval_u_inverse, psi, SampledProfile};
use l2ext_core::{
    green_type_radial, prop31_check, regularize, sharper_constant_radial, Error, HartogsDomain, PlanarDomain,
    QuadratureSpec, RadialProfile, WeightField,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quad() -> QuadratureSpec {
    QuadratureSpec::AdaptiveRadial { target_err: 1e-10 }
}

/// π∫₀^∞ e^{−s−1/s} ds by the trapezoid rule after s = e^x, which turns the
/// integrand into the even, doubly exponentially decaying e^{−2cosh x}cosh x.
fn bessel_oracle() -> f64 {
    let h = 1e-3;
    let n = (8.0 / h) as i64;
    let sum: f64 = (-n..=n)
        .map(|k| {
            let x = k as f64 * h;
            (-2.0 * x.cosh()).exp() * x.cosh()
        })
        .sum();
    PI * h * sum
}

fn sampled_power_one() -> RadialProfile {
    let ts = [-8.0, -4.0, -2.0, -1.0, -0.75, -0.5, -0.25, -0.1];
    RadialProfile::Sampled { knots: SampledProfile::from_profile(&RadialProfile::power(1.0), &ts).unwrap() }
}

fn profiles() -> Vec<RadialProfile> {
    vec![
        RadialProfile::power(0.5),
        RadialProfile::power(1.0),
        RadialProfile::power(2.0),
        RadialProfile::Scaled { a: 0.3, p: 1.5 },
        sampled_power_one(),
        RadialProfile::Regularized { base: Some(Box::new(RadialProfile::power(1.0))), eps: 0.1 },
        RadialProfile::Regularized { base: None, eps: 0.5 },
    ]
}

#[test]
fn oracle_matches_the_bessel_value() {
    // 2πK₁(2) to ten digits
    assert!((bessel_oracle() - 0.878_803_253_6).abs() < 1e-9);
}

#[test]
fn u_examples() {
    let p1 = RadialProfile::power(1.0);
    assert_eq!(eval_u(&p1, -1.0).unwrap(), 1.0);
    assert_eq!(eval_u(&p1, -2.0).unwrap(), 0.5);
    assert_eq!(eval_u(&RadialProfile::power(2.0), -0.5).unwrap(), 4.0);
    assert!(matches!(eval_u(&p1, 0.0), Err(Error::DomainArgument { .. })));
    assert!(eval_u(&p1, 0.3).is_err());

    assert_eq!(eval_u_inverse(&p1, 1.0).unwrap(), -1.0);
    assert_eq!(eval_u_inverse(&p1, 4.0).unwrap(), -0.25);
    assert!(matches!(eval_u_inverse(&p1, 0.0), Err(Error::DomainArgument { .. })));
    assert!(eval_u_inverse(&p1, -1.0).is_err());
    let t = eval_u_inverse(&sampled_power_one(), 2.0).unwrap();
    assert!((t + 0.5).abs() < 1e-9, "{t}");
}

#[test]
fn psi_examples() {
    let p1 = RadialProfile::power(1.0);
    let w = Complex64::new((-0.5f64).exp(), 0.0);
    assert!((psi(&p1, w).unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(psi(&p1, Complex64::new(0.0, 0.0)).unwrap(), 0.0);
    let w2 = Complex64::new((-2.0f64).exp(), 0.0);
    assert!((psi(&RadialProfile::power(2.0), w2).unwrap() - 0.5).abs() < 1e-14);
    assert!(psi(&p1, Complex64::new(1.0, 0.0)).is_err());
    assert!(psi(&p1, Complex64::new(0.8, 0.8)).is_err());
}

#[test]
fn inverse_is_consistent_on_a_log_grid() {
    for profile in profiles() {
        // −ε log(1 − e^t) = s puts u⁻¹(s) near −e^{−s/ε}, below f64 range for large s
        let s_max = if matches!(profile, RadialProfile::Regularized { base: None, .. }) { 300.0 } else { 1e6 };
        for k in 0..=120 {
            let s = 10f64.powf(-6.0 + 12.0 * k as f64 / 120.0);
            if s > s_max {
                continue;
            }
            let t = eval_u_inverse(&profile, s).unwrap();
            assert!(t < 0.0);
            let back = eval_u(&profile, t).unwrap();
            assert!((back - s).abs() <= 1e-10 * s.max(1.0), "{profile:?} at s = {s}: {back}");
        }
    }
}

#[test]
fn psi_is_positive_and_nondecreasing() {
    for profile in profiles() {
        let mut prev = 0.0;
        for k in 1..400 {
            let r = k as f64 / 400.0;
            let v = psi(&profile, Complex64::from_polar(r, 0.7 * k as f64)).unwrap();
            assert!(v > 0.0, "{profile:?} at |w| = {r}");
            assert!(v >= prev, "{profile:?} decreases at |w| = {r}");
            prev = v;
        }
    }
}

#[test]
fn green_type_function_is_negative_on_the_lift() {
    let profile = RadialProfile::power(1.0);
    let cert = green_type_radial(&profile).unwrap();
    let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::radial(profile)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut n = 0;
    while n < 100_000 {
        let z = Complex64::from_polar(rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        let w = Complex64::from_polar(rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        if z.norm_sqr() == 0.0 || !hd.contains(z, w).unwrap() {
            continue;
        }
        let g = cert.g_tilde(z, w);
        assert!(g < 0.0, "G̃({z}, {w}) = {g}");
        let gap = g - z.norm_sqr().ln() - cert.a_tilde(z, w);
        assert!(gap.abs() < 1e-14);
        n += 1;
    }
}

#[test]
fn green_type_example_sums_both_terms() {
    let cert = green_type_radial(&RadialProfile::power(1.0)).unwrap();
    let z = Complex64::new((-1.0f64).exp(), 0.0);
    let w = Complex64::new((-0.5f64).exp(), 0.0);
    assert!((cert.g_tilde(z, w) + 1.0).abs() < 1e-14);
}

#[test]
fn disc_and_fibre_integrals_agree() {
    for p in [0.5, 1.0, 2.0] {
        let check = prop31_check(&RadialProfile::power(p), &quad()).unwrap();
        assert!(check.rel_err <= 1e-8, "p = {p}: {check:?}");
    }
    let oracle = bessel_oracle();
    let check = prop31_check(&RadialProfile::power(1.0), &quad()).unwrap();
    assert!((check.lhs - oracle).abs() < 1e-6);
    assert!((check.rhs - oracle).abs() < 1e-6);
    for profile in profiles() {
        let check = prop31_check(&profile, &quad()).unwrap();
        assert!(check.rel_err <= 1e-8, "{profile:?}: {check:?}");
    }
}

#[test]
fn sharper_constant_equals_the_fibre_side() {
    let p1 = RadialProfile::power(1.0);
    let s = sharper_constant_radial(&p1, &quad()).unwrap();
    assert!((s.value - bessel_oracle()).abs() < 1e-8);
    assert!(s.value < PlanarDomain::unit_disc().optimal_constant());
    for profile in profiles() {
        let s = sharper_constant_radial(&profile, &quad()).unwrap();
        let mass = disc_mass(&profile, &quad()).unwrap();
        assert!((s.value - mass.value).abs() < 1e-8 * mass.value, "{profile:?}");
    }
}

#[test]
fn regularisation_examples() {
    let d = PlanarDomain::unit_disc();
    let w = regularize(&WeightField::Zero, 1.0, &d).unwrap();
    assert_eq!(w.eval(Complex64::new(0.0, 0.0)), 0.0);
    let r = (1.0 - (-1.0f64).exp()).sqrt();
    assert!((w.eval(Complex64::new(0.0, r)) - 1.0).abs() < 1e-14);
    let err = regularize(&WeightField::Zero, 1.0, &PlanarDomain::disc(2.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Unsupported(_)));
    assert!(regularize(&WeightField::Zero, 0.0, &d).is_err());
    let tilted = regularize(&WeightField::quadratic(1.0, Complex64::new(0.4, 0.0)), 0.2, &d).unwrap();
    assert!(matches!(tilted, WeightField::Regularized { .. }));
    assert!(tilted.eval(Complex64::new(0.0, 0.0)).abs() < 1e-12);
}

#[test]
fn regularised_zero_weight_tends_to_the_disc_area() {
    // ∫_Δ (1 − |z|²)^ε dλ = π / (1 + ε)
    let d = PlanarDomain::unit_disc();
    let mut prev = 0.0;
    for eps in [0.4, 0.2, 0.1, 0.05, 0.01, 0.001] {
        let WeightField::Radial { profile } = regularize(&WeightField::Zero, eps, &d).unwrap() else {
            panic!("the zero weight regularises to a radial weight");
        };
        let s = sharper_constant_radial(&profile, &quad()).unwrap().value;
        assert!((s - PI / (1.0 + eps)).abs() < 1e-8, "ε = {eps}: {s}");
        assert!(s > prev);
        prev = s;
    }
    assert!(PI - prev < 4e-3);
}

#[test]
fn regularisation_limit_for_the_power_profile() {
    let d = PlanarDomain::unit_disc();
    let base = WeightField::radial(RadialProfile::power(1.0));
    let limit = sharper_constant_radial(&RadialProfile::power(1.0), &quad()).unwrap().value;
    let values: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let WeightField::Radial { profile } = regularize(&base, eps, &d).unwrap() else {
                panic!("radial bases stay radial");
            };
            sharper_constant_radial(&profile, &quad()).unwrap().value
        })
        .collect();
    let nonincreasing = values.windows(2).all(|v| v[1] <= v[0]);
    let gap = (values[3] - limit).abs();
    assert!(
        nonincreasing && gap <= 5e-3,
        "S_ε along ε = 0.4, 0.2, 0.1, 0.05: {values:?}; limit {limit}; gap at 0.05 = {gap:.5}"
    );
}

//! Radial weights `φ(z) = u(log|z|²)` on the unit disc: the profile `u`, its
//! inverse, the fibre function `ψ(w) = −u⁻¹(−log|w|²)`, the explicit
//! Green-type function `log|z|² + ψ(w)`, the disc/fibre integral identity and
//! the ε-regularisation `u(t) − ε log(1 − e^t)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::hartogs::{CertificateProvenance, GreenTypeCertificate};
use crate::quadrature::{integrate, integrate_with_breaks, Integral, QuadratureSpec};
use crate::weight::WeightField;

/// Knot data of a sampled profile together with the analytic tails grafted
/// onto it: `u(t) = u₀ e^{κ(t − t₀)}` left of the first knot and
/// `u(t) = A(−t)^{−q}` right of the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct SampledProfile {
    knots: Vec<(f64, f64)>,
    left_rate: f64,
    right_scale: f64,
    right_power: f64,
}

/// Tail parameters recorded for a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraftParameters {
    pub left_rate: f64,
    pub right_scale: f64,
    pub right_power: f64,
}

impl SampledProfile {
    /// Knots must be strictly increasing in `t < 0`, positive, strictly
    /// increasing in `u`, and convex (increasing secant slopes).
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 3 {
            return Err(Error::ProfileInvariant("a sampled profile needs at least 3 knots".into()));
        }
        for (k, &(t, u)) in knots.iter().enumerate() {
            if !(t < 0.0 && t.is_finite() && u > 0.0 && u.is_finite()) {
                return Err(Error::ProfileInvariant(format!("knot {k} = ({t}, {u}) needs t < 0 and u > 0")));
            }
        }
        let mut slopes = Vec::with_capacity(knots.len() - 1);
        for (k, pair) in knots.windows(2).enumerate() {
            let (t0, u0) = pair[0];
            let (t1, u1) = pair[1];
            if t1 <= t0 {
                return Err(Error::ProfileInvariant(format!("knots not increasing in t at index {k}")));
            }
            if u1 <= u0 {
                return Err(Error::ProfileInvariant(format!("profile not strictly increasing at knot {k}")));
            }
            slopes.push((u1 - u0) / (t1 - t0));
        }
        for (k, s) in slopes.windows(2).enumerate() {
            if s[1] < s[0] {
                return Err(Error::ProfileInvariant(format!(
                    "profile not convex at knot {}: slope {} follows {}",
                    k + 1,
                    s[1],
                    s[0]
                )));
            }
        }
        let (t0, u0) = knots[0];
        let (tn, un) = knots[knots.len() - 1];
        let left_rate = slopes[0] / u0;
        // C¹ power tail through the last knot with the last secant slope.
        let right_power = slopes[slopes.len() - 1] * (-tn) / un;
        let right_scale = un * (-tn).powf(right_power);
        let _ = t0;
        Ok(SampledProfile { knots, left_rate, right_scale, right_power })
    }

    /// Samples a closed-form profile at the given abscissae.
    pub fn from_profile(profile: &RadialProfile, ts: &[f64]) -> Result<Self> {
        let knots = ts.iter().map(|&t| Ok((t, profile.eval(t)?))).collect::<Result<Vec<_>>>()?;
        Self::new(knots)
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn graft(&self) -> GraftParameters {
        GraftParameters { left_rate: self.left_rate, right_scale: self.right_scale, right_power: self.right_power }
    }

    fn eval(&self, t: f64) -> f64 {
        let (t0, u0) = self.knots[0];
        let (tn, _) = self.knots[self.knots.len() - 1];
        if t <= t0 {
            return u0 * (self.left_rate * (t - t0)).exp();
        }
        if t >= tn {
            return self.right_scale * (-t).powf(-self.right_power);
        }
        let k = self.knots.partition_point(|&(tk, _)| tk <= t) - 1;
        let (ta, ua) = self.knots[k];
        let (tb, ub) = self.knots[k + 1];
        ua + (ub - ua) * (t - ta) / (tb - ta)
    }
}

impl TryFrom<Vec<[f64; 2]>> for SampledProfile {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        SampledProfile::new(v.into_iter().map(|k| (k[0], k[1])).collect())
    }
}

impl From<SampledProfile> for Vec<[f64; 2]> {
    fn from(p: SampledProfile) -> Self {
        p.knots.into_iter().map(|(t, u)| [t, u]).collect()
    }
}

/// Convex increasing profile `u` on `t < 0` with `u(−∞) = 0`, `u(0⁻) = +∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `u(t) = (−t)^{−p}`
    Power {
        p: f64,
    },
    /// `u(t) = a(−t)^{−p}`
    Scaled {
        a: f64,
        p: f64,
    },
    Sampled {
        knots: SampledProfile,
    },
    /// `u(t) − ε log(1 − e^t)`; `base = None` regularises the zero weight.
    Regularized {
        base: Option<Box<RadialProfile>>,
        eps: f64,
    },
}

impl RadialProfile {
    pub fn power(p: f64) -> Self {
        RadialProfile::Power { p }
    }

    /// Checks parameters and the shape invariants on a dense sample.
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialProfile::Power { p } | RadialProfile::Scaled { p, a: _ } if !(*p > 0.0 && p.is_finite()) => {
                return Err(Error::ProfileInvariant(format!("power must be positive, got {p}")));
            }
            RadialProfile::Scaled { a, .. } if !(*a > 0.0 && a.is_finite()) => {
                return Err(Error::ProfileInvariant(format!("scale must be positive, got {a}")));
            }
            RadialProfile::Regularized { base, eps } => {
                if !(*eps > 0.0 && eps.is_finite()) {
                    return Err(Error::ProfileInvariant(format!("regularisation ε must be positive, got {eps}")));
                }
                if let Some(b) = base {
                    b.validate()?;
                }
            }
            _ => {}
        }
        self.check_shape()
    }

    /// Secant slopes on a log-spaced sample of `t` must be positive and
    /// nondecreasing.
    fn check_shape(&self) -> Result<()> {
        const N: usize = 400;
        let ts: Vec<f64> = (0..N).map(|k| -(6.0 - 12.0 * k as f64 / (N - 1) as f64).exp()).collect();
        let us: Vec<f64> = ts.iter().map(|&t| self.value(t)).collect();
        let mut prev = 0.0;
        for k in 0..N - 1 {
            let slope = (us[k + 1] - us[k]) / (ts[k + 1] - ts[k]);
            if !(slope > 0.0) {
                return Err(Error::ProfileInvariant(format!("profile not strictly increasing near t = {}", ts[k])));
            }
            if slope < prev * (1.0 - 1e-9) {
                return Err(Error::ProfileInvariant(format!("profile not convex near t = {}", ts[k])));
            }
            prev = slope;
        }
        Ok(())
    }

    /// `u(t)` without argument checks; `+∞` for `t ≥ 0`.
    pub(crate) fn value(&self, t: f64) -> f64 {
        if t >= 0.0 {
            return f64::INFINITY;
        }
        match self {
            RadialProfile::Power { p } => (-t).powf(-p),
            RadialProfile::Scaled { a, p } => a * (-t).powf(-p),
            RadialProfile::Sampled { knots } => knots.eval(t),
            RadialProfile::Regularized { base, eps } => {
                let b = base.as_ref().map_or(0.0, |b| b.value(t));
                b - eps * log_one_minus_exp(t)
            }
        }
    }

    /// Abscissae `t` where `u` has a kink (knots of sampled profiles).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            RadialProfile::Sampled { knots } => knots.knots().iter().map(|&(t, _)| t).collect(),
            RadialProfile::Regularized { base: Some(b), .. } => b.kinks(),
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t < 0.0) {
            return Err(Error::DomainArgument { name: "t", value: t, expected: "t < 0" });
        }
        Ok(self.value(t))
    }

    /// The unique `t < 0` with `u(t) = s`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::DomainArgument { name: "s", value: s, expected: "s > 0" });
        }
        if s.is_infinite() {
            return Ok(0.0);
        }
        match self {
            RadialProfile::Power { p } => Ok(-s.powf(-1.0 / p)),
            RadialProfile::Scaled { a, p } => Ok(-(s / a).powf(-1.0 / p)),
            _ => self.bisect_inverse(s),
        }
    }

    /// Bisection in `x = ln(−t)`, which gives relative accuracy in `t` at
    /// every scale.
    fn bisect_inverse(&self, s: f64) -> Result<f64> {
        // u(−e^x) is decreasing in x
        let at = |x: f64| self.value(-x.exp());
        let mut lo = -1.0; // u(−e^lo) large
        let mut hi = 1.0; // u(−e^hi) small
        let mut guard = 0;
        while at(lo) <= s {
            lo -= 2.0 * (guard as f64 + 1.0);
            guard += 1;
            if guard > 40 {
                return Err(Error::ProfileInvariant(format!("cannot bracket u⁻¹({s}) from above")));
            }
        }
        guard = 0;
        while at(hi) >= s {
            hi += 2.0 * (guard as f64 + 1.0);
            guard += 1;
            if guard > 40 {
                return Err(Error::ProfileInvariant(format!("cannot bracket u⁻¹({s}) from below")));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-15 {
                break;
            }
            if at(mid) > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(-(0.5 * (lo + hi)).exp())
    }

    /// `−u⁻¹(s)` for `s > 0`, with the limits 0 at `s = ∞` and `+∞` at `s = 0`.
    fn neg_inverse_or_limit(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return f64::INFINITY;
        }
        self.inverse(s).map(|t| -t).unwrap_or(f64::NAN)
    }
}

/// `log(1 − e^t)` for `t < 0`, accurate at both ends.
fn log_one_minus_exp(t: f64) -> f64 {
    if t < -std::f64::consts::LN_2 {
        (-t.exp()).ln_1p()
    } else {
        (-t.exp_m1()).ln()
    }
}

/// `ψ(w) = −u⁻¹(−log|w|²)` for `|w| < 1`; `ψ(0) = 0`.
pub fn psi(profile: &RadialProfile, w: Complex64) -> Result<f64> {
    let r2 = w.norm_sqr();
    if !(r2 < 1.0) {
        return Err(Error::DomainArgument { name: "|w|", value: r2.sqrt(), expected: "|w| < 1" });
    }
    Ok(psi_of_log(profile, r2.ln()))
}

/// ψ as a function of `t = log|w|²`; `+∞` for `t ≥ 0`.
pub(crate) fn psi_of_log(profile: &RadialProfile, t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    profile.neg_inverse_or_limit(-t)
}

pub fn eval_u(profile: &RadialProfile, t: f64) -> Result<f64> {
    profile.eval(t)
}

pub fn eval_u_inverse(profile: &RadialProfile, s: f64) -> Result<f64> {
    profile.inverse(s)
}

/// The closed-form Green-type function `G̃ = log|z|² + ψ(w)` with `Ã = ψ`,
/// `B̃ = −ψ`.
pub fn green_type_radial(profile: &RadialProfile) -> Result<GreenTypeCertificate> {
    profile.validate()?;
    let (p1, p2, p3) = (profile.clone(), profile.clone(), profile.clone());
    Ok(GreenTypeCertificate::new(
        move |z: Complex64, w: Complex64| z.norm_sqr().ln() + psi_of_log(&p1, w.norm_sqr().ln()),
        move |_z: Complex64, w: Complex64| psi_of_log(&p2, w.norm_sqr().ln()),
        move |_z: Complex64, w: Complex64| -psi_of_log(&p3, w.norm_sqr().ln()),
        CertificateProvenance::RadialClosedForm,
    ))
}

/// Both sides of the disc/fibre identity and their relative discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

/// `2π∫₀¹ e^{−u(log r²)} r dr` against `2π∫₀¹ e^{u⁻¹(−log r²)} r dr`, each
/// by its own adaptive integration in `r` (no shared substitution).
pub fn prop31_check(profile: &RadialProfile, quad: &QuadratureSpec) -> Result<IdentityCheck> {
    profile.validate()?;
    quad.validate()?;
    let tol = quad.target();
    let kinks = profile.kinks();
    let lhs_breaks: Vec<f64> = kinks.iter().map(|t| (0.5 * t).exp()).collect();
    let rhs_breaks: Vec<f64> = kinks.iter().map(|&t| (-0.5 * profile.value(t)).exp()).collect();
    let lhs = integrate_with_breaks(
        |r| {
            let t = (r * r).ln();
            2.0 * PI * (-profile.value(t)).exp() * r
        },
        0.0,
        1.0,
        &lhs_breaks,
        tol,
        tol,
    )?;
    let rhs = integrate_with_breaks(
        |r| {
            let s = -(r * r).ln();
            if s <= 0.0 {
                return 0.0;
            }
            2.0 * PI * (-profile.neg_inverse_or_limit(s)).exp() * r
        },
        0.0,
        1.0,
        &rhs_breaks,
        tol,
        tol,
    )?;
    Ok(IdentityCheck {
        lhs: lhs.value,
        rhs: rhs.value,
        rel_err: (lhs.value - rhs.value).abs() / lhs.value,
        lhs_error: lhs.error,
        rhs_error: rhs.error,
    })
}

/// `∫_Δ e^{−φ} dλ` for a radial weight, by adaptive integration in `r`.
pub fn disc_mass(profile: &RadialProfile, quad: &QuadratureSpec) -> Result<Integral> {
    let tol = quad.target();
    let breaks: Vec<f64> = profile.kinks().iter().map(|t| (0.5 * t).exp()).collect();
    integrate_with_breaks(|r| 2.0 * PI * (-profile.value((r * r).ln())).exp() * r, 0.0, 1.0, &breaks, tol, tol)
}

/// The sharper constant `∫_{|w|<1} e^{−ψ(w)} dλ(w) = π∫_{−∞}^0 e^{u⁻¹(−t)} e^t dt`.
///
/// The integrand is bounded by `e^t`, so the lower tail is cut at the
/// `t_cut` where `π e^{t_cut}` falls below `1e-14` of the integral; the cut
/// mass is added to the reported error.
pub fn sharper_constant_radial(profile: &RadialProfile, quad: &QuadratureSpec) -> Result<Integral> {
    profile.validate()?;
    quad.validate()?;
    let tol = quad.target();
    let f = |t: f64| {
        if t >= 0.0 {
            return 0.0;
        }
        PI * (t - profile.neg_inverse_or_limit(-t)).exp()
    };
    let rough = integrate(f, -40.0, 0.0, 1e-6, 1e-6)?;
    let t_cut = (1e-14 * rough.value).ln().min(-1.0);
    let breaks: Vec<f64> = profile.kinks().iter().map(|&t| -profile.value(t)).collect();
    let fine = integrate_with_breaks(f, t_cut, 0.0, &breaks, tol, tol)?;
    Ok(Integral {
        value: fine.value,
        error: fine.error + PI * t_cut.exp(),
        evaluations: rough.evaluations + fine.evaluations,
    })
}

/// `φ − ε log(1 − |z|²)` on the unit disc. Radial bases stay radial with
/// profile `u(t) − ε log(1 − e^t)`.
pub fn regularize(base: &WeightField, eps: f64, domain: &PlanarDomain) -> Result<WeightField> {
    if !domain.is_unit_disc() {
        return Err(Error::Unsupported("ε-regularisation is defined on the unit disc only".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::DomainArgument { name: "eps", value: eps, expected: "ε > 0" });
    }
    Ok(match base {
        WeightField::Zero => WeightField::Radial { profile: RadialProfile::Regularized { base: None, eps } },
        WeightField::Radial { profile } => {
            WeightField::Radial { profile: RadialProfile::Regularized { base: Some(Box::new(profile.clone())), eps } }
        }
        other => WeightField::Regularized { base: Box::new(other.clone()), eps },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::AdaptiveRadial { target_err: 1e-10 }
    }

    #[test]
    fn power_profile_values() {
        let p1 = RadialProfile::power(1.0);
        assert_eq!(eval_u(&p1, -1.0).unwrap(), 1.0);
        assert_eq!(eval_u(&p1, -2.0).unwrap(), 0.5);
        assert_eq!(eval_u(&RadialProfile::power(2.0), -0.5).unwrap(), 4.0);
        assert!(eval_u(&p1, 0.0).is_err());
        assert!(eval_u(&p1, 0.5).is_err());
    }

    #[test]
    fn power_profile_inverse() {
        let p1 = RadialProfile::power(1.0);
        assert_eq!(eval_u_inverse(&p1, 1.0).unwrap(), -1.0);
        assert_eq!(eval_u_inverse(&p1, 4.0).unwrap(), -0.25);
        assert!(eval_u_inverse(&p1, 0.0).is_err());
        assert!(eval_u_inverse(&p1, -1.0).is_err());
    }

    #[test]
    fn sampled_inverse_matches_generating_family() {
        let ts: Vec<f64> = vec![-8.0, -4.0, -2.0, -1.0, -0.75, -0.5, -0.25, -0.1];
        let sampled =
            RadialProfile::Sampled { knots: SampledProfile::from_profile(&RadialProfile::power(1.0), &ts).unwrap() };
        sampled.validate().unwrap();
        let t = eval_u_inverse(&sampled, 2.0).unwrap();
        assert!((t + 0.5).abs() < 1e-9, "{t}");
    }

    #[test]
    fn sampled_rejects_non_convex_knots() {
        let err = SampledProfile::new(vec![(-3.0, 0.1), (-2.0, 1.0), (-1.0, 1.2)]).unwrap_err();
        assert!(matches!(err, Error::ProfileInvariant(_)));
        assert!(SampledProfile::new(vec![(-3.0, 0.3), (-2.0, 0.2), (-1.0, 1.2)]).is_err());
    }

    #[test]
    fn sampled_grafts_are_recorded_and_smooth() {
        let ts = [-4.0, -2.0, -1.0, -0.5];
        let s = SampledProfile::from_profile(&RadialProfile::power(1.0), &ts).unwrap();
        let g = s.graft();
        assert!(g.left_rate > 0.0 && g.right_power > 0.0 && g.right_scale > 0.0);
        // continuity at both junctions
        assert!((s.eval(-4.0 - 1e-12) - 0.25).abs() < 1e-10);
        assert!((s.eval(-0.5 + 1e-12) - 2.0).abs() < 1e-9);
        assert!(s.eval(-1e-9) > 4e4 && s.eval(-1e-12) > 1e6);
    }

    #[test]
    fn psi_values() {
        let p1 = RadialProfile::power(1.0);
        let w = Complex64::new((-0.5f64).exp(), 0.0);
        assert!((psi(&p1, w).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(psi(&p1, Complex64::new(0.0, 0.0)).unwrap(), 0.0);
        let w2 = Complex64::new(0.0, (-2.0f64).exp());
        assert!((psi(&RadialProfile::power(2.0), w2).unwrap() - 0.5).abs() < 1e-14);
        assert!(psi(&p1, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn radial_certificate_sums_both_terms() {
        let cert = green_type_radial(&RadialProfile::power(1.0)).unwrap();
        let z = Complex64::new((-1.0f64).exp(), 0.0); // log|z|² = −2
        let w = Complex64::new((-0.5f64).exp(), 0.0); // ψ = 1
        assert!((cert.g_tilde(z, w) + 1.0).abs() < 1e-14);
        let residual = cert.g_tilde(z, w) - z.norm_sqr().ln() - cert.a_tilde(z, w);
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn identity_holds_for_power_profiles() {
        for p in [0.5, 1.0, 2.0] {
            let check = prop31_check(&RadialProfile::power(p), &quad()).unwrap();
            assert!(check.rel_err <= 1e-8, "p = {p}: {check:?}");
        }
    }

    #[test]
    fn regularising_the_zero_weight() {
        let d = PlanarDomain::unit_disc();
        let w = regularize(&WeightField::Zero, 1.0, &d).unwrap();
        assert_eq!(w.eval(Complex64::new(0.0, 0.0)), 0.0);
        let r = (1.0 - (-1.0f64).exp()).sqrt();
        assert!((w.eval(Complex64::new(r, 0.0)) - 1.0).abs() < 1e-14);
        assert!(regularize(&WeightField::Zero, 1.0, &PlanarDomain::disc(2.0).unwrap()).is_err());
    }

    #[test]
    fn regularised_power_profile_is_convex_increasing() {
        let d = PlanarDomain::unit_disc();
        let base = WeightField::Radial { profile: RadialProfile::power(1.0) };
        let reg = regularize(&base, 0.1, &d).unwrap();
        let WeightField::Radial { profile } = reg else { panic!("radial base must stay radial") };
        profile.validate().unwrap();
        // oracle: divided differences on a dense uniform sample
        let ts: Vec<f64> = (1..2000).map(|k| -10.0 + 10.0 * k as f64 / 2000.0).collect();
        let us: Vec<f64> = ts.iter().map(|&t| profile.eval(t).unwrap()).collect();
        let slopes: Vec<f64> = us.windows(2).zip(ts.windows(2)).map(|(u, t)| (u[1] - u[0]) / (t[1] - t[0])).collect();
        assert!(slopes.iter().all(|&s| s > 0.0));
        assert!(slopes.windows(2).all(|s| s[1] >= s[0]));
    }

    #[test]
    fn sharper_constant_is_below_pi() {
        let s = sharper_constant_radial(&RadialProfile::power(1.0), &quad()).unwrap();
        let check = prop31_check(&RadialProfile::power(1.0), &quad()).unwrap();
        assert!((s.value - check.rhs).abs() < 1e-9);
        assert!(s.value < PlanarDomain::unit_disc().optimal_constant());
    }

    #[test]
    fn profile_parameters_are_validated() {
        assert!(RadialProfile::power(-1.0).validate().is_err());
        assert!(RadialProfile::Scaled { a: 0.0, p: 1.0 }.validate().is_err());
        assert!(RadialProfile::Regularized { base: None, eps: 0.0 }.validate().is_err());
    }
}

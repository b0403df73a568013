//! Subharmonic weights `φ` with `φ(0) = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::radial::RadialProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightField {
    Zero,
    /// `φ(z) = u(log|z|²)`, unit disc only.
    Radial {
        profile: RadialProfile,
    },
    /// `φ(z) = α|z − a|² − α|a|²`
    Quadratic {
        alpha: f64,
        center: [f64; 2],
    },
    /// `φ(z) − ε log(1 − |z|²)` for a non-radial base.
    Regularized {
        base: Box<WeightField>,
        eps: f64,
    },
}

impl WeightField {
    pub fn quadratic(alpha: f64, center: Complex64) -> Self {
        WeightField::Quadratic { alpha, center: [center.re, center.im] }
    }

    pub fn radial(profile: RadialProfile) -> Self {
        WeightField::Radial { profile }
    }

    /// `φ(z)`; `+∞` where a radial or regularised weight blows up (`|z| ≥ 1`).
    pub fn eval(&self, z: Complex64) -> f64 {
        match self {
            WeightField::Zero => 0.0,
            WeightField::Radial { profile } => {
                let r2 = z.norm_sqr();
                if r2 == 0.0 {
                    0.0
                } else {
                    profile.value(r2.ln())
                }
            }
            WeightField::Quadratic { alpha, center } => {
                let a = Complex64::new(center[0], center[1]);
                alpha * ((z - a).norm_sqr() - a.norm_sqr())
            }
            WeightField::Regularized { base, eps } => {
                let r2 = z.norm_sqr();
                if r2 >= 1.0 {
                    return f64::INFINITY;
                }
                base.eval(z) - eps * (-r2).ln_1p()
            }
        }
    }

    /// True for weights depending only on `|z|` (including `φ ≡ 0`).
    pub fn is_radial(&self) -> bool {
        matches!(self, WeightField::Zero | WeightField::Radial { .. })
    }

    pub fn radial_profile(&self) -> Option<&RadialProfile> {
        match self {
            WeightField::Radial { profile } => Some(profile),
            _ => None,
        }
    }

    /// Closed-form families whose second derivatives exist everywhere on the
    /// open domain.
    pub fn is_smooth_parametric(&self) -> bool {
        match self {
            WeightField::Zero | WeightField::Quadratic { .. } => true,
            WeightField::Regularized { base, .. } => base.is_smooth_parametric(),
            WeightField::Radial { .. } => false,
        }
    }

    /// Short label for summaries.
    pub fn label(&self) -> String {
        match self {
            WeightField::Zero => "zero".into(),
            WeightField::Radial { profile } => match profile {
                RadialProfile::Power { p } => format!("radial_power(p={p})"),
                RadialProfile::Scaled { a, p } => format!("radial_scaled(a={a},p={p})"),
                RadialProfile::Sampled { knots } => format!("radial_sampled({} knots)", knots.knots().len()),
                RadialProfile::Regularized { base, eps } => match base {
                    None => format!("regularized(zero,eps={eps})"),
                    Some(b) => {
                        format!("regularized({},eps={eps})", WeightField::Radial { profile: (**b).clone() }.label())
                    }
                },
            },
            WeightField::Quadratic { alpha, center } => {
                format!("quadratic(alpha={alpha},a={}{:+}i)", center[0], center[1])
            }
            WeightField::Regularized { base, eps } => format!("regularized({},eps={eps})", base.label()),
        }
    }

    /// Parameter checks, `φ(0) = 0`, and a discrete sub-mean-value check on
    /// a polar sample of the domain.
    pub fn validate(&self, domain: &PlanarDomain) -> Result<()> {
        match self {
            WeightField::Zero => {}
            WeightField::Radial { profile } => {
                if !domain.is_unit_disc() {
                    return Err(Error::WeightInvariant("radial weights are defined on the unit disc".into()));
                }
                profile.validate()?;
            }
            WeightField::Quadratic { alpha, center } => {
                if !(*alpha >= 0.0 && alpha.is_finite() && center.iter().all(|c| c.is_finite())) {
                    return Err(Error::WeightInvariant(format!(
                        "quadratic weight needs finite α ≥ 0 and a finite centre, got α = {alpha}"
                    )));
                }
            }
            WeightField::Regularized { base, eps } => {
                if !domain.is_unit_disc() {
                    return Err(Error::Unsupported("ε-regularisation is defined on the unit disc only".into()));
                }
                if !(*eps > 0.0 && eps.is_finite()) {
                    return Err(Error::WeightInvariant(format!("regularisation ε must be positive, got {eps}")));
                }
                base.validate(domain)?;
            }
        }
        let at0 = self.eval(Complex64::new(0.0, 0.0));
        if at0.abs() > 1e-12 {
            return Err(Error::WeightInvariant(format!("φ(0) = {at0}, expected 0")));
        }
        self.check_sub_mean_value(domain)
    }

    fn check_sub_mean_value(&self, domain: &PlanarDomain) -> Result<()> {
        let rin = domain.inradius();
        let rho = 0.02 * rin;
        const M: usize = 32;
        for i in 1..10 {
            let r = 0.85 * rin * i as f64 / 9.0;
            for j in 0..12 {
                let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / 12.0);
                let centre = self.eval(z);
                let avg = (0..M)
                    .map(|k| self.eval(z + Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / M as f64)))
                    .sum::<f64>()
                    / M as f64;
                let tol = 1e-9 * (1.0 + centre.abs());
                if !(centre <= avg + tol) {
                    return Err(Error::WeightInvariant(format!(
                        "sub-mean-value fails at {z}: φ = {centre}, circle average {avg}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `φ_{zz̄} = ¼Δφ` by central differences with step `h`.
    pub fn levi_density(&self, z: Complex64, h: f64) -> f64 {
        let c = self.eval(z);
        let sum = self.eval(z + h)
            + self.eval(z - h)
            + self.eval(z + Complex64::new(0.0, h))
            + self.eval(z - Complex64::new(0.0, h));
        (sum - 4.0 * c) / (4.0 * h * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_weight_vanishes_at_origin() {
        let w = WeightField::quadratic(1.0, Complex64::new(0.4, 0.0));
        assert_eq!(w.eval(Complex64::new(0.0, 0.0)), 0.0);
        assert!((w.eval(Complex64::new(0.4, 0.0)) + 0.16).abs() < 1e-15);
        w.validate(&PlanarDomain::unit_disc()).unwrap();
    }

    #[test]
    fn levi_density_matches_quarter_laplacian() {
        let w = WeightField::quadratic(1.0, Complex64::new(0.4, 0.0));
        let d = w.levi_density(Complex64::new(0.1, -0.3), 1e-4);
        assert!((d - 1.0).abs() < 1e-6, "{d}");
        let w = WeightField::quadratic(0.5, Complex64::new(-0.3, 0.2));
        assert!((w.levi_density(Complex64::new(0.2, 0.2), 1e-4) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn superharmonic_weight_is_rejected() {
        let w = WeightField::Quadratic { alpha: -1.0, center: [0.0, 0.0] };
        assert!(w.validate(&PlanarDomain::unit_disc()).is_err());
    }

    #[test]
    fn radial_weight_needs_unit_disc() {
        let w = WeightField::radial(RadialProfile::power(1.0));
        assert!(w.validate(&PlanarDomain::disc(2.0).unwrap()).is_err());
        w.validate(&PlanarDomain::unit_disc()).unwrap();
        assert_eq!(w.eval(Complex64::new(0.0, 0.0)), 0.0);
        // log|z|² = −1  ⇒  φ = 1
        let z = Complex64::new((-0.5f64).exp(), 0.0);
        assert!((w.eval(z) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn serde_round_trip() {
        let w = WeightField::Regularized {
            base: Box::new(WeightField::quadratic(1.0, Complex64::new(0.4, 0.0))),
            eps: 0.1,
        };
        let s = serde_json::to_string(&w).unwrap();
        let back: WeightField = serde_json::from_str(&s).unwrap();
        assert_eq!(w, back);
    }
}

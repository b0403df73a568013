//! The Hartogs lift `Ω̃ = {(z, w) : z ∈ Ω, |w|² < e^{−φ(z)}}`, its boundary
//! classification, Levi sampling on the graph part and checks of
//! Green-type certificates.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::PlanarDomain;
use crate::envelope::stencil::complex_directions;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Integral};
use crate::weight::WeightField;

#[derive(Debug, Clone)]
pub struct HartogsDomain {
    base: PlanarDomain,
    weight: WeightField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Graph,
    Vertical,
    Corner,
    NotBoundary,
}

/// Minimum of the Levi form over sampled graph points, tangent vectors
/// normalised by `|ξ| = 1` in the `z` component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeviReport {
    pub min_eig: f64,
    pub max_eig: f64,
    pub samples: usize,
    pub step: f64,
    /// Points closer than this to the corner circle are excluded.
    pub corner_collar: f64,
}

impl HartogsDomain {
    pub fn build(base: PlanarDomain, weight: WeightField) -> Result<Self> {
        weight.validate(&base).map_err(|e| match e {
            Error::WeightInvariant(m) | Error::Unsupported(m) => {
                Error::InvalidDomain(format!("weight does not fit the base domain: {m}"))
            }
            other => other,
        })?;
        Ok(HartogsDomain { base, weight })
    }

    pub fn base(&self) -> &PlanarDomain {
        &self.base
    }

    pub fn weight(&self) -> &WeightField {
        &self.weight
    }

    /// `e^{−φ(z)}`, the squared fibre radius over `z`.
    pub fn fibre_radius_sq(&self, z: Complex64) -> f64 {
        (-self.weight.eval(z)).exp()
    }

    pub fn contains(&self, z: Complex64, w: Complex64) -> Result<bool> {
        Ok(self.base.contains(z)? && w.norm_sqr() < self.fibre_radius_sq(z))
    }

    /// Membership in `(z, t = log|w|²)` coordinates; `t = −∞` is `w = 0`.
    pub fn contains_log(&self, z: Complex64, t: f64) -> Result<bool> {
        Ok(self.base.contains(z)? && t < -self.weight.eval(z))
    }

    pub fn boundary_kind(&self, z: Complex64, w: Complex64, tol: f64) -> BoundaryKind {
        let inside_z = self.base.contains(z).unwrap_or(false) || self.base.distance_to_boundary(z) <= tol;
        let rho = self.fibre_radius_sq(z);
        let graph = inside_z && (w.norm_sqr() - rho).abs() <= tol;
        let vertical = self.base.distance_to_boundary(z) <= tol && w.norm_sqr() <= rho + tol;
        match (graph, vertical) {
            (true, true) => BoundaryKind::Corner,
            (true, false) => BoundaryKind::Graph,
            (false, true) => BoundaryKind::Vertical,
            (false, false) => BoundaryKind::NotBoundary,
        }
    }

    /// Samples `n` graph points away from the corner circle and evaluates
    /// the Levi form of `log|w|² + φ(z)` on the complex tangent line.
    ///
    /// The form of `log|w|²` vanishes, so on a tangent vector `(ξ, η)` the
    /// Levi form is `φ_{zz̄}|ξ|²`, computed with central differences.
    pub fn levi_sample(&self, n: usize) -> Result<LeviReport> {
        if !self.weight.is_smooth_parametric() {
            return Err(Error::Unsupported(format!(
                "Levi sampling needs a smooth parametric weight, got {}",
                self.weight.label()
            )));
        }
        if n == 0 {
            return Err(Error::DomainArgument { name: "n", value: 0.0, expected: "n >= 1" });
        }
        const COLLAR: f64 = 0.05;
        const STEP: f64 = 1e-4;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let total = 4 * n;
        let mut min_eig = f64::INFINITY;
        let mut max_eig = f64::NEG_INFINITY;
        let mut taken = 0;
        let mut k = 0usize;
        // sunflower points in the disc parameter, kept when clear of the collar
        while taken < n {
            if k >= total {
                return Err(Error::Precondition(format!(
                    "only {taken} of {n} graph samples lie outside the corner collar"
                )));
            }
            let r = ((k as f64 + 0.5) / total as f64).sqrt();
            let zeta = Complex64::from_polar(r, k as f64 * golden);
            k += 1;
            let z = self.base.map_from_disc(zeta * 0.999);
            if self.base.distance_to_boundary(z) <= COLLAR + STEP {
                continue;
            }
            let eig = self.weight.levi_density(z, STEP);
            min_eig = min_eig.min(eig);
            max_eig = max_eig.max(eig);
            taken += 1;
        }
        Ok(LeviReport { min_eig, max_eig, samples: taken, step: STEP, corner_collar: COLLAR })
    }
}

/// Where a Green-type certificate came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateProvenance {
    RadialClosedForm,
    MaSolution { c: f64 },
    Pullback,
}

type Field = Arc<dyn Fn(Complex64, Complex64) -> f64 + Send + Sync>;

/// `(G̃, Ã, B̃)` on `Ω̃` with the sandwich
/// `log|z|² + Ã ≥ G̃ ≥ log|z|² − B̃`.
#[derive(Clone)]
pub struct GreenTypeCertificate {
    g: Field,
    a: Field,
    b: Field,
    provenance: CertificateProvenance,
    psh_tol: f64,
}

impl fmt::Debug for GreenTypeCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GreenTypeCertificate")
            .field("provenance", &self.provenance)
            .field("psh_tol", &self.psh_tol)
            .finish_non_exhaustive()
    }
}

impl GreenTypeCertificate {
    pub fn new(
        g: impl Fn(Complex64, Complex64) -> f64 + Send + Sync + 'static,
        a: impl Fn(Complex64, Complex64) -> f64 + Send + Sync + 'static,
        b: impl Fn(Complex64, Complex64) -> f64 + Send + Sync + 'static,
        provenance: CertificateProvenance,
    ) -> Self {
        GreenTypeCertificate { g: Arc::new(g), a: Arc::new(a), b: Arc::new(b), provenance, psh_tol: 1e-9 }
    }

    /// Tolerance used for the sampled sub-mean-value check.
    pub fn with_psh_tolerance(mut self, tol: f64) -> Self {
        self.psh_tol = tol;
        self
    }

    /// `G̃ = G_{Ω,0}(z)`, `B̃ = B(z)`, `Ã = −B(z)`: both sandwich sides hold
    /// with equality.
    pub fn pullback(domain: &PlanarDomain) -> Self {
        let (d1, d2, d3) = (domain.clone(), domain.clone(), domain.clone());
        GreenTypeCertificate::new(
            move |z, _w| d1.green(z).unwrap_or(f64::NAN),
            move |z, _w| -d2.shift(z).unwrap_or(f64::NAN),
            move |z, _w| d3.shift(z).unwrap_or(f64::NAN),
            CertificateProvenance::Pullback,
        )
    }

    pub fn g_tilde(&self, z: Complex64, w: Complex64) -> f64 {
        (self.g)(z, w)
    }

    pub fn a_tilde(&self, z: Complex64, w: Complex64) -> f64 {
        (self.a)(z, w)
    }

    pub fn b_tilde(&self, z: Complex64, w: Complex64) -> f64 {
        (self.b)(z, w)
    }

    pub fn provenance(&self) -> CertificateProvenance {
        self.provenance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub provenance: CertificateProvenance,
    pub samples: usize,
    pub near_pole_samples: usize,
    /// Radius of the band `|z| < r₀` where the lower sandwich is checked.
    pub r0: f64,
    pub max_g_tilde: f64,
    pub negativity_ok: bool,
    /// `min (log|z|² + Ã − G̃)`
    pub upper_margin: f64,
    pub upper_ok: bool,
    /// `min (G̃ − log|z|² + B̃)` on the band
    pub lower_margin: f64,
    pub lower_ok: bool,
    /// `max (G̃ − circle average)` over sampled complex lines
    pub psh_violation: f64,
    pub psh_tol: f64,
    pub psh_ok: bool,
    pub psh_lines: usize,
    pub finite_ok: bool,
    pub all_ok: bool,
}

const PSH_DIRECTIONS: usize = 13;
const PSH_RADIUS: f64 = 1e-2;
const PSH_POINTS: usize = 16;

/// Random interior point of `Ω̃`, optionally with `|z| < r_max`.
fn sample_point(hd: &HartogsDomain, rng: &mut ChaCha8Rng, r_max: Option<f64>) -> (Complex64, Complex64) {
    loop {
        let z = match r_max {
            Some(r) => Complex64::from_polar(r * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>()),
            None => {
                let zeta = Complex64::from_polar(0.995 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
                hd.base.map_from_disc(zeta)
            }
        };
        if !hd.base.contains(z).unwrap_or(false) {
            continue;
        }
        let rho = hd.fibre_radius_sq(z).sqrt();
        let w = Complex64::from_polar(0.995 * rho * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>());
        return (z, w);
    }
}

/// Checks negativity, both sandwich sides and sampled plurisubharmonicity
/// of `G̃` on `n` random points of `Ω̃` (plus `n/4` near the pole).
pub fn verify_certificate(cert: &GreenTypeCertificate, hd: &HartogsDomain, n: usize) -> Result<CertificateReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6172_7467);
    let r0 = 0.1 * hd.base.inradius();
    let n_near = (n / 4).max(1);
    let dirs = complex_directions(PSH_DIRECTIONS)?;

    let mut max_g = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut lower = f64::INFINITY;
    let mut psh = f64::NEG_INFINITY;
    let mut psh_lines = 0;
    let mut finite_ok = true;

    let mut check_point = |z: Complex64, w: Complex64, near: bool| {
        let g = cert.g_tilde(z, w);
        let a = cert.a_tilde(z, w);
        let b = cert.b_tilde(z, w);
        if !(a.is_finite() && b.is_finite()) || g.is_nan() {
            finite_ok = false;
            return;
        }
        let log_z = z.norm_sqr().ln();
        max_g = max_g.max(g);
        upper = upper.min(log_z + a - g);
        if near {
            lower = lower.min(g - (log_z - b));
        }
        for &[da, db] in &dirs {
            // the 16-point rule cannot resolve the log pole when the circle
            // passes close to {z = 0}
            let ratio = z.norm() / (PSH_RADIUS * da.norm());
            if ratio > 0.25 && ratio < 4.0 {
                continue;
            }
            let inside = (0..PSH_POINTS).all(|j| {
                let e = Complex64::from_polar(PSH_RADIUS, TAU * j as f64 / PSH_POINTS as f64);
                hd.contains(z + da * e, w + db * e).unwrap_or(false)
            });
            if !inside {
                continue;
            }
            let avg = (0..PSH_POINTS)
                .map(|j| {
                    let e = Complex64::from_polar(PSH_RADIUS, TAU * j as f64 / PSH_POINTS as f64);
                    cert.g_tilde(z + da * e, w + db * e)
                })
                .sum::<f64>()
                / PSH_POINTS as f64;
            psh_lines += 1;
            psh = psh.max(g - avg);
        }
    };

    for _ in 0..n {
        let (z, w) = sample_point(hd, &mut rng, None);
        check_point(z, w, z.norm() < r0);
    }
    for _ in 0..n_near {
        let (z, w) = sample_point(hd, &mut rng, Some(r0));
        check_point(z, w, true);
    }

    let negativity_ok = max_g < 0.0;
    let scale = 1e-12;
    let upper_ok = upper >= -scale;
    let lower_ok = lower >= -scale;
    let psh_ok = psh <= cert.psh_tol;
    Ok(CertificateReport {
        provenance: cert.provenance,
        samples: n,
        near_pole_samples: n_near,
        r0,
        max_g_tilde: max_g,
        negativity_ok,
        upper_margin: upper,
        upper_ok,
        lower_margin: lower,
        lower_ok,
        psh_violation: psh,
        psh_tol: cert.psh_tol,
        psh_ok,
        psh_lines,
        finite_ok,
        all_ok: negativity_ok && upper_ok && lower_ok && psh_ok && finite_ok,
    })
}

/// `∫_{|w|<1} e^{B̃(0,w)} dλ(w) = π ∫ e^{t + B̃(0, e^{t/2})} dt`, cut where
/// the integrand is negligible; the cut mass is bounded by the integrand at
/// the cut times `π e^{t_cut}`, which assumes `B̃(0, ·)` is bounded below the cut.
pub fn fibre_constant(cert: &GreenTypeCertificate, tol: f64) -> Result<Integral> {
    let origin = Complex64::new(0.0, 0.0);
    let f = |t: f64| {
        if t >= 0.0 {
            return 0.0;
        }
        let b = cert.b_tilde(origin, Complex64::new((0.5 * t).exp(), 0.0));
        PI * (t + b).exp()
    };
    let rough = integrate(f, -40.0, 0.0, 1e-6, 1e-6)?;
    let t_cut = (1e-14 * rough.value).ln().min(-1.0);
    let fine = integrate(f, t_cut, 0.0, tol, tol)?;
    let mut cut = f(t_cut);
    if !cut.is_finite() {
        cut = 0.0;
    }
    Ok(Integral { value: fine.value, error: fine.error + cut, evaluations: rough.evaluations + fine.evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{green_type_radial, RadialProfile};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_lift_membership() {
        let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::Zero).unwrap();
        assert!(hd.contains(c(0.5, 0.0), c(0.0, 0.9)).unwrap());
        assert!(!hd.contains(c(0.5, 0.0), c(1.0, 0.0)).unwrap());
        assert!(!hd.contains(c(1.1, 0.0), c(0.0, 0.0)).unwrap());
    }

    #[test]
    fn radial_lift_membership() {
        let hd =
            HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::radial(RadialProfile::power(1.0))).unwrap();
        let z = c((-0.5f64).exp(), 0.0); // log|z|² = −1, φ = 1
        let w = c((-1.0f64).exp(), 0.0); // |w|² = e^{−2}
        assert!(hd.contains(z, w).unwrap());
        for r in [0.0, 0.3, 0.9, 0.999] {
            assert!(hd.contains(c(0.0, 0.0), c(r, 0.0)).unwrap());
        }
        assert!(!hd.contains(c(0.0, 0.0), c(1.0, 0.0)).unwrap());
    }

    #[test]
    fn mismatched_weight_is_rejected() {
        let err =
            HartogsDomain::build(PlanarDomain::disc(2.0).unwrap(), WeightField::radial(RadialProfile::power(1.0)));
        assert!(matches!(err, Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn boundary_classification() {
        let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::Zero).unwrap();
        assert_eq!(hd.boundary_kind(c(0.0, 0.0), c(1.0, 0.0), 1e-9), BoundaryKind::Graph);
        assert_eq!(hd.boundary_kind(c(1.0, 0.0), c(0.0, 0.0), 1e-9), BoundaryKind::Vertical);
        assert_eq!(hd.boundary_kind(c(0.0, 1.0), c(0.0, 1.0), 1e-9), BoundaryKind::Corner);
        assert_eq!(hd.boundary_kind(c(0.2, 0.0), c(0.3, 0.0), 1e-9), BoundaryKind::NotBoundary);
    }

    #[test]
    fn levi_form_of_quadratic_weights() {
        let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::quadratic(1.0, c(0.0, 0.0))).unwrap();
        let rep = hd.levi_sample(200).unwrap();
        assert!((rep.min_eig - 1.0).abs() < 1e-5 && (rep.max_eig - 1.0).abs() < 1e-5, "{rep:?}");
        let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::quadratic(1.0, c(0.4, 0.0))).unwrap();
        assert!((hd.levi_sample(200).unwrap().min_eig - 1.0).abs() < 1e-5);
        let flat = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::Zero).unwrap();
        assert!(flat.levi_sample(50).unwrap().min_eig.abs() < 1e-9);
        let radial =
            HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::radial(RadialProfile::power(1.0))).unwrap();
        assert!(matches!(radial.levi_sample(10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn radial_certificate_passes() {
        let p = RadialProfile::power(1.0);
        let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::radial(p.clone())).unwrap();
        let rep = verify_certificate(&green_type_radial(&p).unwrap(), &hd, 2000).unwrap();
        assert!(rep.all_ok, "{rep:?}");
        assert!(rep.upper_margin.abs() < 1e-12 && rep.lower_margin.abs() < 1e-12);
    }

    #[test]
    fn pullback_certificate_passes() {
        let d = PlanarDomain::unit_disc();
        let hd = HartogsDomain::build(d.clone(), WeightField::quadratic(1.0, c(0.4, 0.0))).unwrap();
        let rep = verify_certificate(&GreenTypeCertificate::pullback(&d), &hd, 1000).unwrap();
        assert!(rep.all_ok, "{rep:?}");
    }

    #[test]
    fn fibre_constant_of_the_pullback_is_the_classical_constant() {
        for d in [PlanarDomain::unit_disc(), PlanarDomain::disc(2.0).unwrap()] {
            let s = fibre_constant(&GreenTypeCertificate::pullback(&d), 1e-12).unwrap();
            // π e^{B(0)} with B(0) = 2 log R
            let r = d.disc_radius().unwrap();
            assert!((s.value - PI * r * r).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn positive_certificate_fails_negativity() {
        let hd = HartogsDomain::build(PlanarDomain::unit_disc(), WeightField::Zero).unwrap();
        let bad = GreenTypeCertificate::new(|_, _| 1.0, |_, _| 0.0, |_, _| 0.0, CertificateProvenance::Pullback);
        let rep = verify_certificate(&bad, &hd, 200).unwrap();
        assert!(!rep.negativity_ok && !rep.all_ok);
    }
}

//! Bounded simply connected planar domains containing the origin, their
//! Green functions with pole at 0 and the harmonic shift
//! `B(z) = log|z|² − G(z)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Newton tolerance on the disc parameter when inverting a conformal map.
pub const INVERSION_TOL: f64 = 1e-12;
const INVERSION_MAX_ITER: usize = 100;
const POLYGON_POINTS: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    UnitDisc,
    Disc {
        radius: f64,
    },
    /// Image of the unit disc under `f(ζ) = c₁ζ + c₂ζ² + …`; `coeffs[k]` is
    /// the coefficient of `ζ^{k+1}`, stored as `[re, im]`.
    Conformal {
        coeffs: Vec<[f64; 2]>,
    },
}

#[derive(Debug)]
struct ConformalData {
    coeffs: Vec<Complex64>,
    /// Boundary polygon `f(e^{iθ_k})`.
    polygon: Vec<Complex64>,
    /// Newton seeds: pairs (ζ, f(ζ)) on a polar grid of the closed disc and a
    /// thin exterior collar.
    seeds: Vec<(Complex64, Complex64)>,
    scale: f64,
}

/// A planar domain Ω with 0 ∈ Ω. Cheap to clone; evaluators are pure.
#[derive(Debug, Clone)]
pub struct PlanarDomain {
    kind: DomainKind,
    conformal: Option<Arc<ConformalData>>,
}

impl PartialEq for PlanarDomain {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    // f(z) = Σ c_k z^{k+1}; evaluate g(z) = Σ c_k z^k and its derivative.
    let mut g = Complex64::new(0.0, 0.0);
    let mut dg = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dg = dg * z + g;
        g = g * z + c;
    }
    (z * g, g + z * dg)
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let orient = |a: Complex64, b: Complex64, c: Complex64| (b - a).im * (c - a).re - (b - a).re * (c - a).im;
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn winding_number(polygon: &[Complex64], z: Complex64) -> i32 {
    let mut wn = 0;
    let n = polygon.len();
    for k in 0..n {
        let a = polygon[k];
        let b = polygon[(k + 1) % n];
        let cross = (b.re - a.re) * (z.im - a.im) - (z.re - a.re) * (b.im - a.im);
        if a.im <= z.im {
            if b.im > z.im && cross > 0.0 {
                wn += 1;
            }
        } else if b.im <= z.im && cross < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn distance_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let s = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * s)).norm()
}

impl ConformalData {
    fn build(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs[0].norm() == 0.0 {
            return Err(Error::InvalidDomain("conformal map needs c₁ ≠ 0".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidDomain("non-finite conformal coefficient".into()));
        }
        let polygon: Vec<Complex64> = (0..POLYGON_POINTS)
            .map(|k| horner(&coeffs, Complex64::from_polar(1.0, 2.0 * PI * k as f64 / POLYGON_POINTS as f64)).0)
            .collect();
        for k in 0..POLYGON_POINTS {
            let zeta = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / POLYGON_POINTS as f64);
            if horner(&coeffs, zeta).1.norm() < 1e-8 {
                return Err(Error::InvalidDomain(format!("f' vanishes on the unit circle near {zeta}")));
            }
        }
        // Simple closed boundary curve with winding number 1 about 0 implies
        // univalence on the disc.
        let n = polygon.len();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_cross(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n]) {
                    return Err(Error::InvalidDomain(format!(
                        "conformal map is not injective on the unit circle (boundary self-intersects near {})",
                        polygon[i]
                    )));
                }
            }
        }
        if winding_number(&polygon, Complex64::new(0.0, 0.0)) != 1 {
            return Err(Error::InvalidDomain("boundary curve does not wind once around 0".into()));
        }
        let scale = polygon.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let mut seeds = Vec::new();
        for i in 0..=30 {
            let rho = 1.15 * i as f64 / 30.0;
            let count = if i == 0 { 1 } else { 72 };
            for k in 0..count {
                let zeta = Complex64::from_polar(rho, 2.0 * PI * k as f64 / count as f64);
                seeds.push((zeta, horner(&coeffs, zeta).0));
            }
        }
        Ok(ConformalData { coeffs, polygon, seeds, scale })
    }

    fn distance_to_polygon(&self, z: Complex64) -> f64 {
        let n = self.polygon.len();
        (0..n).map(|k| distance_to_segment(z, self.polygon[k], self.polygon[(k + 1) % n])).fold(f64::INFINITY, f64::min)
    }

    /// Damped Newton for f(ζ) = z seeded from the nearest tabulated value.
    fn invert(&self, z: Complex64) -> Result<Complex64> {
        let (mut zeta, _) = self.seeds.iter().fold((Complex64::new(0.0, 0.0), f64::INFINITY), |acc, (s, fs)| {
            let d = (fs - z).norm_sqr();
            if d < acc.1 {
                (*s, d)
            } else {
                acc
            }
        });
        let mut last_step = f64::INFINITY;
        for _ in 0..INVERSION_MAX_ITER {
            let (f, df) = horner(&self.coeffs, zeta);
            let resid = f - z;
            if df.norm() == 0.0 {
                break;
            }
            let step = resid / df;
            let r0 = resid.norm();
            let mut lambda = 1.0;
            let mut next = zeta - step * lambda;
            while lambda > 1e-4 && (horner(&self.coeffs, next).0 - z).norm() > r0 && r0 > 0.0 {
                lambda *= 0.5;
                next = zeta - step * lambda;
            }
            last_step = (next - zeta).norm();
            zeta = next;
            if last_step < INVERSION_TOL {
                return Ok(zeta);
            }
        }
        Err(Error::IndeterminateMembership { point: z, last_step })
    }
}

impl PlanarDomain {
    pub fn unit_disc() -> Self {
        PlanarDomain { kind: DomainKind::UnitDisc, conformal: None }
    }

    pub fn disc(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("disc radius must be positive, got {radius}")));
        }
        Ok(PlanarDomain { kind: DomainKind::Disc { radius }, conformal: None })
    }

    /// Image of the unit disc under the polynomial `Σ coeffs[k] ζ^{k+1}`.
    pub fn conformal(coeffs: Vec<Complex64>) -> Result<Self> {
        let data = ConformalData::build(coeffs)?;
        let kind = DomainKind::Conformal { coeffs: data.coeffs.iter().map(|c| [c.re, c.im]).collect() };
        Ok(PlanarDomain { kind, conformal: Some(Arc::new(data)) })
    }

    pub fn from_kind(kind: &DomainKind) -> Result<Self> {
        match kind {
            DomainKind::UnitDisc => Ok(Self::unit_disc()),
            DomainKind::Disc { radius } => Self::disc(*radius),
            DomainKind::Conformal { coeffs } => {
                Self::conformal(coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect())
            }
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_unit_disc(&self) -> bool {
        matches!(self.kind, DomainKind::UnitDisc)
    }

    /// Whether the domain is a round disc centred at 0.
    pub fn disc_radius(&self) -> Option<f64> {
        match self.kind {
            DomainKind::UnitDisc => Some(1.0),
            DomainKind::Disc { radius } => Some(radius),
            DomainKind::Conformal { .. } => None,
        }
    }

    /// Forward conformal map from the unit disc (identity scaling for discs).
    pub fn map_from_disc(&self, zeta: Complex64) -> Complex64 {
        match (&self.kind, &self.conformal) {
            (_, Some(c)) => horner(&c.coeffs, zeta).0,
            (DomainKind::Disc { radius }, None) => zeta * *radius,
            _ => zeta,
        }
    }

    /// `|f'(ζ)|²`, the area Jacobian of [`map_from_disc`](Self::map_from_disc).
    pub fn jacobian(&self, zeta: Complex64) -> f64 {
        match (&self.kind, &self.conformal) {
            (_, Some(c)) => horner(&c.coeffs, zeta).1.norm_sqr(),
            (DomainKind::Disc { radius }, None) => radius * radius,
            _ => 1.0,
        }
    }

    /// Inverse of [`map_from_disc`](Self::map_from_disc); may return a
    /// parameter outside the unit disc when `z` is outside Ω.
    pub fn map_to_disc(&self, z: Complex64) -> Result<Complex64> {
        match (&self.kind, &self.conformal) {
            (_, Some(c)) => c.invert(z),
            (DomainKind::Disc { radius }, None) => Ok(z / *radius),
            _ => Ok(z),
        }
    }

    /// Membership test. Conformal images first rule out points clearly
    /// outside the boundary polygon, then decide by Newton inversion.
    pub fn contains(&self, z: Complex64) -> Result<bool> {
        match (&self.kind, &self.conformal) {
            (DomainKind::UnitDisc, _) => Ok(z.norm_sqr() < 1.0),
            (DomainKind::Disc { radius }, _) => Ok(z.norm() < *radius),
            (_, Some(c)) => {
                if z.norm() > 1.5 * c.scale
                    || (winding_number(&c.polygon, z) == 0 && c.distance_to_polygon(z) > 1e-3 * c.scale)
                {
                    return Ok(false);
                }
                Ok(c.invert(z)?.norm() < 1.0)
            }
            _ => unreachable!("conformal domains always carry their data"),
        }
    }

    /// Green function with logarithmic pole `log|z|²` at the origin.
    pub fn green(&self, z: Complex64) -> Result<f64> {
        if !self.contains(z)? {
            return Err(Error::OutsideDomain { point: z });
        }
        if z.norm_sqr() == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.map_to_disc(z)?.norm_sqr().ln())
    }

    /// `B(z) = log|z|² − G(z)`, continuous through the origin.
    pub fn shift(&self, z: Complex64) -> Result<f64> {
        if !self.contains(z)? {
            return Err(Error::OutsideDomain { point: z });
        }
        if z.norm_sqr() == 0.0 {
            return Ok(self.shift_at_origin());
        }
        match self.kind {
            DomainKind::UnitDisc => Ok(0.0),
            DomainKind::Disc { radius } => Ok(2.0 * radius.ln()),
            DomainKind::Conformal { .. } => Ok(2.0 * (z / self.map_to_disc(z)?).norm().ln()),
        }
    }

    /// `B(0)`, evaluated analytically per kind.
    pub fn shift_at_origin(&self) -> f64 {
        match (&self.kind, &self.conformal) {
            (DomainKind::UnitDisc, _) => 0.0,
            (DomainKind::Disc { radius }, _) => 2.0 * radius.ln(),
            (_, Some(c)) => c.coeffs[0].norm_sqr().ln(),
            _ => unreachable!(),
        }
    }

    /// The classical optimal extension constant `π e^{B(0)}`.
    pub fn optimal_constant(&self) -> f64 {
        PI * self.shift_at_origin().exp()
    }

    /// `n` boundary points ordered by the disc parameter (push-forward of
    /// equiangular points on the unit circle).
    pub fn boundary_sample(&self, n: usize) -> Result<Vec<Complex64>> {
        if n < 3 {
            return Err(Error::DomainArgument { name: "n", value: n as f64, expected: "n >= 3" });
        }
        Ok((0..n)
            .map(|k| {
                let theta = 2.0 * PI * k as f64 / n as f64;
                // exact axis points for the equiangular quadrants
                let zeta = match (4 * k) % n {
                    0 => match 4 * k / n {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    },
                    _ => Complex64::from_polar(1.0, theta),
                };
                self.map_from_disc(zeta)
            })
            .collect())
    }

    /// Radius of the largest disc about 0 inside Ω.
    pub fn inradius(&self) -> f64 {
        match (&self.kind, &self.conformal) {
            (DomainKind::UnitDisc, _) => 1.0,
            (DomainKind::Disc { radius }, _) => *radius,
            (_, Some(c)) => c.distance_to_polygon(Complex64::new(0.0, 0.0)),
            _ => unreachable!(),
        }
    }

    /// Radius of the smallest disc about 0 containing Ω.
    pub fn outer_radius(&self) -> f64 {
        match (&self.kind, &self.conformal) {
            (DomainKind::UnitDisc, _) => 1.0,
            (DomainKind::Disc { radius }, _) => *radius,
            (_, Some(c)) => c.scale,
            _ => unreachable!(),
        }
    }

    /// Euclidean distance from `z` to ∂Ω (polygonal approximation for
    /// conformal images).
    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        match (&self.kind, &self.conformal) {
            (DomainKind::UnitDisc, _) => (1.0 - z.norm()).abs(),
            (DomainKind::Disc { radius }, _) => (radius - z.norm()).abs(),
            (_, Some(c)) => c.distance_to_polygon(z),
            _ => unreachable!(),
        }
    }

    /// Radial projection onto ∂Ω: along the ray from 0 for discs, along the
    /// image of the ray in the disc parameter for conformal images. Points
    /// outside Ω go to the nearest sampled boundary point.
    pub fn project_to_boundary(&self, z: Complex64) -> Complex64 {
        match (&self.kind, &self.conformal) {
            (DomainKind::UnitDisc, _) | (DomainKind::Disc { .. }, _) => {
                let r = self.outer_radius();
                if z.norm() == 0.0 {
                    Complex64::new(r, 0.0)
                } else {
                    z * (r / z.norm())
                }
            }
            (_, Some(c)) => {
                if let Ok(zeta) = c.invert(z) {
                    if zeta.norm() < 1.0 && zeta.norm() > 0.0 {
                        return horner(&c.coeffs, zeta / zeta.norm()).0;
                    }
                }
                let k = (0..c.polygon.len())
                    .min_by(|&a, &b| (c.polygon[a] - z).norm().total_cmp(&(c.polygon[b] - z).norm()))
                    .unwrap_or(0);
                c.polygon[k]
            }
            _ => unreachable!(),
        }
    }
}

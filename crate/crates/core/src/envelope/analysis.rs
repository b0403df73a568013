use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::boundary::BoundaryData;
use super::grid::NodeKind;
use super::solver::EnvelopeSolution;
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::hartogs::{CertificateProvenance, GreenTypeCertificate};

/// `t ↦ v(0, t)` on the grid layers, closed at the fibre top `t = 0` with
/// the boundary value there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibreProfile {
    /// `(t, v)` from the floor upwards; the last point is the top.
    pub points: Vec<(f64, f64)>,
}

impl FibreProfile {
    /// Largest drop `v(t_k) − v(t_{k+1})` between consecutive grid points
    /// (the top point excluded); zero for a nondecreasing profile.
    pub fn monotonicity_defect(&self) -> f64 {
        let body = &self.points[..self.points.len() - 1];
        body.windows(2).map(|p| p[0].1 - p[1].1).fold(0.0, f64::max)
    }

    /// Largest violation of the discrete convexity inequality on three
    /// consecutive grid points, top excluded.
    pub fn convexity_defect(&self) -> f64 {
        let body = &self.points[..self.points.len() - 1];
        body.windows(3)
            .map(|p| {
                let (t0, v0) = p[0];
                let (t1, v1) = p[1];
                let (t2, v2) = p[2];
                let chord = v0 + (v2 - v0) * (t1 - t0) / (t2 - t0);
                v1 - chord
            })
            .fold(0.0, f64::max)
    }

    /// Value at the highest grid layer below the top.
    pub fn last_interior(&self) -> (f64, f64) {
        self.points[self.points.len() - 2]
    }

    pub fn top(&self) -> (f64, f64) {
        self.points[self.points.len() - 1]
    }
}

/// Slice of the solution over `z = 0`, bilinear in `(x, y)` on each layer.
pub fn slice_fiber(sol: &EnvelopeSolution) -> Result<FibreProfile> {
    let grid = sol.grid();
    let a = grid.axes();
    let n = a.n_xy;
    let hx = a.hx();
    let fx = (a.half_width / hx).clamp(0.0, (n - 1) as f64 - 1e-12);
    let i = fx as usize;
    let u = fx - i as f64;
    let top = -grid.hartogs().weight().eval(Complex64::new(0.0, 0.0));
    let vals = sol.values();
    let mut points = Vec::new();
    for k in 0..a.n_t {
        let t = a.t(k);
        if t >= top {
            break;
        }
        let at = |di: usize, dj: usize| vals[grid.index(i + di, i + dj, k)];
        let v = (1.0 - u) * ((1.0 - u) * at(0, 0) + u * at(1, 0)) + u * ((1.0 - u) * at(0, 1) + u * at(1, 1));
        if !v.is_finite() {
            return Err(Error::Numeric(format!("fibre slice at t = {t}")));
        }
        points.push((t, v));
    }
    if points.len() < 2 {
        return Err(Error::GridTooCoarse("fewer than two layers on the fibre over 0".into()));
    }
    let origin = Complex64::new(0.0, 0.0);
    points.push((top, sol.boundary().at_boundary(origin, top)));
    Ok(FibreProfile { points })
}

/// `S` with the enclosing interval `[lo, hi]`; `value` is the midpoint and
/// `uncertainty` the half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharperConstant {
    pub value: f64,
    pub uncertainty: f64,
    pub lo: f64,
    pub hi: f64,
    /// `π ∫ e^{t − v(0,t)} dt` over the grid part of the fibre.
    pub body: f64,
    /// Bound `π e^{t_min − min v}` on the part below the floor.
    pub tail_bound: f64,
    /// Extra mass in the last cell under the fibre top when `v` follows the
    /// convex lower bound there instead of the chord.
    pub top_cell_gap: f64,
}

/// `∫_a^b e^{ℓ(t)} dt` for `ℓ` affine with `ℓ(a) = ea`, `ℓ(b) = eb`.
fn exp_affine(a: f64, b: f64, ea: f64, eb: f64) -> f64 {
    let d = eb - ea;
    if d.abs() < 1e-8 {
        (b - a) * (0.5 * (ea + eb)).exp() * (1.0 + d * d / 24.0)
    } else {
        (b - a) * (eb.exp() - ea.exp()) / d
    }
}

/// `∫_a^b e^{t − ℓ(t)} dt` for `ℓ = min` of two affine functions given by
/// their values at `a` and `b`.
fn exp_min_affine(a: f64, b: f64, (pa, pb): (f64, f64), (qa, qb): (f64, f64)) -> f64 {
    let (da, db) = (pa - qa, pb - qb);
    if da * db >= 0.0 {
        let (la, lb) = if da + db <= 0.0 { (pa, pb) } else { (qa, qb) };
        return exp_affine(a, b, a - la, b - lb);
    }
    let x = da / (da - db);
    let m = a + x * (b - a);
    let lm = pa + x * (pb - pa);
    let (l1, l2) = if da < 0.0 { (pa, qb) } else { (qa, pb) };
    exp_affine(a, m, a - l1, m - lm) + exp_affine(m, b, m - lm, b - l2)
}

/// `π ∫_{|w|<1} e^{−v(0,w)} dλ(w) = π ∫ e^{t − v(0,t)} dt` from the fibre
/// profile, exact for `v` piecewise linear in `t`. Two parts are enclosed
/// rather than computed: the tail below the floor, in
/// `[0, π e^{t_min − min v}]`, and the last cell under the top, where a
/// convex nondecreasing `v` lies between the chord and the extension of the
/// previous secant (clipped below at the last value).
pub fn sharper_constant_ma(sol: &EnvelopeSolution) -> Result<SharperConstant> {
    if !(sol.final_change <= sol.options.tol) {
        return Err(Error::Precondition(format!(
            "solution is not converged (sup-change {:.3e} > tol {:.3e})",
            sol.final_change, sol.options.tol
        )));
    }
    let profile = slice_fiber(sol)?;
    let pts = &profile.points;
    let mut body = 0.0;
    for w in pts.windows(2) {
        let ((ta, va), (tb, vb)) = (w[0], w[1]);
        body += if vb.is_finite() {
            exp_affine(ta, tb, ta - va, tb - vb)
        } else {
            // integrand vanishes at an infinite top value
            0.5 * (tb - ta) * (ta - va).exp()
        };
    }
    body *= PI;
    let mut top_cell_gap = 0.0;
    if pts.len() >= 3 {
        let (tp, vp) = pts[pts.len() - 3];
        let (tl, vl) = pts[pts.len() - 2];
        let (tt, vt) = pts[pts.len() - 1];
        let slope = ((vl - vp) / (tl - tp)).max(0.0);
        let ext = (vl, vl + slope * (tt - tl));
        let upper = if vt.is_finite() {
            exp_min_affine(tl, tt, ext, (vl, vt))
        } else {
            exp_affine(tl, tt, tl - ext.0, tt - ext.1)
        };
        let chord =
            if vt.is_finite() { exp_affine(tl, tt, tl - vl, tt - vt) } else { 0.5 * (tt - tl) * (tl - vl).exp() };
        top_cell_gap = PI * (upper - chord).max(0.0);
    }
    let min_v = sol
        .values()
        .iter()
        .zip(sol.grid().kinds())
        .filter(|(_, k)| **k == NodeKind::Interior)
        .map(|(v, _)| *v)
        .fold(f64::INFINITY, f64::min);
    let tail_bound = PI * (sol.grid().axes().t_min - min_v).exp();
    let (lo, hi) = (body, body + tail_bound + top_cell_gap);
    Ok(SharperConstant { value: 0.5 * (lo + hi), uncertainty: 0.5 * (hi - lo), lo, hi, body, tail_bound, top_cell_gap })
}

/// Outcome of a discrete comparison between two solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `min (v₂ − v₁)` over Interior nodes
    pub margin: f64,
    /// `min (g₂ − g₁)` over boundary nodes
    pub boundary_gap: f64,
}

/// Compares `sol2` against `sol1`; requires the same grid and `g₁ ≤ g₂` on
/// every boundary node.
pub fn comparison_check(sol1: &EnvelopeSolution, sol2: &EnvelopeSolution) -> Result<Comparison> {
    let grid = sol1.grid();
    if !grid.same_layout(sol2.grid()) {
        return Err(Error::GridMismatch("solutions live on different grids".into()));
    }
    let (v1, v2) = (sol1.values(), sol2.values());
    let mut margin = f64::INFINITY;
    let mut boundary_gap = f64::INFINITY;
    for (idx, kind) in grid.kinds().iter().enumerate() {
        match kind {
            NodeKind::Interior => margin = margin.min(v2[idx] - v1[idx]),
            NodeKind::GraphBoundary | NodeKind::VerticalBoundary => {
                let gap = v2[idx] - v1[idx];
                if gap < 0.0 {
                    let (z, t) = grid.point(idx);
                    return Err(Error::Precondition(format!(
                        "boundary data not ordered at ({z}, t = {t}): g1 − g2 = {}",
                        -gap
                    )));
                }
                boundary_gap = boundary_gap.min(gap);
            }
            _ => {}
        }
    }
    Ok(Comparison { margin, boundary_gap })
}

/// Points where `max(log|z|², C) − B(z) < 0` is checked.
pub const C_VALIDITY_SAMPLES: usize = 1000;

/// Checks `max(log|z|², C) − B(z) < 0` on Ω. Where `log|z|² ≥ C` the
/// expression is the Green function, negative on Ω; on the disc
/// `log|z|² < C` it is the harmonic `C − B`, whose maximum sits on the
/// circle `|z| = e^{C/2}`, sampled at [`C_VALIDITY_SAMPLES`] points.
/// Returns the largest sampled value.
pub fn check_c_validity(domain: &PlanarDomain, c: f64) -> Result<f64> {
    if !(c < 0.0 && c.is_finite()) {
        return Err(Error::DomainArgument { name: "C", value: c, expected: "C < 0" });
    }
    let r = (0.5 * c).exp();
    let mut worst = f64::NEG_INFINITY;
    for j in 0..C_VALIDITY_SAMPLES {
        let z = Complex64::from_polar(r, TAU * j as f64 / C_VALIDITY_SAMPLES as f64);
        if !domain.contains(z)? {
            return Err(Error::Precondition(format!("C = {c}: the circle log|z|² = C leaves the domain at {z}")));
        }
        let value = c - domain.shift(z)?;
        if !(value < 0.0) {
            return Err(Error::Precondition(format!("C = {c}: max(log|z|², C) − B(z) = {value:.3e} ≥ 0 at z = {z}")));
        }
        worst = worst.max(value);
    }
    Ok(worst)
}

/// `min (v(z, t) + B(z))` over Interior nodes for MaxCap data; refuses
/// when `C` fails [`check_c_validity`].
pub fn harmonic_minorant_check(sol: &EnvelopeSolution, domain: &PlanarDomain) -> Result<f64> {
    let c = match sol.boundary() {
        BoundaryData::MaxCap { c } => *c,
        other => {
            return Err(Error::Precondition(format!(
                "harmonic minorant check needs MaxCap data, got {}",
                other.label()
            )))
        }
    };
    check_c_validity(domain, c)?;
    let grid = sol.grid();
    let vals = sol.values();
    let mut margin = f64::INFINITY;
    for (idx, kind) in grid.kinds().iter().enumerate() {
        if *kind == NodeKind::Interior {
            let (z, _) = grid.point(idx);
            margin = margin.min(vals[idx] + domain.shift(z)?);
        }
    }
    Ok(margin)
}

/// `G̃ = log|z|² + v`, `Ã = v`, `B̃ = −v`, with `v` interpolated from the
/// grid and read in `t = log|w|²`.
pub fn ma_certificate(sol: &EnvelopeSolution) -> Result<GreenTypeCertificate> {
    let c = match sol.boundary() {
        BoundaryData::MaxCap { c } => *c,
        other => return Err(Error::Precondition(format!("MA certificate needs MaxCap data, got {}", other.label()))),
    };
    let (s1, s2, s3) = (sol.clone(), sol.clone(), sol.clone());
    let v = |s: &EnvelopeSolution, z: Complex64, w: Complex64| s.eval(z, w.norm_sqr().ln());
    Ok(GreenTypeCertificate::new(
        move |z, w| z.norm_sqr().ln() + v(&s1, z, w),
        move |z, w| v(&s2, z, w),
        move |z, w| -v(&s3, z, w),
        CertificateProvenance::MaSolution { c },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_segments_integrate_exactly() {
        // ∫_0^2 e^{−1 + 0.7 s} ds
        let exact = ((-1.0f64 + 1.4).exp() - (-1.0f64).exp()) / 0.7;
        assert!((exp_affine(0.0, 2.0, -1.0, 0.4) - exact).abs() < 1e-14);
        assert!((exp_affine(0.0, 2.0, 0.3, 0.3) - 2.0 * 0.3f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn minimum_of_two_lines_integrates_exactly() {
        // ℓ = min(2 − t, 0.5 + t) on [0, 2], crossing at 0.75
        let n = 200_000;
        let h = 2.0 / n as f64;
        let mid: f64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                (t - (2.0 - t).min(0.5 + t)).exp() * h
            })
            .sum();
        let got = exp_min_affine(0.0, 2.0, (2.0, 0.0), (0.5, 2.5));
        assert!((got - mid).abs() < 1e-9, "{got} vs {mid}");
    }

    #[test]
    fn c_validity_on_discs() {
        let unit = PlanarDomain::unit_disc();
        assert!(check_c_validity(&unit, -4.0).unwrap() < 0.0);
        assert!(check_c_validity(&unit, 0.0).is_err());
        // B ≡ 2 log 3 on the disc of radius 3
        let d = PlanarDomain::disc(3.0).unwrap();
        assert!(check_c_validity(&d, -0.01).is_ok());
        let d = PlanarDomain::disc(0.5).unwrap();
        assert!(matches!(check_c_validity(&d, -1.0), Err(Error::Precondition(_))));
    }
}

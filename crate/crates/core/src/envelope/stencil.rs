use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wide-stencil parameters: number of complex-line directions, circle radius
/// in xy grid steps, and samples per circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StencilSpec {
    pub directions: usize,
    pub radius_steps: f64,
    pub circle_points: usize,
    pub exit_rule: ExitRule,
}

/// Where a circle sample outside Ω̃ takes its boundary value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitRule {
    /// Crossing on the arc from the nearest inside sample; samples on
    /// circles with no inside point fall back to the segment rule.
    Arc,
    /// Crossing on the segment from the circle centre.
    Segment,
    /// Radial projection of the sample itself: along the fibre onto the
    /// graph, or along the ray from 0 onto ∂Ω.
    Radial,
}

impl Default for StencilSpec {
    fn default() -> Self {
        StencilSpec { directions: 13, radius_steps: 2.0, circle_points: 16, exit_rule: ExitRule::Arc }
    }
}

impl StencilSpec {
    pub fn validate(&self) -> Result<()> {
        complex_directions(self.directions)?;
        if !(self.radius_steps >= 1.0 && self.radius_steps.is_finite()) {
            return Err(Error::Config(format!(
                "stencil radius must be at least one grid step, got {}",
                self.radius_steps
            )));
        }
        if self.circle_points < 4 || !self.circle_points.is_multiple_of(4) || self.circle_points > 32 {
            return Err(Error::Config(format!(
                "circle_points must be a multiple of 4 in [4, 32], got {}",
                self.circle_points
            )));
        }
        Ok(())
    }
}

/// Unit vectors `(a, b)` spread over the projective line `ℂP¹`.
///
/// The first is the pure `z` direction `[1 : 0]`; the others lie on rings of
/// four around it at area-uniform polar angles, alternate rings turned by
/// 45°. The set is invariant under `a ↦ i a` up to phase, i.e. under
/// quarter turns of the `z` plane.
pub fn complex_directions(n: usize) -> Result<Vec<[Complex64; 2]>> {
    if n % 4 != 1 {
        return Err(Error::Config(format!("direction count must be 1 mod 4, got {n}")));
    }
    let mut dirs = vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]];
    let rings = n / 4;
    for m in 0..rings {
        let cos_theta = 1.0 - 2.0 * (4 * m + 3) as f64 / n as f64;
        let theta = cos_theta.clamp(-1.0, 1.0).acos();
        let offset = if m % 2 == 1 { FRAC_PI_4 } else { 0.0 };
        for j in 0..4 {
            let alpha = offset + FRAC_PI_2 * j as f64;
            let beta = Complex64::from_polar((theta / 2.0).tan(), alpha);
            let norm = (1.0 + beta.norm_sqr()).sqrt();
            dirs.push([Complex64::new(1.0 / norm, 0.0), beta / norm]);
        }
    }
    Ok(dirs)
}

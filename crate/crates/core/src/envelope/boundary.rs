use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Grid3, NodeKind};
use crate::error::{Error, Result};
use crate::radial::{psi_of_log, RadialProfile};

/// One term `amp · (lift + cos(kx·x + ky·y + kt·t + phase))` of a custom
/// boundary function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amp: f64,
    pub kx: f64,
    pub ky: f64,
    pub kt: f64,
    pub phase: f64,
    /// 1 makes the term nonnegative when `amp ≥ 0`.
    pub lift: f64,
}

/// Smooth S¹-invariant boundary function of `(z, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomBoundary {
    pub constant: f64,
    pub waves: Vec<Wave>,
}

impl CustomBoundary {
    pub fn eval(&self, z: Complex64, t: f64) -> f64 {
        self.constant
            + self
                .waves
                .iter()
                .map(|w| w.amp * (w.lift + (w.kx * z.re + w.ky * z.im + w.kt * t + w.phase).cos()))
                .sum::<f64>()
    }

    /// `self + other`, term by term.
    pub fn plus(&self, other: &CustomBoundary) -> CustomBoundary {
        let mut waves = self.waves.clone();
        waves.extend(other.waves.iter().cloned());
        CustomBoundary { constant: self.constant + other.constant, waves }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryData {
    /// `g = −max(log|z|², C)`
    MaxCap {
        c: f64,
    },
    /// `g = ψ(w)` for a radial profile
    RadialOracle {
        profile: RadialProfile,
    },
    ConstantTest {
        c: f64,
    },
    Custom(CustomBoundary),
}

impl BoundaryData {
    /// Value at a boundary point `(z, t)` of Ω̃.
    pub fn at_boundary(&self, z: Complex64, t: f64) -> f64 {
        match self {
            BoundaryData::MaxCap { c } => {
                let r2 = z.norm_sqr();
                if r2 == 0.0 {
                    -c
                } else {
                    -r2.ln().max(*c)
                }
            }
            BoundaryData::RadialOracle { profile } => psi_of_log(profile, t),
            BoundaryData::ConstantTest { c } => *c,
            BoundaryData::Custom(f) => f.eval(z, t),
        }
    }

    /// Extension to any grid node: the boundary formula where it is
    /// finite, else its value at the graph point `(z, −φ(z))` over `z`.
    pub fn ambient(&self, z: Complex64, t: f64, phi: f64) -> f64 {
        let v = self.at_boundary(z, t);
        if v.is_finite() {
            return v;
        }
        if phi.is_finite() {
            return self.at_boundary(z, -phi);
        }
        v
    }

    pub fn label(&self) -> String {
        match self {
            BoundaryData::MaxCap { c } => format!("max_cap(C={c})"),
            BoundaryData::RadialOracle { .. } => "radial_oracle".into(),
            BoundaryData::ConstantTest { c } => format!("constant({c})"),
            BoundaryData::Custom(_) => "custom".into(),
        }
    }
}

/// Boundary data together with its values on every non-interior node.
/// Nodes over the complement of Ω carry the value at the radial projection
/// onto ∂Ω.
#[derive(Debug, Clone)]
pub struct BoundaryValues {
    pub data: BoundaryData,
    /// NaN on Interior and ArtificialFloor nodes.
    pub values: Vec<f64>,
}

impl BoundaryValues {
    /// Largest value over boundary-masked nodes.
    pub fn max_on_boundary(&self, grid: &Grid3) -> f64 {
        self.values
            .iter()
            .zip(grid.kinds())
            .filter(|(_, k)| matches!(k, NodeKind::GraphBoundary | NodeKind::VerticalBoundary))
            .map(|(v, _)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn impose_boundary(grid: &Grid3, bd: &BoundaryData) -> Result<BoundaryValues> {
    if let BoundaryData::MaxCap { c } = bd {
        if !(*c < 0.0 && c.is_finite()) {
            return Err(Error::DomainArgument { name: "C", value: *c, expected: "C < 0" });
        }
    }
    if let BoundaryData::RadialOracle { profile } = bd {
        profile.validate()?;
    }
    let mut values = vec![f64::NAN; grid.len()];
    for (idx, v) in values.iter_mut().enumerate() {
        let kind = grid.kind(idx);
        if matches!(kind, NodeKind::Interior | NodeKind::ArtificialFloor) {
            continue;
        }
        let (z, t) = grid.point(idx);
        let (i, j, _) = grid.coords(idx);
        let base = grid.hartogs().base();
        // nodes over the complement of Ω take the data at the nearest point of ∂Ω
        *v = if base.contains(z)? {
            bd.ambient(z, t, grid.phi_at(i, j))
        } else {
            let zb = base.project_to_boundary(z);
            bd.ambient(zb, t, grid.hartogs().weight().eval(zb))
        };
        if !v.is_finite() && kind != NodeKind::Outside {
            return Err(Error::Precondition(format!("boundary value {v} at node ({z}, t = {t}) is not finite")));
        }
    }
    Ok(BoundaryValues { data: bd.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_cap_values() {
        let bd = BoundaryData::MaxCap { c: -4.0 };
        let z = Complex64::new((-0.5f64).exp(), 0.0); // |z|² = e^{−1}
        assert!((bd.at_boundary(z, -1.0) - 1.0).abs() < 1e-15);
        assert_eq!(bd.at_boundary(Complex64::new(0.0, 0.0), 0.0), 4.0);
        assert_eq!(bd.at_boundary(Complex64::new(0.0, 1.0), -3.0), 0.0);
        assert_eq!(bd.at_boundary(Complex64::new(0.01, 0.0), -3.0), 4.0);
    }

    #[test]
    fn oracle_projects_to_the_graph_above_the_unit_level() {
        let bd = BoundaryData::RadialOracle { profile: RadialProfile::power(1.0) };
        assert!((bd.at_boundary(Complex64::new(0.3, 0.0), -0.5) - 2.0).abs() < 1e-14);
        let z = Complex64::new(0.5, 0.0);
        let phi = 1.0 / -(0.25f64.ln());
        // ψ(−φ(z)) = −log|z|²
        assert!((bd.ambient(z, 0.3, phi) + 0.25f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn custom_sum_dominates() {
        let a = CustomBoundary {
            constant: 0.5,
            waves: vec![Wave { amp: 0.3, kx: 1.0, ky: 2.0, kt: 0.5, phase: 0.1, lift: 0.0 }],
        };
        let b = CustomBoundary {
            constant: 0.0,
            waves: vec![Wave { amp: 0.2, kx: -1.0, ky: 0.0, kt: 1.0, phase: 0.0, lift: 1.0 }],
        };
        let s = a.plus(&b);
        for k in 0..50 {
            let z = Complex64::new(0.02 * k as f64 - 0.5, 0.3);
            let t = -0.1 * k as f64;
            assert!(s.eval(z, t) >= a.eval(z, t));
        }
    }
}

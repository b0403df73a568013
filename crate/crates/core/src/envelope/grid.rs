use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hartogs::HartogsDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum NodeKind {
    Interior,
    GraphBoundary,
    VerticalBoundary,
    ArtificialFloor,
    Outside,
}

/// Axis description shared by the binary field sidecar and the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axes {
    pub n_xy: usize,
    pub n_t: usize,
    /// x and y run over `[−half_width, half_width]`
    pub half_width: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Axes {
    pub fn hx(&self) -> f64 {
        2.0 * self.half_width / (self.n_xy - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.hx()
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_min + k as f64 * self.ht()
    }
}

/// Grid over `(x, y, t = log|w|²)` covering the Hartogs domain; nodes are
/// stored x-fastest, then y, then t.
#[derive(Debug, Clone)]
pub struct Grid3 {
    hd: HartogsDomain,
    axes: Axes,
    kinds: Vec<NodeKind>,
    /// `φ` at each xy node (`+∞` outside Ω).
    phi: Vec<f64>,
    interior: usize,
}

/// Cells kept beyond the domain on each side of the xy square.
const XY_MARGIN_CELLS: f64 = 3.0;
/// Cells kept above the highest fibre top.
const T_MARGIN_CELLS: f64 = 2.0;

pub fn make_grid(hd: &HartogsDomain, n_xy: usize, n_t: usize, t_min: f64) -> Result<Grid3> {
    if n_xy < 16 || n_t < 16 {
        return Err(Error::GridTooCoarse(format!("need n_xy, n_t >= 16, got {n_xy} x {n_t}")));
    }
    if !(t_min <= -4.0 && t_min.is_finite()) {
        return Err(Error::DomainArgument { name: "t_min", value: t_min, expected: "t_min <= -4" });
    }
    let base = hd.base();
    let half_width = base.outer_radius() / (1.0 - 2.0 * XY_MARGIN_CELLS / (n_xy - 1) as f64);
    let hx = 2.0 * half_width / (n_xy - 1) as f64;

    // highest fibre top, sampled on a 4x refined xy lattice
    let fine = 4 * (n_xy - 1) + 1;
    let mut top = 0.0f64;
    for j in 0..fine {
        for i in 0..fine {
            let z = Complex64::new(-half_width + i as f64 * hx / 4.0, -half_width + j as f64 * hx / 4.0);
            if base.contains(z)? {
                top = top.max(-hd.weight().eval(z));
            }
        }
    }
    let t_max = (top * (n_t - 1) as f64 - T_MARGIN_CELLS * t_min) / ((n_t - 1) as f64 - T_MARGIN_CELLS);
    let axes = Axes { n_xy, n_t, half_width, t_min, t_max };

    let mut phi = vec![f64::INFINITY; n_xy * n_xy];
    for j in 0..n_xy {
        for i in 0..n_xy {
            let z = Complex64::new(axes.x(i), axes.x(j));
            if base.contains(z)? {
                phi[i + n_xy * j] = hd.weight().eval(z);
            }
        }
    }

    let n = n_xy * n_xy * n_t;
    let mut kinds = vec![NodeKind::Outside; n];
    let mut interior = 0;
    for k in 0..n_t {
        let t = axes.t(k);
        for c in 0..n_xy * n_xy {
            let inside = t < -phi[c];
            let idx = c + n_xy * n_xy * k;
            if inside && k == 0 {
                kinds[idx] = NodeKind::ArtificialFloor;
            } else if inside {
                kinds[idx] = NodeKind::Interior;
                interior += 1;
            }
        }
    }
    if interior == 0 {
        return Err(Error::GridTooCoarse("no interior node".into()));
    }
    // boundary layer: non-interior nodes with an interior axis neighbour
    let plane = n_xy * n_xy;
    for k in 1..n_t {
        for j in 0..n_xy {
            for i in 0..n_xy {
                let idx = i + n_xy * j + plane * k;
                if kinds[idx] != NodeKind::Outside {
                    continue;
                }
                let mut near = false;
                if i > 0 {
                    near |= kinds[idx - 1] == NodeKind::Interior;
                }
                if i + 1 < n_xy {
                    near |= kinds[idx + 1] == NodeKind::Interior;
                }
                if j > 0 {
                    near |= kinds[idx - n_xy] == NodeKind::Interior;
                }
                if j + 1 < n_xy {
                    near |= kinds[idx + n_xy] == NodeKind::Interior;
                }
                near |= kinds[idx - plane] == NodeKind::Interior;
                if k + 1 < n_t {
                    near |= kinds[idx + plane] == NodeKind::Interior;
                }
                if near {
                    kinds[idx] = if phi[i + n_xy * j].is_finite() {
                        NodeKind::GraphBoundary
                    } else {
                        NodeKind::VerticalBoundary
                    };
                }
            }
        }
    }
    Ok(Grid3 { hd: hd.clone(), axes, kinds, phi, interior })
}

impl Grid3 {
    pub fn hartogs(&self) -> &HartogsDomain {
        &self.hd
    }

    pub fn axes(&self) -> Axes {
        self.axes
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[idx]
    }

    pub fn interior_count(&self) -> usize {
        self.interior
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.axes.n_xy * (j + self.axes.n_xy * k)
    }

    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.axes.n_xy;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    /// `(z, t)` of a node.
    pub fn point(&self, idx: usize) -> (Complex64, f64) {
        let (i, j, k) = self.coords(idx);
        (Complex64::new(self.axes.x(i), self.axes.x(j)), self.axes.t(k))
    }

    /// `φ` at the xy node `(i, j)`, `+∞` outside Ω.
    pub fn phi_at(&self, i: usize, j: usize) -> f64 {
        self.phi[i + self.axes.n_xy * j]
    }

    /// Same geometry and masks.
    pub fn same_layout(&self, other: &Grid3) -> bool {
        self.axes == other.axes && self.kinds == other.kinds
    }

    /// Rotation of node `(i, j, k)` by a quarter turn `z ↦ iz`.
    pub fn rotate_quarter(&self, idx: usize) -> usize {
        let (i, j, k) = self.coords(idx);
        let n = self.axes.n_xy;
        self.index(n - 1 - j, i, k)
    }

    /// Trilinear interpolation of a node field at `(z, t)`, with `t`
    /// clamped into the first cell above the floor and below the top.
    pub fn interpolate(&self, field: &[f64], z: Complex64, t: f64) -> f64 {
        let a = &self.axes;
        let n = a.n_xy;
        let hx = a.hx();
        let ht = a.ht();
        let fx = ((z.re + a.half_width) / hx).clamp(0.0, (n - 1) as f64 - 1e-12);
        let fy = ((z.im + a.half_width) / hx).clamp(0.0, (n - 1) as f64 - 1e-12);
        let ft = ((t - a.t_min) / ht).clamp(1.0, (a.n_t - 1) as f64 - 1e-12);
        let (i, j, k) = (fx as usize, fy as usize, ft as usize);
        let (u, v, w) = (fx - i as f64, fy - j as f64, ft - k as f64);
        let at = |di: usize, dj: usize, dk: usize| field[self.index(i + di, j + dj, k + dk)];
        let layer = |dk: usize| {
            (1.0 - v) * ((1.0 - u) * at(0, 0, dk) + u * at(1, 0, dk))
                + v * ((1.0 - u) * at(0, 1, dk) + u * at(1, 1, dk))
        };
        (1.0 - w) * layer(0) + w * layer(1)
    }

    /// Grid step relative to the 64-node grid over the same domain; used to
    /// scale first-order tolerances.
    pub fn step_ratio_to_64(&self) -> f64 {
        let n = self.axes.n_xy as f64;
        let width = |m: f64| 1.0 / ((m - 1.0) * (1.0 - 2.0 * XY_MARGIN_CELLS / (m - 1.0)));
        width(n) / width(64.0)
    }
}

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{impose_boundary, BoundaryData, BoundaryValues};
use super::grid::{make_grid, Grid3, NodeKind};
use super::stencil::{complex_directions, ExitRule, StencilSpec};
use crate::error::{Error, Result};

/// How the interior is initialised before the monotone sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// Start at `max g` and run the monotone Jacobi iteration only.
    MaxBoundary,
    /// Nonlinear SOR (optionally warm-started on a coarser grid) followed
    /// by the monotone Jacobi iteration.
    Accelerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Stop when the sup-change of a Jacobi sweep drops to this.
    pub tol: f64,
    pub max_sweeps: usize,
    pub init: Initialization,
    /// SOR factor; `None` picks one from the grid size.
    pub relaxation: Option<f64>,
    pub sor_tol: f64,
    pub sor_max_sweeps: usize,
    /// Full direction search every this many SOR sweeps.
    pub refresh_every: usize,
    /// Warm-start from a half-resolution solve when both sizes reach this.
    pub warm_start_min_n: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-7,
            max_sweeps: 20_000,
            init: Initialization::Accelerated,
            relaxation: None,
            sor_tol: 1e-9,
            sor_max_sweeps: 20_000,
            refresh_every: 8,
            warm_start_min_n: 40,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("solver tol must be positive, got {}", self.tol)));
        }
        if self.max_sweeps == 0 || self.refresh_every == 0 {
            return Err(Error::Config("max_sweeps and refresh_every must be positive".into()));
        }
        if let Some(w) = self.relaxation {
            if !(w > 0.0 && w < 2.0) {
                return Err(Error::Config(format!("relaxation must lie in (0, 2), got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct XySample {
    /// Offset of the lower-left cell corner relative to the centre node.
    offset: isize,
    w: [f64; 4],
}

#[derive(Debug, Clone, Copy)]
struct TSample {
    layer: usize,
    frac: f64,
}

/// Geometry of every stencil circle, fixed for a grid.
struct Tables {
    dirs: usize,
    pts: usize,
    plane: usize,
    n_xy: usize,
    xy: Vec<XySample>,
    tz: Vec<TSample>,
    interior: Vec<usize>,
    /// Inside samples interpolated on the fast path, per node and direction.
    mask: Vec<u32>,
    /// Constant part of each circle sum: exit values and the boundary share
    /// of samples near the graph.
    exit: Vec<f64>,
    /// Interior weights of samples near the graph, indexed by `spec_off`.
    spec: Vec<(u32, f64)>,
    spec_off: Vec<u32>,
}

impl Tables {
    fn build(grid: &Grid3, bv: &BoundaryValues, stencil: &StencilSpec) -> Result<Tables> {
        let dirs_ab = complex_directions(stencil.directions)?;
        let d_n = dirs_ab.len();
        let p_n = stencil.circle_points;
        let axes = grid.axes();
        let n = axes.n_xy;
        let plane = n * n;
        let hx = axes.hx();
        let ht = axes.ht();
        let r = stencil.radius_steps * hx;
        let hd = grid.hartogs();
        let base = hd.base();
        let unit: Vec<Complex64> = (0..p_n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / p_n as f64)).collect();

        let mut xy = Vec::with_capacity(d_n * p_n);
        for [a, _] in &dirs_ab {
            for e in &unit {
                let dz = r * a * e;
                let (ux, uy) = (dz.re / hx, dz.im / hx);
                let (fi, fj) = (ux.floor(), uy.floor());
                let (fx, fy) = (ux - fi, uy - fj);
                xy.push(XySample {
                    offset: fi as isize + n as isize * fj as isize,
                    w: [(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy],
                });
            }
        }
        let mut tz = Vec::with_capacity(axes.n_t * d_n * p_n);
        let mut t_of = Vec::with_capacity(axes.n_t * d_n * p_n);
        for k in 0..axes.n_t {
            let w0 = (0.5 * axes.t(k)).exp();
            for [_, b] in &dirs_ab {
                for e in &unit {
                    let tp = (w0 + r * b * e).norm_sqr().ln();
                    t_of.push(tp);
                    let ft = (tp - axes.t_min) / ht;
                    tz.push(if ft < 1.0 {
                        TSample { layer: 1, frac: 0.0 }
                    } else if ft >= (axes.n_t - 1) as f64 {
                        TSample { layer: axes.n_t - 2, frac: 1.0 }
                    } else {
                        let layer = ft.floor();
                        TSample { layer: layer as usize, frac: ft - layer }
                    });
                }
            }
        }

        let interior: Vec<usize> = (0..grid.len()).filter(|&i| grid.kind(i) == NodeKind::Interior).collect();
        let mut mask = vec![0u32; interior.len() * d_n];
        let mut exit = vec![0.0; interior.len() * d_n];
        let mut spec: Vec<(u32, f64)> = Vec::new();
        let mut spec_off: Vec<u32> = Vec::with_capacity(interior.len() * d_n + 1);
        spec_off.push(0);
        // φ at every circle point of every column, computed once per column
        let mut col_phi = vec![0.0; d_n * p_n];
        let mut last_col = usize::MAX;
        let exit_tol = hx / 100.0;
        for (q, &idx) in interior.iter().enumerate() {
            let (i, j, k) = grid.coords(idx);
            let col = i + n * j;
            let (z, t) = grid.point(idx);
            if col != last_col {
                for (d, [a, _]) in dirs_ab.iter().enumerate() {
                    for (s, e) in unit.iter().enumerate() {
                        let zp = z + r * a * e;
                        col_phi[d * p_n + s] = if base.contains(zp)? { hd.weight().eval(zp) } else { f64::INFINITY };
                    }
                }
                last_col = col;
            }
            let w0 = Complex64::new((0.5 * t).exp(), 0.0);
            for (d, &[a, b]) in dirs_ab.iter().enumerate() {
                let mut bits = 0u32;
                for s in 0..p_n {
                    if t_of[(k * d_n + d) * p_n + s] < -col_phi[d * p_n + s] {
                        bits |= 1 << s;
                    }
                }
                let mut sum = 0.0;
                for s in 0..p_n {
                    if bits & (1 << s) != 0 {
                        continue;
                    }
                    let theta_out = TAU * s as f64 / p_n as f64;
                    let at = |theta: f64| {
                        let e = Complex64::from_polar(r, theta);
                        (z + a * e, w0 + b * e)
                    };
                    let v = match (stencil.exit_rule, nearest_inside(bits, s, p_n)) {
                        (ExitRule::Radial, _) => {
                            let (zo, wo) = at(theta_out);
                            let to = wo.norm_sqr().ln();
                            let v = if base.contains(zo)? {
                                bv.data.at_boundary(zo, -hd.weight().eval(zo))
                            } else {
                                bv.data.at_boundary(base.project_to_boundary(zo), to)
                            };
                            if !v.is_finite() {
                                return Err(Error::Numeric(format!(
                                    "boundary value at projection of ({zo}, t = {to})"
                                )));
                            }
                            v
                        }
                        (ExitRule::Arc, Some(s_in)) => {
                            let theta_in = TAU * s_in as f64 / p_n as f64;
                            let arc = r * (theta_out - theta_in).abs();
                            exit_value(grid, &bv.data, |x| at(theta_in + x * (theta_out - theta_in)), arc, exit_tol)?
                        }
                        _ => {
                            let (zo, wo) = at(theta_out);
                            let len = ((zo - z).norm_sqr() + (wo - w0).norm_sqr()).sqrt();
                            exit_value(grid, &bv.data, |x| (z + (zo - z) * x, w0 + (wo - w0) * x), len, exit_tol)?
                        }
                    };
                    sum += v;
                }
                // inside samples whose cell touches a non-interior node
                let mut fast = bits;
                for s in 0..p_n {
                    if bits & (1 << s) == 0 {
                        continue;
                    }
                    let c = &xy[d * p_n + s];
                    let ts = tz[(k * d_n + d) * p_n + s];
                    let col_s = (col as isize + c.offset) as usize;
                    let corners = [col_s, col_s + 1, col_s + n, col_s + n + 1];
                    let free = |node: usize| matches!(grid.kind(node), NodeKind::Interior | NodeKind::ArtificialFloor);
                    if corners.iter().all(|&cc| free(cc + ts.layer * plane) && free(cc + (ts.layer + 1) * plane)) {
                        continue;
                    }
                    fast &= !(1 << s);
                    let t_s = axes.t(ts.layer) + ts.frac * ht;
                    for (cc, wc) in corners.into_iter().zip(c.w) {
                        if wc == 0.0 {
                            continue;
                        }
                        let (lo, hi) = (cc + ts.layer * plane, cc + (ts.layer + 1) * plane);
                        match (free(lo), free(hi)) {
                            (true, true) => {
                                spec.push((lo as u32, wc * (1.0 - ts.frac)));
                                spec.push((hi as u32, wc * ts.frac));
                            }
                            (true, false) => {
                                // linear between the node below and the graph point of this column
                                let (ci, cj) = (cc % n, cc / n);
                                let top = -grid.phi_at(ci, cj);
                                let t_lo = axes.t(ts.layer);
                                let g_top = bv.data.at_boundary(Complex64::new(axes.x(ci), axes.x(cj)), top);
                                if !g_top.is_finite() {
                                    return Err(Error::Numeric(format!(
                                        "boundary value on the graph over column ({ci}, {cj})"
                                    )));
                                }
                                let x = ((t_s - t_lo) / (top - t_lo)).clamp(0.0, 1.0);
                                spec.push((lo as u32, wc * (1.0 - x)));
                                sum += wc * x * g_top;
                            }
                            (lo_free, hi_free) => {
                                for (node, wt, is_free) in [(lo, 1.0 - ts.frac, lo_free), (hi, ts.frac, hi_free)] {
                                    if is_free {
                                        spec.push((node as u32, wc * wt));
                                    } else if wt != 0.0 {
                                        let g = bv.values[node];
                                        if !g.is_finite() {
                                            return Err(Error::Numeric(format!("boundary value at node {node}")));
                                        }
                                        sum += wc * wt * g;
                                    }
                                }
                            }
                        }
                    }
                }
                mask[q * d_n + d] = fast;
                exit[q * d_n + d] = sum;
                spec_off.push(spec.len() as u32);
            }
        }
        Ok(Tables { dirs: d_n, pts: p_n, plane, n_xy: n, xy, tz, interior, mask, exit, spec, spec_off })
    }

    /// Circle average of `vals` along direction `d` around interior node `q`.
    #[inline]
    fn average(&self, vals: &[f64], q: usize, d: usize) -> f64 {
        let idx = self.interior[q];
        let col = (idx % self.plane) as isize;
        let k = idx / self.plane;
        let bits = self.mask[q * self.dirs + d];
        let mut sum = self.exit[q * self.dirs + d];
        let xy = &self.xy[d * self.pts..(d + 1) * self.pts];
        let tz = &self.tz[(k * self.dirs + d) * self.pts..(k * self.dirs + d + 1) * self.pts];
        let n = self.n_xy;
        for s in 0..self.pts {
            if bits & (1 << s) == 0 {
                continue;
            }
            let c = &xy[s];
            let ts = &tz[s];
            let lo = (col + c.offset) as usize + ts.layer * self.plane;
            let hi = lo + self.plane;
            let bil =
                |b: usize| c.w[0] * vals[b] + c.w[1] * vals[b + 1] + c.w[2] * vals[b + n] + c.w[3] * vals[b + n + 1];
            sum += (1.0 - ts.frac) * bil(lo) + ts.frac * bil(hi);
        }
        let qd = q * self.dirs + d;
        for &(node, w) in &self.spec[self.spec_off[qd] as usize..self.spec_off[qd + 1] as usize] {
            sum += w * vals[node as usize];
        }
        sum / self.pts as f64
    }

    fn min_average(&self, vals: &[f64], q: usize) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for d in 0..self.dirs {
            let a = self.average(vals, q, d);
            if a < best {
                best = a;
                arg = d;
            }
        }
        (best, arg)
    }
}

/// Index of the inside circle sample closest to `s` in angular order,
/// looking backwards first on ties.
fn nearest_inside(bits: u32, s: usize, p_n: usize) -> Option<isize> {
    for k in 1..=p_n / 2 {
        let back = (s + p_n - k) % p_n;
        if bits & (1 << back) != 0 {
            return Some(s as isize - k as isize);
        }
        let fwd = (s + k) % p_n;
        if bits & (1 << fwd) != 0 {
            return Some((s + k) as isize);
        }
    }
    None
}

/// Boundary value where `path` leaves Ω̃. `path(0)` is inside and `path(1)`
/// outside; the crossing is bracketed by bisection to `tol` in length and
/// its inner end is projected onto the boundary component crossed:
/// vertically onto the graph, or radially onto ∂Ω.
fn exit_value(
    grid: &Grid3,
    bd: &BoundaryData,
    path: impl Fn(f64) -> (Complex64, Complex64),
    len: f64,
    tol: f64,
) -> Result<f64> {
    let hd = grid.hartogs();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while (hi - lo) * len > tol {
        let mid = 0.5 * (lo + hi);
        let (zm, wm) = path(mid);
        if hd.contains(zm, wm)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (ze, we) = path(lo);
    let te = we.norm_sqr().ln();
    let (z_out, _) = path(hi);
    let v = if hd.base().contains(z_out)? {
        bd.at_boundary(ze, -hd.weight().eval(ze))
    } else {
        bd.at_boundary(hd.base().project_to_boundary(ze), te)
    };
    if !v.is_finite() {
        return Err(Error::Numeric(format!("boundary value at exit point ({ze}, t = {te})")));
    }
    Ok(v)
}

/// Converged envelope on a grid.
#[derive(Debug, Clone)]
pub struct EnvelopeSolution {
    grid: Arc<Grid3>,
    boundary: BoundaryData,
    /// Full field: `v` on Interior nodes, the first layer above on floor
    /// nodes, boundary data elsewhere.
    values: Vec<f64>,
    pub stencil: StencilSpec,
    pub options: SolveOptions,
    /// Total sweeps (SOR + Jacobi, coarse levels excluded).
    pub iterations: usize,
    pub sor_sweeps: usize,
    pub jacobi_sweeps: usize,
    pub final_change: f64,
    /// `max (min_d avg_d v − v)` over Interior.
    pub saturation_residual: f64,
    /// `max (v − avg_d v)` over Interior and directions, clipped at 0.
    pub psh_violation: f64,
    /// Sup-change of each Jacobi sweep.
    pub change_history: Vec<f64>,
    /// Whether every Jacobi sweep was pointwise nonincreasing.
    pub monotone: bool,
    /// Whether boundary nodes kept their data bit-for-bit in every sweep.
    pub boundary_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub n_xy: usize,
    pub n_t: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub interior_nodes: usize,
    pub iterations: usize,
    pub sor_sweeps: usize,
    pub jacobi_sweeps: usize,
    pub final_change: f64,
    pub saturation_residual: f64,
    pub psh_violation: f64,
    pub monotone: bool,
    pub boundary_exact: bool,
}

impl EnvelopeSolution {
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn grid_arc(&self) -> Arc<Grid3> {
        Arc::clone(&self.grid)
    }

    pub fn boundary(&self) -> &BoundaryData {
        &self.boundary
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `v` at any point of the grid box by trilinear interpolation.
    pub fn eval(&self, z: Complex64, t: f64) -> f64 {
        self.grid.interpolate(&self.values, z, t)
    }

    pub fn diagnostics(&self) -> SolverDiagnostics {
        let a = self.grid.axes();
        SolverDiagnostics {
            n_xy: a.n_xy,
            n_t: a.n_t,
            t_min: a.t_min,
            t_max: a.t_max,
            interior_nodes: self.grid.interior_count(),
            iterations: self.iterations,
            sor_sweeps: self.sor_sweeps,
            jacobi_sweeps: self.jacobi_sweeps,
            final_change: self.final_change,
            saturation_residual: self.saturation_residual,
            psh_violation: self.psh_violation,
            monotone: self.monotone,
            boundary_exact: self.boundary_exact,
        }
    }

    /// First-order tolerance `5e-3` at 64 nodes, scaled with the grid step.
    pub fn default_tolerance(&self) -> f64 {
        5e-3 * self.grid.step_ratio_to_64()
    }
}

/// Over-relaxation factor. Factors near 1.9 diverge on the 64-node grid
/// because the minimising direction switches between sweeps; 1.7 took the
/// fewest sweeps on 32, 64 and 128 nodes.
fn auto_relaxation(_n: usize) -> f64 {
    1.7
}

/// Nonlinear SOR on `v = min_d avg_d v`, in node order. Between full
/// direction searches only the last minimising direction is evaluated.
fn sor_phase(t: &Tables, vals: &mut [f64], opts: &SolveOptions, n: usize) -> Result<usize> {
    let mut omega = opts.relaxation.unwrap_or_else(|| auto_relaxation(n));
    let mut choice = vec![0u8; t.interior.len()];
    let mut last_full = f64::INFINITY;
    let mut rises = 0;
    for sweep in 0..opts.sor_max_sweeps {
        let full = sweep % opts.refresh_every == 0;
        let mut change = 0.0f64;
        for q in 0..t.interior.len() {
            let idx = t.interior[q];
            let target = if full {
                let (m, d) = t.min_average(vals, q);
                choice[q] = d as u8;
                m
            } else {
                t.average(vals, q, choice[q] as usize)
            };
            let old = vals[idx];
            let new = old + omega * (target - old);
            change = change.max((new - old).abs());
            vals[idx] = new;
        }
        if !change.is_finite() {
            return Err(Error::Numeric(format!("SOR sweep {sweep}")));
        }
        if full && change <= opts.sor_tol {
            return Ok(sweep + 1);
        }
        if full {
            // a rising change between direction searches means the argmin
            // keeps flipping; halve the over-relaxation
            if change > last_full {
                rises += 1;
                if rises == 3 {
                    omega = 1.0 + 0.5 * (omega - 1.0);
                    rises = 0;
                }
            }
            last_full = change;
        }
    }
    Ok(opts.sor_max_sweeps)
}

fn initial_field(grid: &Grid3, bv: &BoundaryValues, stencil: &StencilSpec, opts: &SolveOptions) -> Result<Vec<f64>> {
    let mut vals = bv.values.clone();
    let gmax = bv.max_on_boundary(grid);
    let a = grid.axes();
    let coarse = if opts.init == Initialization::Accelerated
        && a.n_xy >= opts.warm_start_min_n
        && a.n_t >= opts.warm_start_min_n
    {
        let cg = make_grid(grid.hartogs(), a.n_xy / 2, a.n_t / 2, a.t_min)?;
        let cbv = impose_boundary(&cg, &bv.data)?;
        let mut cv = initial_field(&cg, &cbv, stencil, opts)?;
        let ct = Tables::build(&cg, &cbv, stencil)?;
        sor_phase(&ct, &mut cv, opts, a.n_xy / 2)?;
        Some((cg, cv))
    } else {
        None
    };
    for idx in 0..grid.len() {
        if grid.kind(idx) == NodeKind::Interior {
            vals[idx] = match &coarse {
                Some((cg, cv)) => {
                    let (z, t) = grid.point(idx);
                    cg.interpolate(cv, z, t).min(gmax)
                }
                None => gmax,
            };
        }
    }
    Ok(vals)
}

/// Solves the discrete envelope problem `v = min(v, min_d avg_d v)` with
/// boundary values `g`.
pub fn solve_envelope(
    grid: &Grid3,
    g: &BoundaryValues,
    stencil: &StencilSpec,
    opts: &SolveOptions,
) -> Result<EnvelopeSolution> {
    stencil.validate()?;
    opts.validate()?;
    if g.values.len() != grid.len() {
        return Err(Error::GridMismatch("boundary values were imposed on a different grid".into()));
    }
    for (idx, v) in g.values.iter().enumerate() {
        let kind = grid.kind(idx);
        if matches!(kind, NodeKind::GraphBoundary | NodeKind::VerticalBoundary) && !v.is_finite() {
            return Err(Error::Precondition(format!("boundary value at node {idx} is not finite")));
        }
    }
    let tables = Tables::build(grid, g, stencil)?;
    let mut vals = initial_field(grid, g, stencil, opts)?;
    let n = grid.axes().n_xy;
    let sor_sweeps = match opts.init {
        Initialization::Accelerated => sor_phase(&tables, &mut vals, opts, n)?,
        Initialization::MaxBoundary => 0,
    };

    // monotone Jacobi sweeps
    let mut history = Vec::new();
    let mut monotone = true;
    let mut next = vec![0.0; tables.interior.len()];
    let mut converged = false;
    let mut final_change = f64::INFINITY;
    for _ in 0..opts.max_sweeps {
        next.par_iter_mut().enumerate().for_each(|(q, out)| {
            let v = vals[tables.interior[q]];
            let (m, _) = tables.min_average(&vals, q);
            *out = v.min(m);
        });
        let change =
            next.par_iter().enumerate().map(|(q, &nv)| vals[tables.interior[q]] - nv).reduce(|| 0.0f64, f64::max);
        if !change.is_finite() {
            return Err(Error::Numeric("Jacobi sweep".into()));
        }
        for (q, &nv) in next.iter().enumerate() {
            let idx = tables.interior[q];
            if nv > vals[idx] {
                monotone = false;
            }
            vals[idx] = nv;
        }
        history.push(change);
        final_change = change;
        if change <= opts.tol {
            converged = true;
            break;
        }
    }
    let jacobi_sweeps = history.len();
    if !converged {
        return Err(Error::NonConvergence { sweeps: jacobi_sweeps + sor_sweeps, final_change });
    }

    let boundary_exact = vals
        .iter()
        .zip(&g.values)
        .zip(grid.kinds())
        .filter(|(_, k)| !matches!(k, NodeKind::Interior | NodeKind::ArtificialFloor))
        .all(|((a, b), _)| a.to_bits() == b.to_bits());

    let (saturation_residual, psh_violation) = (0..tables.interior.len())
        .into_par_iter()
        .map(|q| {
            let v = vals[tables.interior[q]];
            let mut min_avg = f64::INFINITY;
            let mut viol = 0.0f64;
            for d in 0..tables.dirs {
                let a = tables.average(&vals, q, d);
                min_avg = min_avg.min(a);
                viol = viol.max(v - a);
            }
            (min_avg - v, viol)
        })
        .reduce(|| (f64::NEG_INFINITY, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));

    // floor copies the first layer above it
    let plane = tables.plane;
    for idx in 0..plane {
        if grid.kind(idx) == NodeKind::ArtificialFloor {
            vals[idx] = vals[idx + plane];
        }
    }

    Ok(EnvelopeSolution {
        grid: Arc::new(grid.clone()),
        boundary: g.data.clone(),
        values: vals,
        stencil: *stencil,
        options: *opts,
        iterations: sor_sweeps + jacobi_sweeps,
        sor_sweeps,
        jacobi_sweeps,
        final_change,
        saturation_residual: saturation_residual.max(0.0),
        psh_violation,
        change_history: history,
        monotone,
        boundary_exact,
    })
}

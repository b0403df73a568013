//! One-dimensional quadrature: Gauss-Legendre rules, a globally adaptive
//! Gauss-Kronrod (7, 15) integrator, and the polar tensor rule used for
//! disc integrals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights belonging to XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// How a disc integral is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum QuadratureSpec {
    /// Graded Gauss-Legendre panels in the radius times the trapezoidal rule
    /// in the angle.
    PolarTensor { n_r: usize, n_theta: usize },
    /// Adaptive Gauss-Kronrod in the radius; only valid for integrands whose
    /// angular part is known in closed form (radial weights).
    AdaptiveRadial { target_err: f64 },
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::AdaptiveRadial { target_err: 1e-10 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            QuadratureSpec::PolarTensor { n_r, n_theta } => {
                if n_r < 2 || n_theta < 3 {
                    return Err(Error::Config(format!(
                        "polar tensor rule needs n_r >= 2 and n_theta >= 3 (got {n_r}, {n_theta})"
                    )));
                }
            }
            QuadratureSpec::AdaptiveRadial { target_err } => {
                if !(target_err > 0.0 && target_err < 1.0) {
                    return Err(Error::Config(format!("adaptive target error must lie in (0, 1), got {target_err}")));
                }
            }
        }
        Ok(())
    }

    /// Tolerance used when this spec drives an adaptive integration.
    pub fn target(&self) -> f64 {
        match *self {
            QuadratureSpec::AdaptiveRadial { target_err } => target_err,
            QuadratureSpec::PolarTensor { .. } => 1e-10,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error: err }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`. Endpoints are never
/// evaluated, so integrable endpoint singularities are fine.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Integral> {
    const MAX_SEGMENTS: usize = 4000;
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut segments = vec![kronrod15(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        // Sequential sums keep the result independent of any outer threading.
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if total.is_nan() || err.is_nan() {
            return Err(Error::Numeric(format!("adaptive quadrature on [{a}, {b}]")));
        }
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureFailure { a, b, estimate: err, intervals: segments.len() });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Integral { value: total, error: err, evaluations });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure { a, b, estimate: err, intervals: segments.len() });
        }
        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            return Err(Error::QuadratureFailure { a, b, estimate: err, intervals: segments.len() + 1 });
        }
        segments.push(kronrod15(&mut f, seg.a, mid));
        segments.push(kronrod15(&mut f, mid, seg.b));
        evaluations += 30;
    }
}

/// [`integrate`] over `[a, b]` split at the interior `breaks`. Kinks of a
/// piecewise integrand can make the Kronrod estimate agree with the Gauss
/// one by accident; splitting there keeps every panel smooth.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a.min(b) && *x < a.max(b)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if a > b {
        cuts.reverse();
    }
    let mut ends = vec![a];
    ends.extend(cuts);
    ends.push(b);
    let pieces = (ends.len() - 1) as f64;
    let mut out = Integral { value: 0.0, error: 0.0, evaluations: 0 };
    for w in ends.windows(2) {
        let part = integrate(&mut f, w[0], w[1], abs_tol / pieces, rel_tol)?;
        out.value += part.value;
        out.error += part.error;
        out.evaluations += part.evaluations;
    }
    Ok(out)
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Radial nodes on [0, 1] graded geometrically towards both endpoints.
///
/// Returns `(r, w)` with `sum w_i g(r_i) ≈ ∫_0^1 g(r) dr`. The grading
/// resolves the logarithmic behaviour of radial weights at the origin and
/// their flat decay at the unit circle. About `n_r` nodes are spread over
/// the panels in proportion to their length, with at least four per panel,
/// so the wide middle panels still integrate polynomial moments exactly.
pub fn graded_radial_rule(n_r: usize) -> (Vec<f64>, Vec<f64>) {
    const LEVELS: i32 = 12;
    const MIN_PER_PANEL: usize = 4;
    let mut breaks = vec![0.0];
    for k in (1..=LEVELS).rev() {
        breaks.push(0.5f64.powi(k));
    }
    for k in 2..=LEVELS {
        breaks.push(1.0 - 0.5f64.powi(k));
    }
    breaks.push(1.0);
    let mut r = Vec::new();
    let mut wr = Vec::new();
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        let count = ((n_r as f64 * (b - a)).ceil() as usize).max(MIN_PER_PANEL);
        let (x, w) = gauss_legendre(count);
        let half = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            r.push(a + half * (xi + 1.0));
            wr.push(half * wi);
        }
    }
    (r, wr)
}

/// Node of a polar tensor rule over the unit disc (area element included).
#[derive(Debug, Clone, Copy)]
pub struct DiscNode {
    pub r: f64,
    pub theta: f64,
    pub weight: f64,
}

/// Tensor rule over the unit disc: graded Gauss-Legendre in `r` (with the
/// Jacobian `r` folded into the weight) and `n_theta` equispaced angles.
pub fn polar_tensor_rule(n_r: usize, n_theta: usize) -> Vec<DiscNode> {
    let (r, wr) = graded_radial_rule(n_r);
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut nodes = Vec::with_capacity(r.len() * n_theta);
    for (ri, wi) in r.iter().zip(&wr) {
        for k in 0..n_theta {
            nodes.push(DiscNode { r: *ri, theta: k as f64 * dtheta, weight: wi * ri * dtheta });
        }
    }
    nodes
}

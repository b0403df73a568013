//! Least-norm holomorphic extension of the value 1 at the origin, by
//! weighted least squares over polynomials in the disc parameter.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, polar_tensor_rule, QuadratureSpec};
use crate::weight::WeightField;

/// Above this condition number the solve switches to orthonormalisation.
pub const CHOLESKY_MAX_CONDITION: f64 = 1e8;
const BLOCK: usize = 512;

/// Quadrature nodes in the disc parameter with weights that already carry
/// `e^{−φ}` and the area Jacobian.
struct WeightedNodes {
    zeta: Vec<Complex64>,
    weight: Vec<f64>,
}

fn weighted_nodes(domain: &PlanarDomain, weight: &WeightField, n_r: usize, n_theta: usize) -> Result<WeightedNodes> {
    let nodes = polar_tensor_rule(n_r, n_theta);
    let mut zeta = Vec::with_capacity(nodes.len());
    let mut wts = Vec::with_capacity(nodes.len());
    for node in nodes {
        let zt = Complex64::from_polar(node.r, node.theta);
        let w = node.weight * domain.jacobian(zt) * (-weight.eval(domain.map_from_disc(zt))).exp();
        if !w.is_finite() {
            return Err(Error::Numeric(format!("weighted quadrature node at ζ = {zt}")));
        }
        zeta.push(zt);
        wts.push(w);
    }
    Ok(WeightedNodes { zeta, weight: wts })
}

/// Powers `1, ζ, …, ζ^N`.
fn powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        p.push(acc);
        acc *= z;
    }
    p
}

/// Disc radius when `φ` is radial on a disc, so that the Gram matrix is
/// diagonal.
fn radial_radius(domain: &PlanarDomain, weight: &WeightField) -> Option<f64> {
    let radius = domain.disc_radius()?;
    (weight.is_radial() || matches!(weight, WeightField::Zero)).then_some(radius)
}

pub fn radial_is_diagonal(domain: &PlanarDomain, weight: &WeightField) -> bool {
    radial_radius(domain, weight).is_some()
}

/// `M_{jk} = ∫_Ω ζ^j conj(ζ)^k e^{−φ} dλ` in the disc parameter `ζ`.
pub fn gram(
    domain: &PlanarDomain,
    weight: &WeightField,
    n: usize,
    quad: &QuadratureSpec,
) -> Result<DMatrix<Complex64>> {
    quad.validate()?;
    let m = match *quad {
        QuadratureSpec::AdaptiveRadial { target_err } => {
            let radius = radial_radius(domain, weight).ok_or_else(|| {
                Error::Unsupported("adaptive radial quadrature needs a radial weight on a disc".into())
            })?;
            let jac = radius * radius;
            let breaks: Vec<f64> = weight
                .radial_profile()
                .map(|p| p.kinks().iter().map(|t| (0.5 * t).exp() / radius).collect())
                .unwrap_or_default();
            let mut m = DMatrix::zeros(n + 1, n + 1);
            for j in 0..=n {
                let f = |r: f64| {
                    if r >= 1.0 {
                        return 0.0;
                    }
                    2.0 * PI * jac * r.powi(2 * j as i32 + 1) * (-weight.eval(Complex64::new(radius * r, 0.0))).exp()
                };
                let v = integrate_with_breaks(f, 0.0, 1.0, &breaks, 0.0, target_err)?;
                m[(j, j)] = Complex64::new(v.value, 0.0);
            }
            m
        }
        QuadratureSpec::PolarTensor { n_r, n_theta } => {
            let nodes = weighted_nodes(domain, weight, n_r, n_theta)?;
            let dim = n + 1;
            // fixed blocks summed in order: independent of the thread count
            let partials: Vec<DMatrix<Complex64>> = nodes
                .zeta
                .par_chunks(BLOCK)
                .zip(nodes.weight.par_chunks(BLOCK))
                .map(|(zs, ws)| {
                    let mut m = DMatrix::zeros(dim, dim);
                    for (z, w) in zs.iter().zip(ws) {
                        let p = powers(*z, n);
                        for k in 0..dim {
                            let ck = p[k].conj() * *w;
                            for j in 0..dim {
                                m[(j, k)] += p[j] * ck;
                            }
                        }
                    }
                    m
                })
                .collect();
            let mut m = DMatrix::zeros(dim, dim);
            for p in &partials {
                m += p;
            }
            // symmetrise round-off
            let mh = m.adjoint();
            (m + mh) * Complex64::new(0.5, 0.0)
        }
    };
    let (min_eig, _) = eigen_range(&m);
    if !(min_eig > 0.0) {
        return Err(Error::IndefiniteGram { min_eig });
    }
    Ok(m)
}

fn eigen_range(m: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Radial Gram matrices are diagonal, so the constant is optimal.
    Diagonal,
    Cholesky,
    Orthonormalisation,
}

/// Least-norm polynomial with `f(0) = 1` at a fixed degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinExtension {
    pub degree: usize,
    /// Coefficients of `ζ^0, …, ζ^N`; the first is exactly 1.
    pub coefficients: Vec<Complex64>,
    /// `1 / (e₀ᴴ M⁻¹ e₀)`
    pub norm_sq: f64,
    /// `cᴴ M c` recomputed from the coefficients
    pub norm_sq_from_coefficients: f64,
    /// Eigenvalue ratio of the Gram matrix.
    pub conditioning: f64,
    pub method: SolveMethod,
    pub quadrature: QuadratureSpec,
}

impl MinExtension {
    /// Relative gap between the two norm evaluations.
    pub fn duality_gap(&self) -> f64 {
        (self.norm_sq - self.norm_sq_from_coefficients).abs() / self.norm_sq
    }
}

/// The quadrature actually used at degree `n`: polar rules are raised to
/// `n_r ≥ 8(N+1)` and `n_θ ≥ 4(N+1)`.
pub fn quadrature_for_degree(quad: &QuadratureSpec, n: usize) -> QuadratureSpec {
    match *quad {
        QuadratureSpec::PolarTensor { n_r, n_theta } => {
            QuadratureSpec::PolarTensor { n_r: n_r.max(8 * (n + 1)), n_theta: n_theta.max(4 * (n + 1)) }
        }
        other => other,
    }
}

/// Minimises `∫_Ω |f|² e^{−φ}` over polynomials `f` of degree ≤ N in the
/// disc parameter with `f(0) = 1`.
pub fn min_extension(
    domain: &PlanarDomain,
    weight: &WeightField,
    n: usize,
    quad: &QuadratureSpec,
) -> Result<MinExtension> {
    let quad = quadrature_for_degree(quad, n);
    let m = gram(domain, weight, n, &quad)?;
    // ∫|Σ c_j ζ^j|² = Σ c_j conj(c_k) M_{jk} = cᴴ G c with G = conj(M)
    let g = m.map(|x| x.conj());
    let (min_eig, max_eig) = eigen_range(&g);
    let conditioning = max_eig / min_eig;
    let (coefficients, norm_sq, method) = if matches!(quad, QuadratureSpec::AdaptiveRadial { .. }) {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[0] = Complex64::new(1.0, 0.0);
        (c, g[(0, 0)].re, SolveMethod::Diagonal)
    } else if conditioning <= CHOLESKY_MAX_CONDITION {
        let chol = Cholesky::new(g.clone())
            .ok_or_else(|| Error::SingularSolve(format!("Cholesky failed, condition {conditioning:.3e}")))?;
        let mut e0 = DVector::zeros(n + 1);
        e0[0] = Complex64::new(1.0, 0.0);
        let y = chol.solve(&e0);
        let y0 = y[0].re;
        if !(y0 > 0.0 && y0.is_finite()) {
            return Err(Error::SingularSolve(format!("e₀ᴴ M⁻¹ e₀ = {y0}")));
        }
        let c: Vec<Complex64> = y.iter().map(|v| v / y[0]).collect();
        (c, 1.0 / y0, SolveMethod::Cholesky)
    } else {
        let (c, norm) = orthonormal_solve(domain, weight, n, &quad)?;
        (c, norm, SolveMethod::Orthonormalisation)
    };
    let mut coefficients = coefficients;
    coefficients[0] = Complex64::new(1.0, 0.0);
    let cv = DVector::from_vec(coefficients.clone());
    let norm_sq_from_coefficients = (cv.adjoint() * &g * &cv)[(0, 0)].re;
    Ok(MinExtension {
        degree: n,
        coefficients,
        norm_sq,
        norm_sq_from_coefficients,
        conditioning,
        method,
        quadrature: quad,
    })
}

/// Modified Gram–Schmidt on the monomials sampled at the weighted nodes,
/// `A = QR`; then `min |R c|²` subject to `c₀ = 1`.
fn orthonormal_solve(
    domain: &PlanarDomain,
    weight: &WeightField,
    n: usize,
    quad: &QuadratureSpec,
) -> Result<(Vec<Complex64>, f64)> {
    let QuadratureSpec::PolarTensor { n_r, n_theta } = *quad else {
        return Err(Error::SingularSolve("orthonormalisation needs a polar tensor quadrature".into()));
    };
    let nodes = weighted_nodes(domain, weight, n_r, n_theta)?;
    let dim = n + 1;
    let rows = nodes.zeta.len();
    let mut cols: Vec<Vec<Complex64>> = vec![Vec::with_capacity(rows); dim];
    for (z, w) in nodes.zeta.iter().zip(&nodes.weight) {
        let p = powers(*z, n);
        let s = w.sqrt();
        for j in 0..dim {
            cols[j].push(p[j] * s);
        }
    }
    let mut r = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..j {
            let (qi, qj) = (&cols[i], &cols[j]);
            let proj: Complex64 = qi.iter().zip(qj).map(|(a, b)| a.conj() * b).sum();
            r[(i, j)] = proj;
            let qi = cols[i].clone();
            for (x, q) in cols[j].iter_mut().zip(&qi) {
                *x -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::SingularSolve(format!("monomial {j} is dependent on lower degrees")));
        }
        r[(j, j)] = Complex64::new(norm, 0.0);
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    // c₀ = e₀ᵀ R⁻¹ a; the minimiser is a ∝ conj(ρ) with Rᵀ ρ = e₀
    let mut e0 = DVector::zeros(dim);
    e0[0] = Complex64::new(1.0, 0.0);
    let rho = r
        .transpose()
        .solve_lower_triangular(&e0)
        .ok_or_else(|| Error::SingularSolve("triangular factor is singular".into()))?;
    let rho_sq = rho.norm_squared();
    let a = rho.map(|x| x.conj() / rho_sq);
    let c = r.solve_upper_triangular(&a).ok_or_else(|| Error::SingularSolve("triangular factor is singular".into()))?;
    let c0 = c[0];
    Ok((c.iter().map(|x| x / c0).collect(), 1.0 / rho_sq))
}

/// Degree ladder and the accepted least-norm extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilisedExtension {
    pub accepted: MinExtension,
    /// `(N, norm_sq)` for every degree tried
    pub ladder: Vec<(usize, f64)>,
    /// `|m(N) − m(N/2)| / m(N/2)` at the accepted degree
    pub rel_change: f64,
}

pub const STABILISATION_TOL: f64 = 1e-3;

/// Doubles the degree from `n_start` until two consecutive norms agree to
/// [`STABILISATION_TOL`] or `n_max` is passed; the higher degree of the
/// agreeing pair is accepted.
pub fn stabilised_extension(
    domain: &PlanarDomain,
    weight: &WeightField,
    n_start: usize,
    n_max: usize,
    quad: &QuadratureSpec,
) -> Result<StabilisedExtension> {
    if n_start == 0 || n_start > n_max {
        return Err(Error::Config(format!("degree ladder needs 1 <= N_start <= N_max, got {n_start}, {n_max}")));
    }
    let mut prev = min_extension(domain, weight, n_start, quad)?;
    let mut ladder = vec![(n_start, prev.norm_sq)];
    let mut n = n_start;
    let mut rel_change = f64::INFINITY;
    while 2 * n <= n_max {
        n *= 2;
        let next = min_extension(domain, weight, n, quad)?;
        ladder.push((n, next.norm_sq));
        rel_change = (next.norm_sq - prev.norm_sq).abs() / prev.norm_sq;
        prev = next;
        if rel_change <= STABILISATION_TOL {
            return Ok(StabilisedExtension { accepted: prev, ladder, rel_change });
        }
    }
    Err(Error::NotStabilised { degree: n, rel_change })
}

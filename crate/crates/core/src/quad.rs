//! Quadrature machinery shared by the analytic engines.
//!
//! The workhorse is an adaptive 15-point Gauss-Kronrod panel integrator that
//! handles vector-valued integrands, so a whole family of fading exposures
//! can be integrated in one adaptive pass. On top of it sit a polar
//! integrator for the plane (radial half-line mapped to [0,1) through
//! r = t/(1-t)) and a real-line integrator (x = tan u). Gauss-Laguerre nodes
//! for the fading expectation come from the Golub-Welsch eigenproblem.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::Point;

/// Tolerances and budgets for the adaptive integrators.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel splits allowed per one-dimensional pass.
    pub max_subdivisions: usize,
    /// Order of the Gauss-Laguerre rule used for fading expectations.
    pub fading_quadrature_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            max_subdivisions: 2000,
            fading_quadrature_order: 64,
        }
    }
}

impl QuadratureConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.rel_tol <= 0.0 || self.abs_tol <= 0.0 || self.rel_tol.is_nan() || self.abs_tol.is_nan() {
            return Err(Error::InvalidConfig(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions == 0 || self.fading_quadrature_order == 0 {
            return Err(Error::InvalidConfig(
                "quadrature budgets must be at least one".into(),
            ));
        }
        Ok(())
    }
}

// 15-point Kronrod extension of 7-point Gauss (QUADPACK qk15 abscissae and
// weights; XGK holds the non-negative abscissae, descending).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// One Gauss-Kronrod panel over [a, b]. Writes the Kronrod estimate into
/// `value` and |Kronrod - Gauss| into `err`, per component.
fn gk15_panel<F>(f: &mut F, a: f64, b: f64, value: &mut [f64], err: &mut [f64]) -> Result<()>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let dim = value.len();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);

    let mut fx = vec![0.0; dim];
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];

    f(mid, &mut fx)?;
    for i in 0..dim {
        kron[i] += WGK[7] * fx[i];
        gauss[i] += WG[3] * fx[i];
    }
    for j in 0..7 {
        let x = half * XGK[j];
        let mut pair = vec![0.0; dim];
        f(mid - x, &mut fx)?;
        for i in 0..dim {
            pair[i] += fx[i];
        }
        f(mid + x, &mut fx)?;
        for i in 0..dim {
            pair[i] += fx[i];
        }
        for i in 0..dim {
            kron[i] += WGK[j] * pair[i];
        }
        if j % 2 == 1 {
            let g = WG[j / 2];
            for i in 0..dim {
                gauss[i] += g * pair[i];
            }
        }
    }
    for i in 0..dim {
        value[i] = kron[i] * half;
        err[i] = (kron[i] - gauss[i]).abs() * half;
    }
    Ok(())
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: Vec<f64>,
    max_err: f64,
}

impl Panel {
    fn new<F>(f: &mut F, a: f64, b: f64, dim: usize) -> Result<Self>
    where
        F: FnMut(f64, &mut [f64]) -> Result<()>,
    {
        let mut value = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        gk15_panel(f, a, b, &mut value, &mut err)?;
        let max_err = err.iter().cloned().fold(0.0, f64::max);
        Ok(Panel {
            a,
            b,
            value,
            err,
            max_err,
        })
    }
}

/// Adaptive Gauss-Kronrod over the panels delimited by `breakpoints`
/// (strictly increasing, at least two entries). Vector-valued: every
/// component must individually satisfy err <= max(abs_tol, rel_tol * |I|).
pub(crate) fn adaptive_panels_vec<F>(
    mut f: F,
    breakpoints: &[f64],
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    assert!(breakpoints.len() >= 2);
    let mut panels: Vec<Panel> = Vec::new();
    let mut total = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];

    for w in breakpoints.windows(2) {
        let p = Panel::new(&mut f, w[0], w[1], dim)?;
        for i in 0..dim {
            total[i] += p.value[i];
            total_err[i] += p.err[i];
        }
        panels.push(p);
    }

    let converged = |total: &[f64], total_err: &[f64]| {
        (0..dim).all(|i| total_err[i] <= abs_tol.max(rel_tol * total[i].abs()))
    };

    let mut splits = 0usize;
    while !converged(&total, &total_err) {
        if splits >= max_subdivisions {
            let achieved = (0..dim)
                .map(|i| total_err[i] / abs_tol.max(rel_tol * total[i].abs()) * rel_tol)
                .fold(0.0, f64::max);
            return Err(Error::QuadratureNonConvergence {
                requested: rel_tol,
                achieved,
                subdivisions: splits,
            });
        }
        // split the panel with the largest raw error estimate
        let mut worst = 0;
        for (k, p) in panels.iter().enumerate() {
            if p.max_err > panels[worst].max_err {
                worst = k;
            }
        }
        let parent = panels.swap_remove(worst);
        let mid = 0.5 * (parent.a + parent.b);
        if !(parent.a < mid && mid < parent.b) {
            return Err(Error::QuadratureNonConvergence {
                requested: rel_tol,
                achieved: parent.max_err,
                subdivisions: splits,
            });
        }
        let left = Panel::new(&mut f, parent.a, mid, dim)?;
        let right = Panel::new(&mut f, mid, parent.b, dim)?;
        for i in 0..dim {
            total[i] += left.value[i] + right.value[i] - parent.value[i];
            total_err[i] += left.err[i] + right.err[i] - parent.err[i];
        }
        panels.push(left);
        panels.push(right);
        splits += 1;
    }

    // deterministic final assembly: sum panels in spatial order, compensated
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut sum = vec![0.0; dim];
    let mut comp = vec![0.0; dim];
    for p in &panels {
        for i in 0..dim {
            let y = p.value[i] - comp[i];
            let t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
    }
    Ok(sum)
}

/// Scalar adaptive quadrature over [a, b].
pub(crate) fn adaptive_1d<F>(
    mut f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let v = adaptive_panels_vec(
        |x, out| {
            out[0] = f(x);
            Ok(())
        },
        breakpoints,
        1,
        rel_tol,
        abs_tol,
        max_subdivisions,
    )?;
    Ok(v[0])
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const MAX_ANGULAR_PANEL: f64 = std::f64::consts::FRAC_PI_2;

/// Angular breakpoints over one full turn, seeded by the directions of the
/// feature points and refined so no initial panel exceeds MAX_ANGULAR_PANEL.
fn angular_breakpoints(center: Point, features: &[Point]) -> Vec<f64> {
    let mut angles: Vec<f64> = features
        .iter()
        .filter_map(|p| {
            let dx = p[0] - center[0];
            let dy = p[1] - center[1];
            if dx == 0.0 && dy == 0.0 {
                None
            } else {
                let mut a = dy.atan2(dx);
                if a < 0.0 {
                    a += TWO_PI;
                }
                Some(a)
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if angles.is_empty() {
        angles.push(0.0);
    }

    let start = angles[0];
    let mut breaks = vec![start];
    for k in 0..angles.len() {
        let lo = angles[k];
        let hi = if k + 1 < angles.len() {
            angles[k + 1]
        } else {
            start + TWO_PI
        };
        let width = hi - lo;
        if width <= 0.0 {
            continue;
        }
        let pieces = (width / MAX_ANGULAR_PANEL).ceil().max(1.0) as usize;
        for j in 1..=pieces {
            breaks.push(lo + width * j as f64 / pieces as f64);
        }
    }
    breaks
}

/// Radial breakpoints in the mapped coordinate t = r/(1+r).
fn radial_breakpoints(center: Point, features: &[Point]) -> Vec<f64> {
    let mut radii: Vec<f64> = features
        .iter()
        .map(|p| crate::model::dist_squared(*p, center).sqrt())
        .filter(|r| *r > 0.0)
        .collect();
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    radii.push(2.0 * r_max + 1.0);
    let mut t: Vec<f64> = radii.iter().map(|r| r / (1.0 + r)).collect();
    t.push(0.0);
    t.push(1.0);
    t.sort_by(f64::total_cmp);
    t.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    t
}

/// Integrate a vector-valued integrand over the whole plane in polar
/// coordinates about `center`. `features` seed the initial panel layout;
/// the integrand must decay at least as fast as r^-alpha with alpha > 2.
pub(crate) fn integrate_r2_multi<F>(
    f: F,
    dim: usize,
    center: Point,
    features: &[Point],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>>
where
    F: Fn(Point, &mut [f64]),
{
    cfg.validate()?;
    let theta_breaks = angular_breakpoints(center, features);
    let t_breaks = radial_breakpoints(center, features);

    let inner_rel = 0.5 * cfg.rel_tol;
    let inner_abs = 0.5 * cfg.abs_tol;

    let radial = |theta: f64, out: &mut [f64]| -> Result<()> {
        let (sin_t, cos_t) = theta.sin_cos();
        let v = adaptive_panels_vec(
            |t: f64, buf: &mut [f64]| {
                let one_minus = 1.0 - t;
                if one_minus <= f64::EPSILON {
                    buf.fill(0.0);
                    return Ok(());
                }
                let r = t / one_minus;
                let x = [center[0] + r * cos_t, center[1] + r * sin_t];
                f(x, buf);
                let jac = r / (one_minus * one_minus);
                for v in buf.iter_mut() {
                    *v *= jac;
                }
                Ok(())
            },
            &t_breaks,
            dim,
            inner_rel,
            inner_abs,
            cfg.max_subdivisions,
        )?;
        out.copy_from_slice(&v);
        Ok(())
    };

    adaptive_panels_vec(
        radial,
        &theta_breaks,
        dim,
        0.5 * cfg.rel_tol,
        0.5 * cfg.abs_tol,
        cfg.max_subdivisions,
    )
}

/// Integrate a scalar function over the plane. See [`integrate_r2_multi`].
pub fn integrate_r2<F>(f: F, center: Point, features: &[Point], cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(Point) -> f64,
{
    let v = integrate_r2_multi(|x, out| out[0] = f(x), 1, center, features, cfg)?;
    Ok(v[0])
}

/// Integrate a scalar function over the real line via x = tan(u).
///
/// `features` are abscissae where the integrand has structure. The product
/// f(x) * (1 + x^2) must stay bounded, i.e. f decays at least as x^-2.
pub(crate) fn integrate_real_line<F>(
    f: F,
    features: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut breaks: Vec<f64> = features.iter().map(|x| x.atan()).collect();
    breaks.push(-std::f64::consts::FRAC_PI_2);
    breaks.push(0.0);
    breaks.push(std::f64::consts::FRAC_PI_2);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    adaptive_1d(
        |u: f64| {
            let x = u.tan();
            let sec2 = 1.0 + x * x;
            f(x) * sec2
        },
        &breaks,
        rel_tol,
        abs_tol,
        max_subdivisions,
    )
}

/// Nodes and weights for ∫_0^∞ e^{-x} f(x) dx.
#[derive(Debug, Clone)]
pub(crate) struct GaussLaguerre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Golub-Welsch: eigen-decompose the Jacobi matrix of the Laguerre
    /// recurrence (diagonal 2k+1, off-diagonal k).
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidConfig(
                "Gauss-Laguerre order must be at least one".into(),
            ));
        }
        let n = order;
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (2 * i + 1) as f64
            } else if i + 1 == j || j + 1 == i {
                i.max(j) as f64
            } else {
                0.0
            }
        });
        let eig = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let node = eig.eigenvalues[k];
                let v0 = eig.eigenvectors[(0, k)];
                (node, v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(GaussLaguerre {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }
}

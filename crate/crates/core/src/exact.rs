//! Exact secure connection probability of a given path.
//!
//! Colluding case: the probability is exp(-lambda_E * I) where I is a plane
//! integral of 1 - prod_k 1/(1 + p_k S / d_k^alpha) and S is the bottleneck
//! SNR rate. Non-colluding case: the plane integral of the hypoexponential
//! survival is taken for a batch of bottleneck fading values and the outer
//! expectation is a Gauss-Laguerre sum, since the integrand depends on the
//! fadings only through their minimum, which is exponential with rate S.
//! Both exposures are independent of lambda_E, which makes density sweeps
//! cheap.

use crate::error::Result;
use crate::hypoexp::HypoExpRates;
use crate::model::{
    alpha_weight, dist_squared, Method, NetworkModel, Path, Point, ScpEstimate,
};
use crate::quad::{integrate_r2, integrate_r2_multi, GaussLaguerre, QuadratureConfig};

fn path_centroid(model: &NetworkModel, path: &Path) -> Point {
    let mut c = [0.0, 0.0];
    for &i in path.nodes() {
        let p = model.node(i);
        c[0] += p[0];
        c[1] += p[1];
    }
    let n = path.nodes().len() as f64;
    [c[0] / n, c[1] / n]
}

/// The plane integral multiplying -lambda_E in the colluding SCP exponent.
pub fn colluding_exposure(model: &NetworkModel, path: &Path, quad: &QuadratureConfig) -> Result<f64> {
    quad.validate()?;
    let alpha = model.alpha();
    let s: f64 = model.hop_rate_terms(path)?.iter().sum();
    let tx = model.transmitters(path);
    let scaled: Vec<(Point, f64)> = tx.iter().map(|(p, pw)| (*p, pw * s)).collect();
    let centroid = path_centroid(model, path);
    let features: Vec<Point> = tx.iter().map(|(p, _)| *p).collect();

    integrate_r2(
        move |x| {
            // 1 - prod 1/(1+b_k/d_k^alpha), evaluated without cancellation
            let mut log_sum = 0.0;
            for (p, b) in &scaled {
                let d_alpha = alpha_weight(dist_squared(x, *p), alpha);
                log_sum += (b / d_alpha).ln_1p();
            }
            -(-log_sum).exp_m1()
        },
        centroid,
        &features,
        quad,
    )
}

pub fn scp_exact_colluding(
    model: &NetworkModel,
    path: &Path,
    quad: &QuadratureConfig,
) -> Result<ScpEstimate> {
    if model.lambda_e() == 0.0 {
        // still validate the inputs
        model.hop_rate_terms(path)?;
        quad.validate()?;
        return Ok(ScpEstimate::analytic(1.0, Method::Exact));
    }
    let exposure = colluding_exposure(model, path, quad)?;
    let value = (-model.lambda_e() * exposure).exp();
    Ok(ScpEstimate::analytic(value, Method::Exact))
}

/// Plane integrals of the eavesdropper survival, one per Gauss-Laguerre node
/// of the bottleneck fading expectation. Density-independent.
#[derive(Debug, Clone)]
pub struct FadingExposure {
    weights: Vec<f64>,
    exposures: Vec<f64>,
}

impl FadingExposure {
    /// Non-colluding SCP at the given eavesdropper density.
    pub fn scp(&self, lambda_e: f64) -> f64 {
        if lambda_e == 0.0 {
            return 1.0;
        }
        let v: f64 = self
            .weights
            .iter()
            .zip(&self.exposures)
            .map(|(w, j)| w * (-lambda_e * j).exp())
            .sum();
        v.clamp(0.0, 1.0)
    }

    pub fn exposures(&self) -> &[f64] {
        &self.exposures
    }
}

pub fn noncolluding_exposure(
    model: &NetworkModel,
    path: &Path,
    quad: &QuadratureConfig,
) -> Result<FadingExposure> {
    quad.validate()?;
    let alpha = model.alpha();
    let bottleneck_rate: f64 = model.hop_rate_terms(path)?.iter().sum();
    let rule = GaussLaguerre::new(quad.fading_quadrature_order)?;
    // The integrand exp(-lambda J(u/rate)) has a boundary layer at u of
    // order (lambda J-scale)^(alpha/2), far below the first Laguerre node.
    // Integrating in v with u = v^3/(1+v)^2 moves the layer into resolvable
    // territory while keeping the e^{-u} tail weight bounded; the rule then
    // converges to ~1e-6 already at order 64.
    let mut node_weights = Vec::with_capacity(rule.nodes.len());
    let mut fading_values = Vec::with_capacity(rule.nodes.len());
    for (&v, &w) in rule.nodes.iter().zip(&rule.weights) {
        let one_plus = 1.0 + v;
        let u = v * v * v / (one_plus * one_plus);
        let du = (3.0 * v * v * one_plus - 2.0 * v * v * v) / (one_plus * one_plus * one_plus);
        node_weights.push(w * (v - u).exp() * du);
        fading_values.push(u / bottleneck_rate);
    }
    let tx = model.transmitters(path);
    let centroid = path_centroid(model, path);
    let features: Vec<Point> = tx.iter().map(|(p, _)| *p).collect();
    let dim = fading_values.len();

    let exposures = integrate_r2_multi(
        move |x, out| {
            let mut rates = Vec::with_capacity(tx.len());
            let mut on_transmitter = false;
            for (p, pw) in &tx {
                let rate = alpha_weight(dist_squared(x, *p), alpha) / pw;
                if rate == 0.0 {
                    on_transmitter = true;
                    break;
                }
                // infinitely far in this hop's terms: contributes nothing
                if rate.is_finite() {
                    rates.push(rate);
                }
            }
            if on_transmitter {
                out.fill(1.0);
                return;
            }
            if rates.is_empty() {
                out.fill(0.0);
                return;
            }
            let dist = HypoExpRates::new(&rates).expect("positive finite rates");
            for (o, m) in out.iter_mut().zip(&fading_values) {
                *o = dist.survival(*m);
            }
        },
        dim,
        centroid,
        &features,
        quad,
    )?;
    Ok(FadingExposure {
        weights: node_weights,
        exposures,
    })
}

pub fn scp_exact_noncolluding(
    model: &NetworkModel,
    path: &Path,
    quad: &QuadratureConfig,
) -> Result<ScpEstimate> {
    if model.lambda_e() == 0.0 {
        model.hop_rate_terms(path)?;
        quad.validate()?;
        return Ok(ScpEstimate::analytic(1.0, Method::Exact));
    }
    let profile = noncolluding_exposure(model, path, quad)?;
    Ok(ScpEstimate::analytic(
        profile.scp(model.lambda_e()),
        Method::Exact,
    ))
}

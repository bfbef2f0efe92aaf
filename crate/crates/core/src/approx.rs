//! Closed-form SCP approximations and their gamma-function constants.
//!
//! Colluding: moving every transmitter to a common anchor can only enlarge
//! the eavesdropper exposure integral, so the anchored value upper-bounds
//! the exact SCP; with equal powers it collapses to exp[-K2(N) (sum d^a)^(2/a)].
//! Non-colluding: co-locating transmitters plus one Jensen step gives
//! exp[-K1 (sum p * sum d^a/p)^(2/a)] for arbitrary powers.

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::model::{
    alpha_weight, dist_squared, Method, NetworkModel, Path, Point, ScpEstimate,
};
use crate::quad::{integrate_r2, integrate_real_line, QuadratureConfig};

/// Powers within this relative spread take the equal-power closed form.
pub(crate) const EQUAL_POWER_TOL: f64 = 1e-12;

/// The two gamma constants K1 and K2(N) for a given exponent and density.
#[derive(Debug, Clone)]
pub struct GammaConstants {
    alpha: f64,
    lambda_e: f64,
    gamma_minus: f64,
    gamma_plus: f64,
}

impl GammaConstants {
    pub fn new(alpha: f64, lambda_e: f64) -> Result<Self> {
        if alpha <= 2.0 || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange { alpha });
        }
        if lambda_e < 0.0 || !lambda_e.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "eavesdropper density must be finite and >= 0, got {lambda_e}"
            )));
        }
        Ok(GammaConstants {
            alpha,
            lambda_e,
            gamma_minus: gamma(1.0 - 2.0 / alpha),
            gamma_plus: gamma(1.0 + 2.0 / alpha),
        })
    }

    /// pi * lambda_E * Gamma(1+2/a) * Gamma(1-2/a)
    pub fn k1(&self) -> f64 {
        std::f64::consts::PI * self.lambda_e * self.gamma_plus * self.gamma_minus
    }

    /// lambda_E * pi * Gamma(1-2/a) * Gamma(2/a+N) / Gamma(N)
    pub fn k2(&self, n_hops: usize) -> f64 {
        assert!(n_hops >= 1, "k2 needs at least one hop");
        let n = n_hops as f64;
        let ratio = if n + 2.0 / self.alpha < 170.0 {
            gamma(n + 2.0 / self.alpha) / gamma(n)
        } else {
            (ln_gamma(n + 2.0 / self.alpha) - ln_gamma(n)).exp()
        };
        std::f64::consts::PI * self.lambda_e * self.gamma_minus * ratio
    }
}

pub fn k1(alpha: f64, lambda_e: f64) -> Result<f64> {
    Ok(GammaConstants::new(alpha, lambda_e)?.k1())
}

pub fn k2(n_hops: usize, alpha: f64, lambda_e: f64) -> Result<f64> {
    if n_hops == 0 {
        return Err(Error::InvalidConfig("k2 needs at least one hop".into()));
    }
    Ok(GammaConstants::new(alpha, lambda_e)?.k2(n_hops))
}

/// Anchored colluding exposure: every hop's eavesdropper distance is taken
/// from the single anchor point. Equals the closed form under equal powers
/// and is independent of the anchor position (translation invariance);
/// density sweeps can reuse it.
pub fn anchored_colluding_exposure(
    model: &NetworkModel,
    path: &Path,
    quad: &QuadratureConfig,
    anchor: Point,
) -> Result<f64> {
    quad.validate()?;
    let alpha = model.alpha();
    let s: f64 = model.hop_rate_terms(path)?.iter().sum();
    let b: Vec<f64> = model.transmitters(path).iter().map(|(_, p)| p * s).collect();
    // the bump sits at the anchor; seed the radial scale of the integrand
    let scale = b.iter().cloned().fold(0.0, f64::max).powf(1.0 / alpha);
    let features = [anchor, [anchor[0] + scale, anchor[1]]];
    integrate_r2(
        move |x| {
            let d_alpha = alpha_weight(dist_squared(x, anchor), alpha);
            let mut log_sum = 0.0;
            for bk in &b {
                log_sum += (bk / d_alpha).ln_1p();
            }
            -(-log_sum).exp_m1()
        },
        anchor,
        &features,
        quad,
    )
}

/// Colluding upper-bound approximation with an explicit anchor choice,
/// given as an index into the path (diagnostic; the default picks the
/// source). Always evaluated by quadrature.
pub fn scp_approx_colluding_anchored(
    model: &NetworkModel,
    path: &Path,
    quad: &QuadratureConfig,
    anchor_pos: usize,
) -> Result<ScpEstimate> {
    if anchor_pos >= path.nodes().len() {
        return Err(Error::InvalidConfig(format!(
            "anchor position {anchor_pos} outside a path of {} nodes",
            path.nodes().len()
        )));
    }
    if model.lambda_e() == 0.0 {
        model.hop_rate_terms(path)?;
        return Ok(ScpEstimate::analytic(1.0, Method::Approx));
    }
    let anchor = model.node(path.nodes()[anchor_pos]);
    let exposure = anchored_colluding_exposure(model, path, quad, anchor)?;
    Ok(ScpEstimate::analytic(
        (-model.lambda_e() * exposure).exp(),
        Method::Approx,
    ))
}

/// Colluding SCP approximation: closed form when powers are equal, anchored
/// quadrature (anchor = source node) otherwise.
pub fn scp_approx_colluding(
    model: &NetworkModel,
    path: &Path,
    quad: &QuadratureConfig,
) -> Result<ScpEstimate> {
    if model.lambda_e() == 0.0 {
        model.hop_rate_terms(path)?;
        return Ok(ScpEstimate::analytic(1.0, Method::Approx));
    }
    if model.power_spread() <= EQUAL_POWER_TOL {
        let gc = GammaConstants::new(model.alpha(), model.lambda_e())?;
        let hops = path.hops();
        let weight_sum: f64 = {
            // equal powers cancel: B_k = sum of d^alpha
            let nodes = path.nodes();
            let mut s = 0.0;
            for w in nodes.windows(2) {
                let d2 = dist_squared(model.node(w[0]), model.node(w[1]));
                if d2 == 0.0 {
                    return Err(Error::ZeroDistance { a: w[0], b: w[1] });
                }
                s += alpha_weight(d2, model.alpha());
            }
            s
        };
        let exponent = gc.k2(hops) * weight_sum.powf(2.0 / model.alpha());
        return Ok(ScpEstimate::analytic((-exponent).exp(), Method::Approx));
    }
    scp_approx_colluding_anchored(model, path, quad, 0)
}

/// Non-colluding SCP approximation, closed form for arbitrary powers.
pub fn scp_approx_noncolluding(model: &NetworkModel, path: &Path) -> Result<ScpEstimate> {
    let rate_sum: f64 = model.hop_rate_terms(path)?.iter().sum();
    if model.lambda_e() == 0.0 {
        return Ok(ScpEstimate::analytic(1.0, Method::Approx));
    }
    let power_sum: f64 = model.transmitters(path).iter().map(|(_, p)| p).sum();
    let gc = GammaConstants::new(model.alpha(), model.lambda_e())?;
    let exponent = gc.k1() * (power_sum * rate_sum).powf(2.0 / model.alpha());
    Ok(ScpEstimate::analytic((-exponent).exp(), Method::Approx))
}

/// The pair of line integrals behind the anchoring bound: distinct anchors
/// versus a common anchor (the first one). The first component is never
/// smaller than the second.
pub fn lemma1_integrals(
    anchors: &[f64],
    scales: &[f64],
    quad: &QuadratureConfig,
) -> Result<(f64, f64)> {
    quad.validate()?;
    if anchors.is_empty() || anchors.len() != scales.len() {
        return Err(Error::InvalidConfig(format!(
            "need matching non-empty anchor/scale lists, got {} and {}",
            anchors.len(),
            scales.len()
        )));
    }
    for &a in anchors {
        if !a.is_finite() {
            return Err(Error::InvalidConfig("anchors must be finite".into()));
        }
    }
    for &b in scales {
        if b < 0.0 || !b.is_finite() {
            return Err(Error::InvalidConfig(
                "scales must be finite and non-negative".into(),
            ));
        }
    }

    let integrand = |anchor_of: &dyn Fn(usize) -> f64| {
        let anchors: Vec<f64> = (0..scales.len()).map(anchor_of).collect();
        let scales = scales.to_vec();
        move |x: f64| {
            let mut log_sum = 0.0;
            for (a, b) in anchors.iter().zip(&scales) {
                if *b == 0.0 {
                    continue;
                }
                let shifted = x + a;
                log_sum += (b / (shifted * shifted)).ln_1p();
            }
            -(-log_sum).exp_m1()
        }
    };

    let features_f: Vec<f64> = anchors.iter().map(|a| -a).collect();
    let f_n = integrate_real_line(
        integrand(&|k| anchors[k]),
        &features_f,
        quad.rel_tol,
        quad.abs_tol,
        quad.max_subdivisions,
    )?;
    let g_n = integrate_real_line(
        integrand(&|_| anchors[0]),
        &[-anchors[0]],
        quad.rel_tol,
        quad.abs_tol,
        quad.max_subdivisions,
    )?;
    Ok((f_n, g_n))
}

//! Network geometry and the domain types shared by every estimator.
//!
//! Distances are always derived from node coordinates; nothing caches them
//! except the routing layer, which owns its own weight matrix. All lengths
//! are dimensionless and the eavesdropper density is per square unit.

use crate::error::{Error, Result};

pub type Point = [f64; 2];

pub(crate) fn dist_squared(a: Point, b: Point) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// d^alpha from a squared distance, avoiding the intermediate sqrt.
pub(crate) fn alpha_weight(d2: f64, alpha: f64) -> f64 {
    d2.powf(alpha * 0.5)
}

/// Which eavesdropper aggregation applies: pooled SNR or strongest receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EavesdropperMode {
    Colluding,
    NonColluding,
}

impl std::fmt::Display for EavesdropperMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EavesdropperMode::Colluding => write!(f, "colluding"),
            EavesdropperMode::NonColluding => write!(f, "noncolluding"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    Exact,
    Approx,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::MonteCarlo => write!(f, "mc"),
            Method::Exact => write!(f, "exact"),
            Method::Approx => write!(f, "approx"),
        }
    }
}

/// A secure connection probability together with how it was obtained.
///
/// `ci_halfwidth` is present exactly for Monte-Carlo estimates.
#[derive(Debug, Clone)]
pub struct ScpEstimate {
    pub value: f64,
    pub method: Method,
    pub ci_halfwidth: Option<f64>,
    pub trials: Option<u64>,
}

impl ScpEstimate {
    pub fn analytic(value: f64, method: Method) -> Self {
        debug_assert!(method != Method::MonteCarlo);
        ScpEstimate {
            value,
            method,
            ci_halfwidth: None,
            trials: None,
        }
    }

    pub fn monte_carlo(value: f64, ci_halfwidth: f64, trials: u64) -> Self {
        ScpEstimate {
            value,
            method: Method::MonteCarlo,
            ci_halfwidth: Some(ci_halfwidth),
            trials: Some(trials),
        }
    }
}

/// An ordered sequence of at least two distinct legitimate node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    nodes: Vec<usize>,
}

impl Path {
    pub fn new(nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "need at least two nodes, got {}",
                nodes.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &n in &nodes {
            if !seen.insert(n) {
                return Err(Error::InvalidPath(format!("node {n} repeats")));
            }
        }
        Ok(Path { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Number of hops, i.e. node count minus one.
    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn source(&self) -> usize {
        self.nodes[0]
    }

    pub fn destination(&self) -> usize {
        *self.nodes.last().unwrap()
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", s.join("-"))
    }
}

/// Legitimate node positions, per-node transmit power, path-loss exponent
/// and eavesdropper density.
///
/// Noise is normalized to one, so powers are transmit-power-to-noise ratios.
/// Immutable after construction; every operation on it is pure.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    nodes: Vec<Point>,
    powers: Vec<f64>,
    alpha: f64,
    lambda_e: f64,
}

impl NetworkModel {
    pub fn new(nodes: Vec<Point>, powers: Vec<f64>, alpha: f64, lambda_e: f64) -> Result<Self> {
        if alpha <= 2.0 || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange { alpha });
        }
        if nodes.len() < 2 {
            return Err(Error::InvalidModel(format!(
                "need at least two nodes, got {}",
                nodes.len()
            )));
        }
        if powers.len() != nodes.len() {
            return Err(Error::InvalidModel(format!(
                "{} powers for {} nodes",
                powers.len(),
                nodes.len()
            )));
        }
        if lambda_e < 0.0 || !lambda_e.is_finite() {
            return Err(Error::InvalidModel(format!(
                "eavesdropper density must be finite and >= 0, got {lambda_e}"
            )));
        }
        for (i, p) in nodes.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::InvalidModel(format!("node {i} is not finite")));
            }
        }
        for (i, &p) in powers.iter().enumerate() {
            if p <= 0.0 || !p.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "power of node {i} must be finite and > 0, got {p}"
                )));
            }
        }
        Ok(NetworkModel {
            nodes,
            powers,
            alpha,
            lambda_e,
        })
    }

    /// All nodes share one transmit power.
    pub fn with_uniform_power(
        nodes: Vec<Point>,
        power: f64,
        alpha: f64,
        lambda_e: f64,
    ) -> Result<Self> {
        let n = nodes.len();
        Self::new(nodes, vec![power; n], alpha, lambda_e)
    }

    /// Same network, different eavesdropper density. Handy for sweeps.
    pub fn with_lambda_e(&self, lambda_e: f64) -> Result<Self> {
        Self::new(
            self.nodes.clone(),
            self.powers.clone(),
            self.alpha,
            lambda_e,
        )
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }

    /// Relative spread of transmit powers, zero when all equal.
    pub fn power_spread(&self) -> f64 {
        let max = self.powers.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.powers.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / max
    }

    fn check_path(&self, path: &Path) -> Result<()> {
        for &n in path.nodes() {
            if n >= self.nodes.len() {
                return Err(Error::InvalidPath(format!(
                    "node index {n} out of range (network has {})",
                    self.nodes.len()
                )));
            }
        }
        Ok(())
    }

    /// Euclidean length of every hop along `path`.
    pub fn hop_distances(&self, path: &Path) -> Result<Vec<f64>> {
        self.check_path(path)?;
        let nodes = path.nodes();
        let mut out = Vec::with_capacity(path.hops());
        for w in nodes.windows(2) {
            let d2 = dist_squared(self.nodes[w[0]], self.nodes[w[1]]);
            if d2 == 0.0 {
                return Err(Error::ZeroDistance { a: w[0], b: w[1] });
            }
            out.push(d2.sqrt());
        }
        Ok(out)
    }

    /// Rate parameter of the bottleneck legitimate SNR along `path`.
    ///
    /// The per-hop SNRs are exponential with rates d^alpha / p, so their
    /// minimum is exponential with the summed rate.
    pub fn legit_min_snr_rate(&self, path: &Path) -> Result<f64> {
        let terms = self.hop_rate_terms(path)?;
        Ok(terms.iter().sum())
    }

    /// d_i^alpha / p_i for every hop, indexed by hop.
    pub(crate) fn hop_rate_terms(&self, path: &Path) -> Result<Vec<f64>> {
        self.check_path(path)?;
        let nodes = path.nodes();
        let mut out = Vec::with_capacity(path.hops());
        for w in nodes.windows(2) {
            let d2 = dist_squared(self.nodes[w[0]], self.nodes[w[1]]);
            if d2 == 0.0 {
                return Err(Error::ZeroDistance { a: w[0], b: w[1] });
            }
            out.push(alpha_weight(d2, self.alpha) / self.powers[w[0]]);
        }
        Ok(out)
    }

    /// Positions and powers of the transmitting nodes along `path`
    /// (all nodes but the destination).
    pub(crate) fn transmitters(&self, path: &Path) -> Vec<(Point, f64)> {
        let nodes = path.nodes();
        nodes[..nodes.len() - 1]
            .iter()
            .map(|&i| (self.nodes[i], self.powers[i]))
            .collect()
    }
}

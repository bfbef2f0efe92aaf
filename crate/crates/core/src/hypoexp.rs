//! Distribution of a sum of independent exponentials with arbitrary rates.
//!
//! The textbook partial-fraction form (delta coefficients over pairwise rate
//! differences) is exact but explodes numerically when rates cluster. Three
//! evaluation plans cover the whole parameter space:
//!
//! * a single exponential or a merged Erlang-type expansion when rates are
//!   equal within 1e-6 relative (the confluent limit),
//! * the partial-fraction expansion with per-cluster multiplicities when its
//!   coefficients stay small enough to add without losing more than ~1e-9,
//! * a uniformized scaling-and-squaring matrix exponential of the bidiagonal
//!   phase-type generator otherwise; every intermediate there is
//!   non-negative, so no cancellation occurs at any spread of rates.
//!
//! Rates are normalized by their geometric mean before any of this, which
//! keeps products of dozens of rates away from overflow.

use crate::error::{Error, Result};

/// Relative gap below which two rates are treated as one (Erlang limit).
const MERGE_TOL: f64 = 1e-6;
/// Largest tolerable magnitude among partial-fraction terms.
const COEF_LIMIT: f64 = 1e7;
/// Survival is flushed to zero once min-rate * y exceeds this.
const TAIL_CUTOFF: f64 = 500.0;

#[derive(Debug, Clone)]
struct Cluster {
    rate: f64,
    /// Coefficients c_l of the survival expansion e^{-rate y} * sum c_l y^l.
    coefs: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Plan {
    Single { rate: f64 },
    PartialFraction { clusters: Vec<Cluster> },
    MatrixExp { rates: Vec<f64> },
}

/// Per-hop eavesdropper SNR rates; the sum of the corresponding exponential
/// variables is this distribution.
#[derive(Debug, Clone)]
pub struct HypoExpRates {
    scale: f64,
    min_rate: f64,
    plan: Plan,
}

impl HypoExpRates {
    pub fn new(rates: &[f64]) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::NumericallyDegenerateRates("empty rate list".into()));
        }
        for &r in rates {
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::NumericallyDegenerateRates(format!(
                    "rates must be finite and positive, got {r}"
                )));
            }
        }
        let scale = (rates.iter().map(|r| r.ln()).sum::<f64>() / rates.len() as f64).exp();
        let mut scaled: Vec<f64> = rates.iter().map(|r| r / scale).collect();
        scaled.sort_by(f64::total_cmp);
        let min_rate = scaled[0];

        if scaled.len() == 1 {
            return Ok(HypoExpRates {
                scale,
                min_rate,
                plan: Plan::Single { rate: scaled[0] },
            });
        }

        let groups = merge_rates(&scaled);
        let plan = match partial_fraction_plan(&groups) {
            Some(clusters) => Plan::PartialFraction { clusters },
            None => Plan::MatrixExp { rates: scaled },
        };
        Ok(HypoExpRates {
            scale,
            min_rate,
            plan,
        })
    }

    /// Number of summed exponentials.
    pub fn len(&self) -> usize {
        match &self.plan {
            Plan::Single { .. } => 1,
            Plan::PartialFraction { clusters } => clusters.iter().map(|c| c.coefs.len()).sum(),
            Plan::MatrixExp { rates } => rates.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// P(sum > y).
    pub fn survival(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        let ys = y * self.scale;
        if self.min_rate * ys > TAIL_CUTOFF {
            return 0.0;
        }
        let s = match &self.plan {
            Plan::Single { rate } => (-rate * ys).exp(),
            Plan::PartialFraction { clusters } => {
                let mut acc = 0.0;
                for c in clusters {
                    let e = (-c.rate * ys).exp();
                    let mut poly = 0.0;
                    let mut ypow = 1.0;
                    for &coef in &c.coefs {
                        poly += coef * ypow;
                        ypow *= ys;
                    }
                    acc += e * poly;
                }
                acc
            }
            Plan::MatrixExp { rates } => survival_matrix_exp(rates, ys),
        };
        s.clamp(0.0, 1.0)
    }

    /// P(sum < y).
    pub fn cdf(&self, y: f64) -> f64 {
        1.0 - self.survival(y)
    }
}

/// Sorted rates -> (cluster rate, multiplicity), merging near-equal rates.
fn merge_rates(sorted: &[f64]) -> Vec<(f64, usize)> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=sorted.len() {
        let split = k == sorted.len() || (sorted[k] - sorted[k - 1]) > MERGE_TOL * sorted[k];
        if split {
            let members = &sorted[start..k];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            groups.push((mean, members.len()));
            start = k;
        }
    }
    groups
}

/// Survival-expansion coefficients per cluster, or None when the expansion
/// is too ill-conditioned to trust.
fn partial_fraction_plan(groups: &[(f64, usize)]) -> Option<Vec<Cluster>> {
    let log_num: f64 = groups
        .iter()
        .map(|&(mu, m)| m as f64 * mu.ln())
        .sum();

    let mut clusters = Vec::with_capacity(groups.len());
    let mut magnitude = 0.0f64;
    for (i, &(mu_i, m_i)) in groups.iter().enumerate() {
        // h_k = d^k/ds^k of prod_j mu_j^{m_j} * prod_{j != i} (s+mu_j)^{-m_j}
        // at s = -mu_i, via the log-derivative recursion.
        let mut log_h0 = log_num;
        let mut sign = 1.0;
        for (j, &(mu_j, m_j)) in groups.iter().enumerate() {
            if j == i {
                continue;
            }
            let gap = mu_j - mu_i;
            log_h0 -= m_j as f64 * gap.abs().ln();
            if gap < 0.0 && m_j % 2 == 1 {
                sign = -sign;
            }
        }
        let h0 = sign * log_h0.exp();
        if !h0.is_finite() {
            return None;
        }

        let mut h = vec![h0];
        if m_i > 1 {
            // psi_k = k-th derivative of log H at -mu_i
            let mut psi = vec![0.0; m_i - 1];
            for (k, p) in psi.iter_mut().enumerate() {
                let mut s = 0.0;
                for (j, &(mu_j, m_j)) in groups.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    s += m_j as f64 / (mu_j - mu_i).powi(k as i32 + 1);
                }
                let k_fact: f64 = (1..=k).map(|v| v as f64).product();
                *p = -s * k_fact * if k % 2 == 0 { 1.0 } else { -1.0 };
            }
            for k in 0..m_i - 1 {
                // h_{k+1} = sum_l C(k,l) h_l psi_{k-l}
                let mut next = 0.0;
                let mut binom = 1.0;
                for l in 0..=k {
                    if l > 0 {
                        binom = binom * (k - l + 1) as f64 / l as f64;
                    }
                    next += binom * h[l] * psi[k - l];
                }
                h.push(next);
            }
        }

        // B_{i,r} = h_{m_i-r}/(m_i-r)!; fold into survival coefficients
        // c_l = (1/l!) * sum_{r=l+1}^{m_i} B_{i,r} mu_i^{l-r}
        let mut b = vec![0.0; m_i + 1];
        let mut fact = 1.0;
        for r in (1..=m_i).rev() {
            let k = m_i - r;
            if k > 0 {
                fact *= k as f64;
            }
            b[r] = h[k] / fact;
        }
        let mut coefs = vec![0.0; m_i];
        let mut l_fact = 1.0;
        for (l, coef) in coefs.iter_mut().enumerate() {
            if l > 0 {
                l_fact *= l as f64;
            }
            let mut s = 0.0;
            for (r, br) in b.iter().enumerate().take(m_i + 1).skip(l + 1) {
                s += br * mu_i.powi(l as i32 - r as i32);
            }
            *coef = s / l_fact;
            // largest value the term c_l y^l e^{-mu y} can take over y >= 0
            let peak = if l == 0 {
                1.0
            } else {
                (l as f64 / (std::f64::consts::E * mu_i)).powi(l as i32)
            };
            magnitude += coef.abs() * peak;
        }
        clusters.push(Cluster { rate: mu_i, coefs });
    }

    if !magnitude.is_finite() || magnitude > COEF_LIMIT {
        None
    } else {
        Some(clusters)
    }
}

/// Survival via the phase-type representation: start in state 0 of a chain
/// whose i-th sojourn is Exp(rate_i); survival(y) is the probability the
/// chain has not absorbed by time y. Uniformized Taylor plus repeated
/// squaring keeps every intermediate non-negative.
fn survival_matrix_exp(rates: &[f64], y: f64) -> f64 {
    let n = rates.len();
    let lambda_max = rates.iter().cloned().fold(0.0, f64::max);
    let horizon = lambda_max * y;
    let squarings = if horizon <= 1.0 {
        0
    } else {
        horizon.log2().ceil() as u32
    };
    let tau = y / (2.0f64).powi(squarings as i32);

    // A = (Q + lambda_max I) tau, non-negative upper bidiagonal
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = (lambda_max - rates[i]) * tau;
        if i + 1 < n {
            a[i * n + i + 1] = rates[i] * tau;
        }
    }

    // T = sum A^k / k!, truncated; ||A|| <= 1 so 30 terms reach ~1e-32
    let mut term = vec![0.0; n * n];
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        term[i * n + i] = 1.0;
        t[i * n + i] = 1.0;
    }
    let mut scratch = vec![0.0; n * n];
    for k in 1..=30 {
        mat_mul(&term, &a, &mut scratch, n);
        let inv_k = 1.0 / k as f64;
        let mut norm = 0.0f64;
        for (dst, src) in term.iter_mut().zip(&scratch) {
            *dst = src * inv_k;
            norm = norm.max(dst.abs());
        }
        for (dst, src) in t.iter_mut().zip(&term) {
            *dst += src;
        }
        if norm < 1e-24 {
            break;
        }
    }

    let damp = (-lambda_max * tau).exp();
    for v in t.iter_mut() {
        *v *= damp;
    }
    let mut e = t;
    for _ in 0..squarings {
        mat_mul(&e, &e, &mut scratch, n);
        std::mem::swap(&mut e, &mut scratch);
    }

    // first row times the all-ones vector
    e[..n].iter().sum::<f64>().clamp(0.0, 1.0)
}

fn mat_mul(a: &[f64], b: &[f64], out: &mut [f64], n: usize) {
    out.fill(0.0);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (d, &bkj) in dst.iter_mut().zip(row) {
                *d += aik * bkj;
            }
        }
    }
}

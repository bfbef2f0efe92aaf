//! Ground-truth Monte-Carlo estimation of the secure connection probability.
//!
//! Each trial draws the per-hop legitimate fadings, one realization of the
//! eavesdropper field inside a square sampling window, and the eavesdropper
//! fadings for every hop. The trial is secure when the bottleneck legitimate
//! SNR exceeds the aggregate eavesdropper SNR of the requested mode. Trial t
//! owns an RNG stream derived from (seed, t) alone, so estimates are
//! bit-identical no matter how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{
    alpha_weight, dist_squared, EavesdropperMode, NetworkModel, Path, Point, ScpEstimate,
};

/// Square sampling window for the eavesdropper field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSpec {
    /// Half-width of a square centered on the origin (the network region).
    Fixed(f64),
    /// Grow a square around the path until the analytic bound on the
    /// far-eavesdropper contribution becomes negligible against the
    /// estimate (see [`auto_half_width`]).
    Auto,
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub window: WindowSpec,
    pub confidence_level: f64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            window: WindowSpec::Auto,
            confidence_level: 0.95,
        }
    }

    pub fn with_window(mut self, window: WindowSpec) -> Self {
        self.window = window;
        self
    }

    pub fn with_confidence(mut self, level: f64) -> Self {
        self.confidence_level = level;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least one".into()));
        }
        if let WindowSpec::Fixed(w) = self.window {
            if w <= 0.0 || !w.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "window half-width must be finite and positive, got {w}"
                )));
            }
        }
        if self.confidence_level <= 0.0 || self.confidence_level >= 1.0 || self.confidence_level.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "confidence level must lie in (0,1), got {}",
                self.confidence_level
            )));
        }
        Ok(())
    }
}

/// One sampled eavesdropper point set.
#[derive(Debug, Clone)]
pub struct EavesdropperRealization {
    pub points: Vec<Point>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based per-trial stream: the key depends only on (seed, trial).
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut state = seed ^ trial.wrapping_mul(0xA076_1D64_78BD_642F);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

/// Draw one homogeneous PPP realization inside the square window.
pub fn sample_ppp(
    lambda_e: f64,
    center: Point,
    half_width: f64,
    rng: &mut ChaCha8Rng,
) -> EavesdropperRealization {
    let side = 2.0 * half_width;
    let mean = lambda_e * side * side;
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as usize
    } else {
        0
    };
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let x = center[0] + (2.0 * rng.random::<f64>() - 1.0) * half_width;
        let y = center[1] + (2.0 * rng.random::<f64>() - 1.0) * half_width;
        points.push([x, y]);
    }
    EavesdropperRealization { points }
}

struct TrialSetup {
    transmitters: Vec<(Point, f64)>,
    /// p_i / d_i^alpha per hop: bottleneck SNR is min over hops of coef * Exp(1).
    legit_coefs: Vec<f64>,
    alpha: f64,
    lambda_e: f64,
    center: Point,
    half_width: f64,
}

impl TrialSetup {
    fn build(model: &NetworkModel, path: &Path, cfg: &McConfig) -> Result<Self> {
        let rate_terms = model.hop_rate_terms(path)?;
        let legit_coefs = rate_terms.iter().map(|t| 1.0 / t).collect();
        let (center, half_width) = match cfg.window {
            WindowSpec::Fixed(w) => ([0.0, 0.0], w),
            WindowSpec::Auto => {
                let c = path_center(model, path);
                (c, auto_half_width(model, path)?)
            }
        };
        Ok(TrialSetup {
            transmitters: model.transmitters(path),
            legit_coefs,
            alpha: model.alpha(),
            lambda_e: model.lambda_e(),
            center,
            half_width,
        })
    }

    /// Secure flags for (colluding, non-colluding) on shared draws.
    fn run(&self, seed: u64, trial: u64) -> Result<(bool, bool)> {
        let mut rng = trial_rng(seed, trial);
        let mut bottleneck = f64::INFINITY;
        for &c in &self.legit_coefs {
            bottleneck = bottleneck.min(c * exp1(&mut rng));
        }

        let mut field = sample_ppp(self.lambda_e, self.center, self.half_width, &mut rng);
        for p in field.points.iter_mut() {
            let mut resamples = 0u32;
            while self
                .transmitters
                .iter()
                .any(|(t, _)| dist_squared(*t, *p) == 0.0)
            {
                resamples += 1;
                if resamples > 100 {
                    return Err(Error::DegenerateWindow { resamples });
                }
                p[0] = self.center[0] + (2.0 * rng.random::<f64>() - 1.0) * self.half_width;
                p[1] = self.center[1] + (2.0 * rng.random::<f64>() - 1.0) * self.half_width;
            }
        }

        let mut pooled = 0.0f64;
        let mut strongest = 0.0f64;
        for p in &field.points {
            let mut mrc = 0.0;
            for (t, power) in &self.transmitters {
                let d_alpha = alpha_weight(dist_squared(*p, *t), self.alpha);
                mrc += power * exp1(&mut rng) / d_alpha;
            }
            pooled += mrc;
            strongest = strongest.max(mrc);
        }
        Ok((bottleneck > pooled, bottleneck > strongest))
    }
}

fn path_center(model: &NetworkModel, path: &Path) -> Point {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &i in path.nodes() {
        let p = model.node(i);
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]
}

/// Smallest half-width (power of two growth) whose truncation shifts the
/// estimate by less than 1e-5 relative. Beyond the window every hop's
/// eavesdropping term is bounded by p_k S / d^alpha, whose integral over
/// the exterior decays as R^(2-alpha); the threshold keeps the truncation
/// bias an order of magnitude below the sampling noise of a 1e5-trial run
/// even where the SCP sits near one.
pub fn auto_half_width(model: &NetworkModel, path: &Path) -> Result<f64> {
    let center = path_center(model, path);
    let tx = model.transmitters(path);
    let r_max = tx
        .iter()
        .map(|(p, _)| dist_squared(*p, center).sqrt())
        .fold(0.0, f64::max);
    let hops = model.hop_distances(path)?;
    let longest_hop = hops.iter().cloned().fold(0.0, f64::max);
    let mut w = r_max + longest_hop.max(1.0);

    let lambda = model.lambda_e();
    if lambda == 0.0 {
        return Ok(w);
    }
    let alpha = model.alpha();
    let s: f64 = model.hop_rate_terms(path)?.iter().sum();
    let sum_p: f64 = tx.iter().map(|(_, p)| p).sum();
    let max_ps = tx.iter().map(|(_, p)| p * s).fold(0.0, f64::max);
    let min_r0 = max_ps.powf(1.0 / alpha);

    loop {
        let r0 = w - r_max;
        if r0 >= min_r0 {
            let tail =
                lambda * sum_p * s * 2.0 * std::f64::consts::PI * r0.powf(2.0 - alpha)
                    / (alpha - 2.0);
            if tail <= 1e-5 {
                return Ok(w);
            }
        }
        w *= 2.0;
        if !w.is_finite() {
            return Err(Error::InvalidConfig(
                "auto window failed to converge".into(),
            ));
        }
    }
}

/// Per-trial secure flags for the requested mode; index t is trial t.
pub fn simulate_trials(
    model: &NetworkModel,
    path: &Path,
    mode: EavesdropperMode,
    cfg: &McConfig,
) -> Result<Vec<bool>> {
    cfg.validate()?;
    let setup = TrialSetup::build(model, path, cfg)?;
    let flags: Result<Vec<(bool, bool)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| setup.run(cfg.seed, t))
        .collect();
    let flags = flags?;
    Ok(flags
        .into_iter()
        .map(|(c, n)| match mode {
            EavesdropperMode::Colluding => c,
            EavesdropperMode::NonColluding => n,
        })
        .collect())
}

/// Monte-Carlo estimate of the secure connection probability.
pub fn simulate_scp(
    model: &NetworkModel,
    path: &Path,
    mode: EavesdropperMode,
    cfg: &McConfig,
) -> Result<ScpEstimate> {
    cfg.validate()?;
    let setup = TrialSetup::build(model, path, cfg)?;
    let count: Result<u64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            setup.run(cfg.seed, t).map(|(c, n)| {
                let secure = match mode {
                    EavesdropperMode::Colluding => c,
                    EavesdropperMode::NonColluding => n,
                };
                secure as u64
            })
        })
        .sum();
    let count = count?;
    let n = cfg.trials as f64;
    let p = count as f64 / n;
    let z = Normal::standard().inverse_cdf(0.5 + 0.5 * cfg.confidence_level);
    let ci = z * (p * (1.0 - p) / n).sqrt();
    Ok(ScpEstimate::monte_carlo(p, ci, cfg.trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_hop_model(lambda_e: f64) -> (NetworkModel, Path) {
        let m =
            NetworkModel::with_uniform_power(vec![[0.0, 0.0], [10.0, 0.0]], 1.0, 4.0, lambda_e)
                .unwrap();
        (m, Path::new(vec![0, 1]).unwrap())
    }

    #[test]
    fn no_eavesdroppers_means_certainty() {
        let (m, p) = single_hop_model(0.0);
        for mode in [EavesdropperMode::Colluding, EavesdropperMode::NonColluding] {
            let est = simulate_scp(&m, &p, mode, &McConfig::new(500, 1)).unwrap();
            assert_eq!(est.value, 1.0);
        }
    }

    #[test]
    fn ppp_sample_counts() {
        // lambda 1e-4 over a 2000x2000 window: mean count 400
        let mut rng = trial_rng(11, 0);
        let mut total = 0usize;
        let draws = 400;
        for _ in 0..draws {
            total += sample_ppp(1e-4, [0.0, 0.0], 1000.0, &mut rng).points.len();
        }
        let mean = total as f64 / draws as f64;
        assert!((mean - 400.0).abs() < 3.0 * 20.0 / (draws as f64).sqrt() * 3.0);

        assert!(sample_ppp(0.0, [0.0, 0.0], 1000.0, &mut rng).points.is_empty());
    }

    #[test]
    fn single_hop_matches_closed_form() {
        let (m, p) = single_hop_model(1e-4);
        let cfg = McConfig::new(100_000, 20260314);
        let est = simulate_scp(&m, &p, EavesdropperMode::Colluding, &cfg).unwrap();
        let exact = (-(std::f64::consts::PI.powi(2) / 2.0) * 1e-4 * 100.0).exp();
        let sigma = est.ci_halfwidth.unwrap() / 1.959963984540054;
        assert!(
            (est.value - exact).abs() <= 3.0 * sigma,
            "mc {} vs exact {exact} (3 sigma {})",
            est.value,
            3.0 * sigma
        );
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let (m, p) = single_hop_model(3e-5);
        let cfg = McConfig::new(20_000, 7);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| simulate_scp(&m, &p, EavesdropperMode::Colluding, &cfg).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(
            a.ci_halfwidth.unwrap().to_bits(),
            b.ci_halfwidth.unwrap().to_bits()
        );
    }

    #[test]
    fn colluding_dominates_per_trial() {
        let m = NetworkModel::with_uniform_power(
            vec![[-10.0, 0.0], [0.0, 0.0], [10.0, 0.0]],
            1.0,
            4.0,
            1e-4,
        )
        .unwrap();
        let p = Path::new(vec![0, 1, 2]).unwrap();
        let cfg = McConfig::new(5_000, 99);
        let c = simulate_trials(&m, &p, EavesdropperMode::Colluding, &cfg).unwrap();
        let n = simulate_trials(&m, &p, EavesdropperMode::NonColluding, &cfg).unwrap();
        for t in 0..c.len() {
            // secure against pooled eavesdroppers implies secure against the strongest
            assert!(!c[t] || n[t], "trial {t} violates domination");
        }
    }

    #[test]
    fn nested_thinning_is_monotone_in_density() {
        // shared draws: thin one lambda_max field down the ladder; the
        // pooled eavesdropper SNR can only shrink, so security is nested
        let m = NetworkModel::with_uniform_power(
            vec![[-10.0, 0.0], [0.0, 0.0], [10.0, 0.0]],
            1.0,
            4.0,
            0.0,
        )
        .unwrap();
        let p = Path::new(vec![0, 1, 2]).unwrap();
        let lambdas = [1e-5, 3e-5, 1e-4];
        let lambda_max = 1e-4;
        let half_width = 200.0;
        let setup_tx = m.transmitters(&p);
        let coefs: Vec<f64> = m
            .hop_rate_terms(&p)
            .unwrap()
            .iter()
            .map(|t| 1.0 / t)
            .collect();

        let trials = 4_000;
        let mut secure = vec![0u64; lambdas.len()];
        for t in 0..trials {
            let mut rng = trial_rng(5, t);
            let mut bottleneck = f64::INFINITY;
            for &c in &coefs {
                bottleneck = bottleneck.min(c * exp1(&mut rng));
            }
            let field = sample_ppp(lambda_max, [0.0, 0.0], half_width, &mut rng);
            let marks: Vec<f64> = field.points.iter().map(|_| rng.random::<f64>()).collect();
            let mrc: Vec<f64> = field
                .points
                .iter()
                .map(|pt| {
                    setup_tx
                        .iter()
                        .map(|(tx, pw)| {
                            pw * exp1(&mut rng) / alpha_weight(dist_squared(*pt, *tx), 4.0)
                        })
                        .sum()
                })
                .collect();
            for (li, &lambda) in lambdas.iter().enumerate() {
                let keep = lambda / lambda_max;
                let pooled: f64 = marks
                    .iter()
                    .zip(&mrc)
                    .filter(|(u, _)| **u <= keep)
                    .map(|(_, v)| v)
                    .sum();
                if bottleneck > pooled {
                    secure[li] += 1;
                }
            }
        }
        assert!(secure[0] >= secure[1] && secure[1] >= secure[2]);
    }

    #[test]
    fn window_doubling_stays_within_ci() {
        // the two runs share no eavesdropper draws, so compare against the
        // joint confidence width; the truncation bias itself is held below
        // 1e-3 of the estimate by the auto-window construction
        let (m, p) = single_hop_model(1e-4);
        let w = auto_half_width(&m, &p).unwrap();
        let a = simulate_scp(
            &m,
            &p,
            EavesdropperMode::Colluding,
            &McConfig::new(50_000, 3).with_window(WindowSpec::Fixed(w)),
        )
        .unwrap();
        let b = simulate_scp(
            &m,
            &p,
            EavesdropperMode::Colluding,
            &McConfig::new(50_000, 3).with_window(WindowSpec::Fixed(2.0 * w)),
        )
        .unwrap();
        let ca = a.ci_halfwidth.unwrap();
        let cb = b.ci_halfwidth.unwrap();
        let joint = (ca * ca + cb * cb).sqrt();
        assert!(
            (a.value - b.value).abs() <= joint + 1e-3 * a.value,
            "{} vs {} (joint ci {joint})",
            a.value,
            b.value
        );
    }

    #[test]
    fn ci_is_present_only_for_mc() {
        let (m, p) = single_hop_model(1e-5);
        let est = simulate_scp(&m, &p, EavesdropperMode::Colluding, &McConfig::new(100, 0)).unwrap();
        assert!(est.ci_halfwidth.is_some());
        assert_eq!(est.trials, Some(100));
    }
}

//! Line-oriented scenario files: `key = value`, one `node = x, y[, power]`
//! entry per node, `#` comments. Unknown keys are rejected with their line
//! number.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secroute::mc::WindowSpec;
use secroute::{NetworkModel, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSel {
    Colluding,
    NonColluding,
    Both,
}

impl ModeSel {
    pub fn list(self) -> Vec<secroute::EavesdropperMode> {
        use secroute::EavesdropperMode::*;
        match self {
            ModeSel::Colluding => vec![Colluding],
            ModeSel::NonColluding => vec![NonColluding],
            ModeSel::Both => vec![Colluding, NonColluding],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSel {
    Mc,
    Exact,
    Approx,
    All,
}

impl MethodSel {
    pub fn includes(self, m: MethodSel) -> bool {
        self == MethodSel::All || self == m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkSel {
    Metric,
    ExactScp,
    None,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub alpha: f64,
    pub lambda_sweep: Vec<f64>,
    pub default_power: f64,
    pub nodes: Vec<(f64, f64, Option<f64>)>,
    pub random_nodes: Option<usize>,
    pub square_side: f64,
    pub path: Option<Vec<usize>>,
    pub src: Option<usize>,
    pub dst: Option<usize>,
    pub mode: ModeSel,
    pub method: MethodSel,
    pub trials: u64,
    pub seed: u64,
    pub window: WindowSpec,
    pub confidence: f64,
    pub benchmark: BenchmarkSel,
    pub node_counts: Vec<usize>,
    pub placements: usize,
    pub metric_benchmark_cap: usize,
    pub exact_benchmark_cap: usize,
    pub connectivity_radius: Option<f64>,
    pub quad_rel_tol: f64,
    pub fading_order: usize,
}

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line: Some(line),
        message: message.into(),
    })
}

fn global<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line: None,
        message: message.into(),
    })
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError {
            line: Some(line),
            message: format!("cannot parse `{v}` for key `{key}`"),
        })
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(|piece| parse_num(line, key, piece))
        .collect()
}

/// Parse and validate a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut alpha = None;
    let mut lambda_sweep: Option<Vec<f64>> = None;
    let mut default_power = 1.0f64;
    let mut nodes = Vec::new();
    let mut random_nodes = None;
    let mut square_side = 50.0f64;
    let mut path = None;
    let mut src = None;
    let mut dst = None;
    let mut mode = ModeSel::Both;
    let mut method = MethodSel::All;
    let mut trials = 10_000u64;
    let mut seed = 0u64;
    let mut window = WindowSpec::Auto;
    let mut confidence = 0.95f64;
    let mut benchmark = BenchmarkSel::Metric;
    let mut node_counts = Vec::new();
    let mut placements = 1000usize;
    let mut metric_benchmark_cap = secroute::routing::DEFAULT_EXHAUSTIVE_GUARD;
    let mut exact_benchmark_cap = secroute::routing::DEFAULT_EXACT_SCP_GUARD;
    let mut connectivity_radius = None;
    let mut quad_rel_tol = 1e-6f64;
    let mut fading_order = 64usize;

    let mut seen = std::collections::HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let n = idx + 1;
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(n, format!("expected `key = value`, got `{line}`"));
        };
        let key = key.trim();
        let value = value.trim();
        if key != "node" && !seen.insert(key.to_string()) {
            return err(n, format!("duplicate key `{key}`"));
        }
        match key {
            "alpha" => {
                let a: f64 = parse_num(n, key, value)?;
                if a <= 2.0 || a.is_nan() {
                    return err(n, format!("alpha must be > 2, got {a}"));
                }
                alpha = Some(a);
            }
            "lambda_e" => {
                let sweep: Vec<f64> = parse_list(n, key, value)?;
                for &l in &sweep {
                    if l < 0.0 || !l.is_finite() {
                        return err(n, format!("lambda_e entries must be >= 0, got {l}"));
                    }
                }
                if sweep.is_empty() {
                    return err(n, "lambda_e needs at least one value");
                }
                lambda_sweep = Some(sweep);
            }
            "power" => {
                default_power = parse_num(n, key, value)?;
                if default_power <= 0.0 || default_power.is_nan() {
                    return err(n, "power must be positive");
                }
            }
            "node" => {
                let parts: Vec<f64> = parse_list(n, key, value)?;
                match parts.len() {
                    2 => nodes.push((parts[0], parts[1], None)),
                    3 => {
                        if parts[2] <= 0.0 || parts[2].is_nan() {
                            return err(n, "per-node power must be positive");
                        }
                        nodes.push((parts[0], parts[1], Some(parts[2])));
                    }
                    k => return err(n, format!("node takes 2 or 3 values, got {k}")),
                }
            }
            "random_nodes" => {
                let c: usize = parse_num(n, key, value)?;
                if c < 2 {
                    return err(n, "random_nodes must be at least 2");
                }
                random_nodes = Some(c);
            }
            "square_side" => {
                square_side = parse_num(n, key, value)?;
                if square_side <= 0.0 || square_side.is_nan() {
                    return err(n, "square_side must be positive");
                }
            }
            "path" => path = Some(parse_list(n, key, value)?),
            "src" => src = Some(parse_num(n, key, value)?),
            "dst" => dst = Some(parse_num(n, key, value)?),
            "mode" => {
                mode = match value {
                    "colluding" => ModeSel::Colluding,
                    "noncolluding" => ModeSel::NonColluding,
                    "both" => ModeSel::Both,
                    other => return err(n, format!("unknown mode `{other}`")),
                }
            }
            "method" => {
                method = match value {
                    "mc" => MethodSel::Mc,
                    "exact" => MethodSel::Exact,
                    "approx" => MethodSel::Approx,
                    "all" => MethodSel::All,
                    other => return err(n, format!("unknown method `{other}`")),
                }
            }
            "trials" => {
                trials = parse_num(n, key, value)?;
                if trials == 0 {
                    return err(n, "trials must be at least 1");
                }
            }
            "seed" => seed = parse_num(n, key, value)?,
            "window" => {
                window = if value == "auto" {
                    WindowSpec::Auto
                } else {
                    let w: f64 = parse_num(n, key, value)?;
                    if w <= 0.0 || w.is_nan() {
                        return err(n, "window half-width must be positive");
                    }
                    WindowSpec::Fixed(w)
                }
            }
            "confidence" => {
                confidence = parse_num(n, key, value)?;
                if confidence <= 0.0 || confidence >= 1.0 || confidence.is_nan() {
                    return err(n, "confidence must lie in (0,1)");
                }
            }
            "benchmark" => {
                benchmark = match value {
                    "metric" => BenchmarkSel::Metric,
                    "exact-scp" => BenchmarkSel::ExactScp,
                    "none" => BenchmarkSel::None,
                    other => return err(n, format!("unknown benchmark `{other}`")),
                }
            }
            "node_counts" => node_counts = parse_list(n, key, value)?,
            "placements" => {
                placements = parse_num(n, key, value)?;
                if placements == 0 {
                    return err(n, "placements must be at least 1");
                }
            }
            "metric_benchmark_cap" => metric_benchmark_cap = parse_num(n, key, value)?,
            "exact_benchmark_cap" => exact_benchmark_cap = parse_num(n, key, value)?,
            "connectivity_radius" => {
                let r: f64 = parse_num(n, key, value)?;
                if r <= 0.0 || r.is_nan() {
                    return err(n, "connectivity_radius must be positive");
                }
                connectivity_radius = Some(r);
            }
            "quad_rel_tol" => {
                quad_rel_tol = parse_num(n, key, value)?;
                if quad_rel_tol <= 0.0 || quad_rel_tol.is_nan() {
                    return err(n, "quad_rel_tol must be positive");
                }
            }
            "fading_order" => {
                fading_order = parse_num(n, key, value)?;
                if fading_order == 0 {
                    return err(n, "fading_order must be at least 1");
                }
            }
            other => return err(n, format!("unknown key `{other}`")),
        }
    }

    let Some(alpha) = alpha else {
        return global("missing required key `alpha`");
    };
    let Some(lambda_sweep) = lambda_sweep else {
        return global("missing required key `lambda_e`");
    };
    if nodes.is_empty() && random_nodes.is_none() {
        return global("need `node = ...` entries or `random_nodes = ...`");
    }
    if !nodes.is_empty() && random_nodes.is_some() {
        return global("`node` entries and `random_nodes` are mutually exclusive");
    }
    if !nodes.is_empty() && nodes.len() < 2 {
        return global("need at least two nodes");
    }

    let cfg = ScenarioConfig {
        alpha,
        lambda_sweep,
        default_power,
        nodes,
        random_nodes,
        square_side,
        path,
        src,
        dst,
        mode,
        method,
        trials,
        seed,
        window,
        confidence,
        benchmark,
        node_counts,
        placements,
        metric_benchmark_cap,
        exact_benchmark_cap,
        connectivity_radius,
        quad_rel_tol,
        fading_order,
    };
    cfg.check_indices().map_err(|m| ConfigError {
        line: None,
        message: m,
    })?;
    Ok(cfg)
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl ScenarioConfig {
    pub fn node_count(&self) -> usize {
        self.random_nodes.unwrap_or(self.nodes.len())
    }

    fn check_indices(&self) -> Result<(), String> {
        let n = self.node_count();
        if let Some(p) = &self.path {
            if p.len() < 2 {
                return Err("path needs at least two nodes".into());
            }
            for &i in p {
                if i >= n {
                    return Err(format!("path index {i} out of range ({n} nodes)"));
                }
            }
        }
        for (name, v) in [("src", self.src), ("dst", self.dst)] {
            if let Some(i) = v {
                if i >= n {
                    return Err(format!("{name} index {i} out of range ({n} nodes)"));
                }
            }
        }
        for &c in &self.node_counts {
            if c < 2 {
                return Err(format!("node_counts entries must be >= 2, got {c}"));
            }
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.quad_rel_tol,
            fading_quadrature_order: self.fading_order,
            ..QuadratureConfig::default()
        }
    }

    pub fn src_index(&self) -> usize {
        self.src.unwrap_or(0)
    }

    pub fn dst_index(&self) -> usize {
        self.dst.unwrap_or(self.node_count() - 1)
    }

    /// Build the network at a given density. Random placements pin the
    /// source to the lower-left corner and the destination to the upper
    /// right; intermediates are uniform in the square, seeded by `seed`.
    pub fn build_model(&self, lambda_e: f64) -> Result<NetworkModel, secroute::Error> {
        if let Some(count) = self.random_nodes {
            let mut state = self.seed ^ 0x504C_4143_454D_454E; // placement stream
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix(&mut state));
            let model = placement(&mut rng, count, self.square_side, self.default_power, self.alpha, lambda_e)?;
            Ok(model)
        } else {
            let positions: Vec<[f64; 2]> = self.nodes.iter().map(|&(x, y, _)| [x, y]).collect();
            let powers: Vec<f64> = self
                .nodes
                .iter()
                .map(|&(_, _, p)| p.unwrap_or(self.default_power))
                .collect();
            NetworkModel::new(positions, powers, self.alpha, lambda_e)
        }
    }

    /// Seeded random placement for the routing study: one model per
    /// (node count, trial) pair.
    pub fn study_model(
        &self,
        node_count: usize,
        trial: u64,
        lambda_e: f64,
    ) -> Result<NetworkModel, secroute::Error> {
        let mut state = self.seed
            ^ (node_count as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ trial.wrapping_mul(0xA076_1D64_78BD_642F);
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(&mut state));
        placement(&mut rng, node_count, self.square_side, self.default_power, self.alpha, lambda_e)
    }
}

fn placement(
    rng: &mut ChaCha8Rng,
    count: usize,
    side: f64,
    power: f64,
    alpha: f64,
    lambda_e: f64,
) -> Result<NetworkModel, secroute::Error> {
    let mut positions = Vec::with_capacity(count);
    positions.push([0.0, 0.0]);
    for _ in 0..count.saturating_sub(2) {
        positions.push([rng.random_range(0.0..side), rng.random_range(0.0..side)]);
    }
    positions.push([side, side]);
    NetworkModel::with_uniform_power(positions, power, alpha, lambda_e)
}

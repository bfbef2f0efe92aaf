//! Route selection report: the proposed route per mode, optional benchmark
//! routes, and the exact SCP of each at every density in the sweep.

use std::collections::HashMap;

use secroute::exact::{colluding_exposure, noncolluding_exposure, FadingExposure};
use secroute::routing::{
    best_route_by_exact_scp, best_route_by_exact_scp_noncolluding, colluding_metric,
    exhaustive_route, noncolluding_metric, route, route_on_graph, WeightedGraph,
};
use secroute::{EavesdropperMode, NetworkModel, Path, QuadratureConfig};

use crate::config::{BenchmarkSel, ScenarioConfig};
use crate::report::CsvReport;

/// Plain enumeration over the exact non-colluding engine is expensive;
/// keep its guard below the colluding one regardless of the config.
const NC_EXACT_BENCHMARK_CAP: usize = 7;

struct ScpCache<'a> {
    model: &'a NetworkModel,
    quad: &'a QuadratureConfig,
    colluding: HashMap<Vec<usize>, f64>,
    noncolluding: HashMap<Vec<usize>, FadingExposure>,
}

impl<'a> ScpCache<'a> {
    fn new(model: &'a NetworkModel, quad: &'a QuadratureConfig) -> Self {
        ScpCache {
            model,
            quad,
            colluding: HashMap::new(),
            noncolluding: HashMap::new(),
        }
    }

    fn scp(&mut self, path: &Path, mode: EavesdropperMode, lambda: f64) -> Result<f64, String> {
        let key = path.nodes().to_vec();
        match mode {
            EavesdropperMode::Colluding => {
                if !self.colluding.contains_key(&key) {
                    let e = colluding_exposure(self.model, path, self.quad)
                        .map_err(|e| e.to_string())?;
                    self.colluding.insert(key.clone(), e);
                }
                Ok((-lambda * self.colluding[&key]).exp())
            }
            EavesdropperMode::NonColluding => {
                if !self.noncolluding.contains_key(&key) {
                    let p = noncolluding_exposure(self.model, path, self.quad)
                        .map_err(|e| e.to_string())?;
                    self.noncolluding.insert(key.clone(), p);
                }
                Ok(self.noncolluding[&key].scp(lambda))
            }
        }
    }
}

pub fn run(cfg: &ScenarioConfig, config_hash: String, out: &Option<String>) -> Result<(), String> {
    let quad = cfg.quadrature();
    let mut sweep = cfg.lambda_sweep.clone();
    sweep.sort_by(f64::total_cmp);
    sweep.dedup();
    // the chosen route is density-invariant; pick any positive density
    let lambda_route = sweep.iter().cloned().find(|l| *l > 0.0).unwrap_or(1.0);

    let model = cfg.build_model(lambda_route).map_err(|e| e.to_string())?;
    let (src, dst) = (cfg.src_index(), cfg.dst_index());
    let alpha = model.alpha();
    let mut cache = ScpCache::new(&model, &quad);

    // (mode, algorithm, path) triples
    let mut found: Vec<(EavesdropperMode, &'static str, Path)> = Vec::new();
    for mode in cfg.mode.list() {
        let proposed = match cfg.connectivity_radius {
            Some(r) => {
                let g = WeightedGraph::from_model_with_radius(&model, r)
                    .map_err(|e| e.to_string())?;
                route_on_graph(&model, &g, src, dst, mode).map_err(|e| e.to_string())?
            }
            None => route(&model, src, dst, mode).map_err(|e| e.to_string())?,
        };
        found.push((mode, "proposed", proposed.path.clone()));

        match cfg.benchmark {
            BenchmarkSel::None => {}
            BenchmarkSel::Metric => {
                let best = exhaustive_route(
                    &model,
                    src,
                    dst,
                    |nodes, w| match mode {
                        EavesdropperMode::Colluding => {
                            colluding_metric(w, nodes.len() - 1, alpha, lambda_route).unwrap()
                        }
                        EavesdropperMode::NonColluding => {
                            noncolluding_metric(w, nodes.len() - 1, alpha)
                        }
                    },
                    cfg.metric_benchmark_cap,
                )
                .map_err(|e| e.to_string())?;
                found.push((mode, "benchmark-metric", best));
            }
            BenchmarkSel::ExactScp => {
                let best = match mode {
                    EavesdropperMode::Colluding => {
                        best_route_by_exact_scp(&model, src, dst, &quad, cfg.exact_benchmark_cap)
                            .map_err(|e| e.to_string())?
                            .0
                    }
                    EavesdropperMode::NonColluding => best_route_by_exact_scp_noncolluding(
                        &model,
                        src,
                        dst,
                        &quad,
                        cfg.exact_benchmark_cap.min(NC_EXACT_BENCHMARK_CAP),
                    )
                    .map_err(|e| e.to_string())?
                    .0,
                };
                found.push((mode, "benchmark-exact-scp", best));
            }
        }
    }

    let mut rows = Vec::new();
    for &lambda in &sweep {
        for (mode, algorithm, path) in &found {
            let hops = path.hops();
            let weight_sum: f64 = {
                let d = model.hop_distances(path).map_err(|e| e.to_string())?;
                d.iter().map(|x| x.powf(alpha)).sum()
            };
            let metric = match mode {
                EavesdropperMode::Colluding => {
                    colluding_metric(weight_sum, hops, alpha, lambda).map_err(|e| e.to_string())?
                }
                EavesdropperMode::NonColluding => noncolluding_metric(weight_sum, hops, alpha),
            };
            let scp = cache.scp(path, *mode, lambda)?;
            rows.push(format!(
                "{lambda},{mode},{algorithm},{path},{hops},{metric},{scp}"
            ));
        }
    }

    CsvReport {
        schema: "route-v1",
        command: "route",
        seed: cfg.seed,
        config_hash: Some(config_hash),
        header: "lambda_e,mode,algorithm,path,hops,metric,scp_exact",
        rows,
    }
    .write(out, "route")
    .map_err(|e| e.to_string())
}

//! Aggregate routing study: random placements per node count, proposed
//! route versus the exhaustive exact-SCP benchmark, colluding case.

use rayon::prelude::*;

use secroute::exact::colluding_exposure;
use secroute::routing::{best_route_by_exact_scp, route};
use secroute::EavesdropperMode;

use crate::config::ScenarioConfig;
use crate::report::CsvReport;

pub fn run(cfg: &ScenarioConfig, config_hash: String, out: &Option<String>) -> Result<(), String> {
    if cfg.node_counts.is_empty() {
        return Err("route-study needs `node_counts = ...` in the config".into());
    }
    let lambda = cfg.lambda_sweep[0];
    if lambda <= 0.0 {
        return Err("route-study needs a positive lambda_e".into());
    }
    let quad = cfg.quadrature();
    let mut counts = cfg.node_counts.clone();
    counts.sort_unstable();
    counts.dedup();

    let mut rows = Vec::new();
    for &n_l in &counts {
        if n_l > cfg.exact_benchmark_cap {
            return Err(format!(
                "node count {n_l} exceeds the exact benchmark cap {}",
                cfg.exact_benchmark_cap
            ));
        }
        let per_trial: Result<Vec<(f64, f64, bool)>, String> = (0..cfg.placements as u64)
            .into_par_iter()
            .map(|trial| {
                let model = cfg
                    .study_model(n_l, trial, lambda)
                    .map_err(|e| e.to_string())?;
                let (src, dst) = (0, n_l - 1);
                let proposed = route(&model, src, dst, EavesdropperMode::Colluding)
                    .map_err(|e| e.to_string())?;
                let (bench_path, bench_scp) =
                    best_route_by_exact_scp(&model, src, dst, &quad, cfg.exact_benchmark_cap)
                        .map_err(|e| e.to_string())?;
                let coincide = proposed.path.nodes() == bench_path.nodes();
                let proposed_scp = if coincide {
                    bench_scp
                } else {
                    let e = colluding_exposure(&model, &proposed.path, &quad)
                        .map_err(|e| e.to_string())?;
                    (-lambda * e).exp()
                };
                Ok((proposed_scp, bench_scp, coincide))
            })
            .collect();
        let per_trial = per_trial?;

        let n = per_trial.len() as f64;
        let mean_proposed: f64 = per_trial.iter().map(|t| t.0).sum::<f64>() / n;
        let mean_bench: f64 = per_trial.iter().map(|t| t.1).sum::<f64>() / n;
        let coincidence: f64 = per_trial.iter().filter(|t| t.2).count() as f64 / n;
        rows.push(format!(
            "{n_l},{lambda},{},{mean_proposed},{mean_bench},{coincidence}",
            cfg.placements
        ));
    }

    CsvReport {
        schema: "route-study-v1",
        command: "route-study",
        seed: cfg.seed,
        config_hash: Some(config_hash),
        header: "n_l,lambda_e,placements,mean_scp_proposed,mean_scp_benchmark,coincidence_rate",
        rows,
    }
    .write(out, "route-study")
    .map_err(|e| e.to_string())
}

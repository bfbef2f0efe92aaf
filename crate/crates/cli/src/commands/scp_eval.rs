//! Per-density SCP of one configured path, by every requested method.

use secroute::approx::{anchored_colluding_exposure, scp_approx_colluding, scp_approx_noncolluding};
use secroute::exact::{colluding_exposure, noncolluding_exposure};
use secroute::mc::{simulate_scp, McConfig};
use secroute::{EavesdropperMode, Path};

use crate::commands::fmt_opt;
use crate::config::{MethodSel, ScenarioConfig};
use crate::report::CsvReport;

pub fn run(cfg: &ScenarioConfig, config_hash: String, out: &Option<String>) -> Result<(), String> {
    let path_indices = cfg
        .path
        .clone()
        .ok_or("scp-eval needs `path = ...` in the config")?;
    let path = Path::new(path_indices).map_err(|e| e.to_string())?;
    let quad = cfg.quadrature();

    let mut sweep = cfg.lambda_sweep.clone();
    sweep.sort_by(f64::total_cmp);
    sweep.dedup();

    let base = cfg.build_model(sweep[0]).map_err(|e| e.to_string())?;
    let equal_powers = base.power_spread() <= 1e-12;

    // density-independent exposures, reused across the sweep
    let exposure_c = if cfg.method.includes(MethodSel::Exact) {
        Some(colluding_exposure(&base, &path, &quad).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let profile_n = if cfg.method.includes(MethodSel::Exact) {
        Some(noncolluding_exposure(&base, &path, &quad).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let approx_exposure_c = if cfg.method.includes(MethodSel::Approx) && !equal_powers {
        let anchor = base.node(path.nodes()[0]);
        Some(anchored_colluding_exposure(&base, &path, &quad, anchor).map_err(|e| e.to_string())?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for &lambda in &sweep {
        let model = cfg.build_model(lambda).map_err(|e| e.to_string())?;
        for mode in cfg.mode.list() {
            if cfg.method.includes(MethodSel::Mc) {
                let mc_cfg = McConfig {
                    trials: cfg.trials,
                    seed: cfg.seed,
                    window: cfg.window,
                    confidence_level: cfg.confidence,
                };
                let est = simulate_scp(&model, &path, mode, &mc_cfg).map_err(|e| e.to_string())?;
                rows.push(format!(
                    "{lambda},{mode},mc,{},{}",
                    est.value,
                    fmt_opt(est.ci_halfwidth)
                ));
            }
            if cfg.method.includes(MethodSel::Exact) {
                let value = match mode {
                    EavesdropperMode::Colluding => (-lambda * exposure_c.unwrap()).exp(),
                    EavesdropperMode::NonColluding => profile_n.as_ref().unwrap().scp(lambda),
                };
                rows.push(format!("{lambda},{mode},exact,{value},"));
            }
            if cfg.method.includes(MethodSel::Approx) {
                let value = match mode {
                    EavesdropperMode::Colluding => match approx_exposure_c {
                        Some(exposure) => (-lambda * exposure).exp(),
                        None => {
                            scp_approx_colluding(&model, &path, &quad)
                                .map_err(|e| e.to_string())?
                                .value
                        }
                    },
                    EavesdropperMode::NonColluding => {
                        scp_approx_noncolluding(&model, &path)
                            .map_err(|e| e.to_string())?
                            .value
                    }
                };
                rows.push(format!("{lambda},{mode},approx,{value},"));
            }
        }
    }

    CsvReport {
        schema: "scp-eval-v1",
        command: "scp-eval",
        seed: cfg.seed,
        config_hash: Some(config_hash),
        header: "lambda_e,mode,method,scp,ci_halfwidth",
        rows,
    }
    .write(out, "scp-eval")
    .map_err(|e| e.to_string())
}

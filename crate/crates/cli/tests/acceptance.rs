//! Acceptance suite: every release criterion at full scale, one line each.
//!
//! Run with:
//!   cargo test -p secroute-cli --test acceptance -- --nocapture

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secroute::approx::{k1, k2, lemma1_integrals, scp_approx_colluding, scp_approx_noncolluding};
use secroute::exact::{
    colluding_exposure, noncolluding_exposure, scp_exact_colluding, scp_exact_noncolluding,
};
use secroute::hypoexp::HypoExpRates;
use secroute::mc::{simulate_scp, simulate_trials, McConfig};
use secroute::routing::{colluding_metric, exhaustive_route, noncolluding_metric, route};
use secroute::{EavesdropperMode, NetworkModel, Path, QuadratureConfig};

const Z95: f64 = 1.959963984540054;
const LAMBDAS: [f64; 5] = [1e-6, 3e-6, 1e-5, 3e-5, 1e-4];

fn six_node_model(lambda_e: f64) -> NetworkModel {
    let c = std::f64::consts::FRAC_PI_4;
    let nodes = vec![
        [-10.0, 0.0],
        [5.0 * (3.0 * c).cos(), 5.0 * (3.0 * c).sin()],
        [0.0, 0.0],
        [5.0 * (-c).cos(), 5.0 * (-c).sin()],
        [10.0, 0.0],
        [15.0 * c.cos(), 15.0 * c.sin()],
    ];
    NetworkModel::with_uniform_power(nodes, 1.0, 4.0, lambda_e).unwrap()
}

fn study_paths() -> Vec<Path> {
    vec![
        Path::new(vec![0, 2]).unwrap(),
        Path::new(vec![0, 2, 4]).unwrap(),
        Path::new(vec![0, 1, 2, 4]).unwrap(),
        Path::new(vec![0, 1, 2, 3, 4]).unwrap(),
    ]
}

fn exp1(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

fn random_model(rng: &mut ChaCha8Rng, n: usize, lambda_e: f64) -> NetworkModel {
    let nodes: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)])
        .collect();
    NetworkModel::with_uniform_power(nodes, 1.0, 4.0, lambda_e).unwrap()
}

// 1. analytic engines sit inside the 3-sigma interval of 1e5-trial MC runs
// on the six-node network, one to four hops, across the density sweep
fn mc_exact_agreement() -> Result<String, String> {
    let quad = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for (pi, path) in study_paths().iter().enumerate() {
        let base = six_node_model(1e-6);
        let exposure = colluding_exposure(&base, path, &quad).map_err(|e| e.to_string())?;
        let profile = noncolluding_exposure(&base, path, &quad).map_err(|e| e.to_string())?;
        for (li, &lambda) in LAMBDAS.iter().enumerate() {
            let model = six_node_model(lambda);
            for (mi, mode) in [EavesdropperMode::Colluding, EavesdropperMode::NonColluding]
                .into_iter()
                .enumerate()
            {
                let exact = match mode {
                    EavesdropperMode::Colluding => (-lambda * exposure).exp(),
                    EavesdropperMode::NonColluding => profile.scp(lambda),
                };
                let seed = 0xACCE_0000 + (pi * 100 + li * 10 + mi) as u64;
                let cfg = McConfig::new(100_000, seed);
                let est =
                    simulate_scp(&model, path, mode, &cfg).map_err(|e| e.to_string())?;
                let sigma = est.ci_halfwidth.unwrap() / Z95;
                let pulls = (est.value - exact).abs() / sigma;
                worst = worst.max(pulls);
                if pulls > 3.0 {
                    return Err(format!(
                        "path {} hops, lambda {lambda}, {mode}: exact {exact} vs mc {} ({pulls:.2} sigma)",
                        path.hops(),
                        est.value
                    ));
                }
            }
        }
    }
    Ok(format!("40 cells, worst deviation {worst:.2} sigma"))
}

// 2. single-hop quadrature against the closed form exp(-(pi^2/2) lambda d^2)
fn single_hop_closed_form() -> Result<String, String> {
    let quad = QuadratureConfig::default();
    let lambda = 1e-4;
    let mut worst: f64 = 0.0;
    for d in [1.0, 5.0, 10.0, 20.0] {
        let m = NetworkModel::with_uniform_power(vec![[0.0, 0.0], [d, 0.0]], 1.0, 4.0, lambda)
            .unwrap();
        let p = Path::new(vec![0, 1]).unwrap();
        let got = scp_exact_colluding(&m, &p, &quad)
            .map_err(|e| e.to_string())?
            .value;
        let want = (-(std::f64::consts::PI.powi(2) / 2.0) * lambda * d * d).exp();
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        if rel > 1e-5 {
            return Err(format!("d={d}: {got} vs {want} (rel {rel:.2e})"));
        }
    }
    Ok(format!("4 distances, worst relative error {worst:.2e}"))
}

// 3. anchoring inequality on 200 random instances plus the two-term closed
// form (the printed closed forms carry a common factor pi)
fn lemma1_numeric() -> Result<String, String> {
    let cfg = QuadratureConfig {
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        ..QuadratureConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut min_gap = f64::INFINITY;
    for case in 0..200 {
        let n = 1 + case % 5;
        let anchors: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let scales: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
        let (f, g) = lemma1_integrals(&anchors, &scales, &cfg).map_err(|e| e.to_string())?;
        min_gap = min_gap.min(f - g);
        if f < g - 1e-8 * g.abs().max(1.0) {
            return Err(format!("case {case}: f {f} < g {g}"));
        }
    }
    let (f2, g2) =
        lemma1_integrals(&[0.0, 1.0], &[1.0, 1.0], &cfg).map_err(|e| e.to_string())?;
    let gap_over_pi = (f2 - g2) / std::f64::consts::PI;
    if (gap_over_pi - 0.1).abs() > 1e-6 {
        return Err(format!("two-term gap/pi {gap_over_pi} != 0.1"));
    }
    Ok(format!(
        "200 instances, min gap {min_gap:.3e}; two-term gap/pi {gap_over_pi:.9}"
    ))
}

// 4. the colluding approximation upper-bounds the exact value and both
// approximations track the exact curves within 0.05 absolute
fn upper_bound_and_accuracy() -> Result<String, String> {
    let quad = QuadratureConfig::default();
    let mut worst_c: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for path in &study_paths() {
        for &lambda in &LAMBDAS {
            let m = six_node_model(lambda);
            let ec = scp_exact_colluding(&m, path, &quad)
                .map_err(|e| e.to_string())?
                .value;
            let ac = scp_approx_colluding(&m, path, &quad)
                .map_err(|e| e.to_string())?
                .value;
            if ac < ec - 1e-8 {
                return Err(format!(
                    "upper bound violated at {} hops, lambda {lambda}: {ac} < {ec}",
                    path.hops()
                ));
            }
            worst_c = worst_c.max((ac - ec).abs());
            let en = scp_exact_noncolluding(&m, path, &quad)
                .map_err(|e| e.to_string())?
                .value;
            let an = scp_approx_noncolluding(&m, path)
                .map_err(|e| e.to_string())?
                .value;
            worst_n = worst_n.max((an - en).abs());
        }
    }
    if worst_c > 0.05 || worst_n > 0.05 {
        return Err(format!(
            "approximation gap too large: colluding {worst_c:.4}, non-colluding {worst_n:.4}"
        ));
    }
    Ok(format!(
        "gaps: colluding {worst_c:.4}, non-colluding {worst_n:.4}"
    ))
}

// 5. gamma-constant identities
fn gamma_identities() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        let a = k1(alpha, 0.73).map_err(|e| e.to_string())?;
        let b = k2(1, alpha, 0.73).map_err(|e| e.to_string())?;
        let rel = (a - b).abs() / a;
        worst = worst.max(rel);
        if rel > 1e-12 {
            return Err(format!("alpha {alpha}: k2(1) {b} vs k1 {a} (rel {rel:.2e})"));
        }
        let mut prev = 0.0;
        for n in 1..=30 {
            let v = k2(n, alpha, 0.73).map_err(|e| e.to_string())?;
            if v <= prev {
                return Err(format!("k2 not strictly increasing at alpha {alpha}, n {n}"));
            }
            prev = v;
        }
    }
    Ok(format!("worst k2(1)/k1 relative gap {worst:.2e}"))
}

// 6. hypoexponential distribution: reference value, confluent limit and a
// KS comparison against 1e6-sample Monte Carlo for 20 random rate vectors
fn hypoexp_cdf_checks() -> Result<String, String> {
    let h = HypoExpRates::new(&[1.0, 2.0]).map_err(|e| e.to_string())?;
    let got = h.cdf(1.0);
    if (got - 0.399576).abs() > 1e-6 {
        return Err(format!("cdf([1,2], 1) = {got}, want 0.399576"));
    }
    let h = HypoExpRates::new(&[1.0, 1.0 + 1e-12]).map_err(|e| e.to_string())?;
    let erlang = 1.0 - 2.0 * (-1.0f64).exp();
    if (h.cdf(1.0) - erlang).abs() > 1e-6 {
        return Err(format!("near-equal branch {} vs erlang {erlang}", h.cdf(1.0)));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut worst_ks: f64 = 0.0;
    for case in 0..20 {
        let n = 1 + case % 6;
        let mut rates: Vec<f64> = (0..n)
            .map(|_| 10f64.powf(rng.random_range(-1.0..1.0)))
            .collect();
        if case % 7 == 0 {
            let r = rates[0];
            rates.push(r * (1.0 + 1e-7));
        }
        let dist = HypoExpRates::new(&rates).map_err(|e| e.to_string())?;
        let mut samples: Vec<f64> = (0..1_000_000)
            .map(|_| rates.iter().map(|r| exp1(&mut rng) / r).sum())
            .collect();
        samples.sort_by(f64::total_cmp);
        let m = samples.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &y) in samples.iter().enumerate() {
            let f = dist.cdf(y);
            ks = ks.max((f - i as f64 / m).abs());
            ks = ks.max((f - (i as f64 + 1.0) / m).abs());
        }
        worst_ks = worst_ks.max(ks);
        if ks >= 0.01 {
            return Err(format!("case {case}: KS {ks} for rates {rates:?}"));
        }
    }
    Ok(format!("20 rate vectors, worst KS {worst_ks:.4}"))
}

// 7. the hop-bounded metric scan is exactly optimal on 100 random graphs
fn routing_optimality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7000);
    for case in 0..100 {
        let n = 4 + case % 7;
        let m = random_model(&mut rng, n, 1e-5);
        let (src, dst) = (0, n - 1);
        for mode in [EavesdropperMode::Colluding, EavesdropperMode::NonColluding] {
            let r = route(&m, src, dst, mode).map_err(|e| e.to_string())?;
            let mut best_metric = f64::INFINITY;
            exhaustive_route(
                &m,
                src,
                dst,
                |nodes, w| {
                    let v = match mode {
                        EavesdropperMode::Colluding => {
                            colluding_metric(w, nodes.len() - 1, 4.0, 1e-5).unwrap()
                        }
                        EavesdropperMode::NonColluding => {
                            noncolluding_metric(w, nodes.len() - 1, 4.0)
                        }
                    };
                    if v < best_metric {
                        best_metric = v;
                    }
                    v
                },
                12,
            )
            .map_err(|e| e.to_string())?;
            if r.metric_value != best_metric {
                return Err(format!(
                    "case {case} ({n} nodes, {mode}): scan {} vs exhaustive {best_metric}",
                    r.metric_value
                ));
            }
        }
    }
    Ok("100 graphs, both modes, metric equality exact".into())
}

// 8. the chosen route does not depend on the eavesdropper density
fn density_invariance() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8000);
    for case in 0..50 {
        let n = 4 + case % 7;
        let m = random_model(&mut rng, n, 1e-5);
        let (src, dst) = (0, n - 1);
        for mode in [EavesdropperMode::Colluding, EavesdropperMode::NonColluding] {
            let reference = route(&m, src, dst, mode).map_err(|e| e.to_string())?;
            for lambda in [1e-8, 1e-5, 1e-2] {
                let m2 = m.with_lambda_e(lambda).map_err(|e| e.to_string())?;
                let r = route(&m2, src, dst, mode).map_err(|e| e.to_string())?;
                if r.path.nodes() != reference.path.nodes() {
                    return Err(format!(
                        "case {case} ({mode}): path changed at lambda {lambda}"
                    ));
                }
            }
        }
    }
    Ok("50 instances, both modes, identical paths".into())
}

// 9. aggregate routing study bands, driven through the CLI
fn study_bands() -> Result<String, String> {
    let dir = std::env::temp_dir();
    let cfg_path = dir.join(format!("secroute-acceptance-{}.conf", std::process::id()));
    let out_prefix = dir.join(format!("secroute-acceptance-{}", std::process::id()));
    std::fs::write(
        &cfg_path,
        "alpha = 4\nlambda_e = 1e-5\nrandom_nodes = 2\nsquare_side = 50\n\
         node_counts = 4, 6, 8\nplacements = 200\nseed = 515\n",
    )
    .map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_secroute"))
        .args([
            "route-study",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out_prefix.to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "route-study failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let csv = std::fs::read_to_string(format!("{}-route-study.csv", out_prefix.display()))
        .map_err(|e| e.to_string())?;
    let reference = [(4usize, 0.8364f64), (6, 0.8635), (8, 0.8794)];
    let mut details = Vec::new();
    let mut means = Vec::new();
    for line in csv.lines() {
        if line.starts_with('#') || line.starts_with("n_l") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let n_l: usize = f[0].parse().unwrap();
        let mean_proposed: f64 = f[3].parse().unwrap();
        let mean_bench: f64 = f[4].parse().unwrap();
        let coincidence: f64 = f[5].parse().unwrap();
        let want = reference.iter().find(|r| r.0 == n_l).unwrap().1;
        if (mean_proposed - want).abs() > 0.02 {
            return Err(format!(
                "n_l {n_l}: mean proposed {mean_proposed} vs reference {want}"
            ));
        }
        let gap = mean_bench - mean_proposed;
        if !(0.0..=0.001).contains(&gap) {
            return Err(format!("n_l {n_l}: benchmark gap {gap}"));
        }
        if coincidence < 0.75 {
            return Err(format!("n_l {n_l}: coincidence {coincidence}"));
        }
        details.push(format!(
            "n{n_l}: {mean_proposed:.4} (ref {want}), gap {gap:.5}, coincide {coincidence:.2}"
        ));
        means.push(mean_proposed);
    }
    if details.len() != 3 {
        return Err("expected three study rows".into());
    }
    if !(means[0] <= means[1] && means[1] <= means[2]) {
        return Err(format!("mean SCP not nondecreasing in node count: {means:?}"));
    }
    Ok(details.join("; "))
}

// 10. colluding security never exceeds non-colluding security: analytically
// on the study paths, and per-trial on shared Monte-Carlo draws
fn domination() -> Result<String, String> {
    let quad = QuadratureConfig::default();
    for path in &study_paths() {
        for &lambda in &LAMBDAS {
            let m = six_node_model(lambda);
            let c = scp_exact_colluding(&m, path, &quad)
                .map_err(|e| e.to_string())?
                .value;
            let n = scp_exact_noncolluding(&m, path, &quad)
                .map_err(|e| e.to_string())?
                .value;
            if c > n + 1e-8 {
                return Err(format!(
                    "analytic domination violated at {} hops, lambda {lambda}: {c} > {n}",
                    path.hops()
                ));
            }
        }
    }
    for (k, lambda) in [(1usize, 1e-4), (3, 1e-5)] {
        let m = six_node_model(lambda);
        let path = &study_paths()[k];
        let cfg = McConfig::new(20_000, 0xD0C5 + k as u64);
        let c = simulate_trials(&m, path, EavesdropperMode::Colluding, &cfg)
            .map_err(|e| e.to_string())?;
        let n = simulate_trials(&m, path, EavesdropperMode::NonColluding, &cfg)
            .map_err(|e| e.to_string())?;
        for t in 0..c.len() {
            if c[t] && !n[t] {
                return Err(format!("per-trial domination violated at trial {t}"));
            }
        }
    }
    Ok("analytic sweep and 40k shared-draw trials".into())
}

// 11. identical (config, seed) pairs produce byte-identical CSV files
fn csv_determinism() -> Result<String, String> {
    let dir = std::env::temp_dir();
    let cfg_path = dir.join(format!("secroute-det-{}.conf", std::process::id()));
    std::fs::write(
        &cfg_path,
        "alpha = 4\nlambda_e = 1e-5, 1e-4\nnode = -10,0\nnode = 0,0\nnode = 10,0\n\
         path = 0, 1, 2\ntrials = 5000\nseed = 99\n",
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let prefix = dir.join(format!("secroute-det-{}-{run}", std::process::id()));
        let out = Command::new(env!("CARGO_BIN_EXE_secroute"))
            .args([
                "scp-eval",
                "--config",
                cfg_path.to_str().unwrap(),
                "--out",
                prefix.to_str().unwrap(),
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        outputs.push(
            std::fs::read(format!("{}-scp-eval.csv", prefix.display()))
                .map_err(|e| e.to_string())?,
        );
    }
    if outputs[0] != outputs[1] {
        return Err("scp-eval runs differ".into());
    }
    Ok(format!("{} identical bytes", outputs[0].len()))
}

type Criterion = (&'static str, fn() -> Result<String, String>);

#[test]
fn acceptance() {
    let criteria: &[Criterion] = &[
        ("mc-exact-agreement", mc_exact_agreement),
        ("single-hop-closed-form", single_hop_closed_form),
        ("lemma1-numeric", lemma1_numeric),
        ("upper-bound-accuracy", upper_bound_and_accuracy),
        ("gamma-identities", gamma_identities),
        ("hypoexp-cdf", hypoexp_cdf_checks),
        ("routing-optimality", routing_optimality),
        ("density-invariance", density_invariance),
        ("study-bands", study_bands),
        ("domination", domination),
        ("csv-determinism", csv_determinism),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(run)
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:2} {name:<24} PASS  [{secs:7.1}s]  {detail}", i + 1),
            Err(msg) => {
                println!("criterion {:2} {name:<24} FAIL  [{secs:7.1}s]  {msg}", i + 1);
                failures.push(format!("{} ({name}): {msg}", i + 1));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "{} acceptance criteria failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

//! Fast numeric smoke checks, one line per check.

use secroute::approx::{k1, k2, lemma1_integrals, scp_approx_colluding, scp_approx_noncolluding};
use secroute::exact::scp_exact_colluding;
use secroute::hypoexp::HypoExpRates;
use secroute::mc::{simulate_scp, McConfig};
use secroute::quad::integrate_r2;
use secroute::routing::route;
use secroute::{EavesdropperMode, NetworkModel, Path, QuadratureConfig};

type Check = (&'static str, fn() -> Result<(), String>);

fn near(got: f64, want: f64, tol: f64, what: &str) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, want {want}"))
    }
}

fn plane_quadrature() -> Result<(), String> {
    let v = integrate_r2(
        |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            1.0 / (1.0 + r2 * r2)
        },
        [0.0, 0.0],
        &[[1.0, 0.0]],
        &QuadratureConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    near(v, std::f64::consts::PI.powi(2) / 2.0, 1e-7, "quartic plane integral")
}

fn gamma_constants() -> Result<(), String> {
    let a = k1(4.0, 1.0).map_err(|e| e.to_string())?;
    near(a, std::f64::consts::PI.powi(2) / 2.0, 1e-10, "k1(4,1)")?;
    let b = k2(1, 4.0, 1.0).map_err(|e| e.to_string())?;
    near(b, a, 1e-10, "k2(1)=k1")?;
    if k2(3, 4.0, 1.0).unwrap() <= k2(2, 4.0, 1.0).unwrap() {
        return Err("k2 not increasing".into());
    }
    Ok(())
}

fn hypoexp_cdf() -> Result<(), String> {
    let h = HypoExpRates::new(&[1.0, 2.0]).map_err(|e| e.to_string())?;
    let want = 1.0 - 2.0 * (-1.0f64).exp() + (-2.0f64).exp();
    near(h.cdf(1.0), want, 1e-9, "hypoexp [1,2] at 1")?;
    let h = HypoExpRates::new(&[1.0, 1.0 + 1e-12]).map_err(|e| e.to_string())?;
    near(h.cdf(1.0), 1.0 - 2.0 * (-1.0f64).exp(), 1e-6, "erlang limit")
}

fn single_hop_models() -> (NetworkModel, Path) {
    let m = NetworkModel::with_uniform_power(vec![[0.0, 0.0], [10.0, 0.0]], 1.0, 4.0, 1e-4)
        .unwrap();
    (m, Path::new(vec![0, 1]).unwrap())
}

fn exact_single_hop() -> Result<(), String> {
    let (m, p) = single_hop_models();
    let got = scp_exact_colluding(&m, &p, &QuadratureConfig::default())
        .map_err(|e| e.to_string())?
        .value;
    let want = (-(std::f64::consts::PI.powi(2) / 2.0) * 1e-4 * 100.0).exp();
    near(got, want, 1e-6, "single-hop closed form")
}

fn approximations_agree_at_one_hop() -> Result<(), String> {
    let (m, p) = single_hop_models();
    let quad = QuadratureConfig::default();
    let c = scp_approx_colluding(&m, &p, &quad).map_err(|e| e.to_string())?.value;
    let n = scp_approx_noncolluding(&m, &p).map_err(|e| e.to_string())?.value;
    near(c, n, 1e-12, "one-hop approximations")
}

fn monte_carlo_band() -> Result<(), String> {
    let (m, p) = single_hop_models();
    let est = simulate_scp(&m, &p, EavesdropperMode::Colluding, &McConfig::new(20_000, 11))
        .map_err(|e| e.to_string())?;
    let want = (-(std::f64::consts::PI.powi(2) / 2.0) * 1e-4 * 100.0).exp();
    let sigma = est.ci_halfwidth.unwrap() / 1.959963984540054;
    near(est.value, want, 4.0 * sigma, "mc single hop")
}

fn routing_collinear() -> Result<(), String> {
    let m = NetworkModel::with_uniform_power(
        vec![[0.0, 0.0], [5.0, 0.0], [10.0, 0.0]],
        1.0,
        4.0,
        1e-5,
    )
    .unwrap();
    for mode in [EavesdropperMode::Colluding, EavesdropperMode::NonColluding] {
        let r = route(&m, 0, 2, mode).map_err(|e| e.to_string())?;
        if r.path.nodes() != [0, 1, 2] {
            return Err(format!("{mode}: expected the relay path, got {}", r.path));
        }
    }
    Ok(())
}

fn lemma_reference() -> Result<(), String> {
    let cfg = QuadratureConfig {
        rel_tol: 1e-9,
        ..QuadratureConfig::default()
    };
    let (f2, g2) = lemma1_integrals(&[0.0, 1.0], &[1.0, 1.0], &cfg).map_err(|e| e.to_string())?;
    near(f2 - g2, 0.1 * std::f64::consts::PI, 1e-7, "two-term gap")
}

pub fn run() -> Result<(), String> {
    let checks: &[Check] = &[
        ("plane-quadrature", plane_quadrature),
        ("gamma-constants", gamma_constants),
        ("hypoexp-cdf", hypoexp_cdf),
        ("exact-single-hop", exact_single_hop),
        ("approx-identities", approximations_agree_at_one_hop),
        ("monte-carlo-band", monte_carlo_band),
        ("routing-collinear", routing_collinear),
        ("lemma-reference", lemma_reference),
    ];
    let mut failures = 0;
    for (name, f) in checks {
        match f() {
            Ok(()) => println!("ok {name}"),
            Err(msg) => {
                println!("FAIL {name}: {msg}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("selftest: {} checks passed", checks.len());
        Ok(())
    } else {
        Err(format!("{failures} selftest checks failed"))
    }
}

//! Numerical check of the anchoring inequality: the distinct-anchor line
//! integral never falls below the common-anchor one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secroute::approx::lemma1_integrals;
use secroute::QuadratureConfig;

use crate::report::CsvReport;

pub fn run(seed: u64, instances: usize, out: &Option<String>) -> Result<(), String> {
    let cfg = QuadratureConfig {
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        ..QuadratureConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut violations = 0usize;

    for case in 0..instances {
        let n = 1 + case % 5;
        let anchors: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let scales: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
        let (f, g) = lemma1_integrals(&anchors, &scales, &cfg).map_err(|e| e.to_string())?;
        let gap = f - g;
        min_gap = min_gap.min(gap);
        if gap < -1e-8 * g.abs().max(1.0) {
            violations += 1;
        }
        rows.push(format!("{case},{n},{f},{g},{gap}"));
    }

    // reference closed forms: one term gives sqrt(B) pi on both sides; the
    // two-term case B=[1,1], a=[0,1] gives 1.6 pi vs 1.5 pi
    let pi = std::f64::consts::PI;
    let (f1, g1) = lemma1_integrals(&[0.0], &[1.0], &cfg).map_err(|e| e.to_string())?;
    rows.push(format!("ref-1,1,{f1},{g1},{}", f1 - g1));
    let ok1 = (f1 - pi).abs() < 1e-6 && (g1 - pi).abs() < 1e-6;
    let (f2, g2) = lemma1_integrals(&[0.0, 1.0], &[1.0, 1.0], &cfg).map_err(|e| e.to_string())?;
    rows.push(format!("ref-2,2,{f2},{g2},{}", f2 - g2));
    let ok2 = (f2 - 1.6 * pi).abs() < 1e-6
        && (g2 - 1.5 * pi).abs() < 1e-6
        && ((f2 - g2) / pi - 0.1).abs() < 1e-6;

    CsvReport {
        schema: "lemma1-v1",
        command: "lemma1-check",
        seed,
        config_hash: None,
        header: "case,n,f,g,gap",
        rows,
    }
    .write(out, "lemma1")
    .map_err(|e| e.to_string())?;

    eprintln!("{instances} instances, min gap {min_gap:.3e}, violations {violations}");
    if violations > 0 {
        return Err(format!("{violations} instances violate the inequality"));
    }
    if !ok1 || !ok2 {
        return Err("reference closed forms not reproduced".into());
    }
    Ok(())
}

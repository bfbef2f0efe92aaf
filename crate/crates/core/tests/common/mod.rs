#![allow(dead_code)] // shared by several test targets, each using a subset

use secroute::{NetworkModel, Path};

/// Six-node layout used throughout: two endpoints on the x axis, two relays
/// on the diagonals at radius 5 and one outlier at radius 15.
pub fn six_node_model(lambda_e: f64) -> NetworkModel {
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

/// One to four hop paths across the layout.
pub fn study_paths() -> Vec<Path> {
    vec![
        Path::new(vec![0, 2]).unwrap(),
        Path::new(vec![0, 2, 4]).unwrap(),
        Path::new(vec![0, 1, 2, 4]).unwrap(),
        Path::new(vec![0, 1, 2, 3, 4]).unwrap(),
    ]
}

/// Kolmogorov-Smirnov distance between samples and an analytic CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        ks = ks.max((f - i as f64 / n).abs());
        ks = ks.max((f - (i as f64 + 1.0) / n).abs());
    }
    ks
}

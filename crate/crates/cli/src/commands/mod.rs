pub mod lemma1;
pub mod route;
pub mod route_study;
pub mod scp_eval;
pub mod selftest;

/// Shortest-roundtrip float formatting; empty for None (e.g. no CI column).
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

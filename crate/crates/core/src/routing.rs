//! Highest-SCP route selection.
//!
//! Link weights are d^alpha. A hop-bounded Bellman-Ford pass produces, for
//! every bound v, the minimum-weight path using at most v hops; scanning the
//! per-bound metric K2(|L|) (sum d^alpha)^(2/a) (colluding) or
//! (|L| sum d^alpha)^(2/a) (non-colluding) over all bounds yields the global
//! optimum over simple paths. An exhaustive enumerator serves as benchmark,
//! plus a pruned exhaustive scan over the exact colluding SCP that uses the
//! closed-form value as a sound upper bound.
//!
//! Ties are always broken the same way: fewer hops first, then the
//! lexicographically smallest node sequence.

use crate::approx::GammaConstants;
use crate::error::{Error, Result};
use crate::exact::colluding_exposure;
use crate::model::{alpha_weight, dist_squared, EavesdropperMode, NetworkModel, Path};
use crate::quad::QuadratureConfig;

/// Node-count cap for exhaustive enumeration over a metric.
pub const DEFAULT_EXHAUSTIVE_GUARD: usize = 12;
/// Node-count cap for exhaustive search over the exact SCP.
pub const DEFAULT_EXACT_SCP_GUARD: usize = 10;

/// Symmetric d^alpha link weights over the legitimate nodes. Absent edges
/// (connectivity-radius pruning) are stored as NaN.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: usize,
    w: Vec<f64>,
}

impl WeightedGraph {
    pub fn complete_from_model(model: &NetworkModel) -> Result<Self> {
        Self::from_model_with_radius(model, f64::INFINITY)
    }

    /// Keep only links no longer than `radius`.
    pub fn from_model_with_radius(model: &NetworkModel, radius: f64) -> Result<Self> {
        let n = model.node_count();
        let alpha = model.alpha();
        let r2_cut = radius * radius;
        let mut w = vec![f64::NAN; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d2 = dist_squared(model.node(i), model.node(j));
                if d2 == 0.0 {
                    return Err(Error::ZeroDistance { a: i, b: j });
                }
                if d2 <= r2_cut {
                    let wij = alpha_weight(d2, alpha);
                    w[i * n + j] = wij;
                    w[j * n + i] = wij;
                }
            }
        }
        Ok(WeightedGraph { n, w })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.w[i * self.n + j];
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }
}

/// Best path found for one hop bound.
#[derive(Debug, Clone)]
pub struct HopBoundedEntry {
    pub path: Path,
    pub weight_sum: f64,
}

/// For every hop bound v in 1..N_L-1, the minimum-weight path from source to
/// destination using at most v hops (entry absent when none exists).
#[derive(Debug, Clone)]
pub struct HopBoundedTable {
    entries: Vec<Option<HopBoundedEntry>>,
}

impl HopBoundedTable {
    /// Entry for paths of at most `bound` hops (bound is 1-based).
    pub fn entry(&self, bound: usize) -> Option<&HopBoundedEntry> {
        self.entries.get(bound.checked_sub(1)?)?.as_ref()
    }

    pub fn max_bound(&self) -> usize {
        self.entries.len()
    }

    /// Present entries as (bound, entry) pairs, in increasing bound order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &HopBoundedEntry)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(k, e)| e.as_ref().map(|e| (k + 1, e)))
    }
}

#[derive(Clone)]
struct Label {
    weight: f64,
    path: Vec<usize>,
}

/// Compare `candidate prefix + [next]` against `current` lexicographically.
/// Only called on equal weight and equal hop count, so lengths match.
fn candidate_is_lex_smaller(prefix: &[usize], next: usize, current: &[usize]) -> bool {
    debug_assert_eq!(prefix.len() + 1, current.len());
    for (a, b) in prefix.iter().zip(current) {
        if a != b {
            return a < b;
        }
    }
    next < current[prefix.len()]
}

/// Hop-bounded Bellman-Ford: round h relaxes every edge once from the labels
/// of round h-1, so after round h each label is the best walk of at most h
/// hops. Positive weights make the minimizers simple paths automatically.
pub fn hop_bounded_shortest_paths(
    graph: &WeightedGraph,
    src: usize,
    dst: usize,
) -> Result<HopBoundedTable> {
    let n = graph.node_count();
    if src >= n || dst >= n {
        return Err(Error::InvalidConfig(format!(
            "endpoint out of range: {src}/{dst} with {n} nodes"
        )));
    }
    if src == dst {
        return Err(Error::InvalidConfig(
            "source and destination must differ".into(),
        ));
    }

    let mut prev: Vec<Option<Label>> = vec![None; n];
    prev[src] = Some(Label {
        weight: 0.0,
        path: vec![src],
    });
    let mut entries = Vec::with_capacity(n.saturating_sub(1));

    for _round in 1..n {
        let mut next: Vec<Option<Label>> = prev.clone();
        #[allow(clippy::needless_range_loop)]
        for v in 0..n {
            // pick the best incoming relaxation first, then clone once
            let mut best_u: Option<(usize, f64)> = None;
            for u in 0..n {
                if u == v {
                    continue;
                }
                let (Some(lu), Some(wuv)) = (&prev[u], graph.weight(u, v)) else {
                    continue;
                };
                let cand = lu.weight + wuv;
                let better = match best_u {
                    None => true,
                    Some((bu, bw)) => {
                        if cand != bw {
                            cand < bw
                        } else {
                            // equal weight and equal hops (same round):
                            // compare the full node sequences
                            let b = prev[bu].as_ref().unwrap();
                            let l = prev[u].as_ref().unwrap();
                            l.path < b.path
                        }
                    }
                };
                if better {
                    best_u = Some((u, cand));
                }
            }
            if let Some((u, w)) = best_u {
                let lu = prev[u].as_ref().unwrap();
                let replace = match &next[v] {
                    None => true,
                    Some(cur) => {
                        if w != cur.weight {
                            w < cur.weight
                        } else {
                            let cand_hops = lu.path.len();
                            let cur_hops = cur.path.len() - 1;
                            if cand_hops != cur_hops {
                                cand_hops < cur_hops
                            } else {
                                candidate_is_lex_smaller(&lu.path, v, &cur.path)
                            }
                        }
                    }
                };
                if replace {
                    let mut path = Vec::with_capacity(lu.path.len() + 1);
                    path.extend_from_slice(&lu.path);
                    path.push(v);
                    next[v] = Some(Label { weight: w, path });
                }
            }
        }
        entries.push(next[dst].as_ref().map(|l| HopBoundedEntry {
            path: Path::new(l.path.clone()).expect("relaxation labels are simple paths"),
            weight_sum: l.weight,
        }));
        prev = next;
    }
    Ok(HopBoundedTable { entries })
}

/// K2(hops) * weight_sum^(2/alpha).
pub fn colluding_metric(weight_sum: f64, hops: usize, alpha: f64, lambda_e: f64) -> Result<f64> {
    if hops == 0 {
        return Err(Error::InvalidConfig("metric needs at least one hop".into()));
    }
    let gc = GammaConstants::new(alpha, lambda_e)?;
    Ok(gc.k2(hops) * weight_sum.powf(2.0 / alpha))
}

/// (hops * weight_sum)^(2/alpha); the constant K1 factor is dropped since it
/// never changes the argmin.
pub fn noncolluding_metric(weight_sum: f64, hops: usize, alpha: f64) -> f64 {
    (hops as f64 * weight_sum).powf(2.0 / alpha)
}

#[derive(Debug, Clone)]
pub struct RouteResult {
    pub path: Path,
    pub metric_value: f64,
    pub mode: EavesdropperMode,
    pub table: HopBoundedTable,
}

fn metric_for(
    gc: &GammaConstants,
    mode: EavesdropperMode,
    alpha: f64,
    weight_sum: f64,
    hops: usize,
) -> f64 {
    match mode {
        EavesdropperMode::Colluding => gc.k2(hops) * weight_sum.powf(2.0 / alpha),
        EavesdropperMode::NonColluding => noncolluding_metric(weight_sum, hops, alpha),
    }
}

/// Highest-SCP route between `src` and `dst`: evaluate the mode's metric on
/// every hop-bound entry and keep the minimum. Requires equal transmit
/// powers, which is what makes the metric scan exactly optimal.
pub fn route(
    model: &NetworkModel,
    src: usize,
    dst: usize,
    mode: EavesdropperMode,
) -> Result<RouteResult> {
    let graph = WeightedGraph::complete_from_model(model)?;
    route_on_graph(model, &graph, src, dst, mode)
}

/// Like [`route`] but on a caller-provided (possibly radius-pruned) graph.
pub fn route_on_graph(
    model: &NetworkModel,
    graph: &WeightedGraph,
    src: usize,
    dst: usize,
    mode: EavesdropperMode,
) -> Result<RouteResult> {
    let spread = model.power_spread();
    if spread > crate::approx::EQUAL_POWER_TOL {
        return Err(Error::UnequalPowers { spread });
    }
    let alpha = model.alpha();
    let gc = GammaConstants::new(alpha, model.lambda_e())?;
    let table = hop_bounded_shortest_paths(graph, src, dst)?;

    let mut best: Option<(f64, usize, &HopBoundedEntry)> = None;
    for (_bound, entry) in table.iter() {
        let hops = entry.path.hops();
        let m = metric_for(&gc, mode, alpha, entry.weight_sum, hops);
        let replace = match &best {
            None => true,
            Some((bm, bh, be)) => {
                if m != *bm {
                    m < *bm
                } else if hops != *bh {
                    hops < *bh
                } else {
                    entry.path.nodes() < be.path.nodes()
                }
            }
        };
        if replace {
            best = Some((m, hops, entry));
        }
    }
    let (metric_value, _, entry) =
        best.ok_or(Error::Unreachable { src, dst })?;
    Ok(RouteResult {
        path: entry.path.clone(),
        metric_value,
        mode,
        table: table.clone(),
    })
}

/// Depth-first enumeration of every simple src->dst path in lexicographic
/// order of the node sequence. The running weight is folded left to right,
/// so callers observe exactly the sums a relaxation would produce.
pub(crate) fn for_each_simple_path<F>(graph: &WeightedGraph, src: usize, dst: usize, visit: &mut F)
where
    F: FnMut(&[usize], f64),
{
    fn recurse<F>(
        graph: &WeightedGraph,
        dst: usize,
        path: &mut Vec<usize>,
        visited: &mut Vec<bool>,
        weight: f64,
        visit: &mut F,
    ) where
        F: FnMut(&[usize], f64),
    {
        let here = *path.last().unwrap();
        for v in 0..graph.node_count() {
            if visited[v] {
                continue;
            }
            let Some(w) = graph.weight(here, v) else {
                continue;
            };
            let total = weight + w;
            path.push(v);
            if v == dst {
                visit(path, total);
            } else {
                visited[v] = true;
                recurse(graph, dst, path, visited, total, visit);
                visited[v] = false;
            }
            path.pop();
        }
    }

    let mut visited = vec![false; graph.node_count()];
    visited[src] = true;
    visited[dst] = false;
    let mut path = vec![src];
    recurse(graph, dst, &mut path, &mut visited, 0.0, visit);
}

/// Benchmark: enumerate all simple paths and return the one minimizing
/// `objective(nodes, weight_sum)`, with the usual tie-breaking.
pub fn exhaustive_route<F>(
    model: &NetworkModel,
    src: usize,
    dst: usize,
    mut objective: F,
    max_nodes_guard: usize,
) -> Result<Path>
where
    F: FnMut(&[usize], f64) -> f64,
{
    let n = model.node_count();
    if n > max_nodes_guard {
        return Err(Error::TooLarge {
            nodes: n,
            guard: max_nodes_guard,
        });
    }
    if src >= n || dst >= n || src == dst {
        return Err(Error::InvalidConfig(format!(
            "bad endpoints {src}/{dst} for {n} nodes"
        )));
    }
    let graph = WeightedGraph::complete_from_model(model)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_simple_path(&graph, src, dst, &mut |nodes, weight| {
        let value = objective(nodes, weight);
        let replace = match &best {
            None => true,
            Some((bv, bp)) => {
                if value != *bv {
                    value < *bv
                } else {
                    // enumeration is lexicographic, so on a full tie the
                    // incumbent already is the lex-smaller sequence
                    nodes.len() < bp.len()
                }
            }
        };
        if replace {
            best = Some((value, nodes.to_vec()));
        }
    });
    let (_, nodes) = best.ok_or(Error::Unreachable { src, dst })?;
    Path::new(nodes)
}

/// Benchmark over the exact colluding SCP: scan simple paths in decreasing
/// order of the closed-form value, evaluating the exact exposure integral
/// only while the closed form (an upper bound on the exact SCP) can still
/// beat the incumbent. Returns the best path and its exact SCP.
pub fn best_route_by_exact_scp(
    model: &NetworkModel,
    src: usize,
    dst: usize,
    quad: &QuadratureConfig,
    max_nodes_guard: usize,
) -> Result<(Path, f64)> {
    let n = model.node_count();
    if n > max_nodes_guard {
        return Err(Error::TooLarge {
            nodes: n,
            guard: max_nodes_guard,
        });
    }
    let spread = model.power_spread();
    if spread > crate::approx::EQUAL_POWER_TOL {
        return Err(Error::UnequalPowers { spread });
    }
    let alpha = model.alpha();
    let lambda = model.lambda_e();
    let gc = GammaConstants::new(alpha, lambda)?;
    let graph = WeightedGraph::complete_from_model(model)?;

    let mut candidates: Vec<(f64, Vec<usize>)> = Vec::new();
    for_each_simple_path(&graph, src, dst, &mut |nodes, weight| {
        let exponent = gc.k2(nodes.len() - 1) * weight.powf(2.0 / alpha);
        candidates.push((exponent, nodes.to_vec()));
    });
    if candidates.is_empty() {
        return Err(Error::Unreachable { src, dst });
    }
    // ascending exponent = descending closed-form SCP
    candidates.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });

    const PRUNE_MARGIN: f64 = 1e-6;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (exponent, nodes) in candidates {
        if let Some((best_scp, _)) = &best {
            if (-exponent).exp() < best_scp - PRUNE_MARGIN {
                break;
            }
        }
        let path = Path::new(nodes.clone()).expect("enumerated paths are simple");
        let scp = (-lambda * colluding_exposure(model, &path, quad)?).exp();
        let replace = match &best {
            None => true,
            Some((bs, bp)) => {
                if scp != *bs {
                    scp > *bs
                } else if nodes.len() != bp.len() {
                    nodes.len() < bp.len()
                } else {
                    nodes < *bp
                }
            }
        };
        if replace {
            best = Some((scp, nodes));
        }
    }
    let (scp, nodes) = best.unwrap();
    Ok((Path::new(nodes).unwrap(), scp))
}

/// Benchmark over the exact non-colluding SCP by plain enumeration. No
/// sound pruning bound exists for this engine, so every simple path costs a
/// full fading-profile quadrature; keep the guard small.
pub fn best_route_by_exact_scp_noncolluding(
    model: &NetworkModel,
    src: usize,
    dst: usize,
    quad: &QuadratureConfig,
    max_nodes_guard: usize,
) -> Result<(Path, f64)> {
    let n = model.node_count();
    if n > max_nodes_guard {
        return Err(Error::TooLarge {
            nodes: n,
            guard: max_nodes_guard,
        });
    }
    let lambda = model.lambda_e();
    let graph = WeightedGraph::complete_from_model(model)?;
    let mut paths: Vec<Vec<usize>> = Vec::new();
    for_each_simple_path(&graph, src, dst, &mut |nodes, _| paths.push(nodes.to_vec()));
    if paths.is_empty() {
        return Err(Error::Unreachable { src, dst });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for nodes in paths {
        let path = Path::new(nodes.clone()).expect("enumerated paths are simple");
        let scp = crate::exact::noncolluding_exposure(model, &path, quad)?.scp(lambda);
        let replace = match &best {
            None => true,
            Some((bs, bp)) => {
                if scp != *bs {
                    scp > *bs
                } else if nodes.len() != bp.len() {
                    nodes.len() < bp.len()
                } else {
                    nodes < *bp
                }
            }
        };
        if replace {
            best = Some((scp, nodes));
        }
    }
    let (scp, nodes) = best.unwrap();
    Ok((Path::new(nodes).unwrap(), scp))
}

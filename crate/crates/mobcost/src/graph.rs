//! Network graph over Mobility Agents and all-pairs shortest distances.
//!
//! The network is a weighted adjacency matrix over every MA in the system.
//! Weights are relative signalling costs per link and may be asymmetric
//! (`w[i][j] = 1`, `w[j][i] = 2` means the reverse direction costs double).
//! A zero off-diagonal entry means "no direct link". Distances are always
//! directed sums of weights along the cheapest path.

use crate::error::{Error, Result};

/// Weighted directed network of Mobility Agents.
///
/// `is_map` marks the nodes a mobile can attach to; `ha` is the Home Agent
/// holding the authoritative location entry. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    n: usize,
    weights: Vec<f64>,
    is_map: Vec<bool>,
    ha: usize,
}

impl NetworkGraph {
    /// Build and validate a network graph.
    ///
    /// Rejects non-square matrices, negative weights, nonzero diagonals,
    /// an out-of-range HA index and MAP-less networks. Connectivity is not
    /// checked here; [`all_pairs_distances`] reports the first unreachable
    /// pair it finds.
    pub fn new(weights: Vec<Vec<f64>>, is_map: Vec<bool>, ha: usize) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::Graph("empty weight matrix".into()));
        }
        if is_map.len() != n {
            return Err(Error::Graph(format!(
                "MAP flag vector has length {} but the matrix is {}x{}",
                is_map.len(),
                n,
                n
            )));
        }
        if ha >= n {
            return Err(Error::Graph(format!(
                "HA index {ha} out of range for {n} nodes"
            )));
        }
        if !is_map.iter().any(|&m| m) {
            return Err(Error::Graph("at least one node must be a MAP".into()));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Graph(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Graph(format!(
                        "weight[{i}][{j}] = {w} is not a finite non-negative value"
                    )));
                }
                if i == j && w != 0.0 {
                    return Err(Error::Graph(format!(
                        "diagonal weight[{i}][{i}] must be 0, got {w}"
                    )));
                }
                flat.push(w);
            }
        }
        Ok(NetworkGraph {
            n,
            weights: flat,
            is_map,
            ha,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ha(&self) -> usize {
        self.ha
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.n + to]
    }

    pub fn is_map(&self, node: usize) -> bool {
        self.is_map[node]
    }

    pub fn map_flags(&self) -> &[bool] {
        &self.is_map
    }

    /// Indices of all MAP nodes, ascending.
    pub fn map_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_map[i]).collect()
    }

    pub fn map_count(&self) -> usize {
        self.is_map.iter().filter(|&&m| m).count()
    }

    /// Copy with every weight multiplied by `factor` (> 0). Used when a
    /// network is priced by its cost/QoS ratio before composition.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::Graph(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(NetworkGraph {
            n: self.n,
            weights: self.weights.iter().map(|w| w * factor).collect(),
            is_map: self.is_map.clone(),
            ha: self.ha,
        })
    }
}

/// All-pairs shortest distances plus the HA row used by the depth parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<f64>,
    ha: usize,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, from: usize, to: usize) -> f64 {
        self.dist[from * self.n + to]
    }

    /// Distances from the HA to every node (the depth vector).
    pub fn ha_row(&self) -> &[f64] {
        &self.dist[self.ha * self.n..(self.ha + 1) * self.n]
    }

    pub fn ha(&self) -> usize {
        self.ha
    }
}

/// Floyd relaxation over the directed weight matrix.
///
/// Distances are minimal weight sums over directed paths; asymmetric inputs
/// are respected. Errors on the first unreachable ordered pair so downstream
/// formulas never see an infinite distance.
pub fn all_pairs_distances(g: &NetworkGraph) -> Result<DistanceMatrix> {
    let n = g.n;
    let mut dist = vec![f64::INFINITY; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
        for j in 0..n {
            let w = g.weight(i, j);
            if i != j && w > 0.0 {
                dist[i * n + j] = w;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let via = dik + dist[k * n + j];
                if via < dist[i * n + j] {
                    dist[i * n + j] = via;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !dist[i * n + j].is_finite() {
                return Err(Error::Disconnected { from: i, to: j });
            }
        }
    }
    Ok(DistanceMatrix {
        n,
        dist,
        ha: g.ha,
    })
}

/// How the average link weight `w` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AveragingMode {
    /// Mean over existing (nonzero) directed edges. Default: absent links do
    /// not drag the average toward zero.
    #[default]
    Edges,
    /// Sum of all matrix entries divided by n²; counts absent links as
    /// zero-weight links. Kept for fidelity with the literal definition.
    LiteralN2,
}

impl AveragingMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "edges" => Ok(AveragingMode::Edges),
            "literal-n2" => Ok(AveragingMode::LiteralN2),
            other => Err(Error::Params(format!(
                "unknown averaging mode `{other}` (expected `edges` or `literal-n2`)"
            ))),
        }
    }
}

/// Average link weight `w` of the network, per the selected mode.
pub fn average_weight(g: &NetworkGraph, mode: AveragingMode) -> Result<f64> {
    let sum: f64 = g.weights.iter().sum();
    let edges = g.weights.iter().filter(|&&w| w > 0.0).count();
    match mode {
        AveragingMode::Edges => {
            if edges == 0 {
                Err(Error::NoEdges)
            } else {
                Ok(sum / edges as f64)
            }
        }
        AveragingMode::LiteralN2 => Ok(sum / (g.n * g.n) as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(weights: Vec<Vec<f64>>, ha: usize) -> NetworkGraph {
        let n = weights.len();
        NetworkGraph::new(weights, vec![true; n], ha).unwrap()
    }

    #[test]
    fn triangle_detour_beats_direct_edge() {
        // A-B = 1, B-C = 1, A-C = 3 (undirected): dist(A,C) = 2
        let g = graph(
            vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 1.0],
                vec![3.0, 1.0, 0.0],
            ],
            0,
        );
        let d = all_pairs_distances(&g).unwrap();
        assert_eq!(d.dist(0, 2), 2.0);
        assert_eq!(d.dist(2, 0), 2.0);
    }

    #[test]
    fn single_node_distance_is_zero() {
        let g = graph(vec![vec![0.0]], 0);
        let d = all_pairs_distances(&g).unwrap();
        assert_eq!(d.dist(0, 0), 0.0);
    }

    #[test]
    fn asymmetric_weights_kept_directed() {
        let g = graph(vec![vec![0.0, 1.0], vec![2.0, 0.0]], 0);
        let d = all_pairs_distances(&g).unwrap();
        assert_eq!(d.dist(0, 1), 1.0);
        assert_eq!(d.dist(1, 0), 2.0);
    }

    #[test]
    fn disconnected_graph_names_the_pair() {
        let g = graph(vec![vec![0.0, 1.0], vec![0.0, 0.0]], 0);
        match all_pairs_distances(&g) {
            Err(Error::Disconnected { from: 1, to: 0 }) => {}
            other => panic!("expected Disconnected(1,0), got {other:?}"),
        }
    }

    #[test]
    fn average_weight_modes() {
        let g = graph(vec![vec![0.0, 1.0], vec![2.0, 0.0]], 0);
        assert_eq!(average_weight(&g, AveragingMode::Edges).unwrap(), 1.5);
        assert_eq!(average_weight(&g, AveragingMode::LiteralN2).unwrap(), 0.75);
    }

    #[test]
    fn average_weight_uniform_cycle_with_chords() {
        // 4 nodes, every ordered pair linked with weight 1: 12 directed edges
        let mut w = vec![vec![1.0; 4]; 4];
        for i in 0..4 {
            w[i][i] = 0.0;
        }
        let g = graph(w, 0);
        assert_eq!(average_weight(&g, AveragingMode::Edges).unwrap(), 1.0);
    }

    #[test]
    fn no_edges_is_an_error() {
        let g = NetworkGraph::new(vec![vec![0.0]], vec![true], 0).unwrap();
        assert!(matches!(
            average_weight(&g, AveragingMode::Edges),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(NetworkGraph::new(vec![vec![0.0, 1.0]], vec![true, true], 0).is_err());
        assert!(NetworkGraph::new(vec![vec![1.0]], vec![true], 0).is_err());
        assert!(NetworkGraph::new(vec![vec![0.0]], vec![false], 0).is_err());
        assert!(NetworkGraph::new(vec![vec![0.0]], vec![true], 3).is_err());
        assert!(NetworkGraph::new(vec![vec![0.0, -1.0], vec![1.0, 0.0]], vec![true; 2], 0).is_err());
    }

    /// Brute-force oracle: enumerate every simple path (length <= n-1) by DFS.
    pub(crate) fn brute_force_distances(g: &NetworkGraph) -> Vec<Vec<f64>> {
        let n = g.n();
        let mut best = vec![vec![f64::INFINITY; n]; n];
        for start in 0..n {
            let mut visited = vec![false; n];
            visited[start] = true;
            dfs(g, start, start, 0.0, &mut visited, &mut best);
            best[start][start] = 0.0;
        }
        best
    }

    fn dfs(
        g: &NetworkGraph,
        start: usize,
        at: usize,
        acc: f64,
        visited: &mut Vec<bool>,
        best: &mut Vec<Vec<f64>>,
    ) {
        for next in 0..g.n() {
            if visited[next] || g.weight(at, next) == 0.0 {
                continue;
            }
            let cost = acc + g.weight(at, next);
            if cost < best[start][next] {
                best[start][next] = cost;
            }
            visited[next] = true;
            dfs(g, start, next, cost, visited, best);
            visited[next] = false;
        }
    }

    /// Random strongly connected graph with dyadic weights so that path sums
    /// are exact in f64 and oracle comparison can be `==`.
    pub(crate) fn random_connected_graph(n: usize, seed: u64) -> NetworkGraph {
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut w = vec![vec![0.0; n]; n];
        // ring guarantees strong connectivity
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j {
                w[i][j] = 0.25 * ((next() % 16) + 1) as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && w[i][j] == 0.0 && next() % 3 == 0 {
                    w[i][j] = 0.25 * ((next() % 16) + 1) as f64;
                }
            }
        }
        NetworkGraph::new(w, vec![true; n], 0).unwrap()
    }

    #[test]
    fn matches_exhaustive_enumeration_on_random_graphs() {
        for seed in 0..40u64 {
            let g = random_connected_graph(6, seed + 1);
            let d = all_pairs_distances(&g).unwrap();
            let oracle = brute_force_distances(&g);
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(d.dist(i, j), oracle[i][j], "seed {seed} pair ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn idempotent_on_its_own_output() {
        for seed in 0..10u64 {
            let g = random_connected_graph(6, seed + 101);
            let d = all_pairs_distances(&g).unwrap();
            let complete: Vec<Vec<f64>> = (0..6)
                .map(|i| (0..6).map(|j| d.dist(i, j)).collect())
                .collect();
            let g2 = NetworkGraph::new(complete, vec![true; 6], 0).unwrap();
            let d2 = all_pairs_distances(&g2).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(d.dist(i, j), d2.dist(i, j));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn scaling_weights_scales_distances(seed in 0u64..500, k in 1u32..32) {
            let g = random_connected_graph(5, seed);
            let k = k as f64 * 0.5;
            let scaled = g.scaled(k).unwrap();
            let d = all_pairs_distances(&g).unwrap();
            let ds = all_pairs_distances(&scaled).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    prop_assert!((ds.dist(i, j) - k * d.dist(i, j)).abs() <= 1e-12 * (1.0 + d.dist(i, j)));
                }
            }
        }

        #[test]
        fn relabeling_is_equivariant(seed in 0u64..200, rot in 0usize..5) {
            let n = 5;
            let g = random_connected_graph(n, seed + 7);
            // cyclic relabeling p(i) = (i + rot) % n
            let p = |i: usize| (i + rot) % n;
            let mut w = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    w[p(i)][p(j)] = g.weight(i, j);
                }
            }
            let gp = NetworkGraph::new(w, vec![true; n], p(g.ha())).unwrap();
            let d = all_pairs_distances(&g).unwrap();
            let dp = all_pairs_distances(&gp).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(d.dist(i, j), dp.dist(p(i), p(j)));
                }
            }
        }

        #[test]
        fn triangle_inequality_holds(seed in 0u64..200) {
            let g = random_connected_graph(6, seed + 19);
            let d = all_pairs_distances(&g).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    for k in 0..6 {
                        prop_assert!(d.dist(i, k) <= d.dist(i, j) + d.dist(j, k) + 1e-12);
                    }
                }
            }
        }
    }
}

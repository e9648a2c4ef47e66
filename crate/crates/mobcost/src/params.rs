//! Scalar network descriptors derived from the graph and the movement model.
//!
//! All distance-like descriptors are normalized by the average link weight
//! `w`, so they read as edge-count equivalents: `m` is the average depth of
//! the mobile below the HA, `g_t` the average distance covered by one
//! handover, `delta` the average number of reachable neighbor MAPs and `g_h`
//! the average distance to the nearest hierarchical junction.

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;
use crate::mobility::{StationaryDistribution, TransitionMatrix};

/// Whether a descriptor came out of the pipeline or was supplied by the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Overridden,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Computed => write!(f, "computed"),
            Provenance::Overridden => write!(f, "overridden"),
        }
    }
}

/// User-supplied replacement values for descriptors that may be known from
/// measurement rather than derivable from the matrices.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub m: Option<f64>,
    pub g_t: Option<f64>,
    pub delta: Option<f64>,
    pub g_h: Option<f64>,
}

/// Bundle of derived descriptors with per-field provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    pub w: f64,
    pub m: f64,
    pub g_t: f64,
    pub delta: f64,
    pub g_h: f64,
    pub m_source: Provenance,
    pub g_t_source: Provenance,
    pub delta_source: Provenance,
    pub g_h_source: Provenance,
}

impl DerivedParams {
    /// Structural relations that hold on tree-shaped networks and flag a
    /// suspicious parameter set elsewhere. Violations are reported, never
    /// rejected: overrides may encode measured values outside the model.
    pub fn structural_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.g_h > self.m + 1e-9 {
            out.push(format!(
                "g_h = {} exceeds m = {}: the junction should lie on or below the HA path",
                self.g_h, self.m
            ));
        }
        if self.g_t > 2.0 * self.m + 1e-9 {
            out.push(format!(
                "g_t = {} exceeds 2m = {}: two HA legs should bound any handover distance",
                self.g_t,
                2.0 * self.m
            ));
        }
        out
    }
}

/// Average HA depth: density-weighted mean of the HA-to-node distances,
/// normalized by `w`. Nodes the mobile never visits do not count.
pub fn ha_depth(d: &DistanceMatrix, b: &StationaryDistribution, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Params(format!("w must be positive, got {w}")));
    }
    if b.n() != d.n() {
        return Err(Error::Params(
            "stationary vector and distance matrix sizes differ".into(),
        ));
    }
    let dot: f64 = d
        .ha_row()
        .iter()
        .zip(b.probabilities())
        .map(|(a, p)| a * p)
        .sum();
    Ok(dot / w)
}

/// Average distance covered by one handover: for each MAP, the expected
/// distance to the next MAP under the transition matrix, averaged with the
/// stationary density and normalized by `w`.
pub fn handover_distance(
    d: &DistanceMatrix,
    t: &TransitionMatrix,
    b: &StationaryDistribution,
    w: f64,
) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Params(format!("w must be positive, got {w}")));
    }
    let n = d.n();
    if t.n() != n || b.n() != n {
        return Err(Error::Params("input sizes differ".into()));
    }
    let mut total = 0.0;
    for i in 0..n {
        let bi = b.prob(i);
        if bi == 0.0 {
            continue;
        }
        let expected: f64 = (0..n).map(|j| t.prob(i, j) * d.dist(i, j)).sum();
        total += bi * expected;
    }
    Ok(total / w)
}

/// How the neighbor-degree average is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeMode {
    /// Density-weighted mean out-degree of the handover graph. Default.
    #[default]
    BWeighted,
    /// The same mean divided by the node count. Shrinks toward zero on
    /// large networks; kept only for fidelity with the literal definition.
    LiteralOverN,
}

/// Average number of neighboring MAPs reachable in one handover.
pub fn neighbor_degree(
    t: &TransitionMatrix,
    b: &StationaryDistribution,
    mode: DegreeMode,
) -> Result<f64> {
    let n = t.n();
    if b.n() != n {
        return Err(Error::Params("input sizes differ".into()));
    }
    let mut delta = 0.0;
    for i in 0..n {
        let bi = b.prob(i);
        if bi == 0.0 {
            continue;
        }
        let degree = (0..n).filter(|&j| t.prob(i, j) > 0.0).count();
        delta += bi * degree as f64;
    }
    Ok(match mode {
        DegreeMode::BWeighted => delta,
        DegreeMode::LiteralOverN => delta / n as f64,
    })
}

/// Average distance to the nearest hierarchical junction, from the
/// complete-tree model: the hierarchy is a rooted tree with branching
/// `ceil(delta)` (at least binary) and enough leaves for every MAP, the HA
/// at the root and MAPs at the leaves. For two distinct uniform random
/// leaves, the expected number of levels up to their lowest common ancestor
/// has the closed form
///
/// `P[L = l] = (beta^l - beta^(l-1)) / (beta^D - 1)`, `l = 1..D`,
///
/// and `g_h = w * E[L]`. Deployed networks rarely form this ideal tree, so
/// a measured override takes precedence when supplied.
pub fn junction_distance(n: usize, delta: f64, w: f64, override_value: Option<f64>) -> Result<f64> {
    if let Some(v) = override_value {
        return Ok(v);
    }
    if !(w > 0.0) {
        return Err(Error::Params(format!("w must be positive, got {w}")));
    }
    if n <= 1 {
        // the HA is the only node worth registering at
        return Ok(0.0);
    }
    if delta < 1.0 {
        return Err(Error::Params(format!(
            "delta must be at least 1 to form a hierarchy, got {delta}"
        )));
    }
    // branching below 2 would be a chain with a single leaf; clamp to binary
    let beta = (delta.ceil() as u128).max(2);
    let mut depth = 1u32;
    let mut leaves = beta;
    while leaves < n as u128 {
        leaves *= beta;
        depth += 1;
    }
    Ok(w * expected_junction_level(beta, depth))
}

fn expected_junction_level(beta: u128, depth: u32) -> f64 {
    // single exact integer ratio: sum_l l * (beta^l - beta^(l-1))
    // over beta^depth - 1
    let mut numerator: u128 = 0;
    for l in 1..=depth {
        numerator += l as u128 * (beta.pow(l) - beta.pow(l - 1));
    }
    numerator as f64 / (beta.pow(depth) - 1) as f64
}

/// Derive the full descriptor bundle, honoring overrides.
pub fn derive(
    d: &DistanceMatrix,
    t: &TransitionMatrix,
    b: &StationaryDistribution,
    w: f64,
    map_count: usize,
    degree_mode: DegreeMode,
    overrides: &Overrides,
) -> Result<DerivedParams> {
    let (m, m_source) = match overrides.m {
        Some(v) => (v, Provenance::Overridden),
        None => (ha_depth(d, b, w)?, Provenance::Computed),
    };
    let (g_t, g_t_source) = match overrides.g_t {
        Some(v) => (v, Provenance::Overridden),
        None => (handover_distance(d, t, b, w)?, Provenance::Computed),
    };
    let (delta, delta_source) = match overrides.delta {
        Some(v) => (v, Provenance::Overridden),
        None => (neighbor_degree(t, b, degree_mode)?, Provenance::Computed),
    };
    let (g_h, g_h_source) = match overrides.g_h {
        Some(v) => (v, Provenance::Overridden),
        None => {
            let v = if map_count <= 1 || delta < 1.0 {
                0.0
            } else {
                junction_distance(map_count, delta, w, None)?
            };
            (v, Provenance::Computed)
        }
    };
    Ok(DerivedParams {
        w,
        m,
        g_t,
        delta,
        g_h,
        m_source,
        g_t_source,
        delta_source,
        g_h_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_pairs_distances, average_weight, AveragingMode, NetworkGraph};
    use crate::mobility::{stationary_ctmc, to_transition_matrix, RateMatrix};

    #[test]
    fn star_depth_is_one() {
        // HA at the center, 4 leaf MAPs, all weights 1, uniform density
        let mut w = vec![vec![0.0; 5]; 5];
        for leaf in 1..5 {
            w[0][leaf] = 1.0;
            w[leaf][0] = 1.0;
        }
        let mut is_map = vec![false; 5];
        for f in is_map.iter_mut().skip(1) {
            *f = true;
        }
        let g = NetworkGraph::new(w, is_map.clone(), 0).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        // ring movement among the leaves
        let mut rates = vec![vec![0.0; 5]; 5];
        for leaf in 1..5 {
            let next = if leaf == 4 { 1 } else { leaf + 1 };
            rates[leaf][next] = 1.0;
            rates[next][leaf] = 1.0;
        }
        let r = RateMatrix::new(rates, is_map).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        let w_avg = average_weight(&g, AveragingMode::Edges).unwrap();
        assert!((ha_depth(&d, &b, w_avg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ha_as_only_map_has_zero_depth() {
        let g = NetworkGraph::new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![true, false],
            0,
        )
        .unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let r = RateMatrix::new(vec![vec![0.0; 2]; 2], vec![true, false]).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        assert_eq!(ha_depth(&d, &b, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn depth_matches_direct_weighted_sum() {
        // 5-node weighted graph; oracle is the spreadsheet-style direct sum
        let weights = vec![
            vec![0.0, 2.0, 0.0, 1.5, 0.0],
            vec![2.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.5, 2.5],
            vec![1.5, 0.0, 0.5, 0.0, 1.0],
            vec![0.0, 0.0, 2.5, 1.0, 0.0],
        ];
        let g = NetworkGraph::new(weights, vec![true; 5], 0).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let rates = vec![
            vec![0.0, 1.0, 0.0, 2.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0, 1.0],
            vec![2.0, 0.0, 1.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0, 0.0],
        ];
        let r = RateMatrix::new(rates, vec![true; 5]).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        let w_avg = average_weight(&g, AveragingMode::Edges).unwrap();
        let m = ha_depth(&d, &b, w_avg).unwrap();

        let mut direct = 0.0;
        for i in 0..5 {
            direct += b.prob(i) * d.dist(0, i);
        }
        assert!((m - direct / w_avg).abs() < 1e-12);
        assert!(m > 0.0);
    }

    #[test]
    fn two_maps_alternating_have_unit_handover_distance() {
        let g = NetworkGraph::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![true; 2], 0).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let r = RateMatrix::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![true; 2]).unwrap();
        let t = to_transition_matrix(&r).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        assert!((handover_distance(&d, &t, &b, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ring_nearest_neighbor_handover_distance_is_one() {
        let n = 4;
        let mut w = vec![vec![0.0; n]; n];
        let mut rates = vec![vec![0.0; n]; n];
        for i in 0..n {
            let next = (i + 1) % n;
            w[i][next] = 1.0;
            w[next][i] = 1.0;
            rates[i][next] = 1.0;
            rates[next][i] = 1.0;
        }
        let g = NetworkGraph::new(w, vec![true; n], 0).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let r = RateMatrix::new(rates, vec![true; n]).unwrap();
        let t = to_transition_matrix(&r).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        let w_avg = average_weight(&g, AveragingMode::Edges).unwrap();
        assert!((handover_distance(&d, &t, &b, w_avg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ring_degree_is_two_and_complete_is_n_minus_one() {
        let n = 6;
        let mut rates = vec![vec![0.0; n]; n];
        for i in 0..n {
            rates[i][(i + 1) % n] = 1.0;
            rates[i][(i + n - 1) % n] = 1.0;
        }
        let r = RateMatrix::new(rates, vec![true; n]).unwrap();
        let t = to_transition_matrix(&r).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        assert!((neighbor_degree(&t, &b, DegreeMode::BWeighted).unwrap() - 2.0).abs() < 1e-12);

        let k = 4;
        let mut rates = vec![vec![1.0; k]; k];
        for i in 0..k {
            rates[i][i] = 0.0;
        }
        let r = RateMatrix::new(rates, vec![true; k]).unwrap();
        let t = to_transition_matrix(&r).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        assert!((neighbor_degree(&t, &b, DegreeMode::BWeighted).unwrap() - 3.0).abs() < 1e-12);
        assert!(
            (neighbor_degree(&t, &b, DegreeMode::LiteralOverN).unwrap() - 0.75).abs() < 1e-12
        );
    }

    #[test]
    fn heterogeneous_degree_weighted_mean() {
        // degrees 1, 2, 3 with b = (0.5, 0.25, 0.25) -> 1.75
        let probs = vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.5, 0.0, 0.5, 0.0],
            vec![0.25, 0.25, 0.0, 0.5],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let t = TransitionMatrix::new(probs, vec![true; 4]).unwrap();
        let b = crate::mobility::StationaryDistribution::from_raw(vec![0.5, 0.25, 0.25, 0.0]);
        let got = neighbor_degree(&t, &b, DegreeMode::BWeighted).unwrap();
        assert!((got - 1.75).abs() < 1e-12);
    }

    #[test]
    fn junction_binary_depth_two_is_five_thirds() {
        // beta = 2, D = 2 (4 leaves), w = 1: E[L] = (1*1 + 2*2)/3 = 5/3
        let g_h = junction_distance(4, 2.0, 1.0, None).unwrap();
        assert!((g_h - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn junction_single_level_is_w() {
        // all MAPs under one parent: D = 1
        let g_h = junction_distance(2, 2.0, 1.5, None).unwrap();
        assert!((g_h - 1.5).abs() < 1e-12);
    }

    #[test]
    fn junction_override_passthrough() {
        assert_eq!(junction_distance(7, 3.2, 1.0, Some(2.4)).unwrap(), 2.4);
    }

    #[test]
    fn junction_rejects_sub_unit_delta() {
        assert!(junction_distance(4, 0.5, 1.0, None).is_err());
    }

    /// Brute-force LCA enumeration over all ordered leaf pairs of the
    /// complete beta-ary tree of the given depth.
    pub(crate) fn brute_force_junction_level(beta: u64, depth: u32) -> f64 {
        let leaves = beta.pow(depth);
        let mut total = 0.0;
        let mut pairs = 0u64;
        for u in 0..leaves {
            for v in 0..leaves {
                if u == v {
                    continue;
                }
                // climb u and v until their ancestors coincide
                let (mut a, mut b, mut l) = (u, v, 0u32);
                while a != b {
                    a /= beta;
                    b /= beta;
                    l += 1;
                }
                total += l as f64;
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    #[test]
    fn junction_closed_form_matches_enumeration() {
        // exact equality: both sides are single divisions of the same
        // rational number
        for beta in 2u64..=4 {
            for depth in 1u32..=4 {
                let closed = expected_junction_level(beta as u128, depth);
                let brute = brute_force_junction_level(beta, depth);
                assert_eq!(closed, brute, "beta {beta} depth {depth}");
            }
        }
    }

    #[test]
    fn junction_monotone_in_n_for_fixed_branching() {
        let mut prev = 0.0;
        for n in 2..200 {
            let g_h = junction_distance(n, 2.0, 1.0, None).unwrap();
            assert!(g_h >= prev - 1e-12, "n = {n}: {g_h} < {prev}");
            prev = g_h;
        }
    }

    #[test]
    fn junction_below_depth_on_tree_shaped_networks() {
        // when the graph itself is the modeled complete binary tree, the
        // junction distance never exceeds the HA depth
        for depth in 2u32..=3 {
            let leaves = 2usize.pow(depth);
            let internal = 2usize.pow(depth) - 1;
            let n = internal + leaves;
            let mut w = vec![vec![0.0; n]; n];
            for node in 1..n {
                let parent = (node - 1) / 2;
                w[node][parent] = 1.0;
                w[parent][node] = 1.0;
            }
            let mut is_map = vec![false; n];
            for f in is_map.iter_mut().skip(internal) {
                *f = true;
            }
            // ring movement over the leaves
            let mut rates = vec![vec![0.0; n]; n];
            for k in 0..leaves {
                let a = internal + k;
                let b = internal + (k + 1) % leaves;
                rates[a][b] = 1.0;
                rates[b][a] = 1.0;
            }
            let g = NetworkGraph::new(w, is_map.clone(), 0).unwrap();
            let d = all_pairs_distances(&g).unwrap();
            let r = RateMatrix::new(rates, is_map).unwrap();
            let b = stationary_ctmc(&r).unwrap();
            let t = to_transition_matrix(&r).unwrap();
            let w_avg = average_weight(&g, AveragingMode::Edges).unwrap();
            let m = ha_depth(&d, &b, w_avg).unwrap();
            let delta = neighbor_degree(&t, &b, DegreeMode::BWeighted).unwrap();
            let g_h = junction_distance(leaves, delta, w_avg, None).unwrap();
            assert!(
                g_h <= m + 1e-9,
                "depth {depth}: g_h {g_h} exceeds m {m}"
            );
        }
    }

    #[test]
    fn depth_invariant_under_weight_scaling() {
        let weights = vec![
            vec![0.0, 2.0, 1.0],
            vec![2.0, 0.0, 3.0],
            vec![1.0, 3.0, 0.0],
        ];
        let g = NetworkGraph::new(weights, vec![true; 3], 0).unwrap();
        let gs = g.scaled(4.0).unwrap();
        let rates = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        let r = RateMatrix::new(rates, vec![true; 3]).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        for (graph, scaled) in [(&g, &gs)] {
            let d1 = all_pairs_distances(graph).unwrap();
            let d2 = all_pairs_distances(scaled).unwrap();
            let w1 = average_weight(graph, AveragingMode::Edges).unwrap();
            let w2 = average_weight(scaled, AveragingMode::Edges).unwrap();
            let m1 = ha_depth(&d1, &b, w1).unwrap();
            let m2 = ha_depth(&d2, &b, w2).unwrap();
            assert!((m1 - m2).abs() < 1e-12);
        }
    }
}

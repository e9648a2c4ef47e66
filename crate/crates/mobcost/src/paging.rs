//! Paging / location area planning over the MAP set.
//!
//! Optimal area planning is NP-hard. Small instances have few enough head
//! sets that exhaustive selection is cheap, so the planner enumerates them
//! outright; past that it falls back to a deterministic k-medoids style
//! heuristic: heads seeded by farthest-point selection on the distance
//! matrix, every MAP joining its nearest head, heads re-chosen as
//! density-weighted medoids until the objective stops improving, and a
//! head-for-node swap search to escape poor seedings. Ties break toward
//! the lower node index throughout, which makes plans reproducible across
//! runs.

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, NetworkGraph};
use crate::mobility::{StationaryDistribution, TransitionMatrix};

/// A partition of the MAPs into paging areas plus its descriptors.
///
/// `g_c` is the density-weighted mean distance from a MAP to its area head
/// (normalized by `w`), `n_c` the average MAPs per area, `n_d` the area
/// count and `p_cell` the probability that a handover crosses an area
/// boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PagingPlan {
    area_of: Vec<Option<usize>>,
    heads: Vec<usize>,
    pub g_c: f64,
    pub n_c: f64,
    pub n_d: usize,
    pub p_cell: f64,
}

impl PagingPlan {
    pub fn area_of(&self, node: usize) -> Option<usize> {
        self.area_of[node]
    }

    /// Head MA of each area, indexed by area id.
    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn head_of(&self, node: usize) -> Option<usize> {
        self.area_of[node].map(|a| self.heads[a])
    }

    /// MAP members of one area, ascending.
    pub fn members(&self, area: usize) -> Vec<usize> {
        (0..self.area_of.len())
            .filter(|&i| self.area_of[i] == Some(area))
            .collect()
    }
}

/// Density-weighted assignment objective: sum of b_i * dist(i, head(i)).
fn objective(
    maps: &[usize],
    assignment: &[usize],
    heads: &[usize],
    d: &DistanceMatrix,
    b: &StationaryDistribution,
) -> f64 {
    maps.iter()
        .enumerate()
        .map(|(k, &i)| b.prob(i) * d.dist(i, heads[assignment[k]]))
        .sum()
}

fn crossing_probability(
    area_of: &[Option<usize>],
    b: &StationaryDistribution,
    t: &TransitionMatrix,
) -> f64 {
    let n = area_of.len();
    let mut p = 0.0;
    for i in 0..n {
        let (Some(ai), bi) = (area_of[i], b.prob(i)) else {
            continue;
        };
        if bi == 0.0 {
            continue;
        }
        for j in 0..n {
            if area_of[j].is_some() && area_of[j] != Some(ai) {
                p += bi * t.prob(i, j);
            }
        }
    }
    p
}

fn finish_plan(
    g: &NetworkGraph,
    d: &DistanceMatrix,
    b: &StationaryDistribution,
    t: &TransitionMatrix,
    w: f64,
    maps: &[usize],
    assignment: &[usize],
    heads: Vec<usize>,
) -> PagingPlan {
    let mut area_of = vec![None; g.n()];
    for (k, &i) in maps.iter().enumerate() {
        area_of[i] = Some(assignment[k]);
    }
    let obj = objective(maps, assignment, &heads, d, b);
    let n_d = heads.len();
    PagingPlan {
        p_cell: crossing_probability(&area_of, b, t),
        g_c: obj / w,
        n_c: maps.len() as f64 / n_d as f64,
        n_d,
        area_of,
        heads,
    }
}

/// Number of k-subsets, saturating well above the exhaustive-search cap.
fn head_sets(n: usize, k: usize) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i + 1) as u64;
        if acc > 1_000_000 {
            return u64::MAX;
        }
    }
    acc
}

const EXHAUSTIVE_HEAD_SETS: u64 = 10_000;

/// Advance to the next lexicographic k-combination of `0..n`.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Plan `target_areas` paging areas: exhaustively on small instances,
/// with the deterministic seeded heuristic on large ones.
pub fn plan_areas(
    g: &NetworkGraph,
    d: &DistanceMatrix,
    b: &StationaryDistribution,
    t: &TransitionMatrix,
    target_areas: usize,
    w: f64,
) -> Result<PagingPlan> {
    let maps = g.map_indices();
    if target_areas == 0 || target_areas > maps.len() {
        return Err(Error::Paging(format!(
            "target_areas = {target_areas} must be between 1 and the MAP count {}",
            maps.len()
        )));
    }
    if !(w > 0.0) {
        return Err(Error::Paging(format!("w must be positive, got {w}")));
    }

    if head_sets(maps.len(), target_areas) <= EXHAUSTIVE_HEAD_SETS {
        let mut best: Option<(Vec<usize>, f64)> = None;
        let mut idx: Vec<usize> = (0..target_areas).collect();
        loop {
            let candidate: Vec<usize> = idx.iter().map(|&k| maps[k]).collect();
            let assignment = assign_nearest(&maps, &candidate, d);
            let obj = objective(&maps, &assignment, &candidate, d, b);
            let better = match &best {
                None => true,
                Some((_, cur)) => obj < cur - 1e-15,
            };
            if better {
                best = Some((candidate, obj));
            }
            if !next_combination(&mut idx, maps.len()) {
                break;
            }
        }
        let (heads, _) = best.expect("at least one combination");
        let assignment = assign_nearest(&maps, &heads, d);
        return Ok(finish_plan(g, d, b, t, w, &maps, &assignment, heads));
    }

    // farthest-point seeding, started from the lowest-indexed MAP
    let mut heads = vec![maps[0]];
    while heads.len() < target_areas {
        let mut best: Option<(usize, f64)> = None;
        for &i in &maps {
            if heads.contains(&i) {
                continue;
            }
            let nearest = heads
                .iter()
                .map(|&h| d.dist(i, h))
                .fold(f64::INFINITY, f64::min);
            let better = match best {
                None => true,
                Some((_, cur)) => nearest > cur,
            };
            if better {
                best = Some((i, nearest));
            }
        }
        heads.push(best.expect("target_areas <= map count").0);
    }
    heads.sort_unstable();

    let mut assignment = assign_nearest(&maps, &heads, d);
    let mut best_obj = objective(&maps, &assignment, &heads, d, b);
    for _ in 0..500 {
        // alternate assignment and medoid updates until no strict improvement
        loop {
            let new_heads = improve_heads(&maps, &assignment, heads.len(), d, b);
            let new_assignment = assign_nearest(&maps, &new_heads, d);
            let obj = objective(&maps, &new_assignment, &new_heads, d, b);
            if obj < best_obj - 1e-15 {
                heads = new_heads;
                assignment = new_assignment;
                best_obj = obj;
            } else {
                break;
            }
        }
        // escape poor seedings: best single head-for-node swap, if any
        let mut best_swap: Option<(usize, usize, f64)> = None;
        for area in 0..heads.len() {
            for &candidate in &maps {
                if heads.contains(&candidate) {
                    continue;
                }
                let mut trial = heads.clone();
                trial[area] = candidate;
                let trial_assignment = assign_nearest(&maps, &trial, d);
                let obj = objective(&maps, &trial_assignment, &trial, d, b);
                let better = match best_swap {
                    None => obj < best_obj - 1e-15,
                    Some((_, _, cur)) => obj < cur - 1e-15,
                };
                if better {
                    best_swap = Some((area, candidate, obj));
                }
            }
        }
        match best_swap {
            Some((area, candidate, obj)) => {
                heads[area] = candidate;
                heads.sort_unstable();
                assignment = assign_nearest(&maps, &heads, d);
                best_obj = obj;
            }
            None => break,
        }
    }

    Ok(finish_plan(g, d, b, t, w, &maps, &assignment, heads))
}

fn assign_nearest(maps: &[usize], heads: &[usize], d: &DistanceMatrix) -> Vec<usize> {
    maps.iter()
        .map(|&i| {
            let mut best = 0usize;
            for (a, &h) in heads.iter().enumerate() {
                // strict improvement keeps ties at the lower head index
                if d.dist(i, h) < d.dist(i, heads[best]) {
                    best = a;
                }
            }
            best
        })
        .collect()
}

fn improve_heads(
    maps: &[usize],
    assignment: &[usize],
    n_areas: usize,
    d: &DistanceMatrix,
    b: &StationaryDistribution,
) -> Vec<usize> {
    let mut heads = Vec::with_capacity(n_areas);
    for area in 0..n_areas {
        let members: Vec<usize> = maps
            .iter()
            .enumerate()
            .filter(|&(k, _)| assignment[k] == area)
            .map(|(_, &i)| i)
            .collect();
        let mut best = members[0];
        let mut best_cost = f64::INFINITY;
        for &candidate in &members {
            let cost: f64 = members
                .iter()
                .map(|&i| b.prob(i) * d.dist(i, candidate))
                .sum();
            if cost < best_cost - 1e-15 {
                best = candidate;
                best_cost = cost;
            }
        }
        heads.push(best);
    }
    heads
}

/// Compute the plan descriptors for a user-supplied assignment.
///
/// `assignment` maps MAP node index to area id; area ids must be the dense
/// range `0..heads.len()` and every head must belong to its own area.
pub fn plan_from_assignment(
    g: &NetworkGraph,
    d: &DistanceMatrix,
    b: &StationaryDistribution,
    t: &TransitionMatrix,
    assignment: &[(usize, usize)],
    heads: &[usize],
    w: f64,
) -> Result<PagingPlan> {
    if heads.is_empty() {
        return Err(Error::Paging("at least one area head is required".into()));
    }
    if !(w > 0.0) {
        return Err(Error::Paging(format!("w must be positive, got {w}")));
    }
    let maps = g.map_indices();
    let mut area_of = vec![None; g.n()];
    for &(node, area) in assignment {
        if node >= g.n() || !g.is_map(node) {
            return Err(Error::Paging(format!(
                "assignment references node {node}, which is not a MAP"
            )));
        }
        if area >= heads.len() {
            return Err(Error::Paging(format!(
                "area id {area} out of range for {} heads",
                heads.len()
            )));
        }
        if area_of[node].is_some() {
            return Err(Error::Paging(format!("MAP {node} assigned twice")));
        }
        area_of[node] = Some(area);
    }
    for &i in &maps {
        if area_of[i].is_none() {
            return Err(Error::Paging(format!("MAP {i} is not covered by the plan")));
        }
    }
    for (area, &h) in heads.iter().enumerate() {
        if h >= g.n() {
            return Err(Error::Paging(format!("head {h} out of range")));
        }
        if area_of[h] != Some(area) {
            return Err(Error::Paging(format!(
                "head {h} of area {area} does not belong to its own area"
            )));
        }
    }
    let assignment_dense: Vec<usize> = maps.iter().map(|&i| area_of[i].unwrap()).collect();
    Ok(finish_plan(
        g,
        d,
        b,
        t,
        w,
        &maps,
        &assignment_dense,
        heads.to_vec(),
    ))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::{all_pairs_distances, average_weight, AveragingMode};
    use crate::mobility::{stationary_ctmc, to_transition_matrix, RateMatrix};

    /// Two tight triangles joined by one long edge; movement follows the
    /// same shape. Node 0 doubles as the HA. Every node's total outgoing
    /// intensity is 2, so event-weighted and time-weighted averages agree
    /// and the simulator can serve as an oracle for the analytic values.
    pub(crate) fn two_triangle_fixture() -> (NetworkGraph, RateMatrix) {
        let n = 6;
        let mut w = vec![vec![0.0; n]; n];
        let short = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        for &(a, b) in &short {
            w[a][b] = 1.0;
            w[b][a] = 1.0;
        }
        w[2][3] = 5.0;
        w[3][2] = 5.0;
        let mut rates = vec![vec![0.0; n]; n];
        for &(a, b) in &short {
            rates[a][b] = 1.0;
            rates[b][a] = 1.0;
        }
        // the bridge endpoints trade intra-triangle intensity for the
        // bridge so that every row still sums to 2
        for (bridge, peers) in [(2usize, [0usize, 1usize]), (3, [4, 5])] {
            rates[bridge][peers[0]] = 0.875;
            rates[bridge][peers[1]] = 0.875;
        }
        rates[2][3] = 0.25;
        rates[3][2] = 0.25;
        let g = NetworkGraph::new(w, vec![true; n], 0).unwrap();
        let r = RateMatrix::new(rates, vec![true; n]).unwrap();
        (g, r)
    }

    struct Model {
        g: NetworkGraph,
        d: crate::graph::DistanceMatrix,
        b: StationaryDistribution,
        t: TransitionMatrix,
        w: f64,
    }

    fn model(g: NetworkGraph, r: RateMatrix) -> Model {
        let d = all_pairs_distances(&g).unwrap();
        let b = stationary_ctmc(&r).unwrap();
        let t = to_transition_matrix(&r).unwrap();
        let w = average_weight(&g, AveragingMode::Edges).unwrap();
        Model { g, d, b, t, w }
    }

    #[test]
    fn single_area_has_zero_crossing() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        let plan = plan_areas(&m.g, &m.d, &m.b, &m.t, 1, m.w).unwrap();
        assert_eq!(plan.n_d, 1);
        assert_eq!(plan.p_cell, 0.0);
        assert!(plan.g_c > 0.0);
        // the single head is the density-weighted medoid
        let maps = m.g.map_indices();
        let best: f64 = maps
            .iter()
            .map(|&h| {
                maps.iter()
                    .map(|&i| m.b.prob(i) * m.d.dist(i, h))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((plan.g_c - best / m.w).abs() < 1e-12);
    }

    #[test]
    fn singleton_areas_have_zero_radius_and_full_crossing() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        let plan = plan_areas(&m.g, &m.d, &m.b, &m.t, 6, m.w).unwrap();
        assert_eq!(plan.n_d, 6);
        assert_eq!(plan.g_c, 0.0);
        assert!((plan.n_c - 1.0).abs() < 1e-12);
        // zero-diagonal chain: every handover crosses
        assert!((plan.p_cell - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_clusters_split_into_the_triangles() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        let plan = plan_areas(&m.g, &m.d, &m.b, &m.t, 2, m.w).unwrap();
        assert_eq!(plan.n_d, 2);
        let a0 = plan.area_of(0).unwrap();
        for node in [1, 2] {
            assert_eq!(plan.area_of(node), Some(a0));
        }
        let a3 = plan.area_of(3).unwrap();
        assert_ne!(a0, a3);
        for node in [4, 5] {
            assert_eq!(plan.area_of(node), Some(a3));
        }
        assert!((plan.n_c - 3.0).abs() < 1e-12);

        // crossing mass: only the 2<->3 moves leave an area
        let expect: f64 = m.b.prob(2) * m.t.prob(2, 3) + m.b.prob(3) * m.t.prob(3, 2);
        assert!((plan.p_cell - expect).abs() < 1e-12);
    }

    /// Exhaustive optimum over all head pairs with nearest assignment.
    pub(crate) fn brute_force_objective(
        maps: &[usize],
        k: usize,
        d: &crate::graph::DistanceMatrix,
        b: &StationaryDistribution,
    ) -> f64 {
        fn combos(maps: &[usize], k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for (i, &h) in maps.iter().enumerate() {
                for mut rest in combos(&maps[i + 1..], k - 1) {
                    let mut v = vec![h];
                    v.append(&mut rest);
                    out.push(v);
                }
            }
            out
        }
        combos(maps, k)
            .into_iter()
            .map(|heads| {
                maps.iter()
                    .map(|&i| {
                        b.prob(i)
                            * heads
                                .iter()
                                .map(|&h| d.dist(i, h))
                                .fold(f64::INFINITY, f64::min)
                    })
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn heuristic_matches_brute_force_on_two_triangles() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        let plan = plan_areas(&m.g, &m.d, &m.b, &m.t, 2, m.w).unwrap();
        let maps = m.g.map_indices();
        let best = brute_force_objective(&maps, 2, &m.d, &m.b);
        assert!((plan.g_c * m.w - best).abs() < 1e-12);
    }

    #[test]
    fn explicit_plan_matches_heuristic_numbers() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        let auto = plan_areas(&m.g, &m.d, &m.b, &m.t, 2, m.w).unwrap();
        let assignment: Vec<(usize, usize)> = vec![(0, 0), (1, 0), (2, 0), (3, 1), (4, 1), (5, 1)];
        let heads = vec![auto.heads()[0], auto.heads()[1]];
        let manual =
            plan_from_assignment(&m.g, &m.d, &m.b, &m.t, &assignment, &heads, m.w).unwrap();
        assert!((manual.g_c - auto.g_c).abs() < 1e-12);
        assert!((manual.p_cell - auto.p_cell).abs() < 1e-12);
        assert_eq!(manual.n_d, auto.n_d);
    }

    #[test]
    fn one_area_headed_by_the_ha_reproduces_depth() {
        // symmetric graph, HA is itself a MAP and the single head: g_c = m
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        let assignment: Vec<(usize, usize)> = (0..6).map(|i| (i, 0)).collect();
        let plan = plan_from_assignment(&m.g, &m.d, &m.b, &m.t, &assignment, &[0], m.w).unwrap();
        let depth = crate::params::ha_depth(&m.d, &m.b, m.w).unwrap();
        assert!((plan.g_c - depth).abs() < 1e-12);
    }

    #[test]
    fn explicit_plan_validation_errors() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        // head outside its area
        let assignment = vec![(0, 0), (1, 0), (2, 0), (3, 1), (4, 1), (5, 1)];
        assert!(
            plan_from_assignment(&m.g, &m.d, &m.b, &m.t, &assignment, &[0, 2], m.w).is_err()
        );
        // uncovered MAP
        let partial = vec![(0, 0), (1, 0), (2, 0), (3, 1), (4, 1)];
        assert!(plan_from_assignment(&m.g, &m.d, &m.b, &m.t, &partial, &[0, 3], m.w).is_err());
    }

    #[test]
    fn target_areas_bounds_checked() {
        let (g, r) = two_triangle_fixture();
        let m = model(g, r);
        assert!(plan_areas(&m.g, &m.d, &m.b, &m.t, 0, m.w).is_err());
        assert!(plan_areas(&m.g, &m.d, &m.b, &m.t, 7, m.w).is_err());
    }

    #[test]
    fn heuristic_within_ten_percent_of_optimum_on_seed_corpus() {
        // fixed corpus of random dense instances, up to 8 MAPs, 2..3 areas
        let mut worst: f64 = 1.0;
        for seed in 0..24u64 {
            let n = 5 + (seed % 4) as usize; // 5..=8
            let k = 2 + (seed % 2) as usize; // 2..=3
            let mut x = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
            let mut next = move || {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                x
            };
            let mut w = vec![vec![0.0; n]; n];
            let mut rates = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        w[i][j] = ((next() % 9) + 1) as f64 * 0.5;
                        rates[i][j] = ((next() % 9) + 1) as f64 * 0.25;
                    }
                }
            }
            let g = NetworkGraph::new(w, vec![true; n], 0).unwrap();
            let r = RateMatrix::new(rates, vec![true; n]).unwrap();
            let m = model(g, r);
            let plan = plan_areas(&m.g, &m.d, &m.b, &m.t, k, m.w).unwrap();
            let maps = m.g.map_indices();
            let best = brute_force_objective(&maps, k, &m.d, &m.b);
            let heuristic = plan.g_c * m.w;
            if best > 0.0 {
                let ratio = heuristic / best;
                worst = worst.max(ratio);
                assert!(
                    ratio <= 1.10 + 1e-12,
                    "seed {seed}: heuristic {heuristic} vs optimum {best} ({ratio:.3}x)"
                );
            } else {
                assert!(heuristic <= 1e-12);
            }
        }
        println!("worst heuristic/optimum ratio on the corpus: {worst:.4}");
    }
}

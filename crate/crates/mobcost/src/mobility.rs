//! Aggregated mobile-node movement model.
//!
//! Movement is a finite-state continuous-time Markov chain over the MAPs,
//! given as a handover rate matrix. Non-MAP agents take part in routing but
//! never host the mobile, so their rows and columns are identically zero and
//! their stationary probability is exactly 0.

use crate::error::{Error, Result};
use crate::linalg;

/// Handover intensity matrix: entry `(i, j)` is the rate of moves from
/// MAP i to MAP j (events per unit time). Diagonal is zero; non-MAP rows
/// and columns are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    rates: Vec<f64>,
    is_map: Vec<bool>,
}

impl RateMatrix {
    pub fn new(rates: Vec<Vec<f64>>, is_map: Vec<bool>) -> Result<Self> {
        let n = rates.len();
        if n == 0 {
            return Err(Error::Mobility("empty rate matrix".into()));
        }
        if is_map.len() != n {
            return Err(Error::Mobility(format!(
                "MAP flag vector has length {} but the matrix is {}x{}",
                is_map.len(),
                n,
                n
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in rates.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Mobility(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &r) in row.iter().enumerate() {
                if !r.is_finite() || r < 0.0 {
                    return Err(Error::Mobility(format!(
                        "rate[{i}][{j}] = {r} is not a finite non-negative value"
                    )));
                }
                if i == j && r != 0.0 {
                    return Err(Error::Mobility(format!(
                        "diagonal rate[{i}][{i}] must be 0, got {r}"
                    )));
                }
                if (!is_map[i] || !is_map[j]) && r != 0.0 {
                    return Err(Error::Mobility(format!(
                        "rate[{i}][{j}] = {r} involves a non-MAP node; such rows and columns must be zero"
                    )));
                }
                flat.push(r);
            }
        }
        let any_positive = (0..n).any(|i| is_map[i] && rates[i].iter().sum::<f64>() > 0.0);
        let map_count = is_map.iter().filter(|&&m| m).count();
        // a single-MAP network legitimately has no movement at all
        if !any_positive && map_count > 1 {
            return Err(Error::Mobility(
                "at least one MAP row must have a positive handover rate".into(),
            ));
        }
        Ok(RateMatrix {
            n,
            rates: flat,
            is_map,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[from * self.n + to]
    }

    pub fn is_map(&self, node: usize) -> bool {
        self.is_map[node]
    }

    pub fn map_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_map[i]).collect()
    }

    /// Total outgoing intensity of a node.
    pub fn row_sum(&self, node: usize) -> f64 {
        (0..self.n).map(|j| self.rate(node, j)).sum()
    }

    /// Copy with all rates multiplied by `factor` (> 0). The stationary
    /// distribution is invariant under this; the handover rate scales.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::Mobility(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(RateMatrix {
            n: self.n,
            rates: self.rates.iter().map(|r| r * factor).collect(),
            is_map: self.is_map.clone(),
        })
    }
}

/// Row-stochastic transition matrix of the embedded handover chain,
/// restricted to MAP nodes (non-MAP rows are identically zero).
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    probs: Vec<f64>,
    is_map: Vec<bool>,
}

impl TransitionMatrix {
    /// Validate a user-supplied transition matrix (each MAP row must sum to
    /// one within 1e-12, entries in [0, 1]).
    pub fn new(probs: Vec<Vec<f64>>, is_map: Vec<bool>) -> Result<Self> {
        let n = probs.len();
        if n == 0 || is_map.len() != n {
            return Err(Error::Mobility(
                "transition matrix and MAP flags must be square and aligned".into(),
            ));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in probs.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Mobility(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut sum = 0.0;
            for (j, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Mobility(format!(
                        "prob[{i}][{j}] = {p} outside [0,1]"
                    )));
                }
                if (!is_map[i] || !is_map[j]) && p != 0.0 {
                    return Err(Error::Mobility(format!(
                        "prob[{i}][{j}] involves a non-MAP node; must be zero"
                    )));
                }
                sum += p;
                flat.push(p);
            }
            if is_map[i] && (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Mobility(format!(
                    "MAP row {i} sums to {sum}, expected 1"
                )));
            }
            if !is_map[i] && sum != 0.0 {
                return Err(Error::Mobility(format!("non-MAP row {i} must be zero")));
            }
        }
        Ok(TransitionMatrix {
            n,
            probs: flat,
            is_map,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.probs[from * self.n + to]
    }

    pub fn is_map(&self, node: usize) -> bool {
        self.is_map[node]
    }

    pub fn map_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.is_map[i]).collect()
    }
}

/// Probability that the mobile resides under each node; zero on non-MAPs.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    b: Vec<f64>,
}

impl StationaryDistribution {
    #[cfg(test)]
    pub(crate) fn from_raw(b: Vec<f64>) -> Self {
        StationaryDistribution { b }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.b
    }

    pub fn prob(&self, node: usize) -> f64 {
        self.b[node]
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }
}

/// Average handover intensity, call intensity and the mobility ratio
/// `rho = lambda / (lambda + mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityRates {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

/// Normalize each MAP row of the rate matrix into transition probabilities.
/// A MAP with zero outgoing rate would be absorbing and is rejected.
pub fn to_transition_matrix(r: &RateMatrix) -> Result<TransitionMatrix> {
    let n = r.n();
    let mut probs = vec![0.0; n * n];
    for i in 0..n {
        if !r.is_map(i) {
            continue;
        }
        let sum = r.row_sum(i);
        if sum <= 0.0 {
            return Err(Error::AbsorbingMap(i));
        }
        for j in 0..n {
            probs[i * n + j] = r.rate(i, j) / sum;
        }
    }
    Ok(TransitionMatrix {
        n,
        probs,
        is_map: (0..n).map(|i| r.is_map(i)).collect(),
    })
}

/// Strong connectivity of the positive-entry digraph over the given nodes.
fn strongly_connected(nodes: &[usize], entry: impl Fn(usize, usize) -> f64) -> Option<(usize, usize)> {
    if nodes.is_empty() {
        return None;
    }
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..nodes.len() {
                if seen[v] {
                    continue;
                }
                let w = if forward {
                    entry(nodes[u], nodes[v])
                } else {
                    entry(nodes[v], nodes[u])
                };
                if w > 0.0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    if let Some(v) = fwd.iter().position(|&s| !s) {
        return Some((nodes[0], nodes[v]));
    }
    let bwd = reach(false);
    if let Some(v) = bwd.iter().position(|&s| !s) {
        return Some((nodes[v], nodes[0]));
    }
    None
}

/// Period of the chain restricted to `nodes`: gcd of (level difference + 1)
/// over all edges closing against a BFS layering. 1 means aperiodic.
fn chain_period(nodes: &[usize], entry: impl Fn(usize, usize) -> f64) -> usize {
    let k = nodes.len();
    let mut level = vec![usize::MAX; k];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut g = 0usize;
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    while let Some(u) = queue.pop_front() {
        for v in 0..k {
            if entry(nodes[u], nodes[v]) <= 0.0 {
                continue;
            }
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                let diff = level[u] + 1;
                let d = if diff >= level[v] {
                    diff - level[v]
                } else {
                    level[v] - diff
                };
                g = gcd(g, d);
            }
        }
    }
    if g == 0 {
        0
    } else {
        g
    }
}

/// Stationary distribution of the continuous-time chain: solves the global
/// balance equations `b · Q = 0`, `sum(b) = 1` on the MAP-restricted
/// generator. This is the default pipeline; it is immune to periodicity of
/// the embedded discrete chain.
pub fn stationary_ctmc(r: &RateMatrix) -> Result<StationaryDistribution> {
    let maps = r.map_indices();
    if maps.len() == 1 {
        let mut b = vec![0.0; r.n()];
        b[maps[0]] = 1.0;
        return Ok(StationaryDistribution { b });
    }
    if let Some((from, to)) = strongly_connected(&maps, |i, j| r.rate(i, j)) {
        return Err(Error::NotIrreducible(format!(
            "no positive-rate path between MAP {from} and MAP {to}"
        )));
    }
    for &i in &maps {
        if r.row_sum(i) <= 0.0 {
            return Err(Error::AbsorbingMap(i));
        }
    }
    let k = maps.len();
    let mut q = vec![vec![0.0; k]; k];
    for (a, &i) in maps.iter().enumerate() {
        for (b, &j) in maps.iter().enumerate() {
            if a != b {
                q[a][b] = r.rate(i, j);
            }
        }
        q[a][a] = -r.row_sum(i);
    }
    let pi = linalg::stationary_from_balance(&q)
        .ok_or_else(|| Error::Mobility("balance equations are singular".into()))?;
    if pi.iter().any(|&p| p < -1e-9) {
        return Err(Error::Mobility(
            "balance solution has negative components".into(),
        ));
    }
    let mut b = vec![0.0; r.n()];
    for (a, &i) in maps.iter().enumerate() {
        b[i] = pi[a].max(0.0);
    }
    let total: f64 = b.iter().sum();
    for v in &mut b {
        *v /= total;
    }
    Ok(StationaryDistribution { b })
}

const POWER_TOLERANCE: f64 = 1e-12;
const POWER_ITERATION_CAP: usize = 1_000_000;

/// Stationary distribution of a user-supplied discrete transition matrix.
///
/// Requires the MAP-restricted chain to be irreducible and aperiodic; the
/// result is computed twice (power iteration and direct linear solve) and
/// the two must agree. Prefer [`stationary_ctmc`] when a rate matrix is
/// available, since the embedded chain of a two-state alternation is
/// periodic while its continuous-time counterpart is perfectly regular.
pub fn stationary(t: &TransitionMatrix) -> Result<StationaryDistribution> {
    let maps = t.map_indices();
    if let Some((from, to)) = strongly_connected(&maps, |i, j| t.prob(i, j)) {
        return Err(Error::NotIrreducible(format!(
            "no positive-probability path between MAP {from} and MAP {to}"
        )));
    }
    let period = chain_period(&maps, |i, j| t.prob(i, j));
    if period > 1 {
        return Err(Error::PeriodicChain(period));
    }
    let k = maps.len();
    // power iteration
    let mut pi = vec![1.0 / k as f64; k];
    let mut converged = false;
    let mut residual = f64::INFINITY;
    for _ in 0..POWER_ITERATION_CAP {
        let mut next = vec![0.0; k];
        for (a, &i) in maps.iter().enumerate() {
            for (b, &j) in maps.iter().enumerate() {
                next[b] += pi[a] * t.prob(i, j);
            }
        }
        let sum: f64 = next.iter().sum();
        for v in &mut next {
            *v /= sum;
        }
        residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if residual < POWER_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergent {
            iterations: POWER_ITERATION_CAP,
            residual,
        });
    }
    // independent route: solve pi (P - I) = 0 directly
    let mut m = vec![vec![0.0; k]; k];
    for (a, &i) in maps.iter().enumerate() {
        for (b, &j) in maps.iter().enumerate() {
            m[a][b] = t.prob(i, j) - if a == b { 1.0 } else { 0.0 };
        }
    }
    let direct = linalg::stationary_from_balance(&m)
        .ok_or_else(|| Error::Mobility("stationary system is singular".into()))?;
    for (a, &p) in pi.iter().enumerate() {
        if (p - direct[a]).abs() > 1e-9 {
            return Err(Error::Mobility(format!(
                "power iteration and linear solve disagree at state {a}: {p} vs {}",
                direct[a]
            )));
        }
    }
    let mut b = vec![0.0; t.n()];
    for (a, &i) in maps.iter().enumerate() {
        b[i] = pi[a];
    }
    Ok(StationaryDistribution { b })
}

/// Average handover rate `lambda` (density-weighted over MAPs), call rate
/// `mu` and the mobility ratio. `mu = 0` yields `rho = 1`, which is legal
/// but degenerate: paging terms vanish and tracking chains never reset.
/// Callers that care should warn; see [`MobilityRates`].
pub fn mobility_rates(
    r: &RateMatrix,
    b: &StationaryDistribution,
    mu: f64,
) -> Result<MobilityRates> {
    if !(mu >= 0.0) {
        return Err(Error::Mobility(format!("mu must be non-negative, got {mu}")));
    }
    if b.n() != r.n() {
        return Err(Error::Mobility(
            "stationary vector and rate matrix sizes differ".into(),
        ));
    }
    let lambda: f64 = (0..r.n()).map(|i| b.prob(i) * r.row_sum(i)).sum();
    if lambda + mu <= 0.0 {
        return Err(Error::UndefinedMobilityRatio);
    }
    Ok(MobilityRates {
        lambda,
        mu,
        rho: lambda / (lambda + mu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rates(rows: Vec<Vec<f64>>) -> RateMatrix {
        let n = rows.len();
        RateMatrix::new(rows, vec![true; n]).unwrap()
    }

    #[test]
    fn transition_rows_normalize() {
        let t = to_transition_matrix(&rates(vec![vec![0.0, 2.0], vec![1.0, 0.0]])).unwrap();
        assert_eq!(t.prob(0, 1), 1.0);
        assert_eq!(t.prob(1, 0), 1.0);
    }

    #[test]
    fn equal_split_rows() {
        let t = to_transition_matrix(&rates(vec![
            vec![0.0, 1.0, 1.0],
            vec![2.0, 0.0, 2.0],
            vec![3.0, 3.0, 0.0],
        ]))
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.0 } else { 0.5 };
                assert!((t.prob(i, j) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn random_rows_sum_to_one() {
        let mut rows = vec![vec![0.0; 5]; 5];
        let mut x = 7u64;
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
                    rows[i][j] = ((x >> 33) % 100 + 1) as f64 / 10.0;
                }
            }
        }
        let t = to_transition_matrix(&rates(rows)).unwrap();
        for i in 0..5 {
            let s: f64 = (0..5).map(|j| t.prob(i, j)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn absorbing_map_rejected() {
        let r = RateMatrix::new(
            vec![vec![0.0, 1.0], vec![0.0, 0.0]],
            vec![true, true],
        )
        .unwrap();
        assert!(matches!(to_transition_matrix(&r), Err(Error::AbsorbingMap(1))));
        assert!(matches!(stationary_ctmc(&r), Err(Error::NotIrreducible(_))));
    }

    #[test]
    fn two_state_ctmc_sidesteps_periodicity() {
        // embedded chain alternates (periodic); continuous time gives (1/3, 2/3)
        let r = rates(vec![vec![0.0, 2.0], vec![1.0, 0.0]]);
        let b = stationary_ctmc(&r).unwrap();
        assert!((b.prob(0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((b.prob(1) - 2.0 / 3.0).abs() < 1e-12);

        let t = to_transition_matrix(&r).unwrap();
        assert!(matches!(stationary(&t), Err(Error::PeriodicChain(2))));
    }

    #[test]
    fn symmetric_three_state_is_uniform() {
        let t = to_transition_matrix(&rates(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]))
        .unwrap();
        let b = stationary(&t).unwrap();
        for i in 0..3 {
            assert!((b.prob(i) - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn six_state_matches_matrix_power_oracle() {
        // arbitrary irreducible aperiodic chain; oracle: repeated squaring
        // of the transition matrix to the 2^64 power
        let mut rows = vec![vec![0.0; 6]; 6];
        let mut x = 42u64;
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    rows[i][j] = ((x >> 33) % 9 + 1) as f64;
                }
            }
            // self-loop via rates is not possible; aperiodicity comes from
            // the dense positive structure instead
        }
        let r = rates(rows);
        let t = to_transition_matrix(&r).unwrap();
        let b = stationary(&t).unwrap();

        let mut p: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| t.prob(i, j)).collect())
            .collect();
        for _ in 0..64 {
            let mut sq = vec![vec![0.0; 6]; 6];
            for i in 0..6 {
                for k in 0..6 {
                    let pik = p[i][k];
                    if pik == 0.0 {
                        continue;
                    }
                    for j in 0..6 {
                        sq[i][j] += pik * p[k][j];
                    }
                }
            }
            // renormalize rows against numeric drift
            for row in &mut sq {
                let s: f64 = row.iter().sum();
                for v in row.iter_mut() {
                    *v /= s;
                }
            }
            p = sq;
        }
        for j in 0..6 {
            assert!(
                (b.prob(j) - p[0][j]).abs() < 1e-10,
                "state {j}: {} vs oracle {}",
                b.prob(j),
                p[0][j]
            );
        }
    }

    #[test]
    fn ctmc_satisfies_global_balance() {
        for seed in 0..20u64 {
            let n = 4 + (seed % 4) as usize;
            let mut rows = vec![vec![0.0; n]; n];
            let mut x = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(3);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        x ^= x << 13;
                        x ^= x >> 7;
                        x ^= x << 17;
                        rows[i][j] = ((x % 50) + 1) as f64 / 7.0;
                    }
                }
            }
            let r = rates(rows);
            let b = stationary_ctmc(&r).unwrap();
            for j in 0..n {
                let inflow: f64 = (0..n).map(|i| b.prob(i) * r.rate(i, j)).sum();
                let outflow = b.prob(j) * r.row_sum(j);
                assert!(
                    (inflow - outflow).abs() < 1e-9,
                    "seed {seed} node {j}: {inflow} vs {outflow}"
                );
            }
        }
    }

    #[test]
    fn rate_scaling_preserves_b_and_scales_lambda() {
        let r = rates(vec![
            vec![0.0, 1.0, 2.0],
            vec![3.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let b = stationary_ctmc(&r).unwrap();
        let rs = r.scaled(3.5).unwrap();
        let bs = stationary_ctmc(&rs).unwrap();
        for i in 0..3 {
            assert!((b.prob(i) - bs.prob(i)).abs() < 1e-12);
        }
        let m = mobility_rates(&r, &b, 1.0).unwrap();
        let ms = mobility_rates(&rs, &bs, 1.0).unwrap();
        assert!((ms.lambda - 3.5 * m.lambda).abs() < 1e-9);
    }

    #[test]
    fn mobility_rates_examples() {
        // uniform b over 2 MAPs, rowsums {1,1}, mu = 1 -> lambda = 1, rho = 0.5
        let r = rates(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let b = stationary_ctmc(&r).unwrap();
        let m = mobility_rates(&r, &b, 1.0).unwrap();
        assert!((m.lambda - 1.0).abs() < 1e-12);
        assert!((m.rho - 0.5).abs() < 1e-12);

        // b = (1/3, 2/3), rowsums (3, 1.5), mu = 2 -> lambda = 2, rho = 0.5
        let r2 = rates(vec![vec![0.0, 3.0], vec![1.5, 0.0]]);
        let b2 = stationary_ctmc(&r2).unwrap();
        assert!((b2.prob(0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((b2.prob(1) - 2.0 / 3.0).abs() < 1e-12);
        let m2 = mobility_rates(&r2, &b2, 2.0).unwrap();
        assert!((m2.lambda - 2.0).abs() < 1e-12);
        assert!((m2.rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mu_zero_gives_rho_one() {
        let r = rates(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let b = stationary_ctmc(&r).unwrap();
        let m = mobility_rates(&r, &b, 0.0).unwrap();
        assert_eq!(m.rho, 1.0);
    }

    #[test]
    fn non_map_rows_must_be_zero() {
        let bad = RateMatrix::new(
            vec![
                vec![0.0, 1.0, 0.5],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ],
            vec![true, true, false],
        );
        assert!(bad.is_err());
        let ok = RateMatrix::new(
            vec![
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0],
            ],
            vec![true, true, false],
        )
        .unwrap();
        let b = stationary_ctmc(&ok).unwrap();
        assert_eq!(b.prob(2), 0.0);
        assert!((b.prob(0) - 0.5).abs() < 1e-12);
    }
}

//! Tracking-chain process: exact state probabilities and the optimal chain
//! length.
//!
//! A tracking strategy lets up to `H` consecutive handovers only chain the
//! old MAP to the new one; the `H+1`-st forces a normal handover that
//! refreshes the Central Agent. A delivered call walks the chain hop by hop
//! and also refreshes the CA. The chain length right before an event is a
//! Markov chain on `{0, ..., H}`:
//!
//! - with probability `rho` the event is a handover: below `H` it is a
//!   tracking handover growing the chain by one, except that with
//!   probability `p_loop` the mobile returned to the previous MAP and the
//!   chain pops instead; at `H` it is a normal handover resetting to 0;
//! - with probability `1 - rho` the event is a call, resetting to 0.
//!
//! Event types are independent of the state, so the chain-length
//! distribution seen by a handover or by a call is the unconditional
//! stationary distribution. Everything here is an exact linear-system
//! solution; the Monte-Carlo counterpart lives in the simulator and serves
//! as the independent oracle.

use crate::cost::{cost, CostBreakdown, CostClassWeights, CostConstants, Strategy, StrategyInputs};
use crate::error::{Error, Result};
use crate::linalg;

/// Chain-length policy of a tracking strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingPolicy {
    h: u32,
    p_loop: f64,
}

impl TrackingPolicy {
    /// `h` is the maximum chain length before a forced normal handover
    /// (`0` degenerates to pure normal handovers); `p_loop` the probability
    /// that a handover returns to the immediately previous MAP.
    pub fn new(h: u32, p_loop: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_loop) {
            return Err(Error::Tracking(format!(
                "p_loop = {p_loop} outside [0, 1)"
            )));
        }
        Ok(TrackingPolicy { h, p_loop })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn p_loop(&self) -> f64 {
        self.p_loop
    }
}

/// Stationary statistics of the chain process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStatistics {
    /// Probability that a given handover is a normal handover.
    pub p_h: f64,
    /// Probability that the chain is empty when a call arrives.
    pub p_0: f64,
    /// Expected chain length (forwarding hops) when a call arrives.
    pub mh_r: f64,
}

impl ChainStatistics {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_h", self.p_h), ("p_0", self.p_0)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Tracking(format!("{name} = {v} outside [0,1]")));
            }
        }
        if !(self.mh_r >= 0.0) {
            return Err(Error::Tracking(format!(
                "mh_r = {} must be non-negative",
                self.mh_r
            )));
        }
        Ok(())
    }
}

/// Stationary distribution of the chain length at event times.
pub fn chain_distribution(policy: &TrackingPolicy, rho: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Tracking(format!("rho = {rho} outside [0,1]")));
    }
    let h = policy.h as usize;
    if h == 0 {
        return Ok(vec![1.0]);
    }
    let k = h + 1;
    let p_loop = policy.p_loop;
    // transition matrix of the state seen at successive events
    let mut t = vec![vec![0.0; k]; k];
    for s in 0..k {
        t[s][0] += 1.0 - rho; // call resets
        if s == h {
            t[s][0] += rho; // forced normal handover
        } else {
            t[s][s + 1] += rho * (1.0 - p_loop);
            t[s][s.saturating_sub(1)] += rho * p_loop;
        }
    }
    let mut balance = t;
    for (s, row) in balance.iter_mut().enumerate() {
        row[s] -= 1.0;
    }
    let pi = linalg::stationary_from_balance(&balance)
        .ok_or_else(|| Error::Tracking("chain balance equations are singular".into()))?;
    Ok(pi.into_iter().map(|p| p.max(0.0)).collect())
}

/// Exact chain statistics for a policy at mobility ratio `rho`.
pub fn chain_statistics(policy: &TrackingPolicy, rho: f64) -> Result<ChainStatistics> {
    let pi = chain_distribution(policy, rho)?;
    let h = policy.h as usize;
    Ok(ChainStatistics {
        p_h: pi[h],
        p_0: pi[0],
        mh_r: pi.iter().enumerate().map(|(s, p)| s as f64 * p).sum(),
    })
}

/// Estimate the loop-return probability from the movement model: the
/// density-weighted chance that two consecutive handovers land back on the
/// starting MAP.
pub fn loop_probability(
    t: &crate::mobility::TransitionMatrix,
    b: &crate::mobility::StationaryDistribution,
) -> f64 {
    let n = t.n();
    let mut p = 0.0;
    for i in 0..n {
        let bi = b.prob(i);
        if bi == 0.0 {
            continue;
        }
        for j in 0..n {
            p += bi * t.prob(i, j) * t.prob(j, i);
        }
    }
    p
}

/// Exhaustive search for the cost-minimizing chain length.
///
/// Evaluates every `H` in `0..=h_max`, refreshing the chain statistics and
/// the strategy cost, and returns the smallest minimizer. Deterministic.
pub fn optimize_h(
    strategy: Strategy,
    base: &StrategyInputs,
    constants: &CostConstants,
    weights: &CostClassWeights,
    h_max: u32,
    p_loop: f64,
) -> Result<(u32, ChainStatistics, CostBreakdown)> {
    if !strategy.is_tracking() {
        return Err(Error::Tracking(format!(
            "optimize_h applies to tracking strategies, got {strategy}"
        )));
    }
    let mut best: Option<(u32, ChainStatistics, CostBreakdown)> = None;
    for h in 0..=h_max {
        let policy = TrackingPolicy::new(h, p_loop)?;
        let stats = chain_statistics(&policy, base.rho)?;
        let mut inputs = base.clone();
        inputs.chain = Some(stats);
        let breakdown = cost(strategy, &inputs, constants, weights)?;
        let better = match &best {
            None => true,
            Some((_, _, b)) => breakdown.total < b.total,
        };
        if better {
            best = Some((h, stats, breakdown));
        }
    }
    Ok(best.expect("h grid is never empty"))
}

/// Diagnostic cost curve over the integer chain-length grid. The returned
/// optimum always comes from [`optimize_h`]; this is for plotting only.
pub fn h_cost_curve(
    strategy: Strategy,
    base: &StrategyInputs,
    constants: &CostConstants,
    weights: &CostClassWeights,
    h_max: u32,
    p_loop: f64,
) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::with_capacity(h_max as usize + 1);
    for h in 0..=h_max {
        let policy = TrackingPolicy::new(h, p_loop)?;
        let stats = chain_statistics(&policy, base.rho)?;
        let mut inputs = base.clone();
        inputs.chain = Some(stats);
        out.push((h, cost(strategy, &inputs, constants, weights)?.total));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent Monte-Carlo of the chain state machine.
    pub(crate) fn simulate_chain(
        policy: &TrackingPolicy,
        rho: f64,
        events: u64,
        seed: u64,
    ) -> (ChainStatistics, f64, f64, f64) {
        let mut state = 0u32;
        let mut x = seed | 1;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        let (mut handovers, mut normals, mut calls) = (0u64, 0u64, 0u64);
        let (mut empty_at_call, mut chain_sum) = (0u64, 0u64);
        for _ in 0..events {
            if next() < rho {
                handovers += 1;
                if state == policy.h() {
                    normals += 1;
                    state = 0;
                } else if next() < policy.p_loop() {
                    state = state.saturating_sub(1);
                } else {
                    state += 1;
                }
            } else {
                calls += 1;
                if state == 0 {
                    empty_at_call += 1;
                }
                chain_sum += state as u64;
                state = 0;
            }
        }
        let p_h = normals as f64 / handovers.max(1) as f64;
        let p_0 = empty_at_call as f64 / calls.max(1) as f64;
        let mh_r = chain_sum as f64 / calls.max(1) as f64;
        // binomial standard errors for the two probabilities
        let se_ph = (p_h * (1.0 - p_h) / handovers.max(1) as f64).sqrt();
        let se_p0 = (p_0 * (1.0 - p_0) / calls.max(1) as f64).sqrt();
        let se_mh = {
            // crude second-moment estimate re-running is avoided; bound by H
            let h = policy.h() as f64;
            (h * h / calls.max(1) as f64).sqrt()
        };
        (ChainStatistics { p_h, p_0, mh_r }, se_ph, se_p0, se_mh)
    }

    #[test]
    fn h_zero_degenerates() {
        let stats = chain_statistics(&TrackingPolicy::new(0, 0.0).unwrap(), 0.7).unwrap();
        assert_eq!((stats.p_h, stats.p_0, stats.mh_r), (1.0, 1.0, 0.0));
    }

    #[test]
    fn h2_rho_half_exact_solution() {
        // pi = (4/7, 2/7, 1/7)
        let pi = chain_distribution(&TrackingPolicy::new(2, 0.0).unwrap(), 0.5).unwrap();
        assert!((pi[0] - 4.0 / 7.0).abs() < 1e-12);
        assert!((pi[1] - 2.0 / 7.0).abs() < 1e-12);
        assert!((pi[2] - 1.0 / 7.0).abs() < 1e-12);
        let stats = chain_statistics(&TrackingPolicy::new(2, 0.0).unwrap(), 0.5).unwrap();
        assert!((stats.p_h - 1.0 / 7.0).abs() < 1e-12);
        assert!((stats.p_0 - 4.0 / 7.0).abs() < 1e-12);
        assert!((stats.mh_r - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn chain_distribution_sums_to_one_and_balances() {
        for &(h, rho, p_loop) in &[(3u32, 0.4, 0.0), (5, 0.8, 0.2), (8, 0.95, 0.35)] {
            let policy = TrackingPolicy::new(h, p_loop).unwrap();
            let pi = chain_distribution(&policy, rho).unwrap();
            let sum: f64 = pi.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            // re-apply the transition law; the distribution must be fixed
            let k = h as usize + 1;
            let mut next = vec![0.0; k];
            for s in 0..k {
                next[0] += pi[s] * (1.0 - rho);
                if s == h as usize {
                    next[0] += pi[s] * rho;
                } else {
                    next[s + 1] += pi[s] * rho * (1.0 - p_loop);
                    next[s.saturating_sub(1)] += pi[s] * rho * p_loop;
                }
            }
            for s in 0..k {
                assert!((next[s] - pi[s]).abs() < 1e-9, "state {s}");
            }
        }
    }

    #[test]
    fn matches_monte_carlo_oracle() {
        let policy = TrackingPolicy::new(2, 0.0).unwrap();
        let exact = chain_statistics(&policy, 0.5).unwrap();
        let (mc, se_ph, se_p0, se_mh) = simulate_chain(&policy, 0.5, 10_000_000, 0xFEED);
        assert!((mc.p_h - exact.p_h).abs() < 3.0 * se_ph, "p_h");
        assert!((mc.p_0 - exact.p_0).abs() < 3.0 * se_p0, "p_0");
        assert!((mc.mh_r - exact.mh_r).abs() < 3.0 * se_mh, "mh_r");
    }

    #[test]
    fn loop_removal_matches_monte_carlo() {
        let policy = TrackingPolicy::new(4, 0.3).unwrap();
        let exact = chain_statistics(&policy, 0.8).unwrap();
        let (mc, se_ph, se_p0, se_mh) = simulate_chain(&policy, 0.8, 10_000_000, 0xBEEF);
        assert!((mc.p_h - exact.p_h).abs() < 3.0 * se_ph);
        assert!((mc.p_0 - exact.p_0).abs() < 3.0 * se_p0);
        assert!((mc.mh_r - exact.mh_r).abs() < 3.0 * se_mh);
    }

    #[test]
    fn rho_to_zero_empties_the_chain() {
        let stats = chain_statistics(&TrackingPolicy::new(5, 0.0).unwrap(), 1e-6).unwrap();
        assert!(stats.p_0 > 0.999_99);
        assert!(stats.mh_r < 1e-5);
    }

    #[test]
    fn mh_r_monotone_in_h() {
        let mut prev = 0.0;
        for h in 0..12 {
            let stats = chain_statistics(&TrackingPolicy::new(h, 0.0).unwrap(), 0.7).unwrap();
            assert!(stats.mh_r >= prev - 1e-12, "h = {h}");
            prev = stats.mh_r;
        }
    }

    #[test]
    fn loop_removal_never_lengthens_the_chain() {
        for h in 1..10 {
            let plain = chain_statistics(&TrackingPolicy::new(h, 0.0).unwrap(), 0.8).unwrap();
            let looped = chain_statistics(&TrackingPolicy::new(h, 0.25).unwrap(), 0.8).unwrap();
            assert!(looped.mh_r <= plain.mh_r + 1e-12, "h = {h}");
        }
    }

    #[test]
    fn loop_probability_of_symmetric_pair_is_one() {
        // two MAPs bouncing: every second handover returns
        let r = crate::mobility::RateMatrix::new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![true; 2],
        )
        .unwrap();
        let t = crate::mobility::to_transition_matrix(&r).unwrap();
        let b = crate::mobility::stationary_ctmc(&r).unwrap();
        assert!((loop_probability(&t, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimizer_prefers_long_chains_when_updates_dominate() {
        let mut c = CostConstants::mipv4();
        c.c_u = 100_000.0;
        let base = StrategyInputs::new(0.9, 5.0, 2.0, 1.5);
        let w = CostClassWeights::default();
        let (h_star, _, _) =
            optimize_h(Strategy::WirelessTracking, &base, &c, &w, 12, 0.0).unwrap();
        assert_eq!(h_star, 12);

        // scaling c_u up by 100x never lowers the optimum
        let c1 = CostConstants::mipv4();
        let mut c2 = c1;
        c2.c_u *= 100.0;
        let (h1, _, _) = optimize_h(Strategy::WirelessTracking, &base, &c1, &w, 12, 0.0).unwrap();
        let (h2, _, _) = optimize_h(Strategy::WirelessTracking, &base, &c2, &w, 12, 0.0).unwrap();
        assert!(h2 >= h1);
    }

    #[test]
    fn optimizer_prefers_no_chain_when_calls_dominate() {
        let base = StrategyInputs::new(0.01, 5.0, 2.0, 1.5);
        let (h_star, stats, _) = optimize_h(
            Strategy::WiredTracking,
            &base,
            &CostConstants::mipv4(),
            &CostClassWeights::default(),
            10,
            0.0,
        )
        .unwrap();
        assert_eq!(h_star, 0);
        assert_eq!(stats.p_h, 1.0);
    }

    #[test]
    fn optimizer_rejects_non_tracking_strategies() {
        let base = StrategyInputs::new(0.5, 3.0, 2.0, 1.5);
        assert!(optimize_h(
            Strategy::Centralized,
            &base,
            &CostConstants::mipv4(),
            &CostClassWeights::default(),
            4,
            0.0
        )
        .is_err());
    }
}

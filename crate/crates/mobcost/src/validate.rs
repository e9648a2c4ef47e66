//! Built-in analytic-vs-simulated comparison suite behind `mobcost
//! validate`.
//!
//! Each check simulates a shipped fixture and compares one empirical
//! estimator against its analytic counterpart: stationary occupancy, the
//! mobility ratio, the handover distance, the boundary-crossing
//! probability and the chain statistics at three standard errors, and the
//! centralized / hierarchical mean event costs at five percent. The
//! fixtures use equal per-MAP handover intensities so event averages and
//! time averages coincide, which is what the closed forms assume.

use crate::cost::{cost, Strategy};
use crate::error::Result;
use crate::graph::NetworkGraph;
use crate::mobility::RateMatrix;
use crate::pipeline::{PipelineOptions, ScenarioModel};
use crate::sim::{run, SimConfig};
use crate::tracking::{chain_statistics, TrackingPolicy};

#[derive(Debug, Clone)]
pub struct Check {
    pub quantity: String,
    pub fixture: &'static str,
    pub analytic: f64,
    pub empirical: f64,
    pub tolerance: String,
    pub pass: bool,
}

fn se_check(
    quantity: String,
    fixture: &'static str,
    analytic: f64,
    estimate: crate::sim::Estimate,
    sigmas: f64,
) -> Check {
    Check {
        quantity,
        fixture,
        analytic,
        empirical: estimate.value,
        tolerance: format!("{sigmas} se ({:.3e})", sigmas * estimate.std_error),
        pass: estimate.within(analytic, sigmas),
    }
}

fn rel_check(
    quantity: String,
    fixture: &'static str,
    analytic: f64,
    empirical: f64,
    rel_tol: f64,
) -> Check {
    let rel = (empirical - analytic).abs() / analytic.abs().max(1e-12);
    Check {
        quantity,
        fixture,
        analytic,
        empirical,
        tolerance: format!("{}%", rel_tol * 100.0),
        pass: rel <= rel_tol,
    }
}

/// HA above two hub levels above a ring of 4 MAPs; every MAP has total
/// outgoing intensity 1.
fn three_level_fixture() -> (NetworkGraph, RateMatrix) {
    let n = 7;
    let mut w = vec![vec![0.0; n]; n];
    let links = [(0usize, 1usize), (1, 2)];
    for &(a, b) in &links {
        w[a][b] = 1.0;
        w[b][a] = 1.0;
    }
    for leaf in 3..n {
        w[2][leaf] = 1.0;
        w[leaf][2] = 1.0;
    }
    let mut is_map = vec![false; n];
    for f in is_map.iter_mut().skip(3) {
        *f = true;
    }
    let mut rates = vec![vec![0.0; n]; n];
    for leaf in 3..n {
        let next = if leaf == n - 1 { 3 } else { leaf + 1 };
        rates[leaf][next] = 0.5;
        rates[next][leaf] = 0.5;
    }
    (
        NetworkGraph::new(w, is_map.clone(), 0).unwrap(),
        RateMatrix::new(rates, is_map).unwrap(),
    )
}

/// Two tight triangles joined by one long edge; movement follows the
/// edges, with every row of the rate matrix summing to 2 so that event
/// averages match the density-weighted closed forms.
fn two_cluster_fixture() -> (NetworkGraph, RateMatrix) {
    let n = 6;
    let mut w = vec![vec![0.0; n]; n];
    let short = [(0usize, 1usize), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
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
    for (bridge, peers) in [(2usize, [0usize, 1usize]), (3, [4, 5])] {
        rates[bridge][peers[0]] = 0.875;
        rates[bridge][peers[1]] = 0.875;
    }
    rates[2][3] = 0.25;
    rates[3][2] = 0.25;
    (
        NetworkGraph::new(w, vec![true; n], 0).unwrap(),
        RateMatrix::new(rates, vec![true; n]).unwrap(),
    )
}

/// Unidirectional 5-ring: no returns, so physical loop removal never fires.
fn ring_fixture() -> (NetworkGraph, RateMatrix) {
    let n = 5;
    let mut w = vec![vec![0.0; n]; n];
    let mut rates = vec![vec![0.0; n]; n];
    for i in 0..n {
        let next = (i + 1) % n;
        w[i][next] = 1.0;
        w[next][i] = 1.0;
        rates[i][next] = 1.0;
    }
    (
        NetworkGraph::new(w, vec![true; n], 0).unwrap(),
        RateMatrix::new(rates, vec![true; n]).unwrap(),
    )
}

/// Run every comparison; `horizon` is the event count of the statistical
/// checks (cost checks run at horizon / 10, minimum 100k as specified).
pub fn run_suite(seed: u64, horizon: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let sigmas = 3.0;

    // fixture 1: deep tree; occupancy, rho, g_t, centralized + hierarchical costs
    {
        let (g, r) = three_level_fixture();
        let mu = 0.6;
        let model = ScenarioModel::build(g.clone(), r.clone(), mu, &PipelineOptions::default())?;
        let cfg = SimConfig::new(Strategy::Centralized, seed, horizon);
        let report = run(&g, &r, mu, &cfg)?;

        for (i, est) in report.occupancy.iter().enumerate() {
            if g.is_map(i) {
                checks.push(se_check(
                    format!("occupancy[{i}]"),
                    "deep-tree",
                    model.stationary.prob(i),
                    *est,
                    sigmas,
                ));
            }
        }
        checks.push(se_check(
            "rho".into(),
            "deep-tree",
            model.mobility.rho,
            report.rho,
            sigmas,
        ));
        checks.push(se_check(
            "g_t".into(),
            "deep-tree",
            model.params.g_t,
            report.g_t.expect("handovers occurred"),
            sigmas,
        ));

        let cost_horizon = (horizon / 10).max(100_000);
        let inputs = model.strategy_inputs(None, false);
        for strategy in [Strategy::Centralized, Strategy::Hierarchical] {
            let cfg = SimConfig::new(strategy, seed + 7, cost_horizon);
            let report = run(&g, &r, mu, &cfg)?;
            let analytic = cost(strategy, &inputs, &cfg.constants, &cfg.weights)?;
            checks.push(rel_check(
                "mean_total".into(),
                match strategy {
                    Strategy::Centralized => "deep-tree/centralized",
                    _ => "deep-tree/hierarchical",
                },
                analytic.total,
                report.mean_total.value,
                0.05,
            ));
        }
    }

    // fixture 2: two clusters; boundary crossing and handover distance
    {
        let (g, r) = two_cluster_fixture();
        let mu = 0.8;
        let model = ScenarioModel::build(
            g.clone(),
            r.clone(),
            mu,
            &PipelineOptions {
                target_areas: Some(2),
                ..Default::default()
            },
        )?;
        let mut cfg = SimConfig::new(Strategy::Cellular, seed + 13, horizon);
        cfg.target_areas = Some(2);
        let report = run(&g, &r, mu, &cfg)?;
        let plan = model.plan.as_ref().expect("planned");
        checks.push(se_check(
            "p_cell".into(),
            "two-cluster",
            plan.p_cell,
            report.p_cell.expect("plan present"),
            sigmas,
        ));
        checks.push(se_check(
            "g_t".into(),
            "two-cluster",
            model.params.g_t,
            report.g_t.expect("handovers occurred"),
            sigmas,
        ));
    }

    // fixture 3: unidirectional ring; chain statistics at H = 2
    {
        let (g, r) = ring_fixture();
        let mu = 1.0; // every MAP has intensity 1, so per-event rho = 0.5
        let mut cfg = SimConfig::new(Strategy::WirelessTracking, seed + 29, horizon);
        cfg.tracking = Some(TrackingPolicy::new(2, 0.0)?);
        let report = run(&g, &r, mu, &cfg)?;
        let exact = chain_statistics(&TrackingPolicy::new(2, 0.0)?, 0.5)?;
        let chain = report.chain.expect("tracking strategy");
        checks.push(se_check(
            "p_h".into(),
            "one-way-ring",
            exact.p_h,
            chain.p_h,
            sigmas,
        ));
        checks.push(se_check(
            "p_0".into(),
            "one-way-ring",
            exact.p_0,
            chain.p_0,
            sigmas,
        ));
        checks.push(se_check(
            "mh_r".into(),
            "one-way-ring",
            exact.mh_r,
            chain.mh_r,
            sigmas,
        ));
    }

    Ok(checks)
}

//! Couple two access networks, sweep the vertical-handover willingness
//! rate and report the cost-optimal value with the network-choice
//! probability.
//!
//! Network B here sits behind the vertical link and runs on pricier
//! links, so every delivery to a mobile camping there is longer: the
//! optimizer pushes the willingness rate toward network A.
//!
//! ```bash
//! cargo run -p mobcost --example vertical_handover
//! ```

use mobcost::cost::{ChainMode, CostClassWeights, CostConstants, Strategy};
use mobcost::graph::NetworkGraph;
use mobcost::mobility::RateMatrix;
use mobcost::vho::{sweep_nu, CompositeScenario, VhoOptions};

/// Gateway, relay, one access point; the mobile only moves vertically.
fn access_net() -> mobcost::Result<(NetworkGraph, RateMatrix)> {
    let weights = vec![
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0],
    ];
    let is_map = vec![false, false, true];
    Ok((
        NetworkGraph::new(weights, is_map.clone(), 0)?,
        RateMatrix::new(vec![vec![0.0; 3]; 3], is_map)?,
    ))
}

fn main() -> mobcost::Result<()> {
    let (net_a, rates_a) = access_net()?;
    let (net_b, rates_b) = access_net()?;
    let scenario = CompositeScenario {
        net_a,
        net_b,
        rates_a,
        rates_b,
        ratio_a: 1.0,
        ratio_b: 2.0, // network B costs twice as much per link
        couplings: vec![(2, 2)],
        coupling_weight: Some(3.0),
        mu: 1.0,
        tau: None,
    };

    let mut options = VhoOptions::new(Strategy::WiredTracking);
    options.chain = ChainMode::OptimizeH {
        h_max: 16,
        p_loop: 0.0,
    };
    let grid: Vec<f64> = (-4..=4).map(|k| 2f64.powf(k as f64 / 2.0)).collect();
    let result = sweep_nu(
        &scenario,
        &grid,
        &CostConstants::mipv4(),
        &CostClassWeights::default(),
        &options,
    )?;

    println!("nu,total,mass_a,p_e1e2,p_e3e4");
    for p in &result.points {
        println!(
            "{:.4},{:.4},{:.4},{:.4},{:.4}",
            p.nu, p.breakdown.total, p.mass_a, p.p_e1_e2, p.p_e3_e4
        );
    }
    println!(
        "\nnu* = {:.4}; choose network A with probability {:.4} (tau = {:.4}{})",
        result.nu_star,
        result.p_choose_a.value,
        result.tau_used,
        if result.p_choose_a.clamped {
            ", clamped"
        } else {
            ""
        }
    );
    Ok(())
}

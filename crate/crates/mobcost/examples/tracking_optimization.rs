//! Find the cost-optimal number of tracking handovers between two normal
//! handovers, and show how the optimum moves with the mobility ratio.
//!
//! ```bash
//! cargo run -p mobcost --example tracking_optimization
//! ```

use mobcost::cost::{CostClassWeights, CostConstants, Strategy, StrategyInputs};
use mobcost::tracking::{h_cost_curve, optimize_h};

fn main() -> mobcost::Result<()> {
    let constants = CostConstants::mipv4();
    let weights = CostClassWeights::default();

    let inputs = StrategyInputs::new(0.9, 5.0, 2.0, 1.0);
    println!("wireless tracking cost over the chain-length grid (rho = 0.9):");
    for (h, total) in h_cost_curve(
        Strategy::WirelessTracking,
        &inputs,
        &constants,
        &weights,
        10,
        0.0,
    )? {
        println!("  H = {h:>2}  total = {total:10.2}");
    }
    let (h_star, stats, best) =
        optimize_h(Strategy::WirelessTracking, &inputs, &constants, &weights, 10, 0.0)?;
    println!(
        "optimum: H* = {h_star} (P_H = {:.4}, P_0 = {:.4}, M[h_r] = {:.4}, total = {:.2})\n",
        stats.p_h, stats.p_0, stats.mh_r, best.total
    );

    println!("optimal chain length as mobility grows:");
    for rho in [0.05, 0.3, 0.5, 0.7, 0.9, 0.99] {
        let mut at = inputs.clone();
        at.rho = rho;
        let (h, _, b) =
            optimize_h(Strategy::WirelessTracking, &at, &constants, &weights, 32, 0.0)?;
        println!("  rho = {rho:<5} H* = {h:>2}  total = {:10.2}", b.total);
    }
    Ok(())
}

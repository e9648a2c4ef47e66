//! Sweep the mobility ratio and print a plot-ready CSV: on networks where
//! handover and paging distances are short but the hierarchy is deep, the
//! tracking family overtakes the centralized one as mobiles move more.
//!
//! ```bash
//! cargo run -p mobcost --example mobility_ratio_sweep > rho_sweep.csv
//! ```

use mobcost::cost::{
    total_cost_curve, ChainMode, CostClassWeights, CostConstants, PagingParams, Strategy,
    StrategyInputs, SweepParameter,
};

fn main() -> mobcost::Result<()> {
    let constants = CostConstants::mipv4();
    let weights = CostClassWeights::default();
    let base = StrategyInputs::new(0.5, 6.0, 4.0, 1.0).with_paging(PagingParams {
        g_c: 1.0,
        n_c: 3.0,
        n_d: 4.0,
        p_cell: 0.2,
    });
    let grid: Vec<f64> = (0..=19).map(|k| k as f64 * 0.05).collect();
    let strategies = [
        Strategy::Centralized,
        Strategy::Hierarchical,
        Strategy::WirelessTracking,
        Strategy::WiredTracking,
        Strategy::Cellular,
    ];

    println!("param,value,strategy,signalling,processing,air,total");
    for strategy in strategies {
        let curve = total_cost_curve(
            strategy,
            SweepParameter::Rho,
            &grid,
            &base,
            &constants,
            &weights,
            ChainMode::OptimizeH {
                h_max: 16,
                p_loop: 0.0,
            },
        )?;
        for (rho, b) in curve {
            println!(
                "rho,{rho},{},{},{},{},{}",
                strategy, b.signalling, b.processing, b.air, b.total
            );
        }
    }
    Ok(())
}

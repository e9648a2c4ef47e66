//! Technology-tendency sweeps: vary the uplink/downlink unit-cost ratio
//! and the processing/signalling class-weight ratio while preserving each
//! pair's product, and watch which strategy absorbs the shift best.
//!
//! ```bash
//! cargo run -p mobcost --example cost_ratio_sweep
//! ```

use mobcost::cost::{
    total_cost_curve, ChainMode, CostClassWeights, CostConstants, PagingParams, Strategy,
    StrategyInputs, SweepParameter,
};

fn geometric(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|k| {
            let t = k as f64 / (steps - 1) as f64;
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

fn main() -> mobcost::Result<()> {
    let constants = CostConstants::mipv4();
    let weights = CostClassWeights::default();
    let base = StrategyInputs::new(0.9, 6.0, 4.0, 1.0).with_paging(PagingParams {
        g_c: 1.0,
        n_c: 3.0,
        n_d: 4.0,
        p_cell: 0.2,
    });
    let chain = ChainMode::OptimizeH {
        h_max: 16,
        p_loop: 0.0,
    };
    let strategies = [
        Strategy::Centralized,
        Strategy::Hierarchical,
        Strategy::WirelessTracking,
        Strategy::WiredTracking,
        Strategy::Cellular,
    ];

    let base_ratio = constants.c_u / constants.c_d;
    println!("param,value,strategy,signalling,processing,air,total");
    for (param, grid) in [
        (
            SweepParameter::CuOverCd,
            geometric(0.5 * base_ratio, 2.0 * base_ratio, 9),
        ),
        (SweepParameter::ProcOverSig, geometric(0.5, 2.0, 9)),
        (SweepParameter::AirOverSig, geometric(0.5, 2.0, 9)),
    ] {
        for strategy in strategies {
            let curve =
                total_cost_curve(strategy, param, &grid, &base, &constants, &weights, chain)?;
            for (value, b) in curve {
                println!(
                    "{},{value},{},{},{},{},{}",
                    param.name(),
                    strategy,
                    b.signalling,
                    b.processing,
                    b.air,
                    b.total
                );
            }
        }
    }
    Ok(())
}

//! Compare the per-event cost of all seven strategies on one scenario.
//!
//! ```bash
//! cargo run -p mobcost --example strategy_costs
//! ```

use mobcost::cost::{cost, CostClassWeights, CostConstants, PagingParams, Strategy, StrategyInputs};
use mobcost::tracking::optimize_h;

fn main() -> mobcost::Result<()> {
    let constants = CostConstants::mipv4();
    let weights = CostClassWeights::default();
    let base = StrategyInputs::new(0.6, 5.0, 2.5, 1.2)
        .with_paging(PagingParams {
            g_c: 1.0,
            n_c: 3.0,
            n_d: 4.0,
            p_cell: 0.25,
        })
        .with_manet_fraction(0.4);

    println!(
        "{:<22} {:>12} {:>12} {:>10} {:>12}",
        "strategy", "signalling", "processing", "air", "total"
    );
    for strategy in Strategy::ALL {
        let mut inputs = base.clone();
        if strategy.is_tracking() {
            // each tracking strategy runs with its own optimal chain bound
            let (h, stats, _) = optimize_h(strategy, &inputs, &constants, &weights, 16, 0.0)?;
            inputs.chain = Some(stats);
            println!("  ({strategy} uses H = {h})");
        }
        let b = cost(strategy, &inputs, &constants, &weights)?;
        println!(
            "{:<22} {:>12.2} {:>12.2} {:>10.2} {:>12.2}",
            strategy.name(),
            b.signalling,
            b.processing,
            b.air,
            b.total
        );
    }
    Ok(())
}

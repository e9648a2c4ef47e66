//! Replay the movement model event by event and compare the empirical
//! per-event cost against the closed form it is supposed to realize.
//!
//! ```bash
//! cargo run -p mobcost --example simulate_and_validate
//! ```

use mobcost::cost::{cost, Strategy};
use mobcost::graph::NetworkGraph;
use mobcost::mobility::RateMatrix;
use mobcost::pipeline::{PipelineOptions, ScenarioModel};
use mobcost::sim::{estimate, run, Quantity, QuantityEstimate, SimConfig};

fn main() -> mobcost::Result<()> {
    // eight MAPs on a ring, three relay hops below the HA
    let n = 12;
    let mut weights = vec![vec![0.0; n]; n];
    let link = |w: &mut Vec<Vec<f64>>, a: usize, b: usize| {
        w[a][b] = 1.0;
        w[b][a] = 1.0;
    };
    link(&mut weights, 0, 1);
    link(&mut weights, 1, 2);
    link(&mut weights, 2, 3);
    for map in 4..12 {
        link(&mut weights, 3, map);
    }
    for k in 0..8 {
        link(&mut weights, 4 + k, 4 + (k + 1) % 8);
    }
    let mut is_map = vec![false; n];
    for flag in is_map.iter_mut().skip(4) {
        *flag = true;
    }
    let mut rates = vec![vec![0.0; n]; n];
    for k in 0..8 {
        rates[4 + k][4 + (k + 1) % 8] = 0.5;
        rates[4 + k][4 + (k + 7) % 8] = 0.5;
    }
    let graph = NetworkGraph::new(weights, is_map.clone(), 0)?;
    let movement = RateMatrix::new(rates, is_map)?;
    let mu = 0.5;

    let model = ScenarioModel::build(graph.clone(), movement.clone(), mu, &PipelineOptions::default())?;
    let inputs = model.strategy_inputs(None, false);

    for strategy in [Strategy::Centralized, Strategy::Hierarchical] {
        let cfg = SimConfig::new(strategy, 2026, 200_000);
        let report = run(&graph, &movement, mu, &cfg)?;
        let analytic = cost(strategy, &inputs, &cfg.constants, &cfg.weights)?;
        println!(
            "{strategy}: empirical {:.2} +- {:.2} vs analytic {:.2} ({:+.3}%)",
            report.mean_total.value,
            report.mean_total.std_error,
            analytic.total,
            100.0 * (report.mean_total.value - analytic.total) / analytic.total,
        );
        if let QuantityEstimate::HandoverDistance(e) = estimate(&report, Quantity::HandoverDistance)?
        {
            println!(
                "  realized handover distance {:.4} vs derived g_t {:.4}",
                e.value, model.params.g_t
            );
        }
    }
    println!("\nrun `mobcost validate` for the full cross-check table");
    Ok(())
}

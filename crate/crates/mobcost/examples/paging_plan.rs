//! Partition the access points of a clustered network into paging areas
//! and read off the area descriptors.
//!
//! ```bash
//! cargo run -p mobcost --example paging_plan
//! ```

use mobcost::graph::{all_pairs_distances, average_weight, AveragingMode, NetworkGraph};
use mobcost::mobility::{stationary_ctmc, to_transition_matrix, RateMatrix};
use mobcost::paging::plan_areas;

fn main() -> mobcost::Result<()> {
    // two tight triangles joined by one long, rarely used edge
    let n = 6;
    let mut weights = vec![vec![0.0; n]; n];
    let mut rates = vec![vec![0.0; n]; n];
    for &(a, b) in &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
        weights[a][b] = 1.0;
        weights[b][a] = 1.0;
        rates[a][b] = 1.0;
        rates[b][a] = 1.0;
    }
    weights[2][3] = 5.0;
    weights[3][2] = 5.0;
    rates[2][3] = 0.25;
    rates[3][2] = 0.25;
    // keep every node's total intensity equal
    for (bridge, peers) in [(2usize, [0usize, 1usize]), (3, [4, 5])] {
        rates[bridge][peers[0]] = 0.875;
        rates[bridge][peers[1]] = 0.875;
    }

    let graph = NetworkGraph::new(weights, vec![true; n], 0)?;
    let movement = RateMatrix::new(rates, vec![true; n])?;
    let distances = all_pairs_distances(&graph)?;
    let b = stationary_ctmc(&movement)?;
    let transitions = to_transition_matrix(&movement)?;
    let w = average_weight(&graph, AveragingMode::Edges)?;

    for target_areas in [1, 2, 3] {
        let plan = plan_areas(&graph, &distances, &b, &transitions, target_areas, w)?;
        print!("{target_areas} areas: heads {:?}, members", plan.heads());
        for area in 0..plan.n_d {
            print!(" {:?}", plan.members(area));
        }
        println!(
            "\n         g_c = {:.4}, n_c = {}, p_cell = {:.4}",
            plan.g_c, plan.n_c, plan.p_cell
        );
    }
    Ok(())
}

//! Derive every network and mobility descriptor from the two input
//! matrices.
//!
//! ```bash
//! cargo run -p mobcost --example derive_parameters
//! ```

use mobcost::graph::NetworkGraph;
use mobcost::mobility::RateMatrix;
use mobcost::pipeline::{PipelineOptions, ScenarioModel};

fn main() -> mobcost::Result<()> {
    // a Home Agent above two relay levels, with six access points on a ring
    let n = 9;
    let mut weights = vec![vec![0.0; n]; n];
    let link = |w: &mut Vec<Vec<f64>>, a: usize, b: usize, cost: f64| {
        w[a][b] = cost;
        w[b][a] = cost;
    };
    link(&mut weights, 0, 1, 1.0);
    link(&mut weights, 1, 2, 1.0);
    for map in 3..n {
        link(&mut weights, 2, map, 1.0);
    }
    for k in 0..6 {
        link(&mut weights, 3 + k, 3 + (k + 1) % 6, 1.0);
    }
    let mut is_map = vec![false; n];
    for flag in is_map.iter_mut().skip(3) {
        *flag = true;
    }

    // mobiles drift around the ring, slightly clockwise
    let mut rates = vec![vec![0.0; n]; n];
    for k in 0..6 {
        rates[3 + k][3 + (k + 1) % 6] = 0.7;
        rates[3 + k][3 + (k + 5) % 6] = 0.3;
    }

    let graph = NetworkGraph::new(weights, is_map.clone(), 0)?;
    let movement = RateMatrix::new(rates, is_map)?;
    let call_rate = 0.5;

    let model = ScenarioModel::build(
        graph,
        movement,
        call_rate,
        &PipelineOptions {
            target_areas: Some(2),
            ..Default::default()
        },
    )?;

    let p = &model.params;
    println!("average link weight        w     = {}", p.w);
    println!("average HA depth           m     = {}", p.m);
    println!("average handover distance  g_t   = {}", p.g_t);
    println!("average neighbor degree    delta = {}", p.delta);
    println!("junction distance          g_h   = {:.6}", p.g_h);
    let plan = model.plan.as_ref().expect("two areas were requested");
    println!("area radius                g_c   = {:.6}", plan.g_c);
    println!("MAPs per area              n_c   = {}", plan.n_c);
    println!("area count                 n_d   = {}", plan.n_d);
    println!("boundary crossing prob     p_cell= {:.6}", plan.p_cell);
    println!("handover rate              lambda= {:.6}", model.mobility.lambda);
    println!("mobility ratio             rho   = {:.6}", model.mobility.rho);
    Ok(())
}

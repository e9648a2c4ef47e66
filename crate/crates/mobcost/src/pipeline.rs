//! End-to-end derivation: from the two input matrices to a full parameter
//! set ready for cost evaluation.

use crate::cost::{PagingParams, StrategyInputs};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, average_weight, AveragingMode, DistanceMatrix, NetworkGraph};
use crate::mobility::{
    mobility_rates, stationary_ctmc, to_transition_matrix, MobilityRates, RateMatrix,
    StationaryDistribution, TransitionMatrix,
};
use crate::paging::{plan_areas, plan_from_assignment, PagingPlan};
use crate::params::{derive, DegreeMode, DerivedParams, Overrides};

/// Options steering the derivation.
#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub averaging: AveragingMode,
    pub degree_mode: DegreeMode,
    pub overrides: Overrides,
    /// Paging areas to plan; `None` skips planning unless an explicit plan
    /// is supplied.
    pub target_areas: Option<usize>,
    /// Explicit plan: (map index, area id) pairs plus per-area heads.
    pub explicit_plan: Option<(Vec<(usize, usize)>, Vec<usize>)>,
}

/// Everything derivable from a (network, rates, mu) scenario, computed once.
#[derive(Debug, Clone)]
pub struct ScenarioModel {
    pub graph: NetworkGraph,
    pub rates: RateMatrix,
    pub distances: DistanceMatrix,
    pub transition: TransitionMatrix,
    pub stationary: StationaryDistribution,
    pub mobility: MobilityRates,
    pub params: DerivedParams,
    pub plan: Option<PagingPlan>,
}

impl ScenarioModel {
    pub fn build(
        graph: NetworkGraph,
        rates: RateMatrix,
        mu: f64,
        options: &PipelineOptions,
    ) -> Result<Self> {
        if rates.n() != graph.n() {
            return Err(Error::Mobility(format!(
                "rate matrix is {}x{} but the network has {} nodes",
                rates.n(),
                rates.n(),
                graph.n()
            )));
        }
        for i in 0..graph.n() {
            if graph.is_map(i) != rates.is_map(i) {
                return Err(Error::Mobility(format!(
                    "MAP flag mismatch at node {i} between network and rate matrix"
                )));
            }
        }
        let distances = all_pairs_distances(&graph)?;
        let w = average_weight(&graph, options.averaging)?;
        let stationary = stationary_ctmc(&rates)?;
        let transition = if graph.map_count() == 1 {
            // no movement is possible; an all-zero matrix stands in
            TransitionMatrix::new(vec![vec![0.0; graph.n()]; graph.n()], vec![false; graph.n()])?
        } else {
            to_transition_matrix(&rates)?
        };
        let mobility = mobility_rates(&rates, &stationary, mu)?;
        let params = derive(
            &distances,
            &transition,
            &stationary,
            w,
            graph.map_count(),
            options.degree_mode,
            &options.overrides,
        )?;
        let plan = match (&options.explicit_plan, options.target_areas) {
            (Some((assignment, heads)), _) => Some(plan_from_assignment(
                &graph,
                &distances,
                &stationary,
                &transition,
                assignment,
                heads,
                w,
            )?),
            (None, Some(k)) => Some(plan_areas(
                &graph,
                &distances,
                &stationary,
                &transition,
                k,
                w,
            )?),
            (None, None) => None,
        };
        Ok(ScenarioModel {
            graph,
            rates,
            distances,
            transition,
            stationary,
            mobility,
            params,
            plan,
        })
    }

    /// Strategy inputs assembled from the derived values.
    pub fn strategy_inputs(&self, p_manet: Option<f64>, update_on_crossing: bool) -> StrategyInputs {
        let mut inputs = StrategyInputs::new(
            self.mobility.rho,
            self.params.m,
            self.params.g_h,
            self.params.g_t,
        );
        if let Some(plan) = &self.plan {
            inputs = inputs.with_paging(PagingParams {
                g_c: plan.g_c,
                n_c: plan.n_c,
                n_d: plan.n_d as f64,
                p_cell: plan.p_cell,
            });
        }
        inputs.p_manet = p_manet;
        inputs.update_on_crossing = update_on_crossing;
        inputs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_derivation_on_the_two_triangle_fixture() {
        let (g, r) = crate::paging::tests::two_triangle_fixture();
        let model = ScenarioModel::build(
            g,
            r,
            1.0,
            &PipelineOptions {
                target_areas: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(model.params.m > 0.0);
        assert!(model.params.g_t > 0.0);
        assert!(model.params.delta > 1.0);
        assert!(model.params.g_h > 0.0);
        let plan = model.plan.as_ref().unwrap();
        assert_eq!(plan.n_d, 2);
        let inputs = model.strategy_inputs(Some(0.5), false);
        assert!(inputs.paging.is_some());
        assert!((inputs.rho - model.mobility.rho).abs() < 1e-15);
    }

    #[test]
    fn single_map_network_degenerates_cleanly() {
        let g = NetworkGraph::new(
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            vec![false, true],
            0,
        )
        .unwrap();
        let r = RateMatrix::new(vec![vec![0.0; 2]; 2], vec![false, true]).unwrap();
        let model = ScenarioModel::build(g, r, 1.0, &PipelineOptions::default()).unwrap();
        assert_eq!(model.mobility.lambda, 0.0);
        assert_eq!(model.mobility.rho, 0.0);
        assert_eq!(model.params.g_t, 0.0);
        assert_eq!(model.params.g_h, 0.0);
        assert!((model.params.m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_flag_mismatch_is_rejected() {
        let g = NetworkGraph::new(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![true, true],
            0,
        )
        .unwrap();
        let r = RateMatrix::new(
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![true, false],
        )
        .unwrap();
        assert!(ScenarioModel::build(g, r, 1.0, &PipelineOptions::default()).is_err());
    }
}

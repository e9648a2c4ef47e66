//! Vertical handover: compose two access networks with a willingness-rate
//! coupling, sweep the rate and report the cost-optimal value.
//!
//! Two networks covering (part of) the same region are merged into one
//! model: the weight matrix becomes block-diagonal with each block scaled
//! by its cost/QoS ratio, and the handover rate matrix gains a coupling
//! pair `nu` (toward network A) and `1/nu` (toward network B) wherever a
//! vertical handover is physically possible. Larger `nu` therefore pulls
//! stationary mass toward network A; `nu = 1` is indifference. The full
//! derivation pipeline then runs per grid value of `nu`, so the sweep sees
//! exactly what a standalone evaluation of the composed model would see.
//!
//! The composite keeps network A's Home Agent as its HA.

use crate::cost::{cost, ChainMode, CostBreakdown, CostClassWeights, CostConstants, Strategy};
use crate::error::{Error, Result};
use crate::graph::{average_weight, AveragingMode, NetworkGraph};
use crate::mobility::RateMatrix;
use crate::pipeline::{PipelineOptions, ScenarioModel};

/// Two networks plus the coupling description.
#[derive(Debug, Clone)]
pub struct CompositeScenario {
    pub net_a: NetworkGraph,
    pub net_b: NetworkGraph,
    pub rates_a: RateMatrix,
    pub rates_b: RateMatrix,
    /// Relative cost of using each network divided by the QoS it provides;
    /// multiplies the network's link weights.
    pub ratio_a: f64,
    pub ratio_b: f64,
    /// Pairs (node in A, node in B) where a vertical handover is possible.
    /// Never inferred: the networks need not cover the same area.
    pub couplings: Vec<(usize, usize)>,
    /// Wire cost of the vertical path; defaults to the mean of the two
    /// scaled networks' average link weights.
    pub coupling_weight: Option<f64>,
    /// Call arrival intensity of the composite scenario.
    pub mu: f64,
    /// Timescale of the network-choice probability; defaults to
    /// `1 / lambda` of the composite at the optimum.
    pub tau: Option<f64>,
}

impl CompositeScenario {
    pub fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() {
            return Err(Error::Vho("at least one coupling pair is required".into()));
        }
        if !(self.ratio_a > 0.0) || !(self.ratio_b > 0.0) {
            return Err(Error::Vho(format!(
                "cost/QoS ratios must be positive, got {} and {}",
                self.ratio_a, self.ratio_b
            )));
        }
        if self.net_a.n() != self.rates_a.n() || self.net_b.n() != self.rates_b.n() {
            return Err(Error::Vho(
                "rate matrices must match their networks in size".into(),
            ));
        }
        if let Some(w) = self.coupling_weight {
            if !(w > 0.0) {
                return Err(Error::Vho(format!(
                    "coupling weight must be positive, got {w}"
                )));
            }
        }
        if !(self.mu >= 0.0) {
            return Err(Error::Vho(format!("mu must be non-negative, got {}", self.mu)));
        }
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &self.couplings {
            if a >= self.net_a.n() || !self.net_a.is_map(a) {
                return Err(Error::Vho(format!(
                    "coupling references node {a} of network A, which is not a MAP"
                )));
            }
            if b >= self.net_b.n() || !self.net_b.is_map(b) {
                return Err(Error::Vho(format!(
                    "coupling references node {b} of network B, which is not a MAP"
                )));
            }
            if !seen.insert((a, b)) {
                return Err(Error::Vho(format!("duplicate coupling pair ({a}, {b})")));
            }
        }
        // each network must stand on its own before composition
        crate::graph::all_pairs_distances(&self.net_a)
            .map_err(|e| Error::Vho(format!("network A is not connected: {e}")))?;
        crate::graph::all_pairs_distances(&self.net_b)
            .map_err(|e| Error::Vho(format!("network B is not connected: {e}")))?;
        Ok(())
    }
}

/// Merge the scenario into one network and one rate matrix at willingness
/// rate `nu`.
pub fn compose(s: &CompositeScenario, nu: f64) -> Result<(NetworkGraph, RateMatrix)> {
    s.validate()?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Vho(format!("nu must be positive, got {nu}")));
    }
    let scaled_a = s.net_a.scaled(s.ratio_a)?;
    let scaled_b = s.net_b.scaled(s.ratio_b)?;
    let na = scaled_a.n();
    let nb = scaled_b.n();
    let n = na + nb;

    let coupling_weight = match s.coupling_weight {
        Some(w) => w,
        None => {
            let wa = average_weight(&scaled_a, AveragingMode::Edges)?;
            let wb = average_weight(&scaled_b, AveragingMode::Edges)?;
            (wa + wb) / 2.0
        }
    };

    let mut weights = vec![vec![0.0; n]; n];
    for i in 0..na {
        for j in 0..na {
            weights[i][j] = scaled_a.weight(i, j);
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            weights[na + i][na + j] = scaled_b.weight(i, j);
        }
    }
    let mut rates = vec![vec![0.0; n]; n];
    for i in 0..na {
        for j in 0..na {
            rates[i][j] = s.rates_a.rate(i, j);
        }
    }
    for i in 0..nb {
        for j in 0..nb {
            rates[na + i][na + j] = s.rates_b.rate(i, j);
        }
    }
    for &(a, b) in &s.couplings {
        weights[a][na + b] = coupling_weight;
        weights[na + b][a] = coupling_weight;
        rates[a][na + b] = 1.0 / nu; // A -> B
        rates[na + b][a] = nu; // B -> A
    }

    let mut is_map: Vec<bool> = Vec::with_capacity(n);
    is_map.extend(s.net_a.map_flags());
    is_map.extend(s.net_b.map_flags());

    let graph = NetworkGraph::new(weights, is_map.clone(), s.net_a.ha())?;
    let rate_matrix = RateMatrix::new(rates, is_map)?;
    Ok((graph, rate_matrix))
}

/// Which form of the network-choice probability to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChoiceForm {
    /// `(nu tau) * exp(-nu tau) * e`: unimodal in `nu tau`, peaks at exactly
    /// 1 when `nu tau = 1`, always a probability. Default.
    #[default]
    NormalizedExponential,
    /// `(nu tau) * exp(nu tau)` as published; exceeds 1 for `nu tau` beyond
    /// about 0.567 and is clamped with a diagnostic flag.
    PaperLiteral,
}

/// Choice probability with a flag recording whether clamping fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiceProbability {
    pub value: f64,
    pub clamped: bool,
}

/// Probability of choosing network A at willingness rate `nu` on timescale
/// `tau`.
pub fn choice_probability(nu: f64, tau: f64, form: ChoiceForm) -> Result<ChoiceProbability> {
    if !(nu > 0.0) || !(tau > 0.0) {
        return Err(Error::Vho(format!(
            "nu and tau must be positive, got nu = {nu}, tau = {tau}"
        )));
    }
    let x = nu * tau;
    match form {
        ChoiceForm::NormalizedExponential => Ok(ChoiceProbability {
            value: x * (1.0 - x).exp(),
            clamped: false,
        }),
        ChoiceForm::PaperLiteral => {
            let raw = x * x.exp();
            Ok(ChoiceProbability {
                value: raw.min(1.0),
                clamped: raw > 1.0,
            })
        }
    }
}

/// Sweep evaluation knobs.
#[derive(Debug, Clone)]
pub struct VhoOptions {
    pub strategy: Strategy,
    pub averaging: AveragingMode,
    /// Paging areas for the cellular family.
    pub target_areas: Option<usize>,
    pub p_manet: Option<f64>,
    pub update_on_crossing: bool,
    /// Chain handling for the tracking strategies.
    pub chain: ChainMode,
    pub choice_form: ChoiceForm,
}

impl VhoOptions {
    pub fn new(strategy: Strategy) -> Self {
        VhoOptions {
            strategy,
            averaging: AveragingMode::Edges,
            target_areas: None,
            p_manet: None,
            update_on_crossing: false,
            chain: ChainMode::OptimizeH {
                h_max: 32,
                p_loop: 0.0,
            },
            choice_form: ChoiceForm::NormalizedExponential,
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct VhoPoint {
    pub nu: f64,
    pub breakdown: CostBreakdown,
    /// Stationary probability of residing in network A.
    pub mass_a: f64,
    /// Vertical handover wins against intra-network movement:
    /// `nu / (nu + average intra intensity of network B)`.
    pub p_e1_e2: f64,
    /// Vertical handover wins against the next call: `nu / (nu + mu)`.
    pub p_e3_e4: f64,
    pub lambda: f64,
}

/// Sweep outcome: the curve, the optimal willingness rate and the choice
/// probability evaluated there.
#[derive(Debug, Clone)]
pub struct VhoResult {
    pub points: Vec<VhoPoint>,
    pub nu_star: f64,
    pub p_choose_a: ChoiceProbability,
    pub tau_used: f64,
}

/// Evaluate the full pipeline at one composed `nu`.
pub fn evaluate_at(
    s: &CompositeScenario,
    nu: f64,
    constants: &CostConstants,
    weights: &CostClassWeights,
    options: &VhoOptions,
) -> Result<VhoPoint> {
    let (graph, rates) = compose(s, nu)?;
    let model = ScenarioModel::build(
        graph,
        rates,
        s.mu,
        &PipelineOptions {
            averaging: options.averaging,
            target_areas: options.target_areas,
            ..Default::default()
        },
    )?;
    let mut inputs = model.strategy_inputs(options.p_manet, options.update_on_crossing);
    if options.strategy.is_tracking() {
        match options.chain {
            ChainMode::Frozen => {
                return Err(Error::Vho(
                    "tracking strategies need Resolve or OptimizeH chain handling in a nu sweep"
                        .into(),
                ))
            }
            ChainMode::Resolve { h, p_loop } => {
                let policy = crate::tracking::TrackingPolicy::new(h, p_loop)?;
                inputs.chain = Some(crate::tracking::chain_statistics(&policy, inputs.rho)?);
            }
            ChainMode::OptimizeH { h_max, p_loop } => {
                let (_, stats, _) = crate::tracking::optimize_h(
                    options.strategy,
                    &inputs,
                    constants,
                    weights,
                    h_max,
                    p_loop,
                )?;
                inputs.chain = Some(stats);
            }
        }
    }
    let breakdown = cost(options.strategy, &inputs, constants, weights)?;

    let na = s.net_a.n();
    let mass_a: f64 = (0..na).map(|i| model.stationary.prob(i)).sum();
    // average intra-B handover intensity, density-weighted within B
    let mut intra_b = 0.0;
    let mut mass_b = 0.0;
    for i in 0..s.net_b.n() {
        let p = model.stationary.prob(na + i);
        mass_b += p;
        intra_b += p * s.rates_b.row_sum(i);
    }
    let avg_intra_b = if mass_b > 0.0 { intra_b / mass_b } else { 0.0 };

    Ok(VhoPoint {
        nu,
        breakdown,
        mass_a,
        p_e1_e2: nu / (nu + avg_intra_b),
        p_e3_e4: nu / (nu + s.mu),
        lambda: model.mobility.lambda,
    })
}

/// Sweep `nu` over the grid, pick the cheapest point (ties toward the
/// smaller rate) and evaluate the choice probability there.
pub fn sweep_nu(
    s: &CompositeScenario,
    grid: &[f64],
    constants: &CostConstants,
    weights: &CostClassWeights,
    options: &VhoOptions,
) -> Result<VhoResult> {
    if grid.is_empty() {
        return Err(Error::Vho("nu grid must not be empty".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &nu in grid {
        points.push(evaluate_at(s, nu, constants, weights, options)?);
    }
    let mut best = 0usize;
    for (k, p) in points.iter().enumerate() {
        if p.breakdown.total < points[best].breakdown.total
            || (p.breakdown.total == points[best].breakdown.total && p.nu < points[best].nu)
        {
            best = k;
        }
    }
    let nu_star = points[best].nu;
    let tau_used = match s.tau {
        Some(t) => t,
        None => 1.0 / points[best].lambda,
    };
    let p_choose_a = choice_probability(nu_star, tau_used, options.choice_form)?;
    Ok(VhoResult {
        points,
        nu_star,
        p_choose_a,
        tau_used,
    })
}

//! Discrete-event Monte-Carlo engine replaying the movement model and
//! charging per-event protocol costs.
//!
//! Movement follows the continuous-time chain: sitting under MAP `i`, a
//! handover clock with the node's total outgoing intensity races a call
//! clock with intensity `mu`; the winner becomes the next event. Every
//! event charges the exact message sequence of the configured strategy,
//! which makes the run an independent oracle for the closed-form costs:
//!
//! - a term that is a path traversal in the closed form (an `m`, `g_t` or
//!   `g_c`-like factor) is charged along the realized shortest path, as
//!   path weight divided by the average link weight `w`;
//! - a term that is an area or network flood is charged as the realized
//!   sum over the flooded set;
//! - a probability factor becomes the realized indicator of that event;
//! - only the hierarchy junction depth `g_h` stays a model constant, since
//!   the hierarchical overlay is not part of the input graph.
//!
//! Identical seeds give identical reports. The generator is
//! xoshiro256++ seeded via SplitMix64 from the configured 64-bit seed;
//! reports are reproducible across runs of this crate, and statistically
//! (not byte-) comparable across generator changes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::cost::{CostClassWeights, CostConstants, Strategy};
use crate::error::{Error, Result};
use crate::graph::{all_pairs_distances, average_weight, AveragingMode, NetworkGraph};
use crate::mobility::RateMatrix;
use crate::paging::PagingPlan;
use crate::pipeline::{PipelineOptions, ScenarioModel};
use crate::tracking::TrackingPolicy;

pub const RNG_ALGORITHM: &str = "xoshiro256++ (seedmix: splitmix64)";

const OCCUPANCY_BATCHES: usize = 50;

/// Simulation setup. `events` is the horizon; `warmup` events are played
/// but not accounted (default 1% of the horizon).
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    pub events: u64,
    pub warmup: Option<u64>,
    pub strategy: Strategy,
    pub constants: CostConstants,
    pub weights: CostClassWeights,
    /// Chain policy; required by the tracking strategies. Loop removal is
    /// physical here: the chain pops when the mobile actually returns to
    /// the previous MAP, so the policy's `p_loop` is not used.
    pub tracking: Option<TrackingPolicy>,
    /// Paging plan; required by the cellular family (or set `target_areas`
    /// to plan internally).
    pub plan: Option<PagingPlan>,
    pub target_areas: Option<usize>,
    /// MANET flooding fraction; required by the Manet strategy.
    pub p_manet: Option<f64>,
    /// Charge cellular-family handover work on boundary crossings instead
    /// of inside-area moves. Must match the analytic switch for the pair
    /// to stay comparable.
    pub update_on_crossing: bool,
    pub averaging: AveragingMode,
    pub g_h_override: Option<f64>,
}

impl SimConfig {
    pub fn new(strategy: Strategy, seed: u64, events: u64) -> Self {
        SimConfig {
            seed,
            events,
            warmup: None,
            strategy,
            constants: CostConstants::mipv4(),
            weights: CostClassWeights::default(),
            tracking: None,
            plan: None,
            target_areas: None,
            p_manet: None,
            update_on_crossing: false,
            averaging: AveragingMode::Edges,
            g_h_override: None,
        }
    }

    fn effective_warmup(&self) -> u64 {
        self.warmup.unwrap_or(self.events / 100)
    }

    fn validate(&self) -> Result<()> {
        if self.events == 0 {
            return Err(Error::Sim("event horizon must be positive".into()));
        }
        if self.effective_warmup() >= self.events {
            return Err(Error::Sim(format!(
                "warmup {} must be below the event horizon {}",
                self.effective_warmup(),
                self.events
            )));
        }
        if self.strategy.is_tracking() && self.tracking.is_none() {
            return Err(Error::Sim(format!(
                "strategy {} needs a tracking policy",
                self.strategy
            )));
        }
        if self.strategy.is_cellular_family() && self.plan.is_none() && self.target_areas.is_none()
        {
            return Err(Error::Sim(format!(
                "strategy {} needs a paging plan or target_areas",
                self.strategy
            )));
        }
        if self.strategy == Strategy::Manet && self.p_manet.is_none() {
            return Err(Error::Sim("manet strategy needs p_manet".into()));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    fn from_samples(sum: f64, sum_sq: f64, n: u64) -> Estimate {
        if n == 0 {
            return Estimate {
                value: f64::NAN,
                std_error: f64::INFINITY,
            };
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        Estimate {
            value: mean,
            std_error: (var / n as f64).sqrt(),
        }
    }

    fn bernoulli(successes: u64, trials: u64) -> Estimate {
        if trials == 0 {
            return Estimate {
                value: f64::NAN,
                std_error: f64::INFINITY,
            };
        }
        let p = successes as f64 / trials as f64;
        Estimate {
            value: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// |value - reference| within k standard errors (with a small absolute
    /// floor so exact estimators do not fail on rounding noise).
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.std_error + 1e-12
    }
}

/// Empirical chain statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEstimates {
    pub p_h: Estimate,
    pub p_0: Estimate,
    pub mh_r: Estimate,
}

/// Accounted outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub rng: &'static str,
    pub seed: u64,
    pub events: u64,
    pub warmup: u64,
    pub strategy: Strategy,
    pub handovers: u64,
    pub normal_handovers: u64,
    pub tracking_handovers: u64,
    pub calls: u64,
    pub area_crossings: u64,
    /// Virtual time covered by the accounted events.
    pub virtual_time: f64,
    pub mean_signalling: Estimate,
    pub mean_processing: Estimate,
    pub mean_air: Estimate,
    pub mean_total: Estimate,
    /// Time-weighted residence fraction per node, batch-mean errors.
    pub occupancy: Vec<Estimate>,
    /// Accounted handovers per unit virtual time.
    pub lambda: f64,
    /// Handover share of events.
    pub rho: Estimate,
    /// Mean realized handover distance / w.
    pub g_t: Option<Estimate>,
    /// Boundary-crossing share of handovers.
    pub p_cell: Option<Estimate>,
    pub chain: Option<ChainEstimates>,
    /// Chain length observed at each call arrival.
    pub chain_histogram: Vec<u64>,
}

/// Quantities the report can be asked to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Occupancy,
    HandoverDistance,
    BoundaryCrossing,
    ChainStatistics,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantityEstimate {
    Occupancy(Vec<Estimate>),
    HandoverDistance(Estimate),
    BoundaryCrossing(Estimate),
    ChainStatistics(ChainEstimates),
}

/// Extract the empirical estimator of an analytic quantity from a run.
pub fn estimate(report: &SimReport, quantity: Quantity) -> Result<QuantityEstimate> {
    match quantity {
        Quantity::Occupancy => Ok(QuantityEstimate::Occupancy(report.occupancy.clone())),
        Quantity::HandoverDistance => report
            .g_t
            .map(QuantityEstimate::HandoverDistance)
            .ok_or_else(|| Error::Sim("no handovers observed, g_t estimate unavailable".into())),
        Quantity::BoundaryCrossing => report
            .p_cell
            .map(QuantityEstimate::BoundaryCrossing)
            .ok_or_else(|| {
                Error::Sim("boundary crossings are only tracked with a paging plan".into())
            }),
        Quantity::ChainStatistics => report
            .chain
            .map(QuantityEstimate::ChainStatistics)
            .ok_or_else(|| {
                Error::Sim("chain statistics are only tracked for tracking strategies".into())
            }),
    }
}

impl SimReport {
    /// Flat machine-readable key=value summary.
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("rng", self.rng.to_string());
        kv("seed", self.seed.to_string());
        kv("strategy", self.strategy.to_string());
        kv("events", self.events.to_string());
        kv("warmup", self.warmup.to_string());
        kv("handovers", self.handovers.to_string());
        kv("normal_handovers", self.normal_handovers.to_string());
        kv("tracking_handovers", self.tracking_handovers.to_string());
        kv("calls", self.calls.to_string());
        kv("area_crossings", self.area_crossings.to_string());
        kv("virtual_time", format!("{:.12e}", self.virtual_time));
        kv("lambda", format!("{:.12e}", self.lambda));
        kv("rho", format!("{:.12e}", self.rho.value));
        kv("rho_se", format!("{:.12e}", self.rho.std_error));
        for (name, e) in [
            ("mean_signalling", &self.mean_signalling),
            ("mean_processing", &self.mean_processing),
            ("mean_air", &self.mean_air),
            ("mean_total", &self.mean_total),
        ] {
            kv(name, format!("{:.12e}", e.value));
            kv(&format!("{name}_se"), format!("{:.12e}", e.std_error));
        }
        if let Some(g_t) = &self.g_t {
            kv("g_t", format!("{:.12e}", g_t.value));
            kv("g_t_se", format!("{:.12e}", g_t.std_error));
        }
        if let Some(p_cell) = &self.p_cell {
            kv("p_cell", format!("{:.12e}", p_cell.value));
            kv("p_cell_se", format!("{:.12e}", p_cell.std_error));
        }
        if let Some(chain) = &self.chain {
            kv("p_h", format!("{:.12e}", chain.p_h.value));
            kv("p_h_se", format!("{:.12e}", chain.p_h.std_error));
            kv("p_0", format!("{:.12e}", chain.p_0.value));
            kv("p_0_se", format!("{:.12e}", chain.p_0.std_error));
            kv("mh_r", format!("{:.12e}", chain.mh_r.value));
            kv("mh_r_se", format!("{:.12e}", chain.mh_r.std_error));
        }
        s
    }

    /// CSV blocks: per-node occupancy and the chain-length histogram.
    pub fn csv_blocks(&self) -> String {
        let mut s = String::from("node,occupancy,occupancy_se\n");
        for (i, e) in self.occupancy.iter().enumerate() {
            s.push_str(&format!("{i},{:.12e},{:.12e}\n", e.value, e.std_error));
        }
        if !self.chain_histogram.is_empty() {
            s.push_str("\nchain_length,calls\n");
            for (len, count) in self.chain_histogram.iter().enumerate() {
                s.push_str(&format!("{len},{count}\n"));
            }
        }
        s
    }
}

/// Kahan-compensated mean/variance accumulator; a million near-identical
/// samples must not drift the mean away from the exact value.
struct Accumulator {
    sum: f64,
    sum_c: f64,
    sum_sq: f64,
    sum_sq_c: f64,
    n: u64,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            sum: 0.0,
            sum_c: 0.0,
            sum_sq: 0.0,
            sum_sq_c: 0.0,
            n: 0,
        }
    }

    fn push(&mut self, x: f64) {
        let y = x - self.sum_c;
        let t = self.sum + y;
        self.sum_c = (t - self.sum) - y;
        self.sum = t;
        let xx = x * x;
        let y2 = xx - self.sum_sq_c;
        let t2 = self.sum_sq + y2;
        self.sum_sq_c = (t2 - self.sum_sq) - y2;
        self.sum_sq = t2;
        self.n += 1;
    }

    fn estimate(&self) -> Estimate {
        Estimate::from_samples(self.sum, self.sum_sq, self.n)
    }
}

/// Per-event cost triple.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Charge {
    sig: f64,
    proc: f64,
    air: f64,
}

struct Engine<'a> {
    strategy: Strategy,
    c: &'a CostConstants,
    /// distance in average-weight units
    dw: Box<dyn Fn(usize, usize) -> f64 + 'a>,
    ha: usize,
    g_h: f64,
    h: u32,
    plan: Option<&'a PagingPlan>,
    p_manet: f64,
    update_on_crossing: bool,
    /// chain[0] is the MAP the Central Agent knows; the mobile sits at the
    /// end
    chain: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn charge_handover(&mut self, from: usize, to: usize) -> (Charge, bool, bool) {
        let c = self.c;
        let dw = &self.dw;
        let g_h = self.g_h;
        let mut out = Charge::default();
        let mut normal = false;
        let mut crossed = false;
        match self.strategy {
            Strategy::Centralized => {
                normal = true;
                out.sig = dw(self.ha, to) * c.c_u;
                out.proc = c.c_r + (dw(self.ha, to) - 1.0) * c.c_f + c.c_m;
                out.air = c.c_au;
            }
            Strategy::Hierarchical => {
                normal = true;
                out.sig = g_h * c.c_u;
                out.proc = c.c_r + (g_h - 1.0) * c.c_f + c.c_m;
                out.air = c.c_au;
            }
            Strategy::WirelessTracking | Strategy::WiredTracking => {
                let wired = self.strategy == Strategy::WiredTracking;
                let len = self.chain.len() as u32 - 1;
                if len < self.h {
                    // tracking handover; popping when the mobile really
                    // returns to the previous MAP is the loop removal
                    if self.chain.len() >= 2 && self.chain[self.chain.len() - 2] == to {
                        self.chain.pop();
                    } else {
                        self.chain.push(to);
                    }
                    if wired {
                        out.sig = dw(from, to) * c.c_u;
                        out.proc = c.c_r + (dw(from, to) - 1.0) * c.c_f + c.c_m;
                        out.air = c.c_au;
                    } else {
                        out.proc = c.c_r + c.c_m;
                        out.air = 2.0 * c.c_au;
                    }
                } else {
                    normal = true;
                    self.chain.clear();
                    self.chain.push(to);
                    out.sig = g_h * c.c_u;
                    if wired {
                        out.proc = c.c_r + (dw(from, to) - 1.0) * c.c_f + c.c_m;
                    } else {
                        out.proc = c.c_r + (g_h - 1.0) * c.c_f + c.c_m;
                    }
                    out.air = c.c_au;
                }
            }
            Strategy::Cellular | Strategy::HierarchicalPaging | Strategy::Manet => {
                normal = true;
                let plan = self.plan.expect("validated");
                crossed = plan.area_of(from) != plan.area_of(to);
                let active = if self.update_on_crossing {
                    crossed
                } else {
                    !crossed
                };
                let head = plan.head_of(to).expect("MAP is covered");
                match self.strategy {
                    Strategy::Cellular => {
                        if active {
                            out.sig = g_h * c.c_u;
                            out.proc = c.c_r + g_h * c.c_f + c.c_m;
                            out.air = c.c_au;
                        }
                    }
                    Strategy::HierarchicalPaging => {
                        if active {
                            out.sig = dw(to, head) * c.c_u;
                            out.proc += c.c_r;
                            out.air = c.c_au;
                        }
                        out.proc += dw(to, head) * c.c_f + c.c_m;
                    }
                    Strategy::Manet => {
                        if active {
                            out.sig = g_h * c.c_u;
                            out.proc += c.c_r;
                            out.air = (dw(to, head) - 1.0) * c.c_au;
                        }
                        out.proc += g_h * c.c_f + c.c_m;
                    }
                    _ => unreachable!(),
                }
            }
        }
        (out, normal, crossed)
    }

    fn charge_call(&mut self, at: usize) -> (Charge, u32) {
        let c = self.c;
        let dw = &self.dw;
        let g_h = self.g_h;
        let mut out = Charge::default();
        let mut chain_len = 0u32;
        match self.strategy {
            Strategy::Centralized => {
                out.sig = dw(self.ha, at) * c.c_d;
                out.proc = c.c_ec + (dw(self.ha, at) - 2.0) * c.c_f + c.c_dc;
                out.air = c.c_ad;
            }
            Strategy::Hierarchical => {
                out.sig = dw(self.ha, at) * c.c_d;
                out.proc = c.c_ec
                    + (dw(self.ha, at) - g_h - 1.0) * c.c_f
                    + c.c_rc
                    + (g_h - 1.0) * c.c_f
                    + c.c_dc;
                out.air = c.c_ad;
            }
            Strategy::WirelessTracking | Strategy::WiredTracking => {
                let wired = self.strategy == Strategy::WiredTracking;
                chain_len = self.chain.len() as u32 - 1;
                let anchor = self.chain[0];
                // reach the chain anchor, then follow the forwarding hops
                out.sig = if wired {
                    dw(self.ha, anchor) * c.c_d
                } else {
                    g_h * c.c_d
                };
                out.proc = c.c_ec + (dw(self.ha, anchor) - 1.0) * c.c_f;
                for hop in self.chain.windows(2) {
                    out.sig += dw(hop[0], hop[1]) * c.c_d;
                    out.proc += (dw(hop[0], hop[1]) - 1.0) * c.c_f + c.c_rc;
                }
                if chain_len == 0 {
                    out.proc += c.c_dc;
                } else {
                    // the found mobile refreshes the Central Agent
                    out.sig += g_h * c.c_u;
                    out.proc += c.c_dc + (g_h - 1.0) * c.c_f + c.c_m;
                }
                out.air = c.c_ad;
                self.chain.clear();
                self.chain.push(at);
            }
            Strategy::Cellular | Strategy::HierarchicalPaging | Strategy::Manet => {
                let plan = self.plan.expect("validated");
                let area = plan.area_of(at).expect("MAP is covered");
                let head = plan.heads()[area];
                let members = plan.members(area);
                let flood_sig: f64 = members.iter().map(|&k| dw(head, k)).sum();
                let flood_proc: f64 = members.iter().map(|&k| dw(head, k) - 1.0).sum();
                match self.strategy {
                    Strategy::Cellular => {
                        out.sig = dw(self.ha, head) * c.c_d
                            + flood_sig * c.c_d
                            + dw(at, head) * c.c_u;
                        out.proc = c.c_ec
                            + (dw(self.ha, head) - 1.0) * c.c_f
                            + c.c_rc
                            + flood_proc * c.c_f
                            + members.len() as f64 * c.c_dc;
                        out.air = members.len() as f64 * c.c_ad + c.c_au;
                    }
                    Strategy::HierarchicalPaging => {
                        // every area head is paged from the HA
                        let heads_sig: f64 =
                            plan.heads().iter().map(|&hd| dw(self.ha, hd)).sum();
                        let heads_proc: f64 =
                            plan.heads().iter().map(|&hd| dw(self.ha, hd) - 1.0).sum();
                        out.sig = heads_sig * c.c_d + flood_sig * c.c_d + dw(at, head) * c.c_u;
                        out.proc = c.c_ec
                            + heads_proc * c.c_f
                            + c.c_rc
                            + flood_proc * c.c_f
                            + c.c_dc;
                        out.air = members.len() as f64 * c.c_ad + c.c_au;
                    }
                    Strategy::Manet => {
                        let p_m = self.p_manet;
                        out.sig = (dw(self.ha, head) + 1.0) * c.c_d
                            + p_m * flood_sig * c.c_d
                            + dw(at, head) * c.c_u;
                        out.proc = c.c_ec
                            + dw(self.ha, head) * c.c_f
                            + c.c_rc
                            + p_m * flood_sig * c.c_f
                            + c.c_dc;
                        out.air = p_m * flood_sig * c.c_ad + c.c_au;
                    }
                    _ => unreachable!(),
                }
            }
        }
        (out, chain_len)
    }
}

/// Run the simulation. See [`run_traced`] for a per-event dump.
pub fn run(g: &NetworkGraph, r: &RateMatrix, mu: f64, cfg: &SimConfig) -> Result<SimReport> {
    run_impl(g, r, mu, cfg, None)
}

/// Run and write one CSV row per accounted event to `sink`:
/// `time,event,from,to,cost_sig,cost_proc,cost_air`.
pub fn run_traced(
    g: &NetworkGraph,
    r: &RateMatrix,
    mu: f64,
    cfg: &SimConfig,
    sink: &mut dyn Write,
) -> Result<SimReport> {
    run_impl(g, r, mu, cfg, Some(sink))
}

fn run_impl(
    g: &NetworkGraph,
    r: &RateMatrix,
    mu: f64,
    cfg: &SimConfig,
    mut trace: Option<&mut dyn Write>,
) -> Result<SimReport> {
    cfg.validate()?;
    cfg.constants.validate()?;
    cfg.weights.validate()?;
    if !(mu >= 0.0) {
        return Err(Error::Sim(format!("mu must be non-negative, got {mu}")));
    }

    // derive the model constants the charging needs (w, g_h, plan)
    let model = ScenarioModel::build(
        g.clone(),
        r.clone(),
        mu,
        &PipelineOptions {
            averaging: cfg.averaging,
            target_areas: if cfg.plan.is_none() {
                cfg.target_areas
            } else {
                None
            },
            ..Default::default()
        },
    )?;
    let d = all_pairs_distances(g)?;
    let w = average_weight(g, cfg.averaging)?;
    let g_h = cfg.g_h_override.unwrap_or(model.params.g_h);
    let plan = cfg.plan.as_ref().or(model.plan.as_ref());

    let n = g.n();
    let maps = g.map_indices();
    let start = maps[0];
    let row_sums: Vec<f64> = (0..n).map(|i| r.row_sum(i)).collect();
    if row_sums[start] <= 0.0 && mu <= 0.0 {
        return Err(Error::Sim(
            "neither movement nor calls are possible; no events would fire".into(),
        ));
    }

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(cfg.seed);
    let mut engine = Engine {
        strategy: cfg.strategy,
        c: &cfg.constants,
        dw: Box::new(move |a, b| d.dist(a, b) / w),
        ha: g.ha(),
        g_h,
        h: cfg.tracking.map(|p| p.h()).unwrap_or(0),
        plan,
        p_manet: cfg.p_manet.unwrap_or(0.0),
        update_on_crossing: cfg.update_on_crossing,
        chain: vec![start],
    };

    let warmup = cfg.effective_warmup();
    let accounted_events = cfg.events - warmup;
    let weights = &cfg.weights;

    let mut cur = start;
    let mut time = 0.0f64;
    let mut accounted_time = 0.0f64;
    let (mut handovers, mut normals, mut calls, mut crossings) = (0u64, 0u64, 0u64, 0u64);
    let mut sig_acc = Accumulator::new();
    let mut proc_acc = Accumulator::new();
    let mut air_acc = Accumulator::new();
    let mut total_acc = Accumulator::new();
    let mut jump_acc = Accumulator::new();
    let mut chain_at_call = Accumulator::new();
    let mut empty_at_call = 0u64;
    let mut histogram: Vec<u64> = Vec::new();
    // per-batch (time-in-node, batch-time) for occupancy standard errors
    let mut batch_time = vec![vec![0.0f64; n]; OCCUPANCY_BATCHES];
    let mut batch_total = vec![0.0f64; OCCUPANCY_BATCHES];

    for event_idx in 0..cfg.events {
        let accounted = event_idx >= warmup;
        let rate_h = row_sums[cur];
        let u_h: f64 = rng.gen();
        let u_c: f64 = rng.gen();
        let t_h = if rate_h > 0.0 {
            -(1.0 - u_h).ln() / rate_h
        } else {
            f64::INFINITY
        };
        let t_c = if mu > 0.0 {
            -(1.0 - u_c).ln() / mu
        } else {
            f64::INFINITY
        };
        let (dt, is_handover) = if t_h <= t_c { (t_h, true) } else { (t_c, false) };
        if !dt.is_finite() {
            return Err(Error::Sim(
                "no event can fire from the current state".into(),
            ));
        }
        time += dt;
        if accounted {
            let batch =
                ((event_idx - warmup) * OCCUPANCY_BATCHES as u64 / accounted_events) as usize;
            batch_time[batch][cur] += dt;
            batch_total[batch] += dt;
            accounted_time += dt;
        }

        let (charge, from, to) = if is_handover {
            // destination by cumulative rate scan
            let target = rng.gen::<f64>() * rate_h;
            let mut acc = 0.0;
            let mut dest = cur;
            for j in 0..n {
                let rate = r.rate(cur, j);
                if rate <= 0.0 {
                    continue;
                }
                acc += rate;
                if target < acc {
                    dest = j;
                    break;
                }
                dest = j; // numeric guard: fall back to the last candidate
            }
            let (charge, normal, _) = engine.charge_handover(cur, dest);
            if accounted {
                handovers += 1;
                if normal {
                    normals += 1;
                }
                // crossings are tracked whenever a plan exists, whatever
                // strategy is being charged
                if let Some(p) = engine.plan {
                    if p.area_of(cur) != p.area_of(dest) {
                        crossings += 1;
                    }
                }
                jump_acc.push(d_over_w(&engine, cur, dest));
            }
            let from = cur;
            cur = dest;
            (charge, from, dest)
        } else {
            let (charge, chain_len) = engine.charge_call(cur);
            if accounted {
                calls += 1;
                if chain_len == 0 {
                    empty_at_call += 1;
                }
                chain_at_call.push(chain_len as f64);
                if engine.strategy.is_tracking() {
                    let len = chain_len as usize;
                    if histogram.len() <= len {
                        histogram.resize(len + 1, 0);
                    }
                    histogram[len] += 1;
                }
            }
            (charge, cur, cur)
        };

        if accounted {
            sig_acc.push(charge.sig);
            proc_acc.push(charge.proc);
            air_acc.push(charge.air);
            total_acc.push(
                weights.w_sig * charge.sig + weights.w_proc * charge.proc
                    + weights.w_air * charge.air,
            );
            if let Some(sink) = trace.as_deref_mut() {
                let kind = if is_handover { "handover" } else { "call" };
                writeln!(
                    sink,
                    "{time:.9},{kind},{from},{to},{:.9},{:.9},{:.9}",
                    charge.sig, charge.proc, charge.air
                )
                .map_err(|e| Error::Sim(format!("trace write failed: {e}")))?;
            }
        }
    }

    // occupancy: batch means of per-node time fractions
    let occupancy: Vec<Estimate> = (0..n)
        .map(|node| {
            let fractions: Vec<f64> = (0..OCCUPANCY_BATCHES)
                .filter(|&k| batch_total[k] > 0.0)
                .map(|k| batch_time[k][node] / batch_total[k])
                .collect();
            let kb = fractions.len() as f64;
            let mean = fractions.iter().sum::<f64>() / kb;
            let var = fractions.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / kb;
            Estimate {
                value: accounted_time_fraction(&batch_time, &batch_total, node),
                std_error: (var / kb).sqrt(),
            }
        })
        .collect();

    let accounted_total = handovers + calls;
    Ok(SimReport {
        rng: RNG_ALGORITHM,
        seed: cfg.seed,
        events: cfg.events,
        warmup,
        strategy: cfg.strategy,
        handovers,
        normal_handovers: if cfg.strategy.is_tracking() {
            normals
        } else {
            handovers
        },
        tracking_handovers: if cfg.strategy.is_tracking() {
            handovers - normals
        } else {
            0
        },
        calls,
        area_crossings: crossings,
        virtual_time: accounted_time,
        mean_signalling: sig_acc.estimate(),
        mean_processing: proc_acc.estimate(),
        mean_air: air_acc.estimate(),
        mean_total: total_acc.estimate(),
        occupancy,
        lambda: if accounted_time > 0.0 {
            handovers as f64 / accounted_time
        } else {
            0.0
        },
        rho: Estimate::bernoulli(handovers, accounted_total),
        g_t: if handovers > 0 {
            Some(jump_acc.estimate())
        } else {
            None
        },
        p_cell: if plan.is_some() {
            Some(Estimate::bernoulli(crossings, handovers))
        } else {
            None
        },
        chain: if cfg.strategy.is_tracking() {
            Some(ChainEstimates {
                p_h: Estimate::bernoulli(normals, handovers),
                p_0: Estimate::bernoulli(empty_at_call, calls),
                mh_r: chain_at_call.estimate(),
            })
        } else {
            None
        },
        chain_histogram: histogram,
    })
}

fn d_over_w(engine: &Engine, a: usize, b: usize) -> f64 {
    (engine.dw)(a, b)
}

fn accounted_time_fraction(batch_time: &[Vec<f64>], batch_total: &[f64], node: usize) -> f64 {
    let total: f64 = batch_total.iter().sum();
    if total <= 0.0 {
        return f64::NAN;
    }
    batch_time.iter().map(|b| b[node]).sum::<f64>() / total
}

//! Closed-form per-event cost functions of the seven mobility management
//! strategies, split into signalling, processing and air-interface
//! components.
//!
//! Every component has the shape `rho * f_h + (1 - rho) * f_p`: with
//! probability `rho` the next event is a handover costing `f_h`, otherwise
//! a call costing `f_p`. The per-strategy `f_h`/`f_p` expressions live in
//! [`component`] and are the single source of truth; the simulator charges
//! the same message sequences event by event and must agree with them.
//!
//! Distances (`m`, `g_h`, `g_t`, `g_c`) are measured in average-link-weight
//! units, so an expression like `(m - 1) * c_f` counts the forwarding nodes
//! on an HA-to-MAP path. Expressions of that kind must not go negative: a
//! negative node count means the input parameters contradict the structural
//! assumption behind the row (for example a hierarchy shallower than the
//! paging depth), and evaluation fails rather than producing a nonsense
//! cost.

use crate::error::{Error, Result};
use crate::tracking::ChainStatistics;

/// The seven modeled strategy families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Centralized,
    Hierarchical,
    WirelessTracking,
    WiredTracking,
    Cellular,
    HierarchicalPaging,
    Manet,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Centralized,
        Strategy::Hierarchical,
        Strategy::WirelessTracking,
        Strategy::WiredTracking,
        Strategy::Cellular,
        Strategy::HierarchicalPaging,
        Strategy::Manet,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Centralized => "centralized",
            Strategy::Hierarchical => "hierarchical",
            Strategy::WirelessTracking => "wireless-tracking",
            Strategy::WiredTracking => "wired-tracking",
            Strategy::Cellular => "cellular",
            Strategy::HierarchicalPaging => "hierarchical-paging",
            Strategy::Manet => "manet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "centralized" => Ok(Strategy::Centralized),
            "hierarchical" => Ok(Strategy::Hierarchical),
            "wireless-tracking" => Ok(Strategy::WirelessTracking),
            "wired-tracking" => Ok(Strategy::WiredTracking),
            "cellular" => Ok(Strategy::Cellular),
            "hierarchical-paging" => Ok(Strategy::HierarchicalPaging),
            "manet" => Ok(Strategy::Manet),
            other => Err(Error::Params(format!(
                "unknown strategy `{other}` (expected one of: centralized, hierarchical, \
                 wireless-tracking, wired-tracking, cellular, hierarchical-paging, manet)"
            ))),
        }
    }

    /// True for the two chain-forwarding strategies that need chain
    /// statistics as input.
    pub fn is_tracking(&self) -> bool {
        matches!(self, Strategy::WirelessTracking | Strategy::WiredTracking)
    }

    /// True for the paging-area strategies that need a paging plan.
    pub fn is_cellular_family(&self) -> bool {
        matches!(
            self,
            Strategy::Cellular | Strategy::HierarchicalPaging | Strategy::Manet
        )
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// One of the three cost classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostClass {
    Signalling,
    Processing,
    Air,
}

impl CostClass {
    pub const ALL: [CostClass; 3] = [CostClass::Signalling, CostClass::Processing, CostClass::Air];

    pub fn name(&self) -> &'static str {
        match self {
            CostClass::Signalling => "signalling",
            CostClass::Processing => "processing",
            CostClass::Air => "air",
        }
    }
}

impl std::fmt::Display for CostClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// The ten technology unit costs, all in one relative cost unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostConstants {
    /// Unit cost of one update on a link.
    pub c_u: f64,
    /// Unit cost of one delivery on a link.
    pub c_d: f64,
    /// Registration processing at the MAP a mobile attaches to.
    pub c_r: f64,
    /// Forwarding processing at an MA.
    pub c_f: f64,
    /// Modification of node-local records.
    pub c_m: f64,
    /// Building up a message.
    pub c_ec: f64,
    /// Recapsulating / rebuilding a message. Often `c_dc + c_ec`.
    pub c_rc: f64,
    /// Decapsulating a message at an endpoint.
    pub c_dc: f64,
    /// Air-interface uplink message.
    pub c_au: f64,
    /// Air-interface downlink message.
    pub c_ad: f64,
}

impl CostConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Params(format!(
                    "cost constant {name} must be a finite non-negative value, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn fields(&self) -> [(&'static str, f64); 10] {
        [
            ("c_u", self.c_u),
            ("c_d", self.c_d),
            ("c_r", self.c_r),
            ("c_f", self.c_f),
            ("c_m", self.c_m),
            ("c_ec", self.c_ec),
            ("c_rc", self.c_rc),
            ("c_dc", self.c_dc),
            ("c_au", self.c_au),
            ("c_ad", self.c_ad),
        ]
    }

    /// Measured IP-level constant sets shipped as named presets.
    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "MIPV4" => Ok(Self::mipv4()),
            "MIPV6" => Ok(Self::mipv6()),
            "LTRACKV4" => Ok(Self::ltrack_v4()),
            "LTRACKV6" => Ok(Self::ltrack_v6()),
            other => Err(Error::Params(format!(
                "unknown cost preset `{other}` (expected MIPV4, MIPV6, LTRACKV4 or LTRACKV6)"
            ))),
        }
    }

    pub fn mipv4() -> Self {
        CostConstants {
            c_u: 499.0,
            c_d: 1825.0,
            c_r: 187.0,
            c_f: 652.0,
            c_m: 543.0,
            c_ec: 240.0,
            c_rc: 0.0,
            c_dc: 240.0,
            c_au: 136.0,
            c_ad: 390.0,
        }
    }

    pub fn mipv6() -> Self {
        CostConstants {
            c_u: 777.0,
            c_d: 1821.0,
            c_r: 1068.0,
            c_f: 685.0,
            c_m: 1239.0,
            c_ec: 234.0,
            c_rc: 0.0,
            c_dc: 234.0,
            c_au: 181.0,
            c_ad: 396.0,
        }
    }

    pub fn ltrack_v4() -> Self {
        CostConstants {
            c_u: 481.0,
            c_d: 1814.0,
            c_r: 711.0,
            c_f: 636.0,
            c_m: 538.0,
            c_ec: 237.0,
            c_rc: 235.0,
            c_dc: 240.0,
            c_au: 138.0,
            c_ad: 368.0,
        }
    }

    pub fn ltrack_v6() -> Self {
        CostConstants {
            c_u: 695.0,
            c_d: 1843.0,
            c_r: 821.0,
            c_f: 690.0,
            c_m: 541.0,
            c_ec: 239.0,
            c_rc: 238.0,
            c_dc: 240.0,
            c_au: 165.0,
            c_ad: 397.0,
        }
    }
}

/// Multipliers combining the three cost classes into one scalar total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostClassWeights {
    pub w_sig: f64,
    pub w_proc: f64,
    pub w_air: f64,
}

impl Default for CostClassWeights {
    fn default() -> Self {
        CostClassWeights {
            w_sig: 1.0,
            w_proc: 1.0,
            w_air: 1.0,
        }
    }
}

impl CostClassWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w_sig", self.w_sig),
            ("w_proc", self.w_proc),
            ("w_air", self.w_air),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Params(format!(
                    "class weight {name} must be a finite non-negative value, got {v}"
                )));
            }
        }
        if self.w_sig == 0.0 && self.w_proc == 0.0 && self.w_air == 0.0 {
            return Err(Error::Params("class weights must not all be zero".into()));
        }
        Ok(())
    }
}

/// Paging-area descriptors required by the cellular family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PagingParams {
    pub g_c: f64,
    pub n_c: f64,
    pub n_d: f64,
    pub p_cell: f64,
}

/// Everything a strategy row may consume. `paging`, `p_manet` and `chain`
/// are optional groups; evaluating a strategy that needs an absent group
/// is a [`Error::MissingInput`].
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyInputs {
    pub rho: f64,
    pub m: f64,
    pub g_h: f64,
    pub g_t: f64,
    pub paging: Option<PagingParams>,
    /// Fraction of mobile nodes a MANET-area flood must traverse.
    pub p_manet: Option<f64>,
    pub chain: Option<ChainStatistics>,
    /// When set, cellular-family handover terms fire on boundary crossings
    /// (factor `p_cell`) instead of the default inside-area factor
    /// `1 - p_cell`.
    pub update_on_crossing: bool,
}

impl StrategyInputs {
    pub fn new(rho: f64, m: f64, g_h: f64, g_t: f64) -> Self {
        StrategyInputs {
            rho,
            m,
            g_h,
            g_t,
            paging: None,
            p_manet: None,
            chain: None,
            update_on_crossing: false,
        }
    }

    pub fn with_paging(mut self, paging: PagingParams) -> Self {
        self.paging = Some(paging);
        self
    }

    pub fn with_manet_fraction(mut self, p_m: f64) -> Self {
        self.p_manet = Some(p_m);
        self
    }

    pub fn with_chain(mut self, chain: ChainStatistics) -> Self {
        self.chain = Some(chain);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Params(format!("rho = {} outside [0,1]", self.rho)));
        }
        for (name, v) in [("m", self.m), ("g_h", self.g_h), ("g_t", self.g_t)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Params(format!(
                    "{name} must be a finite non-negative distance, got {v}"
                )));
            }
        }
        if let Some(p) = &self.paging {
            if !(0.0..=1.0).contains(&p.p_cell) {
                return Err(Error::Params(format!(
                    "p_cell = {} outside [0,1]",
                    p.p_cell
                )));
            }
            for (name, v) in [("g_c", p.g_c), ("n_c", p.n_c), ("n_d", p.n_d)] {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Params(format!(
                        "{name} must be a finite non-negative value, got {v}"
                    )));
                }
            }
        }
        if let Some(pm) = self.p_manet {
            if !(0.0..=1.0).contains(&pm) {
                return Err(Error::Params(format!("p_manet = {pm} outside [0,1]")));
            }
        }
        if let Some(c) = &self.chain {
            c.validate()?;
        }
        Ok(())
    }

    fn paging(&self, strategy: Strategy) -> Result<&PagingParams> {
        self.paging.as_ref().ok_or(Error::MissingInput {
            strategy,
            field: "paging plan (g_c, n_c, n_d, p_cell)",
        })
    }

    fn chain(&self, strategy: Strategy) -> Result<&ChainStatistics> {
        self.chain.as_ref().ok_or(Error::MissingInput {
            strategy,
            field: "chain statistics (p_h, p_0, mh_r)",
        })
    }

    fn manet_fraction(&self) -> Result<f64> {
        self.p_manet.ok_or(Error::MissingInput {
            strategy: Strategy::Manet,
            field: "p_manet",
        })
    }
}

/// Per-strategy cost triple and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub strategy: Strategy,
    pub signalling: f64,
    pub processing: f64,
    pub air: f64,
    pub total: f64,
}

/// Guard for count-like subexpressions: a negative node or hop count means
/// the parameter set breaks the row's structural assumption. Values inside
/// a tiny epsilon of zero are rounding noise from the derivation pipeline
/// (parameter sets sitting exactly on a boundary are common) and clamp to
/// zero instead of failing.
fn hops(
    value: f64,
    term: &'static str,
    assumption: &'static str,
    strategy: Strategy,
    component: CostClass,
) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -1e-9 {
        Ok(0.0)
    } else {
        Err(Error::NegativeIntermediate {
            strategy,
            component,
            term,
            value,
            assumption,
        })
    }
}

/// Evaluate one cost component of one strategy.
///
/// Each arm is the strategy's closed-form row written out literally; the
/// handover part multiplies `rho`, the paging part `1 - rho`.
pub fn component(
    strategy: Strategy,
    class: CostClass,
    inputs: &StrategyInputs,
    c: &CostConstants,
) -> Result<f64> {
    use CostClass::*;
    use Strategy::*;

    inputs.validate()?;
    c.validate()?;

    let rho = inputs.rho;
    let q = 1.0 - rho;
    let m = inputs.m;
    let g_h = inputs.g_h;
    let g_t = inputs.g_t;
    let hop = |v, term, why| hops(v, term, why, strategy, class);

    // factor in front of cellular-family handover terms: literal reading
    // charges updates while staying inside the area, the switched reading
    // charges them on boundary crossings
    let cell_update_factor = |p_cell: f64| {
        if inputs.update_on_crossing {
            p_cell
        } else {
            1.0 - p_cell
        }
    };

    let value = match (strategy, class) {
        (Centralized, Signalling) => rho * m * c.c_u + q * (m * c.c_d),
        (Centralized, Processing) => {
            let fwd_up = hop(m - 1.0, "m - 1", "HA at least one hop away")?;
            let fwd_down = hop(m - 2.0, "m - 2", "delivery path has interior nodes")?;
            rho * (c.c_r + fwd_up * c.c_f + c.c_m) + q * (c.c_ec + fwd_down * c.c_f + c.c_dc)
        }
        (Centralized, Air) => rho * c.c_au + q * c.c_ad,

        (Hierarchical, Signalling) => rho * g_h * c.c_u + q * (m * c.c_d),
        (Hierarchical, Processing) => {
            let up = hop(g_h - 1.0, "g_h - 1", "junction at least one hop away")?;
            let above = hop(
                m - g_h - 1.0,
                "m - g_h - 1",
                "HA path longer than the junction path",
            )?;
            rho * (c.c_r + up * c.c_f + c.c_m)
                + q * (c.c_ec + above * c.c_f + c.c_rc + up * c.c_f + c.c_dc)
        }
        (Hierarchical, Air) => rho * c.c_au + q * c.c_ad,

        (WirelessTracking, Signalling) => {
            let s = inputs.chain(strategy)?;
            rho * s.p_h * g_h * c.c_u
                + q * (g_h * c.c_d + s.mh_r * g_t * c.c_d + (1.0 - s.p_0) * g_h * c.c_u)
        }
        (WirelessTracking, Processing) => {
            let s = inputs.chain(strategy)?;
            let up = hop(g_h - 1.0, "g_h - 1", "junction at least one hop away")?;
            let ha_path = hop(m - 1.0, "m - 1", "HA at least one hop away")?;
            let chain_hop = hop(g_t - 1.0, "g_t - 1", "chain hop at least one link")?;
            rho * ((1.0 - s.p_h) * (c.c_r + c.c_m) + s.p_h * (c.c_r + up * c.c_f + c.c_m))
                + q * (c.c_ec
                    + ha_path * c.c_f
                    + s.p_0 * c.c_dc
                    + (1.0 - s.p_0)
                        * (s.mh_r * (chain_hop * c.c_f + c.c_rc) + c.c_dc + up * c.c_f + c.c_m))
        }
        (WirelessTracking, Air) => {
            let s = inputs.chain(strategy)?;
            rho * ((1.0 - s.p_h) * 2.0 * c.c_au + s.p_h * c.c_au) + q * c.c_ad
        }

        (WiredTracking, Signalling) => {
            let s = inputs.chain(strategy)?;
            rho * (g_t * (1.0 - s.p_h) + g_h * s.p_h) * c.c_u
                + q * (m * c.c_d + s.mh_r * g_t * c.c_d + (1.0 - s.p_0) * g_h * c.c_u)
        }
        (WiredTracking, Processing) => {
            let s = inputs.chain(strategy)?;
            let up = hop(g_h - 1.0, "g_h - 1", "junction at least one hop away")?;
            let ha_path = hop(m - 1.0, "m - 1", "HA at least one hop away")?;
            let chain_hop = hop(g_t - 1.0, "g_t - 1", "chain hop at least one link")?;
            rho * (c.c_r + chain_hop * c.c_f + c.c_m)
                + q * (c.c_ec
                    + ha_path * c.c_f
                    + s.p_0 * c.c_dc
                    + (1.0 - s.p_0)
                        * (s.mh_r * (chain_hop * c.c_f + c.c_rc) + c.c_dc + up * c.c_f + c.c_m))
        }
        (WiredTracking, Air) => rho * c.c_au + q * c.c_ad,

        (Cellular, Signalling) => {
            let p = inputs.paging(strategy)?;
            let to_head = hop(m - p.g_c, "m - g_c", "area head on the HA path")?;
            rho * cell_update_factor(p.p_cell) * g_h * c.c_u
                + q * ((to_head + p.n_c * p.g_c) * c.c_d + p.g_c * c.c_u)
        }
        (Cellular, Processing) => {
            let p = inputs.paging(strategy)?;
            let to_head = hop(
                m - p.g_c - 1.0,
                "m - g_c - 1",
                "hierarchy deeper than the paging area",
            )?;
            let in_area = hop(p.g_c - 1.0, "g_c - 1", "area radius at least one hop")?;
            rho * cell_update_factor(p.p_cell) * (c.c_r + g_h * c.c_f + c.c_m)
                + q * (c.c_ec + to_head * c.c_f + c.c_rc + in_area * p.n_c * c.c_f
                    + p.n_c * c.c_dc)
        }
        (Cellular, Air) => {
            let p = inputs.paging(strategy)?;
            rho * cell_update_factor(p.p_cell) * c.c_au + q * (p.n_c * c.c_ad + c.c_au)
        }

        (HierarchicalPaging, Signalling) => {
            let p = inputs.paging(strategy)?;
            let to_head = hop(m - p.g_c, "m - g_c", "area head on the HA path")?;
            rho * cell_update_factor(p.p_cell) * p.g_c * c.c_u
                + q * ((to_head * p.n_d + p.n_c * p.g_c) * c.c_d + p.g_c * c.c_u)
        }
        (HierarchicalPaging, Processing) => {
            let p = inputs.paging(strategy)?;
            let to_head = hop(
                m - p.g_c - 1.0,
                "m - g_c - 1",
                "hierarchy deeper than the paging area",
            )?;
            let in_area = hop(p.g_c - 1.0, "g_c - 1", "area radius at least one hop")?;
            rho * (cell_update_factor(p.p_cell) * c.c_r + p.g_c * c.c_f + c.c_m)
                + q * (c.c_ec + to_head * p.n_d * c.c_f + c.c_rc + in_area * p.n_c * c.c_f
                    + c.c_dc)
        }
        (HierarchicalPaging, Air) => {
            let p = inputs.paging(strategy)?;
            rho * cell_update_factor(p.p_cell) * c.c_au + q * (p.n_c * c.c_ad + c.c_au)
        }

        (Manet, Signalling) => {
            let p = inputs.paging(strategy)?;
            let p_m = inputs.manet_fraction()?;
            let to_border = hop(m - p.g_c + 1.0, "m - g_c + 1", "area head on the HA path")?;
            rho * cell_update_factor(p.p_cell) * g_h * c.c_u
                + q * ((to_border + p_m * p.n_c * p.g_c) * c.c_d + p.g_c * c.c_u)
        }
        (Manet, Processing) => {
            let p = inputs.paging(strategy)?;
            let p_m = inputs.manet_fraction()?;
            let to_head = hop(m - p.g_c, "m - g_c", "area head on the HA path")?;
            rho * (cell_update_factor(p.p_cell) * c.c_r + g_h * c.c_f + c.c_m)
                + q * (c.c_ec + to_head * c.c_f + c.c_rc + p_m * p.g_c * p.n_c * c.c_f + c.c_dc)
        }
        (Manet, Air) => {
            let p = inputs.paging(strategy)?;
            let p_m = inputs.manet_fraction()?;
            let in_area = hop(p.g_c - 1.0, "g_c - 1", "area radius at least one hop")?;
            rho * cell_update_factor(p.p_cell) * in_area * c.c_au
                + q * (p_m * p.n_c * p.g_c * c.c_ad + c.c_au)
        }
    };
    Ok(value)
}

/// Evaluate all three components of a strategy and combine them.
pub fn cost(
    strategy: Strategy,
    inputs: &StrategyInputs,
    c: &CostConstants,
    weights: &CostClassWeights,
) -> Result<CostBreakdown> {
    weights.validate()?;
    let signalling = component(strategy, CostClass::Signalling, inputs, c)?;
    let processing = component(strategy, CostClass::Processing, inputs, c)?;
    let air = component(strategy, CostClass::Air, inputs, c)?;
    Ok(CostBreakdown {
        strategy,
        signalling,
        processing,
        air,
        total: weights.w_sig * signalling + weights.w_proc * processing + weights.w_air * air,
    })
}

/// Sweepable parameter of [`total_cost_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Rho,
    /// Ratio `c_u / c_d`, rescaled so the product `c_u * c_d` is preserved.
    CuOverCd,
    /// Ratio `w_proc / w_sig`, rescaled so the product is preserved.
    ProcOverSig,
    /// Ratio `w_air / w_sig`, rescaled so the product is preserved.
    AirOverSig,
    M,
    GH,
    GT,
    GC,
    NC,
    ND,
    PCell,
    PManet,
}

impl SweepParameter {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(SweepParameter::Rho),
            "cu_over_cd" => Ok(SweepParameter::CuOverCd),
            "proc_over_sig" => Ok(SweepParameter::ProcOverSig),
            "air_over_sig" => Ok(SweepParameter::AirOverSig),
            "m" => Ok(SweepParameter::M),
            "g_h" => Ok(SweepParameter::GH),
            "g_t" => Ok(SweepParameter::GT),
            "g_c" => Ok(SweepParameter::GC),
            "n_c" => Ok(SweepParameter::NC),
            "n_d" => Ok(SweepParameter::ND),
            "p_cell" => Ok(SweepParameter::PCell),
            "p_manet" => Ok(SweepParameter::PManet),
            other => Err(Error::UnknownSweepParameter(other.into())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::Rho => "rho",
            SweepParameter::CuOverCd => "cu_over_cd",
            SweepParameter::ProcOverSig => "proc_over_sig",
            SweepParameter::AirOverSig => "air_over_sig",
            SweepParameter::M => "m",
            SweepParameter::GH => "g_h",
            SweepParameter::GT => "g_t",
            SweepParameter::GC => "g_c",
            SweepParameter::NC => "n_c",
            SweepParameter::ND => "n_d",
            SweepParameter::PCell => "p_cell",
            SweepParameter::PManet => "p_manet",
        }
    }
}

/// How chain statistics are refreshed along a sweep for the tracking
/// strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainMode {
    /// Keep whatever statistics are in the base inputs.
    Frozen,
    /// Re-solve the chain at each grid point for a fixed policy.
    Resolve { h: u32, p_loop: f64 },
    /// Pick the cost-optimal chain length at each grid point.
    OptimizeH { h_max: u32, p_loop: f64 },
}

fn paging_mut(inputs: &mut StrategyInputs, param: SweepParameter) -> Result<&mut PagingParams> {
    inputs.paging.as_mut().ok_or(Error::Config {
        key: param.name().into(),
        reason: "sweeping a paging parameter requires paging inputs".into(),
    })
}

/// Evaluate `total cost` for one strategy over a parameter grid.
///
/// Ratio sweeps rescale the named pair geometrically so their product stays
/// fixed; all other sweeps substitute the grid value directly. Output order
/// follows the grid, deterministically.
pub fn total_cost_curve(
    strategy: Strategy,
    param: SweepParameter,
    grid: &[f64],
    base: &StrategyInputs,
    c: &CostConstants,
    weights: &CostClassWeights,
    chain_mode: ChainMode,
) -> Result<Vec<(f64, CostBreakdown)>> {
    let mut out = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut inputs = base.clone();
        let mut constants = *c;
        let mut w = *weights;
        match param {
            SweepParameter::Rho => inputs.rho = value,
            SweepParameter::CuOverCd => {
                if !(value > 0.0) {
                    return Err(Error::Params(format!(
                        "cu_over_cd ratio must be positive, got {value}"
                    )));
                }
                let product = c.c_u * c.c_d;
                constants.c_u = (product * value).sqrt();
                constants.c_d = (product / value).sqrt();
            }
            SweepParameter::ProcOverSig => {
                if !(value > 0.0) {
                    return Err(Error::Params(format!(
                        "proc_over_sig ratio must be positive, got {value}"
                    )));
                }
                let product = weights.w_proc * weights.w_sig;
                w.w_proc = (product * value).sqrt();
                w.w_sig = (product / value).sqrt();
            }
            SweepParameter::AirOverSig => {
                if !(value > 0.0) {
                    return Err(Error::Params(format!(
                        "air_over_sig ratio must be positive, got {value}"
                    )));
                }
                let product = weights.w_air * weights.w_sig;
                w.w_air = (product * value).sqrt();
                w.w_sig = (product / value).sqrt();
            }
            SweepParameter::M => inputs.m = value,
            SweepParameter::GH => inputs.g_h = value,
            SweepParameter::GT => inputs.g_t = value,
            SweepParameter::GC => paging_mut(&mut inputs, param)?.g_c = value,
            SweepParameter::NC => paging_mut(&mut inputs, param)?.n_c = value,
            SweepParameter::ND => paging_mut(&mut inputs, param)?.n_d = value,
            SweepParameter::PCell => paging_mut(&mut inputs, param)?.p_cell = value,
            SweepParameter::PManet => inputs.p_manet = Some(value),
        }
        if strategy.is_tracking() {
            match chain_mode {
                ChainMode::Frozen => {}
                ChainMode::Resolve { h, p_loop } => {
                    let policy = crate::tracking::TrackingPolicy::new(h, p_loop)?;
                    inputs.chain = Some(crate::tracking::chain_statistics(&policy, inputs.rho)?);
                }
                ChainMode::OptimizeH { h_max, p_loop } => {
                    let (_, stats, _) = crate::tracking::optimize_h(
                        strategy, &inputs, &constants, &w, h_max, p_loop,
                    )?;
                    inputs.chain = Some(stats);
                }
            }
        }
        let breakdown = cost(strategy, &inputs, &constants, &w)?;
        out.push((value, breakdown));
    }
    Ok(out)
}

//! Flat `key = value` configuration files and the CSV matrix formats.
//!
//! The format is deliberately plain: one `key = value` per line, `#`
//! comments, dotted section names (`tracking.h_max`). Unknown keys are
//! errors, not silently ignored defaults, so typos surface immediately.
//! Matrices are header-less CSV: n rows of n comma-separated non-negative
//! decimals. Plan files are `map_index,area_id` rows; coupling files are
//! `a_index,b_index` rows.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::cost::{CostClassWeights, CostConstants, Strategy};
use crate::error::{Error, Result};
use crate::graph::{AveragingMode, NetworkGraph};
use crate::mobility::RateMatrix;
use crate::params::{DegreeMode, Overrides};
use crate::vho::{ChoiceForm, CompositeScenario};

const KNOWN_KEYS: &[&str] = &[
    "network",
    "rates",
    "mu",
    "ha",
    "maps",
    "strategy",
    "preset",
    "c_u",
    "c_d",
    "c_r",
    "c_f",
    "c_m",
    "c_ec",
    "c_rc",
    "c_dc",
    "c_au",
    "c_ad",
    "weights.sig",
    "weights.proc",
    "weights.air",
    "averaging",
    "param.m",
    "param.g_t",
    "param.delta",
    "param.g_h",
    "param.delta_mode",
    "tracking.h_max",
    "tracking.p_loop",
    "cellular.target_areas",
    "cellular.update_on_crossing",
    "cellular.plan",
    "cellular.heads",
    "manet.p_m",
    "vho.network_a",
    "vho.network_b",
    "vho.rates_a",
    "vho.rates_b",
    "vho.maps_a",
    "vho.maps_b",
    "vho.ha_a",
    "vho.ha_b",
    "vho.couplings",
    "vho.ratio_a",
    "vho.ratio_b",
    "vho.tau",
    "vho.coupling_weight",
    "vho.nu_grid",
    "vho.choice_form",
    "sim.seed",
    "sim.horizon",
    "sim.warmup",
    "sim.trace",
];

/// Parsed and fully validated scenario configuration.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub network: Option<NetworkGraph>,
    pub rates: Option<RateMatrix>,
    pub mu: Option<f64>,
    pub strategy: Option<Strategy>,
    pub constants: CostConstants,
    pub weights: CostClassWeights,
    pub averaging: AveragingMode,
    pub degree_mode: DegreeMode,
    pub overrides: Overrides,
    pub tracking_h_max: u32,
    pub tracking_p_loop: f64,
    pub target_areas: Option<usize>,
    pub update_on_crossing: bool,
    pub explicit_plan: Option<(Vec<(usize, usize)>, Vec<usize>)>,
    pub p_manet: Option<f64>,
    pub vho: Option<CompositeScenario>,
    pub nu_grid: Option<Vec<f64>>,
    pub choice_form: ChoiceForm,
    pub sim_seed: u64,
    pub sim_horizon: u64,
    pub sim_warmup: Option<u64>,
    pub sim_trace: Option<PathBuf>,
}

/// Parse a header-less numeric CSV matrix.
pub fn load_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::ConfigGeneral(format!(
                    "{}:{}: `{}` is not a number",
                    path.display(),
                    lineno + 1,
                    field.trim()
                ))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::ConfigGeneral(format!(
            "{}: matrix file is empty",
            path.display()
        )));
    }
    Ok(rows)
}

fn load_pairs(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::ConfigGeneral(format!(
                "{}:{}: expected two comma-separated indices",
                path.display(),
                lineno + 1
            )));
        }
        let a = parts[0].parse().map_err(|_| {
            Error::ConfigGeneral(format!("{}:{}: bad index", path.display(), lineno + 1))
        })?;
        let b = parts[1].parse().map_err(|_| {
            Error::ConfigGeneral(format!("{}:{}: bad index", path.display(), lineno + 1))
        })?;
        out.push((a, b));
    }
    Ok(out)
}

fn parse_map_flags(value: &str, n: usize, key: &str) -> Result<Vec<bool>> {
    if value.trim() == "all" {
        return Ok(vec![true; n]);
    }
    let mut flags = vec![false; n];
    for part in value.split(',') {
        let idx: usize = part.trim().parse().map_err(|_| {
            Error::config(key, format!("`{}` is not a node index", part.trim()))
        })?;
        if idx >= n {
            return Err(Error::config(
                key,
                format!("node index {idx} out of range for {n} nodes"),
            ));
        }
        flags[idx] = true;
    }
    Ok(flags)
}

struct Raw {
    values: BTreeMap<String, String>,
    base: PathBuf,
}

impl Raw {
    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(key, format!("cannot parse `{v}`"))),
        }
    }

    fn parse_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") => Ok(Some(true)),
            Some("false") => Ok(Some(false)),
            Some(v) => Err(Error::config(key, format!("expected true/false, got `{v}`"))),
        }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|v| {
            let p = PathBuf::from(v);
            if p.is_relative() {
                self.base.join(p)
            } else {
                p
            }
        })
    }
}

fn parse_raw(text: &str, base: &Path) -> Result<Raw> {
    let mut values = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigGeneral(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::config(&key, "unknown key".to_string()));
        }
        if values
            .insert(key.clone(), value.trim().to_string())
            .is_some()
        {
            return Err(Error::config(&key, "key given twice".to_string()));
        }
    }
    Ok(Raw {
        values,
        base: base.to_path_buf(),
    })
}

/// Parse a `lo:hi:steps`, `lo:hi:steps|log` or comma-separated grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let (body, log) = match spec.strip_suffix("|log") {
        Some(b) => (b, true),
        None => (spec, false),
    };
    if body.contains(':') {
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::ConfigGeneral(format!(
                "grid `{spec}` must be lo:hi:steps"
            )));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::ConfigGeneral(format!("bad grid bound `{}`", parts[0])))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::ConfigGeneral(format!("bad grid bound `{}`", parts[1])))?;
        let steps: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::ConfigGeneral(format!("bad grid steps `{}`", parts[2])))?;
        if steps == 0 {
            return Err(Error::ConfigGeneral("grid needs at least one step".into()));
        }
        if steps == 1 {
            return Ok(vec![lo]);
        }
        if log && (lo <= 0.0 || hi <= 0.0) {
            return Err(Error::ConfigGeneral(
                "log grids need positive bounds".into(),
            ));
        }
        let mut grid = Vec::with_capacity(steps);
        for k in 0..steps {
            let t = k as f64 / (steps - 1) as f64;
            grid.push(if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            });
        }
        Ok(grid)
    } else {
        body.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::ConfigGeneral(format!("bad grid value `{v}`")))
            })
            .collect()
    }
}

fn load_network(
    raw: &Raw,
    matrix_key: &str,
    maps_key: &str,
    ha_key: &str,
) -> Result<Option<NetworkGraph>> {
    let Some(path) = raw.path(matrix_key) else {
        return Ok(None);
    };
    let matrix = load_matrix(&path)?;
    let n = matrix.len();
    let maps = match raw.get(maps_key) {
        Some(v) => parse_map_flags(v, n, maps_key)?,
        None => vec![true; n],
    };
    let ha: usize = raw
        .parse(ha_key)?
        .ok_or_else(|| Error::config(ha_key, "required when a network is given".to_string()))?;
    Ok(Some(NetworkGraph::new(matrix, maps, ha)?))
}

fn load_rates(raw: &Raw, key: &str, reference: &NetworkGraph) -> Result<Option<RateMatrix>> {
    let Some(path) = raw.path(key) else {
        return Ok(None);
    };
    let matrix = load_matrix(&path)?;
    if matrix.len() != reference.n() {
        return Err(Error::config(
            key,
            format!(
                "rate matrix is {}x{} but the network has {} nodes",
                matrix.len(),
                matrix.len(),
                reference.n()
            ),
        ));
    }
    Ok(Some(RateMatrix::new(matrix, reference.map_flags().to_vec())?))
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str_with_base(&text, base)
    }

    pub fn from_str_with_base(text: &str, base: &Path) -> Result<Self> {
        let raw = parse_raw(text, base)?;

        let network = load_network(&raw, "network", "maps", "ha")?;
        let rates = match &network {
            Some(net) => load_rates(&raw, "rates", net)?,
            None => {
                if raw.get("rates").is_some() {
                    return Err(Error::config(
                        "rates",
                        "a rate matrix needs a network matrix".to_string(),
                    ));
                }
                None
            }
        };

        let mut constants = match raw.get("preset") {
            Some(name) => CostConstants::preset(name)?,
            None => CostConstants::mipv4(),
        };
        for key in [
            "c_u", "c_d", "c_r", "c_f", "c_m", "c_ec", "c_rc", "c_dc", "c_au", "c_ad",
        ] {
            if let Some(v) = raw.parse::<f64>(key)? {
                match key {
                    "c_u" => constants.c_u = v,
                    "c_d" => constants.c_d = v,
                    "c_r" => constants.c_r = v,
                    "c_f" => constants.c_f = v,
                    "c_m" => constants.c_m = v,
                    "c_ec" => constants.c_ec = v,
                    "c_rc" => constants.c_rc = v,
                    "c_dc" => constants.c_dc = v,
                    "c_au" => constants.c_au = v,
                    "c_ad" => constants.c_ad = v,
                    _ => unreachable!(),
                }
            }
        }
        constants.validate()?;

        let weights = CostClassWeights {
            w_sig: raw.parse("weights.sig")?.unwrap_or(1.0),
            w_proc: raw.parse("weights.proc")?.unwrap_or(1.0),
            w_air: raw.parse("weights.air")?.unwrap_or(1.0),
        };
        weights.validate()?;

        let averaging = match raw.get("averaging") {
            Some(v) => AveragingMode::parse(v)?,
            None => AveragingMode::Edges,
        };
        let degree_mode = match raw.get("param.delta_mode") {
            None | Some("b-weighted") => DegreeMode::BWeighted,
            Some("literal-n") => DegreeMode::LiteralOverN,
            Some(v) => {
                return Err(Error::config(
                    "param.delta_mode",
                    format!("expected b-weighted or literal-n, got `{v}`"),
                ))
            }
        };

        let overrides = Overrides {
            m: raw.parse("param.m")?,
            g_t: raw.parse("param.g_t")?,
            delta: raw.parse("param.delta")?,
            g_h: raw.parse("param.g_h")?,
        };

        let explicit_plan = match raw.path("cellular.plan") {
            Some(plan_path) => {
                let assignment = load_pairs(&plan_path)?;
                let heads_text = raw.get("cellular.heads").ok_or_else(|| {
                    Error::config("cellular.heads", "required with cellular.plan".to_string())
                })?;
                let heads: Vec<usize> = heads_text
                    .split(',')
                    .map(|v| {
                        v.trim().parse().map_err(|_| {
                            Error::config("cellular.heads", format!("bad index `{}`", v.trim()))
                        })
                    })
                    .collect::<Result<_>>()?;
                Some((assignment, heads))
            }
            None => None,
        };

        let strategy = match raw.get("strategy") {
            Some(v) => Some(Strategy::parse(v)?),
            None => None,
        };

        let vho = Self::load_vho(&raw)?;
        let nu_grid = match raw.get("vho.nu_grid") {
            Some(spec) => Some(parse_grid(spec)?),
            None => None,
        };
        let choice_form = match raw.get("vho.choice_form") {
            None | Some("normalized") => ChoiceForm::NormalizedExponential,
            Some("paper-literal") => ChoiceForm::PaperLiteral,
            Some(v) => {
                return Err(Error::config(
                    "vho.choice_form",
                    format!("expected normalized or paper-literal, got `{v}`"),
                ))
            }
        };

        Ok(ScenarioConfig {
            network,
            rates,
            mu: raw.parse("mu")?,
            strategy,
            constants,
            weights,
            averaging,
            degree_mode,
            overrides,
            tracking_h_max: raw.parse("tracking.h_max")?.unwrap_or(32),
            tracking_p_loop: raw.parse("tracking.p_loop")?.unwrap_or(0.0),
            target_areas: raw.parse("cellular.target_areas")?,
            update_on_crossing: raw.parse_bool("cellular.update_on_crossing")?.unwrap_or(false),
            explicit_plan,
            p_manet: raw.parse("manet.p_m")?,
            vho,
            nu_grid,
            choice_form,
            sim_seed: raw.parse("sim.seed")?.unwrap_or(1),
            sim_horizon: raw.parse("sim.horizon")?.unwrap_or(100_000),
            sim_warmup: raw.parse("sim.warmup")?,
            sim_trace: raw.path("sim.trace"),
        })
    }

    fn load_vho(raw: &Raw) -> Result<Option<CompositeScenario>> {
        let net_a = load_network(raw, "vho.network_a", "vho.maps_a", "vho.ha_a")?;
        let net_b = load_network(raw, "vho.network_b", "vho.maps_b", "vho.ha_b")?;
        let (net_a, net_b) = match (net_a, net_b) {
            (None, None) => return Ok(None),
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::ConfigGeneral(
                    "vho needs both vho.network_a and vho.network_b".into(),
                ))
            }
        };
        let rates_a = load_rates(raw, "vho.rates_a", &net_a)?
            .ok_or_else(|| Error::config("vho.rates_a", "required for vho".to_string()))?;
        let rates_b = load_rates(raw, "vho.rates_b", &net_b)?
            .ok_or_else(|| Error::config("vho.rates_b", "required for vho".to_string()))?;
        let couplings_path = raw
            .path("vho.couplings")
            .ok_or_else(|| Error::config("vho.couplings", "required for vho".to_string()))?;
        let couplings = load_pairs(&couplings_path)?;
        let mu = raw
            .parse("mu")?
            .ok_or_else(|| Error::config("mu", "required for vho".to_string()))?;
        Ok(Some(CompositeScenario {
            net_a,
            net_b,
            rates_a,
            rates_b,
            ratio_a: raw.parse("vho.ratio_a")?.unwrap_or(1.0),
            ratio_b: raw.parse("vho.ratio_b")?.unwrap_or(1.0),
            couplings,
            coupling_weight: raw.parse("vho.coupling_weight")?,
            mu,
            tau: raw.parse("vho.tau")?,
        }))
    }
}

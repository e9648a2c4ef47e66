//! Command surface of the `mobcost` binary.
//!
//! ```text
//! mobcost derive            --config scenario.conf
//! mobcost costs             --config scenario.conf [--strategy a,b] [--sweep rho=0:0.95:20]
//! mobcost optimize-tracking --config scenario.conf [--strategy wireless-tracking]
//! mobcost vho               --config scenario.conf [--strategy centralized]
//! mobcost simulate          --config scenario.conf [--strategy a]
//! mobcost validate          [--config scenario.conf] [--out report.csv]
//! ```
//!
//! Every command is deterministic given its config (randomness enters only
//! through `sim.seed`). Exit codes: 0 success, 1 validation tolerance
//! breach, 2 input error.

use std::io::Write;
use std::path::PathBuf;

use crate::config::{parse_grid, ScenarioConfig};
use crate::cost::{cost, total_cost_curve, ChainMode, Strategy, SweepParameter};
use crate::error::{Error, Result};
use crate::pipeline::{PipelineOptions, ScenarioModel};
use crate::sim::{run as run_sim, run_traced, SimConfig};
use crate::tracking::{h_cost_curve, optimize_h, TrackingPolicy};
use crate::vho::{choice_probability, sweep_nu, VhoOptions};

/// Entry point used by the binary: parses `std::env::args`.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&args, &mut stdout.lock(), &mut stderr.lock())
}

/// Run a command line against explicit writers; returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

struct Cli {
    command: String,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    strategies: Option<Vec<Strategy>>,
    sweep: Option<(SweepParameter, Vec<f64>)>,
}

fn parse_args(args: &[String]) -> Result<Cli> {
    let Some(command) = args.first() else {
        return Err(Error::ConfigGeneral(USAGE.trim().into()));
    };
    let mut cli = Cli {
        command: command.clone(),
        config: None,
        out: None,
        strategies: None,
        sweep: None,
    };
    let mut i = 1;
    while i < args.len() {
        let flag = args[i].as_str();
        let value = args.get(i + 1).ok_or_else(|| {
            Error::ConfigGeneral(format!("flag {flag} needs a value"))
        })?;
        match flag {
            "--config" => cli.config = Some(PathBuf::from(value)),
            "--out" => cli.out = Some(PathBuf::from(value)),
            "--strategy" => {
                let list = value
                    .split(',')
                    .map(|s| Strategy::parse(s.trim()))
                    .collect::<Result<Vec<_>>>()?;
                cli.strategies = Some(list);
            }
            "--sweep" => {
                let (param, grid) = value.split_once('=').ok_or_else(|| {
                    Error::ConfigGeneral(format!(
                        "--sweep expects param=lo:hi:steps[|log], got `{value}`"
                    ))
                })?;
                cli.sweep = Some((SweepParameter::parse(param.trim())?, parse_grid(grid)?));
            }
            other => {
                return Err(Error::ConfigGeneral(format!("unknown flag `{other}`")));
            }
        }
        i += 2;
    }
    Ok(cli)
}

const USAGE: &str = "
usage: mobcost <command> [flags]
commands:
  derive             print every derived network and mobility descriptor
  costs              evaluate strategy costs, optionally over a sweep
  optimize-tracking  find the cost-optimal tracking chain length
  vho                sweep the vertical handover willingness rate
  simulate           run the discrete-event simulator
  validate           cross-check analytic values against the simulator
flags:
  --config <path>    scenario config file (key = value lines)
  --out <path>       write the primary output to a file instead of stdout
  --strategy <list>  comma-separated strategy names
  --sweep p=lo:hi:n  sweep parameter p over a grid (append |log for geometric)
";

fn dispatch(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cli = parse_args(args)?;
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?,
        ),
        None => Box::new(WriterProxy(out)),
    };
    let code = match cli.command.as_str() {
        "derive" => cmd_derive(&cli, &mut *sink, err)?,
        "costs" => cmd_costs(&cli, &mut *sink, err)?,
        "optimize-tracking" => cmd_optimize_tracking(&cli, &mut *sink)?,
        "vho" => cmd_vho(&cli, &mut *sink, err)?,
        "simulate" => cmd_simulate(&cli, &mut *sink)?,
        "validate" => cmd_validate(&cli, &mut *sink)?,
        other => {
            return Err(Error::ConfigGeneral(format!(
                "unknown command `{other}`\n{}",
                USAGE.trim()
            )))
        }
    };
    sink.flush().map_err(|e| Error::io("output", e))?;
    Ok(code)
}

struct WriterProxy<'a>(&'a mut dyn Write);

impl Write for WriterProxy<'_> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.write(buf)
    }
    fn flush(&mut self) -> std::io::Result<()> {
        self.0.flush()
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::ConfigGeneral("--config is required".into()))?;
    ScenarioConfig::load(path)
}

fn pipeline_options(cfg: &ScenarioConfig) -> PipelineOptions {
    PipelineOptions {
        averaging: cfg.averaging,
        degree_mode: cfg.degree_mode,
        overrides: cfg.overrides,
        target_areas: cfg.target_areas,
        explicit_plan: cfg.explicit_plan.clone(),
    }
}

fn build_model(cfg: &ScenarioConfig) -> Result<ScenarioModel> {
    let network = cfg
        .network
        .clone()
        .ok_or_else(|| Error::config("network", "required for this command".to_string()))?;
    let rates = cfg
        .rates
        .clone()
        .ok_or_else(|| Error::config("rates", "required for this command".to_string()))?;
    let mu = cfg
        .mu
        .ok_or_else(|| Error::config("mu", "required for this command".to_string()))?;
    ScenarioModel::build(network, rates, mu, &pipeline_options(cfg))
}

fn warn_degenerate(model: &ScenarioModel, err: &mut dyn Write) -> Result<()> {
    if model.mobility.rho >= 1.0 {
        writeln!(
            err,
            "warning: mu = 0 gives rho = 1; paging costs vanish and tracking chains never reset"
        )
        .map_err(|e| Error::io("stderr", e))?;
    }
    for w in model.params.structural_warnings() {
        writeln!(err, "warning: {w}").map_err(|e| Error::io("stderr", e))?;
    }
    Ok(())
}

fn cmd_derive(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(cli)?;
    let model = build_model(&cfg)?;
    warn_degenerate(&model, err)?;
    let p = &model.params;
    let mut kv = |k: &str, v: String| -> Result<()> {
        writeln!(out, "{k} = {v}").map_err(|e| Error::io("output", e))
    };
    kv("w", format!("{} (computed)", p.w))?;
    kv("m", format!("{} ({})", p.m, p.m_source))?;
    kv("g_t", format!("{} ({})", p.g_t, p.g_t_source))?;
    kv("delta", format!("{} ({})", p.delta, p.delta_source))?;
    kv("g_h", format!("{} ({})", p.g_h, p.g_h_source))?;
    if let Some(plan) = &model.plan {
        kv("g_c", format!("{} (computed)", plan.g_c))?;
        kv("n_c", format!("{} (computed)", plan.n_c))?;
        kv("n_d", format!("{} (computed)", plan.n_d))?;
        kv("p_cell", format!("{} (computed)", plan.p_cell))?;
        kv(
            "heads",
            format!(
                "{} (computed)",
                plan.heads()
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        )?;
    }
    kv("lambda", format!("{} (computed)", model.mobility.lambda))?;
    kv("rho", format!("{} (computed)", model.mobility.rho))?;
    Ok(0)
}

fn chain_mode(cfg: &ScenarioConfig) -> ChainMode {
    ChainMode::OptimizeH {
        h_max: cfg.tracking_h_max,
        p_loop: cfg.tracking_p_loop,
    }
}

/// Strategies requested explicitly, or every strategy that evaluates on
/// this scenario (inapplicable ones are reported on stderr and skipped).
fn select_strategies(
    cli: &Cli,
    cfg: &ScenarioConfig,
    model: &ScenarioModel,
    err: &mut dyn Write,
) -> Result<Vec<Strategy>> {
    if let Some(list) = &cli.strategies {
        return Ok(list.clone());
    }
    let base = model.strategy_inputs(cfg.p_manet, cfg.update_on_crossing);
    let mut out = Vec::new();
    for strategy in Strategy::ALL {
        let mut inputs = base.clone();
        if strategy.is_tracking() {
            inputs.chain = Some(crate::tracking::chain_statistics(
                &TrackingPolicy::new(0, 0.0)?,
                inputs.rho,
            )?);
        }
        match cost(strategy, &inputs, &cfg.constants, &cfg.weights) {
            Ok(_) => out.push(strategy),
            Err(e @ (Error::MissingInput { .. } | Error::NegativeIntermediate { .. })) => {
                writeln!(err, "note: skipping {strategy}: {e}")
                    .map_err(|io| Error::io("stderr", io))?;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn cmd_costs(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(cli)?;
    let model = build_model(&cfg)?;
    warn_degenerate(&model, err)?;
    let strategies = select_strategies(cli, &cfg, &model, err)?;
    let base = model.strategy_inputs(cfg.p_manet, cfg.update_on_crossing);

    match &cli.sweep {
        Some((param, grid)) => {
            writeln!(out, "param,value,strategy,signalling,processing,air,total")
                .map_err(|e| Error::io("output", e))?;
            for strategy in strategies {
                let curve = total_cost_curve(
                    strategy,
                    *param,
                    grid,
                    &base,
                    &cfg.constants,
                    &cfg.weights,
                    chain_mode(&cfg),
                )?;
                for (value, b) in curve {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        param.name(),
                        value,
                        strategy,
                        b.signalling,
                        b.processing,
                        b.air,
                        b.total
                    )
                    .map_err(|e| Error::io("output", e))?;
                }
            }
        }
        None => {
            writeln!(out, "strategy,signalling,processing,air,total")
                .map_err(|e| Error::io("output", e))?;
            for strategy in strategies {
                let mut inputs = base.clone();
                if strategy.is_tracking() {
                    let (_, stats, _) = optimize_h(
                        strategy,
                        &inputs,
                        &cfg.constants,
                        &cfg.weights,
                        cfg.tracking_h_max,
                        cfg.tracking_p_loop,
                    )?;
                    inputs.chain = Some(stats);
                }
                let b = cost(strategy, &inputs, &cfg.constants, &cfg.weights)?;
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    strategy, b.signalling, b.processing, b.air, b.total
                )
                .map_err(|e| Error::io("output", e))?;
            }
        }
    }
    Ok(0)
}

fn cmd_optimize_tracking(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(cli)?;
    let model = build_model(&cfg)?;
    let base = model.strategy_inputs(cfg.p_manet, cfg.update_on_crossing);
    let strategies = cli
        .strategies
        .clone()
        .unwrap_or_else(|| vec![Strategy::WirelessTracking, Strategy::WiredTracking]);
    writeln!(out, "strategy,h,p_h,p_0,mh_r,total,is_optimal")
        .map_err(|e| Error::io("output", e))?;
    for strategy in strategies {
        if !strategy.is_tracking() {
            return Err(Error::Tracking(format!(
                "{strategy} has no tracking chain to optimize"
            )));
        }
        let (h_star, _, _) = optimize_h(
            strategy,
            &base,
            &cfg.constants,
            &cfg.weights,
            cfg.tracking_h_max,
            cfg.tracking_p_loop,
        )?;
        let curve = h_cost_curve(
            strategy,
            &base,
            &cfg.constants,
            &cfg.weights,
            cfg.tracking_h_max,
            cfg.tracking_p_loop,
        )?;
        for (h, total) in curve {
            let policy = TrackingPolicy::new(h, cfg.tracking_p_loop)?;
            let stats = crate::tracking::chain_statistics(&policy, base.rho)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                strategy,
                h,
                stats.p_h,
                stats.p_0,
                stats.mh_r,
                total,
                h == h_star
            )
            .map_err(|e| Error::io("output", e))?;
        }
    }
    Ok(0)
}

fn cmd_vho(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(cli)?;
    let scenario = cfg
        .vho
        .clone()
        .ok_or_else(|| Error::ConfigGeneral("vho.* keys are required for this command".into()))?;
    let grid = cfg
        .nu_grid
        .clone()
        .ok_or_else(|| Error::config("vho.nu_grid", "required for this command".to_string()))?;
    let strategies = match &cli.strategies {
        Some(list) => list.clone(),
        None => vec![cfg.strategy.ok_or_else(|| {
            Error::ConfigGeneral("set `strategy` in the config or pass --strategy".into())
        })?],
    };
    writeln!(out, "nu,strategy,total,p_choose_a,p_e1e2,p_e3e4")
        .map_err(|e| Error::io("output", e))?;
    for strategy in strategies {
        let mut options = VhoOptions::new(strategy);
        options.averaging = cfg.averaging;
        options.target_areas = cfg.target_areas;
        options.p_manet = cfg.p_manet;
        options.update_on_crossing = cfg.update_on_crossing;
        options.chain = chain_mode(&cfg);
        options.choice_form = cfg.choice_form;
        let result = sweep_nu(&scenario, &grid, &cfg.constants, &cfg.weights, &options)?;
        for point in &result.points {
            let tau = scenario.tau.unwrap_or(1.0 / point.lambda);
            let choice = choice_probability(point.nu, tau, cfg.choice_form)?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                point.nu,
                strategy,
                point.breakdown.total,
                choice.value,
                point.p_e1_e2,
                point.p_e3_e4
            )
            .map_err(|e| Error::io("output", e))?;
        }
        writeln!(
            err,
            "note: {strategy}: nu_star = {} (p_choose_a = {}, tau = {})",
            result.nu_star, result.p_choose_a.value, result.tau_used
        )
        .map_err(|e| Error::io("stderr", e))?;
        if result.p_choose_a.clamped {
            writeln!(
                err,
                "warning: paper-literal choice probability exceeded 1 and was clamped"
            )
            .map_err(|e| Error::io("stderr", e))?;
        }
    }
    Ok(0)
}

fn cmd_simulate(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = load_config(cli)?;
    let strategy = match &cli.strategies {
        Some(list) if list.len() == 1 => list[0],
        Some(_) => {
            return Err(Error::ConfigGeneral(
                "simulate takes exactly one strategy".into(),
            ))
        }
        None => cfg.strategy.ok_or_else(|| {
            Error::ConfigGeneral("set `strategy` in the config or pass --strategy".into())
        })?,
    };
    let model = build_model(&cfg)?;
    let mu = cfg.mu.expect("checked in build_model");

    let mut sim_cfg = SimConfig::new(strategy, cfg.sim_seed, cfg.sim_horizon);
    sim_cfg.warmup = cfg.sim_warmup;
    sim_cfg.constants = cfg.constants;
    sim_cfg.weights = cfg.weights;
    sim_cfg.averaging = cfg.averaging;
    sim_cfg.update_on_crossing = cfg.update_on_crossing;
    sim_cfg.p_manet = cfg.p_manet;
    sim_cfg.plan = model.plan.clone();
    sim_cfg.g_h_override = cfg.overrides.g_h;
    if strategy.is_tracking() {
        let base = model.strategy_inputs(cfg.p_manet, cfg.update_on_crossing);
        let (h_star, _, _) = optimize_h(
            strategy,
            &base,
            &cfg.constants,
            &cfg.weights,
            cfg.tracking_h_max,
            cfg.tracking_p_loop,
        )?;
        sim_cfg.tracking = Some(TrackingPolicy::new(h_star, 0.0)?);
        writeln!(out, "tracking_h={h_star}").map_err(|e| Error::io("output", e))?;
    }

    let report = match &cfg.sim_trace {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            writeln!(file, "time,event,from,to,cost_sig,cost_proc,cost_air")
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            run_traced(&model.graph, &model.rates, mu, &sim_cfg, &mut file)?
        }
        None => run_sim(&model.graph, &model.rates, mu, &sim_cfg)?,
    };
    write!(out, "{}", report.summary_text()).map_err(|e| Error::io("output", e))?;
    writeln!(out).map_err(|e| Error::io("output", e))?;
    write!(out, "{}", report.csv_blocks()).map_err(|e| Error::io("output", e))?;
    Ok(0)
}

fn cmd_validate(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    // config is optional; it can override horizon and seed
    let (seed, horizon) = match &cli.config {
        Some(path) => {
            let cfg = ScenarioConfig::load(path)?;
            (cfg.sim_seed, cfg.sim_horizon)
        }
        None => (20_260_101, 1_000_000),
    };
    let checks = crate::validate::run_suite(seed, horizon)?;
    writeln!(out, "quantity,fixture,analytic,empirical,tolerance,status")
        .map_err(|e| Error::io("output", e))?;
    let mut failures = 0;
    for c in &checks {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.quantity,
            c.fixture,
            c.analytic,
            c.empirical,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        )
        .map_err(|e| Error::io("output", e))?;
        if !c.pass {
            failures += 1;
        }
    }
    writeln!(out, "# {} checks, {} failures", checks.len(), failures)
        .map_err(|e| Error::io("output", e))?;
    Ok(if failures == 0 { 0 } else { 1 })
}

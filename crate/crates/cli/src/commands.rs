//! Subcommand implementations. Each returns a [`Report`] plus the exit code
//! it should end with; only argument and input errors short-circuit.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use entroof::locc::{self, IssueKind, NodeId, ValidationReport};
use entroof::roof::{solve_roof, RoofOptions, RoofProblem};
use entroof::{Density, Direction, LogBase, MeasureSpec, State};
use serde_json::{json, Map, Value};

use crate::args::{Cli, Command, DirectionArg, LogBaseArg, MeasureParams, RoofFlags};
use crate::files::{pair, LoadedState, StateFile, TreeFile};
use crate::report::{sha256_hex, Deterministic, InputDigest, Report, Timings};
use crate::{exit, CliError};

/// Largest acceptable trace-norm residual of a returned ensemble.
pub const RECONSTRUCTION_LIMIT: f64 = 1e-8;

/// Execution knobs that must not influence the deterministic report.
#[derive(Clone, Copy, Debug)]
pub struct RunSettings {
    pub parallel: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self { parallel: true }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line. `echo` is recorded verbatim in the report.
pub fn run(cli: &Cli, echo: &[String], settings: RunSettings) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut inputs = Vec::new();
    let (command, config, results, code, out) = match &cli.command {
        Command::Measure(c) => {
            let (cfg, res) = measure(&c.state, &c.params, &mut inputs)?;
            ("measure", cfg, res, exit::OK, c.out.out.clone())
        }
        Command::Roof(c) => {
            let (cfg, res, code) = roof(&c.state, &c.params, &c.roof, c.direction, settings, &mut inputs)?;
            ("roof", cfg, res, code, c.out.out.clone())
        }
        Command::Sweep(c) => {
            let (cfg, res) = sweep(&c.state, &c.params, &c.p_grid, &c.roof, settings, &mut inputs)?;
            ("sweep", cfg, res, exit::OK, c.out.out.clone())
        }
        Command::Locc(c) => {
            let (cfg, res, code) = locc_audit(&c.tree, &c.state, &c.params, &c.roof, settings, &mut inputs)?;
            ("locc", cfg, res, code, c.out.out.clone())
        }
    };
    let mut full = Map::new();
    full.insert("subcommand".into(), json!(command));
    full.extend(config);
    let report = Report {
        deterministic: Deterministic { command: echo.to_vec(), inputs, config: full, results },
        timings: Timings { wall_clock_seconds: start.elapsed().as_secs_f64() },
    };
    Ok(Outcome { report, code, out })
}

fn read_input(path: &Path, role: &str, inputs: &mut Vec<InputDigest>) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
    inputs.push(InputDigest { role: role.into(), path: path.display().to_string(), sha256: sha256_hex(&bytes) });
    String::from_utf8(bytes).map_err(|_| CliError::malformed(format!("{} is not UTF-8", path.display())))
}

fn load_state(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<LoadedState, CliError> {
    StateFile::parse(&read_input(path, "state", inputs)?)?.load()
}

/// Builds the measure from flags, rejecting flags that do not apply to it.
pub fn measure_spec(params: &MeasureParams) -> Result<MeasureSpec, CliError> {
    let name = params.measure.as_str();
    let reject = |flag: &str| CliError::invalid(format!("--{flag} does not apply to measure '{name}'"));
    if params.p.is_some() && name != "p-number" {
        return Err(reject("p"));
    }
    if params.k.is_some() && name != "concurrence" {
        return Err(reject("k"));
    }
    if params.ranks.is_some() && name != "geometric" {
        return Err(reject("ranks"));
    }
    Ok(match name {
        "e" | "entanglement-number" => MeasureSpec::EntanglementNumber,
        "p-number" => MeasureSpec::PNumber { p: params.p.ok_or_else(|| CliError::invalid("p-number needs --p"))? },
        "entropy" => MeasureSpec::EntanglementEntropy { base: log_base(params.log_base) },
        "negativity" => MeasureSpec::Negativity,
        "concurrence" => MeasureSpec::Concurrence { k: params.k.ok_or_else(|| CliError::invalid("concurrence needs --k"))? },
        "geometric" => MeasureSpec::GeometricMeasure { ranks: parse_ranks(params.ranks.as_deref().unwrap_or("1,1"))? },
        other => {
            return Err(CliError::invalid(format!(
                "unknown measure '{other}' (expected e, entanglement-number, p-number, entropy, negativity, concurrence, geometric)"
            )))
        }
    })
}

fn log_base(arg: LogBaseArg) -> LogBase {
    match arg {
        LogBaseArg::Two => LogBase::Two,
        LogBaseArg::E => LogBase::E,
    }
}

fn parse_ranks(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::invalid(format!("--ranks: '{s}' is not a non-negative integer")))
        })
        .collect()
}

fn measure_config(spec: &MeasureSpec, params: &MeasureParams) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("measure".into(), json!(spec.name()));
    match spec {
        MeasureSpec::PNumber { p } => {
            m.insert("p".into(), json!(p));
        }
        MeasureSpec::Concurrence { k } => {
            m.insert("k".into(), json!(k));
        }
        MeasureSpec::GeometricMeasure { ranks } => {
            m.insert("ranks".into(), json!(ranks));
            m.insert("geometric_restarts".into(), json!(entroof::measures::GEOMETRIC_RESTARTS));
        }
        _ => {}
    }
    let base = match params.log_base {
        LogBaseArg::Two => "2",
        LogBaseArg::E => "e",
    };
    m.insert("log_base".into(), json!(base));
    m
}

/// Resolves roof flags against the defaults and validates them.
pub fn roof_options(flags: &RoofFlags, settings: RunSettings) -> Result<RoofOptions, CliError> {
    let opts = RoofOptions {
        ensemble_size: flags.m,
        restarts: flags.restarts,
        tol: flags.tol,
        seed: flags.seed,
        parallel: settings.parallel,
        ..RoofOptions::default()
    };
    opts.validate().map_err(CliError::from_core)?;
    Ok(opts)
}

fn roof_config(opts: &RoofOptions, rank: usize) -> Map<String, Value> {
    let mut m = Map::new();
    let size = opts.ensemble_size.unwrap_or(rank * rank);
    m.insert("ensemble_size".into(), json!(size));
    m.insert("ensemble_size_default".into(), json!("rank^2"));
    m.insert("restarts".into(), json!(opts.restarts));
    m.insert("max_iters".into(), json!(opts.max_iters));
    m.insert("tol".into(), json!(opts.tol));
    m.insert("seed".into(), json!(opts.seed));
    m.insert("fd_step".into(), json!(opts.fd_step));
    m
}

fn vector_json(psi: &State) -> Value {
    json!(psi.amplitudes().iter().map(|z| pair(*z)).collect::<Vec<_>>())
}

fn measure(
    path: &Path,
    params: &MeasureParams,
    inputs: &mut Vec<InputDigest>,
) -> Result<(Map<String, Value>, Value), CliError> {
    let spec = measure_spec(params)?;
    let psi = match load_state(path, inputs)? {
        LoadedState::Pure(psi) => psi,
        LoadedState::Density(rho) => rho.as_pure().ok_or_else(|| {
            CliError::malformed("measure needs a pure state; the density operator has rank > 1 (use `roof`)")
        })?,
    };
    spec.validate(psi.dims()).map_err(CliError::from_core)?;
    let value = spec.evaluate(&psi).map_err(CliError::from_core)?;
    let results = json!({ "value": value, "schmidt_lambdas": psi.schmidt_weights() });
    Ok((measure_config(&spec, params), results))
}

fn roof(
    path: &Path,
    params: &MeasureParams,
    flags: &RoofFlags,
    direction: DirectionArg,
    settings: RunSettings,
    inputs: &mut Vec<InputDigest>,
) -> Result<(Map<String, Value>, Value, i32), CliError> {
    let spec = measure_spec(params)?;
    let opts = roof_options(flags, settings)?;
    let rho = load_state(path, inputs)?.to_density();
    spec.validate(rho.dims()).map_err(CliError::from_core)?;
    let direction = match direction {
        DirectionArg::Min => Direction::Minimize,
        DirectionArg::Max => Direction::Maximize,
    };
    let rank = rho.rank();
    let mut config = measure_config(&spec, params);
    config.extend(roof_config(&opts, rank));
    config.insert("direction".into(), json!(if direction == Direction::Minimize { "min" } else { "max" }));

    let problem =
        RoofProblem { rho: rho.clone(), objective: entroof::PureObjective::Measure(spec), direction, options: opts };
    let res = solve_roof(&problem).map_err(CliError::from_core)?;
    let residual = res.ensemble.reconstruction_residual(&rho).map_err(CliError::from_core)?;
    let members: Vec<Value> = res
        .ensemble
        .weights()
        .iter()
        .zip(res.ensemble.states())
        .map(|(w, s)| json!({ "weight": w, "state": vector_json(s) }))
        .collect();
    let results = json!({
        "value": res.value,
        "rank": rank,
        "gap_estimate": res.gap_estimate,
        "converged": res.converged,
        "reconstruction_residual": residual,
        "ensemble": members,
        "restart_values": res.restart_values,
        "perturbations": res.perturbations,
        "objective_trace": res.objective_trace,
    });
    let code = if residual <= RECONSTRUCTION_LIMIT {
        exit::OK
    } else {
        eprintln!("error: ensemble reconstruction residual {residual:e} exceeds {RECONSTRUCTION_LIMIT:e}");
        exit::INTERNAL
    };
    Ok((config, results, code))
}

/// Parses an inclusive `START:STOP:STEP` grid of p values, all `> 1`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::invalid(format!("--p-grid '{text}' must be START:STOP:STEP"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad());
    }
    if start <= 1.0 || stop <= 1.0 {
        return Err(CliError::invalid(format!("--p-grid bounds must exceed 1, got {start} and {stop}")));
    }
    if step <= 0.0 || stop < start {
        return Err(CliError::invalid("--p-grid needs STEP > 0 and STOP >= START"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(CliError::invalid("--p-grid has more than 100000 points"));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn sweep(
    path: &Path,
    params: &MeasureParams,
    grid: &str,
    flags: &RoofFlags,
    settings: RunSettings,
    inputs: &mut Vec<InputDigest>,
) -> Result<(Map<String, Value>, Value), CliError> {
    if params.measure != "p-number" {
        return Err(CliError::invalid("sweep supports --measure p-number only"));
    }
    if params.p.is_some() {
        return Err(CliError::invalid("sweep takes p values from --p-grid, not --p"));
    }
    let ps = parse_grid(grid)?;
    let opts = roof_options(flags, settings)?;
    let state = load_state(path, inputs)?;
    let rho = state.to_density();
    let pure = match &state {
        LoadedState::Pure(psi) => Some(psi.clone()),
        LoadedState::Density(d) => d.as_pure(),
    };

    let mut config = Map::new();
    config.insert("measure".into(), json!("p-number"));
    config.insert("p_grid".into(), json!(ps));
    if pure.is_none() {
        config.extend(roof_config(&opts, rho.rank()));
    }

    let mut rows = Vec::with_capacity(ps.len());
    for &p in &ps {
        let spec = MeasureSpec::PNumber { p };
        let (value, gap) = match &pure {
            Some(psi) => (spec.evaluate(psi).map_err(CliError::from_core)?, 0.0),
            None => {
                let res =
                    solve_roof(&RoofProblem::minimize(rho.clone(), spec, opts.clone())).map_err(CliError::from_core)?;
                (res.value, res.gap_estimate)
            }
        };
        rows.push((p, value, gap));
    }
    let strictly_increasing = rows.windows(2).all(|w| w[1].1 > w[0].1);
    let nondecreasing_within_gap = rows.windows(2).all(|w| w[1].1 >= w[0].1 - 2.0 * w[0].2.max(w[1].2));
    let csv: String = std::iter::once("p,value".to_string())
        .chain(rows.iter().map(|(p, v, _)| format!("{p:.16e},{v:.16e}")))
        .collect::<Vec<_>>()
        .join("\n");
    let table: Vec<Value> = rows
        .iter()
        .map(|(p, v, g)| json!({ "p": p, "value": v, "gap_estimate": g, "exact": pure.is_some() }))
        .collect();
    let results = json!({
        "rows": table,
        "strictly_increasing": strictly_increasing,
        "nondecreasing_within_gap": nondecreasing_within_gap,
        "csv": csv,
    });
    Ok((config, results))
}

fn id_json(id: &NodeId) -> Value {
    json!(id)
}

fn validation_json(report: &ValidationReport) -> Value {
    let issues: Vec<Value> = report
        .issues
        .iter()
        .map(|i| match &i.kind {
            IssueKind::Incomplete { residual } => {
                json!({ "node": id_json(&i.node), "kind": "incomplete", "residual": residual })
            }
            IssueKind::DimensionMismatch { detail } => {
                json!({ "node": id_json(&i.node), "kind": "dimension-mismatch", "detail": detail })
            }
            IssueKind::Malformed { detail } => {
                json!({ "node": id_json(&i.node), "kind": "malformed", "detail": detail })
            }
        })
        .collect();
    json!({ "valid": report.is_valid(), "issues": issues })
}

fn locc_audit(
    tree_path: &Path,
    state_path: &Path,
    params: &MeasureParams,
    flags: &RoofFlags,
    settings: RunSettings,
    inputs: &mut Vec<InputDigest>,
) -> Result<(Map<String, Value>, Value, i32), CliError> {
    let spec = measure_spec(params)?;
    let opts = roof_options(flags, settings)?;
    let (tree_dims, tree) = TreeFile::parse(&read_input(tree_path, "tree", inputs)?)?.load()?;
    let rho: Density = load_state(state_path, inputs)?.to_density();
    spec.validate(rho.dims()).map_err(CliError::from_core)?;

    let mut config = measure_config(&spec, params);
    config.extend(roof_config(&opts, rho.rank()));
    config.insert("completeness_tol".into(), json!(locc::COMPLETENESS_TOL));
    config.insert("prune_probability".into(), json!(locc::PRUNE_PROBABILITY));
    config.insert("violation_margin".into(), json!(locc::VIOLATION_MARGIN));

    let mut validation = locc::validate_tree(&tree, rho.dims());
    if tree_dims != rho.dims() {
        validation.issues.insert(
            0,
            locc::Issue {
                node: Vec::new(),
                kind: IssueKind::DimensionMismatch {
                    detail: format!(
                        "tree declares {}x{} but the state is {}x{}",
                        tree_dims.dim_a(),
                        tree_dims.dim_b(),
                        rho.dims().dim_a(),
                        rho.dims().dim_b()
                    ),
                },
            },
        );
    }
    if !validation.is_valid() {
        for issue in &validation.issues {
            eprintln!("invalid tree at node {:?}: {:?}", issue.node, issue.kind);
        }
        return Ok((config, json!({ "validation": validation_json(&validation) }), exit::INVALID_TREE));
    }

    let audit = locc::audit_monotonicity(&tree, &rho, &spec, &opts).map_err(CliError::from_core)?;
    let levels: Vec<Value> = audit
        .run
        .levels
        .iter()
        .map(|level| {
            let branches: Vec<Value> = level
                .iter()
                .map(|b| {
                    let v = audit.values.get(&b.node);
                    json!({
                        "node": id_json(&b.node),
                        "probability": b.probability,
                        "conditional": b.conditional,
                        "value": v.map(|v| v.value),
                        "gap_estimate": v.map(|v| v.gap),
                        "exact": v.map(|v| v.exact),
                        "pruned": v.is_none(),
                    })
                })
                .collect();
            json!(branches)
        })
        .collect();
    let rows: Vec<Value> = audit
        .rows
        .iter()
        .map(|r| {
            json!({
                "node": id_json(&r.node),
                "parent_value": r.parent.value,
                "children_average": r.children_average,
                "slack": r.slack,
                "gap_sum": r.gap_sum,
                "exact": r.exact,
                "violation": r.violation,
            })
        })
        .collect();
    let e2e = audit.end_to_end.as_ref().expect("full audit includes the end-to-end inequality");
    let trace_out = audit.run.output.matrix().trace().re;
    let results = json!({
        "validation": validation_json(&validation),
        "levels": levels,
        "level_probability_sums": audit.run.level_sums(),
        "output_trace": trace_out,
        "final_nodes": audit.run.final_nodes,
        "pruned": audit.pruned,
        "nodes": rows,
        "min_slack": if audit.rows.is_empty() { None } else { Some(audit.min_slack()) },
        "end_to_end": {
            "input_value": e2e.input.value,
            "output_value": e2e.output.value,
            "input_gap_estimate": e2e.input.gap,
            "output_gap_estimate": e2e.output.gap,
            "slack": e2e.slack,
            "violation": e2e.violation,
        },
        "violation": audit.has_violation(),
    });
    Ok((config, results, exit::OK))
}

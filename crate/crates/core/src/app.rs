//! Subcommand pipelines. Each returns named output files as bytes so the
//! caller decides where they land; nothing here reads clocks, so outputs are
//! byte-stable for a fixed scenario and seed base.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::geometry::{candidate_mounts, hole_fraction, project_fov, CoverageMask, Grid, Mount};
use crate::io::{fmt_sig9, parse_scenario, round9, write_atomic, CsvTable, Scenario, ScenarioError};
use crate::lifetime::{lifetime_sensor, lifetime_switch, sweep_alpha, threat_points, GameSolution};
use crate::placement::{build_mpc, hole_unaware_placement, solve_exact, CoverageProblem, PlacementSolution};
use crate::relay::{build_weighted_graph, evaluate_tree, place_relays, PlannerMode};
use crate::sim::{
    frontier_from_log, generate_trace, wastage_at_comfort, ActivityTrace, EventKind, FrontierPoint, ReplayLog,
    SensingField,
};
use crate::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Scenario(ScenarioError::Io { .. }) => 4,
            AppError::Scenario(_) => 2,
            AppError::Model(Error::Infeasible(_) | Error::NoAgreement { .. }) => 3,
            AppError::Model(Error::InvalidArgument(_)) => 2,
            AppError::Model(_) => 1,
            AppError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Usage(_) => "usage",
            AppError::Scenario(ScenarioError::Io { .. }) => "io",
            AppError::Scenario(ScenarioError::Parse { .. }) => "parse",
            AppError::Scenario(ScenarioError::Semantic { .. }) => "semantic",
            AppError::Scenario(ScenarioError::Version(_)) => "schema_version",
            AppError::Model(Error::Infeasible(_)) => "infeasible",
            AppError::Model(Error::NoAgreement { .. }) => "no_agreement",
            AppError::Model(Error::InvalidArgument(_)) => "invalid_argument",
            AppError::Model(Error::SizeLimit(_)) => "size_limit",
            AppError::Model(Error::Internal(_)) => "internal",
            AppError::Io { .. } => "io",
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        let mut v = json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() });
        if let AppError::Scenario(ScenarioError::Semantic { field, .. }) = self {
            v["field"] = json!(field);
        }
        if let AppError::Scenario(ScenarioError::Parse { line, column, .. }) = self {
            v["line"] = json!(line);
            v["column"] = json!(column);
        }
        v.to_string()
    }
}

pub type AppResult<T> = std::result::Result<T, AppError>;

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn json(name: &str, value: Value) -> Self {
        let mut bytes = serde_json::to_vec_pretty(&stable(value)).expect("json value serializes");
        bytes.push(b'\n');
        Artifact { name: name.into(), bytes }
    }

    fn csv(name: &str, table: &CsvTable) -> Self {
        Artifact { name: name.into(), bytes: table.to_bytes() }
    }
}

/// Rounds every float to nine significant digits.
fn stable(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round9(n.as_f64().unwrap_or_default());
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(stable).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stable(v))).collect()),
        other => other,
    }
}

fn f(v: f64) -> String {
    fmt_sig9(v)
}

/// A loaded scenario plus its provenance.
#[derive(Debug, Clone)]
pub struct Run {
    pub scenario: Scenario,
    pub scenario_sha256: String,
}

impl Run {
    pub fn load(path: &Path, preset_dir: Option<&Path>, seed: Option<u64>) -> AppResult<Self> {
        let (scenario, hash) = parse_scenario(path, preset_dir)?;
        Ok(Run::new(scenario, hash, seed))
    }

    pub fn new(mut scenario: Scenario, scenario_sha256: String, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            scenario.seeds.base = s;
        }
        Run { scenario, scenario_sha256 }
    }

    fn provenance(&self, command: &str) -> Value {
        json!({
            "command": command,
            "scenario": self.scenario.name,
            "scenario_sha256": self.scenario_sha256,
            "seed_base": self.scenario.seeds.base,
            "trace_count": self.scenario.occupants.trace_count,
        })
    }

    fn table(&self, command: &str, header: &[&str]) -> CsvTable {
        CsvTable::new(header)
            .comment("command", command)
            .comment("scenario", self.scenario.name.clone())
            .comment("scenario_sha256", self.scenario_sha256.clone())
            .comment("seed_base", self.scenario.seeds.base.to_string())
    }
}

/// Grid, candidate masks and the solved placement for one k.
pub struct PlacementRun {
    pub grid: Grid,
    pub candidates: Vec<CoverageMask>,
    pub solution: PlacementSolution,
}

pub fn solve_placement(sc: &Scenario, k: usize) -> AppResult<PlacementRun> {
    let grid = sc.grid()?;
    let candidates = candidate_mounts(&grid, &sc.pattern(), &sc.candidate_spec())?;
    let problem = CoverageProblem::new(grid.clone(), candidates.clone(), k)?;
    let model = build_mpc(&problem)?;
    let budget = Duration::from_secs_f64(sc.placement.time_budget_s);
    let solution = solve_exact(&model, Some(budget))?;
    Ok(PlacementRun { grid, candidates, solution })
}

fn hole_unaware(grid: &Grid, candidates: &[CoverageMask]) -> AppResult<PlacementSolution> {
    let problem = CoverageProblem::new(grid.clone(), candidates.to_vec(), 1)?;
    Ok(hole_unaware_placement(&problem)?)
}

fn masks_for(run: &PlacementRun, sol: &PlacementSolution) -> Vec<CoverageMask> {
    sol.indices.iter().map(|&i| run.candidates[i].clone()).collect()
}

fn placement_json(run: &Run, label: &str, grid: &Grid, sol: &PlacementSolution, k: usize) -> AppResult<Value> {
    let sc = &run.scenario;
    let desk = sol.region_coverage(grid, &sc.desk())?;
    let covered = sol.covered.iter().filter(|&&c| c).count();
    Ok(json!({
        "provenance": run.provenance("place"),
        "label": label,
        "k": k,
        "candidate_indices": sol.indices,
        "mounts": sol.mounts,
        "objective": sol.objective,
        "weighted_fraction": sol.weighted_fraction,
        "covered_points": covered,
        "grid_points": grid.len(),
        "coverage_fraction": covered as f64 / grid.len() as f64,
        "desk_coverage": desk,
        "optimal": sol.optimal,
    }))
}

fn mounts_table(run: &Run, command: &str, sol: &PlacementSolution) -> CsvTable {
    let mut t = run.table(command, &["candidate", "x_m", "y_m", "yaw_deg"]);
    for (i, m) in sol.indices.iter().zip(&sol.mounts) {
        t.push(vec![i.to_string(), f(m.x), f(m.y), f(m.yaw_deg)]);
    }
    t
}

pub fn cmd_place(run: &Run, k: Option<usize>) -> AppResult<Vec<Artifact>> {
    let k = k.unwrap_or(run.scenario.placement.k);
    if k == 0 {
        return Err(AppError::Usage("--k must be at least 1".into()));
    }
    let p = solve_placement(&run.scenario, k)?;
    Ok(vec![
        Artifact::json("placement.json", placement_json(run, &format!("optimal{k}"), &p.grid, &p.solution, k)?),
        Artifact::csv("placement.csv", &mounts_table(run, "place", &p.solution)),
    ])
}

fn game_rows(run: &Run, command: &str, rows: &[GameSolution]) -> CsvTable {
    let mut t = run.table(
        command,
        &["alpha", "wakeup_period_s", "lifetime_sensor_years", "lifetime_switch_years", "nash_product"],
    );
    for r in rows {
        t.push(vec![
            f(r.alpha),
            f(r.wakeup_period_s),
            f(r.lifetime_sensor_years),
            f(r.lifetime_switch_years),
            f(r.nash_product),
        ]);
    }
    t
}

struct GameRun {
    rows: Vec<GameSolution>,
    threat: (f64, f64),
    sensor_best: f64,
    switch_best: f64,
}

fn run_game(sc: &Scenario, alphas: &[f64]) -> AppResult<GameRun> {
    let p = sc.energy();
    let rows = sweep_alpha(&p, alphas)?;
    Ok(GameRun {
        rows,
        threat: threat_points(&p)?,
        sensor_best: lifetime_sensor(p.t_min_s, &p)?,
        switch_best: lifetime_switch(p.t_max_s, &p)?,
    })
}

pub fn cmd_game(run: &Run, alphas: Option<&[f64]>) -> AppResult<Vec<Artifact>> {
    let alphas = alphas.map(<[f64]>::to_vec).unwrap_or_else(|| run.scenario.alphas());
    if alphas.is_empty() {
        return Err(AppError::Usage("--alpha needs at least one value".into()));
    }
    let g = run_game(&run.scenario, &alphas)?;
    let p = run.scenario.energy();
    let summary = json!({
        "provenance": run.provenance("game"),
        "energy": p,
        "threat_point_sensor_years": g.threat.0,
        "threat_point_switch_years": g.threat.1,
        "sensor_lifetime_at_t_min_years": g.sensor_best,
        "switch_lifetime_at_t_max_years": g.switch_best,
        "solutions": g.rows,
    });
    Ok(vec![Artifact::csv("game_sweep.csv", &game_rows(run, "game", &g.rows)), Artifact::json("game.json", summary)])
}

pub fn cmd_relay(run: &Run, mode: Option<PlannerMode>) -> AppResult<Vec<Artifact>> {
    relay_artifacts(run, mode, "relay")
}

fn relay_artifacts(run: &Run, mode: Option<PlannerMode>, command: &str) -> AppResult<Vec<Artifact>> {
    let r = run
        .scenario
        .relay
        .as_ref()
        .ok_or_else(|| AppError::Usage("scenario has no [relay] section".into()))?;
    let mode = mode.unwrap_or(r.mode);
    let pts = |v: &[[f64; 2]]| v.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>();
    let sensors = pts(&r.sensors_m);
    let candidates = pts(&r.candidates_m);
    let graph = build_weighted_graph(&sensors, &candidates, (r.sink_m[0], r.sink_m[1]), &r.channel(), &r.limits())?;
    let sol = place_relays(&graph, r.outage_cap, mode)?;
    let delivery = evaluate_tree(&sol, r.packets_per_day)?;

    let mut links = run.table(command, &["a", "b", "kind_a", "kind_b", "distance_m", "outage", "weight", "in_tree"]);
    let kind = |i: usize| match graph.nodes[i].kind {
        crate::relay::NodeKind::Sensor => "sensor",
        crate::relay::NodeKind::Candidate => "candidate",
        crate::relay::NodeKind::Sink => "sink",
    };
    for e in &graph.edges {
        let in_tree = sol.tree_edges.iter().any(|t| (t.a, t.b) == (e.a, e.b) || (t.a, t.b) == (e.b, e.a));
        links.push(vec![
            e.a.to_string(),
            e.b.to_string(),
            kind(e.a).into(),
            kind(e.b).into(),
            f(e.distance_m),
            f(e.outage),
            f(e.weight),
            u8::from(in_tree).to_string(),
        ]);
    }
    let summary = json!({
        "provenance": run.provenance(command),
        "mode": mode,
        "relay_count": sol.relays.len(),
        "relay_lower_bound": sol.lower_bound,
        "exact": sol.exact,
        "relays": sol.relays,
        "relay_positions": sol.relay_positions,
        "tree_edges": sol.tree_edges,
        "tree_cost": sol.tree_cost,
        "connected": sol.connected,
        "delivery": delivery,
    });
    Ok(vec![Artifact::json("relay.json", summary), Artifact::csv("relay_links.csv", &links)])
}

/// Placement file written by `place`, read back by `simulate`.
#[derive(Debug, Deserialize, Serialize)]
struct PlacementFile {
    mounts: Vec<Mount>,
}

pub fn load_placement_mounts(path: &Path) -> AppResult<Vec<Mount>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let p: PlacementFile = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("{}: not a placement file: {e}", path.display())))?;
    Ok(p.mounts)
}

pub fn generate_traces(sc: &Scenario) -> AppResult<Vec<ActivityTrace>> {
    let model = sc.occupant_model();
    sc.trace_seeds()
        .into_iter()
        .map(|s| generate_trace(&model, sc.occupants.trace_duration_s, s).map_err(AppError::from))
        .collect()
}

fn trace_table(run: &Run, trace: &ActivityTrace) -> CsvTable {
    let mut t = run.table("simulate", &["t_s", "kind", "x_m", "y_m", "extent_m"]).comment("trace_seed", trace.seed.to_string());
    for e in &trace.events {
        let kind = match e.kind {
            EventKind::Enter => "enter",
            EventKind::Leave => "leave",
            EventKind::Motion => "motion",
        };
        t.push(vec![f(e.t_s), kind.into(), f(e.x), f(e.y), f(e.extent_m)]);
    }
    t
}

/// Sensing summary of one mask set over the trace suite.
struct SimRun {
    label: String,
    log: ReplayLog,
    frontier: Vec<FrontierPoint>,
}

impl SimRun {
    fn new(label: &str, masks: &[CoverageMask], grid: &Grid, traces: &[ActivityTrace], timeouts: &[f64]) -> AppResult<Self> {
        let field = SensingField::new(masks, grid)?;
        let log = ReplayLog::build(traces, &field, grid)?;
        let frontier = frontier_from_log(&log, timeouts);
        Ok(SimRun { label: label.into(), log, frontier })
    }
}

fn metrics_table(run: &Run, sim: &SimRun, timeouts: &[f64]) -> CsvTable {
    let mut t = run.table(
        "simulate",
        &["timeout_s", "comfort_level", "energy_wastage", "ta_cdf", "occupied_s", "vacant_s", "occupied_on_s", "vacant_on_s"],
    );
    for &to in timeouts {
        let m = sim.log.metrics(to, &[]);
        t.push(vec![
            f(to),
            f(m.comfort_level),
            f(m.energy_wastage),
            f(sim.log.ta(to)),
            m.occupied_s.to_string(),
            m.vacant_s.to_string(),
            m.occupied_on_s.to_string(),
            m.vacant_on_s.to_string(),
        ]);
    }
    t
}

fn check_timeouts(timeouts: &[f64]) -> AppResult<()> {
    if timeouts.is_empty() || timeouts.iter().any(|&t| !(t > 0.0)) || timeouts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AppError::Usage("--timeouts must be positive and strictly increasing".into()));
    }
    Ok(())
}

pub fn cmd_simulate(run: &Run, placement: Option<&Path>, k: Option<usize>, timeouts: Option<&[f64]>) -> AppResult<Vec<Artifact>> {
    let sc = &run.scenario;
    let timeouts = timeouts.map(<[f64]>::to_vec).unwrap_or_else(|| sc.occupants.timeouts_s.clone());
    check_timeouts(&timeouts)?;
    let grid = sc.grid()?;
    let (label, masks) = match placement {
        Some(path) => {
            let pattern = sc.pattern();
            let masks = load_placement_mounts(path)?
                .into_iter()
                .map(|m| project_fov(&pattern, m, &grid))
                .collect::<crate::Result<Vec<_>>>()?;
            ("file".to_string(), masks)
        }
        None => {
            let k = k.unwrap_or(sc.placement.k);
            let p = solve_placement(sc, k)?;
            let masks = masks_for(&p, &p.solution);
            (format!("optimal{k}"), masks)
        }
    };
    let traces = generate_traces(sc)?;
    let sim = SimRun::new(&label, &masks, &grid, &traces, &timeouts)?;
    let summary = json!({
        "provenance": run.provenance("simulate"),
        "placement": sim.label,
        "mounts": masks.iter().map(|m| m.source_mount).collect::<Vec<_>>(),
        "seeds": sc.trace_seeds(),
        "leave_events": sim.log.required.len(),
        "ta_target": sc.occupants.ta_target,
        "ta_timeout_s": sim.log.ta_quantile(sc.occupants.ta_target),
        "comfort_target": sc.occupants.comfort_target,
        "wastage_at_comfort_target": wastage_at_comfort(&sim.frontier, sc.occupants.comfort_target),
    });
    Ok(vec![
        Artifact::json("simulate.json", summary),
        Artifact::csv("metrics.csv", &metrics_table(run, &sim, &timeouts)),
        Artifact::csv("trace.csv", &trace_table(run, &traces[0])),
    ])
}

/// One line of the reproduction table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub quantity: String,
    pub value: f64,
    pub target: String,
    pub pass: bool,
}

fn row(quantity: &str, value: f64, target: &str, pass: bool) -> SummaryRow {
    SummaryRow { quantity: quantity.into(), value, target: target.into(), pass }
}

fn within(v: f64, center: f64, tol: f64) -> bool {
    (v - center).abs() <= tol + 1e-12
}

pub fn cmd_reproduce(run: &Run) -> AppResult<Vec<Artifact>> {
    let sc = &run.scenario;
    let timeouts = sc.occupants.timeouts_s.clone();
    check_timeouts(&timeouts)?;
    let mut out = Vec::new();
    let mut rows = Vec::new();

    let p3 = solve_placement(sc, 3)?;
    let grid = p3.grid.clone();
    let p1 = PlacementRun {
        grid: grid.clone(),
        candidates: p3.candidates.clone(),
        solution: {
            let problem = CoverageProblem::new(grid.clone(), p3.candidates.clone(), 1)?;
            solve_exact(&build_mpc(&problem)?, Some(Duration::from_secs_f64(sc.placement.time_budget_s)))?
        },
    };
    let hu = hole_unaware(&grid, &p3.candidates)?;

    let center = Mount::new(sc.office.width_m / 2.0, sc.office.depth_m / 2.0, 0.0);
    let hole = hole_fraction(&project_fov(&sc.pattern(), center, &grid)?, &grid, None)?;
    rows.push(row("hole_fraction", hole, "0.87 +- 0.02", within(hole, 0.87, 0.02)));
    let desk = sc.desk();
    let d1 = p1.solution.region_coverage(&grid, &desk)?;
    let d3 = p3.solution.region_coverage(&grid, &desk)?;
    let dh = hu.region_coverage(&grid, &desk)?;
    rows.push(row("desk_coverage_optimal1", d1, "0.63 +- 0.03", within(d1, 0.63, 0.03)));
    rows.push(row("desk_coverage_optimal3", d3, "1.0", d3 == 1.0));
    rows.push(row("desk_coverage_hole_unaware", dh, "< optimal1", dh < d1));

    for (name, label, sol) in [
        ("placement_optimal1.json", "optimal1", &p1.solution),
        ("placement_optimal3.json", "optimal3", &p3.solution),
        ("placement_hole_unaware.json", "hole_unaware", &hu),
    ] {
        let k = sol.indices.len();
        let mut v = placement_json(run, label, &grid, sol, k)?;
        v["provenance"]["command"] = json!("reproduce");
        out.push(Artifact::json(name, v));
    }

    let g = run_game(sc, &sc.alphas())?;
    out.push(Artifact::csv("game_sweep.csv", &game_rows(run, "reproduce", &g.rows)));
    let pair = g
        .rows
        .iter()
        .filter(|r| r.lifetime_sensor_years > 9.0 && within(r.lifetime_switch_years, 2.0, 0.3))
        .max_by(|a, b| a.lifetime_sensor_years.total_cmp(&b.lifetime_sensor_years));
    match pair {
        Some(r) => {
            rows.push(row("bargain_alpha", r.alpha, "in [1, 5]", (1.0..=5.0).contains(&r.alpha)));
            rows.push(row("bargain_sensor_years", r.lifetime_sensor_years, "> 9", true));
            rows.push(row("bargain_switch_years", r.lifetime_switch_years, "2 +- 0.3", true));
        }
        None => rows.push(row("bargain_pair_found", 0.0, "sensor > 9 with switch 2 +- 0.3", false)),
    }
    rows.push(row("sensor_years_at_t_min", g.sensor_best, ">= 5", g.sensor_best >= 5.0));
    rows.push(row("switch_years_at_t_max", g.switch_best, ">= 9", g.switch_best >= 9.0));

    let traces = generate_traces(sc)?;
    let sims = [
        SimRun::new("optimal3", &masks_for(&p3, &p3.solution), &grid, &traces, &timeouts)?,
        SimRun::new("optimal1", &masks_for(&p1, &p1.solution), &grid, &traces, &timeouts)?,
        SimRun::new("hole_unaware", &masks_for(&p3, &hu), &grid, &traces, &timeouts)?,
    ];
    let mut cdf = run.table("reproduce", &["timeout_s", "ta_optimal3", "ta_optimal1", "ta_hole_unaware"]);
    let mut frontier = run.table(
        "reproduce",
        &[
            "timeout_s",
            "comfort_optimal3",
            "wastage_optimal3",
            "comfort_optimal1",
            "wastage_optimal1",
            "comfort_hole_unaware",
            "wastage_hole_unaware",
        ],
    );
    let mut ordered = true;
    for (i, &to) in timeouts.iter().enumerate() {
        let ta: Vec<f64> = sims.iter().map(|s| s.log.ta(to)).collect();
        ordered &= ta[0] >= ta[1] && ta[1] >= ta[2];
        cdf.push(std::iter::once(f(to)).chain(ta.iter().map(|&v| f(v))).collect());
        let mut r = vec![f(to)];
        for s in &sims {
            r.push(f(s.frontier[i].comfort));
            r.push(f(s.frontier[i].wastage));
        }
        frontier.push(r);
    }
    out.push(Artifact::csv("ta_cdf.csv", &cdf));
    out.push(Artifact::csv("frontier.csv", &frontier));
    rows.push(row("ta_cdf_ordering", f64::from(u8::from(ordered)), "optimal3 >= optimal1 >= hole_unaware", ordered));

    let q = sc.occupants.ta_target;
    for (s, target) in sims.iter().zip([20.0, 35.0, 80.0]) {
        let t = s.log.ta_quantile(q).unwrap_or(f64::NAN);
        rows.push(row(
            &format!("ta90_timeout_s_{}", s.label),
            t,
            &format!("{target} +- 25%"),
            within(t, target, 0.25 * target),
        ));
    }
    let c = sc.occupants.comfort_target;
    let w: Vec<Option<f64>> = sims.iter().map(|s| wastage_at_comfort(&s.frontier, c)).collect();
    for (i, target) in [(0usize, 9.0), (1, 7.5)] {
        let delta = match (w[2], w[i]) {
            (Some(h), Some(o)) => 100.0 * (h - o),
            _ => f64::NAN,
        };
        rows.push(row(
            &format!("wastage_delta_pts_{}", sims[i].label),
            delta,
            &format!("{target} +- 2"),
            within(delta, target, 2.0),
        ));
    }

    if sc.relay.is_some() {
        out.extend(relay_artifacts(run, None, "reproduce")?);
    }

    let mut table = run.table("reproduce", &["quantity", "value", "target", "pass"]);
    for r in &rows {
        table.push(vec![r.quantity.clone(), f(r.value), r.target.clone(), u8::from(r.pass).to_string()]);
    }
    out.push(Artifact::csv("summary.csv", &table));
    out.push(Artifact::json(
        "summary.json",
        json!({
            "provenance": run.provenance("reproduce"),
            "seeds": sc.trace_seeds(),
            "occupant_model": {
                "mean_occupied_s": sc.occupants.mean_occupied_s,
                "mean_vacant_s": sc.occupants.mean_vacant_s,
                "motion_rate_per_min": sc.occupants.motion_rate_per_min,
                "hand_fraction": sc.occupants.hand_fraction,
                "arm_fraction": sc.occupants.arm_fraction,
                "trace_duration_s": sc.occupants.trace_duration_s,
            },
            "rows": rows,
        }),
    ));
    Ok(out)
}

/// Writes artifacts atomically under `dir`, in order.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> AppResult<()> {
    for a in artifacts {
        let path = dir.join(&a.name);
        write_atomic(&path, &a.bytes).map_err(|e| AppError::Io { path: path.display().to_string(), message: e.to_string() })?;
    }
    Ok(())
}

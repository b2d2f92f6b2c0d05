//! End-to-end acceptance suite, run without the test harness so that each
//! criterion's PASS/FAIL line (measured values and wall time) always prints.
//! Exits nonzero if any criterion fails.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use occusense::app::solve_placement;
use occusense::geometry::*;
use occusense::io::{energy_preset, Scenario, DEFAULT_ENERGY, PAPER_OFFICE_TOML};
use occusense::lifetime::*;
use occusense::placement::*;
use occusense::relay::*;
use occusense::sim::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn scenario() -> Scenario {
    Scenario::from_toml(PAPER_OFFICE_TOML, None).unwrap()
}

// ---- hole fraction -------------------------------------------------------

fn hole_fraction_check() -> Check {
    let sc = scenario();
    let grid = sc.grid().unwrap();
    let center = Mount::new(sc.office.width_m / 2.0, sc.office.depth_m / 2.0, 0.0);
    let h = hole_fraction(&project_fov(&sc.pattern(), center, &grid).unwrap(), &grid, None).unwrap();
    ensure((h - 0.87).abs() <= 0.02, format!("hole_fraction {h:.4} outside 0.87 +- 0.02"))?;
    Ok(format!("hole_fraction {h:.4}"))
}

// ---- placement optima ----------------------------------------------------

fn placement_check() -> Check {
    let sc = scenario();
    let desk = sc.desk();
    let p1 = solve_placement(&sc, 1).unwrap();
    let p3 = solve_placement(&sc, 3).unwrap();
    ensure(p1.candidates.len() <= 200, format!("{} candidates", p1.candidates.len()))?;
    ensure(p1.solution.optimal && p3.solution.optimal, "solver stopped before proving optimality")?;
    let d1 = p1.solution.region_coverage(&p1.grid, &desk).unwrap();
    let d3 = p3.solution.region_coverage(&p3.grid, &desk).unwrap();
    ensure((d1 - 0.63).abs() <= 0.03, format!("k=1 desk coverage {d1:.4} outside 0.63 +- 0.03"))?;
    ensure(d3 == 1.0, format!("k=3 desk coverage {d3:.4} below 1"))?;
    Ok(format!("{} candidates, k=1 desk {d1:.4}, k=3 desk {d3:.4}", p1.candidates.len()))
}

// ---- MILP oracle equivalence and big-M -----------------------------------

fn mask(covered: Vec<bool>) -> CoverageMask {
    CoverageMask { in_range: covered.clone(), covered, source_mount: Mount::new(0.0, 0.0, 0.0) }
}

fn random_problem(rng: &mut ChaCha8Rng, integer_weights: bool) -> CoverageProblem {
    let nx = rng.gen_range(2..=6);
    let ny = rng.gen_range(2..=6);
    let np = nx * ny;
    let mut grid = discretize_area(nx as f64 - 1.0, ny as f64 - 1.0, 1.0, &WeightSpec::Uniform).unwrap();
    grid.weights = (0..np)
        .map(|_| if integer_weights { rng.gen_range(0..=9) as f64 } else { rng.gen_range(0.0..5.0) })
        .collect();
    let nc = rng.gen_range(1..=10);
    let density = rng.gen_range(0.1..0.5);
    let cands = (0..nc).map(|_| mask((0..np).map(|_| rng.gen_bool(density)).collect())).collect();
    let k = rng.gen_range(1..=3usize.min(nc));
    CoverageProblem::new(grid, cands, k).unwrap()
}

/// Best weighted coverage over all subsets of at most k candidates.
fn enumerate_best(p: &CoverageProblem) -> f64 {
    let n = p.candidates.len();
    (0u32..1 << n)
        .filter(|b| b.count_ones() as usize <= p.k)
        .map(|b| {
            (0..p.grid.len())
                .filter(|&q| (0..n).any(|c| b >> c & 1 == 1 && p.candidates[c].covered[q]))
                .map(|q| p.grid.weights[q])
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn milp_oracle_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for case in 0..200 {
        let p = random_problem(&mut rng, false);
        let exact = solve_exact(&build_mpc(&p).unwrap(), None).unwrap();
        let brute = brute_force_placement(&p).unwrap();
        ensure(exact.objective == brute.objective, format!("case {case}: {} vs {}", exact.objective, brute.objective))?;
        let oracle = enumerate_best(&p);
        ensure((brute.objective - oracle).abs() <= 1e-9, format!("case {case}: brute {} vs enumeration {oracle}", brute.objective))?;
    }
    Ok("200/200 instances match".into())
}

fn big_m_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for case in 0..50 {
        let p = random_problem(&mut rng, true);
        let m = build_mpc(&p).unwrap();
        let a = solve_exact(&m, None).unwrap();
        let b = solve_exact(&big_m_standard_form(&m).unwrap(), None).unwrap();
        ensure(a.objective == b.objective, format!("case {case}: {} vs {}", a.objective, b.objective))?;
        ensure(a.objective == enumerate_best(&p), format!("case {case}: original optimum is not the enumeration optimum"))?;
    }
    Ok("50/50 instances match".into())
}

// ---- bargaining and lifetimes --------------------------------------------

fn grid_argmax(p: &MoteEnergyParams, alpha: f64) -> f64 {
    let (ds, dw) = threat_points(p).unwrap();
    let n = ((p.t_max_s - p.t_min_s) / 1e-3).round() as usize;
    let mut best = (f64::NEG_INFINITY, p.t_min_s);
    for i in 0..=n {
        let t = (p.t_min_s + i as f64 * 1e-3).min(p.t_max_s);
        let v = log_nash(alpha, lifetime_sensor(t, p).unwrap() - ds, lifetime_switch(t, p).unwrap() - dw);
        if v > best.0 {
            best = (v, t);
        }
    }
    best.1
}

fn random_params(rng: &mut ChaCha8Rng) -> MoteEnergyParams {
    MoteEnergyParams {
        battery_capacity_mah: rng.gen_range(500.0..5000.0),
        voltage_v: 3.0,
        current_sleep_ma: rng.gen_range(0.001..0.05),
        current_rx_ma: rng.gen_range(5.0..25.0),
        current_tx_ma: rng.gen_range(5.0..25.0),
        current_pir_ma: rng.gen_range(0.0..0.02),
        cca_duration_s: rng.gen_range(0.001..0.01),
        event_rate_per_day: rng.gen_range(20.0..2000.0),
        payload_tx_time_s: rng.gen_range(0.001..0.01),
        occupied_fraction: rng.gen_range(0.05..1.0),
        t_min_s: rng.gen_range(0.005..0.05),
        t_max_s: rng.gen_range(1.0..10.0),
    }
}

fn bargaining_check() -> Check {
    let p = energy_preset(DEFAULT_ENERGY).unwrap();
    let rows = sweep_alpha(&p, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let pair = rows
        .iter()
        .find(|r| r.lifetime_sensor_years > 9.0 && (r.lifetime_switch_years - 2.0).abs() <= 0.3)
        .ok_or("no alpha in [1, 5] gives sensor > 9 y with switch 2 +- 0.3 y")?;
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let p = random_params(&mut rng);
        let alpha = rng.gen_range(1.0..5.0);
        let s = nash_bargain(&p, alpha).map_err(|e| format!("case {case}: {e}"))?;
        let err = (s.wakeup_period_s - grid_argmax(&p, alpha)).abs();
        worst = worst.max(err);
        ensure(err <= 2e-3, format!("case {case}: period off the grid optimum by {err:.2e} s"))?;
        let (us, uw) = (s.lifetime_sensor_years - s.threat_point_sensor_years, s.lifetime_switch_years - s.threat_point_switch_years);
        ensure(us >= -1e-9 && uw >= -1e-9, format!("case {case}: below a threat point"))?;
        let n = ((p.t_max_s - p.t_min_s) / 1e-3) as usize;
        for i in 0..=n {
            let t = p.t_min_s + i as f64 * 1e-3;
            let a = lifetime_sensor(t, &p).unwrap() - s.threat_point_sensor_years;
            let b = lifetime_switch(t, &p).unwrap() - s.threat_point_switch_years;
            ensure(!(a > us + 1e-12 && b > uw + 1e-12), format!("case {case}: T = {t} Pareto-dominates"))?;
        }
    }
    Ok(format!(
        "alpha {} gives sensor {:.2} y / switch {:.2} y; 100 random sets, worst period error {:.2e} s",
        pair.alpha, pair.lifetime_sensor_years, pair.lifetime_switch_years, worst
    ))
}

fn lifetime_bullets_check() -> Check {
    let p = energy_preset(DEFAULT_ENERGY).unwrap();
    let s = lifetime_sensor(p.t_min_s, &p).unwrap();
    let w = lifetime_switch(p.t_max_s, &p).unwrap();
    ensure(s >= 5.0, format!("sensor {s:.2} y at T_min"))?;
    ensure(w >= 9.0, format!("switch {w:.2} y at T_max"))?;
    Ok(format!("sensor {s:.2} y at T_min, switch {w:.2} y at T_max"))
}

// ---- outage and relays ---------------------------------------------------

fn lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Share of Rayleigh-faded packets below the SINR threshold.
fn monte_carlo_outage(tx: (f64, f64), rx: (f64, f64), ch: &ChannelParams, draws: usize, rng: &mut ChaCha8Rng) -> f64 {
    let d = (tx.0 - rx.0).hypot(tx.1 - rx.1);
    let mut noise = lin(ch.noise_power_dbm);
    for s in &ch.interferers {
        let di = (s.x - rx.0).hypot(s.y - rx.1).max(1.0);
        noise += s.activity * lin(s.power_dbm) / (lin(ch.reference_loss_db) * di.powf(ch.path_loss_exponent));
    }
    let mean_snr = lin(ch.tx_power_dbm) / (lin(ch.reference_loss_db) * d.powf(ch.path_loss_exponent) * noise);
    let gamma = lin(ch.sinr_threshold_db);
    let fails = (0..draws).filter(|_| Distribution::<f64>::sample(&Exp1, rng) * mean_snr < gamma).count();
    fails as f64 / draws as f64
}

fn outage_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_z = 0.0f64;
    for case in 0..50 {
        let ch = ChannelParams {
            tx_power_dbm: rng.gen_range(-10.0..5.0),
            noise_power_dbm: rng.gen_range(-105.0..-90.0),
            path_loss_exponent: rng.gen_range(2.0..4.0),
            reference_loss_db: rng.gen_range(35.0..45.0),
            sinr_threshold_db: rng.gen_range(0.0..10.0),
            interferers: if case % 3 == 0 {
                vec![Interferer { x: 5.0, y: 5.0, power_dbm: -20.0, activity: rng.gen_range(0.0..1.0) }]
            } else {
                vec![]
            },
        };
        let rx = (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        let tx = (rx.0 + rng.gen_range(1.0..25.0), rx.1 + rng.gen_range(-5.0..5.0));
        let p = outage_probability(tx, rx, &ch).unwrap();
        let n = 1_000_000;
        let est = monte_carlo_outage(tx, rx, &ch, n, &mut rng);
        let se = (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64);
        let z = (est - p).abs() / se;
        worst_z = worst_z.max(z);
        ensure(z <= 3.0, format!("case {case}: closed {p:.6}, estimate {est:.6}, {z:.2} SE"))?;
    }

    let ch = ChannelParams {
        interferers: vec![Interferer { x: 3.0, y: 4.0, power_dbm: -15.0, activity: 0.5 }],
        ..ChannelParams::default()
    };
    let at = |tx: f64, c: &ChannelParams| outage_probability((tx, 0.0), (0.0, 0.0), c).unwrap();
    let by_distance: Vec<f64> = (1..=200).map(|i| at(i as f64 * 0.25, &ch)).collect();
    let by_threshold: Vec<f64> =
        (-20..=40).map(|i| at(12.0, &ChannelParams { sinr_threshold_db: i as f64 * 0.5, ..ch.clone() })).collect();
    let by_power: Vec<f64> = (-30..=60).map(|i| at(12.0, &ChannelParams { tx_power_dbm: i as f64, ..ch.clone() })).collect();
    let by_activity: Vec<f64> = (0..=20)
        .map(|i| {
            let mut c = ch.clone();
            c.interferers[0].activity = i as f64 / 20.0;
            at(12.0, &c)
        })
        .collect();
    let rising = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    ensure(rising(&by_distance), "outage not monotone in distance")?;
    ensure(rising(&by_threshold), "outage not monotone in threshold")?;
    ensure(by_power.windows(2).all(|w| w[1] <= w[0]), "outage not monotone in transmit power")?;
    ensure(rising(&by_activity), "outage not monotone in interferer activity")?;
    Ok(format!("50 links, worst deviation {worst_z:.2} SE; monotone in distance, threshold, power and activity"))
}

fn random_graph(rng: &mut ChaCha8Rng) -> WeightedGraph {
    let ns = rng.gen_range(1..=5);
    let nc = rng.gen_range(0..=12);
    let mut used = vec![(0.0, 0.0)];
    let mut fresh = |n: usize| {
        let mut v = Vec::new();
        while v.len() < n {
            let p = (rng.gen_range(0.0..60.0f64).round(), rng.gen_range(0.0..20.0f64).round());
            if !used.contains(&p) {
                used.push(p);
                v.push(p);
            }
        }
        v
    };
    let sensors = fresh(ns);
    let cands = fresh(nc);
    build_weighted_graph(&sensors, &cands, (0.0, 0.0), &ChannelParams::default(), &LinkLimits::default()).unwrap()
}

/// Sink-rooted reachability over usable links among the active nodes.
fn connects(g: &WeightedGraph, relays: &[usize], cap: f64) -> bool {
    let n = g.nodes.len();
    let mut active = vec![false; n];
    active[..g.n_sensors].fill(true);
    for &c in relays {
        active[g.n_sensors + c] = true;
    }
    active[n - 1] = true;
    let mut reached = vec![false; n];
    reached[n - 1] = true;
    let mut stack = vec![n - 1];
    while let Some(u) = stack.pop() {
        for e in &g.edges {
            let v = if e.a == u { e.b } else if e.b == u { e.a } else { continue };
            if e.outage <= cap && active[v] && !reached[v] {
                reached[v] = true;
                stack.push(v);
            }
        }
    }
    reached[..g.n_sensors].iter().all(|&r| r)
}

fn relay_minimality_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cap = LinkLimits::default().outage_cap;
    let (mut done, mut relays_used) = (0, 0);
    while done < 50 {
        let g = random_graph(&mut rng);
        let all: Vec<usize> = (0..g.n_candidates).collect();
        if !connects(&g, &all, cap) {
            continue;
        }
        done += 1;
        let exact = place_relays(&g, cap, PlannerMode::Exact).map_err(|e| e.to_string())?;
        let greedy = place_relays(&g, cap, PlannerMode::Heuristic).map_err(|e| e.to_string())?;
        let k = exact.relays.len();
        relays_used += usize::from(k > 0);
        ensure(connects(&g, &exact.relays, cap), format!("instance {done}: exact set does not connect"))?;
        let smaller = (0u32..1 << g.n_candidates).filter(|b| (b.count_ones() as usize) < k).find(|b| {
            let s: Vec<usize> = (0..g.n_candidates).filter(|&i| b >> i & 1 == 1).collect();
            connects(&g, &s, cap)
        });
        ensure(smaller.is_none(), format!("instance {done}: a set smaller than {k} connects"))?;
        ensure(greedy.relays.len() >= k, format!("instance {done}: greedy {} < exact {k}", greedy.relays.len()))?;
    }
    Ok(format!("50 instances minimal by enumeration, {relays_used} need relays"))
}

// ---- simulator -----------------------------------------------------------

fn simulator_check() -> Check {
    let sc = scenario();
    let p3 = solve_placement(&sc, 3).unwrap();
    let grid = p3.grid.clone();
    let cands = &p3.candidates;
    let one = CoverageProblem::new(grid.clone(), cands.clone(), 1).unwrap();
    let p1 = solve_exact(&build_mpc(&one).unwrap(), None).unwrap();
    let hu = hole_unaware_placement(&one).unwrap();
    let masks = |idx: &[usize]| idx.iter().map(|&i| cands[i].clone()).collect::<Vec<_>>();
    let setups = [masks(&p3.solution.indices), masks(&p1.indices), masks(&hu.indices)];

    let model = sc.occupant_model();
    let seeds = sc.trace_seeds();
    ensure(seeds.len() == 50 && sc.occupants.trace_duration_s == 86_400.0, "suite is not 50 x 24 h")?;
    let traces: Vec<_> = seeds.iter().map(|&s| generate_trace(&model, 86_400.0, s).unwrap()).collect();
    let timeouts: Vec<f64> = (1..=600).map(f64::from).collect();
    let logs: Vec<ReplayLog> = setups
        .iter()
        .map(|m| ReplayLog::build(&traces, &SensingField::new(m, &grid).unwrap(), &grid).unwrap())
        .collect();

    for &t in &timeouts {
        let ta: Vec<f64> = logs.iter().map(|l| l.ta(t)).collect();
        ensure(ta[0] >= ta[1] && ta[1] >= ta[2], format!("TA-CDF ordering breaks at {t} s: {ta:?}"))?;
    }
    let t90: Vec<f64> = logs.iter().map(|l| l.ta_quantile(0.9).unwrap()).collect();
    for (v, target) in t90.iter().zip([20.0, 35.0, 80.0]) {
        ensure((v - target).abs() <= 0.25 * target, format!("90% TA timeouts {t90:.2?} vs 20/35/80 +- 25%"))?;
    }
    let w: Vec<f64> =
        logs.iter().map(|l| wastage_at_comfort(&frontier_from_log(l, &timeouts), 0.95).unwrap()).collect();
    let deltas = [100.0 * (w[2] - w[0]), 100.0 * (w[2] - w[1])];
    for (d, target) in deltas.iter().zip([9.0, 7.5]) {
        ensure((d - target).abs() <= 2.0, format!("wastage deltas {deltas:.2?} vs 9/7.5 +- 2 points"))?;
    }
    Ok(format!("ordering holds; 90% TA timeouts {t90:.2?} s; wastage deltas {deltas:.2?} points"))
}

// ---- determinism ---------------------------------------------------------

fn run_reproduce(out: &Path) -> Result<(), String> {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets/paper-office.toml");
    let o = Command::new(env!("CARGO_BIN_EXE_occusense"))
        .args(["reproduce", "--scenario", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), format!("reproduce failed: {}", String::from_utf8_lossy(&o.stderr)))
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn determinism_check() -> Check {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_reproduce(a.path())?;
    run_reproduce(b.path())?;
    let (la, lb) = (listing(a.path()), listing(b.path()));
    ensure(!la.is_empty(), "reproduce wrote nothing")?;
    ensure(la.len() == lb.len(), "runs wrote different file sets")?;
    for ((na, ba), (nb, bb)) in la.iter().zip(&lb) {
        ensure(na == nb && ba == bb, format!("{na} differs between runs"))?;
    }
    let summary = la.iter().find(|(n, _)| n == "summary.csv").ok_or("summary.csv missing")?;
    let failing = String::from_utf8_lossy(&summary.1).lines().filter(|l| l.ends_with(",0")).count();
    Ok(format!("{} files byte-identical; {failing} summary rows failing", la.len()))
}

// ---- driver --------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 10] = [
        ("hole_fraction", hole_fraction_check, Some(Duration::from_secs(1))),
        ("placement_optima", placement_check, Some(Duration::from_secs(60))),
        ("milp_oracle_equivalence", milp_oracle_check, Some(Duration::from_secs(60))),
        ("big_m_soundness", big_m_check, None),
        ("bargaining", bargaining_check, Some(Duration::from_secs(30))),
        ("lifetime_bullets", lifetime_bullets_check, None),
        ("outage_model", outage_check, Some(Duration::from_secs(120))),
        ("relay_minimality", relay_minimality_check, None),
        ("simulator_ordering", simulator_check, Some(Duration::from_secs(300))),
        ("determinism", determinism_check, None),
    ];
    let mut failed = Vec::new();
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {:.2} s, limit {} s", took.as_secs_f64(), l.as_secs())),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{:.2} s]", took.as_secs_f64()),
            Err(detail) => {
                println!("FAIL {name}: {detail} [{:.2} s]", took.as_secs_f64());
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}

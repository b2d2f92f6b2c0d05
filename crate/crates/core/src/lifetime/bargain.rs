use serde::{Deserialize, Serialize};

use super::energy::{lifetime_sensor, lifetime_switch, MoteEnergyParams};
use crate::error::{invalid, Error, Result};

/// Golden-section stopping width in seconds.
pub const PERIOD_TOL_S: f64 = 1e-4;
const SCAN_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSolution {
    pub alpha: f64,
    pub wakeup_period_s: f64,
    pub lifetime_sensor_years: f64,
    pub lifetime_switch_years: f64,
    pub threat_point_sensor_years: f64,
    pub threat_point_switch_years: f64,
    pub nash_product: f64,
}

/// Disagreement payoffs: each player gets what it would live if the other
/// enforced its own preferred period (sensor prefers short, switch long).
pub fn threat_points(params: &MoteEnergyParams) -> Result<(f64, f64)> {
    params.validate()?;
    Ok((lifetime_sensor(params.t_max_s, params)?, lifetime_switch(params.t_min_s, params)?))
}

/// Weighted log Nash product; minus infinity off the bargaining set.
pub fn log_nash(alpha: f64, surplus_sensor: f64, surplus_switch: f64) -> f64 {
    if surplus_sensor > 0.0 && surplus_switch > 0.0 {
        alpha * surplus_sensor.ln() + surplus_switch.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Maximizes alpha ln(s1(T)) + ln(s2(T)) over [t_min, t_max] for arbitrary
/// surplus functions. A log-spaced scan brackets the peak, then golden-section
/// search refines it.
pub fn bargain_period<F, G>(surplus_sensor: F, surplus_switch: G, t_min: f64, t_max: f64, alpha: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let f = |t: f64| log_nash(alpha, surplus_sensor(t), surplus_switch(t));
    let ratio = (t_max / t_min).ln();
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| {
            if i == SCAN_POINTS {
                t_max
            } else {
                t_min * (ratio * i as f64 / SCAN_POINTS as f64).exp()
            }
        })
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let (best, &vbest) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))?;
    if vbest == f64::NEG_INFINITY {
        return None;
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(SCAN_POINTS)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > PERIOD_TOL_S {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    // Never return something worse than the scan found.
    Some(if f(t) >= vbest { t } else { grid[best] })
}

/// Weighted Nash bargaining over the wake-up period.
pub fn nash_bargain(params: &MoteEnergyParams, alpha: f64) -> Result<GameSolution> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return invalid(format!("alpha must be at least 1, got {alpha}"));
    }
    let (d_sensor, d_switch) = threat_points(params)?;
    let ls = |t: f64| params.battery_capacity_mah / params.sensor_current_ma(t) / super::energy::HOURS_PER_YEAR;
    let lw = |t: f64| params.battery_capacity_mah / params.switch_current_ma(t) / super::energy::HOURS_PER_YEAR;
    let t = bargain_period(|t| ls(t) - d_sensor, |t| lw(t) - d_switch, params.t_min_s, params.t_max_s, alpha)
        .ok_or(Error::NoAgreement { d_sensor, d_switch })?;
    let lifetime_sensor_years = lifetime_sensor(t, params)?;
    let lifetime_switch_years = lifetime_switch(t, params)?;
    Ok(GameSolution {
        alpha,
        wakeup_period_s: t,
        lifetime_sensor_years,
        lifetime_switch_years,
        threat_point_sensor_years: d_sensor,
        threat_point_switch_years: d_switch,
        nash_product: (lifetime_sensor_years - d_sensor).powf(alpha) * (lifetime_switch_years - d_switch),
    })
}

/// One bargaining solution per alpha, in input order.
pub fn sweep_alpha(params: &MoteEnergyParams, alphas: &[f64]) -> Result<Vec<GameSolution>> {
    alphas.iter().map(|&a| nash_bargain(params, a)).collect()
}

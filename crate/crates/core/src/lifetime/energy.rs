use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const SECONDS_PER_DAY: f64 = 86_400.0;
pub const HOURS_PER_YEAR: f64 = 24.0 * 365.25;

/// Low-power-listening energy inputs shared by the sensor and switch motes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoteEnergyParams {
    pub battery_capacity_mah: f64,
    pub voltage_v: f64,
    pub current_sleep_ma: f64,
    pub current_rx_ma: f64,
    pub current_tx_ma: f64,
    pub current_pir_ma: f64,
    /// Channel sample taken by the receiver at every wake-up.
    pub cca_duration_s: f64,
    /// Messages per day (state changes and light reports).
    pub event_rate_per_day: f64,
    pub payload_tx_time_s: f64,
    /// Share of the day during which the switch keeps duty-cycling.
    pub occupied_fraction: f64,
    pub t_min_s: f64,
    pub t_max_s: f64,
}

impl Default for MoteEnergyParams {
    /// Two AA cells and a typical low-power SoC radio.
    fn default() -> Self {
        MoteEnergyParams {
            battery_capacity_mah: 2600.0,
            voltage_v: 3.0,
            current_sleep_ma: 0.020,
            current_rx_ma: 13.0,
            current_tx_ma: 10.5,
            current_pir_ma: 0.006,
            cca_duration_s: 0.005,
            event_rate_per_day: 400.0,
            payload_tx_time_s: 0.004,
            occupied_fraction: 0.35,
            t_min_s: 0.01,
            t_max_s: 10.0,
        }
    }
}

impl MoteEnergyParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("current_sleep_ma", self.current_sleep_ma),
            ("current_rx_ma", self.current_rx_ma),
            ("current_tx_ma", self.current_tx_ma),
            ("current_pir_ma", self.current_pir_ma),
            ("cca_duration_s", self.cca_duration_s),
            ("event_rate_per_day", self.event_rate_per_day),
            ("payload_tx_time_s", self.payload_tx_time_s),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(format!("{name} must be nonnegative, got {v}"));
            }
        }
        if !(self.battery_capacity_mah.is_finite() && self.battery_capacity_mah > 0.0) {
            return invalid("battery_capacity_mah must be positive");
        }
        if !(self.voltage_v.is_finite() && self.voltage_v > 0.0) {
            return invalid("voltage_v must be positive");
        }
        if self.current_sleep_ma > self.current_rx_ma {
            return invalid("current_sleep_ma must not exceed current_rx_ma");
        }
        if !(0.0..=1.0).contains(&self.occupied_fraction) {
            return invalid("occupied_fraction must lie in [0, 1]");
        }
        if !(self.t_min_s > 0.0 && self.t_min_s < self.t_max_s && self.t_max_s.is_finite()) {
            return invalid("feasible wake-up interval must satisfy 0 < t_min < t_max");
        }
        if self.current_sleep_ma + self.current_pir_ma <= 0.0 && self.event_rate_per_day == 0.0 {
            return invalid("a mote drawing no current has no finite lifetime");
        }
        Ok(())
    }

    fn check_period(&self, t: f64) -> Result<()> {
        self.validate()?;
        if !(t >= self.t_min_s - 1e-12 && t <= self.t_max_s + 1e-12) {
            return invalid(format!("wake-up period {t} s outside [{}, {}]", self.t_min_s, self.t_max_s));
        }
        Ok(())
    }

    fn years(&self, current_ma: f64) -> f64 {
        self.battery_capacity_mah / current_ma / HOURS_PER_YEAR
    }

    /// Sender average current: every message pays half a period of preamble
    /// on average plus the payload.
    pub fn sensor_current_ma(&self, t: f64) -> f64 {
        let tx_s_per_s = self.event_rate_per_day / SECONDS_PER_DAY * (0.5 * t + self.payload_tx_time_s);
        self.current_sleep_ma + self.current_pir_ma + tx_s_per_s * self.current_tx_ma
    }

    /// Receiver average current: a channel sample every period while
    /// occupied, plus a sample and the payload per received message.
    pub fn switch_current_ma(&self, t: f64) -> f64 {
        let listen = self.occupied_fraction * self.cca_duration_s / t;
        let receive = self.event_rate_per_day / SECONDS_PER_DAY * (self.cca_duration_s + self.payload_tx_time_s);
        self.current_sleep_ma + self.current_pir_ma + (listen + receive) * self.current_rx_ma
    }
}

/// Sensor-mote lifetime in years at wake-up period `t` seconds.
pub fn lifetime_sensor(t: f64, params: &MoteEnergyParams) -> Result<f64> {
    params.check_period(t)?;
    Ok(params.years(params.sensor_current_ma(t)))
}

/// Switch-mote lifetime in years at wake-up period `t` seconds.
pub fn lifetime_switch(t: f64, params: &MoteEnergyParams) -> Result<f64> {
    params.check_period(t)?;
    Ok(params.years(params.switch_current_ma(t)))
}

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Interfering transmitter, folded into the noise floor by its mean power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interferer {
    pub x: f64,
    pub y: f64,
    pub power_dbm: f64,
    pub activity: f64,
}

/// Rayleigh block-fading link model with log-distance path loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub path_loss_exponent: f64,
    pub reference_loss_db: f64,
    pub sinr_threshold_db: f64,
    pub interferers: Vec<Interferer>,
}

impl Default for ChannelParams {
    /// 2.4 GHz low-power radio indoors.
    fn default() -> Self {
        ChannelParams {
            tx_power_dbm: 0.0,
            noise_power_dbm: -100.0,
            path_loss_exponent: 3.0,
            reference_loss_db: 40.0,
            sinr_threshold_db: 5.0,
            interferers: Vec::new(),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent >= 2.0) {
            return invalid("path_loss_exponent must be at least 2");
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_power_dbm", self.noise_power_dbm),
            ("reference_loss_db", self.reference_loss_db),
            ("sinr_threshold_db", self.sinr_threshold_db),
        ] {
            if !v.is_finite() {
                return invalid(format!("{name} must be finite"));
            }
        }
        for (i, s) in self.interferers.iter().enumerate() {
            if !(0.0..=1.0).contains(&s.activity) {
                return invalid(format!("interferer {i} activity must lie in [0, 1]"));
            }
            if !(s.power_dbm.is_finite() && s.x.is_finite() && s.y.is_finite()) {
                return invalid(format!("interferer {i} has non-finite fields"));
            }
        }
        Ok(())
    }

    /// Linear path-loss factor at distance d (meters).
    pub fn path_loss(&self, d: f64) -> f64 {
        db_to_linear(self.reference_loss_db + 10.0 * self.path_loss_exponent * d.log10())
    }

    /// Noise plus mean interference power seen at `rx`, in mW.
    pub fn noise_plus_interference_mw(&self, rx: (f64, f64)) -> f64 {
        let mut total = db_to_linear(self.noise_power_dbm);
        for s in &self.interferers {
            let d = distance((s.x, s.y), rx).max(1.0);
            total += s.activity * db_to_linear(s.power_dbm) / self.path_loss(d);
        }
        total
    }

    /// Exponent x in P_out = 1 - exp(-x) for a link of length d into `rx`.
    pub fn outage_exponent(&self, d: f64, rx: (f64, f64)) -> f64 {
        db_to_linear(self.sinr_threshold_db) * self.noise_plus_interference_mw(rx) * self.path_loss(d)
            / db_to_linear(self.tx_power_dbm)
    }
}

/// Probability that the faded SINR of the tx -> rx link falls below threshold.
pub fn outage_probability(tx: (f64, f64), rx: (f64, f64), channel: &ChannelParams) -> Result<f64> {
    channel.validate()?;
    let d = distance(tx, rx);
    if !(d > 0.0) {
        return invalid("link distance must be positive");
    }
    Ok(-(-channel.outage_exponent(d, rx)).exp_m1())
}

/// Outage of an undirected link: the worse of its two directions.
pub fn link_outage(a: (f64, f64), b: (f64, f64), channel: &ChannelParams) -> Result<f64> {
    Ok(outage_probability(a, b, channel)?.max(outage_probability(b, a, channel)?))
}

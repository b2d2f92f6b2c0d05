use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Enter,
    Leave,
    Motion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivityEvent {
    pub t_s: f64,
    pub kind: EventKind,
    pub x: f64,
    pub y: f64,
    pub extent_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityTrace {
    pub events: Vec<ActivityEvent>,
    pub duration_s: f64,
    pub seed: u64,
}

/// Single occupant alternating between absence and presence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupantModel {
    pub mean_occupied_s: f64,
    pub mean_vacant_s: f64,
    pub motion_rate_per_min: f64,
    pub hand_fraction: f64,
    pub arm_fraction: f64,
    pub desk: Rect,
    pub width_m: f64,
    pub depth_m: f64,
    pub door: (f64, f64),
}

/// Extent ranges per motion class, in meters.
pub const HAND_EXTENT: (f64, f64) = (0.1, 0.6);
pub const ARM_EXTENT: (f64, f64) = (0.6, 1.0);
pub const BODY_EXTENT: (f64, f64) = (1.0, 1.8);

impl OccupantModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mean_occupied_s", self.mean_occupied_s),
            ("mean_vacant_s", self.mean_vacant_s),
            ("motion_rate_per_min", self.motion_rate_per_min),
            ("width_m", self.width_m),
            ("depth_m", self.depth_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        let (h, a) = (self.hand_fraction, self.arm_fraction);
        if !(h >= 0.0 && a >= 0.0 && h + a <= 1.0) {
            return invalid("hand and arm fractions must be nonnegative and sum to at most 1");
        }
        let office = Rect::new(0.0, 0.0, self.width_m, self.depth_m);
        let d = &self.desk;
        if !(d.x1 > d.x0 && d.y1 > d.y0 && office.contains(d.x0, d.y0) && office.contains(d.x1, d.y1)) {
            return invalid("desk must be a proper rectangle inside the office");
        }
        if !office.contains(self.door.0, self.door.1) {
            return invalid("door must lie inside the office");
        }
        Ok(())
    }

    /// Long-run share of time the office is occupied.
    pub fn stationary_occupancy(&self) -> f64 {
        self.mean_occupied_s / (self.mean_occupied_s + self.mean_vacant_s)
    }

    /// Expected occupied share over [0, d] for a trace that starts vacant.
    pub fn expected_occupancy(&self, d: f64) -> f64 {
        let (a, b) = (1.0 / self.mean_vacant_s, 1.0 / self.mean_occupied_s);
        let pi = self.stationary_occupancy();
        pi - pi * (1.0 - (-(a + b) * d).exp()) / ((a + b) * d)
    }
}

/// Alternating renewal trace starting vacant: exponential vacant and
/// occupied spells, Poisson motions while occupied.
pub fn generate_trace(model: &OccupantModel, duration_s: f64, seed: u64) -> Result<ActivityTrace> {
    model.validate()?;
    if !(duration_s.is_finite() && duration_s > 0.0) {
        return invalid("duration must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vacant = Exp::new(1.0 / model.mean_vacant_s).expect("positive rate");
    let occupied = Exp::new(1.0 / model.mean_occupied_s).expect("positive rate");
    let motion = Exp::new(model.motion_rate_per_min / 60.0).expect("positive rate");
    let door = |t_s, kind| ActivityEvent { t_s, kind, x: model.door.0, y: model.door.1, extent_m: BODY_EXTENT.1 };

    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        t += vacant.sample(&mut rng);
        if t >= duration_s {
            break;
        }
        events.push(door(t, EventKind::Enter));
        let leave = t + occupied.sample(&mut rng);
        let mut m = t;
        loop {
            m += motion.sample(&mut rng);
            if m >= leave || m >= duration_s {
                break;
            }
            let u: f64 = rng.gen();
            let (x, y, extent) = if u < model.hand_fraction + model.arm_fraction {
                let range = if u < model.hand_fraction { HAND_EXTENT } else { ARM_EXTENT };
                let d = &model.desk;
                (rng.gen_range(d.x0..d.x1), rng.gen_range(d.y0..d.y1), rng.gen_range(range.0..range.1))
            } else {
                (
                    rng.gen_range(0.0..model.width_m),
                    rng.gen_range(0.0..model.depth_m),
                    rng.gen_range(BODY_EXTENT.0..BODY_EXTENT.1),
                )
            };
            if m > events.last().map_or(f64::NEG_INFINITY, |e: &ActivityEvent| e.t_s) {
                events.push(ActivityEvent { t_s: m, kind: EventKind::Motion, x, y, extent_m: extent });
            }
        }
        if leave >= duration_s {
            break;
        }
        if leave > events.last().map_or(f64::NEG_INFINITY, |e| e.t_s) {
            events.push(door(leave, EventKind::Leave));
        }
        t = leave;
    }
    Ok(ActivityTrace { events, duration_s, seed })
}

impl ActivityTrace {
    /// Checks ordering, alternation and placement of events.
    pub fn validate(&self, width_m: f64, depth_m: f64) -> Result<()> {
        let office = Rect::new(0.0, 0.0, width_m, depth_m);
        let mut inside = false;
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.t_s > last) || e.t_s < 0.0 || e.t_s > self.duration_s {
                return invalid(format!("event {i} breaks strict time order"));
            }
            last = e.t_s;
            if !office.contains(e.x, e.y) {
                return invalid(format!("event {i} lies outside the office"));
            }
            match (e.kind, inside) {
                (EventKind::Enter, false) => inside = true,
                (EventKind::Leave, true) => inside = false,
                (EventKind::Motion, true) => {}
                _ => return invalid(format!("event {i} ({:?}) is out of sequence", e.kind)),
            }
        }
        Ok(())
    }

    /// Total occupied time in seconds.
    pub fn occupied_time(&self) -> f64 {
        let mut total = 0.0;
        let mut since = None;
        for e in &self.events {
            match e.kind {
                EventKind::Enter => since = Some(e.t_s),
                EventKind::Leave => {
                    total += e.t_s - since.take().unwrap_or(e.t_s);
                }
                EventKind::Motion => {}
            }
        }
        if let Some(s) = since {
            total += self.duration_s - s;
        }
        total
    }
}

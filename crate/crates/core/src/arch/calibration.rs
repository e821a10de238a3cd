use serde::{Deserialize, Serialize};

use super::ArchError;

/// Duration in microseconds and infidelity of one physical operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpCost {
    pub time_us: f64,
    pub infidelity: f64,
}

impl OpCost {
    pub const fn new(time_us: f64, infidelity: f64) -> Self {
        Self { time_us, infidelity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XbarAnchor {
    pub ports: u32,
    pub latency_us: f64,
}

/// Timing and fidelity constants for every operation the simulator emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub gate1: OpCost,
    pub gate2: OpCost,
    /// Includes the cooling that follows a split or merge.
    pub split_merge: OpCost,
    pub shuttle_step: OpCost,
    pub x_junction: OpCost,
    pub measurement: OpCost,
    pub matter_link: OpCost,
    pub photonic: OpCost,
    pub cooling_us: f64,
    pub attempt_us: f64,
    pub attempt_success_probability: f64,
    pub xbar_anchors: Vec<XbarAnchor>,
    /// Idle coherence time constant.
    pub t2_us: f64,
}

impl Default for CalibrationTable {
    fn default() -> Self {
        Self {
            gate1: OpCost::new(5.0, 3e-5),
            gate2: OpCost::new(100.0, 8e-4),
            split_merge: OpCost::new(380.0, 0.0),
            shuttle_step: OpCost::new(5.0, 1e-5),
            x_junction: OpCost::new(100.0, 1e-4),
            measurement: OpCost::new(400.0, 9e-5),
            matter_link: OpCost::new(400.0, 7e-8),
            photonic: OpCost::new(5760.0, 7e-3),
            cooling_us: 100.0,
            attempt_us: 500.0,
            attempt_success_probability: 0.1,
            xbar_anchors: vec![
                XbarAnchor {
                    ports: 32,
                    latency_us: 1100.0,
                },
                XbarAnchor {
                    ports: 256,
                    latency_us: 5230.0,
                },
            ],
            t2_us: 1e8,
        }
    }
}

impl CalibrationTable {
    pub fn validate(&self) -> Result<(), ArchError> {
        let costs = [
            ("gate1", self.gate1),
            ("gate2", self.gate2),
            ("split_merge", self.split_merge),
            ("shuttle_step", self.shuttle_step),
            ("x_junction", self.x_junction),
            ("measurement", self.measurement),
            ("matter_link", self.matter_link),
            ("photonic", self.photonic),
        ];
        for (name, c) in costs {
            if !(c.time_us > 0.0 && c.time_us.is_finite()) {
                return Err(ArchError::Calibration(format!("{name} time must be positive")));
            }
            if !(0.0..1.0).contains(&c.infidelity) {
                return Err(ArchError::Calibration(format!("{name} infidelity must lie in [0, 1)")));
            }
        }
        for (name, t) in [
            ("cooling_us", self.cooling_us),
            ("attempt_us", self.attempt_us),
            ("t2_us", self.t2_us),
        ] {
            if t.is_nan() || t <= 0.0 {
                return Err(ArchError::Calibration(format!("{name} must be positive")));
            }
        }
        let p = self.attempt_success_probability;
        if !(p > 0.0 && p <= 1.0) {
            return Err(ArchError::BadProbability(p));
        }
        if self.xbar_anchors.is_empty() {
            return Err(ArchError::NoAnchors);
        }
        for a in &self.xbar_anchors {
            if a.ports < 2 || a.latency_us.is_nan() || a.latency_us <= 0.0 {
                return Err(ArchError::Calibration(format!(
                    "bad xbar anchor ({} ports, {} us)",
                    a.ports, a.latency_us
                )));
            }
        }
        Ok(())
    }
}

/// Optical connection setup time for a switch with `ports` ports.
///
/// Anchored sizes return their calibrated value. Other sizes interpolate
/// linearly in (ln ports, latency) between the bracketing anchors, or
/// extrapolate from the two nearest. Below the smallest anchor the result is
/// floored at that anchor's latency scaled by `ports / anchor_ports`. A
/// single anchor scales proportionally.
pub fn xbar_latency(ports: u32, table: &CalibrationTable) -> Result<f64, ArchError> {
    if ports < 2 {
        return Err(ArchError::TooFewPorts(ports));
    }
    let mut anchors = table.xbar_anchors.clone();
    if anchors.is_empty() {
        return Err(ArchError::NoAnchors);
    }
    anchors.sort_by_key(|a| a.ports);
    anchors.dedup_by_key(|a| a.ports);
    if let Some(a) = anchors.iter().find(|a| a.ports == ports) {
        return Ok(a.latency_us);
    }
    let smallest = anchors[0];
    let proportional = smallest.latency_us * f64::from(ports) / f64::from(smallest.ports);
    if anchors.len() == 1 {
        return Ok(proportional);
    }
    let upper = anchors
        .iter()
        .position(|a| a.ports > ports)
        .unwrap_or(anchors.len() - 1)
        .max(1);
    let (lo, hi) = (anchors[upper - 1], anchors[upper]);
    let x = f64::from(ports).ln();
    let (x0, x1) = (f64::from(lo.ports).ln(), f64::from(hi.ports).ln());
    let value = lo.latency_us + (hi.latency_us - lo.latency_us) * (x - x0) / (x1 - x0);
    if ports < smallest.ports {
        Ok(value.max(proportional))
    } else {
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_are_exact() {
        let t = CalibrationTable::default();
        assert_eq!(xbar_latency(256, &t).unwrap(), 5230.0);
        assert_eq!(xbar_latency(32, &t).unwrap(), 1100.0);
    }

    #[test]
    fn interpolation_at_64_ports() {
        // ln(64/32) / ln(256/32) = 1/3 exactly.
        let v = xbar_latency(64, &CalibrationTable::default()).unwrap();
        let expected = 1100.0 + 4130.0 / 3.0;
        assert!((v - expected).abs() < 1e-9, "{v}");
        assert!((v - 2_476.666_666_666_667).abs() < 1e-9);
    }

    #[test]
    fn small_switches_use_the_proportional_floor() {
        let t = CalibrationTable::default();
        // Log-linear extrapolation goes negative at 16 ports.
        assert_eq!(xbar_latency(16, &t).unwrap(), 550.0);
        assert_eq!(xbar_latency(2, &t).unwrap(), 1100.0 / 16.0);
        let v24 = xbar_latency(24, &t).unwrap();
        assert!((825.0..1100.0).contains(&v24), "{v24}");
    }

    #[test]
    fn extrapolates_above_largest_anchor() {
        let t = CalibrationTable::default();
        let v = xbar_latency(512, &t).unwrap();
        assert!((v - (5230.0 + 4130.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn monotone_in_port_count() {
        let t = CalibrationTable::default();
        let mut prev = 0.0;
        for p in 2..=1024 {
            let v = xbar_latency(p, &t).unwrap();
            assert!(v >= prev, "{p}");
            prev = v;
        }
    }

    #[test]
    fn error_cases() {
        let mut t = CalibrationTable::default();
        assert_eq!(xbar_latency(1, &t), Err(ArchError::TooFewPorts(1)));
        t.xbar_anchors.clear();
        assert_eq!(xbar_latency(64, &t), Err(ArchError::NoAnchors));
        assert_eq!(t.validate(), Err(ArchError::NoAnchors));
        let mut single = CalibrationTable::default();
        single.xbar_anchors.truncate(1);
        assert_eq!(xbar_latency(64, &single).unwrap(), 2200.0);
    }

    #[test]
    fn default_table_validates() {
        CalibrationTable::default().validate().unwrap();
        let mut t = CalibrationTable::default();
        t.gate2.infidelity = 1.0;
        assert!(t.validate().is_err());
        t = CalibrationTable::default();
        t.attempt_success_probability = 0.0;
        assert_eq!(t.validate(), Err(ArchError::BadProbability(0.0)));
    }
}

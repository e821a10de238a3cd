use serde::{Deserialize, Serialize};

use super::{xbar_latency, ArchError, ArchitectureSpec, CalibrationTable};

/// Measured non-Xbar latency for one concurrency level. Takes precedence over
/// the geometric attempt model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedLatency {
    pub concurrency: u32,
    pub non_xbar_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementModel {
    /// Attempts in flight per entanglement.
    pub concurrency: u32,
    #[serde(default)]
    pub calibrated_non_xbar: Vec<CalibratedLatency>,
    pub distillation_iterations: u32,
    pub raw_fidelity: f64,
    /// Output fidelity used unless `analytic_distillation` is set.
    pub distilled_fidelity: f64,
    #[serde(default)]
    pub analytic_distillation: bool,
    pub max_concurrent_per_module: usize,
}

impl Default for EntanglementModel {
    fn default() -> Self {
        Self {
            concurrency: 1,
            calibrated_non_xbar: Vec::new(),
            distillation_iterations: 3,
            raw_fidelity: 0.94,
            distilled_fidelity: 0.993,
            analytic_distillation: false,
            max_concurrent_per_module: 2,
        }
    }
}

impl EntanglementModel {
    pub fn validate(&self) -> Result<(), ArchError> {
        if self.concurrency == 0 {
            return Err(ArchError::ZeroConcurrency);
        }
        for f in [self.raw_fidelity, self.distilled_fidelity] {
            if !(f > 0.0 && f <= 1.0) {
                return Err(ArchError::Calibration(format!("fidelity {f} outside (0, 1]")));
            }
        }
        if self.distillation_iterations > 16 {
            return Err(ArchError::Calibration("more than 16 distillation iterations".into()));
        }
        if self.max_concurrent_per_module == 0 {
            return Err(ArchError::Calibration(
                "max_concurrent_per_module must be positive".into(),
            ));
        }
        for o in &self.calibrated_non_xbar {
            if o.non_xbar_us.is_nan() || o.non_xbar_us <= 0.0 {
                return Err(ArchError::Calibration(format!(
                    "override for c={} must be positive",
                    o.concurrency
                )));
            }
        }
        Ok(())
    }

    pub fn override_for(&self, concurrency: u32) -> Option<f64> {
        self.calibrated_non_xbar
            .iter()
            .find(|o| o.concurrency == concurrency)
            .map(|o| o.non_xbar_us)
    }

    pub fn raw_pairs_per_entanglement(&self) -> u64 {
        1u64 << self.distillation_iterations
    }
}

/// Mean number of rounds of `c` parallel attempts until one succeeds.
pub fn expected_rounds(c: u32, p_s: f64) -> Result<f64, ArchError> {
    if c == 0 {
        return Err(ArchError::ZeroConcurrency);
    }
    if !(p_s > 0.0 && p_s <= 1.0) {
        return Err(ArchError::BadProbability(p_s));
    }
    // 1 - (1 - p)^c written as p * sum (1 - p)^i, exact at c = 1.
    let q = 1.0 - p_s;
    if c > 64 {
        return Ok(1.0 / (1.0 - q.powi(c as i32)));
    }
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..c {
        sum += term;
        term *= q;
    }
    Ok(1.0 / (p_s * sum))
}

/// Cooling plus attempt time, or the calibrated value for this concurrency.
pub fn non_xbar_latency(model: &EntanglementModel, table: &CalibrationTable) -> Result<f64, ArchError> {
    if let Some(v) = model.override_for(model.concurrency) {
        return Ok(v);
    }
    let rounds = expected_rounds(model.concurrency, table.attempt_success_probability)?;
    Ok(table.cooling_us + table.attempt_us * rounds)
}

pub fn entanglement_latency(
    arch: &ArchitectureSpec,
    model: &EntanglementModel,
    table: &CalibrationTable,
) -> Result<f64, ArchError> {
    Ok(xbar_latency(arch.governing_switch_ports(), table)? + non_xbar_latency(model, table)?)
}

/// One round of two-to-one purification.
pub fn purify_once(f: f64) -> f64 {
    let good = f * f;
    let bad = (1.0 - f) * (1.0 - f);
    good / (good + bad)
}

/// Output pair fidelity and raw pairs consumed.
pub fn distilled_fidelity(model: &EntanglementModel) -> (f64, u64) {
    let d = model.distillation_iterations;
    let raw = model.raw_pairs_per_entanglement();
    if d == 0 {
        return (model.raw_fidelity, raw);
    }
    if model.analytic_distillation {
        let f = (0..d).fold(model.raw_fidelity, |f, _| purify_once(f));
        (f, raw)
    } else {
        (model.distilled_fidelity, raw)
    }
}

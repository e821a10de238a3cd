use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    entanglement_latency, ArchError, ArchitectureSpec, CalibrationTable, EntanglementModel, ModuleSpec, SwitchTopology,
};

pub const PRESET_NAMES: [&str; 4] = ["desk-baseline", "desk-switched", "baseline", "switched"];

fn preset_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "desk-baseline" => include_str!("../../presets/desk-baseline.toml"),
        "desk-switched" => include_str!("../../presets/desk-switched.toml"),
        "baseline" => include_str!("../../presets/baseline.toml"),
        "switched" => include_str!("../../presets/switched.toml"),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingOptions {
    /// X-junction crossings charged per matter-link hop.
    pub x_junction_per_hop: u32,
}

impl Default for RoutingOptions {
    fn default() -> Self {
        Self { x_junction_per_hop: 1 }
    }
}

/// A validated machine: topology, calibration and entanglement model.
#[derive(Debug, Clone, PartialEq)]
pub struct Hardware {
    pub name: String,
    pub arch: ArchitectureSpec,
    pub calibration: CalibrationTable,
    pub entanglement: EntanglementModel,
    pub routing: RoutingOptions,
}

/// On-disk layout. Either `module_count` copies of `[module]`, or an explicit
/// `[[modules]]` list.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HardwareFile {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    module_count: Option<usize>,
    switch: SwitchTopology,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    module: Option<ModuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modules: Option<Vec<ModuleSpec>>,
    #[serde(default)]
    calibration: CalibrationTable,
    #[serde(default)]
    entanglement: EntanglementModel,
    #[serde(default)]
    routing: RoutingOptions,
}

impl Hardware {
    pub fn new(
        name: impl Into<String>,
        arch: ArchitectureSpec,
        calibration: CalibrationTable,
        entanglement: EntanglementModel,
        routing: RoutingOptions,
    ) -> Result<Self, ArchError> {
        calibration.validate()?;
        entanglement.validate()?;
        Ok(Self {
            name: name.into(),
            arch,
            calibration,
            entanglement,
            routing,
        })
    }

    pub fn preset(name: &str) -> Result<Self, ArchError> {
        let text = preset_text(name).ok_or_else(|| ArchError::UnknownPreset(name.to_string()))?;
        Self::from_toml_str(text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ArchError> {
        let file: HardwareFile = toml::from_str(text).map_err(|e| ArchError::Config(e.to_string()))?;
        let modules = match (file.module, file.modules) {
            (Some(template), None) => {
                let count = file
                    .module_count
                    .ok_or_else(|| ArchError::Config("[module] template requires module_count".into()))?;
                vec![template; count]
            }
            (None, Some(list)) => {
                if let Some(c) = file.module_count {
                    if c != list.len() {
                        return Err(ArchError::Config(format!(
                            "module_count {c} disagrees with {} listed modules",
                            list.len()
                        )));
                    }
                }
                list
            }
            _ => return Err(ArchError::Config("give exactly one of [module] or [[modules]]".into())),
        };
        let arch = ArchitectureSpec::new(modules, file.switch)?;
        Self::new(file.name, arch, file.calibration, file.entanglement, file.routing)
    }

    pub fn load(path: &Path) -> Result<Self, ArchError> {
        let text = std::fs::read_to_string(path).map_err(|e| ArchError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Resolve a preset name or a path to a TOML file.
    pub fn resolve(name_or_path: &str) -> Result<Self, ArchError> {
        if preset_text(name_or_path).is_some() {
            Self::preset(name_or_path)
        } else if Path::new(name_or_path).is_file() {
            Self::load(Path::new(name_or_path))
        } else {
            Err(ArchError::UnknownPreset(name_or_path.to_string()))
        }
    }

    pub fn to_toml_string(&self) -> String {
        let modules = self.arch.modules();
        let homogeneous = modules.iter().all(|m| m == &modules[0]);
        let file = HardwareFile {
            name: self.name.clone(),
            module_count: Some(modules.len()),
            switch: self.arch.switch().clone(),
            module: homogeneous.then(|| modules[0].clone()),
            modules: (!homogeneous).then(|| modules.to_vec()),
            calibration: self.calibration.clone(),
            entanglement: self.entanglement.clone(),
            routing: self.routing.clone(),
        };
        toml::to_string(&file).expect("hardware description is always serializable")
    }

    pub fn entanglement_latency(&self) -> Result<f64, ArchError> {
        entanglement_latency(&self.arch, &self.entanglement, &self.calibration)
    }

    /// Same machine with `ports` ports per module on `switch_ports`-port
    /// switches and `concurrency` attempts in flight.
    pub fn with_ports(&self, ports: u32, switch_ports: u32, concurrency: u32) -> Result<Self, ArchError> {
        let k = self.arch.module_count() as u32;
        let total = ports * k;
        if switch_ports == 0 || !total.is_multiple_of(switch_ports) {
            return Err(ArchError::Switch(format!(
                "{total} ports cannot be split into {switch_ports}-port switches"
            )));
        }
        let switch = if total == switch_ports {
            SwitchTopology::Monolithic { ports_total: total }
        } else {
            SwitchTopology::MultiSwitch {
                switch_count: total / switch_ports,
                ports_per_switch: switch_ports,
            }
        };
        let arch = self.arch.with_ports(ports, switch)?;
        let mut entanglement = self.entanglement.clone();
        entanglement.concurrency = concurrency;
        Self::new(
            format!("{}-p{ports}", self.name),
            arch,
            self.calibration.clone(),
            entanglement,
            self.routing.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::QccdRole;

    #[test]
    fn presets_load() {
        for name in PRESET_NAMES {
            let hw = Hardware::preset(name).unwrap();
            assert_eq!(hw.name, name);
            assert_eq!(hw.arch.module_count(), 4);
        }
        assert!(matches!(Hardware::preset("nope"), Err(ArchError::UnknownPreset(_))));
    }

    #[test]
    fn preset_latencies() {
        assert_eq!(
            Hardware::preset("baseline").unwrap().entanglement_latency().unwrap(),
            7980.0
        );
        assert_eq!(
            Hardware::preset("switched").unwrap().entanglement_latency().unwrap(),
            1865.0
        );
        assert_eq!(
            Hardware::preset("desk-baseline")
                .unwrap()
                .entanglement_latency()
                .unwrap(),
            7980.0
        );
        assert_eq!(
            Hardware::preset("desk-switched")
                .unwrap()
                .entanglement_latency()
                .unwrap(),
            1865.0
        );
    }

    #[test]
    fn full_module_shape() {
        let hw = Hardware::preset("baseline").unwrap();
        let m = hw.arch.module(0);
        assert_eq!(m.qccd_count(), 6);
        let comm = m.qccds.iter().filter(|q| q.role == QccdRole::Communication).count();
        assert_eq!(comm, 2);
        assert_eq!(m.links_per_pair, 8);
        assert_eq!(m.ports, 64);
        let dist: Vec<usize> = (0..6).map(|q| m.port_distance(q)).collect();
        assert_eq!(dist, vec![2, 2, 1, 1, 0, 0]);
    }

    #[test]
    fn toml_round_trip() {
        for name in PRESET_NAMES {
            let hw = Hardware::preset(name).unwrap();
            let text = hw.to_toml_string();
            assert_eq!(Hardware::from_toml_str(&text).unwrap(), hw);
        }
    }

    #[test]
    fn bad_files_are_rejected() {
        let hw = Hardware::preset("desk-switched").unwrap();
        let text = hw
            .to_toml_string()
            .replace("ports_per_switch = 32", "ports_per_switch = 30");
        assert!(Hardware::from_toml_str(&text).is_err());
        assert!(matches!(Hardware::from_toml_str("name = 3"), Err(ArchError::Config(_))));
        let no_count = hw.to_toml_string().replace("module_count = 4\n", "");
        assert!(Hardware::from_toml_str(&no_count).is_err());
    }

    #[test]
    fn port_scaling() {
        let hw = Hardware::preset("desk-switched").unwrap();
        let p48 = hw.with_ports(48, 32, 6).unwrap();
        assert_eq!(p48.arch.switch_count(), 6);
        let p16 = hw.with_ports(16, 32, 2).unwrap();
        assert_eq!(p16.arch.switch_count(), 2);
        assert_eq!(p16.entanglement_latency().unwrap(), 1100.0 + 2750.0);
        assert!(hw.with_ports(10, 32, 1).is_err());
    }
}

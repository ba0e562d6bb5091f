use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::flexscript::{DistributionExpr, Family, ObjType};

macro_rules! layer_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = DatasetError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let wanted = s.trim().to_ascii_lowercase().replace('-', "_");
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == wanted)
                    .ok_or_else(|| DatasetError::InvalidConstraint {
                        layer: stringify!($name),
                        value: s.to_string(),
                    })
            }
        }
    };
}

layer_enum!(
    /// Production line process: machines fed by queues, or by belts.
    LayoutType {
        Workstation => "workstation",
        Conveyor => "conveyor",
    }
);

layer_enum!(
    Automation {
        Manual => "manual",
        Operator => "operator",
        Robot => "robot",
        Agv => "agv",
        TaskExecutor => "task_executor",
    }
);

layer_enum!(
    LayoutCategory {
        Linear => "linear",
        UShaped => "u_shaped",
        Parallel => "parallel",
        ConveyorForm => "conveyor_form",
    }
);

impl Automation {
    /// Transporter object type and name, if any.
    pub fn transporter(self) -> Option<(ObjType, &'static str)> {
        match self {
            Automation::Manual => None,
            Automation::Operator => Some((ObjType::Operator, "Operator1")),
            Automation::Robot => Some((ObjType::Robot, "Robot1")),
            Automation::Agv => Some((ObjType::Agv, "AGV1")),
            Automation::TaskExecutor => Some((ObjType::TaskExecuter, "TaskExecuter1")),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Automation::Manual => "manual handling",
            Automation::Operator => "an operator",
            Automation::Robot => "a robot",
            Automation::Agv => "an AGV",
            Automation::TaskExecutor => "a task executer",
        }
    }
}

impl LayoutCategory {
    pub fn label(self) -> &'static str {
        match self {
            LayoutCategory::Linear => "linear",
            LayoutCategory::UShaped => "U-shaped",
            LayoutCategory::Parallel => "parallel",
            LayoutCategory::ConveyorForm => "conveyor-form",
        }
    }

    /// Fewest machines the topology can hold.
    pub fn min_machines(self) -> usize {
        match self {
            LayoutCategory::Parallel => 2,
            _ => 1,
        }
    }
}

/// One point of the five-layer design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub layout_type: LayoutType,
    pub automation: Automation,
    pub industry: String,
    pub layout_category: LayoutCategory,
    pub n_machines: usize,
    pub source_dist: DistributionExpr,
    pub machine_dists: Vec<DistributionExpr>,
    /// Travel speed of the transporter; unused for manual lines.
    pub travel_speed: f64,
    pub seed: u64,
}

impl GenSpec {
    /// Family tuple: source first, then machines in order.
    pub fn signature(&self) -> Vec<Family> {
        std::iter::once(self.source_dist.family)
            .chain(self.machine_dists.iter().map(|d| d.family))
            .collect()
    }

    pub fn check(&self) -> Result<(), DatasetError> {
        let bad = |reason: String| Err(DatasetError::InvalidSpec(reason));
        if self.machine_dists.len() != self.n_machines {
            return bad(format!(
                "{} machine distributions for {} machines",
                self.machine_dists.len(),
                self.n_machines
            ));
        }
        if self.n_machines < self.layout_category.min_machines() {
            return bad(format!(
                "{} layouts need at least {} machines",
                self.layout_category,
                self.layout_category.min_machines()
            ));
        }
        if !Family::ARRIVAL.contains(&self.source_dist.family) {
            return bad(format!("{} is not an arrival family", self.source_dist.family));
        }
        for d in std::iter::once(&self.source_dist).chain(&self.machine_dists) {
            d.validate().map_err(|e| DatasetError::InvalidSpec(e.to_string()))?;
        }
        if self.automation != Automation::Manual && !(self.travel_speed > 0.0 && self.travel_speed.is_finite()) {
            return bad(format!("travel speed {} must be positive", self.travel_speed));
        }
        Ok(())
    }
}

/// Layer fixings for [`super::sample_spec`]. `None` leaves a layer free.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub layout_type: Option<LayoutType>,
    pub automation: Option<Automation>,
    pub industry: Option<String>,
    pub layout_category: Option<LayoutCategory>,
    pub n_machines: Option<usize>,
    pub source_family: Option<Family>,
    pub machine_families: Option<Vec<Family>>,
}

/// Size of the parameter design space for one layout cell:
/// 5 arrival families times 9 service families per machine.
pub fn enumerate_combinations(n_machines: u32) -> u128 {
    Family::ARRIVAL.len() as u128 * (Family::SERVICE.len() as u128).pow(n_machines)
}

/// Family assignment number `index` of the exhaustive enumeration, with the
/// source family varying fastest.
pub fn combination(index: u128, n_machines: usize) -> Vec<Family> {
    let arrival = Family::ARRIVAL.len() as u128;
    let service = Family::SERVICE.len() as u128;
    let mut rest = index / arrival;
    let mut out = vec![Family::ARRIVAL[(index % arrival) as usize]];
    for _ in 0..n_machines {
        out.push(Family::SERVICE[(rest % service) as usize]);
        rest /= service;
    }
    out
}

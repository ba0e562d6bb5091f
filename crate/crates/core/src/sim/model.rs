//! Validation of a parsed script into an executable object graph.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::outcome::FailureReason;
use crate::flexscript::{DistributionExpr, ObjType, ParamValue, PortKind, Script};
use crate::scalar::Real;

pub type NodeId = usize;

pub const INTER_ARRIVAL_TIME: &str = "InterArrivalTime";
pub const PROCESS_TIME: &str = "ProcessTime";
pub const SETUP_TIME: &str = "SetupTime";
pub const CAPACITY: &str = "Capacity";
pub const COMPONENT_QUANTITY: &str = "ComponentQuantity";
pub const SPLIT_QUANTITY: &str = "SplitQuantity";
pub const CONVEY_SPEED: &str = "ConveySpeed";
pub const TRAVEL_SPEED: &str = "TravelSpeed";

/// Engine semantics that a script does not set itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig<T> {
    pub horizon: T,
    pub queue_capacity: usize,
    pub split_quantity: usize,
    pub component_quantity: usize,
    pub convey_speed: T,
    pub travel_speed: T,
    /// Upper bound on processed events before the run is declared faulty.
    pub max_events: u64,
    /// Upper bound on consecutive events at one timestamp (zero-delay loops).
    pub max_events_per_instant: u64,
    pub trace: bool,
}

pub const DEFAULT_HORIZON: f64 = 10_000.0;

impl<T: Real> Default for SimConfig<T> {
    fn default() -> Self {
        SimConfig {
            horizon: T::from_f64_lossy(DEFAULT_HORIZON),
            queue_capacity: 1000,
            split_quantity: 2,
            component_quantity: 1,
            convey_speed: T::one(),
            travel_speed: T::from_f64_lossy(2.0),
            max_events: 200_000_000,
            max_events_per_instant: 1_000_000,
            trace: false,
        }
    }
}

impl<T: Real> SimConfig<T> {
    pub fn with_horizon(horizon: T) -> Self {
        SimConfig {
            horizon,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("reference to undeclared object `{0}`")]
    DanglingReference(String),
    #[error("{0}")]
    NoPathToSink(String),
    #[error("`{object}` is missing required parameter {param}")]
    MissingRequiredParam { object: String, param: &'static str },
    #[error("invalid connection: {0}")]
    InvalidConnection(String),
    #[error("`{object}`: invalid {param}: {reason}")]
    InvalidParam {
        object: String,
        param: String,
        reason: String,
    },
}

impl BuildError {
    pub fn reason(&self) -> FailureReason {
        match self {
            BuildError::DanglingReference(_) => FailureReason::DanglingReference,
            BuildError::NoPathToSink(_) => FailureReason::NoPathToSink,
            BuildError::MissingRequiredParam { .. } => FailureReason::MissingRequiredParam,
            BuildError::InvalidConnection(_) | BuildError::InvalidParam { .. } => {
                FailureReason::RuntimeError
            }
        }
    }
}

/// Role-specific settings resolved from parameters and defaults.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSpec<T> {
    Source {
        arrival: DistributionExpr,
    },
    Queue {
        capacity: usize,
    },
    /// Processor and multiprocessor: one item at a time.
    Machine {
        setup: Option<DistributionExpr>,
        process: DistributionExpr,
    },
    Separator {
        setup: Option<DistributionExpr>,
        process: DistributionExpr,
        split: usize,
    },
    Combiner {
        setup: Option<DistributionExpr>,
        process: DistributionExpr,
        components: usize,
    },
    Conveyor {
        capacity: usize,
        length: T,
        speed: T,
    },
    Sink,
    Transporter {
        speed: T,
    },
    Dispatcher,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node<T> {
    pub name: String,
    pub obj_type: ObjType,
    pub position: [T; 3],
    pub spec: NodeSpec<T>,
    /// Flow successors in connection order.
    pub outputs: Vec<NodeId>,
    /// Flow predecessors in connection order.
    pub inputs: Vec<NodeId>,
    /// Transporters that carry items into this node.
    pub carriers: Vec<NodeId>,
}

/// A validated, executable model.
#[derive(Debug, Clone, PartialEq)]
pub struct SimModel<T> {
    pub nodes: Vec<Node<T>>,
    pub config: SimConfig<T>,
    /// Defaults applied and connections ignored during the build.
    pub diagnostics: Vec<String>,
}

impl<T: Real> SimModel<T> {
    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }
}

pub(crate) fn distance<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

struct ParamLookup<'a> {
    object: &'a str,
    params: BTreeMap<&'a str, &'a ParamValue>,
}

impl<'a> ParamLookup<'a> {
    fn dist(&self, name: &'static str) -> Option<DistributionExpr> {
        self.params.get(name).map(|v| v.as_dist())
    }

    fn required_dist(&self, name: &'static str) -> Result<DistributionExpr, BuildError> {
        self.dist(name).ok_or_else(|| BuildError::MissingRequiredParam {
            object: self.object.to_string(),
            param: name,
        })
    }

    fn invalid(&self, param: &str, reason: &str) -> BuildError {
        BuildError::InvalidParam {
            object: self.object.to_string(),
            param: param.to_string(),
            reason: reason.to_string(),
        }
    }

    fn scalar(&self, name: &'static str) -> Result<Option<f64>, BuildError> {
        match self.params.get(name) {
            None => Ok(None),
            Some(ParamValue::Scalar(v)) => Ok(Some(*v)),
            Some(ParamValue::Dist(d)) => Err(self.invalid(name, &format!("expected a number, found {d}"))),
        }
    }

    fn count(&self, name: &'static str, default: usize, min: usize) -> Result<usize, BuildError> {
        match self.scalar(name)? {
            None => Ok(default),
            Some(v) if v.fract() == 0.0 && v >= min as f64 && v <= 1e9 => Ok(v as usize),
            Some(v) => Err(self.invalid(name, &format!("expected an integer >= {min}, found {v}"))),
        }
    }

    fn speed<T: Real>(&self, name: &'static str, default: T) -> Result<T, BuildError> {
        match self.scalar(name)? {
            None => Ok(default),
            Some(v) if v > 0.0 => Ok(T::from_f64_lossy(v)),
            Some(v) => Err(self.invalid(name, &format!("speed must be > 0, found {v}"))),
        }
    }
}

/// Validates `script` and resolves it into a [`SimModel`].
pub fn build_model<T: Real>(script: &Script, config: SimConfig<T>) -> Result<SimModel<T>, BuildError> {
    if let Some(name) = script.dangling_references().first() {
        return Err(BuildError::DanglingReference(name.to_string()));
    }
    let index: HashMap<&str, NodeId> = script
        .decls
        .iter()
        .enumerate()
        .map(|(i, d)| (d.obj_name.as_str(), i))
        .collect();
    let mut diagnostics = Vec::new();

    let n = script.decls.len();
    let mut outputs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut inputs: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut direct_carriers: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut dispatch_links: Vec<(NodeId, NodeId)> = Vec::new();

    for c in &script.connections {
        let from = index[c.from_name.as_str()];
        let to = index[c.to_name.as_str()];
        let (ft, tt) = (script.decls[from].obj_type, script.decls[to].obj_type);
        match c.port_kind {
            PortKind::Flow => {
                if !ft.is_flow() || !tt.is_flow() {
                    return Err(BuildError::InvalidConnection(format!(
                        "flow connection {} -> {} involves a non-flow object",
                        c.from_name, c.to_name
                    )));
                }
                if ft == ObjType::Sink {
                    return Err(BuildError::InvalidConnection(format!(
                        "sink `{}` cannot have outgoing flow",
                        c.from_name
                    )));
                }
                if tt == ObjType::Source {
                    return Err(BuildError::InvalidConnection(format!(
                        "source `{}` cannot receive flow",
                        c.to_name
                    )));
                }
                if !outputs[from].contains(&to) {
                    outputs[from].push(to);
                    inputs[to].push(from);
                }
            }
            PortKind::Center => {
                // Center connections are undirected resource bindings.
                let (a, b) = (from, to);
                let (at, bt) = (ft, tt);
                if at.is_transporter() && bt.is_flow() {
                    push_unique(&mut direct_carriers[b], a);
                } else if bt.is_transporter() && at.is_flow() {
                    push_unique(&mut direct_carriers[a], b);
                } else if at == ObjType::Dispatcher && b != a {
                    dispatch_links.push((a, b));
                } else if bt == ObjType::Dispatcher && b != a {
                    dispatch_links.push((b, a));
                } else {
                    diagnostics.push(format!(
                        "center connection {} - {} has no effect",
                        c.from_name, c.to_name
                    ));
                }
            }
        }
    }

    // Dispatchers pass their team of transporters on to the flow objects they serve.
    let mut carriers = direct_carriers;
    for &(dispatcher, member) in &dispatch_links {
        if script.decls[member].obj_type.is_flow() {
            let team: Vec<NodeId> = dispatch_links
                .iter()
                .filter(|(d, m)| *d == dispatcher && script.decls[*m].obj_type.is_transporter())
                .map(|(_, m)| *m)
                .collect();
            if team.is_empty() {
                diagnostics.push(format!(
                    "dispatcher `{}` has no transporters; `{}` is fed directly",
                    script.decls[dispatcher].obj_name, script.decls[member].obj_name
                ));
            }
            for t in team {
                push_unique(&mut carriers[member], t);
            }
        }
    }

    let mut lookups: Vec<ParamLookup> = script
        .decls
        .iter()
        .map(|d| ParamLookup {
            object: d.obj_name.as_str(),
            params: BTreeMap::new(),
        })
        .collect();
    for p in &script.params {
        lookups[index[p.obj_name.as_str()]]
            .params
            .insert(p.param_name.as_str(), &p.value);
    }

    let position = |i: NodeId| -> [T; 3] { script.decls[i].position.map(T::from_f64_lossy) };

    let mut nodes = Vec::with_capacity(n);
    for (i, decl) in script.decls.iter().enumerate() {
        let p = &lookups[i];
        let service_default =
            || p.dist(PROCESS_TIME).unwrap_or_else(|| DistributionExpr::constant(0.0));
        let spec = match decl.obj_type {
            ObjType::Source => NodeSpec::Source {
                arrival: p.required_dist(INTER_ARRIVAL_TIME)?,
            },
            ObjType::Queue => NodeSpec::Queue {
                capacity: p.count(CAPACITY, config.queue_capacity, 1)?,
            },
            ObjType::Processor | ObjType::MultiProcessor => NodeSpec::Machine {
                setup: p.dist(SETUP_TIME),
                process: p.required_dist(PROCESS_TIME)?,
            },
            ObjType::Separator => NodeSpec::Separator {
                setup: p.dist(SETUP_TIME),
                process: service_default(),
                split: p.count(SPLIT_QUANTITY, config.split_quantity, 1)?,
            },
            ObjType::Combiner => NodeSpec::Combiner {
                setup: p.dist(SETUP_TIME),
                process: service_default(),
                components: p.count(COMPONENT_QUANTITY, config.component_quantity, 0)?,
            },
            ObjType::Conveyor => {
                let here = position(i);
                let upstream = inputs[i].first().map(|&u| position(u)).unwrap_or(here);
                let downstream = outputs[i].first().map(|&d| position(d)).unwrap_or(here);
                NodeSpec::Conveyor {
                    capacity: p.count(CAPACITY, config.queue_capacity, 1)?,
                    length: distance(&upstream, &downstream),
                    speed: p.speed(CONVEY_SPEED, config.convey_speed)?,
                }
            }
            ObjType::Sink => NodeSpec::Sink,
            ObjType::Operator | ObjType::Robot | ObjType::Agv | ObjType::TaskExecuter => {
                NodeSpec::Transporter {
                    speed: p.speed(TRAVEL_SPEED, config.travel_speed)?,
                }
            }
            ObjType::Dispatcher => NodeSpec::Dispatcher,
        };
        if matches!(decl.obj_type, ObjType::Separator | ObjType::Combiner)
            && p.dist(PROCESS_TIME).is_none()
        {
            diagnostics.push(format!(
                "`{}` has no {PROCESS_TIME}; using constant(0)",
                decl.obj_name
            ));
        }
        nodes.push(Node {
            name: decl.obj_name.clone(),
            obj_type: decl.obj_type,
            position: position(i),
            spec,
            outputs: std::mem::take(&mut outputs[i]),
            inputs: std::mem::take(&mut inputs[i]),
            carriers: std::mem::take(&mut carriers[i]),
        });
    }

    check_reachability(&nodes)?;

    Ok(SimModel {
        nodes,
        config,
        diagnostics,
    })
}

fn push_unique(v: &mut Vec<NodeId>, x: NodeId) {
    if !v.contains(&x) {
        v.push(x);
    }
}

fn check_reachability<T>(nodes: &[Node<T>]) -> Result<(), BuildError> {
    let sources: Vec<NodeId> = (0..nodes.len())
        .filter(|&i| nodes[i].obj_type == ObjType::Source)
        .collect();
    if sources.is_empty() {
        return Err(BuildError::NoPathToSink("model has no source".to_string()));
    }
    for s in sources {
        if nodes[s].outputs.is_empty() {
            return Err(BuildError::NoPathToSink(format!(
                "source `{}` has no outgoing connection",
                nodes[s].name
            )));
        }
        let mut seen = vec![false; nodes.len()];
        let mut frontier = VecDeque::from([s]);
        seen[s] = true;
        let mut reached = false;
        while let Some(u) = frontier.pop_front() {
            if nodes[u].obj_type == ObjType::Sink {
                reached = true;
                break;
            }
            for &v in &nodes[u].outputs {
                if !seen[v] {
                    seen[v] = true;
                    frontier.push_back(v);
                }
            }
        }
        if !reached {
            return Err(BuildError::NoPathToSink(format!(
                "no sink is reachable from source `{}`",
                nodes[s].name
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexscript::parse;

    const PIPELINE: &str = r#"
        createobject("/source", "Source1", 0, 0, 0);
        createobject("/queue", "Queue1", 4, 0, 0);
        createobject("/processor", "Processor1", 8, 0, 0);
        createobject("/sink", "Sink1", 12, 0, 0);
        setparam(Source1, "InterArrivalTime", exponential(10));
        setparam(Processor1, "ProcessTime", exponential(8));
        contextdragconnection(Source1, Queue1, "A");
        contextdragconnection(Queue1, Processor1, "A");
        contextdragconnection(Processor1, Sink1, "A");
    "#;

    fn build(src: &str) -> Result<SimModel<f64>, BuildError> {
        build_model(&parse(src), SimConfig::default())
    }

    #[test]
    fn minimal_pipeline_builds() {
        let m = build(PIPELINE).unwrap();
        assert_eq!(m.nodes.len(), 4);
        assert_eq!(m.nodes[1].outputs, vec![2]);
        assert_eq!(m.nodes[2].inputs, vec![1]);
        assert!(matches!(m.nodes[1].spec, NodeSpec::Queue { capacity: 1000 }));
    }

    #[test]
    fn source_without_outgoing_connection() {
        let src = PIPELINE.replace(r#"contextdragconnection(Source1, Queue1, "A");"#, "");
        assert!(matches!(build(&src), Err(BuildError::NoPathToSink(_))));
    }

    #[test]
    fn sink_unreachable() {
        let src = PIPELINE.replace(r#"contextdragconnection(Processor1, Sink1, "A");"#, "");
        let err = build(&src).unwrap_err();
        assert_eq!(err.reason(), FailureReason::NoPathToSink);
    }

    #[test]
    fn undeclared_endpoint() {
        let src = format!("{PIPELINE} contextdragconnection(Queue1, Queue9, \"A\");");
        assert_eq!(
            build(&src),
            Err(BuildError::DanglingReference("Queue9".into()))
        );
    }

    #[test]
    fn missing_process_time() {
        let src = PIPELINE.replace(r#"setparam(Processor1, "ProcessTime", exponential(8));"#, "");
        assert_eq!(
            build(&src).unwrap_err().reason(),
            FailureReason::MissingRequiredParam
        );
        let src = PIPELINE.replace(r#"setparam(Source1, "InterArrivalTime", exponential(10));"#, "");
        assert!(matches!(
            build(&src),
            Err(BuildError::MissingRequiredParam { param: INTER_ARRIVAL_TIME, .. })
        ));
    }

    #[test]
    fn combiner_defaults_are_reported() {
        let src = r#"
            createobject("/source", "S", 0, 0, 0);
            createobject("/combiner", "C", 1, 0, 0);
            createobject("/sink", "K", 2, 0, 0);
            setparam(S, "InterArrivalTime", 1);
            contextdragconnection(S, C, "A");
            contextdragconnection(C, K, "A");
        "#;
        let m = build(src).unwrap();
        assert_eq!(m.diagnostics.len(), 1);
        assert!(matches!(
            &m.nodes[1].spec,
            NodeSpec::Combiner { components: 1, process, .. } if *process == DistributionExpr::constant(0.0)
        ));
    }

    #[test]
    fn invalid_topology_and_params() {
        let src = format!("{PIPELINE} contextdragconnection(Sink1, Queue1, \"A\");");
        assert!(matches!(build(&src), Err(BuildError::InvalidConnection(_))));
        let src = format!("{PIPELINE} setparam(Queue1, \"Capacity\", 0);");
        let err = build(&src).unwrap_err();
        assert_eq!(err.reason(), FailureReason::RuntimeError);
        let src = format!("{PIPELINE} setparam(Queue1, \"Capacity\", exponential(3));");
        assert!(matches!(build(&src), Err(BuildError::InvalidParam { .. })));
    }

    #[test]
    fn carriers_resolve_directly_and_through_dispatchers() {
        let src = format!(
            "{PIPELINE}
            createobject(\"/operator\", \"Op1\", 8, -4, 0);
            createobject(\"/robot\", \"R1\", 8, -4, 0);
            createobject(\"/dispatcher\", \"D1\", 8, -6, 0);
            contextdragconnection(Processor1, Op1, \"S\");
            contextdragconnection(D1, R1, \"S\");
            contextdragconnection(D1, Queue1, \"S\");"
        );
        let m = build(&src).unwrap();
        let op = m.node_id("Op1").unwrap();
        let robot = m.node_id("R1").unwrap();
        assert_eq!(m.nodes[m.node_id("Processor1").unwrap()].carriers, vec![op]);
        assert_eq!(m.nodes[m.node_id("Queue1").unwrap()].carriers, vec![robot]);
    }

    #[test]
    fn conveyor_length_spans_its_neighbours() {
        let src = r#"
            createobject("/source", "S", 0, 0, 0);
            createobject("/conveyor", "C", 2, 0, 0);
            createobject("/sink", "K", 3, 4, 0);
            setparam(S, "InterArrivalTime", 1);
            contextdragconnection(S, C, "A");
            contextdragconnection(C, K, "A");
        "#;
        let m = build(src).unwrap();
        assert!(matches!(m.nodes[1].spec, NodeSpec::Conveyor { length, .. } if length == 5.0));
    }
}

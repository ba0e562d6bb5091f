//! Object placement and wiring for each layout category.

use super::spec::{GenSpec, LayoutCategory, LayoutType};
use crate::flexscript::{
    Connection, DistributionExpr, ObjType, ObjectDecl, ParamAssignment, ParamValue, PortKind,
    Script,
};
use crate::sim::{INTER_ARRIVAL_TIME, PROCESS_TIME, TRAVEL_SPEED};

/// Distance between neighbouring stations.
pub const PITCH: f64 = 4.0;
/// Vertical offset of the return leg of a U-shaped line.
pub const FOLD: f64 = 6.0;
/// Vertical offset of each branch of a parallel line.
pub const BRANCH: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Elem {
    Source,
    /// Buffer in front of a machine: a queue, or a belt in conveyor-form lines.
    Buffer,
    /// Belt inserted after a machine on conveyor lines.
    Belt,
    Machine(usize),
    Combiner,
    Sink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Placed {
    pub obj_type: ObjType,
    pub name: String,
    pub position: [f64; 3],
}

/// A layout ready to be written as code or drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub objects: Vec<Placed>,
    /// Item flow, in connection order.
    pub flow: Vec<(String, String)>,
    /// Transporter bindings: (machine, transporter).
    pub bindings: Vec<(String, String)>,
    pub params: Vec<ParamAssignment>,
}

impl Layout {
    pub fn object(&self, name: &str) -> Option<&Placed> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn to_script(&self) -> Script {
        let decls: Vec<ObjectDecl> = self
            .objects
            .iter()
            .map(|o| ObjectDecl {
                obj_type: o.obj_type,
                obj_name: o.name.clone(),
                position: o.position,
            })
            .collect();
        let edge = |(a, b): &(String, String), port_kind| Connection {
            from_name: a.clone(),
            to_name: b.clone(),
            port_kind,
        };
        let connections: Vec<Connection> = self
            .flow
            .iter()
            .map(|e| edge(e, PortKind::Flow))
            .chain(self.bindings.iter().map(|e| edge(e, PortKind::Center)))
            .collect();
        Script {
            recognized_statements: decls.len() + self.params.len() + connections.len(),
            decls,
            params: self.params.clone(),
            connections,
            ..Script::default()
        }
    }
}

/// Inserts a belt after every machine not already followed by one.
fn add_belts(chain: &mut Vec<Elem>, belt_buffers: bool) {
    let mut out = Vec::with_capacity(chain.len() * 2);
    for (i, &e) in chain.iter().enumerate() {
        out.push(e);
        if let Elem::Machine(_) = e {
            let next_is_belt =
                matches!(chain.get(i + 1), Some(Elem::Belt)) || (belt_buffers && chain.get(i + 1) == Some(&Elem::Buffer));
            if !next_is_belt {
                out.push(Elem::Belt);
            }
        }
    }
    *chain = out;
}

/// Buffer/machine pairs for `machines`, without a leading buffer when
/// `lead` is false.
fn stations(machines: std::ops::Range<usize>, lead: bool) -> Vec<Elem> {
    let mut out = Vec::new();
    for (k, j) in machines.enumerate() {
        if k > 0 || lead {
            out.push(Elem::Buffer);
        }
        out.push(Elem::Machine(j));
    }
    out
}

struct Namer {
    queues: usize,
    conveyors: usize,
    belt_buffers: bool,
}

impl Namer {
    fn place(&mut self, e: Elem, position: [f64; 3]) -> Placed {
        let (obj_type, name) = match e {
            Elem::Source => (ObjType::Source, "Source1".to_string()),
            Elem::Sink => (ObjType::Sink, "Sink1".to_string()),
            Elem::Combiner => (ObjType::Combiner, "Combiner1".to_string()),
            Elem::Machine(j) => (ObjType::Processor, format!("Processor{}", j + 1)),
            Elem::Buffer if !self.belt_buffers => {
                self.queues += 1;
                (ObjType::Queue, format!("Queue{}", self.queues))
            }
            Elem::Buffer | Elem::Belt => {
                self.conveyors += 1;
                (ObjType::Conveyor, format!("Conveyor{}", self.conveyors))
            }
        };
        Placed {
            obj_type,
            name,
            position,
        }
    }
}

fn chain_flow(objects: &[Placed]) -> Vec<(String, String)> {
    objects
        .windows(2)
        .map(|w| (w[0].name.clone(), w[1].name.clone()))
        .collect()
}

/// Places and wires every object of `spec`.
pub fn build_layout(spec: &GenSpec) -> Layout {
    let belt_buffers = spec.layout_category == LayoutCategory::ConveyorForm;
    let belts = spec.layout_type == LayoutType::Conveyor;
    let mut namer = Namer {
        queues: 0,
        conveyors: 0,
        belt_buffers,
    };
    let n = spec.n_machines;

    let (mut objects, flow) = if spec.layout_category == LayoutCategory::Parallel {
        let split = n.div_ceil(2);
        let mut branch_a = stations(0..split, false);
        let mut branch_b = stations(split..n, false);
        if belts {
            add_belts(&mut branch_a, belt_buffers);
            add_belts(&mut branch_b, belt_buffers);
        }
        let source = namer.place(Elem::Source, [0.0, 0.0, 0.0]);
        let head = namer.place(Elem::Buffer, [PITCH, 0.0, 0.0]);
        let mut row = |branch: &[Elem], y: f64| -> Vec<Placed> {
            branch
                .iter()
                .enumerate()
                .map(|(k, &e)| namer.place(e, [PITCH * (2 + k) as f64, y, 0.0]))
                .collect()
        };
        let a = row(&branch_a, -BRANCH);
        let b = row(&branch_b, BRANCH);
        let merge_x = PITCH * (2 + a.len().max(b.len())) as f64;
        let combiner = namer.place(Elem::Combiner, [merge_x, 0.0, 0.0]);
        let sink = namer.place(Elem::Sink, [merge_x + PITCH, 0.0, 0.0]);

        let mut flow = vec![(source.name.clone(), head.name.clone())];
        for branch in [&a, &b] {
            flow.push((head.name.clone(), branch[0].name.clone()));
            flow.extend(chain_flow(branch));
            flow.push((branch[branch.len() - 1].name.clone(), combiner.name.clone()));
        }
        flow.push((combiner.name.clone(), sink.name.clone()));

        let mut objects = vec![source, head];
        objects.extend(a);
        objects.extend(b);
        objects.extend([combiner, sink]);
        (objects, flow)
    } else {
        let mut chain = vec![Elem::Source];
        chain.extend(stations(0..n, true));
        chain.push(Elem::Sink);
        if belts {
            add_belts(&mut chain, belt_buffers);
        }
        let len = chain.len();
        let half = len.div_ceil(2);
        let objects: Vec<Placed> = chain
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let position = if spec.layout_category == LayoutCategory::UShaped && i >= half {
                    [PITCH * (2 * half - 1 - i) as f64, FOLD, 0.0]
                } else {
                    [PITCH * i as f64, 0.0, 0.0]
                };
                namer.place(e, position)
            })
            .collect();
        let flow = chain_flow(&objects);
        (objects, flow)
    };

    let mut params = vec![ParamAssignment {
        obj_name: "Source1".into(),
        param_name: INTER_ARRIVAL_TIME.into(),
        value: ParamValue::Dist(spec.source_dist.clone()),
    }];
    params.extend(spec.machine_dists.iter().enumerate().map(|(j, d)| ParamAssignment {
        obj_name: format!("Processor{}", j + 1),
        param_name: PROCESS_TIME.into(),
        value: ParamValue::Dist(d.clone()),
    }));
    if spec.layout_category == LayoutCategory::Parallel {
        params.push(ParamAssignment {
            obj_name: "Combiner1".into(),
            param_name: PROCESS_TIME.into(),
            value: ParamValue::Dist(DistributionExpr::constant(0.0)),
        });
    }

    let mut bindings = Vec::new();
    if let Some((obj_type, name)) = spec.automation.transporter() {
        let xs = objects.iter().map(|o| o.position[0]);
        let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
        let y_min = objects.iter().map(|o| o.position[1]).fold(f64::INFINITY, f64::min);
        objects.push(Placed {
            obj_type,
            name: name.to_string(),
            position: [(lo + hi) / 2.0, y_min - PITCH, 0.0],
        });
        bindings = (1..=n)
            .map(|j| (format!("Processor{j}"), name.to_string()))
            .collect();
        params.push(ParamAssignment {
            obj_name: name.to_string(),
            param_name: TRAVEL_SPEED.into(),
            value: ParamValue::Scalar(spec.travel_speed),
        });
    }

    Layout {
        objects,
        flow,
        bindings,
        params,
    }
}

//! The event loop.
//!
//! Items are pushed downstream as soon as a successor can take them: each
//! object offers its ready item to its flow successors in connection order and
//! the first one with room accepts. An object whose ready item is refused stays
//! blocked until something downstream frees up. A source creates its next item
//! one interarrival time after the previous one has left.

use std::collections::VecDeque;

use serde::Serialize;

use super::event_queue::EventQueue;
use super::model::{distance, NodeId, NodeSpec, SimModel};
use super::outcome::{ExecOutcome, FailureReason};
use crate::distributions::Sampler;
use crate::flexscript::{DistributionExpr, ObjType};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Create,
    Enter,
    Exit,
    ProcessStart,
    ProcessEnd,
    TransportStart,
    TransportEnd,
    Absorb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent<T> {
    pub time: T,
    pub object: String,
    pub kind: TraceKind,
    pub item: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectStats<T> {
    pub name: String,
    pub obj_type: ObjType,
    pub entered: u64,
    pub exited: u64,
    pub busy_time: T,
    pub blocked_time: T,
    pub utilization: T,
    pub max_content: usize,
}

/// Item accounting. `items_created = items_departed + items_in_system`,
/// where created counts source arrivals plus extra separator outputs and
/// departed counts sink absorptions plus components consumed by combiners.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats<T> {
    pub items_created: u64,
    pub items_departed: u64,
    pub items_in_system: u64,
    pub items_sunk: u64,
    pub items_split_created: u64,
    pub items_join_consumed: u64,
    pub simulated_horizon: T,
    pub events_processed: u64,
    pub per_object: Vec<ObjectStats<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult<T> {
    pub outcome: ExecOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_detail: Option<String>,
    pub stats: RunStats<T>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEvent<T>>,
}

impl<T: Real> RunResult<T> {
    /// A result for scripts that never reached the event loop.
    pub fn failed(reason: FailureReason, detail: impl Into<String>) -> Self {
        RunResult {
            outcome: ExecOutcome::Failure(reason),
            failure_detail: Some(detail.into()),
            stats: RunStats {
                items_created: 0,
                items_departed: 0,
                items_in_system: 0,
                items_sunk: 0,
                items_split_created: 0,
                items_join_consumed: 0,
                simulated_horizon: T::zero(),
                events_processed: 0,
                per_object: Vec::new(),
            },
            trace: Vec::new(),
        }
    }

    /// Departures per time unit over the simulated span.
    pub fn throughput(&self) -> T {
        let h = self.stats.simulated_horizon;
        if h > T::zero() {
            T::from_f64_lossy(self.stats.items_sunk as f64) / h
        } else {
            T::zero()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Item(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Arrival(NodeId),
    ProcessDone(NodeId),
    ConveyorReady(NodeId),
    TransportDone(NodeId),
}

#[derive(Debug)]
enum Phase {
    Idle,
    Busy(Item),
    Done(Item),
}

#[derive(Debug)]
struct Service<T> {
    setup: Option<Sampler<T>>,
    process: Sampler<T>,
}

#[derive(Debug)]
struct Request {
    item: Item,
    from: NodeId,
    to: NodeId,
    slot: usize,
}

#[derive(Debug)]
enum State<T> {
    Source {
        arrival: Sampler<T>,
        held: Option<Item>,
    },
    Queue {
        capacity: usize,
        items: VecDeque<Item>,
    },
    Machine {
        service: Service<T>,
        phase: Phase,
    },
    Separator {
        service: Service<T>,
        split: usize,
        phase: Phase,
        outgoing: VecDeque<Item>,
    },
    Combiner {
        service: Service<T>,
        components: usize,
        held: Vec<Vec<Item>>,
        phase: Phase,
    },
    Conveyor {
        capacity: usize,
        transit: T,
        items: VecDeque<(Item, T)>,
    },
    Sink,
    Transporter {
        speed: T,
        position: [T; 3],
        current: Option<Request>,
        pending: VecDeque<Request>,
    },
    Inert,
}

#[derive(Debug, Clone)]
struct Accounting<T> {
    entered: u64,
    exited: u64,
    busy_time: T,
    busy_since: Option<T>,
    blocked_time: T,
    blocked_since: Option<T>,
    max_content: usize,
}

// Sampler substreams per object: arrival, setup, process.
const STREAMS_PER_OBJECT: u64 = 4;

fn sampler<T: Real>(expr: &DistributionExpr, seed: u64, node: NodeId, role: u64) -> Sampler<T> {
    Sampler::new(expr.clone(), seed, node as u64 * STREAMS_PER_OBJECT + role)
}

fn service<T: Real>(
    setup: &Option<DistributionExpr>,
    process: &DistributionExpr,
    seed: u64,
    node: NodeId,
) -> Service<T> {
    Service {
        setup: setup.as_ref().map(|d| sampler(d, seed, node, 1)),
        process: sampler(process, seed, node, 2),
    }
}

struct Engine<'m, T> {
    model: &'m SimModel<T>,
    states: Vec<State<T>>,
    /// Slots promised to items in transit, per node and input slot.
    reserved: Vec<Vec<usize>>,
    acct: Vec<Accounting<T>>,
    events: EventQueue<T, Event>,
    now: T,
    next_item: u64,
    created: u64,
    split_created: u64,
    sunk: u64,
    join_consumed: u64,
    in_transit: u64,
    trace: Vec<TraceEvent<T>>,
    fault: Option<String>,
}

/// Runs `model` up to its configured horizon.
///
/// Failures are reported in the returned outcome, never by panicking.
pub fn run<T: Real>(model: &SimModel<T>, seed: u64) -> RunResult<T> {
    let horizon = model.config.horizon;
    if horizon <= T::zero() || !horizon.is_finite() {
        return RunResult::failed(FailureReason::RuntimeError, "horizon must be positive and finite");
    }
    let mut engine = Engine::new(model, seed);
    engine.start();

    let mut deadlock = false;
    let mut processed = 0u64;
    let mut same_instant = 0u64;
    while engine.fault.is_none() {
        let Some(t) = engine.events.peek_time() else {
            deadlock = engine.in_system() > 0;
            break;
        };
        if t > horizon {
            break;
        }
        let ev = engine.events.pop().expect("peeked");
        same_instant = if ev.time == engine.now { same_instant + 1 } else { 0 };
        engine.now = ev.time;
        processed += 1;
        if processed > model.config.max_events {
            engine.fault = Some("event budget exhausted".to_string());
            break;
        }
        if same_instant > model.config.max_events_per_instant {
            engine.fault = Some(format!("zero-delay event loop at t = {}", engine.now));
            break;
        }
        engine.handle(ev.event);
        engine.release();
        engine.check_invariants();
    }

    let (outcome, detail, end) = if let Some(f) = engine.fault.take() {
        (ExecOutcome::Failure(FailureReason::RuntimeError), Some(f), engine.now)
    } else if deadlock {
        (
            ExecOutcome::Failure(FailureReason::DeadlockDetected),
            Some(format!(
                "no pending events at t = {} with {} item(s) in the system",
                engine.now,
                engine.in_system()
            )),
            engine.now,
        )
    } else {
        (ExecOutcome::Success, None, horizon)
    };
    engine.finish(outcome, detail, end, processed)
}

impl<'m, T: Real> Engine<'m, T> {
    fn new(model: &'m SimModel<T>, seed: u64) -> Self {
        let states = model
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| match &node.spec {
                NodeSpec::Source { arrival } => State::Source {
                    arrival: sampler(arrival, seed, i, 0),
                    held: None,
                },
                NodeSpec::Queue { capacity } => State::Queue {
                    capacity: *capacity,
                    items: VecDeque::new(),
                },
                NodeSpec::Machine { setup, process } => State::Machine {
                    service: service(setup, process, seed, i),
                    phase: Phase::Idle,
                },
                NodeSpec::Separator {
                    setup,
                    process,
                    split,
                } => State::Separator {
                    service: service(setup, process, seed, i),
                    split: *split,
                    phase: Phase::Idle,
                    outgoing: VecDeque::new(),
                },
                NodeSpec::Combiner {
                    setup,
                    process,
                    components,
                } => State::Combiner {
                    service: service(setup, process, seed, i),
                    components: *components,
                    held: vec![Vec::new(); node.inputs.len().max(1)],
                    phase: Phase::Idle,
                },
                NodeSpec::Conveyor {
                    capacity,
                    length,
                    speed,
                } => State::Conveyor {
                    capacity: *capacity,
                    transit: *length / *speed,
                    items: VecDeque::new(),
                },
                NodeSpec::Sink => State::Sink,
                NodeSpec::Transporter { speed } => State::Transporter {
                    speed: *speed,
                    position: node.position,
                    current: None,
                    pending: VecDeque::new(),
                },
                NodeSpec::Dispatcher => State::Inert,
            })
            .collect();
        let n = model.nodes.len();
        Engine {
            model,
            states,
            reserved: model
                .nodes
                .iter()
                .map(|node| vec![0; node.inputs.len().max(1)])
                .collect(),
            acct: vec![
                Accounting {
                    entered: 0,
                    exited: 0,
                    busy_time: T::zero(),
                    busy_since: None,
                    blocked_time: T::zero(),
                    blocked_since: None,
                    max_content: 0,
                };
                n
            ],
            events: EventQueue::new(),
            now: T::zero(),
            next_item: 0,
            created: 0,
            split_created: 0,
            sunk: 0,
            join_consumed: 0,
            in_transit: 0,
            trace: Vec::new(),
            fault: None,
        }
    }

    fn record(&mut self, node: NodeId, kind: TraceKind, item: Option<Item>) {
        if self.model.config.trace {
            self.trace.push(TraceEvent {
                time: self.now,
                object: self.model.nodes[node].name.clone(),
                kind,
                item: item.map(|i| i.0),
            });
        }
    }

    fn delay(&mut self, d: T, what: &str) -> Option<T> {
        if d.is_finite() && d >= T::zero() {
            Some(d)
        } else {
            self.fault = Some(format!("invalid {what} duration {d}"));
            None
        }
    }

    fn new_item(&mut self) -> Item {
        let item = Item(self.next_item);
        self.next_item += 1;
        item
    }

    fn start(&mut self) {
        for i in 0..self.states.len() {
            if let State::Source { arrival, .. } = &mut self.states[i] {
                let d = arrival.sample();
                if let Some(d) = self.delay(d, "interarrival") {
                    self.events.schedule(d, Event::Arrival(i));
                }
            }
        }
    }

    fn handle(&mut self, event: Event) {
        match event {
            Event::Arrival(n) => {
                let item = self.new_item();
                self.created += 1;
                if let State::Source { held, .. } = &mut self.states[n] {
                    *held = Some(item);
                }
                self.record(n, TraceKind::Create, Some(item));
            }
            Event::ProcessDone(n) => self.finish_service(n),
            // The release pass picks up the item that reached the end.
            Event::ConveyorReady(_) => {}
            Event::TransportDone(t) => self.finish_transport(t),
        }
    }

    fn finish_service(&mut self, n: NodeId) {
        let now = self.now;
        let mut extra = 0usize;
        let mut done_item = None;
        match &mut self.states[n] {
            State::Machine { phase, .. } | State::Combiner { phase, .. } => {
                if let Phase::Busy(item) = *phase {
                    *phase = Phase::Done(item);
                    done_item = Some(item);
                }
            }
            State::Separator {
                phase,
                split,
                outgoing,
                ..
            } => {
                if let Phase::Busy(item) = *phase {
                    *phase = Phase::Done(item);
                    outgoing.push_back(item);
                    extra = *split - 1;
                    done_item = Some(item);
                }
            }
            _ => {}
        }
        if let Some(since) = self.acct[n].busy_since.take() {
            self.acct[n].busy_time = self.acct[n].busy_time + (now - since);
        }
        for _ in 0..extra {
            let item = self.new_item();
            self.split_created += 1;
            if let State::Separator { outgoing, .. } = &mut self.states[n] {
                outgoing.push_back(item);
            }
            self.record(n, TraceKind::Create, Some(item));
        }
        if done_item.is_some() {
            self.record(n, TraceKind::ProcessEnd, done_item);
        }
    }

    fn has_output(&self, n: NodeId) -> bool {
        match &self.states[n] {
            State::Source { held, .. } => held.is_some(),
            State::Queue { items, .. } => !items.is_empty(),
            State::Machine { phase, .. } | State::Combiner { phase, .. } => {
                matches!(phase, Phase::Done(_))
            }
            State::Separator { outgoing, .. } => !outgoing.is_empty(),
            State::Conveyor { items, .. } => items.front().is_some_and(|(_, ready)| *ready <= self.now),
            _ => false,
        }
    }

    /// Input slot `from` would use at `to`, if `to` has room for it now.
    fn accepts(&self, to: NodeId, from: NodeId) -> Option<usize> {
        let reserved = &self.reserved[to];
        match &self.states[to] {
            State::Queue { capacity, items } => (items.len() + reserved[0] < *capacity).then_some(0),
            State::Conveyor {
                capacity, items, ..
            } => (items.len() + reserved[0] < *capacity).then_some(0),
            State::Machine { phase, .. } | State::Separator { phase, .. } => {
                (matches!(phase, Phase::Idle) && reserved[0] == 0).then_some(0)
            }
            State::Combiner {
                held,
                components,
                phase,
                ..
            } => {
                if !matches!(phase, Phase::Idle) {
                    return None;
                }
                let slot = self.model.nodes[to].inputs.iter().position(|&i| i == from)?;
                let need = if slot == 0 { 1 } else { *components };
                (held[slot].len() + reserved[slot] < need).then_some(slot)
            }
            State::Sink => Some(0),
            _ => None,
        }
    }

    fn take_output(&mut self, n: NodeId) -> Option<Item> {
        let now = self.now;
        let mut reschedule = None;
        let item = match &mut self.states[n] {
            State::Source { held, arrival } => {
                let item = held.take();
                reschedule = Some(arrival.sample());
                item
            }
            State::Queue { items, .. } => items.pop_front(),
            State::Conveyor { items, .. } => items.pop_front().map(|(item, _)| item),
            State::Machine { phase, .. } | State::Combiner { phase, .. } => {
                match std::mem::replace(phase, Phase::Idle) {
                    Phase::Done(item) => Some(item),
                    other => {
                        *phase = other;
                        None
                    }
                }
            }
            State::Separator {
                phase, outgoing, ..
            } => {
                let item = outgoing.pop_front();
                if outgoing.is_empty() {
                    *phase = Phase::Idle;
                }
                item
            }
            _ => None,
        };
        if let Some(d) = reschedule {
            if let Some(d) = self.delay(d, "interarrival") {
                self.events.schedule(now + d, Event::Arrival(n));
            }
        }
        if item.is_some() {
            self.acct[n].exited += 1;
            self.record(n, TraceKind::Exit, item);
        }
        item
    }

    fn try_push(&mut self, from: NodeId) -> bool {
        let model = self.model;
        for &to in &model.nodes[from].outputs {
            let Some(slot) = self.accepts(to, from) else {
                continue;
            };
            let Some(item) = self.take_output(from) else {
                return false;
            };
            if model.nodes[to].carriers.is_empty() {
                self.deliver(to, slot, item);
            } else {
                self.dispatch(Request {
                    item,
                    from,
                    to,
                    slot,
                });
            }
            return true;
        }
        false
    }

    fn start_service(&mut self, n: NodeId, item: Item) {
        let duration = match &mut self.states[n] {
            State::Machine { service, .. }
            | State::Separator { service, .. }
            | State::Combiner { service, .. } => {
                let setup = service.setup.as_mut().map_or(T::zero(), |s| s.sample());
                setup + service.process.sample()
            }
            _ => return,
        };
        let Some(d) = self.delay(duration, "service") else {
            return;
        };
        match &mut self.states[n] {
            State::Machine { phase, .. }
            | State::Separator { phase, .. }
            | State::Combiner { phase, .. } => *phase = Phase::Busy(item),
            _ => {}
        }
        self.acct[n].busy_since = Some(self.now);
        self.events.schedule(self.now + d, Event::ProcessDone(n));
        self.record(n, TraceKind::ProcessStart, Some(item));
    }

    fn deliver(&mut self, to: NodeId, slot: usize, item: Item) {
        self.acct[to].entered += 1;
        let now = self.now;
        let mut start = None;
        match &mut self.states[to] {
            State::Queue { items, .. } => items.push_back(item),
            State::Conveyor { items, transit, .. } => {
                let ready = now + *transit;
                items.push_back((item, ready));
                self.events.schedule(ready, Event::ConveyorReady(to));
            }
            State::Machine { .. } | State::Separator { .. } => start = Some(item),
            State::Combiner {
                held, components, ..
            } => {
                held[slot].push(item);
                let need = |s: usize| if s == 0 { 1 } else { *components };
                if (0..held.len()).all(|s| held[s].len() >= need(s)) {
                    let container = held[0].remove(0);
                    let consumed: usize = held.iter().map(Vec::len).sum();
                    held.iter_mut().for_each(Vec::clear);
                    self.join_consumed += consumed as u64;
                    start = Some(container);
                }
            }
            State::Sink => {
                self.sunk += 1;
                self.record(to, TraceKind::Absorb, Some(item));
                return;
            }
            _ => {
                self.fault = Some(format!(
                    "item delivered to `{}`, which cannot hold items",
                    self.model.nodes[to].name
                ));
                return;
            }
        }
        self.record(to, TraceKind::Enter, Some(item));
        if let Some(item) = start {
            self.start_service(to, item);
        }
    }

    fn dispatch(&mut self, request: Request) {
        let to = request.to;
        self.reserved[to][request.slot] += 1;
        self.in_transit += 1;
        // First idle carrier, else the shortest backlog; ties go to the
        // earlier binding.
        let team = &self.model.nodes[to].carriers;
        let load = |t: NodeId| match &self.states[t] {
            State::Transporter {
                current, pending, ..
            } => pending.len() + usize::from(current.is_some()),
            _ => usize::MAX,
        };
        let chosen = *team.iter().min_by_key(|&&t| load(t)).expect("nonempty team");
        let idle = matches!(&self.states[chosen], State::Transporter { current: None, .. });
        if let State::Transporter { pending, .. } = &mut self.states[chosen] {
            pending.push_back(request);
        }
        if idle {
            self.start_transport(chosen);
        }
    }

    fn start_transport(&mut self, t: NodeId) {
        let model = self.model;
        let (speed, travel, item) = match &mut self.states[t] {
            State::Transporter {
                speed,
                position,
                current,
                pending,
            } => {
                let Some(req) = pending.pop_front() else {
                    return;
                };
                let pickup = model.nodes[req.from].position;
                let dropoff = model.nodes[req.to].position;
                let travel = distance(position, &pickup) + distance(&pickup, &dropoff);
                *position = dropoff;
                let item = req.item;
                *current = Some(req);
                (*speed, travel, item)
            }
            _ => return,
        };
        let Some(d) = self.delay(travel / speed, "travel") else {
            return;
        };
        self.acct[t].busy_since = Some(self.now);
        self.events.schedule(self.now + d, Event::TransportDone(t));
        self.record(t, TraceKind::TransportStart, Some(item));
    }

    fn finish_transport(&mut self, t: NodeId) {
        let req = match &mut self.states[t] {
            State::Transporter { current, .. } => current.take(),
            _ => None,
        };
        if let Some(since) = self.acct[t].busy_since.take() {
            self.acct[t].busy_time = self.acct[t].busy_time + (self.now - since);
        }
        if let Some(req) = req {
            self.record(t, TraceKind::TransportEnd, Some(req.item));
            self.reserved[req.to][req.slot] -= 1;
            self.in_transit -= 1;
            self.deliver(req.to, req.slot, req.item);
        }
        self.start_transport(t);
    }

    /// Moves every item that can move at the current instant.
    fn release(&mut self) {
        let budget = 1_000_000usize + 16 * self.in_system() as usize;
        let mut moves = 0usize;
        loop {
            let mut progress = false;
            for n in 0..self.states.len() {
                while self.fault.is_none() && self.has_output(n) && self.try_push(n) {
                    progress = true;
                    moves += 1;
                }
            }
            if !progress || self.fault.is_some() {
                break;
            }
            if moves > budget {
                self.fault = Some(format!("items circulate without delay at t = {}", self.now));
                return;
            }
        }
        for n in 0..self.states.len() {
            let blocked = self.has_output(n);
            let acct = &mut self.acct[n];
            match (blocked, acct.blocked_since) {
                (true, None) => acct.blocked_since = Some(self.now),
                (false, Some(since)) => {
                    acct.blocked_time = acct.blocked_time + (self.now - since);
                    acct.blocked_since = None;
                }
                _ => {}
            }
        }
    }

    fn content(&self, n: NodeId) -> usize {
        match &self.states[n] {
            State::Source { held, .. } => usize::from(held.is_some()),
            State::Queue { items, .. } => items.len(),
            State::Conveyor { items, .. } => items.len(),
            State::Machine { phase, .. } => usize::from(!matches!(phase, Phase::Idle)),
            State::Separator { phase, outgoing, .. } => match phase {
                Phase::Busy(_) => 1,
                _ => outgoing.len(),
            },
            State::Combiner { held, phase, .. } => {
                held.iter().map(Vec::len).sum::<usize>() + usize::from(!matches!(phase, Phase::Idle))
            }
            _ => 0,
        }
    }

    fn in_system(&self) -> u64 {
        (0..self.states.len()).map(|n| self.content(n) as u64).sum::<u64>() + self.in_transit
    }

    fn check_invariants(&mut self) {
        if self.fault.is_some() {
            return;
        }
        let created = self.created + self.split_created;
        let departed = self.sunk + self.join_consumed;
        let in_system = self.in_system();
        if created != departed + in_system {
            self.fault = Some(format!(
                "conservation violated at t = {}: created {created}, departed {departed}, in system {in_system}",
                self.now
            ));
            return;
        }
        for n in 0..self.states.len() {
            let content = self.content(n);
            let over = match &self.states[n] {
                State::Queue { capacity, .. } | State::Conveyor { capacity, .. } => content > *capacity,
                _ => false,
            };
            if over {
                self.fault = Some(format!(
                    "`{}` exceeded its capacity at t = {}",
                    self.model.nodes[n].name, self.now
                ));
                return;
            }
            let acct = &mut self.acct[n];
            acct.max_content = acct.max_content.max(content);
        }
    }

    fn finish(
        mut self,
        outcome: ExecOutcome,
        failure_detail: Option<String>,
        end: T,
        events_processed: u64,
    ) -> RunResult<T> {
        let in_system = self.in_system();
        let per_object = self
            .model
            .nodes
            .iter()
            .zip(self.acct.iter_mut())
            .map(|(node, acct)| {
                if let Some(since) = acct.busy_since {
                    acct.busy_time = acct.busy_time + (end - since).max(T::zero());
                }
                if let Some(since) = acct.blocked_since {
                    acct.blocked_time = acct.blocked_time + (end - since).max(T::zero());
                }
                ObjectStats {
                    name: node.name.clone(),
                    obj_type: node.obj_type,
                    entered: acct.entered,
                    exited: acct.exited,
                    busy_time: acct.busy_time,
                    blocked_time: acct.blocked_time,
                    utilization: if end > T::zero() {
                        acct.busy_time / end
                    } else {
                        T::zero()
                    },
                    max_content: acct.max_content,
                }
            })
            .collect();
        RunResult {
            outcome,
            failure_detail,
            stats: RunStats {
                items_created: self.created + self.split_created,
                items_departed: self.sunk + self.join_consumed,
                items_in_system: in_system,
                items_sunk: self.sunk,
                items_split_created: self.split_created,
                items_join_consumed: self.join_consumed,
                simulated_horizon: end,
                events_processed,
                per_object,
            },
            trace: self.trace,
        }
    }
}

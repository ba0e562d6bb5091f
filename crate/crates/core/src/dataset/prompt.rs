use rand::seq::IndexedRandom;
use rand::Rng;

use super::spec::{Automation, GenSpec, LayoutCategory, LayoutType};
use crate::distributions::substream_rng;

/// Substream of the record seed reserved for wording choices.
const PROMPT_STREAM: u64 = 0x70726f6d7074;

const OPENINGS: [&str; 4] = [
    "Create a {category} {flow} production line for a {industry} facility with {machines} and {automation}.",
    "Build a simulation model of a {industry} plant: a {category} {flow} layout with {machines}, using {automation}.",
    "Set up a {category} line in {industry} manufacturing that has {machines}, {flow} material flow and {automation}.",
    "Model a {industry} shop floor arranged as a {category} {flow} line of {machines} with {automation}.",
];

const ARRIVALS: [&str; 3] = [
    "Items arrive at {name} with interarrival times following {dist}.",
    "{name} releases parts according to {dist}.",
    "Arrivals at {name} follow {dist}.",
];

const SERVICES: [&str; 4] = [
    "{name} processes each item in {dist}.",
    "{name} has a service time of {dist}.",
    "Processing at {name} takes {dist}.",
    "Service at {name} is drawn from {dist}.",
];

const MERGES: [&str; 2] = [
    "The two branches merge at {name}, which takes {dist} per item.",
    "{name} joins the branches with a combining time of {dist}.",
];

const TRANSPORTS: [&str; 3] = [
    "{name} carries items to every processor at a travel speed of {speed}.",
    "Material handling is done by {name}, moving at speed {speed}.",
    "{name} serves all processors and travels at {speed} units per time.",
];

fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in slots {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

fn flow_word(t: LayoutType) -> &'static str {
    match t {
        LayoutType::Workstation => "workstation-based",
        LayoutType::Conveyor => "conveyor-based",
    }
}

fn automation_words(a: Automation, rng: &mut impl Rng) -> &'static str {
    match a {
        Automation::Manual => ["manual handling", "no transport resource"].choose(rng).unwrap(),
        Automation::Operator => ["an operator", "a human operator"].choose(rng).unwrap(),
        Automation::Robot => ["a robot", "a robotic handler"].choose(rng).unwrap(),
        Automation::Agv => ["an AGV", "an automated guided vehicle"].choose(rng).unwrap(),
        Automation::TaskExecutor => ["a task executer", "a task-executer resource"].choose(rng).unwrap(),
    }
}

/// Natural-language description of `spec`. Wording depends on `spec.seed`;
/// every parameter value is stated exactly once.
pub fn render_prompt(spec: &GenSpec) -> String {
    let mut rng = substream_rng(spec.seed, PROMPT_STREAM);
    let machines = match spec.n_machines {
        1 => "1 machine".to_string(),
        n => format!("{n} machines"),
    };
    let industry = spec.industry.replace('_', " ");
    let automation = automation_words(spec.automation, &mut rng);
    let mut sentences = vec![fill(
        OPENINGS.choose(&mut rng).unwrap(),
        &[
            ("category", spec.layout_category.label()),
            ("flow", flow_word(spec.layout_type)),
            ("industry", &industry),
            ("machines", &machines),
            ("automation", automation),
        ],
    )];
    sentences.push(fill(
        ARRIVALS.choose(&mut rng).unwrap(),
        &[("name", "Source1"), ("dist", &spec.source_dist.to_string())],
    ));
    for (j, d) in spec.machine_dists.iter().enumerate() {
        sentences.push(fill(
            SERVICES.choose(&mut rng).unwrap(),
            &[("name", &format!("Processor{}", j + 1)), ("dist", &d.to_string())],
        ));
    }
    if spec.layout_category == LayoutCategory::Parallel {
        sentences.push(fill(
            MERGES.choose(&mut rng).unwrap(),
            &[("name", "Combiner1"), ("dist", "constant(0)")],
        ));
    }
    if let Some((_, name)) = spec.automation.transporter() {
        sentences.push(fill(
            TRANSPORTS.choose(&mut rng).unwrap(),
            &[("name", name), ("speed", &spec.travel_speed.to_string())],
        ));
    }
    sentences.join(" ")
}

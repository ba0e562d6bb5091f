use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dist::DistributionExpr;

/// Closed registry of object types a script may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjType {
    #[serde(rename = "/source")]
    Source,
    #[serde(rename = "/queue")]
    Queue,
    #[serde(rename = "/processor")]
    Processor,
    #[serde(rename = "/separator")]
    Separator,
    #[serde(rename = "/combiner")]
    Combiner,
    #[serde(rename = "/multiprocessor")]
    MultiProcessor,
    #[serde(rename = "/conveyor")]
    Conveyor,
    #[serde(rename = "/sink")]
    Sink,
    #[serde(rename = "/operator")]
    Operator,
    #[serde(rename = "/robot")]
    Robot,
    #[serde(rename = "/agv")]
    Agv,
    #[serde(rename = "/taskexecuter")]
    TaskExecuter,
    #[serde(rename = "/dispatcher")]
    Dispatcher,
}

impl ObjType {
    pub const ALL: [ObjType; 13] = [
        ObjType::Source,
        ObjType::Queue,
        ObjType::Processor,
        ObjType::Separator,
        ObjType::Combiner,
        ObjType::MultiProcessor,
        ObjType::Conveyor,
        ObjType::Sink,
        ObjType::Operator,
        ObjType::Robot,
        ObjType::Agv,
        ObjType::TaskExecuter,
        ObjType::Dispatcher,
    ];

    pub fn path(self) -> &'static str {
        match self {
            ObjType::Source => "/source",
            ObjType::Queue => "/queue",
            ObjType::Processor => "/processor",
            ObjType::Separator => "/separator",
            ObjType::Combiner => "/combiner",
            ObjType::MultiProcessor => "/multiprocessor",
            ObjType::Conveyor => "/conveyor",
            ObjType::Sink => "/sink",
            ObjType::Operator => "/operator",
            ObjType::Robot => "/robot",
            ObjType::Agv => "/agv",
            ObjType::TaskExecuter => "/taskexecuter",
            ObjType::Dispatcher => "/dispatcher",
        }
    }

    /// Machines carry a service time.
    pub fn is_machine(self) -> bool {
        matches!(
            self,
            ObjType::Processor | ObjType::Separator | ObjType::Combiner | ObjType::MultiProcessor
        )
    }

    /// Task executers move items between flow objects.
    pub fn is_transporter(self) -> bool {
        matches!(
            self,
            ObjType::Operator | ObjType::Robot | ObjType::Agv | ObjType::TaskExecuter
        )
    }

    /// Objects that take part in item flow ("A" connections).
    pub fn is_flow(self) -> bool {
        !self.is_transporter() && self != ObjType::Dispatcher
    }
}

impl fmt::Display for ObjType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.path())
    }
}

impl FromStr for ObjType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjType::ALL
            .into_iter()
            .find(|t| t.path() == s)
            .ok_or_else(|| format!("unknown object type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectDecl {
    pub obj_type: ObjType,
    pub obj_name: String,
    pub position: [f64; 3],
}

/// Port kind of a drag connection: item flow or center (resource binding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PortKind {
    #[serde(rename = "A")]
    Flow,
    #[serde(rename = "S")]
    Center,
}

impl PortKind {
    pub fn code(self) -> &'static str {
        match self {
            PortKind::Flow => "A",
            PortKind::Center => "S",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Connection {
    pub from_name: String,
    pub to_name: String,
    pub port_kind: PortKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    Dist(DistributionExpr),
}

impl ParamValue {
    /// Same kind of value and numerically equal within `rel_tol`.
    pub fn approx_eq(&self, other: &ParamValue, rel_tol: f64) -> bool {
        match (self, other) {
            (ParamValue::Scalar(a), ParamValue::Scalar(b)) => {
                crate::scalar::approx_eq_rel(*a, *b, rel_tol)
            }
            (ParamValue::Dist(a), ParamValue::Dist(b)) => a.approx_eq(b, rel_tol),
            _ => false,
        }
    }

    /// Scalars behave as `constant(value)` when used as durations.
    pub fn as_dist(&self) -> DistributionExpr {
        match self {
            ParamValue::Scalar(v) => DistributionExpr::constant(*v),
            ParamValue::Dist(d) => d.clone(),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Scalar(v) => write!(f, "{v}"),
            ParamValue::Dist(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamAssignment {
    pub obj_name: String,
    pub param_name: String,
    pub value: ParamValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Non-fatal findings recorded while extracting a script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    DuplicateDeclaration { name: String, line: usize },
    DanglingReference { name: String, line: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateDeclaration { name, line } => {
                write!(f, "line {line}: duplicate declaration of `{name}` ignored")
            }
            Diagnostic::DanglingReference { name, line } => {
                write!(f, "line {line}: reference to undeclared object `{name}`")
            }
        }
    }
}

/// Everything extracted from one script.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub decls: Vec<ObjectDecl>,
    pub params: Vec<ParamAssignment>,
    pub connections: Vec<Connection>,
    /// Statements that matched the grammar, including ignored duplicates.
    pub recognized_statements: usize,
    pub unknown_statements: usize,
    pub parse_errors: Vec<ParseError>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Script {
    pub fn decl(&self, name: &str) -> Option<&ObjectDecl> {
        self.decls.iter().find(|d| d.obj_name == name)
    }

    /// No statement was extracted at all.
    pub fn is_empty(&self) -> bool {
        self.decls.is_empty() && self.params.is_empty() && self.connections.is_empty()
    }

    pub fn dangling_references(&self) -> Vec<&str> {
        self.diagnostics
            .iter()
            .filter_map(|d| match d {
                Diagnostic::DanglingReference { name, .. } => Some(name.as_str()),
                _ => None,
            })
            .collect()
    }
}

//! The script subset: object declarations, parameter assignments and drag
//! connections.
//!
//! ```text
//! createobject("/source", "Source1", 0, 0, 0);
//! setparam(Source1, "InterArrivalTime", exponential(10));
//! contextdragconnection(Source1, Queue1, "A");
//! ```

mod ast;
mod dist;
mod emit;
mod lexer;
mod parser;

pub use ast::{
    Connection, Diagnostic, ObjType, ObjectDecl, ParamAssignment, ParamValue, ParseError,
    PortKind, Script,
};
pub use dist::{parse_distribution, DistError, DistributionExpr, Family};
pub use emit::{emit_canonical, EmitError};
pub use parser::parse;

//! The `.resp` scenario language: lexer, recovering parser, and canonical
//! serializer.
//!
//! ```text
//! actor op kind human "Remote Operator"
//! occurrence o2 kind omission by op "fails to send control signal"
//! model {
//!   exogenous link_lost
//!   equation signal_missing = link_lost
//!   context link_lost = true
//!   bind signal_missing -> o2
//! }
//! claim moral(attributability) op for o2
//! fact control(op, o2) = unmet
//! ```

pub mod ast;
mod lexer;
mod parser;
mod serialize;

pub use parser::{parse, parse_named};
pub use serialize::serialize;

use crate::diagnostic::{has_errors, Diagnostic};
use crate::model::{build_scenario, Scenario};

/// Parses and builds. Building is skipped when parsing failed, since
/// dropped statements would surface as spurious unresolved references.
pub fn load(file: &str, source: &str) -> (Option<Scenario>, Vec<Diagnostic>) {
    let (declarations, mut diagnostics) = parse_named(file, source);
    if has_errors(&diagnostics) {
        return (None, diagnostics);
    }
    let (scenario, mut more) = build_scenario(&declarations);
    diagnostics.append(&mut more);
    (scenario, diagnostics)
}

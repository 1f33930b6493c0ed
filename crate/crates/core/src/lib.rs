//! Responsibility networks for AI incidents: a scenario language, NESS
//! causation over boolean structural models, condition ledgers for the
//! causal, role, liability and moral senses of responsibility, detectors for
//! unjust attribution patterns, and DOT rendering.

pub mod analysis;
pub mod causal;
pub mod diagnostic;
pub mod dsl;
pub mod model;
pub mod render;
pub mod rules;

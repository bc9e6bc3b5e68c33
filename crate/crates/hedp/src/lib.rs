//! Defect prediction from human-error analysis.
//!
//! The crate mechanizes a review technique that matches a model of a
//! programming task against a model of the programmer's knowledge, looking
//! for situations that historically provoke systematic human error. Each
//! match becomes a predicted defect: a location in the task, the concrete
//! form the defect is expected to take, and a trace of the conditions that
//! triggered the match. A companion set of corpus tools parses defect tables
//! and per-programmer debug histories and scores predictions against them.
//!
//! The pieces:
//!
//! * [`dsl`] — parser and printer for `.eps` scenario files, the notation in
//!   which error-prone scenarios are written.
//! * [`model`] — task models (subtask trees, information items, numeric
//!   relations) and knowledge profiles (rules with features and usage data).
//! * [`catalog`] — the built-in scenario catalog, the predicate registry,
//!   and catalog validation.
//! * [`engine`] — one checker per scenario plus [`engine::predict_all`],
//!   which produces a deterministic prediction report.
//! * [`corpus`] — defect tables, debug-history parsing, and corpus-level
//!   queries such as occurrence counts.
//! * [`metrics`] — occurrence rates, coverage, persistence, per-programmer
//!   confusion statistics, and saved-debugging-effort estimates.

pub mod catalog;
pub mod corpus;
pub mod dsl;
pub mod engine;
mod findings;
pub mod metrics;
pub mod model;

pub use findings::ValidationFinding;

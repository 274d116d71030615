//! Library surface of the command-line tool: the presentation file format
//! and the report builders, kept separate so tests can drive them directly.

pub mod format;
pub mod report;

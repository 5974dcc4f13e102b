//! Library half of the command-line tool: experiment runners and the
//! instance text format, exposed so the test suites can drive them directly.

pub mod experiments;
pub mod instance;

//! File formats, command implementations, the acceptance criteria and the
//! corpus runner behind the `qspace` binary.

pub mod criteria;
pub mod io;
pub mod report;
pub mod commands;
pub mod corpus;

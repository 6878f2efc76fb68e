//! File formats and helpers behind the `srspd` command.

pub mod design_file;
pub mod evaluator;
pub mod plot;

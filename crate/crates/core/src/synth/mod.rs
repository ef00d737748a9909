//! Gate-sequence search over `{H, X, Z, T, S, S†}`, R_y angle tables and
//! compilation of real decompositions into gate programs.

mod form;
mod gates;
mod program;
mod search;
mod table;

pub use form::{match_ry_form, match_ry_form_with, RyMatch, DEFAULT_ACCEPT_R, DIAGONAL_TOL, SIN_DEVIATION_BOUND};
pub use gates::{evaluate, evaluate_float, Gate, GateSequence};
pub use program::{compile, effective_matrix, FtProgram, ProgramRecord};
pub use search::{enumerate, Enumeration, GenerationStats, MatrixKey, SearchOptions};
pub use table::{
    angle_key, search, tables_from_enumeration, AngleEntry, R_TIE_TOL, AngleTable, GapStats, Policy, Sign, TableBuilder,
    TableSet, ANGLE_RESOLUTION_DEG,
};

//! Correctness oracles: a sequential dictionary, a structural validator, a
//! concurrent history recorder and a linearizability checker.

mod history;
mod linearizability;
mod oracle;
mod validate;

pub use history::{read_ndjson, record_history, write_ndjson, HistoryError, HistoryEvent, HistoryWorkload, ThreadLog, Clock};
pub use linearizability::{check_linearizable, check_well_formed};
pub use oracle::{DictOp, OracleState};
pub use validate::{validate_structure, StructureError, StructureReport};

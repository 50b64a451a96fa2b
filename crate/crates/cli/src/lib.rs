//! Spec-driven verification runs over the `phq-core` metric constructions.

pub mod emit;
pub mod orders;
pub mod report;
pub mod run;
pub mod spec;

pub use emit::{to_json, write_csv_bundle, write_json, EmitError};
pub use report::{Report, TaskRecord, Verdict};
pub use run::{run, RunOptions};
pub use spec::{load_spec, parse_spec, ModelSpec, SpecError};

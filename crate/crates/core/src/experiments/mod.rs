//! Seeded Monte Carlo sweeps and the bound recurrence.
//!
//! A sweep runs independent trials over an `(n, p)` grid and reduces them into
//! one [`SummaryCell`] per grid point, written as CSV and a JSON report. The
//! recurrence solver iterates the bound on the failure probability that drives
//! the recursive certifier and checks it against its closed-form envelope.

mod output;
mod recurrence;
mod sweep;

pub use output::{emit_csv, emit_recurrence_csv, emit_report, emit_svg, version_string, CSV_HEADER};
pub use recurrence::{solve_recurrence, BoundRow, RecurrenceOutcome, RecurrenceParams, RecurrenceStatus};
pub use sweep::{run_experiment, ExperimentKind, ExperimentSpec, SummaryCell};

//! Benchmark harness over sequences in the OTB directory layout.
//!
//! ```text
//! <dataset>/<seq>/img/0001.jpg …
//! <dataset>/<seq>/groundtruth_rect.txt
//! ```
//!
//! Results go to `<out>/<seq>/<mode>.csv`, `<out>/summary.csv` and
//! `<out>/curves/`. Timing lives in `<out>/timing.txt` so the CSV files are
//! byte-identical across runs.

mod bench;
mod metrics;
mod plot;
mod report;
mod sequence;

pub use bench::{run_benchmark, track_sequence, AggregateRecord, BenchReport, Failure, FrameRow, SequenceRun};
pub use metrics::{
    auc, cle, iou, overlap_threshold, precision_at, precision_curve, success_curve, EvalRecord,
    PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS,
};
pub use plot::svg_line_plot;
pub use report::{format_table, write_report, write_run_csv, FRAME_CSV_HEADER};
pub use sequence::{discover_sequences, load_sequence, parse_ground_truth, Sequence, GROUND_TRUTH_FILE};

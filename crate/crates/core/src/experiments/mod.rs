//! Monte-Carlo harness: signal generation, trial batches, aggregation and plot data.
//!
//! Signals are measured directly as coefficient vectors, `y = A x + w`, with `x`
//! holding the tone coefficients on the DFT grid.

pub mod batch;
pub mod config;
pub mod plot;
pub mod signal;
pub mod trial;

pub use batch::{run_batch, wilson_interval, Cell, CellKey, CellSummary, TrialBatchReport};
pub use config::{ExperimentConfig, MatrixSource};
pub use plot::{emit_plotdata, figure_curves, read_curve, Curve, CurvePoint, FigureId, Metric};
pub use signal::{gen_group_signal, gen_noise, gen_signal, gen_tone_signal, AmplitudeLaw, SignalModel};
pub use trial::{baseline_full_support, run_trial, Detector, Experiment, FullSupportOutcome, TrialData, TrialOutcome};

mod analyze;
mod predict;
mod simulate;

pub use analyze::{
    analyze, AnalyzeReport, AnalyzeRequest, FILE_CCDF, FILE_EVENTS, FILE_FIT, FILE_RETURNS_PDF, MIN_EVENTS,
    MIN_LEVELS, PREDICTED_BAND,
};
pub use predict::{predict, PredictReport, Regime, CRITICAL_BAND};
pub use simulate::{
    fit_avalanche_sizes, simulate, RunSummary, SimulateRequest, SimulateSummary, AVALANCHE_FIT,
    FILE_AVALANCHES, FILE_AVALANCHE_CCDF, FILE_DEGREE_CCDF, FILE_EDGES, FILE_INDEX, FILE_MANIFEST,
    FILE_SUMMARY,
};

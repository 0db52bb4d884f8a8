//! Instruction records and the two-stage weighted task sampler.

mod plan;
mod records;

use thiserror::Error;

pub use plan::{
    build_plan, exact_sum, sample_stream, stage_table, PlanEntry, SamplingPlan, STAGE1_RATIOS,
    STAGE2_RATIOS,
};
pub use records::{
    direction_of, load_records, parse_records, validate_payload, write_records, Direction,
    InstructionRecord, PayloadKind, TASK_DIRECTIONS,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {record}: {message}")]
    Validation { record: usize, message: String },
    #[error("all sampling ratios are zero")]
    AllZero,
    #[error("ratio for {task_id} must be finite and non-negative, got {ratio}")]
    InvalidRatio { task_id: String, ratio: f64 },
    #[error("no built-in table for stage {0}")]
    UnknownStage(u8),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

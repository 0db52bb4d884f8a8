//! Evaluation metrics for text, molecules and proteins, and aggregation of
//! externally computed scores.

mod molecule;
mod protein;
mod report;
mod scores;
mod tasks;
mod text;

use thiserror::Error;

pub use molecule::{
    exact_match, molecule_validity, parse_molecule, smiles_text, tanimoto, valid_molecule,
    MolFormat,
};
pub use protein::{
    blosum_substitution, identity, sequence_identity, sw_alignment, sw_alignment_with, sw_score,
    SubstitutionMatrix, SwScoring,
};
pub use report::{Aggregate, MetricReport, PairRecord};
pub use scores::{
    drug_assessment, enzyme_assessment, joint_assessment, DrugRow, EnzymeRow, JointRow, DRUG_TOP_K,
    JOINT_ALIGNMENT_THRESHOLD, JOINT_TOP_N, QED_THRESHOLD, SA_THRESHOLD, VINA_THRESHOLD,
};
pub use tasks::{
    CaptionEvaluator, DrugEvaluator, EnzymeEvaluator, EvaluatorRegistry, JointEvaluator,
    MolGenEvaluator, ProtGenEvaluator, ProtQaEvaluator, TaskEvaluator, TaskInput, MORGAN_BITS,
    MORGAN_RADIUS,
};
pub use text::{
    corpus_bleu, levenshtein, meteor_exact, nlg_metrics, pair_scores, rouge_l, rouge_n, tokenize,
    NlgScores, PairScores, BLEU_EPSILON,
};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("{references} references but {hypotheses} hypotheses")]
    LengthMismatch {
        references: usize,
        hypotheses: usize,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("substitution matrix line {line}: {message}")]
    Matrix { line: usize, message: String },
    #[error("score row {row} lacks numeric field {field}")]
    MissingField { row: usize, field: String },
    #[error("unknown task {0}")]
    UnknownTask(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

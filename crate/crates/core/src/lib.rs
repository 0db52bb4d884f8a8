pub mod fusion;
pub mod metrics;
pub mod molgraph;
pub mod motif;
pub mod pipeline;
pub mod protseq;
pub mod vocab;

//! `biomol` command-line tool.

mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "biomol", version, about = "Biomolecule strings, motifs, fusion features and evaluation metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntityKind {
    Molecule,
    Protein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MolInput {
    Selfies,
    Smiles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValidateFormat {
    Selfies,
    Smiles,
    Fasta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Caption,
    Molgen,
    Protqa,
    Protgen,
    Drug,
    Enzyme,
    Joint,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Caption => "caption",
            Task::Molgen => "molgen",
            Task::Protqa => "protqa",
            Task::Protgen => "protgen",
            Task::Drug => "drug",
            Task::Enzyme => "enzyme",
            Task::Joint => "joint",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Map a SELFIES string or protein sequence to vocabulary ids.
    Tokenize {
        #[arg(value_enum)]
        kind: EntityKind,
        text: String,
        /// Molecule notation; SMILES input is converted to SELFIES first.
        #[arg(long, value_enum, default_value = "selfies")]
        format: MolInput,
        /// Vocabulary file, one token per line; defaults to the built-in one.
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Print the model input layout as JSON Lines instead of ids.
        #[arg(long)]
        layout: bool,
        /// Learnable query count for the feature slot in --layout output.
        #[arg(long, default_value_t = 8)]
        n_q: usize,
    },
    /// Map vocabulary ids back to a string.
    Detokenize {
        #[arg(required = true)]
        ids: Vec<u32>,
        #[arg(long)]
        vocab: Option<PathBuf>,
    },
    /// Check every entry of a file; exits 1 if any entry is invalid.
    Validate {
        #[arg(long, value_enum)]
        format: ValidateFormat,
        path: PathBuf,
    },
    /// Print the canonical SMILES of a molecule.
    Canon {
        smiles: String,
        #[arg(long, value_enum, default_value = "smiles")]
        format: MolInput,
    },
    /// Print a circular fingerprint as hex.
    Fingerprint {
        molecule: String,
        #[arg(long, value_enum, default_value = "smiles")]
        format: MolInput,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 1024)]
        n_bits: usize,
        /// Element-based invariants instead of pharmacophore classes.
        #[arg(long)]
        ecfp: bool,
    },
    /// Print the motif indicator bits of each FASTA record.
    Motif {
        fasta: PathBuf,
        /// Motif list; defaults to $IBM_DATA_DIR/motifs.txt, then the bundled list.
        #[arg(long)]
        dict: Option<PathBuf>,
    },
    /// Compute fused features Z for one entity and write them as an IBMT archive.
    Fuse(FuseArgs),
    /// Write seeded fusion weights as an IBMT archive.
    InitWeights(InitArgs),
    /// Evaluate hypotheses against references, or aggregate a score table.
    Metrics(MetricsArgs),
    /// Print the sampling plan of a training stage as JSON.
    Plan {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        stage: u8,
        /// Seed recorded in the plan file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Draw task ids from a sampling plan, one per line.
    Sample {
        /// Plan JSON produced by `plan`.
        #[arg(long, conflicts_with = "stage", required_unless_present = "stage")]
        plan: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        stage: Option<u8>,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        n: usize,
    },
}

#[derive(Args)]
pub struct FuseArgs {
    /// Weights archive from `init-weights`.
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, conflicts_with_all = ["protein"], required_unless_present = "protein")]
    pub molecule: Option<String>,
    #[arg(long, value_enum, default_value = "smiles")]
    pub format: MolInput,
    /// Atom coordinates, three numbers per line in atom order.
    #[arg(long, requires = "molecule")]
    pub coords: Option<PathBuf>,
    #[arg(long, requires = "backbone")]
    pub protein: Option<String>,
    /// Backbone coordinates, twelve numbers (N, C, CA, O) per residue line.
    #[arg(long)]
    pub backbone: Option<PathBuf>,
    #[arg(long)]
    pub dict: Option<PathBuf>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct InitArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub d: usize,
    #[arg(long, default_value_t = 4)]
    pub heads: usize,
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    #[arg(long, default_value_t = 64)]
    pub ff: usize,
    #[arg(long, default_value_t = 8)]
    pub n_q: usize,
    /// Fingerprint width, the row count of M_m.
    #[arg(long, default_value_t = 1024)]
    pub n_bits: usize,
    /// Motif list whose length sets the row count of M_p.
    #[arg(long)]
    pub dict: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct MetricsArgs {
    #[arg(value_enum)]
    pub task: Task,
    /// References: one entry per line, or FASTA for protein tasks.
    pub references: Option<PathBuf>,
    /// Hypotheses aligned with the references by position.
    pub hypotheses: Option<PathBuf>,
    /// Score table (JSON Lines or CSV) for drug, enzyme and joint.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "smiles")]
    pub format: MolInput,
    /// Substitution matrix in NCBI format; defaults to $IBM_DATA_DIR/blosum45.txt, then the bundled BLOSUM45.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Print aggregates as CSV instead of the JSON report.
    #[arg(long)]
    pub csv: bool,
    /// Also write per-pair records as CSV to this path.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

/// An error in how the tool was invoked rather than in the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

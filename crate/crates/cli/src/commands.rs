use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use serde_json::json;

use biomol_core::fusion::{fuse_molecule, fuse_protein, FusionConfig, FusionWeights, TensorArchive};
use biomol_core::metrics::{EvaluatorRegistry, MolFormat, ProtGenEvaluator, TaskInput};
use biomol_core::molgraph::{
    canonical_form, check_valence, decode_selfies, encode_selfies, parse_selfies, parse_smiles, MolecularGraph,
    SelfiesString,
};
use biomol_core::motif::{ecfp, fcfp, protein_motif_vector};
use biomol_core::pipeline::{build_plan, sample_stream, stage_table, SamplingPlan};
use biomol_core::protseq::{parse_fasta, ProteinSequence, ProteinStructure};
use biomol_core::vocab::{detokenize, form_input, tokenize_molecule, tokenize_protein, Entity, Vocabulary};

use crate::inputs;
use crate::{Command, EntityKind, FuseArgs, InitArgs, MetricsArgs, MolInput, Task, UsageError, ValidateFormat};

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Tokenize {
            kind,
            text,
            format,
            vocab,
            layout,
            n_q,
        } => tokenize(kind, &text, format, vocab.as_deref(), layout, n_q),
        Command::Detokenize { ids, vocab } => {
            let v = vocabulary(vocab.as_deref())?;
            println!("{}", detokenize(&v, &ids)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { format, path } => validate(format, &path),
        Command::Canon { smiles, format } => {
            println!("{}", canonical_form(&molecule(&smiles, format)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Fingerprint {
            molecule: text,
            format,
            radius,
            n_bits,
            ecfp: element_based,
        } => {
            let g = molecule(&text, format)?;
            let bits = if element_based {
                ecfp(&g, radius, n_bits)?
            } else {
                fcfp(&g, radius, n_bits)?
            };
            println!("{}", bits.to_hex());
            Ok(ExitCode::SUCCESS)
        }
        Command::Motif { fasta, dict } => {
            let dict = inputs::motif_dictionary(dict.as_deref())?;
            for rec in parse_fasta(&inputs::read(&fasta)?)? {
                println!("{}\t{}", rec.header, protein_motif_vector(&rec.sequence, &dict));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuse(args) => fuse(&args),
        Command::InitWeights(args) => init_weights(&args),
        Command::Metrics(args) => metrics(&args),
        Command::Plan { stage, seed } => {
            let mut plan = build_plan(stage, &stage_table(stage)?)?;
            plan.seed = seed;
            println!("{}", plan.to_json()?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample { plan, stage, seed, n } => {
            let plan = match (plan, stage) {
                (Some(path), _) => SamplingPlan::from_json(&inputs::read(&path)?)?,
                (None, Some(stage)) => build_plan(stage, &stage_table(stage)?)?,
                (None, None) => return Err(UsageError("one of --plan or --stage is required".into()).into()),
            };
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for task in sample_stream(&plan, seed, n) {
                writeln!(out, "{task}")?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn vocabulary(path: Option<&std::path::Path>) -> Result<Vocabulary> {
    Ok(match path {
        Some(p) => Vocabulary::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => Vocabulary::standard(),
    })
}

fn molecule(text: &str, format: MolInput) -> Result<MolecularGraph> {
    Ok(match format {
        MolInput::Smiles => parse_smiles(text.trim())?,
        MolInput::Selfies => decode_selfies(&parse_selfies(text.trim())?)?,
    })
}

fn selfies(text: &str, format: MolInput) -> Result<SelfiesString> {
    Ok(match format {
        MolInput::Selfies => parse_selfies(text.trim())?,
        MolInput::Smiles => encode_selfies(&parse_smiles(text.trim())?)?,
    })
}

fn tokenize(kind: EntityKind, text: &str, format: MolInput, vocab: Option<&std::path::Path>, layout: bool, n_q: usize) -> Result<ExitCode> {
    let v = vocabulary(vocab)?;
    let (ids, formed) = match kind {
        EntityKind::Molecule => {
            let s = selfies(text, format)?;
            let formed = layout.then(|| form_input(Entity::Molecule(&s), true, n_q)).transpose()?;
            (tokenize_molecule(&v, &s)?, formed)
        }
        EntityKind::Protein => {
            let p = ProteinSequence::new(text.trim().to_ascii_uppercase())?;
            let formed = layout.then(|| form_input(Entity::Protein(&p), true, n_q)).transpose()?;
            (tokenize_protein(&v, &p)?, formed)
        }
    };
    match formed {
        Some(f) => print!("{}", f.to_jsonl()),
        None => println!("{}", ids.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")),
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(format: ValidateFormat, path: &std::path::Path) -> Result<ExitCode> {
    let text = inputs::read(path)?;
    let mut invalid = Vec::new();
    let mut total = 0usize;
    match format {
        ValidateFormat::Fasta => match parse_fasta(&text) {
            Ok(records) => total = records.len(),
            Err(e) => {
                total = text.lines().filter(|l| l.starts_with('>')).count().max(1);
                invalid.push(json!({ "error": e.to_string() }));
            }
        },
        ValidateFormat::Smiles | ValidateFormat::Selfies => {
            let fmt = if format == ValidateFormat::Smiles { MolInput::Smiles } else { MolInput::Selfies };
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                total += 1;
                let problem = match molecule(line, fmt) {
                    Err(e) => Some(e.to_string()),
                    Ok(g) if g.is_empty() => Some("empty molecule".to_string()),
                    Ok(g) => {
                        let report = check_valence(&g);
                        (!report.is_valid()).then(|| format!("{} valence violation(s)", report.violations.len()))
                    }
                };
                if let Some(error) = problem {
                    invalid.push(json!({ "line": i + 1, "error": error }));
                }
            }
        }
    }
    let valid = total.saturating_sub(invalid.len());
    let validity = if total == 0 { 100.0 } else { 100.0 * valid as f64 / total as f64 };
    let report = json!({ "total": total, "valid": valid, "validity": validity, "invalid": invalid });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if invalid.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn fuse(args: &FuseArgs) -> Result<ExitCode> {
    let archive = TensorArchive::load(&args.weights).with_context(|| format!("reading {}", args.weights.display()))?;
    let w = FusionWeights::from_archive(&archive)?;
    let z = if let Some(text) = &args.molecule {
        let mut g = molecule(text, args.format)?;
        let coords = args
            .coords
            .as_ref()
            .ok_or_else(|| UsageError("--coords is required for molecules".into()))?;
        g.set_coordinates(inputs::coordinates(coords)?)?;
        fuse_molecule(&g, &w)?
    } else {
        let seq = args.protein.as_ref().ok_or_else(|| UsageError("--molecule or --protein is required".into()))?;
        let backbone = args.backbone.as_ref().ok_or_else(|| UsageError("--backbone is required for proteins".into()))?;
        let p = ProteinSequence::new(seq.trim().to_ascii_uppercase())?;
        let s = ProteinStructure::parse(p, &inputs::read(backbone)?)?;
        let dict = inputs::motif_dictionary(args.dict.as_deref())?;
        fuse_protein(&s, &dict, &w)?
    };
    let mut out = TensorArchive::new();
    out.insert_matrix("Z", &z.z);
    match &args.out {
        Some(p) => out.save(p)?,
        None => print!("{}", out.to_text()),
    }
    Ok(ExitCode::SUCCESS)
}

fn init_weights(args: &InitArgs) -> Result<ExitCode> {
    let dict = inputs::motif_dictionary(args.dict.as_deref())?;
    let config = FusionConfig {
        d: args.d,
        n_heads: args.heads,
        n_layers: args.layers,
        ff_dim: args.ff,
        n_queries: args.n_q,
        n_mol_motifs: args.n_bits,
        n_prot_motifs: dict.len(),
    };
    let w = FusionWeights::seeded(&config, args.seed).map_err(|e| UsageError(e.to_string()))?;
    w.to_archive().save(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn metrics(args: &MetricsArgs) -> Result<ExitCode> {
    let mut registry = EvaluatorRegistry::standard();
    let mut input = TaskInput {
        mol_format: match args.format {
            MolInput::Smiles => MolFormat::Smiles,
            MolInput::Selfies => MolFormat::Selfies,
        },
        workers: args.workers,
        ..Default::default()
    };
    let pair = || -> Result<(&std::path::Path, &std::path::Path)> {
        match (&args.references, &args.hypotheses) {
            (Some(r), Some(h)) => Ok((r, h)),
            _ => Err(UsageError(format!("metrics {} needs a reference file and a hypothesis file", args.task.name())).into()),
        }
    };
    match args.task {
        Task::Caption | Task::Protqa | Task::Molgen => {
            let (r, h) = pair()?;
            input.references = inputs::lines(r)?;
            input.hypotheses = inputs::lines(h)?;
        }
        Task::Protgen => {
            let (r, h) = pair()?;
            input.references = inputs::sequences(r)?;
            input.hypotheses = inputs::sequences(h)?;
            registry.register(Box::new(ProtGenEvaluator {
                matrix: inputs::substitution_matrix(args.matrix.as_deref())?,
            }));
        }
        Task::Drug | Task::Enzyme | Task::Joint => {
            let path = args
                .scores
                .as_ref()
                .ok_or_else(|| UsageError(format!("metrics {} needs --scores", args.task.name())))?;
            input.scores = inputs::score_rows(path)?;
        }
    }
    let report = registry.evaluate(args.task.name(), &input)?;
    if let Some(path) = &args.records {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_records_csv(file)?;
    }
    if args.csv {
        report.write_aggregates_csv(std::io::stdout().lock())?;
    } else {
        println!("{}", report.to_json()?);
    }
    if !report.is_finite() {
        return Err(anyhow!("report contains non-finite values"));
    }
    Ok(ExitCode::SUCCESS)
}

//! Task evaluators selectable by name.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::Value;

use super::molecule::{exact_match, smiles_text, tanimoto, valid_molecule, MolFormat};
use super::protein::{blosum_substitution, identity, sw_alignment, SubstitutionMatrix};
use super::report::MetricReport;
use super::scores::{
    drug_assessment, enzyme_assessment, joint_assessment, number, DrugRow, EnzymeRow, JointRow,
};
use super::text::{check_lengths, corpus_bleu, levenshtein, nlg_metrics, pair_scores};
use super::MetricError;
use crate::motif::ecfp;
use crate::protseq::ProteinSequence;

/// Radius and width of the Morgan fingerprint used for FTS.
pub const MORGAN_RADIUS: usize = 2;
pub const MORGAN_BITS: usize = 2048;

/// Everything an evaluator may consume. Text tasks read `references` and
/// `hypotheses`; score tasks read `scores`.
#[derive(Debug, Clone, Default)]
pub struct TaskInput {
    pub references: Vec<String>,
    pub hypotheses: Vec<String>,
    pub scores: Vec<Value>,
    pub mol_format: MolFormat,
    /// Worker threads for per-pair work; 0 picks the rayon default.
    pub workers: usize,
}

pub trait TaskEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError>;
}

/// Maps `f` over `0..n` on a pool of `workers` threads; results keep index order.
fn par_map<T: Send>(
    workers: usize,
    n: usize,
    f: impl Fn(usize) -> T + Send + Sync,
) -> Result<Vec<T>, MetricError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| MetricError::Pool(e.to_string()))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
}

fn text_report(task: &str, input: &TaskInput) -> Result<MetricReport, MetricError> {
    let (refs, hyps) = (&input.references, &input.hypotheses);
    let scores = nlg_metrics(refs, hyps)?;
    let pairs = par_map(input.workers, refs.len(), |i| {
        pair_scores(&refs[i], &hyps[i])
    })?;
    let mut report = MetricReport::new(task);
    for (i, p) in pairs.iter().enumerate() {
        let id = i.to_string();
        report.push_pair(&id, &id, "rouge1", 100.0 * p.rouge1);
        report.push_pair(&id, &id, "rouge2", 100.0 * p.rouge2);
        report.push_pair(&id, &id, "rougeL", 100.0 * p.rouge_l);
        report.push_pair(&id, &id, "meteor_exact", 100.0 * p.meteor);
    }
    report.set("bleu2", scores.bleu2);
    report.set("bleu4", scores.bleu4);
    report.set("rouge1", scores.rouge1);
    report.set("rouge2", scores.rouge2);
    report.set("rougeL", scores.rouge_l);
    report.set("meteor_exact", scores.meteor);
    Ok(report)
}

pub struct CaptionEvaluator;

impl TaskEvaluator for CaptionEvaluator {
    fn name(&self) -> &'static str {
        "caption"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        text_report(self.name(), input)
    }
}

pub struct ProtQaEvaluator;

impl TaskEvaluator for ProtQaEvaluator {
    fn name(&self) -> &'static str {
        "protqa"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        text_report(self.name(), input)
    }
}

/// Description-based molecule generation: character BLEU, exact match,
/// Levenshtein, Morgan FTS and validity.
pub struct MolGenEvaluator;

struct MolPair {
    smiles: (String, String),
    valid: bool,
    exact: Option<bool>,
    morgan: Option<f64>,
}

impl TaskEvaluator for MolGenEvaluator {
    fn name(&self) -> &'static str {
        "molgen"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        let (refs, hyps) = (&input.references, &input.hypotheses);
        check_lengths(refs.len(), hyps.len())?;
        let fmt = input.mol_format;
        let pairs = par_map(input.workers, refs.len(), |i| {
            let r = valid_molecule(&refs[i], fmt);
            let h = valid_molecule(&hyps[i], fmt);
            let smiles = (
                smiles_text(&refs[i], fmt).unwrap_or_default(),
                smiles_text(&hyps[i], fmt).unwrap_or_default(),
            );
            let (exact, morgan) = match (&r, &h) {
                (Some(r), Some(h)) => {
                    let fr = ecfp(r, MORGAN_RADIUS, MORGAN_BITS).ok();
                    let fh = ecfp(h, MORGAN_RADIUS, MORGAN_BITS).ok();
                    let fts = fr.zip(fh).and_then(|(a, b)| tanimoto(&a, &b).ok());
                    (Some(exact_match(r, h)), fts)
                }
                _ => (None, None),
            };
            MolPair {
                smiles,
                valid: h.is_some(),
                exact,
                morgan,
            }
        })?;
        let mut report = MetricReport::new(self.name());
        let chars = |s: &str| s.chars().map(String::from).collect::<Vec<_>>();
        let ref_chars: Vec<Vec<String>> = pairs.iter().map(|p| chars(&p.smiles.0)).collect();
        let hyp_chars: Vec<Vec<String>> = pairs.iter().map(|p| chars(&p.smiles.1)).collect();
        report.set("bleu", 100.0 * corpus_bleu(&ref_chars, &hyp_chars, 4));
        let mut lev = Vec::new();
        let mut exact = Vec::new();
        let mut morgan = Vec::new();
        for (i, p) in pairs.iter().enumerate() {
            let id = i.to_string();
            let d = levenshtein(&p.smiles.0, &p.smiles.1) as f64;
            lev.push(d);
            report.push_pair(&id, &id, "levenshtein", d);
            report.push_pair(&id, &id, "validity", if p.valid { 100.0 } else { 0.0 });
            if let Some(e) = p.exact {
                exact.push(if e { 1.0 } else { 0.0 });
                report.push_pair(&id, &id, "exact", if e { 1.0 } else { 0.0 });
            }
            if let Some(m) = p.morgan {
                morgan.push(m);
                report.push_pair(&id, &id, "morgan_fts", m);
            }
        }
        let n = pairs.len() as f64;
        // Unparsable hypotheses count as misses for exact match.
        report.set("exact", exact.iter().sum::<f64>() / n);
        report.set_with_std("levenshtein", &lev);
        report.set_with_std("morgan_fts", &morgan);
        report.set(
            "validity",
            100.0 * pairs.iter().filter(|p| p.valid).count() as f64 / n,
        );
        Ok(report)
    }
}

/// Protein generation: Identity, Alignment, BLOSUM Substitution over valid
/// hypotheses, plus validity.
pub struct ProtGenEvaluator {
    pub matrix: SubstitutionMatrix,
}

impl Default for ProtGenEvaluator {
    fn default() -> Self {
        ProtGenEvaluator {
            matrix: SubstitutionMatrix::blosum45(),
        }
    }
}

impl TaskEvaluator for ProtGenEvaluator {
    fn name(&self) -> &'static str {
        "protgen"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        let (refs, hyps) = (&input.references, &input.hypotheses);
        check_lengths(refs.len(), hyps.len())?;
        let pairs = par_map(input.workers, refs.len(), |i| {
            let r = ProteinSequence::new(refs[i].trim()).ok()?;
            let h = ProteinSequence::new(hyps[i].trim()).ok()?;
            Some([
                identity(&r, &h),
                sw_alignment(&r, &h),
                blosum_substitution(&r, &h, &self.matrix),
            ])
        })?;
        let mut report = MetricReport::new(self.name());
        let mut cols: [Vec<f64>; 3] = Default::default();
        for (i, p) in pairs.iter().enumerate() {
            let id = i.to_string();
            report.push_pair(&id, &id, "validity", if p.is_some() { 100.0 } else { 0.0 });
            if let Some(vals) = p {
                for (k, (name, v)) in ["identity", "alignment", "blosum"]
                    .iter()
                    .zip(vals)
                    .enumerate()
                {
                    report.push_pair(&id, &id, name, *v);
                    cols[k].push(*v);
                }
            }
        }
        report.set_with_std("identity", &cols[0]);
        report.set_with_std("alignment", &cols[1]);
        report.set_with_std("blosum", &cols[2]);
        report.set(
            "validity",
            100.0 * cols[0].len() as f64 / pairs.len() as f64,
        );
        Ok(report)
    }
}

pub struct DrugEvaluator;

impl TaskEvaluator for DrugEvaluator {
    fn name(&self) -> &'static str {
        "drug"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        let rows = input
            .scores
            .iter()
            .enumerate()
            .map(|(i, v)| DrugRow::from_json(v, i))
            .collect::<Result<Vec<_>, _>>()?;
        drug_assessment(&rows)
    }
}

pub struct JointEvaluator;

impl TaskEvaluator for JointEvaluator {
    fn name(&self) -> &'static str {
        "joint"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        let rows = input
            .scores
            .iter()
            .enumerate()
            .map(|(i, v)| JointRow::from_json(v, i))
            .collect::<Result<Vec<_>, _>>()?;
        joint_assessment(&rows)
    }
}

/// Enzyme design. Identity and Alignment are taken from the score row when
/// present, otherwise computed from its `reference` and `hypothesis`
/// sequences. Rows whose hypothesis is not a valid protein count against
/// validity and are left out of the top-1 means.
pub struct EnzymeEvaluator;

impl TaskEvaluator for EnzymeEvaluator {
    fn name(&self) -> &'static str {
        "enzyme"
    }

    fn evaluate(&self, input: &TaskInput) -> Result<MetricReport, MetricError> {
        let mut rows = Vec::new();
        let mut valid = 0usize;
        for (i, v) in input.scores.iter().enumerate() {
            let target_id = match v.get("target_id") {
                Some(Value::String(s)) => s.clone(),
                Some(other) => other.to_string(),
                None => {
                    return Err(MetricError::MissingField {
                        row: i,
                        field: "target_id".into(),
                    })
                }
            };
            let seq = |field: &str| {
                v.get(field)
                    .and_then(Value::as_str)
                    .map(|s| ProteinSequence::new(s.trim()))
            };
            let hyp = seq("hypothesis");
            if matches!(hyp, Some(Err(_))) {
                continue;
            }
            valid += 1;
            let pair = match (seq("reference"), hyp) {
                (Some(Ok(r)), Some(Ok(h))) => Some((identity(&r, &h), sw_alignment(&r, &h))),
                _ => None,
            };
            let field_or = |name: &str, computed: Option<f64>| match (
                v.get(name).and_then(Value::as_f64),
                computed,
            ) {
                (Some(x), _) | (None, Some(x)) => Ok(x),
                (None, None) => number(v, i, name),
            };
            rows.push(EnzymeRow {
                target_id,
                identity: field_or("identity", pair.map(|p| p.0))?,
                alignment: field_or("alignment", pair.map(|p| p.1))?,
                vina: number(v, i, "vina")?,
                esp: number(v, i, "esp")?,
            });
        }
        let total = input.scores.len();
        let mut report = enzyme_assessment(&rows)?;
        report.set("validity", 100.0 * valid as f64 / total as f64);
        Ok(report)
    }
}

/// Evaluators keyed by task name.
pub struct EvaluatorRegistry {
    evaluators: BTreeMap<&'static str, Box<dyn TaskEvaluator>>,
}

impl EvaluatorRegistry {
    pub fn empty() -> Self {
        EvaluatorRegistry {
            evaluators: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(CaptionEvaluator));
        r.register(Box::new(MolGenEvaluator));
        r.register(Box::new(ProtQaEvaluator));
        r.register(Box::new(ProtGenEvaluator::default()));
        r.register(Box::new(DrugEvaluator));
        r.register(Box::new(EnzymeEvaluator));
        r.register(Box::new(JointEvaluator));
        r
    }

    /// Adds or replaces the evaluator under its own name.
    pub fn register(&mut self, evaluator: Box<dyn TaskEvaluator>) {
        self.evaluators.insert(evaluator.name(), evaluator);
    }

    pub fn get(&self, name: &str) -> Option<&dyn TaskEvaluator> {
        self.evaluators.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.evaluators.keys().copied().collect()
    }

    pub fn evaluate(&self, task: &str, input: &TaskInput) -> Result<MetricReport, MetricError> {
        self.get(task)
            .ok_or_else(|| MetricError::UnknownTask(task.to_string()))?
            .evaluate(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(refs: &[&str], hyps: &[&str]) -> TaskInput {
        TaskInput {
            references: refs.iter().map(|s| s.to_string()).collect(),
            hypotheses: hyps.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn registry_lists_all_tasks() {
        let r = EvaluatorRegistry::standard();
        assert_eq!(
            r.names(),
            ["caption", "drug", "enzyme", "joint", "molgen", "protgen", "protqa"]
        );
        assert!(matches!(
            r.evaluate("nope", &TaskInput::default()),
            Err(MetricError::UnknownTask(_))
        ));
    }

    #[test]
    fn protgen_self_metrics() {
        let r = EvaluatorRegistry::standard();
        let inp = input(&["MKVLA", "ACDE"], &["MKVLA", "ACDE"]);
        let rep = r.evaluate("protgen", &inp).unwrap();
        assert_eq!(rep.value("identity"), Some(100.0));
        assert_eq!(rep.value("alignment"), Some(100.0));
        assert_eq!(rep.value("validity"), Some(100.0));
        let rep = r
            .evaluate("protgen", &input(&["MKVLA", "ACDE"], &["MKVLA", "AC1E"]))
            .unwrap();
        assert_eq!(rep.value("validity"), Some(50.0));
        assert_eq!(rep.aggregates["identity"].n, Some(1));
    }

    #[test]
    fn molgen_scores() {
        let r = EvaluatorRegistry::standard();
        let rep = r
            .evaluate("molgen", &input(&["CCO", "c1ccccc1"], &["OCC", "C("]))
            .unwrap();
        assert_eq!(rep.value("exact"), Some(0.5));
        assert_eq!(rep.value("validity"), Some(50.0));
        assert_eq!(rep.value("morgan_fts"), Some(1.0));
        assert!(rep.is_finite());
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let refs: Vec<String> = (0..40)
            .map(|i| format!("the cat number {i} sat on the mat"))
            .collect();
        let hyps: Vec<String> = (0..40)
            .map(|i| format!("a cat number {} sat on a mat", i * 7 % 13))
            .collect();
        let reg = EvaluatorRegistry::standard();
        let one = TaskInput {
            references: refs.clone(),
            hypotheses: hyps.clone(),
            workers: 1,
            ..Default::default()
        };
        let four = TaskInput {
            workers: 4,
            ..one.clone()
        };
        assert_eq!(
            reg.evaluate("caption", &one).unwrap(),
            reg.evaluate("caption", &four).unwrap()
        );
    }

    #[test]
    fn enzyme_computes_missing_identity() {
        let rows: Vec<Value> = vec![
            serde_json::json!({"target_id": "e1", "reference": "MKV", "hypothesis": "MKV", "vina": -7.0, "esp": 80.0}),
            serde_json::json!({"target_id": "e1", "reference": "MKV", "hypothesis": "M1V", "vina": -9.0, "esp": 90.0}),
        ];
        let inp = TaskInput {
            scores: rows,
            ..Default::default()
        };
        let rep = EvaluatorRegistry::standard()
            .evaluate("enzyme", &inp)
            .unwrap();
        assert_eq!(rep.value("identity_top1"), Some(100.0));
        assert_eq!(rep.value("vina_top1"), Some(-7.0));
        assert_eq!(rep.value("validity"), Some(50.0));
    }
}

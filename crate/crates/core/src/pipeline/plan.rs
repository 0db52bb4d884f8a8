use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;

/// Stage-1 sampling ratios per sub-dataset, as printed (raw sum 0.902).
pub const STAGE1_RATIOS: [(&str, f64); 16] = [
    ("PubChem-caption", 0.1),
    ("PubChem-generation", 0.1),
    ("ChEBI-caption", 0.001),
    ("ChEBI-generation", 0.001),
    ("TrEMBL_Name", 0.05),
    ("TrEMBL_Family", 0.05),
    ("TrEMBL_Location", 0.05),
    ("TrEMBL_Function", 0.05),
    ("TrEMBL_Description", 0.1),
    ("SwissProt_Name", 0.05),
    ("SwissProt_Family", 0.05),
    ("SwissProt_Location", 0.05),
    ("SwissProt_Function", 0.05),
    ("SwissProt_Description", 0.1),
    ("BindingDB", 0.05),
    ("Rhea", 0.05),
];

/// Stage-2 sampling ratios; sub-datasets without a stage-2 ratio are absent.
pub const STAGE2_RATIOS: [(&str, f64); 9] = [
    ("ChEBI-caption", 0.1),
    ("ChEBI-generation", 0.1),
    ("SwissProt_Name", 0.1),
    ("SwissProt_Family", 0.1),
    ("SwissProt_Location", 0.1),
    ("SwissProt_Function", 0.1),
    ("SwissProt_Description", 0.2),
    ("BindingDB", 0.1),
    ("Rhea", 0.1),
];

pub fn stage_table(stage: u8) -> Result<Vec<(String, f64)>, PipelineError> {
    let table: &[(&str, f64)] = match stage {
        1 => &STAGE1_RATIOS,
        2 => &STAGE2_RATIOS,
        other => return Err(PipelineError::UnknownStage(other)),
    };
    Ok(table.iter().map(|&(t, r)| (t.to_string(), r)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub task_id: String,
    pub raw_ratio: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub stage: u8,
    pub entries: Vec<PlanEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SamplingPlan {
    pub fn raw_sum(&self) -> f64 {
        exact_sum(&self.entries.iter().map(|e| e.raw_ratio).collect::<Vec<_>>())
    }

    pub fn weight(&self, task_id: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.task_id == task_id)
            .map(|e| e.weight)
    }

    pub fn to_json(&self) -> Result<String, PipelineError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let plan: SamplingPlan = serde_json::from_str(text)?;
        // Re-derive weights so a hand-edited plan stays consistent.
        let table: Vec<(String, f64)> = plan
            .entries
            .iter()
            .map(|e| (e.task_id.clone(), e.raw_ratio))
            .collect();
        Ok(SamplingPlan {
            seed: plan.seed,
            ..build_plan(plan.stage, &table)?
        })
    }
}

/// Correctly rounded sum of `values` (Shewchuk's exact partials), so the
/// normalizer does not depend on summation order.
pub fn exact_sum(values: &[f64]) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for &v in values {
        let mut x = v;
        let mut kept = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    let Some(mut n) = partials.len().checked_sub(1) else {
        return 0.0;
    };
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        n -= 1;
        let x = hi;
        let y = partials[n];
        hi = x + y;
        lo = y - (hi - x);
        if lo != 0.0 {
            break;
        }
    }
    // Round half to even across the remaining partials.
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        if y == x - hi {
            hi = x;
        }
    }
    hi
}

/// weight_i = ratio_i / Σ ratios.
pub fn build_plan(stage: u8, table: &[(String, f64)]) -> Result<SamplingPlan, PipelineError> {
    for (task_id, ratio) in table {
        if !ratio.is_finite() || *ratio < 0.0 {
            return Err(PipelineError::InvalidRatio {
                task_id: task_id.clone(),
                ratio: *ratio,
            });
        }
    }
    let total = exact_sum(&table.iter().map(|(_, r)| *r).collect::<Vec<_>>());
    if total <= 0.0 {
        return Err(PipelineError::AllZero);
    }
    let entries = table
        .iter()
        .map(|(task_id, ratio)| PlanEntry {
            task_id: task_id.clone(),
            raw_ratio: *ratio,
            weight: ratio / total,
        })
        .collect();
    Ok(SamplingPlan {
        stage,
        entries,
        seed: None,
    })
}

/// `n` independent categorical draws over the plan weights. The stream is
/// ChaCha20 seeded through `seed_from_u64(seed)`, fed to `WeightedIndex`.
pub fn sample_stream(plan: &SamplingPlan, seed: u64, n: usize) -> Vec<&str> {
    if n == 0 {
        return Vec::new();
    }
    let dist =
        WeightedIndex::new(plan.entries.iter().map(|e| e.weight)).expect("plan weights are valid");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| plan.entries[dist.sample(&mut rng)].task_id.as_str())
        .collect()
}

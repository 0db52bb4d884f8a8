//! Aggregation of externally computed scores (docking, drug-likeness,
//! synthetic accessibility, enzyme-substrate prediction).

use std::collections::BTreeMap;

use serde_json::Value;

use super::report::MetricReport;
use super::MetricError;

pub const VINA_THRESHOLD: f64 = -8.18;
pub const QED_THRESHOLD: f64 = 0.25;
pub const SA_THRESHOLD: f64 = 0.59;
pub const JOINT_ALIGNMENT_THRESHOLD: f64 = 30.0;

pub const DRUG_TOP_K: [usize; 3] = [1, 5, 10];
pub const JOINT_TOP_N: [usize; 5] = [1, 5, 10, 20, 50];

/// Reads a numeric field of a JSON score row.
pub fn number(row: &Value, index: usize, field: &str) -> Result<f64, MetricError> {
    row.get(field)
        .and_then(Value::as_f64)
        .ok_or_else(|| MetricError::MissingField {
            row: index,
            field: field.to_string(),
        })
}

fn text(row: &Value, field: &str) -> Option<String> {
    row.get(field).map(|v| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrugRow {
    pub target_id: String,
    pub vina: f64,
    pub qed: f64,
    pub sa: f64,
    pub ref_vina: f64,
}

impl DrugRow {
    pub fn from_json(row: &Value, index: usize) -> Result<Self, MetricError> {
        Ok(DrugRow {
            target_id: text(row, "target_id").ok_or_else(|| MetricError::MissingField {
                row: index,
                field: "target_id".into(),
            })?,
            vina: number(row, index, "vina")?,
            qed: number(row, index, "qed")?,
            sa: number(row, index, "sa")?,
            ref_vina: number(row, index, "ref_vina")?,
        })
    }

    pub fn success(&self) -> bool {
        self.vina < VINA_THRESHOLD && self.qed > QED_THRESHOLD && self.sa > SA_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointRow {
    /// Groups pairs generated for the same description; rows without one
    /// form a single group.
    pub description_id: Option<String>,
    pub alignment: f64,
    pub vina: f64,
    pub qed: f64,
    pub sa: f64,
}

impl JointRow {
    pub fn from_json(row: &Value, index: usize) -> Result<Self, MetricError> {
        Ok(JointRow {
            description_id: text(row, "description_id"),
            alignment: number(row, index, "alignment")?,
            vina: number(row, index, "vina")?,
            qed: number(row, index, "qed")?,
            sa: number(row, index, "sa")?,
        })
    }

    /// All four thresholds, with the Vina comparison taken as printed
    /// (greater than -8.18).
    pub fn success(&self) -> bool {
        self.alignment > JOINT_ALIGNMENT_THRESHOLD
            && self.vina > VINA_THRESHOLD
            && self.qed > QED_THRESHOLD
            && self.sa > SA_THRESHOLD
    }

    /// −alignment × vina; larger is better.
    pub fn quality(&self) -> f64 {
        -self.alignment * self.vina
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnzymeRow {
    pub target_id: String,
    pub identity: f64,
    pub alignment: f64,
    pub vina: f64,
    pub esp: f64,
}

fn percent(hits: usize, total: usize) -> f64 {
    100.0 * hits as f64 / total as f64
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean over groups of the mean of each group's best `k` values
/// (`k = None` uses the whole group). `better_first` sorts a group so the
/// best value comes first.
fn top_k_mean(
    groups: &BTreeMap<String, Vec<f64>>,
    k: Option<usize>,
    better_first: fn(&f64, &f64) -> std::cmp::Ordering,
) -> f64 {
    let per_group: Vec<f64> = groups
        .values()
        .map(|vals| {
            let mut v = vals.clone();
            v.sort_by(better_first);
            let take = k.map_or(v.len(), |k| k.min(v.len()));
            mean(&v[..take])
        })
        .collect();
    mean(&per_group)
}

fn ascending(a: &f64, b: &f64) -> std::cmp::Ordering {
    a.total_cmp(b)
}

fn descending(a: &f64, b: &f64) -> std::cmp::Ordering {
    b.total_cmp(a)
}

/// Success Rate, High Affinity, mean scores and per-target top-k Vina.
pub fn drug_assessment(rows: &[DrugRow]) -> Result<MetricReport, MetricError> {
    if rows.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut report = MetricReport::new("drug");
    for (i, r) in rows.iter().enumerate() {
        let id = format!("{}#{i}", r.target_id);
        report.push_pair(
            &r.target_id,
            &id,
            "success",
            f64::from(u8::from(r.success())),
        );
        report.push_pair(
            &r.target_id,
            &id,
            "high_affinity",
            f64::from(u8::from(r.vina < r.ref_vina)),
        );
    }
    let n = rows.len();
    report.set(
        "success_rate",
        percent(rows.iter().filter(|r| r.success()).count(), n),
    );
    report.set(
        "high_affinity",
        percent(rows.iter().filter(|r| r.vina < r.ref_vina).count(), n),
    );
    let vina: Vec<f64> = rows.iter().map(|r| r.vina).collect();
    report.set_with_std("vina", &vina);
    report.set_with_std("qed", &rows.iter().map(|r| r.qed).collect::<Vec<_>>());
    report.set_with_std("sa", &rows.iter().map(|r| r.sa).collect::<Vec<_>>());
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.target_id.clone()).or_default().push(r.vina);
    }
    for k in DRUG_TOP_K {
        report.set(
            &format!("vina_top{k}"),
            top_k_mean(&groups, Some(k), ascending),
        );
    }
    report.set("vina_all", top_k_mean(&groups, None, ascending));
    Ok(report)
}

/// Success Rate over the four printed thresholds and per-description
/// top-n mean of −alignment × vina.
pub fn joint_assessment(rows: &[JointRow]) -> Result<MetricReport, MetricError> {
    if rows.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut report = MetricReport::new("joint");
    for (i, r) in rows.iter().enumerate() {
        let group = r.description_id.clone().unwrap_or_default();
        let id = format!("{group}#{i}");
        report.push_pair(&group, &id, "success", f64::from(u8::from(r.success())));
        report.push_pair(&group, &id, "quality", r.quality());
    }
    report.set(
        "success_rate",
        percent(rows.iter().filter(|r| r.success()).count(), rows.len()),
    );
    report.set_with_std(
        "alignment",
        &rows.iter().map(|r| r.alignment).collect::<Vec<_>>(),
    );
    report.set_with_std("vina", &rows.iter().map(|r| r.vina).collect::<Vec<_>>());
    report.set_with_std("qed", &rows.iter().map(|r| r.qed).collect::<Vec<_>>());
    report.set_with_std("sa", &rows.iter().map(|r| r.sa).collect::<Vec<_>>());
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups
            .entry(r.description_id.clone().unwrap_or_default())
            .or_default()
            .push(r.quality());
    }
    for n in JOINT_TOP_N {
        report.set(
            &format!("quality_top{n}"),
            top_k_mean(&groups, Some(n), descending),
        );
    }
    report.set("quality_all", top_k_mean(&groups, None, descending));
    Ok(report)
}

/// Per-target best Identity, Alignment, ESP (highest) and Vina (lowest),
/// averaged over targets.
pub fn enzyme_assessment(rows: &[EnzymeRow]) -> Result<MetricReport, MetricError> {
    if rows.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mut report = MetricReport::new("enzyme");
    let mut groups: BTreeMap<&str, Vec<&EnzymeRow>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(&r.target_id).or_default().push(r);
        let id = format!("{}#{i}", r.target_id);
        for (name, v) in [
            ("identity", r.identity),
            ("alignment", r.alignment),
            ("vina", r.vina),
            ("esp", r.esp),
        ] {
            report.push_pair(&r.target_id, &id, name, v);
        }
    }
    let best = |f: fn(&EnzymeRow) -> f64, lowest: bool| -> f64 {
        let tops: Vec<f64> = groups
            .values()
            .map(|g| {
                let it = g.iter().map(|r| f(r));
                if lowest {
                    it.fold(f64::INFINITY, f64::min)
                } else {
                    it.fold(f64::NEG_INFINITY, f64::max)
                }
            })
            .collect();
        mean(&tops)
    };
    report.set("identity_top1", best(|r| r.identity, false));
    report.set("alignment_top1", best(|r| r.alignment, false));
    report.set("vina_top1", best(|r| r.vina, true));
    report.set("esp_top1", best(|r| r.esp, false));
    Ok(report)
}

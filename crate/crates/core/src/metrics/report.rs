//! Metric reports: per-pair records plus corpus aggregates.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::MetricError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub reference_id: String,
    pub hypothesis_id: String,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    pub task: String,
    pub aggregates: BTreeMap<String, Aggregate>,
    pub records: Vec<PairRecord>,
}

impl MetricReport {
    pub fn new(task: &str) -> Self {
        MetricReport {
            task: task.to_string(),
            ..Default::default()
        }
    }

    pub fn push_pair(&mut self, reference_id: &str, hypothesis_id: &str, metric: &str, value: f64) {
        self.records.push(PairRecord {
            reference_id: reference_id.to_string(),
            hypothesis_id: hypothesis_id.to_string(),
            metric: metric.to_string(),
            value,
        });
    }

    pub fn set(&mut self, metric: &str, value: f64) {
        self.aggregates.insert(
            metric.to_string(),
            Aggregate {
                value,
                std: None,
                n: None,
            },
        );
    }

    /// Mean and population standard deviation of `values`. An empty slice
    /// records NaN-free zero with n = 0.
    pub fn set_with_std(&mut self, metric: &str, values: &[f64]) {
        let n = values.len();
        let (mean, std) = if n == 0 {
            (0.0, 0.0)
        } else {
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            (mean, var.sqrt())
        };
        self.aggregates.insert(
            metric.to_string(),
            Aggregate {
                value: mean,
                std: Some(std),
                n: Some(n),
            },
        );
    }

    pub fn value(&self, metric: &str) -> Option<f64> {
        self.aggregates.get(metric).map(|a| a.value)
    }

    /// Mean of the per-pair values recorded under `metric`.
    pub fn pair_mean(&self, metric: &str) -> Option<f64> {
        let vals: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.metric == metric)
            .map(|r| r.value)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn is_finite(&self) -> bool {
        self.aggregates
            .values()
            .all(|a| a.value.is_finite() && a.std.is_none_or(f64::is_finite))
            && self.records.iter().all(|r| r.value.is_finite())
    }

    pub fn to_json(&self) -> Result<String, MetricError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, MetricError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Aggregates as `metric,value,std,n` rows.
    pub fn write_aggregates_csv<W: Write>(&self, out: W) -> Result<(), MetricError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["metric", "value", "std", "n"])?;
        for (name, a) in &self.aggregates {
            let std = a.std.map(|s| s.to_string()).unwrap_or_default();
            let n = a.n.map(|n| n.to_string()).unwrap_or_default();
            w.write_record([name.as_str(), &a.value.to_string(), &std, &n])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-pair records as `reference_id,hypothesis_id,metric,value` rows.
    pub fn write_records_csv<W: Write>(&self, out: W) -> Result<(), MetricError> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

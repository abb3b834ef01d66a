//! Released tables and the provenance that travels with them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{MicrodataTable, Role, SchemaDescriptor};
use crate::error::{Result, SdcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LVariant {
    #[default]
    Distinct,
    Entropy,
}

/// Privacy parameters of a release; unset fields do not apply to the mechanism.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PrivacyParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_variant: Option<LVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl PrivacyParams {
    pub fn with_k(k: usize) -> Self {
        Self { k: Some(k), ..Self::default() }
    }

    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon: Some(epsilon), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SdcError::InvalidParameter(m.to_string()));
        if self.k == Some(0) {
            return bad("k must be >= 1");
        }
        if self.l.is_some_and(|l| !(l >= 1.0)) {
            return bad("l must be >= 1");
        }
        if self.t.is_some_and(|t| !(0.0..=1.0).contains(&t)) {
            return bad("t must lie in [0, 1]");
        }
        if self.epsilon.is_some_and(|e| !(e >= 0.0) || e.is_infinite()) {
            return bad("epsilon must be finite and >= 0");
        }
        if self.delta.is_some_and(|d| !(0.0..1.0).contains(&d)) {
            return bad("delta must lie in [0, 1)");
        }
        if self.alpha.is_some_and(|a| !(a > 1.0)) {
            return bad("alpha must be > 1");
        }
        if self.rho.is_some_and(|r| !(r > 0.0)) {
            return bad("rho must be > 0");
        }
        Ok(())
    }
}

/// Disjoint groups of row positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub groups: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(groups: Vec<Vec<usize>>) -> Self {
        Self { groups }
    }

    /// Checks the groups are disjoint and cover exactly `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for g in &self.groups {
            for &i in g {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(SdcError::Misaligned(format!(
                        "partition index {i} repeated or out of range for {n} rows"
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SdcError::Misaligned("partition does not cover every row".into()));
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn min_size(&self) -> usize {
        self.groups.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Group index of every row.
    pub fn membership(&self, n: usize) -> Vec<usize> {
        let mut m = vec![usize::MAX; n];
        for (g, rows) in self.groups.iter().enumerate() {
            for &r in rows {
                m[r] = g;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Recoding {
    /// One level per quasi-identifier, applied to every row.
    Global { levels: BTreeMap<String, usize> },
    /// One level per cell: `levels[row][qi]`, rows indexed by release position.
    Local { attributes: Vec<String>, levels: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizationScheme {
    pub recoding: Recoding,
    /// Row ids removed by suppression.
    pub suppressed_rows: BTreeSet<u64>,
}

impl GeneralizationScheme {
    pub fn is_identity(&self) -> bool {
        self.suppressed_rows.is_empty()
            && match &self.recoding {
                Recoding::Global { levels } => levels.values().all(|&l| l == 0),
                Recoding::Local { levels, .. } => levels.iter().flatten().all(|&l| l == 0),
            }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub mechanism: String,
    pub params: PrivacyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Non-confidential attributes are released unmasked.
    pub non_confidential_passthrough: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<GeneralizationScheme>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(mechanism: &str, params: PrivacyParams, seed: Option<u64>) -> Self {
        Self {
            mechanism: mechanism.to_string(),
            params,
            seed,
            non_confidential_passthrough: true,
            scheme: None,
            notes: BTreeMap::new(),
        }
    }

    pub fn note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.notes.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymizedRelease {
    table: MicrodataTable,
    partition: Option<Partition>,
    provenance: Provenance,
}

impl AnonymizedRelease {
    pub fn new(
        table: MicrodataTable,
        partition: Option<Partition>,
        provenance: Provenance,
    ) -> Result<Self> {
        if let Some(a) = table.schema().iter().find(|a| a.role == Role::Identifier) {
            return Err(SdcError::InvalidParameter(format!(
                "identifier `{}` must be suppressed before release",
                a.name
            )));
        }
        if let Some(p) = &partition {
            p.validate(table.n_rows())?;
        }
        Ok(Self { table, partition, provenance })
    }

    pub fn table(&self) -> &MicrodataTable {
        &self.table
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn mechanism(&self) -> &str {
        &self.provenance.mechanism
    }

    pub fn scheme(&self) -> Option<&GeneralizationScheme> {
        self.provenance.scheme.as_ref()
    }

    pub fn sidecar(&self) -> ReleaseSidecar {
        ReleaseSidecar {
            schema: SchemaDescriptor::from_schema(self.table.schema()),
            partition: self.partition.clone(),
            provenance: self.provenance.clone(),
            row_ids: (!self.table.row_ids().iter().copied().eq(0..self.table.n_rows() as u64))
                .then(|| self.table.row_ids().to_vec()),
        }
    }

    /// Writes `<stem>.csv` and `<stem>.json` (schema, partition, provenance).
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}.csv")), self.table.to_csv()?)?;
        let json = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let sidecar: ReleaseSidecar =
            serde_json::from_slice(&std::fs::read(dir.join(format!("{stem}.json")))?)?;
        let csv = std::fs::read(dir.join(format!("{stem}.csv")))?;
        let mut table = crate::data::load_table(&csv, &sidecar.schema)?;
        if let Some(ids) = sidecar.row_ids {
            table = table.relabel_row_ids(ids)?;
        }
        Self::new(table, sidecar.partition, sidecar.provenance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseSidecar {
    pub schema: SchemaDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition>,
    pub provenance: Provenance,
    /// Present when the release does not cover rows `0..n` in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_ids: Option<Vec<u64>>,
}

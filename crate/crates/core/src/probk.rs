//! Probabilistic k-anonymity: cluster-and-permute, Anatomy, and the
//! empirical verifier bounding linkage success by 1/k.

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::attack::{linkage_attack, linkage_attack_mechanism, LinkageStrategy};
use crate::data::{suppress_identifiers, AttributeSchema, MicrodataTable, Role, Value};
use crate::error::{Result, SdcError};
use crate::kanon::mdav_partition;
use crate::release::{AnonymizedRelease, Partition, PrivacyParams, Provenance};
use crate::rng;
use crate::stats::{normal_upper_quantile, wilson, wilson95, Interval};

pub const CLUSTER_PERMUTE: &str = "cluster_and_permute";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermuteMode {
    /// Whole quasi-identifier vectors move together.
    #[default]
    Vector,
    /// Each quasi-identifier column is shuffled independently.
    PerAttribute,
}

/// MDAV clustering computed once; each call to [`ClusterPermute::release`]
/// draws a fresh within-group permutation.
#[derive(Debug, Clone)]
pub struct ClusterPermute {
    table: MicrodataTable,
    qi_cols: Vec<usize>,
    partition: Partition,
    k: usize,
    mode: PermuteMode,
}

impl ClusterPermute {
    pub fn new<S: AsRef<str>>(table: &MicrodataTable, qi_attributes: &[S], k: usize, mode: PermuteMode) -> Result<Self> {
        let table = suppress_identifiers(table);
        let qi_cols = table.column_indices(qi_attributes)?;
        let partition = mdav_partition(&table, &qi_cols, k)?;
        Ok(Self { table, qi_cols, partition, k, mode })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Group `g` permutes with stream `g` of `seed`, so groups are
    /// independent of processing order.
    pub fn release(&self, seed: u64) -> Result<AnonymizedRelease> {
        let mut rows = self.table.rows().to_vec();
        for (g, group) in self.partition.groups.iter().enumerate() {
            let mut rng = rng::stream(seed, g as u64);
            match self.mode {
                PermuteMode::Vector => {
                    let mut source = group.clone();
                    source.shuffle(&mut rng);
                    for (&dst, &src) in group.iter().zip(&source) {
                        for &c in &self.qi_cols {
                            rows[dst][c] = self.table.row(src)[c].clone();
                        }
                    }
                }
                PermuteMode::PerAttribute => {
                    for &c in &self.qi_cols {
                        let mut source = group.clone();
                        source.shuffle(&mut rng);
                        for (&dst, &src) in group.iter().zip(&source) {
                            rows[dst][c] = self.table.row(src)[c].clone();
                        }
                    }
                }
            }
        }
        let permuted = self.table.rebuild(self.table.schema().to_vec(), rows)?;
        let provenance = Provenance::new(CLUSTER_PERMUTE, PrivacyParams::with_k(self.k), Some(seed)).note(
            "permutation",
            match self.mode {
                PermuteMode::Vector => "vector",
                PermuteMode::PerAttribute => "per_attribute",
            },
        );
        AnonymizedRelease::new(permuted, Some(self.partition.clone()), provenance)
    }
}

/// MDAV groups of at least `k`, then a uniformly random permutation of the
/// quasi-identifier vectors inside each group. Confidential values stay on
/// their records.
pub fn cluster_and_permute<S: AsRef<str>>(
    table: &MicrodataTable,
    qi_attributes: &[S],
    k: usize,
    seed: u64,
) -> Result<AnonymizedRelease> {
    ClusterPermute::new(table, qi_attributes, k, PermuteMode::Vector)?.release(seed)
}

/// Quasi-identifiers and confidential values in two tables joined only by
/// a group id.
#[derive(Debug, Clone, PartialEq)]
pub struct AnatomyRelease {
    pub qi_table: MicrodataTable,
    pub conf_table: MicrodataTable,
    pub provenance: Provenance,
}

pub const GROUP_ID: &str = "group_id";

impl AnatomyRelease {
    pub fn group_count(&self) -> usize {
        self.group_sizes().len()
    }

    /// Rows per group id in the quasi-identifier table.
    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for v in self.qi_table.column(0) {
            let g = v.as_f64().unwrap_or(0.0) as usize;
            if sizes.len() <= g {
                sizes.resize(g + 1, 0);
            }
            sizes[g] += 1;
        }
        sizes
    }

    /// Expected correct record links for an intruder pairing each
    /// quasi-identifier row with a uniformly chosen confidential row of the
    /// same group: one per group.
    pub fn expected_correct_links(&self) -> f64 {
        self.group_sizes().iter().filter(|&&s| s > 0).map(|&s| s as f64 * (1.0 / s as f64)).sum()
    }

    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}_qi.csv")), self.qi_table.to_csv()?)?;
        std::fs::write(dir.join(format!("{stem}_conf.csv")), self.conf_table.to_csv()?)?;
        std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&self.provenance)? + "\n")?;
        Ok(())
    }
}

/// Splits a partitioned table into a quasi-identifier table and a
/// confidential table. Non-confidential attributes go with the
/// quasi-identifiers; confidential rows are shuffled within each group.
pub fn anatomize(table: &MicrodataTable, partition: &Partition, k: usize, seed: u64) -> Result<AnatomyRelease> {
    partition.validate(table.n_rows())?;
    for (g, rows) in partition.groups.iter().enumerate() {
        if rows.len() < k {
            return Err(SdcError::GroupTooSmall { group: g, size: rows.len(), k });
        }
    }
    let table = suppress_identifiers(table);
    let conf: Vec<usize> = (0..table.n_attributes()).filter(|&c| table.schema()[c].role == Role::Confidential).collect();
    let rest: Vec<usize> = (0..table.n_attributes()).filter(|c| !conf.contains(c)).collect();
    let groups = partition.groups.len();
    let gid = AttributeSchema::numeric(GROUP_ID, Role::NonConfidential, 0.0, groups.saturating_sub(1) as f64);

    let build = |cols: &[usize], order: &dyn Fn(usize, &[usize]) -> Vec<usize>| -> Result<MicrodataTable> {
        let mut schema = vec![gid.clone()];
        schema.extend(cols.iter().map(|&c| table.schema()[c].clone()));
        let mut rows = Vec::new();
        let mut ids = Vec::new();
        for (g, members) in partition.groups.iter().enumerate() {
            for r in order(g, members) {
                let mut row = vec![Value::Num(g as f64)];
                row.extend(cols.iter().map(|&c| table.row(r)[c].clone()));
                rows.push(row);
                ids.push(table.row_ids()[r]);
            }
        }
        MicrodataTable::with_row_ids(schema, rows, ids)
    };
    let qi_table = build(&rest, &|_, m| m.to_vec())?;
    let conf_table = build(&conf, &|g, m| {
        let mut shuffled = m.to_vec();
        shuffled.shuffle(&mut rng::stream(seed, g as u64));
        shuffled
    })?;
    let provenance = Provenance::new("anatomy", PrivacyParams::with_k(k), Some(seed));
    Ok(AnatomyRelease { qi_table, conf_table, provenance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilisticKReport {
    pub k: usize,
    pub bound: f64,
    pub slack: f64,
    pub trials: usize,
    pub seed: u64,
    /// Success rate pooled over all external records and trials.
    pub pooled_rate: f64,
    pub pooled_interval: Interval,
    /// Highest per-record success rate.
    pub max_record_rate: f64,
    /// Lower confidence bound of that record's rate, Bonferroni-corrected
    /// over all records.
    pub max_record_lower: f64,
    pub pass: bool,
}

/// Default verifier slack above 1/k.
pub const PROB_K_SLACK: f64 = 0.02;

/// What the verifier attacks.
#[derive(Clone, Copy)]
pub enum LinkageTarget<'a> {
    /// One release; only the intruder's tie-break is random.
    Fixed(&'a AnonymizedRelease),
    /// A randomized mechanism, re-run with a fresh seed every trial.
    Mechanism(&'a (dyn Fn(u64) -> Result<AnonymizedRelease> + Sync)),
}

/// Runs the best-match linkage intruder `trials` times. PASS iff the pooled
/// 95% Wilson upper bound is at most `1/k + slack` and no single record's
/// success rate is significantly (5% family-wise) above that level.
pub fn verify_probabilistic_k(
    target: LinkageTarget<'_>,
    external: &MicrodataTable,
    strategy: &LinkageStrategy<'_>,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbabilisticKReport> {
    if k == 0 {
        return Err(SdcError::InvalidParameter("k must be >= 1".into()));
    }
    let report = match target {
        LinkageTarget::Fixed(release) => linkage_attack(release, external, strategy, trials, seed)?,
        LinkageTarget::Mechanism(m) => linkage_attack_mechanism(m, external, strategy, trials, seed)?,
    };
    let bound = 1.0 / k as f64;
    let level = bound + PROB_K_SLACK;
    let n_records = report.per_record.len().max(1);
    let (max_i, max_record_rate) = report
        .per_record
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, r)| if r > best.1 { (i, r) } else { best });
    let z = normal_upper_quantile(0.05 / n_records as f64);
    let max_record_lower = if report.per_record.is_empty() {
        0.0
    } else {
        wilson(report.per_record[max_i] * trials as f64, trials as f64, z).lo
    };
    let pooled_interval = wilson95(report.rate * (n_records * trials) as f64, (n_records * trials) as f64);
    Ok(ProbabilisticKReport {
        k,
        bound,
        slack: PROB_K_SLACK,
        trials,
        seed,
        pooled_rate: report.rate,
        pooled_interval,
        max_record_rate,
        max_record_lower,
        pass: pooled_interval.hi <= level && max_record_lower <= level,
    })
}

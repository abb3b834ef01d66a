//! Ex-post attacks: record linkage, attribute inference, membership
//! inference, intersection of releases and downcoding of minimal
//! generalizations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conf::Distribution;
use crate::data::{MicrodataTable, Role, Value};
use crate::distance::Standardizer;
use crate::dp::{are_neighbors, sample_outputs, NeighborModel, ScalarMechanism};
use crate::error::{Result, SdcError};
use crate::hierarchy::{Hierarchy, HierarchySet};
use crate::kanon::{is_minimal, odometer_step, MINIMAL_MECHANISM, SEARCH_LIMIT};
use crate::release::AnonymizedRelease;
use crate::rng::{self, SdcRng};
use crate::stats::{wilson95, Interval};

pub const DEFAULT_TRIALS: usize = 1000;

/// Nearest-record intruder. Distance is squared Euclidean over numeric
/// quasi-identifiers z-scored with the external table's statistics plus a
/// 0/1 mismatch per categorical one. When a hierarchy is supplied for an
/// attribute, a generalized release label matches every value it covers.
/// Ties are broken uniformly at random.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinkageStrategy<'a> {
    pub hierarchies: Option<&'a HierarchySet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack: String,
    /// Success rate of each target over the trials.
    pub per_record: Vec<f64>,
    pub rate: f64,
    pub interval: Interval,
    pub trials: usize,
    pub seed: u64,
}

impl AttackReport {
    fn from_counts(attack: &str, successes: Vec<f64>, trials: usize, seed: u64) -> Self {
        let total: f64 = successes.iter().sum();
        let n = (successes.len() * trials) as f64;
        let per_record = successes.iter().map(|s| s / trials as f64).collect();
        let rate = if n > 0.0 { total / n } else { 0.0 };
        Self { attack: attack.into(), per_record, rate, interval: wilson95(total, n), trials, seed }
    }
}

struct Linker<'a> {
    external: &'a MicrodataTable,
    /// (external column, release column name)
    shared: Vec<(usize, String)>,
    scale: Standardizer,
    hierarchies: Vec<Option<&'a Hierarchy>>,
}

impl<'a> Linker<'a> {
    fn new(external: &'a MicrodataTable, release_schema: &MicrodataTable, strategy: &LinkageStrategy<'a>) -> Result<Self> {
        let shared: Vec<(usize, String)> = external
            .names_with_role(Role::QuasiIdentifier)
            .into_iter()
            .filter(|n| release_schema.column_index(n).is_ok())
            .map(|n| Ok((external.column_index(&n)?, n)))
            .collect::<Result<_>>()?;
        if shared.is_empty() {
            return Err(SdcError::NoSharedQIs);
        }
        let cols: Vec<usize> = shared.iter().map(|(c, _)| *c).collect();
        let scale = Standardizer::fit(external, &cols)?;
        let hierarchies = shared.iter().map(|(_, n)| strategy.hierarchies.and_then(|h| h.get(n))).collect();
        Ok(Self { external, shared, scale, hierarchies })
    }

    /// Candidate release rows at minimum distance, per external record.
    fn minimizers(&self, release: &MicrodataTable) -> Result<Vec<Vec<usize>>> {
        let rcols: Vec<usize> = self.shared.iter().map(|(_, n)| release.column_index(n)).collect::<Result<_>>()?;
        let rel_numeric: Vec<bool> = rcols.iter().map(|&c| release.schema()[c].kind.is_numeric()).collect();
        let ext_numeric: Vec<bool> = self.shared.iter().map(|(c, _)| self.external.schema()[*c].kind.is_numeric()).collect();
        // pre-scaled numeric release values, NaN where not comparable
        let rel_z: Vec<Vec<f64>> = (0..release.n_rows())
            .map(|r| {
                rcols
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| match (rel_numeric[i] && ext_numeric[i], release.row(r)[c].as_f64()) {
                        (true, Some(x)) => self.scale.z(i, x),
                        _ => f64::NAN,
                    })
                    .collect()
            })
            .collect();
        let rel_labels: Vec<Vec<String>> = (0..release.n_rows())
            .map(|r| rcols.iter().map(|&c| release.row(r)[c].label().into_owned()).collect())
            .collect();

        (0..self.external.n_rows())
            .into_par_iter()
            .map(|e| {
                let row = self.external.row(e);
                let ez: Vec<f64> = self
                    .shared
                    .iter()
                    .enumerate()
                    .map(|(i, (c, _))| if ext_numeric[i] { self.scale.z(i, row[*c].as_f64().unwrap_or(0.0)) } else { 0.0 })
                    .collect();
                let elabels: Vec<String> = self.shared.iter().map(|(c, _)| row[*c].label().into_owned()).collect();
                let mut best = f64::INFINITY;
                let mut out = Vec::new();
                for r in 0..release.n_rows() {
                    let mut d = 0.0;
                    for i in 0..self.shared.len() {
                        let z = rel_z[r][i];
                        d += if !z.is_nan() {
                            (z - ez[i]).powi(2)
                        } else {
                            let matched = match self.hierarchies[i] {
                                Some(h) => h.covers(&rel_labels[r][i], &elabels[i]),
                                None => rel_labels[r][i] == elabels[i],
                            };
                            if matched { 0.0 } else { 1.0 }
                        };
                    }
                    let tol = 1e-12 * (1.0 + best.abs());
                    if out.is_empty() || d < best - tol {
                        best = d;
                        out.clear();
                        out.push(r);
                    } else if d <= best + tol {
                        out.push(r);
                    }
                }
                Ok(out)
            })
            .collect()
    }

    /// One guess per external record; 1.0 where it hits the record's own row.
    fn guess(&self, release: &MicrodataTable, minimizers: &[Vec<usize>], rng: &mut SdcRng) -> Vec<f64> {
        minimizers
            .iter()
            .enumerate()
            .map(|(e, cands)| {
                if cands.is_empty() {
                    return 0.0;
                }
                let pick = cands[rng.random_range(0..cands.len())];
                f64::from(u8::from(release.row_ids()[pick] == self.external.row_ids()[e]))
            })
            .collect()
    }
}

fn accumulate(per_trial: Vec<Vec<f64>>, n: usize) -> Vec<f64> {
    per_trial.into_iter().fold(vec![0.0; n], |mut acc, t| {
        acc.iter_mut().zip(t).for_each(|(a, x)| *a += x);
        acc
    })
}

/// Links every external record to a nearest release record. Ground truth is
/// the shared row id; external records absent from the release always
/// fail. Only the tie-break is re-drawn across trials.
pub fn linkage_attack(
    release: &AnonymizedRelease,
    external: &MicrodataTable,
    strategy: &LinkageStrategy<'_>,
    trials: usize,
    seed: u64,
) -> Result<AttackReport> {
    check_trials(trials)?;
    let linker = Linker::new(external, release.table(), strategy)?;
    let minimizers = linker.minimizers(release.table())?;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| linker.guess(release.table(), &minimizers, &mut rng::stream(seed, t as u64)))
        .collect();
    Ok(AttackReport::from_counts("linkage", accumulate(per_trial, external.n_rows()), trials, seed))
}

/// Like [`linkage_attack`], but draws a fresh release from `mechanism` for
/// every trial. Trial `t` passes `derive_seed(seed, t)` to the mechanism.
pub fn linkage_attack_mechanism(
    mechanism: &(dyn Fn(u64) -> Result<AnonymizedRelease> + Sync),
    external: &MicrodataTable,
    strategy: &LinkageStrategy<'_>,
    trials: usize,
    seed: u64,
) -> Result<AttackReport> {
    check_trials(trials)?;
    let first = mechanism(rng::derive_seed(seed, 0))?;
    let linker = Linker::new(external, first.table(), strategy)?;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = rng::derive_seed(seed, t as u64);
            let release = if t == 0 { first.clone() } else { mechanism(trial_seed)? };
            let minimizers = linker.minimizers(release.table())?;
            Ok(linker.guess(release.table(), &minimizers, &mut rng::stream(trial_seed, u64::MAX)))
        })
        .collect::<Result<_>>()?;
    Ok(AttackReport::from_counts("linkage", accumulate(per_trial, external.n_rows()), trials, seed))
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(SdcError::InvalidParameter("trials must be positive".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGain {
    pub value: Value,
    pub prior: f64,
    pub posterior: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassInference {
    pub class: usize,
    pub size: usize,
    pub values: Vec<ValueGain>,
    pub max_gain: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeInferenceReport {
    pub attribute: String,
    pub threshold: f64,
    pub classes: Vec<ClassInference>,
}

impl AttributeInferenceReport {
    pub fn flagged(&self) -> impl Iterator<Item = &ClassInference> {
        self.classes.iter().filter(|c| c.flagged)
    }
}

pub const DEFAULT_GAIN_THRESHOLD: f64 = 0.1;

/// The intruder knows the target's class; the posterior is the class's
/// empirical distribution of `conf_attribute`, compared against the prior
/// `global`. Classes whose largest gain exceeds `threshold` are flagged.
pub fn attribute_inference(
    table: &MicrodataTable,
    partition: &crate::release::Partition,
    conf_attribute: &str,
    global: &Distribution,
    threshold: f64,
) -> Result<AttributeInferenceReport> {
    let c = table
        .column_index(conf_attribute)
        .map_err(|_| SdcError::UnknownAttribute(conf_attribute.to_string()))?;
    partition.validate(table.n_rows())?;
    let classes = partition
        .groups
        .iter()
        .enumerate()
        .map(|(g, rows)| {
            let values: Vec<Value> = rows.iter().map(|&r| table.row(r)[c].clone()).collect();
            let posterior = Distribution::empirical(&values)?;
            let support: BTreeSet<&Value> = global.support().iter().chain(posterior.support()).collect();
            let values: Vec<ValueGain> = support
                .into_iter()
                .map(|v| {
                    let (prior, post) = (global.prob(v), posterior.prob(v));
                    ValueGain { value: v.clone(), prior, posterior: post, gain: post - prior }
                })
                .collect();
            let max_gain = values.iter().map(|v| v.gain).fold(f64::NEG_INFINITY, f64::max);
            Ok(ClassInference { class: g, size: rows.len(), values, max_gain, flagged: max_gain > threshold })
        })
        .collect::<Result<_>>()?;
    Ok(AttributeInferenceReport { attribute: conf_attribute.into(), threshold, classes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub advantage: f64,
    pub accuracy: f64,
    pub accuracy_interval: Interval,
    pub trials: usize,
    pub calibration_runs: usize,
    pub bins: usize,
    pub seed: u64,
}

pub const CALIBRATION_RUNS: usize = 10_000;
pub const MEMBERSHIP_BINS: usize = 100;

/// Likelihood-ratio distinguisher. Output densities under both tables are
/// estimated by equal-width histograms of [`CALIBRATION_RUNS`] runs each.
/// Each trial flips membership uniformly, runs the mechanism on the chosen
/// table and guesses the table with the higher estimated density (ties
/// uniformly). Advantage is `max(0, 2 (accuracy - 1/2))`.
pub fn membership_inference(
    mechanism: &impl ScalarMechanism,
    with_target: &MicrodataTable,
    without_target: &MicrodataTable,
    model: NeighborModel,
    trials: usize,
    seed: u64,
) -> Result<MembershipReport> {
    if !are_neighbors(with_target, without_target, model) {
        return Err(SdcError::NotNeighbors(model.to_string()));
    }
    check_trials(trials)?;
    let a = sample_outputs(mechanism, with_target, CALIBRATION_RUNS, rng::derive_seed(seed, 1))?;
    let b = sample_outputs(mechanism, without_target, CALIBRATION_RUNS, rng::derive_seed(seed, 2))?;
    let lo = a.iter().chain(&b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(&b).copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = MEMBERSHIP_BINS;
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let bin = |x: f64| (((x - lo) / width).max(0.0) as usize).min(bins - 1);
    let mut ha = vec![0u32; bins];
    let mut hb = vec![0u32; bins];
    a.iter().for_each(|&x| ha[bin(x)] += 1);
    b.iter().for_each(|&x| hb[bin(x)] += 1);

    let trial_seed = rng::derive_seed(seed, 3);
    let correct: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(trial_seed, t as u64);
            let member = r.random_bool(0.5);
            let y = mechanism(if member { with_target } else { without_target }, &mut r)?;
            let i = bin(y);
            let guess = match ha[i].cmp(&hb[i]) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => r.random_bool(0.5),
            };
            Ok(usize::from(guess == member))
        })
        .sum::<Result<usize>>()?;
    let accuracy = correct as f64 / trials as f64;
    Ok(MembershipReport {
        advantage: (2.0 * (accuracy - 0.5)).max(0.0),
        accuracy,
        accuracy_interval: wilson95(correct as f64, trials as f64),
        trials,
        calibration_runs: CALIBRATION_RUNS,
        bins,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveAnonymity {
    pub row_id_1: u64,
    pub row_id_2: u64,
    pub anonymity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    /// `None` when the releases share no individuals.
    pub min_anonymity: Option<usize>,
    pub per_record: Vec<EffectiveAnonymity>,
}

/// For every individual present in both releases (`shared` maps a row id of
/// the first release to one of the second), the effective anonymity is the
/// number of shared individuals in both of its classes.
pub fn intersection_attack(
    release1: &AnonymizedRelease,
    release2: &AnonymizedRelease,
    shared: &[(u64, u64)],
) -> Result<IntersectionReport> {
    let class_of = |rel: &AnonymizedRelease| -> Result<HashMap<u64, usize>> {
        let p = rel.partition().ok_or(SdcError::MissingPartition)?;
        let ids = rel.table().row_ids();
        Ok(p.groups.iter().enumerate().flat_map(|(g, rows)| rows.iter().map(move |&r| (ids[r], g))).collect())
    };
    let c1 = class_of(release1)?;
    let c2 = class_of(release2)?;
    let linked: Vec<(u64, u64, usize, usize)> = shared
        .iter()
        .filter_map(|&(a, b)| Some((a, b, *c1.get(&a)?, *c2.get(&b)?)))
        .collect();
    let mut cell_counts: HashMap<(usize, usize), usize> = HashMap::new();
    for &(_, _, g1, g2) in &linked {
        *cell_counts.entry((g1, g2)).or_default() += 1;
    }
    let per_record: Vec<EffectiveAnonymity> = linked
        .iter()
        .map(|&(a, b, g1, g2)| EffectiveAnonymity { row_id_1: a, row_id_2: b, anonymity: cell_counts[&(g1, g2)] })
        .collect();
    Ok(IntersectionReport { min_anonymity: per_record.iter().map(|r| r.anonymity).min(), per_record })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferredCell {
    pub row_id: u64,
    pub attribute: String,
    pub released: String,
    /// Leaves the cell takes across all preimages, in hierarchy order.
    pub inferred: Vec<String>,
    pub leaf_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DowncodingReport {
    pub candidates: u64,
    pub preimages: u64,
    /// Generalized cells only; leaf cells are already exact.
    pub cells: Vec<InferredCell>,
    /// Fraction of generalized cells whose inferred set is strictly smaller
    /// than the released node's leaf set.
    pub recovery: f64,
}

/// Enumerates every table the released generalization could be a minimal
/// k-anonymous generalization of (under any minimal scheme, not just the
/// one the toolkit's search would pick) and narrows each generalized cell
/// to the leaves it takes across those tables.
pub fn downcoding_attack(release: &AnonymizedRelease, hierarchies: &HierarchySet, k: usize) -> Result<DowncodingReport> {
    let prov = release.provenance();
    if prov.mechanism != MINIMAL_MECHANISM {
        return Err(SdcError::NotMinimalMechanism(prov.mechanism.clone()));
    }
    let global = prov.notes.get("minimality").is_some_and(|m| m == "global");
    let table = release.table();
    let names = table.names_with_role(Role::QuasiIdentifier);
    let cols = table.column_indices(&names)?;
    let hs: Vec<&Hierarchy> = names
        .iter()
        .map(|n| hierarchies.get(n).ok_or_else(|| SdcError::HierarchyMissing(n.clone())))
        .collect::<Result<_>>()?;
    let (n, q) = (table.n_rows(), cols.len());

    // released node, its level and its leaves for every cell (row-major)
    let mut nodes = Vec::with_capacity(n * q);
    let mut levels = Vec::with_capacity(n * q);
    let mut leaves: Vec<Vec<&str>> = Vec::with_capacity(n * q);
    for r in 0..n {
        for (a, &c) in cols.iter().enumerate() {
            let label = table.row(r)[c].label().into_owned();
            let unknown = || SdcError::UnknownValue { attribute: names[a].clone(), value: label.clone() };
            levels.push(hs[a].level_of(&label).ok_or_else(unknown)?);
            leaves.push(hs[a].leaves_under(&label).ok_or_else(unknown)?);
            nodes.push(label);
        }
    }
    let candidates = leaves.iter().map(|l| l.len() as f64).product::<f64>();
    if candidates > SEARCH_LIMIT as f64 {
        return Err(SdcError::SearchSpaceTooLarge { states: candidates, limit: SEARCH_LIMIT });
    }
    let attr_levels: Vec<usize> = (0..q).map(|a| levels[a]).collect();

    // k-anonymity of a level assignment over one candidate table
    let k_anonymous = |choice: &[usize], level: &dyn Fn(usize, usize) -> usize| -> bool {
        let mut counts: HashMap<Vec<&str>, usize> = HashMap::new();
        let keys: Vec<Vec<&str>> = (0..n)
            .map(|r| {
                (0..q)
                    .map(|a| {
                        let i = r * q + a;
                        hs[a].generalize_label(leaves[i][choice[i]], level(r, a)).expect("leaf of this hierarchy")
                    })
                    .collect()
            })
            .collect();
        for key in &keys {
            *counts.entry(key.clone()).or_default() += 1;
        }
        keys.iter().all(|key| counts[key] >= k)
    };

    let radices: Vec<usize> = leaves.iter().map(Vec::len).collect();
    let mut choice = vec![0usize; n * q];
    let mut seen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n * q];
    let mut preimages = 0u64;
    loop {
        // the released labels are k-anonymous by construction, so only
        // minimality depends on the candidate
        let minimal = if global {
            is_minimal(&attr_levels, |d| k_anonymous(&choice, &|_, a| d[a]))
        } else {
            is_minimal(&levels, |d| k_anonymous(&choice, &|r, a| d[r * q + a]))
        };
        if minimal {
            preimages += 1;
            for (s, &c) in seen.iter_mut().zip(&choice) {
                s.insert(c);
            }
        }
        if !odometer_step(&mut choice, &radices) {
            break;
        }
    }

    let mut cells = Vec::new();
    for r in 0..n {
        for a in 0..q {
            let i = r * q + a;
            if levels[i] == 0 {
                continue;
            }
            cells.push(InferredCell {
                row_id: table.row_ids()[r],
                attribute: names[a].clone(),
                released: nodes[i].clone(),
                inferred: seen[i].iter().map(|&j| leaves[i][j].to_string()).collect(),
                leaf_count: leaves[i].len(),
            });
        }
    }
    let narrowed = cells.iter().filter(|c| c.inferred.len() < c.leaf_count).count();
    let recovery = if cells.is_empty() { 0.0 } else { narrowed as f64 / cells.len() as f64 };
    Ok(DowncodingReport { candidates: candidates as u64, preimages, cells, recovery })
}

/// (narrowed, generalized) cell counts per attribute.
pub fn downcoding_summary(report: &DowncodingReport) -> BTreeMap<String, (usize, usize)> {
    let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for c in &report.cells {
        let e = out.entry(c.attribute.clone()).or_default();
        e.1 += 1;
        if c.inferred.len() < c.leaf_count {
            e.0 += 1;
        }
    }
    out
}

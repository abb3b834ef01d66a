//! File-based workflow: load, anonymize, attack, account, report.
//!
//! A run directory holds `release.csv` + `release.json`, one
//! `attack_<name>.json` per attack, `utility.json`, `ledger.jsonl`,
//! `summary.txt`, `run_config.json` and `manifest.json`. Nothing written
//! depends on wall-clock time or the output location, so equal configs give
//! byte-identical directories.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::attack::{
    attribute_inference, downcoding_attack, linkage_attack, linkage_attack_mechanism, AttackReport,
    AttributeInferenceReport, DowncodingReport, LinkageStrategy, DEFAULT_GAIN_THRESHOLD, DEFAULT_TRIALS,
};
use crate::conf::{enforce_models, Constraints, Distribution, GroundDistance};
use crate::data::{load_table, suppress_identifiers, MicrodataTable, Role, SchemaDescriptor, Value};
use crate::dp::{
    dp_microdata_release, empirical_dp_check, BudgetLedger, BudgetStatus, ComposedBudget, EmpiricalDpReport,
    LedgerEntry, ModelFamily, NeighborModel, Query, DEFAULT_BINS,
};
use crate::error::{Result, SdcError};
use crate::hierarchy::{Hierarchy, HierarchySet};
use crate::kanon::{aggregate, anonymize_generalization, mdav_microaggregate, minimal_generalization, Minimality};
use crate::probk::{ClusterPermute, PermuteMode};
use crate::release::{AnonymizedRelease, LVariant, PrivacyParams, Provenance};
use crate::rng;
use crate::utility::{utility_report, UtilityReport};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DP_CHECK_TRIALS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum MechanismConfig {
    Mdav {
        k: usize,
    },
    ClusterPermute {
        k: usize,
        #[serde(default)]
        mode: PermuteMode,
    },
    Generalization {
        k: usize,
        #[serde(default)]
        max_suppression: f64,
    },
    MinimalGeneralization {
        k: usize,
        #[serde(default)]
        minimality: Minimality,
    },
    /// MDAV classes merged until l-diversity and/or t-closeness hold on the
    /// first confidential attribute.
    EnforceModels {
        k: usize,
        #[serde(default)]
        l: Option<f64>,
        #[serde(default)]
        l_variant: LVariant,
        #[serde(default)]
        t: Option<f64>,
    },
    DpMicrodata {
        epsilon: f64,
    },
}

impl MechanismConfig {
    pub fn parse(name: &str, k: Option<usize>, epsilon: Option<f64>) -> Result<Self> {
        let need_k = || k.ok_or_else(|| SdcError::InvalidParameter(format!("mechanism `{name}` needs k")));
        Ok(match name {
            "mdav" => Self::Mdav { k: need_k()? },
            "cluster_permute" | "cluster_and_permute" => Self::ClusterPermute { k: need_k()?, mode: PermuteMode::Vector },
            "generalization" => Self::Generalization { k: need_k()?, max_suppression: 0.0 },
            "minimal_generalization" => Self::MinimalGeneralization { k: need_k()?, minimality: Minimality::Local },
            "dp_microdata" => Self::DpMicrodata {
                epsilon: epsilon.ok_or_else(|| SdcError::InvalidParameter("mechanism `dp_microdata` needs epsilon".into()))?,
            },
            other => return Err(SdcError::InvalidParameter(format!("unknown mechanism `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mdav { .. } => "mdav",
            Self::ClusterPermute { .. } => "cluster_permute",
            Self::Generalization { .. } => "generalization",
            Self::MinimalGeneralization { .. } => "minimal_generalization",
            Self::EnforceModels { .. } => "enforce_models",
            Self::DpMicrodata { .. } => "dp_microdata",
        }
    }

    pub fn k(&self) -> Option<usize> {
        match *self {
            Self::Mdav { k }
            | Self::ClusterPermute { k, .. }
            | Self::Generalization { k, .. }
            | Self::MinimalGeneralization { k, .. }
            | Self::EnforceModels { k, .. } => Some(k),
            Self::DpMicrodata { .. } => None,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            Self::DpMicrodata { epsilon } => Some(epsilon),
            _ => None,
        }
    }

    /// Replaces k or epsilon, whichever the mechanism takes.
    pub fn set_parameter(&mut self, param: &str, value: f64) -> Result<()> {
        let as_k = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(SdcError::InvalidParameter(format!("k must be a positive integer, got {value}")))
            }
        };
        match (param, self) {
            (
                "k",
                Self::Mdav { k }
                | Self::ClusterPermute { k, .. }
                | Self::Generalization { k, .. }
                | Self::MinimalGeneralization { k, .. }
                | Self::EnforceModels { k, .. },
            ) => *k = as_k()?,
            ("epsilon", Self::DpMicrodata { epsilon }) => *epsilon = value,
            (p, m) => {
                return Err(SdcError::InvalidParameter(format!("mechanism `{}` has no parameter `{p}`", m.name())))
            }
        }
        Ok(())
    }

    fn randomized(&self) -> bool {
        matches!(self, Self::ClusterPermute { .. } | Self::DpMicrodata { .. })
    }

    fn validate(&self) -> Result<()> {
        if let Some(k) = self.k() {
            if k == 0 {
                return Err(SdcError::InvalidParameter("k must be >= 1".into()));
            }
        }
        if let Some(e) = self.epsilon() {
            if !(e > 0.0) || e.is_infinite() {
                return Err(SdcError::NonPositiveEpsilon(e));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackName {
    Linkage,
    AttributeInference,
    Downcoding,
    DpCheck,
}

impl AttackName {
    pub const ALL: [AttackName; 4] = [Self::Linkage, Self::AttributeInference, Self::Downcoding, Self::DpCheck];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Linkage => "linkage",
            Self::AttributeInference => "attribute_inference",
            Self::Downcoding => "downcoding",
            Self::DpCheck => "dp_check",
        }
    }
}

impl fmt::Display for AttackName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackName {
    type Err = SdcError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| SdcError::InvalidParameter(format!("unknown attack `{s}`")))
    }
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: PathBuf,
    pub schema: PathBuf,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hierarchies: Vec<PathBuf>,
    pub mechanism: MechanismConfig,
    #[serde(default)]
    pub attacks: Vec<AttackName>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub neighbor_model: NeighborModel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub workload: Vec<Query>,
    /// Shared ledger the run's budget entry is appended to.
    #[serde(default, skip_serializing)]
    pub ledger: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a JSON config; relative paths are taken from the config's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| in_file(path, e.into()))?;
        let mut cfg: RunConfig = serde_json::from_slice(&bytes).map_err(|e| in_file(path, e.into()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.data);
        fix(&mut cfg.schema);
        cfg.hierarchies.iter_mut().for_each(fix);
        fix(&mut cfg.output_dir);
        if let Some(l) = cfg.ledger.as_mut() {
            fix(l);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for p in [&self.data, &self.schema].into_iter().chain(&self.hierarchies) {
            if !p.is_file() {
                return Err(SdcError::InvalidParameter(format!("input file {} does not exist", p.display())));
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(SdcError::InvalidParameter("output_dir is required".into()));
        }
        if self.trials == 0 {
            return Err(SdcError::InvalidParameter("trials must be positive".into()));
        }
        self.mechanism.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum AttackOutcome {
    Linkage(AttackReport),
    AttributeInference(AttributeInferenceReport),
    Downcoding(DowncodingReport),
    DpCheck(EmpiricalDpReport),
    NotApplicable { attack: AttackName, reason: String },
}

/// Inputs of a run, loaded from disk.
pub struct Inputs {
    pub original: MicrodataTable,
    pub hierarchies: HierarchySet,
    digests: BTreeMap<String, String>,
}

impl Inputs {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let mut digests = BTreeMap::new();
        let mut read = |p: &Path| -> Result<Vec<u8>> {
            let bytes = std::fs::read(p).map_err(|e| in_file(p, e.into()))?;
            digests.insert(file_label(p), sha256(&bytes));
            Ok(bytes)
        };
        let schema = SchemaDescriptor::from_json(&read(&cfg.schema)?).map_err(|e| in_file(&cfg.schema, e))?;
        let original = load_table(&read(&cfg.data)?, &schema).map_err(|e| in_file(&cfg.data, e))?;
        let mut hierarchies = HierarchySet::new();
        for p in &cfg.hierarchies {
            let h = Hierarchy::from_json(&read(p)?).map_err(|e| in_file(p, e))?;
            hierarchies.insert(h.attribute().to_string(), h);
        }
        Ok(Self { original, hierarchies, digests })
    }
}

fn in_file(path: &Path, source: SdcError) -> SdcError {
    SdcError::InFile { path: path.display().to_string(), error: Box::new(source) }
}

fn file_label(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Applies the configured mechanism. Randomized mechanisms use `seed`.
pub fn apply_mechanism(mechanism: &MechanismConfig, inputs: &Inputs, seed: u64) -> Result<AnonymizedRelease> {
    let t = &inputs.original;
    let qis = t.names_with_role(Role::QuasiIdentifier);
    match *mechanism {
        MechanismConfig::Mdav { k } => Ok(mdav_microaggregate(t, &qis, k)?.1),
        MechanismConfig::ClusterPermute { k, mode } => ClusterPermute::new(t, &qis, k, mode)?.release(seed),
        MechanismConfig::Generalization { k, max_suppression } => {
            Ok(anonymize_generalization(t, &inputs.hierarchies, k, max_suppression)?.0)
        }
        MechanismConfig::MinimalGeneralization { k, minimality } => {
            Ok(minimal_generalization(t, &inputs.hierarchies, k, minimality)?.0)
        }
        MechanismConfig::EnforceModels { k, l, l_variant, t: closeness } => {
            let conf = first_confidential(t)?;
            let distance = if t.attribute(&conf)?.kind.is_numeric() {
                GroundDistance::OrderedNumeric
            } else {
                GroundDistance::CategoricalUniform
            };
            let constraints = Constraints { k, l: l.map(|l| (l, l_variant)), t: closeness, distance };
            let partition = enforce_models(t, &qis, &conf, &constraints)?;
            let masked = aggregate(t, &t.column_indices(&qis)?, &partition)?;
            let params = PrivacyParams { k: Some(k), l, l_variant: l.map(|_| l_variant), t: closeness, ..Default::default() };
            AnonymizedRelease::new(suppress_identifiers(&masked), Some(partition), Provenance::new("enforce_models", params, None))
        }
        MechanismConfig::DpMicrodata { epsilon } => dp_microdata_release(t, epsilon, seed),
    }
}

fn first_confidential(t: &MicrodataTable) -> Result<String> {
    t.names_with_role(Role::Confidential)
        .into_iter()
        .next()
        .ok_or_else(|| SdcError::InvalidParameter("no confidential attribute".into()))
}

/// Runs one attack against `release`; `seed` drives every random choice.
pub fn execute_attack(
    name: AttackName,
    cfg: &RunConfig,
    inputs: &Inputs,
    release: &AnonymizedRelease,
    trials: usize,
    seed: u64,
) -> Result<AttackOutcome> {
    let not_applicable = |reason: String| Ok(AttackOutcome::NotApplicable { attack: name, reason });
    let original = &inputs.original;
    match name {
        AttackName::Linkage => {
            let strategy = LinkageStrategy { hierarchies: Some(&inputs.hierarchies) };
            let report = if cfg.mechanism.randomized() {
                let mech = |s: u64| apply_mechanism(&cfg.mechanism, inputs, s);
                linkage_attack_mechanism(&mech, original, &strategy, trials, seed)?
            } else {
                linkage_attack(release, original, &strategy, trials, seed)?
            };
            Ok(AttackOutcome::Linkage(report))
        }
        AttackName::AttributeInference => {
            let Some(partition) = release.partition() else {
                return not_applicable("release carries no partition".into());
            };
            let conf = first_confidential(release.table())?;
            let all: Vec<Value> = original.column(original.column_index(&conf)?).cloned().collect();
            let global = Distribution::empirical(&all)?;
            let report = attribute_inference(release.table(), partition, &conf, &global, DEFAULT_GAIN_THRESHOLD)?;
            Ok(AttackOutcome::AttributeInference(report))
        }
        AttackName::Downcoding => match cfg.mechanism {
            MechanismConfig::MinimalGeneralization { k, .. } => {
                Ok(AttackOutcome::Downcoding(downcoding_attack(release, &inputs.hierarchies, k)?))
            }
            _ => not_applicable(format!("mechanism `{}` is not a minimal generalization", cfg.mechanism.name())),
        },
        AttackName::DpCheck => match cfg.mechanism {
            MechanismConfig::DpMicrodata { epsilon } => {
                let base = suppress_identifiers(original);
                if base.n_rows() == 0 || base.n_attributes() == 0 {
                    return not_applicable("empty table".into());
                }
                // the check watches record 0's first released cell; a replace
                // neighbor moves that cell to the far end of its domain, an
                // add/remove neighbor drops the last record
                let neighbor = match cfg.neighbor_model {
                    NeighborModel::Replace => {
                        let (lo, hi) = base.schema()[0]
                            .kind
                            .bounds()
                            .ok_or_else(|| SdcError::NonNumeric(base.schema()[0].name.clone()))?;
                        let x = base.row(0)[0].as_f64().unwrap_or(lo);
                        let mut rows = base.rows().to_vec();
                        rows[0][0] = Value::Num(if x - lo > hi - x { lo } else { hi });
                        base.rebuild(base.schema().to_vec(), rows)?
                    }
                    NeighborModel::AddRemove => {
                        if base.n_rows() < 2 {
                            return not_applicable("add/remove check needs at least two records".into());
                        }
                        base.select_rows(&(0..base.n_rows() - 1).collect::<Vec<_>>())
                    }
                };
                let mech = |t: &MicrodataTable, r: &mut rng::SdcRng| -> Result<f64> {
                    use rand::RngCore;
                    let one = dp_microdata_release(&t.select_rows(&[0]), epsilon, r.next_u64())?;
                    Ok(one.table().row(0)[0].as_f64().unwrap_or(0.0))
                };
                let report = empirical_dp_check(
                    &mech,
                    &base,
                    &neighbor,
                    cfg.neighbor_model,
                    epsilon,
                    DEFAULT_BINS,
                    DP_CHECK_TRIALS,
                    seed,
                )?;
                Ok(AttackOutcome::DpCheck(report))
            }
            _ => not_applicable(format!("mechanism `{}` is not differentially private", cfg.mechanism.name())),
        },
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub release: AnonymizedRelease,
    pub attacks: Vec<AttackOutcome>,
    pub utility: UtilityReport,
    pub budget: ComposedBudget,
    pub summary: String,
}

fn ledger_entry(release: &AnonymizedRelease) -> LedgerEntry {
    match release.provenance().params.epsilon {
        Some(e) => LedgerEntry::dp(release.mechanism(), e, release.provenance().params.delta.unwrap_or(0.0)),
        None => LedgerEntry { family: ModelFamily::KAnonymity, ..LedgerEntry::dp(release.mechanism(), 0.0, 0.0) },
    }
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn attack_file(name: AttackName) -> String {
    format!("attack_{name}.json")
}

/// Executes a full run and writes its directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let inputs = Inputs::load(cfg)?;
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out)?;

    let release = apply_mechanism(&cfg.mechanism, &inputs, cfg.seed)?;
    release.write(out, "release")?;

    let mut attacks = Vec::new();
    for (i, &name) in cfg.attacks.iter().enumerate() {
        let outcome = execute_attack(name, cfg, &inputs, &release, cfg.trials, rng::derive_seed(cfg.seed, 100 + i as u64))?;
        write_json(out, &attack_file(name), &outcome)?;
        attacks.push(outcome);
    }

    let workload: Vec<Query> = cfg
        .workload
        .iter()
        .filter(|q| q.evaluate(release.table()).is_ok())
        .cloned()
        .collect();
    let utility = utility_report(&inputs.original, release.table(), &workload)?;
    write_json(out, "utility.json", &utility)?;

    let entry = ledger_entry(&release);
    let mut ledger = BudgetLedger::new();
    let budget = ledger.compose(entry.clone())?;
    std::fs::write(out.join("ledger.jsonl"), ledger.to_jsonl()?)?;
    if let Some(shared) = &cfg.ledger {
        BudgetLedger::append_to(shared, &entry)?;
    }

    write_json(out, "run_config.json", cfg)?;
    let summary = summarize(cfg, &release, inputs.original.n_rows(), &attacks, &utility, &budget);
    std::fs::write(out.join("summary.txt"), &summary)?;
    write_manifest(out, cfg, &inputs.digests)?;
    Ok(RunOutcome { release, attacks, utility, budget, summary })
}

const ARTIFACTS: [&str; 6] = ["release.csv", "release.json", "utility.json", "ledger.jsonl", "run_config.json", "summary.txt"];

fn write_manifest(out: &Path, cfg: &RunConfig, inputs: &BTreeMap<String, String>) -> Result<()> {
    let mut artifacts = BTreeMap::new();
    let attack_files = AttackName::ALL.iter().map(|&a| attack_file(a));
    for name in ARTIFACTS.iter().map(|s| s.to_string()).chain(attack_files) {
        let p = out.join(&name);
        if p.is_file() {
            artifacts.insert(name, sha256(&std::fs::read(p)?));
        }
    }
    let manifest = serde_json::json!({
        "toolkit_version": TOOLKIT_VERSION,
        "mechanism": cfg.mechanism.name(),
        "seed": cfg.seed,
        "inputs": inputs,
        "artifacts": artifacts,
    });
    write_json(out, "manifest.json", &manifest)
}

/// Human-readable comparison of the ex-ante parameter with the measured
/// risk.
pub fn summarize(
    cfg: &RunConfig,
    release: &AnonymizedRelease,
    n_original: usize,
    attacks: &[AttackOutcome],
    utility: &UtilityReport,
    budget: &ComposedBudget,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "mechanism    {}", release.mechanism());
    let _ = writeln!(s, "records      {n_original} in, {} released", release.table().n_rows());
    let _ = writeln!(s, "seed         {}", cfg.seed);
    match (release.provenance().params.k, release.provenance().params.epsilon) {
        (_, Some(eps)) => {
            let status = match budget.status {
                BudgetStatus::Meaningful => "formal guarantee (epsilon <= 1)".to_string(),
                BudgetStatus::EmpiricalCheckRequired => "empirical check required".to_string(),
                BudgetStatus::MostlyVoid => "empirical check required; guarantee mostly void".to_string(),
            };
            let _ = writeln!(s, "ex-ante      epsilon = {eps}: {status}");
        }
        (Some(k), None) => {
            let _ = writeln!(s, "ex-ante      k = {k}: re-identification probability at most {:.4}", 1.0 / k as f64);
        }
        (None, None) => {
            let _ = writeln!(s, "ex-ante      none");
        }
    }
    for a in attacks {
        let line = match a {
            AttackOutcome::Linkage(r) => format!(
                "linkage success {:.4} (95% CI {:.4}..{:.4}; max per record {:.4}), {} trials, seed {}",
                r.rate,
                r.interval.lo,
                r.interval.hi,
                r.per_record.iter().copied().fold(0.0, f64::max),
                r.trials,
                r.seed
            ),
            AttackOutcome::AttributeInference(r) => format!(
                "attribute inference on {}: {} of {} classes gain more than {}",
                r.attribute,
                r.flagged().count(),
                r.classes.len(),
                r.threshold
            ),
            AttackOutcome::Downcoding(r) => format!(
                "downcoding recovery {:.4} over {} generalized cells ({} preimages)",
                r.recovery,
                r.cells.len(),
                r.preimages
            ),
            AttackOutcome::DpCheck(r) => format!(
                "empirical dp check {}: max log ratio {:.4} vs epsilon {} + {:.4}, {} trials, seed {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.max_log_ratio,
                r.epsilon,
                r.slack,
                r.trials,
                r.seed
            ),
            AttackOutcome::NotApplicable { attack, reason } => format!("{attack} not applicable: {reason}"),
        };
        let _ = writeln!(s, "ex-post      {line}");
    }
    let _ = writeln!(s, "utility      sse {:.6} (standardized {:.6})", utility.sse_raw, utility.sse_standardized);
    for (attr, d) in &utility.marginal_distance {
        let _ = writeln!(s, "             marginal distance {attr}: {d:.6}");
    }
    for q in &utility.workload {
        let _ = writeln!(s, "             query {}: error {:.6}", serde_json::to_string(&q.query).unwrap_or_default(), q.abs_error);
    }
    if budget.undefined.len() == budget.entries {
        let _ = writeln!(s, "budget       none: syntactic model without a composition rule");
    } else {
        let _ = writeln!(s, "budget       epsilon {} over {} entries", budget.epsilon, budget.entries);
    }
    if let Some(w) = &budget.warning {
        let _ = writeln!(s, "warning      {w}");
    }
    s
}

/// Re-runs one attack against an existing run directory, writes its report
/// and refreshes the summary and manifest.
pub fn attack_run(run_dir: &Path, name: AttackName, trials: Option<usize>, seed: Option<u64>) -> Result<AttackOutcome> {
    let mut cfg: RunConfig = serde_json::from_slice(&std::fs::read(run_dir.join("run_config.json"))?)?;
    cfg.output_dir = run_dir.to_path_buf();
    let inputs = Inputs::load(&cfg)?;
    let release = AnonymizedRelease::read(run_dir, "release")?;
    let seed = seed.unwrap_or_else(|| rng::derive_seed(cfg.seed, 100 + cfg.attacks.len() as u64));
    let outcome = execute_attack(name, &cfg, &inputs, &release, trials.unwrap_or(cfg.trials), seed)?;
    write_json(run_dir, &attack_file(name), &outcome)?;
    report(run_dir)?;
    Ok(outcome)
}

/// Rebuilds `summary.txt` and `manifest.json` from the artifacts in a run
/// directory.
pub fn report(run_dir: &Path) -> Result<String> {
    let mut cfg: RunConfig = serde_json::from_slice(&std::fs::read(run_dir.join("run_config.json"))?)?;
    cfg.output_dir = run_dir.to_path_buf();
    let inputs = Inputs::load(&cfg)?;
    let release = AnonymizedRelease::read(run_dir, "release")?;
    let mut attacks = Vec::new();
    for name in AttackName::ALL {
        let p = run_dir.join(attack_file(name));
        if p.is_file() {
            attacks.push(serde_json::from_slice(&std::fs::read(p)?)?);
        }
    }
    let utility: UtilityReport = serde_json::from_slice(&std::fs::read(run_dir.join("utility.json"))?)?;
    let budget = BudgetLedger::load(&run_dir.join("ledger.jsonl"))?.composed();
    let summary = summarize(&cfg, &release, inputs.original.n_rows(), &attacks, &utility, &budget);
    std::fs::write(run_dir.join("summary.txt"), &summary)?;
    write_manifest(run_dir, &cfg, &inputs.digests)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub linkage_rate: Option<f64>,
    pub sse_standardized: f64,
    pub max_marginal_distance: f64,
}

/// One run per parameter value, each in `<output_dir>/<param>=<value>`,
/// plus `sweep.csv` with the risk/utility frontier.
pub fn sweep(cfg: &RunConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut rows = Vec::new();
    for &v in values {
        let mut c = cfg.clone();
        c.mechanism.set_parameter(param, v)?;
        c.output_dir = cfg.output_dir.join(format!("{param}={v}"));
        if !c.attacks.contains(&AttackName::Linkage) {
            c.attacks.push(AttackName::Linkage);
        }
        let outcome = run(&c)?;
        let linkage_rate = outcome.attacks.iter().find_map(|a| match a {
            AttackOutcome::Linkage(r) => Some(r.rate),
            _ => None,
        });
        rows.push(SweepRow {
            parameter: param.to_string(),
            value: v,
            linkage_rate,
            sse_standardized: outcome.utility.sse_standardized,
            max_marginal_distance: outcome.utility.marginal_distance.values().copied().fold(0.0, f64::max),
        });
    }
    let mut w = csv::Writer::from_path(cfg.output_dir.join("sweep.csv")).map_err(|e| SdcError::Io(e.into()))?;
    for r in &rows {
        w.serialize(r).map_err(|e| SdcError::Io(e.into()))?;
    }
    w.flush()?;
    Ok(rows)
}

/// Exit status for an error: 2 when the privacy constraints cannot be met,
/// 1 otherwise.
pub fn exit_code(err: &SdcError) -> i32 {
    match err {
        SdcError::InFile { error, .. } => exit_code(error),
        SdcError::Infeasible { .. } | SdcError::Unsatisfiable(_) | SdcError::TooFewRows { .. } => 2,
        _ => 1,
    }
}

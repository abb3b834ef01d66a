//! Differential privacy: queries and their sensitivities, the Laplace
//! mechanism, the data-independent ε = 0 mechanism, DP microdata, metric DP,
//! individual (local) sensitivity, budget accounting, relaxation
//! conversions and an empirical density-ratio check.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{suppress_identifiers, AttributeSchema, MicrodataTable, Value};
use crate::error::{Result, SdcError};
use crate::release::{AnonymizedRelease, PrivacyParams, Provenance};
use crate::rng::{self, uniform01, SdcRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborModel {
    /// Neighbors differ by the presence of one record.
    #[default]
    AddRemove,
    /// Neighbors have the same size and differ in one record's values.
    Replace,
}

impl std::fmt::Display for NeighborModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NeighborModel::AddRemove => "add_remove",
            NeighborModel::Replace => "replace",
        })
    }
}

impl std::str::FromStr for NeighborModel {
    type Err = SdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "add_remove" => Ok(NeighborModel::AddRemove),
            "replace" => Ok(NeighborModel::Replace),
            other => Err(SdcError::InvalidParameter(format!("unknown neighbor model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub attribute: String,
    pub op: CmpOp,
    pub value: Value,
}

impl Predicate {
    fn matches(&self, v: &Value) -> bool {
        let o = v.cmp(&self.value);
        match self.op {
            CmpOp::Eq => o.is_eq(),
            CmpOp::Ne => o.is_ne(),
            CmpOp::Lt => o.is_lt(),
            CmpOp::Le => o.is_le(),
            CmpOp::Gt => o.is_gt(),
            CmpOp::Ge => o.is_ge(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Query {
    /// Records matching the predicate (all records when absent).
    Count {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        predicate: Option<Predicate>,
    },
    Sum { attribute: String },
    /// Mean over a dataset whose size `n` is public.
    Mean { attribute: String, n: usize },
    Max { attribute: String },
    /// The value of one record.
    Identity { row: usize, attribute: String },
}

impl Query {
    pub fn count() -> Self {
        Query::Count { predicate: None }
    }

    pub fn attribute(&self) -> Option<&str> {
        match self {
            Query::Count { .. } => None,
            Query::Sum { attribute }
            | Query::Mean { attribute, .. }
            | Query::Max { attribute }
            | Query::Identity { attribute, .. } => Some(attribute),
        }
    }

    /// Unprotected answer on `table`.
    pub fn evaluate(&self, table: &MicrodataTable) -> Result<f64> {
        match self {
            Query::Count { predicate: None } => Ok(table.n_rows() as f64),
            Query::Count { predicate: Some(p) } => {
                let c = table.column_index(&p.attribute)?;
                Ok(table.column(c).filter(|v| p.matches(v)).count() as f64)
            }
            Query::Sum { attribute } => Ok(numeric(table, attribute)?.iter().sum()),
            Query::Mean { attribute, .. } => {
                let xs = numeric(table, attribute)?;
                Ok(if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 })
            }
            Query::Max { attribute } => {
                let (lo, _) = bounds(table.schema(), attribute)?;
                Ok(numeric(table, attribute)?.into_iter().fold(lo, f64::max))
            }
            Query::Identity { row, attribute } => {
                let xs = numeric(table, attribute)?;
                xs.get(*row).copied().ok_or_else(|| {
                    SdcError::InvalidParameter(format!("row {row} out of range"))
                })
            }
        }
    }
}

fn numeric(table: &MicrodataTable, attribute: &str) -> Result<Vec<f64>> {
    table.numeric_column(table.column_index(attribute)?)
}

fn bounds(schema: &[AttributeSchema], attribute: &str) -> Result<(f64, f64)> {
    let a = schema
        .iter()
        .find(|a| a.name == attribute)
        .ok_or_else(|| SdcError::UnknownAttribute(attribute.to_string()))?;
    if !a.kind.is_numeric() {
        return Err(SdcError::NonNumeric(attribute.to_string()));
    }
    a.kind.bounds().ok_or_else(|| SdcError::UnboundedDomain(attribute.to_string()))
}

/// Worst-case change of the query answer between neighbors, over all
/// datasets drawn from the schema's domains.
pub fn global_sensitivity(query: &Query, schema: &[AttributeSchema], model: NeighborModel) -> Result<f64> {
    Ok(match query {
        Query::Count { .. } => 1.0,
        Query::Sum { attribute } => {
            let (lo, hi) = bounds(schema, attribute)?;
            match model {
                NeighborModel::AddRemove => lo.abs().max(hi.abs()),
                NeighborModel::Replace => hi - lo,
            }
        }
        Query::Mean { attribute, n } => {
            let (lo, hi) = bounds(schema, attribute)?;
            (hi - lo) / (*n).max(1) as f64
        }
        Query::Max { attribute } | Query::Identity { attribute, .. } => {
            let (lo, hi) = bounds(schema, attribute)?;
            hi - lo
        }
    })
}

/// Sensitivity over the neighbors of the actual table only (removing or
/// replacing one of its records). Never exceeds [`global_sensitivity`].
pub fn individual_dp_sensitivity(query: &Query, table: &MicrodataTable, model: NeighborModel) -> Result<f64> {
    let global = global_sensitivity(query, table.schema(), model)?;
    let local = match query {
        Query::Count { .. } => 1.0,
        Query::Sum { attribute } => {
            let (lo, hi) = bounds(table.schema(), attribute)?;
            let xs = numeric(table, attribute)?;
            match model {
                NeighborModel::AddRemove => xs.iter().map(|x| x.abs()).fold(0.0, f64::max),
                NeighborModel::Replace => xs.iter().map(|&x| (x - lo).max(hi - x)).fold(0.0, f64::max),
            }
        }
        Query::Mean { attribute, n } => {
            let (lo, hi) = bounds(table.schema(), attribute)?;
            let xs = numeric(table, attribute)?;
            xs.iter().map(|&x| (x - lo).max(hi - x)).fold(0.0, f64::max) / (*n).max(1) as f64
        }
        Query::Max { attribute } => {
            let (lo, hi) = bounds(table.schema(), attribute)?;
            let mut xs = numeric(table, attribute)?;
            xs.sort_by(|a, b| b.total_cmp(a));
            let top = xs.first().copied().unwrap_or(lo);
            let second = xs.get(1).copied().unwrap_or(lo);
            match model {
                NeighborModel::AddRemove => top - second,
                NeighborModel::Replace => (hi - top).max(top - second),
            }
        }
        Query::Identity { attribute, .. } => {
            let (lo, hi) = bounds(table.schema(), attribute)?;
            let x = query.evaluate(table)?;
            (x - lo).max(hi - x)
        }
    };
    Ok(local.min(global))
}

pub fn laplace_scale(sensitivity: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(SdcError::NonPositiveEpsilon(epsilon));
    }
    if !(sensitivity >= 0.0) {
        return Err(SdcError::InvalidParameter(format!("sensitivity must be >= 0, got {sensitivity}")));
    }
    Ok(sensitivity / epsilon)
}

/// Laplace(0, scale) by inverse CDF on a 53-bit uniform.
pub fn sample_laplace<R: RngCore + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    loop {
        let u = uniform01(rng) - 0.5;
        let tail = 1.0 - 2.0 * u.abs();
        if tail > 0.0 {
            return -scale * u.signum() * tail.ln();
        }
    }
}

/// `answer + Laplace(sensitivity / epsilon)`.
pub fn laplace_mechanism<R: RngCore + ?Sized>(
    true_answer: f64,
    sensitivity: f64,
    epsilon: f64,
    rng: &mut R,
) -> Result<f64> {
    let scale = laplace_scale(sensitivity, epsilon)?;
    Ok(true_answer + sample_laplace(rng, scale))
}

/// Output range of a query given schema bounds and a public bound on the
/// number of records. The flag is true for integer-valued outputs.
pub fn output_range(query: &Query, schema: &[AttributeSchema], max_records: usize) -> Result<(f64, f64, bool)> {
    let n = max_records as f64;
    Ok(match query {
        Query::Count { .. } => (0.0, n, true),
        Query::Sum { attribute } => {
            let (lo, hi) = bounds(schema, attribute)?;
            (n * lo.min(0.0), n * hi.max(0.0), false)
        }
        Query::Mean { attribute, .. } | Query::Max { attribute } | Query::Identity { attribute, .. } => {
            let (lo, hi) = bounds(schema, attribute)?;
            (lo, hi, false)
        }
    })
}

/// The ε = 0 mechanism: a uniform draw over the query's output range. The
/// data are never read, so every table yields the same output law.
pub fn perfect_secrecy_mechanism<R: RngCore + ?Sized>(
    query: &Query,
    schema: &[AttributeSchema],
    max_records: usize,
    rng: &mut R,
) -> Result<f64> {
    let (lo, hi, integer) = output_range(query, schema, max_records)?;
    let u = uniform01(rng);
    Ok(if integer { (lo + (u * (hi - lo + 1.0)).floor()).min(hi) } else { lo + u * (hi - lo) })
}

/// Masks every released cell with Laplace noise, as if answering one
/// identity query per cell. The budget is split evenly across attributes
/// (replace neighbors per record) and outputs are clamped to the domain.
pub fn dp_microdata_release(table: &MicrodataTable, epsilon: f64, seed: u64) -> Result<AnonymizedRelease> {
    if !(epsilon > 0.0) {
        return Err(SdcError::NonPositiveEpsilon(epsilon));
    }
    let released = suppress_identifiers(table);
    let widths: Vec<(f64, f64)> = released
        .schema()
        .iter()
        .map(|a| bounds(released.schema(), &a.name))
        .collect::<Result<_>>()?;
    let m = widths.len().max(1) as f64;
    let eps_cell = epsilon / m;
    let rows: Vec<Vec<Value>> = released
        .rows()
        .par_iter()
        .enumerate()
        .map(|(r, row)| {
            let mut rng = rng::stream(seed, r as u64);
            row.iter()
                .zip(&widths)
                .map(|(v, &(lo, hi))| {
                    let x = v.as_f64().unwrap_or(lo);
                    let noisy = x + sample_laplace(&mut rng, (hi - lo) / eps_cell);
                    Value::Num(noisy.clamp(lo, hi))
                })
                .collect()
        })
        .collect();
    let masked = released.rebuild(released.schema().to_vec(), rows)?;
    let provenance = Provenance::new("dp_microdata", PrivacyParams::with_epsilon(epsilon), Some(seed))
        .note("budget_split", "uniform per attribute")
        .note("epsilon_per_cell", eps_cell.to_string())
        .note("neighbor_model", NeighborModel::Replace.to_string());
    AnonymizedRelease::new(masked, None, provenance)
}

/// Metric-DP perturbation of a 1-D or 2-D point: densities at x and x'
/// differ by at most `exp(epsilon * |x - x'|)`. 1-D adds Laplace(1/ε); 2-D
/// uses the planar Laplace (uniform angle, Gamma(2, 1/ε) radius).
pub fn metric_dp_mechanism<R: RngCore + ?Sized>(point: &[f64], epsilon: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(epsilon > 0.0) {
        return Err(SdcError::NonPositiveEpsilon(epsilon));
    }
    match point {
        [x] => Ok(vec![x + sample_laplace(rng, 1.0 / epsilon)]),
        [x, y] => {
            let theta = 2.0 * std::f64::consts::PI * uniform01(rng);
            let mut open = || loop {
                let u = uniform01(rng);
                if u > 0.0 {
                    return u;
                }
            };
            let r = -(open().ln() + open().ln()) / epsilon;
            Ok(vec![x + r * theta.cos(), y + r * theta.sin()])
        }
        _ => Err(SdcError::InvalidParameter(format!("metric DP supports 1-D and 2-D points, got {}-D", point.len()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    #[default]
    Dp,
    /// Syntactic models have no composition rule; entries are recorded but
    /// excluded from the totals.
    KAnonymity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub mechanism: String,
    pub epsilon: f64,
    #[serde(default)]
    pub delta: f64,
    /// Entries sharing a tag ran on disjoint parts of the data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disjoint_group: Option<String>,
    #[serde(default)]
    pub family: ModelFamily,
}

impl LedgerEntry {
    pub fn dp(mechanism: &str, epsilon: f64, delta: f64) -> Self {
        Self { mechanism: mechanism.to_string(), epsilon, delta, disjoint_group: None, family: ModelFamily::Dp }
    }

    pub fn disjoint(mut self, group: &str) -> Self {
        self.disjoint_group = Some(group.to_string());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetStatus {
    /// ε ≤ 1.
    Meaningful,
    /// 1 < ε ≤ 10: the ex-ante guarantee alone is weak.
    EmpiricalCheckRequired,
    /// ε > 10.
    MostlyVoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub entries: usize,
    pub status: BudgetStatus,
    /// Mechanisms whose model has no composition rule.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undefined: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub const MEANINGFUL_EPSILON: f64 = 1.0;
pub const VOID_EPSILON: f64 = 10.0;

/// Append-only list of mechanism runs. Appends must be serialized by the
/// caller.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BudgetLedger {
    entries: Vec<LedgerEntry>,
}

impl BudgetLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Appends an entry and returns the composed budget.
    pub fn compose(&mut self, entry: LedgerEntry) -> Result<ComposedBudget> {
        if !(entry.epsilon >= 0.0) || entry.epsilon.is_infinite() {
            return Err(SdcError::InvalidParameter(format!("epsilon must be finite and >= 0, got {}", entry.epsilon)));
        }
        if !(0.0..1.0).contains(&entry.delta) {
            return Err(SdcError::InvalidDelta(entry.delta));
        }
        self.entries.push(entry);
        Ok(self.composed())
    }

    /// Sequential composition across entries; parallel composition (max)
    /// within each disjoint group.
    pub fn composed(&self) -> ComposedBudget {
        let mut epsilon = 0.0;
        let mut delta = 0.0;
        let mut groups: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
        let mut undefined = Vec::new();
        for e in &self.entries {
            if e.family == ModelFamily::KAnonymity {
                undefined.push(e.mechanism.clone());
                continue;
            }
            match &e.disjoint_group {
                Some(g) => {
                    let slot = groups.entry(g).or_insert((0.0, 0.0));
                    slot.0 = slot.0.max(e.epsilon);
                    slot.1 = slot.1.max(e.delta);
                }
                None => {
                    epsilon += e.epsilon;
                    delta += e.delta;
                }
            }
        }
        for (ge, gd) in groups.values() {
            epsilon += ge;
            delta += gd;
        }
        let status = if epsilon <= MEANINGFUL_EPSILON {
            BudgetStatus::Meaningful
        } else if epsilon <= VOID_EPSILON {
            BudgetStatus::EmpiricalCheckRequired
        } else {
            BudgetStatus::MostlyVoid
        };
        let warning = match status {
            BudgetStatus::Meaningful => None,
            BudgetStatus::EmpiricalCheckRequired => {
                Some(format!("epsilon = {epsilon}: guarantee weak, empirical check required"))
            }
            BudgetStatus::MostlyVoid => Some(format!("epsilon = {epsilon}: guarantee mostly void")),
        };
        ComposedBudget { epsilon, delta: delta.min(1.0), entries: self.entries.len(), status, undefined, warning }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut ledger = Self::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            ledger.compose(serde_json::from_str(line)?)?;
        }
        Ok(ledger)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::new());
        }
        Self::from_jsonl(&std::fs::read_to_string(path)?)
    }

    /// Appends one JSON line to `path` (created if missing).
    pub fn append_to(path: &Path, entry: &LedgerEntry) -> Result<()> {
        let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(f, "{}", serde_json::to_string(entry)?)?;
        Ok(())
    }
}

/// ε of (ε, δ)-DP implied by (α, ε_RDP)-Rényi DP:
/// `ε_RDP + ln(1/δ) / (α - 1)`.
pub fn rdp_to_dp(alpha: f64, eps_rdp: f64, delta: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(SdcError::InvalidAlpha(alpha));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SdcError::InvalidDelta(delta));
    }
    if !(eps_rdp >= 0.0) {
        return Err(SdcError::InvalidParameter(format!("RDP epsilon must be >= 0, got {eps_rdp}")));
    }
    Ok(eps_rdp + (1.0 / delta).ln() / (alpha - 1.0))
}

/// ε of (ε, δ)-DP implied by ρ-zCDP: `ρ + 2 sqrt(ρ ln(1/δ))`.
pub fn zcdp_to_dp(rho: f64, delta: f64) -> Result<f64> {
    if !(rho > 0.0) || rho.is_infinite() {
        return Err(SdcError::InvalidRho(rho));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SdcError::InvalidDelta(delta));
    }
    Ok(rho + 2.0 * (rho * (1.0 / delta).ln()).sqrt())
}

/// Whether two tables are neighbors under `model` (row ids ignored).
pub fn are_neighbors(a: &MicrodataTable, b: &MicrodataTable, model: NeighborModel) -> bool {
    if a.attribute_names() != b.attribute_names() {
        return false;
    }
    let mut diff: BTreeMap<&[Value], i64> = BTreeMap::new();
    for r in a.rows() {
        *diff.entry(r.as_slice()).or_default() += 1;
    }
    for r in b.rows() {
        *diff.entry(r.as_slice()).or_default() -= 1;
    }
    let plus: i64 = diff.values().filter(|&&d| d > 0).sum();
    let minus: i64 = -diff.values().filter(|&&d| d < 0).sum::<i64>();
    match model {
        NeighborModel::AddRemove => plus + minus == 1,
        NeighborModel::Replace => plus == 1 && minus == 1,
    }
}

/// A randomized scalar query answerer.
pub trait ScalarMechanism: Fn(&MicrodataTable, &mut SdcRng) -> Result<f64> + Sync {}
impl<F: Fn(&MicrodataTable, &mut SdcRng) -> Result<f64> + Sync> ScalarMechanism for F {}

/// Runs `mechanism` `trials` times on `table`, trial `i` drawing from
/// stream `i` of `seed`.
pub fn sample_outputs(mechanism: &impl ScalarMechanism, table: &MicrodataTable, trials: usize, seed: u64) -> Result<Vec<f64>> {
    (0..trials)
        .into_par_iter()
        .map(|i| mechanism(table, &mut rng::stream(seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDpReport {
    pub epsilon: f64,
    pub max_log_ratio: f64,
    pub slack: f64,
    pub bins: usize,
    pub bins_used: usize,
    pub trials: usize,
    pub seed: u64,
    pub pass: bool,
}

/// Bins with fewer than this many outputs from either table are ignored.
pub const MIN_BIN_COUNT: u64 = 25;
pub const DEFAULT_BINS: usize = 64;

/// Estimates the largest |log(P1(S)/P2(S))| over equal-width bins of the
/// pooled output range. PASS iff it is at most `epsilon + 3/sqrt(c)`, with
/// `c` the smallest per-table count among bins where both tables have at
/// least [`MIN_BIN_COUNT`] outputs.
#[allow(clippy::too_many_arguments)]
pub fn empirical_dp_check(
    mechanism: &impl ScalarMechanism,
    table1: &MicrodataTable,
    table2: &MicrodataTable,
    model: NeighborModel,
    epsilon: f64,
    bins: usize,
    trials: usize,
    seed: u64,
) -> Result<EmpiricalDpReport> {
    if !are_neighbors(table1, table2, model) {
        return Err(SdcError::NotNeighbors(model.to_string()));
    }
    if bins == 0 || trials == 0 {
        return Err(SdcError::InvalidParameter("bins and trials must be positive".into()));
    }
    let a = sample_outputs(mechanism, table1, trials, rng::derive_seed(seed, 1))?;
    let b = sample_outputs(mechanism, table2, trials, rng::derive_seed(seed, 2))?;
    let (ha, hb) = histogram_pair(&a, &b, bins);

    let mut max_log_ratio: f64 = 0.0;
    let mut min_count = u64::MAX;
    let mut bins_used = 0;
    for (&x, &y) in ha.iter().zip(&hb) {
        if x.min(y) < MIN_BIN_COUNT {
            continue;
        }
        bins_used += 1;
        min_count = min_count.min(x.min(y));
        max_log_ratio = max_log_ratio.max((x as f64 / y as f64).ln().abs());
    }
    let slack = if bins_used == 0 { f64::INFINITY } else { 3.0 * (1.0 / min_count as f64).sqrt() };
    Ok(EmpiricalDpReport {
        epsilon,
        max_log_ratio,
        slack,
        bins,
        bins_used,
        trials,
        seed,
        pass: bins_used > 0 && max_log_ratio <= epsilon + slack,
    })
}

/// Equal-width histograms of two samples over their pooled range.
pub fn histogram_pair(a: &[f64], b: &[f64], bins: usize) -> (Vec<u64>, Vec<u64>) {
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let bin = |x: f64| (((x - lo) / width) as usize).min(bins - 1);
    let mut ha = vec![0u64; bins];
    let mut hb = vec![0u64; bins];
    a.iter().for_each(|&x| ha[bin(x)] += 1);
    b.iter().for_each(|&x| hb[bin(x)] += 1);
    (ha, hb)
}

//! Attribute-disclosure models over anonymous classes: l-diversity,
//! t-closeness through the earth mover's distance, and class formation that
//! enforces them.


use serde::Serialize;

use crate::data::{MicrodataTable, Value};
use crate::distance::{Points, Standardizer};
use crate::error::{Result, SdcError};
use crate::kanon::mdav_partition;
use crate::release::{LVariant, Partition};

const MASS_TOLERANCE: f64 = 1e-9;

/// Probability mass over an ordered, duplicate-free support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    support: Vec<Value>,
    mass: Vec<f64>,
}

impl Distribution {
    pub fn new(support: Vec<Value>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() || support.is_empty() {
            return Err(SdcError::InvalidParameter("support and mass must be non-empty and aligned".into()));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SdcError::InvalidParameter("support must be sorted and duplicate-free".into()));
        }
        if mass.iter().any(|&m| !(m >= 0.0)) || (mass.iter().sum::<f64>() - 1.0).abs() > MASS_TOLERANCE {
            return Err(SdcError::InvalidParameter("masses must be >= 0 and sum to 1".into()));
        }
        Ok(Self { support, mass })
    }

    /// Empirical distribution of `values` over `support` (values outside
    /// the support are an error).
    pub fn empirical_over(values: &[Value], support: &[Value]) -> Result<Self> {
        if values.is_empty() {
            return Err(SdcError::EmptyClass);
        }
        let mut mass = vec![0.0; support.len()];
        for v in values {
            let i = support.binary_search(v).map_err(|_| SdcError::SupportMismatch)?;
            mass[i] += 1.0;
        }
        let n = values.len() as f64;
        mass.iter_mut().for_each(|m| *m /= n);
        Ok(Self { support: support.to_vec(), mass })
    }

    /// Empirical distribution over the distinct values present.
    pub fn empirical(values: &[Value]) -> Result<Self> {
        Self::empirical_over(values, &sorted_support(values))
    }

    pub fn support(&self) -> &[Value] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn prob(&self, v: &Value) -> f64 {
        self.support.binary_search(v).map_or(0.0, |i| self.mass[i])
    }
}

pub fn sorted_support(values: &[Value]) -> Vec<Value> {
    let mut s = values.to_vec();
    s.sort();
    s.dedup();
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundDistance {
    /// `|rank(i) - rank(j)| / (m - 1)` over the ordered support.
    OrderedNumeric,
    /// 0 on the diagonal, 1 elsewhere.
    CategoricalUniform,
}

impl GroundDistance {
    pub fn between(&self, i: usize, j: usize, m: usize) -> f64 {
        match self {
            GroundDistance::OrderedNumeric if m > 1 => i.abs_diff(j) as f64 / (m - 1) as f64,
            GroundDistance::OrderedNumeric => 0.0,
            GroundDistance::CategoricalUniform => f64::from(u8::from(i != j)),
        }
    }
}

/// Effective number of well-represented values in a class: the distinct
/// count, or `exp` of the Shannon entropy (natural log).
pub fn l_diversity(class_values: &[Value], variant: LVariant) -> Result<f64> {
    let d = Distribution::empirical(class_values)?;
    Ok(match variant {
        LVariant::Distinct => d.support.len() as f64,
        LVariant::Entropy => {
            let h: f64 = d.mass.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
            h.exp()
        }
    })
}

/// Earth mover's distance between two distributions on the same support.
///
/// Ordered supports use the one-dimensional closed form (sum of absolute
/// CDF differences times the rank step); the uniform categorical ground
/// distance reduces to total variation.
pub fn emd(p: &Distribution, q: &Distribution, d: GroundDistance) -> Result<f64> {
    if p.support != q.support {
        return Err(SdcError::SupportMismatch);
    }
    let m = p.support.len();
    let value = match d {
        GroundDistance::OrderedNumeric => {
            if m < 2 {
                return Ok(0.0);
            }
            let mut cdf_gap = 0.0;
            let mut total = 0.0;
            for i in 0..m - 1 {
                cdf_gap += p.mass[i] - q.mass[i];
                total += cdf_gap.abs();
            }
            total / (m - 1) as f64
        }
        GroundDistance::CategoricalUniform => {
            0.5 * p.mass.iter().zip(&q.mass).map(|(a, b)| (a - b).abs()).sum::<f64>()
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TClosenessReport {
    pub satisfied: bool,
    pub t: f64,
    pub distances: Vec<f64>,
    pub max_distance: f64,
}

/// Class-by-class EMD from the global distribution of `conf_attribute`.
pub fn verify_t_closeness(
    table: &MicrodataTable,
    partition: &Partition,
    conf_attribute: &str,
    t: f64,
    d: GroundDistance,
) -> Result<TClosenessReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(SdcError::InvalidParameter(format!("t must lie in [0, 1], got {t}")));
    }
    let c = table.column_index(conf_attribute)?;
    let all: Vec<Value> = table.column(c).cloned().collect();
    let support = sorted_support(&all);
    let global = Distribution::empirical_over(&all, &support)?;
    let distances = partition
        .groups
        .iter()
        .map(|g| {
            let vals: Vec<Value> = g.iter().map(|&r| table.row(r)[c].clone()).collect();
            emd(&Distribution::empirical_over(&vals, &support)?, &global, d)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    Ok(TClosenessReport { satisfied: max_distance <= t, t, distances, max_distance })
}

/// ε such that `exp(ε)` equals a multiplicative closeness factor. The
/// factor is not an EMD threshold; the two are not interchangeable.
pub fn closeness_to_dp_epsilon(multiplicative_t: f64) -> Result<f64> {
    if !(multiplicative_t >= 1.0) || multiplicative_t.is_infinite() {
        return Err(SdcError::InvalidT(multiplicative_t));
    }
    Ok(multiplicative_t.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constraints {
    pub k: usize,
    pub l: Option<(f64, LVariant)>,
    pub t: Option<f64>,
    pub distance: GroundDistance,
}

/// MDAV classes, then greedy merging of each violating class into the
/// class with the nearest centroid until every class has at least `k`
/// records, effective l-diversity of at least `l` and EMD at most `t`.
pub fn enforce_models<S: AsRef<str>>(
    table: &MicrodataTable,
    qi_attributes: &[S],
    conf_attribute: &str,
    constraints: &Constraints,
) -> Result<Partition> {
    if constraints.l.is_none() && constraints.t.is_none() {
        return Err(SdcError::InvalidParameter("at least one of l or t is required".into()));
    }
    let qcols = table.column_indices(qi_attributes)?;
    let c = table.column_index(conf_attribute)?;
    let all: Vec<Value> = table.column(c).cloned().collect();
    let support = sorted_support(&all);
    let global = Distribution::empirical_over(&all, &support)?;

    let violation = |group: &[usize]| -> Result<Option<String>> {
        if group.len() < constraints.k {
            return Ok(Some(format!("k = {}", constraints.k)));
        }
        let vals: Vec<Value> = group.iter().map(|&r| table.row(r)[c].clone()).collect();
        if let Some((l, variant)) = constraints.l {
            if l_diversity(&vals, variant)? < l - 1e-12 {
                return Ok(Some(format!("l = {l} ({variant:?} l-diversity)")));
            }
        }
        if let Some(t) = constraints.t {
            if emd(&Distribution::empirical_over(&vals, &support)?, &global, constraints.distance)? > t {
                return Ok(Some(format!("t = {t}")));
            }
        }
        Ok(None)
    };

    let whole: Vec<usize> = (0..table.n_rows()).collect();
    if let Some(constraint) = violation(&whole)? {
        return Err(SdcError::Infeasible { constraint });
    }

    let scale = Standardizer::fit(table, &qcols)?;
    let pts = Points::encode(table, &qcols, &scale);
    let mut groups = mdav_partition(table, &qcols, constraints.k.max(2).min(table.n_rows()))?.groups;

    loop {
        let mut bad = None;
        for (i, g) in groups.iter().enumerate() {
            if violation(g)?.is_some() {
                bad = Some(i);
                break;
            }
        }
        let Some(i) = bad else { break };
        let (num, cat) = pts.centroid(&groups[i]);
        let mut best = None;
        for (j, g) in groups.iter().enumerate() {
            if j == i {
                continue;
            }
            let (gn, gc) = pts.centroid(g);
            let d: f64 = num.iter().zip(&gn).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
                + cat.iter().zip(&gc).filter(|(a, b)| a != b).count() as f64;
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        // the whole table satisfies every constraint, so a lone violating
        // class cannot occur
        let (_, j) = best.expect("at least two classes");
        let merged = groups.remove(i.max(j));
        let target = i.min(j);
        groups[target].extend(merged);
        groups[target].sort_unstable();
    }
    Ok(Partition::new(groups))
}

/// Flags a class whose values span less than `threshold` of the global
/// range: diverse in count but semantically close.
pub fn similarity_alert(class_values: &[Value], global_values: &[Value], threshold: f64) -> Result<bool> {
    let nums = |vs: &[Value]| -> Result<Vec<f64>> {
        vs.iter()
            .map(|v| v.as_f64().ok_or_else(|| SdcError::NonNumeric(v.label().into_owned())))
            .collect()
    };
    let range = |xs: &[f64]| {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let class = nums(class_values)?;
    let global = nums(global_values)?;
    if class.is_empty() {
        return Err(SdcError::EmptyClass);
    }
    let g = range(&global);
    if !(g > 0.0) {
        return Ok(true);
    }
    Ok(range(&class) / g < threshold)
}

/// Default threshold for [`similarity_alert`].
pub const SIMILARITY_THRESHOLD: f64 = 0.1;

/// Per-class diversity and closeness summary for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassDiagnostics {
    pub class: usize,
    pub size: usize,
    pub distinct_l: f64,
    pub entropy_l: f64,
    pub emd: f64,
}

pub fn class_diagnostics(
    table: &MicrodataTable,
    partition: &Partition,
    conf_attribute: &str,
    d: GroundDistance,
) -> Result<Vec<ClassDiagnostics>> {
    let c = table.column_index(conf_attribute)?;
    let all: Vec<Value> = table.column(c).cloned().collect();
    let support = sorted_support(&all);
    let global = Distribution::empirical_over(&all, &support)?;
    partition
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let vals: Vec<Value> = g.iter().map(|&r| table.row(r)[c].clone()).collect();
            Ok(ClassDiagnostics {
                class: i,
                size: g.len(),
                distinct_l: l_diversity(&vals, LVariant::Distinct)?,
                entropy_l: l_diversity(&vals, LVariant::Entropy)?,
                emd: emd(&Distribution::empirical_over(&vals, &support)?, &global, d)?,
            })
        })
        .collect()
}

//! Information-loss measures between an original table and a release.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::data::{MicrodataTable, Role, Value};
use crate::dp::Query;
use crate::error::{Result, SdcError};
use crate::kanon::{sse, Units};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryError {
    pub query: Query,
    pub original: f64,
    pub released: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    /// Attributes the squared error is summed over.
    pub sse_attributes: Vec<String>,
    pub sse_raw: f64,
    pub sse_standardized: f64,
    /// Per attribute: total variation for categorical columns, Wasserstein-1
    /// divided by the domain width for numeric ones.
    pub marginal_distance: BTreeMap<String, f64>,
    pub workload: Vec<QueryError>,
}

/// Compares `release` with `original` on every non-identifier attribute the
/// two share. Rows are matched by row id for the squared error; marginals
/// are compared as multisets, so suppressed rows count as lost mass.
pub fn utility_report(original: &MicrodataTable, release: &MicrodataTable, workload: &[Query]) -> Result<UtilityReport> {
    let shared: Vec<(usize, usize)> = (0..original.n_attributes())
        .filter(|&c| original.schema()[c].role != Role::Identifier)
        .filter_map(|c| release.column_index(&original.schema()[c].name).ok().map(|rc| (c, rc)))
        .collect();
    if shared.is_empty() {
        return Err(SdcError::Misaligned("release shares no attributes with the original".into()));
    }
    let sse_attributes: Vec<String> = shared
        .iter()
        .map(|&(c, _)| original.schema()[c].name.clone())
        .collect();
    let sse_raw = sse(original, release, &sse_attributes, Units::Raw)?;
    let sse_standardized = sse(original, release, &sse_attributes, Units::Standardized)?;

    let mut marginal_distance = BTreeMap::new();
    for &(c, rc) in &shared {
        let a: Vec<&Value> = original.column(c).collect();
        let b: Vec<&Value> = release.column(rc).collect();
        let numeric = original.schema()[c].kind.is_numeric() && release.schema()[rc].kind.is_numeric();
        let d = if numeric {
            let xs: Vec<f64> = a.iter().filter_map(|v| v.as_f64()).collect();
            let ys: Vec<f64> = b.iter().filter_map(|v| v.as_f64()).collect();
            let width = match original.schema()[c].kind.bounds() {
                Some((lo, hi)) if hi > lo => hi - lo,
                _ => data_width(&xs).max(data_width(&ys)),
            };
            let w = wasserstein1(&xs, &ys);
            if width > 0.0 { w / width } else { w }
        } else {
            total_variation(&a, &b)
        };
        marginal_distance.insert(original.schema()[c].name.clone(), d);
    }

    let workload = workload
        .iter()
        .map(|q| {
            let (o, r) = (q.evaluate(original)?, q.evaluate(release)?);
            Ok(QueryError { query: q.clone(), original: o, released: r, abs_error: (o - r).abs() })
        })
        .collect::<Result<_>>()?;
    Ok(UtilityReport { sse_attributes, sse_raw, sse_standardized, marginal_distance, workload })
}

fn data_width(xs: &[f64]) -> f64 {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo { hi - lo } else { 0.0 }
}

/// Wasserstein-1 distance between two empirical distributions:
/// the integral of |F_a - F_b|.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { f64::INFINITY };
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    if xs == ys {
        return 0.0;
    }
    let mut points: Vec<f64> = xs.iter().chain(&ys).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    for w in points.windows(2) {
        while i < xs.len() && xs[i] <= w[0] {
            i += 1;
        }
        while j < ys.len() && ys[j] <= w[0] {
            j += 1;
        }
        let fa = i as f64 / xs.len() as f64;
        let fb = j as f64 / ys.len() as f64;
        total += (fa - fb).abs() * (w[1] - w[0]);
    }
    total
}

/// Total variation between the empirical distributions of two columns,
/// compared by value.
pub fn total_variation(a: &[&Value], b: &[&Value]) -> f64 {
    let mut mass: HashMap<&Value, (f64, f64)> = HashMap::new();
    for v in a {
        mass.entry(v).or_default().0 += 1.0 / a.len() as f64;
    }
    for v in b {
        mass.entry(v).or_default().1 += 1.0 / b.len() as f64;
    }
    let tv = 0.5 * mass.values().map(|(p, q)| (p - q).abs()).sum::<f64>();
    // exact zero when the multisets coincide
    if a.len() == b.len() && {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        x.sort();
        y.sort();
        x == y
    } {
        0.0
    } else {
        tv
    }
}

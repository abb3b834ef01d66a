//! Record distance over quasi-identifiers: Euclidean on z-scored numeric
//! attributes plus a 0/1 mismatch per categorical attribute.

use std::collections::BTreeMap;

use crate::data::{MicrodataTable, Value};
use crate::error::Result;

#[derive(Debug, Clone)]
enum Scale {
    Numeric { mean: f64, sd: f64 },
    Categorical,
}

/// Column scalings fitted on a reference table.
#[derive(Debug, Clone)]
pub struct Standardizer {
    scales: Vec<Scale>,
}

impl Standardizer {
    /// Fits means and population standard deviations of the given columns.
    /// Constant columns get `sd = 1` so they contribute raw differences.
    pub fn fit(table: &MicrodataTable, columns: &[usize]) -> Result<Self> {
        let scales = columns
            .iter()
            .map(|&c| {
                if table.schema()[c].kind.is_numeric() {
                    let xs = table.numeric_column(c)?;
                    let (mean, var) = mean_var(&xs);
                    let sd = var.sqrt();
                    Ok(Scale::Numeric { mean, sd: if sd > 0.0 { sd } else { 1.0 } })
                } else {
                    Ok(Scale::Categorical)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { scales })
    }

    pub fn sd(&self, i: usize) -> Option<f64> {
        match self.scales[i] {
            Scale::Numeric { sd, .. } => Some(sd),
            Scale::Categorical => None,
        }
    }

    pub fn z(&self, i: usize, x: f64) -> f64 {
        match self.scales[i] {
            Scale::Numeric { mean, sd } => (x - mean) / sd,
            Scale::Categorical => 0.0,
        }
    }
}

/// Population mean and variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Dense encoding of records: z-scores for numeric columns and integer codes
/// (assigned in value order) for categorical ones.
#[derive(Debug, Clone)]
pub struct Points {
    pub numeric: Vec<Vec<f64>>,
    pub categorical: Vec<Vec<u32>>,
}

impl Points {
    pub fn encode(table: &MicrodataTable, columns: &[usize], scale: &Standardizer) -> Self {
        let mut numeric = vec![Vec::new(); table.n_rows()];
        let mut categorical = vec![Vec::new(); table.n_rows()];
        for (i, &c) in columns.iter().enumerate() {
            if table.schema()[c].kind.is_numeric() {
                for (r, v) in table.column(c).enumerate() {
                    numeric[r].push(scale.z(i, v.as_f64().unwrap_or(0.0)));
                }
            } else {
                let codes: BTreeMap<&Value, u32> = {
                    let mut vals: Vec<&Value> = table.column(c).collect();
                    vals.sort();
                    vals.dedup();
                    vals.into_iter().enumerate().map(|(i, v)| (v, i as u32)).collect()
                };
                for (r, v) in table.column(c).enumerate() {
                    categorical[r].push(codes[v]);
                }
            }
        }
        Self { numeric, categorical }
    }

    pub fn len(&self) -> usize {
        self.numeric.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numeric.is_empty()
    }

    pub fn sq_dist(&self, a: usize, b: usize) -> f64 {
        sq_dist_parts(&self.numeric[a], &self.categorical[a], &self.numeric[b], &self.categorical[b])
    }

    /// Mean of numeric coordinates and lowest-code mode of categorical ones.
    pub fn centroid(&self, rows: &[usize]) -> (Vec<f64>, Vec<u32>) {
        let p = self.numeric.first().map_or(0, Vec::len);
        let q = self.categorical.first().map_or(0, Vec::len);
        let mut num = vec![0.0; p];
        for &r in rows {
            for (acc, x) in num.iter_mut().zip(&self.numeric[r]) {
                *acc += x;
            }
        }
        num.iter_mut().for_each(|x| *x /= rows.len() as f64);
        let cat = (0..q)
            .map(|j| {
                let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
                for &r in rows {
                    *counts.entry(self.categorical[r][j]).or_default() += 1;
                }
                // max count, then lowest code
                counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map_or(0, |(&c, _)| c)
            })
            .collect();
        (num, cat)
    }

    pub fn sq_dist_to(&self, a: usize, num: &[f64], cat: &[u32]) -> f64 {
        sq_dist_parts(&self.numeric[a], &self.categorical[a], num, cat)
    }
}

fn sq_dist_parts(an: &[f64], ac: &[u32], bn: &[f64], bc: &[u32]) -> f64 {
    let num: f64 = an.iter().zip(bn).map(|(x, y)| (x - y).powi(2)).sum();
    let cat = ac.iter().zip(bc).filter(|(x, y)| x != y).count() as f64;
    num + cat
}

//! Syntactic k-anonymity: the verifier, greedy global recoding with
//! suppression, exhaustive minimal generalization and MDAV microaggregation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::data::{suppress_identifiers, AttributeKind, MicrodataTable, Role, Value};
use crate::distance::{Points, Standardizer};
use crate::error::{Result, SdcError};
use crate::hierarchy::{Hierarchy, HierarchySet};
use crate::release::{
    AnonymizedRelease, GeneralizationScheme, Partition, PrivacyParams, Provenance, Recoding,
};

/// Exhaustive searches refuse to run beyond this many states.
pub const SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KAnonymityCheck {
    pub satisfied: bool,
    /// Multiplicity of every distinct quasi-identifier combination.
    pub multiplicities: BTreeMap<Vec<Value>, usize>,
}

impl KAnonymityCheck {
    pub fn offending(&self, k: usize) -> impl Iterator<Item = (&Vec<Value>, &usize)> {
        self.multiplicities.iter().filter(move |(_, &m)| m < k)
    }
}

pub fn verify_k_anonymity<S: AsRef<str>>(
    table: &MicrodataTable,
    qi_attributes: &[S],
    k: usize,
) -> Result<KAnonymityCheck> {
    if k == 0 {
        return Err(SdcError::InvalidParameter("k must be >= 1".into()));
    }
    if qi_attributes.is_empty() {
        return Err(SdcError::InvalidParameter("no quasi-identifiers given".into()));
    }
    let cols = table.column_indices(qi_attributes)?;
    let mut multiplicities: BTreeMap<Vec<Value>, usize> = BTreeMap::new();
    for row in table.rows() {
        *multiplicities.entry(cols.iter().map(|&c| row[c].clone()).collect()).or_default() += 1;
    }
    let satisfied = multiplicities.values().all(|&m| m >= k);
    Ok(KAnonymityCheck { satisfied, multiplicities })
}

/// Groups rows (by position) that share identical values on `cols`, in
/// order of first appearance.
pub fn equivalence_classes(table: &MicrodataTable, cols: &[usize]) -> Partition {
    let mut index: HashMap<Vec<&Value>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (r, row) in table.rows().iter().enumerate() {
        let key: Vec<&Value> = cols.iter().map(|&c| &row[c]).collect();
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(r);
    }
    Partition::new(groups)
}

/// Quasi-identifier columns of a table together with their hierarchies,
/// with every cell's label pre-computed at every level.
struct Lattice<'a> {
    names: Vec<String>,
    cols: Vec<usize>,
    hierarchies: Vec<&'a Hierarchy>,
    /// codes[q][level][row]
    codes: Vec<Vec<Vec<u32>>>,
    /// labels[q][level][row]
    labels: Vec<Vec<Vec<String>>>,
}

impl<'a> Lattice<'a> {
    fn build(table: &MicrodataTable, hierarchies: &'a HierarchySet) -> Result<Self> {
        let names = table.names_with_role(Role::QuasiIdentifier);
        if names.is_empty() {
            return Err(SdcError::InvalidParameter("table has no quasi-identifiers".into()));
        }
        let cols = table.column_indices(&names)?;
        let hs: Vec<&Hierarchy> = names
            .iter()
            .map(|n| hierarchies.get(n).ok_or_else(|| SdcError::HierarchyMissing(n.clone())))
            .collect::<Result<_>>()?;
        let mut codes = Vec::new();
        let mut labels = Vec::new();
        for (&c, h) in cols.iter().zip(&hs) {
            let mut per_level_codes = Vec::new();
            let mut per_level_labels = Vec::new();
            // codes are shared across levels so mixed-level cells compare by label
            let mut intern: HashMap<String, u32> = HashMap::new();
            for level in 0..=h.height() {
                let ls: Vec<String> = table
                    .column(c)
                    .map(|v| h.generalize(v, level).map(str::to_string))
                    .collect::<Result<_>>()?;
                let cs = ls
                    .iter()
                    .map(|l| {
                        let next = intern.len() as u32;
                        *intern.entry(l.clone()).or_insert(next)
                    })
                    .collect();
                per_level_codes.push(cs);
                per_level_labels.push(ls);
            }
            codes.push(per_level_codes);
            labels.push(per_level_labels);
        }
        Ok(Self { names, cols, hierarchies: hs, codes, labels })
    }

    fn n_qi(&self) -> usize {
        self.cols.len()
    }

    fn heights(&self) -> Vec<usize> {
        self.hierarchies.iter().map(|h| h.height()).collect()
    }

    /// Class sizes for a per-cell level assignment `level(row, q)`.
    fn class_sizes(&self, rows: &[usize], level: impl Fn(usize, usize) -> usize) -> Vec<usize> {
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        let keys: Vec<Vec<u32>> = rows
            .iter()
            .map(|&r| (0..self.n_qi()).map(|q| self.codes[q][level(r, q)][r]).collect())
            .collect();
        for key in &keys {
            *counts.entry(key.clone()).or_default() += 1;
        }
        keys.iter().map(|key| counts[key]).collect()
    }

    fn is_k_anonymous(&self, rows: &[usize], k: usize, level: impl Fn(usize, usize) -> usize) -> bool {
        self.class_sizes(rows, level).iter().all(|&s| s >= k)
    }

    fn release(
        &self,
        table: &MicrodataTable,
        keep: &[usize],
        level: impl Fn(usize, usize) -> usize,
        provenance: Provenance,
    ) -> Result<AnonymizedRelease> {
        let mut schema = table.schema().to_vec();
        for (q, &c) in self.cols.iter().enumerate() {
            schema[c] = self.hierarchies[q].generalized_schema(&schema[c]);
        }
        let rows: Vec<Vec<Value>> = keep
            .iter()
            .map(|&r| {
                let mut row = table.row(r).to_vec();
                for (q, &c) in self.cols.iter().enumerate() {
                    row[c] = Value::Text(self.labels[q][level(r, q)][r].clone());
                }
                row
            })
            .collect();
        let ids = keep.iter().map(|&r| table.row_ids()[r]).collect();
        let masked = MicrodataTable::with_row_ids(schema, rows, ids)?;
        let masked = suppress_identifiers(&masked);
        let qi_cols = masked.column_indices(&self.names)?;
        let partition = equivalence_classes(&masked, &qi_cols);
        AnonymizedRelease::new(masked, Some(partition), provenance)
    }
}

/// Greedy global recoding followed by suppression of residual violators.
///
/// Each step raises the quasi-identifier whose raise leaves the fewest rows
/// in classes smaller than `k` (ties: fewest distinct values at the current
/// level, then schema order). Stops once the violators fit the suppression
/// budget `floor(max_suppression_fraction * n)`.
pub fn anonymize_generalization(
    table: &MicrodataTable,
    hierarchies: &HierarchySet,
    k: usize,
    max_suppression_fraction: f64,
) -> Result<(AnonymizedRelease, GeneralizationScheme)> {
    if k == 0 {
        return Err(SdcError::InvalidParameter("k must be >= 1".into()));
    }
    if !(0.0..1.0).contains(&max_suppression_fraction) {
        return Err(SdcError::InvalidParameter("max_suppression_fraction must lie in [0, 1)".into()));
    }
    let lat = Lattice::build(table, hierarchies)?;
    let n = table.n_rows();
    let all: Vec<usize> = (0..n).collect();
    let budget = (max_suppression_fraction * n as f64 + 1e-9).floor() as usize;
    let heights = lat.heights();
    let mut levels = vec![0usize; lat.n_qi()];

    let violators = |levels: &[usize]| -> Vec<usize> {
        let sizes = lat.class_sizes(&all, |_, q| levels[q]);
        all.iter().copied().filter(|&r| sizes[r] < k).collect()
    };

    let suppressed = loop {
        let current = violators(&levels);
        if current.len() <= budget {
            break current;
        }
        let best = (0..lat.n_qi())
            .filter(|&q| levels[q] < heights[q])
            .map(|q| {
                let mut raised = levels.clone();
                raised[q] += 1;
                let distinct: BTreeSet<u32> = lat.codes[q][levels[q]].iter().copied().collect();
                (violators(&raised).len(), distinct.len(), q)
            })
            .min();
        match best {
            Some((_, _, q)) => levels[q] += 1,
            None => {
                return Err(SdcError::Unsatisfiable(format!(
                    "{} rows violate k = {k} at full generalization; suppression budget is {budget}",
                    current.len()
                )))
            }
        }
    };

    let removed: BTreeSet<usize> = suppressed.iter().copied().collect();
    let keep: Vec<usize> = all.iter().copied().filter(|r| !removed.contains(r)).collect();
    let scheme = GeneralizationScheme {
        recoding: Recoding::Global {
            levels: lat.names.iter().cloned().zip(levels.iter().copied()).collect(),
        },
        suppressed_rows: suppressed.iter().map(|&r| table.row_ids()[r]).collect(),
    };
    let mut provenance = Provenance::new("generalization", PrivacyParams::with_k(k), None)
        .note("max_suppression_fraction", max_suppression_fraction.to_string());
    provenance.scheme = Some(scheme.clone());
    let release = lat.release(table, &keep, |_, q| levels[q], provenance)?;
    Ok((release, scheme))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Minimality {
    /// Per-cell levels; no single cell may be lowered.
    #[default]
    Local,
    /// Per-attribute levels; no single attribute may be lowered.
    Global,
}

/// Exhaustive lattice search for the lexicographically first minimal
/// k-anonymous generalization. Desk scale only.
pub fn minimal_generalization(
    table: &MicrodataTable,
    hierarchies: &HierarchySet,
    k: usize,
    minimality: Minimality,
) -> Result<(AnonymizedRelease, GeneralizationScheme)> {
    if k == 0 {
        return Err(SdcError::InvalidParameter("k must be >= 1".into()));
    }
    let lat = Lattice::build(table, hierarchies)?;
    let n = table.n_rows();
    let q = lat.n_qi();
    let rows: Vec<usize> = (0..n).collect();
    let heights = lat.heights();

    // digit i of the odometer is cell (i / q, i % q) for local recoding,
    // attribute i for global recoding
    let radices: Vec<usize> = match minimality {
        Minimality::Local => (0..n * q).map(|i| heights[i % q] + 1).collect(),
        Minimality::Global => heights.iter().map(|h| h + 1).collect(),
    };
    let states = radices.iter().map(|&r| r as f64).product::<f64>();
    if states > SEARCH_LIMIT as f64 {
        return Err(SdcError::SearchSpaceTooLarge { states, limit: SEARCH_LIMIT });
    }
    let cell = |digits: &[usize], r: usize, a: usize| match minimality {
        Minimality::Local => digits[r * q + a],
        Minimality::Global => digits[a],
    };

    let mut digits = vec![0usize; radices.len()];
    let found = loop {
        if lat.is_k_anonymous(&rows, k, |r, a| cell(&digits, r, a))
            && is_minimal(&digits, |d| lat.is_k_anonymous(&rows, k, |r, a| cell(d, r, a)))
        {
            break Some(digits.clone());
        }
        if !odometer_step(&mut digits, &radices) {
            break None;
        }
    };
    let digits = found.ok_or_else(|| {
        SdcError::Unsatisfiable(format!("no generalization of {n} rows is {k}-anonymous"))
    })?;

    let recoding = match minimality {
        Minimality::Local => Recoding::Local {
            attributes: lat.names.clone(),
            levels: (0..n).map(|r| (0..q).map(|a| digits[r * q + a]).collect()).collect(),
        },
        Minimality::Global => Recoding::Global {
            levels: lat.names.iter().cloned().zip(digits.iter().copied()).collect(),
        },
    };
    let scheme = GeneralizationScheme { recoding, suppressed_rows: BTreeSet::new() };
    let mut provenance = Provenance::new(MINIMAL_MECHANISM, PrivacyParams::with_k(k), None).note(
        "minimality",
        match minimality {
            Minimality::Local => "local",
            Minimality::Global => "global",
        },
    );
    provenance.scheme = Some(scheme.clone());
    let release = lat.release(table, &rows, |r, a| cell(&digits, r, a), provenance)?;
    Ok((release, scheme))
}

pub const MINIMAL_MECHANISM: &str = "minimal_generalization";

/// True when no single digit can be lowered (to any smaller value) while
/// keeping `ok` satisfied.
pub(crate) fn is_minimal(digits: &[usize], ok: impl Fn(&[usize]) -> bool) -> bool {
    let mut trial = digits.to_vec();
    for i in 0..digits.len() {
        for lower in 0..digits[i] {
            trial[i] = lower;
            if ok(&trial) {
                return false;
            }
        }
        trial[i] = digits[i];
    }
    true
}

/// Advances a mixed-radix counter whose first digit is most significant.
/// Returns false after the last state.
pub(crate) fn odometer_step(digits: &mut [usize], radices: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// MDAV microaggregation over the given quasi-identifiers. Group sizes lie
/// in `[k, 2k-1]`; numeric quasi-identifiers are replaced by the group mean
/// and categorical ones by the group mode.
pub fn mdav_microaggregate<S: AsRef<str>>(
    table: &MicrodataTable,
    qi_attributes: &[S],
    k: usize,
) -> Result<(Partition, AnonymizedRelease)> {
    let cols = table.column_indices(qi_attributes)?;
    let partition = mdav_partition(table, &cols, k)?;
    let masked = aggregate(table, &cols, &partition)?;
    let release = AnonymizedRelease::new(
        suppress_identifiers(&masked),
        Some(partition.clone()),
        Provenance::new("mdav", PrivacyParams::with_k(k), None),
    )?;
    Ok((partition, release))
}

/// MDAV grouping only. Ties between equidistant records go to the lower
/// row position.
pub fn mdav_partition(table: &MicrodataTable, cols: &[usize], k: usize) -> Result<Partition> {
    if k < 2 {
        return Err(SdcError::InvalidParameter("MDAV needs k >= 2".into()));
    }
    let n = table.n_rows();
    if n < k {
        return Err(SdcError::TooFewRows { n, k });
    }
    let scale = Standardizer::fit(table, cols)?;
    let pts = Points::encode(table, cols, &scale);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut groups = Vec::new();

    let farthest_from_centroid = |rem: &[usize]| {
        let (num, cat) = pts.centroid(rem);
        argmax(rem, |i| pts.sq_dist_to(i, &num, &cat))
    };

    while remaining.len() >= 3 * k {
        let r = farthest_from_centroid(&remaining);
        let g1 = nearest(&pts, &remaining, r, k);
        remove_all(&mut remaining, &g1);
        let s = argmax(&remaining, |i| pts.sq_dist(i, r));
        let g2 = nearest(&pts, &remaining, s, k);
        remove_all(&mut remaining, &g2);
        groups.push(g1);
        groups.push(g2);
    }
    if remaining.len() >= 2 * k {
        let r = farthest_from_centroid(&remaining);
        let g = nearest(&pts, &remaining, r, k);
        remove_all(&mut remaining, &g);
        groups.push(g);
    }
    if !remaining.is_empty() {
        groups.push(remaining);
    }
    Ok(Partition::new(groups))
}

fn argmax(rows: &[usize], f: impl Fn(usize) -> f64) -> usize {
    let mut best = rows[0];
    let mut best_d = f64::NEG_INFINITY;
    for &i in rows {
        let d = f(i);
        // strict comparison keeps the lowest position on ties
        if d > best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// `k` rows of `rows` nearest to `center` (the center itself included).
fn nearest(pts: &Points, rows: &[usize], center: usize, k: usize) -> Vec<usize> {
    let mut by_dist: Vec<(f64, usize)> = rows.iter().map(|&i| (pts.sq_dist(i, center), i)).collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut g: Vec<usize> = by_dist.into_iter().take(k).map(|(_, i)| i).collect();
    g.sort_unstable();
    g
}

fn remove_all(rows: &mut Vec<usize>, taken: &[usize]) {
    rows.retain(|r| !taken.contains(r));
}

/// Replaces each group's quasi-identifier cells by the group mean (numeric)
/// or mode (categorical, ties to the smallest value).
pub(crate) fn aggregate(
    table: &MicrodataTable,
    cols: &[usize],
    partition: &Partition,
) -> Result<MicrodataTable> {
    let mut rows = table.rows().to_vec();
    for group in &partition.groups {
        for &c in cols {
            let value = match table.schema()[c].kind {
                AttributeKind::Numeric { min, max } => {
                    let sum: f64 = group.iter().map(|&r| table.row(r)[c].as_f64().unwrap_or(0.0)).sum();
                    Value::Num((sum / group.len() as f64).clamp(min, max))
                }
                AttributeKind::Categorical { .. } => {
                    let mut counts: BTreeMap<&Value, usize> = BTreeMap::new();
                    for &r in group {
                        *counts.entry(&table.row(r)[c]).or_default() += 1;
                    }
                    counts
                        .into_iter()
                        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
                        .map(|(v, _)| v.clone())
                        .expect("non-empty group")
                }
            };
            for &r in group {
                rows[r][c] = value.clone();
            }
        }
    }
    table.rebuild(table.schema().to_vec(), rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Raw,
    Standardized,
}

/// Sum of squared errors between original and masked quasi-identifiers.
/// Rows are matched by row id; categorical cells count 1 per mismatch
/// (compared by label, so generalized labels count as mismatches).
pub fn sse<S: AsRef<str>>(
    original: &MicrodataTable,
    release: &MicrodataTable,
    qi_attributes: &[S],
    units: Units,
) -> Result<f64> {
    let ocols = original.column_indices(qi_attributes)?;
    let rcols = release
        .column_indices(qi_attributes)
        .map_err(|e| SdcError::Misaligned(e.to_string()))?;
    let scale = Standardizer::fit(original, &ocols)?;
    let position: HashMap<u64, usize> =
        original.row_ids().iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut total = 0.0;
    for (r, row) in release.rows().iter().enumerate() {
        let id = release.row_ids()[r];
        let &o = position
            .get(&id)
            .ok_or_else(|| SdcError::Misaligned(format!("release row id {id} not in original")))?;
        for (i, (&oc, &rc)) in ocols.iter().zip(&rcols).enumerate() {
            let (a, b) = (&original.row(o)[oc], &row[rc]);
            total += match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => match units {
                    Units::Raw => (x - y).powi(2),
                    Units::Standardized => (scale.z(i, x) - scale.z(i, y)).powi(2),
                },
                _ => f64::from(u8::from(a.label() != b.label())),
            };
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::AttributeSchema;
    use crate::hierarchy::{IntervalSpec, LeafRange, TreeNode};

    fn numeric_table(values: &[f64]) -> MicrodataTable {
        MicrodataTable::new(
            vec![AttributeSchema::numeric("x", Role::QuasiIdentifier, -1e6, 1e6)],
            values.iter().map(|&v| vec![Value::Num(v)]).collect(),
        )
        .unwrap()
    }

    fn zip_table(zips: &[&str]) -> (MicrodataTable, HierarchySet) {
        let t = MicrodataTable::new(
            vec![
                AttributeSchema::categorical("zip", Role::QuasiIdentifier, &["43007", "43008", "08001"]),
                AttributeSchema::categorical("disease", Role::Confidential, &["flu", "hiv"]),
            ],
            zips.iter().map(|z| vec![Value::text(z), Value::text("flu")]).collect(),
        )
        .unwrap();
        let h = Hierarchy::from_tree(
            "zip",
            &TreeNode::node(
                "*",
                vec![
                    TreeNode::node("4300*", vec![TreeNode::leaf("43007"), TreeNode::leaf("43008")]),
                    TreeNode::node("0800*", vec![TreeNode::leaf("08001")]),
                ],
            ),
        )
        .unwrap();
        (t, HierarchySet::from([("zip".to_string(), h)]))
    }

    fn interval_set() -> HierarchySet {
        let spec = IntervalSpec {
            leaves: LeafRange { min: 1.0, max: 10.0, step: 1.0 },
            levels: vec![vec![5.0]],
        };
        HierarchySet::from([("x".to_string(), Hierarchy::from_intervals("x", &spec).unwrap())])
    }

    fn labels(release: &AnonymizedRelease, col: usize) -> Vec<String> {
        release.table().column(col).map(|v| v.label().into_owned()).collect()
    }

    #[test]
    fn verify_examples() {
        let t = numeric_table(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        assert!(verify_k_anonymity(&t, &["x"], 3).unwrap().satisfied);
        assert!(verify_k_anonymity(&t, &["x"], 1).unwrap().satisfied);

        let t = numeric_table(&[1.0, 1.0, 2.0]);
        let check = verify_k_anonymity(&t, &["x"], 2).unwrap();
        assert!(!check.satisfied);
        assert_eq!(check.multiplicities[&vec![Value::Num(2.0)]], 1);
        assert_eq!(check.offending(2).count(), 1);

        assert!(matches!(verify_k_anonymity(&t, &["y"], 2), Err(SdcError::UnknownAttribute(_))));
    }

    #[test]
    fn greedy_zip_instance() {
        // level 0: three singletons; level 1: {4300*,4300*,0800*} leaves one
        // violator; level 2: all "*"
        let (t, hs) = zip_table(&["43007", "43008", "08001"]);
        let (release, scheme) = anonymize_generalization(&t, &hs, 2, 0.0).unwrap();
        assert_eq!(labels(&release, 0), vec!["*", "*", "*"]);
        assert_eq!(scheme.recoding, Recoding::Global { levels: BTreeMap::from([("zip".into(), 2)]) });
        assert!(verify_k_anonymity(release.table(), &["zip"], 2).unwrap().satisfied);

        // with one suppression allowed the 08001 record is dropped at level 1
        let (release, scheme) = anonymize_generalization(&t, &hs, 2, 0.34).unwrap();
        assert_eq!(labels(&release, 0), vec!["4300*", "4300*"]);
        assert_eq!(scheme.suppressed_rows, BTreeSet::from([2]));
    }

    #[test]
    fn greedy_no_op_and_unsatisfiable() {
        let (t, hs) = zip_table(&["43007", "43007", "08001", "08001"]);
        let (release, scheme) = anonymize_generalization(&t, &hs, 2, 0.0).unwrap();
        assert!(scheme.is_identity());
        assert_eq!(labels(&release, 0), vec!["43007", "43007", "08001", "08001"]);

        let (t, hs) = zip_table(&["43007"]);
        assert!(matches!(anonymize_generalization(&t, &hs, 2, 0.0), Err(SdcError::Unsatisfiable(_))));
        assert!(matches!(
            anonymize_generalization(&t, &HierarchySet::new(), 2, 0.0),
            Err(SdcError::HierarchyMissing(_))
        ));
    }

    #[test]
    fn minimal_on_small_interval_instance() {
        // the lone 9 can only join others at the root, and then all three
        // must sit at the root; this is the only k-anonymous scheme
        let t = numeric_table(&[1.0, 1.0, 9.0]);
        let (release, scheme) = minimal_generalization(&t, &interval_set(), 2, Minimality::Local).unwrap();
        assert_eq!(labels(&release, 0), vec!["[1,10]"; 3]);
        assert_eq!(
            scheme.recoding,
            Recoding::Local { attributes: vec!["x".into()], levels: vec![vec![2], vec![2], vec![2]] }
        );
    }

    #[test]
    fn minimal_identity_cases() {
        let t = numeric_table(&[3.0, 3.0, 7.0, 7.0]);
        let (_, scheme) = minimal_generalization(&t, &interval_set(), 2, Minimality::Local).unwrap();
        assert!(scheme.is_identity());
        let t = numeric_table(&[4.0; 4]);
        for k in 1..=4 {
            let (_, scheme) = minimal_generalization(&t, &interval_set(), k, Minimality::Local).unwrap();
            assert!(scheme.is_identity());
        }
        let (_, scheme) = minimal_generalization(&t, &interval_set(), 2, Minimality::Global).unwrap();
        assert!(scheme.is_identity());
    }

    #[test]
    fn minimal_prefers_lexicographically_first_scheme() {
        let t = numeric_table(&[1.0, 2.0, 4.0, 3.0, 3.0]);
        let (release, _) = minimal_generalization(&t, &interval_set(), 2, Minimality::Local).unwrap();
        assert_eq!(labels(&release, 0), vec!["[1,5]", "[1,5]", "[1,5]", "3", "3"]);
    }

    #[test]
    fn minimal_search_guard() {
        let t = numeric_table(&[1.0; 14]);
        assert!(matches!(
            minimal_generalization(&t, &interval_set(), 2, Minimality::Local),
            Err(SdcError::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn mdav_seven_rows() {
        let t = numeric_table(&[1.0, 2.0, 3.0, 10.0, 11.0, 12.0, 30.0]);
        let (p, release) = mdav_microaggregate(&t, &["x"], 3).unwrap();
        let mut sizes = p.sizes();
        sizes.sort();
        assert_eq!(sizes, vec![3, 4]);
        assert!(verify_k_anonymity(release.table(), &["x"], 3).unwrap().satisfied);
    }

    #[test]
    fn mdav_four_points() {
        let t = numeric_table(&[1.0, 2.0, 9.0, 10.0]);
        let (p, release) = mdav_microaggregate(&t, &["x"], 2).unwrap();
        assert_eq!(p.groups, vec![vec![0, 1], vec![2, 3]]);
        let masked: Vec<f64> = release.table().column(0).map(|v| v.as_f64().unwrap()).collect();
        assert_eq!(masked, vec![1.5, 1.5, 9.5, 9.5]);
    }

    #[test]
    fn mdav_single_group_and_errors() {
        let t = numeric_table(&[5.0, 1.0, 4.0, 2.0, 3.0]);
        let (p, _) = mdav_microaggregate(&t, &["x"], 5).unwrap();
        assert_eq!(p.groups, vec![vec![0, 1, 2, 3, 4]]);
        assert!(matches!(mdav_microaggregate(&t, &["x"], 6), Err(SdcError::TooFewRows { n: 5, k: 6 })));
        assert!(mdav_microaggregate(&t, &["x"], 1).is_err());
    }

    #[test]
    fn mdav_categorical_mode() {
        let t = MicrodataTable::new(
            vec![
                AttributeSchema::numeric("age", Role::QuasiIdentifier, 0.0, 100.0),
                AttributeSchema::categorical("sex", Role::QuasiIdentifier, &["f", "m"]),
            ],
            vec![
                vec![Value::Num(20.0), Value::text("m")],
                vec![Value::Num(21.0), Value::text("f")],
                vec![Value::Num(22.0), Value::text("m")],
            ],
        )
        .unwrap();
        let (_, release) = mdav_microaggregate(&t, &["age", "sex"], 3).unwrap();
        assert!(release.table().column(1).all(|v| v == &Value::text("m")));
        assert!(release.table().column(0).all(|v| v == &Value::Num(21.0)));
    }

    #[test]
    fn sse_examples() {
        let t = numeric_table(&[1.0, 2.0, 9.0, 10.0]);
        assert_eq!(sse(&t, &t, &["x"], Units::Raw).unwrap(), 0.0);
        let (_, release) = mdav_microaggregate(&t, &["x"], 2).unwrap();
        assert!((sse(&t, release.table(), &["x"], Units::Raw).unwrap() - 1.0).abs() < 1e-12);

        // masking to the global mean gives n * population variance
        let mean = 5.5;
        let var = [1.0f64, 2.0, 9.0, 10.0].iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        let flat = numeric_table(&[mean; 4]);
        assert!((sse(&t, &flat, &["x"], Units::Raw).unwrap() - 4.0 * var).abs() < 1e-9);
        assert!((sse(&t, &flat, &["x"], Units::Standardized).unwrap() - 4.0).abs() < 1e-9);

        let short = numeric_table(&[1.0]).relabel_row_ids(vec![99]).unwrap();
        assert!(matches!(sse(&t, &short, &["x"], Units::Raw), Err(SdcError::Misaligned(_))));
    }
}

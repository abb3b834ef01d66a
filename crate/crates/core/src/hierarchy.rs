//! Value generalization hierarchies.
//!
//! Every hierarchy is a balanced rooted tree: leaves (level 0) are domain
//! values, the root (level `height`) covers the whole domain. Labels are
//! unique within a hierarchy so a released label identifies its node.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::data::{format_number, nfc, AttributeSchema, Value};
use crate::error::{Result, SdcError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(label: &str) -> Self {
        Self { label: label.to_string(), children: Vec::new() }
    }

    pub fn node(label: &str, children: Vec<TreeNode>) -> Self {
        Self { label: label.to_string(), children }
    }
}

/// Evenly spaced numeric leaves `min, min+step, ..., max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafRange {
    pub min: f64,
    pub max: f64,
    #[serde(default = "one")]
    pub step: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub leaves: LeafRange,
    /// Upper-inclusive breakpoints per level, finest first. Each level must
    /// drop breakpoints of the previous one; the root is appended.
    pub levels: Vec<Vec<f64>>,
}

/// On-disk form: either an explicit tree or an interval hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyFile {
    pub attribute: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<IntervalSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    attribute: String,
    labels: Vec<String>,
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    children: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
    height: usize,
}

impl Hierarchy {
    pub fn from_tree(attribute: &str, root: &TreeNode) -> Result<Self> {
        let mut h = Hierarchy {
            attribute: attribute.to_string(),
            labels: Vec::new(),
            parent: Vec::new(),
            level: Vec::new(),
            children: Vec::new(),
            index: HashMap::new(),
            height: 0,
        };
        let mut depth = Vec::new();
        let mut stack = vec![(root, None, 0usize)];
        while let Some((node, parent, d)) = stack.pop() {
            let label = nfc(&node.label);
            let id = h.labels.len();
            if h.index.insert(label.clone(), id).is_some() {
                return Err(SdcError::InvalidHierarchy(format!(
                    "`{attribute}`: label `{label}` appears more than once"
                )));
            }
            h.labels.push(label);
            h.parent.push(parent);
            h.children.push(Vec::new());
            depth.push(d);
            if let Some(p) = parent {
                h.children[p].push(id);
            }
            for child in node.children.iter().rev() {
                stack.push((child, Some(id), d + 1));
            }
        }
        let leaf_depths: Vec<usize> =
            (0..h.labels.len()).filter(|&i| h.children[i].is_empty()).map(|i| depth[i]).collect();
        let height = leaf_depths[0];
        if leaf_depths.iter().any(|&d| d != height) {
            return Err(SdcError::InvalidHierarchy(format!(
                "`{attribute}`: all leaves must sit at the same depth"
            )));
        }
        h.height = height;
        h.level = depth.iter().map(|d| height - d).collect();
        Ok(h)
    }

    /// Interval hierarchy over evenly spaced numeric leaves. Intervals are
    /// labelled `[lo,hi]` by their smallest and largest leaf.
    pub fn from_intervals(attribute: &str, spec: &IntervalSpec) -> Result<Self> {
        let LeafRange { min, max, step } = spec.leaves;
        if !(step > 0.0) || !(min <= max) || !min.is_finite() || !max.is_finite() {
            return Err(SdcError::InvalidHierarchy(format!("`{attribute}`: bad leaf range")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(SdcError::InvalidHierarchy(format!("`{attribute}`: too many leaves")));
        }
        let leaves: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();

        // groups[level] = list of (start, end) leaf index ranges, inclusive
        let mut levels: Vec<Vec<(usize, usize)>> = vec![(0..count).map(|i| (i, i)).collect()];
        let mut prev: Option<&Vec<f64>> = None;
        for cuts in &spec.levels {
            if let Some(p) = prev {
                if cuts.iter().any(|c| !p.contains(c)) || cuts.len() >= p.len() {
                    return Err(SdcError::InvalidHierarchy(format!(
                        "`{attribute}`: each level must strictly coarsen the previous one"
                    )));
                }
            }
            let mut sorted = cuts.clone();
            sorted.sort_by(f64::total_cmp);
            let mut ranges = Vec::new();
            let mut start = 0;
            for cut in sorted {
                let end = leaves.iter().rposition(|&x| x <= cut + 1e-9);
                match end {
                    Some(e) if e >= start && e + 1 < count => {
                        ranges.push((start, e));
                        start = e + 1;
                    }
                    _ => {
                        return Err(SdcError::InvalidHierarchy(format!(
                            "`{attribute}`: breakpoint {cut} does not split the leaves"
                        )))
                    }
                }
            }
            ranges.push((start, count - 1));
            levels.push(ranges);
            prev = Some(cuts);
        }
        if levels.last().map(|l| l.len()) != Some(1) {
            levels.push(vec![(0, count - 1)]);
        }

        let label = |(s, e): (usize, usize), leaf: bool| {
            if leaf {
                format_number(leaves[s])
            } else {
                format!("[{},{}]", format_number(leaves[s]), format_number(leaves[e]))
            }
        };
        fn build(
            levels: &[Vec<(usize, usize)>],
            lvl: usize,
            range: (usize, usize),
            label: &dyn Fn((usize, usize), bool) -> String,
        ) -> TreeNode {
            let children = if lvl == 0 {
                Vec::new()
            } else {
                levels[lvl - 1]
                    .iter()
                    .filter(|&&(s, e)| s >= range.0 && e <= range.1)
                    .map(|&r| build(levels, lvl - 1, r, label))
                    .collect()
            };
            TreeNode { label: label(range, lvl == 0), children }
        }
        let top = levels.len() - 1;
        let root = build(&levels, top, levels[top][0], &label);
        Self::from_tree(attribute, &root)
    }

    pub fn from_file(file: &HierarchyFile) -> Result<Self> {
        match (&file.tree, &file.intervals) {
            (Some(tree), None) => Self::from_tree(&file.attribute, tree),
            (None, Some(spec)) => Self::from_intervals(&file.attribute, spec),
            _ => Err(SdcError::InvalidHierarchy(format!(
                "`{}`: exactly one of `tree` or `intervals` must be given",
                file.attribute
            ))),
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Self::from_file(&serde_json::from_slice(bytes)?)
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn root(&self) -> &str {
        &self.labels[0]
    }

    pub fn is_leaf(&self, label: &str) -> bool {
        self.index.get(label).is_some_and(|&i| self.level[i] == 0)
    }

    pub fn level_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).map(|&i| self.level[i])
    }

    /// Ancestor of `value` at `level`; level 0 is the value itself.
    pub fn generalize(&self, value: &Value, level: usize) -> Result<&str> {
        self.generalize_label(&value.label(), level)
    }

    pub fn generalize_label(&self, leaf: &str, level: usize) -> Result<&str> {
        let mut node = self.leaf_id(leaf)?;
        if level > self.height {
            return Err(SdcError::LevelOutOfRange { level, height: self.height });
        }
        for _ in 0..level {
            node = self.parent[node].expect("balanced tree: non-root has a parent");
        }
        Ok(&self.labels[node])
    }

    /// Whether `node` equals or is an ancestor of the leaf `leaf`.
    pub fn covers(&self, node: &str, leaf: &str) -> bool {
        let (Some(&target), Ok(mut cur)) = (self.index.get(node), self.leaf_id(leaf)) else {
            return false;
        };
        loop {
            if cur == target {
                return true;
            }
            match self.parent[cur] {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Leaf labels under `node`, in tree order.
    pub fn leaves_under(&self, node: &str) -> Option<Vec<&str>> {
        let &start = self.index.get(node)?;
        let mut out = Vec::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if self.children[n].is_empty() {
                out.push(self.labels[n].as_str());
            }
            stack.extend(self.children[n].iter().rev());
        }
        Some(out)
    }

    pub fn leaves(&self) -> Vec<&str> {
        self.leaves_under(self.root()).unwrap_or_default()
    }

    /// Categorical schema over every node label, used for generalized columns.
    pub fn generalized_schema(&self, base: &AttributeSchema) -> AttributeSchema {
        AttributeSchema::categorical(&base.name, base.role, &self.labels)
    }

    fn leaf_id(&self, leaf: &str) -> Result<usize> {
        match self.index.get(leaf) {
            Some(&i) if self.level[i] == 0 => Ok(i),
            _ => Err(SdcError::UnknownValue {
                attribute: self.attribute.clone(),
                value: leaf.to_string(),
            }),
        }
    }
}

/// Hierarchies keyed by attribute name.
pub type HierarchySet = BTreeMap<String, Hierarchy>;

pub fn generalize_value(hierarchy: &Hierarchy, value: &Value, level: usize) -> Result<String> {
    hierarchy.generalize(value, level).map(str::to_string)
}

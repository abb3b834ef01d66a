//! Microdata tables, attribute roles and the CSV/JSON formats they travel in.
//!
//! A [`MicrodataTable`] is rectangular and every cell is validated against the
//! declared [`AttributeKind`] when the table is built. Tables are immutable;
//! every transformation returns a new table.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Result, SdcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Identifier,
    QuasiIdentifier,
    Confidential,
    NonConfidential,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    /// Bounds may be infinite when the domain is declared open (`null` in JSON).
    Numeric { min: f64, max: f64 },
    Categorical { values: Vec<String> },
}

impl AttributeKind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, AttributeKind::Numeric { .. })
    }

    /// Finite numeric bounds, if any.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            AttributeKind::Numeric { min, max } if min.is_finite() && max.is_finite() => {
                Some((*min, *max))
            }
            _ => None,
        }
    }

    fn admits(&self, value: &Value) -> bool {
        match (self, value) {
            (AttributeKind::Numeric { min, max }, Value::Num(x)) => {
                x.is_finite() && *x >= *min && *x <= *max
            }
            (AttributeKind::Categorical { values }, Value::Text(s)) => values.iter().any(|v| v == s),
            _ => false,
        }
    }

    fn parse(&self, raw: &str) -> Option<Value> {
        match self {
            AttributeKind::Numeric { .. } => raw.trim().parse::<f64>().ok().map(Value::Num),
            AttributeKind::Categorical { .. } => Some(Value::Text(nfc(raw))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSchema {
    pub name: String,
    pub role: Role,
    pub kind: AttributeKind,
}

impl AttributeSchema {
    pub fn numeric(name: &str, role: Role, min: f64, max: f64) -> Self {
        Self { name: name.to_string(), role, kind: AttributeKind::Numeric { min, max } }
    }

    pub fn categorical<S: AsRef<str>>(name: &str, role: Role, values: &[S]) -> Self {
        Self {
            name: name.to_string(),
            role,
            kind: AttributeKind::Categorical {
                values: values.iter().map(|v| nfc(v.as_ref())).collect(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            AttributeKind::Numeric { min, max } => {
                if min.is_nan() || max.is_nan() || min > max {
                    return Err(SdcError::InvalidSchema(format!(
                        "`{}`: numeric domain requires min <= max",
                        self.name
                    )));
                }
            }
            AttributeKind::Categorical { values } => {
                if values.is_empty() {
                    return Err(SdcError::InvalidSchema(format!(
                        "`{}`: categorical value set is empty",
                        self.name
                    )));
                }
                let mut seen = HashSet::new();
                for v in values {
                    if !seen.insert(v.as_str()) {
                        return Err(SdcError::InvalidSchema(format!(
                            "`{}`: duplicate categorical value `{v}`",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A single cell. Categorical text is stored NFC-normalized, so equality is
/// exact text match after normalization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    pub fn text(s: &str) -> Self {
        Value::Text(nfc(s))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(x) => Some(*x),
            Value::Text(_) => None,
        }
    }

    /// Canonical text form, also used as the leaf label in hierarchies.
    pub fn label(&self) -> Cow<'_, str> {
        match self {
            Value::Num(x) => Cow::Owned(format_number(*x)),
            Value::Text(s) => Cow::Borrowed(s),
        }
    }

    fn num_key(x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Num(a), Value::Num(b)) => Value::num_key(*a).total_cmp(&Value::num_key(*b)),
            (Value::Num(_), Value::Text(_)) => Ordering::Less,
            (Value::Text(_), Value::Num(_)) => Ordering::Greater,
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Num(x) => {
                0u8.hash(state);
                Value::num_key(*x).to_bits().hash(state);
            }
            Value::Text(s) => {
                1u8.hash(state);
                s.hash(state);
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

pub(crate) fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Rectangular table of validated records. `row_ids` identify individuals
/// across derived tables; they are never written to released files.
#[derive(Debug, Clone, PartialEq)]
pub struct MicrodataTable {
    schema: Vec<AttributeSchema>,
    rows: Vec<Vec<Value>>,
    row_ids: Vec<u64>,
}

impl MicrodataTable {
    /// Builds a table with row ids `0..n`.
    pub fn new(schema: Vec<AttributeSchema>, rows: Vec<Vec<Value>>) -> Result<Self> {
        let ids = (0..rows.len() as u64).collect();
        Self::with_row_ids(schema, rows, ids)
    }

    pub fn with_row_ids(
        schema: Vec<AttributeSchema>,
        rows: Vec<Vec<Value>>,
        row_ids: Vec<u64>,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for attr in &schema {
            attr.validate()?;
            if !names.insert(attr.name.as_str()) {
                return Err(SdcError::InvalidSchema(format!("duplicate attribute `{}`", attr.name)));
            }
        }
        if row_ids.len() != rows.len() {
            return Err(SdcError::Misaligned(format!(
                "{} row ids for {} rows",
                row_ids.len(),
                rows.len()
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(SdcError::MalformedCsv {
                    line: r as u64 + 2,
                    message: format!("expected {} fields, found {}", schema.len(), row.len()),
                });
            }
            for (attr, cell) in schema.iter().zip(row) {
                if !attr.kind.admits(cell) {
                    return Err(SdcError::DomainViolation { row: r, attribute: attr.name.clone() });
                }
            }
        }
        Ok(Self { schema, rows, row_ids })
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.len()
    }

    pub fn attribute_names(&self) -> Vec<&str> {
        self.schema.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| SdcError::UnknownAttribute(name.to_string()))
    }

    pub fn column_indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.column_index(n.as_ref())).collect()
    }

    pub fn attribute(&self, name: &str) -> Result<&AttributeSchema> {
        Ok(&self.schema[self.column_index(name)?])
    }

    pub fn names_with_role(&self, role: Role) -> Vec<String> {
        self.schema.iter().filter(|a| a.role == role).map(|a| a.name.clone()).collect()
    }

    pub fn column(&self, idx: usize) -> impl Iterator<Item = &Value> + '_ {
        self.rows.iter().map(move |r| &r[idx])
    }

    /// Numeric column as `f64`s; `NonNumeric` for categorical attributes.
    pub fn numeric_column(&self, idx: usize) -> Result<Vec<f64>> {
        if !self.schema[idx].kind.is_numeric() {
            return Err(SdcError::NonNumeric(self.schema[idx].name.clone()));
        }
        Ok(self.column(idx).map(|v| v.as_f64().unwrap_or(f64::NAN)).collect())
    }

    /// Row position of each row id.
    pub fn position_of(&self, row_id: u64) -> Option<usize> {
        self.row_ids.iter().position(|&r| r == row_id)
    }

    /// Keeps the listed rows (by position), in the given order.
    pub fn select_rows(&self, positions: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            rows: positions.iter().map(|&p| self.rows[p].clone()).collect(),
            row_ids: positions.iter().map(|&p| self.row_ids[p]).collect(),
        }
    }

    /// Keeps the listed columns (by position), in the given order.
    pub fn project(&self, columns: &[usize]) -> Self {
        Self {
            schema: columns.iter().map(|&c| self.schema[c].clone()).collect(),
            rows: self.rows.iter().map(|r| columns.iter().map(|&c| r[c].clone()).collect()).collect(),
            row_ids: self.row_ids.clone(),
        }
    }

    /// Replaces the schema and cells while keeping row ids; re-validates.
    pub fn rebuild(&self, schema: Vec<AttributeSchema>, rows: Vec<Vec<Value>>) -> Result<Self> {
        Self::with_row_ids(schema, rows, self.row_ids.clone())
    }

    pub fn relabel_row_ids(&self, row_ids: Vec<u64>) -> Result<Self> {
        Self::with_row_ids(self.schema.clone(), self.rows.clone(), row_ids)
    }

    /// RFC-4180 CSV with a header row. Row ids are not written.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| SdcError::MalformedCsv { line: 0, message: e.to_string() };
        w.write_record(self.schema.iter().map(|a| a.name.as_str())).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.label().into_owned())).map_err(io)?;
        }
        w.into_inner().map_err(|e| SdcError::Io(e.into_error()))
    }
}

/// Removes every identifier-role column. Idempotent.
pub fn suppress_identifiers(table: &MicrodataTable) -> MicrodataTable {
    let keep: Vec<usize> = table
        .schema()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.role != Role::Identifier)
        .map(|(i, _)| i)
        .collect();
    table.project(&keep)
}

/// Sidecar schema: attribute name → `{role, kind, domain}`.
///
/// `domain` is `[min, max]` for numeric attributes (either bound may be
/// `null` for an open domain) and the list of admissible values for
/// categorical ones.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchemaDescriptor {
    pub attributes: BTreeMap<String, AttributeDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub role: Role,
    pub kind: KindTag,
    pub domain: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    Numeric,
    Categorical,
}

impl SchemaDescriptor {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_schema(schema: &[AttributeSchema]) -> Self {
        let attributes = schema
            .iter()
            .map(|a| {
                let (kind, domain) = match &a.kind {
                    AttributeKind::Numeric { min, max } => {
                        let bound = |x: f64| {
                            if x.is_finite() {
                                serde_json::json!(x)
                            } else {
                                serde_json::Value::Null
                            }
                        };
                        (KindTag::Numeric, vec![bound(*min), bound(*max)])
                    }
                    AttributeKind::Categorical { values } => (
                        KindTag::Categorical,
                        values.iter().map(|v| serde_json::Value::String(v.clone())).collect(),
                    ),
                };
                (a.name.clone(), AttributeDecl { role: a.role, kind, domain })
            })
            .collect();
        Self { attributes }
    }

    pub fn attribute(&self, name: &str) -> Result<AttributeSchema> {
        let decl =
            self.attributes.get(name).ok_or_else(|| SdcError::MissingColumn(name.to_string()))?;
        let kind = match decl.kind {
            KindTag::Numeric => {
                let bound = |i: usize, open: f64| -> Result<f64> {
                    match decl.domain.get(i) {
                        Some(serde_json::Value::Null) => Ok(open),
                        Some(v) => v.as_f64().ok_or_else(|| {
                            SdcError::InvalidSchema(format!("`{name}`: non-numeric bound"))
                        }),
                        None => Err(SdcError::InvalidSchema(format!(
                            "`{name}`: numeric domain must be [min, max]"
                        ))),
                    }
                };
                if decl.domain.len() != 2 {
                    return Err(SdcError::InvalidSchema(format!(
                        "`{name}`: numeric domain must be [min, max]"
                    )));
                }
                AttributeKind::Numeric { min: bound(0, f64::NEG_INFINITY)?, max: bound(1, f64::INFINITY)? }
            }
            KindTag::Categorical => AttributeKind::Categorical {
                values: decl
                    .domain
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => nfc(s),
                        other => nfc(&other.to_string()),
                    })
                    .collect(),
            },
        };
        let attr = AttributeSchema { name: name.to_string(), role: decl.role, kind };
        attr.validate()?;
        Ok(attr)
    }
}

/// Parses a CSV table against a schema descriptor. Columns keep the header
/// order; row ids are `0..n` in file order. Empty cells are rejected.
pub fn load_table(csv_bytes: &[u8], schema: &SchemaDescriptor) -> Result<MicrodataTable> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(csv_bytes);
    let malformed = |e: csv::Error| SdcError::MalformedCsv {
        line: e.position().map(|p| p.line()).unwrap_or(0),
        message: e.to_string(),
    };
    let header: Vec<String> = reader.headers().map_err(malformed)?.iter().map(nfc).collect();

    for name in schema.attributes.keys() {
        if !header.iter().any(|h| h == name) {
            return Err(SdcError::MissingColumn(name.clone()));
        }
    }
    let attrs: Vec<AttributeSchema> = header
        .iter()
        .map(|h| {
            if schema.attributes.contains_key(h) {
                schema.attribute(h)
            } else {
                Err(SdcError::UnexpectedColumn(h.clone()))
            }
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(malformed)?;
        let mut row = Vec::with_capacity(attrs.len());
        for (attr, raw) in attrs.iter().zip(record.iter()) {
            if raw.trim().is_empty() {
                return Err(SdcError::MissingValue { row: r, attribute: attr.name.clone() });
            }
            let value = attr
                .kind
                .parse(raw)
                .filter(|v| attr.kind.admits(v))
                .ok_or_else(|| SdcError::DomainViolation { row: r, attribute: attr.name.clone() })?;
            row.push(value);
        }
        rows.push(row);
    }
    MicrodataTable::new(attrs, rows)
}

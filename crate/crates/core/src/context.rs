//! Formal contexts: the object/attribute/incidence triple every other module
//! consumes, plus Burmeister `.cxt` reading and writing.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContextError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("count mismatch: {0}")]
    CountMismatch(String),
    #[error("illegal character {found:?} in row {row}")]
    IllegalCharacter { row: usize, found: char },
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("empty name")]
    EmptyName,
    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("pair ({object}, {attribute}) is not in the incidence relation")]
    PairNotIncident { object: usize, attribute: usize },
    #[error("invalid JSON context: {0}")]
    Json(String),
}

/// An element `(g, m)` of `G × M`, addressed by declaration indices.
///
/// Ordering is lexicographic by `(object, attribute)`, which is the vertex
/// order of the incompatibility graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IncidencePair {
    pub object: usize,
    pub attribute: usize,
}

impl IncidencePair {
    pub const fn new(object: usize, attribute: usize) -> Self {
        Self { object, attribute }
    }
}

/// Which side of the context a derivation starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Objects,
    Attributes,
}

/// A formal context `(G, M, I)`.
///
/// Incidence is stored twice, as per-object attribute bitsets and per-attribute
/// object bitsets, so that both derivation operators are word-parallel
/// intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    title: Option<String>,
    objects: Vec<String>,
    attributes: Vec<String>,
    rows: Vec<FixedBitSet>,
    columns: Vec<FixedBitSet>,
}

impl FormalContext {
    /// Builds a context from names and a row-major incidence matrix.
    pub fn new(
        objects: Vec<String>,
        attributes: Vec<String>,
        incidence: Vec<Vec<bool>>,
    ) -> Result<Self, ContextError> {
        check_names(&objects)?;
        check_names(&attributes)?;
        if incidence.len() != objects.len() {
            return Err(ContextError::CountMismatch(format!(
                "{} rows for {} objects",
                incidence.len(),
                objects.len()
            )));
        }
        let mut rows = Vec::with_capacity(objects.len());
        for (g, row) in incidence.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(ContextError::CountMismatch(format!(
                    "row {} has {} entries, expected {}",
                    g + 1,
                    row.len(),
                    attributes.len()
                )));
            }
            let mut bits = FixedBitSet::with_capacity(attributes.len());
            for (m, &x) in row.iter().enumerate() {
                bits.set(m, x);
            }
            rows.push(bits);
        }
        Ok(Self::from_rows(None, objects, attributes, rows))
    }

    /// Builds a context with generated names `g1..` / `m1..` from a set of pairs.
    pub fn from_pairs(
        n_objects: usize,
        n_attributes: usize,
        pairs: impl IntoIterator<Item = IncidencePair>,
    ) -> Result<Self, ContextError> {
        let mut rows = vec![FixedBitSet::with_capacity(n_attributes); n_objects];
        for p in pairs {
            if p.object >= n_objects {
                return Err(ContextError::IndexOutOfRange { index: p.object, len: n_objects });
            }
            if p.attribute >= n_attributes {
                return Err(ContextError::IndexOutOfRange {
                    index: p.attribute,
                    len: n_attributes,
                });
            }
            rows[p.object].insert(p.attribute);
        }
        let objects = (1..=n_objects).map(|i| format!("g{i}")).collect();
        let attributes = (1..=n_attributes).map(|i| format!("m{i}")).collect();
        Ok(Self::from_rows(None, objects, attributes, rows))
    }

    fn from_rows(
        title: Option<String>,
        objects: Vec<String>,
        attributes: Vec<String>,
        rows: Vec<FixedBitSet>,
    ) -> Self {
        let mut columns = vec![FixedBitSet::with_capacity(objects.len()); attributes.len()];
        for (g, row) in rows.iter().enumerate() {
            for m in row.ones() {
                columns[m].insert(g);
            }
        }
        Self { title, objects, attributes, rows, columns }
    }

    /// Same names, different incidence.
    pub(crate) fn with_rows(&self, rows: Vec<FixedBitSet>) -> Self {
        Self::from_rows(self.title.clone(), self.objects.clone(), self.attributes.clone(), rows)
    }

    pub fn title(&self) -> Option<&str> {
        self.title.as_deref()
    }

    pub fn set_title(&mut self, title: Option<String>) {
        self.title = title.filter(|t| !t.trim().is_empty());
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    /// Looks up a pair by object and attribute name.
    pub fn pair(&self, object: &str, attribute: &str) -> Option<IncidencePair> {
        Some(IncidencePair::new(self.object_index(object)?, self.attribute_index(attribute)?))
    }

    pub fn has(&self, object: usize, attribute: usize) -> bool {
        self.rows[object].contains(attribute)
    }

    pub fn contains(&self, pair: IncidencePair) -> bool {
        pair.object < self.objects.len()
            && pair.attribute < self.attributes.len()
            && self.has(pair.object, pair.attribute)
    }

    /// Attribute set of one object.
    pub fn row(&self, object: usize) -> &FixedBitSet {
        &self.rows[object]
    }

    /// Object set of one attribute.
    pub fn column(&self, attribute: usize) -> &FixedBitSet {
        &self.columns[attribute]
    }

    pub fn incidence_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// All pairs of `I`, lexicographic by `(object, attribute)`.
    pub fn incidence(&self) -> Vec<IncidencePair> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(g, row)| row.ones().map(move |m| IncidencePair::new(g, m)))
            .collect()
    }

    pub fn incidence_set(&self) -> BTreeSet<IncidencePair> {
        self.incidence().into_iter().collect()
    }

    pub fn incidence_matrix(&self) -> Vec<Vec<bool>> {
        self.rows
            .iter()
            .map(|r| (0..self.attributes.len()).map(|m| r.contains(m)).collect())
            .collect()
    }

    /// `A'`: attributes shared by every object in `objects`.
    pub fn intent_of(&self, objects: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.attributes.len());
        out.insert_range(..);
        for g in objects.ones() {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    /// `B'`: objects having every attribute in `attributes`.
    pub fn extent_of(&self, attributes: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.objects.len());
        out.insert_range(..);
        for m in attributes.ones() {
            out.intersect_with(&self.columns[m]);
        }
        out
    }

    /// The derivation operator on index lists. Output is sorted ascending.
    pub fn derive(&self, side: Side, subset: &[usize]) -> Result<Vec<usize>, ContextError> {
        let len = match side {
            Side::Objects => self.objects.len(),
            Side::Attributes => self.attributes.len(),
        };
        let mut bits = FixedBitSet::with_capacity(len);
        for &i in subset {
            if i >= len {
                return Err(ContextError::IndexOutOfRange { index: i, len });
            }
            bits.insert(i);
        }
        let out = match side {
            Side::Objects => self.intent_of(&bits),
            Side::Attributes => self.extent_of(&bits),
        };
        Ok(out.ones().collect())
    }

    /// Same objects and attributes with every incidence entry negated.
    pub fn complement(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut c = r.clone();
                c.toggle_range(..);
                c
            })
            .collect();
        self.with_rows(rows)
    }

    /// `(M, G, I⁻¹)`.
    pub fn transpose(&self) -> Self {
        Self::from_rows(
            self.title.clone(),
            self.attributes.clone(),
            self.objects.clone(),
            self.columns.clone(),
        )
    }

    /// Deletes the given pairs from `I`. Every pair must currently be incident.
    pub fn remove_incidences<'a>(
        &self,
        pairs: impl IntoIterator<Item = &'a IncidencePair>,
    ) -> Result<Self, ContextError> {
        let mut rows = self.rows.clone();
        for p in pairs {
            if !self.contains(*p) {
                return Err(ContextError::PairNotIncident {
                    object: p.object,
                    attribute: p.attribute,
                });
            }
            rows[p.object].set(p.attribute, false);
        }
        Ok(self.with_rows(rows))
    }

    /// Keeps exactly the given pairs of `I`.
    pub fn restrict_to<'a>(
        &self,
        pairs: impl IntoIterator<Item = &'a IncidencePair>,
    ) -> Result<Self, ContextError> {
        let mut rows = vec![FixedBitSet::with_capacity(self.attributes.len()); self.objects.len()];
        for p in pairs {
            if !self.contains(*p) {
                return Err(ContextError::PairNotIncident {
                    object: p.object,
                    attribute: p.attribute,
                });
            }
            rows[p.object].insert(p.attribute);
        }
        Ok(self.with_rows(rows))
    }

    /// Human-readable `(object, attribute)` names for a pair.
    pub fn pair_names(&self, p: IncidencePair) -> (&str, &str) {
        (&self.objects[p.object], &self.attributes[p.attribute])
    }

    pub fn to_json(&self) -> String {
        let mirror = ContextJson {
            title: self.title.clone(),
            objects: self.objects.clone(),
            attributes: self.attributes.clone(),
            incidence: self
                .rows
                .iter()
                .map(|r| row_string(r, self.attributes.len()))
                .collect(),
        };
        serde_json::to_string_pretty(&mirror).expect("context serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ContextError> {
        let mirror: ContextJson =
            serde_json::from_str(text).map_err(|e| ContextError::Json(e.to_string()))?;
        let mut rows = Vec::with_capacity(mirror.incidence.len());
        for (g, line) in mirror.incidence.iter().enumerate() {
            rows.push(parse_row(line, g + 1)?);
        }
        let mut ctx = Self::new(mirror.objects, mirror.attributes, rows)?;
        ctx.set_title(mirror.title);
        Ok(ctx)
    }
}

/// JSON mirror of a `.cxt` file; incidence rows use the same `X`/`.` alphabet.
#[derive(Debug, Serialize, Deserialize)]
struct ContextJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    title: Option<String>,
    objects: Vec<String>,
    attributes: Vec<String>,
    incidence: Vec<String>,
}

fn check_names(names: &[String]) -> Result<(), ContextError> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if n.trim().is_empty() {
            return Err(ContextError::EmptyName);
        }
        if !seen.insert(n.as_str()) {
            return Err(ContextError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

fn row_string(row: &FixedBitSet, width: usize) -> String {
    (0..width).map(|m| if row.contains(m) { 'X' } else { '.' }).collect()
}

fn parse_row(line: &str, row: usize) -> Result<Vec<bool>, ContextError> {
    line.chars()
        .map(|c| match c {
            'X' | 'x' => Ok(true),
            '.' => Ok(false),
            found => Err(ContextError::IllegalCharacter { row, found }),
        })
        .collect()
}

fn parse_count(line: &str, what: &str) -> Result<usize, ContextError> {
    line.trim()
        .parse()
        .map_err(|_| ContextError::MalformedHeader(format!("expected {what} count, found {line:?}")))
}

/// Parses a Burmeister `.cxt` document.
///
/// Blank lines between sections are skipped, `x` is accepted as a cross and
/// a non-numeric line between `B` and the object count is taken as the title.
pub fn parse_cxt(text: &str) -> Result<FormalContext, ContextError> {
    let mut lines = text.lines().map(|l| l.trim_end()).filter(|l| !l.trim().is_empty());

    match lines.next() {
        Some(l) if l.trim() == "B" => {}
        other => {
            return Err(ContextError::MalformedHeader(format!(
                "expected \"B\", found {:?}",
                other.unwrap_or("")
            )))
        }
    }

    let first = lines
        .next()
        .ok_or_else(|| ContextError::MalformedHeader("missing object count".into()))?;
    let (title, n_objects) = match first.trim().parse::<usize>() {
        Ok(n) => (None, n),
        Err(_) => {
            let count = lines
                .next()
                .ok_or_else(|| ContextError::MalformedHeader("missing object count".into()))?;
            (Some(first.trim().to_string()), parse_count(count, "object")?)
        }
    };
    let n_attributes = parse_count(
        lines
            .next()
            .ok_or_else(|| ContextError::MalformedHeader("missing attribute count".into()))?,
        "attribute",
    )?;

    let mut take = |n: usize, what: &str| -> Result<Vec<String>, ContextError> {
        let got: Vec<String> = lines.by_ref().take(n).map(str::to_string).collect();
        if got.len() != n {
            return Err(ContextError::CountMismatch(format!(
                "expected {n} {what}, found {}",
                got.len()
            )));
        }
        Ok(got)
    };
    let objects = take(n_objects, "object names")?;
    let attributes = take(n_attributes, "attribute names")?;
    // Rows of a context without attributes are empty lines, which were skipped.
    let raw_rows = if n_attributes == 0 { Vec::new() } else { take(n_objects, "incidence rows")? };

    let extra = lines.count();
    if extra > 0 {
        return Err(ContextError::CountMismatch(format!("{extra} trailing lines")));
    }

    let mut incidence = Vec::with_capacity(n_objects);
    if n_attributes == 0 {
        incidence.resize(n_objects, Vec::new());
    } else {
        for (g, line) in raw_rows.iter().enumerate() {
            let row = parse_row(line.trim(), g + 1)?;
            if row.len() != n_attributes {
                return Err(ContextError::CountMismatch(format!(
                    "row {} has {} entries, expected {n_attributes}",
                    g + 1,
                    row.len()
                )));
            }
            incidence.push(row);
        }
    }

    let mut ctx = FormalContext::new(objects, attributes, incidence)?;
    ctx.set_title(title);
    Ok(ctx)
}

/// Writes a context in Burmeister format. A missing title is written as an
/// empty line.
pub fn serialize_cxt(ctx: &FormalContext) -> String {
    let mut out = String::new();
    out.push_str("B\n");
    out.push_str(ctx.title().unwrap_or(""));
    out.push('\n');
    let _ = writeln!(out, "{}", ctx.n_objects());
    let _ = writeln!(out, "{}", ctx.n_attributes());
    out.push('\n');
    for name in ctx.objects().iter().chain(ctx.attributes()) {
        out.push_str(name);
        out.push('\n');
    }
    for row in &ctx.rows {
        out.push_str(&row_string(row, ctx.n_attributes()));
        out.push('\n');
    }
    out
}

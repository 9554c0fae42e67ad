//! Cosine-ranked retrieval over a descriptor database.
//!
//! The database is a flat, immutable list of labeled descriptor vectors;
//! queries are scored by the cosine coefficient against every record (a
//! linear scan — exact and plenty at desk scale), sorted descending with a
//! deterministic id tie-break.

use std::collections::HashSet;

use crate::descriptor::{Descriptor, DescriptorMode};
use crate::error::{Error, Result};

/// Normalized inner product of two vectors.
///
/// For nonnegative inputs the result lies in `[0, 1]`; the tiny float excess
/// above 1 that can appear for near-parallel vectors is clamped away.
pub fn cosine_similarity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    let mut dot = 0.0;
    let mut pp = 0.0;
    let mut qq = 0.0;
    for (a, b) in p.iter().zip(q) {
        dot += a * b;
        pp += a * a;
        qq += b * b;
    }
    if pp == 0.0 || qq == 0.0 {
        return Err(Error::ZeroVector);
    }
    // sqrt(pp * qq) rather than sqrt(pp) * sqrt(qq): for p == q the
    // denominator is then sqrt(pp^2) == pp exactly, so self-similarity is
    // exactly 1.0.
    Ok((dot / (pp * qq).sqrt()).clamp(-1.0, 1.0))
}

/// One labeled database entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorRecord {
    /// Unique token; no tabs or newlines.
    pub id: String,
    /// Class token; no tabs or newlines.
    pub label: String,
    pub descriptor: Descriptor,
}

/// An ordered set of records sharing one grid size and descriptor mode.
#[derive(Debug, Clone)]
pub struct DescriptorDatabase {
    grid_n: usize,
    mode: DescriptorMode,
    records: Vec<DescriptorRecord>,
    ids: HashSet<String>,
}

impl DescriptorDatabase {
    pub fn new(grid_n: usize, mode: DescriptorMode) -> Self {
        Self {
            grid_n,
            mode,
            records: Vec::new(),
            ids: HashSet::new(),
        }
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn mode(&self) -> DescriptorMode {
        self.mode
    }

    /// Fixed descriptor length for this database.
    pub fn dim(&self) -> usize {
        self.grid_n - 1
    }

    pub fn records(&self) -> &[DescriptorRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Appends a record after checking id uniqueness and shape homogeneity.
    pub fn push(&mut self, record: DescriptorRecord) -> Result<()> {
        debug_assert!(
            !record.id.contains(['\t', '\n']) && !record.label.contains(['\t', '\n']),
            "ids and labels must not contain tabs or newlines"
        );
        if record.descriptor.mode != self.mode || record.descriptor.values.len() != self.dim() {
            return Err(Error::ModeMismatch {
                query_mode: record.descriptor.mode.to_string(),
                query_len: record.descriptor.values.len(),
                db_mode: self.mode.to_string(),
                db_len: self.dim(),
            });
        }
        if !self.ids.insert(record.id.clone()) {
            return Err(Error::DuplicateId(record.id));
        }
        self.records.push(record);
        Ok(())
    }

    /// Number of records carrying `label`.
    pub fn label_count(&self, label: &str) -> usize {
        self.records.iter().filter(|r| r.label == label).count()
    }
}

/// A scored database entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResult {
    pub id: String,
    pub label: String,
    /// Cosine score in `[0, 1]` for the nonnegative descriptors used here.
    pub score: f64,
    /// True when the record's descriptor had no direction (scored 0).
    pub zero_descriptor: bool,
}

/// Scores every record against the query, sorts by score descending with
/// ties broken by id ascending, and truncates to `top_k`.
///
/// Records whose descriptor is a zero vector are scored 0 and flagged
/// rather than failing the whole query.
pub fn rank(
    query: &Descriptor,
    db: &DescriptorDatabase,
    top_k: usize,
) -> Result<Vec<RankedResult>> {
    if query.mode != db.mode() || query.values.len() != db.dim() {
        return Err(Error::ModeMismatch {
            query_mode: query.mode.to_string(),
            query_len: query.values.len(),
            db_mode: db.mode().to_string(),
            db_len: db.dim(),
        });
    }
    let mut results: Vec<RankedResult> = db
        .records()
        .iter()
        .map(|r| {
            let (score, zero) = match cosine_similarity(&query.values, &r.descriptor.values) {
                Ok(s) => (s, false),
                Err(Error::ZeroVector) => (0.0, true),
                Err(e) => unreachable!("homogeneous database: {e}"),
            };
            RankedResult {
                id: r.id.clone(),
                label: r.label.clone(),
                score,
                zero_descriptor: zero,
            }
        })
        .collect();
    results.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| a.id.cmp(&b.id))
    });
    results.truncate(top_k);
    Ok(results)
}

/// Serializes a database: a `#shaperet-db v1` header line, then one
/// tab-separated record per line with comma-separated values at 17
/// significant digits (exact f64 round-trip). LF line endings.
pub fn save_db(db: &DescriptorDatabase) -> Vec<u8> {
    let mut out = format!("#shaperet-db v1 grid={} mode={}\n", db.grid_n(), db.mode());
    for r in db.records() {
        let values: Vec<String> = r
            .descriptor
            .values
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect();
        out.push_str(&r.id);
        out.push('\t');
        out.push_str(&r.label);
        out.push('\t');
        out.push_str(&values.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Parses a database stream written by [`save_db`].
pub fn load_db(bytes: &[u8]) -> Result<DescriptorDatabase> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| Error::BadHeader("database is not valid UTF-8".into()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::BadHeader("empty stream".into()))?;

    let rest = header
        .strip_prefix("#shaperet-db v1 ")
        .ok_or_else(|| Error::BadHeader(header.to_string()))?;
    let mut grid_n = None;
    let mut mode = None;
    for part in rest.split_whitespace() {
        if let Some(g) = part.strip_prefix("grid=") {
            grid_n = g.parse::<usize>().ok().filter(|&g| g >= 2);
        } else if let Some(m) = part.strip_prefix("mode=") {
            mode = m.parse::<DescriptorMode>().ok();
        }
    }
    let (grid_n, mode) = match (grid_n, mode) {
        (Some(g), Some(m)) => (g, m),
        _ => return Err(Error::BadHeader(header.to_string())),
    };

    let mut db = DescriptorDatabase::new(grid_n, mode);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (id, label, values) = match (fields.next(), fields.next(), fields.next(), fields.next())
        {
            (Some(id), Some(label), Some(values), None) => (id, label, values),
            (Some(id), ..) => {
                return Err(Error::RaggedRow {
                    id: id.to_string(),
                    got: 0,
                    expected: db.dim(),
                })
            }
            _ => continue,
        };
        let mut parsed = Vec::with_capacity(db.dim());
        for tok in values.split(',') {
            let v: f64 = tok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumericToken(tok.to_string()))?;
            parsed.push(v);
        }
        if parsed.len() != db.dim() {
            return Err(Error::RaggedRow {
                id: id.to_string(),
                got: parsed.len(),
                expected: db.dim(),
            });
        }
        db.push(DescriptorRecord {
            id: id.to_string(),
            label: label.to_string(),
            descriptor: Descriptor {
                mode,
                values: parsed,
                bandwidth: None,
            },
        })?;
    }
    Ok(db)
}

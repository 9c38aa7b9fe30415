//! Embedding persistence and similarity queries.
//!
//! Binary format: an ASCII header `<count> <dim>\n`, then per token the
//! surface bytes, one 0x20 space, and `dim` little-endian 4-byte IEEE-754
//! floats, with no record terminator. Text format: the same header line,
//! then one `surface v1 v2 ... vdim` line per token with floats printed
//! to six significant digits.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// Immutable set of token vectors, ordered by id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    surfaces: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f32>,
    dim: usize,
}

impl EmbeddingSet {
    /// Builds a set from surfaces in id order and a row-major vector
    /// table. Surfaces must be unique, non-empty and whitespace-free
    /// (otherwise they could not survive a serialization round trip).
    pub fn new(surfaces: Vec<String>, vectors: Vec<f32>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dim must be positive".into()));
        }
        if vectors.len() != surfaces.len() * dim {
            return Err(Error::InvalidConfig(format!(
                "vector table has {} values, expected {} x {}",
                vectors.len(),
                surfaces.len(),
                dim
            )));
        }
        let mut index = HashMap::with_capacity(surfaces.len());
        for (id, surface) in surfaces.iter().enumerate() {
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(Error::InvalidConfig(format!(
                    "surface {surface:?} is empty or contains whitespace"
                )));
            }
            if index.insert(surface.clone(), id).is_some() {
                return Err(Error::DuplicateSurface(surface.clone()));
            }
        }
        Ok(EmbeddingSet {
            surfaces,
            index,
            vectors,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn surfaces(&self) -> &[String] {
        &self.surfaces
    }

    pub fn id(&self, surface: &str) -> Option<usize> {
        self.index.get(surface).copied()
    }

    pub fn vector(&self, id: usize) -> &[f32] {
        &self.vectors[id * self.dim..(id + 1) * self.dim]
    }

    /// Vector lookup by surface.
    pub fn get(&self, surface: &str) -> Option<&[f32]> {
        self.id(surface).map(|id| self.vector(id))
    }

    pub fn write_binary<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        write!(writer, "{} {}\n", self.len(), self.dim)?;
        for id in 0..self.len() {
            writer.write_all(self.surfaces[id].as_bytes())?;
            writer.write_all(b" ")?;
            for value in self.vector(id) {
                writer.write_all(&value.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save_binary(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = std::io::BufWriter::new(file);
        self.write_binary(&mut writer).map_err(|e| Error::io(path, e))
    }

    /// Parses the binary format; the round trip through
    /// [`EmbeddingSet::write_binary`] is bit-exact on surfaces and
    /// vectors. Errors carry the byte offset of the defect.
    pub fn parse_binary(data: &[u8]) -> Result<Self> {
        let header_end = data
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| malformed(0, "missing header line"))?;
        let header = std::str::from_utf8(&data[..header_end])
            .map_err(|_| malformed(0, "header is not UTF-8"))?;
        let (count_str, dim_str) = header
            .split_once(' ')
            .ok_or_else(|| malformed(0, "header must be \"<count> <dim>\""))?;
        let count: usize = count_str
            .parse()
            .map_err(|_| malformed(0, format!("bad token count {count_str:?}")))?;
        let dim: usize = dim_str
            .parse()
            .map_err(|_| malformed(0, format!("bad dimension {dim_str:?}")))?;
        if dim == 0 {
            return Err(malformed(0, "dimension must be positive"));
        }
        let body = &data[header_end + 1..];
        // Each record is at least one surface byte, the space, and the
        // vector; reject head counts the file cannot possibly hold.
        let min_record = 2 + 4 * dim;
        if count
            .checked_mul(min_record)
            .map(|need| need > body.len())
            .unwrap_or(true)
        {
            return Err(truncated(
                data.len() as u64,
                format!("header claims {count} tokens of dim {dim}"),
            ));
        }

        let mut cursor = 0usize;
        let base = (header_end + 1) as u64;
        let mut surfaces = Vec::with_capacity(count);
        let mut index = HashMap::with_capacity(count);
        let mut vectors = Vec::with_capacity(count * dim);
        for _ in 0..count {
            let start = cursor;
            let space = body[cursor..]
                .iter()
                .position(|&b| b == b' ')
                .ok_or_else(|| truncated(base + cursor as u64, "surface missing trailing space"))?;
            let surface = std::str::from_utf8(&body[start..start + space])
                .map_err(|_| malformed(base + start as u64, "surface is not UTF-8"))?;
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(malformed(
                    base + start as u64,
                    format!("invalid surface {surface:?}"),
                ));
            }
            if index.insert(surface.to_string(), surfaces.len()).is_some() {
                return Err(malformed(
                    base + start as u64,
                    format!("duplicate surface {surface:?}"),
                ));
            }
            surfaces.push(surface.to_string());
            cursor += space + 1;
            let vector_end = cursor + 4 * dim;
            if vector_end > body.len() {
                return Err(truncated(base + cursor as u64, "vector cut short"));
            }
            for chunk in body[cursor..vector_end].chunks_exact(4) {
                vectors.push(f32::from_le_bytes(chunk.try_into().unwrap()));
            }
            cursor = vector_end;
        }
        if cursor != body.len() {
            return Err(malformed(base + cursor as u64, "trailing data after records"));
        }
        Ok(EmbeddingSet {
            surfaces,
            index,
            vectors,
            dim,
        })
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let data = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse_binary(&data)
    }

    pub fn write_text<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "{} {}", self.len(), self.dim)?;
        for id in 0..self.len() {
            write!(writer, "{}", self.surfaces[id])?;
            for value in self.vector(id) {
                write!(writer, " {:.5e}", value)?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    pub fn save_text(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = std::io::BufWriter::new(file);
        self.write_text(&mut writer).map_err(|e| Error::io(path, e))
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::TextFormat {
            line: 1,
            reason: "missing header line".into(),
        })?;
        let (count_str, dim_str) = header.split_once(' ').ok_or_else(|| Error::TextFormat {
            line: 1,
            reason: "header must be \"<count> <dim>\"".into(),
        })?;
        let count: usize = count_str.parse().map_err(|_| Error::TextFormat {
            line: 1,
            reason: format!("bad token count {count_str:?}"),
        })?;
        let dim: usize = dim_str.parse().map_err(|_| Error::TextFormat {
            line: 1,
            reason: format!("bad dimension {dim_str:?}"),
        })?;
        if dim == 0 {
            return Err(Error::TextFormat {
                line: 1,
                reason: "dimension must be positive".into(),
            });
        }
        // Every value needs at least two bytes of text; reject headers the
        // data cannot possibly satisfy before reserving capacity.
        if count
            .checked_mul(dim)
            .map(|values| values / 2 > text.len())
            .unwrap_or(true)
        {
            return Err(Error::TextFormat {
                line: 1,
                reason: format!("header claims {count} tokens of dim {dim} but the data cannot hold them"),
            });
        }
        let mut surfaces = Vec::with_capacity(count);
        let mut index = HashMap::with_capacity(count);
        let mut vectors = Vec::with_capacity(count * dim);
        for record in 0..count {
            let line_no = record + 2;
            let line = lines.next().ok_or_else(|| Error::TextFormat {
                line: line_no,
                reason: "fewer records than the header claims".into(),
            })?;
            let mut fields = line.split_whitespace();
            let surface = fields.next().ok_or_else(|| Error::TextFormat {
                line: line_no,
                reason: "empty record".into(),
            })?;
            if index.insert(surface.to_string(), surfaces.len()).is_some() {
                return Err(Error::TextFormat {
                    line: line_no,
                    reason: format!("duplicate surface {surface:?}"),
                });
            }
            surfaces.push(surface.to_string());
            let mut parsed = 0usize;
            for field in fields {
                let value: f32 = field.parse().map_err(|_| Error::TextFormat {
                    line: line_no,
                    reason: format!("bad float {field:?}"),
                })?;
                vectors.push(value);
                parsed += 1;
            }
            if parsed != dim {
                return Err(Error::TextFormat {
                    line: line_no,
                    reason: format!("expected {dim} values, found {parsed}"),
                });
            }
        }
        if lines.next().is_some() {
            return Err(Error::TextFormat {
                line: count + 2,
                reason: "trailing data after records".into(),
            });
        }
        Ok(EmbeddingSet {
            surfaces,
            index,
            vectors,
            dim,
        })
    }

    pub fn load_text(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text)
    }

    /// Union of two sets; on a surface collision the overlay's vector
    /// wins. Base order is preserved, overlay-only surfaces follow in
    /// overlay order.
    pub fn merge(base: &EmbeddingSet, overlay: &EmbeddingSet) -> Result<EmbeddingSet> {
        if base.dim != overlay.dim {
            return Err(Error::DimMismatch {
                left: base.dim,
                right: overlay.dim,
            });
        }
        let mut surfaces = base.surfaces.clone();
        let mut index = base.index.clone();
        let mut vectors = base.vectors.clone();
        for (id, surface) in overlay.surfaces.iter().enumerate() {
            match index.get(surface) {
                Some(&existing) => {
                    vectors[existing * base.dim..(existing + 1) * base.dim]
                        .copy_from_slice(overlay.vector(id));
                }
                None => {
                    index.insert(surface.clone(), surfaces.len());
                    surfaces.push(surface.clone());
                    vectors.extend_from_slice(overlay.vector(id));
                }
            }
        }
        Ok(EmbeddingSet {
            surfaces,
            index,
            vectors,
            dim: base.dim,
        })
    }
}

fn malformed(offset: u64, reason: impl Into<String>) -> Error {
    Error::BinaryFormat {
        offset,
        reason: reason.into(),
    }
}

fn truncated(offset: u64, reason: impl Into<String>) -> Error {
    Error::BinaryFormat {
        offset,
        reason: format!("truncated: {}", reason.into()),
    }
}

/// Cosine similarity `a.b / (|a||b|)`, clamped into `[-1, 1]`.
pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut dot = 0.0f64;
    let mut norm_a = 0.0f64;
    let mut norm_b = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        dot += x as f64 * y as f64;
        norm_a += x as f64 * x as f64;
        norm_b += y as f64 * y as f64;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (norm_a.sqrt() * norm_b.sqrt())).clamp(-1.0, 1.0))
}

/// The `k` highest-cosine tokens for `query`, excluding the query itself,
/// in descending cosine order with ties broken lexicographically.
/// Zero-norm rows are skipped (their similarity is undefined). An absent
/// query reports the nearest spellings by edit distance.
pub fn most_similar(
    set: &EmbeddingSet,
    query: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let query_id = set.id(query).ok_or_else(|| Error::QueryNotFound {
        query: query.to_string(),
        suggestions: nearest_spellings(set, query, 5),
    })?;
    let query_vector = set.vector(query_id);
    if query_vector.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroVector);
    }
    let mut scored: Vec<(String, f64)> = Vec::with_capacity(set.len().saturating_sub(1));
    for id in 0..set.len() {
        if id == query_id {
            continue;
        }
        let candidate = set.vector(id);
        if candidate.iter().all(|&x| x == 0.0) {
            continue;
        }
        let score = cosine(query_vector, candidate)?;
        scored.push((set.surfaces[id].clone(), score));
    }
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cosine never produces NaN")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(scored)
}

fn nearest_spellings(set: &EmbeddingSet, query: &str, k: usize) -> Vec<String> {
    let mut ranked: Vec<(usize, &String)> = set
        .surfaces
        .iter()
        .map(|s| (levenshtein(query, s), s))
        .collect();
    ranked.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    ranked.into_iter().take(k).map(|(_, s)| s.clone()).collect()
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut previous = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let substitute = previous + usize::from(ca != cb);
            previous = row[j + 1];
            row[j + 1] = substitute.min(previous + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}

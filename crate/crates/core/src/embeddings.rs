//! Word vectors in GloVe text format and exact cosine nearest-neighbor search.
//!
//! The text format is one word per line followed by its space-separated
//! components, without a header:
//!
//! ```text
//! good 0.12 -0.40 0.33
//! great 0.10 -0.38 0.35
//! ```
//!
//! Rows are stored as `f32` (the precision of the distributed files); every
//! similarity is computed in `f64`. Row norms are computed once at load time.
//!
//! # Binary cache
//!
//! Large tables can be cached in a little-endian binary file tied to the
//! checksum of the text file it was built from:
//!
//! | field          | encoding                                   |
//! |----------------|--------------------------------------------|
//! | magic          | 8 bytes, `EMBCACHE`                        |
//! | version        | `u32`, currently 1                         |
//! | source digest  | 32 bytes, SHA-256 of the source text file  |
//! | dim            | `u32`                                      |
//! | count          | `u32`                                      |
//! | vocab block    | `count` × (`u32` byte length, UTF-8 bytes) |
//! | matrix         | `count × dim` `f32`, row-major             |
//!
//! A cache whose digest does not match the current source file is ignored and
//! rebuilt.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const CACHE_MAGIC: &[u8; 8] = b"EMBCACHE";
const CACHE_VERSION: u32 = 1;
/// Rows per parallel scan chunk.
const SCAN_CHUNK: usize = 4096;

/// A similar word and its cosine similarity to the query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Parse lines on the rayon pool. The result is identical to a serial load.
    pub parallel: bool,
}

/// Read-only word → vector table.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vocab: HashMap<String, usize>,
    data: Vec<f32>,
    norms: Vec<f64>,
    /// Unit rows in f64, present only in normalized-matrix mode.
    unit_rows: Option<Vec<f64>>,
}

impl PartialEq for EmbeddingTable {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.words == other.words && self.data == other.data
    }
}

impl EmbeddingTable {
    /// Builds a table from parallel word and row lists. Duplicate words keep
    /// their first row.
    pub fn from_rows(words: Vec<String>, rows: Vec<Vec<f32>>) -> Result<Self> {
        if words.len() != rows.len() {
            return Err(Error::Config(format!(
                "{} words but {} rows",
                words.len(),
                rows.len()
            )));
        }
        let dim = match rows.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => {
                return Err(Error::Config(
                    "embedding table needs at least one non-empty row".into(),
                ))
            }
        };
        let mut builder = Builder::new(dim);
        for (i, (word, row)) in words.into_iter().zip(rows).enumerate() {
            if row.len() != dim {
                return Err(Error::Config(format!(
                    "row {i} has {} components, expected {dim}",
                    row.len()
                )));
            }
            builder.push(word, &row, i + 1);
        }
        Ok(builder.finish())
    }

    /// Reads GloVe text from any buffered reader. `origin` only labels errors.
    pub fn read_text<R: BufRead>(reader: R, origin: &Path, options: LoadOptions) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::read(origin, e))?;
            if !line.trim().is_empty() {
                lines.push((i + 1, line));
            }
        }
        if lines.is_empty() {
            return Err(Error::InvalidFile {
                path: origin.to_path_buf(),
                message: "embedding file is empty".into(),
            });
        }
        let parse = |(no, line): &(usize, String)| parse_line(line).map(|p| (*no, p));
        let parsed: Vec<_> = if options.parallel {
            lines.par_iter().map(parse).collect()
        } else {
            lines.iter().map(parse).collect()
        };

        let malformed = |line: usize, message: String| Error::Malformed {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut builder: Option<Builder> = None;
        for (result, (line_no, _)) in parsed.into_iter().zip(&lines) {
            let (line_no, (word, row)) = result.map_err(|m| malformed(*line_no, m))?;
            let b = builder.get_or_insert_with(|| Builder::new(row.len()));
            if row.len() != b.dim {
                return Err(malformed(
                    line_no,
                    format!("expected {} components, found {}", b.dim, row.len()),
                ));
            }
            b.push(word, &row, line_no);
        }
        Ok(builder.expect("non-empty input").finish())
    }

    pub fn load(path: impl AsRef<Path>, options: LoadOptions) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::read(path, e))?;
        Self::read_text(BufReader::new(file), path, options)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.vocab.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vocab.contains_key(word)
    }

    pub fn row(&self, index: usize) -> &[f32] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    /// Exact, case-sensitive lookup.
    pub fn lookup(&self, word: &str) -> Option<&[f32]> {
        self.index_of(word).map(|i| self.row(i))
    }

    /// Euclidean norm of a row, computed at load time.
    pub fn norm(&self, index: usize) -> f64 {
        self.norms[index]
    }

    pub fn zero_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.norms
            .iter()
            .enumerate()
            .filter(|(_, n)| **n == 0.0)
            .map(|(i, _)| i)
    }

    /// Switches queries to a precomputed unit-row `f64` matrix, trading
    /// `8 × dim` bytes per word for one multiply-add per component.
    pub fn with_normalized_rows(mut self) -> Self {
        let mut unit = vec![0.0f64; self.data.len()];
        for i in 0..self.len() {
            let n = self.norms[i];
            if n > 0.0 {
                for (u, &x) in unit[i * self.dim..(i + 1) * self.dim]
                    .iter_mut()
                    .zip(self.row(i))
                {
                    *u = x as f64 / n;
                }
            }
        }
        self.unit_rows = Some(unit);
        self
    }

    pub fn is_normalized_mode(&self) -> bool {
        self.unit_rows.is_some()
    }

    /// The `k` most cosine-similar words to `word`, most similar first.
    ///
    /// The query word and zero-norm rows are excluded, as is anything below
    /// `min_similarity`. Equal similarities keep vocabulary order.
    pub fn nearest_neighbors(
        &self,
        word: &str,
        k: usize,
        min_similarity: f64,
    ) -> Result<Vec<Neighbor>> {
        self.nearest_neighbors_where(word, k, min_similarity, |_| true)
    }

    /// Like [`nearest_neighbors`](Self::nearest_neighbors), restricted to
    /// candidate words accepted by `admit`.
    pub fn nearest_neighbors_where<F>(
        &self,
        word: &str,
        k: usize,
        min_similarity: f64,
        admit: F,
    ) -> Result<Vec<Neighbor>>
    where
        F: Fn(&str) -> bool + Sync,
    {
        let query = self
            .index_of(word)
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let q_norm = self.norms[query];
        if q_norm == 0.0 || min_similarity > 1.0 + 1e-9 {
            return Ok(Vec::new());
        }

        let scan = |start: usize, end: usize| -> Vec<Ranked> {
            let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(k + 1);
            for i in start..end {
                if i == query || self.norms[i] == 0.0 {
                    continue;
                }
                let sim = self.similarity_to(query, q_norm, i);
                if sim < min_similarity {
                    continue;
                }
                let cand = Ranked { sim, index: i };
                if heap.len() == k {
                    // heap top is the current worst kept entry
                    if cand >= *heap.peek().expect("non-empty") {
                        continue;
                    }
                }
                if !admit(&self.words[i]) {
                    continue;
                }
                heap.push(cand);
                if heap.len() > k {
                    heap.pop();
                }
            }
            heap.into_vec()
        };

        let n = self.len();
        let mut ranked: Vec<Ranked> = if n > SCAN_CHUNK {
            (0..n.div_ceil(SCAN_CHUNK))
                .into_par_iter()
                .flat_map_iter(|c| scan(c * SCAN_CHUNK, ((c + 1) * SCAN_CHUNK).min(n)))
                .collect()
        } else {
            scan(0, n)
        };
        ranked.sort();
        ranked.truncate(k);
        Ok(ranked
            .into_iter()
            .map(|r| Neighbor {
                word: self.words[r.index].clone(),
                similarity: r.sim,
            })
            .collect())
    }

    fn similarity_to(&self, query: usize, q_norm: f64, other: usize) -> f64 {
        match &self.unit_rows {
            Some(unit) => {
                let a = &unit[query * self.dim..(query + 1) * self.dim];
                let b = &unit[other * self.dim..(other + 1) * self.dim];
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            None => dot(self.row(query), self.row(other)) / (q_norm * self.norms[other]),
        }
    }

    /// Writes the binary cache for this table.
    pub fn save_cache(&self, path: impl AsRef<Path>, source_digest: &[u8; 32]) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::write(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::write(path, e);
        w.write_all(CACHE_MAGIC).map_err(io)?;
        w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(source_digest).map_err(io)?;
        w.write_all(&(self.dim as u32).to_le_bytes()).map_err(io)?;
        w.write_all(&(self.len() as u32).to_le_bytes())
            .map_err(io)?;
        for word in &self.words {
            w.write_all(&(word.len() as u32).to_le_bytes())
                .map_err(io)?;
            w.write_all(word.as_bytes()).map_err(io)?;
        }
        for x in &self.data {
            w.write_all(&x.to_le_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    /// Reads a binary cache. Returns `None` when the cache was built from a
    /// different source file.
    pub fn load_cache(path: impl AsRef<Path>, expected_digest: &[u8; 32]) -> Result<Option<Self>> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::read(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |m: &str| Error::InvalidFile {
            path: path.to_path_buf(),
            message: m.to_string(),
        };
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| bad("truncated header"))?;
        if &magic != CACHE_MAGIC {
            return Err(bad("not an embedding cache"));
        }
        let version = read_u32(&mut r).map_err(|_| bad("truncated header"))?;
        if version != CACHE_VERSION {
            return Err(bad("unsupported cache version"));
        }
        let mut digest = [0u8; 32];
        r.read_exact(&mut digest)
            .map_err(|_| bad("truncated header"))?;
        if &digest != expected_digest {
            return Ok(None);
        }
        let dim = read_u32(&mut r).map_err(|_| bad("truncated header"))? as usize;
        let count = read_u32(&mut r).map_err(|_| bad("truncated header"))? as usize;
        if dim == 0 || count == 0 {
            return Err(bad("empty cache"));
        }
        let mut builder = Builder::new(dim);
        let mut words = Vec::with_capacity(count);
        for _ in 0..count {
            let len = read_u32(&mut r).map_err(|_| bad("truncated vocabulary"))? as usize;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)
                .map_err(|_| bad("truncated vocabulary"))?;
            words.push(String::from_utf8(bytes).map_err(|_| bad("vocabulary is not UTF-8"))?);
        }
        let mut row = vec![0f32; dim];
        let mut buf = [0u8; 4];
        for (i, word) in words.into_iter().enumerate() {
            for x in row.iter_mut() {
                r.read_exact(&mut buf)
                    .map_err(|_| bad("truncated matrix"))?;
                *x = f32::from_le_bytes(buf);
            }
            builder.push(word, &row, i + 1);
        }
        Ok(Some(builder.finish()))
    }
}

fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

struct Builder {
    dim: usize,
    words: Vec<String>,
    vocab: HashMap<String, usize>,
    data: Vec<f32>,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder {
            dim,
            words: Vec::new(),
            vocab: HashMap::new(),
            data: Vec::new(),
        }
    }

    fn push(&mut self, word: String, row: &[f32], line: usize) {
        if self.vocab.contains_key(&word) {
            warn!("duplicate embedding for {word:?} at line {line}; keeping the first");
            return;
        }
        self.vocab.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.data.extend_from_slice(row);
    }

    fn finish(self) -> EmbeddingTable {
        let norms: Vec<f64> = self
            .data
            .chunks_exact(self.dim)
            .map(|r| dot(r, r).sqrt())
            .collect();
        let zeros = norms.iter().filter(|n| **n == 0.0).count();
        if zeros > 0 {
            warn!("{zeros} zero-norm embedding rows; they never appear as neighbors");
        }
        debug!("loaded {} embeddings of dim {}", self.words.len(), self.dim);
        EmbeddingTable {
            dim: self.dim,
            words: self.words,
            vocab: self.vocab,
            data: self.data,
            norms,
            unit_rows: None,
        }
    }
}

fn parse_line(line: &str) -> Result<(String, Vec<f32>), String> {
    let mut parts = line.split_whitespace();
    let word = parts.next().ok_or("empty line")?.to_string();
    let row = parts
        .map(|p| match p.parse::<f32>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("cannot parse {p:?} as a real number")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if row.is_empty() {
        return Err(format!("word {word:?} has no vector components"));
    }
    Ok((word, row))
}

/// Loads a GloVe text file serially.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    EmbeddingTable::load(path, LoadOptions::default())
}

/// Loads `source`, going through the binary cache at `cache` when it is
/// current and refreshing it otherwise.
pub fn load_embeddings_cached(
    source: impl AsRef<Path>,
    cache: impl AsRef<Path>,
) -> Result<EmbeddingTable> {
    let (source, cache) = (source.as_ref(), cache.as_ref());
    let digest = file_digest(source)?;
    if cache.exists() {
        match EmbeddingTable::load_cache(cache, &digest) {
            Ok(Some(table)) => return Ok(table),
            Ok(None) => debug!("cache {} is stale", cache.display()),
            Err(e) => warn!("ignoring unreadable cache: {e}"),
        }
    }
    let table = EmbeddingTable::load(source, LoadOptions { parallel: true })?;
    table.save_cache(cache, &digest)?;
    Ok(table)
}

/// SHA-256 of a file's bytes.
pub fn file_digest(path: impl AsRef<Path>) -> Result<[u8; 32]> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::read(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::read(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().into())
}

/// Default cache location next to the source: `<file>.cache`.
pub fn default_cache_path(source: &Path) -> PathBuf {
    let mut name = source.file_name().unwrap_or_default().to_os_string();
    name.push(".cache");
    source.with_file_name(name)
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum()
}

/// `u·v / (‖u‖‖v‖)`, computed in `f64`.
pub fn cosine_similarity(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (nu, nv) = (dot(u, u).sqrt(), dot(v, v).sqrt());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(dot(u, v) / (nu * nv))
}

/// Search candidate ordered best-first: higher similarity, then lower index.
#[derive(Debug, Clone, Copy)]
struct Ranked {
    sim: f64,
    index: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    /// `Less` means better, so a max-heap keeps the worst entry on top.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .sim
            .total_cmp(&self.sim)
            .then(self.index.cmp(&other.index))
    }
}

/// Writes a table back out in GloVe text format.
pub fn write_text(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (i, w) in table.words().iter().enumerate() {
        out.push_str(w);
        for x in table.row(i) {
            out.push(' ');
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::write(path, e))
}

//! Tweet cleaning: lexical normalization, noise stripping and length trimming.
//!
//! The composed pipeline is `normalize → clean → trim`. Every stage is a pure
//! string transform and the composition is idempotent.
//!
//! `clean` applies its steps in this order:
//!
//! 1. lowercase
//! 2. emoji / non-ASCII removal (each removed codepoint becomes a space)
//! 3. bracketed spans, `[...]` and `(...)`
//! 4. URL, hashtag and mention tokens
//! 5. ASCII punctuation becomes whitespace
//! 6. stopword tokens
//! 7. whitespace collapse
//!
//! Character removal runs before span and token removal so that no later step
//! can glue two fragments into a new URL, hashtag or stopword.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::error::{Error, Result};

const STOPWORDS_V1: &str = include_str!("../data/stopwords-en-v1.txt");
const CONTRACTIONS_V1: &str = include_str!("../data/contractions-en-v1.csv");

/// A set of lowercase single-token stopwords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(BTreeSet<String>);

impl Stopwords {
    /// The shipped English list.
    pub fn english() -> Self {
        Self::parse(STOPWORDS_V1).expect("shipped stopword list is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        Self::parse(&text).map_err(|(line, message)| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut words = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            if word.split_whitespace().count() != 1 || word.to_lowercase() != word {
                return Err((
                    i + 1,
                    format!("stopword {word:?} must be one lowercase token"),
                ));
            }
            words.insert(word.to_string());
        }
        Ok(Stopwords(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl FromIterator<String> for Stopwords {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Stopwords(iter.into_iter().collect())
    }
}

/// Contraction → expansion lookup, keyed by lowercase contraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contractions(HashMap<String, String>);

impl Contractions {
    pub fn english() -> Self {
        Self::parse(CONTRACTIONS_V1).expect("shipped contraction table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::read(path, e))?;
        Self::parse(&text).map_err(|(line, message)| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Two-column CSV with a `contraction,expansion` header.
    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut table = HashMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                (line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            if record.len() != 2 {
                return Err((line, "expected two columns".into()));
            }
            let key = canonical_apostrophes(&record[0].trim().to_lowercase());
            let expansion = record[1].trim().to_string();
            if expansion.contains('\'') {
                return Err((
                    line,
                    format!("expansion {expansion:?} contains an apostrophe"),
                ));
            }
            table.insert(key, expansion);
        }
        Ok(Contractions(table))
    }

    fn expand(&self, token: &str) -> Option<&str> {
        self.0
            .get(&canonical_apostrophes(&token.to_lowercase()))
            .map(String::as_str)
    }
}

fn canonical_apostrophes(s: &str) -> String {
    s.replace(['\u{2019}', '\u{2018}', '`'], "'")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    #[default]
    Tokens,
    Chars,
}

/// Plain-data pipeline settings, as stored in experiment plans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub max_len: usize,
    pub length_unit: LengthUnit,
    pub lowercase: bool,
    pub strip_urls: bool,
    pub strip_hashtags: bool,
    pub strip_mentions: bool,
    pub strip_emoji: bool,
    pub strip_non_ascii: bool,
    pub strip_punctuation: bool,
    pub remove_stopwords: bool,
    pub strip_bracketed: bool,
    /// Overrides the shipped stopword list.
    pub stopwords_path: Option<PathBuf>,
    /// Overrides the shipped contraction table.
    pub contractions_path: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_len: 100,
            length_unit: LengthUnit::Tokens,
            lowercase: true,
            strip_urls: true,
            strip_hashtags: true,
            strip_mentions: true,
            strip_emoji: true,
            strip_non_ascii: true,
            strip_punctuation: true,
            remove_stopwords: true,
            strip_bracketed: true,
            stopwords_path: None,
            contractions_path: None,
        }
    }
}

impl PipelineConfig {
    /// Every cleaning flag off except lowercasing.
    pub fn lowercase_only() -> Self {
        PipelineConfig {
            strip_urls: false,
            strip_hashtags: false,
            strip_mentions: false,
            strip_emoji: false,
            strip_non_ascii: false,
            strip_punctuation: false,
            remove_stopwords: false,
            strip_bracketed: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_len == 0 {
            return Err(Error::Config("pipeline.max_len must be at least 1".into()));
        }
        Ok(())
    }

    /// Loads the word lists and returns a ready-to-run pipeline.
    pub fn build(&self) -> Result<Pipeline> {
        self.validate()?;
        let stopwords = match &self.stopwords_path {
            Some(p) => Stopwords::load(p)?,
            None => Stopwords::english(),
        };
        let contractions = match &self.contractions_path {
            Some(p) => Contractions::load(p)?,
            None => Contractions::english(),
        };
        Ok(Pipeline {
            config: self.clone(),
            stopwords,
            contractions,
        })
    }
}

/// A validated configuration together with its loaded word lists.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    pub stopwords: Stopwords,
    pub contractions: Contractions,
}

impl Default for Pipeline {
    fn default() -> Self {
        PipelineConfig::default().build().expect("default pipeline")
    }
}

impl Pipeline {
    pub fn with_stopwords(mut self, stopwords: Stopwords) -> Self {
        self.stopwords = stopwords;
        self
    }

    /// `normalize → clean → trim`.
    pub fn run(&self, text: &str) -> String {
        let normalized = normalize_with(text, &self.contractions);
        let cleaned = clean(&normalized, self);
        match self.config.length_unit {
            LengthUnit::Tokens => trim(&cleaned, self.config.max_len),
            LengthUnit::Chars => trim_chars(&cleaned, self.config.max_len),
        }
    }
}

/// Normalizes with the shipped contraction table.
pub fn normalize(text: &str) -> String {
    static TABLE: OnceLock<Contractions> = OnceLock::new();
    normalize_with(text, TABLE.get_or_init(Contractions::english))
}

/// Collapses letter runs of three or more to two, expands contractions and
/// collapses whitespace.
pub fn normalize_with(text: &str, contractions: &Contractions) -> String {
    let collapsed = collapse_elongation(text);
    let mut out = String::with_capacity(collapsed.len());
    for token in collapsed.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&expand_token(token, contractions));
    }
    out
}

fn collapse_elongation(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut run_char: Option<char> = None;
    let mut run_len = 0usize;
    for c in text.chars() {
        let folded = fold(c);
        if c.is_alphabetic() && run_char == Some(folded) {
            run_len += 1;
        } else {
            run_char = c.is_alphabetic().then_some(folded);
            run_len = 1;
        }
        if run_len <= 2 {
            out.push(c);
        }
    }
    out
}

fn fold(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

fn expand_token(token: &str, contractions: &Contractions) -> String {
    let is_edge = |c: char| c.is_ascii_punctuation() && c != '\'' && c != '`';
    let core_start = token.find(|c| !is_edge(c)).unwrap_or(token.len());
    let core_end = token
        .rfind(|c| !is_edge(c))
        .map(|i| i + token[i..].chars().next().map_or(1, char::len_utf8))
        .unwrap_or(core_start);
    if core_start >= core_end {
        return token.to_string();
    }
    let core = &token[core_start..core_end];
    match contractions.expand(core) {
        Some(expansion) => format!(
            "{}{}{}",
            &token[..core_start],
            expansion,
            &token[core_end..]
        ),
        None => token.to_string(),
    }
}

fn url_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)^(?:https?://\S*|www\.\S*|[a-z0-9-]+(?:\.[a-z0-9-]+)+/\S*)$")
            .expect("valid url pattern")
    })
}

pub fn is_url(token: &str) -> bool {
    url_pattern().is_match(token)
}

/// Emoji, pictographs, regional indicators and their joiners/selectors.
pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF
        | 0x2600..=0x27BF
        | 0x2B00..=0x2BFF
        | 0x2300..=0x23FF
        | 0xFE00..=0xFE0F
        | 0x200D
        | 0x20E3
        | 0x3030
        | 0x303D
        | 0x3297
        | 0x3299
        | 0xE0020..=0xE007F)
}

/// Applies the cleaning steps enabled in `pipeline.config`.
pub fn clean(text: &str, pipeline: &Pipeline) -> String {
    let cfg = &pipeline.config;
    let mut s = if cfg.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };

    if cfg.strip_non_ascii || cfg.strip_emoji {
        s = s
            .chars()
            .map(|c| {
                let drop =
                    (cfg.strip_non_ascii && !c.is_ascii()) || (cfg.strip_emoji && is_emoji(c));
                if drop {
                    ' '
                } else {
                    c
                }
            })
            .collect();
    }

    if cfg.strip_bracketed {
        s = strip_bracketed(&s);
    }

    if cfg.strip_urls || cfg.strip_hashtags || cfg.strip_mentions {
        s = s
            .split_whitespace()
            .filter(|t| {
                !((cfg.strip_urls && is_url(t))
                    || (cfg.strip_hashtags && t.starts_with('#'))
                    || (cfg.strip_mentions && t.starts_with('@')))
            })
            .collect::<Vec<_>>()
            .join(" ");
    }

    if cfg.strip_punctuation {
        s = s
            .chars()
            .map(|c| if c.is_ascii_punctuation() { ' ' } else { c })
            .collect();
    }

    let tokens = s
        .split_whitespace()
        .filter(|t| !(cfg.remove_stopwords && pipeline.stopwords.contains(&t.to_lowercase())));
    tokens.collect::<Vec<_>>().join(" ")
}

/// Removes matched `[...]` and `(...)` spans, nested ones included. Each span
/// becomes a single space; unmatched brackets are kept as literal text.
pub fn strip_bracketed(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut open: Vec<(char, usize)> = Vec::new();
    for c in text.chars() {
        match c {
            '(' | '[' => {
                open.push((c, out.len()));
                out.push(c);
            }
            ')' | ']' => {
                let opener = if c == ')' { '(' } else { '[' };
                match open.last() {
                    Some(&(o, at)) if o == opener => {
                        open.pop();
                        out.truncate(at);
                        out.push(' ');
                    }
                    _ => out.push(c),
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Keeps the first `max_len_tokens` whitespace tokens.
pub fn trim(text: &str, max_len_tokens: usize) -> String {
    text.split_whitespace()
        .take(max_len_tokens.max(1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Keeps at most `max_chars` characters, without trailing whitespace.
pub fn trim_chars(text: &str, max_chars: usize) -> String {
    let cut: String = text.chars().take(max_chars.max(1)).collect();
    cut.trim_end().to_string()
}

/// Ids dropped by [`preprocess_dataset`] because nothing survived cleaning.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub emptied: Vec<String>,
    pub orphaned: Vec<String>,
}

/// Runs the pipeline over every sample; samples left empty are dropped.
pub fn preprocess_dataset(d: &Dataset, pipeline: &Pipeline) -> Result<(Dataset, PreprocessReport)> {
    let cleaned: Vec<String> = d
        .samples()
        .par_iter()
        .map(|s| pipeline.run(&s.text))
        .collect();
    let by_id: HashMap<&str, &str> = d
        .samples()
        .iter()
        .zip(&cleaned)
        .map(|(s, t)| (s.id.as_str(), t.as_str()))
        .collect();
    let emptied: Vec<String> = d
        .samples()
        .iter()
        .zip(&cleaned)
        .filter(|(_, t)| t.is_empty())
        .map(|(s, _)| s.id.clone())
        .collect();
    let (kept, orphaned) = d.retain_with_orphans(|s| !by_id[s.id.as_str()].is_empty());
    let entries = kept
        .entries()
        .map(|(s, split)| {
            let mut s = s.clone();
            s.text = by_id[s.id.as_str()].to_string();
            (s, split)
        })
        .collect();
    let out = Dataset::new(d.name(), entries)?;
    Ok((out, PreprocessReport { emptied, orphaned }))
}

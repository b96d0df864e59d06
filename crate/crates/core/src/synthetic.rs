//! Seeded generators for fixtures, demos and tests.
//!
//! The word groups mirror the clusters of `data/fixtures/embeddings-d10.txt`:
//! positive-leaning texts pair an affect word with an unpleasant situation,
//! negatives are mostly mundane office vocabulary.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, Label, Sample, Split};
use crate::embeddings::EmbeddingTable;
use crate::seed::{derived_rng, rng_from_seed};

pub const AFFECT: [&str; 16] = [
    "love",
    "loving",
    "adore",
    "wonderful",
    "fantastic",
    "brilliant",
    "amazing",
    "awesome",
    "thrilled",
    "delighted",
    "perfect",
    "superb",
    "lovely",
    "glorious",
    "fabulous",
    "marvelous",
];

pub const SITUATION: [&str; 16] = [
    "monday", "traffic", "rain", "delay", "homework", "queue", "dentist", "taxes", "overtime",
    "hangover", "flu", "alarm", "commute", "deadline", "outage", "laundry",
];

pub const PLAIN: [&str; 16] = [
    "meeting", "report", "schedule", "office", "lunch", "coffee", "weather", "project", "email",
    "budget", "review", "agenda", "update", "notes", "forecast", "calendar",
];

pub const MISC: [&str; 43] = [
    "idea", "street", "house", "money", "night", "morning", "weekend", "parents", "boss",
    "neighbor", "computer", "printer", "wifi", "battery", "movie", "music", "phone", "friend",
    "game", "city", "book", "team", "dog", "car", "tea", "park", "shop", "film", "song", "bus",
    "store", "news", "photo", "school", "class", "garden", "river", "beach", "kitchen", "window",
    "paper", "chair", "table",
];

/// Seed of the shipped `synthetic-imbalanced.csv`.
pub const IMBALANCED_SEED: u64 = 7;

/// Shape of [`imbalanced_corpus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImbalancedSpec {
    pub total: usize,
    pub positive_fraction: f64,
    pub n_val: usize,
    pub n_test: usize,
    /// Inclusive word-count ranges drawn per text.
    pub positive_affect: (usize, usize),
    pub positive_situation: (usize, usize),
    pub negative_plain: (usize, usize),
    pub negative_situation: (usize, usize),
    /// Chance that a negative mentions one affect word.
    pub negative_affect_rate: f64,
    /// Chance that a positive mentions one mundane word.
    pub positive_plain_rate: f64,
    /// Upper bound on filler words per text.
    pub max_filler: usize,
}

impl Default for ImbalancedSpec {
    fn default() -> Self {
        ImbalancedSpec {
            total: 2000,
            positive_fraction: 0.1,
            n_val: 160,
            n_test: 400,
            positive_affect: (1, 2),
            positive_situation: (1, 2),
            negative_plain: (1, 3),
            negative_situation: (0, 1),
            negative_affect_rate: 0.2,
            positive_plain_rate: 0.0,
            max_filler: 0,
        }
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str], n: usize, out: &mut Vec<&'a str>) {
    for _ in 0..n {
        out.push(words.choose(rng).copied().expect("non-empty word group"));
    }
}

fn synthetic_text(rng: &mut ChaCha8Rng, positive: bool, spec: &ImbalancedSpec) -> String {
    let mut t = Vec::new();
    if positive {
        let n = rng.gen_range(spec.positive_affect.0..=spec.positive_affect.1);
        pick(rng, &AFFECT, n, &mut t);
        let n = rng.gen_range(spec.positive_situation.0..=spec.positive_situation.1);
        pick(rng, &SITUATION, n, &mut t);
        if rng.gen_bool(spec.positive_plain_rate) {
            pick(rng, &PLAIN, 1, &mut t);
        }
    } else {
        let n = rng.gen_range(spec.negative_plain.0..=spec.negative_plain.1);
        pick(rng, &PLAIN, n, &mut t);
        let n = rng.gen_range(spec.negative_situation.0..=spec.negative_situation.1);
        pick(rng, &SITUATION, n, &mut t);
        if rng.gen_bool(spec.negative_affect_rate) {
            pick(rng, &AFFECT, 1, &mut t);
        }
    }
    let n = rng.gen_range(0..=spec.max_filler);
    pick(rng, &MISC, n, &mut t);
    t.shuffle(rng);
    t.join(" ")
}

const MAX_DRAWS: usize = 10_000;

/// Imbalanced corpus with distinct texts; splits are assigned after a shuffle
/// (test first, then val, rest train).
///
/// Panics if the spec cannot yield `total` distinct texts.
pub fn imbalanced_corpus(name: &str, seed: u64, spec: &ImbalancedSpec) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let n_pos = (spec.total as f64 * spec.positive_fraction).round() as usize;
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(spec.total);
    for i in 0..spec.total {
        let positive = i < n_pos;
        let text = (0..MAX_DRAWS)
            .map(|_| synthetic_text(&mut rng, positive, spec))
            .find(|t| seen.insert(t.clone()))
            .unwrap_or_else(|| panic!("spec cannot produce {} distinct texts", spec.total));
        rows.push((
            text,
            if positive {
                Label::Sarcastic
            } else {
                Label::NotSarcastic
            },
        ));
    }
    rows.shuffle(&mut rng);
    let entries = rows
        .into_iter()
        .enumerate()
        .map(|(i, (text, label))| {
            let split = if i < spec.n_test {
                Split::Test
            } else if i < spec.n_test + spec.n_val {
                Split::Val
            } else {
                Split::Train
            };
            (Sample::original(format!("{name}:{i}"), text, label), split)
        })
        .collect();
    Dataset::new(name, entries).expect("generated ids are unique")
}

/// Distinct alphabetic marker outside any embedding vocabulary: "qxa", "qxb", ...
pub fn marker(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.insert(0, (b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    format!("qx{s}")
}

/// 100 positive and 100 negative train texts plus 20 val and 20 test.
///
/// Every positive carries an affect word and its own marker token, so any two
/// rewrites of different sources differ and every source has a substitution.
pub fn augmentation_fixture() -> Dataset {
    let mut rng = rng_from_seed(11);
    let mut entries = Vec::new();
    let mut push = |text: String, label, split| {
        let i = entries.len();
        entries.push((Sample::original(format!("augfix:{i}"), text, label), split));
    };
    for i in 0..100 {
        let text = format!(
            "{} {} {}",
            AFFECT[i % AFFECT.len()],
            SITUATION.choose(&mut rng).unwrap(),
            marker(i)
        );
        push(text, Label::Sarcastic, Split::Train);
    }
    for i in 0..140 {
        let split = match i {
            0..100 => Split::Train,
            100..120 => Split::Val,
            _ => Split::Test,
        };
        let text = format!(
            "{} {} {}",
            PLAIN[i % PLAIN.len()],
            MISC.choose(&mut rng).unwrap(),
            marker(1000 + i)
        );
        let label = if i >= 100 && i % 4 == 0 {
            Label::Sarcastic
        } else {
            Label::NotSarcastic
        };
        push(text, label, split);
    }
    Dataset::new("augfix", entries).expect("unique ids")
}

/// Ten raw tweets split 8/1/1, three of them sarcastic.
pub fn tiny_fixture() -> Dataset {
    let rows = [
        (
            "I just LOVE Mondays!!! #sarcasm",
            Label::Sarcastic,
            Split::Train,
        ),
        (
            "Meeting moved to 3pm, see the agenda",
            Label::NotSarcastic,
            Split::Train,
        ),
        (
            "Great, another dentist appointment 😂 http://t.co/abc",
            Label::Sarcastic,
            Split::Train,
        ),
        (
            "Coffee with @sam this morning",
            Label::NotSarcastic,
            Split::Train,
        ),
        (
            "The weather report says rain (again)",
            Label::NotSarcastic,
            Split::Train,
        ),
        (
            "Budget review is on the calendar",
            Label::NotSarcastic,
            Split::Train,
        ),
        ("New phone, new music", Label::NotSarcastic, Split::Train),
        (
            "Park by the river on the weekend",
            Label::NotSarcastic,
            Split::Train,
        ),
        (
            "Wow, traffic on my commute. Sooo fun",
            Label::Sarcastic,
            Split::Val,
        ),
        (
            "Lunch at the office today",
            Label::NotSarcastic,
            Split::Test,
        ),
    ];
    let entries = rows
        .iter()
        .enumerate()
        .map(|(i, (t, l, s))| (Sample::original(format!("tiny:{i}"), *t, *l), *s))
        .collect();
    Dataset::new("tiny", entries).expect("unique ids")
}

const NOISE: [&str; 24] = [
    "http://t.co/x1",
    "https://example.com/a?b=c",
    "www.site.org",
    "#sarcasm",
    "#not",
    "@user",
    "@bob_99",
    "😂",
    "🙄",
    "café",
    "naïve",
    "!!!",
    "...",
    "(lol)",
    "[edit]",
    "{x}",
    "can't",
    "won't",
    "I'm",
    "it’s",
    "Sooooo",
    "YESSS",
    "&amp;",
    "2024",
];

/// Messy tweet-like text mixing cluster words, stopwords and noise tokens.
pub fn noisy_tweet(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(0..30);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let tok = match rng.gen_range(0..6) {
            0 => NOISE.choose(rng).unwrap().to_string(),
            1 => ["the", "a", "is", "not", "and", "to", "THIS", "out"]
                .choose(rng)
                .unwrap()
                .to_string(),
            2 => AFFECT.choose(rng).unwrap().to_uppercase(),
            3 => SITUATION.choose(rng).unwrap().to_string(),
            4 => format!(
                "{}{}",
                PLAIN.choose(rng).unwrap(),
                ["", ",", "!", "?!", ":)"].choose(rng).unwrap()
            ),
            _ => (0..rng.gen_range(1..6))
                .map(|_| rng.gen_range(b' '..=b'~') as char)
                .collect(),
        };
        out.push(tok);
    }
    let sep = [" ", "  ", "\t", "\n"];
    let mut s = String::new();
    for (i, t) in out.iter().enumerate() {
        if i > 0 {
            s.push_str(sep.choose(rng).unwrap());
        }
        s.push_str(t);
    }
    s
}

/// Words `w0`, `w1`, ... with rows drawn uniformly from [-1, 1).
pub fn random_table(count: usize, dim: usize, seed: u64) -> EmbeddingTable {
    let mut rng = derived_rng(seed, &["random-table".into()]);
    let words: Vec<String> = (0..count).map(|i| format!("w{i}")).collect();
    let rows: Vec<Vec<f32>> = (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect())
        .collect();
    EmbeddingTable::from_rows(words, rows).expect("consistent rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::compute_stats;

    fn fixture_table() -> EmbeddingTable {
        let text = include_str!("../data/fixtures/embeddings-d10.txt");
        EmbeddingTable::read_text(
            text.as_bytes(),
            std::path::Path::new("fixture"),
            Default::default(),
        )
        .unwrap()
    }

    #[test]
    fn word_groups_match_fixture_order() {
        let t = fixture_table();
        let all: Vec<&str> = AFFECT
            .iter()
            .chain(&SITUATION)
            .chain(&PLAIN)
            .copied()
            .collect();
        for (i, w) in all.iter().enumerate() {
            assert_eq!(t.word(i), *w);
        }
        for (i, w) in MISC.iter().enumerate() {
            assert_eq!(t.word(52 + i), *w);
        }
    }

    #[test]
    fn imbalanced_shape() {
        let d = imbalanced_corpus("syn", IMBALANCED_SEED, &ImbalancedSpec::default());
        let st = compute_stats(&d);
        assert_eq!((st.n_train, st.n_val, st.n_test), (1440, 160, 400));
        assert_eq!(st.pct_positive, 10.0);
        let texts: HashSet<&str> = d.samples().iter().map(|s| s.text.as_str()).collect();
        assert_eq!(texts.len(), 2000);
        assert_eq!(
            d,
            imbalanced_corpus("syn", IMBALANCED_SEED, &ImbalancedSpec::default())
        );
    }

    #[test]
    fn markers_are_distinct_and_alphabetic() {
        let m: HashSet<String> = (0..2000).map(marker).collect();
        assert_eq!(m.len(), 2000);
        assert!(m.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
        assert_eq!(marker(0), "qxa");
        assert_eq!(marker(26), "qxba");
    }

    #[test]
    fn augmentation_fixture_counts() {
        let d = augmentation_fixture();
        let pos_train = d
            .split(Split::Train)
            .filter(|s| s.label.is_positive())
            .count();
        assert_eq!(pos_train, 100);
        assert_eq!(d.count(Split::Val), 20);
        assert_eq!(d.count(Split::Test), 20);
    }

    #[test]
    fn tiny_fixture_counts() {
        let st = compute_stats(&tiny_fixture());
        assert_eq!((st.n_train, st.n_val, st.n_test), (8, 1, 1));
        assert_eq!(st.pct_positive, 30.0);
    }
}

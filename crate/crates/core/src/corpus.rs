//! Sense inventories, word filtering, dataset splits, sense embeddings and
//! annotation files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SenseRecord;
use crate::sense::{SenseId, SenseIndex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InventoryEntry {
    pub definition: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub proper_noun: bool,
}

/// Nominal senses per lemma, in lexicon order. Sense `i` of a word is
/// entry `i - 1` of its list.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SenseInventory {
    pub words: BTreeMap<String, Vec<InventoryEntry>>,
}

impl SenseInventory {
    /// Reads a JSON object mapping each lemma to its list of senses.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::malformed(path.display(), e.to_string()))
    }

    /// Reads `index.noun` and `data.noun` from a wordnet database directory.
    pub fn from_wordnet_dir(dir: &Path) -> Result<Self> {
        let index_path = dir.join("index.noun");
        let data_path = dir.join("data.noun");
        let index = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        let data = fs::read_to_string(&data_path).map_err(|e| Error::io(&data_path, e))?;

        let mut synsets: HashMap<&str, Synset> = HashMap::new();
        for (n, line) in data.lines().enumerate() {
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let loc = || format!("{}:{}", data_path.display(), n + 1);
            let synset = Synset::parse(line).ok_or_else(|| Error::malformed(loc(), "bad synset line"))?;
            synsets.insert(synset.offset, synset);
        }

        let mut words = BTreeMap::new();
        for (n, line) in index.lines().enumerate() {
            if line.starts_with("  ") || line.trim().is_empty() {
                continue;
            }
            let loc = || format!("{}:{}", index_path.display(), n + 1);
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::malformed(loc(), "bad index line");
            let lemma = *fields.first().ok_or_else(bad)?;
            let synset_cnt: usize = fields.get(2).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let p_cnt: usize = fields.get(3).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let offsets_at = 4 + p_cnt + 2;
            let offsets = fields.get(offsets_at..offsets_at + synset_cnt).ok_or_else(bad)?;
            let mut entries = Vec::with_capacity(synset_cnt);
            for off in offsets {
                let s = synsets
                    .get(off)
                    .ok_or_else(|| Error::malformed(loc(), format!("unknown synset {off}")))?;
                entries.push(s.entry_for(lemma));
            }
            words.insert(lemma.replace('_', " "), entries);
        }
        Ok(SenseInventory { words })
    }

    /// Loads a directory as a wordnet database, anything else as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        if path.is_dir() {
            Self::from_wordnet_dir(path)
        } else {
            Self::from_json_file(path)
        }
    }

    pub fn records(&self, word: &str) -> Option<Vec<SenseRecord>> {
        self.words.get(word).map(|entries| {
            entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let mut r = SenseRecord::new(SenseIndex::Plain(i as u32 + 1), e.definition.clone());
                    r.synonyms = e.synonyms.clone();
                    r
                })
                .collect()
        })
    }

    pub fn sense_ids(&self, word: &str) -> Vec<SenseId> {
        let n = self.words.get(word).map_or(0, Vec::len);
        (1..=n as u32)
            .map(|i| SenseId::new(word, SenseIndex::Plain(i)))
            .collect()
    }
}

struct Synset<'a> {
    offset: &'a str,
    words: Vec<&'a str>,
    gloss: &'a str,
}

impl<'a> Synset<'a> {
    fn parse(line: &'a str) -> Option<Self> {
        let (head, gloss) = match line.split_once(" | ") {
            Some((h, g)) => (h, g.trim()),
            None => (line, ""),
        };
        let fields: Vec<&str> = head.split_whitespace().collect();
        let offset = *fields.first()?;
        let w_cnt = usize::from_str_radix(fields.get(3)?, 16).ok()?;
        let words = (0..w_cnt)
            .map(|i| fields.get(4 + 2 * i).copied())
            .collect::<Option<Vec<_>>>()?;
        Some(Synset { offset, words, gloss })
    }

    fn entry_for(&self, lemma: &str) -> InventoryEntry {
        let strip = |w: &str| w.split('(').next().unwrap_or(w).to_string();
        let own = self
            .words
            .iter()
            .map(|w| strip(w))
            .find(|w| w.eq_ignore_ascii_case(lemma));
        let proper_noun = own
            .as_deref()
            .and_then(|w| w.chars().next())
            .is_some_and(char::is_uppercase);
        InventoryEntry {
            definition: self.gloss.to_string(),
            synonyms: self
                .words
                .iter()
                .map(|w| strip(w))
                .filter(|w| !w.eq_ignore_ascii_case(lemma))
                .map(|w| w.replace('_', " "))
                .collect(),
            proper_noun,
        }
    }
}

/// Words with 2 to 10 senses, excluding single letters, multiword or
/// hyphenated forms, and words made up entirely of proper-noun senses.
pub fn filter_words(inventory: &SenseInventory) -> Vec<String> {
    inventory
        .words
        .iter()
        .filter(|(w, senses)| {
            (2..=10).contains(&senses.len())
                && w.chars().count() > 1
                && !w.chars().any(|c| c.is_whitespace() || c == '-' || c == '_')
                && !senses.iter().all(|s| s.proper_noun)
        })
        .map(|(w, _)| w.clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

/// Shuffles the distinct words with `seed` and cuts 80:10:10.
pub fn split_dataset(words: &[String], seed: u64) -> Result<DatasetSplit> {
    let mut w: Vec<String> = words.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if w.len() < 10 {
        return Err(Error::TooFew {
            needed: 10,
            got: w.len(),
        });
    }
    w.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let tenth = (w.len() as f64 * 0.1).round() as usize;
    let test = w.split_off(w.len() - tenth);
    let dev = w.split_off(w.len() - tenth);
    Ok(DatasetSplit { train: w, dev, test })
}

/// Sense vectors of one fixed dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub vectors: HashMap<SenseId, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn insert(&mut self, id: SenseId, v: Vec<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                location: id.to_string(),
                expected: self.dim,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                location: id.to_string(),
            });
        }
        self.vectors.insert(id, v);
        Ok(())
    }

    pub fn get(&self, id: &SenseId) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Which of `senses` have no vector, and the words they belong to.
    pub fn coverage<'a>(&self, senses: impl IntoIterator<Item = &'a SenseId>) -> CoverageReport {
        let mut missing: Vec<SenseId> = senses
            .into_iter()
            .filter(|s| !self.vectors.contains_key(*s))
            .cloned()
            .collect();
        missing.sort();
        let excluded_words = missing.iter().map(|s| s.word.clone()).collect();
        CoverageReport {
            missing,
            excluded_words,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut ids: Vec<&SenseId> = self.vectors.keys().collect();
        ids.sort();
        let mut out = String::new();
        for id in ids {
            out.push_str(&id.to_string());
            for x in &self.vectors[id] {
                out.push(' ');
                out.push_str(&format!("{x:?}"));
            }
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))?;
        let dim = dim_path(path);
        fs::write(&dim, format!("{}\n", self.dim)).map_err(|e| Error::io(&dim, e))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub missing: Vec<SenseId>,
    /// Words with at least one missing sense; left out of parsing runs.
    pub excluded_words: BTreeSet<String>,
}

fn dim_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".dim");
    PathBuf::from(s)
}

/// Reads `word#index v1 v2 ...` lines. The dimension comes from
/// `<path>.dim` when present, otherwise from the first row.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sidecar = dim_path(path);
    let mut dim = match fs::read_to_string(&sidecar) {
        Ok(s) => Some(s.trim().parse::<usize>().map_err(|e| {
            Error::malformed(sidecar.display(), format!("bad dimension: {e}"))
        })?),
        Err(_) => None,
    };
    let mut table = EmbeddingTable::new(dim.unwrap_or(0));
    for (n, line) in text.lines().enumerate() {
        let loc = format!("{}:{}", path.display(), n + 1);
        let mut fields = line.split_whitespace();
        let Some(id) = fields.next() else {
            continue;
        };
        let id: SenseId = id
            .parse()
            .map_err(|e: Error| Error::malformed(&loc, e.to_string()))?;
        let values = fields
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::malformed(&loc, e.to_string()))?;
        let expected = *dim.get_or_insert(values.len());
        if expected == 0 {
            return Err(Error::malformed(&loc, "empty vector"));
        }
        table.dim = expected;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                location: loc,
                expected,
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { location: loc });
        }
        table.vectors.insert(id, values);
    }
    Ok(table)
}

/// Reads records from a JSON file (one value or an array), a `.jsonl`
/// file, or a directory of such files.
pub fn load_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .is_some_and(|x| x == "json" || x == "jsonl")
            })
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(load_records(&f)?);
        }
        return Ok(out);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|x| x == "jsonl") {
        return text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(n, l)| {
                serde_json::from_str(l).map_err(|e| {
                    Error::malformed(format!("{}:{}", path.display(), n + 1), e.to_string())
                })
            })
            .collect();
    }
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::malformed(path.display(), e.to_string()))?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value(v)
                .map_err(|e| Error::malformed(format!("{}[{i}]", path.display()), e.to_string()))
        })
        .collect()
}

/// Writes one JSON record per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_words(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

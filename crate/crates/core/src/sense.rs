//! Sense identifiers.
//!
//! Within a word a sense is addressed by its index: a plain inventory
//! ordinal (`3`), one half of a split sense (`1A`, `1B`) or an
//! annotator-added virtual sense (`V1`). Across words a [`SenseId`] pairs
//! the lemma with that index and prints as `lemma#index`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Which half of a split sense.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    A,
    B,
}

impl Half {
    pub fn other(self) -> Half {
        match self {
            Half::A => Half::B,
            Half::B => Half::A,
        }
    }
}

/// Index of a sense within one word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SenseIndex {
    Plain(u32),
    Split(u32, Half),
    Virtual(u32),
}

impl SenseIndex {
    pub fn is_virtual(self) -> bool {
        matches!(self, SenseIndex::Virtual(_))
    }

    pub fn is_split_half(self) -> bool {
        matches!(self, SenseIndex::Split(..))
    }

    /// The inventory ordinal this index belongs to (`1A` -> 1). Virtual
    /// senses have none.
    pub fn base(self) -> Option<u32> {
        match self {
            SenseIndex::Plain(i) | SenseIndex::Split(i, _) => Some(i),
            SenseIndex::Virtual(_) => None,
        }
    }

    fn sort_key(self) -> (u8, u32, u8) {
        match self {
            SenseIndex::Plain(i) => (0, i, 0),
            SenseIndex::Split(i, Half::A) => (0, i, 1),
            SenseIndex::Split(i, Half::B) => (0, i, 2),
            SenseIndex::Virtual(i) => (1, i, 0),
        }
    }
}

impl Ord for SenseIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for SenseIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SenseIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SenseIndex::Plain(i) => write!(f, "{i}"),
            SenseIndex::Split(i, Half::A) => write!(f, "{i}A"),
            SenseIndex::Split(i, Half::B) => write!(f, "{i}B"),
            SenseIndex::Virtual(i) => write!(f, "V{i}"),
        }
    }
}

fn positive(digits: &str, whole: &str) -> Result<u32, Error> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidSenseIndex(whole.to_string()));
    }
    match digits.parse::<u32>() {
        Ok(0) | Err(_) => Err(Error::InvalidSenseIndex(whole.to_string())),
        Ok(i) => Ok(i),
    }
}

impl FromStr for SenseIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix('V') {
            return positive(rest, s).map(SenseIndex::Virtual);
        }
        if let Some(rest) = s.strip_suffix('A') {
            return positive(rest, s).map(|i| SenseIndex::Split(i, Half::A));
        }
        if let Some(rest) = s.strip_suffix('B') {
            return positive(rest, s).map(|i| SenseIndex::Split(i, Half::B));
        }
        positive(s, s).map(SenseIndex::Plain)
    }
}

impl Serialize for SenseIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SenseIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A sense addressed globally: lemma plus index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseId {
    pub word: String,
    pub index: SenseIndex,
}

impl SenseId {
    pub fn new(word: impl Into<String>, index: SenseIndex) -> Self {
        SenseId {
            word: word.into(),
            index,
        }
    }
}

impl fmt::Display for SenseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.word, self.index)
    }
}

impl FromStr for SenseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (word, index) = s
            .rsplit_once('#')
            .ok_or_else(|| Error::InvalidSenseIndex(s.to_string()))?;
        if word.is_empty() {
            return Err(Error::InvalidSenseIndex(s.to_string()));
        }
        Ok(SenseId::new(word, index.parse()?))
    }
}

impl Serialize for SenseId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SenseId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

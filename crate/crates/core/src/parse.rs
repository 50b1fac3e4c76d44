//! Labelled forests without feature data, as produced by parsers and as
//! extracted from gold annotations, plus the homonymy partition they induce.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SenseKind, WordAnnotation};
use crate::sense::SenseIndex;

/// The node a sense attaches to: another sense, or the synthetic word root
/// (for prototypes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Head {
    Root,
    Sense(SenseIndex),
}

/// An undirected connection between two nodes, stored with the smaller
/// endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UndirectedEdge(pub Head, pub Head);

impl UndirectedEdge {
    pub fn new(a: Head, b: Head) -> Self {
        if a <= b {
            UndirectedEdge(a, b)
        } else {
            UndirectedEdge(b, a)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseEntry {
    pub id: SenseIndex,
    pub label: SenseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<SenseIndex>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ParseDoc {
    word: String,
    senses: Vec<ParseEntry>,
}

/// A labelled forest over one word's senses. Positions index into `ids`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "ParseDoc", try_from = "ParseDoc")]
pub struct Parse {
    pub word: String,
    pub ids: Vec<SenseIndex>,
    pub kinds: Vec<SenseKind>,
    pub parents: Vec<Option<usize>>,
}

impl From<Parse> for ParseDoc {
    fn from(p: Parse) -> Self {
        ParseDoc {
            senses: p.entries(),
            word: p.word,
        }
    }
}

impl TryFrom<ParseDoc> for Parse {
    type Error = Error;

    fn try_from(doc: ParseDoc) -> Result<Self> {
        Parse::from_entries(doc.word, &doc.senses)
    }
}

impl Parse {
    /// Builds a parse and checks the forest invariants.
    pub fn new(
        word: impl Into<String>,
        ids: Vec<SenseIndex>,
        kinds: Vec<SenseKind>,
        parents: Vec<Option<usize>>,
    ) -> Result<Self> {
        let p = Parse {
            word: word.into(),
            ids,
            kinds,
            parents,
        };
        p.check()?;
        Ok(p)
    }

    pub fn from_entries(word: impl Into<String>, entries: &[ParseEntry]) -> Result<Self> {
        let word = word.into();
        let pos: HashMap<SenseIndex, usize> =
            entries.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        if pos.len() != entries.len() {
            return Err(Error::malformed(&word, "duplicate sense in parse"));
        }
        let mut parents = Vec::with_capacity(entries.len());
        for e in entries {
            parents.push(match e.parent {
                None => None,
                Some(p) => Some(*pos.get(&p).ok_or_else(|| {
                    Error::malformed(&word, format!("parent {p} of {} is not a sense", e.id))
                })?),
            });
        }
        Parse::new(
            word,
            entries.iter().map(|e| e.id).collect(),
            entries.iter().map(|e| e.label).collect(),
            parents,
        )
    }

    /// The structural part of an annotation, senses in index order.
    pub fn from_annotation(annotation: &WordAnnotation) -> Result<Self> {
        let mut entries: Vec<ParseEntry> = annotation
            .senses
            .iter()
            .map(|s| ParseEntry {
                id: s.id(),
                label: s.kind(),
                parent: s.parent(),
            })
            .collect();
        entries.sort_by_key(|e| e.id);
        Parse::from_entries(annotation.word.clone(), &entries)
    }

    pub fn entries(&self) -> Vec<ParseEntry> {
        (0..self.len())
            .map(|i| ParseEntry {
                id: self.ids[i],
                label: self.kinds[i],
                parent: self.parents[i].map(|p| self.ids[p]),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.ids.len();
        let bad = |m: String| Err(Error::malformed(&self.word, m));
        if n == 0 {
            return bad("parse has no senses".into());
        }
        if self.kinds.len() != n || self.parents.len() != n {
            return bad("parse vectors differ in length".into());
        }
        for i in 0..n {
            match (self.kinds[i], self.parents[i]) {
                (SenseKind::Prototype, None) => {}
                (SenseKind::Prototype, Some(_)) => {
                    return bad(format!("prototype {} has a parent", self.ids[i]))
                }
                (_, None) => return bad(format!("{} has no parent", self.ids[i])),
                (_, Some(p)) if p >= n || p == i => {
                    return bad(format!("{} has an invalid parent", self.ids[i]))
                }
                _ => {}
            }
        }
        for i in 0..n {
            let mut cur = i;
            let mut steps = 0;
            while let Some(p) = self.parents[cur] {
                cur = p;
                steps += 1;
                if steps > n {
                    return bad(format!("{} lies on a cycle", self.ids[i]));
                }
            }
        }
        if !self.kinds.contains(&SenseKind::Prototype) {
            return Err(Error::NoPrototype);
        }
        Ok(())
    }

    pub fn position(&self, id: SenseIndex) -> Option<usize> {
        self.ids.iter().position(|x| *x == id)
    }

    pub fn head(&self, i: usize) -> Head {
        match self.parents[i] {
            None => Head::Root,
            Some(p) => Head::Sense(self.ids[p]),
        }
    }

    pub fn prototypes(&self) -> BTreeSet<SenseIndex> {
        (0..self.len())
            .filter(|i| self.kinds[*i] == SenseKind::Prototype)
            .map(|i| self.ids[i])
            .collect()
    }

    /// One undirected edge per sense (to its parent or to the root), keyed
    /// to the label of the sense that contributes it.
    pub fn undirected_edges(&self) -> BTreeMap<UndirectedEdge, SenseKind> {
        (0..self.len())
            .map(|i| {
                (
                    UndirectedEdge::new(Head::Sense(self.ids[i]), self.head(i)),
                    self.kinds[i],
                )
            })
            .collect()
    }

    /// Position of the prototype at the top of `i`'s tree.
    pub fn root_of(&self, mut i: usize) -> usize {
        while let Some(p) = self.parents[i] {
            i = p;
        }
        i
    }

    pub fn partition(&self) -> HomonymyPartition {
        let mut clusters: BTreeMap<usize, BTreeSet<SenseIndex>> = BTreeMap::new();
        for i in 0..self.len() {
            clusters
                .entry(self.root_of(i))
                .or_default()
                .insert(self.ids[i]);
        }
        HomonymyPartition::new(self.word.clone(), clusters.into_values().collect())
    }

    /// Children lists by position.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (i, p) in self.parents.iter().enumerate() {
            if let Some(p) = p {
                out[*p].push(i);
            }
        }
        out
    }

    /// Positions in breadth-first order from the prototypes.
    pub fn bfs_order(&self) -> Vec<usize> {
        let children = self.children();
        let mut queue: VecDeque<usize> = (0..self.len())
            .filter(|i| self.parents[*i].is_none())
            .collect();
        let mut out = Vec::with_capacity(self.len());
        while let Some(i) = queue.pop_front() {
            out.push(i);
            queue.extend(children[i].iter().copied());
        }
        out
    }
}

/// The clusters of senses induced by the prototypes of a forest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomonymyPartition {
    pub word: String,
    /// Sorted by smallest member.
    pub clusters: Vec<BTreeSet<SenseIndex>>,
}

impl HomonymyPartition {
    pub fn new(word: String, mut clusters: Vec<BTreeSet<SenseIndex>>) -> Self {
        clusters.retain(|c| !c.is_empty());
        clusters.sort_by_key(|c| c.iter().next().copied());
        HomonymyPartition { word, clusters }
    }

    pub fn senses(&self) -> BTreeSet<SenseIndex> {
        self.clusters.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster number of every sense.
    pub fn assignment(&self) -> BTreeMap<SenseIndex, usize> {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(c, members)| members.iter().map(move |s| (*s, c)))
            .collect()
    }

    /// Every cluster of `self` lies inside a cluster of `other`.
    pub fn refines(&self, other: &HomonymyPartition) -> bool {
        let theirs = other.assignment();
        self.clusters.iter().all(|c| {
            let mut owners = c.iter().map(|s| theirs.get(s));
            match owners.next() {
                Some(Some(first)) => owners.all(|o| o == Some(first)),
                _ => false,
            }
        })
    }

    /// Restricts the partition to `keep`, dropping emptied clusters.
    pub fn restricted_to(&self, keep: &BTreeSet<SenseIndex>) -> HomonymyPartition {
        HomonymyPartition::new(
            self.word.clone(),
            self.clusters
                .iter()
                .map(|c| c.intersection(keep).copied().collect())
                .collect(),
        )
    }
}

/// Homonymy partition of a valid annotation: one cluster per prototype.
pub fn partition(annotation: &WordAnnotation) -> Result<HomonymyPartition> {
    annotation.ensure_valid()?;
    Ok(Parse::from_annotation(annotation)?.partition())
}

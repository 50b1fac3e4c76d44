//! Tree decoders: undirected minimum spanning trees over sense vectors,
//! maximum spanning arborescences over edge scores, orientation of an
//! undirected tree away from its prototype, and n-best variants obtained by
//! forbidding one edge at a time.

use std::collections::VecDeque;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SenseKind;
use crate::parse::Parse;
use crate::sense::SenseIndex;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::malformed("metric", format!("unknown metric `{other}`"))),
        }
    }
}

/// Kruskal's algorithm over the complete graph, ties broken by the
/// lexicographically smaller `(i, j)` with `i < j`. Edges in `forbidden`
/// (either orientation) are unavailable; `None` if what remains does not
/// span.
pub fn undirected_mst_without(
    points: &[&[f64]],
    metric: Metric,
    forbidden: &[(usize, usize)],
) -> Result<Option<Vec<(usize, usize)>>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::NoSenses);
    }
    let dim = points[0].len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                location: format!("point {i}"),
                expected: dim,
                found: p.len(),
            });
        }
    }
    let banned = |i: usize, j: usize| forbidden.iter().any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j));
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            if !banned(i, j) {
                edges.push((metric.distance(points[i], points[j]), i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut sets = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (_, i, j) in edges {
        if sets.union(i, j) {
            tree.push((i, j));
        }
    }
    Ok((tree.len() + 1 == n).then_some(tree))
}

pub fn undirected_mst(points: &[&[f64]], metric: Metric) -> Result<Vec<(usize, usize)>> {
    Ok(undirected_mst_without(points, metric, &[])?.expect("complete graph spans"))
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Maximum spanning arborescence rooted at node 0 (Chu-Liu/Edmonds).
/// `scores[[h, d]]` scores the edge h → d; non-finite entries, the diagonal
/// and edges into node 0 are unusable. Returns each node's head, with
/// `heads[0] == 0`.
pub fn max_arborescence(scores: &Array2<f64>) -> Result<Vec<usize>> {
    let n = scores.nrows();
    if n != scores.ncols() {
        return Err(Error::DimensionMismatch {
            location: "score matrix".into(),
            expected: n,
            found: scores.ncols(),
        });
    }
    let s: Vec<Vec<f64>> = (0..n)
        .map(|h| {
            (0..n)
                .map(|d| {
                    let v = scores[[h, d]];
                    if h == d || d == 0 || !v.is_finite() {
                        f64::NEG_INFINITY
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut heads = chu_liu_edmonds(&s).map_err(Error::Unreachable)?;
    if n > 0 {
        heads[0] = 0;
    }
    Ok(heads)
}

fn chu_liu_edmonds(s: &[Vec<f64>]) -> std::result::Result<Vec<usize>, usize> {
    let n = s.len();
    let mut best = vec![0usize; n];
    for v in 1..n {
        let mut arg = None;
        for u in 0..n {
            if s[u][v] > f64::NEG_INFINITY && arg.is_none_or(|a: usize| s[u][v] > s[a][v]) {
                arg = Some(u);
            }
        }
        best[v] = arg.ok_or(v)?;
    }

    let Some(cycle) = find_cycle(&best) else {
        return Ok(best);
    };
    let in_cycle: Vec<bool> = (0..n).map(|v| cycle.contains(&v)).collect();
    // contracted graph: outside nodes keep their order, the cycle becomes the last node
    let outside: Vec<usize> = (0..n).filter(|v| !in_cycle[*v]).collect();
    let m = outside.len() + 1;
    let c = m - 1;
    let mut new_of = vec![c; n];
    for (i, &v) in outside.iter().enumerate() {
        new_of[v] = i;
    }
    let mut t = vec![vec![f64::NEG_INFINITY; m]; m];
    let mut enter = vec![usize::MAX; n];
    let mut leave = vec![usize::MAX; n];
    for &u in &outside {
        for &v in &outside {
            t[new_of[u]][new_of[v]] = s[u][v];
        }
        for &v in &cycle {
            if s[u][v] == f64::NEG_INFINITY {
                continue;
            }
            let gain = s[u][v] - s[best[v]][v];
            if enter[u] == usize::MAX || gain > t[new_of[u]][c] {
                t[new_of[u]][c] = gain;
                enter[u] = v;
            }
        }
    }
    for &v in &outside {
        for &u in &cycle {
            if s[u][v] == f64::NEG_INFINITY {
                continue;
            }
            if leave[v] == usize::MAX || s[u][v] > t[c][new_of[v]] {
                t[c][new_of[v]] = s[u][v];
                leave[v] = u;
            }
        }
    }
    let sub = chu_liu_edmonds(&t).map_err(|bad| if bad == c { cycle[0] } else { outside[bad] })?;

    let mut heads = best.clone();
    for &v in &outside {
        if v == 0 {
            continue;
        }
        let p = sub[new_of[v]];
        heads[v] = if p == c { leave[v] } else { outside[p] };
    }
    let u = outside[sub[c]];
    heads[enter[u]] = u;
    Ok(heads)
}

fn find_cycle(best: &[usize]) -> Option<Vec<usize>> {
    let n = best.len();
    let mut state = vec![0u8; n];
    state[0] = 2;
    for start in 1..n {
        let mut path = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = best[v];
        }
        if state[v] == 1 {
            let at = path.iter().position(|x| *x == v).expect("on path");
            return Some(path[at..].to_vec());
        }
        for p in path {
            state[p] = 2;
        }
    }
    None
}

/// Sum of `scores[[heads[d], d]]` over non-root nodes.
pub fn tree_score(scores: &Array2<f64>, heads: &[usize]) -> f64 {
    (1..heads.len()).map(|d| scores[[heads[d], d]]).sum()
}

/// Directs an undirected tree away from `prototype` by breadth-first search
/// and attaches labels. A non-prototype node whose label is `Prototype`
/// takes `fallback[i]` instead.
pub fn orient_and_label(
    word: &str,
    ids: &[SenseIndex],
    edges: &[(usize, usize)],
    labels: &[SenseKind],
    fallback: &[SenseKind],
) -> Result<Parse> {
    let n = ids.len();
    let prototype = labels
        .iter()
        .position(|k| *k == SenseKind::Prototype)
        .ok_or(Error::NoPrototype)?;
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    let mut parents = vec![None; n];
    let mut seen = vec![false; n];
    seen[prototype] = true;
    let mut queue = VecDeque::from([prototype]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                parents[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::Unreachable(v));
    }
    let kinds = (0..n)
        .map(|i| {
            if i == prototype {
                SenseKind::Prototype
            } else if labels[i] == SenseKind::Prototype {
                fallback[i]
            } else {
                labels[i]
            }
        })
        .collect();
    Parse::new(word, ids.to_vec(), kinds, parents)
}

/// One directed edge of a parse, by position; `head == None` is the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseEdge {
    pub head: Option<usize>,
    pub dependent: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NBest {
    /// The original parse first, then distinct variants.
    pub parses: Vec<Parse>,
    /// Edges whose removal left nothing to decode.
    pub skipped: Vec<ParseEdge>,
}

/// The original parse plus, for each of its edges, the parse re-decoded
/// with that edge forbidden. `redecode` returns `None` when no tree avoids
/// the edge. Duplicates are dropped and the list is capped at the number of
/// senses.
pub fn n_best_variants(
    parse: &Parse,
    mut redecode: impl FnMut(ParseEdge) -> Result<Option<Parse>>,
) -> Result<NBest> {
    let cap = parse.len().max(1);
    let mut parses = vec![parse.clone()];
    let mut skipped = Vec::new();
    for dependent in 0..parse.len() {
        if parses.len() >= cap {
            break;
        }
        let edge = ParseEdge {
            head: parse.parents[dependent],
            dependent,
        };
        match redecode(edge)? {
            Some(p) => {
                if !parses.contains(&p) {
                    parses.push(p);
                }
            }
            None => skipped.push(edge),
        }
    }
    Ok(NBest { parses, skipped })
}

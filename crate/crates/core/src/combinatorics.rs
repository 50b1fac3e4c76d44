//! Counting the possible annotations of a word.
//!
//! A single-rooted annotation of `n` senses is an undirected labelled tree
//! (`n^(n-2)` of them), an edge labelling (`k^(n-1)`) and a choice of root
//! (`n`). Homonymy allows any set partition of the senses into such trees,
//! so the total is a sum over set partitions of products of single-root
//! counts.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`count_total`] unless overridden.
pub const DEFAULT_CEILING: usize = 12;

/// Largest `n` accepted by [`enumerate_annotations`].
pub const ENUMERATION_LIMIT: usize = 6;

fn check(n: usize, k_labels: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::NoSenses);
    }
    if k_labels == 0 {
        return Err(Error::NoLabels);
    }
    Ok(())
}

/// Rooted trees with labelled edges on `n` distinguishable senses.
pub fn count_single_root(n: usize, k_labels: u32) -> Result<BigUint> {
    check(n, k_labels)?;
    if n == 1 {
        return Ok(BigUint::one());
    }
    let n_big = BigUint::from(n);
    Ok(n_big.pow(n as u32 - 2) * BigUint::from(k_labels).pow(n as u32 - 1) * n_big)
}

/// Single-rooted trees that respect the default interface restriction with
/// no conduits: metonyms hang only off the prototype, and metaphors never
/// extend metaphors. Metaphors therefore sit at depth one (as leaves) or
/// under a depth-one metonym.
pub fn count_single_root_constructible(n: usize) -> Result<BigUint> {
    check(n, 2)?;
    let m = n - 1;
    let binom = binomials(m);
    // stars(r): ways to arrange r senses as metonyms each carrying a set of
    // metaphor leaves
    let stars = |r: usize| -> BigUint {
        (0..=r)
            .map(|c| {
                if r == 0 {
                    return BigUint::one();
                }
                if c == 0 {
                    return BigUint::zero();
                }
                binom[r][c].clone() * BigUint::from(c).pow((r - c) as u32)
            })
            .fold(BigUint::zero(), |a, b| a + b)
    };
    let inner = (0..=m)
        .map(|leaves| binom[m][leaves].clone() * stars(m - leaves))
        .fold(BigUint::zero(), |a, b| a + b);
    Ok(inner * BigUint::from(n))
}

fn binomials(m: usize) -> Vec<Vec<BigUint>> {
    let mut t = vec![vec![BigUint::zero(); m + 1]; m + 1];
    for i in 0..=m {
        t[i][0] = BigUint::one();
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1].clone() + if j < i { t[i - 1][j].clone() } else { BigUint::zero() };
        }
    }
    t
}

/// Visits every set partition of `{0..n}` as a restricted-growth string.
pub fn for_each_set_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    if n == 0 {
        visit(&[]);
        return;
    }
    let mut rgs = vec![0usize; n];
    // max[i] = largest block number among rgs[..i]
    let mut max = vec![0usize; n];
    loop {
        visit(&rgs);
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if rgs[i] <= max[i - 1] {
                rgs[i] += 1;
                let m = max[i - 1].max(rgs[i]);
                max[i] = m;
                for j in i + 1..n {
                    rgs[j] = 0;
                    max[j] = m;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Histogram of block-size signatures over all set partitions of `[n]`.
fn block_signatures(n: usize) -> HashMap<Vec<usize>, u64> {
    let mut sigs: HashMap<Vec<usize>, u64> = HashMap::new();
    let mut sizes = vec![0usize; n];
    for_each_set_partition(n, |rgs| {
        sizes.iter_mut().for_each(|s| *s = 0);
        for &b in rgs {
            sizes[b] += 1;
        }
        let mut sig: Vec<usize> = sizes.iter().copied().filter(|s| *s > 0).collect();
        sig.sort_unstable();
        *sigs.entry(sig).or_default() += 1;
    });
    sigs
}

fn sum_over_partitions(
    n: usize,
    ceiling: usize,
    single: impl Fn(usize) -> Result<BigUint>,
) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::NoSenses);
    }
    if n > ceiling {
        return Err(Error::CeilingExceeded { n, ceiling });
    }
    let per_size: Vec<BigUint> = (1..=n).map(&single).collect::<Result<_>>()?;
    let mut total = BigUint::zero();
    for (sig, count) in block_signatures(n) {
        let product = sig
            .iter()
            .fold(BigUint::one(), |acc, s| acc * &per_size[s - 1]);
        total += product * BigUint::from(count);
    }
    Ok(total)
}

/// All labelled forests on `n` senses, for `n <= ceiling`.
pub fn count_total_with_ceiling(n: usize, k_labels: u32, ceiling: usize) -> Result<BigUint> {
    check(n, k_labels)?;
    sum_over_partitions(n, ceiling, |s| count_single_root(s, k_labels))
}

pub fn count_total(n: usize, k_labels: u32) -> Result<BigUint> {
    count_total_with_ceiling(n, k_labels, DEFAULT_CEILING)
}

/// Forests whose every tree respects the no-conduit interface restriction.
/// Reported separately from [`count_total`], which counts every forest.
pub fn count_total_constructible(n: usize) -> Result<BigUint> {
    sum_over_partitions(n, DEFAULT_CEILING, count_single_root_constructible)
}

/// Three significant figures in the `mmm×10^e` style of a printed table;
/// numbers below 1000 are shown exactly.
pub fn rounded_3sf(x: &BigUint) -> String {
    let digits = x.to_string();
    if digits.len() <= 3 {
        return digits;
    }
    let mut exp = digits.len() as u32 - 3;
    let scale = BigUint::from(10u32).pow(exp);
    let (q, r) = (x / &scale, x % &scale);
    let mut mantissa = q.to_u64().expect("three digits");
    if r * 2u32 >= scale {
        mantissa += 1;
    }
    if mantissa == 1000 {
        mantissa = 100;
        exp += 1;
    }
    format!("{mantissa}×10^{exp}")
}

/// A labelled forest on senses `0..n`: each sense has a parent (or none,
/// for roots) and, when it has a parent, an edge label below `k_labels`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabelledForest {
    pub parents: Vec<Option<usize>>,
    pub labels: Vec<Option<u32>>,
}

impl LabelledForest {
    pub fn roots(&self) -> usize {
        self.parents.iter().filter(|p| p.is_none()).count()
    }

    /// Whether the forest respects the no-conduit interface restriction when
    /// label 0 is metaphor and label 1 metonymy.
    pub fn is_constructible(&self) -> bool {
        (0..self.parents.len()).all(|i| match (self.parents[i], self.labels[i]) {
            (None, _) => true,
            (Some(p), Some(0)) => self.labels[p] != Some(0),
            (Some(p), Some(_)) => self.parents[p].is_none(),
            (Some(_), None) => false,
        })
    }
}

/// Streams every labelled forest on `n` senses exactly once. The stream is
/// an independent check on [`count_total`]: it walks all parent arrays and
/// keeps the acyclic ones.
pub struct ForestEnumeration {
    n: usize,
    k: u32,
    parent_code: Vec<usize>,
    current: Option<(Vec<Option<usize>>, Vec<usize>, Vec<u32>)>,
    done: bool,
}

pub fn enumerate_annotations(n: usize, k_labels: u32) -> Result<ForestEnumeration> {
    check(n, k_labels)?;
    if n > ENUMERATION_LIMIT {
        return Err(Error::CeilingExceeded {
            n,
            ceiling: ENUMERATION_LIMIT,
        });
    }
    Ok(ForestEnumeration {
        n,
        k: k_labels,
        parent_code: vec![0; n],
        current: None,
        done: false,
    })
}

impl ForestEnumeration {
    /// Decodes the parent odometer (value `n` means root) if acyclic.
    fn decode(&self) -> Option<Vec<Option<usize>>> {
        let n = self.n;
        let parents: Vec<Option<usize>> = self
            .parent_code
            .iter()
            .map(|&c| if c == n { None } else { Some(c) })
            .collect();
        for i in 0..n {
            let mut cur = i;
            for _ in 0..=n {
                match parents[cur] {
                    None => break,
                    Some(p) if p == i => return None,
                    Some(p) => cur = p,
                }
            }
            if parents[cur].is_some() {
                return None;
            }
        }
        Some(parents)
    }

    fn advance_parents(&mut self) -> bool {
        for c in self.parent_code.iter_mut() {
            if *c < self.n {
                *c += 1;
                return true;
            }
            *c = 0;
        }
        false
    }
}

impl Iterator for ForestEnumeration {
    type Item = LabelledForest;

    fn next(&mut self) -> Option<LabelledForest> {
        loop {
            if self.done {
                return None;
            }
            if let Some((parents, edges, labels)) = &mut self.current {
                let forest = LabelledForest {
                    parents: parents.clone(),
                    labels: {
                        let mut l = vec![None; parents.len()];
                        for (e, &node) in edges.iter().enumerate() {
                            l[node] = Some(labels[e]);
                        }
                        l
                    },
                };
                // advance the label odometer
                let mut carried = true;
                for l in labels.iter_mut() {
                    if *l + 1 < self.k {
                        *l += 1;
                        carried = false;
                        break;
                    }
                    *l = 0;
                }
                if carried {
                    self.current = None;
                    if !self.advance_parents() {
                        self.done = true;
                    }
                }
                return Some(forest);
            }
            match self.decode() {
                Some(parents) => {
                    let edges: Vec<usize> =
                        (0..self.n).filter(|&i| parents[i].is_some()).collect();
                    let labels = vec![0; edges.len()];
                    self.current = Some((parents, edges, labels));
                }
                None => {
                    if !self.advance_parents() {
                        self.done = true;
                    }
                }
            }
        }
    }
}

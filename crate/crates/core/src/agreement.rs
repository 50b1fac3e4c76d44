//! Agreement between annotators: homonymy (adjusted Rand index over the
//! prototype partitions), labels (mean pairwise percentage and Fleiss'
//! kappa) and connections (undirected attachment scores).
//!
//! Every sense contributes exactly one attachment, to its parent or to the
//! word root, so attachment scores are per-sense rates. Senses any compared
//! annotator marked unknown, and words marked unknown, are left out.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SenseKind, WordAnnotation};
use crate::parse::{Head, HomonymyPartition, Parse, UndirectedEdge};
use crate::preprocess::preprocess;
use crate::sense::SenseIndex;

/// One annotator's view of one word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordView {
    pub labels: BTreeMap<SenseIndex, SenseKind>,
    pub heads: BTreeMap<SenseIndex, Head>,
    /// Senses the annotator did not know.
    pub unknown: BTreeSet<SenseIndex>,
}

impl WordView {
    pub fn from_parse(parse: &Parse) -> Self {
        WordView {
            labels: parse.ids.iter().copied().zip(parse.kinds.iter().copied()).collect(),
            heads: (0..parse.len()).map(|i| (parse.ids[i], parse.head(i))).collect(),
            unknown: BTreeSet::new(),
        }
    }

    pub fn senses(&self) -> BTreeSet<SenseIndex> {
        self.labels.keys().copied().collect()
    }

    fn prototypes(&self, keep: &BTreeSet<SenseIndex>) -> BTreeSet<SenseIndex> {
        self.labels
            .iter()
            .filter(|(s, k)| **k == SenseKind::Prototype && keep.contains(s))
            .map(|(s, _)| *s)
            .collect()
    }

    fn edge(&self, s: SenseIndex) -> UndirectedEdge {
        UndirectedEdge::new(Head::Sense(s), self.heads[&s])
    }

    pub fn partition(&self, word: &str) -> HomonymyPartition {
        let root = |mut s: SenseIndex| {
            let mut hops = 0;
            while let Head::Sense(p) = self.heads[&s] {
                s = p;
                hops += 1;
                if hops > self.heads.len() {
                    break;
                }
            }
            s
        };
        let mut clusters: BTreeMap<SenseIndex, BTreeSet<SenseIndex>> = BTreeMap::new();
        for s in self.heads.keys() {
            clusters.entry(root(*s)).or_default().insert(*s);
        }
        HomonymyPartition::new(word.to_string(), clusters.into_values().collect())
    }
}

/// All words of one annotator. Carries both the label assignment and the
/// edge set of every word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorView {
    pub annotator: String,
    pub words: BTreeMap<String, WordView>,
}

impl AnnotatorView {
    /// Builds the view from annotations after merging splits and stripping
    /// virtual senses. Unknown words are dropped.
    pub fn from_annotations<'a>(
        annotator: impl Into<String>,
        annotations: impl IntoIterator<Item = &'a WordAnnotation>,
    ) -> Result<Self> {
        let mut words = BTreeMap::new();
        for a in annotations {
            if !a.word_known {
                continue;
            }
            a.ensure_valid()?;
            let pre = preprocess(a).annotation;
            let parse = Parse::from_annotation(&pre)?;
            let mut view = WordView::from_parse(&parse);
            view.unknown = pre
                .senses
                .iter()
                .filter(|s| !s.sense.known)
                .map(|s| s.id())
                .collect();
            words.insert(a.word.clone(), view);
        }
        Ok(AnnotatorView {
            annotator: annotator.into(),
            words,
        })
    }

    pub fn from_parses<'a>(
        annotator: impl Into<String>,
        parses: impl IntoIterator<Item = &'a Parse>,
    ) -> Self {
        AnnotatorView {
            annotator: annotator.into(),
            words: parses
                .into_iter()
                .map(|p| (p.word.clone(), WordView::from_parse(p)))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    /// Every sense.
    All,
    /// Only words whose prototype sets agree across all annotators.
    Ap,
    /// Only senses attached to the same node by the compared annotators.
    Ac,
}

impl std::str::FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Filter::All),
            "ap" => Ok(Filter::Ap),
            "ac" => Ok(Filter::Ac),
            other => Err(Error::malformed("filter", format!("unknown filter `{other}`"))),
        }
    }
}

fn shared_senses(word: &str, views: &[&WordView]) -> Result<BTreeSet<SenseIndex>> {
    let first = views[0].senses();
    for v in &views[1..] {
        if v.senses() != first {
            return Err(Error::MismatchedSenses(word.to_string()));
        }
    }
    let mut keep = first;
    for v in views {
        keep.retain(|s| !v.unknown.contains(s));
    }
    Ok(keep)
}

fn words_in_all<'a>(views: &'a [AnnotatorView]) -> Vec<&'a str> {
    let Some(first) = views.first() else {
        return Vec::new();
    };
    first
        .words
        .keys()
        .filter(|w| views.iter().all(|v| v.words.contains_key(*w)))
        .map(String::as_str)
        .collect()
}

/// Words on which every annotator chose the same prototypes.
fn agree_prototype_words(views: &[AnnotatorView]) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for w in words_in_all(views) {
        let wv: Vec<&WordView> = views.iter().map(|v| &v.words[w]).collect();
        let keep = shared_senses(w, &wv)?;
        let first = wv[0].prototypes(&keep);
        if wv.iter().all(|v| v.prototypes(&keep) == first) {
            out.insert(w.to_string());
        }
    }
    Ok(out)
}

/// One compared sense for one annotator pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairItem {
    pub pair: (usize, usize),
    pub word: String,
    pub sense: SenseIndex,
    pub a: SenseKind,
    pub b: SenseKind,
}

/// The pairwise items that survive `filter`. Filters only drop items; the
/// labels on a surviving item are the same under every filter.
pub fn pairwise_items(views: &[AnnotatorView], filter: Filter) -> Result<Vec<PairItem>> {
    let ap = match filter {
        Filter::Ap => Some(agree_prototype_words(views)?),
        _ => None,
    };
    let mut out = Vec::new();
    for i in 0..views.len() {
        for j in i + 1..views.len() {
            for (w, va) in &views[i].words {
                let Some(vb) = views[j].words.get(w) else {
                    continue;
                };
                if ap.as_ref().is_some_and(|ap| !ap.contains(w)) {
                    continue;
                }
                for s in shared_senses(w, &[va, vb])? {
                    if filter == Filter::Ac && va.heads[&s] != vb.heads[&s] {
                        continue;
                    }
                    out.push(PairItem {
                        pair: (i, j),
                        word: w.clone(),
                        sense: s,
                        a: va.labels[&s],
                        b: vb.labels[&s],
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Scores for prototype, metaphor and metonymy taken one at a time (as a
/// yes/no decision) and for the full three-way label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryScores {
    pub prototype: Option<f64>,
    pub metaphor: Option<f64>,
    pub metonymy: Option<f64>,
    pub any: Option<f64>,
}

impl CategoryScores {
    pub fn get(&self, kind: Option<SenseKind>) -> Option<f64> {
        match kind {
            Some(SenseKind::Prototype) => self.prototype,
            Some(SenseKind::Metaphor) => self.metaphor,
            Some(SenseKind::Metonymy) => self.metonymy,
            None => self.any,
        }
    }

    fn set(&mut self, kind: Option<SenseKind>, v: Option<f64>) {
        match kind {
            Some(SenseKind::Prototype) => self.prototype = v,
            Some(SenseKind::Metaphor) => self.metaphor = v,
            Some(SenseKind::Metonymy) => self.metonymy = v,
            None => self.any = v,
        }
    }
}

const CATEGORIES: [Option<SenseKind>; 4] = [
    Some(SenseKind::Prototype),
    Some(SenseKind::Metaphor),
    Some(SenseKind::Metonymy),
    None,
];

fn matches(kind: Option<SenseKind>, a: SenseKind, b: SenseKind) -> bool {
    match kind {
        Some(c) => (a == c) == (b == c),
        None => a == b,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelAgreement {
    pub filter: Filter,
    /// Pairwise items compared for the percentages.
    pub pair_items: usize,
    /// Items rated by every annotator, used for kappa.
    pub kappa_items: usize,
    /// Mean over annotator pairs, in percent.
    pub percentage: CategoryScores,
    pub kappa: CategoryScores,
}

/// Mean pairwise percentage agreement and Fleiss' kappa over sense labels.
pub fn label_agreement(views: &[AnnotatorView], filter: Filter) -> Result<LabelAgreement> {
    if views.len() < 2 {
        return Err(Error::TooFew {
            needed: 2,
            got: views.len(),
        });
    }
    let items = pairwise_items(views, filter)?;
    let mut percentage = CategoryScores::default();
    for kind in CATEGORIES {
        let mut per_pair: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for it in &items {
            let e = per_pair.entry(it.pair).or_default();
            e.1 += 1;
            if matches(kind, it.a, it.b) {
                e.0 += 1;
            }
        }
        let rates: Vec<f64> = per_pair
            .values()
            .map(|(m, t)| 100.0 * *m as f64 / *t as f64)
            .collect();
        percentage.set(kind, mean(&rates));
    }

    let ratings = full_ratings(views, filter)?;
    let mut kappa = CategoryScores::default();
    kappa.any = fleiss_kappa(&ratings, 3);
    for c in SenseKind::ALL {
        let binary: Vec<Vec<usize>> = ratings
            .iter()
            .map(|r| vec![r[c.ordinal()], r.iter().sum::<usize>() - r[c.ordinal()]])
            .collect();
        kappa.set(Some(c), fleiss_kappa(&binary, 2));
    }

    Ok(LabelAgreement {
        filter,
        pair_items: items.len(),
        kappa_items: ratings.len(),
        percentage,
        kappa,
    })
}

/// Per-item category counts over items seen by every annotator.
fn full_ratings(views: &[AnnotatorView], filter: Filter) -> Result<Vec<Vec<usize>>> {
    let ap = match filter {
        Filter::Ap => Some(agree_prototype_words(views)?),
        _ => None,
    };
    let mut out = Vec::new();
    for w in words_in_all(views) {
        if ap.as_ref().is_some_and(|ap| !ap.contains(w)) {
            continue;
        }
        let wv: Vec<&WordView> = views.iter().map(|v| &v.words[w]).collect();
        for s in shared_senses(w, &wv)? {
            if filter == Filter::Ac && wv.iter().any(|v| v.heads[&s] != wv[0].heads[&s]) {
                continue;
            }
            let mut counts = vec![0usize; 3];
            for v in &wv {
                counts[v.labels[&s].ordinal()] += 1;
            }
            out.push(counts);
        }
    }
    Ok(out)
}

/// Fleiss' kappa over a subjects × categories count table in which every
/// subject has the same number of ratings. `None` for an empty table.
/// When all ratings fall in one category, chance agreement is 1 and the
/// observed agreement is perfect; this returns 1.
pub fn fleiss_kappa(table: &[Vec<usize>], categories: usize) -> Option<f64> {
    let n_subjects = table.len();
    if n_subjects == 0 {
        return None;
    }
    let raters = table[0].iter().sum::<usize>();
    if raters < 2 || table.iter().any(|r| r.iter().sum::<usize>() != raters) {
        return None;
    }
    let n = raters as f64;
    let mut totals = vec![0f64; categories];
    let mut p_bar = 0.0;
    for row in table {
        let agree: f64 = row.iter().map(|&c| (c * c.saturating_sub(1)) as f64).sum();
        p_bar += agree / (n * (n - 1.0));
        for (j, &c) in row.iter().enumerate() {
            totals[j] += c as f64;
        }
    }
    p_bar /= n_subjects as f64;
    let all = n * n_subjects as f64;
    let p_e: f64 = totals.iter().map(|t| (t / all).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Some(1.0);
    }
    Some((p_bar - p_e) / (1.0 - p_e))
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Adjusted Rand index (Hubert–Arabie) between two partitions of the same
/// senses.
pub fn adjusted_rand(a: &HomonymyPartition, b: &HomonymyPartition) -> Result<f64> {
    if a.senses() != b.senses() {
        return Err(Error::MismatchedSenses(a.word.clone()));
    }
    let choose2 = |x: usize| (x * x.saturating_sub(1) / 2) as f64;
    let n = a.senses().len();
    let ta = a.assignment();
    let tb = b.assignment();
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (s, ca) in &ta {
        *table.entry((*ca, tb[s])).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| choose2(c)).sum();
    let sum_a: f64 = a.clusters.iter().map(|c| choose2(c.len())).sum();
    let sum_b: f64 = b.clusters.iter().map(|c| choose2(c.len())).sum();
    let total = choose2(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if (max - expected).abs() < 1e-12 {
        // only reachable when both partitions are all-singletons or both one block
        return Ok(if a.clusters == b.clusters { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

/// Mean ARI over words and annotator pairs.
pub fn mean_adjusted_rand(views: &[AnnotatorView]) -> Result<Option<f64>> {
    let mut values = Vec::new();
    for i in 0..views.len() {
        for j in i + 1..views.len() {
            for (w, va) in &views[i].words {
                let Some(vb) = views[j].words.get(w) else {
                    continue;
                };
                let keep = shared_senses(w, &[va, vb])?;
                if keep.is_empty() {
                    continue;
                }
                let pa = va.partition(w).restricted_to(&keep);
                let pb = vb.partition(w).restricted_to(&keep);
                values.push(adjusted_rand(&pa, &pb)?);
            }
        }
    }
    Ok(mean(&values))
}

/// Matches and total attachments between two views of one word. A sense
/// matches when its undirected attachment appears in the other view and,
/// if `labelled`, both views give it the same label.
pub fn attachment_matches(
    word: &str,
    a: &WordView,
    b: &WordView,
    labelled: bool,
) -> Result<(usize, usize)> {
    let keep = shared_senses(word, &[a, b])?;
    let eb: BTreeSet<UndirectedEdge> = keep.iter().map(|s| b.edge(*s)).collect();
    let hits = keep
        .iter()
        .filter(|s| eb.contains(&a.edge(**s)) && (!labelled || a.labels[*s] == b.labels[*s]))
        .count();
    Ok((hits, keep.len()))
}

/// UUAS (or ULAS when `labelled`) in percent, averaged over annotator
/// pairs. Only [`Filter::All`] and [`Filter::Ap`] apply.
pub fn attachment_agreement(
    views: &[AnnotatorView],
    labelled: bool,
    filter: Filter,
) -> Result<Option<f64>> {
    if filter == Filter::Ac {
        return Err(Error::malformed(
            "filter",
            "attachment agreement supports the all and ap filters",
        ));
    }
    let ap = match filter {
        Filter::Ap => Some(agree_prototype_words(views)?),
        _ => None,
    };
    let mut rates = Vec::new();
    for i in 0..views.len() {
        for j in i + 1..views.len() {
            let (mut hits, mut total) = (0, 0);
            for (w, va) in &views[i].words {
                let Some(vb) = views[j].words.get(w) else {
                    continue;
                };
                if ap.as_ref().is_some_and(|ap| !ap.contains(w)) {
                    continue;
                }
                let (h, t) = attachment_matches(w, va, vb, labelled)?;
                hits += h;
                total += t;
            }
            if total > 0 {
                rates.push(100.0 * hits as f64 / total as f64);
            }
        }
    }
    Ok(mean(&rates))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilteredScore {
    pub filter: Filter,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub annotators: Vec<String>,
    pub shared_words: usize,
    pub ari: Option<f64>,
    pub labels: Vec<LabelAgreement>,
    pub uuas: Vec<FilteredScore>,
    pub ulas: Vec<FilteredScore>,
}

pub fn agreement_report(views: &[AnnotatorView], filters: &[Filter]) -> Result<AgreementReport> {
    let mut labels = Vec::new();
    let mut uuas = Vec::new();
    let mut ulas = Vec::new();
    for &f in filters {
        labels.push(label_agreement(views, f)?);
        if f != Filter::Ac {
            uuas.push(FilteredScore {
                filter: f,
                value: attachment_agreement(views, false, f)?,
            });
            ulas.push(FilteredScore {
                filter: f,
                value: attachment_agreement(views, true, f)?,
            });
        }
    }
    Ok(AgreementReport {
        annotators: views.iter().map(|v| v.annotator.clone()).collect(),
        shared_words: words_in_all(views).len(),
        ari: mean_adjusted_rand(views)?,
        labels,
        uuas,
        ulas,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GranularityComparison {
    pub words: usize,
    pub fraction_differing: f64,
    pub mean_clusters_a: f64,
    pub mean_clusters_b: f64,
    /// Among differing words, the share where `a` strictly refines `b`.
    pub fraction_finer: f64,
}

/// Compares two clusterings of the same words (for example annotated
/// homonymy against etymological clusters). Only shared words count.
pub fn compare_granularity(
    a: &BTreeMap<String, HomonymyPartition>,
    b: &BTreeMap<String, HomonymyPartition>,
) -> GranularityComparison {
    let shared: Vec<&String> = a.keys().filter(|w| b.contains_key(*w)).collect();
    let n = shared.len();
    let (mut differing, mut finer, mut ca, mut cb) = (0usize, 0usize, 0usize, 0usize);
    for w in &shared {
        let (pa, pb) = (&a[*w], &b[*w]);
        ca += pa.len();
        cb += pb.len();
        if pa.clusters != pb.clusters {
            differing += 1;
            if pa.refines(pb) {
                finer += 1;
            }
        }
    }
    let ratio = |x: usize, d: usize| if d == 0 { 0.0 } else { x as f64 / d as f64 };
    GranularityComparison {
        words: n,
        fraction_differing: ratio(differing, n),
        mean_clusters_a: ratio(ca, n),
        mean_clusters_b: ratio(cb, n),
        fraction_finer: ratio(finer, differing),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::SenseLabel;

    fn ix(s: &str) -> SenseIndex {
        s.parse().unwrap()
    }

    fn part(clusters: &[&[u32]]) -> HomonymyPartition {
        HomonymyPartition::new(
            "w".into(),
            clusters
                .iter()
                .map(|c| c.iter().map(|i| SenseIndex::Plain(*i)).collect())
                .collect(),
        )
    }

    #[test]
    fn ari_examples() {
        let p = part(&[&[1, 2], &[3, 4]]);
        assert_eq!(adjusted_rand(&p, &p).unwrap(), 1.0);
        let singles = part(&[&[1], &[2], &[3], &[4]]);
        let one = part(&[&[1, 2, 3, 4]]);
        assert!((adjusted_rand(&singles, &one).unwrap() - 0.0).abs() < 1e-12);
        let q = part(&[&[1, 3], &[2, 4]]);
        assert!((adjusted_rand(&p, &q).unwrap() + 0.5).abs() < 1e-12);
        assert!(adjusted_rand(&p, &part(&[&[1, 2, 3]])).is_err());
    }

    fn view(annotator: &str, words: Vec<WordAnnotation>) -> AnnotatorView {
        AnnotatorView::from_annotations(annotator, &words).unwrap()
    }

    fn two_sense(second: SenseLabel) -> WordAnnotation {
        let mut a = fixtures::word("w", &[("1", SenseLabel::prototype()), ("2", second)]);
        if a.senses[1].kind() == SenseKind::Metaphor {
            a.senses[0].features = vec![crate::model::Feature {
                id: 1,
                text: "is".into(),
            }];
            a.senses[1].judgements = vec![crate::model::FeatureJudgement::modified(1, "was")];
        }
        a
    }

    #[test]
    fn three_annotator_label_fixture() {
        let views = vec![
            view("a", vec![two_sense(SenseLabel::metaphor(ix("1")))]),
            view("b", vec![two_sense(SenseLabel::metaphor(ix("1")))]),
            view("c", vec![two_sense(SenseLabel::metonymy(ix("1")))]),
        ];
        let r = label_agreement(&views, Filter::All).unwrap();
        // pairs: (a,b) 2/2, (a,c) 1/2, (b,c) 1/2
        assert!((r.percentage.any.unwrap() - 200.0 / 3.0).abs() < 1e-9);
        assert!((r.kappa.any.unwrap() - 5.0 / 11.0).abs() < 1e-9);
        assert_eq!(r.percentage.prototype, Some(100.0));
        assert_eq!(r.kappa.prototype, Some(1.0));
    }

    #[test]
    fn identical_assignments_agree_fully() {
        let views = vec![
            view("a", vec![fixtures::neck(), fixtures::march()]),
            view("b", vec![fixtures::neck(), fixtures::march()]),
        ];
        for f in [Filter::All, Filter::Ap, Filter::Ac] {
            let r = label_agreement(&views, f).unwrap();
            assert_eq!(r.percentage.any, Some(100.0));
            assert_eq!(r.kappa.any, Some(1.0));
        }
        assert_eq!(attachment_agreement(&views, false, Filter::All).unwrap(), Some(100.0));
        assert_eq!(attachment_agreement(&views, true, Filter::Ap).unwrap(), Some(100.0));
        assert_eq!(mean_adjusted_rand(&views).unwrap(), Some(1.0));
    }

    #[test]
    fn half_shared_attachments() {
        // a: 1 root, 2<-1, 3<-1, 4<-1 ; b: 1 root, 2<-1, 3<-2, 4<-3
        let a = Parse::from_entries(
            "w",
            &[
                pe("1", SenseKind::Prototype, None),
                pe("2", SenseKind::Metonymy, Some("1")),
                pe("3", SenseKind::Metonymy, Some("1")),
                pe("4", SenseKind::Metonymy, Some("1")),
            ],
        )
        .unwrap();
        let b = Parse::from_entries(
            "w",
            &[
                pe("1", SenseKind::Prototype, None),
                pe("2", SenseKind::Metonymy, Some("1")),
                pe("3", SenseKind::Metonymy, Some("2")),
                pe("4", SenseKind::Metonymy, Some("3")),
            ],
        )
        .unwrap();
        let views = vec![
            AnnotatorView::from_parses("a", [&a]),
            AnnotatorView::from_parses("b", [&b]),
        ];
        assert_eq!(attachment_agreement(&views, false, Filter::All).unwrap(), Some(50.0));
    }

    fn pe(id: &str, label: SenseKind, parent: Option<&str>) -> crate::parse::ParseEntry {
        crate::parse::ParseEntry {
            id: ix(id),
            label,
            parent: parent.map(ix),
        }
    }

    #[test]
    fn reversed_edge_counts_as_shared_when_undirected() {
        let a = Parse::from_entries(
            "w",
            &[
                pe("1", SenseKind::Prototype, None),
                pe("2", SenseKind::Metonymy, Some("1")),
            ],
        )
        .unwrap();
        let b = Parse::from_entries(
            "w",
            &[
                pe("1", SenseKind::Metonymy, Some("2")),
                pe("2", SenseKind::Prototype, None),
            ],
        )
        .unwrap();
        let views = vec![
            AnnotatorView::from_parses("a", [&a]),
            AnnotatorView::from_parses("b", [&b]),
        ];
        assert_eq!(attachment_agreement(&views, false, Filter::All).unwrap(), Some(50.0));
        // sense 2 shares its edge but not its label
        assert_eq!(attachment_agreement(&views, true, Filter::All).unwrap(), Some(0.0));
    }

    #[test]
    fn unknown_senses_are_excluded() {
        let mut n1 = fixtures::neck();
        n1.sense_mut(ix("3")).unwrap().sense.known = false;
        let mut n2 = fixtures::neck();
        n2.sense_mut(ix("3")).unwrap().label = SenseLabel::metonymy(ix("5"));
        n2.sense_mut(ix("5")).unwrap().conduit = true;
        let views = vec![view("a", vec![n1]), view("b", vec![n2])];
        let r = label_agreement(&views, Filter::All).unwrap();
        assert_eq!(r.pair_items, 4);
        assert_eq!(r.percentage.any, Some(100.0));
    }

    #[test]
    fn unknown_words_are_dropped() {
        let mut m = fixtures::march();
        m.word_known = false;
        let v = view("a", vec![m, fixtures::neck()]);
        assert_eq!(v.words.len(), 1);
    }

    #[test]
    fn empty_filtered_set_reports_none() {
        let mut b = fixtures::neck();
        // change the prototype so no word survives AP
        b.senses.iter_mut().for_each(|s| {
            s.label = SenseLabel::prototype();
            s.conduit = false;
            s.features.clear();
            s.judgements.clear();
        });
        let views = vec![view("a", vec![fixtures::neck()]), view("b", vec![b])];
        let r = label_agreement(&views, Filter::Ap).unwrap();
        assert_eq!(r.pair_items, 0);
        assert_eq!(r.percentage.any, None);
        assert_eq!(r.kappa.any, None);
    }

    #[test]
    fn mismatched_senses_are_errors() {
        let views = vec![view("a", vec![fixtures::neck()]), view("b", vec![{
            let mut n = fixtures::neck();
            n.senses.retain(|s| s.id() != ix("5"));
            n
        }])];
        assert!(matches!(
            label_agreement(&views, Filter::All),
            Err(Error::MismatchedSenses(_))
        ));
    }

    #[test]
    fn granularity_examples() {
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for i in 0..10 {
            a.insert(format!("w{i}"), part(&[&[1], &[2]]));
            b.insert(format!("w{i}"), part(&[&[1, 2]]));
        }
        let same = compare_granularity(&a, &a);
        assert_eq!(same.fraction_differing, 0.0);
        let c = compare_granularity(&a, &b);
        assert_eq!(c.fraction_differing, 1.0);
        assert_eq!(c.fraction_finer, 1.0);
        assert_eq!(c.mean_clusters_a, 2.0);
        assert_eq!(c.mean_clusters_b, 1.0);
    }

    #[test]
    fn fleiss_edge_cases() {
        assert_eq!(fleiss_kappa(&[], 3), None);
        assert_eq!(fleiss_kappa(&[vec![2, 0, 0], vec![2, 0, 0]], 3), Some(1.0));
        assert_eq!(fleiss_kappa(&[vec![2, 0], vec![1, 0]], 2), None);
    }
}

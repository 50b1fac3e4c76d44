//! Small hand-built annotations used by tests, examples and the CLI demo.

use crate::model::{
    Feature, FeatureJudgement, SenseAnnotation, SenseLabel, SenseRecord, WordAnnotation,
};
use crate::sense::SenseIndex;

fn ix(s: &str) -> SenseIndex {
    s.parse().expect("fixture index")
}

fn feature(id: u32, text: &str) -> Feature {
    Feature {
        id,
        text: text.to_string(),
    }
}

/// A word annotated only with labels; definitions are placeholders.
pub fn word(name: &str, senses: &[(&str, SenseLabel)]) -> WordAnnotation {
    WordAnnotation {
        word: name.to_string(),
        annotator: "fixture".to_string(),
        word_known: true,
        senses: senses
            .iter()
            .map(|(id, label)| {
                SenseAnnotation::new(
                    SenseRecord::new(ix(id), format!("sense {id} of {name}")),
                    label.clone(),
                )
            })
            .collect(),
    }
}

fn define(a: &mut WordAnnotation, id: &str, definition: &str) {
    a.sense_mut(ix(id)).expect("fixture sense").sense.definition = definition.to_string();
}

/// The first four senses of *march*: two prototypes, a metonymy of the
/// second and a metaphor extending that metonymy.
pub fn march() -> WordAnnotation {
    let mut a = word(
        "march",
        &[
            ("1", SenseLabel::prototype()),
            ("2", SenseLabel::prototype()),
            ("3", SenseLabel::metaphor(ix("4"))),
            ("4", SenseLabel::metonymy(ix("2"))),
        ],
    );
    define(&mut a, "1", "the month following February and preceding April");
    define(
        &mut a,
        "2",
        "the act of marching; walking with regular steps",
    );
    define(&mut a, "3", "a steady advance");
    define(&mut a, "4", "a procession of people walking together");
    a.sense_mut(ix("2")).unwrap().sense.synonyms = vec!["marching".into()];
    a.sense_mut(ix("4")).unwrap().features = vec![
        feature(1, "gradually advances"),
        feature(2, "is a group of people"),
    ];
    a.sense_mut(ix("3")).unwrap().judgements =
        vec![FeatureJudgement::kept(1), FeatureJudgement::lost(2)];
    a
}

/// *neck*: one prototype extended by two metaphors and two metonymies.
pub fn neck() -> WordAnnotation {
    let mut a = word(
        "neck",
        &[
            ("1", SenseLabel::prototype()),
            ("2", SenseLabel::metaphor(ix("1"))),
            ("3", SenseLabel::metonymy(ix("1"))),
            ("4", SenseLabel::metaphor(ix("1"))),
            ("5", SenseLabel::metonymy(ix("1"))),
        ],
    );
    define(
        &mut a,
        "1",
        "the part of an organism that connects the head to the rest of the body",
    );
    define(&mut a, "2", "a narrow elongated projecting strip of land");
    define(&mut a, "3", "a cut of meat from the neck of an animal");
    define(
        &mut a,
        "4",
        "a narrow part of an artifact that resembles a neck in position or form",
    );
    define(&mut a, "5", "an opening in a garment for the neck of the wearer");
    a.sense_mut(ix("1")).unwrap().features = vec![
        feature(1, "is long and narrow"),
        feature(2, "connects the head to the body"),
        feature(3, "is part of a living body"),
    ];
    a.sense_mut(ix("2")).unwrap().judgements = vec![
        FeatureJudgement::kept(1),
        FeatureJudgement::lost(2),
        FeatureJudgement::lost(3),
    ];
    a.sense_mut(ix("4")).unwrap().judgements = vec![
        FeatureJudgement::kept(1),
        FeatureJudgement::modified(2, "connects the top of an object to its body"),
        FeatureJudgement::modified(3, "is part of an artifact"),
    ];
    a
}

/// *bridge* restricted to three homonymous prototypes.
pub fn bridge() -> WordAnnotation {
    let mut a = word(
        "bridge",
        &[
            ("1", SenseLabel::prototype()),
            ("5", SenseLabel::prototype()),
            ("9", SenseLabel::prototype()),
        ],
    );
    define(
        &mut a,
        "1",
        "a structure that allows people or vehicles to cross an obstacle",
    );
    define(&mut a, "5", "any of various card games based on whist");
    define(
        &mut a,
        "9",
        "an upper deck where a ship is steered and the captain stands",
    );
    a
}

/// Metaphor 2 extends prototype 1 and metaphor 3 extends 2; invalid unless
/// 2 is made a conduit.
pub fn metaphor_chain() -> WordAnnotation {
    let mut a = word(
        "chain",
        &[
            ("1", SenseLabel::prototype()),
            ("2", SenseLabel::metaphor(ix("1"))),
            ("3", SenseLabel::metaphor(ix("2"))),
        ],
    );
    a.sense_mut(ix("1")).unwrap().features = vec![feature(1, "is linked"), feature(2, "is metal")];
    a.sense_mut(ix("2")).unwrap().judgements =
        vec![FeatureJudgement::kept(1), FeatureJudgement::lost(2)];
    a.sense_mut(ix("2")).unwrap().features = vec![feature(1, "is a sequence")];
    a.sense_mut(ix("3")).unwrap().judgements =
        vec![FeatureJudgement::modified(1, "is a sequence of shops")];
    a
}

/// *birth* with sense 1 split into a literal half (1A) and a metaphorical
/// half (1B); 2 hangs off 1A and 3 off the conduit 1B.
pub fn birth_split() -> WordAnnotation {
    let mut a = word(
        "birth",
        &[
            ("1A", SenseLabel::prototype()),
            ("1B", SenseLabel::metaphor(ix("1A"))),
            ("2", SenseLabel::metonymy(ix("1A"))),
            ("3", SenseLabel::metonymy(ix("1B"))),
        ],
    );
    define(&mut a, "1A", "the time when a child is born");
    define(&mut a, "1B", "the time when something begins");
    a.sense_mut(ix("1A")).unwrap().features =
        vec![feature(1, "involves a baby"), feature(2, "is a beginning")];
    let b = a.sense_mut(ix("1B")).unwrap();
    b.conduit = true;
    b.judgements = vec![FeatureJudgement::lost(1), FeatureJudgement::kept(2)];
    a
}

/// *twin* with a virtual star-sign sense bridging the chain.
pub fn twin_virtual() -> WordAnnotation {
    let mut a = word(
        "twin",
        &[
            ("1", SenseLabel::prototype()),
            ("2", SenseLabel::metonymy(ix("V1"))),
            ("V1", SenseLabel::metonymy(ix("1"))),
        ],
    );
    define(
        &mut a,
        "1",
        "either of two offspring born at the same time from the same pregnancy",
    );
    define(
        &mut a,
        "2",
        "(astrology) a person who is born while the sun is in Gemini",
    );
    define(
        &mut a,
        "V1",
        "a star sign represented by the twins, Castor and Pollux",
    );
    a.sense_mut(ix("V1")).unwrap().conduit = true;
    a
}

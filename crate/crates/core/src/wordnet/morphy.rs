//! WordNet's morphological processor: exception lists plus the standard
//! suffix-detachment rules, validated against the lemma index.

use super::{LexicalStore, Pos};

const NOUN_RULES: [(&str, &str); 8] = [
    ("s", ""),
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];

const VERB_RULES: [(&str, &str); 8] = [
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
];

const ADJ_RULES: [(&str, &str); 4] = [("er", ""), ("est", ""), ("er", "e"), ("est", "e")];

pub(super) fn morphy(store: &LexicalStore, word: &str, pos: Pos) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let push = |cand: String, out: &mut Vec<String>| {
        if store.lemma_indexed(&cand, pos) && !out.contains(&cand) {
            out.push(cand);
        }
    };

    push(word.to_string(), &mut out);
    if let Some(bases) = store.exception_lookup(word, pos) {
        for base in bases {
            push(base.clone(), &mut out);
        }
    }

    let rules: &[(&str, &str)] = match pos {
        Pos::Noun => &NOUN_RULES,
        Pos::Verb => &VERB_RULES,
        Pos::Adj | Pos::AdjSatellite => &ADJ_RULES,
        Pos::Adv => &[],
    };

    // Nouns ending in "ful" are lemmatized on the prefix ("boxesful").
    let (stem, tail) = if pos == Pos::Noun {
        match word.strip_suffix("ful") {
            Some(prefix) if !prefix.is_empty() => (prefix, "ful"),
            _ => (word, ""),
        }
    } else {
        (word, "")
    };

    for (suffix, ending) in rules {
        if let Some(detached) = stem.strip_suffix(suffix) {
            if detached.is_empty() {
                continue;
            }
            let cand = format!("{detached}{ending}{tail}");
            push(cand, &mut out);
        }
    }
    out
}

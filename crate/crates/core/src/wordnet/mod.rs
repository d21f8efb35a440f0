//! WordNet 3.0 lexical store: flat-file parsing, lemma/sense/relation/gloss
//! queries, and the canonical sense identifiers used throughout the pipeline.
//!
//! The database file grammar is documented in `docs/wordnet_format.md`.

mod files;
mod gloss;
mod morphy;

pub use files::load_wordnet;
pub use gloss::GlossToken;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

/// Part of speech. Adjective satellites keep their own tag internally;
/// lemma lookups merge them with plain adjectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    AdjSatellite,
    Adv,
}

impl Pos {
    pub fn as_char(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::AdjSatellite => 's',
            Pos::Adv => 'r',
        }
    }

    pub fn from_char(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' => Some(Pos::Adj),
            's' => Some(Pos::AdjSatellite),
            'r' => Some(Pos::Adv),
            _ => None,
        }
    }

    /// The part of speech of the index file this POS is listed under.
    /// Satellites share `index.adj` with plain adjectives.
    pub fn index_pos(self) -> Pos {
        match self {
            Pos::AdjSatellite => Pos::Adj,
            other => other,
        }
    }

    /// Lookup compatibility: a query for adjectives covers satellites and
    /// vice versa.
    pub fn matches(self, other: Pos) -> bool {
        self.index_pos() == other.index_pos()
    }

    /// The four lookup parts of speech, in merge order.
    pub const LOOKUP: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Canonical synset identifier: 8-digit zero-padded offset plus POS char,
/// e.g. `08420278n`. This is the token unit of all training text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseId {
    offset: u32,
    pos: Pos,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SenseIdError {
    #[error("offset {0} out of range (must be < 10^8)")]
    OffsetOutOfRange(u64),
    #[error("invalid sense id {0:?}: expected 8 digits followed by a POS char")]
    Invalid(String),
}

impl SenseId {
    pub fn new(offset: u32, pos: Pos) -> Result<SenseId, SenseIdError> {
        if offset >= 100_000_000 {
            return Err(SenseIdError::OffsetOutOfRange(offset as u64));
        }
        Ok(SenseId { offset, pos })
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }

    /// The canonical 9-character string form.
    pub fn render(&self) -> String {
        format!("{:08}{}", self.offset, self.pos.as_char())
    }

    pub fn parse(s: &str) -> Result<SenseId, SenseIdError> {
        let bytes = s.as_bytes();
        if bytes.len() != 9 || !bytes[..8].iter().all(|b| b.is_ascii_digit()) {
            return Err(SenseIdError::Invalid(s.to_string()));
        }
        let offset: u32 = s[..8]
            .parse()
            .map_err(|_| SenseIdError::Invalid(s.to_string()))?;
        let pos = Pos::from_char(bytes[8] as char)
            .ok_or_else(|| SenseIdError::Invalid(s.to_string()))?;
        SenseId::new(offset, pos)
    }
}

impl fmt::Display for SenseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}{}", self.offset, self.pos.as_char())
    }
}

impl FromStr for SenseId {
    type Err = SenseIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SenseId::parse(s)
    }
}

/// The fourteen relations used for corpus enrichment, in the fixed order the
/// graph walk emits them. The first seven of `WORD_SIMILARITY` are the subset
/// used for relation-averaged vectors in the word-similarity task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationType {
    Hypernymy,
    Hyponymy,
    TopicDomain,
    Antonymy,
    MemberMeronym,
    PartMeronym,
    SubstanceMeronym,
    MemberHolonym,
    PartHolonym,
    SubstanceHolonym,
    Causes,
    Entailment,
    Pertainymy,
    DerivationallyRelatedForm,
}

impl RelationType {
    /// All fourteen enrichment relations in walk emission order.
    pub const ALL: [RelationType; 14] = [
        RelationType::Hypernymy,
        RelationType::Hyponymy,
        RelationType::TopicDomain,
        RelationType::Antonymy,
        RelationType::MemberMeronym,
        RelationType::PartMeronym,
        RelationType::SubstanceMeronym,
        RelationType::MemberHolonym,
        RelationType::PartHolonym,
        RelationType::SubstanceHolonym,
        RelationType::Causes,
        RelationType::Entailment,
        RelationType::Pertainymy,
        RelationType::DerivationallyRelatedForm,
    ];

    /// The seven relations averaged into sense vectors for word similarity.
    pub const WORD_SIMILARITY: [RelationType; 7] = [
        RelationType::Hypernymy,
        RelationType::Hyponymy,
        RelationType::Causes,
        RelationType::Entailment,
        RelationType::TopicDomain,
        RelationType::Pertainymy,
        RelationType::DerivationallyRelatedForm,
    ];

    /// Database pointer symbol for this relation.
    pub fn symbol(self) -> &'static str {
        match self {
            RelationType::Hypernymy => "@",
            RelationType::Hyponymy => "~",
            RelationType::TopicDomain => ";c",
            RelationType::Antonymy => "!",
            RelationType::MemberMeronym => "%m",
            RelationType::PartMeronym => "%p",
            RelationType::SubstanceMeronym => "%s",
            RelationType::MemberHolonym => "#m",
            RelationType::PartHolonym => "#p",
            RelationType::SubstanceHolonym => "#s",
            RelationType::Causes => ">",
            RelationType::Entailment => "*",
            RelationType::Pertainymy => "\\",
            RelationType::DerivationallyRelatedForm => "+",
        }
    }

    pub fn from_symbol(sym: &str) -> Option<RelationType> {
        RelationType::ALL.iter().copied().find(|r| r.symbol() == sym)
    }

    /// Antonymy, pertainymy, and derivation are stored between specific
    /// lemmas; everything else links whole synsets.
    pub fn is_lemma_level(self) -> bool {
        matches!(
            self,
            RelationType::Antonymy
                | RelationType::Pertainymy
                | RelationType::DerivationallyRelatedForm
        )
    }
}

/// One relation edge. Lemma-level relations are lifted to synset level; the
/// word numbers (1-based, 0 = whole synset) are kept for fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationEdge {
    pub rel: RelationType,
    pub target: SenseId,
    pub source_word: u8,
    pub target_word: u8,
}

/// A WordNet synset: identifier, member lemmas, gloss, and the enrichment
/// relation edges it participates in as source.
#[derive(Debug, Clone)]
pub struct Synset {
    pub id: SenseId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub relations: Vec<RelationEdge>,
}

impl Synset {
    /// The definition part of the gloss: the `;`-separated chunks that are
    /// not quoted usage examples, rejoined with `"; "`.
    pub fn definition(&self) -> String {
        let mut parts = Vec::new();
        for chunk in self.gloss.split(';') {
            let chunk = chunk.trim();
            if !chunk.starts_with('"') && !chunk.is_empty() {
                parts.push(chunk);
            }
        }
        parts.join("; ")
    }
}

/// A WordNet sense key, e.g. `permit%2:41:00::`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SenseKey(String);

impl SenseKey {
    pub fn parse(raw: &str) -> Result<SenseKey, StoreError> {
        let (lemma, rest) = raw
            .split_once('%')
            .ok_or_else(|| StoreError::MalformedSenseKey(raw.to_string()))?;
        let fields: Vec<&str> = rest.split(':').collect();
        if lemma.is_empty() || fields.len() != 5 {
            return Err(StoreError::MalformedSenseKey(raw.to_string()));
        }
        match fields[0] {
            "1" | "2" | "3" | "4" | "5" => {}
            _ => return Err(StoreError::MalformedSenseKey(raw.to_string())),
        }
        Ok(SenseKey(raw.to_string()))
    }

    pub fn lemma(&self) -> &str {
        self.0.split('%').next().unwrap_or("")
    }

    /// POS encoded in the key's ss_type field (1=n 2=v 3=a 4=r 5=s).
    pub fn pos(&self) -> Pos {
        let ss = self.0.split('%').nth(1).and_then(|r| r.split(':').next());
        match ss {
            Some("1") => Pos::Noun,
            Some("2") => Pos::Verb,
            Some("3") => Pos::Adj,
            Some("4") => Pos::Adv,
            _ => Pos::AdjSatellite,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("missing WordNet file: {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{byte_offset}: {msg}")]
    Malformed {
        file: PathBuf,
        byte_offset: u64,
        msg: String,
    },
    #[error("relation target {target} referenced from {origin} is not in the database")]
    UnresolvedEdge { origin: SenseId, target: SenseId },
    #[error("index entry for {lemma:?} ({pos}) references missing synset {target}")]
    UnresolvedIndexEntry {
        lemma: String,
        pos: Pos,
        target: SenseId,
    },
    #[error("word {lemma:?} of synset {id} has no index entry")]
    MissingIndexEntry { lemma: String, id: SenseId },
    #[error("sense key {key}: {msg}")]
    BadSenseKey { key: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown sense id {0}")]
    UnknownSense(SenseId),
    #[error("unknown sense key {0}")]
    UnknownSenseKey(String),
    #[error("malformed sense key {0:?}")]
    MalformedSenseKey(String),
}

/// Sort key reproducing the conventional synset naming order:
/// first member lemma, POS char, then that lemma's sense number.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct NameKey {
    pub lemma: String,
    pub pos: char,
    pub sense_no: u32,
}

/// Immutable in-memory WordNet database. Safe to share across threads.
pub struct LexicalStore {
    synsets: HashMap<SenseId, Synset>,
    load_order: Vec<SenseId>,
    lemma_index: HashMap<(String, Pos), Vec<SenseId>>,
    sense_keys: HashMap<String, (SenseId, u8)>,
    exceptions: HashMap<(String, Pos), Vec<String>>,
    name_keys: HashMap<SenseId, NameKey>,
    stopwords: std::collections::HashSet<&'static str>,
}

impl LexicalStore {
    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }

    pub fn synset(&self, id: SenseId) -> Result<&Synset, StoreError> {
        self.synsets.get(&id).ok_or(StoreError::UnknownSense(id))
    }

    pub fn contains(&self, id: SenseId) -> bool {
        self.synsets.contains_key(&id)
    }

    /// All synsets in database order (noun, verb, adj, adv files; line order
    /// within each file).
    pub fn synsets(&self) -> impl Iterator<Item = &Synset> + '_ {
        self.load_order.iter().map(move |id| &self.synsets[id])
    }

    /// Senses of a lemma ordered by WordNet sense number. An unknown lemma is
    /// an empty list. Without a POS, the four lookup parts of speech are
    /// merged in n, v, a, r order.
    pub fn senses_of(&self, lemma: &str, pos: Option<Pos>) -> Vec<SenseId> {
        let key = normalize_lemma(lemma);
        match pos {
            Some(p) => self
                .lemma_index
                .get(&(key, p.index_pos()))
                .cloned()
                .unwrap_or_default(),
            None => Pos::LOOKUP
                .iter()
                .flat_map(|p| {
                    self.lemma_index
                        .get(&(key.clone(), *p))
                        .into_iter()
                        .flatten()
                        .copied()
                })
                .collect(),
        }
    }

    /// WordNet first sense: the backoff answer everywhere a model cannot
    /// decide.
    pub fn first_sense(&self, lemma: &str, pos: Pos) -> Option<SenseId> {
        self.senses_of(lemma, Some(pos)).first().copied()
    }

    pub fn has_lemma(&self, lemma: &str) -> bool {
        !self.senses_of(lemma, None).is_empty()
    }

    /// Targets of the requested relation types, ordered by relation type
    /// (enumeration order) and by synset name within a type. Duplicates are
    /// preserved; lemma-level relations resolve to the target synset.
    pub fn related(&self, id: SenseId, types: &[RelationType]) -> Result<Vec<SenseId>, StoreError> {
        let synset = self.synset(id)?;
        let mut out = Vec::new();
        for rt in RelationType::ALL {
            if !types.contains(&rt) {
                continue;
            }
            let mut targets: Vec<SenseId> = synset
                .relations
                .iter()
                .filter(|e| e.rel == rt)
                .map(|e| e.target)
                .collect();
            targets.sort_by(|a, b| self.name_keys[a].cmp(&self.name_keys[b]));
            out.extend(targets);
        }
        Ok(out)
    }

    /// Resolve a sense key from `index.sense` to its synset.
    pub fn resolve_sense_key(&self, key: &str) -> Result<SenseId, StoreError> {
        let parsed = SenseKey::parse(key)?;
        self.sense_keys
            .get(parsed.as_str())
            .map(|(id, _)| *id)
            .ok_or_else(|| StoreError::UnknownSenseKey(key.to_string()))
    }

    /// All sense keys in load order, for integrity scans.
    pub fn sense_key_entries(&self) -> impl Iterator<Item = (&str, SenseId)> + '_ {
        self.sense_keys.iter().map(|(k, (id, _))| (k.as_str(), *id))
    }

    /// Content tokens of a synset's definition (examples stripped, stopwords
    /// and punctuation removed), lemmatized and tagged by the simple tagger.
    pub fn gloss_tokens(&self, id: SenseId) -> Result<Vec<GlossToken>, StoreError> {
        let synset = self.synset(id)?;
        Ok(gloss::tokenize_definition(&synset.definition(), self))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word.to_lowercase().as_str())
    }

    /// Base forms of a word per WordNet's morphological rules: exception
    /// lists first where they apply, then the word itself if indexed, then
    /// detachment rules. Deduplicated, deterministic order.
    pub fn morphy(&self, word: &str, pos: Pos) -> Vec<String> {
        morphy::morphy(self, &normalize_lemma(word), pos.index_pos())
    }

    pub(crate) fn exception_lookup(&self, word: &str, pos: Pos) -> Option<&Vec<String>> {
        self.exceptions.get(&(word.to_string(), pos))
    }

    pub(crate) fn lemma_indexed(&self, lemma: &str, pos: Pos) -> bool {
        self.lemma_index.contains_key(&(lemma.to_string(), pos.index_pos()))
    }
}

/// Lowercase, spaces to underscores: the lemma-index key form.
pub fn normalize_lemma(lemma: &str) -> String {
    lemma.to_lowercase().replace(' ', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sense_id_renders_nine_chars() {
        let id = SenseId::new(8420278, Pos::Noun).unwrap();
        assert_eq!(id.render(), "08420278n");
        assert_eq!(id.render().len(), 9);
    }

    #[test]
    fn sense_id_round_trip() {
        for (off, pos) in [
            (0u32, Pos::Noun),
            (802318, Pos::Verb),
            (99999999, Pos::AdjSatellite),
            (123, Pos::Adv),
            (4567, Pos::Adj),
        ] {
            let id = SenseId::new(off, pos).unwrap();
            assert_eq!(SenseId::parse(&id.render()).unwrap(), id);
        }
    }

    #[test]
    fn sense_id_rejects_bad_strings() {
        assert!(SenseId::parse("0802318v").is_err()); // 7 digits
        assert!(SenseId::parse("008023181v").is_err()); // 9 digits + pos
        assert!(SenseId::parse("00802318x").is_err()); // bad pos
        assert!(SenseId::parse("0080231v8").is_err());
        assert!(SenseId::parse("").is_err());
        assert!(SenseId::new(100_000_000, Pos::Noun).is_err());
    }

    #[test]
    fn relation_symbols_round_trip() {
        for rt in RelationType::ALL {
            assert_eq!(RelationType::from_symbol(rt.symbol()), Some(rt));
        }
        assert_eq!(RelationType::from_symbol("&"), None);
    }

    #[test]
    fn sense_key_grammar() {
        let key = SenseKey::parse("permit%2:41:00::").unwrap();
        assert_eq!(key.lemma(), "permit");
        assert_eq!(key.pos(), Pos::Verb);
        let sat = SenseKey::parse("fluffy%5:00:00:furry:00").unwrap();
        assert_eq!(sat.pos(), Pos::AdjSatellite);
        assert!(SenseKey::parse("no-percent-sign").is_err());
        assert!(SenseKey::parse("x%9:00:00::").is_err());
        assert!(SenseKey::parse("x%2:41:00:").is_err());
    }

    #[test]
    fn definition_strips_examples() {
        let synset = Synset {
            id: SenseId::new(1, Pos::Verb).unwrap(),
            lemmas: vec!["permit".into()],
            gloss: "consent to, give permission; \"She permitted her son to visit\"; \"I won't let them\"".into(),
            relations: vec![],
        };
        assert_eq!(synset.definition(), "consent to, give permission");
    }

    #[test]
    fn definition_keeps_multi_chunk_definitions() {
        let synset = Synset {
            id: SenseId::new(2, Pos::Verb).unwrap(),
            lemmas: vec!["lend".into()],
            gloss: "give temporarily; let have for a limited time; \"I will lend you my car\"".into(),
            relations: vec![],
        };
        assert_eq!(synset.definition(), "give temporarily; let have for a limited time");
    }
}

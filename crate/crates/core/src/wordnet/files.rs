//! Parsers for the WordNet 3.0 database directory: `data.{noun,verb,adj,adv}`,
//! `index.{noun,verb,adj,adv}`, `index.sense`, and the optional morphological
//! exception files `*.exc`.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::{
    LexicalStore, LoadError, NameKey, Pos, RelationEdge, RelationType, SenseId, SenseKey, Synset,
    normalize_lemma,
};

const DATA_FILES: [(&str, Pos); 4] = [
    ("data.noun", Pos::Noun),
    ("data.verb", Pos::Verb),
    ("data.adj", Pos::Adj),
    ("data.adv", Pos::Adv),
];

const INDEX_FILES: [(&str, Pos); 4] = [
    ("index.noun", Pos::Noun),
    ("index.verb", Pos::Verb),
    ("index.adj", Pos::Adj),
    ("index.adv", Pos::Adv),
];

const EXC_FILES: [(&str, Pos); 4] = [
    ("noun.exc", Pos::Noun),
    ("verb.exc", Pos::Verb),
    ("adj.exc", Pos::Adj),
    ("adv.exc", Pos::Adv),
];

/// Load a WordNet 3.0 database directory into an immutable store.
///
/// Fails on a missing core file, a malformed line (reported with file and
/// byte offset), an unresolved relation or index target, or a sense key that
/// does not match its synset.
pub fn load_wordnet(db_root: impl AsRef<Path>) -> Result<LexicalStore, LoadError> {
    let root = db_root.as_ref();

    let mut synsets: HashMap<SenseId, Synset> = HashMap::new();
    let mut load_order: Vec<SenseId> = Vec::new();
    // (index pos, offset) -> actual id; resolves 'a'/'s' within data.adj.
    let mut by_file: HashMap<(Pos, u32), SenseId> = HashMap::new();

    for (name, file_pos) in DATA_FILES {
        let path = root.join(name);
        let text = read_required(&path)?;
        for (byte_offset, line) in content_lines(&text) {
            let synset = parse_data_line(line, file_pos).map_err(|msg| LoadError::Malformed {
                file: path.clone(),
                byte_offset,
                msg,
            })?;
            let id = synset.id;
            if synsets.insert(id, synset).is_some() {
                return Err(LoadError::Malformed {
                    file: path.clone(),
                    byte_offset,
                    msg: format!("duplicate synset {id}"),
                });
            }
            by_file.insert((file_pos, id.offset()), id);
            load_order.push(id);
        }
    }

    // Resolve relation targets to actual stored ids and enforce referential
    // closure. Pointer pos fields never say 's': a pointer into data.adj may
    // land on a satellite synset, so resolution goes through the file map.
    for id in &load_order {
        let edges = std::mem::take(&mut synsets.get_mut(id).unwrap().relations);
        let mut resolved = Vec::with_capacity(edges.len());
        for mut edge in edges {
            let actual = by_file
                .get(&(edge.target.pos().index_pos(), edge.target.offset()))
                .copied()
                .ok_or(LoadError::UnresolvedEdge {
                    origin: *id,
                    target: edge.target,
                })?;
            edge.target = actual;
            resolved.push(edge);
        }
        synsets.get_mut(id).unwrap().relations = resolved;
    }

    let mut lemma_index: HashMap<(String, Pos), Vec<SenseId>> = HashMap::new();
    for (name, index_pos) in INDEX_FILES {
        let path = root.join(name);
        let text = read_required(&path)?;
        let mut seen: HashSet<String> = HashSet::new();
        for (byte_offset, line) in content_lines(&text) {
            let (lemma, offsets) =
                parse_index_line(line, index_pos).map_err(|msg| LoadError::Malformed {
                    file: path.clone(),
                    byte_offset,
                    msg,
                })?;
            if !seen.insert(lemma.clone()) {
                return Err(LoadError::Malformed {
                    file: path.clone(),
                    byte_offset,
                    msg: format!("duplicate index entry for {lemma:?}"),
                });
            }
            let mut ids = Vec::with_capacity(offsets.len());
            for off in offsets {
                let id = by_file.get(&(index_pos, off)).copied().ok_or(
                    LoadError::UnresolvedIndexEntry {
                        lemma: lemma.clone(),
                        pos: index_pos,
                        target: SenseId::new(off, index_pos).unwrap_or_else(|_| {
                            SenseId::new(0, index_pos).unwrap()
                        }),
                    },
                )?;
                ids.push(id);
            }
            lemma_index.insert((lemma, index_pos), ids);
        }
    }

    // Every data-file word must be reachable through the index; the name keys
    // used for deterministic relation ordering depend on it.
    let mut name_keys: HashMap<SenseId, NameKey> = HashMap::new();
    for synset in synsets.values() {
        let first = normalize_lemma(&synset.lemmas[0]);
        let index_pos = synset.id.pos().index_pos();
        let sense_no = lemma_index
            .get(&(first.clone(), index_pos))
            .and_then(|ids| ids.iter().position(|id| *id == synset.id))
            .map(|p| p as u32 + 1)
            .ok_or_else(|| LoadError::MissingIndexEntry {
                lemma: first.clone(),
                id: synset.id,
            })?;
        name_keys.insert(
            synset.id,
            NameKey {
                lemma: first,
                pos: synset.id.pos().as_char(),
                sense_no,
            },
        );
    }

    let sense_path = root.join("index.sense");
    let sense_text = read_required(&sense_path)?;
    let mut sense_keys: HashMap<String, (SenseId, u8)> = HashMap::new();
    for (byte_offset, line) in content_lines(&sense_text) {
        let mut cols = line.split_whitespace();
        let key_raw = cols.next().ok_or_else(|| LoadError::Malformed {
            file: sense_path.clone(),
            byte_offset,
            msg: "empty sense entry".into(),
        })?;
        let offset: u32 = cols
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| LoadError::Malformed {
                file: sense_path.clone(),
                byte_offset,
                msg: "missing or non-numeric synset offset".into(),
            })?;
        // sense_number and tag_cnt columns are present but unused here
        let key = SenseKey::parse(key_raw).map_err(|e| LoadError::BadSenseKey {
            key: key_raw.to_string(),
            msg: e.to_string(),
        })?;
        let id = by_file
            .get(&(key.pos().index_pos(), offset))
            .copied()
            .ok_or_else(|| LoadError::BadSenseKey {
                key: key_raw.to_string(),
                msg: format!("offset {offset:08} not found in data.{}", key.pos().index_pos()),
            })?;
        let lemma = normalize_lemma(key.lemma());
        let word_no = synsets[&id]
            .lemmas
            .iter()
            .position(|l| normalize_lemma(l) == lemma)
            .ok_or_else(|| LoadError::BadSenseKey {
                key: key_raw.to_string(),
                msg: format!("lemma {lemma:?} is not a member of {id}"),
            })?;
        sense_keys.insert(key_raw.to_string(), (id, word_no as u8));
    }

    let mut exceptions: HashMap<(String, Pos), Vec<String>> = HashMap::new();
    for (name, pos) in EXC_FILES {
        let path = root.join(name);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => return Err(e.into()),
        };
        for (_, line) in content_lines(&text) {
            let mut cols = line.split_whitespace();
            if let Some(inflected) = cols.next() {
                let bases: Vec<String> = cols.map(|c| c.to_string()).collect();
                if !bases.is_empty() {
                    exceptions.insert((inflected.to_string(), pos), bases);
                }
            }
        }
    }

    let stopwords = super::gloss::stopword_set();

    Ok(LexicalStore {
        synsets,
        load_order,
        lemma_index,
        sense_keys,
        exceptions,
        name_keys,
        stopwords,
    })
}

fn read_required(path: &Path) -> Result<String, LoadError> {
    match fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(LoadError::MissingFile(PathBuf::from(path)))
        }
        Err(e) => Err(e.into()),
    }
}

/// Yield (byte offset, line) for every content line, skipping the
/// space-prefixed license header the Princeton distribution carries.
fn content_lines(text: &str) -> impl Iterator<Item = (u64, &str)> {
    let mut offset = 0u64;
    text.split_inclusive('\n').filter_map(move |raw| {
        let start = offset;
        offset += raw.len() as u64;
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.is_empty() || line.starts_with(' ') {
            None
        } else {
            Some((start, line))
        }
    })
}

struct Tokens<'a> {
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn new(s: &'a str) -> Self {
        Tokens {
            iter: s.split_whitespace(),
        }
    }

    fn take(&mut self, what: &str) -> Result<&'a str, String> {
        self.iter
            .next()
            .ok_or_else(|| format!("truncated line: expected {what}"))
    }

    fn finish(mut self) -> Result<(), String> {
        match self.iter.next() {
            None => Ok(()),
            Some(tok) => Err(format!("unexpected trailing token {tok:?}")),
        }
    }
}

fn parse_data_line(line: &str, file_pos: Pos) -> Result<Synset, String> {
    let (fields, gloss) = line
        .split_once(" | ")
        .ok_or_else(|| "missing gloss separator \" | \"".to_string())?;
    let mut toks = Tokens::new(fields);

    let offset: u32 = toks
        .take("synset offset")?
        .parse()
        .map_err(|_| "non-numeric synset offset".to_string())?;
    let _lex_filenum = toks.take("lex_filenum")?;
    let ss_type = toks.take("ss_type")?;
    let pos = match (ss_type, file_pos) {
        ("n", Pos::Noun) => Pos::Noun,
        ("v", Pos::Verb) => Pos::Verb,
        ("a", Pos::Adj) => Pos::Adj,
        ("s", Pos::Adj) => Pos::AdjSatellite,
        ("r", Pos::Adv) => Pos::Adv,
        _ => return Err(format!("ss_type {ss_type:?} not valid in data.{file_pos}")),
    };
    let id = SenseId::new(offset, pos).map_err(|e| e.to_string())?;

    let w_cnt = usize::from_str_radix(toks.take("word count")?, 16)
        .map_err(|_| "word count is not hexadecimal".to_string())?;
    if w_cnt == 0 {
        return Err("synset with zero words".into());
    }
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = toks.take("word")?;
        let _lex_id = u8::from_str_radix(toks.take("lex_id")?, 16)
            .map_err(|_| "lex_id is not hexadecimal".to_string())?;
        lemmas.push(strip_adj_marker(word).to_string());
    }

    let p_cnt: usize = toks
        .take("pointer count")?
        .parse()
        .map_err(|_| "pointer count is not decimal".to_string())?;
    let mut relations = Vec::new();
    for _ in 0..p_cnt {
        let symbol = toks.take("pointer symbol")?;
        let target_offset: u32 = toks
            .take("pointer offset")?
            .parse()
            .map_err(|_| "non-numeric pointer offset".to_string())?;
        let target_pos_char = toks.take("pointer pos")?;
        let target_pos = target_pos_char
            .chars()
            .next()
            .and_then(Pos::from_char)
            .ok_or_else(|| format!("invalid pointer pos {target_pos_char:?}"))?;
        let st = toks.take("pointer source/target")?;
        if st.len() != 4 || u16::from_str_radix(st, 16).is_err() {
            return Err(format!("invalid source/target field {st:?}"));
        }
        let source_word = u8::from_str_radix(&st[..2], 16).unwrap();
        let target_word = u8::from_str_radix(&st[2..], 16).unwrap();
        if let Some(rel) = RelationType::from_symbol(symbol) {
            let target = SenseId::new(target_offset, target_pos).map_err(|e| e.to_string())?;
            relations.push(RelationEdge {
                rel,
                target,
                source_word,
                target_word,
            });
        }
        // pointer types outside the enrichment set are parsed and dropped
    }

    if file_pos == Pos::Verb {
        let f_cnt: usize = toks
            .take("frame count")?
            .parse()
            .map_err(|_| "frame count is not decimal".to_string())?;
        for _ in 0..f_cnt {
            let plus = toks.take("frame marker")?;
            if plus != "+" {
                return Err(format!("expected frame marker '+', found {plus:?}"));
            }
            toks.take("frame number")?;
            toks.take("frame word number")?;
        }
    }
    toks.finish()?;

    Ok(Synset {
        id,
        lemmas,
        gloss: gloss.trim().to_string(),
        relations,
    })
}

fn strip_adj_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(stripped) = word.strip_suffix(marker) {
            return stripped;
        }
    }
    word
}

/// Parse one index line, returning the lemma and its synset offsets in sense
/// order.
fn parse_index_line(line: &str, index_pos: Pos) -> Result<(String, Vec<u32>), String> {
    let mut toks = Tokens::new(line);
    let lemma = toks.take("lemma")?.to_string();
    let pos = toks.take("pos")?;
    if pos != index_pos.as_char().to_string() {
        return Err(format!("pos column {pos:?} does not match index.{index_pos}"));
    }
    let synset_cnt: usize = toks
        .take("synset count")?
        .parse()
        .map_err(|_| "synset count is not decimal".to_string())?;
    let p_cnt: usize = toks
        .take("pointer count")?
        .parse()
        .map_err(|_| "pointer count is not decimal".to_string())?;
    for _ in 0..p_cnt {
        toks.take("pointer symbol")?;
    }
    let _sense_cnt = toks.take("sense count")?;
    let _tagsense_cnt = toks.take("tagsense count")?;
    let mut offsets = Vec::with_capacity(synset_cnt);
    for _ in 0..synset_cnt {
        offsets.push(
            toks.take("synset offset")?
                .parse()
                .map_err(|_| "non-numeric synset offset".to_string())?,
        );
    }
    toks.finish()?;
    if offsets.is_empty() {
        return Err(format!("index entry {lemma:?} lists no synsets"));
    }
    Ok((lemma, offsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_noun_data_line() {
        let line = "08420278 08 n 04 depository_financial_institution 0 bank 0 banking_concern 0 banking_company 0 001 @ 90000011 n 0000 | a financial institution that accepts deposits; \"he cashed a check at the bank\"";
        let synset = parse_data_line(line, Pos::Noun).unwrap();
        assert_eq!(synset.id.render(), "08420278n");
        assert_eq!(synset.lemmas.len(), 4);
        assert_eq!(synset.lemmas[1], "bank");
        assert_eq!(synset.relations.len(), 1);
        assert_eq!(synset.relations[0].rel, RelationType::Hypernymy);
    }

    #[test]
    fn parses_verb_frames_and_lemma_level_pointers() {
        let line = "06689297 09 v 01 permission 0 001 + 00802318 v 0101 02 + 08 00 + 02 00 | approval to do something";
        let synset = parse_data_line(line, Pos::Verb).unwrap();
        assert_eq!(synset.relations[0].rel, RelationType::DerivationallyRelatedForm);
        assert_eq!(synset.relations[0].source_word, 1);
        assert_eq!(synset.relations[0].target_word, 1);
    }

    #[test]
    fn drops_pointers_outside_the_enrichment_set() {
        let line = "90000024 00 s 02 speedy 0 quick 0 001 & 90000020 a 0000 | characterized by speed";
        let synset = parse_data_line(line, Pos::Adj).unwrap();
        assert_eq!(synset.id.pos(), Pos::AdjSatellite);
        assert!(synset.relations.is_empty());
    }

    #[test]
    fn rejects_truncated_lines() {
        let line = "00802318 32 v 04 permit 0 allow 0 | consent to";
        let err = parse_data_line(line, Pos::Verb).unwrap_err();
        assert!(err.contains("truncated"), "{err}");
    }

    #[test]
    fn rejects_pos_mismatch_with_file() {
        let line = "00802318 32 v 01 permit 0 000 00 | consent to";
        assert!(parse_data_line(line, Pos::Noun).is_err());
    }

    #[test]
    fn parses_index_line_in_sense_order() {
        let line = "permit v 3 1 @ 3 1 00802318 90000001 90000002";
        let (lemma, offsets) = parse_index_line(line, Pos::Verb).unwrap();
        assert_eq!(lemma, "permit");
        assert_eq!(offsets, vec![802318, 90000001, 90000002]);
    }

    #[test]
    fn adj_markers_are_stripped() {
        assert_eq!(strip_adj_marker("former(a)"), "former");
        assert_eq!(strip_adj_marker("alone(p)"), "alone");
        assert_eq!(strip_adj_marker("galore(ip)"), "galore");
        assert_eq!(strip_adj_marker("fast"), "fast");
    }

    #[test]
    fn license_header_lines_are_skipped() {
        let text = "  1 This software and database is provided\n  2 more header\npermit v 1 0 1 1 00802318\n";
        let lines: Vec<_> = content_lines(text).collect();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].1.starts_with("permit"));
        assert_eq!(lines[0].0, text.find("permit").unwrap() as u64);
    }
}

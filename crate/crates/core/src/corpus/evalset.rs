//! Reader for the unified all-words WSD evaluation format: a data XML of
//! `text/sentence/{wf,instance}` elements plus a gold key file with lines
//! `instance_id key1 [key2 ...]`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use quick_xml::events::Event;
use quick_xml::Reader;

use crate::wordnet::{LexicalStore, SenseId};

use super::{io_err, map_corpus_pos, CorpusError, TaggedSentence, TaggedToken};

/// A loaded evaluation dataset. `gold` covers every instance in the XML;
/// instances whose keys all failed to resolve have an empty set and are
/// listed in `unresolvable_instances`.
#[derive(Debug)]
pub struct EvalDataset {
    pub name: String,
    pub sentences: Vec<TaggedSentence>,
    pub gold: HashMap<String, HashSet<SenseId>>,
    pub unresolvable_instances: Vec<String>,
    pub unresolved_key_count: usize,
}

impl EvalDataset {
    pub fn instance_count(&self) -> usize {
        self.gold.len()
    }
}

pub fn read_eval_dataset(
    data_xml: impl AsRef<Path>,
    gold_keys: impl AsRef<Path>,
    store: &LexicalStore,
) -> Result<EvalDataset, CorpusError> {
    let data_xml = data_xml.as_ref();
    let sentences = read_data_xml(data_xml, store)?;

    let gold_path = gold_keys.as_ref();
    let raw =
        std::fs::read_to_string(gold_path).map_err(|e| io_err(gold_path, e))?;
    let mut gold: HashMap<String, HashSet<SenseId>> = HashMap::new();
    let mut unresolved_key_count = 0usize;
    for (line_no, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let id = cols.next().ok_or_else(|| CorpusError::Line {
            path: gold_path.to_path_buf(),
            line: line_no + 1,
            msg: "empty gold line".into(),
        })?;
        let mut senses = HashSet::new();
        let mut any = false;
        for key in cols {
            any = true;
            match store.resolve_sense_key(key) {
                Ok(sid) => {
                    senses.insert(sid);
                }
                Err(_) => unresolved_key_count += 1,
            }
        }
        if !any {
            return Err(CorpusError::Line {
                path: gold_path.to_path_buf(),
                line: line_no + 1,
                msg: format!("gold line for {id:?} lists no keys"),
            });
        }
        gold.insert(id.to_string(), senses);
    }

    // Integrity: every instance id in the XML must appear in the gold map.
    let mut missing: Vec<String> = Vec::new();
    for sentence in &sentences {
        for token in &sentence.tokens {
            if let Some(id) = &token.token_id {
                if !gold.contains_key(id) {
                    missing.push(id.clone());
                }
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(CorpusError::GoldIntegrity {
            count: missing.len(),
            first: missing[0].clone(),
        });
    }

    let mut unresolvable_instances: Vec<String> = gold
        .iter()
        .filter(|(_, v)| v.is_empty())
        .map(|(k, _)| k.clone())
        .collect();
    unresolvable_instances.sort();

    let name = data_xml
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(EvalDataset {
        name,
        sentences,
        gold,
        unresolvable_instances,
        unresolved_key_count,
    })
}

/// Expand gold sets through a fine-to-coarse cluster mapping (lines of
/// `sense_key cluster_id`): an instance becomes correct if the chosen sense
/// shares a cluster with any gold key.
pub fn apply_coarse_mapping(
    dataset: &mut EvalDataset,
    mapping: impl AsRef<Path>,
    store: &LexicalStore,
) -> Result<(), CorpusError> {
    let path = mapping.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut key_cluster: HashMap<String, String> = HashMap::new();
    let mut cluster_senses: HashMap<String, HashSet<SenseId>> = HashMap::new();
    for (line_no, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (key, cluster) = match (cols.next(), cols.next()) {
            (Some(k), Some(c)) => (k, c),
            _ => {
                return Err(CorpusError::Line {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    msg: "expected: sense_key cluster_id".into(),
                })
            }
        };
        key_cluster.insert(key.to_string(), cluster.to_string());
        if let Ok(sid) = store.resolve_sense_key(key) {
            cluster_senses.entry(cluster.to_string()).or_default().insert(sid);
        }
    }
    let mut reverse: HashMap<SenseId, Vec<&String>> = HashMap::new();
    for (key, cluster) in &key_cluster {
        if let Ok(sid) = store.resolve_sense_key(key) {
            reverse.entry(sid).or_default().push(cluster);
        }
    }
    for senses in dataset.gold.values_mut() {
        let mut expanded = senses.clone();
        for sid in senses.iter() {
            if let Some(clusters) = reverse.get(sid) {
                for cluster in clusters {
                    if let Some(members) = cluster_senses.get(*cluster) {
                        expanded.extend(members.iter().copied());
                    }
                }
            }
        }
        *senses = expanded;
    }
    Ok(())
}

fn read_data_xml(
    path: &Path,
    _store: &LexicalStore,
) -> Result<Vec<TaggedSentence>, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = Reader::from_reader(BufReader::new(file));
    reader.config_mut().trim_text(true);

    let xml_err = |reader: &Reader<BufReader<File>>, msg: String| CorpusError::Xml {
        path: path.to_path_buf(),
        position: reader.buffer_position(),
        msg,
    };

    let mut sentences = Vec::new();
    let mut text_id = String::new();
    let mut sentence_id: Option<String> = None;
    let mut tokens: Vec<TaggedToken> = Vec::new();
    let mut current: Option<TaggedToken> = None;
    let mut buf = Vec::new();

    loop {
        buf.clear();
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_err(&reader, e.to_string()))?;
        match event {
            Event::Start(e) | Event::Empty(e) => {
                let name = e.name().as_ref().to_vec();
                let get = |attr: &str| -> Result<Option<String>, CorpusError> {
                    match e.try_get_attribute(attr) {
                        Ok(Some(a)) => a
                            .normalized_value(quick_xml::XmlVersion::Implicit1_0)
                            .map(|v| Some(v.into_owned()))
                            .map_err(|err| xml_err(&reader, err.to_string())),
                        Ok(None) => Ok(None),
                        Err(err) => Err(xml_err(&reader, err.to_string())),
                    }
                };
                match name.as_slice() {
                    b"text" => text_id = get("id")?.unwrap_or_default(),
                    b"sentence" => {
                        sentence_id = get("id")?;
                        tokens.clear();
                    }
                    b"wf" | b"instance" => {
                        let token_id = if name == b"instance" {
                            let id = get("id")?;
                            if id.is_none() {
                                return Err(xml_err(
                                    &reader,
                                    "instance element without id".into(),
                                ));
                            }
                            id
                        } else {
                            None
                        };
                        current = Some(TaggedToken {
                            surface: String::new(),
                            lemma: get("lemma")?,
                            pos: get("pos")?.as_deref().and_then(map_corpus_pos),
                            sense: None,
                            token_id,
                        });
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let Some(tok) = current.as_mut() {
                    let piece = t
                        .decode()
                        .map_err(|e| xml_err(&reader, e.to_string()))?;
                    tok.surface.push_str(&piece);
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"wf" | b"instance" => {
                    if let Some(tok) = current.take() {
                        tokens.push(tok);
                    }
                }
                b"sentence" => {
                    if !tokens.is_empty() {
                        sentences.push(TaggedSentence {
                            tokens: std::mem::take(&mut tokens),
                            doc_id: sentence_id.take().unwrap_or_else(|| text_id.clone()),
                        });
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(sentences)
}

//! Corpus and benchmark I/O: UFSAC sense-annotated XML, the unified WSD
//! evaluation format (data XML plus gold key file), word-similarity tables,
//! and the internal one-sentence-per-line training corpus of sense tokens.

mod evalset;
mod ufsac;
mod wordsim_data;

pub use evalset::{read_eval_dataset, apply_coarse_mapping, EvalDataset};
pub use ufsac::UfsacReader;
pub use wordsim_data::read_wordsim;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::wordnet::{Pos, SenseId};

/// One corpus token, optionally sense-annotated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub lemma: Option<String>,
    pub pos: Option<Pos>,
    pub sense: Option<SenseId>,
    /// Evaluation instance id, for tokens read from the unified WSD format.
    pub token_id: Option<String>,
}

impl TaggedToken {
    pub fn untagged(surface: impl Into<String>) -> TaggedToken {
        TaggedToken {
            surface: surface.into(),
            lemma: None,
            pos: None,
            sense: None,
            token_id: None,
        }
    }

    /// True when the token carries enough information to look up senses.
    pub fn is_content(&self) -> bool {
        self.lemma.is_some() && self.pos.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub tokens: Vec<TaggedToken>,
    pub doc_id: String,
}

/// One word-similarity benchmark pair with gold score normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WordPairRecord {
    pub word_a: String,
    pub word_b: String,
    pub gold: f64,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: XML parse error near byte {position}: {msg}")]
    Xml {
        path: PathBuf,
        position: u64,
        msg: String,
    },
    #[error("{path}:{line}: {msg}")]
    Line {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}:{line}:{column}: token {token:?} is not a 9-character sense id")]
    TokenGrammar {
        path: PathBuf,
        line: usize,
        column: usize,
        token: String,
    },
    #[error("{count} instances missing from gold file, first: {first:?}")]
    GoldIntegrity { count: usize, first: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Map a corpus POS tag (Penn Treebank or coarse) onto a lookup POS.
pub fn map_corpus_pos(tag: &str) -> Option<Pos> {
    match tag {
        "n" | "N" | "NOUN" => return Some(Pos::Noun),
        "v" | "V" | "VERB" => return Some(Pos::Verb),
        "a" | "ADJ" | "J" => return Some(Pos::Adj),
        "s" => return Some(Pos::AdjSatellite),
        "r" | "ADV" => return Some(Pos::Adv),
        _ => {}
    }
    match tag.chars().next() {
        Some('N') => Some(Pos::Noun),
        Some('V') => Some(Pos::Verb),
        Some('J') => Some(Pos::Adj),
        Some('R') if tag.starts_with("RB") => Some(Pos::Adv),
        _ => None,
    }
}

/// Write sense-token sentences one per line, canonical 9-character tokens
/// separated by single spaces. Empty sentences are skipped.
pub fn write_training_corpus<I, S>(path: impl AsRef<Path>, sentences: I) -> Result<(), CorpusError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[SenseId]>,
{
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write_training_sentences(&mut w, sentences).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Writer-based variant for streaming pipelines.
pub fn write_training_sentences<W, I, S>(w: &mut W, sentences: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = S>,
    S: AsRef<[SenseId]>,
{
    for sentence in sentences {
        let tokens = sentence.as_ref();
        if tokens.is_empty() {
            continue;
        }
        let mut first = true;
        for id in tokens {
            if !first {
                w.write_all(b" ")?;
            }
            first = false;
            write!(w, "{id}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Streaming reader for the internal training corpus format; the exact
/// inverse of [`write_training_corpus`].
pub struct TrainingCorpusReader {
    path: PathBuf,
    lines: std::io::Lines<BufReader<File>>,
    line_no: usize,
}

impl TrainingCorpusReader {
    pub fn open(path: impl AsRef<Path>) -> Result<TrainingCorpusReader, CorpusError> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path).map_err(|e| io_err(&path, e))?;
        Ok(TrainingCorpusReader {
            path,
            lines: BufReader::new(file).lines(),
            line_no: 0,
        })
    }
}

impl Iterator for TrainingCorpusReader {
    type Item = Result<Vec<SenseId>, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(io_err(&self.path, e))),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut tokens = Vec::new();
            let mut column = 1usize;
            for tok in line.split(' ') {
                match SenseId::parse(tok) {
                    Ok(id) => tokens.push(id),
                    Err(_) => {
                        return Some(Err(CorpusError::TokenGrammar {
                            path: self.path.clone(),
                            line: self.line_no,
                            column,
                            token: tok.to_string(),
                        }))
                    }
                }
                column += tok.len() + 1;
            }
            return Some(Ok(tokens));
        }
    }
}

/// Read a whole training corpus into memory.
pub fn read_training_corpus(path: impl AsRef<Path>) -> Result<Vec<Vec<SenseId>>, CorpusError> {
    TrainingCorpusReader::open(path)?.collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::Pos;

    fn sid(s: &str) -> SenseId {
        SenseId::parse(s).unwrap()
    }

    #[test]
    fn training_corpus_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        let sentences = vec![
            vec![sid("00802318v"), sid("00797697v"), sid("06689297n")],
            vec![sid("08420278n")],
        ];
        write_training_corpus(&path, &sentences).unwrap();
        let back = read_training_corpus(&path).unwrap();
        assert_eq!(back, sentences);
        let raw = std::fs::read_to_string(&path).unwrap();
        assert_eq!(raw, "00802318v 00797697v 06689297n\n08420278n\n");
    }

    #[test]
    fn empty_stream_writes_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        write_training_corpus(&path, Vec::<Vec<SenseId>>::new()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
        assert!(read_training_corpus(&path).unwrap().is_empty());
    }

    #[test]
    fn bad_token_reports_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.txt");
        std::fs::write(&path, "00802318v\n00797697v notasense\n").unwrap();
        let err = read_training_corpus(&path).unwrap_err();
        match err {
            CorpusError::TokenGrammar { line, column, token, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 11);
                assert_eq!(token, "notasense");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn pos_mapping_covers_common_tagsets() {
        assert_eq!(map_corpus_pos("NN"), Some(Pos::Noun));
        assert_eq!(map_corpus_pos("NNS"), Some(Pos::Noun));
        assert_eq!(map_corpus_pos("VBD"), Some(Pos::Verb));
        assert_eq!(map_corpus_pos("JJ"), Some(Pos::Adj));
        assert_eq!(map_corpus_pos("RB"), Some(Pos::Adv));
        assert_eq!(map_corpus_pos("NOUN"), Some(Pos::Noun));
        assert_eq!(map_corpus_pos("ADV"), Some(Pos::Adv));
        assert_eq!(map_corpus_pos("DT"), None);
        assert_eq!(map_corpus_pos("."), None);
    }
}

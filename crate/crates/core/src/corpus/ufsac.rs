//! Streaming reader for UFSAC-style sense-annotated XML
//! (`corpus/document/paragraph/sentence/word` with `surface_form`, `lemma`,
//! `pos`, and `wn30_key` attributes).

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::wordnet::LexicalStore;

use super::{io_err, map_corpus_pos, CorpusError, TaggedSentence, TaggedToken};

pub struct UfsacReader<'a> {
    store: &'a LexicalStore,
    path: PathBuf,
    reader: Reader<BufReader<File>>,
    buf: Vec<u8>,
    doc_id: String,
    sentence_id: Option<String>,
    pending: Vec<TaggedToken>,
    unresolved_keys: usize,
    done: bool,
}

impl<'a> UfsacReader<'a> {
    pub fn open(path: impl AsRef<Path>, store: &'a LexicalStore) -> Result<UfsacReader<'a>, CorpusError> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path).map_err(|e| io_err(&path, e))?;
        let mut reader = Reader::from_reader(BufReader::new(file));
        reader.config_mut().trim_text(true);
        Ok(UfsacReader {
            store,
            path,
            reader,
            buf: Vec::new(),
            doc_id: String::new(),
            sentence_id: None,
            pending: Vec::new(),
            unresolved_keys: 0,
            done: false,
        })
    }

    /// Number of `wn30_key` attributes that did not resolve against the
    /// store; the affected tokens are kept untagged.
    pub fn unresolved_key_count(&self) -> usize {
        self.unresolved_keys
    }

    fn xml_err(&self, msg: impl ToString) -> CorpusError {
        CorpusError::Xml {
            path: self.path.clone(),
            position: self.reader.buffer_position(),
            msg: msg.to_string(),
        }
    }

    fn attr(&self, e: &BytesStart<'_>, name: &str) -> Result<Option<String>, CorpusError> {
        match e.try_get_attribute(name) {
            Ok(Some(a)) => a
                .normalized_value(quick_xml::XmlVersion::Implicit1_0)
                .map(|v| Some(v.into_owned()))
                .map_err(|err| self.xml_err(err)),
            Ok(None) => Ok(None),
            Err(err) => Err(self.xml_err(err)),
        }
    }

    fn word_token(&mut self, e: &BytesStart<'_>) -> Result<TaggedToken, CorpusError> {
        let surface = self
            .attr(e, "surface_form")?
            .unwrap_or_default();
        let mut lemma = self.attr(e, "lemma")?;
        let mut pos = self
            .attr(e, "pos")?
            .as_deref()
            .and_then(map_corpus_pos);
        let token_id = self.attr(e, "id")?;

        let mut sense = None;
        if let Some(keys) = self.attr(e, "wn30_key")? {
            let mut any = false;
            for key in keys.split(';').map(str::trim).filter(|k| !k.is_empty()) {
                any = true;
                if let Ok(id) = self.store.resolve_sense_key(key) {
                    sense = Some(id);
                    if lemma.is_none() {
                        lemma = key.split('%').next().map(str::to_string);
                    }
                    break;
                }
            }
            if any && sense.is_none() {
                self.unresolved_keys += 1;
            }
        }
        // An annotated token must carry a compatible lemma and POS.
        if let Some(id) = sense {
            if pos.map_or(true, |p| !p.matches(id.pos())) {
                pos = Some(id.pos());
            }
            if lemma.is_none() {
                lemma = Some(surface.to_lowercase());
            }
        }
        Ok(TaggedToken {
            surface,
            lemma,
            pos,
            sense,
            token_id,
        })
    }
}

impl Iterator for UfsacReader<'_> {
    type Item = Result<TaggedSentence, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(ev) => ev,
                Err(e) => {
                    self.done = true;
                    return Some(Err(self.xml_err(e)));
                }
            };
            match event {
                Event::Start(e) | Event::Empty(e) => {
                    match e.name().as_ref() {
                        b"document" => {
                            let e = e.into_owned();
                            match self.attr(&e, "id") {
                                Ok(id) => self.doc_id = id.unwrap_or_default(),
                                Err(err) => {
                                    self.done = true;
                                    return Some(Err(err));
                                }
                            }
                        }
                        b"sentence" => {
                            let e = e.into_owned();
                            match self.attr(&e, "id") {
                                Ok(id) => self.sentence_id = id,
                                Err(err) => {
                                    self.done = true;
                                    return Some(Err(err));
                                }
                            }
                            self.pending.clear();
                        }
                        b"word" => {
                            let e = e.into_owned();
                            match self.word_token(&e) {
                                Ok(tok) => self.pending.push(tok),
                                Err(err) => {
                                    self.done = true;
                                    return Some(Err(err));
                                }
                            }
                        }
                        _ => {}
                    }
                }
                Event::End(e) if e.name().as_ref() == b"sentence" => {
                    let tokens = std::mem::take(&mut self.pending);
                    if tokens.is_empty() {
                        continue;
                    }
                    let doc_id = self
                        .sentence_id
                        .take()
                        .unwrap_or_else(|| self.doc_id.clone());
                    return Some(Ok(TaggedSentence { tokens, doc_id }));
                }
                Event::Eof => {
                    self.done = true;
                    return None;
                }
                _ => {}
            }
        }
    }
}

//! The embedding table and its text serialization: a `V D` header line, then
//! one line per token of the 9-character sense id followed by D components.
//! Components are written in shortest round-trip decimal form, so
//! save-then-load reproduces every vector exactly.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::wordnet::SenseId;

use super::TrainError;

/// Provenance digests carried in memory; the text format itself stores only
/// vectors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableMeta {
    pub config_digest: String,
    pub corpus_digest: String,
}

#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dimension: usize,
    tokens: Vec<SenseId>,
    flat: Vec<f32>,
    index: HashMap<SenseId, usize>,
    pub meta: TableMeta,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> EmbeddingTable {
        EmbeddingTable {
            dimension,
            tokens: Vec::new(),
            flat: Vec::new(),
            index: HashMap::new(),
            meta: TableMeta::default(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn push(&mut self, token: SenseId, vector: &[f32]) {
        assert_eq!(vector.len(), self.dimension);
        let idx = self.tokens.len();
        self.tokens.push(token);
        self.flat.extend_from_slice(vector);
        self.index.insert(token, idx);
    }

    pub fn vector(&self, token: SenseId) -> Option<&[f32]> {
        self.index
            .get(&token)
            .map(|i| &self.flat[i * self.dimension..(i + 1) * self.dimension])
    }

    pub fn contains(&self, token: SenseId) -> bool {
        self.index.contains_key(&token)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SenseId, &[f32])> + '_ {
        self.tokens
            .iter()
            .enumerate()
            .map(move |(i, t)| (*t, &self.flat[i * self.dimension..(i + 1) * self.dimension]))
    }

    /// No component may be NaN or infinite; checked after training and load.
    pub fn validate_finite(&self) -> Result<(), TrainError> {
        for (token, vector) in self.iter() {
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(TrainError::NonFiniteVector { token });
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TrainError> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(w, "{} {}", self.len(), self.dimension)?;
            for (token, vector) in self.iter() {
                write!(w, "{token}")?;
                for x in vector {
                    write!(w, " {x}")?;
                }
                writeln!(w)?;
            }
            w.flush()
        })()
        .map_err(|e| io_err(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingTable, TrainError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| io_err(path, e))?
            .ok_or_else(|| format_err(path, 1, "empty model file"))?;
        let mut head = header.split_whitespace();
        let count: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format_err(path, 1, "bad vocabulary count in header"))?;
        let dimension: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| format_err(path, 1, "bad dimension in header"))?;

        let mut table = EmbeddingTable::new(dimension);
        let mut vector = Vec::with_capacity(dimension);
        for (line_no, line) in lines.enumerate() {
            let line_no = line_no + 2;
            let line = line.map_err(|e| io_err(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let token = cols
                .next()
                .and_then(|t| SenseId::parse(t).ok())
                .ok_or_else(|| format_err(path, line_no, "bad sense id token"))?;
            vector.clear();
            for col in cols {
                let x: f32 = col
                    .parse()
                    .map_err(|_| format_err(path, line_no, "non-numeric component"))?;
                vector.push(x);
            }
            if vector.len() != dimension {
                return Err(format_err(
                    path,
                    line_no,
                    format!("expected {} components, found {}", dimension, vector.len()),
                ));
            }
            table.push(token, &vector);
        }
        if table.len() != count {
            return Err(format_err(
                path,
                1,
                format!("header claims {} tokens, file has {}", count, table.len()),
            ));
        }
        table.validate_finite()?;
        Ok(table)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> TrainError {
    TrainError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn format_err(path: &Path, line: usize, msg: impl ToString) -> TrainError {
    TrainError::ModelFormat {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::Pos;

    fn sid(n: u32) -> SenseId {
        SenseId::new(n, Pos::Noun).unwrap()
    }

    #[test]
    fn save_then_load_is_exact() {
        let mut table = EmbeddingTable::new(3);
        table.push(sid(1), &[0.25, -1.5e-7, 3.14159265]);
        table.push(sid(2), &[1.0, 2.0, -0.3333333]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        table.save(&path).unwrap();

        let raw = std::fs::read_to_string(&path).unwrap();
        assert_eq!(raw.lines().count(), 3);
        assert!(raw.starts_with("2 3\n"));

        let back = EmbeddingTable::load(&path).unwrap();
        assert_eq!(back.dimension(), 3);
        assert_eq!(back.vector(sid(1)).unwrap(), table.vector(sid(1)).unwrap());
        assert_eq!(back.vector(sid(2)).unwrap(), table.vector(sid(2)).unwrap());
    }

    #[test]
    fn dimension_mismatch_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        std::fs::write(&path, "1 5\n00000001n 0.1 0.2 0.3 0.4\n").unwrap();
        match EmbeddingTable::load(&path).unwrap_err() {
            TrainError::ModelFormat { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn header_count_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        std::fs::write(&path, "2 2\n00000001n 0.1 0.2\n").unwrap();
        assert!(EmbeddingTable::load(&path).is_err());
    }
}

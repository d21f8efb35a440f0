//! Word-similarity benchmark tables: one pair per line, tab- or
//! comma-separated `word_a, word_b, score`, scores pre-normalized to [-1, 1].

use std::path::Path;

use super::{io_err, CorpusError, WordPairRecord};

pub fn read_wordsim(path: impl AsRef<Path>) -> Result<Vec<WordPairRecord>, CorpusError> {
    let path = path.as_ref();
    let raw = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut records = Vec::new();
    for (line_no, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = if line.contains('\t') {
            line.split('\t').map(str::trim).collect()
        } else {
            line.split(',').map(str::trim).collect()
        };
        if cols.len() != 3 {
            return Err(CorpusError::Line {
                path: path.to_path_buf(),
                line: line_no + 1,
                msg: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let gold: f64 = cols[2].parse().map_err(|_| CorpusError::Line {
            path: path.to_path_buf(),
            line: line_no + 1,
            msg: format!("non-numeric score {:?}", cols[2]),
        })?;
        if !(-1.0..=1.0).contains(&gold) {
            return Err(CorpusError::Line {
                path: path.to_path_buf(),
                line: line_no + 1,
                msg: format!("score {gold} outside the normalized range [-1, 1]"),
            });
        }
        records.push(WordPairRecord {
            word_a: cols[0].to_string(),
            word_b: cols[1].to_string(),
            gold,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_tsv_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.tsv");
        std::fs::write(&path, "car\tautomobile\t0.96\nnoon\tstring\t-0.92\n").unwrap();
        let records = read_wordsim(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].word_a, "car");
        assert_eq!(records[1].gold, -0.92);
    }

    #[test]
    fn reads_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        std::fs::write(&path, "cord,smile,-0.98\n").unwrap();
        let records = read_wordsim(&path).unwrap();
        assert_eq!(records[0].word_b, "smile");
    }

    #[test]
    fn empty_file_is_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.tsv");
        std::fs::write(&path, "").unwrap();
        assert!(read_wordsim(&path).unwrap().is_empty());
    }

    #[test]
    fn non_numeric_score_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.tsv");
        std::fs::write(&path, "car\tautomobile\t0.96\nword\tscore\theader\n").unwrap();
        match read_wordsim(&path).unwrap_err() {
            CorpusError::Line { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn out_of_range_score_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.tsv");
        std::fs::write(&path, "car\tautomobile\t3.92\n").unwrap();
        assert!(read_wordsim(&path).is_err());
    }
}

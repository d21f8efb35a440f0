//! Training vocabulary with the Huffman coding used by hierarchical softmax.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::wordnet::SenseId;

use super::TrainError;

/// One vocabulary entry: token, corpus frequency, and its Huffman code with
/// the inner-node path the hierarchical softmax walks.
#[derive(Debug, Clone)]
pub struct VocabEntry {
    pub token: SenseId,
    pub count: u64,
    /// Binary decisions from the root to this leaf.
    pub code: Vec<bool>,
    /// Inner-node indices (dense in [0, V-1)) matching `code` position-wise.
    pub path: Vec<u32>,
}

#[derive(Debug)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: HashMap<SenseId, usize>,
    /// Sum of counts of all retained tokens.
    pub total_count: u64,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, idx: usize) -> &VocabEntry {
        &self.entries[idx]
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn index_of(&self, token: SenseId) -> Option<usize> {
        self.index.get(&token).copied()
    }

    /// Number of hierarchical-softmax inner nodes.
    pub fn inner_count(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }
}

/// Count token frequencies and build the Huffman tree over every token with
/// frequency >= `min_count`. Tokens sort by (count desc, token asc), so
/// indices and codes are stable across runs. Heap ties break toward the
/// lower node index.
pub fn build_vocabulary(
    corpus: &[Vec<SenseId>],
    min_count: u64,
) -> Result<Vocabulary, TrainError> {
    let mut counts: HashMap<SenseId, u64> = HashMap::new();
    for sentence in corpus {
        for token in sentence {
            *counts.entry(*token).or_insert(0) += 1;
        }
    }
    let mut retained: Vec<(SenseId, u64)> = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count)
        .collect();
    if retained.is_empty() {
        return Err(TrainError::EmptyVocabulary);
    }
    retained.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut entries: Vec<VocabEntry> = retained
        .iter()
        .map(|(token, count)| VocabEntry {
            token: *token,
            count: *count,
            code: Vec::new(),
            path: Vec::new(),
        })
        .collect();
    assign_huffman(&mut entries);

    let index = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.token, i))
        .collect();
    let total_count = entries.iter().map(|e| e.count).sum();
    Ok(Vocabulary {
        entries,
        index,
        total_count,
    })
}

/// Node ids: leaves are 0..V, inner nodes V..2V-1, root is 2V-2. A single
/// token degenerates to an empty code and path; training over it is a no-op.
fn assign_huffman(entries: &mut [VocabEntry]) {
    let v = entries.len();
    if v <= 1 {
        return;
    }
    let mut heap: BinaryHeap<Reverse<(u64, u32)>> = entries
        .iter()
        .enumerate()
        .map(|(i, e)| Reverse((e.count, i as u32)))
        .collect();

    // parent id and which-child bit per node id
    let mut parent = vec![0u32; 2 * v - 1];
    let mut bit = vec![false; 2 * v - 1];
    let mut next_id = v as u32;
    while heap.len() > 1 {
        let Reverse((c1, id1)) = heap.pop().unwrap();
        let Reverse((c2, id2)) = heap.pop().unwrap();
        parent[id1 as usize] = next_id;
        parent[id2 as usize] = next_id;
        bit[id2 as usize] = true;
        heap.push(Reverse((c1 + c2, next_id)));
        next_id += 1;
    }
    let root = next_id - 1;

    for (leaf, entry) in entries.iter_mut().enumerate() {
        let mut code = Vec::new();
        let mut path = Vec::new();
        let mut node = leaf as u32;
        while node != root {
            code.push(bit[node as usize]);
            let p = parent[node as usize];
            path.push(p - v as u32);
            node = p;
        }
        code.reverse();
        path.reverse();
        entry.code = code;
        entry.path = path;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::{Pos, SenseId};

    fn sid(n: u32) -> SenseId {
        SenseId::new(n, Pos::Noun).unwrap()
    }

    fn corpus_from(freqs: &[(u32, usize)]) -> Vec<Vec<SenseId>> {
        // one sentence repeating each token to its frequency
        freqs
            .iter()
            .map(|(tok, n)| vec![sid(*tok); *n])
            .collect()
    }

    #[test]
    fn frequent_tokens_get_shorter_codes() {
        let vocab =
            build_vocabulary(&corpus_from(&[(1, 4), (2, 2), (3, 1)]), 1).unwrap();
        let by_token = |t: u32| vocab.entry(vocab.index_of(sid(t)).unwrap());
        assert!(by_token(1).code.len() <= by_token(2).code.len());
        assert!(by_token(1).code.len() <= by_token(3).code.len());
    }

    #[test]
    fn code_and_path_lengths_agree() {
        let vocab = build_vocabulary(
            &corpus_from(&[(1, 9), (2, 5), (3, 5), (4, 2), (5, 1)]),
            1,
        )
        .unwrap();
        for entry in vocab.entries() {
            assert_eq!(entry.code.len(), entry.path.len());
            assert!(entry
                .path
                .iter()
                .all(|p| (*p as usize) < vocab.inner_count()));
        }
    }

    #[test]
    fn single_token_vocabulary_has_empty_code() {
        let vocab = build_vocabulary(&corpus_from(&[(1, 5)]), 1).unwrap();
        assert_eq!(vocab.len(), 1);
        assert!(vocab.entry(0).code.is_empty());
        assert!(vocab.entry(0).path.is_empty());
    }

    #[test]
    fn min_count_filters() {
        let vocab = build_vocabulary(&corpus_from(&[(1, 4), (2, 1)]), 2).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(vocab.entry(0).token, sid(1));
        assert!(vocab.index_of(sid(2)).is_none());
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(
            build_vocabulary(&[], 1),
            Err(TrainError::EmptyVocabulary)
        ));
    }

    /// Exhaustive merge-order oracle: the Huffman cost must equal the minimum
    /// of sum(freq * depth) over every possible sequence of pairwise merges.
    fn optimal_cost(freqs: &[u64]) -> u64 {
        #[derive(Clone)]
        struct Item {
            weight: u64,
            cost: u64, // accumulated sum of weights of merges below
        }
        fn rec(items: Vec<Item>) -> u64 {
            if items.len() == 1 {
                return items[0].cost;
            }
            let mut best = u64::MAX;
            for i in 0..items.len() {
                for j in (i + 1)..items.len() {
                    let mut next: Vec<Item> = Vec::with_capacity(items.len() - 1);
                    for (k, item) in items.iter().enumerate() {
                        if k != i && k != j {
                            next.push(item.clone());
                        }
                    }
                    let w = items[i].weight + items[j].weight;
                    next.push(Item {
                        weight: w,
                        cost: items[i].cost + items[j].cost + w,
                    });
                    best = best.min(rec(next));
                }
            }
            best
        }
        rec(freqs
            .iter()
            .map(|f| Item {
                weight: *f,
                cost: 0,
            })
            .collect())
    }

    #[test]
    fn huffman_cost_is_optimal_up_to_eight_tokens() {
        let cases: Vec<Vec<u64>> = vec![
            vec![4, 2, 1],
            vec![1, 1, 1, 1],
            vec![9, 5, 5, 2, 1],
            vec![13, 8, 5, 3, 2, 1, 1],
            vec![7, 7, 7, 7, 1, 1, 1, 1],
            vec![21, 13, 8, 5, 3, 2, 1, 1],
        ];
        for freqs in cases {
            let corpus: Vec<Vec<SenseId>> = freqs
                .iter()
                .enumerate()
                .map(|(i, f)| vec![sid(i as u32 + 1); *f as usize])
                .collect();
            let vocab = build_vocabulary(&corpus, 1).unwrap();
            let cost: u64 = vocab
                .entries()
                .iter()
                .map(|e| e.count * e.code.len() as u64)
                .sum();
            assert_eq!(cost, optimal_cost(&freqs), "freqs {freqs:?}");
        }
    }
}

//! Adaptive merge sorts driven by run and upsequence decompositions.
//!
//! Both sorts split the input into sorted pieces and merge them along the
//! binary Huffman tree of the piece lengths, so equal-length pieces meet
//! first and long pieces are touched rarely. Every call to the comparator is
//! counted.

use crate::code_tree::CodeTree;
use crate::merge::merge_along;
use crate::runs::{ascending_runs_by, monotone_runs_with_ties, Direction};
use crate::sus::partition_sus_by;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SortStats {
    pub comparisons: usize,
    /// ρ for run sorts, k for upsequence sorts.
    pub runs_detected: usize,
    /// Entropy of the detected length vector.
    pub entropy: f64,
    /// Element writes during reversals and merges.
    pub element_moves: usize,
}

pub fn sort_by_runs<T: Ord + Clone>(values: &[T], mixed: bool) -> (Vec<T>, SortStats) {
    sort_by_runs_by(values.to_vec(), mixed, |a, b| a < b)
}

/// Stable: equal elements keep their input order.
pub fn sort_by_runs_by<T, F>(mut values: Vec<T>, mixed: bool, mut less: F) -> (Vec<T>, SortStats)
where
    F: FnMut(&T, &T) -> bool,
{
    let mut comparisons = 0usize;
    let mut counted = |a: &T, b: &T| {
        comparisons += 1;
        less(a, b)
    };
    let mut moves = 0;
    let profile = if mixed {
        let (profile, ties) = monotone_runs_with_ties(&values, &mut counted);
        moves += reverse_descending(&mut values, profile.starts(), profile.directions(), &ties);
        profile
    } else {
        ascending_runs_by(&values, &mut counted)
    };
    let lengths = profile.lengths().to_vec();
    let (sorted, merge_moves) = merge_pieces(split(values, &lengths), &lengths, &mut counted);
    let stats = SortStats {
        comparisons,
        runs_detected: lengths.len(),
        entropy: profile.entropy(),
        element_moves: moves + merge_moves,
    };
    (sorted, stats)
}

pub fn sort_by_sus<T: Ord + Clone>(values: &[T]) -> (Vec<T>, SortStats) {
    sort_by_sus_by(values.to_vec(), |a, b| a < b)
}

/// Partitions into non-decreasing subsequences, then merges them.
pub fn sort_by_sus_by<T, F>(values: Vec<T>, mut less: F) -> (Vec<T>, SortStats)
where
    F: FnMut(&T, &T) -> bool,
{
    if values.is_empty() {
        return (values, SortStats::default());
    }
    let mut comparisons = 0usize;
    let mut counted = |a: &T, b: &T| {
        comparisons += 1;
        less(a, b)
    };
    let partition = partition_sus_by(&values, &mut counted).expect("non-empty input");
    let lengths = partition.lengths().to_vec();
    let mut pieces: Vec<Vec<(usize, T)>> = lengths.iter().map(|&m| Vec::with_capacity(m)).collect();
    for ((i, v), &c) in values.into_iter().enumerate().zip(partition.labels()) {
        pieces[c - 1].push((i, v));
    }
    let n: usize = lengths.iter().sum();
    let (sorted, merge_moves) = merge_pieces(pieces, &lengths, &mut counted);
    let stats = SortStats {
        comparisons,
        runs_detected: lengths.len(),
        entropy: partition.entropy(),
        element_moves: n + merge_moves,
    };
    (sorted, stats)
}

fn split<T>(values: Vec<T>, lengths: &[usize]) -> Vec<Vec<(usize, T)>> {
    let mut it = values.into_iter().enumerate();
    lengths.iter().map(|&m| it.by_ref().take(m).collect()).collect()
}

// Pieces carry input positions, which settle ties so the merge is stable
// whatever the leaf order of the tree. Returns the merged output and the
// number of element moves (Σ nᵢ·depthᵢ).
fn merge_pieces<T, F>(mut pieces: Vec<Vec<(usize, T)>>, lengths: &[usize], less: &mut F) -> (Vec<T>, usize)
where
    F: FnMut(&T, &T) -> bool,
{
    let strip = |v: Vec<(usize, T)>| v.into_iter().map(|(_, x)| x).collect();
    if pieces.len() <= 1 {
        return (strip(pieces.pop().unwrap_or_default()), 0);
    }
    let tree = CodeTree::build_huffman(lengths, 2).expect("run lengths are positive");
    let ahead = |a: &(usize, T), b: &(usize, T)| a.0 < b.0;
    let merged = merge_along(&tree, pieces, &mut |a: &(usize, T), b: &(usize, T)| less(&a.1, &b.1), Some(&ahead), false);
    (strip(merged.values), tree.weighted_path_length())
}

/// Reverses each descending run, then restores input order inside blocks of
/// equal elements. Returns the number of element moves.
fn reverse_descending<T>(values: &mut [T], starts: &[usize], directions: &[Direction], ties: &[usize]) -> usize {
    let n = values.len();
    let mut moves = 0;
    let mut t = 0;
    for (r, &s) in starts.iter().enumerate() {
        if !directions[r].is_descending() {
            continue;
        }
        let e = starts.get(r + 1).copied().unwrap_or(n) - 1;
        values[s..=e].reverse();
        moves += e + 1 - s;
        while t < ties.len() && ties[t] < s {
            t += 1;
        }
        // a maximal chain of ties a, a+1, .., b-1 means values[a..=b] are equal
        while t < ties.len() && ties[t] < e {
            let a = ties[t];
            let mut b = a + 1;
            t += 1;
            while t < ties.len() && ties[t] == b && b < e {
                b += 1;
                t += 1;
            }
            values[s + e - b..=s + e - a].reverse();
            moves += b + 1 - a;
        }
    }
    moves
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_runs() {
        let v = [1, 3, 5, 7, 9, 2, 4, 6, 8, 10];
        let (sorted, stats) = sort_by_runs(&v, false);
        assert_eq!(sorted, (1..=10).collect::<Vec<_>>());
        assert_eq!(stats.runs_detected, 2);
        assert!((stats.entropy - 1.0).abs() < 1e-12);
        assert!(stats.comparisons <= 30);
    }

    #[test]
    fn sorted_input_costs_n_minus_one() {
        let v: Vec<u32> = (0..50).collect();
        for mixed in [false, true] {
            let (sorted, stats) = sort_by_runs(&v, mixed);
            assert_eq!(sorted, v);
            assert_eq!(stats.comparisons, 49);
            assert_eq!(stats.runs_detected, 1);
        }
        let (_, stats) = sort_by_sus(&v);
        assert_eq!(stats.comparisons, 49);
        assert_eq!(stats.runs_detected, 1);
    }

    #[test]
    fn reversed_with_mixed_is_one_run() {
        let v: Vec<u32> = (0..40).rev().collect();
        let (sorted, stats) = sort_by_runs(&v, true);
        assert_eq!(sorted, (0..40).collect::<Vec<_>>());
        assert_eq!(stats.comparisons, 39);
        assert_eq!(stats.runs_detected, 1);
    }

    #[test]
    fn mixed_reversal_is_stable() {
        let v = [(5, 'a'), (3, 'b'), (3, 'c'), (3, 'd'), (1, 'e'), (1, 'f'), (2, 'g'), (9, 'h')];
        let (sorted, _) = sort_by_runs_by(v.to_vec(), true, |a, b| a.0 < b.0);
        let mut expected = v.to_vec();
        expected.sort_by_key(|p| p.0);
        assert_eq!(sorted, expected);
    }

    #[test]
    fn sus_example() {
        let v = [1, 6, 2, 7, 3, 8, 4, 9, 5, 10];
        let (sorted, stats) = sort_by_sus(&v);
        assert_eq!(sorted, (1..=10).collect::<Vec<_>>());
        assert_eq!(stats.runs_detected, 2);
    }

    #[test]
    fn empty_and_single() {
        assert!(sort_by_runs::<u8>(&[], true).0.is_empty());
        assert!(sort_by_sus::<u8>(&[]).0.is_empty());
        assert_eq!(sort_by_sus(&[7]).0, vec![7]);
    }
}

//! Contiguous run decompositions and the entropy of a length vector.
//!
//! Positions and values of permutations are 1-based at this interface; the
//! profiles keep 0-based run starts internally and report 1-based boundaries.

use crate::error::{Error, Result};

/// Σ (nᵢ/n) lg(n/nᵢ), in bits per element.
pub fn entropy(lengths: &[usize]) -> Result<f64> {
    if lengths.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = lengths.iter().position(|&l| l == 0) {
        return Err(Error::ZeroFrequency { index });
    }
    Ok(entropy_unchecked(lengths))
}

/// [`entropy`] without validation; zero entries contribute nothing.
pub fn entropy_unchecked(lengths: &[usize]) -> f64 {
    let n: usize = lengths.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    lengths
        .iter()
        .filter(|&&l| l > 0)
        .map(|&l| {
            let lf = l as f64;
            lf * (nf / lf).log2()
        })
        .sum::<f64>()
        / nf
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Ascending,
    Descending,
}

impl Direction {
    pub fn is_descending(self) -> bool {
        self == Direction::Descending
    }
}

/// A partition of a sequence into contiguous monotone runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunProfile {
    starts: Vec<usize>,
    lengths: Vec<usize>,
    directions: Vec<Direction>,
}

impl RunProfile {
    pub(crate) fn from_parts(lengths: Vec<usize>, directions: Vec<Direction>) -> Self {
        debug_assert_eq!(lengths.len(), directions.len());
        let mut starts = Vec::with_capacity(lengths.len());
        let mut acc = 0;
        for &l in &lengths {
            starts.push(acc);
            acc += l;
        }
        Self {
            starts,
            lengths,
            directions,
        }
    }

    /// Number of runs, ρ.
    pub fn run_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn len(&self) -> usize {
        self.lengths.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    /// 1-based start position of every run.
    pub fn boundaries(&self) -> Vec<usize> {
        self.starts.iter().map(|s| s + 1).collect()
    }

    pub(crate) fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// H(vRuns) in bits per element; zero for an empty profile.
    pub fn entropy(&self) -> f64 {
        entropy_unchecked(&self.lengths)
    }

    pub fn has_descending(&self) -> bool {
        self.directions.iter().any(|d| d.is_descending())
    }
}

/// Maximal ranges where consecutive values grow by exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictRunProfile {
    heads: Vec<usize>,
    lengths: Vec<usize>,
    head_values: Vec<usize>,
}

impl StrictRunProfile {
    /// Number of strict runs, τ.
    pub fn run_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// 1-based head positions.
    pub fn heads(&self) -> Vec<usize> {
        self.heads.iter().map(|h| h + 1).collect()
    }

    pub(crate) fn heads0(&self) -> &[usize] {
        &self.heads
    }

    /// π at each head.
    pub fn head_values(&self) -> &[usize] {
        &self.head_values
    }

    pub fn entropy(&self) -> f64 {
        entropy_unchecked(&self.lengths)
    }
}

/// Checks that `perm` holds every value of `[1..n]` exactly once.
pub fn validate_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for (i, &v) in perm.iter().enumerate() {
        if v == 0 || v > n {
            return Err(Error::NotAPermutation {
                n,
                reason: format!("value {v} at position {} outside [1..{n}]", i + 1),
            });
        }
        if std::mem::replace(&mut seen[v - 1], true) {
            return Err(Error::NotAPermutation {
                n,
                reason: format!("value {v} repeated at position {}", i + 1),
            });
        }
    }
    Ok(())
}

/// Ascending runs of `perm`, split at every down step.
pub fn ascending_runs(perm: &[usize]) -> Result<RunProfile> {
    validate_permutation(perm)?;
    Ok(ascending_runs_by(perm, &mut |a, b| a < b))
}

/// Greedy left-to-right monotone runs of `perm`.
pub fn monotone_runs(perm: &[usize]) -> Result<RunProfile> {
    validate_permutation(perm)?;
    Ok(monotone_runs_by(perm, &mut |a, b| a < b))
}

/// Non-decreasing runs of an arbitrary sequence; equal neighbours never split
/// a run. Performs exactly `len - 1` calls to `less` for non-empty input.
pub fn ascending_runs_by<T, F>(values: &[T], less: &mut F) -> RunProfile
where
    F: FnMut(&T, &T) -> bool,
{
    let n = values.len();
    let mut lengths = Vec::new();
    let mut start = 0;
    for i in 1..n {
        if less(&values[i], &values[i - 1]) {
            lengths.push(i - start);
            start = i;
        }
    }
    if n > 0 {
        lengths.push(n - start);
    }
    let directions = vec![Direction::Ascending; lengths.len()];
    RunProfile::from_parts(lengths, directions)
}

/// Greedy monotone runs of an arbitrary sequence.
///
/// The first non-equal pair of a run fixes its direction (an all-equal run is
/// ascending); ascending runs are non-decreasing and descending runs
/// non-increasing. The element where monotonicity breaks opens the next run.
pub fn monotone_runs_by<T, F>(values: &[T], less: &mut F) -> RunProfile
where
    F: FnMut(&T, &T) -> bool,
{
    monotone_scan(values, less)
}

/// Same runs as [`monotone_runs_by`], also reporting every `k` inside a
/// descending run with `values[k] == values[k + 1]`, in increasing order.
///
/// Costs one comparison per adjacent pair plus one per ascending run that
/// ends in a descent (to tell an equal prefix from a rising one) and one
/// per equal pair inside a descending run.
pub(crate) fn monotone_runs_with_ties<T, F>(values: &[T], less: &mut F) -> (RunProfile, Vec<usize>)
where
    F: FnMut(&T, &T) -> bool,
{
    let n = values.len();
    let mut lengths = Vec::new();
    let mut directions = Vec::new();
    let mut ties = Vec::new();
    let mut i = 0;
    while i < n {
        let start = i;
        let mut k = i;
        let mut descending = k + 1 < n && less(&values[k + 1], &values[k]);
        if !descending {
            if k + 1 < n {
                k += 1;
            }
            while k + 1 < n && !less(&values[k + 1], &values[k]) {
                k += 1;
            }
            // a descent after a non-decreasing stretch that never rose
            if k + 1 < n && k > start && !less(&values[start], &values[k]) {
                ties.extend(start..k);
                descending = true;
            }
        }
        if descending {
            k += 1;
            while k + 1 < n {
                if less(&values[k + 1], &values[k]) {
                    k += 1;
                } else if !less(&values[k], &values[k + 1]) {
                    ties.push(k);
                    k += 1;
                } else {
                    break;
                }
            }
        }
        lengths.push(k + 1 - start);
        directions.push(if descending { Direction::Descending } else { Direction::Ascending });
        i = k + 1;
    }
    (RunProfile::from_parts(lengths, directions), ties)
}

// A strict step costs one comparison, an equal pair two.
fn monotone_scan<T, F>(values: &[T], less: &mut F) -> RunProfile
where
    F: FnMut(&T, &T) -> bool,
{
    let n = values.len();
    let mut lengths = Vec::new();
    let mut directions = Vec::new();
    let mut i = 0;
    while i < n {
        let start = i;
        let mut j = i;
        let mut direction = None;
        while j + 1 < n {
            if less(&values[j + 1], &values[j]) {
                direction = Some(Direction::Descending);
                break;
            }
            if less(&values[j], &values[j + 1]) {
                direction = Some(Direction::Ascending);
                break;
            }
            j += 1;
        }
        let Some(direction) = direction else {
            lengths.push(n - start);
            directions.push(Direction::Ascending);
            break;
        };
        // values[start..=j+1] is monotone in `direction`
        let mut k = j + 1;
        match direction {
            Direction::Ascending => {
                while k + 1 < n && !less(&values[k + 1], &values[k]) {
                    k += 1;
                }
            }
            Direction::Descending => {
                while k + 1 < n && !less(&values[k], &values[k + 1]) {
                    k += 1;
                }
            }
        }
        lengths.push(k + 1 - start);
        directions.push(direction);
        i = k + 1;
    }
    RunProfile::from_parts(lengths, directions)
}

/// Strict ascending runs: maximal ranges with π(i+1) = π(i) + 1.
pub fn strict_ascending_runs(perm: &[usize]) -> Result<StrictRunProfile> {
    validate_permutation(perm)?;
    let n = perm.len();
    let mut heads = Vec::new();
    let mut lengths = Vec::new();
    let mut head_values = Vec::new();
    for i in 0..n {
        if i == 0 || perm[i] != perm[i - 1] + 1 {
            if let Some(&h) = heads.last() {
                lengths.push(i - h);
            }
            heads.push(i);
            head_values.push(perm[i]);
        }
    }
    if let Some(&h) = heads.last() {
        lengths.push(n - h);
    }
    Ok(StrictRunProfile {
        heads,
        lengths,
        head_values,
    })
}

/// Monotone runs of the sequence of strict-run head values (vHRuns).
pub fn head_run_profile(profile: &StrictRunProfile) -> RunProfile {
    monotone_runs_by(&profile.head_values, &mut |a, b| a < b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTERLEAVED: [usize; 10] = [1, 3, 5, 7, 9, 2, 4, 6, 8, 10];
    const ROTATED_HALVES: [usize; 10] = [6, 7, 8, 9, 10, 1, 2, 3, 4, 5];

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn entropy_examples() {
        assert!(close(entropy(&[10]).unwrap(), 0.0));
        assert!(close(entropy(&[5, 5]).unwrap(), 1.0));
        assert!(close(entropy(&[1; 10]).unwrap(), 10f64.log2()));
        assert!(matches!(entropy(&[]), Err(Error::EmptyInput)));
        assert!(matches!(
            entropy(&[3, 0, 1]),
            Err(Error::ZeroFrequency { index: 1 })
        ));
    }

    #[test]
    fn ascending_runs_examples() {
        let p = ascending_runs(&INTERLEAVED).unwrap();
        assert_eq!(p.lengths(), &[5, 5]);
        assert_eq!(p.run_count(), 2);
        assert_eq!(p.boundaries(), vec![1, 6]);
        let id: Vec<usize> = (1..=8).collect();
        assert_eq!(ascending_runs(&id).unwrap().lengths(), &[8]);
        assert_eq!(ascending_runs(&[4, 3, 2, 1]).unwrap().lengths(), &[1, 1, 1, 1]);
    }

    #[test]
    fn monotone_runs_examples() {
        let p = monotone_runs(&[5, 4, 3, 2, 1, 6, 7, 8, 9, 10]).unwrap();
        assert_eq!(p.lengths(), &[5, 5]);
        assert_eq!(
            p.directions(),
            &[Direction::Descending, Direction::Ascending]
        );
        assert_eq!(
            monotone_runs(&INTERLEAVED).unwrap(),
            ascending_runs(&INTERLEAVED).unwrap()
        );
        let p = monotone_runs(&[2, 1]).unwrap();
        assert_eq!(p.lengths(), &[2]);
        assert_eq!(p.directions(), &[Direction::Descending]);
    }

    #[test]
    fn boundary_element_stays_with_earlier_run() {
        // 1 3 5 | 4 2 ... the peak 5 could open the descending run; it stays ascending
        let p = monotone_runs(&[1, 3, 5, 4, 2, 6]).unwrap();
        assert_eq!(p.lengths(), &[3, 2, 1]);
    }

    #[test]
    fn equal_prefix_sets_direction_later() {
        let p = monotone_runs_by(&[5, 5, 3, 2, 7, 7, 7], &mut |a: &i32, b: &i32| a < b);
        assert_eq!(p.lengths(), &[4, 3]);
        assert_eq!(p.directions()[0], Direction::Descending);
        let p = ascending_runs_by(&[1, 1, 2, 2, 1, 1], &mut |a: &i32, b: &i32| a < b);
        assert_eq!(p.lengths(), &[4, 2]);
    }

    #[test]
    fn strict_runs_examples() {
        let s = strict_ascending_runs(&ROTATED_HALVES).unwrap();
        assert_eq!(s.run_count(), 2);
        assert_eq!(s.lengths(), &[5, 5]);
        assert_eq!(s.head_values(), &[6, 1]);
        assert_eq!(head_run_profile(&s).lengths(), &[2]);

        let s = strict_ascending_runs(&INTERLEAVED).unwrap();
        assert_eq!(s.run_count(), 10);
        assert!(s.lengths().iter().all(|&l| l == 1));

        let id: Vec<usize> = (1..=6).collect();
        let s = strict_ascending_runs(&id).unwrap();
        assert_eq!(s.lengths(), &[6]);
        assert_eq!(head_run_profile(&s).lengths(), &[1]);
    }

    #[test]
    fn head_profile_of_alternating_pairs() {
        let perm = [2, 1, 4, 3, 6, 5];
        let s = strict_ascending_runs(&perm).unwrap();
        assert_eq!(s.head_values(), &perm);
        // greedy scan: (2,1) desc, (4,3) desc, (6,5) desc
        let h = head_run_profile(&s);
        assert_eq!(h.lengths(), &[2, 2, 2]);
        assert!(h.directions().iter().all(|d| d.is_descending()));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(ascending_runs(&[1, 1]).is_err());
        assert!(monotone_runs(&[0, 1]).is_err());
        assert!(strict_ascending_runs(&[1, 3]).is_err());
    }

    #[test]
    fn run_detection_comparison_count() {
        let values: Vec<usize> = (0..1000).map(|i| (i * 7919) % 1000 + 1).collect();
        let mut count = 0;
        ascending_runs_by(&values, &mut |a, b| {
            count += 1;
            a < b
        });
        assert_eq!(count, 999);
        let mut count = 0;
        monotone_runs_by(&values, &mut |a, b| {
            count += 1;
            a < b
        });
        // each adjacent pair at most twice, only when it opens a run
        assert!(count <= 999 + values.len() / 2);
    }

    #[test]
    fn descending_ties_are_reported() {
        let v = [4, 4, 3, 3, 3, 1, 2, 2];
        let (p, ties) = monotone_runs_with_ties(&v, &mut |a: &i32, b: &i32| a < b);
        assert_eq!(p.lengths(), &[6, 2]);
        assert_eq!(ties, vec![0, 2, 3]);
        let v = [5, 4, 4, 3, 3, 3, 1, 2, 2, 2, 1];
        let (p, ties) = monotone_runs_with_ties(&v, &mut |a: &i32, b: &i32| a < b);
        assert_eq!(p.lengths(), &[7, 4]);
        assert_eq!(ties, vec![1, 3, 4, 7, 8]);
        assert_eq!(p.lengths(), monotone_runs_by(&v, &mut |a: &i32, b: &i32| a < b).lengths());
        let mut count = 0;
        let rev: Vec<i32> = (0..20).rev().collect();
        monotone_runs_with_ties(&rev, &mut |a: &i32, b: &i32| {
            count += 1;
            a < b
        });
        assert_eq!(count, 19);
    }
}

//! Seeded generators for structured permutations and the plain-text
//! permutation format.
//!
//! The generator is SplitMix64 with its state set to the seed. A value below
//! `b` is the high word of `next_u64() · b` (128-bit product). Shuffles are
//! Fisher–Yates from the last index down, drawing `j` below `i + 1`.
//! Every generator checks its output against the class it promises.

use std::fmt::Write as _;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::runs::{ascending_runs, monotone_runs, strict_ascending_runs, validate_permutation, Direction};
use crate::sus::{partition_sus, SusPartition};

#[derive(Clone, Debug)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish value in `[0, bound)`; `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Uniform in `[lo, hi]`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// A random composition of `n` into `parts` positive summands, each at
    /// least `min`.
    pub fn composition(&mut self, n: usize, parts: usize, min: usize) -> Result<Vec<usize>> {
        if parts == 0 || n < parts * min || min == 0 {
            return Err(Error::InvalidParameters(format!(
                "cannot split {n} into {parts} parts of at least {min}"
            )));
        }
        // choose parts-1 distinct cut points among the free slack positions
        let slack = n - parts * min;
        let mut cuts: Vec<usize> = sample_distinct(self, slack + parts - 1, parts - 1);
        cuts.sort_unstable();
        let mut out = Vec::with_capacity(parts);
        let mut prev = 0;
        for (i, &c) in cuts.iter().enumerate() {
            let bars_before = c - i;
            out.push(bars_before - prev + min);
            prev = bars_before;
        }
        out.push(slack - prev + min);
        Ok(out)
    }
}

// k distinct values from [0, m), Floyd's algorithm.
fn sample_distinct(rng: &mut Rng, m: usize, k: usize) -> Vec<usize> {
    let mut chosen = std::collections::HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    for j in m - k..m {
        let t = rng.below(j + 1);
        let v = if chosen.insert(t) { t } else { chosen.insert(j); j };
        out.push(v);
    }
    out
}

pub fn random_permutation(n: usize, rng: &mut Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..=n).collect();
    rng.shuffle(&mut perm);
    perm
}

/// A permutation whose runs have exactly the given lengths and directions.
///
/// With only ascending directions the runs are the ascending runs; otherwise
/// they are the greedy monotone runs, which forces every run but the last to
/// have length at least 2.
pub fn runs_permutation(lengths: &[usize], directions: &[Direction], rng: &mut Rng) -> Result<Vec<usize>> {
    if lengths.is_empty() || lengths.len() != directions.len() {
        return Err(Error::InvalidParameters("need one direction per run length".into()));
    }
    if lengths.contains(&0) {
        return Err(Error::InvalidParameters("run lengths must be positive".into()));
    }
    let mixed = directions.iter().any(|d| d.is_descending());
    if mixed && lengths[..lengths.len() - 1].contains(&1) {
        return Err(Error::InvalidParameters(
            "monotone runs other than the last need length at least 2".into(),
        ));
    }
    let n: usize = lengths.iter().sum();
    let mut perm = random_permutation(n, rng);
    let mut bounds = Vec::with_capacity(lengths.len() + 1);
    bounds.push(0);
    for &m in lengths {
        bounds.push(bounds.last().unwrap() + m);
    }
    let sort_run = |perm: &mut [usize], r: usize| {
        let run = &mut perm[bounds[r]..bounds[r + 1]];
        run.sort_unstable();
        if directions[r].is_descending() {
            run.reverse();
        }
    };
    for r in 0..lengths.len() {
        sort_run(&mut perm, r);
    }
    // Each boundary needs a descent before an ascending run and an ascent
    // before a descending one. Swapping the two boundary elements and
    // re-sorting the right run fixes a boundary without disturbing earlier
    // ones; single-element ascending runs may need further passes.
    loop {
        let mut changed = false;
        for r in 0..lengths.len() - 1 {
            let p = bounds[r + 1] - 1;
            let ok = if directions[r + 1].is_descending() == directions[r].is_descending() {
                (perm[p] > perm[p + 1]) != directions[r].is_descending()
            } else {
                // asc -> desc needs max(A) > max(B); desc -> asc needs min(A) < min(B)
                (perm[p] > perm[p + 1]) == !directions[r].is_descending()
            };
            if !ok {
                perm.swap(p, p + 1);
                sort_run(&mut perm, r + 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let profile = if mixed { monotone_runs(&perm)? } else { ascending_runs(&perm)? };
    if profile.lengths() != lengths || profile.directions() != directions {
        return Err(Error::InvalidParameters("generated runs do not match the request".into()));
    }
    Ok(perm)
}

/// A permutation with exactly `tau` strict runs of random lengths.
pub fn strict_permutation(n: usize, tau: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if tau == 0 || tau > n || (tau == 2 && n < 2) {
        return Err(Error::InvalidParameters(format!("cannot build {tau} strict runs of total {n}")));
    }
    let sizes = rng.composition(n, tau, 1)?;
    let mut starts = Vec::with_capacity(tau);
    let mut acc = 1;
    for &m in &sizes {
        starts.push(acc);
        acc += m;
    }
    // block order in position: no block may be followed by its value successor
    let mut order: Vec<usize> = (0..tau).collect();
    let mut tries = 0;
    loop {
        rng.shuffle(&mut order);
        if order.windows(2).all(|w| w[1] != w[0] + 1) {
            break;
        }
        tries += 1;
        if tries > 10_000 {
            return Err(Error::InvalidParameters(format!("no arrangement of {tau} blocks found")));
        }
    }
    let perm: Vec<usize> = order
        .iter()
        .flat_map(|&b| starts[b]..starts[b] + sizes[b])
        .collect();
    if strict_ascending_runs(&perm)?.run_count() != tau {
        return Err(Error::InvalidParameters("generated strict runs do not match".into()));
    }
    Ok(perm)
}

/// How the upsequences are interleaved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interleave {
    /// A uniformly random label sequence with the chosen lengths.
    Uniform,
    /// Labels cycle 1, 2, .., k while the sequences last.
    RoundRobin,
}

/// Shuffles `k` increasing sequences of random lengths. With `strict` each
/// sequence holds consecutive values. The result has at most `k`
/// upsequences; the labeling used is returned alongside.
pub fn sus_permutation(
    n: usize,
    k: usize,
    interleave: Interleave,
    strict: bool,
    rng: &mut Rng,
) -> Result<(Vec<usize>, SusPartition)> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameters(format!("cannot shuffle {k} upsequences of total {n}")));
    }
    let sizes = match interleave {
        Interleave::Uniform => rng.composition(n, k, 1)?,
        Interleave::RoundRobin => (0..k).map(|c| n / k + usize::from(c < n % k)).collect(),
    };
    let mut values = if strict { (1..=n).collect() } else { random_permutation(n, rng) };
    let mut sets = Vec::with_capacity(k);
    let mut acc = 0;
    for &m in &sizes {
        let set = &mut values[acc..acc + m];
        set.sort_unstable();
        sets.push(set.to_vec());
        acc += m;
    }
    let labels: Vec<usize> = match interleave {
        Interleave::Uniform => {
            let mut labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &m)| vec![c + 1; m]).collect();
            rng.shuffle(&mut labels);
            labels
        }
        Interleave::RoundRobin => {
            let mut left = sizes.clone();
            let mut labels = Vec::with_capacity(n);
            while labels.len() < n {
                for c in 0..k {
                    if left[c] > 0 {
                        left[c] -= 1;
                        labels.push(c + 1);
                    }
                }
            }
            labels
        }
    };
    let mut next = vec![0; k];
    let perm: Vec<usize> = labels
        .iter()
        .map(|&c| {
            let v = sets[c - 1][next[c - 1]];
            next[c - 1] += 1;
            v
        })
        .collect();
    let partition = SusPartition::from_labels(labels, k)?;
    partition.check_monotone(&perm, &vec![Direction::Ascending; k], true)?;
    if partition_sus(&perm)?.k() > k {
        return Err(Error::InvalidParameters("generated permutation has too many upsequences".into()));
    }
    Ok((perm, partition))
}

/// Parses `n` followed by `n` whitespace-separated integers.
pub fn parse_values(text: &str) -> Result<Vec<u64>> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Format("missing length".into()))?
        .parse()
        .map_err(|e| Error::Format(format!("bad length: {e}")))?;
    let values = tokens
        .map(|t| t.parse::<u64>().map_err(|e| Error::Format(format!("bad value {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != n {
        return Err(Error::Format(format!("expected {n} values, found {}", values.len())));
    }
    Ok(values)
}

/// Parses and validates a permutation of `[1..n]`.
pub fn parse_permutation(text: &str) -> Result<Vec<usize>> {
    let perm: Vec<usize> = parse_values(text)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| Error::Format(format!("value {v} too large"))))
        .collect::<Result<_>>()?;
    validate_permutation(&perm)?;
    Ok(perm)
}

pub fn format_values<T: std::fmt::Display>(values: &[T]) -> String {
    let mut out = format!("{}\n", values.len());
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
    out
}

/// Partition text: `n k` then the `n` labels.
pub fn parse_partition(text: &str) -> Result<SusPartition> {
    let mut tokens = text.split_whitespace();
    let mut header = || -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Format("missing partition header".into()))?
            .parse()
            .map_err(|e| Error::Format(format!("bad partition header: {e}")))
    };
    let n = header()?;
    let k = header()?;
    let labels = tokens
        .map(|t| t.parse::<usize>().map_err(|e| Error::Format(format!("bad label {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if labels.len() != n {
        return Err(Error::Format(format!("expected {n} labels, found {}", labels.len())));
    }
    SusPartition::from_labels(labels, k)
}

pub fn format_partition(partition: &SusPartition) -> String {
    let mut out = format!("{} {}\n", partition.len(), partition.k());
    let labels: Vec<String> = partition.labels().iter().map(usize::to_string).collect();
    out.push_str(&labels.join(" "));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Direction::{Ascending as A, Descending as D};

    #[test]
    fn rng_is_reproducible() {
        let a: Vec<u64> = (0..4).scan(Rng::new(7), |r, _| Some(r.next_u64())).collect();
        let b: Vec<u64> = (0..4).scan(Rng::new(7), |r, _| Some(r.next_u64())).collect();
        assert_eq!(a, b);
        // SplitMix64 reference output for state 0
        assert_eq!(Rng::new(0).next_u64(), 0xe220a8397b1dcdaf);
    }

    #[test]
    fn compositions_sum() {
        let mut rng = Rng::new(3);
        for _ in 0..200 {
            let parts = rng.range(1, 10);
            let n = rng.range(parts * 2, 60);
            let c = rng.composition(n, parts, 2).unwrap();
            assert_eq!(c.len(), parts);
            assert_eq!(c.iter().sum::<usize>(), n);
            assert!(c.iter().all(|&m| m >= 2));
        }
    }

    #[test]
    fn runs_generator() {
        let mut rng = Rng::new(1);
        let perm = runs_permutation(&[5, 5], &[A, A], &mut rng).unwrap();
        assert_eq!(ascending_runs(&perm).unwrap().lengths(), &[5, 5]);
        assert_eq!(runs_permutation(&[6], &[A], &mut rng).unwrap(), (1..=6).collect::<Vec<_>>());
        for _ in 0..300 {
            let rho = rng.range(1, 8);
            let dirs: Vec<Direction> = (0..rho).map(|_| if rng.below(2) == 0 { A } else { D }).collect();
            let lengths: Vec<usize> = (0..rho).map(|_| rng.range(2, 6)).collect();
            runs_permutation(&lengths, &dirs, &mut rng).unwrap();
            let lengths: Vec<usize> = (0..rho).map(|_| rng.range(1, 4)).collect();
            runs_permutation(&lengths, &vec![A; rho], &mut rng).unwrap();
        }
        assert!(runs_permutation(&[1, 3], &[A, D], &mut rng).is_err());
    }

    #[test]
    fn strict_generator() {
        let mut rng = Rng::new(5);
        for tau in 1..12 {
            let perm = strict_permutation(40, tau, &mut rng).unwrap();
            assert_eq!(strict_ascending_runs(&perm).unwrap().run_count(), tau);
        }
    }

    #[test]
    fn sus_generator() {
        let mut rng = Rng::new(1);
        let (perm, _) = sus_permutation(10, 2, Interleave::Uniform, false, &mut rng).unwrap();
        assert!(partition_sus(&perm).unwrap().k() <= 2);
        let (perm, p) = sus_permutation(9, 3, Interleave::RoundRobin, true, &mut rng).unwrap();
        assert_eq!(p.labels(), &[1, 2, 3, 1, 2, 3, 1, 2, 3]);
        assert_eq!(perm, vec![1, 4, 7, 2, 5, 8, 3, 6, 9]);
    }

    #[test]
    fn text_roundtrip() {
        let text = format_values(&[3usize, 1, 2]);
        assert_eq!(text, "3\n3 1 2\n");
        assert_eq!(parse_permutation(&text).unwrap(), vec![3, 1, 2]);
        assert!(parse_permutation("3\n1 1 2").is_err());
        assert_eq!(parse_values("3\n1 1 2").unwrap(), vec![1, 1, 2]);
        assert!(parse_values("2\n1").is_err());
        let p = SusPartition::from_labels(vec![1, 2, 1], 2).unwrap();
        assert_eq!(parse_partition(&format_partition(&p)).unwrap(), p);
    }
}

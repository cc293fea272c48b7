//! Shuffled upsequences: the greedy minimum partition of a sequence into
//! non-decreasing subsequences, and coders built on it.
//!
//! A [`SusCoder`] stores the label string `S` as a [`SequenceCoder`] and the
//! permutation π′ obtained by concatenating the subsequences in label order
//! as a [`PermutationCoder`]. With `A[ℓ]` the number of elements carrying a
//! label below ℓ,
//!
//! ```text
//! π(i)  = π′(A[S[i]] + rank_{S[i]}(S, i))
//! π⁻¹(j) = select_ℓ(S, p − A[ℓ])   where p = π′⁻¹(j), ℓ = rank₁(A′, p)
//! ```
//!
//! and `A′` marks the first position of every label block in π′.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bits::{read_bit_stream, read_len, read_magic, write_bit_stream, write_magic, RawBits};
use crate::bitvector::{BitVector, SpaceUsage};
use crate::error::{check_range, Error, Result};
use crate::perm::{CoderConfig, PermSpace, PermutationCoder};
use crate::runs::{entropy_unchecked, validate_permutation, Direction};
use crate::seq::SequenceCoder;
use crate::splay::SplayTree;

const MAGIC: &[u8; 4] = b"RPSU";
const VERSION: u16 = 1;
const STRICT_MAGIC: &[u8; 4] = b"RPIV";

/// Assignment of every position to one of `k` subsequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SusPartition {
    labels: Vec<usize>,
    lengths: Vec<usize>,
}

impl SusPartition {
    /// Labels are 1-based and every label in `[1..k]` must occur.
    pub fn from_labels(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut lengths = vec![0; k];
        for (i, &c) in labels.iter().enumerate() {
            if c == 0 || c > k {
                return Err(Error::InvalidLabels(format!("label {c} at position {} outside [1..{k}]", i + 1)));
            }
            lengths[c - 1] += 1;
        }
        if let Some(c) = lengths.iter().position(|&m| m == 0) {
            return Err(Error::InvalidLabels(format!("label {} is unused", c + 1)));
        }
        Ok(Self { labels, lengths })
    }

    /// S[1..n], 1-based labels.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.lengths.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Subsequence lengths, indexed by label − 1.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn entropy(&self) -> f64 {
        entropy_unchecked(&self.lengths)
    }

    /// Positions (0-based) of every subsequence, in label order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = self.lengths.iter().map(|&m| Vec::with_capacity(m)).collect();
        for (i, &c) in self.labels.iter().enumerate() {
            groups[c - 1].push(i);
        }
        groups
    }

    /// Checks that each subsequence is monotone in its direction; ties are
    /// allowed unless `strict`.
    pub fn check_monotone<T: Ord>(&self, values: &[T], directions: &[Direction], strict: bool) -> Result<()> {
        if values.len() != self.len() || directions.len() != self.k() {
            return Err(Error::LengthMismatch(format!(
                "{} values and {} directions for {} labels over {} subsequences",
                values.len(),
                directions.len(),
                self.len(),
                self.k()
            )));
        }
        let mut last: Vec<Option<usize>> = vec![None; self.k()];
        for (i, &c) in self.labels.iter().enumerate() {
            if let Some(p) = last[c - 1] {
                let ord = values[p].cmp(&values[i]);
                let ok = match (directions[c - 1], strict) {
                    (Direction::Ascending, true) => ord.is_lt(),
                    (Direction::Ascending, false) => ord.is_le(),
                    (Direction::Descending, true) => ord.is_gt(),
                    (Direction::Descending, false) => ord.is_ge(),
                };
                if !ok {
                    return Err(Error::InvalidLabels(format!(
                        "subsequence {c} is not {} at position {}",
                        if directions[c - 1].is_descending() { "descending" } else { "ascending" },
                        i + 1
                    )));
                }
            }
            last[c - 1] = Some(i);
        }
        Ok(())
    }
}

/// Greedy partition into the fewest non-decreasing subsequences. Each value
/// extends the subsequence with the largest ending value not above it, or
/// opens a new one; labels follow creation order.
pub fn partition_sus<T: Ord>(values: &[T]) -> Result<SusPartition> {
    partition_sus_by(values, &mut |a: &T, b: &T| a < b)
}

pub fn partition_sus_by<T, F>(values: &[T], less: &mut F) -> Result<SusPartition>
where
    F: FnMut(&T, &T) -> bool,
{
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut tree = SplayTree::new();
    let mut labels = Vec::with_capacity(values.len());
    let mut lengths: Vec<usize> = Vec::new();
    for i in 0..values.len() {
        let c = match tree.replace_pred(values, i, less) {
            Some(c) => c,
            None => {
                tree.push_min(i, lengths.len());
                lengths.push(0);
                lengths.len() - 1
            }
        };
        lengths[c] += 1;
        labels.push(c + 1);
    }
    Ok(SusPartition { labels, lengths })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SusSpace {
    pub labels: SpaceUsage,
    /// Label tree shape and symbol table.
    pub labels_overhead: usize,
    pub boundaries: SpaceUsage,
    pub directions: usize,
    pub inner: PermSpace,
    pub header: usize,
}

impl SusSpace {
    pub fn total(&self) -> usize {
        self.labels.total()
            + self.labels_overhead
            + self.boundaries.total()
            + self.directions
            + self.inner.total()
            + self.header
    }
}

#[derive(Clone, Debug)]
pub struct SusCoder {
    n: usize,
    labels: SequenceCoder,
    // A′: first position of each label block in π′
    boundaries: BitVector,
    offsets: Vec<usize>,
    directions: Option<Vec<Direction>>,
    inner: PermutationCoder,
}

impl SusCoder {
    /// Encodes `perm` along `partition`, or along the greedy partition when
    /// none is given.
    pub fn encode_sus(perm: &[usize], partition: Option<&SusPartition>, config: CoderConfig) -> Result<Self> {
        validate_permutation(perm)?;
        let owned;
        let partition = match partition {
            Some(p) => p,
            None => {
                owned = partition_sus(perm)?;
                &owned
            }
        };
        partition.check_monotone(perm, &vec![Direction::Ascending; partition.k()], true)?;
        Self::build(perm, partition, None, config)
    }

    /// Encodes `perm` along a partition into monotone subsequences with the
    /// given per-label directions.
    pub fn encode_sms(
        perm: &[usize],
        partition: &SusPartition,
        directions: &[Direction],
        config: CoderConfig,
    ) -> Result<Self> {
        validate_permutation(perm)?;
        partition.check_monotone(perm, directions, true)?;
        Self::build(perm, partition, Some(directions.to_vec()), config)
    }

    fn build(
        perm: &[usize],
        partition: &SusPartition,
        directions: Option<Vec<Direction>>,
        config: CoderConfig,
    ) -> Result<Self> {
        let n = perm.len();
        let k = partition.k();
        let mut offsets = Vec::with_capacity(k);
        let mut acc = 0;
        for &m in partition.lengths() {
            offsets.push(acc);
            acc += m;
        }
        let mut fill = offsets.clone();
        let mut inner_perm = vec![0; n];
        for (i, &c) in partition.labels().iter().enumerate() {
            inner_perm[fill[c - 1]] = perm[i];
            fill[c - 1] += 1;
        }
        let descending = directions
            .as_ref()
            .is_some_and(|d| d.iter().any(|d| d.is_descending()));
        let inner = PermutationCoder::encode(&inner_perm, config.with_mixed(config.mixed || descending))?;
        let labels = SequenceCoder::encode_string(partition.labels(), k, config)?;
        let boundaries = BitVector::from_positions(n, &offsets, config.variant);
        Ok(Self {
            n,
            labels,
            boundaries,
            offsets,
            directions,
            inner,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of subsequences.
    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    /// Subsequence lengths by label.
    pub fn lengths(&self) -> Vec<usize> {
        (1..=self.k()).map(|c| self.labels.frequency(c)).collect()
    }

    pub fn entropy(&self) -> f64 {
        self.labels.entropy()
    }

    pub fn directions(&self) -> Option<&[Direction]> {
        self.directions.as_deref()
    }

    pub fn labels(&self) -> &SequenceCoder {
        &self.labels
    }

    pub fn inner(&self) -> &PermutationCoder {
        &self.inner
    }

    pub fn apply(&self, i: usize) -> Result<usize> {
        check_range(i, 1, self.n)?;
        let (c, r) = self.labels.access_rank(i)?;
        Ok(self.inner.apply0(self.offsets[c - 1] + r - 1) + 1)
    }

    pub fn inverse(&self, j: usize) -> Result<usize> {
        check_range(j, 1, self.n)?;
        let p = self.inner.inverse0(j - 1);
        let c = self.boundaries.rank1(p + 1) - 1;
        Ok(self.labels.select0(c, p - self.offsets[c]) + 1)
    }

    pub fn decode(&self) -> Vec<usize> {
        let inner = self.inner.decode();
        let mut fill = self.offsets.clone();
        self.labels
            .decode()
            .into_iter()
            .map(|c| {
                let v = inner[fill[c - 1]];
                fill[c - 1] += 1;
                v
            })
            .collect()
    }

    /// Entropy bound of the label string plus that of the inner coder.
    pub fn payload_entropy_bits(&self) -> f64 {
        self.labels.payload_entropy_bits() + self.inner.payload_entropy_bits()
    }

    pub fn measured_size_bits(&self) -> SusSpace {
        let (labels, labels_overhead) = self.labels.measured_size_bits();
        SusSpace {
            labels,
            labels_overhead,
            boundaries: self.boundaries.space(),
            directions: if self.directions.is_some() { self.k() } else { 0 },
            inner: self.inner.measured_size_bits(),
            header: 32 + 16 + 64 + 64 + 8,
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_magic(w, MAGIC, VERSION)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u64::<LittleEndian>(self.k() as u64)?;
        w.write_u8(self.directions.is_some() as u8)?;
        self.boundaries.write_to(w)?;
        if let Some(dirs) = &self.directions {
            let bits = RawBits::from_bools(dirs.iter().map(|d| d.is_descending()));
            write_bit_stream(w, bits.words(), bits.len())?;
        }
        self.labels.write_to(w)?;
        self.inner.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_magic(r, MAGIC, VERSION)?;
        let n = read_len(r)?;
        let k = read_len(r)?;
        let flags = r.read_u8()?;
        if flags > 1 || k == 0 || k > n {
            return Err(Error::Format("SUS header is inconsistent".into()));
        }
        let boundaries = BitVector::read_from(r)?;
        let directions = if flags == 1 {
            let bits = RawBits::from_words(read_bit_stream(r, k)?, k);
            Some(
                bits.iter()
                    .map(|b| if b { Direction::Descending } else { Direction::Ascending })
                    .collect(),
            )
        } else {
            None
        };
        let labels = SequenceCoder::read_from(r)?;
        let inner = PermutationCoder::read_from(r)?;
        let ok = boundaries.len() == n
            && boundaries.count_ones() == k
            && labels.len() == n
            && labels.sigma() == k
            && inner.len() == n;
        if !ok {
            return Err(Error::Format("SUS coder components disagree".into()));
        }
        let offsets: Vec<usize> = (0..k).map(|c| boundaries.select1(c)).collect();
        for c in 0..k {
            let end = offsets.get(c + 1).copied().unwrap_or(n);
            if labels.frequency(c + 1) != end - offsets[c] {
                return Err(Error::Format("SUS block sizes disagree with labels".into()));
            }
        }
        Ok(Self {
            n,
            labels,
            boundaries,
            offsets,
            directions,
            inner,
        })
    }
}

/// Represents π through a run coder of π⁻¹, which has few ascending runs
/// when π is a shuffle of few strict upsequences (consecutive values).
#[derive(Clone, Debug)]
pub struct StrictSusCoder {
    inverse: PermutationCoder,
}

impl StrictSusCoder {
    pub fn encode(perm: &[usize], config: CoderConfig) -> Result<Self> {
        validate_permutation(perm)?;
        let mut inv = vec![0; perm.len()];
        for (i, &v) in perm.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Ok(Self {
            inverse: PermutationCoder::encode(&inv, config)?,
        })
    }

    pub fn len(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inverse.is_empty()
    }

    /// The coder of π⁻¹.
    pub fn inverse_coder(&self) -> &PermutationCoder {
        &self.inverse
    }

    pub fn apply(&self, i: usize) -> Result<usize> {
        self.inverse.inverse(i)
    }

    pub fn inverse(&self, j: usize) -> Result<usize> {
        self.inverse.apply(j)
    }

    pub fn decode(&self) -> Vec<usize> {
        let inv = self.inverse.decode();
        let mut perm = vec![0; inv.len()];
        for (j, &i) in inv.iter().enumerate() {
            perm[i - 1] = j + 1;
        }
        perm
    }

    pub fn measured_size_bits(&self) -> PermSpace {
        let mut space = self.inverse.measured_size_bits();
        space.header += 32 + 16;
        space
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_magic(w, STRICT_MAGIC, VERSION)?;
        self.inverse.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_magic(r, STRICT_MAGIC, VERSION)?;
        Ok(Self {
            inverse: PermutationCoder::read_from(r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHUFFLED: [usize; 10] = [1, 6, 2, 7, 3, 8, 4, 9, 5, 10];

    fn check(perm: &[usize], apply: impl Fn(usize) -> usize, inverse: impl Fn(usize) -> usize) {
        for (i, &v) in perm.iter().enumerate() {
            assert_eq!(apply(i + 1), v);
            assert_eq!(inverse(v), i + 1);
        }
    }

    #[test]
    fn two_interleaved_upsequences() {
        let p = partition_sus(&SHUFFLED).unwrap();
        assert_eq!(p.k(), 2);
        // 7 extends the sequence ending at 6, so greedy finds <6,4>
        assert_eq!(p.lengths(), &[6, 4]);
        assert_eq!(p.labels(), &[1, 1, 2, 1, 2, 1, 2, 1, 2, 1]);
        let c = SusCoder::encode_sus(&SHUFFLED, None, CoderConfig::binary()).unwrap();
        assert_eq!(c.apply(2).unwrap(), 6);
        assert_eq!(c.inverse(6).unwrap(), 2);
        assert_eq!(c.inner().decode(), vec![1, 6, 7, 8, 9, 10, 2, 3, 4, 5]);
        check(&SHUFFLED, |i| c.apply(i).unwrap(), |j| c.inverse(j).unwrap());
        assert_eq!(c.decode(), SHUFFLED);

        let alternating = SusPartition::from_labels((0..10).map(|i| i % 2 + 1).collect(), 2).unwrap();
        assert_eq!(alternating.lengths(), &[5, 5]);
        let c = SusCoder::encode_sus(&SHUFFLED, Some(&alternating), CoderConfig::binary()).unwrap();
        assert_eq!(c.inner().run_lengths(), &[10]);
        check(&SHUFFLED, |i| c.apply(i).unwrap(), |j| c.inverse(j).unwrap());
    }

    #[test]
    fn greedy_fixtures() {
        assert_eq!(partition_sus(&[1, 2, 3, 8, 4, 5, 6, 7]).unwrap().lengths(), &[4, 4]);
        let p = partition_sus(&[2, 3, 4, 1, 8, 5, 6, 7]).unwrap();
        assert_eq!(p.k(), 2);
        assert!((p.entropy() - 1.0).abs() < 1e-12);
        let better = SusPartition::from_labels(vec![2, 2, 2, 1, 1, 2, 2, 2], 2).unwrap();
        better
            .check_monotone(&[2, 3, 4, 1, 8, 5, 6, 7], &[Direction::Ascending; 2], true)
            .unwrap();
        assert!(better.entropy() < p.entropy());
    }

    #[test]
    fn sorted_and_duplicates() {
        assert_eq!(partition_sus(&[1, 2, 3, 4]).unwrap().k(), 1);
        assert_eq!(partition_sus(&[2, 2, 1, 1]).unwrap().k(), 2);
        assert!(partition_sus::<usize>(&[]).is_err());
    }

    #[test]
    fn single_upsequence_is_identity_inner() {
        let id: Vec<usize> = (1..=8).collect();
        let c = SusCoder::encode_sus(&id, None, CoderConfig::default()).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(c.inner().decode(), id);
        check(&id, |i| c.apply(i).unwrap(), |j| c.inverse(j).unwrap());
    }

    #[test]
    fn sms_descending_and_ascending() {
        let perm = [10, 1, 9, 2, 8, 3, 7, 4, 6, 5];
        let p = SusPartition::from_labels(vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2], 2).unwrap();
        let dirs = [Direction::Descending, Direction::Ascending];
        let c = SusCoder::encode_sms(&perm, &p, &dirs, CoderConfig::binary()).unwrap();
        assert_eq!(c.k(), 2);
        check(&perm, |i| c.apply(i).unwrap(), |j| c.inverse(j).unwrap());
        let wrong = [Direction::Ascending, Direction::Ascending];
        assert!(SusCoder::encode_sms(&perm, &p, &wrong, CoderConfig::binary()).is_err());

        let rev: Vec<usize> = (1..=6).rev().collect();
        let one = SusPartition::from_labels(vec![1; 6], 1).unwrap();
        let c = SusCoder::encode_sms(&rev, &one, &[Direction::Descending], CoderConfig::binary()).unwrap();
        check(&rev, |i| c.apply(i).unwrap(), |j| c.inverse(j).unwrap());
    }

    #[test]
    fn rejects_bad_partition() {
        let p = SusPartition::from_labels(vec![1; 10], 1).unwrap();
        assert!(SusCoder::encode_sus(&SHUFFLED, Some(&p), CoderConfig::binary()).is_err());
        assert!(SusPartition::from_labels(vec![1, 3], 3).is_err());
    }

    #[test]
    fn strict_sus_inverts() {
        let c = StrictSusCoder::encode(&SHUFFLED, CoderConfig::binary()).unwrap();
        assert_eq!(c.inverse_coder().decode(), vec![1, 3, 5, 7, 9, 2, 4, 6, 8, 10]);
        assert_eq!(c.inverse_coder().run_count(), 2);
        check(&SHUFFLED, |i| c.apply(i).unwrap(), |j| c.inverse(j).unwrap());
        assert_eq!(c.decode(), SHUFFLED);
    }

    #[test]
    fn roundtrip_bytes() {
        let perm = [10, 1, 9, 2, 8, 3, 7, 4, 6, 5];
        let p = SusPartition::from_labels(vec![1, 2, 1, 2, 1, 2, 1, 2, 1, 2], 2).unwrap();
        let c = SusCoder::encode_sms(&perm, &p, &[Direction::Descending, Direction::Ascending], CoderConfig::default())
            .unwrap();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = SusCoder::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back.decode(), perm);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);

        let s = StrictSusCoder::encode(&SHUFFLED, CoderConfig::default()).unwrap();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(StrictSusCoder::read_from(&mut buf.as_slice()).unwrap().decode(), SHUFFLED);
    }
}

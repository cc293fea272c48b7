//! Compressed permutations over their run decomposition.
//!
//! The ascending runs of π become the leaves of a Huffman tree weighted by
//! run length. Each internal node stores, for the merge of its children's
//! values, which child every element came from. The root holds all values in
//! sorted order, so:
//!
//! * `π(i)`: find the run of `i` with `C`, then select upwards to the root;
//!   the root position is the value.
//! * `π⁻¹(j)`: start at root position `j` and descend with access and rank.
//!
//! In mixed mode the greedy monotone runs are found first, descending ones are
//! reversed, and the ascending runs of the result are encoded. A second
//! bitmap marks the monotone runs and one bit per run records the reversal.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bits::{read_len, read_magic, write_magic};
use crate::bitvector::{BitVector, BitVectorVariant, SpaceUsage};
use crate::code_tree::{ceil_log, CodeTree, MAX_ARITY};
use crate::error::{check_range, Error, Result};
use crate::merge::merge_along;
use crate::runs::{ascending_runs_by, entropy_unchecked, monotone_runs_by, validate_permutation};
use crate::wavelet::ShapedWavelet;

const MAGIC: &[u8; 4] = b"RPRM";
const VERSION: u16 = 1;

const FLAG_MIXED: u16 = 1 << 8;
const FLAG_LIMITED: u16 = 1 << 9;
const FLAG_MONOTONE: u16 = 1 << 12;
const VARIANT_SHIFT: u16 = 10;

/// Build options for [`PermutationCoder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoderConfig {
    /// Tree arity; `None` picks [`default_arity`] from `n`.
    pub arity: Option<usize>,
    pub depth_limit: bool,
    /// Also use descending runs.
    pub mixed: bool,
    pub variant: BitVectorVariant,
}

impl Default for CoderConfig {
    fn default() -> Self {
        Self {
            arity: None,
            depth_limit: true,
            mixed: false,
            variant: BitVectorVariant::Compressed,
        }
    }
}

impl CoderConfig {
    pub fn binary() -> Self {
        Self {
            arity: Some(2),
            ..Self::default()
        }
    }

    pub fn with_arity(mut self, arity: usize) -> Self {
        self.arity = Some(arity);
        self
    }

    pub fn with_mixed(mut self, mixed: bool) -> Self {
        self.mixed = mixed;
        self
    }

    pub fn with_depth_limit(mut self, on: bool) -> Self {
        self.depth_limit = on;
        self
    }

    pub fn with_variant(mut self, variant: BitVectorVariant) -> Self {
        self.variant = variant;
        self
    }

    pub(crate) fn resolve_arity(&self, n: usize) -> Result<usize> {
        let t = self.arity.unwrap_or_else(|| default_arity(n));
        if !(2..=MAX_ARITY).contains(&t) {
            return Err(Error::InvalidArity(t));
        }
        Ok(t)
    }
}

/// `max(2, ⌊√lg n⌋)`.
pub fn default_arity(n: usize) -> usize {
    if n < 2 {
        return 2;
    }
    ((n as f64).log2().sqrt().floor() as usize).max(2)
}

/// Depth cap applied when limiting is on: `2⌈lg ρ⌉` for binary trees and
/// `⌈5 lg ρ / lg t⌉` otherwise, never below the balanced height.
pub fn depth_limit_for(rho: usize, t: usize) -> usize {
    let limit = if rho <= 1 {
        0
    } else if t == 2 {
        2 * ceil_log(2, rho)
    } else {
        (5.0 * (rho as f64).log2() / (t as f64).log2()).ceil() as usize
    };
    limit.max(ceil_log(t, rho))
}

/// Huffman tree over `lengths`, depth-limited when asked.
pub(crate) fn shaped_tree(lengths: &[usize], t: usize, limit: bool) -> Result<(CodeTree, bool)> {
    let tree = CodeTree::build_huffman(lengths, t)?;
    let cap = depth_limit_for(lengths.len(), t);
    if limit && tree.max_depth() > cap {
        Ok((tree.limit_depth(cap)?, true))
    } else {
        Ok((tree, false))
    }
}

#[derive(Clone, Debug)]
struct Monotone {
    // ones at the starts of the greedy monotone runs
    starts: BitVector,
    // one bit per monotone run, set when it was reversed
    descending: BitVector,
}

impl Monotone {
    // Reversal inside a descending run is an involution on positions.
    #[inline]
    fn reflect(&self, p: usize) -> usize {
        let k = self.starts.rank1(p + 1) - 1;
        if !self.descending.get(k) {
            return p;
        }
        let s = self.starts.select1(k);
        let e = if k + 1 < self.starts.count_ones() {
            self.starts.select1(k + 1)
        } else {
            self.starts.len()
        } - 1;
        s + e - p
    }

    fn space(&self) -> SpaceUsage {
        self.starts.space() + self.descending.space()
    }
}

/// Stored bits per component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PermSpace {
    /// Node sequences.
    pub sequences: SpaceUsage,
    /// Tree shape, leaf metadata and φ.
    pub tree: usize,
    /// Run-start bitmap C.
    pub run_starts: SpaceUsage,
    /// Monotone-run bitmap and direction bits (mixed mode only).
    pub directions: SpaceUsage,
    /// Fixed header fields.
    pub header: usize,
}

impl PermSpace {
    pub fn payload(&self) -> usize {
        self.sequences.payload + self.run_starts.payload + self.directions.payload
    }

    pub fn index(&self) -> usize {
        self.sequences.index + self.run_starts.index + self.directions.index
    }

    /// Everything that is neither payload nor bitvector index.
    pub fn overhead(&self) -> usize {
        self.tree + self.header
    }

    pub fn total(&self) -> usize {
        self.payload() + self.index() + self.overhead()
    }
}

/// A permutation of `[1..n]` stored in space close to `n·H(vRuns)`.
#[derive(Clone, Debug)]
pub struct PermutationCoder {
    n: usize,
    arity: usize,
    mixed: bool,
    limited: bool,
    variant: BitVectorVariant,
    wavelet: ShapedWavelet,
    run_starts: BitVector,
    monotone: Option<Monotone>,
}

impl PermutationCoder {
    pub fn encode(perm: &[usize], config: CoderConfig) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        validate_permutation(perm)?;
        let arity = config.resolve_arity(n)?;
        let mut work = perm.to_vec();
        let mut monotone = None;
        if config.mixed {
            let mono = monotone_runs_by(perm, &mut |a, b| a < b);
            if mono.has_descending() {
                for (&s, (&len, dir)) in mono
                    .starts()
                    .iter()
                    .zip(mono.lengths().iter().zip(mono.directions()))
                {
                    if dir.is_descending() {
                        work[s..s + len].reverse();
                    }
                }
                monotone = Some(Monotone {
                    starts: BitVector::from_positions(n, mono.starts(), config.variant),
                    descending: BitVector::from_bools(
                        &mono
                            .directions()
                            .iter()
                            .map(|d| d.is_descending())
                            .collect::<Vec<_>>(),
                        config.variant,
                    ),
                });
            }
        }
        let runs = ascending_runs_by(&work, &mut |a, b| a < b);
        let (tree, limited) = shaped_tree(runs.lengths(), arity, config.depth_limit)?;
        let leaves: Vec<Vec<usize>> = runs
            .starts()
            .iter()
            .zip(runs.lengths())
            .map(|(&s, &len)| work[s..s + len].to_vec())
            .collect();
        drop(work);
        let merged = merge_along(&tree, leaves, &mut |a: &usize, b: &usize| a < b, None, true);
        debug_assert!(merged.values.iter().enumerate().all(|(k, &v)| v == k + 1));
        let run_starts = BitVector::from_positions(n, runs.starts(), config.variant);
        Ok(Self {
            n,
            arity,
            mixed: config.mixed,
            limited,
            variant: config.variant,
            wavelet: ShapedWavelet::new(tree, merged.symbols, config.variant),
            run_starts,
            monotone,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_mixed(&self) -> bool {
        self.mixed
    }

    pub fn is_depth_limited(&self) -> bool {
        self.limited
    }

    pub fn variant(&self) -> BitVectorVariant {
        self.variant
    }

    pub fn config(&self) -> CoderConfig {
        CoderConfig {
            arity: Some(self.arity),
            depth_limit: self.limited,
            mixed: self.mixed,
            variant: self.variant,
        }
    }

    pub fn tree(&self) -> &CodeTree {
        self.wavelet.tree()
    }

    pub fn wavelet(&self) -> &ShapedWavelet {
        &self.wavelet
    }

    /// ρ: runs encoded by the tree (ascending runs after any reversal).
    pub fn run_count(&self) -> usize {
        self.tree().leaf_count()
    }

    /// Lengths of the encoded runs, in position order.
    pub fn run_lengths(&self) -> &[usize] {
        self.tree().weights()
    }

    /// H of the encoded run lengths.
    pub fn entropy(&self) -> f64 {
        entropy_unchecked(self.run_lengths())
    }

    /// Greedy monotone runs found in mixed mode, or ρ otherwise.
    pub fn monotone_run_count(&self) -> usize {
        self.monotone
            .as_ref()
            .map_or(self.run_count(), |m| m.starts.count_ones())
    }

    /// One flag per monotone run, set for reversed runs; all clear when no
    /// run was descending.
    pub fn direction_bits(&self) -> Vec<bool> {
        match &self.monotone {
            Some(m) => (0..m.descending.len()).map(|k| m.descending.get(k)).collect(),
            None => vec![false; self.run_count()],
        }
    }

    /// π(i) for 1-based `i`.
    pub fn apply(&self, i: usize) -> Result<usize> {
        check_range(i, 1, self.n)?;
        Ok(self.apply0(i - 1) + 1)
    }

    /// π⁻¹(j) for 1-based `j`.
    pub fn inverse(&self, j: usize) -> Result<usize> {
        check_range(j, 1, self.n)?;
        Ok(self.inverse0(j - 1) + 1)
    }

    #[inline]
    pub(crate) fn apply0(&self, i: usize) -> usize {
        let p = match &self.monotone {
            Some(m) => m.reflect(i),
            None => i,
        };
        let run = self.run_starts.rank1(p + 1) - 1;
        let offset = p - self.tree().pos(run);
        self.wavelet.climb(run, offset)
    }

    #[inline]
    pub(crate) fn inverse0(&self, j: usize) -> usize {
        let (run, offset) = self.wavelet.descend(j);
        let p = self.tree().pos(run) + offset;
        match &self.monotone {
            Some(m) => m.reflect(p),
            None => p,
        }
    }

    /// Tree edges walked by `apply(i)`: the depth of the run holding `i`.
    pub fn apply_path_length(&self, i: usize) -> Result<usize> {
        check_range(i, 1, self.n)?;
        let p = match &self.monotone {
            Some(m) => m.reflect(i - 1),
            None => i - 1,
        };
        let run = self.run_starts.rank1(p + 1) - 1;
        Ok(self.tree().node(self.tree().leaf_node(run)).depth())
    }

    /// The whole permutation, 1-based.
    pub fn decode(&self) -> Vec<usize> {
        let mut perm = vec![0; self.n];
        for j in 0..self.n {
            perm[self.inverse0(j)] = j + 1;
        }
        perm
    }

    /// Σ over internal nodes of the zero-order entropy of their sequence.
    pub fn payload_entropy_bits(&self) -> f64 {
        self.wavelet.entropy_bits()
    }

    /// Mean leaf depth weighted by run length.
    pub fn average_depth(&self) -> f64 {
        self.tree()
            .average_depth(self.run_lengths())
            .expect("tree weights match")
    }

    pub fn measured_size_bits(&self) -> PermSpace {
        PermSpace {
            sequences: self.wavelet.sequence_space(),
            tree: self.tree().shape_bits(),
            run_starts: self.run_starts.space(),
            directions: self.monotone.as_ref().map(Monotone::space).unwrap_or_default(),
            header: 32 + 16 + 16 + 64 + 64,
        }
    }

    fn flags(&self) -> u16 {
        let mut flags = self.arity as u16;
        if self.mixed {
            flags |= FLAG_MIXED;
        }
        if self.limited {
            flags |= FLAG_LIMITED;
        }
        if self.monotone.is_some() {
            flags |= FLAG_MONOTONE;
        }
        flags | ((self.variant.tag() as u16) << VARIANT_SHIFT)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_magic(w, MAGIC, VERSION)?;
        w.write_u16::<LittleEndian>(self.flags())?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u64::<LittleEndian>(self.run_count() as u64)?;
        self.tree().write_shape(w)?;
        self.run_starts.write_to(w)?;
        if let Some(m) = &self.monotone {
            m.starts.write_to(w)?;
            m.descending.write_to(w)?;
        }
        self.wavelet.write_sequences(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_magic(r, MAGIC, VERSION)?;
        let flags = r.read_u16::<LittleEndian>()?;
        let arity = (flags & 0xff) as usize;
        let variant = BitVectorVariant::from_tag(((flags >> VARIANT_SHIFT) & 0b11) as u8)?;
        let n = read_len(r)?;
        let rho = read_len(r)?;
        if n == 0 {
            return Err(Error::Format("empty permutation".into()));
        }
        let tree = CodeTree::read_shape(r, n)?;
        if tree.leaf_count() != rho || tree.arity() != arity {
            return Err(Error::Format("tree disagrees with header".into()));
        }
        let run_starts = BitVector::read_from(r)?;
        if run_starts.len() != n || run_starts.count_ones() != rho {
            return Err(Error::Format("run-start bitmap disagrees with header".into()));
        }
        for k in 0..rho {
            if run_starts.select1(k) != tree.pos(k) {
                return Err(Error::Format("run-start bitmap disagrees with the tree".into()));
            }
        }
        let monotone = if flags & FLAG_MONOTONE != 0 {
            let starts = BitVector::read_from(r)?;
            let descending = BitVector::read_from(r)?;
            if starts.len() != n || !starts.get(0) || descending.len() != starts.count_ones() {
                return Err(Error::Format("monotone-run bitmaps are inconsistent".into()));
            }
            Some(Monotone { starts, descending })
        } else {
            None
        };
        let wavelet = ShapedWavelet::read_sequences(r, tree)?;
        Ok(Self {
            n,
            arity,
            mixed: flags & FLAG_MIXED != 0,
            limited: flags & FLAG_LIMITED != 0,
            variant,
            wavelet,
            run_starts,
            monotone,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INTERLEAVED: [usize; 10] = [1, 3, 5, 7, 9, 2, 4, 6, 8, 10];

    fn check_all(perm: &[usize], coder: &PermutationCoder) {
        for (i, &v) in perm.iter().enumerate() {
            assert_eq!(coder.apply(i + 1).unwrap(), v);
            assert_eq!(coder.inverse(v).unwrap(), i + 1);
        }
        assert_eq!(coder.decode(), perm);
    }

    #[test]
    fn identity_is_a_single_leaf() {
        let id: Vec<usize> = (1..=20).collect();
        for mixed in [false, true] {
            let c = PermutationCoder::encode(&id, CoderConfig::default().with_mixed(mixed)).unwrap();
            assert_eq!(c.run_count(), 1);
            assert_eq!(c.tree().node_count(), 1);
            assert_eq!(c.measured_size_bits().sequences.payload, 0);
            assert_eq!(c.payload_entropy_bits(), 0.0);
            check_all(&id, &c);
        }
    }

    #[test]
    fn two_interleaved_runs() {
        let c = PermutationCoder::encode(&INTERLEAVED, CoderConfig::binary()).unwrap();
        assert_eq!(c.run_lengths(), &[5, 5]);
        let root: Vec<usize> = (0..10).map(|p| c.wavelet().sequence(0).unwrap().access(p)).collect();
        assert_eq!(root, vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1]);
        assert!((c.payload_entropy_bits() - 10.0).abs() < 1e-9);
        assert_eq!(c.apply(6).unwrap(), 2);
        assert_eq!(c.inverse(2).unwrap(), 6);
        check_all(&INTERLEAVED, &c);
    }

    #[test]
    fn mixed_reverses_descending_runs() {
        let perm = [5, 4, 3, 2, 1, 6, 7, 8, 9, 10];
        let c = PermutationCoder::encode(&perm, CoderConfig::binary().with_mixed(true)).unwrap();
        assert_eq!(c.monotone_run_count(), 2);
        assert_eq!(c.direction_bits(), vec![true, false]);
        // after reversal the two runs fuse
        assert_eq!(c.run_count(), 1);
        assert_eq!(c.apply(2).unwrap(), 4);
        check_all(&perm, &c);
        let plain = PermutationCoder::encode(&perm, CoderConfig::binary()).unwrap();
        assert_eq!(plain.run_count(), 5);
        check_all(&perm, &plain);
    }

    #[test]
    fn mixed_without_descents_matches_ascending_coder() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let asc = PermutationCoder::encode(&INTERLEAVED, CoderConfig::binary()).unwrap();
        let mix = PermutationCoder::encode(&INTERLEAVED, CoderConfig::binary().with_mixed(true)).unwrap();
        asc.write_to(&mut a).unwrap();
        mix.write_to(&mut b).unwrap();
        // only the mixed flag differs
        assert_eq!(a.len(), b.len());
        assert_eq!(a[..6], b[..6]);
        assert_eq!(a[8..], b[8..]);
    }

    #[test]
    fn all_permutations_of_five() {
        let mut perm: Vec<usize> = (1..=5).collect();
        let configs = [
            CoderConfig::binary(),
            CoderConfig::default().with_arity(3),
            CoderConfig::binary().with_mixed(true),
            CoderConfig::binary().with_variant(BitVectorVariant::Sparse),
        ];
        loop {
            for cfg in configs {
                let c = PermutationCoder::encode(&perm, cfg).unwrap();
                check_all(&perm, &c);
            }
            // next lexicographic permutation
            let Some(k) = (0..perm.len() - 1).rev().find(|&k| perm[k] < perm[k + 1]) else {
                break;
            };
            let l = (k + 1..perm.len()).rev().find(|&l| perm[l] > perm[k]).unwrap();
            perm.swap(k, l);
            perm[k + 1..].reverse();
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            PermutationCoder::encode(&[], CoderConfig::default()),
            Err(Error::EmptyInput)
        ));
        assert!(PermutationCoder::encode(&[1, 1], CoderConfig::default()).is_err());
        assert!(PermutationCoder::encode(&[1, 2], CoderConfig::default().with_arity(1)).is_err());
        let c = PermutationCoder::encode(&[2, 1], CoderConfig::default()).unwrap();
        assert!(c.apply(0).is_err());
        assert!(c.inverse(3).is_err());
    }

    #[test]
    fn serialization_roundtrip() {
        let perm = [3, 9, 1, 10, 4, 5, 2, 8, 7, 6, 12, 11];
        for cfg in [
            CoderConfig::binary(),
            CoderConfig::default().with_arity(4).with_mixed(true),
            CoderConfig::binary().with_mixed(true).with_variant(BitVectorVariant::Plain),
        ] {
            let c = PermutationCoder::encode(&perm, cfg).unwrap();
            let mut buf = Vec::new();
            c.write_to(&mut buf).unwrap();
            let back = PermutationCoder::read_from(&mut buf.as_slice()).unwrap();
            check_all(&perm, &back);
            let mut again = Vec::new();
            back.write_to(&mut again).unwrap();
            assert_eq!(buf, again);
        }
    }

    #[test]
    fn default_arity_values() {
        assert_eq!(default_arity(1), 2);
        assert_eq!(default_arity(100), 2);
        assert_eq!(default_arity(1 << 16), 4);
        assert_eq!(default_arity(1_000_000), 4);
    }
}

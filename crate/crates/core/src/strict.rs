//! Permutations with long strict runs (`π(i+1) = π(i) + 1`).
//!
//! Each strict run collapses to its head. `R` marks the heads in the domain,
//! `R_inv` marks the head values in the range, and the collapsed permutation
//! `π′(k) = rank₁(R_inv, π(select₁(R, k)))` over `[1..τ]` goes to an inner
//! [`PermutationCoder`]. Offsets inside a run are carried over unchanged.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bits::{read_len, read_magic, write_magic};
use crate::bitvector::{BitVector, BitVectorVariant, SpaceUsage};
use crate::error::{check_range, Error, Result};
use crate::perm::{CoderConfig, PermSpace, PermutationCoder};
use crate::runs::strict_ascending_runs;

const MAGIC: &[u8; 4] = b"RPSR";
const VERSION: u16 = 1;

/// Sparse bitmaps when `τ·(2 + lg(n/τ)) < n/4`, compressed otherwise.
pub fn choose_bitmap_variant(n: usize, tau: usize) -> BitVectorVariant {
    if tau == 0 || n == 0 {
        return BitVectorVariant::Sparse;
    }
    let cost = tau as f64 * (2.0 + (n as f64 / tau as f64).log2());
    if cost < n as f64 / 4.0 {
        BitVectorVariant::Sparse
    } else {
        BitVectorVariant::Compressed
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StrictSpace {
    pub r: SpaceUsage,
    pub r_inv: SpaceUsage,
    pub inner: PermSpace,
    pub header: usize,
}

impl StrictSpace {
    /// Both head bitmaps.
    pub fn bitmaps(&self) -> usize {
        self.r.total() + self.r_inv.total()
    }

    pub fn total(&self) -> usize {
        self.bitmaps() + self.inner.total() + self.header
    }
}

#[derive(Clone, Debug)]
pub struct StrictPermutationCoder {
    n: usize,
    r: BitVector,
    r_inv: BitVector,
    inner: PermutationCoder,
}

impl StrictPermutationCoder {
    /// `bitmaps` selects the representation of `R` and `R_inv`; `config`
    /// applies to the inner coder.
    pub fn encode(perm: &[usize], config: CoderConfig, bitmaps: BitVectorVariant) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let strict = strict_ascending_runs(perm)?;
        let heads = strict.heads0();
        let mut head_values: Vec<usize> = strict.head_values().iter().map(|v| v - 1).collect();
        let r = BitVector::from_positions(n, heads, bitmaps);
        head_values.sort_unstable();
        let r_inv = BitVector::from_positions(n, &head_values, bitmaps);
        let collapsed: Vec<usize> = strict
            .head_values()
            .iter()
            .map(|&v| r_inv.rank1(v))
            .collect();
        let inner = PermutationCoder::encode(&collapsed, config)?;
        Ok(Self { n, r, r_inv, inner })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// τ, the number of strict runs.
    pub fn strict_run_count(&self) -> usize {
        self.r.count_ones()
    }

    pub fn bitmap_variant(&self) -> BitVectorVariant {
        self.r.variant()
    }

    pub fn inner(&self) -> &PermutationCoder {
        &self.inner
    }

    /// π′, 1-based.
    pub fn collapsed(&self) -> Vec<usize> {
        self.inner.decode()
    }

    pub fn apply(&self, i: usize) -> Result<usize> {
        check_range(i, 1, self.n)?;
        let i = i - 1;
        let k = self.r.rank1(i + 1) - 1;
        let target = self.inner.apply0(k);
        Ok(self.r_inv.select1(target) + i - self.r.select1(k) + 1)
    }

    pub fn inverse(&self, j: usize) -> Result<usize> {
        check_range(j, 1, self.n)?;
        let j = j - 1;
        let k = self.r_inv.rank1(j + 1) - 1;
        let source = self.inner.inverse0(k);
        Ok(self.r.select1(source) + j - self.r_inv.select1(k) + 1)
    }

    pub fn decode(&self) -> Vec<usize> {
        let mut perm = Vec::with_capacity(self.n);
        let tau = self.strict_run_count();
        for k in 0..tau {
            let start = self.r.select1(k);
            let end = if k + 1 < tau { self.r.select1(k + 1) } else { self.n };
            let base = self.r_inv.select1(self.inner.apply0(k));
            perm.extend((0..end - start).map(|off| base + off + 1));
        }
        perm
    }

    pub fn measured_size_bits(&self) -> StrictSpace {
        StrictSpace {
            r: self.r.space(),
            r_inv: self.r_inv.space(),
            inner: self.inner.measured_size_bits(),
            header: 32 + 16 + 64 + 64 + 8,
        }
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_magic(w, MAGIC, VERSION)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u64::<LittleEndian>(self.strict_run_count() as u64)?;
        w.write_u8(self.bitmap_variant().tag())?;
        self.r.write_to(w)?;
        self.r_inv.write_to(w)?;
        self.inner.write_to(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_magic(r, MAGIC, VERSION)?;
        let n = read_len(r)?;
        let tau = read_len(r)?;
        let variant = BitVectorVariant::from_tag(r.read_u8()?)?;
        let heads = BitVector::read_from(r)?;
        let r_inv = BitVector::read_from(r)?;
        let inner = PermutationCoder::read_from(r)?;
        let ok = n > 0
            && heads.len() == n
            && r_inv.len() == n
            && heads.variant() == variant
            && r_inv.variant() == variant
            && heads.count_ones() == tau
            && r_inv.count_ones() == tau
            && heads.get(0)
            && inner.len() == tau;
        if !ok {
            return Err(Error::Format("strict coder components disagree".into()));
        }
        Ok(Self {
            n,
            r: heads,
            r_inv,
            inner,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROTATED: [usize; 10] = [6, 7, 8, 9, 10, 1, 2, 3, 4, 5];

    fn check(perm: &[usize], c: &StrictPermutationCoder) {
        for (i, &v) in perm.iter().enumerate() {
            assert_eq!(c.apply(i + 1).unwrap(), v);
            assert_eq!(c.inverse(v).unwrap(), i + 1);
        }
        assert_eq!(c.decode(), perm);
    }

    #[test]
    fn rotated_identity() {
        for variant in [BitVectorVariant::Compressed, BitVectorVariant::Sparse] {
            let c = StrictPermutationCoder::encode(&ROTATED, CoderConfig::binary(), variant).unwrap();
            assert_eq!(c.strict_run_count(), 2);
            assert_eq!(c.collapsed(), vec![2, 1]);
            assert_eq!(c.apply(3).unwrap(), 8);
            assert_eq!(c.inverse(8).unwrap(), 3);
            check(&ROTATED, &c);
        }
    }

    #[test]
    fn identity_collapses_to_one() {
        let id: Vec<usize> = (1..=9).collect();
        let c = StrictPermutationCoder::encode(&id, CoderConfig::default(), BitVectorVariant::Sparse).unwrap();
        assert_eq!(c.strict_run_count(), 1);
        assert_eq!(c.collapsed(), vec![1]);
        check(&id, &c);
    }

    #[test]
    fn no_strict_runs_keeps_permutation() {
        let perm = [1, 3, 5, 7, 9, 2, 4, 6, 8, 10];
        let c = StrictPermutationCoder::encode(&perm, CoderConfig::binary(), BitVectorVariant::Compressed)
            .unwrap();
        assert_eq!(c.collapsed(), perm);
        check(&perm, &c);
    }

    #[test]
    fn roundtrip_bytes() {
        let perm = [4, 5, 6, 1, 2, 9, 10, 3, 7, 8];
        let c = StrictPermutationCoder::encode(&perm, CoderConfig::default().with_mixed(true), BitVectorVariant::Sparse)
            .unwrap();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = StrictPermutationCoder::read_from(&mut buf.as_slice()).unwrap();
        check(&perm, &back);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn variant_heuristic() {
        assert_eq!(choose_bitmap_variant(1_000_000, 2), BitVectorVariant::Sparse);
        assert_eq!(choose_bitmap_variant(1000, 1000), BitVectorVariant::Compressed);
    }
}

//! Bit sequences with rank and select.
//!
//! Three space regimes share one front-end type, [`BitVector`]:
//!
//! | Variant | access | rank | select | space (bits) |
//! | --- | :-: | :-: | :-: | :-: |
//! | [`PlainBitVector`] | O(1) | O(1) | O(lg n) | n + n/8 + hints |
//! | [`CompressedBitVector`] | O(b) | O(b) | O(lg n + b) | ≈ nH₀ + n⌈lg(b+1)⌉/b + index |
//! | [`SparseBitVector`] | O(lg m) | O(1 + bucket) | O(1) amortized | ≈ m(2 + lg(n/m)) |
//!
//! The public query surface is 1-based: `rank(b, i)` counts occurrences of
//! `b` in positions `1..=i`, `select(b, j)` returns the 1-based position of
//! the `j`-th occurrence, and `access(i)` reads position `i`. The coders in
//! this crate use the 0-based `rank1`/`select1` family directly.

mod compressed;
mod plain;
mod sparse;

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

pub use compressed::{CompressedBitVector, BLOCK_WIDTH, SUPERBLOCK_BLOCKS};
pub use plain::PlainBitVector;
pub use sparse::SparseBitVector;

use crate::bits::{read_len, read_magic, write_magic, RawBits};
use crate::error::{check_range, Error, Result};

const MAGIC: &[u8; 4] = b"RPBV";
const VERSION: u16 = 1;

/// Which concrete representation backs a [`BitVector`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BitVectorVariant {
    Plain,
    #[default]
    Compressed,
    Sparse,
}

impl BitVectorVariant {
    pub fn tag(self) -> u8 {
        match self {
            Self::Plain => 0,
            Self::Compressed => 1,
            Self::Sparse => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Self::Plain),
            1 => Ok(Self::Compressed),
            2 => Ok(Self::Sparse),
            _ => Err(Error::Format(format!("unknown bitvector variant {tag}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Plain => "plain",
            Self::Compressed => "compressed",
            Self::Sparse => "sparse",
        }
    }
}

impl std::str::FromStr for BitVectorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Self::Plain),
            "compressed" | "rrr" => Ok(Self::Compressed),
            "sparse" | "ef" => Ok(Self::Sparse),
            _ => Err(Error::InvalidParameters(format!("unknown bitvector variant {s:?}"))),
        }
    }
}

/// Stored size of a structure, split into the encoded content and the
/// auxiliary data that only accelerates queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceUsage {
    pub payload: usize,
    pub index: usize,
}

impl SpaceUsage {
    pub fn total(&self) -> usize {
        self.payload + self.index
    }
}

impl std::ops::Add for SpaceUsage {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            payload: self.payload + rhs.payload,
            index: self.index + rhs.index,
        }
    }
}

impl std::ops::AddAssign for SpaceUsage {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// A static bit sequence supporting access, rank and select.
#[derive(Clone, Debug)]
pub enum BitVector {
    Plain(PlainBitVector),
    Compressed(CompressedBitVector),
    Sparse(SparseBitVector),
}

macro_rules! dispatch {
    ($self:expr, $bv:ident => $e:expr) => {
        match $self {
            BitVector::Plain($bv) => $e,
            BitVector::Compressed($bv) => $e,
            BitVector::Sparse($bv) => $e,
        }
    };
}

impl BitVector {
    pub fn build(bits: &RawBits, variant: BitVectorVariant) -> Self {
        match variant {
            BitVectorVariant::Plain => Self::Plain(PlainBitVector::new(bits.clone())),
            _ => Self::from_raw_ref(bits, variant),
        }
    }

    /// Like [`build`](Self::build), reusing the buffer when stored plain.
    pub fn from_raw(bits: RawBits, variant: BitVectorVariant) -> Self {
        match variant {
            BitVectorVariant::Plain => Self::Plain(PlainBitVector::new(bits)),
            _ => Self::from_raw_ref(&bits, variant),
        }
    }

    fn from_raw_ref(bits: &RawBits, variant: BitVectorVariant) -> Self {
        match variant {
            BitVectorVariant::Plain => Self::Plain(PlainBitVector::new(bits.clone())),
            BitVectorVariant::Compressed => Self::Compressed(CompressedBitVector::new(bits)),
            BitVectorVariant::Sparse => Self::Sparse(SparseBitVector::from_bits(bits)),
        }
    }

    pub fn from_bools(bits: &[bool], variant: BitVectorVariant) -> Self {
        Self::build(&RawBits::from_bools(bits.iter().copied()), variant)
    }

    /// Builds from strictly increasing 0-based positions of the set bits.
    pub fn from_positions(n: usize, positions: &[usize], variant: BitVectorVariant) -> Self {
        match variant {
            BitVectorVariant::Sparse => Self::Sparse(SparseBitVector::new(n, positions)),
            _ => {
                let mut raw = RawBits::zeros(n);
                for &p in positions {
                    raw.set(p, true);
                }
                Self::from_raw(raw, variant)
            }
        }
    }

    pub fn variant(&self) -> BitVectorVariant {
        match self {
            Self::Plain(_) => BitVectorVariant::Plain,
            Self::Compressed(_) => BitVectorVariant::Compressed,
            Self::Sparse(_) => BitVectorVariant::Sparse,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        dispatch!(self, bv => bv.len())
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of set bits.
    #[inline]
    pub fn count_ones(&self) -> usize {
        dispatch!(self, bv => bv.count_ones())
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    // 0-based internal surface.

    /// Bit at 0-based position `i`.
    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        dispatch!(self, bv => bv.get(i))
    }

    /// Number of ones in `[0..i)`.
    #[inline]
    pub(crate) fn rank1(&self, i: usize) -> usize {
        dispatch!(self, bv => bv.rank1(i))
    }

    #[inline]
    pub(crate) fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// 0-based position of the `k`-th (0-based) one.
    #[inline]
    pub(crate) fn select1(&self, k: usize) -> usize {
        dispatch!(self, bv => bv.select1(k))
    }

    /// 0-based position of the `k`-th (0-based) zero.
    #[inline]
    pub(crate) fn select0(&self, k: usize) -> usize {
        dispatch!(self, bv => bv.select0(k))
    }

    // 1-based public surface.

    /// The bit at 1-based position `i`.
    pub fn access(&self, i: usize) -> Result<bool> {
        check_range(i, 1, self.len())?;
        Ok(self.get(i - 1))
    }

    /// Occurrences of `bit` among positions `1..=i`, for `i` in `[0..n]`.
    pub fn rank(&self, bit: bool, i: usize) -> Result<usize> {
        check_range(i, 0, self.len())?;
        Ok(if bit { self.rank1(i) } else { self.rank0(i) })
    }

    /// 1-based position of the `j`-th occurrence of `bit`.
    pub fn select(&self, bit: bool, j: usize) -> Result<usize> {
        let total = if bit {
            self.count_ones()
        } else {
            self.count_zeros()
        };
        if j == 0 || j > total {
            return Err(Error::NoSuchOccurrence {
                symbol: bit as u64,
                rank: j,
            });
        }
        Ok(1 + if bit {
            self.select1(j - 1)
        } else {
            self.select0(j - 1)
        })
    }

    pub fn space(&self) -> SpaceUsage {
        dispatch!(self, bv => bv.space())
    }

    pub fn size_in_bits(&self) -> usize {
        self.space().total()
    }

    pub fn to_raw(&self) -> RawBits {
        dispatch!(self, bv => bv.to_raw())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_magic(w, MAGIC, VERSION)?;
        w.write_u8(self.variant().tag())?;
        w.write_u64::<LittleEndian>(self.len() as u64)?;
        dispatch!(self, bv => bv.write_payload(w))
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_magic(r, MAGIC, VERSION)?;
        let variant = BitVectorVariant::from_tag(r.read_u8()?)?;
        let n = read_len(r)?;
        Ok(match variant {
            BitVectorVariant::Plain => Self::Plain(PlainBitVector::read_payload(r, n)?),
            BitVectorVariant::Compressed => {
                Self::Compressed(CompressedBitVector::read_payload(r, n)?)
            }
            BitVectorVariant::Sparse => Self::Sparse(SparseBitVector::read_payload(r, n)?),
        })
    }
}

//! Block class/offset compression.
//!
//! The bits are cut into blocks of [`BLOCK_WIDTH`] bits. Each block is stored
//! as its class (number of ones, fixed 6-bit field) and its offset, the colex
//! rank of the block among all blocks of that class, written in
//! ⌈lg C(b, class)⌉ bits. Offsets are computed and decoded on the fly with a
//! binomial table. Every [`SUPERBLOCK_BLOCKS`] blocks we sample the rank and
//! the bit position inside the offset stream.

use std::io::{Read, Write};

use byteorder::{LittleEndian, WriteBytesExt};

use super::SpaceUsage;
use crate::bits::{read_bit_stream, read_len, select_in_word, write_bit_stream, RawBits};
use crate::error::{Error, Result};

pub const BLOCK_WIDTH: usize = 63;
pub const SUPERBLOCK_BLOCKS: usize = 16;
const CLASS_BITS: usize = 6;

const fn binomials() -> [[u64; 64]; 64] {
    let mut table = [[0u64; 64]; 64];
    let mut n = 0;
    while n < 64 {
        table[n][0] = 1;
        let mut k = 1;
        while k <= n {
            table[n][k] = table[n - 1][k - 1] + if k < n { table[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    table
}

const BINOMIAL_TABLE: [[u64; 64]; 64] = binomials();
static BINOMIAL: [[u64; 64]; 64] = BINOMIAL_TABLE;

const fn offset_widths() -> [u8; 64] {
    let mut widths = [0u8; 64];
    let mut k = 0;
    while k <= BLOCK_WIDTH {
        let count = BINOMIAL_TABLE[BLOCK_WIDTH][k];
        // bits to write values in [0..count)
        widths[k] = if count <= 1 {
            0
        } else {
            (64 - (count - 1).leading_zeros()) as u8
        };
        k += 1;
    }
    widths
}

static OFFSET_WIDTH: [u8; 64] = offset_widths();

#[inline]
fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        0
    } else {
        BINOMIAL[n][k]
    }
}

fn encode_block(word: u64) -> (usize, u64) {
    let mut offset = 0u64;
    let mut j = 0;
    let mut w = word;
    while w != 0 {
        let p = w.trailing_zeros() as usize;
        j += 1;
        offset += binomial(p, j);
        w &= w - 1;
    }
    (j, offset)
}

fn decode_block(class: usize, mut offset: u64) -> u64 {
    if class == BLOCK_WIDTH {
        return (1u64 << BLOCK_WIDTH) - 1;
    }
    let mut word = 0u64;
    let mut p = BLOCK_WIDTH;
    for j in (1..=class).rev() {
        // largest p with C(p, j) <= offset
        p -= 1;
        while binomial(p, j) > offset {
            p -= 1;
        }
        word |= 1 << p;
        offset -= binomial(p, j);
    }
    word
}

/// Entropy-compressed bit sequence.
#[derive(Clone, Debug)]
pub struct CompressedBitVector {
    len: usize,
    ones: usize,
    classes: RawBits,
    offsets: RawBits,
    sb_ranks: Vec<u64>,
    sb_offsets: Vec<u64>,
}

impl CompressedBitVector {
    pub fn new(bits: &RawBits) -> Self {
        let len = bits.len();
        let nblocks = len.div_ceil(BLOCK_WIDTH);
        let mut classes = RawBits::with_capacity(nblocks * CLASS_BITS);
        let mut offsets = RawBits::new();
        let mut sb_ranks = Vec::with_capacity(nblocks.div_ceil(SUPERBLOCK_BLOCKS) + 1);
        let mut sb_offsets = Vec::with_capacity(sb_ranks.capacity());
        let mut ones = 0;
        for b in 0..nblocks {
            if b % SUPERBLOCK_BLOCKS == 0 {
                sb_ranks.push(ones as u64);
                sb_offsets.push(offsets.len() as u64);
            }
            let start = b * BLOCK_WIDTH;
            let width = BLOCK_WIDTH.min(len - start);
            let word = bits.get_int(start, width);
            let (class, offset) = encode_block(word);
            classes.push_int(class as u64, CLASS_BITS);
            offsets.push_int(offset, OFFSET_WIDTH[class] as usize);
            ones += class;
        }
        sb_ranks.push(ones as u64);
        sb_offsets.push(offsets.len() as u64);
        Self {
            len,
            ones,
            classes,
            offsets,
            sb_ranks,
            sb_offsets,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    fn class(&self, block: usize) -> usize {
        self.classes.get_int(block * CLASS_BITS, CLASS_BITS) as usize
    }

    // Walks from the superblock start to `block`, returning (ones before, offset position).
    #[inline]
    fn block_start(&self, block: usize) -> (usize, usize) {
        let sb = block / SUPERBLOCK_BLOCKS;
        let mut ones = self.sb_ranks[sb] as usize;
        let mut pos = self.sb_offsets[sb] as usize;
        for b in sb * SUPERBLOCK_BLOCKS..block {
            let c = self.class(b);
            ones += c;
            pos += OFFSET_WIDTH[c] as usize;
        }
        (ones, pos)
    }

    #[inline]
    fn block_word(&self, block: usize, offset_pos: usize) -> u64 {
        let class = self.class(block);
        let width = OFFSET_WIDTH[class] as usize;
        decode_block(class, self.offsets.get_int(offset_pos, width))
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        let block = i / BLOCK_WIDTH;
        let (_, pos) = self.block_start(block);
        (self.block_word(block, pos) >> (i % BLOCK_WIDTH)) & 1 == 1
    }

    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        if i == self.len {
            return self.ones;
        }
        let block = i / BLOCK_WIDTH;
        let (ones, pos) = self.block_start(block);
        let r = i % BLOCK_WIDTH;
        if r == 0 {
            return ones;
        }
        let word = self.block_word(block, pos);
        ones + (word & ((1u64 << r) - 1)).count_ones() as usize
    }

    pub fn select1(&self, k: usize) -> usize {
        debug_assert!(k < self.ones);
        self.select_generic(k, true)
    }

    pub fn select0(&self, k: usize) -> usize {
        debug_assert!(k < self.len - self.ones);
        self.select_generic(k, false)
    }

    fn select_generic(&self, k: usize, bit: bool) -> usize {
        let nsb = self.sb_ranks.len() - 1;
        let count_before = |sb: usize| {
            let ones = self.sb_ranks[sb] as usize;
            if bit {
                ones
            } else {
                (sb * SUPERBLOCK_BLOCKS * BLOCK_WIDTH).min(self.len) - ones
            }
        };
        // last superblock with count_before <= k
        let (mut lo, mut hi) = (0, nsb);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if count_before(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut remaining = k - count_before(lo);
        let mut pos = self.sb_offsets[lo] as usize;
        let mut block = lo * SUPERBLOCK_BLOCKS;
        loop {
            let class = self.class(block);
            let c = if bit { class } else { BLOCK_WIDTH - class };
            if remaining < c {
                let word = self.block_word(block, pos);
                let word = if bit { word } else { !word };
                return block * BLOCK_WIDTH + select_in_word(word, remaining);
            }
            remaining -= c;
            pos += OFFSET_WIDTH[class] as usize;
            block += 1;
        }
    }

    pub fn space(&self) -> SpaceUsage {
        SpaceUsage {
            payload: self.offsets.len(),
            index: self.classes.len() + (self.sb_ranks.len() + self.sb_offsets.len()) * 64,
        }
    }

    /// Bits spent on block classes.
    pub fn class_bits(&self) -> usize {
        self.classes.len()
    }

    pub fn to_raw(&self) -> RawBits {
        let mut raw = RawBits::with_capacity(self.len);
        let nblocks = self.len.div_ceil(BLOCK_WIDTH);
        let mut pos = 0;
        for b in 0..nblocks {
            let class = self.class(b);
            let word = self.block_word(b, pos);
            pos += OFFSET_WIDTH[class] as usize;
            let width = BLOCK_WIDTH.min(self.len - b * BLOCK_WIDTH);
            raw.push_int(word, width);
        }
        raw
    }

    pub(super) fn write_payload<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_u64::<LittleEndian>(self.ones as u64)?;
        w.write_u64::<LittleEndian>(self.offsets.len() as u64)?;
        write_bit_stream(w, self.classes.words(), self.classes.len())?;
        write_bit_stream(w, self.offsets.words(), self.offsets.len())
    }

    pub(super) fn read_payload<R: Read>(r: &mut R, n: usize) -> Result<Self> {
        let ones = read_len(r)?;
        let offset_len = read_len(r)?;
        let nblocks = n.div_ceil(BLOCK_WIDTH);
        let classes = RawBits::from_words(read_bit_stream(r, nblocks * CLASS_BITS)?, nblocks * CLASS_BITS);
        let offsets = RawBits::from_words(read_bit_stream(r, offset_len)?, offset_len);
        let mut sb_ranks = Vec::new();
        let mut sb_offsets = Vec::new();
        let mut count = 0;
        let mut pos = 0;
        for b in 0..nblocks {
            if b % SUPERBLOCK_BLOCKS == 0 {
                sb_ranks.push(count as u64);
                sb_offsets.push(pos as u64);
            }
            let class = classes.get_int(b * CLASS_BITS, CLASS_BITS) as usize;
            let width = BLOCK_WIDTH.min(n - b * BLOCK_WIDTH);
            if class > width {
                return Err(Error::Format(format!("block {b} has class {class} > {width}")));
            }
            count += class;
            pos += OFFSET_WIDTH[class] as usize;
        }
        sb_ranks.push(count as u64);
        sb_offsets.push(pos as u64);
        if count != ones || pos != offset_len {
            return Err(Error::Format("compressed bitvector header mismatch".into()));
        }
        Ok(Self {
            len: n,
            ones,
            classes,
            offsets,
            sb_ranks,
            sb_offsets,
        })
    }
}

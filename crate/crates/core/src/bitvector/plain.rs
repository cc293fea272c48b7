use std::io::{Read, Write};

use super::SpaceUsage;
use crate::bits::{read_bit_stream, select_in_word, write_bit_stream, RawBits};
use crate::error::Result;

const BLOCK_WORDS: usize = 8;
const BLOCK_BITS: usize = BLOCK_WORDS * 64;
const SELECT_SAMPLE: usize = 4096;
// below this many blocks select searches the rank samples directly
const HINTED_BLOCKS: usize = 16;

/// Uncompressed bits with a cumulative rank sample every 512 bits and a
/// select hint every 4096 ones and zeros.
#[derive(Clone, Debug)]
pub struct PlainBitVector {
    bits: RawBits,
    ones: usize,
    // ones before each block; one extra entry holding the total
    block_ranks: Vec<u64>,
    // block holding the (k * SELECT_SAMPLE)-th one / zero
    select1_hints: Vec<u32>,
    select0_hints: Vec<u32>,
}

impl PlainBitVector {
    pub fn new(bits: RawBits) -> Self {
        let words = bits.words();
        let nblocks = words.len().div_ceil(BLOCK_WORDS);
        let mut block_ranks = Vec::with_capacity(nblocks + 1);
        let hinted = nblocks >= HINTED_BLOCKS;
        let mut select1_hints = Vec::new();
        let mut select0_hints = Vec::new();
        let mut ones = 0usize;
        for b in 0..nblocks {
            block_ranks.push(ones as u64);
            let start_bit = b * BLOCK_BITS;
            let block_len = BLOCK_BITS.min(bits.len() - start_bit);
            let zeros_before = start_bit - ones;
            let block_ones: usize = words[b * BLOCK_WORDS..((b + 1) * BLOCK_WORDS).min(words.len())]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum();
            let block_zeros = block_len - block_ones;
            while hinted && select1_hints.len() * SELECT_SAMPLE < ones + block_ones {
                select1_hints.push(b as u32);
            }
            while hinted && select0_hints.len() * SELECT_SAMPLE < zeros_before + block_zeros {
                select0_hints.push(b as u32);
            }
            ones += block_ones;
        }
        block_ranks.push(ones as u64);
        Self {
            bits,
            ones,
            block_ranks,
            select1_hints,
            select0_hints,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn raw(&self) -> &RawBits {
        &self.bits
    }

    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len());
        if i == self.len() {
            return self.ones;
        }
        let block = i / BLOCK_BITS;
        let words = self.bits.words();
        let mut r = self.block_ranks[block] as usize;
        let w = i >> 6;
        for word in &words[block * BLOCK_WORDS..w] {
            r += word.count_ones() as usize;
        }
        let offset = i & 63;
        if offset > 0 {
            r += (words[w] & ((1u64 << offset) - 1)).count_ones() as usize;
        }
        r
    }

    pub fn select1(&self, k: usize) -> usize {
        debug_assert!(k < self.ones);
        let block = self.find_block(k, &self.select1_hints, |b| self.block_ranks[b] as usize);
        let words = self.bits.words();
        let mut remaining = k - self.block_ranks[block] as usize;
        let mut w = block * BLOCK_WORDS;
        loop {
            let c = words[w].count_ones() as usize;
            if remaining < c {
                return (w << 6) + select_in_word(words[w], remaining);
            }
            remaining -= c;
            w += 1;
        }
    }

    pub fn select0(&self, k: usize) -> usize {
        debug_assert!(k < self.len() - self.ones);
        let zeros_before = |b: usize| b * BLOCK_BITS - self.block_ranks[b] as usize;
        let block = self.find_block(k, &self.select0_hints, zeros_before);
        let words = self.bits.words();
        let mut remaining = k - zeros_before(block);
        let mut w = block * BLOCK_WORDS;
        loop {
            // padding bits past the end are zero but never reached, since k < total zeros
            let inverted = !words[w];
            let c = inverted.count_ones() as usize;
            if remaining < c {
                return (w << 6) + select_in_word(inverted, remaining);
            }
            remaining -= c;
            w += 1;
        }
    }

    // Last block whose count-before is <= k.
    fn find_block(&self, k: usize, hints: &[u32], before: impl Fn(usize) -> usize) -> usize {
        let nblocks = self.block_ranks.len() - 1;
        let (mut lo, mut hi) = if hints.is_empty() {
            (0, nblocks)
        } else {
            let sample = k / SELECT_SAMPLE;
            let hi = hints.get(sample + 1).map_or(nblocks, |&b| b as usize + 1);
            (hints[sample] as usize, hi.min(nblocks))
        };
        // invariant: before(lo) <= k, answer in [lo..hi)
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if before(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn space(&self) -> SpaceUsage {
        SpaceUsage {
            payload: self.len(),
            index: self.block_ranks.len() * 64
                + (self.select1_hints.len() + self.select0_hints.len()) * 32,
        }
    }

    pub fn to_raw(&self) -> RawBits {
        self.bits.clone()
    }

    pub(super) fn write_payload<W: Write>(&self, w: &mut W) -> Result<()> {
        write_bit_stream(w, self.bits.words(), self.len())
    }

    pub(super) fn read_payload<R: Read>(r: &mut R, n: usize) -> Result<Self> {
        let words = read_bit_stream(r, n)?;
        Ok(Self::new(RawBits::from_words(words, n)))
    }
}

//! Two-level (Elias–Fano) encoding of the set-bit positions.
//!
//! Each position `p` is split into `p >> l` (high part, written in unary into
//! a bit sequence of length `m + (p_last >> l)`) and the low `l` bits
//! (packed at fixed width), with `l = ⌊lg(n/m)⌋`. Select on the high part uses a
//! sampled directory of every 4096-th one and zero; below that threshold no
//! directory is stored and select scans words.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::SpaceUsage;
use crate::bits::{bits_for, read_bit_stream, read_len, select_in_word, write_bit_stream, RawBits};
use crate::error::{Error, Result};

const SAMPLE: usize = 4096;

// n and m, each counted at ⌈lg(n + 1)⌉ bits
fn header_bits(n: usize) -> usize {
    2 * bits_for(n + 1)
}

#[derive(Clone, Debug)]
pub struct SparseBitVector {
    n: usize,
    m: usize,
    low_width: usize,
    low: RawBits,
    high: RawBits,
    // high-part position of the (k * SAMPLE)-th one / zero, for k >= 1
    ones_dir: Vec<u64>,
    zeros_dir: Vec<u64>,
}

fn low_width_for(n: usize, m: usize) -> usize {
    if m == 0 || n <= m {
        0
    } else {
        // floor(lg(n / m))
        (usize::BITS - 1 - (n / m).leading_zeros()) as usize
    }
}

impl SparseBitVector {
    /// Builds from strictly increasing 0-based positions, all below `n`.
    pub fn new(n: usize, positions: &[usize]) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(positions.last().is_none_or(|&p| p < n));
        let m = positions.len();
        let low_width = low_width_for(n, m);
        let mut low = RawBits::with_capacity(m * low_width);
        let high_len = positions.last().map_or(0, |&p| m + (p >> low_width));
        let mut high = RawBits::zeros(high_len);
        for (k, &p) in positions.iter().enumerate() {
            low.push_int((p as u64) & mask(low_width), low_width);
            high.set((p >> low_width) + k, true);
        }
        Self::with_parts(n, m, low_width, low, high)
    }

    pub fn from_bits(bits: &RawBits) -> Self {
        let positions: Vec<usize> = (0..bits.len()).filter(|&i| bits.get(i)).collect();
        Self::new(bits.len(), &positions)
    }

    fn with_parts(n: usize, m: usize, low_width: usize, low: RawBits, high: RawBits) -> Self {
        let mut ones_dir = Vec::new();
        let mut zeros_dir = Vec::new();
        let (mut ones, mut zeros) = (0usize, 0usize);
        for i in 0..high.len() {
            if high.get(i) {
                if ones > 0 && ones % SAMPLE == 0 {
                    ones_dir.push(i as u64);
                }
                ones += 1;
            } else {
                if zeros > 0 && zeros % SAMPLE == 0 {
                    zeros_dir.push(i as u64);
                }
                zeros += 1;
            }
        }
        Self {
            n,
            m,
            low_width,
            low,
            high,
            ones_dir,
            zeros_dir,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.m
    }

    pub fn low_width(&self) -> usize {
        self.low_width
    }

    // Position in `high` of the k-th (0-based) `bit`.
    fn high_select(&self, k: usize, bit: bool) -> usize {
        let dir = if bit { &self.ones_dir } else { &self.zeros_dir };
        let (mut pos, mut remaining) = if k >= SAMPLE {
            let s = k / SAMPLE;
            (dir[s - 1] as usize, k - s * SAMPLE)
        } else {
            (0, k)
        };
        let words = self.high.words();
        let mut w = pos >> 6;
        let mut word = words[w] & !mask(pos & 63);
        if !bit {
            word = !words[w] & !mask(pos & 63);
        }
        loop {
            let c = word.count_ones() as usize;
            if remaining < c {
                pos = (w << 6) + select_in_word(word, remaining);
                return pos;
            }
            remaining -= c;
            w += 1;
            word = if bit { words[w] } else { !words[w] };
        }
    }

    #[inline]
    fn low_part(&self, k: usize) -> usize {
        self.low.get_int(k * self.low_width, self.low_width) as usize
    }

    pub fn select1(&self, k: usize) -> usize {
        debug_assert!(k < self.m);
        let hpos = self.high_select(k, true);
        ((hpos - k) << self.low_width) | self.low_part(k)
    }

    /// Number of ones strictly before position `i`.
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.n);
        if i == self.n {
            return self.m;
        }
        if self.m == 0 {
            return 0;
        }
        let bucket = i >> self.low_width;
        if bucket + self.m > self.high.len() {
            // past the bucket of the last one
            return self.m;
        }
        let mut hpos = if bucket == 0 {
            0
        } else {
            self.high_select(bucket - 1, false) + 1
        };
        let mut k = hpos - bucket;
        let target = i & mask(self.low_width) as usize;
        while k < self.m && self.high.get(hpos) && self.low_part(k) < target {
            k += 1;
            hpos += 1;
        }
        k
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        let k = self.rank1(i);
        k < self.m && self.select1(k) == i
    }

    pub fn select0(&self, k: usize) -> usize {
        debug_assert!(k < self.n - self.m);
        // count q of ones whose preceding-zero count is <= k
        let (mut lo, mut hi) = (0, self.m);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.select1(mid) - mid <= k {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        k + lo
    }

    pub fn space(&self) -> SpaceUsage {
        SpaceUsage {
            payload: self.low.len() + self.high.len(),
            index: header_bits(self.n) + (self.ones_dir.len() + self.zeros_dir.len()) * 64,
        }
    }

    pub fn to_raw(&self) -> RawBits {
        let mut raw = RawBits::zeros(self.n);
        for k in 0..self.m {
            raw.set(self.select1(k), true);
        }
        raw
    }

    pub(super) fn write_payload<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_u64::<LittleEndian>(self.m as u64)?;
        w.write_u8(self.low_width as u8)?;
        w.write_u64::<LittleEndian>(self.high.len() as u64)?;
        write_bit_stream(w, self.low.words(), self.low.len())?;
        write_bit_stream(w, self.high.words(), self.high.len())
    }

    pub(super) fn read_payload<R: Read>(r: &mut R, n: usize) -> Result<Self> {
        let m = read_len(r)?;
        let low_width = r.read_u8()? as usize;
        if m > n || low_width != low_width_for(n, m) {
            return Err(Error::Format("sparse bitvector header mismatch".into()));
        }
        let high_len = read_len(r)?;
        if (m == 0) != (high_len == 0) || (m > 0 && high_len > m + ((n - 1) >> low_width)) {
            return Err(Error::Format("sparse bitvector high length mismatch".into()));
        }
        let low_len = m * low_width;
        let low = RawBits::from_words(read_bit_stream(r, low_len)?, low_len);
        let high = RawBits::from_words(read_bit_stream(r, high_len)?, high_len);
        if high.count_ones() != m || (m > 0 && !high.get(high_len - 1)) {
            return Err(Error::Format("sparse bitvector high part corrupt".into()));
        }
        let bv = Self::with_parts(n, m, low_width, low, high);
        if m > 0 && bv.select1(m - 1) >= n {
            return Err(Error::Format("sparse bitvector position out of range".into()));
        }
        Ok(bv)
    }
}

#[inline]
fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

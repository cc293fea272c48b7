//! Packed bit buffers and the little-endian stream helpers shared by every
//! serialized structure.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

/// Growable packed bit sequence, least significant bit first within each word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawBits {
    words: Vec<u64>,
    len: usize,
}

impl RawBits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let it = bits.into_iter();
        let mut words = Vec::with_capacity(it.size_hint().0.div_ceil(64));
        let (mut cur, mut len) = (0u64, 0usize);
        for b in it {
            cur |= (b as u64) << (len & 63);
            len += 1;
            if len & 63 == 0 {
                words.push(cur);
                cur = 0;
            }
        }
        if len & 63 != 0 {
            words.push(cur);
        }
        Self { words, len }
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        debug_assert!(words.len() == len.div_ceil(64));
        Self { words, len }
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
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if bit {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len & 63 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len >> 6] |= 1 << (self.len & 63);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`.
    pub fn push_int(&mut self, value: u64, width: usize) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        debug_assert!(width == 64 || value >> width == 0);
        let offset = self.len & 63;
        if offset == 0 {
            self.words.push(value);
        } else {
            let last = self.words.len() - 1;
            self.words[last] |= value << offset;
            if offset + width > 64 {
                self.words.push(value >> (64 - offset));
            }
        }
        self.len += width;
    }

    /// Reads `width` bits starting at bit `pos`.
    #[inline]
    pub fn get_int(&self, pos: usize, width: usize) -> u64 {
        debug_assert!(width <= 64 && pos + width <= self.len);
        if width == 0 {
            return 0;
        }
        let word = pos >> 6;
        let offset = pos & 63;
        let mut value = self.words[word] >> offset;
        if offset + width > 64 {
            value |= self.words[word + 1] << (64 - offset);
        }
        if width == 64 {
            value
        } else {
            value & ((1u64 << width) - 1)
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Writes the first `nbits` bits of `words`, padded to a byte boundary.
pub(crate) fn write_bit_stream<W: Write>(w: &mut W, words: &[u64], nbits: usize) -> Result<()> {
    let nbytes = nbits.div_ceil(8);
    let mut written = 0;
    for &word in words {
        if written == nbytes {
            break;
        }
        let bytes = word.to_le_bytes();
        let take = (nbytes - written).min(8);
        w.write_all(&bytes[..take])?;
        written += take;
    }
    Ok(())
}

pub(crate) fn read_bit_stream<R: Read>(r: &mut R, nbits: usize) -> Result<Vec<u64>> {
    let nbytes = nbits.div_ceil(8);
    let mut words = vec![0u64; nbits.div_ceil(64)];
    let mut remaining = nbytes;
    for word in words.iter_mut() {
        let take = remaining.min(8);
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf[..take])?;
        *word = u64::from_le_bytes(buf);
        remaining -= take;
    }
    if nbits & 63 != 0 {
        if let Some(last) = words.last() {
            if last >> (nbits & 63) != 0 {
                return Err(Error::Format("nonzero padding bits".into()));
            }
        }
    }
    Ok(words)
}

pub(crate) fn write_magic<W: Write>(w: &mut W, magic: &[u8; 4], version: u16) -> Result<()> {
    w.write_all(magic)?;
    w.write_u16::<LittleEndian>(version)?;
    Ok(())
}

pub(crate) fn read_magic<R: Read>(r: &mut R, magic: &[u8; 4], version: u16) -> Result<()> {
    let mut found = [0u8; 4];
    r.read_exact(&mut found)?;
    if &found != magic {
        return Err(Error::Format(format!(
            "expected magic {:?}, found {:?}",
            String::from_utf8_lossy(magic),
            String::from_utf8_lossy(&found)
        )));
    }
    let v = r.read_u16::<LittleEndian>()?;
    if v != version {
        return Err(Error::Format(format!("unsupported version {v}")));
    }
    Ok(())
}

/// Reads a u64 length field, rejecting values that do not fit in memory.
pub(crate) fn read_len<R: Read>(r: &mut R) -> Result<usize> {
    let v = r.read_u64::<LittleEndian>()?;
    usize::try_from(v)
        .ok()
        .filter(|&v| v <= (1usize << 48))
        .ok_or_else(|| Error::Format(format!("length {v} too large")))
}

/// Number of bits needed to write values in `[0..n)`; zero when `n <= 1`.
#[inline]
pub fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Position of the `k`-th (0-based) set bit of `word`.
#[inline]
pub(crate) fn select_in_word(mut word: u64, k: usize) -> usize {
    debug_assert!((word.count_ones() as usize) > k);
    for _ in 0..k {
        word &= word - 1;
    }
    word.trailing_zeros() as usize
}

//! Small-alphabet sequences with rank and select, stored as a balanced binary
//! wavelet tree of bit vectors. Used for the interleaving sequence of every
//! code-tree node, where the alphabet is the node's child slots.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bits::{read_len, RawBits};
use crate::bitvector::{BitVector, BitVectorVariant, SpaceUsage};
use crate::error::{Error, Result};

// deepest path for an alphabet of 255 symbols
const MAX_LEVELS: usize = 8;

#[derive(Clone, Debug)]
pub struct SymbolSequence {
    len: usize,
    sigma: usize,
    // preorder over alphabet ranges; the node for [lo..hi) splits at the midpoint
    nodes: Vec<BitVector>,
}

impl SymbolSequence {
    /// `symbols` must all be below `sigma`, which is at most 255.
    pub fn new(symbols: &[u8], sigma: usize, variant: BitVectorVariant) -> Self {
        debug_assert!((1..=255).contains(&sigma));
        debug_assert!(symbols.iter().all(|&s| (s as usize) < sigma));
        let mut nodes = Vec::with_capacity(sigma.saturating_sub(1));
        build(symbols, 0, sigma, variant, &mut nodes);
        Self {
            len: symbols.len(),
            sigma,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// Symbol at 0-based position `i`.
    pub fn access(&self, mut i: usize) -> usize {
        debug_assert!(i < self.len);
        let (mut node, mut lo, mut hi) = (0, 0, self.sigma);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let bv = &self.nodes[node];
            if bv.get(i) {
                i = bv.rank1(i);
                node += mid - lo;
                lo = mid;
            } else {
                i = bv.rank0(i);
                node += 1;
                hi = mid;
            }
        }
        lo
    }

    /// Occurrences of `s` in `[0..i)`.
    pub fn rank(&self, s: usize, mut i: usize) -> usize {
        debug_assert!(s < self.sigma && i <= self.len);
        let (mut node, mut lo, mut hi) = (0, 0, self.sigma);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let bv = &self.nodes[node];
            if s >= mid {
                i = bv.rank1(i);
                node += mid - lo;
                lo = mid;
            } else {
                i = bv.rank0(i);
                node += 1;
                hi = mid;
            }
        }
        i
    }

    /// Access and rank in one descent: `(S[i], rank_{S[i]}(i))`.
    pub fn access_rank(&self, mut i: usize) -> (usize, usize) {
        debug_assert!(i < self.len);
        let (mut node, mut lo, mut hi) = (0, 0, self.sigma);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let bv = &self.nodes[node];
            if bv.get(i) {
                i = bv.rank1(i);
                node += mid - lo;
                lo = mid;
            } else {
                i = bv.rank0(i);
                node += 1;
                hi = mid;
            }
        }
        (lo, i)
    }

    /// 0-based position of the `k`-th (0-based) occurrence of `s`.
    pub fn select(&self, s: usize, k: usize) -> usize {
        debug_assert!(s < self.sigma);
        let mut path = [(0usize, false); MAX_LEVELS];
        let mut depth = 0;
        let (mut node, mut lo, mut hi) = (0, 0, self.sigma);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let right = s >= mid;
            path[depth] = (node, right);
            depth += 1;
            if right {
                node += mid - lo;
                lo = mid;
            } else {
                node += 1;
                hi = mid;
            }
        }
        let mut p = k;
        for &(node, right) in path[..depth].iter().rev() {
            let bv = &self.nodes[node];
            p = if right { bv.select1(p) } else { bv.select0(p) };
        }
        p
    }

    pub fn space(&self) -> SpaceUsage {
        self.nodes
            .iter()
            .fold(SpaceUsage::default(), |acc, bv| acc + bv.space())
    }

    /// Zero-order entropy of the sequence times its length, in bits.
    pub fn entropy_bits(&self) -> f64 {
        let counts: Vec<usize> = (0..self.sigma).map(|s| self.rank(s, self.len)).collect();
        crate::runs::entropy_unchecked(&counts) * self.len as f64
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_u8(self.sigma as u8)?;
        w.write_u64::<LittleEndian>(self.len as u64)?;
        for bv in &self.nodes {
            bv.write_to(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let sigma = r.read_u8()? as usize;
        if sigma == 0 {
            return Err(Error::Format("symbol sequence over an empty alphabet".into()));
        }
        let len = read_len(r)?;
        let mut nodes = Vec::with_capacity(sigma - 1);
        read_node(r, len, 0, sigma, &mut nodes)?;
        Ok(Self { len, sigma, nodes })
    }
}

fn build(symbols: &[u8], lo: usize, hi: usize, variant: BitVectorVariant, out: &mut Vec<BitVector>) {
    if hi - lo <= 1 {
        return;
    }
    let mid = (lo + hi) / 2;
    let bits = RawBits::from_bools(symbols.iter().map(|&s| s as usize >= mid));
    out.push(BitVector::from_raw(bits, variant));
    if mid - lo > 1 {
        let left: Vec<u8> = symbols.iter().copied().filter(|&s| (s as usize) < mid).collect();
        build(&left, lo, mid, variant, out);
    }
    if hi - mid > 1 {
        let right: Vec<u8> = symbols.iter().copied().filter(|&s| s as usize >= mid).collect();
        build(&right, mid, hi, variant, out);
    }
}

fn read_node<R: Read>(
    r: &mut R,
    len: usize,
    lo: usize,
    hi: usize,
    out: &mut Vec<BitVector>,
) -> Result<()> {
    if hi - lo <= 1 {
        return Ok(());
    }
    let bv = BitVector::read_from(r)?;
    if bv.len() != len {
        return Err(Error::Format(format!(
            "symbol node holds {} bits, expected {len}",
            bv.len()
        )));
    }
    let (zeros, ones) = (bv.count_zeros(), bv.count_ones());
    out.push(bv);
    let mid = (lo + hi) / 2;
    read_node(r, zeros, lo, mid, out)?;
    read_node(r, ones, mid, hi, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_rank(s: &[u8], c: usize, i: usize) -> usize {
        s[..i].iter().filter(|&&x| x as usize == c).count()
    }

    #[test]
    fn matches_naive_queries() {
        let symbols: Vec<u8> = (0..500u32).map(|i| ((i * 37 + i / 7) % 5) as u8).collect();
        for variant in [
            BitVectorVariant::Plain,
            BitVectorVariant::Compressed,
            BitVectorVariant::Sparse,
        ] {
            for sigma in [5, 6, 9] {
                let seq = SymbolSequence::new(&symbols, sigma, variant);
                for i in 0..symbols.len() {
                    assert_eq!(seq.access(i), symbols[i] as usize);
                    assert_eq!(seq.access_rank(i).1, naive_rank(&symbols, symbols[i] as usize, i));
                }
                for c in 0..sigma {
                    for i in (0..=symbols.len()).step_by(13) {
                        assert_eq!(seq.rank(c, i), naive_rank(&symbols, c, i));
                    }
                    let positions: Vec<usize> =
                        (0..symbols.len()).filter(|&i| symbols[i] as usize == c).collect();
                    for (k, &p) in positions.iter().enumerate() {
                        assert_eq!(seq.select(c, k), p);
                    }
                }
            }
        }
    }

    #[test]
    fn binary_alphabet_is_one_bitvector() {
        let seq = SymbolSequence::new(&[0, 1, 1, 0], 2, BitVectorVariant::Plain);
        assert_eq!(seq.nodes.len(), 1);
        assert!((seq.entropy_bits() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unary_alphabet_needs_no_bits() {
        let seq = SymbolSequence::new(&[0; 9], 1, BitVectorVariant::Compressed);
        assert_eq!(seq.space().total(), 0);
        assert_eq!(seq.rank(0, 5), 5);
        assert_eq!(seq.select(0, 3), 3);
        assert_eq!(seq.access(8), 0);
    }

    #[test]
    fn serialization_roundtrip() {
        let symbols: Vec<u8> = (0..300u32).map(|i| (i % 7) as u8).collect();
        let seq = SymbolSequence::new(&symbols, 7, BitVectorVariant::Compressed);
        let mut buf = Vec::new();
        seq.write_to(&mut buf).unwrap();
        let back = SymbolSequence::read_from(&mut buf.as_slice()).unwrap();
        assert!((0..300).all(|i| back.access(i) == symbols[i] as usize));
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(buf, again);
    }
}

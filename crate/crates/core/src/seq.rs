//! Zero-order compressed strings over `[1..σ]` with access, rank and select,
//! shaped by the Huffman tree of the symbol frequencies.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bits::{read_len, read_magic, write_magic};
use crate::bitvector::{BitVectorVariant, SpaceUsage};
use crate::code_tree::CodeTree;
use crate::error::{check_range, Error, Result};
use crate::perm::{shaped_tree, CoderConfig};
use crate::runs::entropy_unchecked;
use crate::wavelet::ShapedWavelet;

const MAGIC: &[u8; 4] = b"RPSQ";
const VERSION: u16 = 1;

#[derive(Clone, Debug)]
pub struct SequenceCoder {
    n: usize,
    sigma: usize,
    limited: bool,
    variant: BitVectorVariant,
    wavelet: ShapedWavelet,
    // 0-based symbol -> leaf weight index
    leaf_of_symbol: Vec<Option<usize>>,
    symbol_of_leaf: Vec<usize>,
}

impl SequenceCoder {
    /// Encodes `s`, whose symbols are 1-based and at most `sigma`. The
    /// `mixed` field of `config` is ignored.
    pub fn encode_string(s: &[usize], sigma: usize, config: CoderConfig) -> Result<Self> {
        let n = s.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut counts = vec![0usize; sigma];
        for &c in s {
            check_range(c, 1, sigma)?;
            counts[c - 1] += 1;
        }
        let arity = config.resolve_arity(n)?;
        let mut leaf_of_symbol = vec![None; sigma];
        let mut symbol_of_leaf = Vec::new();
        let mut freqs = Vec::new();
        for (c, &k) in counts.iter().enumerate() {
            if k > 0 {
                leaf_of_symbol[c] = Some(freqs.len());
                symbol_of_leaf.push(c);
                freqs.push(k);
            }
        }
        let (tree, limited) = shaped_tree(&freqs, arity, config.depth_limit)?;
        let symbols = node_sequences(&tree, s, &leaf_of_symbol);
        Ok(Self {
            n,
            sigma,
            limited,
            variant: config.variant,
            wavelet: ShapedWavelet::new(tree, symbols, config.variant),
            leaf_of_symbol,
            symbol_of_leaf,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn tree(&self) -> &CodeTree {
        self.wavelet.tree()
    }

    pub fn wavelet(&self) -> &ShapedWavelet {
        &self.wavelet
    }

    /// n_c for a 1-based symbol; zero when absent.
    pub fn frequency(&self, c: usize) -> usize {
        match c.checked_sub(1).and_then(|c| self.leaf_of_symbol.get(c)) {
            Some(Some(idx)) => self.tree().weights()[*idx],
            _ => 0,
        }
    }

    /// Frequencies of the symbols that occur, in symbol order.
    pub fn frequencies(&self) -> &[usize] {
        self.tree().weights()
    }

    /// H₀ of the string, in bits per symbol.
    pub fn entropy(&self) -> f64 {
        entropy_unchecked(self.frequencies())
    }

    /// S[i] for 1-based `i`.
    pub fn access(&self, i: usize) -> Result<usize> {
        check_range(i, 1, self.n)?;
        let (idx, _) = self.wavelet.descend(i - 1);
        Ok(self.symbol_of_leaf[idx] + 1)
    }

    /// `(S[i], rank_{S[i]}(S, i))` in a single descent.
    pub fn access_rank(&self, i: usize) -> Result<(usize, usize)> {
        check_range(i, 1, self.n)?;
        let (idx, off) = self.wavelet.descend(i - 1);
        Ok((self.symbol_of_leaf[idx] + 1, off + 1))
    }

    /// Occurrences of symbol `c` in `S[1..i]`.
    pub fn rank_symbol(&self, c: usize, i: usize) -> Result<usize> {
        check_range(c, 1, self.sigma)?;
        check_range(i, 0, self.n)?;
        Ok(match self.leaf_of_symbol[c - 1] {
            Some(idx) => self.wavelet.rank_leaf(idx, i),
            None => 0,
        })
    }

    /// Position of the `j`-th occurrence of `c`.
    pub fn select_symbol(&self, c: usize, j: usize) -> Result<usize> {
        check_range(c, 1, self.sigma)?;
        let missing = Error::NoSuchOccurrence {
            symbol: c as u64,
            rank: j,
        };
        let Some(idx) = self.leaf_of_symbol[c - 1] else {
            return Err(missing);
        };
        if j == 0 || j > self.tree().weights()[idx] {
            return Err(missing);
        }
        Ok(self.wavelet.climb(idx, j - 1) + 1)
    }

    pub(crate) fn select0(&self, c0: usize, k: usize) -> usize {
        let idx = self.leaf_of_symbol[c0].expect("symbol occurs");
        self.wavelet.climb(idx, k)
    }

    pub fn decode(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (idx, &c) in self.symbol_of_leaf.iter().enumerate() {
            for k in 0..self.tree().weights()[idx] {
                out[self.wavelet.climb(idx, k)] = c + 1;
            }
        }
        out
    }

    pub fn payload_entropy_bits(&self) -> f64 {
        self.wavelet.entropy_bits()
    }

    pub fn average_depth(&self) -> f64 {
        self.tree()
            .average_depth(self.frequencies())
            .expect("tree weights match")
    }

    /// Node sequences, plus tree and symbol table in `overhead`.
    pub fn measured_size_bits(&self) -> (SpaceUsage, usize) {
        let overhead = self.tree().shape_bits() + 64 * (self.symbol_of_leaf.len() + 1) + 32 + 16 + 128 + 16;
        (self.wavelet.sequence_space(), overhead)
    }

    pub fn size_in_bits(&self) -> usize {
        let (seqs, overhead) = self.measured_size_bits();
        seqs.total() + overhead
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        write_magic(w, MAGIC, VERSION)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_u64::<LittleEndian>(self.sigma as u64)?;
        let mut flags = self.tree().arity() as u16 | ((self.variant.tag() as u16) << 10);
        if self.limited {
            flags |= 1 << 9;
        }
        w.write_u16::<LittleEndian>(flags)?;
        w.write_u64::<LittleEndian>(self.symbol_of_leaf.len() as u64)?;
        for &c in &self.symbol_of_leaf {
            w.write_u64::<LittleEndian>(c as u64)?;
        }
        self.tree().write_shape(w)?;
        self.wavelet.write_sequences(w)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        read_magic(r, MAGIC, VERSION)?;
        let n = read_len(r)?;
        let sigma = read_len(r)?;
        let flags = r.read_u16::<LittleEndian>()?;
        let variant = BitVectorVariant::from_tag(((flags >> 10) & 0b11) as u8)?;
        let present = read_len(r)?;
        if n == 0 || present == 0 || present > sigma.min(n) {
            return Err(Error::Format("sequence header is inconsistent".into()));
        }
        let mut symbol_of_leaf = Vec::with_capacity(present);
        let mut leaf_of_symbol = vec![None; sigma];
        for idx in 0..present {
            let c = read_len(r)?;
            if c >= sigma || symbol_of_leaf.last().is_some_and(|&p| p >= c) {
                return Err(Error::Format("symbol table is not increasing".into()));
            }
            leaf_of_symbol[c] = Some(idx);
            symbol_of_leaf.push(c);
        }
        let tree = CodeTree::read_shape(r, n)?;
        if tree.leaf_count() != present || tree.arity() != (flags & 0xff) as usize {
            return Err(Error::Format("sequence tree disagrees with header".into()));
        }
        let wavelet = ShapedWavelet::read_sequences(r, tree)?;
        Ok(Self {
            n,
            sigma,
            limited: flags & (1 << 9) != 0,
            variant,
            wavelet,
            leaf_of_symbol,
            symbol_of_leaf,
        })
    }
}

/// Child-slot sequences of every node: each position pushes its slot into
/// every node on its symbol's root-to-leaf path.
fn node_sequences(tree: &CodeTree, s: &[usize], leaf_of_symbol: &[Option<usize>]) -> Vec<Vec<u8>> {
    let paths: Vec<Vec<(usize, u8)>> = (0..tree.leaf_count())
        .map(|idx| {
            let mut path = Vec::new();
            let mut v = tree.leaf_node(idx);
            while let Some(p) = tree.node(v).parent() {
                path.push((p, tree.node(v).slot() as u8));
                v = p;
            }
            path
        })
        .collect();
    let mut out: Vec<Vec<u8>> = tree
        .nodes()
        .iter()
        .map(|node| if node.is_leaf() { Vec::new() } else { Vec::with_capacity(node.length()) })
        .collect();
    for &c in s {
        let idx = leaf_of_symbol[c - 1].expect("symbol counted");
        for &(node, slot) in &paths[idx] {
            out[node].push(slot);
        }
    }
    out
}

//! A code tree whose internal nodes carry the interleaving of their
//! children. Both the permutation coder and the sequence coder are thin
//! layers over this type.

use std::io::{Read, Write};

use crate::bitvector::{BitVectorVariant, SpaceUsage};
use crate::code_tree::CodeTree;
use crate::error::{Error, Result};
use crate::symbols::SymbolSequence;

#[derive(Clone, Debug)]
pub struct ShapedWavelet {
    tree: CodeTree,
    // indexed by node id; None for leaves
    seqs: Vec<Option<SymbolSequence>>,
}

impl ShapedWavelet {
    /// `symbols[id]` is the child-slot sequence of internal node `id`.
    pub(crate) fn new(tree: CodeTree, symbols: Vec<Vec<u8>>, variant: BitVectorVariant) -> Self {
        let seqs = (0..tree.node_count())
            .map(|id| {
                let node = tree.node(id);
                (!node.is_leaf()).then(|| {
                    debug_assert_eq!(symbols[id].len(), node.length());
                    SymbolSequence::new(&symbols[id], node.children().len(), variant)
                })
            })
            .collect();
        Self { tree, seqs }
    }

    pub fn tree(&self) -> &CodeTree {
        &self.tree
    }

    pub fn sequence(&self, node: usize) -> Option<&SymbolSequence> {
        self.seqs[node].as_ref()
    }

    fn seq(&self, node: usize) -> &SymbolSequence {
        self.seqs[node].as_ref().expect("internal node")
    }

    /// Position at the root of element `offset` of leaf `idx`.
    #[inline]
    pub(crate) fn climb(&self, idx: usize, mut offset: usize) -> usize {
        let mut v = self.tree.leaf_node(idx);
        while let Some(p) = self.tree.node(v).parent() {
            offset = self.seq(p).select(self.tree.node(v).slot(), offset);
            v = p;
        }
        offset
    }

    /// Leaf index and offset inside it for root position `p`.
    #[inline]
    pub(crate) fn descend(&self, mut p: usize) -> (usize, usize) {
        let mut v = 0;
        loop {
            let node = self.tree.node(v);
            if let Some(idx) = node.leaf() {
                return (idx, p);
            }
            let (s, r) = self.seq(v).access_rank(p);
            p = r;
            v = node.children()[s];
        }
    }

    /// Elements of leaf `idx` among root positions `[0..i)`.
    pub(crate) fn rank_leaf(&self, idx: usize, i: usize) -> usize {
        self.rank_node(self.tree.leaf_node(idx), i)
    }

    fn rank_node(&self, v: usize, i: usize) -> usize {
        match self.tree.node(v).parent() {
            None => i,
            Some(p) => self.seq(p).rank(self.tree.node(v).slot(), self.rank_node(p, i)),
        }
    }

    /// Σ over internal nodes of |sequence| · H₀(sequence).
    pub fn entropy_bits(&self) -> f64 {
        self.seqs.iter().flatten().map(SymbolSequence::entropy_bits).sum()
    }

    /// Total length of all node sequences.
    pub fn sequence_length(&self) -> usize {
        self.seqs.iter().flatten().map(SymbolSequence::len).sum()
    }

    pub fn sequence_space(&self) -> SpaceUsage {
        self.seqs
            .iter()
            .flatten()
            .fold(SpaceUsage::default(), |acc, s| acc + s.space())
    }

    /// Node sequences in preorder.
    pub(crate) fn write_sequences<W: Write>(&self, w: &mut W) -> Result<()> {
        for seq in self.seqs.iter().flatten() {
            seq.write_to(w)?;
        }
        Ok(())
    }

    /// Reads the sequences written by [`write_sequences`](Self::write_sequences)
    /// for an already decoded tree.
    pub(crate) fn read_sequences<R: Read>(r: &mut R, tree: CodeTree) -> Result<Self> {
        let mut seqs = Vec::with_capacity(tree.node_count());
        for id in 0..tree.node_count() {
            let node = tree.node(id);
            if node.is_leaf() {
                seqs.push(None);
                continue;
            }
            let seq = SymbolSequence::read_from(r)?;
            let kids = node.children();
            if seq.sigma() != kids.len() || seq.len() != node.length() {
                return Err(Error::Format(format!("node {id} sequence has the wrong shape")));
            }
            for (s, &c) in kids.iter().enumerate() {
                if seq.rank(s, seq.len()) != tree.node(c).length() {
                    return Err(Error::Format(format!("node {id} child counts disagree")));
                }
            }
            seqs.push(Some(seq));
        }
        Ok(Self { tree, seqs })
    }
}

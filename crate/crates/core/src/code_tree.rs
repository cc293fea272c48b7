//! Huffman-shaped code trees over a vector of positive weights.
//!
//! Nodes are stored in preorder, so the root has id 0 and every child has a
//! larger id than its parent. Leaves carry the index of the weight they
//! represent; `φ` maps that index to the leaf's left-to-right rank.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::bits::{bits_for, read_bit_stream, read_len, write_bit_stream, RawBits};
use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 255;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    children: Vec<usize>,
    parent: Option<usize>,
    slot: usize,
    depth: usize,
    length: usize,
    leaves: usize,
    pos_prime: usize,
    leaf: Option<usize>,
}

impl Node {
    pub fn children(&self) -> &[usize] {
        &self.children
    }

    pub fn parent(&self) -> Option<usize> {
        self.parent
    }

    /// Index of this node among its parent's children.
    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Total weight covered.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    /// 0-based start of the covered area when the leaves are laid out left
    /// to right.
    pub fn pos_prime(&self) -> usize {
        self.pos_prime
    }

    /// Weight index of a leaf.
    pub fn leaf(&self) -> Option<usize> {
        self.leaf
    }

    pub fn is_leaf(&self) -> bool {
        self.leaf.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeTree {
    arity: usize,
    nodes: Vec<Node>,
    weights: Vec<usize>,
    starts: Vec<usize>,
    leaf_node: Vec<usize>,
    phi: Vec<usize>,
    phi_inv: Vec<usize>,
}

// Construction scratch: nodes addressed by arena index.
#[derive(Clone, Debug)]
enum Proto {
    Leaf(usize),
    Dummy,
    Internal(Vec<usize>),
}

fn check_weights(freqs: &[usize]) -> Result<()> {
    if freqs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = freqs.iter().position(|&f| f == 0) {
        return Err(Error::ZeroFrequency { index });
    }
    Ok(())
}

fn check_arity(arity: usize) -> Result<()> {
    if !(2..=MAX_ARITY).contains(&arity) {
        return Err(Error::InvalidArity(arity));
    }
    Ok(())
}

/// Smallest `h` with `t^h >= m`.
pub fn ceil_log(t: usize, m: usize) -> usize {
    let mut h = 0;
    let mut cap = 1u128;
    while cap < m as u128 {
        cap *= t as u128;
        h += 1;
    }
    h
}

impl CodeTree {
    /// Huffman tree of arity `t` over `freqs`.
    ///
    /// Leaves are sorted by weight (stable in the index) and combined with the
    /// two-queue method; on equal weight the leaf queue wins, and children are
    /// kept in the order taken. For `t > 2` zero-weight dummies pad the leaf
    /// count to `1 mod (t - 1)` and are dropped afterwards.
    pub fn build_huffman(freqs: &[usize], t: usize) -> Result<Self> {
        check_weights(freqs)?;
        check_arity(t)?;
        let r = freqs.len();
        let mut arena: Vec<Proto> = Vec::with_capacity(2 * r + t);
        let mut weight: Vec<u64> = Vec::with_capacity(2 * r + t);
        let dummies = if r == 1 { 0 } else { (t - 1 - (r - 1) % (t - 1)) % (t - 1) };
        for _ in 0..dummies {
            arena.push(Proto::Dummy);
            weight.push(0);
        }
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by_key(|&i| freqs[i]);
        for &i in &order {
            arena.push(Proto::Leaf(i));
            weight.push(freqs[i] as u64);
        }
        let total_leaves = arena.len();
        let mut leaf_q = 0;
        let mut node_q = total_leaves;
        let mut remaining = total_leaves;
        while remaining > 1 {
            let mut children = Vec::with_capacity(t);
            let mut sum = 0;
            for _ in 0..t {
                let take_leaf = leaf_q < total_leaves
                    && (node_q >= arena.len() || weight[leaf_q] <= weight[node_q]);
                let id = if take_leaf {
                    leaf_q += 1;
                    leaf_q - 1
                } else {
                    node_q += 1;
                    node_q - 1
                };
                sum += weight[id];
                children.push(id);
            }
            arena.push(Proto::Internal(children));
            weight.push(sum);
            remaining -= t - 1;
        }
        let root = arena.len() - 1;
        Ok(Self::finalize(t, freqs.to_vec(), &arena, root))
    }

    /// Rebuilds annotations from an arena, dropping dummies and collapsing
    /// unary nodes.
    fn finalize(arity: usize, weights: Vec<usize>, arena: &[Proto], root: usize) -> Self {
        let resolve = |mut id: usize| loop {
            match &arena[id] {
                Proto::Internal(ch) => {
                    let mut real = ch.iter().filter(|&&c| !matches!(arena[c], Proto::Dummy));
                    let first = real.next();
                    if real.next().is_none() {
                        id = *first.expect("internal node without leaves");
                    } else {
                        return id;
                    }
                }
                _ => return id,
            }
        };
        let r = weights.len();
        let mut nodes: Vec<Node> = Vec::with_capacity(2 * r);
        let mut leaf_node = vec![usize::MAX; r];
        let mut phi = vec![usize::MAX; r];
        let mut phi_inv = Vec::with_capacity(r);
        // (arena id, parent id, slot)
        let mut stack = vec![(resolve(root), None::<usize>, 0usize)];
        while let Some((aid, parent, slot)) = stack.pop() {
            let id = nodes.len();
            let depth = parent.map_or(0, |p| nodes[p].depth + 1);
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            let mut node = Node {
                children: Vec::new(),
                parent,
                slot,
                depth,
                length: 0,
                leaves: 0,
                pos_prime: 0,
                leaf: None,
            };
            match &arena[aid] {
                Proto::Leaf(idx) => {
                    node.leaf = Some(*idx);
                    node.length = weights[*idx];
                    node.leaves = 1;
                    leaf_node[*idx] = id;
                    phi[*idx] = phi_inv.len();
                    phi_inv.push(*idx);
                }
                Proto::Internal(ch) => {
                    let is_real = |c: &&usize| !matches!(arena[**c], Proto::Dummy);
                    let mut s = ch.iter().filter(is_real).count();
                    node.children.reserve_exact(s);
                    for &c in ch.iter().rev().filter(is_real) {
                        s -= 1;
                        stack.push((resolve(c), Some(id), s));
                    }
                }
                Proto::Dummy => unreachable!("dummy leaves are filtered"),
            }
            nodes.push(node);
        }
        for id in (1..nodes.len()).rev() {
            let p = nodes[id].parent.expect("non-root node has a parent");
            nodes[p].length += nodes[id].length;
            nodes[p].leaves += nodes[id].leaves;
        }
        for id in 0..nodes.len() {
            let mut pos = nodes[id].pos_prime;
            for k in 0..nodes[id].children.len() {
                let c = nodes[id].children[k];
                nodes[c].pos_prime = pos;
                pos += nodes[c].length;
            }
        }
        let mut starts = Vec::with_capacity(r);
        let mut acc = 0;
        for &w in &weights {
            starts.push(acc);
            acc += w;
        }
        Self {
            arity,
            nodes,
            weights,
            starts,
            leaf_node,
            phi,
            phi_inv,
        }
    }

    /// A copy whose leaves all sit at depth `<= max_depth`.
    ///
    /// Subtrees are kept while they fit. A node whose children cannot all be
    /// fixed below it is replaced by a balanced `t`-ary tree of height
    /// `⌈log_t m⌉` over its `m` leaves, heaviest leaves shallowest.
    pub fn limit_depth(&self, max_depth: usize) -> Result<Self> {
        let rho = self.leaf_count();
        if ceil_log(self.arity, rho) > max_depth {
            return Err(Error::InfeasibleDepth {
                max_depth,
                leaves: rho,
                arity: self.arity,
            });
        }
        let heights = self.heights();
        let mut arena = Vec::with_capacity(2 * self.nodes.len());
        let root = self.limit_rec(0, 0, max_depth, &heights, &mut arena);
        Ok(Self::finalize(self.arity, self.weights.clone(), &arena, root))
    }

    fn limit_rec(
        &self,
        v: usize,
        d: usize,
        max: usize,
        heights: &[usize],
        arena: &mut Vec<Proto>,
    ) -> usize {
        let node = &self.nodes[v];
        if d + heights[v] <= max {
            return self.copy_subtree(v, arena);
        }
        let t = self.arity;
        let fits = node
            .children
            .iter()
            .all(|&c| d + 1 + ceil_log(t, self.nodes[c].leaves) <= max);
        if fits {
            let children = node
                .children
                .iter()
                .map(|&c| self.limit_rec(c, d + 1, max, heights, arena))
                .collect();
            arena.push(Proto::Internal(children));
            return arena.len() - 1;
        }
        let mut leaves = self.leaves_under(v);
        leaves.sort_by(|&a, &b| self.weights[b].cmp(&self.weights[a]).then(a.cmp(&b)));
        balanced(t, &leaves, arena)
    }

    fn copy_subtree(&self, v: usize, arena: &mut Vec<Proto>) -> usize {
        let node = &self.nodes[v];
        let proto = match node.leaf {
            Some(idx) => Proto::Leaf(idx),
            None => Proto::Internal(
                node.children
                    .iter()
                    .map(|&c| self.copy_subtree(c, arena))
                    .collect(),
            ),
        };
        arena.push(proto);
        arena.len() - 1
    }

    fn leaves_under(&self, v: usize) -> Vec<usize> {
        // preorder layout: the subtree of v is a contiguous id range
        let end = self.subtree_end(v);
        self.nodes[v..end].iter().filter_map(|n| n.leaf).collect()
    }

    fn subtree_end(&self, v: usize) -> usize {
        let mut u = v;
        while let Some(&last) = self.nodes[u].children.last() {
            u = last;
        }
        u + 1
    }

    fn heights(&self) -> Vec<usize> {
        let mut h = vec![0usize; self.nodes.len()];
        for id in (1..self.nodes.len()).rev() {
            let p = self.nodes[id].parent.expect("non-root node has a parent");
            h[p] = h[p].max(h[id] + 1);
        }
        h
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// ρ, the number of real leaves.
    pub fn leaf_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    /// Sum of all weights.
    pub fn total_weight(&self) -> usize {
        self.nodes[0].length
    }

    /// 0-based start of weight block `idx` in index order (a run's start in π).
    pub fn pos(&self, idx: usize) -> usize {
        self.starts[idx]
    }

    pub fn leaf_node(&self, idx: usize) -> usize {
        self.leaf_node[idx]
    }

    /// 0-based left-to-right rank of the leaf for weight `idx`.
    pub fn phi(&self, idx: usize) -> usize {
        self.phi[idx]
    }

    /// Weight index of the `rank`-th leaf from the left.
    pub fn phi_inv(&self, rank: usize) -> usize {
        self.phi_inv[rank]
    }

    /// `(φ, φ⁻¹)` as 1-based permutations of `[1..ρ]`.
    pub fn leaf_order(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.phi.iter().map(|p| p + 1).collect(),
            self.phi_inv.iter().map(|p| p + 1).collect(),
        )
    }

    /// Leaf depth ℓᵢ for every weight index.
    pub fn depths(&self) -> Vec<usize> {
        self.leaf_node.iter().map(|&v| self.nodes[v].depth).collect()
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// L = Σ nᵢℓᵢ over the tree's own weights.
    pub fn weighted_path_length(&self) -> usize {
        self.weights
            .iter()
            .zip(&self.leaf_node)
            .map(|(&w, &v)| w * self.nodes[v].depth)
            .sum()
    }

    /// (Σ fᵢℓᵢ) / Σ fᵢ for caller-supplied weights.
    pub fn average_depth(&self, freqs: &[usize]) -> Result<f64> {
        if freqs.len() != self.leaf_count() {
            return Err(Error::LengthMismatch(format!(
                "{} frequencies for {} leaves",
                freqs.len(),
                self.leaf_count()
            )));
        }
        let n: usize = freqs.iter().sum();
        if n == 0 {
            return Ok(0.0);
        }
        let l: usize = freqs
            .iter()
            .zip(&self.leaf_node)
            .map(|(&f, &v)| f * self.nodes[v].depth)
            .sum();
        Ok(l as f64 / n as f64)
    }

    /// Ids of internal nodes in preorder.
    pub fn internal_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| !self.nodes[v].is_leaf())
    }

    /// Bits used by [`write_shape`](Self::write_shape) for the shape, leaf
    /// metadata and φ.
    pub fn shape_bits(&self) -> usize {
        8 + 64 + self.nodes.len() * 8 + self.leaf_count() * 128 + self.phi_bits()
    }

    fn phi_bits(&self) -> usize {
        self.leaf_count() * bits_for(self.leaf_count())
    }

    /// Arity u8, ρ u64, preorder child counts (u8 each), then per leaf in
    /// preorder its index and start as u64, then φ packed at `⌈lg ρ⌉` bits.
    pub fn write_shape<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_u8(self.arity as u8)?;
        w.write_u64::<LittleEndian>(self.leaf_count() as u64)?;
        for node in &self.nodes {
            w.write_u8(node.children.len() as u8)?;
        }
        for &idx in &self.phi_inv {
            w.write_u64::<LittleEndian>(idx as u64)?;
            w.write_u64::<LittleEndian>(self.starts[idx] as u64)?;
        }
        let width = bits_for(self.leaf_count());
        let mut packed = RawBits::with_capacity(self.phi_bits());
        for &p in &self.phi {
            packed.push_int(p as u64, width);
        }
        write_bit_stream(w, packed.words(), packed.len())
    }

    /// Inverse of [`write_shape`](Self::write_shape); `total` is the weight sum.
    pub fn read_shape<R: Read>(r: &mut R, total: usize) -> Result<Self> {
        let arity = r.read_u8()? as usize;
        check_arity(arity)?;
        let rho = read_len(r)?;
        if rho == 0 || rho > total.max(1) {
            return Err(Error::Format(format!("{rho} leaves for total weight {total}")));
        }
        let bad = |msg: &str| Error::Format(format!("code tree: {msg}"));
        // preorder child counts; arena ids follow reading order
        let mut arena: Vec<Proto> = Vec::new();
        let mut leaf_slots = Vec::new();
        // (arena id, children still to read)
        let mut open: Vec<(usize, usize)> = Vec::new();
        loop {
            if arena.len() >= 2 * rho {
                return Err(bad("too many nodes"));
            }
            let count = r.read_u8()? as usize;
            let id = arena.len();
            if let Some(top) = open.last_mut() {
                if let Proto::Internal(ch) = &mut arena[top.0] {
                    ch.push(id);
                }
                top.1 -= 1;
            }
            if count == 0 {
                leaf_slots.push(id);
                arena.push(Proto::Leaf(usize::MAX));
            } else {
                if count < 2 || count > arity {
                    return Err(bad("invalid child count"));
                }
                arena.push(Proto::Internal(Vec::with_capacity(count)));
                open.push((id, count));
            }
            while open.last().is_some_and(|top| top.1 == 0) {
                open.pop();
            }
            if open.is_empty() {
                break;
            }
        }
        if leaf_slots.len() != rho {
            return Err(bad("leaf count mismatch"));
        }
        let mut starts = vec![usize::MAX; rho];
        for &slot in &leaf_slots {
            let idx = read_len(r)?;
            let pos = read_len(r)?;
            if idx >= rho || starts[idx] != usize::MAX {
                return Err(bad("leaf indices are not a permutation"));
            }
            starts[idx] = pos;
            arena[slot] = Proto::Leaf(idx);
        }
        if starts[0] != 0 || starts.windows(2).any(|w| w[0] >= w[1]) || starts[rho - 1] >= total {
            return Err(bad("leaf starts are not increasing"));
        }
        let mut weights: Vec<usize> = starts.windows(2).map(|w| w[1] - w[0]).collect();
        weights.push(total - starts[rho - 1]);
        let width = bits_for(rho);
        let packed = RawBits::from_words(read_bit_stream(r, rho * width)?, rho * width);
        let tree = Self::finalize(arity, weights, &arena, 0);
        for idx in 0..rho {
            if packed.get_int(idx * width, width) as usize != tree.phi[idx] {
                return Err(bad("stored leaf order disagrees with the shape"));
            }
        }
        Ok(tree)
    }
}

/// Balanced `t`-ary tree over leaves sorted heaviest first: the first `a`
/// leaves sit one level above the rest.
fn balanced(t: usize, leaves: &[usize], arena: &mut Vec<Proto>) -> usize {
    let m = leaves.len();
    if m == 1 {
        arena.push(Proto::Leaf(leaves[0]));
        return arena.len() - 1;
    }
    let h = ceil_log(t, m);
    let full = (t as u128).pow(h as u32);
    let a = (((full - m as u128) / (t as u128 - 1)) as usize).min(m);
    let mut items: Vec<usize> = leaves[..a]
        .iter()
        .map(|&idx| {
            arena.push(Proto::Leaf(idx));
            arena.len() - 1
        })
        .collect();
    let deep: Vec<usize> = leaves[a..]
        .iter()
        .map(|&idx| {
            arena.push(Proto::Leaf(idx));
            arena.len() - 1
        })
        .collect();
    items.extend(group(t, &deep, arena));
    for _ in 1..h {
        items = group(t, &items, arena);
    }
    debug_assert_eq!(items.len(), 1);
    items[0]
}

fn group(t: usize, items: &[usize], arena: &mut Vec<Proto>) -> Vec<usize> {
    items
        .chunks(t)
        .map(|chunk| {
            if chunk.len() == 1 {
                chunk[0]
            } else {
                arena.push(Proto::Internal(chunk.to_vec()));
                arena.len() - 1
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_equal_weights() {
        let t = CodeTree::build_huffman(&[5, 5], 2).unwrap();
        assert_eq!(t.depths(), vec![1, 1]);
        assert_eq!(t.weighted_path_length(), 10);
        assert_eq!(t.leaf_order(), (vec![1, 2], vec![1, 2]));
        assert_eq!(t.average_depth(&[5, 5]).unwrap(), 1.0);
    }

    #[test]
    fn three_weights() {
        let t = CodeTree::build_huffman(&[1, 1, 2], 2).unwrap();
        assert_eq!(t.depths(), vec![2, 2, 1]);
        assert_eq!(t.weighted_path_length(), 6);
        assert_eq!(t.average_depth(&[1, 1, 2]).unwrap(), 1.5);
    }

    #[test]
    fn single_leaf() {
        for arity in [2, 3, 7] {
            let t = CodeTree::build_huffman(&[7], arity).unwrap();
            assert_eq!(t.node_count(), 1);
            assert_eq!(t.depths(), vec![0]);
            assert_eq!(t.weighted_path_length(), 0);
            assert_eq!(t.leaf_order().0, vec![1]);
            assert_eq!(t.average_depth(&[7]).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(CodeTree::build_huffman(&[], 2), Err(Error::EmptyInput)));
        assert!(matches!(
            CodeTree::build_huffman(&[1, 0], 2),
            Err(Error::ZeroFrequency { index: 1 })
        ));
        assert!(matches!(CodeTree::build_huffman(&[1], 1), Err(Error::InvalidArity(1))));
        let t = CodeTree::build_huffman(&[1, 2, 3], 2).unwrap();
        assert!(t.average_depth(&[1, 2]).is_err());
        assert!(matches!(t.limit_depth(1), Err(Error::InfeasibleDepth { .. })));
    }

    #[test]
    fn ternary_pads_with_dummies() {
        // 4 leaves: one dummy, first merge takes it with the two lightest
        let t = CodeTree::build_huffman(&[1, 1, 3, 3], 3).unwrap();
        assert!(t.nodes().iter().all(|n| n.children().len() <= 3));
        assert_eq!(t.depths(), vec![2, 2, 1, 1]);
        assert_eq!(t.weighted_path_length(), 10);
    }

    #[test]
    fn annotations_are_consistent() {
        let freqs = [4, 1, 9, 2, 2, 6, 1, 3];
        for arity in 2..=4 {
            let t = CodeTree::build_huffman(&freqs, arity).unwrap();
            assert_eq!(t.total_weight(), 28);
            for (id, node) in t.nodes().iter().enumerate() {
                if node.is_leaf() {
                    continue;
                }
                let kids = node.children();
                assert_eq!(node.length(), kids.iter().map(|&c| t.node(c).length()).sum::<usize>());
                assert_eq!(node.leaves(), kids.iter().map(|&c| t.node(c).leaves()).sum::<usize>());
                for (s, &c) in kids.iter().enumerate() {
                    assert_eq!(t.node(c).parent(), Some(id));
                    assert_eq!(t.node(c).slot(), s);
                    assert_eq!(t.node(c).depth(), node.depth() + 1);
                }
            }
            let mut expected = 0;
            for rank in 0..freqs.len() {
                let idx = t.phi_inv(rank);
                assert_eq!(t.phi(idx), rank);
                assert_eq!(t.node(t.leaf_node(idx)).pos_prime(), expected);
                expected += freqs[idx];
            }
        }
    }

    #[test]
    fn depth_limit_on_geometric_weights() {
        let freqs = [1, 2, 4, 8, 16, 32];
        let t = CodeTree::build_huffman(&freqs, 2).unwrap();
        assert_eq!(t.max_depth(), 5);
        let limited = t.limit_depth(4).unwrap();
        assert!(limited.max_depth() <= 4);
        assert_eq!(limited.total_weight(), 63);
        let limited = t.limit_depth(3).unwrap();
        assert_eq!(limited.depths().iter().max(), Some(&3));
    }

    #[test]
    fn depth_limit_keeps_fitting_trees() {
        let t = CodeTree::build_huffman(&[3, 3, 3, 3], 2).unwrap();
        assert_eq!(t.limit_depth(2).unwrap(), t);
        let t = CodeTree::build_huffman(&[1, 100], 2).unwrap();
        assert_eq!(t.limit_depth(1).unwrap(), t);
    }

    #[test]
    fn balanced_subtree_heights() {
        for t in 2..=5 {
            for m in 1..=70 {
                let leaves: Vec<usize> = (0..m).collect();
                let mut arena = Vec::new();
                let root = balanced(t, &leaves, &mut arena);
                let tree = CodeTree::finalize(t, vec![1; m], &arena, root);
                assert_eq!(tree.max_depth(), ceil_log(t, m), "t={t} m={m}");
                assert_eq!(tree.leaf_count(), m);
            }
        }
    }

    #[test]
    fn shape_roundtrip() {
        let freqs = [4, 1, 9, 2, 2, 6, 1, 3];
        for arity in 2..=4 {
            let t = CodeTree::build_huffman(&freqs, arity).unwrap();
            let mut buf = Vec::new();
            t.write_shape(&mut buf).unwrap();
            let back = CodeTree::read_shape(&mut buf.as_slice(), 28).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn ceil_log_values() {
        assert_eq!(ceil_log(2, 1), 0);
        assert_eq!(ceil_log(2, 2), 1);
        assert_eq!(ceil_log(2, 5), 3);
        assert_eq!(ceil_log(3, 9), 2);
        assert_eq!(ceil_log(3, 10), 3);
    }
}

//! Bottom-up merging of sorted leaf sequences along a code tree.
//!
//! Shared by the permutation coders, which record the child slot of every
//! merged element, and by the sorting routines, which only want the output.
//! Two-child nodes use a linear merge costing one comparison per output
//! element until a side runs dry; wider nodes use a binary heap over the
//! child fronts. Ties go to the child holding the smaller weight index
//! unless the caller supplies its own tie rule.

use crate::code_tree::CodeTree;

pub(crate) struct Merged<T> {
    pub values: Vec<T>,
    /// Child slot sequence of every internal node, indexed by node id; empty
    /// for leaves or when recording is off.
    pub symbols: Vec<Vec<u8>>,
}

/// `ahead(a, b)` decides whether `a` goes first when neither is less.
pub(crate) type TieRule<'a, T> = &'a dyn Fn(&T, &T) -> bool;

pub(crate) fn merge_along<T, F>(
    tree: &CodeTree,
    mut leaves: Vec<Vec<T>>,
    less: &mut F,
    ahead: Option<TieRule<'_, T>>,
    record: bool,
) -> Merged<T>
where
    F: FnMut(&T, &T) -> bool,
{
    let count = tree.node_count();
    let mut slots: Vec<Option<Vec<T>>> = (0..count).map(|_| None).collect();
    let mut symbols: Vec<Vec<u8>> = (0..count).map(|_| Vec::new()).collect();
    let mut min_idx = vec![usize::MAX; count];
    for id in (0..count).rev() {
        let node = tree.node(id);
        if let Some(idx) = node.leaf() {
            slots[id] = Some(std::mem::take(&mut leaves[idx]));
            min_idx[id] = idx;
            continue;
        }
        let kids = node.children();
        let inputs: Vec<Vec<T>> = kids
            .iter()
            .map(|&c| slots[c].take().expect("child merged before parent"))
            .collect();
        let prio: Vec<usize> = kids.iter().map(|&c| min_idx[c]).collect();
        min_idx[id] = prio.iter().copied().min().unwrap_or(usize::MAX);
        let out = if record { Some(&mut symbols[id]) } else { None };
        let merged = if kids.len() == 2 {
            merge_two(inputs, &prio, less, ahead, out)
        } else {
            merge_many(inputs, &prio, less, ahead, out)
        };
        slots[id] = Some(merged);
    }
    Merged {
        values: slots[0].take().unwrap_or_default(),
        symbols,
    }
}

fn merge_two<T, F>(
    mut inputs: Vec<Vec<T>>,
    prio: &[usize],
    less: &mut F,
    ahead: Option<TieRule<'_, T>>,
    mut out: Option<&mut Vec<u8>>,
) -> Vec<T>
where
    F: FnMut(&T, &T) -> bool,
{
    let second = inputs.pop().expect("two inputs");
    let first = inputs.pop().expect("two inputs");
    // p wins ties
    let (p_slot, q_slot) = if prio[0] <= prio[1] { (0u8, 1u8) } else { (1, 0) };
    let (pv, qv) = if p_slot == 0 { (first, second) } else { (second, first) };
    let mut merged = Vec::with_capacity(pv.len() + qv.len());
    if let Some(o) = out.as_deref_mut() {
        o.reserve(pv.len() + qv.len());
    }
    let mut p = pv.into_iter();
    let mut q = qv.into_iter();
    let mut hp = p.next();
    let mut hq = q.next();
    loop {
        match (hp.take(), hq.take()) {
            (Some(x), Some(y)) => {
                // one comparison, asked in the direction the tie rule favours
                let take_y = match ahead {
                    Some(f) if !f(&x, &y) => !less(&x, &y),
                    _ => less(&y, &x),
                };
                if take_y {
                    merged.push(y);
                    if let Some(o) = out.as_deref_mut() {
                        o.push(q_slot);
                    }
                    hp = Some(x);
                    hq = q.next();
                } else {
                    merged.push(x);
                    if let Some(o) = out.as_deref_mut() {
                        o.push(p_slot);
                    }
                    hp = p.next();
                    hq = Some(y);
                }
            }
            (Some(x), None) => {
                merged.push(x);
                merged.extend(p.by_ref());
                if let Some(o) = out.as_deref_mut() {
                    o.resize(merged.len(), p_slot);
                }
                break;
            }
            (None, Some(y)) => {
                merged.push(y);
                merged.extend(q.by_ref());
                if let Some(o) = out.as_deref_mut() {
                    o.resize(merged.len(), q_slot);
                }
                break;
            }
            (None, None) => break,
        }
    }
    merged
}

fn merge_many<T, F>(
    inputs: Vec<Vec<T>>,
    prio: &[usize],
    less: &mut F,
    ahead: Option<TieRule<'_, T>>,
    mut out: Option<&mut Vec<u8>>,
) -> Vec<T>
where
    F: FnMut(&T, &T) -> bool,
{
    let total: usize = inputs.iter().map(Vec::len).sum();
    let mut iters: Vec<std::vec::IntoIter<T>> = inputs.into_iter().map(Vec::into_iter).collect();
    let mut heads: Vec<Option<T>> = iters.iter_mut().map(Iterator::next).collect();
    let mut heap: Vec<usize> = (0..heads.len()).filter(|&c| heads[c].is_some()).collect();
    let mut before = |a: usize, b: usize, heads: &[Option<T>]| {
        let (x, y) = (heads[a].as_ref().unwrap(), heads[b].as_ref().unwrap());
        if less(x, y) {
            true
        } else if less(y, x) {
            false
        } else if let Some(f) = ahead {
            f(x, y)
        } else {
            prio[a] < prio[b]
        }
    };
    for i in (0..heap.len() / 2).rev() {
        sift_down(&mut heap, i, &heads, &mut before);
    }
    let mut merged = Vec::with_capacity(total);
    while let Some(&c) = heap.first() {
        merged.push(heads[c].take().expect("heap holds live children"));
        if let Some(o) = out.as_deref_mut() {
            o.push(c as u8);
        }
        heads[c] = iters[c].next();
        if heads[c].is_none() {
            let last = heap.pop().expect("non-empty heap");
            if heap.is_empty() {
                break;
            }
            heap[0] = last;
        }
        sift_down(&mut heap, 0, &heads, &mut before);
    }
    merged
}

fn sift_down<T, B>(heap: &mut [usize], mut i: usize, heads: &[Option<T>], before: &mut B)
where
    B: FnMut(usize, usize, &[Option<T>]) -> bool,
{
    loop {
        let l = 2 * i + 1;
        if l >= heap.len() {
            return;
        }
        let mut m = l;
        if l + 1 < heap.len() && before(heap[l + 1], heap[l], heads) {
            m = l + 1;
        }
        if before(heap[m], heap[i], heads) {
            heap.swap(i, m);
            i = m;
        } else {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaves_for(freqs: &[usize]) -> Vec<Vec<usize>> {
        // weight index i holds values i, i + r, i + 2r, ...
        let r = freqs.len();
        (0..r).map(|i| (0..freqs[i]).map(|k| i + k * r).collect()).collect()
    }

    #[test]
    fn merge_outputs_sorted_and_records_slots() {
        let freqs = [3, 1, 4, 1, 5];
        for arity in 2..=4 {
            let tree = CodeTree::build_huffman(&freqs, arity).unwrap();
            let leaves = leaves_for(&freqs);
            let mut count = 0;
            let merged = merge_along(&tree, leaves.clone(), &mut |a: &usize, b: &usize| {
                count += 1;
                a < b
            }, None, true);
            let mut expected: Vec<usize> = leaves.concat();
            expected.sort();
            assert_eq!(merged.values, expected);
            for id in tree.internal_nodes() {
                let node = tree.node(id);
                let syms = &merged.symbols[id];
                assert_eq!(syms.len(), node.length());
                for (s, &c) in node.children().iter().enumerate() {
                    let occ = syms.iter().filter(|&&x| x as usize == s).count();
                    assert_eq!(occ, tree.node(c).length());
                }
            }
            if arity == 2 {
                assert!(count <= tree.weighted_path_length());
            }
        }
    }

    #[test]
    fn ties_prefer_smaller_weight_index() {
        let tree = CodeTree::build_huffman(&[2, 2], 2).unwrap();
        let leaves = vec![vec![(1, 'a'), (2, 'a')], vec![(1, 'b'), (2, 'b')]];
        let merged = merge_along(&tree, leaves, &mut |x: &(i32, char), y: &(i32, char)| x.0 < y.0, None, false);
        assert_eq!(merged.values, vec![(1, 'a'), (1, 'b'), (2, 'a'), (2, 'b')]);
    }

    #[test]
    fn wide_node_ties_prefer_smaller_weight_index() {
        let tree = CodeTree::build_huffman(&[1, 1, 1], 3).unwrap();
        let leaves = vec![vec![(5, 0)], vec![(5, 1)], vec![(5, 2)]];
        let merged = merge_along(&tree, leaves, &mut |x: &(i32, i32), y: &(i32, i32)| x.0 < y.0, None, true);
        assert_eq!(merged.values, vec![(5, 0), (5, 1), (5, 2)]);
    }
}

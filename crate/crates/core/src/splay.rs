//! Insert-only splay tree over the ending values of open upsequences.
//!
//! Keys are positions into a caller-owned slice; ordering goes through the
//! caller's `less`, one call per visited node.

const NIL: usize = usize::MAX;

struct Node {
    key: usize,
    label: usize,
    left: usize,
    right: usize,
}

pub(crate) struct SplayTree {
    nodes: Vec<Node>,
    root: usize,
}

impl SplayTree {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            root: NIL,
        }
    }

    /// Adds a key smaller than every stored key; no comparisons needed.
    pub fn push_min(&mut self, key: usize, label: usize) {
        let id = self.nodes.len();
        self.nodes.push(Node {
            key,
            label,
            left: NIL,
            right: self.root,
        });
        self.root = id;
    }

    /// Finds the largest stored key not exceeding `x`, replaces it by `x`
    /// and returns its label. The key order is unchanged since `x` is still
    /// below the successor. Leaves the found node at the root.
    pub fn replace_pred<T, F>(&mut self, values: &[T], x: usize, less: &mut F) -> Option<usize>
    where
        F: FnMut(&T, &T) -> bool,
    {
        if self.root == NIL {
            return None;
        }
        let (mut t, above) = self.splay(self.root, &mut |key| less(&values[x], &values[key]));
        self.root = t;
        if above {
            // root is the successor; the predecessor is the maximum on its left
            let left = self.nodes[t].left;
            if left == NIL {
                return None;
            }
            let (m, _) = self.splay(left, &mut |_| false);
            self.nodes[t].left = NIL;
            self.nodes[m].right = t;
            self.root = m;
            t = m;
        }
        self.nodes[t].key = x;
        Some(self.nodes[t].label)
    }

    /// Top-down splay. `goes_left(key)` is true when the target lies strictly
    /// below `key`; the last node on the search path becomes the root and
    /// is returned with the last answer of `goes_left` on it.
    fn splay<G>(&mut self, mut t: usize, goes_left: &mut G) -> (usize, bool)
    where
        G: FnMut(usize) -> bool,
    {
        // Left tree collects nodes below the target, right tree those above.
        let (mut l_root, mut l_max) = (NIL, NIL);
        let (mut r_root, mut r_min) = (NIL, NIL);
        let mut left;
        // answer for `t` already known from the previous step
        let mut known = None;
        loop {
            left = match known.take() {
                Some(b) => b,
                None => goes_left(self.nodes[t].key),
            };
            if left {
                let mut c = self.nodes[t].left;
                if c == NIL {
                    break;
                }
                let c_left = goes_left(self.nodes[c].key);
                if c_left {
                    self.nodes[t].left = self.nodes[c].right;
                    self.nodes[c].right = t;
                    t = c;
                    c = self.nodes[t].left;
                    if c == NIL {
                        break;
                    }
                } else {
                    known = Some(false);
                }
                if r_min == NIL {
                    r_root = t;
                } else {
                    self.nodes[r_min].left = t;
                }
                r_min = t;
                t = c;
            } else {
                let mut c = self.nodes[t].right;
                if c == NIL {
                    break;
                }
                let c_left = goes_left(self.nodes[c].key);
                if !c_left {
                    self.nodes[t].right = self.nodes[c].left;
                    self.nodes[c].left = t;
                    t = c;
                    c = self.nodes[t].right;
                    if c == NIL {
                        break;
                    }
                } else {
                    known = Some(true);
                }
                if l_max == NIL {
                    l_root = t;
                } else {
                    self.nodes[l_max].right = t;
                }
                l_max = t;
                t = c;
            }
        }
        if l_max == NIL {
            l_root = self.nodes[t].left;
        } else {
            self.nodes[l_max].right = self.nodes[t].left;
        }
        if r_min == NIL {
            r_root = self.nodes[t].right;
        } else {
            self.nodes[r_min].left = self.nodes[t].right;
        }
        self.nodes[t].left = l_root;
        self.nodes[t].right = r_root;
        (t, left)
    }

    #[cfg(test)]
    fn keys_in_order(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        let mut v = self.root;
        while v != NIL || !stack.is_empty() {
            while v != NIL {
                stack.push(v);
                v = self.nodes[v].left;
            }
            let u = stack.pop().unwrap();
            out.push(self.nodes[u].key);
            v = self.nodes[u].right;
        }
        out
    }
}

use alloc::vec::Vec;

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: alloc::vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }

    /// Dense component labels `0..k` for the listed members, numbered in order
    /// of first appearance. Non-members get `None`.
    pub fn labels(&mut self, members: &[bool]) -> (Vec<Option<usize>>, usize) {
        let n = self.parent.len();
        let mut root_label = alloc::vec![usize::MAX; n];
        let mut out = alloc::vec![None; n];
        let mut next = 0;
        for i in 0..n {
            if !members[i] {
                continue;
            }
            let r = self.find(i);
            if root_label[r] == usize::MAX {
                root_label[r] = next;
                next += 1;
            }
            out[i] = Some(root_label[r]);
        }
        (out, next)
    }
}

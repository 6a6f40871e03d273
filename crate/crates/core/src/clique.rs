//! Distinguishability graphs and exact maximum clique search.
//!
//! Branch and bound with a greedy-coloring upper bound. Among all maximum
//! cliques the lexicographically smallest id set is returned.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Keeps only indices strictly greater than `i`.
    fn above(&self, i: usize) -> Bits {
        let mut out = self.clone();
        for j in 0..=i.min(out.0.len() * 64 - 1) {
            out.remove(j);
        }
        out
    }
}

/// Undirected simple graph over glyph candidate ids. An edge means the two
/// glyphs are reliably distinguishable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionGraph {
    ids: Vec<usize>,
    adj: Vec<Bits>,
}

impl ConfusionGraph {
    /// Complete graph over the given ids. Duplicates are collapsed.
    pub fn complete(ids: impl IntoIterator<Item = usize>) -> Self {
        let ids: Vec<usize> = ids
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let n = ids.len();
        let adj = (0..n)
            .map(|i| {
                let mut b = Bits::full(n);
                b.remove(i);
                b
            })
            .collect();
        Self { ids, adj }
    }

    /// Graph over ids `0..n` with exactly the given edges.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self {
            ids: (0..n).collect(),
            adj: (0..n).map(|_| Bits::empty(n)).collect(),
        };
        for (a, b) in edges {
            if a != b && a < n && b < n {
                g.adj[a].insert(b);
                g.adj[b].insert(a);
            }
        }
        g
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Bits::count).sum::<usize>() / 2
    }

    fn index(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.adj[i].contains(j),
            _ => false,
        }
    }

    /// Returns whether an edge was present.
    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) if self.adj[i].contains(j) => {
                self.adj[i].remove(j);
                self.adj[j].remove(i);
                true
            }
            _ => false,
        }
    }

    pub fn is_clique(&self, ids: &[usize]) -> bool {
        let idx: Option<Vec<usize>> = ids.iter().map(|&id| self.index(id)).collect();
        let Some(idx) = idx else { return false };
        idx.iter().enumerate().all(|(a, &i)| {
            idx[a + 1..]
                .iter()
                .all(|&j| i != j && self.adj[i].contains(j))
        })
    }
}

struct Search<'a> {
    adj: &'a [Bits],
    best: usize,
    target: usize,
}

impl Search<'_> {
    /// Greedy sequential coloring; returns vertices with their color numbers
    /// in nondecreasing color order.
    fn color(&self, cand: &Bits) -> Vec<(usize, usize)> {
        let mut order = Vec::with_capacity(cand.count());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                uncolored.remove(v);
                q.and_not_assign(&self.adj[v]);
                order.push((v, color));
            }
        }
        order
    }

    /// Raises `self.best` to the clique number of `cand` extended by a clique
    /// of `size`, stopping early once `target` is reached.
    fn expand(&mut self, mut cand: Bits, size: usize) -> bool {
        let order = self.color(&cand);
        for &(v, color) in order.iter().rev() {
            if size + color <= self.best {
                return false;
            }
            let next = cand.and(&self.adj[v]);
            if next.is_empty() {
                if size + 1 > self.best {
                    self.best = size + 1;
                    if self.best >= self.target {
                        return true;
                    }
                }
            } else if self.expand(next, size + 1) {
                return true;
            }
            cand.remove(v);
        }
        false
    }
}

/// Size of the largest clique within `cand`, or `target` if one of at least
/// that size exists.
fn clique_number(adj: &[Bits], cand: &Bits, target: usize) -> usize {
    if cand.is_empty() {
        return 0;
    }
    let mut s = Search {
        adj,
        best: 0,
        target,
    };
    s.expand(cand.clone(), 0);
    s.best
}

/// A maximum clique; the lexicographically smallest one when several exist.
pub fn max_clique(graph: &ConfusionGraph) -> Vec<usize> {
    let n = graph.node_count();
    if n == 0 {
        return Vec::new();
    }
    let adj = &graph.adj;
    let all = Bits::full(n);
    let omega = clique_number(adj, &all, usize::MAX);

    let mut chosen = Vec::with_capacity(omega);
    let mut cand = all;
    for v in 0..n {
        if chosen.len() == omega {
            break;
        }
        if !cand.contains(v) {
            continue;
        }
        let rest = cand.and(&adj[v]).above(v);
        let need = omega - chosen.len() - 1;
        if need == 0 || clique_number(adj, &rest, need) >= need {
            chosen.push(v);
            cand = rest;
        }
    }
    chosen.into_iter().map(|i| graph.ids[i]).collect()
}

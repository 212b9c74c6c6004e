//! Request/cache bipartite graphs and maximum-cardinality matching.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::popularity::RequestBatch;
use crate::system::PlacementMap;

/// Largest side accepted by [`brute_force_max_matching`].
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Bipartite graph with requests on the left and caches on the right.
///
/// Only left adjacency is stored; neighbour lists are kept in ascending
/// order, which fixes which maximum matching the solver returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(right: usize, mut adj: Vec<Vec<usize>>) -> Result<Self> {
        for (l, nbrs) in adj.iter_mut().enumerate() {
            nbrs.sort_unstable();
            nbrs.dedup();
            if let Some(&r) = nbrs.last() {
                if r >= right {
                    return Err(Error::invalid(format!(
                        "left vertex {l} points at right vertex {r} of {right}"
                    )));
                }
            }
        }
        Ok(Self { right, adj })
    }

    pub fn from_edges(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); left];
        for &(l, r) in edges {
            if l >= left {
                return Err(Error::invalid(format!("left vertex {l} of {left}")));
            }
            adj[l].push(r);
        }
        Self::new(right, adj)
    }

    pub fn left_len(&self) -> usize {
        self.adj.len()
    }

    pub fn right_len(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, left: usize, right: usize) -> bool {
        self.adj[left].binary_search(&right).is_ok()
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right];
        for nbrs in &self.adj {
            for &r in nbrs {
                deg[r] += 1;
            }
        }
        deg
    }
}

/// Request `r` may be served by every cache that stores its file.
pub fn build_request_graph(batch: &RequestBatch, placement: &PlacementMap) -> BipartiteGraph {
    let adj = batch
        .requests()
        .iter()
        .map(|&f| placement.replicas(f).to_vec())
        .collect();
    BipartiteGraph {
        right: placement.cache_count(),
        adj,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    left_to_right: Vec<Option<usize>>,
    right_to_left: Vec<Option<usize>>,
    size: usize,
}

impl Matching {
    fn empty(left: usize, right: usize) -> Self {
        Self {
            left_to_right: vec![None; left],
            right_to_left: vec![None; right],
            size: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn partner_of_left(&self, left: usize) -> Option<usize> {
        self.left_to_right[left]
    }

    pub fn partner_of_right(&self, right: usize) -> Option<usize> {
        self.right_to_left[right]
    }

    pub fn left_to_right(&self) -> &[Option<usize>] {
        &self.left_to_right
    }

    pub fn into_left_to_right(self) -> Vec<Option<usize>> {
        self.left_to_right
    }

    /// Checks that every pair is an edge and that no vertex is used twice.
    pub fn is_valid_for(&self, g: &BipartiteGraph) -> bool {
        if self.left_to_right.len() != g.left_len() || self.right_to_left.len() != g.right_len() {
            return false;
        }
        let mut seen = vec![false; g.right_len()];
        let mut count = 0;
        for (l, r) in self.left_to_right.iter().enumerate() {
            if let Some(r) = *r {
                if !g.has_edge(l, r) || seen[r] || self.right_to_left[r] != Some(l) {
                    return false;
                }
                seen[r] = true;
                count += 1;
            }
        }
        count == self.size
            && self
                .right_to_left
                .iter()
                .enumerate()
                .all(|(r, l)| l.is_none_or(|l| self.left_to_right[l] == Some(r)))
    }
}

const INF: usize = usize::MAX;

/// Maximum-cardinality matching by Hopcroft–Karp, `O(E √V)`.
pub fn max_matching(g: &BipartiteGraph) -> Matching {
    let left = g.left_len();
    let mut m = Matching::empty(left, g.right_len());
    let mut dist = vec![INF; left];
    let mut queue = VecDeque::with_capacity(left);
    // Per-vertex cursor into its adjacency list for the current phase.
    let mut cursor = vec![0usize; left];
    let mut stack: Vec<usize> = Vec::new();

    loop {
        // BFS from free left vertices; `found` is the layer where a free
        // right vertex first shows up.
        queue.clear();
        for (l, d) in dist.iter_mut().enumerate() {
            if m.left_to_right[l].is_none() {
                *d = 0;
                queue.push_back(l);
            } else {
                *d = INF;
            }
        }
        let mut found = INF;
        while let Some(l) = queue.pop_front() {
            if dist[l] >= found {
                continue;
            }
            for &r in g.neighbors(l) {
                match m.right_to_left[r] {
                    None => found = found.min(dist[l] + 1),
                    Some(next) if dist[next] == INF => {
                        dist[next] = dist[l] + 1;
                        queue.push_back(next);
                    }
                    Some(_) => {}
                }
            }
        }
        if found == INF {
            break;
        }

        // Vertex-disjoint shortest augmenting paths by iterative DFS.
        cursor.iter_mut().for_each(|c| *c = 0);
        for root in 0..left {
            if m.left_to_right[root].is_some() || dist[root] != 0 {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&l) = stack.last() {
                let nbrs = g.neighbors(l);
                let mut advanced = false;
                while cursor[l] < nbrs.len() {
                    let r = nbrs[cursor[l]];
                    cursor[l] += 1;
                    match m.right_to_left[r] {
                        None if dist[l] + 1 == found => {
                            // Augment along the stack.
                            let mut right = r;
                            for &u in stack.iter().rev() {
                                let prev = m.left_to_right[u];
                                m.left_to_right[u] = Some(right);
                                m.right_to_left[right] = Some(u);
                                match prev {
                                    Some(p) => right = p,
                                    None => break,
                                }
                            }
                            m.size += 1;
                            stack.clear();
                            advanced = true;
                            break;
                        }
                        Some(next) if dist[next] == dist[l] + 1 => {
                            stack.push(next);
                            advanced = true;
                            break;
                        }
                        _ => {}
                    }
                }
                if !advanced {
                    // Dead end: never revisit this vertex in this phase.
                    dist[l] = INF;
                    stack.pop();
                }
            }
        }
    }
    m
}

/// Left-to-right first-fit matching; a lower bound for tests.
pub fn greedy_matching(g: &BipartiteGraph) -> Matching {
    let mut m = Matching::empty(g.left_len(), g.right_len());
    for l in 0..g.left_len() {
        if let Some(&r) = g
            .neighbors(l)
            .iter()
            .find(|&&r| m.right_to_left[r].is_none())
        {
            m.left_to_right[l] = Some(r);
            m.right_to_left[r] = Some(l);
            m.size += 1;
        }
    }
    m
}

/// Exact maximum matching size by exhaustive backtracking: each left vertex
/// is either skipped or matched to each free neighbour in turn.
pub fn brute_force_max_matching(g: &BipartiteGraph) -> Result<usize> {
    if g.left_len() > BRUTE_FORCE_LIMIT || g.right_len() > BRUTE_FORCE_LIMIT {
        return Err(Error::invalid(format!(
            "brute-force matching limited to {BRUTE_FORCE_LIMIT} vertices per side, got {}x{}",
            g.left_len(),
            g.right_len()
        )));
    }
    fn go(g: &BipartiteGraph, l: usize, used: &mut [bool], size: usize, best: &mut usize) {
        if l == g.left_len() {
            *best = (*best).max(size);
            return;
        }
        // Even matching every remaining vertex cannot beat `best`.
        if size + (g.left_len() - l) <= *best {
            return;
        }
        for &r in g.neighbors(l) {
            if !used[r] {
                used[r] = true;
                go(g, l + 1, used, size + 1, best);
                used[r] = false;
            }
        }
        go(g, l + 1, used, size, best);
    }
    let mut best = 0;
    let mut used = vec![false; g.right_len()];
    go(g, 0, &mut used, 0, &mut best);
    Ok(best)
}

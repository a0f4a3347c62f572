//! The 4-regular dual multigraph: one vertex per tetrahedron, one edge per
//! glued face pair. Simplicity, connectivity, diameter and the doubling
//! construction used in the expansion transfer.

use serde::{Deserialize, Serialize};

use crate::model::GluingInstance;

/// A multigraph with uniform degree; loops allowed (a loop contributes 2
/// to its endpoint's degree).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiGraph {
    n: usize,
    /// Edge multiset as pairs (i, j) with i <= j.
    edges: Vec<(usize, usize)>,
    degree: usize,
}

/// 4-regular dual graphs as produced by `build_dual`.
pub type MultiGraph4 = MultiGraph;

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, degree: usize) -> Self {
        let edges = edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect::<Vec<_>>();
        let g = MultiGraph { n, edges, degree };
        debug_assert!(g.degrees().iter().all(|&d| d == degree));
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// True iff there are no loops and no repeated edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            if a == b || !seen.insert((a, b)) {
                return false;
            }
        }
        true
    }

    /// Flat adjacency (CSR); loops appear twice at their vertex.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<u32>) {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut offsets = vec![0usize; self.n + 1];
        for v in 0..self.n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut cursor = offsets.clone();
        let mut adj = vec![0u32; offsets[self.n]];
        for &(a, b) in &self.edges {
            adj[cursor[a]] = b as u32;
            cursor[a] += 1;
            adj[cursor[b]] = a as u32;
            cursor[b] += 1;
        }
        (offsets, adj)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let (offsets, adj) = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[offsets[v]..offsets[v + 1]] {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Exact diameter by BFS from every vertex; `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        if self.n == 0 {
            return Some(0);
        }
        if !self.is_connected() {
            return None;
        }
        let (offsets, adj) = self.adjacency();
        use rayon::prelude::*;
        let diam = (0..self.n)
            .into_par_iter()
            .map(|src| {
                let mut dist = vec![u32::MAX; self.n];
                let mut queue = std::collections::VecDeque::new();
                dist[src] = 0;
                queue.push_back(src);
                let mut ecc = 0u32;
                while let Some(v) = queue.pop_front() {
                    let dv = dist[v];
                    for &w in &adj[offsets[v]..offsets[v + 1]] {
                        let w = w as usize;
                        if dist[w] == u32::MAX {
                            dist[w] = dv + 1;
                            ecc = ecc.max(dv + 1);
                            queue.push_back(w);
                        }
                    }
                }
                ecc
            })
            .max()
            .unwrap_or(0);
        Some(diam as usize)
    }

    /// The double: two copies plus four parallel edges between every pair
    /// of corresponding vertices. Degree doubles.
    pub fn double_graph(&self) -> MultiGraph {
        let mut edges = Vec::with_capacity(2 * self.edges.len() + 4 * self.n);
        for &(a, b) in &self.edges {
            edges.push((a, b));
            edges.push((a + self.n, b + self.n));
        }
        for v in 0..self.n {
            for _ in 0..4 {
                edges.push((v, v + self.n));
            }
        }
        MultiGraph::new(2 * self.n, edges, self.degree + 4)
    }
}

/// One dual edge per face pair; exactly 2n edges, 4-regular.
pub fn build_dual(instance: &GluingInstance) -> MultiGraph4 {
    let edges = instance
        .pairs()
        .iter()
        .map(|p| (p.first.tet, p.second.tet))
        .collect();
    MultiGraph::new(instance.n(), edges, 4)
}

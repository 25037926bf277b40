//! Undirected simple graphs over dense vertex ids, edge subsets, and the
//! brute-force triangle oracle.

use std::collections::VecDeque;

use crate::error::GraphError;

pub type VertexId = usize;
/// Unordered edge stored as (smaller, larger).
pub type Edge = (VertexId, VertexId);

pub fn normalize(u: VertexId, v: VertexId) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Strict constructor: rejects self-loops, out-of-range ids and repeated
    /// edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            list.push(normalize(u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge { u: w[0].0, v: w[0].1 });
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// Lenient constructor for generators: drops self-loops and duplicates.
    /// Ids must be in range.
    pub fn from_edges_dedup<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut list: Vec<Edge> = edges
            .into_iter()
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| {
                assert!(u < n && v < n, "vertex out of range");
                normalize(u, v)
            })
            .collect();
        list.sort_unstable();
        list.dedup();
        Self::from_sorted_unique(n, list)
    }

    fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, u: VertexId) -> &[VertexId] {
        &self.adj[u]
    }

    pub fn degree(&self, u: VertexId) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Vertices with at least one incident edge.
    pub fn non_isolated(&self) -> Vec<VertexId> {
        (0..self.n).filter(|&u| !self.adj[u].is_empty()).collect()
    }

    /// Hop distances from `src`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, src: VertexId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, src: VertexId) -> Option<usize> {
        let dist = self.bfs_distances(src);
        let mut ecc = 0;
        for d in dist {
            ecc = ecc.max(d?);
        }
        Some(ecc)
    }

    /// Connected components in order of their smallest vertex; each
    /// component is sorted. Isolated vertices form singleton components.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut label = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![s];
            label[s] = id;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Subgraph induced on `vertices`, relabelled to `0..k` in the given
    /// order. Returns the subgraph and the local-to-global map.
    pub fn induced(&self, vertices: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = local[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        (Graph::from_edges_dedup(vertices.len(), edges), vertices.to_vec())
    }

    /// Copy with vertex `u` renamed to `perm[u]`.
    pub fn relabel(&self, perm: &[VertexId]) -> Graph {
        assert_eq!(perm.len(), self.n);
        Graph::from_edges_dedup(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// Same vertex set, edge list filtered by `keep`.
    pub fn filter_edges<F: FnMut(Edge) -> bool>(&self, mut keep: F) -> Graph {
        let edges = self.edges.iter().copied().filter(|&e| keep(e)).collect();
        Self::from_sorted_unique(self.n, edges)
    }

    pub fn degree_sum(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// A set of edges of a parent graph on the same vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSubset {
    inner: Graph,
}

impl EdgeSubset {
    pub fn all(parent: &Graph) -> Self {
        EdgeSubset { inner: parent.clone() }
    }

    pub fn empty(n: usize) -> Self {
        EdgeSubset { inner: Graph::empty(n) }
    }

    /// Members must be edges of `parent`.
    pub fn new<I>(parent: &Graph, members: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut list = Vec::new();
        for (u, v) in members {
            if !parent.has_edge(u, v) {
                return Err(GraphError::NotAnEdge { u, v });
            }
            list.push(normalize(u, v));
        }
        list.sort_unstable();
        list.dedup();
        Ok(EdgeSubset {
            inner: Graph::from_sorted_unique(parent.vertex_count(), list),
        })
    }

    /// Wraps a graph as a subset of itself.
    pub fn from_graph(g: Graph) -> Self {
        EdgeSubset { inner: g }
    }

    pub fn as_graph(&self) -> &Graph {
        &self.inner
    }

    pub fn into_graph(self) -> Graph {
        self.inner
    }

    pub fn len(&self) -> usize {
        self.inner.edge_count()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.edge_count() == 0
    }

    pub fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        self.inner.has_edge(u, v)
    }

    pub fn degree(&self, u: VertexId) -> usize {
        self.inner.degree(u)
    }

    pub fn neighbors(&self, u: VertexId) -> &[VertexId] {
        self.inner.neighbors(u)
    }

    pub fn edges(&self) -> &[Edge] {
        self.inner.edges()
    }

    pub fn is_subset_of(&self, parent: &Graph) -> bool {
        self.inner.vertex_count() == parent.vertex_count() && self.edges().iter().all(|&(u, v)| parent.has_edge(u, v))
    }
}

/// Three distinct vertices, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangleWitness {
    pub vertices: [VertexId; 3],
}

impl TriangleWitness {
    pub fn new(a: VertexId, b: VertexId, c: VertexId) -> Self {
        let mut vertices = [a, b, c];
        vertices.sort_unstable();
        assert!(vertices[0] != vertices[1] && vertices[1] != vertices[2]);
        TriangleWitness { vertices }
    }

    pub fn edges(&self) -> [Edge; 3] {
        let [a, b, c] = self.vertices;
        [(a, b), (a, c), (b, c)]
    }

    pub fn is_in(&self, g: &Graph) -> bool {
        self.edges().iter().all(|&(u, v)| g.has_edge(u, v))
    }
}

/// First triangle in lexicographic order with all edges in `allowed`.
pub fn brute_force_find_triangle(g: &Graph, allowed: &EdgeSubset) -> Option<TriangleWitness> {
    debug_assert!(allowed.is_subset_of(g));
    let h = allowed.as_graph();
    for u in 0..h.vertex_count() {
        let nu = h.neighbors(u);
        let start = nu.partition_point(|&x| x <= u);
        for &v in &nu[start..] {
            if let Some(w) = first_common_above(nu, h.neighbors(v), v) {
                return Some(TriangleWitness::new(u, v, w));
            }
        }
    }
    None
}

/// Every triangle of `g`, sorted.
pub fn all_triangles(g: &Graph) -> Vec<TriangleWitness> {
    let mut out = Vec::new();
    for &(u, v) in g.edges() {
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (a.partition_point(|&x| x <= v), b.partition_point(|&x| x <= v));
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(TriangleWitness::new(u, v, a[i]));
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    out
}

pub fn has_triangle(g: &Graph) -> bool {
    brute_force_find_triangle(g, &EdgeSubset::all(g)).is_some()
}

fn first_common_above(a: &[VertexId], b: &[VertexId], floor: VertexId) -> Option<VertexId> {
    let (mut i, mut j) = (a.partition_point(|&x| x <= floor), b.partition_point(|&x| x <= floor));
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

/// Convenience constructors used by tests and examples.
pub mod named {
    use super::Graph;

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges_dedup(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges_dedup(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::from_edges_dedup(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges_dedup(leaves + 1, (1..=leaves).map(|v| (0, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn k3_oracle() {
        let g = complete(3);
        let w = brute_force_find_triangle(&g, &EdgeSubset::all(&g)).unwrap();
        assert_eq!(w.vertices, [0, 1, 2]);
    }

    #[test]
    fn path_has_none() {
        let g = path(4);
        assert!(brute_force_find_triangle(&g, &EdgeSubset::all(&g)).is_none());
    }

    #[test]
    fn k3_missing_edge() {
        let g = complete(3);
        let sub = EdgeSubset::new(&g, [(0, 1), (1, 2)]).unwrap();
        assert!(brute_force_find_triangle(&g, &sub).is_none());
    }

    #[test]
    fn strict_constructor_rejects() {
        assert!(matches!(
            Graph::from_edges(3, [(1, 1)]),
            Err(GraphError::SelfLoop { vertex: 1 })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge { u: 0, v: 1 })
        ));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn subset_rejects_foreign_edge() {
        let g = path(3);
        assert!(EdgeSubset::new(&g, [(0, 2)]).is_err());
    }

    #[test]
    fn k4_triangles() {
        assert_eq!(all_triangles(&complete(4)).len(), 4);
        assert_eq!(all_triangles(&complete(6)).len(), 20);
    }

    #[test]
    fn components_and_induced() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
        let (h, map) = g.induced(&[1, 2, 0]);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(map, vec![1, 2, 0]);
        assert!(h.has_edge(0, 1) && h.has_edge(0, 2));
    }

    #[test]
    fn eccentricity_of_path() {
        assert_eq!(path(5).eccentricity(0), Some(4));
        assert_eq!(path(5).eccentricity(2), Some(2));
        assert_eq!(Graph::empty(2).eccentricity(0), None);
    }
}

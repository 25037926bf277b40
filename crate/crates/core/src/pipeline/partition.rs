//! Random vertex partition into `t` cells and the slices of `[t]^3`.

use rand::Rng;

use crate::graph::{Edge, Graph, VertexId};
use crate::sampling::SamplingConstants;
use crate::util::vertex_rng;

/// `max(1, floor(sqrt(n̄) / (c_t log2 n̄)))`.
pub fn partition_size(n_bar: usize, c_t: f64) -> usize {
    if n_bar < 2 {
        return 1;
    }
    let nb = n_bar as f64;
    ((nb.sqrt() / (c_t * nb.log2())).floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPartition {
    pub t: usize,
    /// `cell[v]` in `1..=t` for members, 0 otherwise.
    pub cell: Vec<usize>,
    /// `cells[i - 1]` lists the members of cell `i`, ascending.
    pub cells: Vec<Vec<VertexId>>,
}

impl VertexPartition {
    /// Every member picks its cell uniformly with its own generator.
    pub fn random(members: &[VertexId], network_size: usize, t: usize, seed: u64) -> Self {
        let assignment: Vec<(VertexId, usize)> = members
            .iter()
            .map(|&v| (v, vertex_rng(seed, v).gen_range(1..=t)))
            .collect();
        Self::from_assignment(network_size, t, &assignment)
    }

    pub fn from_assignment(network_size: usize, t: usize, assignment: &[(VertexId, usize)]) -> Self {
        let mut cell = vec![0; network_size];
        let mut cells = vec![Vec::new(); t];
        for &(v, c) in assignment {
            assert!((1..=t).contains(&c), "cell {c} outside 1..={t}");
            cell[v] = c;
            cells[c - 1].push(v);
        }
        for c in &mut cells {
            c.sort_unstable();
        }
        VertexPartition { t, cell, cells }
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.t + (j - 1)
    }

    /// `counts[(i-1) t + (j-1)] = |E(V_i, V_j)|`, symmetric.
    pub fn pair_counts(&self, g: &Graph) -> Vec<usize> {
        let mut counts = vec![0; self.t * self.t];
        for &(u, v) in g.edges() {
            let (a, b) = (self.cell[u], self.cell[v]);
            if a == 0 || b == 0 {
                continue;
            }
            counts[self.pair_index(a, b)] += 1;
            if a != b {
                counts[self.pair_index(b, a)] += 1;
            }
        }
        counts
    }

    /// `E(V_i, V_j)`.
    pub fn pair_edges(&self, g: &Graph, i: usize, j: usize) -> Vec<Edge> {
        g.edges()
            .iter()
            .copied()
            .filter(|&(u, v)| {
                let (a, b) = (self.cell[u], self.cell[v]);
                (a, b) == (i, j) || (a, b) == (j, i)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityStats {
    pub t: usize,
    /// `24 m̄ / t^2`.
    pub bound: f64,
    pub max_pair: usize,
    /// Unordered pairs `i <= j`.
    pub pairs_checked: usize,
    pub pairs_within: usize,
    /// The sampling preconditions fail for `p = 2/t` at this scale.
    pub precondition_infeasible: bool,
}

impl SparsityStats {
    pub fn passes(&self) -> bool {
        self.max_pair as f64 <= self.bound
    }
}

/// Checks `|E(V_i, V_j)| <= 6 (2/t)^2 m̄` for every pair of cells.
pub fn verify_partition_sparsity(
    partition: &VertexPartition,
    ebar: &Graph,
    n_bar: usize,
    sampling: &SamplingConstants,
) -> SparsityStats {
    let t = partition.t;
    let m_bar = ebar.edge_count();
    let p = (2.0 / t as f64).min(1.0);
    let bound = sampling.c_bound * p * p * m_bar as f64;
    let counts = partition.pair_counts(ebar);
    let mut max_pair = 0;
    let mut pairs_checked = 0;
    let mut pairs_within = 0;
    for i in 1..=t {
        for j in i..=t {
            let c = counts[(i - 1) * t + (j - 1)];
            max_pair = max_pair.max(c);
            pairs_checked += 1;
            if c as f64 <= bound {
                pairs_within += 1;
            }
        }
    }
    let log_n = (n_bar.max(2) as f64).log2();
    let edge_ok = p * p * m_bar as f64 >= sampling.c_edges * log_n * log_n;
    let degree_ok = ebar.max_degree() as f64 <= m_bar as f64 * p / (sampling.c_degree * log_n);
    SparsityStats {
        t,
        bound,
        max_pair,
        pairs_checked,
        pairs_within,
        precondition_infeasible: !(edge_ok && degree_ok),
    }
}

/// The slices `Λ_ℓ = {(i, j, 1 + ((i + j + ℓ) mod t))}` for `ℓ` in `1..=t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriplePartition {
    pub t: usize,
}

/// `x mod t` mapped into `1..=t`.
fn wrap(x: i64, t: usize) -> usize {
    let r = x.rem_euclid(t as i64) as usize;
    if r == 0 {
        t
    } else {
        r
    }
}

impl TriplePartition {
    pub fn new(t: usize) -> Self {
        assert!(t >= 1);
        TriplePartition { t }
    }

    pub fn k_of(&self, i: usize, j: usize, l: usize) -> usize {
        1 + (i + j + l) % self.t
    }

    pub fn j_of(&self, i: usize, k: usize, l: usize) -> usize {
        wrap(k as i64 - 1 - i as i64 - l as i64, self.t)
    }

    pub fn i_of(&self, j: usize, k: usize, l: usize) -> usize {
        wrap(k as i64 - 1 - j as i64 - l as i64, self.t)
    }

    /// The slice containing `(i, j, k)`.
    pub fn slice_of(&self, i: usize, j: usize, k: usize) -> usize {
        wrap(k as i64 - 1 - i as i64 - j as i64, self.t)
    }

    /// Members of `Λ_ℓ` in lexicographic order of `(i, j)`.
    pub fn slice(&self, l: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let t = self.t;
        (1..=t).flat_map(move |i| (1..=t).map(move |j| (i, j, self.k_of(i, j, l))))
    }

    /// Position of `(i, j, ·)` within any slice.
    pub fn index_of(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.t + (j - 1)
    }

    pub fn triple_at(&self, index: usize, l: usize) -> (usize, usize, usize) {
        let i = index / self.t + 1;
        let j = index % self.t + 1;
        (i, j, self.k_of(i, j, l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::complete;

    #[test]
    fn size_clamps_to_one() {
        assert_eq!(partition_size(1, 1.0), 1);
        assert_eq!(partition_size(100, 30.0), 1);
        // sqrt(4096) / 12 = 5.33
        assert_eq!(partition_size(4096, 1.0), 5);
    }

    #[test]
    fn inverse_maps_agree() {
        for t in 1..=9 {
            let tp = TriplePartition::new(t);
            for l in 1..=t {
                for (i, j, k) in tp.slice(l) {
                    assert_eq!(tp.j_of(i, k, l), j);
                    assert_eq!(tp.i_of(j, k, l), i);
                    assert_eq!(tp.slice_of(i, j, k), l);
                }
            }
        }
    }

    #[test]
    fn single_cell_passes() {
        let g = complete(10);
        let p = VertexPartition::random(&(0..10).collect::<Vec<_>>(), 10, 1, 3);
        let s = verify_partition_sparsity(&p, &g, 10, &SamplingConstants::default());
        assert_eq!(s.max_pair, 45);
        assert!(s.passes());
        assert!(s.precondition_infeasible);
    }

    #[test]
    fn pair_counts_are_symmetric() {
        let g = complete(6);
        let p = VertexPartition::from_assignment(6, 2, &[(0, 1), (1, 1), (2, 2), (3, 2), (4, 2), (5, 1)]);
        let c = p.pair_counts(&g);
        assert_eq!(c, vec![3, 9, 9, 3]);
        assert_eq!(p.pair_edges(&g, 1, 2).len(), 9);
    }
}

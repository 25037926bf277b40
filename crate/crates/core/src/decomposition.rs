//! Expander decomposition by recursive spectral sweep cuts, and the
//! good/bad vertex classification used by the recursion.
//!
//! A piece is accepted once its lazy-walk mixing bound is at most
//! `c_mix (log2 n)^3`, with `n` the size of the whole graph. Otherwise it is
//! cut at the minimum-conductance prefix of its Fiedler order and each side
//! is split into connected pieces.

use crate::config::Constants;
use crate::engine::RoundLedger;
use crate::error::DecompositionError;
use crate::graph::{Edge, EdgeSubset, Graph, VertexId};
use crate::spectral::{estimate_from_mu2, fiedler, MixingEstimate};

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub vertex_count: usize,
    /// Sorted vertex lists, ordered by smallest member.
    pub components: Vec<Vec<VertexId>>,
    pub component_of: Vec<usize>,
    pub inter_edges: EdgeSubset,
    pub estimates: Vec<MixingEstimate>,
    pub threshold: f64,
    pub edge_count: usize,
}

impl Decomposition {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// `G_i` relabelled to `0..|V_i|`, with the local-to-global map.
    pub fn component_graph(&self, g: &Graph, i: usize) -> (Graph, Vec<VertexId>) {
        g.induced(&self.components[i])
    }

    /// Edges of `E_i` in global ids.
    pub fn intra_edges(&self, g: &Graph, i: usize) -> Vec<Edge> {
        let ci = &self.component_of;
        g.edges()
            .iter()
            .copied()
            .filter(|&(u, v)| ci[u] == i && ci[v] == i)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["vertex", "component"]);
        for (v, c) in self.component_of.iter().enumerate() {
            let _ = w.write_record([v.to_string(), c.to_string()]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    /// Checks the partition, the inter-edge set, the edge budget and every
    /// component's mixing bound. Returns a description of the first failure.
    pub fn check_contract(&self, g: &Graph, epsilon: f64) -> Result<(), String> {
        let mut seen = vec![false; self.vertex_count];
        for (i, comp) in self.components.iter().enumerate() {
            for &v in comp {
                if seen[v] {
                    return Err(format!("vertex {v} in two components"));
                }
                seen[v] = true;
                if self.component_of[v] != i {
                    return Err(format!("component_of[{v}] disagrees"));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(format!("vertex {v} uncovered"));
        }
        let by_definition: Vec<Edge> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| self.component_of[u] != self.component_of[v])
            .collect();
        let intra: usize = (0..self.components.len()).map(|i| self.intra_edges(g, i).len()).sum();
        if by_definition != self.inter_edges.edges() || intra + by_definition.len() != g.edge_count() {
            return Err("inter-component edge set inconsistent".to_string());
        }
        if by_definition.len() as f64 > epsilon * g.edge_count() as f64 {
            return Err(format!(
                "{} inter-component edges exceed {epsilon} * {}",
                by_definition.len(),
                g.edge_count()
            ));
        }
        for (i, e) in self.estimates.iter().enumerate() {
            if e.mixing_bound > self.threshold {
                return Err(format!(
                    "component {i} mixing bound {} exceeds {}",
                    e.mixing_bound, self.threshold
                ));
            }
        }
        Ok(())
    }
}

pub fn mixing_threshold(n: usize, c_mix: f64) -> f64 {
    let l = (n.max(2) as f64).log2();
    c_mix * l * l * l
}

/// Decomposes `g`; fails if the edge budget `epsilon |E|` is exceeded.
pub fn decompose(g: &Graph, constants: &Constants) -> Result<(Decomposition, RoundLedger), DecompositionError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(DecompositionError::Empty);
    }
    let threshold = mixing_threshold(n, constants.c_mix);
    let mut pending: Vec<Vec<VertexId>> = g.components();
    pending.reverse();
    let mut accepted: Vec<(Vec<VertexId>, MixingEstimate)> = Vec::new();
    // Every split strictly increases the number of pieces, so at most n - 1
    // splits can happen.
    let mut splits_left = n;
    while let Some(piece) = pending.pop() {
        let (h, map) = g.induced(&piece);
        if piece.len() == 1 {
            accepted.push((piece, trivial_estimate()));
            continue;
        }
        let pair = fiedler(&h);
        let est = estimate_from_mu2(&h, pair.mu2, constants.walk_scale);
        if est.mixing_bound <= threshold {
            accepted.push((piece, est));
            continue;
        }
        if splits_left == 0 {
            return Err(DecompositionError::ContractFailure(format!(
                "split budget exhausted with a piece of {} vertices above the mixing threshold",
                piece.len()
            )));
        }
        splits_left -= 1;
        let side = sweep_cut(&h, &pair.vector);
        let (a, b): (Vec<usize>, Vec<usize>) = (0..h.vertex_count()).partition(|&i| side[i]);
        for part in [a, b] {
            let (sub, local) = h.induced(&part);
            for comp in sub.components() {
                let mut global: Vec<VertexId> = comp.iter().map(|&i| map[local[i]]).collect();
                global.sort_unstable();
                pending.push(global);
            }
        }
    }
    accepted.sort_by_key(|(c, _)| c[0]);
    let mut component_of = vec![0; n];
    for (i, (c, _)) in accepted.iter().enumerate() {
        for &v in c {
            component_of[v] = i;
        }
    }
    let inter = g.filter_edges(|(u, v)| component_of[u] != component_of[v]);
    let inter_count = inter.edge_count();
    let (components, estimates): (Vec<_>, Vec<_>) = accepted.into_iter().unzip();
    let d = Decomposition {
        vertex_count: n,
        components,
        component_of,
        inter_edges: EdgeSubset::from_graph(inter),
        estimates,
        threshold,
        edge_count: g.edge_count(),
    };
    if inter_count as f64 > constants.epsilon * g.edge_count() as f64 {
        return Err(DecompositionError::ContractFailure(format!(
            "{inter_count} inter-component edges exceed {} * {}",
            constants.epsilon,
            g.edge_count()
        )));
    }
    let mut ledger = RoundLedger::new();
    ledger.contract(
        "decomposition",
        constants.c_dec * (n as f64).powf(0.1),
        "c_dec * n^0.1",
        &[("c_dec", constants.c_dec), ("n", n as f64)],
    );
    Ok((d, ledger))
}

fn trivial_estimate() -> MixingEstimate {
    MixingEstimate {
        vertex_count: 1,
        gap: 1.0,
        lambda2: 0.0,
        pi_min: 1.0,
        mixing_bound: 0.0,
    }
}

/// Minimum-conductance prefix of the order given by `x`; ties go to the
/// shortest prefix. Returns membership of the prefix side.
pub fn sweep_cut(h: &Graph, x: &[f64]) -> Vec<bool> {
    let k = h.vertex_count();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let total_vol = h.degree_sum() as f64;
    let mut in_set = vec![false; k];
    let (mut vol, mut cut) = (0.0f64, 0i64);
    let mut best = (f64::INFINITY, 1usize);
    for (idx, &u) in order.iter().enumerate().take(k - 1) {
        in_set[u] = true;
        vol += h.degree(u) as f64;
        for &w in h.neighbors(u) {
            cut += if in_set[w] { -1 } else { 1 };
        }
        let denom = vol.min(total_vol - vol);
        let phi = if denom > 0.0 { cut as f64 / denom } else { f64::INFINITY };
        if phi < best.0 {
            best = (phi, idx + 1);
        }
    }
    let mut side = vec![false; k];
    for &u in &order[..best.1] {
        side[u] = true;
    }
    side
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub good: Vec<bool>,
    /// Inter-component edges with an endpoint that is a good vertex of
    /// component `i`.
    pub inter_i: Vec<Vec<Edge>>,
    /// Edges of `E_i` with a bad endpoint.
    pub new_i: Vec<Vec<Edge>>,
    /// `E^inter` together with every `E^new_i`.
    pub new_edges: Vec<Edge>,
    pub inter_count: usize,
    pub edge_count: usize,
}

impl Classification {
    /// `|E^new| <= 3 |E^inter|`.
    pub fn three_times_inter_holds(&self) -> bool {
        self.new_edges.len() <= 3 * self.inter_count
    }

    /// `|E^new| <= 0.3 |E|`.
    pub fn certificate_holds(&self) -> bool {
        10 * self.new_edges.len() <= 3 * self.edge_count
    }
}

/// Flags `u` in `V_i` good iff `deg_{E_i}(u) >= deg_{E^inter}(u)`.
pub fn classify_vertices(g: &Graph, d: &Decomposition) -> Classification {
    let n = g.vertex_count();
    let ci = &d.component_of;
    let mut intra_deg = vec![0usize; n];
    for &(u, v) in g.edges() {
        if ci[u] == ci[v] {
            intra_deg[u] += 1;
            intra_deg[v] += 1;
        }
    }
    let good: Vec<bool> = (0..n).map(|u| intra_deg[u] >= d.inter_edges.degree(u)).collect();
    let s = d.components.len();
    let mut inter_i = vec![Vec::new(); s];
    let mut new_i = vec![Vec::new(); s];
    let mut new_edges = Vec::new();
    for &(u, v) in g.edges() {
        if ci[u] != ci[v] {
            new_edges.push((u, v));
            if good[u] {
                inter_i[ci[u]].push((u, v));
            }
            if good[v] {
                inter_i[ci[v]].push((u, v));
            }
        } else if !good[u] || !good[v] {
            new_i[ci[u]].push((u, v));
            new_edges.push((u, v));
        }
    }
    new_edges.sort_unstable();
    Classification {
        good,
        inter_i,
        new_i,
        new_edges,
        inter_count: d.inter_edges.len(),
        edge_count: g.edge_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorSpec};
    use crate::graph::named::complete;

    #[test]
    fn single_expander_is_one_piece() {
        let g = generate(&GeneratorSpec::Regular { degree: 6 }, 300, 1).unwrap();
        let (d, ledger) = decompose(&g, &Constants::default()).unwrap();
        assert_eq!(d.component_count(), 1);
        assert!(d.inter_edges.is_empty());
        assert!(d.estimates[0].mixing_bound <= d.threshold);
        assert_eq!(ledger.total(), (300f64.powf(0.1)).ceil() as u64);
    }

    #[test]
    fn complete_graph_is_one_piece() {
        let (d, _) = decompose(&complete(30), &Constants::default()).unwrap();
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn bridge_is_cut() {
        let spec = GeneratorSpec::Composite {
            blocks: 2,
            degree: 6,
            bridges: 1,
        };
        let g = generate(&spec, 200, 9).unwrap();
        let constants = Constants {
            c_mix: 0.5,
            ..Constants::default()
        };
        let (d, _) = decompose(&g, &constants).unwrap();
        assert_eq!(d.component_count(), 2);
        assert_eq!(d.inter_edges.len(), 1);
        assert_eq!(d.components[0], (0..100).collect::<Vec<_>>());
        d.check_contract(&g, 0.1).unwrap();
    }

    #[test]
    fn classification_examples() {
        // Components {0,1,2} (path) and {3}; edges 1-3 and 2-3 are inter.
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)]).unwrap();
        let d = Decomposition {
            vertex_count: 4,
            components: vec![vec![0, 1, 2], vec![3]],
            component_of: vec![0, 0, 0, 1],
            inter_edges: EdgeSubset::new(&g, [(1, 3), (2, 3)]).unwrap(),
            estimates: vec![],
            threshold: f64::INFINITY,
            edge_count: 4,
        };
        let c = classify_vertices(&g, &d);
        // Vertex 2: one intra edge, one inter edge -> good; vertex 3: 0 < 2.
        assert_eq!(c.good, vec![true, true, true, false]);
        assert_eq!(c.inter_i[0], vec![(1, 3), (2, 3)]);
        assert!(c.inter_i[1].is_empty());
        assert!(c.new_i[0].is_empty());

        // Vertex with 1 intra edge and 2 inter edges is bad.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = Decomposition {
            vertex_count: 4,
            components: vec![vec![0, 1], vec![2], vec![3]],
            component_of: vec![0, 0, 1, 2],
            inter_edges: EdgeSubset::new(&g, [(0, 2), (0, 3)]).unwrap(),
            estimates: vec![],
            threshold: f64::INFINITY,
            edge_count: 3,
        };
        let c = classify_vertices(&g, &d);
        assert!(!c.good[0]);
        assert_eq!(c.new_i[0], vec![(0, 1)]);
    }

    #[test]
    fn isolated_component_all_good() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let (d, _) = decompose(&g, &Constants::default()).unwrap();
        let c = classify_vertices(&g, &d);
        assert!(c.good.iter().all(|&x| x));
        assert!(c.new_edges.is_empty());
    }

    #[test]
    fn csv_export() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let (d, _) = decompose(&g, &Constants::default()).unwrap();
        assert_eq!(d.to_csv(), "vertex,component\n0,0\n1,0\n2,1\n");
    }
}

//! The subnetwork problem: find a triangle with all three edges in
//! `Ein ∪ Eout`, communicating only over those edges.

use crate::config::Constants;
use crate::decomposition::mixing_threshold;
use crate::error::InstanceError;
use crate::graph::{brute_force_find_triangle, normalize, Edge, EdgeSubset, Graph, TriangleWitness, VertexId};
use crate::io::Annotation;
use crate::spectral::{estimate_mixing, MixingEstimate};

/// All graphs live on the id space `0..network_size`; vertices outside
/// `V̄` are isolated.
#[derive(Debug, Clone)]
pub struct SubnetworkInstance {
    network_size: usize,
    n_global: usize,
    vin: Vec<VertexId>,
    in_vin: Vec<bool>,
    ein: Graph,
    eout: Graph,
    ebar: Graph,
    vout: Vec<VertexId>,
    vbar: Vec<VertexId>,
    mixing: Option<MixingEstimate>,
}

impl SubnetworkInstance {
    /// Checks the structural invariants and promise (ii). Connectivity and
    /// mixing are checked by [`SubnetworkInstance::validate`].
    pub fn new(
        network_size: usize,
        vin: Vec<VertexId>,
        ein: Vec<Edge>,
        eout: Vec<Edge>,
    ) -> Result<Self, InstanceError> {
        let mut vin = vin;
        vin.sort_unstable();
        vin.dedup();
        if vin.is_empty() {
            return Err(InstanceError::Empty);
        }
        let mut in_vin = vec![false; network_size];
        for &v in &vin {
            in_vin[v] = true;
        }
        let ein: Vec<Edge> = ein.into_iter().map(|(u, v)| normalize(u, v)).collect();
        let eout: Vec<Edge> = eout.into_iter().map(|(u, v)| normalize(u, v)).collect();
        for &(u, v) in &ein {
            if !in_vin[u] || !in_vin[v] {
                return Err(InstanceError::EinEndpoints { u, v });
            }
        }
        for &(u, v) in &eout {
            if in_vin[u] == in_vin[v] {
                return Err(InstanceError::EoutEndpoints { u, v });
            }
        }
        let ein = Graph::from_edges_dedup(network_size, ein);
        let eout = Graph::from_edges_dedup(network_size, eout);
        for &(u, v) in eout.edges() {
            if ein.has_edge(u, v) {
                return Err(InstanceError::Overlap { u, v });
            }
        }
        for &u in &vin {
            let (deg_in, deg_out) = (ein.degree(u), eout.degree(u));
            if deg_in < deg_out {
                return Err(InstanceError::OutDegree {
                    vertex: u,
                    deg_in,
                    deg_out,
                });
            }
        }
        let ebar = Graph::from_edges_dedup(network_size, ein.edges().iter().chain(eout.edges()).copied());
        let vout: Vec<VertexId> = (0..network_size)
            .filter(|&v| !in_vin[v] && eout.degree(v) > 0)
            .collect();
        let mut vbar = vin.clone();
        vbar.extend_from_slice(&vout);
        vbar.sort_unstable();
        Ok(SubnetworkInstance {
            network_size,
            n_global: network_size,
            vin,
            in_vin,
            ein,
            eout,
            ebar,
            vout,
            vbar,
            mixing: None,
        })
    }

    /// `Gin` is the subgraph of `g` induced by the annotated `Vin`.
    pub fn from_annotation(g: &Graph, annotation: &Annotation) -> Result<Self, InstanceError> {
        let n = g.vertex_count();
        let mut in_vin = vec![false; n];
        for &v in &annotation.vin {
            if v >= n {
                return Err(InstanceError::Empty);
            }
            in_vin[v] = true;
        }
        for &(u, v) in &annotation.eout {
            if u >= n || v >= n || !g.has_edge(u, v) {
                return Err(InstanceError::EoutEndpoints { u, v });
            }
        }
        let ein: Vec<Edge> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| in_vin[u] && in_vin[v])
            .collect();
        Self::new(n, annotation.vin.clone(), ein, annotation.eout.clone())
    }

    pub fn to_annotation(&self) -> Annotation {
        Annotation {
            vin: self.vin.clone(),
            eout: self.eout.edges().to_vec(),
        }
    }

    /// `n` of the whole network; feeds every `log n` in the charges.
    pub fn with_n_global(mut self, n: usize) -> Self {
        self.n_global = n;
        self
    }

    pub fn with_mixing(mut self, mixing: MixingEstimate) -> Self {
        self.mixing = Some(mixing);
        self
    }

    /// Checks that `Gin` is connected, that `m̄ ≥ n̄/2`, and promise (i).
    /// Computes the mixing estimate if none was supplied.
    pub fn validate(&mut self, constants: &Constants) -> Result<&MixingEstimate, InstanceError> {
        let (gin, _) = self.gin_local();
        if !gin.is_connected() {
            return Err(InstanceError::Disconnected);
        }
        if 2 * self.m_bar() < self.n_bar() {
            return Err(InstanceError::TooSparse {
                m_bar: self.m_bar(),
                n_bar: self.n_bar(),
            });
        }
        if self.mixing.is_none() {
            let est = estimate_mixing(&gin, constants.walk_scale).map_err(|_| InstanceError::Disconnected)?;
            self.mixing = Some(est);
        }
        let est = self.mixing.as_ref().expect("set above");
        let threshold = mixing_threshold(self.n_global, constants.c_mix);
        if est.mixing_bound > threshold {
            return Err(InstanceError::Mixing {
                bound: est.mixing_bound,
                threshold,
            });
        }
        Ok(est)
    }

    pub fn network_size(&self) -> usize {
        self.network_size
    }

    pub fn n_global(&self) -> usize {
        self.n_global
    }

    pub fn vin(&self) -> &[VertexId] {
        &self.vin
    }

    pub fn vout(&self) -> &[VertexId] {
        &self.vout
    }

    pub fn vbar(&self) -> &[VertexId] {
        &self.vbar
    }

    pub fn in_vin(&self, v: VertexId) -> bool {
        self.in_vin[v]
    }

    pub fn ein(&self) -> &Graph {
        &self.ein
    }

    pub fn eout(&self) -> &Graph {
        &self.eout
    }

    pub fn ebar(&self) -> &Graph {
        &self.ebar
    }

    pub fn n_bar(&self) -> usize {
        self.vbar.len()
    }

    pub fn m_bar(&self) -> usize {
        self.ebar.edge_count()
    }

    pub fn deg_in(&self, u: VertexId) -> usize {
        self.ein.degree(u)
    }

    pub fn deg_out(&self, u: VertexId) -> usize {
        self.eout.degree(u)
    }

    pub fn mixing(&self) -> Option<&MixingEstimate> {
        self.mixing.as_ref()
    }

    /// `Gin` relabelled to `0..|Vin|`, with the map back to ids.
    pub fn gin_local(&self) -> (Graph, Vec<VertexId>) {
        self.ein.induced(&self.vin)
    }

    /// Brute-force answer restricted to `Ē`.
    pub fn oracle(&self) -> Option<TriangleWitness> {
        brute_force_find_triangle(&self.ebar, &EdgeSubset::all(&self.ebar))
    }
}

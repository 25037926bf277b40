//! Replaces every heavy vertex by a star of virtual leaves so that no
//! vertex keeps a large degree.

use std::collections::HashMap;

use crate::error::InstanceError;
use crate::graph::{normalize, Edge, TriangleWitness, VertexId};

use super::heavy::HeavySet;
use super::instance::SubnetworkInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarMapping {
    /// `host[x]` is the original vertex simulating `x`.
    pub host: Vec<VertexId>,
    /// Per heavy vertex, its leaves in round-robin order.
    pub leaves: Vec<(VertexId, Vec<VertexId>)>,
    pub leaves_per_hub: usize,
}

impl StarMapping {
    pub fn project(&self, t: &TriangleWitness) -> [VertexId; 3] {
        t.vertices.map(|x| self.host[x])
    }
}

#[derive(Debug, Clone)]
pub struct StarTransform {
    pub instance: SubnetworkInstance,
    pub mapping: StarMapping,
}

/// Each heavy `u` gets `ceil(sqrt(n̄))` leaves. Its `Ē` edges, `Ein`
/// neighbours ascending then `Eout` neighbours ascending, go to the leaves
/// round-robin. A heavy vertex of `Vin` keeps its id as the star centre,
/// joined to every leaf by an `Ein` edge; a heavy vertex of `Vout` only has
/// leaves.
pub fn star_transform(inst: &SubnetworkInstance, s: &HeavySet) -> Result<StarTransform, InstanceError> {
    let n = inst.network_size();
    let leaves_per_hub = (inst.n_bar() as f64).sqrt().ceil() as usize;
    let mut host: Vec<VertexId> = (0..n).collect();
    let mut leaves = Vec::with_capacity(s.len());
    let mut slot: HashMap<(VertexId, VertexId), VertexId> = HashMap::new();
    let mut vin: Vec<VertexId> = inst.vin().to_vec();
    let mut ein_new: Vec<Edge> = Vec::new();
    for &u in &s.members {
        let ids: Vec<VertexId> = (host.len()..host.len() + leaves_per_hub).collect();
        host.extend(std::iter::repeat_n(u, leaves_per_hub));
        let order = inst.ein().neighbors(u).iter().chain(inst.eout().neighbors(u));
        for (p, &w) in order.enumerate() {
            slot.insert((u, w), ids[p % leaves_per_hub]);
        }
        if inst.in_vin(u) {
            vin.extend_from_slice(&ids);
            ein_new.extend(ids.iter().map(|&l| (u, l)));
        }
        leaves.push((u, ids));
    }
    let size = host.len();
    let mut in_vin = vec![false; size];
    for &v in &vin {
        in_vin[v] = true;
    }
    let mut eout_new: Vec<Edge> = Vec::new();
    for &(a, b) in inst.ebar().edges() {
        let a2 = if s.contains(a) { slot[&(a, b)] } else { a };
        let b2 = if s.contains(b) { slot[&(b, a)] } else { b };
        let e = normalize(a2, b2);
        if in_vin[a2] && in_vin[b2] {
            ein_new.push(e);
        } else {
            eout_new.push(e);
        }
    }
    let mut out = SubnetworkInstance::new(size, vin, ein_new, eout_new)?.with_n_global(inst.n_global());
    if let Some(m) = inst.mixing() {
        out = out.with_mixing(m.clone());
    }
    Ok(StarTransform {
        instance: out,
        mapping: StarMapping {
            host,
            leaves,
            leaves_per_hub,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_triangles;
    use crate::pipeline::heavy::heavy_set;

    /// Hub 0 in Vin adjacent to 1..=k (a path), with `extra` pendant
    /// vertices hanging off vertex 1 to grow `n̄`.
    fn hub_instance(k: usize, extra: usize) -> SubnetworkInstance {
        let mut e: Vec<Edge> = (1..=k).map(|i| (0, i)).collect();
        e.extend((1..k).map(|i| (i, i + 1)));
        let n = k + 1 + extra;
        e.extend((k + 1..n).map(|x| (x - 1, x)));
        SubnetworkInstance::new(n, (0..n).collect(), e, vec![]).unwrap()
    }

    #[test]
    fn empty_set_is_identity() {
        let inst = hub_instance(4, 0);
        let s = HeavySet {
            members: vec![],
            threshold: f64::INFINITY,
            is_member: vec![false; inst.network_size()],
        };
        let t = star_transform(&inst, &s).unwrap();
        assert_eq!(t.instance.ebar().edges(), inst.ebar().edges());
        assert_eq!(t.instance.vin(), inst.vin());
    }

    #[test]
    fn round_robin_spreads_evenly() {
        // 12 hub edges over n̄ = 16 gives 4 leaves with 3 edges each.
        let inst = hub_instance(12, 3);
        assert_eq!(inst.n_bar(), 16);
        let s = heavy_set(&inst);
        assert_eq!(s.members, vec![0]);
        let t = star_transform(&inst, &s).unwrap();
        assert_eq!(t.mapping.leaves_per_hub, 4);
        for &l in &t.mapping.leaves[0].1 {
            // Three rewired edges plus the star edge.
            assert_eq!(t.instance.ebar().degree(l), 4);
        }
        assert_eq!(t.instance.ebar().degree(0), 4);
    }

    #[test]
    fn triangles_project_and_light_ones_survive() {
        // Triangle 13-14-15 avoids the hub.
        let mut e: Vec<Edge> = (1..=12).map(|i| (0, i)).collect();
        e.extend((1..12).map(|i| (i, i + 1)));
        e.extend([(12, 13), (13, 14), (14, 15), (13, 15)]);
        let inst = SubnetworkInstance::new(16, (0..16).collect(), e, vec![]).unwrap();
        let s = heavy_set(&inst);
        let t = star_transform(&inst, &s).unwrap();
        for tri in all_triangles(t.instance.ebar()) {
            let [a, b, c] = t.mapping.project(&tri);
            let g = inst.ebar();
            assert!(g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c));
        }
        assert!(t.instance.ebar().has_edge(13, 14) && t.instance.ebar().has_edge(14, 15));
        assert!(t.instance.ebar().has_edge(13, 15));
    }

    #[test]
    fn vout_hub_keeps_only_leaves() {
        // Vin is a 6-cycle; the outside vertex 6 touches every Vin vertex.
        let e: Vec<Edge> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let out: Vec<Edge> = (0..6).map(|i| (i, 6)).collect();
        let inst = SubnetworkInstance::new(7, (0..6).collect(), e, out).unwrap();
        let s = heavy_set(&inst);
        assert!(s.contains(6));
        let t = star_transform(&inst, &s).unwrap();
        assert_eq!(t.instance.ebar().degree(6), 0);
        assert!(!t.instance.vbar().contains(&6));
        assert_eq!(t.instance.m_bar(), inst.m_bar());
    }
}

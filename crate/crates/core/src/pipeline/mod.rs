//! Triangle detection over the whole network.
//!
//! Each recursion level decomposes the residual edge set, solves one
//! subnetwork instance per component (all at once, with doubled
//! bandwidth), and recurses on the edges that no instance could certify.
//! Small residual sets are gathered at a leader.
//!
//! Ledger phases are prefixed `L<level>/`. An instance is charged as
//! `heavy/...` followed by `low-degree/...`; the level where a triangle is
//! detected posts a zero-round `L<level>/detected` entry.

pub mod heavy;
pub mod instance;
pub mod lowdeg;
pub mod partition;
pub mod star;

use rayon::prelude::*;

use crate::config::{Constants, ParallelMode};
use crate::decomposition::{classify_vertices, decompose, Classification, Decomposition};
use crate::engine::{build_bfs_forest, upcast_items, EngineConfig, RoundLedger};
use crate::error::PipelineError;
use crate::graph::{has_triangle, Graph};
use crate::util::{ceil_log2, derive_seed};

pub use heavy::{heavy_set, heavy_stage, HeavyOutcome, HeavySet};
pub use instance::SubnetworkInstance;
pub use lowdeg::{checking_procedure, low_degree_stage, LowDegreeOutcome, TripleAssignment};
pub use partition::{partition_size, verify_partition_sparsity, SparsityStats, TriplePartition, VertexPartition};
pub use star::{star_transform, StarMapping, StarTransform};

/// `1 / n^3`, the per-stage failure target.
pub fn target_failure(n: usize) -> f64 {
    let n = n.max(2) as f64;
    1.0 / (n * n * n)
}

#[derive(Debug, Clone)]
pub struct SubnetworkOutcome {
    pub found: bool,
    pub heavy_set_size: usize,
    pub heavy: HeavyOutcome,
    pub low: LowDegreeOutcome,
    pub ledger: RoundLedger,
}

/// Heavy stage on the instance, then the low-degree stage on its star
/// transform. `inst` must have passed [`SubnetworkInstance::validate`].
pub fn find_triangle_in_subnetwork(
    inst: &SubnetworkInstance,
    constants: &Constants,
    seed: u64,
    cfg: &EngineConfig,
) -> Result<SubnetworkOutcome, PipelineError> {
    let fail = target_failure(inst.n_global());
    let s = heavy_set(inst);
    let heavy = heavy_stage(inst, &s, constants, fail, derive_seed(seed, &[0x6865]), cfg)?;
    let star = star_transform(inst, &s)?;
    let low = low_degree_stage(&star.instance, constants, fail, derive_seed(seed, &[0x6c6f]), cfg)?;
    let mut ledger = RoundLedger::with_multiplier(cfg.multiplier as u32);
    ledger.absorb("", heavy.ledger.clone());
    ledger.absorb("low-degree", low.ledger.clone());
    Ok(SubnetworkOutcome {
        found: heavy.found || low.found,
        heavy_set_size: s.len(),
        heavy,
        low,
        ledger,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub level: usize,
    pub edges: usize,
    pub components: usize,
    pub instances: usize,
    pub inter_edges: usize,
    pub residual_edges: usize,
    pub base_case: bool,
}

#[derive(Debug, Clone)]
pub struct TriangleOutcome {
    pub found: bool,
    pub detection_level: Option<usize>,
    pub levels: Vec<LevelStats>,
    pub ledger: RoundLedger,
}

/// Decides whether `g` contains a triangle.
pub fn find_triangle(g: &Graph, constants: &Constants, seed: u64) -> Result<TriangleOutcome, PipelineError> {
    let n = g.vertex_count();
    let mut ledger = RoundLedger::new();
    let mut levels = Vec::new();
    let max_levels = 2 * ceil_log2(g.edge_count().max(2)) as usize + 8;
    let multiplier = match constants.parallel_mode {
        ParallelMode::DoubledBandwidth => 2,
        ParallelMode::Serialized => 1,
    };
    let base_limit = constants.c_base * (n.max(2) as f64).log2();
    let mut current = g.clone();
    for level in 1..=max_levels {
        let m = current.edge_count();
        if m == 0 {
            return Ok(TriangleOutcome {
                found: false,
                detection_level: None,
                levels,
                ledger,
            });
        }
        if m as f64 <= base_limit {
            let found = base_case(&current, constants, &mut ledger, level)?;
            levels.push(LevelStats {
                level,
                edges: m,
                components: 0,
                instances: 0,
                inter_edges: 0,
                residual_edges: 0,
                base_case: true,
            });
            if found {
                ledger.simulated(format!("L{level}/detected"), 0);
            }
            return Ok(TriangleOutcome {
                found,
                detection_level: found.then_some(level),
                levels,
                ledger,
            });
        }
        let (d, dec_ledger) = decompose(&current, constants)?;
        ledger.absorb(&format!("L{level}"), dec_ledger);
        let c = classify_vertices(&current, &d);
        let instances = level_instances(&current, &d, &c, constants)?;
        let cfg = EngineConfig::for_network(n, constants.c_b).with_multiplier(multiplier);
        let results: Vec<(usize, SubnetworkOutcome)> = instances
            .par_iter()
            .map(|(i, inst)| {
                let s = derive_seed(seed, &[level as u64, *i as u64]);
                find_triangle_in_subnetwork(inst, constants, s, &cfg).map(|o| (*i, o))
            })
            .collect::<Result<_, _>>()?;
        let found = results.iter().any(|(_, o)| o.found);
        let children = results.into_iter().map(|(i, o)| (format!("C{i}"), o.ledger)).collect();
        ledger.merge_parallel(&format!("L{level}/subnetworks"), children, constants.parallel_mode);
        levels.push(LevelStats {
            level,
            edges: m,
            components: d.component_count(),
            instances: instances.len(),
            inter_edges: d.inter_edges.len(),
            residual_edges: c.new_edges.len(),
            base_case: false,
        });
        if found {
            ledger.simulated(format!("L{level}/detected"), 0);
            return Ok(TriangleOutcome {
                found: true,
                detection_level: Some(level),
                levels,
                ledger,
            });
        }
        current = Graph::from_edges(n, c.new_edges).expect("residual edges are edges of g");
    }
    Err(PipelineError::RecursionDepth(max_levels))
}

/// One validated instance per component with at least one internal edge:
/// `Gin = G_i` and `Eout = E^inter_i`. Paired with the component index.
pub fn level_instances(
    g: &Graph,
    d: &Decomposition,
    c: &Classification,
    constants: &Constants,
) -> Result<Vec<(usize, SubnetworkInstance)>, PipelineError> {
    let n = g.vertex_count();
    let mut instances = Vec::new();
    for i in 0..d.component_count() {
        let ein = d.intra_edges(g, i);
        if ein.is_empty() {
            continue;
        }
        let mut inst = SubnetworkInstance::new(n, d.components[i].clone(), ein, c.inter_i[i].clone())?
            .with_n_global(n)
            .with_mixing(d.estimates[i].clone());
        inst.validate(constants)?;
        instances.push((i, inst));
    }
    Ok(instances)
}

/// Every component of the residual graph gathers its edges at its smallest
/// vertex and decides locally.
fn base_case(g: &Graph, constants: &Constants, ledger: &mut RoundLedger, level: usize) -> Result<bool, PipelineError> {
    let n = g.vertex_count();
    let roots: Vec<usize> = g
        .components()
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| c[0])
        .collect();
    let cfg = EngineConfig::for_network(n, constants.c_b);
    let (tree, bfs) = build_bfs_forest(g, &roots, &cfg)?;
    ledger.absorb(&format!("L{level}/base"), bfs);
    let mut items = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        items[u].push((u * n + v) as u64);
    }
    let (gathered, up) = upcast_items(g, &tree, items, &cfg)?;
    ledger.absorb(&format!("L{level}/base"), up);
    Ok(gathered.into_iter().any(|(_, codes)| {
        let edges = codes.iter().map(|&c| ((c as usize) / n, (c as usize) % n));
        has_triangle(&Graph::from_edges_dedup(n, edges))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, generate_planted, GeneratorSpec};
    use crate::graph::named::{complete, cycle};

    #[test]
    fn small_graphs_use_the_base_case() {
        let c = Constants::default();
        let out = find_triangle(&complete(3), &c, 1).unwrap();
        assert!(out.found);
        assert!(out.levels[0].base_case);
        assert!(out.ledger.total_with_prefix("L1/base") > 0);
        let out = find_triangle(&cycle(5), &c, 1).unwrap();
        assert!(!out.found);
    }

    #[test]
    fn triangle_free_is_false() {
        let g = generate(&GeneratorSpec::TriangleFree { p: 0.1 }, 120, 3).unwrap();
        let out = find_triangle(&g, &Constants::default(), 3).unwrap();
        assert!(!out.found);
    }

    #[test]
    fn planted_is_true() {
        let (g, _) = generate_planted(120, 0.08, 5).unwrap();
        let out = find_triangle(&g, &Constants::default(), 5).unwrap();
        assert!(out.found);
        assert!(out.ledger.entries().iter().any(|e| e.phase.ends_with("/detected")));
    }

    #[test]
    fn subnetwork_with_vout_vertex() {
        // Edge 0-1 in a 6-cycle Gin; vertex 6 outside, attached to 0 and 1.
        let e: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let mut inst = SubnetworkInstance::new(7, (0..6).collect(), e, vec![(0, 6), (1, 6)]).unwrap();
        let c = Constants::default();
        inst.validate(&c).unwrap();
        assert!(inst.oracle().is_some());
        let cfg = EngineConfig::for_network(7, c.c_b);
        let out = find_triangle_in_subnetwork(&inst, &c, 2, &cfg).unwrap();
        assert!(out.found);
    }

    #[test]
    fn triangle_outside_ebar_is_ignored() {
        // Gin is the 6-cycle; the triangle 6-7-8 is in G but not in Ē.
        let e: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let mut inst = SubnetworkInstance::new(9, (0..6).collect(), e, vec![(0, 6)]).unwrap();
        let c = Constants::default();
        inst.validate(&c).unwrap();
        assert!(inst.oracle().is_none());
        let cfg = EngineConfig::for_network(9, c.c_b);
        let out = find_triangle_in_subnetwork(&inst, &c, 2, &cfg).unwrap();
        assert!(!out.found);
    }
}

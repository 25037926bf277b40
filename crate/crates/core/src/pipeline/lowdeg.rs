//! Triangle search for instances without heavy vertices: a random vertex
//! partition, slices of cell triples, and a search over slices whose oracle
//! is the distributed checking procedure.

use std::ops::Range;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::config::{Constants, RouteMode};
use crate::engine::{broadcast_and_convergecast, build_bfs_forest, BfsTree, EngineConfig, MessageUnit, RoundLedger};
use crate::error::{EngineError, PipelineError};
use crate::graph::{all_triangles, Edge, Graph, VertexId};
use crate::ids::{assign_ids, IdAssignment};
use crate::routing::{validate_load, Router, RoutingRequest};
use crate::search::{grover_search, SearchProblem};
use crate::util::{ceil_log2, derive_seed};

use super::instance::SubnetworkInstance;
use super::partition::{partition_size, verify_partition_sparsity, SparsityStats, TriplePartition, VertexPartition};

/// Per-vertex shares of every slice, contiguous in lexicographic order and
/// in increasing id order.
#[derive(Debug, Clone)]
pub struct TripleAssignment {
    pub ids: IdAssignment,
    pub t: usize,
    /// `r_u = 2^{d(γ(u))} / (m̄ / n̄)`, 0 outside `Vin`.
    pub r: Vec<f64>,
    pub q: Vec<u64>,
    /// `start[g]` is the sum of `q` over ids `1..=g`.
    pub start: Vec<u64>,
}

impl TripleAssignment {
    /// Uses only `d(γ(u))`, which every vertex can evaluate for every id.
    pub fn new(ids: IdAssignment, t: usize, n_bar: usize, m_bar: usize, network_size: usize) -> Self {
        let density = m_bar as f64 / n_bar as f64;
        let mut r = vec![0.0; network_size];
        let mut q = vec![0; network_size];
        let mut start = Vec::with_capacity(ids.len() + 1);
        start.push(0u64);
        for g in 1..=ids.len() {
            let u = ids.vertex_of(g);
            let ru = f64::powi(2.0, ids.d(g) as i32) / density;
            let qu = if ru <= 0.25 { 0 } else { ru.ceil() as u64 };
            r[u] = ru;
            q[u] = qu;
            start.push(start[g - 1] + qu);
        }
        TripleAssignment { ids, t, r, q, start }
    }

    pub fn sum_q(&self) -> u64 {
        *self.start.last().unwrap_or(&0)
    }

    pub fn sum_r(&self) -> f64 {
        self.r.iter().sum()
    }

    pub fn quota_holds(&self) -> bool {
        self.sum_q() >= (self.t * self.t) as u64
    }

    /// Owner of slice position `index < t^2`.
    pub fn owner_of(&self, index: usize) -> VertexId {
        let g = self.start.partition_point(|&s| s <= index as u64);
        self.ids.vertex_of(g)
    }

    /// Slice positions owned by `v`, clipped to `t^2`.
    pub fn owned(&self, v: VertexId) -> Range<usize> {
        let g = self.ids.gamma[v];
        if g == 0 {
            return 0..0;
        }
        let cap = (self.t * self.t) as u64;
        let lo = self.start[g - 1].min(cap) as usize;
        let hi = self.start[g].min(cap) as usize;
        lo..hi
    }
}

/// Everything the checking procedure needs besides `ℓ`.
pub struct CheckSetup<'a> {
    pub inst: &'a SubnetworkInstance,
    pub partition: &'a VertexPartition,
    pub triples: TriplePartition,
    pub assignment: &'a TripleAssignment,
    pub tree: &'a BfsTree,
    /// Owner of every `Ē` edge, in `ebar().edges()` order.
    pub edge_owner: Vec<VertexId>,
    pub cfg: EngineConfig,
    pub mode: RouteMode,
}

/// The `Vin` endpoint with the smaller id; `Eout` edges have only one.
pub fn edge_owners(inst: &SubnetworkInstance, ids: &IdAssignment) -> Vec<VertexId> {
    inst.ebar()
        .edges()
        .iter()
        .map(|&(x, y)| match (inst.in_vin(x), inst.in_vin(y)) {
            (true, true) => {
                if ids.gamma[x] < ids.gamma[y] {
                    x
                } else {
                    y
                }
            }
            (true, false) => x,
            (false, true) => y,
            (false, false) => unreachable!("Ē edge outside Vin"),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub marked: bool,
    /// Broadcast, convergecast and routing; excludes router preprocessing.
    pub ledger: RoundLedger,
    pub requests: usize,
    /// Most distinct triple owners needing one edge.
    pub max_owners_per_edge: usize,
    /// Each (edge, coordinate pair, orientation) slot resolves to exactly
    /// one member of the slice.
    pub slots_unique: bool,
    /// The full request set passed `validate_load` on the first try.
    pub load_accepted: bool,
    pub load_ratio: f64,
    pub batches: usize,
}

impl CheckOutcome {
    pub fn rounds(&self) -> u64 {
        self.ledger.total()
    }
}

/// Slice members needing the edge between cells `a` and `b`; one per
/// (coordinate pair, orientation).
fn needing(tp: &TriplePartition, a: usize, b: usize, l: usize) -> [usize; 6] {
    [
        tp.index_of(a, b),
        tp.index_of(b, a),
        tp.index_of(a, tp.j_of(a, b, l)),
        tp.index_of(b, tp.j_of(b, a, l)),
        tp.index_of(tp.i_of(a, b, l), a),
        tp.index_of(tp.i_of(b, a, l), b),
    ]
}

/// Packs requests first-fit into batches that each pass the load check.
fn batch_requests(requests: Vec<RoutingRequest>, network: &Graph, c_load: f64) -> Vec<Vec<RoutingRequest>> {
    let n = network.vertex_count();
    let cap: Vec<usize> = (0..n)
        .map(|v| ((c_load * network.degree(v) as f64).floor() as usize).max(1))
        .collect();
    let mut src_used: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dst_used: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut src_first = vec![0usize; n];
    let mut dst_first = vec![0usize; n];
    let mut batches: Vec<Vec<RoutingRequest>> = Vec::new();
    for req in requests {
        let (s, d) = (req.source, req.destination);
        let mut b = src_first[s].max(dst_first[d]);
        loop {
            let su = src_used[s].get(b).copied().unwrap_or(0);
            let du = dst_used[d].get(b).copied().unwrap_or(0);
            if su < cap[s] && du < cap[d] {
                break;
            }
            b += 1;
        }
        for used in [&mut src_used[s], &mut dst_used[d]] {
            if used.len() <= b {
                used.resize(b + 1, 0);
            }
            used[b] += 1;
        }
        while src_used[s].get(src_first[s]).is_some_and(|&c| c >= cap[s]) {
            src_first[s] += 1;
        }
        while dst_used[d].get(dst_first[d]).is_some_and(|&c| c >= cap[d]) {
            dst_first[d] += 1;
        }
        if batches.len() <= b {
            batches.resize_with(b + 1, Vec::new);
        }
        batches[b].push(req);
    }
    batches
}

/// `f(ℓ)`: broadcast `ℓ`, ship every needed edge from its owner to each
/// triple owner needing it, let owners look for a triangle with one vertex
/// per cell of an owned triple, and OR the answers back to the leader.
pub fn checking_procedure(
    setup: &CheckSetup<'_>,
    router: &mut Router,
    constants: &Constants,
    l: usize,
    seed: u64,
) -> Result<CheckOutcome, PipelineError> {
    let inst = setup.inst;
    let tp = setup.triples;
    let cell = &setup.partition.cell;
    let n = inst.network_size();
    let edges = inst.ebar().edges();
    let mut gathered: Vec<Vec<Edge>> = vec![Vec::new(); n];
    let mut requests = Vec::new();
    let mut max_owners = 0;
    let mut slots_unique = true;
    for (e, &(x, y)) in edges.iter().enumerate() {
        let (a, b) = (cell[x], cell[y]);
        let mut owners: SmallVec<[VertexId; 6]> = SmallVec::new();
        for idx in needing(&tp, a, b, l) {
            let (i, j, k) = tp.triple_at(idx, l);
            let covers = [(i, j), (j, i), (i, k), (k, i), (j, k), (k, j)].contains(&(a, b));
            slots_unique &= covers;
            let o = setup.assignment.owner_of(idx);
            if !owners.contains(&o) {
                owners.push(o);
            }
        }
        max_owners = max_owners.max(owners.len());
        let src = setup.edge_owner[e];
        for &o in &owners {
            if o == src {
                gathered[o].push((x, y));
            } else {
                requests.push(RoutingRequest {
                    source: src,
                    destination: o,
                    payload: MessageUnit::from_u64((x * n + y) as u64, 64),
                });
            }
        }
    }
    let mut ledger = RoundLedger::with_multiplier(setup.cfg.multiplier as u32);
    let request_count = requests.len();
    let (load_accepted, load_ratio) = match validate_load(&requests, router.network(), constants.c_load) {
        Ok(p) => (true, p.max_ratio()),
        Err(_) => {
            let p = crate::routing::tally(&requests, router.network())?;
            (false, p.max_ratio())
        }
    };
    let batches = if load_accepted {
        vec![requests]
    } else {
        batch_requests(requests, router.network(), constants.c_load)
    };
    let batch_count = batches.iter().filter(|b| !b.is_empty()).count();
    for (bi, batch) in batches.into_iter().enumerate() {
        if batch.is_empty() {
            continue;
        }
        let (delivered, route_ledger) = router.route(&batch, setup.mode, derive_seed(seed, &[l as u64, bi as u64]))?;
        for d in delivered {
            let code = d.payload.as_u64() as usize;
            gathered[d.destination].push((code / n, code % n));
        }
        ledger.absorb("check", route_ledger);
    }
    let found: Vec<u64> = gathered
        .par_iter()
        .enumerate()
        .map(|(o, es)| {
            if es.is_empty() {
                return 0;
            }
            owner_finds(o, es, cell, &tp, setup.assignment, l) as u64
        })
        .collect();
    let (seen, any, cast) =
        broadcast_and_convergecast(inst.ein(), setup.tree, l as u64, &found, |a, b| a | b, &setup.cfg)?;
    debug_assert!(setup.tree.members().all(|v| seen[v] == Some(l as u64)));
    ledger.absorb("check", cast);
    Ok(CheckOutcome {
        marked: any == 1,
        ledger,
        requests: request_count,
        max_owners_per_edge: max_owners,
        slots_unique,
        load_accepted,
        load_ratio,
        batches: batch_count,
    })
}

/// Local check at owner `o` over the edges it holds.
fn owner_finds(
    o: VertexId,
    edges: &[Edge],
    cell: &[usize],
    tp: &TriplePartition,
    assignment: &TripleAssignment,
    l: usize,
) -> bool {
    let mut verts: Vec<VertexId> = edges.iter().flat_map(|&(x, y)| [x, y]).collect();
    verts.sort_unstable();
    verts.dedup();
    let local = |v: VertexId| verts.binary_search(&v).expect("endpoint listed");
    let g = Graph::from_edges_dedup(verts.len(), edges.iter().map(|&(x, y)| (local(x), local(y))));
    let owned = assignment.owned(o);
    all_triangles(&g).into_iter().any(|t| {
        let c = t.vertices.map(|v| cell[verts[v]]);
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        PERMS.iter().any(|p| {
            let (i, j, k) = (c[p[0]], c[p[1]], c[p[2]]);
            k == tp.k_of(i, j, l) && owned.contains(&tp.index_of(i, j))
        })
    })
}

#[derive(Debug, Clone)]
pub struct LowDegreeDiagnostics {
    pub t: usize,
    pub n_bar: usize,
    pub m_bar: usize,
    pub sum_q: u64,
    pub sum_r: f64,
    pub sparsity: SparsityStats,
    pub partition_attempts: usize,
    /// Largest `Ē` degree and the `2 m̄ / sqrt(n̄)` limit.
    pub max_degree: usize,
    pub degree_limit: f64,
    pub checks: Vec<CheckOutcome>,
    pub marked: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LowDegreeOutcome {
    pub found: bool,
    pub slice: Option<usize>,
    pub ledger: RoundLedger,
    pub diagnostics: LowDegreeDiagnostics,
}

/// Runs the stage on an instance whose heavy vertices were already
/// replaced. `cfg` carries the bandwidth multiplier of the caller.
pub fn low_degree_stage(
    inst: &SubnetworkInstance,
    constants: &Constants,
    target_failure: f64,
    seed: u64,
    cfg: &EngineConfig,
) -> Result<LowDegreeOutcome, PipelineError> {
    let n_bar = inst.n_bar();
    let m_bar = inst.m_bar();
    let t = partition_size(n_bar, constants.c_t);
    let mixing = inst
        .mixing()
        .cloned()
        .ok_or(PipelineError::Instance(crate::error::InstanceError::Disconnected))?;
    let mut ledger = RoundLedger::with_multiplier(cfg.multiplier as u32);
    let raw_t = (n_bar.max(2) as f64).sqrt() / (constants.c_t * (n_bar.max(2) as f64).log2());
    if raw_t < 1.0 {
        ledger.note(format!("t clamped to 1 (sqrt(n_bar) / (c_t log2 n_bar) = {raw_t:.3})"));
    }

    let (ids, id_ledger) = assign_ids(inst.ein(), inst.vin(), inst.ein(), constants)?;
    ledger.absorb("", id_ledger);
    let leader = ids.vertex_of(1);
    let (tree, bfs_ledger) = build_bfs_forest(inst.ein(), &[leader], cfg)?;
    if let Some(&v) = inst.vin().iter().find(|&&v| tree.depth[v].is_none()) {
        return Err(EngineError::Disconnected {
            root: leader,
            unreached: v,
        }
        .into());
    }
    ledger.absorb("leader-bfs", bfs_ledger);

    let attempts = ceil_log2(inst.n_global()).max(1) as usize;
    let mut partition = None;
    let mut used = 0;
    for a in 0..attempts {
        used = a + 1;
        let p = VertexPartition::random(
            inst.vbar(),
            inst.network_size(),
            t,
            derive_seed(seed, &[0x7061_7274, a as u64]),
        );
        ledger.contract("partition/announce", 1.0, "one round to tell neighbours the cell", &[]);
        let stats = verify_partition_sparsity(&p, inst.ebar(), n_bar, &constants.sampling);
        let ok = stats.passes();
        partition = Some((p, stats));
        if ok {
            break;
        }
    }
    let (partition, sparsity) = partition.expect("at least one attempt");
    if !sparsity.passes() {
        ledger.note(format!(
            "partition sparsity failed after {used} attempts: max pair {} > {:.1}",
            sparsity.max_pair, sparsity.bound
        ));
    }

    let assignment = TripleAssignment::new(ids, t, n_bar, m_bar, inst.network_size());
    if !assignment.quota_holds() {
        return Err(PipelineError::QuotaShortfall {
            sum: assignment.sum_q(),
            needed: (t * t) as u64,
        });
    }
    let edge_owner = edge_owners(inst, &assignment.ids);
    let setup = CheckSetup {
        inst,
        partition: &partition,
        triples: TriplePartition::new(t),
        assignment: &assignment,
        tree: &tree,
        edge_owner,
        cfg: *cfg,
        mode: constants.route_mode,
    };
    let mut router =
        Router::new(inst.ein().clone(), mixing, inst.n_global(), constants).with_multiplier(cfg.multiplier);
    ledger.absorb("", router.preprocess());
    let checks: Vec<CheckOutcome> = (1..=t)
        .into_par_iter()
        .map(|l| {
            let mut r = router.clone();
            checking_procedure(
                &setup,
                &mut r,
                constants,
                l,
                derive_seed(seed, &[0x0063_686b, l as u64]),
            )
        })
        .collect::<Result<_, _>>()?;
    let marked: Vec<usize> = (1..=t).filter(|&l| checks[l - 1].marked).collect();
    let delta = checks.iter().map(CheckOutcome::rounds).max().unwrap_or(0);
    for c in &checks {
        for note in c.ledger.notes() {
            ledger.note(note.clone());
        }
    }
    let oracle = |x: u64| checks[x as usize].marked;
    let problem = SearchProblem {
        domain: t as u64,
        oracle: &oracle,
        oracle_rounds: delta as f64,
        target_failure,
    };
    let search = grover_search(&problem, constants, derive_seed(seed, &[0x7365_6172]), "search");
    ledger.absorb("", search.ledger);
    let slice = search.found.map(|x| x as usize + 1);
    let max_degree = inst.vbar().iter().map(|&v| inst.ebar().degree(v)).max().unwrap_or(0);
    Ok(LowDegreeOutcome {
        found: slice.is_some(),
        slice,
        ledger,
        diagnostics: LowDegreeDiagnostics {
            t,
            n_bar,
            m_bar,
            sum_q: assignment.sum_q(),
            sum_r: assignment.sum_r(),
            sparsity,
            partition_attempts: used,
            max_degree,
            degree_limit: 2.0 * m_bar as f64 / (n_bar as f64).sqrt(),
            checks,
            marked,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorSpec};
    use crate::graph::named::cycle;

    fn prepared(g: &Graph) -> SubnetworkInstance {
        let mut inst = SubnetworkInstance::new(
            g.vertex_count(),
            (0..g.vertex_count()).collect(),
            g.edges().to_vec(),
            vec![],
        )
        .unwrap();
        inst.validate(&Constants::default()).unwrap();
        inst
    }

    fn cfg(inst: &SubnetworkInstance) -> EngineConfig {
        EngineConfig::for_network(inst.n_global(), 2.0)
    }

    #[test]
    fn owners_partition_each_slice() {
        let g = generate(&GeneratorSpec::Regular { degree: 6 }, 400, 1).unwrap();
        let inst = prepared(&g);
        let c = Constants::default();
        let (ids, _) = assign_ids(inst.ein(), inst.vin(), inst.ein(), &c).unwrap();
        let t = partition_size(inst.n_bar(), 1.0);
        let a = TripleAssignment::new(ids, t, inst.n_bar(), inst.m_bar(), inst.network_size());
        assert!(a.quota_holds());
        let mut covered = vec![0; t * t];
        for &v in inst.vin() {
            for idx in a.owned(v) {
                covered[idx] += 1;
                assert_eq!(a.owner_of(idx), v);
            }
        }
        assert!(covered.iter().all(|&c| c == 1));
    }

    #[test]
    fn triangle_free_is_never_marked() {
        let g = generate(&GeneratorSpec::BipartiteRegular { degree: 4 }, 64, 1).unwrap();
        let inst = prepared(&g);
        let out = low_degree_stage(&inst, &Constants::default(), 1e-6, 4, &cfg(&inst)).unwrap();
        assert!(!out.found);
        assert!(out.diagnostics.marked.is_empty());
        assert!(out.ledger.total_with_prefix("search") > 0);
    }

    #[test]
    fn planted_triangle_marks_its_slice() {
        let g = generate(&GeneratorSpec::Regular { degree: 4 }, 300, 2).unwrap();
        // Add a triangle on vertices that are not yet adjacent.
        let mut edges = g.edges().to_vec();
        let (a, b, c) = (0, 150, 299);
        for e in [(a, b), (b, c), (a, c)] {
            if !g.has_edge(e.0, e.1) {
                edges.push(e);
            }
        }
        let g = Graph::from_edges(300, edges).unwrap();
        let inst = prepared(&g);
        let out = low_degree_stage(&inst, &Constants::default(), 1e-9, 9, &cfg(&inst)).unwrap();
        let d = &out.diagnostics;
        assert!(d.t >= 2);
        assert!(!d.marked.is_empty());
        assert!(out.found);
        assert!(d.marked.contains(&out.slice.unwrap()));
        for check in &d.checks {
            assert!(check.slots_unique);
        }
    }

    #[test]
    fn batches_respect_load() {
        let g = cycle(6);
        let reqs: Vec<RoutingRequest> = (0..30)
            .map(|i| RoutingRequest {
                source: i % 2,
                destination: 3,
                payload: MessageUnit::from_u64(i as u64, 16),
            })
            .collect();
        let batches = batch_requests(reqs, &g, 1.0);
        assert_eq!(batches.iter().map(Vec::len).sum::<usize>(), 30);
        for b in &batches {
            assert!(validate_load(b, &g, 1.0).is_ok());
        }
        assert_eq!(batches.len(), 15);
    }
}

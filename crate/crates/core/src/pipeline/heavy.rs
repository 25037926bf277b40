//! Triangles through high-degree vertices, found by set disjointness on
//! every edge.

use rayon::prelude::*;

use crate::config::Constants;
use crate::engine::{run_lockstep, EngineConfig, Inbox, RoundCtx, RoundLedger, Status, VertexProcess};
use crate::error::EngineError;
use crate::graph::{Edge, VertexId};
use crate::search::distributed_disjointness;
use crate::util::derive_seed;

use super::instance::SubnetworkInstance;

#[derive(Debug, Clone, PartialEq)]
pub struct HeavySet {
    /// Sorted.
    pub members: Vec<VertexId>,
    /// `m̄ / sqrt(n̄)`.
    pub threshold: f64,
    pub is_member: Vec<bool>,
}

impl HeavySet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.is_member[v]
    }

    /// `|S| <= 2 sqrt(n̄)`.
    pub fn bound_holds(&self, n_bar: usize) -> bool {
        (self.len() as f64) <= 2.0 * (n_bar as f64).sqrt()
    }
}

/// Vertices of `V̄` with `deg_Ē(u) >= m̄ / sqrt(n̄)`.
pub fn heavy_set(inst: &SubnetworkInstance) -> HeavySet {
    let ebar = inst.ebar();
    let threshold = inst.m_bar() as f64 / (inst.n_bar().max(1) as f64).sqrt();
    let mut is_member = vec![false; inst.network_size()];
    let members: Vec<VertexId> = inst
        .vbar()
        .iter()
        .copied()
        .filter(|&u| ebar.degree(u) as f64 >= threshold)
        .collect();
    for &u in &members {
        is_member[u] = true;
    }
    HeavySet {
        members,
        threshold,
        is_member,
    }
}

#[derive(Debug, Clone)]
pub struct HeavyOutcome {
    pub found: bool,
    /// An edge whose endpoints share a heavy neighbour, and that neighbour.
    pub witness: Option<(Edge, VertexId)>,
    pub ledger: RoundLedger,
    /// Largest `|T_u|` over `V̄`.
    pub max_t: usize,
    /// Largest simulated disjointness search charge over all edges.
    pub max_search_rounds: u64,
}

struct Announce {
    heavy: bool,
    heavy_neighbors: Vec<VertexId>,
}

impl VertexProcess for Announce {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        for &w in ctx.neighbors() {
            ctx.send_value(w, self.heavy as u64);
        }
        Status::Halt
    }

    fn absorb(&mut self, inbox: &Inbox) {
        for (from, msg) in inbox {
            if msg.as_u64() == 1 {
                self.heavy_neighbors.push(*from);
            }
        }
    }
}

/// One round in which every vertex tells its neighbours whether it is
/// heavy; then every `Ē` edge `{u, v}` runs disjointness on
/// `T_u = N(u) ∩ S` and `T_v`. Edges are disjoint links, so the stage costs
/// the slowest edge.
pub fn heavy_stage(
    inst: &SubnetworkInstance,
    s: &HeavySet,
    constants: &Constants,
    target_failure: f64,
    seed: u64,
    cfg: &EngineConfig,
) -> Result<HeavyOutcome, EngineError> {
    let ebar = inst.ebar();
    let procs: Vec<Announce> = (0..inst.network_size())
        .map(|v| Announce {
            heavy: s.contains(v),
            heavy_neighbors: Vec::new(),
        })
        .collect();
    let (procs, announce, _) = run_lockstep(ebar, procs, 4, cfg, "heavy/announce")?;
    let sets: Vec<Vec<u64>> = procs
        .into_iter()
        .map(|p| {
            let mut t: Vec<u64> = p.heavy_neighbors.into_iter().map(|v| v as u64).collect();
            t.sort_unstable();
            t
        })
        .collect();
    let mut ledger = RoundLedger::with_multiplier(cfg.multiplier as u32);
    ledger.absorb("", announce);
    let max_t = sets.iter().map(Vec::len).max().unwrap_or(0);
    let results: Vec<_> = ebar
        .edges()
        .par_iter()
        .map(|&(u, v)| {
            let out = distributed_disjointness(
                &sets[u],
                &sets[v],
                constants,
                target_failure,
                derive_seed(seed, &[u as u64, v as u64]),
            );
            ((u, v), out)
        })
        .collect();
    let mut witness = None;
    let mut slowest: Option<RoundLedger> = None;
    let mut max_search_rounds = 0;
    for ((u, v), out) in results {
        if out.intersects && witness.is_none() {
            witness = Some((
                (u, v),
                out.witness.expect("intersecting sets have a witness") as VertexId,
            ));
        }
        max_search_rounds = max_search_rounds.max(out.search_rounds);
        if slowest.as_ref().is_none_or(|b| out.ledger.total() > b.total()) {
            slowest = Some(out.ledger);
        }
    }
    if let Some(l) = slowest {
        ledger.absorb("heavy", l);
    }
    Ok(HeavyOutcome {
        found: witness.is_some(),
        witness,
        ledger,
        max_t,
        max_search_rounds,
    })
}

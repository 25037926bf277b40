use std::collections::VecDeque;

use super::{run_lockstep, EngineConfig, Inbox, RoundCtx, RoundLedger, Status, VertexProcess};
use crate::error::EngineError;
use crate::graph::{Graph, VertexId};

/// BFS forest: one tree per root. Non-members (vertices outside every
/// root's component) have neither parent nor depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub roots: Vec<VertexId>,
    pub parent: Vec<Option<VertexId>>,
    pub depth: Vec<Option<usize>>,
    pub children: Vec<Vec<VertexId>>,
    pub max_depth: usize,
}

impl BfsTree {
    pub fn root(&self) -> VertexId {
        self.roots[0]
    }

    pub fn members(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.depth.len()).filter(|&v| self.depth[v].is_some())
    }

    /// Root of the tree containing `v`.
    pub fn root_of(&self, mut v: VertexId) -> Option<VertexId> {
        self.depth[v]?;
        while let Some(p) = self.parent[v] {
            v = p;
        }
        Some(v)
    }
}

const EXPLORE: u64 = 1;
const ACK: u64 = 2;

struct BfsProcess {
    is_root: bool,
    parent: Option<VertexId>,
    depth: Option<usize>,
    children: Vec<VertexId>,
}

impl BfsProcess {
    fn collect_acks(&mut self, inbox: &Inbox) {
        for (from, m) in inbox {
            if m.as_u64() == ACK {
                self.children.push(*from);
            }
        }
    }
}

impl VertexProcess for BfsProcess {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        if self.is_root {
            self.depth = Some(0);
            for &w in ctx.neighbors() {
                ctx.send_value(w, EXPLORE);
            }
            return Status::Halt;
        }
        let explorers: Vec<VertexId> = ctx
            .inbox()
            .iter()
            .filter(|(_, m)| m.as_u64() == EXPLORE)
            .map(|(s, _)| *s)
            .collect();
        if explorers.is_empty() {
            return Status::Continue;
        }
        let parent = explorers[0];
        self.parent = Some(parent);
        self.depth = Some(ctx.round() as usize - 1);
        ctx.send_value(parent, ACK);
        for &w in ctx.neighbors() {
            if explorers.binary_search(&w).is_err() {
                ctx.send_value(w, EXPLORE);
            }
        }
        Status::Halt
    }

    fn absorb(&mut self, inbox: &Inbox) {
        self.collect_acks(inbox);
    }
}

/// Lockstep BFS from `root`. The parent is the smallest-id vertex heard from
/// first; children learn nothing, parents learn their children from acks.
pub fn build_bfs_tree(g: &Graph, root: VertexId, cfg: &EngineConfig) -> Result<(BfsTree, RoundLedger), EngineError> {
    let dist = g.bfs_distances(root);
    if let Some(u) = dist.iter().position(Option::is_none) {
        return Err(EngineError::Disconnected { root, unreached: u });
    }
    build_bfs_forest(g, &[root], cfg)
}

/// Lockstep BFS from several roots at once. Each root must sit in its own
/// component; vertices in root-less components are left out.
pub fn build_bfs_forest(
    g: &Graph,
    roots: &[VertexId],
    cfg: &EngineConfig,
) -> Result<(BfsTree, RoundLedger), EngineError> {
    let n = g.vertex_count();
    let mut is_root = vec![false; n];
    for &r in roots {
        is_root[r] = true;
    }
    // Vertices that no root reaches would wait forever; they sit the run out.
    let reachable = reachable_from(g, roots);
    let procs: Vec<BfsProcess> = (0..n)
        .map(|v| BfsProcess {
            is_root: is_root[v],
            parent: None,
            depth: None,
            children: Vec::new(),
        })
        .collect();
    let sub = g.filter_edges(|(u, v)| reachable[u] && reachable[v]);
    let procs: Vec<BfsOrIdle> = procs
        .into_iter()
        .zip(&reachable)
        .map(|(p, &r)| if r { BfsOrIdle::Bfs(p) } else { BfsOrIdle::Idle })
        .collect();
    let (procs, ledger, _) = run_lockstep(&sub, procs, n as u64 + 2, cfg, "bfs-tree")?;
    let mut parent = vec![None; n];
    let mut depth = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for (v, p) in procs.into_iter().enumerate() {
        if let BfsOrIdle::Bfs(p) = p {
            parent[v] = p.parent;
            depth[v] = p.depth;
            let mut c = p.children;
            c.sort_unstable();
            children[v] = c;
        }
    }
    let max_depth = depth.iter().flatten().copied().max().unwrap_or(0);
    Ok((
        BfsTree {
            roots: roots.to_vec(),
            parent,
            depth,
            children,
            max_depth,
        },
        ledger,
    ))
}

enum BfsOrIdle {
    Bfs(BfsProcess),
    Idle,
}

impl VertexProcess for BfsOrIdle {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        match self {
            BfsOrIdle::Bfs(p) => p.on_round(ctx),
            BfsOrIdle::Idle => Status::Halt,
        }
    }
    fn absorb(&mut self, inbox: &Inbox) {
        if let BfsOrIdle::Bfs(p) = self {
            p.absorb(inbox);
        }
    }
}

fn reachable_from(g: &Graph, roots: &[VertexId]) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue: VecDeque<VertexId> = roots.iter().copied().collect();
    for &r in roots {
        seen[r] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

struct CastProcess {
    parent: Option<VertexId>,
    children: Vec<VertexId>,
    value: u64,
    broadcast: Option<u64>,
    reported: usize,
    acc: u64,
    aggregator: fn(u64, u64) -> u64,
    sent_up: bool,
}

impl VertexProcess for CastProcess {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        for (from, m) in ctx.inbox() {
            if Some(*from) == self.parent {
                self.broadcast = Some(m.as_u64());
                for &c in &self.children {
                    ctx.send_value(c, m.as_u64());
                }
            } else {
                self.acc = (self.aggregator)(self.acc, m.as_u64());
                self.reported += 1;
            }
        }
        if self.parent.is_none() && self.broadcast.is_some() && ctx.round() == 1 {
            for &c in &self.children {
                ctx.send_value(c, self.broadcast.unwrap_or(0));
            }
        }
        if self.broadcast.is_some() && self.reported == self.children.len() {
            if let Some(p) = self.parent {
                if !self.sent_up {
                    ctx.send_value(p, self.acc);
                    self.sent_up = true;
                }
            }
            return Status::Halt;
        }
        Status::Continue
    }
}

/// Root pushes `value` down the tree, then each vertex folds its own entry
/// of `values` with its children's results and reports up. Returns the
/// value every member saw and the aggregate at the root. Charges exactly
/// `2 * depth` rounds. Values must fit one message unit.
pub fn broadcast_and_convergecast(
    g: &Graph,
    tree: &BfsTree,
    value: u64,
    values: &[u64],
    aggregator: fn(u64, u64) -> u64,
    cfg: &EngineConfig,
) -> Result<(Vec<Option<u64>>, u64, RoundLedger), EngineError> {
    let n = g.vertex_count();
    let root = tree.root();
    let procs: Vec<CastOrIdle> = (0..n)
        .map(|v| {
            if tree.depth[v].is_none() {
                return CastOrIdle::Idle;
            }
            CastOrIdle::Cast(CastProcess {
                parent: tree.parent[v],
                children: tree.children[v].clone(),
                value: values[v],
                broadcast: if v == root { Some(value) } else { None },
                reported: 0,
                acc: values[v],
                aggregator,
                sent_up: false,
            })
        })
        .collect();
    let (procs, ledger, _) = run_lockstep(g, procs, 2 * n as u64 + 4, cfg, "broadcast-convergecast")?;
    let mut seen = vec![None; n];
    let mut aggregate = 0;
    for (v, p) in procs.into_iter().enumerate() {
        if let CastOrIdle::Cast(p) = p {
            debug_assert_eq!(p.value, values[v]);
            seen[v] = p.broadcast;
            if v == root {
                aggregate = p.acc;
            }
        }
    }
    Ok((seen, aggregate, ledger))
}

enum CastOrIdle {
    Cast(CastProcess),
    Idle,
}

impl VertexProcess for CastOrIdle {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        match self {
            CastOrIdle::Cast(p) => p.on_round(ctx),
            CastOrIdle::Idle => Status::Halt,
        }
    }
}

struct UpcastProcess {
    parent: Option<VertexId>,
    open_children: usize,
    queue: VecDeque<u64>,
    gathered: Vec<u64>,
    done_sent: bool,
}

/// Marker value for "subtree finished"; items are shifted by one.
const DONE: u64 = 0;

impl VertexProcess for UpcastProcess {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        for (_, m) in ctx.inbox() {
            match m.as_u64() {
                DONE => self.open_children -= 1,
                x => {
                    if self.parent.is_some() {
                        self.queue.push_back(x - 1);
                    } else {
                        self.gathered.push(x - 1);
                    }
                }
            }
        }
        let Some(p) = self.parent else {
            return if self.open_children == 0 {
                Status::Halt
            } else {
                Status::Continue
            };
        };
        if let Some(x) = self.queue.pop_front() {
            ctx.send_value(p, x + 1);
            return Status::Continue;
        }
        if self.open_children == 0 && !self.done_sent {
            ctx.send_value(p, DONE);
            self.done_sent = true;
            return Status::Halt;
        }
        Status::Continue
    }
}

/// A root and the items gathered at it.
pub type Gathered = (VertexId, Vec<u64>);

/// Pipelined gather: every member forwards `items[v]` (and everything it
/// receives) to its parent, one unit per round. Returns, per root, all items
/// of its tree. Items must be below `2^B - 1`.
pub fn upcast_items(
    g: &Graph,
    tree: &BfsTree,
    items: Vec<Vec<u64>>,
    cfg: &EngineConfig,
) -> Result<(Vec<Gathered>, RoundLedger), EngineError> {
    let n = g.vertex_count();
    let procs: Vec<UpcastOrIdle> = items
        .into_iter()
        .enumerate()
        .map(|(v, own)| {
            if tree.depth[v].is_none() {
                return UpcastOrIdle::Idle;
            }
            let is_root = tree.parent[v].is_none();
            UpcastOrIdle::Up(UpcastProcess {
                parent: tree.parent[v],
                open_children: tree.children[v].len(),
                gathered: if is_root { own.clone() } else { Vec::new() },
                queue: if is_root { VecDeque::new() } else { own.into() },
                done_sent: false,
            })
        })
        .collect();
    let total_items: u64 = procs
        .iter()
        .map(|p| match p {
            UpcastOrIdle::Up(u) => u.queue.len() as u64,
            UpcastOrIdle::Idle => 0,
        })
        .sum();
    let budget = total_items + 2 * n as u64 + 4;
    let (procs, ledger, _) = run_lockstep(g, procs, budget, cfg, "upcast")?;
    let mut out = Vec::new();
    for (v, p) in procs.into_iter().enumerate() {
        if let UpcastOrIdle::Up(u) = p {
            if u.parent.is_none() {
                let mut got = u.gathered;
                got.sort_unstable();
                out.push((v, got));
            }
        }
    }
    Ok((out, ledger))
}

enum UpcastOrIdle {
    Up(UpcastProcess),
    Idle,
}

impl VertexProcess for UpcastOrIdle {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
        match self {
            UpcastOrIdle::Up(p) => p.on_round(ctx),
            UpcastOrIdle::Idle => Status::Halt,
        }
    }
}

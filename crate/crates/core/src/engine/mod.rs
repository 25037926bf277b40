//! Synchronous message passing over a graph with per-edge bandwidth limits.
//!
//! A run proceeds in rounds `1, 2, ...`. In round `k` every live process sees
//! the messages sent to it in round `k - 1` and may send new ones; those are
//! delivered at the start of round `k + 1`. Processes that have halted still
//! receive (through [`VertexProcess::absorb`]) but no longer send. The run
//! ends once every process has halted and nothing is in flight.
//!
//! The charged round count is the last round in which any message was sent,
//! so a single exchange costs 1 and flooding a path of length `L` costs `L`.

mod ledger;
mod message;
mod tree;

pub use ledger::{join_phase, ChargeKind, LedgerEntry, RoundLedger};
pub use message::MessageUnit;
pub use tree::{broadcast_and_convergecast, build_bfs_forest, build_bfs_tree, upcast_items, BfsTree};

use rayon::prelude::*;

use crate::error::EngineError;
use crate::graph::{Graph, VertexId};
use crate::util::ceil_log2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Bits per message unit.
    pub bandwidth_bits: usize,
    /// Units allowed per directed edge per round.
    pub multiplier: usize,
}

impl EngineConfig {
    /// `B = c_b * ceil(log2 n)` bits, multiplier 1.
    pub fn for_network(n: usize, c_b: f64) -> Self {
        let bits = (c_b * ceil_log2(n.max(2)) as f64).ceil().max(1.0) as usize;
        EngineConfig {
            bandwidth_bits: bits,
            multiplier: 1,
        }
    }

    pub fn with_multiplier(mut self, multiplier: usize) -> Self {
        self.multiplier = multiplier.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Continue,
    Halt,
}

pub type Inbox = [(VertexId, MessageUnit)];

pub struct RoundCtx<'a> {
    vertex: VertexId,
    round: u64,
    neighbors: &'a [VertexId],
    inbox: &'a Inbox,
    bandwidth_bits: usize,
    outbox: Vec<(VertexId, MessageUnit)>,
}

impl<'a> RoundCtx<'a> {
    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn neighbors(&self) -> &'a [VertexId] {
        self.neighbors
    }

    /// Messages sent to this vertex in the previous round, ordered by sender.
    pub fn inbox(&self) -> &'a Inbox {
        self.inbox
    }

    pub fn bandwidth_bits(&self) -> usize {
        self.bandwidth_bits
    }

    pub fn send(&mut self, to: VertexId, msg: MessageUnit) {
        self.outbox.push((to, msg));
    }

    pub fn send_value(&mut self, to: VertexId, value: u64) {
        let msg = MessageUnit::from_u64(value, self.bandwidth_bits);
        self.outbox.push((to, msg));
    }
}

pub trait VertexProcess: Send {
    fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status;

    /// Delivery to a halted process.
    fn absorb(&mut self, _inbox: &Inbox) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunStats {
    /// Rounds charged (last round with a send).
    pub rounds: u64,
    /// Rounds stepped, including the final delivery-only round.
    pub executed: u64,
    pub units_sent: u64,
    pub messages_sent: u64,
}

/// Runs `processes[v]` at vertex `v` until all halt and no message is in
/// flight. Posts one simulated entry under `phase`.
pub fn run_lockstep<P: VertexProcess>(
    g: &Graph,
    mut processes: Vec<P>,
    max_rounds: u64,
    cfg: &EngineConfig,
    phase: &str,
) -> Result<(Vec<P>, RoundLedger, RunStats), EngineError> {
    let n = g.vertex_count();
    if processes.len() != n {
        return Err(EngineError::ProcessCount {
            expected: n,
            got: processes.len(),
        });
    }
    let mut halted = vec![false; n];
    let mut inboxes: Vec<Vec<(VertexId, MessageUnit)>> = vec![Vec::new(); n];
    let mut stats = RunStats::default();
    let mut round: u64 = 0;
    loop {
        let in_flight = inboxes.iter().any(|b| !b.is_empty());
        if halted.iter().all(|&h| h) && !in_flight {
            break;
        }
        round += 1;
        if round > max_rounds {
            return Err(EngineError::NonTermination { max_rounds });
        }
        let bits = cfg.bandwidth_bits;
        let outboxes: Vec<(Status, Vec<(VertexId, MessageUnit)>)> = processes
            .par_iter_mut()
            .zip(inboxes.par_iter())
            .zip(halted.par_iter())
            .enumerate()
            .map(|(v, ((proc_, inbox), &is_halted))| {
                if is_halted {
                    if !inbox.is_empty() {
                        proc_.absorb(inbox);
                    }
                    return (Status::Halt, Vec::new());
                }
                let mut ctx = RoundCtx {
                    vertex: v,
                    round,
                    neighbors: g.neighbors(v),
                    inbox,
                    bandwidth_bits: bits,
                    outbox: Vec::new(),
                };
                let status = proc_.on_round(&mut ctx);
                (status, ctx.outbox)
            })
            .collect();
        let mut next: Vec<Vec<(VertexId, MessageUnit)>> = vec![Vec::new(); n];
        let mut sent_any = false;
        for (v, (status, mut out)) in outboxes.into_iter().enumerate() {
            if status == Status::Halt {
                halted[v] = true;
            }
            if out.is_empty() {
                continue;
            }
            sent_any = true;
            out.sort_by_key(|(to, _)| *to);
            let mut i = 0;
            while i < out.len() {
                let to = out[i].0;
                if !g.neighbors(v).binary_search(&to).is_ok() {
                    return Err(EngineError::NotAdjacent { round, from: v, to });
                }
                let mut units = 0;
                let mut j = i;
                while j < out.len() && out[j].0 == to {
                    let msg = &out[j].1;
                    if !msg.fits(bits) {
                        return Err(EngineError::PayloadTooWide {
                            round,
                            from: v,
                            bits: msg.payload_bits(),
                            units: msg.size_units(),
                            bandwidth_bits: bits,
                        });
                    }
                    units += msg.size_units();
                    j += 1;
                }
                if units > cfg.multiplier {
                    return Err(EngineError::BandwidthViolation {
                        round,
                        from: v,
                        to,
                        units,
                        limit: cfg.multiplier,
                    });
                }
                stats.units_sent += units as u64;
                stats.messages_sent += (j - i) as u64;
                i = j;
            }
            for (to, msg) in out {
                next[to].push((v, msg));
            }
        }
        if sent_any {
            stats.rounds = round;
        }
        inboxes = next;
    }
    stats.executed = round;
    let mut ledger = RoundLedger::with_multiplier(cfg.multiplier as u32);
    ledger.simulated(phase, stats.rounds);
    Ok((processes, ledger, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::path;

    struct Exchange {
        got: Vec<u64>,
    }

    impl VertexProcess for Exchange {
        fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
            for &w in ctx.neighbors() {
                ctx.send_value(w, ctx.vertex() as u64 + 10);
            }
            Status::Halt
        }
        fn absorb(&mut self, inbox: &Inbox) {
            self.got.extend(inbox.iter().map(|(_, m)| m.as_u64()));
        }
    }

    #[test]
    fn two_vertex_exchange() {
        let g = path(2);
        let cfg = EngineConfig::for_network(2, 8.0);
        let procs = vec![Exchange { got: vec![] }, Exchange { got: vec![] }];
        let (procs, ledger, stats) = run_lockstep(&g, procs, 10, &cfg, "x").unwrap();
        assert_eq!(ledger.total(), 1);
        assert_eq!(stats.executed, 2);
        assert_eq!(procs[0].got, vec![11]);
        assert_eq!(procs[1].got, vec![10]);
    }

    struct Flood {
        has: bool,
        received_round: Option<u64>,
    }

    impl VertexProcess for Flood {
        fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
            if !self.has && !ctx.inbox().is_empty() {
                self.has = true;
                self.received_round = Some(ctx.round());
                let senders: Vec<_> = ctx.inbox().iter().map(|(s, _)| *s).collect();
                for &w in ctx.neighbors() {
                    if !senders.contains(&w) {
                        ctx.send_value(w, 1);
                    }
                }
                return Status::Halt;
            }
            if self.has {
                for &w in ctx.neighbors() {
                    ctx.send_value(w, 1);
                }
                return Status::Halt;
            }
            Status::Continue
        }
    }

    #[test]
    fn flooding_a_path() {
        for len in 1..12 {
            let g = path(len + 1);
            let cfg = EngineConfig::for_network(len + 1, 2.0);
            let procs = (0..=len)
                .map(|v| Flood {
                    has: v == 0,
                    received_round: None,
                })
                .collect();
            let (procs, ledger, _) = run_lockstep(&g, procs, 100, &cfg, "flood").unwrap();
            assert_eq!(ledger.total(), len as u64);
            assert_eq!(procs[len].received_round, Some(len as u64 + 1));
        }
    }

    #[derive(Debug)]
    struct Greedy;

    impl VertexProcess for Greedy {
        fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
            if ctx.vertex() == 0 {
                ctx.send_value(1, 1);
                ctx.send_value(1, 2);
            }
            Status::Halt
        }
    }

    #[test]
    fn bandwidth_violation_names_edge() {
        let g = path(2);
        let cfg = EngineConfig::for_network(2, 2.0);
        let err = run_lockstep(&g, vec![Greedy, Greedy], 5, &cfg, "x").unwrap_err();
        assert_eq!(
            err,
            EngineError::BandwidthViolation {
                round: 1,
                from: 0,
                to: 1,
                units: 2,
                limit: 1
            }
        );
        let doubled = cfg.with_multiplier(2);
        assert!(run_lockstep(&g, vec![Greedy, Greedy], 5, &doubled, "x").is_ok());
    }

    #[derive(Debug)]
    struct Stray;

    impl VertexProcess for Stray {
        fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
            if ctx.vertex() == 0 {
                ctx.send_value(2, 1);
            }
            Status::Halt
        }
    }

    #[test]
    fn non_neighbour_rejected() {
        let g = path(3);
        let cfg = EngineConfig::for_network(3, 2.0);
        let err = run_lockstep(&g, vec![Stray, Stray, Stray], 5, &cfg, "x").unwrap_err();
        assert!(matches!(err, EngineError::NotAdjacent { from: 0, to: 2, .. }));
    }

    #[derive(Debug)]
    struct Forever;

    impl VertexProcess for Forever {
        fn on_round(&mut self, _ctx: &mut RoundCtx<'_>) -> Status {
            Status::Continue
        }
    }

    #[test]
    fn non_termination() {
        let g = path(2);
        let cfg = EngineConfig::for_network(2, 2.0);
        let err = run_lockstep(&g, vec![Forever, Forever], 7, &cfg, "x").unwrap_err();
        assert_eq!(err, EngineError::NonTermination { max_rounds: 7 });
    }

    #[test]
    fn wide_payload_rejected() {
        #[derive(Debug)]
        struct Wide;
        impl VertexProcess for Wide {
            fn on_round(&mut self, ctx: &mut RoundCtx<'_>) -> Status {
                if ctx.vertex() == 0 {
                    ctx.send(1, MessageUnit::new(&[0xff, 0xff], 1));
                }
                Status::Halt
            }
        }
        let g = path(2);
        let cfg = EngineConfig::for_network(2, 2.0);
        let err = run_lockstep(&g, vec![Wide, Wide], 5, &cfg, "x").unwrap_err();
        assert!(matches!(err, EngineError::PayloadTooWide { bits: 16, .. }));
    }
}

use std::collections::BTreeMap;
use std::fmt;

use crate::config::ParallelMode;
use crate::error::ParseError;
use crate::util::rounds_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChargeKind {
    /// Counted by the lockstep engine.
    Simulated,
    /// Charged from a stated cost formula.
    Contract,
}

impl fmt::Display for ChargeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChargeKind::Simulated => "simulated",
            ChargeKind::Contract => "contract",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    /// `/`-separated hierarchy, e.g. `L1/sub3/heavy/disjointness`.
    pub phase: String,
    pub kind: ChargeKind,
    pub rounds: u64,
    pub formula: String,
    pub constants: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoundLedger {
    entries: Vec<LedgerEntry>,
    bandwidth_multiplier: u32,
    notes: Vec<String>,
}

impl RoundLedger {
    pub fn new() -> Self {
        RoundLedger {
            entries: Vec::new(),
            bandwidth_multiplier: 1,
            notes: Vec::new(),
        }
    }

    pub fn with_multiplier(multiplier: u32) -> Self {
        RoundLedger {
            bandwidth_multiplier: multiplier,
            ..Self::new()
        }
    }

    pub fn bandwidth_multiplier(&self) -> u32 {
        self.bandwidth_multiplier.max(1)
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn simulated(&mut self, phase: impl Into<String>, rounds: u64) {
        self.entries.push(LedgerEntry {
            phase: phase.into(),
            kind: ChargeKind::Simulated,
            rounds,
            formula: "lockstep".to_string(),
            constants: Vec::new(),
        });
    }

    /// Posts a contract charge of `ceil(value)` rounds.
    pub fn contract(
        &mut self,
        phase: impl Into<String>,
        value: f64,
        formula: impl Into<String>,
        constants: &[(&str, f64)],
    ) -> u64 {
        let rounds = rounds_from(value);
        self.entries.push(LedgerEntry {
            phase: phase.into(),
            kind: ChargeKind::Contract,
            rounds,
            formula: formula.into(),
            constants: constants.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        });
        rounds
    }

    pub fn push(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.rounds).sum()
    }

    pub fn total_of_kind(&self, kind: ChargeKind) -> u64 {
        self.entries.iter().filter(|e| e.kind == kind).map(|e| e.rounds).sum()
    }

    /// Sum over entries whose phase equals `prefix` or starts with `prefix/`.
    pub fn total_with_prefix(&self, prefix: &str) -> u64 {
        self.entries
            .iter()
            .filter(|e| phase_under(&e.phase, prefix))
            .map(|e| e.rounds)
            .sum()
    }

    /// Sum over entries whose phase contains the path segment `segment`.
    pub fn total_with_segment(&self, segment: &str) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.phase.split('/').any(|s| s == segment))
            .map(|e| e.rounds)
            .sum()
    }

    pub fn phase_totals(&self) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.phase.clone()).or_insert(0) += e.rounds;
        }
        out
    }

    /// Appends `other` with `prefix/` prepended to each phase.
    pub fn absorb(&mut self, prefix: &str, other: RoundLedger) {
        for mut e in other.entries {
            e.phase = join_phase(prefix, &e.phase);
            self.entries.push(e);
        }
        self.notes.extend(other.notes);
    }

    /// Charges a set of concurrently running children. The child with the
    /// largest total is the critical path; its entries are kept under
    /// `prefix/<label>`.  Under [`ParallelMode::Serialized`] an extra entry
    /// doubles the phase. Notes of all children are kept.
    pub fn merge_parallel(&mut self, prefix: &str, children: Vec<(String, RoundLedger)>, mode: ParallelMode) -> u64 {
        let mut notes = Vec::new();
        let mut best: Option<(String, RoundLedger)> = None;
        for (label, child) in children {
            notes.extend(child.notes.iter().cloned());
            let better = match &best {
                None => true,
                Some((_, b)) => child.total() > b.total(),
            };
            if better {
                best = Some((label, child));
            }
        }
        let Some((label, child)) = best else {
            self.notes.extend(notes);
            return 0;
        };
        let span = child.total();
        for mut e in child.entries {
            e.phase = join_phase(&join_phase(prefix, &label), &e.phase);
            self.entries.push(e);
        }
        if mode == ParallelMode::Serialized && span > 0 {
            self.entries.push(LedgerEntry {
                phase: join_phase(prefix, "serialization"),
                kind: ChargeKind::Contract,
                rounds: span,
                formula: "multiplier-1 replay of the slowest instance".to_string(),
                constants: vec![("multiplier".to_string(), 2.0)],
            });
        }
        self.notes.extend(notes);
        match mode {
            ParallelMode::DoubledBandwidth => span,
            ParallelMode::Serialized => 2 * span,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["phase", "kind", "rounds", "formula", "constants"]);
        for e in &self.entries {
            let constants = e
                .constants
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            let _ = w.write_record([
                e.phase.as_str(),
                &e.kind.to_string(),
                &e.rounds.to_string(),
                e.formula.as_str(),
                constants.as_str(),
            ]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    pub fn from_csv(text: &str) -> Result<RoundLedger, ParseError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(text.as_bytes());
        let headers = r.headers().map_err(|e| ParseError::new(1, e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["phase", "kind", "rounds", "formula", "constants"] {
            return Err(ParseError::new(1, "unexpected header"));
        }
        let mut ledger = RoundLedger::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| ParseError::new(line, e.to_string()))?;
            let kind = match &rec[1] {
                "simulated" => ChargeKind::Simulated,
                "contract" => ChargeKind::Contract,
                other => return Err(ParseError::new(line, format!("unknown kind `{other}`"))),
            };
            let rounds = rec[2]
                .parse()
                .map_err(|_| ParseError::new(line, format!("invalid rounds `{}`", &rec[2])))?;
            let mut constants = Vec::new();
            for part in rec[4].split(';').filter(|p| !p.is_empty()) {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| ParseError::new(line, format!("bad constant `{part}`")))?;
                let v: f64 = v
                    .parse()
                    .map_err(|_| ParseError::new(line, format!("bad constant value `{v}`")))?;
                constants.push((k.to_string(), v));
            }
            ledger.entries.push(LedgerEntry {
                phase: rec[0].to_string(),
                kind,
                rounds,
                formula: rec[3].to_string(),
                constants,
            });
        }
        Ok(ledger)
    }
}

pub fn join_phase(prefix: &str, phase: &str) -> String {
    match (prefix.is_empty(), phase.is_empty()) {
        (true, _) => phase.to_string(),
        (_, true) => prefix.to_string(),
        _ => format!("{prefix}/{phase}"),
    }
}

fn phase_under(phase: &str, prefix: &str) -> bool {
    phase == prefix
        || (phase.len() > prefix.len() && phase.starts_with(prefix) && phase.as_bytes()[prefix.len()] == b'/')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RoundLedger {
        let mut l = RoundLedger::new();
        l.simulated("a/bfs", 3);
        l.contract("a/route", 7.2, "c_rt * mix * log^3", &[("c_rt", 1.0), ("mix", 2.0)]);
        l.contract("b", 0.0, "zero", &[]);
        l
    }

    #[test]
    fn totals() {
        let l = sample();
        assert_eq!(l.total(), 11);
        assert_eq!(l.total_with_prefix("a"), 11);
        assert_eq!(l.total_with_prefix("a/bf"), 0);
        assert_eq!(l.total_of_kind(ChargeKind::Simulated), 3);
        assert_eq!(l.phase_totals()["a/route"], 8);
    }

    #[test]
    fn csv_round_trip() {
        let l = sample();
        let back = RoundLedger::from_csv(&l.to_csv()).unwrap();
        assert_eq!(back.entries(), l.entries());
        assert!(RoundLedger::from_csv("x,y\n").is_err());
        assert!(RoundLedger::from_csv("phase,kind,rounds,formula,constants\np,weird,1,f,\n").is_err());
    }

    #[test]
    fn parallel_modes_agree_up_to_multiplier() {
        let mut small = RoundLedger::new();
        small.simulated("x", 2);
        let mut big = RoundLedger::new();
        big.simulated("x", 5);
        let kids = vec![("s0".to_string(), small), ("s1".to_string(), big)];
        let mut d = RoundLedger::new();
        assert_eq!(d.merge_parallel("par", kids.clone(), ParallelMode::DoubledBandwidth), 5);
        let mut s = RoundLedger::new();
        assert_eq!(s.merge_parallel("par", kids, ParallelMode::Serialized), 10);
        assert_eq!(d.total() * 2, s.total());
        assert_eq!(d.entries()[0].phase, "par/s1/x");
    }
}

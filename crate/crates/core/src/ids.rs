//! Degree-ordered identifiers: `gamma` sorts vertices by
//! `floor(log2 deg)` (ties by vertex id) and `d` maps an id back to its
//! exponent class.

use crate::config::Constants;
use crate::engine::RoundLedger;
use crate::error::IdError;
use crate::graph::{Graph, VertexId};
use crate::util::floor_log2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdAssignment {
    /// `gamma[v]` in `1..=k` for members, 0 for non-members.
    pub gamma: Vec<usize>,
    /// `order[i - 1]` is the vertex with id `i`.
    pub order: Vec<VertexId>,
    /// `class_start[e]` is the first id with exponent `e`; an empty class
    /// starts where the next one does. Length `max_exponent + 2`.
    pub class_start: Vec<usize>,
}

impl IdAssignment {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `d(y)` for `y` in `0..=len`; `d(0) = 0`.
    pub fn d(&self, y: usize) -> u32 {
        if y == 0 {
            return 0;
        }
        assert!(y <= self.len(), "id {y} out of range");
        // Last class whose start is <= y.
        let idx = self.class_start.partition_point(|&s| s <= y);
        (idx - 1) as u32
    }

    pub fn vertex_of(&self, id: usize) -> VertexId {
        self.order[id - 1]
    }
}

/// Assigns ids to `members` (vertices of `gin`) using degrees from
/// `degree_source`. `gin` must be connected on `members`.
pub fn assign_ids(
    gin: &Graph,
    members: &[VertexId],
    degree_source: &Graph,
    constants: &Constants,
) -> Result<(IdAssignment, RoundLedger), IdError> {
    let mut exps = Vec::with_capacity(members.len());
    for &v in members {
        let deg = degree_source.degree(v);
        if deg == 0 {
            return Err(IdError::ZeroDegree(v));
        }
        exps.push((floor_log2(deg), v));
    }
    exps.sort_unstable();
    let mut gamma = vec![0; gin.vertex_count()];
    let mut order = Vec::with_capacity(exps.len());
    let max_exp = exps.last().map_or(0, |e| e.0) as usize;
    let mut class_start = vec![usize::MAX; max_exp + 2];
    for (i, &(e, v)) in exps.iter().enumerate() {
        gamma[v] = i + 1;
        order.push(v);
        let e = e as usize;
        if class_start[e] == usize::MAX {
            class_start[e] = i + 1;
        }
    }
    class_start[max_exp + 1] = exps.len() + 1;
    for e in (0..=max_exp).rev() {
        if class_start[e] == usize::MAX {
            class_start[e] = class_start[e + 1];
        }
    }
    let ecc = match members.first() {
        None => 0,
        Some(&root) => {
            let dist = gin.bfs_distances(root);
            let mut ecc = 0;
            for &v in members {
                ecc = ecc.max(dist[v].ok_or(IdError::Disconnected)?);
            }
            ecc
        }
    };
    // Twice the root eccentricity bounds the diameter.
    let diam_ub = 2 * ecc;
    let log_n = (gin.vertex_count().max(2) as f64).log2();
    let mut ledger = RoundLedger::new();
    ledger.contract(
        "ids",
        constants.c_id * (diam_ub as f64 + log_n),
        "c_id * (diam + log2 n)",
        &[("c_id", constants.c_id), ("diam", diam_ub as f64), ("log2_n", log_n)],
    );
    Ok((
        IdAssignment {
            gamma,
            order,
            class_start,
        },
        ledger,
    ))
}

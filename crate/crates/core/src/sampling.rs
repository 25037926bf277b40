//! Empirical check of the induced-edge bound for vertex samples.

use rand::Rng;

use crate::graph::Graph;
use crate::util::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConstants {
    /// Edge-count precondition: `p^2 m >= c_edges (log n)^2`.
    pub c_edges: f64,
    /// Degree precondition: `max deg <= m p / (c_degree log n)`.
    pub c_degree: f64,
    /// Claimed bound: induced edges `<= c_bound p^2 m`.
    pub c_bound: f64,
}

impl Default for SamplingConstants {
    fn default() -> Self {
        SamplingConstants {
            c_edges: 400.0,
            c_degree: 20.0,
            c_bound: 6.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PreconditionViolation {
    EdgeCount { lhs: f64, rhs: f64 },
    MaxDegree { max_degree: usize, limit: f64 },
}

impl std::fmt::Display for PreconditionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PreconditionViolation::EdgeCount { lhs, rhs } => {
                write!(f, "p^2 m = {lhs:.3} < {rhs:.3}")
            }
            PreconditionViolation::MaxDegree { max_degree, limit } => {
                write!(f, "max degree {max_degree} > {limit:.3}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingStats {
    pub trials: usize,
    pub bound: f64,
    pub within_bound: usize,
    pub max_induced: usize,
    pub mean_induced: f64,
}

impl SamplingStats {
    pub fn fraction_within(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.within_bound as f64 / self.trials as f64
        }
    }
}

pub fn check_preconditions(g: &Graph, p: f64, constants: &SamplingConstants) -> Result<(), PreconditionViolation> {
    let n = g.vertex_count().max(2) as f64;
    let m = g.edge_count() as f64;
    let log_n = n.log2();
    let lhs = p * p * m;
    let rhs = constants.c_edges * log_n * log_n;
    if lhs < rhs {
        return Err(PreconditionViolation::EdgeCount { lhs, rhs });
    }
    let limit = m * p / (constants.c_degree * log_n);
    if g.max_degree() as f64 > limit {
        return Err(PreconditionViolation::MaxDegree {
            max_degree: g.max_degree(),
            limit,
        });
    }
    Ok(())
}

/// Samples `trials` vertex subsets with inclusion probability `p` and counts
/// how often the induced edge count stays within `c_bound p^2 m`. Refuses to
/// run when the preconditions fail.
pub fn verify_sampled_subgraph_bound(
    g: &Graph,
    p: f64,
    trials: usize,
    seed: u64,
    constants: &SamplingConstants,
) -> Result<SamplingStats, PreconditionViolation> {
    check_preconditions(g, p, constants)?;
    let bound = constants.c_bound * p * p * g.edge_count() as f64;
    let mut rng = rng_for(seed, &[0x5a4d]);
    let mut within = 0;
    let mut max_induced = 0;
    let mut total = 0usize;
    let mut chosen = vec![false; g.vertex_count()];
    for _ in 0..trials {
        for c in chosen.iter_mut() {
            *c = p >= 1.0 || rng.gen_bool(p);
        }
        let induced = g.edges().iter().filter(|&&(u, v)| chosen[u] && chosen[v]).count();
        if induced as f64 <= bound {
            within += 1;
        }
        max_induced = max_induced.max(induced);
        total += induced;
    }
    Ok(SamplingStats {
        trials,
        bound,
        within_bound: within,
        max_induced,
        mean_induced: if trials == 0 { 0.0 } else { total as f64 / trials as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::complete;

    #[test]
    fn p_one_always_within() {
        let g = complete(30);
        let relaxed = SamplingConstants {
            c_edges: 1.0,
            c_degree: 1.0,
            c_bound: 6.0,
        };
        let stats = verify_sampled_subgraph_bound(&g, 1.0, 20, 1, &relaxed).unwrap();
        assert_eq!(stats.within_bound, 20);
        assert_eq!(stats.max_induced, g.edge_count());
    }

    #[test]
    fn guard_names_failing_inequality() {
        let g = complete(30);
        let err = verify_sampled_subgraph_bound(&g, 0.1, 10, 1, &SamplingConstants::default()).unwrap_err();
        assert!(matches!(err, PreconditionViolation::EdgeCount { .. }));
        let degree_only = SamplingConstants {
            c_edges: 0.0,
            c_degree: 20.0,
            c_bound: 6.0,
        };
        let err = verify_sampled_subgraph_bound(&g, 0.5, 10, 1, &degree_only).unwrap_err();
        assert!(matches!(err, PreconditionViolation::MaxDegree { .. }));
    }
}

//! Amplitude-level simulation of distributed Grover search.
//!
//! Only the two-dimensional invariant subspace spanned by the uniform
//! superpositions over marked and unmarked elements is tracked, so a state
//! is a pair of real amplitudes. Unknown `k` is handled by a fixed schedule
//! of iteration counts; each attempt is followed by one verifying oracle
//! call, so a returned element is always marked.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::{Mutex, OnceLock};

use rand::Rng;

use crate::config::Constants;
use crate::engine::RoundLedger;
use crate::util::{ceil_tolerant, rng_for};

/// Marked/unmarked amplitudes, both scaled by `sqrt(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState {
    pub domain: u64,
    pub marked: u64,
    pub iterations: u64,
    alpha: f64,
    beta: f64,
}

impl AmplitudeState {
    pub fn uniform(domain: u64, marked: u64) -> Self {
        assert!(domain >= 1 && marked <= domain);
        AmplitudeState {
            domain,
            marked,
            iterations: 0,
            alpha: 1.0,
            beta: 1.0,
        }
    }

    /// One oracle reflection followed by inversion about the mean.
    pub fn iterate(&mut self) {
        let (n, k) = (self.domain as f64, self.marked as f64);
        let a = -self.alpha;
        let mean = (k * a + (n - k) * self.beta) / n;
        self.alpha = 2.0 * mean - a;
        self.beta = 2.0 * mean - self.beta;
        self.iterations += 1;
    }

    pub fn after(domain: u64, marked: u64, iterations: u64) -> Self {
        let mut s = Self::uniform(domain, marked);
        for _ in 0..iterations {
            s.iterate();
        }
        s
    }

    /// Probability that measuring yields a marked element.
    pub fn success_probability(&self) -> f64 {
        (self.marked as f64 * self.alpha * self.alpha / self.domain as f64).clamp(0.0, 1.0)
    }
}

/// `sin^2((2j + 1) asin(sqrt(k / N)))`.
pub fn closed_form_probability(domain: u64, marked: u64, iterations: u64) -> f64 {
    let theta = (marked as f64 / domain as f64).sqrt().asin();
    let s = ((2 * iterations + 1) as f64 * theta).sin();
    s * s
}

/// `ceil((pi / 4) sqrt(N))`.
pub fn iteration_cap(domain: u64) -> u64 {
    ceil_tolerant(FRAC_PI_4 * (domain as f64).sqrt()) as u64
}

/// Largest useful count: `max(1, floor(pi / (4 asin(1/sqrt N))))`, which
/// never exceeds [`iteration_cap`].
fn pass_top(domain: u64) -> u64 {
    let theta = (1.0 / domain as f64).sqrt().asin();
    ((FRAC_PI_4 / theta).floor() as u64).clamp(1, iteration_cap(domain))
}

/// One pass: `0, 1, ceil(c), ceil(c^2), ...` below the top count, then
/// the top count itself. Strictly increasing.
pub fn single_pass(domain: u64, growth: f64) -> Vec<u64> {
    let top = pass_top(domain);
    let mut pass = vec![0u64];
    let mut x = 1.0f64;
    loop {
        let j = ceil_tolerant(x) as u64;
        if j >= top {
            break;
        }
        if pass.last() != Some(&j) {
            pass.push(j);
        }
        x *= growth;
    }
    pass.push(top);
    pass
}

/// Worst case over `k in 1..=N` of the probability that a whole pass
/// misses.
pub fn pass_failure(domain: u64, pass: &[u64]) -> f64 {
    let mut worst = 0.0f64;
    for k in 1..=domain {
        let theta = (k as f64 / domain as f64).sqrt().asin();
        let miss: f64 = pass
            .iter()
            .map(|&j| {
                let c = ((2 * j + 1) as f64 * theta).cos();
                c * c
            })
            .product();
        worst = worst.max(miss);
    }
    worst
}

/// Keyed by domain, target-failure bits and growth bits.
type ScheduleCache = Mutex<HashMap<(u64, u64, u64), Vec<u64>>>;

static SCHEDULES: OnceLock<ScheduleCache> = OnceLock::new();

/// Iteration counts of every attempt, in order. For `N = 1` the schedule is
/// `[1]`: one direct evaluation. Otherwise passes are repeated until the
/// worst-case miss probability drops below `target_failure`.
pub fn iteration_schedule(domain: u64, target_failure: f64, growth: f64) -> Vec<u64> {
    assert!(domain >= 1);
    if domain == 1 {
        return vec![1];
    }
    let key = (domain, target_failure.to_bits(), growth.to_bits());
    let cache = SCHEDULES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().ok().and_then(|c| c.get(&key).cloned()) {
        return s;
    }
    let pass = single_pass(domain, growth);
    let q = pass_failure(domain, &pass);
    let repeats = if q <= 0.0 || target_failure >= 1.0 {
        1
    } else if q >= 1.0 {
        // Cannot happen for N >= 2: the j = 0 attempt alone succeeds with
        // probability k / N > 0.
        1
    } else {
        ((target_failure.ln() / q.ln() - 1e-9).ceil() as usize).max(1)
    };
    let schedule: Vec<u64> = pass.iter().copied().cycle().take(pass.len() * repeats).collect();
    if let Ok(mut c) = cache.lock() {
        c.insert(key, schedule.clone());
    }
    schedule
}

/// Oracle invocations of a complete schedule: iterations plus one
/// verification per attempt. For `N = 1` the single evaluation is the
/// verification.
pub fn schedule_calls(schedule: &[u64], domain: u64) -> u64 {
    if domain == 1 {
        return 1;
    }
    schedule.iter().sum::<u64>() + schedule.len() as u64
}

pub struct SearchProblem<'a> {
    pub domain: u64,
    pub oracle: &'a (dyn Fn(u64) -> bool + Sync),
    /// Rounds of one classical oracle evaluation.
    pub oracle_rounds: f64,
    pub target_failure: f64,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub found: Option<u64>,
    pub ledger: RoundLedger,
    /// Probability that the complete schedule finds a marked element.
    pub success_probability: f64,
    pub oracle_calls: u64,
    pub attempts: u64,
    pub marked: u64,
}

/// Runs the schedule until an attempt's measured element verifies.
/// Charges `(iterations + verifications) * (2r + c_oh)` rounds for the
/// attempts actually made.
pub fn grover_search(problem: &SearchProblem<'_>, constants: &Constants, seed: u64, phase: &str) -> SearchOutcome {
    let n = problem.domain;
    let marked: Vec<u64> = (0..n).filter(|&x| (problem.oracle)(x)).collect();
    let k = marked.len() as u64;
    let schedule = iteration_schedule(n, problem.target_failure, constants.growth);
    let per_call = 2.0 * problem.oracle_rounds + constants.c_oh;
    let mut rng = rng_for(seed, &[0x6772_6f76]);
    let mut found = None;
    let mut calls = 0u64;
    let mut attempts = 0u64;
    let mut miss_all = 1.0f64;
    if n == 1 {
        calls = 1;
        attempts = 1;
        if k == 1 {
            found = Some(0);
        }
        miss_all = if k == 1 { 0.0 } else { 1.0 };
    } else {
        for &j in &schedule {
            let p = AmplitudeState::after(n, k, j).success_probability();
            miss_all *= 1.0 - p;
        }
        for &j in &schedule {
            attempts += 1;
            calls += j + 1;
            let p = AmplitudeState::after(n, k, j).success_probability();
            let hit = k > 0 && rng.gen::<f64>() < p;
            let candidate = if hit {
                marked[rng.gen_range(0..marked.len())]
            } else {
                sample_unmarked(n, &marked, &mut rng)
            };
            if (problem.oracle)(candidate) {
                found = Some(candidate);
                break;
            }
        }
    }
    let mut ledger = RoundLedger::new();
    ledger.contract(
        phase,
        calls as f64 * per_call,
        "oracle_calls * (2r + c_oh)",
        &[
            ("oracle_calls", calls as f64),
            ("r", problem.oracle_rounds),
            ("c_oh", constants.c_oh),
            ("N", n as f64),
        ],
    );
    SearchOutcome {
        found,
        ledger,
        success_probability: if k == 0 { 0.0 } else { 1.0 - miss_all },
        oracle_calls: calls,
        attempts,
        marked: k,
    }
}

/// Uniform element outside the sorted `marked` list.
fn sample_unmarked<R: Rng>(n: u64, marked: &[u64], rng: &mut R) -> u64 {
    let free = n - marked.len() as u64;
    if free == 0 {
        return marked[0];
    }
    let mut x = rng.gen_range(0..free);
    // Shift past marked elements at or below x.
    for &m in marked {
        if m <= x {
            x += 1;
        } else {
            break;
        }
    }
    x
}

#[derive(Debug, Clone)]
pub struct DisjointnessOutcome {
    pub intersects: bool,
    pub witness: Option<u64>,
    pub domain: u64,
    pub ledger: RoundLedger,
    /// What the simulated search itself would charge at 2 rounds per
    /// membership query.
    pub search_rounds: u64,
}

/// `c_dj sqrt(m) log2(m + 2)^2` for `m = min(|T_u|, |T_v|)`.
pub fn disjointness_charge(min_size: usize, c_dj: f64) -> f64 {
    if min_size == 0 {
        return 0.0;
    }
    let m = min_size as f64;
    let l = (m + 2.0).log2();
    c_dj * m.sqrt() * l * l
}

/// Decides whether two sets intersect by searching the smaller one
/// for members of the other.
pub fn distributed_disjointness(
    t_u: &[u64],
    t_v: &[u64],
    constants: &Constants,
    target_failure: f64,
    seed: u64,
) -> DisjointnessOutcome {
    let (mut small, mut large) = if t_u.len() <= t_v.len() {
        (t_u.to_vec(), t_v.to_vec())
    } else {
        (t_v.to_vec(), t_u.to_vec())
    };
    small.sort_unstable();
    small.dedup();
    large.sort_unstable();
    let m = small.len();
    let mut ledger = RoundLedger::new();
    ledger.contract(
        "disjointness",
        disjointness_charge(m, constants.c_dj),
        "c_dj * sqrt(m) * log2(m + 2)^2",
        &[("c_dj", constants.c_dj), ("m", m as f64)],
    );
    if m == 0 {
        return DisjointnessOutcome {
            intersects: false,
            witness: None,
            domain: 0,
            ledger,
            search_rounds: 0,
        };
    }
    let oracle = |x: u64| large.binary_search(&small[x as usize]).is_ok();
    let problem = SearchProblem {
        domain: m as u64,
        oracle: &oracle,
        oracle_rounds: 2.0,
        target_failure,
    };
    let out = grover_search(&problem, constants, seed, "disjointness/search");
    DisjointnessOutcome {
        intersects: out.found.is_some(),
        witness: out.found.map(|i| small[i as usize]),
        domain: m as u64,
        search_rounds: out.ledger.total(),
        ledger,
    }
}

//! Seeded random graph families.
//!
//! Spec strings have the form `kind[:param[:param...]]`:
//!
//! | spec                         | family                                              |
//! |------------------------------|-----------------------------------------------------|
//! | `uniform:P`                  | G(n, P)                                             |
//! | `triangle-free:P`            | random bipartite, cross pairs with probability P    |
//! | `planted:P`                  | `triangle-free:P` plus one planted triangle         |
//! | `regular:D`                  | union of random Hamiltonian cycles (+ matching)     |
//! | `bipartite-regular:D`        | alternating cycle plus random perfect matchings     |
//! | `composite:B:D:K`            | B blocks of `regular:D`, K random bridges per join   |
//! | `hubs:D`                     | `bipartite-regular:D` plus ~sqrt(n)/4 hubs per side |

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::GenerateError;
use crate::graph::{normalize, Edge, Graph, TriangleWitness, VertexId};
use crate::util::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorSpec {
    Uniform {
        p: f64,
    },
    TriangleFree {
        p: f64,
    },
    Planted {
        p: f64,
    },
    Regular {
        degree: usize,
    },
    BipartiteRegular {
        degree: usize,
    },
    Composite {
        blocks: usize,
        degree: usize,
        bridges: usize,
    },
    Hubs {
        degree: usize,
    },
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Uniform { .. } => "uniform",
            GeneratorSpec::TriangleFree { .. } => "triangle-free",
            GeneratorSpec::Planted { .. } => "planted",
            GeneratorSpec::Regular { .. } => "regular",
            GeneratorSpec::BipartiteRegular { .. } => "bipartite-regular",
            GeneratorSpec::Composite { .. } => "composite",
            GeneratorSpec::Hubs { .. } => "hubs",
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorSpec::Uniform { p } => write!(f, "uniform:{p}"),
            GeneratorSpec::TriangleFree { p } => write!(f, "triangle-free:{p}"),
            GeneratorSpec::Planted { p } => write!(f, "planted:{p}"),
            GeneratorSpec::Regular { degree } => write!(f, "regular:{degree}"),
            GeneratorSpec::BipartiteRegular { degree } => write!(f, "bipartite-regular:{degree}"),
            GeneratorSpec::Composite {
                blocks,
                degree,
                bridges,
            } => write!(f, "composite:{blocks}:{degree}:{bridges}"),
            GeneratorSpec::Hubs { degree } => write!(f, "hubs:{degree}"),
        }
    }
}

fn parse_prob(s: &str, whole: &str) -> Result<f64, GenerateError> {
    let p: f64 = s.trim().parse().map_err(|_| GenerateError::Parse(whole.to_string()))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::BadProbability(p));
    }
    Ok(p)
}

fn parse_count(s: &str, whole: &str) -> Result<usize, GenerateError> {
    s.trim().parse().map_err(|_| GenerateError::Parse(whole.to_string()))
}

impl FromStr for GeneratorSpec {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || GenerateError::Parse(s.to_string());
        let arity = |k: usize| {
            if parts.len() == k + 1 {
                Ok(())
            } else {
                Err(bad())
            }
        };
        let spec = match parts[0].trim() {
            "uniform" => {
                arity(1)?;
                GeneratorSpec::Uniform {
                    p: parse_prob(parts[1], s)?,
                }
            }
            "triangle-free" => {
                arity(1)?;
                GeneratorSpec::TriangleFree {
                    p: parse_prob(parts[1], s)?,
                }
            }
            "planted" => {
                arity(1)?;
                GeneratorSpec::Planted {
                    p: parse_prob(parts[1], s)?,
                }
            }
            "regular" => {
                arity(1)?;
                GeneratorSpec::Regular {
                    degree: parse_count(parts[1], s)?,
                }
            }
            "bipartite-regular" => {
                arity(1)?;
                GeneratorSpec::BipartiteRegular {
                    degree: parse_count(parts[1], s)?,
                }
            }
            "composite" => {
                arity(3)?;
                GeneratorSpec::Composite {
                    blocks: parse_count(parts[1], s)?,
                    degree: parse_count(parts[2], s)?,
                    bridges: parse_count(parts[3], s)?,
                }
            }
            "hubs" => {
                arity(1)?;
                GeneratorSpec::Hubs {
                    degree: parse_count(parts[1], s)?,
                }
            }
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

/// Generate a graph on `n` vertices. Same `(spec, n, seed)` gives the same
/// graph.
pub fn generate(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<Graph, GenerateError> {
    let mut rng = rng_for(seed, &[0x6e6e, n as u64]);
    match *spec {
        GeneratorSpec::Uniform { p } => {
            check_p(p)?;
            let mut edges = Vec::new();
            sample_pairs(n, p, &mut rng, |u, v| edges.push((u, v)));
            Ok(Graph::from_edges_dedup(n, edges))
        }
        GeneratorSpec::TriangleFree { p } => {
            check_p(p)?;
            Ok(Graph::from_edges_dedup(n, bipartite_random(n, p, &mut rng)))
        }
        GeneratorSpec::Planted { p } => planted_with_rng(n, p, &mut rng).map(|(g, _)| g),
        GeneratorSpec::Regular { degree } => {
            check_regular(n, degree, "regular")?;
            Ok(Graph::from_edges_dedup(n, regular_edges(n, degree, &mut rng)))
        }
        GeneratorSpec::BipartiteRegular { degree } => {
            check_bipartite_regular(n, degree)?;
            Ok(Graph::from_edges_dedup(n, bipartite_regular_edges(n, degree, &mut rng)))
        }
        GeneratorSpec::Composite {
            blocks,
            degree,
            bridges,
        } => composite(n, blocks, degree, bridges, &mut rng),
        GeneratorSpec::Hubs { degree } => {
            check_bipartite_regular(n, degree)?;
            Ok(hub_bipartite(n, degree, &mut rng))
        }
    }
}

/// The planted family, also returning the planted triangle.
pub fn generate_planted(n: usize, p: f64, seed: u64) -> Result<(Graph, TriangleWitness), GenerateError> {
    let mut rng = rng_for(seed, &[0x6e6e, n as u64]);
    planted_with_rng(n, p, &mut rng)
}

fn check_p(p: f64) -> Result<(), GenerateError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenerateError::BadProbability(p))
    }
}

fn check_regular(n: usize, degree: usize, kind: &'static str) -> Result<(), GenerateError> {
    if n < 3 {
        return Err(GenerateError::TooSmall { kind, min: 3, n });
    }
    if degree < 2 || degree >= n {
        return Err(GenerateError::BadParameter(format!(
            "degree {degree} must lie in [2, n)"
        )));
    }
    if degree % 2 == 1 && n % 2 == 1 {
        return Err(GenerateError::BadParameter("odd degree needs even n".to_string()));
    }
    Ok(())
}

fn check_bipartite_regular(n: usize, degree: usize) -> Result<(), GenerateError> {
    if n < 4 {
        return Err(GenerateError::TooSmall {
            kind: "bipartite-regular",
            min: 4,
            n,
        });
    }
    if degree < 2 || degree > n / 2 {
        return Err(GenerateError::BadParameter(format!(
            "degree {degree} must lie in [2, n/2]"
        )));
    }
    Ok(())
}

/// Calls `f(u, v)` with `u < v` for each pair kept with probability `p`,
/// skipping geometrically between kept pairs.
fn sample_pairs<F: FnMut(VertexId, VertexId)>(n: usize, p: f64, rng: &mut ChaCha8Rng, mut f: F) {
    let total = n * n.saturating_sub(1) / 2;
    if p <= 0.0 || total == 0 {
        return;
    }
    // Row-major index over pairs (u, v), u < v; indices arrive increasing so
    // a cursor over rows suffices.
    let (mut u, mut row_start) = (0usize, 0usize);
    let mut emit = |idx: usize| {
        while idx >= row_start + (n - 1 - u) {
            row_start += n - 1 - u;
            u += 1;
        }
        f(u, u + 1 + idx - row_start);
    };
    if p >= 1.0 {
        for idx in 0..total {
            emit(idx);
        }
        return;
    }
    let ln_q = (1.0 - p).ln();
    let mut idx: usize = 0;
    loop {
        let r: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let skip = (r.ln() / ln_q).floor();
        if !skip.is_finite() || skip >= (total - idx) as f64 {
            return;
        }
        idx += skip as usize;
        emit(idx);
        idx += 1;
        if idx >= total {
            return;
        }
    }
}

/// Halves `0..n/2` and `n/2..n`, cross pairs kept with probability `p`.
fn bipartite_random(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let half = n / 2;
    let mut edges = Vec::new();
    if p <= 0.0 {
        return edges;
    }
    for u in 0..half {
        for v in half..n {
            if p >= 1.0 || rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn planted_with_rng(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<(Graph, TriangleWitness), GenerateError> {
    if n < 3 {
        return Err(GenerateError::TooSmall {
            kind: "planted",
            min: 3,
            n,
        });
    }
    check_p(p)?;
    let mut edges = bipartite_random(n, p, rng);
    let picks = rand::seq::index::sample(rng, n, 3).into_vec();
    let witness = TriangleWitness::new(picks[0], picks[1], picks[2]);
    edges.extend(witness.edges());
    let mut g = Graph::from_edges_dedup(n, edges);
    // A second triangle must use exactly one planted edge {x, y} and a
    // common neighbour z outside the plant; dropping {x, z} destroys it.
    // Removals never create triangles, so one pass suffices.
    let [a, b, c] = witness.vertices;
    for (x, y, third) in [(a, b, c), (a, c, b), (b, c, a)] {
        let common: Vec<VertexId> = g
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&z| z != third && g.has_edge(y, z))
            .collect();
        if !common.is_empty() {
            let mut drop: Vec<Edge> = common.iter().map(|&z| normalize(x, z)).collect();
            drop.sort_unstable();
            g = g.filter_edges(|e| drop.binary_search(&e).is_err());
        }
    }
    Ok((g, witness))
}

fn random_cycle(vertices: &[VertexId], rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut order = vertices.to_vec();
    order.shuffle(rng);
    let k = order.len();
    (0..k).map(|i| (order[i], order[(i + 1) % k])).collect()
}

fn random_matching(vertices: &[VertexId], rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut order = vertices.to_vec();
    order.shuffle(rng);
    order.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Degree at most `degree`, connected; near-regular after deduplication.
fn regular_edges(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let vertices: Vec<VertexId> = (0..n).collect();
    let mut edges = Vec::new();
    for _ in 0..degree / 2 {
        edges.extend(random_cycle(&vertices, rng));
    }
    if degree % 2 == 1 {
        edges.extend(random_matching(&vertices, rng));
    }
    edges
}

/// An alternating Hamiltonian cycle between the halves (so the result is
/// connected) plus `degree - 2` random perfect matchings. With odd `n` the
/// last vertex is attached to `degree` random left vertices.
fn bipartite_regular_edges(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let half = n / 2;
    let mut left: Vec<VertexId> = (0..half).collect();
    let mut right: Vec<VertexId> = (half..2 * half).collect();
    left.shuffle(rng);
    right.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..half {
        edges.push((left[i], right[i]));
        edges.push((right[i], left[(i + 1) % half]));
    }
    for _ in 2..degree {
        right.shuffle(rng);
        edges.extend(left.iter().zip(&right).map(|(&u, &v)| (u, v)));
    }
    if n % 2 == 1 {
        let last = n - 1;
        for u in rand::seq::index::sample(rng, half, degree.min(half)) {
            edges.push((u, last));
        }
    }
    edges
}

fn composite(
    n: usize,
    blocks: usize,
    degree: usize,
    bridges: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GenerateError> {
    if blocks == 0 {
        return Err(GenerateError::BadParameter("zero blocks".to_string()));
    }
    let size = n / blocks;
    check_regular(size, degree, "composite")?;
    let mut starts = Vec::with_capacity(blocks + 1);
    for b in 0..blocks {
        starts.push(b * size);
    }
    starts.push(n);
    let mut edges = Vec::new();
    for b in 0..blocks {
        let vs: Vec<VertexId> = (starts[b]..starts[b + 1]).collect();
        if vs.len() % 2 == 1 && degree % 2 == 1 {
            return Err(GenerateError::BadParameter(
                "odd degree needs even block sizes".to_string(),
            ));
        }
        for _ in 0..degree / 2 {
            edges.extend(random_cycle(&vs, rng));
        }
        if degree % 2 == 1 {
            edges.extend(random_matching(&vs, rng));
        }
    }
    for b in 0..blocks.saturating_sub(1) {
        for _ in 0..bridges {
            let u = rng.gen_range(starts[b]..starts[b + 1]);
            let v = rng.gen_range(starts[b + 1]..starts[b + 2]);
            edges.push((u, v));
        }
    }
    Ok(Graph::from_edges_dedup(n, edges))
}

/// Triangle-free scaling family: a bipartite near-regular base plus
/// `max(1, ceil(sqrt(n)/4))` hubs per side, each joined to every vertex of
/// the opposite side with probability 1/2.
fn hub_bipartite(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = bipartite_regular_edges(n, degree, rng);
    let half = n / 2;
    let hubs = hub_count(n).min(half);
    let left_hubs = rand::seq::index::sample(rng, half, hubs).into_vec();
    let right_hubs: Vec<VertexId> = rand::seq::index::sample(rng, n - half, hubs)
        .into_iter()
        .map(|i| i + half)
        .collect();
    for &h in &left_hubs {
        for v in half..n {
            if rng.gen_bool(0.5) {
                edges.push((h, v));
            }
        }
    }
    for &h in &right_hubs {
        for u in 0..half {
            if rng.gen_bool(0.5) {
                edges.push((u, h));
            }
        }
    }
    Graph::from_edges_dedup(n, edges)
}

pub fn hub_count(n: usize) -> usize {
    (((n as f64).sqrt() / 4.0).ceil() as usize).max(1)
}

/// A uniformly random relabelling of `g`.
pub fn random_relabel(g: &Graph, seed: u64) -> (Graph, Vec<VertexId>) {
    let mut rng = rng_for(seed, &[0x7065_726d]);
    let mut perm: Vec<VertexId> = (0..g.vertex_count()).collect();
    perm.shuffle(&mut rng);
    (g.relabel(&perm), perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_triangles, brute_force_find_triangle, EdgeSubset};

    #[test]
    fn triangle_free_has_none() {
        let g = generate(&GeneratorSpec::TriangleFree { p: 0.3 }, 100, 7).unwrap();
        assert!(brute_force_find_triangle(&g, &EdgeSubset::all(&g)).is_none());
    }

    #[test]
    fn planted_is_unique() {
        let (g, w) = generate_planted(100, 0.3, 7).unwrap();
        assert_eq!(all_triangles(&g), vec![w]);
        assert_eq!(brute_force_find_triangle(&g, &EdgeSubset::all(&g)), Some(w));
        let again = generate(&GeneratorSpec::Planted { p: 0.3 }, 100, 7).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn planted_rejects_tiny() {
        assert!(matches!(
            generate(&GeneratorSpec::Planted { p: 0.5 }, 2, 1),
            Err(GenerateError::TooSmall { .. })
        ));
    }

    #[test]
    fn uniform_is_reproducible() {
        let spec = GeneratorSpec::Uniform { p: 0.5 };
        let a = generate(&spec, 8, 1).unwrap();
        let b = generate(&spec, 8, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edge_count(), b.edges().len());
    }

    #[test]
    fn uniform_density_is_plausible() {
        let g = generate(&GeneratorSpec::Uniform { p: 0.1 }, 400, 3).unwrap();
        let expected = 0.1 * (400.0 * 399.0 / 2.0);
        let m = g.edge_count() as f64;
        assert!((m - expected).abs() < 5.0 * expected.sqrt(), "m = {m}");
        let full = generate(&GeneratorSpec::Uniform { p: 1.0 }, 9, 3).unwrap();
        assert_eq!(full.edge_count(), 36);
    }

    #[test]
    fn regular_families_are_connected() {
        let g = generate(&GeneratorSpec::Regular { degree: 6 }, 200, 2).unwrap();
        assert!(g.is_connected());
        assert!(g.max_degree() <= 6);
        let b = generate(&GeneratorSpec::BipartiteRegular { degree: 3 }, 201, 2).unwrap();
        assert!(b.is_connected());
        assert!(all_triangles(&b).is_empty());
    }

    #[test]
    fn hubs_are_heavy_and_triangle_free() {
        let n = 1024;
        let g = generate(&GeneratorSpec::Hubs { degree: 3 }, n, 5).unwrap();
        assert!(g.is_connected());
        assert!(all_triangles(&g).is_empty());
        let threshold = g.edge_count() as f64 / (n as f64).sqrt();
        let heavy = (0..n).filter(|&u| g.degree(u) as f64 >= threshold).count();
        assert_eq!(heavy, 2 * hub_count(n));
    }

    #[test]
    fn composite_blocks() {
        let spec = GeneratorSpec::Composite {
            blocks: 2,
            degree: 6,
            bridges: 1,
        };
        let g = generate(&spec, 100, 4).unwrap();
        let crossing = g.edges().iter().filter(|&&(u, v)| (u < 50) != (v < 50)).count();
        assert_eq!(crossing, 1);
        assert!(g.is_connected());
    }

    #[test]
    fn spec_round_trip() {
        for s in [
            "uniform:0.25",
            "triangle-free:0.1",
            "planted:0.5",
            "regular:4",
            "bipartite-regular:3",
            "composite:4:6:2",
            "hubs:3",
        ] {
            let spec: GeneratorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("uniform".parse::<GeneratorSpec>().is_err());
        assert!("uniform:1.5".parse::<GeneratorSpec>().is_err());
        assert!("nope:1".parse::<GeneratorSpec>().is_err());
    }
}

use proptest::prelude::*;

use congest_tri::generators::{generate, GeneratorSpec};
use congest_tri::graph::{all_triangles, Graph};
use congest_tri::ids::assign_ids;
use congest_tri::io::{parse_annotation, parse_graph, write_annotation, write_graph};
use congest_tri::pipeline::{heavy_set, star_transform, SubnetworkInstance, TripleAssignment, TriplePartition};
use congest_tri::search::{closed_form_probability, AmplitudeState};
use congest_tri::{Constants, RoundLedger};

fn small_graph() -> impl Strategy<Value = Graph> {
    (3usize..30).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..120)
            .prop_map(move |pairs| Graph::from_edges_dedup(n, pairs.into_iter().filter(|(u, v)| u != v)))
    })
}

proptest! {
    #[test]
    fn slice_coordinates_invert(t in 1usize..48, i in 0usize..48, j in 0usize..48, l in 0usize..48) {
        let (i, j, l) = (i % t + 1, j % t + 1, l % t + 1);
        let tp = TriplePartition::new(t);
        let k = tp.k_of(i, j, l);
        prop_assert!((1..=t).contains(&k));
        prop_assert_eq!(tp.slice_of(i, j, k), l);
        prop_assert_eq!(tp.j_of(i, k, l), j);
        prop_assert_eq!(tp.i_of(j, k, l), i);
        prop_assert_eq!(tp.triple_at(tp.index_of(i, j), l), (i, j, k));
    }

    #[test]
    fn amplitude_matches_closed_form(n in 1u64..2000, k in 0u64..2000, j in 0u64..60) {
        let k = k % (n + 1);
        let sim = AmplitudeState::after(n, k, j).success_probability();
        prop_assert!((sim - closed_form_probability(n, k, j)).abs() <= 1e-9);
    }

    #[test]
    fn graph_text_round_trip(g in small_graph()) {
        let back = parse_graph(&write_graph(&g)).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
    }

    #[test]
    fn ledger_csv_round_trip(
        entries in proptest::collection::vec(("[a-z]{1,6}(/[a-z0-9]{1,4}){0,2}", 0u64..1_000_000, 0.0f64..1e6, any::<bool>()), 0..12)
    ) {
        let mut l = RoundLedger::new();
        for (phase, rounds, value, contract) in &entries {
            if *contract {
                l.contract(phase.clone(), *value, "c * x", &[("c", 1.5), ("x", *value)]);
            } else {
                l.simulated(phase.clone(), *rounds);
            }
        }
        let back = RoundLedger::from_csv(&l.to_csv()).unwrap();
        prop_assert_eq!(back.entries(), l.entries());
    }

    #[test]
    fn annotation_round_trip(g in small_graph(), k in 1usize..30) {
        let n = g.vertex_count();
        let vin: Vec<usize> = (0..k.min(n)).collect();
        let eout: Vec<_> = g.edges().iter().copied().filter(|&(u, v)| (u < k) != (v < k)).collect();
        let a = congest_tri::io::Annotation { vin, eout };
        prop_assert_eq!(parse_annotation(&write_annotation(&a)).unwrap(), a);
    }

    #[test]
    fn owned_triples_tile_every_slice(degree in 2usize..6, n in 20usize..80, seed in 0u64..1000) {
        let n = n & !1;
        let g = generate(&GeneratorSpec::Regular { degree: 2 * degree }, n, seed).unwrap();
        prop_assume!(g.is_connected());
        let c = Constants::default();
        let members: Vec<usize> = (0..n).collect();
        let (ids, _) = assign_ids(&g, &members, &g, &c).unwrap();
        let t = 3;
        let a = TripleAssignment::new(ids, t, n, g.edge_count(), n);
        prop_assume!(a.quota_holds());
        let mut covered = vec![0u32; t * t];
        for v in 0..n {
            for idx in a.owned(v) {
                covered[idx] += 1;
                prop_assert_eq!(a.owner_of(idx), v);
            }
        }
        prop_assert!(covered.iter().all(|&x| x == 1));
    }

    #[test]
    fn star_transform_is_sound(g in small_graph(), split in 2usize..30) {
        let n = g.vertex_count();
        let vin_size = split.min(n);
        let (ein, cross): (Vec<_>, Vec<_>) = g.edges().iter().copied().filter(|&(u, _)| u < vin_size).partition(|&(_, v)| v < vin_size);
        let gin = Graph::from_edges(n, ein.clone()).unwrap();
        let mut out_deg = vec![0; n];
        let eout: Vec<_> = cross.into_iter().filter(|&(u, _)| {
            out_deg[u] += 1;
            out_deg[u] <= gin.degree(u)
        }).collect();
        let Ok(inst) = SubnetworkInstance::new(n, (0..vin_size).collect(), ein, eout) else {
            return Ok(());
        };
        let s = heavy_set(&inst);
        let st = star_transform(&inst, &s).unwrap();
        for tri in all_triangles(st.instance.ebar()) {
            let [a, b, c] = st.mapping.project(&tri);
            let e = inst.ebar();
            prop_assert!(e.has_edge(a, b) && e.has_edge(b, c) && e.has_edge(a, c));
        }
        for tri in all_triangles(inst.ebar()) {
            if tri.vertices.iter().all(|&v| !s.contains(v)) {
                prop_assert!(tri.is_in(st.instance.ebar()));
            }
        }
    }
}

//! Subnetwork-stage rounds on single-component hub instances.
//!
//! `cargo run --release -p congest-tri --example scaling -- [degree] [max_k]`

use std::time::Instant;

use congest_tri::engine::EngineConfig;
use congest_tri::generators::{generate, GeneratorSpec};
use congest_tri::pipeline::{find_triangle_in_subnetwork, SubnetworkInstance};
use congest_tri::Constants;

fn main() {
    let c = Constants::default();
    let mut args = std::env::args().skip(1);
    let degree: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let max_k: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);
    println!("n\tm\ttotal\ttotal/log^4\theavy\tbatches_max\towners_max\tload_ratio\tseconds");
    for k in 8..=max_k {
        let n = 1usize << k;
        let start = Instant::now();
        let g = generate(&GeneratorSpec::Hubs { degree }, n, 1).expect("hub instance");
        let mut inst = SubnetworkInstance::new(n, (0..n).collect(), g.edges().to_vec(), vec![]).expect("instance");
        if let Err(e) = inst.validate(&c) {
            println!("{n}\tinvalid: {e}");
            continue;
        }
        let cfg = EngineConfig::for_network(n, c.c_b).with_multiplier(2);
        let o = find_triangle_in_subnetwork(&inst, &c, 7, &cfg).expect("pipeline");
        let checks = &o.low.diagnostics.checks;
        println!(
            "{n}\t{}\t{}\t{:.1}\t{}\t{}\t{}\t{:.1}\t{:.2}",
            g.edge_count(),
            o.ledger.total(),
            o.ledger.total() as f64 / (n as f64).log2().powi(4),
            o.ledger.total_with_segment("heavy"),
            checks.iter().map(|c| c.batches).max().unwrap_or(0),
            checks.iter().map(|c| c.max_owners_per_edge).max().unwrap_or(0),
            checks.iter().map(|c| c.load_ratio).fold(0.0, f64::max),
            start.elapsed().as_secs_f64()
        );
    }
}

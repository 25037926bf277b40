//! Sweeps over generated instances: oracle agreement, round totals and the
//! fitted scaling exponent.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{parse_key_values, Constants};
use crate::error::{ConfigError, GenerateError};
use crate::generators::{generate, GeneratorSpec};
use crate::graph::{has_triangle, Graph};
use crate::io::write_graph;
use crate::pipeline::{find_triangle, TriangleOutcome};
use crate::util::least_squares;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub constants: Constants,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            generator: GeneratorSpec::Uniform { p: 0.05 },
            sizes: vec![64, 128],
            seeds: vec![0, 1, 2],
            constants: Constants::default(),
            out_dir: None,
        }
    }
}

/// `a..b` (half open) or a comma-separated list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, ConfigError> {
    let bad = || ConfigError::BadValue {
        key: "seeds".to_string(),
        value: s.to_string(),
    };
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

/// Comma-separated sizes; `2^k` is accepted.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, ConfigError> {
    let bad = || ConfigError::BadValue {
        key: "sizes".to_string(),
        value: s.to_string(),
    };
    s.split(',')
        .map(|x| {
            let x = x.trim();
            match x.strip_prefix("2^") {
                Some(k) => k
                    .parse::<u32>()
                    .ok()
                    .and_then(|k| 1usize.checked_shl(k))
                    .ok_or_else(bad),
                None => x.parse().map_err(|_| bad()),
            }
        })
        .collect()
}

impl ExperimentConfig {
    /// Applies one `key = value` setting: `generator`, `sizes`, `seeds`,
    /// `out`, or any constant key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "generator" => self.generator = value.parse::<GeneratorSpec>()?,
            "sizes" => self.sizes = parse_sizes(value)?,
            "seeds" => self.seeds = parse_seeds(value)?,
            "out" => self.out_dir = Some(PathBuf::from(value)),
            _ => self.constants.set(key, value)?,
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (_, k, v) in parse_key_values(text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.constants.validate()?;
        if self.sizes.is_empty() || self.seeds.is_empty() {
            return Err(ConfigError::EmptySweep);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub generator: String,
    pub n: usize,
    pub seed: u64,
    pub edges: usize,
    pub expected: bool,
    pub found: Option<bool>,
    pub detection_level: Option<usize>,
    pub levels: usize,
    pub total_rounds: u64,
    pub subnetwork_rounds: u64,
    pub heavy_rounds: u64,
    pub phases: BTreeMap<String, u64>,
    pub error: Option<String>,
}

impl InstanceRecord {
    pub fn agrees(&self) -> bool {
        self.found == Some(self.expected)
    }
}

fn record(
    generator: String,
    g: &Graph,
    n: usize,
    seed: u64,
    result: Result<TriangleOutcome, String>,
) -> InstanceRecord {
    let expected = has_triangle(g);
    let mut r = InstanceRecord {
        generator,
        n,
        seed,
        edges: g.edge_count(),
        expected,
        found: None,
        detection_level: None,
        levels: 0,
        total_rounds: 0,
        subnetwork_rounds: 0,
        heavy_rounds: 0,
        phases: BTreeMap::new(),
        error: None,
    };
    match result {
        Ok(out) => {
            r.found = Some(out.found);
            r.detection_level = out.detection_level;
            r.levels = out.levels.len();
            r.total_rounds = out.ledger.total();
            r.subnetwork_rounds = out.ledger.total_with_segment("subnetworks");
            r.heavy_rounds = out.ledger.total_with_segment("heavy");
            r.phases = out.ledger.phase_totals();
        }
        Err(e) => r.error = Some(e),
    }
    r
}

/// Generates one instance, runs the pipeline with the same seed and
/// compares against the oracle.
pub fn run_instance(
    spec: &GeneratorSpec,
    n: usize,
    seed: u64,
    constants: &Constants,
) -> Result<(Graph, InstanceRecord), GenerateError> {
    let g = generate(spec, n, seed)?;
    let out = find_triangle(&g, constants, seed).map_err(|e| e.to_string());
    let r = record(spec.to_string(), &g, n, seed, out);
    Ok((g, r))
}

/// Re-executes the pipeline on a stored graph.
pub fn replay(g: &Graph, seed: u64, constants: &Constants) -> Result<TriangleOutcome, crate::error::PipelineError> {
    find_triangle(g, constants, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<InstanceRecord>,
    /// Exponent of `total / (log2 n)^4` against `n`.
    pub exponent_total: Option<f64>,
    pub exponent_subnetwork: Option<f64>,
    pub exponent_heavy: Option<f64>,
}

impl ExperimentReport {
    pub fn all_agree(&self) -> bool {
        self.records.iter().all(InstanceRecord::agrees)
    }

    pub fn fit_text(&self) -> String {
        let show = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        format!(
            "exponent_total={}\nexponent_subnetwork={}\nexponent_heavy={}\nnormalisation=(log2 n)^4\n",
            show(self.exponent_total),
            show(self.exponent_subnetwork),
            show(self.exponent_heavy)
        )
    }
}

/// Least-squares slope of `ln(rounds / (log2 n)^4)` on `ln n`, using only
/// points with positive rounds. Needs two distinct sizes.
pub fn fit_exponent(points: &[(usize, u64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(n, r)| n >= 2 && r > 0)
        .map(|&(n, r)| {
            let l = (n as f64).log2();
            ((n as f64).ln(), (r as f64 / l.powi(4)).ln())
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    least_squares(&xs, &ys).map(|(slope, _)| slope)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = config
        .sizes
        .iter()
        .flat_map(|&n| config.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let results: Vec<(Option<Graph>, InstanceRecord)> = jobs
        .par_iter()
        .map(
            |&(n, seed)| match run_instance(&config.generator, n, seed, &config.constants) {
                Ok((g, r)) => (Some(g), r),
                Err(e) => (
                    None,
                    InstanceRecord {
                        generator: config.generator.to_string(),
                        n,
                        seed,
                        edges: 0,
                        expected: false,
                        found: None,
                        detection_level: None,
                        levels: 0,
                        total_rounds: 0,
                        subnetwork_rounds: 0,
                        heavy_rounds: 0,
                        phases: BTreeMap::new(),
                        error: Some(e.to_string()),
                    },
                ),
            },
        )
        .collect();
    let pts = |f: fn(&InstanceRecord) -> u64| -> Vec<(usize, u64)> {
        results
            .iter()
            .filter(|(_, r)| r.error.is_none())
            .map(|(_, r)| (r.n, f(r)))
            .collect()
    };
    let report = ExperimentReport {
        exponent_total: fit_exponent(&pts(|r| r.total_rounds)),
        exponent_subnetwork: fit_exponent(&pts(|r| r.subnetwork_rounds)),
        exponent_heavy: fit_exponent(&pts(|r| r.heavy_rounds)),
        records: results.iter().map(|(_, r)| r.clone()).collect(),
    };
    if let Some(dir) = &config.out_dir {
        write_report(dir, config, &report, &results)?;
    }
    Ok(report)
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("writing reports: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing csv: {0}")]
    Csv(#[from] csv::Error),
}

fn write_report(
    dir: &Path,
    config: &ExperimentConfig,
    report: &ExperimentReport,
    results: &[(Option<Graph>, InstanceRecord)],
) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let opt = |x: Option<String>| x.unwrap_or_default();
    let mut w = csv::Writer::from_path(dir.join("correctness.csv"))?;
    w.write_record([
        "generator",
        "n",
        "seed",
        "edges",
        "expected",
        "found",
        "agrees",
        "detection_level",
        "levels",
        "total_rounds",
        "error",
    ])?;
    for r in &report.records {
        w.write_record([
            r.generator.clone(),
            r.n.to_string(),
            r.seed.to_string(),
            r.edges.to_string(),
            r.expected.to_string(),
            opt(r.found.map(|b| b.to_string())),
            r.agrees().to_string(),
            opt(r.detection_level.map(|l| l.to_string())),
            r.levels.to_string(),
            r.total_rounds.to_string(),
            opt(r.error.clone()),
        ])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("scaling.csv"))?;
    w.write_record(["n", "seed", "total_rounds", "subnetwork_rounds", "heavy_rounds"])?;
    for r in &report.records {
        w.write_record([
            r.n.to_string(),
            r.seed.to_string(),
            r.total_rounds.to_string(),
            r.subnetwork_rounds.to_string(),
            r.heavy_rounds.to_string(),
        ])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("phases.csv"))?;
    w.write_record(["n", "seed", "phase", "rounds"])?;
    for r in &report.records {
        for (phase, rounds) in &r.phases {
            w.write_record([r.n.to_string(), r.seed.to_string(), phase.clone(), rounds.to_string()])?;
        }
    }
    w.flush()?;
    fs::write(
        dir.join("fit.txt"),
        format!("{}constants={}\n", report.fit_text(), config.constants.describe()),
    )?;
    // Graphs of disagreeing instances, for replay.
    let failing = dir.join("instances");
    for (g, r) in results {
        if let (Some(g), false) = (g, r.agrees()) {
            fs::create_dir_all(&failing)?;
            fs::write(failing.join(format!("n{}_seed{}.graph", r.n, r.seed)), write_graph(g))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_and_sizes() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("4, 9").unwrap(), vec![4, 9]);
        assert_eq!(parse_sizes("2^8,100").unwrap(), vec![256, 100]);
        assert!(parse_sizes("2^x").is_err());
    }

    #[test]
    fn fit_recovers_slope() {
        let pts: Vec<(usize, u64)> = [256usize, 1024, 4096]
            .iter()
            .map(|&n| (n, ((n as f64).powf(0.25) * (n as f64).log2().powi(4)).round() as u64))
            .collect();
        assert!((fit_exponent(&pts).unwrap() - 0.25).abs() < 0.01);
    }

    #[test]
    fn config_text_overrides() {
        let mut c = ExperimentConfig::default();
        c.apply_text("generator = planted:0.1\nsizes = 32\nseeds = 0..2\nc_t = 30\n")
            .unwrap();
        assert_eq!(c.sizes, vec![32]);
        assert_eq!(c.constants.c_t, 30.0);
        assert!(c.validate().is_ok());
        c.sizes.clear();
        assert_eq!(c.validate(), Err(ConfigError::EmptySweep));
    }

    #[test]
    fn sweep_is_deterministic_and_writes_reports() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ExperimentConfig {
            generator: GeneratorSpec::Planted { p: 0.1 },
            sizes: vec![40, 80],
            seeds: vec![1, 2],
            ..ExperimentConfig::default()
        };
        c.out_dir = Some(dir.path().to_path_buf());
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a, b);
        for f in ["correctness.csv", "scaling.csv", "phases.csv", "fit.txt"] {
            assert!(dir.path().join(f).exists());
        }
        let r = &a.records[0];
        let g = generate(&c.generator, r.n, r.seed).unwrap();
        let out = replay(&g, r.seed, &c.constants).unwrap();
        assert_eq!(out.ledger.total(), r.total_rounds);
    }
}

//! Benchmark harness: run algorithms over generated corpora and report values
//! and ratios against the exact optimum as CSV.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{aggregate_approx, brute_force, dp_small_k, AggregationMode, DpOptions, DEFAULT_ENUM_CAP};
use crate::generators::{gen_gap, gen_random};
use crate::instance::{Instance, Objective, Selection};
use crate::lp::{solve_lstar, LpResult};
use crate::rounding::{round_pessimistic, round_randomized, round_rmax};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Brute,
    Dp,
    MaxAgg,
    Midpoint,
    Rmax,
    Randomized,
    Pessimistic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Brute,
        Algorithm::Dp,
        Algorithm::MaxAgg,
        Algorithm::Midpoint,
        Algorithm::Rmax,
        Algorithm::Randomized,
        Algorithm::Pessimistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Brute => "brute",
            Algorithm::Dp => "dp",
            Algorithm::MaxAgg => "maxagg",
            Algorithm::Midpoint => "midpoint",
            Algorithm::Rmax => "rmax",
            Algorithm::Randomized => "rand",
            Algorithm::Pessimistic => "pessimistic",
        }
    }

    fn needs_lp(self) -> bool {
        matches!(self, Algorithm::Rmax | Algorithm::Randomized | Algorithm::Pessimistic)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm {s:?}")))
    }
}

/// Runs one algorithm and returns its selection. The LP result is required
/// for the rounding algorithms.
pub fn run_algorithm(
    instance: &Instance,
    algorithm: Algorithm,
    objective: Objective,
    lp: Option<&LpResult>,
    seed: u64,
    cap: u128,
) -> Result<Selection> {
    let need_lp = || lp.ok_or_else(|| Error::InvalidArgument("LP result required".into()));
    Ok(match algorithm {
        Algorithm::Brute => brute_force(instance, objective, cap)?.argmin,
        Algorithm::Dp => dp_small_k(instance, objective, DpOptions::default())?.argmin,
        Algorithm::MaxAgg => aggregate_approx(instance, AggregationMode::MaxAgg),
        Algorithm::Midpoint => aggregate_approx(instance, AggregationMode::Midpoint),
        Algorithm::Rmax => round_rmax(instance, need_lp()?),
        Algorithm::Randomized => round_randomized(instance, need_lp()?, seed).selection,
        Algorithm::Pessimistic => round_pessimistic(instance, need_lp()?)?.selection,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Gap { p: usize },
    Random { p: usize, r: usize, k: usize, cost_max: u64 },
    Fixed { id: String, instance: Instance },
}

impl GeneratorSpec {
    fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Gap { .. } => "gap",
            GeneratorSpec::Random { .. } => "random",
            GeneratorSpec::Fixed { .. } => "fixed",
        }
    }

    fn params(&self) -> String {
        match self {
            GeneratorSpec::Gap { p } => format!("p={p}"),
            GeneratorSpec::Random { p, r, k, cost_max } => {
                format!("p={p};r={r};K={k};cost_max={cost_max}")
            }
            GeneratorSpec::Fixed { id, .. } => format!("id={id}"),
        }
    }
}

/// A generator and the seeds to run it with. Seeds drive random instance
/// generation and the randomized rounder; deterministic generators yield
/// one instance per seed all the same.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub generator: GeneratorSpec,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub corpus: Vec<CorpusEntry>,
    pub algorithms: Vec<Algorithm>,
    pub objective: Objective,
    /// Selections the oracle may enumerate; above it, no ratio is reported.
    pub oracle_cap: u128,
    /// Record wall time. Off by default so reports are byte-reproducible.
    pub timing: bool,
}

impl BenchConfig {
    pub fn new(corpus: Vec<CorpusEntry>, algorithms: Vec<Algorithm>) -> Self {
        BenchConfig {
            corpus,
            algorithms,
            objective: Objective::MinMax,
            oracle_cap: DEFAULT_ENUM_CAP,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance_id: String,
    pub generator: String,
    pub params: String,
    pub algorithm: String,
    pub objective: String,
    pub value: Option<u64>,
    /// `value / OPT` when the oracle ran and `OPT > 0`.
    pub ratio: Option<f64>,
    pub l_star: Option<f64>,
    /// `value / L*`, the empirical integrality ratio (min-max objective only).
    pub lp_ratio: Option<f64>,
    pub wall_ms: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

struct Job {
    id: String,
    generator: String,
    params: String,
    seed: u64,
    instance: Result<Instance>,
}

fn jobs(corpus: &[CorpusEntry]) -> Vec<Job> {
    let mut out = Vec::new();
    for entry in corpus {
        let seeds = if entry.seeds.is_empty() { vec![0] } else { entry.seeds.clone() };
        for seed in seeds {
            let instance = match &entry.generator {
                GeneratorSpec::Gap { p } => gen_gap(*p),
                GeneratorSpec::Random { p, r, k, cost_max } => gen_random(*p, *r, *k, *cost_max, seed),
                GeneratorSpec::Fixed { instance, .. } => Ok(instance.clone()),
            };
            let base = match &entry.generator {
                GeneratorSpec::Gap { p } => format!("gap-p{p}"),
                GeneratorSpec::Random { p, r, k, cost_max } => format!("random-p{p}-r{r}-k{k}-c{cost_max}"),
                GeneratorSpec::Fixed { id, .. } => id.clone(),
            };
            out.push(Job {
                id: format!("{base}-s{seed}"),
                generator: entry.generator.name().to_string(),
                params: entry.generator.params(),
                seed,
                instance,
            });
        }
    }
    out
}

pub fn run_bench(cfg: &BenchConfig) -> Vec<BenchRecord> {
    let jobs = jobs(&cfg.corpus);
    jobs.par_iter()
        .map(|job| bench_one(cfg, job))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn bench_one(cfg: &BenchConfig, job: &Job) -> Vec<BenchRecord> {
    let record = |algorithm: Algorithm| BenchRecord {
        instance_id: job.id.clone(),
        generator: job.generator.clone(),
        params: job.params.clone(),
        algorithm: algorithm.to_string(),
        objective: cfg.objective.to_string(),
        value: None,
        ratio: None,
        l_star: None,
        lp_ratio: None,
        wall_ms: None,
        seed: job.seed,
        error: None,
    };
    let instance = match &job.instance {
        Ok(i) => i,
        Err(e) => {
            return cfg
                .algorithms
                .iter()
                .map(|&a| BenchRecord {
                    error: Some(e.to_string()),
                    ..record(a)
                })
                .collect();
        }
    };
    if cfg.algorithms.is_empty() {
        return Vec::new();
    }

    let oracle = brute_force(instance, cfg.objective, cfg.oracle_cap)
        .ok()
        .map(|r| r.optimum);
    let lp = solve_lstar(instance);
    let l_star = lp.as_ref().ok().map(|r| r.l_star);

    cfg.algorithms
        .iter()
        .map(|&algorithm| {
            let mut rec = record(algorithm);
            rec.l_star = l_star;
            if algorithm.needs_lp() {
                if let Err(e) = &lp {
                    rec.error = Some(e.to_string());
                    return rec;
                }
            }
            let start = Instant::now();
            let sel = run_algorithm(
                instance,
                algorithm,
                cfg.objective,
                lp.as_ref().ok(),
                job.seed,
                cfg.oracle_cap,
            );
            let elapsed = start.elapsed();
            match sel.and_then(|s| instance.objective_value(&s, cfg.objective)) {
                Ok(value) => {
                    rec.value = Some(value);
                    rec.ratio = oracle.and_then(|opt| {
                        if opt > 0 {
                            Some(value as f64 / opt as f64)
                        } else if value == 0 {
                            Some(1.0)
                        } else {
                            None
                        }
                    });
                    if cfg.objective == Objective::MinMax {
                        rec.lp_ratio = l_star.filter(|&l| l > 0.0).map(|l| value as f64 / l);
                    }
                }
                Err(e) => rec.error = Some(e.to_string()),
            }
            if cfg.timing {
                rec.wall_ms = Some(elapsed.as_secs_f64() * 1e3);
            }
            rec
        })
        .collect()
}

const HEADER: [&str; 12] = [
    "instance_id",
    "generator",
    "params",
    "algorithm",
    "objective",
    "value",
    "ratio",
    "l_star",
    "lp_ratio",
    "wall_ms",
    "seed",
    "error",
];

/// Writes the records as CSV. The header is written even when there are no
/// records.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the gap-family growth table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub p: usize,
    pub scenarios: usize,
    /// `log2 K = p log2 p`.
    pub log2_k: f64,
    /// `log K / log log K` (natural logarithms).
    pub log_ratio: f64,
    pub l_star: f64,
    pub opt1: Option<u64>,
    /// Worst-case cost of the derandomized rounding.
    pub rounded: u64,
    /// `OPT_1 / L*` when the oracle ran.
    pub gap: Option<f64>,
}

/// Integrality gap of the gap family for each `p`, with the oracle run when
/// `p^p` selections fit under `oracle_cap`.
pub fn gap_scaling_table(ps: &[usize], oracle_cap: u128) -> Result<Vec<GapRow>> {
    ps.iter()
        .map(|&p| {
            let inst = gen_gap(p)?;
            let lp = solve_lstar(&inst)?;
            let opt1 = brute_force(&inst, Objective::MinMax, oracle_cap)
                .ok()
                .map(|r| r.optimum);
            let rounded = round_pessimistic(&inst, &lp)?.cost1;
            let k = inst.num_scenarios() as f64;
            Ok(GapRow {
                p,
                scenarios: inst.num_scenarios(),
                log2_k: k.log2(),
                log_ratio: k.ln() / k.ln().ln(),
                l_star: lp.l_star,
                opt1,
                rounded,
                gap: opt1.map(|o| o as f64 / lp.l_star),
            })
        })
        .collect()
}

pub fn write_gap_table<W: Write>(rows: &[GapRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ref_a;

    fn csv_of(cfg: &BenchConfig) -> String {
        let mut buf = Vec::new();
        write_csv(&run_bench(cfg), &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("simplex".parse::<Algorithm>().is_err());
    }

    #[test]
    fn empty_algorithm_list_gives_header_only() {
        let cfg = BenchConfig::new(
            vec![CorpusEntry {
                generator: GeneratorSpec::Gap { p: 2 },
                seeds: vec![],
            }],
            vec![],
        );
        assert_eq!(csv_of(&cfg), format!("{}\n", HEADER.join(",")));
    }

    #[test]
    fn ref_a_all_algorithms_hit_the_optimum() {
        let cfg = BenchConfig::new(
            vec![CorpusEntry {
                generator: GeneratorSpec::Fixed {
                    id: "ref-a".into(),
                    instance: ref_a(),
                },
                seeds: vec![1],
            }],
            Algorithm::ALL.to_vec(),
        );
        let recs = run_bench(&cfg);
        assert_eq!(recs.len(), 7);
        for r in &recs {
            assert_eq!(r.ratio, Some(1.0), "{r:?}");
            assert_eq!(r.value, Some(3));
            assert_eq!(r.l_star, Some(3.0));
        }
    }

    #[test]
    fn gap_family_lp_ratio_is_p() {
        let cfg = BenchConfig::new(
            vec![CorpusEntry {
                generator: GeneratorSpec::Gap { p: 3 },
                seeds: vec![0],
            }],
            vec![Algorithm::Rmax, Algorithm::Pessimistic, Algorithm::MaxAgg, Algorithm::Brute],
        );
        for r in run_bench(&cfg) {
            assert_eq!(r.value, Some(3));
            assert_eq!(r.ratio, Some(1.0));
            assert!((r.lp_ratio.unwrap() - 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn failures_are_recorded_and_run_continues() {
        let cfg = BenchConfig::new(
            vec![
                CorpusEntry {
                    generator: GeneratorSpec::Gap { p: 9 },
                    seeds: vec![0],
                },
                CorpusEntry {
                    generator: GeneratorSpec::Random { p: 3, r: 2, k: 4, cost_max: 5 },
                    seeds: vec![0, 1],
                },
            ],
            vec![Algorithm::Dp, Algorithm::MaxAgg],
        );
        let recs = run_bench(&cfg);
        assert_eq!(recs.len(), 6);
        assert!(recs[0].error.as_deref().unwrap().contains("exceeds cap"));
        // dp refuses K = 4, maxagg still runs
        assert!(recs[2].error.is_some() && recs[3].value.is_some());
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = BenchConfig::new(
            vec![CorpusEntry {
                generator: GeneratorSpec::Random { p: 5, r: 3, k: 6, cost_max: 20 },
                seeds: (0..8).collect(),
            }],
            Algorithm::ALL.to_vec(),
        );
        assert_eq!(csv_of(&cfg), csv_of(&cfg));
    }

    #[test]
    fn gap_table_small() {
        let rows = gap_scaling_table(&[2, 3], DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(rows[1].scenarios, 27);
        assert_eq!(rows[1].gap, Some(3.0));
        assert!((rows[1].log2_k - 3.0 * 3f64.log2()).abs() < 1e-12);
    }
}

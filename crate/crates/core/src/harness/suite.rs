use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig};
use super::context::TransferContext;
use super::corpus::{generate_domain_pair, generate_synthetic_corpus};
use super::loops::{run_curve, LearningCurve};
use crate::acquisition::StrategyKind;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{holm_adjust, wilcoxon_signed_rank, Alternative};

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const RUNS_DIR: &str = "runs";

/// One metric value of one run at one iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub strategy: String,
    pub seed: u64,
    pub iteration: usize,
    pub metric: String,
    pub value: f64,
}

/// Flattens a curve into rows, iteration-major. Classification curves
/// produce `bca`; regression curves produce `rmse_<dim>`, `rmse_mean`,
/// `cc_<dim>` and `cc_mean`. Undefined values become NaN.
pub fn curve_rows(curve: &LearningCurve<f64>, dimension_names: &[String]) -> Vec<CurveRow> {
    let mut rows = Vec::new();
    let strategy = curve.strategy.name().to_string();
    for (iteration, report) in curve.reports.iter().enumerate() {
        let mut push = |metric: String, value: Option<f64>| {
            rows.push(CurveRow { strategy: strategy.clone(), seed: curve.seed, iteration, metric, value: value.unwrap_or(f64::NAN) })
        };
        if let Some(b) = report.bca {
            push("bca".into(), Some(b));
        }
        if let Some(rmse) = &report.rmse {
            for (name, v) in dimension_names.iter().zip(rmse) {
                push(format!("rmse_{name}"), Some(*v));
            }
            push("rmse_mean".into(), report.rmse_mean());
        }
        if let Some(cc) = &report.cc {
            for (name, v) in dimension_names.iter().zip(cc) {
                push(format!("cc_{name}"), *v);
            }
            push("cc_mean".into(), report.cc_mean());
        }
    }
    rows
}

pub fn write_rows(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["strategy", "seed", "iteration", "metric", "value"])?;
    for r in rows {
        w.write_record([r.strategy.clone(), r.seed.to_string(), r.iteration.to_string(), r.metric.clone(), r.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<CurveRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record?);
    }
    Ok(rows)
}

/// Per-iteration mean of one strategy over seeds; `None` where no seed has a
/// finite value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyMeans {
    pub strategy: String,
    pub means: Vec<Option<f64>>,
}

/// One-sided paired test of `reference` being better than `other` at each
/// iteration, with Holm adjustment across all `other`s of the same reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: String,
    pub other: String,
    pub p_values: Vec<Option<f64>>,
    pub adjusted: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub higher_is_better: bool,
    pub strategies: Vec<StrategyMeans>,
    pub comparisons: Vec<Comparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seeds: Vec<u64>,
    pub metrics: Vec<MetricSummary>,
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.iter().any(|o| o == s) {
            out.push(s.to_string());
        }
    }
    out
}

/// Means and significance tables from curve rows. Strategies and metrics
/// keep their order of first appearance. RMSE is better when lower, every
/// other metric when higher.
pub fn summarize(rows: &[CurveRow]) -> Summary {
    let metrics = first_seen(rows.iter().map(|r| r.metric.as_str()));
    let strategies = first_seen(rows.iter().map(|r| r.strategy.as_str()));
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    let n_iter = rows.iter().map(|r| r.iteration + 1).max().unwrap_or(0);

    let mut out = Vec::new();
    for metric in metrics {
        // table[strategy][seed][iteration]
        let mut table = vec![vec![vec![f64::NAN; n_iter]; seeds.len()]; strategies.len()];
        for r in rows.iter().filter(|r| r.metric == metric) {
            let s = strategies.iter().position(|x| *x == r.strategy).expect("collected above");
            let k = seeds.binary_search(&r.seed).expect("collected above");
            table[s][k][r.iteration] = r.value;
        }
        let higher_is_better = !metric.starts_with("rmse");
        let alternative = if higher_is_better { Alternative::Greater } else { Alternative::Less };

        let means = strategies
            .iter()
            .enumerate()
            .map(|(s, name)| StrategyMeans {
                strategy: name.clone(),
                means: (0..n_iter)
                    .map(|t| {
                        let vals: Vec<f64> = table[s].iter().map(|seed| seed[t]).filter(|v| v.is_finite()).collect();
                        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
                    })
                    .collect(),
            })
            .collect();

        let mut comparisons = Vec::new();
        for (r, reference) in strategies.iter().enumerate() {
            let others: Vec<usize> = (0..strategies.len()).filter(|&o| o != r).collect();
            let mut raw = vec![vec![None; n_iter]; others.len()];
            let mut adjusted = vec![vec![None; n_iter]; others.len()];
            for t in 0..n_iter {
                for (slot, &o) in others.iter().enumerate() {
                    let (a, b): (Vec<f64>, Vec<f64>) = (0..seeds.len())
                        .map(|k| (table[r][k][t], table[o][k][t]))
                        .filter(|(x, y)| x.is_finite() && y.is_finite())
                        .unzip();
                    if !a.is_empty() {
                        raw[slot][t] = wilcoxon_signed_rank(&a, &b, alternative).ok().map(|w| w.p_value);
                    }
                }
                let present: Vec<usize> = (0..others.len()).filter(|&slot| raw[slot][t].is_some()).collect();
                let p: Vec<f64> = present.iter().map(|&slot| raw[slot][t].expect("filtered")).collect();
                for (&slot, q) in present.iter().zip(holm_adjust(&p)) {
                    adjusted[slot][t] = Some(q);
                }
            }
            for (slot, &o) in others.iter().enumerate() {
                comparisons.push(Comparison {
                    reference: reference.clone(),
                    other: strategies[o].clone(),
                    p_values: raw[slot].clone(),
                    adjusted: adjusted[slot].clone(),
                });
            }
        }
        out.push(MetricSummary { metric, higher_is_better, strategies: means, comparisons });
    }
    Summary { seeds, metrics: out }
}

/// Source and target datasets named by the config.
pub fn load_datasets(config: &ExperimentConfig) -> Result<(Dataset<f64>, Dataset<f64>)> {
    match &config.data {
        DataSource::Synthetic { corpus, source_groups, domain_shift } => match domain_shift {
            Some(shift) => generate_domain_pair(corpus, *shift),
            None => generate_synthetic_corpus(corpus)?.split_by_groups(source_groups),
        },
        DataSource::SplitFile { dataset, source_groups } => dataset.load()?.split_by_groups(source_groups),
        DataSource::Files { source, target } => Ok((source.load()?, target.load()?)),
    }
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub curves: Vec<LearningCurve<f64>>,
    pub summary: Summary,
    pub curves_path: PathBuf,
    pub summary_path: PathBuf,
}

fn run_file_name(strategy: StrategyKind, seed: u64) -> String {
    format!("{}_seed{seed}.csv", strategy.name())
}

/// Runs every (strategy, seed) pair, writing each run's rows to
/// `runs/<strategy>_seed<seed>.csv` as it completes, then the combined
/// `curves.csv` and `summary.json`. `jobs` bounds the worker threads.
pub fn run_suite(config: &ExperimentConfig, jobs: Option<usize>) -> Result<SuiteOutcome> {
    config.validate()?;
    let (source, target) = load_datasets(config)?;
    config.validate_pool(target.n_rows())?;
    let estimate = config.estimated_fits();
    if estimate > config.fit_warning_cap {
        log::warn!("about {estimate} model fits expected (cap {})", config.fit_warning_cap);
    }
    let ctx = TransferContext::prepare(config, &source, target)?;
    let dimension_names = ctx.target.dimension_names().to_vec();

    let out = &config.output_dir;
    fs::create_dir_all(out.join(RUNS_DIR))?;
    let runs: Vec<(StrategyKind, u64)> = config
        .resolved_strategies()
        .into_iter()
        .flat_map(|s| config.seeds.iter().map(move |&seed| (s, seed)))
        .collect();

    let work = || -> Result<Vec<LearningCurve<f64>>> {
        runs.par_iter()
            .map(|&(strategy, seed)| {
                let curve = run_curve(config, &ctx, strategy, seed)?;
                write_rows(&out.join(RUNS_DIR).join(run_file_name(strategy, seed)), &curve_rows(&curve, &dimension_names))?;
                log::info!("finished {strategy} seed {seed}");
                Ok(curve)
            })
            .collect()
    };
    let curves = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let rows: Vec<CurveRow> = curves.iter().flat_map(|c| curve_rows(c, &dimension_names)).collect();
    let curves_path = out.join(CURVES_FILE);
    write_rows(&curves_path, &rows)?;
    let summary = summarize(&rows);
    let summary_path = out.join(SUMMARY_FILE);
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(SuiteOutcome { curves, summary, curves_path, summary_path })
}

/// Recomputes `summary.json` in `dir` from its `curves.csv`.
pub fn report(dir: &Path) -> Result<Summary> {
    let rows = read_rows(&dir.join(CURVES_FILE))?;
    let summary = summarize(&rows);
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

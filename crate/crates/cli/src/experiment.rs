//! Monte-Carlo density sweeps: failure-rate tallies, sigmoid fit and CSV.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use mixcore::hash::trial_seed;
use mixcore::{fit_sigmoid, generate_mixed, has_empty_core, EdgeMix, HypergraphError, NumericsError, SigmoidFit};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("densities must be positive, finite and strictly increasing")]
    Densities,
    #[error("trials per density must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Graph(#[from] HypergraphError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mix: EdgeMix,
    pub n: usize,
    pub densities: Vec<f64>,
    pub trials_per_density: usize,
    pub base_seed: u64,
    /// Worker count hint; 0 lets rayon decide. Results do not depend on it.
    pub parallelism: usize,
}

impl SweepConfig {
    /// `steps` equidistant densities over `center ± span/2`.
    pub fn centered(center: f64, span: f64, steps: usize) -> Vec<f64> {
        if steps == 1 {
            return vec![center];
        }
        (0..steps).map(|i| center + span * (i as f64 / (steps - 1) as f64 - 0.5)).collect()
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials_per_density == 0 {
            return Err(ExperimentError::NoTrials);
        }
        let ok =
            self.densities.iter().all(|c| c.is_finite() && *c > 0.0) && self.densities.windows(2).all(|w| w[0] < w[1]);
        if !ok || self.densities.is_empty() {
            return Err(ExperimentError::Densities);
        }
        let k = self.mix.max_size();
        if self.n < k as usize {
            return Err(HypergraphError::TooFewNodes { n: self.n, k }.into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRecord {
    pub c: f64,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
}

impl DensityRecord {
    fn new(c: f64, trials: usize, failures: usize) -> Self {
        Self { c, trials, failures, failure_rate: failures as f64 / trials as f64 }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<DensityRecord>,
    pub config: SweepConfig,
    pub wall_time: Duration,
}

/// Builds `trials_per_density` hypergraphs per density with `m = round(c·n)`
/// and counts non-empty 2-cores. Trial `(i, j)` is seeded by
/// `trial_seed(base_seed, i, j)`, so the tallies are the same for any worker
/// count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, ExperimentError> {
    config.validate()?;
    let start = Instant::now();
    let trials = config.trials_per_density;
    let tasks: Vec<(usize, usize)> =
        (0..config.densities.len()).flat_map(|i| (0..trials).map(move |j| (i, j))).collect();
    let run = || -> Result<Vec<bool>, HypergraphError> {
        tasks
            .par_iter()
            .map(|&(i, j)| {
                let m = (config.densities[i] * config.n as f64).round() as usize;
                let seed = trial_seed(config.base_seed, i as u64, j as u64);
                let h = generate_mixed(config.n, m, &config.mix, seed)?;
                Ok(!has_empty_core(&h))
            })
            .collect()
    };
    let failed = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?
        .install(run)?;

    let records = config
        .densities
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let failures = failed[i * trials..(i + 1) * trials].iter().filter(|&&f| f).count();
            DensityRecord::new(c, trials, failures)
        })
        .collect();
    Ok(SweepResult { records, config: config.clone(), wall_time: start.elapsed() })
}

/// Fits the sigmoid to the measured rates, starting from the first density
/// whose rate reaches 0.5 (the sweep midpoint if none does) and a width of a
/// tenth of the span.
pub fn estimate_threshold(records: &[DensityRecord]) -> Result<SigmoidFit, NumericsError> {
    let (first, last) = match records {
        [] => return Err(NumericsError::InsufficientData(0)),
        [r, .., s] => (r.c, s.c),
        [r] => (r.c, r.c),
    };
    let init_x = records.iter().find(|r| r.failure_rate >= 0.5).map_or(0.5 * (first + last), |r| r.c);
    let init_y = (last - first) / 10.0;
    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.c, r.failure_rate)).collect();
    fit_sigmoid(&points, init_x, init_y)
}

pub const CSV_HEADER: &str = "c,trials,failures,failure_rate";

pub fn emit_csv(records: &[DensityRecord], fit: Option<&SigmoidFit>, seed: u64) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{:.6},{},{},{:.6}", r.c, r.trials, r.failures, r.failure_rate);
    }
    if let Some(fit) = fit {
        let _ = writeln!(out, "# x={:.6}", fit.x);
        let _ = writeln!(out, "# y={:.6}", fit.y);
        let _ = writeln!(out, "# ss_res={:.6}", fit.ss_res);
    }
    let _ = writeln!(out, "# seed={seed}");
    out
}

/// Contents of a sweep CSV. Rates are recomputed from the integer counts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepCsv {
    pub records: Vec<DensityRecord>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub ss_res: Option<f64>,
    pub seed: Option<u64>,
}

pub fn parse_csv(text: &str) -> Result<SweepCsv, ExperimentError> {
    let mut out = SweepCsv::default();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: &str| ExperimentError::Parse { line, msg: msg.to_string() };
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(comment) = l.strip_prefix('#') {
            let Some((key, value)) = comment.trim().split_once('=') else {
                continue;
            };
            let float = || value.parse::<f64>().map_err(|_| err("bad number"));
            match key {
                "x" => out.x = Some(float()?),
                "y" => out.y = Some(float()?),
                "ss_res" => out.ss_res = Some(float()?),
                "seed" => out.seed = Some(value.parse().map_err(|_| err("bad seed"))?),
                _ => {}
            }
            continue;
        }
        if !saw_header {
            if l != CSV_HEADER {
                return Err(err("expected header c,trials,failures,failure_rate"));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = l.split(',').collect();
        if fields.len() != 4 {
            return Err(err("expected 4 fields"));
        }
        let c: f64 = fields[0].parse().map_err(|_| err("bad density"))?;
        let trials: usize = fields[1].parse().map_err(|_| err("bad trial count"))?;
        let failures: usize = fields[2].parse().map_err(|_| err("bad failure count"))?;
        if trials == 0 || failures > trials {
            return Err(err("failures must lie in [0, trials] with trials >= 1"));
        }
        out.records.push(DensityRecord::new(c, trials, failures));
    }
    if !saw_header {
        return Err(ExperimentError::Parse { line: 0, msg: "missing header".into() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixcore::sigmoid;

    fn uniform_config(density: f64, trials: usize) -> SweepConfig {
        SweepConfig {
            mix: EdgeMix::uniform(3).unwrap(),
            n: 10_000,
            densities: vec![density],
            trials_per_density: trials,
            base_seed: 5,
            parallelism: 0,
        }
    }

    #[test]
    fn far_below_and_above_threshold() {
        let low = run_sweep(&uniform_config(0.70, 50)).unwrap();
        assert_eq!(low.records[0].failure_rate, 0.0);
        let high = run_sweep(&uniform_config(0.95, 50)).unwrap();
        assert_eq!(high.records[0].failure_rate, 1.0);
    }

    #[test]
    fn single_trial_is_binary() {
        let r = run_sweep(&uniform_config(0.82, 1)).unwrap();
        assert!(r.records[0].failure_rate == 0.0 || r.records[0].failure_rate == 1.0);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let mut cfg = uniform_config(0.0, 8);
        cfg.n = 2000;
        cfg.densities = SweepConfig::centered(0.818, 0.04, 5);
        let runs: Vec<Vec<DensityRecord>> = [1, 2, 5]
            .iter()
            .map(|&p| {
                cfg.parallelism = p;
                run_sweep(&cfg).unwrap().records
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(run_sweep(&uniform_config(0.8, 0)), Err(ExperimentError::NoTrials)));
        let mut cfg = uniform_config(0.8, 1);
        cfg.densities = vec![0.8, 0.8];
        assert!(matches!(run_sweep(&cfg), Err(ExperimentError::Densities)));
        cfg.densities = vec![0.8];
        cfg.n = 2;
        assert!(matches!(run_sweep(&cfg), Err(ExperimentError::Graph(_))));
    }

    #[test]
    fn fit_recovers_exact_model_rates() {
        let records: Vec<DensityRecord> = SweepConfig::centered(0.85, 0.01, 9)
            .into_iter()
            .map(|c| DensityRecord { c, trials: 1, failures: 0, failure_rate: sigmoid(c, 0.85, 0.001) })
            .collect();
        let fit = estimate_threshold(&records).unwrap();
        assert!((fit.x - 0.85).abs() < 1e-9);
        assert!((fit.y - 0.001).abs() < 1e-9);
    }

    #[test]
    fn constant_rates_are_degenerate() {
        let records: Vec<DensityRecord> = [0.7, 0.71, 0.72].iter().map(|&c| DensityRecord::new(c, 10, 0)).collect();
        assert!(matches!(estimate_threshold(&records), Err(NumericsError::Degenerate { .. })));
    }

    #[test]
    fn csv_row_format() {
        let csv = emit_csv(&[DensityRecord::new(0.9, 10, 4)], None, 42);
        assert_eq!(csv, "c,trials,failures,failure_rate\n0.900000,10,4,0.400000\n# seed=42\n");
    }

    #[test]
    fn csv_round_trip() {
        let records: Vec<DensityRecord> =
            (0..9).map(|i| DensityRecord::new(0.9 + i as f64 * 0.001, 7, i % 8)).collect();
        let fit = SigmoidFit { x: 0.904, y: 0.0012, ss_res: 0.01, converged: true, iterations: 3 };
        let parsed = parse_csv(&emit_csv(&records, Some(&fit), 9)).unwrap();
        for (a, b) in parsed.records.iter().zip(&records) {
            assert_eq!(a.failure_rate, b.failure_rate);
            assert_eq!((a.trials, a.failures), (b.trials, b.failures));
        }
        assert_eq!(parsed.x, Some(0.904));
        assert_eq!(parsed.seed, Some(9));
        assert!(parse_csv("c,trials\n").is_err());
        assert!(parse_csv("c,trials,failures,failure_rate\n0.9,3,4,1.0\n").is_err());
    }
}

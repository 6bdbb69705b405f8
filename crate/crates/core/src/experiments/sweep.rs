use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degeneracy::{exact_even_degenerate, greedy_even_degenerate, GreedyPolicy, DEFAULT_DP_LIMIT};
use crate::error::{input, Error, Result};
use crate::removal::{
    block_count, make_uw_config, recursive_even_degenerate, uw_removal, CertifierParams, DEFAULT_S_FACTOR,
};
use crate::revelation::Revelation;
use crate::rng::RandomSource;
use crate::sampling::sample_gnp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Success rate of one (U, W)-removal on `G(n, p)`.
    RemovalSuccess,
    /// Fraction of `G(n, p)` certified even-degenerate: exact decider up to
    /// 22 vertices, recursive certifier above.
    DegeneracyRate,
    /// Same trials as `RemovalSuccess`; the quantity of interest is
    /// `|V_W| / n` over successful runs.
    RemainderSize,
    /// Agreement of randomized greedy removal with the exact decider.
    /// A success is a trial where both give the same verdict.
    GreedyVsExact,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::RemovalSuccess => "removal-success",
            Self::DegeneracyRate => "degeneracy-rate",
            Self::RemainderSize => "remainder-size",
            Self::GreedyVsExact => "greedy-vs-exact",
        }
    }
}

fn default_alpha() -> f64 {
    0.1
}

/// A sweep over an `n` grid times a `p` grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n_grid: Vec<usize>,
    pub p_grid: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Cells running longer than this are marked skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_secs: Option<f64>,
    /// Fill the `seconds` column. Off by default so that output is byte-stable.
    #[serde(default)]
    pub record_timing: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return input("trials must be at least 1");
        }
        if self.n_grid.is_empty() || self.p_grid.is_empty() {
            return input("n and p grids must be nonempty");
        }
        if let Some(&p) = self.p_grid.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return input(format!("p = {p} outside (0, 1)"));
        }
        if self.n_grid.contains(&0) {
            return input("n must be positive");
        }
        if let Some(sf) = self.s_factor {
            if !(sf > 0.0 && sf.is_finite()) {
                return input(format!("s-factor must be positive, got {sf}"));
            }
        }
        Ok(())
    }

    pub fn s_factor(&self) -> f64 {
        self.s_factor.unwrap_or(DEFAULT_S_FACTOR)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let spec: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Aggregate of one `(n, p)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SummaryCell {
    pub kind: ExperimentKind,
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    /// Number of probed blocks, for the removal kinds.
    pub s: Option<usize>,
    /// Parity-reserve size, when the certifier runs with an override.
    pub eta: Option<usize>,
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    /// Mean `|V_W| / n` over successful removals.
    pub mean_remainder_fraction: Option<f64>,
    /// Sample standard deviation of the same.
    pub stdev: Option<f64>,
    pub wall_clock: f64,
    /// Why the cell has no result, if it has none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl SummaryCell {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

struct Trial {
    success: bool,
    remainder: Option<f64>,
}

fn run_trial(spec: &ExperimentSpec, n: usize, p: f64, rng: &mut RandomSource) -> Result<Trial> {
    let g = sample_gnp(n, p, rng)?;
    match spec.kind {
        ExperimentKind::RemovalSuccess | ExperimentKind::RemainderSize => {
            let rev = Revelation::empty((g.edge_count() % 2) as u8, spec.alpha);
            let cfg = make_uw_config(n, &rev, spec.alpha, spec.s_factor(), rng)?;
            let out = uw_removal(&g, &cfg);
            Ok(Trial { success: out.succeeded(), remainder: out.remaining.map(|r| r.len() as f64 / n as f64) })
        }
        ExperimentKind::DegeneracyRate => {
            let success = if n <= DEFAULT_DP_LIMIT {
                exact_even_degenerate(&g)?.is_some()
            } else {
                let rev = Revelation::empty((g.edge_count() % 2) as u8, spec.alpha);
                let params = CertifierParams {
                    alpha: spec.alpha,
                    s_factor: spec.s_factor(),
                    eta: spec.eta,
                    ..CertifierParams::default()
                };
                recursive_even_degenerate(&g, &rev, &params, rng)?.order.is_some()
            };
            Ok(Trial { success, remainder: None })
        }
        ExperimentKind::GreedyVsExact => {
            if n > DEFAULT_DP_LIMIT {
                return crate::error::capacity(format!("greedy-vs-exact needs n <= {DEFAULT_DP_LIMIT}"));
            }
            let exact = exact_even_degenerate(&g)?.is_some();
            let greedy = greedy_even_degenerate(&g, GreedyPolicy::Random, rng).is_some();
            Ok(Trial { success: exact == greedy, remainder: None })
        }
    }
}

fn mean_stdev(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let stdev =
        if xs.len() > 1 { Some((xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()) } else { None };
    (Some(mean), stdev)
}

/// Runs every `(n, p)` cell of the sweep, `n` major.
///
/// Trial `i` of cell `c` draws from stream `c * trials + i` under the master
/// seed, and trials run in parallel with results reduced in trial order, so
/// the cells are identical for any thread count. A cell whose trials hit a
/// capacity or input error, or which runs past the time budget, is returned
/// with `skipped` set and no counts.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<SummaryCell>> {
    spec.validate()?;
    let budget = spec.time_budget_secs.map(Duration::from_secs_f64);
    let mut cells = Vec::new();
    let mut index = 0u64;
    for &n in &spec.n_grid {
        for &p in &spec.p_grid {
            let cell_index = index;
            index += 1;
            let start = Instant::now();
            let results: Vec<Result<Trial>> = (0..spec.trials as u64)
                .into_par_iter()
                .map(|i| {
                    if budget.is_some_and(|b| start.elapsed() > b) {
                        return Err(Error::Capacity("time budget exceeded".into()));
                    }
                    let mut rng = RandomSource::new(spec.master_seed, cell_index * spec.trials as u64 + i);
                    run_trial(spec, n, p, &mut rng)
                })
                .collect();
            let seconds = start.elapsed().as_secs_f64();
            let removal = matches!(spec.kind, ExperimentKind::RemovalSuccess | ExperimentKind::RemainderSize);
            let mut cell = SummaryCell {
                kind: spec.kind,
                n,
                p,
                alpha: spec.alpha,
                s: removal.then(|| block_count(n, spec.alpha, spec.s_factor())),
                eta: if spec.kind == ExperimentKind::DegeneracyRate { spec.eta } else { None },
                trials: spec.trials,
                successes: 0,
                failures: 0,
                mean_remainder_fraction: None,
                stdev: None,
                wall_clock: seconds,
                skipped: None,
            };
            if budget.is_some_and(|b| start.elapsed() > b) {
                cell.skipped = Some(format!("exceeded the time budget after {seconds:.1}s"));
                log::warn!("cell n={n} p={p} skipped: over time budget");
                cells.push(cell);
                continue;
            }
            let mut remainders = Vec::new();
            for r in results {
                match r {
                    Ok(t) => {
                        if t.success {
                            cell.successes += 1;
                            remainders.extend(t.remainder);
                        } else {
                            cell.failures += 1;
                        }
                    }
                    Err(e @ (Error::Capacity(_) | Error::Input(_))) => {
                        cell.skipped = Some(e.to_string());
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if let Some(reason) = &cell.skipped {
                log::warn!("cell n={n} p={p} skipped: {reason}");
                cell.successes = 0;
                cell.failures = 0;
            } else {
                (cell.mean_remainder_fraction, cell.stdev) = mean_stdev(&remainders);
            }
            log::info!("cell n={n} p={p}: {}/{} successes in {seconds:.2}s", cell.successes, cell.trials);
            cells.push(cell);
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ExperimentKind, n_grid: Vec<usize>, p_grid: Vec<f64>, trials: usize) -> ExperimentSpec {
        ExperimentSpec {
            kind,
            n_grid,
            p_grid,
            alpha: 0.1,
            s_factor: None,
            eta: None,
            trials,
            master_seed: 5,
            time_budget_secs: None,
            record_timing: false,
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{"kind":"removal-success","nGrid":[500,1000],"pGrid":[0.5],"trials":10,"masterSeed":3}"#;
        let s: ExperimentSpec = serde_json::from_str(json).unwrap();
        assert_eq!(s.alpha, 0.1);
        assert_eq!(s.s_factor(), DEFAULT_S_FACTOR);
        assert!(serde_json::from_str::<ExperimentSpec>(
            r#"{"kind":"removal-success","nGrid":[5],"pGrid":[0.5],"trials":1,"masterSeed":3,"bogus":1}"#
        )
        .is_err());
    }

    #[test]
    fn rejects_empty_grid_and_zero_trials() {
        assert!(spec(ExperimentKind::RemovalSuccess, vec![], vec![0.5], 3).validate().is_err());
        assert!(spec(ExperimentKind::RemovalSuccess, vec![10], vec![0.5], 0).validate().is_err());
        assert!(spec(ExperimentKind::RemovalSuccess, vec![10], vec![1.0], 1).validate().is_err());
    }

    #[test]
    fn removal_cells_add_up_and_repeat() {
        let s = spec(ExperimentKind::RemovalSuccess, vec![200, 400], vec![0.5], 12);
        let a = run_experiment(&s).unwrap();
        assert_eq!(a.len(), 2);
        for c in &a {
            assert_eq!(c.successes + c.failures, c.trials);
            assert!(c.s.is_some());
        }
        let b = run_experiment(&s).unwrap();
        let strip =
            |cs: &[SummaryCell]| cs.iter().map(|c| (c.successes, c.mean_remainder_fraction)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn tiny_removal_cell_is_skipped() {
        let mut s = spec(ExperimentKind::RemovalSuccess, vec![4], vec![0.5], 3);
        s.s_factor = Some(50.0);
        let cells = run_experiment(&s).unwrap();
        assert!(cells[0].skipped.is_some());
        assert_eq!(cells[0].successes + cells[0].failures, 0);
    }

    #[test]
    fn greedy_never_beats_exact() {
        let s = spec(ExperimentKind::GreedyVsExact, vec![8, 10], vec![0.3, 0.7], 200);
        for c in run_experiment(&s).unwrap() {
            assert!(c.skipped.is_none());
            assert_eq!(c.successes + c.failures, 200);
        }
    }

    #[test]
    fn degeneracy_rate_small_n() {
        let s = spec(ExperimentKind::DegeneracyRate, vec![4, 12], vec![0.5], 300);
        let cells = run_experiment(&s).unwrap();
        assert!(cells[0].success_rate() <= cells[1].success_rate());
    }
}

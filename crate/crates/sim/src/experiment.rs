//! Monte Carlo sweep over element counts, rate profiles and schemes.

use rayon::prelude::*;
use star_ris::link::watts_to_dbm;
use star_ris::{
    realize_channels, solve_conventional_split, solve_independent_phase, solve_instance, Access, ChannelSetF64,
    Scenario, SolveResultF64,
};

use crate::config::{ExperimentConfig, RateProfile, Scheme, SchemeKind};
use crate::seed;

/// Written in the `order` column when a realization could not be solved.
pub const NO_ORDER: &str = "NONE";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scheme: SchemeKind,
    pub access: Access,
    pub n_elements: usize,
    pub profile: String,
    pub realization: usize,
    /// Seed of the channel draw.
    pub seed: u64,
    pub power_w: f64,
    pub power_dbm: f64,
    pub order: String,
    pub iterations: usize,
    pub converged: bool,
}

impl ResultRow {
    pub fn scheme(&self) -> Scheme {
        Scheme::new(self.scheme, self.access)
    }

    pub fn is_valid(&self) -> bool {
        self.power_dbm.is_finite()
    }
}

/// Mean and standard error of `power_dbm` over one sweep cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub profile: String,
    pub access: Access,
    pub scheme: SchemeKind,
    pub n_elements: usize,
    pub mean_dbm: f64,
    pub stderr_dbm: f64,
    pub count: usize,
    /// Rows left out of the statistics because they failed.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<CellSummary>,
}

impl ExperimentOutput {
    pub fn cell(&self, profile: &str, scheme: Scheme, n_elements: usize) -> Option<&CellSummary> {
        self.summary.iter().find(|c| {
            c.profile == profile && c.scheme == scheme.kind && c.access == scheme.access && c.n_elements == n_elements
        })
    }

    pub fn excluded(&self) -> usize {
        self.summary.iter().map(|c| c.excluded).sum()
    }
}

/// The scenario of one sweep cell.
pub fn cell_scenario(cfg: &ExperimentConfig, n_elements: usize, profile: &RateProfile, access: Access) -> Scenario {
    cfg.scenario
        .with_elements(n_elements)
        .with_rates(profile.rate_t, profile.rate_r)
        .with_access(access)
}

/// Solves every configured scheme on one channel realization, in config
/// order.
pub fn solve_schemes(
    cfg: &ExperimentConfig,
    ch: &ChannelSetF64,
    profile: &RateProfile,
    solver_seed: u64,
) -> Vec<(Scheme, star_ris::Result<SolveResultF64>)> {
    let n = ch.len();
    let mut coupled: Vec<(Access, star_ris::Result<SolveResultF64>)> = Vec::new();
    let mut coupled_for = |access: Access| -> star_ris::Result<SolveResultF64> {
        if let Some((_, r)) = coupled.iter().find(|(a, _)| *a == access) {
            return r.clone();
        }
        let s = cell_scenario(cfg, n, profile, access);
        let r = solve_instance(ch, &s, &cfg.ao, &mut seed::rng(solver_seed));
        coupled.push((access, r.clone()));
        r
    };

    let mut out = Vec::with_capacity(cfg.schemes.len());
    for &scheme in &cfg.schemes {
        let s = cell_scenario(cfg, n, profile, scheme.access);
        let result = match scheme.kind {
            SchemeKind::Coupled => coupled_for(scheme.access),
            SchemeKind::Independent if cfg.warm_start_independent => coupled_for(scheme.access).and_then(|c| {
                solve_independent_phase(ch, &s, &cfg.ao, &mut seed::rng(solver_seed), Some(&c.coefficients))
            }),
            SchemeKind::Independent => solve_independent_phase(ch, &s, &cfg.ao, &mut seed::rng(solver_seed), None),
            SchemeKind::Conventional => solve_conventional_split(ch, &s),
        };
        out.push((scheme, result));
    }
    out
}

fn row_from(
    scheme: Scheme,
    n_elements: usize,
    profile: &str,
    realization: usize,
    seed: u64,
    result: &star_ris::Result<SolveResultF64>,
) -> ResultRow {
    let base = ResultRow {
        scheme: scheme.kind,
        access: scheme.access,
        n_elements,
        profile: profile.to_string(),
        realization,
        seed,
        power_w: f64::NAN,
        power_dbm: f64::NAN,
        order: NO_ORDER.to_string(),
        iterations: 0,
        converged: false,
    };
    match result {
        Ok(r) if r.power.total_w.is_finite() => ResultRow {
            power_w: r.power.total_w,
            power_dbm: watts_to_dbm(r.power.total_w),
            order: r.power.order.as_str().to_string(),
            iterations: r.iterations,
            converged: r.converged,
            ..base
        },
        _ => base,
    }
}

/// Rows for every scheme of one (N, profile, realization) cell entry.
pub fn run_realization(
    cfg: &ExperimentConfig,
    n_elements: usize,
    profile: &RateProfile,
    realization: usize,
) -> Vec<ResultRow> {
    let ch_seed = seed::channel_seed(cfg.master_seed, realization);
    let scenario = cfg.scenario.with_elements(n_elements);
    match realize_channels::<f64, _>(&mut seed::rng(ch_seed), &scenario) {
        Ok(ch) => solve_schemes(cfg, &ch, profile, seed::solver_seed(ch_seed, n_elements))
            .into_iter()
            .map(|(scheme, r)| row_from(scheme, n_elements, &profile.name, realization, ch_seed, &r))
            .collect(),
        Err(e) => cfg
            .schemes
            .iter()
            .map(|&scheme| row_from(scheme, n_elements, &profile.name, realization, ch_seed, &Err(e.clone())))
            .collect(),
    }
}

/// Sample mean and standard error; the error of a single sample is zero.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

pub fn summarize(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Vec<CellSummary> {
    let mut out = Vec::new();
    for profile in &cfg.profiles {
        for &scheme in &cfg.schemes {
            for &n in &cfg.n_values {
                let cell: Vec<&ResultRow> = rows
                    .iter()
                    .filter(|r| r.profile == profile.name && r.scheme() == scheme && r.n_elements == n)
                    .collect();
                let values: Vec<f64> = cell.iter().filter(|r| r.is_valid()).map(|r| r.power_dbm).collect();
                let (mean_dbm, stderr_dbm) = mean_stderr(&values);
                out.push(CellSummary {
                    profile: profile.name.clone(),
                    access: scheme.access,
                    scheme: scheme.kind,
                    n_elements: n,
                    mean_dbm,
                    stderr_dbm,
                    count: values.len(),
                    excluded: cell.len() - values.len(),
                });
            }
        }
    }
    out
}

/// Runs the full sweep. Rows come out in sweep order (element count, rate
/// profile, scheme, realization) whatever the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, crate::config::ConfigError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize, usize)> = (0..cfg.n_values.len())
        .flat_map(|i| (0..cfg.profiles.len()).flat_map(move |p| (0..cfg.realizations).map(move |r| (i, p, r))))
        .collect();
    let work = || -> Vec<Vec<ResultRow>> {
        jobs.par_iter()
            .map(|&(i, p, r)| run_realization(cfg, cfg.n_values[i], &cfg.profiles[p], r))
            .collect()
    };
    let per_job = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    };

    let n_schemes = cfg.schemes.len();
    let mut rows = Vec::with_capacity(jobs.len() * n_schemes);
    let per_cell = cfg.realizations;
    for cell in per_job.chunks(per_cell) {
        for s in 0..n_schemes {
            rows.extend(cell.iter().map(|job_rows| job_rows[s].clone()));
        }
    }
    let summary = summarize(cfg, &rows);
    Ok(ExperimentOutput { rows, summary })
}

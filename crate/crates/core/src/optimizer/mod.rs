//! Element-wise alternating optimization of the STAR coefficients.

mod ao;
pub mod search;
pub mod subproblem;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::PowerBreakdown;
use crate::star::StarCoefficients;

pub(crate) use ao::access_power;
pub use ao::{
    ao_solve, ao_solve_from, random_coupled_init, random_independent_init, solve_instance, solve_instance_from,
    PhaseModel,
};
pub use subproblem::{
    amplitude_affine_decomposition, phase_affine_decomposition, solve_amplitude_element, solve_amplitude_element_sca,
    solve_phase_element, taylor_sqrt_lower_bound, AmplitudeAffine, AmplitudeChoice, AmplitudeSubproblem, PhaseAffine,
    PhaseChoice, PhaseSubproblem,
};

/// How the amplitude step of each element is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeSolver {
    /// Dense grid plus golden-section polish (global up to grid resolution).
    #[default]
    Grid,
    /// Successive convex approximation from the current amplitude.
    Sca,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AOConfig {
    /// Stop once an outer iteration lowers the objective by less than this
    /// fraction.
    pub rel_tolerance: f64,
    pub max_outer_iters: usize,
    pub phase_grid_points: usize,
    pub amplitude_grid_points: usize,
    pub refine_tolerance: f64,
    pub sca_max_iters: usize,
    pub amplitude_solver: AmplitudeSolver,
}

impl Default for AOConfig {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-4,
            max_outer_iters: 100,
            phase_grid_points: 1024,
            amplitude_grid_points: 1001,
            refine_tolerance: 1e-9,
            sca_max_iters: 50,
            amplitude_solver: AmplitudeSolver::Grid,
        }
    }
}

impl AOConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str| Err(Error::InvalidScenario(format!("ao.{field} must be positive")));
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance.is_finite()) {
            return bad("rel_tolerance");
        }
        if !(self.refine_tolerance > 0.0 && self.refine_tolerance.is_finite()) {
            return bad("refine_tolerance");
        }
        if self.max_outer_iters == 0 {
            return bad("max_outer_iters");
        }
        if self.phase_grid_points < 4 {
            return Err(Error::InvalidScenario("ao.phase_grid_points must be at least 4".into()));
        }
        if self.amplitude_grid_points < 2 {
            return Err(Error::InvalidScenario(
                "ao.amplitude_grid_points must be at least 2".into(),
            ));
        }
        if self.sca_max_iters == 0 {
            return bad("sca_max_iters");
        }
        Ok(())
    }
}

/// Subproblem solves performed by one optimization run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorkCounters {
    /// One per coupling sign (coupled model) or per user (independent
    /// model) and element.
    pub phase_solves: usize,
    pub amplitude_solves: usize,
    /// Solves per completed outer iteration, in order.
    pub per_iteration: Vec<usize>,
}

impl WorkCounters {
    pub fn total(&self) -> usize {
        self.phase_solves + self.amplitude_solves
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    pub power: PowerBreakdown<T>,
    pub coefficients: StarCoefficients<T>,
    /// Objective in watts: the starting value, then one entry per element
    /// update (committed or not).
    pub objective_trace: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub work: WorkCounters,
}

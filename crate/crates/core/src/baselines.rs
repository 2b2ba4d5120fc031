//! Reference schemes: the idealized independent-phase surface and a pair of
//! conventional reflect-only / transmit-only surfaces.

use num_complex::Complex;
use rand::Rng;

use crate::channel::{ChannelSet, Scenario};
use crate::error::{Error, Result};
use crate::link::{cascade, User};
use crate::optimizer::{
    access_power, random_independent_init, solve_instance_from, AOConfig, PhaseModel, SolveResult, WorkCounters,
};
use crate::scalar::{wrap_phase, Real};
use crate::star::{CouplingSign, StarCoefficients};

/// Same alternating optimization with the phase coupling dropped; each
/// phase step co-phases every user independently.
///
/// With `warm_start`, the run starts from those coefficients and never
/// returns a higher power than they achieve.
pub fn solve_independent_phase<T: Real, R: Rng + ?Sized>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    cfg: &AOConfig,
    rng: &mut R,
    warm_start: Option<&StarCoefficients<T>>,
) -> Result<SolveResult<T>> {
    let init = match warm_start {
        Some(c) => c.clone(),
        None => random_independent_init(rng, ch.len()),
    };
    let mut res = solve_instance_from(ch, scenario, cfg, init, PhaseModel::Independent)?;
    if let Some(c) = warm_start {
        let incumbent = access_power(ch, c, scenario)?;
        if incumbent.total_w < res.power.total_w {
            res.power = incumbent;
            res.coefficients = c.clone();
        }
    }
    Ok(res)
}

/// First half of the elements transmit only, second half reflect only, each
/// co-phased with its user's direct link. The unused phase of every element
/// is set by the coupling rule.
pub fn solve_conventional_split<T: Real>(ch: &ChannelSet<T>, scenario: &Scenario) -> Result<SolveResult<T>> {
    ch.validate()?;
    let n = ch.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddElementCount(n));
    }
    let h_t = cascade(ch, User::T);
    let h_r = cascade(ch, User::R);
    let co_phase = |d: Complex<T>, h: Complex<T>| wrap_phase(d.arg() - h.arg());
    let quarter = T::FRAC_PI_2();

    let mut c = StarCoefficients::even_split(n);
    for k in 0..n {
        if k < n / 2 {
            c.set_split(k, T::one());
            let theta_t = co_phase(ch.d_t, h_t[k]);
            c.set_coupled_phase(k, theta_t - quarter, CouplingSign::Plus);
        } else {
            c.set_split(k, T::zero());
            c.set_coupled_phase(k, co_phase(ch.d_r, h_r[k]), CouplingSign::Plus);
        }
    }
    let power = access_power(ch, &c, scenario)?;
    Ok(SolveResult {
        power,
        coefficients: c,
        objective_trace: vec![power.total_w],
        iterations: 1,
        converged: true,
        work: WorkCounters::default(),
    })
}

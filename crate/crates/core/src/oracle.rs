//! Exhaustive grid oracle for surfaces of at most two elements.
//!
//! Every element ranges over `phases` reflection phases, both coupling signs
//! and `amplitudes` energy splits. One element is a plain scan. For two
//! elements the first element's choices are visited in order of an
//! optimistic bound (the second element adding its full magnitude in phase
//! to both users), and the scan stops once that bound cannot beat the
//! incumbent, so the returned point is the exact grid optimum.

use num_complex::Complex;

use crate::channel::{ChannelSet, Scenario};
use crate::error::{Error, Result};
use crate::link::{cascade, Access, DecodingOrder, NomaOrder, ObjectiveWeights, User};
use crate::optimizer::{access_power, SolveResult, WorkCounters};
use crate::scalar::Real;
use crate::star::{CouplingSign, StarCoefficients};

pub const MAX_ORACLE_ELEMENTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResolution {
    pub phases: usize,
    pub amplitudes: usize,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self {
            phases: 720,
            amplitudes: 101,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Choice<T> {
    theta_r: T,
    sign: CouplingSign,
    beta_t: T,
    u_t: Complex<T>,
    u_r: Complex<T>,
}

fn amplitude_grid<T: Real>(res: &OracleResolution) -> Vec<T> {
    let m = res.amplitudes.max(2);
    (0..m)
        .map(|i| {
            if i == m - 1 {
                T::one()
            } else {
                T::of(i as f64 / (m - 1) as f64)
            }
        })
        .collect()
}

fn element_choices<T: Real>(h_t: Complex<T>, h_r: Complex<T>, res: &OracleResolution) -> Vec<Choice<T>> {
    let betas = amplitude_grid::<T>(res);
    let mut out = Vec::with_capacity(res.phases * 2 * betas.len());
    for i in 0..res.phases {
        let theta_r = T::TAU() * T::of(i as f64) / T::of(res.phases as f64);
        let q_r = Complex::from_polar(T::one(), theta_r);
        for sign in CouplingSign::BOTH {
            let q_t = sign.rotation::<T>() * q_r;
            for &beta_t in &betas {
                out.push(Choice {
                    theta_r,
                    sign,
                    beta_t,
                    u_t: h_t * q_t * beta_t.sqrt(),
                    u_r: h_r * q_r * (T::one() - beta_t).max(T::zero()).sqrt(),
                });
            }
        }
    }
    out
}

/// Objective weights of every allocation rule the access scheme may use.
fn weight_set<T: Real>(scenario: &Scenario) -> Vec<ObjectiveWeights<T>> {
    let targets = scenario.targets();
    let sigma2 = scenario.noise_power_w();
    match scenario.access {
        Access::Noma => NomaOrder::BOTH
            .iter()
            .map(|&o| ObjectiveWeights::new(&targets, sigma2, o.into()))
            .collect(),
        Access::Oma => vec![ObjectiveWeights::new(&targets, sigma2, DecodingOrder::Oma)],
    }
}

#[inline]
fn objective<T: Real>(weights: &[ObjectiveWeights<T>], gain_t: T, gain_r: T) -> T {
    weights
        .iter()
        .map(|w| w.objective(gain_t, gain_r))
        .fold(T::infinity(), |a, b| a.min(b))
}

fn result_from<T: Real>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    picks: &[Choice<T>],
    evaluations: usize,
) -> Result<SolveResult<T>> {
    let beta: Vec<T> = picks.iter().map(|c| c.beta_t).collect();
    let theta: Vec<T> = picks.iter().map(|c| c.theta_r).collect();
    let signs: Vec<CouplingSign> = picks.iter().map(|c| c.sign).collect();
    let coefficients = StarCoefficients::coupled(&beta, &theta, &signs)?;
    let power = access_power(ch, &coefficients, scenario)?;
    Ok(SolveResult {
        power,
        coefficients,
        objective_trace: vec![power.total_w],
        iterations: 1,
        converged: true,
        work: WorkCounters {
            phase_solves: evaluations,
            amplitude_solves: 0,
            per_iteration: vec![evaluations],
        },
    })
}

/// Global grid optimum of the coupled model for `N ≤ 2`.
pub fn brute_force_solve<T: Real>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    res: OracleResolution,
) -> Result<SolveResult<T>> {
    ch.validate()?;
    let n = ch.len();
    if n > MAX_ORACLE_ELEMENTS {
        return Err(Error::OracleTooLarge {
            max: MAX_ORACLE_ELEMENTS,
            found: n,
        });
    }
    let weights = weight_set::<T>(scenario);
    let h_t = cascade(ch, User::T);
    let h_r = cascade(ch, User::R);

    match n {
        0 => result_from(ch, scenario, &[], 1),
        1 => {
            let choices = element_choices(h_t[0], h_r[0], &res);
            let mut best = (T::infinity(), 0);
            for (i, c) in choices.iter().enumerate() {
                let f = objective(&weights, (ch.d_t + c.u_t).norm_sqr(), (ch.d_r + c.u_r).norm_sqr());
                if f < best.0 {
                    best = (f, i);
                }
            }
            result_from(ch, scenario, &[choices[best.1]], choices.len())
        }
        _ => {
            let first = element_choices(h_t[0], h_r[0], &res);
            let second = element_choices(h_t[1], h_r[1], &res);
            let betas = amplitude_grid::<T>(&res);
            let (m_t, m_r) = (h_t[1].norm(), h_r[1].norm());

            let mut bounded: Vec<(T, usize)> = first
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let a_t = (ch.d_t + c.u_t).norm();
                    let a_r = (ch.d_r + c.u_r).norm();
                    let lb = betas
                        .iter()
                        .map(|&b| {
                            let gt = a_t + b.sqrt() * m_t;
                            let gr = a_r + (T::one() - b).max(T::zero()).sqrt() * m_r;
                            objective(&weights, gt * gt, gr * gr)
                        })
                        .fold(T::infinity(), |a, b| a.min(b));
                    (lb, i)
                })
                .collect();
            bounded.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });

            let mut best = (T::infinity(), 0, 0);
            let mut evaluations = first.len();
            for &(lb, i) in &bounded {
                if !(lb < best.0) {
                    break;
                }
                let s_t = ch.d_t + first[i].u_t;
                let s_r = ch.d_r + first[i].u_r;
                for (j, c) in second.iter().enumerate() {
                    let f = objective(&weights, (s_t + c.u_t).norm_sqr(), (s_r + c.u_r).norm_sqr());
                    if f < best.0 {
                        best = (f, i, j);
                    }
                }
                evaluations += second.len();
            }
            result_from(ch, scenario, &[first[best.1], second[best.2]], evaluations)
        }
    }
}

/// Grid optimum of a single element with both phases free, used as a
/// companion bound: the coupled grid is a subset of this one whenever the
/// phase count is a multiple of four.
pub fn brute_force_independent<T: Real>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    res: OracleResolution,
) -> Result<SolveResult<T>> {
    ch.validate()?;
    if ch.len() != 1 {
        return Err(Error::OracleTooLarge {
            max: 1,
            found: ch.len(),
        });
    }
    let weights = weight_set::<T>(scenario);
    let h_t = cascade(ch, User::T)[0];
    let h_r = cascade(ch, User::R)[0];
    let phases: Vec<T> = (0..res.phases)
        .map(|i| T::TAU() * T::of(i as f64) / T::of(res.phases as f64))
        .collect();
    let best_phase = |d: Complex<T>, h: Complex<T>, amp: T| {
        phases
            .iter()
            .map(|&th| ((d + h * Complex::from_polar(amp, th)).norm_sqr(), th))
            .fold((T::neg_infinity(), T::zero()), |a, b| if b.0 > a.0 { b } else { a })
    };
    let mut best = (T::infinity(), T::zero(), T::zero(), T::zero());
    for b in amplitude_grid::<T>(&res) {
        let (gt, th_t) = best_phase(ch.d_t, h_t, b.sqrt());
        let (gr, th_r) = best_phase(ch.d_r, h_r, (T::one() - b).max(T::zero()).sqrt());
        let f = objective(&weights, gt, gr);
        if f < best.0 {
            best = (f, b, th_t, th_r);
        }
    }
    let coefficients = StarCoefficients::new(vec![best.1], vec![T::one() - best.1], vec![best.2], vec![best.3])?;
    let power = access_power(ch, &coefficients, scenario)?;
    Ok(SolveResult {
        power,
        coefficients,
        objective_trace: vec![power.total_w],
        iterations: 1,
        converged: true,
        work: WorkCounters::default(),
    })
}

use num_complex::Complex;
use rand::Rng;

use crate::channel::{ChannelSet, Scenario};
use crate::error::{Error, Result};
use crate::link::{
    best_noma_order, cascade, effective_gains, min_power, Access, DecodingOrder, NomaOrder, ObjectiveWeights,
    PowerBreakdown, RateTargets,
};
use crate::optimizer::subproblem::{
    solve_amplitude_element, solve_amplitude_element_sca, solve_phase_element, AmplitudeAffine, AmplitudeSubproblem,
    PhaseAffine, PhaseSubproblem,
};
use crate::optimizer::{AOConfig, AmplitudeSolver, SolveResult, WorkCounters};
use crate::scalar::{wrap_phase, Real};
use crate::star::{CouplingSign, StarCoefficients};

/// Which phase constraint the phase step honours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseModel {
    /// `θ_t = θ_r ± π/2` on every element.
    #[default]
    Coupled,
    /// Transmission and reflection phases chosen freely.
    Independent,
}

/// Random feasible start: uniform reflection phases, uniform coupling signs,
/// even energy split.
pub fn random_coupled_init<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> StarCoefficients<T> {
    let mut theta = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for _ in 0..n {
        theta.push(T::of(rng.random::<f64>() * std::f64::consts::TAU));
        signs.push(if rng.random::<bool>() {
            CouplingSign::Plus
        } else {
            CouplingSign::Minus
        });
    }
    StarCoefficients::coupled(&vec![T::of(0.5); n], &theta, &signs).expect("lengths agree")
}

/// Random start with both phases drawn independently.
pub fn random_independent_init<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> StarCoefficients<T> {
    let mut draw = || T::of(rng.random::<f64>() * std::f64::consts::TAU);
    let mut theta_t = Vec::with_capacity(n);
    let mut theta_r = Vec::with_capacity(n);
    for _ in 0..n {
        theta_r.push(draw());
        theta_t.push(draw());
    }
    let half = vec![T::of(0.5); n];
    StarCoefficients::new(half.clone(), half, theta_t, theta_r).expect("lengths agree")
}

/// Running state of one optimization: cascaded channels, coefficients and
/// the two effective-channel sums, so that every element update costs O(1)
/// outside its subproblem solve.
struct Engine<'a, T> {
    ch: &'a ChannelSet<T>,
    h_t: Vec<Complex<T>>,
    h_r: Vec<Complex<T>>,
    c: StarCoefficients<T>,
    sum_t: Complex<T>,
    sum_r: Complex<T>,
    weights: ObjectiveWeights<T>,
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(ch: &'a ChannelSet<T>, c: StarCoefficients<T>, weights: ObjectiveWeights<T>) -> Self {
        let mut engine = Self {
            ch,
            h_t: cascade(ch, crate::link::User::T),
            h_r: cascade(ch, crate::link::User::R),
            c,
            sum_t: Complex::new(T::zero(), T::zero()),
            sum_r: Complex::new(T::zero(), T::zero()),
            weights,
        };
        engine.resum();
        engine
    }

    fn contribution_t(&self, n: usize) -> Complex<T> {
        self.h_t[n] * Complex::from_polar(self.c.beta_t[n].max(T::zero()).sqrt(), self.c.theta_t[n])
    }

    fn contribution_r(&self, n: usize) -> Complex<T> {
        self.h_r[n] * Complex::from_polar(self.c.beta_r[n].max(T::zero()).sqrt(), self.c.theta_r[n])
    }

    /// Rebuilds both sums from scratch, discarding accumulated rounding.
    fn resum(&mut self) {
        let mut st = self.ch.d_t;
        let mut sr = self.ch.d_r;
        for n in 0..self.c.len() {
            st += self.contribution_t(n);
            sr += self.contribution_r(n);
        }
        self.sum_t = st;
        self.sum_r = sr;
    }

    fn objective(&self) -> T {
        self.weights.objective(self.sum_t.norm_sqr(), self.sum_r.norm_sqr())
    }

    fn candidate(&self, sum_t: Complex<T>, sum_r: Complex<T>) -> T {
        self.weights.objective(sum_t.norm_sqr(), sum_r.norm_sqr())
    }

    /// Coupled phase step of element `n`; returns whether it was committed.
    fn coupled_phase_step(&mut self, n: usize, cfg: &AOConfig, current: T) -> bool {
        let rest_t = self.sum_t - self.contribution_t(n);
        let rest_r = self.sum_r - self.contribution_r(n);
        let term_t = self.h_t[n] * self.c.beta_t[n].max(T::zero()).sqrt();
        let term_r = self.h_r[n] * self.c.beta_r[n].max(T::zero()).sqrt();
        let p = PhaseSubproblem::new(
            PhaseAffine::from_parts(term_t, rest_t),
            PhaseAffine::from_parts(term_r, rest_r),
            &self.weights,
        );
        let Ok(choice) = solve_phase_element(&p, cfg) else {
            return false;
        };
        let new_t = rest_t + term_t * choice.sign.rotation::<T>() * choice.q_r;
        let new_r = rest_r + term_r * choice.q_r;
        if !(self.candidate(new_t, new_r) <= current) {
            return false;
        }
        self.c.set_coupled_phase(n, choice.theta_r, choice.sign);
        self.sum_t = new_t;
        self.sum_r = new_r;
        true
    }

    /// Independent phase step: each user's phase co-phases its own term
    /// with the rest of its channel.
    fn independent_phase_step(&mut self, n: usize, current: T) -> bool {
        let rest_t = self.sum_t - self.contribution_t(n);
        let rest_r = self.sum_r - self.contribution_r(n);
        let term_t = self.h_t[n] * self.c.beta_t[n].max(T::zero()).sqrt();
        let term_r = self.h_r[n] * self.c.beta_r[n].max(T::zero()).sqrt();
        let b_t = PhaseAffine::from_parts(term_t, rest_t).b;
        let b_r = PhaseAffine::from_parts(term_r, rest_r).b;
        let pick = |b: Complex<T>, old: T| {
            if b.norm_sqr() > T::zero() {
                wrap_phase(-b.arg())
            } else {
                old
            }
        };
        let theta_t = pick(b_t, self.c.theta_t[n]);
        let theta_r = pick(b_r, self.c.theta_r[n]);
        let new_t = rest_t + term_t * Complex::from_polar(T::one(), theta_t);
        let new_r = rest_r + term_r * Complex::from_polar(T::one(), theta_r);
        if !(self.candidate(new_t, new_r) <= current) {
            return false;
        }
        self.c.theta_t[n] = theta_t;
        self.c.theta_r[n] = theta_r;
        self.sum_t = new_t;
        self.sum_r = new_r;
        true
    }

    fn amplitude_step(&mut self, n: usize, cfg: &AOConfig, current: T) -> bool {
        let rest_t = self.sum_t - self.contribution_t(n);
        let rest_r = self.sum_r - self.contribution_r(n);
        let unit_t = self.h_t[n] * Complex::from_polar(T::one(), self.c.theta_t[n]);
        let unit_r = self.h_r[n] * Complex::from_polar(T::one(), self.c.theta_r[n]);
        let p = AmplitudeSubproblem::new(
            AmplitudeAffine::from_parts(unit_t, rest_t),
            AmplitudeAffine::from_parts(unit_r, rest_r),
            &self.weights,
        );
        let solved = match cfg.amplitude_solver {
            AmplitudeSolver::Grid => solve_amplitude_element(&p, cfg),
            AmplitudeSolver::Sca => {
                let eps = T::of(1e-6);
                let beta0 = self.c.beta_t[n].max(eps).min(T::one() - eps);
                solve_amplitude_element_sca(&p, beta0, cfg)
            }
        };
        let Ok(choice) = solved else {
            return false;
        };
        let beta_t = choice.beta_t;
        let beta_r = T::one() - beta_t;
        let new_t = rest_t + unit_t * beta_t.max(T::zero()).sqrt();
        let new_r = rest_r + unit_r * beta_r.max(T::zero()).sqrt();
        if !(self.candidate(new_t, new_r) <= current) {
            return false;
        }
        self.c.set_split(n, beta_t);
        self.sum_t = new_t;
        self.sum_r = new_r;
        true
    }
}

/// Alternating optimization for one fixed allocation rule, from a random
/// coupled start.
pub fn ao_solve<T: Real, R: Rng + ?Sized>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    order: DecodingOrder,
    cfg: &AOConfig,
    rng: &mut R,
) -> Result<SolveResult<T>> {
    let init = random_coupled_init(rng, ch.len());
    ao_solve_from(ch, scenario, order, cfg, init, PhaseModel::Coupled)
}

/// Alternating optimization for one fixed allocation rule from given
/// coefficients.
///
/// Each outer iteration runs a phase pass then an amplitude pass over the
/// elements in ascending order. An element update is kept only if it does
/// not raise the objective.
pub fn ao_solve_from<T: Real>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    order: DecodingOrder,
    cfg: &AOConfig,
    init: StarCoefficients<T>,
    model: PhaseModel,
) -> Result<SolveResult<T>> {
    ch.validate()?;
    if init.len() != ch.len() {
        return Err(Error::DimensionMismatch {
            expected: ch.len(),
            found: init.len(),
        });
    }
    let targets: RateTargets<T> = scenario.targets();
    let sigma2: T = scenario.noise_power_w();
    let weights = ObjectiveWeights::new(&targets, sigma2, order);
    let n = ch.len();
    let rel_tol = T::of(cfg.rel_tolerance);

    let mut engine = Engine::new(ch, init, weights);
    let mut current = engine.objective();
    let mut trace = Vec::with_capacity(1 + 3 * n);
    trace.push(current);
    let mut work = WorkCounters::default();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_outer_iters {
        iterations += 1;
        engine.resum();
        // Re-summing moves the objective by rounding only; never let it
        // appear to rise.
        current = engine.objective().min(current);
        let start = current;
        let solves_before = work.total();

        for k in 0..n {
            match model {
                PhaseModel::Coupled => {
                    engine.coupled_phase_step(k, cfg, current);
                }
                PhaseModel::Independent => {
                    engine.independent_phase_step(k, current);
                }
            }
            work.phase_solves += 2;
            current = engine.objective().min(current);
            trace.push(current);
        }
        for k in 0..n {
            engine.amplitude_step(k, cfg, current);
            work.amplitude_solves += 1;
            current = engine.objective().min(current);
            trace.push(current);
        }
        work.per_iteration.push(work.total() - solves_before);

        if start.is_finite() && start - current <= rel_tol * start {
            converged = true;
            break;
        }
    }

    let gains = effective_gains(ch, &engine.c);
    let power = min_power(&gains, &targets, sigma2, order)?;
    Ok(SolveResult {
        power,
        coefficients: engine.c,
        objective_trace: trace,
        iterations,
        converged,
        work,
    })
}

/// Minimum power at fixed coefficients under the scenario's access scheme.
pub(crate) fn access_power<T: Real>(
    ch: &ChannelSet<T>,
    c: &StarCoefficients<T>,
    scenario: &Scenario,
) -> Result<PowerBreakdown<T>> {
    let gains = effective_gains(ch, c);
    let targets = scenario.targets();
    let sigma2 = scenario.noise_power_w();
    match scenario.access {
        Access::Noma => best_noma_order(&gains, &targets, sigma2),
        Access::Oma => min_power(&gains, &targets, sigma2, DecodingOrder::Oma),
    }
}

/// Solves one instance under the scenario's access scheme. NOMA runs both
/// decoding orders from the same random start and keeps the cheaper result.
pub fn solve_instance<T: Real, R: Rng + ?Sized>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    cfg: &AOConfig,
    rng: &mut R,
) -> Result<SolveResult<T>> {
    let init = random_coupled_init(rng, ch.len());
    solve_instance_from(ch, scenario, cfg, init, PhaseModel::Coupled)
}

/// [`solve_instance`] from given starting coefficients.
pub fn solve_instance_from<T: Real>(
    ch: &ChannelSet<T>,
    scenario: &Scenario,
    cfg: &AOConfig,
    init: StarCoefficients<T>,
    model: PhaseModel,
) -> Result<SolveResult<T>> {
    let orders: Vec<DecodingOrder> = match scenario.access {
        Access::Noma => NomaOrder::BOTH.iter().map(|&o| o.into()).collect(),
        Access::Oma => vec![DecodingOrder::Oma],
    };
    let mut best: Option<SolveResult<T>> = None;
    let mut first_err = None;
    for order in orders {
        match ao_solve_from(ch, scenario, order, cfg, init.clone(), model) {
            Ok(mut res) => {
                // The final point may favour the other decoding order.
                res.power = access_power(ch, &res.coefficients, scenario)?;
                if best.as_ref().is_none_or(|b| res.power.total_w < b.power.total_w) {
                    best = Some(res);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one order is tried"),
    }
}

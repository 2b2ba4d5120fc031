//! Single-element subproblems of the alternating optimization.
//!
//! With every coefficient but element `n` held fixed, each user's effective
//! gain is affine in the element's unit phasor,
//! `|c_k|² = A + 2·Re(B·q_n)`, and in the element's amplitude,
//! `|c_k|² = C + D·β + E·√β`. Both subproblems then reduce to a search over a
//! single real variable: the reflection phase (the transmission phasor is
//! `±j` times it) or the transmission energy fraction (`β_r = 1 − β_t`).

use num_complex::Complex;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::link::{cascade, ObjectiveWeights, User, MIN_GAIN};
use crate::optimizer::search::{golden_section, grid_then_golden};
use crate::optimizer::AOConfig;
use crate::scalar::{wrap_phase, Real};
use crate::star::{CouplingSign, StarCoefficients};

/// `|c_k|² = a + 2·Re(b·q)` for a unit-modulus `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAffine<T> {
    pub a: T,
    pub b: Complex<T>,
}

impl<T: Real> PhaseAffine<T> {
    /// `term` is the element's contribution without its phasor, `rest` the
    /// sum of every other contribution including the direct link.
    #[inline]
    pub fn from_parts(term: Complex<T>, rest: Complex<T>) -> Self {
        Self {
            a: rest.norm_sqr() + term.norm_sqr(),
            b: term * rest.conj(),
        }
    }

    #[inline]
    pub fn gain(&self, q: Complex<T>) -> T {
        self.a + T::of(2.0) * (self.b * q).re
    }
}

/// `|c_k|² = c + d·β + e·√β` in the element's energy fraction toward user k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeAffine<T> {
    pub c: T,
    pub d: T,
    pub e: T,
}

impl<T: Real> AmplitudeAffine<T> {
    /// `term` is the element's unit-amplitude contribution (phase applied),
    /// `rest` the sum of every other contribution including the direct link.
    #[inline]
    pub fn from_parts(term: Complex<T>, rest: Complex<T>) -> Self {
        Self {
            c: rest.norm_sqr(),
            d: term.norm_sqr(),
            e: T::of(2.0) * (term * rest.conj()).re,
        }
    }

    #[inline]
    pub fn gain(&self, beta: T) -> T {
        self.c + self.d * beta + self.e * beta.max(T::zero()).sqrt()
    }
}

fn user_parts<T: Real>(c: &StarCoefficients<T>, user: User) -> (&[T], &[T]) {
    match user {
        User::T => (&c.beta_t, &c.theta_t),
        User::R => (&c.beta_r, &c.theta_r),
    }
}

fn check_index(n: usize, len: usize) -> Result<()> {
    if n >= len {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: n + 1,
        });
    }
    Ok(())
}

/// Phase decomposition of element `n` (0-based) for `user`, computed from
/// scratch.
pub fn phase_affine_decomposition<T: Real>(
    ch: &ChannelSet<T>,
    c: &StarCoefficients<T>,
    user: User,
    n: usize,
) -> Result<PhaseAffine<T>> {
    check_index(n, ch.len())?;
    let h = cascade(ch, user);
    let (beta, theta) = user_parts(c, user);
    let d = if user == User::T { ch.d_t } else { ch.d_r };
    let mut rest = d;
    for l in (0..h.len()).filter(|&l| l != n) {
        rest += h[l] * Complex::from_polar(beta[l].max(T::zero()).sqrt(), theta[l]);
    }
    let term = h[n] * beta[n].max(T::zero()).sqrt();
    Ok(PhaseAffine::from_parts(term, rest))
}

/// Amplitude decomposition of element `n` (0-based) for `user`, computed from
/// scratch. `β` is the element's energy fraction toward `user`.
pub fn amplitude_affine_decomposition<T: Real>(
    ch: &ChannelSet<T>,
    c: &StarCoefficients<T>,
    user: User,
    n: usize,
) -> Result<AmplitudeAffine<T>> {
    check_index(n, ch.len())?;
    let h = cascade(ch, user);
    let (beta, theta) = user_parts(c, user);
    let d = if user == User::T { ch.d_t } else { ch.d_r };
    let mut rest = d;
    for l in (0..h.len()).filter(|&l| l != n) {
        rest += h[l] * Complex::from_polar(beta[l].max(T::zero()).sqrt(), theta[l]);
    }
    let term = h[n] * Complex::from_polar(T::one(), theta[n]);
    Ok(AmplitudeAffine::from_parts(term, rest))
}

/// Coupled phase subproblem of one element: minimize
/// `w_r/(a_r + 2Re(b_r e^{jφ})) + w_t/(a_t + 2Re(b_t·(±j)·e^{jφ}))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSubproblem<T> {
    pub a_t: T,
    pub a_r: T,
    pub b_t: Complex<T>,
    pub b_r: Complex<T>,
    pub w_t: T,
    pub w_r: T,
}

impl<T: Real> PhaseSubproblem<T> {
    pub fn new(t: PhaseAffine<T>, r: PhaseAffine<T>, w: &ObjectiveWeights<T>) -> Self {
        Self {
            a_t: t.a,
            a_r: r.a,
            b_t: t.b,
            b_r: r.b,
            w_t: w.w_t,
            w_r: w.w_r,
        }
    }

    /// `a − 2|b|` is the smallest reachable gain; it is never negative for a
    /// decomposition built from real channels.
    pub fn is_consistent(&self) -> bool {
        let slack = T::of(-1e-9);
        let two = T::of(2.0);
        self.a_t - two * self.b_t.norm() >= slack * self.a_t.max(T::one())
            && self.a_r - two * self.b_r.norm() >= slack * self.a_r.max(T::one())
    }

    #[inline]
    pub fn objective(&self, phi: T, sign: CouplingSign) -> T {
        let q_r = Complex::from_polar(T::one(), phi);
        let q_t = sign.rotation::<T>() * q_r;
        let two = T::of(2.0);
        let den_r = self.a_r + two * (self.b_r * q_r).re;
        let den_t = self.a_t + two * (self.b_t * q_t).re;
        let floor = T::of(MIN_GAIN);
        if !(den_r > floor && den_t > floor) {
            return T::infinity();
        }
        self.w_r / den_r + self.w_t / den_t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseChoice<T> {
    /// Reflection phase in `[0, 2π)`.
    pub theta_r: T,
    pub q_r: Complex<T>,
    pub sign: CouplingSign,
    pub objective: T,
}

impl<T: Real> PhaseChoice<T> {
    pub fn theta_t(&self) -> T {
        self.sign.transmission_phase(self.theta_r)
    }
}

/// Solves the coupled phase subproblem over both coupling signs.
pub fn solve_phase_element<T: Real>(p: &PhaseSubproblem<T>, cfg: &AOConfig) -> Result<PhaseChoice<T>> {
    let tol = T::of(cfg.refine_tolerance);
    let mut best: Option<PhaseChoice<T>> = None;
    for sign in CouplingSign::BOTH {
        let found = grid_then_golden(
            |phi| p.objective(phi, sign),
            T::zero(),
            T::TAU(),
            cfg.phase_grid_points,
            true,
            tol,
        );
        if let Some((phi, objective)) = found {
            if best.is_none_or(|b| objective < b.objective) {
                let theta_r = wrap_phase(phi);
                best = Some(PhaseChoice {
                    theta_r,
                    q_r: Complex::from_polar(T::one(), theta_r),
                    sign,
                    objective,
                });
            }
        }
    }
    best.ok_or(Error::ElementInfeasible)
}

/// Amplitude subproblem of one element in the transmission fraction `β`:
/// minimize `w_r/(c_r + d_r(1−β) + e_r√(1−β)) + w_t/(c_t + d_tβ + e_t√β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSubproblem<T> {
    pub c_t: T,
    pub c_r: T,
    pub d_t: T,
    pub d_r: T,
    pub e_t: T,
    pub e_r: T,
    pub w_t: T,
    pub w_r: T,
}

impl<T: Real> AmplitudeSubproblem<T> {
    pub fn new(t: AmplitudeAffine<T>, r: AmplitudeAffine<T>, w: &ObjectiveWeights<T>) -> Self {
        Self {
            c_t: t.c,
            c_r: r.c,
            d_t: t.d,
            d_r: r.d,
            e_t: t.e,
            e_r: r.e,
            w_t: w.w_t,
            w_r: w.w_r,
        }
    }

    #[inline]
    fn denominators(&self, beta: T) -> (T, T) {
        let rb = T::one() - beta;
        (
            self.c_t + self.d_t * beta + self.e_t * beta.max(T::zero()).sqrt(),
            self.c_r + self.d_r * rb + self.e_r * rb.max(T::zero()).sqrt(),
        )
    }

    #[inline]
    pub fn objective(&self, beta: T) -> T {
        let (den_t, den_r) = self.denominators(beta);
        ratio_sum(self.w_t, den_t, self.w_r, den_r)
    }
}

#[inline]
fn ratio_sum<T: Real>(w_t: T, den_t: T, w_r: T, den_r: T) -> T {
    let floor = T::of(MIN_GAIN);
    if !(den_t > floor && den_r > floor) {
        return T::infinity();
    }
    w_t / den_t + w_r / den_r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeChoice<T> {
    /// Transmission energy fraction; the reflection fraction is `1 − beta_t`.
    pub beta_t: T,
    pub objective: T,
}

/// Globally solves the amplitude subproblem up to grid resolution.
pub fn solve_amplitude_element<T: Real>(p: &AmplitudeSubproblem<T>, cfg: &AOConfig) -> Result<AmplitudeChoice<T>> {
    let tol = T::of(cfg.refine_tolerance);
    grid_then_golden(
        |b| p.objective(b),
        T::zero(),
        T::one(),
        cfg.amplitude_grid_points,
        false,
        tol,
    )
    .map(|(beta_t, objective)| AmplitudeChoice { beta_t, objective })
    .ok_or(Error::ElementInfeasible)
}

/// First-order lower bound of `e·√β` around `beta0`, valid for `e < 0`:
/// `e·(β + β0)/(2√β0)`.
pub fn taylor_sqrt_lower_bound<T: Real>(e: T, beta: T, beta0: T) -> Result<T> {
    if !(beta0 > T::zero()) {
        return Err(Error::Domain("Taylor expansion point must be positive"));
    }
    Ok(e * (beta + beta0) / (T::of(2.0) * beta0.sqrt()))
}

/// Successive convex approximation of the amplitude subproblem started at
/// `beta0 ∈ (0, 1)`.
///
/// Each round replaces `e·√β` by its tangent lower bound for every user with
/// `e < 0`, which makes the objective a convex majorizer tight at the current
/// point, and minimizes that surrogate. The returned objective is the true
/// one and never exceeds its value at `beta0`.
pub fn solve_amplitude_element_sca<T: Real>(
    p: &AmplitudeSubproblem<T>,
    beta0: T,
    cfg: &AOConfig,
) -> Result<AmplitudeChoice<T>> {
    if !(beta0 > T::zero() && beta0 < T::one()) {
        return Err(Error::Domain("SCA start point must lie in (0, 1)"));
    }
    let start = p.objective(beta0);
    if !start.is_finite() {
        return Err(Error::ElementInfeasible);
    }
    let tol = T::of(cfg.refine_tolerance);
    let rel_tol = T::of(cfg.rel_tolerance);
    let mut current = beta0;
    let mut current_val = start;

    for _ in 0..cfg.sca_max_iters {
        let anchor = current;
        let sqrt_term = |e: T, x: T, x0: T| {
            if e < T::zero() {
                e * (x + x0) / (T::of(2.0) * x0.sqrt())
            } else {
                e * x.max(T::zero()).sqrt()
            }
        };
        let surrogate = |b: T| {
            let rb = T::one() - b;
            let den_t = p.c_t + p.d_t * b + sqrt_term(p.e_t, b, anchor);
            let den_r = p.c_r + p.d_r * rb + sqrt_term(p.e_r, rb, T::one() - anchor);
            ratio_sum(p.w_t, den_t, p.w_r, den_r)
        };
        let at_anchor = surrogate(anchor);
        // The surrogate denominators are concave, so the feasible set is an
        // interval around the anchor.
        let lo = feasible_edge(&surrogate, anchor, T::zero());
        let hi = feasible_edge(&surrogate, anchor, T::one());
        let (mut next, mut next_sur) = golden_section(&surrogate, lo, hi, tol);
        if !(next_sur <= at_anchor) {
            next = anchor;
            next_sur = at_anchor;
        }
        let decrease = at_anchor - next_sur;
        let next_val = p.objective(next);
        if next_val <= current_val {
            current = next;
            current_val = next_val;
        }
        let interior = current > T::zero() && current < T::one();
        if !(decrease > rel_tol * at_anchor) || !interior || current != next {
            break;
        }
    }
    Ok(AmplitudeChoice {
        beta_t: current,
        objective: current_val,
    })
}

/// Farthest point from `inside` toward `edge` where `f` stays finite.
fn feasible_edge<T: Real, F: Fn(T) -> T>(f: &F, inside: T, edge: T) -> T {
    if f(edge).is_finite() {
        return edge;
    }
    let (mut good, mut bad) = (inside, edge);
    for _ in 0..80 {
        let mid = (good + bad) / T::of(2.0);
        if f(mid).is_finite() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::{effective_gain, DecodingOrder, RateTargets};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn random_instance(rng: &mut ChaCha20Rng, n: usize) -> (ChannelSet<f64>, StarCoefficients<f64>) {
        let mut z = || c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let ch = ChannelSet {
            d_t: z(),
            d_r: z(),
            v_t: (0..n).map(|_| z()).collect(),
            v_r: (0..n).map(|_| z()).collect(),
            g: (0..n).map(|_| z()).collect(),
        };
        let beta: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        let signs: Vec<CouplingSign> = (0..n)
            .map(|_| {
                if rng.random() {
                    CouplingSign::Plus
                } else {
                    CouplingSign::Minus
                }
            })
            .collect();
        (ch, StarCoefficients::coupled(&beta, &theta, &signs).unwrap())
    }

    fn single(d: Complex<f64>, v: Complex<f64>, g: Complex<f64>) -> ChannelSet<f64> {
        ChannelSet {
            d_t: d,
            d_r: d,
            v_t: vec![v],
            v_r: vec![v],
            g: vec![g],
        }
    }

    #[test]
    fn phase_decomposition_examples() {
        let coeffs = StarCoefficients::new(vec![1.0], vec![0.0], vec![0.0], vec![FRAC_PI_2]).unwrap();
        let ch = single(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let p = phase_affine_decomposition(&ch, &coeffs, User::T, 0).unwrap();
        assert_abs_diff_eq!(p.a, 2.0, epsilon = 1e-15);
        assert!((p.b - c(1.0, 0.0)).norm() < 1e-15);
        assert_abs_diff_eq!(p.gain(c(1.0, 0.0)), 4.0, epsilon = 1e-15);

        let ch = single(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        let p = phase_affine_decomposition(&ch, &coeffs, User::T, 0).unwrap();
        assert!((p.b - c(0.0, 1.0)).norm() < 1e-15);
        assert_abs_diff_eq!(p.gain(c(0.0, -1.0)), 4.0, epsilon = 1e-15);

        assert!(phase_affine_decomposition(&ch, &coeffs, User::T, 1).is_err());
    }

    #[test]
    fn phase_decomposition_matches_recomputation() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..10 {
            let (ch, coeffs) = random_instance(&mut rng, 4);
            for user in [User::T, User::R] {
                for n in 0..4 {
                    let p = phase_affine_decomposition(&ch, &coeffs, user, n).unwrap();
                    for _ in 0..100 {
                        let theta = rng.random::<f64>() * TAU;
                        let mut probe = coeffs.clone();
                        match user {
                            User::T => probe.theta_t[n] = theta,
                            User::R => probe.theta_r[n] = theta,
                        }
                        let direct = effective_gain(&ch, &probe, user);
                        assert!((p.gain(Complex::from_polar(1.0, theta)) - direct).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn amplitude_decomposition_examples() {
        let coeffs = StarCoefficients::new(vec![0.3], vec![0.7], vec![0.0], vec![FRAC_PI_2]).unwrap();
        let ch = single(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        let a = amplitude_affine_decomposition(&ch, &coeffs, User::T, 0).unwrap();
        assert_abs_diff_eq!(a.c, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.d, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.e, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.gain(1.0), 4.0, epsilon = 1e-15);

        let ch = single(c(0.4, -0.2), c(0.0, 0.0), c(1.0, 0.0));
        let a = amplitude_affine_decomposition(&ch, &coeffs, User::R, 0).unwrap();
        assert_eq!((a.d, a.e), (0.0, 0.0));
        assert_abs_diff_eq!(a.c, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_decomposition_matches_recomputation() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        for _ in 0..10 {
            let (ch, coeffs) = random_instance(&mut rng, 4);
            for user in [User::T, User::R] {
                for n in 0..4 {
                    let a = amplitude_affine_decomposition(&ch, &coeffs, user, n).unwrap();
                    for beta in [0.0, 0.25, 1.0] {
                        let mut probe = coeffs.clone();
                        match user {
                            User::T => probe.beta_t[n] = beta,
                            User::R => probe.beta_r[n] = beta,
                        }
                        assert!((a.gain(beta) - effective_gain(&ch, &probe, user)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    fn cfg() -> AOConfig {
        AOConfig::default()
    }

    #[test]
    fn constant_phase_objective() {
        let p = PhaseSubproblem {
            a_t: 2.0,
            a_r: 4.0,
            b_t: c(0.0, 0.0),
            b_r: c(0.0, 0.0),
            w_t: 1.0,
            w_r: 3.0,
        };
        let s = solve_phase_element(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(s.objective, 3.0 / 4.0 + 1.0 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn single_user_co_phasing() {
        let p = PhaseSubproblem {
            a_t: 1.0,
            a_r: 2.0,
            b_t: c(0.0, 0.0),
            b_r: c(1.0, 0.0),
            w_t: 0.0,
            w_r: 1.0,
        };
        let s = solve_phase_element(&p, &cfg()).unwrap();
        assert!((s.q_r - c(1.0, 0.0)).norm() < 1e-8);
        assert_abs_diff_eq!(s.objective, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn coupled_phase_example_matches_dense_oracle() {
        let p = PhaseSubproblem {
            a_t: 2.0,
            a_r: 2.0,
            b_t: c(0.0, -1.0),
            b_r: c(1.0, 0.0),
            w_t: 1.0,
            w_r: 1.0,
        };
        let s = solve_phase_element(&p, &cfg()).unwrap();
        assert_eq!(s.sign, CouplingSign::Plus);
        assert!(s.q_r.re > 1.0 - 1e-12);
        assert_abs_diff_eq!(s.objective, 0.5, epsilon = 1e-12);

        let oracle = (0..100_000)
            .flat_map(|i| {
                let phi = TAU * i as f64 / 100_000.0;
                CouplingSign::BOTH.map(|sg| p.objective(phi, sg))
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(oracle, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn phase_solver_beats_dense_grid_on_random_problems() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for _ in 0..20 {
            let (ch, coeffs) = random_instance(&mut rng, 3);
            let t = phase_affine_decomposition(&ch, &coeffs, User::T, 1).unwrap();
            let r = phase_affine_decomposition(&ch, &coeffs, User::R, 1).unwrap();
            let w = ObjectiveWeights::new(&RateTargets::new(2.0, 1.0), 1.0, DecodingOrder::TStrong);
            let p = PhaseSubproblem::new(t, r, &w);
            assert!(p.is_consistent());
            let s = solve_phase_element(&p, &cfg()).unwrap();
            let oracle = (0..20_000)
                .flat_map(|i| {
                    let phi = TAU * i as f64 / 20_000.0;
                    CouplingSign::BOTH.map(|sg| p.objective(phi, sg))
                })
                .fold(f64::INFINITY, f64::min);
            assert!(s.objective <= oracle * (1.0 + 1e-9), "{} vs {}", s.objective, oracle);
            assert_abs_diff_eq!(s.objective, p.objective(s.theta_r, s.sign), epsilon = 1e-15);
        }
    }

    #[test]
    fn infeasible_phase_subproblem() {
        let p = PhaseSubproblem {
            a_t: 0.0,
            a_r: 1.0,
            b_t: c(0.0, 0.0),
            b_r: c(0.0, 0.0),
            w_t: 1.0,
            w_r: 1.0,
        };
        assert_eq!(solve_phase_element(&p, &cfg()), Err(Error::ElementInfeasible));
    }

    #[test]
    fn symmetric_amplitude_split() {
        let p = AmplitudeSubproblem {
            c_t: 0.3,
            c_r: 0.3,
            d_t: 1.2,
            d_r: 1.2,
            e_t: 0.4,
            e_r: 0.4,
            w_t: 2.0,
            w_r: 2.0,
        };
        let s = solve_amplitude_element(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(s.beta_t, 0.5, epsilon = 1e-6);
    }

    #[test]
    fn one_sided_amplitude_goes_pure() {
        let p = AmplitudeSubproblem {
            c_t: 0.1,
            c_r: 0.5,
            d_t: 1.0,
            d_r: 1.0,
            e_t: 0.2,
            e_r: 0.3,
            w_t: 1.0,
            w_r: 0.0,
        };
        assert_eq!(solve_amplitude_element(&p, &cfg()).unwrap().beta_t, 1.0);
    }

    #[test]
    fn amplitude_calculus_example() {
        let p = AmplitudeSubproblem {
            c_t: 0.1,
            c_r: 0.1,
            d_t: 1.0,
            d_r: 1.0,
            e_t: 0.0,
            e_r: 0.0,
            w_t: 1.0,
            w_r: 1.0,
        };
        let s = solve_amplitude_element(&p, &cfg()).unwrap();
        assert_abs_diff_eq!(s.beta_t, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(s.objective, 2.0 / 0.6, epsilon = 1e-12);
    }

    #[test]
    fn taylor_bound_examples() {
        assert_eq!(taylor_sqrt_lower_bound(-1.0, 0.25, 0.25).unwrap(), -0.5);
        assert_abs_diff_eq!(
            taylor_sqrt_lower_bound(-1.0, 0.81, 0.25).unwrap(),
            -1.06,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(taylor_sqrt_lower_bound(-1.0, 0.0, 1.0).unwrap(), -0.5, epsilon = 1e-15);
        assert!(taylor_sqrt_lower_bound(-1.0, 0.5, 0.0).is_err());
        for i in 0..=100 {
            let b = i as f64 / 100.0;
            assert!(taylor_sqrt_lower_bound(-0.7, b, 0.3).unwrap() <= -0.7 * b.sqrt() + 1e-15);
        }
    }

    fn random_amplitude(rng: &mut ChaCha20Rng, allow_negative_e: bool) -> AmplitudeSubproblem<f64> {
        let e = |rng: &mut ChaCha20Rng, d: f64, cc: f64| {
            let bound = 2.0 * (d * cc).sqrt();
            if allow_negative_e {
                bound * (2.0 * rng.random::<f64>() - 1.0)
            } else {
                bound * rng.random::<f64>()
            }
        };
        let (c_t, c_r, d_t, d_r): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let e_t = e(rng, d_t, c_t);
        let e_r = e(rng, d_r, c_r);
        AmplitudeSubproblem {
            c_t: c_t + 0.05,
            c_r: c_r + 0.05,
            d_t,
            d_r,
            e_t,
            e_r,
            w_t: rng.random::<f64>() + 0.1,
            w_r: rng.random::<f64>() + 0.1,
        }
    }

    #[test]
    fn sca_matches_grid_when_convex() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        for _ in 0..50 {
            let p = random_amplitude(&mut rng, false);
            let grid = solve_amplitude_element(&p, &cfg()).unwrap();
            let sca = solve_amplitude_element_sca(&p, 0.5, &cfg()).unwrap();
            assert!((sca.objective - grid.objective).abs() <= 1e-6 * grid.objective.max(1.0));
        }
    }

    #[test]
    fn sca_is_stationary_at_grid_optimum() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let mut checked = 0;
        while checked < 20 {
            let p = random_amplitude(&mut rng, true);
            let grid = solve_amplitude_element(&p, &cfg()).unwrap();
            if !(grid.beta_t > 1e-3 && grid.beta_t < 1.0 - 1e-3) {
                continue;
            }
            let sca = solve_amplitude_element_sca(&p, grid.beta_t, &cfg()).unwrap();
            assert!((sca.beta_t - grid.beta_t).abs() < 1e-6);
            checked += 1;
        }
    }

    #[test]
    fn sca_never_beats_grid_and_never_ascends() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        for _ in 0..200 {
            let p = random_amplitude(&mut rng, true);
            let b0 = 0.01 + 0.98 * rng.random::<f64>();
            let grid = solve_amplitude_element(&p, &cfg()).unwrap();
            let sca = solve_amplitude_element_sca(&p, b0, &cfg()).unwrap();
            assert!(sca.objective >= grid.objective - 1e-9);
            assert!(sca.objective <= p.objective(b0) + 1e-12);
            assert_abs_diff_eq!(sca.objective, p.objective(sca.beta_t), epsilon = 0.0);
        }
    }

    #[test]
    fn sca_rejects_boundary_start() {
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let p = random_amplitude(&mut rng, true);
        assert!(solve_amplitude_element_sca(&p, 0.0, &cfg()).is_err());
        assert!(solve_amplitude_element_sca(&p, 1.0, &cfg()).is_err());
    }
}

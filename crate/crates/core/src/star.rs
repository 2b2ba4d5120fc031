//! STAR element coefficients and the passive-lossless constraints.
//!
//! Every element splits its incident signal into a transmitted part
//! `T = √β_t e^{jθ_t}` and a reflected part `R = √β_r e^{jθ_r}`. A passive
//! lossless element conserves energy (`β_t + β_r = 1`) and, because its
//! electric and magnetic impedances are purely imaginary, its two phases are
//! locked a quarter turn apart: `|θ_t − θ_r| ∈ {π/2, 3π/2}`.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{wrap_phase, Real};

/// Tolerance on `β_t + β_r = 1`.
pub const ENERGY_TOLERANCE: f64 = 1e-9;
/// Tolerance on the quarter-turn phase coupling, in radians.
pub const COUPLING_TOLERANCE: f64 = 1e-6;
/// Free-space wave impedance in ohms.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.73;

/// Which quarter-turn offset ties the transmission phase to the reflection
/// phase: `θ_t = θ_r ± π/2`, i.e. `q_t = ±j·q_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingSign {
    Plus,
    Minus,
}

impl CouplingSign {
    pub const BOTH: [CouplingSign; 2] = [CouplingSign::Plus, CouplingSign::Minus];

    #[inline]
    pub fn factor<T: Real>(self) -> T {
        match self {
            CouplingSign::Plus => T::one(),
            CouplingSign::Minus => -T::one(),
        }
    }

    /// `±j`, the unit phasor mapping `q_r` onto `q_t`.
    #[inline]
    pub fn rotation<T: Real>(self) -> Complex<T> {
        Complex::new(T::zero(), self.factor())
    }

    /// Transmission phase implied by a reflection phase.
    #[inline]
    pub fn transmission_phase<T: Real>(self, theta_r: T) -> T {
        wrap_phase(theta_r + self.factor::<T>() * T::FRAC_PI_2())
    }
}

/// Per-element amplitudes (energy fractions) and phases of a STAR surface.
#[derive(Debug, Clone, PartialEq)]
pub struct StarCoefficients<T> {
    pub beta_t: Vec<T>,
    pub beta_r: Vec<T>,
    pub theta_t: Vec<T>,
    pub theta_r: Vec<T>,
}

impl<T: Real> StarCoefficients<T> {
    /// Builds coefficients from raw vectors. Only lengths are checked; use
    /// [`validate_passive_lossless`] for the physical constraints.
    pub fn new(beta_t: Vec<T>, beta_r: Vec<T>, theta_t: Vec<T>, theta_r: Vec<T>) -> Result<Self> {
        let n = beta_t.len();
        for v in [&beta_r, &theta_t, &theta_r] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        Ok(Self {
            beta_t,
            beta_r,
            theta_t,
            theta_r,
        })
    }

    /// Coupled-model coefficients: `β_r = 1 − β_t`, `θ_t = θ_r ± π/2`.
    pub fn coupled(beta_t: &[T], theta_r: &[T], signs: &[CouplingSign]) -> Result<Self> {
        let n = beta_t.len();
        for len in [theta_r.len(), signs.len()] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        let theta_r: Vec<T> = theta_r.iter().map(|&t| wrap_phase(t)).collect();
        Ok(Self {
            beta_t: beta_t.to_vec(),
            beta_r: beta_t.iter().map(|&b| T::one() - b).collect(),
            theta_t: theta_r
                .iter()
                .zip(signs)
                .map(|(&t, s)| s.transmission_phase(t))
                .collect(),
            theta_r,
        })
    }

    /// Every element at an even energy split with zero reflection phase.
    pub fn even_split(n: usize) -> Self {
        let half = T::of(0.5);
        Self::coupled(&vec![half; n], &vec![T::zero(); n], &vec![CouplingSign::Plus; n]).expect("lengths agree")
    }

    pub fn len(&self) -> usize {
        self.beta_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta_t.is_empty()
    }

    /// Sets the amplitude split of element `n`, keeping energy conservation.
    pub fn set_split(&mut self, n: usize, beta_t: T) {
        self.beta_t[n] = beta_t;
        self.beta_r[n] = T::one() - beta_t;
    }

    /// Sets the phases of element `n` under the coupled model.
    pub fn set_coupled_phase(&mut self, n: usize, theta_r: T, sign: CouplingSign) {
        let theta_r = wrap_phase(theta_r);
        self.theta_r[n] = theta_r;
        self.theta_t[n] = sign.transmission_phase(theta_r);
    }
}

/// Diagonals of the transmission and reflection coefficient matrices.
pub fn coefficient_matrices<T: Real>(c: &StarCoefficients<T>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let t = c
        .beta_t
        .iter()
        .zip(&c.theta_t)
        .map(|(&b, &th)| Complex::from_polar(b.max(T::zero()).sqrt(), th))
        .collect();
    let r = c
        .beta_r
        .iter()
        .zip(&c.theta_r)
        .map(|(&b, &th)| Complex::from_polar(b.max(T::zero()).sqrt(), th))
        .collect();
    (t, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// `0 ≤ β ≤ 1` for either amplitude.
    AmplitudeRange,
    /// `β_t + β_r = 1`.
    EnergyConservation,
    /// `|θ_t − θ_r| ∈ {π/2, 3π/2}`.
    PhaseCoupling,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::AmplitudeRange => "amplitude-range",
            Constraint::EnergyConservation => "energy-conservation",
            Constraint::PhaseCoupling => "phase-coupling",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub element: usize,
    pub constraint: Constraint,
    pub residual: T,
}

impl<T: Real> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {}: {} violated (residual {:e})",
            self.element,
            self.constraint,
            self.residual.f64()
        )
    }
}

/// Distance of `θ_t − θ_r` from the nearest admissible quarter-turn offset.
pub fn coupling_residual<T: Real>(theta_t: T, theta_r: T) -> T {
    let delta = wrap_phase(theta_t - theta_r);
    let quarter = T::FRAC_PI_2();
    let three_quarter = T::of(3.0) * quarter;
    (delta - quarter).abs().min((delta - three_quarter).abs())
}

/// Checks amplitude range and energy conservation only (the independent
/// phase-shift model).
pub fn validate_energy<T: Real>(c: &StarCoefficients<T>) -> Vec<Violation<T>> {
    let tol = T::of(ENERGY_TOLERANCE);
    let mut out = Vec::new();
    for n in 0..c.len() {
        let (bt, br) = (c.beta_t[n], c.beta_r[n]);
        let range = [bt, br]
            .iter()
            .map(|&b| {
                if b < T::zero() {
                    -b
                } else if b > T::one() {
                    b - T::one()
                } else {
                    T::zero()
                }
            })
            .fold(T::zero(), T::max);
        if range > tol || bt.is_nan() || br.is_nan() {
            out.push(Violation {
                element: n,
                constraint: Constraint::AmplitudeRange,
                residual: range,
            });
        }
        let energy = (bt + br - T::one()).abs();
        if !(energy <= tol) {
            out.push(Violation {
                element: n,
                constraint: Constraint::EnergyConservation,
                residual: energy,
            });
        }
    }
    out
}

/// Lists every element violating the passive-lossless constraints. An empty
/// list means the coefficients are realizable by a passive lossless surface.
///
/// The coupling constraint is enforced even for pure modes; the unused phase
/// is free there and can always be chosen to satisfy it.
pub fn validate_passive_lossless<T: Real>(c: &StarCoefficients<T>) -> Vec<Violation<T>> {
    let mut out = validate_energy(c);
    let tol = T::of(COUPLING_TOLERANCE);
    for n in 0..c.len() {
        let residual = coupling_residual(c.theta_t[n], c.theta_r[n]);
        if !(residual <= tol) {
            out.push(Violation {
                element: n,
                constraint: Constraint::PhaseCoupling,
                residual,
            });
        }
    }
    out.sort_by_key(|v| v.element);
    out
}

/// Equivalent-circuit impedances of one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementImpedances<T> {
    pub z_e: Complex<T>,
    pub z_m: Complex<T>,
    pub eta: T,
}

impl<T: Real> ElementImpedances<T> {
    pub fn new(z_e: Complex<T>, z_m: Complex<T>) -> Self {
        Self {
            z_e,
            z_m,
            eta: T::of(FREE_SPACE_IMPEDANCE),
        }
    }

    /// Passive lossless elements have purely reactive impedances.
    pub fn is_lossless(&self, rel_tol: T) -> bool {
        let bound = rel_tol * self.eta;
        self.z_e.re.abs() <= bound && self.z_m.re.abs() <= bound
    }
}

/// Transmission and reflection coefficients realized by a pair of
/// impedances.
pub fn coefficients_from_impedances<T: Real>(z: &ElementImpedances<T>) -> Result<(Complex<T>, Complex<T>)> {
    let eta = Complex::from(z.eta);
    let two = T::of(2.0);
    let den_e = z.z_e * two + eta;
    let den_m = z.z_m + eta * two;
    let floor = T::of(1e-12) * z.eta.abs();
    for den in [den_e, den_m] {
        if den.norm() <= floor {
            return Err(Error::SingularImpedance {
                magnitude: den.norm().f64(),
            });
        }
    }
    let electric = z.z_e * two / den_e;
    let magnetic = z.z_m / den_m;
    let t = electric - magnetic;
    let r = -eta / den_e + magnetic;
    Ok((t, r))
}

/// Impedances needed to realize a coefficient pair; the inverse of
/// [`coefficients_from_impedances`].
///
/// Pure transmission/reflection modes sit on the singular set `R + T = 1`
/// and must be handled through limiting impedances by the caller.
pub fn impedances_from_coefficients<T: Real>(t: Complex<T>, r: Complex<T>, eta: T) -> Result<ElementImpedances<T>> {
    let one = Complex::from(T::one());
    let two = T::of(2.0);
    let tol = T::of(1e-9);
    let sum = r + t;
    let diff = r - t;
    let den_e = one - sum;
    let den_m = one - diff;
    if den_e.norm() <= tol {
        return Err(Error::DegenerateCoefficients {
            sign: '+',
            residual: den_e.norm().f64(),
        });
    }
    if den_m.norm() <= tol {
        return Err(Error::DegenerateCoefficients {
            sign: '-',
            residual: den_m.norm().f64(),
        });
    }
    let z_e = (one + sum) * eta / (den_e * two);
    let z_m = (one + diff) * (eta * two) / den_m;
    Ok(ElementImpedances { z_e, z_m, eta })
}

//! Effective channel gains, achievable rates and minimum transmit power.
//!
//! Powers are in watts and rates in bit/s/Hz. For NOMA the decoding order
//! fixes which user is "strong": the strong user cancels the weak user's
//! signal before decoding its own, the weak user treats the strong user's
//! signal as interference. OMA splits the resource in two equal halves.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::star::StarCoefficients;

/// Effective gains below this are treated as a dead link.
pub const MIN_GAIN: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum User {
    /// User in the transmission half-space.
    T,
    /// User in the reflection half-space (same side as the access point).
    R,
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            User::T => "T",
            User::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Access {
    #[default]
    Noma,
    Oma,
}

impl fmt::Display for Access {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Access::Noma => "NOMA",
            Access::Oma => "OMA",
        })
    }
}

/// NOMA decoding order, named after the user that performs SIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NomaOrder {
    /// `λ_t = 0, λ_r = 1`: T user is strong.
    TStrong,
    /// `λ_t = 1, λ_r = 0`: R user is strong.
    RStrong,
}

impl NomaOrder {
    pub const BOTH: [NomaOrder; 2] = [NomaOrder::TStrong, NomaOrder::RStrong];

    /// Interference indicators `(λ_t, λ_r)`.
    pub fn lambdas(self) -> (u8, u8) {
        match self {
            NomaOrder::TStrong => (0, 1),
            NomaOrder::RStrong => (1, 0),
        }
    }
}

/// Power-allocation rule attached to a [`PowerBreakdown`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodingOrder {
    TStrong,
    RStrong,
    Oma,
}

impl From<NomaOrder> for DecodingOrder {
    fn from(o: NomaOrder) -> Self {
        match o {
            NomaOrder::TStrong => DecodingOrder::TStrong,
            NomaOrder::RStrong => DecodingOrder::RStrong,
        }
    }
}

impl DecodingOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodingOrder::TStrong => "T_STRONG",
            DecodingOrder::RStrong => "R_STRONG",
            DecodingOrder::Oma => "OMA",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "T_STRONG" => Some(DecodingOrder::TStrong),
            "R_STRONG" => Some(DecodingOrder::RStrong),
            "OMA" => Some(DecodingOrder::Oma),
            _ => None,
        }
    }
}

impl fmt::Display for DecodingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Effective channel power gains `|c_t|²`, `|c_r|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGains<T> {
    pub gain_t: T,
    pub gain_r: T,
}

impl<T: Real> EffectiveGains<T> {
    pub fn new(gain_t: T, gain_r: T) -> Self {
        Self { gain_t, gain_r }
    }
}

/// Minimum rates the two users must receive, in bit/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTargets<T> {
    pub rate_t: T,
    pub rate_r: T,
}

impl<T: Real> RateTargets<T> {
    pub fn new(rate_t: T, rate_r: T) -> Self {
        Self { rate_t, rate_r }
    }

    /// Dimensionless NOMA SINR targets `2^R − 1`.
    pub fn noma_snr(&self) -> (T, T) {
        (self.rate_t.exp2() - T::one(), self.rate_r.exp2() - T::one())
    }

    /// Dimensionless OMA SNR targets `2^{2R} − 1` (before the half-noise
    /// factor).
    pub fn oma_snr(&self) -> (T, T) {
        let two = T::of(2.0);
        (
            (two * self.rate_t).exp2() - T::one(),
            (two * self.rate_r).exp2() - T::one(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown<T> {
    pub total_w: T,
    pub p_t: T,
    pub p_r: T,
    pub order: DecodingOrder,
}

/// Numerators of the total-power objective `w_t/|c_t|² + w_r/|c_r|²`.
///
/// For a fixed decoding order the minimum power is exactly this weighted
/// sum of inverse gains, which is what every element subproblem minimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights<T> {
    pub w_t: T,
    pub w_r: T,
}

impl<T: Real> ObjectiveWeights<T> {
    pub fn new(targets: &RateTargets<T>, sigma2: T, order: DecodingOrder) -> Self {
        match order {
            DecodingOrder::TStrong => {
                let (gt, gr) = targets.noma_snr();
                Self {
                    w_t: gt * (gr + T::one()) * sigma2,
                    w_r: gr * sigma2,
                }
            }
            DecodingOrder::RStrong => {
                let (gt, gr) = targets.noma_snr();
                Self {
                    w_t: gt * sigma2,
                    w_r: gr * (gt + T::one()) * sigma2,
                }
            }
            DecodingOrder::Oma => {
                let (gt, gr) = targets.oma_snr();
                let half = sigma2 / T::of(2.0);
                Self {
                    w_t: gt * half,
                    w_r: gr * half,
                }
            }
        }
    }

    /// Total power at the given gains; `+∞` when either link is dead.
    #[inline]
    pub fn objective(&self, gain_t: T, gain_r: T) -> T {
        let floor = T::of(MIN_GAIN);
        if !(gain_t > floor && gain_r > floor) {
            return T::infinity();
        }
        self.w_t / gain_t + self.w_r / gain_r
    }
}

/// Per-element cascaded channel `conj(v_k[n])·g[n]` of one user.
pub fn cascade<T: Real>(ch: &ChannelSet<T>, user: User) -> Vec<Complex<T>> {
    let v = match user {
        User::T => &ch.v_t,
        User::R => &ch.v_r,
    };
    v.iter().zip(&ch.g).map(|(v, g)| v.conj() * g).collect()
}

/// `|d_k + Σ_n conj(v_k[n])·Θ_k[n]·g[n]|²`.
pub fn effective_gain<T: Real>(ch: &ChannelSet<T>, c: &StarCoefficients<T>, user: User) -> T {
    let (v, d, beta, theta) = match user {
        User::T => (&ch.v_t, ch.d_t, &c.beta_t, &c.theta_t),
        User::R => (&ch.v_r, ch.d_r, &c.beta_r, &c.theta_r),
    };
    let sum = v
        .iter()
        .zip(&ch.g)
        .zip(beta.iter().zip(theta))
        .fold(d, |acc, ((v, g), (&b, &th))| {
            acc + v.conj() * Complex::from_polar(b.max(T::zero()).sqrt(), th) * g
        });
    sum.norm_sqr()
}

pub fn effective_gains<T: Real>(ch: &ChannelSet<T>, c: &StarCoefficients<T>) -> EffectiveGains<T> {
    EffectiveGains {
        gain_t: effective_gain(ch, c, User::T),
        gain_r: effective_gain(ch, c, User::R),
    }
}

/// NOMA rates. The weak user sees the strong user's power as interference.
pub fn noma_rates<T: Real>(g: &EffectiveGains<T>, p_t: T, p_r: T, order: NomaOrder, sigma2: T) -> (T, T) {
    let (lt, lr) = order.lambdas();
    let (lt, lr) = (T::of(lt as f64), T::of(lr as f64));
    let rate_t = (T::one() + g.gain_t * p_t / (lt * g.gain_t * p_r + sigma2)).log2();
    let rate_r = (T::one() + g.gain_r * p_r / (lr * g.gain_r * p_t + sigma2)).log2();
    (rate_t, rate_r)
}

/// OMA rates over two equal orthogonal halves.
pub fn oma_rates<T: Real>(g: &EffectiveGains<T>, p_t: T, p_r: T, sigma2: T) -> (T, T) {
    let half = T::of(0.5);
    let noise = sigma2 * half;
    (
        half * (T::one() + g.gain_t * p_t / noise).log2(),
        half * (T::one() + g.gain_r * p_r / noise).log2(),
    )
}

fn check_gains<T: Real>(g: &EffectiveGains<T>) -> Result<()> {
    let floor = T::of(MIN_GAIN);
    for (user, gain) in [(User::T, g.gain_t), (User::R, g.gain_r)] {
        if !(gain >= floor) || !gain.is_finite() {
            return Err(Error::Infeasible { user, gain: gain.f64() });
        }
    }
    Ok(())
}

/// Smallest powers meeting both NOMA rate targets with equality.
pub fn min_power_noma<T: Real>(
    g: &EffectiveGains<T>,
    targets: &RateTargets<T>,
    sigma2: T,
    order: NomaOrder,
) -> Result<PowerBreakdown<T>> {
    check_gains(g)?;
    let (snr_t, snr_r) = targets.noma_snr();
    let (p_t, p_r) = match order {
        NomaOrder::TStrong => {
            let p_t = snr_t * sigma2 / g.gain_t;
            (p_t, snr_r * (p_t + sigma2 / g.gain_r))
        }
        NomaOrder::RStrong => {
            let p_r = snr_r * sigma2 / g.gain_r;
            (snr_t * (p_r + sigma2 / g.gain_t), p_r)
        }
    };
    Ok(PowerBreakdown {
        total_w: p_t + p_r,
        p_t,
        p_r,
        order: order.into(),
    })
}

/// Smallest OMA powers meeting both targets with equality.
pub fn min_power_oma<T: Real>(g: &EffectiveGains<T>, targets: &RateTargets<T>, sigma2: T) -> Result<PowerBreakdown<T>> {
    check_gains(g)?;
    let (snr_t, snr_r) = targets.oma_snr();
    let half = sigma2 * T::of(0.5);
    let p_t = snr_t * half / g.gain_t;
    let p_r = snr_r * half / g.gain_r;
    Ok(PowerBreakdown {
        total_w: p_t + p_r,
        p_t,
        p_r,
        order: DecodingOrder::Oma,
    })
}

/// Tries both NOMA decoding orders and keeps the cheaper one (ties go to
/// `TStrong`). The winner always has the stronger user decoding first.
pub fn best_noma_order<T: Real>(
    g: &EffectiveGains<T>,
    targets: &RateTargets<T>,
    sigma2: T,
) -> Result<PowerBreakdown<T>> {
    let t = min_power_noma(g, targets, sigma2, NomaOrder::TStrong)?;
    let r = min_power_noma(g, targets, sigma2, NomaOrder::RStrong)?;
    Ok(if t.total_w <= r.total_w { t } else { r })
}

/// Minimum power under a fixed allocation rule.
pub fn min_power<T: Real>(
    g: &EffectiveGains<T>,
    targets: &RateTargets<T>,
    sigma2: T,
    order: DecodingOrder,
) -> Result<PowerBreakdown<T>> {
    match order {
        DecodingOrder::TStrong => min_power_noma(g, targets, sigma2, NomaOrder::TStrong),
        DecodingOrder::RStrong => min_power_noma(g, targets, sigma2, NomaOrder::RStrong),
        DecodingOrder::Oma => min_power_oma(g, targets, sigma2),
    }
}

/// Minimum power for an access scheme; NOMA takes the better order.
pub fn min_power_for_access<T: Real>(
    g: &EffectiveGains<T>,
    targets: &RateTargets<T>,
    sigma2: T,
    access: Access,
) -> Result<PowerBreakdown<T>> {
    match access {
        Access::Noma => best_noma_order(g, targets, sigma2),
        Access::Oma => min_power_oma(g, targets, sigma2),
    }
}

/// Converts watts to dBm.
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1000.0).log10()
}

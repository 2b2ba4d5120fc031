//! Geometry, path loss and fading for one STAR-RIS deployment.
//!
//! The surface lies in the plane `y = ris_position.y` with its elements
//! spaced along the x-axis. The R user is placed on the access-point side of
//! that plane and the T user on the opposite side, each uniformly on a
//! half-circle of radius `user_radius` around the surface in the `z = 0`
//! plane. Direct links are Rayleigh; the AP→RIS and RIS→user links are
//! Rician with a uniform-linear-array line-of-sight component.

use num_complex::Complex;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{Access, RateTargets};
use crate::scalar::Real;

pub type Point3 = [f64; 3];

/// Simulation setup shared by every realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub n_elements: usize,
    pub bs_position: Point3,
    pub ris_position: Point3,
    /// Radius of the user half-circles, meters.
    pub user_radius: f64,
    /// Path loss at the 1 m reference distance, dB.
    pub pl_ref_db: f64,
    pub alpha_direct: f64,
    pub alpha_ris: f64,
    pub rician_k_db: f64,
    pub noise_power_dbm: f64,
    pub rate_t: f64,
    pub rate_r: f64,
    pub access: Access,
    /// Element spacing in carrier wavelengths.
    pub element_spacing: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n_elements: 20,
            bs_position: [0.0, 0.0, 0.0],
            ris_position: [0.0, 50.0, 0.0],
            user_radius: 3.0,
            pl_ref_db: -30.0,
            alpha_direct: 3.5,
            alpha_ris: 2.2,
            rician_k_db: 3.0,
            noise_power_dbm: -80.0,
            rate_t: 2.0,
            rate_r: 2.0,
            access: Access::Noma,
            element_spacing: 0.5,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.n_elements == 0 {
            return bad("n_elements must be at least 1".into());
        }
        for (name, v) in [
            ("user_radius", self.user_radius),
            ("alpha_direct", self.alpha_direct),
            ("alpha_ris", self.alpha_ris),
            ("element_spacing", self.element_spacing),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [("rate_t", self.rate_t), ("rate_r", self.rate_r)] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("pl_ref_db", self.pl_ref_db),
            ("rician_k_db", self.rician_k_db),
            ("noise_power_dbm", self.noise_power_dbm),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if self.bs_position == self.ris_position {
            return bad("bs_position and ris_position coincide".into());
        }
        if self.user_radius < 1.0 {
            return bad(format!(
                "user_radius {} is below the 1 m path-loss reference distance",
                self.user_radius
            ));
        }
        Ok(())
    }

    /// Noise power in watts.
    pub fn noise_power_w<T: Real>(&self) -> T {
        T::of(10f64.powf((self.noise_power_dbm - 30.0) / 10.0))
    }

    pub fn rician_k_linear(&self) -> f64 {
        10f64.powf(self.rician_k_db / 10.0)
    }

    pub fn targets<T: Real>(&self) -> RateTargets<T> {
        RateTargets::new(T::of(self.rate_t), T::of(self.rate_r))
    }

    pub fn with_elements(&self, n: usize) -> Self {
        Self {
            n_elements: n,
            ..self.clone()
        }
    }

    pub fn with_rates(&self, rate_t: f64, rate_r: f64) -> Self {
        Self {
            rate_t,
            rate_r,
            ..self.clone()
        }
    }

    pub fn with_access(&self, access: Access) -> Self {
        Self { access, ..self.clone() }
    }
}

/// Complex baseband channels of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    pub d_t: Complex<T>,
    pub d_r: Complex<T>,
    pub v_t: Vec<Complex<T>>,
    pub v_r: Vec<Complex<T>>,
    pub g: Vec<Complex<T>>,
}

impl<T: Real> ChannelSet<T> {
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Channel with only direct links.
    pub fn direct_only(d_t: Complex<T>, d_r: Complex<T>) -> Self {
        Self {
            d_t,
            d_r,
            v_t: Vec::new(),
            v_r: Vec::new(),
            g: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.g.len();
        for v in [&self.v_t, &self.v_r] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let finite = |z: &Complex<T>| z.re.is_finite() && z.im.is_finite();
        if !(finite(&self.d_t) && finite(&self.d_r) && self.v_t.iter().chain(&self.v_r).chain(&self.g).all(finite)) {
            return Err(Error::InvalidScenario("non-finite channel entry".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPlacement {
    pub t_position: Point3,
    pub r_position: Point3,
}

fn distance(a: &Point3, b: &Point3) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Places the T and R users on opposite half-circles around the surface.
pub fn place_users<R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> UserPlacement {
    let ris = scenario.ris_position;
    // +1 when the AP sits on the +y side of the surface plane.
    let ap_side = if scenario.bs_position[1] > ris[1] { 1.0 } else { -1.0 };
    let mut on_side = |side: f64| {
        let u: f64 = rng.sample(Open01);
        let phi = std::f64::consts::PI * u;
        let (s, c) = phi.sin_cos();
        [
            ris[0] + scenario.user_radius * c,
            ris[1] + side * scenario.user_radius * s,
            ris[2],
        ]
    };
    let r_position = on_side(ap_side);
    let t_position = on_side(-ap_side);
    UserPlacement { t_position, r_position }
}

/// Large-scale power gain `10^{PL_ref/10}·d^{−α}`.
pub fn path_loss_linear<T: Real>(distance_m: T, alpha: T, pl_ref_db: T) -> Result<T> {
    if !(distance_m >= T::one()) {
        return Err(Error::BelowReferenceDistance {
            distance: distance_m.f64(),
        });
    }
    let ten = T::of(10.0);
    Ok(ten.powf(pl_ref_db / ten) * distance_m.powf(-alpha))
}

/// One unit-variance circularly-symmetric complex Gaussian sample.
fn cscg<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::of(re * s), T::of(im * s))
}

/// `n` i.i.d. Rayleigh entries with mean power `gain`.
pub fn gen_rayleigh<T: Real, R: Rng + ?Sized>(rng: &mut R, gain: T, n: usize) -> Vec<Complex<T>> {
    let amp = gain.max(T::zero()).sqrt();
    (0..n).map(|_| cscg::<T, R>(rng) * amp).collect()
}

/// Uniform-linear-array response toward the ray `from → to`, projected on
/// the `z = 0` plane.
pub fn steering_vector<T: Real>(from: &Point3, to: &Point3, n: usize, spacing: f64) -> Vec<Complex<T>> {
    let azimuth = (to[1] - from[1]).atan2(to[0] - from[0]);
    let step = std::f64::consts::TAU * spacing * azimuth.cos();
    (0..n)
        .map(|i| {
            let (s, c) = (step * i as f64).sin_cos();
            Complex::new(T::of(c), T::of(s))
        })
        .collect()
}

/// Rician entries `√gain·(√(K/(K+1))·los + √(1/(K+1))·w)`.
pub fn gen_rician<T: Real, R: Rng + ?Sized>(rng: &mut R, gain: T, k_linear: T, los: &[Complex<T>]) -> Vec<Complex<T>> {
    let amp = gain.max(T::zero()).sqrt();
    let (los_w, nlos_w) = if k_linear.is_infinite() {
        (T::one(), T::zero())
    } else {
        let k1 = k_linear + T::one();
        ((k_linear / k1).sqrt(), (T::one() / k1).sqrt())
    };
    los.iter()
        .map(|a| {
            let w = cscg::<T, R>(rng);
            (*a * los_w + w * nlos_w) * amp
        })
        .collect()
}

/// Draws a fresh user placement and the channels that go with it.
///
/// Draw order is fixed: placement, `d_t`, `d_r`, `g`, `v_t`, `v_r`.
pub fn realize_channels<T: Real, R: Rng + ?Sized>(rng: &mut R, scenario: &Scenario) -> Result<ChannelSet<T>> {
    realize_channels_with_placement(rng, scenario).map(|(ch, _)| ch)
}

pub fn realize_channels_with_placement<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    scenario: &Scenario,
) -> Result<(ChannelSet<T>, UserPlacement)> {
    let n = scenario.n_elements;
    let placement = place_users(rng, scenario);
    let bs = scenario.bs_position;
    let ris = scenario.ris_position;
    let pl = |d: f64, alpha: f64| path_loss_linear(T::of(d), T::of(alpha), T::of(scenario.pl_ref_db));
    let k = T::of(scenario.rician_k_linear());

    let gain_dt = pl(distance(&bs, &placement.t_position), scenario.alpha_direct)?;
    let gain_dr = pl(distance(&bs, &placement.r_position), scenario.alpha_direct)?;
    let d_t = gen_rayleigh(rng, gain_dt, 1)[0];
    let d_r = gen_rayleigh(rng, gain_dr, 1)[0];

    let los_g = steering_vector(&bs, &ris, n, scenario.element_spacing);
    let g = gen_rician(rng, pl(distance(&bs, &ris), scenario.alpha_ris)?, k, &los_g);

    let mut to_user = |p: &Point3| -> Result<Vec<Complex<T>>> {
        let los = steering_vector(&ris, p, n, scenario.element_spacing);
        Ok(gen_rician(rng, pl(distance(&ris, p), scenario.alpha_ris)?, k, &los))
    };
    let v_t = to_user(&placement.t_position)?;
    let v_r = to_user(&placement.r_position)?;

    Ok((ChannelSet { d_t, d_r, v_t, v_r, g }, placement))
}

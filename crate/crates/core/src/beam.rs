//! Incoming particle ensemble: forward velocity, entry position and angle.

use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// FWHM of a unit-σ Gaussian, `2√(2 ln 2)`.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// How `relative_spread` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpreadConvention {
    /// Full width at half maximum.
    #[default]
    Fwhm,
    /// One standard deviation.
    Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityShape {
    /// Gaussian truncated at ±3σ.
    #[default]
    Gaussian,
    /// Flat top.
    Uniform,
    /// Flux-weighted `v³·exp(−((v−u)/w)²)`, with `u, w` matched to the mean and spread.
    Thermal,
}

impl FromStr for SpreadConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fwhm" => Ok(SpreadConvention::Fwhm),
            "sigma" | "rms" => Ok(SpreadConvention::Sigma),
            o => Err(Error::Config(format!("unknown spread convention `{o}` (fwhm, sigma)"))),
        }
    }
}

impl FromStr for VelocityShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(VelocityShape::Gaussian),
            "uniform" | "flat" => Ok(VelocityShape::Uniform),
            "thermal" => Ok(VelocityShape::Thermal),
            o => Err(Error::Config(format!(
                "unknown velocity shape `{o}` (gaussian, uniform, thermal)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamModel {
    /// Mean forward velocity, m/s.
    pub mean_velocity: f64,
    /// Δv/v.
    pub relative_spread: f64,
    pub spread_convention: SpreadConvention,
    pub shape: VelocityShape,
    /// Width of the uniformly illuminated entry region, m.
    pub transverse_extent: f64,
    /// Half-width of the uniform angular fill, rad.
    pub divergence: f64,
    pub flux_weight: f64,
}

impl BeamModel {
    pub fn new(mean_velocity: f64, relative_spread: f64) -> Self {
        BeamModel {
            mean_velocity,
            relative_spread,
            spread_convention: SpreadConvention::Fwhm,
            shape: VelocityShape::Gaussian,
            transverse_extent: 0.0,
            divergence: 0.0,
            flux_weight: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_velocity > 0.0 && self.mean_velocity.is_finite()) {
            return Err(Error::Config("velocity_mean must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.relative_spread) {
            return Err(Error::Config("velocity_spread must lie in [0, 1)".into()));
        }
        if !(self.transverse_extent >= 0.0 && self.divergence >= 0.0) {
            return Err(Error::Config("beam extent and divergence must be >= 0".into()));
        }
        Ok(())
    }

    /// Standard deviation of the forward velocity, m/s.
    pub fn sigma(&self) -> f64 {
        let width = self.relative_spread * self.mean_velocity;
        match self.spread_convention {
            SpreadConvention::Fwhm => width / FWHM_PER_SIGMA,
            SpreadConvention::Sigma => width,
        }
    }

    pub fn velocity_distribution(&self) -> Result<VelocityDistribution> {
        self.validate()?;
        let mean = self.mean_velocity;
        let sigma = self.sigma();
        if sigma == 0.0 {
            return Ok(VelocityDistribution::Fixed(mean));
        }
        Ok(match self.shape {
            VelocityShape::Gaussian => VelocityDistribution::Gaussian { mean, sigma },
            VelocityShape::Uniform => {
                let half = match self.spread_convention {
                    SpreadConvention::Fwhm => 0.5 * self.relative_spread * mean,
                    SpreadConvention::Sigma => 3f64.sqrt() * sigma,
                };
                VelocityDistribution::Uniform { lo: mean - half, hi: mean + half }
            }
            VelocityShape::Thermal => VelocityDistribution::thermal(mean, sigma)?,
        })
    }

    /// Gaussian reading: `σ = (Δv/v)·v̄/2.355` (FWHM), truncated at ±3σ.
    pub fn sample_velocity<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.velocity_distribution()?.sample(rng))
    }

    /// Entry position uniform over `[0, transverse_extent)` and angle uniform
    /// over `±divergence`.
    pub fn sample_entry<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let x = if self.transverse_extent > 0.0 {
            rng.random_range(0.0..self.transverse_extent)
        } else {
            0.0
        };
        let angle = if self.divergence > 0.0 {
            rng.random_range(-self.divergence..self.divergence)
        } else {
            0.0
        };
        (x, angle)
    }
}

/// A prepared forward-velocity distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocityDistribution {
    Fixed(f64),
    Gaussian { mean: f64, sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    Thermal { u: f64, w: f64, lo: f64, hi: f64, pdf_max: f64 },
}

const TRUNCATION: f64 = 3.0;

fn thermal_pdf(v: f64, u: f64, w: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        let z = (v - u) / w;
        v.powi(3) * (-z * z).exp()
    }
}

fn thermal_bounds(u: f64, w: f64) -> (f64, f64) {
    ((u - 5.0 * w).max(0.0), u + 5.0 * w)
}

fn thermal_moments(u: f64, w: f64) -> (f64, f64) {
    let (lo, hi) = thermal_bounds(u, w);
    let n = 4000;
    let h = (hi - lo) / n as f64;
    let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let v = lo + (i as f64 + 0.5) * h;
        let p = thermal_pdf(v, u, w);
        z += p;
        m1 += p * v;
        m2 += p * v * v;
    }
    let mean = m1 / z;
    (mean, (m2 / z - mean * mean).max(0.0).sqrt())
}

impl VelocityDistribution {
    /// Matches `v³·exp(−((v−u)/w)²)` to a target mean and standard deviation.
    pub fn thermal(mean: f64, sigma: f64) -> Result<Self> {
        // the v³ prefactor cannot produce a spread much above that of an effusive source
        if sigma / mean > 0.3 {
            return Err(Error::Domain(format!(
                "thermal shape supports sigma/mean <= 0.3, got {:.3}",
                sigma / mean
            )));
        }
        let (mut u, mut w) = (mean, std::f64::consts::SQRT_2 * sigma);
        for _ in 0..200 {
            let (m, s) = thermal_moments(u, w);
            u += mean - m;
            w *= sigma / s;
            if (m - mean).abs() < 1e-12 * mean && (s - sigma).abs() < 1e-12 * sigma {
                break;
            }
        }
        let (lo, hi) = thermal_bounds(u, w);
        let n = 2000;
        let pdf_max = (0..=n)
            .map(|i| thermal_pdf(lo + (hi - lo) * i as f64 / n as f64, u, w))
            .fold(0.0, f64::max)
            * 1.01;
        Ok(VelocityDistribution::Thermal { u, w, lo, hi, pdf_max })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            VelocityDistribution::Fixed(v) => v,
            VelocityDistribution::Gaussian { mean, sigma } => loop {
                let z: f64 = StandardNormal.sample(rng);
                if z.abs() <= TRUNCATION {
                    break mean + sigma * z;
                }
            },
            VelocityDistribution::Uniform { lo, hi } => rng.random_range(lo..hi),
            VelocityDistribution::Thermal { u, w, lo, hi, pdf_max } => loop {
                let v = rng.random_range(lo..hi);
                let y: f64 = rng.random_range(0.0..pdf_max);
                if y < thermal_pdf(v, u, w) {
                    break v;
                }
            },
        }
    }

    /// Midpoint quadrature nodes `(v, weight)`, weights summing to one.
    pub fn quadrature(&self, nodes: usize) -> Vec<(f64, f64)> {
        let n = nodes.max(1);
        let (lo, hi, pdf): (f64, f64, Box<dyn Fn(f64) -> f64>) = match *self {
            VelocityDistribution::Fixed(v) => return vec![(v, 1.0)],
            VelocityDistribution::Gaussian { mean, sigma } => (
                mean - TRUNCATION * sigma,
                mean + TRUNCATION * sigma,
                Box::new(move |v: f64| (-0.5 * ((v - mean) / sigma).powi(2)).exp()),
            ),
            VelocityDistribution::Uniform { lo, hi } => (lo, hi, Box::new(|_| 1.0)),
            VelocityDistribution::Thermal { u, w, lo, hi, .. } => {
                (lo, hi, Box::new(move |v| thermal_pdf(v, u, w)))
            }
        };
        let h = (hi - lo) / n as f64;
        let mut q: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v = lo + (i as f64 + 0.5) * h;
                (v, pdf(v))
            })
            .collect();
        let z: f64 = q.iter().map(|p| p.1).sum();
        for p in &mut q {
            p.1 /= z;
        }
        q
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            VelocityDistribution::Fixed(v) => (v, v),
            VelocityDistribution::Gaussian { mean, sigma } => {
                (mean - TRUNCATION * sigma, mean + TRUNCATION * sigma)
            }
            VelocityDistribution::Uniform { lo, hi } => (lo, hi),
            VelocityDistribution::Thermal { lo, hi, .. } => (lo, hi),
        }
    }
}

//! Electrode pair: voltage → field factor `(E∇)E_x`, and the Stark kick.
//!
//! The field is uniform over `[region_start, region_start + region_length]`
//! along the beam axis and zero elsewhere. A constant transverse force there
//! displaces the Moiré pattern at the third grating by
//! `Δs = a·G/v²`, with `a = 4πε₀·χ·(E∇)E_x/m` and the geometry factor
//! `G = ∫ k(z) dz` over the field region, `k(z) = z` before the second grating
//! and `2L − z` after it. For a region starting at the second grating this is
//! `G = ℓ·(D + ℓ/2)`, `D` being the gap between the region end and grating 3.

use crate::error::{Error, Result};
use crate::units::FOUR_PI_EPS0;

/// Transverse state of one particle at axial position `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub z: f64,
    pub x: f64,
    pub vx: f64,
    pub vy: f64,
}

impl Trajectory {
    pub fn drift(&self, dz: f64) -> Trajectory {
        Trajectory {
            z: self.z + dz,
            x: self.x + self.vx * dz / self.vy,
            ..*self
        }
    }

    fn accelerate(&self, dz: f64, accel: f64) -> Trajectory {
        let t = dz / self.vy;
        Trajectory {
            z: self.z + dz,
            x: self.x + self.vx * t + 0.5 * accel * t * t,
            vx: self.vx + accel * t,
            vy: self.vy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectionField {
    /// Electrode voltage, V.
    pub voltage: f64,
    /// `(E∇)E_x` per V², m⁻³.
    pub calibration: f64,
    /// Field-region start, measured from grating 1, m.
    pub region_start: f64,
    /// Electrode length ℓ, m.
    pub region_length: f64,
    /// Grating 1 → grating 3 distance `2L`, m.
    pub total_length: f64,
}

impl DeflectionField {
    /// Field starting at the second grating.
    pub fn at_second_grating(separation: f64, region_length: f64, calibration: f64, voltage: f64) -> Self {
        DeflectionField {
            voltage,
            calibration,
            region_start: separation,
            region_length,
            total_length: 2.0 * separation,
        }
    }

    /// Calibration pinned from one (field factor, voltage) anchor.
    pub fn calibration_from_anchor(field_factor: f64, voltage: f64) -> Result<f64> {
        if !(voltage > 0.0 && field_factor >= 0.0) {
            return Err(Error::Config("anchor needs a positive voltage and field >= 0".into()));
        }
        Ok(field_factor / (voltage * voltage))
    }

    pub fn with_voltage(&self, voltage: f64) -> Self {
        DeflectionField { voltage, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let end = self.region_start + self.region_length;
        if !(self.calibration >= 0.0 && self.region_length >= 0.0 && self.total_length > 0.0) {
            return Err(Error::Config(
                "deflector needs calibration >= 0, region_length >= 0, total length > 0".into(),
            ));
        }
        if self.region_start < 0.0 || end > self.total_length * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "deflector region [{:.4}, {:.4}] m does not fit between grating 1 and grating 3",
                self.region_start, end
            )));
        }
        Ok(())
    }

    pub fn separation(&self) -> f64 {
        0.5 * self.total_length
    }

    pub fn region_end(&self) -> f64 {
        self.region_start + self.region_length
    }

    /// `(E∇)E_x = calibration·U²`, V²/m³.
    pub fn field_factor(&self) -> f64 {
        self.calibration * self.voltage * self.voltage
    }

    /// Transverse acceleration `4πε₀·α·(E∇)E_x/m`, m/s².
    pub fn acceleration(&self, alpha: f64, mass: f64) -> f64 {
        FOUR_PI_EPS0 * alpha * self.field_factor() / mass
    }

    /// Geometry factor `G`, m².
    pub fn geometry_factor(&self) -> f64 {
        let l = self.separation();
        // antiderivative of the Moiré lever arm k(z)
        let big_k = |z: f64| {
            if z <= l {
                0.5 * z * z
            } else {
                0.5 * l * l + 2.0 * l * (z - l) - 0.5 * (z * z - l * l)
            }
        };
        big_k(self.region_end()) - big_k(self.region_start)
    }

    /// Pattern displacement at the third grating, m.
    pub fn stark_shift(&self, chi: f64, mass: f64, velocity: f64) -> f64 {
        self.acceleration(chi, mass) * self.geometry_factor() / (velocity * velocity)
    }

    /// Traverses the whole field region: `v_x += a·ℓ/v_y`, plus the
    /// in-region displacement `½·a·(ℓ/v_y)²`.
    pub fn apply_kick(&self, state: &Trajectory, alpha_eff: f64, mass: f64) -> Trajectory {
        state.accelerate(self.region_length, self.acceleration(alpha_eff, mass))
    }

    /// Moves `state` to `z_to`, accelerating only inside the field region.
    pub fn propagate(&self, state: &Trajectory, z_to: f64, alpha_eff: f64, mass: f64) -> Trajectory {
        let accel = self.acceleration(alpha_eff, mass);
        let (r0, r1) = (self.region_start, self.region_end());
        let mut s = *state;
        let z0 = s.z;
        // before the region
        let a = r0.clamp(z0, z_to);
        if a > s.z {
            s = s.drift(a - s.z);
        }
        let b = r1.clamp(z0, z_to);
        if b > s.z {
            s = if accel == 0.0 { s.drift(b - s.z) } else { s.accelerate(b - s.z, accel) };
        }
        if z_to > s.z {
            s = s.drift(z_to - s.z);
        }
        s.z = z_to;
        s
    }
}

//! Transmission through one grating, including the attractive
//! Casimir-Polder interaction with both slit walls.
//!
//! Slits of width `f·g` are centred on multiples of the period. Inside a
//! slit the transverse motion is integrated across the grating thickness
//! under the two-wall force; a particle coming closer than `r_min` to a wall
//! sticks. Motion is reported relative to free flight, so a grating with CP
//! disabled (or a particle with α = 0) acts as a thin binary mask.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::{C, HBAR};

/// Coefficient of `U(r) = −(3ħc/8π)·α/r⁴`, J·m.
pub const CP_POTENTIAL_COEFF: f64 = 3.0 * HBAR * C / (8.0 * PI);

const MIN_STEPS: usize = 32;
const MAX_STEPS: usize = 1 << 14;
const STATE_TOL: f64 = 1e-3;
const WINDOW_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec {
    /// Period g, m.
    pub period: f64,
    /// Slit width over period.
    pub open_fraction: f64,
    /// Wall depth along the beam, m.
    pub thickness: f64,
    pub cp_enabled: bool,
    /// Sticking distance from a wall, m.
    pub r_min: f64,
}

impl GratingSpec {
    pub fn new(period: f64, open_fraction: f64) -> Self {
        GratingSpec {
            period,
            open_fraction,
            thickness: 500e-9,
            cp_enabled: false,
            r_min: 1e-9,
        }
    }

    pub fn with_cp(mut self, enabled: bool) -> Self {
        self.cp_enabled = enabled;
        self
    }

    pub fn slit_width(&self) -> f64 {
        self.open_fraction * self.period
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0) {
            return Err(Error::Config("grating period must be positive".into()));
        }
        if !(self.open_fraction > 0.0 && self.open_fraction <= 1.0) {
            return Err(Error::Config("open_fraction must lie in (0, 1]".into()));
        }
        if !(self.thickness > 0.0) {
            return Err(Error::Config("grating thickness must be positive".into()));
        }
        if !(self.r_min > 0.0 && self.r_min < 0.5 * self.slit_width()) {
            return Err(Error::Config("r_min must lie in (0, slit width / 2)".into()));
        }
        Ok(())
    }

    /// Position relative to the nearest slit centre, in `[−g/2, g/2)`.
    pub fn local(&self, x: f64) -> f64 {
        x - self.period * (x / self.period + 0.5).floor()
    }

    pub fn in_slit(&self, x: f64) -> bool {
        let u = self.local(x);
        let h = 0.5 * self.slit_width();
        (-h..h).contains(&u)
    }

    /// Passes one particle at transverse position `x` (grating frame).
    pub fn transmit(&self, x: f64, vx: f64, vy: f64, alpha: f64, mass: f64) -> Transmission {
        let u = self.local(x);
        let w = self.slit_width();
        let h = 0.5 * w;
        if !(-h..h).contains(&u) {
            return Transmission::Blocked(Blocked::Bar);
        }
        if !self.cp_enabled || alpha == 0.0 {
            return Transmission::Transmitted { x_exit: x, vx_exit: vx };
        }
        let xi0 = u + h;
        if xi0 < self.r_min {
            return Transmission::Blocked(Blocked::LeftWall);
        }
        if w - xi0 < self.r_min {
            return Transmission::Blocked(Blocked::RightWall);
        }
        let tau = self.thickness / vy;
        match self.integrate_converged(xi0, vx, tau, alpha, mass) {
            Flight::Hit(b) => Transmission::Blocked(b),
            Flight::Exit { xi, v } => Transmission::Transmitted {
                x_exit: x + (xi - xi0 - vx * tau),
                vx_exit: v,
            },
        }
    }

    /// Entry interval `[lo, hi)` (relative to the slit centre) that is
    /// transmitted for the given velocity state; `None` if nothing passes.
    ///
    /// Two-wall CP forces grow with `x` everywhere in the slit, so
    /// trajectories never cross; the blocked sets are contiguous at each wall.
    pub fn acceptance_window(&self, vx: f64, vy: f64, alpha: f64, mass: f64) -> Option<(f64, f64)> {
        let h = 0.5 * self.slit_width();
        if !self.cp_enabled || alpha == 0.0 {
            return Some((-h, h));
        }
        let tol = WINDOW_TOL * self.slit_width();
        let hits = |u: f64, wall: Blocked| {
            if u >= h {
                return wall == Blocked::RightWall;
            }
            matches!(self.transmit(u, vx, vy, alpha, mass), Transmission::Blocked(b) if b == wall)
        };
        // left edge: hits-left holds below it
        let (mut a, mut b) = (-h, h);
        while b - a > tol {
            let m = 0.5 * (a + b);
            if hits(m, Blocked::LeftWall) {
                a = m;
            } else {
                b = m;
            }
        }
        let lo = b;
        let (mut a, mut b) = (lo, h);
        if hits(a, Blocked::RightWall) {
            return None;
        }
        while b - a > tol {
            let m = 0.5 * (a + b);
            if hits(m, Blocked::RightWall) {
                b = m;
            } else {
                a = m;
            }
        }
        let hi = a;
        (hi > lo).then_some((lo, hi))
    }

    fn integrate_converged(&self, xi0: f64, v0: f64, tau: f64, alpha: f64, mass: f64) -> Flight {
        let w = self.slit_width();
        let k = 4.0 * CP_POTENTIAL_COEFF * alpha / mass;
        let tol = STATE_TOL * w;
        let mut n = MIN_STEPS;
        let mut coarse = integrate(xi0, v0, tau, k, w, self.r_min, n);
        loop {
            n *= 2;
            let fine = integrate(xi0, v0, tau, k, w, self.r_min, n);
            let done = match (coarse, fine) {
                (Flight::Hit(a), Flight::Hit(b)) => a == b,
                (Flight::Exit { xi: x1, v: v1 }, Flight::Exit { xi: x2, v: v2 }) => {
                    (x1 - x2).abs() <= tol && (v1 - v2).abs() * tau <= tol
                }
                _ => false,
            };
            if done || n >= MAX_STEPS {
                return fine;
            }
            coarse = fine;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blocked {
    Bar,
    LeftWall,
    RightWall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transmission {
    Blocked(Blocked),
    Transmitted { x_exit: f64, vx_exit: f64 },
}

impl Transmission {
    pub fn is_transmitted(&self) -> bool {
        matches!(self, Transmission::Transmitted { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Flight {
    Hit(Blocked),
    Exit { xi: f64, v: f64 },
}

/// Fixed-step RK4 across the slit; `xi` measured from the left wall.
fn integrate(xi0: f64, v0: f64, tau: f64, k: f64, w: f64, r_min: f64, steps: usize) -> Flight {
    let accel = |xi: f64| k * ((w - xi).powi(-5) - xi.powi(-5));
    let check = |xi: f64| {
        if xi < r_min {
            Some(Blocked::LeftWall)
        } else if w - xi < r_min {
            Some(Blocked::RightWall)
        } else {
            None
        }
    };
    let dt = tau / steps as f64;
    let (mut x, mut v) = (xi0, v0);
    for _ in 0..steps {
        let k1x = v;
        let k1v = accel(x);
        let x2 = x + 0.5 * dt * k1x;
        if let Some(b) = check(x2) {
            return Flight::Hit(b);
        }
        let k2x = v + 0.5 * dt * k1v;
        let k2v = accel(x2);
        let x3 = x + 0.5 * dt * k2x;
        if let Some(b) = check(x3) {
            return Flight::Hit(b);
        }
        let k3x = v + 0.5 * dt * k2v;
        let k3v = accel(x3);
        let x4 = x + dt * k3x;
        if let Some(b) = check(x4) {
            return Flight::Hit(b);
        }
        let k4x = v + dt * k3v;
        let k4v = accel(x4);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if let Some(b) = check(x) {
            return Flight::Hit(b);
        }
    }
    Flight::Exit { xi: x, v }
}

/// `U(r) = −(3ħc/8π)·α/r⁴`, J.
pub fn cp_potential(r: f64, alpha: f64) -> f64 {
    -CP_POTENTIAL_COEFF * alpha / r.powi(4)
}

/// Magnitude of the single-wall attraction `(3ħc/2π)·α/r⁵`, N.
pub fn cp_force(r: f64, alpha: f64) -> f64 {
    4.0 * CP_POTENTIAL_COEFF * alpha / r.powi(5)
}

/// Net two-wall force at distance `xi` from the left wall of a slit of width
/// `w`; positive towards the right wall.
pub fn slit_force(xi: f64, w: f64, alpha: f64) -> f64 {
    cp_force(w - xi, alpha) - cp_force(xi, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use rand::Rng;

    #[test]
    fn potential_values() {
        assert_eq!(cp_potential(1e-7, 0.0), 0.0);
        let u = cp_potential(100e-9, 8.9e-29);
        assert!((u + 3.36e-27).abs() < 0.01e-27, "{u:e}");
        assert!((cp_potential(1e-7, 1e-28) / cp_potential(2e-7, 1e-28) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn force_values() {
        let f = cp_force(100e-9, 8.9e-29);
        assert!((f - 4.0 * cp_potential(100e-9, 8.9e-29).abs() / 100e-9).abs() < 1e-30);
        assert!((f - 1.345e-19).abs() < 0.01e-19, "{f:e}");
        assert!((cp_force(1e-7, 1e-28) / cp_force(2e-7, 1e-28) - 32.0).abs() < 1e-10);
        assert_eq!(slit_force(1e-7, 2e-7, 1e-28), 0.0);
    }

    fn nanotube_grating() -> GratingSpec {
        GratingSpec::new(10e-6, 0.2).with_cp(true)
    }

    #[test]
    fn bar_blocks() {
        let g = nanotube_grating();
        assert_eq!(g.transmit(5e-6, 0.0, 100.0, 1e-23, 1.7e-22), Transmission::Blocked(Blocked::Bar));
        assert_eq!(g.transmit(-5e-6 + 1e7 * 10e-6, 0.0, 100.0, 0.0, 1.0), Transmission::Blocked(Blocked::Bar));
    }

    #[test]
    fn slit_centre_is_an_equilibrium() {
        let g = nanotube_grating();
        for alpha in [1e-25, 1e-23, 1e-21] {
            match g.transmit(30e-6, 0.0, 100.0, alpha, 1.7e-22) {
                Transmission::Transmitted { x_exit, vx_exit } => {
                    assert!((x_exit - 30e-6).abs() < 1e-15);
                    assert!(vx_exit.abs() < 1e-12);
                }
                t => panic!("{t:?}"),
            }
        }
    }

    #[test]
    fn mirror_symmetry() {
        let g = nanotube_grating();
        for u in [0.2e-6, 0.6e-6, 0.9e-6] {
            let (a, b) = (g.transmit(u, 0.0, 100.0, 1e-23, 1.7e-22), g.transmit(-u, 0.0, 100.0, 1e-23, 1.7e-22));
            match (a, b) {
                (
                    Transmission::Transmitted { x_exit: xa, vx_exit: va },
                    Transmission::Transmitted { x_exit: xb, vx_exit: vb },
                ) => {
                    assert!((xa + xb).abs() < 1e-6 * 2e-6, "{xa} {xb}");
                    assert!((va + vb).abs() <= 1e-6 * va.abs().max(1e-12));
                }
                (Transmission::Blocked(x), Transmission::Blocked(y)) => {
                    assert_ne!(x, y);
                }
                other => panic!("asymmetric {other:?}"),
            }
        }
    }

    #[test]
    fn no_cp_is_a_binary_mask() {
        let g = GratingSpec::new(990e-9, 0.2);
        let mut rng = RandomStream::new(42, 0).rng();
        let n = 200_000;
        let passed = (0..n)
            .filter(|_| {
                let x = rng.random_range(0.0..1000.0 * 990e-9);
                g.transmit(x, 0.0, 340.0, 1e-28, 1e-24).is_transmitted()
            })
            .count();
        let p = passed as f64 / n as f64;
        let se = (0.2f64 * 0.8 / n as f64).sqrt();
        assert!((p - 0.2).abs() < 4.0 * se, "{p}");
    }

    #[test]
    fn cp_transmission_decreases_with_alpha() {
        let g = GratingSpec::new(990e-9, 0.2).with_cp(true);
        let m = 460.0 * crate::units::AMU;
        let frac = |alpha: f64| {
            let n = 4000;
            (0..n)
                .filter(|i| {
                    let x = -0.1e-6 + 0.2e-6 * (*i as f64 + 0.5) / n as f64;
                    g.transmit(x, 0.0, 340.0, alpha, m).is_transmitted()
                })
                .count() as f64
                / n as f64
        };
        let mut prev = 1.0;
        for alpha in [1e-30, 1e-29, 1e-28, 1e-27, 1e-26] {
            let f = frac(alpha);
            assert!(f < prev, "alpha {alpha:e}: {f} !< {prev}");
            prev = f;
        }
    }

    /// Fall time from rest at `r0` to `r_min` under one wall:
    /// `T = ∫ dr / sqrt(2kα/m·(r⁻⁴ − r0⁻⁴))`, with `r = r0 − s²`.
    fn fall_time(r0: f64, r_min: f64, alpha: f64, mass: f64) -> f64 {
        let c = 2.0 * CP_POTENTIAL_COEFF * alpha / mass;
        let smax = (r0 - r_min).sqrt();
        let n = 200_000;
        let h = smax / n as f64;
        (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                let r = r0 - s * s;
                2.0 * s / (c * (r.powi(-4) - r0.powi(-4))).sqrt() * h
            })
            .sum()
    }

    #[test]
    fn near_wall_capture_matches_fall_time_oracle() {
        let g = nanotube_grating();
        let (mass, vy) = (1.7e-22, 50.0);
        let tau = g.thickness / vy;
        let r0 = 2.0 * g.r_min;
        let alpha1 = 1e-30;
        let crit = alpha1 * (fall_time(r0, g.r_min, alpha1, mass) / tau).powi(2);
        let x = -0.5 * g.slit_width() + r0;
        assert_eq!(
            g.transmit(x, 0.0, vy, 1.2 * crit, mass),
            Transmission::Blocked(Blocked::LeftWall)
        );
        assert!(g.transmit(x, 0.0, vy, 0.8 * crit, mass).is_transmitted());
    }

    #[test]
    fn window_brackets_transmit() {
        let g = nanotube_grating();
        let (vx, vy, alpha, m) = (1e-3, 100.0, 1e-23, 1.7e-22);
        let (lo, hi) = g.acceptance_window(vx, vy, alpha, m).unwrap();
        assert!(lo > -1e-6 && hi < 1e-6);
        let tol = 2.0 * WINDOW_TOL * g.slit_width();
        assert!(g.transmit(lo + tol, vx, vy, alpha, m).is_transmitted());
        assert!(g.transmit(hi - tol, vx, vy, alpha, m).is_transmitted());
        assert!(!g.transmit(lo - tol, vx, vy, alpha, m).is_transmitted());
        assert!(!g.transmit(hi + tol, vx, vy, alpha, m).is_transmitted());
        let open = GratingSpec::new(10e-6, 0.2).acceptance_window(vx, vy, alpha, m).unwrap();
        assert!((open.0 + 1e-6).abs() < 1e-18 && (open.1 - 1e-6).abs() < 1e-18, "{open:?}");
    }

    #[test]
    fn r_min_insensitivity() {
        // sticking distance between 0.5 and 2 nm barely moves the window
        let (vx, vy, alpha, m) = (0.0, 100.0, 3.8e-25, 3.2e-22);
        let widths: Vec<f64> = [0.5e-9, 1e-9, 2e-9]
            .iter()
            .map(|&r| {
                let mut g = nanotube_grating();
                g.r_min = r;
                let (lo, hi) = g.acceptance_window(vx, vy, alpha, m).unwrap();
                hi - lo
            })
            .collect();
        for w in &widths {
            assert!((w - widths[1]).abs() < 0.01 * widths[1], "{widths:?}");
        }
    }

    #[test]
    fn validation() {
        assert!(GratingSpec::new(1e-6, 1.01).validate().is_err());
        let mut g = GratingSpec::new(1e-6, 0.2);
        g.r_min = 0.2e-6;
        assert!(g.validate().is_err());
        assert!(GratingSpec::new(1e-6, 0.2).validate().is_ok());
    }
}

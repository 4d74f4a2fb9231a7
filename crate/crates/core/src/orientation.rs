//! Orientation models: map (α_∥, α_⊥) to the effective polarizability along
//! the deflecting field.
//!
//! Orientation is frozen per particle for the whole flight. The rotor mode is
//! the classical linear-rotor time average: the tube axis precesses about its
//! angular momentum `J`, giving `⟨cos²θ⟩_t = ½·sin²θ_J`, with `J` isotropic.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::species::Species;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrientationMode {
    /// Tube axis along the field, `cos²θ = 1`.
    #[default]
    Aligned,
    /// Random static orientation, `cosθ` uniform in [-1, 1].
    StaticIsotropic,
    /// Classical rotor time average about an isotropic `J`.
    RotorAveraged,
}

impl FromStr for OrientationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aligned" => Ok(OrientationMode::Aligned),
            "static-isotropic" | "static" | "isotropic" => Ok(OrientationMode::StaticIsotropic),
            "rotor-averaged" | "rotor" => Ok(OrientationMode::RotorAveraged),
            other => Err(Error::Config(format!(
                "unknown orientation mode `{other}` (aligned, static-isotropic, rotor-averaged)"
            ))),
        }
    }
}

impl fmt::Display for OrientationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrientationMode::Aligned => "aligned",
            OrientationMode::StaticIsotropic => "static-isotropic",
            OrientationMode::RotorAveraged => "rotor-averaged",
        })
    }
}

/// `α_eff = α_⊥ + (α_∥ − α_⊥)·cos²θ`, plus the species' thermal dipole term.
pub fn effective_alpha(species: &Species, cos2theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&cos2theta) {
        return Err(Error::Domain(format!("cos²θ = {cos2theta} is outside [0, 1]")));
    }
    Ok(species.alpha_perp
        + (species.alpha_parallel - species.alpha_perp) * cos2theta
        + species.dipole_term()?)
}

pub fn sample_cos2theta<R: Rng + ?Sized>(mode: OrientationMode, rng: &mut R) -> f64 {
    match mode {
        OrientationMode::Aligned => 1.0,
        OrientationMode::StaticIsotropic => {
            let u: f64 = rng.random_range(-1.0..1.0);
            u * u
        }
        OrientationMode::RotorAveraged => {
            let u: f64 = rng.random_range(-1.0..1.0);
            0.5 * (1.0 - u * u)
        }
    }
}

/// Midpoint quadrature `(cos²θ, weight)` for the orientation distribution,
/// used by the analytic scan.
pub fn cos2theta_quadrature(mode: OrientationMode, nodes: usize) -> Vec<(f64, f64)> {
    match mode {
        OrientationMode::Aligned => vec![(1.0, 1.0)],
        OrientationMode::StaticIsotropic | OrientationMode::RotorAveraged => {
            let n = nodes.max(1);
            let w = 1.0 / n as f64;
            (0..n)
                .map(|i| {
                    let u = (i as f64 + 0.5) * w;
                    let c = if mode == OrientationMode::StaticIsotropic {
                        u * u
                    } else {
                        0.5 * (1.0 - u * u)
                    };
                    (c, w)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::species::preset;

    #[test]
    fn limits_of_effective_alpha() {
        let t = preset("swcnt-9-0-100nm").unwrap();
        assert_eq!(effective_alpha(&t, 1.0).unwrap(), t.alpha_parallel);
        assert_eq!(effective_alpha(&t, 0.0).unwrap(), t.alpha_perp);
        let c = preset("C60").unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(effective_alpha(&c, x).unwrap(), c.alpha_parallel);
        }
        assert!(effective_alpha(&t, 1.2).is_err());
        assert!(effective_alpha(&t, -0.1).is_err());
    }

    fn mean_and_max(mode: OrientationMode) -> (f64, f64) {
        let mut rng = RandomStream::new(11, 0).rng();
        let n = 100_000;
        let (mut sum, mut max) = (0.0, 0.0f64);
        for _ in 0..n {
            let c = sample_cos2theta(mode, &mut rng);
            sum += c;
            max = max.max(c);
        }
        (sum / n as f64, max)
    }

    #[test]
    fn aligned_is_always_one() {
        let mut rng = RandomStream::new(1, 1).rng();
        assert!((0..100).all(|_| sample_cos2theta(OrientationMode::Aligned, &mut rng) == 1.0));
    }

    #[test]
    fn isotropic_means_are_one_third() {
        let (m, max) = mean_and_max(OrientationMode::StaticIsotropic);
        assert!((m - 1.0 / 3.0).abs() < 0.01, "{m}");
        assert!(max > 0.99);
        let (m, max) = mean_and_max(OrientationMode::RotorAveraged);
        assert!((m - 1.0 / 3.0).abs() < 0.01, "{m}");
        assert!(max <= 0.5);
    }

    #[test]
    fn ensemble_mean_of_effective_alpha() {
        let t = preset("swcnt-17-0-100nm").unwrap();
        let expect = t.alpha_perp + (t.alpha_parallel - t.alpha_perp) / 3.0;
        for mode in [OrientationMode::StaticIsotropic, OrientationMode::RotorAveraged] {
            let mut rng = RandomStream::new(5, 9).rng();
            let n = 100_000;
            let mut sum = 0.0;
            for _ in 0..n {
                let a = effective_alpha(&t, sample_cos2theta(mode, &mut rng)).unwrap();
                assert!(a >= t.alpha_perp && a <= t.alpha_parallel);
                sum += a;
            }
            let m = sum / n as f64;
            assert!((m - expect).abs() / expect < 0.01, "{mode}: {m:e} vs {expect:e}");
        }
    }

    #[test]
    fn quadrature_means() {
        for mode in [OrientationMode::StaticIsotropic, OrientationMode::RotorAveraged] {
            let q = cos2theta_quadrature(mode, 256);
            let m: f64 = q.iter().map(|(c, w)| c * w).sum();
            assert!((m - 1.0 / 3.0).abs() < 1e-5);
        }
    }

    #[test]
    fn parse_modes() {
        assert_eq!("rotor-averaged".parse::<OrientationMode>().unwrap(), OrientationMode::RotorAveraged);
        assert!("tumbling".parse::<OrientationMode>().is_err());
    }
}

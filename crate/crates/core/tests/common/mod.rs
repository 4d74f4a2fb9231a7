#![allow(dead_code)]

use moire_sort::engine::SpeciesEntry;
use moire_sort::{preset, BeamModel, DeflectionField, GratingSpec, Scenario};

pub const L: f64 = 0.385;

pub fn peptide_calibration() -> f64 {
    DeflectionField::calibration_from_anchor(1.05e13, 7500.0).unwrap()
}

pub fn scenario(names: &[&str], g: f64, f: f64, v: f64, spread: f64, voltage: f64) -> Scenario {
    let field = DeflectionField::at_second_grating(L, 0.05, peptide_calibration(), voltage);
    let species = names.iter().map(|n| SpeciesEntry::new(preset(n).unwrap())).collect();
    Scenario::new("test", species, BeamModel::new(v, spread), GratingSpec::new(g, f), L, field)
}

/// CDF of `y = 2·U₂ − U₁` with `U₁, U₂` uniform on `[−w/2, w/2]`, i.e. the
/// sum of U(−w, w) and U(−w/2, w/2): a trapezoid density.
pub fn shadow_cdf(y: f64, w: f64) -> f64 {
    // density of a + b, a ~ U(−A, A), b ~ U(−B, B), A ≥ B
    let (a, b) = (w, w / 2.0);
    let h = 1.0 / (2.0 * a);
    if y <= -a - b {
        0.0
    } else if y <= -a + b {
        let t = y + a + b;
        h * t * t / (4.0 * b)
    } else if y <= a - b {
        h * b + h * (y - (-a + b))
    } else if y <= a + b {
        let t = a + b - y;
        1.0 - h * t * t / (4.0 * b)
    } else {
        1.0
    }
}

/// Zero-field shadow signal for identical gratings of open fraction `f`.
pub fn shadow_signal(xs: f64, g: f64, f: f64, shift: f64) -> f64 {
    let w = f * g;
    let mut p = 0.0;
    for k in -4..=4 {
        let c = xs - shift + k as f64 * g;
        p += shadow_cdf(c + w / 2.0, w) - shadow_cdf(c - w / 2.0, w);
    }
    f * f * p
}

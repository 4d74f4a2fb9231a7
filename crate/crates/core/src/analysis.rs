//! Fringe normalization, enrichment, sinusoidal fits and voltage search.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::engine::{scan_with, EngineMode, FringeScan, ScanSet, Scenario};
use crate::error::{Error, Result};

pub const MIN_FIT_OFFSETS: usize = 8;

/// `S̃ = S / (S_max + S_min)` using the raw extrema of the scan.
pub fn normalize(scan: &FringeScan) -> Result<FringeScan> {
    let (lo, hi) = extrema(&scan.signal)
        .ok_or_else(|| Error::Degenerate(format!("{}: empty scan", scan.species)))?;
    let denom = hi + lo;
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!("{}: signal is identically zero", scan.species)));
    }
    Ok(scan.scaled(1.0 / denom))
}

fn extrema(v: &[f64]) -> Option<(f64, f64)> {
    if v.is_empty() {
        return None;
    }
    Some(v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x))))
}

/// `(S_max − S_min)/(S_max + S_min)` of the raw samples.
pub fn contrast(scan: &FringeScan) -> Result<f64> {
    let (lo, hi) = extrema(&scan.signal)
        .ok_or_else(|| Error::Degenerate(format!("{}: empty scan", scan.species)))?;
    if !(hi + lo > 0.0) {
        return Err(Error::Degenerate(format!("{}: signal is identically zero", scan.species)));
    }
    Ok((hi - lo) / (hi + lo))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enrichment {
    /// `max_x (S̃₁(x) − S̃₂(x))`.
    pub eta: f64,
    /// Offset at which the maximum occurs (smallest on ties), m.
    pub offset: f64,
    pub index: usize,
}

/// Enrichment of `first` over `second` at a shared third-grating offset.
pub fn enrichment(first: &FringeScan, second: &FringeScan) -> Result<Enrichment> {
    if first.offsets.len() != second.offsets.len()
        || first
            .offsets
            .iter()
            .zip(&second.offsets)
            .any(|(a, b)| (a - b).abs() > 1e-9 * first.period)
    {
        return Err(Error::Contract("enrichment needs scans on the same offset grid".into()));
    }
    let a = normalize(first)?;
    let b = normalize(second)?;
    let mut best = Enrichment { eta: f64::NEG_INFINITY, offset: 0.0, index: 0 };
    for (i, (x, y)) in a.signal.iter().zip(&b.signal).enumerate() {
        let d = x - y;
        if d > best.eta {
            best = Enrichment { eta: d, offset: a.offsets[i], index: i };
        }
    }
    Ok(best)
}

/// Least-squares fit `S(x) = A + B·cos(2π(x − s)/g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub mean: f64,
    pub amplitude: f64,
    /// Fringe position `s` in `[0, g)`, m.
    pub shift: f64,
    /// `B/A`; exceeds 1 for strongly non-sinusoidal fringes.
    pub visibility: f64,
    /// Raw `(max − min)/(max + min)`.
    pub contrast: f64,
    pub rms_residual: f64,
    /// False when the amplitude is not resolved above the residual.
    pub converged: bool,
}

pub fn fit_fringe(scan: &FringeScan) -> Result<FringeFit> {
    let n = scan.len();
    if n < MIN_FIT_OFFSETS {
        return Err(Error::Degenerate(format!(
            "{}: need at least {MIN_FIT_OFFSETS} offsets to fit",
            scan.species
        )));
    }
    let raw_contrast = contrast(scan)?;
    let k = 2.0 * PI / scan.period;
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for (&x, &y) in scan.offsets.iter().zip(&scan.signal) {
        let row = Vector3::new(1.0, (k * x).cos(), (k * x).sin());
        ata += row * row.transpose();
        atb += row * y;
    }
    let Some(chol) = ata.cholesky() else {
        return Ok(residual_only(scan, raw_contrast));
    };
    let p = chol.solve(&atb);
    let (a, c, d) = (p[0], p[1], p[2]);
    if !(a > 0.0) {
        return Ok(residual_only(scan, raw_contrast));
    }
    let b = c.hypot(d);
    let shift = (d.atan2(c) / k).rem_euclid(scan.period);
    let ss: f64 = scan
        .offsets
        .iter()
        .zip(&scan.signal)
        .map(|(&x, &y)| (y - a - c * (k * x).cos() - d * (k * x).sin()).powi(2))
        .sum();
    let rms = (ss / n as f64).sqrt();
    Ok(FringeFit {
        mean: a,
        amplitude: b,
        shift,
        visibility: b / a,
        contrast: raw_contrast,
        rms_residual: rms,
        converged: b > 2.0 * rms / (n as f64 / 2.0).sqrt(),
    })
}

/// Mean-only model when the fundamental cannot be fitted.
fn residual_only(scan: &FringeScan, contrast: f64) -> FringeFit {
    let n = scan.len() as f64;
    let mean = scan.signal.iter().sum::<f64>() / n;
    let ss: f64 = scan.signal.iter().map(|y| (y - mean).powi(2)).sum();
    FringeFit {
        mean,
        amplitude: 0.0,
        shift: 0.0,
        visibility: 0.0,
        contrast,
        rms_residual: (ss / n).sqrt(),
        converged: false,
    }
}

/// Fringe displacement `s₁ − s₂` wrapped into `[−g/2, g/2)`.
pub fn relative_shift(a: &FringeFit, b: &FringeFit, period: f64) -> f64 {
    (a.shift - b.shift + 0.5 * period).rem_euclid(period) - 0.5 * period
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoltageOptimum {
    pub voltage: f64,
    /// Worst-case enrichment against all competitors at `voltage`.
    pub eta: f64,
    pub offset: f64,
    /// Competitor that limits `eta`.
    pub competitor: String,
    /// `(U, η)` on the search grid.
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoltageSearch {
    pub target: String,
    pub umin: f64,
    pub umax: f64,
    pub steps: usize,
    pub mode: EngineMode,
    /// Golden-section iterations around the best grid point (analytic
    /// engine only).
    pub refine: usize,
}

impl VoltageSearch {
    pub fn new(target: impl Into<String>, umin: f64, umax: f64, steps: usize) -> Self {
        VoltageSearch { target: target.into(), umin, umax, steps, mode: EngineMode::Auto, refine: 24 }
    }
}

struct Point {
    voltage: f64,
    eta: f64,
    offset: f64,
    competitor: usize,
}

fn worst_case_of(set: &ScanSet, target: usize, voltage: f64) -> Result<Point> {
    let mut p = Point { voltage, eta: f64::INFINITY, offset: 0.0, competitor: 0 };
    for (i, other) in set.scans.iter().enumerate() {
        if i == target {
            continue;
        }
        let e = enrichment(&set.scans[target], other)?;
        if e.eta < p.eta {
            p = Point { voltage, eta: e.eta, offset: e.offset, competitor: i };
        }
    }
    Ok(p)
}

fn worst_case(scn: &Scenario, target: usize, voltage: f64, mode: EngineMode) -> Result<Point> {
    worst_case_of(&scan_with(&scn.with_voltage(voltage), mode)?, target, voltage)
}

/// Scans of one scenario over a voltage grid; any species can then be
/// scored as the target without rescanning.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageSweep {
    pub voltages: Vec<f64>,
    pub sets: Vec<ScanSet>,
    species: Vec<String>,
}

pub fn voltage_grid(umin: f64, umax: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(umax >= umin) || umin < 0.0 {
        return Err(Error::Contract("voltage search grid is empty".into()));
    }
    if steps == 1 {
        return Ok(vec![umin]);
    }
    Ok((0..steps)
        .map(|i| umin + (umax - umin) * i as f64 / (steps - 1) as f64)
        .collect())
}

pub fn voltage_sweep(scn: &Scenario, voltages: &[f64], mode: EngineMode) -> Result<VoltageSweep> {
    if voltages.is_empty() {
        return Err(Error::Contract("voltage search grid is empty".into()));
    }
    let sets = voltages
        .iter()
        .map(|&u| scan_with(&scn.with_voltage(u), mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(VoltageSweep {
        voltages: voltages.to_vec(),
        sets,
        species: scn.species.iter().map(|e| e.species.name.clone()).collect(),
    })
}

impl VoltageSweep {
    /// Best grid voltage for `target` (smallest voltage on ties).
    pub fn best(&self, target: usize) -> Result<VoltageOptimum> {
        if self.species.len() < 2 {
            return Err(Error::Config("voltage optimization needs at least two species".into()));
        }
        let mut curve = Vec::with_capacity(self.voltages.len());
        let mut best: Option<Point> = None;
        for (set, &u) in self.sets.iter().zip(&self.voltages) {
            let p = worst_case_of(set, target, u)?;
            curve.push((u, p.eta));
            if best.as_ref().is_none_or(|b| p.eta > b.eta) {
                best = Some(p);
            }
        }
        let b = best.expect("sweep is non-empty");
        Ok(VoltageOptimum {
            voltage: b.voltage,
            eta: b.eta,
            offset: b.offset,
            competitor: self.species[b.competitor].clone(),
            curve,
        })
    }
}

/// Voltage maximizing the worst-case enrichment of `target` over every
/// other species. Grid search, then (analytic engine) golden-section
/// refinement between the neighbours of the best grid point; the smallest
/// voltage wins ties.
pub fn optimize_voltage(scn: &Scenario, search: &VoltageSearch) -> Result<VoltageOptimum> {
    let grid = voltage_grid(search.umin, search.umax, search.steps)?;
    if scn.species.len() < 2 {
        return Err(Error::Config("voltage optimization needs at least two species".into()));
    }
    let target = scn
        .species_index(&search.target)
        .ok_or_else(|| Error::Config(format!("target species '{}' not in scenario", search.target)))?;
    let mut opt = voltage_sweep(scn, &grid, search.mode)?.best(target)?;
    let analytic = match search.mode {
        EngineMode::Analytic => true,
        EngineMode::MonteCarlo => false,
        EngineMode::Auto => !scn.cp_enabled(),
    };
    if analytic && grid.len() > 2 && search.refine > 0 {
        let i = grid.iter().position(|&u| u == opt.voltage).unwrap_or(0);
        let mut a = grid[i.saturating_sub(1)];
        let mut b = grid[(i + 1).min(grid.len() - 1)];
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let mut pc = worst_case(scn, target, c, search.mode)?;
        let mut pd = worst_case(scn, target, d, search.mode)?;
        for _ in 0..search.refine {
            if pc.eta >= pd.eta {
                b = d;
                d = c;
                pd = pc;
                c = b - r * (b - a);
                pc = worst_case(scn, target, c, search.mode)?;
            } else {
                a = c;
                c = d;
                pc = pd;
                d = a + r * (b - a);
                pd = worst_case(scn, target, d, search.mode)?;
            }
        }
        for p in [pc, pd] {
            if p.eta > opt.eta {
                opt.voltage = p.voltage;
                opt.eta = p.eta;
                opt.offset = p.offset;
                opt.competitor = scn.species[p.competitor].species.name.clone();
            }
        }
    }
    Ok(opt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sinus(name: &str, g: f64, a: f64, b: f64, s: f64) -> FringeScan {
        FringeScan::from_fn(name, g, 64, |x| a + b * (2.0 * PI * (x - s) / g).cos())
    }

    #[test]
    fn fit_recovers_sinusoid() {
        let g = 990e-9;
        let f = fit_fringe(&sinus("a", g, 0.04, 0.01, 300e-9)).unwrap();
        assert_relative_eq!(f.mean, 0.04, max_relative = 1e-12);
        assert_relative_eq!(f.amplitude, 0.01, max_relative = 1e-10);
        assert_relative_eq!(f.shift, 300e-9, max_relative = 1e-10);
        assert_relative_eq!(f.visibility, 0.25, max_relative = 1e-10);
        assert!(f.converged);
    }

    #[test]
    fn flat_scan_has_zero_visibility() {
        let f = fit_fringe(&FringeScan::from_fn("a", 1.0, 16, |_| 0.3)).unwrap();
        assert!(f.visibility.abs() < 1e-12);
        assert!(!f.converged);
    }

    #[test]
    fn too_few_offsets() {
        let s = FringeScan::from_fn("a", 1.0, 7, |x| 1.0 + x);
        assert!(matches!(fit_fringe(&s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn unresolvable_offsets_flagged() {
        // all samples at one offset: the cos/sin columns are collinear
        let mut s = FringeScan::from_fn("a", 1.0, 8, |_| 1.0);
        s.offsets = vec![0.25; 8];
        s.signal = vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        let f = fit_fringe(&s).unwrap();
        assert!(!f.converged);
        assert!((f.rms_residual - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_scan_normalizes_to_half() {
        let n = normalize(&FringeScan::from_fn("a", 1.0, 8, |_| 0.7)).unwrap();
        assert!(n.signal.iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn normalized_sum_is_one() {
        let n = normalize(&sinus("a", 1.0, 2.0, 1.0, 0.1)).unwrap();
        let (lo, hi) = extrema(&n.signal).unwrap();
        assert_relative_eq!(lo + hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_signal_is_degenerate() {
        let z = FringeScan::from_fn("a", 1.0, 8, |_| 0.0);
        assert!(matches!(normalize(&z), Err(Error::Degenerate(_))));
    }

    #[test]
    fn enrichment_of_opposite_fringes() {
        // Anti-phase full-contrast fringes: S̃ ranges 0..1, η = 1.
        let a = sinus("a", 1.0, 1.0, 1.0, 0.0);
        let b = sinus("b", 1.0, 1.0, 1.0, 0.5);
        let e = enrichment(&a, &b).unwrap();
        assert_relative_eq!(e.eta, 1.0, epsilon = 1e-12);
        assert_eq!(e.index, 0);
    }

    #[test]
    fn enrichment_sinusoid_closed_form() {
        // Equal visibility V, shift δ: η = V·sin(πδ/g) when sampled finely.
        let g = 990e-9;
        let v = 0.15;
        let a = FringeScan::from_fn("a", g, 4096, |x| 1.0 + v * (2.0 * PI * x / g).cos());
        let b = FringeScan::from_fn("b", g, 4096, |x| 1.0 + v * (2.0 * PI * (x - 171e-9) / g).cos());
        let e = enrichment(&a, &b).unwrap();
        // S̃ = S/2 here, so the difference is V·sin(πδ/g)
        assert_relative_eq!(e.eta, v * (PI * 171e-9 / g).sin(), max_relative = 1e-5);
    }

    #[test]
    fn enrichment_rejects_mismatched_grids() {
        let a = sinus("a", 1.0, 1.0, 0.5, 0.0);
        let b = FringeScan::from_fn("b", 1.0, 32, |_| 1.0);
        assert!(matches!(enrichment(&a, &b), Err(Error::Contract(_))));
    }

    fn peptides() -> Scenario {
        let mut s = crate::scenario::bundled("peptides").unwrap().scenario;
        s.offsets_per_period = 16;
        s
    }

    #[test]
    fn optimize_rejects_single_species() {
        let mut s = peptides();
        s.species.truncate(1);
        let name = s.species[0].species.name.clone();
        let r = optimize_voltage(&s, &VoltageSearch::new(name, 0.0, 1e4, 3));
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn optimize_rejects_empty_grid() {
        let r = optimize_voltage(&peptides(), &VoltageSearch::new("YWG", 0.0, 1e4, 0));
        assert!(matches!(r, Err(Error::Contract(_))));
        assert!(matches!(voltage_grid(2.0, 1.0, 5), Err(Error::Contract(_))));
    }

    #[test]
    fn optimize_rejects_unknown_target() {
        let r = optimize_voltage(&peptides(), &VoltageSearch::new("XYZ", 0.0, 1e4, 3));
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn identical_species_cannot_be_enriched() {
        let mut s = peptides();
        let twin = s.species[0].clone();
        s.species[1] = twin;
        s.species[1].species.name = "twin".into();
        let target = s.species[0].species.name.clone();
        let opt = optimize_voltage(&s, &VoltageSearch::new(target, 0.0, 2e4, 5)).unwrap();
        assert!(opt.eta.abs() < 1e-9, "eta {}", opt.eta);
        assert_eq!(opt.competitor, "twin");
    }

    #[test]
    fn relative_shift_wraps() {
        let a = FringeFit { shift: 0.05, mean: 1.0, amplitude: 0.1, visibility: 0.1, contrast: 0.1, rms_residual: 0.0, converged: true };
        let b = FringeFit { shift: 0.95, ..a };
        assert_relative_eq!(relative_shift(&a, &b, 1.0), 0.1, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn fit_phase_roundtrip(s in 0.0f64..1.0, v in 0.05f64..0.9) {
            let f = fit_fringe(&sinus("a", 1.0, 1.0, v, s)).unwrap();
            let d = (f.shift - s + 0.5).rem_euclid(1.0) - 0.5;
            prop_assert!(d.abs() < 1e-9);
            prop_assert!((f.visibility - v).abs() < 1e-9);
        }

        #[test]
        fn self_enrichment_is_zero(s in 0.0f64..1.0, v in 0.05f64..0.9) {
            let a = sinus("a", 1.0, 1.0, v, s);
            prop_assert!(enrichment(&a, &a).unwrap().eta.abs() < 1e-15);
        }

        #[test]
        fn enrichment_bounded(s in 0.0f64..1.0, v in 0.0f64..1.0) {
            let a = sinus("a", 1.0, 1.0, v, 0.0);
            let b = sinus("b", 1.0, 1.0, v, s);
            let e = enrichment(&a, &b).unwrap().eta;
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&e));
        }
    }
}

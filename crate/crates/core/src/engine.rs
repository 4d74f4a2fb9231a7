//! The three-grating Moiré scan.
//!
//! Gratings sit at `z = 0, L, 2L`; the third is scanned across one period.
//! [`run_scan`] is the Monte-Carlo path (any grating may have CP enabled);
//! [`analytic_scan`] is a CP-free shadow-pattern convolution used as its
//! oracle.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::beam::BeamModel;
use crate::deflector::{DeflectionField, Trajectory};
use crate::error::{Error, Result};
use crate::grating::GratingSpec;
use crate::orientation::{self, OrientationMode};
use crate::rng::{label_key, RandomStream};
use crate::species::Species;

/// Particles per random substream; fixes the work split independently of
/// the worker count.
pub const BATCH: usize = 4096;
/// Grid points per period for the analytic convolution.
pub const ANALYTIC_GRID: usize = 2048;
const VELOCITY_NODES: usize = 96;
const ORIENTATION_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesEntry {
    pub species: Species,
    /// Mixture weight; normalized when mixing.
    pub weight: f64,
    /// Per-species mean forward velocity override, m/s.
    pub velocity: Option<f64>,
}

impl SpeciesEntry {
    pub fn new(species: Species) -> Self {
        SpeciesEntry { species, weight: 1.0, velocity: None }
    }

    pub fn with_velocity(mut self, v: f64) -> Self {
        self.velocity = Some(v);
        self
    }

    pub fn with_weight(mut self, w: f64) -> Self {
        self.weight = w;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub species: Vec<SpeciesEntry>,
    pub beam: BeamModel,
    pub gratings: [GratingSpec; 3],
    pub field: DeflectionField,
    /// Grating separation L, m.
    pub separation: f64,
    pub orientation: OrientationMode,
    /// Particles per species (reused for every offset).
    pub samples: usize,
    pub offsets_per_period: usize,
    pub seed: u64,
}

impl Scenario {
    /// Identical gratings, uniform illumination over 1000 periods and an
    /// angular fill covering exactly 100 periods at the second grating.
    pub fn new(
        name: impl Into<String>,
        species: Vec<SpeciesEntry>,
        mut beam: BeamModel,
        grating: GratingSpec,
        separation: f64,
        field: DeflectionField,
    ) -> Self {
        fill_beam_geometry(&mut beam, grating.period, separation);
        Scenario {
            name: name.into(),
            species,
            beam,
            gratings: [grating; 3],
            field,
            separation,
            orientation: OrientationMode::Aligned,
            samples: 200_000,
            offsets_per_period: 64,
            seed: 1,
        }
    }

    pub fn period(&self) -> f64 {
        self.gratings[0].period
    }

    pub fn cp_enabled(&self) -> bool {
        self.gratings.iter().any(|g| g.cp_enabled)
    }

    pub fn with_voltage(&self, voltage: f64) -> Scenario {
        let mut s = self.clone();
        s.field.voltage = voltage;
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.species.is_empty() {
            return Err(Error::Config("scenario has no species".into()));
        }
        for e in &self.species {
            e.species.validate()?;
            if !(e.weight >= 0.0) {
                return Err(Error::Config(format!("{}: weight must be >= 0", e.species.name)));
            }
            if let Some(v) = e.velocity {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("{}: velocity must be > 0", e.species.name)));
                }
            }
        }
        if self.samples == 0 {
            return Err(Error::Config("samples per offset must be > 0".into()));
        }
        if self.offsets_per_period == 0 {
            return Err(Error::Config("offsets per period must be > 0".into()));
        }
        self.beam.validate()?;
        for g in &self.gratings {
            g.validate()?;
        }
        let g = self.period();
        if self.gratings.iter().any(|x| (x.period - g).abs() > 1e-12 * g) {
            return Err(Error::Config("all three gratings must share one period".into()));
        }
        if !(self.separation > 0.0) {
            return Err(Error::Config("grating separation must be positive".into()));
        }
        if (self.field.total_length - 2.0 * self.separation).abs() > 1e-9 * self.separation {
            return Err(Error::Config("deflector total length must equal 2L".into()));
        }
        self.field.validate()?;
        if self.beam.transverse_extent < 100.0 * g * (1.0 - 1e-9) {
            return Err(Error::Config("transverse_extent must cover at least 100 periods".into()));
        }
        if self.beam.divergence < g / self.separation * (1.0 - 1e-9) {
            return Err(Error::Config(
                "divergence must be at least g/L for an uncollimated shadow pattern".into(),
            ));
        }
        Ok(())
    }

    /// Third-grating offsets covering one period, `k·g/K`.
    pub fn offsets(&self) -> Vec<f64> {
        let k = self.offsets_per_period;
        (0..k).map(|i| self.period() * i as f64 / k as f64).collect()
    }

    pub fn beam_for(&self, entry: &SpeciesEntry) -> BeamModel {
        let mut b = self.beam.clone();
        if let Some(v) = entry.velocity {
            b.mean_velocity = v;
        }
        b
    }

    pub fn mean_velocity(&self, entry: &SpeciesEntry) -> f64 {
        entry.velocity.unwrap_or(self.beam.mean_velocity)
    }

    /// Short content hash identifying this scenario in outputs.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(format!("{self:?}").as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species
            .iter()
            .position(|e| e.species.name.eq_ignore_ascii_case(name))
    }
}

/// Default illumination: 1000 periods wide, angular fill spanning exactly
/// 100 periods at the second grating.
pub fn fill_beam_geometry(beam: &mut BeamModel, period: f64, separation: f64) {
    if beam.transverse_extent == 0.0 {
        beam.transverse_extent = 1000.0 * period;
    }
    if beam.divergence == 0.0 {
        beam.divergence = 100.0 * period / (2.0 * separation);
    }
}

/// Signal versus third-grating offset for one species.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub species: String,
    pub period: f64,
    /// Offsets, m.
    pub offsets: Vec<f64>,
    /// Transmitted fraction per offset.
    pub signal: Vec<f64>,
    /// Binomial standard error per offset (0 for analytic scans).
    pub stderr: Vec<f64>,
    /// Attempted particles (0 for analytic scans).
    pub samples: usize,
    pub seed: u64,
    pub scenario_hash: String,
}

impl FringeScan {
    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    pub fn scaled(&self, k: f64) -> FringeScan {
        FringeScan {
            signal: self.signal.iter().map(|s| s * k).collect(),
            stderr: self.stderr.iter().map(|s| s * k).collect(),
            ..self.clone()
        }
    }

    /// Synthetic scan from a sampled function, for analysis and tests.
    pub fn from_fn(name: &str, period: f64, n: usize, f: impl Fn(f64) -> f64) -> FringeScan {
        let offsets: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        FringeScan {
            species: name.to_string(),
            period,
            signal: offsets.iter().map(|&x| f(x)).collect(),
            stderr: vec![0.0; n],
            offsets,
            samples: 0,
            seed: 0,
            scenario_hash: String::new(),
        }
    }
}

/// One scan per species, in scenario order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSet {
    pub scans: Vec<FringeScan>,
    pub weights: Vec<f64>,
}

impl ScanSet {
    pub fn get(&self, name: &str) -> Option<&FringeScan> {
        self.scans.iter().find(|s| s.species.eq_ignore_ascii_case(name))
    }

    /// Weighted sum of the species scans with normalized weights.
    pub fn mixture(&self) -> FringeScan {
        let total: f64 = self.weights.iter().sum();
        let first = &self.scans[0];
        let n = first.len();
        let mut signal = vec![0.0; n];
        let mut var = vec![0.0; n];
        for (s, w) in self.scans.iter().zip(&self.weights) {
            let w = w / total;
            for i in 0..n {
                signal[i] += w * s.signal[i];
                var[i] += (w * s.stderr[i]).powi(2);
            }
        }
        FringeScan {
            species: "mixture".into(),
            signal,
            stderr: var.into_iter().map(f64::sqrt).collect(),
            ..first.clone()
        }
    }
}

struct Arrival {
    x: f64,
    window: (f64, f64),
}

fn trace(
    scn: &Scenario,
    species: &Species,
    state: Trajectory,
    alpha: f64,
) -> Option<Arrival> {
    let m = species.mass;
    let [g1, g2, g3] = &scn.gratings;
    let l = scn.separation;
    let mut s = state;
    match g1.transmit(s.x, s.vx, s.vy, alpha, m) {
        crate::grating::Transmission::Transmitted { x_exit, vx_exit } => {
            s.x = x_exit;
            s.vx = vx_exit;
        }
        _ => return None,
    }
    s = scn.field.propagate(&s, l, alpha, m);
    match g2.transmit(s.x, s.vx, s.vy, alpha, m) {
        crate::grating::Transmission::Transmitted { x_exit, vx_exit } => {
            s.x = x_exit;
            s.vx = vx_exit;
        }
        _ => return None,
    }
    s = scn.field.propagate(&s, 2.0 * l, alpha, m);
    g3.acceptance_window(s.vx, s.vy, alpha, m)
        .map(|window| Arrival { x: s.x, window })
}

fn mc_counts(scn: &Scenario, entry: &SpeciesEntry, offsets: &[f64]) -> Result<Vec<u64>> {
    let species = &entry.species;
    let beam = scn.beam_for(entry);
    let vdist = beam.velocity_distribution()?;
    let stream = RandomStream::new(scn.seed, label_key(&species.name));
    let g3 = scn.gratings[2];
    let batches = scn.samples.div_ceil(BATCH);
    let partial: Vec<Result<Vec<u64>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream.substream(b as u64).rng();
            let mut counts = vec![0u64; offsets.len()];
            let n = BATCH.min(scn.samples - b * BATCH);
            for _ in 0..n {
                let v = vdist.sample(&mut rng);
                let (x, angle) = beam.sample_entry(&mut rng);
                let c = orientation::sample_cos2theta(scn.orientation, &mut rng);
                let alpha = orientation::effective_alpha(species, c)?;
                let start = Trajectory { z: 0.0, x, vx: angle * v, vy: v };
                if let Some(a) = trace(scn, species, start, alpha) {
                    let (lo, hi) = a.window;
                    for (k, &xs) in offsets.iter().enumerate() {
                        let u = g3.local(a.x - xs);
                        if u >= lo && u < hi {
                            counts[k] += 1;
                        }
                    }
                }
            }
            Ok(counts)
        })
        .collect();
    let mut total = vec![0u64; offsets.len()];
    for p in partial {
        for (t, c) in total.iter_mut().zip(p?) {
            *t += c;
        }
    }
    Ok(total)
}

/// Monte-Carlo scan at the scenario's default offsets.
pub fn run_scan(scn: &Scenario) -> Result<ScanSet> {
    scan_at(scn, &scn.offsets())
}

/// Monte-Carlo scan at arbitrary third-grating offsets. The same particle
/// ensemble is reused for every offset.
pub fn scan_at(scn: &Scenario, offsets: &[f64]) -> Result<ScanSet> {
    scn.validate()?;
    let hash = scn.hash();
    let n = scn.samples as f64;
    let mut scans = Vec::with_capacity(scn.species.len());
    for entry in &scn.species {
        let counts = mc_counts(scn, entry, offsets)?;
        let signal: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
        let stderr = signal.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
        scans.push(FringeScan {
            species: entry.species.name.clone(),
            period: scn.period(),
            offsets: offsets.to_vec(),
            signal,
            stderr,
            samples: scn.samples,
            seed: scn.seed,
            scenario_hash: hash.clone(),
        });
    }
    Ok(ScanSet {
        scans,
        weights: scn.species.iter().map(|e| e.weight).collect(),
    })
}

/// Overlap fraction of the cell `[y − h/2, y + h/2]` with the slits of `g`.
fn cell_overlap(g: &GratingSpec, y: f64, h: f64) -> f64 {
    let u = g.local(y);
    let half = 0.5 * g.slit_width();
    let mut total = 0.0;
    for k in -1..=1 {
        let c = k as f64 * g.period;
        let lo = (u - 0.5 * h).max(c - half);
        let hi = (u + 0.5 * h).min(c + half);
        if hi > lo {
            total += hi - lo;
        }
    }
    total / h
}

/// Density of arrival positions at the third-grating plane (field off) on a
/// grid of `n` cells per period, weighted by the gratings 1–2 transmission:
/// `ρ[k] = n⁻² Σ_{i + 2j ≡ k} T₁[i]·T₂[i + j]`.
fn arrival_density(g1: &GratingSpec, g2: &GratingSpec, n: usize) -> Vec<f64> {
    let h = g1.period / n as f64;
    let t1: Vec<bool> = (0..n).map(|i| g1.in_slit((i as f64 + 0.5) * h)).collect();
    let t2: Vec<bool> = (0..n).map(|i| g2.in_slit((i as f64 + 0.5) * h)).collect();
    let mut rho = vec![0.0; n];
    let w = 1.0 / (n as f64 * n as f64);
    for (i, _) in t1.iter().enumerate().filter(|(_, &t)| t) {
        for (p, _) in t2.iter().enumerate().filter(|(_, &t)| t) {
            // p = i + j (mod n)  =>  y = i + 2j = 2p − i
            let k = (2 * p + n - i) % n;
            rho[k] += w;
        }
    }
    rho
}

/// CP-free shadow signal `S(x_s) = ∬ T₁(x)·T₂(x+δ)·T₃(x+2δ+Δs−x_s)`, averaged
/// over the velocity and orientation distributions.
pub fn analytic_scan(scn: &Scenario) -> Result<ScanSet> {
    analytic_scan_at(scn, &scn.offsets())
}

pub fn analytic_scan_at(scn: &Scenario, offsets: &[f64]) -> Result<ScanSet> {
    if scn.cp_enabled() {
        return Err(Error::Contract("analytic_scan requires CP disabled on every grating".into()));
    }
    scn.validate()?;
    let [g1, g2, g3] = &scn.gratings;
    let g = scn.period();
    let n = ANALYTIC_GRID;
    let h = g / n as f64;
    let rho = arrival_density(g1, g2, n);
    // P(s) = Σ_k ρ[k]·T₃(y_k + s), tabulated over one period of s
    let table: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|m| {
            let s = m as f64 * h;
            rho.iter()
                .enumerate()
                .filter(|(_, &r)| r > 0.0)
                .map(|(k, &r)| r * cell_overlap(g3, (k as f64 + 0.5) * h + s, h))
                .sum()
        })
        .collect();
    let lookup = |s: f64| {
        let t = (s / h).rem_euclid(n as f64);
        let i = t.floor() as usize % n;
        let frac = t - t.floor();
        table[i] * (1.0 - frac) + table[(i + 1) % n] * frac
    };
    let hash = scn.hash();
    let mut scans = Vec::new();
    for entry in &scn.species {
        let sp = &entry.species;
        let vq = scn.beam_for(entry).velocity_distribution()?.quadrature(VELOCITY_NODES);
        let cq = if sp.alpha_parallel == sp.alpha_perp {
            vec![(1.0, 1.0)]
        } else {
            orientation::cos2theta_quadrature(scn.orientation, ORIENTATION_NODES)
        };
        let mut signal = vec![0.0; offsets.len()];
        for &(c, wc) in &cq {
            let alpha = orientation::effective_alpha(sp, c)?;
            for &(v, wv) in &vq {
                let ds = scn.field.stark_shift(alpha, sp.mass, v);
                for (k, &xs) in offsets.iter().enumerate() {
                    signal[k] += wc * wv * lookup(ds - xs);
                }
            }
        }
        scans.push(FringeScan {
            species: sp.name.clone(),
            period: g,
            offsets: offsets.to_vec(),
            stderr: vec![0.0; offsets.len()],
            signal,
            samples: 0,
            seed: scn.seed,
            scenario_hash: hash.clone(),
        });
    }
    Ok(ScanSet {
        scans,
        weights: scn.species.iter().map(|e| e.weight).collect(),
    })
}

/// Engine selection for callers that can use either path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineMode {
    /// Analytic when every grating has CP disabled, Monte Carlo otherwise.
    #[default]
    Auto,
    MonteCarlo,
    Analytic,
}

pub fn scan_with(scn: &Scenario, mode: EngineMode) -> Result<ScanSet> {
    match mode {
        EngineMode::MonteCarlo => run_scan(scn),
        EngineMode::Analytic => analytic_scan(scn),
        EngineMode::Auto if scn.cp_enabled() => run_scan(scn),
        EngineMode::Auto => analytic_scan(scn),
    }
}

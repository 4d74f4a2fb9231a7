//! Sortable particles: fullerenes, peptide isomers and single-wall carbon
//! nanotubes.
//!
//! Nanotube geometry uses the graphene lattice constant `a = 0.246 nm`. The
//! longitudinal polarizability of metallic tubes follows the perfectly
//! conducting hollow-cylinder expression; semiconducting tubes use the
//! per-atom fit `8.2·R[nm]² + 20.5` Å³/atom (valid for `R ≥ 0.35 nm`).

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::units::{AMU, ANGSTROM3, CARBON_MASS_U, DEBYE, FOUR_PI_EPS0, K_B};

/// Graphene lattice constant, m.
pub const GRAPHENE_A: f64 = 0.246e-9;
/// Transverse polarizability per carbon atom, m³ (1.3 Å³/atom).
pub const ALPHA_PERP_PER_ATOM: f64 = 1.3 * ANGSTROM3;
/// Lower radius bound of the semiconducting fit, m.
pub const SEMICONDUCTING_FIT_MIN_RADIUS: f64 = 0.35e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeciesKind {
    Isotropic,
    LinearAnisotropic,
}

/// A particle species. Polarizabilities are volumes in m³, mass in kg.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    pub mass: f64,
    pub alpha_parallel: f64,
    pub alpha_perp: f64,
    /// Permanent dipole moment, C·m.
    pub dipole_moment: f64,
    /// Internal temperature for the thermal dipole term, K.
    pub temperature: f64,
    pub kind: SpeciesKind,
    /// Set for nanotubes.
    pub chirality: Option<SwcntSpec>,
}

impl Species {
    pub fn isotropic(name: impl Into<String>, mass: f64, alpha: f64) -> Result<Self> {
        let s = Species {
            name: name.into(),
            mass,
            alpha_parallel: alpha,
            alpha_perp: alpha,
            dipole_moment: 0.0,
            temperature: 0.0,
            kind: SpeciesKind::Isotropic,
            chirality: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn linear(
        name: impl Into<String>,
        mass: f64,
        alpha_parallel: f64,
        alpha_perp: f64,
    ) -> Result<Self> {
        let s = Species {
            name: name.into(),
            mass,
            alpha_parallel,
            alpha_perp,
            dipole_moment: 0.0,
            temperature: 0.0,
            kind: SpeciesKind::LinearAnisotropic,
            chirality: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Adds a permanent dipole; the thermal orientation term enters [`Species::dipole_term`].
    pub fn with_dipole(mut self, dipole_moment: f64, temperature: f64) -> Result<Self> {
        self.dipole_moment = dipole_moment;
        self.temperature = temperature;
        self.dipole_term()?;
        Ok(self)
    }

    pub fn with_chirality(mut self, spec: SwcntSpec) -> Self {
        self.chirality = Some(spec);
        self
    }

    /// Thermal contribution `χ − α` as a polarizability volume.
    pub fn dipole_term(&self) -> Result<f64> {
        susceptibility(0.0, self.dipole_moment, self.temperature)
    }

    /// Orientation-averaged static susceptibility `(α_∥ + 2α_⊥)/3 + dipole term`.
    pub fn mean_susceptibility(&self) -> Result<f64> {
        Ok((self.alpha_parallel + 2.0 * self.alpha_perp) / 3.0 + self.dipole_term()?)
    }

    pub fn metallic(&self) -> Option<bool> {
        self.chirality.map(|c| c.is_metallic())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::Config(format!("{}: mass must be positive", self.name)));
        }
        if !(self.alpha_perp >= 0.0) || !self.alpha_parallel.is_finite() {
            return Err(Error::Config(format!(
                "{}: polarizabilities must be finite and non-negative",
                self.name
            )));
        }
        match self.kind {
            SpeciesKind::Isotropic if self.alpha_parallel != self.alpha_perp => {
                Err(Error::Config(format!(
                    "{}: isotropic species needs alpha_parallel == alpha_perp",
                    self.name
                )))
            }
            SpeciesKind::LinearAnisotropic if self.alpha_parallel < self.alpha_perp => {
                Err(Error::Config(format!(
                    "{}: alpha_parallel must be >= alpha_perp",
                    self.name
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Chiral indices and length of a single-wall carbon nanotube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwcntSpec {
    pub n: u32,
    pub m: u32,
    /// Tube length, m.
    pub length: f64,
}

impl SwcntSpec {
    pub fn new(n: u32, m: u32, length: f64) -> Result<Self> {
        if n == 0 || m > n {
            return Err(Error::Domain(format!(
                "chiral indices must satisfy n >= m >= 0 and n > 0, got ({n},{m})"
            )));
        }
        if !(length >= 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("tube length must be >= 0, got {length}")));
        }
        Ok(SwcntSpec { n, m, length })
    }

    pub fn is_metallic(&self) -> bool {
        (self.n as i64 - self.m as i64).rem_euclid(3) == 0
    }

    pub fn radius(&self) -> f64 {
        swcnt_radius(self)
    }

    pub fn atom_count(&self) -> f64 {
        swcnt_atom_count(self)
    }

    pub fn mass(&self) -> f64 {
        self.atom_count() * CARBON_MASS_U * AMU
    }

    /// Formula-path species: metallic tubes use the cylinder expression,
    /// semiconducting tubes the per-atom fit.
    pub fn to_species(&self) -> Result<Species> {
        let alpha_par = if self.is_metallic() {
            alpha_parallel_metallic(self.length, self.radius())?
        } else {
            alpha_parallel_semiconducting(self.radius(), self.atom_count())?
        };
        let s = Species::linear(self.to_string(), self.mass(), alpha_par, alpha_perp(self))?;
        Ok(s.with_chirality(*self))
    }
}

impl fmt::Display for SwcntSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "swcnt-{}-{}-{}nm", self.n, self.m, fmt_g(self.length * 1e9))
    }
}

fn fmt_g(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r}")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Tube radius `a·√(n² + nm + m²)/(2π)`.
pub fn swcnt_radius(spec: &SwcntSpec) -> f64 {
    let (n, m) = (spec.n as f64, spec.m as f64);
    GRAPHENE_A * (n * n + n * m + m * m).sqrt() / (2.0 * PI)
}

/// Carbon atoms per metre of tube, from the unit cell defined by the
/// translation vector. For zigzag tubes this is `4n` atoms per `√3·a`.
pub fn atoms_per_length(spec: &SwcntSpec) -> f64 {
    let (n, m) = (spec.n as u64, spec.m as u64);
    let q = n * n + n * m + m * m;
    let d_r = gcd(2 * m + n, 2 * n + m);
    let atoms_per_cell = 4.0 * q as f64 / d_r as f64;
    let chiral_len = GRAPHENE_A * (q as f64).sqrt();
    let translation_len = 3f64.sqrt() * chiral_len / d_r as f64;
    atoms_per_cell / translation_len
}

pub fn swcnt_atom_count(spec: &SwcntSpec) -> f64 {
    atoms_per_length(spec) * spec.length
}

/// Atoms per metre for a tube of arbitrary radius (graphene areal density
/// wrapped on the circumference). Agrees with [`atoms_per_length`] for
/// every chirality.
pub fn atoms_per_length_at_radius(radius: f64) -> f64 {
    let areal = 4.0 / (3f64.sqrt() * GRAPHENE_A * GRAPHENE_A);
    2.0 * PI * radius * areal
}

/// Axial polarizability volume of a perfectly conducting hollow cylinder.
pub fn alpha_parallel_metallic(length: f64, radius: f64) -> Result<f64> {
    if !(radius > 0.0) || !(length / radius > std::f64::consts::E) {
        return Err(Error::Domain(format!(
            "cylinder aspect ratio l/R must exceed e, got l={length:e} m, R={radius:e} m"
        )));
    }
    let lg = (length / radius).ln() - 1.0;
    Ok(length.powi(3) / (24.0 * lg) * (1.0 + (4.0 / 3.0 - LN_2) / lg))
}

/// Reduced semiconducting longitudinal polarizability, m³ per atom.
pub fn alpha_parallel_semiconducting_per_atom(radius: f64) -> Result<f64> {
    // tolerate rounding of values quoted in nm
    if radius < SEMICONDUCTING_FIT_MIN_RADIUS * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "semiconducting fit requires R >= 0.35 nm, got R = {:.4} nm",
            radius * 1e9
        )));
    }
    let r_nm = radius * 1e9;
    Ok((8.2 * r_nm * r_nm + 20.5) * ANGSTROM3)
}

pub fn alpha_parallel_semiconducting(radius: f64, atoms: f64) -> Result<f64> {
    Ok(alpha_parallel_semiconducting_per_atom(radius)? * atoms)
}

pub fn alpha_perp(spec: &SwcntSpec) -> f64 {
    ALPHA_PERP_PER_ATOM * spec.atom_count()
}

/// `χ = α + μ²/(3·4πε₀·k_B·T)`, all as polarizability volumes.
pub fn susceptibility(alpha: f64, dipole: f64, temperature: f64) -> Result<f64> {
    if dipole == 0.0 {
        return Ok(alpha);
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "a dipole term needs a positive temperature, got {temperature} K"
        )));
    }
    Ok(alpha + dipole * dipole / (3.0 * FOUR_PI_EPS0 * K_B * temperature))
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 6] = [
    "C60",
    "C70",
    "YGW",
    "YWG",
    "swcnt-17-0-100nm",
    "swcnt-9-0-100nm",
];

/// C60 static polarizability volume, Å³.
pub const C60_ALPHA_A3: f64 = 88.9;
/// Measured C70/C60 polarizability ratio.
pub const C70_C60_ALPHA_RATIO: f64 = 1.22;

/// Catalog species with pinned literature values.
pub fn preset(name: &str) -> Result<Species> {
    let a3 = |v: f64| v * ANGSTROM3;
    let key = name.trim();
    let found = PRESET_NAMES
        .iter()
        .find(|p| p.eq_ignore_ascii_case(key))
        .ok_or_else(|| Error::Catalog(name.to_string()))?;
    match *found {
        "C60" => Species::isotropic("C60", 720.0 * AMU, a3(C60_ALPHA_A3)),
        "C70" => Species::isotropic("C70", 840.0 * AMU, a3(C60_ALPHA_A3 * C70_C60_ALPHA_RATIO)),
        "YGW" => Species::isotropic("YGW", 460.0 * AMU, a3(480.0)),
        "YWG" => Species::isotropic("YWG", 460.0 * AMU, a3(100.0)),
        "swcnt-17-0-100nm" => Ok(Species::linear("swcnt-17-0-100nm", 3.2e-22, a3(3.8e5), a3(2.6e4))?
            .with_chirality(SwcntSpec::new(17, 0, 100e-9)?)),
        "swcnt-9-0-100nm" => Ok(Species::linear("swcnt-9-0-100nm", 1.7e-22, a3(1.1e7), a3(9.5e3))?
            .with_chirality(SwcntSpec::new(9, 0, 100e-9)?)),
        _ => unreachable!(),
    }
}

/// Writes `name,mass_kg,mass_u,alpha_parallel_A3,alpha_perp_A3,metallicity`.
pub fn write_catalog_csv<W: Write>(out: W, species: &[Species]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "name",
        "mass_kg",
        "mass_u",
        "alpha_parallel_A3",
        "alpha_perp_A3",
        "metallicity",
    ])?;
    for s in species {
        let metal = match s.metallic() {
            Some(true) => "metallic",
            Some(false) => "semiconducting",
            None => "n/a",
        };
        w.write_record([
            s.name.clone(),
            format!("{:e}", s.mass),
            format!("{}", s.mass / AMU),
            format!("{}", s.alpha_parallel / ANGSTROM3),
            format!("{}", s.alpha_perp / ANGSTROM3),
            metal.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One point of the reduced-polarizability surface over length × diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub length: f64,
    pub diameter: f64,
    /// Metallic α_∥ per atom, m³.
    pub metallic: f64,
    /// Semiconducting α_∥ per atom, m³.
    pub semiconducting: f64,
}

pub fn reduced_polarizability_surface(lengths: &[f64], diameters: &[f64]) -> Result<Vec<SurfacePoint>> {
    let mut out = Vec::with_capacity(lengths.len() * diameters.len());
    for &l in lengths {
        for &d in diameters {
            let r = d / 2.0;
            let atoms = atoms_per_length_at_radius(r) * l;
            out.push(SurfacePoint {
                length: l,
                diameter: d,
                metallic: alpha_parallel_metallic(l, r)? / atoms,
                semiconducting: alpha_parallel_semiconducting_per_atom(r)?,
            });
        }
    }
    Ok(out)
}

pub fn write_surface_csv<W: Write>(out: W, points: &[SurfacePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "length_nm",
        "diameter_nm",
        "metallic_A3_per_atom",
        "semiconducting_A3_per_atom",
    ])?;
    for p in points {
        w.write_record([
            format!("{}", p.length * 1e9),
            format!("{}", p.diameter * 1e9),
            format!("{}", p.metallic / ANGSTROM3),
            format!("{}", p.semiconducting / ANGSTROM3),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Debye → C·m, for inline species definitions.
pub fn debye(v: f64) -> f64 {
    v * DEBYE
}

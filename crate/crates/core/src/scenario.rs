//! Scenario files: INI-style sections of `key = value` lines.
//!
//! ```text
//! [species]            # repeat once per species
//! preset = YGW
//!
//! [beam]
//! velocity_mean = 340 m/s
//! velocity_spread = 0.5 %
//!
//! [gratings]           # shared; [grating1]..[grating3] override per plane
//! period = 990 nm
//! open_fraction = 0.2
//! separation = 38.5 cm
//!
//! [deflector]
//! voltage = 7.5 kV
//! anchor_field = 1.05e13 V2/m3
//! anchor_voltage = 7.5 kV
//! region_length = 5 cm
//! ```
//!
//! Dimensioned values require a unit suffix; unknown keys are rejected.

use std::collections::BTreeSet;
use std::path::Path;

use crate::beam::{BeamModel, SpreadConvention, VelocityShape};
use crate::deflector::DeflectionField;
use crate::engine::{fill_beam_geometry, Scenario, SpeciesEntry};
use crate::error::{Error, Result};
use crate::grating::GratingSpec;
use crate::orientation::OrientationMode;
use crate::species::{preset, Species, SwcntSpec};
use crate::units::{Dimension, Quantity};

/// Optional `[analysis]` settings used by the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub target: Option<String>,
    /// Voltage search range, V.
    pub umin: f64,
    pub umax: f64,
    pub usteps: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { target: None, umin: 0.0, umax: 20e3, usteps: 41 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub analysis: AnalysisConfig,
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
    column: usize,
}

#[derive(Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
    used: BTreeSet<String>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

impl Section {
    fn entry(&mut self, key: &str) -> Option<&Entry> {
        self.used.insert(key.to_string());
        self.entries.iter().rev().find(|e| e.key == key)
    }

    fn has(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    fn missing(&self, key: &str) -> Error {
        Error::Config(format!(
            "[{}] (line {}): missing required key `{key}`",
            self.name, self.line
        ))
    }

    fn string(&mut self, key: &str) -> Option<String> {
        self.entry(key).map(|e| e.value.clone())
    }

    fn quantity(&mut self, key: &str, dim: Dimension) -> Result<Option<f64>> {
        let name = self.name.clone();
        let Some(e) = self.entry(key) else { return Ok(None) };
        let q: Quantity = e
            .value
            .parse()
            .map_err(|err: Error| parse_err(e.line, e.column, format!("[{name}] {key}: {}", strip(&err))))?;
        q.si_as(dim)
            .map(Some)
            .map_err(|err| parse_err(e.line, e.column, format!("[{name}] {key}: {}", strip(&err))))
    }

    fn required_quantity(&mut self, key: &str, dim: Dimension) -> Result<f64> {
        self.quantity(key, dim)?.ok_or_else(|| self.missing(key))
    }

    /// Plain number, optionally with a `%` suffix.
    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        let name = self.name.clone();
        let Some(e) = self.entry(key) else { return Ok(None) };
        let (text, scale) = match e.value.strip_suffix('%') {
            Some(t) => (t.trim(), 0.01),
            None => (e.value.as_str(), 1.0),
        };
        text.parse::<f64>()
            .map(|v| Some(v * scale))
            .map_err(|_| parse_err(e.line, e.column, format!("[{name}] {key}: expected a number, got `{}`", e.value)))
    }

    fn required_number(&mut self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| self.missing(key))
    }

    fn integer(&mut self, key: &str) -> Result<Option<u64>> {
        let name = self.name.clone();
        let Some(e) = self.entry(key) else { return Ok(None) };
        e.value
            .replace('_', "")
            .parse::<u64>()
            .map(Some)
            .map_err(|_| parse_err(e.line, e.column, format!("[{name}] {key}: expected an integer, got `{}`", e.value)))
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>> {
        let name = self.name.clone();
        let Some(e) = self.entry(key) else { return Ok(None) };
        match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(Some(true)),
            "false" | "no" | "off" | "0" => Ok(Some(false)),
            _ => Err(parse_err(e.line, e.column, format!("[{name}] {key}: expected true or false"))),
        }
    }

    fn parsed<T: std::str::FromStr<Err = Error>>(&mut self, key: &str) -> Result<Option<T>> {
        let name = self.name.clone();
        let Some(e) = self.entry(key) else { return Ok(None) };
        e.value
            .parse()
            .map(Some)
            .map_err(|err: Error| parse_err(e.line, e.column, format!("[{name}] {key}: {}", strip(&err))))
    }

    fn finish(&self) -> Result<()> {
        match self.entries.iter().find(|e| !self.used.contains(&e.key)) {
            Some(e) => Err(parse_err(e.line, 1, format!("[{}]: unknown key `{}`", self.name, e.key))),
            None => Ok(()),
        }
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Config(m) | Error::Domain(m) => m.clone(),
        other => other.to_string(),
    }
}

const SECTIONS: [&str; 9] = [
    "species", "beam", "gratings", "grating1", "grating2", "grating3", "deflector", "engine", "analysis",
];

fn tokenize(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, indent, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(parse_err(line, indent + 1, format!("unknown section `[{name}]`")));
            }
            if name != "species" && sections.iter().any(|s| s.name == name) {
                return Err(parse_err(line, indent, format!("section `[{name}]` repeated")));
            }
            sections.push(Section { name, line, entries: Vec::new(), used: BTreeSet::new() });
            continue;
        }
        let eq = content
            .find('=')
            .ok_or_else(|| parse_err(line, indent, "expected `key = value`"))?;
        let key = content[..eq].trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(parse_err(line, indent, "empty key"));
        }
        let after = &content[eq + 1..];
        let value = after.trim().to_string();
        if value.is_empty() {
            return Err(parse_err(line, eq + 2, format!("`{key}` has no value")));
        }
        let column = eq + 2 + (after.len() - after.trim_start().len());
        let section = sections
            .last_mut()
            .ok_or_else(|| parse_err(line, indent, "key outside of any section"))?;
        if section.entries.iter().any(|e| e.key == key) {
            return Err(parse_err(line, indent, format!("duplicate key `{key}` in [{}]", section.name)));
        }
        section.entries.push(Entry { key, value, line, column });
    }
    Ok(sections)
}

fn take<'a>(sections: &'a mut [Section], name: &str) -> Option<&'a mut Section> {
    sections.iter_mut().find(|s| s.name == name)
}

fn parse_species(sec: &mut Section) -> Result<SpeciesEntry> {
    let mut species = if let Some(p) = sec.string("preset") {
        preset(&p)?
    } else if let Some(chir) = sec.string("chirality") {
        let (n, m) = chir
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Error::Config(format!("[species] chirality must be `n,m`, got `{chir}`")))?;
        let length = sec.required_quantity("length", Dimension::Length)?;
        SwcntSpec::new(n, m, length)?.to_species()?
    } else {
        let name = sec.string("name").ok_or_else(|| sec.missing("preset` or `name"))?;
        let mass = sec.required_quantity("mass", Dimension::Mass)?;
        if let Some(alpha) = sec.quantity("alpha", Dimension::Volume)? {
            Species::isotropic(name, mass, alpha)?
        } else {
            let par = sec.required_quantity("alpha_parallel", Dimension::Volume)?;
            let perp = sec.required_quantity("alpha_perp", Dimension::Volume)?;
            Species::linear(name, mass, par, perp)?
        }
    };
    if sec.has("preset") || sec.has("chirality") {
        if let Some(name) = sec.string("name") {
            species.name = name;
        }
    }
    if let Some(mu) = sec.quantity("dipole", Dimension::DipoleMoment)? {
        let t = sec.required_quantity("temperature", Dimension::Temperature)?;
        species = species.with_dipole(mu, t)?;
    }
    let mut entry = SpeciesEntry::new(species);
    if let Some(w) = sec.number("weight")? {
        entry.weight = w;
    }
    entry.velocity = sec.quantity("velocity_mean", Dimension::Velocity)?;
    sec.finish()?;
    Ok(entry)
}

fn apply_grating(sec: &mut Section, g: &mut GratingSpec) -> Result<()> {
    if let Some(p) = sec.quantity("period", Dimension::Length)? {
        g.period = p;
    }
    if let Some(f) = sec.number("open_fraction")? {
        g.open_fraction = f;
    }
    if let Some(t) = sec.quantity("thickness", Dimension::Length)? {
        g.thickness = t;
    }
    if let Some(cp) = sec.boolean("cp_enabled")? {
        g.cp_enabled = cp;
    }
    if let Some(r) = sec.quantity("r_min", Dimension::Length)? {
        g.r_min = r;
    }
    Ok(())
}

/// Parses scenario text.
pub fn parse_scenario(name: &str, text: &str) -> Result<ScenarioFile> {
    let mut sections = tokenize(text)?;

    let mut species = Vec::new();
    for sec in sections.iter_mut().filter(|s| s.name == "species") {
        species.push(parse_species(sec)?);
    }
    if species.is_empty() {
        return Err(Error::Config("scenario needs at least one [species] section".into()));
    }

    let beam_sec = take(&mut sections, "beam").ok_or_else(|| Error::Config("missing section [beam]".into()))?;
    let mut beam = BeamModel::new(
        beam_sec.required_quantity("velocity_mean", Dimension::Velocity)?,
        beam_sec.required_number("velocity_spread")?,
    );
    if let Some(c) = beam_sec.parsed::<SpreadConvention>("spread_convention")? {
        beam.spread_convention = c;
    }
    if let Some(s) = beam_sec.parsed::<VelocityShape>("velocity_shape")? {
        beam.shape = s;
    }
    if let Some(d) = beam_sec.quantity("divergence", Dimension::Angle)? {
        beam.divergence = d;
    }
    if let Some(x) = beam_sec.quantity("transverse_extent", Dimension::Length)? {
        beam.transverse_extent = x;
    }
    beam_sec.finish()?;

    let mut shared = GratingSpec::new(0.0, 0.0);
    let mut separation = None;
    if let Some(sec) = take(&mut sections, "gratings") {
        apply_grating(sec, &mut shared)?;
        separation = sec.quantity("separation", Dimension::Length)?;
        sec.finish()?;
    }
    let mut gratings = [shared; 3];
    for (i, g) in gratings.iter_mut().enumerate() {
        if let Some(sec) = take(&mut sections, &format!("grating{}", i + 1)) {
            apply_grating(sec, g)?;
            if separation.is_none() {
                separation = sec.quantity("separation", Dimension::Length)?;
            }
            sec.finish()?;
        }
        if g.period == 0.0 {
            return Err(Error::Config(format!("grating {} has no `period`", i + 1)));
        }
        if g.open_fraction == 0.0 {
            return Err(Error::Config(format!("grating {} has no `open_fraction`", i + 1)));
        }
    }
    let l = separation.ok_or_else(|| Error::Config("[gratings]: missing required key `separation`".into()))?;

    let dsec = take(&mut sections, "deflector").ok_or_else(|| Error::Config("missing section [deflector]".into()))?;
    let voltage = dsec.required_quantity("voltage", Dimension::Voltage)?;
    let calibration = match dsec.quantity("calibration", Dimension::Calibration)? {
        Some(c) => c,
        None => {
            let f = dsec.required_quantity("anchor_field", Dimension::FieldFactor)?;
            let u = dsec.required_quantity("anchor_voltage", Dimension::Voltage)?;
            DeflectionField::calibration_from_anchor(f, u)?
        }
    };
    let mut field = DeflectionField::at_second_grating(
        l,
        dsec.required_quantity("region_length", Dimension::Length)?,
        calibration,
        voltage,
    );
    if let Some(z) = dsec.quantity("region_start", Dimension::Length)? {
        field.region_start = z;
    }
    dsec.finish()?;

    let mut scn = Scenario::new(name, species, beam, gratings[0], l, field);
    scn.gratings = gratings;
    fill_beam_geometry(&mut scn.beam, gratings[0].period, l);
    if let Some(sec) = take(&mut sections, "engine") {
        if let Some(o) = sec.parsed::<OrientationMode>("orientation")? {
            scn.orientation = o;
        }
        if let Some(n) = sec.integer("samples")? {
            scn.samples = n as usize;
        }
        if let Some(n) = sec.integer("offsets")? {
            scn.offsets_per_period = n as usize;
        }
        if let Some(s) = sec.integer("seed")? {
            scn.seed = s;
        }
        sec.finish()?;
    }

    let mut analysis = AnalysisConfig::default();
    if let Some(sec) = take(&mut sections, "analysis") {
        analysis.target = sec.string("target");
        if let Some(u) = sec.quantity("umin", Dimension::Voltage)? {
            analysis.umin = u;
        }
        if let Some(u) = sec.quantity("umax", Dimension::Voltage)? {
            analysis.umax = u;
        }
        if let Some(n) = sec.integer("usteps")? {
            analysis.usteps = n as usize;
        }
        sec.finish()?;
    }

    scn.validate()?;
    Ok(ScenarioFile { scenario: scn, analysis })
}

/// Reads and parses a scenario file; the file stem names the scenario.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(name, &text)
}

/// Directory holding the scenarios shipped with the crate.
pub fn bundled_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

pub fn bundled(name: &str) -> Result<ScenarioFile> {
    load_scenario(bundled_dir().join(format!("{name}.scn")))
}

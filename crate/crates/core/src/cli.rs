//! Command-line front end: `species`, `simulate`, `optimize`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{enrichment, fit_fringe, optimize_voltage, VoltageSearch};
use crate::engine::{scan_with, EngineMode, Scenario};
use crate::error::{Error, Result};
use crate::report::{self, EnrichmentRow};
use crate::scenario::load_scenario;
use crate::species::{
    self, preset, reduced_polarizability_surface, write_surface_csv, Species, SwcntSpec,
};
use crate::units::{Dimension, Quantity, ANGSTROM3, AMU};

#[derive(Debug, Parser)]
#[command(name = "moire-sort", version, about = "Classical Moiré deflectometry simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Auto,
    Mc,
    Analytic,
}

impl From<Engine> for EngineMode {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Auto => EngineMode::Auto,
            Engine::Mc => EngineMode::MonteCarlo,
            Engine::Analytic => EngineMode::Analytic,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunOpts {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Particles per species.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Third-grating offsets per period.
    #[arg(long)]
    pub offsets: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report a preset (`C60`, `swcnt-9-0-100nm`) or a nanotube given as `N M LENGTH`.
    Species {
        #[arg(num_args = 0..=3)]
        designation: Vec<String>,
        /// Emit the reduced-polarizability surface over length × diameter as CSV.
        #[arg(long)]
        grid: bool,
        #[arg(long, default_value = "20nm")]
        lmin: String,
        #[arg(long, default_value = "200nm")]
        lmax: String,
        #[arg(long, default_value_t = 10)]
        lsteps: usize,
        #[arg(long, default_value = "0.7nm")]
        dmin: String,
        #[arg(long, default_value = "2nm")]
        dmax: String,
        #[arg(long, default_value_t = 14)]
        dsteps: usize,
        /// Write the surface CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the third grating and write per-species scans, fits and enrichments.
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunOpts,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Engine::Mc)]
        engine: Engine,
        /// Override the deflector voltage (`7.5kV`; bare numbers are kV).
        #[arg(long)]
        voltage: Option<String>,
    },
    /// Search the voltage maximizing the enrichment of one species.
    Optimize {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunOpts,
        #[arg(long)]
        target: Option<String>,
        /// Upper end of the search (`20kV`; bare numbers are kV).
        #[arg(long)]
        umax: Option<String>,
        #[arg(long)]
        umin: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
    },
}

/// Maps an error onto the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::Domain(_)
        | Error::Catalog(_)
        | Error::Contract(_) => 2,
        Error::Degenerate(_) | Error::Io(_) => 1,
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// reports to `out` and diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("moire-sort: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Species { designation, grid, lmin, lmax, lsteps, dmin, dmax, dsteps, out: path } => {
            if grid {
                let lengths = linspace(length_arg(&lmin)?, length_arg(&lmax)?, lsteps)?;
                let diameters = linspace(length_arg(&dmin)?, length_arg(&dmax)?, dsteps)?;
                let surface = reduced_polarizability_surface(&lengths, &diameters)?;
                match path {
                    Some(p) => write_surface_csv(BufWriter::new(File::create(p)?), &surface)?,
                    None => write_surface_csv(&mut *out, &surface)?,
                }
                if designation.is_empty() {
                    return Ok(());
                }
            }
            cmd_species(&designation, out)
        }
        Command::Simulate { scenario, run, format, engine, voltage } => {
            let mut scn = load(&scenario, &run)?;
            if let Some(v) = voltage {
                scn.field.voltage = voltage_arg(&v)?;
            }
            cmd_simulate(&scn, &run.out, format, engine.into(), out)
        }
        Command::Optimize { scenario, run, target, umax, umin, steps, engine } => {
            let file = load_scenario(&scenario)?;
            let scn = apply_overrides(file.scenario, &run);
            let target = target
                .or(file.analysis.target)
                .unwrap_or_else(|| scn.species[0].species.name.clone());
            let mut search = VoltageSearch::new(
                target,
                file.analysis.umin,
                file.analysis.umax,
                steps.unwrap_or(file.analysis.usteps),
            );
            if let Some(u) = umax {
                search.umax = voltage_arg(&u)?;
            }
            if let Some(u) = umin {
                search.umin = voltage_arg(&u)?;
            }
            search.mode = engine.into();
            cmd_optimize(&scn, &search, &run.out, out)
        }
    }
}

fn apply_overrides(mut scn: Scenario, run: &RunOpts) -> Scenario {
    if let Some(s) = run.seed {
        scn.seed = s;
    }
    if let Some(n) = run.samples {
        scn.samples = n;
    }
    if let Some(k) = run.offsets {
        scn.offsets_per_period = k;
    }
    scn
}

fn load(path: &Path, run: &RunOpts) -> Result<Scenario> {
    let scn = apply_overrides(load_scenario(path)?.scenario, run);
    scn.validate()?;
    Ok(scn)
}

fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(b >= a) {
        return Err(Error::Config("grid needs steps > 0 and max >= min".into()));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn length_arg(s: &str) -> Result<f64> {
    s.parse::<Quantity>()?.si_as(Dimension::Length)
}

fn voltage_arg(s: &str) -> Result<f64> {
    match s.trim().parse::<f64>() {
        Ok(kv) => Ok(kv * 1e3),
        Err(_) => s.parse::<Quantity>()?.si_as(Dimension::Voltage),
    }
}

fn print_species(out: &mut dyn Write, label: &str, s: &Species) -> Result<()> {
    writeln!(out, "  [{label}]")?;
    writeln!(out, "    mass              {:.4e} kg ({:.1} u)", s.mass, s.mass / AMU)?;
    writeln!(out, "    alpha_parallel    {:.4e} A3", s.alpha_parallel / ANGSTROM3)?;
    writeln!(out, "    alpha_perp        {:.4e} A3", s.alpha_perp / ANGSTROM3)?;
    if s.dipole_moment > 0.0 {
        writeln!(out, "    dipole term       {:.4e} A3", s.dipole_term()? / ANGSTROM3)?;
    }
    Ok(())
}

fn print_tube(out: &mut dyn Write, spec: &SwcntSpec) -> Result<()> {
    writeln!(out, "swcnt ({},{}) length {:.1} nm", spec.n, spec.m, spec.length * 1e9)?;
    writeln!(out, "  radius            {:.4} nm", spec.radius() * 1e9)?;
    writeln!(out, "  carbon atoms      {:.0}", spec.atom_count())?;
    writeln!(out, "  metallicity       {}", if spec.is_metallic() { "metallic" } else { "semiconducting" })?;
    Ok(())
}

fn cmd_species(designation: &[String], out: &mut dyn Write) -> Result<()> {
    match designation {
        [name] => {
            let s = preset(name)?;
            if let Some(spec) = s.chirality {
                print_tube(out, &spec)?;
                print_species(out, "formula", &spec.to_species()?)?;
            } else {
                writeln!(out, "{}", s.name)?;
            }
            print_species(out, "preset", &s)?;
            if let Some(other) = match s.name.as_str() {
                "C60" => Some("C70"),
                "C70" => Some("C60"),
                _ => None,
            } {
                let o = preset(other)?;
                writeln!(out, "  chi ratio {}/{}   {:.4}", "C70", "C60", ratio_c70_c60(&s, &o))?;
            }
            Ok(())
        }
        [n, m, length] => {
            let n: u32 = n.parse().map_err(|_| Error::Config(format!("chiral index `{n}` is not a non-negative integer")))?;
            let m: u32 = m.parse().map_err(|_| Error::Config(format!("chiral index `{m}` is not a non-negative integer")))?;
            let spec = SwcntSpec::new(n, m, length_arg(length)?)?;
            let formula = spec.to_species()?;
            print_tube(out, &spec)?;
            print_species(out, "formula", &formula)?;
            if let Ok(p) = preset(&spec.to_string()) {
                print_species(out, "preset", &p)?;
            }
            Ok(())
        }
        [] => Err(Error::Config(format!(
            "species needs a preset name ({}) or `N M LENGTH`",
            species::PRESET_NAMES.join(", ")
        ))),
        _ => Err(Error::Config("species takes a preset name or `N M LENGTH`".into())),
    }
}

fn ratio_c70_c60(a: &Species, b: &Species) -> f64 {
    let (c60, c70) = if a.name == "C60" { (a, b) } else { (b, a) };
    c70.alpha_parallel / c60.alpha_parallel
}

fn file_stem(scn: &Scenario) -> String {
    scn.name.replace(|c: char| !c.is_ascii_alphanumeric() && c != '-' && c != '_', "_")
}

fn cmd_simulate(scn: &Scenario, dir: &Path, format: Format, mode: EngineMode, out: &mut dyn Write) -> Result<()> {
    fs::create_dir_all(dir)?;
    let set = scan_with(scn, mode)?;
    let stem = file_stem(scn);
    writeln!(
        out,
        "{}: {} species, U = {:.3} kV, hash {}",
        scn.name,
        scn.species.len(),
        scn.field.voltage / 1e3,
        set.scans[0].scenario_hash
    )?;
    let mut fits = Vec::new();
    for s in &set.scans {
        let path = dir.join(format!("{stem}_{}_scan.csv", file_label(&s.species)));
        report::write_scan_csv(BufWriter::new(File::create(&path)?), std::slice::from_ref(s))?;
        let f = fit_fringe(s)?;
        writeln!(
            out,
            "  {:<18} mean {:.5}  visibility {:.3}  contrast {:.3}  shift {:.1} nm",
            s.species,
            f.mean,
            f.visibility,
            f.contrast,
            f.shift * 1e9
        )?;
        fits.push((s.species.clone(), f));
    }
    report::write_fit_csv(BufWriter::new(File::create(dir.join(format!("{stem}_fit.csv")))?), &fits)?;
    let mut rows = Vec::new();
    for a in &set.scans {
        for b in &set.scans {
            if a.species == b.species {
                continue;
            }
            let e = enrichment(a, b)?;
            writeln!(out, "  eta({} over {}) = {:.3} at {:.1} nm", a.species, b.species, e.eta, e.offset * 1e9)?;
            rows.push(EnrichmentRow {
                target: a.species.clone(),
                competitor: b.species.clone(),
                eta: e.eta,
                offset: e.offset,
            });
        }
    }
    report::write_enrichment_csv(
        BufWriter::new(File::create(dir.join(format!("{stem}_enrichment.csv")))?),
        &rows,
    )?;
    if format == Format::Svg {
        fs::write(dir.join(format!("{stem}_scan.svg")), report::scan_svg(&set.scans)?)?;
    }
    Ok(())
}

fn file_label(name: &str) -> String {
    name.replace(|c: char| !c.is_ascii_alphanumeric() && c != '-' && c != '_', "_")
}

fn cmd_optimize(scn: &Scenario, search: &VoltageSearch, dir: &Path, out: &mut dyn Write) -> Result<()> {
    let opt = optimize_voltage(scn, search)?;
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}_{}_eta_curve.csv", file_stem(scn), file_label(&search.target)));
    report::write_curve_csv(BufWriter::new(File::create(&path)?), &opt.curve)?;
    writeln!(
        out,
        "{}: target {}  U* = {:.3} kV  eta* = {:.4}  (limited by {}, offset {:.1} nm)",
        scn.name,
        search.target,
        opt.voltage / 1e3,
        opt.eta,
        opt.competitor,
        opt.offset * 1e9
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(args.iter().copied(), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn metallic_tube_report() {
        let (code, text) = run_str(&["moire-sort", "species", "9", "0", "100nm"]);
        assert_eq!(code, 0);
        assert!(text.contains("metallic"));
        assert!(text.contains("[preset]"));
    }

    #[test]
    fn fullerene_ratio_reported() {
        let (code, text) = run_str(&["moire-sort", "species", "C60"]);
        assert_eq!(code, 0);
        assert!(text.contains("1.2200"), "{text}");
    }

    #[test]
    fn small_semiconducting_radius_is_exit_2() {
        assert_eq!(run_str(&["moire-sort", "species", "3", "1", "10nm"]).0, 2);
    }

    #[test]
    fn invalid_indices_are_exit_2() {
        assert_eq!(run_str(&["moire-sort", "species", "2", "5", "10nm"]).0, 2);
        assert_eq!(run_str(&["moire-sort", "species", "x", "0", "10nm"]).0, 2);
        assert_eq!(run_str(&["moire-sort", "species", "C80"]).0, 2);
    }

    #[test]
    fn grid_csv() {
        let (code, text) = run_str(&["moire-sort", "species", "--grid", "--lsteps", "2", "--dsteps", "3"]);
        assert_eq!(code, 0);
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn usage_error_is_exit_2() {
        assert_eq!(run_str(&["moire-sort", "frobnicate"]).0, 2);
    }

    #[test]
    fn voltage_arguments() {
        assert_eq!(voltage_arg("7.5").unwrap(), 7500.0);
        assert_eq!(voltage_arg("900 V").unwrap(), 900.0);
        assert!(voltage_arg("3 nm").is_err());
    }
}

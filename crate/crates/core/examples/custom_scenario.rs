//! Building a scenario in code: a polar molecule defined inline, a
//! uniform velocity distribution and a field region placed mid-way between
//! the first two gratings.

use moire_sort::beam::VelocityShape;
use moire_sort::engine::{analytic_scan, SpeciesEntry};
use moire_sort::species::debye;
use moire_sort::units::{AMU, ANGSTROM3};
use moire_sort::{fit_fringe, BeamModel, DeflectionField, GratingSpec, Scenario, Species};

fn main() -> moire_sort::Result<()> {
    let polar = Species::isotropic("polar", 500.0 * AMU, 60.0 * ANGSTROM3)?.with_dipole(debye(5.0), 500.0)?;
    let apolar = Species::isotropic("apolar", 500.0 * AMU, 60.0 * ANGSTROM3)?;
    println!("dipole term of the polar species: {:.1} A3", polar.dipole_term()? / ANGSTROM3);

    let mut beam = BeamModel::new(250.0, 0.02);
    beam.shape = VelocityShape::Uniform;
    let l = 0.385;
    let mut field = DeflectionField::at_second_grating(l, 0.05, 2e5, 10e3);
    field.region_start = 0.15;
    let scn = Scenario::new(
        "custom",
        vec![SpeciesEntry::new(polar), SpeciesEntry::new(apolar)],
        beam,
        GratingSpec::new(990e-9, 0.2),
        l,
        field,
    );
    println!("geometry factor {:.4e} m^2", scn.field.geometry_factor());
    for s in analytic_scan(&scn)?.scans {
        let f = fit_fringe(&s)?;
        println!("{}: shift {:.1} nm, visibility {:.3}", s.species, f.shift * 1e9, f.visibility);
    }
    Ok(())
}

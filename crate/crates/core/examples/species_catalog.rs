//! Prints the preset catalog as CSV, then derives two nanotubes from their
//! chiral indices and compares them with the pinned presets.

use moire_sort::species::{preset, write_catalog_csv, PRESET_NAMES};
use moire_sort::units::ANGSTROM3;
use moire_sort::SwcntSpec;

fn main() -> moire_sort::Result<()> {
    let all = PRESET_NAMES.iter().map(|n| preset(n)).collect::<moire_sort::Result<Vec<_>>>()?;
    write_catalog_csv(std::io::stdout().lock(), &all)?;
    println!();

    for (n, m) in [(9, 0), (17, 0), (10, 10), (13, 6)] {
        let tube = SwcntSpec::new(n, m, 100e-9)?;
        let s = tube.to_species()?;
        println!(
            "({n:>2},{m:>2})  R = {:.3} nm  {:<14}  m = {:.2e} kg  alpha_par = {:.3e} A3  alpha_perp = {:.3e} A3",
            tube.radius() * 1e9,
            if tube.is_metallic() { "metallic" } else { "semiconducting" },
            s.mass,
            s.alpha_parallel / ANGSTROM3,
            s.alpha_perp / ANGSTROM3,
        );
        if let Ok(p) = preset(&tube.to_string()) {
            println!(
                "          preset: m = {:.2e} kg  alpha_par = {:.3e} A3  alpha_perp = {:.3e} A3",
                p.mass,
                p.alpha_parallel / ANGSTROM3,
                p.alpha_perp / ANGSTROM3
            );
        }
    }
    Ok(())
}

//! Reduced (per-atom) axial polarizability of metallic and semiconducting
//! nanotubes over a length × diameter grid, written as CSV.
//!
//! `cargo run --example cnt_polarizability_surface > surface.csv`

use moire_sort::species::{
    alpha_parallel_metallic, alpha_parallel_semiconducting, reduced_polarizability_surface,
    write_surface_csv,
};
use moire_sort::SwcntSpec;

fn main() -> moire_sort::Result<()> {
    let lengths: Vec<f64> = (1..=10).map(|i| 20e-9 * i as f64).collect();
    let diameters: Vec<f64> = (0..14).map(|i| 0.7e-9 + 0.1e-9 * i as f64).collect();
    let surface = reduced_polarizability_surface(&lengths, &diameters)?;
    write_surface_csv(std::io::stdout().lock(), &surface)?;

    let ratio: Vec<f64> = surface.iter().map(|p| p.metallic / p.semiconducting).collect();
    let lo = ratio.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratio.iter().cloned().fold(0.0, f64::max);
    eprintln!("metallic / semiconducting per atom across the grid: {lo:.1} .. {hi:.1}");

    let s17 = SwcntSpec::new(17, 0, 100e-9)?;
    let r = alpha_parallel_metallic(100e-9, 0.36e-9)?
        / alpha_parallel_semiconducting(s17.radius(), s17.atom_count())?;
    eprintln!("100 nm metallic cylinder (R = 0.36 nm) / (17,0) tube: {r:.1}");
    Ok(())
}

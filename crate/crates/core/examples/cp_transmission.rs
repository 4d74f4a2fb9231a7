//! Single-grating transmission with Casimir-Polder wall attraction, as a
//! function of polarizability and forward velocity.

use moire_sort::grating::GratingSpec;
use moire_sort::units::ANGSTROM3;

fn main() {
    let g = GratingSpec::new(10e-6, 0.2).with_cp(true);
    let mass = 1.7e-22;
    let n = 4000;
    println!("alpha_A3,v_m_s,transmitted_fraction,window_nm");
    for alpha_a3 in [1e3, 1e4, 1e5, 1e6, 1e7] {
        for v in [50.0, 100.0, 200.0] {
            let alpha = alpha_a3 * ANGSTROM3;
            let passed = (0..n)
                .filter(|&i| {
                    let x = g.period * (i as f64 + 0.5) / n as f64;
                    g.transmit(x, 0.0, v, alpha, mass).is_transmitted()
                })
                .count();
            let width = g
                .acceptance_window(0.0, v, alpha, mass)
                .map_or(0.0, |(lo, hi)| hi - lo);
            println!("{alpha_a3:e},{v},{},{:.1}", passed as f64 / n as f64, width * 1e9);
        }
    }
}

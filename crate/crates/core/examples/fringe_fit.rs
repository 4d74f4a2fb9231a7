//! Fitting sinusoidal fringes and computing the enrichment between them:
//! two equal-visibility fringes 171 nm apart on a 990 nm period.

use std::f64::consts::PI;

use moire_sort::analysis::{enrichment, fit_fringe, relative_shift};
use moire_sort::FringeScan;

fn main() -> moire_sort::Result<()> {
    let g = 990e-9;
    let (v, delta) = (0.15, 171e-9);
    let c60 = FringeScan::from_fn("C60", g, 64, |x| 1.0 + v * (2.0 * PI * (x - 300e-9) / g).cos());
    let c70 = FringeScan::from_fn("C70", g, 64, |x| 0.9 * (1.0 + v * (2.0 * PI * (x - 300e-9 - delta) / g).cos()));

    let (f60, f70) = (fit_fringe(&c60)?, fit_fringe(&c70)?);
    println!("C60: V = {:.3}, s = {:.1} nm", f60.visibility, f60.shift * 1e9);
    println!("C70: V = {:.3}, s = {:.1} nm", f70.visibility, f70.shift * 1e9);
    println!("shift difference {:.1} nm", relative_shift(&f70, &f60, g) * 1e9);

    let e = enrichment(&c60, &c70)?;
    println!(
        "eta(C60) = {:.3} at x = {:.0} nm (closed form V sin(pi delta/g) = {:.3})",
        e.eta,
        e.offset * 1e9,
        v * (PI * delta / g).sin()
    );
    Ok(())
}

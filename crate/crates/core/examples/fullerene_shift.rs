//! C60 / C70 deflection: the shift ratio from the deflection formula and
//! from fitted Monte-Carlo fringes in the thermal-beam setup.

use moire_sort::analysis::fit_fringe;
use moire_sort::engine::run_scan;
use moire_sort::scenario::bundled;

fn main() -> moire_sort::Result<()> {
    let scn = bundled("fullerenes")?.scenario;
    let field = &scn.field;
    let shift = |i: usize| {
        let e = &scn.species[i];
        field.stark_shift(e.species.alpha_parallel, e.species.mass, scn.mean_velocity(e))
    };
    let (s60, s70) = (shift(0), shift(1));
    println!("formula at {:.0} kV: C60 {:.1} nm, C70 {:.1} nm, ratio {:.3}", field.voltage / 1e3, s60 * 1e9, s70 * 1e9, s70 / s60);

    let off = run_scan(&scn.with_voltage(0.0))?;
    let on = run_scan(&scn)?;
    let mut d = Vec::new();
    for (a, b) in off.scans.iter().zip(&on.scans) {
        let (fa, fb) = (fit_fringe(a)?, fit_fringe(b)?);
        let ds = moire_sort::analysis::relative_shift(&fb, &fa, scn.period());
        println!("{}: visibility {:.3} -> {:.3}, fitted shift {:.1} nm", a.species, fa.visibility, fb.visibility, ds * 1e9);
        d.push(ds);
    }
    println!("fitted ratio {:.3}", d[1] / d[0]);
    Ok(())
}

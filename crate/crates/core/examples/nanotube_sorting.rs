//! Metallic (9,0) versus semiconducting (17,0) nanotubes: the ideal aligned
//! case, then the effect of wall attraction and rotational averaging.

use moire_sort::analysis::{enrichment, fit_fringe, optimize_voltage, VoltageSearch};
use moire_sort::engine::{analytic_scan, run_scan};
use moire_sort::scenario::bundled;
use moire_sort::OrientationMode;

fn main() -> moire_sort::Result<()> {
    let ideal = bundled("swcnt")?;
    let a = &ideal.analysis;
    let opt = optimize_voltage(&ideal.scenario, &VoltageSearch::new("swcnt-9-0-100nm", a.umin, a.umax, a.usteps))?;
    println!("ideal: U* = {:.3} kV, eta(9,0) = {:.3}", opt.voltage / 1e3, opt.eta);
    let set = analytic_scan(&ideal.scenario.with_voltage(opt.voltage))?;
    for s in &set.scans {
        println!("  {} fringe at {:.0} nm", s.species, fit_fringe(s)?.shift * 1e9);
    }

    let mut full = bundled("swcnt_full")?.scenario;
    full.samples = 50_000;
    for mode in [OrientationMode::Aligned, OrientationMode::RotorAveraged] {
        full.orientation = mode;
        let set = run_scan(&full)?;
        let (m, s) = (&set.scans[0], &set.scans[1]);
        println!(
            "CP on, {mode}, {:.2} kV: V(9,0) = {:.2}, V(17,0) = {:.2}, eta(9,0) = {:.2}, eta(17,0) = {:.2}",
            full.field.voltage / 1e3,
            fit_fringe(m)?.visibility,
            fit_fringe(s)?.visibility,
            enrichment(m, s)?.eta,
            enrichment(s, m)?.eta,
        );
    }
    Ok(())
}

//! Sorting the tripeptide isomers YGW and YWG: scan at the bundled voltage,
//! then search the voltage that best enriches YWG.

use moire_sort::analysis::{enrichment, fit_fringe, optimize_voltage, VoltageSearch};
use moire_sort::engine::run_scan;
use moire_sort::scenario::bundled;

fn main() -> moire_sort::Result<()> {
    let file = bundled("peptides")?;
    let scn = &file.scenario;

    let set = run_scan(scn)?;
    for s in &set.scans {
        let f = fit_fringe(s)?;
        println!("{}: shift {:.1} nm, contrast {:.3}", s.species, f.shift * 1e9, f.contrast);
    }
    let e = enrichment(&set.scans[1], &set.scans[0])?;
    println!("U = {:.1} kV: eta(YWG) = {:.3} at x = {:.0} nm", scn.field.voltage / 1e3, e.eta, e.offset * 1e9);

    let a = &file.analysis;
    let search = VoltageSearch::new("YWG", a.umin, a.umax, a.usteps);
    let opt = optimize_voltage(scn, &search)?;
    println!("optimum: U* = {:.2} kV, eta* = {:.3}", opt.voltage / 1e3, opt.eta);
    Ok(())
}

//! Monte-Carlo scan against the analytic shadow convolution, CP disabled.

use std::time::Instant;

use moire_sort::engine::{analytic_scan, run_scan, SpeciesEntry};
use moire_sort::{fit_fringe, preset, BeamModel, DeflectionField, GratingSpec, Scenario};

fn main() -> moire_sort::Result<()> {
    let l = 0.385;
    let cal = DeflectionField::calibration_from_anchor(1.05e13, 7500.0)?;
    let field = DeflectionField::at_second_grating(l, 0.05, cal, 7500.0);
    let species = vec![
        SpeciesEntry::new(preset("YGW")?),
        SpeciesEntry::new(preset("YWG")?),
    ];
    let mut scn = Scenario::new("peptides", species, BeamModel::new(340.0, 0.005), GratingSpec::new(990e-9, 0.2), l, field);
    scn.samples = 200_000;

    let t = Instant::now();
    let mc = run_scan(&scn)?;
    let t_mc = t.elapsed();
    let t = Instant::now();
    let an = analytic_scan(&scn)?;
    let t_an = t.elapsed();

    // an empty bin still carries ~1/n of uncertainty
    let floor = 1.0 / scn.samples as f64;
    for (m, a) in mc.scans.iter().zip(&an.scans) {
        let worst = m
            .signal
            .iter()
            .zip(&a.signal)
            .zip(&m.stderr)
            .map(|((x, y), e)| (x - y).abs() / e.max(floor))
            .fold(0.0, f64::max);
        let (fm, fa) = (fit_fringe(m)?, fit_fringe(a)?);
        println!(
            "{:>4}: max |MC - analytic| = {worst:.2} sigma; V = {:.3} / {:.3}; s = {:.1} / {:.1} nm",
            m.species,
            fm.visibility,
            fa.visibility,
            fm.shift * 1e9,
            fa.shift * 1e9
        );
    }
    println!("Monte Carlo {t_mc:.2?}, analytic {t_an:.2?}");
    Ok(())
}

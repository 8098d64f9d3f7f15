//! Instantaneous and period-averaged energies of an oscillating trap, and
//! the smallness ratios that decide whether the adiabatic picture holds.

use moving_well::wellmodel::{adiabaticity_report, averaged_energy, instant_energy, LevelIndex, Units, WallMotion};

fn main() -> moving_well::Result<()> {
    let units = Units::natural();
    let motion = WallMotion::oscillatory(1.0, 0.05, 0.02)?;
    let period = motion.period().unwrap();
    for (n, l) in [(1, 0), (1, 1), (2, 0)] {
        let level = LevelIndex::new(n, l, 0)?;
        let e_bar = averaged_energy(&units, &motion, &level)?;
        let lo = instant_energy(&units, &motion, &level, 0.25 * period)?;
        let hi = instant_energy(&units, &motion, &level, 0.75 * period)?;
        println!("{level}: E in [{lo:.6}, {hi:.6}], period mean {e_bar:.6}");
        for (name, ratio) in adiabaticity_report(&units, &motion, &level).ratios() {
            println!("    {name:<18} {:.3e} {}", ratio.value, ratio.verdict.as_str());
        }
    }
    Ok(())
}

//! Dynamical and geometric phase over several periods of an oscillating
//! wall, split into secular drift and periodic remainder. Prints CSV
//! suitable for plotting.

use moving_well::fmt_f64;
use moving_well::phases::{berry_phase_cycle, dynamical_phase_osc, epsilon, geometric_phase_osc};
use moving_well::wellmodel::{LevelIndex, Units, WallMotion};

fn main() -> moving_well::Result<()> {
    let units = Units::natural();
    let motion = WallMotion::oscillatory(1.0, 0.05, 0.02)?;
    let level = LevelIndex::new(1, 1, 0)?;
    let period = motion.period().unwrap();

    let eps = epsilon(&units, &motion, &level)?;
    let cycle = berry_phase_cycle(&units, &motion, &level)?;
    eprintln!("epsilon: printed {:.6e}, oracle {:.6e}", eps.printed, eps.oracle);
    eprintln!("Berry phase per cycle: printed {:.6e}, oracle {:.6e}", cycle.printed, cycle.oracle);

    println!("t,dynamical,dynamical_periodic,geometric_printed,geometric_oracle,geometric_periodic_oracle");
    let samples = 200;
    for i in 0..=samples {
        let t = 3.0 * period * i as f64 / samples as f64;
        let d = dynamical_phase_osc(&units, &motion, &level, t)?;
        let g = geometric_phase_osc(&units, &motion, &level, t)?;
        let row = [t, d.value, d.periodic, g.value.printed, g.value.oracle, g.periodic.oracle];
        println!("{}", row.map(fmt_f64).join(","));
    }
    Ok(())
}

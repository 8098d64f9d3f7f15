//! Phases of the ground state while the wall recedes at constant speed.
//! The closed-form geometric phase is shown next to the quadrature of the
//! Berry connection; their ratio is a level-dependent constant.

use moving_well::phases::{dynamical_phase_linear, dynamical_phase_quadrature, geometric_phase_linear};
use moving_well::wellmodel::{LevelIndex, Units, WallMotion};

fn main() -> moving_well::Result<()> {
    let units = Units::natural();
    let motion = WallMotion::linear(1.0, 0.01)?;
    let level = LevelIndex::new(1, 0, 0)?;
    println!("{:>6} {:>14} {:>14} {:>12} {:>12} {:>8}", "t", "dynamical", "quadrature", "printed", "oracle", "ratio");
    for t in [10.0, 50.0, 100.0, 200.0] {
        let d = dynamical_phase_linear(&units, &motion, &level, t)?;
        let q = dynamical_phase_quadrature(&units, &motion, &level, t)?;
        let g = geometric_phase_linear(&units, &motion, &level, t)?;
        println!("{t:>6} {d:>14.8} {q:>14.8} {:>12.4e} {:>12.4e} {:>8.5}", g.printed, g.oracle, g.ratio());
    }
    Ok(())
}

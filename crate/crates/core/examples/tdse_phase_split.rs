//! Propagates the ground state numerically through three periods of wall
//! oscillation and separates the accumulated phase into its dynamical and
//! geometric parts.

use moving_well::phases::berry_phase_cycle;
use moving_well::tdse::{phase_split, propagate_extrapolated, PropagatorConfig};
use moving_well::wellmodel::{LevelIndex, Units, WallMotion};

fn main() -> moving_well::Result<()> {
    let units = Units::natural();
    let level = LevelIndex::new(1, 0, 0)?;
    let motion = WallMotion::oscillatory(1.0, 0.05, 0.02)?;
    let periods = 3.0;
    let config = PropagatorConfig { t_final: periods * motion.period().unwrap(), basis_size: 24, grid_points: 1024, ..Default::default() };

    let run = propagate_extrapolated(&units, &motion, &level, &config)?;
    let split = phase_split(&run, &units, &motion, &level)?;
    let oracle = berry_phase_cycle(&units, &motion, &level)?;
    println!("steps {} at dt = {:.4e}", run.steps, run.dt);
    println!("max norm drift {:.2e}, min overlap {:.8}", run.max_norm_drift, run.min_overlap);
    println!("total {:.10}, dynamical {:.10}", split.total, split.dynamical);
    println!("geometric per cycle {:.4e} (oracle {:.4e}, printed {:.4e})", split.geometric / periods, oracle.oracle, oracle.printed);
    if let Some(err) = run.phase_error_estimate {
        println!("phase error estimate {err:.2e}");
    }
    Ok(())
}

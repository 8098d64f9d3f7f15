//! Plugs the analytic wavefunctions back into the Schrödinger equation.
//! The linear-wall solution is exact, so its residual is round-off; the
//! oscillating-wall solution drops a term of order ω², bounded by
//! `osc_error_bound`.

use std::f64::consts::PI;

use moving_well::wavefield::{osc_error_bound, schrodinger_residual, RadialField, ResidualGrid};
use moving_well::wellmodel::{LevelIndex, Units, WallMotion};

fn main() -> moving_well::Result<()> {
    let units = Units::natural();
    let level = LevelIndex::new(1, 0, 0)?;

    let linear = WallMotion::linear(1.0, 0.05)?;
    let r = schrodinger_residual(&units, &linear, &level, 5.0, ResidualGrid::default())?;
    println!("linear wall: normalized residual {:.2e}", r.normalized);

    println!("{:>6} {:>12} {:>12}", "omega", "residual", "bound");
    for omega in [0.01, 0.02, 0.04, 0.08] {
        let motion = WallMotion::oscillatory(1.0, 0.1, omega)?;
        let t = 0.5 * PI / omega;
        let r = schrodinger_residual(&units, &motion, &level, t, ResidualGrid::default())?;
        let bound = osc_error_bound(&units, &motion, &level, t)?;
        println!("{omega:>6} {:>12.4e} {:>12.4e}", r.normalized, bound.ratio);
    }

    let motion = WallMotion::oscillatory(1.0, 0.1, 0.02)?;
    let field = RadialField::gauss(&units, &motion, &level, 40.0, 512)?;
    println!("norm at t = 40: {:.15}", field.norm());
    Ok(())
}

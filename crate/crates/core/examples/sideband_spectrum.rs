//! Dipole absorption spectrum of the 1s → 1p transition in an oscillating
//! trap: a comb of sidebands spaced by ω, shifted by the geometric phase.

use moving_well::spectra::{broadened_spectrum, modified_energy, transition_rate, LineKind, SpectrumOptions};
use moving_well::wellmodel::{LevelIndex, Units, WallMotion};
use moving_well::GeometricMode;

fn main() -> moving_well::Result<()> {
    let units = Units::natural();
    let motion = WallMotion::oscillatory(1.0, 0.05, 0.5)?;
    let initial = LevelIndex::new(1, 0, 0)?;
    let final_ = LevelIndex::new(1, 1, 0)?;

    for level in [initial, final_] {
        let e = modified_energy(&units, &motion, &level, Some(GeometricMode::Oracle))?;
        println!("{level}: E_bar {:.8}, epsilon {:.3e}", e.e_bar, e.epsilon);
    }

    let lines = transition_rate(&units, &motion, &initial, &final_, &SpectrumOptions::default())?;
    println!("{:>4} {:>12} {:>12}", "k", "omega_ph", "weight");
    for line in lines.iter().filter(|l| l.kind == LineKind::Absorption && l.k.abs() <= 3) {
        println!("{:>4} {:>12.6} {:>12.4e}", line.k, line.photon_frequency, line.weight);
    }

    let grid: Vec<f64> = (0..=400).map(|i| 3.5 + 3.0 * i as f64 / 400.0).collect();
    let intensity = broadened_spectrum(&lines, 0.02, &grid)?;
    let (peak, height) = grid.iter().zip(&intensity).fold((0.0, 0.0), |acc, (&w, &s)| if s > acc.1 { (w, s) } else { acc });
    println!("broadened peak at {peak:.4} (height {height:.3})");
    Ok(())
}

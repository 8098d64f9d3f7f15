//! Analytic time-dependent wavefunctions and their Schrödinger residual.
//!
//! Amplitudes are radial: the angular factor `Y_l^m` is never sampled and
//! its norm is folded to one, so `∫|Φ|² r² dr = 1`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phases;
use crate::specfun::{jl, GaussLegendre};
use crate::wellmodel::{instant_energy, radius, LevelIndex, Units, WallMotion};

/// Ansatz state without its dynamical phase:
/// `√(2/a³) j_l(βr/a)/j_{l+1}(β) · exp(i m ȧ r²/(2ħa))`.
///
/// The exponent is `m v r²/(2ħ a)` for the linear wall and
/// `b m ω r² cos ωt/(2ħ a)` for the oscillating one (with `h(t) = 0`).
/// Evaluated as an analytic function of `r`, with no wall check.
pub fn adiabatic_state(units: &Units, motion: &WallMotion, level: &LevelIndex, r: f64, t: f64) -> Complex64 {
    let a = motion.raw_radius(t);
    let norm = (2.0 / (a * a * a)).sqrt() / jl(level.l as i32 + 1, level.beta);
    let amp = norm * jl(level.l as i32, level.beta * r / a);
    let phase = units.mass * motion.velocity(t) * r * r / (2.0 * units.hbar * a);
    Complex64::from_polar(amp, phase)
}

fn check_inside(motion: &WallMotion, r: f64, t: f64) -> Result<f64> {
    let a = radius(motion, t)?;
    if !(0.0..=a).contains(&r) {
        return Err(Error::OutsideWell { r, radius: a });
    }
    Ok(a)
}

/// Full solution for the linearly moving wall (static walls accepted).
pub fn eval_linear(units: &Units, motion: &WallMotion, level: &LevelIndex, r: f64, t: f64) -> Result<Complex64> {
    if let WallMotion::Oscillatory { .. } = motion {
        return Err(Error::InvalidMotion(format!("expected a linearly moving wall, got {motion}")));
    }
    check_inside(motion, r, t)?;
    let theta = phases::dynamical_phase(units, motion, level, t)?;
    Ok(adiabatic_state(units, motion, level, r, t) * Complex64::from_polar(1.0, theta))
}

/// Approximate solution for the oscillating wall.
pub fn eval_osc(units: &Units, motion: &WallMotion, level: &LevelIndex, r: f64, t: f64) -> Result<Complex64> {
    if !matches!(motion, WallMotion::Oscillatory { .. }) {
        return Err(Error::InvalidMotion(format!("expected an oscillating wall, got {motion}")));
    }
    check_inside(motion, r, t)?;
    let theta = phases::dynamical_phase_osc(units, motion, level, t)?.value;
    Ok(adiabatic_state(units, motion, level, r, t) * Complex64::from_polar(1.0, theta))
}

pub fn eval(units: &Units, motion: &WallMotion, level: &LevelIndex, r: f64, t: f64) -> Result<Complex64> {
    match motion {
        WallMotion::Oscillatory { .. } => eval_osc(units, motion, level, r, t),
        _ => eval_linear(units, motion, level, r, t),
    }
}

/// Radial samples `Φ(ξ a(t))` on `ξ ∈ [0, 1]` with quadrature weights in `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub t: f64,
    pub radius: f64,
    pub xi: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl RadialField {
    /// Samples on a Gauss–Legendre grid of `points` nodes.
    pub fn gauss(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, points: usize) -> Result<Self> {
        let a = radius(motion, t)?;
        let theta = phases::dynamical_phase(units, motion, level, t)?;
        let rot = Complex64::from_polar(1.0, theta);
        let rule = GaussLegendre::cached(points);
        let (xi, weights): (Vec<f64>, Vec<f64>) = rule.mapped(0.0, 1.0).unzip();
        let values = xi.iter().map(|&x| adiabatic_state(units, motion, level, x * a, t) * rot).collect();
        Ok(Self { t, radius: a, xi, weights, values })
    }

    /// Samples on `points` equally spaced nodes including both ends, with
    /// trapezoid weights. The wall node is set to exactly zero.
    pub fn uniform(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Domain("a uniform field grid needs at least two points".into()));
        }
        let a = radius(motion, t)?;
        let theta = phases::dynamical_phase(units, motion, level, t)?;
        let rot = Complex64::from_polar(1.0, theta);
        let h = 1.0 / (points - 1) as f64;
        let xi: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
        let weights = (0..points).map(|i| if i == 0 || i == points - 1 { 0.5 * h } else { h }).collect();
        let values = xi
            .iter()
            .enumerate()
            .map(|(i, &x)| if i == points - 1 { Complex64::new(0.0, 0.0) } else { adiabatic_state(units, motion, level, x * a, t) * rot })
            .collect();
        Ok(Self { t, radius: a, xi, weights, values })
    }

    /// `∫|Φ|² r² dr`.
    pub fn norm(&self) -> f64 {
        let a3 = self.radius.powi(3);
        self.xi
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((x, w), v)| w * x * x * v.norm_sqr())
            .sum::<f64>()
            * a3
    }

    /// `⟨self|other⟩` over the shared grid.
    pub fn inner(&self, other: &RadialField) -> Result<Complex64> {
        if self.xi != other.xi || self.radius != other.radius {
            return Err(Error::Domain("fields live on different grids".into()));
        }
        let a3 = self.radius.powi(3);
        Ok(self
            .xi
            .iter()
            .zip(&self.weights)
            .zip(self.values.iter().zip(&other.values))
            .map(|((x, w), (p, q))| p.conj() * q * (w * x * x))
            .sum::<Complex64>()
            * a3)
    }

    /// `xi,re,im,abs2` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,re,im,abs2\n");
        for (x, v) in self.xi.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{},{},{}", crate::fmt_f64(*x), crate::fmt_f64(v.re), crate::fmt_f64(v.im), crate::fmt_f64(v.norm_sqr()));
        }
        out
    }
}

/// Step sizes for [`schrodinger_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    /// Radial step in units of `a(t)`.
    pub dxi: f64,
    pub dt: f64,
    /// Largest acceptable discretization estimate (normalized by `E(t)`).
    pub tolerance: f64,
}

impl Default for ResidualGrid {
    fn default() -> Self {
        Self { dxi: 1e-3, dt: 1e-4, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub energy: f64,
    /// `‖HΦ - iħ∂_tΦ‖ / E(t)` at the requested steps.
    pub normalized: f64,
    /// Same with both steps halved.
    pub normalized_fine: f64,
    /// Pointwise Richardson extrapolation of the two, normalized.
    pub extrapolated: f64,
    /// Estimated discretization error of `normalized`.
    pub discretization_estimate: f64,
    /// `max |HΦ - iħ∂_tΦ| r / E(t)` at the requested steps.
    pub max_pointwise: f64,
}

/// Residual `r(HΦ - iħ ∂_tΦ)` sampled at `r = i·dxi·a(t)`, `0 < i < 1/dxi`,
/// by fourth-order central differences in `r` and `t`.
fn residual_samples(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, dxi: f64, dt: f64) -> Result<(Vec<Complex64>, f64)> {
    let a = radius(motion, t)?;
    for s in [t - 2.0 * dt, t + 2.0 * dt] {
        radius(motion, s)?;
    }
    let steps = (1.0 / dxi).round() as usize;
    if steps < 4 {
        return Err(Error::Domain(format!("radial step {dxi} is too coarse")));
    }
    let dr = a / steps as f64;
    // dynamical phase increments from local quadrature of E
    let rule = GaussLegendre::cached(24);
    let increment = |s: f64| -> f64 {
        let (lo, hi) = if s < 0.0 { (t + s, t) } else { (t, t + s) };
        let e = rule.integrate(lo, hi, |x| instant_energy(units, motion, level, x).unwrap_or(f64::NAN));
        -e.copysign(s) / units.hbar
    };
    let offsets = [-2.0, -1.0, 1.0, 2.0];
    let rot: Vec<Complex64> = offsets.iter().map(|&k| Complex64::from_polar(1.0, increment(k * dt))).collect();
    let u = |r: f64, tk: f64| adiabatic_state(units, motion, level, r, tk) * r;
    let ll = (level.l * (level.l + 1)) as f64;
    let kin = units.kinetic_scale();
    let mut out = Vec::with_capacity(steps - 1);
    for i in 1..steps {
        let r = i as f64 * dr;
        let c = u(r, t);
        let urr = (-u(r - 2.0 * dr, t) + u(r - dr, t) * 16.0 - c * 30.0 + u(r + dr, t) * 16.0 - u(r + 2.0 * dr, t)) / (12.0 * dr * dr);
        let ut = (u(r, t - 2.0 * dt) * rot[0] - u(r, t - dt) * rot[1] * 8.0 + u(r, t + dt) * rot[2] * 8.0 - u(r, t + 2.0 * dt) * rot[3]) / (12.0 * dt);
        let h_u = -(urr - c * (ll / (r * r))) * kin;
        out.push(h_u - Complex64::i() * units.hbar * ut);
    }
    Ok((out, dr))
}

fn l2(values: &[Complex64], dr: f64) -> f64 {
    (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dr).sqrt()
}

/// Schrödinger residual of the analytic solution, with a Richardson check
/// from a second evaluation at half the steps.
pub fn schrodinger_residual(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, grid: ResidualGrid) -> Result<ResidualReport> {
    let energy = instant_energy(units, motion, level, t)?;
    let (coarse, dr) = residual_samples(units, motion, level, t, grid.dxi, grid.dt)?;
    let (fine, dr_fine) = residual_samples(units, motion, level, t, grid.dxi / 2.0, grid.dt / 2.0)?;
    let fine_on_coarse: Vec<Complex64> = (0..coarse.len()).map(|i| fine[2 * i + 1]).collect();
    let extrap: Vec<Complex64> = coarse.iter().zip(&fine_on_coarse).map(|(c, f)| (f * 16.0 - c) / 15.0).collect();
    let diff: Vec<Complex64> = coarse.iter().zip(&extrap).map(|(c, e)| c - e).collect();
    let report = ResidualReport {
        energy,
        normalized: l2(&coarse, dr) / energy,
        normalized_fine: l2(&fine, dr_fine) / energy,
        extrapolated: l2(&extrap, dr) / energy,
        discretization_estimate: l2(&diff, dr) / energy,
        max_pointwise: coarse.iter().map(|v| v.norm()).fold(0.0, f64::max) / energy,
    };
    if report.discretization_estimate > grid.tolerance {
        return Err(Error::StepTooCoarse { estimate: report.discretization_estimate, tolerance: grid.tolerance });
    }
    Ok(report)
}

/// Size of the term dropped from the oscillatory solution,
/// `max_r m b ω² r² |sin ωt| / 2a(t) = m b ω² a(t) |sin ωt| / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    pub bound: f64,
    /// `bound / E(t)`
    pub ratio: f64,
}

pub fn osc_error_bound(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<ErrorBound> {
    let (b, omega) = match *motion {
        WallMotion::Oscillatory { b, omega, .. } => (b, omega),
        _ => return Err(Error::InvalidMotion(format!("expected an oscillating wall, got {motion}"))),
    };
    let a = radius(motion, t)?;
    let bound = units.mass * b * omega * omega * a * (omega * t).sin().abs() / 2.0;
    let energy = instant_energy(units, motion, level, t)?;
    Ok(ErrorBound { bound, ratio: bound / energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn u() -> Units {
        Units::natural()
    }

    #[test]
    fn vanishes_at_wall() {
        let m = WallMotion::linear(1.0, 0.05).unwrap();
        for l in 0..3 {
            let lvl = LevelIndex::new(2, l, 0).unwrap();
            let a = radius(&m, 3.0).unwrap();
            assert!(eval_linear(&u(), &m, &lvl, a, 3.0).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn outside_well_is_error() {
        let m = WallMotion::linear(1.0, 0.05).unwrap();
        let lvl = LevelIndex::new(1, 0, 0).unwrap();
        assert!(matches!(eval_linear(&u(), &m, &lvl, 1.5, 0.0), Err(Error::OutsideWell { .. })));
        assert!(eval_osc(&u(), &m, &lvl, 0.5, 0.0).is_err());
    }

    #[test]
    fn still_wall_is_static_eigenstate() {
        let m = WallMotion::linear(1.0, 0.0).unwrap();
        let s = WallMotion::fixed(1.0).unwrap();
        let lvl = LevelIndex::new(1, 1, 0).unwrap();
        for r in [0.1, 0.5, 0.9] {
            let a = eval_linear(&u(), &m, &lvl, r, 2.0).unwrap();
            let b = eval_linear(&u(), &s, &lvl, r, 2.0).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
        let osc = WallMotion::oscillatory(1.0, 0.0, 0.3).unwrap();
        let c = eval_osc(&u(), &osc, &lvl, 0.5, 2.0).unwrap();
        assert!((c - eval_linear(&u(), &s, &lvl, 0.5, 2.0).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn osc_initial_phase_is_pure() {
        let m = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        let s = WallMotion::fixed(1.0).unwrap();
        let lvl = LevelIndex::new(1, 1, 0).unwrap();
        for r in [0.2, 0.7] {
            let a = eval_osc(&u(), &m, &lvl, r, 0.0).unwrap();
            let b = eval_linear(&u(), &s, &lvl, r, 0.0).unwrap();
            assert!((a.norm() - b.norm()).abs() < 1e-14);
            assert!((a.arg() - 0.2 * 0.05 * r * r / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_and_orthogonality() {
        let lin = WallMotion::linear(1.0, 0.05).unwrap();
        let lvl = LevelIndex::new(1, 0, 0).unwrap();
        for t in [0.0, 5.0, 10.0] {
            let f = RadialField::gauss(&u(), &lin, &lvl, t, 2048).unwrap();
            assert!((f.norm() - 1.0).abs() < 1e-8);
        }
        let osc = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        let p = LevelIndex::new(1, 1, 0).unwrap();
        let t = osc.period().unwrap() / 4.0;
        let f = RadialField::gauss(&u(), &osc, &p, t, 2048).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-8);
        let g = RadialField::gauss(&u(), &osc, &LevelIndex::new(2, 1, 0).unwrap(), t, 2048).unwrap();
        assert!(f.inner(&g).unwrap().norm() < 1e-8);
        let uni = RadialField::uniform(&u(), &osc, &p, t, 101).unwrap();
        assert_eq!(uni.values[100].norm(), 0.0);
        assert!(uni.to_csv().starts_with("xi,re,im,abs2\n"));
    }

    #[test]
    fn residual_of_exact_solutions_is_at_floor() {
        let lvl = LevelIndex::new(1, 0, 0).unwrap();
        for m in [WallMotion::fixed(1.0).unwrap(), WallMotion::linear(1.0, 0.1).unwrap()] {
            let r = schrodinger_residual(&u(), &m, &lvl, 2.0, ResidualGrid::default()).unwrap();
            assert!(r.normalized < 1e-6, "{m}: {r:?}");
            assert!(r.extrapolated < 1e-6);
        }
    }

    #[test]
    fn residual_rejects_coarse_steps() {
        let lvl = LevelIndex::new(3, 2, 0).unwrap();
        let m = WallMotion::linear(1.0, 0.1).unwrap();
        let grid = ResidualGrid { dxi: 0.1, dt: 0.5, tolerance: 1e-6 };
        assert!(matches!(schrodinger_residual(&u(), &m, &lvl, 2.0, grid), Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn error_bound_examples() {
        let lvl = LevelIndex::new(1, 0, 0).unwrap();
        let m = WallMotion::oscillatory(1.0, 0.1, 0.05).unwrap();
        assert_eq!(osc_error_bound(&u(), &m, &lvl, 0.0).unwrap().bound, 0.0);
        let t = m.period().unwrap() / 4.0;
        let e = osc_error_bound(&u(), &m, &lvl, t).unwrap();
        assert!((e.bound - 1.375e-4).abs() < 1e-15);
        assert!((e.ratio - 1.375e-4 / (PI * PI / (2.0 * 1.21))).abs() < 1e-15);
        let m0 = WallMotion::oscillatory(1.0, 0.0, 0.05).unwrap();
        assert_eq!(osc_error_bound(&u(), &m0, &lvl, t).unwrap().bound, 0.0);
    }

    #[test]
    fn osc_residual_within_twice_bound() {
        let lvl = LevelIndex::new(1, 1, 0).unwrap();
        let m = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        for frac in [0.1, 0.25, 0.6] {
            let t = m.period().unwrap() * frac;
            let r = schrodinger_residual(&u(), &m, &lvl, t, ResidualGrid::default()).unwrap();
            let b = osc_error_bound(&u(), &m, &lvl, t).unwrap();
            assert!(r.extrapolated <= 2.0 * b.ratio, "frac {frac}: {} vs {}", r.extrapolated, b.ratio);
            assert!(r.extrapolated > 0.1 * b.ratio);
        }
    }
}

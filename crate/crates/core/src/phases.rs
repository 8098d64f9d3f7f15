//! Dynamical, geometric and Berry phases of a level in the moving well.
//!
//! Every geometric phase is reported twice: the closed form as it is
//! usually printed for this problem, and an oracle obtained by integrating
//! the Berry connection `i⟨φ|∂_t φ⟩` of the adiabatic ansatz numerically.
//! The connection itself reduces to `⟨ξ²⟩` of the radial state, which is
//! taken from the `x^4 j_l^2` antiderivative. The two values are expected
//! to differ by a level-dependent constant; the ratio is part of the
//! output, not an error.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{self, jl, GaussLegendre};
use crate::wavefield;
use crate::wellmodel::{averaged_energy, instant_energy, radius, LevelIndex, Units, WallMotion};

/// Below this dimensionless amplitude `b/a0` the oscillatory dynamical
/// phase uses its first-order expansion in `b`.
const SMALL_AMPLITUDE: f64 = 1e-8;

/// Which geometric phase feeds derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeometricMode {
    Printed,
    #[default]
    Oracle,
}

/// A geometric quantity in its printed and oracle variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricPhase {
    pub printed: f64,
    pub oracle: f64,
}

impl GeometricPhase {
    /// `printed / oracle`; NaN when the oracle vanishes.
    pub fn ratio(&self) -> f64 {
        if self.oracle == 0.0 {
            f64::NAN
        } else {
            self.printed / self.oracle
        }
    }

    pub fn pick(&self, mode: GeometricMode) -> f64 {
        match mode {
            GeometricMode::Printed => self.printed,
            GeometricMode::Oracle => self.oracle,
        }
    }
}

/// Level-dependent factors shared by both wall motions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricCoefficient {
    pub level: LevelIndex,
    /// `4l(l+1) - 3 + 2β²`
    pub bracket: f64,
    /// `[j_{l-1}(β)/j_{l+1}(β)]²`, the factor in the linear-motion form.
    pub ratio_factor: f64,
    /// `j_{l-1}(β)²`, the factor in the oscillatory form.
    pub squared_factor: f64,
    /// `⟨ξ²⟩` of the radial state.
    pub xi2_mean: f64,
    /// `6β²⟨ξ²⟩ / bracket`: the Bessel factor the connection actually
    /// carries (one, up to rounding).
    pub bessel_factor_oracle: f64,
}

impl GeometricCoefficient {
    pub fn new(level: &LevelIndex) -> Self {
        let l = level.l as f64;
        let beta = level.beta;
        let bracket = 4.0 * l * (l + 1.0) - 3.0 + 2.0 * beta * beta;
        let jm = jl(level.l as i32 - 1, beta);
        let jp = jl(level.l as i32 + 1, beta);
        let xi2 = specfun::xi2_mean(level.l, beta);
        Self {
            level: *level,
            bracket,
            ratio_factor: (jm / jp).powi(2),
            squared_factor: jm * jm,
            xi2_mean: xi2,
            bessel_factor_oracle: 6.0 * beta * beta * xi2 / bracket,
        }
    }
}

/// Phase content of a level at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub t: f64,
    pub dynamical: f64,
    pub geometric: f64,
    pub total: f64,
    /// Secular rate and periodic remainder of `total`, where the motion has
    /// such a split (static and oscillatory walls).
    pub split: Option<SecularSplit>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularSplit {
    /// Coefficient of `t`.
    pub rate: f64,
    /// `total - rate * t`
    pub periodic: f64,
}

/// Oscillatory dynamical phase with its `-Ē t/ħ + ζ(t)` split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicalPhase {
    pub value: f64,
    pub secular: f64,
    pub periodic: f64,
}

/// Oscillatory geometric phase with its `-ε t/ħ + ζ'(t)` split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscGeometricPhase {
    pub value: GeometricPhase,
    pub secular: GeometricPhase,
    pub periodic: GeometricPhase,
}

fn expect_linear(motion: &WallMotion) -> Result<(f64, f64)> {
    match *motion {
        WallMotion::Linear { a0, v } => Ok((a0, v)),
        WallMotion::Static { a0 } => Ok((a0, 0.0)),
        _ => Err(Error::InvalidMotion(format!("expected a linearly moving wall, got {motion}"))),
    }
}

fn expect_oscillatory(motion: &WallMotion) -> Result<(f64, f64, f64)> {
    match *motion {
        WallMotion::Oscillatory { a0, b, omega } => Ok((a0, b, omega)),
        _ => Err(Error::InvalidMotion(format!("expected an oscillating wall, got {motion}"))),
    }
}

/// `θ(t) = -(ħβ²/2mv)(1/a0 - 1/(a0+vt))`, evaluated as
/// `-(ħβ²/2m) t/(a0 a(t))`, which is the same expression without the
/// `1/v` cancellation and reduces to `-E t/ħ` at `v = 0`.
pub fn dynamical_phase_linear(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<f64> {
    let (a0, _) = expect_linear(motion)?;
    let a = radius(motion, t)?;
    Ok(-units.hbar * level.beta * level.beta / (2.0 * units.mass) * t / (a0 * a))
}

/// Continuous antiderivative of `1/(a0 + b sin ωt)²` times `ω`, unwrapped
/// across the poles of `tan(ωt/2)`.
fn inverse_square_antiderivative(a0: f64, b: f64, omega: f64, t: f64) -> f64 {
    let d = a0 * a0 - b * b;
    let sd = d.sqrt();
    let half = 0.5 * omega * t;
    let tan = half.tan();
    // near a pole the branch follows the sign tan actually came out with
    let x = half / PI;
    let branch = if (x - x.floor() - 0.5).abs() < 0.25 {
        if tan > 0.0 { x.floor() } else { x.ceil() }
    } else {
        x.round()
    };
    let arc = ((b + a0 * tan) / sd).atan() + PI * branch;
    2.0 * a0 * arc / (d * sd) + b * (omega * t).cos() / (d * (a0 + b * (omega * t).sin()))
}

/// `∫_0^t dt'/a(t')²` for the oscillating wall.
fn inverse_square_integral(a0: f64, b: f64, omega: f64, t: f64) -> f64 {
    if b / a0 < SMALL_AMPLITUDE {
        let wt = omega * t;
        return t / (a0 * a0) - 2.0 * b * (1.0 - wt.cos()) / (a0.powi(3) * omega);
    }
    (inverse_square_antiderivative(a0, b, omega, t) - inverse_square_antiderivative(a0, b, omega, 0.0)) / omega
}

/// Oscillatory dynamical phase, fixed so that `θ(0) = 0` and `ζ(0) = 0`.
pub fn dynamical_phase_osc(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<DynamicalPhase> {
    let (a0, b, omega) = expect_oscillatory(motion)?;
    let scale = units.hbar * level.beta * level.beta / (2.0 * units.mass);
    let value = -scale * inverse_square_integral(a0, b, omega, t);
    let secular = -averaged_energy(units, motion, level)? / units.hbar * t;
    Ok(DynamicalPhase { value, secular, periodic: value - secular })
}

/// Closed-form dynamical phase for any wall motion.
pub fn dynamical_phase(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<f64> {
    match motion {
        WallMotion::Static { .. } => Ok(-instant_energy(units, motion, level, t)? * t / units.hbar),
        WallMotion::Linear { .. } => dynamical_phase_linear(units, motion, level, t),
        WallMotion::Oscillatory { .. } => Ok(dynamical_phase_osc(units, motion, level, t)?.value),
    }
}

/// Number of quadrature panels: one per half period for oscillating walls.
fn panels_for(motion: &WallMotion, t: f64) -> usize {
    match motion.period() {
        Some(p) => ((2.0 * t.abs() / p).ceil() as usize).max(1),
        None => 1,
    }
}

/// `-(1/ħ)∫_0^t E(t') dt'` by quadrature.
pub fn dynamical_phase_quadrature(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<f64> {
    radius(motion, t)?;
    let integral = specfun::quad_panels(
        |s| instant_energy(units, motion, level, s).unwrap_or(f64::NAN),
        0.0,
        t,
        panels_for(motion, t),
    )?;
    Ok(-integral / units.hbar)
}

/// Berry connection `i⟨φ|∂_t φ⟩` of the adiabatic ansatz at `t`, from the
/// time derivative of the ansatz phase and `⟨r²⟩ = a²⟨ξ²⟩`.
pub fn berry_connection(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<f64> {
    let a = radius(motion, t)?;
    let r2 = a * a * specfun::xi2_mean(level.l, level.beta);
    let m = units.mass;
    let hbar = units.hbar;
    // ⟨∂_t phase⟩; the connection is its negative
    let mean_rate = match *motion {
        WallMotion::Static { .. } => 0.0,
        // f = m v r²/(2ħ a)
        WallMotion::Linear { v, .. } => -m * v * v * r2 / (2.0 * hbar * a * a),
        // g = b m ω r² cos ωt /(2ħ a)
        WallMotion::Oscillatory { b, omega, .. } => {
            let (s, c) = (omega * t).sin_cos();
            b * m * omega * r2 / (2.0 * hbar) * (-omega * s / a - b * omega * c * c / (a * a))
        }
    };
    Ok(-mean_rate)
}

/// `γ(t) = ∫_0^t i⟨φ|∂φ⟩ dt'` by quadrature of [`berry_connection`].
pub fn berry_connection_quadrature(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<f64> {
    if let WallMotion::Static { .. } = motion {
        return Ok(0.0);
    }
    radius(motion, t)?;
    specfun::quad_panels(
        |s| berry_connection(units, motion, level, s).unwrap_or(f64::NAN),
        0.0,
        t,
        panels_for(motion, t),
    )
}

/// `i⟨φ|∂_t φ⟩` evaluated directly: radial Gauss–Legendre quadrature of
/// the sampled ansatz against a fourth-order central difference in time.
/// The real part is the connection; the imaginary part should vanish.
pub fn connection_numeric(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<Complex64> {
    let a = radius(motion, t)?;
    let tau = match *motion {
        WallMotion::Static { .. } => 1.0,
        WallMotion::Linear { a0, v } => a0 / v.abs().max(1e-300),
        WallMotion::Oscillatory { omega, .. } => 1.0 / omega,
    };
    let h = 1e-3 * tau;
    for s in [t - 2.0 * h, t + 2.0 * h] {
        radius(motion, s)?;
    }
    let rule = GaussLegendre::cached(160);
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, w) in rule.mapped(0.0, a) {
        let phi = wavefield::adiabatic_state(units, motion, level, r, t);
        let d = (wavefield::adiabatic_state(units, motion, level, r, t - 2.0 * h)
            - wavefield::adiabatic_state(units, motion, level, r, t - h) * 8.0
            + wavefield::adiabatic_state(units, motion, level, r, t + h) * 8.0
            - wavefield::adiabatic_state(units, motion, level, r, t + 2.0 * h))
            / (12.0 * h);
        acc += phi.conj() * d * (w * r * r);
    }
    Ok(Complex64::i() * acc)
}

/// Linear-motion geometric phase. Printed form:
/// `(mv/6ħβ²) [j_{l-1}/j_{l+1}]² (4l(l+1) - 3 + 2β²) (a(t) - a0)`.
pub fn geometric_phase_linear(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<GeometricPhase> {
    let (a0, v) = expect_linear(motion)?;
    let a = radius(motion, t)?;
    let c = GeometricCoefficient::new(level);
    let printed = units.mass * v / (6.0 * units.hbar * level.beta * level.beta) * c.ratio_factor * c.bracket * (a - a0);
    let oracle = berry_connection_quadrature(units, motion, level, t)?;
    Ok(GeometricPhase { printed, oracle })
}

/// `ε` in both variants: printed `-m b² ω² j_{l-1}² (bracket)/(12β²)`, oracle
/// `-ħ` times the one-period mean of the connection.
pub fn epsilon(units: &Units, motion: &WallMotion, level: &LevelIndex) -> Result<GeometricPhase> {
    let (_, b, omega) = expect_oscillatory(motion)?;
    let c = GeometricCoefficient::new(level);
    let printed = -units.mass * b * b * omega * omega / (12.0 * level.beta * level.beta) * c.squared_factor * c.bracket;
    let period = 2.0 * PI / omega;
    let oracle = -units.hbar * berry_connection_quadrature(units, motion, level, period)? / period;
    Ok(GeometricPhase { printed, oracle })
}

/// Oscillatory geometric phase. Printed form:
/// `(m b ω/12ħβ²)(4l²+4l-3+2β²) j_{l-1}(β)² [bωt + a0(1 - cos ωt)]`.
pub fn geometric_phase_osc(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<OscGeometricPhase> {
    let (a0, b, omega) = expect_oscillatory(motion)?;
    let c = GeometricCoefficient::new(level);
    let pre = units.mass * b * omega / (12.0 * units.hbar * level.beta * level.beta) * c.bracket * c.squared_factor;
    let one_minus_cos = 1.0 - (omega * t).cos();
    let printed = pre * (b * omega * t + a0 * one_minus_cos);
    let oracle = berry_connection_quadrature(units, motion, level, t)?;
    let eps = epsilon(units, motion, level)?;
    let secular = GeometricPhase { printed: -eps.printed * t / units.hbar, oracle: -eps.oracle * t / units.hbar };
    let periodic = GeometricPhase { printed: pre * a0 * one_minus_cos, oracle: oracle - secular.oracle };
    Ok(OscGeometricPhase { value: GeometricPhase { printed, oracle }, secular, periodic })
}

/// Geometric phase of any motion (zero for a static wall).
pub fn geometric_phase(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<GeometricPhase> {
    match motion {
        WallMotion::Static { .. } => Ok(GeometricPhase { printed: 0.0, oracle: 0.0 }),
        WallMotion::Linear { .. } => geometric_phase_linear(units, motion, level, t),
        WallMotion::Oscillatory { .. } => Ok(geometric_phase_osc(units, motion, level, t)?.value),
    }
}

/// Berry phase accumulated over one oscillation period, `-ε T/ħ`.
pub fn berry_phase_cycle(units: &Units, motion: &WallMotion, level: &LevelIndex) -> Result<GeometricPhase> {
    let (_, _, omega) = expect_oscillatory(motion)?;
    let period = 2.0 * PI / omega;
    let eps = epsilon(units, motion, level)?;
    Ok(GeometricPhase { printed: -eps.printed * period / units.hbar, oracle: -eps.oracle * period / units.hbar })
}

/// Dynamical + geometric phase at `t`, with the geometric variant chosen
/// by `mode`.
pub fn phase_breakdown(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, mode: GeometricMode) -> Result<PhaseBreakdown> {
    match *motion {
        WallMotion::Static { .. } => {
            let dynamical = dynamical_phase(units, motion, level, t)?;
            let rate = -instant_energy(units, motion, level, 0.0)? / units.hbar;
            Ok(PhaseBreakdown { t, dynamical, geometric: 0.0, total: dynamical, split: Some(SecularSplit { rate, periodic: dynamical - rate * t }) })
        }
        WallMotion::Linear { .. } => {
            let dynamical = dynamical_phase_linear(units, motion, level, t)?;
            let geometric = geometric_phase_linear(units, motion, level, t)?.pick(mode);
            Ok(PhaseBreakdown { t, dynamical, geometric, total: dynamical + geometric, split: None })
        }
        WallMotion::Oscillatory { .. } => {
            let dyn_phase = dynamical_phase_osc(units, motion, level, t)?;
            let geo = geometric_phase_osc(units, motion, level, t)?;
            let geometric = geo.value.pick(mode);
            let total = dyn_phase.value + geometric;
            let rate = -(averaged_energy(units, motion, level)? + epsilon(units, motion, level)?.pick(mode)) / units.hbar;
            Ok(PhaseBreakdown { t, dynamical: dyn_phase.value, geometric, total, split: Some(SecularSplit { rate, periodic: total - rate * t }) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Units {
        Units::natural()
    }

    fn ground() -> LevelIndex {
        LevelIndex::new(1, 0, 0).unwrap()
    }

    #[test]
    fn linear_dynamical_examples() {
        let m = WallMotion::linear(1.0, 0.1).unwrap();
        assert_eq!(dynamical_phase_linear(&u(), &m, &ground(), 0.0).unwrap(), 0.0);
        let th = dynamical_phase_linear(&u(), &m, &ground(), 10.0).unwrap();
        assert!((th + 2.5 * PI * PI).abs() < 1e-12);
        let q = dynamical_phase_quadrature(&u(), &m, &ground(), 10.0).unwrap();
        assert!((th - q).abs() < 1e-12 * th.abs());
        let still = WallMotion::linear(1.0, 0.0).unwrap();
        assert!((dynamical_phase_linear(&u(), &still, &ground(), 1.0).unwrap() + PI * PI / 2.0).abs() < 1e-14);
        let tiny = WallMotion::linear(1.0, 1e-12).unwrap();
        assert!((dynamical_phase_linear(&u(), &tiny, &ground(), 1.0).unwrap() + PI * PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn linear_dynamical_needs_live_wall() {
        let m = WallMotion::linear(1.0, -0.1).unwrap();
        assert!(matches!(dynamical_phase_linear(&u(), &m, &ground(), 10.0), Err(Error::CollapsedWall { .. })));
    }

    #[test]
    fn osc_dynamical_static_limit_and_periods() {
        let m0 = WallMotion::oscillatory(1.0, 0.0, 0.7).unwrap();
        let d = dynamical_phase_osc(&u(), &m0, &ground(), 3.0).unwrap();
        assert!((d.value + PI * PI / 2.0 * 3.0).abs() < 1e-12);
        let m = WallMotion::oscillatory(1.0, 0.3, 0.05).unwrap();
        let period = m.period().unwrap();
        for k in 1..4 {
            let d = dynamical_phase_osc(&u(), &m, &ground(), k as f64 * period).unwrap();
            assert!(d.periodic.abs() < 1e-9, "k={k}: {}", d.periodic);
        }
        let half = dynamical_phase_osc(&u(), &m, &ground(), period / 2.0).unwrap();
        let q = dynamical_phase_quadrature(&u(), &m, &ground(), period / 2.0).unwrap();
        assert!((half.value - q).abs() <= 1e-9 * q.abs());
    }

    #[test]
    fn osc_dynamical_is_continuous_across_branch_points() {
        let m = WallMotion::oscillatory(1.0, 0.4, 2.0).unwrap();
        for k in [1.0, 3.0, 5.0] {
            let tc = k * PI / 2.0;
            let lo = dynamical_phase_osc(&u(), &m, &ground(), tc - 1e-6 / 2.0).unwrap().value;
            let hi = dynamical_phase_osc(&u(), &m, &ground(), tc + 1e-6 / 2.0).unwrap().value;
            let e = instant_energy(&u(), &m, &ground(), tc).unwrap();
            assert!((lo - hi).abs() < 2.0 * e * 1e-6, "jump at ωt = {}π", k);
        }
    }

    #[test]
    fn coefficient_bracket_positive_and_oracle_factor_one() {
        for l in 0..5 {
            for n in 1..4 {
                let c = GeometricCoefficient::new(&LevelIndex::new(n, l, 0).unwrap());
                assert!(c.bracket > 0.0);
                assert!((c.bessel_factor_oracle - 1.0).abs() < 1e-10, "({n},{l}) {}", c.bessel_factor_oracle);
                assert!((c.ratio_factor - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn linear_geometric_examples() {
        let m = WallMotion::linear(1.0, 0.01).unwrap();
        let g0 = geometric_phase_linear(&u(), &m, &ground(), 0.0).unwrap();
        assert_eq!(g0.printed, 0.0);
        assert_eq!(g0.oracle, 0.0);
        let g = geometric_phase_linear(&u(), &m, &ground(), 10.0).unwrap();
        let expect = 0.01 / (6.0 * PI * PI) * (2.0 * PI * PI - 3.0) * 0.1;
        assert!((g.printed - expect).abs() < 1e-15);
        let oracle = 0.01 / 2.0 * (1.0 / 3.0 - 1.0 / (2.0 * PI * PI)) * 0.1;
        assert!((g.oracle - oracle).abs() < 1e-15);
        assert!((g.ratio() - 2.0).abs() < 1e-10);
        let back = WallMotion::linear(1.0, -0.01).unwrap();
        let g = geometric_phase_linear(&u(), &back, &ground(), 10.0).unwrap();
        assert!(g.printed > 0.0 && g.oracle > 0.0);
    }

    #[test]
    fn osc_geometric_examples() {
        let m = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        let g = geometric_phase_osc(&u(), &m, &ground(), 0.0).unwrap();
        assert_eq!(g.value.printed, 0.0);
        assert_eq!(g.value.oracle, 0.0);
        let m0 = WallMotion::oscillatory(1.0, 0.0, 0.05).unwrap();
        let g = geometric_phase_osc(&u(), &m0, &ground(), 7.0).unwrap();
        assert_eq!(g.value.printed, 0.0);
        assert_eq!(g.value.oracle, 0.0);
        let period = m.period().unwrap();
        let g = geometric_phase_osc(&u(), &m, &ground(), period).unwrap();
        let cycle = berry_phase_cycle(&u(), &m, &ground()).unwrap();
        assert!((g.value.printed - cycle.printed).abs() < 1e-15);
        assert!((g.value.oracle - cycle.oracle).abs() < 1e-12 * cycle.oracle.abs());
        // direct substitution, (1,0): j_{-1}(π)² = 1/π²
        let printed = 0.2 * 0.2 * 0.05 / (12.0 * PI * PI) * (2.0 * PI * PI - 3.0) / (PI * PI) * 2.0 * PI;
        assert!((cycle.printed - printed).abs() < 1e-15);
        let oracle = 0.2 * 0.2 * 0.05 / 2.0 * (1.0 / 3.0 - 1.0 / (2.0 * PI * PI)) * 2.0 * PI;
        assert!((cycle.oracle - oracle).abs() < 1e-12 * oracle);
        assert!((cycle.ratio() - 1.0 / (PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn berry_phase_scales_with_amplitude_squared() {
        let m1 = WallMotion::oscillatory(1.0, 0.1, 0.05).unwrap();
        let m2 = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        let c1 = berry_phase_cycle(&u(), &m1, &ground()).unwrap();
        let c2 = berry_phase_cycle(&u(), &m2, &ground()).unwrap();
        assert!((c2.printed / c1.printed - 4.0).abs() < 1e-12);
        assert!((c2.oracle / c1.oracle - 4.0).abs() < 1e-10);
    }

    #[test]
    fn static_has_no_geometric_phase() {
        let m = WallMotion::fixed(1.3).unwrap();
        assert_eq!(berry_connection_quadrature(&u(), &m, &ground(), 4.0).unwrap(), 0.0);
        let p = phase_breakdown(&u(), &m, &ground(), 2.0, GeometricMode::Oracle).unwrap();
        assert_eq!(p.geometric, 0.0);
        assert_eq!(p.total, p.dynamical);
    }

    #[test]
    fn connection_numeric_matches_reduction() {
        let m = WallMotion::linear(1.0, 0.01).unwrap();
        for l in 0..3 {
            let lvl = LevelIndex::new(1, l, 0).unwrap();
            for t in [0.0, 5.0, 20.0] {
                let num = connection_numeric(&u(), &m, &lvl, t).unwrap();
                let ana = berry_connection(&u(), &m, &lvl, t).unwrap();
                assert!((num.re - ana).abs() <= 1e-6 * ana.abs(), "l={l} t={t}: {} vs {ana}", num.re);
                assert!(num.im.abs() <= 1e-6 * ana.abs());
            }
        }
    }

    #[test]
    fn breakdown_total_is_sum() {
        let m = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        for t in [0.0, 13.0, 200.0] {
            let p = phase_breakdown(&u(), &m, &ground(), t, GeometricMode::Oracle).unwrap();
            assert_eq!(p.total, p.dynamical + p.geometric);
            let s = p.split.unwrap();
            assert!((s.periodic + s.rate * t - p.total).abs() < 1e-9 * (1.0 + p.total.abs()));
        }
    }
}

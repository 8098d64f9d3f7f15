//! Trap geometry, units, level bookkeeping and energies.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::specfun;

/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Electron mass in kg.
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Units {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("units need hbar > 0 and mass > 0 (got {hbar}, {mass})")));
        }
        Ok(Self { hbar, mass })
    }

    pub fn natural() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }

    /// SI units for an electron.
    pub fn si_electron() -> Self {
        Self { hbar: HBAR_SI, mass: ELECTRON_MASS_SI }
    }

    /// `ħ²/2m`.
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::natural()
    }
}

/// Wall trajectory `a(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallMotion {
    Static { a0: f64 },
    /// `a(t) = a0 + v t`
    Linear { a0: f64, v: f64 },
    /// `a(t) = a0 + b sin(ωt)`
    Oscillatory { a0: f64, b: f64, omega: f64 },
}

impl WallMotion {
    pub fn fixed(a0: f64) -> Result<Self> {
        Self::Static { a0 }.validated()
    }

    pub fn linear(a0: f64, v: f64) -> Result<Self> {
        Self::Linear { a0, v }.validated()
    }

    pub fn oscillatory(a0: f64, b: f64, omega: f64) -> Result<Self> {
        Self::Oscillatory { a0, b, omega }.validated()
    }

    /// Checks the variant invariants. `b = a0` is rejected: the secular
    /// form of the dynamical phase diverges there.
    pub fn validated(self) -> Result<Self> {
        let a0 = self.a0();
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::InvalidMotion(format!("a0 must be positive, got {a0}")));
        }
        match self {
            WallMotion::Static { .. } => {}
            WallMotion::Linear { v, .. } => {
                if !v.is_finite() {
                    return Err(Error::InvalidMotion(format!("wall velocity {v} is not finite")));
                }
            }
            WallMotion::Oscillatory { b, omega, .. } => {
                if !(b >= 0.0 && b < a0) {
                    return Err(Error::InvalidMotion(format!("oscillation amplitude must satisfy 0 <= b < a0 (b = {b}, a0 = {a0})")));
                }
                if !(omega > 0.0 && omega.is_finite()) {
                    return Err(Error::InvalidMotion(format!("angular frequency must be positive, got {omega}")));
                }
            }
        }
        Ok(self)
    }

    pub fn a0(&self) -> f64 {
        match *self {
            WallMotion::Static { a0 } | WallMotion::Linear { a0, .. } | WallMotion::Oscillatory { a0, .. } => a0,
        }
    }

    /// Oscillation period `2π/ω`, if oscillatory.
    pub fn period(&self) -> Option<f64> {
        match *self {
            WallMotion::Oscillatory { omega, .. } => Some(2.0 * PI / omega),
            _ => None,
        }
    }

    /// `a(t)` without the collapse check.
    pub(crate) fn raw_radius(&self, t: f64) -> f64 {
        match *self {
            WallMotion::Static { a0 } => a0,
            WallMotion::Linear { a0, v } => a0 + v * t,
            WallMotion::Oscillatory { a0, b, omega } => a0 + b * (omega * t).sin(),
        }
    }

    /// `ȧ(t)`.
    pub fn velocity(&self, t: f64) -> f64 {
        match *self {
            WallMotion::Static { .. } => 0.0,
            WallMotion::Linear { v, .. } => v,
            WallMotion::Oscillatory { b, omega, .. } => b * omega * (omega * t).cos(),
        }
    }

    /// `ä(t)`.
    pub fn acceleration(&self, t: f64) -> f64 {
        match *self {
            WallMotion::Oscillatory { b, omega, .. } => -b * omega * omega * (omega * t).sin(),
            _ => 0.0,
        }
    }
}

impl fmt::Display for WallMotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WallMotion::Static { a0 } => write!(f, "static(a0={a0})"),
            WallMotion::Linear { a0, v } => write!(f, "linear(a0={a0}, v={v})"),
            WallMotion::Oscillatory { a0, b, omega } => write!(f, "oscillatory(a0={a0}, b={b}, omega={omega})"),
        }
    }
}

/// Wall radius at `t`; fails once the wall has collapsed.
pub fn radius(motion: &WallMotion, t: f64) -> Result<f64> {
    let a = motion.raw_radius(t);
    if a > 0.0 {
        Ok(a)
    } else {
        Err(Error::CollapsedWall { t, radius: a })
    }
}

/// Quantum numbers `(n, l, m)` with the cached zero `beta_{n,l}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelIndex {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub beta: f64,
}

impl LevelIndex {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("radial quantum number n starts at 1".into()));
        }
        if m.unsigned_abs() > l {
            return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
        }
        let beta = specfun::bessel_zero(l, n)?;
        Ok(Self { n, l, m, beta })
    }

    pub fn from_table(table: &specfun::BesselZeroTable, n: u32, l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::Domain(format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
        }
        let beta = table
            .get(l, n)
            .ok_or_else(|| Error::Domain(format!("level ({n}, {l}) outside the zero table")))?;
        Ok(Self { n, l, m, beta })
    }
}

impl fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.l, self.m)
    }
}

/// `E_nl(t) = ħ²β²/(2m a(t)²)`.
pub fn instant_energy(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64) -> Result<f64> {
    let a = radius(motion, t)?;
    Ok(units.kinetic_scale() * level.beta * level.beta / (a * a))
}

/// One-period mean of the instantaneous energy,
/// `ħ²β²/2m · a0/(a0² - b²)^{3/2}`. Static motion returns the constant energy.
pub fn averaged_energy(units: &Units, motion: &WallMotion, level: &LevelIndex) -> Result<f64> {
    let scale = units.kinetic_scale() * level.beta * level.beta;
    match *motion {
        WallMotion::Static { a0 } => Ok(scale / (a0 * a0)),
        WallMotion::Oscillatory { a0, b, .. } => {
            let d = a0 * a0 - b * b;
            Ok(scale * a0 / (d * d.sqrt()))
        }
        WallMotion::Linear { .. } => Err(Error::InvalidMotion("a period average needs an oscillating or static wall".into())),
    }
}

/// Level of a dimensionless smallness ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// ratio < 0.1
    Pass,
    /// 0.1 <= ratio < 1
    Warn,
    /// ratio >= 1
    HardWarn,
}

pub const PASS_THRESHOLD: f64 = 0.1;
pub const HARD_WARN_THRESHOLD: f64 = 1.0;

impl Verdict {
    pub fn of(ratio: f64) -> Self {
        if ratio < PASS_THRESHOLD {
            Verdict::Pass
        } else if ratio < HARD_WARN_THRESHOLD {
            Verdict::Warn
        } else {
            Verdict::HardWarn
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Warn => "warn",
            Verdict::HardWarn => "hard-warn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub value: f64,
    pub verdict: Verdict,
}

impl Ratio {
    fn new(value: f64) -> Self {
        Self { value, verdict: Verdict::of(value) }
    }
}

/// Smallness ratios behind the adiabatic treatment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityReport {
    /// `|v| m a0/ħ`
    pub wall_speed: Ratio,
    /// `b ω m a0/ħ`
    pub oscillation_speed: Ratio,
    /// `ω / [(ħβ/m a0²) √(a0/b)]`; zero when `b = 0`.
    pub frequency: Ratio,
}

impl AdiabaticityReport {
    pub fn worst(&self) -> Verdict {
        [self.wall_speed.verdict, self.oscillation_speed.verdict, self.frequency.verdict]
            .into_iter()
            .max_by_key(|v| *v as u8)
            .unwrap_or(Verdict::Pass)
    }

    pub fn ratios(&self) -> [(&'static str, Ratio); 3] {
        [("wall_speed", self.wall_speed), ("oscillation_speed", self.oscillation_speed), ("frequency", self.frequency)]
    }
}

pub fn adiabaticity_report(units: &Units, motion: &WallMotion, level: &LevelIndex) -> AdiabaticityReport {
    let a0 = motion.a0();
    let char_speed = units.hbar / (units.mass * a0);
    let (r1, r2, r3) = match *motion {
        WallMotion::Static { .. } => (0.0, 0.0, 0.0),
        WallMotion::Linear { v, .. } => (v.abs() / char_speed, 0.0, 0.0),
        WallMotion::Oscillatory { b, omega, .. } => {
            let r3 = if b == 0.0 {
                0.0
            } else {
                omega / (units.hbar * level.beta / (units.mass * a0 * a0) * (a0 / b).sqrt())
            };
            (0.0, b * omega / char_speed, r3)
        }
    };
    AdiabaticityReport { wall_speed: Ratio::new(r1), oscillation_speed: Ratio::new(r2), frequency: Ratio::new(r3) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad_adaptive;

    fn ground() -> LevelIndex {
        LevelIndex::new(1, 0, 0).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(radius(&WallMotion::fixed(1.0).unwrap(), 5.0).unwrap(), 1.0);
        assert!((radius(&WallMotion::linear(1.0, 0.1).unwrap(), 2.0).unwrap() - 1.2).abs() < 1e-15);
        let osc = WallMotion::oscillatory(1.0, 0.2, 3.0).unwrap();
        assert!((radius(&osc, PI / 6.0).unwrap() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn collapsed_wall_is_an_error() {
        let m = WallMotion::linear(1.0, -0.5).unwrap();
        assert!(matches!(radius(&m, 2.0), Err(Error::CollapsedWall { .. })));
        assert!(instant_energy(&Units::natural(), &m, &ground(), 3.0).is_err());
    }

    #[test]
    fn invalid_motions() {
        assert!(WallMotion::fixed(0.0).is_err());
        assert!(WallMotion::oscillatory(1.0, 1.0, 1.0).is_err());
        assert!(WallMotion::oscillatory(1.0, -0.1, 1.0).is_err());
        assert!(WallMotion::oscillatory(1.0, 0.1, 0.0).is_err());
        assert!(LevelIndex::new(0, 0, 0).is_err());
        assert!(LevelIndex::new(1, 1, 2).is_err());
        assert!(Units::new(0.0, 1.0).is_err());
    }

    #[test]
    fn energies() {
        let u = Units::natural();
        let e = instant_energy(&u, &WallMotion::fixed(1.0).unwrap(), &ground(), 0.0).unwrap();
        assert!((e - PI * PI / 2.0).abs() < 1e-14);
        let e = instant_energy(&u, &WallMotion::linear(1.0, 0.1).unwrap(), &ground(), 10.0).unwrap();
        assert!((e - PI * PI / 8.0).abs() < 1e-14);
        let p = LevelIndex::new(1, 1, 0).unwrap();
        let e = instant_energy(&u, &WallMotion::fixed(1.0).unwrap(), &p, 0.0).unwrap();
        assert!((e - p.beta * p.beta / 2.0).abs() < 1e-14);
        assert!((e - 10.0954).abs() < 1e-4);
    }

    #[test]
    fn averaged_energy_matches_quadrature() {
        let u = Units::natural();
        let lvl = ground();
        for &(b, omega) in &[(0.5, 1.0), (0.1, 0.05), (0.9, 3.0)] {
            let m = WallMotion::oscillatory(1.0, b, omega).unwrap();
            let period = m.period().unwrap();
            let q = quad_adaptive(|t| instant_energy(&u, &m, &lvl, t).unwrap(), 0.0, period).unwrap() / period;
            let e = averaged_energy(&u, &m, &lvl).unwrap();
            assert!((q - e).abs() <= 1e-10 * e, "b={b}: {q} vs {e}");
        }
        let m = WallMotion::oscillatory(1.0, 0.5, 1.0).unwrap();
        let e = averaged_energy(&u, &m, &lvl).unwrap();
        assert!((e - PI * PI / 2.0 / 0.75f64.powf(1.5)).abs() < 1e-12);
        assert!((e - 7.5977).abs() < 1e-4);
        let m0 = WallMotion::oscillatory(1.0, 0.0, 1.0).unwrap();
        assert!((averaged_energy(&u, &m0, &lvl).unwrap() - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn adiabaticity_examples() {
        let u = Units::natural();
        let r = adiabaticity_report(&u, &WallMotion::fixed(1.0).unwrap(), &ground());
        assert_eq!(r.worst(), Verdict::Pass);
        assert_eq!(r.wall_speed.value, 0.0);
        let r = adiabaticity_report(&u, &WallMotion::linear(1.0, 0.01).unwrap(), &ground());
        assert!((r.wall_speed.value - 0.01).abs() < 1e-15);
        assert_eq!(r.wall_speed.verdict, Verdict::Pass);
        let r = adiabaticity_report(&u, &WallMotion::oscillatory(1.0, 0.1, 0.05).unwrap(), &ground());
        assert!((r.oscillation_speed.value - 0.005).abs() < 1e-15);
        assert!((r.frequency.value - 0.05 / (PI * 10f64.sqrt())).abs() < 1e-15);
        assert!((r.frequency.value - 0.00503).abs() < 1e-5);
        assert_eq!(r.worst(), Verdict::Pass);
        let r = adiabaticity_report(&u, &WallMotion::linear(1.0, 2.0).unwrap(), &ground());
        assert_eq!(r.worst(), Verdict::HardWarn);
        assert_eq!(Verdict::of(0.5), Verdict::Warn);
    }
}

//! Dipole transitions in the oscillating trap: matrix elements, Fourier
//! sidebands of the modulated phase, and the resulting line spectrum.
//!
//! The field couples as `λV = -eE r cos θ` with `eE` passed as a single
//! force amplitude. Each level's total phase is split into a secular rate
//! `-Ẽ/ħ` (`Ẽ = Ē + ε`) and a periodic remainder `ζ̃`. The product of the
//! wall-size factor `a(t)/a0` and the periodic phase factor is expanded as
//! `Σ_k f^k e^{-ikωt}`, and each `k` gives a golden-rule line at
//! `ω_ph = ∓(ΔẼ/ħ + kω)`.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phases::{self, GeometricMode};
use crate::specfun::{jl, quad_adaptive};
use crate::wellmodel::{averaged_energy, LevelIndex, Units, WallMotion};

/// Coefficients below this weight are treated as absent lines.
const NEGLIGIBLE_WEIGHT: f64 = 1e-14;

/// `⟨Y_{l'}^{m'}|cos θ|Y_l^m⟩`; exactly zero unless `l' = l ± 1`, `m' = m`.
pub fn angular_factor(l: u32, m: i32, l2: u32, m2: i32) -> f64 {
    if m != m2 || m.unsigned_abs() > l || m2.unsigned_abs() > l2 {
        return 0.0;
    }
    // cos θ Y_l^m = c(l) Y_{l+1}^m + c(l-1) Y_{l-1}^m
    let c = |l: u32| {
        let (l, m) = (l as f64, m as f64);
        (((l + 1.0).powi(2) - m * m) / ((2.0 * l + 1.0) * (2.0 * l + 3.0))).sqrt()
    };
    if l2 == l + 1 {
        c(l)
    } else if l2 + 1 == l {
        c(l2)
    } else {
        0.0
    }
}

/// `2/(j_{l+1}(β) j_{l'+1}(β')) ∫_0^1 ξ³ j_l(βξ) j_{l'}(β'ξ) dξ`.
pub fn radial_factor(initial: &LevelIndex, final_: &LevelIndex) -> Result<f64> {
    let (l, l2) = (initial.l as i32, final_.l as i32);
    let integral = quad_adaptive(|x| x * x * x * jl(l, initial.beta * x) * jl(l2, final_.beta * x), 0.0, 1.0)?;
    Ok(2.0 * integral / (jl(l + 1, initial.beta) * jl(l2 + 1, final_.beta)))
}

pub fn allowed(initial: &LevelIndex, final_: &LevelIndex) -> bool {
    initial.m == final_.m && (initial.l + 1 == final_.l || final_.l + 1 == initial.l)
}

/// `⟨final|λV|initial⟩ = -eE a0 A R` in the static well of radius `a0`.
pub fn dipole_element(a0: f64, initial: &LevelIndex, final_: &LevelIndex, field_amplitude: f64) -> Result<Complex64> {
    if !allowed(initial, final_) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = angular_factor(initial.l, initial.m, final_.l, final_.m);
    let r = radial_factor(initial, final_)?;
    Ok(Complex64::new(-field_amplitude * a0 * a * r, 0.0))
}

/// Whose periodic phase enters the sideband expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseReference {
    /// `ζ̃_initial - ζ̃_final`
    #[default]
    Difference,
    /// `ζ̃_final` alone.
    FinalOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandOptions {
    pub samples: usize,
    pub reference: PhaseReference,
    /// Geometric variant inside `ζ̃`.
    pub mode: GeometricMode,
}

impl Default for SidebandOptions {
    fn default() -> Self {
        Self { samples: 4096, reference: PhaseReference::Difference, mode: GeometricMode::Oracle }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SidebandCoeffs {
    pub initial: LevelIndex,
    pub final_: LevelIndex,
    pub k_max: usize,
    /// `coeffs[k + k_max] = f^k`
    pub coeffs: Vec<Complex64>,
}

impl SidebandCoeffs {
    pub fn get(&self, k: i32) -> Complex64 {
        let i = k + self.k_max as i32;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn orders(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        let k_max = self.k_max as i32;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i32 - k_max, c))
    }

    pub fn parseval_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `max(|f^K|², |f^{-K}|²)`
    pub fn tail(&self) -> f64 {
        self.get(self.k_max as i32).norm_sqr().max(self.get(-(self.k_max as i32)).norm_sqr())
    }
}

/// Periodic part `ζ̃` of a level's total phase at `t`.
pub fn periodic_phase(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, mode: GeometricMode) -> Result<f64> {
    let p = phases::phase_breakdown(units, motion, level, t, mode)?;
    Ok(p.split.map_or(0.0, |s| s.periodic))
}

fn modulation_samples(units: &Units, motion: &WallMotion, initial: &LevelIndex, final_: &LevelIndex, opts: &SidebandOptions) -> Result<Vec<(f64, f64)>> {
    let (a0, omega) = match *motion {
        WallMotion::Oscillatory { a0, omega, .. } => (a0, omega),
        _ => return Err(Error::InvalidMotion(format!("sidebands need an oscillating wall, got {motion}"))),
    };
    let period = 2.0 * PI / omega;
    let n = opts.samples;
    (0..n)
        .map(|s| {
            let t = period * s as f64 / n as f64;
            let fin = periodic_phase(units, motion, final_, t, opts.mode)?;
            let dz = match opts.reference {
                PhaseReference::Difference => periodic_phase(units, motion, initial, t, opts.mode)? - fin,
                PhaseReference::FinalOnly => fin,
            };
            Ok((motion.raw_radius(t) / a0, dz))
        })
        .collect()
}

fn required_order(a0: f64, b: f64, samples: &[(f64, f64)]) -> usize {
    let amp = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    ((4.0 * (b / a0 + amp)).ceil() as usize).max(1)
}

fn fourier(values: &[Complex64], k: i32) -> Complex64 {
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(s, v)| v * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * s as f64 / n))
        .sum::<Complex64>()
        / n
}

fn modulation(samples: &[(f64, f64)]) -> Vec<Complex64> {
    samples.iter().map(|&(scale, dz)| Complex64::from_polar(scale, -dz)).collect()
}

/// Smallest truncation that is at least `ceil(4 (b/a0 + max|Δζ̃|))` and
/// also leaves a Parseval deficit below 1e-10 with tail weight <= 1e-12.
pub fn minimum_order(units: &Units, motion: &WallMotion, initial: &LevelIndex, final_: &LevelIndex, opts: &SidebandOptions) -> Result<usize> {
    let (a0, b) = match *motion {
        WallMotion::Oscillatory { a0, b, .. } if b > 0.0 => (a0, b),
        _ => return Ok(1),
    };
    let samples = modulation_samples(units, motion, initial, final_, opts)?;
    let values = modulation(&samples);
    let expect = 1.0 + b * b / (2.0 * a0 * a0);
    let cap = (opts.samples / 4).saturating_sub(1) as i32;
    let mut sum = fourier(&values, 0).norm_sqr();
    for k in 1..=cap {
        let (p, m) = (fourier(&values, k).norm_sqr(), fourier(&values, -k).norm_sqr());
        sum += p + m;
        if (expect - sum).abs() < 1e-10 && p.max(m) <= 1e-12 {
            return Ok(required_order(a0, b, &samples).max(k as usize));
        }
    }
    Err(Error::Truncation(format!("no order up to {cap} captures the modulation with {} samples", opts.samples)))
}

/// `f^k = (1/T)∫_0^T (a/a0) e^{-iΔζ̃} e^{ikωt} dt` by the trapezoid rule on
/// `opts.samples` equispaced points, for `|k| <= k_max`.
pub fn sideband_coeffs(
    units: &Units,
    motion: &WallMotion,
    initial: &LevelIndex,
    final_: &LevelIndex,
    k_max: usize,
    opts: &SidebandOptions,
) -> Result<SidebandCoeffs> {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
    let (a0, b) = match *motion {
        WallMotion::Oscillatory { a0, b, .. } => (a0, b),
        WallMotion::Static { .. } => {
            coeffs[k_max] = Complex64::new(1.0, 0.0);
            return Ok(SidebandCoeffs { initial: *initial, final_: *final_, k_max, coeffs });
        }
        WallMotion::Linear { .. } => return Err(Error::InvalidMotion(format!("sidebands need an oscillating wall, got {motion}"))),
    };
    if b == 0.0 {
        coeffs[k_max] = Complex64::new(1.0, 0.0);
        return Ok(SidebandCoeffs { initial: *initial, final_: *final_, k_max, coeffs });
    }
    if opts.samples < 4 * k_max + 4 {
        return Err(Error::Truncation(format!("{} samples cannot resolve |k| <= {k_max}", opts.samples)));
    }
    let samples = modulation_samples(units, motion, initial, final_, opts)?;
    let needed = required_order(a0, b, &samples);
    if k_max < needed {
        return Err(Error::Truncation(format!("K = {k_max} below the required {needed}")));
    }
    let values = modulation(&samples);
    for (i, c) in coeffs.iter_mut().enumerate() {
        *c = fourier(&values, i as i32 - k_max as i32);
    }
    let out = SidebandCoeffs { initial: *initial, final_: *final_, k_max, coeffs };
    let expect = 1.0 + b * b / (2.0 * a0 * a0);
    if (out.parseval_sum() - expect).abs() > 1e-8 {
        return Err(Error::Truncation(format!("Parseval sum {} differs from {expect}", out.parseval_sum())));
    }
    if out.tail() > 1e-12 {
        return Err(Error::Truncation(format!("tail weight {:e} at |k| = {k_max}", out.tail())));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedEnergy {
    pub level: LevelIndex,
    pub e_bar: f64,
    pub epsilon: f64,
    pub e_tilde: f64,
}

/// `Ẽ = Ē + ε`; `eps = None` switches the geometric shift off.
pub fn modified_energy(units: &Units, motion: &WallMotion, level: &LevelIndex, eps: Option<GeometricMode>) -> Result<ModifiedEnergy> {
    let e_bar = averaged_energy(units, motion, level)?;
    let epsilon = match (motion, eps) {
        (WallMotion::Oscillatory { .. }, Some(mode)) => phases::epsilon(units, motion, level)?.pick(mode),
        _ => 0.0,
    };
    Ok(ModifiedEnergy { level: *level, e_bar, epsilon, e_tilde: e_bar + epsilon })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Absorption,
    Emission,
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineKind::Absorption => "absorption",
            LineKind::Emission => "emission",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumLine {
    pub photon_frequency: f64,
    pub k: i32,
    pub weight: f64,
    pub kind: LineKind,
    pub initial: LevelIndex,
    pub final_: LevelIndex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub sidebands: SidebandOptions,
    /// `None` leaves `ε` out of `Ẽ`.
    pub eps: Option<GeometricMode>,
    /// `None` picks [`minimum_order`].
    pub k_max: Option<usize>,
    /// The force amplitude `eE`.
    pub field_amplitude: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { sidebands: SidebandOptions::default(), eps: Some(GeometricMode::Oracle), k_max: None, field_amplitude: 1.0 }
    }
}

/// Golden-rule lines of `initial → final`, weight `(2π/ħ²)|f^k|²|V|²`,
/// absorption at `ω_ph = (Ẽ_f - Ẽ_i)/ħ - kω` and emission at
/// `(Ẽ_i - Ẽ_f)/ħ + kω`. Only positive photon frequencies are kept.
/// Forbidden transitions give an empty list.
pub fn transition_rate(units: &Units, motion: &WallMotion, initial: &LevelIndex, final_: &LevelIndex, opts: &SpectrumOptions) -> Result<Vec<SpectrumLine>> {
    let v = dipole_element(motion.a0(), initial, final_, opts.field_amplitude)?;
    if v.norm_sqr() == 0.0 {
        return Ok(Vec::new());
    }
    let omega = match *motion {
        WallMotion::Oscillatory { omega, .. } => omega,
        WallMotion::Static { .. } => 0.0,
        WallMotion::Linear { .. } => return Err(Error::InvalidMotion(format!("spectra need a static or oscillating wall, got {motion}"))),
    };
    let k_max = match opts.k_max {
        Some(k) => k,
        None => minimum_order(units, motion, initial, final_, &opts.sidebands)?,
    };
    let coeffs = sideband_coeffs(units, motion, initial, final_, k_max, &opts.sidebands)?;
    let ei = modified_energy(units, motion, initial, opts.eps)?.e_tilde;
    let ef = modified_energy(units, motion, final_, opts.eps)?.e_tilde;
    let gap = (ef - ei) / units.hbar;
    let base = 2.0 * PI / (units.hbar * units.hbar) * v.norm_sqr();
    let mut lines = Vec::new();
    for (k, f) in coeffs.orders() {
        let weight = base * f.norm_sqr();
        if f.norm_sqr() < NEGLIGIBLE_WEIGHT {
            continue;
        }
        let kw = k as f64 * omega;
        for (kind, w_ph) in [(LineKind::Absorption, gap - kw), (LineKind::Emission, -gap + kw)] {
            if w_ph > 0.0 {
                lines.push(SpectrumLine { photon_frequency: w_ph, k, weight, kind, initial: *initial, final_: *final_ });
            }
        }
    }
    Ok(lines)
}

/// Sum of unit-area Lorentzians of half width `linewidth`, scaled by each
/// line's weight, sampled on `grid`.
pub fn broadened_spectrum(lines: &[SpectrumLine], linewidth: f64, grid: &[f64]) -> Result<Vec<f64>> {
    if !(linewidth > 0.0 && linewidth.is_finite()) {
        return Err(Error::Domain(format!("linewidth must be positive, got {linewidth}")));
    }
    Ok(grid
        .iter()
        .map(|&w| {
            lines
                .iter()
                .map(|line| {
                    let d = w - line.photon_frequency;
                    line.weight * linewidth / (PI * (d * d + linewidth * linewidth))
                })
                .sum()
        })
        .collect())
}

pub const LINES_HEADER: &str = "omega_ph,k,weight,kind,n0,l0,m0,n,l,m";

fn line_row(out: &mut String, line: &SpectrumLine) {
    let (i, f) = (&line.initial, &line.final_);
    let _ = write!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        crate::fmt_f64(line.photon_frequency),
        line.k,
        crate::fmt_f64(line.weight),
        line.kind,
        i.n,
        i.l,
        i.m,
        f.n,
        f.l,
        f.m
    );
}

/// One row per line, header [`LINES_HEADER`].
pub fn lines_to_csv(lines: &[SpectrumLine]) -> String {
    let mut out = format!("{LINES_HEADER}\n");
    for line in lines {
        line_row(&mut out, line);
        out.push('\n');
    }
    out
}

/// Line table with two extra columns: the position of the same `(k, kind)`
/// line in `reference` (computed with `ε` off) and the shift between them.
/// Lines without a partner get `NaN` in both columns.
pub fn lines_with_shift_to_csv(lines: &[SpectrumLine], reference: &[SpectrumLine]) -> String {
    let mut out = format!("{LINES_HEADER},omega_ph_eps_off,eps_shift\n");
    for line in lines {
        line_row(&mut out, line);
        let off = reference.iter().find(|r| r.k == line.k && r.kind == line.kind).map_or(f64::NAN, |r| r.photon_frequency);
        let _ = writeln!(out, ",{},{}", crate::fmt_f64(off), crate::fmt_f64(line.photon_frequency - off));
    }
    out
}

/// `omega_ph,intensity`
pub fn broadened_to_csv(grid: &[f64], intensity: &[f64]) -> String {
    let mut out = String::from("omega_ph,intensity\n");
    for (w, i) in grid.iter().zip(intensity) {
        let _ = writeln!(out, "{},{}", crate::fmt_f64(*w), crate::fmt_f64(*i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad_gl;

    fn u() -> Units {
        Units::natural()
    }

    fn lvl(n: u32, l: u32, m: i32) -> LevelIndex {
        LevelIndex::new(n, l, m).unwrap()
    }

    /// Orthonormal associated Legendre part of `Y_l^m` in `x = cos θ`, by
    /// the textbook upward recurrence.
    fn ylm_theta(l: u32, m: u32, x: f64) -> f64 {
        let mut pmm = 1.0;
        let s = (1.0 - x * x).sqrt();
        for i in 0..m {
            pmm *= -(2.0 * i as f64 + 1.0) * s;
        }
        let p = if l == m {
            pmm
        } else {
            let mut p0 = pmm;
            let mut p1 = x * (2.0 * m as f64 + 1.0) * pmm;
            for ll in m + 2..=l {
                let p2 = (x * (2.0 * ll as f64 - 1.0) * p1 - (ll + m - 1) as f64 * p0) / (ll - m) as f64;
                p0 = p1;
                p1 = p2;
            }
            p1
        };
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        ((2.0 * l as f64 + 1.0) / (4.0 * PI) * fact(l - m) / fact(l + m)).sqrt() * p
    }

    #[test]
    fn angular_factor_matches_sphere_quadrature() {
        assert!((angular_factor(0, 0, 1, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        for l in 0..5u32 {
            for m in 0..=l {
                for l2 in [l + 1, l.saturating_sub(1)] {
                    if m > l2 || l2 == l {
                        continue;
                    }
                    let q = 2.0 * PI * quad_gl(|x| ylm_theta(l, m, x) * x * ylm_theta(l2, m, x), -1.0, 1.0, 64);
                    let a = angular_factor(l, m as i32, l2, m as i32);
                    assert!((q - a).abs() < 1e-12, "({l},{m})->({l2},{m}): {q} vs {a}");
                    assert_eq!(a, angular_factor(l, -(m as i32), l2, -(m as i32)));
                }
            }
        }
    }

    #[test]
    fn selection_rules_are_exact() {
        assert_eq!(dipole_element(1.0, &lvl(1, 0, 0), &lvl(1, 2, 0), 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(dipole_element(1.0, &lvl(1, 1, 0), &lvl(1, 2, 1), 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(dipole_element(1.0, &lvl(1, 1, 1), &lvl(2, 1, 1), 1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!(dipole_element(1.0, &lvl(1, 0, 0), &lvl(1, 1, 0), 1.0).unwrap().norm() > 0.0);
    }

    #[test]
    fn radial_factor_fixture() {
        // fixed value cross-checked with an independent quadrature library
        let (i, f) = (lvl(1, 0, 0), lvl(1, 1, 0));
        let q = 2.0 * quad_gl(|x| x.powi(3) * jl(0, PI * x) * jl(1, f.beta * x), 0.0, 1.0, 400) / (jl(1, PI) * jl(2, f.beta));
        let r = radial_factor(&i, &f).unwrap();
        assert!((r - q).abs() < 1e-13);
        assert!((r - 0.530_068_326_675_001).abs() < 1e-12, "{r:.16}");
        // symmetric in the pair
        assert!((radial_factor(&f, &i).unwrap() - r).abs() < 1e-14);
    }

    #[test]
    fn static_sidebands_are_delta() {
        let m = WallMotion::oscillatory(1.0, 0.0, 0.1).unwrap();
        let c = sideband_coeffs(&u(), &m, &lvl(1, 0, 0), &lvl(1, 1, 0), 3, &SidebandOptions::default()).unwrap();
        for (k, f) in c.orders() {
            assert_eq!(f, if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
        }
    }

    #[test]
    fn pure_amplitude_modulation() {
        let m = WallMotion::oscillatory(1.0, 0.2, 0.05).unwrap();
        let g = lvl(1, 0, 0);
        let c = sideband_coeffs(&u(), &m, &g, &g, 2, &SidebandOptions::default()).unwrap();
        assert!((c.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((c.get(1) - Complex64::new(0.0, 0.1)).norm() < 1e-12);
        assert!((c.get(-1) - Complex64::new(0.0, -0.1)).norm() < 1e-12);
        assert!(c.get(2).norm() < 1e-12);
        assert!((c.parseval_sum() - 1.02).abs() < 1e-12);
    }

    #[test]
    fn phase_modulated_parseval() {
        let m = WallMotion::oscillatory(1.0, 0.05, 0.5).unwrap();
        let (i, f) = (lvl(1, 0, 0), lvl(1, 1, 0));
        let opts = SidebandOptions::default();
        let k = minimum_order(&u(), &m, &i, &f, &opts).unwrap();
        let c = sideband_coeffs(&u(), &m, &i, &f, k, &opts).unwrap();
        assert!((c.parseval_sum() - (1.0 + 0.05 * 0.05 / 2.0)).abs() < 1e-8);
        assert!(c.tail() <= 1e-12);
        assert!(matches!(sideband_coeffs(&u(), &m, &i, &f, 1, &opts), Err(Error::Truncation(_))));
    }

    #[test]
    fn static_golden_rule_single_line() {
        let m = WallMotion::oscillatory(1.0, 0.0, 0.1).unwrap();
        let (i, f) = (lvl(1, 0, 0), lvl(1, 1, 0));
        let lines = transition_rate(&u(), &m, &i, &f, &SpectrumOptions::default()).unwrap();
        assert_eq!(lines.len(), 1);
        let gap = (f.beta * f.beta - PI * PI) / 2.0;
        assert!((lines[0].photon_frequency - gap).abs() < 1e-12);
        assert_eq!(lines[0].kind, LineKind::Absorption);
        let v = dipole_element(1.0, &i, &f, 1.0).unwrap();
        assert!((lines[0].weight - 2.0 * PI * v.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn sideband_spacing_and_eps_shift() {
        let m = WallMotion::oscillatory(1.0, 0.05, 0.5).unwrap();
        let (i, f) = (lvl(1, 0, 0), lvl(1, 1, 0));
        let on = transition_rate(&u(), &m, &i, &f, &SpectrumOptions::default()).unwrap();
        let off = transition_rate(&u(), &m, &i, &f, &SpectrumOptions { eps: None, ..Default::default() }).unwrap();
        let abs: Vec<_> = on.iter().filter(|l| l.kind == LineKind::Absorption).collect();
        for w in abs.windows(2) {
            assert_eq!(w[1].k, w[0].k + 1);
            assert!((w[0].photon_frequency - w[1].photon_frequency - 0.5).abs() < 1e-12);
        }
        let ei = phases::epsilon(&u(), &m, &i).unwrap().oracle;
        let ef = phases::epsilon(&u(), &m, &f).unwrap().oracle;
        let k0 = |ls: &[SpectrumLine]| ls.iter().find(|l| l.k == 0 && l.kind == LineKind::Absorption).unwrap().photon_frequency;
        assert!((k0(&on) - k0(&off) - (ef - ei)).abs() < 1e-13);
        let csv = lines_with_shift_to_csv(&on, &off);
        assert!(csv.starts_with("omega_ph,k,weight,kind,n0,l0,m0,n,l,m,omega_ph_eps_off,eps_shift\n"));
    }

    #[test]
    fn absorption_mirrors_emission() {
        let m = WallMotion::oscillatory(1.0, 0.05, 3.0).unwrap();
        let (i, f) = (lvl(1, 0, 0), lvl(1, 1, 0));
        let up = transition_rate(&u(), &m, &i, &f, &SpectrumOptions::default()).unwrap();
        let down = transition_rate(&u(), &m, &f, &i, &SpectrumOptions::default()).unwrap();
        for a in up.iter().filter(|l| l.kind == LineKind::Absorption) {
            let e = down
                .iter()
                .find(|l| l.kind == LineKind::Emission && (l.photon_frequency - a.photon_frequency).abs() < 1e-9)
                .expect("matching emission line");
            assert!((e.weight - a.weight).abs() <= 1e-9 * a.weight.max(1e-300));
        }
    }

    #[test]
    fn lorentzian_area_and_peaks() {
        let line = |w: f64, weight: f64| SpectrumLine {
            photon_frequency: w,
            k: 0,
            weight,
            kind: LineKind::Absorption,
            initial: lvl(1, 0, 0),
            final_: lvl(1, 1, 0),
        };
        let gamma = 0.01;
        // ω = ω0 + γ tan θ turns the area into ∫ w/π dθ
        let thetas: Vec<f64> = crate::specfun::GaussLegendre::new(200).mapped(-PI / 2.0, PI / 2.0).map(|(x, _)| x).collect();
        let wts: Vec<f64> = crate::specfun::GaussLegendre::new(200).mapped(-PI / 2.0, PI / 2.0).map(|(_, w)| w).collect();
        let grid: Vec<f64> = thetas.iter().map(|th| 5.0 + gamma * th.tan()).collect();
        let s = broadened_spectrum(&[line(5.0, 2.5)], gamma, &grid).unwrap();
        let area: f64 = s.iter().zip(&thetas).zip(&wts).map(|((v, th), w)| v * gamma / th.cos().powi(2) * w).sum();
        assert!((area - 2.5).abs() < 1e-6);

        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
        let s = broadened_spectrum(&[line(3.0, 1.0), line(7.0, 1.0)], 0.05, &grid).unwrap();
        let peaks: Vec<f64> = (1..grid.len() - 1).filter(|&i| s[i] > s[i - 1] && s[i] > s[i + 1]).map(|i| grid[i]).collect();
        assert_eq!(peaks.len(), 2);
        assert!((peaks[0] - 3.0).abs() <= 0.01 && (peaks[1] - 7.0).abs() <= 0.01);

        let h1 = broadened_spectrum(&[line(1.0, 1.0)], 1e-3, &[1.0]).unwrap()[0];
        let h2 = broadened_spectrum(&[line(1.0, 1.0)], 1e-4, &[1.0]).unwrap()[0];
        assert!((h2 / h1 - 10.0).abs() < 1e-9);
        assert!(broadened_spectrum(&[], 0.0, &[1.0]).is_err());
    }
}

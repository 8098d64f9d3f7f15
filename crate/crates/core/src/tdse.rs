//! Numerical propagation of the radial Schrödinger equation with a moving
//! hard wall, independent of every closed form in [`crate::phases`].
//!
//! With `ξ = r/a(t)` and `w(ξ, t) = √a · u(aξ, t)` (`u = rR`) the moving
//! domain becomes `[0, 1]` and `∫|w|² dξ = ∫|u|² dr`. The chain rule on
//! `u(r, t) = a^{-1/2} w(r/a, t)` gives
//!
//! ```text
//! iħ ∂_t w = -(ħ²/2ma²)(∂_ξ² - l(l+1)/ξ²) w + iħ (ȧ/a)(ξ ∂_ξ + 1/2) w
//! ```
//!
//! The advection operator `ξ∂_ξ + 1/2` is anti-Hermitian under the Dirichlet
//! ends, so the generator stays Hermitian and the norm is conserved.
//!
//! `w` is expanded in the instantaneous eigenfunctions
//! `φ_j(ξ) = √2 ξ j_l(β_j ξ)/|j_{l+1}(β_j)|`, which do not depend on `t` in
//! this frame. The kinetic part is diagonal with entries `E_j(t)`, and the
//! advection becomes a real antisymmetric matrix `D`, which is built once
//! by Gauss–Legendre quadrature. Steps are implicit midpoint
//! (Crank–Nicolson), a Cayley transform of an anti-Hermitian matrix, so
//! each step is unitary up to rounding. The overlap with the bare
//! eigenstate of the propagated level is simply its coefficient.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phases::{self, PhaseBreakdown, SecularSplit};
use crate::specfun::{self, jl, jl_prime, GaussLegendre};
use crate::wavefield::RadialField;
use crate::wellmodel::{instant_energy, radius, LevelIndex, Units, WallMotion};

/// Default step criterion: `dt · E_max/ħ`.
const PHASE_PER_STEP: f64 = 0.01;

/// Minimum `|overlap|` for a run to count as adiabatic.
pub const ADIABATIC_OVERLAP: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Quadrature nodes for the basis matrix elements and the output field.
    pub grid_points: usize,
    /// Number of eigenfunctions kept.
    pub basis_size: usize,
    /// `None` picks `dt` so that `dt · E_max/ħ <= 0.01`, with `E_max` the
    /// largest energy of the propagated level over the run.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Maximum number of recorded history rows.
    pub record_limit: usize,
    /// Largest Richardson correction (radians) accepted by
    /// [`propagate_extrapolated`].
    pub halving_tolerance: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { grid_points: 2048, basis_size: 32, dt: None, t_final: 1.0, record_limit: 10_000, halving_tolerance: 0.1 }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 128 {
            return Err(Error::Domain(format!("grid_points must be >= 128, got {}", self.grid_points)));
        }
        if self.basis_size == 0 {
            return Err(Error::Domain("basis_size must be positive".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Domain(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::Domain(format!("t_final must be finite and non-negative, got {}", self.t_final)));
        }
        if self.record_limit < 2 {
            return Err(Error::Domain("record_limit must be at least 2".into()));
        }
        Ok(())
    }
}

/// Instantaneous eigenfunctions of one `l` on the co-moving grid.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    l: u32,
    betas: Vec<f64>,
    xi: Vec<f64>,
    weights: Vec<f64>,
    /// `values[j][g] = φ_j(ξ_g)`
    values: Vec<Vec<f64>>,
    /// Row-major `D_jk = ⟨φ_j|ξ∂_ξ + 1/2|φ_k⟩`, antisymmetrized.
    coupling: Vec<f64>,
}

impl EigenBasis {
    pub fn new(l: u32, size: usize, grid_points: usize) -> Result<Self> {
        let betas = (1..=size as u32).map(|n| specfun::bessel_zero(l, n)).collect::<Result<Vec<_>>>()?;
        let rule = GaussLegendre::cached(grid_points);
        let (xi, weights): (Vec<f64>, Vec<f64>) = rule.mapped(0.0, 1.0).unzip();
        let li = l as i32;
        let mut values = Vec::with_capacity(size);
        // ξφ_j' + φ_j/2
        let mut advected = Vec::with_capacity(size);
        for &beta in &betas {
            let norm = 2f64.sqrt() / jl(li + 1, beta).abs();
            let (mut v, mut d) = (Vec::with_capacity(xi.len()), Vec::with_capacity(xi.len()));
            for &x in &xi {
                let j = jl(li, beta * x);
                let phi = norm * x * j;
                let dphi = norm * (j + beta * x * jl_prime(li, beta * x));
                v.push(phi);
                d.push(x * dphi + 0.5 * phi);
            }
            values.push(v);
            advected.push(d);
        }
        let mut raw = vec![0.0; size * size];
        for j in 0..size {
            for k in 0..size {
                raw[j * size + k] = weights.iter().zip(&values[j]).zip(&advected[k]).map(|((w, p), q)| w * p * q).sum();
            }
        }
        let mut coupling = vec![0.0; size * size];
        for j in 0..size {
            for k in 0..size {
                coupling[j * size + k] = 0.5 * (raw[j * size + k] - raw[k * size + j]);
            }
        }
        Ok(Self { l, betas, xi, weights, values, coupling })
    }

    pub fn size(&self) -> usize {
        self.betas.len()
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn coupling(&self, j: usize, k: usize) -> f64 {
        self.coupling[j * self.size() + k]
    }

    /// `⟨φ_j|φ_k⟩` on the grid.
    pub fn gram(&self, j: usize, k: usize) -> f64 {
        self.weights.iter().zip(&self.values[j]).zip(&self.values[k]).map(|((w, p), q)| w * p * q).sum()
    }

    /// Coefficients of the co-moving amplitude of a radial function `R(r)`
    /// in a well of the given radius: `w(ξ) = a^{3/2} ξ R(aξ)`.
    pub fn project_radial<F: Fn(f64) -> Complex64>(&self, radius: f64, f: F) -> Vec<Complex64> {
        let scale = radius.powf(1.5);
        let w: Vec<Complex64> = self.xi.iter().map(|&x| f(x * radius) * (scale * x)).collect();
        self.values
            .iter()
            .map(|phi| w.iter().zip(phi).zip(&self.weights).map(|((w, p), q)| w * (p * q)).sum())
            .collect()
    }

    /// Radial field `R = w/(a^{3/2} ξ)` on the Gauss grid.
    pub fn field(&self, coeffs: &[Complex64], t: f64, radius: f64) -> RadialField {
        let scale = radius.powf(-1.5);
        let values = self
            .xi
            .iter()
            .enumerate()
            .map(|(g, &x)| {
                let w: Complex64 = coeffs.iter().zip(&self.values).map(|(c, phi)| c * phi[g]).sum();
                w * (scale / x)
            })
            .collect();
        RadialField { t, radius, xi: self.xi.clone(), weights: self.weights.clone(), values }
    }
}

/// Unwraps a phase series from per-sample increments `arg(z_{k+1} z̄_k)`,
/// starting at zero. A constant phase on the reference drops out.
#[derive(Debug, Clone, Default)]
pub struct PhaseTracker {
    last: Option<Complex64>,
    total: f64,
}

impl PhaseTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, z: Complex64) -> f64 {
        if let Some(prev) = self.last {
            self.total += (z * prev.conj()).arg();
        }
        self.last = Some(z);
        self.total
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

pub fn extract_phase_series(overlaps: &[Complex64]) -> Vec<f64> {
    let mut tracker = PhaseTracker::new();
    overlaps.iter().map(|&z| tracker.push(z)).collect()
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub level: LevelIndex,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub norm_history: Vec<f64>,
    /// Overlap with the bare instantaneous eigenstate of `level`.
    pub overlap_history: Vec<Complex64>,
    /// Unwrapped phase of the overlap, zero at `t = 0`.
    pub extracted_total_phase: Vec<f64>,
    pub final_field: RadialField,
    pub final_coefficients: Vec<Complex64>,
    /// Largest `|norm - 1|` over every step.
    pub max_norm_drift: f64,
    /// Smallest `|overlap|` over every step.
    pub min_overlap: f64,
    /// Richardson correction of the phase, when extrapolated.
    pub phase_error_estimate: Option<f64>,
}

impl PropagationResult {
    pub fn final_phase(&self) -> f64 {
        *self.extracted_total_phase.last().unwrap_or(&0.0)
    }

    /// `t,norm,re_overlap,im_overlap,total_phase` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm,re_overlap,im_overlap,total_phase\n");
        for i in 0..self.times.len() {
            let z = self.overlap_history[i];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                crate::fmt_f64(self.times[i]),
                crate::fmt_f64(self.norm_history[i]),
                crate::fmt_f64(z.re),
                crate::fmt_f64(z.im),
                crate::fmt_f64(self.extracted_total_phase[i])
            );
        }
        out
    }
}

/// Smallest wall radius reached on `[0, t_final]`.
fn min_radius(motion: &WallMotion, t_final: f64) -> Result<f64> {
    match *motion {
        WallMotion::Static { a0 } => Ok(a0),
        WallMotion::Linear { a0, .. } => Ok(a0.min(radius(motion, t_final)?)),
        // sin ωt first reaches -1 at ωt = 3π/2 and falls monotonically from π/2
        WallMotion::Oscillatory { a0, b, omega } => {
            if omega * t_final >= 1.5 * PI {
                Ok(a0 - b)
            } else {
                Ok(a0.min(motion.raw_radius(t_final)))
            }
        }
    }
}

/// Step size and count for a run.
pub fn default_steps(units: &Units, motion: &WallMotion, level: &LevelIndex, config: &PropagatorConfig) -> Result<(f64, usize)> {
    if config.t_final == 0.0 {
        return Ok((0.0, 0));
    }
    let dt = match config.dt {
        Some(dt) => dt,
        None => {
            let a = min_radius(motion, config.t_final)?;
            let e_max = units.kinetic_scale() * level.beta * level.beta / (a * a);
            PHASE_PER_STEP * units.hbar / e_max
        }
    };
    let steps = (config.t_final / dt).ceil().max(1.0) as usize;
    Ok((config.t_final / steps as f64, steps))
}

struct Run {
    times: Vec<f64>,
    norms: Vec<f64>,
    overlaps: Vec<Complex64>,
    phases: Vec<f64>,
    coeffs: Vec<Complex64>,
    max_norm_drift: f64,
    min_overlap: f64,
}

fn run(units: &Units, motion: &WallMotion, basis: &EigenBasis, target: usize, initial: &[Complex64], dt: f64, steps: usize, stride: usize) -> Result<Run> {
    let n = basis.size();
    let d = DMatrix::from_row_slice(n, n, &basis.coupling);
    let mut c = DVector::from_column_slice(initial);
    let norm0 = c.norm_squared();
    let mut tracker = PhaseTracker::new();
    let mut out = Run {
        times: Vec::new(),
        norms: Vec::new(),
        overlaps: Vec::new(),
        phases: Vec::new(),
        coeffs: Vec::new(),
        max_norm_drift: (norm0 - 1.0).abs(),
        min_overlap: c[target].norm(),
    };
    let record = |out: &mut Run, t: f64, c: &DVector<Complex64>, phase: f64| {
        out.times.push(t);
        out.norms.push(c.norm_squared());
        out.overlaps.push(c[target]);
        out.phases.push(phase);
    };
    let phase = tracker.push(c[target]);
    record(&mut out, 0.0, &c, phase);
    let scale = units.kinetic_scale();
    let half = Complex64::new(0.5 * dt, 0.0);
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let a = radius(motion, t_mid)?;
        let rate = motion.velocity(t_mid) / a;
        // G = -iE/ħ + (ȧ/a) D
        let mut g = d.map(|x| Complex64::new(rate * x, 0.0));
        for j in 0..n {
            let e = scale * basis.betas[j] * basis.betas[j] / (a * a);
            g[(j, j)] += Complex64::new(0.0, -e / units.hbar);
        }
        let rhs = &c + (&g * &c) * half;
        let mut lhs = g * (-half);
        for j in 0..n {
            lhs[(j, j)] += Complex64::new(1.0, 0.0);
        }
        c = lhs.lu().solve(&rhs).ok_or_else(|| Error::Convergence(format!("singular step matrix at t = {t_mid}")))?;
        let norm = c.norm_squared();
        out.max_norm_drift = out.max_norm_drift.max((norm - 1.0).abs());
        out.min_overlap = out.min_overlap.min(c[target].norm());
        let phase = tracker.push(c[target]);
        if (k + 1) % stride == 0 || k + 1 == steps {
            record(&mut out, (k + 1) as f64 * dt, &c, phase);
        }
    }
    out.coeffs = c.iter().copied().collect();
    Ok(out)
}

fn check_setup(motion: &WallMotion, level: &LevelIndex, config: &PropagatorConfig) -> Result<()> {
    config.validate()?;
    if level.n as usize > config.basis_size {
        return Err(Error::Domain(format!("level n = {} needs basis_size >= n (got {})", level.n, config.basis_size)));
    }
    radius(motion, 0.0)?;
    radius(motion, config.t_final)?;
    Ok(())
}

fn stride_for(steps: usize, record_limit: usize) -> usize {
    steps.div_ceil(record_limit - 1).max(1)
}

/// Propagates the instantaneous eigenstate of `level` at `t = 0`.
pub fn propagate(units: &Units, motion: &WallMotion, level: &LevelIndex, config: &PropagatorConfig) -> Result<PropagationResult> {
    check_setup(motion, level, config)?;
    let basis = EigenBasis::new(level.l, config.basis_size, config.grid_points)?;
    let mut initial = vec![Complex64::new(0.0, 0.0); basis.size()];
    initial[level.n as usize - 1] = Complex64::new(1.0, 0.0);
    propagate_state(units, motion, level, config, &basis, &initial)
}

/// Propagates arbitrary basis coefficients; overlaps refer to `level`.
pub fn propagate_state(
    units: &Units,
    motion: &WallMotion,
    level: &LevelIndex,
    config: &PropagatorConfig,
    basis: &EigenBasis,
    initial: &[Complex64],
) -> Result<PropagationResult> {
    check_setup(motion, level, config)?;
    if basis.l() != level.l || initial.len() != basis.size() {
        return Err(Error::Domain("initial state does not match the basis".into()));
    }
    let (dt, steps) = default_steps(units, motion, level, config)?;
    let r = run(units, motion, basis, level.n as usize - 1, initial, dt, steps, stride_for(steps, config.record_limit))?;
    finish(motion, level, basis, config, dt, steps, r, None)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    motion: &WallMotion,
    level: &LevelIndex,
    basis: &EigenBasis,
    config: &PropagatorConfig,
    dt: f64,
    steps: usize,
    r: Run,
    phase_error_estimate: Option<f64>,
) -> Result<PropagationResult> {
    let a = radius(motion, config.t_final)?;
    let final_field = basis.field(&r.coeffs, config.t_final, a);
    Ok(PropagationResult {
        level: *level,
        dt,
        steps,
        times: r.times,
        norm_history: r.norms,
        overlap_history: r.overlaps,
        extracted_total_phase: r.phases,
        final_field,
        final_coefficients: r.coeffs,
        max_norm_drift: r.max_norm_drift,
        min_overlap: r.min_overlap,
        phase_error_estimate,
    })
}

/// Runs at `dt` and `dt/2` and Richardson-extrapolates the phase series,
/// `φ = φ_{dt/2} + (φ_{dt/2} - φ_dt)/3`. Everything else comes from the
/// finer run. Fails when the correction exceeds `halving_tolerance`.
pub fn propagate_extrapolated(units: &Units, motion: &WallMotion, level: &LevelIndex, config: &PropagatorConfig) -> Result<PropagationResult> {
    check_setup(motion, level, config)?;
    let basis = EigenBasis::new(level.l, config.basis_size, config.grid_points)?;
    let target = level.n as usize - 1;
    let mut initial = vec![Complex64::new(0.0, 0.0); basis.size()];
    initial[target] = Complex64::new(1.0, 0.0);
    let (dt, steps) = default_steps(units, motion, level, config)?;
    let stride = stride_for(steps, config.record_limit);
    let (coarse, fine) = std::thread::scope(|s| {
        let coarse = s.spawn(|| run(units, motion, &basis, target, &initial, dt, steps, stride));
        let fine = run(units, motion, &basis, target, &initial, 0.5 * dt, 2 * steps, 2 * stride);
        (coarse.join().expect("coarse propagation panicked"), fine)
    });
    let (coarse, mut fine) = (coarse?, fine?);
    debug_assert_eq!(coarse.phases.len(), fine.phases.len());
    let mut worst = 0.0f64;
    for (f, c) in fine.phases.iter_mut().zip(&coarse.phases) {
        let correction = (*f - c) / 3.0;
        worst = worst.max(correction.abs());
        *f += correction;
    }
    if worst > config.halving_tolerance {
        return Err(Error::Convergence(format!(
            "step halving moved the phase by {worst:e} rad (tolerance {:e})",
            config.halving_tolerance
        )));
    }
    finish(motion, level, &basis, config, 0.5 * dt, 2 * steps, fine, Some(worst))
}

fn breakdown_at(units: &Units, motion: &WallMotion, level: &LevelIndex, t: f64, total: f64, dynamical: f64) -> Result<PhaseBreakdown> {
    let split = match motion {
        WallMotion::Static { .. } => {
            let rate = -instant_energy(units, motion, level, 0.0)? / units.hbar;
            Some(SecularSplit { rate, periodic: total - rate * t })
        }
        _ => None,
    };
    Ok(PhaseBreakdown { t, dynamical, geometric: total - dynamical, total, split })
}

fn require_adiabatic(result: &PropagationResult) -> Result<()> {
    if result.min_overlap < ADIABATIC_OVERLAP {
        return Err(Error::AdiabaticityViolated { min_overlap: result.min_overlap });
    }
    Ok(())
}

/// Final-time split of the extracted phase: the dynamical part is the
/// quadrature of `E(t)`, the geometric part the remainder.
pub fn phase_split(result: &PropagationResult, units: &Units, motion: &WallMotion, level: &LevelIndex) -> Result<PhaseBreakdown> {
    require_adiabatic(result)?;
    let t = *result.times.last().unwrap_or(&0.0);
    let dynamical = phases::dynamical_phase_quadrature(units, motion, level, t)?;
    breakdown_at(units, motion, level, t, result.final_phase(), dynamical)
}

/// [`phase_split`] at every recorded time, using the closed-form
/// dynamical phase.
pub fn phase_split_series(result: &PropagationResult, units: &Units, motion: &WallMotion, level: &LevelIndex) -> Result<Vec<PhaseBreakdown>> {
    require_adiabatic(result)?;
    result
        .times
        .iter()
        .zip(&result.extracted_total_phase)
        .map(|(&t, &total)| breakdown_at(units, motion, level, t, total, phases::dynamical_phase(units, motion, level, t)?))
        .collect()
}

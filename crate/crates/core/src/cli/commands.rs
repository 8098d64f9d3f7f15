//! The six commands. Each returns after its files are written; summaries
//! go to stdout.

use std::f64::consts::PI;
use std::fmt::Write as _;

use super::config::{FieldGrid, MotionKind};
use super::{write_file, Context, ModeFlag, Outcome};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::phases::{self, GeometricCoefficient, GeometricMode};
use crate::specfun::{self, jl, BesselZeroTable};
use crate::spectra::{self, SidebandOptions, SpectrumOptions};
use crate::tdse::{self, PropagatorConfig};
use crate::wavefield::RadialField;
use crate::wellmodel::{adiabaticity_report, instant_energy, LevelIndex, Units, Verdict, WallMotion};

fn level_tag(level: &LevelIndex) -> String {
    format!("n{}_l{}_m{}", level.n, level.l, level.m)
}

/// Derived quantities follow the oracle unless `printed` is asked for.
fn derived_mode(mode: ModeFlag) -> GeometricMode {
    match mode {
        ModeFlag::Printed => GeometricMode::Printed,
        ModeFlag::Oracle | ModeFlag::Both => GeometricMode::Oracle,
    }
}

fn linspace(t_start: f64, t_end: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(2) - 1;
    (0..=n).map(|i| if i == n { t_end } else { t_start + (t_end - t_start) * i as f64 / n as f64 }).collect()
}

pub fn zeros(ctx: &Context, l_max: u32, n_max: u32) -> Result<Outcome> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let table = BesselZeroTable::new(l_max, n_max)?;
    let mut out = String::from("l,n,beta\n");
    for (l, n, beta) in table.entries() {
        if n <= n_max {
            let _ = writeln!(out, "{l},{n},{}", fmt_f64(beta));
        }
    }
    write_file(&ctx.out.join("zeros.csv"), &out)?;
    println!("wrote {} zeros to {}", (l_max + 1) * n_max, ctx.out.join("zeros.csv").display());
    Ok(Outcome::Success)
}

fn warning_rows(units: &Units, motion: &WallMotion, level: &LevelIndex) -> String {
    let report = adiabaticity_report(units, motion, level);
    let mut out = String::new();
    for (name, ratio) in report.ratios() {
        if ratio.verdict != Verdict::Pass {
            let _ = writeln!(out, "# {}: {name} ratio {} for level {level}", ratio.verdict.as_str(), fmt_f64(ratio.value));
        }
    }
    out
}

/// `t,dynamical,geometric_printed,geometric_oracle,total,ratio` per level.
pub fn phases_table(units: &Units, motion: &WallMotion, level: &LevelIndex, times: &[f64], mode: GeometricMode) -> Result<String> {
    let mut out = warning_rows(units, motion, level);
    out.push_str("t,dynamical,geometric_printed,geometric_oracle,total,ratio\n");
    for &t in times {
        let dynamical = phases::dynamical_phase(units, motion, level, t)?;
        let geo = phases::geometric_phase(units, motion, level, t)?;
        let geometric = geo.pick(mode);
        let total = dynamical + geometric;
        let ratio = if dynamical == 0.0 { 0.0 } else { geometric / dynamical };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(t),
            fmt_f64(dynamical),
            fmt_f64(geo.printed),
            fmt_f64(geo.oracle),
            fmt_f64(total),
            fmt_f64(ratio)
        );
    }
    Ok(out)
}

pub fn phases(ctx: &Context) -> Result<Outcome> {
    let c = &ctx.config;
    let units = c.physical_units();
    let motion = c.wall_motion()?;
    let times = linspace(c.t_start, c.t_end, c.samples);
    for level in c.level_list()? {
        let table = phases_table(&units, &motion, &level, &times, derived_mode(ctx.mode))?;
        let path = ctx.out.join(format!("phases_{}.csv", level_tag(&level)));
        write_file(&path, &table)?;
        println!("wrote {}", path.display());
    }
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    /// Printed form and oracle disagree; reported, not failed.
    Finding,
    Warn,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Finding => "finding",
            Status::Warn => "warn",
        }
    }
}

struct Report {
    rows: String,
    failed: usize,
    findings: usize,
}

impl Report {
    fn new() -> Self {
        Self { rows: String::from("check,level,t,printed,oracle,ratio,deviation,tolerance,status\n"), failed: 0, findings: 0 }
    }

    #[allow(clippy::too_many_arguments)]
    fn row(&mut self, check: &str, level: &LevelIndex, t: f64, printed: f64, oracle: f64, deviation: f64, tolerance: f64, status: Status) {
        let ratio = if oracle == 0.0 { f64::NAN } else { printed / oracle };
        match status {
            Status::Fail => self.failed += 1,
            Status::Finding => self.findings += 1,
            _ => {}
        }
        let _ = writeln!(
            self.rows,
            "{check},{},{},{},{},{},{},{},{}",
            level_tag(level),
            fmt_f64(t),
            fmt_f64(printed),
            fmt_f64(oracle),
            fmt_f64(ratio),
            fmt_f64(deviation),
            fmt_f64(tolerance),
            status.as_str()
        );
    }

    /// Oracle-against-oracle comparison: a miss is a failure.
    fn internal(&mut self, check: &str, level: &LevelIndex, t: f64, a: f64, b: f64, deviation: f64, tolerance: f64) {
        let status = if deviation <= tolerance { Status::Pass } else { Status::Fail };
        self.row(check, level, t, a, b, deviation, tolerance, status);
    }

    /// Printed-against-oracle comparison: a miss is a finding.
    fn printed(&mut self, check: &str, level: &LevelIndex, t: f64, printed: f64, oracle: f64, deviation: f64, tolerance: f64) {
        let status = if deviation <= tolerance { Status::Pass } else { Status::Finding };
        self.row(check, level, t, printed, oracle, deviation, tolerance, status);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
    }
}

fn validate_level(ctx: &Context, units: &Units, motion: &WallMotion, level: &LevelIndex, report: &mut Report) -> Result<()> {
    let c = &ctx.config;
    for (name, ratio) in adiabaticity_report(units, motion, level).ratios() {
        let status = if ratio.verdict == Verdict::Pass { Status::Pass } else { Status::Warn };
        report.row(&format!("adiabaticity_{name}"), level, 0.0, ratio.value, f64::NAN, ratio.value, 0.1, status);
    }

    let li = level.l as i32;
    let (jp, jm) = (jl(li + 1, level.beta), jl(li - 1, level.beta));
    report.internal("zero_identity", level, 0.0, jp, -jm, (jp + jm).abs(), 1e-10);
    report.internal("zero_residual", level, 0.0, jl(li, level.beta), 0.0, jl(li, level.beta).abs(), 1e-12);

    let coeff = GeometricCoefficient::new(level);
    report.printed("bessel_factor_linear", level, 0.0, coeff.ratio_factor, coeff.bessel_factor_oracle, rel(coeff.ratio_factor, coeff.bessel_factor_oracle), 1e-10);
    report.printed("bessel_factor_oscillatory", level, 0.0, coeff.squared_factor, coeff.bessel_factor_oracle, rel(coeff.squared_factor, coeff.bessel_factor_oracle), 1e-10);

    let mut times = linspace(c.t_start, c.t_end, 5);
    if let Some(period) = motion.period() {
        times.extend([0.5 * period, period, 1.5 * period]);
        // the arctan branch point
        times.push(0.5 * period * (1.0 + 1e-6 / PI));
    }
    for &t in &times {
        let closed = phases::dynamical_phase(units, motion, level, t)?;
        let quad = phases::dynamical_phase_quadrature(units, motion, level, t)?;
        report.internal("dynamical_vs_quadrature", level, t, closed, quad, rel(closed, quad), 1e-9);
    }

    if matches!(motion, WallMotion::Static { .. }) {
        let g = phases::geometric_phase(units, motion, level, c.t_end)?;
        report.internal("static_geometric_zero", level, c.t_end, g.printed, g.oracle, g.printed.abs().max(g.oracle.abs()), 0.0);
    } else {
        for &t in &times {
            let ana = phases::berry_connection(units, motion, level, t)?;
            let num = phases::connection_numeric(units, motion, level, t)?;
            let dev = (num.re - ana).abs().max(num.im.abs()) / ana.abs().max(1e-300);
            report.internal("connection_finite_difference", level, t, ana, num.re, dev, 1e-6);
        }
        let ratios: Vec<(f64, f64, f64)> = times
            .iter()
            .filter(|&&t| t != 0.0 && motion.raw_radius(t) != motion.a0())
            .map(|&t| phases::geometric_phase(units, motion, level, t).map(|g| (t, g.printed, g.oracle)))
            .collect::<Result<_>>()?;
        if let Some(&(t0, p0, o0)) = ratios.first() {
            let r0 = p0 / o0;
            let spread = ratios.iter().map(|&(_, p, o)| rel(p / o, r0)).fold(0.0, f64::max);
            report.printed("geometric_ratio_constant_in_t", level, t0, p0, o0, spread, 1e-6);
            report.printed("geometric_coefficient", level, t0, p0, o0, rel(p0, o0), 1e-6);
        }
        if let WallMotion::Oscillatory { .. } = motion {
            let eps = phases::epsilon(units, motion, level)?;
            report.printed("epsilon", level, 0.0, eps.printed, eps.oracle, rel(eps.printed, eps.oracle), 1e-6);
            let cycle = phases::berry_phase_cycle(units, motion, level)?;
            report.printed("berry_phase_cycle", level, motion.period().unwrap_or(0.0), cycle.printed, cycle.oracle, rel(cycle.printed, cycle.oracle), 1e-6);
        }
    }

    if c.validate_tdse {
        validate_tdse(ctx, units, motion, level, report)?;
    }
    Ok(())
}

fn propagator_config(ctx: &Context, t_final: f64) -> PropagatorConfig {
    let c = &ctx.config;
    PropagatorConfig {
        grid_points: c.grid_points,
        basis_size: c.basis_size,
        dt: c.dt,
        t_final,
        record_limit: c.record_limit,
        halving_tolerance: c.halving_tolerance,
    }
}

fn validate_tdse(ctx: &Context, units: &Units, motion: &WallMotion, level: &LevelIndex, report: &mut Report) -> Result<()> {
    // whole periods for the oscillating wall
    let t_final = match motion.period() {
        Some(p) => p * (ctx.config.t_final / p).floor().max(1.0),
        None => ctx.config.t_final,
    };
    let cfg = propagator_config(ctx, t_final);
    let run = tdse::propagate_extrapolated(units, motion, level, &cfg)?;
    report.internal("tdse_norm_drift", level, t_final, run.max_norm_drift, 0.0, run.max_norm_drift, 1e-9);
    let split = match tdse::phase_split(&run, units, motion, level) {
        Ok(s) => s,
        Err(Error::AdiabaticityViolated { min_overlap }) => {
            report.row("tdse_adiabatic_overlap", level, t_final, min_overlap, tdse::ADIABATIC_OVERLAP, min_overlap, tdse::ADIABATIC_OVERLAP, Status::Warn);
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    match *motion {
        WallMotion::Static { .. } => {
            let exact = -instant_energy(units, motion, level, 0.0)? * t_final / units.hbar;
            report.internal("tdse_static_total_phase", level, t_final, split.total, exact, (split.total - exact).abs(), 1e-6);
        }
        WallMotion::Linear { .. } => {
            let oracle = phases::berry_connection_quadrature(units, motion, level, t_final)?;
            report.internal("tdse_geometric_linear", level, t_final, split.geometric, oracle, rel(split.geometric, oracle), 0.05);
            let printed = phases::geometric_phase_linear(units, motion, level, t_final)?.printed;
            report.printed("tdse_vs_printed_linear", level, t_final, printed, split.geometric, rel(printed, split.geometric), 0.05);
        }
        WallMotion::Oscillatory { .. } => {
            let periods = (t_final / motion.period().unwrap_or(t_final)).round().max(1.0);
            let per_cycle = split.geometric / periods;
            let cycle = phases::berry_phase_cycle(units, motion, level)?;
            let dev = (per_cycle - cycle.oracle).abs();
            let tol = (0.1 * cycle.oracle.abs()).max(1e-4);
            report.internal("tdse_berry_cycle", level, t_final, per_cycle, cycle.oracle, dev, tol);
            let pdev = (per_cycle - cycle.printed).abs();
            report.printed("tdse_vs_printed_cycle", level, t_final, cycle.printed, per_cycle, pdev, (0.1 * cycle.printed.abs()).max(1e-4));
        }
    }
    Ok(())
}

pub fn validate(ctx: &Context) -> Result<Outcome> {
    let units = ctx.config.physical_units();
    let motion = ctx.config.wall_motion()?;
    let mut report = Report::new();
    for level in ctx.config.level_list()? {
        validate_level(ctx, &units, &motion, &level, &mut report)?;
    }
    // special-function invariants underneath everything else
    let worst = (0..=10)
        .flat_map(|l| (1..=200).map(move |i| (l, i as f64 * 0.5)))
        .map(|(l, x)| {
            let (a, b, c) = (jl(l - 1, x), jl(l, x), jl(l + 1, x));
            (a + c - (2 * l + 1) as f64 * b / x).abs() / a.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let probe = LevelIndex::new(1, 0, 0)?;
    report.internal("bessel_recurrence", &probe, 0.0, worst, 0.0, worst, 1e-10);
    let anti = specfun::x4jl2_integral(0, PI);
    let exact = PI.powi(3) / 6.0 - PI / 4.0;
    report.internal("x4jl2_antiderivative", &probe, 0.0, anti, exact, rel(anti, exact), 1e-12);

    let path = ctx.out.join("validate.csv");
    write_file(&path, &report.rows)?;
    println!("wrote {}: {} failed, {} findings", path.display(), report.failed, report.findings);
    Ok(if report.failed == 0 { Outcome::Success } else { Outcome::Inconsistent })
}

pub fn spectrum(ctx: &Context) -> Result<Outcome> {
    let c = &ctx.config;
    let units = c.physical_units();
    let motion = c.wall_motion()?;
    if c.motion == MotionKind::Linear {
        return Err(Error::InvalidMotion("spectrum needs a static or oscillating wall".into()));
    }
    let (initial, final_) = c.transition()?;
    let lines_path = ctx.out.join("spectrum_lines.csv");
    let broad_path = ctx.out.join("spectrum_broadened.csv");
    if !spectra::allowed(&initial, &final_) {
        write_file(&lines_path, &format!("{},omega_ph_eps_off,eps_shift\n", spectra::LINES_HEADER))?;
        write_file(&broad_path, "omega_ph,intensity\n")?;
        println!("transition {initial} -> {final_} is dipole forbidden; spectrum is empty");
        return Ok(Outcome::Success);
    }
    let sidebands = SidebandOptions { samples: c.sideband_samples, reference: c.reference, mode: derived_mode(ctx.mode) };
    let k_max = match c.k_max {
        Some(k) => k,
        None => spectra::minimum_order(&units, &motion, &initial, &final_, &sidebands)?,
    };
    let eps = match (c.eps_mode(), ctx.mode) {
        (None, _) => None,
        (Some(m), ModeFlag::Both) => Some(m),
        (Some(_), flag) => Some(derived_mode(flag)),
    };
    let opts = SpectrumOptions { sidebands, eps, k_max: Some(k_max), field_amplitude: c.field_amplitude };
    let lines = spectra::transition_rate(&units, &motion, &initial, &final_, &opts)?;
    let reference = spectra::transition_rate(&units, &motion, &initial, &final_, &SpectrumOptions { eps: None, ..opts })?;
    write_file(&lines_path, &spectra::lines_with_shift_to_csv(&lines, &reference))?;
    let grid = linspace(c.omega_min, c.omega_max, c.omega_points);
    let intensity = spectra::broadened_spectrum(&lines, c.linewidth, &grid)?;
    write_file(&broad_path, &spectra::broadened_to_csv(&grid, &intensity))?;
    println!("wrote {} lines (K = {k_max}) to {}", lines.len(), lines_path.display());
    Ok(Outcome::Success)
}

pub fn propagate(ctx: &Context) -> Result<Outcome> {
    let c = &ctx.config;
    let units = c.physical_units();
    let motion = c.wall_motion()?;
    let cfg = propagator_config(ctx, c.t_final);
    let mut summary = String::from("n,l,m,t_final,total,dynamical,geometric,geometric_oracle,min_overlap,max_norm_drift,phase_error_estimate\n");
    for level in c.level_list()? {
        let run = if c.richardson { tdse::propagate_extrapolated(&units, &motion, &level, &cfg)? } else { tdse::propagate(&units, &motion, &level, &cfg)? };
        let path = ctx.out.join(format!("propagate_{}.csv", level_tag(&level)));
        write_file(&path, &run.to_csv())?;
        let split = tdse::phase_split(&run, &units, &motion, &level)?;
        let oracle = phases::berry_connection_quadrature(&units, &motion, &level, c.t_final)?;
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{},{},{}",
            level.n,
            level.l,
            level.m,
            fmt_f64(c.t_final),
            fmt_f64(split.total),
            fmt_f64(split.dynamical),
            fmt_f64(split.geometric),
            fmt_f64(oracle),
            fmt_f64(run.min_overlap),
            fmt_f64(run.max_norm_drift),
            fmt_f64(run.phase_error_estimate.unwrap_or(f64::NAN))
        );
        println!("wrote {}", path.display());
    }
    write_file(&ctx.out.join("propagate_summary.csv"), &summary)?;
    Ok(Outcome::Success)
}

pub fn field_dump(ctx: &Context) -> Result<Outcome> {
    let c = &ctx.config;
    let units = c.physical_units();
    let motion = c.wall_motion()?;
    for level in c.level_list()? {
        for (i, &t) in c.field_times.iter().enumerate() {
            let field = match c.field_grid {
                FieldGrid::Gauss => RadialField::gauss(&units, &motion, &level, t, c.field_points)?,
                FieldGrid::Uniform => RadialField::uniform(&units, &motion, &level, t, c.field_points)?,
            };
            let path = ctx.out.join(format!("field_{}_t{i}.csv", level_tag(&level)));
            write_file(&path, &field.to_csv())?;
            println!("wrote {} (t = {t}, norm {})", path.display(), field.norm());
        }
    }
    Ok(Outcome::Success)
}

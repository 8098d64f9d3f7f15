//! Spherical Bessel functions of the first kind, their positive zeros,
//! Gauss–Legendre quadrature and the closed-form antiderivative of
//! `x^4 j_l(x)^2`.
//!
//! Orders down to `l = -1` are accepted, with `j_{-1}(x) = cos(x)/x`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Below this argument the power series is used.
const SERIES_CUTOFF: f64 = 1.0;

/// Spherical Bessel function `j_l(x)` for `l >= -1`, `x >= 0`.
pub fn sph_bessel_j(l: i32, x: f64) -> Result<f64> {
    if l < -1 {
        return Err(Error::Domain(format!("spherical Bessel order {l} < -1")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("spherical Bessel argument {x} must be finite and >= 0")));
    }
    Ok(jl(l, x))
}

/// Unchecked evaluation used on hot paths. Negative arguments use the
/// parity `j_l(-x) = (-1)^l j_l(x)`.
pub(crate) fn jl(l: i32, x: f64) -> f64 {
    debug_assert!(l >= -1);
    if x < 0.0 {
        let v = jl(l, -x);
        return if l.rem_euclid(2) == 0 { v } else { -v };
    }
    if l == -1 {
        return x.cos() / x;
    }
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_CUTOFF {
        return series(l as u32, x);
    }
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    let j1 = (j0 - x.cos()) / x;
    if l == 1 {
        return j1;
    }
    if x >= l as f64 {
        upward(l as u32, x, j0, j1)
    } else {
        miller(l as u32, x, j0, j1)
    }
}

fn series(l: u32, x: f64) -> f64 {
    let mut pre = 1.0;
    for k in 1..=l {
        pre *= x / (2 * k + 1) as f64;
    }
    let y = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40u32 {
        term *= y / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    pre * sum
}

fn upward(l: u32, x: f64, j0: f64, j1: f64) -> f64 {
    let (mut prev, mut cur) = (j0, j1);
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn miller(l: u32, x: f64, j0: f64, j1: f64) -> f64 {
    let start = l + 40 + x as u32;
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut at_l = 0.0;
    let mut at_1 = 0.0;
    let mut k = start;
    while k > 0 {
        // cur holds f_k, above holds f_{k+1}
        let below = (2 * k + 1) as f64 / x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if k == l {
            at_l = cur;
        }
        if k == 1 {
            at_1 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            at_l *= 1e-250;
            at_1 *= 1e-250;
        }
    }
    let at_0 = cur;
    let scale = if j0.abs() >= j1.abs() { j0 / at_0 } else { j1 / at_1 };
    at_l * scale
}

/// Derivative `j_l'(x) = j_{l-1}(x) - (l+1)/x j_l(x)`, `l >= 0`, `x > 0`.
pub(crate) fn jl_prime(l: i32, x: f64) -> f64 {
    jl(l - 1, x) - (l + 1) as f64 / x * jl(l, x)
}

/// Positive zeros `beta_{n,l}` of `j_l`, tabulated for `l <= l_max`,
/// `n <= n_max`. Immutable once built.
#[derive(Debug, Clone)]
pub struct BesselZeroTable {
    l_max: u32,
    n_max: u32,
    // zeros[l][n - 1]; row l holds n_max + (l_max - l) entries
    zeros: Vec<Vec<f64>>,
}

impl BesselZeroTable {
    pub fn new(l_max: u32, n_max: u32) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Domain("zero table needs n_max >= 1".into()));
        }
        let mut zeros: Vec<Vec<f64>> = Vec::with_capacity(l_max as usize + 1);
        let count0 = (n_max + l_max) as usize;
        zeros.push((1..=count0).map(|n| n as f64 * PI).collect());
        for l in 1..=l_max {
            let lower = &zeros[l as usize - 1];
            let count = (n_max + l_max - l) as usize;
            let row = (0..count)
                .map(|i| refine_zero(l as i32, lower[i], lower[i + 1]))
                .collect::<Vec<_>>();
            zeros.push(row);
        }
        Ok(Self { l_max, n_max, zeros })
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// `beta_{n,l}`, or `None` outside the tabulated range.
    pub fn get(&self, l: u32, n: u32) -> Option<f64> {
        if l > self.l_max || n == 0 || n > self.n_max {
            return None;
        }
        Some(self.zeros[l as usize][n as usize - 1])
    }

    /// Rows of `(l, n, beta)` in `l`-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..=self.l_max).flat_map(move |l| (1..=self.n_max).map(move |n| (l, n, self.zeros[l as usize][n as usize - 1])))
    }
}

/// Bisection to 1e-13 inside an interlacing bracket, then two Newton steps.
fn refine_zero(l: i32, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut fa = jl(l, a);
    while b - a > 1e-13 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = jl(l, m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let step = jl(l, x) / jl_prime(l, x);
        let next = x - step;
        if next > lo && next < hi && step.is_finite() {
            x = next;
        }
    }
    x
}

/// The `n`-th positive zero of `j_l`.
pub fn bessel_zero(l: u32, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("zero index n must be >= 1".into()));
    }
    if l == 0 {
        return Ok(n as f64 * PI);
    }
    let table = BesselZeroTable::new(l, n)?;
    Ok(table.get(l, n).expect("requested entry is inside the table"))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared, lazily built rule of the given order.
    pub fn cached(order: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard.entry(order).or_insert_with(|| Arc::new(GaussLegendre::new(order))).clone()
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre estimate of `∫_lo^hi f`.
pub fn quad_gl<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, order: usize) -> f64 {
    GaussLegendre::cached(order).integrate(lo, hi, f)
}

/// Settings for the order-doubling quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub start_order: usize,
    pub max_order: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-12, start_order: 16, max_order: 4096 }
    }
}

/// Doubles the Gauss–Legendre order until successive estimates agree to
/// `rel_tol` relative to `max(|I|, ∫|f|)`.
pub fn quad_adaptive<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    quad_adaptive_with(f, lo, hi, QuadSettings::default())
}

pub fn quad_adaptive_with<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, settings: QuadSettings) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    let mut order = settings.start_order.max(1);
    let estimate = |order: usize, f: &mut F| -> (f64, f64) {
        let rule = GaussLegendre::cached(order);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (x, w) in rule.mapped(lo, hi) {
            let v = f(x);
            sum += w * v;
            abs += (w * v).abs();
        }
        (sum, abs)
    };
    let (mut prev, _) = estimate(order, &mut f);
    loop {
        let next_order = order * 2;
        if next_order > settings.max_order {
            return Err(Error::QuadratureFailure { order, estimate: prev, change: f64::NAN });
        }
        let (cur, abs) = estimate(next_order, &mut f);
        let change = (cur - prev).abs();
        if !cur.is_finite() {
            return Err(Error::QuadratureFailure { order: next_order, estimate: cur, change });
        }
        if change <= settings.rel_tol * cur.abs().max(abs) {
            return Ok(cur);
        }
        if next_order * 2 > settings.max_order {
            return Err(Error::QuadratureFailure { order: next_order, estimate: cur, change });
        }
        prev = cur;
        order = next_order;
    }
}

/// Sum of adaptive estimates over `panels` equal sub-intervals; suited to
/// long oscillatory ranges.
pub fn quad_panels<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, panels: usize) -> Result<f64> {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let a = lo + i as f64 * h;
        let b = if i + 1 == panels { hi } else { a + h };
        total += quad_adaptive(&mut f, a, b)?;
    }
    Ok(total)
}

/// `∫_0^x t^4 j_l(t)^2 dt` through the closed Bessel-form antiderivative
/// (which vanishes at `0+`).
pub fn x4jl2_integral(l: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 0.05 {
        return x4jl2_series(l, x);
    }
    let lf = l as f64;
    let li = l as i32;
    let jm = jl(li - 1, x);
    let j = jl(li, x);
    let x2 = x * x;
    let x3 = x2 * x;
    ((-2.0 * lf - 3.0) * x2 * (4.0 * lf * lf + 2.0 * x2 - 1.0) * jm * j
        + x3 * (4.0 * lf * lf + 8.0 * lf + 2.0 * x2 + 3.0) * j * j
        + x3 * (4.0 * lf * lf + 4.0 * lf + 2.0 * x2 - 3.0) * jm * jm)
        / 12.0
}

/// Small-argument series: the closed form cancels catastrophically near 0.
fn x4jl2_series(l: u32, x: f64) -> f64 {
    // j_l(t) = t^l/(2l+1)!! * sum_k c_k t^{2k}
    let mut c = [0.0f64; 4];
    c[0] = 1.0;
    for k in 1..4 {
        c[k] = -c[k - 1] / (2.0 * k as f64 * (2 * l + 2 * k as u32 + 1) as f64);
    }
    let mut dfact = 1.0;
    for k in 1..=l {
        dfact *= (2 * k + 1) as f64;
    }
    let mut sum = 0.0;
    for p in 0..4 {
        let mut coef = 0.0;
        for i in 0..=p {
            coef += c[i] * c[p - i];
        }
        let power = (2 * l + 5 + 2 * p as u32) as i32;
        sum += coef * x.powi(power) / power as f64;
    }
    sum / (dfact * dfact)
}

/// Mean of `ξ²` in the normalized radial state `(n, l)`:
/// `2∫_0^1 ξ^4 j_l(βξ)^2 dξ / j_{l+1}(β)^2`.
pub fn xi2_mean(l: u32, beta: f64) -> f64 {
    let norm = jl(l as i32 + 1, beta);
    2.0 * x4jl2_integral(l, beta) / (beta.powi(5) * norm * norm)
}

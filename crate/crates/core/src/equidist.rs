//! Cusp cross-section averages `m_q(f)`, the Haar average `m(f)`, the Mellin
//! transform `M(f, s)`, and the two experiments built on them: the decay
//! exponent of `|m_q(f) - m(f)|` and the growth of `M(f, s)` on vertical lines.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::eisenstein::{orbifold_volume, rankin_selberg_constant, FourierEvaluator, DEFAULT_FOURIER_CUTOFF};
use crate::error::{Error, Result};
use crate::fields::FieldData;
use crate::geometry::{act, for_each_pair, CoordFrame, Cusp, LocalCoords, Point};
use crate::quadrature::{smooth_step, GaussLegendre, PairwiseAcc, PairwiseAccC};

/// Shape of the shoulders of a bump profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "order")]
pub enum Ramp {
    /// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`, `C^infinity`.
    Exp,
    /// Polynomial smoothstep of degree `2k + 1`, `C^k`.
    Poly(u32),
}

impl Ramp {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Ramp::Exp => smooth_step(t),
            Ramp::Poly(k) => poly_smoothstep(k, t),
        }
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `S_k(t) = t^{k+1} sum_{j=0}^{k} C(k+j, j) C(2k+1, k-j) (-t)^j` on `[0, 1]`.
fn poly_smoothstep(k: u32, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 0..=k {
        sum += binom(k + j, j) * binom(2 * k + 1, k - j) * (-t).powi(j as i32);
    }
    t.powi(k as i32 + 1) * sum
}

/// Plateau bump `psi(q) = scale B((q - T0)/w) B((T1 - q)/w)` on `[T0, T1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpProfile {
    pub t0: f64,
    pub t1: f64,
    pub width: f64,
    pub scale: f64,
    pub ramp: Ramp,
}

impl Default for BumpProfile {
    fn default() -> Self {
        BumpProfile::standard()
    }
}

impl BumpProfile {
    /// Support `[2, 4]`, shoulders of width `1/2`, plateau `[2.5, 3.5]` at height 1.
    pub fn standard() -> Self {
        BumpProfile { t0: 2.0, t1: 4.0, width: 0.5, scale: 1.0, ramp: Ramp::Exp }
    }

    pub fn eval(&self, q: f64) -> f64 {
        if q <= self.t0 || q >= self.t1 {
            return 0.0;
        }
        self.scale * self.ramp.eval((q - self.t0) / self.width) * self.ramp.eval((self.t1 - q) / self.width)
    }

    /// `int psi(q) q^{-u-1} dq` (so `u = 1` gives `int psi q^{-2} dq`).
    pub fn mellin(&self, u: Complex64) -> Complex64 {
        let gl = GaussLegendre::new(24);
        let breaks = [self.t0, self.t0 + self.width, self.t1 - self.width, self.t1];
        let mut acc = PairwiseAccC::new();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                acc.add(gl.composite_c(w[0], w[1], 8, |q| (-(u + 1.0) * q.ln()).exp() * self.eval(q)));
            }
        }
        acc.total()
    }
}

/// `f(z) = sum_{gamma in Gamma_lambda \ Gamma} psi(mu(lambda, gamma z))`.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub cusp: Cusp,
    pub profile: BumpProfile,
}

/// Upper bound for `l1` with class number one: two distinct cusps never both
/// have height above 1 at the same point.
pub const L1_BOUND: f64 = 1.0;

impl TestFunction {
    pub fn new(cusp: Cusp, profile: BumpProfile) -> Result<Self> {
        let p = &profile;
        if !(p.t0 > L1_BOUND && p.t1 > p.t0 && p.width > 0.0 && p.scale.is_finite()) {
            return Err(Error::InvalidInput(format!("need l1 = {L1_BOUND} < T0 < T1 and width > 0, got {p:?}")));
        }
        if 4.0 * p.width > p.t1 - p.t0 + 1e-12 {
            return Err(Error::InvalidInput("plateau must cover at least half the support".into()));
        }
        Ok(TestFunction { cusp, profile })
    }

    pub fn standard(field: &FieldData) -> Self {
        TestFunction { cusp: Cusp::infinity(field), profile: BumpProfile::standard() }
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut g = self.clone();
        g.profile.scale *= k;
        g
    }
}

/// `f` at a point already moved by `A^{-1}`.
fn eval_star(field: &FieldData, f: &TestFunction, z: &Point) -> Result<f64> {
    let p = &f.profile;
    if p.scale == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for_each_pair(field, z, 1.0 / p.t0, |_, _, mu| acc += p.eval(mu))?;
    Ok(acc)
}

pub fn eval_test_function(f: &TestFunction, z: &Point, field: &FieldData) -> Result<f64> {
    if f.cusp.is_infinity() {
        eval_star(field, f, z)
    } else {
        eval_star(field, f, &act(field, &f.cusp.assoc.inverse(), z))
    }
}

/// Slice grid at height `q` over the `(X, Y)` box at the cusp `infinity`:
/// `nodes` points per dimension at `-1/2 + j / nodes`. When `odd_only` is set
/// only points with some odd index are visited (the nodes new at this level).
fn slice_sum(
    field: &FieldData,
    f: &TestFunction,
    frame: &CoordFrame,
    q: f64,
    nodes: usize,
    odd_only: bool,
) -> Result<f64> {
    let dims = field.degree + field.unit_rank();
    let total = nodes.pow(dims as u32);
    let mut acc = PairwiseAcc::new();
    let mut idx = vec![0usize; dims];
    let mut v = vec![0.0; dims];
    for flat in 0..total {
        let mut rest = flat;
        for i in 0..dims {
            idx[i] = rest % nodes;
            rest /= nodes;
        }
        if odd_only && idx.iter().all(|i| i % 2 == 0) {
            continue;
        }
        for i in 0..dims {
            v[i] = -0.5 + idx[i] as f64 / nodes as f64;
        }
        let lc = LocalCoords { q, x_coords: v[..field.degree].to_vec(), y_coords: v[field.degree..].to_vec() };
        let z = frame.from_local_coords(&lc);
        acc.add(eval_star(field, f, &z)?);
    }
    Ok(acc.total())
}

/// `m(f, q)`: the average of `f` over the cross section at height `q`, by the
/// periodic trapezoid rule with `nodes` points per dimension.
pub fn cusp_section_average(f: &TestFunction, q: f64, field: &FieldData, nodes: usize) -> Result<f64> {
    if !(q > 0.0) || nodes == 0 {
        return Err(Error::InvalidInput("need q > 0 and nodes > 0".into()));
    }
    let frame = CoordFrame::new(field, &Cusp::infinity(field))?;
    let dims = field.degree + field.unit_rank();
    Ok(slice_sum(field, f, &frame, q, nodes, false)? / nodes.pow(dims as u32) as f64)
}

/// Result of an adaptive slice average.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceAverage {
    pub value: f64,
    /// Nodes per dimension at the final level.
    pub nodes: usize,
    /// `|I_N - I_{N/2}|`, an over-estimate of the error of `I_N` once converged.
    pub error_estimate: f64,
}

/// Doubles the per-dimension node count from `start` until
/// `|I_N - I_{N/2}| <= tol(I_N)` holds at two successive levels; each level
/// reuses the previous nodes.
pub fn cusp_section_average_adaptive<T: Fn(f64) -> f64>(
    f: &TestFunction,
    q: f64,
    field: &FieldData,
    start: usize,
    max_nodes: usize,
    tol: T,
) -> Result<SliceAverage> {
    if !(q > 0.0) {
        return Err(Error::InvalidInput("need q > 0".into()));
    }
    let frame = CoordFrame::new(field, &Cusp::infinity(field))?;
    let dims = field.degree + field.unit_rank() as usize;
    let mut n = start.max(1);
    let mut sum = slice_sum(field, f, &frame, q, n, false)?;
    let mut prev = sum / n.pow(dims as u32) as f64;
    // two consecutive agreements guard against accidental near-equality
    let mut passed = false;
    loop {
        let n2 = 2 * n;
        if n2 > max_nodes {
            return Err(Error::QuadratureBudgetExceeded(n2));
        }
        sum += slice_sum(field, f, &frame, q, n2, true)?;
        let cur = sum / n2.pow(dims as u32) as f64;
        let err = (cur - prev).abs();
        n = n2;
        if err <= tol(cur) {
            if passed {
                return Ok(SliceAverage { value: cur, nodes: n, error_estimate: err });
            }
            passed = true;
        } else {
            passed = false;
        }
        prev = cur;
    }
}

/// `m(f) = vol(M)^{-1} C int psi(q) q^{-2} dq`.
pub fn haar_average(f: &TestFunction, field: &FieldData) -> Result<f64> {
    let c = rankin_selberg_constant(field);
    Ok(c * f.profile.mellin(Complex64::new(1.0, 0.0)).re / orbifold_volume(field)?)
}

/// `vol(M)^{-1} int_F f dx dy / y^2` over the classical fundamental domain of
/// `SL(2, Z)`, with `f` summed over its translates at every node.
pub fn haar_average_rational_numeric(f: &TestFunction) -> Result<f64> {
    let q = crate::fields::make_field(0)?;
    let top = f.profile.t1 + 0.5;
    let split = f.profile.t0.max(1.5);
    let int = crate::eisenstein::integrate_rational_domain(split, top, 24, |x, y| {
        let z = Point { coords: vec![crate::geometry::PlaceCoord::real(x, y)] };
        Ok(Complex64::new(eval_test_function(f, &z, &q)?, 0.0))
    })?;
    Ok(int.re / orbifold_volume(&q)?)
}

/// How to evaluate `M(f, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MellinRoute {
    /// `int_0^infinity m(f, q) q^{s-2} dq` from slice averages (`Re s > 1`).
    Slices,
    /// `C^{-1} int_M E(z, s) f(z) dv`, unfolded through `f` onto the cusp box
    /// and evaluated with the Fourier expansion of `E`.
    RankinSelberg,
}

/// Settings for the slice route of the Mellin transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MellinSlices {
    /// Slices run from `q_min` up to `1 / T0`; below `q_min`, `m(f, q)` is
    /// replaced by `m(f)`.
    pub q_min: f64,
    /// Gauss-Legendre nodes per octave in `log q`.
    pub nodes_per_octave: usize,
    /// Slice tolerance, scaled by `q^{1 - Re s}` at height `q`.
    pub slice_tol: f64,
    pub max_nodes: usize,
}

impl MellinSlices {
    pub fn for_field(field: &FieldData) -> Self {
        if field.degree == 1 {
            MellinSlices { q_min: 2f64.powi(-10), nodes_per_octave: 32, slice_tol: 1e-8, max_nodes: 1 << 22 }
        } else {
            MellinSlices { q_min: 2f64.powi(-6), nodes_per_octave: 4, slice_tol: 2e-4, max_nodes: 1024 }
        }
    }
}

/// Box nodes per dimension for the Rankin-Selberg route.
pub const RS_BOX_NODES: usize = 8;

/// `M(f, s) = int_0^infinity m(f, q) q^{s-1} dq / q`.
pub fn mellin_transform(f: &TestFunction, s: Complex64, field: &FieldData, route: MellinRoute) -> Result<Complex64> {
    match route {
        MellinRoute::Slices => mellin_slices(f, s, field, &MellinSlices::for_field(field)),
        MellinRoute::RankinSelberg => mellin_rankin_selberg(f, s, field),
    }
}

pub fn mellin_slices(f: &TestFunction, s: Complex64, field: &FieldData, opts: &MellinSlices) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::PoleAtOne);
    }
    if s.re <= 1.0 {
        return Err(Error::NotConvergent("the slice route needs Re s > 1".into()));
    }
    let p = &f.profile;
    if p.scale == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // above 1/T0 only the identity term reaches T0: m(f, q) = psi(q)
    let q_top = 1.0 / p.t0;
    let upper = p.mellin(1.0 - s);
    let m = haar_average(f, field)?;
    let tail = m * (s - 1.0).powi(-1) * ((s - 1.0) * opts.q_min.ln()).exp();
    let octaves = (q_top / opts.q_min).log2().ceil() as usize;
    let gl = GaussLegendre::new(opts.nodes_per_octave);
    let (la, lb) = (opts.q_min.ln(), q_top.ln());
    let h = (lb - la) / octaves as f64;
    let mut acc = PairwiseAccC::new();
    for k in 0..octaves {
        for (lq, w) in gl.on(la + k as f64 * h, la + (k + 1) as f64 * h) {
            let q = lq.exp();
            // the slice enters with weight q^{Re s - 1}
            let tol = opts.slice_tol * q.powf(1.0 - s.re);
            let start = if field.degree == 1 { 64 } else { 8 };
            let avg = cusp_section_average_adaptive(f, q, field, start, opts.max_nodes, |_| tol)?;
            // dq / q = d log q
            acc.add(((s - 1.0) * lq).exp() * (avg.value * w));
        }
    }
    Ok(upper + tail + acc.total())
}

/// Box average of `E(., s)` on the slice at height `q`, from the Fourier
/// expansion on a periodic grid.
fn box_average_e(ev: &mut FourierEvaluator, field: &FieldData, frame: &CoordFrame, q: f64) -> Result<Complex64> {
    let dims = field.degree + field.unit_rank();
    let n = RS_BOX_NODES;
    let total = n.pow(dims as u32);
    let mut acc = PairwiseAccC::new();
    for flat in 0..total {
        let mut rest = flat;
        let mut v = Vec::with_capacity(dims);
        for _ in 0..dims {
            v.push(-0.5 + (rest % n) as f64 / n as f64);
            rest /= n;
        }
        let lc = LocalCoords { q, x_coords: v[..field.degree].to_vec(), y_coords: v[field.degree..].to_vec() };
        acc.add(ev.eval(&frame.from_local_coords(&lc))?);
    }
    Ok(acc.total() / total as f64)
}

/// `C^{-1} int_M E(z, s) f(z) dv = int psi(q) q^{-2} <E(., s)>_q dq`.
pub fn mellin_rankin_selberg(f: &TestFunction, s: Complex64, field: &FieldData) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::PoleAtOne);
    }
    let p = &f.profile;
    if p.scale == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let frame = CoordFrame::new(field, &Cusp::infinity(field))?;
    let mut ev = FourierEvaluator::new(field, s, DEFAULT_FOURIER_CUTOFF)?;
    let gl = GaussLegendre::new(16);
    let breaks = [p.t0, p.t0 + p.width, p.t1 - p.width, p.t1];
    let mut acc = PairwiseAccC::new();
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let panels = 4;
        let h = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            for (q, wq) in gl.on(w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h) {
                let psi = p.eval(q);
                if psi == 0.0 {
                    continue;
                }
                acc.add(box_average_e(&mut ev, field, &frame, q)? * (wq * psi / (q * q)));
            }
        }
    }
    Ok(acc.total())
}

/// Outcome of the decay-exponent experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub field_d: i64,
    pub ks: Vec<i32>,
    /// `q_k = 2^{-k}`, strictly decreasing.
    pub q_grid: Vec<f64>,
    pub m_q: Vec<f64>,
    pub m: f64,
    /// `e(q) = |m(f, q) - m(f)|`.
    pub errors: Vec<f64>,
    /// Nodes per dimension used at each grid point.
    pub nodes: Vec<usize>,
    pub quadrature_errors: Vec<f64>,
    /// Least-squares slope of `log e` against `log q` over the fitted points.
    pub fitted_slope: Option<f64>,
    pub intercept: Option<f64>,
    /// 95% confidence interval from Student's t.
    pub slope_ci: Option<(f64, f64)>,
    pub residuals: Vec<f64>,
    /// Indices into the grid used by the fit (the first two points are dropped).
    pub fitted_indices: Vec<usize>,
    pub degenerate: bool,
    /// Unconditional exponent and the exponent equivalent to RH for `zeta_K`.
    pub markers: (f64, f64),
    pub runtime_seconds: f64,
}

/// Least-squares line `y = a + b x`; returns `(b, a, ci_half_width, residuals)`.
pub fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64, Vec<f64>)> {
    let n = x.len();
    if n < 3 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res: Vec<f64> = x.iter().zip(y).map(|(u, v)| v - (a + b * u)).collect();
    let s2 = res.iter().map(|r| r * r).sum::<f64>() / (n - 2) as f64;
    let se = (s2 / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 2) as f64).ok()?.inverse_cdf(0.975);
    Some((b, a, t * se, res))
}

/// Refinement settings for [`decay_exponent_fit`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayOptions {
    /// Slices are refined until the level difference is below `rel_tol e(q)`.
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Cap on nodes per dimension.
    pub max_nodes: usize,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions { rel_tol: 0.01, abs_floor: 1e-12, max_nodes: 1 << 22 }
    }
}

/// Measures `e(q) = |m(f, q) - m(f)|` on `q_k = 2^{-k}` and fits its decay
/// exponent.
pub fn decay_exponent_fit(
    f: &TestFunction,
    field: &FieldData,
    k_min: i32,
    k_max: i32,
    opts: &DecayOptions,
) -> Result<ExperimentReport> {
    if k_max < k_min {
        return Err(Error::InvalidInput("k_max < k_min".into()));
    }
    let start = Instant::now();
    let m = haar_average(f, field)?;
    let ks: Vec<i32> = (k_min..=k_max).collect();
    let mut q_grid = Vec::new();
    let mut m_q = Vec::new();
    let mut errors = Vec::new();
    let mut nodes = Vec::new();
    let mut qerr = Vec::new();
    let start_nodes = if field.degree == 1 { 64 } else { 8 };
    for &k in &ks {
        let q = 2f64.powi(-k);
        let avg = cusp_section_average_adaptive(f, q, field, start_nodes, opts.max_nodes, |v| {
            (opts.rel_tol * (v - m).abs()).max(opts.abs_floor)
        })?;
        q_grid.push(q);
        m_q.push(avg.value);
        errors.push((avg.value - m).abs());
        nodes.push(avg.nodes);
        qerr.push(avg.error_estimate);
    }
    let fitted_indices: Vec<usize> = (2..ks.len()).filter(|&i| errors[i] > 0.0).collect();
    let x: Vec<f64> = fitted_indices.iter().map(|&i| q_grid[i].ln()).collect();
    let y: Vec<f64> = fitted_indices.iter().map(|&i| errors[i].ln()).collect();
    let fit = ols(&x, &y);
    let degenerate = fit.is_none();
    let (fitted_slope, intercept, slope_ci, residuals) = match fit {
        Some((b, a, hw, res)) => (Some(b), Some(a), Some((b - hw, b + hw)), res),
        None => (None, None, None, Vec::new()),
    };
    Ok(ExperimentReport {
        field_d: field.d,
        ks,
        q_grid,
        m_q,
        m,
        errors,
        nodes,
        quadrature_errors: qerr,
        fitted_slope,
        intercept,
        slope_ci,
        residuals,
        fitted_indices,
        degenerate,
        markers: (0.5, 0.75),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Samples of `|M_f(sigma + i t)|` and the fitted envelope exponent of
/// `|s (s - 1) M_f(s)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerticalScan {
    pub sigma: f64,
    /// `(t, |M_f(sigma + i t)|)`.
    pub samples: Vec<(f64, f64)>,
    /// Local maxima of `|s (s - 1) M_f|` with `t` in the fit window.
    pub envelope: Vec<(f64, f64)>,
    pub fit_window: (f64, f64),
    pub envelope_exponent: Option<f64>,
    pub within_bound: bool,
}

/// Exponent bound for the envelope of `|s (s - 1) M_f(s)|`.
pub const ENVELOPE_BOUND: f64 = 0.1;

/// Scans `t` from 1 to `t_max` in steps of `dt` along `Re s = sigma` with the
/// Rankin-Selberg route, then fits `log` envelope against `log t` over
/// `t >= 5`.
pub fn vertical_line_scan(f: &TestFunction, sigma: f64, t_max: f64, dt: f64, field: &FieldData) -> Result<VerticalScan> {
    if !(sigma > 0.5 && sigma < 1.0) {
        return Err(Error::InvalidInput("sigma must lie in (1/2, 1)".into()));
    }
    if !(dt > 0.0) || t_max < 1.0 {
        return Err(Error::InvalidInput("need dt > 0 and t_max >= 1".into()));
    }
    let mut samples = Vec::new();
    let mut weighted = Vec::new();
    let steps = ((t_max - 1.0) / dt).round() as usize;
    for j in 0..=steps {
        let t = 1.0 + j as f64 * dt;
        let s = Complex64::new(sigma, t);
        let m = mellin_rankin_selberg(f, s, field)?;
        samples.push((t, m.norm()));
        weighted.push((t, (s * (s - 1.0) * m).norm()));
    }
    let window = (5.0, t_max);
    let envelope: Vec<(f64, f64)> = (1..weighted.len().saturating_sub(1))
        .filter(|&i| weighted[i].1 >= weighted[i - 1].1 && weighted[i].1 >= weighted[i + 1].1)
        .map(|i| weighted[i])
        .filter(|(t, v)| *t >= window.0 && *t <= window.1 && *v > 0.0)
        .collect();
    let x: Vec<f64> = envelope.iter().map(|(t, _)| t.ln()).collect();
    let y: Vec<f64> = envelope.iter().map(|(_, v)| v.ln()).collect();
    // with fewer than three local maxima fall back to every sample in the window
    let (x, y) = if x.len() >= 3 {
        (x, y)
    } else {
        let pts: Vec<&(f64, f64)> = weighted.iter().filter(|(t, v)| *t >= window.0 && *v > 0.0).collect();
        (pts.iter().map(|p| p.0.ln()).collect(), pts.iter().map(|p| p.1.ln()).collect())
    };
    let exponent = ols(&x, &y).map(|r| r.0);
    Ok(VerticalScan {
        sigma,
        samples,
        envelope,
        fit_window: window,
        envelope_exponent: exponent,
        within_bound: exponent.map_or(false, |e| e <= ENVELOPE_BOUND),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_field;
    use crate::geometry::PlaceCoord;

    #[test]
    fn profile_shape() {
        let p = BumpProfile::standard();
        assert_eq!(p.eval(2.0), 0.0);
        assert_eq!(p.eval(3.0), 1.0);
        assert!((p.eval(2.25) - 0.5).abs() < 1e-15);
        let poly = BumpProfile { ramp: Ramp::Poly(3), ..p };
        assert!((poly.eval(2.25) - 0.5).abs() < 1e-14);
        assert_eq!(poly.eval(3.2), 1.0);
        for k in 0..5 {
            assert!((poly_smoothstep(k, 0.3) + poly_smoothstep(k, 0.7) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_profiles() {
        let f = make_field(0).unwrap();
        let c = Cusp::infinity(&f);
        let bad = BumpProfile { t0: 0.8, ..BumpProfile::standard() };
        assert!(TestFunction::new(c.clone(), bad).is_err());
        let narrow = BumpProfile { width: 0.8, ..BumpProfile::standard() };
        assert!(TestFunction::new(c, narrow).is_err());
    }

    #[test]
    fn plateau_value() {
        let q = make_field(0).unwrap();
        let f = TestFunction::standard(&q);
        let z = Point::new(&q, vec![PlaceCoord::real(0.2, 3.0)]).unwrap();
        assert_eq!(eval_test_function(&f, &z, &q).unwrap(), 1.0);
        let low = Point::new(&q, vec![PlaceCoord::real(0.2, 1.2)]).unwrap();
        assert_eq!(eval_test_function(&f, &low, &q).unwrap(), 0.0);
    }

    #[test]
    fn rational_slice_matches_line_integral() {
        let q = make_field(0).unwrap();
        let f = TestFunction::standard(&q);
        let y = 0.01;
        let avg = cusp_section_average_adaptive(&f, y, &q, 64, 1 << 20, |_| 1e-11).unwrap();
        // composite Gauss-Legendre on [0, 1]
        let gl = GaussLegendre::new(20);
        let line = gl.composite(0.0, 1.0, 2000, |x| {
            eval_test_function(&f, &Point { coords: vec![PlaceCoord::real(x, y)] }, &q).unwrap()
        });
        assert!((avg.value - line).abs() < 1e-8, "{} {}", avg.value, line);
    }

    #[test]
    fn ols_recovers_line() {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.75 * v - 2.0).collect();
        let (b, a, hw, _) = ols(&x, &y).unwrap();
        assert!((b - 0.75).abs() < 1e-14 && (a + 2.0).abs() < 1e-14 && hw < 1e-10);
    }
}

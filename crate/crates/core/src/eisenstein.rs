//! Eisenstein series at the cusp `infinity` (class number one): the direct
//! lattice sum, the Fourier expansion, the truncation `E^T`, and the integral
//! identities tied to them.
//!
//! With `h = 1` every cusp is equivalent to `infinity`, so `E_lambda(z, s)` is
//! `E(A^{-1} z, s)` and the Fourier expansion is only implemented at `infinity`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::equidist::{mellin_rankin_selberg, mellin_slices, MellinSlices, TestFunction};
use crate::fields::{embed, FieldData, FieldElement, OElem, PlaceKind};
use crate::geometry::{
    act, complete_pair, for_each_pair, nearest_cusp_pair, reduce_mod_stabilizer, CoordFrame, Cusp, LocalCoords,
    PlaceCoord, Point,
};
use crate::quadrature::{pairwise_sum_c, smooth_step, GaussLegendre, PairwiseAcc, PairwiseAccC};
use crate::specfun::bessel_k;
use crate::zeta::{completed_zeta, dedekind_zeta, phi, tau_divisor_sum_o, ZetaContext};

/// A coprime pair `(c, d)`, canonical in its unit orbit, and its height
/// contribution `mu = N(y) / |N(c z + d)|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticePair {
    pub c: OElem,
    pub d: OElem,
    pub mu: f64,
}

impl LatticePair {
    pub fn c_elem(&self, field: &FieldData) -> FieldElement {
        field.ring.to_field(self.c)
    }

    pub fn d_elem(&self, field: &FieldData) -> FieldElement {
        field.ring.to_field(self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EisensteinParams {
    pub s: Complex64,
    /// Direct sum keeps pairs with `mu >= 1 / norm_bound`.
    pub norm_bound: f64,
    /// Fourier frequencies are kept while the Bessel envelope
    /// `exp(-sum_i c_i y_i |l_i|)` exceeds `exp(-fourier_terms)`.
    pub fourier_terms: u32,
    pub truncation_t: f64,
}

impl EisensteinParams {
    pub fn new(s: Complex64) -> Self {
        EisensteinParams { s, norm_bound: 1e6, fourier_terms: DEFAULT_FOURIER_CUTOFF, truncation_t: 3.0 }
    }
}

pub const DEFAULT_FOURIER_CUTOFF: u32 = 45;

/// Moves `(c, d)` to the representative of its unit orbit that
/// [`enumerate_pairs`] produces at `z`.
pub fn canonicalize_pair(field: &FieldData, z: &Point, c: OElem, d: OElem) -> Result<(OElem, OElem)> {
    let ring = &field.ring;
    if c.is_zero() {
        return Ok((OElem::ZERO, OElem::ONE));
    }
    let (mut c, mut d) = (c, d);
    match (field.degree, field.r1) {
        (1, _) => {
            if c.m < 0 {
                c = -c;
                d = -d;
            }
        }
        (2, 2) => {
            let eps = field.fundamental_unit_o().ok_or(Error::NoUnits)?;
            let reg = field.regulator;
            let log_e1 = field.embed_o(eps)[0].norm().ln();
            let ce = field.embed_o(c);
            let de = field.embed_o(d);
            let a: Vec<f64> = (0..2)
                .map(|i| {
                    let p = z.coords[i];
                    ((ce[i].re * p.x.re + de[i].re).powi(2) + (ce[i].re * p.y).powi(2)) / p.y
                })
                .collect();
            let t = 0.5 * (a[0] / a[1]).ln();
            // multiplying by eps shifts t by 2 log|eps_1| = +-2R
            let k = -((t + reg) / (2.0 * reg)).floor() as i64;
            let k = if log_e1 > 0.0 { k } else { -k };
            let u = if k >= 0 {
                (0..k).fold(OElem::ONE, |acc, _| ring.mul(acc, eps))
            } else {
                let inv = ring.inv_unit(eps).unwrap();
                (0..-k).fold(OElem::ONE, |acc, _| ring.mul(acc, inv))
            };
            c = ring.mul(c, u);
            d = ring.mul(d, u);
            if field.embed_o(c)[0].re < 0.0 {
                c = -c;
                d = -d;
            }
        }
        _ => {
            let w = field.root_of_unity_o();
            let canonical = |x: OElem| {
                if field.roots_of_unity == 2 {
                    x.n > 0 || (x.n == 0 && x.m > 0)
                } else {
                    x.m > 0 && x.n >= 0
                }
            };
            for _ in 0..field.roots_of_unity {
                if canonical(c) {
                    break;
                }
                c = ring.mul(c, w);
                d = ring.mul(d, w);
            }
        }
    }
    Ok((c, d))
}

/// Unit-orbit representatives `(c, d)` with `mu(z*) >= 1 / bound`, where
/// `z* = A^{-1} z` for the cusp's matrix `A`. Sorted by decreasing `mu`.
pub fn enumerate_pairs(field: &FieldData, cusp: &Cusp, z: &Point, bound: f64) -> Result<Vec<LatticePair>> {
    let zs = if cusp.is_infinity() { z.clone() } else { act(field, &cusp.assoc.inverse(), z) };
    let mut out = Vec::new();
    for_each_pair(field, &zs, bound, |c, d, mu| out.push(LatticePair { c, d, mu }))?;
    out.sort_by(|a, b| b.mu.total_cmp(&a.mu).then(a.c.cmp(&b.c)).then(a.d.cmp(&b.d)));
    Ok(out)
}

/// `N(y)^s` for `N(y) > 0`.
fn pow_pos(x: f64, s: Complex64) -> Complex64 {
    (s * x.ln()).exp()
}

/// Cut-off weight of the direct sum: 1 for `mu B >= 2`, 0 for `mu B <= 1`.
fn direct_weight(u: f64) -> f64 {
    smooth_step(u - 1.0)
}

/// `int_{1/2}^{1} v^{-s} (1 - W(1/v)) dv`, the ramp part of the tail integral.
fn tail_ramp(s: Complex64) -> Complex64 {
    let gl = GaussLegendre::new(24);
    gl.composite_c(0.5, 1.0, 8, |v| pow_pos(v, -s) * (1.0 - direct_weight(1.0 / v)))
}

/// Smoothed direct sum at `z` (already moved by `A^{-1}`) and its tail
/// estimate `Res_E B^{1-s} (1/(s-1) + ramp)`, from the counting asymptotic
/// `#{mu >= 1/X} ~ Res_E X`.
pub fn direct_sum_parts(field: &FieldData, z: &Point, s: Complex64, bound: f64) -> Result<(Complex64, Complex64)> {
    let mut acc = PairwiseAccC::new();
    for_each_pair(field, z, bound, |_, _, mu| {
        let w = direct_weight(mu * bound);
        if w > 0.0 {
            acc.add(pow_pos(mu, s) * w);
        }
    })?;
    let tail = residue_at_one(field)? * pow_pos(bound, 1.0 - s) * (1.0 / (s - 1.0) + tail_ramp(s));
    Ok((acc.total(), tail))
}

/// `E_lambda(z, s)` by the direct lattice sum plus tail estimate; `Re s > 1`.
pub fn eisenstein_direct(field: &FieldData, cusp: &Cusp, z: &Point, params: &EisensteinParams) -> Result<Complex64> {
    if params.s.re <= 1.0 {
        return Err(Error::NotConvergent(format!("direct sum needs Re s > 1, got {}", params.s)));
    }
    if !(params.norm_bound > 0.0) {
        return Err(Error::InvalidInput("norm_bound must be positive".into()));
    }
    let zs = if cusp.is_infinity() { z.clone() } else { act(field, &cusp.assoc.inverse(), z) };
    let (sum, tail) = direct_sum_parts(field, &zs, params.s, params.norm_bound)?;
    Ok(sum + tail)
}

/// Fourier expansion of `E(z, s)` at `infinity`:
///
/// `E = q^s + phi(s) q^{1-s} + 2^r q^{1/2} / zeta*(2s) sum_{l != 0} tau_{1-2s}(l) K(l) e(Tr(l x))`
///
/// with `l` over the inverse different, `K(l) = prod K_{s-1/2}(2 pi y_i |l_i|)`
/// at real places and `K_{2s-1}(4 pi y_i |l_i|)` at complex places, and
/// `Tr(l x) = sum l_i x_i + sum 2 Re(l_i x_i)`.
pub struct FourierEvaluator<'a> {
    field: &'a FieldData,
    s: Complex64,
    phi: Complex64,
    prefactor: Complex64,
    cutoff: f64,
    delta_emb: Vec<Complex64>,
    tau_cache: HashMap<OElem, Complex64>,
    // frequencies and their Bessel factors depend only on the heights;
    // kept for the most recent height vector
    heights: Vec<u64>,
    radial: Vec<(OElem, Complex64)>,
}

impl<'a> FourierEvaluator<'a> {
    pub fn new(field: &'a FieldData, s: Complex64, fourier_terms: u32) -> Result<Self> {
        let ctx = ZetaContext::new(field);
        let phi_s = phi(&ctx, s)?;
        let half = Complex64::new(0.5, 0.0);
        let prefactor = if s == half || s == Complex64::new(0.0, 0.0) {
            // zeta*(2s) has a pole
            Complex64::new(0.0, 0.0)
        } else {
            let z2s = completed_zeta(&ctx, 2.0 * s)?;
            if z2s == Complex64::new(0.0, 0.0) {
                return Err(Error::ScatteringPole);
            }
            2f64.powi(field.num_places() as i32) / z2s
        };
        Ok(FourierEvaluator {
            field,
            s,
            phi: phi_s,
            prefactor,
            cutoff: fourier_terms as f64,
            delta_emb: embed(field, &field.different_gen),
            tau_cache: HashMap::new(),
            heights: Vec::new(),
            radial: Vec::new(),
        })
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn phi(&self) -> Complex64 {
        self.phi
    }

    /// `q^s + phi(s) q^{1-s}`.
    pub fn zero_mode(&self, q: f64) -> Complex64 {
        pow_pos(q, self.s) + self.phi * pow_pos(q, 1.0 - self.s)
    }

    pub fn eval(&mut self, z: &Point) -> Result<Complex64> {
        let q = z.norm_y(self.field);
        Ok(self.zero_mode(q) + self.nonzero_modes(z)?)
    }

    /// Everything except the zero mode.
    pub fn nonzero_modes(&mut self, z: &Point) -> Result<Complex64> {
        if self.prefactor == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let field = self.field;
        let q = z.norm_y(field);
        let nu = self.s - 0.5;
        let one_minus_2s = 1.0 - 2.0 * self.s;
        let key: Vec<u64> = z.coords.iter().map(|p| p.y.to_bits()).collect();
        if key != self.heights {
            self.radial.clear();
            for x in self.frequencies(z) {
                let tau = match self.tau_cache.get(&x) {
                    Some(t) => *t,
                    None => {
                        let t = tau_divisor_sum_o(field, x, one_minus_2s)?;
                        self.tau_cache.insert(x, t);
                        t
                    }
                };
                let xe = field.embed_o(x);
                let mut k = tau;
                for (i, kind) in field.places.iter().enumerate() {
                    let l = (xe[i] / self.delta_emb[i]).norm();
                    let y = z.coords[i].y;
                    k *= match kind {
                        PlaceKind::Real => bessel_k(nu, 2.0 * PI * y * l)?,
                        PlaceKind::Complex => bessel_k(2.0 * nu, 4.0 * PI * y * l)?,
                    };
                }
                self.radial.push((x, k));
            }
            self.heights = key;
        }
        let mut terms = Vec::with_capacity(self.radial.len());
        for &(x, k) in &self.radial {
            let xe = field.embed_o(x);
            let mut phase = 0.0;
            for (i, kind) in field.places.iter().enumerate() {
                let l = xe[i] / self.delta_emb[i];
                let p = z.coords[i];
                phase += match kind {
                    PlaceKind::Real => l.re * p.x.re,
                    PlaceKind::Complex => 2.0 * (l * p.x).re,
                };
            }
            terms.push(k * Complex64::from_polar(1.0, 2.0 * PI * phase));
        }
        Ok(self.prefactor * q.sqrt() * pairwise_sum_c(&terms))
    }

    /// Nonzero `x = delta l` in `o_K` with `sum_i c_i y_i |l_i| <= cutoff`,
    /// in a fixed order.
    fn frequencies(&self, z: &Point) -> Vec<OElem> {
        let field = self.field;
        let a = self.cutoff;
        let c = |k: PlaceKind| if k == PlaceKind::Real { 2.0 * PI } else { 4.0 * PI };
        // bound on |x_i| at each place
        let r: Vec<f64> = (0..field.num_places())
            .map(|i| a * self.delta_emb[i].norm() / (c(field.places[i]) * z.coords[i].y))
            .collect();
        let mut out = Vec::new();
        let keep = |x: OElem| -> bool {
            let xe = field.embed_o(x);
            let mut t = 0.0;
            for i in 0..field.num_places() {
                t += c(field.places[i]) * z.coords[i].y * xe[i].norm() / self.delta_emb[i].norm();
            }
            t <= a
        };
        match (field.degree, field.r1) {
            (1, _) => {
                let m = r[0].floor() as i64;
                for k in -m..=m {
                    if k != 0 {
                        out.push(OElem::new(k, 0));
                    }
                }
            }
            (2, 2) => {
                let w = field.omega_embeddings();
                let (w1, w2) = (w[0].re, w[1].re);
                let nlim = ((r[0] + r[1]) / (w1 - w2).abs()).floor() as i64;
                for n in -nlim..=nlim {
                    let nf = n as f64;
                    let lo = (-r[0] - nf * w1).max(-r[1] - nf * w2).ceil() as i64;
                    let hi = (r[0] - nf * w1).min(r[1] - nf * w2).floor() as i64;
                    for m in lo..=hi {
                        let x = OElem::new(m, n);
                        if !x.is_zero() && keep(x) {
                            out.push(x);
                        }
                    }
                }
            }
            _ => {
                let w = field.omega_embeddings()[0];
                let nlim = (r[0] / w.im).floor() as i64;
                for n in -nlim..=nlim {
                    let nf = n as f64;
                    let half = (r[0] * r[0] - (nf * w.im).powi(2)).max(0.0).sqrt();
                    let lo = (-half - nf * w.re).ceil() as i64;
                    let hi = (half - nf * w.re).floor() as i64;
                    for m in lo..=hi {
                        let x = OElem::new(m, n);
                        if !x.is_zero() && keep(x) {
                            out.push(x);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `E(z, s)` from the Fourier expansion at `infinity`, evaluated at `z` as
/// given. Valid for every `s` off the poles of `phi`; converges fastest when
/// `z` is reduced (see [`eisenstein_value`]).
pub fn eisenstein_fourier(field: &FieldData, z: &Point, s: Complex64, fourier_terms: u32) -> Result<Complex64> {
    FourierEvaluator::new(field, s, fourier_terms)?.eval(z)
}

/// Moves `z` to a point of largest height in its orbit, with unit and
/// translation coordinates reduced. Returns the point and its height.
pub fn reduce_point(field: &FieldData, z: &Point) -> Result<(Point, f64)> {
    let (c, d, mu) = nearest_cusp_pair(field, z)?;
    let g = complete_pair(field, c, d)?;
    let w = act(field, &g, z);
    let (w, _) = reduce_mod_stabilizer(field, &Cusp::infinity(field), &w)?;
    Ok((w, mu))
}

/// `E(z, s)` at any point: reduce, then sum the Fourier expansion.
pub fn eisenstein_value(field: &FieldData, z: &Point, s: Complex64) -> Result<Complex64> {
    let (w, _) = reduce_point(field, z)?;
    eisenstein_fourier(field, &w, s, DEFAULT_FOURIER_CUTOFF)
}

/// `E^T(z, s)`: `E - q^s - phi(s) q^{1-s}` when the largest cusp height `q`
/// at `z` exceeds `T`, otherwise `E`.
pub fn eisenstein_truncated(field: &FieldData, z: &Point, params: &EisensteinParams) -> Result<Complex64> {
    let (w, q) = reduce_point(field, z)?;
    let mut ev = FourierEvaluator::new(field, params.s, params.fourier_terms)?;
    if q > params.truncation_t {
        ev.nonzero_modes(&w)
    } else {
        ev.eval(&w)
    }
}

/// `zeta*_K(2s) E` at the zero mode, computed two ways:
/// `zeta*(2s) (q^s + phi q^{1-s})` and `zeta*(2s) q^s + zeta*(2s - 1) q^{1-s}`.
pub fn completed_zero_mode(field: &FieldData, s: Complex64, q: f64) -> Result<(Complex64, Complex64)> {
    let ctx = ZetaContext::new(field);
    let z2s = completed_zeta(&ctx, 2.0 * s)?;
    let z2s1 = completed_zeta(&ctx, 2.0 * s - 1.0)?;
    let phi_s = phi(&ctx, s)?;
    let a = z2s * (pow_pos(q, s) + phi_s * pow_pos(q, 1.0 - s));
    let b = z2s * pow_pos(q, s) + z2s1 * pow_pos(q, 1.0 - s);
    Ok((a, b))
}

/// `C = 2^{r1 - r2} sqrt(D) R h / omega`, the constant relating integrals over
/// `M` to integrals over horosphere quotients.
pub fn rankin_selberg_constant(field: &FieldData) -> f64 {
    2f64.powi(field.r1 as i32 - field.r2 as i32) * field.sqrt_disc() * field.regulator * field.class_number as f64
        / field.roots_of_unity as f64
}

/// `vol(M) = 2^{1 - 3 r2} pi^{-n} D^{3/2} zeta_K(2)`.
pub fn orbifold_volume(field: &FieldData) -> Result<f64> {
    let ctx = ZetaContext::new(field);
    let z2 = dedekind_zeta(&ctx, Complex64::new(2.0, 0.0))?.re;
    Ok(2f64.powi(1 - 3 * field.r2 as i32) * PI.powi(-(field.degree as i32)) * (field.disc as f64).powf(1.5) * z2)
}

/// Residue of `E(z, s)` at `s = 1`, i.e. the residue of `phi`:
/// `2^{n - 1} h R pi^n / (omega D zeta_K(2))`, which also equals `C / vol(M)`.
pub fn residue_at_one(field: &FieldData) -> Result<f64> {
    let ctx = ZetaContext::new(field);
    let z2 = dedekind_zeta(&ctx, Complex64::new(2.0, 0.0))?.re;
    Ok(2f64.powi(field.degree as i32 - 1)
        * field.class_number as f64
        * field.regulator
        * PI.powi(field.degree as i32)
        / (field.roots_of_unity as f64 * field.disc as f64 * z2))
}

/// Closed form of `int_M E^T(z, s) E^T(z, s') dv`.
pub fn maass_selberg_closed_form(field: &FieldData, s: Complex64, s2: Complex64, t: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if s == s2 || s + s2 == one {
        return Err(Error::DegenerateParameters(format!("s = {s}, s' = {s2}")));
    }
    let ctx = ZetaContext::new(field);
    let (p, p2) = (phi(&ctx, s)?, phi(&ctx, s2)?);
    let c = rankin_selberg_constant(field);
    let a = s + s2 - 1.0;
    let first = (pow_pos(t, a) - p * p2 * pow_pos(t, -a)) / a;
    let b = s - s2;
    let second = (pow_pos(t, b) * p2 - pow_pos(t, -b) * p) / b;
    Ok(c * (first + second))
}

/// Classical fundamental domain `|x| <= 1/2, |z| >= 1` for `Q`, integrated by
/// Gauss-Legendre in `x` and in the height. `g` receives `(x, y)`; the region
/// above `y = t_split` is integrated separately up to `y_max`.
pub(crate) fn integrate_rational_domain<F: FnMut(f64, f64) -> Result<Complex64>>(
    t_split: f64,
    y_max: f64,
    nodes: usize,
    mut g: F,
) -> Result<Complex64> {
    let gl = GaussLegendre::new(nodes);
    let mut total = PairwiseAccC::new();
    let panels = 4;
    for xp in 0..panels {
        let (xa, xb) = (-0.5 + xp as f64 / panels as f64, -0.5 + (xp + 1) as f64 / panels as f64);
        for (x, wx) in gl.on(xa, xb) {
            let y0 = (1.0 - x * x).sqrt();
            // lower part: y from the unit circle to t_split
            let ylo_panels = 4;
            let h = (t_split - y0) / ylo_panels as f64;
            for yp in 0..ylo_panels {
                for (y, wy) in gl.on(y0 + yp as f64 * h, y0 + (yp + 1) as f64 * h) {
                    total.add(g(x, y)? * (wx * wy / (y * y)));
                }
            }
            let hi_panels = 8;
            let h = (y_max - t_split) / hi_panels as f64;
            for yp in 0..hi_panels {
                for (y, wy) in gl.on(t_split + yp as f64 * h, t_split + (yp + 1) as f64 * h) {
                    total.add(g(x, y)? * (wx * wy / (y * y)));
                }
            }
        }
    }
    Ok(total.total())
}

/// `int_F E^T(z, s) E^T(z, s') dx dy / y^2` over the classical fundamental
/// domain of `SL(2, Z)`.
pub fn maass_selberg_numeric_rational(s: Complex64, s2: Complex64, t: f64) -> Result<Complex64> {
    let q = crate::fields::make_field(0)?;
    if !(t > 1.0) {
        return Err(Error::DegenerateParameters("T must exceed 1".into()));
    }
    let mut e1 = FourierEvaluator::new(&q, s, DEFAULT_FOURIER_CUTOFF)?;
    let mut e2 = FourierEvaluator::new(&q, s2, DEFAULT_FOURIER_CUTOFF)?;
    // above T the truncated functions are the nonzero modes, ~exp(-2 pi y)
    integrate_rational_domain(t, t + 8.0, 24, |x, y| {
        let z = Point { coords: vec![PlaceCoord::real(x, y)] };
        if y > t {
            Ok(e1.nonzero_modes(&z)? * e2.nonzero_modes(&z)?)
        } else {
            Ok(e1.eval(&z)? * e2.eval(&z)?)
        }
    })
}

/// Hyperbolic area of the classical fundamental domain by quadrature.
pub fn orbifold_volume_rational_numeric() -> Result<f64> {
    // the strip above y_max has area exactly 1 / y_max
    let y_max = 400.0;
    Ok(integrate_rational_domain(2.0, y_max, 24, |_, _| Ok(Complex64::new(1.0, 0.0)))?.re + 1.0 / y_max)
}

/// Right side of `int_{M_T} E(z, s) dv = C (T^{s-1}/(s-1) - phi(s) T^{-s}/s)`.
pub fn truncated_volume_closed_form(field: &FieldData, s: Complex64, t: f64) -> Result<Complex64> {
    let ctx = ZetaContext::new(field);
    let p = phi(&ctx, s)?;
    let c = rankin_selberg_constant(field);
    Ok(c * (pow_pos(t, s - 1.0) / (s - 1.0) - p * pow_pos(t, -s) / s))
}

/// Both sides of the unfolding identity
/// `C int_0^infinity m(f, q) q^{s-2} dq = int_M E(z, s) f(z) dv` for `Re s > 1`:
/// the left from cusp-section averages, the right from the Fourier expansion
/// of `E` integrated against `f` in cusp coordinates.
pub fn rankin_selberg_check(field: &FieldData, f: &TestFunction, s: Complex64) -> Result<(Complex64, Complex64)> {
    let c = rankin_selberg_constant(field);
    let lhs = mellin_slices(f, s, field, &MellinSlices::for_field(field))?;
    let rhs = mellin_rankin_selberg(f, s, field)?;
    Ok((lhs * c, rhs * c))
}

/// Settings for the unfolded integration over `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnfoldedQuadrature {
    /// The partition weight `rho` ramps from 0 at `q_a` to 1 at `q_b`; every
    /// orbit must reach height `q_b`.
    pub q_a: f64,
    pub q_b: f64,
    /// Nodes per dimension of the periodic grid over the `(X, Y)` box.
    pub box_nodes: usize,
    /// Gauss-Legendre nodes per height panel, and panel count.
    pub q_nodes: usize,
    pub q_panels: usize,
    /// Pair cut-off for the direct sums used inside the integrand.
    pub norm_bound: f64,
}

impl UnfoldedQuadrature {
    /// Defaults with the ramp placed below a scanned lower bound `m0` for the
    /// largest cusp height: `q_b = 0.75 m0`, `q_a = q_b / 9`.
    pub fn for_field(field: &FieldData) -> Result<Self> {
        let m0 = min_max_height(field, 4096)?;
        let q_b = 0.75 * m0;
        Ok(UnfoldedQuadrature { q_a: q_b / 9.0, q_b, box_nodes: 16, q_nodes: 16, q_panels: 6, norm_bound: 30.0 })
    }

    fn ramp(&self, q: f64) -> f64 {
        smooth_step((q - self.q_a) / (self.q_b - self.q_a))
    }
}

/// `int_M g dv` for a `Gamma`-invariant `g` given as a function of the point
/// and its pair list. `M` is unfolded onto `Gamma_infinity \ H` with the
/// partition of unity `rho(z) = psi(q(z)) / sum_gamma psi(mu(gamma z))`, where
/// `psi` ramps from 0 to 1 on `[q_a, q_b]`. Heights above `q_max` are left to
/// the caller (there `rho = 1`).
fn unfolded_integral<G>(
    field: &FieldData,
    opts: &UnfoldedQuadrature,
    q_max: f64,
    pair_bound: f64,
    mut g: G,
) -> Result<f64>
where
    G: FnMut(&Point, &[f64]) -> Result<f64>,
{
    let frame = CoordFrame::new(field, &Cusp::infinity(field))?;
    let gl = GaussLegendre::new(opts.q_nodes);
    let dims = field.degree + field.unit_rank();
    let n = opts.box_nodes;
    let total_box = n.pow(dims as u32);
    let cell = 1.0 / total_box as f64;
    let ln_a = opts.q_a.ln();
    let ln_b = q_max.ln();
    let h = (ln_b - ln_a) / opts.q_panels as f64;
    let base = crate::geometry::horosphere_measure_density(field, 1.0).volume_density * 2.0
        / field.roots_of_unity as f64;
    let mut total = PairwiseAcc::new();
    let mut mus: Vec<f64> = Vec::new();
    for p in 0..opts.q_panels {
        // integrate in log q: dq = q dlog q
        for (lq, w) in gl.on(ln_a + p as f64 * h, ln_a + (p + 1) as f64 * h) {
            let q = lq.exp();
            let rho_num = opts.ramp(q);
            if rho_num == 0.0 {
                continue;
            }
            let mut slice = PairwiseAcc::new();
            for idx in 0..total_box {
                let mut rest = idx;
                let mut v = Vec::with_capacity(dims);
                for _ in 0..dims {
                    v.push(-0.5 + (rest % n) as f64 / n as f64);
                    rest /= n;
                }
                let lc = LocalCoords {
                    q,
                    x_coords: v[..field.degree].to_vec(),
                    y_coords: v[field.degree..].to_vec(),
                };
                let z = frame.from_local_coords(&lc);
                mus.clear();
                for_each_pair(field, &z, pair_bound, |_, _, mu| mus.push(mu))?;
                let denom: f64 = mus.iter().filter(|&&m| m >= opts.q_a).map(|&m| opts.ramp(m)).sum();
                let val = g(&z, &mus)?;
                slice.add(val * rho_num / denom);
            }
            // volume density is base / q^2; times q from dlog q
            total.add(w * slice.total() * cell * base / q);
        }
    }
    Ok(total.total())
}

/// Smallest largest-cusp-height seen over a Halton sample of `samples` points
/// with `q` in `[0.02, 1.5]`; an upper estimate of the true minimum.
pub fn min_max_height(field: &FieldData, samples: usize) -> Result<f64> {
    let frame = CoordFrame::new(field, &Cusp::infinity(field))?;
    let dims = field.degree + field.unit_rank() + 1;
    let primes = [2u64, 3, 5, 7];
    let halton = |mut i: u64, b: u64| {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= b as f64;
            r += f * (i % b) as f64;
            i /= b;
        }
        r
    };
    let mut lo = f64::INFINITY;
    for k in 1..=samples as u64 {
        let v: Vec<f64> = (0..dims).map(|j| halton(k, primes[j])).collect();
        let lc = LocalCoords {
            q: 0.02 + 1.48 * v[0],
            x_coords: v[1..=field.degree].iter().map(|t| t - 0.5).collect(),
            y_coords: v[field.degree + 1..].iter().map(|t| t - 0.5).collect(),
        };
        let z = frame.from_local_coords(&lc);
        lo = lo.min(nearest_cusp_pair(field, &z)?.2);
    }
    Ok(lo)
}

/// `vol(M)` by unfolded quadrature (independent of the zeta values).
pub fn orbifold_volume_unfolded(field: &FieldData, opts: &UnfoldedQuadrature) -> Result<f64> {
    // above q = 1 / q_a only the identity term is present and rho = 1
    let q_max = 1.0 / opts.q_a;
    let inner = unfolded_integral(field, opts, q_max, 1.0 / opts.q_a, |_, _| Ok(1.0))?;
    let c = rankin_selberg_constant(field);
    Ok(inner + c / q_max)
}

/// `int_{M_T} E(z, s) dv` for real `s > 1` by unfolded quadrature, with `E`
/// from smoothed direct sums. The cusp region is removed through the smooth
/// cut-off `chi` rising on `[T, T + 1]`:
/// `int_{M_T} E = int_M (E - F) - C int_T^{T+1} (1 - chi) Z q^{-2} dq`,
/// `F = sum_gamma chi(mu(gamma z)) Z(mu(gamma z))`, `Z(q) = q^s + phi q^{1-s}`.
pub fn truncated_volume_numeric(field: &FieldData, s: f64, t: f64, opts: &UnfoldedQuadrature) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::NotConvergent("unfolded check needs s > 1".into()));
    }
    let sc = Complex64::new(s, 0.0);
    let ctx = ZetaContext::new(field);
    let p = phi(&ctx, sc)?.re;
    let zm = |q: f64| q.powf(s) + p * q.powf(1.0 - s);
    let chi = |q: f64| smooth_step(q - t);
    let tail = (residue_at_one(field)? * pow_pos(opts.norm_bound, 1.0 - sc) * (1.0 / (sc - 1.0) + tail_ramp(sc))).re;
    let bound = opts.norm_bound;
    let q_max = (t + 1.0).max(1.0 / opts.q_a);
    let inner = unfolded_integral(field, opts, q_max, bound.max(1.0 / opts.q_a), |_, mus| {
        let mut e = PairwiseAcc::new();
        let mut f = 0.0;
        for &mu in mus {
            let w = direct_weight(mu * bound);
            if w > 0.0 {
                e.add(w * mu.powf(s));
            }
            if mu > t {
                f += chi(mu) * zm(mu);
            }
        }
        Ok(e.total() + tail - f)
    })?;
    let gl = GaussLegendre::new(24);
    let corr = gl.composite(t, t + 1.0, 4, |q| (1.0 - chi(q)) * zm(q) / (q * q));
    Ok(inner - rankin_selberg_constant(field) * corr)
}

//! Points of `H^{r1} x H3^{r2}`, the action of `SL(2, o_K)`, cusps, cusp heights
//! and the local coordinates `(q, Y, X)` attached to a cusp.
//!
//! At a complex place a point is `(x, y)` with `x` complex and `y > 0`, i.e.
//! the quaternion `x + y j`; at a real place `x` is real. The Mobius action at
//! a complex place is
//!
//! `x' = ((a x + b) conj(c x + d) + a conj(c) y^2) / D`, `y' = y / D`,
//! `D = |c x + d|^2 + |c|^2 y^2`.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fields::{embed, FieldData, FieldElement, IdealRep, OElem, PlaceKind};

/// Coordinates at one archimedean place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaceCoord {
    pub x: Complex64,
    pub y: f64,
}

impl PlaceCoord {
    pub fn real(x: f64, y: f64) -> Self {
        PlaceCoord { x: Complex64::new(x, 0.0), y }
    }

    pub fn complex(x: Complex64, y: f64) -> Self {
        PlaceCoord { x, y }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub coords: Vec<PlaceCoord>,
}

impl Point {
    /// Validates one coordinate per place, `y > 0`, and real `x` at real places.
    pub fn new(field: &FieldData, coords: Vec<PlaceCoord>) -> Result<Self> {
        if coords.len() != field.num_places() {
            return Err(Error::InvalidPoint(format!(
                "expected {} places, got {}",
                field.num_places(),
                coords.len()
            )));
        }
        for (c, kind) in coords.iter().zip(&field.places) {
            if !(c.y > 0.0) || !c.y.is_finite() || !c.x.re.is_finite() || !c.x.im.is_finite() {
                return Err(Error::InvalidPoint(format!("need finite x and y > 0, got {:?}", c)));
            }
            if *kind == PlaceKind::Real && c.x.im != 0.0 {
                return Err(Error::InvalidPoint("imaginary x at a real place".into()));
            }
        }
        Ok(Point { coords })
    }

    /// `N(y) = prod y_i^{N_i}`.
    pub fn norm_y(&self, field: &FieldData) -> f64 {
        self.coords.iter().zip(&field.places).map(|(c, k)| c.y.powi(k.weight() as i32)).product()
    }
}

/// Element of `SL(2, o_K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

/// Embedded matrix entries `[a, b, c, d]` at one place.
pub type EmbeddedMatrix = [Complex64; 4];

impl GroupElement {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if det != FieldElement::one(a.d()) {
            return Err(Error::DomainError(format!("determinant is {det}, not 1")));
        }
        if ![&a, &b, &c, &d].iter().all(|x| x.is_integral()) {
            return Err(Error::DomainError("matrix entries must lie in o_K".into()));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn from_oelems(field: &FieldData, a: OElem, b: OElem, c: OElem, d: OElem) -> Result<Self> {
        let r = &field.ring;
        Self::new(r.to_field(a), r.to_field(b), r.to_field(c), r.to_field(d))
    }

    pub fn identity(d: i64) -> Self {
        GroupElement {
            a: FieldElement::one(d),
            b: FieldElement::zero(d),
            c: FieldElement::zero(d),
            d: FieldElement::one(d),
        }
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn embedded(&self, field: &FieldData) -> Vec<EmbeddedMatrix> {
        let (a, b, c, d) = (embed(field, &self.a), embed(field, &self.b), embed(field, &self.c), embed(field, &self.d));
        (0..field.num_places()).map(|i| [a[i], b[i], c[i], d[i]]).collect()
    }
}

fn act_place(m: &EmbeddedMatrix, kind: PlaceKind, p: PlaceCoord) -> PlaceCoord {
    let [a, b, c, d] = *m;
    match kind {
        PlaceKind::Real => {
            let z = Complex64::new(p.x.re, p.y);
            let w = (a.re * z + b.re) / (c.re * z + d.re);
            PlaceCoord::real(w.re, w.im)
        }
        PlaceKind::Complex => {
            let cxd = c * p.x + d;
            let y2 = p.y * p.y;
            let den = cxd.norm_sqr() + c.norm_sqr() * y2;
            let x = ((a * p.x + b) * cxd.conj() + a * c.conj() * y2) / den;
            PlaceCoord::complex(x, p.y / den)
        }
    }
}

/// `g z` from pre-embedded matrix entries.
pub fn act_embedded(field: &FieldData, g: &[EmbeddedMatrix], z: &Point) -> Point {
    let coords = z.coords.iter().zip(g).zip(&field.places).map(|((p, m), k)| act_place(m, *k, *p)).collect();
    Point { coords }
}

pub fn act(field: &FieldData, g: &GroupElement, z: &Point) -> Point {
    act_embedded(field, &g.embedded(field), z)
}

/// A cusp `lambda = rho / sigma` with `(rho, sigma)` a coprime pair in `o_K`,
/// together with `A in SL(2, o_K)` whose first column is `(rho, sigma)`.
/// With class number one the ideal `(rho, sigma)` is `o_K` itself.
#[derive(Clone, Debug)]
pub struct Cusp {
    pub rho: FieldElement,
    pub sigma: FieldElement,
    pub ideal: IdealRep,
    pub assoc: GroupElement,
}

impl PartialEq for Cusp {
    /// Same point of `P^1(K)`.
    fn eq(&self, o: &Self) -> bool {
        &self.rho * &o.sigma == &o.rho * &self.sigma
    }
}

fn common_denominator(xs: &[&FieldElement]) -> FieldElement {
    use num_integer::Integer;
    let mut l = num_bigint::BigInt::one();
    for x in xs {
        l = l.lcm(x.a().denom()).lcm(x.b().denom());
    }
    let d = xs[0].d();
    FieldElement::new(d, num_rational::BigRational::from_integer(l * 2), num_rational::BigRational::zero())
}

impl Cusp {
    pub fn infinity(field: &FieldData) -> Self {
        let d = field.d;
        Cusp {
            rho: FieldElement::one(d),
            sigma: FieldElement::zero(d),
            ideal: IdealRep::unit(d),
            assoc: GroupElement::identity(d),
        }
    }

    /// The cusp `rho / sigma` for any `rho`, `sigma` in `K`, not both zero.
    pub fn new(field: &FieldData, rho: &FieldElement, sigma: &FieldElement) -> Result<Self> {
        if rho.is_zero() && sigma.is_zero() {
            return Err(Error::DomainError("cusp needs (rho, sigma) != (0, 0)".into()));
        }
        if sigma.is_zero() {
            return Ok(Self::infinity(field));
        }
        let l = common_denominator(&[rho, sigma]);
        let (r, s) = (rho * &l, sigma * &l);
        let ring = &field.ring;
        let ro = r.to_oelem().ok_or_else(|| Error::DomainError("cusp coordinates too large".into()))?;
        let so = s.to_oelem().ok_or_else(|| Error::DomainError("cusp coordinates too large".into()))?;
        let g = ring.gcd(ro, so)?;
        let (mut ro, mut so) = (ring.div_exact(ro, g).unwrap(), ring.div_exact(so, g).unwrap());
        // fix the sign (or root of unity) of sigma
        if field.r1 > 0 && field.embed_o(so)[0].re < 0.0 {
            ro = -ro;
            so = -so;
        }
        Self::from_coprime(field, ro, so)
    }

    /// From a coprime pair already in `o_K`.
    pub fn from_coprime(field: &FieldData, rho: OElem, sigma: OElem) -> Result<Self> {
        let ring = &field.ring;
        if sigma.is_zero() {
            return Ok(Self::infinity(field));
        }
        let (g, x, y) = ring.xgcd(rho, sigma)?;
        let ginv = ring
            .inv_unit(g)
            .or_else(|| if field.is_rational() && g.m.abs() == 1 { Some(g) } else { None })
            .ok_or_else(|| Error::DomainError("cusp pair is not coprime".into()))?;
        // rho eta - sigma xi = 1
        let eta = ring.mul(x, ginv);
        let xi = -ring.mul(y, ginv);
        let assoc = GroupElement::from_oelems(field, rho, xi, sigma, eta)?;
        Ok(Cusp { rho: ring.to_field(rho), sigma: ring.to_field(sigma), ideal: IdealRep::unit(field.d), assoc })
    }

    pub fn is_infinity(&self) -> bool {
        self.sigma.is_zero()
    }

    /// `g lambda`.
    pub fn image(&self, field: &FieldData, g: &GroupElement) -> Result<Cusp> {
        let r = &(&g.a * &self.rho) + &(&g.b * &self.sigma);
        let s = &(&g.c * &self.rho) + &(&g.d * &self.sigma);
        Cusp::new(field, &r, &s)
    }
}

/// `|-sigma z + rho|^2` at one place (quaternion norm at complex places).
fn denom_sq(sig: Complex64, rho: Complex64, p: PlaceCoord) -> f64 {
    (-sig * p.x + rho).norm_sqr() + sig.norm_sqr() * p.y * p.y
}

/// Height `mu(lambda, z) = N(a)^2 N(y) / |N(-sigma z + rho)|^2`.
pub fn height(field: &FieldData, cusp: &Cusp, z: &Point) -> f64 {
    let sig = embed(field, &cusp.sigma);
    let rho = embed(field, &cusp.rho);
    let na = cusp.ideal.norm.clone();
    let na = num_traits::ToPrimitive::to_f64(&na).unwrap_or(1.0);
    let mut mu = na * na;
    for (i, (p, k)) in z.coords.iter().zip(&field.places).enumerate() {
        let w = k.weight() as i32;
        mu *= (p.y / denom_sq(sig[i], rho[i], *p)).powi(w);
    }
    mu
}

/// Local coordinates at a cusp: height `q`, unit coordinates `Y` (length
/// `r - 1`) and lattice coordinates `X` (length `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCoords {
    pub q: f64,
    pub y_coords: Vec<f64>,
    pub x_coords: Vec<f64>,
}

/// Floating-point data for moving between `z` and local coordinates at a
/// cusp: embedded `A`, `A^{-1}`, the basis matrix `O` and `log|eps^{(i)}|`.
#[derive(Clone, Debug)]
pub struct CoordFrame {
    places: Vec<PlaceKind>,
    degree: usize,
    a_emb: Vec<EmbeddedMatrix>,
    a_inv_emb: Vec<EmbeddedMatrix>,
    identity: bool,
    o: Vec<Vec<f64>>,
    o_inv: Vec<Vec<f64>>,
    log_eps: Vec<f64>,
}

fn invert(m: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[piv][col].abs() < 1e-14 {
            return Err(Error::SingularBasisMatrix);
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                for j in 0..n {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

impl CoordFrame {
    pub fn new(field: &FieldData, cusp: &Cusp) -> Result<Self> {
        // rows: real coordinates of x*, columns: integral basis
        let basis: Vec<Vec<Complex64>> = field.integral_basis.iter().map(|b| embed(field, b)).collect();
        let mut o = Vec::new();
        for (i, k) in field.places.iter().enumerate() {
            match k {
                PlaceKind::Real => o.push(basis.iter().map(|b| b[i].re).collect()),
                PlaceKind::Complex => {
                    o.push(basis.iter().map(|b| b[i].re).collect());
                    o.push(basis.iter().map(|b| b[i].im).collect());
                }
            }
        }
        let o_inv = invert(&o)?;
        let log_eps = match &field.fundamental_unit {
            Some(e) => embed(field, e).iter().map(|v| v.norm().ln()).collect(),
            None => vec![0.0; field.num_places()],
        };
        Ok(CoordFrame {
            places: field.places.clone(),
            degree: field.degree,
            a_emb: cusp.assoc.embedded(field),
            a_inv_emb: cusp.assoc.inverse().embedded(field),
            identity: cusp.is_infinity(),
            o,
            o_inv,
            log_eps,
        })
    }

    fn to_star(&self, z: &Point) -> Vec<PlaceCoord> {
        if self.identity {
            return z.coords.clone();
        }
        z.coords.iter().zip(&self.a_inv_emb).zip(&self.places).map(|((p, m), k)| act_place(m, *k, *p)).collect()
    }

    pub fn local_coords(&self, z: &Point) -> LocalCoords {
        let star = self.to_star(z);
        let q: f64 = star.iter().zip(&self.places).map(|(p, k)| p.y.powi(k.weight() as i32)).product();
        let mut y_coords = Vec::new();
        if self.places.len() == 2 && self.places[0] == PlaceKind::Real {
            // y_i = q^{1/2} |eps^{(i)}|^{2Y}
            y_coords.push((star[0].y / star[1].y).ln() / (4.0 * self.log_eps[0]));
        }
        let mut xs = Vec::with_capacity(self.degree);
        for (p, k) in star.iter().zip(&self.places) {
            xs.push(p.x.re);
            if *k == PlaceKind::Complex {
                xs.push(p.x.im);
            }
        }
        LocalCoords { q, y_coords, x_coords: mat_vec(&self.o_inv, &xs) }
    }

    pub fn from_local_coords(&self, lc: &LocalCoords) -> Point {
        let n = self.degree as f64;
        let base = lc.q.powf(1.0 / n);
        let xs = mat_vec(&self.o, &lc.x_coords);
        let mut coords = Vec::with_capacity(self.places.len());
        let mut j = 0;
        for (i, k) in self.places.iter().enumerate() {
            let mut y = base;
            if let Some(yc) = lc.y_coords.first() {
                y *= (2.0 * yc * self.log_eps[i]).exp();
            }
            match k {
                PlaceKind::Real => {
                    coords.push(PlaceCoord::real(xs[j], y));
                    j += 1;
                }
                PlaceKind::Complex => {
                    coords.push(PlaceCoord::complex(Complex64::new(xs[j], xs[j + 1]), y));
                    j += 2;
                }
            }
        }
        let star = Point { coords };
        if self.identity {
            return star;
        }
        let coords =
            star.coords.iter().zip(&self.a_emb).zip(&self.places).map(|((p, m), k)| act_place(m, *k, *p)).collect();
        Point { coords }
    }

    /// `O^{-1} E^2 O` for the unit `eps` given by its embeddings.
    pub fn unit_x_map(&self, eps: &[Complex64]) -> Vec<Vec<f64>> {
        let n = self.degree;
        let mut e2 = vec![vec![0.0; n]; n];
        let mut j = 0;
        for (i, k) in self.places.iter().enumerate() {
            let w = eps[i] * eps[i];
            match k {
                PlaceKind::Real => {
                    e2[j][j] = w.re;
                    j += 1;
                }
                PlaceKind::Complex => {
                    e2[j][j] = w.re;
                    e2[j][j + 1] = -w.im;
                    e2[j + 1][j] = w.im;
                    e2[j + 1][j + 1] = w.re;
                    j += 2;
                }
            }
        }
        let eo: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| (0..n).map(|t| e2[r][t] * self.o[t][c]).sum()).collect()).collect();
        (0..n).map(|r| (0..n).map(|c| (0..n).map(|t| self.o_inv[r][t] * eo[t][c]).sum()).collect()).collect()
    }
}

pub fn local_coords(field: &FieldData, cusp: &Cusp, z: &Point) -> Result<LocalCoords> {
    Ok(CoordFrame::new(field, cusp)?.local_coords(z))
}

pub fn from_local_coords(field: &FieldData, cusp: &Cusp, lc: &LocalCoords) -> Result<Point> {
    if !(lc.q > 0.0) {
        return Err(Error::InvalidPoint("local height must be positive".into()));
    }
    Ok(CoordFrame::new(field, cusp)?.from_local_coords(lc))
}

/// `eps = w^root_idx * eps_1^k` as an exact field element.
pub fn stabilizer_unit(field: &FieldData, unit_exps: &[i64], root_idx: u32) -> Result<FieldElement> {
    let ring = &field.ring;
    let mut w = OElem::ONE;
    for _ in 0..root_idx % field.roots_of_unity {
        w = ring.mul(w, field.root_of_unity_o());
    }
    let mut eps = ring.to_field(w);
    if let Some(&k) = unit_exps.first() {
        if k != 0 {
            eps = &eps * &crate::fields::unit_power(field, k)?;
        }
    }
    Ok(eps)
}

/// `M = A [[eps, eps^{-1} zeta], [0, eps^{-1}]] A^{-1}` with `zeta` the lattice
/// vector with integral-basis coordinates `translation`. `M` acts on local
/// coordinates by `x* -> eps^2 x* + zeta`, `y* -> |eps|^2 y*`.
pub fn stabilizer_element(
    field: &FieldData,
    cusp: &Cusp,
    unit_exps: &[i64],
    root_idx: u32,
    translation: &[i64],
) -> Result<GroupElement> {
    if unit_exps.len() != field.unit_rank() {
        return Err(Error::DomainError(format!("expected {} unit exponents", field.unit_rank())));
    }
    if translation.len() != field.degree {
        return Err(Error::DomainError(format!("expected {} translation coordinates", field.degree)));
    }
    let eps = stabilizer_unit(field, unit_exps, root_idx)?;
    let eps_inv = eps.inv().expect("units are invertible");
    let mut zeta = FieldElement::zero(field.d);
    for (b, m) in field.integral_basis.iter().zip(translation) {
        zeta = &zeta + &(b * &FieldElement::integer(field.d, *m));
    }
    let inner = GroupElement {
        a: eps.clone(),
        b: &eps_inv * &zeta,
        c: FieldElement::zero(field.d),
        d: eps_inv,
    };
    let a = &cusp.assoc;
    let m = a.mul(&inner).mul(&a.inverse());
    GroupElement::new(m.a, m.b, m.c, m.d)
}

/// Moves `z` by the cusp stabiliser so that its local coordinates satisfy
/// `Y, X in [-1/2, 1/2)`: `Y` is reduced by a unit, then `X` by a translation.
/// Roots of unity are not used, so for `Q(i)` and `Q(sqrt -3)` the result lies
/// in the translation box rather than a smaller fundamental domain.
pub fn reduce_mod_stabilizer(field: &FieldData, cusp: &Cusp, z: &Point) -> Result<(Point, GroupElement)> {
    let frame = CoordFrame::new(field, cusp)?;
    let lc = frame.local_coords(z);
    let k: Vec<i64> = lc.y_coords.iter().map(|y| -(y + 0.5).floor() as i64).collect();
    let mut x = lc.x_coords.clone();
    if let Some(&kk) = k.first() {
        if kk != 0 {
            let eps = embed(field, &stabilizer_unit(field, &k, 0)?);
            x = mat_vec(&frame.unit_x_map(&eps), &x);
        }
    }
    let m: Vec<i64> = x.iter().map(|v| -(v + 0.5).floor() as i64).collect();
    let g = stabilizer_element(field, cusp, &k, 0, &m)?;
    Ok((act(field, &g, z), g))
}

/// Densities of the invariant measure in cusp coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorosphereDensity {
    /// `dv = volume_density * dX dY dq`.
    pub volume_density: f64,
    /// Induced measure on the horosphere `{q = const}`: `dv' = induced_density * dX dY`.
    pub induced_density: f64,
    /// Volume of the horosphere modulo the stabiliser (`Gamma_lambda`).
    pub quotient_volume: f64,
}

pub fn horosphere_measure_density(field: &FieldData, q: f64) -> HorosphereDensity {
    let (r1, r2) = (field.r1 as i32, field.r2 as i32);
    let base = 2f64.powi(r1 - r2 - 1) * field.sqrt_disc() * field.regulator;
    let grad = ((r1 + 4 * r2) as f64).sqrt();
    HorosphereDensity {
        volume_density: base / (q * q),
        induced_density: grad * base / q,
        // the box has unit volume; {+-1} acts trivially, W / {+-1} does not
        quotient_volume: grad * base / q * 2.0 / field.roots_of_unity as f64,
    }
}

/// Index of the candidate cusp of largest height at `z` (first on ties).
pub fn scan_sphere_of_influence(field: &FieldData, z: &Point, candidates: &[Cusp]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let h = height(field, c, z);
        if best.map_or(true, |(_, b)| h > b) {
            best = Some((i, h));
        }
    }
    best.map(|(i, _)| i)
}

/// Cusps `rho / sigma` with `0 < |N(sigma)| <= bound`, every embedding of
/// `sigma` at most `bound` in size, and every real coordinate of `rho / sigma`
/// within `window`; `infinity` comes first. One representative per cusp.
pub fn candidate_cusps(field: &FieldData, bound: u64, window: f64) -> Result<Vec<Cusp>> {
    let ring = &field.ring;
    let mut out = vec![Cusp::infinity(field)];
    let b = bound as i64;
    let nmax = if field.is_rational() { 0 } else { 4 * b };
    let mut seen: Vec<(OElem, OElem)> = Vec::new();
    for n in -nmax..=nmax {
        for m in -4 * b..=4 * b {
            let s = OElem::new(m, n);
            let ns = ring.norm(s).unsigned_abs();
            if ns == 0 || ns > bound as u128 {
                continue;
            }
            let se = field.embed_o(s);
            if se.iter().any(|v| v.norm() > bound as f64) {
                continue;
            }
            let rad = window * se.iter().map(|v| v.norm()).fold(0.0, f64::max) + 1.0;
            let rn = if field.is_rational() { 0 } else { (4.0 * rad).ceil() as i64 + 2 };
            let rm = (4.0 * rad).ceil() as i64 + 2;
            for rn_ in -rn..=rn {
                for rm_ in -rm..=rm {
                    let r = OElem::new(rm_, rn_);
                    if !ring.coprime(r, s)? {
                        continue;
                    }
                    // rho / sigma = r conj(s) / N(s)
                    let re = field.embed_o(r);
                    let ok = re.iter().zip(&se).all(|(a, b)| {
                        let v = *a / *b;
                        v.re.abs() <= window && v.im.abs() <= window
                    });
                    if !ok {
                        continue;
                    }
                    let cusp = Cusp::from_coprime(field, r, s)?;
                    // P^1 equality: r s' = r' s
                    if seen.iter().any(|(r2, s2)| ring.mul(r, *s2) == ring.mul(*r2, s)) {
                        continue;
                    }
                    seen.push((r, s));
                    out.push(cusp);
                }
            }
        }
    }
    Ok(out)
}

/// Hyperbolic distance for the product metric `sum_i (|dx_i|^2 + dy_i^2) / y_i^2`.
pub fn distance(z: &Point, w: &Point) -> f64 {
    z.coords
        .iter()
        .zip(&w.coords)
        .map(|(a, b)| {
            let num = (a.x - b.x).norm_sqr() + (a.y - b.y).powi(2);
            let d = (1.0 + num / (2.0 * a.y * b.y)).acosh();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Invariant Laplacian by fourth-order central differences with steps
/// `h * y_i`: `y^2 (d_x^2 + d_y^2)` at real places and
/// `y^2 (d_{x1}^2 + d_{x2}^2 + d_y^2) - y d_y` at complex places.
pub fn laplacian_fd<F: Fn(&Point) -> Complex64>(field: &FieldData, f: F, z: &Point, h: f64) -> Complex64 {
    let f0 = f(z);
    let mut total = Complex64::new(0.0, 0.0);
    let shifted = |place: usize, dir: usize, t: f64| -> Complex64 {
        let mut p = z.clone();
        let c = &mut p.coords[place];
        match dir {
            0 => c.x += Complex64::new(t, 0.0),
            1 => c.x += Complex64::new(0.0, t),
            _ => c.y += t,
        }
        f(&p)
    };
    for (i, k) in field.places.iter().enumerate() {
        let y = z.coords[i].y;
        let step = h * y;
        let dirs: &[usize] = match k {
            PlaceKind::Real => &[0, 2],
            PlaceKind::Complex => &[0, 1, 2],
        };
        for &dir in dirs {
            let fp1 = shifted(i, dir, step);
            let fm1 = shifted(i, dir, -step);
            let fp2 = shifted(i, dir, 2.0 * step);
            let fm2 = shifted(i, dir, -2.0 * step);
            let second = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * step * step);
            total += y * y * second;
            if dir == 2 && *k == PlaceKind::Complex {
                let first = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * step);
                total -= y * first;
            }
        }
    }
    total
}

/// Laplace eigenvalue of `N(y)^s`: `(r1 + 4 r2) s (s - 1)`.
pub fn eigenvalue(field: &FieldData, s: Complex64) -> Complex64 {
    ((field.r1 + 4 * field.r2) as f64) * s * (s - 1.0)
}

/// Callback-driven enumeration of coprime pairs `(c, d)` in `o_K`, one per
/// class modulo units, with `mu = N(y) / |N(c z + d)|^2 >= 1 / bound`. Here
/// `|.|^2` is the quaternion norm at complex places. The callback receives
/// `(c, d, mu)`.
pub fn for_each_pair<F: FnMut(OElem, OElem, f64)>(field: &FieldData, z: &Point, bound: f64, mut f: F) -> Result<()> {
    let ny = z.norm_y(field);
    if !(bound > 0.0) {
        return Ok(());
    }
    // c = 0: d must be a unit; one class
    if 1.0 / ny <= bound {
        f(OElem::ZERO, OElem::ONE, ny);
    }
    let ring = &field.ring;
    match (field.degree, field.r1) {
        (1, _) => {
            let p = z.coords[0];
            let cmax = (bound / p.y).sqrt().floor() as i64;
            for c in 1..=cmax {
                let cf = c as f64;
                let rem = bound * p.y - cf * cf * p.y * p.y;
                if rem < 0.0 {
                    continue;
                }
                let r = rem.sqrt();
                let center = -cf * p.x.re;
                let lo = (center - r).ceil() as i64;
                let hi = (center + r).floor() as i64;
                for d in lo..=hi {
                    let u = cf * p.x.re + d as f64;
                    let a = (u * u + cf * cf * p.y * p.y) / p.y;
                    if a <= bound && num_integer::Integer::gcd(&c, &d) == 1 {
                        f(OElem::new(c, 0), OElem::new(d, 0), 1.0 / a);
                    }
                }
            }
        }
        (2, 2) => {
            let reg = field.regulator;
            let amax = bound.sqrt() * reg.exp();
            let w = field.omega_embeddings();
            let (w1, w2) = (w[0].re, w[1].re);
            let (p1, p2) = (z.coords[0], z.coords[1]);
            let c1max = (amax / p1.y).sqrt();
            let c2max = (amax / p2.y).sqrt();
            let dw = w1 - w2;
            let nlim = ((c1max + c2max) / dw).floor() as i64;
            for n in -nlim..=nlim {
                let nf = n as f64;
                // c_1 = m + n w1 in (0, c1max], |m + n w2| <= c2max
                let lo = (-nf * w1).max(-c2max - nf * w2);
                let hi = (c1max - nf * w1).min(c2max - nf * w2);
                if lo > hi {
                    continue;
                }
                for m in (lo.floor() as i64)..=(hi.ceil() as i64) {
                    let c = OElem::new(m, n);
                    let c1 = m as f64 + nf * w1;
                    let c2 = m as f64 + nf * w2;
                    if c1 <= 0.0 || c1 > c1max || c2.abs() > c2max {
                        continue;
                    }
                    let rem1 = amax * p1.y - c1 * c1 * p1.y * p1.y;
                    let rem2 = amax * p2.y - c2 * c2 * p2.y * p2.y;
                    if rem1 < 0.0 || rem2 < 0.0 {
                        continue;
                    }
                    let (r1, r2) = (rem1.sqrt(), rem2.sqrt());
                    let (ctr1, ctr2) = (-c1 * p1.x.re, -c2 * p2.x.re);
                    let dn_lo = ((ctr1 - r1) - (ctr2 + r2)) / dw;
                    let dn_hi = ((ctr1 + r1) - (ctr2 - r2)) / dw;
                    for dn in (dn_lo.ceil() as i64)..=(dn_hi.floor() as i64) {
                        let dnf = dn as f64;
                        let mlo = (ctr1 - r1 - dnf * w1).max(ctr2 - r2 - dnf * w2);
                        let mhi = (ctr1 + r1 - dnf * w1).min(ctr2 + r2 - dnf * w2);
                        for dm in (mlo.ceil() as i64)..=(mhi.floor() as i64) {
                            let d1 = dm as f64 + dnf * w1;
                            let d2 = dm as f64 + dnf * w2;
                            let u1 = c1 * p1.x.re + d1;
                            let u2 = c2 * p2.x.re + d2;
                            let a1 = (u1 * u1 + c1 * c1 * p1.y * p1.y) / p1.y;
                            let a2 = (u2 * u2 + c2 * c2 * p2.y * p2.y) / p2.y;
                            let prod = a1 * a2;
                            if prod > bound {
                                continue;
                            }
                            // one representative per unit orbit: log(a1/a2)/2 in [-R, R)
                            let t = 0.5 * (a1 / a2).ln();
                            if t < -reg || t >= reg {
                                continue;
                            }
                            let d = OElem::new(dm, dn);
                            if ring.coprime(c, d)? {
                                f(c, d, 1.0 / prod);
                            }
                        }
                    }
                }
            }
        }
        _ => {
            let p = z.coords[0];
            let amax = bound.sqrt();
            let w = field.omega_embeddings()[0];
            let cmax = (amax / p.y).sqrt();
            let nlim = (cmax / w.im).floor() as i64;
            let unit_order = field.roots_of_unity;
            for n in -nlim..=nlim {
                let nf = n as f64;
                let im = nf * w.im;
                let half = (cmax * cmax - im * im).max(0.0).sqrt();
                let lo = (-half - nf * w.re).ceil() as i64;
                let hi = (half - nf * w.re).floor() as i64;
                for m in lo..=hi {
                    let c = OElem::new(m, n);
                    if c.is_zero() {
                        continue;
                    }
                    let canonical = if unit_order == 2 { n > 0 || (n == 0 && m > 0) } else { m > 0 && n >= 0 };
                    if !canonical {
                        continue;
                    }
                    let cz = Complex64::new(m as f64, 0.0) + w * nf;
                    let rem = amax * p.y - cz.norm_sqr() * p.y * p.y;
                    if rem < 0.0 {
                        continue;
                    }
                    let r = rem.sqrt();
                    let ctr = -cz * p.x;
                    let dn_lo = ((ctr.im - r) / w.im).ceil() as i64;
                    let dn_hi = ((ctr.im + r) / w.im).floor() as i64;
                    for dn in dn_lo..=dn_hi {
                        let dnf = dn as f64;
                        let dim = dnf * w.im - ctr.im;
                        let hh = (r * r - dim * dim).max(0.0).sqrt();
                        let mlo = (ctr.re - hh - dnf * w.re).ceil() as i64;
                        let mhi = (ctr.re + hh - dnf * w.re).floor() as i64;
                        for dm in mlo..=mhi {
                            let dz = Complex64::new(dm as f64, 0.0) + w * dnf;
                            let u = cz * p.x + dz;
                            let a = (u.norm_sqr() + cz.norm_sqr() * p.y * p.y) / p.y;
                            let prod = a * a;
                            if prod > bound {
                                continue;
                            }
                            let d = OElem::new(dm, dn);
                            if ring.coprime(c, d)? {
                                f(c, d, 1.0 / prod);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Completes a coprime pair `(c, d)` to `gamma = [[a, b], [c, d]]` in
/// `SL(2, o_K)`; then `N(y(gamma z)) = mu`.
pub fn complete_pair(field: &FieldData, c: OElem, d: OElem) -> Result<GroupElement> {
    let ring = &field.ring;
    if c.is_zero() {
        let dinv = ring
            .inv_unit(d)
            .or_else(|| if field.is_rational() && d.m.abs() == 1 { Some(d) } else { None })
            .ok_or_else(|| Error::DomainError("pair is not coprime".into()))?;
        return GroupElement::from_oelems(field, dinv, OElem::ZERO, OElem::ZERO, d);
    }
    // x d + y c = g, g a unit
    let (g, x, y) = ring.xgcd(d, c)?;
    let ginv = ring
        .inv_unit(g)
        .or_else(|| if field.is_rational() && g.m.abs() == 1 { Some(g) } else { None })
        .ok_or_else(|| Error::DomainError("pair is not coprime".into()))?;
    let a = ring.mul(x, ginv);
    let b = -ring.mul(y, ginv);
    GroupElement::from_oelems(field, a, b, c, d)
}

/// The pair of largest height at `z`, i.e. the cusp whose sphere of influence
/// contains `z`, with its height.
pub fn nearest_cusp_pair(field: &FieldData, z: &Point) -> Result<(OElem, OElem, f64)> {
    let mut floor = 0.5;
    loop {
        let mut best: Option<(OElem, OElem, f64)> = None;
        for_each_pair(field, z, 1.0 / floor, |c, d, mu| {
            if best.map_or(true, |b| mu > b.2) {
                best = Some((c, d, mu));
            }
        })?;
        if let Some(b) = best {
            return Ok(b);
        }
        floor *= 0.5;
        if floor < 1e-6 {
            return Err(Error::NotConvergent("no cusp found near point".into()));
        }
    }
}

/// Random-scan estimate of `l1`: the largest second-highest cusp height seen
/// over `samples` points drawn by `next_uniform` (values in `[0, 1)`). Regions
/// `{mu(lambda, .) > T}` for distinct cusps are disjoint once `T >= l1`.
pub fn estimate_l1<R: FnMut() -> f64>(field: &FieldData, samples: usize, mut next_uniform: R) -> Result<f64> {
    let frame = CoordFrame::new(field, &Cusp::infinity(field))?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let lc = LocalCoords {
            q: 0.2 + 1.6 * next_uniform(),
            y_coords: (0..field.unit_rank()).map(|_| next_uniform() - 0.5).collect(),
            x_coords: (0..field.degree).map(|_| next_uniform() - 0.5).collect(),
        };
        let z = frame.from_local_coords(&lc);
        let (mut h1, mut h2) = (0.0f64, 0.0f64);
        for_each_pair(field, &z, 1.0 / 0.1, |_, _, mu| {
            if mu > h1 {
                h2 = h1;
                h1 = mu;
            } else if mu > h2 {
                h2 = mu;
            }
        })?;
        worst = worst.max(h2);
    }
    Ok(worst)
}

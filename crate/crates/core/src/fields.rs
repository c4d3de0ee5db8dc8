//! Quadratic fields `K = Q(sqrt d)` of class number one (and `K = Q`, encoded as
//! `d = 0`), their rings of integers, units, embeddings and ideal counts.
//!
//! Two representations of field elements are used. [`FieldElement`] stores
//! `a + b sqrt(d)` with exact rationals and is the public currency of the
//! crate. [`OElem`] stores an algebraic integer `m + n w` by its coordinates in
//! the integral basis `{1, w}` as machine integers; the enumeration loops work
//! with it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Norm-Euclidean quadratic fields (all of class number one) plus `Q` as `d = 0`.
/// Euclidean division is what the cusp, gcd and divisor code relies on.
pub const SUPPORTED_D: [i64; 17] = [-11, -7, -3, -2, -1, 0, 2, 3, 5, 6, 7, 11, 13, 17, 19, 21, 29];

const UNIT_SEARCH_CAP: usize = 10_000;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_to_f64(x: &BigRational) -> f64 {
    // numerator and denominator can exceed f64 for high unit powers
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = x.numer().bits().max(x.denom().bits()) as i64 - 60;
            let sh = shift.max(0) as usize;
            let n = (x.numer() >> sh).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> sh).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                f64::INFINITY * n.signum()
            } else {
                n / d
            }
        }
    }
}

/// `a + b sqrt(d)` with rational `a`, `b`. For `d = 0` the element is the
/// rational number `a` and `b` is kept at zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    d: i64,
    a: BigRational,
    b: BigRational,
}

impl FieldElement {
    pub fn new(d: i64, a: BigRational, b: BigRational) -> Self {
        let b = if d == 0 { BigRational::zero() } else { b };
        FieldElement { d, a, b }
    }

    pub fn from_ints(d: i64, a: i64, b: i64) -> Self {
        Self::new(d, rat(a), rat(b))
    }

    /// `(a_num/a_den) + (b_num/b_den) sqrt(d)`.
    pub fn from_fracs(d: i64, a: (i64, i64), b: (i64, i64)) -> Self {
        Self::new(
            d,
            BigRational::new(BigInt::from(a.0), BigInt::from(a.1)),
            BigRational::new(BigInt::from(b.0), BigInt::from(b.1)),
        )
    }

    pub fn integer(d: i64, n: i64) -> Self {
        Self::from_ints(d, n, 0)
    }

    pub fn zero(d: i64) -> Self {
        Self::integer(d, 0)
    }

    pub fn one(d: i64) -> Self {
        Self::integer(d, 1)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElement { d: self.d, a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm: `a` over `Q`, `a^2 - d b^2` otherwise.
    pub fn norm(&self) -> BigRational {
        if self.d == 0 {
            self.a.clone()
        } else {
            &self.a * &self.a - rat(self.d) * &self.b * &self.b
        }
    }

    pub fn trace(&self) -> BigRational {
        if self.d == 0 {
            self.a.clone()
        } else {
            rat(2) * &self.a
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.d == 0 {
            return Some(FieldElement { d: 0, a: self.a.recip(), b: BigRational::zero() });
        }
        let n = self.norm();
        Some(FieldElement { d: self.d, a: &self.a / &n, b: -(&self.b / &n) })
    }

    pub fn pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = FieldElement::one(self.d);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Some(acc)
    }

    /// Coordinates in the integral basis `{1, w}` when the element is an
    /// algebraic integer.
    pub fn to_oelem(&self) -> Option<OElem> {
        let (m, n) = if self.d == 0 {
            (self.a.clone(), BigRational::zero())
        } else if self.d.rem_euclid(4) == 1 {
            // a + b sqrt d = (a - b) + 2b * (1 + sqrt d)/2
            (&self.a - &self.b, rat(2) * &self.b)
        } else {
            (self.a.clone(), self.b.clone())
        };
        if !m.is_integer() || !n.is_integer() {
            return None;
        }
        Some(OElem { m: m.to_integer().to_i64()?, n: n.to_integer().to_i64()? })
    }

    pub fn is_integral(&self) -> bool {
        if self.d == 0 {
            return self.a.is_integer();
        }
        self.trace().is_integer() && self.norm().is_integer()
    }

    /// Approximate `(a, b)` as floats.
    pub fn to_f64_parts(&self) -> (f64, f64) {
        (rat_to_f64(&self.a), rat_to_f64(&self.b))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 0 || self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt({})", self.b, self.d);
        }
        if self.b.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.a, -self.b.clone(), self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.d, o.d);
        FieldElement { d: self.d, a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.d, o.d);
        FieldElement { d: self.d, a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        debug_assert_eq!(self.d, o.d);
        let a = &self.a * &o.a + rat(self.d) * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        FieldElement { d: self.d, a, b }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { d: self.d, a: -self.a.clone(), b: -self.b.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// An algebraic integer `m + n w` in integral-basis coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct OElem {
    pub m: i64,
    pub n: i64,
}

impl OElem {
    pub const ZERO: OElem = OElem { m: 0, n: 0 };
    pub const ONE: OElem = OElem { m: 1, n: 0 };

    pub fn new(m: i64, n: i64) -> Self {
        OElem { m, n }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0 && self.n == 0
    }
}

impl Add for OElem {
    type Output = OElem;
    fn add(self, o: OElem) -> OElem {
        OElem { m: self.m + o.m, n: self.n + o.n }
    }
}

impl Sub for OElem {
    type Output = OElem;
    fn sub(self, o: OElem) -> OElem {
        OElem { m: self.m - o.m, n: self.n - o.n }
    }
}

impl Neg for OElem {
    type Output = OElem;
    fn neg(self) -> OElem {
        OElem { m: -self.m, n: -self.n }
    }
}

/// Arithmetic in `o_K` on [`OElem`] coordinates, with `w^2 = t w + u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegerRing {
    pub d: i64,
    pub t: i64,
    pub u: i64,
}

impl IntegerRing {
    pub fn new(d: i64) -> Self {
        if d == 0 {
            IntegerRing { d, t: 0, u: 0 }
        } else if d.rem_euclid(4) == 1 {
            IntegerRing { d, t: 1, u: (d - 1) / 4 }
        } else {
            IntegerRing { d, t: 0, u: d }
        }
    }

    pub fn mul(&self, x: OElem, y: OElem) -> OElem {
        OElem {
            m: x.m * y.m + self.u * x.n * y.n,
            n: x.m * y.n + x.n * y.m + self.t * x.n * y.n,
        }
    }

    pub fn conj(&self, x: OElem) -> OElem {
        if self.d == 0 {
            x
        } else {
            OElem { m: x.m + self.t * x.n, n: -x.n }
        }
    }

    /// `N(m + n w) = m^2 + t m n - u n^2`; over `Q` just `m`.
    pub fn norm(&self, x: OElem) -> i128 {
        if self.d == 0 {
            return x.m as i128;
        }
        let (m, n) = (x.m as i128, x.n as i128);
        m * m + self.t as i128 * m * n - self.u as i128 * n * n
    }

    pub fn is_unit(&self, x: OElem) -> bool {
        self.norm(x).abs() == 1
    }

    pub fn to_field(&self, x: OElem) -> FieldElement {
        if self.d == 0 {
            FieldElement::integer(0, x.m)
        } else if self.t == 1 {
            FieldElement::new(
                self.d,
                rat(x.m) + BigRational::new(BigInt::from(x.n), BigInt::from(2)),
                BigRational::new(BigInt::from(x.n), BigInt::from(2)),
            )
        } else {
            FieldElement::from_ints(self.d, x.m, x.n)
        }
    }

    /// Exact quotient `x / y` if it lies in `o`.
    pub fn div_exact(&self, x: OElem, y: OElem) -> Option<OElem> {
        let ny = self.norm(y);
        if ny == 0 {
            return None;
        }
        if self.d == 0 {
            return if x.m % y.m == 0 { Some(OElem::new(x.m / y.m, 0)) } else { None };
        }
        let p = self.mul_wide(x, self.conj(y));
        if p.0 % ny != 0 || p.1 % ny != 0 {
            return None;
        }
        Some(OElem { m: (p.0 / ny) as i64, n: (p.1 / ny) as i64 })
    }

    fn mul_wide(&self, x: OElem, y: OElem) -> (i128, i128) {
        let (xm, xn, ym, yn) = (x.m as i128, x.n as i128, y.m as i128, y.n as i128);
        (xm * ym + self.u as i128 * xn * yn, xm * yn + xn * ym + self.t as i128 * xn * yn)
    }

    /// Euclidean division `x = q y + r` with `|N(r)| < |N(y)|`.
    pub fn div_rem(&self, x: OElem, y: OElem) -> Result<(OElem, OElem)> {
        let ny = self.norm(y);
        if ny == 0 {
            return Err(Error::DomainError("division by zero in o_K".into()));
        }
        if self.d == 0 {
            let q = Integer::div_floor(&x.m, &y.m);
            let mut best = (q, x.m - q * y.m);
            let alt = (q + 1, x.m - (q + 1) * y.m);
            if alt.1.abs() < best.1.abs() {
                best = alt;
            }
            return Ok((OElem::new(best.0, 0), OElem::new(best.1, 0)));
        }
        let p = self.mul_wide(x, self.conj(y));
        let round = |v: i128| -> i64 {
            let q = Integer::div_floor(&v, &ny);
            let r = v - q * ny;
            let q = if 2 * r.abs() > ny.abs() { q + ny.signum() } else { q };
            q as i64
        };
        let (q0m, q0n) = (round(p.0), round(p.1));
        for radius in [2i64, 6, 20] {
            let mut best: Option<(i128, OElem, OElem)> = None;
            for i in -radius..=radius {
                for j in -radius..=radius {
                    let q = OElem::new(q0m + i, q0n + j);
                    let r = x - self.mul(q, y);
                    let nr = self.norm(r).abs();
                    if best.map_or(true, |b| nr < b.0) {
                        best = Some((nr, q, r));
                    }
                }
            }
            let (nr, q, r) = best.expect("non-empty search window");
            if nr < ny.abs() {
                return Ok((q, r));
            }
        }
        Err(Error::NotConvergent("no Euclidean quotient found".into()))
    }

    /// Extended Euclid: `(g, a, b)` with `a x + b y = g`, `g` a gcd.
    pub fn xgcd(&self, x: OElem, y: OElem) -> Result<(OElem, OElem, OElem)> {
        let (mut r0, mut r1) = (x, y);
        let (mut a0, mut a1) = (OElem::ONE, OElem::ZERO);
        let (mut b0, mut b1) = (OElem::ZERO, OElem::ONE);
        while !r1.is_zero() {
            let (q, r) = self.div_rem(r0, r1)?;
            r0 = r1;
            r1 = r;
            let a2 = a0 - self.mul(q, a1);
            a0 = a1;
            a1 = a2;
            let b2 = b0 - self.mul(q, b1);
            b0 = b1;
            b1 = b2;
        }
        Ok((r0, a0, b0))
    }

    pub fn gcd(&self, x: OElem, y: OElem) -> Result<OElem> {
        if self.d == 0 {
            return Ok(OElem::new(x.m.gcd(&y.m), 0));
        }
        let (mut r0, mut r1) = (x, y);
        while !r1.is_zero() {
            let (_, r) = self.div_rem(r0, r1)?;
            r0 = r1;
            r1 = r;
        }
        Ok(r0)
    }

    pub fn coprime(&self, x: OElem, y: OElem) -> Result<bool> {
        Ok(self.is_unit(self.gcd(x, y)?))
    }

    pub fn inv_unit(&self, x: OElem) -> Option<OElem> {
        match (self.d, self.norm(x)) {
            (0, _) => None,
            (_, 1) => Some(self.conj(x)),
            (_, -1) => Some(-self.conj(x)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PlaceKind {
    Real,
    Complex,
}

impl PlaceKind {
    /// Local degree `N_i`.
    pub fn weight(self) -> u32 {
        match self {
            PlaceKind::Real => 1,
            PlaceKind::Complex => 2,
        }
    }
}

/// Everything the rest of the crate needs to know about `K`.
#[derive(Clone, Debug, Serialize)]
pub struct FieldData {
    pub d: i64,
    pub degree: usize,
    pub r1: usize,
    pub r2: usize,
    /// `|d_K|`, with `1` for `Q`.
    pub disc: u64,
    /// Fundamental discriminant `d_K` with its sign.
    pub signed_disc: i64,
    pub class_number: u32,
    pub roots_of_unity: u32,
    pub fundamental_unit: Option<FieldElement>,
    pub regulator: f64,
    pub integral_basis: Vec<FieldElement>,
    /// Generator of the different ideal; `|N| = disc`.
    pub different_gen: FieldElement,
    #[serde(skip)]
    pub ring: IntegerRing,
    #[serde(skip)]
    pub places: Vec<PlaceKind>,
    #[serde(skip)]
    omega_emb: Vec<Complex64>,
    #[serde(skip)]
    unit_o: Option<OElem>,
    #[serde(skip)]
    root_o: OElem,
}

impl PartialEq for FieldData {
    fn eq(&self, o: &Self) -> bool {
        self.d == o.d
    }
}

pub fn make_field(d: i64) -> Result<FieldData> {
    if !SUPPORTED_D.contains(&d) {
        return Err(Error::UnsupportedField(d));
    }
    let ring = IntegerRing::new(d);
    if d == 0 {
        return Ok(FieldData {
            d,
            degree: 1,
            r1: 1,
            r2: 0,
            disc: 1,
            signed_disc: 1,
            class_number: 1,
            roots_of_unity: 2,
            fundamental_unit: None,
            regulator: 1.0,
            integral_basis: vec![FieldElement::one(0)],
            different_gen: FieldElement::one(0),
            ring,
            places: vec![PlaceKind::Real],
            omega_emb: vec![Complex64::new(0.0, 0.0)],
            unit_o: None,
            root_o: OElem::new(-1, 0),
        });
    }
    let one_mod_four = d.rem_euclid(4) == 1;
    let signed_disc = if one_mod_four { d } else { 4 * d };
    let omega = if one_mod_four {
        FieldElement::from_fracs(d, (1, 2), (1, 2))
    } else {
        FieldElement::from_ints(d, 0, 1)
    };
    let different_gen = if one_mod_four {
        FieldElement::from_ints(d, 0, 1)
    } else {
        FieldElement::from_ints(d, 0, 2)
    };
    let sq = (d.abs() as f64).sqrt();
    let (r1, r2, places, omega_emb) = if d > 0 {
        let (w1, w2) = if one_mod_four { ((1.0 + sq) / 2.0, (1.0 - sq) / 2.0) } else { (sq, -sq) };
        (2, 0, vec![PlaceKind::Real, PlaceKind::Real], vec![Complex64::new(w1, 0.0), Complex64::new(w2, 0.0)])
    } else {
        let w = if one_mod_four { Complex64::new(0.5, sq / 2.0) } else { Complex64::new(0.0, sq) };
        (0, 1, vec![PlaceKind::Complex], vec![w])
    };
    let roots_of_unity = match d {
        -1 => 4,
        -3 => 6,
        _ => 2,
    };
    // generator of the root-of-unity group W
    let root_o = match d {
        -1 => OElem::new(0, 1),
        -3 => OElem::new(0, 1),
        _ => OElem::new(-1, 0),
    };
    let (fundamental_unit, unit_o, regulator) = if d > 0 {
        let u = fundamental_unit_cf(&ring)?;
        let eps = embed_oelem_real(&omega_emb, u, 0);
        (Some(ring.to_field(u)), Some(u), eps.abs().ln())
    } else {
        (None, None, 1.0)
    };
    Ok(FieldData {
        d,
        degree: 2,
        r1,
        r2,
        disc: signed_disc.unsigned_abs(),
        signed_disc,
        class_number: 1,
        roots_of_unity,
        fundamental_unit,
        regulator,
        integral_basis: vec![FieldElement::one(d), omega],
        different_gen,
        ring,
        places,
        omega_emb,
        unit_o,
        root_o,
    })
}

fn embed_oelem_real(omega_emb: &[Complex64], x: OElem, i: usize) -> f64 {
    x.m as f64 + x.n as f64 * omega_emb[i].re
}

/// Fundamental unit from the continued fraction of `theta = -w'`: a unit
/// `p + q w > 1` has `p/q` close to `theta`, so it shows up among the
/// convergents. The first convergent of norm `+-1` is the fundamental unit.
fn fundamental_unit_cf(ring: &IntegerRing) -> Result<OElem> {
    let d = ring.d;
    let sd = num_integer::Roots::sqrt(&d);
    // theta = (P + sqrt d)/Q
    let (mut p_, mut q_) = if ring.t == 1 { (-1i128, 2i128) } else { (0i128, 1i128) };
    let d128 = d as i128;
    let sd128 = sd as i128;
    // convergents p_k/q_k seeded with p_{-2}, p_{-1} = 0, 1 and q_{-2}, q_{-1} = 1, 0
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    for _ in 0..UNIT_SEARCH_CAP {
        let a = if q_ > 0 {
            Integer::div_floor(&(p_ + sd128), &q_)
        } else {
            // floor((P + sqrt d)/Q) for Q < 0
            -(Integer::div_floor(&(p_ + sd128), &(-q_)) + 1)
        };
        let h_new = BigInt::from(a) * &h + &h_prev;
        let k_new = BigInt::from(a) * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_new);
        k_prev = std::mem::replace(&mut k, k_new);
        if let (Some(pm), Some(qn)) = (h.to_i64(), k.to_i64()) {
            let cand = OElem::new(pm, qn);
            if qn > 0 && ring.norm(cand).abs() == 1 {
                return Ok(cand);
            }
        } else {
            break;
        }
        let p_next = a * q_ - p_;
        let q_next = (d128 - p_next * p_next) / q_;
        p_ = p_next;
        q_ = q_next;
    }
    Err(Error::NotConvergent("continued fraction unit search".into()))
}

impl FieldData {
    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    /// Number of archimedean places `r = r1 + r2`.
    pub fn num_places(&self) -> usize {
        self.r1 + self.r2
    }

    pub fn unit_rank(&self) -> usize {
        self.num_places() - 1
    }

    /// Embeddings of `w` (the second integral basis element); zero over `Q`.
    pub fn omega_embeddings(&self) -> &[Complex64] {
        &self.omega_emb
    }

    pub fn fundamental_unit_o(&self) -> Option<OElem> {
        self.unit_o
    }

    /// Generator of the group of roots of unity (`-1`, `i`, or `(1 + sqrt -3)/2`).
    pub fn root_of_unity_o(&self) -> OElem {
        self.root_o
    }

    pub fn embed_o(&self, x: OElem) -> Vec<Complex64> {
        self.omega_emb.iter().map(|w| Complex64::new(x.m as f64, 0.0) + *w * x.n as f64).collect()
    }

    /// Absolute values at each place (`|x|`, not squared).
    pub fn abs_o(&self, x: OElem) -> Vec<f64> {
        self.embed_o(x).iter().map(|z| z.norm()).collect()
    }

    pub fn to_oelem(&self, x: &FieldElement) -> Option<OElem> {
        x.to_oelem()
    }

    pub fn sqrt_disc(&self) -> f64 {
        (self.disc as f64).sqrt()
    }
}

/// Embeds `x` at each archimedean place. Real places give a real value in a
/// `Complex64`; for real quadratic fields place 0 sends `sqrt d` to `+sqrt d`.
pub fn embed(field: &FieldData, x: &FieldElement) -> Vec<Complex64> {
    let (a, b) = x.to_f64_parts();
    let sq = (field.d.abs() as f64).sqrt();
    match (field.degree, field.r1) {
        (1, _) => vec![Complex64::new(a, 0.0)],
        (_, 2) => vec![Complex64::new(a + b * sq, 0.0), Complex64::new(a - b * sq, 0.0)],
        _ => vec![Complex64::new(a, b * sq)],
    }
}

/// `eps^k` exactly, for the fundamental unit `eps` of a real quadratic field.
pub fn unit_power(field: &FieldData, k: i64) -> Result<FieldElement> {
    let eps = field.fundamental_unit.as_ref().ok_or(Error::NoUnits)?;
    eps.pow(k).ok_or(Error::NoUnits)
}

/// Kronecker symbol `(a/n)` for `n >= 1`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i32;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        // (a/2) = 1 for a = +-1 mod 8, -1 for a = +-3 mod 8
        let r = a.rem_euclid(8);
        if tz % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        n >>= tz;
    }
    // Jacobi symbol (a/n) for odd n
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Quadratic character `chi_K(n) = (d_K / n)`; identically one over `Q`.
pub fn character(field: &FieldData, n: u64) -> i32 {
    if field.is_rational() {
        1
    } else {
        kronecker(field.signed_disc, n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeType {
    /// Over `Q`: one prime of norm `p`.
    Rational,
    Split,
    Inert,
    Ramified,
}

pub fn prime_type(field: &FieldData, p: u64) -> PrimeType {
    if field.is_rational() {
        return PrimeType::Rational;
    }
    match character(field, p) {
        1 => PrimeType::Split,
        -1 => PrimeType::Inert,
        _ => PrimeType::Ramified,
    }
}

/// Ideal counts `a_n = #{ideals of norm n}` for `n = 1..=len`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCoeffs {
    values: Vec<u32>,
}

impl DirichletCoeffs {
    /// `a_n`; `n` starts at 1.
    pub fn get(&self, n: usize) -> u32 {
        self.values[n - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.values
    }
}

/// Smallest-prime-factor table for `0..=n`.
pub(crate) fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// `a_n` for `n <= len`, built multiplicatively from the splitting of primes.
pub fn ideal_count_coeffs(field: &FieldData, len: usize) -> DirichletCoeffs {
    if len == 0 {
        return DirichletCoeffs { values: vec![] };
    }
    let spf = spf_sieve(len);
    let mut a = vec![0u32; len + 1];
    a[1] = 1;
    for n in 2..=len {
        let p = spf[n] as usize;
        let mut m = n;
        let mut k = 0u32;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let local = match prime_type(field, p as u64) {
            PrimeType::Rational | PrimeType::Ramified => 1,
            PrimeType::Split => k + 1,
            PrimeType::Inert => {
                if k % 2 == 0 {
                    1
                } else {
                    0
                }
            }
        };
        a[n] = a[m] * local;
    }
    a.remove(0);
    DirichletCoeffs { values: a }
}

/// A principal ideal `(generator)` together with its absolute norm.
#[derive(Clone, Debug)]
pub struct IdealRep {
    pub generator: FieldElement,
    pub norm: BigRational,
}

impl IdealRep {
    pub fn principal(x: FieldElement) -> Self {
        let norm = x.norm().abs();
        IdealRep { generator: x, norm }
    }

    pub fn unit(d: i64) -> Self {
        Self::principal(FieldElement::one(d))
    }
}

impl PartialEq for IdealRep {
    /// Equal when the generators differ by a unit of `o_K`.
    fn eq(&self, o: &Self) -> bool {
        if self.generator.is_zero() || o.generator.is_zero() {
            return self.generator.is_zero() && o.generator.is_zero();
        }
        let Some(inv) = o.generator.inv() else { return false };
        let q = &self.generator * &inv;
        q.is_integral() && q.norm().abs().is_one()
    }
}

/// Generators of the fractional ideal `(x, y)` in a class-number-one field:
/// returns `g` with `(g) = (x, y)` for algebraic integers `x`, `y`.
pub fn ideal_gcd(field: &FieldData, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
    let xo = x.to_oelem().ok_or_else(|| Error::DomainError("non-integral element".into()))?;
    let yo = y.to_oelem().ok_or_else(|| Error::DomainError("non-integral element".into()))?;
    Ok(field.ring.to_field(field.ring.gcd(xo, yo)?))
}

/// Element of `o_K` whose norm has absolute value `p`, if one exists.
pub(crate) fn prime_element(field: &FieldData, p: u64) -> Option<OElem> {
    if field.is_rational() {
        return Some(OElem::new(p as i64, 0));
    }
    let ring = &field.ring;
    let target = p as i128;
    // |N| = p is attained with small coordinates after reducing by units;
    // search a box that grows until found
    let mut radius = 4i64;
    while radius <= 1 << 14 {
        let mut best: Option<OElem> = None;
        for n in 0..=radius {
            for m in -radius..=radius {
                let x = OElem::new(m, n);
                if ring.norm(x).abs() == target {
                    best = Some(x);
                    break;
                }
            }
            if best.is_some() {
                break;
            }
        }
        if best.is_some() {
            return best;
        }
        radius *= 4;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(d: i64, a: i64, b: i64) -> FieldElement {
        FieldElement::from_ints(d, a, b)
    }

    #[test]
    fn discriminants_and_allow_list() {
        let cases = [(5, 5u64), (-1, 4), (0, 1), (2, 8), (-3, 3), (6, 24), (29, 29)];
        for (d, disc) in cases {
            assert_eq!(make_field(d).unwrap().disc, disc, "d={d}");
        }
        assert!(matches!(make_field(10), Err(Error::UnsupportedField(10))));
        assert!(matches!(make_field(-5), Err(Error::UnsupportedField(-5))));
        assert!(matches!(make_field(4), Err(Error::UnsupportedField(4))));
    }

    /// Brute-force oracle: smallest `a + b w > 1` with `|N| = 1`, scanning by size.
    fn unit_by_search(field: &FieldData) -> OElem {
        let mut best: Option<(f64, OElem)> = None;
        for n in 1..400i64 {
            for m in -2000..2000i64 {
                let x = OElem::new(m, n);
                if field.ring.norm(x).abs() == 1 {
                    let v = field.embed_o(x)[0].re;
                    if v > 1.0 && best.map_or(true, |b| v < b.0) {
                        best = Some((v, x));
                    }
                }
            }
        }
        best.unwrap().1
    }

    #[test]
    fn fundamental_units_match_search() {
        for d in [2, 3, 5, 6, 7, 11, 13, 17, 19, 21, 29] {
            let f = make_field(d).unwrap();
            let u = f.fundamental_unit_o().unwrap();
            assert_eq!(u, unit_by_search(&f), "d={d}");
            assert!((f.regulator - f.embed_o(u)[0].re.ln()).abs() < 1e-14);
        }
        let f = make_field(5).unwrap();
        assert_eq!(f.fundamental_unit.clone().unwrap(), FieldElement::from_fracs(5, (1, 2), (1, 2)));
        assert!((f.regulator - 0.481_211_825_059_603_4).abs() < 1e-14);
        assert_eq!(make_field(2).unwrap().fundamental_unit.unwrap(), fe(2, 1, 1));
        assert_eq!(make_field(3).unwrap().fundamental_unit.unwrap(), fe(3, 2, 1));
        assert_eq!(make_field(6).unwrap().fundamental_unit.unwrap(), fe(6, 5, 2));
    }

    #[test]
    fn imaginary_and_rational_data() {
        let f = make_field(-1).unwrap();
        assert_eq!((f.r1, f.r2, f.roots_of_unity), (0, 1, 4));
        assert_eq!(f.regulator, 1.0);
        let f = make_field(-3).unwrap();
        assert_eq!(f.roots_of_unity, 6);
        let f = make_field(0).unwrap();
        assert_eq!((f.degree, f.disc, f.regulator), (1, 1, 1.0));
        assert!(matches!(unit_power(&f, 2), Err(Error::NoUnits)));
    }

    #[test]
    fn different_norm_is_discriminant() {
        for d in SUPPORTED_D {
            let f = make_field(d).unwrap();
            let n = f.different_gen.norm().abs();
            assert_eq!(n, rat(f.disc as i64), "d={d}");
        }
    }

    #[test]
    fn root_of_unity_generator_has_order_w() {
        for d in [-1, -3, -2, 5] {
            let f = make_field(d).unwrap();
            let w = f.root_of_unity_o();
            let mut x = w;
            let mut k = 1;
            while x != OElem::ONE {
                x = f.ring.mul(x, w);
                k += 1;
            }
            assert_eq!(k, f.roots_of_unity, "d={d}");
        }
    }

    #[test]
    fn unit_power_exact() {
        let f = make_field(5).unwrap();
        let e = unit_power(&f, 1).unwrap();
        let e3 = unit_power(&f, 3).unwrap();
        assert_eq!(e3, &(&e * &e) * &e);
        assert_eq!(&unit_power(&f, -3).unwrap() * &e3, FieldElement::one(5));
        assert_eq!(unit_power(&f, 0).unwrap(), FieldElement::one(5));
    }

    /// Oracle: count `x in o` modulo units with `|N(x)| = n` by enumeration.
    fn ideal_count_brute(f: &FieldData, n: i128) -> u32 {
        let mut count = 0u32;
        let r = 40i64;
        if f.r2 == 1 {
            for a in -r..=r {
                for b in -r..=r {
                    if f.ring.norm(OElem::new(a, b)) == n {
                        count += 1;
                    }
                }
            }
            return count / f.roots_of_unity;
        }
        // real quadratic: x1 > 0 and 1 <= x1/|x2| < eps^2 picks one associate
        let e2 = (2.0 * f.regulator).exp();
        for a in -400..=400 {
            for b in -400..=400 {
                let x = OElem::new(a, b);
                if f.ring.norm(x).abs() == n {
                    let e = f.embed_o(x);
                    let ratio = e[0].re / e[1].re.abs();
                    if e[0].re > 0.0 && ratio >= 1.0 - 1e-12 && ratio < e2 * (1.0 - 1e-12) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn ideal_counts_match_enumeration() {
        for d in [5, -1, -3, 2, 13, -7] {
            let f = make_field(d).unwrap();
            let a = ideal_count_coeffs(&f, 60);
            for n in 1..=60 {
                assert_eq!(a.get(n), ideal_count_brute(&f, n as i128), "d={d} n={n}");
            }
        }
        let f5 = make_field(5).unwrap();
        let a = ideal_count_coeffs(&f5, 11);
        assert_eq!((a.get(4), a.get(5), a.get(11)), (1, 1, 2));
        let fi = make_field(-1).unwrap();
        let a = ideal_count_coeffs(&fi, 5);
        assert_eq!((a.get(2), a.get(3), a.get(5)), (1, 0, 2));
        let fq = make_field(0).unwrap();
        assert!(ideal_count_coeffs(&fq, 30).as_slice().iter().all(|&v| v == 1));
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-4, 5), 1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(12, 2), 0);
        assert_eq!(kronecker(5, 5), 0);
    }

    #[test]
    fn euclid_terminates_and_gcd_divides() {
        for d in SUPPORTED_D {
            let f = make_field(d).unwrap();
            let r = &f.ring;
            for a in -9..9 {
                for b in -9..9 {
                    let k = if d == 0 { 0 } else { 1 };
                    let x = OElem::new(a * 7 + 3, k * b);
                    let y = OElem::new(b * 5 - 2, k * (a + 1));
                    if y.is_zero() {
                        continue;
                    }
                    let (g, u, v) = r.xgcd(x, y).unwrap();
                    assert_eq!(r.mul(u, x) + r.mul(v, y), g);
                    if !g.is_zero() {
                        assert!(r.div_exact(x, g).is_some() && r.div_exact(y, g).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn ideal_equality_up_to_units() {
        let f = make_field(5).unwrap();
        let e = f.fundamental_unit.clone().unwrap();
        let x = fe(5, 3, 1);
        assert_eq!(IdealRep::principal(x.clone()), IdealRep::principal(&x * &e));
        assert_ne!(IdealRep::principal(fe(5, 3, 2)), IdealRep::principal(fe(5, 2, 0)));
        let g = ideal_gcd(&f, &fe(5, 4, 0), &fe(5, 6, 0)).unwrap();
        assert_eq!(IdealRep::principal(g), IdealRep::principal(fe(5, 2, 0)));
    }

    #[test]
    fn embeddings() {
        let f = make_field(5).unwrap();
        let e = embed(&f, &FieldElement::from_fracs(5, (1, 2), (1, 2)));
        assert!((e[0].re - 1.618_033_988_749_895).abs() < 1e-15);
        assert!((e[1].re + 0.618_033_988_749_895).abs() < 1e-15);
        let f = make_field(-1).unwrap();
        let e = embed(&f, &fe(-1, 2, 3));
        assert_eq!(e, vec![Complex64::new(2.0, 3.0)]);
        let f = make_field(-3).unwrap();
        let w = f.embed_o(OElem::new(0, 1))[0];
        assert!((w - Complex64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn prime_elements_have_prime_norm() {
        for d in [5, -1, -3, 2, 29, -11] {
            let f = make_field(d).unwrap();
            for p in [2u64, 3, 5, 7, 11, 13, 29, 31] {
                if prime_type(&f, p) != PrimeType::Inert {
                    let x = prime_element(&f, p).unwrap();
                    assert_eq!(f.ring.norm(x).unsigned_abs(), p as u128, "d={d} p={p}");
                }
            }
        }
    }
}

//! Complex gamma function and the modified Bessel function `K_nu(y)` for
//! complex order and positive argument.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::PlaceKind;

// Lanczos coefficients, g = 671/128 (15 terms including the constant)
const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn check_pole(s: Complex64) -> Result<()> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::PoleAtNonPositiveInteger(s.re as i64));
    }
    Ok(())
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    for (j, c) in LANCZOS.iter().enumerate() {
        ser += *c / (z + (j + 1) as f64);
    }
    let tmp = z + LANCZOS_G;
    (z + 0.5) * tmp.ln() - tmp + (ser * SQRT_2PI / z).ln()
}

/// A logarithm of `Gamma(s)`: `exp(ln_gamma(s)) = Gamma(s)`. Not the principal
/// branch of `log Gamma`; use it to avoid overflow or underflow.
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    check_pole(s)?;
    if s.re >= 0.5 {
        return Ok(ln_gamma_right(s));
    }
    // reflection: Gamma(s) = pi / (sin(pi s) Gamma(1 - s))
    let sin = (s * PI).sin();
    Ok(Complex64::new(PI.ln(), 0.0) - sin.ln() - ln_gamma_right(1.0 - s))
}

pub fn gamma(s: Complex64) -> Result<Complex64> {
    check_pole(s)?;
    if s.re >= 0.5 {
        return Ok(ln_gamma_right(s).exp());
    }
    let sin = (s * PI).sin();
    Ok(PI / (sin * ln_gamma_right(1.0 - s).exp()))
}

pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

const BESSEL_REL_TOL: f64 = 1e-12;
const BESSEL_MAX_NODES: usize = 1 << 16;
const BESSEL_DYNAMIC_RANGE: f64 = 40.0;

/// `K_nu(y) = (1/2) int_R exp(-y cosh u + nu u) du` for `y > 0`.
///
/// The integration line is moved to `Im u = alpha` towards the saddle point so
/// that large imaginary orders do not cancel catastrophically; the shifted
/// integrand is then summed with the trapezoid rule, halving the step until two
/// successive sums agree to `1e-12` relative (at most `2^16` nodes).
pub fn bessel_k(nu: Complex64, y: f64) -> Result<Complex64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::DomainError(format!("bessel_k needs y > 0, got {y}")));
    }
    // K_{-nu} = K_nu
    let nu = if nu.re < 0.0 { -nu } else { nu };
    let lim = FRAC_PI_2 - 0.1;
    let alpha = (nu / y).asinh().im.clamp(-lim, lim);
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let sigma = nu.re;
    // real part of the exponent along the shifted line
    let h = |u: f64| -y * ca * u.cosh() + sigma * u;
    let u_star = (sigma / (y * ca)).asinh();
    let h_max = h(u_star);
    let floor = h_max - BESSEL_DYNAMIC_RANGE;
    let mut hi = u_star + 0.25;
    while h(hi) > floor {
        hi += 0.25 + 0.25 * (hi - u_star);
    }
    let mut lo = u_star - 0.25;
    while h(lo) > floor {
        lo -= 0.25 + 0.25 * (u_star - lo);
    }
    // exp(-y cosh(u + i alpha) + nu (u + i alpha) - h_max)
    let phase0 = nu * Complex64::new(0.0, alpha);
    let g = |u: f64| -> Complex64 {
        let ch = Complex64::new(u.cosh() * ca, u.sinh() * sa);
        let e = -y * ch + nu * u + phase0 - h_max;
        e.exp()
    };
    let mut n = 32usize;
    let mut step = (hi - lo) / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        sum += g(lo + k as f64 * step) * w;
    }
    let mut est = sum * step;
    loop {
        // add midpoints
        let mut mid = Complex64::new(0.0, 0.0);
        for k in 0..n {
            mid += g(lo + (k as f64 + 0.5) * step);
        }
        sum += mid;
        n *= 2;
        step *= 0.5;
        let new = sum * step;
        let diff = (new - est).norm();
        est = new;
        if diff <= BESSEL_REL_TOL * est.norm() || n >= BESSEL_MAX_NODES {
            break;
        }
    }
    Ok(0.5 * est * Complex64::new(h_max, 0.0).exp())
}

pub fn bessel_k_real(nu: f64, y: f64) -> Result<f64> {
    Ok(bessel_k(Complex64::new(nu, 0.0), y)?.re)
}

/// `prod_i K_nu(c_i y_i |l_i|)` with `c_i = 2 pi` at real places and `4 pi` at
/// complex places.
pub fn bessel_k_product(nu: Complex64, y: &[f64], l_abs: &[f64], places: &[PlaceKind]) -> Result<Complex64> {
    let mut prod = Complex64::new(1.0, 0.0);
    for ((yi, li), kind) in y.iter().zip(l_abs).zip(places) {
        if *li == 0.0 {
            return Err(Error::ZeroFrequency);
        }
        let c = match kind {
            PlaceKind::Real => 2.0 * PI,
            PlaceKind::Complex => 4.0 * PI,
        };
        prod *= bessel_k(nu, c * yi * li)?;
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_classical_values() {
        assert!((gamma_real(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_real(4.0).unwrap() - 6.0).abs() < 1e-13);
        assert!((gamma_real(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(matches!(gamma(c(0.0, 0.0)), Err(Error::PoleAtNonPositiveInteger(0))));
        assert!(matches!(gamma(c(-3.0, 0.0)), Err(Error::PoleAtNonPositiveInteger(-3))));
    }

    /// Frozen values from an arbitrary-precision evaluation of Gamma.
    #[test]
    fn gamma_complex_reference() {
        let cases = [
            (c(0.5, 1.0), c(0.300_694_617_260_655_82, -0.424_967_879_433_123_81)),
            (c(1.3, 0.5), c(0.781_853_872_506_695_44, -0.047_962_553_580_849_701)),
            (c(-1.7, 2.2), c(0.001_729_309_285_403_374_9, 0.010_400_851_761_426_413)),
            (c(3.0, -10.0), c(-7.225_894_594_217_637_5e-5, 9.883_111_320_664_953_9e-5)),
            (c(0.25, 30.0), c(-2.998_217_844_753_813_5e-21, 2.109_202_953_984_232_2e-21)),
        ];
        for (s, want) in cases {
            let got = gamma(s).unwrap();
            assert!(rel(got, want) < 1e-12, "s={s} got={got} want={want}");
        }
    }

    #[test]
    fn gamma_recurrence_and_reflection() {
        for s in [c(0.3, 0.7), c(2.5, -4.0), c(-2.3, 1.1), c(0.9, 25.0)] {
            let g = gamma(s).unwrap();
            let g1 = gamma(s + 1.0).unwrap();
            assert!(rel(g1, s * g) < 1e-12);
            let refl = g * gamma(1.0 - s).unwrap() * (s * PI).sin();
            assert!((refl - c(PI, 0.0)).norm() < 1e-11 * PI);
        }
    }

    /// Independent quadrature of `int_0^inf exp(-y cosh u) cosh(nu u) du` on the
    /// real line with a fine composite Gauss-Legendre rule.
    fn k_oracle(nu: Complex64, y: f64) -> Complex64 {
        let gl = GaussLegendre::new(20);
        let upper = ((60.0 + 20.0) / y).asinh() + 5.0;
        gl.composite_c(0.0, upper, 400, |u| (nu * u).cosh() * (-y * u.cosh()).exp())
    }

    #[test]
    fn bessel_closed_forms() {
        let k = bessel_k_real(0.5, 1.0).unwrap();
        assert!((k - (PI / 2.0).sqrt() * (-1.0f64).exp()).abs() < 1e-14);
        for y in [0.05, 0.7, 3.0, 20.0] {
            let k = bessel_k_real(0.5, y).unwrap();
            let want = (PI / (2.0 * y)).sqrt() * (-y).exp();
            assert!((k - want).abs() < 1e-12 * want, "y={y}");
        }
        assert!((bessel_k_real(0.0, 2.0).unwrap() - 0.113_893_872_749_533_4).abs() < 1e-13);
        assert!((bessel_k_real(1.0, 2.0 * PI).unwrap() - 9.869_960_576_810_45e-4).abs() < 1e-16);
        assert!((bessel_k_real(0.0, 2.0 * PI).unwrap() - 9.165_843_609_043_71e-4).abs() < 1e-16);
        assert!(matches!(bessel_k_real(1.0, 0.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn bessel_matches_defining_integral() {
        for nu in [c(0.0, 0.0), c(0.8, 0.5), c(1.6, 1.0), c(3.0, -2.0), c(0.3, 6.0), c(9.5, 0.0)] {
            for y in [0.05, 0.4, 1.0, 2.0 * PI, 15.0] {
                let got = bessel_k(nu, y).unwrap();
                let want = k_oracle(nu, y);
                assert!(rel(got, want) < 1e-10, "nu={nu} y={y} got={got} want={want}");
            }
        }
    }

    /// Frozen high-precision values at large imaginary order, where plain
    /// quadrature on the real line cancels.
    #[test]
    fn bessel_large_imaginary_order() {
        let cases = [
            (c(0.0, 20.0), 1.0, c(-1.169_908_362_728_734_9e-14, 0.0)),
            (c(0.5, 40.0), 3.0, c(-5.118_719_209_230_237_4e-28, -1.689_661_194_964_085_8e-28)),
            (c(0.8, 100.0), 2.0, c(-2.891_397_643_314_205_9e-68, 8.467_909_212_616_482e-69)),
        ];
        for (nu, y, want) in cases {
            let got = bessel_k(nu, y).unwrap();
            assert!(rel(got, want) < 1e-10, "nu={nu} y={y} got={got} want={want}");
        }
    }

    #[test]
    fn bessel_product_rules() {
        let p = bessel_k_product(c(1.0, 0.0), &[1.0], &[1.0], &[PlaceKind::Real]).unwrap();
        assert!((p.re - bessel_k_real(1.0, 2.0 * PI).unwrap()).abs() < 1e-18);
        let p = bessel_k_product(c(0.0, 0.0), &[0.5], &[1.0], &[PlaceKind::Complex]).unwrap();
        assert!((p.re - bessel_k_real(0.0, 2.0 * PI).unwrap()).abs() < 1e-18);
        assert!(matches!(
            bessel_k_product(c(1.0, 0.0), &[1.0, 1.0], &[1.0, 0.0], &[PlaceKind::Real, PlaceKind::Real]),
            Err(Error::ZeroFrequency)
        ));
    }
}

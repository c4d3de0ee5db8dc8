mod common;

use std::f64::consts::PI;

use common::{c, rel};
use cusplab::quadrature::GaussLegendre;
use cusplab::specfun::{bessel_k, gamma};
use cusplab::Complex64;

/// `2 int_0^inf cos(2 pi l t) (t^2 + y^2)^{-s} dt` for real `s`, by
/// half-period panels and repeated averaging of the partial sums.
fn cosine_transform(l: f64, y: f64, s: f64) -> f64 {
    let gl = GaussLegendre::new(24);
    let h = 0.5 / l;
    let mut partial = Vec::new();
    let mut acc = 0.0;
    for n in 0..400 {
        let a = n as f64 * h;
        acc += gl.integrate(a, a + h, |t| (2.0 * PI * l * t).cos() * (t * t + y * y).powf(-s));
        partial.push(acc);
    }
    let mut level: Vec<f64> = partial[partial.len() - 40..].to_vec();
    while level.len() > 1 {
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    2.0 * level[0]
}

#[test]
fn bessel_satisfies_its_differential_equation() {
    let h = 1e-4;
    for nu in [c(0.3, 0.0), c(0.5, 0.5), c(1.2, -2.0)] {
        for y in [0.1, 1.0, 5.0] {
            let k = |x: f64| bessel_k(nu, x).unwrap();
            let (km, k0, kp) = (k(y - h), k(y), k(y + h));
            let d1 = (kp - km) / (2.0 * h);
            let d2 = (kp - 2.0 * k0 + km) / (h * h);
            let residual = y * y * d2 + y * d1 - (y * y + nu * nu) * k0;
            assert!(residual.norm() <= 1e-4 * (k0.norm() + 1.0), "nu={nu} y={y}: {residual}");
        }
    }
}

#[test]
fn bessel_is_a_fourier_transform() {
    for (l, y, s) in [(1.0f64, 1.0f64, 1.3f64), (2.0, 0.7, 1.8), (1.0, 1.5, 0.9)] {
        let lhs = y.powf(s) * PI.powf(-s) * gamma(c(s, 0.0)).unwrap().re * cosine_transform(l, y, s);
        let rhs = 2.0 * l.powf(s - 0.5) * y.sqrt() * bessel_k(c(s - 0.5, 0.0), 2.0 * PI * l * y).unwrap().re;
        assert!(rel(Complex64::new(lhs, 0.0), Complex64::new(rhs, 0.0)) < 1e-6, "l={l} y={y} s={s}: {lhs} vs {rhs}");
    }
}

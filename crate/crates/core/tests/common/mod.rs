#![allow(dead_code)]

use cusplab::fields::{FieldData, FieldElement, PlaceKind};
use cusplab::geometry::{GroupElement, PlaceCoord, Point};
use cusplab::Complex64;
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn point(field: &FieldData, xs: &[(f64, f64)], ys: &[f64]) -> Point {
    let coords = field
        .places
        .iter()
        .zip(xs.iter().zip(ys))
        .map(|(k, (x, y))| match k {
            PlaceKind::Real => PlaceCoord::real(x.0, *y),
            PlaceKind::Complex => PlaceCoord::complex(Complex64::new(x.0, x.1), *y),
        })
        .collect();
    Point::new(field, coords).unwrap()
}

pub fn random_point<R: Rng>(field: &FieldData, rng: &mut R, y_lo: f64, y_hi: f64) -> Point {
    let xs: Vec<(f64, f64)> = field.places.iter().map(|_| (rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let ys: Vec<f64> = field.places.iter().map(|_| y_lo + (y_hi - y_lo) * rng.gen::<f64>()).collect();
    point(field, &xs, &ys)
}

/// Random word of length `len` in the inversion, translations by basis
/// elements and the fundamental unit.
pub fn random_group_element<R: Rng>(field: &FieldData, rng: &mut R, len: usize) -> GroupElement {
    let d = field.d;
    let fe = |a: i64| FieldElement::integer(d, a);
    let s = GroupElement::new(fe(0), fe(-1), fe(1), fe(0)).unwrap();
    let mut g = GroupElement::identity(d);
    for _ in 0..len {
        let step = match rng.gen_range(0..3) {
            0 => s.clone(),
            1 => {
                let b = &field.integral_basis[rng.gen_range(0..field.degree)];
                let k = fe(rng.gen_range(-2..=2));
                GroupElement::new(fe(1), b * &k, fe(0), fe(1)).unwrap()
            }
            _ => match &field.fundamental_unit {
                Some(e) => GroupElement::new(e.clone(), fe(0), fe(0), e.inv().unwrap()).unwrap(),
                None => s.clone(),
            },
        };
        g = g.mul(&step);
    }
    g
}

pub fn points_close(a: &Point, b: &Point, tol: f64) -> bool {
    a.coords
        .iter()
        .zip(&b.coords)
        .all(|(p, q)| (p.x - q.x).norm() <= tol * (1.0 + p.x.norm()) && (p.y - q.y).abs() <= tol * p.y)
}

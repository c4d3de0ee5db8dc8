mod common;

use common::{c, points_close, random_group_element, random_point, rel};
use cusplab::eisenstein::{canonicalize_pair, eisenstein_fourier, maass_selberg_closed_form, reduce_point};
use cusplab::equidist::{eval_test_function, BumpProfile, Ramp, TestFunction};
use cusplab::fields::{embed, make_field, FieldElement, OElem};
use cusplab::geometry::{act, height, local_coords, from_local_coords, reduce_mod_stabilizer, Cusp, LocalCoords};
use cusplab::specfun::{bessel_k, gamma};
use cusplab::zeta::{completed_zeta, ZetaContext};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [i64; 6] = [0, 5, -1, -3, 2, 13];

fn field_d() -> impl Strategy<Value = i64> {
    prop::sample::select(FIELDS.to_vec())
}

/// Two elements of `o`; over `Q` the second coordinates are dropped.
fn elems(d: i64, a: i64, b: i64, e: i64, f: i64) -> (OElem, OElem) {
    if d == 0 {
        (OElem::new(a, 0), OElem::new(e, 0))
    } else {
        (OElem::new(a, b), OElem::new(e, f))
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn norm_is_multiplicative(d in field_d(), a in -20i64..20, b in -20i64..20, e in -20i64..20, f in -20i64..20) {
        let fld = make_field(d).unwrap();
        let (x, y) = elems(d, a, b, e, f);
        let r = &fld.ring;
        prop_assert_eq!(r.norm(r.mul(x, y)), r.norm(x) * r.norm(y));
    }

    #[test]
    fn xgcd_is_a_bezout_identity(d in field_d(), a in -30i64..30, b in -30i64..30, e in -30i64..30, f in -30i64..30) {
        let fld = make_field(d).unwrap();
        let (x, y) = elems(d, a, b, e, f);
        prop_assume!(!(x.is_zero() && y.is_zero()));
        let r = &fld.ring;
        let (g, u, v) = r.xgcd(x, y).unwrap();
        prop_assert_eq!(r.mul(u, x) + r.mul(v, y), g);
        prop_assert!(r.div_exact(x, g).is_some() && r.div_exact(y, g).is_some());
    }

    #[test]
    fn embeddings_are_ring_homomorphisms(d in field_d(), a in -9i64..9, b in -9i64..9, e in -9i64..9, f in -9i64..9) {
        let fld = make_field(d).unwrap();
        let x = FieldElement::from_ints(d, a, b);
        let y = FieldElement::from_ints(d, e, f);
        let (ex, ey, exy) = (embed(&fld, &x), embed(&fld, &y), embed(&fld, &(&x * &y)));
        for i in 0..ex.len() {
            prop_assert!((ex[i] * ey[i] - exy[i]).norm() <= 1e-9 * (1.0 + exy[i].norm()));
        }
    }

    #[test]
    fn gamma_recurrence(re in 0.05f64..6.0, im in -20.0f64..20.0) {
        let s = c(re, im);
        let g1 = gamma(s + 1.0).unwrap();
        let g0 = gamma(s).unwrap();
        prop_assert!(rel(g1, s * g0) < 1e-11);
    }

    #[test]
    fn bessel_order_symmetry(re in -3.0f64..3.0, im in -10.0f64..10.0, y in 0.1f64..15.0) {
        let nu = c(re, im);
        let a = bessel_k(nu, y).unwrap();
        let b = bessel_k(-nu, y).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-300));
    }

    #[test]
    fn completed_zeta_is_symmetric(d in field_d(), sigma in 0.05f64..0.95, t in 0.5f64..25.0) {
        let ctx = ZetaContext::new(&make_field(d).unwrap());
        let s = c(sigma, t);
        let a = completed_zeta(&ctx, s).unwrap();
        let b = completed_zeta(&ctx, 1.0 - s).unwrap();
        prop_assert!(rel(a, b) < 1e-8);
    }

    #[test]
    fn maass_selberg_is_symmetric(d in field_d(), s in 1.05f64..3.0, s2 in 1.05f64..3.0, t in 1.5f64..6.0) {
        prop_assume!((s - s2).abs() > 1e-3);
        let f = make_field(d).unwrap();
        let a = maass_selberg_closed_form(&f, c(s, 0.2), c(s2, -0.1), t).unwrap();
        let b = maass_selberg_closed_form(&f, c(s2, -0.1), c(s, 0.2), t).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn action_is_a_group_action_and_heights_are_invariant(d in field_d(), seed in any::<u64>()) {
        let f = make_field(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(&f, &mut rng, 0.3, 2.0);
        let g = random_group_element(&f, &mut rng, 4);
        let h = random_group_element(&f, &mut rng, 4);
        let lhs = act(&f, &g.mul(&h), &z);
        let rhs = act(&f, &g, &act(&f, &h, &z));
        prop_assert!(points_close(&lhs, &rhs, 1e-8));
        // mu(g lambda, g z) = mu(lambda, z) for lambda = h(infinity)
        let lam = Cusp::infinity(&f).image(&f, &h).unwrap();
        let moved = lam.image(&f, &g).unwrap();
        let a = height(&f, &lam, &z);
        let b = height(&f, &moved, &act(&f, &g, &z));
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn local_coordinates_round_trip(d in field_d(), seed in any::<u64>()) {
        let f = make_field(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(&f, &mut rng, 0.05, 5.0);
        let g = random_group_element(&f, &mut rng, 3);
        let cusp = Cusp::infinity(&f).image(&f, &g).unwrap();
        let lc = local_coords(&f, &cusp, &z).unwrap();
        let back = from_local_coords(&f, &cusp, &lc).unwrap();
        prop_assert!(points_close(&z, &back, 1e-9));
        let again: LocalCoords = local_coords(&f, &cusp, &back).unwrap();
        prop_assert!((again.q - lc.q).abs() <= 1e-10 * lc.q);
    }

    #[test]
    fn reduction_lands_in_the_box(d in field_d(), seed in any::<u64>()) {
        let f = make_field(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(&f, &mut rng, 0.1, 3.0);
        let g = random_group_element(&f, &mut rng, 5);
        let w0 = act(&f, &g, &z);
        let cusp = Cusp::infinity(&f);
        let (w, h) = reduce_mod_stabilizer(&f, &cusp, &w0).unwrap();
        prop_assert!(points_close(&act(&f, &h, &w0), &w, 1e-9));
        let lc = local_coords(&f, &cusp, &w).unwrap();
        let q0 = local_coords(&f, &cusp, &w0).unwrap().q;
        prop_assert!((lc.q - q0).abs() <= 1e-12 * q0);
        for v in lc.x_coords.iter().chain(&lc.y_coords) {
            prop_assert!(*v >= -0.5 - 1e-9 && *v < 0.5 + 1e-9);
        }
    }

    #[test]
    fn smoothstep_ramps_are_symmetric(k in 0u32..6, t in 0.0f64..1.0) {
        for r in [Ramp::Exp, Ramp::Poly(k)] {
            prop_assert!((r.eval(t) + r.eval(1.0 - t) - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn pair_canonical_form_is_idempotent(d in field_d(), seed in any::<u64>(), a in -6i64..6, b in -6i64..6, e in -6i64..6, g in -6i64..6) {
        let f = make_field(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(&f, &mut rng, 0.3, 2.0);
        let (cc, dd) = elems(d, a, b, e, g);
        prop_assume!(!(cc.is_zero() && dd.is_zero()));
        let once = canonicalize_pair(&f, &z, cc, dd).unwrap();
        prop_assert_eq!(canonicalize_pair(&f, &z, once.0, once.1).unwrap(), once);
        if let Some(u) = f.fundamental_unit_o() {
            let r = &f.ring;
            prop_assert_eq!(canonicalize_pair(&f, &z, r.mul(u, cc), r.mul(u, dd)).unwrap(), once);
        }
    }

    #[test]
    fn eisenstein_is_automorphic(d in prop::sample::select(vec![0i64, 5, -1]), seed in any::<u64>()) {
        let f = make_field(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(&f, &mut rng, 0.4, 1.5);
        let g = random_group_element(&f, &mut rng, 4);
        let s = c(1.3, 0.5);
        let e = |p: &cusplab::geometry::Point| {
            let (w, _) = reduce_point(&f, p).unwrap();
            eisenstein_fourier(&f, &w, s, 45).unwrap()
        };
        prop_assert!(rel(e(&act(&f, &g, &z)), e(&z)) < 1e-8);
    }

    #[test]
    fn test_functions_are_invariant_and_linear(d in prop::sample::select(vec![0i64, 5, -1]), seed in any::<u64>(), k in 0.1f64..5.0) {
        let f = make_field(d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tf = TestFunction::new(Cusp::infinity(&f), BumpProfile { t0: 1.2, t1: 2.4, width: 0.3, ..BumpProfile::standard() }).unwrap();
        let z = random_point(&f, &mut rng, 0.8, 2.0);
        let g = random_group_element(&f, &mut rng, 4);
        let a = eval_test_function(&tf, &z, &f).unwrap();
        let b = eval_test_function(&tf, &act(&f, &g, &z), &f).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        prop_assert!((eval_test_function(&tf.scaled(k), &z, &f).unwrap() - k * a).abs() <= 1e-14 * (1.0 + k * a));
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use voronoi_bloch::arith::rat::qf;
use voronoi_bloch::arith::snf::{matmul, smith_normal_form};
use voronoi_bloch::arith::{Complex, QMat, Real};
use voronoi_bloch::bloch::{cr3, delta2, five_term, Factorizer};
use voronoi_bloch::complex::group::{mat_det, mat_vec, Mat2, Vec2};
use voronoi_bloch::field::NumberField;
use voronoi_bloch::forms::fincke_pohst;
use voronoi_bloch::regulator::bloch_wigner;

const P: u32 = 60;

fn gaussian() -> NumberField {
    NumberField::from_i64_poly(&[1, 0, 1]).unwrap()
}

fn d(z: &Complex) -> Real {
    bloch_wigner(z, P)
}

fn small(r: &Real) -> bool {
    r.to_f64().abs() + r.rad_f64() < 1e-12
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_filter("away from 0 and 1", |&(a, b)| a.hypot(b) > 1e-3 && (a - 1.0).hypot(b) > 1e-3)
}

fn elem() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, -6i64..=6).prop_filter("nonzero", |&(a, b)| a != 0 || b != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dilog_symmetries((a, b) in point()) {
        let z = Complex::from_f64(a, b, P);
        let v = d(&z);
        prop_assert!(small(&v.add(&d(&Complex::one(P).sub(&z)))));
        prop_assert!(small(&v.add(&d(&z.recip().unwrap()))));
        prop_assert!(small(&v.add(&d(&z.conj()))));
    }

    #[test]
    fn dilog_five_term((a, b) in point(), (c, e) in point()) {
        let one = Complex::one(P);
        let (x, y) = (Complex::from_f64(a, b, P), Complex::from_f64(c, e, P));
        prop_assume!((a - c).hypot(b - e) > 1e-3);
        let (xi, yi) = (x.recip().unwrap(), y.recip().unwrap());
        let s = d(&x)
            .sub(&d(&y))
            .add(&d(&y.div(&x).unwrap()))
            .sub(&d(&one.sub(&xi).div(&one.sub(&yi)).unwrap()))
            .add(&d(&one.sub(&x).div(&one.sub(&y)).unwrap()));
        prop_assert!(small(&s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn five_term_has_zero_wedge(x in elem(), y in elem()) {
        let f = gaussian();
        let (x, y) = (f.elem_from_i64(&[x.0, x.1]), f.elem_from_i64(&[y.0, y.1]));
        // degenerate pairs are rejected by five_term itself
        if let Ok(r) = five_term(&f, &x, &y) {
            let mut fz = Factorizer::new(&f).unwrap();
            prop_assert!(delta2(&mut fz, &r).unwrap().is_zero());
        }
    }

    #[test]
    fn cross_ratio_gl2_invariant(pts in prop::collection::vec((elem(), elem()), 4), g in prop::collection::vec(elem(), 4)) {
        let f = gaussian();
        let e = |c: (i64, i64)| f.elem_from_i64(&[c.0, c.1]);
        let v: [Vec2; 4] = std::array::from_fn(|i| [e(pts[i].0), e(pts[i].1)]);
        let m: Mat2 = [[e(g[0]), e(g[1])], [e(g[2]), e(g[3])]];
        prop_assume!(!mat_det(&f, &m).is_zero());
        let w = v.clone().map(|p| mat_vec(&f, &m, &p));
        prop_assert_eq!(cr3(&f, &v), cr3(&f, &w));
    }

    #[test]
    fn smith_form_is_equivalent(rows in 1usize..=5, cols in 1usize..=5, seed in prop::collection::vec(-8i64..=8, 25)) {
        let m: Vec<Vec<BigInt>> = (0..rows).map(|i| (0..cols).map(|j| BigInt::from(seed[i * 5 + j])).collect()).collect();
        let s = smith_normal_form(&m, cols);
        let prod = matmul(&matmul(&s.u, &m), &s.v);
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < s.rank() { s.diagonal[i].clone() } else { BigInt::zero() };
                prop_assert_eq!(x, &want);
            }
        }
        for w in s.diagonal.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        prop_assert!(s.diagonal.iter().all(|x| x.is_positive()));
        prop_assert_eq!(QMat::from_int_rows(&m).rank(), s.rank());
    }

    #[test]
    fn short_vectors_within_bound(a in 1i64..=6, b in -3i64..=3, c in 1i64..=6, bound in 1i64..=30) {
        let g = QMat::from_i64(&[&[a * a + b * b, b * c], &[b * c, c * c + 1]]);
        let cq = qf(bound, 2);
        let vs = fincke_pohst(&g, &cq).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for v in &vs {
            prop_assert!(g.quad_int(v) <= cq);
            prop_assert!(v.iter().any(|x| !x.is_zero()));
            let neg: Vec<BigInt> = v.iter().map(|x| -x).collect();
            prop_assert!(!seen.contains(&neg));
            prop_assert!(seen.insert(v.clone()));
        }
    }
}

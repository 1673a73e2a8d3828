use super::*;
use crate::arith::rat::q;
use num_bigint::BigInt;

#[test]
fn a2_minimum() {
    let g = QMat::from_i64(&[&[2, -1], &[-1, 2]]);
    let md = minimum(&g).unwrap();
    assert_eq!(md.min, q(2));
    assert_eq!(md.vectors.len(), 3);
    assert!(is_perfect(&g, &TSubspace::full(2)).unwrap());
}

#[test]
fn fp_counts_z2() {
    let g = QMat::identity(2);
    let v = fincke_pohst(&g, &q(5)).unwrap();
    // 12 nonzero vectors of norm ≤ 5 up to sign: (1,0),(0,1),(1,±1),(2,0),(0,2),(2,±1),(1,±2)
    assert_eq!(v.len(), 10);
    for x in &v {
        assert!(g.quad_int(x) <= q(5));
        let mut y = x.clone();
        canonical_sign(&mut y);
        assert_eq!(x, &y);
    }
}

#[test]
fn gaussian_trace_form_dims() {
    let f = NumberField::from_i64_poly(&[1, 0, 1]).unwrap();
    let t = TSubspace::new(&f, 2).unwrap();
    assert_eq!(t.dim(), 4);
    assert_eq!(t.ambient, 4);
    for b in &t.basis {
        assert!(t.coords_of(b).is_some());
    }
    let id = t.identity_form(&f);
    assert!(id.is_positive_definite());
    let v = vec![BigInt::from(1), BigInt::from(0), BigInt::from(0), BigInt::from(0)];
    let fv = t.functional(&v);
    let c = t.coords_of(&id).unwrap();
    let s: Q = fv.iter().zip(&c).map(|(a, b)| a * b).sum();
    assert_eq!(s, id.quad_int(&v));
}

#[test]
fn hermitian_json_round_trip() {
    let f = NumberField::from_i64_poly(&[1, 1, 1]).unwrap();
    let h = HermitianForm::identity(&f, 2);
    let back = HermitianForm::from_json(&h.to_json()).unwrap();
    assert_eq!(back, h);
    assert!(h.is_hermitian(&f));
}

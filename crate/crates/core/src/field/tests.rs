use super::*;
use num_bigint::BigInt;

fn bi(x: i64) -> BigInt {
    BigInt::from(x)
}

#[test]
fn gaussian_invariants() {
    let f = NumberField::from_i64_poly(&[1, 0, 1]).unwrap();
    assert_eq!(f.discriminant, bi(-4));
    assert_eq!((f.r1, f.r2), (0, 1));
    assert_eq!(f.mu_order, 4);
    assert!(f.is_cm());
    assert!(f.is_imaginary_quadratic());
}

#[test]
fn eisenstein_invariants() {
    let f = NumberField::from_i64_poly(&[1, 1, 1]).unwrap();
    assert_eq!(f.discriminant, bi(-3));
    assert_eq!(f.mu_order, 6);
    let g = f.mu_gen.clone();
    assert!(f.is_one(&f.pow(&g, 6)));
    assert!(!f.is_one(&f.pow(&g, 3)));
}

#[test]
fn q_sqrt_minus7_uses_omega_basis() {
    // x² + 7 has index 2 in the maximal order
    let f = NumberField::from_i64_poly(&[7, 0, 1]).unwrap();
    assert_eq!(f.discriminant, bi(-7));
    assert_eq!(f.mu_order, 2);
}

#[test]
fn cyclotomic_five() {
    let f = NumberField::from_i64_poly(&[1, 1, 1, 1, 1]).unwrap();
    assert_eq!(f.discriminant, bi(125));
    assert_eq!((f.r1, f.r2), (0, 2));
    assert_eq!(f.mu_order, 10);
    assert!(f.is_cm());
    assert!(f.sqrt5_in_field().unwrap());
}

#[test]
fn reducible_rejected() {
    assert!(NumberField::from_i64_poly(&[-1, 0, 1]).is_err());
    assert!(NumberField::from_i64_poly(&[4, 0, 5, 0, 1]).is_err());
    assert!(NumberField::from_i64_poly(&[1, 0, 2]).is_err());
    assert!(NumberField::from_i64_poly(&[2, 0, 1]).is_ok());
    assert!(NumberField::from_i64_poly(&[-3, 0, 1]).is_ok());
}

#[test]
fn inverse_and_norm() {
    let f = NumberField::from_i64_poly(&[1, 1, 1, 1, 1]).unwrap();
    let a = f.elem_from_i64(&[2, -1, 0, 3]);
    let b = f.inv(&a).unwrap();
    assert!(f.is_one(&f.mul(&a, &b)));
    let n = f.norm(&a);
    let nb = f.norm(&b);
    assert_eq!(n * nb, Q::one());
}

#[test]
fn minus_one_two_squares() {
    let gi = NumberField::from_i64_poly(&[1, 0, 1]).unwrap();
    assert_eq!(gi.minus_one_sum_of_two_squares(&TwoSquares::default()).unwrap().as_bool(), Some(true));
    let e = NumberField::from_i64_poly(&[1, 1, 1]).unwrap();
    // -1 = ω² + (ω²)² ... ℚ(√-3): 2 is inert with local degree 2
    assert_eq!(e.minus_one_sum_of_two_squares(&TwoSquares::default()).unwrap().as_bool(), Some(true));
    let r = NumberField::from_i64_poly(&[-2, 0, 1]).unwrap();
    assert_eq!(r.minus_one_sum_of_two_squares(&TwoSquares::default()).unwrap().as_bool(), Some(false));
    let s7 = NumberField::from_i64_poly(&[7, 0, 1]).unwrap();
    // 2 splits in ℚ(√-7): local degrees 1
    assert_eq!(s7.minus_one_sum_of_two_squares(&TwoSquares::default()).unwrap().as_bool(), Some(false));
}

#[test]
fn residue_degrees_quadratic() {
    let f = NumberField::from_i64_poly(&[1, 0, 1]).unwrap();
    let mut d5 = f.residue_degrees(5).unwrap();
    d5.sort();
    assert_eq!(d5, vec![1, 1]);
    assert_eq!(f.residue_degrees(3).unwrap(), vec![2]);
    let z5 = NumberField::from_i64_poly(&[1, 1, 1, 1, 1]).unwrap();
    assert_eq!(z5.residue_degrees(2).unwrap(), vec![4]);
    assert_eq!(z5.residue_degrees(11).unwrap(), vec![1, 1, 1, 1]);
    let mut d19 = z5.residue_degrees(19).unwrap();
    d19.sort();
    assert_eq!(d19, vec![2, 2]);
}

#[test]
fn embeddings_of_i() {
    let f = NumberField::from_i64_poly(&[1, 0, 1]).unwrap();
    let z = f.embed(&f.basis_elem(1), 0, 80).unwrap().to_f64();
    assert!(z.0.abs() < 1e-15 && (z.1 - 1.0).abs() < 1e-15);
}

#[test]
fn spec_round_trip() {
    let f = spec::FieldSpec::eisenstein().build().unwrap();
    let s = f.spec();
    let js = serde_json::to_string(&s).unwrap();
    let back = spec::FieldSpec::from_json_str(&js).unwrap();
    assert_eq!(back, s);
    let g = back.build().unwrap();
    assert_eq!(g.discriminant, f.discriminant);
}

#[test]
fn spec_schema_error_names_field() {
    let e = spec::FieldSpec::from_json_str(r#"{"min_poly":["1","x","1"]}"#).unwrap_err();
    assert!(e.to_string().contains("min_poly[1]"), "{e}");
    let e = spec::FieldSpec::from_json_str(r#"{"poly":["1"]}"#).unwrap_err();
    assert!(e.to_string().contains("min_poly"), "{e}");
}

#[test]
fn sqrt_exact() {
    let f = NumberField::from_i64_poly(&[1, 1, 1]).unwrap();
    let a = f.elem_from_i64(&[1, 2]);
    let sq = f.mul(&a, &a);
    let r = f.sqrt(&sq).unwrap().unwrap();
    assert!(r == a || r == f.neg(&a));
    assert!(f.sqrt(&f.from_int(2)).unwrap().is_none());
}

use super::*;
use crate::complex::{build_complex, NPolicy};
use crate::voronoi::Engine;
use crate::complex::group::{mat_det, mat_vec, Mat2};
use std::collections::BTreeSet;

fn gaussian() -> NumberField {
    NumberField::from_i64_poly(&[1, 0, 1]).unwrap()
}

fn eisenstein() -> NumberField {
    NumberField::from_i64_poly(&[1, 1, 1]).unwrap()
}

fn complex(f: &NumberField) -> VoronoiComplex {
    let e = Engine::new(f, 2, "gl-of", "fifo").unwrap();
    let mut g = e.new_graph(&e.start_form().unwrap()).unwrap();
    assert!(e.enumerate(&mut g, None).unwrap());
    build_complex(f, &g, "lex", NPolicy::Observed).unwrap()
}

fn el(f: &NumberField, a: i64, b: i64) -> Elem {
    f.elem_from_i64(&[a, b])
}

#[test]
fn five_term_in_kernel() {
    for f in [gaussian(), eisenstein()] {
        let mut fz = Factorizer::new(&f).unwrap();
        let xs = [el(&f, 2, 0), el(&f, 3, 1), el(&f, -1, 2), el(&f, 5, -3), el(&f, 1, 1)];
        for x in &xs {
            for y in &xs {
                if x == y || f.is_one(&f.div(y, x).unwrap()) {
                    continue;
                }
                let Ok(r) = five_term(&f, x, y) else { continue };
                assert!(delta2(&mut fz, &r).unwrap().is_zero(), "{} {}", f.fmt_elem(x), f.fmt_elem(y));
            }
        }
    }
}

#[test]
fn generic_element_not_in_kernel() {
    let f = gaussian();
    let b = PreBloch::from_terms(&f, &[(1, el(&f, 3, 2))]).unwrap();
    for nu in [Nu::Trivial, Nu::PlusMinusOne, Nu::RootsOfUnity] {
        let c = verify_bloch(&f, &b, nu).unwrap();
        assert!(!c.passed);
        assert!(c.residue.is_some());
    }
}

#[test]
fn chain_square_commutes() {
    let f = eisenstein();
    let pts: Vec<Vec2> = [(1, 0, 0, 0), (0, 0, 1, 0), (1, 0, 1, 0), (2, 1, 1, 0), (1, 2, 3, -1), (0, 1, 1, 1)]
        .iter()
        .map(|&(a, b, c, d)| [el(&f, a, b), el(&f, c, d)])
        .collect();
    let mut tuples = Vec::new();
    for a in 0..pts.len() {
        for b in 0..pts.len() {
            for c in 0..pts.len() {
                for d in 0..pts.len() {
                    let s = [a, b, c, d];
                    if (0..4).any(|i| (0..i).any(|j| s[i] == s[j])) {
                        continue;
                    }
                    tuples.push([pts[a].clone(), pts[b].clone(), pts[c].clone(), pts[d].clone()]);
                }
            }
        }
    }
    assert_eq!(chain_compatibility_check(&f, &tuples, Nu::PlusMinusOne).unwrap(), None);
}

#[test]
fn json_roundtrip() {
    let f = gaussian();
    let b = PreBloch::from_terms(&f, &[(2, el(&f, 0, 1)), (-4, el(&f, 1, 1))]).unwrap();
    let back = PreBloch::from_json(&f, &b.to_json()).unwrap();
    assert_eq!(b, back);
}

#[test]
fn cycle_elements_are_bloch() {
    for f in [gaussian(), eisenstein()] {
        let c = complex(&f);
        let beta = bloch_from_cycle(&f, &c).unwrap();
        assert!(!beta.terms.is_empty());
        assert!(beta.terms.values().all(|n| n % 2 == 0));
        let cert = verify_bloch(&f, &beta, Nu::RootsOfUnity).unwrap();
        assert!(cert.passed, "{:?}", cert);
        let pm = verify_bloch(&f, &beta, Nu::PlusMinusOne).unwrap();
        assert!(pm.passed && pm.vanishes_exactly == Some(true));
    }
}

#[test]
fn c_f_in_kernel() {
    let f = eisenstein();
    let x = el(&f, 3, -2);
    let c = PreBloch::from_terms(&f, &[(1, x.clone()), (1, f.sub(&f.one(), &x))]).unwrap();
    let cert = verify_bloch(&f, &c, Nu::PlusMinusOne).unwrap();
    assert!(cert.passed);
    assert_eq!(cert.regime, "exact");
}

#[test]
fn torsion_orders() {
    let g = gaussian();
    let t = torsion_generator(&g, 2).unwrap();
    assert_eq!((t.b_exponent, t.bbar_exponent), (0, 0));
    let t = torsion_generator(&g, 5).unwrap();
    assert_eq!((t.nu_p, t.b_exponent, t.bbar_exponent), (0, 0, 0));
    let t = torsion_generator(&g, 3).unwrap();
    assert_eq!(t.nu_p, 1);
    assert!(t.generator.is_some());
    let e = eisenstein();
    let t = torsion_generator(&e, 3).unwrap();
    assert_eq!((t.b_exponent, t.bbar_exponent), (0, 0));
}

fn col(a: &Elem, b: &Elem) -> Vec2 {
    [a.clone(), b.clone()]
}

fn perm_sign(p: &[usize; 4]) -> i32 {
    let mut s = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

// The determinant formula sends ((1,0),(0,1),(1,1),(x,1)) to x⁻¹, not x.
#[test]
fn cr3_standard_tuple() {
    let f = gaussian();
    for x in [el(&f, 3, 2), el(&f, -1, 5), el(&f, 2, 0)] {
        let v = [col(&f.one(), &f.zero()), col(&f.zero(), &f.one()), col(&f.one(), &f.one()), col(&x, &f.one())];
        assert_eq!(cr3(&f, &v).unwrap(), f.inv(&x).unwrap());
    }
    let one = col(&f.one(), &f.one());
    let deg = [col(&f.one(), &f.zero()), one.clone(), one.clone(), col(&f.zero(), &f.one())];
    assert!(cr3(&f, &deg).is_none());
}

#[test]
fn cr3_permutations() {
    let f = eisenstein();
    let v = [col(&el(&f, 1, 2), &el(&f, 3, 0)), col(&el(&f, -2, 1), &el(&f, 1, 1)), col(&el(&f, 0, 1), &el(&f, 5, -1)), col(&el(&f, 4, 4), &el(&f, 1, -3))];
    let x = cr3(&f, &v).unwrap();
    let one = f.one();
    let xi = f.inv(&x).unwrap();
    let even = [x.clone(), f.sub(&one, &xi), f.inv(&f.sub(&one, &x)).unwrap()];
    let odd = [f.sub(&one, &x), xi.clone(), f.inv(&f.sub(&one, &xi)).unwrap()];
    let idx = [0usize, 1, 2, 3];
    for a in idx {
        for b in idx {
            for c in idx {
                for d in idx {
                    let p = [a, b, c, d];
                    if BTreeSet::from(p).len() < 4 {
                        continue;
                    }
                    let y = cr3(&f, &[v[a].clone(), v[b].clone(), v[c].clone(), v[d].clone()]).unwrap();
                    let set = if perm_sign(&p) > 0 { &even } else { &odd };
                    assert!(set.contains(&y), "{p:?}");
                }
            }
        }
    }
}

#[test]
fn cr3_gl2_invariant() {
    let f = gaussian();
    let v = [col(&el(&f, 1, 0), &el(&f, 0, 0)), col(&el(&f, 0, 0), &el(&f, 1, 0)), col(&el(&f, 1, 1), &el(&f, 2, 0)), col(&el(&f, 3, -1), &el(&f, 1, 2))];
    let x = cr3(&f, &v).unwrap();
    let gs: [Mat2; 3] = [
        [[el(&f, 1, 1), el(&f, 2, 0)], [el(&f, 0, 1), el(&f, -1, 3)]],
        [[el(&f, 0, 0), el(&f, 1, 0)], [el(&f, -1, 0), el(&f, 0, 0)]],
        [[el(&f, 7, 0), el(&f, 0, 2)], [el(&f, 1, -1), el(&f, 5, 5)]],
    ];
    for g in &gs {
        assert!(!mat_det(&f, g).is_zero());
        let w = v.clone().map(|p| mat_vec(&f, g, &p));
        assert_eq!(cr3(&f, &w).unwrap(), x);
    }
}

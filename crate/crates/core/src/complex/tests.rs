use super::group::*;
use super::*;
use crate::field::NumberField;
use crate::voronoi::Engine;

fn gaussian() -> NumberField {
    NumberField::from_i64_poly(&[1, 0, 1]).unwrap()
}

fn eisenstein() -> NumberField {
    NumberField::from_i64_poly(&[1, 1, 1]).unwrap()
}

fn graph(f: &NumberField) -> VoronoiGraph {
    let e = Engine::new(f, 2, "gl-of", "fifo").unwrap();
    let mut g = e.new_graph(&e.start_form().unwrap()).unwrap();
    assert!(e.enumerate(&mut g, None).unwrap());
    g
}

#[test]
fn cusp_canonical_and_idempotent() {
    let f = gaussian();
    let us = units(&f);
    let v = [f.elem_from_i64(&[1, 0]), f.elem_from_i64(&[1, 1])];
    let c = cusp_of(&f, &us, &v).unwrap();
    let again = cusp_of(&f, &us, &c.vector(&f)).unwrap();
    assert_eq!(c, again);
    for u in &us {
        let w = [f.mul(u, &v[0]), f.mul(u, &v[1])];
        assert_eq!(cusp_of(&f, &us, &w).unwrap(), c);
    }
    let inf = cusp_of(&f, &us, &[f.one(), f.zero()]).unwrap();
    assert_eq!(inf.vector(&f), [f.one(), f.zero()]);
    assert_eq!(inf.display(&f), format!("({} : {})", f.fmt_elem(&f.zero()), f.fmt_elem(&f.one())));
    // (1+i, 1-i) has content (1+i)
    let bad = [f.elem_from_i64(&[1, 1]), f.elem_from_i64(&[1, -1])];
    assert!(cusp_of(&f, &us, &bad).is_err());
}

#[test]
fn carrying_identity_and_swap() {
    let f = gaussian();
    let us = units(&f);
    let e1 = cusp_of(&f, &us, &[f.one(), f.zero()]).unwrap();
    let e2 = cusp_of(&f, &us, &[f.zero(), f.one()]).unwrap();
    let e3 = cusp_of(&f, &us, &[f.one(), f.one()]).unwrap();
    let tri = vec![e1.clone(), e2.clone(), e3.clone()];
    let stab = carrying_elements(&f, &us, &tri, &tri, true).unwrap();
    // the triangle 0, 1, ∞ has stabilizer S3 in PSL2(Z) ⊂ PSL2(Z[i]); more
    // elements could only come from unit twists, which move 1 off the triangle
    assert_eq!(stab.len(), 6);
    for g in &stab {
        assert!(f.is_one(&mat_det(&f, g)));
        let m = vertex_map(&f, &us, g, &tri, &tri).unwrap();
        let mut s = m.clone();
        s.sort();
        assert_eq!(s, vec![0, 1, 2]);
    }
}

#[test]
fn gaussian_complex() {
    let f = gaussian();
    let g = graph(&f);
    let c = build_complex(&f, &g, "lex", NPolicy::Observed).unwrap();
    assert_eq!(c.cells[0].len(), 1);
    assert_eq!(c.cells[3].len(), 1);
    assert_eq!(c.cells[3][0].vertices.len(), 6);
    assert_eq!(c.descent[0].top_cells.len(), 1);
    assert_eq!(c.homology.betti[3], 1);
    assert_eq!(c.n_observed, 12);
    assert_eq!(c.n_bound.value, Some(24));
    assert_eq!(c.cells[3][0].stabilizer_order, 12);
    assert_eq!(c.cycle.weights, vec![c.cycle.weights[0].signum()]);
    // octahedron coned from a vertex: 4 tetrahedra
    assert_eq!(c.cycle.simplices[0].len(), 4);
}

#[test]
fn eisenstein_complex() {
    let f = eisenstein();
    let g = graph(&f);
    let c = build_complex(&f, &g, "lex", NPolicy::Observed).unwrap();
    assert_eq!(c.cells[0].len(), 1);
    assert_eq!(c.cells[3].len(), 2);
    assert!(!c.descent[0].twist_equivalent);
    assert_eq!(c.homology.betti[3], 1);
    assert_eq!(c.n_observed, 12);
    for s in &c.cycle.simplices {
        assert_eq!(s.len(), 1);
    }
}

#[test]
fn homology_independent_of_vertex_order() {
    for f in [gaussian(), eisenstein()] {
        let g = graph(&f);
        let a = build_complex(&f, &g, "lex", NPolicy::Observed).unwrap();
        let b = build_complex(&f, &g, "reverse", NPolicy::Observed).unwrap();
        assert_eq!(a.homology.betti, b.homology.betti);
        assert_eq!(a.homology.torsion, b.homology.torsion);
    }
}

#[test]
fn cyclic_orders_imaginary_quadratic() {
    assert_eq!(cyclic_orders(&gaussian()).unwrap(), vec![1, 2, 3, 4, 6]);
    let q = NumberField::from_i64_poly(&[-2, 0, 1]).unwrap();
    assert_eq!(cyclic_orders(&q).unwrap(), vec![1, 2, 3, 4, 6, 8]);
}

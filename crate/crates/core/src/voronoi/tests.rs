use super::*;
use crate::arith::rat::q;

fn rat_engine(m: usize, order: &str) -> (NumberField, usize, String) {
    (NumberField::rationals(), m, order.to_string())
}

fn count(m: usize, order: &str) -> VoronoiGraph {
    let (f, m, order) = rat_engine(m, order);
    let e = Engine::new(&f, m, "gl-z", &order).unwrap();
    let mut g = e.new_graph(&e.start_form().unwrap()).unwrap();
    assert!(e.enumerate(&mut g, None).unwrap());
    g
}

#[test]
fn first_form_is_perfect() {
    for m in 1..=4 {
        let g = first_perfect_form(m);
        assert!(crate::forms::is_perfect(&g, &TSubspace::full(m)).unwrap());
        assert_eq!(minimum(&g).unwrap().min, q(1));
    }
    assert_eq!(first_perfect_form(2)[(0, 1)], qf(-1, 2));
}

#[test]
fn rational_counts_small() {
    assert_eq!(count(2, "fifo").classes.len(), 1);
    assert_eq!(count(3, "fifo").classes.len(), 1);
    assert_eq!(count(4, "fifo").classes.len(), 2);
    assert_eq!(count(4, "lifo").classes.len(), 2);
}

#[test]
fn a2_neighbor_is_a2() {
    let a = first_perfect_form(2);
    let md = minimum(&a).unwrap();
    let f = NumberField::rationals();
    let e = Engine::new(&f, 2, "gl-z", "fifo").unwrap();
    let g = e.new_graph(&a).unwrap();
    let rays = e.cone_rays(&g.classes[0]);
    assert_eq!(rays.len(), 3);
    for ray in &rays {
        let r = e.t.from_int_coords(ray);
        let nb = neighbor_rho(&a, &md.min, &md.vectors, &r).unwrap();
        assert_eq!(minimum(&nb.gram).unwrap().min, q(1));
        let pa = Prepared::new(&a, &md.vectors);
        let pb = Prepared::new(&nb.gram, &nb.vectors);
        assert!(find_isometry(&e.co, e.group.as_ref(), &pa, &pb, 100_000).unwrap().is_some());
        // scaling both by c leaves ρ unchanged
        let c = q(3);
        let nb2 = neighbor_rho(&a.scale(&c), &(&md.min * &c), &md.vectors, &r.scale(&c)).unwrap();
        assert_eq!(nb2.rho, nb.rho);
    }
}

#[test]
fn conjugated_a2_is_equivalent() {
    let a = first_perfect_form(2);
    let u = QMat::from_i64(&[&[1, 1], &[0, 1]]);
    let b = u.transpose().mul(&a).mul(&u);
    let f = NumberField::rationals();
    let co = Coordinates::new(&f, 2);
    let grp = equivalence_groups().get("gl-z").unwrap();
    let pa = Prepared::new(&a, &minimum(&a).unwrap().vectors);
    let pb = Prepared::new(&b, &minimum(&b).unwrap().vectors);
    let w = find_isometry(&co, grp.as_ref(), &pa, &pb, 10_000).unwrap().unwrap();
    assert_eq!(w.transpose().mul(&a).mul(&w), b);
}

#[test]
fn initial_t_perfect_from_identity() {
    let t = TSubspace::full(2);
    let a = initial_t_perfect(&QMat::identity(2), &t).unwrap();
    let md = minimum(&a).unwrap();
    assert_eq!(md.min, q(1));
    assert_eq!(md.vectors.len(), 3);
    // already perfect: unchanged
    let p = first_perfect_form(3);
    assert_eq!(initial_t_perfect(&p, &TSubspace::full(3)).unwrap(), p);
}

#[test]
fn gaussian_t_perfect_start() {
    let f = NumberField::from_i64_poly(&[1, 0, 1]).unwrap();
    let e = Engine::new(&f, 2, "gl-of", "fifo").unwrap();
    let a = e.start_form().unwrap();
    assert!(crate::forms::is_perfect(&a, &e.t).unwrap());
    let mut g = e.new_graph(&a).unwrap();
    assert!(e.enumerate(&mut g, Some(50)).unwrap());
    assert_eq!(g.classes.len(), 1);
}

#[test]
fn budget_stops_and_resumes() {
    let f = NumberField::rationals();
    let e = Engine::new(&f, 4, "gl-z", "fifo").unwrap();
    let mut g = e.new_graph(&e.start_form().unwrap()).unwrap();
    assert!(!e.enumerate(&mut g, Some(1)).unwrap());
    assert!(!g.complete);
    let js = serde_json::to_string(&g).unwrap();
    let mut back: VoronoiGraph = serde_json::from_str(&js).unwrap();
    assert!(e.enumerate(&mut back, None).unwrap());
    assert_eq!(back.classes.len(), 2);
}

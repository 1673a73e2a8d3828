use super::*;
use proptest::prelude::*;

fn iv(x: &[i64]) -> IVec {
    x.iter().map(|&c| BigInt::from(c)).collect()
}

/// Extreme rays from all constraint subsets of the right rank.
pub(crate) fn subset_oracle(h: &HRep) -> Vec<IVec> {
    let d = h.d;
    let lin = linearity_space(h);
    let l = lin.len();
    if l == d {
        return vec![];
    }
    let k = d - 1 - l;
    let n = h.ineqs.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let rows: Vec<IVec> = idx.iter().map(|&i| h.ineqs[i].clone()).chain(h.eqs.iter().cloned()).collect();
        let ker = if rows.is_empty() {
            (0..d).map(|i| unit(d, i)).collect::<Vec<_>>()
        } else {
            let refs: Vec<&IVec> = rows.iter().collect();
            int_matrix(&refs, d).kernel().iter().map(|v| primitive(v)).collect()
        };
        if ker.len() == l + 1 {
            if let Some(r) = ker.iter().map(|v| reduce_mod(v, &lin)).find(|v| v.iter().any(|c| !c.is_zero())) {
                for cand in [r.clone(), r.iter().map(|c| -c).collect::<IVec>()] {
                    if h.contains(&cand) && !out.contains(&cand) {
                        out.push(cand);
                    }
                }
            }
        }
        // next k-subset
        if k == 0 {
            break;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out.sort();
    out
}

#[test]
fn octant() {
    let h = HRep::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    let v = dd_convert(&h);
    assert_eq!(v.rays, vec![iv(&[0, 0, 1]), iv(&[0, 1, 0]), iv(&[1, 0, 0])]);
    assert!(v.lineality.is_empty());
    assert_eq!(vrep_faces(&v, &h, 2).unwrap().len(), 3);
    assert_eq!(vrep_faces(&v, &h, 1).unwrap().len(), 3);
    assert!(vrep_faces(&v, &h, 4).is_err());
}

#[test]
fn half_plane_wedge() {
    let h = HRep::from_i64(2, &[&[1, 0], &[1, 1]]);
    let v = dd_convert(&h);
    assert_eq!(v.rays, vec![iv(&[0, 1]), iv(&[1, -1])]);
}

#[test]
fn line_lineality() {
    let h = HRep::from_i64(2, &[&[1, 0], &[-1, 0]]);
    assert_eq!(linearity_space(&h), vec![iv(&[0, 1])]);
    let v = dd_convert(&h);
    assert!(v.rays.is_empty());
    assert_eq!(v.lineality, vec![iv(&[0, 1])]);
    let oct = HRep::from_i64(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    assert!(linearity_space(&oct).is_empty());
}

#[test]
fn halfspace_has_one_ray() {
    let h = HRep::from_i64(3, &[&[1, 1, 0]]);
    let v = dd_convert(&h);
    assert_eq!(v.lineality.len(), 2);
    assert_eq!(v.rays.len(), 1);
    assert_eq!(subset_oracle(&h), v.rays);
}

#[test]
fn simplex_cone_facets() {
    // cone over a simplex in d=4
    let gens = vec![iv(&[1, 0, 0, 0]), iv(&[1, 1, 0, 0]), iv(&[1, 0, 1, 0]), iv(&[1, 0, 0, 1])];
    let (h, v, reps) = cone_hull(&gens, 4);
    assert_eq!(reps, vec![0, 1, 2, 3]);
    let fl = face_lattice(4, &v.rays, &v.lineality, &h.ineqs);
    let counts: Vec<usize> = (0..=4).map(|k| fl.of_dim(k).len()).collect();
    assert_eq!(counts, vec![1, 4, 6, 4, 1]);
}

#[test]
fn cone_hull_drops_interior_generators() {
    let gens = vec![iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[1, 1, 0]), iv(&[2, 0, 0]), iv(&[0, 0, 1])];
    let (_, v, reps) = cone_hull(&gens, 3);
    assert_eq!(reps, vec![0, 1, 4]);
    assert_eq!(v.rays.len(), 3);
}

#[test]
fn square_cone_faces() {
    // cone over a square: 4 rays, 4 facets, 4 two-dim faces... in d=3: dims 0..3
    let gens = vec![iv(&[1, 0, 1]), iv(&[0, 1, 1]), iv(&[-1, 0, 1]), iv(&[0, -1, 1])];
    let (h, v, _) = cone_hull(&gens, 3);
    assert_eq!(h.ineqs.len(), 4);
    let fl = face_lattice(3, &v.rays, &v.lineality, &h.ineqs);
    assert_eq!((0..=3).map(|k| fl.of_dim(k).len()).collect::<Vec<_>>(), vec![1, 4, 4, 1]);
}

#[test]
fn hull_of_a_line_has_no_rays() {
    let gens = vec![iv(&[1, 2, 0, -1]), iv(&[-1, -2, 0, 1])];
    let (h, v, reps) = cone_hull(&gens, 4);
    assert!(v.rays.is_empty() && reps.is_empty());
    assert_eq!(v.lineality.len(), 1);
    assert_eq!(h.eqs.len(), 3);
}

fn cone_strategy() -> impl Strategy<Value = HRep> {
    (2usize..=4).prop_flat_map(|d| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, d), 1..=10).prop_map(move |rows| {
            let rows: Vec<IVec> = rows.into_iter().filter(|r| r.iter().any(|&c| c != 0)).map(|r| iv(&r)).collect();
            HRep::new(d, rows, vec![])
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn dd_matches_subset_oracle(h in cone_strategy()) {
        let v = dd_convert(&h);
        prop_assert_eq!(&v.rays, &subset_oracle(&h));
        prop_assert_eq!(&v.lineality, &linearity_space(&h));
        for r in &v.rays {
            prop_assert!(h.contains(r));
            prop_assert_eq!(primitive_int(r), r.clone());
            prop_assert_eq!(tight_rank(&h, r), h.d - 1 - v.lineality.len());
        }
    }

    #[test]
    fn hull_round_trip(h in cone_strategy()) {
        let v = dd_convert(&h);
        let gens: Vec<IVec> = v.rays.iter().cloned()
            .chain(v.lineality.iter().cloned())
            .chain(v.lineality.iter().map(|l| l.iter().map(|c| -c).collect()))
            .collect();
        if gens.is_empty() { return Ok(()); }
        let (h2, _, _) = cone_hull(&gens, h.d);
        // every original constraint is valid on the hull and vice versa
        for r in &gens { prop_assert!(h2.contains(r)); }
        let v2 = dd_convert(&h2);
        for r in v2.rays.iter().chain(&v2.lineality) { prop_assert!(h.contains(r)); }
        prop_assert_eq!(v2.lineality.len(), v.lineality.len());
    }
}

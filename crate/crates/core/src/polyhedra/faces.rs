//! Face lattices of cones from ray/facet incidences.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::{dd_convert, dot, linearity_space, rank_of, HRep, IVec, VRep};
use crate::error::{Error, Result};

/// Faces of a cone by dimension; each face is the sorted list of the rays it
/// contains. faces[k] holds the k-dimensional faces.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub dim: usize,
    pub lineality_dim: usize,
    pub faces: Vec<Vec<Vec<usize>>>,
}

impl FaceLattice {
    pub fn of_dim(&self, k: usize) -> &[Vec<usize>] {
        self.faces.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

fn face_rank(rays: &[IVec], lin: &[IVec], idx: &[usize], d: usize) -> usize {
    let rows: Vec<&IVec> = idx.iter().map(|&i| &rays[i]).chain(lin).collect();
    rank_of(&rows, d)
}

/// Face lattice of the cone with the given extreme rays, lineality basis and
/// valid inequalities (which must include every facet normal).
pub fn face_lattice(d: usize, rays: &[IVec], lin: &[IVec], ineqs: &[IVec]) -> FaceLattice {
    let all: Vec<usize> = (0..rays.len()).collect();
    let dim = face_rank(rays, lin, &all, d);
    let l = lin.len();
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
    faces[dim].push(all);
    if dim == l {
        return FaceLattice { dim, lineality_dim: l, faces };
    }
    let mut facets = BTreeSet::new();
    for a in ineqs {
        let s: Vec<usize> = (0..rays.len()).filter(|&i| dot(a, &rays[i]).is_zero()).collect();
        if s.len() < rays.len() && face_rank(rays, lin, &s, d) == dim - 1 {
            facets.insert(s);
        }
    }
    faces[dim - 1] = facets.into_iter().collect();
    for k in (l..dim - 1).rev() {
        let upper = &faces[k + 1];
        let mut found = BTreeSet::new();
        for i in 0..upper.len() {
            for j in i + 1..upper.len() {
                let s: Vec<usize> = upper[i].iter().copied().filter(|x| upper[j].binary_search(x).is_ok()).collect();
                if !found.contains(&s) && face_rank(rays, lin, &s, d) == k {
                    found.insert(s);
                }
            }
        }
        faces[k] = found.into_iter().collect();
    }
    FaceLattice { dim, lineality_dim: l, faces }
}

/// All k-dimensional faces of the cone v = dd_convert(h).
pub fn vrep_faces(v: &VRep, h: &HRep, k: usize) -> Result<Vec<Vec<usize>>> {
    if k > h.d {
        return Err(Error::Invalid(format!("face dimension {k} outside 0..{}", h.d)));
    }
    Ok(face_lattice(h.d, &v.rays, &v.lineality, &h.ineqs).of_dim(k).to_vec())
}

/// Convex cone generated by the given vectors: its facet description and its
/// extreme rays (indices into `gens` of one representative per ray).
pub fn cone_hull(gens: &[IVec], d: usize) -> (HRep, VRep, Vec<usize>) {
    let dual = dd_convert(&HRep::new(d, gens.to_vec(), vec![]));
    let h = HRep::new(d, dual.rays.clone(), dual.lineality.clone());
    let lin = linearity_space(&h);
    // an extreme ray is tight on a set of rank d − l − 1 together with the
    // equations; a cone that is its own lineality space has none
    let Some(need) = d.checked_sub(lin.len() + 1) else {
        return (h, VRep { d, rays: vec![], lineality: lin }, vec![]);
    };
    let mut reps: Vec<usize> = Vec::new();
    let mut seen: Vec<IVec> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.iter().all(|x| x.is_zero()) {
            continue;
        }
        let tight: Vec<&IVec> = h.ineqs.iter().filter(|a| dot(a, g).is_zero()).chain(&h.eqs).collect();
        if rank_of(&tight, d) != need {
            continue;
        }
        let p = crate::arith::rat::primitive_int(g);
        if seen.contains(&p) {
            continue;
        }
        debug_assert!(h.ineqs.iter().all(|a| !dot(a, g).is_negative()));
        seen.push(p);
        reps.push(i);
    }
    let v = VRep { d, rays: seen, lineality: lin };
    (h, v, reps)
}

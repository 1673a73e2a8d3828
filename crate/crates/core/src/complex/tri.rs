//! Triangulated top cycle: each top cell is coned from its least vertex over
//! the transported triangulations of its facets, so that the simplicial
//! boundary of the cell chain is exactly its cellular boundary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Builder, Cell};
use crate::error::{Error, Result};
use crate::polyhedra::{rank_of, IVec};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrientedSimplex {
    pub sign: i64,
    /// Indices into the top cell's vertex list.
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TopCycle {
    /// N/|Γ_j| with the sign of the H_3 generator, per top cell.
    pub weights: Vec<i64>,
    pub simplices: Vec<Vec<OrientedSimplex>>,
    /// Number of flat (coplanar) tetrahedra introduced.
    pub flat: usize,
    /// Uncancelled weight on 2-cells with orientation-reversing stabilizers.
    pub residues: Vec<(usize, i64)>,
}

/// Sorted vertex tuple and the sign of the sorting permutation.
fn canon(v: &[usize]) -> (Vec<usize>, i64) {
    let mut w = v.to_vec();
    let mut sign = 1;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                w.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (w, sign)
}

type Chain = BTreeMap<Vec<usize>, i64>;

fn add(c: &mut Chain, v: &[usize], coef: i64) {
    let (k, s) = canon(v);
    if k.windows(2).any(|p| p[0] == p[1]) {
        return;
    }
    let e = c.entry(k.clone()).or_default();
    *e += s * coef;
    if *e == 0 {
        c.remove(&k);
    }
}

fn boundary(c: &Chain) -> Chain {
    let mut out = Chain::new();
    for (v, &coef) in c {
        for i in 0..v.len() {
            let face: Vec<usize> = v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            add(&mut out, &face, if i % 2 == 0 { coef } else { -coef });
        }
    }
    out
}

/// Fan triangulation of a polygon from its first vertex, oriented by its frame.
fn polygon(b: &mut Builder, cell: &Cell) -> Result<Vec<(i64, [usize; 3])>> {
    let base: Vec<IVec> = b.frame_rays(cell);
    let mut out = Vec::new();
    for l in &cell.facets {
        if l.vertices.contains(&0) {
            continue;
        }
        let tri = [0, l.vertices[0], l.vertices[1]];
        let rays: Vec<IVec> = tri.iter().map(|&i| b.ray(&cell.vertices[i])).collect();
        let s = b.relative_sign(&rays, &base)?;
        if s == 0 {
            return Err(Error::Inconsistent("degenerate triangle in a polygon".into()));
        }
        out.push((s, tri));
    }
    Ok(out)
}

pub(super) fn top_cycle(b: &mut Builder, cells: &[Vec<Cell>], weights: &[i64], warnings: &mut Vec<String>) -> Result<TopCycle> {
    let d = b.t.dim();
    let polys: Vec<Vec<(i64, [usize; 3])>> = cells[2].iter().map(|c| polygon(b, c)).collect::<Result<_>>()?;
    let mut simplices = Vec::new();
    let mut flat = 0;
    let mut quotient: BTreeMap<usize, i64> = BTreeMap::new();
    for (ci, c) in cells[3].iter().enumerate() {
        let mut s = Chain::new();
        for l in &c.facets {
            let mut inv = vec![usize::MAX; l.map.len()];
            for (i, &j) in l.map.iter().enumerate() {
                inv[j] = l.vertices[i];
            }
            for (sg, tri) in &polys[l.rep] {
                add(&mut s, &[inv[tri[0]], inv[tri[1]], inv[tri[2]]], l.sign * sg);
            }
            *quotient.entry(l.rep).or_default() += weights[ci] * l.sign;
        }
        if !boundary(&s).is_empty() {
            return Err(Error::Inconsistent(format!("triangulated boundary of top cell {ci} is not a cycle")));
        }
        let mut tets = Chain::new();
        for (tri, &coef) in &s {
            if !tri.contains(&0) {
                let mut v = vec![0];
                v.extend(tri);
                add(&mut tets, &v, coef);
            }
        }
        if boundary(&tets) != s {
            return Err(Error::Inconsistent(format!("cone over the boundary of top cell {ci} has the wrong boundary")));
        }
        let mut list = Vec::new();
        for (v, coef) in tets {
            let rays: Vec<IVec> = v.iter().map(|&i| b.ray(&c.vertices[i])).collect();
            let refs: Vec<&IVec> = rays.iter().collect();
            if rank_of(&refs, d) < 4 {
                flat += 1;
            }
            list.push(OrientedSimplex { sign: coef, vertices: v });
        }
        simplices.push(list);
    }
    let mut residues = Vec::new();
    for (r, w) in quotient {
        if w == 0 {
            continue;
        }
        if cells[2][r].orientable {
            return Err(Error::Inconsistent(format!("weighted top cells do not cancel on 2-cell {r}")));
        }
        warnings.push(format!("2-cell {r} keeps weight {w} in the quotient; it has an orientation-reversing stabilizer"));
        residues.push((r, w));
    }
    Ok(TopCycle { weights: weights.to_vec(), simplices, flat, residues })
}

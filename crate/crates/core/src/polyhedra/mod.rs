//! Exact rational polyhedral cones.

mod dd;
mod faces;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::arith::rat::{primitive, primitive_int, qi, Q};
use crate::arith::QMat;

pub use dd::{dd_convert, tight_rank};
pub use faces::{cone_hull, face_lattice, vrep_faces, FaceLattice};

pub type IVec = Vec<BigInt>;

/// Cone {x : ℓ(x) ≥ 0 for ℓ in ineqs, ℓ(x) = 0 for ℓ in eqs}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub d: usize,
    pub ineqs: Vec<IVec>,
    pub eqs: Vec<IVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRep {
    pub d: usize,
    pub rays: Vec<IVec>,
    pub lineality: Vec<IVec>,
}

impl HRep {
    pub fn new(d: usize, ineqs: Vec<IVec>, eqs: Vec<IVec>) -> HRep {
        let norm = |v: IVec| {
            assert_eq!(v.len(), d, "functional has wrong length");
            primitive_int(&v)
        };
        HRep { d, ineqs: ineqs.into_iter().map(norm).collect(), eqs: eqs.into_iter().map(norm).collect() }
    }

    pub fn from_i64(d: usize, ineqs: &[&[i64]]) -> HRep {
        HRep::new(d, ineqs.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(), vec![])
    }

    /// Rational functionals are scaled to primitive integer ones.
    pub fn from_rational(d: usize, ineqs: &[Vec<Q>], eqs: &[Vec<Q>]) -> HRep {
        HRep::new(d, ineqs.iter().map(|v| primitive(v)).collect(), eqs.iter().map(|v| primitive(v)).collect())
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.ineqs.iter().all(|l| !dot(l, x).is_negative()) && self.eqs.iter().all(|l| dot(l, x).is_zero())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "ineqs": self.ineqs.iter().map(|v| strs(v)).collect::<Vec<_>>(),
            "eqs": self.eqs.iter().map(|v| strs(v)).collect::<Vec<_>>(),
        })
    }
}

impl VRep {
    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "rays": self.rays.iter().map(|v| strs(v)).collect::<Vec<_>>(),
            "lineality": self.lineality.iter().map(|v| strs(v)).collect::<Vec<_>>(),
        })
    }
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |s, (x, y)| s + x * y)
}

fn int_matrix(rows: &[&IVec], d: usize) -> QMat {
    let mut m = QMat::zeros(rows.len(), d);
    for (i, r) in rows.iter().enumerate() {
        for j in 0..d {
            m[(i, j)] = qi(&r[j]);
        }
    }
    m
}

pub(crate) fn rank_of(rows: &[&IVec], d: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    int_matrix(rows, d).rank()
}

/// Basis of {x : ℓ(x) = 0 for every functional}, in reduced echelon form.
pub fn linearity_space(h: &HRep) -> Vec<IVec> {
    let rows: Vec<&IVec> = h.ineqs.iter().chain(&h.eqs).collect();
    let ker: Vec<IVec> = if rows.is_empty() {
        (0..h.d).map(|i| unit(h.d, i)).collect()
    } else {
        int_matrix(&rows, h.d).kernel().iter().map(|v| primitive(v)).collect()
    };
    echelon(&ker, h.d)
}

fn unit(d: usize, i: usize) -> IVec {
    let mut v = vec![BigInt::zero(); d];
    v[i] = BigInt::from(1);
    v
}

/// Reduced row echelon basis of the span, rows made primitive.
pub(crate) fn echelon(vs: &[IVec], d: usize) -> Vec<IVec> {
    if vs.is_empty() {
        return vec![];
    }
    let refs: Vec<&IVec> = vs.iter().collect();
    let (r, piv) = int_matrix(&refs, d).rref();
    (0..piv.len())
        .map(|i| {
            let row: Vec<Q> = (0..d).map(|j| r[(i, j)].clone()).collect();
            primitive(&row)
        })
        .collect()
}

/// Reduces x modulo the span of an echelon basis so that it vanishes on the
/// pivot coordinates, then makes it primitive.
pub(crate) fn reduce_mod(x: &IVec, basis: &[IVec]) -> IVec {
    let mut v: Vec<Q> = x.iter().map(qi).collect();
    for b in basis {
        let p = b.iter().position(|c| !c.is_zero()).unwrap();
        if !v[p].is_zero() {
            let f = &v[p] / qi(&b[p]);
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj -= &f * qi(bj);
            }
        }
    }
    primitive(&v)
}

#[cfg(test)]
mod tests;

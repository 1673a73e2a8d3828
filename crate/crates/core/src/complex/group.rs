//! 2×2 matrices over O_F, cusps and the search for group elements that carry
//! one vertex set onto another.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::snf::smith_normal_form;
use crate::arith::strs;
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};

pub type Vec2 = [Elem; 2];
pub type Mat2 = [[Elem; 2]; 2];

pub fn mat_vec(f: &NumberField, g: &Mat2, v: &Vec2) -> Vec2 {
    [
        f.add(&f.mul(&g[0][0], &v[0]), &f.mul(&g[0][1], &v[1])),
        f.add(&f.mul(&g[1][0], &v[0]), &f.mul(&g[1][1], &v[1])),
    ]
}

pub fn mat_mul(f: &NumberField, a: &Mat2, b: &Mat2) -> Mat2 {
    let col0 = mat_vec(f, a, &[b[0][0].clone(), b[1][0].clone()]);
    let col1 = mat_vec(f, a, &[b[0][1].clone(), b[1][1].clone()]);
    [[col0[0].clone(), col1[0].clone()], [col0[1].clone(), col1[1].clone()]]
}

pub fn det2(f: &NumberField, a: &Vec2, b: &Vec2) -> Elem {
    f.sub(&f.mul(&a[0], &b[1]), &f.mul(&a[1], &b[0]))
}

pub fn mat_det(f: &NumberField, g: &Mat2) -> Elem {
    f.sub(&f.mul(&g[0][0], &g[1][1]), &f.mul(&g[0][1], &g[1][0]))
}

pub fn mat_inv(f: &NumberField, g: &Mat2) -> Result<Mat2> {
    let d = mat_det(f, g);
    let di = f.inv(&d)?;
    Ok([
        [f.mul(&g[1][1], &di), f.neg(&f.mul(&g[0][1], &di))],
        [f.neg(&f.mul(&g[1][0], &di)), f.mul(&g[0][0], &di)],
    ])
}

/// Matrix with the given columns.
pub fn from_cols(a: &Vec2, b: &Vec2) -> Mat2 {
    [[a[0].clone(), b[0].clone()], [a[1].clone(), b[1].clone()]]
}

pub fn is_integral_mat(g: &Mat2) -> bool {
    g.iter().flatten().all(|x| x.is_integral_coords())
}

/// ±g represent the same element of PSL₂; pick the one whose first nonzero
/// coordinate is positive.
pub fn psl_normalize(f: &NumberField, g: &Mat2) -> Mat2 {
    let first = g.iter().flatten().flat_map(|x| x.0.iter()).find(|c| !c.is_zero());
    match first {
        Some(c) if c.is_negative() => [[f.neg(&g[0][0]), f.neg(&g[0][1])], [f.neg(&g[1][0]), f.neg(&g[1][1])]],
        _ => g.clone(),
    }
}

pub fn mat_key(g: &Mat2) -> Vec<BigInt> {
    g.iter().flatten().flat_map(|x| x.int_coords().expect("integral matrix")).collect()
}

pub fn mat_strings(g: &Mat2) -> Vec<Vec<Vec<String>>> {
    g.iter().map(|r| r.iter().map(|x| x.to_strings()).collect()).collect()
}

/// The roots of unity of F, generator powers in order.
pub fn units(f: &NumberField) -> Vec<Elem> {
    (0..f.mu_order as u64).map(|k| f.pow(&f.mu_gen, k)).collect()
}

/// A cusp: a vector (x, y) ∈ O_F² with unit content, stored as the
/// lexicographically greatest of its unit multiples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cusp {
    #[serde(with = "strs::ivec")]
    pub key: Vec<BigInt>,
}

impl Cusp {
    pub fn vector(&self, f: &NumberField) -> Vec2 {
        let n = f.degree();
        [f.elem_from_ints(&self.key[..n]), f.elem_from_ints(&self.key[n..])]
    }

    /// The point (y : x) of ℙ¹(F).
    pub fn display(&self, f: &NumberField) -> String {
        let v = self.vector(f);
        format!("({} : {})", f.fmt_elem(&v[1]), f.fmt_elem(&v[0]))
    }
}

fn vec_key(v: &Vec2) -> Option<Vec<BigInt>> {
    let mut k = v[0].int_coords()?;
    k.extend(v[1].int_coords()?);
    Some(k)
}

/// Whether x·O + y·O = O.
pub fn has_unit_content(f: &NumberField, v: &Vec2) -> bool {
    let n = f.degree();
    let mut rows = Vec::with_capacity(2 * n);
    for x in v {
        for k in 0..n {
            match f.mul(x, &f.basis_elem(k)).int_coords() {
                Some(c) => rows.push(c),
                None => return false,
            }
        }
    }
    let s = smith_normal_form(&rows, n);
    s.rank() == n && s.diagonal.iter().all(|d| d == &BigInt::from(1) || d == &BigInt::from(-1))
}

pub fn cusp_of(f: &NumberField, units: &[Elem], v: &Vec2) -> Result<Cusp> {
    if v[0].is_zero() && v[1].is_zero() {
        return Err(Error::Invalid("zero vector has no cusp".into()));
    }
    if !has_unit_content(f, v) {
        return Err(Error::Unsupported(format!(
            "cusp ({} : {}) is not represented by a unimodular vector; only class number one is handled",
            f.fmt_elem(&v[1]),
            f.fmt_elem(&v[0])
        )));
    }
    let key = units
        .iter()
        .map(|u| vec_key(&[f.mul(u, &v[0]), f.mul(u, &v[1])]).expect("integral"))
        .max()
        .expect("nonempty unit group");
    Ok(Cusp { key })
}

/// Elements g ∈ PSL₂(O_F) with g·src = dst as cusp sets. Candidates come from
/// the images of the first two source cusps, which pin g down up to the unit
/// scalings on each of them.
pub fn carrying_elements(f: &NumberField, units: &[Elem], src: &[Cusp], dst: &[Cusp], want_all: bool) -> Result<Vec<Mat2>> {
    if src.len() != dst.len() || src.len() < 2 {
        return Err(Error::Invalid("carrying search needs two or more vertices on each side".into()));
    }
    let target: BTreeSet<&Cusp> = dst.iter().collect();
    let s0 = src[0].vector(f);
    let s1 = src[1].vector(f);
    let sinv = mat_inv(f, &from_cols(&s0, &s1))?;
    let mut out: Vec<Mat2> = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, t0) in dst.iter().enumerate() {
        for (j, t1) in dst.iter().enumerate() {
            if i == j {
                continue;
            }
            let (t0, t1) = (t0.vector(f), t1.vector(f));
            for u0 in units {
                for u1 in units {
                    let a = [f.mul(u0, &t0[0]), f.mul(u0, &t0[1])];
                    let b = [f.mul(u1, &t1[0]), f.mul(u1, &t1[1])];
                    let g = mat_mul(f, &from_cols(&a, &b), &sinv);
                    if !f.is_one(&mat_det(f, &g)) || !is_integral_mat(&g) {
                        continue;
                    }
                    let mut ok = true;
                    for s in &src[2..] {
                        let img = cusp_of(f, units, &mat_vec(f, &g, &s.vector(f)))?;
                        if !target.contains(&img) {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let g = psl_normalize(f, &g);
                    if seen.insert(mat_key(&g)) {
                        out.push(g);
                        if !want_all {
                            return Ok(out);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Image of each source vertex under g, as an index into dst.
pub fn vertex_map(f: &NumberField, units: &[Elem], g: &Mat2, src: &[Cusp], dst: &[Cusp]) -> Result<Vec<usize>> {
    src.iter()
        .map(|s| {
            let img = cusp_of(f, units, &mat_vec(f, g, &s.vector(f)))?;
            dst.iter().position(|d| *d == img).ok_or_else(|| Error::Inconsistent("group element does not carry the vertex set".into()))
        })
        .collect()
}

//! Hermitian forms, their rational trace forms, and minimal vectors.

mod fincke_pohst;
mod tspace;

use num_bigint::BigInt;

use serde::{Deserialize, Serialize};

use crate::arith::rat::{fmt_q, parse_q, Q};
use crate::arith::QMat;
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};

pub use fincke_pohst::{canonical_sign, fincke_pohst};
pub use tspace::TSubspace;

/// m×m Hermitian matrix over F.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianForm {
    pub m: usize,
    pub entries: Vec<Vec<Elem>>,
}

impl HermitianForm {
    pub fn zero(f: &NumberField, m: usize) -> Self {
        HermitianForm { m, entries: vec![vec![f.zero(); m]; m] }
    }

    pub fn identity(f: &NumberField, m: usize) -> Self {
        let mut h = Self::zero(f, m);
        for i in 0..m {
            h.entries[i][i] = f.one();
        }
        h
    }

    pub fn is_hermitian(&self, f: &NumberField) -> bool {
        (0..self.m).all(|i| (0..self.m).all(|j| self.entries[i][j] == f.conj(&self.entries[j][i])))
    }

    pub fn add(&self, f: &NumberField, o: &HermitianForm) -> HermitianForm {
        let entries = (0..self.m).map(|i| (0..self.m).map(|j| f.add(&self.entries[i][j], &o.entries[i][j])).collect()).collect();
        HermitianForm { m: self.m, entries }
    }

    pub fn scale(&self, f: &NumberField, c: &Q) -> HermitianForm {
        let entries = self.entries.iter().map(|r| r.iter().map(|x| f.scale(x, c)).collect()).collect();
        HermitianForm { m: self.m, entries }
    }

    /// v* A w.
    pub fn sesquilinear(&self, f: &NumberField, v: &[Elem], w: &[Elem]) -> Elem {
        let mut s = f.zero();
        for i in 0..self.m {
            let cv = f.conj(&v[i]);
            for j in 0..self.m {
                s = f.add(&s, &f.mul(&f.mul(&cv, &self.entries[i][j]), &w[j]));
            }
        }
        s
    }

    pub fn to_json(&self) -> Vec<Vec<Vec<String>>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.0.iter().map(fmt_q).collect()).collect()).collect()
    }

    pub fn from_json(rows: &[Vec<Vec<String>>]) -> Result<Self> {
        let m = rows.len();
        let mut entries = Vec::new();
        for r in rows {
            if r.len() != m {
                return Err(Error::Parse("Hermitian form must be square".into()));
            }
            let row: Result<Vec<Elem>> = r.iter().map(|e| e.iter().map(|s| parse_q(s)).collect::<Result<Vec<Q>>>().map(Elem)).collect();
            entries.push(row?);
        }
        Ok(HermitianForm { m, entries })
    }
}

/// q(v) = v v*.
pub fn q_map(v: &[Elem], f: &NumberField) -> Result<HermitianForm> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::Invalid("q_map of the zero vector".into()));
    }
    let m = v.len();
    let entries = (0..m).map(|i| (0..m).map(|j| f.mul(&v[i], &f.conj(&v[j]))).collect()).collect();
    Ok(HermitianForm { m, entries })
}

/// Gram matrix of x ↦ Tr_{F/ℚ}(x* A x) in coordinates x_{i,a} (index i·n + a).
pub fn trace_form(a: &HermitianForm, f: &NumberField) -> QMat {
    let n = f.degree();
    let big = a.m * n;
    let mut g = QMat::zeros(big, big);
    let conj_basis: Vec<Elem> = (0..n).map(|k| f.conj(&f.basis_elem(k))).collect();
    for i in 0..a.m {
        for j in 0..a.m {
            if a.entries[i][j].is_zero() {
                continue;
            }
            for ka in 0..n {
                let left = f.mul(&conj_basis[ka], &a.entries[i][j]);
                for kb in 0..n {
                    let v = f.trace(&f.mul(&left, &f.basis_elem(kb)));
                    g[(i * n + ka, j * n + kb)] = v;
                }
            }
        }
    }
    g
}

/// Splits an integer coordinate vector of length m·n into m field elements.
pub fn vector_to_field(v: &[BigInt], f: &NumberField) -> Vec<Elem> {
    let n = f.degree();
    v.chunks(n).map(|c| f.elem_from_ints(c)).collect()
}

pub fn field_to_vector(v: &[Elem]) -> Vec<BigInt> {
    v.iter().flat_map(|e| e.0.iter().map(|x| x.to_integer())).collect()
}

/// Minimum and minimal vectors (one per ± pair).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinData {
    pub min: Q,
    pub vectors: Vec<Vec<BigInt>>,
}

pub fn is_positive_definite(g: &QMat) -> bool {
    g.is_positive_definite()
}

pub fn minimum(g: &QMat) -> Result<MinData> {
    let n = g.rows();
    let c = (0..n).map(|i| g[(i, i)].clone()).min().ok_or_else(|| Error::Invalid("empty form".into()))?;
    let all = fincke_pohst(g, &c)?;
    let vals: Vec<Q> = all.iter().map(|v| g.quad_int(v)).collect();
    let min = vals.iter().min().cloned().ok_or(Error::NotPositiveDefinite)?;
    let vectors = all.into_iter().zip(vals).filter(|(_, q)| *q == min).map(|(v, _)| v).collect();
    Ok(MinData { min, vectors })
}

/// Rank of the functionals X ↦ X[v], v ∈ Min(Q), restricted to T equals dim T.
pub fn is_perfect(g: &QMat, t: &TSubspace) -> Result<bool> {
    if t.coords_of(g).is_none() {
        return Err(Error::Invalid("form is not in the span of T".into()));
    }
    let md = minimum(g)?;
    Ok(perfection_rank(&md, t) == t.dim())
}

pub fn perfection_rank(md: &MinData, t: &TSubspace) -> usize {
    let rows: Vec<Vec<Q>> = md.vectors.iter().map(|v| t.functional(v)).collect();
    if rows.is_empty() {
        return 0;
    }
    QMat::from_rows(rows).rank()
}

/// Serialises a vector of big integers as decimal strings.
pub fn ints_to_strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn strings_to_ints(v: &[String]) -> Result<Vec<BigInt>> {
    v.iter().map(|s| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinDataJson {
    pub min: String,
    pub vectors: Vec<Vec<String>>,
}

impl From<&MinData> for MinDataJson {
    fn from(m: &MinData) -> Self {
        MinDataJson { min: fmt_q(&m.min), vectors: m.vectors.iter().map(|v| ints_to_strings(v)).collect() }
    }
}

impl MinDataJson {
    pub fn parse(&self) -> Result<MinData> {
        Ok(MinData { min: parse_q(&self.min)?, vectors: self.vectors.iter().map(|v| strings_to_ints(v)).collect::<Result<_>>()? })
    }
}

#[cfg(test)]
mod tests;

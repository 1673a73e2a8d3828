use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{trace_form, HermitianForm};
use crate::arith::rat::{primitive, qi, Q};
use crate::arith::QMat;
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};

/// Image of Her_m(F) inside Sym_N(ℚ), N = m·[F:ℚ].
#[derive(Clone, Debug)]
pub struct TSubspace {
    pub m: usize,
    pub ambient: usize,
    /// Gram matrices B_k.
    pub basis: Vec<QMat>,
    /// The Hermitian preimages of the B_k.
    pub hermitian: Vec<HermitianForm>,
    /// Entry positions (i, j) on which the coordinate map is invertible.
    pivots: Vec<(usize, usize)>,
    pivot_inverse: QMat,
}

impl TSubspace {
    pub fn new(f: &NumberField, m: usize) -> Result<TSubspace> {
        if !(f.is_totally_real() || f.is_cm()) {
            return Err(Error::Field("T-subspaces need a totally real or CM field".into()));
        }
        let n = f.degree();
        // basis of the fixed field of conjugation
        let fixed: Vec<Elem> = if f.is_totally_real() {
            (0..n).map(|k| f.basis_elem(k)).collect()
        } else {
            let mut c = QMat::zeros(n, n);
            for j in 0..n {
                let img = f.conj(&f.basis_elem(j));
                for i in 0..n {
                    c[(i, j)] = img.0[i].clone();
                }
            }
            c.sub(&QMat::identity(n)).kernel().into_iter().map(|v| Elem(primitive(&v).iter().map(qi).collect())).collect()
        };
        let mut hermitian = Vec::new();
        for i in 0..m {
            for x in &fixed {
                let mut h = HermitianForm::zero(f, m);
                h.entries[i][i] = x.clone();
                hermitian.push(h);
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..n {
                    let a = f.basis_elem(k);
                    let mut h = HermitianForm::zero(f, m);
                    h.entries[j][i] = a.clone();
                    h.entries[i][j] = f.conj(&a);
                    hermitian.push(h);
                }
            }
        }
        let basis: Vec<QMat> = hermitian.iter().map(|h| trace_form(h, f)).collect();
        Self::from_parts(m, m * n, basis, hermitian)
    }

    /// The full space Sym_N(ℚ) with basis E_ii, E_ij + E_ji.
    pub fn full(nn: usize) -> TSubspace {
        let f = NumberField::rationals();
        TSubspace::new(&f, nn).expect("rational T-space")
    }

    fn from_parts(m: usize, ambient: usize, basis: Vec<QMat>, hermitian: Vec<HermitianForm>) -> Result<TSubspace> {
        let t = basis.len();
        // matrix with one row per entry position (upper triangle), one column per basis element
        let positions: Vec<(usize, usize)> = (0..ambient).flat_map(|i| (i..ambient).map(move |j| (i, j))).collect();
        let mut rows = Vec::new();
        for &(i, j) in &positions {
            rows.push(basis.iter().map(|b| b[(i, j)].clone()).collect::<Vec<Q>>());
        }
        let mt = QMat::from_rows(rows).transpose();
        let (_, piv) = mt.rref();
        if piv.len() != t {
            return Err(Error::Inconsistent("T basis is linearly dependent".into()));
        }
        let pivots: Vec<(usize, usize)> = piv.iter().map(|&p| positions[p]).collect();
        let mut sq = QMat::zeros(t, t);
        for (r, &(i, j)) in pivots.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                sq[(r, c)] = b[(i, j)].clone();
            }
        }
        let pivot_inverse = sq.inverse().ok_or_else(|| Error::Inconsistent("singular pivot block".into()))?;
        Ok(TSubspace { m, ambient, basis, hermitian, pivots, pivot_inverse })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn from_coords(&self, c: &[Q]) -> QMat {
        let mut g = QMat::zeros(self.ambient, self.ambient);
        for (x, b) in c.iter().zip(&self.basis) {
            if !x.is_zero() {
                g = g.add_scaled(b, x);
            }
        }
        g
    }

    pub fn from_int_coords(&self, c: &[BigInt]) -> QMat {
        self.from_coords(&c.iter().map(qi).collect::<Vec<_>>())
    }

    /// Coordinates of g in T, or None if g ∉ T.
    pub fn coords_of(&self, g: &QMat) -> Option<Vec<Q>> {
        if g.rows() != self.ambient || !g.is_symmetric() {
            return None;
        }
        let rhs: Vec<Q> = self.pivots.iter().map(|&(i, j)| g[(i, j)].clone()).collect();
        let c = self.pivot_inverse.mul_vec(&rhs);
        (self.from_coords(&c) == *g).then_some(c)
    }

    /// The functional X ↦ X[v] in T-coordinates.
    pub fn functional(&self, v: &[BigInt]) -> Vec<Q> {
        self.basis.iter().map(|b| b.quad_int(v)).collect()
    }

    /// Identity-like starting form: trace form of the identity.
    pub fn identity_form(&self, f: &NumberField) -> QMat {
        trace_form(&HermitianForm::identity(f, self.m), f)
    }

    pub fn is_one_dim_scalar(&self) -> bool {
        self.dim() == 1 && self.basis[0][(0, 0)].is_one()
    }
}

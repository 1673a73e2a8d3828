//! Isometry search between forms given in trace coordinates.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::strategy::EquivalenceGroup;
use crate::arith::rat::{qi, Q};
use crate::arith::QMat;
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};

/// Integer matrices of multiplication by each basis element, for moving
/// O_F-vectors around in coordinates.
pub struct Coordinates<'a> {
    pub f: &'a NumberField,
    pub m: usize,
    pub n: usize,
    mult: Vec<Vec<Vec<BigInt>>>,
}

impl<'a> Coordinates<'a> {
    pub fn new(f: &'a NumberField, m: usize) -> Self {
        let n = f.degree();
        let table = f.mult_table();
        // mult[k][i][c]: i-th coordinate of a_k·a_c
        let mult = (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|c| table[k][c][i].to_integer()).collect()).collect())
            .collect();
        Coordinates { f, m, n, mult }
    }

    pub fn dim(&self) -> usize {
        self.m * self.n
    }

    /// a_k · v, blockwise.
    pub fn mul_basis(&self, k: usize, v: &[BigInt]) -> Vec<BigInt> {
        let n = self.n;
        let mut out = vec![BigInt::zero(); v.len()];
        for b in 0..v.len() / n {
            for i in 0..n {
                let mut s = BigInt::zero();
                for c in 0..n {
                    if !v[b * n + c].is_zero() {
                        s += &self.mult[k][i][c] * &v[b * n + c];
                    }
                }
                out[b * n + i] = s;
            }
        }
        out
    }

    /// The m×m matrix over F of an O_F-linear map given in coordinates.
    pub fn to_field_matrix(&self, u: &QMat) -> Vec<Vec<Elem>> {
        let one = self.f.one();
        (0..self.m)
            .map(|i| {
                (0..self.m)
                    .map(|j| {
                        let c: Vec<Q> = (0..self.n)
                            .map(|r| (0..self.n).fold(Q::zero(), |s, c| s + &u[(i * self.n + r, j * self.n + c)] * &one.0[c]))
                            .collect();
                        Elem(c)
                    })
                    .collect()
            })
            .collect()
    }

    /// Coordinates of the O_F-linear map with the given F-matrix.
    pub fn from_field_matrix(&self, g: &[Vec<Elem>]) -> QMat {
        let n = self.n;
        let mut u = QMat::zeros(self.dim(), self.dim());
        for i in 0..self.m {
            for j in 0..self.m {
                let mm = self.f.mul_matrix(&g[i][j]);
                for r in 0..n {
                    for c in 0..n {
                        u[(i * n + r, j * n + c)] = mm[(r, c)].clone();
                    }
                }
            }
        }
        u
    }

    pub fn det_field(&self, g: &[Vec<Elem>]) -> Elem {
        let f = self.f;
        let m = g.len();
        let mut a: Vec<Vec<Elem>> = g.to_vec();
        let mut det = f.one();
        for c in 0..m {
            let Some(p) = (c..m).find(|&r| !a[r][c].is_zero()) else {
                return f.zero();
            };
            if p != c {
                a.swap(p, c);
                det = f.neg(&det);
            }
            det = f.mul(&det, &a[c][c]);
            let inv = f.inv(&a[c][c]).expect("nonzero pivot");
            for r in c + 1..m {
                if a[r][c].is_zero() {
                    continue;
                }
                let factor = f.mul(&a[r][c], &inv);
                for k in c..m {
                    let t = f.mul(&factor, &a[c][k]);
                    a[r][k] = f.sub(&a[r][k], &t);
                }
            }
        }
        det
    }
}

/// Minimal vectors with precomputed bilinear data.
pub struct Prepared {
    pub gram: QMat,
    /// ± representatives: vectors[i] and its negative.
    pub vectors: Vec<Vec<BigInt>>,
    /// Per-vector invariant: sorted multiset of |A(v, w)| over all w.
    profile: Vec<Vec<Q>>,
}

impl Prepared {
    pub fn new(gram: &QMat, vectors: &[Vec<BigInt>]) -> Self {
        let gram = gram.clone();
        let vectors: Vec<Vec<BigInt>> = vectors.to_vec();
        let gv: Vec<Vec<Q>> = vectors.iter().map(|v| gram.mul_vec(&v.iter().map(qi).collect::<Vec<_>>())).collect();
        let profile = (0..vectors.len())
            .map(|i| {
                let mut p: Vec<Q> = vectors.iter().map(|w| dotq(&gv[i], w).abs()).collect();
                p.sort();
                p
            })
            .collect();
        Prepared { gram, vectors, profile }
    }
}

fn dotq(a: &[Q], b: &[BigInt]) -> Q {
    a.iter().zip(b).filter(|(_, y)| !y.is_zero()).fold(Q::zero(), |s, (x, y)| s + x * qi(y))
}

fn neg(v: &[BigInt]) -> Vec<BigInt> {
    v.iter().map(|x| -x).collect()
}

struct Search<'s, 'a> {
    co: &'s Coordinates<'a>,
    group: &'s dyn EquivalenceGroup,
    a: &'s Prepared,
    b: &'s Prepared,
    /// indices into b.vectors forming the chosen generating set
    chosen: Vec<usize>,
    ks: Vec<usize>,
    binv: QMat,
    /// B(b_i, a_k b_j) for chosen i, j and k in ks
    target: Vec<Vec<Vec<Q>>>,
    nodes: u64,
    budget: u64,
    images: Vec<Vec<BigInt>>,
    found: Vec<QMat>,
    want_all: bool,
}

impl Search<'_, '_> {
    fn gens(&self, v: &[BigInt]) -> Vec<Vec<BigInt>> {
        self.ks.iter().map(|&k| if k == usize::MAX { v.to_vec() } else { self.co.mul_basis(k, v) }).collect()
    }

    fn recurse(&mut self, depth: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!("equivalence search exceeded {} nodes", self.budget)));
        }
        if depth == self.chosen.len() {
            return Ok(self.finish());
        }
        let bi = self.chosen[depth];
        for ai in 0..self.a.vectors.len() {
            if self.a.profile[ai] != self.b.profile[bi] {
                continue;
            }
            for sign in [false, true] {
                let c = if sign { neg(&self.a.vectors[ai]) } else { self.a.vectors[ai].clone() };
                if !self.compatible(depth, &c) {
                    continue;
                }
                self.images.push(c);
                let done = self.recurse(depth + 1)?;
                self.images.pop();
                if done && !self.want_all {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn compatible(&self, depth: usize, c: &[BigInt]) -> bool {
        let g = &self.a.gram;
        let gc = self.gens(c);
        for i in 0..=depth {
            let x = if i == depth { c } else { &self.images[i] };
            for (kk, y) in gc.iter().enumerate() {
                if g.bilinear_int(x, y) != self.target[i][depth][kk] {
                    return false;
                }
            }
        }
        true
    }

    fn finish(&mut self) -> bool {
        let nn = self.co.dim();
        let mut amat = QMat::zeros(nn, nn);
        let mut col = 0;
        for img in &self.images {
            for g in self.gens(img) {
                for r in 0..nn {
                    amat[(r, col)] = qi(&g[r]);
                }
                col += 1;
            }
        }
        let u = amat.mul(&self.binv);
        if !u.entries().iter().all(|x| x.is_integer()) {
            return false;
        }
        if u.transpose().mul(&self.a.gram).mul(&u) != self.b.gram {
            return false;
        }
        if !u.det().abs().is_one() {
            return false;
        }
        if self.group.of_linear() {
            let det = self.co.det_field(&self.co.to_field_matrix(&u));
            if !self.group.accepts(self.co.f, &det) {
                return false;
            }
        }
        self.found.push(u);
        true
    }
}

/// Chooses a generating set from b's vectors: generators of each chosen vector
/// are its O_F-multiples (or the vector alone) and together must span.
fn choose_basis(co: &Coordinates, b: &Prepared, ks: &[usize]) -> Option<(Vec<usize>, QMat)> {
    let nn = co.dim();
    let mut chosen = Vec::new();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rank = 0;
    for (i, v) in b.vectors.iter().enumerate() {
        let gens: Vec<Vec<Q>> = ks.iter().map(|&k| if k == usize::MAX { v.clone() } else { co.mul_basis(k, v) }).map(|g| g.iter().map(qi).collect()).collect();
        let mut trial = rows.clone();
        trial.extend(gens.iter().cloned());
        let r = QMat::from_rows(trial.clone()).rank();
        if r == rank + ks.len() {
            rows = trial;
            rank = r;
            chosen.push(i);
            if rank == nn {
                break;
            }
        }
    }
    if rank < nn {
        return None;
    }
    let bmat = QMat::from_rows(rows).transpose();
    Some((chosen, bmat.inverse()?))
}

/// Finds U (one, or all when `want_all`) in the group with Uᵀ A U = B, U
/// mapping Min(B) onto Min(A).
pub fn isometries(
    co: &Coordinates,
    group: &dyn EquivalenceGroup,
    a: &Prepared,
    b: &Prepared,
    budget: u64,
    want_all: bool,
) -> Result<Vec<QMat>> {
    if a.vectors.len() != b.vectors.len() || a.gram.rows() != b.gram.rows() {
        return Ok(vec![]);
    }
    let mut pa: Vec<&Vec<Q>> = a.profile.iter().collect();
    let mut pb: Vec<&Vec<Q>> = b.profile.iter().collect();
    pa.sort();
    pb.sort();
    if pa != pb {
        return Ok(vec![]);
    }
    let ks: Vec<usize> = if group.of_linear() { (0..co.n).collect() } else { vec![usize::MAX] };
    let Some((chosen, binv)) = choose_basis(co, b, &ks) else {
        return Err(Error::Invalid("minimal vectors do not span".into()));
    };
    let bg = &b.gram;
    let target: Vec<Vec<Vec<Q>>> = chosen
        .iter()
        .map(|&i| {
            chosen
                .iter()
                .map(|&j| {
                    ks.iter()
                        .map(|&k| {
                            let y = if k == usize::MAX { b.vectors[j].clone() } else { co.mul_basis(k, &b.vectors[j]) };
                            bg.bilinear_int(&b.vectors[i], &y)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut s = Search { co, group, a, b, chosen, ks, binv, target, nodes: 0, budget, images: vec![], found: vec![], want_all };
    s.recurse(0)?;
    Ok(s.found)
}

pub fn find_isometry(co: &Coordinates, group: &dyn EquivalenceGroup, a: &Prepared, b: &Prepared, budget: u64) -> Result<Option<QMat>> {
    Ok(isometries(co, group, a, b, budget, false)?.into_iter().next())
}


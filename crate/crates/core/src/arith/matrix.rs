use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rat::{fmt_q, parse_q, qi, Q};
use crate::error::{Error, Result};

/// Dense rational matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        QMat { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect())
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(qi).collect()).collect())
    }

    pub fn diag(d: &[Q]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Q] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &QMat) -> QMat {
        assert_eq!(self.cols, o.rows);
        let mut r = QMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        r[(i, j)] += a * b;
                    }
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Q::zero(), |s, (a, b)| s + a * b))
            .collect()
    }

    pub fn add(&self, o: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &QMat) -> QMat {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// self + c * o
    pub fn add_scaled(&self, o: &QMat, c: &Q) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// xᵀ M x for an integer vector.
    pub fn quad_int(&self, x: &[BigInt]) -> Q {
        self.bilinear_int(x, x)
    }

    pub fn bilinear_int(&self, x: &[BigInt], y: &[BigInt]) -> Q {
        let mut s = Q::zero();
        for i in 0..self.rows {
            if x[i].is_zero() {
                continue;
            }
            let mut t = Q::zero();
            for j in 0..self.cols {
                if !y[j].is_zero() {
                    t += &self[(i, j)] * &y[j];
                }
            }
            s += t * &x[i];
        }
        s
    }

    pub fn quad(&self, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += &x[i] * &self[(i, j)] * &x[j];
            }
        }
        s
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(p, r);
            let inv = Q::one() / &m[(r, c)];
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : M x = 0}.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &p) in piv.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of M x = b, if consistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in piv.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Q::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] >= n {
            return None;
        }
        let mut inv = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Pivots of symmetric Gaussian elimination without pivoting; all positive iff positive definite.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        let mut m = self.clone();
        for c in 0..n {
            let piv = m[(c, c)].clone();
            if !piv.is_positive() {
                return false;
            }
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        true
    }

    /// Positive semidefinite test via diagonalisation with symmetric pivoting.
    pub fn is_positive_semidefinite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let mut m = self.clone();
        let mut active: Vec<usize> = (0..self.rows).collect();
        while let Some(&first) = active.first() {
            let _ = first;
            // choose a nonzero diagonal pivot
            let pos = active.iter().position(|&i| !m[(i, i)].is_zero());
            let Some(pos) = pos else {
                // all active diagonal entries zero: off-diagonals must vanish
                return active.iter().all(|&i| active.iter().all(|&j| m[(i, j)].is_zero()));
            };
            let p = active.remove(pos);
            let piv = m[(p, p)].clone();
            if piv.is_negative() {
                return false;
            }
            for &i in &active {
                if m[(i, p)].is_zero() {
                    continue;
                }
                let f = &m[(i, p)] / &piv;
                for &j in &active {
                    let v = &m[(p, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        true
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(fmt_q).collect()).collect()
    }

    pub fn from_strings(rows: &[Vec<String>]) -> Result<QMat> {
        let r: Result<Vec<Vec<Q>>> = rows.iter().map(|row| row.iter().map(|s| parse_q(s)).collect()).collect();
        let r = r?;
        if r.iter().any(|x| x.len() != r[0].len()) {
            return Err(Error::Parse("ragged matrix".into()));
        }
        Ok(QMat::from_rows(r))
    }
}

impl Serialize for QMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        QMat::from_strings(&rows).map_err(serde::de::Error::custom)
    }
}

/// Determinant of an integer matrix by fraction-free elimination.
pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank of an integer matrix over ℚ.
pub fn rank_int(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    QMat::from_int_rows(rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{q, qf};

    #[test]
    fn det_and_inverse() {
        let m = QMat::from_i64(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(m.det(), q(4));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(3));
        let ints: Vec<Vec<BigInt>> = vec![
            vec![2.into(), (-1).into(), 0.into()],
            vec![(-1).into(), 2.into(), (-1).into()],
            vec![0.into(), (-1).into(), 2.into()],
        ];
        assert_eq!(det_int(&ints), BigInt::from(4));
    }

    #[test]
    fn kernel_and_solve() {
        let m = QMat::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        assert!(m.solve(&[q(1), q(3)]).is_none());
        let x = m.solve(&[q(1), q(2)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(1), q(2)]);
    }

    #[test]
    fn definiteness() {
        assert!(QMat::from_i64(&[&[2, -1], &[-1, 2]]).is_positive_definite());
        assert!(!QMat::from_i64(&[&[1, 2], &[2, 1]]).is_positive_definite());
        assert!(QMat::from_i64(&[&[1, 1], &[1, 1]]).is_positive_semidefinite());
        assert!(!QMat::from_i64(&[&[0, 1], &[1, 0]]).is_positive_semidefinite());
        let half = QMat::from_rows(vec![vec![q(1), qf(-1, 2)], vec![qf(-1, 2), q(1)]]);
        assert!(half.is_positive_definite());
    }
}

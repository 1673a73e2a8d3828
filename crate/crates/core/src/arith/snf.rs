use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type ZMat = Vec<Vec<BigInt>>;

/// U · M · V = diag(d_1, ..., d_r, 0, ...) with d_1 | d_2 | ... | d_r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub u: ZMat,
    pub v: ZMat,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Basis of the integer kernel {x : M x = 0}: the trailing columns of V.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let n = self.v.len();
        (self.rank()..n).map(|j| (0..n).map(|i| self.v[i][j].clone()).collect()).collect()
    }
}

pub fn identity(n: usize) -> ZMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> ZMat {
    vec![vec![BigInt::zero(); c]; r]
}

pub fn matmul(a: &ZMat, b: &ZMat) -> ZMat {
    let (r, k) = (a.len(), b.len());
    let c = b.first().map_or(0, |x| x.len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[t][j].is_zero() {
                    out[i][j] += &a[i][t] * &b[t][j];
                }
            }
        }
    }
    out
}

pub fn smith_normal_form(m: &ZMat, cols: usize) -> Snf {
    let rows = m.len();
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: least absolute nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let qt = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &qt);
                row_axpy(&mut u, i, t, &qt);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let qt = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &qt);
                col_axpy(&mut v, j, t, &qt);
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, t, j);
                    swap_cols(&mut v, t, j);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    row_axpy(&mut a, t, i, &-BigInt::one());
                    row_axpy(&mut u, t, i, &-BigInt::one());
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| a[i][i].clone()).collect();
    Snf { diagonal, u, v }
}

/// row[i] -= q * row[k]
fn row_axpy(a: &mut ZMat, i: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = a[k].clone();
    for (x, s) in a[i].iter_mut().zip(src) {
        *x -= q * s;
    }
}

/// col[j] -= q * col[k]
fn col_axpy(a: &mut ZMat, j: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let s = row[k].clone();
        row[j] -= q * s;
    }
}

fn swap_cols(a: &mut ZMat, i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Integer solution of A x = b, if one exists.
pub fn solve_integer(a: &ZMat, cols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(a, cols);
    // D y = U b, x = V y
    let ub: Vec<BigInt> = s.u.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect();
    let mut y = vec![BigInt::zero(); cols];
    for (i, val) in ub.iter().enumerate() {
        if i < s.rank() {
            if !(val % &s.diagonal[i]).is_zero() {
                return None;
            }
            y[i] = val / &s.diagonal[i];
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(s.v.iter().map(|row| row.iter().zip(&y).map(|(x, z)| x * z).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[&[i64]]) -> ZMat {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn check(m: &ZMat, cols: usize) -> Snf {
        let s = smith_normal_form(m, cols);
        let d = matmul(&matmul(&s.u, m), &s.v);
        for i in 0..m.len() {
            for j in 0..cols {
                let want = if i == j && i < s.rank() { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(d[i][j], want);
            }
        }
        s
    }

    #[test]
    fn examples() {
        assert_eq!(check(&z(&[&[2, 0], &[0, 3]]), 2).diagonal, vec![1.into(), 6.into()]);
        assert_eq!(check(&z(&[&[2, 4], &[6, 8]]), 2).diagonal, vec![2.into(), 4.into()]);
        assert_eq!(check(&z(&[&[1, 0], &[0, 1]]), 2).diagonal, vec![1.into(), 1.into()]);
        let s = check(&z(&[&[1, 2, 3], &[2, 4, 6]]), 3);
        assert_eq!(s.rank(), 1);
        assert_eq!(s.kernel_basis().len(), 2);
    }

    #[test]
    fn integer_solve() {
        let a = z(&[&[2, 3]]);
        let x = solve_integer(&a, 2, &[BigInt::from(1)]).unwrap();
        assert_eq!(&x[0] * 2 + &x[1] * 3, BigInt::from(1));
        assert!(solve_integer(&z(&[&[2, 4]]), 2, &[BigInt::from(1)]).is_none());
    }
}

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::rat::{ceil_q, floor_q, sqrt_upper, Q};
use crate::arith::QMat;
use crate::error::{Error, Result};

/// Quadratic completion Q(x) = Σ_i d_i (x_i + Σ_{j>i} u_ij x_j)².
pub(crate) struct Completion {
    pub d: Vec<Q>,
    /// u[i][j] for j > i
    pub u: Vec<Vec<Q>>,
}

pub(crate) fn complete_square(g: &QMat) -> Result<Completion> {
    if !g.is_symmetric() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = g.rows();
    let mut q: Vec<Vec<Q>> = g.to_rows();
    for i in 0..n {
        if !q[i][i].is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let v = &q[k][i] * &q[i][l];
                q[k][l] -= v;
            }
        }
    }
    let d = (0..n).map(|i| q[i][i].clone()).collect();
    let u = (0..n).map(|i| (0..n).map(|j| if j > i { q[i][j].clone() } else { Q::zero() }).collect()).collect();
    Ok(Completion { d, u })
}

/// All nonzero x ∈ ℤ^N with xᵀ G x ≤ c, one per ± pair (first nonzero
/// coordinate positive), sorted lexicographically.
pub fn fincke_pohst(g: &QMat, c: &Q) -> Result<Vec<Vec<BigInt>>> {
    let comp = complete_square(g)?;
    let n = g.rows();
    let mut out = Vec::new();
    if n == 0 || c.is_negative() {
        return Ok(out);
    }
    let mut x = vec![BigInt::zero(); n];
    descend(&comp, n - 1, c.clone(), true, &mut x, &mut out);
    for v in out.iter_mut() {
        canonical_sign(v);
    }
    out.sort();
    Ok(out)
}

fn descend(comp: &Completion, i: usize, rem: Q, top_zero: bool, x: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>) {
    let n = x.len();
    let mut ui = Q::zero();
    for j in i + 1..n {
        if !x[j].is_zero() {
            ui += &comp.u[i][j] * &x[j];
        }
    }
    let r = &rem / &comp.d[i];
    let s = sqrt_upper(&r);
    let mut lo = ceil_q(&(-&ui - &s));
    let hi = floor_q(&(-&ui + &s));
    if top_zero && lo.is_negative() {
        lo = BigInt::zero();
    }
    let mut xi = lo;
    while xi <= hi {
        let t = &ui + Q::from_integer(xi.clone());
        let val = &comp.d[i] * &t * &t;
        if val <= rem {
            x[i] = xi.clone();
            let zero_here = top_zero && xi.is_zero();
            if i == 0 {
                if !zero_here {
                    out.push(x.clone());
                }
            } else {
                descend(comp, i - 1, &rem - &val, zero_here, x, out);
            }
        }
        xi += BigInt::one();
    }
    x[i] = BigInt::zero();
}

/// Flips v so that its first nonzero coordinate is positive.
pub fn canonical_sign(v: &mut [BigInt]) {
    if let Some(f) = v.iter().find(|x| !x.is_zero()) {
        if f.is_negative() {
            for y in v.iter_mut() {
                *y = -&*y;
            }
        }
    }
}

//! Contiguous forms along a ray (Voronoi neighbors) and the descent to an
//! initial T-perfect form.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::rat::{q, Q};
use crate::arith::QMat;
use crate::error::{Error, Result};
use crate::forms::{fincke_pohst, minimum, TSubspace};

const MAX_STEPS: usize = 100_000;

/// Result of stepping from A along R.
#[derive(Clone, Debug)]
pub struct Neighbor {
    pub rho: Q,
    pub gram: QMat,
    /// Minimal vectors of the new form (minimum unchanged).
    pub vectors: Vec<Vec<BigInt>>,
}

/// Vectors with X[v] ≤ c together with their values, or None if X is not
/// positive definite.
fn short(x: &QMat, c: &Q) -> Result<Option<Vec<(Vec<BigInt>, Q)>>> {
    if !x.is_positive_definite() {
        return Ok(None);
    }
    let vs = fincke_pohst(x, c)?;
    Ok(Some(vs.into_iter().map(|v| {
        let val = x.quad_int(&v);
        (v, val)
    }).collect()))
}

fn min_set(sv: &[(Vec<BigInt>, Q)], c: &Q) -> Vec<Vec<BigInt>> {
    sv.iter().filter(|(_, x)| x == c).map(|(v, _)| v.clone()).collect()
}

fn below(sv: &[(Vec<BigInt>, Q)], c: &Q) -> bool {
    sv.iter().any(|(_, x)| x < c)
}

/// Smallest ρ > 0 with min(A+ρR) = min(A) and Min(A+ρR) ⊄ Min(A).
pub fn neighbor_rho(a: &QMat, min_a: &Q, min_vecs: &[Vec<BigInt>], r: &QMat) -> Result<Neighbor> {
    if r.is_positive_semidefinite() {
        return Err(Error::Invalid("direction is positive semidefinite (dead end)".into()));
    }
    let old: HashSet<&Vec<BigInt>> = min_vecs.iter().collect();
    let at = |t: &Q| a.add_scaled(r, t);
    let (mut l, mut u) = (q(0), q(1));
    let mut steps = 0;
    // bracket: A+lR keeps the minimum, A+uR is positive definite with a smaller one
    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Budget("bracketing the neighbor did not terminate".into()));
        }
        match short(&at(&u), min_a)? {
            None => u = (&l + &u) / q(2),
            Some(sv) if below(&sv, min_a) => break,
            Some(_) => {
                l = u.clone();
                u = &u * q(2);
            }
        }
    }
    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Budget("neighbor search did not terminate".into()));
        }
        let sl = short(&at(&l), min_a)?.expect("lower end stays positive definite");
        let ml = min_set(&sl, min_a);
        if ml.iter().any(|v| !old.contains(v)) {
            return Ok(Neighbor { rho: l.clone(), gram: at(&l), vectors: ml });
        }
        let gamma = (&l + &u) / q(2);
        let su = short(&at(&u), min_a)?.expect("upper end stays positive definite");
        if !below(&su, min_a) && min_set(&su, min_a).iter().any(|v| !old.contains(v)) {
            l = u.clone();
            continue;
        }
        let sg = short(&at(&gamma), min_a)?.expect("midpoint is positive definite");
        if !below(&sg, min_a) {
            l = gamma;
            continue;
        }
        // rational jump: every v below the minimum at γ crosses it at (min − A[v])/R[v]
        let mut nu = gamma.clone();
        for (v, x) in &sg {
            if x < min_a {
                let rv = r.quad_int(v);
                debug_assert!(rv.is_negative());
                let t = (min_a - a.quad_int(v)) / rv;
                if t < nu {
                    nu = t;
                }
            }
        }
        if nu >= u || nu <= l {
            return Err(Error::Inconsistent("neighbor search made no progress".into()));
        }
        u = nu;
    }
}

/// Descends from a positive definite Q0 ∈ T to a T-perfect form with the
/// same minimum by moving along the linearity space of P_T(A).
pub fn initial_t_perfect(q0: &QMat, t: &TSubspace) -> Result<QMat> {
    if t.coords_of(q0).is_none() {
        return Err(Error::Invalid("starting form is not in T".into()));
    }
    let mut a = q0.clone();
    let md = minimum(&a)?;
    let min_a = md.min.clone();
    let mut vecs = md.vectors;
    for _ in 0..=t.dim() {
        let rows: Vec<Vec<Q>> = vecs.iter().map(|v| t.functional(v)).collect();
        let lin: Vec<Vec<Q>> = if rows.is_empty() {
            (0..t.dim()).map(|i| (0..t.dim()).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
        } else {
            QMat::from_rows(rows).kernel()
        };
        if lin.is_empty() {
            return Ok(a);
        }
        let dirs: Vec<QMat> = lin.iter().map(|c| t.from_coords(c)).collect();
        let r = match dirs.iter().find(|r| !r.is_positive_semidefinite() && !r.scale(&q(-1)).is_positive_semidefinite()) {
            Some(r) => r.clone(),
            None if dirs[0].is_positive_semidefinite() => dirs[0].scale(&q(-1)),
            None => dirs[0].clone(),
        };
        let nb = neighbor_rho(&a, &min_a, &vecs, &r)?;
        debug_assert!(!nb.rho.is_zero());
        a = nb.gram;
        vecs = nb.vectors;
    }
    Err(Error::Inconsistent("linearity space did not shrink".into()))
}

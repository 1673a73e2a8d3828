//! Double description: H-representation to extreme rays.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{dot, echelon, linearity_space, rank_of, reduce_mod, HRep, IVec, VRep};
use crate::arith::rat::primitive_int;

struct Ray {
    v: IVec,
    tight: FixedBitSet,
}

fn combine(p: &IVec, ap: &BigInt, n: &IVec, an: &BigInt) -> IVec {
    // ap > 0 > an; result vanishes on the new constraint
    let w: IVec = p.iter().zip(n).map(|(x, y)| ap * y - an * x).collect();
    primitive_int(&w)
}

fn sub_scaled(x: &IVec, ax: &BigInt, l: &IVec, al: &BigInt) -> IVec {
    let w: IVec = x.iter().zip(l).map(|(xi, li)| al * xi - ax * li).collect();
    let w = primitive_int(&w);
    // keep the direction of x when al < 0
    if al.is_negative() {
        w.into_iter().map(|c| -c).collect()
    } else {
        w
    }
}

/// Extreme rays and lineality space of an H-described cone. Constraints are
/// inserted in the order given.
pub fn dd_convert(h: &HRep) -> VRep {
    let start = Instant::now();
    let d = h.d;
    let m = h.ineqs.len();
    // initial cone: the subspace cut out by the equalities
    let mut lin: Vec<IVec> = linearity_space(&HRep { d, ineqs: vec![], eqs: h.eqs.clone() });
    let eq_rank = rank_of(&h.eqs.iter().collect::<Vec<_>>(), d);
    let mut rays: Vec<Ray> = Vec::new();
    for (k, a) in h.ineqs.iter().enumerate() {
        let al: Vec<BigInt> = lin.iter().map(|l| dot(a, l)).collect();
        if let Some(i0) = al.iter().position(|x| !x.is_zero()) {
            let l0 = lin[i0].clone();
            let a0 = al[i0].clone();
            let mut new_lin = Vec::new();
            for (i, l) in lin.iter().enumerate() {
                if i != i0 {
                    new_lin.push(if al[i].is_zero() { l.clone() } else { sub_scaled(l, &al[i], &l0, &a0) });
                }
            }
            for r in rays.iter_mut() {
                let ar = dot(a, &r.v);
                if !ar.is_zero() {
                    r.v = sub_scaled(&r.v, &ar, &l0, &a0);
                }
                r.tight.grow(m);
                r.tight.insert(k);
            }
            let dir = if a0.is_positive() { l0 } else { l0.into_iter().map(|c| -c).collect() };
            let mut tight = FixedBitSet::with_capacity(m);
            tight.insert_range(..k);
            rays.push(Ray { v: dir, tight });
            lin = new_lin;
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.tight.insert(k);
                }
            }
            continue;
        }
        // two rays are adjacent when their common tight set is not contained
        // in the tight set of any third ray and is large enough
        let need = (d - lin.len()).saturating_sub(2 + eq_rank);
        let pairs: Vec<(usize, usize)> = pos.iter().flat_map(|&p| neg.iter().map(move |&n| (p, n))).collect();
        let adjacent: Vec<(usize, usize)> = pairs
            .par_iter()
            .copied()
            .filter(|&(p, n)| {
                let mut common = rays[p].tight.clone();
                common.intersect_with(&rays[n].tight);
                if common.count_ones(..) < need {
                    return false;
                }
                !rays.iter().enumerate().any(|(i, r)| i != p && i != n && common.is_subset(&r.tight))
            })
            .collect();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + adjacent.len());
        for &(p, n) in &adjacent {
            let v = combine(&rays[p].v, &vals[p], &rays[n].v, &vals[n]);
            let mut tight = rays[p].tight.clone();
            tight.intersect_with(&rays[n].tight);
            tight.insert(k);
            next.push(Ray { v, tight });
        }
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_zero() {
                r.tight.insert(k);
                next.push(r);
            } else if vals[i].is_positive() {
                next.push(r);
            }
        }
        rays = next;
    }
    let lineality = echelon(&lin, d);
    let mut out: Vec<IVec> = rays.into_iter().map(|r| if lineality.is_empty() { r.v } else { reduce_mod(&r.v, &lineality) }).collect();
    out.sort();
    out.dedup();
    log::debug!("dd_convert d={d} constraints={m} rays={} in {:?}", out.len(), start.elapsed());
    VRep { d, rays: out, lineality }
}

/// Rank of the constraints tight at x, counting equalities.
pub fn tight_rank(h: &HRep, x: &IVec) -> usize {
    let rows: Vec<&IVec> = h.ineqs.iter().filter(|l| dot(l, x).is_zero()).chain(&h.eqs).collect();
    rank_of(&rows, h.d)
}

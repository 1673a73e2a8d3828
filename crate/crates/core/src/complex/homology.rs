use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Boundary, Cell};
use crate::arith::rat::q;
use crate::arith::snf::{matmul, smith_normal_form};
use crate::arith::strs;
use crate::arith::QMat;
use crate::error::{Error, Result};
use crate::field::{small_elements, NumberField, TwoSquares};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Homology {
    /// Free ranks of H_0..H_3.
    pub betti: Vec<usize>,
    /// Invariant factors > 1 of each H_k.
    #[serde(with = "strs::ivecs")]
    pub torsion: Vec<Vec<BigInt>>,
    /// Ranks of d_1..d_3 over ℤ (equal to the ranks over ℚ).
    pub ranks: Vec<usize>,
    /// Integral basis of ker d_3 in chain coordinates.
    #[serde(with = "strs::ivecs")]
    pub h3_basis: Vec<Vec<BigInt>>,
}

pub(super) fn check_dd(bd: &[Boundary]) -> Result<()> {
    for w in bd.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let p = matmul(&lo.dense(), &hi.dense());
        for (r, row) in p.iter().enumerate() {
            if let Some(c) = row.iter().position(|x| !x.is_zero()) {
                return Err(Error::Inconsistent(format!(
                    "d_{}∘d_{} ≠ 0: {}-cell {c} hits {}-cell {r} with coefficient {}",
                    lo.k,
                    hi.k,
                    hi.k,
                    lo.k - 1,
                    row[c]
                )));
            }
        }
    }
    Ok(())
}

fn rational_rank(m: &[Vec<BigInt>], cols: usize) -> usize {
    if m.is_empty() || cols == 0 {
        return 0;
    }
    QMat::from_int_rows(m).rank()
}

impl Homology {
    pub fn compute(bd: &[Boundary], chain: &[Vec<Option<usize>>]) -> Result<Homology> {
        let sizes: Vec<usize> = chain.iter().map(|l| l.iter().flatten().count()).collect();
        let mut ranks = Vec::new();
        let mut factors = Vec::new();
        let mut h3_basis = Vec::new();
        for b in bd {
            let dense = b.dense();
            let s = smith_normal_form(&dense, b.cols);
            if s.rank() != rational_rank(&dense, b.cols) {
                return Err(Error::Inconsistent(format!("rank of d_{} disagrees over ℤ and ℚ", b.k)));
            }
            ranks.push(s.rank());
            factors.push(s.diagonal.iter().map(|d| d.abs()).filter(|d| !d.is_one()).collect::<Vec<_>>());
            if b.k == 3 {
                h3_basis = s.kernel_basis();
            }
        }
        // H_k = ker d_k / im d_{k+1}; d_0 = 0 and d_4 = 0
        let rank_d = |k: usize| if (1..=3).contains(&k) { ranks[k - 1] } else { 0 };
        let betti = (0..=3).map(|k| sizes[k] - rank_d(k) - rank_d(k + 1)).collect();
        let torsion = (0..=3).map(|k| if k < 3 { factors[k].clone() } else { vec![] }).collect();
        Ok(Homology { betti, torsion, ranks, h3_basis })
    }
}

pub(super) fn lcm_orders(cells: &[Vec<Cell>]) -> u64 {
    cells.iter().flatten().filter(|c| c.stabilizer_order > 0).fold(1u64, |acc, c| acc.lcm(&(c.stabilizer_order as u64)))
}

/// Integer weights ±N/|Γ_j| on the top cells, signs from the generator of
/// ker d_3 whose entries must be proportional to 1/|Γ_j|.
pub(super) fn cycle_weights(h: &Homology, tops: &[Cell], chain: &[Option<usize>], n: u64) -> Result<Vec<i64>> {
    let [gen] = h.h3_basis.as_slice() else {
        return Err(Error::Unsupported(format!("H_3 of rank {}; weights need rank one", h.h3_basis.len())));
    };
    let mut scale: Option<BigInt> = None;
    let mut w = vec![0i64; tops.len()];
    for (i, c) in tops.iter().enumerate() {
        let Some(j) = chain[i] else { continue };
        let g = &gen[j];
        if g.is_zero() {
            return Err(Error::Inconsistent(format!("top cell {i} is missing from the H_3 generator")));
        }
        let order = c.stabilizer_order as u64;
        if order == 0 || n % order != 0 {
            return Err(Error::Inconsistent(format!("stabilizer order {order} of top cell {i} does not divide N = {n}")));
        }
        let c_i = g.abs() * BigInt::from(order);
        match &scale {
            None => scale = Some(c_i),
            Some(s) if *s != c_i => {
                return Err(Error::Inconsistent("H_3 generator is not proportional to the inverse stabilizer orders".into()));
            }
            _ => {}
        }
        let mag = (n / order) as i64;
        w[i] = if g.is_positive() { mag } else { -mag };
    }
    Ok(w)
}

/// r such that η_r + η_r⁻¹ ∈ F, by following η^k = s_k·η − s_{k−1} with
/// s_{k+1} = x·s_k − s_{k−1} for the algebraic integers x with |σ(x)| ≤ 2.
pub fn cyclic_orders(f: &NumberField) -> Result<Vec<u64>> {
    let n = f.degree() as i64;
    let (cands, _) = small_elements(f, &q(4 * n))?;
    let mut xs = vec![f.zero()];
    for c in cands {
        xs.push(f.neg(&c));
        xs.push(c);
    }
    let limit = 4 * (f.degree() as u64).pow(2) + 12;
    let mut out = vec![1u64, 2];
    for x in xs {
        let (mut s0, mut s1) = (f.zero(), f.one());
        for k in 1..=limit {
            // η^k = s1·η − s0
            if s1.is_zero() && f.is_one(&f.neg(&s0)) {
                if !out.contains(&k) {
                    out.push(k);
                }
                break;
            }
            let s2 = f.sub(&f.mul(&x, &s1), &s0);
            s0 = s1;
            s1 = s2;
        }
    }
    out.sort();
    Ok(out)
}

/// lcm of the orders of finite subgroups of PGL₂(F) allowed by the
/// classification (cyclic, dihedral, A₄/S₄, A₅).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NBound {
    pub value: Option<u64>,
    pub cyclic: Vec<u64>,
    pub minus_one_two_squares: Option<bool>,
    pub sqrt5: bool,
    pub note: String,
}

pub fn n_bound(f: &NumberField) -> Result<NBound> {
    let cyclic = cyclic_orders(f)?;
    let mut l = cyclic.iter().fold(1u64, |a, &r| a.lcm(&r).lcm(&(2 * r)));
    let two = f.minus_one_sum_of_two_squares(&TwoSquares::default())?;
    let sqrt5 = f.sqrt5_in_field()?;
    let tb = two.as_bool();
    let note = match &tb {
        Some(true) => {
            l = l.lcm(&24);
            if sqrt5 {
                l = l.lcm(&60);
            }
            "A4 and S4 present".to_string()
        }
        Some(false) => "no A4/S4/A5".to_string(),
        None => "sum-of-two-squares test undecided".to_string(),
    };
    Ok(NBound { value: tb.map(|_| l), cyclic, minus_one_two_squares: tb, sqrt5, note })
}

//! Dedekind ζ_F(2) from its Euler product, with a rigorous tail bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::modp::{inv_mod, mul_mod, primes_up_to};
use crate::arith::{Real, Q};
use crate::error::{Error, Result};
use crate::field::NumberField;

type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn deg(a: &Poly) -> isize {
    a.len() as isize - 1
}

fn sub(a: &Poly, b: &Poly, p: u64) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(out)
}

fn mul(a: &Poly, b: &Poly, p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Quotient and remainder; b nonzero.
fn divrem(a: &Poly, b: &Poly, p: u64) -> (Poly, Poly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let li = inv_mod(b[db], p);
    let mut q = vec![0; a.len().saturating_sub(db).max(1)];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = mul_mod(r[r.len() - 1], li, p);
        q[k] = c;
        for (i, &y) in b.iter().enumerate() {
            r[k + i] = (r[k + i] + p - mul_mod(c, y, p)) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    a
}

fn powmod(base: &Poly, mut e: u64, m: &Poly, p: u64) -> Poly {
    let mut acc = vec![1];
    let mut b = divrem(base, m, p).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = divrem(&mul(&acc, &b, p), m, p).1;
        }
        b = divrem(&mul(&b, &b, p), m, p).1;
        e >>= 1;
    }
    acc
}

fn reduce_poly(c: &[BigInt], p: u64) -> Poly {
    let bp = BigInt::from(p);
    trim(c.iter().map(|x| x.mod_floor(&bp).to_u64().unwrap()).collect())
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn ddf(f: &Poly, p: u64) -> Vec<u32> {
    let mut f = f.clone();
    let x = vec![0, 1];
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while deg(&f) >= 2 * d as isize {
        h = powmod(&h, p, &f, p);
        let g = gcd(&sub(&h, &x, p), &f, p);
        if deg(&g) > 0 {
            for _ in 0..deg(&g) as u32 / d {
                out.push(d);
            }
            f = divrem(&f, &g, p).0;
            h = divrem(&h, &f, p).1;
        }
        d += 1;
    }
    if deg(&f) > 0 {
        out.push(deg(&f) as u32);
    }
    out
}

fn is_squarefree(f: &Poly, p: u64) -> bool {
    let df: Poly = trim(f.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect());
    !df.is_empty() && deg(&gcd(f, &df, p)) == 0
}

fn row_basis(rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let mut m = rows;
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        for x in m[rank].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let k = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] + p - mul_mod(k, m[rank][j], p)) % p;
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

fn mobius(n: u32) -> i64 {
    let (mut n, mut s, mut d) = (n, 1, 2);
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            s = -s;
        }
        d += 1;
    }
    if n > 1 {
        -s
    } else {
        s
    }
}

fn totient(n: u32) -> i64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as i64
}

/// Residue degrees at p read off the Frobenius on the reduced algebra
/// (O_F/p)^{p^k}: the fixed space of Frob^d there has dimension Σ gcd(f_i, d).
fn degrees_from_algebra(f: &NumberField, p: u64) -> Vec<u32> {
    let n = f.degree();
    let bp = BigInt::from(p);
    let table: Vec<Vec<Vec<u64>>> = f
        .mult_table()
        .iter()
        .map(|r| r.iter().map(|v| v.iter().map(|c| c.to_integer().mod_floor(&bp).to_u64().unwrap()).collect()).collect())
        .collect();
    let amul = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                let c = mul_mod(a[i], b[j], p);
                for k in 0..n {
                    out[k] = (out[k] + mul_mod(c, table[i][j][k], p)) % p;
                }
            }
        }
        out
    };
    let apow = |a: &[u64], mut e: u64| -> Vec<u64> {
        let mut acc = f.one().int_coords().unwrap().iter().map(|c| c.mod_floor(&bp).to_u64().unwrap()).collect::<Vec<_>>();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = amul(&acc, &b);
            }
            b = amul(&b, &b);
            e >>= 1;
        }
        acc
    };
    // frob applied to a vector through the images of the basis
    let frob_basis: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            apow(&e, p)
        })
        .collect();
    let frob = |v: &[u64]| -> Vec<u64> {
        let mut out = vec![0; n];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                for k in 0..n {
                    out[k] = (out[k] + mul_mod(c, frob_basis[i][k], p)) % p;
                }
            }
        }
        out
    };
    let mut k = 0;
    let mut pk: u64 = 1;
    while (pk as usize) < n {
        pk = pk.saturating_mul(p);
        k += 1;
    }
    let image: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            for _ in 0..k {
                v = frob(&v);
            }
            v
        })
        .collect();
    let s = row_basis(image, p);
    let r = s.len();
    let mut g = vec![0i64; n + 1];
    for d in 1..=n {
        let moved: Vec<Vec<u64>> = s
            .iter()
            .map(|v| {
                let mut w = v.clone();
                for _ in 0..d {
                    w = frob(&w);
                }
                w.iter().zip(v).map(|(a, b)| (a + p - b) % p).collect()
            })
            .collect();
        g[d] = (r - row_basis(moved, p).len()) as i64;
    }
    // C_t = #{i : t | f_i}, from g_d = Σ_{t|d} φ(t) C_t
    let mut big_c = vec![0i64; n + 1];
    for t in 1..=n {
        let s: i64 = (1..=t).filter(|e| t % e == 0).map(|e| mobius((t / e) as u32) * g[e]).sum();
        big_c[t] = s / totient(t as u32);
    }
    let mut out = Vec::new();
    for fd in 1..=n {
        let c: i64 = (fd..=n).step_by(fd).map(|m| mobius((m / fd) as u32) * big_c[m]).sum();
        for _ in 0..c {
            out.push(fd as u32);
        }
    }
    out
}

/// Residue degrees of the primes of O_F above p.
pub fn residue_degrees(f: &NumberField, p: u64) -> Vec<u32> {
    let poly = reduce_poly(&f.min_poly, p);
    if is_squarefree(&poly, p) {
        ddf(&poly, p)
    } else {
        degrees_from_algebra(f, p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// B = 2^10, 2^12, 2^14, ...
    Quartic,
    /// B = 10^3, 10^4, ...
    Decimal,
}

impl Schedule {
    fn bounds(self, cap: u64) -> Vec<u64> {
        let (mut b, step) = match self {
            Schedule::Quartic => (1u64 << 10, 4),
            Schedule::Decimal => (1000, 10),
        };
        let mut out = Vec::new();
        while b <= cap {
            out.push(b);
            b *= step;
        }
        if out.is_empty() {
            out.push(cap.max(2));
        }
        out
    }
}

/// Upper bound on ζ_F(2) / Π_{p≤B} (local factors) − 1. Uses
/// Σ_{p>B} p⁻² ≤ 2.52/(B log B) (from π(x) < 1.25506 x/log x) and at most
/// n primes above each p.
pub fn tail_bound(n: usize, b: u64) -> f64 {
    let bf = b as f64;
    let x = n as f64 * 2.52 / (bf * bf.ln()) * (1.0 + 2.0 / (bf * bf)) * (1.0 + 1e-9);
    x + x * x
}

#[derive(Clone, Debug)]
pub struct ZetaValue {
    pub value: Real,
    pub schedule: Schedule,
    pub bound: u64,
    pub primes: usize,
    pub tail: f64,
    /// Whether the tail got below 2^(−prec) before the cap.
    pub target_met: bool,
}

pub fn zeta_f_2(f: &NumberField, prec: u32, schedule: Schedule, cap: u64) -> Result<ZetaValue> {
    let n = f.degree();
    let target = 2f64.powi(-(prec as i32));
    let bounds = schedule.bounds(cap);
    let b = *bounds.iter().find(|&&b| tail_bound(n, b) < target).unwrap_or(bounds.last().unwrap());
    let tail = tail_bound(n, b);
    let w = prec + 48;
    let primes = primes_up_to(b);
    let chunks: Vec<Real> = primes
        .par_chunks(4096)
        .map(|ps| {
            let mut acc = Real::from_i64(1, w);
            for &p in ps {
                let mut fac = Q::one();
                for d in residue_degrees(f, p) {
                    let q2 = BigInt::from(p).pow(2 * d);
                    fac *= Q::new(q2.clone(), q2 - 1);
                }
                acc = acc.mul(&Real::from_q(&fac, w));
            }
            acc
        })
        .collect();
    let mut prod = Real::from_i64(1, w);
    for c in &chunks {
        prod = prod.mul(c);
    }
    let t = Q::from_float(tail).ok_or_else(|| Error::Inconsistent("tail bound overflow".into()))?;
    let half = &t / Q::from_integer(2.into());
    let value = prod.mul(&Real::from_q_rad(&(Q::one() + &half), &half, w)).with_prec(prec + 8);
    Ok(ZetaValue { value, schedule, bound: b, primes: primes.len(), tail, target_met: tail < target })
}

/// 2^{1−3r₂} π^{−2r₂} |Δ_F|^{3/2} ζ_F(2).
pub fn borel_volume(f: &NumberField, zeta: &Real) -> Real {
    let w = zeta.prec() + 16;
    let r2 = f.r2 as u32;
    let d = BigInt::from(f.discriminant.magnitude().clone());
    let d32 = Real::from_int(&d.pow(3), w).sqrt();
    let pi2 = Real::pi(w).sqr().pow(r2);
    let two = Q::new(BigInt::from(2), BigInt::one() << (3 * r2));
    d32.mul(&zeta.with_prec(w)).mul_q(&two).div(&pi2).expect("π > 0").with_prec(zeta.prec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(c: &[i64]) -> NumberField {
        NumberField::from_i64_poly(c).unwrap()
    }

    #[test]
    fn splitting_gaussian() {
        let f = field(&[1, 0, 1]);
        assert_eq!(residue_degrees(&f, 2), vec![1]);
        assert_eq!(residue_degrees(&f, 3), vec![2]);
        assert_eq!(residue_degrees(&f, 5), vec![1, 1]);
        assert_eq!(degrees_from_algebra(&f, 5), vec![1, 1]);
        assert_eq!(degrees_from_algebra(&f, 7), vec![2]);
    }

    #[test]
    fn splitting_with_index_two() {
        // x² + 3 has index 2 in the maximal order; 2 is inert in ℚ(√−3)
        let f = field(&[3, 0, 1]);
        assert_eq!(residue_degrees(&f, 2), vec![2]);
        assert_eq!(residue_degrees(&f, 3), vec![1]);
        assert_eq!(residue_degrees(&f, 7), vec![1, 1]);
    }

    #[test]
    fn splitting_cyclotomic_five() {
        let f = field(&[1, 1, 1, 1, 1]);
        assert_eq!(residue_degrees(&f, 5), vec![1]);
        assert_eq!(residue_degrees(&f, 11), vec![1, 1, 1, 1]);
        assert_eq!(residue_degrees(&f, 19), vec![2, 2]);
        assert_eq!(residue_degrees(&f, 2), vec![4]);
        assert_eq!(degrees_from_algebra(&f, 19), vec![2, 2]);
    }

    #[test]
    fn basel_and_gaussian_volume() {
        let q = NumberField::rationals();
        let z = zeta_f_2(&q, 40, Schedule::Quartic, 1 << 20).unwrap();
        assert!((z.value.to_f64() - 1.6449340668482264).abs() <= z.value.rad_f64() + 1e-15);
        let f = field(&[1, 0, 1]);
        let z = zeta_f_2(&f, 40, Schedule::Decimal, 1 << 20).unwrap();
        let exact = 1.6449340668482264 * 0.915_965_594_177_219;
        assert!((z.value.to_f64() - exact).abs() <= z.value.rad_f64() + 1e-15);
        assert!(z.value.rad_f64() < 1e-6);
        let v = borel_volume(&f, &z.value);
        assert!((v.to_f64() - 0.305_321_864_725_739_7).abs() < 1e-6);
    }
}

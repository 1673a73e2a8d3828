//! Irreducibility, conjugation, roots of unity, squares and local data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::embed::eval_poly_ball;
use super::{Elem, NumberField};
use crate::arith::modp::{matmul_mod, pow_mod, rank_mod};
use crate::arith::rat::{qi, Q};
use crate::arith::{Complex, QMat, QPoly, Real};
use crate::error::{Error, Result};
use crate::forms::fincke_pohst;

/// Products of (x - r) over subsets of the roots never give an integer
/// factor; subsets are checked with certified balls.
pub(super) fn is_irreducible(f: &NumberField) -> Result<bool> {
    let n = f.n;
    if n > 14 {
        return Err(Error::Unsupported("irreducibility check above degree 14".into()));
    }
    let mut w = 128;
    'prec: loop {
        let roots = all_roots(f, w)?;
        for d in 1..=n / 2 {
            for subset in combinations(n, d) {
                let mut coeffs = vec![Complex::one(w)];
                for &i in &subset {
                    // multiply by (x - r_i)
                    let mut next = vec![Complex::zero(w); coeffs.len() + 1];
                    for (k, c) in coeffs.iter().enumerate() {
                        next[k + 1] = next[k + 1].add(c);
                        next[k] = next[k].sub(&c.mul(&roots[i]));
                    }
                    coeffs = next;
                }
                let mut cand = Vec::new();
                let mut possible = true;
                for c in &coeffs {
                    if !c.im.contains_zero() {
                        possible = false;
                        break;
                    }
                    let lo = crate::arith::rat::ceil_q(&c.re.lower_q());
                    let hi = crate::arith::rat::floor_q(&c.re.upper_q());
                    if lo > hi {
                        possible = false;
                        break;
                    }
                    if lo != hi {
                        if w > 4096 {
                            return Err(Error::Inconsistent("irreducibility test precision exhausted".into()));
                        }
                        w *= 2;
                        continue 'prec;
                    }
                    cand.push(qi(&lo));
                }
                if possible {
                    let g = QPoly::new(cand);
                    if f.poly.rem(&g).is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        return Ok(true);
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All n roots of the minimal polynomial, conjugates included.
fn all_roots(f: &NumberField, w: u32) -> Result<Vec<Complex>> {
    let r = f.root_balls(w)?;
    let mut out = Vec::new();
    for (k, z) in r.into_iter().enumerate() {
        if k >= f.r1 {
            out.push(z.conj());
        }
        out.push(z);
    }
    Ok(out)
}

/// Complex conjugation as a coordinate matrix, when it is an automorphism.
pub(super) fn find_conjugation(f: &NumberField) -> Result<Option<QMat>> {
    let n = f.n;
    if f.r2 == 0 {
        return Ok(Some(QMat::identity(n)));
    }
    if f.r1 > 0 {
        return Ok(None);
    }
    // discriminant of the power basis bounds denominators of τ(θ)
    let det_b = f.basis_power.det();
    let disc_theta = (Q::from_integer(f.discriminant.clone()) / (&det_b * &det_b)).abs().to_integer();
    let mut w = 160;
    loop {
        let roots = all_roots(f, w)?;
        // Lagrange interpolation of z ↦ conj(z) through all roots
        let mut coeffs = vec![Complex::zero(w); n];
        for k in 0..n {
            let mut basis = vec![Complex::one(w)];
            let mut denom = Complex::one(w);
            for l in 0..n {
                if l == k {
                    continue;
                }
                let mut next = vec![Complex::zero(w); basis.len() + 1];
                for (i, c) in basis.iter().enumerate() {
                    next[i + 1] = next[i + 1].add(c);
                    next[i] = next[i].sub(&c.mul(&roots[l]));
                }
                basis = next;
                denom = denom.mul(&roots[k].sub(&roots[l]));
            }
            let scale = roots[k].conj().div(&denom).ok_or_else(|| Error::Field("coincident roots".into()))?;
            for i in 0..n {
                coeffs[i] = coeffs[i].add(&basis[i].mul(&scale));
            }
        }
        let dq = Real::from_int(&disc_theta, w);
        let mut cand = Vec::new();
        let mut retry = false;
        let mut possible = true;
        for c in &coeffs {
            if !c.im.contains_zero() {
                possible = false;
                break;
            }
            let v = c.re.mul(&dq);
            let lo = crate::arith::rat::ceil_q(&v.lower_q());
            let hi = crate::arith::rat::floor_q(&v.upper_q());
            if lo > hi {
                possible = false;
                break;
            }
            if lo != hi {
                retry = true;
                break;
            }
            cand.push(Q::new(lo, disc_theta.clone()));
        }
        if retry {
            if w > 4096 {
                return Err(Error::Inconsistent("conjugation search precision exhausted".into()));
            }
            w *= 2;
            continue;
        }
        if !possible {
            return Ok(None);
        }
        let g = QPoly::new(cand);
        let tau_theta = f.from_power_poly(&g);
        // τ(θ) must be a root of the minimal polynomial
        let val = eval_in_field(f, &f.poly, &tau_theta);
        if !val.is_zero() {
            return Ok(None);
        }
        let mut m = QMat::zeros(n, n);
        for j in 0..n {
            let img = eval_in_field(f, &f.basis_poly(j), &tau_theta);
            for i in 0..n {
                m[(i, j)] = img.0[i].clone();
            }
        }
        return Ok(Some(m));
    }
}

fn eval_in_field(f: &NumberField, p: &QPoly, x: &Elem) -> Elem {
    p.0.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), &f.from_q(c)))
}

/// Gram matrix of T2, exact when conjugation is an automorphism and a close
/// rational approximation otherwise.
fn t2_gram_any(f: &NumberField) -> Result<(QMat, bool)> {
    if let Some(g) = f.t2_gram() {
        return Ok((g, true));
    }
    let n = f.n;
    let emb: Vec<Vec<(f64, f64)>> = (0..n).map(|i| f.embed_all_f64(&f.basis_elem(i))).collect();
    let mut g = QMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let s: f64 = emb[i].iter().zip(&emb[j]).map(|(a, b)| a.0 * b.0 + a.1 * b.1).sum();
            g[(i, j)] = Q::from_float(s).unwrap();
        }
    }
    let gt = g.transpose();
    Ok((g.add(&gt).scale(&Q::new(1.into(), 2.into())), false))
}

/// Integral elements with T2 ≤ bound, ± pairs collapsed.
pub(crate) fn small_elements(f: &NumberField, bound: &Q) -> Result<(Vec<Elem>, bool)> {
    let (g, exact) = t2_gram_any(f)?;
    let c = if exact { bound.clone() } else { bound * Q::new(1_000_001.into(), 1_000_000.into()) + Q::new(1.into(), 1_000_000.into()) };
    let vs = fincke_pohst(&g, &c)?;
    Ok((vs.into_iter().map(|v| f.elem_from_ints(&v)).collect(), exact))
}

pub(super) fn roots_of_unity(f: &NumberField) -> Result<(usize, Elem)> {
    let minus_one = f.from_int(-1);
    if f.n == 1 || f.r1 > 0 {
        return Ok((2, minus_one));
    }
    let n = f.n as i64;
    let (cands, _) = small_elements(f, &Q::from_integer(n.into()))?;
    let mut best = (2usize, minus_one);
    for s in cands {
        for x in [s.clone(), f.neg(&s)] {
            if let Some(k) = multiplicative_order(f, &x, 4 * (f.n * f.n) + 8) {
                if k > best.0 || (k == best.0 && k > 2 && x < best.1) {
                    best = (k, x);
                }
            }
        }
    }
    Ok(best)
}

pub fn multiplicative_order(f: &NumberField, x: &Elem, limit: usize) -> Option<usize> {
    if !x.is_integral_coords() {
        return None;
    }
    let mut y = x.clone();
    for k in 1..=limit {
        if f.is_one(&y) {
            return Some(k);
        }
        y = f.mul(&y, x);
    }
    None
}

/// Outcome of the "−1 is a sum of two squares" decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LevelOutcome {
    True { certificate: Option<(Vec<String>, Vec<String>)>, method: String },
    False { reason: String },
    Undecided { reason: String },
}

impl LevelOutcome {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            LevelOutcome::True { .. } => Some(true),
            LevelOutcome::False { .. } => Some(false),
            LevelOutcome::Undecided { .. } => None,
        }
    }
}

/// Options for the sum-of-two-squares search.
#[derive(Clone, Debug)]
pub struct TwoSquares {
    pub height: i64,
    pub max_candidates: usize,
}

impl Default for TwoSquares {
    fn default() -> Self {
        TwoSquares { height: 20, max_candidates: 20_000 }
    }
}

fn p_adic_valuation(x: &BigInt, p: u64) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    while (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    v
}

impl NumberField {
    /// A square root in O_F of an element, found exactly by enumerating
    /// elements whose T2 matches.
    pub fn sqrt(&self, d: &Elem) -> Result<Option<Elem>> {
        if d.is_zero() {
            return Ok(Some(self.zero()));
        }
        let den = self.denominator(d);
        let scaled = self.scale(d, &Q::from_integer(&den * &den));
        // sqrt(d) = sqrt(d den²) / den; d den² is integral only if d's
        // coordinates have square denominators, so test integrality first
        if !scaled.is_integral_coords() {
            return Ok(None);
        }
        // T2(s) = Σ |σ(s)|² = Σ |σ(d den²)|
        let emb = self.embed_all_full(&scaled, 64)?;
        let bound: Q = emb.iter().map(|z| z.abs().upper_q()).sum();
        let (cands, _) = small_elements(self, &bound)?;
        for s in cands {
            if self.mul(&s, &s) == scaled {
                let r = self.scale(&s, &Q::new(BigInt::one(), den.clone()));
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    pub fn is_square(&self, d: &Elem) -> Result<bool> {
        Ok(self.sqrt(d)?.is_some())
    }

    pub fn sqrt5_in_field(&self) -> Result<bool> {
        self.is_square(&self.from_int(5))
    }

    /// Whether the order is maximal at p, as far as can be told from the
    /// discriminant alone.
    pub fn p_maximal(&self, p: u64) -> bool {
        !self.maximality_unverified || p_adic_valuation(&self.discriminant, p) <= 1
    }

    pub fn minus_one_sum_of_two_squares(&self, opts: &TwoSquares) -> Result<LevelOutcome> {
        if self.r1 > 0 {
            return Ok(LevelOutcome::False { reason: "field has a real embedding".into() });
        }
        let m1 = self.from_int(-1);
        if let Some(i) = self.sqrt(&m1)? {
            return Ok(LevelOutcome::True {
                certificate: Some((i.to_strings(), self.zero().to_strings())),
                method: "square root of -1".into(),
            });
        }
        let local = if self.p_maximal(2) { Some(self.dyadic_local_degrees()?.iter().all(|d| d % 2 == 0)) } else { None };
        if local == Some(false) {
            return Ok(LevelOutcome::False { reason: "odd local degree at a dyadic prime".into() });
        }
        // look for an explicit certificate
        let mut tried = 0usize;
        for h in 1..=opts.height {
            for a in box_shell(self.n, h) {
                tried += 1;
                if tried > opts.max_candidates {
                    break;
                }
                let a = self.elem_from_i64(&a);
                let rest = self.sub(&m1, &self.mul(&a, &a));
                if let Some(b) = self.sqrt(&rest)? {
                    return Ok(LevelOutcome::True {
                        certificate: Some((a.to_strings(), b.to_strings())),
                        method: "bounded search".into(),
                    });
                }
            }
        }
        match local {
            Some(true) => Ok(LevelOutcome::True { certificate: None, method: "local criterion at 2".into() }),
            _ => Ok(LevelOutcome::Undecided { reason: format!("no certificate up to height {}", opts.height) }),
        }
    }

    fn table_mod(&self, p: u64) -> Vec<Vec<Vec<u64>>> {
        let pb = BigInt::from(p);
        let red = |x: &Q| -> u64 { (x.to_integer().mod_floor(&pb)).to_u64().unwrap() };
        self.mult.iter().map(|row| row.iter().map(|c| c.iter().map(red).collect()).collect()).collect()
    }

    fn one_mod(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        self.one.0.iter().map(|x| x.to_integer().mod_floor(&pb).to_u64().unwrap()).collect()
    }

    /// Matrix of the Frobenius x ↦ x^p on O_F / p (columns are images of basis elements).
    fn frobenius_mod(&self, p: u64, table: &[Vec<Vec<u64>>]) -> Vec<Vec<u64>> {
        let n = self.n;
        let one = self.one_mod(p);
        let mut cols = Vec::new();
        for j in 0..n {
            let mut e = vec![0u64; n];
            e[j] = 1;
            cols.push(pow_alg(&e, p, &one, table, p));
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
    }

    /// Residue degrees of the primes above p (requires p-maximality).
    pub fn residue_degrees(&self, p: u64) -> Result<Vec<usize>> {
        if !self.p_maximal(p) {
            return Err(Error::Unsupported(format!("order may not be maximal at {p}")));
        }
        let n = self.n;
        if n == 1 {
            return Ok(vec![1]);
        }
        let table = self.table_mod(p);
        let phi = self.frobenius_mod(p, &table);
        // D(f) = dim ker(Φ^f - I) = Σ_i gcd(f, f_i)
        let mut d = vec![0usize; n + 1];
        let mut pw = phi.clone();
        for f in 1..=n {
            let mut m = pw.clone();
            for i in 0..n {
                m[i][i] = (m[i][i] + p - 1) % p;
            }
            d[f] = n - rank_mod(m, p);
            pw = matmul_mod(&pw, &phi, p);
        }
        // D(f) = Σ_{e | f} φ(e) M(e), M(e) = #{i : e | f_i}
        let mut mm = vec![0i64; n + 1];
        for f in 1..=n {
            let mut s = d[f] as i64;
            for e in 1..f {
                if f % e == 0 {
                    s -= totient(e) as i64 * mm[e];
                }
            }
            mm[f] = s / totient(f) as i64;
        }
        let mut c = vec![0i64; n + 1];
        for g in (1..=n).rev() {
            let mut v = mm[g];
            let mut k = 2 * g;
            while k <= n {
                v -= c[k];
                k += g;
            }
            c[g] = v;
        }
        let mut out = Vec::new();
        for (g, &cnt) in c.iter().enumerate().skip(1) {
            for _ in 0..cnt.max(0) {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// Local degrees e·f of the primes above 2.
    pub fn dyadic_local_degrees(&self) -> Result<Vec<usize>> {
        let n = self.n;
        let p = 2u64;
        let table = self.table_mod(p);
        let phi = self.frobenius_mod(p, &table);
        // idempotents: kernel of Φ - I
        let mut m = phi.clone();
        for i in 0..n {
            m[i][i] ^= 1;
        }
        let kernel = kernel_mod2(&m);
        let g = kernel.len();
        if g > 16 {
            return Err(Error::Unsupported("too many dyadic primes".into()));
        }
        let mut idem = Vec::new();
        for mask in 1u32..(1 << g) {
            let mut e = vec![0u64; n];
            for (b, v) in kernel.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    for i in 0..n {
                        e[i] ^= v[i];
                    }
                }
            }
            idem.push(e);
        }
        let mut degrees = Vec::new();
        for e in &idem {
            let primitive = idem.iter().all(|f| f == e || mul_alg(e, f, &table, p) != *f);
            if primitive {
                // rank of multiplication by e
                let rows: Vec<Vec<u64>> = (0..n)
                    .map(|j| {
                        let mut b = vec![0u64; n];
                        b[j] = 1;
                        mul_alg(e, &b, &table, p)
                    })
                    .collect();
                degrees.push(rank_mod(rows, p));
            }
        }
        degrees.sort();
        Ok(degrees)
    }
}

fn totient(n: usize) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

fn mul_alg(x: &[u64], y: &[u64], table: &[Vec<Vec<u64>>], p: u64) -> Vec<u64> {
    let n = x.len();
    let mut out = vec![0u64; n];
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        for j in 0..n {
            if y[j] == 0 {
                continue;
            }
            let c = (x[i] as u128 * y[j] as u128 % p as u128) as u64;
            for k in 0..n {
                let t = table[i][j][k];
                if t != 0 {
                    out[k] = ((out[k] as u128 + c as u128 * t as u128) % p as u128) as u64;
                }
            }
        }
    }
    out
}

fn pow_alg(x: &[u64], mut e: u64, one: &[u64], table: &[Vec<Vec<u64>>], p: u64) -> Vec<u64> {
    let mut base = x.to_vec();
    let mut acc = one.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_alg(&acc, &base, table, p);
        }
        base = mul_alg(&base, &base, table, p);
        e >>= 1;
    }
    acc
}

fn kernel_mod2(m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<u64>> = m.to_vec();
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] == 1) else { continue };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && a[i][c] == 1 {
                let src = a[r].clone();
                for j in 0..cols {
                    a[i][j] ^= src[j];
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (i, &pc) in piv.iter().enumerate() {
                v[pc] = a[i][f];
            }
            v
        })
        .collect()
}

/// Integer vectors of max-norm exactly h, first nonzero coordinate positive.
fn box_shell(n: usize, h: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-h; n];
    loop {
        let maxn = v.iter().map(|x| x.abs()).max().unwrap();
        let first = v.iter().find(|x| **x != 0).copied().unwrap_or(0);
        if maxn == h && first > 0 {
            out.push(v.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if v[i] < h {
                v[i] += 1;
                break;
            }
            v[i] = -h;
            i += 1;
        }
    }
}

#[allow(dead_code)]
fn unused(_: &Complex, p: &QPoly, z: &Complex) -> Complex {
    let _ = pow_mod(2, 2, 3);
    eval_poly_ball(p, z)
}

//! Exact arithmetic in ∧̃²F* for imaginary quadratic F of class number one.
//!
//! F* = μ_F × ⊕ ℤ·π over canonical prime elements π, and then
//! ∧̃²F* ≅ ℤ/g (ζ∧ζ) ⊕ ⊕_π ℤ/w (ζ∧π) ⊕ ⊕_{π<π'} ℤ (π∧π'),
//! with w = |μ_F|, g = gcd(w, 1 + w/2), using π∧π = (−1)∧π.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::rat::{qi, Q};
use crate::arith::strs;
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::forms::fincke_pohst;

/// Largest trial divisor used when factoring norms.
const TRIAL_LIMIT: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Factorization {
    /// Exponent of the generator of μ_F, modulo its order.
    pub unit: i64,
    /// Exponents of canonical primes, by factor-base index.
    pub primes: BTreeMap<usize, i64>,
}

/// Element of ∧̃²F* in the coordinates above.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WedgeCoords {
    pub zeta_zeta: i64,
    pub zeta_prime: BTreeMap<usize, i64>,
    pub prime_prime: BTreeMap<(usize, usize), i64>,
}

impl WedgeCoords {
    pub fn is_zero(&self) -> bool {
        self.zeta_zeta == 0 && self.zeta_prime.is_empty() && self.prime_prime.is_empty()
    }
}

/// Which subgroup ν ∧̃ F* is quotiented out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nu {
    Trivial,
    PlusMinusOne,
    RootsOfUnity,
}

pub struct Factorizer<'a> {
    pub f: &'a NumberField,
    w: i64,
    units: Vec<Elem>,
    /// Prime elements above each rational prime (empty: inert).
    above: BTreeMap<u64, Vec<Elem>>,
    /// Factor base in order of discovery.
    pub base: Vec<Elem>,
    index: BTreeMap<Vec<BigInt>, usize>,
}

fn int_factor(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while !n.is_one() {
        if p > TRIAL_LIMIT {
            return Err(Error::Budget(format!("norm {n} has a prime factor beyond the trial limit")));
        }
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            let q = n.to_u64().ok_or_else(|| Error::Budget(format!("norm cofactor {n} too large")))?;
            out.push((q, 1));
            break;
        }
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok(out)
}

fn legendre_has_root(f: &NumberField, p: u64) -> bool {
    // roots of x² + b x + c mod p
    let c = f.min_poly.iter().map(|x| x.mod_floor(&BigInt::from(p)).to_u64().unwrap()).collect::<Vec<_>>();
    if p < 50_000 {
        return (0..p).any(|x| (c[0] + c[1] * x % p + x * x % p) % p == 0);
    }
    let disc = (BigInt::from(c[1]) * c[1] - BigInt::from(4) * c[0]).mod_floor(&BigInt::from(p));
    disc.is_zero() || disc.modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p)).is_one()
}

impl<'a> Factorizer<'a> {
    pub fn new(f: &'a NumberField) -> Result<Self> {
        if !f.is_imaginary_quadratic() {
            return Err(Error::Unsupported("exact wedge arithmetic needs an imaginary quadratic field".into()));
        }
        let units = (0..f.mu_order as u64).map(|k| f.pow(&f.mu_gen, k)).collect();
        Ok(Factorizer { f, w: f.mu_order as i64, units, above: BTreeMap::new(), base: vec![], index: BTreeMap::new() })
    }

    pub fn mu_order(&self) -> i64 {
        self.w
    }

    fn canonical(&self, x: &Elem) -> (Vec<BigInt>, Elem) {
        self.units
            .iter()
            .map(|u| {
                let y = self.f.mul(u, x);
                (y.int_coords().expect("integral"), y)
            })
            .max_by(|a, b| a.0.cmp(&b.0))
            .expect("units")
    }

    fn primes_above(&mut self, p: u64) -> Result<Vec<Elem>> {
        if let Some(v) = self.above.get(&p) {
            return Ok(v.clone());
        }
        let f = self.f;
        let t2 = f.t2_gram().expect("CM field");
        let pq = qi(&BigInt::from(p));
        let cands = fincke_pohst(&t2, &(&pq * Q::from_integer(2.into())))?;
        let mut found: BTreeMap<Vec<BigInt>, Elem> = BTreeMap::new();
        for v in cands {
            let x = f.elem_from_ints(&v);
            if f.norm(&x) == pq {
                let (k, c) = self.canonical(&x);
                found.insert(k, c);
            }
        }
        let list: Vec<Elem> = found.into_values().collect();
        if list.is_empty() && legendre_has_root(f, p) {
            return Err(Error::Unsupported(format!("the primes above {p} are not principal; class number is not one")));
        }
        self.above.insert(p, list.clone());
        Ok(list)
    }

    fn prime_index(&mut self, pi: &Elem) -> usize {
        let key = pi.int_coords().expect("integral");
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.base.push(pi.clone());
        self.index.insert(key, self.base.len() - 1);
        self.base.len() - 1
    }

    fn unit_exponent(&self, u: &Elem) -> Result<i64> {
        self.units
            .iter()
            .position(|z| z == u)
            .map(|k| k as i64)
            .ok_or_else(|| Error::Inconsistent(format!("{} left over after factoring is not a root of unity", self.f.fmt_elem(u))))
    }

    fn factor_integral(&mut self, a: &Elem, out: &mut Factorization, sign: i64) -> Result<()> {
        let f = self.f;
        let mut a = a.clone();
        let norm = f.norm(&a).to_integer();
        for (p, _) in int_factor(&norm)? {
            let mut pis = self.primes_above(p)?;
            if pis.is_empty() {
                pis = vec![f.from_int(p as i64)];
            }
            for pi in pis {
                let idx = self.prime_index(&pi);
                loop {
                    let q = f.div(&a, &pi)?;
                    if !q.is_integral_coords() {
                        break;
                    }
                    a = q;
                    *out.primes.entry(idx).or_default() += sign;
                }
            }
        }
        out.unit = (out.unit + sign * self.unit_exponent(&a)?).rem_euclid(self.w);
        Ok(())
    }

    pub fn factor(&mut self, x: &Elem) -> Result<Factorization> {
        if x.is_zero() {
            return Err(Error::Invalid("cannot factor zero".into()));
        }
        let d = self.f.denominator(x);
        let a = self.f.scale(x, &qi(&d));
        let mut out = Factorization::default();
        self.factor_integral(&a, &mut out, 1)?;
        if !d.is_one() {
            self.factor_integral(&self.f.from_q(&qi(&d)), &mut out, -1)?;
        }
        out.primes.retain(|_, e| *e != 0);
        Ok(out)
    }

    /// Coordinates of y ∧̃ x.
    pub fn wedge(&mut self, y: &Elem, x: &Elem) -> Result<WedgeCoords> {
        let fy = self.factor(y)?;
        let fx = self.factor(x)?;
        let mut out = WedgeCoords::default();
        self.accumulate(&mut out, &fy, &fx, 1);
        Ok(out)
    }

    pub fn accumulate(&self, out: &mut WedgeCoords, fy: &Factorization, fx: &Factorization, coef: i64) {
        let w = self.w;
        let g = w.gcd(&(1 + w / 2));
        out.zeta_zeta = (out.zeta_zeta + coef * fy.unit * fx.unit).rem_euclid(g);
        let mut keys: Vec<usize> = fy.primes.keys().chain(fx.primes.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        for &i in &keys {
            let ey = fy.primes.get(&i).copied().unwrap_or(0);
            let ex = fx.primes.get(&i).copied().unwrap_or(0);
            let add = fy.unit * ex - ey * fx.unit + (w / 2) * ey * ex;
            let e = out.zeta_prime.entry(i).or_default();
            *e = (*e + coef * add).rem_euclid(w);
            if *e == 0 {
                out.zeta_prime.remove(&i);
            }
        }
        for (a, &i) in keys.iter().enumerate() {
            for &j in &keys[a + 1..] {
                let yi = fy.primes.get(&i).copied().unwrap_or(0);
                let yj = fy.primes.get(&j).copied().unwrap_or(0);
                let xi = fx.primes.get(&i).copied().unwrap_or(0);
                let xj = fx.primes.get(&j).copied().unwrap_or(0);
                let add = yi * xj - yj * xi;
                if add == 0 {
                    continue;
                }
                let e = out.prime_prime.entry((i, j)).or_default();
                *e += coef * add;
                if *e == 0 {
                    out.prime_prime.remove(&(i, j));
                }
            }
        }
    }

    pub fn add(&self, a: &mut WedgeCoords, b: &WedgeCoords, coef: i64) {
        let w = self.w;
        let g = w.gcd(&(1 + w / 2));
        a.zeta_zeta = (a.zeta_zeta + coef * b.zeta_zeta).rem_euclid(g);
        for (&i, &v) in &b.zeta_prime {
            let e = a.zeta_prime.entry(i).or_default();
            *e = (*e + coef * v).rem_euclid(w);
            if *e == 0 {
                a.zeta_prime.remove(&i);
            }
        }
        for (&k, &v) in &b.prime_prime {
            let e = a.prime_prime.entry(k).or_default();
            *e += coef * v;
            if *e == 0 {
                a.prime_prime.remove(&k);
            }
        }
    }

    /// Image in ∧̃²F* / ν ∧̃ F*.
    pub fn reduce(&self, c: &WedgeCoords, nu: Nu) -> WedgeCoords {
        let w = self.w;
        let g = w.gcd(&(1 + w / 2));
        let (mz, mp) = match nu {
            Nu::Trivial => (g, w),
            Nu::PlusMinusOne => (g.gcd(&(w / 2)), w / 2),
            Nu::RootsOfUnity => (1, 1),
        };
        let zeta_zeta = c.zeta_zeta.rem_euclid(mz);
        let zeta_prime = c.zeta_prime.iter().map(|(&i, &v)| (i, v.rem_euclid(mp))).filter(|&(_, v)| v != 0).collect();
        WedgeCoords { zeta_zeta, zeta_prime, prime_prime: c.prime_prime.clone() }
    }

    pub fn describe(&self, c: &WedgeCoords) -> String {
        let f = self.f;
        let mut parts = Vec::new();
        if c.zeta_zeta != 0 {
            parts.push(format!("{}·(ζ∧ζ)", c.zeta_zeta));
        }
        for (&i, &v) in &c.zeta_prime {
            parts.push(format!("{}·(ζ∧{})", v, f.fmt_elem(&self.base[i])));
        }
        for (&(i, j), &v) in &c.prime_prime {
            parts.push(format!("{}·({}∧{})", v, f.fmt_elem(&self.base[i]), f.fmt_elem(&self.base[j])));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Serializable residue: coordinates plus the factor base they refer to.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Residue {
    pub text: String,
    #[serde(with = "strs::ivecs")]
    pub base: Vec<Vec<BigInt>>,
    pub zeta_zeta: i64,
    pub zeta_prime: Vec<(usize, i64)>,
    pub prime_prime: Vec<(usize, usize, i64)>,
}

impl Residue {
    pub fn new(fz: &Factorizer, c: &WedgeCoords) -> Residue {
        Residue {
            text: fz.describe(c),
            base: fz.base.iter().map(|p| p.int_coords().expect("integral")).collect(),
            zeta_zeta: c.zeta_zeta,
            zeta_prime: c.zeta_prime.iter().map(|(&i, &v)| (i, v)).collect(),
            prime_prime: c.prime_prime.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
        }
    }
}

//! Midpoint-radius ball arithmetic on fixed-point big integers.
//!
//! A `Real` at precision p stands for the closed interval
//! [(mid - rad) / 2^p, (mid + rad) / 2^p]. Every operation returns a ball
//! that contains all possible exact results.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rat::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn shr_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (k - 1);
    (x + half).div_floor(&(BigInt::one() << k))
}

fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    let d = BigInt::one() << k;
    -((-x).div_floor(&d))
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    let na: BigInt = -a;
    -(na.div_floor(b))
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // b > 0
    let num: BigInt = a * 2 + b;
    num.div_floor(&(b * 2))
}

impl Real {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn zero(prec: u32) -> Self {
        Real { mid: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Real { mid: n << prec, rad: BigInt::zero(), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    pub fn from_q(x: &Q, prec: u32) -> Self {
        let num = x.numer() << prec;
        let (qt, r) = num.div_rem(x.denom());
        if r.is_zero() {
            Real { mid: qt, rad: BigInt::zero(), prec }
        } else {
            Real { mid: div_round(&num, x.denom()), rad: BigInt::one(), prec }
        }
    }

    /// Ball with the given rational midpoint and rational radius bound.
    pub fn from_q_rad(x: &Q, r: &Q, prec: u32) -> Self {
        Self::from_q(x, prec).add_error(r)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        let q = Q::from_float(x).expect("finite float");
        Self::from_q(&q, prec)
    }

    /// Ball [-b, b].
    pub fn symmetric(b: &Q, prec: u32) -> Self {
        Real::zero(prec).add_error(b)
    }

    pub fn mid_q(&self) -> Q {
        Q::new(self.mid.clone(), BigInt::one() << self.prec)
    }

    pub fn rad_q(&self) -> Q {
        Q::new(self.rad.clone(), BigInt::one() << self.prec)
    }

    pub fn lower_q(&self) -> Q {
        Q::new(&self.mid - &self.rad, BigInt::one() << self.prec)
    }

    pub fn upper_q(&self) -> Q {
        Q::new(&self.mid + &self.rad, BigInt::one() << self.prec)
    }

    /// Upper bound on |x| over the ball.
    pub fn mag_q(&self) -> Q {
        Q::new(self.mid.abs() + &self.rad, BigInt::one() << self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.mid.bits() as i64 - 60;
        if shift > 0 {
            (&self.mid >> shift as u32).to_f64().unwrap() * 2f64.powi(shift as i32 - self.prec as i32)
        } else {
            self.mid.to_f64().unwrap() * 2f64.powi(-(self.prec as i32))
        }
    }

    pub fn rad_f64(&self) -> f64 {
        let shift = self.rad.bits() as i64 - 60;
        let v = if shift > 0 {
            (&self.rad >> shift as u32).to_f64().unwrap() * 2f64.powi(shift as i32 - self.prec as i32)
        } else {
            self.rad.to_f64().unwrap() * 2f64.powi(-(self.prec as i32))
        };
        v * (1.0 + 1e-15)
    }

    pub fn is_positive(&self) -> bool {
        self.mid > self.rad
    }

    pub fn is_negative(&self) -> bool {
        -&self.mid > self.rad
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains_q(&self, x: &Q) -> bool {
        &self.lower_q() <= x && x <= &self.upper_q()
    }

    /// Whether the two balls intersect.
    pub fn overlaps(&self, o: &Real) -> bool {
        self.lower_q() <= o.upper_q() && o.lower_q() <= self.upper_q()
    }

    pub fn add_error(&self, err: &Q) -> Real {
        let e = div_ceil(&(err.abs().numer() << self.prec), err.denom());
        Real { mid: self.mid.clone(), rad: &self.rad + e, prec: self.prec }
    }

    pub fn with_prec(&self, p: u32) -> Real {
        if p >= self.prec {
            let d = p - self.prec;
            Real { mid: &self.mid << d, rad: &self.rad << d, prec: p }
        } else {
            let d = self.prec - p;
            Real { mid: shr_round(&self.mid, d), rad: shr_ceil(&self.rad, d) + 1, prec: p }
        }
    }

    /// The point ball at the midpoint.
    pub fn midpoint(&self) -> Real {
        Real { mid: self.mid.clone(), rad: BigInt::zero(), prec: self.prec }
    }

    fn check(&self, o: &Real) {
        assert_eq!(self.prec, o.prec, "precision mismatch");
    }

    pub fn add(&self, o: &Real) -> Real {
        self.check(o);
        Real { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.check(o);
        Real { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn neg(&self) -> Real {
        Real { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn abs(&self) -> Real {
        if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.check(o);
        let p = self.prec;
        let prod = &self.mid * &o.mid;
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        let mid = shr_round(&prod, p);
        let exact = self.rad.is_zero() && o.rad.is_zero() && (&mid << p) == prod;
        let rad = if exact { BigInt::zero() } else { shr_ceil(&err, p) + 1 };
        Real { mid, rad, prec: p }
    }

    pub fn sqr(&self) -> Real {
        self.mul(self)
    }

    pub fn mul_int(&self, k: &BigInt) -> Real {
        Real { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    pub fn mul_i64(&self, k: i64) -> Real {
        self.mul_int(&BigInt::from(k))
    }

    pub fn mul_q(&self, x: &Q) -> Real {
        self.mul(&Real::from_q(x, self.prec))
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: &BigInt) -> Real {
        assert!(!k.is_zero());
        let ka = k.abs();
        let sgn = if k.is_negative() { -1 } else { 1 };
        let mid = div_round(&self.mid, &ka) * sgn;
        let rad = div_ceil(&self.rad, &ka) + 1;
        Real { mid, rad, prec: self.prec }
    }

    pub fn shl(&self, k: u32) -> Real {
        Real { mid: &self.mid << k, rad: &self.rad << k, prec: self.prec }
    }

    /// Division; `None` if the divisor ball contains zero.
    pub fn div(&self, o: &Real) -> Option<Real> {
        self.check(o);
        if o.contains_zero() {
            return None;
        }
        let p = self.prec;
        let b = o.mid.abs();
        let mid = {
            let num = &self.mid << p;
            let m = div_round(&(num * o.mid.signum()), &b);
            m
        };
        let rad = if self.rad.is_zero() && o.rad.is_zero() {
            let num = &self.mid << p;
            if (&num % &o.mid).is_zero() {
                BigInt::zero()
            } else {
                BigInt::one()
            }
        } else {
            let num = (&self.rad * &b + self.mid.abs() * &o.rad) << p;
            let den = &b * (&b - &o.rad);
            div_ceil(&num, &den) + 1
        };
        Some(Real { mid, rad, prec: p })
    }

    pub fn recip(&self) -> Option<Real> {
        Real::from_i64(1, self.prec).div(self)
    }

    pub fn sqrt(&self) -> Real {
        let p = self.prec;
        let lo = &self.mid - &self.rad;
        let hi = &self.mid + &self.rad;
        assert!(!hi.is_negative(), "sqrt of negative ball");
        let lo_s = if lo.is_positive() { (&lo << p).sqrt() } else { BigInt::zero() };
        if lo_s < BigInt::from(4) {
            // ball touches zero: cover [0, sqrt(hi)]
            let top = (&hi << p).sqrt() + 1;
            return Real { mid: &top / 2 + 1, rad: &top / 2 + 2, prec: p };
        }
        let s = (&self.mid << p).sqrt();
        let rad = div_ceil(&(&self.rad << p), &lo_s) + 1;
        Real { mid: s, rad, prec: p }
    }

    pub fn pow(&self, mut e: u32) -> Real {
        let mut base = self.clone();
        let mut acc = Real::from_i64(1, self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    /// Natural logarithm; the ball must be strictly positive.
    pub fn ln(&self) -> Real {
        assert!(self.is_positive(), "ln of non-positive ball");
        let p = self.prec;
        let w = p + 32;
        // locate the midpoint m/2^p = y * 2^k with y in [3/4, 3/2)
        let bits = self.mid.bits() as i64;
        let mut k = bits - 1 - p as i64;
        let mut y = pow2_ratio(&self.mid, p as i64 + k);
        if y >= Q::new(3.into(), 2.into()) {
            k += 1;
            y = pow2_ratio(&self.mid, p as i64 + k);
        }
        let ly = ln_near_one(&y, w);
        let l2 = ln2(w);
        let v = ly.add(&l2.mul_i64(k)).with_prec(p);
        // Lipschitz bound 1/(x - r) on the ball
        let lo = &self.mid - &self.rad;
        let extra = div_ceil(&(&self.rad << p), &lo) + 1;
        Real { mid: v.mid, rad: v.rad + if self.rad.is_zero() { BigInt::zero() } else { extra }, prec: p }
    }

    pub fn atan(&self) -> Real {
        let p = self.prec;
        let w = p + 32;
        let v = self.mid_q();
        let val = atan_q(&v, w).with_prec(p);
        Real { mid: val.mid, rad: val.rad + &self.rad, prec: p }
    }

    pub fn pi(prec: u32) -> Real {
        cached(&PI_CACHE, prec, || {
            let w = prec + 32;
            let a = atan_inv(5, w).mul_i64(16);
            let b = atan_inv(239, w).mul_i64(4);
            a.sub(&b).with_prec(prec)
        })
    }

    /// Decimal digits of the midpoint and an upward-rounded radius.
    pub fn to_decimal(&self) -> (String, String) {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let scale = num_traits::pow(BigInt::from(10), digits);
        let m = div_round(&(&self.mid * &scale), &(BigInt::one() << self.prec));
        let neg = m.is_negative();
        let s = m.abs().to_string();
        let s = if s.len() <= digits { format!("{}{}", "0".repeat(digits + 1 - s.len()), s) } else { s };
        let (ip, fp) = s.split_at(s.len() - digits);
        let mid = format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp);
        // radius plus half an ulp of the printed midpoint
        let r = self.rad_f64() + 0.5 * 10f64.powi(-(digits as i32));
        (mid, format!("{:.3e}", r * (1.0 + 1e-9)))
    }
}

fn pow2_ratio(m: &BigInt, e: i64) -> Q {
    if e >= 0 {
        Q::new(m.clone(), BigInt::one() << e as u32)
    } else {
        Q::from_integer(m << (-e) as u32)
    }
}

/// ln(y) for rational y in [3/4, 3/2], at precision w.
fn ln_near_one(y: &Q, w: u32) -> Real {
    let t = (y - Q::one()) / (y + Q::one());
    atanh_series(&t, w, 5).mul_i64(2)
}

/// atanh(t) for |t| <= 1/b.
fn atanh_series(t: &Q, w: u32, b: u64) -> Real {
    let x = Real::from_q(t, w);
    let x2 = x.sqr();
    let mut term = x.clone();
    let mut sum = Real::zero(w);
    let mut j: u64 = 0;
    let terms = (w as f64 / (2.0 * (b as f64).log2())).ceil() as u64 + 2;
    while j < terms {
        sum = sum.add(&term.div_int(&BigInt::from(2 * j + 1)));
        term = term.mul(&x2);
        j += 1;
    }
    // tail: sum_{i>=terms} |t|^{2i+1} <= (1/b)^{2 terms + 1} / (1 - 1/b^2)
    let tail = Q::new(2.into(), num_traits::pow(BigInt::from(b), (2 * terms + 1) as usize));
    sum.add_error(&tail)
}

static PI_CACHE: OnceLock<Mutex<HashMap<u32, Real>>> = OnceLock::new();
static LN2_CACHE: OnceLock<Mutex<HashMap<u32, Real>>> = OnceLock::new();

fn cached(cell: &OnceLock<Mutex<HashMap<u32, Real>>>, prec: u32, f: impl FnOnce() -> Real) -> Real {
    let m = cell.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = m.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = f();
    m.lock().unwrap().insert(prec, v.clone());
    v
}

pub fn ln2(prec: u32) -> Real {
    cached(&LN2_CACHE, prec, || {
        let w = prec + 16;
        atanh_series(&Q::new(1.into(), 3.into()), w, 3).mul_i64(2).with_prec(prec)
    })
}

/// atan(1/k), k >= 2.
fn atan_inv(k: u64, w: u32) -> Real {
    let x = Real::from_q(&Q::new(1.into(), k.into()), w);
    let x2 = x.sqr();
    let mut term = x;
    let mut sum = Real::zero(w);
    let terms = (w as f64 / (2.0 * (k as f64).log2())).ceil() as u64 + 2;
    for j in 0..terms {
        let t = term.div_int(&BigInt::from(2 * j + 1));
        sum = if j % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
        term = term.mul(&x2);
    }
    let tail = Q::new(1.into(), num_traits::pow(BigInt::from(k), (2 * terms + 1) as usize));
    sum.add_error(&tail)
}

/// atan of an exact rational at precision w.
fn atan_q(v: &Q, w: u32) -> Real {
    if v.is_zero() {
        return Real::zero(w);
    }
    if v.abs() > Q::one() {
        let half_pi = Real::pi(w).div_int(&BigInt::from(2));
        let r = atan_q(&(Q::one() / v), w);
        return if v.is_positive() { half_pi.sub(&r) } else { half_pi.neg().sub(&r) };
    }
    // halve the angle three times: atan x = 2 atan(x / (1 + sqrt(1 + x^2)))
    let one = Real::from_i64(1, w);
    let mut x = Real::from_q(v, w);
    for _ in 0..3 {
        let d = one.add(&one.add(&x.sqr()).sqrt());
        x = x.div(&d).unwrap();
    }
    // now |x| <= tan(pi/32) < 1/8
    let x2 = x.sqr();
    let mut term = x;
    let mut sum = Real::zero(w);
    let terms = (w as f64 / 6.0).ceil() as u64 + 2;
    for j in 0..terms {
        let t = term.div_int(&BigInt::from(2 * j + 1));
        sum = if j % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
        term = term.mul(&x2);
    }
    let tail = Q::new(1.into(), num_traits::pow(BigInt::from(8), (2 * terms + 1) as usize));
    sum.add_error(&tail).shl(3)
}

/// Complex ball as a pair of real balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_q(re: &Q, im: &Q, prec: u32) -> Self {
        Complex { re: Real::from_q(re, prec), im: Real::from_q(im, prec) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Complex { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn real(x: Real) -> Self {
        let p = x.prec();
        Complex { re: x, im: Real::zero(p) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn zero(prec: u32) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Complex { re: Real::from_i64(1, prec), im: Real::zero(prec) }
    }

    pub fn with_prec(&self, p: u32) -> Self {
        Complex { re: self.re.with_prec(p), im: self.im.with_prec(p) }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Complex {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, r: &Real) -> Complex {
        Complex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn div(&self, o: &Complex) -> Option<Complex> {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Some(Complex { re: n.re.div(&d)?, im: n.im.div(&d)? })
    }

    pub fn recip(&self) -> Option<Complex> {
        Complex::one(self.prec()).div(self)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Principal argument in (-pi, pi]. A ball meeting the negative real
    /// axis or zero gets the enclosing ball [-pi, pi].
    pub fn arg(&self) -> Real {
        let p = self.prec();
        let w = p + 32;
        let wide = || Real::symmetric(&Q::new(22.into(), 7.into()), p);
        if self.contains_zero() {
            return wide();
        }
        if !self.re.is_positive() && self.im.contains_zero() {
            return wide();
        }
        let x = self.re.mid_q();
        let y = self.im.mid_q();
        let pi = Real::pi(w);
        let val = if x.is_positive() {
            atan_q(&(&y / &x), w)
        } else if x.is_zero() {
            let h = pi.div_int(&BigInt::from(2));
            if y.is_positive() {
                h
            } else {
                h.neg()
            }
        } else {
            let a = atan_q(&(&y / &x), w);
            if y.is_negative() {
                a.sub(&pi)
            } else {
                a.add(&pi)
            }
        };
        let val = val.with_prec(p);
        let r = self.re.rad_q() + self.im.rad_q();
        if r.is_zero() {
            return val;
        }
        // |grad atan2| = 1/|z|; lower bound for |z| on the ball
        let mlow = {
            let m = Complex::from_q(&x, &y, p).abs();
            m.lower_q() - &r
        };
        if !mlow.is_positive() {
            return wide();
        }
        val.add_error(&(r / mlow))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Complex {
        Complex { re: self.abs().ln(), im: self.arg() }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn max_rad_f64(&self) -> f64 {
        self.re.rad_f64().max(self.im.rad_f64())
    }
}

impl std::fmt::Display for Real {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (m, r) = self.to_decimal();
        write!(f, "{m} ± {r}")
    }
}

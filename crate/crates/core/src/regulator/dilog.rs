//! Bloch–Wigner dilogarithm on complex balls.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{Complex, Real, Q};

/// Global bound sup |D| = D(e^{iπ/3}) < 1.0149417.
fn d_max() -> Q {
    Q::new(10_149_417.into(), 10_000_000.into())
}

static COEFFS: OnceLock<Mutex<Vec<Q>>> = OnceLock::new();

/// B_k / (k+1)! for k < count.
fn series_coeffs(count: usize) -> Vec<Q> {
    let m = COEFFS.get_or_init(|| Mutex::new(Vec::new()));
    let mut c = m.lock().unwrap();
    if c.len() < count {
        // Bernoulli numbers from Σ_{j≤k} C(k+1, j) B_j = 0
        let mut b: Vec<Q> = vec![Q::one()];
        for k in 1..count {
            let mut s = Q::zero();
            let mut binom = BigInt::one();
            for (j, bj) in b.iter().enumerate() {
                s += Q::from_integer(binom.clone()) * bj;
                binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
            }
            b.push(-s / Q::from_integer(BigInt::from(k + 1)));
        }
        let mut fact = BigInt::one();
        *c = b
            .iter()
            .enumerate()
            .map(|(k, bk)| {
                fact *= BigInt::from(k + 1);
                bk / Q::from_integer(fact.clone())
            })
            .collect();
    }
    c[..count].to_vec()
}

/// D(z) = Im Li₂(z) + arg(1−z)·log|z|, certified to about 2^(−prec) on
/// exact inputs. The argument is moved into {|z| ≤ 1, Re z ≤ 1/2} with
/// D(1/z) = D(1−z) = −D(z), where Li₂ is summed in u = −log(1−z) with
/// Bernoulli coefficients (|u| stays below 1.3 there).
pub fn bloch_wigner(z: &Complex, prec: u32) -> Real {
    let w = prec + 32;
    let wide = Real::symmetric(&d_max(), prec);
    let mut z = z.with_prec(w);
    let one = Complex::one(w);
    if z.contains_zero() || z.sub(&one).contains_zero() {
        return wide;
    }
    let mut sign = 1;
    let (x, y) = (z.re.mid_q(), z.im.mid_q());
    if &x * &x + &y * &y > Q::one() {
        z = match z.recip() {
            Some(r) => r,
            None => return wide,
        };
        sign = -sign;
    }
    if z.re.mid_q() > Q::new(1.into(), 2.into()) {
        z = one.sub(&z);
        sign = -sign;
    }
    let omz = one.sub(&z);
    if !omz.re.is_positive() || z.contains_zero() {
        return wide;
    }
    let l = omz.ln();
    let u = l.neg();
    let umag = u.re.mag_q() + u.im.mag_q();
    // |B_k/(k+1)!·u^{k+1}| ≤ 4|u|·r^k with r = |u|/2π
    let r = &umag / Q::new(628.into(), 100.into());
    if r >= Q::new(1.into(), 2.into()) {
        return wide;
    }
    let rf = crate::arith::rat::to_f64(&r).max(1e-300);
    let terms = ((w as f64 + 4.0) / -rf.log2()).ceil() as usize + 2;
    let coeffs = series_coeffs(terms);
    let mut pw = u.clone();
    let mut li2 = Complex::zero(w);
    for (k, ck) in coeffs.iter().enumerate() {
        if !ck.is_zero() {
            let c = Real::from_q(ck, w);
            li2 = li2.add(&pw.scale(&c));
        }
        if k + 1 < coeffs.len() {
            pw = pw.mul(&u);
        }
    }
    let uf = crate::arith::rat::to_f64(&umag);
    let tail = Q::from_float(4.0 * uf * rf.powi(terms as i32) / (1.0 - rf) * 1.01 + 1e-300).expect("finite");
    let im = li2.im.add_error(&tail);
    let d = im.add(&l.im.mul(&z.abs().ln()));
    let d = if sign < 0 { d.neg() } else { d };
    d.with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(re: f64, im: f64) -> Real {
        bloch_wigner(&Complex::from_f64(re, im, 80), 60)
    }

    #[test]
    fn catalan_at_i() {
        let v = d(0.0, 1.0);
        assert!((v.to_f64() - 0.915_965_594_177_219).abs() < 1e-13);
        assert!(v.rad_f64() < 1e-15);
    }

    #[test]
    fn real_axis_vanishes() {
        for x in [-3.5, -0.2, 0.3, 0.7, 2.5] {
            assert!(d(x, 0.0).to_f64().abs() < 1e-15);
        }
    }

    #[test]
    fn maximum_at_sixth_root() {
        let v = d(0.5, 3f64.sqrt() / 2.0);
        assert!((v.to_f64() - 1.014_941_606_409_653_6).abs() < 1e-12);
    }

    #[test]
    fn symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let z = Complex::from_f64(a, b, 80);
            let v = bloch_wigner(&z, 60).to_f64();
            let one = Complex::one(80);
            let w1 = bloch_wigner(&one.sub(&z), 60).to_f64();
            let w2 = bloch_wigner(&z.recip().unwrap(), 60).to_f64();
            let w3 = bloch_wigner(&z.conj(), 60).to_f64();
            for w in [w1, w2, w3] {
                assert!((v + w).abs() < 1e-12, "{a} {b}");
            }
        }
    }
}

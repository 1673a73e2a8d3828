use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

/// Parses "p", "-p" or "p/q".
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(a, b))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_q(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Upper bound for sqrt(x), x >= 0, as a rational with denominator x.denom().
pub fn sqrt_upper(x: &Q) -> Q {
    let prod = x.numer() * x.denom();
    let s = prod.sqrt();
    let s = if &s * &s == prod { s } else { s + 1 };
    Q::new(s, x.denom().clone())
}

/// Exact rational sqrt if x is a square.
pub fn sqrt_exact(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let a = x.numer().sqrt();
    let b = x.denom().sqrt();
    if &a * &a == *x.numer() && &b * &b == *x.denom() {
        Some(Q::new(a, b))
    } else {
        None
    }
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn primitive(v: &[Q]) -> Vec<BigInt> {
    let l = lcm_denoms(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| (x * qi(&l)).to_integer()).collect();
    primitive_int(&ints)
}

pub fn primitive_int(v: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_all(v.iter());
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "-7", "3/4", "-12/5"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/8").unwrap(), qf(3, 4));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn floors() {
        assert_eq!(floor_q(&qf(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil_q(&qf(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil_q(&qf(7, 2)), BigInt::from(4));
        assert_eq!(floor_q(&q(3)), BigInt::from(3));
    }

    #[test]
    fn sqrt_bound_is_upper() {
        for n in 0..200i64 {
            let x = qf(n, 7);
            let s = sqrt_upper(&x);
            assert!(&s * &s >= x);
        }
        assert_eq!(sqrt_exact(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(sqrt_exact(&qf(2, 1)), None);
    }
}

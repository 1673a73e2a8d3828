//! Serde adapters writing big numbers as decimal strings.

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{fmt_q, parse_q, Q};

fn parse_int<E: serde::de::Error>(s: &str) -> Result<BigInt, E> {
    s.parse().map_err(|_| E::custom(format!("not an integer: {s:?}")))
}

pub mod q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        fmt_q(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(D::Error::custom)
    }
}

pub mod qvec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_q(s).map_err(D::Error::custom)).collect()
    }
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        x.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        parse_int(&String::deserialize(d)?)
    }
}

pub mod ivec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(|c| c.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| parse_int(s)).collect()
    }
}

pub mod ivecs {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        x.iter().map(|v| v.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?.iter().map(|v| v.iter().map(|s| parse_int(s)).collect()).collect()
    }
}

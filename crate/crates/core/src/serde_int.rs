// SPDX-License-Identifier: Apache-2.0

//! Serde adapters for arbitrary-precision integers.
//!
//! Values that fit in an `i64` are written as plain numbers; larger values are
//! written as decimal strings. Both shapes are accepted when reading.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserializer, Serialize, Serializer};

pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match crate::arith::to_i64(x) {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    d.deserialize_any(IntVisitor)
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        BigInt::from_str(v.trim()).map_err(E::custom)
    }
}

/// Adapter for `Vec<BigInt>`.
pub mod vec {
    use super::*;
    use serde::de::SeqAccess;

    #[derive(Serialize)]
    struct Wrap<'a>(#[serde(with = "super")] &'a BigInt);

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(Wrap))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        struct SeqVisitor;
        impl<'de> Visitor<'de> for SeqVisitor {
            type Value = Vec<BigInt>;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a sequence of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<BigInt>, A::Error> {
                let mut out = Vec::new();
                while let Some(w) = seq.next_element::<Elem>()? {
                    out.push(w.0);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(SeqVisitor)
    }

    struct Elem(BigInt);

    impl<'de> serde::Deserialize<'de> for Elem {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            super::deserialize(d).map(Elem)
        }
    }
}

/// Adapter for `Vec<Vec<BigInt>>`.
pub mod matrix {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize)]
    struct Row<'a>(#[serde(with = "super::vec")] &'a Vec<BigInt>);

    #[derive(Deserialize)]
    struct OwnedRow(#[serde(with = "super::vec")] Vec<BigInt>);

    pub fn serialize<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(rows.iter().map(Row))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Ok(Vec::<OwnedRow>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

/// Adapter for `Option<BigInt>`; `None` is `null`.
pub mod opt {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super")] BigInt);

    pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        x.clone().map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Adapter for `Option<Vec<BigInt>>`; `None` is `null`.
pub mod opt_vec {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::vec")] Vec<BigInt>);

    pub fn serialize<S: Serializer>(x: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        x.clone().map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Sample {
        #[serde(with = "super")]
        x: BigInt,
        #[serde(with = "super::vec")]
        v: Vec<BigInt>,
        #[serde(with = "super::matrix")]
        m: Vec<Vec<BigInt>>,
        #[serde(with = "super::opt")]
        o: Option<BigInt>,
        #[serde(with = "super::opt_vec")]
        ov: Option<Vec<BigInt>>,
    }

    #[test]
    fn round_trips() {
        let huge = BigInt::from(7).pow(40);
        let s = Sample {
            x: huge.clone(),
            v: vec![BigInt::from(-3), huge.clone()],
            m: vec![vec![BigInt::from(1)], vec![]],
            o: None,
            ov: Some(vec![BigInt::from(5)]),
        };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            format!(r#"{{"x":"{huge}","v":[-3,"{huge}"],"m":[[1],[]],"o":null,"ov":[5]}}"#)
        );
        assert_eq!(serde_json::from_str::<Sample>(&json).unwrap(), s);
        let t: Sample = serde_json::from_str(r#"{"x":" 12 ","v":[],"m":[],"o":4,"ov":null}"#).unwrap();
        assert_eq!((t.x, t.o, t.ov), (BigInt::from(12), Some(BigInt::from(4)), None));
    }
}

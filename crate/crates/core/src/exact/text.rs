//! Serde adapters that carry rationals as `"p"` / `"p/q"` strings.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_rat, Matrix, Rat, Vector};

pub mod rat {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        parse_rat(&text).map_err(D::Error::custom)
    }
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = v.iter().map(|q| q.to_string()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        let text = Vec::<String>::deserialize(d)?;
        text.iter().map(|t| parse_rat(t).map_err(D::Error::custom)).collect()
    }
}

pub mod opt_vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vector>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::vector::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vector>, D::Error> {
        let text = Option::<Vec<String>>::deserialize(d)?;
        text.map(|t| t.iter().map(|x| parse_rat(x).map_err(D::Error::custom)).collect())
            .transpose()
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = m
            .to_rows()
            .iter()
            .map(|row| row.iter().map(|q| q.to_string()).collect())
            .collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        let rows = text
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| parse_rat(t).map_err(D::Error::custom))
                    .collect::<Result<Vec<Rat>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

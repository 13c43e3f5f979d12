//! Field adapters for exact values that travel through JSON as strings.

pub mod rational_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::lattice::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

pub mod integer_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::lattice::Integer;

    pub fn serialize<S: Serializer>(n: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<Integer>().map_err(de::Error::custom)
    }
}

//! Big integers as plain JSON numbers.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::ser::{SerializeSeq, SerializeTuple};
use serde::{Serialize, Serializer};

struct Big<'a>(&'a BigInt);

impl Serialize for Big<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_json::Number::from_str(&self.0.to_string())
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

pub(crate) fn big<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    Big(x).serialize(s)
}

pub(crate) fn big_opt<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    x.as_ref().map(Big).serialize(s)
}

fn pair<S: Serializer>(x: &(BigInt, BigInt), s: S) -> Result<S::Ok, S::Error> {
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&Big(&x.0))?;
    t.serialize_element(&Big(&x.1))?;
    t.end()
}

struct Pair<'a>(&'a (BigInt, BigInt));

impl Serialize for Pair<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        pair(self.0, s)
    }
}

pub(crate) fn big_pair<S: Serializer>(x: &(BigInt, BigInt), s: S) -> Result<S::Ok, S::Error> {
    pair(x, s)
}

pub(crate) fn big_pair_opt<S: Serializer>(
    x: &Option<(BigInt, BigInt)>,
    s: S,
) -> Result<S::Ok, S::Error> {
    x.as_ref().map(Pair).serialize(s)
}

pub(crate) fn big_seq<'a, S: Serializer>(
    xs: impl IntoIterator<Item = &'a BigInt>,
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(None)?;
    for x in xs {
        seq.serialize_element(&Big(x))?;
    }
    seq.end()
}

pub(crate) fn big_set<S: Serializer>(
    xs: &std::collections::BTreeSet<BigInt>,
    s: S,
) -> Result<S::Ok, S::Error> {
    big_seq(xs, s)
}

#[cfg(test)]
mod tests {
    use crate::tree::{enumerate_lambda, make_kappa};
    use crate::MeasureParams;

    #[test]
    fn large_values_stay_numbers() {
        let k = make_kappa(MeasureParams::new(2, 6).unwrap()).unwrap();
        let set = enumerate_lambda(&k, 1, 64).unwrap();
        let text = serde_json::to_string(&set).unwrap();
        assert_eq!(text, r#"{"values":[0,4353564685],"unresolved":[]}"#);
    }
}

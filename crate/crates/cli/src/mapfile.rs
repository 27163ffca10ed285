//! The on-disk map format: a JSON document
//!
//! ```json
//! {
//!   "n": 2,
//!   "d": 2,
//!   "components": [
//!     [ { "coeff": "1", "exps": [0, 2] } ],
//!     []
//!   ]
//! }
//! ```
//!
//! Rationals are strings ("p/q" or a plain integer) so no precision is lost
//! to floating-point JSON numbers. Fields must appear in the order `n`, `d`,
//! `components`: the dimensions are needed to validate each term as it
//! streams by, which is what lets every rejection carry the line and column
//! where it happened. The writer emits a canonical form — sorted monomials,
//! reduced fractions, fixed key order — that re-parses byte-identically.

use keller_core::{Monomial, PolyMap, Polynomial, Rat, RatPolyMap};
use num_rational::BigRational;
use serde::de::{DeserializeSeed, Deserializer, Error as DeError, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug)]
pub struct MapFile {
    pub n: usize,
    pub d: usize,
    pub components: Vec<Polynomial<Rat>>,
}

impl MapFile {
    pub fn into_map(self) -> Result<RatPolyMap, String> {
        PolyMap::with_degree(self.components, self.d).map_err(|e| e.to_string())
    }
}

impl<'de> Deserialize<'de> for MapFile {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        de.deserialize_map(MapFileVisitor)
    }
}

struct MapFileVisitor;

impl<'de> Visitor<'de> for MapFileVisitor {
    type Value = MapFile;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an object with fields `n`, `d`, `components` in that order")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<MapFile, A::Error> {
        let n = expect_dimension_field(&mut access, "n")?;
        let d = expect_dimension_field(&mut access, "d")?;
        match access.next_key::<String>()? {
            Some(k) if k == "components" => {}
            Some(k) => return Err(DeError::custom(format!("expected field `components`, found `{k}`"))),
            None => return Err(DeError::custom("missing field `components`")),
        }
        let components = access.next_value_seed(ComponentsSeed { n, d })?;
        if let Some(k) = access.next_key::<String>()? {
            return Err(DeError::custom(format!("unexpected field `{k}`")));
        }
        Ok(MapFile { n, d, components })
    }
}

fn expect_dimension_field<'de, A: MapAccess<'de>>(
    access: &mut A,
    want: &'static str,
) -> Result<usize, A::Error> {
    match access.next_key::<String>()? {
        Some(k) if k == want => {}
        Some(k) => {
            return Err(DeError::custom(format!("expected field `{want}`, found `{k}`")))
        }
        None => return Err(DeError::custom(format!("missing field `{want}`"))),
    }
    let value: u64 = access.next_value()?;
    if value < 1 {
        return Err(DeError::custom(format!("`{want}` must be at least 1")));
    }
    usize::try_from(value).map_err(|_| DeError::custom(format!("`{want}` is too large")))
}

struct ComponentsSeed {
    n: usize,
    d: usize,
}

impl<'de> DeserializeSeed<'de> for ComponentsSeed {
    type Value = Vec<Polynomial<Rat>>;

    fn deserialize<D: Deserializer<'de>>(self, de: D) -> Result<Self::Value, D::Error> {
        de.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for ComponentsSeed {
    type Value = Vec<Polynomial<Rat>>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a list of {} components", self.n)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut components = Vec::with_capacity(self.n);
        while let Some(poly) = seq.next_element_seed(ComponentSeed {
            n: self.n,
            d: self.d,
        })? {
            if components.len() == self.n {
                return Err(DeError::custom(format!("more than {} components", self.n)));
            }
            components.push(poly);
        }
        if components.len() != self.n {
            return Err(DeError::custom(format!(
                "expected {} components, found {}",
                self.n,
                components.len()
            )));
        }
        Ok(components)
    }
}

struct ComponentSeed {
    n: usize,
    d: usize,
}

impl<'de> DeserializeSeed<'de> for ComponentSeed {
    type Value = Polynomial<Rat>;

    fn deserialize<D: Deserializer<'de>>(self, de: D) -> Result<Self::Value, D::Error> {
        de.deserialize_seq(self)
    }
}

impl<'de> Visitor<'de> for ComponentSeed {
    type Value = Polynomial<Rat>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a list of terms")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut terms = Vec::new();
        while let Some(term) = seq.next_element_seed(TermSeed {
            n: self.n,
            d: self.d,
        })? {
            terms.push(term);
        }
        Ok(Polynomial::from_terms(self.n, terms))
    }
}

struct TermSeed {
    n: usize,
    d: usize,
}

impl<'de> DeserializeSeed<'de> for TermSeed {
    type Value = (Monomial, Rat);

    fn deserialize<D: Deserializer<'de>>(self, de: D) -> Result<Self::Value, D::Error> {
        de.deserialize_map(self)
    }
}

impl<'de> Visitor<'de> for TermSeed {
    type Value = (Monomial, Rat);

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a term object with fields `coeff`, `exps`")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
        match access.next_key::<String>()? {
            Some(k) if k == "coeff" => {}
            Some(k) => return Err(DeError::custom(format!("expected field `coeff`, found `{k}`"))),
            None => return Err(DeError::custom("missing field `coeff`")),
        }
        let raw: String = access.next_value()?;
        let coeff = BigRational::from_str(&raw)
            .map_err(|e| DeError::custom(format!("invalid rational `{raw}`: {e}")))?;
        match access.next_key::<String>()? {
            Some(k) if k == "exps" => {}
            Some(k) => return Err(DeError::custom(format!("expected field `exps`, found `{k}`"))),
            None => return Err(DeError::custom("missing field `exps`")),
        }
        let exps: Vec<u64> = access.next_value()?;
        if let Some(k) = access.next_key::<String>()? {
            return Err(DeError::custom(format!("unexpected field `{k}` in term")));
        }
        if exps.len() != self.n {
            return Err(DeError::custom(format!(
                "term `exps` has length {}, expected {}",
                exps.len(),
                self.n
            )));
        }
        let exps: Vec<usize> = exps.iter().map(|&e| e as usize).collect();
        let degree: usize = exps.iter().sum();
        if degree > self.d {
            return Err(DeError::custom(format!(
                "term degree {degree} exceeds the declared bound {}",
                self.d
            )));
        }
        if degree == 0 && !num_traits::Zero::is_zero(&coeff) {
            return Err(DeError::custom("constant terms are not allowed"));
        }
        Ok((Monomial(exps), coeff))
    }
}

/// "p/q" with the fraction reduced, or just "p" for integers.
pub fn rational_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Serialize)]
struct TermOut {
    coeff: String,
    exps: Vec<usize>,
}

#[derive(Serialize)]
struct MapOut {
    n: usize,
    d: usize,
    components: Vec<Vec<TermOut>>,
}

/// Canonical serialization: fixed key order, terms ascending in the
/// monomial order, reduced fractions, trailing newline.
pub fn to_canonical_json(map: &RatPolyMap) -> String {
    let out = MapOut {
        n: map.n(),
        d: map.degree(),
        components: map
            .components()
            .iter()
            .map(|c| {
                c.terms()
                    .map(|(m, r)| TermOut {
                        coeff: rational_string(r),
                        exps: m.0.clone(),
                    })
                    .collect()
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&out).expect("map serialization cannot fail");
    s.push('\n');
    s
}

pub fn write_map(path: &Path, map: &RatPolyMap) -> Result<(), String> {
    fs::write(path, to_canonical_json(map))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Read and validate a map file; error strings carry the path and, for
/// anything caught during parsing, the line and column.
pub fn read_map(path: &Path) -> Result<(String, RatPolyMap), String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: MapFile = serde_json::from_str(&text)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let map = file
        .into_map()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((text, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn parse(s: &str) -> Result<RatPolyMap, String> {
        let file: MapFile = serde_json::from_str(s).map_err(|e| e.to_string())?;
        file.into_map()
    }

    const SHEAR: &str = r#"{
  "n": 2,
  "d": 2,
  "components": [
    [
      {
        "coeff": "1",
        "exps": [
          0,
          2
        ]
      }
    ],
    []
  ]
}
"#;

    #[test]
    fn canonical_form_round_trips() {
        let map = parse(SHEAR).unwrap();
        assert_eq!(to_canonical_json(&map), SHEAR);
        let again = parse(&to_canonical_json(&map)).unwrap();
        assert_eq!(again, map);
    }

    #[test]
    fn unreduced_fractions_and_unsorted_terms_canonicalize() {
        let loose = r#"{"n":1,"d":3,"components":[[
            {"coeff":"2/4","exps":[3]},
            {"coeff":"-3","exps":[2]},
            {"coeff":"1/2","exps":[3]}
        ]]}"#;
        let map = parse(loose).unwrap();
        let canon = to_canonical_json(&map);
        assert!(canon.contains("\"coeff\": \"1\""), "merged 2/4 + 1/2: {canon}");
        let map2 = parse(&canon).unwrap();
        assert_eq!(to_canonical_json(&map2), canon);
    }

    #[test]
    fn rational_strings_reduce() {
        let r = BigRational::new(BigInt::from(-4), BigInt::from(8));
        assert_eq!(rational_string(&r), "-1/2");
        assert_eq!(rational_string(&BigRational::from(BigInt::from(7))), "7");
    }

    #[test]
    fn errors_carry_line_and_column() {
        let bad = "{\n  \"n\": 2,\n  \"d\": 2,\n  \"components\": [[{\"coeff\": \"1\", \"exps\": [2]}], []]\n}";
        let err = serde_json::from_str::<MapFile>(bad).unwrap_err().to_string();
        assert!(err.contains("length 1, expected 2"), "{err}");
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("column"), "{err}");
    }

    #[test]
    fn field_order_is_enforced() {
        let bad = r#"{"d":2,"n":2,"components":[[],[]]}"#;
        let err = serde_json::from_str::<MapFile>(bad).unwrap_err().to_string();
        assert!(err.contains("expected field `n`"), "{err}");
    }

    #[test]
    fn bad_coefficients_are_rejected_in_place() {
        let bad = r#"{"n":1,"d":2,"components":[[{"coeff":"one","exps":[2]}]]}"#;
        let err = serde_json::from_str::<MapFile>(bad).unwrap_err().to_string();
        assert!(err.contains("invalid rational `one`"), "{err}");
        let zero_denom = r#"{"n":1,"d":2,"components":[[{"coeff":"1/0","exps":[2]}]]}"#;
        assert!(serde_json::from_str::<MapFile>(zero_denom).is_err());
    }

    #[test]
    fn structural_validation() {
        for (doc, needle) in [
            (r#"{"n":2,"d":2,"components":[[]]}"#, "expected 2 components"),
            (r#"{"n":1,"d":2,"components":[[],[]]}"#, "more than 1 components"),
            (r#"{"n":1,"d":2,"components":[[{"coeff":"1","exps":[3]}]]}"#, "degree 3 exceeds"),
            (r#"{"n":1,"d":2,"components":[[{"coeff":"5","exps":[0]}]]}"#, "constant terms"),
            (r#"{"n":0,"d":2,"components":[]}"#, "`n` must be at least 1"),
            (r#"{"n":1,"d":2,"components":[[]],"extra":1}"#, "unexpected field `extra`"),
            (r#"{"n":1,"d":2,"components":[[{"exps":[2],"coeff":"1"}]]}"#, "expected field `coeff`"),
        ] {
            let err = serde_json::from_str::<MapFile>(doc).unwrap_err().to_string();
            assert!(err.contains(needle), "doc {doc} gave: {err}");
        }
    }

    #[test]
    fn zero_coefficient_terms_are_dropped_by_canonicalization() {
        let doc = r#"{"n":1,"d":2,"components":[[{"coeff":"0","exps":[2]}]]}"#;
        let map = parse(doc).unwrap();
        assert!(map.is_zero());
    }

    #[test]
    fn linear_terms_are_allowed() {
        let doc = r#"{"n":2,"d":2,"components":[[{"coeff":"1","exps":[0,1]}],[]]}"#;
        let map = parse(doc).unwrap();
        assert!(map.has_linear_part());
    }
}

//! JSON interchange documents. Big integers are written as decimal strings
//! and every list has a fixed order, so equal inputs give equal bytes.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::encode::Encoder;
use crate::error::{Error, Result};
use crate::lang::{LeveledAlphabet, Word};
use crate::matsem::SparseMatrix;
use crate::morph::Morphism;
use crate::mtriple::{ComputableMap, MTriple};
use crate::poly::Polynomial;

pub const ENCODER_FORMAT: &str = "linre-encoder/1";

/// Serde helpers writing `BigUint` as a decimal string.
pub mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }

    pub(crate) fn parse(text: &str) -> Result<BigUint, String> {
        if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("`{text}` is not a decimal natural number"));
        }
        BigUint::parse_bytes(text.as_bytes(), 10).ok_or_else(|| format!("bad number `{text}`"))
    }

    /// The same for `Option<Vec<BigUint>>`.
    pub mod opt_vec {
        use num_bigint::BigUint;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<Vec<BigUint>>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref()
                .map(|v| v.iter().map(|x| x.to_str_radix(10)).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<BigUint>>, D::Error> {
            let raw = Option::<Vec<String>>::deserialize(d)?;
            raw.map(|v| {
                v.iter()
                    .map(|t| super::parse(t).map_err(serde::de::Error::custom))
                    .collect()
            })
            .transpose()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialDoc {
    #[serde(with = "decimal")]
    pub coeff: BigUint,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialDoc {
    pub arity: usize,
    pub monomials: Vec<MonomialDoc>,
}

impl From<&Polynomial> for PolynomialDoc {
    fn from(p: &Polynomial) -> Self {
        PolynomialDoc {
            arity: p.arity(),
            monomials: p
                .monomials()
                .iter()
                .map(|m| MonomialDoc {
                    coeff: m.coeff.clone(),
                    exponents: m.exponents.clone(),
                })
                .collect(),
        }
    }
}

impl PolynomialDoc {
    pub fn to_polynomial(&self) -> Result<Polynomial> {
        Polynomial::from_terms(
            self.arity,
            self.monomials
                .iter()
                .map(|m| (m.coeff.clone(), m.exponents.clone())),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetDoc {
    pub letters: Vec<String>,
    pub levels: Vec<usize>,
}

impl From<&LeveledAlphabet> for AlphabetDoc {
    fn from(a: &LeveledAlphabet) -> Self {
        AlphabetDoc {
            letters: a.names().to_vec(),
            levels: a.level_sizes(),
        }
    }
}

impl AlphabetDoc {
    pub fn to_alphabet(&self) -> Result<Arc<LeveledAlphabet>> {
        Ok(Arc::new(LeveledAlphabet::new(
            self.letters.clone(),
            &self.levels,
        )?))
    }
}

/// A morphism as `[letter, image]` pairs in alphabet order.
pub type MorphismDoc = Vec<(String, String)>;

pub fn morphism_doc(m: &Morphism) -> MorphismDoc {
    m.to_table()
}

pub fn morphism_from_doc(alphabet: &Arc<LeveledAlphabet>, doc: &MorphismDoc) -> Result<Morphism> {
    let table: Vec<(&str, &str)> = doc.iter().map(|(l, w)| (l.as_str(), w.as_str())).collect();
    Morphism::from_table(alphabet.clone(), &table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MTripleDoc {
    pub dimension: usize,
    pub alphabet: AlphabetDoc,
    pub g1: MorphismDoc,
    pub g2: MorphismDoc,
    pub witness: String,
}

impl From<&ComputableMap> for MTripleDoc {
    fn from(m: &ComputableMap) -> Self {
        let t = m.mtriple();
        MTripleDoc {
            dimension: t.dimension(),
            alphabet: AlphabetDoc::from(&**t.alphabet()),
            g1: morphism_doc(t.g1()),
            g2: morphism_doc(t.g2()),
            witness: m.witness().to_text(),
        }
    }
}

impl MTripleDoc {
    pub fn to_map(&self) -> Result<ComputableMap> {
        let a = self.alphabet.to_alphabet()?;
        let g1 = morphism_from_doc(&a, &self.g1)?;
        let g2 = morphism_from_doc(&a, &self.g2)?;
        let witness = Word::parse(a.clone(), &self.witness)?;
        ComputableMap::new(MTriple::new(a, g1, g2, self.dimension)?, witness)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderDoc {
    pub format: String,
    pub t: usize,
    pub p: PolynomialDoc,
    pub q: PolynomialDoc,
    pub p1: PolynomialDoc,
    pub q1: PolynomialDoc,
    pub alphabet: AlphabetDoc,
    pub g1: MorphismDoc,
    pub g2: MorphismDoc,
    pub u: String,
    pub v: String,
}

impl From<&Encoder> for EncoderDoc {
    fn from(enc: &Encoder) -> Self {
        EncoderDoc {
            format: ENCODER_FORMAT.into(),
            t: enc.t(),
            p: enc.p().into(),
            q: enc.q().into(),
            p1: enc.p1().into(),
            q1: enc.q1().into(),
            alphabet: AlphabetDoc::from(&**enc.alphabet()),
            g1: morphism_doc(enc.g1()),
            g2: morphism_doc(enc.g2()),
            u: enc.u().to_text(),
            v: enc.v().to_text(),
        }
    }
}

impl EncoderDoc {
    pub fn to_encoder(&self) -> Result<Encoder> {
        if self.format != ENCODER_FORMAT {
            return Err(Error::Parse(format!(
                "unknown encoder format `{}`, expected `{ENCODER_FORMAT}`",
                self.format
            )));
        }
        let a = self.alphabet.to_alphabet()?;
        let g1 = morphism_from_doc(&a, &self.g1)?;
        let g2 = morphism_from_doc(&a, &self.g2)?;
        let u = Word::parse(a.clone(), &self.u)?;
        let v = Word::parse(a.clone(), &self.v)?;
        Encoder::from_parts(
            a,
            g1,
            g2,
            u,
            v,
            self.t,
            [
                self.p.to_polynomial()?,
                self.q.to_polynomial()?,
                self.p1.to_polynomial()?,
                self.q1.to_polynomial()?,
            ],
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub dimension: usize,
    /// `(row, column, value)` in row-major order.
    pub entries: Vec<(usize, usize, String)>,
}

impl From<&SparseMatrix> for MatrixDoc {
    fn from(m: &SparseMatrix) -> Self {
        MatrixDoc {
            dimension: m.dim(),
            entries: m
                .triplets()
                .map(|(i, j, v)| (i, j, v.to_str_radix(10)))
                .collect(),
        }
    }
}

impl MatrixDoc {
    pub fn to_matrix(&self) -> Result<SparseMatrix> {
        let triplets = self
            .entries
            .iter()
            .map(|(i, j, v)| Ok((*i, *j, decimal::parse(v).map_err(Error::Parse)?)))
            .collect::<Result<Vec<_>>>()?;
        SparseMatrix::from_triplets(self.dimension, triplets)
    }
}

/// `M1` and `M2` of an encoder, with the letter names indexing them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatricesDoc {
    pub letters: Vec<String>,
    pub m1: MatrixDoc,
    pub m2: MatrixDoc,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize")
}

pub fn encoder_to_json(enc: &Encoder) -> String {
    to_json(&EncoderDoc::from(enc))
}

pub fn encoder_from_json(text: &str) -> Result<Encoder> {
    serde_json::from_str::<EncoderDoc>(text)?.to_encoder()
}

pub fn read_encoder(path: &Path) -> Result<Encoder> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read `{}`: {e}", path.display())))?;
    encoder_from_json(&text)
}

/// Reads a polynomial either as a JSON document or as text such as
/// `x1^2 + 2*x2`; text needs the arity.
pub fn polynomial_from_str(text: &str, arity: Option<usize>) -> Result<Polynomial> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let p = serde_json::from_str::<PolynomialDoc>(trimmed)?.to_polynomial()?;
        if let Some(t) = arity {
            if p.arity() != t {
                return Err(Error::ArityMismatch {
                    expected: t,
                    found: p.arity(),
                });
            }
        }
        Ok(p)
    } else {
        let t = arity.ok_or_else(|| Error::invalid("a text polynomial needs the arity (-t)"))?;
        Polynomial::parse(t, trimmed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::build_encoder;
    use crate::Limits;

    #[test]
    fn polynomial_document_shape() {
        let p = Polynomial::parse(2, "3*x1^2 + x2").unwrap();
        let json = serde_json::to_string(&PolynomialDoc::from(&p)).unwrap();
        assert_eq!(
            json,
            r#"{"arity":2,"monomials":[{"coeff":"1","exponents":[0,1]},{"coeff":"3","exponents":[2,0]}]}"#
        );
        assert_eq!(polynomial_from_str(&json, None).unwrap(), p);
        assert_eq!(polynomial_from_str("3*x1^2 + x2", Some(2)).unwrap(), p);
        assert!(polynomial_from_str(&json, Some(3)).is_err());
        assert!(polynomial_from_str(
            r#"{"arity":1,"monomials":[{"coeff":"-1","exponents":[1]}]}"#,
            None
        )
        .is_err());
    }

    #[test]
    fn matrix_document_round_trip() {
        let m = SparseMatrix::from_dense(&[&[1, 0, 7], &[0, 0, 0], &[0, 0, 2]]).unwrap();
        let doc = MatrixDoc::from(&m);
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"dimension":3,"entries":[[0,0,"1"],[0,2,"7"],[2,2,"2"]]}"#
        );
        assert_eq!(doc.to_matrix().unwrap(), m);
    }

    #[test]
    fn mtriple_document_round_trip() {
        let p = Polynomial::parse(2, "x1*x2 + 2").unwrap();
        let map = crate::mtriple::compile_polynomial(&p, &Limits::default()).unwrap();
        let doc = MTripleDoc::from(&map);
        let back = MTripleDoc::from(&doc.to_map().unwrap());
        assert_eq!(back, doc);
        assert_eq!(
            doc.to_map().unwrap().compute_word(&[3, 4], 10_000).unwrap(),
            BigUint::from(14u32)
        );
    }

    #[test]
    fn encoder_document_round_trip() {
        let p = Polynomial::parse(2, "x1 + x2").unwrap();
        let q = Polynomial::parse(2, "2*x2").unwrap();
        let enc = build_encoder(&p, &q, &Limits::default()).unwrap();
        let json = encoder_to_json(&enc);
        let back = encoder_from_json(&json).unwrap();
        assert_eq!(back, enc);
        assert_eq!(encoder_to_json(&back), json);
        let broken = json.replacen(ENCODER_FORMAT, "other/9", 1);
        assert!(encoder_from_json(&broken).is_err());
    }
}

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::encode::{Encoder, GeneratorWord, LetterImage, SuiteReport};
use crate::error::{Error, Result};
use crate::lang::Letter;

use super::SparseMatrix;

/// `(M1, M2)`: the incidence matrices of the encoder's generators.
pub fn matrices_of_encoder(enc: &Encoder) -> (SparseMatrix, SparseMatrix) {
    enc.matrices().clone()
}

/// The matrix of a generator word, multiplied left to right.
pub fn word_matrix(enc: &Encoder, w: &GeneratorWord) -> SparseMatrix {
    let (m1, m2) = enc.matrices();
    word_matrix_from(m1, m2, w)
}

/// `M_{w1} M_{w2} ⋯` for generator matrices `m1`, `m2`.
pub fn word_matrix_from(m1: &SparseMatrix, m2: &SparseMatrix, w: &GeneratorWord) -> SparseMatrix {
    let mut acc: Option<SparseMatrix> = None;
    for &g in w.symbols() {
        let m = if g == 1 { m1 } else { m2 };
        acc = Some(match acc {
            None => m.clone(),
            Some(a) => a.mul(m).expect("generator matrices share a dimension"),
        });
    }
    acc.unwrap_or_else(|| SparseMatrix::identity(m1.dim()))
}

/// `Mprod(n1..na) = M1^n1 M2 ⋯ M1^na M2`.
pub fn mprod(m1: &SparseMatrix, m2: &SparseMatrix, ns: &[u64]) -> Result<SparseMatrix> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch(
            "M1 and M2 differ in dimension".into(),
        ));
    }
    if ns.is_empty() {
        return Err(Error::invalid("Mprod needs at least one argument"));
    }
    Ok(word_matrix_from(m1, m2, &GeneratorWord::prod(ns)?))
}

/// `K(n,s) = M2² Mprod(n, s)`.
pub fn k_ns(m1: &SparseMatrix, m2: &SparseMatrix, n: u64, s: u64) -> Result<SparseMatrix> {
    Ok(word_matrix_from(m1, m2, &Encoder::f_ns_word(n, s)?))
}

/// `M(n,s) = M2³ Mprod(n, s)`.
pub fn m_ns(m1: &SparseMatrix, m2: &SparseMatrix, n: u64, s: u64) -> Result<SparseMatrix> {
    Ok(word_matrix_from(m1, m2, &Encoder::g_ns_word(n, s)?))
}

/// Checks `Ψ(h) = M_{w1} ⋯ M_{wk}` for every generator word `w` of length
/// at most `max_len`, with the product taken left to right.
///
/// When `h` fits under the cap it is composed explicitly and its matrix
/// compared whole. Otherwise each row is checked on its own: from the
/// Parikh vector of the explicit image `d·h` when that image has at most
/// `cap` letters, and from Parikh vectors pushed through the morphism
/// tables letter by letter when it is longer.
pub fn functoriality_suite(enc: &Encoder, max_len: usize, cap: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("functoriality", &["matrix of composition = matrix product"]);
    let (m1, m2) = enc.matrices();
    let a = enc.alphabet();
    let mut chain: HashMap<GeneratorWord, SparseMatrix> = HashMap::new();
    chain.insert(GeneratorWord::identity(), SparseMatrix::identity(m1.dim()));
    let cap_big = BigUint::from(cap);
    for w in GeneratorWord::all_up_to(max_len) {
        if !w.is_empty() {
            let (last, prefix) = w.symbols().split_last().expect("nonempty");
            let prefix = GeneratorWord::new(prefix.to_vec())?;
            let m = chain[&prefix].mul(if *last == 1 { m1 } else { m2 })?;
            chain.insert(w.clone(), m);
        }
        let product = &chain[&w];
        match enc.compose_word(&w, cap) {
            Ok(h) => {
                report.route(true);
                let ok = &h.matrix_of()? == product;
                report.record(0, ok, || format!("{w}: matrices differ"));
            }
            Err(Error::ExpansionCap { .. }) => {
                let lengths = image_lengths(enc, &w);
                let mut bad = None;
                for d in a.letters() {
                    let image = if lengths[d.index()] <= cap_big {
                        enc.trace_letter(d, &w, cap)?
                    } else {
                        let start = std::iter::once((d, BigUint::one())).collect();
                        let mut v = LetterImage::Parikh(start);
                        for &g in w.symbols() {
                            v = v.step(enc.generator(g), cap)?;
                        }
                        v
                    };
                    report.route(image.is_word_level());
                    if image.parikh() != product.row_vector(d.index()) && bad.is_none() {
                        bad = Some(d);
                    }
                }
                report.record(0, bad.is_none(), || {
                    format!("{w}: row `{}` differs", a.name(bad.expect("mismatch")))
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// `|d·w|` for every letter `d`, computed from the right.
fn image_lengths(enc: &Encoder, w: &GeneratorWord) -> Vec<BigUint> {
    let n = enc.alphabet().len();
    let mut len = vec![BigUint::one(); n];
    for &g in w.symbols().iter().rev() {
        let g = enc.generator(g);
        len = (0..n)
            .map(|i| {
                g.image(Letter::new(i))
                    .runs()
                    .iter()
                    .map(|(l, c)| c * &len[l.index()])
                    .sum()
            })
            .collect();
    }
    len
}

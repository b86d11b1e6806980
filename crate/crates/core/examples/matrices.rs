//! Matrix semantics: the incidence matrices of g1, g2 and the functor
//! law on short generator words.

use linre::encode::{build_encoder, GeneratorWord};
use linre::matsem::{functoriality_suite, word_matrix};
use linre::poly::Polynomial;
use linre::Limits;

fn main() -> linre::Result<()> {
    let p = Polynomial::parse(2, "x1 + x2")?;
    let q = Polynomial::parse(2, "2*x2")?;
    let enc = build_encoder(&p, &q, &Limits::default())?;
    let (m1, m2) = enc.matrices();
    println!(
        "dimension {}, nnz(M1) = {}, nnz(M2) = {}, upper triangular: {}",
        m1.dim(),
        m1.nnz(),
        m2.nnz(),
        m1.is_upper_triangular() && m2.is_upper_triangular()
    );
    let w = GeneratorWord::parse("[1,1,2,1,2]")?;
    let m = word_matrix(&enc, &w);
    let h = enc.compose_word(&w, 1_000_000)?;
    println!("Ψ({w}) = M-product: {}", h.matrix_of()? == m);
    print!("{}", functoriality_suite(&enc, 5, 1_000_000)?);
    Ok(())
}

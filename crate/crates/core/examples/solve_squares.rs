//! Bounded solving on the squares encoder: one and two unknowns at the
//! matrix level, with recovery of the Diophantine witness.

use linre::encode::{build_encoder, Encoder};
use linre::matsem::word_matrix_from;
use linre::poly::Polynomial;
use linre::solve::{
    diophantine_oracle, recover_witness, solve_one_unknown, solve_two_unknowns, MatrixMonoid,
    Outcome,
};
use linre::Limits;

fn main() -> linre::Result<()> {
    let p = Polynomial::parse(3, "x2")?;
    let q = Polynomial::parse(3, "x3^2")?;
    let enc = build_encoder(&p, &q, &Limits::default())?;
    let (m1, m2) = enc.matrices();
    let monoid = MatrixMonoid::of_encoder(&enc);
    for s in 1..=9 {
        let k = word_matrix_from(m1, m2, &Encoder::f_ns_word(1, s)?);
        let m = word_matrix_from(m1, m2, &Encoder::g_ns_word(1, s)?);
        let one = solve_one_unknown(&monoid, &k, &m, 12)?;
        let two = solve_two_unknowns(&monoid, &k, &m, 12)?;
        let oracle = diophantine_oracle(&p, &q, 1, s, 5)?;
        println!("s = {s}: oracle {oracle:?}; {one}; {two}");
        if let Outcome::Found { x } = &one.outcome {
            if let Some(r) = recover_witness(&enc, 1, s, x)? {
                println!(
                    "  recovered {:?}, decoded {:?}, ok {}",
                    r.tuple,
                    r.decoded,
                    r.ok()
                );
            }
        }
    }
    Ok(())
}

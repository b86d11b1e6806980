//! Run-length words, morphisms acting on the right, Parikh vectors and
//! incidence matrices.

use std::sync::Arc;

use linre::lang::{LeveledAlphabet, ParikhVector, Word};
use linre::morph::Morphism;
use num_bigint::BigUint;

fn main() -> linre::Result<()> {
    let a = Arc::new(LeveledAlphabet::flat(["a", "b", "c"])?);
    let f = Morphism::from_table(a.clone(), &[("a", "a b"), ("b", "b c"), ("c", "c")])?;
    let g = Morphism::from_table(a.clone(), &[("a", "a"), ("b", "c^2"), ("c", "")])?;

    let w = Word::parse(a.clone(), "a^2 b")?;
    let wf = f.apply(&w, 1_000)?;
    println!("w = {w}, w·f = {wf}, w·f·g = {}", g.apply(&wf, 1_000)?);
    // compose(f, g) applies f first.
    let fg = f.compose(&g, 1_000)?;
    println!("w·(fg) = {}", fg.apply(&w, 1_000)?);

    println!("M_f =\n{}", f.matrix_of()?);
    let show = |v: &ParikhVector| {
        a.letters()
            .map(|l| v.get(l).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!(
        "ψ(w)·M_f = ({})",
        show(&f.matrix_of()?.vec_mul(&w.parikh()))
    );
    println!("ψ(w·f)    = ({})", show(&wf.parikh()));

    // Counts are big integers: b^(10^30) is one run and so is its image.
    let b = a.letter("b").expect("letter b");
    let big = Word::power_of_letter(a.clone(), b, BigUint::from(10u32).pow(30));
    let image = g.apply(&big, 1_000)?;
    println!("b^(10^30)·g = {image}");
    // a^(10^30)·f alternates a and b, far more runs than the cap allows.
    let big = Word::power_of_letter(a.clone(), a.first(), BigUint::from(10u32).pow(30));
    match f.apply(&big, 1_000) {
        Ok(w) => println!("a^(10^30)·f has {} runs", w.run_count()),
        Err(e) => println!("a^(10^30)·f: {e}"),
    }
    Ok(())
}

//! Compile a polynomial to an M-triple, validate it and evaluate it by
//! iterating g1 and g2 on the witness word.

use linre::mtriple::{compile_polynomial, compiled_alphabet_size, mtriple_compute};
use linre::poly::Polynomial;
use linre::Limits;

fn main() -> linre::Result<()> {
    let p = Polynomial::parse(3, "x1*x2 + x3^2 + 2")?;
    println!(
        "p = {p}, predicted alphabet size {}",
        compiled_alphabet_size(&p)
    );
    let map = compile_polynomial(&p, &Limits::default())?;
    let m = map.mtriple();
    println!(
        "alphabet: {} letters, levels {:?}",
        m.alphabet().len(),
        m.alphabet().level_sizes()
    );
    print!("{}", m.validate());

    for point in [[1, 1, 1], [2, 3, 4], [4, 4, 4]] {
        let c = mtriple_compute(&map, &point, 1_000_000)?;
        println!(
            "f{point:?} = {} via {:?}, p{point:?} = {}",
            c.value,
            c.route,
            p.eval_u64(&point)?
        );
    }
    for (i, w) in map.trace(&[2, 3, 4], 1_000_000)?.iter().enumerate().take(4) {
        println!("step {i}: {} runs", w.run_count());
    }
    Ok(())
}

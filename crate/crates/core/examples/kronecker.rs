//! The Kronecker-power morphism: iterating it n times takes the first
//! letter to n^k copies of the last one.

use linre::mtriple::{constant_exponent_morphism, first_to_last_count, kronecker_power_morphism};
use linre::Limits;

fn main() -> linre::Result<()> {
    let limits = Limits::default();
    for k in 1..=3 {
        let (alphabet, h) = kronecker_power_morphism(k, &limits)?;
        let counts = (1..=5)
            .map(|n| first_to_last_count(&h, n, limits.expansion_cap).map(|c| c.to_string()))
            .collect::<linre::Result<Vec<_>>>()?;
        println!(
            "k = {k}: {} letters, counts for n = 1..5: {}",
            alphabet.len(),
            counts.join(" ")
        );
    }
    let (_, h) = constant_exponent_morphism();
    println!(
        "constant block: a·h^4 = {}",
        h.power(4, 100)?.image(h.domain().first())
    );
    println!(
        "kronecker square matrix:\n{}",
        kronecker_power_morphism(2, &limits)?.1.matrix_of()?
    );
    Ok(())
}

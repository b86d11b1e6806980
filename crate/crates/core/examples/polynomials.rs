//! Exact polynomial arithmetic and the injective tupling polynomials.

use linre::poly::{injective_tupling, pairing, untuple, Polynomial};
use num_bigint::BigUint;

fn main() -> linre::Result<()> {
    let p = Polynomial::parse(2, "x1^2 + 2*x2")?;
    let q = Polynomial::parse(2, "x1*x2 + 1")?;
    println!("p = {p}");
    println!("q = {q}");
    println!("p + q = {}", p.add(&q)?);
    println!("p * q = {}", p.mul(&q)?);
    println!("p(3, 4) = {}", p.eval_u64(&[3, 4])?);

    // Substitute x1 -> x1 + x2, x2 -> 5.
    let x1 = Polynomial::variable(2, 0)?;
    let x2 = Polynomial::variable(2, 1)?;
    let shifted = p.compose(&[x1.add(&x2)?, Polynomial::constant(2, 5u32)])?;
    println!("p(x1 + x2, 5) = {shifted}");

    println!("C2 = {}", pairing());
    let c3 = injective_tupling(3)?;
    println!("C3 = {c3}");
    let z = c3.eval_u64(&[2, 7, 1])?;
    println!("C3(2, 7, 1) = {z}, decoded {:?}", untuple(3, &z));
    // 2 is not in the image of C2.
    println!("untuple(2, 2) = {:?}", untuple(2, &BigUint::from(2u32)));
    Ok(())
}

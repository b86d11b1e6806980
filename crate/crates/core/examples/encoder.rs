//! Build the encoder for the squares pair p = x2, q = x3^2, write its
//! interchange document and run the verification suites.
//!
//! cargo run --release --example encoder [out.json]

use linre::encode::{build_encoder, definition_suite, lemma5_suite, lemma6_suite};
use linre::format::encoder_to_json;
use linre::poly::Polynomial;
use linre::Limits;

fn main() -> linre::Result<()> {
    let p = Polynomial::parse(3, "x2")?;
    let q = Polynomial::parse(3, "x3^2")?;
    let enc = build_encoder(&p, &q, &Limits::default())?;
    println!("p1 = {}", enc.p1());
    println!("q1 = {}", enc.q1());
    println!(
        "|D| = {}, levels {:?}, g1 runs {}, g2 runs {}",
        enc.alphabet().len(),
        enc.alphabet().level_sizes(),
        enc.g1().total_runs(),
        enc.g2().total_runs()
    );
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, encoder_to_json(&enc))?;
        println!("wrote {path}");
    }
    let cap = Limits::DEFAULT_EXPANSION_CAP;
    print!("{}", definition_suite(&enc, 2, cap)?);
    print!("{}", lemma5_suite(&enc, 2, 2, cap)?);
    print!("{}", lemma6_suite(&enc, 2, cap)?);
    Ok(())
}

//! Oracle against bounded solvers for a polynomial pair given on the
//! command line.
//!
//! cargo run --release --example equivalence_report -- "x2" "x3^2" 3 [both]

use linre::encode::build_encoder;
use linre::poly::Polynomial;
use linre::solve::{equivalence_report, LevelSelect, ReportConfig};
use linre::Limits;

fn main() -> linre::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (p, q, t) = match args.as_slice() {
        [p, q, t, ..] => (p.as_str(), q.as_str(), t.parse().unwrap_or(3)),
        _ => ("x2", "x3^2", 3),
    };
    let level = if args.get(3).map(String::as_str) == Some("both") {
        LevelSelect::Both
    } else {
        LevelSelect::Matrix
    };
    let enc = build_encoder(
        &Polynomial::parse(t, p)?,
        &Polynomial::parse(t, q)?,
        &Limits::default(),
    )?;
    let config = ReportConfig {
        n_range: 1..=1,
        s_range: 1..=9,
        oracle_bound: 5,
        max_len: 12,
        level,
        cap: Limits::DEFAULT_EXPANSION_CAP,
    };
    let report = equivalence_report(&enc, &config)?;
    print!("{report}");
    println!(
        "all agree: {}, members: {:?}",
        report.all_agree(),
        report.members()
    );
    Ok(())
}

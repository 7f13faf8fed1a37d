//! Decodes noisy codewords of the (256, 234) code with unconstrained
//! ORBGRAND and with abandonment after a fixed query budget.
//!
//! `cargo run --release --example orbgrand_decode -- [ebn0_db] [blocks]`

use fifogrand::channel::ebn0_to_sigma2;
use fifogrand::harness::{TrialBank, CANONICAL_CODE_SEED};
use fifogrand::orbgrand::{decode_grandab, decode_unconstrained, DEFAULT_QUERY_CAP};
use fifogrand::generate_code;

fn main() -> fifogrand::Result<()> {
    let mut args = std::env::args().skip(1);
    let ebn0: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(9.0);
    let blocks: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);

    let code = generate_code(256, 234, CANONICAL_CODE_SEED)?;
    let bank = TrialBank::new(&code, 2024, blocks)?;
    let stream = bank.llr_stream(ebn0_to_sigma2(ebn0, code.rate())?)?;

    println!("block  queries  correct  | budget 40: found correct");
    for (i, llrs) in stream.iter().enumerate() {
        let full = decode_unconstrained(llrs, &code, DEFAULT_QUERY_CAP)?;
        let short = decode_grandab(llrs, &code, 40)?;
        let sent = &bank.codewords()[i];
        println!(
            "{i:>5}  {:>7}  {:>7}  | {:>17} {:>7}",
            full.queries_used,
            full.word == *sent,
            short.found,
            short.word == *sent
        );
    }
    Ok(())
}

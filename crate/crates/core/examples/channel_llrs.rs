//! BPSK over AWGN: noise variance, received samples, LLRs and hard decisions.
//!
//! `cargo run --example channel_llrs -- [ebn0_db]`

use fifogrand::channel::{compute_llrs, ebn0_to_sigma2, modulate, substream_rng, transmit, Substream};
use fifogrand::generate_code;
use fifogrand::BitBlock;

fn main() -> fifogrand::Result<()> {
    let ebn0: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let code = generate_code(16, 11, 1)?;
    let sigma2 = ebn0_to_sigma2(ebn0, code.rate())?;
    println!("Eb/N0 {ebn0} dB, rate {:.4}: sigma^2 = {sigma2:.5}", code.rate());

    let info = BitBlock::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1])?;
    let word = code.encode(&info)?;
    let mut rng = substream_rng(7, 0, Substream::Noise);
    let y = transmit(&modulate(&word), sigma2, &mut rng)?;
    let llrs = compute_llrs(&y, sigma2)?;
    let hard = llrs.hard_decision();

    println!("pos bit      y       llr  hard");
    for (i, (yi, li)) in y.iter().zip(&llrs.llrs).enumerate() {
        println!("{i:>3} {:>3} {yi:>6.3} {li:>9.3} {:>5}", word.get(i) as u8, hard.get(i) as u8);
    }
    let mut diff = hard.clone();
    diff.xor_assign(&word)?;
    println!("hard-decision errors: {}", diff.count_ones());
    Ok(())
}

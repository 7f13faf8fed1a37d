//! Builds a systematic random code, encodes a word and checks syndromes.
//!
//! `cargo run --example encode_and_check`

use fifogrand::harness::CANONICAL_CODE_SEED;
use fifogrand::{generate_code, BitBlock, CodeSpec};

fn main() -> fifogrand::Result<()> {
    let code = generate_code(256, 234, CANONICAL_CODE_SEED)?;
    println!("code ({}, {}), seed {}, rate {:.4}", code.n(), code.k(), code.seed(), code.rate());

    let bits: Vec<u8> = (0..code.k()).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
    let info = BitBlock::from_bits(&bits)?;
    let mut word = code.encode(&info)?;
    println!("codeword weight {}, valid {}", word.count_ones(), code.is_codeword(&word)?);

    word.flip(17);
    println!("after flipping bit 17: valid {}, syndrome {:?}", code.is_codeword(&word)?, code.syndrome(&word)?);

    let path = std::env::temp_dir().join("fifogrand_code.txt");
    code.save(&path)?;
    let reloaded = CodeSpec::load(&path)?;
    println!("matrix file {} round-trips: {}", path.display(), reloaded.generator() == code.generator());
    Ok(())
}

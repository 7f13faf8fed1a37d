//! Lists ORBGRAND test patterns in query order for a short block.
//!
//! `cargo run --example pattern_order -- [n] [count]`

use fifogrand::orbgrand::{logistic_weight, PatternGenerator};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(24);

    println!("query  weight  ranks flipped");
    for (q, p) in PatternGenerator::new(n).take(count).enumerate() {
        println!("{:>5}  {:>6}  {:?}", q + 1, logistic_weight(&p), p);
    }
}

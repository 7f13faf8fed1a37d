//! Prints every built-in preset as TOML, ready to copy and edit.
//!
//! `cargo run --example presets -- [name]`

use fifogrand::harness::{preset, preset_names, PRESET_VERSION};

fn main() -> fifogrand::Result<()> {
    let only = std::env::args().nth(1);
    println!("# preset version {PRESET_VERSION}");
    for name in preset_names() {
        if only.as_deref().is_some_and(|o| o != *name) {
            continue;
        }
        println!("\n# --- {name} ---");
        print!("{}", preset(name)?.to_toml());
    }
    Ok(())
}

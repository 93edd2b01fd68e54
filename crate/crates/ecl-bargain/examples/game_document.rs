//! Load a JSON game document and solve it, as the command line does.

use ecl_bargain::document::{solve_document, GameDocument};

fn main() -> anyhow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/games/blocking-game.json").to_string());
    let doc = GameDocument::from_json(&std::fs::read_to_string(&path)?)?;
    println!("{}", serde_json::to_string_pretty(&solve_document(&doc)?)?);
    Ok(())
}

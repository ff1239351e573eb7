//! Writes every built-in fixture as a `.loop` file.
//!
//! cargo run -p kappa-roll --example export_corpus -- fixtures

use std::path::PathBuf;

use kappa_roll::io::{write_loop, Metadata};
use kappa_roll::shapes;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    for f in shapes::corpus() {
        let mut tags = Vec::new();
        if f.shape.is_convex() {
            tags.push("convex".to_string());
        }
        tags.push(format!("internal={}", f.internal));
        tags.push(format!("external={}", f.external));
        let meta = Metadata {
            name: Some(f.name.to_string()),
            tags,
            ..Metadata::default()
        };
        std::fs::write(dir.join(format!("{}.loop", f.name)), write_loop(&f.shape, meta))?;
    }
    Ok(())
}

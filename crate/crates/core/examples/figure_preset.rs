//! Generates a paper-figure grid programmatically (same as
//! `coarse-bell figure --id 2a`) and prints it as CSV with its metadata
//! header.
//!
//! Run: `cargo run --example figure_preset`

use coarse_bell::cli::figures::{run, FigureId};
use coarse_bell::cli::Format;

fn main() -> coarse_bell::Result<()> {
    let table = run(FigureId::Fig2a)?;
    print!("{}", table.render(Format::Csv));
    Ok(())
}

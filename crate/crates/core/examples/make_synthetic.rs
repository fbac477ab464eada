//! Writes the bundled 500-row benchmark CSV used by `interpnn bench` smoke runs.
//!
//! Usage: `cargo run --example make_synthetic -- data/synthetic_bench.csv`

use std::error::Error;

use interpnn::{MixtureModel, RngSeed};

const ROWS: usize = 500;
const DIM: usize = 3;
const SEED: u64 = 20_240_501;

fn main() -> Result<(), Box<dyn Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "data/synthetic_bench.csv".into());
    let ds = MixtureModel::benchmark(DIM).sample(ROWS, RngSeed::new(SEED, 0))?;
    let mut w = csv::Writer::from_path(&path)?;
    let mut header: Vec<String> = (1..=DIM).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (p, y) in ds.points().zip(ds.labels()) {
        let mut rec: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
        rec.push(format!("{y}"));
        w.write_record(&rec)?;
    }
    w.flush()?;
    println!("wrote {ROWS} rows to {path}");
    Ok(())
}

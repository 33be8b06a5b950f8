//! Runs a figure preset at desk scale and writes its CSV and JSON metadata,
//! the same as `covertlink run --preset <name> --desk-scale --out <dir>`.
//!
//! `cargo run --release --example experiment_sweep -- [preset] [out_dir]`

use covertlink::experiments::{preset, run_experiment};

fn main() -> covertlink::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig5".to_string());
    let dir = args.next().map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir);

    let cfg = preset(&name, true)?;
    let out = run_experiment(&cfg)?;
    let (csv, json) = out.write(&dir)?;
    println!("{}", out.table.columns.join("\t"));
    for row in &out.table.rows {
        println!("{}", row.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join("\t"));
    }
    println!("\n{} rows in {:.1} s, audits passed: {}", out.meta.rows, out.meta.wall_time_s, out.all_audits_passed());
    println!("{}\n{}", csv.display(), json.display());
    Ok(())
}

//! Draws a Rician channel for the Alice-Bob link, dumps it as CSV and reads
//! it back.
//!
//! `cargo run --example channel_sampling -- [seed] [out.csv]`

use std::io::BufReader;

use covertlink::channel::{read_channel_csv, sample_channel_seeded, write_channel_csv};
use covertlink::covert_analysis::effective_gain;
use covertlink::scenario::Scenario;

fn main() -> covertlink::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out = args.next().map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("h_ab.csv"));

    let sc = Scenario::default();
    let links = sc.links()?;
    let model = sc.bob_rician(&links);
    let real = sample_channel_seeded(&model, seed, 0);
    let (r, c) = real.h.shape();
    println!("H_ab is {r}x{c}, K = {}", sc.k_factor);

    let w = links.bob.d_tx.unscale(links.bob.d_tx.norm());
    println!("LoS beam gain: LoS part {:.3}, realization {:.3}", effective_gain(&links.bob.los, &links.bob.combiner, &w), effective_gain(&real.h, &links.bob.combiner, &w));

    write_channel_csv(std::fs::File::create(&out)?, &real.h, sc.k_factor, seed)?;
    let back = read_channel_csv(BufReader::new(std::fs::File::open(&out)?))?;
    println!("wrote {}; max round-trip error {:e}", out.display(), (&back.h - &real.h).camax());
    Ok(())
}

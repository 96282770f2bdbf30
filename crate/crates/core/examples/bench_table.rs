//! Runs the three linkage rules over the bundled datasets and prints the
//! ratio-to-best tables. Pass a TOML config to run your own matrix instead.
//!
//!     cargo run --release --example bench_table -- [config.toml] [out_dir]

use std::path::{Path, PathBuf};

use avglink::bench::{ratio_table, run_matrix, summary_markdown, write_outputs, BenchConfig, Subsample};
use avglink::Norm;

fn main() -> avglink::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let config = match args.first() {
        Some(path) => BenchConfig::load(Path::new(path))?,
        None => {
            let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
            let files: Vec<PathBuf> =
                ["iris", "wine", "diabetes", "breast_cancer", "digits"].iter().map(|n| data.join(format!("{n}.csv"))).collect();
            let mut c = BenchConfig::new(files);
            c.norms = Norm::ALL.to_vec();
            c.subsample = Some(Subsample { m: 300, seed: 7 });
            c
        }
    };
    let run = run_matrix(&config);
    let table = ratio_table(&run.records, &run.datasets, &config.criteria);
    print!("{}", table.to_markdown());
    print!("{}", summary_markdown(&run));
    if let Some(dir) = args.get(1) {
        let out = write_outputs(&run, &table, Path::new(dir))?;
        println!("\nwrote {}", out.records.display());
    }
    Ok(())
}

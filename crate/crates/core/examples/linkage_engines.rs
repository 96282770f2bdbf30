//! Builds average, complete and single linkage hierarchies over a feature
//! CSV (or a built-in toy set), compares the two engines and prints cuts.
//!
//!     cargo run --example linkage_engines -- [points.csv] [k]

use std::path::Path;

use avglink::io::load_source;
use avglink::linkage::{build, Engine};
use avglink::{DistanceSource, LinkageRule, Norm, TieBreak};

fn main() -> avglink::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let src = match args.first() {
        Some(path) => load_source(Path::new(path), Norm::L2)?,
        None => {
            let rows = vec![vec![0.0, 0.0], vec![0.4, 0.1], vec![0.2, 0.5], vec![5.0, 5.0], vec![5.3, 4.8], vec![9.0, 0.5]];
            DistanceSource::from_features(&rows, Norm::L2)?.with_name("toy")
        }
    };
    let k: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    println!("{}: n = {}, k = {k}\n", src.name(), src.n());

    for rule in LinkageRule::ALL {
        let naive = build(&src, rule, Engine::Naive(TieBreak::LexMinId))?;
        let chain = build(&src, rule, Engine::NnChain)?;
        let same = naive.all_cuts() == chain.all_cuts();
        println!("{rule}: engines agree on every cut: {same}");
        if src.n() <= 12 {
            for (t, m) in naive.merges().iter().enumerate() {
                println!("  merge {t}: {} + {} at {:.4} (size {})", m.left, m.right, m.height, m.size);
            }
        }
        println!("  {k}-cut: {}\n", naive.cut(k)?);
    }

    let d = build(&src, LinkageRule::Average, Engine::NnChain)?;
    if src.n() <= 12 {
        print!("average-link hierarchy as CSV:\n{}", d.to_csv());
    }
    Ok(())
}

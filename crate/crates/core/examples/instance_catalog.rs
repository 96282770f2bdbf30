//! Generates every catalog instance, replays its expected executions and
//! prints each expectation with its outcome. Pass a directory to also write
//! the sources and expectation files.
//!
//!     cargo run --release --example instance_catalog -- [out_dir]

use std::collections::BTreeMap;
use std::path::Path;

use avglink::instances::{generate, GENERATORS};

fn main() -> avglink::Result<()> {
    let out = std::env::args().nth(1);
    let mut failures = 0;
    for name in GENERATORS {
        let bundle = generate(name, &BTreeMap::new())?;
        println!("== {name} (n = {}, metric = {})", bundle.source.n(), bundle.declared_metric);
        for note in &bundle.notes {
            println!("   note: {note}");
        }
        for outcome in bundle.check()? {
            failures += usize::from(!outcome.passed);
            println!("   {outcome}");
        }
        if let Some(dir) = &out {
            let (src, expect) = bundle.write_to(Path::new(dir))?;
            println!("   wrote {} and {}", src.display(), expect.display());
        }
    }
    println!("\n{failures} expectations failed");
    Ok(())
}

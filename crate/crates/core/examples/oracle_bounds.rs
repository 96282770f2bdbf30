//! Exhaustive optima for a small point set, the approximation checks of
//! each linkage rule against them, and the same table on a non-metric input.
//!
//!     cargo run --release --example oracle_bounds

use avglink::instances::gen_nonmetric;
use avglink::oracle::{compute_opts, max_avg_subset, verify_bounds};
use avglink::{DistanceSource, LinkageRule, Norm};

fn main() -> avglink::Result<()> {
    let rows = vec![
        vec![0.0, 0.0],
        vec![1.0, 0.2],
        vec![0.3, 1.1],
        vec![6.0, 5.5],
        vec![6.4, 6.1],
        vec![12.0, 0.0],
        vec![12.5, 0.8],
        vec![3.0, 9.0],
        vec![3.5, 8.2],
    ];
    let src = DistanceSource::from_features(&rows, Norm::L2)?.with_name("nine");
    let k = 3;

    let opts = compute_opts(&src, k)?;
    println!("{} partitions of {} points into {k} blocks", opts.partitions, src.n());
    println!("opt_sep    = {:.4}  witness {}", opts.opt_sep, opts.sep_witness);
    println!("opt_dm     = {:.4}  witness {}", opts.opt_dm, opts.dm_witness);
    println!("opt_av     = {:.4}  witness {}", opts.opt_av, opts.av_witness);
    println!("opt_cs_dm  = {:.4}  witness {}", opts.opt_cs_dm, opts.cs_dm_witness);
    let (subset, value) = max_avg_subset(&src, k)?;
    println!("best {k}-subset {subset} with average {value:.4}\n");

    for rule in LinkageRule::ALL {
        let report = verify_bounds(&src, k, rule)?;
        println!("{rule}: cut {}", report.cut);
        print!("{}", report.render_table());
        println!();
    }

    let nonmetric = gen_nonmetric(12)?;
    let report = verify_bounds(&nonmetric.source, 2, LinkageRule::Average)?;
    println!("non-metric instance, cut {}", report.cut);
    print!("{}", report.render_table());
    Ok(())
}

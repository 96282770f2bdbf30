//! Scores the cuts of each linkage rule on every criterion and prints the
//! hierarchy cost of each tree.
//!
//!     cargo run --example criteria_report

use avglink::criteria::{ckmm_cost, format_value, Criterion, CriteriaReport};
use avglink::linkage::{build, Engine};
use avglink::{DistanceSource, LinkageRule, Norm};

fn main() -> avglink::Result<()> {
    // an evenly spaced chain, a tight pair and a loose trio
    let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 7.5, 7.8, 11.0, 12.6, 14.0];
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
    let src = DistanceSource::from_features(&rows, Norm::L1)?.with_name("line");

    let criteria = Criterion::CLUSTERING;
    print!("{:<9} {:>2}", "method", "k");
    for c in criteria {
        print!(" {:>12}", c.name());
    }
    println!();
    for rule in LinkageRule::ALL {
        let d = build(&src, rule, Engine::NnChain)?;
        for k in 2..=4 {
            let report = CriteriaReport::for_cut(&d, k, &src, rule.to_string(), &criteria)?;
            print!("{:<9} {k:>2}", report.method);
            for &(_, v) in report.values() {
                print!(" {:>12}", format_value((v * 1e4).round() / 1e4));
            }
            println!();
        }
    }
    println!();
    for rule in LinkageRule::ALL {
        let d = build(&src, rule, Engine::NnChain)?;
        println!("{rule} hierarchy cost (ckmm): {}", ckmm_cost(&d, &src)?);
    }
    Ok(())
}

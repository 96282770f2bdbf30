//! Random top-down hierarchies against average linkage on an input with
//! one far point: how often does each put the far point in a shared block?
//!
//!     cargo run --example random_hierarchy -- [seeds]

use avglink::criteria::ckmm_cost;
use avglink::instances::gen_random_bad;
use avglink::linkage::{build, random_hierarchy_with_order, Engine};
use avglink::LinkageRule;

fn main() -> avglink::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let bundle = gen_random_bad(21, 500.0)?;
    let src = &bundle.source;
    let z = bundle.group("z").expect("far point")[0];
    let n = src.n();

    let (d, order) = random_hierarchy_with_order(n, 0)?;
    println!("seed 0 order: {order:?}");
    println!("seed 0 5-cut: {}\n", d.cut(5)?);

    let al = build(src, LinkageRule::Average, Engine::NnChain)?;
    let al_cost = ckmm_cost(&al, src)?;
    for k in [2, 3, 5, 8] {
        let mut shared = 0;
        let mut cost = 0.0;
        for seed in 0..seeds {
            let (d, _) = random_hierarchy_with_order(n, seed)?;
            let c = d.cut(k)?;
            shared += usize::from(c.labels().iter().filter(|&&l| l == c.label(z)).count() > 1);
            cost += ckmm_cost(&d, src)?;
        }
        let al_cut = al.cut(k)?;
        let al_shared = al_cut.labels().iter().filter(|&&l| l == al_cut.label(z)).count() > 1;
        println!(
            "k = {k}: far point shared in {:.1}% of random {k}-cuts; average-link shares it: {al_shared}",
            100.0 * shared as f64 / seeds as f64
        );
        if k == 2 {
            println!("        ckmm (higher is better): random mean {:.1}, average-link {al_cost:.1}", cost / seeds as f64);
        }
    }
    Ok(())
}

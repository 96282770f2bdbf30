use super::{Dendrogram, LinkageRule, Merge};
use crate::error::{Error, Result};
use crate::metric::{condensed_index, DistanceSource};

/// Nearest-neighbor-chain engine, `O(n^2)` time on a private working copy
/// of the condensed matrix.
///
/// Cross distances to a merged cluster are maintained by
/// [`LinkageRule::merged_distance`]. Merges are discovered out of order, so
/// they are re-sequenced by a stable sort on the larger of each merge's
/// height and its children's keys, which keeps every child ahead of its
/// parent even when average-linkage heights invert.
pub fn build_nnchain(src: &DistanceSource, rule: LinkageRule) -> Result<Dendrogram> {
    let n = src.n();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut d = src.condensed();
    let at = |a: usize, b: usize| if a < b { condensed_index(n, a, b) } else { condensed_index(n, b, a) };
    let mut size = vec![1usize; n];
    let mut live: Vec<usize> = (0..n).collect();
    // Index into `found` of the merge that last produced the cluster in each slot.
    let mut produced_by: Vec<Option<usize>> = vec![None; n];
    // (slot a, slot b, height, sort key); the merged cluster stays in slot b.
    let mut found: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::with_capacity(n);

    while live.len() > 1 {
        if chain.is_empty() {
            chain.push(live[0]);
        }
        let (a, b, height) = loop {
            let a = chain[chain.len() - 1];
            let prev = chain.len().checked_sub(2).map(|p| chain[p]);
            let mut best = prev.map(|p| (p, d[at(a, p)]));
            for &x in &live {
                if x == a {
                    continue;
                }
                let v = d[at(a, x)];
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((x, v));
                }
            }
            let (b, v) = best.expect("at least two live clusters");
            if Some(b) == prev {
                break (a, b, v);
            }
            chain.push(b);
        };
        chain.truncate(chain.len() - 2);

        let key = [produced_by[a], produced_by[b]]
            .into_iter()
            .flatten()
            .map(|m| found[m].3)
            .fold(height, f64::max);
        produced_by[b] = Some(found.len());
        found.push((a, b, height, key));

        live.retain(|&s| s != a);
        for &x in &live {
            if x != b {
                d[at(b, x)] = rule.merged_distance(d[at(a, x)], d[at(b, x)], size[a], size[b]);
            }
        }
        size[b] += size[a];
    }

    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&p, &q| found[p].3.total_cmp(&found[q].3));

    let mut id_of_slot: Vec<usize> = (0..n).collect();
    let mut size_of_slot = vec![1usize; n];
    let mut merges = Vec::with_capacity(found.len());
    for (t, &m) in order.iter().enumerate() {
        let (a, b, height, _) = found[m];
        let (ia, ib) = (id_of_slot[a], id_of_slot[b]);
        let merged = size_of_slot[a] + size_of_slot[b];
        merges.push(Merge { left: ia.min(ib), right: ia.max(ib), height, size: merged });
        id_of_slot[b] = n + t;
        size_of_slot[b] = merged;
    }
    Ok(Dendrogram::from_trusted(n, merges))
}

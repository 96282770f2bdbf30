use std::borrow::Cow;

use super::{Dendrogram, LinkageRule, Merge, TieBreak};
use crate::error::{Error, Result};
use crate::metric::{condensed_index, DistanceSource};

/// Greedy merge loop that scans every live pair at every step.
///
/// Rule distances involving a freshly merged cluster are recomputed from
/// the point distances (average linkage) or by min/max of the parents'
/// rows (single and complete linkage, where that is exact), so each height
/// is the exact rule distance of the pair merged. `O(n^3)` time.
pub fn build_naive(src: &DistanceSource, rule: LinkageRule, tb: TieBreak) -> Result<Dendrogram> {
    let n = src.n();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let src: Cow<'_, DistanceSource> =
        if src.is_feature_backed() { Cow::Owned(src.materialize()) } else { Cow::Borrowed(src) };
    let src = src.as_ref();

    let mut d = src.condensed();
    let at = |a: usize, b: usize| if a < b { condensed_index(n, a, b) } else { condensed_index(n, b, a) };
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut ids: Vec<usize> = (0..n).collect();
    let mut live: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for t in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize)> = None;
        for (p, &a) in live.iter().enumerate() {
            for &b in &live[p + 1..] {
                let v = d[at(a, b)];
                let better = match best {
                    None => true,
                    Some((bv, ba, bb)) => {
                        v < bv
                            || (v == bv
                                && tb == TieBreak::LexMinId
                                && id_key(ids[a], ids[b]) < id_key(ids[ba], ids[bb]))
                    }
                };
                if better {
                    best = Some((v, a, b));
                }
            }
        }
        let (height, keep, gone) = best.expect("at least two live clusters");

        let (sa, sb) = (members[keep].len(), members[gone].len());
        let (left, right) = id_key(ids[keep], ids[gone]);
        merges.push(Merge { left, right, height, size: sa + sb });

        let moved = std::mem::take(&mut members[gone]);
        let mut joined = Vec::with_capacity(sa + sb);
        merge_sorted(&members[keep], &moved, &mut joined);
        members[keep] = joined;
        ids[keep] = n + t;
        live.retain(|&s| s != gone);

        for &x in &live {
            if x == keep {
                continue;
            }
            d[at(keep, x)] = match rule {
                LinkageRule::Average => rule.distance(src, &members[keep], &members[x]),
                LinkageRule::Single => d[at(keep, x)].min(d[at(gone, x)]),
                LinkageRule::Complete => d[at(keep, x)].max(d[at(gone, x)]),
            };
        }
    }
    Ok(Dendrogram::from_trusted(n, merges))
}

fn id_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn merge_sorted(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(xs: &[f64]) -> DistanceSource {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        DistanceSource::from_features(&rows, Norm::L1).unwrap()
    }

    #[test]
    fn line_013_average() {
        let d = build_naive(&line(&[0.0, 1.0, 3.0]), LinkageRule::Average, TieBreak::LexMinId).unwrap();
        let m = d.merges();
        assert_eq!((m[0].left, m[0].right, m[0].height, m[0].size), (0, 1, 1.0, 2));
        assert_eq!((m[1].left, m[1].right, m[1].height, m[1].size), (2, 3, 2.5, 3));
        assert_eq!(d.cut(2).unwrap().to_string(), "{0,1}|{2}");
    }

    #[test]
    fn two_points_any_rule() {
        let src = DistanceSource::from_condensed(2, vec![4.5]).unwrap();
        for rule in LinkageRule::ALL {
            let d = build_naive(&src, rule, TieBreak::FirstFound).unwrap();
            assert_eq!(d.merges()[0].height, 4.5);
        }
    }

    #[test]
    fn empty_rejected_singleton_trivial() {
        let empty = DistanceSource::from_condensed(0, vec![]).unwrap();
        assert!(build_naive(&empty, LinkageRule::Single, TieBreak::LexMinId).is_err());
        let one = DistanceSource::from_condensed(1, vec![]).unwrap();
        assert!(build_naive(&one, LinkageRule::Average, TieBreak::LexMinId).unwrap().merges().is_empty());
    }

    #[test]
    fn tie_breaks_differ_on_equal_distances() {
        // Four points where every distance is 1: lex merges (0,1), then (2,3)
        // because ids 2 and 3 are smaller than the new id 4.
        let src = DistanceSource::from_condensed(4, vec![1.0; 6]).unwrap();
        let lex = build_naive(&src, LinkageRule::Single, TieBreak::LexMinId).unwrap();
        let ids: Vec<(usize, usize)> = lex.merges().iter().map(|m| (m.left, m.right)).collect();
        assert_eq!(ids, vec![(0, 1), (2, 3), (4, 5)]);
        // First-found keeps {0,1} in slot 0 and pairs it with slot 2 next.
        let ff = build_naive(&src, LinkageRule::Single, TieBreak::FirstFound).unwrap();
        let ids: Vec<(usize, usize)> = ff.merges().iter().map(|m| (m.left, m.right)).collect();
        assert_eq!(ids, vec![(0, 1), (2, 4), (3, 5)]);
    }

    #[test]
    fn complete_and_single_heights() {
        let src = line(&[0.0, 1.0, 3.0, 7.0]);
        let s: Vec<f64> = build_naive(&src, LinkageRule::Single, TieBreak::LexMinId).unwrap().heights().collect();
        assert_eq!(s, vec![1.0, 2.0, 4.0]);
        let c: Vec<f64> = build_naive(&src, LinkageRule::Complete, TieBreak::LexMinId).unwrap().heights().collect();
        assert_eq!(c, vec![1.0, 3.0, 7.0]);
    }
}

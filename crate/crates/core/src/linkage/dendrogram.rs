use std::fmt::Write as _;
use std::path::Path;

use super::Clustering;
use crate::error::{Error, Result};

/// One agglomeration step. Merge `t` of an `n`-leaf hierarchy creates
/// cluster id `n + t`; ids below `n` are leaves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// The full hierarchy as an ordered list of `n - 1` merges.
#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

pub const CSV_HEADER: &str = "step,left_id,right_id,new_id,height,size";

impl Dendrogram {
    /// Validates and wraps a merge list.
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if merges.len() != n - 1 {
            return Err(Error::SizeMismatch { expected: n - 1, got: merges.len() });
        }
        let mut size = vec![1usize; 2 * n - 1];
        let mut used = vec![false; 2 * n - 1];
        for (t, m) in merges.iter().enumerate() {
            let new_id = n + t;
            for child in [m.left, m.right] {
                if child >= new_id {
                    return Err(Error::InvalidArgument(format!(
                        "merge {t} refers to cluster {child} before it exists"
                    )));
                }
                if used[child] {
                    return Err(Error::InvalidArgument(format!("cluster {child} merged twice")));
                }
                used[child] = true;
            }
            if m.left == m.right {
                return Err(Error::InvalidArgument(format!("merge {t} joins {} with itself", m.left)));
            }
            size[new_id] = size[m.left] + size[m.right];
            if m.size != size[new_id] {
                return Err(Error::InvalidArgument(format!(
                    "merge {t} records size {}, children give {}",
                    m.size, size[new_id]
                )));
            }
            if m.height.is_nan() {
                return Err(Error::InvalidArgument(format!("merge {t} has NaN height")));
            }
        }
        Ok(Dendrogram { n, merges })
    }

    pub(crate) fn from_trusted(n: usize, merges: Vec<Merge>) -> Self {
        debug_assert!(Self::new(n, merges.clone()).is_ok());
        Dendrogram { n, merges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }

    pub fn root_id(&self) -> usize {
        2 * self.n - 2
    }

    /// The `k`-clustering of the recorded execution: the last `k - 1`
    /// merges are undone.
    pub fn cut(&self, k: usize) -> Result<Clustering> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        // Every cluster id maps to a leaf representative in a union-find.
        let mut parent: Vec<usize> = (0..n).collect();
        let mut rep: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for m in &self.merges[..n - k] {
            let a = find(&mut parent, rep[m.left]);
            let b = find(&mut parent, rep[m.right]);
            parent[b] = a;
            rep.push(a);
        }
        let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        let mut canon = vec![usize::MAX; n];
        let mut next = 0;
        let labels = roots
            .iter()
            .map(|&r| {
                if canon[r] == usize::MAX {
                    canon[r] = next;
                    next += 1;
                }
                canon[r]
            })
            .collect();
        Ok(Clustering::from_canonical(labels, next))
    }

    /// Every cut from `k = n` down to `k = 1`.
    pub fn all_cuts(&self) -> Vec<Clustering> {
        (1..=self.n).rev().map(|k| self.cut(k).expect("k in range")).collect()
    }

    /// Serializes as `step,left_id,right_id,new_id,height,size` lines with a
    /// header. Heights use the shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.merges.len() + 48);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (t, m) in self.merges.iter().enumerate() {
            let _ = writeln!(out, "{t},{},{},{},{:?},{}", m.left, m.right, self.n + t, m.height, m.size);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses [`to_csv`](Self::to_csv) output. The leaf count is recovered
    /// from the merge count.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::parse(None, format!("expected header {CSV_HEADER:?}"))),
        }
        let mut merges = Vec::new();
        let mut new_ids = Vec::new();
        for (t, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != 6 {
                return Err(Error::parse(None, format!("line {}: expected 6 fields", t + 2)));
            }
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::parse(None, format!("line {}: {e}", t + 2)))
            };
            if int(cells[0])? != t {
                return Err(Error::parse(None, format!("line {}: steps out of order", t + 2)));
            }
            let height = cells[4]
                .parse::<f64>()
                .map_err(|e| Error::parse(None, format!("line {}: {e}", t + 2)))?;
            merges.push(Merge { left: int(cells[1])?, right: int(cells[2])?, height, size: int(cells[5])? });
            new_ids.push(int(cells[3])?);
        }
        let n = merges.len() + 1;
        if new_ids.iter().enumerate().any(|(t, &id)| id != n + t) {
            return Err(Error::parse(None, "new_id column does not match n + step"));
        }
        Dendrogram::new(n, merges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_leaf() -> Dendrogram {
        Dendrogram::new(
            3,
            vec![
                Merge { left: 0, right: 1, height: 1.0, size: 2 },
                Merge { left: 3, right: 2, height: 2.5, size: 3 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn cut_bounds() {
        let d = three_leaf();
        assert_eq!(d.cut(3).unwrap().k(), 3);
        assert_eq!(d.cut(2).unwrap().to_string(), "{0,1}|{2}");
        assert_eq!(d.cut(1).unwrap().to_string(), "{0,1,2}");
        assert!(matches!(d.cut(0), Err(Error::KOutOfRange { .. })));
        assert!(d.cut(4).is_err());
        assert_eq!(d.root_id(), 4);
    }

    #[test]
    fn single_leaf() {
        let d = Dendrogram::new(1, vec![]).unwrap();
        assert_eq!(d.cut(1).unwrap().k(), 1);
    }

    #[test]
    fn rejects_malformed() {
        let m = |l, r, s| Merge { left: l, right: r, height: 0.0, size: s };
        assert!(Dendrogram::new(3, vec![m(0, 1, 2)]).is_err());
        assert!(Dendrogram::new(3, vec![m(0, 1, 2), m(0, 2, 2)]).is_err());
        assert!(Dendrogram::new(3, vec![m(0, 1, 2), m(3, 2, 4)]).is_err());
        assert!(Dendrogram::new(3, vec![m(0, 4, 2), m(3, 2, 3)]).is_err());
        assert!(Dendrogram::new(0, vec![]).is_err());
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mut d = three_leaf();
        d.merges[1].height = 0.1 + 0.2;
        let text = d.to_csv();
        assert!(text.starts_with("step,left_id,right_id,new_id,height,size\n0,0,1,3,1.0,2\n"));
        assert_eq!(Dendrogram::from_csv(&text).unwrap(), d);
        assert!(Dendrogram::from_csv("0,0,1,3,1.0,2\n").is_err());
    }
}

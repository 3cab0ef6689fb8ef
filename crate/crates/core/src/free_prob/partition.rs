//! Non-crossing partitions and pairings of `{0, .., n-1}`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_nc`].
pub const MAX_ENUMERATION: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcKind {
    Pairings,
    Partitions,
}

/// A non-crossing partition with zero-based elements. Blocks are sorted
/// internally and ordered by their smallest element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NonCrossingPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NonCrossingPartition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidInput("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e >= n || seen[e] {
                    return Err(Error::InvalidInput(format!("element {e} out of range or repeated")));
                }
                seen[e] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("blocks do not cover the ground set".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let p = NonCrossingPartition { n, blocks };
        if crossing_pair(&p.blocks).is_some() {
            return Err(Error::InvalidInput("blocks cross".into()));
        }
        Ok(p)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn is_one_block(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }
}

impl fmt::Debug for NonCrossingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.blocks.iter()).finish()
    }
}

/// Indices of two blocks containing `a < b < c < d` with `a, c` in the
/// first and `b, d` in the second.
pub(crate) fn crossing_pair(blocks: &[Vec<usize>]) -> Option<(usize, usize)> {
    for (i, p) in blocks.iter().enumerate() {
        for (j, q) in blocks.iter().enumerate() {
            if i == j {
                continue;
            }
            for w in p.windows(2) {
                let (a, c) = (w[0], w[1]);
                let inside = q.iter().any(|&b| a < b && b < c);
                let outside = q.iter().any(|&d| d > c || d < a);
                if inside && outside {
                    return Some((i, j));
                }
            }
        }
    }
    None
}

/// All non-crossing partitions (or pairings) of `{0, .., n-1}`, in a fixed order.
pub fn enumerate_nc(kind: NcKind, n: usize) -> Result<Vec<NonCrossingPartition>> {
    if n > MAX_ENUMERATION {
        return Err(Error::SizeLimit { size: n, limit: MAX_ENUMERATION });
    }
    if kind == NcKind::Pairings && n % 2 == 1 {
        return Ok(Vec::new());
    }
    let raw = fill(kind, 0, n);
    Ok(raw
        .into_iter()
        .map(|mut blocks| {
            blocks.sort_unstable_by_key(|b| b[0]);
            NonCrossingPartition { n, blocks }
        })
        .collect())
}

/// Non-crossing block systems of the interval `lo..hi`.
fn fill(kind: NcKind, lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // choose the block containing `lo`; the gaps it leaves are filled independently
    let rest: Vec<usize> = (lo + 1..hi).collect();
    let max_extra = match kind {
        NcKind::Pairings => 1,
        NcKind::Partitions => rest.len(),
    };
    for extra in subsets_up_to(&rest, max_extra) {
        if kind == NcKind::Pairings && extra.len() != 1 {
            continue;
        }
        let mut block = vec![lo];
        block.extend(&extra);
        let mut gaps = Vec::new();
        for w in block.windows(2) {
            gaps.push((w[0] + 1, w[1]));
        }
        gaps.push((block[block.len() - 1] + 1, hi));
        if kind == NcKind::Pairings && gaps.iter().any(|(a, b)| (b - a) % 2 == 1) {
            continue;
        }
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for (a, b) in gaps {
            let fills = fill(kind, a, b);
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    fills.iter().map(move |f| {
                        let mut q = p.clone();
                        q.extend(f.iter().cloned());
                        q
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Subsets of `items` (kept in increasing order) with at most `max` elements.
fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in items {
        let extended: Vec<Vec<usize>> = out.iter().filter(|s| s.len() < max).map(|s| {
            let mut t = s.clone();
            t.push(x);
            t
        }).collect();
        out.extend(extended);
    }
    out
}

pub fn catalan(k: usize) -> u64 {
    // C_{k+1} = C_k * 2(2k+1) / (k+2)
    (0..k).fold(1u64, |c, i| c * 2 * (2 * i as u64 + 1) / (i as u64 + 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute-force oracle: every set partition, filtered by the crossing test.
    fn brute_force(n: usize) -> Vec<Vec<Vec<usize>>> {
        fn go(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for b in 0..cur.len() {
                cur[b].push(i);
                go(i + 1, n, cur, out);
                cur[b].pop();
            }
            cur.push(vec![i]);
            go(i + 1, n, cur, out);
            cur.pop();
        }
        let mut out = Vec::new();
        go(0, n, &mut Vec::new(), &mut out);
        out.into_iter().filter(|p| crossing_pair(p).is_none()).collect()
    }

    fn canonical(p: &NonCrossingPartition) -> Vec<Vec<usize>> {
        p.blocks().to_vec()
    }

    #[test]
    fn pairings_of_four() {
        let ps = enumerate_nc(NcKind::Pairings, 4).unwrap();
        let got: HashSet<_> = ps.iter().map(canonical).collect();
        let expected: HashSet<_> = [vec![vec![0, 1], vec![2, 3]], vec![vec![0, 3], vec![1, 2]]].into_iter().collect();
        assert_eq!(got, expected);
        // the third pairing crosses
        assert!(crossing_pair(&[vec![0, 2], vec![1, 3]]).is_some());
        assert!(NonCrossingPartition::new(4, vec![vec![0, 2], vec![1, 3]]).is_err());
    }

    #[test]
    fn partitions_of_three_and_one() {
        assert_eq!(enumerate_nc(NcKind::Partitions, 3).unwrap().len(), 5);
        let one = enumerate_nc(NcKind::Partitions, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].blocks(), &[vec![0]]);
    }

    #[test]
    fn matches_brute_force() {
        for n in 0..=8 {
            let got: HashSet<_> = enumerate_nc(NcKind::Partitions, n).unwrap().iter().map(canonical).collect();
            let mut expected: HashSet<Vec<Vec<usize>>> = HashSet::new();
            for mut p in brute_force(n) {
                p.sort_unstable_by_key(|b| b[0]);
                expected.insert(p);
            }
            assert_eq!(got, expected, "n = {n}");
            let all = enumerate_nc(NcKind::Partitions, n).unwrap();
            assert_eq!(all.len(), got.len(), "duplicates at n = {n}");
        }
    }

    #[test]
    fn catalan_counts() {
        let known = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012];
        for (k, &c) in known.iter().enumerate() {
            assert_eq!(catalan(k), c);
        }
        for n in 0..=10 {
            assert_eq!(enumerate_nc(NcKind::Partitions, n).unwrap().len() as u64, catalan(n));
        }
        for k in 0..=6 {
            let ps = enumerate_nc(NcKind::Pairings, 2 * k).unwrap();
            assert_eq!(ps.len() as u64, catalan(k));
            assert!(ps.iter().all(NonCrossingPartition::is_pairing));
        }
        assert!(enumerate_nc(NcKind::Pairings, 5).unwrap().is_empty());
    }

    #[test]
    fn size_limit() {
        assert_eq!(
            enumerate_nc(NcKind::Partitions, 13),
            Err(Error::SizeLimit { size: 13, limit: MAX_ENUMERATION })
        );
    }
}

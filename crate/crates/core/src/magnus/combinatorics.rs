use crate::{Error, Result};

/// A bijection on `{1, …, k}` stored as its image sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        let mut seen = vec![false; k + 1];
        for &v in &image {
            if v == 0 || v > k || seen[v] {
                return Err(Error::Guard(format!("{image:?} is not a permutation of 1..{k}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(k: usize) -> Self {
        Permutation {
            image: (1..=k).collect(),
        }
    }

    /// All permutations of `1..=k` in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (1..=k).collect();
        let mut out = vec![Permutation {
            image: current.clone(),
        }];
        while next_lexicographic(&mut current) {
            out.push(Permutation {
                image: current.clone(),
            });
        }
        out
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `π(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1]
    }

    /// Number of positions with `π(i) > π(i+1)`.
    pub fn descents(&self) -> usize {
        self.image.windows(2).filter(|w| w[0] > w[1]).count()
    }

    /// Number of positions with `π(i) < π(i+1)`.
    pub fn ascents(&self) -> usize {
        self.image.windows(2).filter(|w| w[0] < w[1]).count()
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Strictly decreasing `k`-tuples `M−1 ≥ i_1 > … > i_k ≥ 0`, in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct OrderedTuples {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for OrderedTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        self.current = advance(&out, self.m);
        Some(out)
    }
}

/// Next tuple in lexicographic order. Position `j` (0-based) must stay at
/// least `k−1−j` and strictly below position `j−1` (or `M` for `j = 0`).
fn advance(t: &[usize], m: usize) -> Option<Vec<usize>> {
    let k = t.len();
    for j in (0..k).rev() {
        let upper = if j == 0 { m } else { t[j - 1] };
        if t[j] + 1 < upper {
            let mut next = t.to_vec();
            next[j] += 1;
            for (offset, slot) in next[j + 1..].iter_mut().enumerate() {
                *slot = k - 2 - j - offset;
            }
            return Some(next);
        }
    }
    None
}

/// Iterates the `C(M, k)` strictly decreasing tuples; empty when `k > M`.
pub fn ordered_tuples(m: usize, k: usize) -> OrderedTuples {
    let current = (k <= m).then(|| (0..k).rev().collect());
    OrderedTuples { m, current }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn descent_examples() {
        assert_eq!(perm(&[1, 2, 3]).descents(), 0);
        assert_eq!(perm(&[3, 1, 2]).descents(), 1);
        assert_eq!(perm(&[3, 2, 1]).descents(), 2);
        assert_eq!(perm(&[3, 1, 2]).ascents(), 1);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
    }

    #[test]
    fn enumerates_all_permutations_in_order() {
        let all = Permutation::all(3);
        let images: Vec<_> = all.iter().map(|p| p.image().to_vec()).collect();
        assert_eq!(
            images,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
        assert_eq!(Permutation::all(5).len(), 120);
        assert_eq!(Permutation::all(1).len(), 1);
    }

    #[test]
    fn tuple_examples() {
        let t: Vec<_> = ordered_tuples(3, 2).collect();
        assert_eq!(t, vec![vec![1, 0], vec![2, 0], vec![2, 1]]);
        let t: Vec<_> = ordered_tuples(4, 4).collect();
        assert_eq!(t, vec![vec![3, 2, 1, 0]]);
        assert_eq!(ordered_tuples(4, 2).count(), 6);
        assert_eq!(ordered_tuples(2, 3).count(), 0);
    }

    #[test]
    fn tuple_counts_match_brute_force() {
        for m in 1usize..=7 {
            for k in 1..=m {
                let brute = (0..m.pow(k as u32))
                    .filter(|&code| {
                        let digits: Vec<usize> =
                            (0..k).map(|j| code / m.pow((k - 1 - j) as u32) % m).collect();
                        digits.windows(2).all(|w| w[0] > w[1])
                    })
                    .count();
                let tuples: Vec<_> = ordered_tuples(m, k).collect();
                assert_eq!(tuples.len(), brute, "M={m} k={k}");
                assert!(tuples.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
                assert!(tuples.iter().all(|t| t.windows(2).all(|w| w[0] > w[1])));
            }
        }
    }
}

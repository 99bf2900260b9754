//! Minimum set cover by branch and bound.

use fixedbitset::FixedBitSet;

use crate::budget::Budget;
use crate::error::{Error, Result};

/// A chosen subfamily of candidates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSolution {
    /// Indices into the candidate list, ascending.
    pub chosen: Vec<usize>,
    /// `false` when the search budget ran out before optimality was proved.
    pub optimal: bool,
}

impl CoverSolution {
    pub fn size(&self) -> usize {
        self.chosen.len()
    }
}

fn check_coverable(universe: usize, candidates: &[FixedBitSet]) -> Result<()> {
    let mut all = FixedBitSet::with_capacity(universe);
    for c in candidates {
        all.union_with(c);
    }
    if all.count_ones(..universe) < universe {
        return Err(Error::Infeasible);
    }
    Ok(())
}

/// Repeatedly takes the candidate covering most uncovered elements (lowest
/// index on ties).
pub fn greedy_cover(universe: usize, candidates: &[FixedBitSet]) -> Result<CoverSolution> {
    check_coverable(universe, candidates)?;
    let mut uncovered = FixedBitSet::with_capacity(universe);
    uncovered.insert_range(..universe);
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (best, _) = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.intersection(&uncovered).count()))
            .fold((usize::MAX, 0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        uncovered.difference_with(&candidates[best]);
        chosen.push(best);
    }
    chosen.sort_unstable();
    Ok(CoverSolution { chosen, optimal: false })
}

struct Search<'a> {
    candidates: &'a [FixedBitSet],
    covering: Vec<Vec<usize>>,
    max_size: usize,
    best: Vec<usize>,
    nodes: usize,
    budget: &'a Budget,
    exhausted: bool,
}

impl Search<'_> {
    fn run(&mut self, uncovered: &FixedBitSet, current: &mut Vec<usize>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes || (self.nodes.is_multiple_of(1024) && self.budget.expired()) {
            self.exhausted = true;
            return;
        }
        let remaining = uncovered.count_ones(..);
        if remaining == 0 {
            if current.len() < self.best.len() {
                self.best = current.clone();
            }
            return;
        }
        let lower = current.len() + remaining.div_ceil(self.max_size.max(1));
        if lower >= self.best.len() {
            return;
        }
        // element with the fewest covering candidates, lowest index on ties
        let mut pick = usize::MAX;
        let mut fewest = usize::MAX;
        for e in uncovered.ones() {
            let c = self.covering[e].len();
            if c < fewest {
                fewest = c;
                pick = e;
            }
        }
        for idx in 0..self.covering[pick].len() {
            let cand = self.covering[pick][idx];
            let mut next = uncovered.clone();
            next.difference_with(&self.candidates[cand]);
            current.push(cand);
            self.run(&next, current);
            current.pop();
        }
    }
}

/// Minimum-cardinality subfamily of `candidates` covering `0..universe`.
/// When the node budget runs out the best cover found so far (at worst the
/// greedy one) is returned with `optimal == false`.
pub fn exact_min_cover(universe: usize, candidates: &[FixedBitSet], budget: &Budget) -> Result<CoverSolution> {
    let greedy = greedy_cover(universe, candidates)?;
    let mut covering = vec![Vec::new(); universe];
    for (i, c) in candidates.iter().enumerate() {
        for e in c.ones().take_while(|&e| e < universe) {
            covering[e].push(i);
        }
    }
    let max_size = candidates.iter().map(|c| c.count_ones(..)).max().unwrap_or(0);
    let mut search = Search {
        candidates,
        covering,
        max_size,
        best: greedy.chosen.clone(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    let mut uncovered = FixedBitSet::with_capacity(universe);
    uncovered.insert_range(..universe);
    search.run(&uncovered, &mut Vec::new());
    let mut chosen = search.best;
    chosen.sort_unstable();
    Ok(CoverSolution {
        chosen,
        optimal: !search.exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, xs: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &x in xs {
            b.insert(x);
        }
        b
    }

    fn brute_force(universe: usize, candidates: &[FixedBitSet]) -> usize {
        let mut best = usize::MAX;
        for mask in 0u32..(1 << candidates.len()) {
            let mut u = FixedBitSet::with_capacity(universe);
            for (i, c) in candidates.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    u.union_with(c);
                }
            }
            if u.count_ones(..) == universe {
                best = best.min(mask.count_ones() as usize);
            }
        }
        best
    }

    #[test]
    fn small_cases() {
        let b = Budget::default();
        let one = exact_min_cover(3, &[set(3, &[0]), set(3, &[0, 1, 2])], &b).unwrap();
        assert_eq!(one.chosen, vec![1]);
        assert!(one.optimal);
        let tri = [set(3, &[0, 1]), set(3, &[1, 2]), set(3, &[0, 2])];
        assert_eq!(exact_min_cover(3, &tri, &b).unwrap().size(), 2);
        assert_eq!(exact_min_cover(3, &[set(3, &[0])], &b).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn greedy_is_not_always_optimal() {
        // the large middle set lures greedy into three picks
        let cands = [
            set(6, &[0, 1, 2]),
            set(6, &[3, 4, 5]),
            set(6, &[0, 3]),
            set(6, &[1, 2, 4, 5]),
        ];
        let g = greedy_cover(6, &cands).unwrap();
        let e = exact_min_cover(6, &cands, &Budget::default()).unwrap();
        assert_eq!(e.size(), 2);
        assert!(g.size() >= e.size());
    }

    #[test]
    fn matches_brute_force_on_pseudorandom_families() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let universe = rng.gen_range(1..9);
            let n = rng.gen_range(1..9);
            let cands: Vec<FixedBitSet> = (0..n)
                .map(|_| {
                    let xs: Vec<usize> = (0..universe).filter(|_| rng.gen_bool(0.4)).collect();
                    set(universe, &xs)
                })
                .collect();
            let expected = brute_force(universe, &cands);
            match exact_min_cover(universe, &cands, &Budget::default()) {
                Ok(sol) => {
                    assert_eq!(sol.size(), expected);
                    let mut u = FixedBitSet::with_capacity(universe);
                    for &i in &sol.chosen {
                        u.union_with(&cands[i]);
                    }
                    assert_eq!(u.count_ones(..), universe);
                }
                Err(_) => assert_eq!(expected, usize::MAX),
            }
        }
    }
}

//! Extension of partial maps to order-preserving maps.
//!
//! A variable per point of a (virtual) domain poset takes values in a target
//! poset; every listed pair `(lo, hi)` demands `value(lo) <= value(hi)`.
//! Arc consistency over these binary constraints plus smallest-domain-first
//! backtracking decides existence exactly.

use crate::budget::Budget;
use crate::poset::FinitePoset;

pub(crate) enum ExtensionOutcome {
    Solved(Vec<usize>),
    Infeasible,
    Unknown,
}

pub(crate) struct ExtensionProblem<'a> {
    target: &'a FinitePoset,
    words: usize,
    n_vars: usize,
    /// Per variable: (neighbour, neighbour is the upper end).
    adj: Vec<Vec<(usize, bool)>>,
    down_masks: Vec<u64>,
    up_masks: Vec<u64>,
}

impl<'a> ExtensionProblem<'a> {
    pub(crate) fn new(target: &'a FinitePoset, n_vars: usize, constraints: &[(usize, usize)]) -> Self {
        let t = target.len();
        let words = t.div_ceil(64).max(1);
        let mut down_masks = vec![0u64; t * words];
        let mut up_masks = vec![0u64; t * words];
        for a in 0..t {
            for b in target.down_bits(a).ones() {
                down_masks[a * words + b / 64] |= 1 << (b % 64);
            }
            for b in target.up_bits(a).ones() {
                up_masks[a * words + b / 64] |= 1 << (b % 64);
            }
        }
        let mut adj = vec![Vec::new(); n_vars];
        for &(lo, hi) in constraints {
            if lo != hi {
                adj[lo].push((hi, true));
                adj[hi].push((lo, false));
            }
        }
        ExtensionProblem {
            target,
            words,
            n_vars,
            adj,
            down_masks,
            up_masks,
        }
    }

    pub(crate) fn solve(&self, fixed: &[Option<usize>], budget: &Budget) -> ExtensionOutcome {
        let w = self.words;
        let t = self.target.len();
        let mut full = vec![0u64; w];
        for b in 0..t {
            full[b / 64] |= 1 << (b % 64);
        }
        let mut dom = vec![0u64; self.n_vars * w];
        for v in 0..self.n_vars {
            match fixed[v] {
                Some(val) => dom[v * w + val / 64] = 1 << (val % 64),
                None => dom[v * w..(v + 1) * w].copy_from_slice(&full),
            }
        }
        let all: Vec<usize> = (0..self.n_vars).collect();
        if !self.propagate(&mut dom, &all) {
            return ExtensionOutcome::Infeasible;
        }
        let mut nodes = 0usize;
        match self.search(&mut dom, &mut nodes, budget) {
            Some(true) => {
                let sol = (0..self.n_vars)
                    .map(|v| first_bit(&dom[v * w..(v + 1) * w]).unwrap())
                    .collect();
                ExtensionOutcome::Solved(sol)
            }
            Some(false) => ExtensionOutcome::Infeasible,
            None => ExtensionOutcome::Unknown,
        }
    }

    fn search(&self, dom: &mut Vec<u64>, nodes: &mut usize, budget: &Budget) -> Option<bool> {
        let w = self.words;
        let mut best: Option<(usize, u32)> = None;
        for v in 0..self.n_vars {
            let c: u32 = dom[v * w..(v + 1) * w].iter().map(|x| x.count_ones()).sum();
            if c > 1 && best.is_none_or(|(_, bc)| c < bc) {
                best = Some((v, c));
                if c == 2 {
                    break;
                }
            }
        }
        let Some((var, _)) = best else {
            return Some(true);
        };
        let values: Vec<usize> = ones(&dom[var * w..(var + 1) * w]).collect();
        for val in values {
            *nodes += 1;
            if *nodes > budget.max_nodes || ((*nodes).is_multiple_of(1024) && budget.expired()) {
                return None;
            }
            let mut trial = dom.clone();
            trial[var * w..(var + 1) * w].iter_mut().for_each(|x| *x = 0);
            trial[var * w + val / 64] = 1 << (val % 64);
            if self.propagate(&mut trial, &[var]) {
                match self.search(&mut trial, nodes, budget) {
                    Some(true) => {
                        *dom = trial;
                        return Some(true);
                    }
                    Some(false) => {}
                    None => return None,
                }
            }
        }
        Some(false)
    }

    fn propagate(&self, dom: &mut [u64], start: &[usize]) -> bool {
        let w = self.words;
        let mut queue: Vec<usize> = start.to_vec();
        let mut queued = vec![false; self.n_vars];
        for &v in start {
            queued[v] = true;
        }
        let mut reach = vec![0u64; w];
        while let Some(u) = queue.pop() {
            queued[u] = false;
            for &(v, v_upper) in &self.adj[u] {
                // v_upper: value(u) <= value(v), so v must lie in the up-closure of D(u).
                reach.iter_mut().for_each(|x| *x = 0);
                let masks = if v_upper { &self.up_masks } else { &self.down_masks };
                for a in ones(&dom[u * w..(u + 1) * w]) {
                    for (r, m) in reach.iter_mut().zip(&masks[a * w..(a + 1) * w]) {
                        *r |= m;
                    }
                }
                let mut changed = false;
                let mut empty = true;
                for (d, r) in dom[v * w..(v + 1) * w].iter_mut().zip(&reach) {
                    let nd = *d & r;
                    if nd != *d {
                        changed = true;
                        *d = nd;
                    }
                    if nd != 0 {
                        empty = false;
                    }
                }
                if empty {
                    return false;
                }
                if changed && !queued[v] {
                    queued[v] = true;
                    queue.push(v);
                }
            }
        }
        true
    }
}

fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            }
        })
    })
}

fn first_bit(words: &[u64]) -> Option<usize> {
    ones(words).next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{chain, sphere};

    #[test]
    fn forced_chain_of_inequalities() {
        let target = chain(3);
        // x0 <= x1 <= x2 with x0 = 2 forces everything to 2.
        let p = ExtensionProblem::new(&target, 3, &[(0, 1), (1, 2)]);
        match p.solve(&[Some(2), None, None], &Budget::default()) {
            ExtensionOutcome::Solved(v) => assert_eq!(v, vec![2, 2, 2]),
            _ => panic!("expected a solution"),
        }
        match p.solve(&[Some(2), None, Some(0)], &Budget::default()) {
            ExtensionOutcome::Infeasible => {}
            _ => panic!("expected infeasible"),
        }
    }

    #[test]
    fn common_upper_bound_in_circle() {
        let s = sphere(1);
        // x <= z >= y with x = e+0, y = e-0: z must be one of the two maxima.
        let p = ExtensionProblem::new(&s, 3, &[(0, 2), (1, 2)]);
        match p.solve(&[Some(0), Some(1), None], &Budget::default()) {
            ExtensionOutcome::Solved(v) => assert!(v[2] == 2 || v[2] == 3),
            _ => panic!("expected a solution"),
        }
        // Two maxima have no common upper bound.
        match p.solve(&[Some(2), Some(3), None], &Budget::default()) {
            ExtensionOutcome::Infeasible => {}
            _ => panic!("expected infeasible"),
        }
    }
}

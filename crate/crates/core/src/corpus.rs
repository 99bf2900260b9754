//! Small posets for exhaustive and randomized checks.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poset::{build_poset, chain, fence, sphere, wedge_fence, FinitePoset};

/// Strict order on `0..n` as a bitmask over pairs `i < j` (natural order is a
/// linear extension), bit `pair_bit(n, i, j)`.
fn pair_bit(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

fn is_transitive(n: usize, rel: u64) -> bool {
    for i in 0..n {
        for j in i + 1..n {
            if rel >> pair_bit(n, i, j) & 1 == 0 {
                continue;
            }
            for k in j + 1..n {
                if rel >> pair_bit(n, j, k) & 1 == 1 && rel >> pair_bit(n, i, k) & 1 == 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    fn heap(k: usize, perm: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(perm.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            perm.swap(j, k - 1);
        }
    }
    heap(n, &mut perm, &mut out);
    out
}

/// Full strict relation matrix as an `n * n` bitmask, minimized over
/// relabelings.
fn canonical(n: usize, less: &[Vec<bool>], perms: &[Vec<usize>]) -> u64 {
    perms
        .iter()
        .map(|p| {
            let mut code = 0u64;
            for i in 0..n {
                for j in 0..n {
                    if less[i][j] {
                        code |= 1 << (p[i] * n + p[j]);
                    }
                }
            }
            code
        })
        .min()
        .unwrap_or(0)
}

fn strict_matrix(p: &FinitePoset) -> Vec<Vec<bool>> {
    (0..p.len()).map(|i| (0..p.len()).map(|j| p.lt(i, j)).collect()).collect()
}

/// Isomorphism-invariant code of a poset with at most 8 elements.
pub fn canonical_code(p: &FinitePoset) -> (usize, u64) {
    assert!(p.len() <= 8, "canonical codes are limited to 8 elements");
    (p.len(), canonical(p.len(), &strict_matrix(p), &permutations(p.len())))
}

fn from_strict(n: usize, less: &[Vec<bool>]) -> FinitePoset {
    let labels = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| less[i][j]).map(move |j| (i, j)))
        .collect();
    build_poset(labels, &edges).expect("a strict order is acyclic")
}

/// One representative of every isomorphism class of connected posets with
/// exactly `n` elements (`n <= 6`), labeled `0..n`.
pub fn connected_posets(n: usize) -> Vec<FinitePoset> {
    posets(n).into_iter().filter(FinitePoset::is_connected).collect()
}

/// One representative of every isomorphism class of posets with exactly `n`
/// elements (`n <= 6`), labeled `0..n`.
pub fn posets(n: usize) -> Vec<FinitePoset> {
    assert!(n <= 6, "exhaustive enumeration is limited to 6 elements");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let mut rel = 0u64;
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                rel |= 1 << pair_bit(n, i, j);
            }
        }
        if !is_transitive(n, rel) {
            continue;
        }
        let less: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i < j && rel >> pair_bit(n, i, j) & 1 == 1).collect())
            .collect();
        if seen.insert(canonical(n, &less, &perms)) {
            out.push(from_strict(n, &less));
        }
    }
    out
}

/// Every connected poset with `1..=max` elements, up to isomorphism.
pub fn connected_posets_up_to(max: usize) -> Vec<FinitePoset> {
    (1..=max).flat_map(connected_posets).collect()
}

/// A random connected poset with between 1 and `max_size` elements.
pub fn random_connected_poset(rng: &mut impl Rng, max_size: usize) -> FinitePoset {
    let max_size = max_size.max(1);
    loop {
        let n = rng.gen_range(1..=max_size);
        let density = rng.gen_range(0.25..0.75);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(density))
            .collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        let p = build_poset(labels, &edges).expect("edges follow the natural order");
        if p.is_connected() {
            return p;
        }
    }
}

/// `count` random connected posets from a fixed seed.
pub fn random_connected_posets(count: usize, max_size: usize, seed: u64) -> Vec<FinitePoset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_connected_poset(&mut rng, max_size)).collect()
}

/// Named connected posets used as the default corpus.
pub fn builtin_corpus() -> Vec<(String, FinitePoset)> {
    let mut out = vec![
        ("chain:1".to_string(), chain(1)),
        ("chain:2".to_string(), chain(2)),
        ("chain:3".to_string(), chain(3)),
        ("fence:2".to_string(), fence(2)),
        ("fence:3".to_string(), fence(3)),
        ("fence:4".to_string(), fence(4)),
        ("sphere:1".to_string(), sphere(1)),
        ("wedge_fence:3:1".to_string(), wedge_fence(3, 1).expect("three branches")),
    ];
    // the circle with a cone point on top
    let coned = build_poset(
        ["a", "b", "c", "d", "t"].map(String::from).to_vec(),
        &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 4)],
    )
    .expect("acyclic");
    out.push(("coned_circle".to_string(), coned));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_connected_posets() {
        // connected unlabeled posets: 1, 1, 3, 10, 44, 238
        let counts: Vec<usize> = (1..=5).map(|n| connected_posets(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 10, 44]);
        let all: Vec<usize> = (1..=5).map(|n| posets(n).len()).collect();
        assert_eq!(all, vec![1, 2, 5, 16, 63]);
    }

    #[test]
    fn random_posets_are_connected_and_reproducible() {
        let a = random_connected_posets(20, 5, 3);
        let b = random_connected_posets(20, 5, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.is_connected() && p.len() <= 5));
    }

    #[test]
    fn canonical_codes_identify_relabelings() {
        let p = build_poset(vec!["x".into(), "y".into(), "z".into()], &[(0, 1), (2, 1)]).unwrap();
        let q = build_poset(vec!["x".into(), "y".into(), "z".into()], &[(1, 0), (2, 0)]).unwrap();
        assert_eq!(canonical_code(&p), canonical_code(&q));
        assert_ne!(canonical_code(&p), canonical_code(&chain(3)));
    }
}

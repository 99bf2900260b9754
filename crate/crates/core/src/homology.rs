//! Homology obstructions for homotopies between maps of finite spaces.
//!
//! Homotopic maps induce the same homomorphism on `H_1` of the order
//! complexes. We compare `f_*` and `g_*` on every fundamental cycle of the
//! comparability graph of the domain, testing whether `f(z) - g(z)` bounds in
//! the target with coefficients in a few prime fields. A non-boundary over any
//! `F_p` certifies that the integral classes differ, so a positive answer is a
//! proof of non-homotopy; a negative answer proves nothing.
//!
//! In degrees two and up the same comparison runs over `F_2` on a basis of
//! the cycle space of the domain.

use std::collections::{HashMap, VecDeque};

use crate::poset::FinitePoset;

const PRIMES: [u64; 2] = [2, 2_147_483_647];

/// Boundary space `B_1` of the order complex of a (small) target poset.
pub(crate) struct BoundarySpace {
    n: usize,
    edge_index: Vec<u32>,
    dim: usize,
    /// Per prime: reduced row echelon rows and their pivots.
    bases: Vec<(Vec<Vec<u64>>, Vec<usize>)>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = (result as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    result
}

fn reduce(rows: &[Vec<u64>], pivots: &[usize], v: &mut [u64], p: u64) {
    for (row, &piv) in rows.iter().zip(pivots) {
        let c = v[piv];
        if c != 0 {
            for (x, &r) in v.iter_mut().zip(row) {
                if r != 0 {
                    *x = ((*x as u128 + (p - c) as u128 * r as u128) % p as u128) as u64;
                }
            }
        }
    }
}

impl BoundarySpace {
    pub(crate) fn new(target: &FinitePoset) -> Self {
        let n = target.len();
        let mut edge_index = vec![u32::MAX; n * n];
        let mut dim = 0usize;
        for b in 0..n {
            for a in target.down_bits(b).ones() {
                if a != b {
                    edge_index[a * n + b] = dim as u32;
                    dim += 1;
                }
            }
        }
        let mut bases = Vec::new();
        for &p in &PRIMES {
            let mut rows: Vec<Vec<u64>> = Vec::new();
            let mut pivots: Vec<usize> = Vec::new();
            for c in 0..n {
                for b in target.down_bits(c).ones() {
                    if b == c {
                        continue;
                    }
                    for a in target.down_bits(b).ones() {
                        if a == b {
                            continue;
                        }
                        // boundary of a < b < c is (b,c) - (a,c) + (a,b)
                        let mut v = vec![0u64; dim];
                        v[edge_index[b * n + c] as usize] = 1;
                        v[edge_index[a * n + c] as usize] = p - 1;
                        v[edge_index[a * n + b] as usize] = (v[edge_index[a * n + b] as usize] + 1) % p;
                        reduce(&rows, &pivots, &mut v, p);
                        if let Some(piv) = v.iter().position(|&x| x != 0) {
                            let inv = inv_mod(v[piv], p);
                            for x in v.iter_mut() {
                                *x = (*x as u128 * inv as u128 % p as u128) as u64;
                            }
                            for row in rows.iter_mut() {
                                let k = row[piv];
                                if k != 0 {
                                    for (r, &y) in row.iter_mut().zip(&v) {
                                        *r = ((*r as u128 + (p - k) as u128 * y as u128) % p as u128) as u64;
                                    }
                                }
                            }
                            rows.push(v);
                            pivots.push(piv);
                        }
                    }
                }
            }
            bases.push((rows, pivots));
        }
        BoundarySpace {
            n,
            edge_index,
            dim,
            bases,
        }
    }

    /// Adds `sign * [a, b]` (an oriented edge with `a <= b`; degenerate if equal).
    fn add_edge(&self, v: &mut [i64], a: usize, b: usize, sign: i64) {
        if a != b {
            v[self.edge_index[a * self.n + b] as usize] += sign;
        }
    }

    fn bounds(&self, v: &[i64]) -> bool {
        for ((rows, pivots), &p) in self.bases.iter().zip(&PRIMES) {
            let mut w: Vec<u64> = v.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
            reduce(rows, pivots, &mut w, p);
            if w.iter().any(|&x| x != 0) {
                return false;
            }
        }
        true
    }
}

/// `true` when `f` and `g` (local maps from `domain` into the target of
/// `space`) provably induce different maps on `H_1`.
pub(crate) fn h1_separates(domain: &FinitePoset, f: &[u16], g: &[u16], space: &BoundarySpace) -> bool {
    let n = domain.len();
    if n == 0 || space.dim == 0 {
        return false;
    }
    let delta = |u: usize, v: usize, out: &mut [i64]| {
        // contribution of the oriented edge u -> v of the domain
        if domain.leq(u, v) {
            space.add_edge(out, f[u] as usize, f[v] as usize, 1);
            space.add_edge(out, g[u] as usize, g[v] as usize, -1);
        } else {
            space.add_edge(out, f[v] as usize, f[u] as usize, -1);
            space.add_edge(out, g[v] as usize, g[u] as usize, 1);
        }
    };
    let mut acc: Vec<Option<Vec<i64>>> = vec![None; n];
    let mut tree_parent = vec![usize::MAX; n];
    let mut buf = vec![0i64; space.dim];
    for root in 0..n {
        if acc[root].is_some() {
            continue;
        }
        acc[root] = Some(vec![0; space.dim]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let nbrs = domain.down_bits(u).ones().chain(domain.up_bits(u).ones());
            for v in nbrs.collect::<Vec<_>>() {
                if v == u {
                    continue;
                }
                if acc[v].is_none() {
                    let mut a = acc[u].clone().unwrap();
                    delta(u, v, &mut a);
                    acc[v] = Some(a);
                    tree_parent[v] = u;
                    queue.push_back(v);
                } else if u < v && tree_parent[v] != u && tree_parent[u] != v {
                    // non-tree edge: cycle root -> u -> v -> root
                    buf.copy_from_slice(acc[u].as_ref().unwrap());
                    delta(u, v, &mut buf);
                    for (b, a) in buf.iter_mut().zip(acc[v].as_ref().unwrap()) {
                        *b -= a;
                    }
                    if !space.bounds(&buf) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Skip degrees whose chain spaces in the domain exceed this size.
const MAX_DOMAIN_CHAINS: usize = 20_000;

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

fn flip(v: &mut [u64], i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

/// Echelon basis over `F_2` keyed by pivot (lowest set bit).
#[derive(Default)]
struct Echelon {
    rows: HashMap<usize, Vec<u64>>,
}

impl Echelon {
    /// Reduces `v` in place; returns its pivot when it stays nonzero.
    fn reduce(&self, v: &mut [u64]) -> Option<usize> {
        while let Some(p) = lowest_bit(v) {
            match self.rows.get(&p) {
                Some(row) => xor_into(v, row),
                None => return Some(p),
            }
        }
        None
    }
}

/// Chains with `len` elements of `p`, each sorted along a linear extension
/// (so consecutive entries are increasing in the order).
fn chains_of_length(p: &FinitePoset, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let order = p.linear_extension();
    let mut stack: Vec<usize> = Vec::new();
    fn go(p: &FinitePoset, order: &[usize], from: usize, len: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if stack.len() == len {
            out.push(stack.clone());
            return;
        }
        for (i, &x) in order.iter().enumerate().skip(from) {
            if stack.last().is_none_or(|&top| p.lt(top, x)) {
                stack.push(x);
                go(p, order, i + 1, len, stack, out);
                stack.pop();
            }
        }
    }
    go(p, order, 0, len, &mut stack, &mut out);
    out
}

/// Boundaries of the order complex of a small target, over `F_2`, in the
/// degrees from 2 up to its dimension.
pub(crate) struct HigherBoundaries {
    /// Per degree `d` (index `d - 2`): index of each `d`-simplex and the
    /// echelon basis of `B_d`.
    degrees: Vec<(HashMap<Vec<u16>, usize>, Echelon)>,
}

impl HigherBoundaries {
    pub(crate) fn new(target: &FinitePoset) -> Self {
        let mut degrees = Vec::new();
        let mut d = 2;
        loop {
            let simplices = chains_of_length(target, d + 1);
            if simplices.is_empty() {
                break;
            }
            let key = |c: &[usize]| {
                let mut k: Vec<u16> = c.iter().map(|&x| x as u16).collect();
                k.sort_unstable();
                k
            };
            let index: HashMap<Vec<u16>, usize> = simplices.iter().enumerate().map(|(i, c)| (key(c), i)).collect();
            let words = simplices.len().div_ceil(64);
            let mut basis = Echelon::default();
            for c in chains_of_length(target, d + 2) {
                let mut v = vec![0u64; words];
                for skip in 0..c.len() {
                    let face: Vec<usize> = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                    flip(&mut v, index[&key(&face)]);
                }
                if let Some(p) = basis.reduce(&mut v) {
                    basis.rows.insert(p, v);
                }
            }
            degrees.push((index, basis));
            d += 1;
        }
        HigherBoundaries { degrees }
    }

    pub(crate) fn is_trivial(&self) -> bool {
        self.degrees.is_empty()
    }
}

/// `true` when `f` and `g` provably induce different maps on `H_d` with
/// `F_2` coefficients for some `d >= 2`.
pub(crate) fn higher_separates(domain: &FinitePoset, f: &[u16], g: &[u16], space: &HigherBoundaries) -> bool {
    for (offset, (target_index, boundaries)) in space.degrees.iter().enumerate() {
        let d = offset + 2;
        let top = chains_of_length(domain, d + 1);
        if top.is_empty() {
            break;
        }
        let faces = chains_of_length(domain, d);
        if top.len() > MAX_DOMAIN_CHAINS || faces.len() > MAX_DOMAIN_CHAINS {
            break;
        }
        let face_index: HashMap<&[usize], usize> = faces.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let fw = faces.len().div_ceil(64);
        let tw = top.len().div_ceil(64);
        // eliminate boundary rows while tracking combinations: rows that
        // vanish span the cycle space
        let mut pivots = Echelon::default();
        let mut combos: HashMap<usize, Vec<u64>> = HashMap::new();
        let mut cycles: Vec<Vec<u64>> = Vec::new();
        let mut face = Vec::with_capacity(d);
        for (i, c) in top.iter().enumerate() {
            let mut v = vec![0u64; fw];
            for skip in 0..c.len() {
                face.clear();
                face.extend(c.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x));
                flip(&mut v, face_index[face.as_slice()]);
            }
            let mut combo = vec![0u64; tw];
            flip(&mut combo, i);
            loop {
                match lowest_bit(&v) {
                    None => {
                        cycles.push(combo);
                        break;
                    }
                    Some(p) => match pivots.rows.get(&p) {
                        Some(row) => {
                            xor_into(&mut v, row);
                            xor_into(&mut combo, &combos[&p]);
                        }
                        None => {
                            pivots.rows.insert(p, v);
                            combos.insert(p, combo);
                            break;
                        }
                    },
                }
            }
        }
        let words = target_index.len().div_ceil(64);
        let image = |map: &[u16], c: &[usize], out: &mut Vec<u64>| {
            let mut k: Vec<u16> = c.iter().map(|&x| map[x]).collect();
            k.sort_unstable();
            k.dedup();
            if k.len() == c.len() {
                flip(out, target_index[&k]);
            }
        };
        for z in &cycles {
            let mut diff = vec![0u64; words];
            for (wi, &w) in z.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let i = wi * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    image(f, &top[i], &mut diff);
                    image(g, &top[i], &mut diff);
                }
            }
            if boundaries.reduce(&mut diff).is_some() {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{chain, sphere};

    #[test]
    fn identity_and_constant_on_circle_are_separated() {
        let s = sphere(1);
        let space = BoundarySpace::new(&s);
        let id: Vec<u16> = (0..4).collect();
        let c = vec![2u16; 4];
        assert!(h1_separates(&s, &id, &c, &space));
        assert!(!h1_separates(&s, &id, &id, &space));
    }

    #[test]
    fn half_turn_is_not_detected() {
        // swapping both levels is a degree-one self map: invisible to H_1
        let s = sphere(1);
        let space = BoundarySpace::new(&s);
        let id: Vec<u16> = (0..4).collect();
        let rot = vec![1u16, 0, 3, 2];
        assert!(!h1_separates(&s, &id, &rot, &space));
        // a reflection has degree -1
        let refl = vec![1u16, 0, 2, 3];
        assert!(h1_separates(&s, &id, &refl, &space));
    }

    #[test]
    fn projections_of_the_square_of_the_two_sphere_are_separated() {
        use crate::poset::power;
        let s = sphere(2);
        let sq = power(&s, 2, 100).unwrap();
        let space = HigherBoundaries::new(&s);
        assert!(!space.is_trivial());
        assert!(HigherBoundaries::new(&sphere(1)).is_trivial());
        let p1: Vec<u16> = (0..36).map(|x| (x / 6) as u16).collect();
        let p2: Vec<u16> = (0..36).map(|x| (x % 6) as u16).collect();
        assert!(higher_separates(&sq, &p1, &p2, &space));
        assert!(!higher_separates(&sq, &p1, &p1, &space));
        let id: Vec<u16> = (0..6).collect();
        let c = vec![0u16; 6];
        assert!(higher_separates(&s, &id, &c, &space));
    }

    #[test]
    fn contractible_target_never_separates() {
        let c = chain(3);
        let space = BoundarySpace::new(&c);
        let s = sphere(1);
        let f = vec![0u16, 0, 2, 1];
        let g = vec![2u16; 4];
        assert!(!h1_separates(&s, &f, &g, &space));
    }
}

//! Finite posets viewed as finite T0 spaces.
//!
//! Opens are down-sets: the minimal open neighbourhood of `x` is
//! `U_x = {y : y <= x}`. Every poset is immutable once built and carries its
//! Hasse diagram together with the full reachability relation as bitsets.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Default hard cap on the number of elements of any constructed poset.
pub const DEFAULT_SIZE_CAP: usize = 100_000;

/// A finite partially ordered set.
#[derive(Clone)]
pub struct FinitePoset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    hasse: Vec<(usize, usize)>,
    lower_covers: Vec<Vec<usize>>,
    upper_covers: Vec<Vec<usize>>,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    linear: Vec<usize>,
    linear_pos: Vec<usize>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinitePoset")
            .field("labels", &self.labels)
            .field("hasse", &self.hasse)
            .finish()
    }
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.hasse == other.hasse
    }
}

impl Eq for FinitePoset {}

/// Builds a poset from labels and (lower, upper) pairs. The relation is the
/// reflexive-transitive closure of the pairs; redundant pairs are dropped
/// from the stored Hasse diagram. Self-pairs are ignored.
pub fn build_poset(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<FinitePoset> {
    let n = labels.len();
    let mut index = HashMap::with_capacity(n);
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        for v in [a, b] {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, len: n });
            }
        }
        if a != b {
            preds[b].push(a);
        }
    }
    let linear = topological_order(n, &preds).map_err(|v| Error::CycleDetected(labels[v].clone()))?;
    let mut down = vec![FixedBitSet::with_capacity(n); n];
    for &x in &linear {
        let mut d = FixedBitSet::with_capacity(n);
        d.insert(x);
        for &p in &preds[x] {
            d.union_with(&down[p]);
        }
        down[x] = d;
    }
    let up = transpose(&down);
    let mut lower_covers = vec![Vec::new(); n];
    for x in 0..n {
        for y in down[x].ones() {
            if y == x {
                continue;
            }
            // y is covered by x iff nothing lies strictly between them.
            let between = up[y].intersection(&down[x]).count();
            if between == 2 {
                lower_covers[x].push(y);
            }
        }
    }
    Ok(assemble(labels, index, lower_covers, down, up, linear))
}

/// Builds a poset from a trusted cover relation. `lower_covers[x]` must list
/// exactly the elements covered by `x`; labels must be unique.
pub(crate) fn from_covers(labels: Vec<String>, lower_covers: Vec<Vec<usize>>) -> FinitePoset {
    let n = labels.len();
    let linear = topological_order(n, &lower_covers).expect("cover relation must be acyclic");
    let mut down = vec![FixedBitSet::new(); n];
    for &x in &linear {
        let mut d = FixedBitSet::with_capacity(n);
        d.insert(x);
        for &p in &lower_covers[x] {
            d.union_with(&down[p]);
        }
        down[x] = d;
    }
    let up = transpose(&down);
    let index: HashMap<String, usize> = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    debug_assert_eq!(index.len(), n, "labels must be unique");
    assemble(labels, index, lower_covers, down, up, linear)
}

fn assemble(
    labels: Vec<String>,
    index: HashMap<String, usize>,
    mut lower_covers: Vec<Vec<usize>>,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    linear: Vec<usize>,
) -> FinitePoset {
    let n = labels.len();
    let mut upper_covers = vec![Vec::new(); n];
    let mut hasse = Vec::new();
    for (x, lc) in lower_covers.iter_mut().enumerate() {
        lc.sort_unstable();
        lc.dedup();
        for &y in lc.iter() {
            upper_covers[y].push(x);
            hasse.push((y, x));
        }
    }
    for uc in upper_covers.iter_mut() {
        uc.sort_unstable();
    }
    hasse.sort_unstable();
    let mut linear_pos = vec![0; n];
    for (i, &x) in linear.iter().enumerate() {
        linear_pos[x] = i;
    }
    FinitePoset {
        labels,
        index,
        hasse,
        lower_covers,
        upper_covers,
        down,
        up,
        linear,
        linear_pos,
    }
}

/// Kahn's algorithm, smallest available index first. Returns an element on a
/// cycle when the relation is not acyclic.
fn topological_order(n: usize, preds: &[Vec<usize>]) -> std::result::Result<Vec<usize>, usize> {
    let mut indeg: Vec<usize> = preds.iter().map(|p| p.len()).collect();
    let mut succs = vec![Vec::new(); n];
    for (x, ps) in preds.iter().enumerate() {
        for &p in ps {
            succs[p].push(x);
        }
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&x| indeg[x] == 0).map(std::cmp::Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(x)) = ready.pop() {
        order.push(x);
        for &s in &succs[x] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(std::cmp::Reverse(s));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&x| indeg[x] > 0).unwrap_or(0);
        return Err(stuck);
    }
    Ok(order)
}

fn transpose(rows: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let n = rows.len();
    let mut out = vec![FixedBitSet::with_capacity(n); n];
    for (x, row) in rows.iter().enumerate() {
        for y in row.ones() {
            out[y].insert(x);
        }
    }
    out
}

impl FinitePoset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Hasse edges as sorted `(lower, upper)` pairs.
    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower_covers[x]
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper_covers[x]
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x)
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{y : y <= x}` as a bitset.
    pub fn down_bits(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    /// `{y : y >= x}` as a bitset.
    pub fn up_bits(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// A linear extension of the order (smallest index first among ties).
    pub fn linear_extension(&self) -> &[usize] {
        &self.linear
    }

    pub fn linear_position(&self, x: usize) -> usize {
        self.linear_pos[x]
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.lower_covers[x].is_empty()).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.upper_covers[x].is_empty()).collect()
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Down-closure of an arbitrary subset.
    pub fn down_closure(&self, set: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for x in set.ones() {
            out.union_with(&self.down[x]);
        }
        out
    }

    pub fn is_down_closed(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|x| self.down[x].is_subset(set))
    }

    /// Number of comparable pairs `x < y`.
    pub fn strict_relation_count(&self) -> usize {
        self.down.iter().map(|d| d.count_ones(..) - 1).sum()
    }

    /// Subposet induced on `members`; also returns the ambient index of each
    /// new element (ascending).
    pub fn induced(&self, members: &FixedBitSet) -> (FinitePoset, Vec<usize>) {
        let old: Vec<usize> = members.ones().collect();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &x) in old.iter().enumerate() {
            new_index[x] = i;
        }
        let mut lower = vec![Vec::new(); old.len()];
        for (i, &x) in old.iter().enumerate() {
            let mut strict = self.down[x].clone();
            strict.intersect_with(members);
            strict.set(x, false);
            for y in strict.ones() {
                let mut between = self.up[y].clone();
                between.intersect_with(&strict);
                if between.count_ones(..) == 1 {
                    lower[i].push(new_index[y]);
                }
            }
        }
        let labels = old.iter().map(|&x| self.labels[x].clone()).collect();
        (from_covers(labels, lower), old)
    }

    /// Every nonempty chain, each listed bottom to top.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for &x in &self.linear {
            stack.push(x);
            self.extend_chains(&mut stack, &mut out);
            stack.pop();
        }
        out
    }

    fn extend_chains(&self, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(stack.clone());
        let top = *stack.last().unwrap();
        for y in self.up[top].ones() {
            if y != top {
                stack.push(y);
                self.extend_chains(stack, out);
                stack.pop();
            }
        }
    }

    /// Number of nonempty chains, saturating at `u128::MAX`.
    pub fn chain_count(&self) -> u128 {
        let mut ending = vec![0u128; self.len()];
        let mut total = 0u128;
        for &x in &self.linear {
            let mut c = 1u128;
            for y in self.down[x].ones() {
                if y != x {
                    c = c.saturating_add(ending[y]);
                }
            }
            ending[x] = c;
            total = total.saturating_add(c);
        }
        total
    }

    /// Maximal chains (facets of the order complex), bottom to top.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for x in self.minimal_elements() {
            stack.push(x);
            self.walk_saturated(&mut stack, &mut out);
            stack.pop();
        }
        out
    }

    fn walk_saturated(&self, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let top = *stack.last().unwrap();
        if self.upper_covers[top].is_empty() {
            out.push(stack.clone());
            return;
        }
        for &y in &self.upper_covers[top] {
            stack.push(y);
            self.walk_saturated(stack, out);
            stack.pop();
        }
    }

    /// Connected components of the comparability graph, each ascending,
    /// ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                i += 1;
                for &y in self.lower_covers[x].iter().chain(self.upper_covers[x].iter()) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.len() <= 1 || self.connected_components().len() == 1
    }

    /// Component id of every element (ids follow `connected_components`).
    pub fn component_ids(&self) -> Vec<usize> {
        let mut ids = vec![0; self.len()];
        for (c, members) in self.connected_components().iter().enumerate() {
            for &x in members {
                ids[x] = c;
            }
        }
        ids
    }
}

/// An open subset of a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownSet {
    ambient: Arc<FinitePoset>,
    members: FixedBitSet,
}

impl DownSet {
    pub fn new(ambient: Arc<FinitePoset>, members: FixedBitSet) -> Result<Self> {
        let mut members = members;
        members.grow(ambient.len());
        if members.len() > ambient.len() {
            return Err(Error::InvalidArgument("member mask larger than ambient".into()));
        }
        if !ambient.is_down_closed(&members) {
            return Err(Error::InvalidArgument("member set is not down-closed".into()));
        }
        Ok(DownSet { ambient, members })
    }

    /// The down-closure of `generators`.
    pub fn generated_by(ambient: Arc<FinitePoset>, generators: &[usize]) -> Result<Self> {
        let mut members = FixedBitSet::with_capacity(ambient.len());
        for &g in generators {
            if g >= ambient.len() {
                return Err(Error::IndexOutOfRange { index: g, len: ambient.len() });
            }
            members.union_with(ambient.down_bits(g));
        }
        Ok(DownSet { ambient, members })
    }

    pub fn full(ambient: Arc<FinitePoset>) -> Self {
        let members = ambient.full_set();
        DownSet { ambient, members }
    }

    pub fn ambient(&self) -> &Arc<FinitePoset> {
        &self.ambient
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn labels(&self) -> Vec<String> {
        self.iter().map(|x| self.ambient.label(x).to_string()).collect()
    }

    pub fn is_subset(&self, other: &DownSet) -> bool {
        self.members.is_subset(&other.members)
    }
}

/// `U_x = {y : y <= x}`, the smallest open set containing `x`.
pub fn minimal_open(p: &Arc<FinitePoset>, x: usize) -> Result<DownSet> {
    if x >= p.len() {
        return Err(Error::IndexOutOfRange { index: x, len: p.len() });
    }
    Ok(DownSet {
        ambient: p.clone(),
        members: p.down_bits(x).clone(),
    })
}

/// An order-preserving (equivalently, continuous) map between finite spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    domain: Arc<FinitePoset>,
    codomain: Arc<FinitePoset>,
    assignment: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(domain: Arc<FinitePoset>, codomain: Arc<FinitePoset>, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} entries, domain has {} elements",
                assignment.len(),
                domain.len()
            )));
        }
        if let Some(&v) = assignment.iter().find(|&&v| v >= codomain.len()) {
            return Err(Error::IndexOutOfRange { index: v, len: codomain.len() });
        }
        if let Some(&(a, b)) = domain
            .hasse_edges()
            .iter()
            .find(|&&(a, b)| !codomain.leq(assignment[a], assignment[b]))
        {
            return Err(Error::NotMonotone(format!(
                "{} <= {} but {} is not <= {}",
                domain.label(a),
                domain.label(b),
                codomain.label(assignment[a]),
                codomain.label(assignment[b])
            )));
        }
        Ok(MonotoneMap { domain, codomain, assignment })
    }

    pub(crate) fn new_unchecked(domain: Arc<FinitePoset>, codomain: Arc<FinitePoset>, assignment: Vec<usize>) -> Self {
        debug_assert!(domain.hasse_edges().iter().all(|&(a, b)| codomain.leq(assignment[a], assignment[b])));
        MonotoneMap { domain, codomain, assignment }
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let assignment = (0..p.len()).collect();
        MonotoneMap { domain: p.clone(), codomain: p, assignment }
    }

    pub fn constant(domain: Arc<FinitePoset>, codomain: Arc<FinitePoset>, value: usize) -> Result<Self> {
        if value >= codomain.len() {
            return Err(Error::IndexOutOfRange { index: value, len: codomain.len() });
        }
        let assignment = vec![value; domain.len()];
        Ok(MonotoneMap { domain, codomain, assignment })
    }

    pub fn domain(&self) -> &Arc<FinitePoset> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FinitePoset> {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MonotoneMap) -> Result<MonotoneMap> {
        if self.codomain.as_ref() != next.domain.as_ref() {
            return Err(Error::DomainMismatch);
        }
        let assignment = self.assignment.iter().map(|&y| next.assignment[y]).collect();
        Ok(MonotoneMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            assignment,
        })
    }

    /// Pointwise `self <= other`.
    pub fn pointwise_leq(&self, other: &MonotoneMap) -> bool {
        self.assignment
            .iter()
            .zip(&other.assignment)
            .all(|(&a, &b)| self.codomain.leq(a, b))
    }

    /// Restriction to an open subset, as a map out of the induced subposet.
    pub fn restrict(&self, open: &DownSet) -> Result<MonotoneMap> {
        if open.ambient().as_ref() != self.domain.as_ref() {
            return Err(Error::DomainMismatch);
        }
        let (sub, old) = self.domain.induced(open.members());
        let assignment = old.iter().map(|&x| self.assignment[x]).collect();
        Ok(MonotoneMap {
            domain: Arc::new(sub),
            codomain: self.codomain.clone(),
            assignment,
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain.len()];
        for &v in &self.assignment {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// Mixed-radix decoding of an element of `power(p, n)` into its coordinates.
pub fn tuple_of(index: usize, base_len: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    let mut rest = index;
    for slot in out.iter_mut().rev() {
        *slot = rest % base_len;
        rest /= base_len;
    }
    out
}

/// Inverse of [`tuple_of`].
pub fn index_of_tuple(tuple: &[usize], base_len: usize) -> usize {
    tuple.iter().fold(0, |acc, &c| acc * base_len + c)
}

/// `P × Q` with the componentwise order; elements ordered lexicographically.
pub fn product(p: &FinitePoset, q: &FinitePoset, cap: usize) -> Result<FinitePoset> {
    let total = p.len().saturating_mul(q.len());
    if total > cap {
        return Err(Error::SizeLimitExceeded { requested: total, cap });
    }
    let mut labels = Vec::with_capacity(total);
    let mut lower = vec![Vec::new(); total];
    for a in 0..p.len() {
        for b in 0..q.len() {
            let idx = a * q.len() + b;
            labels.push(format!("({},{})", p.label(a), q.label(b)));
            for &la in p.lower_covers(a) {
                lower[idx].push(la * q.len() + b);
            }
            for &lb in q.lower_covers(b) {
                lower[idx].push(a * q.len() + lb);
            }
        }
    }
    Ok(from_covers(labels, lower))
}

/// `P^n`; tuples ordered lexicographically with the first coordinate most
/// significant (see [`tuple_of`]).
pub fn power(p: &FinitePoset, n: usize, cap: usize) -> Result<FinitePoset> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.checked_mul(p.len()).filter(|&t| t <= cap).ok_or(Error::SizeLimitExceeded {
            requested: p.len().checked_pow(n as u32).unwrap_or(usize::MAX),
            cap,
        })?;
    }
    let base = p.len();
    let mut labels = Vec::with_capacity(total);
    let mut lower = vec![Vec::new(); total];
    let mut weights = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        weights[i] = weights[i + 1] * base;
    }
    for (idx, lc) in lower.iter_mut().enumerate() {
        let t = tuple_of(idx, base, n);
        let parts: Vec<&str> = t.iter().map(|&c| p.label(c)).collect();
        labels.push(format!("({})", parts.join(",")));
        for (i, &c) in t.iter().enumerate() {
            for &l in p.lower_covers(c) {
                lc.push(idx - c * weights[i] + l * weights[i]);
            }
        }
    }
    Ok(from_covers(labels, lower))
}

/// The `j`-th projection `P^n -> P` (1-based `j`).
pub fn projection(power_poset: &Arc<FinitePoset>, base: &Arc<FinitePoset>, n: usize, j: usize) -> Result<MonotoneMap> {
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let assignment = (0..power_poset.len()).map(|x| tuple_of(x, base.len(), n)[j - 1]).collect();
    MonotoneMap::new(power_poset.clone(), base.clone(), assignment)
}

/// The fence `J_m`: `0 <= 1 >= 2 <= ...` with `m + 1` points.
pub fn fence(m: usize) -> FinitePoset {
    let labels = (0..=m).map(|i| i.to_string()).collect();
    let mut lower = vec![Vec::new(); m + 1];
    for i in 0..m {
        if i % 2 == 0 {
            lower[i + 1].push(i);
        } else {
            lower[i].push(i + 1);
        }
    }
    from_covers(labels, lower)
}

/// Index of node `i_j` (1-based branch `j`, position `i`) in `wedge_fence(n, m)`;
/// position 0 is the shared base point.
pub fn wedge_index(n: usize, branch: usize, position: usize) -> usize {
    if position == 0 {
        0
    } else {
        1 + (position - 1) * n + (branch - 1)
    }
}

/// `J_{n,m}`: `n` fences of length `m` glued at their initial point 0.
/// Elements are ordered `0, 1_1, .., 1_n, 2_1, .., m_n`.
pub fn wedge_fence(n: usize, m: usize) -> Result<FinitePoset> {
    if n < 2 {
        return Err(Error::InvalidArgument("wedge fence needs at least two branches".into()));
    }
    let size = n * m + 1;
    let mut labels = vec!["0".to_string(); size];
    let mut lower = vec![Vec::new(); size];
    for j in 1..=n {
        for i in 1..=m {
            labels[wedge_index(n, j, i)] = format!("{}_{}", i, j);
            let prev = wedge_index(n, j, i - 1);
            let cur = wedge_index(n, j, i);
            if (i - 1) % 2 == 0 {
                lower[cur].push(prev);
            } else {
                lower[prev].push(cur);
            }
        }
    }
    Ok(from_covers(labels, lower))
}

/// A chain `0 < 1 < ... < k-1`.
pub fn chain(k: usize) -> FinitePoset {
    let labels = (0..k).map(|i| i.to_string()).collect();
    let lower = (0..k).map(|i| if i == 0 { vec![] } else { vec![i - 1] }).collect();
    from_covers(labels, lower)
}

pub fn antichain(k: usize) -> FinitePoset {
    let labels = (0..k).map(|i| i.to_string()).collect();
    from_covers(labels, vec![Vec::new(); k])
}

/// The minimal finite model of the `m`-sphere: points `e^k_±` for
/// `0 <= k <= m`, with `e^k_p < e^l_q` iff `k < l`.
pub fn sphere(m: usize) -> FinitePoset {
    let mut labels = Vec::with_capacity(2 * m + 2);
    let mut lower = Vec::with_capacity(2 * m + 2);
    for k in 0..=m {
        for sign in ["+", "-"] {
            labels.push(format!("e{}{}", sign, k));
            lower.push(if k == 0 { vec![] } else { vec![2 * k - 2, 2 * k - 1] });
        }
    }
    from_covers(labels, lower)
}

/// `sd(P)` together with the chain each of its elements stands for.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub base: Arc<FinitePoset>,
    pub poset: Arc<FinitePoset>,
    /// Members of each chain, ascending by index in `base`.
    pub chains: Vec<Vec<usize>>,
}

impl Subdivision {
    /// `tau: sd(P) -> P`, a chain goes to its maximum.
    pub fn tau(&self) -> MonotoneMap {
        MonotoneMap::new_unchecked(self.poset.clone(), self.base.clone(), self.tau_assignment())
    }

    pub fn tau_assignment(&self) -> Vec<usize> {
        self.chains
            .iter()
            .map(|c| *c.iter().max_by_key(|&&x| self.base.linear_position(x)).unwrap())
            .collect()
    }
}

/// Poset of a family of finite sets closed under nonempty subsets, ordered by
/// inclusion. Sets are sorted ascending; the result orders them by
/// (size, lexicographic member list).
pub(crate) fn inclusion_poset(mut sets: Vec<Vec<usize>>, label: impl Fn(&[usize]) -> String) -> (FinitePoset, Vec<Vec<usize>>) {
    sets.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: HashMap<&[usize], usize> = sets.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut lower = vec![Vec::new(); sets.len()];
    let mut buf = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        if s.len() < 2 {
            continue;
        }
        for skip in 0..s.len() {
            buf.clear();
            buf.extend(s.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v));
            lower[i].push(index[buf.as_slice()]);
        }
    }
    let labels = sets.iter().map(|s| label(s)).collect();
    drop(index);
    (from_covers(labels, lower), sets)
}

/// `sd(P)`: nonempty chains of `P` ordered by inclusion.
pub fn barycentric_subdivision(p: &Arc<FinitePoset>, cap: usize) -> Result<Subdivision> {
    let count = p.chain_count();
    if count > cap as u128 {
        return Err(Error::SizeLimitExceeded {
            requested: usize::try_from(count).unwrap_or(usize::MAX),
            cap,
        });
    }
    let chains: Vec<Vec<usize>> = p
        .chains()
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    let (poset, chains) = inclusion_poset(chains, |s| {
        let parts: Vec<&str> = s.iter().map(|&x| p.label(x)).collect();
        format!("{{{}}}", parts.join(","))
    });
    Ok(Subdivision {
        base: p.clone(),
        poset: Arc::new(poset),
        chains,
    })
}

/// `tau_P : sd(P) -> P`.
pub fn tau(p: &Arc<FinitePoset>, cap: usize) -> Result<MonotoneMap> {
    Ok(barycentric_subdivision(p, cap)?.tau())
}

/// `tau^k : sd^k(P) -> P`, the composite of the successive `tau` maps.
pub fn tau_k(p: &Arc<FinitePoset>, k: usize, cap: usize) -> Result<MonotoneMap> {
    let mut current = MonotoneMap::identity(p.clone());
    for _ in 0..k {
        let sd = barycentric_subdivision(current.domain(), cap)?;
        current = sd.tau().then(&current)?;
    }
    Ok(current)
}

/// All down-sets of a small poset, in a deterministic order.
pub fn all_down_sets(p: &FinitePoset) -> Vec<FixedBitSet> {
    let mut out = Vec::new();
    let mut cur = FixedBitSet::with_capacity(p.len());
    fn rec(p: &FinitePoset, i: usize, cur: &mut FixedBitSet, out: &mut Vec<FixedBitSet>) {
        if i == p.len() {
            out.push(cur.clone());
            return;
        }
        let x = p.linear_extension()[i];
        rec(p, i + 1, cur, out);
        if p.lower_covers(x).iter().all(|&y| cur.contains(y)) {
            cur.insert(x);
            rec(p, i + 1, cur, out);
            cur.set(x, false);
        }
    }
    rec(p, 0, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> FinitePoset {
        let labels = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        build_poset(labels, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    fn bits(n: usize, xs: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &x in xs {
            b.insert(x);
        }
        b
    }

    #[test]
    fn singleton_and_cycles() {
        let p = build_poset(vec!["a".into()], &[]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.leq(0, 0));
        let err = build_poset(vec!["a".into(), "b".into()], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::CycleDetected(_)));
        let err = build_poset(vec!["a".into(), "a".into()], &[]).unwrap_err();
        assert_eq!(err, Error::DuplicateLabel("a".into()));
        let err = build_poset(vec!["a".into()], &[(0, 3)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { .. }));
    }

    #[test]
    fn transitive_shortcuts_are_dropped() {
        let labels = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let p = build_poset(labels, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(p.hasse_edges(), &[(0, 1), (1, 2)]);
        assert!(p.leq(0, 2));
    }

    #[test]
    fn minimal_circle_matches_sphere_builder() {
        let p = s1();
        assert_eq!(p.hasse_edges(), sphere(1).hasse_edges());
        let p = Arc::new(p);
        let u = minimal_open(&p, 2).unwrap();
        assert_eq!(u.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(minimal_open(&p, 0).unwrap().len(), 1);
        assert!(minimal_open(&p, 9).is_err());
        let c = Arc::new(chain(3));
        assert_eq!(minimal_open(&c, 2).unwrap().len(), 3);
    }

    #[test]
    fn minimal_open_is_smallest_down_set_containing_x() {
        for p in [s1(), fence(4), chain(3), sphere(2)] {
            let p = Arc::new(p);
            let all = all_down_sets(&p);
            for x in 0..p.len() {
                let u = minimal_open(&p, x).unwrap();
                for d in all.iter().filter(|d| d.contains(x)) {
                    assert!(u.members().is_subset(d));
                }
            }
        }
    }

    #[test]
    fn partial_order_axioms_hold() {
        for p in [s1(), fence(5), wedge_fence(3, 2).unwrap(), sphere(2), power(&s1(), 2, 100).unwrap()] {
            let n = p.len();
            for x in 0..n {
                assert!(p.leq(x, x));
                for y in 0..n {
                    if x != y && p.leq(x, y) {
                        assert!(!p.leq(y, x));
                    }
                    for z in 0..n {
                        if p.leq(x, y) && p.leq(y, z) {
                            assert!(p.leq(x, z));
                        }
                    }
                }
            }
            for &(a, b) in p.hasse_edges() {
                for z in 0..n {
                    assert!(!(p.lt(a, z) && p.lt(z, b)), "shortcut in Hasse diagram");
                }
            }
        }
    }

    #[test]
    fn powers_and_products() {
        let single = chain(1);
        assert_eq!(power(&single, 3, 100).unwrap().len(), 1);
        let p = s1();
        let p2 = power(&p, 2, 100).unwrap();
        assert_eq!(p2.len(), 16);
        for x in 0..16 {
            for y in 0..16 {
                let (tx, ty) = (tuple_of(x, 4, 2), tuple_of(y, 4, 2));
                let expected = p.leq(tx[0], ty[0]) && p.leq(tx[1], ty[1]);
                assert_eq!(p2.leq(x, y), expected);
            }
        }
        let diamond = product(&chain(2), &chain(2), 100).unwrap();
        assert_eq!(diamond.len(), 4);
        assert_eq!(diamond.minimal_elements(), vec![0]);
        assert_eq!(diamond.maximal_elements(), vec![3]);
        assert!(!diamond.comparable(1, 2));
        assert!(matches!(power(&p, 3, 10), Err(Error::SizeLimitExceeded { .. })));
    }

    #[test]
    fn projections_are_monotone() {
        let p = Arc::new(s1());
        let p3 = Arc::new(power(&p, 3, 1000).unwrap());
        for j in 1..=3 {
            projection(&p3, &p, 3, j).unwrap();
        }
        assert!(projection(&p3, &p, 3, 4).is_err());
    }

    #[test]
    fn fences() {
        assert_eq!(fence(0).len(), 1);
        let f2 = fence(2);
        assert_eq!(f2.hasse_edges(), &[(0, 1), (2, 1)]);
        let w = wedge_fence(2, 1).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.hasse_edges(), &[(0, 1), (0, 2)]);
        let w = wedge_fence(3, 4).unwrap();
        assert_eq!(w.len(), 13);
        assert!(w.is_connected());
        assert!(wedge_fence(1, 2).is_err());
    }

    #[test]
    fn order_complex_facets() {
        assert_eq!(antichain(3).maximal_chains().len(), 3);
        let mut facets = s1().maximal_chains();
        facets.sort();
        assert_eq!(facets, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);
        assert_eq!(chain(3).maximal_chains(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn subdivision_counts() {
        let single = Arc::new(chain(1));
        assert_eq!(barycentric_subdivision(&single, 10).unwrap().poset.len(), 1);
        let p = Arc::new(s1());
        let sd = barycentric_subdivision(&p, 100).unwrap();
        assert_eq!(sd.poset.len(), 8);
        assert_eq!(sd.poset.minimal_elements().len(), 4);
        assert!(sd.poset.maximal_elements().iter().all(|&x| sd.poset.lower_covers(x).len() == 2));
        let f1 = Arc::new(fence(1));
        let sd = barycentric_subdivision(&f1, 100).unwrap();
        assert_eq!(sd.poset.len(), 3);
        assert_eq!(sd.poset.hasse_edges(), &[(0, 2), (1, 2)]);
        for q in [fence(4), sphere(2), power(&s1(), 2, 100).unwrap()] {
            let q = Arc::new(q);
            let sd = barycentric_subdivision(&q, 10_000).unwrap();
            assert_eq!(sd.poset.len() as u128, q.chain_count());
            assert_eq!(sd.poset.len(), q.chains().len());
        }
        assert!(barycentric_subdivision(&Arc::new(power(&s1(), 2, 100).unwrap()), 50).is_err());
    }

    #[test]
    fn tau_maps() {
        let p = Arc::new(s1());
        let t0 = tau_k(&p, 0, 100).unwrap();
        assert_eq!(t0, MonotoneMap::identity(p.clone()));
        let sd = barycentric_subdivision(&p, 100).unwrap();
        let t = sd.tau();
        let ac = sd.poset.index_of("{a,c}").unwrap();
        assert_eq!(t.apply(ac), 2);
        let a = sd.poset.index_of("{a}").unwrap();
        assert_eq!(t.apply(a), 0);
        for q in [s1(), fence(3), sphere(2), wedge_fence(2, 2).unwrap()] {
            let q = Arc::new(q);
            let t1 = tau(&q, 1000).unwrap();
            assert!(t1.is_surjective());
            let t2 = tau_k(&q, 2, 10_000).unwrap();
            assert!(t2.is_surjective());
            let sd1 = barycentric_subdivision(&q, 1000).unwrap();
            let sd2 = barycentric_subdivision(&sd1.poset, 10_000).unwrap();
            let composite = sd2.tau().then(&sd1.tau()).unwrap();
            assert_eq!(composite.assignment(), t2.assignment());
        }
    }

    #[test]
    fn components() {
        assert_eq!(antichain(2).connected_components().len(), 2);
        for m in 1..4 {
            assert!(sphere(m).is_connected());
            assert!(fence(m).is_connected());
        }
    }

    #[test]
    fn down_set_validation() {
        let p = Arc::new(s1());
        assert!(DownSet::new(p.clone(), bits(4, &[2])).is_err());
        assert!(DownSet::new(p.clone(), bits(4, &[0, 1, 2])).is_ok());
        assert_eq!(all_down_sets(&p).len(), 7);
    }

    #[test]
    fn induced_subposet_covers() {
        let c = chain(4);
        let (sub, old) = c.induced(&bits(4, &[0, 3]));
        assert_eq!(old, vec![0, 3]);
        assert_eq!(sub.hasse_edges(), &[(0, 1)]);
    }
}

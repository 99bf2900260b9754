//! Combinatorial paths and homotopies of order-preserving maps.
//!
//! Two maps `f, g : X -> Y` are homotopic iff they lie in one connected
//! component of the mapping poset `Hom(X, Y)` under the pointwise order. The
//! decision procedure below never enumerates `Hom(X, Y)` up front:
//!
//! * the domain is shrunk to its core by beat-point removal, which induces a
//!   bijection on homotopy classes, and the target is retracted to its core;
//! * an `H_1` comparison refutes many non-homotopic pairs immediately;
//! * otherwise a bidirectional breadth-first search runs over maps differing
//!   at a single point (comparable maps are joined by such moves, so the
//!   components are the same).
//!
//! Positive answers can be lifted back to an explicit zigzag of frames on the
//! original domain.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::budget::{Budget, Decision};
use crate::error::{Error, Result};
use crate::extension::{ExtensionOutcome, ExtensionProblem};
use crate::homology::{h1_separates, higher_separates, BoundarySpace, HigherBoundaries};
use crate::poset::{DownSet, FinitePoset, MonotoneMap};

/// A zigzag `x_0 <= x_1 >= x_2 <= ...` in a target poset, i.e. an
/// order-preserving map out of the fence `J_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialPath {
    target: Arc<FinitePoset>,
    values: Vec<usize>,
}

/// Whether `values` is a zigzag starting with an ascent.
pub fn is_fence_path(target: &FinitePoset, values: &[usize]) -> bool {
    values.windows(2).enumerate().all(|(i, w)| {
        if i % 2 == 0 {
            target.leq(w[0], w[1])
        } else {
            target.leq(w[1], w[0])
        }
    })
}

impl CombinatorialPath {
    pub fn new(target: Arc<FinitePoset>, values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("a path has at least one point".into()));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= target.len()) {
            return Err(Error::IndexOutOfRange { index: v, len: target.len() });
        }
        if !is_fence_path(&target, &values) {
            return Err(Error::NotMonotone("values do not follow the fence pattern".into()));
        }
        Ok(CombinatorialPath { target, values })
    }

    pub fn target(&self) -> &Arc<FinitePoset> {
        &self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Fence length `m` (number of steps).
    pub fn length(&self) -> usize {
        self.values.len() - 1
    }

    pub fn start(&self) -> usize {
        self.values[0]
    }

    pub fn end(&self) -> usize {
        *self.values.last().unwrap()
    }
}

/// `γ1 * γ2`. When `γ1` has odd length its endpoint is repeated once so that
/// `γ2` starts on an ascent again; the result has length `m1 + m2` or
/// `m1 + m2 + 1`.
pub fn concatenate(first: &CombinatorialPath, second: &CombinatorialPath) -> Result<CombinatorialPath> {
    if first.target.as_ref() != second.target.as_ref() {
        return Err(Error::DomainMismatch);
    }
    if first.end() != second.start() {
        return Err(Error::EndpointMismatch);
    }
    let m1 = first.length();
    let mut values = first.values.clone();
    if m1 % 2 == 1 {
        values.push(first.values[m1]);
    }
    values.extend_from_slice(&second.values[1..]);
    CombinatorialPath::new(first.target.clone(), values)
}

/// Frames `h_0, ..., h_m` with `h_{i-1} <= h_i` for odd `i` and
/// `h_{i-1} >= h_i` for even `i`: the slices of `H : X × J_m -> Y`.
#[derive(Clone, Debug)]
pub struct HomotopyWitness {
    pub frames: Vec<MonotoneMap>,
}

impl HomotopyWitness {
    pub fn length(&self) -> usize {
        self.frames.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .frames
            .first()
            .ok_or_else(|| Error::InvalidWitness("no frames".into()))?;
        for (i, w) in self.frames.windows(2).enumerate() {
            if w[1].domain() != first.domain() || w[1].codomain() != first.codomain() {
                return Err(Error::InvalidWitness("frames disagree on domain or codomain".into()));
            }
            let ok = if i % 2 == 0 {
                w[0].pointwise_leq(&w[1])
            } else {
                w[1].pointwise_leq(&w[0])
            };
            if !ok {
                return Err(Error::InvalidWitness(format!("frames {} and {} break the zigzag", i, i + 1)));
            }
        }
        Ok(())
    }

    /// Serializable form with element labels.
    pub fn to_labels(&self) -> Vec<Vec<String>> {
        self.frames
            .iter()
            .map(|f| f.assignment().iter().map(|&v| f.codomain().label(v).to_string()).collect())
            .collect()
    }
}

/// Arranges a sequence of pairwise-consecutive comparable assignments into a
/// zigzag starting with an ascent, inserting stationary frames as needed.
pub(crate) fn zigzag_frames(target: &FinitePoset, seq: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let leq = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(&x, &y)| target.leq(x, y));
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(seq.len());
    for frame in seq {
        let Some(last) = out.last() else {
            out.push(frame);
            continue;
        };
        if *last == frame {
            continue;
        }
        let ascent_next = out.len() % 2 == 1;
        let fits = if ascent_next { leq(last, &frame) } else { leq(&frame, last) };
        if !fits {
            let copy = last.clone();
            out.push(copy);
        }
        out.push(frame);
    }
    out
}

/// Sequence of beat-point removals shrinking a down-set (or any subset) of a
/// poset to a core.
pub(crate) struct Retraction {
    pub core: FixedBitSet,
    /// `(removed point, its image at removal time)` in removal order.
    pub steps: Vec<(usize, usize)>,
}

impl Retraction {
    /// Final image of every element under the composite retraction.
    pub fn final_images(&self, len: usize) -> Vec<usize> {
        let mut img: Vec<usize> = (0..len).collect();
        for &(x, y) in self.steps.iter().rev() {
            img[x] = img[y];
        }
        img
    }
}

/// Repeatedly removes beat points (lowest index first in each sweep) from
/// the subposet induced on `members`.
pub(crate) fn core_retraction(p: &FinitePoset, members: &FixedBitSet) -> Retraction {
    let mut s = members.clone();
    s.grow(p.len());
    let mut steps = Vec::new();
    let mut buf = FixedBitSet::with_capacity(p.len());
    loop {
        let mut changed = false;
        for x in members.ones() {
            if !s.contains(x) {
                continue;
            }
            buf.clone_from(p.down_bits(x));
            buf.intersect_with(&s);
            buf.set(x, false);
            if let Some(y) = buf.ones().max_by_key(|&y| p.linear_position(y)) {
                if buf.is_subset(p.down_bits(y)) {
                    s.set(x, false);
                    steps.push((x, y));
                    changed = true;
                    continue;
                }
            }
            buf.clone_from(p.up_bits(x));
            buf.intersect_with(&s);
            buf.set(x, false);
            if let Some(z) = buf.ones().min_by_key(|&z| p.linear_position(z)) {
                if buf.is_subset(p.up_bits(z)) {
                    s.set(x, false);
                    steps.push((x, z));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Retraction { core: s, steps }
}

/// The core of `P`: the subposet left after iterated beat-point removal.
pub fn core(p: &FinitePoset) -> FinitePoset {
    let r = core_retraction(p, &p.full_set());
    p.induced(&r.core).0
}

pub fn is_contractible(p: &FinitePoset) -> bool {
    !p.is_empty() && core_retraction(p, &p.full_set()).core.count_ones(..) == 1
}

/// Precomputed data about a codomain used by homotopy searches into it.
pub struct TargetContext {
    poset: Arc<FinitePoset>,
    core_members: Vec<usize>,
    to_core: Vec<usize>,
    steps: Vec<(usize, usize)>,
    components: Vec<usize>,
    boundaries: BoundarySpace,
    higher: HigherBoundaries,
    words: usize,
    down_masks: Vec<u64>,
    up_masks: Vec<u64>,
    cmp_masks: Vec<u64>,
    /// Distances in the comparability graph of the core, `u8::MAX` across
    /// components.
    dist: Vec<u8>,
}

impl TargetContext {
    pub fn new(poset: Arc<FinitePoset>) -> Self {
        let r = core_retraction(&poset, &poset.full_set());
        let core_members: Vec<usize> = r.core.ones().collect();
        let (core_poset, _) = poset.induced(&r.core);
        let images = r.final_images(poset.len());
        let local: HashMap<usize, usize> = core_members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let to_core = images.iter().map(|x| local[x]).collect();
        let components = core_poset.component_ids();
        let boundaries = BoundarySpace::new(&core_poset);
        let higher = HigherBoundaries::new(&core_poset);
        let t = core_poset.len();
        let words = t.div_ceil(64).max(1);
        let mut down_masks = vec![0u64; t * words];
        let mut up_masks = vec![0u64; t * words];
        for a in 0..t {
            for b in core_poset.down_bits(a).ones() {
                down_masks[a * words + b / 64] |= 1 << (b % 64);
            }
            for b in core_poset.up_bits(a).ones() {
                up_masks[a * words + b / 64] |= 1 << (b % 64);
            }
        }
        let cmp_masks: Vec<u64> = down_masks.iter().zip(&up_masks).map(|(d, u)| d | u).collect();
        let mut dist = vec![u8::MAX; t * t];
        for a in 0..t {
            dist[a * t + a] = 0;
            let mut queue = std::collections::VecDeque::from([a]);
            while let Some(b) = queue.pop_front() {
                let d = dist[a * t + b];
                for c in 0..t {
                    if cmp_masks[b * words + c / 64] >> (c % 64) & 1 == 1 && dist[a * t + c] == u8::MAX {
                        dist[a * t + c] = d.saturating_add(1);
                        queue.push_back(c);
                    }
                }
            }
        }
        TargetContext {
            poset,
            core_members,
            to_core,
            steps: r.steps,
            components,
            boundaries,
            higher,
            words,
            down_masks,
            up_masks,
            cmp_masks,
            dist,
        }
    }

    pub fn poset(&self) -> &Arc<FinitePoset> {
        &self.poset
    }

    /// Image of a target element under the retraction onto the core,
    /// as an index into the core.
    pub fn to_core(&self, x: usize) -> usize {
        self.to_core[x]
    }

    pub fn core_size(&self) -> usize {
        self.core_members.len()
    }

    /// Whether a homology obstruction tells the core-valued maps apart.
    pub(crate) fn separates(&self, domain: &FinitePoset, f: &[u16], g: &[u16]) -> bool {
        h1_separates(domain, f, g, &self.boundaries)
            || (!self.higher.is_trivial() && higher_separates(domain, f, g, &self.higher))
    }
}

pub(crate) enum SearchResult {
    /// Frames aligned with the members (ascending), values in the target.
    Homotopic(Option<Vec<Vec<usize>>>),
    NotHomotopic,
    Unknown,
}

impl SearchResult {
    pub fn decision(&self) -> Decision {
        match self {
            SearchResult::Homotopic(_) => Decision::Yes,
            SearchResult::NotHomotopic => Decision::No,
            SearchResult::Unknown => Decision::Unknown,
        }
    }
}

/// Decides whether `f|Q ≃ g|Q` for the subposet `Q` of `domain` induced on
/// `members`; `f` and `g` are indexed by ambient elements and valued in
/// `target.poset()`.
pub(crate) fn homotopy_on(
    domain: &FinitePoset,
    members: &FixedBitSet,
    f: &[usize],
    g: &[usize],
    target: &TargetContext,
    budget: &Budget,
    want_witness: bool,
) -> SearchResult {
    let member_list: Vec<usize> = members.ones().collect();
    if member_list.iter().all(|&x| f[x] == g[x]) {
        return SearchResult::Homotopic(want_witness.then(|| vec![member_list.iter().map(|&x| f[x]).collect()]));
    }
    let retraction = core_retraction(domain, members);
    let (cpos, cm) = domain.induced(&retraction.core);
    let fl: Vec<u16> = cm.iter().map(|&x| target.to_core[f[x]] as u16).collect();
    let gl: Vec<u16> = cm.iter().map(|&x| target.to_core[g[x]] as u16).collect();

    let path = if fl == gl {
        vec![fl.clone()]
    } else {
        for comp in cpos.connected_components() {
            let x = comp[0];
            if target.components[fl[x] as usize] != target.components[gl[x] as usize] {
                return SearchResult::NotHomotopic;
            }
        }
        if target.separates(&cpos, &fl, &gl) {
            return SearchResult::NotHomotopic;
        }
        let guided = guided_search(&cpos, &fl, &gl, target, budget.max_nodes / 4, budget);
        match guided.map_or_else(|| bidirectional_search(&cpos, &fl, &gl, target, budget), BfsOutcome::Found) {
            BfsOutcome::Found(path) => path,
            BfsOutcome::Exhausted => return SearchResult::NotHomotopic,
            BfsOutcome::OutOfBudget => return SearchResult::Unknown,
        }
    };
    if !want_witness {
        return SearchResult::Homotopic(None);
    }
    SearchResult::Homotopic(Some(lift_frames(
        domain.len(),
        &member_list,
        &retraction,
        &cm,
        f,
        g,
        target,
        &path,
    )))
}

#[allow(clippy::too_many_arguments)]
fn lift_frames(
    domain_len: usize,
    members: &[usize],
    retraction: &Retraction,
    core_list: &[usize],
    f: &[usize],
    g: &[usize],
    target: &TargetContext,
    path: &[Vec<u16>],
) -> Vec<Vec<usize>> {
    // frames of f ∘ h_t where h_t runs through the partial domain retractions
    let domain_frames = |map: &[usize]| -> Vec<Vec<usize>> {
        let mut h: Vec<usize> = members.to_vec();
        let mut out = vec![h.iter().map(|&x| map[x]).collect::<Vec<_>>()];
        for &(x, y) in &retraction.steps {
            for v in h.iter_mut() {
                if *v == x {
                    *v = y;
                }
            }
            out.push(h.iter().map(|&x| map[x]).collect());
        }
        out
    };
    let target_frames = |start: &[usize]| -> Vec<Vec<usize>> {
        let mut cur = start.to_vec();
        let mut out = vec![cur.clone()];
        for &(x, y) in &target.steps {
            let mut moved = false;
            for v in cur.iter_mut() {
                if *v == x {
                    *v = y;
                    moved = true;
                }
            }
            if moved {
                out.push(cur.clone());
            }
        }
        out
    };
    let images = retraction.final_images(domain_len);
    let local_of: HashMap<usize, usize> = core_list.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let core_pos: Vec<usize> = members.iter().map(|&x| local_of[&images[x]]).collect();

    let mut seq: Vec<Vec<usize>> = Vec::new();
    let f_dom = domain_frames(f);
    let f_tgt = target_frames(f_dom.last().unwrap());
    seq.extend(f_dom);
    seq.extend(f_tgt);
    for state in path {
        seq.push(core_pos.iter().map(|&l| target.core_members[state[l] as usize]).collect());
    }
    let g_dom = domain_frames(g);
    let g_tgt = target_frames(g_dom.last().unwrap());
    seq.extend(g_tgt.into_iter().rev());
    seq.extend(g_dom.into_iter().rev());
    zigzag_frames(&target.poset, seq)
}

enum BfsOutcome {
    Found(Vec<Vec<u16>>),
    Exhausted,
    OutOfBudget,
}

struct Side {
    states: Vec<Box<[u16]>>,
    parent: Vec<u32>,
    index: HashMap<Box<[u16]>, u32>,
    frontier: Vec<u32>,
}

impl Side {
    fn new(start: &[u16]) -> Self {
        let key: Box<[u16]> = start.into();
        let mut index = HashMap::new();
        index.insert(key.clone(), 0);
        Side {
            states: vec![key],
            parent: vec![u32::MAX],
            index,
            frontier: vec![0],
        }
    }

    fn trace(&self, mut i: u32) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        while i != u32::MAX {
            out.push(self.states[i as usize].to_vec());
            i = self.parent[i as usize];
        }
        out
    }
}

/// Values `x` may move to with the rest of `state` fixed, as a mask over
/// the core; includes the current value.
fn allowed_moves(target: &TargetContext, lower: &[&[usize]], upper: &[&[usize]], state: &[u16], x: usize, scratch: &mut [u64]) {
    let w = target.words;
    let cur = state[x] as usize;
    scratch.copy_from_slice(&target.cmp_masks[cur * w..(cur + 1) * w]);
    for &y in lower[x] {
        let v = state[y] as usize;
        for (s, m) in scratch.iter_mut().zip(&target.up_masks[v * w..(v + 1) * w]) {
            *s &= m;
        }
    }
    for &z in upper[x] {
        let v = state[z] as usize;
        for (s, m) in scratch.iter_mut().zip(&target.down_masks[v * w..(v + 1) * w]) {
            *s &= m;
        }
    }
}

/// Best-first search from `f` toward `g`, ordered by the summed pointwise
/// distance to `g`. Finds a path quickly when one exists with few detours;
/// gives up after `limit` states.
fn guided_search(
    domain: &FinitePoset,
    f: &[u16],
    g: &[u16],
    target: &TargetContext,
    limit: usize,
    budget: &Budget,
) -> Option<Vec<Vec<u16>>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let n = domain.len();
    let t = target.core_members.len();
    let w = target.words;
    let d = |x: usize, v: u16| target.dist[v as usize * t + g[x] as usize] as u32;
    let lower: Vec<&[usize]> = (0..n).map(|x| domain.lower_covers(x)).collect();
    let upper: Vec<&[usize]> = (0..n).map(|x| domain.upper_covers(x)).collect();
    let mut states: Vec<Box<[u16]>> = vec![f.into()];
    let mut parent = vec![u32::MAX];
    let mut index: HashMap<Box<[u16]>, u32> = HashMap::new();
    index.insert(f.into(), 0);
    let h0: u32 = (0..n).map(|x| d(x, f[x])).sum();
    let mut heap = BinaryHeap::from([Reverse((h0, 0u32))]);
    let mut scratch = vec![0u64; w];
    let mut state = vec![0u16; n];
    while let Some(Reverse((h, node))) = heap.pop() {
        state.copy_from_slice(&states[node as usize]);
        for x in 0..n {
            let cur = state[x];
            allowed_moves(target, &lower, &upper, &state, x, &mut scratch);
            scratch[cur as usize / 64] &= !(1u64 << (cur % 64));
            for (wi, &word) in scratch.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    let v = (wi * 64 + bit) as u16;
                    state[x] = v;
                    if index.contains_key(state.as_slice()) {
                        continue;
                    }
                    let h2 = h + d(x, v) - d(x, cur);
                    let id = states.len() as u32;
                    let key: Box<[u16]> = state.as_slice().into();
                    index.insert(key.clone(), id);
                    states.push(key);
                    parent.push(node);
                    if h2 == 0 {
                        let mut path = Vec::new();
                        let mut i = id;
                        while i != u32::MAX {
                            path.push(states[i as usize].to_vec());
                            i = parent[i as usize];
                        }
                        path.reverse();
                        return Some(path);
                    }
                    if states.len() > limit || (states.len().is_multiple_of(4096) && budget.expired()) {
                        return None;
                    }
                    heap.push(Reverse((h2, id)));
                }
            }
            state[x] = cur;
        }
    }
    None
}

fn bidirectional_search(domain: &FinitePoset, f: &[u16], g: &[u16], target: &TargetContext, budget: &Budget) -> BfsOutcome {
    let n = domain.len();
    let w = target.words;
    let lower: Vec<&[usize]> = (0..n).map(|x| domain.lower_covers(x)).collect();
    let upper: Vec<&[usize]> = (0..n).map(|x| domain.upper_covers(x)).collect();
    let mut sides = [Side::new(f), Side::new(g)];
    let mut scratch = vec![0u64; w];
    let mut visited = 2usize;
    let mut state = vec![0u16; n];
    loop {
        if sides[0].frontier.is_empty() || sides[1].frontier.is_empty() {
            return BfsOutcome::Exhausted;
        }
        let s = if sides[0].frontier.len() <= sides[1].frontier.len() { 0 } else { 1 };
        let (a, b) = if s == 0 {
            let (x, y) = sides.split_at_mut(1);
            (&mut x[0], &y[0])
        } else {
            let (x, y) = sides.split_at_mut(1);
            (&mut y[0], &x[0])
        };
        let layer = std::mem::take(&mut a.frontier);
        let mut next = Vec::new();
        for &node in &layer {
            state.copy_from_slice(&a.states[node as usize]);
            for x in 0..n {
                let cur = state[x] as usize;
                allowed_moves(target, &lower, &upper, &state, x, &mut scratch);
                scratch[cur / 64] &= !(1u64 << (cur % 64));
                for (wi, &word) in scratch.iter().enumerate() {
                    let mut word = word;
                    while word != 0 {
                        let bit = word.trailing_zeros() as usize;
                        word &= word - 1;
                        state[x] = (wi * 64 + bit) as u16;
                        if let Some(&other) = b.index.get(state.as_slice()) {
                            let mut path = a.trace(node);
                            path.reverse();
                            path.push(state.clone());
                            let mut rest = b.trace(other);
                            rest.remove(0);
                            path.extend(rest);
                            if s == 1 {
                                path.reverse();
                            }
                            return BfsOutcome::Found(path);
                        }
                        if !a.index.contains_key(state.as_slice()) {
                            let key: Box<[u16]> = state.as_slice().into();
                            let id = a.states.len() as u32;
                            a.index.insert(key.clone(), id);
                            a.states.push(key);
                            a.parent.push(node);
                            next.push(id);
                            visited += 1;
                            if visited > budget.max_nodes || (visited.is_multiple_of(4096) && budget.expired()) {
                                return BfsOutcome::OutOfBudget;
                            }
                        }
                    }
                }
                state[x] = cur as u16;
            }
        }
        a.frontier = next;
    }
}

fn check_pair(f: &MonotoneMap, g: &MonotoneMap) -> Result<()> {
    if f.domain() != g.domain() || f.codomain() != g.codomain() {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// Whether `f ≃ g`. `Unknown` only when the search budget runs out.
pub fn homotopic(f: &MonotoneMap, g: &MonotoneMap, budget: &Budget) -> Result<Decision> {
    check_pair(f, g)?;
    let ctx = TargetContext::new(f.codomain().clone());
    let dom = f.domain();
    Ok(homotopy_on(dom, &dom.full_set(), f.assignment(), g.assignment(), &ctx, budget, false).decision())
}

/// An explicit zigzag from `f` to `g`, `None` when they are not homotopic.
pub fn homotopy_witness(f: &MonotoneMap, g: &MonotoneMap, budget: &Budget) -> Result<Option<HomotopyWitness>> {
    check_pair(f, g)?;
    let ctx = TargetContext::new(f.codomain().clone());
    let dom = f.domain();
    match homotopy_on(dom, &dom.full_set(), f.assignment(), g.assignment(), &ctx, budget, true) {
        SearchResult::Homotopic(Some(frames)) => Ok(Some(frames_to_witness(dom, f.codomain(), frames))),
        SearchResult::Homotopic(None) => unreachable!("witness requested"),
        SearchResult::NotHomotopic => Ok(None),
        SearchResult::Unknown => Err(Error::BudgetExceeded),
    }
}

fn frames_to_witness(domain: &Arc<FinitePoset>, codomain: &Arc<FinitePoset>, frames: Vec<Vec<usize>>) -> HomotopyWitness {
    HomotopyWitness {
        frames: frames
            .into_iter()
            .map(|a| MonotoneMap::new_unchecked(domain.clone(), codomain.clone(), a))
            .collect(),
    }
}

/// Whether a homotopy `H : X × J_m -> Y` from `f` to `g` exists with exactly
/// this fence length (stationary steps allowed).
pub fn homotopic_bounded(f: &MonotoneMap, g: &MonotoneMap, m: usize, budget: &Budget) -> Result<Decision> {
    Ok(match bounded_homotopy(f, g, m, budget)? {
        Some(Some(_)) => Decision::Yes,
        Some(None) => Decision::No,
        None => Decision::Unknown,
    })
}

/// Witness version of [`homotopic_bounded`]: `Some(Some(w))` on success,
/// `Some(None)` when impossible, `None` when the budget ran out.
pub fn bounded_homotopy(f: &MonotoneMap, g: &MonotoneMap, m: usize, budget: &Budget) -> Result<Option<Option<HomotopyWitness>>> {
    check_pair(f, g)?;
    let dom = f.domain();
    let n = dom.len();
    if m == 0 {
        return Ok(Some((f == g).then(|| HomotopyWitness { frames: vec![f.clone()] })));
    }
    let var = |x: usize, t: usize| t * n + x;
    let mut cons = Vec::new();
    for t in 0..=m {
        for &(a, b) in dom.hasse_edges() {
            cons.push((var(a, t), var(b, t)));
        }
    }
    for t in 0..m {
        for x in 0..n {
            if t % 2 == 0 {
                cons.push((var(x, t), var(x, t + 1)));
            } else {
                cons.push((var(x, t + 1), var(x, t)));
            }
        }
    }
    let mut fixed = vec![None; n * (m + 1)];
    for x in 0..n {
        fixed[var(x, 0)] = Some(f.apply(x));
        fixed[var(x, m)] = Some(g.apply(x));
    }
    let problem = ExtensionProblem::new(f.codomain(), n * (m + 1), &cons);
    Ok(match problem.solve(&fixed, budget) {
        ExtensionOutcome::Solved(sol) => {
            let frames = (0..=m).map(|t| sol[t * n..(t + 1) * n].to_vec()).collect();
            Some(Some(frames_to_witness(dom, f.codomain(), frames)))
        }
        ExtensionOutcome::Infeasible => Some(None),
        ExtensionOutcome::Unknown => None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Down,
    Up,
}

/// All order-preserving `g` with `g <= f` (`Down`) or `g >= f` (`Up`)
/// pointwise, `f` included. Elements are decided in ascending index order and
/// values tried in ascending order.
pub fn neighbors_in_mapping_poset(f: &MonotoneMap, direction: Direction) -> Vec<MonotoneMap> {
    let dom = f.domain();
    let cod = f.codomain();
    let n = dom.len();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|x| match direction {
            Direction::Down => cod.down_bits(f.apply(x)).ones().collect(),
            Direction::Up => cod.up_bits(f.apply(x)).ones().collect(),
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(
        x: usize,
        dom: &FinitePoset,
        cod: &FinitePoset,
        choices: &[Vec<usize>],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if x == dom.len() {
            out.push(cur.clone());
            return;
        }
        for &v in &choices[x] {
            let ok = (0..x).all(|y| {
                (!dom.leq(y, x) || cod.leq(cur[y], v)) && (!dom.leq(x, y) || cod.leq(v, cur[y]))
            });
            if ok {
                cur[x] = v;
                rec(x + 1, dom, cod, choices, cur, out);
            }
        }
    }
    rec(0, dom, cod, &choices, &mut cur, &mut out);
    out.into_iter()
        .map(|a| MonotoneMap::new_unchecked(dom.clone(), cod.clone(), a))
        .collect()
}

/// Every order-preserving map `domain -> codomain`, or `None` when there are
/// more than `limit`.
pub fn enumerate_monotone_maps(domain: &FinitePoset, codomain: &FinitePoset, limit: usize) -> Option<Vec<Vec<usize>>> {
    let order = domain.linear_extension();
    let mut out = Vec::new();
    let mut cur = vec![0usize; domain.len()];
    fn rec(
        i: usize,
        order: &[usize],
        dom: &FinitePoset,
        cod: &FinitePoset,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        if i == order.len() {
            out.push(cur.clone());
            return out.len() <= limit;
        }
        let x = order[i];
        for v in 0..cod.len() {
            if dom.lower_covers(x).iter().all(|&y| cod.leq(cur[y], v)) {
                cur[x] = v;
                if !rec(i + 1, order, dom, cod, cur, out, limit) {
                    return false;
                }
            }
        }
        true
    }
    if rec(0, order, domain, codomain, &mut cur, &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

/// Whether the inclusion of the open set `q` into its ambient space is
/// homotopic to a constant map.
pub fn contractible_in(q: &DownSet, budget: &Budget) -> Decision {
    let ambient = q.ambient();
    let Some(x0) = q.iter().next() else {
        return Decision::Yes;
    };
    let ctx = TargetContext::new(ambient.clone());
    let inclusion: Vec<usize> = (0..ambient.len()).collect();
    let constant = vec![x0; ambient.len()];
    homotopy_on(ambient, q.members(), &inclusion, &constant, &ctx, budget, false).decision()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{chain, fence, minimal_open, sphere, wedge_fence};

    fn arc(p: FinitePoset) -> Arc<FinitePoset> {
        Arc::new(p)
    }

    #[test]
    fn concatenation_parity_cases() {
        let s = arc(sphere(1));
        // labels: 0=a, 1=b, 2=c, 3=d
        let g1 = CombinatorialPath::new(s.clone(), vec![0, 2, 1]).unwrap();
        let g2 = CombinatorialPath::new(s.clone(), vec![1, 3, 0]).unwrap();
        let c = concatenate(&g1, &g2).unwrap();
        assert_eq!(c.values(), &[0, 2, 1, 3, 0]);
        assert_eq!(c.length(), 4);

        let g1 = CombinatorialPath::new(s.clone(), vec![0, 2]).unwrap();
        let g2 = CombinatorialPath::new(s.clone(), vec![2, 2, 1]).unwrap();
        let c = concatenate(&g1, &g2).unwrap();
        assert_eq!(c.values(), &[0, 2, 2, 2, 1]);
        assert_eq!(c.length(), 4);

        let constant = CombinatorialPath::new(s.clone(), vec![0]).unwrap();
        let c = concatenate(&constant, &g1).unwrap();
        assert_eq!(c.values(), g1.values());

        assert_eq!(concatenate(&g2, &g2).unwrap_err(), Error::EndpointMismatch);
        assert!(CombinatorialPath::new(s, vec![2, 0]).is_err());
    }

    #[test]
    fn odd_concatenation_repeats_the_junction() {
        // γ1 = (a <= c), γ2 = (c <= c >= b): the odd case inserts c at position 2
        let s = arc(sphere(1));
        let g1 = CombinatorialPath::new(s.clone(), vec![0, 2]).unwrap();
        let g2 = CombinatorialPath::new(s.clone(), vec![2, 2, 1]).unwrap();
        let c = concatenate(&g1, &g2).unwrap();
        assert_eq!(c.values()[2], 2);
        assert_eq!(c.length(), g1.length() + g2.length() + 1);
    }

    #[test]
    fn cores() {
        for k in 1..5 {
            assert!(is_contractible(&chain(k)));
        }
        for m in 1..4 {
            assert_eq!(core(&sphere(m)).len(), 2 * m + 2);
            assert!(!is_contractible(&sphere(m)));
            assert!(is_contractible(&fence(m)));
        }
        assert!(is_contractible(&wedge_fence(3, 3).unwrap()));
        assert!(!is_contractible(&crate::poset::antichain(2)));
    }

    #[test]
    fn homotopy_basics() {
        let s = arc(sphere(1));
        let id = MonotoneMap::identity(s.clone());
        assert_eq!(homotopic(&id, &id, &Budget::default()).unwrap(), Decision::Yes);
        let c = MonotoneMap::constant(s.clone(), s.clone(), 2).unwrap();
        assert_eq!(homotopic(&id, &c, &Budget::default()).unwrap(), Decision::No);

        let pt = arc(chain(1));
        let cc = MonotoneMap::constant(pt.clone(), s.clone(), 2).unwrap();
        let cd = MonotoneMap::constant(pt.clone(), s.clone(), 3).unwrap();
        assert_eq!(homotopic(&cc, &cd, &Budget::default()).unwrap(), Decision::Yes);
        let w = homotopy_witness(&cc, &cd, &Budget::default()).unwrap().unwrap();
        w.validate().unwrap();
        assert_eq!(w.frames.first().unwrap(), &cc);
        assert_eq!(w.frames.last().unwrap(), &cd);
    }

    #[test]
    fn maps_out_of_a_space_with_maximum_are_constant_up_to_homotopy() {
        let p = arc(wedge_fence(2, 2).unwrap());
        let top_dom = arc(chain(3));
        for v in [0usize, 1, 2, 3] {
            let f = MonotoneMap::new(top_dom.clone(), p.clone(), {
                let mut a = vec![v; 3];
                a[2] = *p.up_bits(v).ones().collect::<Vec<_>>().last().unwrap();
                a
            });
            let Ok(f) = f else { continue };
            let top_value = f.apply(2);
            let c = MonotoneMap::constant(top_dom.clone(), p.clone(), top_value).unwrap();
            assert!(f.pointwise_leq(&c));
            assert_eq!(homotopic(&f, &c, &Budget::default()).unwrap(), Decision::Yes);
        }
    }

    #[test]
    fn bounded_homotopies() {
        let s = arc(sphere(1));
        let pt = arc(chain(1));
        let ca = MonotoneMap::constant(pt.clone(), s.clone(), 0).unwrap();
        let cc = MonotoneMap::constant(pt.clone(), s.clone(), 2).unwrap();
        let b = Budget::default();
        assert_eq!(homotopic_bounded(&ca, &ca, 0, &b).unwrap(), Decision::Yes);
        // a <= c: one ascent
        assert_eq!(homotopic_bounded(&ca, &cc, 1, &b).unwrap(), Decision::Yes);
        // c >= a: the pattern starts with an ascent, so two steps are needed
        assert_eq!(homotopic_bounded(&cc, &ca, 1, &b).unwrap(), Decision::No);
        assert_eq!(homotopic_bounded(&cc, &ca, 2, &b).unwrap(), Decision::Yes);
        let w = bounded_homotopy(&cc, &ca, 2, &b).unwrap().unwrap().unwrap();
        w.validate().unwrap();
        assert_eq!(w.length(), 2);
    }

    #[test]
    fn neighbor_enumeration() {
        let s = arc(sphere(1));
        let pt = arc(chain(1));
        let cc = MonotoneMap::constant(pt.clone(), s.clone(), 2).unwrap();
        let down: Vec<usize> = neighbors_in_mapping_poset(&cc, Direction::Down)
            .iter()
            .map(|g| g.apply(0))
            .collect();
        assert_eq!(down, vec![0, 1, 2]);
        let c2 = arc(chain(2));
        let id = MonotoneMap::identity(c2.clone());
        assert_eq!(neighbors_in_mapping_poset(&id, Direction::Up).len(), 2);
        let iso = arc(chain(1));
        let only = MonotoneMap::identity(iso);
        assert_eq!(neighbors_in_mapping_poset(&only, Direction::Up).len(), 1);
    }

    #[test]
    fn contractible_opens() {
        let s = arc(sphere(1));
        let b = Budget::default();
        assert_eq!(contractible_in(&minimal_open(&s, 2).unwrap(), &b), Decision::Yes);
        assert_eq!(contractible_in(&DownSet::full(s.clone()), &b), Decision::No);
    }

    #[test]
    fn monotone_map_enumeration_counts() {
        // Hom(chain 2, chain 2) has 3 maps.
        assert_eq!(enumerate_monotone_maps(&chain(2), &chain(2), 100).unwrap().len(), 3);
        assert!(enumerate_monotone_maps(&crate::poset::antichain(6), &chain(3), 10).is_none());
    }
}

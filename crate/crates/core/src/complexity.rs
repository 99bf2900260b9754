//! Sectional-category style invariants of finite spaces: `cat`, `CC_n`, the
//! bounded `CC_{n,m}` in both the wedge and the linear form, section
//! witnesses, and the reindexing transports between them.
//!
//! Every criterion is downward closed (restricting a section or a homotopy
//! to a smaller open keeps it valid), so a minimum cover can always be taken
//! from opens generated by maximal points of the ambient space. Covers are
//! therefore searched over sets of maximal points ("facets").

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::budget::{Budget, Decision};
use crate::cover::exact_min_cover;
use crate::error::{Error, Result};
use crate::extension::{ExtensionOutcome, ExtensionProblem};
use crate::homotopy::{homotopy_on, HomotopyWitness, SearchResult, TargetContext};
use crate::poset::{fence, power, tuple_of, wedge_fence, wedge_index, DownSet, FinitePoset, MonotoneMap, DEFAULT_SIZE_CAP};
use crate::report::{Certification, ComplexityReport, Strategy, Value};

/// Shape of the path space: `n` paths glued at a point (`q_{n,m}`), or one
/// path visited at `0, m, .., (n-1)m` (`q'_{n,m}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Wedge,
    Linear,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Wedge => "wedge",
            Variant::Linear => "linear",
        }
    }
}

/// The fence a section takes values in: `J_{n,m}` or `J_{(n-1)m}`.
pub fn path_shape(variant: Variant, n: usize, m: usize) -> Result<FinitePoset> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    match variant {
        Variant::Wedge => wedge_fence(n, m),
        Variant::Linear => Ok(fence((n - 1) * m)),
    }
}

/// Nodes of the path shape evaluated by the endpoint map, in order `1..=n`.
pub fn marked_nodes(variant: Variant, n: usize, m: usize) -> Vec<usize> {
    match variant {
        Variant::Wedge => (1..=n).map(|j| wedge_index(n, j, m)).collect(),
        Variant::Linear => (0..n).map(|j| j * m).collect(),
    }
}

/// A section over an open `Q` of the endpoint map: one path per point of
/// `Q`, monotone in the point, whose marked nodes evaluate to prescribed
/// values (the coordinates of the point, or `ρ_j` of it after subdivision).
#[derive(Clone, Debug)]
pub struct SectionWitness {
    pub variant: Variant,
    pub n: usize,
    pub m: usize,
    pub domain: DownSet,
    pub base: Arc<FinitePoset>,
    /// `ends[j][x]`: required value at marked node `j` over `x` (all of the ambient).
    pub ends: Arc<Vec<Vec<usize>>>,
    /// One path per member of `domain` in ascending order, indexed by node.
    pub paths: Vec<Vec<usize>>,
}

impl SectionWitness {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidWitness(msg));
        let ambient = self.domain.ambient();
        if self.ends.len() != self.n || self.ends.iter().any(|e| e.len() != ambient.len()) {
            return bad("endpoint maps do not match the ambient space".into());
        }
        let members: Vec<usize> = self.domain.iter().collect();
        if self.paths.len() != members.len() {
            return bad(format!("{} paths for {} points", self.paths.len(), members.len()));
        }
        let shape = path_shape(self.variant, self.n, self.m)?;
        let marked = marked_nodes(self.variant, self.n, self.m);
        let mut pos = vec![usize::MAX; ambient.len()];
        for (i, &x) in members.iter().enumerate() {
            pos[x] = i;
        }
        for (i, &x) in members.iter().enumerate() {
            let path = &self.paths[i];
            if path.len() != shape.len() || path.iter().any(|&v| v >= self.base.len()) {
                return bad(format!("path over {} has the wrong shape", ambient.label(x)));
            }
            for &(lo, hi) in shape.hasse_edges() {
                if !self.base.leq(path[lo], path[hi]) {
                    return bad(format!("path over {} is not order preserving", ambient.label(x)));
                }
            }
            for (j, &node) in marked.iter().enumerate() {
                if path[node] != self.ends[j][x] {
                    return bad(format!("path over {} misses endpoint {}", ambient.label(x), j + 1));
                }
            }
            for &y in ambient.lower_covers(x) {
                let lower = &self.paths[pos[y]];
                if lower.iter().zip(path).any(|(&a, &b)| !self.base.leq(a, b)) {
                    return bad(format!(
                        "paths over {} and {} are not comparable",
                        ambient.label(y),
                        ambient.label(x)
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ambient = self.domain.ambient();
        json!({
            "kind": "section",
            "variant": self.variant.name(),
            "n": self.n,
            "m": self.m,
            "domain": self.domain.labels(),
            "paths": self.domain.iter().zip(&self.paths).map(|(x, p)| {
                json!({
                    "point": ambient.label(x),
                    "path": p.iter().map(|&v| self.base.label(v)).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }

    /// Precomposes every path with `map`, a node map from a new shape to the
    /// current one.
    fn reindexed(&self, variant: Variant, m: usize, map: &[usize]) -> SectionWitness {
        SectionWitness {
            variant,
            n: self.n,
            m,
            domain: self.domain.clone(),
            base: self.base.clone(),
            ends: self.ends.clone(),
            paths: self.paths.iter().map(|p| map.iter().map(|&t| p[t]).collect()).collect(),
        }
    }
}

fn checked(w: SectionWitness) -> Result<SectionWitness> {
    w.validate()?;
    Ok(w)
}

/// Pushes a witness at length `m` to length `m + 1` along the retraction
/// `J_{n,m+1} -> J_{n,m}` (wedge) or `J_{(n-1)(m+1)} -> J_{(n-1)m}` (linear).
pub fn transport_r(w: &SectionWitness) -> Result<SectionWitness> {
    w.validate()?;
    let (n, m) = (w.n, w.m);
    let map: Vec<usize> = match w.variant {
        Variant::Wedge => {
            let mut map = vec![0; n * (m + 1) + 1];
            for j in 1..=n {
                for s in 1..=m + 1 {
                    map[wedge_index(n, j, s)] = wedge_index(n, j, s.min(m));
                }
            }
            map
        }
        Variant::Linear => (0..=(n - 1) * (m + 1)).map(|t| linear_retraction(t, m, n)).collect(),
    };
    checked(w.reindexed(w.variant, m + 1, &map))
}

/// Image of node `t` of `J_{(n-1)(m+1)}` in `J_{(n-1)m}`: each segment is
/// squeezed by one step, at its end when it starts with the same slope as
/// its target segment and at its start otherwise.
fn linear_retraction(t: usize, m: usize, n: usize) -> usize {
    let seg = (t / (m + 1)).min(n - 2);
    let s = t - seg * (m + 1);
    let same_slope = (seg * (m + 1)) % 2 == (seg * m) % 2;
    seg * m + if same_slope { s.min(m) } else { s.saturating_sub(1) }
}

/// Wedge witness at even `m` to a linear witness at `2m`, along the walk
/// `J_{(n-1)2m} -> J_{n,m}` that goes from the end of branch `j` back to the
/// base point and out to the end of branch `j + 1`.
pub fn transport_f(w: &SectionWitness) -> Result<SectionWitness> {
    if w.variant != Variant::Wedge {
        return Err(Error::InvalidArgument("transport_f expects a wedge witness".into()));
    }
    if !w.m.is_multiple_of(2) {
        return Err(Error::ParityViolation(format!("m = {} is odd", w.m)));
    }
    w.validate()?;
    let (n, m) = (w.n, w.m);
    let len = (n - 1) * 2 * m;
    let map: Vec<usize> = (0..=len)
        .map(|t| {
            if m == 0 {
                return 0;
            }
            let seg = (t / (2 * m)).min(n - 2);
            let s = t - seg * 2 * m;
            if s <= m {
                wedge_index(n, seg + 1, m - s)
            } else {
                wedge_index(n, seg + 2, s - m)
            }
        })
        .collect();
    checked(w.reindexed(Variant::Linear, 2 * m, &map))
}

/// Linear witness at `m ≡ 0 (mod 4)` to a wedge witness at
/// `k = (n-1)m/2`, along `J_{n,k} -> J_{(n-1)m}` sending the base point to
/// the middle node and branch `j` toward node `(j-1)m`, idling once there.
pub fn transport_g(w: &SectionWitness) -> Result<SectionWitness> {
    if w.variant != Variant::Linear {
        return Err(Error::InvalidArgument("transport_g expects a linear witness".into()));
    }
    if !w.m.is_multiple_of(4) {
        return Err(Error::ParityViolation(format!("m = {} is not a multiple of 4", w.m)));
    }
    w.validate()?;
    let (n, m) = (w.n, w.m);
    let k = (n - 1) * m / 2;
    let mut map = vec![k; n * k + 1];
    for j in 1..=n {
        let goal = (j - 1) * m;
        for t in 1..=k {
            map[wedge_index(n, j, t)] = if goal <= k {
                k - t.min(k - goal)
            } else {
                k + t.min(goal - k)
            };
        }
    }
    checked(w.reindexed(Variant::Wedge, k, &map))
}

/// Evidence that one open passes a criterion.
#[derive(Clone, Debug)]
pub enum CoverWitness {
    Section(SectionWitness),
    /// Homotopy from the inclusion of the open to a constant map.
    Contraction(HomotopyWitness),
}

impl CoverWitness {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoverWitness::Section(s) => s.validate(),
            CoverWitness::Contraction(h) => h.validate(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CoverWitness::Section(s) => s.to_json(),
            CoverWitness::Contraction(h) => {
                let dom = h.frames[0].domain();
                json!({
                    "kind": "contraction",
                    "domain": dom.labels(),
                    "frames": h.to_labels(),
                })
            }
        }
    }
}

enum Kind {
    /// All `maps` are pairwise homotopic on the open.
    Homotopic {
        base: Arc<FinitePoset>,
        maps: Arc<Vec<Vec<usize>>>,
        target: Arc<TargetContext>,
    },
    /// The inclusion of the open is homotopic to a constant.
    Contractible { target: Arc<TargetContext> },
    /// A section of the endpoint map with paths of fixed length exists.
    Bounded {
        base: Arc<FinitePoset>,
        maps: Arc<Vec<Vec<usize>>>,
        m: usize,
        variant: Variant,
    },
}

/// A downward-closed property of opens of an ambient finite space.
pub struct Criterion {
    ambient: Arc<FinitePoset>,
    kind: Kind,
}

fn projections(base: &FinitePoset, n: usize, len: usize) -> Vec<Vec<usize>> {
    let tuples: Vec<Vec<usize>> = (0..len).map(|x| tuple_of(x, base.len(), n)).collect();
    (0..n).map(|j| tuples.iter().map(|t| t[j]).collect()).collect()
}

fn check_maps(ambient: &FinitePoset, base: &FinitePoset, maps: &[Vec<usize>]) -> Result<()> {
    if maps.len() < 2 {
        return Err(Error::InvalidArgument("need at least two maps".into()));
    }
    for map in maps {
        MonotoneMap::new(Arc::new(ambient.clone()), Arc::new(base.clone()), map.clone())?;
    }
    Ok(())
}

impl Criterion {
    /// Opens of `P^n` on which the projections are homotopic (the `m -> ∞`
    /// form of sectionability).
    pub fn limit(base: &Arc<FinitePoset>, n: usize, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("n must be at least 2".into()));
        }
        let ambient = Arc::new(power(base, n, cap)?);
        let maps = projections(base, n, ambient.len());
        Ok(Criterion {
            kind: Kind::Homotopic {
                base: base.clone(),
                maps: Arc::new(maps),
                target: Arc::new(TargetContext::new(base.clone())),
            },
            ambient,
        })
    }

    /// Opens of `ambient` on which the given maps into `base` are pairwise
    /// homotopic.
    pub fn homotopic_maps(ambient: Arc<FinitePoset>, base: Arc<FinitePoset>, maps: Vec<Vec<usize>>) -> Result<Self> {
        check_maps(&ambient, &base, &maps)?;
        Ok(Criterion {
            kind: Kind::Homotopic {
                target: Arc::new(TargetContext::new(base.clone())),
                base,
                maps: Arc::new(maps),
            },
            ambient,
        })
    }

    /// Opens of `P` whose inclusion is null-homotopic.
    pub fn contractible(p: &Arc<FinitePoset>) -> Self {
        Criterion {
            ambient: p.clone(),
            kind: Kind::Contractible {
                target: Arc::new(TargetContext::new(p.clone())),
            },
        }
    }

    /// Opens of `P^n` over which `q_{n,m}` (wedge) or `q'_{n,m}` (linear)
    /// has a section.
    pub fn bounded(base: &Arc<FinitePoset>, n: usize, m: usize, variant: Variant, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("n must be at least 2".into()));
        }
        let ambient = Arc::new(power(base, n, cap)?);
        let maps = projections(base, n, ambient.len());
        Ok(Criterion {
            ambient,
            kind: Kind::Bounded {
                base: base.clone(),
                maps: Arc::new(maps),
                m,
                variant,
            },
        })
    }

    /// Bounded sections over `ambient` whose marked nodes must hit `maps`.
    pub fn bounded_maps(
        ambient: Arc<FinitePoset>,
        base: Arc<FinitePoset>,
        maps: Vec<Vec<usize>>,
        m: usize,
        variant: Variant,
    ) -> Result<Self> {
        check_maps(&ambient, &base, &maps)?;
        Ok(Criterion {
            ambient,
            kind: Kind::Bounded {
                base,
                maps: Arc::new(maps),
                m,
                variant,
            },
        })
    }

    pub fn ambient(&self) -> &Arc<FinitePoset> {
        &self.ambient
    }

    /// Whether `members` (a down-set of the ambient) passes.
    pub fn check(&self, members: &FixedBitSet, budget: &Budget) -> Decision {
        match &self.kind {
            Kind::Homotopic { maps, target, .. } => {
                let mut acc = Decision::Yes;
                for j in 1..maps.len() {
                    let d = homotopy_on(&self.ambient, members, &maps[0], &maps[j], target, budget, false).decision();
                    acc = acc.and(d);
                    if acc.is_no() {
                        break;
                    }
                }
                acc
            }
            Kind::Contractible { target } => {
                let Some(x0) = members.ones().next() else {
                    return Decision::Yes;
                };
                let inclusion: Vec<usize> = (0..self.ambient.len()).collect();
                let constant = vec![x0; self.ambient.len()];
                homotopy_on(&self.ambient, members, &inclusion, &constant, target, budget, false).decision()
            }
            Kind::Bounded { base, maps, m, variant } => {
                bounded_section(&self.ambient, base, maps, *m, *variant, members, budget, false).0
            }
        }
    }

    /// Evidence for `members`; `Ok(None)` when it does not pass.
    pub fn witness(&self, members: &FixedBitSet, budget: &Budget) -> Result<Option<CoverWitness>> {
        let open = DownSet::new(self.ambient.clone(), members.clone())?;
        match &self.kind {
            Kind::Homotopic { base, maps, target } => {
                Ok(homotopy_section(&open, base, maps, target, Variant::Linear, budget)?.map(CoverWitness::Section))
            }
            Kind::Contractible { target } => {
                let Some(x0) = members.ones().next() else {
                    return Ok(None);
                };
                let inclusion: Vec<usize> = (0..self.ambient.len()).collect();
                let constant = vec![x0; self.ambient.len()];
                match homotopy_on(&self.ambient, members, &inclusion, &constant, target, budget, true) {
                    SearchResult::Homotopic(Some(frames)) => {
                        let dom = Arc::new(self.ambient.induced(members).0);
                        let frames = frames
                            .into_iter()
                            .map(|a| MonotoneMap::new(dom.clone(), self.ambient.clone(), a))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Some(CoverWitness::Contraction(HomotopyWitness { frames })))
                    }
                    SearchResult::NotHomotopic => Ok(None),
                    _ => Err(Error::BudgetExceeded),
                }
            }
            Kind::Bounded { base, maps, m, variant } => {
                match bounded_section(&self.ambient, base, maps, *m, *variant, members, budget, true) {
                    (Decision::Yes, Some(paths)) => Ok(Some(CoverWitness::Section(SectionWitness {
                        variant: *variant,
                        n: maps.len(),
                        m: *m,
                        domain: open,
                        base: base.clone(),
                        ends: maps.clone(),
                        paths,
                    }))),
                    (Decision::Unknown, _) => Err(Error::BudgetExceeded),
                    _ => Ok(None),
                }
            }
        }
    }
}

/// Constraint search for a bounded section over `members`.
#[allow(clippy::too_many_arguments)]
fn bounded_section(
    ambient: &FinitePoset,
    base: &FinitePoset,
    maps: &[Vec<usize>],
    m: usize,
    variant: Variant,
    members: &FixedBitSet,
    budget: &Budget,
    want: bool,
) -> (Decision, Option<Vec<Vec<usize>>>) {
    let n = maps.len();
    let shape = path_shape(variant, n, m).expect("n >= 2 checked at construction");
    let width = shape.len();
    let marked = marked_nodes(variant, n, m);
    let list: Vec<usize> = members.ones().collect();
    let mut pos = vec![usize::MAX; ambient.len()];
    for (i, &x) in list.iter().enumerate() {
        pos[x] = i;
    }
    let mut fixed: Vec<Option<usize>> = vec![None; list.len() * width];
    for (i, &x) in list.iter().enumerate() {
        for (j, &node) in marked.iter().enumerate() {
            let slot = &mut fixed[i * width + node];
            let v = maps[j][x];
            match slot {
                Some(old) if *old != v => return (Decision::No, None),
                _ => *slot = Some(v),
            }
        }
    }
    let mut cons = Vec::new();
    for (i, &x) in list.iter().enumerate() {
        for &(lo, hi) in shape.hasse_edges() {
            cons.push((i * width + lo, i * width + hi));
        }
        for &y in ambient.lower_covers(x) {
            let l = pos[y];
            for t in 0..width {
                cons.push((l * width + t, i * width + t));
            }
        }
    }
    let problem = ExtensionProblem::new(base, fixed.len(), &cons);
    match problem.solve(&fixed, budget) {
        ExtensionOutcome::Solved(sol) => (
            Decision::Yes,
            want.then(|| sol.chunks(width).map(|c| c.to_vec()).collect()),
        ),
        ExtensionOutcome::Infeasible => (Decision::No, None),
        ExtensionOutcome::Unknown => (Decision::Unknown, None),
    }
}

fn frames_for(
    open: &DownSet,
    f: &[usize],
    g: &[usize],
    target: &TargetContext,
    budget: &Budget,
) -> Result<Option<Vec<Vec<usize>>>> {
    match homotopy_on(open.ambient(), open.members(), f, g, target, budget, true) {
        SearchResult::Homotopic(frames) => Ok(frames),
        SearchResult::NotHomotopic => Ok(None),
        SearchResult::Unknown => Err(Error::BudgetExceeded),
    }
}

/// Builds a section out of homotopies between the evaluation maps: for the
/// linear form the homotopies `e_j ≃ e_{j+1}` are laid end to end, for the
/// wedge form branch `j` carries a homotopy `e_1 ≃ e_j`.
fn homotopy_section(
    open: &DownSet,
    base: &Arc<FinitePoset>,
    maps: &Arc<Vec<Vec<usize>>>,
    target: &TargetContext,
    variant: Variant,
    budget: &Budget,
) -> Result<Option<SectionWitness>> {
    let n = maps.len();
    let mut pieces = Vec::with_capacity(n - 1);
    for j in 1..n {
        let from = match variant {
            Variant::Linear => &maps[j - 1],
            Variant::Wedge => &maps[0],
        };
        match frames_for(open, from, &maps[j], target, budget)? {
            Some(frames) => pieces.push(frames),
            None => return Ok(None),
        }
    }
    let longest = pieces.iter().map(|p| p.len() - 1).max().unwrap_or(0);
    let m = match variant {
        Variant::Linear => longest + longest % 2,
        Variant::Wedge => longest,
    };
    for p in pieces.iter_mut() {
        while p.len() < m + 1 {
            let last = p.last().unwrap().clone();
            p.push(last);
        }
    }
    let members: Vec<usize> = open.iter().collect();
    let shape_len = path_shape(variant, n, m)?.len();
    let mut paths = vec![vec![0usize; shape_len]; members.len()];
    for (i, path) in paths.iter_mut().enumerate() {
        match variant {
            Variant::Linear => {
                for (j, piece) in pieces.iter().enumerate() {
                    for (s, frame) in piece.iter().enumerate() {
                        path[j * m + s] = frame[i];
                    }
                }
            }
            Variant::Wedge => {
                path[0] = pieces[0][0][i];
                for s in 1..=m {
                    path[wedge_index(n, 1, s)] = maps[0][members[i]];
                }
                for (j, piece) in pieces.iter().enumerate() {
                    for (s, frame) in piece.iter().enumerate().skip(1) {
                        path[wedge_index(n, j + 2, s)] = frame[i];
                    }
                }
            }
        }
    }
    checked(SectionWitness {
        variant,
        n,
        m,
        domain: open.clone(),
        base: base.clone(),
        ends: maps.clone(),
        paths,
    })
    .map(Some)
}

/// Whether the projections `P^n -> P` are homotopic on `q`.
pub fn sectionable_limit(q: &DownSet, base: &Arc<FinitePoset>, n: usize, budget: &Budget) -> Result<Decision> {
    let crit = limit_criterion_for(q, base, n)?;
    Ok(crit.check(q.members(), budget))
}

fn limit_criterion_for(q: &DownSet, base: &Arc<FinitePoset>, n: usize) -> Result<Criterion> {
    let crit = Criterion::limit(base, n, q.ambient().len().max(1))?;
    if crit.ambient.as_ref() != q.ambient().as_ref() {
        return Err(Error::DomainMismatch);
    }
    Ok(crit)
}

/// Section of `q'_{n,m}` (linear) or `q_{n,m}` (wedge) over `q` for some
/// `m`, assembled from homotopies between the projections.
pub fn limit_section(
    q: &DownSet,
    base: &Arc<FinitePoset>,
    n: usize,
    variant: Variant,
    budget: &Budget,
) -> Result<Option<SectionWitness>> {
    let crit = limit_criterion_for(q, base, n)?;
    let Kind::Homotopic { maps, target, .. } = &crit.kind else {
        unreachable!()
    };
    // sections are stated over the caller's ambient
    let open = DownSet::new(q.ambient().clone(), q.members().clone())?;
    homotopy_section(&open, base, maps, target, variant, budget)
}

/// Exact decision whether `q` admits a section with paths of length `m`.
pub fn section_exists_bounded(
    q: &DownSet,
    base: &Arc<FinitePoset>,
    n: usize,
    m: usize,
    variant: Variant,
    budget: &Budget,
) -> Result<(Decision, Option<SectionWitness>)> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let expected = base.len().checked_pow(n as u32).unwrap_or(usize::MAX);
    if q.ambient().len() != expected {
        return Err(Error::DomainMismatch);
    }
    let maps = Arc::new(projections(base, n, q.ambient().len()));
    let (d, paths) = bounded_section(q.ambient(), base, &maps, m, variant, q.members(), budget, true);
    let witness = paths.map(|paths| SectionWitness {
        variant,
        n,
        m,
        domain: q.clone(),
        base: base.clone(),
        ends: maps.clone(),
        paths,
    });
    Ok((d, witness))
}

/// Tuning knobs shared by all cover searches.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Budget for each individual homotopy or section query.
    pub budget: Budget,
    /// Node budget for the set-cover branch and bound.
    pub cover_nodes: usize,
    pub size_cap: usize,
    /// Enumerate all maximal passing facet sets when there are at most this many facets.
    pub exhaustive_facets: usize,
    /// Upper limit on criterion evaluations during enumeration.
    pub max_checks: usize,
    /// Heuristic growth rounds (the first in index order, later ones shuffled).
    pub growth_rounds: usize,
    /// Node budget for each query made while growing candidates; an
    /// inconclusive answer there just rejects the extension.
    pub growth_nodes: usize,
    pub seed: u64,
    pub emit_witness: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: Budget::default(),
            cover_nodes: 5_000_000,
            size_cap: DEFAULT_SIZE_CAP,
            exhaustive_facets: 20,
            max_checks: 200_000,
            growth_rounds: 6,
            growth_nodes: 200_000,
            seed: 0,
            emit_witness: false,
        }
    }
}

/// Outcome of a minimum-cover search.
#[derive(Clone, Debug)]
pub struct CoverOutcome {
    pub value: Value,
    pub certified: Certification,
    pub lower_bound: usize,
    pub strategy: Strategy,
    pub cover: Vec<DownSet>,
    /// All passing opens found, as facet index sets.
    pub(crate) candidates: Vec<FixedBitSet>,
    pub witnesses: Option<Vec<CoverWitness>>,
}

struct Engine<'a> {
    crit: &'a Criterion,
    opts: &'a SearchOptions,
    facets: Vec<usize>,
    adjacency: Vec<FixedBitSet>,
    cache: Mutex<HashMap<FixedBitSet, Decision>>,
    known_good: Mutex<Vec<FixedBitSet>>,
    checks: AtomicUsize,
}

impl<'a> Engine<'a> {
    fn new(crit: &'a Criterion, opts: &'a SearchOptions) -> Self {
        let p = &crit.ambient;
        let facets = p.maximal_elements();
        let mut facet_pos = vec![usize::MAX; p.len()];
        for (i, &f) in facets.iter().enumerate() {
            facet_pos[f] = i;
        }
        let fl = facets.len();
        let mut adjacency = vec![FixedBitSet::with_capacity(fl); fl];
        for (i, &f) in facets.iter().enumerate() {
            for &y in p.lower_covers(f) {
                for &z in p.upper_covers(y) {
                    let j = facet_pos[z];
                    if j != usize::MAX && j != i {
                        adjacency[i].insert(j);
                    }
                }
            }
        }
        Engine {
            crit,
            opts,
            facets,
            adjacency,
            cache: Mutex::new(HashMap::new()),
            known_good: Mutex::new(Vec::new()),
            checks: AtomicUsize::new(0),
        }
    }

    fn all_facets(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.facets.len());
        b.insert_range(..);
        b
    }

    fn single(&self, i: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.facets.len());
        b.insert(i);
        b
    }

    fn members(&self, fs: &FixedBitSet) -> FixedBitSet {
        let p = &self.crit.ambient;
        let mut out = FixedBitSet::with_capacity(p.len());
        for i in fs.ones() {
            out.union_with(p.down_bits(self.facets[i]));
        }
        out
    }

    fn facets_within(&self, members: &FixedBitSet) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.facets.len());
        for (i, &f) in self.facets.iter().enumerate() {
            if members.contains(f) {
                b.insert(i);
            }
        }
        b
    }

    fn check(&self, fs: &FixedBitSet) -> Decision {
        self.check_with(fs, &self.opts.budget)
    }

    fn growth_budget(&self) -> Budget {
        Budget {
            max_nodes: self.opts.growth_nodes.min(self.opts.budget.max_nodes),
            deadline: self.opts.budget.deadline,
        }
    }

    fn check_with(&self, fs: &FixedBitSet, budget: &Budget) -> Decision {
        if self.known_good.lock().unwrap().iter().any(|g| fs.is_subset(g)) {
            return Decision::Yes;
        }
        if let Some(&d) = self.cache.lock().unwrap().get(fs) {
            return d;
        }
        if budget.expired() {
            return Decision::Unknown;
        }
        self.checks.fetch_add(1, Ordering::Relaxed);
        let d = self.crit.check(&self.members(fs), budget);
        if d != Decision::Unknown || budget.max_nodes >= self.opts.budget.max_nodes {
            self.cache.lock().unwrap().insert(fs.clone(), d);
        }
        d
    }

    fn trust(&self, fs: FixedBitSet) {
        self.known_good.lock().unwrap().push(fs);
    }

    /// All maximal passing facet sets, level by level; `None` when the
    /// evaluation cap is hit or some answer is unknown.
    fn enumerate_maximal(&self) -> Option<Vec<FixedBitSet>> {
        let f = self.facets.len();
        let to_bits = |mask: u64| {
            let mut b = FixedBitSet::with_capacity(f);
            for i in 0..f {
                if mask >> i & 1 == 1 {
                    b.insert(i);
                }
            }
            b
        };
        let mut good: HashSet<u64> = (0..f).map(|i| 1u64 << i).collect();
        let mut level: Vec<u64> = (0..f).map(|i| 1u64 << i).collect();
        let mut all_good: Vec<u64> = level.clone();
        let mut evaluated = 0usize;
        while !level.is_empty() {
            let mut cands = Vec::new();
            for &s in &level {
                let top = 63 - s.leading_zeros() as usize;
                for g in top + 1..f {
                    let t = s | 1 << g;
                    let mut rest = s;
                    let mut ok = true;
                    while rest != 0 {
                        let h = rest.trailing_zeros();
                        rest &= rest - 1;
                        if !good.contains(&(t & !(1u64 << h))) {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        cands.push(t);
                    }
                }
            }
            evaluated += cands.len();
            if evaluated > self.opts.max_checks {
                return None;
            }
            let results: Vec<Decision> = cands.par_iter().map(|&t| self.check(&to_bits(t))).collect();
            if results.contains(&Decision::Unknown) {
                return None;
            }
            level = cands
                .into_iter()
                .zip(results)
                .filter(|(_, d)| d.is_yes())
                .map(|(t, _)| t)
                .collect();
            good.extend(level.iter().copied());
            all_good.extend(level.iter().copied());
        }
        let mut not_maximal = HashSet::new();
        for &t in &all_good {
            let mut rest = t;
            while rest != 0 {
                let h = rest.trailing_zeros();
                rest &= rest - 1;
                not_maximal.insert(t & !(1u64 << h));
            }
        }
        let mut maximal: Vec<u64> = all_good.into_iter().filter(|t| !not_maximal.contains(t)).collect();
        maximal.sort_unstable();
        Some(maximal.into_iter().map(to_bits).collect())
    }

    /// Grows `start` to a maximal passing set, preferring facets adjacent to
    /// the current set and otherwise following `order`.
    fn grow(&self, start: &FixedBitSet, order: &[usize]) -> FixedBitSet {
        let mut s = start.clone();
        let mut rejected = FixedBitSet::with_capacity(self.facets.len());
        let budget = self.growth_budget();
        let try_add = |s: &mut FixedBitSet, g: usize, rejected: &mut FixedBitSet| {
            let mut t = s.clone();
            t.insert(g);
            if self.check_with(&t, &budget).is_yes() {
                *s = t;
            } else {
                rejected.insert(g);
            }
        };
        loop {
            let next = order.iter().copied().find(|&g| {
                !s.contains(g) && !rejected.contains(g) && !self.adjacency[g].is_disjoint(&s)
            });
            match next {
                Some(g) => try_add(&mut s, g, &mut rejected),
                None => break,
            }
        }
        for &g in order {
            if !s.contains(g) && !rejected.contains(g) {
                try_add(&mut s, g, &mut rejected);
            }
        }
        s
    }

    /// Greedy clique in the graph of pairwise incompatible facets.
    fn clique_bound(&self) -> usize {
        let f = self.facets.len();
        let pairs: Vec<(usize, usize)> = (0..f).flat_map(|i| (i + 1..f).map(move |j| (i, j))).collect();
        let conflicts: Vec<bool> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut b = self.single(i);
                b.insert(j);
                self.check(&b).is_no()
            })
            .collect();
        let mut adj = vec![FixedBitSet::with_capacity(f); f];
        for (&(i, j), &c) in pairs.iter().zip(&conflicts) {
            if c {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        let mut order: Vec<usize> = (0..f).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(adj[i].count_ones(..)));
        let mut best = 1;
        for &start in &order {
            let mut clique = vec![start];
            for &v in &order {
                if v != start && clique.iter().all(|&c| adj[c].contains(v)) {
                    clique.push(v);
                }
            }
            best = best.max(clique.len());
        }
        best
    }

    fn solve(&self, seeds: &[FixedBitSet], lower_hint: usize) -> Result<CoverOutcome> {
        let nf = self.facets.len();
        let done = |value, certified, lower_bound, strategy, candidates: Vec<FixedBitSet>, chosen: &[usize]| {
            CoverOutcome {
                value,
                certified,
                lower_bound,
                strategy,
                cover: chosen
                    .iter()
                    .map(|&i| DownSet::new(self.crit.ambient.clone(), self.members(&candidates[i])).unwrap())
                    .collect(),
                candidates,
                witnesses: None,
            }
        };
        if nf == 0 {
            return Ok(done(Value::Finite(0), Certification::Exact, 0, Strategy::WholeSpace, vec![], &[]));
        }
        let whole = self.all_facets();
        let whole_decision = self.check(&whole);
        if whole_decision.is_yes() {
            return Ok(done(Value::Finite(1), Certification::Exact, 1, Strategy::WholeSpace, vec![whole], &[0]));
        }
        let mut lower = lower_hint.max(if whole_decision.is_no() { 2 } else { 1 });

        let mut candidates: Vec<FixedBitSet> = Vec::new();
        for seed in seeds {
            let fs = self.facets_within(seed);
            if !fs.is_clear() && !candidates.contains(&fs) {
                self.trust(fs.clone());
                candidates.push(fs);
            }
        }
        let singles: Vec<Decision> = (0..nf).into_par_iter().map(|i| self.check(&self.single(i))).collect();
        if singles.iter().any(|d| d.is_no()) {
            return Ok(done(Value::Infinite, Certification::Exact, lower, Strategy::Unbounded, candidates, &[]));
        }
        let unresolved = singles.contains(&Decision::Unknown);

        let cover_budget = Budget {
            max_nodes: self.opts.cover_nodes,
            deadline: self.opts.budget.deadline,
        };
        let covers_all = |cands: &[FixedBitSet]| {
            let mut u = FixedBitSet::with_capacity(nf);
            for c in cands {
                u.union_with(c);
            }
            u.count_ones(..) == nf
        };
        if covers_all(&candidates) {
            let sol = exact_min_cover(nf, &candidates, &cover_budget)?;
            if sol.size() <= lower {
                let chosen = sol.chosen.clone();
                return Ok(done(
                    Value::Finite(sol.size()),
                    Certification::Exact,
                    sol.size(),
                    Strategy::Inherited,
                    candidates,
                    &chosen,
                ));
            }
        }

        if nf <= self.opts.exhaustive_facets.min(63) && !unresolved {
            if let Some(maximal) = self.enumerate_maximal() {
                let sol = exact_min_cover(nf, &maximal, &cover_budget)?;
                let certified = if sol.optimal {
                    Certification::Exact
                } else {
                    Certification::UpperBoundAtBudget
                };
                let lb = if sol.optimal { sol.size() } else { lower };
                let chosen = sol.chosen.clone();
                return Ok(done(Value::Finite(sol.size()), certified, lb, Strategy::Exhaustive, maximal, &chosen));
            }
        }

        let mut best: Option<Vec<FixedBitSet>> = None;
        let mut clique_done = false;
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        for round in 0..self.opts.growth_rounds.max(1) {
            let mut order: Vec<usize> = (0..nf).collect();
            if round > 0 {
                order.shuffle(&mut rng);
                // later rounds restart from the seeds and the best cover so far
                candidates.clear();
                candidates.extend(best.iter().flatten().cloned());
            }
            let add = |cands: &mut Vec<FixedBitSet>, s: FixedBitSet| {
                if !cands.iter().any(|c| s.is_subset(c)) {
                    cands.retain(|c| !c.is_subset(&s));
                    cands.push(s);
                }
            };
            let good_enough = |cands: &[FixedBitSet]| {
                covers_all(cands)
                    && exact_min_cover(nf, cands, &cover_budget).is_ok_and(|sol| sol.size() <= lower)
            };
            let mut starts: Vec<FixedBitSet> = candidates.clone();
            starts.extend(order.iter().map(|&g| self.single(g)));
            // facets lying in some set grown from a single facet this round
            let mut reached = FixedBitSet::with_capacity(nf);
            for start in starts {
                if self.opts.budget.expired() || good_enough(&candidates) {
                    break;
                }
                let from_single = start.count_ones(..) == 1;
                if from_single {
                    let g = start.ones().next().unwrap();
                    if reached.contains(g) || singles[g] != Decision::Yes {
                        continue;
                    }
                }
                let grown = self.grow(&start, &order);
                if from_single {
                    reached.union_with(&grown);
                }
                let mut complement = self.all_facets();
                complement.difference_with(&grown);
                add(&mut candidates, grown);
                if !complement.is_clear() && self.check_with(&complement, &self.growth_budget()).is_yes() {
                    let grown = self.grow(&complement, &order);
                    if from_single {
                        reached.union_with(&grown);
                    }
                    add(&mut candidates, grown);
                }
            }
            if !covers_all(&candidates) || self.opts.budget.expired() && best.is_some() {
                break;
            }
            let sol = exact_min_cover(nf, &candidates, &cover_budget)?;
            if best.as_ref().is_none_or(|b| sol.size() < b.len()) {
                best = Some(sol.chosen.iter().map(|&i| candidates[i].clone()).collect());
            }
            let size = best.as_ref().map_or(usize::MAX, Vec::len);
            if size <= lower {
                break;
            }
            if !clique_done && nf <= 64 {
                clique_done = true;
                lower = lower.max(self.clique_bound());
                if size <= lower {
                    break;
                }
            }
        }
        match best {
            Some(cover) => {
                let certified = if cover.len() <= lower {
                    Certification::Exact
                } else {
                    Certification::UpperBoundAtBudget
                };
                let chosen: Vec<usize> = (0..cover.len()).collect();
                Ok(done(Value::Finite(cover.len()), certified, lower, Strategy::Growth, cover, &chosen))
            }
            None => Ok(done(
                Value::Unknown,
                Certification::UpperBoundAtBudget,
                lower,
                Strategy::Growth,
                candidates,
                &[],
            )),
        }
    }
}

/// Minimum number of opens passing `crit` needed to cover its ambient space.
///
/// `seeds` are opens already known to pass (they are trusted, not
/// rechecked); `lower_hint` is a lower bound known from elsewhere.
pub fn minimum_cover(crit: &Criterion, opts: &SearchOptions, seeds: &[DownSet], lower_hint: usize) -> Result<CoverOutcome> {
    let engine = Engine::new(crit, opts);
    let seed_sets: Vec<FixedBitSet> = seeds.iter().map(|s| s.members().clone()).collect();
    let mut outcome = engine.solve(&seed_sets, lower_hint)?;
    if opts.emit_witness {
        let mut ws = Vec::new();
        for q in &outcome.cover {
            if let Some(w) = crit.witness(q.members(), &opts.budget)? {
                ws.push(w);
            }
        }
        outcome.witnesses = Some(ws);
    }
    Ok(outcome)
}

/// Inclusion-maximal opens passing `crit`, and whether the list is known to
/// be complete. Ambients with at most 20 elements are swept over all
/// down-sets; larger ones list the maximal opens generated by maximal points.
pub fn maximal_sectionable_opens(crit: &Criterion, opts: &SearchOptions) -> Result<(Vec<DownSet>, bool)> {
    let p = crit.ambient();
    if p.len() <= 20 {
        let all = crate::poset::all_down_sets(p);
        let decisions: Vec<Decision> = all.par_iter().map(|d| crit.check(d, &opts.budget)).collect();
        let complete = !decisions.contains(&Decision::Unknown);
        let good: Vec<&FixedBitSet> = all.iter().zip(&decisions).filter(|(_, d)| d.is_yes()).map(|(s, _)| s).collect();
        let mut out: Vec<DownSet> = good
            .iter()
            .filter(|s| !good.iter().any(|t| t != *s && s.is_subset(t)))
            .map(|s| DownSet::new(p.clone(), (*s).clone()))
            .collect::<Result<_>>()?;
        out.sort_by_key(|d| d.members().ones().collect::<Vec<_>>());
        return Ok((out, complete));
    }
    let engine = Engine::new(crit, opts);
    match engine.enumerate_maximal() {
        Some(sets) => Ok((
            sets.iter()
                .map(|s| DownSet::new(p.clone(), engine.members(s)))
                .collect::<Result<_>>()?,
            true,
        )),
        None => {
            let outcome = engine.solve(&[], 1)?;
            let sets = outcome
                .candidates
                .iter()
                .map(|s| DownSet::new(p.clone(), engine.members(s)))
                .collect::<Result<_>>()?;
            Ok((sets, false))
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_report(
    invariant: &str,
    n: Option<usize>,
    m: Option<usize>,
    k: Option<usize>,
    variant: Option<Variant>,
    ambient: &FinitePoset,
    outcome: CoverOutcome,
    start: Instant,
) -> ComplexityReport {
    ComplexityReport {
        invariant: invariant.to_string(),
        n,
        m,
        k,
        variant: variant.map(|v| v.name().to_string()),
        value: outcome.value,
        certified: outcome.certified,
        lower_bound: outcome.lower_bound,
        strategy: outcome.strategy,
        ambient_size: ambient.len(),
        cover: outcome.cover.iter().map(|d| d.labels()).collect(),
        witnesses: outcome.witnesses.map(|ws| ws.iter().map(|w| w.to_json()).collect()),
        levels: None,
        note: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
        cover_sets: outcome.cover,
    }
}

/// `cat(P)`: fewest opens with null-homotopic inclusion covering `P`.
pub fn cat(p: &Arc<FinitePoset>, opts: &SearchOptions) -> Result<ComplexityReport> {
    let start = Instant::now();
    let crit = Criterion::contractible(p);
    let outcome = minimum_cover(&crit, opts, &[], 1)?;
    Ok(build_report("cat", None, None, None, None, p, outcome, start))
}

/// `CC_n(P)` through the homotopy criterion on the projections.
pub fn cc_n(p: &Arc<FinitePoset>, n: usize, opts: &SearchOptions) -> Result<ComplexityReport> {
    let start = Instant::now();
    let crit = Criterion::limit(p, n, opts.size_cap)?;
    let outcome = minimum_cover(&crit, opts, &[], 1)?;
    if p.is_connected() {
        debug_assert!(outcome.value != Value::Infinite, "minimal opens of a connected power always pass");
    }
    Ok(build_report("cc", Some(n), None, None, None, crit.ambient(), outcome, start))
}

/// `CC_{n,m}(P)` (wedge) or `CC'_{n,m}(P)` (linear).
pub fn cc_nm(p: &Arc<FinitePoset>, n: usize, m: usize, variant: Variant, opts: &SearchOptions) -> Result<ComplexityReport> {
    let start = Instant::now();
    let crit = Criterion::bounded(p, n, m, variant, opts.size_cap)?;
    let outcome = minimum_cover(&crit, opts, &[], 1)?;
    Ok(build_report("cc", Some(n), Some(m), None, Some(variant), crit.ambient(), outcome, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{chain, minimal_open, sphere};

    fn s1() -> Arc<FinitePoset> {
        Arc::new(sphere(1))
    }

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn linear_retraction_is_monotone_and_fixes_marks() {
        for n in 2..5 {
            for m in 0..7 {
                let big = fence((n - 1) * (m + 1));
                let small = fence((n - 1) * m);
                for &(lo, hi) in big.hasse_edges() {
                    assert!(small.leq(linear_retraction(lo, m, n), linear_retraction(hi, m, n)), "n={} m={}", n, m);
                }
                for j in 0..n {
                    assert_eq!(linear_retraction(j * (m + 1), m, n), j * m);
                }
            }
        }
    }

    #[test]
    fn circle_values() {
        let p = s1();
        let r = cc_n(&p, 2, &opts()).unwrap();
        assert_eq!(r.value, Value::Finite(4));
        assert!(r.is_exact());
        let c = cat(&p, &opts()).unwrap();
        assert_eq!(c.value, Value::Finite(2));
        assert!(c.is_exact());
    }

    #[test]
    fn contractible_spaces_need_one_open() {
        for p in [chain(3), fence(3), wedge_fence(2, 2).unwrap()] {
            let p = Arc::new(p);
            assert_eq!(cc_n(&p, 2, &opts()).unwrap().value, Value::Finite(1));
            assert_eq!(cat(&p, &opts()).unwrap().value, Value::Finite(1));
        }
    }

    #[test]
    fn limit_criterion_examples() {
        let p = s1();
        let sq = Arc::new(power(&p, 2, 100).unwrap());
        let b = Budget::default();
        for x in 0..sq.len() {
            let u = minimal_open(&sq, x).unwrap();
            assert_eq!(sectionable_limit(&u, &p, 2, &b).unwrap(), Decision::Yes);
        }
        assert_eq!(sectionable_limit(&DownSet::full(sq.clone()), &p, 2, &b).unwrap(), Decision::No);
        let empty = DownSet::new(sq.clone(), FixedBitSet::with_capacity(16)).unwrap();
        assert_eq!(sectionable_limit(&empty, &p, 2, &b).unwrap(), Decision::Yes);
    }

    #[test]
    fn bounded_examples() {
        let p = s1();
        let sq = Arc::new(power(&p, 2, 100).unwrap());
        let b = Budget::default();
        let cd = sq.index_of("(e+1,e-1)").unwrap();
        let cc = sq.index_of("(e+1,e+1)").unwrap();
        let u_cd = minimal_open(&sq, cd).unwrap();
        let u_cc = minimal_open(&sq, cc).unwrap();
        for variant in [Variant::Wedge, Variant::Linear] {
            let (d, _) = section_exists_bounded(&u_cd, &p, 2, 0, variant, &b).unwrap();
            assert_eq!(d, Decision::No);
            let (d, w) = section_exists_bounded(&u_cd, &p, 2, 4, variant, &b).unwrap();
            assert_eq!(d, Decision::Yes);
            w.unwrap().validate().unwrap();
        }
        // the open below a diagonal point still has off-diagonal points, so m = 0 fails
        let (d, _) = section_exists_bounded(&u_cc, &p, 2, 0, Variant::Wedge, &b).unwrap();
        assert_eq!(d, Decision::No);
        let diag_bottom = minimal_open(&sq, sq.index_of("(e+0,e+0)").unwrap()).unwrap();
        let (d, _) = section_exists_bounded(&diag_bottom, &p, 2, 0, Variant::Wedge, &b).unwrap();
        assert_eq!(d, Decision::Yes);
    }

    #[test]
    fn transports_produce_valid_witnesses() {
        let p = s1();
        let sq = Arc::new(power(&p, 2, 100).unwrap());
        let b = Budget::default();
        let q = minimal_open(&sq, sq.index_of("(e+1,e-1)").unwrap()).unwrap();
        let (_, w) = section_exists_bounded(&q, &p, 2, 2, Variant::Wedge, &b).unwrap();
        let w = w.unwrap();
        let r = transport_r(&w).unwrap();
        assert_eq!(r.m, 3);
        let f = transport_f(&w).unwrap();
        assert_eq!((f.variant, f.m), (Variant::Linear, 4));
        let g = transport_g(&f).unwrap();
        assert_eq!((g.variant, g.m), (Variant::Wedge, 2));
        assert!(matches!(transport_f(&r), Err(Error::ParityViolation(_))));
        // c to d needs c <= c >= a <= d, so the linear form needs m = 4 here
        let (d, _) = section_exists_bounded(&q, &p, 2, 2, Variant::Linear, &b).unwrap();
        assert_eq!(d, Decision::No);
        let (_, lw) = section_exists_bounded(&q, &p, 2, 4, Variant::Linear, &b).unwrap();
        let lw = lw.unwrap();
        let lr = transport_r(&lw).unwrap();
        transport_g(&lw).unwrap();
        assert!(matches!(transport_g(&lr), Err(Error::ParityViolation(_))));
    }

    #[test]
    fn limit_sections_validate() {
        let p = s1();
        let sq = Arc::new(power(&p, 3, 100).unwrap());
        let b = Budget::default();
        let q = minimal_open(&sq, sq.len() - 1).unwrap();
        for variant in [Variant::Wedge, Variant::Linear] {
            let w = limit_section(&q, &p, 3, variant, &b).unwrap().unwrap();
            w.validate().unwrap();
        }
        assert!(limit_section(&DownSet::full(sq.clone()), &p, 3, Variant::Linear, &b).unwrap().is_none());
    }

    #[test]
    fn maximal_opens_on_the_square_miss_a_corner() {
        let p = s1();
        let crit = Criterion::limit(&p, 2, 100).unwrap();
        let (opens, complete) = maximal_sectionable_opens(&crit, &opts()).unwrap();
        assert!(complete);
        let maxima = crit.ambient().maximal_elements();
        for o in &opens {
            assert!(maxima.iter().any(|&x| !o.contains(x)));
        }
        for (i, a) in opens.iter().enumerate() {
            for (j, b) in opens.iter().enumerate() {
                assert!(i == j || !a.is_subset(b));
            }
        }
    }

    #[test]
    fn witnesses_are_emitted_for_every_member() {
        let p = s1();
        let o = SearchOptions {
            emit_witness: true,
            ..opts()
        };
        let r = cat(&p, &o).unwrap();
        assert_eq!(r.witnesses.as_ref().unwrap().len(), 2);
        let crit = Criterion::limit(&p, 2, 100).unwrap();
        let out = minimum_cover(&crit, &o, &[], 1).unwrap();
        for w in out.witnesses.unwrap() {
            w.validate().unwrap();
        }
    }
}

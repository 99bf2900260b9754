//! Iterated barycentric subdivisions of `P^n` and the covering invariants
//! `CC^k_n` and `CC^∞_n` built on them.
//!
//! At level `k` an open `Q` of `sd^k(P^n)` passes when the composites
//! `ρ_j = π_j ∘ τ^k` are pairwise homotopic on `Q`. Covers found at level `k`
//! pull back along `τ` to covers at level `k + 1`, so the per-level values
//! never increase.

use std::sync::Arc;
use std::time::Instant;

use fixedbitset::FixedBitSet;

use crate::complexity::{build_report, minimum_cover, Criterion, SearchOptions};
use crate::error::{Error, Result};
use crate::homotopy::{core_retraction, TargetContext};
use crate::poset::{barycentric_subdivision, power, tuple_of, DownSet, FinitePoset, MonotoneMap, Subdivision};
use crate::report::{Certification, ComplexityReport, LevelSummary, Value};

/// Default cap on the size of any subdivision level.
pub const DEFAULT_SUBDIVISION_CAP: usize = 20_000;

/// `P^n` together with `sd(P^n), sd^2(P^n), ...` and the maps `τ` between them.
#[derive(Clone, Debug)]
pub struct SubdivisionTower {
    factor: Arc<FinitePoset>,
    n: usize,
    base: Arc<FinitePoset>,
    levels: Vec<Subdivision>,
    /// `to_base[k][x] = τ^k(x)`.
    to_base: Vec<Vec<usize>>,
}

impl SubdivisionTower {
    /// Tower over `P^n` with no subdivision levels yet.
    pub fn new(p: &Arc<FinitePoset>, n: usize, cap: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("n must be at least 2".into()));
        }
        let base = Arc::new(power(p, n, cap)?);
        let identity = (0..base.len()).collect();
        Ok(SubdivisionTower {
            factor: p.clone(),
            n,
            base,
            levels: Vec::new(),
            to_base: vec![identity],
        })
    }

    /// Subdivides until `depth` levels exist.
    pub fn extend_to(&mut self, depth: usize, cap: usize) -> Result<()> {
        while self.depth() < depth {
            let top = self.poset(self.depth()).clone();
            let sd = barycentric_subdivision(&top, cap)?;
            let tau = sd.tau_assignment();
            let prev = self.to_base.last().unwrap();
            self.to_base.push(tau.iter().map(|&x| prev[x]).collect());
            self.levels.push(sd);
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factor(&self) -> &Arc<FinitePoset> {
        &self.factor
    }

    /// `sd^k(P^n)`; level 0 is `P^n` itself.
    pub fn poset(&self, k: usize) -> &Arc<FinitePoset> {
        if k == 0 {
            &self.base
        } else {
            &self.levels[k - 1].poset
        }
    }

    /// `τ : sd^k(P^n) -> sd^{k-1}(P^n)` for `k >= 1`.
    pub fn tau(&self, k: usize) -> Result<MonotoneMap> {
        if k == 0 || k > self.depth() {
            return Err(Error::IndexOutOfRange { index: k, len: self.depth() + 1 });
        }
        Ok(self.levels[k - 1].tau())
    }

    /// `τ^k : sd^k(P^n) -> P^n`.
    pub fn tau_k(&self, k: usize) -> Result<MonotoneMap> {
        if k > self.depth() {
            return Err(Error::IndexOutOfRange { index: k, len: self.depth() + 1 });
        }
        MonotoneMap::new(self.poset(k).clone(), self.base.clone(), self.to_base[k].clone())
    }

    fn rho_assignment(&self, k: usize, j: usize) -> Vec<usize> {
        let p = self.factor.len();
        self.to_base[k].iter().map(|&x| tuple_of(x, p, self.n)[j - 1]).collect()
    }

    /// `ρ_j = π_j ∘ τ^k : sd^k(P^n) -> P` (1-based `j`).
    pub fn rho(&self, k: usize, j: usize) -> Result<MonotoneMap> {
        if k > self.depth() {
            return Err(Error::IndexOutOfRange { index: k, len: self.depth() + 1 });
        }
        if j == 0 || j > self.n {
            return Err(Error::IndexOutOfRange { index: j, len: self.n });
        }
        MonotoneMap::new(self.poset(k).clone(), self.factor.clone(), self.rho_assignment(k, j))
    }

    /// The criterion "all `ρ_j` homotopic" on opens of level `k`.
    pub fn criterion(&self, k: usize) -> Result<Criterion> {
        if k > self.depth() {
            return Err(Error::IndexOutOfRange { index: k, len: self.depth() + 1 });
        }
        let maps = (1..=self.n).map(|j| self.rho_assignment(k, j)).collect();
        Criterion::homotopic_maps(self.poset(k).clone(), self.factor.clone(), maps)
    }

    /// `τ^{-1}(Q)` for an open `Q` of level `k - 1`.
    pub fn pull_back(&self, k: usize, q: &DownSet) -> Result<DownSet> {
        let tau = &self.levels[k - 1];
        let assignment = tau.tau_assignment();
        let mut members = FixedBitSet::with_capacity(tau.poset.len());
        for (x, &t) in assignment.iter().enumerate() {
            if q.contains(t) {
                members.insert(x);
            }
        }
        DownSet::new(tau.poset.clone(), members)
    }
}

/// Lower bound on `CC^k_n(P)` valid for every `k`: when some projection
/// differs from the first on homology of `P^n`, the same holds for the `ρ_j` at
/// every level (`τ` realizes to a map homotopic to the identity), so the whole
/// space never passes.
fn uniform_lower_bound(p: &Arc<FinitePoset>, base: &FinitePoset, n: usize) -> usize {
    let ctx = TargetContext::new(p.clone());
    if ctx.core_size() <= 1 {
        return 1;
    }
    let retraction = core_retraction(base, &base.full_set());
    let (dom, old) = base.induced(&retraction.core);
    let maps: Vec<Vec<u16>> = (0..n)
        .map(|j| old.iter().map(|&x| ctx.to_core(tuple_of(x, p.len(), n)[j]) as u16).collect())
        .collect();
    if (1..n).any(|j| ctx.separates(&dom, &maps[0], &maps[j])) {
        2
    } else {
        1
    }
}

struct Level {
    summary: LevelSummary,
    outcome: crate::complexity::CoverOutcome,
}

/// Levels computed by a sweep, the uniform lower bound, and the level whose
/// construction failed, if any.
type Sweep = (SubdivisionTower, Vec<Level>, usize, Option<(usize, Error)>);

fn sweep(
    p: &Arc<FinitePoset>,
    n: usize,
    k_max: usize,
    subdivision_cap: usize,
    opts: &SearchOptions,
) -> Result<Sweep> {
    let mut tower = SubdivisionTower::new(p, n, opts.size_cap)?;
    let lower = uniform_lower_bound(p, tower.poset(0), n);
    let mut levels: Vec<Level> = Vec::new();
    let mut stopped = None;
    for k in 0..=k_max {
        if k > 0 {
            if let Err(e) = tower.extend_to(k, subdivision_cap.min(opts.size_cap)) {
                stopped = Some((k, e));
                break;
            }
        }
        let crit = tower.criterion(k)?;
        let mut seeds = Vec::new();
        if let Some(prev) = levels.last() {
            for q in &prev.outcome.cover {
                seeds.push(tower.pull_back(k, q)?);
            }
        }
        let outcome = minimum_cover(&crit, opts, &seeds, lower)?;
        levels.push(Level {
            summary: LevelSummary {
                k,
                elements: tower.poset(k).len(),
                value: outcome.value,
                certified: outcome.certified,
                strategy: outcome.strategy,
            },
            outcome,
        });
        // pulled-back covers keep passing, so a value meeting the uniform
        // lower bound persists at every later level
        if levels.last().unwrap().summary.value.finite().is_some_and(|v| v <= lower.max(1)) {
            break;
        }
    }
    Ok((tower, levels, lower, stopped))
}

fn best_level(levels: &[Level]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (i, l) in levels.iter().enumerate() {
        if let Value::Finite(v) = l.summary.value {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// `CC^k_n(P)`. Levels `0..k` are solved first and their covers pulled back
/// as seeds, which makes the result at most `CC^{k-1}_n(P)` by construction.
pub fn cc_k_n(p: &Arc<FinitePoset>, n: usize, k: usize, subdivision_cap: usize, opts: &SearchOptions) -> Result<ComplexityReport> {
    let start = Instant::now();
    let (tower, mut levels, _, stopped) = sweep(p, n, k, subdivision_cap, opts)?;
    if let Some((_, e)) = stopped {
        return Err(e);
    }
    let last = levels.len() - 1;
    let reached = levels[last].summary.k;
    let summaries: Vec<LevelSummary> = levels.iter().map(|l| l.summary.clone()).collect();
    let level = levels.swap_remove(last);
    let mut report = build_report("cc_k", Some(n), None, Some(k), None, tower.poset(reached), level.outcome, start);
    if reached < k {
        report.note = Some(format!(
            "value {} already at level {} meets the lower bound and persists to level {}",
            report.value, reached, k
        ));
    }
    report.levels = Some(summaries);
    Ok(report)
}

/// `CC^∞_n(P) = min_k CC^k_n(P)` over `k <= k_max`. The value is certified
/// exact when it meets a lower bound valid for all `k`.
pub fn cc_inf_n(
    p: &Arc<FinitePoset>,
    n: usize,
    k_max: usize,
    subdivision_cap: usize,
    opts: &SearchOptions,
) -> Result<ComplexityReport> {
    let start = Instant::now();
    let (tower, mut levels, lower, stopped) = sweep(p, n, k_max, subdivision_cap, opts)?;
    let note = stopped.map(|(k, e)| format!("stopped before level {}: {}", k, e));
    let summaries: Vec<LevelSummary> = levels.iter().map(|l| l.summary.clone()).collect();
    let Some(best) = best_level(&levels) else {
        let l = levels.swap_remove(0);
        let mut report = build_report("cc_inf", Some(n), None, Some(k_max), None, tower.poset(0), l.outcome, start);
        report.value = Value::Unknown;
        report.certified = Certification::UpperBoundAtBudget;
        report.levels = Some(summaries);
        report.note = note;
        return Ok(report);
    };
    let best_k = levels[best].summary.k;
    let level = levels.swap_remove(best);
    let value = level.outcome.value;
    let mut report = build_report("cc_inf", Some(n), None, Some(k_max), None, tower.poset(best_k), level.outcome, start);
    report.lower_bound = lower;
    report.certified = if value.finite().is_some_and(|v| v <= lower) {
        Certification::Exact
    } else {
        Certification::UpperBoundAtBudget
    };
    report.levels = Some(summaries);
    report.note = Some(match note {
        Some(n) => format!("cover found at level {}; {}", best_k, n),
        None => format!("cover found at level {}", best_k),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{chain, sphere};

    #[test]
    fn rho_examples() {
        let p = Arc::new(sphere(1));
        let mut t = SubdivisionTower::new(&p, 2, 1000).unwrap();
        t.extend_to(1, 1000).unwrap();
        let r0 = t.rho(0, 1).unwrap();
        for x in 0..16 {
            assert_eq!(r0.apply(x), x / 4);
        }
        let sd = t.poset(1);
        let x = sd.index_of("{(e+0,e+1),(e+1,e+1)}").unwrap();
        assert_eq!(t.rho(1, 1).unwrap().apply(x), p.index_of("e+1").unwrap());
        let composite = t.tau(1).unwrap().then(&t.rho(0, 2).unwrap()).unwrap();
        assert_eq!(composite, t.rho(1, 2).unwrap());
    }

    #[test]
    fn tower_sizes_follow_chain_counts() {
        let p = Arc::new(sphere(1));
        let mut t = SubdivisionTower::new(&p, 2, 1000).unwrap();
        t.extend_to(2, 10_000).unwrap();
        assert_eq!(t.poset(1).len() as u128, t.poset(0).chain_count());
        assert_eq!(t.poset(2).len() as u128, t.poset(1).chain_count());
        assert!(t.tau_k(2).unwrap().is_surjective());
    }

    #[test]
    fn level_zero_matches_cc_n_and_contractible_is_one() {
        let p = Arc::new(sphere(1));
        let opts = SearchOptions::default();
        let r = cc_k_n(&p, 2, 0, 1000, &opts).unwrap();
        assert_eq!(r.value, Value::Finite(4));
        let c = Arc::new(chain(3));
        let r = cc_inf_n(&c, 2, 2, 1000, &opts).unwrap();
        assert_eq!(r.value, Value::Finite(1));
        assert!(r.is_exact());
    }
}

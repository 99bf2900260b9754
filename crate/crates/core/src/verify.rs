//! Property suites checking the structural laws of the invariants on a
//! corpus of small posets and complexes.

use std::sync::Arc;

use serde::Serialize;

use crate::budget::Decision;
use crate::complexity::{
    cat, cc_n, cc_nm, maximal_sectionable_opens, transport_f, transport_g, transport_r, CoverWitness, Criterion,
    SearchOptions, SectionWitness, Variant,
};
use crate::corpus::{builtin_corpus, posets, random_connected_posets};
use crate::error::Result;
use crate::homotopy::{core, enumerate_monotone_maps, homotopic, is_contractible};
use crate::poset::{all_down_sets, barycentric_subdivision, power, FinitePoset, MonotoneMap};
use crate::report::Value;
use crate::simplicial::{
    contiguous_one_step, cycle, enumerate_simplicial_maps, k_functor, order_complex, sd_complex, simplex,
    simplex_boundary, x_functor, SimplicialComplex, SimplicialMap,
};
use crate::subdivision::cc_k_n;

/// Outcome of one property over a corpus.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub checked: usize,
    pub passed: usize,
    /// Instances where some value was not decided within budget.
    pub undecided: usize,
    pub failures: Vec<String>,
}

impl PropertyResult {
    fn new(name: &str) -> Self {
        PropertyResult {
            name: name.to_string(),
            ..Default::default()
        }
    }

    /// Records an instance: `Some(true)` pass, `Some(false)` violation,
    /// `None` undecided.
    fn record(&mut self, outcome: Option<bool>, what: impl FnOnce() -> String) {
        match outcome {
            Some(true) => {
                self.checked += 1;
                self.passed += 1;
            }
            Some(false) => {
                self.checked += 1;
                self.failures.push(what());
            }
            None => self.undecided += 1,
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub corpus_size: usize,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(PropertyResult::ok)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} ({} spaces)\n", self.suite, self.corpus_size);
        for p in &self.properties {
            let status = if p.ok() { "pass" } else { "FAIL" };
            out.push_str(&format!("  [{}] {}: {}/{} passed", status, p.name, p.passed, p.checked));
            if p.undecided > 0 {
                out.push_str(&format!(", {} undecided", p.undecided));
            }
            out.push('\n');
            for f in p.failures.iter().take(5) {
                out.push_str(&format!("      violation: {}\n", f));
            }
        }
        out
    }
}

/// Which spaces the poset suites run over.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub include_builtin: bool,
    /// Number of random connected posets added to the corpus.
    pub random: usize,
    pub max_size: usize,
    pub seed: u64,
    pub opts: SearchOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            include_builtin: true,
            random: 0,
            max_size: 5,
            seed: 0,
            opts: SearchOptions::default(),
        }
    }
}

impl VerifyConfig {
    pub fn corpus(&self) -> Vec<(String, Arc<FinitePoset>)> {
        let mut out: Vec<(String, Arc<FinitePoset>)> = Vec::new();
        if self.include_builtin {
            out.extend(builtin_corpus().into_iter().map(|(n, p)| (n, Arc::new(p))));
        }
        for (i, p) in random_connected_posets(self.random, self.max_size, self.seed).into_iter().enumerate() {
            out.push((format!("random#{} ({})", i, describe(&p)), Arc::new(p)));
        }
        out
    }
}

fn describe(p: &FinitePoset) -> String {
    let edges: Vec<String> = p
        .hasse_edges()
        .iter()
        .map(|&(a, b)| format!("{}<{}", p.label(a), p.label(b)))
        .collect();
    format!("{} elements; {}", p.len(), edges.join(" "))
}

/// `a <= b` when both are decided, with `inf` on top.
fn value_le(a: Value, b: Value) -> Option<bool> {
    match (a, b) {
        (Value::Unknown, _) | (_, Value::Unknown) => None,
        (_, Value::Infinite) => Some(true),
        (Value::Infinite, Value::Finite(_)) => Some(false),
        (Value::Finite(x), Value::Finite(y)) => Some(x <= y),
    }
}

fn value_eq(a: Value, b: Value) -> Option<bool> {
    Some(value_le(a, b)? && value_le(b, a)?)
}

fn exact(r: &crate::report::ComplexityReport) -> Value {
    if r.is_exact() {
        r.value
    } else {
        Value::Unknown
    }
}

/// Bounded values for `m = 0..=m_max` of both variants.
fn bounded_values(p: &Arc<FinitePoset>, m_max: usize, opts: &SearchOptions) -> Result<[Vec<Value>; 2]> {
    let mut out = [Vec::new(), Vec::new()];
    for (i, v) in [Variant::Wedge, Variant::Linear].into_iter().enumerate() {
        for m in 0..=m_max {
            out[i].push(exact(&cc_nm(p, 2, m, v, opts)?));
        }
    }
    Ok(out)
}

/// Section witnesses over the maximal passing opens of bounded criteria.
fn corpus_witnesses(p: &Arc<FinitePoset>, opts: &SearchOptions) -> Result<Vec<SectionWitness>> {
    let mut out = Vec::new();
    for (variant, m) in [(Variant::Wedge, 2), (Variant::Linear, 4), (Variant::Wedge, 1), (Variant::Linear, 2)] {
        let crit = Criterion::bounded(p, 2, m, variant, opts.size_cap)?;
        let (opens, _) = maximal_sectionable_opens(&crit, opts)?;
        for q in opens {
            if let Some(CoverWitness::Section(w)) = crit.witness(q.members(), &opts.budget)? {
                out.push(w);
            }
        }
    }
    Ok(out)
}

fn transported_ok(w: &SectionWitness) -> Vec<(&'static str, bool)> {
    let valid = |r: Result<SectionWitness>| r.and_then(|x| x.validate().map(|_| x)).is_ok();
    let mut out = vec![("R", valid(transport_r(w)))];
    let twice = transport_r(w).and_then(|x| transport_r(&x));
    out.push(("R twice", twice.and_then(|x| x.validate()).is_ok()));
    match w.variant {
        Variant::Wedge if w.m.is_multiple_of(2) => {
            let f = transport_f(w);
            let f_ok = f.as_ref().is_ok_and(|x| x.validate().is_ok());
            out.push(("f", f_ok));
            if let Ok(lin) = f {
                if lin.m % 4 == 0 {
                    out.push(("g after f", valid(transport_g(&lin))));
                }
            }
        }
        Variant::Linear if w.m.is_multiple_of(4) => out.push(("g", valid(transport_g(w)))),
        _ => {}
    }
    out
}

/// Monotonicity in `m`, agreement of the bounded variants with the limit,
/// monotonicity in `k`, and validity of transported witnesses.
pub fn lemmas(config: &VerifyConfig) -> Result<SuiteReport> {
    let corpus = config.corpus();
    let opts = &config.opts;
    let m_max = 4;
    let mut mono = [
        PropertyResult::new("cc_nm non-increasing in m (wedge)"),
        PropertyResult::new("cc_nm non-increasing in m (linear)"),
    ];
    let mut bound_below = PropertyResult::new("cc_nm bounded below by cc_n");
    let mut agree = PropertyResult::new("stabilized wedge and linear minima equal cc_n");
    let mut k_mono = PropertyResult::new("cc^1 <= cc^0");
    let mut k_zero = PropertyResult::new("cc^0 equals cc_n");
    let mut transports = PropertyResult::new("transported witnesses are valid");
    let mut closure = PropertyResult::new("passing opens are closed under sub-opens");
    for (name, p) in &corpus {
        let limit = exact(&cc_n(p, 2, opts)?);
        let values = bounded_values(p, m_max, opts)?;
        for (i, seq) in values.iter().enumerate() {
            for m in 0..m_max {
                mono[i].record(value_le(seq[m + 1], seq[m]), || {
                    format!("{}: m={} gives {}, m={} gives {}", name, m, seq[m], m + 1, seq[m + 1])
                });
            }
            bound_below.record(value_le(limit, seq[m_max]), || {
                format!("{}: cc_n = {} but m={} gives {}", name, limit, m_max, seq[m_max])
            });
        }
        // on a connected poset the limit is finite, so an infinite bounded
        // value has not stabilized yet
        let stable = values
            .iter()
            .all(|s| s[m_max] == s[m_max - 1] && matches!(s[m_max], Value::Finite(_)));
        if stable {
            let outcome = value_eq(values[0][m_max], limit)
                .zip(value_eq(values[1][m_max], limit))
                .map(|(a, b)| a && b);
            agree.record(outcome, || {
                format!(
                    "{}: wedge {}, linear {}, cc_n {}",
                    name, values[0][m_max], values[1][m_max], limit
                )
            });
        }
        let c0 = exact(&cc_k_n(p, 2, 0, opts.size_cap, opts)?);
        let c1 = cc_k_n(p, 2, 1, opts.size_cap, opts)?.value;
        k_zero.record(value_eq(c0, limit), || format!("{}: cc^0 = {}, cc_n = {}", name, c0, limit));
        k_mono.record(value_le(c1, c0), || format!("{}: cc^1 = {}, cc^0 = {}", name, c1, c0));
        for w in corpus_witnesses(p, opts)? {
            for (step, ok) in transported_ok(&w) {
                transports.record(Some(ok), || {
                    format!("{}: {} of a {} witness at m={}", name, step, w.variant.name(), w.m)
                });
            }
        }
        let sq = power(p, 2, opts.size_cap)?;
        if sq.len() <= 12 {
            let crit = Criterion::limit(p, 2, opts.size_cap)?;
            let downs = all_down_sets(&sq);
            let pass: Vec<Decision> = downs.iter().map(|d| crit.check(d, &opts.budget)).collect();
            for (i, d) in downs.iter().enumerate() {
                if !pass[i].is_yes() {
                    continue;
                }
                for (j, e) in downs.iter().enumerate() {
                    if e.is_subset(d) {
                        closure.record(pass[j].ne(&Decision::Unknown).then_some(pass[j].is_yes()), || {
                            format!("{}: an open passes but a sub-open does not", name)
                        });
                    }
                }
            }
        }
    }
    let mut properties = mono.to_vec();
    properties.extend([bound_below, agree, k_zero, k_mono, transports, closure]);
    Ok(SuiteReport {
        suite: "lemmas".into(),
        corpus_size: corpus.len(),
        properties,
    })
}

/// Consequences of the limit criterion: monotonicity in `n`, the
/// contractibility law, homotopy invariance and the inequality chain.
pub fn corollaries(config: &VerifyConfig) -> Result<SuiteReport> {
    let corpus = config.corpus();
    let opts = &config.opts;
    let mut in_n = PropertyResult::new("cc_2 <= cc_3");
    let mut contractible = PropertyResult::new("cc_2 = 1 iff contractible");
    let mut invariance = PropertyResult::new("cc_2 invariant under passing to the core");
    let mut chain = PropertyResult::new("cat(P) <= cc_2(P) <= cat(P^2) <= cat(P)^2");
    for (name, p) in &corpus {
        let c2 = exact(&cc_n(p, 2, opts)?);
        if p.len() <= 5 {
            let c3 = exact(&cc_n(p, 3, opts)?);
            in_n.record(value_le(c2, c3), || format!("{}: cc_2 = {}, cc_3 = {}", name, c2, c3));
        }
        let contr = is_contractible(p);
        contractible.record(c2.finite().map(|v| (v == 1) == contr), || {
            format!("{}: cc_2 = {}, contractible = {}", name, c2, contr)
        });
        let cp = Arc::new(core(p));
        let cc_core = exact(&cc_n(&cp, 2, opts)?);
        invariance.record(value_eq(c2, cc_core), || {
            format!("{}: cc_2 = {}, on the core {}", name, c2, cc_core)
        });
        let cat_p = exact(&cat(p, opts)?);
        let sq = Arc::new(power(p, 2, opts.size_cap)?);
        let cat_sq = exact(&cat(&sq, opts)?);
        let squared = match cat_p {
            Value::Finite(v) => Value::Finite(v * v),
            other => other,
        };
        let outcome = [
            value_le(cat_p, c2),
            value_le(c2, cat_sq),
            value_le(cat_sq, squared),
        ]
        .into_iter()
        .try_fold(true, |acc, x| x.map(|b| acc && b));
        chain.record(outcome, || {
            format!("{}: cat {}, cc_2 {}, cat of square {}, cat squared {}", name, cat_p, c2, cat_sq, squared)
        });
    }
    Ok(SuiteReport {
        suite: "corollaries".into(),
        corpus_size: corpus.len(),
        properties: vec![in_n, contractible, invariance, chain],
    })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Small complexes used by the transfer suite.
pub fn complex_corpus() -> Vec<(String, SimplicialComplex)> {
    let two_points = SimplicialComplex::new(vec!["a".into(), "b".into()], vec![vec![0], vec![1]]).expect("valid");
    let path = SimplicialComplex::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0, 1], vec![1, 2]],
    )
    .expect("valid");
    vec![
        ("simplex:0".into(), simplex(0)),
        ("two points".into(), two_points),
        ("simplex:1".into(), simplex(1)),
        ("path".into(), path),
        ("cycle:3".into(), cycle(3).expect("valid")),
        ("simplex:2".into(), simplex(2)),
        ("cycle:4".into(), cycle(4).expect("valid")),
        ("boundary:3".into(), simplex_boundary(3).expect("valid")),
        ("cycle:5".into(), cycle(5).expect("valid")),
    ]
}

/// The correspondence between homotopy classes of monotone maps and
/// contiguity classes of simplicial maps, functoriality, and the
/// compatibility of subdivision with the order complex.
pub fn transfer(config: &VerifyConfig) -> Result<SuiteReport> {
    let opts = &config.opts;
    let small: Vec<Arc<FinitePoset>> = (1..=4).flat_map(posets).map(Arc::new).collect();
    let mut k_dir = PropertyResult::new("homotopic monotone maps have contiguous-class order complex maps");
    let mut x_dir = PropertyResult::new("contiguous simplicial maps have homotopic face poset maps");
    let mut functorial = PropertyResult::new("functors preserve identities and composition");
    let mut sd_compat = PropertyResult::new("sd of the order complex is the order complex of sd");

    for p in &small {
        for q in &small {
            let Some(maps) = enumerate_monotone_maps(p, q, 1_000_000) else {
                continue;
            };
            // homotopy classes: components of the pointwise comparability graph
            let mut homotopy = UnionFind::new(maps.len());
            let mut contiguity = UnionFind::new(maps.len());
            let kp = Arc::new(order_complex(p));
            let kq = Arc::new(order_complex(q));
            let images: Vec<SimplicialMap> = maps
                .iter()
                .map(|a| SimplicialMap::new(kp.clone(), kq.clone(), a.clone()))
                .collect::<Result<_>>()?;
            for i in 0..maps.len() {
                for j in i + 1..maps.len() {
                    let comparable = (0..p.len()).all(|x| q.leq(maps[i][x], maps[j][x]))
                        || (0..p.len()).all(|x| q.leq(maps[j][x], maps[i][x]));
                    if comparable {
                        homotopy.union(i, j);
                    }
                    if contiguous_one_step(&images[i], &images[j])? {
                        contiguity.union(i, j);
                    }
                }
            }
            for i in 0..maps.len() {
                for j in i + 1..maps.len() {
                    if homotopy.find(i) == homotopy.find(j) {
                        k_dir.record(Some(contiguity.find(i) == contiguity.find(j)), || {
                            format!("{} -> {}: {:?} and {:?}", describe(p), describe(q), maps[i], maps[j])
                        });
                    }
                }
            }
            if let Some(first) = maps.first() {
                let f = MonotoneMap::new(p.clone(), q.clone(), first.clone())?;
                let kf = k_functor(&f);
                functorial.record(Some(kf.assignment() == f.assignment()), || "K changes assignments".into());
                let id = k_functor(&MonotoneMap::identity(p.clone()));
                functorial.record(Some(id == SimplicialMap::identity(kp.clone())), || {
                    format!("K of the identity on {}", describe(p))
                });
                if let Some(second) = enumerate_monotone_maps(q, p, 1)
                    .and_then(|v| v.into_iter().next())
                    .map(|a| MonotoneMap::new(q.clone(), p.clone(), a))
                    .transpose()?
                {
                    let lhs = k_functor(&f.then(&second)?);
                    let rhs = kf.then(&k_functor(&second))?;
                    functorial.record(Some(lhs == rhs), || format!("K of a composite on {}", describe(p)));
                }
            }
        }
        let a = sd_complex(&order_complex(p), opts.size_cap)?;
        let b = order_complex(&barycentric_subdivision(p, opts.size_cap)?.poset);
        sd_compat.record(Some(a == b), || describe(p));
    }

    let complexes = complex_corpus();
    for (kn, k) in &complexes {
        let k = Arc::new(k.clone());
        for (ln, l) in &complexes {
            let l = Arc::new(l.clone());
            let Some(maps) = enumerate_simplicial_maps(&k, &l, 1_000_000) else {
                continue;
            };
            let sm: Vec<SimplicialMap> = maps
                .iter()
                .map(|a| SimplicialMap::new(k.clone(), l.clone(), a.clone()))
                .collect::<Result<_>>()?;
            let xs: Vec<MonotoneMap> = sm.iter().map(|m| x_functor(m, opts.size_cap)).collect::<Result<_>>()?;
            for i in 0..sm.len() {
                for j in i + 1..sm.len() {
                    if contiguous_one_step(&sm[i], &sm[j])? {
                        let d = homotopic(&xs[i], &xs[j], &opts.budget)?;
                        x_dir.record(d.ne(&Decision::Unknown).then_some(d.is_yes()), || {
                            format!("{} -> {}: {:?} and {:?}", kn, ln, maps[i], maps[j])
                        });
                    }
                }
            }
            let id = x_functor(&SimplicialMap::identity(k.clone()), opts.size_cap)?;
            functorial.record(Some(id.assignment().iter().enumerate().all(|(i, &v)| i == v)), || {
                format!("X of the identity on {}", kn)
            });
            if let (Some(a), Some(b)) = (
                sm.last(),
                enumerate_simplicial_maps(&l, &k, 1_000_000).and_then(|v| v.into_iter().last()),
            ) {
                let b = SimplicialMap::new(l.clone(), k.clone(), b)?;
                let lhs = x_functor(&a.then(&b)?, opts.size_cap)?;
                let rhs = x_functor(a, opts.size_cap)?.then(&x_functor(&b, opts.size_cap)?)?;
                functorial.record(Some(lhs == rhs), || format!("X of a composite {} -> {}", kn, ln));
            }
        }
    }
    Ok(SuiteReport {
        suite: "transfer".into(),
        corpus_size: small.len() + complexes.len(),
        properties: vec![k_dir, x_dir, functorial, sd_compat],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_order() {
        assert_eq!(value_le(Value::Finite(2), Value::Infinite), Some(true));
        assert_eq!(value_le(Value::Infinite, Value::Finite(2)), Some(false));
        assert_eq!(value_le(Value::Unknown, Value::Finite(2)), None);
        assert_eq!(value_eq(Value::Finite(3), Value::Finite(3)), Some(true));
    }

    #[test]
    fn union_find_merges() {
        let mut u = UnionFind::new(4);
        u.union(0, 2);
        u.union(3, 2);
        assert_eq!(u.find(3), u.find(0));
        assert_ne!(u.find(1), u.find(0));
    }
}

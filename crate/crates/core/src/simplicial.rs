//! Simplicial complexes, simplicial maps and contiguity, and the passage
//! between complexes and finite spaces.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::budget::{Budget, Decision};
use crate::complexity::SearchOptions;
use crate::error::{Error, Result};
use crate::poset::{inclusion_poset, FinitePoset, MonotoneMap};
use crate::report::ComplexityReport;
use crate::subdivision::cc_inf_n;

/// A finite abstract simplicial complex given by its facets.
///
/// Facets are stored sorted, pairwise non-contained, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    facets: Vec<Vec<usize>>,
    facet_bits: Vec<FixedBitSet>,
}

impl SimplicialComplex {
    /// Normalizes `facets`: duplicates and non-maximal sets are dropped, and
    /// vertices lying in no facet become isolated points.
    pub fn new(labels: Vec<String>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let mut seen = HashMap::new();
        for l in &labels {
            if seen.insert(l.as_str(), ()).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut sets: Vec<Vec<usize>> = Vec::new();
        let mut used = vec![false; n];
        for mut f in facets {
            if f.is_empty() {
                return Err(Error::InvalidArgument("empty facet".into()));
            }
            f.sort_unstable();
            f.dedup();
            for &v in &f {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, len: n });
                }
                used[v] = true;
            }
            sets.push(f);
        }
        sets.extend((0..n).filter(|&v| !used[v]).map(|v| vec![v]));
        sets.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        sets.dedup();
        let to_bits = |f: &[usize]| {
            let mut b = FixedBitSet::with_capacity(n);
            f.iter().for_each(|&v| b.insert(v));
            b
        };
        let mut kept: Vec<Vec<usize>> = Vec::new();
        let mut kept_bits: Vec<FixedBitSet> = Vec::new();
        for f in sets {
            let b = to_bits(&f);
            if !kept_bits.iter().any(|k| b.is_subset(k)) {
                kept.push(f);
                kept_bits.push(b);
            }
        }
        let mut order: Vec<usize> = (0..kept.len()).collect();
        order.sort_by(|&a, &b| kept[a].cmp(&kept[b]));
        let facets: Vec<Vec<usize>> = order.iter().map(|&i| kept[i].clone()).collect();
        let facet_bits = order.iter().map(|&i| kept_bits[i].clone()).collect();
        Ok(SimplicialComplex {
            labels,
            facets,
            facet_bits,
        })
    }

    /// Builds a complex from facets written with vertex labels; vertices are
    /// numbered in order of first appearance.
    pub fn from_labeled_facets(facets: &[Vec<String>]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut out = Vec::with_capacity(facets.len());
        for f in facets {
            let mut idx = Vec::with_capacity(f.len());
            for l in f {
                let i = *index.entry(l.clone()).or_insert_with(|| {
                    labels.push(l.clone());
                    labels.len() - 1
                });
                idx.push(i);
            }
            out.push(idx);
        }
        Self::new(labels, out)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Largest facet dimension; `-1` for the empty complex.
    pub fn dimension(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    /// Whether the (nonempty) vertex set is a simplex.
    pub fn is_simplex(&self, vertices: &[usize]) -> bool {
        if vertices.is_empty() || vertices.iter().any(|&v| v >= self.labels.len()) {
            return false;
        }
        self.facet_bits.iter().any(|f| vertices.iter().all(|&v| f.contains(v)))
    }

    /// All nonempty simplices, sorted by size and then lexicographically.
    pub fn simplices(&self) -> Vec<Vec<usize>> {
        let mut all: Vec<Vec<usize>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for f in &self.facets {
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                let s: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                if seen.insert(s.clone()) {
                    all.push(s);
                }
            }
        }
        all.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices().len()
    }

    fn label_of(&self, s: &[usize]) -> String {
        let parts: Vec<&str> = s.iter().map(|&v| self.label(v)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// `𝒦(P)`: vertices are the elements of `P`, simplices its nonempty chains.
pub fn order_complex(p: &FinitePoset) -> SimplicialComplex {
    SimplicialComplex::new(p.labels().to_vec(), p.maximal_chains()).expect("chains of a poset form a complex")
}

/// `𝒳(K)`: nonempty simplices ordered by inclusion, indexed like
/// [`SimplicialComplex::simplices`].
pub fn face_poset(k: &SimplicialComplex, cap: usize) -> Result<FinitePoset> {
    let bound = k
        .facets
        .iter()
        .map(|f| (1u128 << f.len().min(100)) - 1)
        .fold(0u128, u128::saturating_add);
    if bound > cap as u128 {
        let requested = if k.facets.iter().all(|f| f.len() <= 24) {
            k.simplex_count()
        } else {
            usize::try_from(bound).unwrap_or(usize::MAX)
        };
        if requested > cap {
            return Err(Error::SizeLimitExceeded { requested, cap });
        }
    }
    let (poset, _) = inclusion_poset(k.simplices(), |s| k.label_of(s));
    Ok(poset)
}

/// `sd(K) = 𝒦(𝒳(K))`.
pub fn sd_complex(k: &SimplicialComplex, cap: usize) -> Result<SimplicialComplex> {
    Ok(order_complex(&face_poset(k, cap)?))
}

/// A vertex map sending simplices to simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    domain: Arc<SimplicialComplex>,
    codomain: Arc<SimplicialComplex>,
    assignment: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(domain: Arc<SimplicialComplex>, codomain: Arc<SimplicialComplex>, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != domain.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} entries for {} vertices",
                assignment.len(),
                domain.vertex_count()
            )));
        }
        if let Some(&v) = assignment.iter().find(|&&v| v >= codomain.vertex_count()) {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: codomain.vertex_count(),
            });
        }
        for f in domain.facets() {
            let image: Vec<usize> = f.iter().map(|&v| assignment[v]).collect();
            if !codomain.is_simplex(&image) {
                return Err(Error::NotSimplicial(format!(
                    "{} goes to {}",
                    domain.label_of(f),
                    codomain.label_of(&sorted(image))
                )));
            }
        }
        Ok(SimplicialMap {
            domain,
            codomain,
            assignment,
        })
    }

    pub fn identity(k: Arc<SimplicialComplex>) -> Self {
        let assignment = (0..k.vertex_count()).collect();
        SimplicialMap {
            domain: k.clone(),
            codomain: k,
            assignment,
        }
    }

    pub fn constant(domain: Arc<SimplicialComplex>, codomain: Arc<SimplicialComplex>, vertex: usize) -> Result<Self> {
        let n = domain.vertex_count();
        Self::new(domain, codomain, vec![vertex; n])
    }

    pub fn domain(&self) -> &Arc<SimplicialComplex> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SimplicialComplex> {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Image of a simplex, sorted and without repetitions.
    pub fn image(&self, simplex: &[usize]) -> Vec<usize> {
        sorted(simplex.iter().map(|&v| self.assignment[v]).collect())
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SimplicialMap) -> Result<SimplicialMap> {
        if *self.codomain != *next.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(SimplicialMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            assignment: self.assignment.iter().map(|&v| next.assignment[v]).collect(),
        })
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn same_ends(a: &SimplicialMap, b: &SimplicialMap) -> Result<()> {
    if *a.domain != *b.domain || *a.codomain != *b.codomain {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

fn contiguous_assignments(k: &SimplicialComplex, l: &SimplicialComplex, a: &[usize], b: &[usize]) -> bool {
    k.facets().iter().all(|f| {
        let joined: Vec<usize> = f.iter().flat_map(|&v| [a[v], b[v]]).collect();
        l.is_simplex(&joined)
    })
}

/// Whether `φ(σ) ∪ ψ(σ)` is a simplex for every simplex `σ`; checking the
/// facets suffices.
pub fn contiguous_one_step(phi: &SimplicialMap, psi: &SimplicialMap) -> Result<bool> {
    same_ends(phi, psi)?;
    Ok(contiguous_assignments(&phi.domain, &phi.codomain, &phi.assignment, &psi.assignment))
}

/// All simplicial maps `k -> l` as vertex assignments, in lexicographic
/// order; `None` when more than `limit` search nodes would be needed.
pub fn enumerate_simplicial_maps(k: &SimplicialComplex, l: &SimplicialComplex, limit: usize) -> Option<Vec<Vec<usize>>> {
    let n = k.vertex_count();
    // facets of k whose largest vertex is v, checked once v is assigned
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, f) in k.facets().iter().enumerate() {
        closing[*f.last().unwrap()].push(i);
    }
    // faces spanned by a facet prefix are checked as soon as they are assigned
    let mut prefix_faces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for f in k.facets() {
        for end in 2..f.len() {
            prefix_faces[f[end - 1]].push(f[..end].to_vec());
        }
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    let mut nodes = 0usize;
    #[allow(clippy::too_many_arguments)]
    fn go(
        v: usize,
        k: &SimplicialComplex,
        l: &SimplicialComplex,
        closing: &[Vec<usize>],
        prefix_faces: &[Vec<Vec<usize>>],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        nodes: &mut usize,
        limit: usize,
    ) -> bool {
        if v == current.len() {
            out.push(current.clone());
            return true;
        }
        for w in 0..l.vertex_count() {
            *nodes += 1;
            if *nodes > limit {
                return false;
            }
            current[v] = w;
            let ok = prefix_faces[v]
                .iter()
                .all(|s| l.is_simplex(&s.iter().map(|&x| current[x]).collect::<Vec<_>>()))
                && closing[v]
                    .iter()
                    .all(|&i| l.is_simplex(&k.facets()[i].iter().map(|&x| current[x]).collect::<Vec<_>>()));
            if ok && !go(v + 1, k, l, closing, prefix_faces, current, out, nodes, limit) {
                return false;
            }
        }
        true
    }
    if n == 0 {
        return Some(vec![Vec::new()]);
    }
    go(0, k, l, &closing, &prefix_faces, &mut current, &mut out, &mut nodes, limit).then_some(out)
}

/// Whether `φ` and `ψ` lie in one contiguity class, by breadth-first search
/// over all simplicial maps between their complexes. `Unknown` when the maps
/// cannot be enumerated within the budget.
pub fn same_contiguity_class(phi: &SimplicialMap, psi: &SimplicialMap, budget: &Budget) -> Result<Decision> {
    same_ends(phi, psi)?;
    if phi.assignment == psi.assignment {
        return Ok(Decision::Yes);
    }
    let (k, l) = (&phi.domain, &phi.codomain);
    let Some(maps) = enumerate_simplicial_maps(k, l, budget.max_nodes) else {
        return Ok(Decision::Unknown);
    };
    let index: HashMap<&[usize], usize> = maps.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let start = index[phi.assignment.as_slice()];
    let goal = index[psi.assignment.as_slice()];
    let mut seen = vec![false; maps.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut steps = 0usize;
    while let Some(i) = queue.pop_front() {
        for j in 0..maps.len() {
            if seen[j] {
                continue;
            }
            steps += 1;
            if steps.is_multiple_of(4096) && budget.expired() {
                return Ok(Decision::Unknown);
            }
            if contiguous_assignments(k, l, &maps[i], &maps[j]) {
                if j == goal {
                    return Ok(Decision::Yes);
                }
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(Decision::No)
}

/// `𝒦(f)`: the same vertex assignment between order complexes.
pub fn k_functor(f: &MonotoneMap) -> SimplicialMap {
    SimplicialMap {
        domain: Arc::new(order_complex(f.domain())),
        codomain: Arc::new(order_complex(f.codomain())),
        assignment: f.assignment().to_vec(),
    }
}

/// `𝒳(φ)`: a simplex goes to its image, between face posets.
pub fn x_functor(phi: &SimplicialMap, cap: usize) -> Result<MonotoneMap> {
    let dom = face_poset(&phi.domain, cap)?;
    let cod = face_poset(&phi.codomain, cap)?;
    let target_simplices = phi.codomain.simplices();
    let index: HashMap<&[usize], usize> = target_simplices.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let assignment = phi
        .domain
        .simplices()
        .iter()
        .map(|s| index[phi.image(s).as_slice()])
        .collect();
    MonotoneMap::new(Arc::new(dom), Arc::new(cod), assignment)
}

/// `SC_n(𝒦(P))`, computed as `CC^∞_n(P)`.
pub fn sc_n_of_order_complex(
    p: &Arc<FinitePoset>,
    n: usize,
    k_max: usize,
    subdivision_cap: usize,
    opts: &SearchOptions,
) -> Result<ComplexityReport> {
    let mut report = cc_inf_n(p, n, k_max, subdivision_cap, opts)?;
    report.invariant = "sc".into();
    let via = "computed as cc_inf of the poset, whose order complex is the input complex";
    report.note = Some(match report.note.take() {
        Some(n) => format!("{}; {}", via, n),
        None => via.into(),
    });
    Ok(report)
}

/// `SC_n(K)`, computed as `CC^∞_n(𝒳(K))`: the order complex of the face
/// poset is `sd(K)`, whose realization is that of `K`.
pub fn sc_n_of_complex(
    k: &SimplicialComplex,
    n: usize,
    k_max: usize,
    subdivision_cap: usize,
    opts: &SearchOptions,
) -> Result<ComplexityReport> {
    let p = Arc::new(face_poset(k, opts.size_cap)?);
    let mut report = cc_inf_n(&p, n, k_max, subdivision_cap, opts)?;
    report.invariant = "sc".into();
    let via = "computed as cc_inf of the face poset";
    report.note = Some(match report.note.take() {
        Some(n) => format!("{}; {}", via, n),
        None => via.into(),
    });
    Ok(report)
}

/// Cycle on `m >= 3` vertices `v0 .. v{m-1}`.
pub fn cycle(m: usize) -> Result<SimplicialComplex> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("a cycle needs at least 3 vertices, got {}", m)));
    }
    let labels = (0..m).map(|i| format!("v{}", i)).collect();
    SimplicialComplex::new(labels, (0..m).map(|i| vec![i, (i + 1) % m]).collect())
}

/// The full `d`-simplex on `d + 1` vertices.
pub fn simplex(d: usize) -> SimplicialComplex {
    let labels = (0..=d).map(|i| format!("v{}", i)).collect();
    SimplicialComplex::new(labels, vec![(0..=d).collect()]).expect("a simplex is a complex")
}

/// Boundary of the `d`-simplex, a `(d-1)`-sphere; needs `d >= 1`.
pub fn simplex_boundary(d: usize) -> Result<SimplicialComplex> {
    if d == 0 {
        return Err(Error::InvalidArgument("the boundary of a point is empty".into()));
    }
    let labels = (0..=d).map(|i| format!("v{}", i)).collect();
    let facets = (0..=d).map(|skip| (0..=d).filter(|&i| i != skip).collect()).collect();
    SimplicialComplex::new(labels, facets)
}

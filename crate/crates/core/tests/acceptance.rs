//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS or FAIL line per check.

use std::cell::OnceCell;
use std::collections::VecDeque;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use finitetc_core::complexity::{cat, cc_n, SearchOptions};
use finitetc_core::corpus::{connected_posets_up_to, random_connected_posets};
use finitetc_core::homotopy::{core, enumerate_monotone_maps, is_contractible};
use finitetc_core::poset::{fence, sphere, FinitePoset};
use finitetc_core::report::{ComplexityReport, Value};
use finitetc_core::simplicial::{cycle, sc_n_of_complex};
use finitetc_core::subdivision::{cc_inf_n, SubdivisionTower, DEFAULT_SUBDIVISION_CAP};
use finitetc_core::verify::{corollaries, lemmas, transfer, SuiteReport, VerifyConfig};

type Outcome = Result<String, Box<dyn std::error::Error>>;
type Check<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn exact(r: &ComplexityReport, expected: usize) -> Result<(), String> {
    if r.value == Value::Finite(expected) && r.is_exact() {
        Ok(())
    } else {
        Err(format!("{} = {} ({:?}), expected exactly {}", r.invariant, r.value, r.certified, expected))
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {:.1?}, limit {:?}", t, limit))
    }
}

/// Every named property of the suite passed on at least one instance.
fn suite_properties(report: &SuiteReport, names: &[&str]) -> Outcome {
    let mut seen = Vec::new();
    for name in names {
        let p = report
            .properties
            .iter()
            .find(|p| p.name == *name)
            .ok_or_else(|| format!("suite {} has no property `{}`", report.suite, name))?;
        if !p.ok() {
            return Err(format!("{}: {} violations, first: {}", p.name, p.failures.len(), p.failures[0]).into());
        }
        if p.checked == 0 {
            return Err(format!("{}: nothing was decided", p.name).into());
        }
        seen.push(format!("{} {}/{}", p.name, p.passed, p.checked));
    }
    Ok(seen.join("; "))
}

fn circle_cc2_and_cat() -> Outcome {
    let start = Instant::now();
    let p = Arc::new(sphere(1));
    let opts = SearchOptions::default();
    exact(&cc_n(&p, 2, &opts)?, 4)?;
    exact(&cat(&p, &opts)?, 2)?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("cc_2 = 4, cat = 2 in {:.2?}", start.elapsed()))
}

fn circle_cc3() -> Outcome {
    let start = Instant::now();
    let p = Arc::new(sphere(1));
    exact(&cc_n(&p, 3, &SearchOptions::default())?, 8)?;
    within(start, Duration::from_secs(600))?;
    Ok(format!("cc_3 = 8 in {:.2?}", start.elapsed()))
}

/// Checks a cover of a subdivision level by hand: the members cover the
/// level, and each member carries fence paths from `ρ_1(x)` to `ρ_2(x)`
/// that are order preserving in `x`.
fn check_explicit_cover(p: &Arc<FinitePoset>, report: &ComplexityReport) -> Result<(), Box<dyn std::error::Error>> {
    let ambient = report.cover_sets.first().ok_or("no cover members reported")?.ambient().clone();
    let mut tower = SubdivisionTower::new(p, 2, DEFAULT_SUBDIVISION_CAP)?;
    let mut k = 0;
    while tower.poset(k).len() != ambient.len() {
        k += 1;
        tower.extend_to(k, DEFAULT_SUBDIVISION_CAP)?;
    }
    if **tower.poset(k) != *ambient {
        return Err("cover lives on an unexpected space".into());
    }
    let rho1 = tower.rho(k, 1)?;
    let rho2 = tower.rho(k, 2)?;
    let mut covered = vec![false; ambient.len()];
    let crit = tower.criterion(k)?;
    let budget = SearchOptions::default().budget;
    for u in &report.cover_sets {
        for x in u.iter() {
            covered[x] = true;
        }
        let Some(finitetc_core::complexity::CoverWitness::Section(w)) = crit.witness(u.members(), &budget)? else {
            return Err("a cover member has no section witness".into());
        };
        let members: Vec<usize> = u.iter().collect();
        let shape = fence(w.paths[0].len() - 1);
        for (i, &x) in members.iter().enumerate() {
            let path = &w.paths[i];
            if path[0] != rho1.apply(x) || path[path.len() - 1] != rho2.apply(x) {
                return Err(format!("path over {} has wrong ends", ambient.label(x)).into());
            }
            for a in 0..shape.len() {
                for b in 0..shape.len() {
                    if shape.leq(a, b) && !p.leq(path[a], path[b]) {
                        return Err(format!("path over {} is not a fence path", ambient.label(x)).into());
                    }
                }
            }
            for (j, &y) in members.iter().enumerate() {
                if ambient.leq(y, x) && (0..path.len()).any(|t| !p.leq(w.paths[j][t], path[t])) {
                    return Err(format!("paths over {} and {} are not ordered", ambient.label(y), ambient.label(x)).into());
                }
            }
        }
    }
    if covered.iter().any(|c| !c) {
        return Err("cover members miss some points".into());
    }
    Ok(())
}

fn circle_cc_inf() -> Outcome {
    let start = Instant::now();
    let p = Arc::new(sphere(1));
    let report = cc_inf_n(&p, 2, 2, DEFAULT_SUBDIVISION_CAP, &SearchOptions::default())?;
    exact(&report, 2)?;
    if report.cover_sets.len() != 2 {
        return Err(format!("{} cover members reported", report.cover_sets.len()).into());
    }
    check_explicit_cover(&p, &report)?;
    within(start, Duration::from_secs(900))?;
    Ok(format!(
        "cc_inf = 2 with an explicit 2-cover of {} points in {:.2?}",
        report.ambient_size,
        start.elapsed()
    ))
}

/// Contractibility by search: the identity reaches a constant map through
/// pointwise comparable monotone self-maps.
fn contractible_by_search(p: &FinitePoset) -> bool {
    let n = p.len();
    let maps = enumerate_monotone_maps(p, p, usize::MAX).expect("no limit");
    let id: Vec<usize> = (0..n).collect();
    let start = maps.iter().position(|f| *f == id).expect("identity is monotone");
    let mut seen = vec![false; maps.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        if maps[i].iter().all(|&v| v == maps[i][0]) {
            return true;
        }
        for j in 0..maps.len() {
            let le = (0..n).all(|x| p.leq(maps[i][x], maps[j][x]));
            let ge = (0..n).all(|x| p.leq(maps[j][x], maps[i][x]));
            if !seen[j] && (le || ge) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    false
}

fn contractibility_law() -> Outcome {
    let opts = SearchOptions::default();
    let all = connected_posets_up_to(5);
    let mut contractible = 0;
    for p in &all {
        let expected = contractible_by_search(p);
        let r = cc_n(&Arc::new(p.clone()), 2, &opts)?;
        if !r.is_exact() {
            return Err(format!("cc_2 undecided on {:?}", p.hasse_edges()).into());
        }
        if (r.value == Value::Finite(1)) != expected || is_contractible(p) != expected {
            return Err(format!("mismatch on {:?}: cc_2 = {}, contractible = {}", p.hasse_edges(), r.value, expected).into());
        }
        contractible += expected as usize;
    }
    Ok(format!("{} connected posets, {} contractible", all.len(), contractible))
}

fn corpus_config() -> VerifyConfig {
    VerifyConfig {
        include_builtin: true,
        random: 100,
        max_size: 5,
        seed: 2024,
        opts: SearchOptions::default(),
    }
}

fn lemma_properties(report: &SuiteReport) -> Outcome {
    suite_properties(
        report,
        &[
            "cc_nm non-increasing in m (wedge)",
            "cc_nm non-increasing in m (linear)",
            "cc^1 <= cc^0",
            "stabilized wedge and linear minima equal cc_n",
        ],
    )
}

fn core_invariance() -> Outcome {
    let opts = SearchOptions::default();
    let sample = random_connected_posets(50, 6, 77);
    let mut reduced = 0;
    for p in &sample {
        let c = core(p);
        reduced += (c.len() < p.len()) as usize;
        let a = cc_n(&Arc::new(p.clone()), 2, &opts)?;
        let b = cc_n(&Arc::new(c), 2, &opts)?;
        if !a.is_exact() || !b.is_exact() || a.value != b.value {
            return Err(format!("{:?}: cc_2 = {}, of the core {}", p.hasse_edges(), a.value, b.value).into());
        }
    }
    Ok(format!("50 posets, {} with a proper core", reduced))
}

fn four_cycle_sc() -> Outcome {
    let start = Instant::now();
    let r = sc_n_of_complex(&cycle(4)?, 2, 2, DEFAULT_SUBDIVISION_CAP, &SearchOptions::default())?;
    exact(&r, 2)?;
    within(start, Duration::from_secs(900))?;
    Ok(format!("sc_2 = 2 in {:.2?}", start.elapsed()))
}

fn main() -> ExitCode {
    let config = corpus_config();
    let lemma_report: OnceCell<SuiteReport> = OnceCell::new();
    let get_lemmas = || -> Result<&SuiteReport, Box<dyn std::error::Error>> {
        if lemma_report.get().is_none() {
            let _ = lemma_report.set(lemmas(&config)?);
        }
        Ok(lemma_report.get().expect("just computed"))
    };
    let checks: Vec<Check> = vec![
        ("1 circle cc_2 and cat", Box::new(circle_cc2_and_cat)),
        ("2 circle cc_3", Box::new(circle_cc3)),
        ("3 circle cc_inf with explicit cover", Box::new(circle_cc_inf)),
        ("4 cc_2 = 1 iff contractible", Box::new(contractibility_law)),
        ("5 bounded and subdivided lemmas", Box::new(|| lemma_properties(get_lemmas()?))),
        (
            "6 inequality chain",
            Box::new(|| {
                let r = corollaries(&config)?;
                suite_properties(&r, &["cat(P) <= cc_2(P) <= cat(P^2) <= cat(P)^2"])
            }),
        ),
        ("7 core invariance", Box::new(core_invariance)),
        (
            "8 order complex and face poset transfer",
            Box::new(|| {
                let r = transfer(&config)?;
                suite_properties(
                    &r,
                    &[
                        "homotopic monotone maps have contiguous-class order complex maps",
                        "contiguous simplicial maps have homotopic face poset maps",
                    ],
                )
            }),
        ),
        (
            "9 transported witnesses",
            Box::new(|| suite_properties(get_lemmas()?, &["transported witnesses are valid"])),
        ),
        ("10 four-cycle sc", Box::new(four_cycle_sc)),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        match check() {
            Ok(detail) => println!("PASS criterion {}: {} [{:.1?}]", name, detail, start.elapsed()),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {}: {} [{:.1?}]", name, e, start.elapsed());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

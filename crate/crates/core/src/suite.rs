// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! The acceptance battery. Every check is exact and every random instance
//! comes from a fixed seed, so a report depends on nothing but the code.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball::{growth_counts, growth_counts_covering, BallTable, GrowthCounts};
use crate::constants::{
    certify_at_scale, check_folner_form, csc_to_folner, folner_to_csc, quotient_estimate, BoundParams, Extended, Scope,
};
use crate::error::{Error, Result};
use crate::folner::{
    ball_subset_profile, boundary_profile, folner_exact, folner_record, minimal_ratio_component, FolnerValue,
    ProfileEntry,
};
use crate::group::{Element, Group, GroupHandle};
use crate::isoperimetry::{boundary_ratio, evaluate, standard_forms, FiniteSubset};
use crate::rational::{int, ratio, uint, Rational};
use crate::transport::{build_ledger, verify_lemma, Lemma, TransportLedger};

const SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:>2} {:<22} {verdict}  {}",
            self.id, self.name, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionResult>,
    pub passed: bool,
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.criteria {
            writeln!(f, "{c}")?;
        }
        let failed = self.criteria.iter().filter(|c| !c.passed).count();
        write!(f, "{} criteria, {failed} failed", self.criteria.len())
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "growth-exactness"),
    (2, "growth-lemmas"),
    (3, "counting-identity"),
    (4, "transport-and-fibers"),
    (5, "inequality-battery"),
    (6, "folner-exactness"),
    (7, "bound-conversions"),
    (8, "constant-consistency"),
    (9, "reduction-soundness"),
    (10, "determinism"),
];

fn group(desc: &str) -> GroupHandle {
    desc.parse().expect("built-in descriptor")
}

/// Runs one of criteria 1–9. Errors become failures with the error as detail.
pub fn run_criterion(id: u32, budget: usize) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let outcome = match id {
        1 => growth_exactness(budget),
        2 => growth_lemmas(budget),
        3 => counting_identity(budget),
        4 => transport_and_fibers(budget),
        5 => inequality_battery(budget),
        6 => folner_exactness(budget),
        7 => bound_conversions(budget),
        8 => constant_consistency(budget),
        9 => reduction_soundness(budget),
        _ => Err(Error::BadParams(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

/// Criteria 1–9 on the current rayon pool.
pub fn run_criteria(budget: usize) -> Vec<CriterionResult> {
    (1..=9).map(|id| run_criterion(id, budget)).collect()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::BadParams(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// The full battery. Criteria 1–9 run on the current pool; criterion 10
/// reruns them on a pool of a different size and compares the reports.
pub fn run_suite(budget: usize) -> SuiteReport {
    let mut criteria = run_criteria(budget);
    let other = if rayon::current_num_threads() == 1 { 8 } else { 1 };
    let determinism = match in_pool(other, || run_criteria(budget)) {
        Ok(again) if again == criteria => (
            true,
            "criteria 1-9 identical under a different worker count".to_string(),
        ),
        Ok(again) => {
            let differing: Vec<String> = criteria
                .iter()
                .zip(&again)
                .filter(|(a, b)| a != b)
                .map(|(a, _)| a.id.to_string())
                .collect();
            (false, format!("reports differ on criteria {}", differing.join(",")))
        }
        Err(e) => (false, format!("error: {e}")),
    };
    criteria.push(CriterionResult {
        id: 10,
        name: "determinism",
        passed: determinism.0,
        detail: determinism.1,
    });
    let passed = criteria.iter().all(|c| c.passed);
    SuiteReport { criteria, passed }
}

type Outcome = Result<(bool, String)>;

/// Ball counts from raw words: every word of length `≤ r` is multiplied out
/// and each element keeps its shortest length.
pub fn word_enumeration_counts<G: Group>(g: &G, r: u32) -> Vec<u64> {
    let mut best: BTreeMap<G::Element, u32> = BTreeMap::new();
    let mut words = vec![g.identity()];
    for len in 0..=r {
        for w in &words {
            best.entry(w.clone()).or_insert(len);
        }
        if len < r {
            words = words
                .iter()
                .flat_map(|w| g.generators().iter().map(move |s| g.mul(w, s)))
                .collect();
        }
    }
    (0..=r)
        .map(|k| best.values().filter(|&&len| len <= k).count() as u64)
        .collect()
}

type ClosedForm = fn(u64) -> u64;

fn growth_exactness(budget: usize) -> Outcome {
    let cases: [(&str, u32, ClosedForm); 3] = [
        ("z:1", 20, |r| 2 * r + 1),
        ("z:2", 20, |r| 2 * r * r + 2 * r + 1),
        ("free:2", 8, |r| 2 * 3u64.pow(r as u32) - 1),
    ];
    let mut mismatches = Vec::new();
    for (desc, radius, closed) in cases {
        let g = group(desc);
        let counts = growth_counts(&g, radius, budget)?;
        for r in 0..=radius {
            if counts.b()[r as usize] != closed(r as u64) {
                mismatches.push(format!("{desc} r={r}"));
            }
        }
        // The closed forms themselves, against raw word enumeration.
        let words = word_enumeration_counts(&g, 4);
        for r in 0..=4u32 {
            if words[r as usize] != closed(r as u64) {
                mismatches.push(format!("{desc} words r={r}"));
            }
        }
    }
    Ok((
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "z:1, z:2 to r=20 and free:2 to r=8 match closed forms; closed forms match word enumeration to r=4".into()
        } else {
            format!("mismatch at {}", mismatches.join(", "))
        },
    ))
}

fn growth_lemmas(budget: usize) -> Outcome {
    let cases = [
        ("z:1", 20),
        ("z:2", 20),
        ("z:3", 20),
        ("free:2", 20),
        ("free:3", 20),
        ("dinf", 20),
        ("heis", 8),
        ("lamplighter", 6),
    ];
    let mut failures = Vec::new();
    for (desc, radius) in cases {
        let counts = growth_counts(&group(desc), radius, budget)?;
        for lemma in [Lemma::Spheres, Lemma::Balls] {
            let report = crate::transport::verify_growth_lemma(&counts, &lemma)?;
            if !report.holds {
                failures.push(format!("{desc} {lemma} {}", report.witness.unwrap_or_default()));
            }
        }
    }
    let names: Vec<String> = cases.iter().map(|(d, r)| format!("{d}:R={r}")).collect();
    Ok(summary(
        failures,
        format!("spheres and balls hold for 2 ≤ r ≤ R on {}", names.join(" ")),
    ))
}

fn summary(failures: Vec<String>, ok: String) -> (bool, String) {
    if failures.is_empty() {
        (true, ok)
    } else {
        let shown: Vec<&String> = failures.iter().take(5).collect();
        (false, format!("{} failures, first: {:?}", failures.len(), shown))
    }
}

/// One transport instance: group, `Ω`, radius.
pub struct Instance {
    pub group: GroupHandle,
    pub omega: Vec<Element>,
    pub r: u32,
}

pub const INSTANCE_GROUPS: [&str; 6] = ["z:1", "z:2", "free:2", "dinf", "heis", "lamplighter"];

/// `count` seeded instances with `|Ω| ≤ 12` and `r ≤ 3`. Half of the sets
/// grow connected from a random start, half are scattered over `B(3)`.
pub fn random_instances(count: usize, seed: u64, budget: usize) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables: Vec<BallTable<GroupHandle>> = INSTANCE_GROUPS
        .iter()
        .map(|d| BallTable::build(&group(d), 3, budget))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let table = &tables[i % tables.len()];
        let g = table.group();
        let size = rng.gen_range(1..=12);
        let mut omega: BTreeSet<Element> = BTreeSet::new();
        if rng.gen_bool(0.5) {
            let mut members = vec![table.elements().choose(&mut rng).expect("non-empty").clone()];
            omega.insert(members[0].clone());
            while omega.len() < size {
                let x = members.choose(&mut rng).expect("non-empty").clone();
                let s = g.generators().choose(&mut rng).expect("non-empty");
                let y = g.mul(&x, s);
                if omega.insert(y.clone()) {
                    members.push(y);
                }
            }
        } else {
            while omega.len() < size.min(table.len()) {
                omega.insert(table.elements().choose(&mut rng).expect("non-empty").clone());
            }
        }
        out.push(Instance {
            group: g.clone(),
            omega: omega.into_iter().collect(),
            r: rng.gen_range(1..=3),
        });
    }
    Ok(out)
}

/// The ledger of every instance of criteria 3 and 4, with the table it was
/// built against.
fn instance_ledgers(budget: usize) -> Result<Vec<(TransportLedger<GroupHandle>, GrowthCounts)>> {
    let mut out = Vec::new();
    for inst in random_instances(200, SEED, budget)? {
        let table = BallTable::build(&inst.group, 3, budget)?;
        let omega = FiniteSubset::new(&inst.group, inst.omega);
        out.push((build_ledger(&omega, &table, inst.r)?, table.counts().clone()));
    }
    for desc in ["z:1", "z:2"] {
        let g = group(desc);
        let table = BallTable::build(&g, 3, budget)?;
        let profile_ball = table.counts().ball(2)? as u32;
        for mask in 1u32..(1 << profile_ball) {
            let omega = FiniteSubset::new(
                &g,
                (0..profile_ball)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| table.element(i).clone()),
            );
            for r in 1..=3 {
                out.push((build_ledger(&omega, &table, r)?, table.counts().clone()));
            }
        }
    }
    Ok(out)
}

fn check_ledgers(budget: usize, lemmas: &[Lemma]) -> Result<(usize, Vec<String>)> {
    let ledgers = instance_ledgers(budget)?;
    let mut failures = Vec::new();
    for (ledger, counts) in &ledgers {
        for lemma in lemmas {
            let report = verify_lemma(ledger, counts, lemma)?;
            if !report.holds {
                failures.push(format!(
                    "{} |Ω|={} r={} {lemma} {}",
                    ledger.omega.group(),
                    ledger.omega.len(),
                    ledger.r,
                    report.witness.unwrap_or_default()
                ));
            }
        }
    }
    Ok((ledgers.len(), failures))
}

fn counting_identity(budget: usize) -> Outcome {
    let (n, failures) = check_ledgers(budget, &[Lemma::Counting])?;
    Ok(summary(
        failures,
        format!("Σ rays = Σ |Ω_g| on {n} ledgers (200 seeded, rest exhaustive over B(2) of z:1, z:2 with r = 1..3)"),
    ))
}

fn transport_and_fibers(budget: usize) -> Outcome {
    let (n, failures) = check_ledgers(budget, &[Lemma::Transport, Lemma::Fiber])?;
    Ok(summary(
        failures,
        format!("|Ω_g| ≤ |g||∂Ω| and fibers ≤ |g| on {n} ledgers"),
    ))
}

/// Checks every standard inequality form on every class of a profile.
fn battery_on_profile(
    desc: &str,
    profile: &BTreeMap<(usize, usize), ProfileEntry<GroupHandle>>,
    budget: usize,
    failures: &mut Vec<String>,
) -> Result<u64> {
    let largest = profile.keys().map(|k| k.0).max().unwrap_or(1) as u64;
    // 1/ε ≤ 4 and 1 + α ≤ 3 bound every volume the forms ask for.
    let counts = growth_counts_covering(&group(desc), &uint(4 * largest), budget)?;
    for (&(size, boundary), entry) in profile {
        for form in standard_forms() {
            let report = evaluate(size as u64, boundary as u64, &counts, &form)?;
            if !report.holds {
                let elements: Vec<String> = entry.example.iter().map(|x| x.to_string()).collect();
                failures.push(format!("{desc} {} on {{{}}}", report.form, elements.join(",")));
            }
        }
    }
    Ok(profile.values().map(|e| e.count).sum())
}

fn inequality_battery(budget: usize) -> Outcome {
    let mut failures = Vec::new();
    let mut scopes = Vec::new();
    for desc in ["z:1", "z:2"] {
        let profile = ball_subset_profile(&group(desc), 2, budget)?;
        let n = battery_on_profile(desc, &profile, budget, &mut failures)?;
        scopes.push(format!("{desc} {n} subsets of B(2)"));
    }
    for desc in ["dinf", "heis", "lamplighter"] {
        let profile = boundary_profile(&group(desc), 9, budget)?;
        let n = battery_on_profile(desc, &profile, budget, &mut failures)?;
        scopes.push(format!("{desc} {n} connected sets"));
    }
    Ok(summary(
        failures,
        format!("{} forms hold on {}", standard_forms().len(), scopes.join(", ")),
    ))
}

/// Smallest `|Ω|` with `n·|∂Ω| ≤ |Ω|` over all non-empty subsets of
/// `B(radius)`, boundaries computed by direct multiplication.
pub fn subset_folner_oracle<G: Group>(g: &G, n: u64, radius: u32, budget: usize) -> Result<Option<usize>> {
    let table = BallTable::build(g, radius, budget)?;
    let m = table.len();
    if m > 20 {
        return Err(Error::BadParams(format!("B({radius}) has {m} elements")));
    }
    let elements = table.elements();
    let mut best: Option<usize> = None;
    for mask in 1u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let members: BTreeSet<&G::Element> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| &elements[i]).collect();
        let boundary = members
            .iter()
            .filter(|x| g.generators().iter().any(|s| !members.contains(&g.mul(x, s))))
            .count();
        if n * boundary as u64 <= size as u64 {
            best = Some(size);
        }
    }
    Ok(best)
}

fn folner_exactness(budget: usize) -> Outcome {
    let mut failures = Vec::new();
    for desc in ["z:1", "z:2", "z:3", "free:1", "free:2", "dinf", "heis", "lamplighter"] {
        let rec = folner_exact(&group(desc), 1, 1, budget)?;
        let ok = rec.value == FolnerValue::Exact(1) && rec.witness.as_ref().is_some_and(|w| w.len() == 1);
        if !ok {
            failures.push(format!("{desc} n=1 gave {:?}", rec.value));
        }
    }
    for desc in ["z:1", "dinf"] {
        let g = group(desc);
        for n in 2..=6u64 {
            let rec = folner_exact(&g, n, 14, budget)?;
            let oracle = subset_folner_oracle(&g, n, 7, budget)?;
            let witness_ok = rec
                .witness
                .as_ref()
                .map(|w| boundary_ratio(w).map(|q| q <= ratio(1, n as i64) && w.len() as u64 == 2 * n))
                .transpose()?
                .unwrap_or(false);
            if rec.value != FolnerValue::Exact(2 * n) || oracle != Some(2 * n as usize) || !witness_ok {
                failures.push(format!("{desc} n={n} gave {:?}, oracle {oracle:?}", rec.value));
            }
        }
    }
    Ok(summary(
        failures,
        "Føl(1) = 1 in 8 groups; Føl(n) = 2n for 2 ≤ n ≤ 6 in z:1 and dinf, witnesses verified, matches subsets of B(7)"
            .into(),
    ))
}

fn bound_conversions(budget: usize) -> Outcome {
    let mut failures = Vec::new();
    let csc = BoundParams::csc(ratio(1, 2), int(1), 2)?;
    let folner_form = csc_to_folner(&csc, &int(1))?;
    for desc in ["z:1", "dinf"] {
        let g = group(desc);
        let counts = growth_counts(&g, 8, budget)?;
        let records = (1..=6)
            .map(|n| folner_exact(&g, n, 14, budget))
            .collect::<Result<Vec<_>>>()?;
        let check = check_folner_form(&folner_form, &records, &counts)?;
        let exact = check
            .rows
            .iter()
            .filter(|r| matches!(r.value, FolnerValue::Exact(_)))
            .count();
        if !check.holds || exact != 6 {
            failures.push(format!("{desc} folner form fails at n={:?}", check.witness));
        }
    }
    let back = folner_to_csc(&BoundParams::folner(int(1), Rational::zero(), Rational::zero(), 2)?)?;
    if back.inflation() != int(2) {
        failures.push(format!("inflation {} instead of 2", back.inflation()));
    }
    let cert = certify_at_scale(&group("z:1"), &back, Scope::ExhaustiveBallSubsets { radius: 2 }, budget)?;
    if !cert.holds {
        failures.push(format!(
            "ratio ≥ 1/Φ[2|Ω|] fails on {:?}",
            cert.witness.map(|w| w.elements)
        ));
    }
    Ok(summary(
        failures,
        format!(
            "(1/2, 1) → ρ = 1 holds on exact records n ≤ 6 of z:1 and dinf; (1, 0, 0, |S| = 2) → ratio ≥ 1/Φ[2|Ω|] on {} subsets of B(2) in z:1",
            cert.scope.sets_checked
        ),
    ))
}

fn constant_consistency(budget: usize) -> Outcome {
    let mut failures = Vec::new();
    let mut scopes = Vec::new();
    let eps = ratio(1, 4);
    let (c, alpha) = (Rational::one() - &eps, Rational::one() / &eps - Rational::one());
    let cases: [(&str, Scope); 7] = [
        ("z:1", Scope::ExhaustiveBallSubsets { radius: 2 }),
        ("z:2", Scope::ExhaustiveBallSubsets { radius: 2 }),
        ("free:2", Scope::ExhaustiveBallSubsets { radius: 2 }),
        ("free:2", Scope::ConnectedUpTo { max_size: 8 }),
        ("dinf", Scope::ConnectedUpTo { max_size: 9 }),
        ("heis", Scope::ConnectedUpTo { max_size: 9 }),
        ("lamplighter", Scope::ConnectedUpTo { max_size: 9 }),
    ];
    for (desc, scope) in cases {
        let g = group(desc);
        let p = BoundParams::csc(c.clone(), alpha.clone(), g.generators().len())?;
        let cert = certify_at_scale(&g, &p, scope, budget)?;
        if !cert.holds {
            failures.push(format!("{desc} fails on {:?}", cert.witness.map(|w| w.elements)));
        }
        scopes.push(format!("{desc} {}", cert.scope.sets_checked));
    }

    let l = group("lamplighter");
    let counts = growth_counts(&l, 8, budget)?;
    let records = (1..=8)
        .map(|n| folner_record(&l, n, 7, budget))
        .collect::<Result<Vec<_>>>()?;
    let q = quotient_estimate(&l, 8, &records, &counts)?;
    let overclaim =
        matches!(q.certified, Some(Extended::Infinite)) || matches!(q.certified, Some(Extended::Finite(x)) if x > 2.0);
    if overclaim {
        failures.push(format!("lamplighter quotient certifies {:?}", q.certified));
    }
    Ok(summary(
        failures,
        format!(
            "c = 3/4, α = 3 holds on {} sets; lamplighter quotient certifies nothing above 2",
            scopes.join(", ")
        ),
    ))
}

fn reduction_soundness(budget: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x9);
    let mut failures = Vec::new();
    let groups = ["z:1", "z:2", "free:2", "dinf", "heis", "lamplighter"];
    for desc in groups {
        let g = group(desc);
        let table = BallTable::build(&g, 3, budget)?;
        for trial in 0..500 {
            let size = rng.gen_range(1..=10);
            let omega = FiniteSubset::new(&g, table.elements().choose_multiple(&mut rng, size).cloned());
            let ratio_omega = boundary_ratio(&omega)?;
            let c = minimal_ratio_component(&omega)?;
            if boundary_ratio(&c)? > ratio_omega || c.len() > omega.len() {
                failures.push(format!("{desc} trial {trial}: component"));
            }
            let t = table.elements().choose(&mut rng).expect("non-empty");
            let moved = omega.translate(t);
            let moved_boundary: BTreeSet<Element> = omega.boundary_elements().iter().map(|x| g.mul(t, x)).collect();
            if boundary_ratio(&moved)? != ratio_omega || *moved.boundary_elements() != moved_boundary {
                failures.push(format!("{desc} trial {trial}: translation"));
            }
        }
    }
    Ok(summary(
        failures,
        format!("500 component and translation checks on each of {}", groups.join(", ")),
    ))
}

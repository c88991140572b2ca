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

use std::collections::{BTreeMap, BTreeSet};

use cayley_core::ball::{growth_counts, BallTable, DEFAULT_MEMORY_BUDGET};
use cayley_core::constants::{certify_at_scale, check_folner_form, csc_to_folner, folner_to_csc, BoundParams, Scope};
use cayley_core::folner::{connected_subset_enum, folner_exact, folner_family_upper, FolnerValue};
use cayley_core::group::{Element, Group, GroupHandle};
use cayley_core::isoperimetry::FiniteSubset;
use cayley_core::rational::{parse, Rational};
use cayley_core::suite::subset_folner_oracle;
use cayley_core::transport::{build_ledger, check_chain};

const BUDGET: usize = DEFAULT_MEMORY_BUDGET;

fn group(desc: &str) -> GroupHandle {
    desc.parse().unwrap()
}

fn q(text: &str) -> Rational {
    parse(text).unwrap()
}

/// Connectivity by union-find over generator edges, using only `mul`.
fn connected(g: &GroupHandle, set: &[Element]) -> bool {
    let index: BTreeMap<&Element, usize> = set.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut parent: Vec<usize> = (0..set.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (i, x) in set.iter().enumerate() {
        for s in g.generators() {
            if let Some(&j) = index.get(&g.mul(x, s)) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (0..set.len()).all(|i| find(&mut parent, i) == root)
}

/// Counts connected sets through `e` by size, choosing the other members
/// from `B(max_size - 1)` in every possible way.
fn brute_force_counts(g: &GroupHandle, max_size: usize) -> Vec<u64> {
    let table = BallTable::build(g, (max_size - 1) as u32, BUDGET).unwrap();
    let others: Vec<Element> = table.elements()[1..].to_vec();
    let mut counts = vec![0u64; max_size + 1];
    let mut chosen = vec![g.identity()];
    fn walk(g: &GroupHandle, others: &[Element], from: usize, chosen: &mut Vec<Element>, counts: &mut [u64]) {
        if connected(g, chosen) {
            counts[chosen.len()] += 1;
        }
        if chosen.len() + 1 == counts.len() {
            return;
        }
        for i in from..others.len() {
            chosen.push(others[i].clone());
            walk(g, others, i + 1, chosen, counts);
            chosen.pop();
        }
    }
    walk(g, &others, 0, &mut chosen, &mut counts);
    counts
}

#[test]
fn enumeration_is_complete_and_duplicate_free() {
    for (desc, max_size) in [
        ("z:1", 6),
        ("z:2", 4),
        ("free:2", 4),
        ("dinf", 6),
        ("heis", 3),
        ("lamplighter", 3),
    ] {
        let g = group(desc);
        let mut seen = BTreeSet::new();
        let mut counts = vec![0u64; max_size + 1];
        let mut last: Option<(usize, Vec<Vec<u8>>)> = None;
        for set in connected_subset_enum(&g, max_size, BUDGET).unwrap() {
            let members: Vec<Element> = set.iter().cloned().collect();
            assert!(set.contains(&g.identity()), "{desc}");
            assert!(connected(&g, &members), "{desc} {members:?}");
            let order = (set.len(), set.sorted_keys());
            assert!(last.as_ref().is_none_or(|l| *l < order), "{desc} out of order");
            last = Some(order);
            assert!(seen.insert(set.sorted_keys()), "{desc} repeated {members:?}");
            counts[set.len()] += 1;
        }
        assert_eq!(counts, brute_force_counts(&g, max_size), "{desc}");
    }
}

#[test]
fn search_agrees_with_all_subsets_of_a_ball() {
    for desc in ["z:1", "free:1", "dinf"] {
        let g = group(desc);
        for n in 2..=4u64 {
            let searched = folner_exact(&g, n, 9, BUDGET).unwrap().value;
            let oracle = subset_folner_oracle(&g, n, 9, BUDGET).unwrap();
            assert_eq!(searched, FolnerValue::Exact(oracle.unwrap() as u64), "{desc} n={n}");
        }
    }
    // Z² needs 12 elements for n = 2, beyond a 9-element search.
    let g = group("z:2");
    assert_eq!(
        folner_exact(&g, 2, 9, BUDGET).unwrap().value,
        FolnerValue::LowerBoundOnly(10)
    );
    assert_eq!(subset_folner_oracle(&g, 2, 2, BUDGET).unwrap(), None);
}

#[test]
fn folner_values_are_monotone_and_below_the_family() {
    for desc in ["z:1", "z:2", "dinf", "heis"] {
        let g = group(desc);
        let mut previous = 0;
        for n in 1..=4u64 {
            let value = folner_exact(&g, n, 9, BUDGET).unwrap().value;
            let family = folner_family_upper(&g, n).unwrap_or(u64::MAX);
            match value {
                FolnerValue::Exact(v) => {
                    assert!(v >= previous, "{desc} n={n}");
                    assert!(v <= family, "{desc} n={n}: {v} > {family}");
                    previous = v;
                }
                FolnerValue::LowerBoundOnly(lo) => {
                    assert!(lo <= family, "{desc} n={n}");
                    previous = lo;
                }
                FolnerValue::Infinite => panic!("{desc} is amenable"),
            }
        }
    }
}

#[test]
fn witnesses_meet_the_ratio() {
    for desc in ["z:2", "heis", "lamplighter"] {
        let g = group(desc);
        let rec = folner_exact(&g, 2, 8, BUDGET).unwrap();
        if let (FolnerValue::Exact(v), Some(w)) = (rec.value, &rec.witness) {
            assert_eq!(w.len() as u64, v);
            assert!(2 * w.boundary_len() <= w.len(), "{desc}");
            let members: Vec<Element> = w.iter().cloned().collect();
            assert!(connected(&g, &members));
        }
    }
}

#[test]
fn transport_chain_holds_on_small_connected_sets() {
    for (desc, max_size) in [("z:1", 4), ("z:2", 3), ("dinf", 4), ("heis", 2)] {
        let g = group(desc);
        let sets: Vec<FiniteSubset<GroupHandle>> = connected_subset_enum(&g, max_size, BUDGET).unwrap().collect();
        for alpha in ["1/2", "1", "2"].map(q) {
            let v = (Rational::from_integer(1.into()) + &alpha) * Rational::from_integer((max_size as i64).into());
            let counts = growth_counts(&g, 8, BUDGET).unwrap();
            let top = counts.phi(&v).unwrap().finite().unwrap();
            let table = BallTable::build(&g, top, BUDGET).unwrap();
            for omega in &sets {
                let v =
                    (Rational::from_integer(1.into()) + &alpha) * Rational::from_integer((omega.len() as i64).into());
                let r = table.phi(&v).unwrap().finite().unwrap();
                let ledger = build_ledger(omega, &table, r).unwrap();
                for link in check_chain(&ledger, &counts, &alpha).unwrap() {
                    assert!(link.holds, "{desc} {:?} α={alpha} {}", omega.sorted_keys(), link.name);
                }
            }
        }
    }
}

/// `|∂Ω|/|Ω| ≥ c/Φ[(1 + α)|Ω|]` on `Z` converts to a Følner-form bound that
/// the exact values of `Føl(n) = 2n` then satisfy.
#[test]
fn conversion_to_folner_form_holds_on_z() {
    let g = group("z:1");
    let csc = BoundParams::csc(q("3/4"), q("3"), 2).unwrap();
    let cert = certify_at_scale(&g, &csc, Scope::ConnectedUpTo { max_size: 12 }, BUDGET).unwrap();
    assert!(cert.holds);
    let folner = csc_to_folner(&csc, &q("1")).unwrap();
    let records: Vec<_> = (1..=6).map(|n| folner_exact(&g, n, 13, BUDGET).unwrap()).collect();
    for rec in &records {
        let expected = if rec.n == 1 { 1 } else { 2 * rec.n };
        assert_eq!(rec.value, FolnerValue::Exact(expected));
    }
    let counts = growth_counts(&g, 40, BUDGET).unwrap();
    let check = check_folner_form(&folner, &records, &counts).unwrap();
    assert!(check.holds, "{check:?}");
}

/// The reverse direction: `Føl(n) ≥ |B(n - 1)|/2` on `Z`, converted, is a bound
/// every connected set up to size 12 satisfies.
#[test]
fn conversion_to_boundary_form_holds_on_z() {
    let g = group("z:1");
    let folner = BoundParams::folner(q("1"), q("1"), q("1"), 2).unwrap();
    let records: Vec<_> = (1..=6).map(|n| folner_exact(&g, n, 13, BUDGET).unwrap()).collect();
    let counts = growth_counts(&g, 40, BUDGET).unwrap();
    assert!(check_folner_form(&folner, &records, &counts).unwrap().holds);
    let csc = folner_to_csc(&folner).unwrap();
    let cert = certify_at_scale(&g, &csc, Scope::ConnectedUpTo { max_size: 12 }, BUDGET).unwrap();
    assert!(cert.holds, "{cert:?}");
    let cert = certify_at_scale(&g, &csc, Scope::ExhaustiveBallSubsets { radius: 4 }, BUDGET).unwrap();
    assert!(cert.holds, "{cert:?}");
}

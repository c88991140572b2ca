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

use std::collections::BTreeMap;

use cayley_core::ball::{growth_counts, BallTable, DEFAULT_MEMORY_BUDGET};
use cayley_core::group::{Element, Group, GroupHandle};
use cayley_core::suite::word_enumeration_counts;
use proptest::prelude::*;

const GROUPS: [&str; 7] = ["z:1", "z:3", "free:1", "free:3", "dinf", "heis", "lamplighter"];

fn small() -> impl Strategy<Value = i64> {
    -6i64..=6
}

/// Arbitrary canonical elements of every built-in group, tagged with the
/// group that owns them.
fn element() -> impl Strategy<Value = (usize, Element)> {
    prop_oneof![
        small().prop_map(|x| (0, Element::Vector(vec![x]))),
        (small(), small(), small()).prop_map(|(a, b, c)| (1, Element::Vector(vec![a, b, c]))),
        (-5i32..=5).prop_map(|n| (2, Element::Word(vec![n.signum(); n.unsigned_abs() as usize]))),
        prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..8).prop_map(|letters| {
            // Free reduction.
            let mut w: Vec<i32> = Vec::new();
            for l in letters {
                if w.last() == Some(&-l) {
                    w.pop();
                } else {
                    w.push(l);
                }
            }
            (3, Element::Word(w))
        }),
        (small(), any::<bool>()).prop_map(|(shift, flip)| (4, Element::Dihedral { shift, flip })),
        (small(), small(), small()).prop_map(|(a, b, c)| (5, Element::Heisenberg { a, b, c })),
        (small(), prop::collection::btree_set(small(), 0..5))
            .prop_map(|(p, lamps)| (6, Element::lamplighter(p, lamps))),
    ]
}

fn groups() -> Vec<GroupHandle> {
    GROUPS.iter().map(|d| d.parse().unwrap()).collect()
}

/// Three elements of one group.
fn triple() -> impl Strategy<Value = (usize, Element, Element, Element)> {
    (0..GROUPS.len()).prop_flat_map(|i| {
        let pick = move || {
            element()
                .prop_filter("same group", move |(j, _)| *j == i)
                .prop_map(|(_, x)| x)
        };
        (Just(i), pick(), pick(), pick())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn associativity((i, a, b, c) in triple()) {
        let g = &groups()[i];
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
    }

    #[test]
    fn inverse_and_identity((i, a, _b, _c) in triple()) {
        let g = &groups()[i];
        let e = g.identity();
        prop_assert_eq!(g.inv(&g.inv(&a)), a.clone());
        prop_assert_eq!(g.mul(&a, &g.inv(&a)), e.clone());
        prop_assert_eq!(g.mul(&g.inv(&a), &a), e.clone());
        prop_assert_eq!(g.mul(&e, &a), a.clone());
        prop_assert_eq!(g.mul(&a, &e), a.clone());
        prop_assert!(g.check_element(&a).is_ok());
    }

    #[test]
    fn keys_round_trip_and_separate((i, a, b, _c) in triple()) {
        let g = &groups()[i];
        prop_assert_eq!(Element::from_key(&g.key(&a)).unwrap(), a.clone());
        prop_assert_eq!(g.key(&a) == g.key(&b), a == b);
    }

    #[test]
    fn lamp_order_does_not_matter(p in small(), mut lamps in prop::collection::vec(small(), 0..8), seed in any::<u64>()) {
        lamps.sort();
        lamps.dedup();
        let mut shuffled = lamps.clone();
        // A seeded rotation plus reversal covers distinct insertion orders.
        let k = if shuffled.is_empty() { 0 } else { (seed as usize) % shuffled.len() };
        shuffled.rotate_left(k);
        if seed % 2 == 1 {
            shuffled.reverse();
        }
        let g: GroupHandle = "lamplighter".parse().unwrap();
        let a = Element::lamplighter(p, lamps);
        let b = Element::lamplighter(p, shuffled);
        prop_assert_eq!(g.key(&a), g.key(&b));
    }
}

/// Norms from the ball table agree with the shortest word found by brute
/// force over all words of length ≤ 4.
#[test]
fn table_norms_match_word_enumeration() {
    for g in groups() {
        let table = BallTable::build(&g, 4, DEFAULT_MEMORY_BUDGET).unwrap();
        let mut best: BTreeMap<Element, u32> = BTreeMap::new();
        let mut words = vec![(g.identity(), 0u32)];
        while let Some((x, len)) = words.pop() {
            let known = best.get(&x).copied();
            if known.is_some_and(|k| k <= len) {
                continue;
            }
            best.insert(x.clone(), len);
            if len < 4 {
                words.extend(g.generators().iter().map(|s| (g.mul(&x, s), len + 1)));
            }
        }
        assert_eq!(best.len(), table.len(), "{g}");
        for (x, len) in &best {
            assert_eq!(table.norm_of(x), Some(*len), "{g} {x}");
        }
        assert_eq!(word_enumeration_counts(&g, 4), table.counts().b().to_vec(), "{g}");
    }
}

/// `b_{m+n} ≤ b_m · b_n`, since `B(m + n) = B(m)·B(n)`.
#[test]
fn ball_sizes_are_submultiplicative() {
    for g in groups() {
        let radius = if g.to_string() == "lamplighter" { 6 } else { 10 };
        let counts = growth_counts(&g, radius, DEFAULT_MEMORY_BUDGET).unwrap();
        let b = counts.b();
        for m in 0..=radius as usize {
            for n in 0..=radius as usize - m {
                assert!(b[m + n] <= b[m] * b[n], "{g} m={m} n={n}");
            }
        }
    }
}

/// Every generating set is symmetric, free of `e` and of repeats.
#[test]
fn generating_sets_validate() {
    for g in groups() {
        let report = cayley_core::group::validate_generators(&g).unwrap();
        assert_eq!(report.size, g.generators().len());
    }
}

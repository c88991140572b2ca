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

//! The Følner function `Føl_S(n) = min{|Ω| : |∂_S Ω| / |Ω| ≤ 1/n}`.
//!
//! # Why searching connected sets through `e` is exact
//!
//! Two facts reduce the search space without losing a minimizer.
//!
//! * Left translation is a graph automorphism of the Cayley graph (edges are
//!   right multiplications), so `|gΩ| = |Ω|` and `∂(gΩ) = g ∂Ω`.
//! * If `Ω = C_1 ⊔ … ⊔ C_k` splits into Cayley-graph components then
//!   `∂Ω = ∂C_1 ⊔ … ⊔ ∂C_k`: a neighbor `xs` of `x ∈ C_i` lies in `Ω` exactly
//!   when it lies in `C_i`. The ratio of `Ω` is therefore a mediant of the
//!   component ratios, so some component has ratio `≤ ratio(Ω)` and no more
//!   elements.
//!
//! Hence some minimizer is connected, and translating it by the inverse of
//! one of its elements makes it contain `e`. Enumerating connected sets
//! containing `e` by increasing size, the first one with ratio `≤ 1/n` is a
//! minimizer. Both facts are property-tested (see [`minimal_ratio_component`]).

mod enumerate;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::ball::BallTable;
use crate::error::{Error, Result};
use crate::group::{Amenability, Element, Group, GroupHandle, GroupKind};
use crate::isoperimetry::{boundary_ratio, FiniteSubset};

pub use enumerate::{connected_subset_enum, ConnectedSubsets};
pub(crate) use enumerate::{Enumerator, Scratch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FolnerValue {
    Exact(u64),
    /// Only for groups configured as non-amenable.
    Infinite,
    /// No set with at most `value - 1` elements qualifies.
    LowerBoundOnly(u64),
}

impl FolnerValue {
    pub fn kind(&self) -> &'static str {
        match self {
            FolnerValue::Exact(_) => "exact",
            FolnerValue::Infinite => "infinite",
            FolnerValue::LowerBoundOnly(_) => "lower",
        }
    }

    /// The exact value or the lower bound; `None` when infinite.
    pub fn finite_value(&self) -> Option<u64> {
        match self {
            FolnerValue::Exact(v) | FolnerValue::LowerBoundOnly(v) => Some(*v),
            FolnerValue::Infinite => None,
        }
    }
}

impl Serialize for FolnerValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FolnerValue::Exact(v) | FolnerValue::LowerBoundOnly(v) => s.serialize_u64(*v),
            FolnerValue::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FolnerRecord<G: Group> {
    pub n: u64,
    pub value: FolnerValue,
    pub witness: Option<FiniteSubset<G>>,
    pub search_cap: usize,
    pub family_upper: Option<u64>,
}

/// One CSV/JSON row: `n, value_or_bound, kind, witness_size, family_upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolnerRow {
    pub n: u64,
    pub value_or_bound: FolnerValue,
    pub kind: &'static str,
    pub witness_size: Option<usize>,
    pub family_upper: Option<u64>,
}

impl<G: Group> FolnerRecord<G> {
    pub fn row(&self) -> FolnerRow {
        FolnerRow {
            n: self.n,
            value_or_bound: self.value,
            kind: self.value.kind(),
            witness_size: self.witness.as_ref().map(|w| w.len()),
            family_upper: self.family_upper,
        }
    }
}

/// Exact `Føl_S(n)` by search over connected sets containing `e` of size at
/// most `cap`. Returns `LowerBoundOnly(cap + 1)` when nothing qualifies.
pub fn folner_exact<G: Group>(g: &G, n: u64, cap: usize, budget: usize) -> Result<FolnerRecord<G>> {
    if n == 0 || cap == 0 {
        return Err(Error::BadParams("n and cap must be ≥ 1".into()));
    }
    let record = |value, witness| FolnerRecord {
        n,
        value,
        witness,
        search_cap: cap,
        family_upper: None,
    };
    if n == 1 {
        // {e} has ratio 1 and is the first set of the search.
        return Ok(record(
            FolnerValue::Exact(1),
            Some(FiniteSubset::new(g, [g.identity()])),
        ));
    }
    if g.structure().amenability == Amenability::NonAmenable {
        return Ok(record(FolnerValue::Infinite, None));
    }
    let table = BallTable::build(g, (cap - 1) as u32, budget)?;
    for size in 1..=cap {
        if let Some(witness) = best_of_size(&table, size, n)? {
            return Ok(record(FolnerValue::Exact(size as u64), Some(witness)));
        }
    }
    Ok(record(FolnerValue::LowerBoundOnly(cap as u64 + 1), None))
}

/// The canonically smallest connected set of exactly `size` elements through
/// `e` with `n · |∂Ω| ≤ |Ω|`, if any.
fn best_of_size<G: Group>(table: &BallTable<G>, size: usize, n: u64) -> Result<Option<FiniteSubset<G>>> {
    first_connected_matching(table, size, |s, b| n * b as u64 <= s as u64)
}

/// The canonically smallest connected set through `e` with exactly `size`
/// elements whose `(|Ω|, |∂Ω|)` satisfies `accept`.
pub(crate) fn first_connected_matching<G, P>(
    table: &BallTable<G>,
    size: usize,
    accept: P,
) -> Result<Option<FiniteSubset<G>>>
where
    G: Group,
    P: Fn(usize, usize) -> bool + Sync,
{
    let enumerator = Enumerator::new(table, size)?;
    let group = table.group();
    let keyed = |sc: &Scratch| -> (Vec<Vec<u8>>, Vec<u32>) {
        let mut keys: Vec<Vec<u8>> = sc.members().iter().map(|&id| group.key(table.element(id))).collect();
        keys.sort();
        (keys, sc.members().to_vec())
    };
    let best = enumerator.fold(
        || None,
        |best: &mut Option<(Vec<Vec<u8>>, Vec<u32>)>, sc| {
            if sc.members().len() != size || !accept(size, sc.boundary_len(table)) {
                return;
            }
            let candidate = keyed(sc);
            if best.as_ref().is_none_or(|b| candidate.0 < b.0) {
                *best = Some(candidate);
            }
        },
        |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        },
    );
    Ok(best.map(|(_, ids)| FiniteSubset::new(group, ids.iter().map(|&id| table.element(id).clone()))))
}

/// Connected sets through `e` of one `(size, boundary)` class.
#[derive(Debug, Clone)]
pub struct ProfileEntry<G: Group> {
    pub count: u64,
    /// The first set of this class in enumeration order.
    pub example: FiniteSubset<G>,
}

/// Every connected set containing `e` with at most `max_size` elements,
/// grouped by `(|Ω|, |∂Ω|)`. Anything that depends on a set only through
/// these two numbers can be checked once per class.
pub fn boundary_profile<G: Group>(
    g: &G,
    max_size: usize,
    budget: usize,
) -> Result<BTreeMap<(usize, usize), ProfileEntry<G>>> {
    let radius = max_size.saturating_sub(1) as u32;
    let table = BallTable::build(g, radius, budget)?;
    let enumerator = Enumerator::new(&table, max_size)?;
    type Acc = BTreeMap<(usize, usize), (u64, Vec<u32>)>;
    let merged = enumerator.fold(
        Acc::new,
        |acc: &mut Acc, sc| {
            let pair = (sc.members().len(), sc.boundary_len(&table));
            acc.entry(pair).or_insert_with(|| (0, sc.members().to_vec())).0 += 1;
        },
        |mut a, b| {
            for (pair, (count, ids)) in b {
                a.entry(pair).or_insert((0, ids)).0 += count;
            }
            a
        },
    );
    Ok(merged
        .into_iter()
        .map(|(pair, (count, ids))| {
            let example = FiniteSubset::new(g, ids.iter().map(|&id| table.element(id).clone()));
            (pair, ProfileEntry { count, example })
        })
        .collect())
}

/// Largest ball [`ball_subset_profile`] accepts.
pub const MAX_SUBSET_BALL: usize = 24;

/// Every non-empty subset of `B(radius)`, grouped by `(|Ω|, |∂Ω|)`. The
/// example of each class is its canonically smallest member.
pub fn ball_subset_profile<G: Group>(
    g: &G,
    radius: u32,
    budget: usize,
) -> Result<BTreeMap<(usize, usize), ProfileEntry<G>>> {
    let table = BallTable::build(g, radius, budget)?;
    let m = table.counts().ball(radius)? as usize;
    if m > MAX_SUBSET_BALL {
        return Err(Error::BadParams(format!(
            "B({radius}) has {m} elements; exhaustive subsets need at most {MAX_SUBSET_BALL}"
        )));
    }
    let keys: Vec<Vec<u8>> = (0..m as u32).map(|id| g.key(table.element(id))).collect();
    // Neighbors of B(radius) that fall outside the table are outside Ω too.
    let boundary_len = |mask: u32| {
        (0..m)
            .filter(|&x| mask >> x & 1 == 1)
            .filter(|&x| {
                table
                    .neighbors(x as u32)
                    .iter()
                    .any(|&y| y as usize >= m || mask >> y & 1 == 0)
            })
            .count()
    };
    let sorted_keys = |mask: u32| {
        let mut ks: Vec<&[u8]> = (0..m)
            .filter(|&x| mask >> x & 1 == 1)
            .map(|x| keys[x].as_slice())
            .collect();
        ks.sort();
        ks
    };
    let mut classes: BTreeMap<(usize, usize), (u64, u32)> = BTreeMap::new();
    for mask in 1u32..(1u32 << m) {
        let pair = (mask.count_ones() as usize, boundary_len(mask));
        match classes.get_mut(&pair) {
            None => {
                classes.insert(pair, (1, mask));
            }
            Some((count, best)) => {
                *count += 1;
                if sorted_keys(mask) < sorted_keys(*best) {
                    *best = mask;
                }
            }
        }
    }
    Ok(classes
        .into_iter()
        .map(|(pair, (count, mask))| {
            let members = (0..m as u32).filter(|&x| mask >> x & 1 == 1);
            let example = FiniteSubset::new(g, members.map(|id| table.element(id).clone()));
            (pair, ProfileEntry { count, example })
        })
        .collect())
}

/// The component of `Ω` with the smallest boundary ratio; ties go to the
/// smaller component, then to the earlier one.
pub fn minimal_ratio_component<G: Group>(omega: &FiniteSubset<G>) -> Result<FiniteSubset<G>> {
    let mut best: Option<FiniteSubset<G>> = None;
    for c in omega.components() {
        let better = match &best {
            None => true,
            Some(b) => match boundary_ratio(&c)?.cmp(&boundary_ratio(b)?) {
                Ordering::Less => true,
                Ordering::Equal => c.len() < b.len(),
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some(c);
        }
    }
    best.ok_or(Error::EmptySet)
}

/// Side length / segment length / window width of the smallest family member
/// with ratio `≤ 1/n`, together with its cardinality.
fn family_parameter(g: &GroupHandle, n: u64) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::BadParams("n must be ≥ 1".into()));
    }
    let none = || Error::NoFamilyForKind(g.to_string());
    let overflow = || Error::CountOverflow(0);
    match g.kind() {
        // Cubes [0, L)^d: |∂| = L^d - (L-2)^d for L ≥ 2.
        GroupKind::ZPowerD { d } => {
            let d = d as u32;
            let mut side = 1u64;
            loop {
                let volume = side.checked_pow(d).ok_or_else(overflow)?;
                let inner = side.saturating_sub(2).pow(d);
                let boundary = volume - inner;
                if n.checked_mul(boundary).ok_or_else(overflow)? <= volume {
                    return Ok((side, volume));
                }
                side += 1;
            }
        }
        // Path segments: two endpoints in the boundary once the length is ≥ 2.
        GroupKind::FreeGroup { rank: 1 } | GroupKind::DihedralInfinite => {
            let len = if n == 1 { 1 } else { 2 * n };
            Ok((len, len))
        }
        // Positions [0, m) with any lamps in [0, m): only positions 0 and m - 1
        // are in the boundary, so the ratio is 2/m for m ≥ 2.
        GroupKind::LamplighterZ2 => {
            let m = 2 * n;
            let lamps = 1u64.checked_shl(m as u32).filter(|_| m < 64).ok_or_else(overflow)?;
            Ok((m, m.checked_mul(lamps).ok_or_else(overflow)?))
        }
        GroupKind::FreeGroup { .. } | GroupKind::Heisenberg => Err(none()),
    }
}

/// Size of the smallest member of the group's candidate family with boundary
/// ratio `≤ 1/n`; an upper bound on `Føl_S(n)`. For `n = 1` this is the
/// singleton, for every group.
pub fn folner_family_upper(g: &GroupHandle, n: u64) -> Result<u64> {
    if n == 1 {
        return Ok(1);
    }
    Ok(family_parameter(g, n)?.1)
}

/// The family member behind [`folner_family_upper`], built explicitly.
pub fn folner_family_member(g: &GroupHandle, n: u64) -> Result<FiniteSubset<GroupHandle>> {
    if n == 1 {
        return Ok(FiniteSubset::new(g, [g.identity()]));
    }
    let (param, _) = family_parameter(g, n)?;
    let p = param as i64;
    let elements: Vec<Element> = match g.kind() {
        GroupKind::ZPowerD { d } => {
            let mut out = vec![vec![]];
            for _ in 0..d {
                out = out
                    .into_iter()
                    .flat_map(|v: Vec<i64>| {
                        (0..p).map(move |x| {
                            let mut w = v.clone();
                            w.push(x);
                            w
                        })
                    })
                    .collect();
            }
            out.into_iter().map(Element::Vector).collect()
        }
        GroupKind::FreeGroup { rank: 1 } => (0..p).map(|k| Element::Word(vec![1; k as usize])).collect(),
        GroupKind::DihedralInfinite => {
            let mut cur = g.identity();
            let mut out = vec![cur.clone()];
            for k in 1..p {
                cur = g.mul(&cur, &g.generators()[(k as usize - 1) % 2]);
                out.push(cur.clone());
            }
            out
        }
        GroupKind::LamplighterZ2 => (0..p)
            .flat_map(|pos| {
                (0u64..1 << p).map(move |mask| Element::lamplighter(pos, (0..p).filter(|i| mask >> i & 1 == 1)))
            })
            .collect(),
        GroupKind::FreeGroup { .. } | GroupKind::Heisenberg => unreachable!("family_parameter rejects these"),
    };
    Ok(FiniteSubset::new(g, elements))
}

/// [`folner_exact`] with the family upper bound filled in when one exists.
pub fn folner_record(g: &GroupHandle, n: u64, cap: usize, budget: usize) -> Result<FolnerRecord<GroupHandle>> {
    let mut record = folner_exact(g, n, cap, budget)?;
    record.family_upper = match folner_family_upper(g, n) {
        Ok(v) => Some(v),
        Err(Error::NoFamilyForKind(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(record)
}

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

//! Mass transport along geodesics.
//!
//! For a finite `Ω` and `g ∈ B(r)`, `Ω_g = {x ∈ Ω : xg ∉ Ω}`. Writing
//! `g = s_1⋯s_n` geodesically with prefixes `g_k`, every `x ∈ Ω_g` has a
//! first index `k` with `x·g_k ∈ ∂Ω`; that point is the exit `E_g(x)`. Since
//! `x = E_g(x)·g_k⁻¹`, a fiber `E_g⁻¹(b)` has at most `n = |g|` points, which
//! gives `|Ω_g| ≤ |g|·|∂Ω|`. Counting the pairs `(x, g)` with `xg ∉ Ω` by `x`
//! (rays) or by `g` gives the same total.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{BallTable, GrowthCounts, PhiValue};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::isoperimetry::FiniteSubset;
use crate::rational::{self, uint, Rational};

/// Default cap on `|Ω|` for ledgers.
pub const DEFAULT_MAX_OMEGA: usize = 64;
/// Default cap on the ledger radius.
pub const DEFAULT_MAX_RADIUS: u32 = 6;

/// A minimal-length expression `g = s_1⋯s_n` as generator indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicWord<E> {
    pub target: E,
    pub letters: Vec<usize>,
}

impl<E: Clone> GeodesicWord<E> {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `g_0 = e, g_1 = s_1, …, g_n = g`.
    pub fn prefixes<G: Group<Element = E>>(&self, group: &G) -> Vec<E> {
        let mut cur = group.identity();
        let mut out = Vec::with_capacity(self.letters.len() + 1);
        out.push(cur.clone());
        for &i in &self.letters {
            cur = group.mul(&cur, &group.generators()[i]);
            out.push(cur.clone());
        }
        out
    }
}

/// The lexicographically smallest geodesic for `g`: peel off the first
/// letter `s` with `|s⁻¹g| = |g| - 1`, trying generators in order.
pub fn geodesic_word<G: Group>(t: &BallTable<G>, g: &G::Element) -> Result<GeodesicWord<G::Element>> {
    let group = t.group();
    let horizon = || Error::HorizonExceeded {
        horizon: t.max_radius(),
        ball: t.len() as u64,
    };
    let mut norm = t.norm_of(g).ok_or_else(horizon)?;
    let inverses: Vec<G::Element> = group.generators().iter().map(|s| group.inv(s)).collect();
    let mut cur = g.clone();
    let mut letters = Vec::with_capacity(norm as usize);
    while norm > 0 {
        let (i, next) = inverses
            .iter()
            .enumerate()
            .map(|(i, s_inv)| (i, group.mul(s_inv, &cur)))
            .find(|(_, next)| t.norm_of(next) == Some(norm - 1))
            .expect("an element of positive norm has a geodesic predecessor");
        letters.push(i);
        cur = next;
        norm -= 1;
    }
    Ok(GeodesicWord {
        target: g.clone(),
        letters,
    })
}

/// Size limits for [`build_ledger_with_caps`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerCaps {
    pub max_omega: usize,
    pub max_radius: u32,
}

impl Default for LedgerCaps {
    fn default() -> Self {
        LedgerCaps {
            max_omega: DEFAULT_MAX_OMEGA,
            max_radius: DEFAULT_MAX_RADIUS,
        }
    }
}

/// Everything about `Ω × B(r)` that the transport argument uses. The
/// elements `g ∈ B(r)` are referred to by their ball-table id.
#[derive(Debug, Clone)]
pub struct TransportLedger<G: Group> {
    pub omega: FiniteSubset<G>,
    pub r: u32,
    /// `g ↦ Ω_g`, for every `g ∈ B(r)` (empty sets included).
    pub omega_g: BTreeMap<u32, Vec<G::Element>>,
    /// `x ↦ {g : xg ∉ Ω, |g| ≤ r}`.
    pub rays: BTreeMap<G::Element, Vec<u32>>,
    /// `(g, b) ↦ |E_g⁻¹(b)|`.
    pub exit_fibers: BTreeMap<(u32, G::Element), u64>,
    /// `|g|` for each `g` key of `omega_g`.
    pub norms: BTreeMap<u32, u32>,
    /// Display form of each `g`.
    pub labels: BTreeMap<u32, String>,
}

pub fn build_ledger<G: Group>(omega: &FiniteSubset<G>, t: &BallTable<G>, r: u32) -> Result<TransportLedger<G>> {
    build_ledger_with_caps(omega, t, r, LedgerCaps::default())
}

pub fn build_ledger_with_caps<G: Group>(
    omega: &FiniteSubset<G>,
    t: &BallTable<G>,
    r: u32,
    caps: LedgerCaps,
) -> Result<TransportLedger<G>> {
    if omega.is_empty() {
        return Err(Error::EmptySet);
    }
    if omega.len() > caps.max_omega || r > caps.max_radius {
        return Err(Error::BadParams(format!(
            "ledger limited to |Ω| ≤ {} and r ≤ {}",
            caps.max_omega, caps.max_radius
        )));
    }
    if r > t.max_radius() {
        return Err(Error::HorizonExceeded {
            horizon: t.max_radius(),
            ball: t.len() as u64,
        });
    }
    let group = t.group();
    let boundary = omega.boundary_elements();
    let ids: Vec<u32> = t.ids_within(r)?.collect();

    // Grouped by g: Ω_g and the exit point of each of its members.
    type PerG<E> = (u32, Vec<E>, Vec<E>);
    let per_g: Vec<PerG<G::Element>> = ids
        .par_iter()
        .map(|&id| -> Result<PerG<G::Element>> {
            let g = t.element(id);
            let word = geodesic_word(t, g)?;
            let prefixes = word.prefixes(group);
            let mut members = Vec::new();
            let mut exits = Vec::new();
            for x in omega.iter() {
                if omega.contains(&group.mul(x, g)) {
                    continue;
                }
                let exit = prefixes
                    .iter()
                    .map(|p| group.mul(x, p))
                    .find(|y| boundary.contains(y))
                    .ok_or_else(|| Error::ExitNotFound {
                        x: x.to_string(),
                        g: g.to_string(),
                    })?;
                members.push(x.clone());
                exits.push(exit);
            }
            Ok((id, members, exits))
        })
        .collect::<Result<_>>()?;

    // Grouped by x, computed separately so that the two totals are
    // independent counts.
    let mut rays = BTreeMap::new();
    for x in omega.iter() {
        let out: Vec<u32> = ids
            .iter()
            .copied()
            .filter(|&id| !omega.contains(&group.mul(x, t.element(id))))
            .collect();
        rays.insert(x.clone(), out);
    }

    let mut omega_g = BTreeMap::new();
    let mut exit_fibers = BTreeMap::new();
    for (id, members, exits) in per_g {
        for b in exits {
            *exit_fibers.entry((id, b)).or_insert(0) += 1;
        }
        omega_g.insert(id, members);
    }
    let norms = ids.iter().map(|&id| (id, t.norm(id))).collect();
    let labels = ids.iter().map(|&id| (id, t.element(id).to_string())).collect();
    let ledger = TransportLedger {
        omega: omega.clone(),
        r,
        omega_g,
        rays,
        exit_fibers,
        norms,
        labels,
    };
    debug_assert_eq!(ledger.sum_rays(), ledger.sum_omega_g());
    Ok(ledger)
}

impl<G: Group> TransportLedger<G> {
    pub fn sum_rays(&self) -> u64 {
        self.rays.values().map(|v| v.len() as u64).sum()
    }

    pub fn sum_omega_g(&self) -> u64 {
        self.omega_g.values().map(|v| v.len() as u64).sum()
    }

    pub fn max_fiber(&self) -> u64 {
        self.exit_fibers.values().copied().max().unwrap_or(0)
    }

    /// `Ω_g` for a group element, if `g ∈ B(r)`.
    pub fn omega_of(&self, t: &BallTable<G>, g: &G::Element) -> Option<&[G::Element]> {
        t.id_of(g).and_then(|id| self.omega_g.get(&id)).map(|v| v.as_slice())
    }

    pub fn summary(&self, lemma_results: Vec<LemmaReport>) -> LedgerSummary {
        LedgerSummary {
            omega_size: self.omega.len(),
            r: self.r,
            sum_rays: self.sum_rays(),
            sum_omega_g: self.sum_omega_g(),
            max_fiber: self.max_fiber(),
            lemma_results,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerSummary {
    pub omega_size: usize,
    pub r: u32,
    pub sum_rays: u64,
    pub sum_omega_g: u64,
    pub max_fiber: u64,
    pub lemma_results: Vec<LemmaReport>,
}

/// The facts that can be checked on growth counts or on a ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lemma {
    /// `s_r ≤ (|S| - 1)·s_{r-1}` for `r ≥ 2`.
    Spheres,
    /// `b_r ≤ |S|·b_{r-1}` for `r ≥ 2` (at `r = 1`, `b_1 = |S| + 1`).
    Balls,
    /// `|Ω_g| ≤ |g|·|∂Ω|`.
    Transport,
    /// `Σ_x |R_x| = Σ_g |Ω_g|`.
    Counting,
    /// `α|Ω| ≤ |R_x|` for every `x`, given `|B(r)| ≥ (1 + α)|Ω|`.
    RayLower { alpha: Rational },
    /// `|R_x| ≥ α/(1 + α)·|B(r - 1)|` for every `x`, given `r = Φ[(1 + α)|Ω|]`.
    Conclude { alpha: Rational },
    /// `|E_g⁻¹(b)| ≤ |g|`.
    Fiber,
}

impl Lemma {
    pub fn name(&self) -> &'static str {
        match self {
            Lemma::Spheres => "spheres",
            Lemma::Balls => "balls",
            Lemma::Transport => "transport",
            Lemma::Counting => "counting",
            Lemma::RayLower { .. } => "ray-lower",
            Lemma::Conclude { .. } => "conclude",
            Lemma::Fiber => "fiber",
        }
    }

    /// Parses a name, with `alpha` for the two lemmas that take it.
    pub fn from_name(name: &str, alpha: Option<Rational>) -> Result<Lemma> {
        let need_alpha = || {
            alpha
                .clone()
                .filter(|a| *a > Rational::zero())
                .ok_or_else(|| Error::BadParams(format!("`{name}` needs a positive alpha")))
        };
        Ok(match name {
            "spheres" => Lemma::Spheres,
            "balls" => Lemma::Balls,
            "transport" => Lemma::Transport,
            "counting" => Lemma::Counting,
            "ray-lower" => Lemma::RayLower { alpha: need_alpha()? },
            "conclude" => Lemma::Conclude { alpha: need_alpha()? },
            "fiber" => Lemma::Fiber,
            _ => return Err(Error::BadParams(format!("unknown lemma `{name}`"))),
        })
    }

    /// All lemmas that need only growth counts.
    pub fn is_growth_only(&self) -> bool {
        matches!(self, Lemma::Spheres | Lemma::Balls)
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub which: String,
    pub holds: bool,
    /// On failure, the first violating `r`, `g`, `x` or `(g, b)`.
    pub witness: Option<String>,
}

fn report(which: &Lemma, witness: Option<String>) -> LemmaReport {
    LemmaReport {
        which: which.name().to_string(),
        holds: witness.is_none(),
        witness,
    }
}

/// Checks [`Lemma::Spheres`] or [`Lemma::Balls`] for every radius the counts
/// cover.
pub fn verify_growth_lemma(counts: &GrowthCounts, which: &Lemma) -> Result<LemmaReport> {
    let k = counts.generator_count() as u64;
    let (b, s) = (counts.b(), counts.s());
    let witness = match which {
        Lemma::Spheres => (2..s.len()).find(|&r| s[r] > (k.saturating_sub(1)) * s[r - 1]),
        Lemma::Balls => (2..b.len()).find(|&r| b[r] > k * b[r - 1]),
        _ => return Err(Error::PreconditionUnmet(format!("`{which}` needs a transport ledger"))),
    };
    Ok(report(which, witness.map(|r| format!("r={r}"))))
}

/// Checks a lemma on a ledger. `counts` must cover radius `ledger.r` and, for
/// [`Lemma::Conclude`], the radius `Φ[(1 + α)|Ω|]`.
pub fn verify_lemma<G: Group>(
    ledger: &TransportLedger<G>,
    counts: &GrowthCounts,
    which: &Lemma,
) -> Result<LemmaReport> {
    let size = ledger.omega.len() as u64;
    let label = |id: &u32| ledger.labels[id].clone();
    let witness = match which {
        Lemma::Spheres | Lemma::Balls => return verify_growth_lemma(counts, which),
        Lemma::Transport => {
            let boundary = ledger.omega.boundary_len() as u64;
            ledger
                .omega_g
                .iter()
                .find(|(id, xs)| xs.len() as u64 > ledger.norms[id] as u64 * boundary)
                .map(|(id, _)| format!("g={}", label(id)))
        }
        Lemma::Counting => {
            let (rays, by_g) = (ledger.sum_rays(), ledger.sum_omega_g());
            (rays != by_g).then(|| format!("sum_rays={rays} sum_omega_g={by_g}"))
        }
        Lemma::RayLower { alpha } => {
            let ball = uint(counts.ball(ledger.r)?);
            let need = (alpha + Rational::from_integer(1.into())) * uint(size);
            if ball < need {
                return Err(Error::PreconditionUnmet(format!(
                    "|B({})| = {ball} < (1 + α)|Ω| = {}",
                    ledger.r,
                    rational::format(&need)
                )));
            }
            let lower = alpha * uint(size);
            ledger
                .rays
                .iter()
                .find(|(_, gs)| uint(gs.len() as u64) < lower)
                .map(|(x, _)| format!("x={x}"))
        }
        Lemma::Conclude { alpha } => {
            let one = Rational::from_integer(1.into());
            let volume = (alpha + &one) * uint(size);
            match counts.phi(&volume)? {
                PhiValue::Finite(r) if r == ledger.r => {}
                phi => {
                    return Err(Error::PreconditionUnmet(format!(
                        "ledger radius {} is not Φ[(1 + α)|Ω|] = {phi:?}",
                        ledger.r
                    )))
                }
            }
            let ball = if ledger.r == 0 { 0 } else { counts.ball(ledger.r - 1)? };
            let lower = alpha / (alpha + &one) * uint(ball);
            ledger
                .rays
                .iter()
                .find(|(_, gs)| uint(gs.len() as u64) < lower)
                .map(|(x, _)| format!("x={x}"))
        }
        Lemma::Fiber => ledger
            .exit_fibers
            .iter()
            .find(|((id, _), &count)| count > ledger.norms[id] as u64)
            .map(|((id, b), _)| format!("g={} b={b}", label(id))),
    };
    Ok(report(which, witness))
}

/// One inequality of the averaged-transport chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub name: &'static str,
    #[serde(serialize_with = "rational::serialize_text")]
    pub lhs: Rational,
    #[serde(serialize_with = "rational::serialize_text")]
    pub rhs: Rational,
    pub holds: bool,
}

/// The chain
/// `Σ_{g∈B(r)} |g|·|∂Ω| ≥ Σ_g |Ω_g| = Σ_x |R_x| ≥ α/(1 + α)·|Ω|·|B(r - 1)|`
/// at `r = Φ[(1 + α)|Ω|]`, each link checked separately. The left end equals
/// `|B(r)|·E|X_r|·|∂Ω|` with `X_r` uniform on `B(r)`.
pub fn check_chain<G: Group>(
    ledger: &TransportLedger<G>,
    counts: &GrowthCounts,
    alpha: &Rational,
) -> Result<Vec<ChainLink>> {
    let conclude = Lemma::Conclude { alpha: alpha.clone() };
    // Validates that the ledger sits at the right radius.
    verify_lemma(ledger, counts, &conclude)?;
    let r = ledger.r;
    let size = uint(ledger.omega.len() as u64);
    let boundary = uint(ledger.omega.boundary_len() as u64);
    let length_sum = uint(counts.length_sum()[r as usize]);
    let by_g = uint(ledger.sum_omega_g());
    let rays = uint(ledger.sum_rays());
    let one = Rational::from_integer(1.into());
    let inner = if r == 0 { 0 } else { counts.ball(r - 1)? };
    let tail = alpha / (alpha + &one) * size * uint(inner);
    let at_least = |name, lhs: Rational, rhs: Rational| ChainLink {
        name,
        holds: lhs >= rhs,
        lhs,
        rhs,
    };
    let counting = ChainLink {
        name: "counting",
        holds: by_g == rays,
        lhs: by_g.clone(),
        rhs: rays.clone(),
    };
    Ok(vec![
        at_least("transport-sum", length_sum * &boundary, by_g),
        counting,
        at_least("ray-sum", rays, tail),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::DEFAULT_MEMORY_BUDGET;
    use crate::group::{make_group, Element};
    use crate::rational::{int, ratio};

    fn z_set(
        xs: impl IntoIterator<Item = i64>,
    ) -> (crate::group::GroupHandle, FiniteSubset<crate::group::GroupHandle>) {
        let z = make_group("z", &[1]).unwrap();
        let s = FiniteSubset::new(&z, xs.into_iter().map(|x| Element::Vector(vec![x])));
        (z, s)
    }

    #[test]
    fn geodesics() {
        let z = make_group("z", &[1]).unwrap();
        let t = BallTable::build(&z, 5, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(
            geodesic_word(&t, &Element::Vector(vec![3])).unwrap().letters,
            vec![0, 0, 0]
        );
        assert!(geodesic_word(&t, &Element::Vector(vec![0])).unwrap().is_empty());
        assert!(matches!(
            geodesic_word(&t, &Element::Vector(vec![6])),
            Err(Error::HorizonExceeded { .. })
        ));

        let d = make_group("dinf", &[]).unwrap();
        let t = BallTable::build(&d, 4, DEFAULT_MEMORY_BUDGET).unwrap();
        let a = Element::Dihedral { shift: 1, flip: false };
        let w = geodesic_word(&t, &a).unwrap();
        assert_eq!(w.letters, vec![0, 1]);
        assert_eq!(w.prefixes(&d).last(), Some(&a));
    }

    /// Lexicographic order among all geodesics, by brute force over words.
    #[test]
    fn geodesic_is_lex_smallest() {
        for desc in ["z:2", "heis", "lamplighter", "free:2"] {
            let g: crate::group::GroupHandle = desc.parse().unwrap();
            let t = BallTable::build(&g, 3, DEFAULT_MEMORY_BUDGET).unwrap();
            let k = g.generators().len();
            let mut first: BTreeMap<Element, Vec<usize>> = BTreeMap::new();
            let mut words: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..=3 {
                // Words are generated in lexicographic order per length.
                let mut next = Vec::new();
                for w in &words {
                    let value = w.iter().fold(g.identity(), |acc, &i| g.mul(&acc, &g.generators()[i]));
                    first.entry(value).or_insert_with(|| w.clone());
                    next.extend((0..k).map(|i| {
                        let mut v = w.clone();
                        v.push(i);
                        v
                    }));
                }
                words = next;
            }
            for (x, w) in first {
                assert_eq!(geodesic_word(&t, &x).unwrap().letters, w, "{desc} {x}");
            }
        }
    }

    #[test]
    fn z_pair_ledger() {
        let (z, omega) = z_set([0, 1]);
        let t = BallTable::build(&z, 3, DEFAULT_MEMORY_BUDGET).unwrap();
        let l = build_ledger(&omega, &t, 1).unwrap();
        assert_eq!(l.sum_rays(), 2);
        assert_eq!(l.sum_omega_g(), 2);
        let v = |x| Element::Vector(vec![x]);
        assert_eq!(l.omega_of(&t, &v(1)).unwrap(), &[v(1)]);
        assert_eq!(l.omega_of(&t, &v(-1)).unwrap(), &[v(0)]);
        assert!(l.omega_of(&t, &v(0)).unwrap().is_empty());
        let minus_one = t.id_of(&v(-1)).unwrap();
        assert_eq!(l.rays[&v(0)], vec![minus_one]);
        let r = verify_lemma(&l, t.counts(), &Lemma::Counting).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn z_interval_transport() {
        let (z, omega) = z_set(0..5);
        let t = BallTable::build(&z, 3, DEFAULT_MEMORY_BUDGET).unwrap();
        let l = build_ledger(&omega, &t, 2).unwrap();
        let v = |x| Element::Vector(vec![x]);
        assert_eq!(l.omega_of(&t, &v(2)).unwrap(), &[v(3), v(4)]);
        for lemma in [Lemma::Transport, Lemma::Fiber, Lemma::Counting] {
            assert!(verify_lemma(&l, t.counts(), &lemma).unwrap().holds);
        }
        // x = 3, g = +2: the path 3 → 4 first meets ∂Ω at 4.
        let g2 = t.id_of(&v(2)).unwrap();
        assert_eq!(l.exit_fibers[&(g2, v(4))], 2);
    }

    #[test]
    fn growth_lemmas_on_z() {
        let z = make_group("z", &[1]).unwrap();
        let t = BallTable::build(&z, 10, DEFAULT_MEMORY_BUDGET).unwrap();
        assert!(verify_growth_lemma(t.counts(), &Lemma::Spheres).unwrap().holds);
        assert!(verify_growth_lemma(t.counts(), &Lemma::Balls).unwrap().holds);
        assert!(t.counts().s()[2..].iter().all(|&s| s == 2));
        assert!(matches!(
            verify_growth_lemma(t.counts(), &Lemma::Fiber),
            Err(Error::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn ray_lower_and_conclude() {
        let (z, omega) = z_set(0..3);
        let t = BallTable::build(&z, 6, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(t.phi(&int(6)).unwrap(), PhiValue::Finite(3));
        let l = build_ledger(&omega, &t, 3).unwrap();
        assert!(l.rays.values().all(|gs| gs.len() >= 3));
        let alpha = int(1);
        assert!(
            verify_lemma(&l, t.counts(), &Lemma::RayLower { alpha: alpha.clone() })
                .unwrap()
                .holds
        );
        assert!(
            verify_lemma(&l, t.counts(), &Lemma::Conclude { alpha: alpha.clone() })
                .unwrap()
                .holds
        );
        let chain = check_chain(&l, t.counts(), &alpha).unwrap();
        assert!(chain.iter().all(|c| c.holds));

        // Radius 1 is too small for α = 1 with |Ω| = 3.
        let small = build_ledger(&omega, &t, 1).unwrap();
        assert!(matches!(
            verify_lemma(&small, t.counts(), &Lemma::RayLower { alpha: alpha.clone() }),
            Err(Error::PreconditionUnmet(_))
        ));
        assert!(matches!(
            verify_lemma(&small, t.counts(), &Lemma::Conclude { alpha: ratio(1, 2) }),
            Err(Error::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn caps_and_errors() {
        let (z, omega) = z_set(0..3);
        let t = BallTable::build(&z, 8, DEFAULT_MEMORY_BUDGET).unwrap();
        assert!(matches!(build_ledger(&omega, &t, 7), Err(Error::BadParams(_))));
        let caps = LedgerCaps {
            max_omega: 64,
            max_radius: 8,
        };
        assert!(build_ledger_with_caps(&omega, &t, 7, caps).is_ok());
        let empty = FiniteSubset::new(&z, []);
        assert!(matches!(build_ledger(&empty, &t, 1), Err(Error::EmptySet)));
        let short = BallTable::build(&z, 1, DEFAULT_MEMORY_BUDGET).unwrap();
        assert!(matches!(
            build_ledger(&omega, &short, 2),
            Err(Error::HorizonExceeded { .. })
        ));
        assert!(Lemma::from_name("ray-lower", None).is_err());
        assert_eq!(
            Lemma::from_name("conclude", Some(int(2))).unwrap(),
            Lemma::Conclude { alpha: int(2) }
        );
    }

    #[test]
    fn ledger_on_every_group() {
        for desc in ["z:2", "free:2", "dinf", "heis", "lamplighter"] {
            let g: crate::group::GroupHandle = desc.parse().unwrap();
            let t = BallTable::build(&g, 3, DEFAULT_MEMORY_BUDGET).unwrap();
            let omega = FiniteSubset::new(&g, t.elements()[..t.counts().ball(1).unwrap() as usize].iter().cloned());
            let l = build_ledger(&omega, &t, 2).unwrap();
            for lemma in [Lemma::Transport, Lemma::Fiber, Lemma::Counting] {
                assert!(verify_lemma(&l, t.counts(), &lemma).unwrap().holds, "{desc} {lemma}");
            }
            let again = build_ledger(&omega, &t, 2).unwrap();
            assert_eq!(
                serde_json::to_string(&l.summary(vec![])).unwrap(),
                serde_json::to_string(&again.summary(vec![])).unwrap()
            );
            assert_eq!(l.omega_g, again.omega_g);
            assert_eq!(l.exit_fibers, again.exit_fibers);
        }
    }
}

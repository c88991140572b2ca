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

//! Breadth-first enumeration of balls `B_S(r)`, exact growth counts, the
//! generalized inverse `Φ_S`, average lengths and Fekete growth estimates.

use std::collections::HashMap;
use std::ops::Range;

use num::{BigInt, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Group, WordAutomaton};
use crate::rational::{self, Rational};

/// Default cap on the number of stored elements of a ball table.
pub const DEFAULT_MEMORY_BUDGET: usize = 20_000_000;

/// Neighbor slot value for a neighbor outside the table.
pub const OUTSIDE: u32 = u32::MAX;

/// Value of `Φ_S[v]`.
///
/// `Infinite` is only produced when the ball provably stopped growing, i.e.
/// the group is finite and `v ≥ |G|`. A horizon that is merely too small is an
/// error ([`Error::HorizonExceeded`]), never `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhiValue {
    Finite(u32),
    Infinite,
}

impl PhiValue {
    pub fn finite(self) -> Option<u32> {
        match self {
            PhiValue::Finite(r) => Some(r),
            PhiValue::Infinite => None,
        }
    }
}

impl Serialize for PhiValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PhiValue::Finite(r) => s.serialize_u32(*r),
            PhiValue::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl std::fmt::Display for PhiValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiValue::Finite(r) => write!(f, "{r}"),
            PhiValue::Infinite => write!(f, "infinite"),
        }
    }
}

/// Per-radius counts `b_r`, `s_r` and `Σ_{g ∈ B(r)} |g|_S` for `0 ≤ r ≤ R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthCounts {
    generator_count: usize,
    b: Vec<u64>,
    s: Vec<u64>,
    length_sum: Vec<u64>,
    /// Some sphere was empty: the ball is the whole (finite) group.
    exhausted: bool,
}

/// Fekete-style estimate of `lim ln(b_n)/n = inf_n ln(b_n)/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub horizon: u32,
    /// `ln(b_n)/n` for `n = 1..=horizon`.
    pub per_n: Vec<f64>,
    /// `min_{1 ≤ n ≤ N} ln(b_n)/n`: an upper bound for the limit.
    pub fekete_inf: f64,
    pub fekete_argmin: u32,
    /// `ln(b_N / b_m) / (N - m)` with `m = ⌈N/2⌉`; heuristic lower-side evidence.
    pub tail_slope: f64,
    /// Implied polynomial degree `ln(b_n/b_{n-1}) / ln(n/(n-1))` at `n = N` and `n = ⌈N/2⌉`.
    pub implied_degree: (f64, f64),
    /// Evidence only, never a proof. See [`GrowthCounts::growth_rate_upper`].
    pub is_exponential_evidence: bool,
}

impl GrowthCounts {
    fn empty(generator_count: usize) -> GrowthCounts {
        GrowthCounts {
            generator_count,
            b: Vec::new(),
            s: Vec::new(),
            length_sum: Vec::new(),
            exhausted: false,
        }
    }

    fn push_sphere(&mut self, size: u64) -> Result<()> {
        let r = self.s.len() as u32;
        let prev_b = self.b.last().copied().unwrap_or(0);
        let prev_len = self.length_sum.last().copied().unwrap_or(0);
        let b = prev_b.checked_add(size).ok_or(Error::CountOverflow(r))?;
        let len = size
            .checked_mul(u64::from(r))
            .and_then(|x| x.checked_add(prev_len))
            .ok_or(Error::CountOverflow(r))?;
        if size == 0 {
            self.exhausted = true;
        }
        self.s.push(size);
        self.b.push(b);
        self.length_sum.push(len);
        Ok(())
    }

    /// Counts for the words accepted by `automaton`, one sphere per length.
    pub fn from_automaton(generator_count: usize, automaton: &WordAutomaton, radius: u32) -> Result<GrowthCounts> {
        let states = automaton.transitions.len();
        let mut counts = GrowthCounts::empty(generator_count);
        let mut paths = vec![0u64; states];
        paths[automaton.start] = 1;
        for r in 0..=radius {
            let total = paths
                .iter()
                .try_fold(0u64, |acc, &p| acc.checked_add(p))
                .ok_or(Error::CountOverflow(r))?;
            counts.push_sphere(total)?;
            if r == radius {
                break;
            }
            let mut next = vec![0u64; states];
            for (q, &p) in paths.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                for &target in &automaton.transitions[q] {
                    next[target] = next[target].checked_add(p).ok_or(Error::CountOverflow(r + 1))?;
                }
            }
            paths = next;
        }
        Ok(counts)
    }

    pub fn max_radius(&self) -> u32 {
        (self.b.len() - 1) as u32
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn s(&self) -> &[u64] {
        &self.s
    }

    pub fn length_sum(&self) -> &[u64] {
        &self.length_sum
    }

    fn check_radius(&self, r: u32) -> Result<usize> {
        if r > self.max_radius() {
            Err(Error::RadiusOutOfRange {
                radius: r,
                horizon: self.max_radius(),
            })
        } else {
            Ok(r as usize)
        }
    }

    pub fn ball(&self, r: u32) -> Result<u64> {
        Ok(self.b[self.check_radius(r)?])
    }

    /// `|B(x)|` at a rational radius: `0` for `x < 0` (empty ball), else `b_⌊x⌋`.
    pub fn ball_at(&self, x: &Rational) -> Result<u64> {
        let floor = rational::floor(x);
        if floor < BigInt::from(0) {
            return Ok(0);
        }
        match floor.to_u32() {
            Some(r) if r <= self.max_radius() => Ok(self.b[r as usize]),
            _ if self.exhausted => Ok(*self.b.last().expect("non-empty")),
            _ => Err(Error::RadiusOutOfRange {
                radius: floor.to_u32().unwrap_or(u32::MAX),
                horizon: self.max_radius(),
            }),
        }
    }

    /// `Φ_S[v] = min{r : b_r > v}`.
    pub fn phi(&self, v: &Rational) -> Result<PhiValue> {
        if let Some(r) = self.b.iter().position(|&b| rational::uint(b) > *v) {
            return Ok(PhiValue::Finite(r as u32));
        }
        if self.exhausted {
            Ok(PhiValue::Infinite)
        } else {
            Err(Error::HorizonExceeded {
                horizon: self.max_radius(),
                ball: *self.b.last().expect("non-empty"),
            })
        }
    }

    /// `E[|X_r|_S] = (Σ_{g ∈ B(r)} |g|_S) / b_r`.
    pub fn average_length(&self, r: u32) -> Result<Rational> {
        let r = self.check_radius(r)?;
        Ok(Rational::new(self.length_sum[r].into(), self.b[r].into()))
    }

    /// Fekete estimate over `1 ≤ n ≤ horizon`.
    ///
    /// `ln(b_n)` is subadditive, so `inf_n ln(b_n)/n` is the growth rate and
    /// every finite-horizon minimum bounds it from above. The exponential
    /// evidence flag compares the implied polynomial degree at `N` and at
    /// `⌈N/2⌉`: it roughly doubles under exponential growth and stays flat
    /// under polynomial growth. It needs `N ≥ 6`; shorter horizons
    /// never raise the flag.
    pub fn growth_rate_upper(&self, horizon: u32) -> Result<GrowthEstimate> {
        if horizon == 0 {
            return Err(Error::RadiusOutOfRange {
                radius: 0,
                horizon: self.max_radius(),
            });
        }
        self.check_radius(horizon)?;
        let ln_b = |n: u32| (self.b[n as usize] as f64).ln();
        let per_n: Vec<f64> = (1..=horizon).map(|n| ln_b(n) / f64::from(n)).collect();
        let (argmin, fekete_inf) =
            per_n.iter().enumerate().fold(
                (0, f64::INFINITY),
                |best, (i, &v)| if v < best.1 { (i, v) } else { best },
            );
        let half = horizon.div_ceil(2);
        let tail_slope = if horizon > half {
            (ln_b(horizon) - ln_b(half)) / f64::from(horizon - half)
        } else {
            0.0
        };
        let implied = |n: u32| {
            if n < 2 {
                return 0.0;
            }
            let n_f = f64::from(n);
            (ln_b(n) - ln_b(n - 1)) / (n_f / (n_f - 1.0)).ln()
        };
        let implied_degree = (implied(horizon), implied(half));
        let is_exponential_evidence =
            !self.exhausted && horizon >= 6 && implied_degree.0 > EXPONENTIAL_DEGREE_RATIO * implied_degree.1;
        Ok(GrowthEstimate {
            horizon,
            per_n,
            fekete_inf,
            fekete_argmin: argmin as u32 + 1,
            tail_slope,
            implied_degree,
            is_exponential_evidence,
        })
    }
}

/// Threshold on `degree(N) / degree(⌈N/2⌉)` for the exponential-growth flag.
const EXPONENTIAL_DEGREE_RATIO: f64 = 1.5;

/// Memoized breadth-first enumeration of `B_S(R)`.
///
/// Element ids are assigned in BFS order (FIFO, generators in list order), so
/// the ids of `B(r)` are exactly `0..b_r`.
#[derive(Debug, Clone)]
pub struct BallTable<G: Group> {
    group: G,
    radius: u32,
    elements: Vec<G::Element>,
    index: HashMap<G::Element, u32>,
    norms: Vec<u32>,
    neighbors: Vec<u32>,
    counts: GrowthCounts,
}

/// [`BallTable::build`] with the default memory budget.
pub fn enumerate_ball<G: Group>(g: &G, radius: u32) -> Result<BallTable<G>> {
    BallTable::build(g, radius, DEFAULT_MEMORY_BUDGET)
}

/// Growth counts up to `radius`, through the group's geodesic automaton when
/// it has one and through BFS otherwise.
pub fn growth_counts<G: Group>(g: &G, radius: u32, budget: usize) -> Result<GrowthCounts> {
    match g.geodesic_automaton() {
        Some(automaton) => GrowthCounts::from_automaton(g.generators().len(), &automaton, radius),
        None => Ok(BallTable::build(g, radius, budget)?.counts),
    }
}

/// Growth counts far enough out that `Φ[volume]` is determined: the last
/// ball exceeds `volume`, or the group is exhausted.
pub fn growth_counts_covering<G: Group>(g: &G, volume: &Rational, budget: usize) -> Result<GrowthCounts> {
    let mut radius = 4;
    loop {
        let counts = growth_counts(g, radius, budget)?;
        if counts.is_exhausted() || rational::uint(*counts.b.last().expect("non-empty")) > *volume {
            return Ok(counts);
        }
        radius *= 2;
    }
}

impl<G: Group> BallTable<G> {
    pub fn build(g: &G, radius: u32, budget: usize) -> Result<BallTable<G>> {
        let gens = g.generators();
        let degree = gens.len();
        let e = g.identity();
        let mut elements = vec![e.clone()];
        let mut index = HashMap::from([(e, 0u32)]);
        let mut norms = vec![0u32];
        let mut neighbors: Vec<u32> = Vec::new();
        let mut counts = GrowthCounts::empty(degree);
        counts.push_sphere(1)?;

        let mut layer = 0..1usize;
        for r in 0..=radius {
            let mut added = 0u64;
            for id in layer.clone() {
                for s in gens {
                    let y = g.mul(&elements[id], s);
                    let slot = match index.get(&y) {
                        Some(&j) => j,
                        None if r < radius => {
                            if elements.len() >= budget {
                                return Err(Error::MemoryBudgetExceeded {
                                    budget,
                                    last_complete_radius: r,
                                });
                            }
                            let j = elements.len() as u32;
                            index.insert(y.clone(), j);
                            elements.push(y);
                            norms.push(r + 1);
                            added += 1;
                            j
                        }
                        None => OUTSIDE,
                    };
                    neighbors.push(slot);
                }
            }
            if r == radius {
                break;
            }
            counts.push_sphere(added)?;
            layer = layer.end..elements.len();
        }
        debug_assert_eq!(neighbors.len(), elements.len() * degree);
        Ok(BallTable {
            group: g.clone(),
            radius,
            elements,
            index,
            norms,
            neighbors,
            counts,
        })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn max_radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.group.generators().len()
    }

    pub fn counts(&self) -> &GrowthCounts {
        &self.counts
    }

    pub fn element(&self, id: u32) -> &G::Element {
        &self.elements[id as usize]
    }

    pub fn elements(&self) -> &[G::Element] {
        &self.elements
    }

    pub fn id_of(&self, x: &G::Element) -> Option<u32> {
        self.index.get(x).copied()
    }

    /// Exact word norm, if `|x|_S ≤ R`.
    pub fn norm_of(&self, x: &G::Element) -> Option<u32> {
        self.id_of(x).map(|id| self.norms[id as usize])
    }

    pub fn norm(&self, id: u32) -> u32 {
        self.norms[id as usize]
    }

    /// Ids of `x·s` for every generator `s`, [`OUTSIDE`] when not in the table.
    pub fn neighbors(&self, id: u32) -> &[u32] {
        let d = self.degree();
        &self.neighbors[id as usize * d..(id as usize + 1) * d]
    }

    /// Ids of the elements of `B(r)`.
    pub fn ids_within(&self, r: u32) -> Result<Range<u32>> {
        Ok(0..self.counts.ball(r)? as u32)
    }

    /// `d_S(x, y) = |x⁻¹y|_S`, if within the table horizon.
    pub fn distance(&self, x: &G::Element, y: &G::Element) -> Option<u32> {
        self.norm_of(&self.group.mul(&self.group.inv(x), y))
    }

    pub fn phi(&self, v: &Rational) -> Result<PhiValue> {
        self.counts.phi(v)
    }

    pub fn average_length(&self, r: u32) -> Result<Rational> {
        self.counts.average_length(r)
    }

    pub fn growth_rate_upper(&self, horizon: u32) -> Result<GrowthEstimate> {
        self.counts.growth_rate_upper(horizon)
    }
}

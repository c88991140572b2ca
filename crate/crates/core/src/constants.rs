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

//! Isoperimetric constants: conversions between the boundary-ratio form and
//! the Følner form of a lower bound, scoped certificates, and the log-ratio
//! estimate of the optimal constant for groups of exponential growth.
//!
//! Everything here is finite. A certificate only ever speaks about the sets
//! in its scope; a failing certificate carries a set that disproves the
//! bound outright.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::ball::{growth_counts_covering, BallTable, GrowthCounts, PhiValue};
use crate::error::{Error, Result};
use crate::folner::{
    ball_subset_profile, boundary_profile, first_connected_matching, FolnerRecord, FolnerValue, ProfileEntry,
};
use crate::group::{Amenability, Group, GrowthType};
use crate::isoperimetry::FiniteSubset;
use crate::rational::{self, uint, Rational};

/// A lower bound with constants `c`, `α` (and `ρ`).
///
/// * `Csc`: `|∂Ω|/|Ω| ≥ c / Φ[(1 + α)|Ω|]` for every finite `Ω`.
/// * `Folner`: `Føl(n) ≥ |B(cn - ρ)| / (1 + α)` for every `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundParams {
    Csc {
        c: Rational,
        alpha: Rational,
        generating_set_size: usize,
    },
    Folner {
        c: Rational,
        alpha: Rational,
        rho: Rational,
        generating_set_size: usize,
    },
}

fn non_negative(name: &str, q: &Rational) -> Result<()> {
    if q.is_negative() {
        return Err(Error::BadParams(format!(
            "{name} must be ≥ 0, got {}",
            rational::format(q)
        )));
    }
    Ok(())
}

impl BoundParams {
    pub fn csc(c: Rational, alpha: Rational, generating_set_size: usize) -> Result<BoundParams> {
        non_negative("c", &c)?;
        non_negative("alpha", &alpha)?;
        Ok(BoundParams::Csc {
            c,
            alpha,
            generating_set_size,
        })
    }

    pub fn folner(c: Rational, alpha: Rational, rho: Rational, generating_set_size: usize) -> Result<BoundParams> {
        non_negative("c", &c)?;
        non_negative("alpha", &alpha)?;
        non_negative("rho", &rho)?;
        Ok(BoundParams::Folner {
            c,
            alpha,
            rho,
            generating_set_size,
        })
    }

    pub fn form(&self) -> &'static str {
        match self {
            BoundParams::Csc { .. } => "csc",
            BoundParams::Folner { .. } => "folner",
        }
    }

    pub fn c(&self) -> &Rational {
        match self {
            BoundParams::Csc { c, .. } | BoundParams::Folner { c, .. } => c,
        }
    }

    pub fn alpha(&self) -> &Rational {
        match self {
            BoundParams::Csc { alpha, .. } | BoundParams::Folner { alpha, .. } => alpha,
        }
    }

    pub fn generating_set_size(&self) -> usize {
        match self {
            BoundParams::Csc {
                generating_set_size, ..
            }
            | BoundParams::Folner {
                generating_set_size, ..
            } => *generating_set_size,
        }
    }

    /// `1 + α`, the volume factor inside `Φ` (or the divisor of the ball).
    pub fn inflation(&self) -> Rational {
        Rational::one() + self.alpha()
    }
}

impl Serialize for BoundParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            form: &'static str,
            c: String,
            alpha: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            rho: Option<String>,
            generating_set_size: usize,
        }
        let rho = match self {
            BoundParams::Folner { rho, .. } => Some(rational::format(rho)),
            BoundParams::Csc { .. } => None,
        };
        Repr {
            form: self.form(),
            c: rational::format(self.c()),
            alpha: rational::format(self.alpha()),
            rho,
            generating_set_size: self.generating_set_size(),
        }
        .serialize(s)
    }
}

/// From `|∂Ω|/|Ω| ≥ c/Φ[(1 + α)|Ω|]` to `Føl(n) ≥ |B(cn - ρ)|/(1 + α)`, for
/// any `ρ > 0`: a set with ratio `≤ 1/n` has `Φ[(1 + α)|Ω|] ≥ cn`, so
/// `(1 + α)|Ω| ≥ |B(r)|` for every integer `r < cn`, and `r = ⌊cn - ρ⌋`
/// qualifies.
pub fn csc_to_folner(p: &BoundParams, rho: &Rational) -> Result<BoundParams> {
    let BoundParams::Csc {
        c,
        alpha,
        generating_set_size,
    } = p
    else {
        return Err(Error::BadParams("expected a csc-form bound".into()));
    };
    if !c.is_positive() {
        return Err(Error::BadParams("c must be > 0".into()));
    }
    if !rho.is_positive() {
        return Err(Error::BadParams("rho must be > 0".into()));
    }
    BoundParams::folner(c.clone(), alpha.clone(), rho.clone(), *generating_set_size)
}

/// From the Følner form to `|∂Ω|/|Ω| ≥ c / Φ[|S|^⌈ρ + c⌉ (1 + α)|Ω|]`,
/// returned as a csc-form bound with `α' = |S|^⌈ρ + c⌉ (1 + α) - 1`.
pub fn folner_to_csc(p: &BoundParams) -> Result<BoundParams> {
    let BoundParams::Folner {
        c,
        alpha,
        rho,
        generating_set_size,
    } = p
    else {
        return Err(Error::BadParams("expected a folner-form bound".into()));
    };
    if *generating_set_size == 0 {
        return Err(Error::EmptyGeneratingSet);
    }
    if !c.is_positive() {
        return Err(Error::BadParams("c must be > 0".into()));
    }
    let exponent = rational::ceil(&(rho + c))
        .to_u32()
        .ok_or_else(|| Error::BadParams("⌈ρ + c⌉ is too large".into()))?;
    let factor = BigInt::from(*generating_set_size).pow(exponent);
    let inflation = Rational::from_integer(factor) * (Rational::one() + alpha);
    BoundParams::csc(c.clone(), inflation - Rational::one(), *generating_set_size)
}

/// Right-hand side `c / Φ[(1 + α)|Ω|]`, zero when `Φ` is infinite.
pub fn csc_rhs(p: &BoundParams, size: u64, counts: &GrowthCounts) -> Result<Rational> {
    match counts.phi(&(p.inflation() * uint(size)))? {
        PhiValue::Finite(0) => unreachable!("b_0 = 1 never exceeds a positive volume"),
        PhiValue::Finite(r) => Ok(p.c() / uint(u64::from(r))),
        PhiValue::Infinite => Ok(Rational::zero()),
    }
}

/// Right-hand side `|B(cn - ρ)| / (1 + α)`.
pub fn folner_rhs(p: &BoundParams, n: u64, counts: &GrowthCounts) -> Result<Rational> {
    let BoundParams::Folner { c, rho, .. } = p else {
        return Err(Error::BadParams("expected a folner-form bound".into()));
    };
    let radius = c * uint(n) - rho;
    Ok(uint(counts.ball_at(&radius)?) / p.inflation())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolnerFormRow {
    pub n: u64,
    pub value: FolnerValue,
    #[serde(serialize_with = "rational::serialize_text")]
    pub rhs: Rational,
    /// `None` when a lower bound alone cannot decide.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolnerFormCheck {
    pub params: BoundParams,
    pub holds: bool,
    /// First `n` where an exact value falls below the bound.
    pub witness: Option<u64>,
    pub rows: Vec<FolnerFormRow>,
}

/// Checks `Føl(n) ≥ |B(cn - ρ)|/(1 + α)` against computed records. Exact and
/// infinite values decide; a lower bound decides only when it already meets
/// the bound.
pub fn check_folner_form<G: Group>(
    p: &BoundParams,
    records: &[FolnerRecord<G>],
    counts: &GrowthCounts,
) -> Result<FolnerFormCheck> {
    let mut rows = Vec::with_capacity(records.len());
    for rec in records {
        let rhs = folner_rhs(p, rec.n, counts)?;
        let holds = match rec.value {
            FolnerValue::Exact(v) => Some(uint(v) >= rhs),
            FolnerValue::Infinite => Some(true),
            FolnerValue::LowerBoundOnly(v) => (uint(v) >= rhs).then_some(true),
        };
        rows.push(FolnerFormRow {
            n: rec.n,
            value: rec.value,
            rhs,
            holds,
        });
    }
    let witness = rows.iter().find(|r| r.holds == Some(false)).map(|r| r.n);
    Ok(FolnerFormCheck {
        params: p.clone(),
        holds: witness.is_none(),
        witness,
        rows,
    })
}

/// The sets a certificate ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Every non-empty subset of `B(radius)`.
    ExhaustiveBallSubsets { radius: u32 },
    /// Every connected set containing `e` with at most `max_size` elements.
    ConnectedUpTo { max_size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScopeReport {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    pub sets_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub elements: Vec<String>,
    pub keys: Vec<String>,
    pub size: usize,
    pub boundary: usize,
    #[serde(serialize_with = "rational::serialize_text")]
    pub lhs: Rational,
    #[serde(serialize_with = "rational::serialize_text")]
    pub rhs: Rational,
}

/// A scoped verdict. There is deliberately no way to build one that does not
/// name its scope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub form: &'static str,
    pub params: BoundParams,
    pub scope: ScopeReport,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Bounds that follow from this one by conversion, valid on the same
    /// footing (scoped) as the certificate itself.
    pub derived_bounds: Vec<BoundParams>,
}

fn witness_of<G: Group>(omega: &FiniteSubset<G>, lhs: Rational, rhs: Rational) -> Witness {
    Witness {
        elements: omega.iter().map(|x| x.to_string()).collect(),
        keys: omega.sorted_keys().iter().map(hex::encode).collect(),
        size: omega.len(),
        boundary: omega.boundary_len(),
        lhs,
        rhs,
    }
}

/// Checks a csc-form bound on every set in `scope`. A failure reports the
/// canonically first violating set (by cardinality, then sorted keys).
pub fn certify_at_scale<G: Group>(g: &G, p: &BoundParams, scope: Scope, budget: usize) -> Result<Certificate> {
    if !matches!(p, BoundParams::Csc { .. }) {
        return Err(Error::BadParams("certificates are issued for csc-form bounds".into()));
    }
    let (profile, report) = match scope {
        Scope::ExhaustiveBallSubsets { radius } => {
            let profile = ball_subset_profile(g, radius, budget)?;
            let report = ScopeReport {
                kind: "exhaustive-ball-subsets",
                radius: Some(radius),
                max_size: None,
                sets_checked: 0,
            };
            (profile, report)
        }
        Scope::ConnectedUpTo { max_size } => {
            let profile = boundary_profile(g, max_size, budget)?;
            let report = ScopeReport {
                kind: "connected-containing-identity",
                radius: None,
                max_size: Some(max_size),
                sets_checked: 0,
            };
            (profile, report)
        }
    };
    let report = ScopeReport {
        sets_checked: profile.values().map(|e| e.count).sum(),
        ..report
    };
    let largest = profile.keys().map(|&(s, _)| s).max().unwrap_or(1) as u64;
    let counts = growth_counts_covering(g, &(p.inflation() * uint(largest)), budget)?;

    let mut failing: Vec<(usize, usize, Rational, Rational)> = Vec::new();
    for &(size, boundary) in profile.keys() {
        let lhs = Rational::new(boundary.into(), size.into());
        let rhs = csc_rhs(p, size as u64, &counts)?;
        if lhs < rhs {
            failing.push((size, boundary, lhs, rhs));
        }
    }
    let witness = match failing.first() {
        None => None,
        Some(&(size, ..)) => Some(first_failing(g, scope, &profile, &failing, size, budget)?),
    };
    let derived_bounds = match (&witness, p.c().is_positive()) {
        (None, true) => vec![csc_to_folner(p, &Rational::one())?],
        _ => Vec::new(),
    };
    Ok(Certificate {
        form: p.form(),
        params: p.clone(),
        scope: report,
        holds: witness.is_none(),
        witness,
        derived_bounds,
    })
}

/// The canonically first set among the failing classes, all of which have
/// at least `size` elements.
fn first_failing<G: Group>(
    g: &G,
    scope: Scope,
    profile: &BTreeMap<(usize, usize), ProfileEntry<G>>,
    failing: &[(usize, usize, Rational, Rational)],
    size: usize,
    budget: usize,
) -> Result<Witness> {
    let at_size: BTreeMap<usize, (Rational, Rational)> = failing
        .iter()
        .filter(|f| f.0 == size)
        .map(|(_, b, l, r)| (*b, (l.clone(), r.clone())))
        .collect();
    let omega = match scope {
        Scope::ExhaustiveBallSubsets { .. } => at_size
            .keys()
            .map(|&b| &profile[&(size, b)].example)
            .min_by_key(|ex| ex.sorted_keys())
            .expect("a failing class exists")
            .clone(),
        Scope::ConnectedUpTo { .. } => {
            let table = BallTable::build(g, size.saturating_sub(1) as u32, budget)?;
            first_connected_matching(&table, size, |_, b| at_size.contains_key(&b))?.expect("a failing class exists")
        }
    };
    let (lhs, rhs) = at_size[&omega.boundary_len()].clone();
    Ok(witness_of(&omega, lhs, rhs))
}

/// An extended non-negative real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(x) => s.serialize_f64(*x),
            Extended::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl Extended {
    fn div(self, d: f64) -> Extended {
        match self {
            Extended::Finite(x) => Extended::Finite(x / d),
            Extended::Infinite => Extended::Infinite,
        }
    }

    fn min(self, other: Extended) -> Extended {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.min(b)),
            (Extended::Infinite, x) | (x, Extended::Infinite) => x,
        }
    }
}

/// How a reported number relates to the true quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// The true value is at most this.
    Upper,
    /// The true value is at least this.
    Lower,
    /// A finite-window statistic, no inequality with the true value implied.
    Statistic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateField {
    pub value: Extended,
    pub direction: Direction,
    pub basis: String,
}

/// The optimal constant as `liminf ln Føl(n)/n` over `lim ln b_n / n`,
/// estimated at a finite horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientEstimate {
    pub horizon: u32,
    pub numerator_lower: Option<EstimateField>,
    pub numerator_upper: Option<EstimateField>,
    pub denominator_upper: EstimateField,
    pub denominator_lower: EstimateField,
    /// `numerator_lower / denominator_upper`.
    pub c_lower: Option<EstimateField>,
    /// `numerator_upper / denominator_lower`.
    pub c_upper: Option<EstimateField>,
    /// Set only when the value follows from configured structure.
    pub certified: Option<Extended>,
    pub caveats: Vec<String>,
}

/// Estimates the optimal constant for a group of exponential growth from
/// Følner records and growth counts up to `horizon`.
///
/// Numerator statistics use the window `⌈N/2⌉ ≤ n ≤ N`: the minimum of
/// `ln v / n` over exact values and lower bounds, and over exact values and
/// family upper bounds. Neither bounds the liminf, since the sequence may
/// oscillate beyond the window. The denominator is bracketed by the Fekete
/// minimum (a true upper bound) and the back-half slope (evidence only).
pub fn quotient_estimate<G: Group>(
    g: &G,
    horizon: u32,
    records: &[FolnerRecord<G>],
    counts: &GrowthCounts,
) -> Result<QuotientEstimate> {
    let structure = g.structure();
    let growth = counts.growth_rate_upper(horizon)?;
    match structure.growth {
        GrowthType::Polynomial { degree } => {
            return Err(Error::NotApplicable(format!(
                "{} has polynomial growth of degree {degree}",
                g.name()
            )))
        }
        GrowthType::Unknown if !growth.is_exponential_evidence => {
            return Err(Error::NotApplicable(format!(
                "no evidence of exponential growth for {} at horizon {horizon}",
                g.name()
            )))
        }
        _ => {}
    }
    let half = u64::from(horizon.div_ceil(2)).max(1);
    let window: Vec<&FolnerRecord<G>> = records
        .iter()
        .filter(|r| r.n >= half && r.n <= u64::from(horizon))
        .collect();
    if window.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no Følner records with {half} ≤ n ≤ {horizon}"
        )));
    }
    let log_rate = |v: u64, n: u64| Extended::Finite((v as f64).ln() / n as f64);
    let mut lower: Option<Extended> = None;
    let mut upper: Option<Extended> = None;
    let fold = |acc: &mut Option<Extended>, x: Extended| *acc = Some(acc.map_or(x, |a| a.min(x)));
    for r in &window {
        match r.value {
            FolnerValue::Exact(v) => {
                fold(&mut lower, log_rate(v, r.n));
                fold(&mut upper, log_rate(v, r.n));
            }
            FolnerValue::LowerBoundOnly(v) => {
                fold(&mut lower, log_rate(v, r.n));
                if let Some(u) = r.family_upper {
                    fold(&mut upper, log_rate(u, r.n));
                }
            }
            FolnerValue::Infinite => {
                fold(&mut lower, Extended::Infinite);
                fold(&mut upper, Extended::Infinite);
            }
        }
    }
    let range = format!("{half} ≤ n ≤ {horizon}");
    let field = |value, direction, basis: String| EstimateField {
        value,
        direction,
        basis,
    };
    let numerator_lower = lower.map(|v| {
        field(
            v,
            Direction::Statistic,
            format!("window-min of ln(value or lower bound)/n over {range}"),
        )
    });
    let numerator_upper = upper.map(|v| {
        field(
            v,
            Direction::Statistic,
            format!("window-min of ln(value or family upper)/n over {range}"),
        )
    });
    let denominator_upper = field(
        Extended::Finite(growth.fekete_inf),
        Direction::Upper,
        format!("min ln(b_n)/n over 1 ≤ n ≤ {horizon}"),
    );
    let denominator_lower = field(
        Extended::Finite(growth.tail_slope),
        Direction::Statistic,
        format!("ln(b_{horizon}/b_{half})/({horizon} - {half})"),
    );
    let ratio = |num: &Option<EstimateField>, den: f64, basis: &str| {
        num.as_ref()
            .filter(|_| den > 0.0)
            .map(|n| field(n.value.div(den), Direction::Statistic, basis.to_string()))
    };
    let c_lower = ratio(
        &numerator_lower,
        growth.fekete_inf,
        "numerator_lower / denominator_upper",
    );
    let c_upper = ratio(
        &numerator_upper,
        growth.tail_slope,
        "numerator_upper / denominator_lower",
    );

    let mut caveats = vec![
        "numerator values are window statistics; a liminf is not determined by finitely many terms".to_string(),
        "the true denominator is at most denominator_upper, so c_lower does not bound the constant from below"
            .to_string(),
        "denominator_lower is a slope estimate, not a bound".to_string(),
    ];
    let configured_non_amenable = structure.amenability == Amenability::NonAmenable;
    let all_infinite = window.iter().all(|r| r.value == FolnerValue::Infinite);
    let certified = if configured_non_amenable && all_infinite {
        caveats
            .push("Føl(n) is infinite for n ≥ 2 by the configured non-amenability, so the constant is infinite".into());
        Some(Extended::Infinite)
    } else {
        None
    };
    if growth.fekete_inf <= 0.0 {
        caveats.push("denominator_upper is not positive; ratios omitted".into());
    }
    Ok(QuotientEstimate {
        horizon,
        numerator_lower,
        numerator_upper,
        denominator_upper,
        denominator_lower,
        c_lower,
        c_upper,
        certified,
        caveats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{growth_counts, DEFAULT_MEMORY_BUDGET};
    use crate::folner::{folner_exact, folner_record};
    use crate::group::{make_group, GroupHandle, Structure};
    use crate::rational::{int, ratio};

    /// `Z/n` with generators `±1`, for the finite-group paths.
    #[derive(Debug, Clone)]
    struct Cyclic {
        n: u32,
        gens: Vec<u32>,
    }

    impl Cyclic {
        fn new(n: u32) -> Cyclic {
            Cyclic {
                n,
                gens: vec![1, n - 1],
            }
        }
    }

    impl Group for Cyclic {
        type Element = u32;
        fn identity(&self) -> u32 {
            0
        }
        fn mul(&self, a: &u32, b: &u32) -> u32 {
            (a + b) % self.n
        }
        fn inv(&self, a: &u32) -> u32 {
            (self.n - a) % self.n
        }
        fn generators(&self) -> &[u32] {
            &self.gens
        }
        fn key(&self, a: &u32) -> Vec<u8> {
            a.to_be_bytes().to_vec()
        }
        fn name(&self) -> String {
            format!("Z/{}", self.n)
        }
        fn structure(&self) -> Structure {
            Structure {
                amenability: Amenability::Amenable,
                growth: GrowthType::Polynomial { degree: 0 },
            }
        }
    }

    #[test]
    fn csc_to_folner_examples() {
        let p = BoundParams::csc(ratio(1, 2), int(1), 2).unwrap();
        let f = csc_to_folner(&p, &int(1)).unwrap();
        assert_eq!(f, BoundParams::folner(ratio(1, 2), int(1), int(1), 2).unwrap());
        let zero = BoundParams::csc(int(0), int(1), 2).unwrap();
        assert!(matches!(csc_to_folner(&zero, &int(1)), Err(Error::BadParams(_))));
        assert!(matches!(csc_to_folner(&p, &int(0)), Err(Error::BadParams(_))));
        assert!(BoundParams::csc(int(-1), int(0), 2).is_err());
    }

    #[test]
    fn folner_to_csc_examples() {
        let f = BoundParams::folner(int(1), int(0), int(0), 2).unwrap();
        assert_eq!(folner_to_csc(&f).unwrap().inflation(), int(2));
        let f = BoundParams::folner(ratio(1, 2), int(1), ratio(3, 2), 4).unwrap();
        assert_eq!(folner_to_csc(&f).unwrap().inflation(), int(32));
        let empty = BoundParams::folner(int(1), int(0), int(0), 0).unwrap();
        assert!(matches!(folner_to_csc(&empty), Err(Error::EmptyGeneratingSet)));
    }

    #[test]
    fn folner_form_on_z_records() {
        let z = make_group("z", &[1]).unwrap();
        let counts = growth_counts(&z, 20, DEFAULT_MEMORY_BUDGET).unwrap();
        let records: Vec<_> = (1..=6)
            .map(|n| folner_exact(&z, n, 14, DEFAULT_MEMORY_BUDGET).unwrap())
            .collect();
        let f = csc_to_folner(&BoundParams::csc(ratio(1, 2), int(1), 2).unwrap(), &int(1)).unwrap();
        let check = check_folner_form(&f, &records, &counts).unwrap();
        assert!(check.holds);
        for row in &check.rows {
            let n = row.n as i64;
            // |B(n/2 - 1)| / 2 with |B(x)| = 2⌊x⌋ + 1, or 0 for x < 0.
            let x = ratio(n, 2) - int(1);
            let ball = if x < int(0) {
                0
            } else {
                2 * rational::floor(&x).to_i64().unwrap() + 1
            };
            assert_eq!(row.rhs, ratio(ball, 2));
        }
        // Too strong a constant is refuted already at n = 1: |B(3)| = 7 > 1.
        let strong = BoundParams::folner(int(3), int(0), int(0), 2).unwrap();
        assert_eq!(check_folner_form(&strong, &records, &counts).unwrap().witness, Some(1));
    }

    #[test]
    fn certify_examples() {
        let z = make_group("z", &[1]).unwrap();
        let eps = ratio(1, 4);
        let p = BoundParams::csc(int(1) - &eps, int(1) / &eps - int(1), 2).unwrap();
        let cert = certify_at_scale(
            &z,
            &p,
            Scope::ExhaustiveBallSubsets { radius: 2 },
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        assert!(cert.holds);
        assert_eq!(cert.scope.sets_checked, 31);
        assert_eq!(cert.derived_bounds.len(), 1);

        let bad = BoundParams::csc(int(3), int(0), 2).unwrap();
        let cert = certify_at_scale(
            &z,
            &bad,
            Scope::ExhaustiveBallSubsets { radius: 2 },
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        assert!(!cert.holds);
        let w = cert.witness.unwrap();
        assert_eq!(w.elements, vec!["0"]);
        assert_eq!((w.lhs, w.rhs), (int(1), int(3)));

        let cert = certify_at_scale(&z, &bad, Scope::ConnectedUpTo { max_size: 5 }, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(cert.witness.unwrap().elements, vec!["0"]);
        assert_eq!(cert.scope.sets_checked, 15);
    }

    #[test]
    fn finite_group_certificate_is_vacuous() {
        let c4 = Cyclic::new(4);
        let p = BoundParams::csc(int(100), int(10), 2).unwrap();
        let cert = certify_at_scale(
            &c4,
            &p,
            Scope::ExhaustiveBallSubsets { radius: 2 },
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        assert!(cert.holds);
        assert_eq!(cert.scope.sets_checked, 15);
        let counts = growth_counts(&c4, 4, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(csc_rhs(&p, 1, &counts).unwrap(), int(0));
    }

    #[test]
    fn connected_witness_matches_ordered_search() {
        // Sets of size ≤ 4 in Z² are all boundary, so ratio 1 against
        // c / Φ[(1 + α)|Ω|]; with c = 2, α = 4 only {e} fails (Φ[5] = 2).
        let z2 = make_group("z", &[2]).unwrap();
        let p = BoundParams::csc(int(2), int(4), 4).unwrap();
        let counts = growth_counts(&z2, 6, DEFAULT_MEMORY_BUDGET).unwrap();
        let cert = certify_at_scale(&z2, &p, Scope::ConnectedUpTo { max_size: 5 }, DEFAULT_MEMORY_BUDGET).unwrap();
        let oracle = crate::folner::connected_subset_enum(&z2, 5, DEFAULT_MEMORY_BUDGET)
            .unwrap()
            .find(|o| {
                Rational::new(o.boundary_len().into(), o.len().into()) < csc_rhs(&p, o.len() as u64, &counts).unwrap()
            });
        assert_eq!(oracle.as_ref().map(|o| o.len()), cert.witness.as_ref().map(|w| w.size));
        let p = BoundParams::csc(ratio(9, 4), int(4), 4).unwrap();
        let cert = certify_at_scale(&z2, &p, Scope::ConnectedUpTo { max_size: 5 }, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!(cert.witness.unwrap().elements, vec!["(0,0)".to_string()]);
    }

    #[test]
    fn quotient_not_applicable_for_polynomial() {
        for d in 1..=3 {
            let z = make_group("z", &[d]).unwrap();
            let counts = growth_counts(&z, 8, DEFAULT_MEMORY_BUDGET).unwrap();
            let recs: Vec<FolnerRecord<GroupHandle>> = Vec::new();
            assert!(matches!(
                quotient_estimate(&z, 8, &recs, &counts),
                Err(Error::NotApplicable(_))
            ));
        }
    }

    #[test]
    fn quotient_free_group_is_infinite() {
        let f = make_group("free", &[2]).unwrap();
        let counts = growth_counts(&f, 5, DEFAULT_MEMORY_BUDGET).unwrap();
        let recs: Vec<_> = (1..=5)
            .map(|n| folner_record(&f, n, 6, DEFAULT_MEMORY_BUDGET).unwrap())
            .collect();
        let q = quotient_estimate(&f, 5, &recs, &counts).unwrap();
        assert_eq!(q.certified, Some(Extended::Infinite));
        assert_eq!(q.numerator_lower.unwrap().value, Extended::Infinite);
        let Extended::Finite(den) = q.denominator_upper.value else {
            panic!()
        };
        // min ln(2·3^n - 1)/n over n ≤ 5 is attained at n = 5.
        assert!((den - (485f64).ln() / 5.0).abs() < 1e-12);
        assert!(den > 3f64.ln());
    }

    #[test]
    fn quotient_lamplighter_is_uncertified() {
        let l = make_group("lamplighter", &[]).unwrap();
        let counts = growth_counts(&l, 8, DEFAULT_MEMORY_BUDGET).unwrap();
        let recs: Vec<_> = (1..=8)
            .map(|n| folner_record(&l, n, 4, DEFAULT_MEMORY_BUDGET).unwrap())
            .collect();
        let q = quotient_estimate(&l, 8, &recs, &counts).unwrap();
        // Family members of the window have size 2n·4^n, so the upper
        // statistic is min ln(2n·4^n)/n, reached at n = 8.
        let Extended::Finite(up) = q.numerator_upper.as_ref().unwrap().value else {
            panic!()
        };
        assert!((up - (16.0 * 4f64.powi(8)).ln() / 8.0).abs() < 1e-12);
        assert!(q.certified.is_none());
        assert!(q.numerator_upper.is_some());
        assert!(!q.caveats.is_empty());
        assert!(matches!(
            quotient_estimate(&l, 8, &recs[..3], &counts),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn certificate_json_shape() {
        let z = make_group("z", &[1]).unwrap();
        let bad = BoundParams::csc(int(3), int(0), 2).unwrap();
        let cert = certify_at_scale(
            &z,
            &bad,
            Scope::ExhaustiveBallSubsets { radius: 1 },
            DEFAULT_MEMORY_BUDGET,
        )
        .unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        for key in ["form", "params", "scope", "holds", "witness", "derived_bounds"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["params"]["c"], "3");
        assert_eq!(v["scope"]["kind"], "exhaustive-ball-subsets");
    }
}

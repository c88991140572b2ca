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

//! Inner boundaries, boundary ratios and the isoperimetric inequality forms.
//!
//! Every inequality here depends on `Ω` only through `|Ω|` and `|∂_S Ω|`, so
//! [`evaluate`] takes the two cardinalities directly and
//! [`check_inequality`] is a thin wrapper over a [`FiniteSubset`].

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::ball::{GrowthCounts, PhiValue};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::rational::{self, uint, Rational};

/// A finite set of group elements with a lazily computed inner boundary.
#[derive(Debug, Clone)]
pub struct FiniteSubset<G: Group> {
    group: G,
    elements: BTreeSet<G::Element>,
    boundary: OnceLock<BTreeSet<G::Element>>,
}

impl<G: Group> PartialEq for FiniteSubset<G> {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl<G: Group> Eq for FiniteSubset<G> {}

impl<G: Group> FiniteSubset<G> {
    pub fn new(group: &G, elements: impl IntoIterator<Item = G::Element>) -> FiniteSubset<G> {
        FiniteSubset {
            group: group.clone(),
            elements: elements.into_iter().collect(),
            boundary: OnceLock::new(),
        }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &G::Element) -> bool {
        self.elements.contains(x)
    }

    pub fn elements(&self) -> &BTreeSet<G::Element> {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &G::Element> {
        self.elements.iter()
    }

    /// Element keys in ascending byte order; the canonical ordering key of the set.
    pub fn sorted_keys(&self) -> Vec<Vec<u8>> {
        let mut keys: Vec<Vec<u8>> = self.elements.iter().map(|x| self.group.key(x)).collect();
        keys.sort();
        keys
    }

    /// `∂_S Ω = {x ∈ Ω : ∃ s ∈ S, xs ∉ Ω}`.
    pub fn boundary_elements(&self) -> &BTreeSet<G::Element> {
        self.boundary.get_or_init(|| {
            self.elements
                .iter()
                .filter(|x| {
                    self.group
                        .generators()
                        .iter()
                        .any(|s| !self.elements.contains(&self.group.mul(x, s)))
                })
                .cloned()
                .collect()
        })
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary_elements().len()
    }

    /// Left translate `gΩ`.
    pub fn translate(&self, g: &G::Element) -> FiniteSubset<G> {
        FiniteSubset::new(&self.group, self.elements.iter().map(|x| self.group.mul(g, x)))
    }

    /// Connected components in the Cayley graph, ordered by their smallest element.
    pub fn components(&self) -> Vec<FiniteSubset<G>> {
        let mut seen: BTreeSet<&G::Element> = BTreeSet::new();
        let mut out = Vec::new();
        for start in &self.elements {
            if seen.contains(start) {
                continue;
            }
            let mut component = Vec::new();
            let mut queue = VecDeque::from([start.clone()]);
            seen.insert(start);
            while let Some(x) = queue.pop_front() {
                for s in self.group.generators() {
                    let y = self.group.mul(&x, s);
                    if let Some(y_ref) = self.elements.get(&y) {
                        if seen.insert(y_ref) {
                            queue.push_back(y);
                        }
                    }
                }
                component.push(x);
            }
            out.push(FiniteSubset::new(&self.group, component));
        }
        out
    }
}

/// `∂_S Ω` as a subset.
pub fn boundary<G: Group>(omega: &FiniteSubset<G>) -> FiniteSubset<G> {
    FiniteSubset::new(omega.group(), omega.boundary_elements().iter().cloned())
}

/// `|∂_S Ω| / |Ω|`.
pub fn boundary_ratio<G: Group>(omega: &FiniteSubset<G>) -> Result<Rational> {
    if omega.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(Rational::new(
        (omega.boundary_len() as u64).into(),
        (omega.len() as u64).into(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InequalityForm {
    /// `|∂Ω|/|Ω| ≥ 1 / (4|S| Φ[2|Ω|])`.
    CscOriginal,
    /// `|∂Ω|/|Ω| ≥ (α/(1+α)) (b_{r-1}/b_r) / E[|X_r|]`, `r = Φ[(1+α)|Ω|]`.
    AvgGrowth { alpha: Rational },
    /// As `AvgGrowth` with `E[|X_r|]` replaced by `r`.
    GrowthCor { alpha: Rational },
    /// `|∂Ω|/|Ω| > (1-ε) / Φ[|Ω|/ε]`, `0 < ε < 1`.
    Epsilon { epsilon: Rational },
    /// `|∂Ω|/|Ω| > 1 / (2 Φ[2|Ω|])`.
    PeteCorreia,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormName {
    CscOriginal,
    AvgGrowth,
    GrowthCor,
    Epsilon,
    PeteCorreia,
}

impl FormName {
    pub fn as_str(self) -> &'static str {
        match self {
            FormName::CscOriginal => "csc-original",
            FormName::AvgGrowth => "avg-growth",
            FormName::GrowthCor => "growth-cor",
            FormName::Epsilon => "epsilon",
            FormName::PeteCorreia => "pete-correia",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, FormName::Epsilon | FormName::PeteCorreia)
    }
}

impl fmt::Display for FormName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csc-original" => Ok(FormName::CscOriginal),
            "avg-growth" => Ok(FormName::AvgGrowth),
            "growth-cor" => Ok(FormName::GrowthCor),
            "epsilon" => Ok(FormName::Epsilon),
            "pete-correia" => Ok(FormName::PeteCorreia),
            other => Err(Error::BadParams(format!("unknown inequality form `{other}`"))),
        }
    }
}

impl InequalityForm {
    pub fn name(&self) -> FormName {
        match self {
            InequalityForm::CscOriginal => FormName::CscOriginal,
            InequalityForm::AvgGrowth { .. } => FormName::AvgGrowth,
            InequalityForm::GrowthCor { .. } => FormName::GrowthCor,
            InequalityForm::Epsilon { .. } => FormName::Epsilon,
            InequalityForm::PeteCorreia => FormName::PeteCorreia,
        }
    }

    /// Builds a form from its name and its `α`/`ε` parameter when it has one.
    pub fn from_name(name: FormName, param: Option<Rational>) -> Result<InequalityForm> {
        let need = |p: Option<Rational>| p.ok_or_else(|| Error::BadParams(format!("form `{name}` needs a parameter")));
        Ok(match name {
            FormName::CscOriginal => InequalityForm::CscOriginal,
            FormName::PeteCorreia => InequalityForm::PeteCorreia,
            FormName::AvgGrowth => InequalityForm::AvgGrowth { alpha: need(param)? },
            FormName::GrowthCor => InequalityForm::GrowthCor { alpha: need(param)? },
            FormName::Epsilon => InequalityForm::Epsilon { epsilon: need(param)? },
        })
    }

    fn param(&self) -> Option<FormParam> {
        match self {
            InequalityForm::AvgGrowth { alpha } | InequalityForm::GrowthCor { alpha } => Some(FormParam {
                name: "alpha",
                value: alpha.clone(),
            }),
            InequalityForm::Epsilon { epsilon } => Some(FormParam {
                name: "epsilon",
                value: epsilon.clone(),
            }),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            InequalityForm::AvgGrowth { alpha } | InequalityForm::GrowthCor { alpha } if alpha.is_negative() => Err(
                Error::BadParams(format!("alpha = {} must be ≥ 0", rational::format(alpha))),
            ),
            InequalityForm::Epsilon { epsilon } if !(epsilon.is_positive() && *epsilon < Rational::one()) => Err(
                Error::BadParams(format!("epsilon = {} must lie in (0, 1)", rational::format(epsilon))),
            ),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormParam {
    pub name: &'static str,
    pub value: Rational,
}

impl Serialize for FormParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(1))?;
        map.serialize_entry(self.name, &rational::format(&self.value))?;
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub form: FormName,
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub lhs: Rational,
    #[serde(serialize_with = "rational::serialize_fraction")]
    pub rhs: Rational,
    pub holds: bool,
    pub strict: bool,
    pub radius_used: PhiValue,
    pub params: Option<FormParam>,
}

/// Checks one inequality form for a set with `size` elements and `boundary`
/// boundary points.
///
/// When `Φ` is infinite (finite group, volume beyond `|G|`) the right-hand
/// side is `c · 1/∞ = 0` and the inequality holds, strict forms included.
pub fn evaluate(size: u64, boundary: u64, counts: &GrowthCounts, form: &InequalityForm) -> Result<InequalityReport> {
    if size == 0 {
        return Err(Error::EmptySet);
    }
    form.validate()?;
    let omega = uint(size);
    let one = Rational::one();
    let (volume, coefficient) = match form {
        InequalityForm::CscOriginal => (&omega * uint(2), None),
        InequalityForm::PeteCorreia => (&omega * uint(2), None),
        InequalityForm::AvgGrowth { alpha } | InequalityForm::GrowthCor { alpha } => {
            (&omega * (alpha + &one), Some(alpha / (alpha + &one)))
        }
        InequalityForm::Epsilon { epsilon } => (&omega / epsilon, Some(&one - epsilon)),
    };
    let radius_used = counts.phi(&volume)?;
    let rhs = match radius_used {
        PhiValue::Infinite => Rational::zero(),
        PhiValue::Finite(r) => {
            // r ≥ 1 because b_0 = 1 ≤ volume for every non-empty Ω.
            debug_assert!(r >= 1);
            let r_q = uint(u64::from(r));
            match form {
                InequalityForm::CscOriginal => one / (uint(4) * uint(counts.generator_count() as u64) * r_q),
                InequalityForm::PeteCorreia => one / (uint(2) * r_q),
                InequalityForm::Epsilon { .. } => coefficient.expect("set above") / r_q,
                InequalityForm::AvgGrowth { .. } => {
                    let b_prev = uint(counts.ball(r - 1)?);
                    let lengths = uint(counts.length_sum()[r as usize]);
                    coefficient.expect("set above") * b_prev / lengths
                }
                InequalityForm::GrowthCor { .. } => {
                    let b_prev = uint(counts.ball(r - 1)?);
                    let b_r = uint(counts.ball(r)?);
                    coefficient.expect("set above") * b_prev / (b_r * r_q)
                }
            }
        }
    };
    let lhs = Rational::new(boundary.into(), size.into());
    let strict = form.name().is_strict();
    let holds = radius_used == PhiValue::Infinite || if strict { lhs > rhs } else { lhs >= rhs };
    Ok(InequalityReport {
        form: form.name(),
        lhs,
        rhs,
        holds,
        strict,
        radius_used,
        params: form.param(),
    })
}

pub fn check_inequality<G: Group>(
    omega: &FiniteSubset<G>,
    counts: &GrowthCounts,
    form: &InequalityForm,
) -> Result<InequalityReport> {
    evaluate(omega.len() as u64, omega.boundary_len() as u64, counts, form)
}

/// The five forms at the parameter values exercised by the acceptance battery.
pub fn standard_forms() -> Vec<InequalityForm> {
    let mut forms = vec![InequalityForm::CscOriginal, InequalityForm::PeteCorreia];
    for (p, q) in [(1, 2), (1, 1), (2, 1)] {
        forms.push(InequalityForm::AvgGrowth {
            alpha: rational::ratio(p, q),
        });
        forms.push(InequalityForm::GrowthCor {
            alpha: rational::ratio(p, q),
        });
    }
    for q in [1, 2, 3] {
        forms.push(InequalityForm::Epsilon {
            epsilon: rational::ratio(q, 4),
        });
    }
    forms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::enumerate_ball;
    use crate::group::{Element, GroupHandle};
    use crate::rational::{int, ratio};

    fn z() -> GroupHandle {
        "z:1".parse().unwrap()
    }

    fn zset(xs: impl IntoIterator<Item = i64>) -> FiniteSubset<GroupHandle> {
        FiniteSubset::new(&z(), xs.into_iter().map(|x| Element::Vector(vec![x])))
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary(&zset([0, 1, 2])), zset([0, 2]));
        let single = zset([0]);
        assert_eq!(boundary(&single), zset([0]));
        assert_eq!(boundary_ratio(&single).unwrap(), int(1));

        let z2: GroupHandle = "z:2".parse().unwrap();
        let ball = enumerate_ball(&z2, 1).unwrap();
        let omega = FiniteSubset::new(&z2, ball.elements().iter().cloned());
        let b = boundary(&omega);
        assert_eq!(b.len(), 4);
        assert!(!b.contains(&z2.identity()));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(boundary_ratio(&zset(0..4)).unwrap(), ratio(1, 2));
        assert_eq!(boundary_ratio(&zset([])), Err(Error::EmptySet));
        let d: GroupHandle = "dinf".parse().unwrap();
        for n in 1..6i64 {
            let a_n = FiniteSubset::new(
                &d,
                (-n..=n).flat_map(|k| [false, true].map(|flip| Element::Dihedral { shift: k, flip })),
            );
            assert_eq!(boundary_ratio(&a_n).unwrap(), ratio(1, 2 * n + 1));
        }
    }

    #[test]
    fn pete_correia_on_interval() {
        let t = enumerate_ball(&z(), 12).unwrap();
        let r = check_inequality(&zset(0..10), t.counts(), &InequalityForm::PeteCorreia).unwrap();
        assert_eq!(r.lhs, ratio(1, 5));
        assert_eq!(r.radius_used, PhiValue::Finite(10));
        assert_eq!(r.rhs, ratio(1, 20));
        assert!(r.holds && r.strict);
    }

    #[test]
    fn alpha_zero_is_trivial() {
        let t = enumerate_ball(&z(), 12).unwrap();
        for form in [
            InequalityForm::AvgGrowth { alpha: int(0) },
            InequalityForm::GrowthCor { alpha: int(0) },
        ] {
            let r = check_inequality(&zset(0..5), t.counts(), &form).unwrap();
            assert_eq!(r.rhs, int(0));
            assert!(r.holds);
        }
    }

    #[test]
    fn bad_params_and_horizon() {
        let t = enumerate_ball(&z(), 3).unwrap();
        let c = t.counts();
        assert!(matches!(
            evaluate(1, 1, c, &InequalityForm::Epsilon { epsilon: int(1) }),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            evaluate(1, 1, c, &InequalityForm::AvgGrowth { alpha: int(-1) }),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            evaluate(10, 2, c, &InequalityForm::PeteCorreia),
            Err(Error::HorizonExceeded { .. })
        ));
        assert_eq!(evaluate(0, 0, c, &InequalityForm::PeteCorreia), Err(Error::EmptySet));
    }

    #[test]
    fn components_split_and_merge() {
        let omega = zset([0, 1, 2, 5, 7, 8]);
        let comps = omega.components();
        assert_eq!(comps, vec![zset([0, 1, 2]), zset([5]), zset([7, 8])]);
        let total: usize = comps.iter().map(|c| c.boundary_len()).sum();
        assert_eq!(total, omega.boundary_len());
    }

    #[test]
    fn form_names_roundtrip() {
        for f in standard_forms() {
            assert_eq!(f.name().as_str().parse::<FormName>().unwrap(), f.name());
        }
        assert!("csc".parse::<FormName>().is_err());
    }

    #[test]
    fn report_json_shape() {
        let t = enumerate_ball(&z(), 25).unwrap();
        let r = check_inequality(
            &zset(0..10),
            t.counts(),
            &InequalityForm::Epsilon { epsilon: ratio(1, 4) },
        )
        .unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["form"], "epsilon");
        assert_eq!(v["lhs"]["num"], "1");
        assert_eq!(v["lhs"]["den"], "5");
        assert_eq!(v["params"]["epsilon"], "1/4");
        assert_eq!(v["strict"], true);
    }
}

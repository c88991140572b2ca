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

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use super::{check_generator_list, Amenability, Element, Group, GrowthType, Structure, WordAutomaton};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupKind {
    ZPowerD { d: usize },
    FreeGroup { rank: usize },
    DihedralInfinite,
    Heisenberg,
    LamplighterZ2,
}

impl GroupKind {
    /// Descriptor string accepted by [`FromStr`]: `z:<d>`, `free:<rank>`,
    /// `dinf`, `heis`, `lamplighter`.
    pub fn descriptor(&self) -> String {
        match self {
            GroupKind::ZPowerD { d } => format!("z:{d}"),
            GroupKind::FreeGroup { rank } => format!("free:{rank}"),
            GroupKind::DihedralInfinite => "dinf".into(),
            GroupKind::Heisenberg => "heis".into(),
            GroupKind::LamplighterZ2 => "lamplighter".into(),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let positive = |p: Option<&str>| -> Result<usize> {
            let p = p.ok_or_else(|| Error::InvalidParams(format!("`{name}` needs a parameter")))?;
            match p.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(Error::InvalidParams(format!("`{p}` is not a positive integer"))),
            }
        };
        let no_param = |kind: GroupKind| match param {
            None => Ok(kind),
            Some(p) => Err(Error::InvalidParams(format!("`{name}` takes no parameter, got `{p}`"))),
        };
        match name {
            "z" => Ok(GroupKind::ZPowerD { d: positive(param)? }),
            "free" => Ok(GroupKind::FreeGroup { rank: positive(param)? }),
            "dinf" => no_param(GroupKind::DihedralInfinite),
            "heis" => no_param(GroupKind::Heisenberg),
            "lamplighter" => no_param(GroupKind::LamplighterZ2),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// One of the built-in groups with its generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHandle {
    kind: GroupKind,
    generators: Arc<[Element]>,
}

/// Builds a group from a kind name (`"z"`, `"free"`, `"dinf"`, `"heis"`,
/// `"lamplighter"`) and its integer parameters.
pub fn make_group(kind: &str, params: &[i64]) -> Result<GroupHandle> {
    let count = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "`{kind}` takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let positive = |v: i64| {
        usize::try_from(v)
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| Error::InvalidParams(format!("`{v}` must be ≥ 1")))
    };
    let kind = match kind {
        "z" => {
            count(1)?;
            GroupKind::ZPowerD {
                d: positive(params[0])?,
            }
        }
        "free" => {
            count(1)?;
            GroupKind::FreeGroup {
                rank: positive(params[0])?,
            }
        }
        "dinf" => {
            count(0)?;
            GroupKind::DihedralInfinite
        }
        "heis" => {
            count(0)?;
            GroupKind::Heisenberg
        }
        "lamplighter" => {
            count(0)?;
            GroupKind::LamplighterZ2
        }
        other => return Err(Error::UnknownKind(other.to_string())),
    };
    Ok(GroupHandle::new(kind))
}

impl FromStr for GroupHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(GroupHandle::new(s.parse()?))
    }
}

impl GroupHandle {
    /// The group with its standard generating set.
    pub fn new(kind: GroupKind) -> GroupHandle {
        let generators: Vec<Element> = match kind {
            GroupKind::ZPowerD { d } => (0..d)
                .flat_map(|i| {
                    [1, -1].map(|sign| {
                        let mut v = vec![0; d];
                        v[i] = sign;
                        Element::Vector(v)
                    })
                })
                .collect(),
            GroupKind::FreeGroup { rank } => (1..=rank as i32)
                .flat_map(|i| [Element::Word(vec![i]), Element::Word(vec![-i])])
                .collect(),
            // x and y = xa, both involutions.
            GroupKind::DihedralInfinite => vec![
                Element::Dihedral { shift: 0, flip: true },
                Element::Dihedral { shift: -1, flip: true },
            ],
            GroupKind::Heisenberg => vec![
                Element::Heisenberg { a: 1, b: 0, c: 0 },
                Element::Heisenberg { a: -1, b: 0, c: 0 },
                Element::Heisenberg { a: 0, b: 1, c: 0 },
                Element::Heisenberg { a: 0, b: -1, c: 0 },
            ],
            GroupKind::LamplighterZ2 => {
                let t = Element::lamplighter(1, []);
                let t_inv = Element::lamplighter(-1, []);
                let s = Element::lamplighter(0, [0]);
                let m = |a: &Element, b: &Element| lamp_mul(a, b);
                vec![
                    t.clone(),
                    t_inv.clone(),
                    m(&s, &t),
                    m(&s, &t_inv),
                    m(&t, &s),
                    m(&t_inv, &s),
                    m(&m(&s, &t), &s),
                    m(&m(&s, &t_inv), &s),
                ]
            }
        };
        GroupHandle {
            kind,
            generators: generators.into(),
        }
    }

    /// A built-in group with a caller-chosen generating set, validated.
    pub fn with_generators(kind: GroupKind, generators: Vec<Element>) -> Result<GroupHandle> {
        let handle = GroupHandle {
            kind,
            generators: generators.into(),
        };
        for s in handle.generators.iter() {
            handle.check_element(s)?;
        }
        check_generator_list(&handle, &handle.generators)?;
        Ok(handle)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Rejects elements that are not canonical forms of this group.
    pub fn check_element(&self, a: &Element) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedElement(msg));
        match (self.kind, a) {
            (GroupKind::ZPowerD { d }, Element::Vector(v)) => {
                if v.len() != d {
                    return bad(format!("expected a vector of length {d}, got {}", v.len()));
                }
            }
            (GroupKind::FreeGroup { rank }, Element::Word(w)) => {
                if let Some(l) = w.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > rank) {
                    return bad(format!("letter {l} outside rank {rank}"));
                }
                if w.windows(2).any(|p| p[0] == -p[1]) {
                    return bad("word is not freely reduced".into());
                }
            }
            (GroupKind::DihedralInfinite, Element::Dihedral { .. }) => {}
            (GroupKind::Heisenberg, Element::Heisenberg { .. }) => {}
            (GroupKind::LamplighterZ2, Element::Lamplighter { lamps, .. }) => {
                if lamps.windows(2).any(|p| p[0] >= p[1]) {
                    return bad("lamp set not sorted or has duplicates".into());
                }
            }
            (kind, a) => return bad(format!("{a:?} is not an element of {}", kind.descriptor())),
        }
        Ok(())
    }

    pub fn op_mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.mul(a, b))
    }

    pub fn op_inv(&self, a: &Element) -> Result<Element> {
        self.check_element(a)?;
        Ok(self.inv(a))
    }

    pub fn op_key(&self, a: &Element) -> Vec<u8> {
        a.key()
    }
}

impl fmt::Display for GroupHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind.descriptor())
    }
}

fn lamp_mul(a: &Element, b: &Element) -> Element {
    match (a, b) {
        (Element::Lamplighter { position: p, lamps: l }, Element::Lamplighter { position: q, lamps: m }) => {
            Element::Lamplighter {
                position: p + q,
                lamps: symmetric_difference(l, m.iter().map(|x| x + p)),
            }
        }
        _ => unreachable!("lamp_mul on non-lamplighter elements"),
    }
}

/// Symmetric difference of two sorted sequences, kept sorted.
fn symmetric_difference(a: &[i64], b: impl Iterator<Item = i64>) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len());
    let mut a = a.iter().copied().peekable();
    let mut b = b.peekable();
    loop {
        match (a.peek(), b.peek()) {
            (Some(&x), Some(&y)) if x == y => {
                a.next();
                b.next();
            }
            (Some(&x), Some(&y)) if x < y => {
                out.push(x);
                a.next();
            }
            (Some(_), Some(&y)) => {
                out.push(y);
                b.next();
            }
            (Some(&x), None) => {
                out.push(x);
                a.next();
            }
            (None, Some(&y)) => {
                out.push(y);
                b.next();
            }
            (None, None) => return out,
        }
    }
}

fn mismatch(kind: GroupKind, a: &Element, b: &Element) -> ! {
    panic!("elements {a:?}, {b:?} do not belong to {}", kind.descriptor())
}

impl Group for GroupHandle {
    type Element = Element;

    fn identity(&self) -> Element {
        match self.kind {
            GroupKind::ZPowerD { d } => Element::Vector(vec![0; d]),
            GroupKind::FreeGroup { .. } => Element::Word(Vec::new()),
            GroupKind::DihedralInfinite => Element::Dihedral { shift: 0, flip: false },
            GroupKind::Heisenberg => Element::Heisenberg { a: 0, b: 0, c: 0 },
            GroupKind::LamplighterZ2 => Element::Lamplighter {
                position: 0,
                lamps: Vec::new(),
            },
        }
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        match (a, b) {
            (Element::Vector(x), Element::Vector(y)) => Element::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            (Element::Word(x), Element::Word(y)) => {
                let mut cancel = 0;
                while cancel < x.len().min(y.len()) && x[x.len() - 1 - cancel] == -y[cancel] {
                    cancel += 1;
                }
                let mut w = Vec::with_capacity(x.len() + y.len() - 2 * cancel);
                w.extend_from_slice(&x[..x.len() - cancel]);
                w.extend_from_slice(&y[cancel..]);
                Element::Word(w)
            }
            // a^n x^e · a^m x^f = a^(n + (-1)^e m) x^(e + f)
            (Element::Dihedral { shift: n, flip: e }, Element::Dihedral { shift: m, flip: f }) => Element::Dihedral {
                shift: if *e { n - m } else { n + m },
                flip: e ^ f,
            },
            (Element::Heisenberg { a: a1, b: b1, c: c1 }, Element::Heisenberg { a: a2, b: b2, c: c2 }) => {
                Element::Heisenberg {
                    a: a1 + a2,
                    b: b1 + b2,
                    c: c1 + c2 + a1 * b2,
                }
            }
            (Element::Lamplighter { .. }, Element::Lamplighter { .. }) => lamp_mul(a, b),
            _ => mismatch(self.kind, a, b),
        }
    }

    fn inv(&self, a: &Element) -> Element {
        match a {
            Element::Vector(x) => Element::Vector(x.iter().map(|p| -p).collect()),
            Element::Word(w) => Element::Word(w.iter().rev().map(|l| -l).collect()),
            Element::Dihedral { shift, flip: true } => Element::Dihedral {
                shift: *shift,
                flip: true,
            },
            Element::Dihedral { shift, flip: false } => Element::Dihedral {
                shift: -shift,
                flip: false,
            },
            Element::Heisenberg { a, b, c } => Element::Heisenberg {
                a: -a,
                b: -b,
                c: a * b - c,
            },
            Element::Lamplighter { position, lamps } => Element::Lamplighter {
                position: -position,
                lamps: lamps.iter().map(|x| x - position).collect(),
            },
        }
    }

    fn generators(&self) -> &[Element] {
        &self.generators
    }

    fn key(&self, a: &Element) -> Vec<u8> {
        a.key()
    }

    fn name(&self) -> String {
        self.kind.descriptor()
    }

    fn structure(&self) -> Structure {
        let (amenability, growth) = match self.kind {
            GroupKind::ZPowerD { d } => (Amenability::Amenable, GrowthType::Polynomial { degree: d as u32 }),
            GroupKind::FreeGroup { rank: 1 } => (Amenability::Amenable, GrowthType::Polynomial { degree: 1 }),
            GroupKind::FreeGroup { .. } => (Amenability::NonAmenable, GrowthType::Exponential),
            GroupKind::DihedralInfinite => (Amenability::Amenable, GrowthType::Polynomial { degree: 1 }),
            GroupKind::Heisenberg => (Amenability::Amenable, GrowthType::Polynomial { degree: 4 }),
            GroupKind::LamplighterZ2 => (Amenability::Amenable, GrowthType::Exponential),
        };
        Structure { amenability, growth }
    }

    /// Reduced words: state 0 is the start, state `j + 1` means "last letter
    /// was generator `j`", and generator `j` may not be followed by its inverse.
    fn geodesic_automaton(&self) -> Option<WordAutomaton> {
        let GroupKind::FreeGroup { rank } = self.kind else {
            return None;
        };
        // Generators come in pairs (a_i, a_i^-1) at positions 2i, 2i + 1.
        let k = 2 * rank;
        let inverse = |j: usize| j ^ 1;
        let mut transitions = vec![(1..=k).collect::<Vec<_>>()];
        for last in 0..k {
            transitions.push((0..k).filter(|&j| j != inverse(last)).map(|j| j + 1).collect());
        }
        Some(WordAutomaton { start: 0, transitions })
    }
}

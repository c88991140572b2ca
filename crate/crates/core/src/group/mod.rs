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

//! Finitely generated groups with a fixed symmetric generating set.
//!
//! [`Group`] is the interface every other module is written against.
//! [`GroupHandle`] implements it for the built-in groups: `Z^d`, free groups,
//! the infinite dihedral group, the discrete Heisenberg group and the
//! lamplighter group `Z/2 ≀ Z` with its switch-walk-switch generators.

mod element;
mod handle;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

pub use element::Element;
pub use handle::{make_group, GroupHandle, GroupKind};

/// A group together with an ordered symmetric generating set `S`.
///
/// Elements must be in canonical form, so that `==` is equality in the group.
/// The generator order is fixed and drives every deterministic tie-break
/// downstream.
pub trait Group: Clone + Send + Sync {
    type Element: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn identity(&self) -> Self::Element;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inv(&self, a: &Self::Element) -> Self::Element;
    fn generators(&self) -> &[Self::Element];
    /// Injective, run-stable byte encoding of an element.
    fn key(&self, a: &Self::Element) -> Vec<u8>;
    fn name(&self) -> String;

    /// Externally known structural facts. Never derived from computation.
    fn structure(&self) -> Structure {
        Structure::default()
    }

    /// A finite automaton whose accepted words of length `r` are in bijection
    /// with the sphere of radius `r`, when the group has one built in.
    fn geodesic_automaton(&self) -> Option<WordAutomaton> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Amenability {
    Amenable,
    NonAmenable,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthType {
    Polynomial {
        degree: u32,
    },
    Exponential,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Structure {
    pub amenability: Amenability,
    pub growth: GrowthType,
}

/// Deterministic automaton over the generator alphabet; every state accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAutomaton {
    pub start: usize,
    /// `transitions[q]` lists the target state of every letter readable from `q`.
    pub transitions: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorReport {
    pub size: usize,
    pub symmetric: bool,
    pub contains_identity: bool,
    pub duplicates: bool,
}

/// Confirms that `S` is closed under inversion, avoids `e` and has no repeats.
pub fn validate_generators<G: Group>(g: &G) -> Result<GeneratorReport> {
    check_generator_list(g, g.generators())
}

pub(crate) fn check_generator_list<G: Group>(g: &G, gens: &[G::Element]) -> Result<GeneratorReport> {
    let e = g.identity();
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    for (i, s) in gens.iter().enumerate() {
        if *s == e {
            return Err(Error::ContainsIdentity(i));
        }
        if let Some(j) = seen.insert(g.key(s), i) {
            return Err(Error::Duplicate(j, i));
        }
    }
    for (i, s) in gens.iter().enumerate() {
        if !seen.contains_key(&g.key(&g.inv(s))) {
            return Err(Error::NotSymmetric(i));
        }
    }
    Ok(GeneratorReport {
        size: gens.len(),
        symmetric: true,
        contains_identity: false,
        duplicates: false,
    })
}

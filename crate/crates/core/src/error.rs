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

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown group kind `{0}`")]
    UnknownKind(String),
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    #[error("malformed element: {0}")]
    MalformedElement(String),
    #[error("generating set is not symmetric: inverse of generator {0} is missing")]
    NotSymmetric(usize),
    #[error("generating set contains the identity at position {0}")]
    ContainsIdentity(usize),
    #[error("generating set contains a duplicate at positions {0} and {1}")]
    Duplicate(usize, usize),
    #[error("memory budget of {budget} elements exceeded; last completed radius {last_complete_radius}")]
    MemoryBudgetExceeded { budget: usize, last_complete_radius: u32 },
    #[error("count overflow at radius {0}")]
    CountOverflow(u32),
    #[error("radius {radius} is outside the table horizon {horizon}")]
    RadiusOutOfRange { radius: u32, horizon: u32 },
    #[error("ball horizon {horizon} too small: b_{horizon} = {ball} does not exceed the requested volume")]
    HorizonExceeded { horizon: u32, ball: u64 },
    #[error("subset is empty")]
    EmptySet,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("no exit point found for x = {x} along g = {g}")]
    ExitNotFound { x: String, g: String },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("no candidate family for group `{0}`")]
    NoFamilyForKind(String),
    #[error("generating set is empty")]
    EmptyGeneratingSet,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

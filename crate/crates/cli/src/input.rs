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

use anyhow::{anyhow, bail, Context, Result};
use cayley_core::group::{Element, GroupHandle, GroupKind};
use cayley_core::isoperimetry::FiniteSubset;

use crate::OmegaArgs;

pub fn group(descriptor: Option<&str>) -> Result<GroupHandle> {
    let descriptor = descriptor.ok_or_else(|| anyhow!("--group is required"))?;
    Ok(descriptor.parse()?)
}

pub fn omega(g: &GroupHandle, args: &OmegaArgs) -> Result<FiniteSubset<GroupHandle>> {
    let elements = match (&args.omega, &args.omega_file) {
        (Some(range), None) => range_elements(g, range)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            key_elements(g, &text)?
        }
        _ => bail!("give the set with --omega a..b or --omega-file"),
    };
    if elements.is_empty() {
        bail!("the set is empty");
    }
    Ok(FiniteSubset::new(g, elements))
}

/// `a..b`, both ends included.
fn range_elements(g: &GroupHandle, text: &str) -> Result<Vec<Element>> {
    if g.kind() != (GroupKind::ZPowerD { d: 1 }) {
        bail!("--omega ranges are only for z:1; use --omega-file for {g}");
    }
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| anyhow!("expected a range a..b, got `{text}`"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .with_context(|| format!("bad range start in `{text}`"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad range end in `{text}`"))?;
    if lo > hi {
        bail!("empty range `{text}`");
    }
    Ok((lo..=hi).map(|x| Element::Vector(vec![x])).collect())
}

/// One hex-encoded canonical key per line; blank lines and `#` comments
/// are skipped.
fn key_elements(g: &GroupHandle, text: &str) -> Result<Vec<Element>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bytes = hex::decode(line).with_context(|| format!("line {}: not hex", i + 1))?;
        let x = Element::from_key(&bytes).with_context(|| format!("line {}", i + 1))?;
        g.check_element(&x).with_context(|| format!("line {}", i + 1))?;
        out.push(x);
    }
    Ok(out)
}

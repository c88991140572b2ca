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

use crate::error::{Error, Result};

const TAG_VECTOR: u8 = 0;
const TAG_WORD: u8 = 1;
const TAG_DIHEDRAL: u8 = 2;
const TAG_HEISENBERG: u8 = 3;
const TAG_LAMPLIGHTER: u8 = 4;

/// Canonical form of an element of one of the built-in groups.
///
/// Every variant is a normal form: two values compare equal exactly when they
/// denote the same group element, so the derived `Hash`/`Eq` can be used for
/// deduplication directly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    /// A vector in `Z^d`.
    Vector(Vec<i64>),
    /// A freely reduced word; letter `i > 0` is the `i`-th free generator and
    /// `-i` its inverse.
    Word(Vec<i32>),
    /// `a^shift x^flip` in the infinite dihedral group.
    Dihedral { shift: i64, flip: bool },
    /// The unitriangular matrix `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
    Heisenberg { a: i64, b: i64, c: i64 },
    /// Walker position and the (sorted, duplicate-free) set of lit lamps.
    Lamplighter { position: i64, lamps: Vec<i64> },
}

impl Element {
    /// Builds a lamplighter element from lamps given in any order.
    pub fn lamplighter(position: i64, lamps: impl IntoIterator<Item = i64>) -> Element {
        let mut lamps: Vec<i64> = lamps.into_iter().collect();
        lamps.sort_unstable();
        lamps.dedup();
        Element::Lamplighter { position, lamps }
    }

    /// Fixed-endianness byte encoding. Injective on canonical forms.
    pub fn key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16);
        match self {
            Element::Vector(v) => {
                out.push(TAG_VECTOR);
                out.extend_from_slice(&(v.len() as u32).to_be_bytes());
                for x in v {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
            Element::Word(w) => {
                out.push(TAG_WORD);
                out.extend_from_slice(&(w.len() as u32).to_be_bytes());
                for x in w {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
            Element::Dihedral { shift, flip } => {
                out.push(TAG_DIHEDRAL);
                out.extend_from_slice(&shift.to_be_bytes());
                out.push(*flip as u8);
            }
            Element::Heisenberg { a, b, c } => {
                out.push(TAG_HEISENBERG);
                for x in [a, b, c] {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
            Element::Lamplighter { position, lamps } => {
                out.push(TAG_LAMPLIGHTER);
                out.extend_from_slice(&position.to_be_bytes());
                out.extend_from_slice(&(lamps.len() as u32).to_be_bytes());
                for x in lamps {
                    out.extend_from_slice(&x.to_be_bytes());
                }
            }
        }
        out
    }

    /// Inverse of [`Element::key`]. Rejects trailing bytes and non-canonical payloads.
    pub fn from_key(bytes: &[u8]) -> Result<Element> {
        let mut r = Reader { bytes, pos: 0 };
        let element = match r.u8()? {
            TAG_VECTOR => {
                let n = r.u32()? as usize;
                Element::Vector((0..n).map(|_| r.i64()).collect::<Result<_>>()?)
            }
            TAG_WORD => {
                let n = r.u32()? as usize;
                Element::Word((0..n).map(|_| r.i32()).collect::<Result<_>>()?)
            }
            TAG_DIHEDRAL => {
                let shift = r.i64()?;
                let flip = match r.u8()? {
                    0 => false,
                    1 => true,
                    other => return Err(malformed(format!("flip byte {other}"))),
                };
                Element::Dihedral { shift, flip }
            }
            TAG_HEISENBERG => Element::Heisenberg {
                a: r.i64()?,
                b: r.i64()?,
                c: r.i64()?,
            },
            TAG_LAMPLIGHTER => {
                let position = r.i64()?;
                let n = r.u32()? as usize;
                let lamps: Vec<i64> = (0..n).map(|_| r.i64()).collect::<Result<_>>()?;
                if lamps.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(malformed("lamp set not strictly increasing".into()));
                }
                Element::Lamplighter { position, lamps }
            }
            tag => return Err(malformed(format!("unknown tag {tag}"))),
        };
        if r.pos != bytes.len() {
            return Err(malformed("trailing bytes after element".into()));
        }
        Ok(element)
    }
}

fn malformed(msg: String) -> Error {
    Error::MalformedElement(msg)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| malformed("truncated key".into()))?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice length checked"))
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take()?))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_be_bytes(self.take()?))
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_be_bytes(self.take()?))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vector(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Element::Word(w) if w.is_empty() => write!(f, "e"),
            Element::Word(w) => {
                for &letter in w {
                    let base = letter.unsigned_abs() - 1;
                    let name = if base < 26 {
                        char::from(b'a' + base as u8).to_string()
                    } else {
                        format!("g{}", base + 1)
                    };
                    if letter > 0 {
                        write!(f, "{name}")?;
                    } else {
                        write!(f, "{name}⁻¹")?;
                    }
                }
                Ok(())
            }
            Element::Dihedral { shift, flip } => match (shift, flip) {
                (0, false) => write!(f, "e"),
                (0, true) => write!(f, "x"),
                (n, false) => write!(f, "a^{n}"),
                (n, true) => write!(f, "a^{n}x"),
            },
            Element::Heisenberg { a, b, c } => write!(f, "({a},{b},{c})"),
            Element::Lamplighter { position, lamps } => {
                let parts: Vec<String> = lamps.iter().map(|x| x.to_string()).collect();
                write!(f, "({position};{{{}}})", parts.join(","))
            }
        }
    }
}

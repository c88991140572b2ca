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

//! Enumeration of the connected subsets of a Cayley graph that contain `e`.
//!
//! This is Redelmeier's polyomino algorithm run on the ball table: a set is
//! grown one adjacent vertex at a time from an "untried" frontier, and a
//! vertex stays marked once it has entered the frontier so that each set is
//! produced exactly once. Sets of size `k` containing `e` lie in `B(k - 1)`,
//! so a table of radius `k - 1` is enough.

use rayon::prelude::*;

use crate::ball::{BallTable, OUTSIDE};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::isoperimetry::FiniteSubset;

/// Poly size at which the search tree is cut into independent tasks.
const SPLIT_DEPTH: usize = 3;

/// Per-worker membership flags, indexed by table id.
pub(crate) struct Scratch {
    in_set: Vec<bool>,
    marked: Vec<bool>,
    set: Vec<u32>,
}

impl Scratch {
    fn new(len: usize) -> Scratch {
        Scratch {
            in_set: vec![false; len],
            marked: vec![false; len],
            set: Vec::new(),
        }
    }

    /// Number of members with a neighbor outside the current set.
    pub(crate) fn boundary_len<G: Group>(&self, table: &BallTable<G>) -> usize {
        self.set
            .iter()
            .filter(|&&x| {
                table
                    .neighbors(x)
                    .iter()
                    .any(|&y| y == OUTSIDE || !self.in_set[y as usize])
            })
            .count()
    }

    pub(crate) fn members(&self) -> &[u32] {
        &self.set
    }
}

struct Task {
    set: Vec<u32>,
    untried: Vec<u32>,
    marked: Vec<u32>,
}

/// Runs the enumeration of connected sets containing `e` with at most
/// `max_size` elements, calling `visit` once per set.
pub(crate) struct Enumerator<'a, G: Group> {
    table: &'a BallTable<G>,
    max_size: usize,
}

impl<'a, G: Group> Enumerator<'a, G> {
    pub(crate) fn new(table: &'a BallTable<G>, max_size: usize) -> Result<Enumerator<'a, G>> {
        if max_size == 0 {
            return Err(Error::BadParams("max_size must be ≥ 1".into()));
        }
        if (table.max_radius() as usize) + 1 < max_size && !table.counts().is_exhausted() {
            return Err(Error::HorizonExceeded {
                horizon: table.max_radius(),
                ball: table.len() as u64,
            });
        }
        Ok(Enumerator { table, max_size })
    }

    fn grow<F: FnMut(&Scratch)>(&self, sc: &mut Scratch, untried: &mut Vec<u32>, visit: &mut F) {
        while let Some(v) = untried.pop() {
            sc.set.push(v);
            sc.in_set[v as usize] = true;
            visit(sc);
            if sc.set.len() < self.max_size {
                let mut next = untried.clone();
                let newly = self.extend_frontier(sc, v, &mut next);
                self.grow(sc, &mut next, visit);
                for w in newly {
                    sc.marked[w as usize] = false;
                }
            }
            sc.set.pop();
            sc.in_set[v as usize] = false;
        }
    }

    fn extend_frontier(&self, sc: &mut Scratch, v: u32, untried: &mut Vec<u32>) -> Vec<u32> {
        let mut newly = Vec::new();
        // Reverse so that the lowest generator index is popped first.
        for &w in self.table.neighbors(v).iter().rev() {
            if w != OUTSIDE && !sc.marked[w as usize] {
                sc.marked[w as usize] = true;
                newly.push(w);
                untried.push(w);
            }
        }
        newly
    }

    /// Sequential enumeration.
    pub(crate) fn for_each<F: FnMut(&Scratch)>(&self, mut visit: F) {
        let mut sc = Scratch::new(self.table.len());
        sc.marked[0] = true;
        self.grow(&mut sc, &mut vec![0], &mut visit);
    }

    /// Collects the search-tree nodes at depth [`SPLIT_DEPTH`] as tasks and
    /// visits shallower nodes directly.
    fn split<F: FnMut(&Scratch)>(
        &self,
        sc: &mut Scratch,
        untried: &mut Vec<u32>,
        tasks: &mut Vec<Task>,
        visit: &mut F,
    ) {
        while let Some(v) = untried.pop() {
            sc.set.push(v);
            sc.in_set[v as usize] = true;
            if sc.set.len() == SPLIT_DEPTH {
                let mut next = untried.clone();
                let newly = if sc.set.len() < self.max_size {
                    self.extend_frontier(sc, v, &mut next)
                } else {
                    next.clear();
                    Vec::new()
                };
                let marked = (0..sc.marked.len() as u32).filter(|&i| sc.marked[i as usize]).collect();
                tasks.push(Task {
                    set: sc.set.clone(),
                    untried: next,
                    marked,
                });
                for w in newly {
                    sc.marked[w as usize] = false;
                }
            } else {
                visit(sc);
                if sc.set.len() < self.max_size {
                    let mut next = untried.clone();
                    let newly = self.extend_frontier(sc, v, &mut next);
                    self.split(sc, &mut next, tasks, visit);
                    for w in newly {
                        sc.marked[w as usize] = false;
                    }
                }
            }
            sc.set.pop();
            sc.in_set[v as usize] = false;
        }
    }

    /// Parallel fold over all sets. Each task folds into its own accumulator;
    /// accumulators are combined in task order, so the result does not depend
    /// on the number of threads.
    pub(crate) fn fold<T, I, V, R>(&self, init: I, visit: V, reduce: R) -> T
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &Scratch) + Sync,
        R: Fn(T, T) -> T,
    {
        let mut head = init();
        let mut tasks = Vec::new();
        {
            let mut sc = Scratch::new(self.table.len());
            sc.marked[0] = true;
            self.split(&mut sc, &mut vec![0], &mut tasks, &mut |sc| visit(&mut head, sc));
        }
        let n = self.table.len();
        let parts: Vec<T> = tasks
            .par_iter()
            .map_init(
                || Scratch::new(n),
                |sc, task| {
                    let mut acc = init();
                    for &m in &task.marked {
                        sc.marked[m as usize] = true;
                    }
                    for &x in &task.set {
                        sc.in_set[x as usize] = true;
                    }
                    sc.set.clone_from(&task.set);
                    visit(&mut acc, sc);
                    self.grow(sc, &mut task.untried.clone(), &mut |s| visit(&mut acc, s));
                    for &m in &task.marked {
                        sc.marked[m as usize] = false;
                    }
                    for &x in &task.set {
                        sc.in_set[x as usize] = false;
                    }
                    sc.set.clear();
                    acc
                },
            )
            .collect();
        parts.into_iter().fold(head, reduce)
    }
}

/// Connected subsets containing `e`, in canonical order: by cardinality, then
/// by the sorted list of element keys.
pub struct ConnectedSubsets<G: Group> {
    table: BallTable<G>,
    max_size: usize,
    size: usize,
    level: std::vec::IntoIter<FiniteSubset<G>>,
}

impl<G: Group> ConnectedSubsets<G> {
    fn load_level(&mut self, size: usize) {
        let enumerator = Enumerator::new(&self.table, size).expect("table radius checked at construction");
        let mut level: Vec<(Vec<Vec<u8>>, Vec<u32>)> = Vec::new();
        let group = self.table.group();
        enumerator.for_each(|sc| {
            if sc.members().len() == size {
                let mut keys: Vec<Vec<u8>> = sc
                    .members()
                    .iter()
                    .map(|&id| group.key(self.table.element(id)))
                    .collect();
                keys.sort();
                level.push((keys, sc.members().to_vec()));
            }
        });
        level.sort();
        let sets: Vec<FiniteSubset<G>> = level
            .into_iter()
            .map(|(_, ids)| FiniteSubset::new(group, ids.iter().map(|&id| self.table.element(id).clone())))
            .collect();
        self.level = sets.into_iter();
    }
}

impl<G: Group> Iterator for ConnectedSubsets<G> {
    type Item = FiniteSubset<G>;

    fn next(&mut self) -> Option<FiniteSubset<G>> {
        loop {
            if let Some(set) = self.level.next() {
                return Some(set);
            }
            if self.size >= self.max_size {
                return None;
            }
            self.size += 1;
            let size = self.size;
            self.load_level(size);
        }
    }
}

/// Every connected subset containing `e` with at most `max_size` elements,
/// exactly once, in canonical order.
pub fn connected_subset_enum<G: Group>(g: &G, max_size: usize, budget: usize) -> Result<ConnectedSubsets<G>> {
    if max_size == 0 {
        return Err(Error::BadParams("max_size must be ≥ 1".into()));
    }
    let table = BallTable::build(g, (max_size - 1) as u32, budget)?;
    Ok(ConnectedSubsets {
        table,
        max_size,
        size: 0,
        level: Vec::new().into_iter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{enumerate_ball, DEFAULT_MEMORY_BUDGET};
    use crate::group::{Element, GroupHandle};
    use std::collections::BTreeSet;

    fn z_sets(max: usize) -> Vec<Vec<i64>> {
        let g: GroupHandle = "z:1".parse().unwrap();
        connected_subset_enum(&g, max, DEFAULT_MEMORY_BUDGET)
            .unwrap()
            .map(|s| {
                s.iter()
                    .map(|e| match e {
                        Element::Vector(v) => v[0],
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn z_up_to_three() {
        assert_eq!(
            z_sets(3),
            vec![
                vec![0],
                vec![0, 1],
                vec![-1, 0],
                vec![0, 1, 2],
                vec![-1, 0, 1],
                vec![-2, -1, 0]
            ]
        );
        assert_eq!(z_sets(1), vec![vec![0]]);
    }

    #[test]
    fn z2_pairs() {
        let g: GroupHandle = "z:2".parse().unwrap();
        let sets: Vec<_> = connected_subset_enum(&g, 2, DEFAULT_MEMORY_BUDGET).unwrap().collect();
        assert_eq!(sets.len(), 5);
        assert!(sets.iter().all(|s| s.contains(&g.identity())));
    }

    /// Fixed polyomino counts: connected sets of size n containing the origin
    /// number n times the fixed polyominoes of size n (1, 2, 6, 19, 63).
    #[test]
    fn z2_matches_polyomino_counts() {
        let g: GroupHandle = "z:2".parse().unwrap();
        let table = enumerate_ball(&g, 4).unwrap();
        let mut by_size = [0u64; 6];
        Enumerator::new(&table, 5)
            .unwrap()
            .for_each(|sc| by_size[sc.members().len()] += 1);
        assert_eq!(by_size[1..], [1, 4, 18, 76, 315]);
    }

    #[test]
    fn parallel_fold_matches_sequential() {
        let g: GroupHandle = "lamplighter".parse().unwrap();
        let table = enumerate_ball(&g, 4).unwrap();
        let e = Enumerator::new(&table, 5).unwrap();
        let mut seq: Vec<Vec<u32>> = Vec::new();
        e.for_each(|sc| {
            let mut m = sc.members().to_vec();
            m.sort();
            seq.push(m);
        });
        let par = e.fold(
            Vec::new,
            |acc: &mut Vec<Vec<u32>>, sc| {
                let mut m = sc.members().to_vec();
                m.sort();
                acc.push(m);
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        assert_eq!(seq.len(), par.len());
        let seq_set: BTreeSet<_> = seq.into_iter().collect();
        let par_set: BTreeSet<_> = par.into_iter().collect();
        assert_eq!(seq_set.len(), par_set.len());
        assert_eq!(seq_set, par_set);
    }

    #[test]
    fn rejects_short_table() {
        let g: GroupHandle = "z:1".parse().unwrap();
        let table = enumerate_ball(&g, 2).unwrap();
        assert!(Enumerator::new(&table, 5).is_err());
        assert!(connected_subset_enum(&g, 0, 10).is_err());
    }
}

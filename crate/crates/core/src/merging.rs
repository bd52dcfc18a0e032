//! Mergings: edges that two paths enter through different predecessor edges.
//!
//! A path that starts on an edge has no predecessor there, so path starts never
//! create mergings.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId, Path};
use crate::menger::PathSystem;

/// A path inside a collection of systems: `(system index, path index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PathRef {
    pub system: usize,
    pub path: usize,
}

impl PathRef {
    pub fn new(system: usize, path: usize) -> PathRef {
        PathRef { system, path }
    }
}

/// The maximal run shared by two paths from one of their mergings onward.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MergedSubpath {
    pub owner_a: PathRef,
    pub owner_b: PathRef,
    pub merge_edge: EdgeId,
    pub run: Path,
}

impl MergedSubpath {
    pub fn last_edge(&self) -> EdgeId {
        *self.run.edges().last().expect("a merged run holds its merging edge")
    }
}

/// Every edge entered by two of `paths` through distinct predecessor edges.
pub fn merging_edges<'p>(paths: impl IntoIterator<Item = &'p Path>) -> BTreeSet<EdgeId> {
    let mut preds: BTreeMap<EdgeId, BTreeSet<EdgeId>> = BTreeMap::new();
    for p in paths {
        for w in p.edges().windows(2) {
            preds.entry(w[1]).or_default().insert(w[0]);
        }
    }
    preds.into_iter().filter(|(_, s)| s.len() >= 2).map(|(e, _)| e).collect()
}

/// Distinct merging edges over the union of all paths of all systems.
pub fn count_mergings(systems: &[PathSystem]) -> usize {
    merging_edges(systems.iter().flat_map(|s| s.paths())).len()
}

/// Distinct merging edges between the paths of two systems.
pub fn pairwise_merge_count(a: &PathSystem, b: &PathSystem) -> usize {
    merging_edges(a.paths().iter().chain(b.paths())).len()
}

/// The merged subpath of `pa` and `pb` starting at `e`.
pub fn merged_subpath(g: &Dag, owner_a: PathRef, pa: &Path, owner_b: PathRef, pb: &Path, e: EdgeId) -> Result<MergedSubpath> {
    let not_merge = || Error::NotAMerge(g.edge_name(e).to_string());
    let i = pa.edge_position(e).ok_or_else(not_merge)?;
    let j = pb.edge_position(e).ok_or_else(not_merge)?;
    match (pa.predecessor(i), pb.predecessor(j)) {
        (Some(f), Some(h)) if f != h => {}
        _ => return Err(not_merge()),
    }
    let shared = pa.edges()[i..].iter().zip(&pb.edges()[j..]).take_while(|(x, y)| x == y).count();
    Ok(MergedSubpath { owner_a, owner_b, merge_edge: e, run: pa.slice(g, i, i + shared) })
}

/// All merged subpaths between a path of `a` and a path of `b`, in topological
/// order of their merging edges.
pub fn pairwise_merged_subpaths(g: &Dag, a: &PathSystem, b: &PathSystem) -> Vec<MergedSubpath> {
    let mut out = Vec::new();
    let (ia, ib) = (a.pair().index, b.pair().index);
    for (ka, pa) in a.paths().iter().enumerate() {
        let pos: HashMap<EdgeId, usize> = pa.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
        for (kb, pb) in b.paths().iter().enumerate() {
            for (j, &e) in pb.edges().iter().enumerate() {
                let Some(&i) = pos.get(&e) else { continue };
                if let (Some(f), Some(h)) = (pa.predecessor(i), pb.predecessor(j)) {
                    if f != h {
                        out.push(
                            merged_subpath(g, PathRef::new(ia, ka), pa, PathRef::new(ib, kb), pb, e)
                                .expect("distinct predecessors make a merging"),
                        );
                    }
                }
            }
        }
    }
    out.sort_by_key(|m| (g.edge_order_key(m.merge_edge), m.owner_a, m.owner_b));
    out
}

/// Incremental merging count over a multiset of paths.
#[derive(Clone, Debug)]
pub struct MergeCounter {
    // per edge: distinct predecessor edges with multiplicities
    preds: Vec<Vec<(EdgeId, u32)>>,
    merged: usize,
}

impl MergeCounter {
    pub fn new(edge_count: usize) -> MergeCounter {
        MergeCounter { preds: vec![Vec::new(); edge_count], merged: 0 }
    }

    pub fn add(&mut self, p: &Path) {
        for w in p.edges().windows(2) {
            let list = &mut self.preds[w[1].index()];
            match list.iter_mut().find(|(f, _)| *f == w[0]) {
                Some(slot) => slot.1 += 1,
                None => {
                    list.push((w[0], 1));
                    if list.len() == 2 {
                        self.merged += 1;
                    }
                }
            }
        }
    }

    /// Undoes a previous [`MergeCounter::add`] of the same path.
    pub fn remove(&mut self, p: &Path) {
        for w in p.edges().windows(2) {
            let list = &mut self.preds[w[1].index()];
            let k = list.iter().position(|(f, _)| *f == w[0]).expect("removing a path that was never added");
            list[k].1 -= 1;
            if list[k].1 == 0 {
                list.swap_remove(k);
                if list.len() == 1 {
                    self.merged -= 1;
                }
            }
        }
    }

    pub fn count(&self) -> usize {
        self.merged
    }

    pub fn is_merge(&self, e: EdgeId) -> bool {
        self.preds[e.index()].len() >= 2
    }
}

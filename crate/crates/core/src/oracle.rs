//! Exact minimum merging counts by exhaustive search over path systems.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId, PairSpec, Path, VertexId};
use crate::menger::{min_cut, PathSystem};
use crate::merging::MergeCounter;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Cap on enumerated paths, systems and search nodes.
    pub budget: u64,
    /// Worker threads for the product search; 1 runs inline.
    pub jobs: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { budget: DEFAULT_BUDGET, jobs: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub value: usize,
    pub witness: Vec<PathSystem>,
    pub systems_enumerated: u64,
    pub elapsed: Duration,
}

/// All simple `s`-`t` paths, in lexicographic edge-id order.
pub fn all_paths(g: &Dag, s: VertexId, t: VertexId, budget: u64) -> Result<Vec<Path>> {
    fn go(
        g: &Dag,
        v: VertexId,
        t: VertexId,
        on_path: &mut FixedBitSet,
        acc: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
        budget: u64,
    ) -> Result<()> {
        if v == t {
            if out.len() as u64 >= budget {
                return Err(Error::BudgetExceeded(budget));
            }
            out.push(acc.clone());
            return Ok(());
        }
        on_path.insert(v.index());
        for &e in g.out_edges(v) {
            let h = g.head(e);
            if on_path.contains(h.index()) {
                continue;
            }
            acc.push(e);
            go(g, h, t, on_path, acc, out, budget)?;
            acc.pop();
        }
        on_path.set(v.index(), false);
        Ok(())
    }
    let mut raw = Vec::new();
    let mut on_path = FixedBitSet::with_capacity(g.vertex_count());
    go(g, s, t, &mut on_path, &mut Vec::new(), &mut raw, budget)?;
    raw.into_iter().map(|edges| Path::new(g, s, edges)).collect()
}

/// Every maximum set of edge-disjoint paths for `pair`, each exactly once.
pub fn enumerate_systems(g: &Dag, pair: PairSpec, budget: u64) -> Result<Vec<PathSystem>> {
    let c = min_cut(g, pair.source, pair.sink)?;
    if c == 0 {
        return Err(Error::NoPath {
            from: g.vertex_name(pair.source).to_string(),
            to: g.vertex_name(pair.sink).to_string(),
        });
    }
    let paths = all_paths(g, pair.source, pair.sink, budget)?;
    let masks: Vec<FixedBitSet> = paths
        .iter()
        .map(|p| {
            let mut m = FixedBitSet::with_capacity(g.edge_count());
            p.edges().iter().for_each(|e| m.insert(e.index()));
            m
        })
        .collect();

    struct Ctx<'a> {
        masks: &'a [FixedBitSet],
        c: usize,
        budget: u64,
        out: Vec<Vec<usize>>,
    }
    fn pick(ctx: &mut Ctx, from: usize, used: &mut FixedBitSet, chosen: &mut Vec<usize>) -> Result<()> {
        if chosen.len() == ctx.c {
            if ctx.out.len() as u64 >= ctx.budget {
                return Err(Error::BudgetExceeded(ctx.budget));
            }
            ctx.out.push(chosen.clone());
            return Ok(());
        }
        let need = ctx.c - chosen.len();
        for i in from..ctx.masks.len() {
            if ctx.masks.len() - i < need {
                break;
            }
            if !used.is_disjoint(&ctx.masks[i]) {
                continue;
            }
            used.union_with(&ctx.masks[i]);
            chosen.push(i);
            pick(ctx, i + 1, used, chosen)?;
            chosen.pop();
            used.difference_with(&ctx.masks[i]);
        }
        Ok(())
    }
    let mut ctx = Ctx { masks: &masks, c, budget, out: Vec::new() };
    pick(&mut ctx, 0, &mut FixedBitSet::with_capacity(g.edge_count()), &mut Vec::new())?;
    ctx.out
        .into_iter()
        .map(|idx| PathSystem::new(g, pair, idx.into_iter().map(|i| paths[i].clone()).collect()))
        .collect()
}

struct Search<'a> {
    edge_count: usize,
    levels: Vec<&'a [PathSystem]>,
    budget: u64,
    nodes: &'a AtomicU64,
}

impl Search<'_> {
    // First (in choice order) assignment of the levels from `depth` on whose
    // total count is below `best`, pruning partial counts above `shared`.
    fn descend(
        &self,
        depth: usize,
        counter: &mut MergeCounter,
        choice: &mut Vec<usize>,
        best: &mut (usize, Option<Vec<usize>>),
        shared: &AtomicUsize,
    ) -> Result<()> {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if depth == self.levels.len() {
            best.0 = counter.count();
            best.1 = Some(choice.clone());
            shared.fetch_min(best.0, Ordering::Relaxed);
            return Ok(());
        }
        for (i, sys) in self.levels[depth].iter().enumerate() {
            sys.paths().iter().for_each(|p| counter.add(p));
            let partial = counter.count();
            if partial < best.0 && partial <= shared.load(Ordering::Relaxed) {
                choice.push(i);
                let r = self.descend(depth + 1, counter, choice, best, shared);
                choice.pop();
                r?;
            }
            sys.paths().iter().for_each(|p| counter.remove(p));
            if best.0 == 0 {
                break;
            }
        }
        Ok(())
    }
}

/// The minimum merging count over all choices of maximum path systems.
pub fn brute_force_min(g: &Dag, pairs: &[PairSpec], config: &OracleConfig) -> Result<OracleResult> {
    search_below(g, pairs, config, usize::MAX)?.ok_or_else(|| unreachable!("an unbounded search always finds a leaf"))
}

/// Like [`brute_force_min`] but only reports optima strictly below `bound`;
/// `Ok(None)` certifies that every choice has at least `bound` mergings.
pub fn search_below(g: &Dag, pairs: &[PairSpec], config: &OracleConfig, bound: usize) -> Result<Option<OracleResult>> {
    let started = Instant::now();
    let systems = pairs
        .iter()
        .map(|&p| enumerate_systems(g, p, config.budget))
        .collect::<Result<Vec<_>>>()?;
    let enumerated = systems.iter().map(|s| s.len() as u64).sum();
    // smallest branching first; results are mapped back to pair order
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by_key(|&i| (systems[i].len(), i));
    let nodes = AtomicU64::new(0);
    let search = Search {
        edge_count: g.edge_count(),
        levels: order.iter().map(|&i| systems[i].as_slice()).collect(),
        budget: config.budget,
        nodes: &nodes,
    };
    let shared = AtomicUsize::new(bound);
    let found = if config.jobs <= 1 || search.levels.is_empty() {
        let mut best = (bound, None);
        let mut counter = MergeCounter::new(search.edge_count);
        search.descend(0, &mut counter, &mut Vec::new(), &mut best, &shared)?;
        best.1.map(|c| (best.0, c))
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidSystem(e.to_string()))?;
        let first = search.levels[0];
        let results = pool.install(|| {
            first
                .par_iter()
                .enumerate()
                .map(|(i, sys)| -> Result<Option<(usize, Vec<usize>)>> {
                    let mut counter = MergeCounter::new(search.edge_count);
                    sys.paths().iter().for_each(|p| counter.add(p));
                    if counter.count() > shared.load(Ordering::Relaxed) {
                        return Ok(None);
                    }
                    let mut best = (bound, None);
                    let mut choice = vec![i];
                    search.descend(1, &mut counter, &mut choice, &mut best, &shared)?;
                    Ok(best.1.map(|c| (best.0, c)))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        results.into_iter().flatten().min_by_key(|(v, _)| *v)
    };
    Ok(found.map(|(value, choice)| {
        let mut witness: Vec<Option<PathSystem>> = vec![None; pairs.len()];
        for (level, &i) in choice.iter().enumerate() {
            witness[order[level]] = Some(systems[order[level]][i].clone());
        }
        OracleResult {
            value,
            witness: witness.into_iter().map(|w| w.expect("every level chosen")).collect(),
            systems_enumerated: enumerated,
            elapsed: started.elapsed(),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Network;
    use crate::merging::count_mergings;

    const BUTTERFLY: &str = "source S\nsink Y\nsink Z\nedge e1 S T\nedge e2 S U\nedge e3 T Y\nedge e4 T W\nedge e5 U W\nedge e6 U Z\nedge e7 W X\nedge e8 X Y\nedge e9 X Z\n";

    fn factorial(n: usize) -> u64 {
        (1..=n as u64).product()
    }

    // Counts systems without enumerating paths: every system's union U has
    // c edges out of s, none into s, none out of t and conserves flow
    // elsewhere; U splits into exactly prod(in_U(v)!) path sets.
    fn count_by_unions(g: &Dag, s: VertexId, t: VertexId, c: usize) -> u64 {
        let m = g.edge_count();
        assert!(m <= 16);
        let mut total = 0;
        for mask in 0u32..1 << m {
            let mut inn = vec![0usize; g.vertex_count()];
            let mut out = vec![0usize; g.vertex_count()];
            for e in g.edges().filter(|e| mask & (1 << e.0) != 0) {
                out[g.tail(e).index()] += 1;
                inn[g.head(e).index()] += 1;
            }
            if out[s.index()] != c || inn[s.index()] != 0 || out[t.index()] != 0 {
                continue;
            }
            let conserved = g.vertices().filter(|&v| v != s && v != t).all(|v| inn[v.index()] == out[v.index()]);
            if conserved {
                total += g.vertices().filter(|&v| v != s && v != t).map(|v| factorial(inn[v.index()])).product::<u64>();
            }
        }
        total
    }

    #[test]
    fn trivial_counts() {
        let g = Dag::from_edges([("e", "s", "t")]).unwrap();
        let p = PairSpec { index: 0, source: g.vertex("s").unwrap(), sink: g.vertex("t").unwrap() };
        assert_eq!(enumerate_systems(&g, p, DEFAULT_BUDGET).unwrap().len(), 1);
        let g = Dag::from_edges([("a", "s", "t"), ("b", "s", "t")]).unwrap();
        let p = PairSpec { index: 0, source: g.vertex("s").unwrap(), sink: g.vertex("t").unwrap() };
        assert_eq!(enumerate_systems(&g, p, DEFAULT_BUDGET).unwrap().len(), 1);
    }

    #[test]
    fn butterfly_enumeration_matches_union_count() {
        let n = Network::parse(BUTTERFLY).unwrap();
        for pair in &n.pairs {
            let listed = enumerate_systems(&n.dag, *pair, DEFAULT_BUDGET).unwrap();
            let c = listed[0].len();
            assert_eq!(listed.len() as u64, count_by_unions(&n.dag, pair.source, pair.sink, c));
        }
    }

    #[test]
    fn union_count_on_a_denser_graph() {
        let g = Dag::from_edges([
            ("a", "s", "x"),
            ("b", "s", "y"),
            ("c", "s", "z"),
            ("d", "x", "y"),
            ("e", "x", "w"),
            ("f", "y", "w"),
            ("g", "y", "t"),
            ("h", "z", "w"),
            ("i", "w", "t"),
            ("j", "w", "t"),
            ("k", "z", "t"),
            ("l", "x", "t"),
        ])
        .unwrap();
        let (s, t) = (g.vertex("s").unwrap(), g.vertex("t").unwrap());
        let listed = enumerate_systems(&g, PairSpec { index: 0, source: s, sink: t }, DEFAULT_BUDGET).unwrap();
        assert_eq!(listed.len() as u64, count_by_unions(&g, s, t, listed[0].len()));
        assert!(listed.len() > 1);
    }

    #[test]
    fn butterfly_minimum_is_one() {
        let n = Network::parse(BUTTERFLY).unwrap();
        let r = brute_force_min(&n.dag, &n.pairs, &OracleConfig::default()).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(count_mergings(&r.witness), 1);
        let par = brute_force_min(&n.dag, &n.pairs, &OracleConfig { jobs: 3, ..Default::default() }).unwrap();
        assert_eq!(par.value, 1);
        assert_eq!(par.witness, r.witness);
    }

    #[test]
    fn budget_is_loud() {
        let n = Network::parse(BUTTERFLY).unwrap();
        let e = brute_force_min(&n.dag, &n.pairs, &OracleConfig { budget: 1, jobs: 1 }).unwrap_err();
        assert_eq!(e, Error::BudgetExceeded(1));
    }

    #[test]
    fn search_below_certifies_lower_bounds() {
        let n = Network::parse(BUTTERFLY).unwrap();
        assert!(search_below(&n.dag, &n.pairs, &OracleConfig::default(), 1).unwrap().is_none());
        assert!(search_below(&n.dag, &n.pairs, &OracleConfig::default(), 2).unwrap().is_some());
    }
}

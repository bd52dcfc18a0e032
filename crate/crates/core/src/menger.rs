//! Unit-capacity max-flow and Menger path systems.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId, PairSpec, Path, VertexId};

/// A set of pairwise edge-disjoint source-to-sink paths for one pair.
///
/// Paths are kept sorted by their edge sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathSystem {
    pair: PairSpec,
    paths: Vec<Path>,
}

impl PathSystem {
    /// Checks endpoints and edge-disjointness. Maximality is checked separately
    /// by [`PathSystem::validate_maximum`].
    pub fn new(g: &Dag, pair: PairSpec, mut paths: Vec<Path>) -> Result<PathSystem> {
        let mut used = FixedBitSet::with_capacity(g.edge_count());
        for p in &paths {
            if p.start() != pair.source || p.end() != pair.sink {
                return Err(Error::InvalidSystem(format!(
                    "path {} does not run from `{}` to `{}`",
                    p.display(g),
                    g.vertex_name(pair.source),
                    g.vertex_name(pair.sink)
                )));
            }
            for &e in p.edges() {
                if used.put(e.index()) {
                    return Err(Error::InvalidSystem(format!("edge `{}` used twice", g.edge_name(e))));
                }
            }
        }
        paths.sort();
        Ok(PathSystem { pair, paths })
    }

    pub fn pair(&self) -> PairSpec {
        self.pair
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, i: usize) -> &Path {
        &self.paths[i]
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Checks that the system has as many paths as the min-cut allows.
    pub fn validate_maximum(&self, g: &Dag) -> Result<()> {
        let c = min_cut(g, self.pair.source, self.pair.sink)?;
        if c != self.paths.len() {
            return Err(Error::InvalidSystem(format!("{} paths but min-cut is {c}", self.paths.len())));
        }
        Ok(())
    }

    /// The system with the given paths replaced, re-validated.
    pub fn with_replacements(&self, g: &Dag, edits: &[(usize, Path)]) -> Result<PathSystem> {
        let mut paths = self.paths.clone();
        for (i, p) in edits {
            *paths.get_mut(*i).ok_or_else(|| Error::InvalidSystem(format!("no path #{i}")))? = p.clone();
        }
        PathSystem::new(g, self.pair, paths)
    }
}

/// Priority of edges in augmenting-path search and flow decomposition.
#[derive(Clone, Debug)]
pub struct EdgeOrder {
    rank: Vec<u32>,
}

impl EdgeOrder {
    /// Sorted edge-id order.
    pub fn lexicographic(g: &Dag) -> EdgeOrder {
        EdgeOrder { rank: (0..g.edge_count() as u32).collect() }
    }

    /// A reproducible random order.
    pub fn shuffled(g: &Dag, seed: u64) -> EdgeOrder {
        let mut perm: Vec<u32> = (0..g.edge_count() as u32).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        EdgeOrder { rank: perm }
    }

    fn rank(&self, e: EdgeId) -> u32 {
        self.rank[e.index()]
    }

    fn sorted(&self, edges: &[EdgeId]) -> Vec<EdgeId> {
        let mut v = edges.to_vec();
        v.sort_by_key(|&e| self.rank(e));
        v
    }
}

struct Flow<'a> {
    g: &'a Dag,
    // per vertex: residual arcs as (edge, forward), in priority order
    arcs: Vec<Vec<(EdgeId, bool)>>,
    used: FixedBitSet,
}

impl<'a> Flow<'a> {
    fn new(g: &'a Dag, order: &EdgeOrder) -> Self {
        let arcs = g
            .vertices()
            .map(|v| {
                let mut a: Vec<(EdgeId, bool)> = g.out_edges(v).iter().map(|&e| (e, true)).collect();
                a.extend(g.in_edges(v).iter().map(|&e| (e, false)));
                a.sort_by_key(|&(e, fwd)| (order.rank(e), !fwd));
                a
            })
            .collect();
        Flow { g, arcs, used: FixedBitSet::with_capacity(g.edge_count()) }
    }

    fn augment(&mut self, s: VertexId, t: VertexId) -> bool {
        let mut seen = FixedBitSet::with_capacity(self.g.vertex_count());
        let mut trail = Vec::new();
        if !self.search(s, t, &mut seen, &mut trail) {
            return false;
        }
        for (e, fwd) in trail {
            self.used.set(e.index(), fwd);
        }
        true
    }

    fn search(&self, v: VertexId, t: VertexId, seen: &mut FixedBitSet, trail: &mut Vec<(EdgeId, bool)>) -> bool {
        if v == t {
            return true;
        }
        seen.insert(v.index());
        for &(e, fwd) in &self.arcs[v.index()] {
            if self.used.contains(e.index()) == fwd {
                continue;
            }
            let w = if fwd { self.g.head(e) } else { self.g.tail(e) };
            if seen.contains(w.index()) {
                continue;
            }
            trail.push((e, fwd));
            if self.search(w, t, seen, trail) {
                return true;
            }
            trail.pop();
        }
        false
    }

    fn run(&mut self, s: VertexId, t: VertexId) -> usize {
        let mut value = 0;
        while self.augment(s, t) {
            value += 1;
        }
        value
    }
}

fn check_endpoints(g: &Dag, s: VertexId, t: VertexId) -> Result<()> {
    for v in [s, t] {
        if v.index() >= g.vertex_count() {
            return Err(Error::UnknownVertex(format!("#{}", v.0)));
        }
    }
    if s == t {
        return Err(Error::InvalidPair(format!("source and sink are both `{}`", g.vertex_name(s))));
    }
    Ok(())
}

/// The minimum number of edges separating `t` from `s`.
pub fn min_cut(g: &Dag, s: VertexId, t: VertexId) -> Result<usize> {
    check_endpoints(g, s, t)?;
    Ok(Flow::new(g, &EdgeOrder::lexicographic(g)).run(s, t))
}

pub fn menger_paths(g: &Dag, pair: PairSpec) -> Result<PathSystem> {
    menger_paths_with(g, pair, &EdgeOrder::lexicographic(g))
}

/// A maximum path system found with the given edge priority.
pub fn menger_paths_with(g: &Dag, pair: PairSpec, order: &EdgeOrder) -> Result<PathSystem> {
    let (s, t) = (pair.source, pair.sink);
    check_endpoints(g, s, t)?;
    let mut flow = Flow::new(g, order);
    let value = flow.run(s, t);
    if value == 0 {
        return Err(Error::NoPath { from: g.vertex_name(s).to_string(), to: g.vertex_name(t).to_string() });
    }
    let mut support = flow.used;
    let out: Vec<Vec<EdgeId>> = g.vertices().map(|v| order.sorted(g.out_edges(v))).collect();
    let mut paths = Vec::with_capacity(value);
    for _ in 0..value {
        let edges = peel(g, &out, &support, s, t).expect("flow support carries a path for each unit");
        for &e in &edges {
            support.set(e.index(), false);
        }
        paths.push(Path::new(g, s, edges)?);
    }
    PathSystem::new(g, pair, paths)
}

/// The first `s`-`t` path of the support in priority order.
fn peel(g: &Dag, out: &[Vec<EdgeId>], support: &FixedBitSet, s: VertexId, t: VertexId) -> Option<Vec<EdgeId>> {
    fn go(g: &Dag, out: &[Vec<EdgeId>], support: &FixedBitSet, v: VertexId, t: VertexId, seen: &mut FixedBitSet, acc: &mut Vec<EdgeId>) -> bool {
        if v == t {
            return true;
        }
        seen.insert(v.index());
        for &e in &out[v.index()] {
            if !support.contains(e.index()) || seen.contains(g.head(e).index()) {
                continue;
            }
            acc.push(e);
            if go(g, out, support, g.head(e), t, seen, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::new();
    let mut seen = FixedBitSet::with_capacity(g.vertex_count());
    go(g, out, support, s, t, &mut seen, &mut acc).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Network;

    fn pair(g: &Dag, s: &str, t: &str) -> PairSpec {
        PairSpec { index: 0, source: g.vertex(s).unwrap(), sink: g.vertex(t).unwrap() }
    }

    // Independent check: brute force over edge subsets of a small graph.
    fn brute_cut(g: &Dag, s: VertexId, t: VertexId) -> usize {
        let m = g.edge_count();
        (0u32..1 << m)
            .filter(|mask| {
                let mut b = crate::graph::DagBuilder::new();
                for v in g.vertices() {
                    b.vertex(g.vertex_name(v));
                }
                for e in g.edges() {
                    if mask & (1 << e.0) == 0 {
                        let d = g.edge_data(e);
                        b.edge(d.name.clone(), g.vertex_name(d.tail), g.vertex_name(d.head)).unwrap();
                    }
                }
                !b.build_cyclic().reaches(s, t)
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn single_edge() {
        let g = Dag::from_edges([("e", "s", "t")]).unwrap();
        let p = pair(&g, "s", "t");
        assert_eq!(min_cut(&g, p.source, p.sink).unwrap(), 1);
        let sys = menger_paths(&g, p).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.path(0).edge_names(&g), ["e"]);
    }

    #[test]
    fn parallel_edges_plus_chain() {
        let g = Dag::from_edges([("a", "s", "t"), ("b", "s", "t"), ("c", "s", "m"), ("d", "m", "t")]).unwrap();
        let p = pair(&g, "s", "t");
        assert_eq!(min_cut(&g, p.source, p.sink).unwrap(), 3);
        assert_eq!(brute_cut(&g, p.source, p.sink), 3);
    }

    #[test]
    fn three_parallel_edges() {
        let g = Dag::from_edges([("a", "s", "t"), ("b", "s", "t"), ("c", "s", "t")]).unwrap();
        let sys = menger_paths(&g, pair(&g, "s", "t")).unwrap();
        assert_eq!(sys.len(), 3);
        assert!(sys.paths().iter().all(|p| p.len() == 1));
    }

    #[test]
    fn butterfly_sink_y() {
        let n = Network::parse(
            "source S\nsink Y\nsink Z\nedge e1 S T\nedge e2 S U\nedge e3 T Y\nedge e4 T W\nedge e5 U W\nedge e6 U Z\nedge e7 W X\nedge e8 X Y\nedge e9 X Z\n",
        )
        .unwrap();
        let g = &n.dag;
        assert_eq!(min_cut(g, n.pairs[0].source, n.pairs[0].sink).unwrap(), 2);
        let sys = menger_paths(g, n.pairs[0]).unwrap();
        let shown: Vec<String> = sys.paths().iter().map(|p| p.display(g)).collect();
        assert_eq!(shown, ["S->T->Y", "S->U->W->X->Y"]);
    }

    #[test]
    fn disconnected_pair_has_no_paths() {
        let g = Dag::from_edges([("e", "s", "m"), ("f", "t", "m")]).unwrap();
        let p = pair(&g, "s", "t");
        assert_eq!(min_cut(&g, p.source, p.sink).unwrap(), 0);
        assert!(matches!(menger_paths(&g, p), Err(Error::NoPath { .. })));
    }

    #[test]
    fn flow_needs_backward_arcs() {
        // the first greedy path s-a-b-t blocks both others unless undone
        let g = Dag::from_edges([
            ("e1", "s", "a"),
            ("e2", "a", "b"),
            ("e3", "b", "t"),
            ("e4", "s", "b"),
            ("e5", "a", "t"),
        ])
        .unwrap();
        let p = pair(&g, "s", "t");
        let sys = menger_paths(&g, p).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(brute_cut(&g, p.source, p.sink), 2);
        sys.validate_maximum(&g).unwrap();
    }

    #[test]
    fn shuffled_orders_give_valid_systems() {
        let g = Dag::from_edges([
            ("e1", "s", "a"),
            ("e2", "a", "b"),
            ("e3", "b", "t"),
            ("e4", "s", "b"),
            ("e5", "a", "t"),
            ("e6", "s", "c"),
            ("e7", "c", "t"),
            ("e8", "c", "a"),
        ])
        .unwrap();
        let p = pair(&g, "s", "t");
        for seed in 0..20 {
            let sys = menger_paths_with(&g, p, &EdgeOrder::shuffled(&g, seed)).unwrap();
            assert_eq!(sys.len(), brute_cut(&g, p.source, p.sink));
        }
    }

    #[test]
    fn system_rejects_shared_edges() {
        let g = Dag::from_edges([("e", "s", "t")]).unwrap();
        let path = Path::from_edge_names(&g, &["e"]).unwrap();
        assert!(PathSystem::new(&g, pair(&g, "s", "t"), vec![path.clone(), path]).is_err());
    }
}

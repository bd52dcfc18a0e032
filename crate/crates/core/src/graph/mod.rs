//! Directed multigraphs with string ids, plus the path algebra used by every
//! other module.
//!
//! Vertex and edge ids are interned in sorted order, so iterating a [`Dag`]
//! by index is iterating by id.

mod format;
mod path;

pub use format::{Network, PairLayout, PairSpec};
pub use path::Path;

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
}

/// An immutable directed multigraph.
///
/// Acyclicity is enforced by [`DagBuilder::build`]; [`DagBuilder::build_cyclic`]
/// skips the check and marks the graph as cyclic-allowed.
#[derive(Clone, PartialEq, Eq)]
pub struct Dag {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
    rank: Option<Vec<u32>>,
    cyclic_allowed: bool,
}

#[derive(Clone, Debug, Default)]
pub struct DagBuilder {
    vertices: BTreeSet<String>,
    edges: BTreeMap<String, (String, String)>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: impl Into<String>) -> &mut Self {
        self.vertices.insert(name.into());
        self
    }

    pub fn edge(&mut self, id: impl Into<String>, tail: impl Into<String>, head: impl Into<String>) -> Result<&mut Self> {
        let id = id.into();
        let (tail, head) = (tail.into(), head.into());
        if self.edges.contains_key(&id) {
            return Err(Error::DuplicateEdge(id));
        }
        self.vertices.insert(tail.clone());
        self.vertices.insert(head.clone());
        self.edges.insert(id, (tail, head));
        Ok(self)
    }

    pub fn has_edge(&self, id: &str) -> bool {
        self.edges.contains_key(id)
    }

    pub fn build(&self) -> Result<Dag> {
        let dag = self.assemble(false);
        if dag.rank.is_none() {
            return Err(Error::CycleDetected);
        }
        Ok(dag)
    }

    pub fn build_cyclic(&self) -> Dag {
        self.assemble(true)
    }

    fn assemble(&self, cyclic_allowed: bool) -> Dag {
        let vertices: Vec<String> = self.vertices.iter().cloned().collect();
        let lookup = |name: &str| VertexId(vertices.binary_search_by(|v| v.as_str().cmp(name)).unwrap() as u32);
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|(name, (t, h))| Edge { name: name.clone(), tail: lookup(t), head: lookup(h) })
            .collect();
        let mut out = vec![Vec::new(); vertices.len()];
        let mut inc = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.tail.index()].push(EdgeId(i as u32));
            inc[e.head.index()].push(EdgeId(i as u32));
        }
        let rank = topological_rank(vertices.len(), &edges, &inc, &out);
        Dag { vertices, edges, out, inc, rank, cyclic_allowed }
    }
}

// Kahn's algorithm, always releasing the smallest ready vertex id.
fn topological_rank(n: usize, edges: &[Edge], inc: &[Vec<EdgeId>], out: &[Vec<EdgeId>]) -> Option<Vec<u32>> {
    let mut indeg: Vec<usize> = inc.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut rank = vec![0u32; n];
    let mut next = 0u32;
    while let Some(Reverse(v)) = ready.pop() {
        rank[v] = next;
        next += 1;
        for &e in &out[v] {
            let h = edges[e.index()].head.index();
            indeg[h] -= 1;
            if indeg[h] == 0 {
                ready.push(Reverse(h));
            }
        }
    }
    (next as usize == n).then_some(rank)
}

impl Dag {
    pub fn builder() -> DagBuilder {
        DagBuilder::new()
    }

    /// Builds an acyclic graph from `(id, tail, head)` triples.
    pub fn from_edges<'a>(edges: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>) -> Result<Dag> {
        let mut b = DagBuilder::new();
        for (id, u, v) in edges {
            b.edge(id, u, v)?;
        }
        b.build()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.vertices.binary_search_by(|v| v.as_str().cmp(name)).ok().map(|i| VertexId(i as u32))
    }

    pub fn require_vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex(name).ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Option<EdgeId> {
        self.edges.binary_search_by(|e| e.name.as_str().cmp(name)).ok().map(|i| EdgeId(i as u32))
    }

    pub fn require_edge(&self, name: &str) -> Result<EdgeId> {
        self.edge(name).ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.index()].name
    }

    pub fn edge_data(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn tail(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].tail
    }

    pub fn head(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].head
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v.index()]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.inc[v.index()]
    }

    pub fn is_acyclic(&self) -> bool {
        self.rank.is_some()
    }

    /// Whether the graph was built without the acyclicity check.
    pub fn is_cyclic_allowed(&self) -> bool {
        self.cyclic_allowed
    }

    pub fn topo_rank(&self, v: VertexId) -> Option<u32> {
        self.rank.as_ref().map(|r| r[v.index()])
    }

    /// Sort key placing edges in topological order of their tails, ties by id.
    pub fn edge_order_key(&self, e: EdgeId) -> (u32, EdgeId) {
        (self.topo_rank(self.tail(e)).unwrap_or(0), e)
    }

    /// Vertices reachable from `from` (including `from`).
    pub fn reachable_from(&self, from: VertexId) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([from]);
        seen.insert(from.index());
        while let Some(v) = queue.pop_front() {
            for &e in self.out_edges(v) {
                let h = self.head(e);
                if !seen.put(h.index()) {
                    queue.push_back(h);
                }
            }
        }
        seen
    }

    /// Vertices from which `to` is reachable (including `to`).
    pub fn reaching(&self, to: VertexId) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([to]);
        seen.insert(to.index());
        while let Some(v) = queue.pop_front() {
            for &e in self.in_edges(v) {
                let t = self.tail(e);
                if !seen.put(t.index()) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    pub fn reaches(&self, from: VertexId, to: VertexId) -> bool {
        self.reachable_from(from).contains(to.index())
    }

    /// A builder seeded with this graph's vertices and edges.
    pub fn to_builder(&self) -> DagBuilder {
        let mut b = DagBuilder::new();
        for v in &self.vertices {
            b.vertex(v.clone());
        }
        for e in &self.edges {
            b.edge(e.name.clone(), self.vertex_name(e.tail), self.vertex_name(e.head))
                .expect("edge ids of a built graph are unique");
        }
        b
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{}:{}->{}", e.name, self.vertex_name(e.tail), self.vertex_name(e.head)))
            .collect();
        f.debug_struct("Dag").field("vertices", &self.vertices).field("edges", &edges).finish()
    }
}

pub fn is_acyclic(g: &Dag) -> bool {
    g.is_acyclic()
}

/// `p[s, t]`: the contiguous run of `p` from vertex `s` to vertex `t`.
pub fn subpath(g: &Dag, p: &Path, s: VertexId, t: VertexId) -> Result<Path> {
    let verts = p.vertices(g);
    let i = verts
        .iter()
        .position(|&v| v == s)
        .ok_or_else(|| Error::VertexNotOnPath(g.vertex_name(s).to_string()))?;
    if !verts.contains(&t) {
        return Err(Error::VertexNotOnPath(g.vertex_name(t).to_string()));
    }
    let j = verts[i..].iter().position(|&v| v == t).map(|k| k + i).ok_or(Error::OrderViolation)?;
    Ok(p.slice(g, i, j))
}

/// `p ∘ q`.
pub fn concat(g: &Dag, p: &Path, q: &Path) -> Result<Path> {
    if p.end() != q.start() {
        return Err(Error::EndpointMismatch {
            left: g.vertex_name(p.end()).to_string(),
            right: g.vertex_name(q.start()).to_string(),
        });
    }
    let mut edges = p.edges().to_vec();
    edges.extend_from_slice(q.edges());
    Path::new(g, p.start(), edges)
}

/// Whether `p` is smaller than `q`: some directed path runs from `b(p)` to `a(q)`.
pub fn is_smaller(g: &Dag, p: &Path, q: &Path) -> bool {
    g.reaches(p.end(), q.start())
}

/// The subgraph induced on every vertex that reaches one of `anchors`.
pub fn prefix_subgraph(g: &Dag, anchors: &[VertexId]) -> Result<Dag> {
    if anchors.is_empty() {
        return Err(Error::InvalidPath("prefix subgraph needs at least one anchor".into()));
    }
    let mut keep = FixedBitSet::with_capacity(g.vertex_count());
    for &a in anchors {
        if a.index() >= g.vertex_count() {
            return Err(Error::UnknownVertex(format!("#{}", a.0)));
        }
        keep.union_with(&g.reaching(a));
    }
    let mut b = DagBuilder::new();
    for v in keep.ones() {
        b.vertex(g.vertex_name(VertexId(v as u32)));
    }
    for e in g.edges() {
        let d = g.edge_data(e);
        if keep.contains(d.tail.index()) && keep.contains(d.head.index()) {
            b.edge(d.name.clone(), g.vertex_name(d.tail), g.vertex_name(d.head))?;
        }
    }
    Ok(if g.is_cyclic_allowed() { b.build_cyclic() } else { b.build()? })
}

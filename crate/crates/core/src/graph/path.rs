use std::collections::HashSet;

use super::{Dag, EdgeId, VertexId};
use crate::error::{Error, Result};

/// A directed path given by its edge sequence.
///
/// A path with no edges is a single anchored vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    start: VertexId,
    end: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Path {
        Path { start: v, end: v, edges: Vec::new() }
    }

    pub fn new(g: &Dag, start: VertexId, edges: Vec<EdgeId>) -> Result<Path> {
        let mut at = start;
        let mut seen = HashSet::with_capacity(edges.len());
        for &e in &edges {
            if e.index() >= g.edge_count() {
                return Err(Error::UnknownEdge(format!("#{}", e.0)));
            }
            if g.tail(e) != at {
                return Err(Error::InvalidPath(format!(
                    "edge `{}` does not leave `{}`",
                    g.edge_name(e),
                    g.vertex_name(at)
                )));
            }
            if !seen.insert(e) {
                return Err(Error::EdgeRepetition(g.edge_name(e).to_string()));
            }
            at = g.head(e);
        }
        Ok(Path { start, end: at, edges })
    }

    /// A nonempty path from its edges alone.
    pub fn from_edges(g: &Dag, edges: Vec<EdgeId>) -> Result<Path> {
        let first = *edges.first().ok_or_else(|| Error::InvalidPath("empty edge list".into()))?;
        Path::new(g, g.tail(first), edges)
    }

    pub fn from_edge_names(g: &Dag, names: &[&str]) -> Result<Path> {
        let edges = names.iter().map(|n| g.require_edge(n)).collect::<Result<Vec<_>>>()?;
        Path::from_edges(g, edges)
    }

    /// A path from a vertex sequence, taking the smallest edge id between
    /// consecutive vertices.
    pub fn from_vertex_names(g: &Dag, names: &[&str]) -> Result<Path> {
        let vs = names.iter().map(|n| g.require_vertex(n)).collect::<Result<Vec<_>>>()?;
        let first = *vs.first().ok_or_else(|| Error::InvalidPath("empty vertex list".into()))?;
        let mut edges = Vec::new();
        for w in vs.windows(2) {
            let e = g
                .out_edges(w[0])
                .iter()
                .copied()
                .find(|&e| g.head(e) == w[1])
                .ok_or_else(|| Error::InvalidPath(format!("no edge {} -> {}", names[edges.len()], names[edges.len() + 1])))?;
            edges.push(e);
        }
        Path::new(g, first, edges)
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn edge_position(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    /// The edge preceding position `i`, if any.
    pub fn predecessor(&self, i: usize) -> Option<EdgeId> {
        i.checked_sub(1).map(|j| self.edges[j])
    }

    pub fn vertices(&self, g: &Dag) -> Vec<VertexId> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        vs.push(self.start);
        vs.extend(self.edges.iter().map(|&e| g.head(e)));
        vs
    }

    /// Sub-run between vertex positions `i <= j` of [`Path::vertices`].
    pub fn slice(&self, g: &Dag, i: usize, j: usize) -> Path {
        let at = |k: usize| if k == 0 { self.start } else { g.head(self.edges[k - 1]) };
        Path { start: at(i), end: at(j), edges: self.edges[i..j].to_vec() }
    }

    /// Renders the vertex sequence as `a->b->c`.
    pub fn display(&self, g: &Dag) -> String {
        self.vertices(g).iter().map(|&v| g.vertex_name(v)).collect::<Vec<_>>().join("->")
    }

    pub fn edge_names(&self, g: &Dag) -> Vec<String> {
        self.edges.iter().map(|&e| g.edge_name(e).to_string()).collect()
    }
}

//! The edge-list text format.
//!
//! ```text
//! # butterfly
//! source S
//! sink Y
//! sink Z
//! edge e1 S T
//! ```
//!
//! `pair <S> <R>` lines declare pairs with their own sources instead of
//! `source`/`sink`. `vertex <v>` declares an isolated vertex and a bare
//! `cyclic` line lifts the acyclicity check.

use std::fmt;
use std::str::FromStr;

use super::{Dag, DagBuilder, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairSpec {
    pub index: usize,
    pub source: VertexId,
    pub sink: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairLayout {
    Pairs,
    SharedSource,
}

/// A graph together with its source/sink pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub dag: Dag,
    pub pairs: Vec<PairSpec>,
    pub layout: PairLayout,
}

impl Network {
    pub fn new(dag: Dag, pairs: &[(VertexId, VertexId)], layout: PairLayout) -> Result<Network> {
        if layout == PairLayout::SharedSource && pairs.windows(2).any(|w| w[0].0 != w[1].0) {
            return Err(Error::SourceMismatch);
        }
        let mut specs = Vec::with_capacity(pairs.len());
        for (index, &(source, sink)) in pairs.iter().enumerate() {
            if source == sink {
                return Err(Error::InvalidPair(format!("source and sink are both `{}`", dag.vertex_name(source))));
            }
            if !dag.reaches(source, sink) {
                return Err(Error::NoPath {
                    from: dag.vertex_name(source).to_string(),
                    to: dag.vertex_name(sink).to_string(),
                });
            }
            specs.push(PairSpec { index, source, sink });
        }
        Ok(Network { dag, pairs: specs, layout })
    }

    pub fn from_names(dag: Dag, pairs: &[(&str, &str)], layout: PairLayout) -> Result<Network> {
        let ids = pairs
            .iter()
            .map(|(s, t)| Ok((dag.require_vertex(s)?, dag.require_vertex(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Network::new(dag, &ids, layout)
    }

    /// The common source when every pair shares one.
    pub fn shared_source(&self) -> Option<VertexId> {
        let first = self.pairs.first()?.source;
        self.pairs.iter().all(|p| p.source == first).then_some(first)
    }

    pub fn parse(text: &str) -> Result<Network> {
        let mut builder = DagBuilder::new();
        let mut cyclic = false;
        let mut pairs: Vec<(String, String, usize)> = Vec::new();
        let mut source: Option<String> = None;
        let mut layout: Option<PairLayout> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| Error::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let Some((&keyword, args)) = tokens.split_first() else { continue };
            let expect = |k: usize| -> Result<()> {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(err(format!("`{keyword}` takes {k} argument(s), got {}", args.len())))
                }
            };
            let mut set_layout = |want: PairLayout| -> Result<()> {
                match layout {
                    Some(have) if have != want => Err(err("cannot mix `pair` with `source`/`sink`".into())),
                    _ => {
                        layout = Some(want);
                        Ok(())
                    }
                }
            };
            match keyword {
                "edge" => {
                    expect(3)?;
                    builder.edge(args[0], args[1], args[2]).map_err(|e| err(e.to_string()))?;
                }
                "vertex" => {
                    expect(1)?;
                    builder.vertex(args[0]);
                }
                "pair" => {
                    expect(2)?;
                    set_layout(PairLayout::Pairs)?;
                    pairs.push((args[0].to_string(), args[1].to_string(), line));
                }
                "source" => {
                    expect(1)?;
                    set_layout(PairLayout::SharedSource)?;
                    if source.is_some() {
                        return Err(err("only one `source` line is allowed".into()));
                    }
                    source = Some(args[0].to_string());
                }
                "sink" => {
                    expect(1)?;
                    set_layout(PairLayout::SharedSource)?;
                    let s = source.clone().ok_or_else(|| err("`sink` before `source`".into()))?;
                    pairs.push((s, args[0].to_string(), line));
                }
                "cyclic" => {
                    expect(0)?;
                    cyclic = true;
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        if let Some(s) = &source {
            builder.vertex(s.clone());
        }
        let dag = if cyclic {
            builder.build_cyclic()
        } else {
            builder.build().map_err(|e| Error::Parse { line: 0, message: e.to_string() })?
        };
        let mut ids = Vec::with_capacity(pairs.len());
        for (s, t, line) in &pairs {
            let lookup = |name: &str| {
                dag.vertex(name).ok_or_else(|| Error::Parse { line: *line, message: format!("unknown vertex `{name}`") })
            };
            ids.push((lookup(s)?, lookup(t)?));
        }
        let layout = layout.unwrap_or(PairLayout::Pairs);
        Network::new(dag, &ids, layout)
    }

    pub fn to_text(&self) -> String {
        let g = &self.dag;
        let mut out = String::new();
        if g.is_cyclic_allowed() {
            out.push_str("cyclic\n");
        }
        match self.layout {
            PairLayout::SharedSource if !self.pairs.is_empty() => {
                out.push_str(&format!("source {}\n", g.vertex_name(self.pairs[0].source)));
                for p in &self.pairs {
                    out.push_str(&format!("sink {}\n", g.vertex_name(p.sink)));
                }
            }
            _ => {
                for p in &self.pairs {
                    out.push_str(&format!("pair {} {}\n", g.vertex_name(p.source), g.vertex_name(p.sink)));
                }
            }
        }
        for v in g.vertices() {
            if g.in_edges(v).is_empty() && g.out_edges(v).is_empty() {
                out.push_str(&format!("vertex {}\n", g.vertex_name(v)));
            }
        }
        for e in g.edges() {
            let d = g.edge_data(e);
            out.push_str(&format!("edge {} {} {}\n", d.name, g.vertex_name(d.tail), g.vertex_name(d.head)));
        }
        out
    }
}

impl FromStr for Network {
    type Err = Error;

    fn from_str(s: &str) -> Result<Network> {
        Network::parse(s)
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

//! Structured output shared by the subcommands.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use menger_core::menger::min_cut;
use menger_core::rerouting::Trace;
use menger_core::{Dag, EdgeId, Network, PathSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub source: String,
    pub sink: String,
    pub cut: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub vertices: usize,
    pub edges: usize,
    pub cyclic: bool,
    pub pairs: Vec<PairSummary>,
}

/// What every subcommand prints on stdout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub instance: Option<InstanceSummary>,
    pub result: Value,
    pub elapsed_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, net: Option<&Network>, result: Value) -> RunReport {
        let instance = net.map(|n| {
            let g = &n.dag;
            InstanceSummary {
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                cyclic: !g.is_acyclic(),
                pairs: n
                    .pairs
                    .iter()
                    .map(|p| PairSummary {
                        source: g.vertex_name(p.source).to_string(),
                        sink: g.vertex_name(p.sink).to_string(),
                        cut: min_cut(g, p.source, p.sink).unwrap_or(0),
                    })
                    .collect(),
            }
        });
        RunReport { command: command.to_string(), instance, result, elapsed_ms: 0.0 }
    }

    pub fn finish(mut self, start: Instant) -> RunReport {
        self.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn edge_names(g: &Dag, edges: &BTreeSet<EdgeId>) -> Vec<String> {
    edges.iter().map(|&e| g.edge_name(e).to_string()).collect()
}

/// Per system: its pair and the edge names of every path.
pub fn systems_json(g: &Dag, systems: &[PathSystem]) -> Value {
    json!(systems
        .iter()
        .map(|s| json!({
            "pair": s.pair().index,
            "source": g.vertex_name(s.pair().source),
            "sink": g.vertex_name(s.pair().sink),
            "paths": s.paths().iter().map(|p| p.edge_names(g)).collect::<Vec<_>>(),
        }))
        .collect::<Vec<_>>())
}

pub fn trace_json(g: &Dag, trace: &Trace) -> Value {
    json!(trace
        .steps
        .iter()
        .map(|s| json!({
            "kind": s.kind,
            "target": s.target,
            "counterpart": s.counterpart,
            "pairwise_before": s.pairwise_before,
            "pairwise_after": s.pairwise_after,
            "global_before": s.global_before,
            "global_after": s.global_after,
            "removed": s.removed.iter().map(|&e| g.edge_name(e)).collect::<Vec<_>>(),
        }))
        .collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_survives_serde() {
        let net = Network::parse("pair a b\nedge e a b\n").unwrap();
        let r = RunReport::new("paths", Some(&net), json!({ "count": 0 }));
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.instance.unwrap().pairs[0].cut, 1);
    }
}

//! Semi-reachability between merged subpaths of two systems and the auxiliary
//! graph that certifies reducing reroutings.
//!
//! Throughout, `through` names the system whose paths carry the even (forward)
//! steps; the other system carries the odd (backward) steps.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId};
use crate::menger::PathSystem;
use crate::merging::{pairwise_merged_subpaths, MergedSubpath};

/// Where a merged subpath sits on one of its owner paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Placement {
    pub path: usize,
    pub start: usize,
    pub end: usize,
}

/// The merged subpaths of two systems, indexed along every path.
#[derive(Clone, Debug)]
pub struct PairMerges {
    pub systems: [PathSystem; 2],
    pub merged: Vec<MergedSubpath>,
    placement: Vec<[Placement; 2]>,
    // per side and path: merged indices in path order
    runs: [Vec<Vec<usize>>; 2],
}

impl PairMerges {
    pub fn new(g: &Dag, a: &PathSystem, b: &PathSystem) -> PairMerges {
        let merged = pairwise_merged_subpaths(g, a, b);
        let mut placement = Vec::with_capacity(merged.len());
        let mut runs = [vec![Vec::new(); a.len()], vec![Vec::new(); b.len()]];
        for (k, m) in merged.iter().enumerate() {
            let place = |sys: &PathSystem, path: usize| {
                let start = sys.path(path).edge_position(m.merge_edge).expect("owner path holds the merge edge");
                Placement { path, start, end: start + m.run.len() }
            };
            let pa = place(a, m.owner_a.path);
            let pb = place(b, m.owner_b.path);
            runs[0][pa.path].push(k);
            runs[1][pb.path].push(k);
            placement.push([pa, pb]);
        }
        for side in 0..2 {
            for list in runs[side].iter_mut() {
                list.sort_by_key(|&k| placement[k][side].start);
            }
        }
        PairMerges { systems: [a.clone(), b.clone()], merged, placement, runs }
    }

    pub fn placement(&self, k: usize, side: usize) -> Placement {
        self.placement[k][side]
    }

    /// Merged indices along path `path` of side `side`, in path order.
    pub fn runs_on(&self, side: usize, path: usize) -> &[usize] {
        &self.runs[side][path]
    }

    pub fn index_of(&self, m: &MergedSubpath) -> Option<usize> {
        self.merged.iter().position(|x| x == m)
    }

    /// Side (0 for the first system, 1 for the second) with pair index `through`.
    pub fn side_of(&self, through: usize) -> Option<usize> {
        (0..2).find(|&s| self.systems[s].pair().index == through)
    }

    // the run just before k on its path of `side`
    fn previous_on(&self, k: usize, side: usize) -> Option<usize> {
        let p = self.placement[k][side].path;
        let list = &self.runs[side][p];
        let i = list.iter().position(|&x| x == k)?;
        i.checked_sub(1).map(|j| list[j])
    }

    fn later_on(&self, k: usize, side: usize) -> &[usize] {
        let p = self.placement[k][side].path;
        let list = &self.runs[side][p];
        let i = list.iter().position(|&x| x == k).expect("run is listed on its owner path");
        &list[i + 1..]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Above,
    Below,
}

/// A sequence of merged subpaths satisfying the semi-reachability steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachWitness {
    pub sequence: Vec<MergedSubpath>,
    pub through: usize,
    /// Carrying path in the other system for each odd step.
    pub odd_steps: Vec<usize>,
    /// Carrying path in the `through` system for each even step.
    pub even_steps: Vec<usize>,
    pub parity: Parity,
}

impl ReachWitness {
    pub fn len(&self) -> usize {
        self.sequence.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_regular(&self) -> bool {
        let set: BTreeSet<usize> = self.even_steps.iter().copied().collect();
        set.len() == self.even_steps.len()
    }

    /// `self` followed by `next`, which must start where `self` ends.
    pub fn concat(&self, next: &ReachWitness) -> Option<ReachWitness> {
        if self.through != next.through || self.sequence.last() != next.sequence.first() || self.len() % 2 == 1 {
            return None;
        }
        let mut sequence = self.sequence.clone();
        sequence.extend(next.sequence[1..].iter().cloned());
        let mut odd_steps = self.odd_steps.clone();
        odd_steps.extend(&next.odd_steps);
        let mut even_steps = self.even_steps.clone();
        even_steps.extend(&next.even_steps);
        let parity = if (sequence.len() - 1).is_multiple_of(2) { Parity::Above } else { Parity::Below };
        Some(ReachWitness { sequence, through: self.through, odd_steps, even_steps, parity })
    }
}

fn witness_from(pm: &PairMerges, side: usize, seq: &[usize]) -> ReachWitness {
    let other = 1 - side;
    let mut odd_steps = Vec::new();
    let mut even_steps = Vec::new();
    for (n, &k) in seq.iter().enumerate().skip(1) {
        if n % 2 == 1 {
            odd_steps.push(pm.placement(k, other).path);
        } else {
            even_steps.push(pm.placement(seq[n - 1], side).path);
        }
    }
    let parity = if (seq.len() - 1).is_multiple_of(2) { Parity::Above } else { Parity::Below };
    ReachWitness {
        sequence: seq.iter().map(|&k| pm.merged[k].clone()).collect(),
        through: pm.systems[side].pair().index,
        odd_steps,
        even_steps,
        parity,
    }
}

// Breadth-first search over (merged subpath, step parity). Returns merged
// index sequences; `accept(k, len)` decides whether a reached state ends the
// search.
fn bfs(pm: &PairMerges, side: usize, from: usize, accept: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let other = 1 - side;
    let n = pm.merged.len();
    let mut parent: Vec<[Option<usize>; 2]> = vec![[None; 2]; n];
    let mut seen = vec![[false; 2]; n];
    let mut dist = vec![[0usize; 2]; n];
    let mut queue = VecDeque::new();
    seen[from][0] = true;
    queue.push_back((from, 0usize));
    let rebuild = |parent: &Vec<[Option<usize>; 2]>, mut k: usize, mut par: usize| {
        let mut seq = vec![k];
        while let Some(p) = parent[k][par] {
            par ^= 1;
            k = p;
            seq.push(k);
        }
        seq.reverse();
        seq
    };
    if accept(from, 0) {
        return Some(vec![from]);
    }
    while let Some((k, par)) = queue.pop_front() {
        let next: Vec<usize> = if par == 0 {
            pm.previous_on(k, other).into_iter().collect()
        } else {
            pm.later_on(k, side).to_vec()
        };
        let np = par ^ 1;
        for m in next {
            if seen[m][np] {
                // a revisit can still close a self-reach of the wanted length
                if m == from && accept(m, dist[k][par] + 1) {
                    let mut seq = rebuild(&parent, k, par);
                    seq.push(m);
                    return Some(seq);
                }
                continue;
            }
            seen[m][np] = true;
            parent[m][np] = Some(k);
            dist[m][np] = dist[k][par] + 1;
            if accept(m, dist[m][np]) {
                return Some(rebuild(&parent, m, np));
            }
            queue.push_back((m, np));
        }
    }
    None
}

/// A shortest witness that `v` is semi-reachable through `through` by `u`.
pub fn semi_reachable(
    g: &Dag,
    a: &PathSystem,
    b: &PathSystem,
    u: &MergedSubpath,
    v: &MergedSubpath,
    through: usize,
) -> Option<ReachWitness> {
    let pm = PairMerges::new(g, a, b);
    let side = pm.side_of(through)?;
    let (ku, kv) = (pm.index_of(u)?, pm.index_of(v)?);
    bfs(&pm, side, ku, |k, _| k == kv).map(|seq| witness_from(&pm, side, &seq))
}

/// Like [`semi_reachable`] but only accepts witnesses of the given parity.
pub fn semi_reachable_with(
    g: &Dag,
    a: &PathSystem,
    b: &PathSystem,
    u: &MergedSubpath,
    v: &MergedSubpath,
    through: usize,
    parity: Parity,
) -> Option<ReachWitness> {
    let pm = PairMerges::new(g, a, b);
    let side = pm.side_of(through)?;
    let (ku, kv) = (pm.index_of(u)?, pm.index_of(v)?);
    let want = if parity == Parity::Above { 0 } else { 1 };
    bfs(&pm, side, ku, |k, len| k == kv && len % 2 == want).map(|seq| witness_from(&pm, side, &seq))
}

/// A shortest nontrivial witness that `u` is semi-reachable by itself from
/// above.
pub fn self_reachable_above(pm: &PairMerges, side: usize, u: usize) -> Option<ReachWitness> {
    bfs(pm, side, u, |k, len| k == u && len >= 2 && len % 2 == 0).map(|seq| witness_from(pm, side, &seq))
}

fn is_merge_between(pm: &PairMerges, side: usize, other_path: usize, e: EdgeId) -> bool {
    let other = 1 - side;
    let q = pm.systems[other].path(other_path);
    let Some(j) = q.edge_position(e) else { return false };
    pm.systems[side].paths().iter().any(|p| match p.edge_position(e) {
        Some(i) => matches!((p.predecessor(i), q.predecessor(j)), (Some(f), Some(h)) if f != h),
        None => false,
    })
}

/// Checks a witness against the raw definition, independently of the search.
pub fn validate_witness(g: &Dag, a: &PathSystem, b: &PathSystem, w: &ReachWitness) -> Result<()> {
    let pm = PairMerges::new(g, a, b);
    let bad = |msg: String| Err(Error::InvalidPath(format!("witness: {msg}")));
    let Some(side) = pm.side_of(w.through) else { return bad("unknown system".into()) };
    let other = 1 - side;
    let mut idx = Vec::with_capacity(w.sequence.len());
    for m in &w.sequence {
        match pm.index_of(m) {
            Some(k) => idx.push(k),
            None => return bad("not a merged subpath of the pair".into()),
        }
    }
    if w.odd_steps.len() != idx.len() / 2 || w.even_steps.len() != (idx.len() - 1) / 2 {
        return bad("step counts do not match the sequence".into());
    }
    let expected = if (idx.len() - 1) % 2 == 0 { Parity::Above } else { Parity::Below };
    if w.parity != expected {
        return bad("parity does not match the length".into());
    }
    for n in 1..idx.len() {
        let (prev, cur) = (idx[n - 1], idx[n]);
        if n % 2 == 1 {
            let t = w.odd_steps[n / 2];
            let (pp, pc) = (pm.placement(prev, other), pm.placement(cur, other));
            if pp.path != t || pc.path != t || pc.end > pp.start {
                return bad(format!("odd step {n} is not backward along one path"));
            }
            let seg = &pm.systems[other].path(t).edges()[pc.end..pp.start];
            if seg.iter().any(|&e| is_merge_between(&pm, side, t, e)) {
                return bad(format!("odd step {n} crosses a merging"));
            }
        } else {
            let h = w.even_steps[n / 2 - 1];
            let (pp, pc) = (pm.placement(prev, side), pm.placement(cur, side));
            if pp.path != h || pc.path != h || pp.end > pc.start {
                return bad(format!("even step {n} is not forward along one path"));
            }
        }
    }
    Ok(())
}

/// Shortens a witness until its even-step carriers are pairwise distinct.
pub fn regularize_witness(g: &Dag, a: &PathSystem, b: &PathSystem, w: &ReachWitness) -> Result<ReachWitness> {
    let pm = PairMerges::new(g, a, b);
    let side = pm.side_of(w.through).ok_or_else(|| Error::InvalidPath("witness: unknown system".into()))?;
    let mut seq: Vec<usize> =
        w.sequence.iter().map(|m| pm.index_of(m).ok_or(Error::PreconditionUnverified)).collect::<Result<_>>()?;
    loop {
        let cur = witness_from(&pm, side, &seq);
        let h = &cur.even_steps;
        let mut found = None;
        'outer: for l in 0..h.len() {
            for k in (0..l).rev() {
                if h[k] == h[l] {
                    found = Some((k, l));
                    break 'outer;
                }
            }
        }
        let Some((k, l)) = found else { return Ok(cur) };
        // keep gamma_0..gamma_{2k+1}, then gamma_{2l+2}..
        let mut shorter: Vec<usize> = seq[..=2 * k + 1].to_vec();
        shorter.extend_from_slice(&seq[2 * l + 2..]);
        let candidate = witness_from(&pm, side, &shorter);
        if validate_witness(g, a, b, &candidate).is_err() {
            return Err(Error::PreconditionUnverified);
        }
        seq = shorter;
    }
}

/// A node of the auxiliary graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuxNode {
    /// Source of the forward system.
    ForwardSource,
    ForwardSink,
    ReversedSource,
    ReversedSink,
    /// Start vertex of merged subpath `k`.
    Start(usize),
    /// End vertex of merged subpath `k`.
    End(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Forward,
    Reversed,
}

/// A maximal stretch of one path between consecutive anchors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxEdge {
    pub from: AuxNode,
    pub to: AuxNode,
    pub kind: SegmentKind,
    pub path: usize,
    /// Edges of the underlying graph in their original direction.
    pub edges: Vec<EdgeId>,
}

/// The auxiliary graph of two systems: segments of the forward system keep
/// their direction, segments of the reversed system are flipped, and merged
/// subpaths are cut out and replaced by their two anchor nodes.
#[derive(Clone, Debug)]
pub struct AuxGraph {
    pub merges: PairMerges,
    /// 0 if the first system of `merges` runs forward, else 1.
    pub forward_side: usize,
    pub edges: Vec<AuxEdge>,
}

/// Builds the auxiliary graph with `a` forward and `b` reversed.
pub fn build_auxiliary(g: &Dag, a: &PathSystem, b: &PathSystem) -> AuxGraph {
    aux_from(PairMerges::new(g, a, b), 0)
}

/// Builds the auxiliary graph of `pm` with side `forward_side` running forward.
pub fn aux_from(pm: PairMerges, forward_side: usize) -> AuxGraph {
    let mut edges = Vec::new();
    for side in 0..2 {
        let forward = side == forward_side;
        let sys = &pm.systems[side];
        for (pi, p) in sys.paths().iter().enumerate() {
            let mut node = if forward { AuxNode::ForwardSource } else { AuxNode::ReversedSource };
            let mut pos = 0;
            let mut stops: Vec<(AuxNode, usize, AuxNode, usize)> = pm.runs_on(side, pi)
                .iter()
                .map(|&k| {
                    let pl = pm.placement(k, side);
                    (AuxNode::Start(k), pl.start, AuxNode::End(k), pl.end)
                })
                .collect();
            let sink = if forward { AuxNode::ForwardSink } else { AuxNode::ReversedSink };
            stops.push((sink, p.len(), sink, p.len()));
            for (enter, at, leave, resume) in stops {
                let seg = p.edges()[pos..at].to_vec();
                let (from, to, kind) =
                    if forward { (node, enter, SegmentKind::Forward) } else { (enter, node, SegmentKind::Reversed) };
                edges.push(AuxEdge { from, to, kind, path: pi, edges: seg });
                node = leave;
                pos = resume;
            }
        }
    }
    edges.sort_by_key(|x| (x.from, x.to, x.path));
    AuxGraph { merges: pm, forward_side, edges }
}

/// An alternating cycle, read as a self-reach sequence through the forward
/// system: `sequence[0]` is reached again after the last element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxCycle {
    pub nodes: Vec<AuxNode>,
    pub sequence: Vec<usize>,
}

/// A maximal path of an acyclic auxiliary graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularPath {
    pub nodes: Vec<AuxNode>,
    pub segments: Vec<usize>,
}

impl AuxGraph {
    pub fn c_forward(&self) -> usize {
        self.merges.systems[self.forward_side].len()
    }

    pub fn c_reversed(&self) -> usize {
        self.merges.systems[1 - self.forward_side].len()
    }

    pub fn nodes(&self) -> Vec<AuxNode> {
        let mut v = vec![AuxNode::ForwardSource, AuxNode::ForwardSink, AuxNode::ReversedSource, AuxNode::ReversedSink];
        for k in 0..self.merges.merged.len() {
            v.push(AuxNode::Start(k));
            v.push(AuxNode::End(k));
        }
        v.sort();
        v
    }

    pub fn out_edges(&self, n: AuxNode) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].from == n).collect()
    }

    pub fn in_degree(&self, n: AuxNode) -> usize {
        self.edges.iter().filter(|e| e.to == n).count()
    }

    pub fn out_degree(&self, n: AuxNode) -> usize {
        self.edges.iter().filter(|e| e.from == n).count()
    }

    /// The merged subpath an anchor node stands for, with the vertex it maps to
    /// in the underlying graph.
    pub fn anchor(&self, g: &Dag, n: AuxNode) -> Option<(&MergedSubpath, crate::graph::VertexId)> {
        match n {
            AuxNode::Start(k) => Some((&self.merges.merged[k], self.merges.merged[k].run.start())),
            AuxNode::End(k) => Some((&self.merges.merged[k], g.head(self.merges.merged[k].last_edge()))),
            _ => None,
        }
    }

    /// Checks the terminal and anchor degrees.
    pub fn check_degrees(&self) -> Result<()> {
        let (cf, cr) = (self.c_forward(), self.c_reversed());
        let want = [
            (AuxNode::ForwardSource, 0, cf),
            (AuxNode::ForwardSink, cf, 0),
            (AuxNode::ReversedSink, 0, cr),
            (AuxNode::ReversedSource, cr, 0),
        ];
        for (n, i, o) in want {
            if self.in_degree(n) != i || self.out_degree(n) != o {
                return Err(Error::DegreeViolation(format!(
                    "{n:?} has in/out degree {}/{}, expected {i}/{o}",
                    self.in_degree(n),
                    self.out_degree(n)
                )));
            }
        }
        for n in self.nodes() {
            if matches!(n, AuxNode::Start(_) | AuxNode::End(_)) && (self.in_degree(n) != 1 || self.out_degree(n) != 1) {
                return Err(Error::DegreeViolation(format!(
                    "anchor {n:?} has in/out degree {}/{}",
                    self.in_degree(n),
                    self.out_degree(n)
                )));
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, g: &Dag) -> String {
        let label = |n: AuxNode| match n {
            AuxNode::ForwardSource => "S_fwd".to_string(),
            AuxNode::ForwardSink => "R_fwd".to_string(),
            AuxNode::ReversedSource => "S_rev".to_string(),
            AuxNode::ReversedSink => "R_rev".to_string(),
            AuxNode::Start(k) => format!("a{k}"),
            AuxNode::End(k) => format!("b{k}"),
        };
        let mut out = String::from("digraph aux {\n");
        for n in self.nodes() {
            let extra = match self.anchor(g, n) {
                Some((m, v)) => format!("{} @ {}", g.edge_name(m.merge_edge), g.vertex_name(v)),
                None => String::new(),
            };
            let _ = writeln!(out, "  \"{}\" [label=\"{} {}\"];", label(n), label(n), extra);
        }
        for e in &self.edges {
            let style = if e.kind == SegmentKind::Forward { "solid" } else { "dashed" };
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [style={style}];", label(e.from), label(e.to));
        }
        out.push_str("}\n");
        out
    }
}

/// An alternating cycle of the auxiliary graph, if any.
pub fn find_alternating_cycle(aux: &AuxGraph) -> Option<AuxCycle> {
    let nodes = aux.nodes();
    let index = |n: AuxNode| nodes.binary_search(&n).expect("known node");
    let succ: Vec<Vec<AuxNode>> = nodes.iter().map(|&n| aux.out_edges(n).iter().map(|&i| aux.edges[i].to).collect()).collect();
    // 0 = unseen, 1 = on stack, 2 = done
    let mut color = vec![0u8; nodes.len()];
    let mut best: Option<AuxCycle> = None;
    for root in 0..nodes.len() {
        if color[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < succ[v].len() {
                let w = index(succ[v][*next]);
                *next += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => {
                        let from = stack.iter().position(|&(x, _)| x == w).expect("on stack");
                        let cyc: Vec<AuxNode> = stack[from..].iter().map(|&(x, _)| nodes[x]).collect();
                        if let Some(c) = cycle_from(&cyc) {
                            if best.as_ref().is_none_or(|b| c.sequence < b.sequence) {
                                best = Some(c);
                            }
                        }
                    }
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    best
}

fn cycle_from(cyc: &[AuxNode]) -> Option<AuxCycle> {
    // rotate to the start anchor with the smallest merged index
    let start = cyc
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n {
            AuxNode::Start(k) => Some((*k, i)),
            _ => None,
        })
        .min()?
        .1;
    let nodes: Vec<AuxNode> = cyc[start..].iter().chain(&cyc[..start]).copied().collect();
    let sequence = nodes
        .iter()
        .map(|n| match n {
            AuxNode::Start(k) | AuxNode::End(k) => Some(*k),
            _ => None,
        })
        .collect::<Option<Vec<usize>>>()?;
    Some(AuxCycle { nodes, sequence })
}

/// Splits an acyclic auxiliary graph into its maximal paths from the two
/// out-going terminals.
pub fn regular_decomposition(aux: &AuxGraph) -> Result<Vec<RegularPath>> {
    aux.check_degrees()?;
    let mut out = Vec::new();
    let mut covered = BTreeSet::new();
    for root in [AuxNode::ForwardSource, AuxNode::ReversedSink] {
        for first in aux.out_edges(root) {
            let mut nodes = vec![root];
            let mut segments = Vec::new();
            let mut e = first;
            loop {
                segments.push(e);
                let to = aux.edges[e].to;
                nodes.push(to);
                covered.insert(to);
                let next = aux.out_edges(to);
                match next.as_slice() {
                    [] => break,
                    [n] => e = *n,
                    _ => return Err(Error::DegreeViolation(format!("{to:?} branches"))),
                }
                if segments.len() > aux.edges.len() {
                    return Err(Error::AuxCyclic);
                }
            }
            out.push(RegularPath { nodes, segments });
        }
    }
    let anchors = aux.nodes().into_iter().filter(|n| matches!(n, AuxNode::Start(_) | AuxNode::End(_)));
    for n in anchors {
        if !covered.contains(&n) {
            return Err(Error::AuxCyclic);
        }
    }
    Ok(out)
}

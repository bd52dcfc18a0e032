//! Merging-reducing reroutes and the fixpoint minimizers built on them.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Dag, EdgeId, Path};
use crate::menger::PathSystem;
use crate::merging::{count_mergings, merging_edges, pairwise_merge_count};
use crate::oracle::enumerate_systems;
use crate::reachability::{aux_from, find_alternating_cycle, regular_decomposition, regularize_witness, self_reachable_above, PairMerges};

/// Cap on alternative systems examined by the neighbourhood rule.
pub const NEIGHBOURHOOD_BUDGET: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    SamePairShortcut,
    CycleRotation,
    RepeatedPair,
    Neighbourhood,
    PrefixSwap,
    LastMergePrefix,
}

/// Replacement paths for one system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReroutePlan {
    pub kind: PlanKind,
    /// Pair index of the rerouted system.
    pub target_system: usize,
    /// Pair index of the system whose merges with the target shrink. Prefix
    /// plans act on the global count and have none.
    pub counterpart: Option<usize>,
    pub edits: Vec<(usize, Path)>,
    pub expected_delta: i64,
    /// Merging edges of the pair that the plan removes.
    pub removed: Vec<EdgeId>,
    fingerprint: u64,
}

/// One applied plan, for audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub kind: PlanKind,
    pub target: usize,
    pub counterpart: Option<usize>,
    pub pairwise_before: usize,
    pub pairwise_after: usize,
    pub global_before: usize,
    pub global_after: usize,
    pub removed: Vec<EdgeId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

fn fingerprint(systems: &[PathSystem]) -> u64 {
    let mut h = DefaultHasher::new();
    systems.hash(&mut h);
    h.finish()
}

fn position(systems: &[PathSystem], pair: usize) -> Result<usize> {
    systems
        .iter()
        .position(|s| s.pair().index == pair)
        .ok_or_else(|| Error::InvalidSystem(format!("no system for pair {pair}")))
}

fn sum_pairwise(systems: &[PathSystem]) -> usize {
    let mut total = 0;
    for i in 0..systems.len() {
        for j in i + 1..systems.len() {
            total += pairwise_merge_count(&systems[i], &systems[j]);
        }
    }
    total
}

/// Applies a plan produced against exactly these systems.
pub fn apply(g: &Dag, plan: &ReroutePlan, systems: &[PathSystem]) -> Result<Vec<PathSystem>> {
    if fingerprint(systems) != plan.fingerprint {
        return Err(Error::StalePlan);
    }
    let t = position(systems, plan.target_system)?;
    let fail = |e: Error| Error::ValidationFailure(e.to_string());
    let replaced = systems[t].with_replacements(g, &plan.edits).map_err(fail)?;
    replaced.validate_maximum(g).map_err(fail)?;
    let mut out = systems.to_vec();
    out[t] = replaced;
    match plan.counterpart {
        Some(c) => {
            let c = position(systems, c)?;
            let (before, after) = (pairwise_merge_count(&systems[t], &systems[c]), pairwise_merge_count(&out[t], &out[c]));
            if after >= before {
                return Err(Error::ValidationFailure(format!("pairwise count {before} -> {after} does not decrease")));
            }
        }
        None => {
            let (before, after) = (count_mergings(systems), count_mergings(&out));
            if after > before {
                return Err(Error::ValidationFailure(format!("global count {before} -> {after} increases")));
            }
        }
    }
    Ok(out)
}

type Score = (usize, usize);

// (path index, edge position) within one system.
type Spot = (usize, usize);

struct Candidate {
    kind: PlanKind,
    side: usize,
    system: PathSystem,
    removed: Vec<EdgeId>,
}

struct Search<'a> {
    g: &'a Dag,
    systems: &'a [PathSystem],
    sides: [usize; 2],
    judge: &'a dyn Fn(&[PathSystem]) -> Option<Score>,
}

impl<'a> Search<'a> {
    fn score(&self, c: &Candidate) -> Option<Score> {
        if c.system.validate_maximum(self.g).is_err() {
            return None;
        }
        let mut next = self.systems.to_vec();
        next[self.sides[c.side]] = c.system.clone();
        (self.judge)(&next)
    }

    fn plan(&self, c: Candidate) -> ReroutePlan {
        let t = self.sides[c.side];
        let other = self.sides[1 - c.side];
        let before = pairwise_merge_count(&self.systems[t], &self.systems[other]);
        let after = pairwise_merge_count(&c.system, &self.systems[other]);
        ReroutePlan {
            kind: c.kind,
            target_system: self.systems[t].pair().index,
            counterpart: Some(self.systems[other].pair().index),
            edits: c.system.paths().iter().cloned().enumerate().collect(),
            expected_delta: after as i64 - before as i64,
            removed: c.removed,
            fingerprint: fingerprint(self.systems),
        }
    }

    fn first(&self, cands: impl IntoIterator<Item = Candidate>) -> Option<ReroutePlan> {
        cands.into_iter().find(|c| self.score(c).is_some()).map(|c| self.plan(c))
    }

    fn run(&self) -> Option<ReroutePlan> {
        let pm = PairMerges::new(self.g, &self.systems[self.sides[0]], &self.systems[self.sides[1]]);
        if let Some(p) = self.first(shortcuts(self.g, &pm)) {
            return Some(p);
        }
        if let Some(p) = self.first(aux_rotations(self.g, &pm)) {
            return Some(p);
        }
        if let Some(p) = self.first(self_reach_rotations(self.g, &pm)) {
            return Some(p);
        }
        self.neighbourhood()
    }

    fn neighbourhood(&self) -> Option<ReroutePlan> {
        let mut best: Option<(Score, Candidate)> = None;
        for side in 0..2 {
            let current = &self.systems[self.sides[side]];
            let Ok(all) = enumerate_systems(self.g, current.pair(), NEIGHBOURHOOD_BUDGET) else { continue };
            for system in all {
                if &system == current {
                    continue;
                }
                let c = Candidate { kind: PlanKind::Neighbourhood, side, system, removed: Vec::new() };
                if let Some(s) = self.score(&c) {
                    if best.as_ref().is_none_or(|(b, _)| s < *b) {
                        best = Some((s, c));
                    }
                }
            }
        }
        best.map(|(_, mut c)| {
            let other = &self.systems[self.sides[1 - c.side]];
            let before = merging_edges(self.systems[self.sides[c.side]].paths().iter().chain(other.paths()));
            let after = merging_edges(c.system.paths().iter().chain(other.paths()));
            c.removed = before.difference(&after).copied().collect();
            self.plan(c)
        })
    }
}

fn splice(g: &Dag, parts: &[(&Path, usize, usize)]) -> Option<Path> {
    let mut edges = Vec::new();
    for (p, i, j) in parts {
        edges.extend_from_slice(&p.edges()[*i..*j]);
    }
    Path::new(g, parts[0].0.start(), edges).ok()
}

// Two runs e before f of one path pair: either path follows the other between
// their starts, so f stops being a merging.
fn shortcuts(g: &Dag, pm: &PairMerges) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (pi, p) in pm.systems[0].paths().iter().enumerate() {
        let runs = pm.runs_on(0, pi);
        for (x, &e) in runs.iter().enumerate() {
            for &f in &runs[x + 1..] {
                let (pe, pf) = (pm.placement(e, 0), pm.placement(f, 0));
                let (qe, qf) = (pm.placement(e, 1), pm.placement(f, 1));
                if qe.path != qf.path || qe.start >= qf.start {
                    continue;
                }
                let q = pm.systems[1].path(qe.path);
                let removed = vec![pm.merged[f].merge_edge];
                if let Some(np) = splice(g, &[(p, 0, pe.start), (q, qe.start, qf.start), (p, pf.start, p.len())]) {
                    if let Ok(s) = pm.systems[0].with_replacements(g, &[(pi, np)]) {
                        out.push(Candidate { kind: PlanKind::SamePairShortcut, side: 0, system: s, removed: removed.clone() });
                    }
                }
                if let Some(nq) = splice(g, &[(q, 0, qe.start), (p, pe.start, pf.start), (q, qf.start, q.len())]) {
                    if let Ok(s) = pm.systems[1].with_replacements(g, &[(qe.path, nq)]) {
                        out.push(Candidate { kind: PlanKind::SamePairShortcut, side: 1, system: s, removed });
                    }
                }
            }
        }
    }
    out
}

/// Reroutes the system on `side` along a self-reach cycle `seq` (even
/// positions are left through their predecessor on the other system).
pub fn rotation(g: &Dag, pm: &PairMerges, side: usize, seq: &[usize]) -> Option<PathSystem> {
    if seq.len() < 2 || seq.len() % 2 == 1 {
        return None;
    }
    let other = 1 - side;
    let sys = &pm.systems[side];
    let mut switch: HashMap<Spot, (Vec<EdgeId>, Spot)> = HashMap::new();
    for k in 0..seq.len() / 2 {
        let (even, odd) = (seq[2 * k], seq[2 * k + 1]);
        let (oe, oo) = (pm.placement(even, other), pm.placement(odd, other));
        if oe.path != oo.path || oo.end > oe.start {
            return None;
        }
        let borrowed = pm.systems[other].path(oe.path).edges()[oo.end..oe.start].to_vec();
        let exit = (pm.placement(odd, side).path, pm.placement(odd, side).end);
        let entry = (pm.placement(even, side).path, pm.placement(even, side).start);
        if switch.insert(exit, (borrowed, entry)).is_some() {
            return None;
        }
    }
    let limit = g.edge_count() * 2 + 2;
    let mut used = HashSet::new();
    let mut paths = Vec::with_capacity(sys.len());
    for start in 0..sys.len() {
        let (mut cur, mut pos) = (start, 0);
        let mut edges = Vec::new();
        loop {
            if edges.len() > limit {
                return None;
            }
            if let Some((borrowed, entry)) = switch.get(&(cur, pos)) {
                if !used.insert((cur, pos)) {
                    return None;
                }
                edges.extend_from_slice(borrowed);
                (cur, pos) = *entry;
                continue;
            }
            let p = sys.path(cur);
            if pos == p.len() {
                break;
            }
            edges.push(p.edges()[pos]);
            pos += 1;
        }
        paths.push(Path::new(g, sys.pair().source, edges).ok()?);
    }
    PathSystem::new(g, sys.pair(), paths).ok()
}

fn removed_by(pm: &PairMerges, seq: &[usize]) -> Vec<EdgeId> {
    let mut v: Vec<EdgeId> = seq.iter().step_by(2).map(|&k| pm.merged[k].merge_edge).collect();
    v.sort();
    v
}

fn aux_rotations(g: &Dag, pm: &PairMerges) -> Vec<Candidate> {
    let mut out = Vec::new();
    for side in 0..2 {
        let aux = aux_from(pm.clone(), side);
        if let Some(c) = find_alternating_cycle(&aux) {
            if let Some(system) = rotation(g, pm, side, &c.sequence) {
                out.push(Candidate { kind: PlanKind::CycleRotation, side, system, removed: removed_by(pm, &c.sequence) });
            }
        }
    }
    out
}

// Self-reach cycles through either system, starting with the anchors whose
// owner pair repeats on a regular path.
fn self_reach_rotations(g: &Dag, pm: &PairMerges) -> Vec<Candidate> {
    let mut out = Vec::new();
    for side in 0..2 {
        let mut order: Vec<usize> = Vec::new();
        if let Ok(paths) = regular_decomposition(&aux_from(pm.clone(), side)) {
            for rp in paths {
                let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
                for n in &rp.nodes {
                    if let crate::reachability::AuxNode::Start(k) | crate::reachability::AuxNode::End(k) = *n {
                        let owners = (pm.placement(k, 0).path, pm.placement(k, 1).path);
                        if let Some(&first) = seen.get(&owners) {
                            if first != k {
                                order.push(first);
                                order.push(k);
                            }
                        } else {
                            seen.insert(owners, k);
                        }
                    }
                }
            }
        }
        order.extend(0..pm.merged.len());
        let mut tried = HashSet::new();
        for k in order {
            if !tried.insert(k) {
                continue;
            }
            let Some(w) = self_reachable_above(pm, side, k) else { continue };
            let (a, b) = (&pm.systems[0], &pm.systems[1]);
            let w = regularize_witness(g, a, b, &w).unwrap_or(w);
            let seq: Vec<usize> = w.sequence[..w.len()].iter().filter_map(|m| pm.index_of(m)).collect();
            if let Some(system) = rotation(g, pm, side, &seq) {
                out.push(Candidate { kind: PlanKind::RepeatedPair, side, system, removed: removed_by(pm, &seq) });
            }
        }
    }
    out
}

fn require_acyclic(g: &Dag) -> Result<()> {
    if g.is_acyclic() {
        Ok(())
    } else {
        Err(Error::CyclicInput)
    }
}

/// A plan that strictly lowers the merging count between `a` and `b`, trying
/// the shortcut, auxiliary-cycle, self-reach and neighbourhood rules in turn.
pub fn detect_reducing_rerouting(g: &Dag, a: &PathSystem, b: &PathSystem) -> Result<Option<ReroutePlan>> {
    require_acyclic(g)?;
    let systems = [a.clone(), b.clone()];
    let before = pairwise_merge_count(a, b);
    let judge = |next: &[PathSystem]| {
        let after = pairwise_merge_count(&next[0], &next[1]);
        (after < before).then_some((after, 0))
    };
    Ok(Search { g, systems: &systems, sides: [0, 1], judge: &judge }.run())
}

/// Applies reducing plans between two systems until none fires.
pub fn minimize_pair(g: &Dag, a: &PathSystem, b: &PathSystem) -> Result<(PathSystem, PathSystem, Trace)> {
    require_acyclic(g)?;
    let mut systems = vec![a.clone(), b.clone()];
    let mut trace = Trace::default();
    while let Some(plan) = detect_reducing_rerouting(g, &systems[0], &systems[1])? {
        let next = apply(g, &plan, &systems)?;
        trace.steps.push(step(&plan, &systems, &next));
        systems = next;
    }
    let b = systems.pop().expect("two systems");
    let a = systems.pop().expect("two systems");
    Ok((a, b, trace))
}

fn step(plan: &ReroutePlan, before: &[PathSystem], after: &[PathSystem]) -> TraceStep {
    let pw = |s: &[PathSystem]| {
        let t = position(s, plan.target_system).expect("target present");
        match plan.counterpart {
            Some(c) => pairwise_merge_count(&s[t], &s[position(s, c).expect("counterpart present")]),
            None => count_mergings(s),
        }
    };
    TraceStep {
        kind: plan.kind,
        target: plan.target_system,
        counterpart: plan.counterpart,
        pairwise_before: pw(before),
        pairwise_after: pw(after),
        global_before: count_mergings(before),
        global_after: count_mergings(after),
        removed: plan.removed.clone(),
    }
}

/// Round-robin over system pairs. A plan is taken when it lowers its pair's
/// count and lowers (global count, sum of pairwise counts) lexicographically.
pub fn minimize_all(g: &Dag, systems: &[PathSystem]) -> Result<(Vec<PathSystem>, Trace)> {
    require_acyclic(g)?;
    let mut cur = systems.to_vec();
    let mut order: Vec<usize> = (0..cur.len()).collect();
    order.sort_by_key(|&i| cur[i].pair().index);
    let mut trace = Trace::default();
    loop {
        let mut fired = false;
        for x in 0..order.len() {
            for y in x + 1..order.len() {
                let (i, j) = (order[x], order[y]);
                loop {
                    let pw = pairwise_merge_count(&cur[i], &cur[j]);
                    let measure = (count_mergings(&cur), sum_pairwise(&cur));
                    let judge = |next: &[PathSystem]| {
                        let m = (count_mergings(next), sum_pairwise(next));
                        (pairwise_merge_count(&next[i], &next[j]) < pw && m < measure).then_some(m)
                    };
                    let search = Search { g, systems: &cur, sides: [i, j], judge: &judge };
                    let Some(plan) = search.run() else { break };
                    let next = apply(g, &plan, &cur)?;
                    trace.steps.push(step(&plan, &cur, &next));
                    cur = next;
                    fired = true;
                }
            }
        }
        if !fired {
            return Ok((cur, trace));
        }
    }
}

fn prefix_plan(kind: PlanKind, systems: &[PathSystem], t: usize, edits: Vec<(usize, Path)>, removed: Vec<EdgeId>) -> ReroutePlan {
    ReroutePlan {
        kind,
        target_system: systems[t].pair().index,
        counterpart: None,
        edits,
        expected_delta: 0,
        removed,
        fingerprint: fingerprint(systems),
    }
}

// Every other path through `e` whose predecessor there differs from `pred`.
fn merging_partners(systems: &[PathSystem], own: (usize, usize), e: EdgeId, pred: EdgeId) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (s, sys) in systems.iter().enumerate() {
        if s == own.0 {
            continue;
        }
        for (k, q) in sys.paths().iter().enumerate() {
            if let Some(j) = q.edge_position(e) {
                if q.predecessor(j).is_some_and(|f| f != pred) {
                    out.push((s, k, j));
                }
            }
        }
    }
    out
}

fn prefix_candidates(g: &Dag, systems: &[PathSystem]) -> Vec<ReroutePlan> {
    let mut plans = Vec::new();
    let mut first_edges: HashMap<EdgeId, usize> = HashMap::new();
    for p in systems.iter().flat_map(|s| s.paths()) {
        if let Some(&e) = p.edges().first() {
            *first_edges.entry(e).or_default() += 1;
        }
    }
    let all_merges = merging_edges(systems.iter().flat_map(|s| s.paths()));
    // a private-prefix path lends its prefix to the paths it first merges with
    for (s, sys) in systems.iter().enumerate() {
        for (k, beta) in sys.paths().iter().enumerate() {
            if beta.edges().first().is_none_or(|e| first_edges[e] > 1) {
                continue;
            }
            let first = (1..beta.len()).find_map(|i| {
                let e = beta.edges()[i];
                let partners = merging_partners(systems, (s, k), e, beta.edges()[i - 1]);
                (!partners.is_empty()).then_some((i, partners))
            });
            let Some((i, partners)) = first else { continue };
            for (t, pk, j) in partners {
                let eta = systems[t].path(pk);
                let shared = beta.edges()[i..].iter().zip(&eta.edges()[j..]).take_while(|(x, y)| x == y).count();
                let Some(np) = splice(g, &[(beta, 0, i + shared), (eta, j + shared, eta.len())]) else { continue };
                plans.push(prefix_plan(PlanKind::PrefixSwap, systems, t, vec![(pk, np)], vec![beta.edges()[i]]));
            }
        }
    }
    // a single-path system re-roots at its last merging
    for (s, sys) in systems.iter().enumerate() {
        if sys.len() != 1 {
            continue;
        }
        let alpha = sys.path(0);
        let without: Vec<&Path> =
            systems.iter().enumerate().filter(|&(x, _)| x != s).flat_map(|(_, y)| y.paths()).collect();
        let others = merging_edges(without);
        let last = (1..alpha.len()).rev().find(|&i| {
            let e = alpha.edges()[i];
            all_merges.contains(&e) && !others.contains(&e)
        });
        let Some(i) = last else { continue };
        let e = alpha.edges()[i];
        let partners = merging_partners(systems, (s, 0), e, alpha.edges()[i - 1]);
        let Some(&(t, pk, j)) = partners.first() else { continue };
        let x = systems[t].path(pk);
        let Some(np) = splice(g, &[(x, 0, j), (alpha, i, alpha.len())]) else { continue };
        plans.push(prefix_plan(PlanKind::LastMergePrefix, systems, s, vec![(0, np)], vec![e]));
    }
    plans
}

/// Applies the shared-source prefix rules until no new configuration with a
/// non-increasing global count is reachable.
pub fn prefix_reroute_pass(g: &Dag, systems: &[PathSystem]) -> Result<(Vec<PathSystem>, Trace)> {
    require_acyclic(g)?;
    let source = systems.first().map(|s| s.pair().source);
    if systems.iter().any(|s| Some(s.pair().source) != source) {
        return Err(Error::SourceMismatch);
    }
    let mut cur = systems.to_vec();
    let mut seen = HashSet::new();
    seen.insert(fingerprint(&cur));
    let mut trace = Trace::default();
    'outer: loop {
        for plan in prefix_candidates(g, &cur) {
            let Ok(next) = apply(g, &plan, &cur) else { continue };
            if !seen.insert(fingerprint(&next)) {
                continue;
            }
            trace.steps.push(step(&plan, &cur, &next));
            cur = next;
            continue 'outer;
        }
        return Ok((cur, trace));
    }
}

/// The full minimizer: the prefix pass when every system shares a source,
/// then [`minimize_all`], repeated while the global count keeps falling.
pub fn minimize_systems(g: &Dag, systems: &[PathSystem]) -> Result<(Vec<PathSystem>, Trace)> {
    require_acyclic(g)?;
    let shared = systems.len() > 1 && systems.windows(2).all(|w| w[0].pair().source == w[1].pair().source);
    let mut cur = systems.to_vec();
    let mut trace = Trace::default();
    loop {
        let before = count_mergings(&cur);
        if shared {
            let (next, t) = prefix_reroute_pass(g, &cur)?;
            trace.steps.extend(t.steps);
            cur = next;
        }
        let (next, t) = minimize_all(g, &cur)?;
        trace.steps.extend(t.steps);
        cur = next;
        if !shared || count_mergings(&cur) >= before {
            return Ok((cur, trace));
        }
    }
}

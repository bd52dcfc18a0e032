//! Witness and counterexample instances: compositions for lower bounds,
//! extremal graphs, the cyclic family, the butterfly, imaginary extensions and
//! seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::Variant;
use crate::error::{Error, Result};
use crate::graph::{Dag, DagBuilder, Network, PairLayout, Path};
use crate::menger::{min_cut, PathSystem};
use crate::merging::count_mergings;
use crate::oracle::{enumerate_systems, search_below, OracleConfig};
use crate::rerouting::detect_reducing_rerouting;

const EXTREMAL_22: &str = include_str!("../data/extremal_22.txt");
const EXTREMAL_STAR33: &str = include_str!("../data/extremal_star33.txt");

/// A generated network with its expected optimum, when one is known.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub network: Network,
    pub intended: Option<(Variant, usize)>,
    pub notes: Vec<String>,
    /// Path systems the construction was built around; empty when the
    /// generator has no preferred systems.
    pub planted: Vec<PathSystem>,
}

impl Instance {
    fn new(name: impl Into<String>, network: Network) -> Instance {
        Instance { name: name.into(), network, intended: None, notes: Vec::new(), planted: Vec::new() }
    }

    fn note(mut self, text: impl Into<String>) -> Instance {
        self.notes.push(text.into());
        self
    }

    fn intend(mut self, variant: Variant, value: usize) -> Instance {
        self.intended = Some((variant, value));
        self
    }

    pub fn dag(&self) -> &Dag {
        &self.network.dag
    }

    /// Min-cut of every pair, in pair order.
    pub fn cuts(&self) -> Result<Vec<usize>> {
        self.network.pairs.iter().map(|p| min_cut(&self.network.dag, p.source, p.sink)).collect()
    }

    /// Edge-list text with notes and the intended value as leading comments.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.name);
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        if let Some((v, x)) = self.intended {
            out.push_str(&format!("# intended {v} {x}\n"));
        }
        out + &self.network.to_text()
    }

    /// Reads text written by [`Instance::to_text`]; plain edge lists work too.
    pub fn from_text(text: &str) -> Result<Instance> {
        let network = Network::parse(text)?;
        let mut inst = Instance::new("", network);
        for (n, line) in text.lines().enumerate() {
            let Some(c) = line.trim().strip_prefix('#') else { continue };
            let c = c.trim();
            if let Some(rest) = c.strip_prefix("intended ") {
                let bad = || Error::Parse { line: n + 1, message: format!("bad intended value `{rest}`") };
                let (v, x) = rest.split_once(' ').ok_or_else(bad)?;
                inst.intended = Some((v.parse().map_err(|_| bad())?, x.trim().parse().map_err(|_| bad())?));
            } else if n == 0 {
                inst.name = c.to_string();
            } else {
                inst.notes.push(c.to_string());
            }
        }
        Ok(inst)
    }
}

// Builds a graph while tracking path edge lists, naming wiring edges `w000`...
struct Draft {
    b: DagBuilder,
    wires: usize,
}

impl Draft {
    fn new() -> Draft {
        Draft { b: DagBuilder::new(), wires: 0 }
    }

    fn wire(&mut self, from: &str, to: &str) -> String {
        let id = format!("w{:03}", self.wires);
        self.wires += 1;
        self.b.edge(id.clone(), from, to).expect("fresh wire id");
        id
    }

    fn wires(&mut self, from: &str, to: &str, count: usize) {
        for _ in 0..count {
            self.wire(from, to);
        }
    }

    fn edge(&mut self, id: &str, from: &str, to: &str) {
        self.b.edge(id, from, to).expect("distinct edge ids");
    }

    fn embed(&mut self, net: &Network, prefix: &str) {
        let g = &net.dag;
        for v in g.vertices() {
            self.b.vertex(format!("{prefix}{}", g.vertex_name(v)));
        }
        for e in g.edges() {
            let (t, h) = (g.vertex_name(g.tail(e)), g.vertex_name(g.head(e)));
            self.edge(&format!("{prefix}{}", g.edge_name(e)), &format!("{prefix}{t}"), &format!("{prefix}{h}"));
        }
    }
}

fn systems_from_names(g: &Dag, net: &Network, paths: &[(usize, Vec<String>)]) -> Result<Vec<PathSystem>> {
    let mut grouped = vec![Vec::new(); net.pairs.len()];
    for (pair, names) in paths {
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        grouped[*pair].push(Path::from_edge_names(g, &refs)?);
    }
    grouped.into_iter().zip(&net.pairs).map(|(p, &pair)| PathSystem::new(g, pair, p)).collect()
}

/// Two paths per sink from `S`; both sinks reach the bottleneck `W -> X`.
pub fn gen_butterfly() -> Instance {
    let text = "source S\nsink Y\nsink Z\n\
        edge e1 S T\nedge e2 S U\nedge e3 T Y\nedge e4 T W\nedge e5 U W\n\
        edge e6 U Z\nedge e7 W X\nedge e8 X Y\nedge e9 X Z\n";
    let network = Network::parse(text).expect("butterfly parses");
    let g = &network.dag;
    let planted = systems_from_names(
        g,
        &network,
        &[
            (0, vec!["e1".into(), "e3".into()]),
            (0, vec!["e2".into(), "e5".into(), "e7".into(), "e8".into()]),
            (1, vec!["e2".into(), "e6".into()]),
            (1, vec!["e1".into(), "e4".into(), "e7".into(), "e9".into()]),
        ],
    )
    .expect("butterfly systems");
    let mut inst = Instance::new("butterfly", network)
        .intend(Variant::MStar, 1)
        .note("single source S, sinks Y and Z, one coding node at W");
    inst.planted = planted;
    inst
}

/// The smallest two-pair instance with a forced merging.
pub fn gen_gadget_11() -> Instance {
    let text = "pair S1 R1\npair S2 R2\n\
        edge a S1 x\nedge b S2 x\nedge m x y\nedge c y R1\nedge d y R2\n";
    Instance::new("gadget_11", Network::parse(text).expect("gadget parses"))
        .intend(Variant::M, 1)
        .note("both pairs must cross the edge x -> y")
}

fn swap_pairs(inst: Instance) -> Result<Instance> {
    let pairs: Vec<_> = inst.network.pairs.iter().rev().map(|p| (p.source, p.sink)).collect();
    let network = Network::new(inst.network.dag.clone(), &pairs, inst.network.layout)?;
    Ok(Instance { network, planted: Vec::new(), ..inst })
}

/// Default part builder for compositions: the (1,1) gadget, isolated chains
/// for (n,1) and (1,n), and the frozen (2,2) extremal instance.
pub fn witness_pair(c1: u32, c2: u32) -> Result<Instance> {
    match (c1, c2) {
        (1, 1) => Ok(gen_gadget_11()),
        (2, 2) => gen_extremal_22(),
        (c, 1) if c > 1 => gen_isolated(c - 1, 1, 1, &witness_pair),
        (1, c) if c > 1 => swap_pairs(witness_pair(c, 1)?),
        _ => Err(Error::PartUnavailable(vec![c1, c2])),
    }
}

/// Places two part instances in parallel on the first pair and in series on
/// the second, so every merging of the second part comes after every merging
/// of the first along the second pair's paths.
pub fn gen_isolated(c10: u32, c11: u32, c2: u32, part: &dyn Fn(u32, u32) -> Result<Instance>) -> Result<Instance> {
    if c11 == 0 {
        return part(c10, c2);
    }
    if c10 == 0 {
        return part(c11, c2);
    }
    let p0 = part(c10, c2)?;
    let p1 = part(c11, c2)?;
    let mut d = Draft::new();
    d.embed(&p0.network, "a.");
    d.embed(&p1.network, "b.");
    let name = |inst: &Instance, prefix: &str, pair: usize, sink: bool| {
        let p = inst.network.pairs[pair];
        let v = if sink { p.sink } else { p.source };
        format!("{prefix}{}", inst.network.dag.vertex_name(v))
    };
    let (a_s1, a_r1, a_s2, a_r2) = (name(&p0, "a.", 0, false), name(&p0, "a.", 0, true), name(&p0, "a.", 1, false), name(&p0, "a.", 1, true));
    let (b_s1, b_r1, b_s2, b_r2) = (name(&p1, "b.", 0, false), name(&p1, "b.", 0, true), name(&p1, "b.", 1, false), name(&p1, "b.", 1, true));
    d.wires("S1", &a_s1, c10 as usize);
    d.wires("S1", &b_s1, c11 as usize);
    d.wires(&a_r1, "R1", c10 as usize);
    d.wires(&b_r1, "R1", c11 as usize);
    d.wires("S2", &a_s2, c2 as usize);
    for k in 0..c2 {
        let relay = format!("z{k}");
        d.wire(&a_r2, &relay);
        d.wire(&relay, &b_s2);
    }
    d.wires(&b_r2, "R2", c2 as usize);
    let g = d.b.build()?;
    let network = Network::from_names(g, &[("S1", "R1"), ("S2", "R2")], PairLayout::Pairs)?;
    let mut inst = Instance::new(format!("isolated_{}_{}_{}", c10, c11, c2), network)
        .note(format!("part a: {}, part b: {}", p0.name, p1.name));
    if let (Some((_, x)), Some((_, y))) = (p0.intended, p1.intended) {
        inst = inst.intend(Variant::M, x + y);
    }
    Ok(inst)
}

/// `n` copies of the (1,1) gadget isolated along a single second-pair path:
/// cuts (n, 1), optimum n.
pub fn gen_isolated_chain(n: u32) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidCut(0));
    }
    witness_pair(n, 1)
}

/// Systems `0..k` against systems `k..`: every cross pair gets its own part,
/// chained in a fixed order so no two systems on the same side meet.
pub fn gen_split_family(cuts: &[u32], k: usize, part: &dyn Fn(u32, u32) -> Result<Instance>) -> Result<Instance> {
    if let Some(&c) = cuts.iter().find(|&&c| c == 0) {
        return Err(Error::InvalidCut(c as i64));
    }
    if k == 0 || k >= cuts.len() {
        return Err(Error::InvalidPair(format!("split index {k} must lie in 1..{}", cuts.len())));
    }
    if cuts.len() == 2 {
        return part(cuts[0], cuts[1]);
    }
    let n = cuts.len();
    let mut d = Draft::new();
    let mut total = Some(0);
    let mut names = Vec::new();
    // chain[s] lists (source, sink) of the part terminals system s crosses, in order
    let mut chain: Vec<Vec<(String, String)>> = vec![Vec::new(); n];
    for i in 0..k {
        for j in k..n {
            let p = part(cuts[i], cuts[j])?;
            let prefix = format!("g{i}_{j}.");
            d.embed(&p.network, &prefix);
            let term = |x: usize| {
                let pr = p.network.pairs[x];
                let g = &p.network.dag;
                (format!("{prefix}{}", g.vertex_name(pr.source)), format!("{prefix}{}", g.vertex_name(pr.sink)))
            };
            chain[i].push(term(0));
            chain[j].push(term(1));
            total = total.zip(p.intended).map(|(t, (_, x))| t + x);
            names.push(p.name.clone());
        }
    }
    for (s, parts) in chain.iter().enumerate() {
        let c = cuts[s] as usize;
        let (src, dst) = (format!("S{}", s + 1), format!("R{}", s + 1));
        d.wires(&src, &parts[0].0, c);
        for (x, w) in parts.windows(2).enumerate() {
            for r in 0..c {
                let relay = format!("z{s}_{x}_{r}");
                d.wire(&w[0].1, &relay);
                d.wire(&relay, &w[1].0);
            }
        }
        d.wires(&parts[parts.len() - 1].1, &dst, c);
    }
    let g = d.b.build()?;
    let terms: Vec<(String, String)> = (1..=n).map(|s| (format!("S{s}"), format!("R{s}"))).collect();
    let refs: Vec<(&str, &str)> = terms.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let network = Network::from_names(g, &refs, PairLayout::Pairs)?;
    let label = cuts.iter().map(u32::to_string).collect::<Vec<_>>().join("_");
    let mut inst = Instance::new(format!("split_{label}_at_{k}"), network).note(format!("parts: {}", names.join(", ")));
    if let Some(t) = total {
        inst = inst.intend(Variant::M, t);
    }
    Ok(inst)
}

/// A merge pattern: each system lists, per path, the merge edges `m{k}` it
/// crosses in order; connectors are named `c{tag}{path}{n}` and `c{tag}{path}z`.
pub struct Pattern<'a> {
    pub terminals: &'a [(&'a str, &'a str)],
    pub tags: &'a [&'a str],
    pub paths: &'a [Vec<Vec<usize>>],
    pub merges: usize,
    pub layout: PairLayout,
}

impl Pattern<'_> {
    pub fn build(&self) -> Result<(Network, Vec<PathSystem>)> {
        let mut d = Draft::new();
        let mut walks = Vec::new();
        for (s, ((src, dst), tag)) in self.terminals.iter().zip(self.tags).enumerate() {
            for (pi, seq) in self.paths[s].iter().enumerate() {
                let mut names = Vec::new();
                let mut at = src.to_string();
                for (n, &k) in seq.iter().enumerate() {
                    let c = format!("c{tag}{pi}{n}");
                    d.edge(&c, &at, &format!("x{k}"));
                    names.push(c);
                    names.push(format!("m{k}"));
                    at = format!("y{k}");
                }
                let c = format!("c{tag}{pi}z");
                d.edge(&c, &at, dst);
                names.push(c);
                walks.push((s, names));
            }
        }
        for k in 0..self.merges {
            d.edge(&format!("m{k}"), &format!("x{k}"), &format!("y{k}"));
        }
        let g = d.b.build()?;
        let network = Network::from_names(g, self.terminals, self.layout)?;
        let systems = systems_from_names(&network.dag.clone(), &network, &walks)?;
        Ok((network, systems))
    }
}

/// Seven merged subpaths whose semi-reachability relations are known: runs
/// `m0..m5` close a self-reach through the first system and `m6` trails it.
pub fn gen_semi_reach_example() -> Instance {
    let paths = [vec![vec![1, 2, 6], vec![3, 4], vec![5, 0]], vec![vec![1, 0], vec![3, 2], vec![5, 4], vec![6]]];
    let (network, planted) = Pattern {
        terminals: &[("Si", "Ri"), ("Sj", "Rj")],
        tags: &["i", "j"],
        paths: &paths,
        merges: 7,
        layout: PairLayout::Pairs,
    }
    .build()
    .expect("semi-reach pattern builds");
    let mut inst = Instance::new("semi_reach", network).note("seven runs m0..m6 shared by the planted systems");
    inst.planted = planted;
    inst
}

// Permutations of 0..k in recursive insertion order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

fn pattern_22(a1: &[Vec<usize>], a2: &[Vec<usize>], k: usize) -> Result<(Network, Vec<PathSystem>)> {
    Pattern {
        terminals: &[("S1", "R1"), ("S2", "R2")],
        tags: &["a", "b"],
        paths: &[a1.to_vec(), a2.to_vec()],
        merges: k,
        layout: PairLayout::Pairs,
    }
    .build()
}

/// Searches two-path patterns with `k` merge edges for an instance whose
/// optimum is at least `target` and whose planted systems admit no reducing
/// plan. The first instance is placed `m0..` in order on the first system.
pub fn search_extremal_22(k: usize, target: usize, config: &OracleConfig) -> Result<Instance> {
    for perm in permutations(k) {
        for split in 0..=k {
            let a2 = [perm[..split].to_vec(), perm[split..].to_vec()];
            for a in 0..=k {
                let a1 = [(0..a).collect::<Vec<_>>(), (a..k).collect()];
                let Ok((network, planted)) = pattern_22(&a1, &a2, k) else { continue };
                let g = &network.dag;
                if network.pairs.iter().any(|p| min_cut(g, p.source, p.sink).ok() != Some(2)) {
                    continue;
                }
                if search_below(g, &network.pairs, config, target)?.is_some() {
                    continue;
                }
                if detect_reducing_rerouting(g, &planted[0], &planted[1])?.is_some() {
                    continue;
                }
                let mut inst = Instance::new("extremal_22", network)
                    .intend(Variant::M, target)
                    .note(format!("first system {a1:?}, second system {a2:?}"))
                    .note("two sources, two sinks, both cuts 2");
                inst.planted = planted;
                return Ok(inst);
            }
        }
    }
    Err(Error::SearchExhausted)
}

/// The frozen (2,2) instance with optimum 5.
pub fn gen_extremal_22() -> Result<Instance> {
    Instance::from_text(EXTREMAL_22)
}

// Three paths per sink from `S`. Path i of the first system and path
// `matching[i]` of the second share a trunk edge `S -> t{i}`.
fn pattern_star33(k: usize, a1: &[Vec<usize>; 3], a2: &[Vec<usize>; 3], matching: &[Option<usize>; 3]) -> Option<(Network, Vec<PathSystem>)> {
    let mut d = Draft::new();
    for m in 0..k {
        d.edge(&format!("m{m}"), &format!("x{m}"), &format!("y{m}"));
    }
    let mut walks = Vec::new();
    let mut trunk: [Option<(String, String)>; 3] = [None, None, None];
    for (i, seq) in a1.iter().enumerate() {
        let mut edges = Vec::new();
        let mut at = "S".to_string();
        if let Some(j) = matching[i] {
            let t = format!("t{i}");
            let id = d.wire("S", &t);
            trunk[j] = Some((t.clone(), id.clone()));
            edges.push(id);
            at = t;
        }
        for &m in seq {
            edges.push(d.wire(&at, &format!("x{m}")));
            edges.push(format!("m{m}"));
            at = format!("y{m}");
        }
        edges.push(d.wire(&at, "R1"));
        walks.push((0, edges));
    }
    for (j, seq) in a2.iter().enumerate() {
        let mut edges = Vec::new();
        let mut at = "S".to_string();
        if let Some((t, id)) = &trunk[j] {
            edges.push(id.clone());
            at = t.clone();
        }
        for &m in seq {
            edges.push(d.wire(&at, &format!("x{m}")));
            edges.push(format!("m{m}"));
            at = format!("y{m}");
        }
        edges.push(d.wire(&at, "R2"));
        walks.push((1, edges));
    }
    let g = d.b.build().ok()?;
    let network = Network::from_names(g, &[("S", "R1"), ("S", "R2")], PairLayout::SharedSource).ok()?;
    let systems = systems_from_names(&network.dag.clone(), &network, &walks).ok()?;
    Some((network, systems))
}

/// Searches single-source patterns with cuts (3,3) and `k` merge edges for an
/// optimum of at least `target`. Candidates that a single-system re-selection
/// already improves are discarded before the full oracle runs.
pub fn search_extremal_star33(k: usize, target: usize, config: &OracleConfig) -> Result<Instance> {
    let mut a1s = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            let c = k - a - b;
            if a >= b && b >= c {
                a1s.push([(0..a).collect::<Vec<_>>(), (a..a + b).collect(), (a + b..k).collect()]);
            }
        }
    }
    let mut a2s: Vec<[Vec<usize>; 3]> = Vec::new();
    for p in permutations(k) {
        for a in 0..=k {
            for b in a..=k {
                let mut parts = [p[..a].to_vec(), p[a..b].to_vec(), p[b..].to_vec()];
                parts.sort();
                a2s.push(parts);
            }
        }
    }
    a2s.sort();
    a2s.dedup();
    let choices = [None, Some(0), Some(1), Some(2)];
    let mut matchings = Vec::new();
    for &m0 in &choices {
        for &m1 in &choices {
            for &m2 in &choices {
                let used: Vec<usize> = [m0, m1, m2].iter().flatten().copied().collect();
                let mut dedup = used.clone();
                dedup.sort();
                dedup.dedup();
                if dedup.len() == used.len() {
                    matchings.push([m0, m1, m2]);
                }
            }
        }
    }
    for a1 in &a1s {
        for a2 in &a2s {
            for m in &matchings {
                let Some((network, planted)) = pattern_star33(k, a1, a2, m) else { continue };
                let g = &network.dag;
                if count_mergings(&planted) < target {
                    continue;
                }
                let mut locally_optimal = true;
                'sides: for side in 0..2 {
                    for s in enumerate_systems(g, network.pairs[side], config.budget)? {
                        let mut trial = planted.clone();
                        trial[side] = s;
                        if count_mergings(&trial) < target {
                            locally_optimal = false;
                            break 'sides;
                        }
                    }
                }
                if !locally_optimal || search_below(g, &network.pairs, config, target)?.is_some() {
                    continue;
                }
                let mut inst = Instance::new("extremal_star33", network)
                    .intend(Variant::MStar, target)
                    .note(format!("first system {a1:?}, second system {a2:?}, trunks {m:?}"))
                    .note("single source, both cuts 3");
                inst.planted = planted;
                return Ok(inst);
            }
        }
    }
    Err(Error::SearchExhausted)
}

/// The frozen single-source (3,3) instance. Its optimum is 4: the shared-trunk
/// search finds nothing higher.
pub fn gen_extremal_star33() -> Result<Instance> {
    Instance::from_text(EXTREMAL_STAR33)
}

/// Rebuilds both frozen extremal files under `dir`.
pub fn regenerate_extremal(dir: &std::path::Path, config: &OracleConfig) -> Result<Vec<std::path::PathBuf>> {
    let io = |e: std::io::Error| Error::InvalidPath(e.to_string());
    let mut written = Vec::new();
    for (file, inst) in [
        ("extremal_22.txt", search_extremal_22(5, 5, config)?),
        ("extremal_star33.txt", search_extremal_star33(4, 4, config)?),
    ] {
        let path = dir.join(file);
        std::fs::write(&path, inst.to_text()).map_err(io)?;
        written.push(path);
    }
    Ok(written)
}

/// Single source `S`, sinks `R1..Rn`, every cut 2; each new sink's paths
/// reuse the previous pair's prefixes and add exactly one merging.
pub fn gen_star_2rep(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidCut(0));
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    let add = |edges: &mut Vec<(String, String)>, u: &str, v: &str| edges.push((u.to_string(), v.to_string()));
    if n == 1 {
        for (u, v) in [("S", "A"), ("S", "B"), ("A", "R1"), ("B", "R1")] {
            add(&mut edges, u, v);
        }
    } else {
        for (u, v) in
            [("S", "T"), ("S", "U"), ("T", "W1"), ("U", "W1"), ("W1", "X1"), ("T", "R1"), ("X1", "R1"), ("U", "R2"), ("X1", "R2")]
        {
            add(&mut edges, u, v);
        }
        let mut p: Vec<String> = ["S", "T", "W1", "X1", "R2"].map(String::from).to_vec();
        let mut q: Vec<String> = ["S", "U", "R2"].map(String::from).to_vec();
        for k in 3..=n {
            let prev = format!("R{}", k - 1);
            let (w, x, r) = (format!("W{}", k - 1), format!("X{}", k - 1), format!("R{k}"));
            let xa = p[p.len() - 2].clone();
            let qv = q[q.len() - 2].clone();
            let at = edges.iter().position(|(u, v)| *u == xa && *v == prev).expect("tail edge into previous sink");
            edges.remove(at);
            for (u, v) in [(&xa, &w), (&w, &x), (&x, &prev), (&qv, &w), (&xa, &r), (&x, &r)] {
                add(&mut edges, u, v);
            }
            let mut np = q[..q.len() - 1].to_vec();
            np.extend([w, x, r.clone()]);
            let mut nq = p[..p.len() - 1].to_vec();
            nq.push(r);
            (p, q) = (np, nq);
        }
    }
    let mut b = DagBuilder::new();
    for (i, (u, v)) in edges.iter().enumerate() {
        b.edge(format!("e{i:02}"), u.as_str(), v.as_str())?;
    }
    let g = b.build()?;
    let sinks: Vec<String> = (1..=n).map(|k| format!("R{k}")).collect();
    let pairs: Vec<(&str, &str)> = sinks.iter().map(|r| ("S", r.as_str())).collect();
    let network = Network::from_names(g, &pairs, PairLayout::SharedSource)?;
    Ok(Instance::new(format!("star_2rep_{n}"), network)
        .intend(Variant::MStar, n - 1)
        .note(format!("single source, {n} sinks, every cut 2")))
}

/// Two pairs whose shared paths cross `n` merge edges in opposite orders, so
/// the union contains directed cycles and no reroute is defined. The first
/// pair's second path carries a two-vertex loop so even `n = 1` is cyclic.
pub fn gen_cyclic_counterexample(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidCut(0));
    }
    let mut d = Draft::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for k in 1..=n {
        d.edge(&format!("m{k:02}"), &format!("x{k}"), &format!("y{k}"));
    }
    // the first pair's crossing path runs from m_n down to m_1
    let mut at = "S1".to_string();
    for k in (1..=n).rev() {
        first.push(d.wire(&at, &format!("x{k}")));
        first.push(format!("m{k:02}"));
        at = format!("y{k}");
    }
    first.push(d.wire(&at, "R1"));
    let mut at = "S2".to_string();
    for k in 1..=n {
        second.push(d.wire(&at, &format!("x{k}")));
        second.push(format!("m{k:02}"));
        at = format!("y{k}");
    }
    second.push(d.wire(&at, "R2"));
    let side: Vec<String> = vec![d.wire("S1", "u"), d.wire("u", "v"), d.wire("v", "R1")];
    d.wire("v", "u");
    let g = d.b.build_cyclic();
    let network = Network::from_names(g, &[("S1", "R1"), ("S2", "R2")], PairLayout::Pairs)?;
    let planted = systems_from_names(&network.dag.clone(), &network, &[(0, side), (0, first), (1, second)])?;
    let mut inst = Instance::new(format!("cyclic_{n}"), network)
        .note(format!("{n} mergings; cyclic, so rerouting does not apply"));
    inst.planted = planted;
    Ok(inst)
}

fn fresh_name(g: &Dag, base: String) -> String {
    let mut name = base;
    while g.vertex(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Adds a super-source `I{i}` and super-sink `O{i}` per system with one new
/// edge to each path start and from each path end, so the systems become
/// maximum path sets between distinct terminals.
pub fn extend_imaginary(g: &Dag, systems: &[PathSystem]) -> Result<Instance> {
    let mut b = g.to_builder();
    let mut terms = Vec::new();
    let mut walks = Vec::new();
    for (i, s) in systems.iter().enumerate() {
        let (src, dst) = (fresh_name(g, format!("I{i}")), fresh_name(g, format!("O{i}")));
        for (k, p) in s.paths().iter().enumerate() {
            let (head, tail) = (format!("{src}.{k}"), format!("{dst}.{k}"));
            b.edge(head.clone(), src.as_str(), g.vertex_name(p.start()))?;
            b.edge(tail.clone(), g.vertex_name(p.end()), dst.as_str())?;
            let mut names = vec![head];
            names.extend(p.edge_names(g));
            names.push(tail);
            walks.push((i, names));
        }
        terms.push((src, dst));
    }
    let dag = if g.is_acyclic() { b.build()? } else { b.build_cyclic() };
    let refs: Vec<(&str, &str)> = terms.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let network = Network::from_names(dag, &refs, PairLayout::Pairs)?;
    let planted = systems_from_names(&network.dag.clone(), &network, &walks)?;
    let mut inst = Instance::new("imaginary_extension", network).note("one new source and sink per system");
    inst.planted = planted;
    Ok(inst)
}

/// Shape of a random instance. Sources only have out-edges and sinks only
/// in-edges; source out-degrees cap every cut at `max_cut`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub sinks: usize,
    pub shared_source: bool,
    pub max_edges: usize,
    pub max_cut: usize,
    pub inner: (usize, usize),
}

impl RandomSpec {
    pub fn two_pair(max_edges: usize) -> RandomSpec {
        RandomSpec { sinks: 2, shared_source: false, max_edges, max_cut: 3, inner: (4, 8) }
    }

    pub fn single_source(sinks: usize, max_edges: usize) -> RandomSpec {
        RandomSpec { sinks, shared_source: true, max_edges, max_cut: 3, inner: (4, 8) }
    }
}

/// A random acyclic instance; the same spec and seed give the same instance.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> Result<Instance> {
    if spec.sinks == 0 || spec.max_cut == 0 || spec.inner.0 < 2 || spec.inner.0 > spec.inner.1 {
        return Err(Error::InvalidPair(format!("unusable random spec {spec:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let n = rng.gen_range(spec.inner.0..=spec.inner.1);
        let inner: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let sources: Vec<String> =
            if spec.shared_source { vec!["S".into()] } else { (1..=spec.sinks).map(|i| format!("S{i}")).collect() };
        let sinks: Vec<String> = (1..=spec.sinks).map(|i| format!("R{i}")).collect();
        let mut list: Vec<(String, String)> = Vec::new();
        let low = n / 2 + 1;
        for s in &sources {
            for _ in 0..rng.gen_range(1..=spec.max_cut) {
                list.push((s.clone(), inner[rng.gen_range(0..low)].clone()));
            }
        }
        for r in &sinks {
            for _ in 0..rng.gen_range(1..=spec.max_cut + 1) {
                list.push((inner[rng.gen_range(n - low..n)].clone(), r.clone()));
            }
        }
        if list.len() >= spec.max_edges {
            continue;
        }
        let room = spec.max_edges - list.len();
        let count = rng.gen_range(n..=2 * n).min(room);
        for _ in 0..count {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            list.push((inner[i].clone(), inner[j].clone()));
        }
        let mut b = DagBuilder::new();
        for (k, (u, v)) in list.iter().enumerate() {
            b.edge(format!("e{k:02}"), u.as_str(), v.as_str())?;
        }
        let g = b.build()?;
        let pairs: Vec<(&str, &str)> = sinks
            .iter()
            .enumerate()
            .map(|(i, r)| (sources[if spec.shared_source { 0 } else { i }].as_str(), r.as_str()))
            .collect();
        let layout = if spec.shared_source { PairLayout::SharedSource } else { PairLayout::Pairs };
        let Ok(network) = Network::from_names(g, &pairs, layout) else { continue };
        return Ok(Instance::new(format!("random_{seed}"), network).note(format!("seed {seed}, {spec:?}")));
    }
    Err(Error::SearchExhausted)
}

/// Two pairs with cuts `(c1, c2)` whose planted systems cross `merges` merge
/// edges. Each edge goes to a random path of either system; every path visits
/// its edges in one shared random order, which keeps the graph acyclic.
pub fn random_merge_pattern(c1: usize, c2: usize, merges: usize, seed: u64) -> Result<Instance> {
    if c1 == 0 || c2 == 0 {
        return Err(Error::InvalidCut(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..merges).collect();
    order.shuffle(&mut rng);
    let mut paths = [vec![Vec::new(); c1], vec![Vec::new(); c2]];
    for &k in &order {
        for side in paths.iter_mut() {
            let n = side.len();
            side[rng.gen_range(0..n)].push(k);
        }
    }
    let (network, planted) = Pattern {
        terminals: &[("S1", "R1"), ("S2", "R2")],
        tags: &["a", "b"],
        paths: &paths,
        merges,
        layout: PairLayout::Pairs,
    }
    .build()?;
    let mut inst = Instance::new(format!("pattern_{seed}"), network).note(format!("seed {seed}, pattern {paths:?}"));
    inst.planted = planted;
    Ok(inst)
}

/// Looks a generator up by name, as used on the command line.
pub fn generate(name: &str, params: &[u64]) -> Result<Instance> {
    let arg = |i: usize| {
        params.get(i).copied().ok_or_else(|| Error::InvalidPair(format!("generator `{name}` needs parameter {}", i + 1)))
    };
    match name {
        "butterfly" => Ok(gen_butterfly()),
        "gadget" => Ok(gen_gadget_11()),
        "isolated" => gen_isolated_chain(arg(0)? as u32),
        "split" => {
            let k = arg(0)? as usize;
            let cuts: Vec<u32> = params[1..].iter().map(|&c| c as u32).collect();
            gen_split_family(&cuts, k, &witness_pair)
        }
        "extremal22" => gen_extremal_22(),
        "extremal-star33" => gen_extremal_star33(),
        "star2rep" => gen_star_2rep(arg(0)? as usize),
        "cyclic" => gen_cyclic_counterexample(arg(0)? as usize),
        "semireach" => Ok(gen_semi_reach_example()),
        "random" => random_instance(&RandomSpec::two_pair(30), arg(0)?),
        "pattern" => random_merge_pattern(arg(1)? as usize, arg(2)? as usize, arg(3)? as usize, arg(0)?),
        "random-star" => random_instance(&RandomSpec::single_source(params.get(1).map_or(2, |&s| s as usize), 30), arg(0)?),
        other => Err(Error::UnknownGenerator(other.to_string())),
    }
}

/// Names accepted by [`generate`].
pub const GENERATORS: &[&str] = &[
    "butterfly",
    "gadget",
    "isolated",
    "split",
    "extremal22",
    "extremal-star33",
    "star2rep",
    "cyclic",
    "semireach",
    "random",
    "random-star",
    "pattern",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merging::merging_edges;
    use crate::oracle::brute_force_min;

    fn oracle(inst: &Instance) -> usize {
        brute_force_min(inst.dag(), &inst.network.pairs, &OracleConfig::default()).unwrap().value
    }

    #[test]
    fn butterfly_merges_once_at_w() {
        let b = gen_butterfly();
        assert_eq!(b.dag().edge_count(), 9);
        assert_eq!(b.cuts().unwrap(), vec![2, 2]);
        assert_eq!(oracle(&b), 1);
        let merges = merging_edges(b.planted.iter().flat_map(|s| s.paths()));
        let e = *merges.iter().next().unwrap();
        assert_eq!(merges.len(), 1);
        assert_eq!(b.dag().vertex_name(b.dag().tail(e)), "W");
    }

    #[test]
    fn isolated_compositions_add_up() {
        let two = gen_isolated(1, 1, 1, &witness_pair).unwrap();
        assert_eq!(two.cuts().unwrap(), vec![2, 1]);
        assert_eq!(two.intended, Some((Variant::M, 2)));
        assert_eq!(oracle(&two), 2);
        let one = gen_isolated(1, 0, 1, &witness_pair).unwrap();
        assert_eq!(one.name, "gadget_11");
        let flipped = witness_pair(1, 3).unwrap();
        assert_eq!(flipped.cuts().unwrap(), vec![1, 3]);
        assert_eq!(oracle(&flipped), 3);
        assert_eq!(witness_pair(3, 3).unwrap_err(), Error::PartUnavailable(vec![3, 3]));
    }

    #[test]
    fn split_family_of_three_singletons() {
        let inst = gen_split_family(&[1, 1, 1], 1, &witness_pair).unwrap();
        assert_eq!(inst.cuts().unwrap(), vec![1, 1, 1]);
        assert_eq!(inst.intended, Some((Variant::M, 2)));
        assert_eq!(oracle(&inst), 2);
        assert!(gen_split_family(&[1, 1], 2, &witness_pair).is_err());
    }

    #[test]
    fn star_2rep_is_chained() {
        for n in 1..=4 {
            let inst = gen_star_2rep(n).unwrap();
            assert_eq!(inst.cuts().unwrap(), vec![2; n]);
            assert_eq!(oracle(&inst), n - 1, "n = {n}");
        }
    }

    #[test]
    fn cyclic_family_counts_n() {
        for n in [1, 2, 4] {
            let inst = gen_cyclic_counterexample(n).unwrap();
            assert!(!inst.dag().is_acyclic());
            assert_eq!(count_mergings(&inst.planted), n);
            let text = inst.to_text();
            assert!(text.contains("\ncyclic\n"));
            assert_eq!(Instance::from_text(&text).unwrap().network, inst.network);
        }
    }

    #[test]
    fn imaginary_extension_keeps_paths_maximal() {
        let b = gen_butterfly();
        let ext = extend_imaginary(b.dag(), &b.planted).unwrap();
        assert_eq!(ext.cuts().unwrap(), vec![2, 2]);
        for s in &ext.planted {
            s.validate_maximum(ext.dag()).unwrap();
        }
        assert!(count_mergings(&b.planted) <= count_mergings(&ext.planted));
        assert!(oracle(&ext) >= 1);
    }

    #[test]
    fn random_instances_are_reproducible() {
        let spec = RandomSpec::two_pair(30);
        for seed in 0..20 {
            let a = random_instance(&spec, seed).unwrap();
            let b = random_instance(&spec, seed).unwrap();
            assert_eq!(a.network, b.network);
            assert!(a.dag().edge_count() <= 30);
            assert!(a.cuts().unwrap().iter().all(|&c| (1..=3).contains(&c)));
            for p in &a.network.pairs {
                assert!(a.dag().in_edges(p.source).is_empty());
                assert!(a.dag().out_edges(p.sink).is_empty());
            }
        }
    }

    #[test]
    fn frozen_instances_round_trip() {
        for inst in [gen_extremal_22().unwrap(), gen_extremal_star33().unwrap()] {
            let again = Instance::from_text(&inst.to_text()).unwrap();
            assert_eq!(again.network, inst.network);
            assert_eq!(again.intended, inst.intended);
            assert_eq!(again.name, inst.name);
        }
        assert_eq!(gen_extremal_22().unwrap().cuts().unwrap(), vec![2, 2]);
        assert_eq!(gen_extremal_star33().unwrap().cuts().unwrap(), vec![3, 3]);
    }

    #[test]
    fn unknown_generator_is_reported() {
        assert_eq!(generate("nope", &[]).unwrap_err(), Error::UnknownGenerator("nope".into()));
        assert_eq!(generate("star2rep", &[1]).unwrap().network.pairs.len(), 1);
    }

    #[test]
    fn searches_reproduce_the_frozen_files() {
        let cfg = OracleConfig { budget: 50_000_000, jobs: 1 };
        assert_eq!(search_extremal_22(5, 5, &cfg).unwrap().to_text(), EXTREMAL_22);
        assert_eq!(search_extremal_star33(4, 4, &cfg).unwrap().to_text(), EXTREMAL_STAR33);
    }
}

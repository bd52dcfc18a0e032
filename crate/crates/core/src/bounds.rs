//! Exact values, upper bounds and lower bounds for the extremal merging counts
//! `M(c1, ..., cn)` (distinct sources) and `M*(c1, ..., cn)` (one source).

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    M,
    #[serde(rename = "Mstar")]
    MStar,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::M => "M",
            Variant::MStar => "Mstar",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Variant, String> {
        match s {
            "M" | "m" => Ok(Variant::M),
            "Mstar" | "mstar" | "M*" => Ok(Variant::MStar),
            other => Err(format!("unknown variant `{other}` (expected M or Mstar)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub variant: Variant,
    pub cuts: Vec<u32>,
    pub lower: u64,
    pub upper: u64,
    pub exact: Option<u64>,
    pub provenance: Vec<String>,
}

fn validate(cuts: &[i64]) -> Result<Vec<u32>> {
    if cuts.is_empty() {
        return Err(Error::InvalidCut(0));
    }
    let mut out = Vec::with_capacity(cuts.len());
    for &c in cuts {
        if c < 1 || c > u32::MAX as i64 {
            return Err(Error::InvalidCut(c));
        }
        out.push(c as u32);
    }
    out.sort_unstable();
    Ok(out)
}

/// Single-source reductions: drop cuts equal to 1, then cap the largest cut
/// at the sum of the others.
pub fn reduce_star(cuts: &[u32]) -> Vec<u32> {
    let mut v: Vec<u32> = cuts.to_vec();
    v.sort_unstable();
    while v.len() > 1 && v[0] == 1 {
        v.remove(0);
    }
    if v.len() >= 2 {
        let rest: u64 = v[..v.len() - 1].iter().map(|&c| c as u64).sum();
        let last = v.len() - 1;
        if rest <= v[last] as u64 {
            v[last] = rest as u32;
        }
    }
    v
}

fn exact_sorted(variant: Variant, cuts: &[u32]) -> Option<u64> {
    if cuts.len() == 1 {
        return Some(0);
    }
    match variant {
        Variant::M => match cuts {
            [1, n] => Some(*n as u64),
            [2, 2] => Some(5),
            _ => None,
        },
        Variant::MStar => {
            let r = reduce_star(cuts);
            if r.len() == 1 {
                return Some(0);
            }
            if r.iter().all(|&c| c == 2) {
                return Some(r.len() as u64 - 1);
            }
            match r.as_slice() {
                [3, 3] => Some(5),
                _ => None,
            }
        }
    }
}

pub fn exact_value(variant: Variant, cuts: &[i64]) -> Result<Option<u64>> {
    Ok(exact_sorted(variant, &validate(cuts)?))
}

/// Memoized pair bounds for one evaluation.
#[derive(Default)]
struct Table {
    upper_m: HashMap<(u32, u32), u64>,
    lower_m: HashMap<(u32, u32), u64>,
}

/// The two terms of the recursive pair bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Recursion {
    pub u: u64,
    pub v: u64,
    pub bound: u64,
    pub w_bound: u64,
}

impl Table {
    fn m(&mut self, a: u32, b: u32) -> u64 {
        self.upper_pair_m(a.min(b), a.max(b))
    }

    fn recursion(&mut self, m: u32, n: u32) -> Recursion {
        debug_assert!(2 <= m && m <= n);
        let mut u = 0;
        for j in 1..m {
            u += self.m(j, m - 1) + 1 + self.m(m - j, n);
        }
        u += self.m(m, m - 1) + 1;
        let mut v = self.m(m, n - 1);
        for j in 1..m {
            v += self.m(j, n) + 1 + self.m(m - j, n);
        }
        let v = v - self.m(1, n);
        let w_m: u64 = (1..=m).map(|j| self.m(j, m - 1) + 1).sum();
        let tail = v + m as u64 - 2;
        Recursion { u, v, bound: u + tail, w_bound: m as u64 * w_m + tail }
    }

    fn upper_pair_m(&mut self, a: u32, b: u32) -> u64 {
        let (m, n) = (a.min(b), a.max(b));
        if let Some(&v) = self.upper_m.get(&(m, n)) {
            return v;
        }
        let value = match exact_sorted(Variant::M, &[m, n]) {
            Some(x) => x,
            None => {
                let lemma = m as u64 * n as u64 * (m as u64 + n as u64) / 2;
                let r = self.recursion(m, n);
                lemma.min(r.bound).min(r.w_bound)
            }
        };
        self.upper_m.insert((m, n), value);
        value
    }

    fn upper_pair(&mut self, variant: Variant, a: u32, b: u32) -> (u64, Vec<&'static str>) {
        let (m, n) = (a.min(b), a.max(b));
        if let Some(x) = exact_sorted(variant, &[m, n]) {
            return (x, vec!["exact"]);
        }
        let mut best = self.upper_pair_m(m, n);
        let mut rules = vec!["pair-recursion"];
        if variant == Variant::MStar {
            // the single-source pair value only depends on the smaller cut
            let mut capped = self.upper_pair_m(m, m);
            if m >= 2 {
                capped = capped.min(self.upper_pair_m(m - 1, m - 1));
            }
            if capped < best {
                best = capped;
                rules = vec!["star-cap", "star-vs-m"];
            }
        }
        (best, rules)
    }

    fn lower_pair_m(&mut self, a: u32, b: u32) -> u64 {
        let (m, n) = (a.min(b), a.max(b));
        if let Some(x) = exact_sorted(Variant::M, &[m, n]) {
            return x;
        }
        if let Some(&v) = self.lower_m.get(&(m, n)) {
            return v;
        }
        let mut best = 0;
        for k in 1..m {
            best = best.max(self.lower_pair_m(k, n) + self.lower_pair_m(m - k, n));
        }
        for k in 1..n {
            best = best.max(self.lower_pair_m(m, k) + self.lower_pair_m(m, n - k));
        }
        self.lower_m.insert((m, n), best);
        best
    }
}

/// The recursive pair bound's intermediate terms for `m <= n`, `m >= 2`.
pub fn pair_recursion(m: u32, n: u32) -> Result<Recursion> {
    if m < 2 || n < m {
        return Err(Error::InvalidCut(m.min(n) as i64));
    }
    Ok(Table::default().recursion(m, n))
}

pub fn upper_bound_pair(variant: Variant, c1: i64, c2: i64) -> Result<u64> {
    let cuts = validate(&[c1, c2])?;
    Ok(Table::default().upper_pair(variant, cuts[0], cuts[1]).0)
}

fn upper_sorted(table: &mut Table, variant: Variant, cuts: &[u32], rules: &mut Vec<String>) -> u64 {
    let pair_sum = |table: &mut Table, v: Variant, c: &[u32], rules: &mut Vec<String>| -> u64 {
        let mut total = 0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let (b, r) = table.upper_pair(v, c[i], c[j]);
                total += b;
                rules.extend(r.into_iter().map(String::from));
            }
        }
        total
    };
    match variant {
        Variant::M => {
            if let Some(x) = exact_sorted(Variant::M, cuts) {
                rules.push("exact".into());
                return x;
            }
            rules.push("pairwise-sum".into());
            pair_sum(table, Variant::M, cuts, rules)
        }
        Variant::MStar => {
            let reduced = reduce_star(cuts);
            if reduced != cuts {
                rules.push("star-reduction".into());
            }
            if let Some(x) = exact_sorted(Variant::MStar, &reduced) {
                rules.push("exact".into());
                return x;
            }
            rules.push("pairwise-sum".into());
            let star = pair_sum(table, Variant::MStar, &reduced, rules);
            let via_m = upper_sorted(table, Variant::M, cuts, &mut Vec::new());
            if via_m < star {
                rules.push("star-vs-m".into());
            }
            star.min(via_m)
        }
    }
}

pub fn upper_bound(variant: Variant, cuts: &[i64]) -> Result<u64> {
    let cuts = validate(cuts)?;
    Ok(upper_sorted(&mut Table::default(), variant, &cuts, &mut Vec::new()))
}

fn lower_sorted(table: &mut Table, variant: Variant, cuts: &[u32]) -> u64 {
    if let Some(x) = exact_sorted(variant, cuts) {
        return x;
    }
    if variant == Variant::MStar {
        return 0;
    }
    // any bipartition of the pairs is a valid split up to reordering
    let n = cuts.len();
    let mut best = 0;
    for mask in 1u32..(1 << n) - 1 {
        let mut total = 0;
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            for j in (0..n).filter(|j| mask & (1 << j) == 0) {
                total += table.lower_pair_m(cuts[i], cuts[j]);
            }
        }
        best = best.max(total);
    }
    best
}

pub fn lower_bound(variant: Variant, cuts: &[i64]) -> Result<u64> {
    let cuts = validate(cuts)?;
    Ok(lower_sorted(&mut Table::default(), variant, &cuts))
}

/// Whether `small` is dominated by `big` after aligning the sorted tuples at
/// their ends.
pub fn monotone_check(small: &[u32], big: &[u32]) -> bool {
    let (mut c, mut d) = (small.to_vec(), big.to_vec());
    c.sort_unstable();
    d.sort_unstable();
    if c.len() > d.len() {
        return false;
    }
    let offset = d.len() - c.len();
    c.iter().enumerate().all(|(i, &ci)| ci <= d[offset + i])
}

pub fn bound_report(variant: Variant, cuts: &[i64]) -> Result<BoundReport> {
    let sorted = validate(cuts)?;
    let mut table = Table::default();
    let mut provenance = Vec::new();
    let upper = upper_sorted(&mut table, variant, &sorted, &mut provenance);
    let lower = lower_sorted(&mut table, variant, &sorted);
    provenance.sort();
    provenance.dedup();
    Ok(BoundReport { variant, exact: exact_sorted(variant, &sorted), cuts: sorted, lower, upper, provenance })
}

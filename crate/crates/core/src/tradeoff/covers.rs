use crate::bits::binomial;
use crate::error::{invalid, JuntaError, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Pairwise-disjoint families of `s`-subsets of `{0, …, j−1}`, each family covering
/// the whole ground set. Blocks are bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCollection {
    pub j: usize,
    pub s: usize,
    pub covers: Vec<Vec<u32>>,
}

impl CoverCollection {
    /// Checks every structural property: block sizes, coverage, disjointness.
    pub fn is_valid(&self) -> bool {
        let full = (1u32 << self.j) - 1;
        let mut seen = std::collections::HashSet::new();
        self.covers.iter().all(|cover| {
            cover
                .iter()
                .all(|b| b.count_ones() as usize == self.s && b & !full == 0)
                && cover.iter().fold(0, |acc, b| acc | b) == full
        }) && self.covers.iter().flatten().all(|b| seen.insert(*b))
    }
}

/// `⌊C(j,s) / ⌈j/s⌉⌋`, the number of covers the construction produces.
pub fn legal_cover_count(j: usize, s: usize) -> u64 {
    if s == 0 || s > j {
        return 0;
    }
    (binomial(j, s) / j.div_ceil(s) as u128) as u64
}

/// Largest ground set accepted by [`build_legal_covers`].
const MAX_GROUND: usize = 12;

/// Splits all `s`-subsets of `[j]` into groups of `⌈j/s⌉` blocks plus one remainder
/// group, each almost regular, and returns the full groups. An almost-regular group
/// of `⌈j/s⌉` blocks touches every element, so it is a cover.
///
/// Groups are grown one element at a time. At step `m` every group holds partial
/// blocks inside `[m]`; a flow network decides how many blocks of each shape receive
/// element `m`, so that each shape is extended exactly as often as its completions
/// require and each group gains element `m` a near-average number of times.
pub fn build_legal_covers(j: usize, s: usize) -> Result<CoverCollection> {
    if s == 0 || s > j || j > MAX_GROUND {
        return Err(invalid(format!(
            "need 1 <= s <= j <= {MAX_GROUND}, got j = {j}, s = {s}"
        )));
    }
    let total = binomial(j, s) as usize;
    let a = j.div_ceil(s);
    let full_groups = total / a;
    let mut sizes = vec![a; full_groups];
    if total % a != 0 {
        sizes.push(total % a);
    }
    let mut groups: Vec<Vec<u32>> = sizes.iter().map(|&n| vec![0u32; n]).collect();

    for m in 0..j {
        let left = (j - m) as u64;
        let shapes: BTreeSet<u32> = groups.iter().flatten().copied().collect();
        let shape_list: Vec<u32> = shapes.into_iter().collect();
        let shape_index: BTreeMap<u32, usize> = shape_list
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, i))
            .collect();

        let g_count = groups.len();
        let source = 0;
        let sink = 1;
        let group_node = |i: usize| 2 + i;
        let shape_node = |t: usize| 2 + g_count + t;
        let mut net = BoundedFlow::new(2 + g_count + shape_list.len());

        let mut group_edges = Vec::new();
        for (i, g) in groups.iter().enumerate() {
            let missing: u64 = g.iter().map(|e| (s - e.count_ones() as usize) as u64).sum();
            let lo = missing / left;
            let hi = missing.div_ceil(left);
            net.add(source, group_node(i), lo, hi);
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for e in g {
                *counts.entry(shape_index[e]).or_default() += 1;
            }
            for (t, c) in counts {
                group_edges.push((i, t, net.add(group_node(i), shape_node(t), 0, c)));
            }
        }
        // a block of shape T needs element m in C(j−m−1, s−|T|−1) of its completions
        for (t, &shape) in shape_list.iter().enumerate() {
            let size = shape.count_ones() as usize;
            let need = if size < s {
                binomial(j - m - 1, s - size - 1) as u64
            } else {
                0
            };
            net.add(shape_node(t), sink, need, need);
        }
        if !net.feasible(source, sink) {
            return Err(JuntaError::ConstructionFailed { j, s });
        }
        for (i, t, edge) in group_edges {
            let mut grow = net.flow(edge);
            for e in groups[i].iter_mut() {
                if grow == 0 {
                    break;
                }
                if *e == shape_list[t] {
                    *e |= 1 << m;
                    grow -= 1;
                }
            }
        }
    }

    groups.truncate(full_groups);
    let collection = CoverCollection {
        j,
        s,
        covers: groups,
    };
    if !collection.is_valid() {
        return Err(JuntaError::ConstructionFailed { j, s });
    }
    Ok(collection)
}

/// Max flow with lower bounds, solved by Dinic on the standard reduction.
struct BoundedFlow {
    graph: Dinic,
    lower: Vec<u64>,
    excess: Vec<i64>,
}

impl BoundedFlow {
    fn new(nodes: usize) -> Self {
        BoundedFlow {
            graph: Dinic::new(nodes + 2),
            lower: Vec::new(),
            excess: vec![0; nodes],
        }
    }

    fn add(&mut self, from: usize, to: usize, lo: u64, hi: u64) -> usize {
        self.excess[to] += lo as i64;
        self.excess[from] -= lo as i64;
        self.lower.push(lo);
        let id = self.graph.add(from, to, hi - lo);
        debug_assert_eq!(id, 2 * (self.lower.len() - 1));
        self.lower.len() - 1
    }

    fn flow(&self, edge: usize) -> u64 {
        self.lower[edge] + self.graph.flow(2 * edge)
    }

    /// Whether a circulation with `sink → source` unbounded satisfies every bound.
    fn feasible(&mut self, source: usize, sink: usize) -> bool {
        let n = self.excess.len();
        let (ss, tt) = (n, n + 1);
        self.graph.add(sink, source, u64::MAX / 4);
        let mut need = 0u64;
        for v in 0..n {
            let e = self.excess[v];
            if e > 0 {
                self.graph.add(ss, v, e as u64);
                need += e as u64;
            } else if e < 0 {
                self.graph.add(v, tt, (-e) as u64);
            }
        }
        self.graph.max_flow(ss, tt) == need
    }
}

struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
    orig: Vec<u64>,
    level: Vec<i32>,
    it: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            orig: Vec::new(),
            level: vec![0; n],
            it: vec![0; n],
        }
    }

    fn add(&mut self, u: usize, v: usize, c: u64) -> usize {
        let id = self.to.len();
        self.head[u].push(id);
        self.to.push(v);
        self.cap.push(c);
        self.orig.push(c);
        self.head[v].push(id + 1);
        self.to.push(u);
        self.cap.push(0);
        self.orig.push(0);
        id
    }

    fn flow(&self, id: usize) -> u64 {
        self.orig[id] - self.cap[id]
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: u64) -> u64 {
        if u == t {
            return pushed;
        }
        while self.it[u] < self.head[u].len() {
            let e = self.head[u][self.it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[e]));
                if got > 0 {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.it[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.it.iter_mut().for_each(|i| *i = 0);
            loop {
                let got = self.dfs(s, t, u64::MAX);
                if got == 0 {
                    break;
                }
                total += got;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: all perfect matchings of K4 by enumeration.
    fn k4_matchings() -> Vec<Vec<u32>> {
        let pairs: Vec<u32> = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (1u32 << a) | (1 << b)))
            .collect();
        let mut out = Vec::new();
        for (i, &p) in pairs.iter().enumerate() {
            for &q in &pairs[i + 1..] {
                if p & q == 0 {
                    out.push(vec![p.min(q), p.max(q)]);
                }
            }
        }
        out
    }

    #[test]
    fn k4_one_factorization() {
        let c = build_legal_covers(4, 2).unwrap();
        assert_eq!(c.covers.len(), 3);
        let mut got: Vec<Vec<u32>> = c
            .covers
            .iter()
            .map(|m| {
                let mut m = m.clone();
                m.sort();
                m
            })
            .collect();
        got.sort();
        assert_eq!(got, k4_matchings());
    }

    #[test]
    fn small_cases() {
        let c = build_legal_covers(3, 2).unwrap();
        assert_eq!(c.covers.len(), 1);
        assert_eq!(c.covers[0].iter().fold(0, |a, b| a | b), 0b111);
        let c = build_legal_covers(5, 5).unwrap();
        assert_eq!(c.covers, vec![vec![0b11111]]);
        let c = build_legal_covers(4, 1).unwrap();
        assert_eq!(c.covers.len(), 1);
    }

    #[test]
    fn every_desk_size_builds() {
        for j in 1..=MAX_GROUND {
            for s in 1..=j {
                let c = build_legal_covers(j, s).unwrap_or_else(|e| panic!("j {j} s {s}: {e}"));
                assert!(c.is_valid());
                assert_eq!(c.covers.len() as u64, legal_cover_count(j, s));
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_legal_covers(4, 0).is_err());
        assert!(build_legal_covers(3, 4).is_err());
        assert!(build_legal_covers(13, 2).is_err());
    }
}

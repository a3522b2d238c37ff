//! Minimum-cardinality covers of finite point sets by dyadic cubes.
//!
//! The candidate set is finite: only cubes meeting the region matter, and a
//! point lies in at most `3^d` scale-`n` cubes. Exact mode runs branch and
//! bound per connected cluster of the co-coverage relation, seeded with the
//! greedy incumbent and pruned by a disjoint-group lower bound; when the node
//! budget runs out the remaining clusters fall back to greedy and the result
//! is flagged inexact. Greedy picks largest new coverage with lexicographic
//! tie-breaking, so either mode is deterministic.

use std::collections::BTreeMap;

use super::{cubes_containing, Cube, Point, Region};
use crate::error::{CtkError, Result};

#[derive(Clone, Debug)]
pub struct CoverConfig {
    /// Try exact branch and bound (fall back to greedy past the budget).
    pub exact: bool,
    /// Global branch-and-bound node budget across all clusters.
    pub node_budget: u64,
    /// Hard cap on candidate cubes; above it the call errors out.
    pub max_candidates: usize,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            exact: true,
            node_budget: 4_000_000,
            max_candidates: 200_000,
        }
    }
}

impl CoverConfig {
    pub fn greedy() -> Self {
        CoverConfig {
            exact: false,
            ..CoverConfig::default()
        }
    }
}

/// A cover of a region by equal-scale cubes.
#[derive(Clone, Debug)]
pub struct CoverResult {
    /// Cubes sorted by center index.
    pub cubes: Vec<Cube>,
    /// True when every cluster was solved to proven optimality.
    pub exact: bool,
}

impl CoverResult {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }
}

/// Minimum cover of `region` by scale-`scale` cubes with default settings.
pub fn minimal_cover(region: &Region, scale: u32) -> Result<CoverResult> {
    minimal_cover_with(region, scale, &CoverConfig::default())
}

pub fn minimal_cover_with(region: &Region, scale: u32, cfg: &CoverConfig) -> Result<CoverResult> {
    if region.is_empty() {
        return Err(CtkError::EmptyRegion("minimal_cover"));
    }
    // scale 0 cubes are single points: the cover is the region itself
    if scale == 0 {
        return Ok(CoverResult {
            cubes: region.iter().map(|p| Cube::new(0, p.clone())).collect(),
            exact: true,
        });
    }

    let points: Vec<Point> = region.iter().cloned().collect();
    let n = points.len();

    // candidate cubes and their coverage bitsets
    let mut coverage: BTreeMap<Point, Bitset> = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        for cube in cubes_containing(p, scale) {
            coverage
                .entry(cube.center_index().clone())
                .or_insert_with(|| Bitset::new(n))
                .set(i);
        }
    }
    if coverage.len() > cfg.max_candidates {
        return Err(CtkError::cap(
            "minimal_cover candidates",
            coverage.len() as u64,
            cfg.max_candidates as u64,
        ));
    }
    let candidates: Vec<(Point, Bitset)> = coverage.into_iter().collect();

    // which candidates cover each point
    let mut covering: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, (_, bits)) in candidates.iter().enumerate() {
        for pi in bits.ones() {
            covering[pi].push(ci);
        }
    }

    // cluster points that share any candidate; clusters are independent
    let mut uf = UnionFind::new(n);
    for (_, bits) in &candidates {
        let mut it = bits.ones();
        if let Some(first) = it.next() {
            for other in it {
                uf.union(first, other);
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        clusters.entry(uf.find(i)).or_default().push(i);
    }

    let mut chosen: Vec<usize> = Vec::new();
    let mut all_exact = true;
    let mut budget = cfg.node_budget;
    for cluster_points in clusters.values() {
        let mut mask = Bitset::new(n);
        for &pi in cluster_points {
            mask.set(pi);
        }
        let solver = ClusterSolver {
            candidates: &candidates,
            covering: &covering,
        };
        let (mut best, exact) = if cfg.exact {
            solver.solve(&mask, &mut budget)
        } else {
            (solver.greedy(&mask), false)
        };
        all_exact &= exact;
        chosen.append(&mut best);
    }

    chosen.sort_unstable();
    chosen.dedup();
    let cubes: Vec<Cube> = chosen
        .into_iter()
        .map(|ci| Cube::new(scale, candidates[ci].0.clone()))
        .collect();
    Ok(CoverResult {
        cubes,
        exact: all_exact,
    })
}

struct ClusterSolver<'a> {
    candidates: &'a [(Point, Bitset)],
    covering: &'a [Vec<usize>],
}

impl ClusterSolver<'_> {
    fn greedy(&self, uncovered: &Bitset) -> Vec<usize> {
        let mut uncovered = uncovered.clone();
        let mut picked = Vec::new();
        while let Some(_) = uncovered.first_one() {
            let mut best_ci = usize::MAX;
            let mut best_gain = 0usize;
            // candidates iterated in center order: ties go lexicographic
            for (ci, (_, bits)) in self.candidates.iter().enumerate() {
                let gain = bits.intersection_count(&uncovered);
                if gain > best_gain {
                    best_gain = gain;
                    best_ci = ci;
                }
            }
            debug_assert!(best_ci != usize::MAX);
            uncovered.subtract(&self.candidates[best_ci].1);
            picked.push(best_ci);
        }
        picked
    }

    /// Disjoint-group lower bound: repeatedly take the first uncovered point
    /// and discard everything co-coverable with it; each group needs its own
    /// cube.
    fn lower_bound(&self, uncovered: &Bitset) -> usize {
        let mut rest = uncovered.clone();
        let mut groups = 0;
        while let Some(p) = rest.first_one() {
            groups += 1;
            for &ci in &self.covering[p] {
                rest.subtract(&self.candidates[ci].1);
            }
        }
        groups
    }

    fn solve(&self, cluster: &Bitset, budget: &mut u64) -> (Vec<usize>, bool) {
        let greedy = self.greedy(cluster);
        let mut best = greedy;
        let mut exhausted = false;
        let mut stack: Vec<usize> = Vec::new();
        self.branch(cluster, &mut stack, &mut best, budget, &mut exhausted);
        (best, !exhausted)
    }

    fn branch(
        &self,
        uncovered: &Bitset,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        budget: &mut u64,
        exhausted: &mut bool,
    ) {
        if *exhausted {
            return;
        }
        if *budget == 0 {
            *exhausted = true;
            return;
        }
        *budget -= 1;

        if uncovered.first_one().is_none() {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.lower_bound(uncovered) >= best.len() {
            return;
        }
        // branch on the uncovered point with fewest live candidates
        let mut pivot = usize::MAX;
        let mut pivot_count = usize::MAX;
        for p in uncovered.ones() {
            let cnt = self.covering[p].len();
            if cnt < pivot_count {
                pivot_count = cnt;
                pivot = p;
            }
        }
        for &ci in &self.covering[pivot] {
            let mut rest = uncovered.clone();
            rest.subtract(&self.candidates[ci].1);
            chosen.push(ci);
            self.branch(&rest, chosen, best, budget, exhausted);
            chosen.pop();
            if *exhausted {
                return;
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub(crate) struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(bits: usize) -> Bitset {
        Bitset {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn subtract(&mut self, other: &Bitset) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
    }

    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

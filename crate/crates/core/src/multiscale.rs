//! The total-volume functional `V_r`, subordinated-cover counting, bounded
//! tree covers, exhaustive enumeration of small origin-containing families,
//! and the explicit entropy constants.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants;
use crate::contour::{contours_of, Contour, ContourParams};
use crate::error::{CtkError, Result};
use crate::lattice::{
    cubes_union, diameter, minimal_cover_with, CoverConfig, CoverResult, Cube, Point, Region,
};
use crate::model::SpinConfiguration;

/// Number of stride-`r` levels above level 0: the smallest `n` with
/// `2^(rn) >= diam`; 0 for diameter 0 or 1 (a single level).
pub fn level_count(diam: u64, r: u32) -> u32 {
    if diam <= 1 {
        return 0;
    }
    let mut n = 0u32;
    let mut reach = 1u128;
    let step = 1u128 << r;
    while reach < diam as u128 {
        reach *= step;
        n += 1;
    }
    n
}

/// Minimal covers of a region at the stride-`r` scales `0, r, 2r, ...`.
#[derive(Clone, Debug)]
pub struct CoverHierarchy {
    pub r: u32,
    /// `(scale, cover)` per level.
    pub levels: Vec<(u32, CoverResult)>,
}

impl CoverHierarchy {
    pub fn total_volume(&self) -> u64 {
        self.levels.iter().map(|(_, c)| c.len() as u64).sum()
    }

    /// True when every level was covered exactly.
    pub fn exact(&self) -> bool {
        self.levels.iter().all(|(_, c)| c.exact)
    }
}

/// Builds the cover hierarchy behind `V_r(Lambda)`.
pub fn cover_hierarchy(region: &Region, r: u32, cover_cfg: &CoverConfig) -> Result<CoverHierarchy> {
    if region.is_empty() {
        return Err(CtkError::EmptyRegion("total_volume"));
    }
    let n_levels = level_count(diameter(region)?, r);
    let mut levels = Vec::with_capacity(n_levels as usize + 1);
    for n in 0..=n_levels {
        let scale = n * r;
        levels.push((scale, minimal_cover_with(region, scale, cover_cfg)?));
    }
    Ok(CoverHierarchy { r, levels })
}

/// `V_r(Lambda)`: sum of minimal-cover cardinalities over the stride-`r`
/// scales. The level-0 cover is `Lambda` itself, so `V_r >= |Lambda|`.
pub fn total_volume(region: &Region, r: u32, cover_cfg: &CoverConfig) -> Result<u64> {
    Ok(cover_hierarchy(region, r, cover_cfg)?.total_volume())
}

/// Checks whether `parent` is a minimal cover of the union of `children`
/// (subordination). Materializes the union, so both collections must be
/// desk-scale.
pub fn is_subordinate(children: &[Cube], parent: &[Cube], cover_cfg: &CoverConfig) -> Result<bool> {
    if children.is_empty() || parent.is_empty() {
        return Ok(false);
    }
    let union = cubes_union(children);
    if !union.iter().all(|p| parent.iter().any(|c| c.contains(p))) {
        return Ok(false);
    }
    let scale = parent[0].scale();
    let minimal = minimal_cover_with(&union, scale, cover_cfg)?;
    Ok(minimal.len() == parent.len())
}

#[derive(Clone, Debug)]
pub struct SubordinateCountConfig {
    pub max_candidates: usize,
    pub max_combinations: u64,
    pub cover: CoverConfig,
}

impl Default for SubordinateCountConfig {
    fn default() -> Self {
        SubordinateCountConfig {
            max_candidates: 28,
            max_combinations: 400_000,
            cover: CoverConfig::default(),
        }
    }
}

/// Exhaustively counts collections of `child_scale`-cubes of cardinality
/// `v_target` to which the given parent collection is subordinate. Exact on
/// small instances; errors above the configured caps.
pub fn count_subordinate_covers(
    parent: &[Cube],
    child_scale: u32,
    v_target: u64,
    cfg: &SubordinateCountConfig,
) -> Result<u64> {
    if parent.is_empty() || v_target == 0 {
        return Ok(0);
    }
    let parent_union = cubes_union(parent);
    // candidate children: cubes contained in the parent union
    let mut centers: BTreeSet<Point> = BTreeSet::new();
    for p in parent_union.iter() {
        for cube in crate::lattice::cubes_containing(p, child_scale) {
            centers.insert(cube.center_index().clone());
        }
    }
    let candidates: Vec<Cube> = centers
        .into_iter()
        .map(|c| Cube::new(child_scale, c))
        .filter(|c| c.points().is_subset(&parent_union))
        .collect();
    if candidates.len() > cfg.max_candidates {
        return Err(CtkError::cap(
            "subordinate-cover candidates",
            candidates.len() as u64,
            cfg.max_candidates as u64,
        ));
    }
    let combos = crate::lattice::binomial(candidates.len() as u64, v_target);
    if combos > cfg.max_combinations as u128 {
        return Err(CtkError::cap(
            "subordinate-cover combinations",
            combos.min(u64::MAX as u128) as u64,
            cfg.max_combinations,
        ));
    }
    let mut count = 0u64;
    for subset in (0..candidates.len()).combinations(v_target as usize) {
        let chosen: Vec<Cube> = subset.iter().map(|&i| candidates[i].clone()).collect();
        if is_subordinate(&chosen, parent, &cfg.cover)? {
            count += 1;
        }
    }
    Ok(count)
}

/// Covers a connected graph by at most `ceil(n/k)` connected subgraphs of at
/// most `2k` vertices each, via the deepest-heavy-vertex recursion on a BFS
/// spanning tree.
pub fn tree_cover(n: usize, edges: &[(usize, usize)], k: usize) -> Result<Vec<Vec<usize>>> {
    assert!(k >= 1);
    if n == 0 {
        return Err(CtkError::EmptyRegion("tree_cover"));
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    // BFS spanning tree from vertex 0
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(0usize);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    if order.len() != n {
        return Err(CtkError::DisconnectedGraph);
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &v in &order {
        if parent[v] != usize::MAX {
            children[parent[v]].push(v);
        }
    }
    let mut depth = vec![0usize; n];
    for &v in &order {
        if parent[v] != usize::MAX {
            depth[v] = depth[parent[v]] + 1;
        }
    }

    let mut alive = vec![true; n];
    let mut alive_count = n;
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    loop {
        if alive_count <= 2 * k {
            let mut last: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
            last.sort_unstable();
            pieces.push(last);
            break;
        }
        // descendant counts over the living tree
        let mut desc = vec![0usize; n];
        for &v in order.iter().rev() {
            if alive[v] && parent[v] != usize::MAX && alive[parent[v]] {
                desc[parent[v]] += desc[v] + 1;
            }
        }
        // deepest vertex with at least k descendants (smallest id on ties)
        let mut pivot = usize::MAX;
        for v in 0..n {
            if alive[v]
                && desc[v] >= k
                && (pivot == usize::MAX
                    || depth[v] > depth[pivot]
                    || (depth[v] == depth[pivot] && v < pivot))
            {
                pivot = v;
            }
        }
        debug_assert!(pivot != usize::MAX);
        // accumulate child subtrees until the piece holds k..2k vertices
        let mut piece = vec![pivot];
        let mut taken = 0usize;
        for &c in &children[pivot] {
            if !alive[c] {
                continue;
            }
            let sub = collect_subtree(c, &children, &alive);
            taken += sub.len();
            piece.extend(sub);
            if taken >= k {
                break;
            }
        }
        debug_assert!(taken >= k && taken < 2 * k);
        for &v in piece.iter().skip(1) {
            alive[v] = false;
            alive_count -= 1;
        }
        piece.sort_unstable();
        pieces.push(piece);
    }
    Ok(pieces)
}

fn collect_subtree(root: usize, children: &[Vec<usize>], alive: &[bool]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        out.push(v);
        for &c in &children[v] {
            if alive[c] {
                stack.push(c);
            }
        }
    }
    out
}

/// The explicit entropy constants for stride `r` and separation `(M, a)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EntropyConstants {
    pub a: f64,
    pub r: u32,
    /// Subordinated-cover counting exponent.
    pub c: f64,
    /// Origin-family counting exponent.
    pub b: f64,
    /// Total-volume-per-size constant.
    pub kappa: f64,
    /// Contour counting exponent.
    pub c1: f64,
}

pub fn entropy_constants(d: u32, cp: &ContourParams) -> EntropyConstants {
    let c = constants::entropy_c(d, cp.r);
    let b = constants::entropy_b(d, cp.r);
    let kappa = constants::kappa(d, cp.a, cp.r, cp.m);
    let c1 = constants::c1(d, b, kappa);
    EntropyConstants {
        a: cp.a,
        r: cp.r,
        c,
        b,
        kappa,
        c1,
    }
}

/// Outcome of the `V_r(sp) <= kappa |gamma|` check for one contour.
#[derive(Clone, Debug, Serialize)]
pub struct KappaCheck {
    pub total_volume: u64,
    pub size: usize,
    pub kappa: f64,
    pub ok: bool,
}

pub fn check_kappa(
    gamma: &Contour,
    d: u32,
    cp: &ContourParams,
    cover_cfg: &CoverConfig,
) -> Result<KappaCheck> {
    let v = total_volume(&gamma.support, cp.r, cover_cfg)?;
    let kappa = constants::kappa(d, cp.a, cp.r, cp.m);
    Ok(KappaCheck {
        total_volume: v,
        size: gamma.size(),
        kappa,
        ok: (v as f64) <= kappa * gamma.size() as f64,
    })
}

#[derive(Clone, Debug)]
pub struct FvConfig {
    /// Largest admissible total volume.
    pub max_v: u64,
    /// Budget for the candidate-universe scan (box points).
    pub max_universe_scan: u64,
    /// Materialize the member list only up to this count.
    pub materialize_cap: u64,
    /// Cross-check every `sample_every`-th member against the full cover
    /// machinery.
    pub sample_every: u64,
    pub cover: CoverConfig,
}

impl Default for FvConfig {
    fn default() -> Self {
        FvConfig {
            max_v: 6,
            max_universe_scan: 200_000_000,
            materialize_cap: 200_000,
            sample_every: 4096,
            cover: CoverConfig::default(),
        }
    }
}

/// Result of enumerating the origin-containing sets with total volume `v`.
#[derive(Clone, Debug, Serialize)]
pub struct FvEnumeration {
    pub v: u64,
    pub count: u64,
    /// `e^(b v)`.
    pub bound: f64,
    pub b: f64,
    /// Full member list when `count <= materialize_cap`.
    pub members: Option<Vec<Region>>,
}

/// Exhaustively enumerates `{Lambda finite : V_r(Lambda) = v, 0 in Lambda}`.
///
/// The candidate universe is `{x : V_r({0,x}) <= v}`, valid because `V_r` is
/// monotone under inclusion and bounded below by every pair; a pair's levels
/// below the top each contribute at least one cube, so `|x| <= 2^(r(v-2))`
/// bounds the scan. A DFS over point sets in lexicographic order then prunes
/// on `V_r(partial) > v`. Cover sizes for these tiny sets come from an exact
/// set-partition search, cross-checked on a sample against branch and bound.
pub fn enumerate_fv(v: u64, d: u32, r: u32, cfg: &FvConfig) -> Result<FvEnumeration> {
    if v > cfg.max_v {
        return Err(CtkError::cap("enumerate_fv v", v, cfg.max_v));
    }
    if v == 0 {
        return Err(CtkError::InvalidParams("total volume starts at 1".into()));
    }
    let b = constants::entropy_b(d, r);
    let bound = (b * v as f64).exp();
    let origin = Point::origin(d as usize);

    if v == 1 {
        // only the singleton reaches V_r = 1
        return Ok(FvEnumeration {
            v,
            count: 1,
            bound,
            b,
            members: Some(vec![Region::singleton(origin)]),
        });
    }

    let radius_exp = r as u64 * (v - 2);
    if radius_exp > 40 {
        return Err(CtkError::cap(
            "enumerate_fv universe radius exponent",
            radius_exp,
            40,
        ));
    }
    let radius = 1i64 << radius_exp;
    let scan: u128 = (2 * radius as u128 + 1).pow(d);
    if scan > cfg.max_universe_scan as u128 {
        return Err(CtkError::cap(
            "enumerate_fv universe scan",
            scan.min(u64::MAX as u128) as u64,
            cfg.max_universe_scan,
        ));
    }

    let lo = vec![-radius; d as usize];
    let hi = vec![radius; d as usize];
    let mut universe: Vec<Point> = Vec::new();
    crate::lattice::for_each_box_point(&lo, &hi, |c| {
        let p = Point(c.to_vec());
        if p.l1_norm() != 0 && small_set_total_volume(&[origin.clone(), p.clone()], r) <= v {
            universe.push(p);
        }
    });

    // DFS over ordered subsets, parallel over the first added point
    let results: Vec<(u64, Vec<Region>)> = (0..universe.len())
        .into_par_iter()
        .map(|first| {
            let mut count = 0u64;
            let mut members: Vec<Region> = Vec::new();
            let mut set = vec![origin.clone(), universe[first].clone()];
            dfs_fv(&mut set, first, &universe, v, r, d, cfg, &mut count, &mut members);
            (count, members)
        })
        .collect();

    let mut count = 0u64;
    let mut members: Vec<Region> = Vec::new();
    for (c, m) in results {
        count += c;
        if members.len() as u64 <= cfg.materialize_cap {
            members.extend(m);
        }
    }
    let members = if count <= cfg.materialize_cap {
        members.sort_by_key(|m| m.to_coords());
        Some(members)
    } else {
        None
    };
    Ok(FvEnumeration {
        v,
        count,
        bound,
        b,
        members,
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs_fv(
    set: &mut Vec<Point>,
    last_index: usize,
    universe: &[Point],
    v: u64,
    r: u32,
    d: u32,
    cfg: &FvConfig,
    count: &mut u64,
    members: &mut Vec<Region>,
) {
    let current = small_set_total_volume(set, r);
    if current > v {
        return;
    }
    if current == v {
        *count += 1;
        if *count % cfg.sample_every == 0 {
            // cross-check the fast cover on a sampled member
            let region = Region::from_points(d as usize, set.iter().cloned()).unwrap();
            let full = total_volume(&region, r, &cfg.cover).expect("nonempty");
            assert_eq!(full, current, "fast cover disagrees with branch and bound");
        }
        if (members.len() as u64) < cfg.materialize_cap {
            members.push(Region::from_points(d as usize, set.iter().cloned()).unwrap());
        }
    }
    // any (k+1)-point extension has V_r >= k+1, plus one more level once
    // there are three points (diameter >= 2 is then forced)
    let extension_floor = set.len() as u64 + 1 + u64::from(set.len() + 1 >= 3);
    if extension_floor > v {
        return;
    }
    for next in last_index + 1..universe.len() {
        set.push(universe[next].clone());
        dfs_fv(set, next, universe, v, r, d, cfg, count, members);
        set.pop();
    }
}

/// Exact `V_r` for very small point sets: minimal covers via set-partition
/// search (a cover by cubes induces a partition of the points into
/// cube-fitting blocks, and conversely).
pub(crate) fn small_set_total_volume(points: &[Point], r: u32) -> u64 {
    let mut diam = 0u64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            diam = diam.max(points[i].l1_distance(&points[j]));
        }
    }
    let levels = level_count(diam, r);
    let mut total = points.len() as u64;
    for n in 1..=levels {
        total += small_set_cover_size(points, n * r) as u64;
    }
    total
}

fn small_set_cover_size(points: &[Point], scale: u32) -> usize {
    let n = points.len();
    assert!(n <= 12, "set-partition cover only for tiny sets");
    if scale == 0 {
        return n;
    }
    let masks = 1usize << n;
    let mut fits = vec![false; masks];
    for (mask, f) in fits.iter_mut().enumerate().skip(1) {
        *f = cube_fits(points, mask, scale);
    }
    // dp over subsets: minimum number of cube-fitting blocks covering mask
    let mut dp = vec![usize::MAX; masks];
    dp[0] = 0;
    for mask in 1..masks {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub != 0 {
            if sub & low != 0 && fits[sub] && dp[mask ^ sub] != usize::MAX {
                dp[mask] = dp[mask].min(dp[mask ^ sub] + 1);
            }
            sub = (sub - 1) & mask;
        }
    }
    dp[masks - 1]
}

/// One scale-`m` cube can contain the masked points iff per axis an aligned
/// window `[s(c-1), s(c+1)]` spans their min and max.
fn cube_fits(points: &[Point], mask: usize, scale: u32) -> bool {
    let dim = points[0].dim();
    let s = 1i64 << (scale - 1);
    for axis in 0..dim {
        let mut min = i64::MAX;
        let mut max = i64::MIN;
        for (i, p) in points.iter().enumerate() {
            if mask >> i & 1 == 1 {
                min = min.min(p.0[axis]);
                max = max.max(p.0[axis]);
            }
        }
        let c_min = max.div_euclid(s) + if max.rem_euclid(s) == 0 { -1 } else { 0 };
        let c_max = min.div_euclid(s) + 1;
        if c_min > c_max {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct C0Config {
    pub max_m: u64,
    pub node_budget: u64,
    pub cover: CoverConfig,
}

impl Default for C0Config {
    fn default() -> Self {
        C0Config {
            max_m: 6,
            node_budget: 50_000_000,
            cover: CoverConfig::default(),
        }
    }
}

/// Result of the exhaustive contour-support sweep.
#[derive(Clone, Debug, Serialize)]
pub struct C0Enumeration {
    pub m: u64,
    pub count: u64,
    /// `e^(c1 m)`.
    pub bound: f64,
    pub c1: f64,
    pub supports: Vec<Region>,
}

/// Enumerates all distinct supports of size `m` of minus-labelled
/// singleton-compatible contours with `0 in V(gamma)` arising from
/// configurations in the box `[-w, w]^d`.
///
/// The sweep walks plus-sets in lexicographic DFS order; a branch is cut
/// once the points that are already permanently incorrect (their unit balls
/// can never become monochrome again) outnumber `m`. This loses nothing:
/// a singleton-compatible contour of size `m` is witnessed by its canonical
/// reconstruction, whose entire boundary is the support.
pub fn enumerate_contours_c0(
    m: u64,
    box_half_width: i64,
    d: u32,
    cp: &ContourParams,
    cfg: &C0Config,
) -> Result<C0Enumeration> {
    if m > cfg.max_m {
        return Err(CtkError::cap("enumerate_contours_c0 m", m, cfg.max_m));
    }
    if m == 0 || box_half_width < 1 {
        return Err(CtkError::InvalidParams(
            "need m >= 1 and a nonempty box".into(),
        ));
    }
    let lo = vec![-box_half_width; d as usize];
    let hi = vec![box_half_width; d as usize];
    let window = Region::from_box(&lo, &hi)?;
    let sites: Vec<Point> = window.iter().cloned().collect();

    let mut supports: BTreeSet<Region> = BTreeSet::new();
    let mut budget = cfg.node_budget;
    let mut chosen: Vec<usize> = Vec::new();
    sweep_plus_sets(
        &sites,
        &window,
        0,
        &mut chosen,
        m,
        d,
        cp,
        cfg,
        &mut supports,
        &mut budget,
    )?;

    let ec = entropy_constants(d, cp);
    let supports: Vec<Region> = supports.into_iter().collect();
    Ok(C0Enumeration {
        m,
        count: supports.len() as u64,
        bound: (ec.c1 * m as f64).exp(),
        c1: ec.c1,
        supports,
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_plus_sets(
    sites: &[Point],
    window: &Region,
    next: usize,
    chosen: &mut Vec<usize>,
    m: u64,
    d: u32,
    cp: &ContourParams,
    cfg: &C0Config,
    supports: &mut BTreeSet<Region>,
    budget: &mut u64,
) -> Result<()> {
    if *budget == 0 {
        return Err(CtkError::cap(
            "enumerate_contours_c0 nodes",
            cfg.node_budget,
            cfg.node_budget,
        ));
    }
    *budget -= 1;

    if permanently_incorrect_count(sites, window, chosen, next) > m {
        return Ok(());
    }
    if !chosen.is_empty() {
        collect_c0_candidates(sites, window, chosen, m, d, cp, cfg, supports)?;
    }
    for i in next..sites.len() {
        chosen.push(i);
        sweep_plus_sets(sites, window, i + 1, chosen, m, d, cp, cfg, supports, budget)?;
        chosen.pop();
    }
    Ok(())
}

/// Counts points whose incorrectness is already irrevocable: a permanently
/// minus point (outside the window or already passed over) adjacent to a
/// chosen plus, and every chosen plus with such a neighbor. Free sites are
/// those with index `>= next`.
fn permanently_incorrect_count(
    sites: &[Point],
    window: &Region,
    chosen: &[usize],
    next: usize,
) -> u64 {
    let plus: BTreeSet<&Point> = chosen.iter().map(|&i| &sites[i]).collect();
    let mut incorrect: BTreeSet<Point> = BTreeSet::new();
    let free = |p: &Point| -> bool {
        if !window.contains(p) {
            return false;
        }
        match sites.binary_search(p) {
            Ok(i) => i >= next,
            Err(_) => false,
        }
    };
    for &i in chosen {
        let p = &sites[i];
        let mut has_permanent_minus = false;
        for q in p.unit_neighbors() {
            if plus.contains(&q) || free(&q) {
                continue;
            }
            has_permanent_minus = true;
            incorrect.insert(q);
        }
        if has_permanent_minus {
            incorrect.insert(p.clone());
        }
    }
    incorrect.len() as u64
}

#[allow(clippy::too_many_arguments)]
fn collect_c0_candidates(
    sites: &[Point],
    window: &Region,
    chosen: &[usize],
    m: u64,
    d: u32,
    cp: &ContourParams,
    cfg: &C0Config,
    supports: &mut BTreeSet<Region>,
) -> Result<()> {
    let plus = Region::from_points(d as usize, chosen.iter().map(|&i| sites[i].clone()))?;
    let sigma = SpinConfiguration::from_plus_set(window.clone(), &plus, -1)?;
    let contours = match contours_of(&sigma, cp, &cfg.cover) {
        Ok(c) => c,
        Err(_) => return Ok(()),
    };
    let origin = Point::origin(d as usize);
    for c in contours {
        if c.size() as u64 != m
            || c.label_exterior != -1
            || !c.volume().contains(&origin)
            || !c.volume().is_subset(window)
            || supports.contains(&c.support)
        {
            continue;
        }
        // singleton compatibility: the contour alone must reproduce itself
        if crate::contour::is_compatible(std::slice::from_ref(&c), window, cp) {
            supports.insert(c.support.clone());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn level_count_conventions() {
        assert_eq!(level_count(0, 6), 0);
        assert_eq!(level_count(1, 6), 0);
        assert_eq!(level_count(2, 1), 1);
        assert_eq!(level_count(2, 6), 1);
        assert_eq!(level_count(64, 6), 1);
        assert_eq!(level_count(65, 6), 2);
    }

    #[test]
    fn total_volume_examples() {
        let cfg = CoverConfig::default();
        assert_eq!(
            total_volume(&Region::singleton(point(&[0, 0])), 6, &cfg).unwrap(),
            1
        );
        // d=1, r=1, {0,1,2}: level 0 has 3 cubes, level 1 one cube
        let line = Region::from_points(1, [point(&[0]), point(&[1]), point(&[2])]).unwrap();
        assert_eq!(total_volume(&line, 1, &cfg).unwrap(), 4);
        // V_r >= |Lambda|
        let ball = crate::lattice::l1_ball(&point(&[0, 0]), 2);
        assert!(total_volume(&ball, 6, &cfg).unwrap() >= ball.len() as u64);
    }

    #[test]
    fn small_set_total_volume_matches_full_machinery() {
        let cfg = CoverConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let k = rng.gen_range(1..=4);
            let pts: BTreeSet<Point> = (0..k)
                .map(|_| point(&[rng.gen_range(-70..70i64), rng.gen_range(-70..70i64)]))
                .collect();
            let pts: Vec<Point> = pts.into_iter().collect();
            let region = Region::from_points(2, pts.iter().cloned()).unwrap();
            for r in [1u32, 2, 6] {
                assert_eq!(
                    small_set_total_volume(&pts, r),
                    total_volume(&region, r, &cfg).unwrap(),
                    "pts {:?} r {}",
                    pts,
                    r
                );
            }
        }
    }

    #[test]
    fn tree_cover_whole_graph_when_k_large() {
        let edges = [(0usize, 1usize), (1, 2), (2, 3)];
        let pieces = tree_cover(4, &edges, 10).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn tree_cover_respects_bounds_on_path_and_star() {
        // path of 5, k=2: <= 3 pieces of <= 4 vertices
        let edges: Vec<(usize, usize)> = (0..4).map(|i| (i, i + 1)).collect();
        let pieces = tree_cover(5, &edges, 2).unwrap();
        assert!(pieces.len() <= 3);
        for p in &pieces {
            assert!(p.len() <= 4);
        }
        let covered: BTreeSet<usize> = pieces.iter().flatten().copied().collect();
        assert_eq!(covered.len(), 5);

        // star with 9 leaves, k=3: <= 4 pieces of <= 6, all connected
        let edges: Vec<(usize, usize)> = (1..=9).map(|i| (0, i)).collect();
        let pieces = tree_cover(10, &edges, 3).unwrap();
        assert!(pieces.len() <= 4);
        for p in &pieces {
            assert!(p.len() <= 6);
            if p.len() > 1 {
                assert!(p.contains(&0)); // star pieces must hold the hub
            }
        }
    }

    #[test]
    fn tree_cover_rejects_disconnected() {
        assert!(tree_cover(4, &[(0, 1), (2, 3)], 2).is_err());
    }

    fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v));
        }
        let extra = rng.gen_range(0..n);
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges
    }

    #[test]
    fn tree_cover_property_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=60);
            let edges = random_connected_graph(&mut rng, n);
            for k in [1usize, 2, 3, 8] {
                let pieces = tree_cover(n, &edges, k).unwrap();
                assert!(pieces.len() <= n.div_ceil(k));
                let mut covered = vec![false; n];
                for p in &pieces {
                    assert!(p.len() <= 2 * k);
                    assert!(piece_connected(n, &edges, p));
                    for &v in p {
                        covered[v] = true;
                    }
                }
                assert!(covered.iter().all(|&c| c));
            }
        }
    }

    fn piece_connected(n: usize, edges: &[(usize, usize)], piece: &[usize]) -> bool {
        if piece.len() <= 1 {
            return true;
        }
        let inside: BTreeSet<usize> = piece.iter().copied().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if inside.contains(&u) && inside.contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![piece[0]];
        seen.insert(piece[0]);
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen.len() == piece.len()
    }

    #[test]
    fn subordinate_count_d1_example() {
        // parent = C_1(0) = {-1,0,1}; children at scale 0 are single points;
        // every single point inside has the one-cube parent as minimal cover
        let parent = [Cube::new(1, point(&[0]))];
        let cfg = SubordinateCountConfig::default();
        let count = count_subordinate_covers(&parent, 0, 1, &cfg).unwrap();
        assert_eq!(count, 3);
        let c = constants::entropy_c(1, 1);
        assert!((count as f64) <= c.exp());
    }

    #[test]
    fn subordinate_count_empty_parent() {
        let cfg = SubordinateCountConfig::default();
        assert_eq!(count_subordinate_covers(&[], 0, 1, &cfg).unwrap(), 0);
    }

    #[test]
    fn fv_one_is_the_singleton() {
        let cfg = FvConfig::default();
        let out = enumerate_fv(1, 2, 6, &cfg).unwrap();
        assert_eq!(out.count, 1);
        let members = out.members.unwrap();
        assert_eq!(members[0], Region::singleton(point(&[0, 0])));
    }

    #[test]
    fn fv_two_is_the_adjacent_pairs() {
        let cfg = FvConfig::default();
        let out = enumerate_fv(2, 2, 6, &cfg).unwrap();
        // {0, +-e_i}: diameter 1 keeps a single level of two points
        assert_eq!(out.count, 4);
        for m in out.members.unwrap() {
            assert!(m.contains(&point(&[0, 0])));
            assert_eq!(m.len(), 2);
            assert_eq!(total_volume(&m, 6, &CoverConfig::default()).unwrap(), 2);
        }
    }

    #[test]
    fn fv_members_validate_definition() {
        let cfg = FvConfig::default();
        let out = enumerate_fv(3, 2, 6, &cfg).unwrap();
        assert!(out.count > 0);
        assert!((out.count as f64) <= out.bound);
        for m in out.members.unwrap() {
            assert!(m.contains(&point(&[0, 0])));
            assert_eq!(total_volume(&m, 6, &CoverConfig::default()).unwrap(), 3);
        }
    }

    #[test]
    fn entropy_constants_examples() {
        let cp = ContourParams::new(1.0, 3.5, 6, 0.5);
        let ec = entropy_constants(2, &cp);
        assert!((ec.c - 13.15).abs() < 0.01);
        assert!((ec.b - 17.04).abs() < 0.01);
        assert!(ec.kappa > 0.0 && ec.c1 > 0.0);
        assert!((ec.c1 - (2.0 * ec.b * ec.kappa + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn c0_m1_is_empty() {
        let cp = ContourParams::new(1e9, 3.5, 6, 0.5);
        let cfg = C0Config::default();
        let out = enumerate_contours_c0(1, 2, 2, &cp, &cfg).unwrap();
        assert_eq!(out.count, 0);
    }

    #[test]
    fn c0_m5_contains_unit_balls() {
        // huge M merges everything, so only genuinely isolated five-point
        // boundaries (single flips) appear
        let cp = ContourParams::new(1e9, 3.5, 6, 0.5);
        let cfg = C0Config::default();
        let out = enumerate_contours_c0(5, 2, 2, &cp, &cfg).unwrap();
        let origin = point(&[0, 0]);
        // supports are exactly B_1(z) for z with 0 in B_1(z): 5 of them
        assert_eq!(out.count, 5, "supports: {:?}", out.supports);
        for s in &out.supports {
            assert_eq!(s.len(), 5);
            assert!(s.contains(&origin));
        }
        assert!((out.count as f64) <= out.bound);
    }
}

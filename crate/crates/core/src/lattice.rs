//! Exact integer-lattice geometry.
//!
//! Everything here is `l1`: balls, spheres, diameters and set distances all
//! use the `l1` norm, matching the ball geometry the sphere-count formula and
//! the surface-energy estimates are stated in.

use std::collections::BTreeSet;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CtkError, Result};

pub mod cover;

pub use cover::{minimal_cover, minimal_cover_with, CoverConfig, CoverResult};

/// A point of `Z^d`. The coordinate vector length is the dimension.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn origin(dim: usize) -> Point {
        Point(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    /// `l1` distance to another point. Panics on dimension mismatch; mixed
    /// dimensions are rejected earlier, at `Region` construction.
    pub fn l1_distance(&self, other: &Point) -> u64 {
        assert_eq!(self.dim(), other.dim(), "point dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    pub fn translated(&self, t: &Point) -> Point {
        Point(self.0.iter().zip(&t.0).map(|(a, b)| a + b).collect())
    }

    /// The `2d` nearest neighbors.
    pub fn unit_neighbors(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for i in 0..self.dim() {
            for s in [-1i64, 1] {
                let mut c = self.0.clone();
                c[i] += s;
                out.push(Point(c));
            }
        }
        out
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

pub fn point(coords: &[i64]) -> Point {
    Point(coords.to_vec())
}

/// Checked `l1` distance between two points.
pub fn l1_distance(p: &Point, q: &Point) -> Result<u64> {
    if p.dim() != q.dim() {
        return Err(CtkError::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(p.l1_distance(q))
}

/// Visits every integer point of the box `[lo_i, hi_i]` in lexicographic
/// order. Empty if any axis has `lo_i > hi_i`.
pub(crate) fn for_each_box_point(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
    let dim = lo.len();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    if dim == 0 {
        return;
    }
    let mut cur = lo.to_vec();
    'all: loop {
        f(&cur);
        for axis in (0..dim).rev() {
            if cur[axis] < hi[axis] {
                cur[axis] += 1;
                for i in axis + 1..dim {
                    cur[i] = lo[i];
                }
                continue 'all;
            }
        }
        break;
    }
}

/// A finite subset of `Z^d` with set semantics and deterministic
/// (lexicographic) iteration order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Region {
    dim: usize,
    points: BTreeSet<Point>,
}

impl Region {
    pub fn empty(dim: usize) -> Region {
        Region {
            dim,
            points: BTreeSet::new(),
        }
    }

    pub fn singleton(p: Point) -> Region {
        let dim = p.dim();
        let mut points = BTreeSet::new();
        points.insert(p);
        Region { dim, points }
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(dim: usize, iter: I) -> Result<Region> {
        let mut points = BTreeSet::new();
        for p in iter {
            if p.dim() != dim {
                return Err(CtkError::DimensionMismatch(dim, p.dim()));
            }
            points.insert(p);
        }
        Ok(Region { dim, points })
    }

    /// Builds a region from raw coordinate rows, inferring the dimension from
    /// the first row.
    pub fn from_coords(rows: Vec<Vec<i64>>) -> Result<Region> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        Region::from_points(dim, rows.into_iter().map(Point))
    }

    /// Axis-aligned integer box `[lo_i, hi_i]` in each axis.
    pub fn from_box(lo: &[i64], hi: &[i64]) -> Result<Region> {
        if lo.len() != hi.len() {
            return Err(CtkError::DimensionMismatch(lo.len(), hi.len()));
        }
        let mut points = BTreeSet::new();
        for_each_box_point(lo, hi, |c| {
            points.insert(Point(c.to_vec()));
        });
        Ok(Region {
            dim: lo.len(),
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    pub fn insert(&mut self, p: Point) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(CtkError::DimensionMismatch(self.dim, p.dim()));
        }
        Ok(self.points.insert(p))
    }

    pub fn remove(&mut self, p: &Point) -> bool {
        self.points.remove(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    /// Lexicographically smallest point, if any.
    pub fn min_point(&self) -> Option<&Point> {
        self.points.iter().next()
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Region {
            dim: if self.is_empty() { other.dim } else { self.dim },
            points,
        }
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region {
            dim: self.dim,
            points: self.points.difference(&other.points).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region {
            dim: self.dim,
            points: self.points.intersection(&other.points).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.points.is_subset(&other.points)
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.points.is_disjoint(&other.points)
    }

    pub fn translated(&self, t: &Point) -> Region {
        Region {
            dim: self.dim,
            points: self.points.iter().map(|p| p.translated(t)).collect(),
        }
    }

    /// Per-axis (min, max) over all points.
    pub fn bounding_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let first = self.points.iter().next()?;
        let mut lo = first.0.clone();
        let mut hi = first.0.clone();
        for p in &self.points {
            for i in 0..self.dim {
                lo[i] = lo[i].min(p.0[i]);
                hi[i] = hi[i].max(p.0[i]);
            }
        }
        Some((lo, hi))
    }

    /// Minimum `l1` distance between two nonempty regions.
    pub fn l1_distance(&self, other: &Region) -> Result<u64> {
        if self.is_empty() || other.is_empty() {
            return Err(CtkError::EmptyRegion("set distance"));
        }
        let mut best = u64::MAX;
        for p in &self.points {
            for q in &other.points {
                best = best.min(p.l1_distance(q));
                if best == 0 {
                    return Ok(0);
                }
            }
        }
        Ok(best)
    }

    pub fn to_coords(&self) -> Vec<Vec<i64>> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points.iter()).finish()
    }
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.points.iter().map(|p| &p.0))
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<i64>> = Vec::deserialize(deserializer)?;
        Region::from_coords(rows).map_err(serde::de::Error::custom)
    }
}

/// Closed `l1` ball `B_R(center)`.
pub fn l1_ball(center: &Point, radius: u64) -> Region {
    let dim = center.dim();
    let mut points = BTreeSet::new();
    let mut coords = vec![0i64; dim];
    fill_ball(center, radius as i64, 0, &mut coords, &mut points);
    Region { dim, points }
}

fn fill_ball(
    center: &Point,
    budget: i64,
    axis: usize,
    coords: &mut Vec<i64>,
    out: &mut BTreeSet<Point>,
) {
    if axis == center.dim() {
        out.insert(Point(coords.clone()));
        return;
    }
    for v in -budget..=budget {
        coords[axis] = center.0[axis] + v;
        fill_ball(center, budget - v.abs(), axis + 1, coords, out);
    }
}

/// Exact binomial coefficient with the `C(a,b) = 0` for `a < b` convention.
pub fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut num: u128 = 1;
    for i in 0..b {
        num = num * (a - i) as u128 / (i + 1) as u128;
    }
    num
}

/// Number of integer points on the `l1` sphere of radius `n` in `Z^d`:
/// `s_d(n) = sum_k 2^(d-k) C(d,k) C(n-1, d-k-1)`.
///
/// Terms with `n-1 < d-k-1` vanish under the `C(a,b) = 0` for `a < b`
/// convention, which also covers `n < d` correctly (e.g. `s_3(2) = 18`);
/// starting the sum at `k = n` instead would undercount there.
pub fn sphere_count(d: u32, n: u64) -> u64 {
    assert!(d >= 1 && n >= 1);
    let mut total: u128 = 0;
    for k in 0..d {
        let c1 = binomial(d as u64, k as u64);
        let c2 = binomial(n - 1, (d - k - 1) as u64);
        total += (1u128 << (d - k)) * c1 * c2;
    }
    total as u64
}

/// Maximum pairwise `l1` distance.
pub fn diameter(region: &Region) -> Result<u64> {
    if region.is_empty() {
        return Err(CtkError::EmptyRegion("diameter"));
    }
    let pts: Vec<&Point> = region.iter().collect();
    let mut best = 0u64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(pts[i].l1_distance(pts[j]));
        }
    }
    Ok(best)
}

/// Inner boundary: points of the region with a nearest neighbor outside.
pub fn inner_boundary(region: &Region) -> Region {
    let mut out = BTreeSet::new();
    for p in region.iter() {
        if p.unit_neighbors().iter().any(|q| !region.contains(q)) {
            out.insert(p.clone());
        }
    }
    Region {
        dim: region.dim,
        points: out,
    }
}

/// Edge boundary: unordered nearest-neighbor pairs crossing the region,
/// returned as (inside, outside) pairs in lexicographic order.
pub fn edge_boundary(region: &Region) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for p in region.iter() {
        for q in p.unit_neighbors() {
            if !region.contains(&q) {
                out.push((p.clone(), q));
            }
        }
    }
    out.sort();
    out
}

/// Maximal nearest-neighbor-connected pieces, ordered by their
/// lexicographically smallest point.
pub fn connected_components(region: &Region) -> Vec<Region> {
    let mut seen: HashSet<Point> = HashSet::new();
    let mut comps = Vec::new();
    for start in region.iter() {
        if seen.contains(start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut queue = VecDeque::new();
        queue.push_back(start.clone());
        seen.insert(start.clone());
        while let Some(p) = queue.pop_front() {
            for q in p.unit_neighbors() {
                if region.contains(&q) && seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
            comp.insert(p);
        }
        comps.push(Region {
            dim: region.dim,
            points: comp,
        });
    }
    // BTreeSet iteration visits starts in lexicographic order, so components
    // come out ordered by minimum point.
    comps
}

/// `(V(Lambda), I(Lambda))`: the filled volume (complement of the unbounded
/// component of the complement) and the interior `V \ Lambda`.
///
/// Computed by flood fill of the complement inside the bounding box inflated
/// by 2; every complement component touching the inflated shell is unbounded.
/// The output is invariant under larger inflations.
pub fn volume_and_interior(region: &Region) -> (Region, Region) {
    volume_and_interior_with_halo(region, 2)
}

pub fn volume_and_interior_with_halo(region: &Region, halo: i64) -> (Region, Region) {
    assert!(halo >= 2);
    if region.is_empty() {
        return (Region::empty(region.dim), Region::empty(region.dim));
    }
    let dim = region.dim;
    let (blo, bhi) = region.bounding_box().unwrap();
    let lo: Vec<i64> = blo.iter().map(|v| v - halo).collect();
    let hi: Vec<i64> = bhi.iter().map(|v| v + halo).collect();
    let extents: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a + 1) as usize)
        .collect();
    let mut strides = vec![1usize; dim];
    for i in (0..dim.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * extents[i + 1];
    }
    let total: usize = extents.iter().product();
    let index = |p: &[i64]| -> usize {
        p.iter()
            .enumerate()
            .map(|(i, c)| ((c - lo[i]) as usize) * strides[i])
            .sum()
    };
    let in_box = |p: &[i64]| {
        p.iter()
            .enumerate()
            .all(|(i, c)| *c >= lo[i] && *c <= hi[i])
    };

    let mut occupied = vec![false; total];
    for p in region.iter() {
        occupied[index(&p.0)] = true;
    }

    let mut outside = vec![false; total];
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for_each_box_point(&lo, &hi, |c| {
        let on_shell = c.iter().enumerate().any(|(i, v)| *v == lo[i] || *v == hi[i]);
        if on_shell {
            let idx = index(c);
            if !occupied[idx] && !outside[idx] {
                outside[idx] = true;
                queue.push_back(c.to_vec());
            }
        }
    });
    while let Some(p) = queue.pop_front() {
        for i in 0..dim {
            for s in [-1i64, 1] {
                let mut q = p.clone();
                q[i] += s;
                if in_box(&q) {
                    let idx = index(&q);
                    if !occupied[idx] && !outside[idx] {
                        outside[idx] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
    }

    let mut interior = BTreeSet::new();
    for_each_box_point(&lo, &hi, |c| {
        let idx = index(c);
        if !occupied[idx] && !outside[idx] {
            interior.insert(Point(c.to_vec()));
        }
    });
    let interior = Region {
        dim,
        points: interior,
    };
    let volume = region.union(&interior);
    (volume, interior)
}

/// Dyadic cube `C_n(x)`: for `n >= 1` the integer box
/// `prod_i [2^(n-1) x_i - 2^(n-1), 2^(n-1) x_i + 2^(n-1)]` (sidelength `2^n`,
/// center `2^(n-1) x`); `C_0(x)` is the single point `x`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cube {
    scale: u32,
    center_index: Point,
}

impl Cube {
    pub fn new(scale: u32, center_index: Point) -> Cube {
        Cube {
            scale,
            center_index,
        }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn center_index(&self) -> &Point {
        &self.center_index
    }

    pub fn dim(&self) -> usize {
        self.center_index.dim()
    }

    /// Per-axis closed bounds `[lo_i, hi_i]`.
    pub fn bounds(&self) -> (Vec<i64>, Vec<i64>) {
        if self.scale == 0 {
            return (self.center_index.0.clone(), self.center_index.0.clone());
        }
        let s = 1i64 << (self.scale - 1);
        let lo = self.center_index.0.iter().map(|x| s * (x - 1)).collect();
        let hi = self.center_index.0.iter().map(|x| s * (x + 1)).collect();
        (lo, hi)
    }

    pub fn contains(&self, p: &Point) -> bool {
        let (lo, hi) = self.bounds();
        p.0.iter()
            .enumerate()
            .all(|(i, c)| *c >= lo[i] && *c <= hi[i])
    }

    pub fn points(&self) -> Region {
        let (lo, hi) = self.bounds();
        let mut points = BTreeSet::new();
        for_each_box_point(&lo, &hi, |c| {
            points.insert(Point(c.to_vec()));
        });
        Region {
            dim: self.dim(),
            points,
        }
    }

    /// Exact `l1` distance between two cubes (0 when they intersect).
    pub fn l1_distance(&self, other: &Cube) -> u64 {
        let (alo, ahi) = self.bounds();
        let (blo, bhi) = other.bounds();
        let mut total = 0u64;
        for i in 0..alo.len() {
            let gap = (blo[i] - ahi[i]).max(alo[i] - bhi[i]).max(0);
            total += gap as u64;
        }
        total
    }

    pub fn l1_distance_to_point(&self, p: &Point) -> u64 {
        let (lo, hi) = self.bounds();
        let mut total = 0u64;
        for i in 0..lo.len() {
            let gap = (lo[i] - p.0[i]).max(p.0[i] - hi[i]).max(0);
            total += gap as u64;
        }
        total
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}({:?})", self.scale, self.center_index)
    }
}

/// All scale-`n` cubes containing `p`; at most `3^d` of them.
pub fn cubes_containing(p: &Point, scale: u32) -> Vec<Cube> {
    if scale == 0 {
        return vec![Cube::new(0, p.clone())];
    }
    let s = 1i64 << (scale - 1);
    
    // s(x-1) <= c <= s(x+1)  <=>  ceil(c/s) - 1 <= x <= floor(c/s) + 1
    let lo: Vec<i64> = p
        .0
        .iter()
        .map(|c| {
            let q = c.div_euclid(s);
            if c.rem_euclid(s) == 0 {
                q - 1
            } else {
                q
            }
        })
        .collect();
    let hi: Vec<i64> = p.0.iter().map(|c| c.div_euclid(s) + 1).collect();
    let mut out = Vec::new();
    for_each_box_point(&lo, &hi, |c| {
        out.push(Cube::new(scale, Point(c.to_vec())));
    });
    out
}

/// Union of the point sets of a cube collection.
pub fn cubes_union(cubes: &[Cube]) -> Region {
    let mut out = Region::empty(cubes.first().map(|c| c.dim()).unwrap_or(0));
    for c in cubes {
        out = out.union(&c.points());
    }
    out
}

/// Deterministic index map point -> position for a slice of sorted points.
pub(crate) fn index_map(points: &[Point]) -> HashMap<Point, usize> {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect()
}

//! Boundary detection, multiscale `(M,a,r)`-partitions of the incorrect-point
//! set, contour labels and interiors, the erase map, and compatibility.
//!
//! The partition construction peels the boundary scale by scale: cover the
//! remaining points by a minimum cover of `n`-cubes, link cubes closer than
//! `M d^a 2^(an)`, and extract every connected component with at most
//! `2^r - 1` cubes as one part. Parts produced this way satisfy both the
//! containment condition (A) and the distance/witness condition (B), which
//! `verify_partition` checks directly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::{CtkError, Result};
use crate::lattice::{
    connected_components, inner_boundary, minimal_cover_with, volume_and_interior, CoverConfig,
    Cube, Point, Region,
};
use crate::model::{lattice_sum_radial, ModelParams, SpinConfiguration};

/// Parameters of the `(M,a,r)`-partition.
///
/// Derived from the model: `a = max{(d+1+eps)/(alpha-d), d+1+eps}` and
/// `r = ceil(log2(a+1)) + d + 1`. The separation amplitude `M` defaults to
/// the erase-cost threshold `max{(2^r-1)^(d+1)/k_d^d, M1, M2}` and can be
/// overridden (geometric tests typically run at small `M`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContourParams {
    #[serde(rename = "M")]
    pub m: f64,
    pub a: f64,
    pub r: u32,
    pub epsilon: f64,
}

impl ContourParams {
    pub fn new(m: f64, a: f64, r: u32, epsilon: f64) -> ContourParams {
        ContourParams { m, a, r, epsilon }
    }

    /// Parameters derived from the model with the default threshold `M`.
    pub fn derived(p: &ModelParams, epsilon: f64) -> ContourParams {
        let a = constants::separation_exponent(p.alpha, p.d, epsilon);
        let r = constants::scale_stride(a, p.d);
        let c_alpha = lattice_sum_radial(p).value;
        let m = constants::m_threshold(p.j, p.alpha, p.d, a, r, c_alpha);
        ContourParams { m, a, r, epsilon }
    }

    pub fn with_m(mut self, m: f64) -> ContourParams {
        self.m = m;
        self
    }

    /// Maximum number of witness pieces per part.
    pub fn max_pieces(&self) -> u64 {
        (1u64 << self.r) - 1
    }

    /// Proximity threshold at cube scale `n`: `M d^a 2^(an)`.
    pub fn link_distance(&self, d: u32, scale: u32) -> f64 {
        self.m * (d as f64).powf(self.a) * 2f64.powf(self.a * scale as f64)
    }
}

/// `Theta_x`: +1 if every spin on `B_1(x)` is +1, -1 if every spin is -1,
/// 0 otherwise. Points outside the window use the boundary value.
pub fn theta(sigma: &SpinConfiguration, x: &Point) -> i8 {
    let mut all_plus = sigma.spin(x) == 1;
    let mut all_minus = sigma.spin(x) == -1;
    for y in x.unit_neighbors() {
        match sigma.spin(&y) {
            1 => all_minus = false,
            _ => all_plus = false,
        }
        if !all_plus && !all_minus {
            return 0;
        }
    }
    if all_plus {
        1
    } else {
        -1
    }
}

/// The boundary `{x : Theta_x = 0}`. Only points within distance 1 of the
/// window can be incorrect under a constant exterior, so the scan covers the
/// window plus a halo of 1.
pub fn boundary(sigma: &SpinConfiguration) -> Region {
    let dim = sigma.window().dim();
    let mut out = Region::empty(dim);
    let mut candidates = Region::empty(dim);
    for p in sigma.window().iter() {
        candidates.insert(p.clone()).unwrap();
        for q in p.unit_neighbors() {
            candidates.insert(q).unwrap();
        }
    }
    for p in candidates.iter() {
        if theta(sigma, p) == 0 {
            out.insert(p.clone()).unwrap();
        }
    }
    out
}

/// One part of a boundary partition: its points, the per-cube witness family
/// from the construction, and the peel scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryPart {
    pub support: Region,
    pub witness: Vec<Region>,
    pub scale: u32,
}

impl BoundaryPart {
    /// Largest witness-piece diameter (0 for singleton pieces).
    pub fn max_witness_diameter(&self) -> u64 {
        self.witness
            .iter()
            .map(|w| crate::lattice::diameter(w).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

/// A partition of a configuration boundary into parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionOfBoundary {
    pub parts: Vec<BoundaryPart>,
}

impl PartitionOfBoundary {
    pub fn union(&self) -> Region {
        let mut out = Region::empty(self.parts.first().map(|p| p.support.dim()).unwrap_or(0));
        for part in &self.parts {
            out = out.union(&part.support);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Builds an `(M,a,r)`-partition of a finite boundary set by inductive
/// peeling through the integer cube scales.
pub fn build_partition(boundary: &Region, cp: &ContourParams) -> PartitionOfBoundary {
    build_partition_with(boundary, cp, &CoverConfig::default())
}

pub fn build_partition_with(
    boundary: &Region,
    cp: &ContourParams,
    cover_cfg: &CoverConfig,
) -> PartitionOfBoundary {
    let dim = boundary.dim() as u32;
    let mut remaining = boundary.clone();
    let mut parts: Vec<BoundaryPart> = Vec::new();
    let mut scale: u32 = 0;
    while !remaining.is_empty() {
        let cover = minimal_cover_with(&remaining, scale, cover_cfg)
            .expect("remaining boundary is nonempty");
        let cubes = cover.cubes;
        let link = cp.link_distance(dim, scale);
        // proximity graph on the cover
        let mut adj = vec![Vec::new(); cubes.len()];
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                if (cubes[i].l1_distance(&cubes[j]) as f64) <= link {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        let comps = graph_components(&adj);
        let mut peeled = Region::empty(boundary.dim());
        for comp in comps {
            if comp.len() as u64 > cp.max_pieces() {
                continue;
            }
            let comp_cubes: Vec<&Cube> = comp.iter().map(|&i| &cubes[i]).collect();
            let (support, witness) = split_by_cubes(&remaining, &comp_cubes);
            peeled = peeled.union(&support);
            parts.push(BoundaryPart {
                support,
                witness,
                scale,
            });
        }
        remaining = remaining.difference(&peeled);
        scale += 1;
    }
    parts.sort_by(|a, b| a.support.min_point().cmp(&b.support.min_point()));
    PartitionOfBoundary { parts }
}

/// Assigns each point of `remaining` covered by the component's cubes to the
/// first covering cube (cubes in center order), yielding a witness family
/// that partitions the part and keeps each piece inside one cube.
fn split_by_cubes(remaining: &Region, cubes: &[&Cube]) -> (Region, Vec<Region>) {
    let mut sorted: Vec<&Cube> = cubes.to_vec();
    sorted.sort();
    let mut pieces: Vec<Region> = vec![Region::empty(remaining.dim()); sorted.len()];
    let mut support = Region::empty(remaining.dim());
    for p in remaining.iter() {
        if let Some(k) = sorted.iter().position(|c| c.contains(p)) {
            pieces[k].insert(p.clone()).unwrap();
            support.insert(p.clone()).unwrap();
        }
    }
    let witness: Vec<Region> = pieces.into_iter().filter(|w| !w.is_empty()).collect();
    (support, witness)
}

fn graph_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// A single violation found by `verify_partition`.
#[derive(Clone, Debug, Serialize)]
pub enum Violation {
    /// Two parts intersect.
    Overlap { first: usize, second: usize },
    /// Union of parts differs from the expected boundary set.
    UnionMismatch,
    /// Part has no witness family or more than `2^r - 1` pieces.
    WitnessCount { part: usize, pieces: usize },
    /// Witness family does not partition its part.
    WitnessCover { part: usize },
    /// A part meets several connected components of another part's
    /// complement.
    SplitAcrossComplement { part: usize, other: usize },
    /// Distance condition (B2) fails for a pair of parts.
    TooClose {
        first: usize,
        second: usize,
        distance: u64,
        required: f64,
    },
}

/// Outcome of `verify_partition`: every condition of the partition
/// definition, checked against the stored witness families.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

pub fn verify_partition(
    partition: &PartitionOfBoundary,
    cp: &ContourParams,
    expected_boundary: Option<&Region>,
) -> VerifyReport {
    let mut violations = Vec::new();
    let parts = &partition.parts;

    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !parts[i].support.is_disjoint(&parts[j].support) {
                violations.push(Violation::Overlap { first: i, second: j });
            }
        }
    }
    if let Some(expected) = expected_boundary {
        let union = partition.union();
        let matches = union == *expected || (union.is_empty() && expected.is_empty());
        if !matches {
            violations.push(Violation::UnionMismatch);
        }
    }

    // (B1): witness family present, partitioning, and small enough
    for (i, part) in parts.iter().enumerate() {
        let pieces = part.witness.len();
        if pieces == 0 || pieces as u64 > cp.max_pieces() {
            violations.push(Violation::WitnessCount { part: i, pieces });
        }
        let mut union = Region::empty(part.support.dim());
        let mut disjoint = true;
        for w in &part.witness {
            disjoint &= union.is_disjoint(w);
            union = union.union(w);
        }
        if union != part.support || !disjoint {
            violations.push(Violation::WitnessCover { part: i });
        }
    }

    // (A) second clause: each part inside one complement component of every
    // other part; (B2): pairwise distances
    for i in 0..parts.len() {
        let (volume_i, interior_i) = volume_and_interior(&parts[i].support);
        let interior_comps = connected_components(&interior_i);
        for j in 0..parts.len() {
            if i == j {
                continue;
            }
            if !single_complement_component(&parts[j].support, &volume_i, &interior_comps) {
                violations.push(Violation::SplitAcrossComplement { part: j, other: i });
            }
        }
        for j in i + 1..parts.len() {
            if parts[i].support.is_empty() || parts[j].support.is_empty() {
                continue;
            }
            let distance = parts[i].support.l1_distance(&parts[j].support).unwrap();
            let min_diam = parts[i]
                .max_witness_diameter()
                .min(parts[j].max_witness_diameter());
            let required = cp.m * (min_diam as f64).powf(cp.a);
            if (distance as f64) <= required {
                violations.push(Violation::TooClose {
                    first: i,
                    second: j,
                    distance,
                    required,
                });
            }
        }
    }

    VerifyReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// True when `other` lies entirely in one connected component of the
/// complement of the part whose volume/interior components are given:
/// either fully inside a single interior component or fully outside the
/// volume.
fn single_complement_component(
    other: &Region,
    volume: &Region,
    interior_comps: &[Region],
) -> bool {
    let outside = other.difference(volume);
    if outside.len() == other.len() {
        return true;
    }
    if !outside.is_empty() {
        return false;
    }
    interior_comps.iter().any(|comp| other.is_subset(comp))
}

/// Common refinement: nonempty pairwise intersections with witness pieces
/// inherited from the second partition, as in the finest-partition argument.
pub fn intersect_partitions(
    p: &PartitionOfBoundary,
    q: &PartitionOfBoundary,
    _cp: &ContourParams,
) -> Result<PartitionOfBoundary> {
    if p.union() != q.union() {
        return Err(CtkError::BoundaryMismatch);
    }
    let mut parts = Vec::new();
    for part_p in &p.parts {
        for part_q in &q.parts {
            let support = part_p.support.intersection(&part_q.support);
            if support.is_empty() {
                continue;
            }
            let witness: Vec<Region> = part_q
                .witness
                .iter()
                .map(|w| w.intersection(&support))
                .filter(|w| !w.is_empty())
                .collect();
            parts.push(BoundaryPart {
                support,
                witness,
                scale: part_p.scale.min(part_q.scale),
            });
        }
    }
    parts.sort_by(|a, b| a.support.min_point().cmp(&b.support.min_point()));
    Ok(PartitionOfBoundary { parts })
}

/// True when every part of `fine` is contained in some part of `coarse`.
pub fn is_finer(fine: &PartitionOfBoundary, coarse: &PartitionOfBoundary) -> bool {
    fine.parts.iter().all(|fp| {
        coarse
            .parts
            .iter()
            .any(|cp| fp.support.is_subset(&cp.support))
    })
}

/// A contour: a partition part with labels, interiors, and the spins its
/// configuration carried on the support (used by compatibility
/// reconstruction).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Contour {
    pub support: Region,
    #[serde(rename = "witness_family")]
    pub witness: Vec<Region>,
    pub label_exterior: i8,
    /// Connected components of the interior with their labels.
    pub interior_labels: Vec<(Region, i8)>,
    #[serde(rename = "I_plus")]
    pub i_plus: Region,
    #[serde(rename = "I_minus")]
    pub i_minus: Region,
    /// Original spin values on the support, when built from a configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_spins: Option<BTreeMap<Point, i8>>,
}

impl Contour {
    pub fn size(&self) -> usize {
        self.support.len()
    }

    /// `I(gamma) = I_+ union I_-`.
    pub fn interior(&self) -> Region {
        self.i_plus.union(&self.i_minus)
    }

    /// `V(gamma) = sp(gamma) union I(gamma)`.
    pub fn volume(&self) -> Region {
        self.support.union(&self.interior())
    }
}

/// Labels every part of a valid partition of `boundary(sigma)` and builds the
/// contours. Fails if the configuration is not constant on a labeling set,
/// which indicates the partition was not a valid one for this configuration.
pub fn label_and_build_contours(
    sigma: &SpinConfiguration,
    partition: &PartitionOfBoundary,
) -> Result<Vec<Contour>> {
    let mut out = Vec::new();
    for part in &partition.parts {
        let (volume, interior) = volume_and_interior(&part.support);
        let label_exterior = constant_sign_on(sigma, &inner_boundary(&volume), "inner boundary of V(sp)")?;
        let mut interior_labels = Vec::new();
        let mut i_plus = Region::empty(part.support.dim());
        let mut i_minus = Region::empty(part.support.dim());
        for comp in connected_components(&interior) {
            let (comp_volume, _) = volume_and_interior(&comp);
            let label = constant_sign_on(
                sigma,
                &inner_boundary(&comp_volume),
                "inner boundary of V(interior component)",
            )?;
            if label == 1 {
                i_plus = i_plus.union(&comp);
            } else {
                i_minus = i_minus.union(&comp);
            }
            interior_labels.push((comp, label));
        }
        let support_spins: BTreeMap<Point, i8> = part
            .support
            .iter()
            .map(|p| (p.clone(), sigma.spin(p)))
            .collect();
        out.push(Contour {
            support: part.support.clone(),
            witness: part.witness.clone(),
            label_exterior,
            interior_labels,
            i_plus,
            i_minus,
            support_spins: Some(support_spins),
        });
    }
    Ok(out)
}

fn constant_sign_on(sigma: &SpinConfiguration, set: &Region, what: &str) -> Result<i8> {
    let mut sign: Option<i8> = None;
    for p in set.iter() {
        let s = sigma.spin(p);
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => {
                return Err(CtkError::LabelInconsistent(what.to_string()));
            }
            _ => {}
        }
    }
    sign.ok_or_else(|| CtkError::LabelInconsistent(format!("{} is empty", what)))
}

/// Convenience: boundary, partition and contours of a configuration.
pub fn contours_of(
    sigma: &SpinConfiguration,
    cp: &ContourParams,
    cover_cfg: &CoverConfig,
) -> Result<Vec<Contour>> {
    let bd = boundary(sigma);
    let partition = build_partition_with(&bd, cp, cover_cfg);
    label_and_build_contours(sigma, &partition)
}

/// The external sublist: contours none of whose external support components
/// lie inside another contour's volume.
pub fn external_contours(contours: &[Contour]) -> Vec<Contour> {
    let volumes: Vec<Region> = contours.iter().map(|c| c.volume()).collect();
    let mut out = Vec::new();
    for (i, c) in contours.iter().enumerate() {
        let comps = connected_components(&c.support);
        let comp_volumes: Vec<Region> =
            comps.iter().map(|s| volume_and_interior(s).0).collect();
        let mut external_comps: Vec<&Region> = Vec::new();
        for (k, comp) in comps.iter().enumerate() {
            let is_external = comps.iter().enumerate().all(|(k2, _)| {
                if k2 == k {
                    return true;
                }
                let vk = &comp_volumes[k];
                let vk2 = &comp_volumes[k2];
                vk.is_disjoint(vk2) || vk2.is_subset(vk)
            });
            if is_external {
                external_comps.push(comp);
            }
        }
        let contained = external_comps.iter().any(|comp| {
            volumes
                .iter()
                .enumerate()
                .any(|(j, v)| j != i && comp.is_subset(v))
        });
        if !contained {
            out.push(c.clone());
        }
    }
    out
}

/// The erase map: keeps spins on `I_-` and outside `V`, flips `I_+`, sets the
/// supports to -1. Requires a minus boundary condition, contours of `sigma`
/// with pairwise disjoint volumes (external-style families), and checks the
/// postcondition that no erased support point stays incorrect.
pub fn erase(
    sigma: &SpinConfiguration,
    contours: &[Contour],
    cp: &ContourParams,
) -> Result<SpinConfiguration> {
    if sigma.boundary() != -1 {
        return Err(CtkError::InvalidParams(
            "erase requires a minus boundary condition".into(),
        ));
    }
    let dim = sigma.window().dim();
    for (i, c) in contours.iter().enumerate() {
        for p in c.support.iter() {
            if theta(sigma, p) != 0 {
                return Err(CtkError::NotAContour(format!(
                    "support point {:?} is not incorrect",
                    p
                )));
            }
        }
        if let Some(spins) = &c.support_spins {
            for (p, s) in spins {
                if sigma.spin(p) != *s {
                    return Err(CtkError::NotAContour(format!(
                        "stored spin at {:?} differs from the configuration",
                        p
                    )));
                }
            }
        }
        for (j, other) in contours.iter().enumerate().skip(i + 1) {
            if !c.volume().is_disjoint(&other.volume()) {
                return Err(CtkError::NotAContour(format!(
                    "volumes of contours {} and {} overlap; erase takes external families",
                    i, j
                )));
            }
        }
    }

    let mut out = sigma.clone();
    let mut support_union = Region::empty(dim);
    for c in contours {
        for p in c.i_plus.iter() {
            if sigma.window().contains(p) {
                out.set_spin(p, -sigma.spin(p))?;
            }
        }
        for p in c.support.iter() {
            if sigma.window().contains(p) {
                out.set_spin(p, -1)?;
            }
        }
        support_union = support_union.union(&c.support);
    }

    // postcondition: erased supports are correct now, and the remaining
    // external contours stay clear of them
    let new_boundary = boundary(&out);
    if !new_boundary.is_disjoint(&support_union) {
        return Err(CtkError::ErasePostcondition(
            "erased support still meets the boundary".into(),
        ));
    }
    let remaining = contours_of(&out, cp, &CoverConfig::default())?;
    for c in external_contours(&remaining) {
        if !c.volume().is_disjoint(&support_union) {
            return Err(CtkError::ErasePostcondition(
                "a remaining external contour meets an erased support".into(),
            ));
        }
    }
    Ok(out)
}

/// Iterated erase of external contour families until the boundary is empty;
/// under a minus boundary condition this lands on the all-minus
/// configuration.
pub fn erase_all(
    sigma: &SpinConfiguration,
    cp: &ContourParams,
    cover_cfg: &CoverConfig,
) -> Result<SpinConfiguration> {
    let mut current = sigma.clone();
    loop {
        let contours = contours_of(&current, cp, cover_cfg)?;
        if contours.is_empty() {
            return Ok(current);
        }
        let external = external_contours(&contours);
        current = erase(&current, &external, cp)?;
    }
}

/// Canonical reconstruction of a contour family: minus outside the volumes,
/// interiors painted by label (outer contours first), supports painted from
/// their stored spins.
pub fn reconstruct(
    contours: &[Contour],
    window: &Region,
) -> Result<SpinConfiguration> {
    let mut sigma = SpinConfiguration::constant(window.clone(), -1, -1)?;
    let mut order: Vec<usize> = (0..contours.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(contours[i].volume().len()));
    for &i in &order {
        let c = &contours[i];
        if !c.volume().is_subset(window) {
            return Err(CtkError::InvalidParams(
                "contour volume leaves the window".into(),
            ));
        }
        for (comp, label) in &c.interior_labels {
            for p in comp.iter() {
                sigma.set_spin(p, *label)?;
            }
        }
        let spins = c.support_spins.as_ref().ok_or_else(|| {
            CtkError::InvalidParams(
                "contour carries no stored support spins; cannot reconstruct".into(),
            )
        })?;
        for (p, s) in spins {
            sigma.set_spin(p, *s)?;
        }
    }
    Ok(sigma)
}

/// Semi-decision of compatibility: rebuild the canonical configuration and
/// require every given contour to reappear (same support and labels) among
/// the contours of the reconstruction. Sound for families stored from real
/// configurations; for hand-built families a `false` may be conservative.
pub fn is_compatible(
    contours: &[Contour],
    window: &Region,
    cp: &ContourParams,
) -> bool {
    for (i, c) in contours.iter().enumerate() {
        for other in contours.iter().skip(i + 1) {
            if !c.support.is_disjoint(&other.support) {
                return false;
            }
        }
        if !c.volume().is_subset(window) {
            return false;
        }
    }
    let sigma = match reconstruct(contours, window) {
        Ok(s) => s,
        Err(_) => return false,
    };
    let rebuilt = match contours_of(&sigma, cp, &CoverConfig::default()) {
        Ok(r) => r,
        Err(_) => return false,
    };
    contours.iter().all(|c| {
        rebuilt.iter().any(|r| {
            r.support == c.support
                && r.label_exterior == c.label_exterior
                && r.interior_labels == c.interior_labels
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{l1_ball, point};

    fn small_cp() -> ContourParams {
        // a, r from (alpha=3, d=2, eps=0.5); M=1 keeps geometry testable
        ContourParams::new(1.0, 3.5, 6, 0.5)
    }

    fn window() -> Region {
        Region::from_box(&[-6, -6], &[6, 6]).unwrap()
    }

    fn single_flip(at: &[i64]) -> SpinConfiguration {
        let mut sigma = SpinConfiguration::constant(window(), -1, -1).unwrap();
        sigma.set_spin(&point(at), 1).unwrap();
        sigma
    }

    #[test]
    fn theta_examples() {
        let all_plus = SpinConfiguration::constant(window(), 1, 1).unwrap();
        assert_eq!(theta(&all_plus, &point(&[0, 0])), 1);

        let sigma = single_flip(&[0, 0]);
        assert_eq!(theta(&sigma, &point(&[0, 0])), 0);
        assert_eq!(theta(&sigma, &point(&[2, 0])), -1);
        // outside the window everything is boundary-correct
        assert_eq!(theta(&sigma, &point(&[20, 20])), -1);
    }

    #[test]
    fn boundary_examples() {
        let all_minus = SpinConfiguration::constant(window(), -1, -1).unwrap();
        assert!(boundary(&all_minus).is_empty());

        let sigma = single_flip(&[0, 0]);
        assert_eq!(boundary(&sigma), l1_ball(&point(&[0, 0]), 1));

        // 2x2 plus block: all points within distance 1 of the block
        let block = Region::from_box(&[0, 0], &[1, 1]).unwrap();
        let sigma = SpinConfiguration::from_plus_set(window(), &block, -1).unwrap();
        let bd = boundary(&sigma);
        assert_eq!(bd.len(), 12);
        for p in bd.iter() {
            assert!(block.iter().any(|b| b.l1_distance(p) <= 1));
        }
    }

    #[test]
    fn theta_boundary_consistency() {
        let sigma = single_flip(&[1, -2]);
        let bd = boundary(&sigma);
        for p in window().iter() {
            assert_eq!(bd.contains(p), theta(&sigma, p) == 0);
        }
    }

    #[test]
    fn partition_of_single_flip_is_one_part() {
        let sigma = single_flip(&[0, 0]);
        let bd = boundary(&sigma);
        let partition = build_partition(&bd, &small_cp());
        assert_eq!(partition.len(), 1);
        assert_eq!(partition.parts[0].support, bd);
        let report = verify_partition(&partition, &small_cp(), Some(&bd));
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn empty_boundary_gives_empty_partition() {
        let bd = Region::empty(2);
        let partition = build_partition(&bd, &small_cp());
        assert!(partition.is_empty());
        assert!(verify_partition(&partition, &small_cp(), Some(&bd)).ok);
    }

    #[test]
    fn far_flips_split_into_two_parts() {
        // distance 40 exceeds the scale-0 link M d^a = 2^3.5 ~ 11.3 and each
        // 5-point piece is peeled before the scales where links reach
        let win = Region::from_box(&[-4, -4], &[44, 4]).unwrap();
        let mut sigma = SpinConfiguration::constant(win, -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        sigma.set_spin(&point(&[40, 0]), 1).unwrap();
        let bd = boundary(&sigma);
        let partition = build_partition(&bd, &small_cp());
        assert_eq!(partition.len(), 2);
        let report = verify_partition(&partition, &small_cp(), Some(&bd));
        assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn close_flips_merge() {
        let mut sigma = SpinConfiguration::constant(window(), -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        sigma.set_spin(&point(&[3, 0]), 1).unwrap();
        let bd = boundary(&sigma);
        let partition = build_partition(&bd, &small_cp());
        assert_eq!(partition.len(), 1);
    }

    #[test]
    fn artificially_split_part_fails_b2() {
        let sigma = single_flip(&[0, 0]);
        let bd = boundary(&sigma);
        let valid = build_partition(&bd, &small_cp());
        let part = &valid.parts[0];
        // split the 5-point ball into two nearby halves, each presented as a
        // single witness piece (nonzero diameter makes (B2) binding)
        let pts: Vec<Point> = part.support.iter().cloned().collect();
        let left = Region::from_points(2, pts[..2].iter().cloned()).unwrap();
        let right = Region::from_points(2, pts[2..].iter().cloned()).unwrap();
        let split = PartitionOfBoundary {
            parts: vec![
                BoundaryPart {
                    support: left.clone(),
                    witness: vec![left.clone()],
                    scale: 1,
                },
                BoundaryPart {
                    support: right.clone(),
                    witness: vec![right.clone()],
                    scale: 1,
                },
            ],
        };
        let report = verify_partition(&split, &small_cp(), Some(&bd));
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TooClose { .. })));
    }

    #[test]
    fn intersect_is_idempotent_and_finer() {
        let mut sigma = SpinConfiguration::constant(window(), -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        sigma.set_spin(&point(&[4, 4]), 1).unwrap();
        let bd = boundary(&sigma);
        let p = build_partition(&bd, &small_cp());
        let self_meet = intersect_partitions(&p, &p, &small_cp()).unwrap();
        assert_eq!(self_meet.len(), p.len());
        assert!(is_finer(&self_meet, &p));
        assert!(verify_partition(&self_meet, &small_cp(), Some(&bd)).ok);

        // mismatched boundaries rejected
        let other = build_partition(&l1_ball(&point(&[0, 0]), 1), &small_cp());
        assert!(intersect_partitions(&p, &other, &small_cp()).is_err());
    }

    #[test]
    fn single_flip_contour_labels() {
        let sigma = single_flip(&[0, 0]);
        let contours = contours_of(&sigma, &small_cp(), &CoverConfig::default()).unwrap();
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        assert_eq!(c.label_exterior, -1);
        assert!(c.interior().is_empty());
        assert_eq!(c.volume(), c.support);
    }

    fn ring_configuration() -> (SpinConfiguration, Region, Region) {
        // +1 on the inner boundary ring of a 5x5 square, -1 hole at center
        let square = Region::from_box(&[-2, -2], &[2, 2]).unwrap();
        let ring = inner_boundary(&square);
        let sigma = SpinConfiguration::from_plus_set(window(), &ring, -1).unwrap();
        (sigma, ring, square)
    }

    #[test]
    fn ring_contour_has_minus_hole() {
        let (sigma, ring, _) = ring_configuration();
        let contours = contours_of(&sigma, &small_cp(), &CoverConfig::default()).unwrap();
        assert_eq!(contours.len(), 1);
        let c = &contours[0];
        assert_eq!(c.label_exterior, -1);
        // support is the 1-thickened ring; the hole center is I_minus
        assert!(ring.is_subset(&c.support));
        assert!(c.i_plus.is_empty());
        assert!(!c.i_minus.is_empty());
        assert!(c.i_minus.contains(&point(&[0, 0])));
    }

    #[test]
    fn erase_single_flip_returns_all_minus() {
        let sigma = single_flip(&[0, 0]);
        let cp = small_cp();
        let contours = contours_of(&sigma, &cp, &CoverConfig::default()).unwrap();
        let erased = erase(&sigma, &contours, &cp).unwrap();
        let all_minus = SpinConfiguration::constant(window(), -1, -1).unwrap();
        assert_eq!(erased, all_minus);
    }

    #[test]
    fn erase_empty_family_is_identity() {
        let sigma = single_flip(&[2, 2]);
        let erased = erase(&sigma, &[], &small_cp()).unwrap();
        assert_eq!(erased, sigma);
    }

    #[test]
    fn erase_all_lands_on_all_minus() {
        let (sigma, _, _) = ring_configuration();
        let erased = erase_all(&sigma, &small_cp(), &CoverConfig::default()).unwrap();
        assert_eq!(
            erased,
            SpinConfiguration::constant(window(), -1, -1).unwrap()
        );
    }

    #[test]
    fn external_filter_drops_nested_ring() {
        // big ring with a far-inside single flip: the flip's contour is
        // enclosed by the big ring's volume
        let square = Region::from_box(&[-5, -5], &[5, 5]).unwrap();
        let ring = inner_boundary(&square);
        let mut sigma = SpinConfiguration::from_plus_set(window(), &ring, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        let contours = contours_of(&sigma, &small_cp(), &CoverConfig::default()).unwrap();
        if contours.len() == 2 {
            let external = external_contours(&contours);
            assert_eq!(external.len(), 1);
            assert!(external[0].support.len() > 10);
        } else {
            // merged into one contour at these parameters; still external
            assert_eq!(external_contours(&contours).len(), 1);
        }
    }

    #[test]
    fn compatibility_of_real_contours() {
        let sigma = single_flip(&[1, 1]);
        let cp = small_cp();
        let contours = contours_of(&sigma, &cp, &CoverConfig::default()).unwrap();
        assert!(is_compatible(&contours, &window(), &cp));
    }

    #[test]
    fn close_pair_presented_as_two_contours_is_incompatible() {
        // two single flips at distance 2 built in separate windows, presented
        // as a two-contour family: the rebuild merges them
        let cp = small_cp();
        let s1 = single_flip(&[0, 0]);
        let c1 = contours_of(&s1, &cp, &CoverConfig::default()).unwrap();
        let s2 = single_flip(&[2, 0]);
        let c2 = contours_of(&s2, &cp, &CoverConfig::default()).unwrap();
        let family = vec![c1[0].clone(), c2[0].clone()];
        assert!(!is_compatible(&family, &window(), &cp));
    }

    #[test]
    fn translation_covariance_on_dyadic_shifts() {
        let mut sigma = SpinConfiguration::constant(window(), -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        sigma.set_spin(&point(&[1, 1]), 1).unwrap();
        let bd = boundary(&sigma);
        let cp = small_cp();
        let base = build_partition(&bd, &cp);
        // the construction peels this boundary at scales <= 1; shifts by a
        // multiple of 2^1 preserve every cube grid used
        let shift = point(&[4, -4]);
        let shifted = build_partition(&bd.translated(&shift), &cp);
        assert_eq!(base.len(), shifted.len());
        for (a, b) in base.parts.iter().zip(&shifted.parts) {
            assert_eq!(a.support.translated(&shift), b.support);
        }
    }
}

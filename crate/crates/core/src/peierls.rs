//! The quantitative side of the contour argument: the explicit constant
//! chain for the erase-cost bound, the field-truncation radius per parameter
//! regime, the geometric contour sum with its `beta_c` certificate, the
//! droplet upper bound, and exact conditioned probabilities on tiny volumes.

use serde::Serialize;

use crate::constants;
use crate::contour::{contours_of, erase, external_contours, theta, Contour, ContourParams};
use crate::error::{CtkError, Result};
use crate::lattice::{inner_boundary, l1_ball, Point, Region};
use crate::model::{
    enumerate_gray, field_sum, hamiltonian, lattice_sum_radial, surface_energy, FieldMode,
    ModelParams, SpinConfiguration,
};
use crate::multiscale::entropy_constants;

/// The full constant chain of the erase-cost bound
/// `H(sigma) - H(tau(sigma)) >= c2|gamma| + c3 F_I+ + c4 F_sp`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeierlsConstants {
    pub c_alpha: f64,
    pub k_alpha_1: f64,
    pub m1: f64,
    pub m2: f64,
    /// `max{(2^r-1)^(d+1)/k_d^d, M1, M2}`.
    pub m_threshold: f64,
    /// The separation amplitude these constants were evaluated at.
    pub m: f64,
    /// Strictly above the threshold; implies `c2, c3, c4 > 0`.
    pub above_threshold: bool,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Surface-energy lower-bound constant `K_alpha`.
    pub k_alpha_cap: f64,
    /// Field-sum constant `c5` (requires `delta < d`).
    pub c5: Option<f64>,
}

/// Evaluates the constant chain at separation amplitude `m`.
pub fn peierls_constants(p: &ModelParams, cp: &ContourParams, m: f64) -> PeierlsConstants {
    let c_alpha = lattice_sum_radial(p).value;
    let k1 = constants::k_alpha_1(p.j, p.alpha, p.d, cp.a, cp.r);
    let m1 = constants::m1(p.j, p.alpha, p.d, k1, c_alpha);
    let m2 = constants::m2(p.alpha, p.d, k1);
    let m_threshold = constants::m_threshold(p.j, p.alpha, p.d, cp.a, cp.r, c_alpha);
    let c5 = if p.delta < p.d as f64 {
        Some(p.h_star * constants::c5_coeff(p.delta, p.d))
    } else {
        None
    };
    PeierlsConstants {
        c_alpha,
        k_alpha_1: k1,
        m1,
        m2,
        m_threshold,
        m,
        above_threshold: m > m_threshold,
        c2: constants::c2(p.j, p.alpha, p.d, k1, c_alpha, m),
        c3: constants::c3(p.alpha, p.d, k1, m),
        c4: constants::c4(p.alpha, p.d, k1, m),
        k_alpha_cap: constants::k_alpha_cap(p.j, p.alpha, p.d),
        c5,
    }
}

/// Exact zero-field energy cost of erasing one contour:
/// `H^-(sigma) - H^-(tau_gamma(sigma))`.
///
/// Validates that the contour is consistent with the configuration (its
/// support is incorrect and carries the stored spins) before erasing.
pub fn energy_cost(
    sigma: &SpinConfiguration,
    gamma: &Contour,
    p: &ModelParams,
    cp: &ContourParams,
) -> Result<f64> {
    if sigma.boundary() != -1 {
        return Err(CtkError::InvalidParams(
            "energy cost is defined under the minus boundary condition".into(),
        ));
    }
    for pt in gamma.support.iter() {
        if theta(sigma, pt) != 0 {
            return Err(CtkError::NotAContour(format!(
                "support point {:?} is not incorrect in the configuration",
                pt
            )));
        }
    }
    let erased = erase(sigma, std::slice::from_ref(gamma), cp)?;
    Ok(hamiltonian(sigma, p, FieldMode::Zero) - hamiltonian(&erased, p, FieldMode::Zero))
}

/// Right-hand side of the erase-cost bound for one contour.
pub fn energy_cost_lower_bound(
    gamma: &Contour,
    p: &ModelParams,
    pc: &PeierlsConstants,
) -> Result<f64> {
    let f_sp = surface_energy(&gamma.support, p)?;
    let f_iplus = if gamma.i_plus.is_empty() {
        0.0
    } else {
        surface_energy(&gamma.i_plus, p)?
    };
    Ok(pc.c2 * gamma.size() as f64 + pc.c3 * f_iplus + pc.c4 * f_sp)
}

/// Which branch of the phase-transition region the parameters fall in.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub enum TruncationRadius {
    /// `h* = 0`: no field, no truncation.
    Zero,
    /// Strictly inside a regime: truncate at `radius`.
    Finite { radius: f64, branch: &'static str },
    /// On a critical line (`delta = alpha - d` or `delta = 1`): a smallness
    /// condition on `h*` replaces the radius. `h_star_max` is the largest
    /// amplitude for which the surface term still dominates (sufficient, not
    /// sharp).
    SmallField {
        line: &'static str,
        h_star_max: f64,
    },
    /// `delta >= d`: the field is summable (or log-bounded), handled without
    /// truncation.
    SummableField,
}

/// Truncation radius of the field per the parameter regime. Errors outside
/// the four phase-transition regimes (`delta < min{alpha-d, 1}` is the
/// conjectured-uniqueness corner).
pub fn truncation_radius(p: &ModelParams, pc: &PeierlsConstants) -> Result<TruncationRadius> {
    let d = p.d as f64;
    if p.h_star == 0.0 {
        return Ok(TruncationRadius::Zero);
    }
    if pc.c2 <= 0.0 || pc.c3 <= 0.0 {
        return Err(CtkError::InvalidParams(
            "truncation radius needs positive c2, c3 (raise M above the threshold)".into(),
        ));
    }
    if p.delta >= d {
        return Ok(TruncationRadius::SummableField);
    }
    let c5 = pc.c5.expect("delta < d checked");
    let c5_unit = c5 / p.h_star; // c5 with h* = 1, for the critical lines
    let ka = pc.k_alpha_cap;
    let base = (4.0 * p.h_star / pc.c2).powf(1.0 / p.delta);

    if p.alpha < d + 1.0 {
        // surface energy grows like |Lambda|^(2-alpha/d)
        if p.delta > p.alpha - d {
            let c_alpha_prime =
                (2.0 * c5 / (pc.c3 * ka)).powf(d / (p.delta - (p.alpha - d)));
            let r1 = (c_alpha_prime / (pc.c3 * ka)).powf(1.0 / p.delta);
            Ok(TruncationRadius::Finite {
                radius: base.max(r1),
                branch: "d < alpha < d+1, delta > alpha-d",
            })
        } else if p.delta == p.alpha - d {
            Ok(TruncationRadius::SmallField {
                line: "delta = alpha - d",
                h_star_max: pc.c3 * ka / (2.0 * c5_unit),
            })
        } else {
            Err(CtkError::OutsideRegimes(format!(
                "delta = {} below alpha - d = {}: conjectured uniqueness region",
                p.delta,
                p.alpha - d
            )))
        }
    } else {
        // alpha >= d+1: surface energy grows like the edge boundary
        if p.delta > 1.0 {
            let b_alpha = (c5 / (d * pc.c3 * ka)).powf(d / (p.delta - 1.0));
            let r2 = (p.h_star * b_alpha / (d * pc.c3 * ka)).powf(1.0 / p.delta);
            Ok(TruncationRadius::Finite {
                radius: base.max(r2),
                branch: "alpha >= d+1, delta > 1",
            })
        } else if p.delta == 1.0 {
            // isoperimetric form: c3 K 2d |I|^(1-1/d) >= 2 c5 |I|^(1-1/d)
            Ok(TruncationRadius::SmallField {
                line: "delta = 1",
                h_star_max: d * pc.c3 * ka / c5_unit,
            })
        } else {
            Err(CtkError::OutsideRegimes(format!(
                "delta = {} below 1 with alpha >= d+1: conjectured uniqueness region",
                p.delta
            )))
        }
    }
}

/// The geometric contour sum and its closing inverse temperature.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeierlsSum {
    /// Per-size exponent `c1 + log 2 - beta c2 / 2`.
    pub exponent: f64,
    /// `sum_{m>=1} e^(exponent * m)`; `None` when divergent.
    pub sum: Option<f64>,
    /// Smallest `beta` making the sum provably < 1/2.
    pub beta_c: f64,
}

/// `sum_m e^((c1 + log 2 - beta c2/2) m)` in closed form, and
/// `beta_c = (2/c2)(c1 + log 2 + log 3)` (term ratio below 1/3 puts the
/// geometric sum below 1/2).
pub fn peierls_sum(beta: f64, pc: &PeierlsConstants, c1: f64) -> Result<PeierlsSum> {
    if pc.c2 <= 0.0 {
        return Err(CtkError::InvalidParams(
            "peierls sum needs c2 > 0 (raise M above the threshold)".into(),
        ));
    }
    let exponent = c1 + std::f64::consts::LN_2 - beta * pc.c2 / 2.0;
    let x = exponent.exp();
    let sum = if x < 1.0 { Some(x / (1.0 - x)) } else { None };
    Ok(PeierlsSum {
        exponent,
        sum,
        beta_c: constants::beta_c_bound(c1, pc.c2),
    })
}

/// Summary of the droplet upper bound
/// `sum_R R^d exp(-beta (c R^(d-1) + F_{B_R} - sum_{B_R} h))` with `c = 2dJ`.
/// Diagnostic only.
#[derive(Clone, Debug, Serialize)]
pub struct DropletBound {
    pub total: f64,
    /// Last term / previous term ratio exceeded 1 somewhere (field wins).
    pub increasing_tail: bool,
    pub terms: Vec<f64>,
}

pub fn droplet_heuristic(p: &ModelParams, beta: f64, r_max: u64) -> Result<DropletBound> {
    if r_max < 1 {
        return Err(CtkError::InvalidParams("r_max >= 1".into()));
    }
    let d = p.d;
    let c = 2.0 * d as f64 * p.j;
    let origin = Point::origin(d as usize);
    let mut terms = Vec::with_capacity(r_max as usize);
    let mut total = 0.0;
    let mut increasing_tail = false;
    let mut prev = f64::INFINITY;
    for radius in 1..=r_max {
        let ball = l1_ball(&origin, radius);
        let f = surface_energy(&ball, p)?;
        let h = field_sum(&ball, p);
        let rf = radius as f64;
        let term = rf.powi(d as i32) * (-beta * (c * rf.powi(d as i32 - 1) + f - h)).exp();
        if term > prev {
            increasing_tail = true;
        }
        prev = term;
        total += term;
        terms.push(term);
    }
    Ok(DropletBound {
        total,
        increasing_tail,
        terms,
    })
}

/// Exact conditioned probability on a tiny window.
#[derive(Clone, Debug, Serialize)]
pub struct NuExact {
    pub probability: f64,
    /// Sites pinned to -1 by the conditioning collar.
    pub forced: Region,
    /// Sites the enumeration runs over.
    pub free: Region,
    pub log_z_conditioned: f64,
}

/// Default cap on the number of free (unforced) spins in the `nu` and
/// restricted-partition enumerations.
pub const DEFAULT_FREE_SPIN_CAP: u32 = 24;

/// `nu^-(sigma_0 = +1)`: the minus-boundary Gibbs probability conditioned on
/// `Theta_x = -1` for every `x` in the inner boundary of the window.
///
/// The conditioning pins the unit balls of the inner boundary to -1; the
/// enumeration is exact over the remaining free sites, whose count is capped
/// (the window itself may be larger).
pub fn nu_minus_exact(
    window: &Region,
    p: &ModelParams,
    mode: FieldMode,
    cap: u32,
) -> Result<NuExact> {
    if window.is_empty() {
        return Err(CtkError::EmptyRegion("nu_minus_exact"));
    }
    let dim = window.dim();
    let origin = Point::origin(dim);
    // conditioning: Theta_x = -1 on the inner collar pins B_1(x) to -1
    let mut forced = Region::empty(dim);
    for x in inner_boundary(window).iter() {
        for q in l1_ball(x, 1).iter() {
            if window.contains(q) {
                forced.insert(q.clone()).unwrap();
            }
        }
    }
    let free = window.difference(&forced);
    if free.len() as u32 > cap {
        return Err(CtkError::cap("nu free spins", free.len() as u64, cap as u64));
    }

    if forced.contains(&origin) || free.is_empty() {
        // sigma_0 is pinned to -1 (or nothing is free at all)
        let log_z = conditioned_log_z(window, &free, p, mode, None)?;
        return Ok(NuExact {
            probability: 0.0,
            forced,
            free,
            log_z_conditioned: log_z,
        });
    }
    let log_z_all = conditioned_log_z(window, &free, p, mode, None)?;
    let log_z_plus = conditioned_log_z(window, &free, p, mode, Some(&origin))?;
    Ok(NuExact {
        probability: (log_z_plus - log_z_all).exp(),
        forced,
        free,
        log_z_conditioned: log_z_all,
    })
}

/// `log` of the partition sum over configurations that are -1 outside `free`
/// (within the window), optionally restricted to `sigma_pin = +1`.
fn conditioned_log_z(
    window: &Region,
    free: &Region,
    p: &ModelParams,
    mode: FieldMode,
    pin_plus: Option<&Point>,
) -> Result<f64> {
    if free.is_empty() {
        let sigma = SpinConfiguration::constant(window.clone(), -1, -1)?;
        return Ok(-p.beta * hamiltonian(&sigma, p, mode));
    }
    // enumerate the free block with the forced collar folded into an
    // effective exterior: treat the free region as the enumeration window
    // inside a configuration whose remaining window points are -1.
    // Energies must still be computed on the full window; the forced part is
    // constant, so we enumerate free spins inside the full configuration.
    let mut sigma = SpinConfiguration::constant(window.clone(), -1, -1)?;
    let free_points: Vec<Point> = free.iter().cloned().collect();
    let pin_index = pin_plus.map(|pin| {
        free_points
            .iter()
            .position(|q| q == pin)
            .expect("pin must be free")
    });

    // Gray enumeration over the free sites only, with exact incremental
    // energies against the full window.
    let k = free_points.len();
    let c_alpha = lattice_sum_radial(p).value;
    let all_points = sigma.points().to_vec();
    let max_dist = crate::lattice::diameter(window)?;
    let tab = crate::model::coupling_table(p, max_dist);
    // couplings from each free site to every window site, and effective field
    let mut kernel = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                kernel[i * k + j] =
                    tab[free_points[i].l1_distance(&free_points[j]) as usize];
            }
        }
    }
    let mut eff = vec![0.0f64; k];
    for i in 0..k {
        let mut row_window = 0.0; // couplings to all window sites
        let mut row_fixed = 0.0; // couplings to the forced (always -1) part
        for q in &all_points {
            let dist = free_points[i].l1_distance(q);
            if dist == 0 {
                continue;
            }
            let w = tab[dist as usize];
            row_window += w;
            if !free.contains(q) {
                row_fixed += w;
            }
        }
        // exterior (boundary -1) plus forced collar (-1) act as one field
        let w_exterior = p.j * c_alpha - row_window;
        eff[i] = p.field_in_mode(&free_points[i], mode) - w_exterior - row_fixed;
    }

    let mut energy = hamiltonian(&sigma, p, mode);
    let mut spins = vec![-1i8; k];
    let mut lse = LogSumExp::default();
    let include = |spins: &[i8]| pin_index.map(|pi| spins[pi] == 1).unwrap_or(true);
    if include(&spins) {
        lse.push(-p.beta * energy);
    }
    for code in 1..(1u64 << k) {
        let flip = code.trailing_zeros() as usize;
        let s = spins[flip] as f64;
        let mut local = 0.0;
        for j in 0..k {
            local += kernel[flip * k + j] * spins[j] as f64;
        }
        energy += 2.0 * s * (eff[flip] + local);
        spins[flip] = -spins[flip];
        if include(&spins) {
            lse.push(-p.beta * energy);
        }
    }
    Ok(lse.value())
}

#[derive(Default)]
struct LogSumExp {
    max_arg: f64,
    scaled: f64,
    any: bool,
}

impl LogSumExp {
    fn push(&mut self, arg: f64) {
        if !self.any {
            self.max_arg = arg;
            self.scaled = 1.0;
            self.any = true;
        } else if arg > self.max_arg {
            self.scaled = self.scaled * (self.max_arg - arg).exp() + 1.0;
            self.max_arg = arg;
        } else {
            self.scaled += (arg - self.max_arg).exp();
        }
    }

    fn value(&self) -> f64 {
        if self.any {
            self.max_arg + self.scaled.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// `log` of the restricted partition sum over configurations whose external
/// contour volumes stay inside `inner`; exact by full enumeration of the
/// window (small windows only).
pub fn log_restricted_partition_function(
    window: &Region,
    inner: &Region,
    p: &ModelParams,
    cp: &ContourParams,
    mode: FieldMode,
    cap: u32,
) -> Result<f64> {
    if window.len() as u32 > cap {
        return Err(CtkError::cap(
            "restricted partition window",
            window.len() as u64,
            cap as u64,
        ));
    }
    let mut sigma = SpinConfiguration::constant(window.clone(), -1, -1)?;
    let mut lse = LogSumExp::default();
    let mut failure: Option<CtkError> = None;
    let cover = crate::lattice::CoverConfig::default();
    enumerate_gray(&mut sigma, p, mode, &mut |arg, cfg| {
        if failure.is_some() {
            return;
        }
        match contours_of(cfg, cp, &cover) {
            Ok(contours) => {
                let ext = external_contours(&contours);
                if ext.iter().all(|c| c.volume().is_subset(inner)) {
                    lse.push(arg);
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(lse.value()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::point;

    fn base_params() -> ModelParams {
        ModelParams::new(2, 3.0)
    }

    fn derived_cp(p: &ModelParams) -> ContourParams {
        ContourParams::derived(p, 0.5)
    }

    #[test]
    fn constants_limit_and_threshold() {
        let p = base_params();
        let cp = derived_cp(&p);
        // M -> infinity: c2 -> J c_alpha / ((2d+1) 2^alpha)
        let pc = peierls_constants(&p, &cp, 1e300);
        let limit = pc.c_alpha / (5.0 * 8.0);
        assert!((pc.c2 - limit).abs() < 1e-12);
        assert!(pc.above_threshold);

        // at the threshold exactly the strict flag is off
        let pc_at = peierls_constants(&p, &cp, pc.m_threshold);
        assert!(!pc_at.above_threshold);
        // just above, everything is positive
        let pc_above = peierls_constants(&p, &cp, pc.m_threshold * 1.01);
        assert!(pc_above.above_threshold);
        assert!(pc_above.c2 > 0.0 && pc_above.c3 > 0.0 && pc_above.c4 > 0.0);
    }

    #[test]
    fn single_flip_cost_is_twice_c_alpha() {
        let p = base_params();
        let cp = derived_cp(&p).with_m(1.0);
        let window = Region::from_box(&[-5, -5], &[5, 5]).unwrap();
        let mut sigma = SpinConfiguration::constant(window, -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        let contours = contours_of(&sigma, &cp, &Default::default()).unwrap();
        assert_eq!(contours.len(), 1);
        let cost = energy_cost(&sigma, &contours[0], &p, &cp).unwrap();
        assert!((cost - 2.0 * pcs(&p).c_alpha).abs() < 1e-8, "cost = {}", cost);
    }

    fn pcs(p: &ModelParams) -> PeierlsConstants {
        let cp = derived_cp(p);
        peierls_constants(p, &cp, cp.m)
    }

    #[test]
    fn erased_contour_costs_nothing() {
        let p = base_params();
        let cp = derived_cp(&p).with_m(1.0);
        let window = Region::from_box(&[-5, -5], &[5, 5]).unwrap();
        let mut sigma = SpinConfiguration::constant(window, -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        let contours = contours_of(&sigma, &cp, &Default::default()).unwrap();
        let erased = erase(&sigma, &contours, &cp).unwrap();
        // the erased configuration has no contours; asking for the cost of
        // the old contour is a contract violation
        assert!(energy_cost(&erased, &contours[0], &p, &cp).is_err());
    }

    #[test]
    fn cost_bound_holds_above_threshold_for_single_flip() {
        let p = base_params();
        let cp = derived_cp(&p);
        let pc = peierls_constants(&p, &cp, cp.m * 2.0);
        assert!(pc.above_threshold);
        let window = Region::from_box(&[-5, -5], &[5, 5]).unwrap();
        let mut sigma = SpinConfiguration::constant(window, -1, -1).unwrap();
        sigma.set_spin(&point(&[0, 0]), 1).unwrap();
        let cp_run = cp.clone().with_m(cp.m * 2.0);
        let contours = contours_of(&sigma, &cp_run, &Default::default()).unwrap();
        let cost = energy_cost(&sigma, &contours[0], &p, &cp_run).unwrap();
        let bound = energy_cost_lower_bound(&contours[0], &p, &pc).unwrap();
        assert!(cost >= bound, "cost {} < bound {}", cost, bound);
    }

    #[test]
    fn truncation_radius_regimes() {
        // h* = 0
        let p = ModelParams::new(2, 2.5);
        let cp = derived_cp(&p);
        let pc = peierls_constants(&p, &cp, pc_m(&p));
        assert_eq!(truncation_radius(&p, &pc).unwrap(), TruncationRadius::Zero);

        // d < alpha < d+1, delta > alpha - d: finite radius
        let p = ModelParams::new(2, 2.5).with_field(0.1, 1.0);
        let pc = peierls_constants(&p, &derived_cp(&p), pc_m(&p));
        match truncation_radius(&p, &pc).unwrap() {
            TruncationRadius::Finite { radius, .. } => assert!(radius.is_finite() && radius > 0.0),
            other => panic!("expected finite radius, got {:?}", other),
        }

        // critical line delta = alpha - d
        let p = ModelParams::new(2, 2.5).with_field(0.1, 0.5);
        let pc = peierls_constants(&p, &derived_cp(&p), pc_m(&p));
        match truncation_radius(&p, &pc).unwrap() {
            TruncationRadius::SmallField { h_star_max, .. } => assert!(h_star_max > 0.0),
            other => panic!("expected small-field condition, got {:?}", other),
        }

        // below both lines: refused
        let p = ModelParams::new(2, 2.5).with_field(0.1, 0.3);
        let pc = peierls_constants(&p, &derived_cp(&p), pc_m(&p));
        assert!(truncation_radius(&p, &pc).is_err());

        // alpha >= d+1, delta > 1: finite
        let p = ModelParams::new(2, 4.0).with_field(0.2, 1.5);
        let pc = peierls_constants(&p, &derived_cp(&p), pc_m(&p));
        assert!(matches!(
            truncation_radius(&p, &pc).unwrap(),
            TruncationRadius::Finite { .. }
        ));

        // delta >= d: summable field
        let p = ModelParams::new(2, 3.0).with_field(0.2, 2.5);
        let pc = peierls_constants(&p, &derived_cp(&p), pc_m(&p));
        assert_eq!(
            truncation_radius(&p, &pc).unwrap(),
            TruncationRadius::SummableField
        );
    }

    fn pc_m(p: &ModelParams) -> f64 {
        let cp = derived_cp(p);
        cp.m * 2.0
    }

    #[test]
    fn peierls_sum_behaviour() {
        let p = base_params();
        let cp = derived_cp(&p);
        let pc = peierls_constants(&p, &cp, cp.m * 2.0);
        let c1 = entropy_constants(p.d, &cp.clone().with_m(cp.m * 2.0)).c1;
        let out = peierls_sum(pc.beta_c_probe(c1), &pc, c1).unwrap();
        // just above beta_c the sum is below 1/2
        assert!(out.sum.unwrap() < 0.5);
        // beta -> infinity: sum -> 0
        let big = peierls_sum(out.beta_c * 100.0, &pc, c1).unwrap();
        assert!(big.sum.unwrap() < 1e-6);
        // exponent -log 3 sits exactly at the 1/2 boundary
        let x: f64 = (-(3f64.ln())).exp();
        assert!((x / (1.0 - x) - 0.5).abs() < 1e-12);
    }

    impl PeierlsConstants {
        fn beta_c_probe(&self, c1: f64) -> f64 {
            constants::beta_c_bound(c1, self.c2) * 1.0001
        }
    }

    #[test]
    fn droplet_bound_small_at_low_temperature() {
        let p = ModelParams::new(2, 2.5);
        let out = droplet_heuristic(&p, 5.0, 50).unwrap();
        assert!(out.total < 1e-3, "total = {}", out.total);
        assert!(!out.increasing_tail);
    }

    #[test]
    fn droplet_bound_flags_field_dominance() {
        // delta < alpha - d with a large field: terms eventually grow
        let p = ModelParams::new(2, 2.5).with_field(5.0, 0.2);
        let out = droplet_heuristic(&p, 1.0, 40).unwrap();
        assert!(out.increasing_tail);
    }

    #[test]
    fn nu_on_3x3_forces_everything() {
        let p = base_params().with_beta(1.0);
        let window = Region::from_box(&[-1, -1], &[1, 1]).unwrap();
        let nu = nu_minus_exact(&window, &p, FieldMode::Zero, 24).unwrap();
        assert!(nu.free.is_empty());
        assert_eq!(nu.probability, 0.0);
    }

    #[test]
    fn nu_on_5x5_is_single_site_formula() {
        let p = base_params().with_beta(2.0);
        let window = Region::from_box(&[-2, -2], &[2, 2]).unwrap();
        let nu = nu_minus_exact(&window, &p, FieldMode::Zero, 24).unwrap();
        assert_eq!(nu.free.len(), 1);
        assert!(nu.free.contains(&point(&[0, 0])));
        // only the center is free: nu = 1 / (1 + exp(2 beta J c_alpha))
        let c_alpha = lattice_sum_radial(&p).value;
        let expected = 1.0 / (1.0 + (2.0 * p.beta * p.j * c_alpha).exp());
        assert!(
            (nu.probability - expected).abs() <= 1e-12 + expected * 1e-6,
            "nu = {:e}, expected {:e}",
            nu.probability,
            expected
        );
    }

    #[test]
    fn nu_decreases_in_beta_and_counts_at_beta_zero() {
        let window = Region::from_box(&[-2, -2], &[2, 2]).unwrap();
        let mut last = f64::INFINITY;
        for beta in [0.5, 1.0, 2.0] {
            let p = base_params().with_beta(beta);
            let nu = nu_minus_exact(&window, &p, FieldMode::Zero, 24).unwrap();
            assert!(nu.probability < last);
            assert!(nu.probability < 0.5);
            last = nu.probability;
        }
        // beta ~ 0: counting ratio 1/2 for the single free site
        let p = base_params().with_beta(1e-12);
        let nu = nu_minus_exact(&window, &p, FieldMode::Zero, 24).unwrap();
        assert!((nu.probability - 0.5).abs() < 1e-9);
    }

    #[test]
    fn nu_7x7_free_block_is_3x3() {
        let p = base_params().with_beta(0.5);
        let window = Region::from_box(&[-3, -3], &[3, 3]).unwrap();
        let nu = nu_minus_exact(&window, &p, FieldMode::Zero, 24).unwrap();
        assert_eq!(nu.free.len(), 9);
        assert!(nu.probability < 0.5 && nu.probability > 0.0);
    }

    #[test]
    fn restricted_z_counts_all_minus_only_when_inner_empty() {
        let p = base_params().with_beta(1.0);
        let cp = derived_cp(&p).with_m(1.0);
        let window = Region::from_box(&[0, 0], &[2, 2]).unwrap();
        let empty = Region::empty(2);
        let z = log_restricted_partition_function(
            &window,
            &empty,
            &p,
            &cp,
            FieldMode::Zero,
            16,
        )
        .unwrap();
        // only configurations with no contours at all: with this window and
        // a minus exterior, exactly the all-minus configuration
        let sigma = SpinConfiguration::constant(window, -1, -1).unwrap();
        let expected = -p.beta * hamiltonian(&sigma, &p, FieldMode::Zero);
        assert!((z - expected).abs() < 1e-9);
    }

    #[test]
    fn restricted_z_monotone_in_inner_region() {
        let p = base_params().with_beta(0.7);
        let cp = derived_cp(&p).with_m(1.0);
        let window = Region::from_box(&[0, 0], &[2, 2]).unwrap();
        let small = Region::from_box(&[0, 0], &[1, 1]).unwrap();
        let z_small =
            log_restricted_partition_function(&window, &small, &p, &cp, FieldMode::Zero, 16)
                .unwrap();
        let z_big =
            log_restricted_partition_function(&window, &window, &p, &cp, FieldMode::Zero, 16)
                .unwrap();
        assert!(z_small <= z_big);
    }
}

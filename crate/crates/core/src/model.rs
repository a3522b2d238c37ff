//! Couplings `J|x-y|^-alpha`, decaying fields `h*|x|^-delta`, Hamiltonians
//! with constant exterior boundary conditions, and exact small-volume
//! partition functions.
//!
//! Exterior sums over the infinite complement are never truncated at an
//! ad-hoc radius: the per-site sum over all of `Z^d` is the radial lattice
//! sum `c_alpha`, evaluated once with a certified tail bound, and the finite
//! window part is subtracted exactly.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};


use crate::error::{CtkError, Result};
use crate::lattice::{diameter, index_map, sphere_count, Point, Region};

/// Model parameters. `alpha > d` makes couplings summable; `tail_tol` is the
/// additive tolerance certified for every infinite sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub alpha: f64,
    pub delta: f64,
    #[serde(rename = "J", default = "default_j")]
    pub j: f64,
    pub h_star: f64,
    pub beta: f64,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_j() -> f64 {
    1.0
}

fn default_tail_tol() -> f64 {
    1e-10
}

impl ModelParams {
    pub fn new(d: u32, alpha: f64) -> ModelParams {
        ModelParams {
            d,
            alpha,
            delta: 1.0,
            j: 1.0,
            h_star: 0.0,
            beta: 1.0,
            tail_tol: 1e-10,
        }
    }

    pub fn with_field(mut self, h_star: f64, delta: f64) -> ModelParams {
        self.h_star = h_star;
        self.delta = delta;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> ModelParams {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(CtkError::InvalidParams("d >= 1 required".into()));
        }
        if !(self.alpha > self.d as f64) {
            return Err(CtkError::InvalidParams(format!(
                "alpha > d required (alpha = {}, d = {})",
                self.alpha, self.d
            )));
        }
        if !(self.j > 0.0) {
            return Err(CtkError::InvalidParams("J > 0 required".into()));
        }
        if !(self.tail_tol > 0.0) {
            return Err(CtkError::InvalidParams("tail_tol > 0 required".into()));
        }
        if self.delta <= 0.0 {
            return Err(CtkError::InvalidParams("delta > 0 required".into()));
        }
        if self.h_star < 0.0 {
            return Err(CtkError::InvalidParams("h_star >= 0 required".into()));
        }
        if !(self.beta > 0.0) {
            return Err(CtkError::InvalidParams("beta > 0 required".into()));
        }
        Ok(())
    }

    /// Coupling `J_xy`: 0 on the diagonal, else `J |x-y|_1^-alpha`.
    pub fn coupling(&self, x: &Point, y: &Point) -> f64 {
        let dist = x.l1_distance(y);
        if dist == 0 {
            0.0
        } else {
            self.j * (dist as f64).powf(-self.alpha)
        }
    }

    /// Field `h_x = h*` at the origin, `h* |x|_1^-delta` elsewhere.
    pub fn field(&self, x: &Point) -> f64 {
        let norm = x.l1_norm();
        if norm == 0 {
            self.h_star
        } else {
            self.h_star * (norm as f64).powf(-self.delta)
        }
    }

    /// Field zeroed inside radius `R`: 0 for `|x| < R`, `h_x` for `|x| >= R`.
    pub fn truncated_field(&self, x: &Point, radius: f64) -> f64 {
        if (x.l1_norm() as f64) < radius {
            0.0
        } else {
            self.field(x)
        }
    }

    pub fn field_in_mode(&self, x: &Point, mode: FieldMode) -> f64 {
        match mode {
            FieldMode::Zero => 0.0,
            FieldMode::Full => self.field(x),
            FieldMode::Truncated(r) => self.truncated_field(x, r),
        }
    }
}

/// How the external field enters a Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FieldMode {
    Zero,
    Full,
    Truncated(f64),
}

/// Radial lattice sum `c_alpha = sum_{n>=1} s_d(n) n^-alpha` with a certified
/// additive error bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LatticeSum {
    pub value: f64,
    /// Certified bound on the dropped tail.
    pub tail_bound: f64,
    /// Number of radial shells summed.
    pub shells: u64,
}

static C_ALPHA_CACHE: OnceLock<RwLock<HashMap<(u32, u64, u64), LatticeSum>>> = OnceLock::new();

/// `c_alpha` with tail error below `p.tail_tol`, memoized per
/// `(d, alpha, tail_tol)`. Concurrent fills are idempotent.
pub fn lattice_sum_radial(p: &ModelParams) -> LatticeSum {
    let key = (p.d, p.alpha.to_bits(), p.tail_tol.to_bits());
    let cache = C_ALPHA_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(hit) = cache.read().unwrap().get(&key) {
        return *hit;
    }
    let computed = compute_lattice_sum(p.d, p.alpha, p.tail_tol);
    cache.write().unwrap().insert(key, computed);
    computed
}

fn compute_lattice_sum(d: u32, alpha: f64, tol: f64) -> LatticeSum {
    assert!(alpha > d as f64);
    // s_d(n) is a polynomial of degree d-1 in n (the binomial terms expand
    // exactly, including the small-n zeros), so the tail over n > N splits
    // into power-sum tails sum_{n>N} n^(j-alpha) evaluated by Euler-Maclaurin
    // with a certified remainder. A raw integral comparison would need
    // ~tol^(-1/(alpha-d)) shells, which is unusable for alpha close to d.
    let coeffs = sphere_polynomial(d);
    let mut n = 32u64.max(d as u64 + 1);
    loop {
        let mut acc = Accumulator::default();
        for m in 1..=n {
            acc.add(sphere_count(d, m) as f64 * (m as f64).powf(-alpha));
        }
        let mut bound = 0.0;
        for (j, a) in coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let (t, err) = power_tail(alpha - j as f64, n);
            acc.add(a * t);
            bound += a.abs() * err;
        }
        if bound < tol || n > (1 << 24) {
            return LatticeSum {
                value: acc.value(),
                tail_bound: bound,
                shells: n,
            };
        }
        n *= 2;
    }
}

/// Coefficients of `s_d(n)` as a polynomial in `n` (exact for all n >= 1).
fn sphere_polynomial(d: u32) -> Vec<f64> {
    let mut out = vec![0.0f64; d as usize];
    for k in 0..d {
        let m = (d - k - 1) as usize;
        // C(n-1, m) = prod_{i=1..m} (n - i) / m!
        let mut poly = vec![0i128; m + 1];
        poly[0] = 1;
        let mut deg = 0;
        for i in 1..=m as i128 {
            poly[deg + 1] = poly[deg];
            for t in (1..=deg).rev() {
                poly[t] = poly[t - 1] - i * poly[t];
            }
            poly[0] *= -i;
            deg += 1;
        }
        let mut fact = 1f64;
        for i in 1..=m {
            fact *= i as f64;
        }
        let scale = 2f64.powi((d - k) as i32) * crate::lattice::binomial(d as u64, k as u64) as f64;
        for (j, c) in poly.iter().enumerate() {
            out[j] += scale * *c as f64 / fact;
        }
    }
    out
}

/// `sum_{n > N} n^-s` via Euler-Maclaurin, with a remainder bound (magnitude
/// of the first omitted Bernoulli term, doubled for safety). Requires `s > 1`.
fn power_tail(s: f64, n: u64) -> (f64, f64) {
    assert!(s > 1.0);
    let nf = n as f64;
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s);
    // B_2, B_4, ..., B_12; term_k = B_2k/(2k)! * s(s+1)..(s+2k-2) * n^(-s-2k+1)
    let bernoulli = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = nf.powf(-s - 1.0);
    let mut last_term = 0.0;
    for (k, b) in bernoulli.iter().enumerate() {
        last_term = b / factorial * rising * power;
        tail += last_term;
        let two_k = 2.0 * (k + 1) as f64;
        rising *= (s + two_k - 1.0) * (s + two_k);
        factorial *= (two_k + 1.0) * (two_k + 2.0);
        power /= nf * nf;
    }
    (tail, 2.0 * last_term.abs())
}

/// Spin values on a finite window with a constant exterior boundary
/// condition.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinConfiguration {
    window: Region,
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    spins: Vec<i8>,
    boundary: i8,
}

impl SpinConfiguration {
    /// All spins equal to `value` on `window`, exterior `boundary`.
    pub fn constant(window: Region, value: i8, boundary: i8) -> Result<SpinConfiguration> {
        check_spin(value)?;
        check_spin(boundary)?;
        let points: Vec<Point> = window.iter().cloned().collect();
        let index = index_map(&points);
        let spins = vec![value; points.len()];
        Ok(SpinConfiguration {
            window,
            points,
            index,
            spins,
            boundary,
        })
    }

    /// `+1` exactly on `plus`, `-1` on the rest of the window.
    pub fn from_plus_set(window: Region, plus: &Region, boundary: i8) -> Result<SpinConfiguration> {
        if !plus.is_subset(&window) {
            return Err(CtkError::InvalidParams(
                "plus set must lie inside the window".into(),
            ));
        }
        let mut cfg = SpinConfiguration::constant(window, -1, boundary)?;
        for p in plus.iter() {
            let i = cfg.index[p];
            cfg.spins[i] = 1;
        }
        Ok(cfg)
    }

    pub fn window(&self) -> &Region {
        &self.window
    }

    pub fn boundary(&self) -> i8 {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Spin at any lattice point; exterior points carry the boundary value.
    pub fn spin(&self, p: &Point) -> i8 {
        match self.index.get(p) {
            Some(&i) => self.spins[i],
            None => self.boundary,
        }
    }

    pub fn set_spin(&mut self, p: &Point, value: i8) -> Result<()> {
        check_spin(value)?;
        match self.index.get(p) {
            Some(&i) => {
                self.spins[i] = value;
                Ok(())
            }
            None => Err(CtkError::InvalidParams(format!(
                "point {:?} outside the window",
                p
            ))),
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.spins[i] = -self.spins[i];
    }

    /// The set of `+1` sites.
    pub fn plus_set(&self) -> Region {
        Region::from_points(
            self.window.dim(),
            self.points
                .iter()
                .zip(&self.spins)
                .filter(|(_, s)| **s == 1)
                .map(|(p, _)| p.clone()),
        )
        .expect("window points share the dimension")
    }

    /// Global spin flip, including the boundary condition.
    pub fn flipped(&self) -> SpinConfiguration {
        let mut out = self.clone();
        for s in &mut out.spins {
            *s = -*s;
        }
        out.boundary = -out.boundary;
        out
    }
}

fn check_spin(s: i8) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(CtkError::InvalidParams(format!(
            "spin must be +-1, got {}",
            s
        )))
    }
}

impl Serialize for SpinConfiguration {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("SpinConfiguration", 3)?;
        st.serialize_field("window", &self.window)?;
        st.serialize_field("spins", &self.spins)?;
        st.serialize_field("boundary", &self.boundary)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SpinConfiguration {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            window: Region,
            spins: Vec<i8>,
            boundary: i8,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.spins.len() != raw.window.len() {
            return Err(serde::de::Error::custom(format!(
                "{} spins for a window of {} points (spins align with the sorted window)",
                raw.spins.len(),
                raw.window.len()
            )));
        }
        let mut cfg = SpinConfiguration::constant(raw.window, -1, raw.boundary)
            .map_err(serde::de::Error::custom)?;
        for (i, s) in raw.spins.iter().enumerate() {
            check_spin(*s).map_err(serde::de::Error::custom)?;
            cfg.spins[i] = *s;
        }
        Ok(cfg)
    }
}

/// Coupling lookup table indexed by `l1` distance (index 0 unused).
pub(crate) fn coupling_table(p: &ModelParams, max_dist: u64) -> Vec<f64> {
    let mut tab = vec![0.0; max_dist as usize + 1];
    for (m, value) in tab.iter_mut().enumerate().skip(1) {
        *value = p.j * (m as f64).powf(-p.alpha);
    }
    tab
}

/// Compensated accumulator (Neumaier) for long coupling sums.
#[derive(Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        self.comp += if self.sum.abs() >= term.abs() {
            (self.sum - t) + term
        } else {
            (term - t) + self.sum
        };
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `H(sigma) = - sum_{{x,y} in window} J_xy s_x s_y
///             - sum_{x in window} s_x omega W_x - sum_x h_x s_x`
/// where `W_x = J c_alpha - sum_{y in window, y != x} J_xy` is the exact sum
/// of couplings from `x` to the whole complement, up to `J * tail_tol` per
/// site.
pub fn hamiltonian(sigma: &SpinConfiguration, p: &ModelParams, mode: FieldMode) -> f64 {
    if sigma.is_empty() {
        return 0.0;
    }
    let c_alpha = lattice_sum_radial(p).value;
    let pts = sigma.points();
    let spins = sigma.spins();
    let max_dist = diameter(sigma.window()).expect("nonempty window");
    let tab = coupling_table(p, max_dist);
    let omega = sigma.boundary() as f64;

    let mut pair = Accumulator::default();
    let mut row_sums = vec![0.0f64; pts.len()];
    for i in 0..pts.len() {
        let mut row = Accumulator::default();
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let w = tab[pts[i].l1_distance(&pts[j]) as usize];
            row.add(w);
            if j > i {
                pair.add(w * (spins[i] * spins[j]) as f64);
            }
        }
        row_sums[i] = row.value();
    }

    let mut exterior = Accumulator::default();
    let mut field = Accumulator::default();
    for i in 0..pts.len() {
        let w_x = p.j * c_alpha - row_sums[i];
        exterior.add(spins[i] as f64 * omega * w_x);
        field.add(p.field_in_mode(&pts[i], mode) * spins[i] as f64);
    }
    -pair.value() - exterior.value() - field.value()
}

/// Surface energy `F_Lambda = sum_{x in Lambda, y outside} J_xy`, computed as
/// `sum_x (J c_alpha - sum_{y in Lambda, y != x} J_xy)`; error below
/// `|Lambda| * J * tail_tol`.
pub fn surface_energy(region: &Region, p: &ModelParams) -> Result<f64> {
    if region.is_empty() {
        return Err(CtkError::EmptyRegion("surface_energy"));
    }
    let c_alpha = lattice_sum_radial(p).value;
    let pts: Vec<&Point> = region.iter().collect();
    let max_dist = diameter(region)?;
    let tab = coupling_table(p, max_dist);
    let mut pair = Accumulator::default();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            pair.add(tab[pts[i].l1_distance(pts[j]) as usize]);
        }
    }
    Ok(pts.len() as f64 * p.j * c_alpha - 2.0 * pair.value())
}

/// Exact field sum over a region (any `delta`).
pub fn field_sum(region: &Region, p: &ModelParams) -> f64 {
    let mut acc = Accumulator::default();
    for x in region.iter() {
        acc.add(p.field(x));
    }
    acc.value()
}

/// Maximum number of enumerated spins for exact partition functions.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// `log Z` over all `2^|window|` configurations with boundary `omega`,
/// aggregated in log space to avoid overflow.
pub fn log_partition_function(
    window: &Region,
    p: &ModelParams,
    omega: i8,
    mode: FieldMode,
) -> Result<f64> {
    log_partition_function_capped(window, p, omega, mode, DEFAULT_ENUMERATION_CAP)
}

pub fn log_partition_function_capped(
    window: &Region,
    p: &ModelParams,
    omega: i8,
    mode: FieldMode,
    cap: u32,
) -> Result<f64> {
    let k = window.len() as u32;
    if k > cap {
        return Err(CtkError::cap(
            "partition function window",
            k as u64,
            cap as u64,
        ));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let mut sigma = SpinConfiguration::constant(window.clone(), -1, omega)?;
    let enumeration = enumerate_gray(&mut sigma, p, mode, &mut |_, _| {});
    Ok(enumeration.log_z)
}

pub(crate) struct GrayEnumeration {
    pub log_z: f64,
}

/// Walks all spin assignments of `sigma`'s window by Gray code, maintaining
/// the exact energy incrementally, and streams `(-beta * H, sigma)` to the
/// visitor while accumulating `log Z`. Each assignment is visited exactly
/// once; `sigma` is the scratch state.
pub(crate) fn enumerate_gray(
    sigma: &mut SpinConfiguration,
    p: &ModelParams,
    mode: FieldMode,
    visit: &mut dyn FnMut(f64, &SpinConfiguration),
) -> GrayEnumeration {
    let k = sigma.len();
    assert!(k < 64, "Gray enumeration needs < 64 sites");
    let beta = p.beta;
    let c_alpha = lattice_sum_radial(p).value;
    let pts = sigma.points().to_vec();
    let max_dist = diameter(sigma.window()).expect("nonempty window");
    let tab = coupling_table(p, max_dist);
    let omega = sigma.boundary() as f64;

    // pairwise kernel rows and per-site effective fields
    let mut kernel = vec![0.0f64; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                kernel[i * k + j] = tab[pts[i].l1_distance(&pts[j]) as usize];
            }
        }
    }
    let mut eff = vec![0.0f64; k];
    for (i, e) in eff.iter_mut().enumerate() {
        let row: f64 = (0..k).map(|j| kernel[i * k + j]).sum();
        *e = p.field_in_mode(&pts[i], mode) + omega * (p.j * c_alpha - row);
    }

    let mut energy = hamiltonian(sigma, p, mode);
    let mut max_arg = f64::NEG_INFINITY;
    let mut scaled_sum = 0.0f64;

    let mut record = |e: f64| -> f64 {
        let arg = -beta * e;
        if arg > max_arg {
            scaled_sum = scaled_sum * (max_arg - arg).exp() + 1.0;
            max_arg = arg;
        } else {
            scaled_sum += (arg - max_arg).exp();
        }
        arg
    };

    let arg = record(energy);
    visit(arg, sigma);
    let total: u64 = 1u64 << k;
    for code in 1..total {
        let flip = code.trailing_zeros() as usize;
        let s = sigma.spins()[flip] as f64;
        let mut local = 0.0;
        for j in 0..k {
            local += kernel[flip * k + j] * sigma.spins()[j] as f64;
        }
        energy += 2.0 * s * (eff[flip] + local);
        sigma.flip(flip);
        let arg = record(energy);
        visit(arg, sigma);
    }
    GrayEnumeration {
        log_z: max_arg + scaled_sum.ln(),
    }
}

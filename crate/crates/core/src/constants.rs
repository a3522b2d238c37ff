//! The explicit constants behind every inequality in the pipeline, exposed as
//! pure functions so tests can pin exact formula values.
//!
//! Naming follows the quantities they bound:
//! * `c_d`, `sd_upper_coeff` — the sphere-count sandwich
//!   `c_d n^(d-1) <= s_d(n) <= 2^(2d-1) e^(d-1) n^(d-1)`;
//! * `k_d` — the diameter lower bound `diam >= k_d |Lambda|^(1/d)`;
//! * `k_alpha_cap` — the surface-energy lower bound
//!   `F >= K_alpha max{|Lambda|^(2-alpha/d), |edge boundary|}`;
//! * `c5_coeff` — the field-sum bound `sum h <= c5 |Lambda|^(1-delta/d)`;
//! * `entropy_c`, `entropy_b`, `kappa`, `c1` — cover counting, set counting,
//!   total-volume control and contour counting;
//! * `k_alpha_1`, `m1`/`m2`/`m_threshold`, `c2`/`c3`/`c4` — the erase-cost
//!   bound and its separation-amplitude threshold;
//! * `beta_c_bound` — the inverse temperature closing the geometric contour
//!   sum below 1/2.

use std::f64::consts::LN_2;

/// Riemann zeta for real `s > 1` by Euler-Maclaurin; absolute accuracy is
/// near machine epsilon for `s >= 1.1`, which covers every exponent used
/// here.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta requires s > 1");
    let n = 40u64;
    let mut sum = 0.0;
    for k in 1..n {
        sum += (k as f64).powf(-s);
    }
    let nf = n as f64;
    sum += nf.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * nf.powf(-s);
    // Bernoulli correction terms B_2k / (2k)! * s(s+1)...(s+2k-2) * n^(-s-2k+1)
    let bernoulli = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let mut rising = s; // s(s+1)...(s+2k-2), starts at k=1 with just s
    let mut factorial = 2.0; // (2k)!
    let mut power = nf.powf(-s - 1.0);
    for (k, b) in bernoulli.iter().enumerate() {
        sum += b / factorial * rising * power;
        let two_k = 2.0 * (k + 1) as f64;
        rising *= (s + two_k - 1.0) * (s + two_k);
        factorial *= (two_k + 1.0) * (two_k + 2.0);
        power /= nf * nf;
    }
    sum
}

/// `c_d = (d-1)^-(d-1)`, the lower sandwich coefficient (1 for d = 1).
pub fn c_d(d: u32) -> f64 {
    if d == 1 {
        1.0
    } else {
        ((d - 1) as f64).powi(-((d - 1) as i32))
    }
}

/// `2^(2d-1) e^(d-1)`, the upper sandwich coefficient.
pub fn sd_upper_coeff(d: u32) -> f64 {
    2f64.powi(2 * d as i32 - 1) * std::f64::consts::E.powi(d as i32 - 1)
}

/// `C_d = (2^(2d) e^(d-1) / d)^(-1/d)`.
pub fn big_c_d(d: u32) -> f64 {
    let inner = 2f64.powi(2 * d as i32) * std::f64::consts::E.powi(d as i32 - 1) / d as f64;
    inner.powf(-1.0 / d as f64)
}

/// `k_d = C_d / 2`, the diameter lower-bound constant.
pub fn k_d(d: u32) -> f64 {
    big_c_d(d) / 2.0
}

/// `K_alpha = J c_d (alpha-d)^-1 ((d c_d^-1)^(1/d) + 2)^(d-alpha)`.
pub fn k_alpha_cap(j: f64, alpha: f64, d: u32) -> f64 {
    let cd = c_d(d);
    let df = d as f64;
    j * cd / (alpha - df) * ((df / cd).powf(1.0 / df) + 2.0).powf(df - alpha)
}

/// `c5 / h*`: the field-sum bound is `sum h <= h* c5_coeff |Lambda|^(1-delta/d)`,
/// valid for `delta < d`.
pub fn c5_coeff(delta: f64, d: u32) -> f64 {
    assert!(delta < d as f64, "field-sum bound requires delta < d");
    let cd = c_d(d);
    let df = d as f64;
    sd_upper_coeff(d) / (df - delta) * ((df / cd).powf(1.0 / df) + 2.0).powf(df - delta)
}

/// Separation exponent `a = max{(d+1+eps)/(alpha-d), d+1+eps}`.
pub fn separation_exponent(alpha: f64, d: u32, eps: f64) -> f64 {
    let df = d as f64;
    ((df + 1.0 + eps) / (alpha - df)).max(df + 1.0 + eps)
}

/// Scale stride `r = ceil(log2(a+1)) + d + 1`.
pub fn scale_stride(a: f64, d: u32) -> u32 {
    ((a + 1.0).log2().ceil() as u32) + d + 1
}

/// Subordinated-cover counting constant
/// `c = (2d+1) log 2 + d log(2^(r+1) - 1)`.
pub fn entropy_c(d: u32, r: u32) -> f64 {
    (2.0 * d as f64 + 1.0) * LN_2 + d as f64 * (2f64.powi(r as i32 + 1) - 1.0).ln()
}

/// Set-counting constant `b = d log 3 + log 2 + c + 1`.
pub fn entropy_b(d: u32, r: u32) -> f64 {
    d as f64 * 3f64.ln() + LN_2 + entropy_c(d, r) + 1.0
}

/// `log base 2^r`.
fn log_2r(r: u32, x: f64) -> f64 {
    x.ln() / (r as f64 * LN_2)
}

/// `n0 = (a + 2 + log_{2^r}(2 M d^a)) / (a - 1)` from the total-volume bound.
pub fn kappa_n0(d: u32, a: f64, r: u32, m: f64) -> f64 {
    (a + 2.0 + log_2r(r, 2.0 * m * (d as f64).powf(a))) / (a - 1.0)
}

/// Total-volume constant `kappa`, the max of the three closing expressions of
/// the `V_r(sp) <= kappa |gamma|` bound.
pub fn kappa(d: u32, a: f64, r: u32, m: f64) -> f64 {
    let lg = log_2r(r, 2.0 * m * (d as f64).powf(a));
    let n0 = kappa_n0(d, a, r, m);
    let e = (r - d - 1) as f64 / a.log2();
    let small_diameter = 3.0 + lg;
    let large_diameter = n0 + 1.0 + 2f64.powi(2 * (r - d - 1) as i32) * n0.powf(e) * (2.0 + lg);
    let no_single_small = n0 + 1.0 + 2f64.powi((r - d - 1) as i32) * n0.powf(e) * zeta(e);
    small_diameter.max(large_diameter).max(no_single_small)
}

/// Contour-counting constant `c1 = 2 b kappa + 1 + (d-1)^-1`.
pub fn c1(d: u32, b: f64, kappa: f64) -> f64 {
    assert!(d >= 2, "contour counting requires d >= 2");
    2.0 * b * kappa + 1.0 + 1.0 / (d as f64 - 1.0)
}

/// `k_alpha^(1)`: the interaction constant of the erase-cost bound,
/// `max{J 2^(2d-1) e^(d-1) (2^r - 1) / ((alpha-d) k_d^(a(alpha-d))),
///      (2^r - 1)^(d+1) zeta(a-d) / k_d^d}`.
pub fn k_alpha_1(j: f64, alpha: f64, d: u32, a: f64, r: u32) -> f64 {
    let df = d as f64;
    let kd = k_d(d);
    let pieces = 2f64.powi(r as i32) - 1.0;
    let first = j * sd_upper_coeff(d) * pieces / ((alpha - df) * kd.powf(a * (alpha - df)));
    let second = pieces.powi(d as i32 + 1) * zeta(a - df) / kd.powi(d as i32);
    first.max(second)
}

/// `M1`: `M1^(alpha-d) = 12 (2d+1) (2d)^(d/(d-1)) k_alpha^(1) 2^alpha / (J c_alpha)`.
pub fn m1(j: f64, alpha: f64, d: u32, k1: f64, c_alpha: f64) -> f64 {
    let df = d as f64;
    let rhs = 12.0 * (2.0 * df + 1.0) * (2.0 * df).powf(df / (df - 1.0)) * k1 * 2f64.powf(alpha)
        / (j * c_alpha);
    rhs.powf(1.0 / (alpha - df))
}

/// `M2`: `M2^((alpha-d) /\ 1) = 4 (2d+1) k_alpha^(1) 2^alpha`.
pub fn m2(alpha: f64, d: u32, k1: f64) -> f64 {
    let df = d as f64;
    let rhs = 4.0 * (2.0 * df + 1.0) * k1 * 2f64.powf(alpha);
    rhs.powf(1.0 / (alpha - df).min(1.0))
}

/// Separation-amplitude threshold `max{(2^r - 1)^(d+1) / k_d^d, M1, M2}`.
pub fn m_threshold(j: f64, alpha: f64, d: u32, a: f64, r: u32, c_alpha: f64) -> f64 {
    let k1 = k_alpha_1(j, alpha, d, a, r);
    let geometric = (2f64.powi(r as i32) - 1.0).powi(d as i32 + 1) / k_d(d).powi(d as i32);
    geometric.max(m1(j, alpha, d, k1, c_alpha)).max(m2(alpha, d, k1))
}

/// `c2 = J c_alpha / ((2d+1) 2^alpha) - 6 (2d)^(d/(d-1)) k_alpha^(1) / M^(alpha-d)`.
pub fn c2(j: f64, alpha: f64, d: u32, k1: f64, c_alpha: f64, m: f64) -> f64 {
    let df = d as f64;
    j * c_alpha / ((2.0 * df + 1.0) * 2f64.powf(alpha))
        - 6.0 * (2.0 * df).powf(df / (df - 1.0)) * k1 / m.powf(alpha - df)
}

/// `c3 = 2 (((2d+1) 2^(alpha-1))^-1 - 4 k_alpha^(1) / M)`.
pub fn c3(alpha: f64, d: u32, k1: f64, m: f64) -> f64 {
    let df = d as f64;
    2.0 * (1.0 / ((2.0 * df + 1.0) * 2f64.powf(alpha - 1.0)) - 4.0 * k1 / m)
}

/// `c4 = ((2d+1) 2^alpha)^-1 - 2 k_alpha^(1) / M^((alpha-d) /\ 1)`.
pub fn c4(alpha: f64, d: u32, k1: f64, m: f64) -> f64 {
    let df = d as f64;
    1.0 / ((2.0 * df + 1.0) * 2f64.powf(alpha)) - 2.0 * k1 / m.powf((alpha - df).min(1.0))
}

/// `beta_c = (2/c2)(c1 + log 2 + log 3)`: the geometric contour sum
/// `sum_m exp((c1 + log 2 - beta c2 / 2) m)` drops below 1/2 exactly when the
/// term ratio drops below 1/3.
pub fn beta_c_bound(c1: f64, c2: f64) -> f64 {
    assert!(c2 > 0.0);
    2.0 * (c1 + LN_2 + 3f64.ln()) / c2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_reference_values() {
        // pi^2/6 and known high-precision references
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612375348685488).abs() < 1e-13);
        assert!((zeta(3.0) - 1.2020569031595943).abs() < 1e-14);
        assert!((zeta(5.0) - 1.0369277551433699).abs() < 1e-14);
    }

    #[test]
    fn sandwich_coefficients() {
        assert_eq!(c_d(2), 1.0);
        assert!((c_d(3) - 0.25).abs() < 1e-15);
        assert!((sd_upper_coeff(2) - 8.0 * std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn diameter_constant_d2() {
        // k_2 = (8e)^(-1/2) / 2 ~ 0.1072
        let expected = (8.0 * std::f64::consts::E).powf(-0.5) / 2.0;
        assert!((k_d(2) - expected).abs() < 1e-15);
        assert!((k_d(2) - 0.1072).abs() < 1e-4);
    }

    #[test]
    fn surface_energy_constant_examples() {
        // d=2, alpha=3, J=1: K_alpha * 4 ~ 1.17
        let ka = k_alpha_cap(1.0, 3.0, 2);
        assert!((ka * 4.0 - 1.1716).abs() < 1e-3);
    }

    #[test]
    fn field_constant_example() {
        // d=2, delta=1, h*=1 -> c5 ~ 74.2
        assert!((c5_coeff(1.0, 2) - 74.25).abs() < 0.1);
    }

    #[test]
    fn separation_parameters() {
        let a = separation_exponent(3.0, 2, 0.5);
        assert_eq!(a, 3.5);
        assert_eq!(scale_stride(a, 2), 6);
        // alpha close to d pushes a up through the first branch
        let a = separation_exponent(2.5, 2, 0.5);
        assert_eq!(a, 7.0);
        assert_eq!(scale_stride(a, 2), 6);
    }

    #[test]
    fn entropy_constants_d2_r6() {
        let c = entropy_c(2, 6);
        assert!((c - (5.0 * LN_2 + 2.0 * 127f64.ln())).abs() < 1e-12);
        assert!((c - 13.15).abs() < 0.01);
        assert!((entropy_b(2, 6) - 17.04).abs() < 0.01);
    }

    #[test]
    fn m_threshold_is_positive_and_dominates() {
        let c_alpha = 4.0 * zeta(2.0); // d=2, alpha=3
        let a = separation_exponent(3.0, 2, 0.5);
        let r = scale_stride(a, 2);
        let k1 = k_alpha_1(1.0, 3.0, 2, a, r);
        let thr = m_threshold(1.0, 3.0, 2, a, r, c_alpha);
        assert!(thr >= m1(1.0, 3.0, 2, k1, c_alpha));
        assert!(thr >= m2(3.0, 2, k1));
        // strictly above threshold all three erase-cost constants are positive
        let m = 2.0 * thr;
        assert!(c2(1.0, 3.0, 2, k1, c_alpha, m) > 0.0);
        assert!(c3(3.0, 2, k1, m) > 0.0);
        assert!(c4(3.0, 2, k1, m) > 0.0);
    }

    #[test]
    fn c2_limit_as_m_grows() {
        let c_alpha = 4.0 * zeta(2.0);
        let a = separation_exponent(3.0, 2, 0.5);
        let r = scale_stride(a, 2);
        let k1 = k_alpha_1(1.0, 3.0, 2, a, r);
        let limit = c_alpha / (5.0 * 8.0);
        assert!((c2(1.0, 3.0, 2, k1, c_alpha, 1e300) - limit).abs() < 1e-12);
    }
}

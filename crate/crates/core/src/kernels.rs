//! Heat kernels of the generalized Maass Laplacian `D_κ` on the Bergman ball
//! and the subelliptic heat kernel of the AdS fibration.
//!
//! The Maass kernel is evaluated by two routes that share nothing but the
//! radial kernel `q_t` of `H^{2n+1}`:
//!
//! * **direct**: `2∫_d^∞ sinh x · N_κ(x, d) · q_t(x) dx`, with the endpoint
//!   singularity removed by `x = d + r²`;
//! * **substituted**: after `cosh x = cosh u · cosh d` the hypergeometric
//!   factor becomes `cosh(2κu)`, giving `2∫_0^∞ q_t(x(u)) cosh(2κu) du`.
//!
//! Both are multiplied by the phase `((1 - conj⟨w,y⟩)/(1 - ⟨w,y⟩))^κ`.
//!
//! The AdS kernel is `Σ_k v_{t,n,k/2}(w,y) e^{-ikθ} e^{-tk²}` (density against
//! `dy/(1-‖y‖²)^{n+1} · dθ/2π`). At the origin it also equals `2π` times
//! `(4πt)^{-1/2} Σ_k ∫ exp((u - iθ - 2ikπ)²/4t) q_t(x(u)) du`; the two sides
//! are linked by the theta identity implemented at the bottom of this file.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BallPoint, FiberAngle, HalfInteger};
use crate::quadrature::{self, QuadratureConfig};
use crate::radial_heat::RadialHeatKernel;
use crate::special;

/// Below this distance the direct route hands over to the substituted one.
pub const DIRECT_ROUTE_MIN_DISTANCE: f64 = 1e-8;

/// Hard ceiling on the number of Fourier modes summed by the series route.
pub const MAX_FOURIER_MODES: u32 = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaassKernelQuery {
    pub t: f64,
    pub n: u32,
    pub kappa: HalfInteger,
    pub w: BallPoint,
    pub y: BallPoint,
}

impl MaassKernelQuery {
    pub fn new(t: f64, n: u32, kappa: HalfInteger, w: BallPoint, y: BallPoint) -> Result<Self> {
        validate_time(t)?;
        validate_points(n, &w, &y)?;
        Ok(Self { t, n, kappa, w, y })
    }

    pub fn distance(&self) -> Result<f64> {
        geometry::hyperbolic_distance(&self.w, &self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdsKernelQuery {
    pub t: f64,
    pub n: u32,
    pub w: BallPoint,
    pub y: BallPoint,
    pub theta: FiberAngle,
}

impl AdsKernelQuery {
    pub fn new(t: f64, n: u32, w: BallPoint, y: BallPoint, theta: FiberAngle) -> Result<Self> {
        validate_time(t)?;
        validate_points(n, &w, &y)?;
        Ok(Self { t, n, w, y, theta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Target bound on the discarded part of a sum over `ℤ`.
    pub eps_tail: f64,
    /// Sum exactly `|k| ≤ k_max_override` instead of truncating adaptively.
    pub k_max_override: Option<u32>,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            eps_tail: 1e-12,
            k_max_override: None,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_tail > 0.0 && self.eps_tail < 1.0) {
            return Err(Error::Configuration(format!(
                "eps_tail = {} must lie in (0, 1)",
                self.eps_tail
            )));
        }
        if self.k_max_override == Some(0) {
            return Err(Error::Configuration("k_max_override must be positive".into()));
        }
        Ok(())
    }
}

/// A truncated sum over `k ∈ ℤ` together with its truncation index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    /// Terms with `|k| ≤ k_max` were summed.
    pub k_max: u32,
    /// Estimated size of the discarded tail (0 when `k_max` was imposed).
    pub tail_estimate: f64,
}

fn validate_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time t = {t} must be positive and finite")));
    }
    Ok(())
}

fn validate_points(n: u32, w: &BallPoint, y: &BallPoint) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("complex dimension n must be at least 1".into()));
    }
    for p in [w, y] {
        if p.dim() != n as usize {
            return Err(Error::DimensionMismatch {
                left: n as usize,
                right: p.dim(),
            });
        }
    }
    Ok(())
}

fn validate_distance(d: f64) -> Result<()> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("distance d = {d} must be nonnegative and finite")));
    }
    Ok(())
}

/// `ln cosh a` without overflow.
fn ln_cosh(a: f64) -> f64 {
    let a = a.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// Radial quantities at fixed `(t, n, d)`, shared by every route.
struct RadialSetting {
    kernel: RadialHeatKernel,
    t: f64,
    d: f64,
    cosh_d: f64,
    // cosh d - 1 as 2 sinh²(d/2)
    cosh_d_minus_one: f64,
}

impl RadialSetting {
    fn new(t: f64, n: u32, d: f64) -> Result<Self> {
        Self::with_kernel(RadialHeatKernel::new(n)?, t, d)
    }

    fn with_kernel(kernel: RadialHeatKernel, t: f64, d: f64) -> Result<Self> {
        validate_time(t)?;
        validate_distance(d)?;
        let half = (0.5 * d).sinh();
        Ok(Self {
            kernel,
            t,
            d,
            cosh_d: d.cosh(),
            cosh_d_minus_one: 2.0 * half * half,
        })
    }

    /// `x(u) = arccosh(cosh u · cosh d)`.
    fn x_of_u(&self, u: f64) -> f64 {
        if u.abs() > 20.0 {
            // arccosh c = ln 2c - O(c⁻²) with c ≥ cosh 20
            let u = u.abs();
            return u + (-2.0 * u).exp().ln_1p() + ln_cosh(self.d);
        }
        let half = (0.5 * u).sinh();
        // cosh u cosh d - 1, free of cancellation
        let z = 2.0 * half * half * self.cosh_d + self.cosh_d_minus_one;
        (z + (z * (z + 2.0)).sqrt()).ln_1p()
    }

    /// Truncation point of the substituted integral: the `u` at which
    /// `x(u)²/4t = ln(1/abs_tol) + 2|κ|u + 20`.
    fn substituted_u_max(&self, kappa: HalfInteger, cfg: &QuadratureConfig) -> f64 {
        if let Some(u) = cfg.u_max_override {
            return u;
        }
        let t = self.t;
        let slope = kappa.twice().unsigned_abs() as f64;
        let level = (1.0 / cfg.abs_tol).ln() + 20.0;
        // exact root when d = 0; an upper bound on the root otherwise
        let mut u = 2.0 * t * slope + (4.0 * t * t * slope * slope + 4.0 * t * level).sqrt();
        for _ in 0..8 {
            let x = self.x_of_u(u);
            let f = x * x / (4.0 * t) - slope * u - level;
            let dx_du = u.sinh() * self.cosh_d / x.sinh();
            let df = x * dx_du / (2.0 * t) - slope;
            if !(df > 0.0) {
                break;
            }
            let step = f / df;
            u -= step;
            if step.abs() < 1e-10 * u.abs().max(1.0) {
                break;
            }
        }
        u.max(1.0)
    }

    /// `e^{-log_damping} · 2∫_0^∞ q_t(x(u)) cosh(2κu) du`.
    fn substituted_integral(
        &self,
        kappa: HalfInteger,
        log_damping: f64,
        cfg: &QuadratureConfig,
    ) -> Result<f64> {
        let t = self.t;
        let rate = kappa.twice() as f64;
        let u_max = self.substituted_u_max(kappa, cfg);
        let integrand = |u: f64| {
            let x = self.x_of_u(u);
            let exponent = ln_cosh(rate * u) - x * x / (4.0 * t) - log_damping;
            Complex64::new(2.0 * exponent.exp() * self.kernel.reduced(t, x), 0.0)
        };
        let peak = 2.0 * t * rate.abs();
        let breaks: Vec<f64> = if peak > 0.0 && peak < u_max {
            vec![0.0, peak, u_max]
        } else {
            vec![0.0, u_max]
        };
        let r = quadrature::integrate_with_breaks(integrand, &breaks, cfg)?;
        Ok(r.value.re)
    }

    /// `2∫_d^∞ sinh x · N_κ(x, d) · q_t(x) dx` in the variable `x = d + r²`.
    fn direct_integral(&self, kappa: HalfInteger, cfg: &QuadratureConfig) -> Result<f64> {
        let t = self.t;
        let d = self.d;
        let u_max = self.substituted_u_max(kappa, cfg);
        let r_max = (self.x_of_u(u_max) - d).sqrt();
        let degree = special::ChebyshevOrder::from(kappa);
        let integrand = |r: f64| {
            let gap = r * r;
            let x = d + gap;
            // 2r / sqrt(cosh²x - cosh²d), bounded as r → 0
            let jacobian = 2.0 * r / (gap.sinh() * (2.0 * d + gap).sinh()).sqrt();
            let cheb = special::chebyshev_t(degree, x.cosh() / self.cosh_d);
            let growth = (x.sinh() * cheb).ln() - x * x / (4.0 * t);
            Complex64::new(
                2.0 * jacobian * growth.exp() * self.kernel.reduced(t, x),
                0.0,
            )
        };
        let r = quadrature::integrate(integrand, 0.0, r_max, cfg)?;
        Ok(r.value.re)
    }

    /// Envelope `exp((u² - x(u)²)/4t) · |q_t(x(u)) e^{x²/4t}|` of the AdS
    /// integrand; an upper bound for every shift `k`.
    fn ads_envelope(&self, u: f64) -> f64 {
        let x = self.x_of_u(u);
        ((u - x) * (u + x) / (4.0 * self.t)).exp() * self.kernel.reduced(self.t, x).abs()
    }

    fn ads_u_max(&self, cfg: &QuadratureConfig) -> Result<f64> {
        if let Some(u) = cfg.u_max_override {
            return Ok(u);
        }
        let target = cfg.abs_tol * 1e-3;
        let mut previous = self.ads_envelope(0.0);
        let mut u = 0.5;
        while u < 1e4 {
            let current = self.ads_envelope(u);
            if current < target && current <= previous {
                return Ok(u);
            }
            previous = current;
            u += 0.5;
        }
        Err(Error::Numerical(
            "AdS integrand envelope does not decay below the tolerance".into(),
        ))
    }
}

/// Repeated evaluation of the phase-free Maass kernel at a fixed `(t, n)`.
#[derive(Debug, Clone)]
pub struct MaassRadial {
    kernel: RadialHeatKernel,
    t: f64,
}

impl MaassRadial {
    pub fn new(t: f64, n: u32) -> Result<Self> {
        validate_time(t)?;
        Ok(Self {
            kernel: RadialHeatKernel::new(n)?,
            t,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// See [`maass_kernel_radial`].
    pub fn eval(&self, kappa: HalfInteger, d: f64, cfg: &QuadratureConfig) -> Result<f64> {
        RadialSetting::with_kernel(self.kernel.clone(), self.t, d)?
            .substituted_integral(kappa, 0.0, cfg)
    }
}

/// `2∫_0^∞ q_t(x(u)) cosh(2κu) du`: the Maass kernel at distance `d` without
/// its phase factor.
pub fn maass_kernel_radial(
    t: f64,
    n: u32,
    kappa: HalfInteger,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    RadialSetting::new(t, n, d)?.substituted_integral(kappa, 0.0, cfg)
}

/// `v_{t,n,κ}(w, y)` through the substitution `cosh x = cosh u · cosh d`.
pub fn maass_kernel_substituted(q: &MaassKernelQuery, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    let d = q.distance()?;
    let phase = geometry::phase_factor(&q.w, &q.y, q.kappa)?;
    let radial = RadialSetting::new(q.t, q.n, d)?.substituted_integral(q.kappa, 0.0, cfg)?;
    Ok(phase * radial)
}

/// `v_{t,n,κ}(w, y)` by direct quadrature of the `N_κ`-weighted integral.
///
/// Within [`DIRECT_ROUTE_MIN_DISTANCE`] of the diagonal the integrand is
/// singular and the substituted route is used instead.
pub fn maass_kernel_direct(q: &MaassKernelQuery, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    let d = q.distance()?;
    if d < DIRECT_ROUTE_MIN_DISTANCE {
        return maass_kernel_substituted(q, cfg);
    }
    let phase = geometry::phase_factor(&q.w, &q.y, q.kappa)?;
    let radial = RadialSetting::new(q.t, q.n, d)?.direct_integral(q.kappa, cfg)?;
    Ok(phase * radial)
}

/// Radial-only direct route, the counterpart of [`maass_kernel_radial`].
pub fn maass_kernel_radial_direct(
    t: f64,
    n: u32,
    kappa: HalfInteger,
    d: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let setting = RadialSetting::new(t, n, d)?;
    if d < DIRECT_ROUTE_MIN_DISTANCE {
        return setting.substituted_integral(kappa, 0.0, cfg);
    }
    setting.direct_integral(kappa, cfg)
}

/// The subelliptic kernel `Σ_k v_{t,n,k/2}(w,y) e^{-ikθ} e^{-tk²}`.
pub fn ads_kernel_series(
    q: &AdsKernelQuery,
    s_cfg: &SeriesConfig,
    q_cfg: &QuadratureConfig,
) -> Result<Complex64> {
    Ok(ads_kernel_series_detailed(q, s_cfg, q_cfg)?.value)
}

/// [`ads_kernel_series`] with its truncation data.
///
/// Each damped mode `e^{-tk²} v_{t,n,k/2}` is integrated with the damping
/// folded into the exponent, since `v_{t,n,k/2}` alone grows like `e^{tk²}`.
/// Modes decay only geometrically (roughly like `e^{-2nt|k|}`), so the sum
/// runs past the Gaussian estimate until the observed tail is below
/// `eps_tail`.
pub fn ads_kernel_series_detailed(
    q: &AdsKernelQuery,
    s_cfg: &SeriesConfig,
    q_cfg: &QuadratureConfig,
) -> Result<SeriesSum> {
    s_cfg.validate()?;
    q_cfg.validate()?;
    let d = geometry::hyperbolic_distance(&q.w, &q.y)?;
    let arg = (Complex64::new(1.0, 0.0) - geometry::hermitian_inner(&q.w, &q.y)?).arg();
    let angle = q.theta.radians() + arg;
    let setting = RadialSetting::new(q.t, q.n, d)?;
    let t = q.t;

    let mode = |k: u32| -> Result<f64> {
        setting
            .substituted_integral(HalfInteger::from_twice(k as i64), t * (k as f64).powi(2), q_cfg)
            .map_err(|e| e.with_mode(k as i64))
    };

    let m0 = mode(0)?;
    let mut value = Complex64::new(m0, 0.0);
    let add_pair = |value: &mut Complex64, k: u32, m: f64| {
        let phase = Complex64::from_polar(1.0, -(k as f64) * angle);
        *value += phase * m + phase.conj() * m;
    };

    if let Some(k_max) = s_cfg.k_max_override {
        for k in 1..=k_max {
            add_pair(&mut value, k, mode(k)?);
        }
        return Ok(SeriesSum {
            value,
            k_max,
            tail_estimate: 0.0,
        });
    }

    let c = m0.abs() + 1.0;
    let k_floor = ((c / s_cfg.eps_tail).ln().max(0.0) / t).sqrt().ceil() as u32 + 2;
    let mut previous = m0.abs();
    let mut k = 1;
    loop {
        let m = mode(k)?;
        add_pair(&mut value, k, m);
        let current = m.abs();
        if k >= k_floor && current < previous {
            let ratio = current / previous;
            let tail = 2.0 * current * ratio / (1.0 - ratio);
            if current < s_cfg.eps_tail && tail < s_cfg.eps_tail {
                return Ok(SeriesSum {
                    value,
                    k_max: k,
                    tail_estimate: tail,
                });
            }
        }
        if k >= MAX_FOURIER_MODES {
            return Err(Error::Convergence {
                value: value.norm(),
                error_estimate: current,
                evaluations: k as usize,
                mode: Some(k as i64),
            });
        }
        previous = current;
        k += 1;
    }
}

/// The Gaussian-integral form of the subelliptic kernel at the origin,
/// `(4πt)^{-1/2} Σ_k ∫_ℝ exp((u - iθ - 2ikπ)²/4t) q_t(x(u)) du` with
/// `x(u) = arccosh(cosh u · cosh d)`.
///
/// This equals `ads_kernel_series / 2π` at `w = 0`, `d = d(0, y)`.
pub fn ads_kernel_integral(
    t: f64,
    n: u32,
    d: f64,
    theta: FiberAngle,
    s_cfg: &SeriesConfig,
    q_cfg: &QuadratureConfig,
) -> Result<Complex64> {
    Ok(ads_kernel_integral_detailed(t, n, d, theta, s_cfg, q_cfg)?.value)
}

pub fn ads_kernel_integral_detailed(
    t: f64,
    n: u32,
    d: f64,
    theta: FiberAngle,
    s_cfg: &SeriesConfig,
    q_cfg: &QuadratureConfig,
) -> Result<SeriesSum> {
    s_cfg.validate()?;
    q_cfg.validate()?;
    let setting = RadialSetting::new(t, n, d)?;
    let u_max = setting.ads_u_max(q_cfg)?;
    let breaks = [-u_max, 0.0, u_max];

    let (mass, _) = quadrature::integrate_real(|u| setting.ads_envelope(u), -u_max, u_max, q_cfg)?;
    // shifts |k| > K have |θ + 2kπ| ≥ 2Kπ for θ ∈ [0, 2π)
    let k_max = match s_cfg.k_max_override {
        Some(k) => k,
        None => {
            let level = (4.0 * mass.max(f64::MIN_POSITIVE) / s_cfg.eps_tail).ln().max(0.0);
            ((4.0 * t * level).sqrt() / TAU).ceil().max(1.0) as u32
        }
    };
    let tail_estimate = if s_cfg.k_max_override.is_some() {
        0.0
    } else {
        4.0 * mass * (-(TAU * k_max as f64).powi(2) / (4.0 * t)).exp()
    };

    let theta = theta.radians();
    let mut value = Complex64::new(0.0, 0.0);
    for k in -(k_max as i64)..=(k_max as i64) {
        let shift = theta + TAU * k as f64;
        let integrand = |u: f64| {
            let x = setting.x_of_u(u);
            let exponent = Complex64::new(u - x, 0.0) * (u + x) / (4.0 * t)
                - Complex64::new(0.0, u * shift / (2.0 * t));
            exponent.exp() * setting.kernel.reduced(t, x)
        };
        let r = quadrature::integrate_with_breaks(integrand, &breaks, q_cfg)
            .map_err(|e| e.with_mode(k))?;
        value += r.value * (-shift * shift / (4.0 * t)).exp();
    }
    Ok(SeriesSum {
        value: value / (4.0 * PI * t).sqrt(),
        k_max,
        tail_estimate,
    })
}

/// `Σ_{|k|≤K} exp((u - iθ - 2ikπ)²/4t)`.
pub fn theta_identity_lhs(t: f64, u: f64, theta: f64, k_max: u32) -> Complex64 {
    let k_max = k_max as i64;
    (-k_max..=k_max)
        .map(|k| {
            let z = Complex64::new(u, -theta - TAU * k as f64);
            (z * z / (4.0 * t)).exp()
        })
        .sum()
}

/// `√(t/π) · Σ_{|k|≤K} e^{-tk²} e^{k(u - iθ)}`.
pub fn theta_identity_rhs(t: f64, u: f64, theta: f64, k_max: u32) -> Complex64 {
    let k_max = k_max as i64;
    let s: Complex64 = (-k_max..=k_max)
        .map(|k| {
            let kf = k as f64;
            Complex64::new(-t * kf * kf + kf * u, -kf * theta).exp()
        })
        .sum();
    s * (t / PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn x_of_u_is_accurate() {
        let s = RadialSetting::new(1.0, 1, 0.5).unwrap();
        for u in [0.0f64, 1e-9, 0.3, 4.0, 30.0] {
            let naive = (u.cosh() * 0.5f64.cosh()).acosh();
            assert!((s.x_of_u(u) - naive).abs() < 1e-13 * naive.max(1.0));
        }
        let s0 = RadialSetting::new(1.0, 1, 0.0).unwrap();
        assert!((s0.x_of_u(1e-7) - 1e-7).abs() < 1e-21);
    }

    #[test]
    fn ln_cosh_is_stable() {
        assert!((ln_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-16);
        assert!((ln_cosh(-2.0) - 2.0f64.cosh().ln()).abs() < 1e-15);
        assert!((ln_cosh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
    }

    #[test]
    fn substituted_regression_value() {
        // 2∫_0^∞ q_1(u) du on H³, cross-checked with an independent
        // 30-digit evaluation
        let zero = BallPoint::origin(1).unwrap();
        let q = MaassKernelQuery::new(1.0, 1, HalfInteger::ZERO, zero.clone(), zero).unwrap();
        let v = maass_kernel_substituted(&q, &cfg()).unwrap();
        assert!((v.re - 0.023_122_264_071_497_805).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn conjugate_under_kappa_sign() {
        let w = BallPoint::new(vec![c(0.2, -0.3)]).unwrap();
        let y = BallPoint::new(vec![c(-0.1, 0.4)]).unwrap();
        for twice in [1, 2, 3] {
            let k = HalfInteger::from_twice(twice);
            let a = maass_kernel_substituted(
                &MaassKernelQuery::new(0.8, 1, k, w.clone(), y.clone()).unwrap(),
                &cfg(),
            )
            .unwrap();
            let b = maass_kernel_substituted(
                &MaassKernelQuery::new(0.8, 1, -k, w.clone(), y.clone()).unwrap(),
                &cfg(),
            )
            .unwrap();
            assert!((a - b.conj()).norm() < 1e-15 * a.norm());
        }
    }

    #[test]
    fn routes_agree_on_examples() {
        let zero = BallPoint::origin(1).unwrap();
        let y = BallPoint::on_real_axis(1, 0.4).unwrap();
        let q = MaassKernelQuery::new(0.8, 1, HalfInteger::from_twice(1), zero, y).unwrap();
        let a = maass_kernel_substituted(&q, &cfg()).unwrap();
        let b = maass_kernel_direct(&q, &cfg()).unwrap();
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");

        for (t, n, twice, d) in [(1.0, 1, 0, 0.5), (0.6, 2, 2, 1.0)] {
            let k = HalfInteger::from_twice(twice);
            let a = maass_kernel_radial(t, n, k, d, &cfg()).unwrap();
            let b = maass_kernel_radial_direct(t, n, k, d, &cfg()).unwrap();
            assert!((a - b).abs() < 1e-8, "t={t} n={n} κ={k} d={d}: {a} vs {b}");
        }
    }

    #[test]
    fn direct_route_is_real_at_kappa_zero() {
        let w = BallPoint::new(vec![c(0.3, 0.1), c(-0.2, 0.2)]).unwrap();
        let y = BallPoint::new(vec![c(-0.4, 0.05), c(0.1, -0.3)]).unwrap();
        let q = MaassKernelQuery::new(1.0, 2, HalfInteger::ZERO, w, y).unwrap();
        let v = maass_kernel_direct(&q, &cfg()).unwrap();
        assert!(v.im.abs() <= 1e-12);
        assert!(v.re > 0.0);
    }

    #[test]
    fn direct_route_delegates_on_diagonal() {
        let w = BallPoint::new(vec![c(0.3, 0.1)]).unwrap();
        let q = MaassKernelQuery::new(1.0, 1, HalfInteger::from_twice(2), w.clone(), w).unwrap();
        let a = maass_kernel_direct(&q, &cfg()).unwrap();
        let b = maass_kernel_substituted(&q, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn query_validation() {
        let w = BallPoint::origin(1).unwrap();
        let y = BallPoint::origin(2).unwrap();
        assert!(MaassKernelQuery::new(1.0, 1, HalfInteger::ZERO, w.clone(), y).is_err());
        assert!(MaassKernelQuery::new(-1.0, 1, HalfInteger::ZERO, w.clone(), w.clone()).is_err());
        assert!(MaassKernelQuery::new(1.0, 0, HalfInteger::ZERO, w.clone(), w).is_err());
        assert!(SeriesConfig {
            eps_tail: 2.0,
            k_max_override: None
        }
        .validate()
        .is_err());
    }

    #[test]
    fn series_regression_value() {
        let zero = BallPoint::origin(1).unwrap();
        let q = AdsKernelQuery::new(1.0, 1, zero.clone(), zero, FiberAngle::new(0.0).unwrap())
            .unwrap();
        let s = ads_kernel_series_detailed(&q, &SeriesConfig::default(), &cfg()).unwrap();
        // independent 30-digit evaluation with |k| ≤ 40
        assert!((s.value.re - 0.072_232_960_907_639_518).abs() < 1e-12, "{}", s.value);
        assert!(s.value.im.abs() < 1e-15);
        assert!(s.k_max > 10);
    }

    #[test]
    fn series_collapses_for_large_time() {
        let zero = BallPoint::origin(1).unwrap();
        let y = BallPoint::on_real_axis(1, 0.3).unwrap();
        let q = AdsKernelQuery::new(50.0, 1, zero, y, FiberAngle::new(0.4).unwrap()).unwrap();
        let total = ads_kernel_series(&q, &SeriesConfig::default(), &cfg()).unwrap();
        let v0 = maass_kernel_radial(50.0, 1, HalfInteger::ZERO, 0.3f64.atanh(), &cfg()).unwrap();
        assert!((total.re - v0).abs() <= 1e-12 * v0, "{total} vs {v0}");
    }

    #[test]
    fn series_and_integral_routes_agree() {
        let (t, d, theta) = (1.0, 0.5, 0.7);
        let zero = BallPoint::origin(1).unwrap();
        let y = BallPoint::at_distance_from_origin(1, d).unwrap();
        let angle = FiberAngle::new(theta).unwrap();
        let q = AdsKernelQuery::new(t, 1, zero, y, angle).unwrap();
        let series = ads_kernel_series(&q, &SeriesConfig::default(), &cfg()).unwrap();
        let integral =
            ads_kernel_integral(t, 1, d, angle, &SeriesConfig::default(), &cfg()).unwrap();
        assert!((integral - series / TAU).norm() <= 1e-6, "{integral} vs {}", series / TAU);
        assert!((integral - series / TAU).norm() <= 1e-10);
    }

    #[test]
    fn integral_route_is_real_and_periodic() {
        let s_cfg = SeriesConfig::default();
        let v = ads_kernel_integral(1.0, 1, 0.0, FiberAngle::new(0.0).unwrap(), &s_cfg, &cfg())
            .unwrap();
        assert!(v.re > 0.0);
        assert!(v.im.abs() <= 1e-10);
        let a = ads_kernel_integral(1.0, 1, 0.4, FiberAngle::new(1.1).unwrap(), &s_cfg, &cfg())
            .unwrap();
        let b = ads_kernel_integral(1.0, 1, 0.4, FiberAngle::new(1.1 + TAU).unwrap(), &s_cfg, &cfg())
            .unwrap();
        assert!((a - b).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn theta_identity_examples() {
        let lhs = theta_identity_lhs(1.0, 0.0, 0.0, 10);
        let rhs = theta_identity_rhs(1.0, 0.0, 0.0, 10);
        let direct_lhs: f64 = (-10..=10).map(|k: i32| (-(k as f64 * PI).powi(2)).exp()).sum();
        let direct_rhs: f64 =
            (-10..=10).map(|k: i32| (-(k as f64).powi(2)).exp()).sum::<f64>() / PI.sqrt();
        assert!((lhs.re - direct_lhs).abs() < 1e-15 && lhs.im.abs() < 1e-15);
        assert!((rhs.re - direct_rhs).abs() < 1e-15);
        assert!((lhs - rhs).norm() <= 1e-12);

        let lhs = theta_identity_lhs(0.7, 0.5, 1.0, 12);
        let rhs = theta_identity_rhs(0.7, 0.5, 1.0, 12);
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());

        let a = theta_identity_lhs(0.9, 0.2, 0.4, 15);
        let b = theta_identity_lhs(0.9, 0.2, 0.4 + TAU, 15);
        assert!((a - b).norm() <= 1e-12 * a.norm());
    }
}

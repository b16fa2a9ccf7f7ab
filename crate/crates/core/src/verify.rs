//! Independent checks of the kernels: finite-difference heat-equation
//! residuals, total mass, the semigroup property, and the wave-to-heat
//! subordination formula on small symmetric matrices.
//!
//! Every check returns a [`ResidualReport`]; [`run_suite`] pairs checks with
//! their pass thresholds.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BallPoint, FiberAngle, HalfInteger};
use crate::kernels::{self, AdsKernelQuery, MaassRadial, SeriesConfig};
use crate::quadrature::{self, QuadratureConfig};
use crate::radial_heat::{self, RadialHeatKernel};
use crate::special::{self, ChebyshevOrder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub grid_spec: String,
    pub config_echo: BTreeMap<String, f64>,
}

impl ResidualReport {
    fn new(abs: f64, rel: f64, grid_spec: impl Into<String>) -> Result<Self> {
        if !(abs >= 0.0 && abs.is_finite() && rel >= 0.0 && rel.is_finite()) {
            return Err(Error::Numerical(format!(
                "residuals must be finite and nonnegative, got {abs} / {rel}"
            )));
        }
        Ok(Self {
            max_abs_residual: abs,
            max_rel_residual: rel,
            grid_spec: grid_spec.into(),
            config_echo: BTreeMap::new(),
        })
    }

    fn echo(mut self, key: &str, value: f64) -> Self {
        self.config_echo.insert(key.to_string(), value);
        self
    }

    fn echo_quadrature(self, cfg: &QuadratureConfig) -> Self {
        self.echo("abs_tol", cfg.abs_tol)
            .echo("rel_tol", cfg.rel_tol)
            .echo("max_nodes", cfg.max_nodes as f64)
    }
}

/// Sample points and stencils for the Maass heat-equation check on the unit
/// disc (`n = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscGrid {
    /// Stencils stay inside `|w| ≤ radius`.
    pub radius: f64,
    /// Lattice spacing of the sample points.
    pub spacing: f64,
    /// Step of the spatial central differences.
    pub stencil_step: f64,
    /// Step of the time central difference.
    pub time_step: f64,
    /// Second argument `y` of the kernel.
    pub base_point: Complex64,
    /// Relative residual the grid has to resolve.
    pub tolerance: f64,
}

impl Default for DiscGrid {
    fn default() -> Self {
        Self {
            radius: 0.8,
            spacing: 0.05,
            stencil_step: 0.01,
            time_step: 1e-3,
            base_point: Complex64::new(0.35, 0.0),
            tolerance: 5e-3,
        }
    }
}

impl DiscGrid {
    /// Largest stencil step that resolves the Bergman length scale
    /// `1 - radius²` at the grid edge to within `tolerance`; the `κ²` term of
    /// `D_κ` shrinks it by `1 + κ²`.
    pub fn suggested_stencil_step(&self, kappa: HalfInteger) -> f64 {
        let k = kappa.value();
        (1.0 - self.radius * self.radius) * self.tolerance.sqrt() / (1.0 + k * k)
    }

    fn validate(&self, kappa: HalfInteger) -> Result<()> {
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(Error::Configuration(format!(
                "disc radius {} must lie in (0, 1)",
                self.radius
            )));
        }
        if !(self.spacing > 0.0 && self.stencil_step > 0.0 && self.time_step > 0.0) {
            return Err(Error::Configuration("grid steps must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Configuration("tolerance must be positive".into()));
        }
        if self.base_point.norm() >= 1.0 {
            return Err(Error::Configuration("base point must lie in the unit disc".into()));
        }
        let suggested = self.suggested_stencil_step(kappa);
        if self.stencil_step > suggested {
            return Err(Error::Configuration(format!(
                "stencil step {} too coarse for tolerance {:e} at radius {}; use at most {:.4}",
                self.stencil_step, self.tolerance, self.radius, suggested
            )));
        }
        Ok(())
    }

    /// Lattice points with the whole stencil inside the disc.
    pub fn points(&self) -> Vec<Complex64> {
        let reach = self.radius - self.stencil_step;
        let steps = (reach / self.spacing).floor() as i64;
        let mut out = Vec::new();
        for i in -steps..=steps {
            for j in -steps..=steps {
                let w = Complex64::new(i as f64 * self.spacing, j as f64 * self.spacing);
                if w.norm() <= reach {
                    out.push(w);
                }
            }
        }
        out
    }
}

/// `D_κ f(w)` for `n = 1` with second-order central differences, using
/// `∂ = (∂_x - i∂_y)/2`, `∂̄ = (∂_x + i∂_y)/2` and `4∂∂̄ = ∂_x² + ∂_y²`:
///
/// `D_κ = 4(1 - |w|²) { (1 - |w|²) ∂∂̄ + κ(w∂ - w̄∂̄) + κ² }`.
pub fn discrete_maass_operator<F>(f: F, w: Complex64, kappa: HalfInteger, h: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let ih = Complex64::new(0.0, h);
    let center = f(w);
    let (east, west) = (f(w + h), f(w - h));
    let (north, south) = (f(w + ih), f(w - ih));
    let fx = (east - west) / (2.0 * h);
    let fy = (north - south) / (2.0 * h);
    let laplacian = (east + west + north + south - center * 4.0) / (h * h);
    let i = Complex64::new(0.0, 1.0);
    let del = (fx - i * fy) * 0.5;
    let del_bar = (fx + i * fy) * 0.5;
    let k = kappa.value();
    let a = 1.0 - w.norm_sqr();
    (laplacian * (a / 4.0) + (w * del - w.conj() * del_bar) * k + center * (k * k)) * (4.0 * a)
}

/// Finite-difference residual of `∂_t v = D_κ v` for the `n = 1` Maass kernel
/// `v_{t,1,κ}(·, y)` on a lattice in the disc.
pub fn check_maass_pde(
    t: f64,
    kappa: HalfInteger,
    grid: &DiscGrid,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    grid.validate(kappa)?;
    cfg.validate()?;
    if !(t > grid.time_step) {
        return Err(Error::Configuration(format!(
            "t = {t} must exceed the time step {}",
            grid.time_step
        )));
    }
    let y = BallPoint::new(vec![grid.base_point])?;
    let (dt, h) = (grid.time_step, grid.stencil_step);
    let evaluators = [
        MaassRadial::new(t - dt, 1)?,
        MaassRadial::new(t, 1)?,
        MaassRadial::new(t + dt, 1)?,
    ];
    let kernel = |which: usize, w: Complex64| -> Result<Complex64> {
        let wp = BallPoint::new(vec![w])?;
        let d = geometry::hyperbolic_distance(&wp, &y)?;
        let phase = geometry::phase_factor(&wp, &y, kappa)?;
        Ok(phase * evaluators[which].eval(kappa, d, cfg)?)
    };

    let points = grid.points();
    let rows: Vec<(f64, f64)> = points
        .par_iter()
        .map(|&w| -> Result<(f64, f64)> {
            let time_derivative = (kernel(2, w)? - kernel(0, w)?) / (2.0 * dt);
            // stencil values are finite by construction; errors surface below
            let failure = std::sync::Mutex::new(None);
            let space = discrete_maass_operator(
                |z| {
                    kernel(1, z).unwrap_or_else(|e| {
                        *failure.lock().unwrap() = Some(e);
                        Complex64::new(f64::NAN, 0.0)
                    })
                },
                w,
                kappa,
                h,
            );
            if let Some(e) = failure.into_inner().unwrap() {
                return Err(e);
            }
            Ok(((time_derivative - space).norm(), time_derivative.norm()))
        })
        .collect::<Result<_>>()?;

    let max_abs = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let scale = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(ResidualReport::new(
        max_abs,
        max_abs / scale,
        format!(
            "{} lattice points, spacing {}, |w| <= {}",
            points.len(),
            grid.spacing,
            grid.radius
        ),
    )?
    .echo("t", t)
    .echo("kappa", kappa.value())
    .echo("stencil_step", h)
    .echo("time_step", dt)
    .echo("base_re", grid.base_point.re)
    .echo("base_im", grid.base_point.im)
    .echo_quadrature(cfg))
}

/// Tensor grid and step for the radial heat-equation check on `H^{2n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub t_points: usize,
    pub x_points: usize,
    /// Common step of the central differences in `t` and `x`.
    pub step: f64,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            t_range: (0.3, 2.0),
            x_range: (0.2, 4.0),
            t_points: 12,
            x_points: 39,
            step: 1e-3,
        }
    }
}

fn linspace(range: (f64, f64), count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![range.0];
    }
    (0..count)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Residual of `∂_t q = ∂_x² q + 2n coth x ∂_x q` (radial Laplacian of
/// `H^{2n+1}`), relative to the largest `|∂_t q|` on the grid.
pub fn check_radial_heat_pde(n: u32, grid: &RadialGrid) -> Result<ResidualReport> {
    if grid.x_range.0 < 0.2 || grid.x_range.1 < grid.x_range.0 {
        return Err(Error::Configuration(format!(
            "x range {:?} must start at or above 0.2",
            grid.x_range
        )));
    }
    let h = grid.step;
    if !(h > 0.0) || grid.t_range.0 - h <= 0.0 || grid.t_range.1 < grid.t_range.0 {
        return Err(Error::Configuration(format!(
            "t range {:?} and step {h} must keep t - step positive",
            grid.t_range
        )));
    }
    let kernel = RadialHeatKernel::new(n)?;
    let nf = n as f64;
    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &t in &linspace(grid.t_range, grid.t_points) {
        for &x in &linspace(grid.x_range, grid.x_points) {
            let q = |t: f64, x: f64| kernel.eval(t, x);
            let dt = (q(t + h, x) - q(t - h, x)) / (2.0 * h);
            let dx = (q(t, x + h) - q(t, x - h)) / (2.0 * h);
            let dxx = (q(t, x + h) - 2.0 * q(t, x) + q(t, x - h)) / (h * h);
            let residual = dt - (dxx + 2.0 * nf / x.tanh() * dx);
            max_abs = max_abs.max(residual.abs());
            scale = scale.max(dt.abs());
        }
    }
    Ok(ResidualReport::new(
        max_abs,
        max_abs / scale,
        format!(
            "t in [{}, {}] x {} points, x in [{}, {}] x {} points",
            grid.t_range.0, grid.t_range.1, grid.t_points, grid.x_range.0, grid.x_range.1, grid.x_points
        ),
    )?
    .echo("n", nf)
    .echo("step", h))
}

/// `∫_0^∞ q_t(x) · |S^{2n}| · sinh^{2n} x dx - 1`.
pub fn check_radial_mass(t: f64, n: u32, cfg: &QuadratureConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let kernel = RadialHeatKernel::new(n)?;
    let nf = n as f64;
    // the Gaussian beats the volume growth e^{2nx} beyond this point
    let x_max = 4.0 * nf * t + (16.0 * nf * nf * t * t + 4.0 * t * 40.0).sqrt();
    let area = radial_heat::unit_sphere_area_odd(n);
    let (mass, _) = quadrature::integrate_real(
        |x| kernel.eval(t, x) * area * x.sinh().powi(2 * n as i32),
        0.0,
        x_max,
        cfg,
    )?;
    let deviation = (mass - 1.0).abs();
    Ok(ResidualReport::new(deviation, deviation, format!("x in [0, {x_max:.3}]"))?
        .echo("t", t)
        .echo("n", nf)
        .echo("mass", mass)
        .echo_quadrature(cfg))
}

/// A real symmetric negative-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperatorSample {
    matrix: DMatrix<f64>,
}

impl SymmetricOperatorSample {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("operator sample must be square and non-empty".into()));
        }
        let asymmetry = (&matrix - matrix.transpose()).abs().max();
        if asymmetry > 1e-14 {
            return Err(Error::InvalidArgument(format!(
                "operator sample is not symmetric (defect {asymmetry:e})"
            )));
        }
        let eig = symmetric_eigen(&matrix)?;
        let top = eig.eigenvalues.max();
        if top > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "operator sample has positive eigenvalue {top:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `-AᵀA` with the entries of `A` uniform in `[-1, 1]`, seeded.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..=1.0));
        let mut l = -(a.transpose() * &a);
        // exact symmetry
        l = (&l + l.transpose()) * 0.5;
        Self::new(l)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

fn symmetric_eigen(m: &DMatrix<f64>) -> Result<nalgebra::SymmetricEigen<f64, nalgebra::Dyn>> {
    m.clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigendecomposition did not converge".into()))
}

fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    let sym = (m + m.transpose()) * 0.5;
    Ok(symmetric_eigen(&sym)?.eigenvalues.amax())
}

/// `U diag(g(√-λ)) Uᵀ` for the eigendecomposition `L = U diag(λ) Uᵀ`.
fn wave_average<G>(l: &SymmetricOperatorSample, weight: G) -> Result<DMatrix<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    let eig = symmetric_eigen(l.matrix())?;
    let values = eig
        .eigenvalues
        .iter()
        .map(|&lambda| weight((-lambda).max(0.0).sqrt()))
        .collect::<Result<Vec<_>>>()?;
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values));
    Ok(&eig.eigenvectors * diag * eig.eigenvectors.transpose())
}

/// `(4πt)^{-1/2} ∫ e^{-x²/4t} cos(x ω) dx` by adaptive quadrature.
fn gaussian_cosine(t: f64, omega: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let half_width = (4.0 * t * ((1.0 / cfg.abs_tol).ln() + 10.0)).sqrt();
    let (v, _) = quadrature::integrate_real(
        |x| (-x * x / (4.0 * t)).exp() * (x * omega).cos(),
        -half_width,
        half_width,
        cfg,
    )?;
    Ok(v / (4.0 * PI * t).sqrt())
}

fn subordination_report(
    l: &SymmetricOperatorSample,
    t: f64,
    rhs: DMatrix<f64>,
    grid_spec: String,
) -> Result<ResidualReport> {
    // scaling-and-squaring Padé exponential, independent of the eigen route
    let oracle = (l.matrix() * t).exp();
    let discrepancy = spectral_norm(&(rhs - &oracle))?;
    let scale = spectral_norm(&oracle)?;
    Ok(ResidualReport::new(discrepancy, discrepancy / scale, grid_spec)?
        .echo("t", t)
        .echo("dim", l.dim() as f64))
}

/// `e^{tL}` against `(4πt)^{-1/2} ∫ e^{-x²/4t} cos(x√-L) dx`, compared in
/// operator norm.
pub fn check_subordination(
    l: &SymmetricOperatorSample,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time t = {t} must be positive")));
    }
    let rhs = wave_average(l, |omega| gaussian_cosine(t, omega, cfg))?;
    Ok(subordination_report(l, t, rhs, "adaptive Gauss-Kronrod in x".into())?.echo_quadrature(cfg))
}

/// As [`check_subordination`] with a fixed `nodes`-point Gauss–Legendre rule
/// on `|x| ≤ √(4t·40)`.
pub fn check_subordination_fixed(
    l: &SymmetricOperatorSample,
    t: f64,
    nodes: usize,
) -> Result<ResidualReport> {
    if !(t > 0.0) || nodes == 0 {
        return Err(Error::Domain("need t > 0 and at least one node".into()));
    }
    let half_width = (4.0 * t * 40.0).sqrt();
    let (xs, ws) = quadrature::gauss_legendre_on(nodes, -half_width, half_width);
    let rhs = wave_average(l, |omega| {
        let s: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(x, w)| w * (-x * x / (4.0 * t)).exp() * (x * omega).cos())
            .sum();
        Ok(s / (4.0 * PI * t).sqrt())
    })?;
    subordination_report(l, t, rhs, format!("{nodes}-point Gauss-Legendre"))
}

/// The formula exactly as displayed, weight `e^{-x²/4}` with `(4πt)^{-1/2}`
/// in front, which coincides with the corrected weight at `t = 1` only.
pub fn subordination_as_displayed(
    l: &SymmetricOperatorSample,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    wave_average(l, |omega| {
        let gaussian_unit = gaussian_cosine(1.0, omega, cfg)? * (4.0 * PI).sqrt();
        Ok(gaussian_unit / (4.0 * PI * t).sqrt())
    })
}

/// Tensor Gauss–Legendre grid in geodesic polar coordinates `(ρ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupConfig {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 200,
            angular_nodes: 128,
        }
    }
}

/// Geodesic radius beyond which the `n`-dimensional Bergman volume
/// (`∝ e^{2nρ}`) times a heat kernel at time `t` is below `e^{-level}`.
fn radial_cutoff(t: f64, n: u32, level: f64) -> f64 {
    let nf = n as f64;
    4.0 * nf * t + (16.0 * nf * nf * t * t + 4.0 * t * level).sqrt()
}

/// `∫ v_{t,1,0}(0,y) v_{s,1,0}(y,z) dvol(y)` against `v_{t+s,1,0}(0,z)`.
pub fn check_semigroup_k0(
    t: f64,
    s: f64,
    z: &BallPoint,
    grid: &SemigroupConfig,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    cfg.validate()?;
    if z.dim() != 1 {
        return Err(Error::InvalidArgument("the semigroup check runs on the disc (n = 1)".into()));
    }
    if z.norm_sqr().sqrt() > 0.6 {
        return Err(Error::Domain("the semigroup check needs |z| <= 0.6".into()));
    }
    if grid.radial_nodes == 0 || grid.angular_nodes == 0 {
        return Err(Error::Configuration("semigroup grid needs nodes".into()));
    }
    let (first, second, total) = (
        MaassRadial::new(t, 1)?,
        MaassRadial::new(s, 1)?,
        MaassRadial::new(t + s, 1)?,
    );
    let k0 = HalfInteger::ZERO;
    let rho_max = radial_cutoff(t, 1, 35.0);
    let (rhos, rho_w) = quadrature::gauss_legendre_on(grid.radial_nodes, 0.0, rho_max);
    let (phis, phi_w) = quadrature::gauss_legendre_on(grid.angular_nodes, 0.0, TAU);
    let zc = z.coords()[0];

    let convolution: f64 = rhos
        .par_iter()
        .zip(rho_w.par_iter())
        .map(|(&rho, &wr)| -> Result<f64> {
            let outer = first.eval(k0, rho, cfg)?;
            let jacobian = 0.5 * (2.0 * rho).sinh();
            let r = rho.tanh();
            let mut ring = 0.0;
            for (&phi, &wp) in phis.iter().zip(&phi_w) {
                let y = Complex64::from_polar(r, phi);
                let d = if zc == Complex64::new(0.0, 0.0) {
                    rho
                } else {
                    geometry::hyperbolic_distance(&BallPoint::new(vec![y])?, z)?
                };
                ring += wp * second.eval(k0, d, cfg)?;
            }
            Ok(wr * jacobian * outer * ring)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();

    let d_total = geometry::hyperbolic_distance(&BallPoint::origin(1)?, z)?;
    let direct = total.eval(k0, d_total, cfg)?;
    let deviation = (convolution - direct).abs();
    Ok(ResidualReport::new(
        deviation,
        deviation / direct.abs(),
        format!(
            "{} x {} Gauss-Legendre nodes on rho in [0, {rho_max:.3}], phi in [0, 2pi]",
            grid.radial_nodes, grid.angular_nodes
        ),
    )?
    .echo("t", t)
    .echo("s", s)
    .echo("z_re", zc.re)
    .echo("z_im", zc.im)
    .echo("convolution", convolution)
    .echo("direct", direct)
    .echo_quadrature(cfg))
}

/// Bergman volume density in geodesic polar coordinates:
/// `|S^{2n-1}| sinh^{2n-1} ρ cosh ρ` with `|y| = tanh ρ`.
pub fn bergman_radial_density(n: u32, rho: f64) -> f64 {
    // |S^{2n-1}| = 2π^n / (n-1)!
    let mut factorial = 1.0;
    for k in 1..n {
        factorial *= k as f64;
    }
    2.0 * PI.powi(n as i32) / factorial * rho.sinh().powi(2 * n as i32 - 1) * rho.cosh()
}

/// `∫ v_{t,n,0}(0,y) dvol(y) - 1` by radial reduction.
pub fn check_normalization_k0(t: f64, n: u32, cfg: &QuadratureConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let radial = MaassRadial::new(t, n)?;
    let rho_max = radial_cutoff(t, n, 40.0);
    let failure = std::sync::Mutex::new(None);
    let integrand = |rho: f64| match radial.eval(HalfInteger::ZERO, rho, cfg) {
        Ok(v) => v * bergman_radial_density(n, rho),
        Err(e) => {
            *failure.lock().unwrap() = Some(e);
            f64::NAN
        }
    };
    let outer = QuadratureConfig {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        ..*cfg
    };
    let result = quadrature::integrate_real(integrand, 0.0, rho_max, &outer);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let (mass, _) = result?;
    let deviation = (mass - 1.0).abs();
    Ok(ResidualReport::new(deviation, deviation, format!("rho in [0, {rho_max:.3}]"))?
        .echo("t", t)
        .echo("n", n as f64)
        .echo("mass", mass)
        .echo_quadrature(cfg))
}

/// `max |₂F₁(-m, m; ½; (1 - cosh u)/2) - cosh(mu)| / max(1, cosh(mu))` over
/// `m ≤ max_order` and `u_points` points of `[0, 5]`.
pub fn check_hypergeometric_identity(max_order: u32, u_points: usize) -> Result<ResidualReport> {
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for m in 0..=max_order {
        for &u in &linspace((0.0, 5.0), u_points) {
            let exact = (m as f64 * u).cosh();
            let got = special::gauss_2f1_terminating(ChebyshevOrder(m), (1.0 - u.cosh()) / 2.0);
            worst_abs = worst_abs.max((got - exact).abs());
            worst_rel = worst_rel.max((got - exact).abs() / exact.max(1.0));
        }
    }
    ResidualReport::new(
        worst_abs,
        worst_rel,
        format!("m in 0..={max_order}, u in [0, 5] x {u_points} points"),
    )
}

/// Both sides of the theta identity on a sample of `(t, u, θ)`.
pub fn check_theta_identity(samples: &[(f64, f64, f64)], k_max: u32) -> Result<ResidualReport> {
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for &(t, u, theta) in samples {
        let lhs = kernels::theta_identity_lhs(t, u, theta, k_max);
        let rhs = kernels::theta_identity_rhs(t, u, theta, k_max);
        worst_abs = worst_abs.max((lhs - rhs).norm());
        worst_rel = worst_rel.max((lhs - rhs).norm() / rhs.norm());
    }
    ResidualReport::new(worst_abs, worst_rel, format!("{} samples, K = {k_max}", samples.len()))
}

/// The default `3 × 3 × 3` theta-identity sample.
pub fn theta_samples() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for t in [0.3, 1.0, 2.5] {
        for u in [-1.5, 0.0, 2.0] {
            for theta in [0.0, 1.0, 3.0] {
                out.push((t, u, theta));
            }
        }
    }
    out
}

/// `max |direct - substituted| / max(1e-8, 1e-6 |substituted|)` over a grid
/// of `(t, κ, d, n)`; a value ≤ 1 means every point is within tolerance.
pub fn check_maass_routes(
    times: &[f64],
    kappas: &[HalfInteger],
    distances: &[f64],
    dims: &[u32],
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let mut cases = Vec::new();
    for &n in dims {
        for &t in times {
            for &k in kappas {
                for &d in distances {
                    cases.push((n, t, k, d));
                }
            }
        }
    }
    let rows = cases
        .par_iter()
        .map(|&(n, t, k, d)| -> Result<(f64, f64)> {
            let sub = kernels::maass_kernel_radial(t, n, k, d, cfg)?;
            let direct = kernels::maass_kernel_radial_direct(t, n, k, d, cfg)?;
            let diff = (sub - direct).abs();
            Ok((diff, diff / (1e-8f64).max(1e-6 * sub.abs())))
        })
        .collect::<Result<Vec<_>>>()?;
    ResidualReport::new(
        rows.iter().map(|r| r.0).fold(0.0, f64::max),
        rows.iter().map(|r| r.1).fold(0.0, f64::max),
        format!("{} (n, t, kappa, d) cases", cases.len()),
    )
}

/// `|integral - series/2π|` over `(t, d, θ)` at `n = 1`, plus the worst
/// `|Im| / Re` of the series and the smallest real part, in `config_echo`.
pub fn check_ads_routes(
    times: &[f64],
    distances: &[f64],
    thetas: &[f64],
    s_cfg: &SeriesConfig,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let mut cases = Vec::new();
    for &t in times {
        for &d in distances {
            for &theta in thetas {
                cases.push((t, d, theta));
            }
        }
    }
    let rows = cases
        .par_iter()
        .map(|&(t, d, theta)| -> Result<(f64, f64, f64)> {
            let angle = FiberAngle::new(theta)?;
            let query = AdsKernelQuery::new(
                t,
                1,
                BallPoint::origin(1)?,
                BallPoint::at_distance_from_origin(1, d)?,
                angle,
            )?;
            let series = kernels::ads_kernel_series(&query, s_cfg, cfg)?;
            let integral = kernels::ads_kernel_integral(t, 1, d, angle, s_cfg, cfg)?;
            Ok((
                (integral - series / TAU).norm(),
                series.im.abs() / series.re,
                series.re,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let scale = rows.iter().map(|r| r.2 / TAU).fold(f64::INFINITY, f64::min);
    Ok(ResidualReport::new(worst, worst / scale, format!("{} (t, d, theta) cases", cases.len()))?
        .echo("worst_imag_over_real", rows.iter().map(|r| r.1).fold(0.0, f64::max))
        .echo("min_real", rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min))
        .echo("eps_tail", s_cfg.eps_tail)
        .echo_quadrature(cfg))
}

/// A named check with its pass threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub threshold: f64,
    pub max_abs_residual: Option<f64>,
    pub max_rel_residual: Option<f64>,
    pub grid_spec: Option<String>,
    pub config_echo: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Which residual field a threshold applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Measure {
    Abs,
    Rel,
}

type CheckFn = Box<dyn Fn() -> Result<ResidualReport> + Send + Sync>;

struct Check {
    name: String,
    group: &'static str,
    measure: Measure,
    threshold: f64,
    extra: Option<fn(&ResidualReport) -> bool>,
    run: CheckFn,
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 9] = [
    "all",
    "special",
    "radial",
    "maass",
    "normalization",
    "semigroup",
    "ads",
    "theta",
    "subordination",
];

fn suite_checks(seed: u64, cfg: QuadratureConfig, s_cfg: SeriesConfig) -> Vec<Check> {
    let mut checks: Vec<Check> = Vec::new();
    let mut add = |name: String,
                   group: &'static str,
                   measure: Measure,
                   threshold: f64,
                   run: CheckFn| {
        checks.push(Check {
            name,
            group,
            measure,
            threshold,
            extra: None,
            run,
        })
    };

    add(
        "hypergeometric_cosh_identity".into(),
        "special",
        Measure::Rel,
        1e-9,
        Box::new(|| check_hypergeometric_identity(12, 51)),
    );
    for n in 1..=3 {
        add(
            format!("radial_heat_pde_n{n}"),
            "radial",
            Measure::Rel,
            1e-4,
            Box::new(move || check_radial_heat_pde(n, &RadialGrid::default())),
        );
    }
    for n in 1..=2 {
        for t in [0.5, 1.0] {
            add(
                format!("radial_mass_n{n}_t{t}"),
                "radial",
                Measure::Abs,
                1e-6,
                Box::new(move || check_radial_mass(t, n, &cfg)),
            );
        }
    }
    add(
        "maass_routes".into(),
        "maass",
        Measure::Rel,
        1.0,
        Box::new(move || {
            check_maass_routes(
                &[0.5, 1.0, 2.0],
                &[0, 1, 2].map(HalfInteger::from_twice),
                &[0.3, 1.0, 2.0],
                &[1, 2],
                &cfg,
            )
        }),
    );
    for twice in [0, 1, 2] {
        for t in [0.8, 1.0] {
            let k = HalfInteger::from_twice(twice);
            add(
                format!("maass_pde_kappa{}_t{t}", k.value()),
                "maass",
                Measure::Rel,
                5e-3,
                Box::new(move || check_maass_pde(t, k, &DiscGrid::default(), &cfg)),
            );
        }
    }
    for (n, t, tol) in [(1, 1.0, 1e-6), (1, 0.25, 1e-6), (2, 1.0, 1e-5)] {
        add(
            format!("normalization_k0_n{n}_t{t}"),
            "normalization",
            Measure::Abs,
            tol,
            Box::new(move || check_normalization_k0(t, n, &cfg)),
        );
    }
    for (t, s, z) in [(0.5, 0.5, 0.0), (0.3, 0.7, 0.4)] {
        add(
            format!("semigroup_k0_t{t}_s{s}_z{z}"),
            "semigroup",
            Measure::Rel,
            1e-3,
            Box::new(move || {
                check_semigroup_k0(
                    t,
                    s,
                    &BallPoint::on_real_axis(1, z)?,
                    &SemigroupConfig::default(),
                    &cfg,
                )
            }),
        );
    }
    add(
        "ads_routes".into(),
        "ads",
        Measure::Abs,
        1e-6,
        Box::new(move || check_ads_routes(&[0.7, 1.5], &[0.0, 0.8], &[0.0, 1.0, PI], &s_cfg, &cfg)),
    );
    add(
        "theta_identity".into(),
        "theta",
        Measure::Rel,
        1e-10,
        Box::new(|| check_theta_identity(&theta_samples(), 30)),
    );
    for t in [0.5, 1.0] {
        add(
            format!("subordination_t{t}"),
            "subordination",
            Measure::Abs,
            1e-8,
            Box::new(move || check_subordination(&SymmetricOperatorSample::random(5, seed)?, t, &cfg)),
        );
    }
    if let Some(ads) = checks.iter_mut().find(|c| c.name == "ads_routes") {
        ads.extra = Some(|r| {
            r.config_echo.get("worst_imag_over_real").is_some_and(|v| *v <= 1e-9)
                && r.config_echo.get("min_real").is_some_and(|v| *v > 0.0)
        });
    }
    checks
}

/// Runs the named suite (see [`SUITES`]) with the checks in parallel;
/// outcomes come back in a fixed order.
pub fn run_suite(
    suite: &str,
    seed: u64,
    cfg: &QuadratureConfig,
    s_cfg: &SeriesConfig,
) -> Result<Vec<CheckOutcome>> {
    if !SUITES.contains(&suite) {
        return Err(Error::InvalidArgument(format!(
            "unknown suite '{suite}', expected one of {SUITES:?}"
        )));
    }
    cfg.validate()?;
    s_cfg.validate()?;
    let checks: Vec<Check> = suite_checks(seed, *cfg, *s_cfg)
        .into_iter()
        .filter(|c| suite == "all" || c.group == suite)
        .collect();
    Ok(checks
        .par_iter()
        .map(|check| match (check.run)() {
            Ok(report) => {
                let value = match check.measure {
                    Measure::Abs => report.max_abs_residual,
                    Measure::Rel => report.max_rel_residual,
                };
                let passed = value <= check.threshold && check.extra.is_none_or(|f| f(&report));
                CheckOutcome {
                    name: check.name.clone(),
                    passed,
                    threshold: check.threshold,
                    max_abs_residual: Some(report.max_abs_residual),
                    max_rel_residual: Some(report.max_rel_residual),
                    grid_spec: Some(report.grid_spec),
                    config_echo: report.config_echo,
                    error: None,
                }
            }
            Err(e) => CheckOutcome {
                name: check.name.clone(),
                passed: false,
                threshold: check.threshold,
                max_abs_residual: None,
                max_rel_residual: None,
                grid_spec: None,
                config_echo: BTreeMap::new(),
                error: Some(e.to_string()),
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::MaassKernelQuery;

    #[test]
    fn discrete_operator_annihilates_constants_at_kappa_zero() {
        for w in DiscGrid::default().points() {
            let v = discrete_maass_operator(|_| Complex64::new(1.0, 0.0), w, HalfInteger::ZERO, 0.02);
            assert!(v.norm() <= 1e-10);
        }
    }

    #[test]
    fn discrete_operator_on_polynomial() {
        // f = |w|²: ∂∂̄f = 1, w∂f - w̄∂̄f = 0, so D_0 f = 4(1 - |w|²)²
        let w = Complex64::new(0.3, -0.2);
        let got = discrete_maass_operator(|z| Complex64::new(z.norm_sqr(), 0.0), w, HalfInteger::ZERO, 1e-3);
        let a = 1.0 - w.norm_sqr();
        assert!((got.re - 4.0 * a * a).abs() < 1e-8);
        // f = w: ∂f = 1, ∂̄f = 0, so D_κ f = 4(1-|w|²)(κ w + κ² w)
        let k = HalfInteger::from_twice(1);
        let got = discrete_maass_operator(|z| z, w, k, 1e-3);
        let expected = w * (4.0 * a * (0.5 + 0.25));
        assert!((got - expected).norm() < 1e-9);
    }

    #[test]
    fn coarse_stencil_is_rejected_with_suggestion() {
        let grid = DiscGrid {
            stencil_step: 0.1,
            ..Default::default()
        };
        let err = check_maass_pde(1.0, HalfInteger::ZERO, &grid, &QuadratureConfig::default())
            .unwrap_err();
        match err {
            Error::Configuration(msg) => assert!(msg.contains("use at most")),
            other => panic!("unexpected {other:?}"),
        }
        // a step fine enough at κ = 0 is too coarse at κ = 1
        let grid = DiscGrid {
            stencil_step: 0.02,
            ..Default::default()
        };
        let err = check_maass_pde(1.0, HalfInteger::from_twice(2), &grid, &QuadratureConfig::default());
        assert!(matches!(err, Err(Error::Configuration(_))));
    }

    #[test]
    fn maass_pde_at_step_two_hundredths() {
        let grid = DiscGrid {
            stencil_step: 0.02,
            ..Default::default()
        };
        let cfg = QuadratureConfig::default();
        for (twice, t) in [(0, 1.0), (1, 0.8)] {
            let r = check_maass_pde(t, HalfInteger::from_twice(twice), &grid, &cfg).unwrap();
            assert!(r.max_rel_residual <= 5e-3, "{r:?}");
        }
    }

    #[test]
    fn radial_check_rejects_small_x() {
        let grid = RadialGrid {
            x_range: (0.05, 1.0),
            ..Default::default()
        };
        assert!(check_radial_heat_pde(1, &grid).is_err());
    }

    #[test]
    fn radial_pde_is_second_order() {
        let coarse = RadialGrid {
            step: 0.02,
            ..Default::default()
        };
        let fine = RadialGrid {
            step: 0.01,
            ..Default::default()
        };
        let a = check_radial_heat_pde(2, &coarse).unwrap().max_abs_residual;
        let b = check_radial_heat_pde(2, &fine).unwrap().max_abs_residual;
        let ratio = a / b;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn radial_pde_detects_wrong_dimension() {
        // the n = 1 kernel does not solve the n = 2 radial equation
        let kernel = RadialHeatKernel::new(1).unwrap();
        let (t, x, h) = (1.0, 1.0, 1e-3);
        let q = |t: f64, x: f64| kernel.eval(t, x);
        let dt = (q(t + h, x) - q(t - h, x)) / (2.0 * h);
        let dx = (q(t, x + h) - q(t, x - h)) / (2.0 * h);
        let dxx = (q(t, x + h) - 2.0 * q(t, x) + q(t, x - h)) / (h * h);
        let wrong = dt - (dxx + 4.0 / x.tanh() * dx);
        assert!(wrong.abs() > 1e-2 * dt.abs());
    }

    #[test]
    fn subordination_scalar_cases() {
        let cfg = QuadratureConfig::default();
        let zero = SymmetricOperatorSample::new(DMatrix::zeros(1, 1)).unwrap();
        let r = check_subordination(&zero, 0.7, &cfg).unwrap();
        assert!(r.max_abs_residual < 1e-12);

        let l = SymmetricOperatorSample::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            vec![0.0, -1.0],
        )))
        .unwrap();
        let rhs = wave_average(&l, |omega| gaussian_cosine(1.0, omega, &cfg)).unwrap();
        assert!((rhs[(1, 1)] - (-1.0f64).exp()).abs() < 1e-13);
        assert!((rhs[(0, 0)] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn subordination_random_sample() {
        let l = SymmetricOperatorSample::random(5, 42).unwrap();
        let r = check_subordination(&l, 0.5, &QuadratureConfig::default()).unwrap();
        assert!(r.max_abs_residual <= 1e-8, "{r:?}");
    }

    #[test]
    fn subordination_converges_under_node_doubling() {
        let l = SymmetricOperatorSample::random(5, 42).unwrap();
        let errors: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&nodes| check_subordination_fixed(&l, 1.0, nodes).unwrap().max_abs_residual)
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }

    #[test]
    fn operator_sample_validation() {
        let not_symmetric = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.0, -1.0]);
        assert!(SymmetricOperatorSample::new(not_symmetric).is_err());
        let positive = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(SymmetricOperatorSample::new(positive).is_err());
    }

    #[test]
    fn bergman_density_small_cases() {
        let rho = 0.7f64;
        assert!((bergman_radial_density(1, rho) - PI * (2.0 * rho).sinh()).abs() < 1e-14);
        let n2 = 2.0 * PI * PI * rho.sinh().powi(3) * rho.cosh();
        assert!((bergman_radial_density(2, rho) - n2).abs() < 1e-13);
    }

    #[test]
    fn semigroup_swap_symmetry_at_origin() {
        let z = BallPoint::origin(1).unwrap();
        let grid = SemigroupConfig {
            radial_nodes: 60,
            angular_nodes: 8,
        };
        let cfg = QuadratureConfig::default();
        let a = check_semigroup_k0(0.3, 0.7, &z, &grid, &cfg).unwrap();
        let b = check_semigroup_k0(0.7, 0.3, &z, &grid, &cfg).unwrap();
        let ca = a.config_echo["convolution"];
        let cb = b.config_echo["convolution"];
        // the two runs use different radial cutoffs, both far in the tail
        assert!((ca - cb).abs() <= 1e-10 * ca, "{ca} vs {cb}");
    }

    #[test]
    fn two_dimensional_and_radial_residuals_agree_at_kappa_zero() {
        // D_0 on a radial function is f'' + (coth ρ + tanh ρ) f' for n = 1
        let cfg = QuadratureConfig::default();
        let t = 1.0;
        let radial = MaassRadial::new(t, 1).unwrap();
        let f = |rho: f64| radial.eval(HalfInteger::ZERO, rho, &cfg).unwrap();
        let rho = 0.6f64;
        let h = 1e-3;
        let one_d = (f(rho + h) - 2.0 * f(rho) + f(rho - h)) / (h * h)
            + (1.0 / rho.tanh() + rho.tanh()) * (f(rho + h) - f(rho - h)) / (2.0 * h);
        let w = Complex64::new(rho.tanh(), 0.0);
        let two_d = discrete_maass_operator(
            |z| {
                let d = geometry::hyperbolic_distance(
                    &BallPoint::new(vec![z]).unwrap(),
                    &BallPoint::origin(1).unwrap(),
                )
                .unwrap();
                Complex64::new(f(d), 0.0)
            },
            w,
            HalfInteger::ZERO,
            0.02,
        );
        assert!((two_d.re - one_d).abs() <= 2e-3 * one_d.abs(), "{two_d} vs {one_d}");
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 42, &QuadratureConfig::default(), &SeriesConfig::default()).is_err());
    }

    #[test]
    fn fast_suites_pass() {
        let cfg = QuadratureConfig::default();
        let s_cfg = SeriesConfig::default();
        for suite in ["special", "theta", "subordination", "radial"] {
            for outcome in run_suite(suite, 42, &cfg, &s_cfg).unwrap() {
                assert!(outcome.passed, "{outcome:?}");
            }
        }
    }

    #[test]
    fn maass_query_consistency_with_pde_kernel() {
        // the PDE check assembles v from the radial evaluator and the phase;
        // it must coincide with the public query route
        let cfg = QuadratureConfig::default();
        let k = HalfInteger::from_twice(1);
        let w = BallPoint::new(vec![Complex64::new(0.2, 0.3)]).unwrap();
        let y = BallPoint::new(vec![Complex64::new(0.35, 0.0)]).unwrap();
        let q = MaassKernelQuery::new(0.8, 1, k, w.clone(), y.clone()).unwrap();
        let public = kernels::maass_kernel_substituted(&q, &cfg).unwrap();
        let d = geometry::hyperbolic_distance(&w, &y).unwrap();
        let assembled = geometry::phase_factor(&w, &y, k).unwrap()
            * MaassRadial::new(0.8, 1).unwrap().eval(k, d, &cfg).unwrap();
        assert_eq!(public, assembled);
    }
}

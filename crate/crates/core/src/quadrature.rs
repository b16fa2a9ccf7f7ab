//! Adaptive Gauss–Kronrod quadrature (7-point Gauss rule embedded in a
//! 15-point Kronrod panel) for complex-valued integrands, and fixed
//! Gauss–Legendre rules of arbitrary order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Budget of integrand evaluations.
    pub max_nodes: usize,
    /// Replaces the computed truncation point of semi-infinite integrals.
    pub u_max_override: Option<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_nodes: 200_000,
            u_max_override: None,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Configuration(format!("{name} = {tol} must lie in (0, 1)")));
            }
        }
        if self.max_nodes < 64 {
            return Err(Error::Configuration(format!(
                "max_nodes = {} must be at least 64",
                self.max_nodes
            )));
        }
        if let Some(u) = self.u_max_override {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::Configuration(format!(
                    "u_max_override = {u} must be positive and finite"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 15];
    values[7] = f(center);
    for i in 0..7 {
        let dx = half * XGK[i];
        values[i] = f(center - dx);
        values[14 - i] = f(center + dx);
    }

    let mut kronrod = values[7] * WGK[7];
    let mut gauss = values[7] * WG[3];
    for i in 0..7 {
        let pair = values[i] + values[14 - i];
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let mean = kronrod * 0.5;

    let component_error = |part: fn(&Complex64) -> f64| {
        let mut res_abs = part(&values[7]).abs() * WGK[7];
        let mut res_asc = (part(&values[7]) - part(&mean)).abs() * WGK[7];
        for i in 0..7 {
            res_abs += WGK[i] * (part(&values[i]).abs() + part(&values[14 - i]).abs());
            res_asc += WGK[i]
                * ((part(&values[i]) - part(&mean)).abs()
                    + (part(&values[14 - i]) - part(&mean)).abs());
        }
        let err = (part(&kronrod) - part(&gauss)) * half;
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs())
    };
    let error = component_error(|z| z.re).hypot(component_error(|z| z.im));

    Panel {
        a,
        b,
        value: kronrod * half,
        error,
    }
}

/// Integrates a complex-valued `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Integrates a real-valued `f` over `[a, b]`.
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, cfg)?;
    Ok((r.value.re, r.error))
}

/// Integrates over the union of the panels delimited by `breaks`
/// (sorted ascending, at least two entries).
pub fn integrate_with_breaks<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument(format!(
            "integration breakpoints must be ascending, got {breaks:?}"
        )));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[0] < w[1] {
            heap.push(gauss_kronrod_panel(&f, w[0], w[1]));
            evaluations += 15;
        }
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
            (v + p.value, e + p.error)
        })
    };

    loop {
        let (value, error) = totals(&heap);
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand value on [{}, {}]",
                breaks[0],
                breaks[breaks.len() - 1]
            )));
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.norm()) {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => {
                return Ok(Integral {
                    value,
                    error,
                    evaluations,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        let narrow = (worst.b - worst.a) <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE);
        if evaluations + 30 > cfg.max_nodes || narrow {
            return Err(Error::Convergence {
                value: value.norm(),
                error_estimate: error,
                evaluations,
                mode: None,
            });
        }
        heap.pop();
        heap.push(gauss_kronrod_panel(&f, worst.a, mid));
        heap.push(gauss_kronrod_panel(&f, mid, worst.b));
        evaluations += 30;
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        0 => return (Vec::new(), Vec::new()),
        1 => return (vec![0.0], vec![2.0]),
        _ => {}
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// The rule of [`gauss_legendre`] mapped affinely onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut nodes, mut weights) = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        *x = c + h * *x;
        *w *= h;
    }
    (nodes, weights)
}

//! Heat kernel `q_t` of the real hyperbolic space `H^{2n+1}` as a function of
//! geodesic distance:
//!
//! ```text
//! q_t(x) = e^{-n²t} / ((2π)^n √(4πt)) · (-1/sinh x · d/dx)^n e^{-x²/4t}
//! ```
//!
//! The iterated operator is expanded symbolically. Every term produced from
//! the Gaussian has the shape
//! `c · t^{-p} · x^a · cosh^b x · sinh^{-e} x · e^{-x²/4t}` with `c` rational,
//! so the expansion is exact and one cached sum serves every `t`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Below this distance the kernel is reconstructed from its even Taylor
/// behaviour instead of the (individually singular) terms.
pub const SMALL_X_THRESHOLD: f64 = 1e-3;

/// Exponent of the Gaussian beyond which `q_t` is returned as 0.
pub const GAUSSIAN_CUTOFF: f64 = 700.0;

/// `coeff · t^{-tpow} · x^{xpow} · cosh^{coshpow} x · sinh^{-sinhinvpow} x · e^{-x²/4t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianTerm {
    pub coeff: BigRational,
    pub tpow: u32,
    pub xpow: u32,
    pub coshpow: u32,
    pub sinhinvpow: u32,
}

impl GaussianTerm {
    fn key(&self) -> (u32, u32, u32, u32) {
        (self.tpow, self.xpow, self.coshpow, self.sinhinvpow)
    }

    /// Value without the Gaussian factor.
    pub fn eval_reduced(&self, t: f64, x: f64) -> f64 {
        let c = self.coeff.to_f64().unwrap_or(f64::NAN);
        // sinhinvpow ≥ coshpow throughout the family, so write the
        // hyperbolic part as coth^b · csch^{e-b}, which stays bounded for large x
        let (coth, csch) = (1.0 / x.tanh(), 1.0 / x.sinh());
        c * t.powi(-(self.tpow as i32))
            * x.powi(self.xpow as i32)
            * coth.powi(self.coshpow as i32)
            * csch.powi(self.sinhinvpow as i32 - self.coshpow as i32)
    }
}

/// A finite sum of [`GaussianTerm`]s, canonically ordered with like terms
/// merged, produced by `order_n` applications of the operator to `e^{-x²/4t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianTermSum {
    pub terms: Vec<GaussianTerm>,
    pub order_n: u32,
}

impl GaussianTermSum {
    /// The Gaussian `e^{-x²/4t}` itself.
    pub fn seed() -> Self {
        Self {
            terms: vec![GaussianTerm {
                coeff: BigRational::one(),
                tpow: 0,
                xpow: 0,
                coshpow: 0,
                sinhinvpow: 0,
            }],
            order_n: 0,
        }
    }

    /// The order-`n` expansion, replayed from the seed.
    pub fn of_order(n: u32) -> Self {
        (0..n).fold(Self::seed(), |s, _| millson_apply(&s))
    }

    fn normalized(terms: impl IntoIterator<Item = GaussianTerm>, order_n: u32) -> Self {
        let mut merged: BTreeMap<(u32, u32, u32, u32), BigRational> = BTreeMap::new();
        for term in terms {
            let entry = merged.entry(term.key()).or_insert_with(BigRational::zero);
            *entry += term.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((tpow, xpow, coshpow, sinhinvpow), coeff)| GaussianTerm {
                coeff,
                tpow,
                xpow,
                coshpow,
                sinhinvpow,
            })
            .collect();
        Self { terms, order_n }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ terms` without the Gaussian factor.
    pub fn eval_reduced(&self, t: f64, x: f64) -> f64 {
        self.terms.iter().map(|term| term.eval_reduced(t, x)).sum()
    }
}

/// One application of `-1/sinh x · d/dx`.
///
/// `d/dx` of a term yields up to four terms (from `x^a`, `cosh^b`,
/// `sinh^{-e}` and the Gaussian); each is then divided by `-sinh x`.
pub fn millson_apply(s: &GaussianTermSum) -> GaussianTermSum {
    let mut out = Vec::with_capacity(4 * s.terms.len());
    for term in &s.terms {
        let GaussianTerm {
            ref coeff,
            tpow,
            xpow: a,
            coshpow: b,
            sinhinvpow: e,
        } = *term;
        debug_assert!(b == 0 || e >= 1, "cosh power without sinh-inverse leaves the family");
        // after the derivative, "-1/sinh" flips the sign and raises e by one
        let mut push = |c: BigRational, tpow, xpow, coshpow, sinhinvpow: u32| {
            out.push(GaussianTerm {
                coeff: -c,
                tpow,
                xpow,
                coshpow,
                sinhinvpow: sinhinvpow + 1,
            });
        };
        if a > 0 {
            push(coeff * BigInt::from(a), tpow, a - 1, b, e);
        }
        if b > 0 {
            // cosh^b' = b cosh^{b-1} sinh, absorbing one sinh-inverse
            push(coeff * BigInt::from(b), tpow, a, b - 1, e - 1);
        }
        if e > 0 {
            push(-(coeff * BigInt::from(e)), tpow, a, b + 1, e + 1);
        }
        push(
            -(coeff * BigRational::new(BigInt::one(), BigInt::from(2))),
            tpow + 1,
            a + 1,
            b,
            e,
        );
    }
    GaussianTermSum::normalized(out, s.order_n + 1)
}

fn term_cache() -> &'static Mutex<HashMap<u32, Arc<GaussianTermSum>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<GaussianTermSum>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cached order-`n` expansion.
pub fn term_sum(n: u32) -> Arc<GaussianTermSum> {
    let mut cache = term_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(0)
        .or_insert_with(|| Arc::new(GaussianTermSum::seed()));
    if let Some(found) = cache.get(&n) {
        return Arc::clone(found);
    }
    let start = (0..n)
        .rev()
        .find_map(|k| cache.get(&k).map(|s| (**s).clone()))
        .unwrap_or_else(GaussianTermSum::seed);
    let mut current = start;
    while current.order_n < n {
        current = millson_apply(&current);
        cache.insert(current.order_n, Arc::new(current.clone()));
    }
    Arc::clone(&cache[&n])
}

#[derive(Debug, Clone, Copy)]
struct CompiledTerm {
    coeff: f64,
    tpow: i32,
    xpow: i32,
    coshpow: i32,
    excess_sinhinv: i32,
}

/// Evaluator for `q_t` on `H^{2n+1}` at a fixed `n`.
#[derive(Debug, Clone)]
pub struct RadialHeatKernel {
    n: u32,
    terms: Vec<CompiledTerm>,
    small_x: f64,
}

impl RadialHeatKernel {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("hyperbolic kernel needs n >= 1".into()));
        }
        let sum = term_sum(n);
        let terms = sum
            .terms
            .iter()
            .map(|term| CompiledTerm {
                coeff: term.coeff.to_f64().unwrap_or(f64::NAN),
                tpow: term.tpow as i32,
                xpow: term.xpow as i32,
                coshpow: term.coshpow as i32,
                excess_sinhinv: term.sinhinvpow as i32 - term.coshpow as i32,
            })
            .collect();
        Ok(Self {
            n,
            terms,
            small_x: small_x_threshold(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Distance below which the even interpolant replaces the term sum.
    pub fn small_x_threshold(&self) -> f64 {
        self.small_x
    }

    /// `e^{-n²t} / ((2π)^n √(4πt))`.
    pub fn prefactor(&self, t: f64) -> f64 {
        let n = self.n as f64;
        (-n * n * t).exp() / ((2.0 * PI).powi(self.n as i32) * (4.0 * PI * t).sqrt())
    }

    fn terms_reduced(&self, t: f64, x: f64) -> f64 {
        let (coth, csch) = (1.0 / x.tanh(), 1.0 / x.sinh());
        let inv_t = 1.0 / t;
        self.terms
            .iter()
            .map(|c| {
                c.coeff
                    * inv_t.powi(c.tpow)
                    * x.powi(c.xpow)
                    * coth.powi(c.coshpow)
                    * csch.powi(c.excess_sinhinv)
            })
            .sum()
    }

    /// `(-1/sinh · d/dx)^n e^{-x²/4t}` divided by `e^{-x²/4t}`; smooth and even in `x`.
    pub fn operator_reduced(&self, t: f64, x: f64) -> f64 {
        let x = x.abs();
        if x >= self.small_x {
            return self.terms_reduced(t, x);
        }
        // quartic in s = x² through s_j = (j·x_min)², j = 1..5
        let s = x * x;
        let nodes: [f64; 5] = std::array::from_fn(|j| ((j + 1) as f64 * self.small_x).powi(2));
        let mut value = 0.0;
        for (j, &sj) in nodes.iter().enumerate() {
            let mut basis = 1.0;
            for (m, &sm) in nodes.iter().enumerate() {
                if m != j {
                    basis *= (s - sm) / (sj - sm);
                }
            }
            value += basis * self.terms_reduced(t, sj.sqrt());
        }
        value
    }

    /// `q_t(x) · e^{x²/4t}`, the kernel with its Gaussian factor removed.
    pub fn reduced(&self, t: f64, x: f64) -> f64 {
        self.prefactor(t) * self.operator_reduced(t, x)
    }

    /// `q_t(x)`; zero once `x²/4t` exceeds [`GAUSSIAN_CUTOFF`].
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let exponent = x * x / (4.0 * t);
        if exponent > GAUSSIAN_CUTOFF {
            return 0.0;
        }
        self.reduced(t, x) * (-exponent).exp()
    }
}

fn small_x_threshold(n: u32) -> f64 {
    if n <= 2 {
        return SMALL_X_THRESHOLD;
    }
    // the leading cancellation among the terms grows like x^{-(2n-2)};
    // keep its rounding contribution near 1e-10
    SMALL_X_THRESHOLD.max((f64::EPSILON / 1e-10).powf(1.0 / (2.0 * n as f64 - 2.0)))
}

/// `q_t(x)` on `H^{2n+1}`.
pub fn hyperbolic_heat_kernel(t: f64, n: u32, x: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time t = {t} must be positive")));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("distance x = {x} must be nonnegative")));
    }
    Ok(RadialHeatKernel::new(n)?.eval(t, x))
}

/// Area of the unit sphere in `ℝ^{2n+1}`, `2π^{n+½} / Γ(n+½)`.
pub fn unit_sphere_area_odd(n: u32) -> f64 {
    // Γ(n + ½) = (2n)! √π / (4^n n!)
    let mut gamma = PI.sqrt();
    for k in 0..n {
        gamma *= k as f64 + 0.5;
    }
    2.0 * PI.powf(n as f64 + 0.5) / gamma
}

/// Sanity bound on the merged term count, `(n+1)(n+2)/2`.
pub fn term_count_bound(n: u32) -> usize {
    let n = n as usize;
    (n + 1) * (n + 2) / 2
}

impl std::fmt::Display for GaussianTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.coeff.is_negative() { "-" } else { "+" };
        write!(
            f,
            "{sign} {} t^-{} x^{} cosh^{} sinh^-{}",
            self.coeff.abs(),
            self.tpow,
            self.xpow,
            self.coshpow,
            self.sinhinvpow
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn term(c: BigRational, tpow: u32, xpow: u32, coshpow: u32, sinhinvpow: u32) -> GaussianTerm {
        GaussianTerm {
            coeff: c,
            tpow,
            xpow,
            coshpow,
            sinhinvpow,
        }
    }

    fn h3_closed_form(t: f64, x: f64) -> f64 {
        (-t).exp() * x * (-x * x / (4.0 * t)).exp() / ((4.0 * PI * t).powf(1.5) * x.sinh())
    }

    #[test]
    fn first_application() {
        let one = millson_apply(&GaussianTermSum::seed());
        assert_eq!(one.order_n, 1);
        assert_eq!(one.terms, vec![term(rat(1, 2), 1, 1, 0, 1)]);
    }

    #[test]
    fn second_application_matches_hand_expansion() {
        let two = GaussianTermSum::of_order(2);
        // (x²/4t²) sinh^-2 + (x/2t) cosh sinh^-3 - (1/2t) sinh^-2
        let mut expected = vec![
            term(rat(-1, 2), 1, 0, 0, 2),
            term(rat(1, 2), 1, 1, 1, 3),
            term(rat(1, 4), 2, 2, 0, 2),
        ];
        expected.sort_by_key(|t| t.key());
        assert_eq!(two.terms, expected);
    }

    #[test]
    fn order_is_replayable_and_cached() {
        for n in 0..6 {
            let cached = term_sum(n);
            assert_eq!(*cached, GaussianTermSum::of_order(n));
            assert!(cached.len() <= term_count_bound(n).max(1));
            assert!(cached
                .terms
                .windows(2)
                .all(|w| w[0].key() < w[1].key()));
        }
    }

    // nested central differences of the operator applied numerically
    fn numeric_operator(n: u32, t: f64, x: f64, h: f64) -> f64 {
        if n == 0 {
            return (-x * x / (4.0 * t)).exp();
        }
        let d = (numeric_operator(n - 1, t, x + h, h) - numeric_operator(n - 1, t, x - h, h))
            / (2.0 * h);
        -d / x.sinh()
    }

    #[test]
    fn term_sum_matches_finite_differences() {
        let (t, x) = (0.7, 1.3);
        let sum = GaussianTermSum::of_order(3);
        let symbolic = sum.eval_reduced(t, x) * (-x * x / (4.0 * t)).exp();
        let numeric = numeric_operator(3, t, x, 1e-4);
        assert!(
            ((symbolic - numeric) / symbolic).abs() <= 1e-5,
            "{symbolic} vs {numeric}"
        );
    }

    #[test]
    fn n1_closed_form() {
        let got = hyperbolic_heat_kernel(1.0, 1, 1.0).unwrap();
        let expected = (-1.0f64).exp() * (-0.25f64).exp() / ((4.0 * PI).powf(1.5) * 1.0f64.sinh());
        assert!(((got - expected) / expected).abs() < 1e-14);
        for t in [0.25, 1.0, 4.0] {
            for i in 1..=50 {
                let x = 0.1 * i as f64;
                let got = hyperbolic_heat_kernel(t, 1, x).unwrap();
                let exact = h3_closed_form(t, x);
                assert!(((got - exact) / exact).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn removable_singularity_at_origin() {
        let t = 1.3f64;
        let limit = (-t).exp() / (4.0 * PI * t).powf(1.5);
        let got = hyperbolic_heat_kernel(t, 1, 1e-6).unwrap();
        assert!(((got - limit) / limit).abs() < 1e-8);
        let at_zero = hyperbolic_heat_kernel(t, 1, 0.0).unwrap();
        assert!(((at_zero - limit) / limit).abs() < 1e-10);
    }

    #[test]
    fn small_x_is_continuous() {
        for n in 1..=4 {
            let k = RadialHeatKernel::new(n).unwrap();
            let x0 = k.small_x_threshold();
            for t in [0.3, 1.0, 2.5] {
                let below = k.eval(t, x0 * (1.0 - 1e-9));
                let above = k.eval(t, x0 * (1.0 + 1e-9));
                assert!(((below - above) / above).abs() < 1e-8, "n={n} t={t}: {below} {above}");
                assert!(k.eval(t, 0.0) > 0.0);
            }
        }
    }

    #[test]
    fn n2_is_consistent_with_one_more_application() {
        let (t, x, h) = (0.5f64, 2.0f64, 1e-4);
        let k1 = RadialHeatKernel::new(1).unwrap();
        let k2 = RadialHeatKernel::new(2).unwrap();
        // q^{(2)} = e^{-3t}/(2π) · (-1/sinh d/dx) q^{(1)}
        let deriv = (k1.eval(t, x + h) - k1.eval(t, x - h)) / (2.0 * h);
        let oracle = (-3.0 * t).exp() / (2.0 * PI) * (-deriv / x.sinh());
        let got = k2.eval(t, x);
        assert!(((got - oracle) / got).abs() <= 1e-6, "{got} vs {oracle}");
    }

    #[test]
    fn positivity_and_cutoff() {
        for n in 1..=3 {
            let k = RadialHeatKernel::new(n).unwrap();
            for t in [0.3, 1.0, 2.0] {
                for i in 0..=40 {
                    assert!(k.eval(t, 0.1 * i as f64) > 0.0);
                }
            }
            assert_eq!(k.eval(0.1, 20.0), 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(hyperbolic_heat_kernel(0.0, 1, 1.0).is_err());
        assert!(hyperbolic_heat_kernel(1.0, 0, 1.0).is_err());
        assert!(hyperbolic_heat_kernel(1.0, 1, -1.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area_odd(1) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area_odd(2) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}

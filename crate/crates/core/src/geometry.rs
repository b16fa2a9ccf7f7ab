//! Points of the complex hyperbolic (Bergman) ball and the quantities built
//! from them: the Hermitian pairing, the hyperbolic distance and the
//! unit-modulus phase factor of the Maass kernel.
//!
//! The pairing convention is `⟨w, y⟩ = Σ w_i · conj(y_i)`. The distance does
//! not depend on it; the phase factor is conjugated under the opposite
//! convention.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values of `cosh² d` in `[1 - DIAGONAL_CLAMP, 1)` are treated as the diagonal.
pub const DIAGONAL_CLAMP: f64 = 1e-12;

/// A point of the open unit ball of `ℂⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument(
                "a ball point needs at least one coordinate".into(),
            ));
        }
        if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let norm_sqr: f64 = coords.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr >= 1.0 {
            return Err(Error::Domain(format!(
                "point has norm {} but must lie in the open unit ball",
                norm_sqr.sqrt()
            )));
        }
        Ok(Self { coords })
    }

    pub fn origin(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    /// The point `(r, 0, …, 0)`.
    pub fn on_real_axis(n: usize, r: f64) -> Result<Self> {
        if n == 0 {
            return Self::new(Vec::new());
        }
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[0] = Complex64::new(r, 0.0);
        Self::new(coords)
    }

    /// The point `(tanh d, 0, …, 0)`, at hyperbolic distance `d` from the origin.
    pub fn at_distance_from_origin(n: usize, d: f64) -> Result<Self> {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!("distance {d} must be finite and nonnegative")));
        }
        Self::on_real_axis(n, d.tanh())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A fiber coordinate of the circle bundle, stored in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FiberAngle(f64);

impl FiberAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("fiber angle {theta} is not finite")));
        }
        let mut canonical = theta.rem_euclid(TAU);
        if canonical >= TAU {
            canonical = 0.0;
        }
        Ok(Self(canonical))
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

/// A half-integer `κ ∈ ½ℤ`, stored as `2κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger {
    twice: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };

    pub fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    /// Accepts `value` when `2·value` is an integer up to `1e-9`.
    pub fn from_f64(value: f64) -> Result<Self> {
        let doubled = 2.0 * value;
        let rounded = doubled.round();
        if !value.is_finite() || (doubled - rounded).abs() > 1e-9 || rounded.abs() > 1e15 {
            return Err(Error::InvalidArgument(format!(
                "kappa = {value} is not a half-integer"
            )));
        }
        Ok(Self {
            twice: rounded as i64,
        })
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Degree `2|κ|` of the Chebyshev polynomial attached to `κ`.
    pub fn chebyshev_degree(self) -> u32 {
        self.twice.unsigned_abs() as u32
    }
}

impl std::ops::Neg for HalfInteger {
    type Output = HalfInteger;

    fn neg(self) -> Self {
        Self { twice: -self.twice }
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

fn check_dims(w: &BallPoint, y: &BallPoint) -> Result<()> {
    if w.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: w.dim(),
            right: y.dim(),
        });
    }
    Ok(())
}

/// `⟨w, y⟩ = Σ w_i · conj(y_i)`.
pub fn hermitian_inner(w: &BallPoint, y: &BallPoint) -> Result<Complex64> {
    check_dims(w, y)?;
    Ok(w.coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// `cosh² d(w, y)` straight from `|1 - ⟨w,y⟩|² / ((1 - ‖w‖²)(1 - ‖y‖²))`,
/// clamped to 1 from below.
pub fn cosh_sq_distance(w: &BallPoint, y: &BallPoint) -> Result<f64> {
    let pairing = hermitian_inner(w, y)?;
    let value =
        (Complex64::new(1.0, 0.0) - pairing).norm_sqr() / ((1.0 - w.norm_sqr()) * (1.0 - y.norm_sqr()));
    Ok(if value < 1.0 { 1.0 } else { value })
}

/// `sinh² d(w, y)`, computed without the cancellation in `cosh² d - 1`.
///
/// Uses `|1 - ⟨w,y⟩|² - (1 - ‖w‖²)(1 - ‖y‖²) = ‖w - y‖² - ‖w ∧ y‖²` with
/// `‖w ∧ y‖² = Σ_{i<j} |w_i y_j - w_j y_i|²`.
pub fn sinh_sq_distance(w: &BallPoint, y: &BallPoint) -> Result<f64> {
    check_dims(w, y)?;
    let (a, b) = (w.coords(), y.coords());
    let diff: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    let mut wedge = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            wedge += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    let value = (diff - wedge) / ((1.0 - w.norm_sqr()) * (1.0 - y.norm_sqr()));
    // cosh² d within DIAGONAL_CLAMP of 1 from below, or negative by rounding
    Ok(value.max(0.0))
}

/// Hyperbolic distance of the Bergman metric (holomorphic curvature -4).
pub fn hyperbolic_distance(w: &BallPoint, y: &BallPoint) -> Result<f64> {
    Ok(sinh_sq_distance(w, y)?.sqrt().asinh())
}

/// `((1 - conj⟨w,y⟩) / (1 - ⟨w,y⟩))^κ = exp(-2iκ · Arg(1 - ⟨w,y⟩))`.
///
/// `Re(1 - ⟨w,y⟩) > 0` on the open ball, so the principal argument lies in
/// `(-π/2, π/2)` and the half-integer power is unambiguous.
pub fn phase_factor(w: &BallPoint, y: &BallPoint, kappa: HalfInteger) -> Result<Complex64> {
    let pairing = hermitian_inner(w, y)?;
    let arg = (Complex64::new(1.0, 0.0) - pairing).arg();
    Ok(Complex64::from_polar(1.0, -(kappa.twice() as f64) * arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(coords: &[(f64, f64)]) -> BallPoint {
        BallPoint::new(coords.iter().map(|&(a, b)| c(a, b)).collect()).unwrap()
    }

    #[test]
    fn rejects_points_outside_ball() {
        assert!(BallPoint::new(vec![c(0.6, 0.8)]).is_err());
        assert!(BallPoint::new(vec![]).is_err());
        assert!(BallPoint::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let zero = BallPoint::origin(3).unwrap();
        let y = pt(&[(0.1, 0.2), (-0.3, 0.1), (0.0, 0.4)]);
        assert_eq!(hermitian_inner(&zero, &y).unwrap(), c(0.0, 0.0));
        let h = pt(&[(0.5, 0.0)]);
        assert_eq!(hermitian_inner(&h, &h).unwrap(), c(0.25, 0.0));

        let w = pt(&[(0.3, -0.2), (0.1, 0.5)]);
        let y = pt(&[(-0.4, 0.1), (0.2, 0.25)]);
        let a = hermitian_inner(&w, &y).unwrap();
        let b = hermitian_inner(&y, &w).unwrap();
        assert!((a - b.conj()).norm() < 1e-16);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let w = BallPoint::origin(1).unwrap();
        let y = BallPoint::origin(2).unwrap();
        assert_eq!(
            hyperbolic_distance(&w, &y),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        );
        assert!(phase_factor(&w, &y, HalfInteger::from_twice(1)).is_err());
    }

    #[test]
    fn distance_examples() {
        let zero = BallPoint::origin(1).unwrap();
        assert_eq!(hyperbolic_distance(&zero, &zero).unwrap(), 0.0);
        let y = pt(&[(0.6, 0.0)]);
        let d = hyperbolic_distance(&zero, &y).unwrap();
        assert!((d - 1.25f64.acosh()).abs() < 1e-15);
        assert!((cosh_sq_distance(&zero, &y).unwrap() - 1.5625).abs() < 1e-14);

        let p = BallPoint::at_distance_from_origin(2, 0.75).unwrap();
        let d = hyperbolic_distance(&BallPoint::origin(2).unwrap(), &p).unwrap();
        assert!((d - 0.75).abs() < 1e-15);
    }

    #[test]
    fn stable_and_direct_distance_agree() {
        let w = pt(&[(0.3, -0.2), (0.1, 0.5)]);
        let y = pt(&[(-0.4, 0.1), (0.2, 0.25)]);
        let direct = cosh_sq_distance(&w, &y).unwrap();
        let stable = 1.0 + sinh_sq_distance(&w, &y).unwrap();
        assert!((direct - stable).abs() < 1e-14 * direct);
        let d1 = hyperbolic_distance(&w, &y).unwrap();
        let d2 = hyperbolic_distance(&y, &w).unwrap();
        assert!((d1 - d2).abs() < 1e-15);
    }

    #[test]
    fn diagonal_distance_is_zero() {
        let w = pt(&[(0.31, -0.22), (0.13, 0.5)]);
        assert_eq!(hyperbolic_distance(&w, &w).unwrap(), 0.0);
        assert_eq!(cosh_sq_distance(&w, &w).unwrap(), 1.0);
    }

    #[test]
    fn phase_factor_examples() {
        let zero = BallPoint::origin(2).unwrap();
        let y = pt(&[(0.3, 0.4), (-0.2, 0.1)]);
        for twice in -5..=5 {
            let k = HalfInteger::from_twice(twice);
            assert!((phase_factor(&zero, &y, k).unwrap() - 1.0).norm() < 1e-16);
            assert!((phase_factor(&y, &zero, k).unwrap() - 1.0).norm() < 1e-16);
        }
        let w = pt(&[(0.1, -0.6), (0.3, 0.2)]);
        assert_eq!(phase_factor(&w, &y, HalfInteger::ZERO).unwrap(), c(1.0, 0.0));

        let half = HalfInteger::from_twice(1);
        let a = phase_factor(&w, &y, half).unwrap();
        let b = phase_factor(&y, &w, half).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);

        // literal ratio form for κ = 1
        let p = hermitian_inner(&w, &y).unwrap();
        let one = c(1.0, 0.0);
        let literal = (one - p.conj()) / (one - p);
        let got = phase_factor(&w, &y, HalfInteger::from_twice(2)).unwrap();
        assert!((literal - got).norm() < 1e-15);
    }

    #[test]
    fn half_integer_parsing() {
        assert_eq!(HalfInteger::from_f64(1.5).unwrap().twice(), 3);
        assert_eq!(HalfInteger::from_f64(-2.0).unwrap().chebyshev_degree(), 4);
        assert!(HalfInteger::from_f64(0.3).is_err());
        assert_eq!(HalfInteger::from_twice(-3).to_string(), "-3/2");
        assert_eq!(HalfInteger::from_twice(4).to_string(), "2");
    }

    #[test]
    fn fiber_angle_is_canonical() {
        let a = FiberAngle::new(-0.5).unwrap();
        assert!((a.radians() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(FiberAngle::new(TAU).unwrap().radians(), 0.0);
        assert!(FiberAngle::new(f64::INFINITY).is_err());
    }

    fn ball_point(n: usize) -> impl Strategy<Value = BallPoint> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|raw| {
            let coords: Vec<Complex64> = raw.into_iter().map(|(a, b)| c(a, b)).collect();
            let norm: f64 = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let scale = if norm >= 0.95 { 0.95 / norm } else { 1.0 };
            BallPoint::new(coords.into_iter().map(|z| z * scale).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn distance_symmetric_and_cosh_bounded(w in ball_point(2), y in ball_point(2)) {
            let c2 = cosh_sq_distance(&w, &y).unwrap();
            prop_assert!(c2 >= 1.0);
            let d1 = hyperbolic_distance(&w, &y).unwrap();
            let d2 = hyperbolic_distance(&y, &w).unwrap();
            prop_assert!((d1 - d2).abs() <= 1e-12 * (1.0 + d1));
            prop_assert!((d1.cosh().powi(2) - c2).abs() <= 1e-9 * c2);
        }

        #[test]
        fn phase_is_unimodular(w in ball_point(3), y in ball_point(3), twice in -8i64..8) {
            let k = HalfInteger::from_twice(twice);
            let p = phase_factor(&w, &y, k).unwrap();
            prop_assert!((p.norm() - 1.0).abs() <= 1e-15);
            let q = phase_factor(&w, &y, -k).unwrap();
            prop_assert!((p * q - 1.0).norm() <= 1e-14);
        }

        #[test]
        fn inner_is_sesquilinear(
            w in ball_point(2), y in ball_point(2), z in ball_point(2),
            a in (-1.0f64..1.0, -1.0f64..1.0)
        ) {
            let alpha = c(a.0, a.1);
            let lhs: Complex64 = w.coords().iter().zip(y.coords()).zip(z.coords())
                .map(|((wi, yi), zi)| wi * (alpha * yi + zi).conj())
                .sum();
            let rhs = alpha.conj() * hermitian_inner(&w, &y).unwrap() + hermitian_inner(&w, &z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-14);
            let sym = hermitian_inner(&y, &w).unwrap().conj();
            prop_assert!((sym - hermitian_inner(&w, &y).unwrap()).norm() <= 1e-16);
        }
    }
}

//! Terminating Gauss hypergeometric values `₂F₁(-m, m; ½; x)` and the kernel
//! factor `N_κ` of the Maass heat kernel.
//!
//! `₂F₁(-m, m; ½; (1 - z)/2) = T_m(z)` for every real `z`, so the family is
//! evaluated by the Chebyshev three-term recurrence. The explicit finite sum
//! is kept for cross-checking; it cancels badly once `|1 - 2x| > 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HalfInteger;

/// Degree of a Chebyshev polynomial of the first kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChebyshevOrder(pub u32);

impl From<HalfInteger> for ChebyshevOrder {
    fn from(kappa: HalfInteger) -> Self {
        ChebyshevOrder(kappa.chebyshev_degree())
    }
}

/// `T_m(z)` by `T_{j+1} = 2z·T_j - T_{j-1}`; valid for all real `z`.
pub fn chebyshev_t(m: ChebyshevOrder, z: f64) -> f64 {
    match m.0 {
        0 => 1.0,
        1 => z,
        degree => {
            let (mut prev, mut cur) = (1.0, z);
            for _ in 1..degree {
                let next = 2.0 * z * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Coefficient of `x^j` in `₂F₁(-m, m; ½; x)`, i.e. `(-m)_j (m)_j / ((½)_j j!)`.
///
/// These are integers; they are produced exactly while they fit in `i128`.
fn hypergeometric_coefficients(m: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut exact: Option<i128> = Some(1);
    let mut approx = 1.0f64;
    out.push(1.0);
    for j in 0..m as i128 {
        let m = m as i128;
        // c_{j+1} = c_j · 2(j - m)(j + m) / ((2j + 1)(j + 1))
        exact = exact.and_then(|c| {
            c.checked_mul(2 * (j - m))
                .and_then(|v| v.checked_mul(j + m))
                .map(|v| v / ((2 * j + 1) * (j + 1)))
        });
        approx *= 2.0 * (j - m) as f64 * (j + m) as f64 / ((2 * j + 1) as f64 * (j + 1) as f64);
        match exact {
            Some(c) => {
                approx = c as f64;
                out.push(approx);
            }
            None => out.push(approx),
        }
    }
    out
}

/// `₂F₁(-m, m; ½; x)` as the explicit degree-`m` sum, with Neumaier
/// compensated summation.
pub fn gauss_2f1_terminating(m: ChebyshevOrder, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    let mut power = 1.0;
    for c in hypergeometric_coefficients(m.0) {
        let term = c * power;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
        power *= x;
    }
    sum + compensation
}

/// `Σ_j |c_j x^j|`, the magnitude scale against which the explicit sum's
/// rounding error is measured. Equals `T_m(1 + 2|x|)`.
pub fn gauss_2f1_condition_scale(m: ChebyshevOrder, x: f64) -> f64 {
    chebyshev_t(m, 1.0 + 2.0 * x.abs())
}

/// `N_κ(x, d) = T_{2|κ|}(cosh x / cosh d) / sqrt(cosh² x - cosh² d)` for `x > d`.
///
/// The hypergeometric factor `₂F₁(-2κ, 2κ; ½; (cosh d - cosh x)/(2 cosh d))`
/// is reduced to the Chebyshev polynomial; the result is even in `κ`.
pub fn n_kernel_factor(x: f64, d: f64, kappa: HalfInteger) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("distance d = {d} must be nonnegative")));
    }
    if !(x > d) {
        return Err(Error::Support { x, d });
    }
    Ok(n_kernel_factor_offset(x - d, d, kappa))
}

/// `N_κ(d + gap, d)` with the gap passed separately, so that
/// `cosh²x - cosh²d = sinh(gap)·sinh(2d + gap)` keeps full precision as
/// `gap → 0`.
pub(crate) fn n_kernel_factor_offset(gap: f64, d: f64, kappa: HalfInteger) -> f64 {
    let x = d + gap;
    let radicand = gap.sinh() * (2.0 * d + gap).sinh();
    chebyshev_t(kappa.into(), x.cosh() / d.cosh()) / radicand.sqrt()
}

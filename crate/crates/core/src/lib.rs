//! Heat kernels on the complex anti-de Sitter fibration and its base.
//!
//! The crate evaluates three related kernels:
//!
//! * [`radial_heat`]: the Riemannian heat kernel `q_t` of the real hyperbolic
//!   space of dimension `2n + 1`, built from an exact symbolic expansion of
//!   `(-1/sinh x · d/dx)^n` applied to the Gaussian `exp(-x²/4t)`.
//! * [`kernels`]: the heat kernel `v_{t,n,κ}` of the generalized Maass
//!   Laplacian `D_κ` on the Bergman ball, by two independent quadrature
//!   routes, and the subelliptic heat kernel of the AdS fibration by its
//!   Fourier series and by its Gaussian-integral representation.
//! * [`verify`]: independent cross-checks (finite-difference PDE residuals,
//!   mass and semigroup identities, the wave-to-heat subordination formula).
//!
//! [`geometry`] and [`special`] supply the Bergman-ball primitives and the
//! terminating hypergeometric factors; [`quadrature`] is the shared adaptive
//! Gauss–Kronrod engine.

pub mod error;
pub mod geometry;
pub mod kernels;
pub mod quadrature;
pub mod radial_heat;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BallPoint, FiberAngle, HalfInteger};
pub use kernels::{AdsKernelQuery, MaassKernelQuery, SeriesConfig};
pub use quadrature::QuadratureConfig;
pub use radial_heat::RadialHeatKernel;

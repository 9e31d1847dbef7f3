//! Geometry of two families of negatively curved spaces — the Poincaré ball
//! and the cone of symmetric positive-definite (SPD) matrices — unified by a
//! single signed point-to-hyperplane distance
//!
//! ```text
//!     d(x, H_{xi,p}) = d(x, p) * B_xi(ominus p oplus x) / || ominus p oplus x ||
//! ```
//!
//! where `B_xi` is the Busemann function of a boundary direction `xi` and
//! `oplus` / `ominus` are the space's gyro-translation operations.  Each
//! space admits a closed form for this distance, and each closed form is
//! cross-checked here against the defining limit `B_xi(x) = lim d(x, delta(t)) - t`
//! and against a second, independent evaluation pipeline.
//!
//! Modules:
//!
//! * [`matkernels`] — dense symmetric-matrix kernels (eigen, Cholesky,
//!   spectral functions) that every geometric module builds on.
//! * [`poincare`] — Poincaré-ball operations: Möbius arithmetic, distances,
//!   Busemann functions, three hyperplane families, multinomial logistic
//!   regression heads, Lorentz-model conversions, wrapped normal sampling.
//! * [`spd_pem`] — SPD geometry pulled back through a diffeomorphism
//!   `phi` onto symmetric matrices (matrix log, or the power map), with the
//!   log-Euclidean fully connected layer and weighted Fréchet means.
//! * [`symspace_gi`] — SPD matrices as the symmetric space GL(m)/O(m):
//!   Cartan projection, Iwasawa decomposition, Busemann functions of
//!   flag-type boundary directions, and the corresponding layer.
//! * [`attention`] — distance-based attention blocks over SPD sequences.
//! * [`training`] — finite-difference gradients, constrained SGD steps, and
//!   a small trainer for the ball MLR heads.
//! * [`verify`] — independent numerical oracles (limit probes, alternative
//!   factorizations, geodesic projection search) and the property-check
//!   suites behind the `symspace verify` command.

pub mod attention;
pub mod matkernels;
pub mod poincare;
pub mod spd_pem;
pub mod symspace_gi;
pub mod training;
pub mod verify;

//! Heat kernels on Damek–Ricci spaces.
//!
//! A Damek–Ricci space is the solvable Lie group `S = N ⋉ ℝ⁺` obtained by
//! extending an H-type group `N` by dilations; the family contains all rank-one
//! symmetric spaces of noncompact type, in particular every real hyperbolic
//! space. This crate evaluates the heat kernel `h_t` of the Laplace–Beltrami
//! operator on such spaces together with its radial, time and space (i.e.
//! left-invariant vector field) derivatives of arbitrary order, and provides
//! desk-scale verification harnesses for the two-sided bounds, sharpness
//! statements and asymptotic expansions these kernels satisfy.
//!
//! The main entry points are:
//!
//! * [`group_model`] — construction and validation of H-type groups, the group
//!   law on `S`, and the modular function;
//! * [`distance_calculus`] — the radial coordinate `r`, nested derivatives
//!   along left-invariant vector fields via multi-dual jets, and the Faà di
//!   Bruno coefficient tables for radial compositions;
//! * [`radial_symbolics`] — an exact symbolic calculus for radial expressions
//!   (rational functions in `u = e^{r/2}` with `r`-polynomial numerators),
//!   including the `∂_r^k = Σ_j f_{j,k} ℛ^j` tables, Gaussian-shift
//!   coefficients and powers of the radial Laplacian;
//! * [`heat_kernel`] — kernel evaluation for both parities of `ν`, all radial
//!   and time derivatives, space derivatives, the mass functional and the
//!   distinguished-Laplacian kernel;
//! * [`mixed_derivatives`] — the cancellation algorithm that expresses mixed
//!   space derivatives through smooth coefficient systems near `r = 0`;
//! * [`bounds_asymptotics`] — envelope functions, two-sided bound and
//!   sharpness reports, asymptotic expansions and the Ornstein–Uhlenbeck
//!   potential.
//!
//! All floating-point computation is multiprecision (MPFR via [`rug`]), with
//! the working precision exposed wherever it matters; symbolic tables use
//! exact rational arithmetic throughout.

pub mod bounds_asymptotics;
pub mod distance_calculus;
mod error;
pub mod group_model;
pub mod heat_kernel;
pub mod mixed_derivatives;
pub mod multidual;
pub mod quadrature;
pub mod radial_symbolics;
pub mod real;

pub use error::{Error, Result};
pub use group_model::{GroupPoint, HTypeGroup, StandardFamily};
pub use heat_kernel::{KernelParams, QuadratureConfig};

//! Cross-verified evaluation of the Uehling vacuum-polarization potential.
//!
//! The lowest-order vacuum-polarization correction to the Coulomb potential
//! of a point charge admits several mathematically equivalent evaluation
//! paths.  In the absence of published reference tables, this crate treats
//! *route parity* — agreement between independent paths — as the primary
//! correctness oracle:
//!
//! 1. direct quadrature of the defining integral ([`potential::uehling_integral`]),
//! 2. its resolution into Macdonald/Bickley kernels
//!    ([`potential::uehling_closed_ki024`]),
//! 3. a three-term reduction of that combination
//!    ([`potential::uehling_closed_reduced`], the default route),
//! 4. a constant-coefficient closed form retained as a diagnostic subject
//!    ([`potential::uehling_constant_coeff`]), and
//! 5. reconstruction by integrating a second-order radial equation from
//!    quadrature-supplied initial data ([`odecheck::solve_ivp`]).
//!
//! Modules:
//!
//! * [`quadrature`] — trapezoidal engine for `exp(-c cosh t)`-decaying
//!   integrands, with compensated summation and honest convergence flags;
//! * [`specfun`] — `K_0`, `K_1`, and the Bickley functions `Ki_n` from their
//!   cosh-kernel representations, plus recurrence and derivative relations;
//! * [`potential`] — the potential routes, unit systems, derivative route,
//!   and interaction energy;
//! * [`odecheck`] — the radial equation as executable checks: RHS, bracket
//!   derivative chain, finite-difference residuals, IVP reconstruction, and
//!   the aggregated consistency report;
//! * [`grid`] — logarithmic/linear evaluation grids;
//! * [`report`] — serializable check outcomes.
//!
//! Unit conventions (see [`potential::UnitSystem`]): relativistic units
//! measure lengths in reduced electron Compton wavelengths; atomic units in
//! Bohr radii.  A radius converts as `r_atomic = alpha * r_relativistic` and
//! a potential as `U_atomic = U_relativistic / alpha`.

pub mod grid;
pub mod odecheck;
pub mod potential;
pub mod quadrature;
pub mod report;
pub mod specfun;

pub use potential::{PhysicalParams, Route, UnitSystem, FINE_STRUCTURE_ALPHA};
pub use quadrature::AccuracyConfig;
pub use report::VerificationReport;

//! The vacuum-polarization correction to the Coulomb potential of a point
//! charge, evaluated through independent routes that are cross-checked
//! against one another:
//!
//! * [`Route::Integral`] — direct quadrature of the defining integral after
//!   the substitution `xi = cosh zeta`,
//! * [`Route::ClosedKi024`] — the same integral resolved into the kernel
//!   family as `K_0 - Ki_2/2 - Ki_4/2`,
//! * [`Route::ClosedReduced`] — the three-term reduction of that combination
//!   via the Bickley recurrence,
//! * [`Route::ConstantCoeff`] — a closed form with radius-independent
//!   coefficients, kept as a diagnostic subject (see `odecheck`),
//! * [`Route::OdeIvp`] — reconstruction by integrating the second-order
//!   radial equation (not a pointwise route; lives in `odecheck`).
//!
//! All routes share the scale `A = 2 q alpha / (3 pi)` and the argument
//! `z = b r` with `b = 2 y`, where `y` is the electron mass in the selected
//! unit system.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_decaying, uehling_integrand_transformed, AccuracyConfig};
use crate::specfun::{self, SpecFunError};

/// Fine-structure constant (CODATA 2018).
pub const FINE_STRUCTURE_ALPHA: f64 = 7.297_352_569_3e-3;

/// Unit conventions supported by the toolkit.
///
/// * `Relativistic`: hbar = c = electron mass = 1; lengths in reduced
///   electron Compton wavelengths, energies in electron rest energies.
/// * `Atomic`: hbar = electron mass = elementary charge = 1, c = 1/alpha;
///   lengths in Bohr radii, energies in Hartree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    Relativistic,
    Atomic,
}

impl UnitSystem {
    /// Electron mass in the system's own units: the decay scale `y` of the
    /// potential (`b = 2 y`).
    pub fn electron_mass(self, alpha: f64) -> f64 {
        match self {
            UnitSystem::Relativistic => 1.0,
            UnitSystem::Atomic => 1.0 / alpha,
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitSystem::Relativistic => write!(f, "relativistic"),
            UnitSystem::Atomic => write!(f, "atomic"),
        }
    }
}

impl FromStr for UnitSystem {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relativistic" | "rel" => Ok(UnitSystem::Relativistic),
            "atomic" | "au" => Ok(UnitSystem::Atomic),
            _ => Err(ParamsError::UnknownUnitSystem { name: s.to_owned() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("source charge must be finite, got {q}")]
    NonFiniteCharge { q: f64 },
    #[error("fine-structure constant must be positive and finite, got {alpha}")]
    InvalidAlpha { alpha: f64 },
    #[error("unknown unit system '{name}' (expected 'relativistic' or 'atomic')")]
    UnknownUnitSystem { name: String },
}

/// Source charge, coupling constant, and unit system, with the derived
/// scales cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    q: f64,
    alpha: f64,
    units: UnitSystem,
    y: f64,
}

impl PhysicalParams {
    pub fn new(q: f64, alpha: f64, units: UnitSystem) -> Result<Self, ParamsError> {
        if !q.is_finite() {
            return Err(ParamsError::NonFiniteCharge { q });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ParamsError::InvalidAlpha { alpha });
        }
        Ok(Self {
            q,
            alpha,
            units,
            y: units.electron_mass(alpha),
        })
    }

    /// Unit positive point charge with the CODATA alpha.
    pub fn unit_charge(units: UnitSystem) -> Self {
        Self::new(1.0, FINE_STRUCTURE_ALPHA, units)
            .expect("unit-charge parameters are always valid")
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn units(&self) -> UnitSystem {
        self.units
    }

    /// Electron mass in the active unit system.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Exponential decay scale `b = 2 y`; the kernel argument is `z = b r`.
    pub fn b(&self) -> f64 {
        2.0 * self.y
    }

    /// Overall amplitude `A = 2 q alpha / (3 pi)`: the correction is
    /// `U(r) = (A / r) * I(b r)` with `I` the shared kernel integral.
    pub fn prefactor(&self) -> f64 {
        2.0 * self.q * self.alpha / (3.0 * core::f64::consts::PI)
    }

    /// Amplitude `q alpha / (18 pi) = A / 12` of the constant-coefficient
    /// closed form and of the radial-equation right-hand side.
    pub fn bracket_prefactor(&self) -> f64 {
        self.q * self.alpha / (18.0 * core::f64::consts::PI)
    }
}

/// Independent evaluation routes for the correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Integral,
    ClosedKi024,
    ClosedReduced,
    ConstantCoeff,
    OdeIvp,
}

impl Route {
    pub const ALL_POINTWISE: [Route; 4] = [
        Route::Integral,
        Route::ClosedKi024,
        Route::ClosedReduced,
        Route::ConstantCoeff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::Integral => "integral",
            Route::ClosedKi024 => "closed_ki024",
            Route::ClosedReduced => "closed_reduced",
            Route::ConstantCoeff => "constant_coeff",
            Route::OdeIvp => "ode_ivp",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = PotentialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let canon = s.trim().to_ascii_lowercase().replace('-', "_");
        match canon.as_str() {
            "integral" => Ok(Route::Integral),
            "closed_ki024" | "ki024" => Ok(Route::ClosedKi024),
            "closed_reduced" | "reduced" | "closed_form" => Ok(Route::ClosedReduced),
            "constant_coeff" | "paper_constant_coeff" => Ok(Route::ConstantCoeff),
            "ode_ivp" | "ode" => Ok(Route::OdeIvp),
            _ => Err(PotentialError::UnknownRoute { name: s.to_owned() }),
        }
    }
}

/// One evaluated point of the correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSample {
    pub r: f64,
    pub value: f64,
    pub route: Route,
    pub abs_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("radius must be positive and finite, got {r}")]
    InvalidRadius { r: f64 },
    #[error("unknown route '{name}'")]
    UnknownRoute { name: String },
    #[error("route '{route}' reconstructs the potential along a trajectory and has no pointwise value")]
    RouteNotPointwise { route: Route },
    #[error("quadrature did not converge at r = {r}; partial value {partial}")]
    QuadratureDidNotConverge { r: f64, partial: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Params(#[from] ParamsError),
}

fn check_radius(r: f64) -> Result<(), PotentialError> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(PotentialError::InvalidRadius { r })
    }
}

/// Direct quadrature route:
///
/// ```text
/// U(r) = (A / r) * int_0^inf (1 - sech^2(zeta)/2 - sech^4(zeta)/2)
///                            * exp(-z cosh zeta) d zeta
/// ```
pub fn uehling_integral(
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<PotentialSample, PotentialError> {
    check_radius(r)?;
    let z = params.b() * r;
    let scale = params.prefactor() / r;
    if params.q() == 0.0 {
        // Skip the quadrature: the result is identically zero in the charge.
        return Ok(PotentialSample {
            r,
            value: 0.0,
            route: Route::Integral,
            abs_error_estimate: 0.0,
        });
    }
    let quad = integrate_decaying(|zeta| uehling_integrand_transformed(zeta, z), z, cfg)
        .map_err(SpecFunError::from)?;
    if !quad.converged {
        return Err(PotentialError::QuadratureDidNotConverge {
            r,
            partial: scale * quad.value,
        });
    }
    Ok(PotentialSample {
        r,
        value: scale * quad.value,
        route: Route::Integral,
        abs_error_estimate: scale.abs() * quad.abs_error_estimate,
    })
}

/// Kernel-family route: the defining integral equals
/// `K_0(z) - Ki_2(z)/2 - Ki_4(z)/2`.
pub fn uehling_closed_ki024(
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<PotentialSample, PotentialError> {
    check_radius(r)?;
    let z = params.b() * r;
    let k0 = specfun::k0(z, cfg)?;
    let ki2 = specfun::bickley_ki(2, z, cfg)?;
    let ki4 = specfun::bickley_ki(4, z, cfg)?;
    let scale = params.prefactor() / r;
    Ok(PotentialSample {
        r,
        value: scale * (k0.value - 0.5 * ki2.value - 0.5 * ki4.value),
        route: Route::ClosedKi024,
        abs_error_estimate: scale.abs()
            * (k0.abs_error_estimate
                + 0.5 * ki2.abs_error_estimate
                + 0.5 * ki4.abs_error_estimate),
    })
}

/// Three-term reduction of the kernel combination (one application of the
/// order-lowering recurrence):
///
/// ```text
/// r U(r) / A = (1 + z^2/12) K_0(z) - (z/12) Ki_1(z) - (5/6 + z^2/12) Ki_2(z)
/// ```
///
/// This is the authoritative closed form used for tabulation defaults.
pub fn uehling_closed_reduced(
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<PotentialSample, PotentialError> {
    check_radius(r)?;
    let z = params.b() * r;
    let k0 = specfun::k0(z, cfg)?;
    let ki1 = specfun::bickley_ki(1, z, cfg)?;
    let ki2 = specfun::bickley_ki(2, z, cfg)?;
    let z2_12 = z * z / 12.0;
    let c0 = 1.0 + z2_12;
    let c1 = z / 12.0;
    let c2 = 5.0 / 6.0 + z2_12;
    let scale = params.prefactor() / r;
    Ok(PotentialSample {
        r,
        value: scale * (c0 * k0.value - c1 * ki1.value - c2 * ki2.value),
        route: Route::ClosedReduced,
        abs_error_estimate: scale.abs()
            * (c0 * k0.abs_error_estimate
                + c1 * ki1.abs_error_estimate
                + c2 * ki2.abs_error_estimate),
    })
}

/// Closed form whose bracket coefficients depend on `b` but not on `r`:
///
/// ```text
/// U(r) = (q alpha / (18 pi r)) * [ (12 + b^2) K_0(b r)
///                                  - b Ki_1(b r)
///                                  - (10 + b^2) Ki_2(b r) ]
/// ```
///
/// It agrees with [`uehling_closed_reduced`] at `r = 1` exactly and deviates
/// elsewhere; the toolkit keeps it as a diagnostic subject rather than as an
/// interchangeable route (see the `constant_coeff_vs_integral` diagnostic and
/// the residual checks in `odecheck`).
pub fn uehling_constant_coeff(
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<PotentialSample, PotentialError> {
    check_radius(r)?;
    let b = params.b();
    let z = b * r;
    let k0 = specfun::k0(z, cfg)?;
    let ki1 = specfun::bickley_ki(1, z, cfg)?;
    let ki2 = specfun::bickley_ki(2, z, cfg)?;
    let c0 = 12.0 + b * b;
    let c1 = b;
    let c2 = 10.0 + b * b;
    let scale = params.bracket_prefactor() / r;
    Ok(PotentialSample {
        r,
        value: scale * (c0 * k0.value - c1 * ki1.value - c2 * ki2.value),
        route: Route::ConstantCoeff,
        abs_error_estimate: scale.abs()
            * (c0 * k0.abs_error_estimate
                + c1 * ki1.abs_error_estimate
                + c2 * ki2.abs_error_estimate),
    })
}

/// Evaluate a pointwise route. [`Route::OdeIvp`] is rejected: trajectories
/// are built in `odecheck`.
pub fn evaluate_route(
    route: Route,
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<PotentialSample, PotentialError> {
    match route {
        Route::Integral => uehling_integral(r, params, cfg),
        Route::ClosedKi024 => uehling_closed_ki024(r, params, cfg),
        Route::ClosedReduced => uehling_closed_reduced(r, params, cfg),
        Route::ConstantCoeff => uehling_constant_coeff(r, params, cfg),
        Route::OdeIvp => Err(PotentialError::RouteNotPointwise { route }),
    }
}

/// Radial derivative `dU/dr` obtained by differentiating the defining
/// integral under the integral sign *inside the integrand only*:
///
/// ```text
/// dU = -(b A / r) int_0^inf (cosh zeta - sech(zeta)/2 - sech^3(zeta)/2)
///                           * exp(-z cosh zeta) d zeta
/// ```
///
/// Note this keeps only the term generated by the exponential; the `1/r`
/// amplitude also depends on `r`, so this expression differs from the full
/// derivative of `U` by `U(r)/r`. It is provided verbatim as a diagnostic
/// subject — the `derivative_integral_vs_finite_difference` diagnostic in
/// `odecheck` measures exactly that gap.
pub fn uehling_derivative_integral(
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<f64, PotentialError> {
    check_radius(r)?;
    if params.q() == 0.0 {
        return Ok(0.0);
    }
    let b = params.b();
    let z = b * r;
    let quad = integrate_decaying(
        |zeta| {
            let sech = zeta.cosh().recip();
            let weight = zeta.cosh() - 0.5 * sech - 0.5 * sech * sech * sech;
            weight * (-crate::quadrature::scaled_cosh(z, zeta)).exp()
        },
        z,
        cfg,
    )
    .map_err(SpecFunError::from)?;
    if !quad.converged {
        return Err(PotentialError::QuadratureDidNotConverge {
            r,
            partial: -(b * params.prefactor() / r) * quad.value,
        });
    }
    Ok(-(b * params.prefactor() / r) * quad.value)
}

/// Full potential of the source: Coulomb term plus the correction
/// (evaluated through the reduced closed form).
pub fn total_potential(
    r: f64,
    params: &PhysicalParams,
    cfg: &AccuracyConfig,
) -> Result<f64, PotentialError> {
    check_radius(r)?;
    let correction = uehling_closed_reduced(r, params, cfg)?;
    Ok(params.q() / r + correction.value)
}

/// Electron–source interaction energy through the vacuum-polarization
/// correction, in atomic units:
///
/// ```text
/// E(r) = (2 q alpha^2 / (3 pi r)) * I(2 r / alpha)
/// ```
///
/// with `I` the shared kernel integral; `r` is in Bohr radii.  This equals
/// `alpha` times the atomic-units potential value: the extra factor of
/// `alpha` converts the potential from the energy unit paired with the
/// Compton-wavelength length convention into the expression above.  The
/// value is evaluated through the reduced closed form; the test suite
/// cross-checks it against direct quadrature of the kernel integral.
pub fn interaction_energy_atomic(
    r: f64,
    q: f64,
    alpha: f64,
    cfg: &AccuracyConfig,
) -> Result<f64, PotentialError> {
    let params = PhysicalParams::new(q, alpha, UnitSystem::Atomic)?;
    check_radius(r)?;
    let sample = uehling_closed_reduced(r, &params, cfg)?;
    Ok(alpha * sample.value)
}

/// Convert a radius between unit systems: `r_atomic = alpha * r_rel`
/// (one Bohr radius is `1/alpha` reduced Compton wavelengths).
pub fn convert_length(r: f64, from: UnitSystem, to: UnitSystem, alpha: f64) -> f64 {
    match (from, to) {
        (UnitSystem::Relativistic, UnitSystem::Atomic) => alpha * r,
        (UnitSystem::Atomic, UnitSystem::Relativistic) => r / alpha,
        _ => r,
    }
}

/// Convert a potential/energy value between unit systems:
/// `U_atomic = U_rel / alpha` (one rest energy is `1/alpha` of the energy
/// unit `alpha * m c^2` paired with the relativistic length convention...
/// i.e. the relativistic energy unit equals `alpha^-1` Hartree-convention
/// units under this toolkit's conventions).
pub fn convert_potential(u: f64, from: UnitSystem, to: UnitSystem, alpha: f64) -> f64 {
    match (from, to) {
        (UnitSystem::Relativistic, UnitSystem::Atomic) => u / alpha,
        (UnitSystem::Atomic, UnitSystem::Relativistic) => u * alpha,
        _ => u,
    }
}

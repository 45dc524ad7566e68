//! Modified Bessel functions `K0`, `K1` and Bickley functions `Ki_n`,
//! evaluated from their cosh-kernel integral representations
//! (DLMF 10.32.9 and A&S 11.2.10 respectively):
//!
//! ```text
//! K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt
//! Ki_n(x) = int_0^inf exp(-x cosh t) sech^n(t) dt,     Ki_0 = K_0
//! ```
//!
//! `Ki_n` is equivalently the n-fold repeated integral of `K_0`
//! (`Ki_n(x) = int_x^inf Ki_{n-1}(u) du`); the test suite asserts that
//! equivalence numerically rather than assuming it.
//!
//! One quadrature engine serves every kernel, so accuracy behaves uniformly
//! across the family: values converge to a few ulps of relative error, which
//! the downstream closed-form identities and finite-difference checks need.

use thiserror::Error;

use crate::quadrature::{
    config_for_decay, integrate_truncated, scaled_cosh, truncation_point, AccuracyConfig,
    QuadratureError,
};

/// Arguments at or above this threshold make `exp(-x)` underflow toward the
/// subnormal range; results are reported as exactly zero with a flag instead
/// of as meaningless denormal noise.
pub const UNDERFLOW_THRESHOLD: f64 = 700.0;

/// A special-function value with quadrature metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult {
    pub value: f64,
    /// Absolute error estimate propagated from the quadrature engine.
    pub abs_error_estimate: f64,
    /// True when the argument exceeded [`UNDERFLOW_THRESHOLD`] and the value
    /// was therefore reported as exactly zero.
    pub underflowed: bool,
}

impl SpecFunResult {
    fn underflow() -> Self {
        Self {
            value: 0.0,
            abs_error_estimate: 0.0,
            underflowed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("{func} requires a positive finite argument, got {x}")]
    NonPositiveArgument { func: &'static str, x: f64 },
    #[error("{func} requires a non-negative finite argument, got {x}")]
    NegativeArgument { func: &'static str, x: f64 },
    #[error("ki_0 = k0 diverges logarithmically at x = 0")]
    LogDivergenceAtZero,
    #[error("recurrence index must be at least 2, got {n}")]
    RecurrenceIndexTooSmall { n: u32 },
    #[error("derivative order must be at least 1")]
    DerivativeOrderZero,
    #[error("{func}({x}) overflows f64")]
    Overflow { func: &'static str, x: f64 },
    #[error("quadrature for {func}({x}) did not converge; last delta {last_delta:e}")]
    NoConvergence {
        func: &'static str,
        x: f64,
        last_delta: f64,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

enum Kernel {
    /// `cosh t` weight: `K_1`.
    CoshWeight,
    /// `sech^n t` weight: `Ki_n` (`n = 0` is `K_0`).
    SechPow(u32),
}

/// Truncation point at which `sech^n t` alone pushes contributions below
/// 1e-19 of the typical value scale; used when the exponential factor is weak
/// or absent (`x = 0`).
fn sech_truncation(n: u32) -> f64 {
    (44.0 + n as f64 * core::f64::consts::LN_2) / n as f64 + 1.0
}

fn kernel_integral(
    func: &'static str,
    x: f64,
    kernel: Kernel,
    cfg: &AccuracyConfig,
) -> Result<SpecFunResult, SpecFunError> {
    if x >= UNDERFLOW_THRESHOLD {
        return Ok(SpecFunResult::underflow());
    }

    let t_max = match kernel {
        Kernel::CoshWeight | Kernel::SechPow(0) => truncation_point(x),
        Kernel::SechPow(n) => {
            let sech_t = sech_truncation(n);
            if x > 0.0 {
                truncation_point(x).min(sech_t)
            } else {
                sech_t
            }
        }
    };

    // Reference the absolute stopping floor to the kernel's `exp(-x)`
    // amplitude so large arguments keep full relative accuracy.
    let cfg_eff = config_for_decay(cfg, x);
    let result = match kernel {
        Kernel::CoshWeight => integrate_truncated(
            |t| {
                let exponent = scaled_cosh(x, t);
                // cosh t = exponent / x on this grid, which avoids a second
                // cosh overflow path.
                (exponent / x) * (-exponent).exp()
            },
            t_max,
            &cfg_eff,
        )?,
        Kernel::SechPow(n) => integrate_truncated(
            |t| {
                let sech = t.cosh().recip();
                let exponent = scaled_cosh(x, t);
                sech.powi(n.min(i32::MAX as u32) as i32) * (-exponent).exp()
            },
            t_max,
            &cfg_eff,
        )?,
    };

    if !result.converged {
        return Err(SpecFunError::NoConvergence {
            func,
            x,
            last_delta: result.abs_error_estimate,
        });
    }
    if !result.value.is_finite() {
        return Err(SpecFunError::Overflow { func, x });
    }
    Ok(SpecFunResult {
        value: result.value,
        abs_error_estimate: result.abs_error_estimate,
        underflowed: false,
    })
}

/// Modified Bessel function `K_0(x)` for `x > 0`.
pub fn k0(x: f64, cfg: &AccuracyConfig) -> Result<SpecFunResult, SpecFunError> {
    if x == 0.0 {
        return Err(SpecFunError::LogDivergenceAtZero);
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(SpecFunError::NonPositiveArgument { func: "k0", x });
    }
    kernel_integral("k0", x, Kernel::SechPow(0), cfg)
}

/// Modified Bessel function `K_1(x)` for `x > 0`.
pub fn k1(x: f64, cfg: &AccuracyConfig) -> Result<SpecFunResult, SpecFunError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(SpecFunError::NonPositiveArgument { func: "k1", x });
    }
    kernel_integral("k1", x, Kernel::CoshWeight, cfg)
}

/// Bickley function `Ki_n(x)` for `x >= 0`, except the logarithmically
/// divergent `(n, x) = (0, 0)`.
pub fn bickley_ki(n: u32, x: f64, cfg: &AccuracyConfig) -> Result<SpecFunResult, SpecFunError> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(SpecFunError::NegativeArgument { func: "bickley_ki", x });
    }
    if n == 0 && x == 0.0 {
        return Err(SpecFunError::LogDivergenceAtZero);
    }
    kernel_integral("bickley_ki", x, Kernel::SechPow(n), cfg)
}

/// One step of the Bickley three-term recurrence (A&S 11.2.14):
///
/// ```text
/// n Ki_{n+1}(x) = -x Ki_n(x) + (n - 1) Ki_{n-1}(x) + x Ki_{n-2}(x)
/// ```
///
/// Returns `Ki_{n+1}(x)` from the three lower-order values; `n >= 2` so all
/// participating orders are non-negative.
pub fn ki_recurrence_next(
    n: u32,
    x: f64,
    ki_nm2: f64,
    ki_nm1: f64,
    ki_n: f64,
) -> Result<f64, SpecFunError> {
    if n < 2 {
        return Err(SpecFunError::RecurrenceIndexTooSmall { n });
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(SpecFunError::NegativeArgument {
            func: "ki_recurrence_next",
            x,
        });
    }
    Ok((-x * ki_n + (n as f64 - 1.0) * ki_nm1 + x * ki_nm2) / n as f64)
}

/// Radial derivative of `K_nu(b r)` with respect to `r` at fixed `b`
/// (DLMF 10.29.2):
///
/// ```text
/// d/dr K_nu(b r) = -(nu / r) K_nu(b r) - b K_{nu-1}(b r)
/// ```
///
/// Orders above 1 are reached by the upward recurrence
/// `K_{m+1}(x) = K_{m-1}(x) + (2m/x) K_m(x)`, which is stable for `K`.
pub fn k_nu_derivative(
    nu: u32,
    b: f64,
    r: f64,
    cfg: &AccuracyConfig,
) -> Result<SpecFunResult, SpecFunError> {
    if nu == 0 {
        return Err(SpecFunError::DerivativeOrderZero);
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(SpecFunError::NonPositiveArgument {
            func: "k_nu_derivative",
            x: b,
        });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(SpecFunError::NonPositiveArgument {
            func: "k_nu_derivative",
            x: r,
        });
    }

    let x = b * r;
    let low = k0(x, cfg)?;
    let high = k1(x, cfg)?;
    if low.underflowed || high.underflowed {
        return Ok(SpecFunResult::underflow());
    }

    // Walk (K_{m-1}, K_m) up to m = nu, carrying error estimates along.
    let (mut below, mut at) = (low.value, high.value);
    let (mut below_err, mut at_err) = (low.abs_error_estimate, high.abs_error_estimate);
    for m in 1..nu {
        let factor = 2.0 * m as f64 / x;
        let next = below + factor * at;
        let next_err = below_err + factor * at_err;
        below = at;
        at = next;
        below_err = at_err;
        at_err = next_err;
    }

    let value = -(nu as f64 / r) * at - b * below;
    if !value.is_finite() {
        return Err(SpecFunError::Overflow {
            func: "k_nu_derivative",
            x,
        });
    }
    Ok(SpecFunResult {
        value,
        abs_error_estimate: (nu as f64 / r) * at_err + b * below_err,
        underflowed: false,
    })
}

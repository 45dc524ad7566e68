//! Trapezoidal quadrature for smooth integrands on `[0, inf)` that decay at
//! least as fast as `exp(-c cosh t)`, plus the two forms of the
//! vacuum-polarization integrand evaluated by the rest of the crate.
//!
//! The integrands handled here are even around `t = 0` and, after truncation,
//! negligible together with all derivatives at the right endpoint.  For such
//! functions every Euler-Maclaurin correction term of the trapezoidal rule
//! vanishes, so the rule converges super-geometrically in the step size: each
//! step halving roughly squares the error.  A handful of halvings therefore
//! reaches machine accuracy, and the difference between the last two
//! refinements is a reliable (conservative) error estimate.

use thiserror::Error;

/// Exponent budget used to truncate `exp(-c cosh t)` tails.  `exp(-745)` is
/// already below the smallest subnormal, and the extra margin over 745 absorbs
/// polynomially growing kernel weights such as the `cosh t` factor of `K_1`.
const TRUNCATION_EXPONENT: f64 = 760.0;

/// Shared accuracy knobs for quadrature and the finite-difference stencils
/// built on top of it.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyConfig {
    /// Relative tolerance on the last refinement delta.
    pub rel_tol: f64,
    /// Absolute tolerance floor on the last refinement delta.
    pub abs_tol: f64,
    /// Step size of the coarsest trapezoidal grid.
    pub initial_step: f64,
    /// Maximum number of step halvings before giving up.
    pub max_refinements: u32,
    /// Relative step (times `r`) for first-derivative stencils.
    pub fd_step: f64,
    /// Relative step (times `r`) for second-derivative stencils.  Larger than
    /// `fd_step` because the five-point second difference amplifies evaluation
    /// roundoff by `~5.3 / h^2`; at `1e-3 * r` the amplified noise stays two
    /// orders of magnitude below the 1e-7 derivative-chain tolerance while the
    /// `O(h^4)` truncation term remains near 1e-10.
    pub fd_step_second: f64,
}

impl Default for AccuracyConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            initial_step: 0.5,
            max_refinements: 10,
            fd_step: 1e-5,
            fd_step_second: 1e-3,
        }
    }
}

impl AccuracyConfig {
    /// Checks the invariants the evaluation routines rely on.
    pub fn validate(&self) -> Result<(), QuadratureError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol)
            || !positive(self.abs_tol)
            || !positive(self.initial_step)
            || !positive(self.fd_step)
            || !positive(self.fd_step_second)
        {
            return Err(QuadratureError::InvalidConfig {
                reason: "tolerances and steps must be positive and finite",
            });
        }
        if self.max_refinements == 0 {
            return Err(QuadratureError::InvalidConfig {
                reason: "max_refinements must be at least 1",
            });
        }
        Ok(())
    }
}

/// Outcome of one quadrature, with enough metadata for callers to decide
/// whether to trust it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute difference between the last two refinements.
    pub abs_error_estimate: f64,
    /// Total number of integrand evaluations.
    pub evaluations: u64,
    /// Whether the refinement deltas met the configured tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid accuracy configuration: {reason}")]
    InvalidConfig { reason: &'static str },
    #[error("integrand returned a non-finite value at t = {t}")]
    NonFiniteIntegrand { t: f64 },
    #[error("truncation point must be positive and finite, got {t_max}")]
    InvalidTruncation { t_max: f64 },
    #[error("decay scale must be positive and finite, got {decay_scale}")]
    InvalidDecayScale { decay_scale: f64 },
}

/// Neumaier compensated summation; keeps trapezoidal sums accurate to a few
/// ulps independent of node count, which the downstream finite-difference
/// checks rely on.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// `x * cosh t` without overflowing `cosh` for large `t`; may return infinity,
/// which callers fold into `exp(-inf) = 0`.
pub(crate) fn scaled_cosh(x: f64, t: f64) -> f64 {
    if t < 700.0 {
        x * t.cosh()
    } else {
        // cosh t = exp(t)/2 to machine accuracy here.
        (x.ln() + t - core::f64::consts::LN_2).exp()
    }
}

/// Truncation point for an integrand bounded by `C exp(-decay_scale cosh t)`:
/// beyond it every contribution is below the subnormal range.
pub fn truncation_point(decay_scale: f64) -> f64 {
    let ratio = TRUNCATION_EXPONENT / decay_scale;
    if ratio.is_finite() {
        ratio.max(1.0 + 1e-6).acosh()
    } else {
        // acosh(y) ~ ln(2y) for large y, evaluated in logs to dodge overflow.
        (2.0 * TRUNCATION_EXPONENT).ln() - decay_scale.ln()
    }
}

/// Copy of `cfg` whose `abs_tol` is referenced to the `exp(-decay_scale)`
/// amplitude of the integrand family.
///
/// Kernels with a strong exponential envelope have values many orders of
/// magnitude below 1; a fixed absolute floor would let the refinement loop
/// stop while the *relative* error is still large.  Rescaling the floor by
/// the envelope amplitude keeps relative accuracy uniform across the whole
/// argument range without touching the caller's configuration.
pub(crate) fn config_for_decay(cfg: &AccuracyConfig, decay_scale: f64) -> AccuracyConfig {
    let amplitude = (-decay_scale).exp();
    AccuracyConfig {
        abs_tol: (cfg.abs_tol * amplitude).max(f64::MIN_POSITIVE),
        ..cfg.clone()
    }
}

/// Integrates `f` over `[0, inf)` given the decay scale `c` of its
/// `exp(-c cosh t)` envelope, by truncating at [`truncation_point`] and
/// delegating to [`integrate_truncated`].
///
/// `cfg.abs_tol` is interpreted relative to the envelope amplitude
/// `exp(-decay_scale)` (see [`config_for_decay`]), so strongly decayed
/// integrals converge to full relative accuracy.
pub fn integrate_decaying<F>(
    f: F,
    decay_scale: f64,
    cfg: &AccuracyConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(decay_scale.is_finite() && decay_scale > 0.0) {
        return Err(QuadratureError::InvalidDecayScale { decay_scale });
    }
    integrate_truncated(
        f,
        truncation_point(decay_scale),
        &config_for_decay(cfg, decay_scale),
    )
}

/// Trapezoidal rule on `[0, t_max]` with step halving until two successive
/// refinements agree within `max(abs_tol, rel_tol * |value|)`.
///
/// Convergence is only accepted after at least two halvings so an
/// under-resolved coarse grid cannot fake agreement.  Non-convergence is not
/// an error: the caller receives `converged = false` and decides.
pub fn integrate_truncated<F>(
    f: F,
    t_max: f64,
    cfg: &AccuracyConfig,
) -> Result<QuadratureResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(QuadratureError::InvalidTruncation { t_max });
    }

    let eval = |t: f64| -> Result<f64, QuadratureError> {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFiniteIntegrand { t })
        }
    };

    // Node counts double each refinement, so earlier nodes are reused and the
    // weighted node sum can be accumulated incrementally.
    let mut intervals: u64 = ((t_max / cfg.initial_step).ceil() as u64).max(4);
    let mut node_sum = Neumaier::default();
    node_sum.add(0.5 * eval(0.0)?);
    node_sum.add(0.5 * eval(t_max)?);
    let h0 = t_max / intervals as f64;
    for k in 1..intervals {
        node_sum.add(eval(k as f64 * h0)?);
    }
    let mut evaluations = intervals + 1;
    let mut value = h0 * node_sum.total();
    let mut abs_error_estimate = f64::INFINITY;
    let mut converged = false;

    for refinement in 0..cfg.max_refinements {
        let h = t_max / intervals as f64;
        let half = 0.5 * h;
        for k in 0..intervals {
            node_sum.add(eval(k as f64 * h + half)?);
        }
        evaluations += intervals;
        intervals *= 2;
        let refined = (t_max / intervals as f64) * node_sum.total();
        abs_error_estimate = (refined - value).abs();
        value = refined;
        if refinement >= 1
            && abs_error_estimate <= cfg.abs_tol.max(cfg.rel_tol * value.abs())
        {
            converged = true;
            break;
        }
    }

    Ok(QuadratureResult {
        value,
        abs_error_estimate,
        evaluations,
        converged,
    })
}

/// Vacuum-polarization integrand after the substitution `xi = cosh zeta`:
///
/// ```text
/// g(zeta; z) = (1 - sech^2(zeta)/2 - sech^4(zeta)/2) exp(-z cosh zeta)
/// ```
///
/// Even in `zeta`, exactly zero at `zeta = 0`, and decaying like
/// `exp(-z cosh zeta)`, which makes it ideal for [`integrate_decaying`].
pub fn uehling_integrand_transformed(zeta: f64, z: f64) -> f64 {
    let sech = zeta.cosh().recip();
    let s2 = sech * sech;
    let poly = 1.0 - 0.5 * s2 - 0.5 * s2 * s2;
    let exponent = scaled_cosh(z, zeta);
    poly * (-exponent).exp()
}

/// Untransformed vacuum-polarization integrand over `xi` in `[1, inf)`:
///
/// ```text
/// g(xi; w) = (1 + 1/(2 xi^2)) sqrt(xi^2 - 1) / xi^2 * exp(-w xi)
/// ```
///
/// Kept for parity tests against the transformed form; the inverse
/// square-root slope at `xi = 1` makes it a poor quadrature target directly.
pub fn uehling_integrand_raw(xi: f64, w: f64) -> f64 {
    let xi2 = xi * xi;
    // max(.., 0) guards the sqrt against xi = 1 - eps from stencil arithmetic.
    let root = (xi2 - 1.0).max(0.0).sqrt();
    (1.0 + 0.5 / xi2) * root / xi2 * (-w * xi).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Oracle values from tests/fixtures/specfun_reference.txt.
    const K0_1: f64 = 0.42102443824070833;
    const K0_50: f64 = 3.4101677497894955e-23;
    const KI1_1: f64 = 0.32828647817111835;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn recovers_k0_kernel_integral() {
        let cfg = AccuracyConfig::default();
        let res = integrate_decaying(|t| (-t.cosh()).exp(), 1.0, &cfg).unwrap();
        assert!(res.converged);
        assert!(rel(res.value, K0_1) < 1e-12, "value {}", res.value);
        assert!(res.abs_error_estimate <= (1e-12 * res.value).max(1e-14));
    }

    #[test]
    fn recovers_ki1_kernel_integral() {
        let cfg = AccuracyConfig::default();
        let res =
            integrate_decaying(|t| (-t.cosh()).exp() / t.cosh(), 1.0, &cfg).unwrap();
        assert!(res.converged);
        assert!(rel(res.value, KI1_1) < 1e-12, "value {}", res.value);
    }

    #[test]
    fn keeps_relative_accuracy_for_strongly_decayed_kernels() {
        // The value here is ~3e-23; a fixed 1e-14 absolute stopping floor
        // would accept ~1e-3 relative error.  The decay-scaled floor must
        // keep the result at full relative accuracy.
        let cfg = AccuracyConfig::default();
        let res = integrate_decaying(|t| (-scaled_cosh(50.0, t)).exp(), 50.0, &cfg).unwrap();
        assert!(res.converged);
        assert!(rel(res.value, K0_50) < 1e-12, "value {}", res.value);
    }

    #[test]
    fn zero_integrand_is_exactly_zero() {
        let cfg = AccuracyConfig::default();
        let res = integrate_decaying(|_| 0.0, 2.0, &cfg).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.abs_error_estimate, 0.0);
        assert!(res.converged);
        assert!(res.evaluations > 0);
    }

    #[test]
    fn nan_integrand_is_a_hard_error() {
        let cfg = AccuracyConfig::default();
        let err = integrate_truncated(|t| if t > 1.0 { f64::NAN } else { 1.0 }, 3.0, &cfg)
            .unwrap_err();
        assert!(matches!(err, QuadratureError::NonFiniteIntegrand { .. }));
    }

    #[test]
    fn rejects_bad_truncation_and_decay_scale() {
        let cfg = AccuracyConfig::default();
        assert!(matches!(
            integrate_truncated(|_| 0.0, -1.0, &cfg),
            Err(QuadratureError::InvalidTruncation { .. })
        ));
        assert!(matches!(
            integrate_decaying(|_| 0.0, 0.0, &cfg),
            Err(QuadratureError::InvalidDecayScale { .. })
        ));
        assert!(matches!(
            integrate_decaying(|_| 0.0, f64::NAN, &cfg),
            Err(QuadratureError::InvalidDecayScale { .. })
        ));
    }

    #[test]
    fn rejects_invalid_config() {
        let cfg = AccuracyConfig {
            rel_tol: 0.0,
            ..AccuracyConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = AccuracyConfig {
            max_refinements: 0,
            ..AccuracyConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reports_non_convergence_without_erroring() {
        // A single refinement cannot satisfy the two-halving acceptance rule.
        let cfg = AccuracyConfig {
            max_refinements: 1,
            ..AccuracyConfig::default()
        };
        let res = integrate_decaying(|t| (-t.cosh()).exp(), 1.0, &cfg).unwrap();
        assert!(!res.converged);
        assert!(res.abs_error_estimate.is_finite());
    }

    #[test]
    fn one_more_halving_stays_within_reported_estimate() {
        let cfg = AccuracyConfig::default();
        let coarse = integrate_decaying(|t| (-2.0 * t.cosh()).exp(), 2.0, &cfg).unwrap();
        let fine_cfg = AccuracyConfig {
            rel_tol: 1e-15,
            abs_tol: 1e-18,
            ..cfg
        };
        let fine = integrate_decaying(|t| (-2.0 * t.cosh()).exp(), 2.0, &fine_cfg).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.abs_error_estimate.max(1e-16));
    }

    #[test]
    fn transformed_integrand_vanishes_at_origin() {
        assert_eq!(uehling_integrand_transformed(0.0, 2.0), 0.0);
        assert_eq!(uehling_integrand_transformed(0.0, 1e-3), 0.0);
    }

    #[test]
    fn transformed_integrand_decays_at_large_argument() {
        assert!(uehling_integrand_transformed(40.0, 2.0) == 0.0);
        assert!(uehling_integrand_transformed(800.0, 1e-3) == 0.0);
    }

    #[test]
    fn raw_integrand_vanishes_at_threshold() {
        assert_eq!(uehling_integrand_raw(1.0, 2.0), 0.0);
        assert!(uehling_integrand_raw(1e6, 2.0) == 0.0);
    }

    #[test]
    fn change_of_variables_matches_pointwise() {
        // d(xi) = sinh(zeta) d(zeta) at xi = cosh(zeta).
        let zeta: f64 = 1.0;
        let z = 2.0;
        let lhs = uehling_integrand_transformed(zeta, z);
        let rhs = uehling_integrand_raw(zeta.cosh(), z) * zeta.sinh();
        assert!(rel(lhs, rhs) < 1e-15, "lhs {lhs} rhs {rhs}");
    }

    /// The raw form integrates over `xi` with an inverse-square-root edge; the
    /// substitution `xi = 1 + u^2` removes it and leaves an even integrand in
    /// `u` with Gaussian decay, which the engine handles with an explicit
    /// truncation point.
    fn raw_route_integral(w: f64, cfg: &AccuracyConfig) -> QuadratureResult {
        let u_max = (TRUNCATION_EXPONENT / w).sqrt();
        integrate_truncated(
            |u| 2.0 * u * uehling_integrand_raw(1.0 + u * u, w),
            u_max,
            cfg,
        )
        .unwrap()
    }

    #[test]
    fn raw_and_transformed_routes_agree_on_grid() {
        let cfg = AccuracyConfig::default();
        for &w in &[0.02, 0.1, 1.0, 5.0, 20.0] {
            let raw = raw_route_integral(w, &cfg);
            let tran = integrate_decaying(|t| uehling_integrand_transformed(t, w), w, &cfg)
                .unwrap();
            assert!(raw.converged && tran.converged);
            assert!(
                rel(raw.value, tran.value) < 1e-10,
                "w = {w}: raw {} vs transformed {}",
                raw.value,
                tran.value
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn raw_and_transformed_routes_agree(w in 0.02f64..20.0) {
            let cfg = AccuracyConfig::default();
            let raw = raw_route_integral(w, &cfg);
            let tran = integrate_decaying(
                |t| uehling_integrand_transformed(t, w), w, &cfg).unwrap();
            prop_assert!(rel(raw.value, tran.value) < 1e-9);
        }

        #[test]
        fn engine_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let cfg = AccuracyConfig::default();
            let f = |t: f64| (-t.cosh()).exp();
            let g = |t: f64| (-2.0 * t.cosh()).exp() / t.cosh();
            let combined = integrate_decaying(|t| a * f(t) + b * g(t), 1.0, &cfg)
                .unwrap()
                .value;
            let fa = integrate_decaying(f, 1.0, &cfg).unwrap().value;
            let gb = integrate_decaying(g, 1.0, &cfg).unwrap().value;
            let expect = a * fa + b * gb;
            prop_assert!((combined - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
        }
    }
}

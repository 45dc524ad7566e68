//! Radial evaluation grids with exact endpoint reproduction.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GridError {
    #[error("grid bounds must satisfy 0 < min <= max and be finite, got [{min}, {max}]")]
    InvalidBounds { min: f64, max: f64 },
    #[error("grid needs at least one point")]
    ZeroCount,
}

fn check_bounds(min: f64, max: f64, count: usize) -> Result<(), GridError> {
    if count == 0 {
        return Err(GridError::ZeroCount);
    }
    if !(min.is_finite() && max.is_finite() && min > 0.0 && min <= max) {
        return Err(GridError::InvalidBounds { min, max });
    }
    Ok(())
}

/// `count` logarithmically spaced points on `[min, max]`; the first and last
/// points equal the bounds exactly (no `exp(ln(..))` round-trip drift).
pub fn log_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, GridError> {
    check_bounds(min, max, count)?;
    if count == 1 {
        return Ok(vec![min]);
    }
    let (lmin, lmax) = (min.ln(), max.ln());
    let step = (lmax - lmin) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| match i {
            0 => min,
            i if i == count - 1 => max,
            i => (lmin + i as f64 * step).exp(),
        })
        .collect())
}

/// `count` linearly spaced points on `[min, max]` with exact endpoints.
pub fn lin_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, GridError> {
    check_bounds(min, max, count)?;
    if count == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| match i {
            0 => min,
            i if i == count - 1 => max,
            i => min + i as f64 * step,
        })
        .collect())
}

/// The default verification grid: 60 logarithmically spaced radii spanning
/// the logarithmic short-range region, the transition region, and the
/// exponential tail (relativistic units).
pub fn default_verification_grid() -> Vec<f64> {
    log_grid(1e-3, 20.0, 60).expect("default grid bounds are valid")
}

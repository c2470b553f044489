//! Rate/distance bound calculators for sum-rank codes over `End_k(ℓ)^s`:
//! the field constant `γ_q = Π_{i≥1}(1 − q^{−i})^{−1}`, finite-length and
//! asymptotic Gilbert–Varshamov-type rate bounds, the competing linear
//! bound attainable from curve families over square fields, and CSV table
//! emission of the rate/distance trade-off.
//!
//! Rates use `R = κ/(rs)` and relative distances `δ = d/(rs)`. All
//! arithmetic is double precision; internal comparisons tolerate 1e−9.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("q must be an integer ≥ 2, got {0}")]
    InvalidQ(u64),
    #[error("q must be a perfect square, got {0}")]
    QNotSquare(u64),
    #[error("delta = {delta} too small: need delta > 2/(r·s) = {min} and round(delta·r·s) ≥ 2")]
    DeltaTooSmall { delta: f64, min: f64 },
}

/// Numerical slack for internal comparisons.
pub const TOLERANCE: f64 = 1e-9;

/// Twist order: a concrete `r ≥ 1` or the `r → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    Finite(u32),
    Infinite,
}

fn check_q(q: u64) -> Result<(), BoundsError> {
    if q < 2 {
        return Err(BoundsError::InvalidQ(q));
    }
    Ok(())
}

fn log_q(q: f64, x: f64) -> f64 {
    x.ln() / q.ln()
}

/// `γ_q = Π_{i=1}^∞ (1 − q^{−i})^{−1}`, truncated once a factor deviates
/// from 1 by less than 1e−15. Decreases toward 1 as `q` grows.
pub fn gamma_q(q: u64) -> Result<f64, BoundsError> {
    check_q(q)?;
    let qf = q as f64;
    let mut product = 1.0;
    let mut qi = 1.0;
    loop {
        qi /= qf;
        let factor = 1.0 / (1.0 - qi);
        product *= factor;
        if factor - 1.0 < 1e-15 {
            return Ok(product);
        }
    }
}

/// Finite-length Gilbert–Varshamov-type bound: the largest rate `R` such
/// that a code of `s` blocks and relative distance `δ` is guaranteed to
/// exist satisfies
/// `R ≤ δ² − δ(2 + 2/(sr)) + 1 + 2/(sr) + 1/(s²r²)
///    − (Σ_{i=1}^{d−1} log_q(1 + (s−1)/i) + log_q(d−1))/(r²s)
///    − log_q(γ_q)/r²`
/// with `d = round(δ·s·r)`. Requires `δ > 2/(rs)` and `d ≥ 2`.
pub fn gv_finite(q: u64, r: u32, s: u64, delta: f64) -> Result<f64, BoundsError> {
    assert!(r >= 1 && s >= 1, "r and s must be positive");
    let gamma = gamma_q(q)?;
    let qf = q as f64;
    let rf = r as f64;
    let sf = s as f64;
    let rs = rf * sf;
    let min = 2.0 / rs;
    let d = (delta * rs).round();
    if delta <= min || d < 2.0 {
        return Err(BoundsError::DeltaTooSmall { delta, min });
    }
    let mut sum = 0.0;
    for i in 1..(d as u64) {
        sum += log_q(qf, 1.0 + (sf - 1.0) / i as f64);
    }
    sum += log_q(qf, d - 1.0);
    Ok(delta * delta - delta * (2.0 + 2.0 / rs) + 1.0 + 2.0 / rs + 1.0 / (rs * rs)
        - sum / (rf * rf * sf)
        - log_q(qf, gamma) / (rf * rf))
}

/// `s → ∞` limit of [`gv_finite`]:
/// `R ≤ (δ−1)² − (δ/r)·log_q(1 + 1/(δr)) − log_q(1+δr)/r² − log_q(γ_q)/r²`.
/// `δ = 0` evaluates the limit `1 − log_q(γ_q)/r²`; `r = ∞` leaves `(δ−1)²`.
pub fn gv_asymptotic(q: u64, r: Extension, delta: f64) -> Result<f64, BoundsError> {
    check_q(q)?;
    let base = (delta - 1.0) * (delta - 1.0);
    match r {
        Extension::Infinite => Ok(base),
        Extension::Finite(r) => {
            assert!(r >= 1, "r must be positive");
            let gamma = gamma_q(q)?;
            let qf = q as f64;
            let rf = r as f64;
            let dr = delta * rf;
            let mid = if delta <= 0.0 { 0.0 } else { (delta / rf) * log_q(qf, 1.0 + 1.0 / dr) };
            Ok(base - mid - log_q(qf, 1.0 + dr) / (rf * rf) - log_q(qf, gamma) / (rf * rf))
        }
    }
}

/// Rate guaranteed by long code families from curves over a square field:
/// `R < 1 − δ − 2/(√q − 1) + 1/(r(√q − 1))`; `r = ∞` drops the last term.
pub fn compgv(q: u64, r: Extension, delta: f64) -> Result<f64, BoundsError> {
    check_q(q)?;
    let sq = (q as f64).sqrt().round() as u64;
    if sq * sq != q {
        return Err(BoundsError::QNotSquare(q));
    }
    let sq = sq as f64;
    let base = 1.0 - delta - 2.0 / (sq - 1.0);
    Ok(match r {
        Extension::Infinite => base,
        Extension::Finite(r) => {
            assert!(r >= 1, "r must be positive");
            base + 1.0 / (r as f64 * (sq - 1.0))
        }
    })
}

/// Evenly spaced `δ`-grid `0, step, 2·step, … ≤ 1`, built from integer
/// multiples so rows are reproducible.
pub fn delta_grid(step: f64) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    (0..)
        .map(|i| i as f64 * step)
        .take_while(|d| *d <= 1.0 + TOLERANCE)
        .collect()
}

/// CSV table `delta,gv_asymptotic,compgv`, fixed 6-decimal formatting,
/// one row per grid point.
pub fn emit_table(q: u64, r: Extension, deltas: &[f64]) -> Result<String, BoundsError> {
    let mut out = String::from("delta,gv_asymptotic,compgv\n");
    for &delta in deltas {
        let gv = gv_asymptotic(q, r, delta)?;
        let cg = compgv(q, r, delta)?;
        out.push_str(&format!("{delta:.6},{gv:.6},{cg:.6}\n"));
    }
    Ok(out)
}

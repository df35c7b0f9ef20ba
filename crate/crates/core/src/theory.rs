//! Closed-form contraction constants and thresholds.

use crate::error::{Error, Result};
use crate::math;

fn check(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

/// Norm contraction q_N[δ] = (1 − δ(2α − δL²))^{1/2}.
pub fn q_norm(delta: f64, alpha: f64, l: f64) -> Result<f64> {
    check("alpha", alpha, alpha > 0.0 && alpha <= l, "(0, L]")?;
    check("delta", delta, delta > 0.0 && delta < 2.0 * alpha / (l * l), "(0, 2α/L²)")?;
    Ok(math::sqrt((1.0 - delta * (2.0 * alpha - delta * l * l)).max(0.0)))
}

/// Energy contraction q_E[δ] = (1 − (1 − δL[6M]/2)·2δα²/L[3M])^{1/2}.
pub fn q_energy(delta: f64, alpha: f64, l3m: f64, l6m: f64) -> Result<f64> {
    check("alpha", alpha, alpha > 0.0, "(0, inf)")?;
    check("L3M", l3m, l3m > 0.0 && l3m <= l6m, "(0, L6M]")?;
    check("delta", delta, delta > 0.0 && delta < 2.0 * alpha / (l6m * l6m), "(0, 2α/L6M²)")?;
    let q2 = 1.0 - (1.0 - 0.5 * delta * l6m) * 2.0 * delta * alpha * alpha / l3m;
    Ok(math::sqrt(q2.max(0.0)))
}

/// (κ[δ], K[δ]) = (1/δ − L[6M]/2, 1/δ − α/2).
pub fn energy_bracket(delta: f64, alpha: f64, l6m: f64) -> Result<(f64, f64)> {
    check("alpha", alpha, alpha > 0.0 && alpha <= l6m, "(0, L6M]")?;
    check("delta", delta, delta > 0.0 && delta < 2.0 / l6m, "(0, 2/L6M)")?;
    Ok((1.0 / delta - 0.5 * l6m, 1.0 / delta - 0.5 * alpha))
}

/// λ_opt = (1 − q_E)/(q_E C_stab) (α/2)^{1/2}.
pub fn lambda_opt(q_e: f64, alpha: f64, c_stab: f64) -> Result<f64> {
    check("q_E", q_e, q_e > 0.0 && q_e < 1.0, "(0, 1)")?;
    check("C_stab", c_stab, c_stab > 0.0, "(0, inf)")?;
    check("alpha", alpha, alpha > 0.0, "(0, inf)")?;
    Ok((1.0 - q_e) / (q_e * c_stab) * math::sqrt(0.5 * alpha))
}

/// θ′ = (θ + λ/λ_opt)/(1 − λ/λ_opt), defined for λ < λ_opt.
pub fn theta_prime(theta: f64, lambda: f64, lambda_opt: f64) -> Result<f64> {
    check("lambda", lambda, lambda >= 0.0 && lambda < lambda_opt, "[0, λ_opt)")?;
    let r = lambda / lambda_opt;
    Ok((theta + r) / (1.0 - r))
}

/// C_cea = L[2M]/α.
pub fn c_cea(l2m: f64, alpha: f64) -> f64 {
    l2m / alpha
}

/// τ = 2(M + 3M(L[3M]/α)^{1/2}).
pub fn tau(m: f64, l3m: f64, alpha: f64) -> f64 {
    2.0 * (m + 3.0 * m * math::sqrt(l3m / alpha))
}

/// τ = 2(M + 3M L[3M]/α), the variant without the square root.
pub fn tau_statement(m: f64, l3m: f64, alpha: f64) -> f64 {
    2.0 * (m + 3.0 * m * l3m / alpha)
}

/// C_mon = (2 + 8 C_stab[2M]²(1 + C_cea²) C_rel²)^{1/2}.
pub fn c_mon(c_stab: f64, c_cea: f64, c_rel: f64) -> f64 {
    math::sqrt(2.0 + 8.0 * c_stab * c_stab * (1.0 + c_cea * c_cea) * c_rel * c_rel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInputs {
    pub q_e: f64,
    pub alpha: f64,
    pub c_stab: f64,
    pub theta: f64,
    pub lambda: f64,
    pub l2m: f64,
    pub l3m: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub lambda_opt: f64,
    /// `None` when λ ≥ λ_opt.
    pub theta_prime: Option<f64>,
    pub c_cea: f64,
    pub tau: f64,
    pub tau_statement: f64,
}

pub fn thresholds(i: &ThresholdInputs) -> Result<Thresholds> {
    let lo = lambda_opt(i.q_e, i.alpha, i.c_stab)?;
    Ok(Thresholds {
        lambda_opt: lo,
        theta_prime: theta_prime(i.theta, i.lambda, lo).ok(),
        c_cea: c_cea(i.l2m, i.alpha),
        tau: tau(i.m, i.l3m, i.alpha),
        tau_statement: tau_statement(i.m, i.l3m, i.alpha),
    })
}

/// Step size and q² of the practical algorithm for a given L.
pub fn practical_delta(l: f64) -> (f64, f64) {
    let d = 1.0 / l;
    (d, 1.0 - d * d)
}
